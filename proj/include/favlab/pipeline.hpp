#pragma once

#include <map>
#include <string>
#include <vector>

#include "favlab/gap_lemma.hpp"
#include "favlab/generators.hpp"
#include "favlab/io.hpp"

namespace favlab {

/// Run parameters; every value is echoed into every output artifact.
struct PipelineParams {
  double aspect = 0.125;           // |J|
  double J_center = 0.25;          // rect axis convention
  double eps_c = 1.0 / 64.0;       // eps = eps_c / (C0 * M)
  double c1 = 1.0 / 64.0;          // recorded smallness bound for |J|
  double A = 4.0;                  // scale constant (desk-scale floor, recorded)
  double delta_base = 1.0 / 32.0;  // stopping threshold delta = delta_base / A
  double rho = 0.5;
  int depth = 2;                   // lattice levels
  double h = 4.8e-4;               // sample spacing
  double M = 2.0;                  // density hypothesis constant
  int bitset_depth = 16;
  double quad_per_decade = 32.0;
  int overlap_bound = 8;
  int centers = 48;                // strided centers for the sup-type checks
  int threads = 1;
  double density_bin = 0.01;

  double delta() const { return delta_base / A; }
  AngleInterval J() const { return {Direction::of(J_center), 0.5 * aspect}; }
};

enum class CheckStatus { kPass, kFail, kSkip };

struct CheckOutcome {
  std::string name;
  CheckStatus status = CheckStatus::kSkip;
  std::string detail;
};

/// Measured inequality ratios (reported, never asserted).
struct RatioSet {
  double cone_budget = 0.0;   // global cone-energy integral vs M|G|mu(E)
  double packing = 0.0;       // root mass vs energy + mass bound
  double filling = 0.0;       // inner cone vs direction-set cone
  double littlemeas = 0.0;    // gap-direction cone mass constant
  double ext_tilde = 0.0;     // exterior energy vs single-scale variant
};

struct GapRunStats {
  int bad_cubes = 0;
  int applicable = 0;  // bad cubes in passing trees, not stopping, resolved
  int passed = 0;
  int refused = 0;
  int not_found = 0;
  int failed = 0;
};

struct CaseResult {
  std::string name;
  std::vector<CheckOutcome> checks;
  RatioSet ratios;
  RatioSet ratios_refined;  // doubled quadrature resolution
  GapRunStats gap_stats;
  std::vector<GapVerdict> verdicts;
  double measured_C0 = 0.0;
  double measured_density = 0.0;
  double eps = 0.0;
  int N = 0;
  double max_eg_over_aspect = 0.0;  // max over cubes of eg / |J|
  std::size_t sample_size = 0;

  bool all_pass() const;
  const CheckOutcome* find(const std::string& name) const;
};

struct VerifyCase {
  std::string name;
  PlanarSet set;
  PipelineParams params;
  bool run_gap_checks = true;
  bool run_graph_extract = false;
  double graph_s = 0.5;
  /// When true the per-tree empty-cone results are asserted (engineered
  /// corpora); otherwise they are reported only.
  bool expect_empty_cones = false;
  /// Extra sample points appended after sampling (mutation harness).
  std::vector<std::pair<Vec2, double>> injected_points;
  /// Corrupts the enlargement exercise input so its measure window fails.
  bool mutate_enlargement_full_g = false;
};

/// Full pipeline over one case; writes a report bundle when out_dir is
/// nonempty.  Throws only on usage errors; check failures land in `checks`.
CaseResult run_case(const VerifyCase& vc, const std::string& out_dir = "");

/// The standard verification corpus.
std::vector<VerifyCase> default_corpus(int threads = 1);
/// Horizontal-segment configurations engineered to contain bad cubes while
/// passing the empty-cone precheck.
std::vector<VerifyCase> gap_corpus(int count, int threads = 1);
/// Parallel-segment configuration for the avoided-directions graph check.
VerifyCase segments_corollary_case(int threads = 1);

struct MutationOutcome {
  std::string name;
  std::string target_check;
  bool flipped = false;       // the targeted check fails under the corruption
  bool others_clean = true;   // the sibling checks stay green
  std::string detail;
};

std::vector<std::string> mutation_names();
MutationOutcome run_mutation(const std::string& name, int threads = 1);

}  // namespace favlab
