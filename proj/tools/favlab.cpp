#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "favlab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace favlab;

namespace {

int env_threads() {
  const char* v = std::getenv("FAVLAB_THREADS");
  if (v == nullptr) return 1;
  int t = std::atoi(v);
  return t > 0 ? t : 1;
}

PlanarSet build_from_generator(const std::string& kind, int n, int k, double direction,
                               const std::vector<double>& offsets,
                               const std::vector<double>& lengths, double lip, int nodes,
                               std::uint64_t seed, const std::string& file) {
  if (kind == "cantor4") return cantor4(n);
  if (kind == "segments") return parallel_segments(k, Direction::of(direction), offsets, lengths);
  if (kind == "lipschitz") return lipschitz_graph(lip, nodes, seed);
  if (kind == "from-file") return read_planar_set(file);
  throw PreconditionViolation("unknown generator kind: " + kind);
}

void apply_config(PipelineParams* p, const std::map<std::string, std::string>& cfg) {
  auto get = [&](const char* key, double* slot) {
    auto it = cfg.find(key);
    if (it != cfg.end()) *slot = std::stod(it->second);
  };
  get("aspect", &p->aspect);
  get("J_center", &p->J_center);
  get("eps_c", &p->eps_c);
  get("c1", &p->c1);
  get("A", &p->A);
  get("delta_base", &p->delta_base);
  get("rho", &p->rho);
  get("h", &p->h);
  get("M", &p->M);
  get("quad_per_decade", &p->quad_per_decade);
  get("density_bin", &p->density_bin);
  auto geti = [&](const char* key, int* slot) {
    auto it = cfg.find(key);
    if (it != cfg.end()) *slot = std::stoi(it->second);
  };
  geti("depth", &p->depth);
  geti("bitset_depth", &p->bitset_depth);
  geti("overlap_bound", &p->overlap_bound);
  geti("centers", &p->centers);
  geti("threads", &p->threads);
}

void validate(const PipelineParams& p) {
  if (!(p.aspect > 0.0 && p.aspect <= 1.0)) throw PreconditionViolation("aspect out of range");
  if (!(p.eps_c > 0.0 && p.eps_c < 1.0)) throw PreconditionViolation("eps_c out of range");
  if (!(p.rho > 0.0 && p.rho <= 0.5)) throw PreconditionViolation("rho out of range");
  if (p.A < 1.0) throw PreconditionViolation("A must be >= 1");
  if (p.h <= 0.0) throw PreconditionViolation("h must be positive");
}

std::map<std::string, std::string> echo_params(const PipelineParams& p) {
  std::map<std::string, std::string> out;
  auto put = [&](const char* k, double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    out[k] = os.str();
  };
  put("aspect", p.aspect);
  put("J_center", p.J_center);
  put("eps_c", p.eps_c);
  put("c1", p.c1);
  put("A", p.A);
  put("delta", p.delta());
  put("rho", p.rho);
  put("h", p.h);
  put("M", p.M);
  put("quad_per_decade", p.quad_per_decade);
  out["depth"] = std::to_string(p.depth);
  out["bitset_depth"] = std::to_string(p.bitset_depth);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"favlab: projections, direction sets, cube lattices, conical energies"};
  app.require_subcommand(1);
  int threads = env_threads();
  app.add_option("--threads", threads, "worker threads (or FAVLAB_THREADS)");

  // generate
  auto* gen = app.add_subcommand("generate", "emit a set as JSON plus a sampled measure CSV");
  std::string gen_kind = "cantor4", gen_file, gen_out = ".";
  int gen_n = 3, gen_k = 2, gen_nodes = 64;
  double gen_direction = 0.0, gen_lip = 1.0, gen_h = 1e-3;
  std::uint64_t gen_seed = 1;
  std::vector<double> gen_offsets{0.0, 0.5}, gen_lengths{1.0, 1.0};
  gen->add_option("--kind", gen_kind, "cantor4 | segments | lipschitz | from-file");
  gen->add_option("--n", gen_n, "cantor4 iterate");
  gen->add_option("--k", gen_k, "segment count");
  gen->add_option("--direction", gen_direction, "segment direction in turns");
  gen->add_option("--offsets", gen_offsets, "perpendicular offsets")->expected(-1);
  gen->add_option("--lengths", gen_lengths, "segment lengths")->expected(-1);
  gen->add_option("--lip", gen_lip, "lipschitz bound");
  gen->add_option("--nodes", gen_nodes, "lipschitz graph nodes");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--file", gen_file, "input JSON for from-file");
  gen->add_option("--h", gen_h, "sample spacing");
  gen->add_option("--out", gen_out, "output directory");

  // favard
  auto* fav = app.add_subcommand("favard", "per-angle projection lengths and their mean");
  std::string fav_set, fav_out = ".";
  int fav_angles = 4096;
  bool fav_no_timestamp = false;
  fav->add_option("--set", fav_set, "PlanarSet JSON path")->required();
  fav->add_option("--n-angles", fav_angles, "quadrature angles");
  fav->add_option("--out", fav_out, "output directory");
  fav->add_flag("--no-timestamp", fav_no_timestamp, "suppress the SVG timestamp comment");

  // project
  auto* proj = app.add_subcommand("project", "projection length and density at one angle");
  std::string proj_set;
  double proj_theta = 0.0, proj_h = 1e-3, proj_bin = 0.01;
  proj->add_option("--set", proj_set, "PlanarSet JSON path")->required();
  proj->add_option("--theta", proj_theta, "direction in turns");
  proj->add_option("--h", proj_h, "sample spacing");
  proj->add_option("--bin", proj_bin, "density bin width");

  // energies / corona / verify share the config plumbing
  std::string cfg_path, run_set, run_out = "favlab-out", corpus = "default", mutate;
  int gap_count = 25;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", cfg_path, "key=value config file");
    cmd->add_option("--set", run_set, "PlanarSet JSON path");
    cmd->add_option("--out", run_out, "output directory");
  };
  auto* ener = app.add_subcommand("energies", "cube lattice + per-cube energies");
  add_run_options(ener);
  auto* cor = app.add_subcommand("corona", "stopping-time decomposition report");
  add_run_options(cor);
  auto* ver = app.add_subcommand("verify", "run the verification corpus");
  add_run_options(ver);
  ver->add_option("--corpus", corpus, "default | gaps | segments");
  ver->add_option("--gap-count", gap_count, "gap corpus size");
  ver->add_option("--mutate", mutate, "run one scripted corruption instead");

  // iterate-directions
  auto* iter = app.add_subcommand("iterate-directions", "direction-set enlargement iteration");
  std::string iter_g, iter_out = ".";
  double iter_eps = 0.1, iter_s = 0.5;
  int iter_depth = 0;
  std::uint64_t iter_index = 0;
  iter->add_option("--g", iter_g, "direction-set line (depth=D;hex=...)")->required();
  iter->add_option("--j-depth", iter_depth, "dyadic interval depth");
  iter->add_option("--j-index", iter_index, "dyadic interval index");
  iter->add_option("--eps", iter_eps, "enlargement eps");
  iter->add_option("--s", iter_s, "initial measure fraction");
  iter->add_option("--out", iter_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      PlanarSet set = build_from_generator(gen_kind, gen_n, gen_k, gen_direction, gen_offsets,
                                           gen_lengths, gen_lip, gen_nodes, gen_seed, gen_file);
      fs::create_directories(gen_out);
      write_planar_set(gen_out + "/set.json", set);
      DiscreteMeasure mu = sample_measure(set, gen_h);
      std::map<std::string, std::string> params{{"kind", gen_kind}, {"h", std::to_string(gen_h)}};
      write_measure_csv(gen_out + "/measure.csv", mu, params);
      std::cout << "wrote " << gen_out << "/set.json (" << set.primitives.size()
                << " primitives), measure.csv (" << mu.size() << " points)\n";
      return 0;
    }

    if (fav->parsed()) {
      PlanarSet set = read_planar_set(fav_set);
      std::vector<double> lengths = favard_profile(set, fav_angles, threads);
      double value = 0.0;
      for (double v : lengths) value += v;
      value /= static_cast<double>(fav_angles);
      fs::create_directories(fav_out);
      std::ostringstream csv;
      csv.precision(17);
      csv << "# set=" << fav_set << "\n# n_angles=" << fav_angles << "\n";
      csv << "theta,projection_length\n";
      for (int i = 0; i < fav_angles; ++i)
        csv << (i + 0.5) / fav_angles << "," << lengths[i] << "\n";
      write_text_file(fav_out + "/favard.csv", csv.str());
      write_text_file(fav_out + "/favard.svg",
                      favard_plot_svg(lengths, value, "projection length", !fav_no_timestamp));
      std::cout << "favard=" << value << "\n";
      return 0;
    }

    if (proj->parsed()) {
      PlanarSet set = read_planar_set(proj_set);
      Direction theta = Direction::of(proj_theta);
      double len = projection_length(set, theta);
      DiscreteMeasure mu = sample_measure(set, proj_h);
      DensityProfile prof = pushforward_density(mu, theta, proj_bin);
      std::cout << "projection_length=" << len << "\nsup_density=" << prof.sup_norm
                << (prof.degenerate ? " (degenerate)" : "") << "\n";
      return 0;
    }

    if (iter->parsed()) {
      DirectionSet g = DirectionSet::deserialize(iter_g);
      DyadicInterval J{iter_depth, iter_index};
      EnlargementRun run = iterate_enlargement(J, g, iter_eps, iter_s);
      fs::create_directories(iter_out);
      std::ostringstream os;
      os << "{\"steps\":" << run.steps << ",\"bound\":" << run.step_bound << ",\"final\":\""
         << run.final.serialize() << "\"}\n";
      write_text_file(iter_out + "/iteration.json", os.str());
      for (std::size_t i = 0; i < run.traces.size(); ++i)
        write_text_file(iter_out + "/gaps_after_" + std::to_string(i) + ".json",
                        gaps_to_json(run.traces[i].gaps_after));
      std::cout << "steps=" << run.steps << " bound=" << run.step_bound << "\n";
      return 0;
    }

    if (ener->parsed() || cor->parsed()) {
      PipelineParams p;
      if (!cfg_path.empty()) apply_config(&p, parse_config_file(cfg_path));
      p.threads = threads;
      validate(p);
      if (run_set.empty()) throw PreconditionViolation("--set is required");
      VerifyCase vc;
      vc.name = ener->parsed() ? "energies" : "corona";
      vc.set = read_planar_set(run_set);
      vc.params = p;
      vc.run_gap_checks = cor->parsed();
      CaseResult res = run_case(vc, run_out + "/" + vc.name);
      std::cout << "wrote " << run_out << "/" << vc.name << " (sample " << res.sample_size
                << " points)\n";
      return res.all_pass() ? 0 : 1;
    }

    if (ver->parsed()) {
      PipelineParams base;
      if (!cfg_path.empty()) apply_config(&base, parse_config_file(cfg_path));
      base.threads = threads;
      validate(base);

      if (!mutate.empty()) {
        MutationOutcome mo = run_mutation(mutate, threads);
        std::cout << "mutation " << mo.name << ": target=" << mo.target_check
                  << " flipped=" << (mo.flipped ? "yes" : "no")
                  << " others_clean=" << (mo.others_clean ? "yes" : "no") << " (" << mo.detail
                  << ")\n";
        if (mo.flipped && mo.others_clean) {
          std::cout << "FAIL " << mo.target_check << " (as intended by the corruption)\n";
          return 1;
        }
        std::cout << "mutation did not flip its target\n";
        return 2;
      }

      std::vector<VerifyCase> cases;
      if (corpus == "default") {
        cases = default_corpus(threads);
      } else if (corpus == "gaps") {
        cases = gap_corpus(gap_count, threads);
      } else if (corpus == "segments") {
        cases = {segments_corollary_case(threads)};
      } else {
        throw PreconditionViolation("unknown corpus: " + corpus);
      }
      bool all_ok = true;
      std::string first_failure;
      for (auto& vc : cases) {
        if (!run_set.empty()) vc.set = read_planar_set(run_set);
        CaseResult res = run_case(vc, run_out + "/" + vc.name);
        for (const auto& c : res.checks) {
          const char* s = c.status == CheckStatus::kPass   ? "pass"
                          : c.status == CheckStatus::kFail ? "FAIL"
                                                           : "skip";
          std::cout << vc.name << ": " << s << " " << c.name
                    << (c.detail.empty() ? "" : " [" + c.detail + "]") << "\n";
          if (c.status == CheckStatus::kFail && first_failure.empty())
            first_failure = vc.name + "/" + c.name;
        }
        all_ok = all_ok && res.all_pass();
      }
      (void)echo_params(base);
      if (!all_ok) {
        std::cout << "FAIL first failing check: " << first_failure << "\n";
        return 1;
      }
      std::cout << "all checks passed (" << cases.size() << " cases)\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
