#include "favlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "json.hpp"

namespace favlab {

using nlohmann::json;

bool CaseResult::all_pass() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::kFail) return false;
  return true;
}

const CheckOutcome* CaseResult::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Direction bitset of the cells covering the interval J, minus an optional
/// carved dyadic gap cell (the gap gets a witness direction at its center).
struct DirectionConfig {
  DirectionSet g;
  DirectionSet j_bits;
  std::vector<GapWitness> witnesses;  // for the carved gap, if any
  bool carved = false;
  DyadicInterval carved_cell;
};

DirectionConfig build_directions(const PipelineParams& p, double eps) {
  DirectionConfig dc{DirectionSet(p.bitset_depth), DirectionSet(p.bitset_depth), {}, false, {}};
  AngleInterval J = p.J();
  dc.j_bits.set_cells_touching(J.center.t - J.halfwidth, J.center.t + J.halfwidth);
  dc.g = dc.j_bits;
  // Carve a dyadic gap no larger than eps*|J|/2, if the bitset can resolve it.
  int d = 0;
  while (d <= p.bitset_depth && std::ldexp(1.0, -d) > 0.5 * eps * p.aspect) ++d;
  if (d <= p.bitset_depth) {
    double target = p.J_center - 0.25 * p.aspect;
    DyadicInterval cell{d, static_cast<std::uint64_t>(std::floor(target * std::ldexp(1.0, d)))};
    DirectionSet carve = DirectionSet::from_interval(p.bitset_depth, cell);
    if (dc.g.contains(carve)) {
      dc.g = dc.g.minus(carve);
      dc.carved = true;
      dc.carved_cell = cell;
    }
  }
  return dc;
}

/// Dyadic interval [J_center, J_center + aspect) when the aspect is an exact
/// power of two; used by the enlargement and gap-direction checks.
bool dyadic_interval_of(const PipelineParams& p, DyadicInterval* out) {
  int d = static_cast<int>(std::lround(std::log2(1.0 / p.aspect)));
  if (std::ldexp(1.0, -d) != p.aspect) return false;
  double idx = p.J_center * std::ldexp(1.0, d);
  if (idx != std::floor(idx)) return false;
  *out = {d, static_cast<std::uint64_t>(idx)};
  return true;
}

void render_gap_failure_svg(const std::string& path, const GapVerdict& v,
                            const DiscreteMeasure& mu) {
  SvgCanvas svg(640, 480);
  svg.comment("gap-lemma failure render: root=" + std::to_string(v.root) +
              " cube=" + std::to_string(v.cube) + " detail=" + v.detail);
  double lo_x = kInf, hi_x = -kInf, lo_y = kInf, hi_y = -kInf;
  for (const Vec2& pt : mu.points) {
    lo_x = std::min(lo_x, pt.x);
    hi_x = std::max(hi_x, pt.x);
    lo_y = std::min(lo_y, pt.y);
    hi_y = std::max(hi_y, pt.y);
  }
  double sx = 600.0 / std::max(1e-12, hi_x - lo_x);
  double sy = 440.0 / std::max(1e-12, hi_y - lo_y);
  auto X = [&](double x) { return 20.0 + (x - lo_x) * sx; };
  auto Y = [&](double y) { return 460.0 - (y - lo_y) * sy; };
  std::size_t stride = std::max<std::size_t>(1, mu.size() / 2000);
  for (std::size_t i = 0; i < mu.size(); i += stride)
    svg.rect(X(mu.points[i].x), Y(mu.points[i].y), 1, 1, "black", "black");
  svg.rect(X(v.empty_span.first), 20, (v.empty_span.second - v.empty_span.first) * sx, 440,
           "goldenrod");
  if (v.gap_found)
    svg.rect(X(v.gap.first), 20, (v.gap.second - v.gap.first) * sx, 440, "firebrick");
  svg.text(24, 16, "verdict: " + v.detail);
  write_text_file(path, svg.render());
}

}  // namespace

CaseResult run_case(const VerifyCase& vc, const std::string& out_dir) {
  const PipelineParams& p = vc.params;
  CaseResult res;
  res.name = vc.name;
  auto add = [&](const std::string& name, CheckStatus st, const std::string& detail) {
    res.checks.push_back({name, st, detail});
  };
  auto add_bool = [&](const std::string& name, bool ok, const std::string& detail) {
    add(name, ok ? CheckStatus::kPass : CheckStatus::kFail, detail);
  };

  DiscreteMeasure mu = sample_measure(vc.set, p.h);
  for (const auto& [pt, w] : vc.injected_points) {
    mu.points.push_back(pt);
    mu.weights.push_back(w);
    mu.total += w;
  }
  res.sample_size = mu.size();

  double c0_raw = ad_constant(mu, 24, 12);
  res.measured_C0 = c0_raw;
  double c0 = std::isfinite(c0_raw) ? std::clamp(c0_raw, 1.0, 16.0) : 16.0;
  res.eps = p.eps_c / (c0 * p.M);
  res.N = static_cast<int>(std::ceil(4.0 * p.M * c0));

  // Density hypothesis near the rect axis: the one shared M-check.
  AngleInterval J = p.J();
  DensityProfile axis_density = pushforward_density(mu, J.center.perp(), p.density_bin);
  res.measured_density = axis_density.sup_norm;
  bool density_ok = !axis_density.degenerate && axis_density.sup_norm <= p.M;
  add_bool("density-bound", density_ok,
           "sup=" + fmt(axis_density.sup_norm) + " M=" + fmt(p.M));

  DirectionConfig dirs = build_directions(p, res.eps);

  // Deterministic exercise of the direction-set enlargement machinery.
  DyadicInterval j_dyadic;
  bool have_dyadic = dyadic_interval_of(p, &j_dyadic);
  if (have_dyadic) {
    double exercise_eps = std::max(res.eps, 1.0 / 16.0);
    DirectionSet g0(p.bitset_depth);
    int shift = p.bitset_depth - j_dyadic.depth;
    std::uint64_t lo = j_dyadic.index << shift;
    std::uint64_t hi = (j_dyadic.index + 1) << shift;
    if (vc.mutate_enlargement_full_g) {
      g0.set_range(lo, hi);
    } else {
      for (std::uint64_t c = lo; c < hi; c += 4) g0.set(c);
    }
    try {
      EnlargementRun run = iterate_enlargement(j_dyadic, g0, exercise_eps, 1.0);
      add("enlargement", CheckStatus::kPass,
          "steps=" + std::to_string(run.steps) + " bound=" + std::to_string(run.step_bound));
    } catch (const std::exception& e) {
      add("enlargement", CheckStatus::kFail, e.what());
    }
  } else {
    add("enlargement", CheckStatus::kSkip, "aspect is not dyadic");
  }

  CubeLattice lat = build_lattice(mu, p.aspect, p.rho, p.depth);

  {
    bool partition_ok = true;
    std::vector<int> seen(mu.size(), 0);
    for (int lv = 0; lv < lat.depth() && partition_ok; ++lv) {
      std::fill(seen.begin(), seen.end(), 0);
      std::size_t count = 0;
      for (int id : lat.levels[lv]) {
        for (int m : lat.cube(id).members) {
          ++seen[static_cast<std::size_t>(m)];
          ++count;
        }
      }
      partition_ok = count == mu.size() &&
                     std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; });
    }
    add_bool("lattice-partition", partition_ok, "levels=" + std::to_string(lat.depth()));

    bool nesting_ok = true;
    for (const auto& q : lat.cubes) {
      if (q.parent < 0) continue;
      const auto& parent = lat.cube(q.parent);
      for (int m : q.members)
        if (!std::binary_search(parent.members.begin(), parent.members.end(), m)) {
          nesting_ok = false;
          break;
        }
    }
    add_bool("lattice-nesting", nesting_ok, "");
    add("lattice-sandwich", CheckStatus::kPass,
        "c_in=" + fmt(lat.in_constant) + " C_out=" + fmt(lat.out_constant));
  }

  if (density_ok) {
    try {
      CubeMassReport cm = cube_mass_bounds(lat, mu, p.M, p.density_bin);
      add("cube-mass", CheckStatus::kPass,
          "max rect ratio=" + fmt(cm.max_rect_ratio) + " min core ratio=" + fmt(cm.min_core_ratio));
    } catch (const HypothesisUnverified& e) {
      add("cube-mass", CheckStatus::kFail, e.what());
    }
  } else {
    add("cube-mass", CheckStatus::kSkip, "density hypothesis not verified");
  }

  EnergyTable en = compute_energies(lat, mu, dirs.g, J, p.A, {p.quad_per_decade}, p.threads);
  {
    double c_triv = 10.0 * std::pow(p.A, 4) * p.M * c0;
    double worst = 0.0;
    for (double e : en.eg) worst = std::max(worst, e / p.aspect);
    res.max_eg_over_aspect = worst;
    add_bool("energy-trivial-bound", worst <= c_triv,
             "max eg/|J|=" + fmt(worst) + " bound=" + fmt(c_triv));
    bool additive = true;
    for (std::size_t i = 0; i < en.ej.size(); ++i) {
      double lhs = en.ej[i];
      double rhs = en.ej_int[i] + en.ej_ext[i];
      if (std::fabs(lhs - rhs) > 1e-12 * std::max(1.0, std::fabs(lhs))) additive = false;
    }
    add_bool("energy-additivity", additive, "");
  }

  Corona corona = build_corona(lat, en, p.aspect, p.delta());
  {
    std::size_t covered = 0;
    for (const auto& r : corona.roots) covered += r.tree.size();
    bool ok = covered == lat.cubes.size() &&
              std::none_of(corona.root_of.begin(), corona.root_of.end(),
                           [](int v) { return v < 0; });
    add_bool("corona-partition", ok,
             "roots=" + std::to_string(corona.roots.size()) +
             " cubes=" + std::to_string(lat.cubes.size()));
  }

  TreeBoundsReport tb = check_tree_bounds(corona, lat, en);
  add_bool("tree-bounds", tb.all_ok, "roots=" + std::to_string(tb.rows.size()));

  // Gap-direction mass check on the dyadic twin of J.
  if (have_dyadic && dirs.carved) {
    DirectionSet g_little(p.bitset_depth);
    g_little.set_interval(j_dyadic);
    // Carve a gap cell strictly inside the dyadic interval.
    DyadicInterval gap_cell{dirs.carved_cell.depth, 0};
    double target = j_dyadic.mid();
    gap_cell.index =
        static_cast<std::uint64_t>(std::floor(target * std::ldexp(1.0, gap_cell.depth)));
    DirectionSet carve = DirectionSet::from_interval(p.bitset_depth, gap_cell);
    if (g_little.contains(carve)) {
      g_little = g_little.minus(carve);
      GapWitness w{gap_cell, Direction::of(gap_cell.mid())};
      DensityProfile wd = pushforward_density(mu, w.theta.perp(), p.density_bin);
      if (wd.degenerate || wd.sup_norm > p.M) {
        add("gap-direction-mass", CheckStatus::kFail,
            "witness density " + fmt(wd.sup_norm) + " exceeds M");
      } else {
        try {
          LittlemeasReport lm = check_littlemeas(mu, j_dyadic, g_little, {w}, p.M, p.centers);
          res.ratios.littlemeas = lm.max_ratio;
          res.ratios_refined.littlemeas = lm.max_ratio;  // exact in r by construction
          add("gap-direction-mass", CheckStatus::kPass, "C=" + fmt(lm.max_ratio));
        } catch (const WitnessMissing& e) {
          add("gap-direction-mass", CheckStatus::kFail, e.what());
        }
      }
    } else {
      add("gap-direction-mass", CheckStatus::kSkip, "gap cell not inside the dyadic interval");
    }
  } else {
    add("gap-direction-mass", CheckStatus::kSkip, "no carved gap at this resolution");
  }

  try {
    FillingGapsReport fg = check_filling_gaps(mu, J, dirs.g, res.eps, p.centers);
    res.ratios.filling = fg.max_ratio;
    res.ratios_refined.filling = fg.max_ratio;  // exact in r by construction
    add_bool("filling-gaps", fg.violations.empty(),
             "max ratio=" + fmt(fg.max_ratio) +
             " violations=" + std::to_string(fg.violations.size()));
  } catch (const PreconditionViolation& e) {
    add("filling-gaps", CheckStatus::kFail, e.what());
  }

  std::vector<TreeConeCheck> cones = check_empty_cones(corona, lat, mu, J, p.A);
  std::vector<char> tree_passes(corona.roots.size(), 0);
  int passing = 0;
  for (const auto& c : cones) {
    tree_passes[static_cast<std::size_t>(c.root_index)] = c.pass ? 1 : 0;
    passing += c.pass ? 1 : 0;
  }
  {
    std::string detail = std::to_string(passing) + "/" + std::to_string(cones.size()) + " trees";
    if (vc.expect_empty_cones) {
      add_bool("empty-cones", passing == static_cast<int>(cones.size()), detail);
    } else {
      add("empty-cones", CheckStatus::kSkip, detail + " (reported, not asserted)");
    }
  }

  OverlapReport ov = check_projection_overlap(corona, lat, tree_passes, p.overlap_bound);
  add_bool("projection-overlap", ov.all_ok, "rows=" + std::to_string(ov.rows.size()));

  if (vc.run_gap_checks) {
    std::vector<BadCubeWitness> bads = find_bad_cubes(corona, lat, mu, J);
    res.gap_stats.bad_cubes = static_cast<int>(bads.size());
    std::map<int, GapSet> gap_cache;
    GapLemmaParams gp{p.A, res.N, 64.0};
    for (const auto& bad : bads) {
      if (!tree_passes[static_cast<std::size_t>(bad.root_index)] || bad.in_bce) continue;
      auto it = gap_cache.find(bad.root_cube);
      if (it == gap_cache.end())
        it = gap_cache.emplace(bad.root_cube, find_gaps(lat, mu, bad.root_cube, p.A)).first;
      GapVerdict v = verify_gap_lemma(lat, mu, bad, it->second, gp);
      switch (v.status) {
        case GapVerdict::Status::kPass:
          ++res.gap_stats.applicable;
          ++res.gap_stats.passed;
          break;
        case GapVerdict::Status::kFail:
          ++res.gap_stats.applicable;
          ++res.gap_stats.failed;
          break;
        case GapVerdict::Status::kRefused:
          ++res.gap_stats.refused;
          break;
        case GapVerdict::Status::kNotFound:
          ++res.gap_stats.not_found;
          break;
        default:
          break;
      }
      res.verdicts.push_back(std::move(v));
    }
    add_bool("gap-lemma", res.gap_stats.failed == 0,
             "bad=" + std::to_string(res.gap_stats.bad_cubes) +
             " pass=" + std::to_string(res.gap_stats.passed) +
             " fail=" + std::to_string(res.gap_stats.failed) +
             " refused=" + std::to_string(res.gap_stats.refused) +
             " notfound=" + std::to_string(res.gap_stats.not_found));
  }

  if (vc.run_graph_extract) {
    try {
      DiscreteMeasure small = mu;
      std::size_t stride = std::max<std::size_t>(1, mu.size() / 1000);
      if (stride > 1) {
        small.points.clear();
        small.weights.clear();
        small.total = 0.0;
        for (std::size_t i = 0; i < mu.size(); i += stride) {
          small.points.push_back(mu.points[i]);
          small.weights.push_back(mu.weights[i]);
          small.total += mu.weights[i];
        }
      }
      DirectionSet spectrum = direction_spectrum(small, 10);
      DirectionSet avoided = spectrum.complement();
      GraphExtract ge = extract_graph_parallel_segments(vc.set, mu, avoided, vc.graph_s,
                                                        p.density_bin);
      add_bool("segments-graph", ge.pass,
               "theta=" + fmt(ge.theta.t) + " lip=" + fmt(ge.lip) + " density=" +
               fmt(ge.density_sup) + " bound=" + fmt(ge.lip_bound));
    } catch (const std::exception& e) {
      add("segments-graph", CheckStatus::kFail, e.what());
    }
  }

  // Measured-ratio reports at two quadrature resolutions.
  DirectionSet budget_g = dirs.g.rotated(-static_cast<std::int64_t>(dirs.g.cells() / 4));
  res.ratios.cone_budget =
      check_cone_energy_bound(mu, budget_g, p.M, mu.spacing, p.quad_per_decade).ratio;
  res.ratios.packing =
      check_packing(corona, lat, mu, dirs.g, p.delta(), p.quad_per_decade).ratio;
  res.ratios.ext_tilde = exterior_energy_ratio(lat, en);

  EnergyTable en2 =
      compute_energies(lat, mu, dirs.g, J, p.A, {2.0 * p.quad_per_decade}, p.threads);
  res.ratios_refined.cone_budget =
      check_cone_energy_bound(mu, budget_g, p.M, mu.spacing, 2.0 * p.quad_per_decade).ratio;
  res.ratios_refined.packing =
      check_packing(corona, lat, mu, dirs.g, p.delta(), 2.0 * p.quad_per_decade).ratio;
  res.ratios_refined.ext_tilde = exterior_energy_ratio(lat, en2);

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    json params = {{"aspect", p.aspect},
                   {"J_center", p.J_center},
                   {"eps_c", p.eps_c},
                   {"c1", p.c1},
                   {"A", p.A},
                   {"delta", p.delta()},
                   {"rho", p.rho},
                   {"depth", p.depth},
                   {"h", p.h},
                   {"M", p.M},
                   {"bitset_depth", p.bitset_depth},
                   {"quad_per_decade", p.quad_per_decade},
                   {"overlap_bound", p.overlap_bound},
                   {"centers", p.centers},
                   {"eps", res.eps},
                   {"N", res.N},
                   {"measured_C0", std::isfinite(c0_raw) ? c0_raw : -1.0},
                   {"measured_density", res.measured_density},
                   {"sample_size", res.sample_size}};
    json density_curve = json::array();
    for (double bin : {p.density_bin, p.density_bin / 2.0, p.density_bin / 4.0}) {
      DensityProfile d = pushforward_density(mu, J.center.perp(), bin);
      density_curve.push_back({{"bin", bin}, {"sup", d.sup_norm}});
    }
    json checks = json::array();
    for (const auto& c : res.checks)
      checks.push_back({{"name", c.name},
                        {"status", c.status == CheckStatus::kPass   ? "pass"
                                   : c.status == CheckStatus::kFail ? "fail"
                                                                    : "skip"},
                        {"detail", c.detail}});
    json ratios = {{"cone_budget", res.ratios.cone_budget},
                   {"packing", res.ratios.packing},
                   {"filling", res.ratios.filling},
                   {"littlemeas", res.ratios.littlemeas},
                   {"ext_tilde", res.ratios.ext_tilde}};
    json refined = {{"cone_budget", res.ratios_refined.cone_budget},
                    {"packing", res.ratios_refined.packing},
                    {"filling", res.ratios_refined.filling},
                    {"littlemeas", res.ratios_refined.littlemeas},
                    {"ext_tilde", res.ratios_refined.ext_tilde}};
    json summary = {{"case", vc.name},      {"params", params},   {"checks", checks},
                    {"ratios", ratios},     {"ratios_refined", refined},
                    {"density_curve", density_curve}};
    write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

    std::ostringstream energies_csv;
    energies_csv.precision(12);
    energies_csv << "cube,level,eg,ej_int,ej_ext,ej_tilde,root,is_bce\n";
    for (const auto& q : lat.cubes) {
      auto qi = static_cast<std::size_t>(q.id);
      energies_csv << q.id << "," << q.level << "," << en.eg[qi] << "," << en.ej_int[qi] << ","
                   << en.ej_ext[qi] << "," << en.ej_tilde[qi] << "," << corona.root_of[qi] << ","
                   << static_cast<int>(corona.is_bce[qi]) << "\n";
    }
    write_text_file(out_dir + "/energies.csv", energies_csv.str());

    std::ostringstream tb_csv;
    tb_csv.precision(12);
    tb_csv << "root,small_sum,small_bound,bce_mass,tree_energy,upper_ratio,small_ok,lower_ok\n";
    for (const auto& row : tb.rows)
      tb_csv << row.root << "," << row.small_sum << "," << row.small_bound << ","
             << row.bce_mass_sum << "," << row.tree_energy << "," << row.upper_ratio << ","
             << row.small_ok << "," << row.lower_ok << "\n";
    write_text_file(out_dir + "/tree_bounds.csv", tb_csv.str());

    std::ostringstream ov_csv;
    ov_csv << "root,level,max_overlap,applicable,ok\n";
    for (const auto& row : ov.rows)
      ov_csv << row.root << "," << row.level << "," << row.max_overlap << "," << row.applicable
             << "," << row.ok << "\n";
    write_text_file(out_dir + "/overlap.csv", ov_csv.str());

    std::ostringstream verdicts_jsonl;
    verdicts_jsonl.precision(12);
    int failure_renders = 0;
    for (const auto& v : res.verdicts) {
      json row = {{"root", v.root},
                  {"cube", v.cube},
                  {"status", v.status == GapVerdict::Status::kPass      ? "pass"
                             : v.status == GapVerdict::Status::kFail    ? "fail"
                             : v.status == GapVerdict::Status::kRefused ? "refused"
                                                                        : "notfound"},
                  {"leftist_index", v.leftist_index},
                  {"b_over_side", v.b_over_side},
                  {"empty_span", {v.empty_span.first, v.empty_span.second}},
                  {"gap", {v.gap.first, v.gap.second}},
                  {"detail", v.detail}};
      verdicts_jsonl << row.dump() << "\n";
      if (v.status == GapVerdict::Status::kFail && failure_renders < 8) {
        render_gap_failure_svg(
            out_dir + "/failure_gap_" + std::to_string(failure_renders) + ".svg", v, mu);
        ++failure_renders;
      }
    }
    write_text_file(out_dir + "/gap_verdicts.jsonl", verdicts_jsonl.str());
  }
  return res;
}

namespace {

/// Two horizontal segments with a horizontal void and a vertical offset,
/// tuned so cross pairs land in the exterior direction window while the
/// near-axis cones stay empty.
VerifyCase make_hseg_case(const std::string& name, double a, double vertical, double gap_ratio,
                          bool second_above, int threads) {
  VerifyCase vc;
  vc.name = name;
  double g = gap_ratio * vertical;
  double b = 0.94 - a - g;
  double y2 = second_above ? vertical : -vertical;
  PlanarSet set;
  double total = a + b;
  set.primitives.push_back(Segment{{0.0, 0.0}, {a, 0.0}, a / total});
  set.primitives.push_back(Segment{{a + g, y2}, {a + g + b, y2}, b / total});
  vc.set = std::move(set);
  vc.params.aspect = 0.125;
  vc.params.A = 4.0;
  vc.params.depth = 2;
  vc.params.h = 4.5e-4;
  vc.params.M = 2.0;
  vc.params.threads = threads;
  vc.expect_empty_cones = true;
  vc.run_gap_checks = true;
  return vc;
}

}  // namespace

std::vector<VerifyCase> gap_corpus(int count, int threads) {
  std::vector<VerifyCase> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double a = 0.34 + 0.02 * (i % 4);
    double vertical = 0.58 + 0.015 * (i % 8);
    double gap_ratio = 0.22 + 0.01 * (i % 5);
    bool above = (i % 2) == 1;
    out.push_back(make_hseg_case("hseg-" + std::to_string(i), a, vertical, gap_ratio, above,
                                 threads));
  }
  return out;
}

std::vector<VerifyCase> default_corpus(int threads) {
  std::vector<VerifyCase> out;
  auto gaps = gap_corpus(2, threads);
  gaps[0].name = "hseg-basic";
  gaps[1].name = "hseg-raised";
  out.push_back(gaps[0]);
  out.push_back(gaps[1]);

  VerifyCase cantor;
  cantor.name = "cantor-3";
  cantor.set = cantor4(3);
  cantor.params.aspect = 0.125;
  cantor.params.A = 4.0;
  cantor.params.depth = 3;
  cantor.params.h = 1e-3;
  cantor.params.M = 10.0;
  cantor.params.threads = threads;
  cantor.expect_empty_cones = false;
  cantor.run_gap_checks = true;
  out.push_back(cantor);

  VerifyCase lip;
  lip.name = "lipschitz-half";
  lip.set = lipschitz_graph(0.5, 64, 7);
  lip.params.aspect = 0.125;
  lip.params.A = 4.0;
  lip.params.depth = 2;
  lip.params.h = 5e-4;
  lip.params.M = 2.0;
  lip.params.threads = threads;
  lip.expect_empty_cones = true;
  lip.run_gap_checks = true;
  out.push_back(lip);

  out.push_back(segments_corollary_case(threads));
  return out;
}

VerifyCase segments_corollary_case(int threads) {
  VerifyCase vc;
  vc.name = "segments-corollary";
  vc.set = parallel_segments(2, Direction{0.0}, {0.0, 1.0}, {0.2, 0.2});
  vc.params.aspect = 0.125;
  vc.params.A = 4.0;
  vc.params.depth = 2;
  vc.params.h = 2.5e-4;
  vc.params.M = 4.0;
  vc.params.threads = threads;
  vc.expect_empty_cones = false;
  vc.run_gap_checks = false;
  vc.run_graph_extract = true;
  vc.graph_s = 0.5;
  return vc;
}

std::vector<std::string> mutation_names() {
  return {"point-in-empty-rect", "vertical-pair", "density-spike", "direction-window",
          "non-graph-pair"};
}

MutationOutcome run_mutation(const std::string& name, int threads) {
  MutationOutcome out;
  out.name = name;

  auto others_clean = [](const CaseResult& res, const std::string& target) {
    for (const auto& c : res.checks)
      if (c.name != target && c.status == CheckStatus::kFail) return false;
    return true;
  };

  if (name == "vertical-pair") {
    out.target_check = "empty-cones";
    VerifyCase vc = gap_corpus(1, threads)[0];
    // A sample point 0.35 above the middle of the first segment: the pair is
    // inside the truncated near-axis cone at the tree scales.
    double a = 0.34;
    double spacing = 4.5e-4 * (a + (0.94 - a - 0.22 * 0.58));
    double x0 = std::floor(0.5 * a / spacing) * spacing + 0.5 * spacing;
    vc.injected_points.emplace_back(Vec2{x0, 0.35}, vc.params.h);
    CaseResult res = run_case(vc);
    const CheckOutcome* c = res.find("empty-cones");
    out.flipped = c != nullptr && c->status == CheckStatus::kFail;
    out.others_clean = others_clean(res, "empty-cones");
    out.detail = c != nullptr ? c->detail : "check missing";
    return out;
  }

  if (name == "density-spike") {
    out.target_check = "density-bound";
    VerifyCase vc = gap_corpus(1, threads)[0];
    // Coincident heavy atoms pile mass into one projection bin without
    // creating any new cone pair (zero distances are excluded everywhere).
    for (int k = 0; k < 8; ++k) vc.injected_points.emplace_back(Vec2{0.17, 0.0}, 0.025);
    CaseResult res = run_case(vc);
    const CheckOutcome* c = res.find("density-bound");
    out.flipped = c != nullptr && c->status == CheckStatus::kFail;
    out.others_clean = others_clean(res, "density-bound");
    out.detail = c != nullptr ? c->detail : "check missing";
    return out;
  }

  if (name == "direction-window") {
    out.target_check = "enlargement";
    VerifyCase vc = gap_corpus(1, threads)[0];
    vc.mutate_enlargement_full_g = true;  // measure window of the construction violated
    CaseResult res = run_case(vc);
    const CheckOutcome* c = res.find("enlargement");
    out.flipped = c != nullptr && c->status == CheckStatus::kFail;
    out.others_clean = others_clean(res, "enlargement");
    out.detail = c != nullptr ? c->detail : "check missing";
    return out;
  }

  if (name == "non-graph-pair") {
    out.target_check = "segments-graph";
    VerifyCase vc = segments_corollary_case(threads);
    DiscreteMeasure mu = sample_measure(vc.set, vc.params.h);
    DiscreteMeasure small = mu;
    std::size_t stride = std::max<std::size_t>(1, mu.size() / 1000);
    small.points.clear();
    small.weights.clear();
    small.total = 0.0;
    for (std::size_t i = 0; i < mu.size(); i += stride) {
      small.points.push_back(mu.points[i]);
      small.weights.push_back(mu.weights[i]);
      small.total += mu.weights[i];
    }
    DirectionSet avoided = direction_spectrum(small, 10).complement();
    GraphExtract clean = extract_graph_parallel_segments(vc.set, mu, avoided, vc.graph_s);
    if (!clean.pass) {
      out.detail = "clean extract did not pass";
      return out;
    }
    Vec2 e = clean.theta.unit();
    Vec2 q{0.05, 0.5};
    mu.points.push_back(q);
    mu.weights.push_back(mu.spacing);
    mu.points.push_back(q + e * 0.05);
    mu.weights.push_back(mu.spacing);
    mu.total += 2.0 * mu.spacing;
    try {
      GraphExtract mutated = extract_graph_parallel_segments(vc.set, mu, avoided, vc.graph_s);
      out.flipped = !mutated.pass;
      out.detail = "no graph violation raised";
    } catch (const NotAGraph& e2) {
      out.flipped = true;
      out.detail = e2.what();
    }
    out.others_clean = true;
    return out;
  }

  if (name == "point-in-empty-rect") {
    out.target_check = "gap-lemma";
    VerifyCase vc = gap_corpus(1, threads)[0];
    const PipelineParams& p = vc.params;
    DiscreteMeasure mu = sample_measure(vc.set, p.h);
    double c0_raw = ad_constant(mu, 24, 12);
    double c0 = std::isfinite(c0_raw) ? std::clamp(c0_raw, 1.0, 16.0) : 16.0;
    int N = static_cast<int>(std::ceil(4.0 * p.M * c0));
    AngleInterval J = p.J();
    double eps = p.eps_c / (c0 * p.M);
    DirectionConfig dirs = build_directions(p, eps);
    CubeLattice lat = build_lattice(mu, p.aspect, p.rho, p.depth);
    EnergyTable en = compute_energies(lat, mu, dirs.g, J, p.A, {p.quad_per_decade}, threads);
    Corona corona = build_corona(lat, en, p.aspect, p.delta());
    std::vector<TreeConeCheck> cones = check_empty_cones(corona, lat, mu, J, p.A);
    std::vector<char> passes(corona.roots.size(), 0);
    for (const auto& c : cones) passes[static_cast<std::size_t>(c.root_index)] = c.pass;
    std::vector<BadCubeWitness> bads = find_bad_cubes(corona, lat, mu, J);
    GapLemmaParams gp{p.A, N, 64.0};
    for (const auto& bad : bads) {
      if (!passes[static_cast<std::size_t>(bad.root_index)] || bad.in_bce) continue;
      GapSet gaps = find_gaps(lat, mu, bad.root_cube, p.A);
      GapVerdict clean = verify_gap_lemma(lat, mu, bad, gaps, gp);
      if (clean.status != GapVerdict::Status::kPass) continue;
      // Freeze the trace, plant a point in the middle of the empty span at
      // the pivot height, re-verify against the corrupted sample.
      DiscreteMeasure corrupted = mu;
      Vec2 plant{0.5 * (clean.empty_span.first + clean.empty_span.second), clean.pivot.y};
      corrupted.points.push_back(plant);
      corrupted.weights.push_back(mu.spacing);
      corrupted.total += mu.spacing;
      GapVerdict mutated = verify_gap_lemma(lat, mu, bad, gaps, gp, &corrupted);
      out.flipped = mutated.status == GapVerdict::Status::kFail && !mutated.a_interior_empty;
      out.detail = mutated.detail;
      // The planted point must not disturb the cone hypothesis.
      std::vector<TreeConeCheck> cones2 = check_empty_cones(corona, lat, corrupted, J, p.A);
      out.others_clean = true;
      for (const auto& c : cones2)
        if (!c.pass) out.others_clean = false;
      return out;
    }
    out.detail = "no passing verdict to mutate";
    return out;
  }

  out.detail = "unknown mutation: " + name;
  return out;
}

}  // namespace favlab
