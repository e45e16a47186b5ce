#include "spinsq/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <span>

#include "spinsq/error.hpp"
#include "spinsq/output.hpp"
#include "spinsq/parallel.hpp"
#include "spinsq/surface_io.hpp"

namespace spinsq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path out_path(const ScenarioConfig &c, const std::string &file) {
  return fs::path(c.output.dir) / file;
}

Metadata meta(const ScenarioConfig &c, const std::string &kind, const CriticalDepth &vc) {
  auto m = make_metadata(c, kind);
  // lambda and V_init are free choices; keep them visible in every file
  m.note("lambda_m", c.setup.wavelength)
      .note("V_init_ER", c.run.v_init)
      .note("V_c_ER", vc.v_c)
      .note("V_c_source", vc.computed ? "find_vc at fillings (1/2, 1/2)" : "config");
  return m;
}

double unit_or_nan(const PhysicalSetup &setup) {
  try {
    return setup.time_unit();
  } catch (const Error &) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::vector<double> to_std(const Eigen::VectorXd &v) { return {v.data(), v.data() + v.size()}; }

template <typename F>
std::vector<double> map(const std::vector<double> &x, F &&f) {
  std::vector<double> y;
  y.reserve(x.size());
  for (double v : x) y.push_back(f(v));
  return y;
}

json or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Eigen::VectorXd superfluid_depths(const ScenarioConfig &c, double v_c) {
  return ramp_depths(c.run.v_init, v_c, c.depth_points(), v_c);
}

SqueezeResult squeeze_core(const ScenarioConfig &c, const CriticalDepth &vc) {
  const auto &setup = c.setup;
  const int N = c.run.N;
  const double v_init = c.run.v_init;
  SqueezeResult r;
  r.vc = vc;
  const double last_depth = v_init + c.run.overshoot * (vc.v_c - v_init);
  const Eigen::VectorXd depths = ramp_depths(v_init, vc.v_c, c.depth_points(), last_depth);
  const auto window = fock_window(N);
  auto atoms = surface_atom_numbers(N, window.lo, window.hi);
  const auto key = surface_key(setup, N, atoms, depths, c.lattice, c.gutzwiller);
  r.surface = cached_surface(
      c.output.cache, key,
      [&] {
        const auto params = hubbard_grid(setup, depths, c.lattice, c.output.jobs);
        return energy_surface(setup, N, atoms, std::span<const HubbardParams>(params),
                              c.gutzwiller, c.output.jobs);
      },
      &r.cache_hit);
  r.chi = chi_of_depth(setup, r.surface, v_init, vc.v_c);
  const double tb = t_best(r.chi);
  r.schedule = {v_init, vc.v_c, tb, c.run.overshoot * tb};
  r.full = squeeze_trajectory(setup, r.surface, r.schedule, c.time_intervals(), c.output.jobs);
  return r;
}

SweepResult sweep_core(const ScenarioConfig &c, const CriticalDepth &vc,
                       const std::vector<int> &Ns, bool exact) {
  const auto params = hubbard_grid(c.setup, superfluid_depths(c, vc.v_c), c.lattice, c.output.jobs);
  SweepResult s;
  std::vector<GutzwillerState> centers;
  for (int N : Ns) {
    const auto chi = chi_curve(c.setup, N, params, c.run.v_init, vc.v_c, c.gutzwiller,
                               c.output.jobs, &centers);
    s.N.push_back(N);
    s.chi_average.push_back(chi.ramp_average());
    s.t_best.push_back(t_best(chi));
  }
  if (exact) {
    s.exact.resize(Ns.size());
    parallel_for(Ns.size(), c.output.jobs, [&](std::size_t i) { s.exact[i] = oat_optimum(Ns[i]); });
  }
  if (s.N.size() >= 2) {
    const std::vector<double> n(s.N.begin(), s.N.end());
    s.fit = fit_power_law(n, s.t_best);
  }
  return s;
}

void write_chi(const ScenarioConfig &c, const CriticalDepth &vc, const ChiCurve &chi) {
  const double unit = unit_or_nan(c.setup);
  const auto v = to_std(chi.depths), x = to_std(chi.chi);
  write_csv(out_path(c, "chi.csv"), meta(c, "chi(V0) from the energy surface", vc),
            {"V0_over_ER", "chi_per_s", "chi_N_tunit"},
            {v, x, map(x, [&](double y) { return y * chi.N * unit; })});
}

json squeeze_summary(const ScenarioConfig &c, const SqueezeResult &r) {
  const double unit = unit_or_nan(c.setup);
  const auto at_vc = hubbard_params(c.setup, r.vc.v_c, c.lattice);
  const auto mott = mott_residual_estimate(at_vc.J, at_vc.U_aa, c.run.N);
  return {
      {"N", c.run.N},
      {"V_c_ER", r.vc.v_c},
      {"t_unit_s", or_null(unit)},
      {"chi_average_per_s", r.chi.ramp_average()},
      {"chi_init_per_s", r.chi.chi(0)},
      {"chi_init_N_tunit", or_null(r.chi.chi(0) * c.run.N * unit)},
      {"t_best_ramp_s", r.schedule.duration},
      {"t_end_s", r.schedule.last_time()},
      {"t_min_s", r.full.t_min},
      {"t_min_over_tunit", or_null(r.full.t_min / unit)},
      {"xi2_min", r.full.xi2_min},
      {"xi2_min_dB", 10.0 * std::log10(r.full.xi2_min)},
      {"mott_residual",
       {{"J_over_U_at_Vc", at_vc.J / at_vc.U_aa},
        {"gap_product", mott.gap_product},
        {"critical_product", mott.critical_product},
        {"threshold", mott.threshold},
        {"gap_negligible", mott.gap_negligible},
        {"critical_negligible", mott.critical_negligible}}},
  };
}

std::vector<double> sweep_column(const SweepResult &s, double (*f)(const OatOptimum &)) {
  std::vector<double> out;
  for (const auto &o : s.exact) out.push_back(f(o));
  return out;
}

void write_sweep(const ScenarioConfig &c, const CriticalDepth &vc, const SweepResult &s,
                 const std::string &file, const std::string &kind) {
  const double unit = unit_or_nan(c.setup);
  const std::vector<double> n(s.N.begin(), s.N.end());
  std::vector<std::string> header{"N", "chi_average_per_s", "t_best_s", "t_best_over_tunit",
                                  "T_best_asymptotic", "xi2_best_asymptotic"};
  std::vector<std::vector<double>> cols{
      n, s.chi_average, s.t_best, map(s.t_best, [&](double t) { return t / unit; }),
      map(n, oat_T_asymptotic), map(n, oat_xi2_asymptotic)};
  if (!s.exact.empty()) {
    header.insert(header.end(), {"T_best_exact", "xi2_best_exact"});
    cols.push_back(sweep_column(s, [](const OatOptimum &o) { return o.T; }));
    cols.push_back(sweep_column(s, [](const OatOptimum &o) { return o.xi2; }));
  }
  write_csv(out_path(c, file), meta(c, kind, vc), header, cols);
}

json fit_summary(const SweepResult &s) {
  return {{"N", s.N},
          {"t_best_s", s.t_best},
          {"alpha_fit", s.fit.exponent},
          {"alpha_stderr", s.fit.exponent_stderr},
          {"prefactor_s", s.fit.prefactor}};
}

std::vector<int> loss_grid(const ScenarioConfig &c) {
  const int n = c.loss_points();
  const double a = std::log(c.losses.N_min), b = std::log(c.losses.N_max);
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    const int N = static_cast<int>(std::lround(std::exp(a + (b - a) * i / (n - 1))));
    if (out.empty() || N > out.back()) out.push_back(N);
  }
  return out;
}

LossResult losses_core(const ScenarioConfig &c, const std::string &prefix,
                       const std::string &kind) {
  LossResult res;
  res.vc = resolve_vc(c);
  const double v_init = c.run.v_init, v_c = res.vc.v_c;
  const Eigen::VectorXd depths = superfluid_depths(c, v_c);
  const auto params = hubbard_grid(c.setup, depths, c.lattice, c.output.jobs);
  const DepthTable table(c.setup, v_init, v_c, c.run.table_points, c.lattice, c.output.jobs);
  const auto Ns = loss_grid(c);

  std::vector<double> tb;
  std::vector<GutzwillerState> centers;
  for (int N : Ns) {
    const auto chi = chi_curve(c.setup, N, params, v_init, v_c, c.gutzwiller, c.output.jobs,
                               &centers);
    tb.push_back(t_best(chi));
  }
  CorrelationCurve corr;
  corr.depths = depths;
  const auto nd = depths.size();
  for (auto *v : {&corr.g2_aa, &corr.g2_bb, &corr.g2_ab, &corr.g3_a, &corr.g3_b}) v->resize(nd);
  for (Eigen::Index k = 0; k < nd; ++k) {
    const auto o = observables(centers[static_cast<std::size_t>(k)]);
    corr.g2_aa(k) = o.g2_aa.value_or(0.0);
    corr.g2_bb(k) = o.g2_bb.value_or(0.0);
    corr.g2_ab(k) = o.g2_ab.value_or(0.0);
    corr.g3_a(k) = o.g3_a.value_or(0.0);
    corr.g3_b(k) = o.g3_b.value_or(0.0);
  }

  std::vector<double> xi2(Ns.size());
  parallel_for(Ns.size(), c.output.jobs, [&](std::size_t i) {
    xi2[i] = c.losses.exact_reference ? oat_optimum(Ns[i]).xi2 : oat_xi2_asymptotic(Ns[i]);
  });
  const auto params_at = [&](double v) { return table.at(v); };
  const std::vector<double> n(Ns.begin(), Ns.end());

  json scenarios = json::array();
  std::string failures;
  for (const auto &sc : c.losses.scenarios) {
    ScenarioOutcome out;
    out.scenario = sc;
    out.t_best = tb;
    std::vector<double> lost(Ns.size());
    parallel_for(Ns.size(), c.output.jobs, [&](std::size_t i) {
      const RampSchedule schedule{v_init, v_c, tb[i], 0.0};
      const auto tr = evolve_losses(Ns[i], schedule, params_at, corr, sc, {0.0, tb[i]});
      lost[i] = tr.lost_fraction.back();
    });
    try {
      out.curves = loss_crossing(n, lost, xi2);
      out.crossed = true;
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::Regime) throw;
      out.curves = {0.0, n, lost, xi2};
      out.failure = "scenario " + sc.name + ": " + e.what();
      failures += (failures.empty() ? "" : "; ") + out.failure;
    }
    auto m = meta(c, kind + " scenario " + sc.name, res.vc);
    m.note("scenario_label", sc.label)
        .note("xi2_reference", c.losses.exact_reference ? "exact OAT optimum"
                                                         : "asymptotic 3^(2/3)/2 N^(-2/3)");
    write_csv(out_path(c, prefix + "_" + sc.name + ".csv"), m,
              {"N", "t_best_s", "lost_fraction", "xi2_best"}, {n, tb, lost, xi2});
    scenarios.push_back({{"name", sc.name},
                         {"label", sc.label},
                         {"N_max", out.crossed ? json(out.curves.n_max) : json(nullptr)},
                         {"failure", out.failure},
                         {"lambda_m", c.setup.wavelength},
                         {"V_init_ER", v_init}});
    res.scenarios.push_back(std::move(out));
  }
  write_json(out_path(c, prefix + ".json"), meta(c, kind, res.vc),
             {{"scenarios", scenarios}, {"V_c_ER", v_c}});
  if (!failures.empty()) fail(ErrorKind::Regime, failures);
  return res;
}

}  // namespace

CriticalDepth resolve_vc(const ScenarioConfig &config) {
  if (config.run.v_c) return {*config.run.v_c, false};
  const double v = find_vc(config.setup, 0.5, 0.5, config.run.vc_tol, config.lattice,
                           config.gutzwiller, config.lattice.min_depth, 40.0);
  require(v > config.run.v_init, ErrorKind::Regime,
          "computed V_c lies below V_init; lower run.v_init");
  return {v, true};
}

Eigen::VectorXd ramp_depths(double v_init, double v_c, int points, double last_depth) {
  require(points >= 2 && v_c > v_init && last_depth >= v_c, ErrorKind::Domain,
          "depth grid needs v_init < v_c <= last_depth and >= 2 points");
  const double h = (v_c - v_init) / (points - 1);
  std::vector<double> v;
  for (int k = 0; k < points; ++k) v.push_back(k + 1 == points ? v_c : v_init + k * h);
  for (int j = 1; v.back() < last_depth; ++j) v.push_back(v_c + j * h);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<HubbardParams> hubbard_grid(const PhysicalSetup &setup,
                                        const Eigen::VectorXd &depths,
                                        const LatticeOptions &lattice, int jobs) {
  std::vector<HubbardParams> out(static_cast<std::size_t>(depths.size()));
  parallel_for(out.size(), jobs, [&](std::size_t k) {
    out[k] = hubbard_params(setup, depths(static_cast<Eigen::Index>(k)), lattice);
  });
  return out;
}

ParamsResult run_params(const ScenarioConfig &c) {
  ParamsResult r;
  r.vc = resolve_vc(c);
  r.grid = hubbard_grid(c.setup, superfluid_depths(c, r.vc.v_c), c.lattice, c.output.jobs);
  std::vector<std::vector<double>> cols(8);
  for (const auto &p : r.grid) {
    const double row[] = {p.depth, p.J, p.U_aa, p.U_bb, p.U_ab, p.U_aa / p.J, p.I2, p.I3};
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_back(row[j]);
  }
  write_csv(out_path(c, "params.csv"), meta(c, "Bose-Hubbard parameters", r.vc),
            {"V0_over_ER", "J_over_ER", "U_aa_over_ER", "U_bb_over_ER", "U_ab_over_ER",
             "U_aa_over_J", "I2_per_m3", "I3_per_m6"},
            cols);
  return r;
}

CriticalDepth run_vc(const ScenarioConfig &c) {
  const auto vc = resolve_vc(c);
  const auto p = hubbard_params(c.setup, vc.v_c, c.lattice);
  write_json(out_path(c, "vc.json"), meta(c, "critical depth", vc),
             {{"V_c_ER", vc.v_c},
              {"computed", vc.computed},
              {"tolerance_ER", c.run.vc_tol},
              {"J_over_U_aa", p.J / p.U_aa},
              {"U_aa_over_zJ", p.U_aa / (c.setup.coordination * p.J)}});
  return vc;
}

SqueezeResult run_squeeze(const ScenarioConfig &c) {
  auto r = squeeze_core(c, resolve_vc(c));
  const auto &t = r.full;
  write_csv(out_path(c, "squeeze.csv"), meta(c, "squeezing trajectory", r.vc),
            {"t_s", "t_over_tunit", "V0_over_ER", "xi2", "mean_spin", "g2aa", "g2ab", "g2bb",
             "min_variance"},
            {t.t, t.t_over_unit, t.depth, t.xi2, t.mean_spin, t.g2_aa, t.g2_ab, t.g2_bb,
             t.min_variance});
  write_chi(c, r.vc, r.chi);
  write_json(out_path(c, "squeeze.json"), meta(c, "squeezing summary", r.vc),
             squeeze_summary(c, r));
  return r;
}

SweepResult run_oat_scaling(const ScenarioConfig &c) {
  const auto vc = resolve_vc(c);
  auto s = sweep_core(c, vc, c.run.sweep_N, true);
  write_sweep(c, vc, s, "oat_scaling.csv", "t_best(N) sweep");
  write_json(out_path(c, "oat_scaling.json"), meta(c, "t_best(N) fit", vc), fit_summary(s));
  return s;
}

AdiabaticResult run_adiabatic(const ScenarioConfig &c) {
  AdiabaticResult r;
  r.vc = resolve_vc(c);
  const double v_init = c.run.v_init, v_c = r.vc.v_c;
  const auto params = hubbard_grid(c.setup, superfluid_depths(c, v_c), c.lattice, c.output.jobs);
  const int N = c.adiabatic.N;
  const auto chi = chi_curve(c.setup, N, params, v_init, v_c, c.gutzwiller, c.output.jobs);
  r.t_best = t_best(chi);
  r.times = adiabatic_time(c.setup, N, params, v_init, v_c);
  r.ratio = r.times.minus / r.t_best;

  auto m = meta(c, "adiabatic times", r.vc);
  m.note("bogoliubov_discriminant", "4 u_ab^2 (squared interspecies term)");
  json summary{{"N", N},
               {"L", r.times.L},
               {"effective_N", r.times.L * r.times.L * r.times.L},
               {"t_adiab_plus_s", r.times.plus},
               {"t_adiab_minus_s", r.times.minus},
               {"depth_plus_ER", r.times.depth_plus},
               {"depth_minus_ER", r.times.depth_minus},
               {"t_adiab_plus_asymptotic_s", r.times.asymptotic_plus},
               {"t_adiab_minus_asymptotic_s", r.times.asymptotic_minus},
               {"t_best_s", r.t_best},
               {"ratio", r.ratio},
               {"ratio_asymptotic", r.times.asymptotic_minus / r.t_best}};

  const int M = c.adiabatic.excitation_N;
  if (M > 0 && !c.adiabatic.tau_factors.empty()) {
    const DepthTable table(c.setup, v_init, v_c, c.run.table_points, c.lattice, c.output.jobs);
    r.excitation_times = adiabatic_time(c.setup, M, params, v_init, v_c);
    for (double f : c.adiabatic.tau_factors) {
      const RampSchedule schedule{v_init, v_c, f * r.excitation_times.minus, 0.0};
      auto ex = excitation_fraction(c.setup, M, schedule, table, 0.5, 0.5, table.spacing(),
                                    {}, c.output.jobs);
      r.tau.push_back(schedule.duration);
      r.fraction.push_back(ex.total_fraction);
      r.drift.push_back(ex.max_drift);
      r.excitation.push_back(std::move(ex));
    }
    write_csv(out_path(c, "adiabatic_sweep.csv"), m,
              {"tau_s", "tau_over_tadiab_minus", "excitation_fraction", "max_drift"},
              {r.tau, c.adiabatic.tau_factors, r.fraction, r.drift});
    const auto &last = r.excitation.back();
    std::vector<std::vector<double>> cols(8);
    for (std::size_t k = 0; k < last.classes.size(); ++k) {
      const auto &q = last.classes[k].ql;
      const double row[] = {q(0), q(1), q(2), double(last.classes[k].multiplicity),
                            last.omega_plus_end[k], last.omega_minus_end[k],
                            last.excited_plus[k], last.excited_minus[k]};
      for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_back(row[j]);
    }
    auto mm = m;
    mm.note("tau_s", r.tau.back());
    write_csv(out_path(c, "adiabatic_modes.csv"), mm,
              {"qx_l", "qy_l", "qz_l", "multiplicity", "omega_plus_per_s",
               "omega_minus_per_s", "n_ex_plus", "n_ex_minus"},
              cols);
    summary["excitation_N"] = M;
    summary["excitation_t_adiab_minus_s"] = r.excitation_times.minus;
  }
  write_json(out_path(c, "adiabatic.json"), m, summary);
  return r;
}

LossResult run_losses(const ScenarioConfig &c) {
  return losses_core(c, "losses", "loss crossing");
}

Figure2Result run_figure2(const ScenarioConfig &c) {
  Figure2Result r;
  r.squeeze = squeeze_core(c, resolve_vc(c));
  const auto &sq = r.squeeze;
  const auto &vc = sq.vc;
  const auto &t = sq.full.t;
  const int N = c.run.N;
  const double chi0 = sq.chi.chi(0);
  r.dynamic = dynamic_oat_trajectory(c.setup, sq.chi, sq.schedule, t);
  r.fixed = static_oat_trajectory(c.setup, N, chi0, t);
  r.T_dynamic = map(t, [&](double s) { return T_of_t(sq.chi, sq.schedule, s); });
  r.T_static = map(t, [&](double s) { return chi0 * s; });
  r.sweep = sweep_core(c, vc, c.run.sweep_N, false);

  const auto &f = sq.full;
  const auto chi_t = map(f.depth, [&](double v) { return sq.chi.at(v); });
  write_csv(out_path(c, "figure2a.csv"), meta(c, "central Fock state g2 along the ramp", vc),
            {"t_s", "t_over_tunit", "V0_over_ER", "g2aa", "g2bb", "g2ab"},
            {t, f.t_over_unit, f.depth, f.g2_aa, f.g2_bb, f.g2_ab});
  write_csv(out_path(c, "figure2b.csv"), meta(c, "xi2: full, dynamic-OAT, static-OAT", vc),
            {"t_s", "t_over_tunit", "V0_over_ER", "xi2_full", "xi2_dynamic_oat",
             "xi2_static_oat"},
            {t, f.t_over_unit, f.depth, f.xi2, r.dynamic.xi2, r.fixed.xi2});
  write_csv(out_path(c, "figure2c.csv"), meta(c, "chi(t) and T(t)", vc),
            {"t_s", "t_over_tunit", "V0_over_ER", "chi_per_s", "T_dynamic", "T_static"},
            {t, f.t_over_unit, f.depth, chi_t, r.T_dynamic, r.T_static});
  write_sweep(c, vc, r.sweep, "figure2d.csv", "t_best(N) sweep");
  write_chi(c, vc, sq.chi);

  auto summary = squeeze_summary(c, sq);
  summary["xi2_min_dynamic_oat"] = r.dynamic.xi2_min;
  summary["t_min_dynamic_oat_s"] = r.dynamic.t_min;
  summary["xi2_min_static_oat"] = r.fixed.xi2_min;
  summary["t_min_static_oat_s"] = r.fixed.t_min;
  summary["sweep"] = fit_summary(r.sweep);
  summary["alpha_fit"] = r.sweep.fit.exponent;
  write_json(out_path(c, "figure2.json"), meta(c, "figure2 summary", vc), summary);
  return r;
}

LossResult run_figure3(const ScenarioConfig &c) {
  return losses_core(c, "figure3", "lost fraction and best squeezing");
}

}  // namespace spinsq
