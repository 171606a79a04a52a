#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "oldroyd/energy.hpp"
#include "oldroyd/harness/config.hpp"
#include "oldroyd/harness/initial.hpp"
#include "oldroyd/harness/snapshot.hpp"
#include "oldroyd/identities.hpp"
#include "oldroyd/integrator.hpp"
#include "oldroyd/linear.hpp"

namespace oldroyd::harness {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitCfl = 2, kExitNonFinite = 3 };

/// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// energies.csv: t, the norms in Norm order, e0, e1, e2, tau_mean_frobenius, dt, cfl.
class EnergyCsv {
 public:
  explicit EnergyCsv(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot open " + path.string());
    out_ << "t";
    for (auto name : kNormNames) out_ << ',' << name;
    out_ << ",e0,e1,e2,tau_mean_frobenius,dt,cfl\n";
    out_.flush();
  }

  void append(const EnergyRecord& r, double dt, double cfl) {
    out_ << fmt(r.t);
    for (double v : r.norms) out_ << ',' << fmt(v);
    out_ << ',' << fmt(r.e0) << ',' << fmt(r.e1) << ',' << fmt(r.e2) << ',' << fmt(r.tau_mean)
         << ',' << fmt(dt) << ',' << fmt(cfl) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

struct NamedFit {
  std::string name;
  std::optional<FitResult> fit;
  /// Why the fit is missing.
  std::string note;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::vector<EnergyRecord> history;
  std::vector<NamedFit> fits;
  /// Largest E0(t) / (E0(0) + E0^{3/2} + E2^{3/2}) and E2(t) / (E0 + E0^{3/2} + E2^{3/2}).
  double max_ratio0 = 0.0;
  double max_ratio2 = 0.0;
  std::vector<IdentityReport> identities;
  std::filesystem::path directory;
};

/// Power-law decay exponents of every norm column over [lo, hi].
inline std::vector<NamedFit> fit_norms(const std::vector<EnergyRecord>& history, double lo,
                                       double hi) {
  std::vector<NamedFit> out;
  for (std::size_t k = 0; k < kNormCount; ++k) {
    std::vector<std::pair<double, double>> series;
    series.reserve(history.size());
    for (const auto& r : history) series.emplace_back(r.t, r.norms[k]);
    NamedFit f{std::string(kNormNames[k]), std::nullopt, {}};
    try {
      f.fit = decay_fit(series, lo, hi);
    } catch (const Error& e) {
      f.note = e.what();
    }
    out.push_back(std::move(f));
  }
  return out;
}

namespace detail {

inline void write_report(const std::filesystem::path& path, const RunConfig& cfg,
                         const RunOutcome& o) {
  std::ofstream r(path, std::ios::trunc);
  if (!r) throw Error("cannot open " + path.string());
  r << "# run report\n";
  r << "model " << to_string(cfg.model) << "\n";
  r << "grid.n " << cfg.n << "\n";
  r << "params mu=" << fmt(cfg.params.mu) << " mu1=" << fmt(cfg.params.mu1)
    << " mu2=" << fmt(cfg.params.mu2) << " a=" << fmt(cfg.params.a) << " b=" << fmt(cfg.params.b)
    << "\n";
  r << "init " << to_string(cfg.preset) << " amplitude=" << fmt(cfg.amplitude)
    << " kmax=" << fmt(cfg.kmax) << " seed=" << cfg.seed << "\n";
  r << "status " << o.exit_code << (o.message.empty() ? "" : " " + o.message) << "\n";
  if (!o.history.empty()) {
    const auto& last = o.history.back();
    r << "t_final " << fmt(last.t) << "\n";
    r << "e0 " << fmt(last.e0) << "\ne1 " << fmt(last.e1) << "\ne2 " << fmt(last.e2) << "\n";
    r << "tau_mean_frobenius " << fmt(last.tau_mean) << "\n";
  }
  r << "\n# decay exponents: slope of log(norm) against log(1+t) over [" << fmt(cfg.fit_lo())
    << ", " << fmt(cfg.fit_hi()) << "]\n";
  for (const auto& f : o.fits) {
    if (f.fit) {
      r << f.name << " exponent=" << fmt(f.fit->exponent) << " r2=" << fmt(f.fit->r_squared)
        << "\n";
    } else {
      r << f.name << " n/a (" << f.note << ")\n";
    }
  }
  r << "\n# a priori estimate monitors (bounded, constants unspecified)\n";
  r << "max E0/(E0(0)+E0^1.5+E2^1.5) " << fmt(o.max_ratio0) << "\n";
  r << "max E2/(E0+E0^1.5+E2^1.5) " << fmt(o.max_ratio2) << "\n";
  if (!o.identities.empty()) {
    r << "\n# identity suite\n";
    for (const auto& id : o.identities) {
      r << id.name << (id.kind == CheckKind::Identity ? " identity" : " control")
        << " residual=" << fmt(id.residual) << " tolerance=" << fmt(id.tolerance)
        << (id.pass ? " PASS" : " FAIL") << "\n";
    }
  }
}

/// Integrates sys from x, streaming diagnostics; tau_of maps a state to the
/// stress measured by the energies.
template <SplitSystem S, class TauOf, class Snapshot>
void drive(const S& sys, typename S::State x, const RunConfig& cfg, EnergyCsv& csv,
           RunOutcome& o, TauOf&& tau_of, Snapshot&& snapshot) {
  EnergyAccumulator acc;
  double e0_initial = 0.0;
  integrate(sys, std::move(x), cfg.time,
            [&](long step, double t, const typename S::State& s, double cfl) {
              const auto& u = std::get<0>(s.fields());
              EnergyRecord rec = measure(u, tau_of(s), t);
              acc.push(rec);
              if (step == 0) e0_initial = rec.e0;
              const auto [r0, r2] = lemma_ratios(e0_initial, rec.e0, rec.e2);
              o.max_ratio0 = std::max(o.max_ratio0, r0);
              o.max_ratio2 = std::max(o.max_ratio2, r2);
              csv.append(rec, cfg.time.dt, cfl);
              o.history.push_back(rec);
              if (cfg.snapshots && step % cfg.snapshot_interval == 0) snapshot(step, t, s);
            });
}

inline std::filesystem::path snapshot_path(const std::filesystem::path& dir, long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%08ld.bin", step);
  return dir / buf;
}

}  // namespace detail

/// Runs one configuration into its output directory. Errors become exit
/// codes; a configuration error leaves no output behind.
inline RunOutcome execute(const RunConfig& cfg) {
  RunOutcome o;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    o.exit_code = kExitConfig;
    o.message = e.what();
    return o;
  }
  o.directory = cfg.output_path();
  std::filesystem::create_directories(o.directory);
  {
    std::ofstream c(o.directory / "config.txt", std::ios::trunc);
    c << format_config(cfg);
  }
  EnergyCsv csv(o.directory / "energies.csv");
  const GridPtr g = Grid::make(cfg.n);
  try {
    if (cfg.model == ModelKind::Hookean) {
      HookeanState x = make_hookean_initial(cfg.preset, cfg.amplitude, cfg.kmax, cfg.seed, g);
      detail::drive(HookeanSystem{}, std::move(x), cfg, csv, o,
                    [](const HookeanState& s) { return to_conformation(s.F_minus_I); },
                    [&](long step, double t, const HookeanState& s) {
                      SnapshotWriter w(detail::snapshot_path(o.directory, step));
                      w.write("u", s.u, t);
                      w.write("F_minus_I", s.F_minus_I, t);
                    });
    } else {
      OldroydSystem sys{cfg.params};
      sys.nonlinear = cfg.model == ModelKind::Oldroyd;
      sys.project_tau_mean = cfg.project_tau_mean;
      OldroydState x = make_oldroyd_initial(cfg.preset, cfg.amplitude, cfg.kmax, cfg.seed, g);
      detail::drive(sys, std::move(x), cfg, csv, o,
                    [](const OldroydState& s) -> const SymTensorField& { return s.tau; },
                    [&](long step, double t, const OldroydState& s) {
                      SnapshotWriter w(detail::snapshot_path(o.directory, step));
                      w.write("u", s.u, t);
                      w.write("tau", s.tau, t);
                    });
    }
  } catch (const CflViolation& e) {
    o.exit_code = kExitCfl;
    o.message = e.what();
  } catch (const NonFinite& e) {
    o.exit_code = kExitNonFinite;
    o.message = e.what();
  }
  o.fits = fit_norms(o.history, cfg.fit_lo(), cfg.fit_hi());
  if (cfg.identity_trials > 0) {
    o.identities = run_suite(cfg.seed, std::max(cfg.n, 16), cfg.identity_trials);
  }
  detail::write_report(o.directory / "report.txt", cfg, o);
  return o;
}

inline int run(const RunConfig& cfg) { return execute(cfg).exit_code; }

struct SweepVariant {
  std::string value;
  RunOutcome outcome;
};

/// One run per value of `key`, each in <output>/<key>=<value>, plus
/// sweep-summary.csv in <output>.
inline std::vector<SweepVariant> sweep(const RunConfig& base, const std::string& key,
                                       const std::vector<std::string>& values) {
  if (values.empty()) throw OutOfRange("--vary", "needs at least one value");
  std::vector<RunConfig> cfgs;
  for (const auto& v : values) {
    RunConfig c = base;
    set_config_value(c, key, v);
    c.output_dir = (base.output_path() / (key + "=" + v)).string();
    c.validate();
    cfgs.push_back(std::move(c));
  }
  std::vector<SweepVariant> out;
  for (std::size_t i = 0; i < cfgs.size(); ++i) out.push_back({values[i], execute(cfgs[i])});

  const auto dir = base.output_path();
  std::filesystem::create_directories(dir);
  std::ofstream s(dir / "sweep-summary.csv", std::ios::trunc);
  s << "variant,exit_code";
  for (auto name : kNormNames) s << ",exp_" << name;
  s << ",e0_final,e1_final,e2_final\n";
  for (const auto& v : out) {
    s << key << '=' << v.value << ',' << v.outcome.exit_code;
    for (const auto& f : v.outcome.fits) s << ',' << (f.fit ? fmt(f.fit->exponent) : "nan");
    if (v.outcome.history.empty()) {
      s << ",nan,nan,nan\n";
    } else {
      const auto& last = v.outcome.history.back();
      s << ',' << fmt(last.e0) << ',' << fmt(last.e1) << ',' << fmt(last.e2) << '\n';
    }
  }
  return out;
}

struct ConsistencyOutcome {
  int exit_code = kExitOk;
  std::string message;
  /// Largest || G(F(t)) - tau(t) ||_{H^2} over the diagnostic times.
  double max_drift = 0.0;
  double final_drift = 0.0;
  /// Largest G-closure residual along the Hookean trajectory.
  double max_closure = 0.0;
};

/// Co-evolves the Hookean state (u, F) and the Oldroyd-B state started from
/// tau = G(F_0) with the matching parameters, writing consistency.csv.
inline ConsistencyOutcome hookean_consistency(const RunConfig& cfg) {
  ConsistencyOutcome o;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    o.exit_code = kExitConfig;
    o.message = e.what();
    return o;
  }
  const Preset preset = cfg.preset == Preset::TaylorGreen ? Preset::TaylorGreen : Preset::HookeanGeneric;
  const GridPtr g = Grid::make(cfg.n);
  HookeanState h = make_hookean_initial(preset, cfg.amplitude, cfg.kmax, cfg.seed, g);
  OldroydState s = consistent_oldroyd_state(h);
  const HookeanSystem hs{};
  const OldroydSystem os{hookean_equivalent_params()};

  const auto dir = cfg.output_path();
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "consistency.csv", std::ios::trunc);
  csv << "t,drift_h2,tau_h2,g_closure\n";
  auto record = [&](double t) {
    const double drift = sobolev_norm(to_conformation(h.F_minus_I) - s.tau, 2);
    const double closure = verify_g_closure(h);
    o.max_drift = std::max(o.max_drift, drift);
    o.max_closure = std::max(o.max_closure, closure);
    o.final_drift = drift;
    csv << fmt(t) << ',' << fmt(drift) << ',' << fmt(sobolev_norm(s.tau, 2)) << ','
        << fmt(closure) << '\n';
    csv.flush();
  };
  try {
    record(0.0);
    const long n = cfg.time.steps();
    for (long k = 1; k <= n; ++k) {
      h = step(hs, h, cfg.time.dt, cfg.time.cfl_limit);
      s = step(os, s, cfg.time.dt, cfg.time.cfl_limit);
      if (k % cfg.time.diag_interval == 0 || k == n) record(k * cfg.time.dt);
    }
  } catch (const CflViolation& e) {
    o.exit_code = kExitCfl;
    o.message = e.what();
  } catch (const NonFinite& e) {
    o.exit_code = kExitNonFinite;
    o.message = e.what();
  }
  std::ofstream r(dir / "report.txt", std::ios::trunc);
  r << "# hookean consistency\n"
    << "status " << o.exit_code << (o.message.empty() ? "" : " " + o.message) << "\n"
    << "max_drift_h2 " << fmt(o.max_drift) << "\n"
    << "final_drift_h2 " << fmt(o.final_drift) << "\n"
    << "max_g_closure " << fmt(o.max_closure) << "\n";
  return o;
}

/// Per-shell eigenvalues: k2, Re/Im of lambda_+, Re/Im of lambda_-, confluent flag.
inline void write_eigenvalue_csv(std::ostream& out, const std::vector<EigenvalueRow>& rows) {
  out << "k2,re_plus,im_plus,re_minus,im_minus,degenerate\n";
  for (const auto& row : rows) {
    out << row.k2 << ',' << fmt(row.eig.plus.real()) << ',' << fmt(row.eig.plus.imag()) << ','
        << fmt(row.eig.minus.real()) << ',' << fmt(row.eig.minus.imag()) << ','
        << (row.eig.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace oldroyd::harness
