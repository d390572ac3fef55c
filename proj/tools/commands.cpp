#include "commands.hpp"

#include <Eigen/Core>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include "bouss/errors.hpp"
#include "csv.hpp"

#ifndef BOUSS_VERSION
#define BOUSS_VERSION "unknown"
#endif

namespace bouss::cli {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void RunContext::add_output(const std::string& file, json info) {
  info["file"] = file;
  manifest["outputs"].push_back(std::move(info));
}

void RunContext::add_timing(const std::string& name, Clock::time_point since) {
  manifest["timings_s"][name] = std::chrono::duration<double>(Clock::now() - since).count();
}

json manifest_header(const std::string& command, const RunContext& ctx) {
  json m;
  m["manifest_version"] = 1;
  m["command"] = command;
  m["status"] = "running";
  m["config"] = to_json(ctx.config);
  m["run"] = {{"threads", ctx.threads}, {"seed", ctx.seed}, {"output_dir", ctx.out_dir.string()}};
  m["versions"] = {{"program", BOUSS_VERSION},
                   {"fft", fft_backend_version()},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                 "." + std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__},
                   {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  m["outputs"] = json::array();
  m["timings_s"] = json::object();
  m["results"] = json::object();
  return m;
}

void write_manifest(const RunContext& ctx) {
  std::ofstream out(ctx.out_dir / "manifest.json", std::ios::binary);
  out << ctx.manifest.dump(2) << '\n';
}

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must go to
// per-index slots so that output does not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

std::string numbered(const char* stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem, i);
  return buf;
}

// Commas would break the CSV row.
std::string cell_text(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

// Uniform output grid, both ends included.
std::vector<double> output_points(const RunConfig& cfg) {
  const int n = cfg.output.grid_points;
  const double lo = cfg.x_lo(), hi = cfg.x_hi();
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) xs[static_cast<std::size_t>(m)] = lo + (hi - lo) * m / (n - 1);
  return xs;
}

void write_profile(RunContext& ctx, const std::string& file, const SpectralState& s, json info) {
  const auto& cfg = ctx.config;
  const auto g = cfg.scheme.grid();
  const int n = cfg.output.grid_points;
  const double lo = cfg.x_lo(), hi = cfg.x_hi(), h = (hi - lo) / (n - 1);
  const auto U = sample_uniform(g, s.u_hat, lo, hi + h, static_cast<std::size_t>(n));
  CsvWriter w(ctx.out_dir / file, {"x", "U"});
  for (int m = 0; m < n; ++m) {
    w << lo + h * m << U[static_cast<std::size_t>(m)];
    w.end_row();
  }
  info["t"] = s.t;
  ctx.add_output(file, std::move(info));
}

ScatteringOptions scattering_options(const RunConfig& cfg) {
  ScatteringOptions o;
  o.step = cfg.scattering.step;
  o.tolerance = cfg.scattering.tolerance;
  o.max_refinements = cfg.scattering.max_refinements;
  return o;
}

// The right-moving soliton carried by the data, if any.
struct SolitonData {
  std::optional<double> k0;
  std::optional<NormingConstant> c;
  json summary = json::object();
};

SolitonData locate_soliton(RunContext& ctx, const PotentialSampler& p) {
  const auto& cfg = ctx.config;
  SolitonData out;
  const auto t0 = Clock::now();
  if (cfg.asymptotics.k0) {
    out.k0 = cfg.asymptotics.k0;
    out.summary["source"] = "config";
  } else if (cfg.scattering.root_search) {
    auto z = find_k0(p, cfg.scattering.root_lo, cfg.scattering.root_hi, scattering_options(cfg));
    out.summary["source"] = "root search";
    out.summary["evaluations"] = z.evaluations;
    out.summary["notes"] = z.notes;
    if (z.found) {
      out.k0 = z.k0;
      out.summary["s11_abs_at_root"] = std::abs(z.s11_at_root);
      out.summary["s11_phase"] = z.s11_phase;
    }
  }
  ctx.add_timing("root_search", t0);
  out.summary["found"] = out.k0.has_value();
  if (!out.k0) {
    out.summary["marker"] = "solitonless";
    return out;
  }
  out.summary["k0"] = *out.k0;
  out.summary["A0"] = soliton_amplitude_from_zero(*out.k0);
  out.summary["c0"] = soliton_speed_from_zero(*out.k0);
  if (cfg.scattering.norming) {
    const auto t1 = Clock::now();
    out.c = norming_constant(*out.k0, p, scattering_options(cfg));
    ctx.add_timing("norming_constant", t1);
    out.summary["c_k0"] = {out.c->value.real(), out.c->value.imag()};
    out.summary["c_k0_spread"] = out.c->spread;
    out.summary["c_k0_corrected_spread"] = out.c->corrected_spread;
  }
  return out;
}

// u_sol(x, t) with ln f evaluated once: k1 is a single configured point, so
// ln f does not vary with zeta.
struct SolitonReference {
  std::optional<SolitonAsymptote> sol;
  double ln_f = 0.0;

  double operator()(double x, double t) const { return sol ? sol->value(x, t, ln_f) : 0.0; }
};

SolitonReference build_u_sol(RunContext& ctx, const PotentialSampler& p, const SolitonData& sd) {
  SolitonReference ref;
  if (!sd.k0) return ref;
  if (!sd.c) throw ConfigError("scattering.norming: u_sol needs the norming constant");
  const auto& a = ctx.config.asymptotics;
  auto k1 = a.k1;
  if (!k1)
    throw MissingInputError(
        "asymptotics.k1 is required: the arc endpoint k1 entering delta is not determined by the "
        "available data and must be supplied");
  const auto t0 = Clock::now();
  ref.sol = soliton_asymptote(*sd.k0, sd.c->value, reflection_on_circle(p, a.circle_step),
                              [k1](double) { return k1; });
  ref.ln_f = ref.sol->ln_f(ref.sol->c0);
  ctx.add_timing("u_sol", t0);
  ctx.manifest["results"]["u_sol"] = {{"A0", ref.sol->A0}, {"c0", ref.sol->c0}, {"ln_f", ref.ln_f}};
  return ref;
}

Trajectory run_scheme(RunContext& ctx, const InitialProfile& prof) {
  const auto& cfg = ctx.config;
  const auto t0 = Clock::now();
  const auto init = prof.initial_state(cfg.scheme.grid());
  try {
    auto traj = simulate(cfg.scheme, init, cfg.effective_snapshots());
    ctx.add_timing("simulate", t0);
    return traj;
  } catch (const BlowUpError& e) {
    ctx.add_timing("simulate", t0);
    ctx.manifest["results"]["blow_up_time"] = e.time();
    write_profile(ctx, "snapshot_last_finite.csv", e.last_finite(), {{"last_finite", true}});
    throw;
  }
}

}  // namespace

void cmd_simulate(RunContext& ctx) {
  const auto prof = make_profile(ctx.config);
  const auto traj = run_scheme(ctx, prof);
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < traj.states.size(); ++i) write_profile(ctx, numbered("snapshot", i), traj.states[i], {});
  ctx.add_timing("write", t0);
  ctx.manifest["results"]["snapshots"] = traj.snapshot_times.size();
  std::cout << "wrote " << traj.states.size() << " snapshots to " << ctx.out_dir.string() << '\n';
}

void cmd_error_table(RunContext& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.reference.kind == ReferenceKind::none)
    throw ConfigError("invalid configuration:\n  reference.kind: error-table needs a reference other than none");
  const auto prof = make_profile(cfg);

  std::function<double(double, double)> ref;
  bool on_soliton_window = false;
  switch (cfg.reference.kind) {
    case ReferenceKind::exact_soliton: {
      const auto sol = SolitonDescriptor::from_amplitude(cfg.initial_data.A, cfg.initial_data.x0);
      ref = [sol](double x, double t) { return soliton_value(sol, x, t); };
      break;
    }
    case ReferenceKind::u_sol: {
      // Resolve every prerequisite before spending time on the run.
      const auto p = PotentialSampler::from_profile(prof);
      const auto sd = locate_soliton(ctx, p);
      ctx.manifest["results"]["soliton"] = sd.summary;
      auto usol = std::make_shared<SolitonReference>(build_u_sol(ctx, p, sd));
      ref = [usol](double x, double t) { return (*usol)(x, t); };
      on_soliton_window = true;
      break;
    }
    default:
      break;
  }

  const auto traj = run_scheme(ctx, prof);
  const auto g = cfg.scheme.grid();
  const auto t0 = Clock::now();
  CsvWriter w(ctx.out_dir / "error_table.csv", {"t", "e", "t_over_ln_t_e", "sqrt_t_e"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : traj.states) {
    const double t = s.t;
    double e = 0.0;
    if (cfg.reference.kind == ReferenceKind::self) {
      const auto U = sample_uniform(g, s.u_hat, cfg.x_lo(), cfg.x_hi(), static_cast<std::size_t>(cfg.output.error_points));
      e = linf_distance(U, U);
    } else {
      double lo = cfg.x_lo(), hi = cfg.x_hi();
      if (on_soliton_window) {
        lo = std::max(lo, cfg.reference.zeta_min * t);
        hi = std::min(hi, cfg.reference.zeta_max * t);
      }
      e = hi > lo ? linf_error(g, s, [&](double x) { return ref(x, t); }, lo, hi,
                               static_cast<std::size_t>(cfg.output.error_points))
                  : nan;
    }
    w << t << e << (t > 1.0 ? t / std::log(t) * e : nan) << std::sqrt(t) * e;
    w.end_row();
  }
  ctx.add_timing("errors", t0);
  ctx.add_output("error_table.csv");
  std::cout << "wrote error table with " << traj.states.size() << " rows to " << ctx.out_dir.string() << '\n';
}

void cmd_scattering(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto p = PotentialSampler::from_profile(make_profile(cfg));
  const auto opts = scattering_options(cfg);
  const auto& ks = cfg.scattering.k;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<ScatteringResult> rows(ks.size());
  std::vector<std::string> status(ks.size(), "ok");
  const auto t0 = Clock::now();
  parallel_for(ks.size(), ctx.threads, [&](std::size_t i) {
    try {
      rows[i] = scattering_matrix(ks[i], p, opts);
      if (rows[i].lost_columns) status[i] = "lost columns " + std::to_string(rows[i].lost_columns);
    } catch (const std::exception& e) {
      rows[i].k = ks[i];
      rows[i].s.setConstant(cplx{nan, nan});
      rows[i].r1 = cplx{nan, nan};
      status[i] = cell_text(e.what());
    }
  });
  ctx.add_timing("scattering", t0);

  std::vector<std::string> header{"k_re", "k_im"};
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (const char* part : {"re", "im"}) header.push_back("s" + std::to_string(i) + std::to_string(j) + "_" + part);
  for (const char* h : {"r1_re", "r1_im", "step", "R", "refinement_change", "identity_residual", "status"})
    header.emplace_back(h);
  CsvWriter w(ctx.out_dir / "scattering.csv", header);
  int failures = 0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const auto& r = rows[n];
    w << r.k.real() << r.k.imag();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) w << r.s(i, j).real() << r.s(i, j).imag();
    w << r.r1.real() << r.r1.imag() << r.step << r.R << r.refinement_change << r.identity_residual << status[n];
    w.end_row();
    failures += status[n] != "ok";
  }
  ctx.add_output("scattering.csv", {{"rows", rows.size()}, {"not_ok", failures}});
  ctx.manifest["results"]["R"] = p.R;

  if (cfg.scattering.root_search || cfg.asymptotics.k0) {
    json summary;
    try {
      summary = locate_soliton(ctx, p).summary;
    } catch (const std::exception& e) {
      summary = {{"found", false}, {"error", e.what()}};
    }
    ctx.manifest["results"]["soliton"] = summary;
    CsvWriter z(ctx.out_dir / "zero.csv", {"status", "k0", "A0", "c0", "c_re", "c_im", "spread", "corrected_spread"});
    if (summary.value("found", false)) {
      const bool has_c = summary.contains("c_k0");
      z << std::string("soliton") << summary["k0"].get<double>() << summary["A0"].get<double>()
        << summary["c0"].get<double>() << (has_c ? summary["c_k0"][0].get<double>() : nan)
        << (has_c ? summary["c_k0"][1].get<double>() : nan)
        << (has_c ? summary["c_k0_spread"].get<double>() : nan)
        << (has_c ? summary["c_k0_corrected_spread"].get<double>() : nan);
      std::cout << "k0 = " << format_number(summary["k0"].get<double>()) << '\n';
    } else {
      z << std::string(summary.contains("error") ? "failed" : "solitonless");
      for (int i = 0; i < 7; ++i) z << nan;
      std::cout << (summary.contains("error") ? "root search failed" : "solitonless") << '\n';
    }
    z.end_row();
    ctx.add_output("zero.csv");
  }
  std::cout << "wrote " << rows.size() << " spectral rows (" << failures << " not ok) to " << ctx.out_dir.string()
            << '\n';
}

void cmd_asymptotics(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto p = PotentialSampler::from_profile(make_profile(cfg));
  const auto sd = locate_soliton(ctx, p);
  ctx.manifest["results"]["soliton"] = sd.summary;
  const auto opts = scattering_options(cfg);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // ln f needs k1; u_sol export insists on it, so fail before the sweep.
  std::optional<SolitonReference> usol;
  if (sd.k0 && (cfg.asymptotics.k1 || !cfg.asymptotics.usol_times.empty())) usol = build_u_sol(ctx, p, sd);

  const auto zetas = cfg.zeta_grid();
  struct Row {
    SectorPoint sp{};
    AmplitudeA2 a2{};
    double ph4 = 0.0, ph2 = 0.0;
    std::string status = "ok";
  };
  std::vector<Row> rows(zetas.size());
  const auto t0 = Clock::now();
  parallel_for(zetas.size(), ctx.threads, [&](std::size_t i) {
    auto& r = rows[i];
    const double zeta = zetas[i];
    try {
      r.sp = sector_point(zeta);
      r.ph4 = phase_shift_k4(zeta, sd.k0);
      r.ph2 = phase_shift_k2(zeta, sd.k0);
      r.a2 = amplitude_A2(zeta, p, opts);
    } catch (const std::exception& e) {
      r.a2 = {zeta, nan, nan, false};
      r.status = cell_text(e.what());
    }
  });
  ctx.add_timing("zeta_sweep", t0);

  CsvWriter w(ctx.out_dir / "asymptotics.csv",
              {"zeta", "k2_re", "k2_im", "k4_re", "k4_im", "nu2", "A2", "clipped", "phase_k4", "phase_k2", "k0",
               "A0", "c0", "ln_f", "status"});
  int clipped = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    w << zetas[i] << r.sp.k2.real() << r.sp.k2.imag() << r.sp.k4.real() << r.sp.k4.imag() << r.a2.nu << r.a2.A2
      << (r.a2.clipped ? 1.0 : 0.0) << r.ph4 << r.ph2 << (sd.k0 ? *sd.k0 : nan)
      << (sd.k0 ? soliton_amplitude_from_zero(*sd.k0) : nan) << (sd.k0 ? soliton_speed_from_zero(*sd.k0) : nan)
      << (usol ? usol->ln_f : nan) << r.status;
    w.end_row();
    clipped += r.a2.clipped;
  }
  ctx.add_output("asymptotics.csv", {{"rows", rows.size()}, {"clipped_nu2", clipped}});

  if (!cfg.asymptotics.usol_times.empty()) {
    const auto xs = output_points(cfg);
    for (std::size_t n = 0; n < cfg.asymptotics.usol_times.size(); ++n) {
      const double t = cfg.asymptotics.usol_times[n];
      const auto file = numbered("u_sol", n);
      CsvWriter u(ctx.out_dir / file, {"x", "u_sol"});
      for (double x : xs) {
        u << x << (usol ? (*usol)(x, t) : 0.0);
        u.end_row();
      }
      ctx.add_output(file, {{"t", t}});
    }
  }
  std::cout << "wrote " << rows.size() << " zeta rows to " << ctx.out_dir.string()
            << (sd.k0 ? "" : " (solitonless: phase shifts are zero)") << '\n';
}

bool cmd_self_test(RunContext& ctx) {
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::uniform_int_distribution<int> modes(1, 8);
  CsvWriter w(ctx.out_dir / "self_test.csv", {"check", "worst", "tolerance", "pass"});
  bool ok = true;
  auto report = [&](const std::string& name, double worst, double tol) {
    const bool pass = worst <= tol;
    ok = ok && pass;
    w << name << worst << tol << (pass ? 1.0 : 0.0);
    w.end_row();
    std::cout << (pass ? "PASS " : "FAIL ") << name << " worst " << format_number(worst) << '\n';
  };

  double round_trip = 0.0, conv = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int N = modes(rng);
    PeriodicGrid g(10.0 + 5.0 * (d(rng) + 1.0), N);
    std::vector<double> vals(g.size());
    for (auto& v : vals) v = d(rng);
    PhysicalField f(g, vals);
    const auto back = inverse_dft_complex(forward_dft(f));
    for (std::size_t i = 0; i < vals.size(); ++i) round_trip = std::max(round_trip, std::abs(back[i] - vals[i]));

    SpectralField a(g), b(g);
    for (auto& z : a.coeffs) z = {d(rng), d(rng)};
    for (auto& z : b.coeffs) z = {d(rng), d(rng)};
    const auto fast = dealiased_product(a, b);
    for (int j = -N; j < N; ++j) {
      cplx sum{};
      for (int l = -N; l < N; ++l)
        if (j - l >= -N && j - l < N) sum += a[l] * b[j - l];
      conv = std::max(conv, std::abs(fast[j] - sum));
    }
  }
  report("dft round trip", round_trip, 1e-12);
  report("dealiased product vs direct sum", conv, 1e-11);
  ctx.add_output("self_test.csv");
  return ok;
}

}  // namespace bouss::cli
