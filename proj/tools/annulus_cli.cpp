// Command-line driver: radial profiles, flows, threshold tables, spectral
// bounds, energies and non-existence ledgers.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "annulus/config.hpp"
#include "annulus/energy.hpp"
#include "annulus/flow.hpp"
#include "annulus/radial.hpp"
#include "annulus/spectral.hpp"
#include "annulus/svg.hpp"
#include "annulus/thresholds.hpp"

namespace fs = std::filesystem;
using namespace annulus;

namespace {

// String-valued options of one subcommand, merged as defaults < config < flags.
struct Bindings {
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
  RunConfig defaults;

  void add(CLI::App* app, const std::string& name, const std::string& fallback, const std::string& help) {
    defaults.set(name, fallback);
    options[name] = app->add_option("--" + name, flags[name], help + " [" + fallback + "]");
  }

  RunConfig merge(const RunConfig& file) const {
    RunConfig merged = defaults;
    for (const auto& [key, value] : file.values())
      if (options.count(key)) merged.set(key, value);
    for (const auto& [key, option] : options)
      if (option->count() > 0) merged.set(key, flags.at(key));
    return merged;
  }
};

struct Globals {
  std::string out = ".";
  std::string config;
  std::uint64_t seed = 0;
  int threads = 1;
};

int integer(const RunConfig& c, const std::string& key) {
  return static_cast<int>(c.get_integer(key, 0));
}

Coupling coupling_of(const RunConfig& c) { return Coupling::parse(c.get_string("eps", "inf")); }

fs::path prepare_out(const Globals& g) {
  fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParameterError("cannot create output directory " + dir.string());
  return dir;
}

PolarGrid grid_of(const RunConfig& c) {
  return make_grid(AnnulusSpec(c.get_real("R", 0.5)), integer(c, "nr"), integer(c, "na"),
                   parse_spacing(c.get_string("spacing", "uniform")));
}

RadialProfile profile_for(const PolarGrid& grid, int winding, Coupling coupling) {
  const auto nodes = grid.radial_nodes();
  if (winding == 0) return constant_profile(grid.annulus(), nodes);
  if (coupling.is_infinite()) return harmonic_profile(grid.annulus(), std::abs(winding), nodes);
  return solve_gl_profile(grid.annulus(), std::abs(winding), coupling, nodes);
}

ComplexField initial_field(const PolarGrid& grid, const RunConfig& c, Coupling coupling) {
  const int p = integer(c, "p");
  const int q = integer(c, "q");
  std::string init = c.get_string("init", "auto");
  if (init == "auto") init = p == q ? "radial" : "test";
  if (init == "radial") {
    if (p != q) throw ParameterError("radial initialization needs p == q");
    return radial_ansatz(grid, profile_for(grid, p, coupling), p);
  }
  if (init == "test") return assemble_test_field(grid.annulus(), grid, {p, q}, coupling);
  if (init == "blended") return blended_test_field(grid, {p, q}, c.get_real("bias", 1.0));
  throw ParameterError("init must be one of auto, radial, test, blended");
}

int cmd_radial(const RunConfig& c, const Globals& g) {
  const AnnulusSpec annulus(c.get_real("R", 0.5));
  const int p = integer(c, "p");
  if (p < 0) throw ParameterError("p must be >= 0");
  const Coupling coupling = coupling_of(c);
  const int n = integer(c, "nodes");
  if (n < 32) throw ParameterError("nodes must be >= 32");
  const auto grid = make_grid(annulus, n, 8);
  const RadialProfile profile = profile_for(grid, p, coupling);
  const fs::path path = prepare_out(g) / "profile.csv";
  write_profile_csv(profile, path);
  std::printf("profile: %s\n", profile.closed_form ? "closed form" : "boundary value solve");
  std::printf("min_rho=%s residual=%s\n", format_real(profile_min(profile)).c_str(),
              format_real(radial_residual(profile.nodes, profile.values, p, coupling)).c_str());
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int cmd_flow(const RunConfig& c, const Globals& g) {
  const Coupling coupling = coupling_of(c);
  const PolarGrid grid = grid_of(c);
  const ComplexField initial = initial_field(grid, c, coupling);
  FlowConfig config;
  config.step_size = c.get_real("step", config.step_size);
  config.max_iterations = integer(c, "max-iter");
  config.grad_tol = c.get_real("grad-tol", config.grad_tol);
  config.degree_check_interval = integer(c, "check-interval");
  config.perturbation = c.get_real("perturbation", 0.0);
  config.preconditioner_shift = c.get_real("shift", 0.0);
  config.seed = g.seed;
  const FlowResult result = run_flow(initial, coupling, config);
  const fs::path dir = prepare_out(g);
  write_trace_csv(result.trace, dir / "trace.csv");
  write_field_csv(result.field, dir / "field.csv");
  write_grid_metadata(grid, dir / "grid.json");

  for (const auto& e : result.trace.events) {
    const char* where = e.boundary == Boundary::outer ? "outer" : "inner";
    if (e.kind == FlowEventKind::degree_jump)
      std::printf("ESCAPE: %s degree %d -> %d at iteration %d (energy before %s)\n", where, e.from, e.to,
                  e.iteration, format_real(e.energy_before).c_str());
    else
      std::printf("DEGENERACY: %s boundary at iteration %d, theta=%s\n", where, e.iteration,
                  format_real(e.theta).c_str());
  }
  const auto& last = result.trace.records.back();
  std::printf("status=%s iterations=%d\n", to_string(result.trace.status).c_str(), result.trace.iterations);
  std::printf("final degrees (%d,%d) energy=%s\n", last.degrees.outer, last.degrees.inner,
              format_real(last.energy.total).c_str());
  std::printf("interior_residual=%s boundary_residual=%s\n", format_real(last.interior_residual).c_str(),
              format_real(last.boundary_residual).c_str());
  return 0;
}

int cmd_thresholds(const RunConfig& c, const Globals& g) {
  const int p_max = integer(c, "p-max");
  if (p_max < 1) throw ParameterError("p-max must be >= 1");
  const double gamma = c.get_real("gamma", 4.0);
  std::vector<double> samples;
  for (int s = 1; s < 100; ++s) samples.push_back(s / 100.0);
  std::vector<ThresholdReport> reports;
  for (int p = 1; p <= p_max; ++p) reports.push_back(threshold_report(p, samples, gamma));

  const fs::path dir = prepare_out(g);
  write_threshold_csv(reports, dir / "thresholds.csv");
  std::printf("%s\n", threshold_csv_header().c_str());
  for (const auto& r : reports)
    std::printf("%s%s\n", to_csv_row(r).c_str(), r.p == 1 ? "   # unconditional" : "");

  PlotPanel q_panel{"Q_p(R) = p - 1 - pR - R^p", "R", "Q_p", {}};
  PlotPanel gap_panel{"radial energy gap vs 2 pi", "R", "gap", {}};
  std::vector<double> R;
  for (int s = 0; s <= 200; ++s) R.push_back(s / 200.0);
  for (int p = 1; p <= p_max; ++p) {
    PlotSeries qs{"p = " + std::to_string(p), R, {}};
    for (double r : R) qs.y.push_back(q_polynomial(p, r));
    q_panel.series.push_back(std::move(qs));
    if (p < 2) continue;
    PlotSeries gs{"p = " + std::to_string(p), {}, {}};
    for (double r : R)
      if (r > 0.0 && r < 1.0) gs.x.push_back(r), gs.y.push_back(radial_energy_gap(p, r));
    gap_panel.series.push_back(std::move(gs));
  }
  gap_panel.series.push_back({"2 pi", {0.0, 1.0}, {kTwoPi, kTwoPi}, true});
  write_svg({q_panel, gap_panel}, dir / "thresholds.svg");
  std::printf("wrote %s and %s\n", (dir / "thresholds.csv").string().c_str(),
              (dir / "thresholds.svg").string().c_str());
  return 0;
}

int cmd_spectral(const RunConfig& c, const Globals& g) {
  const double R = c.get_real("R", 0.99);
  const int q = integer(c, "q");
  const int k_min = static_cast<int>(c.get_integer("k-min", -4 * q));
  const int k_max = static_cast<int>(c.get_integer("k-max", 4 * q));
  const int nodes = integer(c, "nodes");
  if (k_min > k_max) throw ParameterError("k-min must be <= k-max");
  const fs::path path = prepare_out(g) / "spectral.csv";
  std::FILE* out = std::fopen(path.string().c_str(), "w");
  if (!out) throw Error("cannot open " + path.string());
  std::fprintf(out, "k,branch,m_tilde,oracle,delta\n");
  std::printf("%6s %6s %24s %24s %12s\n", "k", "branch", "m_tilde", "oracle", "delta");
  double worst = 0.0;
  try {
    for (int k = k_min; k <= k_max; ++k) {
      const auto bound = mode_bound(k, q, R);
      // Branch I has no closed form: compare against a refined oracle.
      const double reference = bound.branch == Branch::I ? mode_bound_oracle(k, q, R, 2 * nodes)
                                                         : mode_bound_oracle(k, q, R, nodes);
      const double value = bound.branch == Branch::I ? mode_bound_oracle(k, q, R, nodes) : bound.value;
      const double delta = std::abs(value - reference) / std::max(1.0, std::abs(value));
      worst = std::max(worst, delta);
      std::fprintf(out, "%d,%s,%s,%s,%s\n", k, to_string(bound.branch).c_str(), format_real(value).c_str(),
                   format_real(reference).c_str(), format_real(delta).c_str());
      std::printf("%6d %6s %24.16g %24.16g %12.3e\n", k, to_string(bound.branch).c_str(), value, reference, delta);
    }
  } catch (...) {
    std::fclose(out);
    throw;
  }
  std::fclose(out);
  std::printf("max delta=%.3e\nK_R=%d\nwrote %s\n", worst, k_r(q, R), path.string().c_str());
  return 0;
}

int cmd_energy(const RunConfig& c, const Globals& g) {
  (void)g;
  const Coupling coupling = coupling_of(c);
  const auto field_path = c.get_string("field", "");
  std::optional<ComplexField> field;
  if (!field_path.empty()) {
    const PolarGrid grid = read_grid_metadata(c.get_string("grid", "grid.json"));
    field = read_field_csv(grid, field_path);
  } else {
    const PolarGrid grid = grid_of(c);
    field = initial_field(grid, c, coupling);
  }
  std::printf("%s\n%s\n", energy_csv_header().c_str(), to_csv_row(evaluate_energy(*field, coupling)).c_str());
  const auto d = read_degrees(*field);
  std::printf("degrees (%d,%d) residuals %s %s\n", d.outer, d.inner, format_real(d.outer_residual).c_str(),
              format_real(d.inner_residual).c_str());
  std::printf("jacobian=%s defect=%s\n", format_real(jacobian_integral(*field)).c_str(),
              format_real(jacobian_degree_defect(*field)).c_str());
  return 0;
}

int cmd_ledger(const RunConfig& c, const Globals& g) {
  const Coupling coupling = coupling_of(c);
  const int p = integer(c, "p");
  const int q = integer(c, "q");
  const auto field_path = c.get_string("field", "");
  std::optional<ComplexField> field;
  if (!field_path.empty()) {
    const PolarGrid grid = read_grid_metadata(c.get_string("grid", "grid.json"));
    field = read_field_csv(grid, field_path);
  } else {
    const PolarGrid grid = grid_of(c);
    field = initial_field(grid, c, coupling);
    const int iterations = integer(c, "flow-iter");
    if (iterations > 0) {
      FlowConfig config;
      config.max_iterations = iterations;
      config.seed = g.seed;
      field = run_flow(*field, coupling, config).field;
    }
  }
  const double R = field->grid().annulus().inner_radius();
  const auto coeffs = fourier_trace(*field, Boundary::outer, q);
  const auto report = nonexistence_ledger(coeffs, p, q, R);
  const fs::path path = prepare_out(g) / "ledger.csv";
  write_ledger_csv(report, path);
  std::printf("K_R=%d d=%d degree_sum=%s feasible=%s\n", report.K_R, report.d,
              format_real(report.degree_sum).c_str(), report.feasible ? "yes" : "no");
  std::printf("S_1_2q=%s S_2q1_KR1=%s S_KR_inf=%s total=%s\n", format_real(report.s_1_2q).c_str(),
              format_real(report.s_2q1_kr1).c_str(), format_real(report.s_kr_inf).c_str(),
              format_real(report.partial_total).c_str());
  std::printf("mode_sum=%s d_pi=%s margin=%s eta=%s\n", format_real(report.mode_sum).c_str(),
              format_real(report.d * kPi).c_str(), format_real(report.excess).c_str(),
              format_real(report.eta).c_str());
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ginzburg-Landau energies on circular annuli with semi-stiff boundary conditions"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--out", globals.out, "output directory [.]");
  app.add_option("--config", globals.config, "flat key=value parameter file; flags override it");
  app.add_option("--seed", globals.seed, "seed for perturbed initializations [0]");
  app.add_option("--threads", globals.threads, "accepted for compatibility; runs are single-threaded [1]")
      ->check(CLI::PositiveNumber);

  std::map<std::string, Bindings> bindings;
  std::map<std::string, int (*)(const RunConfig&, const Globals&)> commands;
  auto sub = [&](const std::string& name, const std::string& help, auto handler) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    commands[name] = handler;
    return std::pair<CLI::App*, Bindings*>(s, &bindings[name]);
  };

  {
    auto [s, b] = sub("radial", "modulus of the radial solution", cmd_radial);
    b->add(s, "R", "0.5", "inner radius");
    b->add(s, "p", "1", "winding");
    b->add(s, "eps", "inf", "epsilon, or inf");
    b->add(s, "nodes", "1024", "radial nodes");
  }
  {
    auto [s, b] = sub("flow", "projected gradient flow from a test field", cmd_flow);
    b->add(s, "R", "0.99", "inner radius");
    b->add(s, "p", "2", "outer degree");
    b->add(s, "q", "2", "inner degree");
    b->add(s, "eps", "100", "epsilon, or inf");
    b->add(s, "nr", "64", "radial nodes");
    b->add(s, "na", "256", "angular nodes");
    b->add(s, "spacing", "uniform", "uniform or cosine_clustered");
    b->add(s, "init", "auto", "auto, radial, test or blended");
    b->add(s, "bias", "1", "zero placement exponent of the blended field");
    b->add(s, "step", "1", "step size");
    b->add(s, "max-iter", "2000", "iteration cap");
    b->add(s, "grad-tol", "1e-8", "residual tolerance");
    b->add(s, "check-interval", "1", "iterations between degree readings");
    b->add(s, "perturbation", "0", "seeded interior perturbation amplitude");
    b->add(s, "shift", "0", "preconditioner mass shift (0: 1/(1-R)^2)");
  }
  {
    auto [s, b] = sub("thresholds", "threshold table and plot", cmd_thresholds);
    b->add(s, "p-max", "6", "largest degree");
    b->add(s, "gamma", "4", "integral criterion level");
  }
  {
    auto [s, b] = sub("spectral", "per-mode lower bounds and oracle deltas", cmd_spectral);
    b->add(s, "R", "0.99", "inner radius");
    b->add(s, "q", "2", "inner degree");
    b->add(s, "k-min", "-8", "smallest mode");
    b->add(s, "k-max", "8", "largest mode");
    b->add(s, "nodes", "4096", "oracle nodes");
  }
  {
    auto [s, b] = sub("energy", "energy and degrees of a field", cmd_energy);
    b->add(s, "field", "", "field CSV (default: build from p, q)");
    b->add(s, "grid", "grid.json", "grid metadata for --field");
    b->add(s, "R", "0.5", "inner radius");
    b->add(s, "p", "1", "outer degree");
    b->add(s, "q", "1", "inner degree");
    b->add(s, "eps", "inf", "epsilon, or inf");
    b->add(s, "nr", "256", "radial nodes");
    b->add(s, "na", "256", "angular nodes");
    b->add(s, "spacing", "uniform", "uniform or cosine_clustered");
    b->add(s, "init", "auto", "auto, radial, test or blended");
    b->add(s, "bias", "1", "zero placement exponent of the blended field");
  }
  {
    auto [s, b] = sub("ledger", "non-existence ledger of an outer trace", cmd_ledger);
    b->add(s, "field", "", "field CSV (default: build from p, q)");
    b->add(s, "grid", "grid.json", "grid metadata for --field");
    b->add(s, "R", "0.99", "inner radius");
    b->add(s, "p", "3", "outer degree");
    b->add(s, "q", "2", "inner degree");
    b->add(s, "eps", "100", "epsilon, or inf");
    b->add(s, "nr", "32", "radial nodes");
    b->add(s, "na", "1024", "angular nodes");
    b->add(s, "spacing", "uniform", "uniform or cosine_clustered");
    b->add(s, "init", "blended", "auto, radial, test or blended");
    b->add(s, "bias", "1", "zero placement exponent of the blended field");
    b->add(s, "flow-iter", "0", "flow iterations before the ledger");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig file = globals.config.empty() ? RunConfig() : RunConfig::load(globals.config);
    for (const auto& [name, handler] : commands) {
      CLI::App* s = app.get_subcommand(name);
      if (s->parsed()) return handler(bindings.at(name).merge(file), globals);
    }
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
