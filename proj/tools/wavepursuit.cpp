// wavepursuit: run, verify, compare, duel, figures.
//
// Exit codes: 0 ok, 1 usage, 2 validation, 3 solver failure, 4 verification failure.
// Output files go to --out, else $WAVEPURSUIT_OUTPUT_DIR, else the working directory.

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavepursuit/wavepursuit.hpp"

namespace fs = std::filesystem;
using namespace wavepursuit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerification = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::UnstableTimeStep:
    case ErrorCode::MissingPreviousStep:
    case ErrorCode::SingularGradient:
    case ErrorCode::SolverFailure:
    case ErrorCode::OutOfDomain:
    case ErrorCode::FieldKindMismatch:
      return kExitSolver;
    case ErrorCode::MissingSnapshots:
    case ErrorCode::TraceTooShort:
      return kExitVerification;
    default:
      return kExitValidation;
  }
}

fs::path output_dir(const std::string& flag) {
  fs::path dir = ".";
  if (!flag.empty()) {
    dir = flag;
  } else if (const char* env = std::getenv("WAVEPURSUIT_OUTPUT_DIR"); env && *env) {
    dir = env;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IOError, "cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

StrategyTag pursuer_strategy(const std::string& name) {
  if (name == "wave") return StrategyTag::PursuerWave;
  if (name == "diffusion") return StrategyTag::PursuerDiffusion;
  if (name == "laplace") return StrategyTag::PursuerLaplace;
  if (name == "harmonic") return StrategyTag::PursuerHarmonicDuel;
  throw Error(ErrorCode::ValidationError, "unknown pursuer strategy '" + name + "'");
}

Scenario load(const std::string& path, std::optional<std::uint64_t> seed, bool echo_defaults) {
  ParsedScenario parsed = parse_scenario(path);
  if (echo_defaults) {
    for (const auto& d : parsed.defaults_applied) std::cout << "default " << d << "\n";
  }
  if (seed) parsed.scenario.game.rng_seed = *seed;
  return parsed.scenario;
}

double tail_mean(const GameTrace& t, double fraction) {
  const auto& r = t.records;
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * double(r.size()))));
  double sum = 0;
  for (std::size_t k = r.size() - n; k < r.size(); ++k) sum += r[k].distance;
  return sum / double(n);
}

std::string capture_summary(const GameTrace& trace, double capture_radius) {
  const auto rep = check_capture(trace, capture_radius, capture_radius);
  std::ostringstream out;
  out << "ticks=" << trace.records.size() << " captured="
      << (rep.first_capture_tick ? "tick " + std::to_string(*rep.first_capture_tick) : std::string("no"))
      << " final_distance=" << detail::format_number(rep.final_distance)
      << " lock_fraction=" << detail::format_number(rep.lock_fraction);
  return out.str();
}

// --- run -------------------------------------------------------------------

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out_flag) {
  const Scenario s = load(path, seed, true);
  const GameTrace trace = run_game(s);
  const fs::path dir = output_dir(out_flag);
  const fs::path trace_path = dir / s.outputs.trace;
  write_trace(trace, trace_path.string());

  const auto cap = check_capture(trace, s.game.capture_radius, s.game.capture_radius);
  ReportWriter w;
  w.section("run")
      .add("scenario_hash", trace.meta.scenario_hash)
      .add("seed", trace.meta.seed)
      .add("ticks", trace.records.size())
      .add("captured", cap.first_capture_tick.has_value())
      .add("first_capture_tick", cap.first_capture_tick ? static_cast<long long>(*cap.first_capture_tick) : -1LL)
      .add("final_distance", cap.final_distance)
      .add("lock_fraction", cap.lock_fraction);
  write_text_file((dir / s.outputs.report).string(), w.str());
  std::cout << capture_summary(trace, s.game.capture_radius) << "\n" << "trace " << trace_path.string() << "\n";
  return kExitOk;
}

// --- verify ----------------------------------------------------------------

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int finish_verify(const std::vector<Check>& checks, const ReportWriter& w, const fs::path& report) {
  write_text_file(report.string(), w.str());
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    ok = ok && c.pass;
  }
  std::cout << "report " << report.string() << "\n";
  return ok ? kExitOk : kExitVerification;
}

std::string fraction_text(double f, double need) {
  return detail::format_number(f) + " (need >= " + detail::format_number(need) + ")";
}

int verify_scenario(const std::string& path, std::optional<std::uint64_t> seed, const fs::path& dir) {
  const Scenario s = load(path, seed, false);
  const Environment env = build_environment(s.environment);
  const double h = s.environment.cell_size;
  std::vector<Check> checks;
  ReportWriter w;

  BandRecorder band(2.0 * h);
  RunOptions opts;
  opts.on_tick = [&](const TickView& v) { band(v); };
  const GameTrace trace = run_game(s, opts);
  const auto avoid = avoidance_margin_check(trace, env, band.samples());
  write_report(w, avoid);
  checks.push_back({"free-space membership", avoid.obstacle_positions == 0,
                    std::to_string(avoid.obstacle_positions) + " recorded positions outside free cells"});

  FieldParams params;
  params.boundary_level = s.field.boundary_level;
  params.boundary_mode = s.field.boundary_mode;
  const PotentialField laplace =
      solve_laplace(env, TargetFootprint{s.evader.start, effective_target_radius(s)}, params, solver_options(s));
  const auto extrema = maximum_principle_check(laplace, env);
  write_report(w, extrema);
  checks.push_back({"maximum principle", extrema.empty(), std::to_string(extrema.size()) + " interior strict extrema"});

  const ProbeReport probes = probe_boundary_band(laplace, env, 2.0 * h);
  write_report(w, probes);
  if (s.field.boundary_mode == BoundaryMode::Dirichlet) {
    checks.push_back({"boundary repulsion", probes.negative_fraction() >= 0.99,
                      "dV/dn < 0 at " + fraction_text(probes.negative_fraction(), 0.99) + " of " +
                          std::to_string(probes.probes) + " probes"});
  } else {
    std::cout << "INFO no-flux: max |dV/dn| = " << detail::format_number(probes.max_abs) << " at clearance <= 2h\n";
  }

  const auto morse = morse_check(laplace, env);
  write_report(w, morse);
  checks.push_back({"morse", morse.nonsingular,
                    std::to_string(morse.points.size()) + " critical points, min |lambda| = " +
                        detail::format_number(morse.points.empty() ? 0.0 : morse.min_abs_eigen)});

  LyapunovOptions lo;
  lo.target_radius = std::max(s.game.capture_radius, effective_target_radius(s) + h);
  lo.rho = s.pursuer.regularizer.rho;
  const auto lyap = lyapunov_check(trace, lo);
  write_report(w, lyap);
  checks.push_back({"potential positivity", lyap.positivity_violations == 0,
                    std::to_string(lyap.positivity_violations) + " ticks with V <= 0 outside the target"});
  if (s.pursuer.strategy == StrategyTag::PursuerWave && s.pursuer.command == CommandMode::RawOde) {
    checks.push_back({"lyapunov decrease", lyap.decrease_fraction() >= 0.95,
                      "dV/dt < 0 on " + fraction_text(lyap.decrease_fraction(), 0.95) + " of ticks"});
    checks.push_back({"lyapunov agreement", lyap.agreement_fraction() >= 0.9,
                      "within 20% of -|grad V|^2 on " + fraction_text(lyap.agreement_fraction(), 0.9) + " of " +
                          std::to_string(lyap.eligible) + " ticks"});
  }

  if (s.evader.strategy != StrategyTag::EvaderScripted) {
    try {
      const auto curv = curvature_closure_correlation(trace);
      write_report(w, curv);
      std::cout << "INFO curvature-closure: " << curv.matches.size() << " of " << curv.peaks.size()
                << " curvature peaks near a distance drop\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TraceTooShort) throw;
      std::cout << "INFO curvature-closure: evader barely moved\n";
    }
  }
  return finish_verify(checks, w, dir / "verify_report.txt");
}

int verify_trace(const std::string& path, double target_radius, const fs::path& dir) {
  const GameTrace trace = read_trace(path);
  std::vector<Check> checks;
  ReportWriter w;
  std::size_t blocked = 0;
  for (const auto& r : trace.records) blocked += (r.clearance_pursuer <= 0.0) + (r.clearance_evader <= 0.0);
  checks.push_back({"positive clearance", blocked == 0, std::to_string(blocked) + " positions with clearance <= 0"});
  LyapunovOptions lo;
  lo.target_radius = target_radius;
  const auto lyap = lyapunov_check(trace, lo);
  write_report(w, lyap);
  checks.push_back({"potential positivity", lyap.positivity_violations == 0,
                    std::to_string(lyap.positivity_violations) + " ticks with V <= 0 outside the target"});
  try {
    const auto curv = curvature_closure_correlation(trace);
    write_report(w, curv);
    std::cout << "INFO curvature-closure: " << curv.matches.size() << " of " << curv.peaks.size()
              << " curvature peaks near a distance drop\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TraceTooShort) throw;
  }
  return finish_verify(checks, w, dir / (fs::path(path).stem().string() + "_verify.txt"));
}

// --- compare / duel --------------------------------------------------------

struct Job {
  std::string label;
  Scenario scenario;
};

std::vector<GameTrace> run_all(const std::vector<Job>& jobs) {
  std::vector<std::future<GameTrace>> futures;
  for (const auto& j : jobs) futures.push_back(std::async(std::launch::async, [&j] { return run_game(j.scenario); }));
  std::vector<GameTrace> out;
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

int cmd_compare(const std::string& path, const std::string& strategies, std::optional<std::uint64_t> seed,
                const std::string& out_flag) {
  const Scenario base = load(path, seed, false);
  std::vector<Job> jobs;
  for (const auto& name : split_list(strategies)) {
    Scenario s = base;
    s.pursuer.strategy = pursuer_strategy(name);
    jobs.push_back({name, s});
  }
  if (jobs.empty()) throw Error(ErrorCode::ValidationError, "--strategies is empty");
  const auto traces = run_all(jobs);
  const fs::path dir = output_dir(out_flag);
  ReportWriter w;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& t = traces[k];
    const auto& r = t.records;
    const double x_half = r.back().pursuer.x - r[r.size() / 2].pursuer.x;
    const auto cap = check_capture(t, base.game.capture_radius, base.game.capture_radius);
    write_trace(t, (dir / ("trace_" + jobs[k].label + ".csv")).string());
    std::cout << jobs[k].label << ": " << capture_summary(t, base.game.capture_radius)
              << " pursuer_dx_final_half=" << detail::format_number(x_half) << "\n";
    w.section(jobs[k].label)
        .add("captured", cap.first_capture_tick.has_value())
        .add("final_distance", cap.final_distance)
        .add("initial_distance", r.front().distance)
        .add("pursuer_dx_final_half", x_half);
  }
  write_text_file((dir / "compare_report.txt").string(), w.str());
  return kExitOk;
}

int cmd_duel(const std::string& path, const std::string& ratios, const std::string& pursuers,
             std::optional<double> lock_threshold, std::optional<std::uint64_t> seed, const std::string& out_flag) {
  const Scenario base = load(path, seed, false);
  std::vector<Job> jobs;
  for (const auto& ratio_text : split_list(ratios)) {
    double ratio = 0;
    try {
      ratio = std::stod(ratio_text);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ValidationError, "bad speed ratio '" + ratio_text + "'");
    }
    for (const auto& name : split_list(pursuers)) {
      Scenario s = base;
      s.pursuer.strategy = pursuer_strategy(name);
      s.evader.speed = ratio * s.pursuer.speed;
      s.game.stop_on_capture = false;
      jobs.push_back({name + "_" + ratio_text, s});
    }
  }
  if (jobs.empty()) throw Error(ErrorCode::ValidationError, "nothing to run");
  const double lock = lock_threshold.value_or(base.game.capture_radius);
  const auto traces = run_all(jobs);
  const fs::path dir = output_dir(out_flag);
  ReportWriter w;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto rep = check_capture(traces[k], base.game.capture_radius, lock);
    const double steady = tail_mean(traces[k], 0.2);
    write_trace(traces[k], (dir / ("trace_" + jobs[k].label + ".csv")).string());
    std::cout << jobs[k].label << ": lock_fraction=" << detail::format_number(rep.lock_fraction)
              << " steady_distance=" << detail::format_number(steady) << "\n";
    w.section(jobs[k].label).add("lock_fraction", rep.lock_fraction).add("steady_distance", steady);
  }
  write_text_file((dir / "duel_report.txt").string(), w.str());
  return kExitOk;
}

// --- figures ---------------------------------------------------------------

int cmd_figures(const std::vector<std::string>& paths, const std::string& scenario, const std::string& kind,
                const std::string& out_flag) {
  if (kind != "all" && kind != "trajectories" && kind != "distance" && kind != "curvature") {
    throw Error(ErrorCode::ValidationError, "unknown figure kind '" + kind + "'");
  }
  std::vector<GameTrace> traces;
  for (const auto& p : paths) traces.push_back(read_trace(p));
  std::vector<FigureSeries> series;
  for (std::size_t k = 0; k < traces.size(); ++k) series.push_back({fs::path(paths[k]).stem().string(), &traces[k]});
  std::optional<EnvironmentSpec> env;
  if (!scenario.empty()) env = parse_scenario(scenario).scenario.environment;
  const fs::path dir = output_dir(out_flag);
  const auto emit = [&](const fs::path& name, const std::string& svg) {
    write_text_file((dir / name).string(), svg);
    std::cout << "figure " << (dir / name).string() << "\n";
  };
  if (kind == "all" || kind == "trajectories") emit("trajectories.svg", render_trajectories(series, env));
  if (kind == "all" || kind == "distance") emit("distance.svg", render_distance(series));
  if (kind == "all" || kind == "curvature") {
    for (const auto& s : series) {
      try {
        emit("curvature_" + s.label + ".svg", render_curvature_overlay(*s.trace, curvature_closure_correlation(*s.trace)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TraceTooShort || kind == "curvature") throw;
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave-potential pursuit-evasion simulator"};
  app.require_subcommand(1);
  std::string out_flag;
  std::optional<std::uint64_t> seed;

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "simulate a scenario and write its trace");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--seed", seed, "override game.rng_seed");
  run->add_option("--out", out_flag, "output directory");

  std::string verify_input;
  double target_radius = 0.25;
  auto* verify = app.add_subcommand("verify", "run the analysis checks on a scenario or a trace (.csv)");
  verify->add_option("input", verify_input, "scenario file or trace CSV")->required();
  verify->add_option("--seed", seed, "override game.rng_seed");
  verify->add_option("--target-radius", target_radius, "trace mode: radius of the target ball [m]");
  verify->add_option("--out", out_flag, "output directory");

  std::string strategies = "laplace,diffusion,wave";
  auto* compare = app.add_subcommand("compare", "run one scenario under several pursuer strategies");
  compare->add_option("scenario", scenario_path, "scenario file")->required();
  compare->add_option("--strategies", strategies, "comma-separated pursuer strategies");
  compare->add_option("--seed", seed, "override game.rng_seed");
  compare->add_option("--out", out_flag, "output directory");

  std::string ratios = "0.95,1.05";
  std::string pursuers = "harmonic,wave";
  std::optional<double> lock_threshold;
  auto* duel = app.add_subcommand("duel", "sweep evader/pursuer speed ratios");
  duel->add_option("scenario", scenario_path, "scenario file")->required();
  duel->add_option("--speed-ratios", ratios, "comma-separated v_e / v_p values");
  duel->add_option("--pursuers", pursuers, "comma-separated pursuer strategies");
  duel->add_option("--lock-threshold", lock_threshold, "lock distance [m], default the capture radius");
  duel->add_option("--seed", seed, "override game.rng_seed");
  duel->add_option("--out", out_flag, "output directory");

  std::vector<std::string> trace_paths;
  std::string figure_scenario;
  std::string kind = "all";
  auto* figures = app.add_subcommand("figures", "render SVG figures from traces");
  figures->add_option("traces", trace_paths, "trace CSV files")->required();
  figures->add_option("--scenario", figure_scenario, "scenario whose obstacles are drawn");
  figures->add_option("--kind", kind, "all, trajectories, distance or curvature");
  figures->add_option("--out", out_flag, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(scenario_path, seed, out_flag);
    if (*verify) {
      const fs::path dir = output_dir(out_flag);
      if (fs::path(verify_input).extension() == ".csv") return verify_trace(verify_input, target_radius, dir);
      return verify_scenario(verify_input, seed, dir);
    }
    if (*compare) return cmd_compare(scenario_path, strategies, seed, out_flag);
    if (*duel) return cmd_duel(scenario_path, ratios, pursuers, lock_threshold, seed, out_flag);
    if (*figures) return cmd_figures(trace_paths, figure_scenario, kind, out_flag);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kExitUsage;
}
