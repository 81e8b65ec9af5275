// Command-line front end: feasibility reports, closed-loop runs, validation.
//
// Exit codes: 0 success, 2 infeasible or invalid scenario, 3 runtime
// singularity, 4 I/O failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "rtiform/rtiform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitSingular = 3;
constexpr int kExitIo = 4;

int exit_code_for(rti::ErrorCode c) {
  using rti::ErrorCode;
  switch (c) {
    case ErrorCode::kNearPiSingularity:
    case ErrorCode::kHoverRequired:
    case ErrorCode::kGimbalLock:
    case ErrorCode::kNotSkew:
      return kExitSingular;
    case ErrorCode::kIoError:
      return kExitIo;
    default:
      return kExitInfeasible;
  }
}

struct Overrides {
  std::string out;
  std::optional<double> step;
  std::optional<double> duration;
};

rti::Scenario load(const std::string& path, const Overrides& o) {
  rti::Scenario sc = rti::load_scenario(path);
  if (!o.out.empty()) sc.output_dir = o.out;
  if (o.step) sc.step = *o.step;
  if (o.duration) sc.duration = *o.duration;
  sc.validate();
  return sc;
}

int cmd_validate(const std::string& path, const Overrides& o) {
  const rti::Scenario sc = load(path, o);
  std::printf("%s: ok (%zu UAVs, %zu ticks, %s profile)\n", sc.name.c_str(), sc.node_count(),
              sc.tick_count(), to_string(rti::classify(sc.profile)));
  return kExitOk;
}

int cmd_feasibility(const std::string& path, const Overrides& o) {
  const rti::Scenario sc = load(path, o);
  const rti::FeasibilityReport rep = rti::feasibility_report(sc);
  const std::string text = rti::render_text(rep);
  std::cout << text;
  const std::filesystem::path dir(sc.output_dir);
  rti::write_text_file(dir / (sc.name + "_feasibility.txt"), text);
  rti::write_text_file(dir / (sc.name + "_feasibility.csv"), rti::render_csv(rep));
  return rep.feasible() ? kExitOk : kExitInfeasible;
}

int cmd_simulate(const std::string& path, const Overrides& o, bool parallel,
                 const std::string& format) {
  const rti::Scenario sc = load(path, o);
  const rti::FeasibilityReport rep = rti::feasibility_report(sc);
  if (!rep.feasible()) {
    std::cerr << rti::render_text(rep);
    return kExitInfeasible;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const rti::TrajectoryLog log = rti::run(sc, {.parallel = parallel});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::filesystem::path dir(sc.output_dir);
  if (format == "csv" || format == "both") rti::export_csv(log, dir / (sc.name + ".csv"));
  if (format == "svg" || format == "both") rti::export_svg(log, dir / (sc.name + ".svg"), sc.name);

  double worst = 0.0;
  const std::size_t last = log.tick_count() - 1;
  for (rti::NodeId u = 1; u < log.node_count; ++u) worst = std::max(worst, log.at(last, u).error_norm);
  std::printf("%s: %zu UAVs, %zu ticks in %.3f s; final max ||X_CF|| = %.3e -> %s\n",
              sc.name.c_str(), log.node_count, log.tick_count(), wall, worst,
              dir.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Roto-translation-invariant formation simulator for fixed-wing UAV swarms"};
  app.require_subcommand(1);

  Overrides o;
  bool parallel = false;
  std::string format = "both";
  std::string path;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", path, "Scenario file")->required();
    sub->add_option("--out", o.out, "Output directory (default: the scenario's)");
    sub->add_option("--step", o.step, "Integration step h [s]")->check(CLI::PositiveNumber);
    sub->add_option("--duration", o.duration, "Simulated time T [s]")->check(CLI::PositiveNumber);
  };

  CLI::App* feas = app.add_subcommand("feasibility", "Check every follower pattern and save the report");
  add_common(feas);
  CLI::App* sim = app.add_subcommand("simulate", "Run the closed loop and write CSV/SVG");
  add_common(sim);
  sim->add_flag("--parallel", parallel, "Evaluate each DAG layer on worker threads");
  sim->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "svg", "both"}));
  CLI::App* val = app.add_subcommand("validate", "Parse the scenario and check its invariants");
  add_common(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInfeasible;
  }

  try {
    if (feas->parsed()) return cmd_feasibility(path, o);
    if (sim->parsed()) return cmd_simulate(path, o, parallel, format);
    return cmd_validate(path, o);
  } catch (const rti::Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
