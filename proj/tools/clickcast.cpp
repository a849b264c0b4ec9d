// clickcast: replay click logs, simulate study-like sessions, evaluate logs,
// or serve the session API.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "clickcast/simulator.hpp"
#include "commands.hpp"

namespace {

using clickcast::FilterParams;

void add_filter_flags(CLI::App* cmd, FilterParams& p, std::string& resampling) {
  cmd->add_option("--particles", p.particles, "Particle count")->capture_default_str();
  cmd->add_option("--alpha", p.alpha, "Prediction set size")->capture_default_str();
  cmd->add_option("--sigma-x", p.model.sigma_x, "Drift of x (canvas fraction)")->capture_default_str();
  cmd->add_option("--sigma-y", p.model.sigma_y, "Drift of y (canvas fraction)")->capture_default_str();
  cmd->add_option("--sigma-pi", p.model.sigma_pi, "Drift of the location/color bias")
      ->capture_default_str();
  cmd->add_option("--rho", p.model.rho, "Probability the color of interest persists")
      ->capture_default_str();
  cmd->add_option("--warmup", p.warmup, "Clicks observed before the first prediction")
      ->capture_default_str();
  cmd->add_option("--seed", p.seed, "Random seed")->capture_default_str();
  cmd->add_option("--resampling", resampling, "multinomial | systematic")->capture_default_str();
}

bool apply_resampling(const std::string& name, FilterParams& p) {
  if (name == "multinomial") {
    p.resampling = clickcast::Resampling::kMultinomial;
  } else if (name == "systematic") {
    p.resampling = clickcast::Resampling::kSystematic;
  } else {
    std::cerr << "error: invalid parameters: unknown resampling '" << name << "'\n";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = clickcast::cli;
  CLI::App app{"clickcast: next-click prediction from visualization click streams"};
  app.require_subcommand(1);

  cli::ReplayOptions replay;
  std::string replay_resampling = "multinomial";
  auto* replay_cmd = app.add_subcommand("replay", "Replay a click log and score predictions");
  replay_cmd->add_option("--spec", replay.spec_path, "Visualization spec (JSON)")->required();
  replay_cmd->add_option("--log", replay.log_path, "Click log (JSON lines)")->required();
  replay_cmd->add_option("--out", replay.csv_path, "Per-step CSV output");
  replay_cmd->add_flag("--quiet", replay.quiet, "Print the summary only");
  add_filter_flags(replay_cmd, replay.params, replay_resampling);

  cli::SimulateOptions simulate;
  std::string simulate_resampling = "multinomial";
  double user_sigma_xy = 0.0, user_sigma_pi = 0.0, user_rho = 0.0;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate synthetic users and evaluate");
  sim_cmd->add_option("--geo-sessions", simulate.sessions[0])->capture_default_str();
  sim_cmd->add_option("--type-sessions", simulate.sessions[1])->capture_default_str();
  sim_cmd->add_option("--mixed-sessions", simulate.sessions[2])->capture_default_str();
  sim_cmd->add_option("--marks", simulate.dataset.n_marks, "Dataset size")->capture_default_str();
  sim_cmd->add_option("--colors", simulate.dataset.colors, "Color count")->capture_default_str();
  sim_cmd->add_option("--dataset-seed", simulate.dataset_seed)->capture_default_str();
  sim_cmd->add_option("--session-seed", simulate.session_seed)->capture_default_str();
  auto* u_xy = sim_cmd->add_option("--user-sigma-xy", user_sigma_xy, "Synthetic user location drift");
  auto* u_pi = sim_cmd->add_option("--user-sigma-pi", user_sigma_pi, "Synthetic user bias drift");
  auto* u_rho = sim_cmd->add_option("--user-rho", user_rho, "Synthetic user color persistence");
  sim_cmd->add_option("--out", simulate.out_dir, "Directory for summary/steps/curve CSVs");
  sim_cmd->add_flag("--write-data", simulate.write_data, "Also write dataset.json and logs/");
  add_filter_flags(sim_cmd, simulate.params, simulate_resampling);

  cli::EvaluateOptions evaluate;
  std::string evaluate_resampling = "multinomial";
  std::vector<std::string> log_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate recorded logs grouped by task kind");
  eval_cmd->add_option("--spec", evaluate.spec_path, "Visualization spec (JSON)")->required();
  eval_cmd->add_option("--log", log_args, "KIND:PATH with KIND in geo|type|mixed")->required();
  eval_cmd->add_option("--out", evaluate.out_dir, "Directory for summary/steps/curve CSVs");
  add_filter_flags(eval_cmd, evaluate.params, evaluate_resampling);

  cli::ServeOptions serve;
  std::string serve_resampling = "multinomial";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session API");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_option("--idle-timeout", serve.idle_timeout_s, "Session idle timeout (s)")
      ->capture_default_str();
  serve_cmd->add_option("--ui-dir", serve.ui_dir, "Static files served at /");
  add_filter_flags(serve_cmd, serve.params, serve_resampling);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kBadParams;
  }

  if (*replay_cmd) {
    if (!apply_resampling(replay_resampling, replay.params)) return cli::kBadParams;
    return cli::run_replay(replay, std::cout, std::cerr);
  }
  if (*sim_cmd) {
    if (!apply_resampling(simulate_resampling, simulate.params)) return cli::kBadParams;
    if (*u_xy) simulate.user_sigma_xy = user_sigma_xy;
    if (*u_pi) simulate.user_sigma_pi = user_sigma_pi;
    if (*u_rho) simulate.user_rho = user_rho;
    return cli::run_simulate(simulate, std::cout, std::cerr);
  }
  if (*eval_cmd) {
    if (!apply_resampling(evaluate_resampling, evaluate.params)) return cli::kBadParams;
    for (const std::string& arg : log_args) {
      const auto colon = arg.find(':');
      const auto kind = colon == std::string::npos
                            ? std::nullopt
                            : clickcast::sim::parse_task_kind(arg.substr(0, colon));
      if (!kind) {
        std::cerr << "error: invalid parameters: --log expects KIND:PATH, got '" << arg << "'\n";
        return cli::kBadParams;
      }
      evaluate.logs.emplace_back(*kind, arg.substr(colon + 1));
    }
    return cli::run_evaluate(evaluate, std::cout, std::cerr);
  }
  if (!apply_resampling(serve_resampling, serve.params)) return cli::kBadParams;
  return cli::run_serve(serve, std::cout, std::cerr);
}
