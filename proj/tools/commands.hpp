#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clickcast/filter.hpp"
#include "clickcast/simulator.hpp"

namespace clickcast::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadSpec = 2,
  kBadLog = 3,
  kBadParams = 4,
  kIoError = 5,
};

struct ReplayOptions {
  std::string spec_path;
  std::string log_path;
  FilterParams params;
  std::string csv_path;  // empty: no CSV
  bool quiet = false;    // summary only
};

struct SimulateOptions {
  sim::DatasetOptions dataset;
  std::uint64_t dataset_seed = 1;
  // Sessions per task kind, in TaskKind order (geo, type, mixed).
  std::array<int, 3> sessions{10, 10, 10};
  std::uint64_t session_seed = 7;
  FilterParams params;
  // Overrides of the default synthetic user dynamics.
  std::optional<double> user_sigma_xy;
  std::optional<double> user_sigma_pi;
  std::optional<double> user_rho;
  std::string out_dir;  // empty: print only
  bool write_data = false;
};

struct EvaluateOptions {
  std::string spec_path;
  // (task kind, log path)
  std::vector<std::pair<sim::TaskKind, std::string>> logs;
  FilterParams params;
  std::string out_dir;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  int idle_timeout_s = 1800;
  std::string ui_dir;
  FilterParams params;
};

int run_replay(const ReplayOptions& options, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);
int run_serve(const ServeOptions& options, std::ostream& out, std::ostream& err);

// Builds the synthetic sessions used by `simulate`.
std::vector<sim::SyntheticSession> simulate_sessions(const MarkSpace& space,
                                                     const SimulateOptions& options);

}  // namespace clickcast::cli
