#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "clickcast/errors.hpp"
#include "clickcast/report.hpp"
#include "clickcast/service.hpp"

namespace clickcast::cli {

namespace fs = std::filesystem;

namespace {

std::string score_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Loads a spec, reporting failures with the spec exit code.
std::optional<MarkSpace> read_spec(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open spec '" << path << "'\n";
    return std::nullopt;
  }
  try {
    return load_markspace(in);
  } catch (const Error& e) {
    err << "error: bad spec '" << path << "': " << e.what() << '\n';
    return std::nullopt;
  }
}

std::optional<std::vector<ClickEvent>> read_log(const std::string& path, const MarkSpace& space,
                                                std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open log '" << path << "'\n";
    return std::nullopt;
  }
  try {
    return load_clicklog(in, space);
  } catch (const Error& e) {
    err << "error: bad log '" << path << "': " << e.what() << '\n';
    return std::nullopt;
  }
}

bool check_params(const FilterParams& params, std::ostream& err) {
  try {
    params.validate();
    return true;
  } catch (const Error& e) {
    err << "error: invalid parameters: " << e.what() << '\n';
    return false;
  }
}

void print_summary(std::ostream& out, const sim::EvaluationReport& report) {
  out << "task_kind  sessions  predictions  pooled_accuracy  mean_accuracy  std_accuracy\n";
  for (const sim::KindSummary& k : report.kinds) {
    char line[160];
    std::snprintf(line, sizeof line, "%-9s  %8zu  %11zu  %15s  %13s  %12s\n",
                  std::string(sim::task_kind_name(k.kind)).c_str(), k.sessions, k.predictions,
                  sim::format_fixed(k.pooled_accuracy).c_str(),
                  sim::format_fixed(k.mean_accuracy).c_str(),
                  sim::format_fixed(k.std_accuracy).c_str());
    out << line;
  }
}

int write_reports(const std::string& dir, const sim::EvaluationReport& report, std::ostream& err) {
  if (dir.empty()) return kOk;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::pair<const char*, void (*)(std::ostream&, const sim::EvaluationReport&)> files[] = {
      {"summary.csv", sim::write_summary_csv},
      {"steps.csv", sim::write_steps_csv},
      {"curve.csv", sim::write_curve_csv},
  };
  for (const auto& [name, writer] : files) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << (fs::path(dir) / name).string() << '\n';
      return kIoError;
    }
    writer(f, report);
  }
  return kOk;
}

}  // namespace

int run_replay(const ReplayOptions& options, std::ostream& out, std::ostream& err) {
  if (!check_params(options.params, err)) return kBadParams;
  auto space = read_spec(options.spec_path, err);
  if (!space) return kBadSpec;
  try {
    options.params.model.validate_for(space->color_count());
  } catch (const Error& e) {
    err << "error: invalid parameters: " << e.what() << '\n';
    return kBadParams;
  }
  auto clicks = read_log(options.log_path, *space, err);
  if (!clicks) return kBadLog;

  const SessionResult result = run_session(*space, *clicks, options.params);

  if (!options.quiet) {
    for (const PredictionRecord& r : result.records) {
      out << "t=" << r.prediction.t << " next=" << r.next_mark_id << ' '
          << (r.hit ? "hit" : "miss") << '\n';
    }
  }
  out << "clicks: " << clicks->size() << '\n';
  out << "predictions: " << result.records.size() << '\n';
  if (result.records.empty()) {
    out << "no predictions evaluated (need more than warmup=" << options.params.warmup
        << " clicks)\n";
  } else {
    out << "hits: " << result.hits() << '\n';
    out << "accuracy: " << sim::format_fixed(result.accuracy()) << '\n';
  }
  if (!result.degenerate_steps.empty()) {
    out << "degenerate steps:";
    for (int t : result.degenerate_steps) out << ' ' << t;
    out << '\n';
  }

  if (!options.csv_path.empty()) {
    std::ofstream csv(options.csv_path, std::ios::binary);
    if (!csv) {
      err << "error: cannot write '" << options.csv_path << "'\n";
      return kIoError;
    }
    csv << "t,next_mark_id,hit,set_size,top_mark_id,top_score\n";
    for (const PredictionRecord& r : result.records) {
      const auto& e = r.prediction.entries;
      csv << r.prediction.t << ',' << r.next_mark_id << ',' << (r.hit ? 1 : 0) << ',' << e.size()
          << ',' << (e.empty() ? 0 : e.front().mark_id) << ','
          << (e.empty() ? std::string("0") : score_text(e.front().score)) << '\n';
    }
  }
  return kOk;
}

std::vector<sim::SyntheticSession> simulate_sessions(const MarkSpace& space,
                                                     const SimulateOptions& options) {
  std::vector<sim::SyntheticSession> sessions;
  std::uint64_t index = 0;
  for (sim::TaskKind kind : {sim::TaskKind::kGeo, sim::TaskKind::kType, sim::TaskKind::kMixed}) {
    for (int i = 0; i < options.sessions[static_cast<std::size_t>(kind)]; ++i, ++index) {
      Rng task_rng = Rng::derive(options.session_seed, 2 * index);
      const sim::SyntheticTask task = sim::make_task(space, kind, task_rng);
      ModelParams user = sim::default_user_model(task);
      if (options.user_sigma_xy) user.sigma_x = user.sigma_y = *options.user_sigma_xy;
      if (options.user_sigma_pi) user.sigma_pi = *options.user_sigma_pi;
      if (options.user_rho) user.rho = *options.user_rho;
      sessions.push_back(sim::generate_session(
          space, task, user, mix_seed(options.session_seed ^ mix_seed(2 * index + 1))));
    }
  }
  return sessions;
}

int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  if (!check_params(options.params, err)) return kBadParams;
  for (int n : options.sessions) {
    if (n < 0) {
      err << "error: invalid parameters: session counts must be >= 0\n";
      return kBadParams;
    }
  }
  std::optional<MarkSpace> space;
  std::vector<sim::SyntheticSession> sessions;
  try {
    space.emplace(sim::generate_dataset(options.dataset, options.dataset_seed));
    options.params.model.validate_for(space->color_count());
    sessions = simulate_sessions(*space, options);
  } catch (const Error& e) {
    err << "error: invalid parameters: " << e.what() << '\n';
    return kBadParams;
  }
  if (sessions.empty()) {
    err << "error: invalid parameters: no sessions requested\n";
    return kBadParams;
  }

  const sim::EvaluationReport report = sim::evaluate(*space, sessions, options.params);
  out << "dataset: " << space->size() << " marks, " << space->color_count() << " colors\n";
  print_summary(out, report);

  if (int rc = write_reports(options.out_dir, report, err); rc != kOk) return rc;
  if (options.write_data && !options.out_dir.empty()) {
    const fs::path dir(options.out_dir);
    std::ofstream spec(dir / "dataset.json", std::ios::binary);
    save_markspace(spec, *space);
    fs::create_directories(dir / "logs");
    for (std::size_t s = 0; s < sessions.size(); ++s) {
      const std::string name = std::string(sim::task_kind_name(sessions[s].task.kind)) + "_" +
                               std::to_string(s) + ".jsonl";
      std::ofstream log(dir / "logs" / name, std::ios::binary);
      save_clicklog(log, sessions[s].clicks);
    }
    if (!spec) {
      err << "error: cannot write dataset under " << options.out_dir << '\n';
      return kIoError;
    }
  }
  return kOk;
}

int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
  if (!check_params(options.params, err)) return kBadParams;
  auto space = read_spec(options.spec_path, err);
  if (!space) return kBadSpec;
  try {
    options.params.model.validate_for(space->color_count());
  } catch (const Error& e) {
    err << "error: invalid parameters: " << e.what() << '\n';
    return kBadParams;
  }
  if (options.logs.empty()) {
    err << "error: no logs given\n";
    return kBadLog;
  }
  std::vector<sim::SyntheticSession> sessions;
  for (const auto& [kind, path] : options.logs) {
    auto clicks = read_log(path, *space, err);
    if (!clicks) return kBadLog;
    sim::SyntheticSession s;
    s.task.kind = kind;
    s.task.n_clicks = static_cast<int>(clicks->size());
    s.clicks = std::move(*clicks);
    sessions.push_back(std::move(s));
  }
  const sim::EvaluationReport report = sim::evaluate(*space, sessions, options.params);
  print_summary(out, report);
  return write_reports(options.out_dir, report, err);
}

int run_serve(const ServeOptions& options, std::ostream& out, std::ostream& err) {
  if (!check_params(options.params, err)) return kBadParams;
  service::ServiceConfig config;
  config.idle_timeout = std::chrono::seconds(options.idle_timeout_s);
  config.default_params = options.params;
  service::HttpServer server(config);
  if (!options.ui_dir.empty() && !server.mount_static(options.ui_dir)) {
    err << "error: cannot serve static files from '" << options.ui_dir << "'\n";
    return kBadParams;
  }
  out << "listening on http://" << options.host << ':' << options.port << std::endl;
  if (!server.listen(options.host, options.port)) {
    err << "error: cannot listen on " << options.host << ':' << options.port << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace clickcast::cli
