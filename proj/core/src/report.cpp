#include "clickcast/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

namespace clickcast::sim {

const KindSummary* EvaluationReport::find(TaskKind kind) const {
  for (const KindSummary& k : kinds) {
    if (k.kind == kind) return &k;
  }
  return nullptr;
}

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

EvaluationReport summarize(std::span<const StepRecord> steps, int warmup, int horizon) {
  EvaluationReport report;
  report.warmup = warmup;
  report.horizon = horizon;
  report.steps.assign(steps.begin(), steps.end());

  const std::size_t curve_len =
      horizon >= warmup ? static_cast<std::size_t>(horizon - warmup + 1) : 0;
  for (TaskKind kind : {TaskKind::kGeo, TaskKind::kType, TaskKind::kMixed}) {
    // session -> (hits, predictions)
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_session;
    std::vector<std::size_t> curve_hits(curve_len, 0), curve_n(curve_len, 0);
    KindSummary summary;
    summary.kind = kind;
    bool seen = false;
    for (const StepRecord& s : steps) {
      if (s.kind != kind) continue;
      seen = true;
      auto& [hits, n] = per_session[s.session_id];
      hits += s.hit ? 1 : 0;
      ++n;
      ++summary.predictions;
      summary.hits += s.hit ? 1 : 0;
      if (s.t >= warmup && s.t <= horizon) {
        const auto slot = static_cast<std::size_t>(s.t - warmup);
        curve_hits[slot] += s.hit ? 1 : 0;
        ++curve_n[slot];
      }
    }
    if (!seen) continue;
    summary.sessions = per_session.size();
    summary.pooled_accuracy =
        static_cast<double>(summary.hits) / static_cast<double>(summary.predictions);
    double sum = 0.0;
    for (const auto& [id, hn] : per_session) {
      sum += static_cast<double>(hn.first) / static_cast<double>(hn.second);
    }
    summary.mean_accuracy = sum / static_cast<double>(per_session.size());
    double sq = 0.0;
    for (const auto& [id, hn] : per_session) {
      const double acc = static_cast<double>(hn.first) / static_cast<double>(hn.second);
      sq += (acc - summary.mean_accuracy) * (acc - summary.mean_accuracy);
    }
    summary.std_accuracy =
        per_session.size() > 1 ? std::sqrt(sq / static_cast<double>(per_session.size() - 1)) : 0.0;
    summary.accuracy_by_t.resize(curve_len);
    for (std::size_t i = 0; i < curve_len; ++i) {
      summary.accuracy_by_t[i] =
          curve_n[i] ? static_cast<double>(curve_hits[i]) / static_cast<double>(curve_n[i])
                     : std::numeric_limits<double>::quiet_NaN();
    }
    report.kinds.push_back(std::move(summary));
  }
  return report;
}

EvaluationReport evaluate(const MarkSpace& space, std::span<const SyntheticSession> sessions,
                          const FilterParams& params, int horizon) {
  std::vector<StepRecord> steps;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    const SessionResult result = run_session(space, sessions[s].clicks, params);
    for (const PredictionRecord& r : result.records) {
      steps.push_back(StepRecord{sessions[s].task.kind, s, r.prediction.t, r.hit});
    }
  }
  return summarize(steps, params.warmup, horizon);
}

void write_steps_csv(std::ostream& out, const EvaluationReport& report) {
  out << "task_kind,session_id,t,hit\n";
  for (const StepRecord& s : report.steps) {
    out << task_kind_name(s.kind) << ',' << s.session_id << ',' << s.t << ',' << (s.hit ? 1 : 0)
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, const EvaluationReport& report) {
  out << "task_kind,mean_accuracy,std_accuracy,pooled_accuracy,sessions,predictions\n";
  for (const KindSummary& k : report.kinds) {
    out << task_kind_name(k.kind) << ',' << format_fixed(k.mean_accuracy, 6) << ','
        << format_fixed(k.std_accuracy, 6) << ',' << format_fixed(k.pooled_accuracy, 6) << ','
        << k.sessions << ',' << k.predictions << '\n';
  }
}

void write_curve_csv(std::ostream& out, const EvaluationReport& report) {
  out << "task_kind,t,accuracy\n";
  for (const KindSummary& k : report.kinds) {
    for (std::size_t i = 0; i < k.accuracy_by_t.size(); ++i) {
      out << task_kind_name(k.kind) << ',' << report.warmup + static_cast<int>(i) << ','
          << format_fixed(k.accuracy_by_t[i], 6) << '\n';
    }
  }
}

}  // namespace clickcast::sim
