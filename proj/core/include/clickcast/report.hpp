#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "clickcast/filter.hpp"
#include "clickcast/markspace.hpp"
#include "clickcast/simulator.hpp"

namespace clickcast::sim {

// One scored prediction, flattened for reporting.
struct StepRecord {
  TaskKind kind = TaskKind::kGeo;
  std::size_t session_id = 0;
  int t = 0;
  bool hit = false;
};

struct KindSummary {
  TaskKind kind = TaskKind::kGeo;
  std::size_t sessions = 0;
  std::size_t predictions = 0;
  std::size_t hits = 0;
  // Pooled: total hits / total predictions.
  double pooled_accuracy = 0.0;
  // Mean and sample standard deviation of per-session accuracy, over
  // sessions with at least one prediction.
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  // Accuracy at t = warmup..horizon; NaN where no session reached t.
  std::vector<double> accuracy_by_t;
};

struct EvaluationReport {
  int warmup = 3;
  int horizon = 20;
  std::vector<StepRecord> steps;
  std::vector<KindSummary> kinds;  // only kinds that occur, in enum order

  const KindSummary* find(TaskKind kind) const;
};

inline constexpr int kAccuracyHorizon = 20;

// Pure fold over step records.
EvaluationReport summarize(std::span<const StepRecord> steps, int warmup,
                           int horizon = kAccuracyHorizon);

// Runs the filter over every session and summarizes.
EvaluationReport evaluate(const MarkSpace& space,
                          std::span<const SyntheticSession> sessions,
                          const FilterParams& params,
                          int horizon = kAccuracyHorizon);

// Step CSV: task_kind,session_id,t,hit
void write_steps_csv(std::ostream& out, const EvaluationReport& report);
// Summary CSV: task_kind,mean_accuracy,std_accuracy,pooled_accuracy,
// sessions,predictions
void write_summary_csv(std::ostream& out, const EvaluationReport& report);
// Accuracy over time CSV: task_kind,t,accuracy
void write_curve_csv(std::ostream& out, const EvaluationReport& report);

std::string format_fixed(double value, int decimals = 4);

}  // namespace clickcast::sim
