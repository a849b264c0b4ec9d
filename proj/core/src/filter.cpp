#include "clickcast/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clickcast/errors.hpp"

namespace clickcast {

namespace {

// Stream tag for the prediction-time transition draws.
constexpr std::uint64_t kPredictStream = 0x7072656469637400ULL;

}  // namespace

void FilterParams::validate() const {
  if (particles < 1) throw Error(ErrorCode::kInvalidParams, "particle count must be >= 1");
  if (alpha < 1) throw Error(ErrorCode::kInvalidParams, "alpha must be >= 1");
  if (warmup < 1) throw Error(ErrorCode::kInvalidParams, "warmup must be >= 1");
  model.validate();
}

bool PredictionSet::contains(MarkId id) const {
  return std::any_of(entries.begin(), entries.end(),
                     [id](const PredictionEntry& e) { return e.mark_id == id; });
}

ParticleSet init_particles(const MarkSpace& space, const FilterParams& params) {
  ParticleSet ps;
  ps.t = 0;
  ps.rng = Rng(params.seed);
  ps.particles.resize(params.particles);
  const auto colors = static_cast<std::size_t>(space.color_count());
  for (AttentionState& p : ps.particles) {
    p.x = ps.rng.uniform();
    p.y = ps.rng.uniform();
    p.k = 1 + static_cast<int>(ps.rng.uniform_index(colors));
    p.pi = ps.rng.uniform();
  }
  return ps;
}

std::vector<std::size_t> resample_indices(std::span<const double> weights, std::size_t count,
                                          Resampling scheme, Rng& rng) {
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.empty() ? 0.0 : cumulative.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kInvalidParams, "resampling weights must have a positive finite sum");
  }
  // Guard the last bin against draws landing on total after rounding.
  auto pick = [&](double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto index = static_cast<std::size_t>(it - cumulative.begin());
    index = std::min(index, cumulative.size() - 1);
    while (weights[index] == 0.0 && index > 0) --index;
    return index;
  };

  std::vector<std::size_t> indices(count);
  switch (scheme) {
    case Resampling::kMultinomial:
      for (std::size_t i = 0; i < count; ++i) indices[i] = pick(rng.uniform() * total);
      break;
    case Resampling::kSystematic: {
      const double stride = total / static_cast<double>(count);
      const double offset = rng.uniform() * stride;
      for (std::size_t i = 0; i < count; ++i) {
        indices[i] = pick(offset + stride * static_cast<double>(i));
      }
      break;
    }
  }
  return indices;
}

StepInfo step(ParticleSet& ps, const ClickEvent& click, const MarkSpace& space,
              const FilterParams& params) {
  if (click.t != ps.t + 1) {
    throw Error(ErrorCode::kOutOfSequence, "click t=" + std::to_string(click.t) +
                                               " does not follow t=" + std::to_string(ps.t));
  }
  const int colors = space.color_count();
  const std::size_t m = ps.particles.size();

  for (AttentionState& p : ps.particles) {
    p = transition_sample(p, params.model, colors, ps.rng);
  }

  std::vector<double> weights(m);
  double total = 0.0;
  double total_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    weights[i] = observation_likelihood(click, ps.particles[i], params.model, space);
    total += weights[i];
    total_sq += weights[i] * weights[i];
  }

  StepInfo info;
  info.weight_sum = total;
  std::vector<AttentionState> next(m);
  if (total > 0.0 && std::isfinite(total)) {
    info.ess = total * total / total_sq;
    const auto indices = resample_indices(weights, m, params.resampling, ps.rng);
    for (std::size_t i = 0; i < m; ++i) next[i] = ps.particles[indices[i]];
  } else {
    // No particle explains the click. Keep the filter alive with a uniform
    // resample of the propagated cloud.
    info.degenerate = true;
    for (std::size_t i = 0; i < m; ++i) next[i] = ps.particles[ps.rng.uniform_index(m)];
  }
  ps.particles = std::move(next);
  ps.t = click.t;
  return info;
}

PredictionSet top_alpha(std::span<const double> scores, const MarkSpace& space,
                        std::size_t alpha, int t) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t keep = std::min(alpha, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return space.mark(a).id < space.mark(b).id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    better);
  PredictionSet out;
  out.t = t;
  out.entries.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.entries.push_back({space.mark(order[i]).id, scores[order[i]]});
  }
  return out;
}

PredictionSet predict(const ParticleSet& ps, const MarkSpace& space, const FilterParams& params) {
  Rng fork = Rng::derive(params.seed ^ kPredictStream, static_cast<std::uint64_t>(ps.t));
  std::vector<AttentionState> advanced;
  advanced.reserve(ps.particles.size());
  for (const AttentionState& p : ps.particles) {
    advanced.push_back(transition_sample(p, params.model, space.color_count(), fork));
  }
  const auto scores = score_candidates(space, advanced, params.model);
  return top_alpha(scores, space, params.alpha, ps.t);
}

std::vector<double> color_marginal(const ParticleSet& ps, int color_count) {
  std::vector<double> marginal(static_cast<std::size_t>(color_count), 0.0);
  if (ps.particles.empty()) return marginal;
  for (const AttentionState& p : ps.particles) marginal[static_cast<std::size_t>(p.k - 1)] += 1.0;
  for (double& v : marginal) v /= static_cast<double>(ps.particles.size());
  return marginal;
}

AttentionTracker::AttentionTracker(const MarkSpace& space, FilterParams params)
    : space_(&space), params_(params) {
  params_.validate();
  params_.model.validate_for(space.color_count());
  particles_ = init_particles(space, params_);
}

StepInfo AttentionTracker::observe(MarkId mark_id) {
  return observe(make_click(*space_, mark_id, particles_.t + 1));
}

StepInfo AttentionTracker::observe(const ClickEvent& click) {
  StepInfo info = step(particles_, click, *space_, params_);
  if (info.degenerate) degenerate_steps_.push_back(click.t);
  return info;
}

PredictionSet AttentionTracker::prediction() const {
  if (warming_up()) return PredictionSet{particles_.t, {}};
  return predict(particles_, *space_, params_);
}

std::size_t SessionResult::hits() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const PredictionRecord& r) { return r.hit; }));
}

double SessionResult::accuracy() const {
  if (records.empty()) return 0.0;
  return static_cast<double>(hits()) / static_cast<double>(records.size());
}

SessionResult run_session(const MarkSpace& space, std::span<const ClickEvent> clicks,
                          const FilterParams& params) {
  AttentionTracker tracker(space, params);
  SessionResult result;
  for (std::size_t i = 0; i < clicks.size(); ++i) {
    tracker.observe(clicks[i]);
    const bool has_next = i + 1 < clicks.size();
    if (!has_next || tracker.warming_up()) continue;
    PredictionRecord record;
    record.prediction = tracker.prediction();
    record.next_mark_id = clicks[i + 1].mark_id;
    record.hit = record.prediction.contains(record.next_mark_id);
    result.records.push_back(std::move(record));
  }
  const auto degenerate = tracker.degenerate_steps();
  result.degenerate_steps.assign(degenerate.begin(), degenerate.end());
  return result;
}

}  // namespace clickcast
