#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clickcast/markspace.hpp"
#include "clickcast/model.hpp"
#include "clickcast/rng.hpp"

namespace clickcast {

enum class Resampling {
  kMultinomial,  // i.i.d. draws with replacement (default)
  kSystematic,
};

struct FilterParams {
  std::size_t particles = 1000;
  std::size_t alpha = 100;
  ModelParams model;
  std::uint64_t seed = 0;
  // First time index (clicks observed) at which predictions are emitted.
  int warmup = 3;
  Resampling resampling = Resampling::kMultinomial;

  // Throws Error(kInvalidParams).
  void validate() const;
};

// Posterior sample over attention after t clicks, plus the session stream.
struct ParticleSet {
  std::vector<AttentionState> particles;
  int t = 0;
  Rng rng;
};

struct StepInfo {
  // All weights were zero; the step fell back to a uniform resample.
  bool degenerate = false;
  double weight_sum = 0.0;
  // Effective sample size of the normalized weights, before resampling.
  double ess = 0.0;
};

struct PredictionEntry {
  MarkId mark_id = 0;
  double score = 0.0;

  bool operator==(const PredictionEntry&) const = default;
};

// Ranked candidates for the click at t + 1, given clicks 1..t. Entries are
// ordered by score descending, then mark id ascending.
struct PredictionSet {
  int t = 0;
  std::vector<PredictionEntry> entries;

  bool contains(MarkId id) const;
  bool operator==(const PredictionSet&) const = default;
};

// Draws params.particles states from the uniform prior over the latent space.
ParticleSet init_particles(const MarkSpace& space, const FilterParams& params);

// Propagate, weight by the click, resample. Requires click.t == ps.t + 1
// (throws Error(kOutOfSequence) otherwise).
StepInfo step(ParticleSet& ps, const ClickEvent& click, const MarkSpace& space,
              const FilterParams& params);

// Indices of `count` particles resampled in proportion to `weights`. The
// weights must be non-negative with a positive sum.
std::vector<std::size_t> resample_indices(std::span<const double> weights,
                                          std::size_t count, Resampling scheme,
                                          Rng& rng);

// Top-min(alpha, |marks|) entries of `scores` (indexed like space.marks()).
PredictionSet top_alpha(std::span<const double> scores, const MarkSpace& space,
                        std::size_t alpha, int t);

// Scores every mark against the particles advanced one sampled transition.
// The transition draws come from a stream derived from (params.seed, ps.t),
// so the session stream is untouched and repeated calls agree.
PredictionSet predict(const ParticleSet& ps, const MarkSpace& space,
                      const FilterParams& params);

// Fraction of particles per color, indexed c - 1.
std::vector<double> color_marginal(const ParticleSet& ps, int color_count);

// Single-session filter: owns the particle set and the click history.
class AttentionTracker {
 public:
  // Validates params against the space and draws the prior.
  AttentionTracker(const MarkSpace& space, FilterParams params);

  // Applies the next click on `mark_id` (t is assigned as t() + 1).
  StepInfo observe(MarkId mark_id);
  StepInfo observe(const ClickEvent& click);

  // Prediction for the next click; empty (no entries) while t() < warmup.
  PredictionSet prediction() const;
  bool warming_up() const { return particles_.t < params_.warmup; }

  int t() const { return particles_.t; }
  const ParticleSet& particles() const { return particles_; }
  const FilterParams& params() const { return params_; }
  const MarkSpace& space() const { return *space_; }
  std::span<const int> degenerate_steps() const { return degenerate_steps_; }

 private:
  const MarkSpace* space_;
  FilterParams params_;
  ParticleSet particles_;
  std::vector<int> degenerate_steps_;
};

struct PredictionRecord {
  PredictionSet prediction;
  MarkId next_mark_id = 0;
  bool hit = false;
};

struct SessionResult {
  std::vector<PredictionRecord> records;
  std::vector<int> degenerate_steps;

  std::size_t hits() const;
  // hits / predictions; 0 when no prediction was evaluated.
  double accuracy() const;
};

// Replays `clicks`, emitting a prediction after each t in [warmup, n-1] and
// scoring it against click t+1.
SessionResult run_session(const MarkSpace& space,
                          std::span<const ClickEvent> clicks,
                          const FilterParams& params);

}  // namespace clickcast
