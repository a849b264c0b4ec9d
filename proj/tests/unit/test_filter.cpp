#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "clickcast/errors.hpp"
#include "clickcast/filter.hpp"
#include "clickcast/simulator.hpp"

namespace clickcast {
namespace {

MarkSpace grid_space(int n, int colors) {
  std::vector<Mark> marks;
  for (int i = 0; i < n; ++i) {
    marks.push_back({1000 - i, (i % 37 + 0.5) / 37.0, (i / 37 % 37 + 0.5) / 37.0,
                     1 + i % colors});
  }
  return MarkSpace(marks, colors);
}

std::vector<ClickEvent> clicks_on(const MarkSpace& space, std::vector<MarkId> ids) {
  std::vector<ClickEvent> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.push_back(make_click(space, ids[i], static_cast<int>(i) + 1));
  }
  return out;
}

void expect_valid_prediction(const PredictionSet& pred, const MarkSpace& space,
                             std::size_t alpha) {
  ASSERT_EQ(pred.entries.size(), std::min(alpha, space.size()));
  std::set<MarkId> seen;
  for (std::size_t i = 0; i < pred.entries.size(); ++i) {
    const auto& e = pred.entries[i];
    ASSERT_TRUE(space.contains(e.mark_id));
    ASSERT_TRUE(seen.insert(e.mark_id).second);
    ASSERT_GE(e.score, 0.0);
    if (i > 0) {
      const auto& prev = pred.entries[i - 1];
      ASSERT_TRUE(prev.score > e.score || (prev.score == e.score && prev.mark_id < e.mark_id));
    }
  }
}

TEST(FilterParams, Validation) {
  FilterParams p;
  EXPECT_NO_THROW(p.validate());
  p.particles = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.alpha = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.warmup = 0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Init, DrawsValidParticles) {
  const auto space = grid_space(50, 4);
  FilterParams p;
  const auto ps = init_particles(space, p);
  ASSERT_EQ(ps.particles.size(), 1000u);
  EXPECT_EQ(ps.t, 0);
  for (const auto& z : ps.particles) EXPECT_TRUE(is_valid(z, 4));
}

TEST(Init, SameSeedSameParticles) {
  const auto space = grid_space(50, 4);
  FilterParams p;
  p.seed = 99;
  const auto a = init_particles(space, p);
  const auto b = init_particles(space, p);
  EXPECT_EQ(a.particles, b.particles);
  EXPECT_EQ(a.rng, b.rng);
  p.seed = 100;
  EXPECT_NE(init_particles(space, p).particles, a.particles);
}

TEST(Init, UniformPriorMoments) {
  const auto space = grid_space(50, 4);
  FilterParams p;
  p.particles = 1000000;
  const auto ps = init_particles(space, p);
  double pi = 0.0, x = 0.0;
  std::vector<double> k(4, 0.0);
  for (const auto& z : ps.particles) {
    pi += z.pi;
    x += z.x;
    k[z.k - 1] += 1;
  }
  EXPECT_NEAR(pi / 1e6, 0.5, 0.002);
  EXPECT_NEAR(x / 1e6, 0.5, 0.002);
  for (double c : k) EXPECT_NEAR(c / 1e6, 0.25, 0.002);
}

TEST(Resample, ConcentratedWeightCopiesThatParticle) {
  Rng rng(1);
  const std::vector<double> w{0.0, 0.0, 3.5, 0.0, 0.0};
  for (auto scheme : {Resampling::kMultinomial, Resampling::kSystematic}) {
    for (std::size_t i : resample_indices(w, 1000, scheme, rng)) ASSERT_EQ(i, 2u);
  }
  const std::vector<double> first{1.0, 0.0, 0.0};
  for (std::size_t i : resample_indices(first, 500, Resampling::kMultinomial, rng)) {
    ASSERT_EQ(i, 0u);
  }
}

TEST(Resample, NeverPicksZeroWeight) {
  Rng rng(2);
  const std::vector<double> w{0.0, 1e-300, 0.0, 1.0, 0.0};
  for (std::size_t i : resample_indices(w, 100000, Resampling::kMultinomial, rng)) {
    ASSERT_TRUE(i == 1 || i == 3);
  }
}

TEST(Resample, UniformWeightsWithinMultinomialBounds) {
  Rng rng(3);
  const std::size_t m = 8;
  const int reps = 2000;
  const std::vector<double> w(m, 1.0);
  std::vector<double> counts(m, 0.0);
  for (int r = 0; r < reps; ++r) {
    for (std::size_t i : resample_indices(w, m, Resampling::kMultinomial, rng)) counts[i] += 1;
  }
  const double n = double(m) * reps, p = 1.0 / m;
  const double sd = std::sqrt(n * p * (1 - p));
  for (double c : counts) EXPECT_NEAR(c, n * p, 3 * sd);
}

TEST(Resample, RejectsZeroTotal) {
  Rng rng(4);
  const std::vector<double> w{0.0, 0.0};
  EXPECT_THROW(resample_indices(w, 3, Resampling::kMultinomial, rng), Error);
}

TEST(Step, KeepsParticleCountAndAdvancesTime) {
  const auto space = grid_space(200, 3);
  FilterParams p;
  p.particles = 257;
  auto ps = init_particles(space, p);
  const auto clicks = clicks_on(space, {1000, 999, 998, 997});
  for (const auto& c : clicks) {
    const auto info = step(ps, c, space, p);
    EXPECT_FALSE(info.degenerate);
    EXPECT_GT(info.ess, 0.0);
    EXPECT_LE(info.ess, 257.0 + 1e-9);
    ASSERT_EQ(ps.particles.size(), 257u);
    EXPECT_EQ(ps.t, c.t);
    for (const auto& z : ps.particles) ASSERT_TRUE(is_valid(z, 3));
  }
}

TEST(Step, RejectsOutOfSequenceClick) {
  const auto space = grid_space(10, 2);
  FilterParams p;
  auto ps = init_particles(space, p);
  try {
    step(ps, make_click(space, 1000, 2), space, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfSequence);
  }
}

TEST(Step, AllZeroWeightsFallBackToUniformResample) {
  const MarkSpace space({{1, 0.0, 0.0, 1}, {2, 1.0, 1.0, 2}}, 2);
  FilterParams p;
  p.particles = 100;
  p.model = {1e-20, 1e-20, 1e-20, 1.0};
  auto ps = init_particles(space, p);
  for (auto& z : ps.particles) z = {0.5, 0.5, 2, 0.0};
  const auto info = step(ps, make_click(space, 1, 1), space, p);
  EXPECT_TRUE(info.degenerate);
  EXPECT_EQ(info.weight_sum, 0.0);
  EXPECT_EQ(ps.particles.size(), 100u);
  EXPECT_EQ(ps.t, 1);
}

TEST(Predict, SizeIsAlphaOnStudyScaleSpace) {
  const auto space = sim::generate_dataset(1951, 8, 1);
  FilterParams p;
  auto ps = init_particles(space, p);
  const auto clicks = clicks_on(space, {space.mark(0).id, space.mark(1).id, space.mark(2).id});
  for (const auto& c : clicks) step(ps, c, space, p);
  const auto pred = predict(ps, space, p);
  EXPECT_EQ(pred.t, 3);
  expect_valid_prediction(pred, space, 100);
}

TEST(Predict, AlphaLargerThanSpaceRanksEveryMark) {
  const auto space = grid_space(30, 3);
  FilterParams p;
  p.alpha = 500;
  const auto ps = init_particles(space, p);
  expect_valid_prediction(predict(ps, space, p), space, 500);
}

TEST(Predict, ColorOnlyAttentionPredictsThatColorByIdOrder) {
  const auto space = grid_space(60, 3);
  FilterParams p;
  p.particles = 50;
  p.alpha = 20;
  p.model = {0.1, 0.1, 1e-300, 1.0};
  auto ps = init_particles(space, p);
  for (auto& z : ps.particles) z = {0.3, 0.3, 2, 0.0};
  const auto pred = predict(ps, space, p);
  const auto color2 = space.ids_of_color(2);
  std::vector<MarkId> want(color2.begin(), color2.end());
  std::sort(want.begin(), want.end());
  ASSERT_EQ(pred.entries.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(pred.entries[i].mark_id, want[i]);
    EXPECT_EQ(pred.entries[i].score, pred.entries[0].score);
  }
}

TEST(Predict, DoesNotPerturbSessionStream) {
  const auto space = grid_space(100, 3);
  FilterParams p;
  p.particles = 300;
  auto a = init_particles(space, p);
  auto b = a;
  const auto clicks = clicks_on(space, {1000, 990, 980, 970});
  for (const auto& c : clicks) {
    const auto first = predict(a, space, p);
    EXPECT_EQ(predict(a, space, p), first);
    step(a, c, space, p);
    step(b, c, space, p);
    ASSERT_EQ(a.particles, b.particles);
  }
}

TEST(TopAlpha, TiesBreakByMarkId) {
  const MarkSpace space({{30, 0.1, 0.1, 1}, {10, 0.2, 0.2, 1}, {20, 0.3, 0.3, 1}}, 1);
  const std::vector<double> scores{1.0, 1.0, 2.0};
  const auto pred = top_alpha(scores, space, 3, 4);
  ASSERT_EQ(pred.entries.size(), 3u);
  EXPECT_EQ(pred.entries[0].mark_id, 20);
  EXPECT_EQ(pred.entries[1].mark_id, 10);
  EXPECT_EQ(pred.entries[2].mark_id, 30);
  EXPECT_EQ(pred.t, 4);
}

TEST(RunSession, WarmupBoundaryGivesNoRecords) {
  const auto space = grid_space(20, 2);
  FilterParams p;
  const auto result = run_session(space, clicks_on(space, {1000, 999, 998}), p);
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(result.accuracy(), 0.0);
}

TEST(RunSession, RecordsEveryStepFromWarmup) {
  const auto space = grid_space(300, 3);
  FilterParams p;
  p.particles = 200;
  p.alpha = 30;
  std::vector<MarkId> ids;
  for (int i = 0; i < 12; ++i) ids.push_back(1000 - 3 * i);
  const auto clicks = clicks_on(space, ids);
  const auto result = run_session(space, clicks, p);
  ASSERT_EQ(result.records.size(), 9u);
  AttentionTracker tracker(space, p);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    EXPECT_EQ(r.prediction.t, static_cast<int>(i) + 3);
    EXPECT_EQ(r.next_mark_id, clicks[i + 3].mark_id);
    EXPECT_EQ(r.hit, r.prediction.contains(r.next_mark_id));
    expect_valid_prediction(r.prediction, space, 30);
  }
  for (std::size_t i = 0; i < clicks.size(); ++i) {
    tracker.observe(clicks[i].mark_id);
    if (i + 1 >= 3 && i + 1 < clicks.size()) {
      EXPECT_EQ(tracker.prediction(), result.records[i - 2].prediction);
    }
  }
}

TEST(RunSession, Deterministic) {
  const auto space = sim::generate_dataset(500, 5, 3);
  sim::SyntheticTask task;
  task.kind = sim::TaskKind::kGeo;
  task.region = {0.2, 0.2, 0.5, 0.5};
  task.n_clicks = 15;
  const auto session =
      sim::generate_session(space, task, sim::default_user_model(task), 5);
  FilterParams p;
  p.seed = 77;
  const auto a = run_session(space, session.clicks, p);
  const auto b = run_session(space, session.clicks, p);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].prediction, b.records[i].prediction);
  }
}

TEST(SessionResult, AccuracyIsHitRatio) {
  SessionResult r;
  for (int i = 0; i < 20; ++i) r.records.push_back({{}, 0, i != 7});
  EXPECT_EQ(r.hits(), 19u);
  EXPECT_DOUBLE_EQ(r.accuracy(), 0.95);
}

TEST(Tracker, EmptyPredictionWhileWarmingUp) {
  const auto space = grid_space(40, 2);
  FilterParams p;
  p.particles = 100;
  AttentionTracker tracker(space, p);
  EXPECT_TRUE(tracker.warming_up());
  EXPECT_TRUE(tracker.prediction().entries.empty());
  tracker.observe(1000);
  tracker.observe(999);
  EXPECT_TRUE(tracker.prediction().entries.empty());
  tracker.observe(998);
  EXPECT_FALSE(tracker.warming_up());
  EXPECT_EQ(tracker.prediction().entries.size(), 40u);
  EXPECT_THROW(tracker.observe(5), Error);
  EXPECT_EQ(tracker.t(), 3);
}

TEST(ColorMarginal, SumsToOne) {
  const auto space = grid_space(40, 5);
  FilterParams p;
  const auto ps = init_particles(space, p);
  const auto marg = color_marginal(ps, 5);
  double total = 0.0;
  for (double v : marg) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

}  // namespace
}  // namespace clickcast
