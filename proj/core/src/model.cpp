#include "clickcast/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "clickcast/errors.hpp"

namespace clickcast {

bool is_valid(const AttentionState& s, int color_count) {
  return s.x >= 0.0 && s.x <= 1.0 && s.y >= 0.0 && s.y <= 1.0 && s.pi >= 0.0 &&
         s.pi <= 1.0 && s.k >= 1 && s.k <= color_count;
}

void ModelParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(sigma_x) || !positive(sigma_y) || !positive(sigma_pi)) {
    throw Error(ErrorCode::kInvalidParams, "drift scales sigma_x, sigma_y, sigma_pi must be > 0");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "rho must lie in [0, 1]");
  }
}

void ModelParams::validate_for(int color_count) const {
  validate();
  if (color_count < 2 && rho < 1.0) {
    throw Error(ErrorCode::kInvalidConfiguration,
                "rho < 1 needs at least two colors, got " + std::to_string(color_count));
  }
}

AttentionState transition_sample(const AttentionState& state, const ModelParams& params,
                                 int color_count, Rng& rng) {
  AttentionState next;
  next.x = std::clamp(state.x + params.sigma_x * rng.normal(), 0.0, 1.0);
  next.y = std::clamp(state.y + params.sigma_y * rng.normal(), 0.0, 1.0);
  next.pi = std::clamp(state.pi + params.sigma_pi * rng.normal(), 0.0, 1.0);
  next.k = state.k;
  if (color_count >= 2 && rng.uniform() >= params.rho) {
    // Uniform over the K - 1 other colors.
    int other = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(color_count - 1)));
    if (other >= state.k) ++other;
    next.k = other;
  }
  return next;
}

std::vector<double> transition_color_pmf(int k_from, const ModelParams& params, int color_count) {
  if (color_count < 1 || k_from < 1 || k_from > color_count) {
    throw Error(ErrorCode::kInvalidParams, "k_from outside 1..K");
  }
  if (color_count < 2) {
    if (params.rho < 1.0) {
      throw Error(ErrorCode::kInvalidConfiguration, "rho < 1 needs at least two colors");
    }
    return {1.0};
  }
  const auto from = static_cast<std::size_t>(k_from - 1);
  std::vector<double> pmf(static_cast<std::size_t>(color_count), 0.0);
  if (params.rho == 1.0) {
    pmf[from] = 1.0;
    return pmf;
  }
  // Snap the switch mass to a multiple of 2^-52. Every partial sum of such
  // values in [0, 1] is representable, so the vector sums to exactly 1 in any
  // order.
  const double raw = (1.0 - params.rho) / static_cast<double>(color_count - 1);
  const double other = std::ldexp(std::floor(std::ldexp(raw, 52)), -52);
  for (std::size_t c = 0; c < pmf.size(); ++c) {
    if (c != from) pmf[c] = other;
  }
  pmf[from] = 1.0 - other * static_cast<double>(color_count - 1);
  return pmf;
}

double normal_pdf(double value, double mean, double sigma) {
  const double z = (value - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double observation_likelihood(const ClickEvent& click, const AttentionState& state,
                              const ModelParams& params, const MarkSpace& space) {
  const double positional =
      normal_pdf(click.x, state.x, params.sigma_x) * normal_pdf(click.y, state.y, params.sigma_y);
  double categorical = 0.0;
  if (click.color == state.k) {
    const std::size_t n = space.color_size(state.k);
    if (n > 0) categorical = 1.0 / static_cast<double>(n);
  }
  return state.pi * positional + (1.0 - state.pi) * categorical;
}

std::vector<double> score_candidates(const MarkSpace& space, std::span<const AttentionState> states,
                                     const ModelParams& params) {
  const std::size_t n_states = states.size();
  std::vector<double> sx, sy, spi;
  sx.reserve(n_states);
  sy.reserve(n_states);
  spi.reserve(n_states);
  std::vector<double> color_mass(static_cast<std::size_t>(space.color_count()), 0.0);
  for (const AttentionState& s : states) {
    if (s.pi > 0.0) {
      sx.push_back(s.x);
      sy.push_back(s.y);
      spi.push_back(s.pi);
    }
    if (s.k >= 1 && s.k <= space.color_count()) {
      color_mass[static_cast<std::size_t>(s.k - 1)] += 1.0 - s.pi;
    }
  }
  std::vector<double> color_term(color_mass.size(), 0.0);
  for (std::size_t c = 0; c < color_mass.size(); ++c) {
    const std::size_t n = space.color_size(static_cast<int>(c) + 1);
    if (n > 0) color_term[c] = color_mass[c] / static_cast<double>(n);
  }

  const double ax = 0.5 / (params.sigma_x * params.sigma_x);
  const double ay = 0.5 / (params.sigma_y * params.sigma_y);
  const double norm = 1.0 / (2.0 * std::numbers::pi * params.sigma_x * params.sigma_y);
  const std::size_t n_active = spi.size();

  std::vector<double> scores(space.size());
  for (std::size_t j = 0; j < space.size(); ++j) {
    const Mark& m = space.mark(j);
    double positional = 0.0;
    for (std::size_t i = 0; i < n_active; ++i) {
      const double dx = m.x - sx[i];
      const double dy = m.y - sy[i];
      positional += spi[i] * std::exp(-(ax * dx * dx + ay * dy * dy));
    }
    scores[j] = norm * positional + color_term[static_cast<std::size_t>(m.color - 1)];
  }
  return scores;
}

}  // namespace clickcast
