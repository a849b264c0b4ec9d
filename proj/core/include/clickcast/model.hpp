#pragma once

#include <span>
#include <vector>

#include "clickcast/markspace.hpp"
#include "clickcast/rng.hpp"

namespace clickcast {

// One point in the latent attention space: a location of interest (x, y),
// a color of interest k, and the location-vs-color bias pi (1 = location
// only, 0 = color only).
struct AttentionState {
  double x = 0.5;
  double y = 0.5;
  int k = 1;
  double pi = 0.5;

  bool operator==(const AttentionState&) const = default;
};

bool is_valid(const AttentionState& state, int color_count);

// Drift scales are fractions of the canvas width/height (positions live on
// the unit square). rho is the probability the color of interest persists.
struct ModelParams {
  double sigma_x = 0.1;
  double sigma_y = 0.1;
  double sigma_pi = 0.45;
  double rho = 0.96;

  // Throws Error(kInvalidParams).
  void validate() const;
  // Additionally rejects color_count < 2 with rho < 1: there is no other
  // color to move to. Throws Error(kInvalidConfiguration).
  void validate_for(int color_count) const;

  bool operator==(const ModelParams&) const = default;
};

// Samples z_{t+1} ~ p(. | z_t): independent Gaussian drift on x, y and pi,
// each clamped back onto its closed domain, and a biased-coin move of k
// (keep with probability rho, else uniform over the other colors). With a
// single color, k is kept.
AttentionState transition_sample(const AttentionState& state,
                                 const ModelParams& params, int color_count,
                                 Rng& rng);

// p(k_{t+1} = c | k_t = k_from) for c = 1..K, returned as a vector indexed
// c - 1.
std::vector<double> transition_color_pmf(int k_from, const ModelParams& params,
                                         int color_count);

// 1-D normal density N(value; mean, sigma^2).
double normal_pdf(double value, double mean, double sigma);

// Unnormalized click weight
//   pi * N(x'; x, sx^2) N(y'; y, sy^2) + (1 - pi) * U(k'; k)
// where U(k'; k) = 1 / |marks of color k| when k' == k and 0 otherwise
// (also 0 when color k has no marks).
double observation_likelihood(const ClickEvent& click,
                              const AttentionState& state,
                              const ModelParams& params,
                              const MarkSpace& space);

// For every mark (in space order), the sum over states of the observation
// weight of a click on that mark. The color term is aggregated per color so
// a pass costs one exp() per (mark, state) pair. Summation order is fixed,
// so the result does not depend on scheduling.
std::vector<double> score_candidates(const MarkSpace& space,
                                     std::span<const AttentionState> states,
                                     const ModelParams& params);

}  // namespace clickcast
