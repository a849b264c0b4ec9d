#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clickcast/filter.hpp"
#include "clickcast/markspace.hpp"
#include "clickcast/model.hpp"

// Exact forward-algorithm inference on a discretized attention space. Slow
// and only meant as a reference for validating the particle filter.
namespace clickcast::oracle {

inline constexpr std::size_t kMaxGridStates = 1'000'000;

struct GridSpec {
  int nx = 20;
  int ny = 20;
  int npi = 5;
  int colors = 2;

  std::size_t state_count() const;
  // Throws Error(kInvalidParams) for resolutions below 2 and
  // Error(kGridTooLarge) above kMaxGridStates.
  void validate() const;
};

// Probability table over grid states. Cell i of an axis with n cells covers
// [i/n, (i+1)/n] and is represented by its center.
class PosteriorTable {
 public:
  explicit PosteriorTable(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::size_t index(int ix, int iy, int ipi, int k) const {
    return ((static_cast<std::size_t>(k - 1) * grid_.npi + ipi) * grid_.ny +
            iy) * grid_.nx + ix;
  }
  double& at(int ix, int iy, int ipi, int k) { return values_[index(ix, iy, ipi, k)]; }
  double at(int ix, int iy, int ipi, int k) const {
    return values_[index(ix, iy, ipi, k)];
  }

  AttentionState state(int ix, int iy, int ipi, int k) const;

  double sum() const;
  void normalize();
  // Indexed c - 1.
  std::vector<double> color_marginal() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

double cell_center(int index, int cells);

// Row-stochastic kernel P(dest cell | source cell center) for Gaussian drift
// clamped to [0, 1]: interior cells integrate the Gaussian over the cell;
// the edge cells also collect all mass beyond the boundary. Row-major n x n.
std::vector<double> drift_kernel(int cells, double sigma);

// One application of the transition kernel.
PosteriorTable propagate(const PosteriorTable& table, const ModelParams& model);

// Tables for t = 0 (uniform prior) through t = clicks.size().
std::vector<PosteriorTable> exact_posterior(const MarkSpace& space,
                                            std::span<const ClickEvent> clicks,
                                            const ModelParams& model,
                                            const GridSpec& grid);

// Expected observation weight of each mark (space order) under the table
// pushed one step through the transition kernel.
std::vector<double> expected_scores(const PosteriorTable& table,
                                    const MarkSpace& space,
                                    const ModelParams& model);

PredictionSet exact_prediction(const PosteriorTable& table,
                               const MarkSpace& space, const ModelParams& model,
                               std::size_t alpha, int t);

}  // namespace clickcast::oracle
