#include "clickcast/oracle.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "clickcast/errors.hpp"

namespace clickcast::oracle {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Applies a row-stochastic n x n kernel along one axis of the table.
// `stride` is the distance between consecutive cells on that axis and
// `cells` its length.
void apply_axis(std::span<const double> in, std::span<double> out, std::span<const double> kernel,
                std::size_t cells, std::size_t stride) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t block = cells * stride;
  for (std::size_t base = 0; base < in.size(); base += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      for (std::size_t src = 0; src < cells; ++src) {
        const double mass = in[base + src * stride + inner];
        if (mass == 0.0) continue;
        const double* row = kernel.data() + src * cells;
        for (std::size_t dst = 0; dst < cells; ++dst) {
          out[base + dst * stride + inner] += mass * row[dst];
        }
      }
    }
  }
}

}  // namespace

std::size_t GridSpec::state_count() const {
  if (nx < 1 || ny < 1 || npi < 1 || colors < 1) return 0;
  return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
         static_cast<std::size_t>(npi) * static_cast<std::size_t>(colors);
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2 || npi < 2 || colors < 1) {
    throw Error(ErrorCode::kInvalidParams, "grid needs nx, ny, npi >= 2 and colors >= 1");
  }
  if (state_count() > kMaxGridStates) {
    throw Error(ErrorCode::kGridTooLarge,
                "grid has " + std::to_string(state_count()) + " states, limit is " +
                    std::to_string(kMaxGridStates));
  }
}

PosteriorTable::PosteriorTable(const GridSpec& grid) : grid_(grid), values_(grid.state_count(), 0.0) {}

double cell_center(int index, int cells) {
  return (static_cast<double>(index) + 0.5) / static_cast<double>(cells);
}

AttentionState PosteriorTable::state(int ix, int iy, int ipi, int k) const {
  return AttentionState{cell_center(ix, grid_.nx), cell_center(iy, grid_.ny), k,
                        cell_center(ipi, grid_.npi)};
}

double PosteriorTable::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

void PosteriorTable::normalize() {
  const double total = sum();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidConfiguration, "posterior has zero mass");
  }
  for (double& v : values_) v /= total;
}

std::vector<double> PosteriorTable::color_marginal() const {
  std::vector<double> marginal(static_cast<std::size_t>(grid_.colors), 0.0);
  const std::size_t per_color = values_.size() / marginal.size();
  for (std::size_t c = 0; c < marginal.size(); ++c) {
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(c * per_color);
    marginal[c] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(per_color), 0.0);
  }
  return marginal;
}

std::vector<double> drift_kernel(int cells, double sigma) {
  const auto n = static_cast<std::size_t>(cells);
  std::vector<double> kernel(n * n);
  for (std::size_t src = 0; src < n; ++src) {
    const double center = cell_center(static_cast<int>(src), cells);
    // CDF at every interior cell edge; the outer edges are -inf / +inf so
    // the clamped tails land in the edge cells.
    double below = 0.0;
    for (std::size_t dst = 0; dst < n; ++dst) {
      const double upper_edge = static_cast<double>(dst + 1) / static_cast<double>(cells);
      const double upper = dst + 1 == n ? 1.0 : normal_cdf((upper_edge - center) / sigma);
      kernel[src * n + dst] = upper - below;
      below = upper;
    }
  }
  return kernel;
}

PosteriorTable propagate(const PosteriorTable& table, const ModelParams& model) {
  const GridSpec& g = table.grid();
  const auto nx = static_cast<std::size_t>(g.nx);
  const auto ny = static_cast<std::size_t>(g.ny);
  const auto npi = static_cast<std::size_t>(g.npi);
  const auto nk = static_cast<std::size_t>(g.colors);

  std::vector<double> color_kernel(nk * nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto pmf = transition_color_pmf(static_cast<int>(k) + 1, model, g.colors);
    std::copy(pmf.begin(), pmf.end(), color_kernel.begin() + static_cast<std::ptrdiff_t>(k * nk));
  }

  PosteriorTable a(g);
  PosteriorTable b(g);
  apply_axis(table.values(), a.values(), drift_kernel(g.nx, model.sigma_x), nx, 1);
  apply_axis(a.values(), b.values(), drift_kernel(g.ny, model.sigma_y), ny, nx);
  apply_axis(b.values(), a.values(), drift_kernel(g.npi, model.sigma_pi), npi, nx * ny);
  apply_axis(a.values(), b.values(), color_kernel, nk, nx * ny * npi);
  return b;
}

namespace {

// Observation weight of `click` for every grid state, in table order.
void multiply_likelihood(PosteriorTable& table, const ClickEvent& click, const ModelParams& model,
                         const MarkSpace& space) {
  const GridSpec& g = table.grid();
  for (int k = 1; k <= g.colors; ++k) {
    for (int ipi = 0; ipi < g.npi; ++ipi) {
      for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
          table.at(ix, iy, ipi, k) *=
              observation_likelihood(click, table.state(ix, iy, ipi, k), model, space);
        }
      }
    }
  }
}

}  // namespace

std::vector<PosteriorTable> exact_posterior(const MarkSpace& space,
                                            std::span<const ClickEvent> clicks,
                                            const ModelParams& model, const GridSpec& grid) {
  grid.validate();
  if (grid.colors != space.color_count()) {
    throw Error(ErrorCode::kInvalidParams, "grid colors must equal the mark space color count");
  }
  model.validate_for(grid.colors);

  std::vector<PosteriorTable> tables;
  tables.reserve(clicks.size() + 1);
  PosteriorTable prior(grid);
  std::fill(prior.values().begin(), prior.values().end(),
            1.0 / static_cast<double>(grid.state_count()));
  tables.push_back(std::move(prior));

  for (const ClickEvent& click : clicks) {
    PosteriorTable next = propagate(tables.back(), model);
    multiply_likelihood(next, click, model, space);
    next.normalize();
    tables.push_back(std::move(next));
  }
  return tables;
}

std::vector<double> expected_scores(const PosteriorTable& table, const MarkSpace& space,
                                    const ModelParams& model) {
  const PosteriorTable ahead = propagate(table, model);
  const GridSpec& g = ahead.grid();
  std::vector<double> scores(space.size(), 0.0);
  for (std::size_t j = 0; j < space.size(); ++j) {
    const Mark& m = space.mark(j);
    const ClickEvent click{0, m.id, m.x, m.y, m.color};
    double total = 0.0;
    for (int k = 1; k <= g.colors; ++k) {
      for (int ipi = 0; ipi < g.npi; ++ipi) {
        for (int iy = 0; iy < g.ny; ++iy) {
          for (int ix = 0; ix < g.nx; ++ix) {
            const double p = ahead.at(ix, iy, ipi, k);
            if (p == 0.0) continue;
            total += p * observation_likelihood(click, ahead.state(ix, iy, ipi, k), model, space);
          }
        }
      }
    }
    scores[j] = total;
  }
  return scores;
}

PredictionSet exact_prediction(const PosteriorTable& table, const MarkSpace& space,
                               const ModelParams& model, std::size_t alpha, int t) {
  const auto scores = expected_scores(table, space, model);
  return top_alpha(scores, space, alpha, t);
}

}  // namespace clickcast::oracle
