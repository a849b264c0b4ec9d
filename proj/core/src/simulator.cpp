#include "clickcast/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clickcast/errors.hpp"

namespace clickcast::sim {

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kGeo:
      return "geo";
    case TaskKind::kType:
      return "type";
    case TaskKind::kMixed:
      return "mixed";
  }
  return "unknown";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  if (name == "geo") return TaskKind::kGeo;
  if (name == "type") return TaskKind::kType;
  if (name == "mixed") return TaskKind::kMixed;
  return std::nullopt;
}

int rare_color_start(int colors) { return colors / 2 + 1; }

namespace {

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding: fall back to the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

struct Cluster {
  double cx;
  double cy;
  double spread;
  double weight;
};

}  // namespace

MarkSpace generate_dataset(const DatasetOptions& options, std::uint64_t seed) {
  const int colors = options.colors;
  if (colors < 1 || options.n_marks < static_cast<std::size_t>(colors)) {
    throw Error(ErrorCode::kInvalidParams, "dataset needs colors >= 1 and n_marks >= colors");
  }
  Rng rng(seed);

  // Geometric category frequencies: color 1 most common, color K rarest.
  std::vector<double> base(static_cast<std::size_t>(colors));
  for (std::size_t c = 0; c < base.size(); ++c) base[c] = std::pow(0.6, static_cast<double>(c));

  std::vector<Cluster> clusters(std::max<std::size_t>(options.clusters, 1));
  for (Cluster& cl : clusters) {
    cl.cx = rng.uniform(0.12, 0.88);
    cl.cy = rng.uniform(0.12, 0.88);
    cl.spread = rng.uniform(0.03, 0.08);
    cl.weight = rng.uniform(0.5, 1.5);
  }
  std::vector<double> cluster_weights;
  for (const Cluster& cl : clusters) cluster_weights.push_back(cl.weight);

  // One compact hotspot per rare category, apart from the common clusters.
  const int first_rare = rare_color_start(colors);
  std::vector<Cluster> hotspots;
  for (int c = first_rare; c <= colors; ++c) {
    Cluster h{0.0, 0.0, rng.uniform(0.02, 0.035), 1.0};
    for (int attempt = 0; attempt < 64; ++attempt) {
      h.cx = rng.uniform(0.1, 0.9);
      h.cy = rng.uniform(0.1, 0.9);
      const bool clear = std::all_of(clusters.begin(), clusters.end(), [&](const Cluster& cl) {
        return std::hypot(cl.cx - h.cx, cl.cy - h.cy) > 2.5 * cl.spread + 0.1;
      });
      if (clear) break;
    }
    hotspots.push_back(h);
  }
  auto place_in = [&](const Cluster& cl, Mark& m) {
    do {
      m.x = cl.cx + cl.spread * rng.normal();
      m.y = cl.cy + cl.spread * rng.normal();
    } while (m.x < 0.0 || m.x > 1.0 || m.y < 0.0 || m.y > 1.0);
  };

  std::vector<Mark> marks(options.n_marks);
  for (std::size_t i = 0; i < marks.size(); ++i) {
    Mark& m = marks[i];
    m.id = static_cast<MarkId>(i + 1);
    // Every color gets at least one mark; the rest follow the frequencies.
    m.color = i < static_cast<std::size_t>(colors)
                  ? static_cast<int>(i) + 1
                  : 1 + static_cast<int>(sample_categorical(base, rng));
    if (m.color >= first_rare) {
      place_in(hotspots[static_cast<std::size_t>(m.color - first_rare)], m);
    } else if (rng.uniform() < options.background_share) {
      m.x = rng.uniform();
      m.y = rng.uniform();
    } else {
      place_in(clusters[sample_categorical(cluster_weights, rng)], m);
    }
  }
  return MarkSpace(std::move(marks), colors);
}

MarkSpace generate_dataset(std::size_t n_marks, int colors, std::uint64_t seed) {
  DatasetOptions options;
  options.n_marks = n_marks;
  options.colors = colors;
  return generate_dataset(options, seed);
}

AttentionState initial_user_state(const SyntheticTask& task, int color_count, Rng& rng) {
  AttentionState s;
  switch (task.kind) {
    case TaskKind::kGeo:
      s.x = task.region.center_x();
      s.y = task.region.center_y();
      s.k = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(color_count)));
      s.pi = 1.0;
      break;
    case TaskKind::kType:
      s.x = rng.uniform();
      s.y = rng.uniform();
      s.k = task.target_color;
      s.pi = 0.0;
      break;
    case TaskKind::kMixed:
      s.x = task.region.center_x();
      s.y = task.region.center_y();
      s.k = task.target_color;
      s.pi = rng.uniform(0.4, 0.6);
      break;
  }
  return s;
}

ModelParams default_user_model(const SyntheticTask& task) {
  ModelParams p;
  // Click spread follows the region: about 95% of positional clicks land
  // inside it.
  const double sx = std::max(0.25 * (task.region.x1 - task.region.x0), 0.005);
  const double sy = std::max(0.25 * (task.region.y1 - task.region.y0), 0.005);
  switch (task.kind) {
    case TaskKind::kGeo:
      p.sigma_x = sx;
      p.sigma_y = sy;
      p.sigma_pi = 1e-6;  // pinned at 1: clicks stay positional
      p.rho = 0.96;
      break;
    case TaskKind::kType:
      p.sigma_x = p.sigma_y = 0.05;
      p.sigma_pi = 1e-6;  // pinned at 0: clicks stay on the category
      p.rho = 1.0;
      break;
    case TaskKind::kMixed:
      p.sigma_x = sx;
      p.sigma_y = sy;
      p.sigma_pi = 0.02;
      p.rho = 1.0;
      break;
  }
  return p;
}

int default_session_length(TaskKind kind) {
  switch (kind) {
    case TaskKind::kGeo:
      return 43;
    case TaskKind::kType:
      return 14;
    case TaskKind::kMixed:
      return 85;
  }
  return 20;
}

namespace {

void validate_task(const MarkSpace& space, const SyntheticTask& task) {
  if (task.n_clicks < 1) throw Error(ErrorCode::kInvalidParams, "task needs n_clicks >= 1");
  const bool needs_region = task.kind != TaskKind::kType;
  const bool needs_color = task.kind != TaskKind::kGeo;
  if (needs_region &&
      (task.region.empty() || task.region.x0 < 0.0 || task.region.y0 < 0.0 ||
       task.region.x1 > 1.0 || task.region.y1 > 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "task region must be a nonempty rectangle in [0,1]^2");
  }
  if (needs_color) {
    if (task.target_color < 1 || task.target_color > space.color_count()) {
      throw Error(ErrorCode::kColorOutOfRange, "task target color outside 1..K");
    }
    if (space.color_size(task.target_color) == 0) {
      throw Error(ErrorCode::kEmptyColorClass,
                  "task targets color " + std::to_string(task.target_color) + " with no marks");
    }
  }
}

// Samples among `candidates` (indices into space) in proportion to the
// positional Gaussian around the state.
MarkId sample_positional(const MarkSpace& space, std::span<const std::size_t> candidates,
                         const AttentionState& s, const ModelParams& model, Rng& rng,
                         std::vector<double>& scratch) {
  const double ax = 0.5 / (model.sigma_x * model.sigma_x);
  const double ay = 0.5 / (model.sigma_y * model.sigma_y);
  scratch.resize(candidates.size());
  double total = 0.0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const Mark& m = space.mark(candidates[j]);
    const double dx = m.x - s.x;
    const double dy = m.y - s.y;
    scratch[j] = std::exp(-(ax * dx * dx + ay * dy * dy));
    total += scratch[j];
  }
  if (total > 0.0) return space.mark(candidates[sample_categorical(scratch, rng)]).id;
  // Everything underflowed: nearest candidate.
  std::size_t best = candidates.front();
  double best_d = INFINITY;
  for (std::size_t index : candidates) {
    const double d = std::hypot(space.mark(index).x - s.x, space.mark(index).y - s.y);
    if (d < best_d) best_d = d, best = index;
  }
  return space.mark(best).id;
}

}  // namespace

SyntheticSession generate_session(const MarkSpace& space, const SyntheticTask& task,
                                  const ModelParams& user_model, std::uint64_t seed) {
  validate_task(space, task);
  user_model.validate();
  Rng rng(seed);
  SyntheticSession session;
  session.task = task;
  const bool in_region = task.kind != TaskKind::kType;

  // Positional clicks go to marks inside the task region when it has any.
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (!in_region || task.region.contains(space.mark(j).x, space.mark(j).y)) {
      candidates.push_back(j);
    }
  }
  if (candidates.empty()) {
    candidates.resize(space.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  }

  AttentionState state = initial_user_state(task, space.color_count(), rng);
  std::vector<double> scratch;
  for (int t = 1; t <= task.n_clicks; ++t) {
    if (t > 1) {
      state = transition_sample(state, user_model, space.color_count(), rng);
      if (in_region) {
        state.x = std::clamp(state.x, task.region.x0, task.region.x1);
        state.y = std::clamp(state.y, task.region.y0, task.region.y1);
      }
    }
    const auto& by_color = space.ids_of_color(state.k);
    MarkId id;
    if (rng.uniform() < state.pi || by_color.empty()) {
      id = sample_positional(space, candidates, state, user_model, rng, scratch);
    } else {
      id = by_color[rng.uniform_index(by_color.size())];
    }
    session.clicks.push_back(make_click(space, id, t));
    session.truth.push_back(state);
  }
  return session;
}

namespace {

// Smallest square around (cx, cy), clipped to the canvas, holding at least
// `wanted` marks accepted by `keep`.
template <typename Pred>
Region grow_region(const MarkSpace& space, double cx, double cy, std::size_t wanted, Pred keep) {
  std::vector<double> reach;
  for (const Mark& m : space.marks()) {
    if (keep(m)) reach.push_back(std::max(std::abs(m.x - cx), std::abs(m.y - cy)));
  }
  std::sort(reach.begin(), reach.end());
  double half = 0.02;
  if (!reach.empty()) {
    half = std::max(half, reach[std::min(wanted, reach.size()) - 1] + 1e-9);
  }
  return Region{std::max(0.0, cx - half), std::max(0.0, cy - half), std::min(1.0, cx + half),
                std::min(1.0, cy + half)};
}

}  // namespace

SyntheticTask make_task(const MarkSpace& space, TaskKind kind, Rng& rng) {
  SyntheticTask task;
  task.kind = kind;
  task.n_clicks = default_session_length(kind);

  // Categories holding at most `share` of the marks; if there are none, the
  // smallest nonempty category.
  auto pick_rare = [&](double share) {
    std::vector<int> rare;
    int smallest = 0;
    for (int c = 1; c <= space.color_count(); ++c) {
      const std::size_t n = space.color_size(c);
      if (n == 0) continue;
      if (static_cast<double>(n) <= share * static_cast<double>(space.size())) rare.push_back(c);
      if (smallest == 0 || n < space.color_size(smallest)) smallest = c;
    }
    return rare.empty() ? smallest : rare[rng.uniform_index(rare.size())];
  };

  switch (kind) {
    case TaskKind::kGeo: {
      const Mark& anchor = space.mark(rng.uniform_index(space.size()));
      task.region = grow_region(space, anchor.x, anchor.y, 43, [](const Mark&) { return true; });
      task.target_color = anchor.color;
      break;
    }
    case TaskKind::kType:
      task.target_color = pick_rare(0.02);
      break;
    case TaskKind::kMixed: {
      task.target_color = pick_rare(0.03);
      const auto ids = space.ids_of_color(task.target_color);
      const Mark& anchor = space.at(ids[rng.uniform_index(ids.size())]);
      const int color = task.target_color;
      task.region = grow_region(space, anchor.x, anchor.y, std::max<std::size_t>(ids.size() / 2, 1),
                                [color](const Mark& m) { return m.color == color; });
      break;
    }
  }
  return task;
}

}  // namespace clickcast::sim
