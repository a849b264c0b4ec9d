#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "clickcast/filter.hpp"
#include "clickcast/markspace.hpp"
#include "clickcast/model.hpp"
#include "clickcast/rng.hpp"

namespace clickcast::sim {

enum class TaskKind { kGeo, kType, kMixed };

std::string_view task_kind_name(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view name);

// Axis-aligned rectangle in the unit square.
struct Region {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }
  bool empty() const { return !(x1 > x0 && y1 > y0); }
};

struct SyntheticTask {
  TaskKind kind = TaskKind::kGeo;
  Region region;         // geo, mixed
  int target_color = 1;  // type, mixed
  int n_clicks = 20;
};

struct DatasetOptions {
  std::size_t n_marks = 1951;
  int colors = 8;
  std::size_t clusters = 6;
  // Share of marks drawn uniformly over the canvas instead of from a cluster.
  double background_share = 0.35;
};

// Clustered synthetic mark space. Colors follow a geometric categorical
// (color 1 most common). Common categories (below rare_color_start) spread
// over Gaussian clusters and a uniform background; each rare category is
// confined to its own compact hotspot away from the common clusters, the way
// rare incident types concentrate.
// Requires n_marks >= colors; every color gets at least one mark.
MarkSpace generate_dataset(const DatasetOptions& options, std::uint64_t seed);
MarkSpace generate_dataset(std::size_t n_marks, int colors, std::uint64_t seed);

// First rare color index: K / 2 + 1.
int rare_color_start(int colors);

// Attention of a synthetic user at the first click, chosen per task kind:
// geo looks at the region center with pi = 1, type at the target color with
// pi = 0, mixed at both with pi in [0.4, 0.6].
AttentionState initial_user_state(const SyntheticTask& task, int color_count,
                                  Rng& rng);

// Default dynamics for a synthetic user working on `task`. Same model family
// as the filter, but focused: the bias is pinned for geo (1) and type (0)
// and drifts slowly for mixed, the color of interest is kept for type/mixed
// tasks, and positional clicks spread over about the task region.
ModelParams default_user_model(const SyntheticTask& task);

struct SyntheticSession {
  SyntheticTask task;
  std::vector<ClickEvent> clicks;
  std::vector<AttentionState> truth;  // attention behind each click
};

// Samples a session from the hidden Markov model. Each click is drawn from
// the observation model: with probability pi a mark sampled in proportion to
// the positional Gaussian, otherwise a uniform mark of color k. Geo and mixed
// users stay inside their region: their location is projected onto it and
// positional clicks only pick marks inside it.
// Throws Error(kEmptyColorClass) if the task targets a color with no marks.
SyntheticSession generate_session(const MarkSpace& space,
                                  const SyntheticTask& task,
                                  const ModelParams& user_model,
                                  std::uint64_t seed);

// Draws a study-like task of the given kind over `space`: a 43-mark region
// around a random mark for geo; a category with at most 2% of the marks for
// type; a category with at most 3% of the marks plus a region around one of
// its marks holding half of that category for mixed.
SyntheticTask make_task(const MarkSpace& space, TaskKind kind, Rng& rng);

// Study-like session lengths.
int default_session_length(TaskKind kind);

}  // namespace clickcast::sim
