#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clickcast {

using MarkId = std::int64_t;

// A primitive visual element. Position is normalized to the unit square and
// color is a categorical index in 1..K.
struct Mark {
  MarkId id = 0;
  double x = 0.0;
  double y = 0.0;
  int color = 1;

  bool operator==(const Mark&) const = default;
};

// Immutable, validated set of marks with a per-color index. Safe to share
// read-only between sessions.
class MarkSpace {
 public:
  // Throws clickcast::Error on empty input, duplicate ids, colors outside
  // 1..color_count or positions outside [0,1]^2.
  MarkSpace(std::vector<Mark> marks, int color_count);

  std::span<const Mark> marks() const { return marks_; }
  std::size_t size() const { return marks_.size(); }
  int color_count() const { return color_count_; }

  const Mark& mark(std::size_t index) const { return marks_[index]; }

  // Position of `id` within marks(), or -1 when absent.
  std::ptrdiff_t index_of(MarkId id) const;
  bool contains(MarkId id) const { return index_of(id) >= 0; }

  // Throws Error(kUnknownMark) when absent.
  const Mark& at(MarkId id) const;

  // Ids of the marks with color c, in mark order. c in 1..color_count.
  std::span<const MarkId> ids_of_color(int c) const;
  std::size_t color_size(int c) const { return ids_of_color(c).size(); }

 private:
  std::vector<Mark> marks_;
  int color_count_;
  std::vector<std::vector<MarkId>> color_index_;
  std::unordered_map<MarkId, std::size_t> by_id_;
};

// One observed click, bound to a concrete mark. (x, y, color) are copied from
// the mark.
struct ClickEvent {
  int t = 0;
  MarkId mark_id = 0;
  double x = 0.0;
  double y = 0.0;
  int color = 1;

  bool operator==(const ClickEvent&) const = default;
};

ClickEvent make_click(const MarkSpace& space, MarkId id, int t);

// Visualization spec document:
//   {"width": W, "height": H, "color_count": K,
//    "marks": [{"id": .., "x": .., "y": .., "color": ..}, ...]}
// with x, y in pixel units. Positions are divided by width/height. Unknown
// fields (extra channels) are ignored.
MarkSpace load_markspace(std::istream& in);
MarkSpace parse_markspace(std::string_view text);

// Writes the spec document. With the default unit width/height the saved
// coordinates are the normalized ones and a reload is exact.
void save_markspace(std::ostream& out, const MarkSpace& space,
                    double width = 1.0, double height = 1.0);

// Click log: one JSON object per line, {"t": n, "mark_id": id}; t optional.
// Blank lines are skipped. Events are renumbered 1..n in input order.
std::vector<ClickEvent> load_clicklog(std::istream& in, const MarkSpace& space);
std::vector<ClickEvent> parse_clicklog(std::string_view text,
                                       const MarkSpace& space);
void save_clicklog(std::ostream& out, std::span<const ClickEvent> clicks);

}  // namespace clickcast
