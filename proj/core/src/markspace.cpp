#include "clickcast/markspace.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>

#include "clickcast/errors.hpp"
#include "json.hpp"

namespace clickcast {

using nlohmann::json;

MarkSpace::MarkSpace(std::vector<Mark> marks, int color_count)
    : marks_(std::move(marks)), color_count_(color_count) {
  if (marks_.empty()) {
    throw Error(ErrorCode::kEmptyMarkSpace, "mark space has no marks");
  }
  if (color_count_ < 1) {
    throw Error(ErrorCode::kInvalidParams,
                "color_count must be positive, got " + std::to_string(color_count_));
  }
  color_index_.resize(static_cast<std::size_t>(color_count_));
  by_id_.reserve(marks_.size());
  for (std::size_t i = 0; i < marks_.size(); ++i) {
    const Mark& m = marks_[i];
    const std::string where = "mark #" + std::to_string(i) + " (id " + std::to_string(m.id) + ")";
    if (m.color < 1 || m.color > color_count_) {
      throw Error(ErrorCode::kColorOutOfRange,
                  where + ": color " + std::to_string(m.color) + " outside 1.." +
                      std::to_string(color_count_));
    }
    if (!(m.x >= 0.0 && m.x <= 1.0 && m.y >= 0.0 && m.y <= 1.0)) {
      throw Error(ErrorCode::kPositionOutOfRange, where + ": position outside the canvas");
    }
    if (!by_id_.emplace(m.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate id " + std::to_string(m.id));
    }
    color_index_[static_cast<std::size_t>(m.color - 1)].push_back(m.id);
  }
}

std::ptrdiff_t MarkSpace::index_of(MarkId id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

const Mark& MarkSpace::at(MarkId id) const {
  const auto index = index_of(id);
  if (index < 0) {
    throw Error(ErrorCode::kUnknownMark, "unknown mark id " + std::to_string(id));
  }
  return marks_[static_cast<std::size_t>(index)];
}

std::span<const MarkId> MarkSpace::ids_of_color(int c) const {
  if (c < 1 || c > color_count_) return {};
  return color_index_[static_cast<std::size_t>(c - 1)];
}

ClickEvent make_click(const MarkSpace& space, MarkId id, int t) {
  const Mark& m = space.at(id);
  return ClickEvent{t, id, m.x, m.y, m.color};
}

namespace {

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

double require_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::kMalformedInput,
                where + ": field '" + key + "' missing or not a number");
  }
  return it->get<double>();
}

std::int64_t require_integer(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::kMalformedInput,
                where + ": field '" + key + "' missing or not an integer");
  }
  return it->get<std::int64_t>();
}

std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

MarkSpace parse_markspace(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedInput,
                "spec line " + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kMalformedInput, "spec: top level must be an object");
  }
  const double width = require_number(doc, "width", "spec");
  const double height = require_number(doc, "height", "spec");
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::kMalformedInput, "spec: width and height must be positive");
  }
  const auto color_count = require_integer(doc, "color_count", "spec");
  if (color_count < 1) {
    throw Error(ErrorCode::kMalformedInput, "spec: color_count must be at least 1");
  }
  auto marks_it = doc.find("marks");
  if (marks_it == doc.end() || !marks_it->is_array()) {
    throw Error(ErrorCode::kMalformedInput, "spec: 'marks' missing or not an array");
  }
  if (marks_it->empty()) {
    throw Error(ErrorCode::kEmptyMarkSpace, "spec: 'marks' is empty");
  }

  std::vector<Mark> marks;
  marks.reserve(marks_it->size());
  for (std::size_t i = 0; i < marks_it->size(); ++i) {
    const json& rec = (*marks_it)[i];
    const std::string where = "spec marks[" + std::to_string(i) + "]";
    if (!rec.is_object()) {
      throw Error(ErrorCode::kMalformedInput, where + ": not an object");
    }
    Mark m;
    m.id = require_integer(rec, "id", where);
    const double px = require_number(rec, "x", where);
    const double py = require_number(rec, "y", where);
    const auto color = require_integer(rec, "color", where);
    if (color < 1 || color > color_count) {
      throw Error(ErrorCode::kColorOutOfRange,
                  where + " (id " + std::to_string(m.id) + "): color " +
                      std::to_string(color) + " outside 1.." + std::to_string(color_count));
    }
    if (!(px >= 0.0 && px <= width && py >= 0.0 && py <= height)) {
      throw Error(ErrorCode::kPositionOutOfRange,
                  where + " (id " + std::to_string(m.id) + "): position outside " +
                      "width x height");
    }
    m.x = px / width;
    m.y = py / height;
    m.color = static_cast<int>(color);
    marks.push_back(m);
  }
  // Constructor re-validates and reports duplicate ids with record index.
  try {
    return MarkSpace(std::move(marks), static_cast<int>(color_count));
  } catch (const Error& e) {
    throw Error(e.code(), std::string("spec ") + e.what());
  }
}

MarkSpace load_markspace(std::istream& in) { return parse_markspace(read_all(in)); }

void save_markspace(std::ostream& out, const MarkSpace& space, double width, double height) {
  json doc;
  doc["width"] = width;
  doc["height"] = height;
  doc["color_count"] = space.color_count();
  json marks = json::array();
  for (const Mark& m : space.marks()) {
    marks.push_back({{"id", m.id}, {"x", m.x * width}, {"y", m.y * height}, {"color", m.color}});
  }
  doc["marks"] = std::move(marks);
  out << doc.dump() << '\n';
}

std::vector<ClickEvent> parse_clicklog(std::string_view text, const MarkSpace& space) {
  std::vector<ClickEvent> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = "log line " + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedInput, where + ": " + e.what());
    }
    if (!rec.is_object()) {
      throw Error(ErrorCode::kMalformedInput, where + ": record must be an object");
    }
    if (auto t = rec.find("t"); t != rec.end() && !t->is_number_integer()) {
      throw Error(ErrorCode::kMalformedInput, where + ": 't' must be an integer");
    }
    const MarkId id = require_integer(rec, "mark_id", where);
    if (!space.contains(id)) {
      throw Error(ErrorCode::kUnknownMark, where + ": unknown mark_id " + std::to_string(id));
    }
    events.push_back(make_click(space, id, static_cast<int>(events.size()) + 1));
    if (end == text.size()) break;
  }
  if (events.empty()) {
    throw Error(ErrorCode::kEmptyLog, "click log has no events");
  }
  return events;
}

std::vector<ClickEvent> load_clicklog(std::istream& in, const MarkSpace& space) {
  return parse_clicklog(read_all(in), space);
}

void save_clicklog(std::ostream& out, std::span<const ClickEvent> clicks) {
  for (const ClickEvent& c : clicks) {
    out << json{{"t", c.t}, {"mark_id", c.mark_id}}.dump() << '\n';
  }
}

}  // namespace clickcast
