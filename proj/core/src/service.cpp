#include "clickcast/service.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "clickcast/errors.hpp"
#include "clickcast/simulator.hpp"
#include "httplib.h"
#include "json.hpp"

namespace clickcast::service {

using nlohmann::json;

struct SessionManager::Session {
  Session(std::shared_ptr<const MarkSpace> s, const FilterParams& params, Clock::time_point now)
      : space(std::move(s)), tracker(*space, params), created(now), last_active(now) {}

  std::mutex mutex;
  std::shared_ptr<const MarkSpace> space;
  AttentionTracker tracker;
  std::vector<ClickEvent> history;
  PredictionSet current;  // prediction for the next click; empty during warmup
  Clock::time_point created;
  Clock::time_point last_active;
};

SessionManager::SessionManager(ServiceConfig config, std::function<Clock::time_point()> now)
    : config_(std::move(config)), now_(std::move(now)), id_state_(std::random_device{}()) {
  id_state_ = (id_state_ << 32) ^ std::random_device{}();
}

SessionManager::~SessionManager() = default;

std::string SessionManager::new_id() {
  // Caller holds mutex_.
  char buf[17];
  do {
    id_state_ = mix_seed(id_state_);
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id_state_));
  } while (sessions_.count(buf) != 0);
  return buf;
}

std::string SessionManager::create(std::shared_ptr<const MarkSpace> space,
                                   const FilterParams& params) {
  auto session = std::make_shared<Session>(std::move(space), params, now_());
  std::lock_guard lock(mutex_);
  std::string id = new_id();
  sessions_.emplace(id, std::move(session));
  return id;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw std::out_of_range("no session " + id);
  return it->second;
}

ClickOutcome SessionManager::click(const std::string& id, MarkId mark_id) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  session->last_active = now_();
  const ClickEvent event = make_click(*session->space, mark_id, session->tracker.t() + 1);

  ClickOutcome out;
  if (!session->tracker.warming_up()) out.previous_hit = session->current.contains(mark_id);
  const StepInfo info = session->tracker.observe(event);
  session->history.push_back(event);
  session->current = session->tracker.prediction();

  out.t = session->tracker.t();
  out.prediction = session->current;
  out.warmup = session->tracker.warming_up();
  out.degenerate = info.degenerate;
  return out;
}

ClickOutcome SessionManager::prediction(const std::string& id) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  session->last_active = now_();
  ClickOutcome out;
  out.t = session->tracker.t();
  out.prediction = session->tracker.prediction();
  out.warmup = session->tracker.warming_up();
  return out;
}

ParticleSnapshot SessionManager::particles(const std::string& id, std::size_t max_points) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  session->last_active = now_();
  const ParticleSet& ps = session->tracker.particles();
  ParticleSnapshot snap;
  snap.t = ps.t;
  const std::size_t cap = std::max<std::size_t>(1, std::min(max_points, config_.max_particle_points));
  const std::size_t stride = (ps.particles.size() + cap - 1) / cap;
  for (std::size_t i = 0; i < ps.particles.size(); i += std::max<std::size_t>(stride, 1)) {
    const AttentionState& p = ps.particles[i];
    snap.points.push_back({p.x, p.y, p.k});
  }
  const auto bins = static_cast<std::size_t>(std::max(config_.pi_bins, 1));
  snap.pi_hist.assign(bins, 0);
  for (const AttentionState& p : ps.particles) {
    const auto bin = std::min(static_cast<std::size_t>(p.pi * static_cast<double>(bins)), bins - 1);
    ++snap.pi_hist[bin];
  }
  return snap;
}

std::shared_ptr<const MarkSpace> SessionManager::space(const std::string& id) {
  return find(id)->space;
}

std::vector<ClickEvent> SessionManager::history(const std::string& id) {
  auto session = find(id);
  std::lock_guard lock(session->mutex);
  return session->history;
}

bool SessionManager::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  return sessions_.erase(id) > 0;
}

std::size_t SessionManager::expire_idle() {
  const auto now = now_();
  std::lock_guard lock(mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    Clock::time_point last;
    {
      std::lock_guard session_lock(it->second->mutex);
      last = it->second->last_active;
    }
    if (now - last > config_.idle_timeout) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

// ---------------------------------------------------------------------------
// JSON API

namespace {

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  json body = {{"error", {{"code", code}, {"message", message}}}};
  return {status, body.dump()};
}

ApiResponse from_error(const Error& e) {
  return error_response(422, error_code_name(e.code()), e.what());
}

json prediction_json(const PredictionSet& p) {
  json entries = json::array();
  for (const PredictionEntry& e : p.entries) {
    entries.push_back({{"mark_id", e.mark_id}, {"score", e.score}});
  }
  return entries;
}

json outcome_json(const ClickOutcome& out) {
  json body = {{"t", out.t},
               {"status", out.warmup ? "warmup" : "ok"},
               {"prediction", prediction_json(out.prediction)},
               {"degenerate", out.degenerate}};
  body["previous_hit"] = out.previous_hit ? json(*out.previous_hit) : json(nullptr);
  return body;
}

std::vector<std::string_view> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t next = std::min(path.find('/', pos), path.size());
    if (next > pos) parts.push_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

std::size_t query_size(std::string_view path, std::string_view key, std::size_t fallback) {
  const auto q = path.find('?');
  if (q == std::string_view::npos) return fallback;
  std::string_view query = path.substr(q + 1);
  const std::string needle = std::string(key) + "=";
  const auto at = query.find(needle);
  if (at == std::string_view::npos) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(std::string(query.substr(at + needle.size()))));
  } catch (const std::exception&) {
    return fallback;
  }
}

}  // namespace

std::string params_to_json(const FilterParams& p) {
  json body = {{"particles", p.particles},
               {"alpha", p.alpha},
               {"sigma_x", p.model.sigma_x},
               {"sigma_y", p.model.sigma_y},
               {"sigma_pi", p.model.sigma_pi},
               {"rho", p.model.rho},
               {"warmup", p.warmup},
               {"seed", p.seed},
               {"resampling", p.resampling == Resampling::kSystematic ? "systematic" : "multinomial"}};
  return body.dump();
}

FilterParams params_from_json(std::string_view text, FilterParams base) {
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidParams, std::string("params: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidParams, "params must be an object");
  try {
    auto count = [&](const char* key, std::size_t& field) {
      if (!doc.contains(key)) return;
      const auto v = doc.at(key).get<std::int64_t>();
      if (v < 1) throw Error(ErrorCode::kInvalidParams, std::string(key) + " must be >= 1");
      field = static_cast<std::size_t>(v);
    };
    count("particles", base.particles);
    count("alpha", base.alpha);
    if (doc.contains("sigma_x")) base.model.sigma_x = doc.at("sigma_x").get<double>();
    if (doc.contains("sigma_y")) base.model.sigma_y = doc.at("sigma_y").get<double>();
    if (doc.contains("sigma_pi")) base.model.sigma_pi = doc.at("sigma_pi").get<double>();
    if (doc.contains("rho")) base.model.rho = doc.at("rho").get<double>();
    if (doc.contains("warmup")) base.warmup = doc.at("warmup").get<int>();
    if (doc.contains("seed")) base.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("resampling")) {
      const auto name = doc.at("resampling").get<std::string>();
      if (name == "multinomial") {
        base.resampling = Resampling::kMultinomial;
      } else if (name == "systematic") {
        base.resampling = Resampling::kSystematic;
      } else {
        throw Error(ErrorCode::kInvalidParams, "unknown resampling scheme '" + name + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidParams, std::string("params: ") + e.what());
  }
  base.validate();
  return base;
}

Api::Api(ServiceConfig config) : sessions_(std::move(config)) {}

ApiResponse Api::create_session(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_response(400, "MALFORMED_INPUT", e.what());
  }
  if (!doc.is_object()) return error_response(400, "MALFORMED_INPUT", "body must be an object");

  FilterParams params;
  try {
    params = params_from_json(doc.contains("params") ? doc["params"].dump() : "{}",
                              sessions_.config().default_params);
  } catch (const Error& e) {
    return from_error(e);
  }

  std::shared_ptr<const MarkSpace> space;
  try {
    if (doc.contains("spec")) {
      space = std::make_shared<const MarkSpace>(parse_markspace(doc["spec"].dump()));
    } else if (doc.contains("dataset")) {
      // "demo" or {"n_marks", "colors", "seed"}; generated spaces are cached.
      sim::DatasetOptions options;
      std::uint64_t seed = 1;
      const json& ref = doc["dataset"];
      if (ref.is_object()) {
        options.n_marks = ref.value("n_marks", options.n_marks);
        options.colors = ref.value("colors", options.colors);
        seed = ref.value("seed", seed);
      } else if (!(ref.is_string() && ref.get<std::string>() == "demo")) {
        return error_response(422, "INVALID_SPEC", "dataset must be \"demo\" or an object");
      }
      const std::string key = std::to_string(options.n_marks) + "/" +
                              std::to_string(options.colors) + "/" + std::to_string(seed);
      std::lock_guard lock(datasets_mutex_);
      auto& cached = datasets_[key];
      if (!cached) cached = std::make_shared<const MarkSpace>(sim::generate_dataset(options, seed));
      space = cached;
    } else {
      return error_response(422, "INVALID_SPEC", "body needs 'spec' or 'dataset'");
    }
  } catch (const Error& e) {
    return error_response(422, "INVALID_SPEC", e.what());
  } catch (const json::exception& e) {
    return error_response(422, "INVALID_SPEC", e.what());
  }

  try {
    const std::string id = sessions_.create(space, params);
    json out = {{"id", id},
                {"t", 0},
                {"marks", space->size()},
                {"color_count", space->color_count()},
                {"params", json::parse(params_to_json(params))}};
    return {201, out.dump()};
  } catch (const Error& e) {
    return from_error(e);
  }
}

ApiResponse Api::handle(std::string_view method, std::string_view path, std::string_view body) {
  sessions_.expire_idle();
  const auto parts = split_path(path);
  if (parts.empty() || parts[0] != "sessions") {
    return error_response(404, "NOT_FOUND", "no route for " + std::string(path));
  }
  if (parts.size() == 1) {
    if (method == "POST") return create_session(body);
    return error_response(405, "METHOD_NOT_ALLOWED", "use POST /sessions");
  }
  const std::string id(parts[1]);
  try {
    if (parts.size() == 2) {
      if (method != "DELETE") return error_response(405, "METHOD_NOT_ALLOWED", "use DELETE");
      if (!sessions_.remove(id)) return error_response(404, "SESSION_NOT_FOUND", "no session " + id);
      return {200, json{{"id", id}, {"deleted", true}}.dump()};
    }
    const std::string_view resource = parts[2];
    if (parts.size() != 3) return error_response(404, "NOT_FOUND", "no route");

    if (resource == "clicks") {
      if (method != "POST") return error_response(405, "METHOD_NOT_ALLOWED", "use POST");
      json doc;
      try {
        doc = json::parse(body);
      } catch (const json::parse_error& e) {
        return error_response(400, "MALFORMED_INPUT", e.what());
      }
      if (!doc.is_object() || !doc.contains("mark_id") || !doc["mark_id"].is_number_integer()) {
        return error_response(400, "MALFORMED_INPUT", "body must be {\"mark_id\": <integer>}");
      }
      const ClickOutcome out = sessions_.click(id, doc["mark_id"].get<MarkId>());
      return {200, outcome_json(out).dump()};
    }
    if (method != "GET") return error_response(405, "METHOD_NOT_ALLOWED", "use GET");
    if (resource == "prediction") {
      return {200, outcome_json(sessions_.prediction(id)).dump()};
    }
    if (resource == "particles") {
      const auto snap = sessions_.particles(id, query_size(path, "max_points", SIZE_MAX));
      json points = json::array();
      for (const auto& p : snap.points) points.push_back({{"x", p.x}, {"y", p.y}, {"k", p.k}});
      return {200, json{{"t", snap.t}, {"points", points}, {"pi_hist", snap.pi_hist}}.dump()};
    }
    if (resource == "space") {
      const auto space = sessions_.space(id);
      json marks = json::array();
      for (const Mark& m : space->marks()) {
        marks.push_back({{"id", m.id}, {"x", m.x}, {"y", m.y}, {"color", m.color}});
      }
      return {200, json{{"color_count", space->color_count()}, {"marks", marks}}.dump()};
    }
    return error_response(404, "NOT_FOUND", "no route for " + std::string(path));
  } catch (const std::out_of_range&) {
    return error_response(404, "SESSION_NOT_FOUND", "no session " + id);
  } catch (const Error& e) {
    return from_error(e);
  }
}

// ---------------------------------------------------------------------------
// HTTP transport

struct HttpServer::Impl {
  explicit Impl(ServiceConfig config) : api(std::move(config)) {}

  httplib::Server server;
  Api api;
};

HttpServer::HttpServer(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    std::string target = req.path;
    if (!req.params.empty()) {
      char sep = '?';
      for (const auto& [key, value] : req.params) {
        target += sep + key + "=" + value;
        sep = '&';
      }
    }
    const ApiResponse out = impl_->api.handle(req.method, target, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  auto& s = impl_->server;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                         {"Access-Control-Allow-Headers", "Content-Type"}});
  s.Get(R"(/sessions(/.*)?)", forward);
  s.Post(R"(/sessions(/.*)?)", forward);
  s.Delete(R"(/sessions(/.*)?)", forward);
  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::mount_static(const std::string& dir) {
  return impl_->server.set_mount_point("/", dir);
}

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

Api& HttpServer::api() { return impl_->api; }

}  // namespace clickcast::service
