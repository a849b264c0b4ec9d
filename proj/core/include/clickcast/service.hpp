#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clickcast/filter.hpp"
#include "clickcast/markspace.hpp"

namespace clickcast::service {

using Clock = std::chrono::steady_clock;

struct ServiceConfig {
  std::chrono::seconds idle_timeout{30 * 60};
  // Cap on points returned by the particle endpoint.
  std::size_t max_particle_points = 500;
  int pi_bins = 10;
  // Defaults for sessions that omit params.
  FilterParams default_params;
};

struct ClickOutcome {
  int t = 0;
  PredictionSet prediction;  // empty while warming up
  bool warmup = false;
  bool degenerate = false;
  // Whether the clicked mark was in the prediction made before this click.
  std::optional<bool> previous_hit;
};

struct ParticleSnapshot {
  int t = 0;
  struct Point {
    double x;
    double y;
    int k;
  };
  std::vector<Point> points;
  std::vector<std::size_t> pi_hist;
};

// In-memory session registry. Each session is guarded by its own mutex, so
// clicks to one session apply in arrival order while distinct sessions run
// in parallel.
class SessionManager {
 public:
  explicit SessionManager(ServiceConfig config,
                          std::function<Clock::time_point()> now = Clock::now);
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  std::string create(std::shared_ptr<const MarkSpace> space,
                     const FilterParams& params);

  // Throw Error(kUnknownMark) for marks outside the session's space and
  // std::out_of_range for unknown session ids.
  ClickOutcome click(const std::string& id, MarkId mark_id);
  ClickOutcome prediction(const std::string& id);
  ParticleSnapshot particles(const std::string& id, std::size_t max_points);
  std::shared_ptr<const MarkSpace> space(const std::string& id);
  std::vector<ClickEvent> history(const std::string& id);

  bool remove(const std::string& id);
  // Drops sessions idle for longer than the configured timeout.
  std::size_t expire_idle();
  std::size_t size() const;

  const ServiceConfig& config() const { return config_; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id);
  std::string new_id();

  ServiceConfig config_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t id_state_;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

// JSON API, independent of the transport:
//   POST   /sessions                  {spec | dataset, params} -> 201 {id}
//   POST   /sessions/{id}/clicks      {mark_id} -> {t, prediction, status}
//   GET    /sessions/{id}/prediction
//   GET    /sessions/{id}/particles   -> {points: [{x,y,k}], pi_hist: [..]}
//   GET    /sessions/{id}/space       -> normalized marks for rendering
//   DELETE /sessions/{id}
// Errors are {"error": {"code": "...", "message": "..."}}.
class Api {
 public:
  explicit Api(ServiceConfig config = {});

  ApiResponse handle(std::string_view method, std::string_view path,
                     std::string_view body);

  SessionManager& sessions() { return sessions_; }

 private:
  ApiResponse create_session(std::string_view body);

  SessionManager sessions_;
  std::mutex datasets_mutex_;
  std::map<std::string, std::shared_ptr<const MarkSpace>> datasets_;
};

// HTTP transport for Api.
class HttpServer {
 public:
  explicit HttpServer(ServiceConfig config = {});
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Serves files under `dir` at "/" (for the browser demo).
  bool mount_static(const std::string& dir);

  // Blocking.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); then call
  // listen_after_bind() to serve.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

  Api& api();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string params_to_json(const FilterParams& params);
// Reads any subset of {particles, alpha, sigma_x, sigma_y, sigma_pi, rho,
// warmup, seed, resampling} over `base`. Throws Error(kInvalidParams).
FilterParams params_from_json(std::string_view json, FilterParams base);

}  // namespace clickcast::service
