// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
//   clickcast_acceptance --cli <path to clickcast> --work-dir <dir> [--only <name>]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "clickcast/filter.hpp"
#include "clickcast/model.hpp"
#include "clickcast/oracle.hpp"
#include "clickcast/simulator.hpp"

namespace fs = std::filesystem;
using namespace clickcast;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::string cli;
  fs::path work_dir = "acceptance_work";
  std::string only;
};

// ---------------------------------------------------------------------------
// Oracle fixture: 12 marks, two colors, 50 eight-click sessions sampled from
// the model itself.

constexpr int kFixtureSessions = 50;
constexpr int kFixtureClicks = 8;
const oracle::GridSpec kFixtureGrid{20, 20, 5, 2};

// Marks sit on a jittered 4 x 3 layout so every pair is at least a few grid
// cells apart; the oracle cannot rank marks that share a cell.
MarkSpace fixture_space() {
  Rng rng(2024);
  std::vector<Mark> marks;
  for (int i = 0; i < 12; ++i) {
    const double cx = (i % 4 + 0.5) / 4.0;
    const double cy = (i / 4 + 0.5) / 3.0;
    marks.push_back({i + 1, cx + rng.uniform(-0.06, 0.06), cy + rng.uniform(-0.08, 0.08),
                     1 + static_cast<int>(rng.uniform_index(2))});
  }
  return MarkSpace(marks, 2);
}

std::vector<ClickEvent> fixture_session(const MarkSpace& space, const ModelParams& model,
                                        std::uint64_t seed) {
  Rng rng(seed);
  AttentionState z{rng.uniform(), rng.uniform(), 1 + int(rng.uniform_index(2)), rng.uniform()};
  std::vector<ClickEvent> clicks;
  std::vector<double> w(space.size());
  for (int t = 1; t <= kFixtureClicks; ++t) {
    z = transition_sample(z, model, space.color_count(), rng);
    MarkId id;
    if (rng.uniform() < z.pi) {
      for (std::size_t j = 0; j < space.size(); ++j) {
        const auto& m = space.mark(j);
        w[j] = normal_pdf(m.x, z.x, model.sigma_x) * normal_pdf(m.y, z.y, model.sigma_y);
      }
      double u = rng.uniform() * std::accumulate(w.begin(), w.end(), 0.0);
      std::size_t j = 0;
      while (j + 1 < w.size() && u >= w[j]) u -= w[j++];
      id = space.mark(j).id;
    } else {
      const auto ids = space.ids_of_color(z.k);
      id = ids[rng.uniform_index(ids.size())];
    }
    clicks.push_back(make_click(space, id, t));
  }
  return clicks;
}

struct FixtureRun {
  std::vector<double> tv;  // per (session, t)
  int top1_steps = 0;
  int top1_agree = 0;
};

struct Fixture {
  MarkSpace space = fixture_space();
  ModelParams model;
  std::vector<std::vector<ClickEvent>> sessions;
  // Per session: tables t = 0..n and the exact top-1 mark for t = warmup..n-1.
  std::vector<std::vector<oracle::PosteriorTable>> tables;
  std::vector<std::vector<MarkId>> exact_top1;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    for (int s = 0; s < kFixtureSessions; ++s) {
      f.sessions.push_back(fixture_session(f.space, f.model, 1000 + s));
      f.tables.push_back(oracle::exact_posterior(f.space, f.sessions.back(), f.model, kFixtureGrid));
      std::vector<MarkId> top;
      for (int t = 3; t < kFixtureClicks; ++t) {
        top.push_back(
            oracle::exact_prediction(f.tables.back()[t], f.space, f.model, 1, t).entries[0].mark_id);
      }
      f.exact_top1.push_back(top);
    }
    return f;
  }();
  return f;
}

FixtureRun run_fixture(std::size_t particles, std::uint64_t seed) {
  const Fixture& f = fixture();
  FixtureRun out;
  FilterParams params;
  params.particles = particles;
  params.model = f.model;
  for (int s = 0; s < kFixtureSessions; ++s) {
    params.seed = mix_seed(seed + static_cast<std::uint64_t>(s));
    ParticleSet ps = init_particles(f.space, params);
    for (int t = 1; t <= kFixtureClicks; ++t) {
      step(ps, f.sessions[s][t - 1], f.space, params);
      const auto approx = color_marginal(ps, 2);
      const auto exact = f.tables[s][t].color_marginal();
      out.tv.push_back(0.5 * (std::abs(approx[0] - exact[0]) + std::abs(approx[1] - exact[1])));
      if (t >= params.warmup && t < kFixtureClicks) {
        const auto pred = predict(ps, f.space, params);
        ++out.top1_steps;
        out.top1_agree += pred.entries[0].mark_id == f.exact_top1[s][t - params.warmup];
      }
    }
  }
  return out;
}

Outcome oracle_equivalence(const Options&) {
  const auto start = Clock::now();
  fixture();
  const FixtureRun run = run_fixture(100000, 77);
  const double elapsed = seconds_since(start);
  const double agree = double(run.top1_agree) / run.top1_steps;
  const double max_tv = *std::max_element(run.tv.begin(), run.tv.end());
  const auto over = std::count_if(run.tv.begin(), run.tv.end(), [](double v) { return v > 0.05; });
  const bool pass = agree >= 0.95 && max_tv <= 0.05 && elapsed < 120.0;
  return {pass, fmt("top-1 agreement %.4f (>= 0.95) over %d steps, max color TV %.4f (<= 0.05) "
                    "with %td of %zu steps above, %.1fs (< 120s)",
                    agree, run.top1_steps, max_tv, over, run.tv.size(), elapsed)};
}

Outcome convergence_in_m(const Options&) {
  const std::size_t ms[] = {100, 1000, 10000, 100000};
  std::vector<double> mean, se;
  for (std::size_t m : ms) {
    const auto run = run_fixture(m, 91);
    const double n = double(run.tv.size());
    const double mu = std::accumulate(run.tv.begin(), run.tv.end(), 0.0) / n;
    double sq = 0.0;
    for (double v : run.tv) sq += (v - mu) * (v - mu);
    mean.push_back(mu);
    se.push_back(std::sqrt(sq / (n - 1) / n));
  }
  bool pass = true;
  std::string detail = "mean TV";
  for (std::size_t i = 0; i < mean.size(); ++i) {
    detail += fmt(" m=%zu: %.4f+-%.4f", ms[i], mean[i], se[i]);
    if (i > 0 && mean[i] > mean[i - 1] + 3 * std::hypot(se[i], se[i - 1])) pass = false;
  }
  return {pass, detail + " (non-increasing within 3 sigma)"};
}

// ---------------------------------------------------------------------------

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

Outcome synthetic_study(const Options& options) {
  const fs::path out = options.work_dir / "study";
  const auto start = Clock::now();
  const std::string cmd =
      options.cli +
      " simulate --marks 1951 --colors 8 --geo-sessions 28 --type-sessions 23 --mixed-sessions 27"
      " --particles 1000 --sigma-x 0.1 --sigma-y 0.1 --sigma-pi 0.45 --rho 0.96 --alpha 100"
      " --warmup 3 --out " + out.string() + " > " + (options.work_dir / "study.log").string();
  const int rc = run_command(cmd);
  const double elapsed = seconds_since(start);
  if (rc != 0) return {false, fmt("simulate exited with %d", rc)};

  bool pass = elapsed < 300.0;
  std::string detail;
  for (const auto& row : read_csv(out / "summary.csv")) {
    const double pooled = std::stod(row.at(3));
    pass &= pooled >= 0.90;
    detail += fmt("%s pooled %.4f (>= 0.90), ", row[0].c_str(), pooled);
  }
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> windows;
  for (const auto& row : read_csv(out / "curve.csv")) {
    if (row.at(2) == "nan") continue;
    const int t = std::stoi(row[1]);
    auto& [early, late] = windows[row[0]];
    (t <= 9 ? early : late).push_back(std::stod(row[2]));
  }
  auto avg = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  };
  for (const auto& [kind, w] : windows) {
    const auto& [early, late] = w;
    const bool flat = !early.empty() && !late.empty() && avg(late) >= avg(early) - 0.03;
    pass &= flat;
    detail += fmt("%s curve t10-20 %.4f vs t3-9 %.4f, ", kind.c_str(),
                  late.empty() ? NAN : avg(late), early.empty() ? NAN : avg(early));
  }
  pass &= windows.size() == 3;
  return {pass, detail + fmt("%.1fs (< 300s)", elapsed)};
}

Outcome distributional_exactness(const Options&) {
  std::size_t pmf_checked = 0, pmf_inexact = 0;
  for (int K = 2; K <= 64; ++K) {
    for (int i = 0; i <= 100; ++i) {
      ModelParams p;
      p.rho = i / 100.0;
      for (int k = 1; k <= K; ++k) {
        const auto pmf = transition_color_pmf(k, p, K);
        ++pmf_checked;
        pmf_inexact += std::accumulate(pmf.begin(), pmf.end(), 0.0) != 1.0;
      }
    }
  }

  // Empirical transition frequencies against the pmf, 3 standard errors.
  int freq_outside = 0, freq_checked = 0;
  const int n = 1000000;
  for (auto [K, rho] : {std::pair{8, 0.96}, std::pair{3, 0.5}}) {
    ModelParams p;
    p.rho = rho;
    const int from = 2;
    const auto pmf = transition_color_pmf(from, p, K);
    Rng rng(404 + K);
    std::vector<int> counts(K, 0);
    for (int i = 0; i < n; ++i) ++counts[transition_sample({0.5, 0.5, from, 0.5}, p, K, rng).k - 1];
    for (int c = 0; c < K; ++c) {
      const double se = std::sqrt(pmf[c] * (1 - pmf[c]) / n);
      ++freq_checked;
      freq_outside += std::abs(counts[c] / double(n) - pmf[c]) > 3 * se;
    }
  }

  long out_of_domain = 0;
  Rng rng(505);
  const double sigmas[] = {1e-300, 1e-12, 5.0, 1e8, 1e300};
  const long draws = 1000000;
  AttentionState z{0.0, 1.0, 1, 1.0};
  for (long i = 0; i < draws; ++i) {
    const double s = sigmas[i % 5];
    z = transition_sample(z, ModelParams{s, s, s, 0.3}, 4, rng);
    out_of_domain += !is_valid(z, 4) || !std::isfinite(z.x) || !std::isfinite(z.pi);
  }

  const bool pass = pmf_inexact == 0 && freq_outside == 0 && out_of_domain == 0;
  return {pass, fmt("pmf sums != 1: %zu of %zu; frequencies outside 3 SE: %d of %d at 1e6 samples; "
                    "out-of-domain states: %ld of %ld extreme-sigma draws",
                    pmf_inexact, pmf_checked, freq_outside, freq_checked, out_of_domain, draws)};
}

Outcome resampling_unbiasedness(const Options&) {
  const std::vector<double> weights{0.05, 0.4, 0.1, 0.3, 0.15};
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const int reps = 10000;
  const std::size_t m = weights.size();
  Rng rng(606);
  std::vector<double> counts(m, 0.0);
  for (int r = 0; r < reps; ++r) {
    for (std::size_t i : resample_indices(weights, m, Resampling::kMultinomial, rng)) counts[i] += 1;
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double expected = double(reps) * double(m) * weights[i] / total;
    chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  const boost::math::chi_squared dist(double(m - 1));
  const double p = boost::math::cdf(boost::math::complement(dist, chi2));
  return {p > 0.001, fmt("chi-square %.3f on %zu dof, p = %.4f (> 0.001), %d repetitions", chi2,
                         m - 1, p, reps)};
}

Outcome determinism(const Options& options) {
  const fs::path dir = options.work_dir / "determinism";
  fs::create_directories(dir);
  const auto space = sim::generate_dataset(sim::DatasetOptions{}, 3);
  {
    std::ofstream spec(dir / "spec.json");
    save_markspace(spec, space, 1200, 800);
    Rng rng(7);
    const auto task = sim::make_task(space, sim::TaskKind::kMixed, rng);
    const auto session = sim::generate_session(space, task, sim::default_user_model(task), 8);
    std::ofstream log(dir / "log.jsonl");
    save_clicklog(log, session.clicks);
  }
  const std::string base = options.cli + " replay --quiet --seed 42 --spec " +
                           (dir / "spec.json").string() + " --log " + (dir / "log.jsonl").string();
  const int a = run_command(base + " --out " + (dir / "a.csv").string() + " > /dev/null");
  const int b = run_command(base + " --out " + (dir / "b.csv").string() + " > /dev/null");
  if (a != 0 || b != 0) return {false, fmt("replay exited with %d / %d", a, b)};
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string x = slurp(dir / "a.csv");
  const std::string y = slurp(dir / "b.csv");
  const auto rows = std::count(x.begin(), x.end(), '\n') - 1;
  return {x == y && rows > 0,
          fmt("two replays with seed 42: %zu and %zu bytes, %ld rows, %s", x.size(), y.size(),
              static_cast<long>(rows), x == y ? "identical" : "DIFFERENT")};
}

Outcome performance(const Options&) {
  const auto space = sim::generate_dataset(2000, 8, 11);
  FilterParams params;
  ParticleSet ps = init_particles(space, params);
  Rng pick(12);
  std::vector<double> ms;
  const int iterations = 200;
  for (int t = 1; t <= iterations; ++t) {
    const auto click = make_click(space, space.mark(pick.uniform_index(space.size())).id, t);
    const auto start = Clock::now();
    step(ps, click, space, params);
    const auto pred = predict(ps, space, params);
    ms.push_back(seconds_since(start) * 1e3);
    if (pred.entries.size() != params.alpha) return {false, "prediction has wrong size"};
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];
  return {median < 50.0, fmt("median step+predict %.2f ms (< 50 ms), p90 %.2f ms, m=1000, "
                             "2000 marks, %d iterations",
                             median, ms[ms.size() * 9 / 10], iterations)};
}

}  // namespace

int main(int argc, char** argv) {
  Options options;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--cli") options.cli = argv[i + 1];
    else if (key == "--work-dir") options.work_dir = argv[i + 1];
    else if (key == "--only") options.only = argv[i + 1];
    else {
      std::fprintf(stderr, "unknown option %s\n", key.c_str());
      return 2;
    }
  }
  if (options.cli.empty()) {
    std::fprintf(stderr, "usage: %s --cli <clickcast> [--work-dir DIR] [--only NAME]\n", argv[0]);
    return 2;
  }
  fs::create_directories(options.work_dir);

  const std::vector<std::pair<const char*, std::function<Outcome(const Options&)>>> criteria = {
      {"oracle_equivalence", oracle_equivalence},
      {"convergence_in_m", convergence_in_m},
      {"synthetic_study", synthetic_study},
      {"distributional_exactness", distributional_exactness},
      {"resampling_unbiasedness", resampling_unbiasedness},
      {"determinism", determinism},
      {"performance", performance},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!options.only.empty() && options.only != name) continue;
    Outcome o;
    try {
      o = check(options);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
