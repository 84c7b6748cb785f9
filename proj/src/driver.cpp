#include "soncert/driver.hpp"

#include "soncert/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace soncert {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

LambdaOutcome solve_lambda(const Dataset& ds, const AdmmConfig& cfg, ClusterMethod method,
                           const PrimalDualIterate* warm, const AttemptObserver& observer,
                           double time_limit) {
  cfg.validate();
  const auto start = Clock::now();
  LambdaOutcome out;
  if (warm) {
    require_shape(ds, warm->x, "warm start x");
    require_shape(ds, warm->delta, "warm start delta");
    out.state = *warm;
  } else {
    out.state = init_state(ds);
  }

  std::int64_t it = 0;
  bool attempted = false;
  while (it < cfg.max_iters) {
    const std::int64_t steps = std::min<std::int64_t>(cfg.certify_every, cfg.max_iters - it);
    for (std::int64_t k = 0; k < steps; ++k) advance(ds, out.state, cfg, ++it);
    out.certificate = certify(ds, out.state, cfg, method, it);
    attempted = true;
    if (observer) observer(out.certificate);
    if (out.certificate.success() && out.certificate.mu <= cfg.stop_gap) break;
    if (time_limit > 0.0 && seconds_since(start) > time_limit) {
      out.timed_out = true;
      break;
    }
  }
  if (!attempted) {
    out.certificate = certify(ds, out.state, cfg, method, it);
    if (observer) observer(out.certificate);
  }
  out.iterations = it;
  return out;
}

Sample DatasetSource::load() const {
  switch (kind) {
    case Kind::Csv:
      return read_dataset_csv(path);
    case Kind::Moons:
      return gen_half_moons(n, noise, seed);
    case Kind::Mixture:
      return gen_gauss_mixture(n, sep, seed, weights);
  }
  throw ConfigError("unknown dataset source");
}

std::vector<double> parse_lambda_range(const std::string& text) {
  std::istringstream in(text);
  std::string lo_s, hi_s, count_s;
  if (!std::getline(in, lo_s, ':') || !std::getline(in, hi_s, ':') ||
      !std::getline(in, count_s) || in.rdbuf()->in_avail() > 0) {
    throw ConfigError("lambda range must be lo:hi:count, got '" + text + "'");
  }
  double lo = 0, hi = 0;
  long count = 0;
  try {
    std::size_t p1 = 0, p2 = 0, p3 = 0;
    lo = std::stod(lo_s, &p1);
    hi = std::stod(hi_s, &p2);
    count = std::stol(count_s, &p3);
    if (p1 != lo_s.size() || p2 != hi_s.size() || p3 != count_s.size()) throw std::exception();
  } catch (const std::exception&) {
    throw ConfigError("lambda range must be lo:hi:count, got '" + text + "'");
  }
  if (count < 1) throw ConfigError("lambda range count must be at least 1");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return out;
}

void RunConfig::validate() const {
  admm.validate();
  if (lambdas.empty()) throw ConfigError("no lambda values given");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive");
  }
  if (time_limit < 0.0) throw ConfigError("time limit must be non-negative");
  if (!(inner_radius > 0.0)) throw ConfigError("inner radius must be positive");
  if (threads < 0) throw ConfigError("thread count must be non-negative");
}

bool RunReport::all_success() const {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.success; });
}

std::string verdict_name(bool success) { return success ? "success" : "failure-at-cap"; }

int worker_slots(int requested, int jobs) {
  int slots = requested;
  if (slots <= 0) {
    if (const char* env = std::getenv("SON_CERTIFY_THREADS")) slots = std::atoi(env);
  }
  if (slots <= 0) slots = static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(slots, 1, std::max(1, jobs));
}

namespace {

LambdaRecord make_record(const Sample& sample, double lambda, const LambdaOutcome& out,
                         const std::vector<int>& inner, double wall) {
  LambdaRecord rec;
  rec.lambda = lambda;
  rec.iterations = out.iterations;
  rec.mu = out.certificate.mu;
  rec.success = out.success();
  rec.clustering = out.certificate.clustering;
  rec.certificate = out.certificate;
  rec.wall_seconds = wall;
  const auto& labels = sample.truth.labels;
  if (labels.size() == static_cast<std::size_t>(sample.a.rows())) {
    rec.rand_index = modified_rand_index(rec.clustering, labels);
    if (!inner.empty()) {
      std::vector<int> inner_labels;
      for (int i : inner) inner_labels.push_back(labels[i]);
      rec.inner_rand_index =
          modified_rand_index(restrict_clustering(rec.clustering, inner), inner_labels);
    }
  }
  return rec;
}

std::string certificate_name(std::size_t k) {
  std::ostringstream name;
  name << "lambda_" << std::setw(3) << std::setfill('0') << k << ".json";
  return name.str();
}

}  // namespace

RunReport run_sweep(const RunConfig& cfg, const AttemptObserver& observer) {
  cfg.validate();
  RunReport report;
  report.sample = cfg.source.load();
  report.nu = cfg.admm.nu;
  report.warm_start = cfg.warm_start;

  std::vector<double> lambdas = cfg.lambdas;
  std::sort(lambdas.begin(), lambdas.end());
  // Validates data once before any worker starts.
  const Dataset base = report.sample.dataset(lambdas.front());

  std::vector<int> inner;
  if (report.sample.truth.centers.rows() > 0) inner = inner_subset(report.sample, cfg.inner_radius);

  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir / "certificates", ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string());
  }

  report.records.resize(lambdas.size());
  std::mutex observer_mutex;
  AttemptObserver guarded;
  if (observer) {
    guarded = [&](const Certificate& c) {
      std::lock_guard<std::mutex> lock(observer_mutex);
      observer(c);
    };
  }

  auto run_one = [&](std::size_t k, const PrimalDualIterate* warm, PrimalDualIterate* final_state) {
    const auto start = Clock::now();
    const Dataset ds = base.with_lambda(lambdas[k]);
    LambdaOutcome out = solve_lambda(ds, cfg.admm, cfg.method, warm, guarded, cfg.time_limit);
    report.records[k] = make_record(report.sample, lambdas[k], out, inner, seconds_since(start));
    if (final_state) *final_state = std::move(out.state);
  };

  if (cfg.warm_start) {
    PrimalDualIterate previous;
    bool have_previous = false;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      PrimalDualIterate next;
      run_one(k, have_previous ? &previous : nullptr, &next);
      previous = std::move(next);
      have_previous = true;
    }
  } else {
    const int slots = worker_slots(cfg.threads, static_cast<int>(lambdas.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (int w = 0; w < slots; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next++; k < lambdas.size(); k = next++) {
          try {
            run_one(k, nullptr, nullptr);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = lambdas.size();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    auto& rec = report.records[k];
    const auto doc = certificate_to_json(base.with_lambda(rec.lambda), rec.certificate);
    rec.digest = certificate_digest(doc);
    if (!cfg.out_dir.empty()) write_json(cfg.out_dir / "certificates" / certificate_name(k), doc);
  }

  if (!cfg.out_dir.empty()) {
    write_dataset_csv(cfg.out_dir / "dataset.csv", report.sample);
    write_report_csv(cfg.out_dir / "report.csv", report);

    nlohmann::json meta;
    meta["nu"] = cfg.admm.nu;
    meta["certify_every"] = cfg.admm.certify_every;
    meta["max_iters"] = cfg.admm.max_iters;
    meta["stop_gap"] = cfg.admm.stop_gap;
    meta["method"] = to_string(cfg.method);
    meta["warm_start"] = cfg.warm_start;
    meta["time_limit"] = cfg.time_limit;
    meta["seed"] = cfg.source.seed;
    meta["inner_radius"] = cfg.inner_radius;
    meta["inner_points"] = inner.size();
    meta["moon_arc"] = "upper: (cos(t+pi/2), sin(t+pi/2)); lower: (1-cos(t+pi/2), 1/2-sin(t+pi/2))";
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const auto& rec = report.records[k];
      runs.push_back({{"lambda", rec.lambda},
                      {"certificate", "certificates/" + certificate_name(k)},
                      {"wall_seconds", rec.wall_seconds},
                      {"timed_out_or_capped", !rec.success}});
    }
    meta["runs"] = std::move(runs);
    write_json(cfg.out_dir / "run.json", meta);
  }
  return report;
}

namespace {

std::string optional_real(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

void write_report_csv(const std::filesystem::path& path, const RunReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "lambda,iterations,mu,verdict,clusters,rand_index,inner_rand_index,digest,assignment\n";
  for (const auto& rec : report.records) {
    out << format_real(rec.lambda) << "," << rec.iterations << "," << format_real(rec.mu) << ","
        << verdict_name(rec.success) << "," << rec.clustering.size() << ","
        << optional_real(rec.rand_index) << "," << optional_real(rec.inner_rand_index) << ","
        << rec.digest << ",";
    for (std::size_t i = 0; i < rec.clustering.assignment.size(); ++i) {
      out << (i ? " " : "") << rec.clustering.assignment[i];
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("lambda,iterations,mu,verdict", 0) != 0) {
    throw IoError(path.string() + " is not a sweep report");
  }
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    while (f.size() < 9) f.emplace_back();
    try {
      ReportRow row;
      row.lambda = std::stod(f[0]);
      row.iterations = std::stoll(f[1]);
      row.mu = std::stod(f[2]);
      row.success = f[3] == "success";
      row.rand_index = parse_optional(f[5]);
      row.inner_rand_index = parse_optional(f[6]);
      rows.push_back(row);
    } catch (const std::exception&) {
      throw IoError(path.string() + ": malformed row '" + line + "'");
    }
  }
  return rows;
}

void emit_plot_data(const std::vector<ReportRow>& rows, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };
  auto iters = open("iterations.csv");
  auto rand = open("rand_index.csv");
  auto gap = open("gap.csv");
  iters << "lambda,iterations\n";
  rand << "lambda,rand_index\n";
  gap << "lambda,mu\n";
  const bool has_inner =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.inner_rand_index; });
  std::ofstream inner;
  if (has_inner) {
    inner = open("inner_rand_index.csv");
    inner << "lambda,rand_index\n";
  }
  for (const auto& r : rows) {
    const std::string l = format_real(r.lambda);
    iters << l << "," << r.iterations << "\n";
    rand << l << "," << (r.rand_index ? format_real(*r.rand_index) : "nan") << "\n";
    gap << l << "," << format_real(r.mu) << "\n";
    if (has_inner) {
      inner << l << "," << (r.inner_rand_index ? format_real(*r.inner_rand_index) : "nan") << "\n";
    }
  }
  if (!iters || !rand || !gap || (has_inner && !inner)) {
    throw IoError("failed writing plot data in " + dir.string());
  }
}

}  // namespace soncert
