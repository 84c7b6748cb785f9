#pragma once

// The sweep driver: per-lambda ADMM with periodic certification, report and
// certificate persistence, and plot-data emission.

#include "soncert/admm.hpp"
#include "soncert/certify.hpp"
#include "soncert/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace soncert {

/// Called after every certification attempt.
using AttemptObserver = std::function<void(const Certificate&)>;

struct LambdaOutcome {
  PrimalDualIterate state;
  Certificate certificate;  ///< last attempt
  std::int64_t iterations = 0;
  bool timed_out = false;
  bool success() const { return certificate.success(); }
};

/// Runs ADMM from `warm` (or the cold start), certifying every
/// cfg.certify_every iterations, until success, max_iters or time_limit
/// seconds (0 = no limit).
LambdaOutcome solve_lambda(const Dataset& ds, const AdmmConfig& cfg, ClusterMethod method,
                           const PrimalDualIterate* warm = nullptr,
                           const AttemptObserver& observer = {}, double time_limit = 0.0);

struct DatasetSource {
  enum class Kind { Csv, Moons, Mixture };
  Kind kind = Kind::Csv;
  std::filesystem::path path;
  int n = 100;
  double noise = 0.1;  ///< half moons
  double sep = 4.0;    ///< mixture, in component sds
  MixtureWeights weights = MixtureWeights::Mixture;
  std::uint64_t seed = 1;

  Sample load() const;
};

/// "lo:hi:count", count >= 1. Throws ConfigError.
std::vector<double> parse_lambda_range(const std::string& text);

struct RunConfig {
  DatasetSource source;
  std::vector<double> lambdas;
  AdmmConfig admm;
  ClusterMethod method = ClusterMethod::Graph;
  std::filesystem::path out_dir;  ///< empty: nothing is written
  bool warm_start = false;
  double time_limit = 0.0;  ///< seconds per lambda, 0 = none
  double inner_radius = 0.7;
  int threads = 0;  ///< 0: SON_CERTIFY_THREADS or hardware concurrency

  void validate() const;
};

struct LambdaRecord {
  double lambda = 0.0;
  std::int64_t iterations = 0;
  double mu = 0.0;
  bool success = false;
  CandidateClustering clustering;
  std::optional<double> rand_index;
  std::optional<double> inner_rand_index;
  std::string digest;
  double wall_seconds = 0.0;
  Certificate certificate;
};

struct RunReport {
  Sample sample;
  double nu = 1.0;
  bool warm_start = false;
  std::vector<LambdaRecord> records;  ///< ascending lambda

  bool all_success() const;
  int exit_code() const { return all_success() ? 0 : 1; }
};

/// Worker slots for the sweep: SON_CERTIFY_THREADS when set, else hardware
/// concurrency, never more than `jobs`.
int worker_slots(int requested, int jobs);

/// Throws ConfigError for a bad config and IoError for unreadable input or
/// unwritable output.
RunReport run_sweep(const RunConfig& cfg, const AttemptObserver& observer = {});

/// report.csv: lambda,iterations,mu,verdict,clusters,rand_index,
/// inner_rand_index,digest,assignment. No timing columns.
void write_report_csv(const std::filesystem::path& path, const RunReport& report);

struct ReportRow {
  double lambda = 0.0;
  std::int64_t iterations = 0;
  double mu = 0.0;
  bool success = false;
  std::optional<double> rand_index;
  std::optional<double> inner_rand_index;
};
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);

/// iterations.csv, rand_index.csv and gap.csv (plus inner_rand_index.csv when
/// the report has inner scores) in `dir`.
void emit_plot_data(const std::vector<ReportRow>& rows, const std::filesystem::path& dir);

std::string verdict_name(bool success);

}  // namespace soncert
