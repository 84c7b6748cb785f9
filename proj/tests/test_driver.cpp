#include "doctest.h"
#include "helpers.hpp"

#include "soncert/driver.hpp"
#include "soncert/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace soncert;
using namespace testing_support;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("soncert_driver_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path two_point_csv(const std::filesystem::path& dir) {
  std::ofstream(dir / "two.csv") << "x1,weight\n0,1\n1,1\n";
  return dir / "two.csv";
}

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("lambda ranges") {
  const auto v = parse_lambda_range("0.1:0.4:4");
  REQUIRE(v.size() == 4u);
  CHECK(v[0] == 0.1);
  CHECK(v[3] == 0.4);
  CHECK(v[1] == doctest::Approx(0.2));
  CHECK(parse_lambda_range("0.5:9:1") == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_lambda_range("0.1:0.4:0"), ConfigError);
  CHECK_THROWS_AS(parse_lambda_range("0.1:0.4"), ConfigError);
  CHECK_THROWS_AS(parse_lambda_range("a:b:c"), ConfigError);
  CHECK_THROWS_AS(parse_lambda_range("0.1:0.4:3:5"), ConfigError);
}

TEST_CASE("run config validation") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.lambdas = {0.5, -1.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.lambdas = {0.5};
  CHECK_NOTHROW(cfg.validate());
  CHECK_FALSE(cfg.warm_start);
}

TEST_CASE("two-point sweep certifies both regimes") {
  const auto dir = scratch_dir("two");
  RunConfig cfg;
  cfg.source.path = two_point_csv(dir);
  cfg.lambdas = {0.6, 0.3};
  cfg.out_dir = dir / "run";
  const RunReport rep = run_sweep(cfg);
  REQUIRE(rep.records.size() == 2u);
  CHECK(rep.records[0].lambda == 0.3);
  CHECK(rep.records[0].success);
  CHECK(rep.records[0].clustering.clusters == std::vector<std::vector<int>>{{0}, {1}});
  CHECK(rep.records[1].success);
  CHECK(rep.records[1].clustering.clusters == std::vector<std::vector<int>>{{0, 1}});
  CHECK(rep.exit_code() == 0);

  CHECK(std::filesystem::exists(dir / "run" / "report.csv"));
  CHECK(std::filesystem::exists(dir / "run" / "run.json"));
  for (const auto& entry : std::filesystem::directory_iterator(dir / "run" / "certificates")) {
    CHECK(verify_certificate(entry.path(), dir / "run" / "dataset.csv").pass);
  }
  const auto meta = read_json(dir / "run" / "run.json");
  CHECK(meta["warm_start"] == false);
  CHECK(meta["nu"] == 1.0);
}

TEST_CASE("records keep the cap verdict") {
  const auto dir = scratch_dir("cap");
  RunConfig cfg;
  cfg.source.path = two_point_csv(dir);
  cfg.lambdas = {0.3};
  cfg.admm.max_iters = 8;
  cfg.admm.stop_gap = 1e-300;  // success alone is not enough to stop
  const RunReport rep = run_sweep(cfg);
  CHECK(rep.records[0].iterations == 8);
  CHECK(rep.exit_code() == (rep.all_success() ? 0 : 1));
}

TEST_CASE("exit code zero implies every verdict is success") {
  const auto dir = scratch_dir("exit");
  RunConfig cfg;
  cfg.source.path = two_point_csv(dir);
  cfg.lambdas = {0.2, 0.35, 0.8};
  const RunReport rep = run_sweep(cfg);
  if (rep.exit_code() == 0) {
    for (const auto& r : rep.records) CHECK(r.success);
  }
  CHECK(rep.exit_code() == 0);
}

TEST_CASE("identical configs give byte-identical reports") {
  const auto dir = scratch_dir("determinism");
  RunConfig cfg;
  cfg.source.kind = DatasetSource::Kind::Mixture;
  cfg.source.n = 30;
  cfg.source.seed = 5;
  cfg.lambdas = parse_lambda_range("0.5:1.5:4");
  cfg.admm.max_iters = 2000;
  cfg.out_dir = dir / "a";
  run_sweep(cfg);
  cfg.out_dir = dir / "b";
  cfg.threads = 1;
  run_sweep(cfg);
  CHECK(slurp(dir / "a" / "report.csv") == slurp(dir / "b" / "report.csv"));
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a" / "certificates")) {
    CHECK(slurp(entry.path()) == slurp(dir / "b" / "certificates" / entry.path().filename()));
  }
}

TEST_CASE("warm start runs sequentially and is recorded") {
  const auto dir = scratch_dir("warm");
  RunConfig cfg;
  cfg.source.path = two_point_csv(dir);
  cfg.lambdas = {0.3, 0.7};
  cfg.warm_start = true;
  cfg.out_dir = dir / "run";
  const RunReport rep = run_sweep(cfg);
  CHECK(rep.warm_start);
  CHECK(rep.all_success());
  CHECK(read_json(dir / "run" / "run.json")["warm_start"] == true);
}

TEST_CASE("ground truth scores are reported") {
  RunConfig cfg;
  cfg.source.kind = DatasetSource::Kind::Mixture;
  cfg.source.n = 20;
  cfg.lambdas = {1.0};
  cfg.admm.max_iters = 400;
  const RunReport rep = run_sweep(cfg);
  REQUIRE(rep.records[0].rand_index.has_value());
  REQUIRE(rep.records[0].inner_rand_index.has_value());
  CHECK(*rep.records[0].rand_index >= 0.0);
  CHECK(*rep.records[0].rand_index <= 1.0);
}

TEST_CASE("unreadable dataset and unwritable output are io errors") {
  RunConfig cfg;
  cfg.source.path = "/nonexistent/data.csv";
  cfg.lambdas = {0.5};
  CHECK_THROWS_AS(run_sweep(cfg), IoError);

  const auto dir = scratch_dir("unwritable");
  cfg.source.path = two_point_csv(dir);
  std::ofstream(dir / "file") << "x";
  cfg.out_dir = dir / "file" / "sub";
  CHECK_THROWS_AS(run_sweep(cfg), IoError);
}

TEST_CASE("observer sees every attempt") {
  const Dataset ds = two_point(0.3);
  AdmmConfig cfg;
  cfg.stop_gap = 1e-14;
  int attempts = 0;
  const LambdaOutcome out = solve_lambda(ds, cfg, ClusterMethod::Graph, nullptr,
                                         [&](const Certificate&) { ++attempts; });
  CHECK(attempts == out.iterations / 8);
  CHECK(out.success());
  CHECK(out.certificate.mu <= 1e-14);
}

TEST_CASE("plot data") {
  const auto dir = scratch_dir("plot");
  RunConfig cfg;
  cfg.source.kind = DatasetSource::Kind::Moons;
  cfg.source.n = 24;
  cfg.source.noise = 0.05;
  cfg.lambdas = parse_lambda_range("0.1:2.4:24");
  cfg.admm.max_iters = 64;
  cfg.out_dir = dir / "run";
  run_sweep(cfg);
  const auto rows = read_report_csv(dir / "run" / "report.csv");
  CHECK(rows.size() == 24u);
  emit_plot_data(rows, dir / "plots");
  for (const char* name : {"iterations.csv", "rand_index.csv", "gap.csv"}) {
    std::ifstream in(dir / "plots" / name);
    std::string line;
    int count = -1;
    std::string header;
    std::getline(in, header);
    while (std::getline(in, line)) ++count;
    CHECK(count + 1 == 24);
  }
  std::ifstream it(dir / "plots" / "iterations.csv");
  std::string header;
  std::getline(it, header);
  CHECK(header == "lambda,iterations");
  std::ifstream ri(dir / "plots" / "rand_index.csv");
  std::getline(ri, header);
  CHECK(header == "lambda,rand_index");

  emit_plot_data({rows.front()}, dir / "single");
  std::ifstream single(dir / "single" / "gap.csv");
  int lines = 0;
  std::string line;
  while (std::getline(single, line)) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("worker slots honour the environment") {
  setenv("SON_CERTIFY_THREADS", "3", 1);
  CHECK(worker_slots(0, 10) == 3);
  CHECK(worker_slots(0, 2) == 2);
  CHECK(worker_slots(5, 10) == 5);
  unsetenv("SON_CERTIFY_THREADS");
  CHECK(worker_slots(0, 1) == 1);
}

}
