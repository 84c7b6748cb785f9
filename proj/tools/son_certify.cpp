// son-certify: weighted sum-of-norms clustering with certified cluster recovery.
//
//   son-certify solve --data pts.csv --lambda-range 0.1:2:24 --out run/
//   son-certify solve --gen mixture --n 100 --seed 1 --lambda 0.95 --nu 10 --out run/
//   son-certify verify run/certificates/lambda_000.json run/dataset.csv
//   son-certify gen moons --n 200 --seed 3 --out moons.csv
//   son-certify plotdata run/report.csv --out run/plots
//
// Exit codes: 0 all certified / ok, 1 some lambda hit the cap (or verify
// failed), 2 I/O error, 3 configuration error, 4 numerical breakdown.

#include "soncert/driver.hpp"
#include "soncert/io.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace soncert;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

struct GenOptions {
  std::string kind;
  int n = 100;
  double noise = 0.1;
  double sep = 4.0;
  std::string weights = "mixture";
  std::uint64_t seed = 1;
};

DatasetSource make_source(const GenOptions& g, const std::string& data) {
  DatasetSource src;
  src.seed = g.seed;
  src.n = g.n;
  src.noise = g.noise;
  src.sep = g.sep;
  src.weights = parse_mixture_weights(g.weights);
  if (!data.empty()) {
    if (!g.kind.empty()) throw ConfigError("--data and --gen are mutually exclusive");
    src.kind = DatasetSource::Kind::Csv;
    src.path = data;
  } else if (g.kind == "moons") {
    src.kind = DatasetSource::Kind::Moons;
  } else if (g.kind == "mixture") {
    src.kind = DatasetSource::Kind::Mixture;
  } else if (g.kind.empty()) {
    throw ConfigError("solve needs --data or --gen");
  } else {
    throw ConfigError("unknown generator '" + g.kind + "' (expected moons|mixture)");
  }
  return src;
}

void add_gen_options(CLI::App* cmd, GenOptions& g) {
  cmd->add_option("--n", g.n, "number of points");
  cmd->add_option("--noise", g.noise, "half-moon noise sd");
  cmd->add_option("--sep", g.sep, "mixture mean separation in sds");
  cmd->add_option("--weights", g.weights, "mixture weights: mixture|component");
  cmd->add_option("--seed", g.seed, "generator seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted sum-of-norms clustering with certificates"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run ADMM with periodic certification over a lambda sweep");
  std::string data;
  GenOptions gen;
  std::vector<double> lambdas;
  std::string range;
  RunConfig cfg;
  std::string method = "graph";
  solve->add_option("--data", data, "dataset CSV (x1..xd,weight[,label])");
  solve->add_option("--gen", gen.kind, "generate the dataset instead: moons|mixture");
  add_gen_options(solve, gen);
  solve->add_option("--lambda", lambdas, "lambda values")->delimiter(',');
  solve->add_option("--lambda-range", range, "linspace lo:hi:count");
  solve->add_option("--nu", cfg.admm.nu, "ADMM penalty")->capture_default_str();
  solve->add_option("--certify-every", cfg.admm.certify_every, "iterations between certification attempts")
      ->capture_default_str();
  solve->add_option("--max-iters", cfg.admm.max_iters, "iteration cap per lambda")->capture_default_str();
  solve->add_option("--stop-gap", cfg.admm.stop_gap, "after success, continue until mu <= this")
      ->capture_default_str();
  solve->add_option("--method", method, "cluster finding: ball|graph")->capture_default_str();
  solve->add_option("--out", cfg.out_dir, "output directory");
  solve->add_flag("--warm-start", cfg.warm_start, "start each lambda from the previous solution");
  solve->add_option("--time-limit", cfg.time_limit, "wall-clock seconds per lambda (0 = none)");
  solve->add_option("--inner-radius", cfg.inner_radius, "inner subset radius in sds")->capture_default_str();
  solve->add_option("--threads", cfg.threads, "worker slots (default SON_CERTIFY_THREADS or all cores)");

  // verify
  auto* verify = app.add_subcommand("verify", "re-check a certificate against its dataset");
  std::string cert_path, cert_data;
  verify->add_option("certificate", cert_path, "certificate JSON")->required();
  verify->add_option("dataset", cert_data, "dataset CSV")->required();

  // gen
  auto* gencmd = app.add_subcommand("gen", "write a synthetic dataset CSV");
  GenOptions gen_only;
  std::string gen_out;
  gencmd->add_option("kind", gen_only.kind, "moons|mixture")->required();
  add_gen_options(gencmd, gen_only);
  gencmd->add_option("--out", gen_out, "output CSV")->required();

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "emit plot series from a sweep report");
  std::string report_path, plot_out;
  plot->add_option("report", report_path, "report.csv from solve")->required();
  plot->add_option("--out", plot_out, "output directory (default: next to the report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) {
      cfg.source = make_source(gen, data);
      cfg.method = parse_cluster_method(method);
      cfg.lambdas = lambdas;
      if (!range.empty()) {
        const auto more = parse_lambda_range(range);
        cfg.lambdas.insert(cfg.lambdas.end(), more.begin(), more.end());
      }
      const RunReport report = run_sweep(cfg);
      std::cout << "nu=" << cfg.admm.nu << " warm_start=" << (cfg.warm_start ? "on" : "off") << "\n";
      for (const auto& rec : report.records) {
        std::cout << "lambda=" << format_real(rec.lambda) << " " << verdict_name(rec.success)
                  << " iterations=" << rec.iterations << " clusters=" << rec.clustering.size()
                  << " mu=" << rec.mu;
        if (rec.rand_index) std::cout << " rand=" << *rec.rand_index;
        if (rec.inner_rand_index) std::cout << " inner_rand=" << *rec.inner_rand_index;
        std::cout << "\n";
      }
      return report.exit_code();
    }
    if (*verify) {
      const VerifyResult r = verify_certificate(std::filesystem::path(cert_path), cert_data);
      if (r.pass) {
        std::cout << "pass clusters=" << r.clusters << " mu=" << r.mu << "\n";
        return 0;
      }
      std::cout << "fail " << r.violation << ": " << r.detail << "\n";
      return 1;
    }
    if (*gencmd) {
      write_dataset_csv(gen_out, make_source(gen_only, "").load());
      return 0;
    }
    if (*plot) {
      std::filesystem::path dir = plot_out.empty()
                                      ? std::filesystem::path(report_path).parent_path() / "plots"
                                      : std::filesystem::path(plot_out);
      emit_plot_data(read_report_csv(report_path), dir);
      return 0;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    // ConfigError, DimensionError and InvalidDataError all land here.
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
