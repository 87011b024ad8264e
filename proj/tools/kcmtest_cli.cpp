// Command-line harness for the kcmtest shared library. Talks to the core
// exclusively through the C API in kcmtest.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kcmtest.h"

namespace {

struct CommonOpts {
  std::vector<std::string> stats;
  std::string select = "nasym";
  int grid_size = 9;
  double lambda = 0.15;
  double tau = 0.11;
  double split = 0.15;
  int boot = 500;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_path;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_format) {
  cmd->add_option("--stat", o.stats,
                  "statistic token: basic|basic:all|generic:<scheme>|"
                  "divergent:<scheme>|gp|gp:trc|icm|icm:trc")
      ->required();
  cmd->add_option("--select", o.select, "kernel selection method: nasym|asym");
  cmd->add_option("--grid-size", o.grid_size, "bandwidth grid size");
  cmd->add_option("--lambda", o.lambda, "asymptotic-selection regularizer");
  cmd->add_option("--tau", o.tau, "truncation fraction J = floor(tau N)");
  cmd->add_option("--split", o.split, "training fraction");
  cmd->add_option("--boot", o.boot, "bootstrap replicates B");
  cmd->add_option("--alpha", o.alpha, "nominal level");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
  cmd->add_option("--out", o.out_path, "output path (default stdout)");
  if (with_format) {
    cmd->add_option("--format", o.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
  }
}

int die(kcm_status status) {
  std::cerr << "error: " << kcm_last_error() << "\n";
  return static_cast<int>(status);
}

int write_out(const std::string& path, const char* text) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return static_cast<int>(KCM_ERROR_DATA);
  }
  out << text;
  return 0;
}

using ConfigPtr = std::unique_ptr<kcm_config, decltype(&kcm_config_free)>;

ConfigPtr build_config(const CommonOpts& o, kcm_status& status) {
  ConfigPtr cfg(kcm_config_new(), &kcm_config_free);
  auto set = [&](const char* key, const std::string& value) {
    if (status == KCM_OK) status = kcm_config_set(cfg.get(), key, value.c_str());
  };
  status = KCM_OK;
  set("select", o.select);
  set("grid-size", std::to_string(o.grid_size));
  set("lambda", std::to_string(o.lambda));
  set("tau", std::to_string(o.tau));
  set("split", std::to_string(o.split));
  set("boot", std::to_string(o.boot));
  set("alpha", std::to_string(o.alpha));
  set("seed", std::to_string(o.seed));
  set("threads", std::to_string(o.threads));
  for (const auto& s : o.stats) {
    if (status == KCM_OK) status = kcm_config_add_statistic(cfg.get(), s.c_str());
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kcmtest: power-boosted kernel conditional-moment "
               "specification tests"};
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo size/power study on a synthetic DGP");
  CommonOpts sim;
  std::vector<std::string> sim_dgps;
  int sim_n = 200, sim_q = 10, sim_reps = 500;
  bool sim_records = false;
  simulate->add_option("--dgp", sim_dgps, "dgp1..dgp7 (repeatable)")
      ->required();
  simulate->add_option("--n", sim_n, "sample size N");
  simulate->add_option("--q", sim_q, "covariate dimension");
  simulate->add_option("--reps", sim_reps, "Monte Carlo replications");
  simulate->add_flag("--records", sim_records,
                     "emit per-replication records instead of the table");
  add_common(simulate, sim, true);

  // test --------------------------------------------------------------------
  auto* test = app.add_subcommand(
      "test", "run the specification test on a CSV dataset (y, X...)");
  CommonOpts tst;
  std::string csv_path;
  test->add_option("csv", csv_path, "input CSV path")->required();
  add_common(test, tst, false);

  // sweep -------------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "power across truncation levels J (plottable CSV)");
  CommonOpts swp;
  std::string swp_dgp = "dgp5";
  int swp_n = 200, swp_q = 10, swp_reps = 200;
  std::vector<int> swp_J;
  sweep->add_option("--dgp", swp_dgp, "dgp1..dgp7")->required();
  sweep->add_option("--n", swp_n, "sample size N");
  sweep->add_option("--q", swp_q, "covariate dimension");
  sweep->add_option("--reps", swp_reps, "Monte Carlo replications");
  sweep->add_option("--J-values", swp_J, "truncation levels to sweep")
      ->required()
      ->delimiter(',');
  add_common(sweep, swp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(KCM_ERROR_USAGE);
  }

  if (simulate->parsed()) {
    kcm_status status = KCM_OK;
    auto cfg = build_config(sim, status);
    if (status != KCM_OK) return die(status);
    if (kcm_config_set(cfg.get(), "n", std::to_string(sim_n).c_str()) != KCM_OK ||
        kcm_config_set(cfg.get(), "q", std::to_string(sim_q).c_str()) != KCM_OK ||
        kcm_config_set(cfg.get(), "reps", std::to_string(sim_reps).c_str()) !=
            KCM_OK) {
      return die(KCM_ERROR_USAGE);
    }
    std::string combined;
    bool header_done = false;
    for (const auto& dgp : sim_dgps) {
      if ((status = kcm_config_set(cfg.get(), "dgp", dgp.c_str())) != KCM_OK) {
        return die(status);
      }
      kcm_report* report = nullptr;
      if ((status = kcm_run_monte_carlo(cfg.get(), &report)) != KCM_OK) {
        return die(status);
      }
      char* text = nullptr;
      status = sim_records ? kcm_report_records(report, &text)
                           : kcm_report_table(report, sim.format.c_str(), &text);
      if (status != KCM_OK) {
        kcm_report_free(report);
        return die(status);
      }
      std::string chunk = text;
      kcm_string_free(text);
      kcm_report_free(report);
      if (sim.format == "csv" && header_done) {
        chunk.erase(0, chunk.find('\n') + 1);  // drop repeated header
      }
      header_done = true;
      combined += chunk;
    }
    return write_out(sim.out_path, combined.c_str());
  }

  if (test->parsed()) {
    kcm_status status = KCM_OK;
    auto cfg = build_config(tst, status);
    if (status != KCM_OK) return die(status);
    kcm_dataset* data = nullptr;
    if ((status = kcm_dataset_read_csv(csv_path.c_str(), &data)) != KCM_OK) {
      return die(status);
    }
    kcm_result* result = nullptr;
    status = kcm_run_test(data, cfg.get(), &result);
    kcm_dataset_free(data);
    if (status != KCM_OK) return die(status);
    char* text = nullptr;
    status = kcm_result_json(result, &text);
    if (status != KCM_OK) {
      kcm_result_free(result);
      return die(status);
    }
    const int rc = write_out(tst.out_path, text);
    kcm_string_free(text);
    kcm_result_free(result);
    return rc;
  }

  if (sweep->parsed()) {
    kcm_status status = KCM_OK;
    auto cfg = build_config(swp, status);
    if (status != KCM_OK) return die(status);
    if (kcm_config_set(cfg.get(), "dgp", swp_dgp.c_str()) != KCM_OK ||
        kcm_config_set(cfg.get(), "n", std::to_string(swp_n).c_str()) != KCM_OK ||
        kcm_config_set(cfg.get(), "q", std::to_string(swp_q).c_str()) != KCM_OK ||
        kcm_config_set(cfg.get(), "reps", std::to_string(swp_reps).c_str()) !=
            KCM_OK) {
      return die(KCM_ERROR_USAGE);
    }
    kcm_report* report = nullptr;
    status = kcm_run_sweep(cfg.get(), swp_J.data(),
                           static_cast<int64_t>(swp_J.size()), &report);
    if (status != KCM_OK) return die(status);
    char* text = nullptr;
    status = kcm_report_table(report, "csv", &text);
    if (status != KCM_OK) {
      kcm_report_free(report);
      return die(status);
    }
    const int rc = write_out(swp.out_path, text);
    kcm_string_free(text);
    kcm_report_free(report);
    return rc;
  }

  return static_cast<int>(KCM_ERROR_USAGE);
}
