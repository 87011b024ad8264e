#include "kcmtest.h"

#include <cstring>
#include <memory>
#include <string>

#include "kcm/csv.hpp"
#include "kcm/error.hpp"
#include "kcm/harness.hpp"

namespace {

thread_local std::string g_last_error;

kcm_status fail(const std::exception& e) {
  g_last_error = e.what();
  if (const auto* err = dynamic_cast<const kcm::Error*>(&e)) {
    return static_cast<kcm_status>(static_cast<int>(err->kind()));
  }
  return KCM_ERROR_NUMERIC;
}

template <typename Fn>
kcm_status guarded(Fn&& fn) {
  try {
    fn();
    return KCM_OK;
  } catch (const std::exception& e) {
    return fail(e);
  } catch (...) {
    g_last_error = "unknown error";
    return KCM_ERROR_NUMERIC;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct kcm_dataset {
  kcm::dgp::Dataset data;
};

struct kcm_config {
  kcm::harness::ExperimentConfig config;
};

struct kcm_result {
  std::vector<kcm::bootstrap::TestOutcome> outcomes;
  kcm::harness::ExperimentConfig config;
  Eigen::Index n = 0;
  Eigen::Index q = 0;
};

struct kcm_report {
  // Exactly one of the two is populated.
  std::optional<kcm::harness::ExperimentReport> mc;
  std::optional<kcm::harness::SweepReport> sweep;
};

extern "C" {

const char* kcm_version(void) { return "0.1.0"; }

const char* kcm_last_error(void) { return g_last_error.c_str(); }

kcm_status kcm_dataset_read_csv(const char* path, kcm_dataset** out) {
  return guarded([&] {
    if (path == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_dataset_read_csv: null argument");
    }
    auto* handle = new kcm_dataset{kcm::csv::read_dataset_file(path)};
    *out = handle;
  });
}

kcm_status kcm_dataset_from_arrays(const double* y, const double* x, int64_t n,
                                   int64_t q, kcm_dataset** out) {
  return guarded([&] {
    if (y == nullptr || x == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_dataset_from_arrays: null argument");
    }
    if (n < 2 || q < 1) {
      kcm::throw_data("kcm_dataset_from_arrays: need n >= 2 and q >= 1");
    }
    kcm::dgp::Dataset data;
    data.y = Eigen::Map<const Eigen::VectorXd>(y, n);
    data.X = Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>(x, n, q);
    *out = new kcm_dataset{std::move(data)};
  });
}

kcm_status kcm_dataset_generate(const char* dgp_id, int64_t n, int64_t q,
                                uint64_t seed, kcm_dataset** out) {
  return guarded([&] {
    if (dgp_id == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_dataset_generate: null argument");
    }
    kcm::dgp::DgpSpec spec;
    spec.id = kcm::dgp::parse_dgp(dgp_id);
    spec.n = static_cast<int>(n);
    spec.q = static_cast<int>(q);
    *out = new kcm_dataset{kcm::dgp::generate(spec, seed)};
  });
}

int64_t kcm_dataset_rows(const kcm_dataset* data) {
  return data == nullptr ? -1 : static_cast<int64_t>(data->data.rows());
}

int64_t kcm_dataset_cols(const kcm_dataset* data) {
  return data == nullptr ? -1 : static_cast<int64_t>(data->data.cols());
}

void kcm_dataset_free(kcm_dataset* data) { delete data; }

kcm_config* kcm_config_new(void) { return new kcm_config{}; }

void kcm_config_free(kcm_config* config) { delete config; }

kcm_status kcm_config_set(kcm_config* config, const char* key,
                          const char* value) {
  return guarded([&] {
    if (config == nullptr || key == nullptr || value == nullptr) {
      kcm::throw_usage("kcm_config_set: null argument");
    }
    auto& c = config->config;
    const std::string k = key;
    const std::string v = value;
    auto as_int = [&](const char* what) {
      try {
        return std::stoi(v);
      } catch (const std::exception&) {
        kcm::throw_usage(std::string("config ") + what + ": bad integer '" +
                         v + "'");
      }
    };
    auto as_double = [&](const char* what) {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        kcm::throw_usage(std::string("config ") + what + ": bad number '" + v +
                         "'");
      }
    };
    if (k == "dgp") {
      c.dgp.id = kcm::dgp::parse_dgp(v);
    } else if (k == "n") {
      c.dgp.n = as_int("n");
    } else if (k == "q") {
      c.dgp.q = as_int("q");
    } else if (k == "reps") {
      c.replications = as_int("reps");
    } else if (k == "seed") {
      c.master_seed = std::stoull(v);
    } else if (k == "threads") {
      c.threads = as_int("threads");
    } else if (k == "boot") {
      c.B = as_int("boot");
    } else if (k == "alpha") {
      c.alpha = as_double("alpha");
    } else if (k == "tau") {
      c.tau = as_double("tau");
    } else if (k == "split") {
      c.split_frac = as_double("split");
    } else if (k == "grid-size") {
      c.grid_size = as_int("grid-size");
    } else if (k == "lambda") {
      c.lambda = as_double("lambda");
    } else if (k == "j-override") {
      c.J_override = as_int("j-override");
    } else if (k == "select") {
      if (v == "nasym") {
        c.select = kcm::selection::SelectionMethod::NonAsymptotic;
      } else if (v == "asym") {
        c.select = kcm::selection::SelectionMethod::Asymptotic;
      } else {
        kcm::throw_usage("config select: expected nasym or asym, got '" + v +
                         "'");
      }
    } else {
      kcm::throw_usage("unknown config key '" + k + "'");
    }
  });
}

kcm_status kcm_config_add_statistic(kcm_config* config, const char* token) {
  return guarded([&] {
    if (config == nullptr || token == nullptr) {
      kcm::throw_usage("kcm_config_add_statistic: null argument");
    }
    config->config.kinds.push_back(
        kcm::teststats::StatisticKind::parse(token));
  });
}

kcm_status kcm_run_test(const kcm_dataset* data, const kcm_config* config,
                        kcm_result** out) {
  return guarded([&] {
    if (data == nullptr || config == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_run_test: null argument");
    }
    auto result = std::make_unique<kcm_result>();
    result->config = config->config;
    result->n = data->data.rows();
    result->q = data->data.cols();
    result->outcomes = kcm::harness::run_single_test(
        data->data, config->config, config->config.master_seed);
    *out = result.release();
  });
}

kcm_status kcm_run_monte_carlo(const kcm_config* config, kcm_report** out) {
  return guarded([&] {
    if (config == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_run_monte_carlo: null argument");
    }
    auto report = std::make_unique<kcm_report>();
    report->mc = kcm::harness::run_monte_carlo(config->config);
    *out = report.release();
  });
}

kcm_status kcm_run_sweep(const kcm_config* config, const int* j_values,
                         int64_t count, kcm_report** out) {
  return guarded([&] {
    if (config == nullptr || j_values == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_run_sweep: null argument");
    }
    std::vector<int> J(j_values, j_values + count);
    auto report = std::make_unique<kcm_report>();
    report->sweep = kcm::harness::run_truncation_sweep(config->config, J);
    *out = report.release();
  });
}

int64_t kcm_result_count(const kcm_result* result) {
  return result == nullptr ? -1
                           : static_cast<int64_t>(result->outcomes.size());
}

kcm_status kcm_result_p_value(const kcm_result* result, int64_t index,
                              double* out) {
  return guarded([&] {
    if (result == nullptr || out == nullptr ||
        index < 0 || index >= static_cast<int64_t>(result->outcomes.size())) {
      kcm::throw_usage("kcm_result_p_value: bad handle or index");
    }
    *out = result->outcomes[static_cast<std::size_t>(index)].p_value;
  });
}

kcm_status kcm_result_reject(const kcm_result* result, int64_t index,
                             int* out) {
  return guarded([&] {
    if (result == nullptr || out == nullptr ||
        index < 0 || index >= static_cast<int64_t>(result->outcomes.size())) {
      kcm::throw_usage("kcm_result_reject: bad handle or index");
    }
    *out = result->outcomes[static_cast<std::size_t>(index)].reject ? 1 : 0;
  });
}

kcm_status kcm_result_json(const kcm_result* result, char** out) {
  return guarded([&] {
    if (result == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_result_json: null argument");
    }
    *out = dup_string(kcm::harness::outcomes_json(
        result->outcomes, result->config, result->n, result->q));
  });
}

kcm_status kcm_report_table(const kcm_report* report, const char* format,
                            char** out) {
  return guarded([&] {
    if (report == nullptr || format == nullptr || out == nullptr) {
      kcm::throw_usage("kcm_report_table: null argument");
    }
    const std::string fmt = format;
    if (report->sweep) {
      if (fmt != "csv") {
        kcm::throw_usage("kcm_report_table: sweep reports render csv only");
      }
      *out = dup_string(kcm::harness::emit_sweep_table(*report->sweep));
      return;
    }
    if (fmt == "csv") {
      *out = dup_string(kcm::harness::emit_table(
          *report->mc, kcm::harness::TableFormat::Csv));
    } else if (fmt == "json") {
      *out = dup_string(kcm::harness::emit_table(
          *report->mc, kcm::harness::TableFormat::Json));
    } else {
      kcm::throw_usage("kcm_report_table: format must be csv or json");
    }
  });
}

kcm_status kcm_report_records(const kcm_report* report, char** out) {
  return guarded([&] {
    if (report == nullptr || out == nullptr || !report->mc) {
      kcm::throw_usage("kcm_report_records: requires a Monte Carlo report");
    }
    *out = dup_string(kcm::harness::emit_records(*report->mc));
  });
}

kcm_status kcm_report_json(const kcm_report* report, char** out) {
  return guarded([&] {
    if (report == nullptr || out == nullptr || !report->mc) {
      kcm::throw_usage("kcm_report_json: requires a Monte Carlo report");
    }
    *out = dup_string(kcm::harness::report_json(*report->mc));
  });
}

void kcm_result_free(kcm_result* result) { delete result; }

void kcm_report_free(kcm_report* report) { delete report; }

void kcm_string_free(char* text) { delete[] text; }

}  // extern "C"
