#include "kcm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "kcm/error.hpp"
#include "kcm/kernel.hpp"
#include "kcm/regression.hpp"
#include "kcm/rng.hpp"

namespace kcm::harness {

using json = nlohmann::ordered_json;

void ExperimentConfig::validate() const {
  if (kinds.empty()) throw_usage("config: no statistic kinds requested");
  if (!(tau > 0.0 && tau < 1.0)) throw_usage("config: tau must be in (0, 1)");
  if (!(split_frac > 0.0 && split_frac < 1.0)) {
    throw_usage("config: split fraction must be in (0, 1)");
  }
  if (B < 1) throw_usage("config: bootstrap size B must be >= 1");
  if (replications < 1) throw_usage("config: replications must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw_usage("config: alpha must be in (0, 1)");
  }
  if (grid_size < 1) throw_usage("config: grid size must be >= 1");
  if (lambda < 0.0) throw_usage("config: lambda must be >= 0");
  if (threads < 0) throw_usage("config: threads must be >= 0");
}

namespace {

using bootstrap::TestOutcome;
using teststats::StatFamily;
using teststats::StatisticKind;

Eigen::Index default_J(double tau, int N, Eigen::Index cap) {
  const auto j = static_cast<Eigen::Index>(
      std::floor(tau * static_cast<double>(N)));
  return std::max<Eigen::Index>(1, std::min(j, cap));
}

Eigen::VectorXd subset(const Eigen::VectorXd& v,
                       const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = v[idx[k]];
  }
  return out;
}

// Shared per-dataset state, built lazily so fixed-kernel benchmark runs do
// not pay for splitting and vice versa.
struct Pipeline {
  const dgp::Dataset& data;
  const ExperimentConfig& cfg;
  std::uint64_t base_seed;

  regression::LinearModelFit fit;
  Eigen::MatrixXd scores;

  // Full-sample state (gp/icm benchmarks).
  std::optional<regression::ProjectionMatrix> P_full;
  std::map<double, spectral::SpectralDecomposition> full_decs;
  std::map<double, kernel::KernelMatrix> full_kernels;

  // Split state (selection-based statistics).
  std::optional<dgp::SplitResult> split_;
  Eigen::VectorXd eps_train, eps_test;
  std::optional<regression::ProjectionMatrix> P_train, P_test;
  std::vector<kernel::KernelSpec> grid;
  std::map<bool, selection::SelectionResult> selections;  // key: truncate
  std::map<double, spectral::SpectralDecomposition> test_decs;

  Pipeline(const dgp::Dataset& d, const ExperimentConfig& c, std::uint64_t s)
      : data(d), cfg(c), base_seed(s) {
    fit = regression::fit_ols(data.X, data.y);
    scores = regression::score_matrix(fit);
  }

  void ensure_full() {
    if (!P_full) P_full = regression::projection_matrix(scores);
  }

  const kernel::KernelMatrix& full_kernel(double gamma) {
    auto it = full_kernels.find(gamma);
    if (it == full_kernels.end()) {
      it = full_kernels
               .emplace(gamma, kernel::build_kernel_matrix(
                                   kernel::make_gaussian(gamma), data.X))
               .first;
    }
    return it->second;
  }

  const spectral::SpectralDecomposition& full_dec(double gamma) {
    auto it = full_decs.find(gamma);
    if (it == full_decs.end()) {
      ensure_full();
      const Eigen::MatrixXd Kp =
          regression::project_kernel(*P_full, full_kernel(gamma));
      it = full_decs.emplace(gamma, spectral::eigendecompose_sym(Kp, gamma))
               .first;
    }
    return it->second;
  }

  void ensure_split() {
    if (split_) return;
    split_ = dgp::split(data, cfg.split_frac, seed_hash(base_seed, "split"));
    eps_train = subset(fit.residuals, split_->train_idx);
    eps_test = subset(fit.residuals, split_->test_idx);
    Eigen::MatrixXd G_train(static_cast<Eigen::Index>(split_->train_idx.size()),
                            scores.cols());
    Eigen::MatrixXd G_test(static_cast<Eigen::Index>(split_->test_idx.size()),
                           scores.cols());
    for (std::size_t k = 0; k < split_->train_idx.size(); ++k) {
      G_train.row(static_cast<Eigen::Index>(k)) = scores.row(split_->train_idx[k]);
    }
    for (std::size_t k = 0; k < split_->test_idx.size(); ++k) {
      G_test.row(static_cast<Eigen::Index>(k)) = scores.row(split_->test_idx[k]);
    }
    P_train = regression::projection_matrix(G_train);
    P_test = regression::projection_matrix(G_test);
    grid = kernel::gamma_grid(split_->train.X, cfg.grid_size);
  }

  const selection::SelectionResult& selection_for(bool truncate) {
    ensure_split();
    auto it = selections.find(truncate);
    if (it == selections.end()) {
      selection::SelectionOptions opts;
      opts.method = cfg.select;
      opts.lambda = cfg.lambda;
      opts.tau = cfg.tau;
      opts.N_total = static_cast<int>(data.rows());
      opts.truncate = truncate;
      if (truncate && cfg.J_override) {
        // Sweep mode pins the shared truncation level; the training side is
        // still capped by the training sample size.
        opts.J_force = *cfg.J_override;
      }
      it = selections
               .emplace(truncate,
                        selection::select_kernel(split_->train.X, eps_train,
                                                 *P_train, grid, opts))
               .first;
    }
    return it->second;
  }

  const spectral::SpectralDecomposition& test_dec(double gamma) {
    ensure_split();
    auto it = test_decs.find(gamma);
    if (it == test_decs.end()) {
      const auto K = kernel::build_kernel_matrix(kernel::make_gaussian(gamma),
                                                 split_->test.X);
      const Eigen::MatrixXd Kp = regression::project_kernel(*P_test, K);
      it = test_decs.emplace(gamma, spectral::eigendecompose_sym(Kp, gamma))
               .first;
    }
    return it->second;
  }

  TestOutcome run_fixed_kernel(const StatisticKind& kind) {
    ensure_full();
    const Eigen::Index N = data.rows();
    const double gamma = kind.family == StatFamily::Icm
                             ? 0.5
                             : kernel::median_heuristic(data.X);
    const auto& K = full_kernel(gamma);
    const auto& dec = full_dec(gamma);

    teststats::StatisticValue obs;
    Eigen::Index Jb = 0;
    if (kind.truncate) {
      Jb = default_J(cfg.tau, static_cast<int>(N), N);
      if (cfg.J_override) {
        Jb = std::max<Eigen::Index>(1, std::min<Eigen::Index>(*cfg.J_override, N));
      }
      obs = teststats::stat_basic(dec, P_full->apply(fit.residuals), Jb);
      obs.gamma_used = gamma;
    } else {
      obs = kind.family == StatFamily::Icm
                ? teststats::stat_icm(K, *P_full, fit.residuals)
                : teststats::stat_gp(K, *P_full, fit.residuals);
      Jb = dec.rank_kept;
    }
    const Eigen::VectorXd w = dec.eigenvalues.head(Jb) / static_cast<double>(N);
    const auto dist = bootstrap::bootstrap_distribution(
        dec, *P_full, fit.residuals, kind, w, Jb, cfg.B, base_seed);
    return bootstrap::make_outcome(kind, obs, dist, cfg.alpha);
  }

  TestOutcome run_selected(const StatisticKind& kind) {
    ensure_split();
    const auto& sel = selection_for(kind.truncate);
    const double gamma = sel.chosen.gamma;
    const auto& dec = test_dec(gamma);
    const Eigen::Index n_test = dec.n;

    Eigen::Index J = 0;
    if (kind.truncate) {
      J = cfg.J_override
              ? std::max<Eigen::Index>(
                    1, std::min<Eigen::Index>(*cfg.J_override, n_test))
              : default_J(cfg.tau, static_cast<int>(data.rows()), n_test);
    } else {
      J = n_test;
    }

    const Eigen::VectorXd eps_proj = P_test->apply(eps_test);
    teststats::StatisticValue obs;
    Eigen::VectorXd w;
    switch (kind.family) {
      case StatFamily::Basic:
        w = dec.eigenvalues.head(J) / static_cast<double>(n_test);
        obs = teststats::stat_basic(dec, eps_proj, J);
        break;
      case StatFamily::Generic:
        w = weights::generate_weights(*kind.scheme, J, &dec);
        obs = teststats::stat_generic(dec, eps_proj, w, J);
        break;
      case StatFamily::Divergent:
        w = weights::generate_weights(*kind.scheme, J, &dec);
        obs = teststats::stat_divergent(dec, eps_proj, w, J);
        break;
      default:
        throw_usage("run_selected: fixed-kernel statistic routed incorrectly");
    }
    obs.gamma_used = gamma;
    const auto dist = bootstrap::bootstrap_distribution(
        dec, *P_test, eps_test, kind, w, J, cfg.B, base_seed);
    return bootstrap::make_outcome(kind, obs, dist, cfg.alpha);
  }
};

}  // namespace

std::vector<bootstrap::TestOutcome> run_single_test(
    const dgp::Dataset& data, const ExperimentConfig& config,
    std::uint64_t base_seed) {
  config.validate();
  const Eigen::Index n = data.rows();
  const Eigen::Index q = data.cols();
  if (n <= q + 1) {
    throw_data("run_single_test: need n > q + 1 (n = " + std::to_string(n) +
               ", q = " + std::to_string(q) + ")");
  }
  Pipeline pipe(data, config, base_seed);
  std::vector<bootstrap::TestOutcome> outcomes;
  outcomes.reserve(config.kinds.size());
  for (const auto& kind : config.kinds) {
    outcomes.push_back(kind.uses_selection() ? pipe.run_selected(kind)
                                             : pipe.run_fixed_kernel(kind));
  }
  return outcomes;
}

ExperimentReport run_monte_carlo(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int R = config.replications;

  ExperimentReport report;
  report.config = config;
  report.records.resize(static_cast<std::size_t>(R));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) {
      auto& rec = report.records[static_cast<std::size_t>(r)];
      rec.rep = r;
      const std::uint64_t rep_seed =
          seed_hash(config.master_seed, static_cast<std::uint64_t>(r));
      try {
        const auto data =
            dgp::generate(config.dgp, seed_hash(rep_seed, "data"));
        const auto outcomes = run_single_test(data, config, rep_seed);
        rec.kinds.resize(outcomes.size());
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
          rec.kinds[k] = KindRecord{outcomes[k].statistic.value,
                                    outcomes[k].p_value,
                                    outcomes[k].statistic.gamma_used,
                                    static_cast<double>(outcomes[k].statistic.J_used),
                                    outcomes[k].reject};
        }
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  };

  unsigned T = config.threads > 0
                   ? static_cast<unsigned>(config.threads)
                   : std::max(1u, std::thread::hardware_concurrency());
  T = std::min<unsigned>(T, static_cast<unsigned>(R));
  if (T <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (unsigned t = 0; t < T; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  report.summaries.resize(config.kinds.size());
  for (std::size_t k = 0; k < config.kinds.size(); ++k) {
    auto& s = report.summaries[k];
    s.kind = config.kinds[k].token();
    int rejections = 0, ok = 0;
    double gamma_sum = 0.0, J_sum = 0.0;
    for (const auto& rec : report.records) {
      if (rec.failed) continue;
      ++ok;
      rejections += rec.kinds[k].reject ? 1 : 0;
      gamma_sum += rec.kinds[k].gamma;
      J_sum += rec.kinds[k].J;
    }
    s.rejection_rate = static_cast<double>(rejections) / static_cast<double>(R);
    s.mean_gamma_star = ok > 0 ? gamma_sum / ok : 0.0;
    s.mean_J = ok > 0 ? J_sum / ok : 0.0;
  }
  for (const auto& rec : report.records) {
    report.failure_count += rec.failed ? 1 : 0;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

SweepReport run_truncation_sweep(const ExperimentConfig& config,
                                 const std::vector<int>& J_values) {
  config.validate();
  if (J_values.empty()) {
    throw_usage("sweep: no truncation levels supplied");
  }
  const int N = config.dgp.n;
  const auto n_train = static_cast<int>(
      std::llround(config.split_frac * static_cast<double>(N)));
  const int n_test = N - n_train;

  SweepReport sweep;
  sweep.config = config;
  for (int J : J_values) {
    if (J < 1 || J > n_test) {
      sweep.warnings.push_back("skipped J = " + std::to_string(J) +
                               " (admissible range [1, " +
                               std::to_string(n_test) + "])");
      continue;
    }
    ExperimentConfig cfg = config;
    cfg.J_override = J;
    sweep.J_values.push_back(J);
    sweep.reports.push_back(run_monte_carlo(cfg));
  }
  return sweep;
}

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::string emit_table(const std::vector<ExperimentReport>& reports,
                       TableFormat format) {
  if (format == TableFormat::Csv) {
    std::ostringstream out;
    out << "statistic,N,q,dgp,rejection_rate,mean_gamma_star,mean_J\n";
    for (const auto& r : reports) {
      for (const auto& s : r.summaries) {
        out << s.kind << ',' << r.config.dgp.n << ',' << r.config.dgp.q << ','
            << dgp::dgp_token(r.config.dgp.id) << ','
            << fmt(s.rejection_rate) << ',' << fmt(s.mean_gamma_star) << ','
            << fmt(s.mean_J) << '\n';
      }
    }
    return out.str();
  }
  json rows = json::array();
  for (const auto& r : reports) {
    for (const auto& s : r.summaries) {
      rows.push_back({{"statistic", s.kind},
                      {"N", r.config.dgp.n},
                      {"q", r.config.dgp.q},
                      {"dgp", dgp::dgp_token(r.config.dgp.id)},
                      {"rejection_rate", s.rejection_rate},
                      {"mean_gamma_star", s.mean_gamma_star},
                      {"mean_J", s.mean_J}});
    }
  }
  return rows.dump(2) + "\n";
}

std::string emit_table(const ExperimentReport& report, TableFormat format) {
  return emit_table(std::vector<ExperimentReport>{report}, format);
}

std::string emit_records(const ExperimentReport& report) {
  std::ostringstream out;
  out << "rep,statistic,value,p_value,gamma,J,reject\n";
  for (const auto& rec : report.records) {
    if (rec.failed) {
      out << rec.rep << ",failed,,,,,\n";
      continue;
    }
    for (std::size_t k = 0; k < rec.kinds.size(); ++k) {
      const auto& kr = rec.kinds[k];
      out << rec.rep << ',' << report.summaries[k].kind << ','
          << fmt(kr.value, "%.17g") << ',' << fmt(kr.p_value, "%.17g") << ','
          << fmt(kr.gamma, "%.17g") << ',' << fmt(kr.J, "%g") << ','
          << (kr.reject ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string emit_sweep_table(const SweepReport& sweep) {
  std::ostringstream out;
  out << "J";
  for (const auto& kind : sweep.config.kinds) out << ',' << kind.token();
  out << '\n';
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    out << sweep.J_values[i];
    for (const auto& s : sweep.reports[i].summaries) {
      out << ',' << fmt(s.rejection_rate);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

json config_json(const ExperimentConfig& c) {
  return {{"dgp", dgp::dgp_token(c.dgp.id)},
          {"n", c.dgp.n},
          {"q", c.dgp.q},
          {"select",
           c.select == selection::SelectionMethod::NonAsymptotic ? "nasym"
                                                                 : "asym"},
          {"grid_size", c.grid_size},
          {"lambda", c.lambda},
          {"tau", c.tau},
          {"split", c.split_frac},
          {"boot", c.B},
          {"replications", c.replications},
          {"alpha", c.alpha},
          {"seed", c.master_seed},
          {"threads", c.threads}};
}

}  // namespace

std::string outcomes_json(const std::vector<bootstrap::TestOutcome>& outcomes,
                          const ExperimentConfig& config, Eigen::Index n,
                          Eigen::Index q) {
  json doc;
  doc["n"] = n;
  doc["q"] = q;
  doc["alpha"] = config.alpha;
  doc["boot"] = config.B;
  doc["select"] =
      config.select == selection::SelectionMethod::NonAsymptotic ? "nasym"
                                                                 : "asym";
  doc["results"] = json::array();
  for (const auto& o : outcomes) {
    json entry = {{"statistic", o.kind.token()},
                  {"value", o.statistic.value},
                  {"p_value", o.p_value},
                  {"critical_value", o.critical_value},
                  {"reject", o.reject},
                  {"gamma", o.statistic.gamma_used},
                  {"J", o.statistic.J_used},
                  {"bootstrap_failures", o.bootstrap_failures}};
    json dirs = json::array();
    for (std::size_t i = 0; i < o.statistic.diagnostics.size(); ++i) {
      const auto& d = o.statistic.diagnostics[i];
      dirs.push_back({{"i", i + 1},
                      {"weight", d.weight},
                      {"d_hat", d.d_hat},
                      {"s2_hat", d.s2_hat}});
    }
    entry["directions"] = std::move(dirs);
    doc["results"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::string report_json(const ExperimentReport& report) {
  json doc;
  doc["config"] = config_json(report.config);
  doc["failure_count"] = report.failure_count;
  doc["wall_seconds"] = report.wall_seconds;
  doc["table"] = json::parse(emit_table(report, TableFormat::Json));
  return doc.dump(2) + "\n";
}

}  // namespace kcm::harness
