#include "ctpt/simulation.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ctpt/errors.hpp"
#include "ctpt/special_math.hpp"

namespace ctpt {

ErrorSpec ErrorSpec::ctpt_err(double gamma, TailSpec tail) {
  CtptSpec check(gamma, tail);  // validates
  ErrorSpec spec;
  spec.kind = Kind::Ctpt;
  spec.gamma = gamma;
  spec.tail = tail;
  return spec;
}

ErrorSpec ErrorSpec::tukey(double g, double h) {
  if (!(h >= 0.0) || !(h < 1.0)) throw DomainError("ErrorSpec: Tukey h must lie in [0, 1)");
  ErrorSpec spec;
  spec.kind = Kind::TukeyGH;
  spec.g = g;
  spec.h = h;
  return spec;
}

ErrorSpec ErrorSpec::normal() {
  ErrorSpec spec;
  spec.kind = Kind::Normal;
  return spec;
}

std::string ErrorSpec::describe() const {
  switch (kind) {
    case Kind::Ctpt: {
      const std::string nu = tail->is_normal_limit() ? "inf" : std::to_string(tail->nu());
      return "ctpt(gamma=" + std::to_string(gamma) + ", nu=" + nu + ")";
    }
    case Kind::TukeyGH:
      return "tukey(g=" + std::to_string(g) + ", h=" + std::to_string(h) + ")";
    case Kind::Normal:
      return "normal";
  }
  return "unknown";
}

void ScenarioConfig::check() const {
  if (n < 5) throw ValidationError("scenario: n must be at least 5");
  if (!(sigma_m > 0.0) || !(sigma_y > 0.0)) throw ValidationError("scenario: sigmas must be positive");
}

bool ScenarioConfig::is_null() const {
  return null_variant != NullVariant::None || alpha == 0.0 || beta == 0.0;
}

double ScenarioConfig::true_alphabeta() const {
  double a = alpha;
  double b = beta;
  switch (null_variant) {
    case NullVariant::BothZero: a = 0.0; b = 0.0; break;
    case NullVariant::AlphaZero: a = 0.0; break;
    case NullVariant::BetaZero: b = 0.0; break;
    case NullVariant::None: break;
  }
  return a * b;
}

double tukey_gh_mean(double g, double h) {
  if (!(h >= 0.0) || !(h < 1.0)) throw DomainError("tukey_gh_mean: h must lie in [0, 1)");
  if (g == 0.0) return 0.0;
  return (std::exp(g * g / (2.0 * (1.0 - h))) - 1.0) / (g * std::sqrt(1.0 - h));
}

Eigen::VectorXd sample_tukey_gh(Eigen::Index n, double g, double h, SeededRng& rng) {
  if (!(h >= 0.0) || !(h < 1.0)) throw DomainError("sample_tukey_gh: h must lie in [0, 1)");
  const double mean = tukey_gh_mean(g, h);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = draw_standard_normal(rng);
    const double scale = std::exp(0.5 * h * z * z);
    const double t = g == 0.0 ? z * scale : (std::expm1(g * z) / g) * scale;
    out[i] = t - mean;
  }
  return out;
}

Eigen::VectorXd sample_error(Eigen::Index n, const ErrorSpec& spec, SeededRng& rng) {
  switch (spec.kind) {
    case ErrorSpec::Kind::Ctpt:
      return sample(n, CtptSpec(spec.gamma, *spec.tail), rng);
    case ErrorSpec::Kind::TukeyGH:
      return sample_tukey_gh(n, spec.g, spec.h, rng);
    case ErrorSpec::Kind::Normal: {
      Eigen::VectorXd out(n);
      for (Eigen::Index i = 0; i < n; ++i) out[i] = draw_standard_normal(rng);
      return out;
    }
  }
  throw DomainError("sample_error: unknown kind");
}

MediationData gen_data(const ScenarioConfig& scenario, SeededRng& rng) {
  scenario.check();
  double a = scenario.alpha;
  double b = scenario.beta;
  switch (scenario.null_variant) {
    case NullVariant::BothZero: a = 0.0; b = 0.0; break;
    case NullVariant::AlphaZero: a = 0.0; break;
    case NullVariant::BetaZero: b = 0.0; break;
    case NullVariant::None: break;
  }
  const Eigen::Index n = scenario.n;
  MediationData data;
  data.x.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) data.x[i] = draw_standard_normal(rng);
  const Eigen::VectorXd em = sample_error(n, scenario.err_m, rng);
  const Eigen::VectorXd ey = sample_error(n, scenario.err_y, rng);
  data.m = scenario.intercept_m + (a * data.x.array()) + scenario.sigma_m * em.array();
  data.y = scenario.intercept_y + (b * data.m.array()) + (scenario.tau * data.x.array()) +
           scenario.sigma_y * ey.array();
  return data;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

// Stream layout: replication r owns the block [r * 64, (r+1) * 64) on top of
// a per-role base, so reruns and thread counts cannot collide.
constexpr std::uint64_t kRepStride = 64;
constexpr std::uint64_t kFitStreamBase = 0x200000000ULL;
constexpr std::uint64_t kNullStreamBase = 0x400000000ULL;

MediationOptions options_for(ErrorFamily family, const ChainConfig& chain, bool with_bfs,
                             std::uint64_t stream_base) {
  MediationOptions options;
  options.family = family;
  options.chain = chain;
  options.chain.stream_base = stream_base;
  options.compute_bayes_factors = with_bfs;
  return options;
}

}  // namespace

RecoveryResult run_recovery(const ScenarioConfig& scenario, int replications, ErrorFamily family,
                            const ChainConfig& chain, int threads) {
  scenario.check();
  if (scenario.is_null()) {
    throw ValidationError("run_recovery: coverage of a null scenario is not meaningful");
  }
  if (replications < 1) throw ValidationError("run_recovery: need at least one replication");

  RecoveryResult result;
  result.replications = replications;
  result.true_alphabeta = scenario.true_alphabeta();
  result.rows.resize(replications);
  result.covered.resize(replications, false);
  std::vector<char> ok(replications, 0);

  parallel_for(replications, threads, [&](int r) {
    try {
      SeededRng data_rng(chain.seed, static_cast<std::uint64_t>(r));
      const MediationData data = gen_data(scenario, data_rng);
      const MediationOptions options =
          options_for(family, chain, false, kFitStreamBase + static_cast<std::uint64_t>(r) * kRepStride);
      const MediationResult fit = fit_mediation(data, options);
      const SummaryRow row = fit.summaries.at("alphabeta");
      result.rows[r] = row;
      result.covered[r] = row.p2_5 <= result.true_alphabeta && result.true_alphabeta <= row.p97_5;
      ok[r] = 1;
    } catch (const std::exception&) {
      ok[r] = 0;
    }
  });

  std::vector<SummaryRow> kept;
  int covered_count = 0;
  for (int r = 0; r < replications; ++r) {
    if (!ok[r]) {
      ++result.failures;
      continue;
    }
    kept.push_back(result.rows[r]);
    covered_count += result.covered[r] ? 1 : 0;
  }
  if (kept.empty()) throw NumericalError("run_recovery: every replication failed");

  const auto collect = [&kept](double SummaryRow::* field) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) v[static_cast<Eigen::Index>(i)] = kept[i].*field;
    return v;
  };
  const auto mean_sd = [](const Eigen::VectorXd& v, double& mean, double& sd) {
    mean = v.mean();
    sd = v.size() > 1 ? std::sqrt((v.array() - mean).square().sum() / (v.size() - 1.0)) : 0.0;
  };
  for (auto field : {&SummaryRow::mean, &SummaryRow::mode, &SummaryRow::p2_5, &SummaryRow::p25,
                     &SummaryRow::p50, &SummaryRow::p75, &SummaryRow::p97_5, &SummaryRow::ci_length}) {
    double mean = 0.0, sd = 0.0;
    mean_sd(collect(field), mean, sd);
    result.column_means.*field = mean;
    result.column_sds.*field = sd;
  }
  result.coverage = static_cast<double>(covered_count) / static_cast<double>(kept.size());
  return result;
}

namespace {

double bf_med_for_replication(const ScenarioConfig& scenario, ErrorFamily family,
                              const ChainConfig& chain, std::uint64_t data_stream,
                              std::uint64_t fit_stream) {
  SeededRng data_rng(chain.seed, data_stream);
  const MediationData data = gen_data(scenario, data_rng);
  const MediationOptions options = options_for(family, chain, true, fit_stream);
  return fit_mediation(data, options).bf_med;
}

}  // namespace

PowerResult run_power(const ScenarioConfig& alt_scenario, const ScenarioConfig& null_scenario,
                      int replications, ErrorFamily family, const ChainConfig& chain,
                      double cutoff, int threads) {
  alt_scenario.check();
  null_scenario.check();
  if (replications < 1) throw ValidationError("run_power: need at least one replication");
  if (alt_scenario.is_null()) {
    throw ValidationError("run_power: the alternative scenario has a zero indirect effect");
  }

  PowerResult result;
  result.cutoff = cutoff;
  result.replications = replications;
  result.alt_bfs.assign(replications, std::numeric_limits<double>::quiet_NaN());
  result.null_bfs.assign(replications, std::numeric_limits<double>::quiet_NaN());

  constexpr NullVariant kVariants[3] = {NullVariant::BothZero, NullVariant::AlphaZero,
                                        NullVariant::BetaZero};

  parallel_for(2 * replications, threads, [&](int idx) {
    const bool is_null = idx >= replications;
    const int r = is_null ? idx - replications : idx;
    try {
      if (is_null) {
        ScenarioConfig null_rep = null_scenario;
        null_rep.null_variant = kVariants[r % 3];
        result.null_bfs[r] = bf_med_for_replication(
            null_rep, family, chain, kNullStreamBase + static_cast<std::uint64_t>(r),
            kNullStreamBase + kFitStreamBase + static_cast<std::uint64_t>(r) * kRepStride);
      } else {
        result.alt_bfs[r] = bf_med_for_replication(
            alt_scenario, family, chain, static_cast<std::uint64_t>(r),
            kFitStreamBase + static_cast<std::uint64_t>(r) * kRepStride);
      }
    } catch (const std::exception&) {
      // recorded as NaN
    }
  });

  const auto prune = [](std::vector<double>& bfs, int& failures) {
    std::vector<double> kept;
    kept.reserve(bfs.size());
    for (double bf : bfs) {
      if (std::isnan(bf)) {
        ++failures;
      } else {
        kept.push_back(bf);
      }
    }
    bfs = std::move(kept);
  };
  prune(result.alt_bfs, result.alt_failures);
  prune(result.null_bfs, result.null_failures);
  if (result.alt_bfs.empty() || result.null_bfs.empty()) {
    throw NumericalError("run_power: every replication failed");
  }
  result.tpr = empirical_rejection_rate(result.alt_bfs, cutoff);
  result.fpr = empirical_rejection_rate(result.null_bfs, cutoff);
  return result;
}

double empirical_rejection_rate(const std::vector<double>& bfs, double cutoff) {
  if (bfs.empty()) return 0.0;
  const auto rejected = std::count_if(bfs.begin(), bfs.end(), [cutoff](double bf) { return bf > cutoff; });
  return static_cast<double>(rejected) / static_cast<double>(bfs.size());
}

double match_cutoff(std::vector<double> null_bfs, double target_fpr) {
  if (!(target_fpr > 0.0) || !(target_fpr < 1.0)) {
    throw DomainError("match_cutoff: target_fpr must lie in (0, 1)");
  }
  const auto r = static_cast<double>(null_bfs.size());
  if (null_bfs.empty() || r < 1.0 / target_fpr) {
    throw ValidationError("match_cutoff: InsufficientNullRuns for the requested rate");
  }
  const auto rank = static_cast<std::size_t>(std::ceil(target_fpr * r));  // rank-th largest
  std::sort(null_bfs.begin(), null_bfs.end(), std::greater<>());
  return null_bfs[rank - 1];
}

namespace {

struct OlsPaths {
  double alpha;
  double beta;
};

// Least-squares path coefficients of the two mediation regressions; nullopt
// when a resampled design is numerically rank deficient.
std::optional<OlsPaths> ols_paths(const Eigen::VectorXd& x, const Eigen::VectorXd& m,
                                  const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd xm(n, 2);
  xm.col(0).setOnes();
  xm.col(1) = x;
  Eigen::MatrixXd xy(n, 3);
  xy.col(0).setOnes();
  xy.col(1) = m;
  xy.col(2) = x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_m(xm);
  qr_m.setThreshold(1e-10);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_y(xy);
  qr_y.setThreshold(1e-10);
  if (qr_m.rank() < 2 || qr_y.rank() < 3) return std::nullopt;
  const Eigen::VectorXd bm = qr_m.solve(m);
  const Eigen::VectorXd by = qr_y.solve(y);
  return OlsPaths{bm[1], by[1]};
}

}  // namespace

BootstrapTest ols_bootstrap_test(const MediationData& data, int n_boot, double level,
                                 SeededRng& rng) {
  data.check();
  if (n_boot < 199) throw DomainError("ols_bootstrap_test: need at least 199 resamples");
  if (!(level > 0.0) || !(level < 1.0)) throw DomainError("ols_bootstrap_test: level must lie in (0, 1)");

  const auto full = ols_paths(data.x, data.m, data.y);
  if (!full) throw ValidationError("ols_bootstrap_test: rank-deficient design");

  BootstrapTest test;
  test.estimate = full->alpha * full->beta;

  const Eigen::Index n = data.n();
  std::vector<double> products;
  products.reserve(n_boot);
  Eigen::VectorXd xs(n), ms(n), ys(n);
  for (int b = 0; b < n_boot; ++b) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto j = static_cast<Eigen::Index>(rng.next_double() * static_cast<double>(n));
      const Eigen::Index idx = std::min(j, n - 1);
      xs[i] = data.x[idx];
      ms[i] = data.m[idx];
      ys[i] = data.y[idx];
    }
    const auto paths = ols_paths(xs, ms, ys);
    if (!paths) {
      ++test.dropped;
      continue;
    }
    products.push_back(paths->alpha * paths->beta);
  }
  if (products.size() < 2) throw NumericalError("ols_bootstrap_test: all resamples were singular");

  Eigen::VectorXd prod = Eigen::Map<Eigen::VectorXd>(products.data(), static_cast<Eigen::Index>(products.size()));
  const double tail = 0.5 * (1.0 - level);
  test.ci_lower = quantile_type7(prod, tail);
  test.ci_upper = quantile_type7(prod, 1.0 - tail);
  test.reject = !(test.ci_lower <= 0.0 && 0.0 <= test.ci_upper);
  return test;
}

}  // namespace ctpt
