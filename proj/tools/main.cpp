// Command-line surface: model fitting, mediation analysis, model comparison,
// simulation runs, and distribution queries, with JSON reports and flat CSV
// mirrors for table-shaped results.
//
// Exit codes: 0 success, 2 validation error, 3 numerical non-convergence,
// 4 I/O error.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ctpt/csv.hpp"
#include "ctpt/distribution.hpp"
#include "ctpt/errors.hpp"
#include "ctpt/evidence.hpp"
#include "ctpt/mediation.hpp"
#include "ctpt/mcmc.hpp"
#include "ctpt/regression.hpp"
#include "ctpt/scenario.hpp"
#include "ctpt/simulation.hpp"
#include "ctpt/special_math.hpp"

namespace {

using nlohmann::json;

constexpr const char* kArtifactVersion = "0.1.0";
constexpr const char* kSamplerIdentity =
    "adaptive component-wise random-walk Metropolis (Robbins-Monro step adaptation, frozen after "
    "burn-in)";

json deviations_note() {
  return json::array(
      {"sampler: gradient-free adaptive random-walk Metropolis, not a Hamiltonian/no-U-turn "
       "sampler",
       "bootstrap baseline: ordinary least squares with case resampling and percentile intervals"});
}

// ---------------------------------------------------------------------------
// option plumbing

struct CommonOptions {
  std::string config_path;
  std::string family = "full";
  int iterations = 30000;
  double burn_in = 0.2;
  int chains = 4;
  int adapt_window = 50;
  double target_accept = 0.44;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string out_path;
  bool hpd = false;
  ctpt::PriorConfig priors;
};

std::uint64_t env_seed_or(std::uint64_t fallback) {
  const char* env = std::getenv("CTPT_SEED");
  if (env == nullptr) return fallback;
  try {
    return static_cast<std::uint64_t>(std::stoull(env));
  } catch (const std::exception&) {
    throw ctpt::ValidationError("CTPT_SEED must be an unsigned integer");
  }
}

void add_common_options(CLI::App* cmd, CommonOptions& opts, bool with_family = true) {
  cmd->add_option("--config", opts.config_path, "JSON config file; flags override file values");
  if (with_family) {
    cmd->add_option("--family", opts.family, "error family: full, gamma-only, nu-only, normal");
  }
  cmd->add_option("--iterations", opts.iterations, "total chain length");
  cmd->add_option("--burn-in", opts.burn_in, "burn-in fraction");
  cmd->add_option("--chains", opts.chains, "number of chains");
  cmd->add_option("--adapt-window", opts.adapt_window, "adaptation batch size");
  cmd->add_option("--target-accept", opts.target_accept, "per-coordinate acceptance target");
  cmd->add_option("--seed", opts.seed, "random seed (default: CTPT_SEED or 1)")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
  cmd->add_option("--out", opts.out_path, "write the JSON report here instead of stdout");
  cmd->add_flag("--hpd", opts.hpd, "add highest-posterior-density intervals to summaries");
  cmd->add_option("--gamma-shape", opts.priors.gamma_shape, "skewness prior shape");
  cmd->add_option("--gamma-rate", opts.priors.gamma_rate, "skewness prior rate");
  cmd->add_option("--gamma-lower", opts.priors.gamma_lower, "skewness prior lower truncation");
  cmd->add_option("--gamma-upper", opts.priors.gamma_upper, "skewness prior upper truncation");
  cmd->add_option("--nu-rate", opts.priors.nu_rate, "tail prior exponential rate");
}

// The config file provides defaults; flags always override because CLI11
// writes flag values after this runs.
void apply_config_file(const std::vector<std::string>& args, CommonOptions& opts) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ctpt::IoError("cannot open config file: " + path);
  json cfg;
  try {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    cfg = json::parse(buffer.str());
  } catch (const json::parse_error& err) {
    throw ctpt::ValidationError(std::string("config file: invalid JSON: ") + err.what());
  }
  if (!cfg.is_object()) throw ctpt::ValidationError("config file: expected a JSON object");
  const auto num = [&cfg](const char* key, auto& slot) {
    if (cfg.contains(key)) slot = cfg.at(key).get<std::decay_t<decltype(slot)>>();
  };
  if (cfg.contains("family")) opts.family = cfg.at("family").get<std::string>();
  num("iterations", opts.iterations);
  num("burn_in_fraction", opts.burn_in);
  num("chains", opts.chains);
  num("adapt_window", opts.adapt_window);
  num("target_accept", opts.target_accept);
  if (cfg.contains("seed")) {
    opts.seed = cfg.at("seed").get<std::uint64_t>();
    opts.seed_given = true;
  }
  num("threads", opts.threads);
  if (cfg.contains("hpd")) opts.hpd = cfg.at("hpd").get<bool>();
  num("gamma_shape", opts.priors.gamma_shape);
  num("gamma_rate", opts.priors.gamma_rate);
  num("gamma_lower", opts.priors.gamma_lower);
  num("gamma_upper", opts.priors.gamma_upper);
  num("nu_rate", opts.priors.nu_rate);
}

ctpt::ChainConfig chain_config(const CommonOptions& opts) {
  ctpt::ChainConfig config;
  config.total_iterations = opts.iterations;
  config.burn_in_fraction = opts.burn_in;
  config.n_chains = opts.chains;
  config.adapt_window = opts.adapt_window;
  config.target_accept = opts.target_accept;
  config.seed = opts.seed_given ? opts.seed : env_seed_or(1);
  return config;
}

json chain_json(const ctpt::ChainConfig& config) {
  return json{{"iterations", config.total_iterations},
              {"burn_in_fraction", config.burn_in_fraction},
              {"chains", config.n_chains},
              {"adapt_window", config.adapt_window},
              {"target_accept", config.target_accept}};
}

json priors_json(const ctpt::PriorConfig& priors) {
  return json{{"gamma_shape", priors.gamma_shape}, {"gamma_rate", priors.gamma_rate},
              {"gamma_lower", priors.gamma_lower}, {"gamma_upper", priors.gamma_upper},
              {"nu_rate", priors.nu_rate}};
}

json make_report(const std::string& command, std::uint64_t seed, json config) {
  return json{{"schema_version", 1},
              {"command", command},
              {"artifact_version", kArtifactVersion},
              {"sampler", kSamplerIdentity},
              {"deviations", deviations_note()},
              {"seed", seed},
              {"config", std::move(config)}};
}

json summary_json(const ctpt::SummaryRow& row) {
  return json{{"mean", row.mean},   {"mode", row.mode}, {"p2.5", row.p2_5},
              {"p25", row.p25},     {"p50", row.p50},   {"p75", row.p75},
              {"p97.5", row.p97_5}, {"ci_length", row.ci_length}};
}

json evidence_json(const ctpt::EvidenceResult& e) {
  return json{{"log_marginal_likelihood", e.log_marginal_likelihood},
              {"approx_standard_error", e.approx_standard_error},
              {"iterations_used", e.iterations_used},
              {"converged", e.converged}};
}

void write_report(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ctpt::IoError("cannot write file: " + out_path);
  out << report.dump(2) << "\n";
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ctpt::IoError("cannot write file: " + path);
  out << text;
}

std::vector<std::string> split_names(const std::string& csv_names) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv_names);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ctpt::TailSpec parse_tail(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return ctpt::TailSpec::normal_limit();
  try {
    const double nu = std::stod(text);
    return ctpt::TailSpec::finite(nu);
  } catch (const ctpt::DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw ctpt::ValidationError("--nu expects a number greater than 2 or 'inf', got '" + text + "'");
  }
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string csv_path;
  std::string response;
  std::string predictors;
  bool no_intercept = false;
  CommonOptions common;
};

ctpt::RegressionProblem build_problem(const std::string& csv_path, const std::string& response,
                                      const std::vector<std::string>& predictors, bool intercept,
                                      ctpt::ErrorFamily family, const ctpt::PriorConfig& priors) {
  const ctpt::CsvTable table = ctpt::read_csv(csv_path);
  const Eigen::VectorXd y = table.column(response);
  const Eigen::Index n = y.size();
  const Eigen::Index k = static_cast<Eigen::Index>(predictors.size()) + (intercept ? 1 : 0);
  ctpt::RegressionProblem problem;
  problem.design.resize(n, k);
  Eigen::Index col = 0;
  if (intercept) {
    problem.design.col(col).setOnes();
    problem.column_names.push_back("intercept");
    ++col;
  }
  for (const std::string& name : predictors) {
    problem.design.col(col++) = table.column(name);
    problem.column_names.push_back(name);
  }
  problem.response = y;
  problem.family = family;
  problem.priors = priors;
  return problem;
}

json fit_results_json(const ctpt::RegressionProblem& problem, const ctpt::Draws& draws,
                      bool with_hpd) {
  const ctpt::Diagnostics diag = ctpt::diagnose(draws);
  json params = json::object();
  for (Eigen::Index j = 0; j < draws.dim(); ++j) {
    json entry = summary_json(ctpt::summarize(draws.natural.col(j)));
    entry["rhat"] = std::isnan(diag.rhat[j]) ? json() : json(diag.rhat[j]);
    entry["ess"] = diag.ess[j];
    if (with_hpd) {
      const auto [lo, hi] = ctpt::hpd_interval(draws.natural.col(j), 0.95);
      entry["hpd_lower"] = lo;
      entry["hpd_upper"] = hi;
    }
    params[draws.names[j]] = std::move(entry);
  }
  return json{{"n", problem.n()},
              {"k", problem.k()},
              {"sigma_moment_bound", ctpt::sigma_moment_bound(problem.n(), problem.k())},
              {"parameters", std::move(params)},
              {"acceptance_mean", diag.mean_acceptance},
              {"stuck_warning", draws.stuck_warning}};
}

void run_fit(const FitArgs& args) {
  const ctpt::ErrorFamily family = ctpt::family_from_name(args.common.family);
  const std::vector<std::string> predictors = split_names(args.predictors);
  const ctpt::ChainConfig config = chain_config(args.common);
  const ctpt::RegressionProblem problem = build_problem(
      args.csv_path, args.response, predictors, !args.no_intercept, family, args.common.priors);
  ctpt::validate(problem);

  const ctpt::Draws draws = ctpt::fit_regression(problem, config);
  const ctpt::LogDensity target = [&problem](const Eigen::VectorXd& z) {
    return ctpt::log_posterior_unconstrained(problem, z);
  };
  const ctpt::EvidenceResult evidence = ctpt::log_marginal(draws, target);

  json config_echo{{"csv", args.csv_path},
                   {"response", args.response},
                   {"predictors", predictors},
                   {"intercept", !args.no_intercept},
                   {"family", ctpt::family_name(family)},
                   {"chain", chain_json(config)},
                   {"priors", priors_json(args.common.priors)},
                   {"threads", args.common.threads},
                   {"hpd", args.common.hpd}};
  json report = make_report("fit", config.seed, std::move(config_echo));
  report["results"] = fit_results_json(problem, draws, args.common.hpd);
  report["results"]["log_marginal"] = evidence_json(evidence);
  write_report(report, args.common.out_path);
}

// ---------------------------------------------------------------------------
// mediate

struct MediateArgs {
  std::string csv_path;
  std::string x_col, m_col, y_col;
  double q00 = 1.0 / 3.0, q01 = 1.0 / 3.0, q10 = 1.0 / 3.0;
  bool skip_bayes_factors = false;
  CommonOptions common;
};

void run_mediate(const MediateArgs& args) {
  const ctpt::CsvTable table = ctpt::read_csv(args.csv_path);
  ctpt::MediationData data;
  data.x = table.column(args.x_col);
  data.m = table.column(args.m_col);
  data.y = table.column(args.y_col);

  ctpt::MediationOptions options;
  options.family = ctpt::family_from_name(args.common.family);
  options.chain = chain_config(args.common);
  options.priors = args.common.priors;
  options.partition = ctpt::NullPartition{args.q00, args.q01, args.q10};
  options.compute_bayes_factors = !args.skip_bayes_factors;

  const ctpt::MediationResult fit = ctpt::fit_mediation(data, options);

  json summaries = json::object();
  for (const auto& [name, row] : fit.summaries) summaries[name] = summary_json(row);
  if (args.common.hpd) {
    const auto add_hpd = [&](const char* key, const Eigen::VectorXd& draws) {
      const auto [lo, hi] = ctpt::hpd_interval(draws, 0.95);
      summaries[key]["hpd_lower"] = lo;
      summaries[key]["hpd_upper"] = hi;
    };
    add_hpd("alpha", fit.alpha_draws);
    add_hpd("beta", fit.beta_draws);
    add_hpd("alphabeta", fit.alphabeta_draws);
    add_hpd("tau", fit.tau_draws);
  }

  const auto diag_json = [](const ctpt::Diagnostics& diag, const ctpt::Draws& draws) {
    json out = json::object();
    for (Eigen::Index j = 0; j < draws.dim(); ++j) {
      out[draws.names[j]] = json{{"rhat", std::isnan(diag.rhat[j]) ? json() : json(diag.rhat[j])},
                                 {"ess", diag.ess[j]}};
    }
    return out;
  };

  json config_echo{{"csv", args.csv_path},
                   {"x", args.x_col},
                   {"m", args.m_col},
                   {"y", args.y_col},
                   {"family", ctpt::family_name(options.family)},
                   {"chain", chain_json(options.chain)},
                   {"priors", priors_json(options.priors)},
                   {"partition", json{{"q00", args.q00}, {"q01", args.q01}, {"q10", args.q10}}},
                   {"threads", args.common.threads},
                   {"hpd", args.common.hpd}};
  json report = make_report("mediate", options.chain.seed, std::move(config_echo));
  report["results"] = json{{"n", data.n()},
                           {"summaries", std::move(summaries)},
                           {"diagnostics",
                            json{{"mediator_equation", diag_json(fit.diag_m, fit.draws_m)},
                                 {"outcome_equation", diag_json(fit.diag_y, fit.draws_y)}}},
                           {"stuck_warning", fit.draws_m.stuck_warning || fit.draws_y.stuck_warning}};
  if (options.compute_bayes_factors) {
    report["results"]["bayes_factors"] =
        json{{"bf_alpha", fit.bf_alpha}, {"bf_beta", fit.bf_beta}, {"bf_med", fit.bf_med}};
    report["results"]["evidence"] = json{{"mediator_equation", evidence_json(fit.evidence_m)},
                                         {"outcome_equation", evidence_json(fit.evidence_y)}};
  }
  write_report(report, args.common.out_path);
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string csv_path;
  std::string response;
  std::string predictors;
  bool no_intercept = false;
  std::string csv_out;
  CommonOptions common;
};

void run_compare(const CompareArgs& args) {
  const std::vector<std::string> predictors = split_names(args.predictors);
  const ctpt::ChainConfig base_config = chain_config(args.common);
  const ctpt::ErrorFamily families[] = {ctpt::ErrorFamily::Ctpt, ctpt::ErrorFamily::SkewNormal,
                                        ctpt::ErrorFamily::StudentT, ctpt::ErrorFamily::Normal};

  json log_marginals = json::object();
  std::vector<double> values;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < 4; ++i) {
    ctpt::RegressionProblem problem =
        build_problem(args.csv_path, args.response, predictors, !args.no_intercept, families[i],
                      args.common.priors);
    ctpt::validate(problem);
    ctpt::ChainConfig config = base_config;
    config.stream_base = base_config.stream_base + 64 * i;
    const ctpt::Draws draws = ctpt::fit_regression(problem, config);
    const ctpt::LogDensity target = [&problem](const Eigen::VectorXd& z) {
      return ctpt::log_posterior_unconstrained(problem, z);
    };
    const ctpt::EvidenceResult evidence = ctpt::log_marginal(draws, target);
    names.push_back(ctpt::family_name(families[i]));
    values.push_back(evidence.log_marginal_likelihood);
    log_marginals[names.back()] = evidence_json(evidence);
  }

  json matrix = json::array();
  std::ostringstream csv;
  csv << "numerator";
  for (const auto& name : names) csv << "," << name;
  csv << "\n";
  for (std::size_t i = 0; i < 4; ++i) {
    json row = json::array();
    csv << names[i];
    for (std::size_t j = 0; j < 4; ++j) {
      row.push_back(values[i] - values[j]);
      csv << "," << values[i] - values[j];
    }
    csv << "\n";
    matrix.push_back(std::move(row));
  }

  json config_echo{{"csv", args.csv_path},
                   {"response", args.response},
                   {"predictors", predictors},
                   {"intercept", !args.no_intercept},
                   {"chain", chain_json(base_config)},
                   {"priors", priors_json(args.common.priors)},
                   {"threads", args.common.threads}};
  json report = make_report("compare", base_config.seed, std::move(config_echo));
  report["results"] = json{{"families", names},
                           {"log_marginals", std::move(log_marginals)},
                           {"log_bf_matrix", std::move(matrix)}};
  if (!args.csv_out.empty()) write_text(csv.str(), args.csv_out);
  write_report(report, args.common.out_path);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string scenario_path;
  std::string mode;
  int replications = 0;    // 0: take from the scenario file
  double cutoff = 0.0;     // 0: take from the scenario file
  double match_fpr = 0.0;  // 0: disabled
  std::string csv_out;
  CommonOptions common;
};

json aggregate_json(const ctpt::RecoveryResult& r) {
  const auto pair = [](double mean, double sd) { return json{{"mean", mean}, {"sd", sd}}; };
  return json{{"mean", pair(r.column_means.mean, r.column_sds.mean)},
              {"mode", pair(r.column_means.mode, r.column_sds.mode)},
              {"p2.5", pair(r.column_means.p2_5, r.column_sds.p2_5)},
              {"p25", pair(r.column_means.p25, r.column_sds.p25)},
              {"p50", pair(r.column_means.p50, r.column_sds.p50)},
              {"p75", pair(r.column_means.p75, r.column_sds.p75)},
              {"p97.5", pair(r.column_means.p97_5, r.column_sds.p97_5)},
              {"ci_length", pair(r.column_means.ci_length, r.column_sds.ci_length)}};
}

void run_simulate(const SimulateArgs& args) {
  ctpt::ScenarioFile file = ctpt::read_scenario_file(args.scenario_path);
  if (args.replications > 0) file.replications = args.replications;
  if (args.cutoff > 0.0) file.cutoff = args.cutoff;
  if (args.common.seed_given) file.chain.seed = args.common.seed;

  if (args.mode != "recovery" && args.mode != "power") {
    throw ctpt::ValidationError("--mode must be recovery or power");
  }
  if (args.mode == "recovery" && file.scenario.is_null()) {
    throw ctpt::ValidationError(
        "recovery mode on a null scenario is not meaningful (coverage of a zero effect)");
  }

  json scenario_echo{{"name", file.name},
                     {"n", file.scenario.n},
                     {"alpha", file.scenario.alpha},
                     {"beta", file.scenario.beta},
                     {"tau", file.scenario.tau},
                     {"sigma_m", file.scenario.sigma_m},
                     {"sigma_y", file.scenario.sigma_y},
                     {"err_m", file.scenario.err_m.describe()},
                     {"err_y", file.scenario.err_y.describe()},
                     {"replications", file.replications},
                     {"cutoff", file.cutoff},
                     {"chain", chain_json(file.chain)},
                     {"threads", args.common.threads}};
  json report = make_report("simulate", file.chain.seed, std::move(scenario_echo));
  report["config"]["mode"] = args.mode;

  std::ostringstream csv;
  json results = json::array();
  if (args.mode == "recovery") {
    csv << "scenario,family,err_m,err_y,n,true_alphabeta,mean_mean,mean_sd,mode_mean,mode_sd,"
           "p2.5_mean,p2.5_sd,p25_mean,p25_sd,p50_mean,p50_sd,p75_mean,p75_sd,p97.5_mean,"
           "p97.5_sd,length_mean,length_sd,coverage,replications,failures\n";
    for (ctpt::ErrorFamily family : file.families) {
      const ctpt::RecoveryResult r = ctpt::run_recovery(file.scenario, file.replications, family,
                                                        file.chain, args.common.threads);
      results.push_back(json{{"family", ctpt::family_name(family)},
                             {"true_alphabeta", r.true_alphabeta},
                             {"aggregates", aggregate_json(r)},
                             {"coverage", r.coverage},
                             {"replications", r.replications},
                             {"failures", r.failures}});
      csv << file.name << "," << ctpt::family_name(family) << "," << file.scenario.err_m.describe()
          << "," << file.scenario.err_y.describe() << "," << file.scenario.n << ","
          << r.true_alphabeta << "," << r.column_means.mean << "," << r.column_sds.mean << ","
          << r.column_means.mode << "," << r.column_sds.mode << "," << r.column_means.p2_5 << ","
          << r.column_sds.p2_5 << "," << r.column_means.p25 << "," << r.column_sds.p25 << ","
          << r.column_means.p50 << "," << r.column_sds.p50 << "," << r.column_means.p75 << ","
          << r.column_sds.p75 << "," << r.column_means.p97_5 << "," << r.column_sds.p97_5 << ","
          << r.column_means.ci_length << "," << r.column_sds.ci_length << "," << r.coverage << ","
          << r.replications << "," << r.failures << "\n";
    }
  } else {
    csv << "scenario,family,err_m,err_y,n,alpha,beta,cutoff,tpr,fpr,target_fpr,matched_cutoff,"
           "tpr_at_matched,replications,alt_failures,null_failures\n";
    for (ctpt::ErrorFamily family : file.families) {
      const ctpt::PowerResult r = ctpt::run_power(file.scenario, file.scenario, file.replications,
                                                  family, file.chain, file.cutoff,
                                                  args.common.threads);
      json entry{{"family", ctpt::family_name(family)},
                 {"cutoff", r.cutoff},
                 {"tpr", r.tpr},
                 {"fpr", r.fpr},
                 {"alt_bfs", r.alt_bfs},
                 {"null_bfs", r.null_bfs},
                 {"replications", r.replications},
                 {"alt_failures", r.alt_failures},
                 {"null_failures", r.null_failures}};
      std::string matched_cutoff;
      std::string tpr_matched;
      if (args.match_fpr > 0.0) {
        const double cutoff = ctpt::match_cutoff(r.null_bfs, args.match_fpr);
        const double tpr_at = ctpt::empirical_rejection_rate(r.alt_bfs, cutoff);
        entry["matched"] =
            json{{"target_fpr", args.match_fpr},
                 {"cutoff", cutoff},
                 {"tpr_at_matched", tpr_at},
                 {"fpr_at_matched", ctpt::empirical_rejection_rate(r.null_bfs, cutoff)}};
        matched_cutoff = std::to_string(cutoff);
        tpr_matched = std::to_string(tpr_at);
      }
      results.push_back(std::move(entry));
      csv << file.name << "," << ctpt::family_name(family) << "," << file.scenario.err_m.describe()
          << "," << file.scenario.err_y.describe() << "," << file.scenario.n << ","
          << file.scenario.alpha << "," << file.scenario.beta << "," << r.cutoff << "," << r.tpr
          << "," << r.fpr << "," << args.match_fpr << "," << matched_cutoff << "," << tpr_matched
          << "," << r.replications << "," << r.alt_failures << "," << r.null_failures << "\n";
    }
  }
  report["results"] = std::move(results);
  if (!args.csv_out.empty()) write_text(csv.str(), args.csv_out);
  write_report(report, args.common.out_path);
}

// ---------------------------------------------------------------------------
// dist

struct DistArgs {
  std::string subcommand;
  double value = 0.0;
  double gamma = 1.0;
  std::string nu = "inf";
  long long n = 1000;
  std::uint64_t seed = 1;
  double gamma_min = 0.2;
  double gamma_max = 5.0;
  int points = 81;
  std::string out_path;
};

void run_dist(const DistArgs& args) {
  std::ostringstream body;
  body.precision(10);
  if (args.subcommand == "skewcurve") {
    const ctpt::TailSpec tail = parse_tail(args.nu);
    if (!tail.is_normal_limit() && !(tail.nu() > 3.0)) {
      throw ctpt::ValidationError("skewcurve requires nu > 3 or 'inf'");
    }
    if (args.points < 2) throw ctpt::ValidationError("--points must be at least 2");
    body << "gamma,sk_fisher,sk_ag\n";
    const double log_lo = std::log(args.gamma_min);
    const double log_hi = std::log(args.gamma_max);
    for (int i = 0; i < args.points; ++i) {
      const double g = std::exp(log_lo + (log_hi - log_lo) * i / (args.points - 1));
      body << g << "," << ctpt::skewness_fisher(ctpt::CtptSpec(g, tail)) << ","
           << ctpt::skewness_ag(g) << "\n";
    }
  } else if (args.subcommand == "sample") {
    const ctpt::CtptSpec spec(args.gamma, parse_tail(args.nu));
    if (args.n < 1) throw ctpt::ValidationError("--n must be at least 1");
    ctpt::SeededRng rng(args.seed, 0);
    const Eigen::VectorXd draws = ctpt::sample(args.n, spec, rng);
    for (Eigen::Index i = 0; i < draws.size(); ++i) body << draws[i] << "\n";
  } else {
    const ctpt::CtptSpec spec(args.gamma, parse_tail(args.nu));
    double out = 0.0;
    if (args.subcommand == "pdf") {
      out = ctpt::pdf(args.value, spec);
    } else if (args.subcommand == "cdf") {
      out = ctpt::cdf(args.value, spec);
    } else if (args.subcommand == "quantile") {
      out = ctpt::quantile(args.value, spec);
    } else {
      throw ctpt::ValidationError("unknown dist subcommand: " + args.subcommand);
    }
    if (out == 0.0) out = 0.0;  // normalize -0
    body << out << "\n";
  }
  if (args.out_path.empty()) {
    std::cout << body.str();
  } else {
    write_text(body.str(), args.out_path);
  }
}

int dispatch(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ctpt::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const ctpt::DomainError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const ctpt::NumericalError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const ctpt::IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 4;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skew-t regression and Bayesian mediation toolkit"};
  app.require_subcommand(1);

  std::vector<std::string> raw_args(argv + 1, argv + argc);

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit one regression and report the posterior");
  fit_cmd->add_option("--csv", fit.csv_path, "input CSV file")->required();
  fit_cmd->add_option("--response", fit.response, "response column")->required();
  fit_cmd->add_option("--predictors", fit.predictors, "comma-separated predictor columns")
      ->required();
  fit_cmd->add_flag("--no-intercept", fit.no_intercept, "do not add an intercept column");
  add_common_options(fit_cmd, fit.common);

  MediateArgs mediate;
  CLI::App* mediate_cmd =
      app.add_subcommand("mediate", "two-equation mediation analysis with Bayes factors");
  mediate_cmd->add_option("--csv", mediate.csv_path, "input CSV file")->required();
  mediate_cmd->add_option("--x", mediate.x_col, "independent variable column")->required();
  mediate_cmd->add_option("--m", mediate.m_col, "mediator column")->required();
  mediate_cmd->add_option("--y", mediate.y_col, "outcome column")->required();
  mediate_cmd->add_option("--q00", mediate.q00, "P(both paths zero | no indirect effect)");
  mediate_cmd->add_option("--q01", mediate.q01, "P(first zero, second nonzero | null)");
  mediate_cmd->add_option("--q10", mediate.q10, "P(first nonzero, second zero | null)");
  mediate_cmd->add_flag("--no-bayes-factors", mediate.skip_bayes_factors,
                        "skip evidence estimation, report summaries only");
  add_common_options(mediate_cmd, mediate.common);

  CompareArgs compare;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "fit all four error families and report the log-BF matrix");
  compare_cmd->add_option("--csv", compare.csv_path, "input CSV file")->required();
  compare_cmd->add_option("--response", compare.response, "response column")->required();
  compare_cmd->add_option("--predictors", compare.predictors, "comma-separated predictor columns")
      ->required();
  compare_cmd->add_flag("--no-intercept", compare.no_intercept, "do not add an intercept column");
  compare_cmd->add_option("--csv-out", compare.csv_out, "also write the matrix as CSV");
  add_common_options(compare_cmd, compare.common, /*with_family=*/false);

  SimulateArgs simulate;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run a scenario file");
  simulate_cmd->add_option("--scenario", simulate.scenario_path, "scenario JSON file")->required();
  simulate_cmd->add_option("--mode", simulate.mode, "recovery or power")->required();
  simulate_cmd->add_option("--replications", simulate.replications,
                           "override the scenario's replication count");
  simulate_cmd->add_option("--cutoff", simulate.cutoff, "override the Bayes-factor cutoff");
  simulate_cmd->add_option("--match-fpr", simulate.match_fpr,
                           "derive a cutoff from the null runs at this false positive rate");
  simulate_cmd->add_option("--csv-out", simulate.csv_out, "also write a flat CSV of the results");
  add_common_options(simulate_cmd, simulate.common, /*with_family=*/false);

  DistArgs dist;
  CLI::App* dist_cmd = app.add_subcommand("dist", "distribution queries");
  dist_cmd->add_option("subcommand", dist.subcommand, "pdf | cdf | quantile | sample | skewcurve")
      ->required();
  dist_cmd->add_option("value", dist.value, "evaluation point (pdf/cdf) or probability (quantile)");
  dist_cmd->add_option("--gamma", dist.gamma, "skewness parameter");
  dist_cmd->add_option("--nu", dist.nu, "tail parameter (> 2) or 'inf'");
  dist_cmd->add_option("--n", dist.n, "sample size");
  dist_cmd->add_option("--seed", dist.seed, "sampling seed");
  dist_cmd->add_option("--gamma-min", dist.gamma_min, "skewcurve grid lower end");
  dist_cmd->add_option("--gamma-max", dist.gamma_max, "skewcurve grid upper end");
  dist_cmd->add_option("--points", dist.points, "skewcurve grid size");
  dist_cmd->add_option("--out", dist.out_path, "write output here instead of stdout");

  try {
    // config files supply defaults; parse flags afterwards so they override
    for (CommonOptions* opts : {&fit.common, &mediate.common, &compare.common, &simulate.common}) {
      apply_config_file(raw_args, *opts);
    }
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  } catch (const ctpt::IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 4;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }

  if (fit_cmd->parsed()) return dispatch([&] { run_fit(fit); });
  if (mediate_cmd->parsed()) return dispatch([&] { run_mediate(mediate); });
  if (compare_cmd->parsed()) return dispatch([&] { run_compare(compare); });
  if (simulate_cmd->parsed()) return dispatch([&] { run_simulate(simulate); });
  if (dist_cmd->parsed()) return dispatch([&] { run_dist(dist); });
  return 2;
}
