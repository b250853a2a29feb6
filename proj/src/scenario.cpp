#include "ctpt/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ctpt/errors.hpp"

namespace ctpt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
  throw ValidationError("scenario: " + pointer + ": " + message);
}

double number_at(const json& node, const std::string& pointer) {
  if (!node.is_number()) fail(pointer, "expected a number");
  return node.get<double>();
}

double opt_number(const json& obj, const char* key, double fallback, const std::string& base) {
  if (!obj.contains(key)) return fallback;
  return number_at(obj.at(key), base + "/" + key);
}

int opt_int(const json& obj, const char* key, int fallback, const std::string& base) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj.at(key);
  if (!node.is_number_integer()) fail(base + "/" + key, "expected an integer");
  return node.get<int>();
}

TailSpec tail_at(const json& node, const std::string& pointer) {
  if (node.is_string()) {
    if (node.get<std::string>() == "inf") return TailSpec::normal_limit();
    fail(pointer, "expected a number greater than 2 or \"inf\"");
  }
  if (!node.is_number()) fail(pointer, "expected a number greater than 2 or \"inf\"");
  const double nu = node.get<double>();
  if (!(nu > 2.0)) fail(pointer, "nu must exceed 2");
  return TailSpec::finite(nu);
}

ErrorSpec error_spec_at(const json& node, const std::string& pointer) {
  if (!node.is_object()) fail(pointer, "expected an object with a 'type' field");
  if (!node.contains("type") || !node.at("type").is_string()) {
    fail(pointer + "/type", "expected one of ctpt, tukey, normal");
  }
  const std::string type = node.at("type").get<std::string>();
  if (type == "normal") return ErrorSpec::normal();
  if (type == "ctpt") {
    if (!node.contains("gamma")) fail(pointer + "/gamma", "required for ctpt errors");
    if (!node.contains("nu")) fail(pointer + "/nu", "required for ctpt errors");
    const double gamma = number_at(node.at("gamma"), pointer + "/gamma");
    return ErrorSpec::ctpt_err(gamma, tail_at(node.at("nu"), pointer + "/nu"));
  }
  if (type == "tukey") {
    if (!node.contains("g")) fail(pointer + "/g", "required for tukey errors");
    if (!node.contains("h")) fail(pointer + "/h", "required for tukey errors");
    return ErrorSpec::tukey(number_at(node.at("g"), pointer + "/g"),
                            number_at(node.at("h"), pointer + "/h"));
  }
  fail(pointer + "/type", "expected one of ctpt, tukey, normal");
}

}  // namespace

ScenarioFile parse_scenario_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("scenario: invalid JSON: ") + err.what());
  }
  if (!root.is_object()) throw ValidationError("scenario: /: expected a JSON object");

  ScenarioFile file;
  file.schema_version = opt_int(root, "schema_version", 1, "");
  if (file.schema_version != 1) fail("/schema_version", "unsupported schema version");
  if (root.contains("name")) {
    if (!root.at("name").is_string()) fail("/name", "expected a string");
    file.name = root.at("name").get<std::string>();
  }

  ScenarioConfig& s = file.scenario;
  s.n = opt_int(root, "n", s.n, "");
  s.alpha = opt_number(root, "alpha", s.alpha, "");
  s.beta = opt_number(root, "beta", s.beta, "");
  s.tau = opt_number(root, "tau", s.tau, "");
  s.intercept_m = opt_number(root, "intercept_m", s.intercept_m, "");
  s.intercept_y = opt_number(root, "intercept_y", s.intercept_y, "");
  s.sigma_m = opt_number(root, "sigma_m", s.sigma_m, "");
  s.sigma_y = opt_number(root, "sigma_y", s.sigma_y, "");
  if (root.contains("err_m")) s.err_m = error_spec_at(root.at("err_m"), "/err_m");
  if (root.contains("err_y")) s.err_y = error_spec_at(root.at("err_y"), "/err_y");

  file.replications = opt_int(root, "replications", file.replications, "");
  if (file.replications < 1) fail("/replications", "must be at least 1");
  file.cutoff = opt_number(root, "cutoff", file.cutoff, "");

  if (root.contains("families")) {
    const json& fams = root.at("families");
    if (!fams.is_array() || fams.empty()) fail("/families", "expected a non-empty array");
    file.families.clear();
    for (std::size_t i = 0; i < fams.size(); ++i) {
      if (!fams[i].is_string()) fail("/families/" + std::to_string(i), "expected a string");
      try {
        file.families.push_back(family_from_name(fams[i].get<std::string>()));
      } catch (const ValidationError& err) {
        fail("/families/" + std::to_string(i), err.what());
      }
    }
  } else if (root.contains("family")) {
    if (!root.at("family").is_string()) fail("/family", "expected a string");
    file.families = {family_from_name(root.at("family").get<std::string>())};
  }

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_integer()) fail("/seed", "expected an integer");
    file.chain.seed = root.at("seed").get<std::uint64_t>();
  }
  if (root.contains("chain")) {
    const json& chain = root.at("chain");
    if (!chain.is_object()) fail("/chain", "expected an object");
    file.chain.total_iterations = opt_int(chain, "iterations", file.chain.total_iterations, "/chain");
    file.chain.burn_in_fraction =
        opt_number(chain, "burn_in_fraction", file.chain.burn_in_fraction, "/chain");
    file.chain.n_chains = opt_int(chain, "chains", file.chain.n_chains, "/chain");
    file.chain.adapt_window = opt_int(chain, "adapt_window", file.chain.adapt_window, "/chain");
    file.chain.target_accept = opt_number(chain, "target_accept", file.chain.target_accept, "/chain");
  }

  try {
    s.check();
    file.chain.check();
  } catch (const std::exception& err) {
    throw ValidationError(std::string("scenario: ") + err.what());
  }
  return file;
}

ScenarioFile read_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_json(buffer.str());
}

}  // namespace ctpt
