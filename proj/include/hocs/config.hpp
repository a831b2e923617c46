/*
 Copyright 2026 The hocs Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Run configuration: one JSON document with a "problem" map and an optional
// "run" map. Scalars broadcast to sequences; unknown keys are rejected.
// The schema is documented in docs/config.md.

#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hocs/model.hpp"
#include "hocs/recursion.hpp"
#include "hocs/simulate.hpp"

namespace hocs {

using Json = nlohmann::json;

struct RunSettings {
  std::size_t n_paths = 100000;
  std::uint64_t master_seed = 42;
  double oracle_tol = 1e-10;
  int oracle_max_iter = 10000;
  double verify_tol = 1e-6;
  std::string output_dir = "out";
  bool prop7_literal_recursion = false;
  MeanMode mean_mode = MeanMode::Exact;
  unsigned threads = 0;
  std::size_t max_csv_paths = 20;
  bool allow_zero_weights = false;
  bool allow_uncontrollable_steps = false;

  [[nodiscard]] SolveOptions solve_options() const {
    SolveOptions o;
    o.validation.allow_zero_weights = allow_zero_weights;
    o.validation.allow_uncontrollable_steps = allow_uncontrollable_steps;
    o.literal_moment_recursion = prop7_literal_recursion;
    return o;
  }

  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

struct RunConfig {
  ProblemSpec problem;
  RunSettings run;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorCode::Config, what); }

inline void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where + " must be a map");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

inline const Json& need(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail("missing key '" + std::string(key) + "' in " + where);
  return *it;
}

inline double number(const Json& v, const std::string& what) {
  if (!v.is_number()) fail(what + " must be a number");
  return v.get<double>();
}

inline Sequence sequence(const Json& v, Horizon h, const std::string& what) {
  if (v.is_number()) return broadcast(v.get<double>(), h);
  if (!v.is_array()) fail(what + " must be a number or an array");
  Sequence s;
  for (const auto& e : v) s.push_back(number(e, what));
  try {
    return broadcast(s, h);
  } catch (const Error& e) {
    fail(what + ": " + e.what());
  }
}

inline std::vector<double> samples(const Json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) fail(what + " must be a non-empty array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(number(e, what));
  return out;
}

inline ProblemClass parse_class(const std::string& s) {
  for (auto c : {ProblemClass::Deterministic, ProblemClass::Additive, ProblemClass::MultState,
                 ProblemClass::HigherMoment}) {
    if (s == to_string(c)) return c;
  }
  fail("unknown problem class '" + s + "'");
}

inline NoiseKind parse_kind(const std::string& s) {
  for (auto k : {NoiseKind::None, NoiseKind::Additive, NoiseKind::MultState, NoiseKind::MultMeanField}) {
    if (s == to_string(k)) return k;
  }
  fail("unknown noise kind '" + s + "'");
}

inline std::string str(const Json& v, const std::string& what) {
  if (!v.is_string()) fail(what + " must be a string");
  return v.get<std::string>();
}

inline NoiseSpec parse_noise(const Json& j) {
  reject_unknown(j, "problem.noise", {"kind", "distribution", "moment_override"});
  const NoiseKind kind = parse_kind(str(need(j, "kind", "problem.noise"), "noise.kind"));
  NoiseDistribution dist = GaussianNoise{0.0};
  if (auto it = j.find("distribution"); it != j.end()) {
    const Json& d = *it;
    const std::string type = str(need(d, "type", "noise.distribution"), "distribution.type");
    if (type == "Gaussian") {
      reject_unknown(d, "noise.distribution", {"type", "sigma"});
      dist = GaussianNoise{number(need(d, "sigma", "noise.distribution"), "sigma")};
    } else if (type == "Rademacher") {
      reject_unknown(d, "noise.distribution", {"type", "scale"});
      dist = RademacherNoise{number(need(d, "scale", "noise.distribution"), "scale")};
    } else if (type == "UniformSymmetric") {
      reject_unknown(d, "noise.distribution", {"type", "halfwidth"});
      dist = UniformSymmetricNoise{number(need(d, "halfwidth", "noise.distribution"), "halfwidth")};
    } else if (type == "Empirical") {
      reject_unknown(d, "noise.distribution", {"type", "samples"});
      dist = EmpiricalNoise{samples(need(d, "samples", "noise.distribution"), "noise samples")};
    } else {
      fail("unknown noise distribution '" + type + "'");
    }
  } else if (kind != NoiseKind::None) {
    fail("noise kind " + std::string(to_string(kind)) + " needs a distribution");
  }
  std::map<int, double> overrides;
  if (auto it = j.find("moment_override"); it != j.end()) {
    if (!it->is_object()) fail("moment_override must be a map from even order to value");
    for (const auto& [key, value] : it->items()) {
      int order = 0;
      try {
        std::size_t pos = 0;
        order = std::stoi(key, &pos);
        if (pos != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        fail("moment_override key '" + key + "' is not an integer");
      }
      if (order < 2 || order % 2 != 0) fail("moment_override order must be even and >= 2");
      overrides[order] = number(value, "moment_override value");
    }
  }
  return NoiseSpec(kind, std::move(dist), std::move(overrides));
}

inline InitialLaw parse_initial(const Json& j) {
  reject_unknown(j, "problem.initial", {"mean", "law"});
  InitialLaw law;
  std::string type = "Dirac";
  const Json* l = nullptr;
  if (auto it = j.find("law"); it != j.end()) {
    l = &*it;
    type = str(need(*l, "type", "initial.law"), "initial.law.type");
  }
  if (type == "Dirac") {
    if (l) reject_unknown(*l, "initial.law", {"type"});
    law = InitialLaw::dirac(number(need(j, "mean", "problem.initial"), "initial.mean"));
  } else if (type == "Gaussian") {
    reject_unknown(*l, "initial.law", {"type", "variance"});
    law = InitialLaw::gaussian(number(need(j, "mean", "problem.initial"), "initial.mean"),
                               number(need(*l, "variance", "initial.law"), "variance"));
  } else if (type == "Empirical") {
    reject_unknown(*l, "initial.law", {"type", "samples"});
    law = InitialLaw::empirical(samples(need(*l, "samples", "initial.law"), "initial samples"));
    if (auto it = j.find("mean"); it != j.end()) law.mean = number(*it, "initial.mean");
  } else {
    fail("unknown initial law '" + type + "'");
  }
  return law;
}

inline Json sequence_json(const Sequence& s) { return Json(s); }

}  // namespace config_detail

inline ProblemSpec problem_from_json(const Json& j) {
  using namespace config_detail;
  reject_unknown(j, "problem",
                 {"class", "horizon", "mean_dynamics", "deviation_dynamics", "cost", "noise", "initial"});
  ProblemSpec s;
  s.problem_class = parse_class(str(need(j, "class", "problem"), "problem.class"));
  const Json& hz = need(j, "horizon", "problem");
  if (!hz.is_number_integer() || hz.get<long long>() < 1) fail("horizon must be a positive integer");
  s.horizon = Horizon{hz.get<std::size_t>()};
  const Horizon h = s.horizon;

  const Json& md = need(j, "mean_dynamics", "problem");
  reject_unknown(md, "problem.mean_dynamics", {"a_bar", "b_bar"});
  s.mean_dyn.a_bar = sequence(need(md, "a_bar", "mean_dynamics"), h, "a_bar");
  s.mean_dyn.b_bar = sequence(need(md, "b_bar", "mean_dynamics"), h, "b_bar");
  if (auto it = j.find("deviation_dynamics"); it != j.end()) {
    reject_unknown(*it, "problem.deviation_dynamics", {"a", "b"});
    s.dev_dyn.a = sequence(need(*it, "a", "deviation_dynamics"), h, "a");
    s.dev_dyn.b = sequence(need(*it, "b", "deviation_dynamics"), h, "b");
  } else {
    s.dev_dyn = {s.mean_dyn.a_bar, s.mean_dyn.b_bar};
  }

  const Json& c = need(j, "cost", "problem");
  reject_unknown(c, "problem.cost", {"q", "q_terminal", "q_bar", "q_bar_terminal", "r", "r_bar", "p", "o"});
  auto opt_seq = [&](const char* key) {
    auto it = c.find(key);
    return it == c.end() ? broadcast(0.0, h) : sequence(*it, h, key);
  };
  auto opt_num = [&](const char* key) {
    auto it = c.find(key);
    return it == c.end() ? 0.0 : number(*it, key);
  };
  auto integer = [&](const char* key, int def) {
    auto it = c.find(key);
    if (it == c.end()) return def;
    if (!it->is_number_integer()) fail(std::string(key) + " must be an integer");
    return it->get<int>();
  };
  s.cost.q = opt_seq("q");
  s.cost.q_terminal = opt_num("q_terminal");
  s.cost.q_bar = sequence(need(c, "q_bar", "cost"), h, "q_bar");
  s.cost.q_bar_terminal = number(need(c, "q_bar_terminal", "cost"), "q_bar_terminal");
  s.cost.r = opt_seq("r");
  s.cost.r_bar = sequence(need(c, "r_bar", "cost"), h, "r_bar");
  s.cost.p = integer("p", 1);
  s.cost.o = integer("o", 1);

  s.noise = j.contains("noise") ? parse_noise(j.at("noise")) : NoiseSpec::none();
  s.initial = parse_initial(need(j, "initial", "problem"));
  return s;
}

inline Json to_json(const ProblemSpec& s) {
  using config_detail::sequence_json;
  Json j;
  j["class"] = to_string(s.problem_class);
  j["horizon"] = s.horizon.n_steps;
  j["mean_dynamics"] = {{"a_bar", sequence_json(s.mean_dyn.a_bar)}, {"b_bar", sequence_json(s.mean_dyn.b_bar)}};
  j["deviation_dynamics"] = {{"a", sequence_json(s.dev_dyn.a)}, {"b", sequence_json(s.dev_dyn.b)}};
  j["cost"] = {{"q", sequence_json(s.cost.q)},         {"q_terminal", s.cost.q_terminal},
               {"q_bar", sequence_json(s.cost.q_bar)}, {"q_bar_terminal", s.cost.q_bar_terminal},
               {"r", sequence_json(s.cost.r)},         {"r_bar", sequence_json(s.cost.r_bar)},
               {"p", s.cost.p},                        {"o", s.cost.o}};
  Json noise;
  noise["kind"] = to_string(s.noise.kind());
  if (s.noise.kind() != NoiseKind::None) {
    noise["distribution"] = std::visit(
        [](const auto& d) -> Json {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, GaussianNoise>) return {{"type", "Gaussian"}, {"sigma", d.sigma}};
          else if constexpr (std::is_same_v<D, RademacherNoise>) return {{"type", "Rademacher"}, {"scale", d.scale}};
          else if constexpr (std::is_same_v<D, UniformSymmetricNoise>)
            return {{"type", "UniformSymmetric"}, {"halfwidth", d.halfwidth}};
          else return {{"type", "Empirical"}, {"samples", d.samples}};
        },
        s.noise.distribution());
  }
  if (!s.noise.moment_override().empty()) {
    Json mo = Json::object();
    for (const auto& [order, value] : s.noise.moment_override()) mo[std::to_string(order)] = value;
    noise["moment_override"] = mo;
  }
  j["noise"] = noise;
  Json init;
  init["mean"] = s.initial.mean;
  init["law"] = std::visit(
      [](const auto& l) -> Json {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, DiracLaw>) return {{"type", "Dirac"}};
        else if constexpr (std::is_same_v<L, GaussianLaw>) return {{"type", "Gaussian"}, {"variance", l.variance}};
        else return {{"type", "Empirical"}, {"samples", l.samples}};
      },
      s.initial.law);
  j["initial"] = init;
  return j;
}

inline RunSettings run_from_json(const Json& j) {
  using namespace config_detail;
  reject_unknown(j, "run",
                 {"n_paths", "master_seed", "oracle_tol", "oracle_max_iter", "verify_tol", "output_dir",
                  "prop7_literal_recursion", "mean_mode", "threads", "max_csv_paths", "allow_zero_weights",
                  "allow_uncontrollable_steps"});
  RunSettings r;
  auto uint_at = [&](const char* key, auto& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number_unsigned()) fail(std::string("run.") + key + " must be a non-negative integer");
      dst = it->get<std::remove_reference_t<decltype(dst)>>();
    }
  };
  auto bool_at = [&](const char* key, bool& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_boolean()) fail(std::string("run.") + key + " must be a boolean");
      dst = it->get<bool>();
    }
  };
  uint_at("n_paths", r.n_paths);
  uint_at("master_seed", r.master_seed);
  uint_at("threads", r.threads);
  uint_at("max_csv_paths", r.max_csv_paths);
  if (auto it = j.find("oracle_max_iter"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) fail("run.oracle_max_iter must be a positive integer");
    r.oracle_max_iter = it->get<int>();
  }
  if (auto it = j.find("oracle_tol"); it != j.end()) r.oracle_tol = number(*it, "run.oracle_tol");
  if (auto it = j.find("verify_tol"); it != j.end()) r.verify_tol = number(*it, "run.verify_tol");
  if (auto it = j.find("output_dir"); it != j.end()) r.output_dir = str(*it, "run.output_dir");
  if (auto it = j.find("mean_mode"); it != j.end()) {
    const std::string m = str(*it, "run.mean_mode");
    if (m == "exact") r.mean_mode = MeanMode::Exact;
    else if (m == "empirical") r.mean_mode = MeanMode::Empirical;
    else fail("run.mean_mode must be 'exact' or 'empirical'");
  }
  bool_at("prop7_literal_recursion", r.prop7_literal_recursion);
  bool_at("allow_zero_weights", r.allow_zero_weights);
  bool_at("allow_uncontrollable_steps", r.allow_uncontrollable_steps);
  return r;
}

inline Json to_json(const RunSettings& r) {
  return {{"n_paths", r.n_paths},
          {"master_seed", r.master_seed},
          {"oracle_tol", r.oracle_tol},
          {"oracle_max_iter", r.oracle_max_iter},
          {"verify_tol", r.verify_tol},
          {"output_dir", r.output_dir},
          {"prop7_literal_recursion", r.prop7_literal_recursion},
          {"mean_mode", r.mean_mode == MeanMode::Exact ? "exact" : "empirical"},
          {"threads", r.threads},
          {"max_csv_paths", r.max_csv_paths},
          {"allow_zero_weights", r.allow_zero_weights},
          {"allow_uncontrollable_steps", r.allow_uncontrollable_steps}};
}

inline RunConfig config_from_json(const Json& j) {
  config_detail::reject_unknown(j, "config", {"problem", "run"});
  RunConfig cfg;
  cfg.problem = problem_from_json(config_detail::need(j, "problem", "config"));
  if (auto it = j.find("run"); it != j.end()) cfg.run = run_from_json(*it);
  return cfg;
}

inline Json to_json(const RunConfig& cfg) { return {{"problem", to_json(cfg.problem)}, {"run", to_json(cfg.run)}}; }

inline std::string dump_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

inline RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Config, std::string("malformed config: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Config, std::string("bad config value: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// 64-bit FNV-1a of the canonical serialization; used to pin built-in configs.
inline std::uint64_t content_hash(const RunConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace hocs
