#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "prophet/alpha.hpp"
#include "prophet/bounds.hpp"
#include "prophet/core_model.hpp"
#include "prophet/error.hpp"
#include "prophet/simulator.hpp"
#include "prophet/thresholds.hpp"

namespace prophet::io {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_validation("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail_validation("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_validation("cannot write '" + path + "'");
  out << text;
}

/// Real number, or null for the accept-everything threshold.
inline json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

namespace detail {

inline double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) fail_validation(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

inline std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) fail_validation(std::string("missing array field '") + key + "'");
  std::vector<double> v;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) fail_validation(std::string("non-numeric entry in '") + key + "'");
    v.push_back(x.get<double>());
  }
  return v;
}

inline void only_keys(const json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) fail_validation("unknown field '" + k + "'");
  }
}

}  // namespace detail

// --- Distribution / Instance ------------------------------------------------

inline Distribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    fail_validation("distribution needs a string field 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "point_mass") {
    detail::only_keys(j, {"kind", "value"});
    return Distribution::point_mass(detail::number(j, "value"));
  }
  if (kind == "uniform") {
    detail::only_keys(j, {"kind", "lo", "hi"});
    return Distribution::uniform(detail::number(j, "lo"), detail::number(j, "hi"));
  }
  if (kind == "finite") {
    detail::only_keys(j, {"kind", "values", "probs"});
    return Distribution::finite(detail::numbers(j, "values"), detail::numbers(j, "probs"));
  }
  if (kind == "mixture") {
    detail::only_keys(j, {"kind", "weights", "components"});
    if (!j.contains("components") || !j.at("components").is_array()) fail_validation("mixture needs 'components'");
    std::vector<Distribution> comps;
    for (const auto& c : j.at("components")) comps.push_back(distribution_from_json(c));
    return Distribution::mixture(detail::numbers(j, "weights"), std::move(comps));
  }
  fail_validation("unknown distribution kind '" + kind + "'");
}

inline json to_json(const Distribution& d) {
  switch (d.kind()) {
    case Distribution::Kind::point_mass:
      return {{"kind", "point_mass"}, {"value", d.values().front()}};
    case Distribution::Kind::uniform:
      return {{"kind", "uniform"}, {"lo", d.lo()}, {"hi", d.hi()}};
    case Distribution::Kind::finite:
      return {{"kind", "finite"}, {"values", d.values()}, {"probs", d.probs()}};
    case Distribution::Kind::mixture: {
      json comps = json::array();
      for (const auto& c : d.components()) comps.push_back(to_json(c));
      return {{"kind", "mixture"}, {"weights", d.probs()}, {"components", comps}};
    }
  }
  return {};
}

inline Instance instance_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dists") || !j.at("dists").is_array())
    fail_validation("instance needs an array field 'dists'");
  detail::only_keys(j, {"dists"});
  std::vector<Distribution> d;
  for (const auto& x : j.at("dists")) d.push_back(distribution_from_json(x));
  return Instance(std::move(d));
}

inline json to_json(const Instance& inst) {
  json arr = json::array();
  for (const auto& d : inst.dists()) arr.push_back(to_json(d));
  return {{"dists", arr}};
}

// --- AlphaStrategy -------------------------------------------------------------

/// Tabulated strategy file: {"grid":[...], "alpha":[...]}.
inline AlphaStrategy alpha_from_json(const json& j) {
  detail::only_keys(j, {"grid", "alpha"});
  return AlphaStrategy::tabulated(detail::numbers(j, "grid"), detail::numbers(j, "alpha"));
}

inline json alpha_table_json(const std::vector<double>& grid, const std::vector<double>& alpha) {
  return {{"grid", grid}, {"alpha", alpha}};
}

/// Any strategy as a table. Piecewise levels become explicit jumps.
inline json to_json(const AlphaStrategy& a) {
  using K = AlphaStrategy::Kind;
  std::vector<double> g, v;
  switch (a.kind()) {
    case K::constant:
      g = {0.0, 1.0};
      v = {a.levels()[0], a.levels()[0]};
      break;
    case K::affine_clipped: {
      g.push_back(0.0);
      for (double b : a.breakpoints()) g.push_back(b);
      g.push_back(1.0);
      for (double x : g) v.push_back(a.value(x));
      break;
    }
    case K::piecewise_constant: {
      const auto& lv = a.levels();
      const double m = static_cast<double>(lv.size());
      for (std::size_t k = 0; k < lv.size(); ++k) {
        g.push_back(static_cast<double>(k) / m);
        v.push_back(lv[k]);
        g.push_back(static_cast<double>(k + 1) / m);
        v.push_back(lv[k]);
      }
      g.back() = 1.0;
      break;
    }
    case K::tabulated:
      g = a.grid();
      v = a.levels();
      break;
  }
  return alpha_table_json(g, v);
}

/// `--alpha` mini-syntax: constant:p | affine:a,b | pw:a1,...,am | tab:path.
inline AlphaStrategy parse_alpha(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail_validation("alpha '" + text + "' lacks 'kind:'");
  const std::string kind = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  const auto list = [&] {
    std::vector<double> v;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        fail_validation("bad number '" + item + "' in alpha");
      }
    }
    return v;
  };
  if (kind == "constant") {
    const auto v = list();
    require(v.size() == 1, "constant:p takes one number");
    return AlphaStrategy::constant(v[0]);
  }
  if (kind == "affine") {
    const auto v = list();
    require(v.size() == 2, "affine:a,b takes intercept and slope");
    return AlphaStrategy::affine(v[0], v[1]);
  }
  if (kind == "pw") return AlphaStrategy::piecewise(list());
  if (kind == "tab") return alpha_from_json(read_json_file(args));
  fail_validation("unknown alpha kind '" + kind + "' (expected constant|affine|pw|tab)");
}

// --- Reports -------------------------------------------------------------------

inline json to_json(const ThresholdSchedule& s) {
  json tau = json::array();
  for (double t : s.tau) tau.push_back(real(t));
  json atoms = json::array();
  for (const auto& r : s.atoms) {
    json acc = json::object();
    for (const auto& [j, p] : r.accept) acc[std::to_string(j)] = p;
    atoms.push_back({{"pos", r.pos}, {"accept", acc}});
  }
  return {{"tau", tau}, {"atoms", atoms}};
}

inline json to_json(const BoundReport& r) {
  return {{"per_j", r.per_j}, {"min", r.min_value}, {"argmin", r.argmin_j}};
}

inline json to_json(const SimReport& r) {
  return {{"trials", r.trials},       {"mean_reward", r.mean_reward}, {"std_error", r.std_error},
          {"prophet", r.prophet},     {"ratio", r.ratio},             {"ratio_ci_radius", r.ratio_ci_radius},
          {"seed", r.seed}};
}

inline std::string csv_header(const SimReport&) {
  return "trials,mean_reward,std_error,prophet,ratio,ratio_ci_radius,seed\n";
}

/// Shortest round-trip text of a double.
inline std::string num(double v) { return json(v).dump(); }

inline std::string csv_row(const SimReport& r) {
  return std::to_string(r.trials) + "," + num(r.mean_reward) + "," + num(r.std_error) + "," + num(r.prophet) + "," +
         num(r.ratio) + "," + num(r.ratio_ci_radius) + "," + std::to_string(r.seed) + "\n";
}

}  // namespace prophet::io
