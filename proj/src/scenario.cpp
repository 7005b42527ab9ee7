#include "ucd/scenario.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ucd {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormat = "ucd-scenario";
constexpr int kVersion = 1;

std::string line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n');
  return "line " + std::to_string(line);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key))
    throw ScenarioParseError(where + "." + key, "missing required field");
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ScenarioParseError(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.contains(key) || obj.at(key).is_null())
    return fallback;
  return number(obj, key, where);
}

std::optional<double> optional_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null())
    return std::nullopt;
  return number(obj, key, where);
}

const json& section(const json& root, const std::string& key, json::value_t type) {
  if (!root.contains(key))
    throw ScenarioParseError(key, "missing required section");
  const auto& v = root.at(key);
  if (v.type() != type)
    throw ScenarioParseError(key, type == json::value_t::array ? "expected a list" : "expected a section");
  return v;
}

VirtualResourceParams parse_virtual(const json& root, const std::string& key, VirtualRole role) {
  VirtualResourceParams p;
  p.role = role;
  if (!root.contains(key))
    return p;
  const auto& obj = root.at(key);
  if (!obj.is_object())
    throw ScenarioParseError(key, "expected a section");
  p.a = number(obj, "a", key);
  p.b = number(obj, "b", key);
  p.c = number(obj, "c", key);
  return p;
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array())
    throw ScenarioParseError(where, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ScenarioParseError(where + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0; }

} // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  auto check = [&](bool ok, const std::string& field, const std::string& rule) {
    if (!ok)
      out.push_back(field + ": " + rule);
  };

  check(!s.units.empty(), "units", "need at least one thermal unit (N >= 1)");
  check(s.units_count() <= Commitment::max_units, "units",
        "at most " + std::to_string(Commitment::max_units) + " units supported");
  for (std::size_t i = 0; i < s.units.size(); ++i) {
    const auto& u = s.units[i];
    const std::string f = "units[" + std::to_string(i) + "]";
    for (auto [name, v] : {std::pair{"b", u.b}, std::pair{"c", u.c}, std::pair{"beta", u.beta},
                           std::pair{"gamma", u.gamma}, std::pair{"quota", u.quota}})
      check(std::isfinite(v), f + "." + name, "must be finite");
    check(u.a > 0 && std::isfinite(u.a), f + ".a", "must be > 0 (strict convexity)");
    check(finite_nonneg(u.p_min), f + ".p_min", "must be >= 0");
    check(std::isfinite(u.p_max) && u.p_min <= u.p_max, f + ".p_max", "must be >= p_min");
    if (u.ramp_down)
      check(finite_nonneg(*u.ramp_down), f + ".ramp_down", "must be >= 0");
    if (u.ramp_up)
      check(finite_nonneg(*u.ramp_up), f + ".ramp_up", "must be >= 0");
    check(finite_nonneg(u.c_bank), f + ".c_bank", "must be >= 0");
    check(finite_nonneg(u.c_fix), f + ".c_fix", "must be >= 0");
    check(finite_nonneg(u.c_shut), f + ".c_shut", "must be >= 0");
    check(finite_nonneg(u.alpha), f + ".alpha", "must be >= 0");
  }
  for (const auto& [name, v] : {std::pair{"dg", s.dg}, std::pair{"dr", s.dr}}) {
    check(v.a > 0 && std::isfinite(v.a), std::string(name) + ".a", "must be > 0 (strict convexity)");
    check(std::isfinite(v.b) && std::isfinite(v.c), name, "coefficients must be finite");
  }
  check(finite_nonneg(s.cet.price), "cet.price", "must be >= 0");
  check(s.eta_max > 0 && s.eta_max <= 1, "eta_max", "must lie in (0,1]");
  check(!s.periods.empty(), "periods", "horizon must be >= 1");
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    const auto& p = s.periods[t];
    const std::string f = "periods[" + std::to_string(t) + "]";
    check(finite_nonneg(p.demand), f + ".demand", "must be >= 0");
    check(finite_nonneg(p.dg_max), f + ".dg_max", "must be >= 0");
    check(finite_nonneg(p.dr_max), f + ".dr_max", "must be >= 0");
    check(finite_nonneg(p.reserve_lo), f + ".reserve_lo", "must be >= 0");
    check(finite_nonneg(p.reserve_hi), f + ".reserve_hi", "must be >= 0");
  }
  check(s.initial_dispatch.values.size() == s.units_count() + 2, "initial.dispatch",
        "must have N thermal entries plus dg and dr");
  check(s.initial_commitment.size() == s.units_count(), "initial.commitment", "must have N entries");
  for (Eigen::Index i = 0; i < s.initial_dispatch.values.size(); ++i)
    check(finite_nonneg(s.initial_dispatch.values(i)), "initial.dispatch[" + std::to_string(i) + "]",
          "must be finite and >= 0");
  return out;
}

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(line_of(text, e.byte), "syntax error: " + std::string(e.what()));
  }
  if (!root.is_object())
    throw ScenarioParseError("line 1", "document must be an object");
  if (root.contains("format") && root.at("format") != kFormat)
    throw ScenarioParseError("format", "expected \"" + std::string(kFormat) + "\"");
  if (root.contains("version") && root.at("version") != kVersion)
    throw ScenarioParseError("version", "unsupported version");

  Scenario s;
  const auto& units = section(root, "units", json::value_t::array);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string w = "units[" + std::to_string(i) + "]";
    const auto& u = units[i];
    if (!u.is_object())
      throw ScenarioParseError(w, "expected a section");
    ThermalUnitParams p;
    p.a = number(u, "a", w);
    p.b = number(u, "b", w);
    p.c = number(u, "c", w);
    p.p_min = number(u, "p_min", w);
    p.p_max = number(u, "p_max", w);
    p.ramp_down = optional_number(u, "ramp_down", w);
    p.ramp_up = optional_number(u, "ramp_up", w);
    p.c_bank = number_or(u, "c_bank", w, 0);
    p.c_fix = number_or(u, "c_fix", w, 0);
    p.c_shut = number_or(u, "c_shut", w, 0);
    p.alpha = number_or(u, "alpha", w, 0);
    p.beta = number_or(u, "beta", w, 0);
    p.gamma = number_or(u, "gamma", w, 0);
    p.quota = number_or(u, "quota", w, 0);
    s.units.push_back(p);
  }
  const int n_units = s.units_count();

  s.dg = parse_virtual(root, "dg", VirtualRole::distributed_generation);
  s.dr = parse_virtual(root, "dr", VirtualRole::demand_response);
  if (root.contains("cet")) {
    const auto& cet = section(root, "cet", json::value_t::object);
    s.cet.price = number_or(cet, "price", "cet", 0);
  }

  double reserve_lo_frac = 0, reserve_hi_frac = 0;
  if (root.contains("options")) {
    const auto& opt = section(root, "options", json::value_t::object);
    s.eta_max = number_or(opt, "eta_max", "options", 1.0);
    if (opt.contains("ramp_enforced")) {
      if (!opt.at("ramp_enforced").is_boolean())
        throw ScenarioParseError("options.ramp_enforced", "expected true or false");
      s.ramp_enforced = opt.at("ramp_enforced").get<bool>();
    }
    if (opt.contains("reserve_fraction")) {
      const auto& rf = opt.at("reserve_fraction");
      if (rf.is_number()) {
        reserve_lo_frac = reserve_hi_frac = rf.get<double>();
      } else if (rf.is_object()) {
        reserve_lo_frac = number_or(rf, "lo", "options.reserve_fraction", 0);
        reserve_hi_frac = number_or(rf, "hi", "options.reserve_fraction", 0);
      } else {
        throw ScenarioParseError("options.reserve_fraction", "expected a number or {lo, hi}");
      }
    }
  }

  const auto& periods = section(root, "periods", json::value_t::array);
  for (std::size_t t = 0; t < periods.size(); ++t) {
    const std::string w = "periods[" + std::to_string(t) + "]";
    const auto& p = periods[t];
    if (!p.is_object())
      throw ScenarioParseError(w, "expected a section");
    PeriodExogenous e;
    e.demand = number(p, "demand", w);
    e.dg_max = number_or(p, "dg_max", w, 0);
    e.dr_max = number_or(p, "dr_max", w, 0);
    e.reserve_lo = number_or(p, "reserve_lo", w, reserve_lo_frac * e.demand);
    e.reserve_hi = number_or(p, "reserve_hi", w, reserve_hi_frac * e.demand);
    s.periods.push_back(e);
  }

  const auto& init = section(root, "initial", json::value_t::object);
  if (!init.contains("dispatch"))
    throw ScenarioParseError("initial.dispatch", "missing required field");
  const auto& d = init.at("dispatch");
  if (d.is_array()) {
    const auto v = number_list(d, "initial.dispatch");
    if (static_cast<int>(v.size()) != n_units && static_cast<int>(v.size()) != n_units + 2)
      throw ScenarioParseError("initial.dispatch", "dimension mismatch: expected " + std::to_string(n_units) +
                                                       " or " + std::to_string(n_units + 2) + " entries, got " +
                                                       std::to_string(v.size()));
    s.initial_dispatch = Dispatch(n_units);
    for (std::size_t i = 0; i < v.size(); ++i)
      s.initial_dispatch.values(static_cast<Eigen::Index>(i)) = v[i];
  } else if (d.is_object()) {
    if (!d.contains("thermal"))
      throw ScenarioParseError("initial.dispatch.thermal", "missing required field");
    const auto thermal = number_list(d.at("thermal"), "initial.dispatch.thermal");
    if (static_cast<int>(thermal.size()) != n_units)
      throw ScenarioParseError("initial.dispatch.thermal", "dimension mismatch: expected " +
                                                               std::to_string(n_units) + " entries, got " +
                                                               std::to_string(thermal.size()));
    s.initial_dispatch =
        Dispatch(thermal, number_or(d, "dg", "initial.dispatch", 0), number_or(d, "dr", "initial.dispatch", 0));
  } else {
    throw ScenarioParseError("initial.dispatch", "expected a list or a section");
  }

  if (!init.contains("commitment"))
    throw ScenarioParseError("initial.commitment", "missing required field");
  const auto bits = number_list(init.at("commitment"), "initial.commitment");
  if (static_cast<int>(bits.size()) != n_units)
    throw ScenarioParseError("initial.commitment", "dimension mismatch: expected " + std::to_string(n_units) +
                                                       " entries, got " + std::to_string(bits.size()));
  std::vector<int> ib;
  for (double b : bits) {
    if (b != 0 && b != 1)
      throw ScenarioParseError("initial.commitment", "entries must be 0 or 1");
    ib.push_back(static_cast<int>(b));
  }
  if (n_units > Commitment::max_units)
    throw ScenarioParseError("units", "at most " + std::to_string(Commitment::max_units) + " units supported");
  s.initial_commitment = Commitment::from_bits(ib);

  if (const auto violations = validate_scenario(s); !violations.empty()) {
    const auto colon = violations.front().find(':');
    throw ScenarioParseError(violations.front().substr(0, colon), violations.front().substr(colon + 2));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["format"] = kFormat;
  root["version"] = kVersion;
  json units = json::array();
  for (const auto& u : s.units) {
    json j;
    j["a"] = u.a;
    j["b"] = u.b;
    j["c"] = u.c;
    j["p_min"] = u.p_min;
    j["p_max"] = u.p_max;
    if (u.ramp_down)
      j["ramp_down"] = *u.ramp_down;
    if (u.ramp_up)
      j["ramp_up"] = *u.ramp_up;
    j["c_bank"] = u.c_bank;
    j["c_fix"] = u.c_fix;
    j["c_shut"] = u.c_shut;
    j["alpha"] = u.alpha;
    j["beta"] = u.beta;
    j["gamma"] = u.gamma;
    j["quota"] = u.quota;
    units.push_back(std::move(j));
  }
  root["units"] = std::move(units);
  root["dg"] = {{"a", s.dg.a}, {"b", s.dg.b}, {"c", s.dg.c}};
  root["dr"] = {{"a", s.dr.a}, {"b", s.dr.b}, {"c", s.dr.c}};
  root["cet"] = {{"price", s.cet.price}};
  json periods = json::array();
  for (const auto& p : s.periods)
    periods.push_back({{"demand", p.demand},
                       {"dg_max", p.dg_max},
                       {"dr_max", p.dr_max},
                       {"reserve_lo", p.reserve_lo},
                       {"reserve_hi", p.reserve_hi}});
  root["periods"] = std::move(periods);
  std::vector<double> thermal(s.initial_dispatch.thermal_block().begin(), s.initial_dispatch.thermal_block().end());
  root["initial"] = {{"dispatch", {{"thermal", thermal}, {"dg", s.initial_dispatch.dg()}, {"dr", s.initial_dispatch.dr()}}},
                     {"commitment", s.initial_commitment.bits()}};
  root["options"] = {{"eta_max", s.eta_max}, {"ramp_enforced", s.ramp_enforced}};
  return root.dump(2) + "\n";
}

std::string scenario_fingerprint(const Scenario& s) {
  const auto doc = serialize_scenario(s);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(doc.data(), doc.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

} // namespace ucd
