#include "wqed/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wqed {

using json = nlohmann::ordered_json;

Grid Grid::list(std::vector<double> v) {
  Grid g;
  g.values = std::move(v);
  return g;
}

Grid Grid::linspace(double start, double stop, int count) {
  Grid g;
  g.kind = Kind::Linspace;
  g.start = start;
  g.stop = stop;
  g.count = count;
  return g;
}

Grid Grid::logspace(double start, double stop, int count) {
  Grid g = linspace(start, stop, count);
  g.kind = Kind::Logspace;
  return g;
}

std::vector<double> Grid::expand() const {
  if (kind == Kind::List) return values;
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    out[i] = kind == Kind::Linspace ? start + f * (stop - start)
                                    : std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
  }
  if (count > 1) {
    out.front() = start;
    out.back() = stop;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

const std::set<std::string> kModelKeys = {"medium", "n", "omega_q", "omega_r", "g", "u", "jx", "gamma_l", "gamma_r"};

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

Grid parse_grid(const json& v, const std::string& key) {
  if (v.is_number()) return Grid::list({v.get<double>()});
  if (v.is_array()) {
    std::vector<double> values;
    for (const auto& x : v) values.push_back(as_number(x, key));
    return Grid::list(std::move(values));
  }
  if (v.is_object() && v.size() == 1) {
    const auto& [kind, args] = *v.items().begin();
    if ((kind == "linspace" || kind == "logspace") && args.is_array() && args.size() == 3) {
      const double a = as_number(args[0], key);
      const double b = as_number(args[1], key);
      const double n = as_number(args[2], key);
      if (n < 1 || n != std::floor(n)) throw ConfigError(key, "grid point count must be a positive integer");
      if (kind == "logspace" && !(a > 0.0 && b > 0.0)) throw ConfigError(key, "logspace endpoints must be positive");
      return kind == "linspace" ? Grid::linspace(a, b, static_cast<int>(n)) : Grid::logspace(a, b, static_cast<int>(n));
    }
  }
  throw ConfigError(key, "expected a number, an array, {\"linspace\": [a, b, n]} or {\"logspace\": [a, b, n]}");
}

json grid_to_json(const Grid& g) {
  switch (g.kind) {
    case Grid::Kind::List: return json(g.values);
    case Grid::Kind::Linspace: return json{{"linspace", {g.start, g.stop, g.count}}};
    case Grid::Kind::Logspace: return json{{"logspace", {g.start, g.stop, g.count}}};
  }
  return json();
}

SweepConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "sweep config must be a JSON object");
  SweepConfig c;
  bool have_omega = false;
  bool have_intensity = false;
  for (const auto& [key, v] : j.items()) {
    if (kModelKeys.count(key) != 0) {
      if (v.is_string()) {
        c.model[key] = v.get<std::string>();
      } else if (v.is_number()) {
        c.model[key] = v.get<double>();
      } else if (v.is_array()) {
        std::vector<double> xs;
        for (const auto& x : v) xs.push_back(as_number(x, key));
        c.model[key] = std::move(xs);
      } else {
        throw ConfigError(key, "expected a string, number or array");
      }
    } else if (key == "name") {
      if (!v.is_string()) throw ConfigError(key, "expected a string");
      c.name = v.get<std::string>();
    } else if (key == "m") {
      const double m = as_number(v, key);
      if (m < 1 || m != std::floor(m)) throw ConfigError(key, "truncation m must be an integer >= 1");
      c.m = static_cast<int>(m);
    } else if (key == "omega_p_grid") {
      c.omega_p_grid = parse_grid(v, key);
      have_omega = true;
    } else if (key == "i_in_grid") {
      c.i_in_grid = parse_grid(v, key);
      have_intensity = true;
    } else if (key == "methods") {
      if (v.is_string()) {
        c.methods.push_back(v.get<std::string>());
      } else if (v.is_array()) {
        for (const auto& x : v) {
          if (!x.is_string()) throw ConfigError(key, "expected method names");
          c.methods.push_back(x.get<std::string>());
        }
      } else {
        throw ConfigError(key, "expected a method name or an array of them");
      }
    } else if (key == "placement") {
      if (!v.is_string()) throw ConfigError(key, "expected a string");
      c.placement = v.get<std::string>();
    } else if (key == "qca_initial") {
      if (!v.is_string() || (v != "zero" && v != "continuation")) {
        throw ConfigError(key, "expected \"zero\" or \"continuation\"");
      }
      c.qca_initial = v.get<std::string>();
    } else if (key == "threads") {
      const double t = as_number(v, key);
      if (t < 0 || t != std::floor(t)) throw ConfigError(key, "expected a nonnegative integer");
      c.threads = static_cast<int>(t);
    } else {
      throw ConfigError(key, "unknown configuration key");
    }
  }
  if (!have_omega) throw ConfigError("omega_p_grid", "missing required parameter");
  if (!have_intensity) throw ConfigError("i_in_grid", "missing required parameter");
  if (c.methods.empty()) throw ConfigError("methods", "missing required parameter");
  return c;
}

json to_json(const SweepConfig& c) {
  json j = json::object();
  if (!c.name.empty()) j["name"] = c.name;
  for (const char* key : {"medium", "n", "omega_q", "omega_r", "g", "u", "jx", "gamma_l", "gamma_r"}) {
    auto it = c.model.find(key);
    if (it == c.model.end()) continue;
    std::visit([&](const auto& v) { j[key] = v; }, it->second);
  }
  if (c.m) j["m"] = *c.m;
  j["omega_p_grid"] = grid_to_json(c.omega_p_grid);
  j["i_in_grid"] = grid_to_json(c.i_in_grid);
  j["methods"] = c.methods;
  if (c.placement) j["placement"] = *c.placement;
  if (c.qca_initial != "zero") j["qca_initial"] = c.qca_initial;
  if (c.threads) j["threads"] = *c.threads;
  return j;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& json_text) { return from_json(parse_json(json_text)); }

SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(read_text_file(path)); }

std::string dump_sweep_config(const SweepConfig& config) { return to_json(config).dump(2) + "\n"; }

Preset parse_preset(const std::string& json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object() || !j.contains("name") || !j.contains("panels") || !j["panels"].is_array()) {
    throw ConfigError("panels", "preset needs a name and an array of panels");
  }
  Preset p;
  p.name = j["name"].get<std::string>();
  if (j.contains("description")) p.description = j["description"].get<std::string>();
  for (const auto& panel : j["panels"]) {
    p.panels.push_back(from_json(panel));
    if (p.panels.back().name.empty()) throw ConfigError("name", "every preset panel needs a name");
  }
  return p;
}

std::string dump_preset(const Preset& preset) {
  json j = json::object();
  j["name"] = preset.name;
  if (!preset.description.empty()) j["description"] = preset.description;
  j["panels"] = json::array();
  for (const auto& panel : preset.panels) j["panels"].push_back(to_json(panel));
  return j.dump(2) + "\n";
}

}  // namespace wqed
