#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include "support.hpp"
#include "wqed/output.hpp"
#include "wqed/presets.hpp"
#include "wqed/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

using namespace wqed;

namespace {

const char* kConfig = R"({
  "name": "demo",
  "medium": "direct",
  "n": 1,
  "omega_q": 1.0,
  "u": 1.05,
  "gamma_l": 0.02,
  "gamma_r": 0.02,
  "m": 3,
  "omega_p_grid": {"linspace": [0.9, 1.1, 201]},
  "i_in_grid": [1.5e-4],
  "methods": ["THLE", "QCA", "MQCA"]
})";

std::string config_error_key(const std::string& text) {
  try {
    make_plan(parse_sweep_config(text));
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

std::string with(const std::string& key, const std::string& value) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(kConfig);
  j[key] = nlohmann::ordered_json::parse(value);
  return j.dump();
}

bool same_ignoring_time(std::vector<SweepRecord> a, std::vector<SweepRecord> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].wall_time_ms = b[i].wall_time_ms = 0.0;
    if (!same_record(a[i], b[i])) return false;
  }
  return true;
}

SweepRecord random_record(test::Gen& gen) {
  SweepRecord r;
  r.method = static_cast<Method>(gen.integer(0, 3));
  r.n = gen.integer(1, 300);
  if (gen.integer(0, 1)) r.m = gen.integer(1, 8);
  r.omega_p = gen.real(0.5, 1.5);
  r.i_in = std::pow(10.0, gen.real(-9.0, 1.0));
  r.transmission = gen.integer(0, 4) ? gen.real(0.0, 1.0) : std::numeric_limits<double>::quiet_NaN();
  r.status = static_cast<SolverStatus>(gen.integer(0, 2));
  r.residual = std::pow(10.0, gen.real(-17.0, -3.0));
  r.wall_time_ms = gen.real(0.0, 1e4);
  return r;
}

}  // namespace

TEST_CASE("config parsing and grid forms") {
  const SweepConfig c = parse_sweep_config(kConfig);
  CHECK(c.name == "demo");
  CHECK(c.m == 3);
  CHECK(c.omega_p_grid.kind == Grid::Kind::Linspace);
  const auto w = c.omega_p_grid.expand();
  CHECK(w.size() == 201);
  CHECK(w.front() == 0.9);
  CHECK(w.back() == 1.1);
  CHECK(c.i_in_grid.expand() == std::vector<double>{1.5e-4});

  const auto log = Grid::logspace(1e-6, 1.0, 7).expand();
  CHECK(log.front() == 1e-6);
  CHECK(log.back() == 1.0);
  CHECK(log[3] == doctest::Approx(1e-3));
  CHECK(parse_sweep_config(with("i_in_grid", "0.01")).i_in_grid.expand() == std::vector<double>{0.01});
}

TEST_CASE("config errors name the key") {
  CHECK(config_error_key(with("colour", "1")) == "colour");
  CHECK(config_error_key(with("omega_p_grid", "[1.0, 0.9]")) == "omega_p_grid");
  CHECK(config_error_key(with("omega_p_grid", "[]")) == "omega_p_grid");
  CHECK(config_error_key(with("i_in_grid", "[-1]")) == "i_in_grid");
  CHECK(config_error_key(with("i_in_grid", R"({"logspace": [0, 1, 3]})")) == "i_in_grid");
  CHECK(config_error_key(with("methods", R"(["THLE", "THLE"])")) == "methods");
  CHECK(config_error_key(with("methods", R"(["FOO"])")) == "methods");
  CHECK(config_error_key(with("m", "0")) == "m");
  CHECK(config_error_key(with("n", "0")) == "n");
  CHECK(config_error_key(with("g", "0.02")) == "g");
  CHECK(config_error_key(with("qca_initial", R"("warm")")) == "qca_initial");

  nlohmann::ordered_json j = nlohmann::ordered_json::parse(kConfig);
  j.erase("omega_p_grid");
  CHECK(config_error_key(j.dump()) == "omega_p_grid");

  j = nlohmann::ordered_json::parse(kConfig);
  j["medium"] = "side";
  j["omega_r"] = 1.0;
  j["g"] = 0.02;
  j["methods"] = {"MF"};
  CHECK(config_error_key(j.dump()) == "methods");

  CHECK_THROWS_AS(parse_sweep_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_sweep_config("/nonexistent/sweep.json"), ConfigError);
}

TEST_CASE("property: config round-trips through dump and parse") {
  test::Gen gen(71);
  for (int trial = 0; trial < 25; ++trial) {
    SweepConfig c;
    c.name = "cfg" + std::to_string(trial);
    const int n = gen.integer(1, 4);
    const LatticeModel m = gen.model(trial % 2 ? Medium::SideCoupled : Medium::Direct, n);
    c.model = to_config(m);
    if (gen.integer(0, 1)) c.m = gen.integer(1, 4);
    c.omega_p_grid = gen.integer(0, 1) ? Grid::linspace(gen.real(0.8, 0.95), gen.real(1.05, 1.2), gen.integer(2, 50))
                                       : Grid::list({0.9, gen.real(0.95, 1.05), 1.1});
    c.i_in_grid = Grid::logspace(std::pow(10.0, gen.real(-8, -5)), std::pow(10.0, gen.real(-2, 0)), gen.integer(2, 9));
    c.methods = {"QCA"};
    if (gen.integer(0, 1)) c.placement = gen.integer(0, 1) ? "homogeneous" : "ends_only";
    if (gen.integer(0, 1)) c.qca_initial = "continuation";
    if (gen.integer(0, 1)) c.threads = gen.integer(1, 8);
    CHECK(parse_sweep_config(dump_sweep_config(c)) == c);
  }
}

TEST_CASE("bundled presets") {
  CHECK(preset_names().size() == 6);
  for (const auto& name : preset_names()) {
    const Preset p = load_preset(name);
    CHECK(p.name == name);
    REQUIRE_FALSE(p.panels.empty());
    for (const auto& panel : p.panels) {
      CAPTURE(panel.name);
      const SweepPlan plan = make_plan(panel);
      CHECK(plan.m >= 2);
      CHECK(parse_preset(dump_preset(p)).panels.size() == p.panels.size());
    }
  }
  const Preset fig1 = load_preset("fig1");
  const SweepPlan spectra = make_plan(fig1.panels.front());
  CHECK(spectra.methods == std::vector<Method>{Method::THLE, Method::QCA, Method::MQCA});
  CHECK(spectra.omega_p.front() == 0.9);
  CHECK(spectra.omega_p.back() == 1.1);
  CHECK(spectra.omega_p.size() == 401);

  const Preset fig6 = load_preset("fig6");
  const LatticeModel inhom = make_plan(fig6.panels[1]).model;
  CHECK(inhom.n_sites == 4);
  CHECK(inhom.qr_coupling[1] == 0.007);
  CHECK(inhom.qubit_freq[3] == 1.08);
  CHECK_THROWS_AS(load_preset("fig9"), ConfigError);
}

TEST_CASE("sweep cardinality, order and determinism") {
  SweepPlan plan = make_plan(parse_sweep_config(kConfig));
  plan.threads = 1;
  const auto a = run_sweep(plan);
  CHECK(a.size() == 603);
  CHECK(a.size() == plan.record_count());
  CHECK(a[0].method == Method::THLE);
  CHECK(a[201].method == Method::QCA);
  CHECK(a[1].omega_p > a[0].omega_p);
  CHECK(a[0].m == 3);
  CHECK_FALSE(a[201].m.has_value());
  for (const auto& r : a) {
    CHECK(r.transmission >= 0.0);
    CHECK(r.status == SolverStatus::Converged);
  }

  plan.threads = 3;
  CHECK(same_ignoring_time(a, run_sweep(plan)));

  std::ostringstream x, y;
  write_csv(x, a);
  write_csv(y, run_sweep(plan));
  auto strip = [](std::string s) {
    std::string out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  CHECK(strip(x.str()) == strip(y.str()));
}

TEST_CASE("continuation sweeps stay ordered and deterministic") {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(kConfig);
  j["methods"] = {"QCA", "MF"};
  j["qca_initial"] = "continuation";
  j["i_in_grid"] = {1e-4, 0.01};
  SweepPlan plan = make_plan(parse_sweep_config(j.dump()));
  const auto a = run_sweep(plan);
  CHECK(a.size() == 804);
  CHECK(a[201].i_in == 0.01);
  CHECK(a[402].method == Method::MF);
  CHECK(same_ignoring_time(a, run_sweep(plan)));
}

TEST_CASE("a failing point only affects its own record") {
  SweepPlan plan = make_plan(parse_sweep_config(kConfig));
  plan.model = test::side(1, 0.0);
  plan.methods = {Method::THLE, Method::QCA};
  plan.omega_p = {0.98, 1.0};
  const auto r = run_sweep(plan);
  REQUIRE(r.size() == 4);
  CHECK(r[0].status == SolverStatus::Diverged);
  CHECK(std::isnan(r[0].transmission));
  CHECK_FALSE(r[0].diagnostics.message.empty());
  CHECK(std::isfinite(r[2].transmission));
}

TEST_CASE("CSV and NDJSON") {
  test::Gen gen(73);
  std::vector<SweepRecord> recs;
  for (int i = 0; i < 3; ++i) recs.push_back(random_record(gen));
  std::ostringstream os;
  write_csv(os, recs);
  const std::string csv = os.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.substr(0, csv.find('\n')) == kCsvHeader);

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SweepRecord> many;
    for (int i = 0; i < 15; ++i) many.push_back(random_record(gen));
    std::stringstream c, n;
    write_csv(c, many);
    const auto back = read_csv(c);
    REQUIRE(back.size() == many.size());
    for (std::size_t i = 0; i < many.size(); ++i) CHECK(same_record(back[i], many[i], false));

    many[0].diagnostics.u_eff_re = gen.real(-1, 1);
    many[0].diagnostics.message = "singular, \"quoted\"";
    many[1].diagnostics.iterations = 1234567;
    write_ndjson(n, many);
    const auto nd = read_ndjson(n);
    REQUIRE(nd.size() == many.size());
    for (std::size_t i = 0; i < many.size(); ++i) CHECK(same_record(nd[i], many[i], true));
  }
  std::istringstream bad("method,n\nTHLE,1\n");
  CHECK_THROWS_AS(read_csv(bad), ConfigError);
}

TEST_CASE("property: number formatting round-trips") {
  test::Gen gen(79);
  for (int i = 0; i < 2000; ++i) {
    double x;
    const auto bits = (static_cast<std::uint64_t>(gen.engine()()) << 32) | gen.engine()();
    std::memcpy(&x, &bits, sizeof x);
    if (!std::isfinite(x)) continue;
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
}

TEST_CASE("unwritable output path is reported") {
  SweepRecord r;
  try {
    emit_records({r}, "/nonexistent-dir/out.csv", OutputFormat::Csv);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
  }
  CHECK_THROWS_AS(emit_records({}, "/tmp/x.csv", OutputFormat::Csv), ConfigError);
}

TEST_CASE("plot scripts reference the data file") {
  SweepPlan plan = make_plan(parse_sweep_config(kConfig));
  plan.omega_p = {1.0};
  plan.i_in = {1e-6, 1e-4, 1e-2};
  const auto recs = run_sweep(plan);
  const std::string ramp = plot_script("ramp", "ramp.csv", recs, "ramp.png");
  CHECK(ramp.find("'ramp.csv'") != std::string::npos);
  CHECK(ramp.find("logscale x") != std::string::npos);
}
