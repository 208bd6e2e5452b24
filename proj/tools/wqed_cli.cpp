// wqed: transmission sweeps, figure presets, validation suites and equation dumps.

#include "wqed/output.hpp"
#include "wqed/presets.hpp"
#include "wqed/sweep.hpp"
#include "wqed/thle.hpp"
#include "wqed/validate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace {

enum Exit { kOk = 0, kConfig = 1, kValidation = 2, kNumerical = 3 };

bool failed(const wqed::SweepRecord& r) { return !std::isfinite(r.transmission); }

int report_failures(const std::vector<wqed::SweepRecord>& records, const std::string& label) {
  const auto bad = std::count_if(records.begin(), records.end(), failed);
  if (bad == 0) return kOk;
  std::cerr << label << ": " << bad << " of " << records.size() << " points failed\n";
  for (const auto& r : records) {
    if (failed(r) && !r.diagnostics.message.empty()) {
      std::cerr << "  first failure (" << wqed::to_string(r.method) << ", omega_p=" << wqed::format_double(r.omega_p)
                << ", i_in=" << wqed::format_double(r.i_in) << "): " << r.diagnostics.message << '\n';
      break;
    }
  }
  return kNumerical;
}

void write_plot(const std::string& title, const std::string& data_path, const std::vector<wqed::SweepRecord>& records) {
  namespace fs = std::filesystem;
  const fs::path data(data_path);
  fs::path script = data;
  script.replace_extension(".gp");
  fs::path image = data;
  image.replace_extension(".png");
  wqed::write_text_file(script.string(),
                        wqed::plot_script(title, data.filename().string(), records, image.filename().string()));
}

int cmd_sweep(const std::string& config_path, const std::string& output, const std::string& format, bool plot,
              int threads) {
  const wqed::SweepConfig config = wqed::load_sweep_config(config_path);
  wqed::SweepPlan plan = wqed::make_plan(config);
  if (threads > 0) plan.threads = threads;
  plan.validate();
  const wqed::OutputFormat fmt = wqed::format_from_string(format);
  if (plot && (output.empty() || fmt != wqed::OutputFormat::Csv)) {
    throw wqed::ConfigError("plot", "--plot needs a CSV output file (-o)");
  }

  const auto records = wqed::run_sweep(plan);
  if (output.empty()) {
    if (fmt == wqed::OutputFormat::Csv) {
      wqed::write_csv(std::cout, records);
    } else {
      wqed::write_ndjson(std::cout, records);
    }
  } else {
    wqed::emit_records(records, output, fmt);
    if (plot) write_plot(config.name.empty() ? config_path : config.name, output, records);
  }
  return report_failures(records, config.name.empty() ? config_path : config.name);
}

int cmd_reproduce(const std::string& figure, const std::string& directory, int points, int m_cap, bool plot,
                  int threads) {
  namespace fs = std::filesystem;
  const wqed::Preset preset = wqed::load_preset(figure);
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw wqed::ConfigError("output", "cannot create directory '" + directory + "'");

  // Validate every panel before running any of them.
  std::vector<wqed::SweepPlan> plans;
  for (wqed::SweepConfig panel : preset.panels) {
    if (points > 0 && panel.omega_p_grid.kind == wqed::Grid::Kind::Linspace) panel.omega_p_grid.count = points;
    if (m_cap > 0 && panel.m) panel.m = std::min(*panel.m, m_cap);
    wqed::SweepPlan plan = wqed::make_plan(panel);
    if (threads > 0) plan.threads = threads;
    plan.validate();
    plans.push_back(std::move(plan));
  }

  int status = kOk;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const std::string& name = preset.panels[i].name;
    const std::string path = (fs::path(directory) / (preset.name + "_" + name + ".csv")).string();
    std::cerr << preset.name << '/' << name << ": " << plans[i].record_count() << " points\n";
    const auto records = wqed::run_sweep(plans[i]);
    wqed::emit_records(records, path, wqed::OutputFormat::Csv);
    if (plot) write_plot(preset.name + " " + name, path, records);
    std::cout << path << '\n';
    status = std::max(status, report_failures(records, preset.name + "/" + name));
  }
  return status;
}

int cmd_validate(const std::string& suite) {
  const auto results = wqed::run_validation(suite);
  std::cout << wqed::format_report(results);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? kOk : kValidation;
}

int cmd_print_equations(const std::string& config_path, bool matrix) {
  const wqed::SweepConfig config = wqed::load_sweep_config(config_path);
  const wqed::SweepPlan plan = wqed::make_plan(config);
  if (plan.m < 1) throw wqed::ConfigError("m", "print-equations needs a truncation m >= 1");
  const double omega_p = plan.omega_p.front();
  const double i_in = plan.i_in.front();
  const wqed::DriveSpec drive = wqed::drive_from_intensity(plan.model, omega_p, i_in);
  std::cout << "# omega_p=" << wqed::format_double(omega_p) << " i_in=" << wqed::format_double(i_in)
            << " m=" << plan.m << '\n';
  if (matrix) {
    std::cout << wqed::format_matrix(wqed::assemble_linear_system(plan.model, drive, plan.m, plan.assembly));
  } else {
    std::cout << wqed::format_equations(plan.model, drive, plan.m);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon transmission through driven qubit chains coupled to a waveguide"};
  app.require_subcommand(1);

  std::string config_path, output, format = "csv", figure, directory = "results", suite;
  bool plot = false, matrix = false;
  int threads = 0, points = 0, m_cap = 0;

  auto* sweep = app.add_subcommand("sweep", "Run a sweep described by a JSON config");
  sweep->add_option("config", config_path, "Sweep config file")->required();
  sweep->add_option("-o,--output", output, "Output file (stdout when omitted)");
  sweep->add_option("--format", format, "csv or ndjson")->check(CLI::IsMember({"csv", "ndjson"}));
  sweep->add_flag("--plot", plot, "Also write a gnuplot script next to the CSV");
  sweep->add_option("--threads", threads, "Worker threads (default: all cores)");

  auto* reproduce = app.add_subcommand("reproduce", "Run every panel of a figure preset");
  reproduce->add_option("figure", figure, "fig1 ... fig6")->required()->check(CLI::IsMember(wqed::preset_names()));
  reproduce->add_option("-o,--output-dir", directory, "Directory for CSV files");
  reproduce->add_option("--points", points, "Override the omega_p point count of spectrum panels");
  reproduce->add_option("--m-cap", m_cap, "Upper bound on the THLE truncation");
  reproduce->add_flag("--plot", plot, "Also write gnuplot scripts");
  reproduce->add_option("--threads", threads, "Worker threads (default: all cores)");

  auto* validate = app.add_subcommand("validate", "Run a validation suite");
  std::vector<std::string> suites = wqed::validation_suites();
  suites.push_back("all");
  validate->add_option("suite", suite, "algebra-oracle, weak-drive, convergence, cross-method or all")
      ->required()
      ->check(CLI::IsMember(suites));

  auto* print = app.add_subcommand("print-equations", "Dump the THLE equations at the first grid point");
  print->add_option("config", config_path, "Sweep config file")->required();
  print->add_flag("--matrix", matrix, "Print the sparse Z matrix and Omega vector instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sweep) return cmd_sweep(config_path, output, format, plot, threads);
    if (*reproduce) return cmd_reproduce(figure, directory, points, m_cap, plot, threads);
    if (*validate) return cmd_validate(suite);
    if (*print) return cmd_print_equations(config_path, matrix);
  } catch (const wqed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const wqed::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
