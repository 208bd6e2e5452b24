#include "wqed/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wqed {

OutputFormat format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "ndjson") return OutputFormat::Ndjson;
  throw ConfigError("format", "unknown output format '" + name + "' (expected csv or ndjson)");
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && text[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) throw ConfigError("", "cannot parse number '" + text + "'");
  return x;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

int parse_int(const std::string& text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw ConfigError("", "cannot parse integer '" + text + "'");
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << r.n << ',' << (r.m ? std::to_string(*r.m) : std::string()) << ','
        << format_double(r.omega_p) << ',' << format_double(r.i_in) << ',' << format_double(r.transmission) << ','
        << to_string(r.status) << ',' << format_double(r.residual) << ',' << format_double(r.wall_time_ms) << '\n';
  }
}

std::vector<SweepRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("", "CSV header does not match");
  std::vector<SweepRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw ConfigError("", "CSV line " + std::to_string(line_no) + " needs 9 fields");
    SweepRecord r;
    r.method = method_from_string(f[0]);
    r.n = parse_int(f[1]);
    if (!f[2].empty()) r.m = parse_int(f[2]);
    r.omega_p = parse_double(f[3]);
    r.i_in = parse_double(f[4]);
    r.transmission = parse_double(f[5]);
    r.status = status_from_string(f[6]);
    r.residual = parse_double(f[7]);
    r.wall_time_ms = parse_double(f[8]);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

using json = nlohmann::ordered_json;

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

}  // namespace

void write_ndjson(std::ostream& out, const std::vector<SweepRecord>& records) {
  for (const auto& r : records) {
    json j;
    j["method"] = to_string(r.method);
    j["n"] = r.n;
    j["m"] = r.m ? json(*r.m) : json(nullptr);
    j["omega_p"] = number_or_null(r.omega_p);
    j["i_in"] = number_or_null(r.i_in);
    j["transmission"] = number_or_null(r.transmission);
    j["status"] = to_string(r.status);
    j["residual"] = number_or_null(r.residual);
    j["wall_time_ms"] = number_or_null(r.wall_time_ms);
    j["u_eff_re"] = number_or_null(r.diagnostics.u_eff_re);
    j["u_eff_im"] = number_or_null(r.diagnostics.u_eff_im);
    j["period"] = number_or_null(r.diagnostics.period);
    j["iterations"] = r.diagnostics.iterations;
    j["message"] = r.diagnostics.message;
    out << j.dump() << '\n';
  }
}

std::vector<SweepRecord> read_ndjson(std::istream& in) {
  std::vector<SweepRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("malformed NDJSON line: ") + e.what());
    }
    SweepRecord r;
    r.method = method_from_string(j.at("method").get<std::string>());
    r.n = j.at("n").get<int>();
    if (!j.at("m").is_null()) r.m = j["m"].get<int>();
    r.omega_p = number_from(j, "omega_p");
    r.i_in = number_from(j, "i_in");
    r.transmission = number_from(j, "transmission");
    r.status = status_from_string(j.at("status").get<std::string>());
    r.residual = number_from(j, "residual");
    r.wall_time_ms = number_from(j, "wall_time_ms");
    r.diagnostics.u_eff_re = number_from(j, "u_eff_re");
    r.diagnostics.u_eff_im = number_from(j, "u_eff_im");
    r.diagnostics.period = number_from(j, "period");
    r.diagnostics.iterations = j.value("iterations", 0L);
    r.diagnostics.message = j.value("message", std::string());
    records.push_back(std::move(r));
  }
  return records;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw ConfigError("output", "cannot write '" + path + "'");
}

void emit_records(const std::vector<SweepRecord>& records, const std::string& path, OutputFormat format) {
  if (records.empty()) throw ConfigError("output", "no records to write");
  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    write_csv(os, records);
  } else {
    write_ndjson(os, records);
  }
  write_text_file(path, os.str());
}

std::string plot_script(const std::string& title, const std::string& data_file, const std::vector<SweepRecord>& records,
                        const std::string& image_file) {
  std::set<double> omegas;
  std::set<double> intensities;
  std::vector<Method> methods;
  for (const auto& r : records) {
    omegas.insert(r.omega_p);
    intensities.insert(r.i_in);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  const bool ramp = omegas.size() == 1 && intensities.size() > 1;
  const bool map = omegas.size() > 1 && intensities.size() > 6;

  std::ostringstream os;
  os << "set datafile separator ','\n";
  if (map) {
    // One colour map of T over (omega_p, I_in) per method.
    os << "set terminal pngcairo size " << 500 * methods.size() << ",500\n"
       << "set output '" << image_file << "'\n"
       << "set multiplot layout 1," << methods.size() << " title '" << title << "'\n"
       << "set view map\nset logscale y\nset xlabel 'omega_p'\nset ylabel 'I_in'\nset cbrange [0:1]\n";
    for (Method m : methods) {
      os << "set title '" << to_string(m) << "'\n"
         << "splot '" << data_file << "' every ::1 using 4:5:((strcol(1) eq '" << to_string(m)
         << "') ? $6 : NaN) with points pointtype 5 pointsize 0.5 palette notitle\n";
    }
    os << "unset multiplot\n";
    return os.str();
  }
  os << "set terminal pngcairo size 900,600\n"
     << "set output '" << image_file << "'\n"
     << "set title '" << title << "'\n"
     << "set ylabel 'T'\n"
     << "set key outside right\n";
  if (ramp) {
    os << "set logscale x\nset xlabel 'I_in'\n";
  } else {
    os << "set xlabel 'omega_p'\n";
  }
  os << "plot \\\n";
  bool first = true;
  auto entry = [&](Method m, const std::string& filter, const std::string& label, int xcol) {
    if (!first) os << ", \\\n";
    first = false;
    os << "  '" << data_file << "' every ::1 using " << xcol << ":((strcol(1) eq '" << to_string(m) << "'" << filter
       << ") ? $6 : NaN) with linespoints pointsize 0.4 title '" << label << "'";
  };
  for (Method m : methods) {
    if (ramp) {
      entry(m, "", to_string(m), 5);
    } else {
      for (double i_in : intensities) {
        entry(m, " && $5 == " + format_double(i_in), to_string(m) + " I_in=" + format_double(i_in), 4);
      }
    }
  }
  os << '\n';
  return os.str();
}

}  // namespace wqed
