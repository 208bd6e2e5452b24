#pragma once

#include "wqed/sweep.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wqed {

enum class OutputFormat { Csv, Ndjson };
OutputFormat format_from_string(const std::string& name);

inline constexpr const char* kCsvHeader = "method,n,m,omega_p,i_in,transmission,status,residual,wall_time_ms";

// Shortest text that parses back to the same double ("nan", "inf" included).
std::string format_double(double x);
double parse_double(const std::string& text);

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_csv(std::istream& in);

// One JSON object per line, including the diagnostics; NaN is written as null.
void write_ndjson(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_ndjson(std::istream& in);

// Writes records to `path`; throws ConfigError naming the path if it cannot be written.
void emit_records(const std::vector<SweepRecord>& records, const std::string& path, OutputFormat format);

// Gnuplot script drawing every (method, I_in) spectrum of a CSV file,
// T against I_in when the sweep has a single omega_p, or one colour map per
// method when there are many intensities.
std::string plot_script(const std::string& title, const std::string& data_file, const std::vector<SweepRecord>& records,
                        const std::string& image_file);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace wqed
