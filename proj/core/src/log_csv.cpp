#include "ahrs/log_csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace ahrs {

namespace {

constexpr std::size_t kSensorColumns = 14;

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_cell(std::string_view cell, std::size_t line, std::string_view column) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || end != cell.data() + cell.size() || !std::isfinite(value)) {
    throw LogFormatError(line, "line " + std::to_string(line) + ": column '" + std::string(column) +
                                   "' is not a finite number: '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, end);
}

SensorLog read_sensor_log(std::istream& in, const std::string& source_name) {
  static const std::vector<std::string_view> columns = split_csv(kSensorLogHeader);
  SensorLog log;
  std::string line;
  std::size_t line_no = 0;

  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (trim(line) != kSensorLogHeader) {
      throw LogFormatError(line_no, source_name + ": line " + std::to_string(line_no) +
                                        ": expected header '" + std::string(kSensorLogHeader) + "'");
    }
    have_header = true;
  }
  if (!have_header) throw LogFormatError(0, source_name + ": log is empty");

  std::optional<double> last_t;
  std::optional<double> last_gps_t;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != kSensorColumns) {
      throw LogFormatError(line_no, source_name + ": line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(kSensorColumns) + " columns, found " +
                                        std::to_string(cells.size()));
    }
    std::array<std::optional<double>, kSensorColumns> v;
    for (std::size_t i = 0; i < kSensorColumns; ++i) v[i] = parse_cell(cells[i], line_no, columns[i]);
    for (std::size_t i = 0; i < 10; ++i) {
      if (!v[i]) {
        throw LogFormatError(line_no, source_name + ": line " + std::to_string(line_no) + ": column '" +
                                          std::string(columns[i]) + "' is required");
      }
    }
    const bool any_truth = v[11] || v[12] || v[13];
    const bool all_truth = v[11] && v[12] && v[13];
    if (any_truth && !all_truth) {
      throw LogFormatError(line_no, source_name + ": line " + std::to_string(line_no) +
                                        ": truth columns must be all present or all empty");
    }

    LogRecord rec;
    rec.line = line_no;
    rec.frame.t = *v[0];
    if (last_t && !(rec.frame.t > *last_t)) {
      log.warnings.push_back(source_name + ": line " + std::to_string(line_no) + ": timestamp " +
                             format_number(rec.frame.t) + " does not increase; frame rejected");
      continue;
    }
    last_t = rec.frame.t;
    rec.frame.gyro = {*v[1], *v[2], *v[3]};
    rec.frame.accel = {*v[4], *v[5], *v[6]};
    rec.frame.mag = {*v[7], *v[8], *v[9]};
    rec.frame.gps_speed = v[10];
    if (rec.frame.gps_speed) last_gps_t = rec.frame.t;
    rec.frame.gps_age = last_gps_t ? rec.frame.t - *last_gps_t : std::numeric_limits<double>::infinity();
    if (all_truth) rec.truth = EulerAngles{*v[11], *v[12], *v[13]};
    log.records.push_back(rec);
  }
  if (log.records.empty()) throw LogFormatError(line_no, source_name + ": log has no data rows");
  return log;
}

void write_sensor_log_header(std::ostream& out) { out << kSensorLogHeader << '\n'; }

void write_sensor_log_row(std::ostream& out, const SensorFrame& f, const std::optional<EulerAngles>& truth) {
  out << format_number(f.t);
  for (const Vec3* v : {&f.gyro, &f.accel, &f.mag}) {
    for (int i = 0; i < 3; ++i) out << ',' << format_number((*v)[i]);
  }
  out << ',';
  if (f.gps_speed) out << format_number(*f.gps_speed);
  if (truth) {
    out << ',' << format_number(truth->roll) << ',' << format_number(truth->pitch) << ','
        << format_number(truth->yaw);
  } else {
    out << ",,,";
  }
  out << '\n';
}

void write_estimate_header(std::ostream& out) { out << kEstimateHeader << '\n'; }

void write_estimate_row(std::ostream& out, const StepOutput& step) {
  const EulerAngles e = quaternion_to_euler(step.state.attitude());
  const Vec3 b = step.state.gyro_bias();
  out << format_number(step.t) << ',' << format_number(e.roll) << ',' << format_number(e.pitch) << ','
      << format_number(e.yaw) << ',' << format_number(b.x()) << ',' << format_number(b.y()) << ','
      << format_number(b.z()) << ',' << (step.correction_applied ? 1 : 0) << ','
      << to_string(step.action.reason) << ',';
  if (step.action.selection) out << to_string(*step.action.selection);
  out << '\n';
}

}  // namespace ahrs
