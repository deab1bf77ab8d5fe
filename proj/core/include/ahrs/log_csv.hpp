#pragma once

// Sensor log and estimate CSV formats.
//
// Sensor log header:
//   t,gx,gy,gz,ax,ay,az,mx,my,mz,gps_speed,truth_roll,truth_pitch,truth_yaw
// Units s, rad/s, m/s^2, gauss, m/s, rad. gps_speed is empty except on GPS delivery rows;
// truth columns are empty when unknown. Numbers are written with 17 significant digits.
//
// Estimate header:
//   t,roll,pitch,yaw,bias_x,bias_y,bias_z,correction_applied,skip_reason,selection

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ahrs/pipeline.hpp"

namespace ahrs {

inline constexpr std::string_view kSensorLogHeader =
    "t,gx,gy,gz,ax,ay,az,mx,my,mz,gps_speed,truth_roll,truth_pitch,truth_yaw";
inline constexpr std::string_view kEstimateHeader =
    "t,roll,pitch,yaw,bias_x,bias_y,bias_z,correction_applied,skip_reason,selection";

/// Malformed sensor log. `line` is 1-based (0 when the problem is not tied to a line).
class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(std::size_t line, const std::string& message)
      : std::runtime_error(message), line_{line} {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LogRecord {
  SensorFrame frame;
  std::optional<EulerAngles> truth;
  std::size_t line = 0;
};

struct SensorLog {
  std::vector<LogRecord> records;
  std::vector<std::string> warnings;  // e.g. rejected non-monotonic rows
};

/// Shortest text that keeps 17 significant digits of `value`.
std::string format_number(double value);

/// Parses a sensor log. Rows whose timestamp does not increase are dropped with a warning
/// naming the line; `gps_age` is recomputed from the delivery rows. Throws LogFormatError
/// for an empty input, a wrong header, or an unparsable row.
SensorLog read_sensor_log(std::istream& in, const std::string& source_name);

void write_sensor_log_header(std::ostream& out);
void write_sensor_log_row(std::ostream& out, const SensorFrame& frame, const std::optional<EulerAngles>& truth);

void write_estimate_header(std::ostream& out);
void write_estimate_row(std::ostream& out, const StepOutput& step);

}  // namespace ahrs
