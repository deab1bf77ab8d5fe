#include "ahrs/triad.hpp"

#include <cmath>
#include <stdexcept>

namespace ahrs {

namespace {

Mat3 triad_frame(const Vec3& first, const Vec3& second, double cross_norm) {
  const Vec3 cross = first.cross(second);
  Mat3 m;
  m.col(0) = first;
  m.col(1) = cross / cross_norm;
  m.col(2) = first.cross(cross) / cross_norm;
  return m;
}

}  // namespace

std::string_view to_string(PairSelection selection) {
  switch (selection) {
    case PairSelection::AccelPrimary: return "accel_primary";
    case PairSelection::MagPrimary: return "mag_primary";
    case PairSelection::SkipMagUnreliable: return "mag_unreliable";
    case PairSelection::SkipAcrobatic: return "acrobatic";
  }
  return "unknown";
}

std::optional<Dcm> triad_dcm(const TriadPair& first, const TriadPair& second) {
  const double obs_cross = first.observation.cross(second.observation).norm();
  const double ref_cross = first.reference.cross(second.reference).norm();
  if (!(obs_cross > kParallelEpsilon) || !(ref_cross > kParallelEpsilon)) return std::nullopt;

  const Mat3 mo = triad_frame(first.observation, second.observation, obs_cross);
  const Mat3 mr = triad_frame(first.reference, second.reference, ref_cross);
  return Dcm{mo * mr.transpose()};
}

Vec3 subtract_centrifugal(const Vec3& accel, const Vec3& omega, double speed) {
  return accel - omega.cross(Vec3{speed, 0.0, 0.0});
}

PairSelection select_pairs(const Vec3& accel, const Vec3& mag, const MagneticReference& mag_ref,
                           double gravity) {
  const double a = accel.norm();
  const double m = mag.norm();
  const double m_ref = mag_ref.field_ned.norm();

  if (a >= 0.9 * gravity && a <= 1.1 * gravity) return PairSelection::AccelPrimary;
  if ((a > 0.7 * gravity && a < 0.9 * gravity) || (a > 1.1 * gravity && a < 1.3 * gravity)) {
    return PairSelection::MagPrimary;
  }
  if (m > 1.2 * m_ref || m < 0.8 * m_ref) return PairSelection::SkipMagUnreliable;
  // Everything left has |a| >= 1.3 g or |a| <= 0.7 g. The boundary values themselves are not
  // covered by any printed inequality; they are treated as acrobatic.
  return PairSelection::SkipAcrobatic;
}

std::optional<std::pair<TriadPair, TriadPair>> build_pairs(PairSelection selection, const Vec3& accel,
                                                          const Vec3& mag,
                                                          const MagneticReference& mag_ref) {
  const double a = accel.norm();
  const double m = mag.norm();
  const double m_ref = mag_ref.field_ned.norm();
  if (a == 0.0 || m == 0.0 || m_ref == 0.0) return std::nullopt;

  const TriadPair gravity_pair{-accel / a, Vec3{0.0, 0.0, 1.0}};
  const TriadPair mag_pair{mag / m, mag_ref.field_ned / m_ref};
  switch (selection) {
    case PairSelection::AccelPrimary: return std::pair{gravity_pair, mag_pair};
    case PairSelection::MagPrimary: return std::pair{mag_pair, gravity_pair};
    default: return std::nullopt;
  }
}

ObservationVector observe(const Dcm& dcm) { return {dcm(0, 2), dcm(1, 2), dcm(0, 0), dcm(0, 1)}; }

LowPassState lowpass_accel(const Vec3& raw, LowPassState state, double cutoff_hz,
                           double sample_rate_hz) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument("low-pass cutoff must lie in (0, sample_rate/2)");
  }
  const double dt = 1.0 / sample_rate_hz;
  const double rc = 1.0 / (2.0 * kPi * cutoff_hz);
  const double gain = dt / (rc + dt);
  state.output += gain * (raw - state.output);
  return state;
}

}  // namespace ahrs
