#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "ahrs/attitude_math.hpp"

namespace ahrs {

/// Observation (body frame) and matching reference (NED) unit vectors.
struct TriadPair {
  Vec3 observation;
  Vec3 reference;
};

/// Earth magnetic field in NED, gauss.
struct MagneticReference {
  Vec3 field_ned;
};

/// Source of the magnetic reference vector. The default is a per-flight constant;
/// a geomagnetic model keyed on time/position can be dropped in behind this interface.
class MagneticFieldSource {
 public:
  virtual ~MagneticFieldSource() = default;
  virtual MagneticReference reference_at(double t) const = 0;
};

class ConstantMagneticField final : public MagneticFieldSource {
 public:
  explicit ConstantMagneticField(const Vec3& field_ned) : field_{field_ned} {}
  MagneticReference reference_at(double) const override { return field_; }

 private:
  MagneticReference field_;
};

/// The four DCM terms used as the filter observation, in the order (c13, c23, c11, c12).
struct ObservationVector {
  double c13 = 0.0;
  double c23 = 0.0;
  double c11 = 0.0;
  double c12 = 0.0;

  Vec4 vector() const { return {c13, c23, c11, c12}; }
  static ObservationVector from_vector(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

enum class PairSelection { AccelPrimary, MagPrimary, SkipMagUnreliable, SkipAcrobatic };

std::string_view to_string(PairSelection selection);
inline bool is_skip(PairSelection s) {
  return s == PairSelection::SkipMagUnreliable || s == PairSelection::SkipAcrobatic;
}

inline constexpr double kParallelEpsilon = 1e-6;

/// A = Mo * Mr^T from the two pairs. The first pair is reproduced exactly (A * V1 = W1).
/// Returns nullopt when either W1 x W2 or V1 x V2 is shorter than kParallelEpsilon.
std::optional<Dcm> triad_dcm(const TriadPair& first, const TriadPair& second);

/// Removes the centripetal term w x (U, 0, 0) from a body specific-force measurement.
/// Lateral and vertical body velocity components are taken as zero.
Vec3 subtract_centrifugal(const Vec3& accel, const Vec3& omega, double speed);

/// Reliability criteria, evaluated in priority order. `accel` is the low-pass filtered
/// specific force (its magnitude is the load factor times g); `gravity` its nominal
/// magnitude (m/s^2).
PairSelection select_pairs(const Vec3& accel, const Vec3& mag, const MagneticReference& mag_ref,
                           double gravity);

/// Builds the ordered TRIAD pairs for a non-skip selection. The gravity observation is
/// -accel normalized (the accelerometer reads -g when level) against reference (0, 0, 1).
std::optional<std::pair<TriadPair, TriadPair>> build_pairs(PairSelection selection, const Vec3& accel,
                                                          const Vec3& mag,
                                                          const MagneticReference& mag_ref);

ObservationVector observe(const Dcm& dcm);

/// Memory of the first-order accelerometer low-pass. `output` is the latest filtered value.
struct LowPassState {
  Vec3 output = Vec3::Zero();
};

/// y_k = y_{k-1} + a (x_k - y_{k-1}), a = dt / (RC + dt), RC = 1 / (2 pi cutoff).
/// Requires 0 < cutoff_hz < sample_rate_hz / 2; throws std::invalid_argument otherwise.
LowPassState lowpass_accel(const Vec3& raw, LowPassState state, double cutoff_hz,
                           double sample_rate_hz);

}  // namespace ahrs
