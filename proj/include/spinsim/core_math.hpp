#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace spinsim {

class RandomStream;

/// Thrown when a caller breaks a function's documented precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDomainEps = 1e-9;
inline constexpr double kUnitNormEps = 1e-12;

/// A direction on the 2-sphere. Construction checks |v|^2 = 1 within 1e-12;
/// use normalized() to build from an arbitrary nonzero vector.
class UnitVector {
 public:
  UnitVector() : x_(0.0), y_(0.0), z_(1.0) {}
  UnitVector(double x, double y, double z);

  static UnitVector normalized(double x, double y, double z);

  static UnitVector ex() { return {1.0, 0.0, 0.0}; }
  static UnitVector ey() { return {0.0, 1.0, 0.0}; }
  static UnitVector ez() { return {0.0, 0.0, 1.0}; }

  /// (sin t, 0, cos t): the direction at polar angle t in the x-z plane.
  static UnitVector in_xz_plane(double polar_angle);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  UnitVector operator-() const;
  bool operator==(const UnitVector&) const = default;

 private:
  struct Unchecked {};
  UnitVector(double x, double y, double z, Unchecked) : x_(x), y_(y), z_(z) {}
  friend class Rotation;

  double x_, y_, z_;
};

/// A value in {-1, 0, +1}.
class Ternary {
 public:
  constexpr Ternary() = default;
  constexpr explicit Ternary(int v) : value_(v) {
    if (v < -1 || v > 1) throw ContractViolation("Ternary out of range");
  }
  constexpr int value() const { return value_; }
  constexpr Ternary operator-() const { return Ternary(-value_); }
  constexpr bool operator==(const Ternary&) const = default;

 private:
  int value_ = 0;
};

/// A value in {-1, +1}.
class SignBit {
 public:
  constexpr SignBit() = default;
  constexpr explicit SignBit(int v) : value_(v) {
    if (v != -1 && v != 1) throw ContractViolation("SignBit must be +1 or -1");
  }
  constexpr int value() const { return value_; }
  constexpr SignBit operator-() const { return SignBit(-value_); }
  constexpr SignBit operator*(SignBit o) const { return SignBit(value_ * o.value_); }
  constexpr bool operator==(const SignBit&) const = default;

 private:
  int value_ = 1;
};

/// Three-level threshold on [-1, 1]: +1 on [1/3, 1], 0 on (-1/3, 1/3),
/// -1 on [-1, -1/3]. Inputs within 1e-9 outside the domain are clamped.
Ternary theta1(double x);

/// Three-level threshold on [-2, 2] with cut points +-2/3, closed outward.
Ternary theta2(double x);

/// +1 for x >= 0 (including zero), -1 for x < 0. Rejects NaN and infinities.
SignBit sgn(double x);

double dot(const UnitVector& u, const UnitVector& v);

/// Uniform point on S^2: z uniform in [-1, 1), azimuth uniform in [0, 2pi).
/// Consumes exactly two 64-bit draws from the stream.
UnitVector sample_unit_vector(RandomStream& rng);

/// Proper rotation of R^3.
class Rotation {
 public:
  using Matrix = std::array<std::array<double, 3>, 3>;

  Rotation();
  /// Rejects matrices with |R^T R - I| > 1e-12 (entrywise) or det R != +1.
  explicit Rotation(const Matrix& m);

  static Rotation about_axis(const UnitVector& axis, double angle);
  /// Uniformly (Haar) distributed rotation from a random unit quaternion.
  static Rotation random(RandomStream& rng);

  const Matrix& matrix() const { return m_; }
  UnitVector apply(const UnitVector& u) const;

 private:
  struct Unchecked {};
  Rotation(const Matrix& m, Unchecked) : m_(m) {}
  Matrix m_;
};

UnitVector rotate(const UnitVector& u, const Rotation& r);

}  // namespace spinsim
