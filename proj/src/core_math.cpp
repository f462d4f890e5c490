#include "spinsim/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinsim/random_stream.hpp"

namespace spinsim {

namespace {

double clamp_to_domain(double x, double bound, const char* what) {
  if (!std::isfinite(x) || x < -bound - kDomainEps || x > bound + kDomainEps) {
    throw ContractViolation(std::string(what) + ": argument " + std::to_string(x) +
                            " outside its domain");
  }
  if (x > bound) return bound;
  if (x < -bound) return -bound;
  return x;
}

}  // namespace

UnitVector::UnitVector(double x, double y, double z) : x_(x), y_(y), z_(z) {
  const double n2 = x * x + y * y + z * z;
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kUnitNormEps) {
    throw ContractViolation("UnitVector: components are not of unit length");
  }
}

UnitVector UnitVector::normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(n) || n == 0.0) {
    throw ContractViolation("UnitVector: cannot normalize a zero or non-finite vector");
  }
  return UnitVector(x / n, y / n, z / n, Unchecked{});
}

UnitVector UnitVector::in_xz_plane(double polar_angle) {
  return UnitVector(std::sin(polar_angle), 0.0, std::cos(polar_angle), Unchecked{});
}

UnitVector UnitVector::operator-() const { return UnitVector(-x_, -y_, -z_, Unchecked{}); }

Ternary theta1(double x) {
  x = clamp_to_domain(x, 1.0, "theta1");
  if (x >= 1.0 / 3.0) return Ternary(1);
  if (x <= -1.0 / 3.0) return Ternary(-1);
  return Ternary(0);
}

Ternary theta2(double x) {
  x = clamp_to_domain(x, 2.0, "theta2");
  if (x >= 2.0 / 3.0) return Ternary(1);
  if (x <= -2.0 / 3.0) return Ternary(-1);
  return Ternary(0);
}

SignBit sgn(double x) {
  if (!std::isfinite(x)) throw ContractViolation("sgn: non-finite argument");
  return SignBit(x >= 0.0 ? 1 : -1);
}

double dot(const UnitVector& u, const UnitVector& v) {
  return u.x() * v.x() + u.y() * v.y() + u.z() * v.z();
}

UnitVector sample_unit_vector(RandomStream& rng) {
  const double z = 2.0 * rng.uniform01() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform01();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return UnitVector(r * std::cos(phi), r * std::sin(phi), z);
}

Rotation::Rotation() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

Rotation::Rotation(const Matrix& m) : m_(m) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m[k][i] * m[k][j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > kUnitNormEps) {
        throw ContractViolation("Rotation: matrix is not orthogonal");
      }
    }
  }
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (det < 0.0) throw ContractViolation("Rotation: improper rotation (det = -1)");
}

Rotation Rotation::about_axis(const UnitVector& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  const double x = axis.x(), y = axis.y(), z = axis.z();
  return Rotation(Matrix{{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
                          {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
                          {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}},
                  Unchecked{});
}

Rotation Rotation::random(RandomStream& rng) {
  // Shoemake's uniform unit quaternion.
  const double u1 = rng.uniform01(), u2 = rng.uniform01(), u3 = rng.uniform01();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double tau = 2.0 * std::numbers::pi;
  const double w = a * std::sin(tau * u2), x = a * std::cos(tau * u2);
  const double y = b * std::sin(tau * u3), z = b * std::cos(tau * u3);
  return Rotation(Matrix{{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
                          {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
                          {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}},
                  Unchecked{});
}

UnitVector Rotation::apply(const UnitVector& u) const {
  const double x = m_[0][0] * u.x() + m_[0][1] * u.y() + m_[0][2] * u.z();
  const double y = m_[1][0] * u.x() + m_[1][1] * u.y() + m_[1][2] * u.z();
  const double z = m_[2][0] * u.x() + m_[2][1] * u.y() + m_[2][2] * u.z();
  // Rounding can push the norm a few ulps away from one; renormalize quietly.
  const double n = std::sqrt(x * x + y * y + z * z);
  return UnitVector(x / n, y / n, z / n, UnitVector::Unchecked{});
}

UnitVector rotate(const UnitVector& u, const Rotation& r) { return r.apply(u); }

}  // namespace spinsim
