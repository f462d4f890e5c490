#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "spinsim/core_math.hpp"

namespace spinsim {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// -(1/3) s (s + 1) cos(theta): the singlet correlation of the spin components
/// along two directions.
double closed_form_correlation(double s, double cos_theta);

/// Spin-s operators (hbar = 1) in the basis |s>, |s-1>, ..., |-s>.
struct SpinMatrices {
  double s = 0.0;
  ComplexMatrix sx, sy, sz;

  Eigen::Index dim() const { return sz.rows(); }
  /// u . S
  ComplexMatrix along(const UnitVector& u) const;
};

/// Rejects negative or non-half-integer s and 2s + 1 > 1000.
SpinMatrices build_spin_matrices(double s);

/// Largest |entry| of S - S^dagger over the three components.
double hermiticity_error(const SpinMatrices& m);
/// Largest |entry| of [Sx, Sy] - i Sz.
double commutator_error(const SpinMatrices& m);
/// Largest |entry| of Sx^2 + Sy^2 + Sz^2 - s(s+1) I.
double casimir_error(const SpinMatrices& m);

/// Two-spin singlet. amplitudes(i * d + j) is the coefficient of |m_i> (x) |m_j>.
struct SingletState {
  double s = 0.0;
  ComplexVector amplitudes;

  Eigen::Index dim() const;
  /// The amplitudes arranged as a d x d matrix Psi with Psi(i, j) = amplitudes(i*d + j).
  ComplexMatrix coefficient_matrix() const;
};

/// Amplitude (-1)^(s - m) / sqrt(2s + 1) on |m> (x) |-m>.
SingletState build_singlet(double s);

/// || S_tot^2 psi ||, with S_tot = S (x) I + I (x) S.
double total_spin_residual(const SingletState& psi, const SpinMatrices& m);
/// Largest |entry| of Tr_B |psi><psi| - I / d.
double reduced_state_error(const SingletState& psi);

/// <psi| (a.S) (x) (b.S) |psi> computed from explicit matrices.
double exact_correlation(double s, const UnitVector& a, const UnitVector& b);
/// Same, reusing prebuilt matrices and state.
double exact_correlation(const SpinMatrices& m, const SingletState& psi, const UnitVector& a,
                         const UnitVector& b);

// ---------------------------------------------------------------------------
// Numerical checks of the sphere averages behind the correlation argument.

enum class IntegralMethod { quadrature, monte_carlo };

std::string to_string(IntegralMethod m);

struct IntegralCheckReport {
  std::string name;
  double numeric = 0.0;
  double analytic = 0.0;
  double abs_error = 0.0;
  IntegralMethod method = IntegralMethod::quadrature;
  std::uint64_t samples_or_nodes = 0;
  double std_error = 0.0;  // Monte Carlo only
  double tolerance = 0.0;
  bool pass = false;
};

struct IntegralOptions {
  IntegralMethod method = IntegralMethod::quadrature;
  std::uint64_t mc_samples = 10'000'000;
  std::uint64_t seed = 1;
  int polar_nodes = 200;
  int azimuth_nodes = 200;
  /// Fault injection: theta2 is evaluated at (x - shift).
  double theta2_shift = 0.0;
};

inline constexpr double kQuadratureTolerance = 1e-4;
inline constexpr double kMonteCarloTolerance = 1e-3;

/// (1/4pi) * integral dmu theta2(b.(mu_prev + mu)); expected b . mu_prev.
IntegralCheckReport check_integral_mu2k(const UnitVector& b, const UnitVector& mu_prev,
                                        const IntegralOptions& opts = {});

/// (1/4pi) * integral dmu sgn(a.mu) (b.mu); expected (a.b) / 2.
IntegralCheckReport check_integral_mu2km1(const UnitVector& a, const UnitVector& b,
                                          const IntegralOptions& opts = {});

/// (1/4pi) * integral dlambda theta1(a.lambda) sgn(a.lambda); expected 2/3.
IntegralCheckReport check_integral_lambda(const UnitVector& a, const IntegralOptions& opts = {});

struct FullExpectationReport {
  /// Monte Carlo of the factored integrand
  /// 2 theta1(a.l) sgn(a.l) sgn(a.m1) theta2(b.(m1 + m2)) against (2/3) a.b,
  /// tolerance four standard errors.
  IntegralCheckReport factored;
  /// Same samples, integrand theta1(a.l) theta2[b.(c1 m1 + c2 m2)] with the
  /// cbits Alice would send. Equals the factored average pointwise in
  /// expectation; checked against it at four combined standard errors.
  double protocol_term = 0.0;
  double protocol_term_std_error = 0.0;
  bool forms_agree = false;
};

/// Monte Carlo only; opts.method is ignored.
FullExpectationReport check_full_expectation(const UnitVector& a, const UnitVector& b,
                                             const IntegralOptions& opts = {});

}  // namespace spinsim
