#include "spinsim/oracle.hpp"

#include <cmath>

#include "spinsim/parallel.hpp"
#include "spinsim/random_stream.hpp"
#include "spinsim/sphere_quadrature.hpp"

namespace spinsim {

double closed_form_correlation(double s, double cos_theta) {
  return -s * (s + 1.0) * cos_theta / 3.0;
}

namespace {

Eigen::Index checked_dimension(double s) {
  const double twice = 2.0 * s;
  if (!std::isfinite(s) || s < 0.0 || std::abs(twice - std::round(twice)) > 1e-9) {
    throw ContractViolation("spin must be a non-negative integer or half-integer");
  }
  const auto d = static_cast<Eigen::Index>(std::llround(twice)) + 1;
  if (d > 1000) throw ContractViolation("spin dimension 2s + 1 exceeds 1000");
  return d;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ComplexMatrix SpinMatrices::along(const UnitVector& u) const {
  return u.x() * sx + u.y() * sy + u.z() * sz;
}

SpinMatrices build_spin_matrices(double s) {
  const Eigen::Index d = checked_dimension(s);
  SpinMatrices m;
  m.s = s;
  ComplexMatrix raise = ComplexMatrix::Zero(d, d);
  m.sz = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double mi = s - static_cast<double>(i);
    m.sz(i, i) = mi;
    // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, and |m+1> sits at index i - 1.
    if (i > 0) raise(i - 1, i) = std::sqrt(s * (s + 1.0) - mi * (mi + 1.0));
  }
  const ComplexMatrix lower = raise.adjoint();
  m.sx = 0.5 * (raise + lower);
  m.sy = std::complex<double>(0.0, -0.5) * (raise - lower);
  return m;
}

double hermiticity_error(const SpinMatrices& m) {
  return std::max({max_abs(m.sx - m.sx.adjoint()), max_abs(m.sy - m.sy.adjoint()),
                   max_abs(m.sz - m.sz.adjoint())});
}

double commutator_error(const SpinMatrices& m) {
  const std::complex<double> i(0.0, 1.0);
  return std::max({max_abs(m.sx * m.sy - m.sy * m.sx - i * m.sz),
                   max_abs(m.sy * m.sz - m.sz * m.sy - i * m.sx),
                   max_abs(m.sz * m.sx - m.sx * m.sz - i * m.sy)});
}

double casimir_error(const SpinMatrices& m) {
  const ComplexMatrix c = m.sx * m.sx + m.sy * m.sy + m.sz * m.sz;
  return max_abs(c - m.s * (m.s + 1.0) * ComplexMatrix::Identity(m.dim(), m.dim()));
}

Eigen::Index SingletState::dim() const {
  return static_cast<Eigen::Index>(std::llround(2.0 * s)) + 1;
}

ComplexMatrix SingletState::coefficient_matrix() const {
  const auto d = dim();
  ComplexMatrix psi(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) psi(i, j) = amplitudes(i * d + j);
  }
  return psi;
}

SingletState build_singlet(double s) {
  const Eigen::Index d = checked_dimension(s);
  SingletState psi;
  psi.s = s;
  psi.amplitudes = ComplexVector::Zero(d * d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    // Index i carries m = s - i; its partner -m sits at index d - 1 - i, and
    // s - m = i, so the phase is (-1)^i.
    psi.amplitudes(i * d + (d - 1 - i)) = (i % 2 == 0 ? norm : -norm);
  }
  return psi;
}

double total_spin_residual(const SingletState& psi, const SpinMatrices& m) {
  const ComplexMatrix p = psi.coefficient_matrix();
  ComplexMatrix acc = ComplexMatrix::Zero(p.rows(), p.cols());
  for (const ComplexMatrix* op : {&m.sx, &m.sy, &m.sz}) {
    const auto apply = [op](const ComplexMatrix& x) -> ComplexMatrix {
      return (*op) * x + x * op->transpose();
    };
    acc += apply(apply(p));
  }
  return acc.norm();
}

double reduced_state_error(const SingletState& psi) {
  const ComplexMatrix p = psi.coefficient_matrix();
  const auto d = p.rows();
  const ComplexMatrix target = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  const ComplexMatrix rho_a = p * p.adjoint();
  const ComplexMatrix rho_b = p.transpose() * p.conjugate();
  return std::max(max_abs(rho_a - target), max_abs(rho_b - target));
}

double exact_correlation(const SpinMatrices& m, const SingletState& psi, const UnitVector& a,
                         const UnitVector& b) {
  const ComplexMatrix p = psi.coefficient_matrix();
  const ComplexMatrix applied = m.along(a) * p * m.along(b).transpose();
  return (p.conjugate().cwiseProduct(applied)).sum().real();
}

double exact_correlation(double s, const UnitVector& a, const UnitVector& b) {
  return exact_correlation(build_spin_matrices(s), build_singlet(s), a, b);
}

std::string to_string(IntegralMethod m) {
  return m == IntegralMethod::quadrature ? "quadrature" : "monte_carlo";
}

namespace {

double shifted_theta2(double x, double shift) {
  return theta2(std::clamp(x - shift, -2.0, 2.0)).value();
}

IntegralCheckReport finish(std::string name, const SphereAverage& avg, double analytic,
                           IntegralMethod method) {
  IntegralCheckReport r;
  r.name = std::move(name);
  r.numeric = avg.value;
  r.analytic = analytic;
  r.abs_error = std::abs(avg.value - analytic);
  r.method = method;
  r.samples_or_nodes = avg.evaluations;
  r.std_error = avg.std_error;
  r.tolerance = method == IntegralMethod::quadrature ? kQuadratureTolerance : kMonteCarloTolerance;
  r.pass = r.abs_error < r.tolerance;
  return r;
}

SphereAverage average(const std::function<double(const UnitVector&)>& f, const UnitVector& axis,
                      std::vector<double> z_breaks, const IntegralOptions& opts) {
  if (opts.method == IntegralMethod::quadrature) {
    return sphere_average_quadrature(f, axis, std::move(z_breaks), opts.polar_nodes,
                                     opts.azimuth_nodes);
  }
  return sphere_average_monte_carlo(f, opts.mc_samples, opts.seed);
}

}  // namespace

IntegralCheckReport check_integral_mu2k(const UnitVector& b, const UnitVector& mu_prev,
                                        const IntegralOptions& opts) {
  const double c = dot(b, mu_prev);
  const double shift = opts.theta2_shift;
  const auto f = [&](const UnitVector& mu) { return shifted_theta2(c + dot(b, mu), shift); };
  const auto avg = average(f, b, {2.0 / 3.0 - c + shift, -2.0 / 3.0 - c + shift}, opts);
  return finish("mu_2k", avg, c, opts.method);
}

IntegralCheckReport check_integral_mu2km1(const UnitVector& a, const UnitVector& b,
                                          const IntegralOptions& opts) {
  const auto f = [&](const UnitVector& mu) { return sgn(dot(a, mu)).value() * dot(b, mu); };
  const auto avg = average(f, a, {0.0}, opts);
  return finish("mu_2k-1", avg, 0.5 * dot(a, b), opts.method);
}

IntegralCheckReport check_integral_lambda(const UnitVector& a, const IntegralOptions& opts) {
  const auto f = [&](const UnitVector& lambda) {
    const double x = dot(a, lambda);
    return static_cast<double>(theta1(x).value() * sgn(x).value());
  };
  const auto avg = average(f, a, {-1.0 / 3.0, 0.0, 1.0 / 3.0}, opts);
  return finish("lambda", avg, 2.0 / 3.0, opts.method);
}

namespace {

struct PairedAccumulator {
  std::uint64_t count = 0;
  double sum_f = 0, sum_f2 = 0, sum_p = 0, sum_p2 = 0, sum_d = 0, sum_d2 = 0;

  void add(double f, double p) {
    ++count;
    sum_f += f;
    sum_f2 += f * f;
    sum_p += p;
    sum_p2 += p * p;
    sum_d += f - p;
    sum_d2 += (f - p) * (f - p);
  }
  void merge(const PairedAccumulator& o) {
    count += o.count;
    sum_f += o.sum_f;
    sum_f2 += o.sum_f2;
    sum_p += o.sum_p;
    sum_p2 += o.sum_p2;
    sum_d += o.sum_d;
    sum_d2 += o.sum_d2;
  }
  static std::pair<double, double> mean_se(double s, double s2, double n) {
    const double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
    return {s / n, std::sqrt(var / n)};
  }
};

}  // namespace

FullExpectationReport check_full_expectation(const UnitVector& a, const UnitVector& b,
                                             const IntegralOptions& opts) {
  if (opts.mc_samples < 2) throw ContractViolation("check_full_expectation: need samples");
  const double shift = opts.theta2_shift;
  const auto acc = sharded_reduce<PairedAccumulator>(
      opts.mc_samples, 64, [&](ShardRange range, PairedAccumulator& out) {
        for (std::uint64_t i = range.first; i < range.last; ++i) {
          auto rng = RandomStream::for_round(opts.seed, i);
          const auto lambda = sample_unit_vector(rng);
          const auto mu1 = sample_unit_vector(rng);
          const auto mu2 = sample_unit_vector(rng);
          const double al = dot(a, lambda);
          const int t1 = theta1(al).value();
          const int s_l = sgn(al).value();
          const int s_1 = sgn(dot(a, mu1)).value();
          const int s_2 = sgn(dot(a, mu2)).value();
          const double p1 = dot(b, mu1), p2 = dot(b, mu2);
          const double factored = 2.0 * t1 * s_l * s_1 * shifted_theta2(p1 + p2, shift);
          const double protocol = t1 * shifted_theta2((s_l * s_1) * p1 + (s_l * s_2) * p2, shift);
          out.add(factored, protocol);
        }
      });

  const double n = static_cast<double>(acc.count);
  const auto [f_mean, f_se] = PairedAccumulator::mean_se(acc.sum_f, acc.sum_f2, n);
  const auto [p_mean, p_se] = PairedAccumulator::mean_se(acc.sum_p, acc.sum_p2, n);
  const auto [d_mean, d_se] = PairedAccumulator::mean_se(acc.sum_d, acc.sum_d2, n);

  FullExpectationReport r;
  auto& f = r.factored;
  f.name = "full_expectation";
  f.numeric = f_mean;
  f.analytic = 2.0 / 3.0 * dot(a, b);
  f.abs_error = std::abs(f_mean - f.analytic);
  f.method = IntegralMethod::monte_carlo;
  f.samples_or_nodes = acc.count;
  f.std_error = f_se;
  f.tolerance = 4.0 * f_se;
  f.pass = f.abs_error <= f.tolerance;
  r.protocol_term = p_mean;
  r.protocol_term_std_error = p_se;
  r.forms_agree = std::abs(d_mean) <= 4.0 * d_se;
  return r;
}

}  // namespace spinsim
