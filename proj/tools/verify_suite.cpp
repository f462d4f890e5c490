#include "verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spinsim/estimator.hpp"
#include "spinsim/oracle.hpp"
#include "spinsim/random_stream.hpp"

namespace spinsim::cli {

namespace {

std::string describe(const UnitVector& u) {
  std::ostringstream s;
  s.precision(6);
  s << "(" << u.x() << "," << u.y() << "," << u.z() << ")";
  return s.str();
}

CheckRecord from_report(const IntegralCheckReport& r, std::string detail) {
  return {r.name,      std::move(detail), r.numeric,  r.analytic,  r.abs_error,
          to_string(r.method), r.samples_or_nodes, r.std_error, r.tolerance, r.pass};
}

CheckRecord exact_check(std::string name, std::string detail, double error, double tolerance,
                        std::uint64_t samples) {
  return {std::move(name), std::move(detail), error, 0.0, error, "exact", samples, 0.0,
          tolerance, error <= tolerance};
}

// Five pairs spanning the range of dot products, turned by a fixed rotation so
// the quadrature axis is not a coordinate axis.
std::vector<std::pair<UnitVector, UnitVector>> geometries() {
  RandomStream rng(20240611);
  const auto turn = Rotation::random(rng);
  std::vector<std::pair<UnitVector, UnitVector>> out;
  for (double deg : {90.0, 75.0, 105.0, 60.0, 0.0}) {
    const auto b = UnitVector::in_xz_plane(deg * std::numbers::pi / 180.0);
    out.emplace_back(rotate(UnitVector::ez(), turn), rotate(b, turn));
  }
  return out;
}

void matrix_checks(std::vector<CheckRecord>& out, std::uint64_t seed) {
  RandomStream rng(seed);
  for (double s : {1.0, 4.0, 13.0}) {
    const auto m = build_spin_matrices(s);
    const auto psi = build_singlet(s);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto a = sample_unit_vector(rng), b = sample_unit_vector(rng);
      worst = std::max(worst, std::abs(exact_correlation(m, psi, a, b) -
                                       closed_form_correlation(s, dot(a, b))));
    }
    const std::string tag = "s=" + std::to_string(static_cast<int>(s));
    out.push_back(exact_check("matrix_vs_closed_form", tag, worst, 1e-10, 100));
    out.push_back(exact_check("spin_hermiticity", tag, hermiticity_error(m), 1e-10, 0));
    out.push_back(exact_check("spin_commutator", tag, commutator_error(m), 1e-10, 0));
    out.push_back(exact_check("spin_casimir", tag, casimir_error(m), 1e-10, 0));
    out.push_back(exact_check("singlet_total_spin", tag, total_spin_residual(psi, m), 1e-10, 0));
    out.push_back(exact_check("singlet_reduced_state", tag, reduced_state_error(psi), 1e-12, 0));
  }
}

void integral_checks(std::vector<CheckRecord>& out, const VerifyOptions& opts) {
  IntegralOptions quad;
  quad.theta2_shift = opts.theta2_shift;
  IntegralOptions mc = quad;
  mc.method = IntegralMethod::monte_carlo;
  mc.mc_samples = opts.mc_samples;
  mc.seed = opts.seed;

  for (const auto& [a, b] : geometries()) {
    // mu_{2k-1} plays the role of the fixed vector in the mu_{2k} average.
    const auto detail = "a=" + describe(a) + " b=" + describe(b) +
                        " a.b=" + std::to_string(dot(a, b));
    out.push_back(from_report(check_integral_mu2k(b, a, quad), detail));
    out.push_back(from_report(check_integral_mu2k(b, a, mc), detail));
    out.push_back(from_report(check_integral_mu2km1(a, b, quad), detail));
    out.push_back(from_report(check_integral_mu2km1(a, b, mc), detail));
    out.push_back(from_report(check_integral_lambda(a, quad), detail));
  }

  for (double deg : {0.0, 60.0, 90.0}) {
    const auto b = UnitVector::in_xz_plane(deg * std::numbers::pi / 180.0);
    const auto full = check_full_expectation(UnitVector::ez(), b, mc);
    std::ostringstream detail;
    detail << "theta_deg=" << deg << " protocol_term=" << full.protocol_term
           << " forms_agree=" << (full.forms_agree ? "true" : "false");
    out.push_back(from_report(full.factored, detail.str()));
  }
}

void protocol_checks(std::vector<CheckRecord>& out, const VerifyOptions& opts) {
  for (int n = 1; n <= 3; ++n) {
    const SpinParameters params(n);
    constexpr std::uint64_t kCases = 100'000;
    std::uint64_t mismatches = 0;
    for (std::uint64_t i = 0; i < kCases; ++i) {
      auto rng = RandomStream::for_round(opts.seed ^ 0x5bd1e995ULL, i);
      const auto a = sample_unit_vector(rng), b = sample_unit_vector(rng);
      const auto r = draw_shared_randomness(rng, params);
      const auto c = alice_cbits(a, r);
      mismatches += bob_output_expanded(b, c, r) != bob_output_simplified(b, c, r);
    }
    out.push_back(exact_check("bob_expanded_vs_simplified", "n=" + std::to_string(n),
                              static_cast<double>(mismatches), 0.0, kCases));
  }

  std::uint64_t failures = 0;
  for (int n = 1; n <= 10; ++n) {
    const std::int64_t sum = geometric_weight_sum(n);
    const std::int64_t s = SpinParameters(n).s();
    failures += 8 * sum != pow3(2 * n) - 1;
    failures += 2 * sum != s * (s + 1);
    const auto cost = comm_cost(SpinParameters(n));
    failures += cost.worst_case != 2 * n;
    failures += std::abs(cost.as_log - 2.0 * n) > 1e-12;
  }
  out.push_back(exact_check("geometric_series_and_comm_cost", "n=1..10",
                            static_cast<double>(failures), 0.0, 10));

  const SpinParameters two(2);
  const auto a = UnitVector::ez(), b = UnitVector::ez();
  for (auto [k, l] : {std::pair{1, 2}, std::pair{2, 1}}) {
    const auto e = estimate_cross_term(k, l, two, a, b, opts.rounds, opts.seed, opts.shards);
    CheckRecord r{"cross_term_null",
                  "n=2 k=" + std::to_string(k) + " l=" + std::to_string(l),
                  e.mean,
                  0.0,
                  std::abs(e.mean),
                  "monte_carlo",
                  e.count,
                  e.std_error,
                  4.0 * e.std_error,
                  std::abs(e.mean) <= 4.0 * e.std_error};
    out.push_back(std::move(r));
  }
}

}  // namespace

std::vector<CheckRecord> run_verify_suite(const VerifyOptions& opts) {
  std::vector<CheckRecord> out;
  matrix_checks(out, opts.seed);
  integral_checks(out, opts);
  protocol_checks(out, opts);
  return out;
}

}  // namespace spinsim::cli
