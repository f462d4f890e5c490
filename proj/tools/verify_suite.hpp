#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spinsim::cli {

struct CheckRecord {
  std::string name;
  std::string detail;
  double numeric = 0.0;
  double analytic = 0.0;
  double abs_error = 0.0;
  std::string method;  // exact | quadrature | monte_carlo
  std::uint64_t samples_or_nodes = 0;
  double std_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  double theta2_shift = 0.0;
  std::uint64_t mc_samples = 10'000'000;
  std::uint64_t rounds = 1'000'000;  // cross-term estimates
  std::uint64_t seed = 1;
  int shards = 1;
};

std::vector<CheckRecord> run_verify_suite(const VerifyOptions& opts);

}  // namespace spinsim::cli
