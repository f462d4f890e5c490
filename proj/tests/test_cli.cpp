#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "spinsim/byte_stream.hpp"
#include "spinsim/protocol.hpp"

namespace spinsim {
namespace {

using Json = nlohmann::json;

struct Outcome {
  int code = -1;
  std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("spinsim_cli_" + name);
}

TEST(CliRun, RecordFieldsAndExitCode) {
  const auto r = invoke({"run", "--n", "1", "--theta-deg", "0", "--rounds", "100000", "--seed", "7"});
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["n"], 1);
  EXPECT_EQ(j["s"], 1);
  EXPECT_EQ(j["rounds"], 100000);
  EXPECT_EQ(j["cbits_per_round"], 2);
  EXPECT_NEAR(j["quantum_target"].get<double>(), -2.0 / 3.0, 1e-15);
  const double distance = std::abs(j["mean"].get<double>() - j["quantum_target"].get<double>()) /
                          j["std_error"].get<double>();
  EXPECT_NEAR(j["sigma_distance"].get<double>(), distance, 1e-9);
  EXPECT_EQ(r.code, distance <= 4.0 ? cli::kExitOk : cli::kExitFailure);
  EXPECT_TRUE(r.err.empty());
}

TEST(CliRun, PerpendicularTargetIsZero) {
  const auto r = invoke({"run", "--n", "2", "--theta-deg", "90", "--rounds", "20000", "--seed", "1"});
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["quantum_target"].get<double>(), 0.0);
  EXPECT_EQ(j["cbits_per_round"], 4);
}

TEST(CliRun, ExplicitVectors) {
  const auto r = invoke({"run", "--a", "0,0,2", "--b", "1,0,0", "--rounds", "1000", "--seed", "1"});
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j["theta_deg"].get<double>(), 90.0, 1e-12);
}

TEST(CliRun, UsageErrors) {
  EXPECT_EQ(invoke({"run", "--n", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--n", "21"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--require-seed", "--rounds", "1000"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--theta-deg", "10", "--a", "1,0,0", "--b", "0,0,1", "--seed", "1"}).code,
            cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--a", "1,0,0", "--seed", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--a", "0,0,0", "--b", "1,0,0", "--seed", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--a", "1,0", "--b", "1,0,0", "--seed", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--rounds", "50", "--seed", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--format", "xml", "--seed", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--help"}).code, cli::kExitOk);
}

TEST(CliRun, TimeSeedIsPrinted) {
  const auto r = invoke({"run", "--rounds", "1000"});
  EXPECT_EQ(r.err.rfind("seed: ", 0), 0u) << r.err;
}

TEST(CliSweep, CsvSchemaAndTargets) {
  const auto r = invoke({"sweep", "--n", "1", "--theta-deg", "180,0,30,60,90,120,150", "--rounds", "2000",
                         "--seed", "5"});
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "n,s,theta_deg,mean,std_error,rounds,quantum_target,sigma_distance");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 8u);
    const double deg = std::stod(rows[i][2]);
    EXPECT_EQ(deg, 30.0 * static_cast<double>(i - 1));
    EXPECT_NEAR(std::stod(rows[i][6]), -(2.0 / 3.0) * std::cos(deg * M_PI / 180.0), 1e-12);
  }
  const auto three = invoke({"sweep", "--n", "3", "--theta-deg", "0,60", "--rounds", "1000", "--seed", "5"});
  const auto rows3 = csv_rows(three.out);
  ASSERT_EQ(rows3.size(), 3u);
  EXPECT_EQ(rows3[1][1], "13");
  EXPECT_NEAR(std::stod(rows3[1][6]), -182.0 / 3.0, 1e-12);
  EXPECT_NEAR(std::stod(rows3[2][6]), -91.0 / 3.0, 1e-9);
}

TEST(CliSweep, EmptyListIsUsageError) {
  EXPECT_EQ(invoke({"sweep", "--seed", "1"}).code, cli::kExitUsage);
}

TEST(CliSweep, CsvAndJsonCarryIdenticalValues) {
  const std::vector<std::string> base{"sweep", "--n", "2", "--theta-deg", "0,45,90", "--rounds", "3000", "--seed", "11"};
  auto as_json = base;
  as_json.insert(as_json.end(), {"--format", "json"});
  const auto csv = csv_rows(invoke(base).out);
  const auto j = Json::parse(invoke(as_json).out);
  ASSERT_EQ(j.size(), csv.size() - 1);
  const char* fields[] = {"n", "s", "theta_deg", "mean", "std_error", "rounds", "quantum_target", "sigma_distance"};
  for (std::size_t i = 0; i < j.size(); ++i) {
    ASSERT_EQ(j[i].size(), 8u);
    for (std::size_t f = 0; f < 8; ++f) {
      EXPECT_EQ(std::stod(csv[i + 1][f]), j[i][fields[f]].get<double>()) << fields[f];
    }
  }
}

TEST(CliSweep, ShardCountDoesNotChangeOutput) {
  const auto one = invoke({"sweep", "--theta-deg", "0,120", "--rounds", "5000", "--seed", "3", "--shards", "1"});
  const auto many = invoke({"sweep", "--theta-deg", "0,120", "--rounds", "5000", "--seed", "3", "--shards", "8"});
  EXPECT_EQ(one.out, many.out);
}

// A stream whose locale uses a decimal comma and digit grouping.
struct CommaPunct : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

TEST(CliOutput, IndependentOfStreamLocale) {
  std::ostringstream out, err;
  out.imbue(std::locale(std::locale::classic(), new CommaPunct));
  cli::run({"sweep", "--n", "2", "--theta-deg", "30", "--rounds", "100000", "--seed", "2"}, out, err);
  const auto rows = csv_rows(out.str());
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_EQ(rows[1].size(), 8u);
  EXPECT_EQ(rows[1][5], "100000");
  EXPECT_NE(rows[1][3].find('.'), std::string::npos);
  EXPECT_EQ(cli::format_number(0.5), "0.5");
  EXPECT_EQ(cli::format_number(1234567.0), "1234567");
}

TEST(CliOutput, WritesToFile) {
  const auto path = temp_file("run.csv");
  std::filesystem::remove(path);
  const auto r = invoke({"run", "--rounds", "1000", "--seed", "1", "--format", "csv", "--out", path.string()});
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "n,s,theta_deg,mean,std_error,rounds,quantum_target,sigma_distance,cbits_per_round");
  EXPECT_EQ(invoke({"run", "--seed", "1", "--out", "/nonexistent/dir/x.csv"}).code, cli::kExitUsage);
}

const std::vector<std::string> kQuickVerify{"verify", "--seed", "1", "--mc-samples", "20000", "--rounds", "20000"};

Json find_check(const Json& report, const std::string& name, const std::string& method,
                const std::string& detail_suffix) {
  for (const auto& c : report["checks"]) {
    const auto d = c["detail"].get<std::string>();
    if (c["name"] == name && c["method"] == method && d.size() >= detail_suffix.size() &&
        d.compare(d.size() - detail_suffix.size(), detail_suffix.size(), detail_suffix) == 0) {
      return c;
    }
  }
  ADD_FAILURE() << "no check " << name << " " << detail_suffix;
  return {};
}

TEST(CliVerify, ReportSchema) {
  auto args = kQuickVerify;
  args.push_back("--json");
  const auto r = invoke(args);
  const auto j = Json::parse(r.out);
  ASSERT_TRUE(j.contains("pass") && j.contains("checks") && j.contains("seed"));
  bool all = true;
  for (const auto& c : j["checks"]) {
    for (const char* key : {"name", "detail", "numeric", "analytic", "abs_error", "method",
                            "samples_or_nodes", "std_error", "tolerance", "pass"}) {
      EXPECT_TRUE(c.contains(key)) << key;
    }
    all = all && c["pass"].get<bool>();
  }
  EXPECT_EQ(j["pass"].get<bool>(), all);
  EXPECT_EQ(r.code, all ? cli::kExitOk : cli::kExitFailure);
}

TEST(CliVerify, PerturbedTheta2FailsPerpendicularMu2kCheck) {
  const auto clean = Json::parse(invoke(kQuickVerify).out);
  EXPECT_TRUE(find_check(clean, "mu_2k", "quadrature", "a.b=0.000000")["pass"].get<bool>());

  auto args = kQuickVerify;
  args.push_back("--perturb-theta2");
  const auto r = invoke(args);
  EXPECT_EQ(r.code, cli::kExitFailure);
  const auto j = Json::parse(r.out);
  EXPECT_FALSE(find_check(j, "mu_2k", "quadrature", "a.b=0.000000")["pass"].get<bool>());
  EXPECT_EQ(j["theta2_shift"].get<double>(), 0.1);
}

std::uint16_t free_port() {
  TcpListener probe(Address{"127.0.0.1", 0});
  return probe.port();
}

std::vector<std::int64_t> read_outputs(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::int64_t> values;
  while (std::getline(in, line)) values.push_back(std::stoll(line.substr(line.find(',') + 1)));
  return values;
}

TEST(CliSession, LoopbackMatchesLocalRounds) {
  const auto address = "127.0.0.1:" + std::to_string(free_port());
  const auto bob_file = temp_file("bob.csv"), alice_file = temp_file("alice.csv");
  Outcome bob;
  std::thread server([&] {
    bob = invoke({"serve-bob", "--address", address, "--n", "1", "--rounds", "10000", "--seed", "42",
                  "--theta-deg", "60", "--outputs", bob_file.string()});
  });
  const auto alice = invoke({"run-alice", "--address", address, "--n", "1", "--rounds", "10000", "--seed", "42",
                             "--outputs", alice_file.string()});
  server.join();
  ASSERT_EQ(alice.code, 0) << alice.err;
  ASSERT_EQ(bob.code, 0) << bob.err;
  const auto ja = Json::parse(alice.out), jb = Json::parse(bob.out);
  EXPECT_EQ(ja["payload_bits"], 20000);
  EXPECT_EQ(jb["payload_bits"], 20000);
  EXPECT_EQ(ja["reverse_payload_bits"], 0);
  EXPECT_EQ(ja["role"], "alice");
  EXPECT_EQ(jb["role"], "bob");

  const auto alphas = read_outputs(alice_file), betas = read_outputs(bob_file);
  ASSERT_EQ(alphas.size(), 10000u);
  ASSERT_EQ(betas.size(), 10000u);
  const auto a = UnitVector::ez(), b = UnitVector::in_xz_plane(M_PI / 3.0);
  const SpinParameters params(1);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto local = run_round_indexed(a, b, 42, i, params);
    ASSERT_EQ(alphas[i], local.alpha);
    ASSERT_EQ(betas[i], local.beta);
  }
}

TEST(CliSession, SeedMismatchExitCode) {
  const auto address = "127.0.0.1:" + std::to_string(free_port());
  Outcome bob;
  std::thread server([&] {
    bob = invoke({"serve-bob", "--address", address, "--rounds", "100", "--seed", "1"});
  });
  const auto alice = invoke({"run-alice", "--address", address, "--rounds", "100", "--seed", "2"});
  server.join();
  const int mismatch = cli::kExitTransportBase + static_cast<int>(TransportErrorCode::handshake_mismatch);
  EXPECT_EQ(alice.code, mismatch) << alice.err;
  EXPECT_EQ(bob.code, mismatch) << bob.err;
}

TEST(CliSession, ConnectionFailureAndMissingSeed) {
  const auto address = "127.0.0.1:" + std::to_string(free_port());
  EXPECT_EQ(invoke({"run-alice", "--address", address, "--seed", "1", "--connect-timeout-ms", "200"}).code,
            cli::kExitConnection);
  EXPECT_EQ(invoke({"run-alice", "--address", address}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"serve-bob", "--address", "nohost", "--seed", "1"}).code, cli::kExitUsage);
}

}  // namespace
}  // namespace spinsim
