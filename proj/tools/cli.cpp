#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>

#include "spinsim/estimator.hpp"
#include "spinsim/oracle.hpp"
#include "spinsim/random_stream.hpp"
#include "spinsim/transport.hpp"
#include "verify_suite.hpp"

namespace spinsim::cli {

using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  int n = 1;
  std::uint64_t rounds = kDefaultRounds;
  std::optional<std::uint64_t> seed;
  int shards = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<double> theta_deg;
  std::string a_text, b_text;
  std::string format;
  std::string out_path;
  std::string outputs_path;
  std::string address = "127.0.0.1:7400";
  bool require_seed = false;
  bool perturb_theta2 = false;
  bool json = false;
  std::uint64_t mc_samples = 10'000'000;
  int connect_timeout_ms = 5000;
};

// One correlation measurement; the field order is the CSV column order.
struct Record {
  int n = 0;
  std::int64_t s = 0;
  double theta_deg = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t rounds = 0;
  double quantum_target = 0.0;
  double sigma_distance = 0.0;
  int cbits_per_round = 0;
};

constexpr const char* kSweepHeader = "n,s,theta_deg,mean,std_error,rounds,quantum_target,sigma_distance";

// cos of an angle given in degrees, exact at multiples of 90.
double cos_deg(double deg) {
  const double r = std::fmod(std::abs(deg), 360.0);
  if (r == 0.0) return 1.0;
  if (r == 90.0 || r == 270.0) return 0.0;
  if (r == 180.0) return -1.0;
  return std::cos(deg * std::numbers::pi / 180.0);
}

UnitVector parse_vector(const std::string& text, const char* flag) {
  double v[3];
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    while (p < end && *p == ' ') ++p;
    const auto [next, ec] = std::from_chars(p, end, v[i]);
    if (ec != std::errc{}) throw UsageError(std::string(flag) + " expects x,y,z, got '" + text + "'");
    p = next;
    while (p < end && *p == ' ') ++p;
    if (i < 2) {
      if (p == end || *p != ',') throw UsageError(std::string(flag) + " expects x,y,z, got '" + text + "'");
      ++p;
    }
  }
  if (p != end) throw UsageError(std::string(flag) + " expects x,y,z, got '" + text + "'");
  try {
    return UnitVector::normalized(v[0], v[1], v[2]);
  } catch (const ContractViolation&) {
    throw UsageError(std::string(flag) + " must be a nonzero vector");
  }
}

std::uint64_t resolve_seed(const Options& o, std::ostream& err) {
  if (o.seed) return *o.seed;
  if (o.require_seed) throw UsageError("--seed is required when --require-seed is set");
  const auto now = std::chrono::system_clock::now().time_since_epoch().count();
  const auto seed = RandomStream(static_cast<std::uint64_t>(now))();
  err << "seed: " << seed << "\n";
  return seed;
}

std::string format_cell(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_number(v);
}

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Record make_record(const CorrelationEstimate& e, double theta_deg, double cos_theta) {
  Record r;
  r.n = e.params.n();
  r.s = e.params.s();
  r.theta_deg = theta_deg;
  r.mean = e.mean;
  r.std_error = e.std_error;
  r.rounds = e.count;
  r.quantum_target = closed_form_correlation(static_cast<double>(r.s), cos_theta) + 0.0;  // no -0
  const double gap = std::abs(r.mean - r.quantum_target);
  r.sigma_distance = e.std_error > 0.0 ? gap / e.std_error
                     : gap == 0.0      ? 0.0
                                       : std::numeric_limits<double>::infinity();
  r.cbits_per_round = e.params.cbits_per_round();
  return r;
}

bool within_band(const Record& r) { return r.sigma_distance <= 4.0; }

Json to_json(const Record& r, bool with_cbits) {
  Json j;
  j["n"] = r.n;
  j["s"] = r.s;
  j["theta_deg"] = json_number(r.theta_deg);
  j["mean"] = json_number(r.mean);
  j["std_error"] = json_number(r.std_error);
  j["rounds"] = r.rounds;
  j["quantum_target"] = json_number(r.quantum_target);
  j["sigma_distance"] = json_number(r.sigma_distance);
  if (with_cbits) j["cbits_per_round"] = r.cbits_per_round;
  return j;
}

std::string to_csv_row(const Record& r, bool with_cbits) {
  std::string row = std::to_string(r.n) + "," + std::to_string(r.s) + "," + format_cell(r.theta_deg) +
                    "," + format_cell(r.mean) + "," + format_cell(r.std_error) + "," +
                    std::to_string(r.rounds) + "," + format_cell(r.quantum_target) + "," +
                    format_cell(r.sigma_distance);
  if (with_cbits) row += "," + std::to_string(r.cbits_per_round);
  return row;
}

// Output goes to --out when given, else to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string output_format(const Options& o, const char* fallback) {
  if (o.json) return "json";
  return o.format.empty() ? fallback : o.format;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.theta_deg.size() > 1) throw UsageError("run takes a single --theta-deg");
  const bool explicit_vectors = !o.a_text.empty() || !o.b_text.empty();
  if (explicit_vectors && !o.theta_deg.empty()) throw UsageError("give either --theta-deg or --a/--b, not both");
  if (explicit_vectors && (o.a_text.empty() || o.b_text.empty())) throw UsageError("--a and --b go together");

  const SpinParameters params(o.n);
  const std::uint64_t seed = resolve_seed(o, err);
  UnitVector a = UnitVector::ez(), b = UnitVector::ez();
  double theta_deg = 0.0, cos_theta = 1.0;
  if (explicit_vectors) {
    a = parse_vector(o.a_text, "--a");
    b = parse_vector(o.b_text, "--b");
    cos_theta = std::clamp(dot(a, b), -1.0, 1.0);
    theta_deg = std::acos(cos_theta) * 180.0 / std::numbers::pi;
  } else {
    theta_deg = o.theta_deg.empty() ? 0.0 : o.theta_deg.front();
    cos_theta = cos_deg(theta_deg);
    b = UnitVector::in_xz_plane(theta_deg * std::numbers::pi / 180.0);
  }

  Sink sink(o.out_path, out);
  const auto e = estimate_correlation(a, b, params, o.rounds, seed, o.shards);
  const auto r = make_record(e, theta_deg, cos_theta);
  if (output_format(o, "json") == "json") {
    *sink << to_json(r, true).dump(2) << "\n";
  } else {
    *sink << kSweepHeader << ",cbits_per_round\n" << to_csv_row(r, true) << "\n";
  }
  return within_band(r) ? kExitOk : kExitFailure;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.theta_deg.empty()) throw UsageError("sweep needs a non-empty --theta-deg list");
  const SpinParameters params(o.n);
  const std::uint64_t seed = resolve_seed(o, err);
  auto degrees = o.theta_deg;
  std::sort(degrees.begin(), degrees.end());
  std::vector<double> radians;
  for (double d : degrees) radians.push_back(d * std::numbers::pi / 180.0);
  Sink sink(o.out_path, out);
  const auto estimates = sweep_angles(params, radians, o.rounds, seed, o.shards);

  std::vector<Record> rows;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    rows.push_back(make_record(estimates[i], degrees[i], cos_deg(degrees[i])));
  }
  if (output_format(o, "csv") == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(to_json(r, false));
    *sink << arr.dump(2) << "\n";
  } else {
    *sink << kSweepHeader << "\n";
    for (const auto& r : rows) *sink << to_csv_row(r, false) << "\n";
  }
  return std::all_of(rows.begin(), rows.end(), within_band) ? kExitOk : kExitFailure;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  VerifyOptions v;
  v.theta2_shift = o.perturb_theta2 ? 0.1 : 0.0;
  v.mc_samples = o.mc_samples;
  v.rounds = o.rounds;
  v.seed = o.seed.value_or(1);
  if (!o.seed && o.require_seed) throw UsageError("--seed is required when --require-seed is set");
  v.shards = o.shards;
  Sink sink(o.out_path, out);
  const auto checks = run_verify_suite(v);
  const bool all_pass = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });

  if (output_format(o, "json") == "csv") {
    *sink << "name,detail,numeric,analytic,abs_error,method,samples_or_nodes,std_error,tolerance,pass\n";
    for (const auto& c : checks) {
      *sink << c.name << ",\"" << c.detail << "\"," << format_cell(c.numeric) << ","
            << format_cell(c.analytic) << "," << format_cell(c.abs_error) << "," << c.method << ","
            << c.samples_or_nodes << "," << format_cell(c.std_error) << "," << format_cell(c.tolerance)
            << "," << (c.pass ? "true" : "false") << "\n";
    }
  } else {
    Json report;
    report["pass"] = all_pass;
    report["seed"] = v.seed;
    report["theta2_shift"] = v.theta2_shift;
    Json list = Json::array();
    for (const auto& c : checks) {
      Json j;
      j["name"] = c.name;
      j["detail"] = c.detail;
      j["numeric"] = json_number(c.numeric);
      j["analytic"] = json_number(c.analytic);
      j["abs_error"] = json_number(c.abs_error);
      j["method"] = c.method;
      j["samples_or_nodes"] = c.samples_or_nodes;
      j["std_error"] = json_number(c.std_error);
      j["tolerance"] = json_number(c.tolerance);
      j["pass"] = c.pass;
      list.push_back(std::move(j));
    }
    report["checks"] = std::move(list);
    *sink << report.dump(2) << "\n";
  }
  const auto failed = std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.pass; });
  err << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size() << " checks passed\n";
  return all_pass ? kExitOk : kExitFailure;
}

SessionConfig session_config(const Options& o, Role role) {
  if (!o.seed) throw UsageError("sessions need an explicit --seed shared by both sides");
  if (o.rounds < 1) throw UsageError("--rounds must be at least 1");
  SpinParameters params(o.n);
  return SessionConfig{params.n(), *o.seed, o.rounds, role};
}

UnitVector session_direction(const Options& o, const std::string& text, const char* flag) {
  if (!text.empty() && !o.theta_deg.empty()) throw UsageError(std::string("give either --theta-deg or ") + flag);
  if (o.theta_deg.size() > 1) throw UsageError("a session takes a single --theta-deg");
  if (!text.empty()) return parse_vector(text, flag);
  if (!o.theta_deg.empty()) return UnitVector::in_xz_plane(o.theta_deg.front() * std::numbers::pi / 180.0);
  return UnitVector::ez();
}

int report_endpoint(const Options& o, const char* role, const SessionConfig& c,
                    const EndpointResult& r, std::ostream& out) {
  std::int64_t sum = 0;
  for (auto v : r.outputs) sum += v;
  if (!o.outputs_path.empty()) {
    std::ofstream f(o.outputs_path);
    if (!f) throw UsageError("cannot open '" + o.outputs_path + "' for writing");
    f << "round,output\n";
    for (std::size_t i = 0; i < r.outputs.size(); ++i) f << i << "," << r.outputs[i] << "\n";
  }
  Json j;
  j["role"] = role;
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["rounds"] = r.ledger.rounds;
  j["output_sum"] = sum;
  j["output_mean"] = r.outputs.empty() ? 0.0 : static_cast<double>(sum) / static_cast<double>(r.outputs.size());
  j["payload_bits"] = r.ledger.payload_bits;
  j["framing_bytes"] = r.ledger.framing_bytes;
  j["reverse_payload_bits"] = r.ledger.reverse_payload_bits;
  Sink sink(o.out_path, out);
  *sink << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_serve_bob(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = session_config(o, Role::bob);
  const auto b = session_direction(o, o.b_text, "--b");
  TcpListener listener(Address::parse(o.address));
  err << "listening on port " << listener.port() << "\n";
  auto peer = listener.accept();
  return report_endpoint(o, "bob", config, run_bob(*peer, config, b), out);
}

int cmd_run_alice(const Options& o, std::ostream& out, std::ostream&) {
  const auto config = session_config(o, Role::alice);
  const auto a = session_direction(o, o.a_text, "--a");
  auto peer = tcp_connect(Address::parse(o.address), o.connect_timeout_ms);
  return report_endpoint(o, "alice", config, run_alice(*peer, config, a), out);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "Level; spin s = (3^n - 1) / 2")->check(CLI::Range(1, SpinParameters::kMaxLevel));
  sub->add_option("--rounds", o.rounds, "Rounds per estimate")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Shared randomness seed");
  sub->add_flag("--require-seed", o.require_seed, "Fail instead of drawing a time-based seed");
  sub->add_option("--out", o.out_path, "Write output to this file");
}

void add_estimate(CLI::App* sub, Options& o) {
  sub->add_option("--shards", o.shards, "Parallel shards; results do not depend on it")
      ->check(CLI::PositiveNumber);
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Classical simulation of spin-s singlet correlations"};
  app.name("spinsim");
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Estimate E[alpha beta] for one pair of directions");
  add_common(run_cmd, o);
  add_estimate(run_cmd, o);
  run_cmd->add_option("--theta-deg", o.theta_deg, "Angle between a = z and b in the xz plane");
  run_cmd->add_option("--a", o.a_text, "Alice's direction x,y,z");
  run_cmd->add_option("--b", o.b_text, "Bob's direction x,y,z");

  auto* sweep_cmd = app.add_subcommand("sweep", "Estimate the correlation over a list of angles");
  add_common(sweep_cmd, o);
  add_estimate(sweep_cmd, o);
  sweep_cmd->add_option("--theta-deg", o.theta_deg, "Comma separated angles in degrees")->delimiter(',');

  auto* verify_cmd = app.add_subcommand("verify", "Run the numerical oracle suite");
  add_common(verify_cmd, o);
  add_estimate(verify_cmd, o);
  verify_cmd->add_flag("--json", o.json, "JSON report (the default)");
  verify_cmd->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples per integral")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--perturb-theta2", o.perturb_theta2)->group("");

  auto* bob_cmd = app.add_subcommand("serve-bob", "Listen and play Bob for one session");
  auto* alice_cmd = app.add_subcommand("run-alice", "Connect and play Alice for one session");
  for (auto* sub : {bob_cmd, alice_cmd}) {
    add_common(sub, o);
    sub->add_option("--address", o.address, "host:port");
    sub->add_option("--theta-deg", o.theta_deg, "Direction in the xz plane, from z");
    sub->add_option("--outputs", o.outputs_path, "Write per-round outputs as CSV");
  }
  bob_cmd->add_option("--b", o.b_text, "Bob's direction x,y,z");
  alice_cmd->add_option("--a", o.a_text, "Alice's direction x,y,z");
  alice_cmd->add_option("--connect-timeout-ms", o.connect_timeout_ms, "Give up connecting after this long")
      ->check(CLI::NonNegativeNumber);

  std::vector<const char*> argv{"spinsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(o, out, err);
    if (*sweep_cmd) return cmd_sweep(o, out, err);
    if (*verify_cmd) return cmd_verify(o, out, err);
    if (*bob_cmd) return cmd_serve_bob(o, out, err);
    if (*alice_cmd) return cmd_run_alice(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TransportError& e) {
    err << "transport error: " << e.what() << "\n";
    return kExitTransportBase + static_cast<int>(e.code());
  } catch (const ConnectionError& e) {
    err << "connection error: " << e.what() << "\n";
    return kExitConnection;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace spinsim::cli
