// xorshard: leakage-tunable XOR secret sharing across T server directories.
//
// Exit status: 0 success, 1 validation or audit failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xorshard/audit.hpp"
#include "xorshard/codec.hpp"
#include "xorshard/error.hpp"
#include "xorshard/layout.hpp"
#include "xorshard/params.hpp"
#include "xorshard/shareio.hpp"

namespace fs = std::filesystem;
using namespace xorshard;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string alpha;
  int servers = 0;
  std::vector<std::string> dirs;
  std::string root;
  std::string input;
  std::string output;
  std::string plan_file;
  bool test_mode = false;
  std::optional<std::uint64_t> seed;
  bool compact = false;
  bool entropy = false;
  unsigned part_bits = 1;
  std::uint64_t part_len = 1;
  std::string format = "text";
};

SchemeParams params_from(const Options& o) {
  if (o.servers < 2 || o.servers > kMaxServers) {
    throw UsageError("-T must be in [2, " + std::to_string(kMaxServers) + "]");
  }
  try {
    return derive_params(o.servers, parse_alpha(o.alpha));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string describe(const SchemeParams& p) {
  std::ostringstream out;
  out << "T=" << p.T << " l=" << p.l << " k=" << p.k << " q=" << p.q << " r=" << p.r << " u=" << p.u
      << " v=" << p.v << " x=" << p.x << " case=" << static_cast<int>(p.case_tag) << " n_keys=" << p.n_keys
      << " n_plain=" << p.n_plain << " n_encrypted=" << p.n_encrypted << " (" << to_string(p.case_tag) << ")";
  return out.str();
}

Dispersal dispersal_from(const Options& o, std::optional<int> servers) {
  if (!o.dirs.empty() && !o.root.empty()) throw UsageError("use either --dir or --root, not both");
  if (!o.dirs.empty()) {
    if (servers && static_cast<int>(o.dirs.size()) != *servers) {
      throw UsageError("expected " + std::to_string(*servers) + " --dir values, got " + std::to_string(o.dirs.size()));
    }
    Dispersal d;
    for (const auto& dir : o.dirs) d.server_dirs.emplace_back(dir);
    return d;
  }
  if (o.root.empty()) throw UsageError("need --dir (once per server) or --root");
  if (servers) return Dispersal::under_root(o.root, *servers);
  // Learn T from server 1's share header.
  const fs::path first = Dispersal::under_root(o.root, 1).share_path(1);
  if (!fs::exists(first)) throw Error(ErrorKind::MissingShare, "no share at " + first.string(), 1);
  const ShareBlob blob = deserialize_share(read_file(first));
  return Dispersal::under_root(o.root, blob.header.servers);
}

std::unique_ptr<RandomSource> random_from(const Options& o) {
  if (!o.test_mode) {
    if (o.seed) throw UsageError("--seed requires --test-mode");
    return std::make_unique<SystemRandom>();
  }
  std::uint64_t seed = o.seed.value_or(0);
  if (const char* env = std::getenv("XORSHARD_SEED")) {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("XORSHARD_SEED is not an unsigned integer: ") + env);
    }
  }
  std::cerr << "warning: test mode, keys derived from seed " << seed << " are NOT secret\n";
  return std::make_unique<SeededRandom>(seed);
}

int cmd_encode(const Options& o) {
  const SchemeParams p = params_from(o);
  const Dispersal dispersal = dispersal_from(o, p.T);
  auto rng = random_from(o);
  const SharePlan plan = build_layout(p);
  const Bytes data = read_file(o.input);
  const auto shares = encode(data, plan, *rng);
  disperse(shares, dispersal);
  const std::uint64_t part_len = shares.front().header.part_len;
  std::cout << describe(p) << '\n';
  std::cout << "file_bytes=" << data.size() << " part_len=" << part_len
            << " lambda_bits=" << plan.share(1).size() * part_len * 8
            << " rho_bits=" << static_cast<std::uint64_t>(p.n_keys) * part_len * 8 << '\n';
  for (int t = 1; t <= p.T; ++t) std::cout << "wrote " << dispersal.share_path(t).string() << '\n';
  return kExitOk;
}

int cmd_decode(const Options& o) {
  const Dispersal dispersal = dispersal_from(o, std::nullopt);
  const auto shares = collect(dispersal);
  const ShareHeader& h = shares.front().header;
  if (h.servers != dispersal.servers()) {
    throw Error(ErrorKind::MissingShare, "shares describe " + std::to_string(h.servers) + " servers, found " +
                                             std::to_string(dispersal.servers()));
  }
  const SchemeParams p = derive_params(h.servers, normalize_alpha(h.l, h.k));
  const Bytes data = decode(shares, build_layout(p));
  write_file_atomic(o.output, data);
  std::cout << "recovered " << data.size() << " bytes into " << o.output << '\n';
  return kExitOk;
}

int cmd_plan(const Options& o) {
  const SharePlan plan = build_layout(params_from(o));
  std::cout << (o.compact ? format_plan_compact(plan) : format_plan(plan));
  return kExitOk;
}

int cmd_audit(const Options& o) {
  SharePlan plan;
  if (!o.plan_file.empty()) {
    if (!o.alpha.empty()) throw UsageError("use either --plan or --alpha/-T");
    std::ifstream in(o.plan_file);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + o.plan_file);
    plan = parse_plan(in);
  } else {
    plan = build_layout(params_from(o));
  }
  const AuditReport report = o.entropy ? entropy_oracle(plan, o.part_bits) : structural_audit(plan);
  std::cout << (o.format == "kv" ? format_audit_kv(report) : format_audit_text(report));
  return report.passed() ? kExitOk : kExitFailure;
}

int cmd_rates(const Options& o) {
  const SharePlan plan = build_layout(params_from(o));
  const RateReport report = rate_report(plan, o.part_len);
  std::cout << (o.format == "kv" ? format_rates_kv(report) : format_rates_text(report));
  return kExitOk;
}

void add_scheme_options(CLI::App* cmd, Options& o, bool required = true) {
  auto* alpha = cmd->add_option("--alpha", o.alpha, "leakage budget as a fraction l/k, e.g. 3/10");
  auto* servers = cmd->add_option("-T,--servers", o.servers, "number of servers");
  if (required) {
    alpha->required();
    servers->required();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xorshard: store a file across T servers with bounded leakage to any T-1 of them"};
  app.require_subcommand(1);
  Options o;

  auto* enc = app.add_subcommand("encode", "split a file into T share files");
  add_scheme_options(enc, o);
  enc->add_option("-i,--input", o.input, "file to encode")->required()->check(CLI::ExistingFile);
  enc->add_option("--dir", o.dirs, "server directory, once per server in order");
  enc->add_option("--root", o.root, "parent directory; shares go to ROOT/server_<t>");
  enc->add_flag("--test-mode", o.test_mode, "derive keys from a seed (insecure, for tests)");
  enc->add_option("--seed", o.seed, "seed for --test-mode (XORSHARD_SEED overrides)");

  auto* dec = app.add_subcommand("decode", "rebuild a file from all T share files");
  dec->add_option("--dir", o.dirs, "server directory, once per server in order");
  dec->add_option("--root", o.root, "parent directory holding server_<t>");
  dec->add_option("-o,--output", o.output, "where to write the recovered file")->required();

  auto* pln = app.add_subcommand("plan", "print the symbolic share layout");
  add_scheme_options(pln, o);
  pln->add_flag("--compact", o.compact, "one line per server");

  auto* aud = app.add_subcommand("audit", "check the leakage bound of a layout");
  add_scheme_options(aud, o, false);
  aud->add_option("--plan", o.plan_file, "audit a plan file instead of a generated layout");
  aud->add_flag("--entropy", o.entropy, "also compute exact mutual information by enumeration");
  aud->add_option("--part-bits", o.part_bits, "bits per part for --entropy")->check(CLI::Range(1u, 26u));
  aud->add_option("--format", o.format, "text or kv")->check(CLI::IsMember({"text", "kv"}));

  auto* rts = app.add_subcommand("rates", "report storage and randomness rates against their bounds");
  add_scheme_options(rts, o);
  rts->add_option("--part-len", o.part_len, "bytes per part")->check(CLI::PositiveNumber);
  rts->add_option("--format", o.format, "text or kv")->check(CLI::IsMember({"text", "kv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*enc) return cmd_encode(o);
    if (*dec) return cmd_decode(o);
    if (*pln) return cmd_plan(o);
    if (*aud) {
      if (o.plan_file.empty() && (o.alpha.empty() || o.servers == 0)) {
        throw UsageError("audit needs --alpha and -T, or --plan");
      }
      return cmd_audit(o);
    }
    if (*rts) return cmd_rates(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
