// sop-check: check histories against consistency levels, generate
// histories, print the level registry, run the brute-force oracle.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sop/generators.hpp"
#include "sop/oracle.hpp"
#include "sop/report.hpp"
#include "sop/search.hpp"

namespace {

constexpr int kExitInput = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct CommonFlags {
  std::string history;
  std::string levels = "linearizable,sequential,causal+,eventual";
  std::string format = "text";
  int threads = 1;
  std::optional<std::int64_t> staleness_t, staleness_j, staleness_k;
};

std::vector<sop::ConsistencyLevel> parse_levels(const CommonFlags& f) {
  sop::StalenessBound bound;
  bound.max_delay = f.staleness_t;
  bound.max_writer_ops = f.staleness_j;
  bound.max_key_updates = f.staleness_k;
  if (!bound.max_delay && !bound.max_writer_ops && !bound.max_key_updates)
    bound = sop::default_staleness_bound();
  if (!bound.valid()) throw InputError("staleness bounds must be positive");

  std::vector<sop::ConsistencyLevel> out;
  for (const auto& name : split(f.levels)) {
    auto id = sop::parse_level_name(name);
    if (!id)
      throw InputError("unknown level '" + name + "'; valid levels: " + sop::valid_level_names());
    out.push_back({*id, bound});
  }
  if (out.empty()) throw InputError("no levels requested; valid levels: " + sop::valid_level_names());
  return out;
}

sop::Timeline load(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw InputError("cannot open history file '" + path + "'");
  return sop::build_timeline(sop::read_history_file(path));
}

int exit_code(const std::vector<sop::Verdict>& verdicts) {
  bool unknown = false;
  for (auto v : verdicts) {
    if (v == sop::Verdict::Fail) return 1;
    if (v == sop::Verdict::Unknown) unknown = true;
  }
  return unknown ? 2 : 0;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--history", f.history, "history file (JSON lines)")->required();
  cmd->add_option("--levels", f.levels, "comma-separated level names");
  cmd->add_option("--format", f.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--staleness-t", f.staleness_t, "bounded staleness: max delay (ns)");
  cmd->add_option("--staleness-j", f.staleness_j, "bounded staleness: max later writer ops");
  cmd->add_option("--staleness-k", f.staleness_k, "bounded staleness: max later key updates");
}

void print_levels() {
  std::cout << "Level | Convergence | Relationship | Availability\n";
  for (const auto& l : sop::all_levels()) {
    const auto c = sop::constraints_of(l);
    std::string rel = sop::to_string(c.relationship);
    if (c.relationship.kind == sop::RelationshipKind::BoundedCasl) rel = "Bounded-CASL";
    std::cout << sop::level_name(l.id) << " | " << sop::to_string(c.convergence) << " | " << rel
              << " | " << sop::to_string(sop::availability_upper_bound(l)) << "\n";
  }
  std::cout << "\nSession guarantee | Availability\n";
  for (const auto& g : sop::session_guarantee_bounds())
    std::cout << sop::to_string(g.guarantee) << " | " << sop::to_string(g.availability) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check key-value histories against non-transactional consistency levels"};
  app.require_subcommand(1);

  CommonFlags check_flags;
  std::uint64_t max_states = sop::SearchBudget{}.max_states;
  std::int64_t timeout_ms = 60'000;
  bool witness = false;
  bool no_chunking = false;
  auto* check = app.add_subcommand("check", "check a history");
  add_common(check, check_flags);
  check->add_option("--max-states", max_states, "search state budget");
  check->add_option("--timeout-ms", timeout_ms, "wall-clock budget");
  check->add_flag("--witness", witness, "print witness orderings");
  check->add_flag("--no-chunking", no_chunking, "disable real-time chunking");

  CommonFlags oracle_flags;
  std::size_t max_ops = 6;
  auto* oracle = app.add_subcommand("oracle", "brute-force check of a tiny history");
  add_common(oracle, oracle_flags);
  oracle->add_option("--max-ops", max_ops, "largest history the oracle accepts");

  sop::GenParams gen;
  std::string gen_level = "linearizable";
  std::string out_path;
  std::string inject;
  auto* generate = app.add_subcommand("generate", "simulate a cluster and write its history");
  generate->add_option("--level", gen_level,
                       "linearizable, sequential, causal+, pram or eventual");
  generate->add_option("--clients", gen.clients);
  generate->add_option("--keys", gen.keys);
  generate->add_option("--ops", gen.ops);
  generate->add_option("--read-fraction", gen.read_fraction);
  generate->add_option("--cas-fraction", gen.cas_fraction);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--delay", gen.mean_replication_delay, "mean replication delay (ns)");
  generate->add_option("--skew", gen.clock_skew, "max per-client clock skew (ns)");
  generate->add_option("--max-value", gen.max_value, "0 writes fresh values");
  generate->add_option("--inject", inject, "rt, casl, wfr, mw, mr, rmw or well-formedness");
  generate->add_option("--out", out_path, "output file (default stdout)");

  app.add_subcommand("levels", "print the level registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (check->parsed()) {
      auto levels = parse_levels(check_flags);
      auto timeline = load(check_flags.history);
      sop::SearchOptions opts;
      opts.threads = check_flags.threads;
      opts.chunked = !no_chunking;
      opts.budget.max_states = max_states;
      opts.budget.wall_timeout = std::chrono::milliseconds(timeout_ms);
      if (const char* env = std::getenv("SOP_CHECK_BUDGET_MS"))
        opts.budget.wall_timeout = std::chrono::milliseconds(std::stoll(env));
      auto report = sop::check(timeline, levels, opts);
      std::cout << (check_flags.format == "json" ? sop::report_json(report, witness)
                                                 : sop::report_text(report, witness));
      std::vector<sop::Verdict> verdicts;
      for (const auto& r : report.results) verdicts.push_back(r.verdict);
      return exit_code(verdicts);
    }
    if (oracle->parsed()) {
      auto levels = parse_levels(oracle_flags);
      auto timeline = load(oracle_flags.history);
      sop::OracleOptions opts{max_ops, oracle_flags.threads};
      auto verdicts = sop::oracle_check_all(timeline, levels, opts);
      if (oracle_flags.format == "json") {
        sop::ConformityReport report;
        for (std::size_t i = 0; i < levels.size(); ++i)
          report.results.push_back({levels[i], verdicts[i], false, std::nullopt});
        std::cout << sop::report_json(report, false);
      } else {
        for (std::size_t i = 0; i < levels.size(); ++i)
          std::cout << sop::cli_name(levels[i].id) << ": " << sop::to_string(verdicts[i]) << "\n";
      }
      return exit_code(verdicts);
    }
    if (generate->parsed()) {
      auto id = sop::parse_level_name(gen_level);
      if (!id) throw InputError("unknown level '" + gen_level + "'");
      gen.level = *id;
      auto events = sop::generate(gen);
      if (!inject.empty()) {
        auto v = sop::parse_violation(inject);
        if (!v) throw InputError("unknown violation '" + inject + "'");
        events = sop::inject_violation(events, *v);
      }
      if (out_path.empty()) {
        std::cout << sop::serialize_history(events);
      } else {
        sop::write_history_file(out_path, events);
      }
      return 0;
    }
    print_levels();
    return 0;
  } catch (const sop::HistoryError& e) {
    std::cerr << "malformed history: " << e.what() << "\n";
  } catch (const sop::OracleTooLarge& e) {
    std::cerr << "oracle: " << e.what() << "\n";
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
  }
  return kExitInput;
}
