/*
 * Copyright 2026 The FlexiChain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// flexichain-cli: run scenarios, reproduce the probability tables, run the
// Monte-Carlo cross-check and verify ledgers written by `run`.
//
// Exit codes: 0 success, 1 check or protocol failure, 2 usage/IO/parse error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "flexichain/flexichain.hpp"

namespace fs = std::filesystem;
using flexi::ErrorCode;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

#ifndef FLEXICHAIN_DEFAULT_SCENARIO
#define FLEXICHAIN_DEFAULT_SCENARIO "scenarios/demo4.json"
#endif

struct Options {
  std::string scenario = FLEXICHAIN_DEFAULT_SCENARIO;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::uint64_t trials = 100000;
  std::string mode;
  std::string corrupt_cell;
  std::vector<int> nodes{4, 8, 16};
};

std::string default_out() {
  const char* env = std::getenv("FLEXICHAIN_OUT");
  return env != nullptr && *env != '\0' ? env : "flexichain-out";
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) flexi::fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) flexi::fail(ErrorCode::IoError, "write failed: " + path.string());
}

void write_file(const fs::path& path, const flexi::Bytes& bytes) {
  write_file(path, std::string(bytes.begin(), bytes.end()));
}

flexi::Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) flexi::fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto s = ss.str();
  return {s.begin(), s.end()};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) flexi::fail(ErrorCode::IoError, "cannot create " + dir.string());
}

flexi::netsim::ScenarioConfig load(const Options& o) {
  auto cfg = flexi::netsim::load_scenario(o.scenario);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.mode.empty()) cfg.finality = flexi::netsim::parse_finality_mode(o.mode);
  return cfg;
}

nlohmann::json summary_json(const flexi::netsim::Simulation& sim) {
  using nlohmann::json;
  const auto& m = sim.metrics();
  json roles = json::object();
  for (const auto& n : sim.nodes()) roles[std::string(flexi::to_string(n.spec.role))] = roles.value(std::string(flexi::to_string(n.spec.role)), 0) + 1;
  json attacks = json::array();
  for (const auto& a : m.attack_outcomes) {
    attacks.push_back({{"label", a.label},
                       {"category", std::string(flexi::netsim::to_string(a.category))},
                       {"succeeded", a.succeeded},
                       {"blocked_at", std::string(flexi::netsim::to_string(a.blocked_at))},
                       {"detail", a.detail}});
  }
  return {{"format", "flexichain-summary v1"},
          {"seed", sim.config().seed},
          {"finality_mode", std::string(flexi::consensus::to_string(sim.config().finality))},
          {"nodes", sim.nodes().size()},
          {"roles", roles},
          {"enrollments", m.enrollments},
          {"enrollments_rejected", m.enrollments_rejected},
          {"nodechain_length", sim.network_chain().size()},
          {"vault_size", sim.network_vault().size()},
          {"transactions", m.transactions},
          {"data_blocks", m.data_blocks},
          {"blocks_rejected", m.blocks_rejected},
          {"finalized_blocks", m.finalized_blocks},
          {"authentications", m.authentications},
          {"authentication_rejections", m.authentication_rejections},
          {"header_alerts", m.header_alerts},
          {"messages_delivered", m.messages_delivered},
          {"messages_dropped", m.messages_dropped},
          {"vault_audit",
           {{"local_reads", m.vault_local_reads},
            {"remote_blocked", m.vault_remote_blocked},
            {"remote_reads", m.vault_remote_reads}}},
          {"attacks", attacks},
          {"fraudulent_finalized", m.fraudulent_finalized},
          {"virtual_end_time", sim.now()},
          {"trace_digest", flexi::to_hex(sim.trace_digest())}};
}

int cmd_run(const Options& o) {
  const auto cfg = load(o);
  const fs::path out = o.out;
  ensure_dir(out);
  flexi::netsim::Simulation sim(cfg);
  sim.run();
  write_file(out / "trace.log", sim.trace_text());
  write_file(out / "nodechain.bin", sim.network_chain().serialize());
  write_file(out / "vault.bin", sim.network_vault().serialize());
  write_file(out / "dag.bin", sim.dag().serialize());
  write_file(out / "dag.txt", flexi::dag::export_text(sim.dag()));
  const auto summary = summary_json(sim);
  write_file(out / "summary.json", summary.dump(2) + "\n");

  const auto& m = sim.metrics();
  std::cout << "scenario: " << o.scenario << "\n"
            << "seed: " << cfg.seed << "\n"
            << "enrollments: " << m.enrollments << "\n"
            << "nodechain_length: " << sim.network_chain().size() << "\n"
            << "data_blocks: " << m.data_blocks << "\n"
            << "finalized_blocks: " << m.finalized_blocks << "\n"
            << "attacks: " << m.attacks << " succeeded: " << m.attack_successes << "\n"
            << "vault_remote_reads: " << m.vault_remote_reads << "\n"
            << "trace_digest: " << flexi::to_hex(sim.trace_digest()) << "\n";
  return kOk;
}

// --corrupt-cell <blockchain|flexichain|central>:<n>:<column>
flexi::secmodel::ReferenceSet corrupted(const std::string& spec) {
  flexi::secmodel::ReferenceSet refs;
  if (spec.empty()) return refs;
  std::istringstream in(spec);
  std::string which, n_text, column;
  std::getline(in, which, ':');
  std::getline(in, n_text, ':');
  std::getline(in, column);
  int n = 0;
  try {
    n = std::stoi(n_text);
  } catch (const std::exception&) {
    flexi::fail(ErrorCode::ConfigError, "--corrupt-cell: bad node count '" + n_text + "'");
  }
  auto bump = [](double& v) { v *= 1.5; };
  if (which == "central") {
    for (auto& row : refs.comparison) {
      if (row.nodes == n) return bump(row.central), refs;
    }
  } else if (which == "blockchain" || which == "flexichain") {
    auto& table = which == "blockchain" ? refs.blockchain : refs.flexichain;
    for (auto& row : table) {
      if (row.nodes != n) continue;
      if (column == "summation") return bump(row.summation), refs;
      for (int c = 0; c < flexi::secmodel::kCategories; ++c) {
        if (column == "cat" + std::to_string(c + 1)) return bump(row.categories[static_cast<std::size_t>(c)]), refs;
      }
    }
  }
  flexi::fail(ErrorCode::ConfigError, "--corrupt-cell: unknown cell '" + spec + "'");
}

int cmd_tables(const Options& o) {
  const auto refs = corrupted(o.corrupt_cell);
  const auto report = flexi::secmodel::emit_tables(o.out, refs);
  auto table_ok = [&](const std::string& file) {
    bool ok = true;
    for (const auto& c : report.checks) {
      if (c.file == file && !c.pass) ok = false;
    }
    return ok;
  };
  for (const auto& c : report.checks) {
    if (c.pass) continue;
    std::cout << "FAIL " << c.file << "[n=" << c.nodes << "]." << c.column << " computed=" << flexi::secmodel::format_number(c.computed)
              << " reference=" << flexi::secmodel::format_number(c.reference) << "\n";
  }
  for (const char* table : {"blockchain", "flexichain", "comparison"}) {
    std::cout << table << ' ' << (table_ok(table) ? "PASS" : "FAIL") << "\n";
  }
  for (const auto& f : report.files) std::cout << "wrote " << f.string() << "\n";
  return report.all_pass() ? kOk : kFailure;
}

int cmd_montecarlo(const Options& o) {
  using namespace flexi::secmodel;
  const std::uint64_t seed = o.seed.value_or(0);
  std::ostringstream csv;
  csv << "ledger,category,n,amplitude,per_node,trials,empirical,analytic,three_sigma,pass\n";
  bool all = true;
  for (auto ledger : {Ledger::Blockchain, Ledger::FlexiChain}) {
    const auto factors = back_solve_all(reference(ledger));
    const std::string name = ledger == Ledger::Blockchain ? "blockchain" : "flexichain";
    for (int c = 0; c < kCategories; ++c) {
      const auto& f = factors[static_cast<std::size_t>(c)];
      for (int n : o.nodes) {
        const double analytic = category_probability(f, n);
        const std::uint64_t stream = seed * 1000003u + static_cast<std::uint64_t>(ledger == Ledger::FlexiChain) * 100 +
                                     static_cast<std::uint64_t>(c) * 10 + static_cast<std::uint64_t>(n);
        const auto r = flexi::netsim::monte_carlo_attack(f, n, o.trials, stream);
        const double band = flexi::netsim::three_sigma(analytic, o.trials);
        const bool pass = std::abs(r.probability() - analytic) <= band;
        all = all && pass;
        csv << name << ",cat" << c + 1 << ',' << n << ',' << format_number(f.amplitude) << ','
            << format_number(f.per_node) << ',' << o.trials << ',' << format_number(r.probability()) << ','
            << format_number(analytic) << ',' << format_number(band) << ',' << (pass ? "true" : "false") << '\n';
        std::cout << (pass ? "PASS " : "FAIL ") << name << " cat" << c + 1 << " n=" << n
                  << " empirical=" << format_number(r.probability()) << " analytic=" << format_number(analytic)
                  << " 3sigma=" << format_number(band) << "\n";
      }
    }
  }
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_file(fs::path(o.out) / "montecarlo.csv", csv.str());
  }
  return all ? kOk : kFailure;
}

int cmd_verify(const Options& o) {
  const auto cfg = load(o);
  const fs::path dir = o.out;
  const auto chain = flexi::nodechain::NodeChainLedger::deserialize(read_file(dir / "nodechain.bin"));
  const auto vault = flexi::vault::Vault::deserialize(read_file(dir / "vault.bin"), cfg.token_salt);
  bool ok = true;

  const auto violation =
      flexi::nodechain::verify_chain(chain, flexi::nodechain::FullVerification{vault, cfg.kdf});
  if (violation) {
    std::cout << "FAIL nodechain index=" << violation->index << " " << to_string(violation->kind) << "\n";
    ok = false;
  } else {
    std::cout << "PASS nodechain blocks=" << chain.size() << "\n";
  }
  if (auto bad = flexi::vault::verify_enrollment_chain(vault, cfg.kdf)) {
    std::cout << "FAIL vault enrollment chain breaks at index " << *bad << "\n";
    ok = false;
  } else {
    std::cout << "PASS vault entries=" << vault.size() << "\n";
  }

  try {
    const auto dag = flexi::dag::Layer0Ledger::deserialize(read_file(dir / "dag.bin"));
    std::size_t broken = 0;
    for (const auto& b : dag.blocks()) broken += flexi::dag::narration_intact(b) ? 0 : 1;
    if (broken != 0) {
      std::cout << "FAIL dag narration broken in " << broken << " block(s)\n";
      ok = false;
    } else {
      std::cout << "PASS dag records=" << dag.blocks().size() << "\n";
    }
  } catch (const flexi::Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    std::cout << "FAIL dag " << e.what() << "\n";
    ok = false;
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FlexiChain reference simulator"};
  app.require_subcommand(1);
  Options o;
  o.out = default_out();

  auto* run = app.add_subcommand("run", "Run a scenario and write trace, ledgers, vault and summary");
  run->add_option("--scenario", o.scenario, "Scenario file (JSON)")->capture_default_str();
  run->add_option("--seed", o.seed, "Seed override (flag > scenario file > 0)");
  run->add_option("--out", o.out, "Output directory (default: $FLEXICHAIN_OUT or ./flexichain-out)");
  run->add_option("--mode", o.mode, "Finality mode override")->check(CLI::IsMember({"exhaustive", "narrated"}));

  auto* tables = app.add_subcommand("tables", "Back-solve factors and emit the probability tables as CSV");
  tables->add_option("--out", o.out, "Output directory");
  tables->add_option("--corrupt-cell", o.corrupt_cell)->group("");

  auto* mc = app.add_subcommand("montecarlo", "Compare Monte-Carlo estimates with the analytic model");
  mc->add_option("--trials", o.trials, "Trials per (ledger, category, n)")->check(CLI::PositiveNumber);
  mc->add_option("--seed", o.seed, "Master seed (default 0)");
  mc->add_option("--nodes", o.nodes, "Node counts")->check(CLI::PositiveNumber);
  mc->add_option("--out", o.out, "Write montecarlo.csv into this directory");
  bool mc_out_set = false;
  mc->callback([&] { mc_out_set = mc->count("--out") > 0; });

  auto* verify = app.add_subcommand("verify", "Verify the ledgers written by `run`");
  verify->add_option("--scenario", o.scenario, "Scenario the ledgers were produced from")->capture_default_str();
  verify->add_option("--out", o.out, "Directory holding nodechain.bin, vault.bin and dag.bin");
  verify->add_option("--seed", o.seed, "Seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (!mc_out_set) {
    // montecarlo writes files only when asked to.
    if (mc->parsed()) o.out.clear();
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (tables->parsed()) return cmd_tables(o);
    if (mc->parsed()) return cmd_montecarlo(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const flexi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::IoError:
      case ErrorCode::Malformed:
        return kUsage;
      default:
        return kFailure;
    }
  }
  return kUsage;
}
