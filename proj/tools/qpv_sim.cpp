// Copyright 2026 The qpv-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qpv_sim: command-line driver for single protocol runs, attack runs,
// Monte Carlo experiments and the oracle self-test.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpv/qpv.hpp"

namespace {

using nlohmann::json;

struct Overrides {
    std::string config_path;
    std::optional<std::size_t> n;
    std::optional<double> x;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> variant;
    std::optional<std::string> strategy;
    std::optional<std::string> format;
    std::optional<double> slack;
    std::optional<double> latency;
    std::optional<std::size_t> rounds;
    std::optional<std::size_t> preshared;
    std::optional<std::string> challenges;
    std::optional<std::string> scenario;
    std::optional<std::string> n_list;
    std::optional<std::string> output;
    std::optional<unsigned> workers;
    bool strict_duplicates = false;
    bool diagnostic = false;
    bool json_out = false;
    bool show_log = false;
};

json load_config(const std::string& path) {
    if (path.empty()) {
        return json::object();
    }
    std::ifstream in(path);
    if (!in) {
        throw qpv::ConfigError("cannot read config file " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw qpv::ConfigError("config file " + path + ": " + e.what());
    }
}

qpv::BellLabel parse_label(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s.size() == 2 && (s[0] == '0' || s[0] == '1') && (s[1] == '0' || s[1] == '1')) {
            return {static_cast<qpv::Bit>(s[0] - '0'), static_cast<qpv::Bit>(s[1] - '0')};
        }
    } else if (j.is_array() && j.size() == 2) {
        return {j[0].get<qpv::Bit>(), j[1].get<qpv::Bit>()};
    }
    throw qpv::ConfigError("bell label must be \"ab\" or [a, b]");
}

qpv::Bit parse_challenge(const std::string& s) {
    if (s == "plus" || s == "+") {
        return 0;
    }
    if (s == "minus" || s == "-") {
        return 1;
    }
    throw qpv::ConfigError("challenge must be plus or minus, got '" + s + "'");
}

std::vector<std::size_t> parse_n_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(item, &pos);
            if (pos != item.size() || v < 0) {
                throw std::invalid_argument(item);
            }
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw qpv::ConfigError("bad entry '" + item + "' in n list");
        }
    }
    return out;
}

/// Defaults: x = 1, n = 4. File values first, then flags.
qpv::ProtocolConfig protocol_config(const json& cfg, const Overrides& o) {
    qpv::ProtocolConfig c;
    try {
        if (cfg.contains("n") && cfg["n"].is_number_integer()) {
            const auto n = cfg["n"].get<long long>();
            if (n < 0) {
                throw qpv::ConfigError("n must be at least 1");
            }
            c.n = static_cast<std::size_t>(n);
        }
        c.x = cfg.value("x", c.x);
        if (cfg.contains("challenge_states")) {
            for (const auto& s : cfg["challenge_states"]) {
                c.challenge_states.push_back(parse_challenge(s.get<std::string>()));
            }
        }
        if (cfg.contains("bell_labels_v1")) {
            for (const auto& l : cfg["bell_labels_v1"]) {
                c.bell_labels_v1.push_back(parse_label(l));
            }
        }
        if (cfg.contains("bell_labels_v2")) {
            for (const auto& l : cfg["bell_labels_v2"]) {
                c.bell_labels_v2.push_back(parse_label(l));
            }
        }
        if (cfg.contains("variant")) {
            c.variant = qpv::parse_variant(cfg["variant"].get<std::string>());
        }
        c.deadline_slack = cfg.value("deadline_slack", c.deadline_slack);
        c.prover_latency = cfg.value("prover_latency", c.prover_latency);
        c.strict_duplicates = cfg.value("strict_duplicates", c.strict_duplicates);
        c.diagnostic = cfg.value("diagnostic", c.diagnostic);
    } catch (const json::exception& e) {
        throw qpv::ConfigError(std::string("config: ") + e.what());
    }
    if (o.n) c.n = *o.n;
    if (o.x) c.x = *o.x;
    if (o.variant) c.variant = qpv::parse_variant(*o.variant);
    if (o.slack) c.deadline_slack = *o.slack;
    if (o.latency) c.prover_latency = *o.latency;
    if (o.strict_duplicates) c.strict_duplicates = true;
    if (o.diagnostic) c.diagnostic = true;
    if (o.challenges) {
        c.challenge_states.clear();
        for (char ch : *o.challenges) {
            c.challenge_states.push_back(parse_challenge(std::string(1, ch)));
        }
    }
    return c;
}

qpv::AttackConfig attack_config(const json& cfg, const Overrides& o) {
    qpv::AttackConfig a;
    a.base = protocol_config(cfg, o);
    try {
        if (cfg.contains("strategy")) {
            a.strategy = qpv::parse_strategy(cfg["strategy"].get<std::string>());
        }
        a.delta = cfg.value("delta", a.delta);
        a.rounds = cfg.value("rounds", a.rounds);
        if (cfg.contains("preshared_pairs")) {
            a.preshared_pairs = cfg["preshared_pairs"].get<std::size_t>();
        }
    } catch (const json::exception& e) {
        throw qpv::ConfigError(std::string("config: ") + e.what());
    }
    if (o.strategy) a.strategy = qpv::parse_strategy(*o.strategy);
    if (o.delta) a.delta = *o.delta;
    if (o.rounds) a.rounds = *o.rounds;
    if (o.preshared) a.preshared_pairs = *o.preshared;
    return a;
}

std::uint64_t seed_of(const json& cfg, const Overrides& o, const char* key = "seed") {
    if (o.seed) {
        return *o.seed;
    }
    return cfg.value(key, std::uint64_t{0});
}

std::string t(double v) {
    if (v == qpv::kNever) {
        return "never";
    }
    std::ostringstream os;
    os << std::setprecision(12) << v;
    std::string s = os.str();
    if (s.find_first_of(".e") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string opt_bit(const std::optional<qpv::Bit>& b) { return b ? std::string(1, static_cast<char>('0' + *b)) : "-"; }

std::string opt_ann(const std::optional<qpv::Announcement>& a) { return a ? qpv::announcement_string(*a) : "-"; }

std::string opt_w(const std::optional<qpv::BsmOutcome>& w) { return w ? qpv::announcement_string(*w) : "-"; }

nlohmann::ordered_json events_json(const std::string& log) {
    auto out = nlohmann::ordered_json::array();
    std::istringstream in(log);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(nlohmann::ordered_json::parse(line));
    }
    return out;
}

void print_transcript(std::ostream& out, const qpv::RunResult& r, bool show_log) {
    out << "pairs:\n";
    for (const auto& p : r.pairs) {
        out << "  [" << p.index << "] psi=" << qpv::challenge_name(p.challenge) << " v1_label="
            << int(p.v1_label.a) << int(p.v1_label.b) << " v2_label=" << int(p.v2_label.a) << int(p.v2_label.b)
            << " w_prime=" << opt_w(p.w_prime) << " pp_prime=" << opt_ann(p.pp_prime)
            << " report@V1=" << opt_bit(p.prover_state_report) << " report@V2=" << opt_bit(p.report_at_v2)
            << " v2_outcome=" << opt_bit(p.v2_outcome) << " arrivals(V1,V2)=" << t(p.timestamps.report_v1) << ","
            << t(p.timestamps.announce_v2) << " checks: v1=" << (p.checks.v1_pass ? "ok" : "FAIL")
            << " v2=" << (p.checks.v2_pass ? "ok" : "FAIL") << " on_time=" << (p.checks.on_time ? "yes" : "no")
            << "\n";
    }
    if (show_log) {
        out << "events:\n" << r.event_log;
    }
    out << "final verifier arrival t=" << t(r.last_verifier_arrival) << "\n";
    out << "complete response t=" << t(r.complete_response_time) << "\n";
    out << "verdict: " << (r.verdict.accepted ? "ACCEPT" : "REJECT") << " (" << qpv::to_string(r.verdict.reason)
        << ")\n";
}

void add_protocol_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON config file (keys mirror the config field names)");
    cmd->add_option("--n", o.n, "number of entangled pairs (default 4)");
    cmd->add_option("--x", o.x, "prover distance from each verifier (default 1)");
    cmd->add_option("--seed", o.seed, "trial seed (default 0)");
    cmd->add_option("--variant", o.variant, "announcement variant: two-bit or single-bit");
    cmd->add_option("--slack", o.slack, "deadline slack added to 2x (default 0)");
    cmd->add_option("--latency", o.latency, "extra prover emission delay (default 0)");
    cmd->add_option("--challenges", o.challenges, "fixed challenges, one char per pair: + or -");
    cmd->add_flag("--strict-duplicates", o.strict_duplicates, "require V1's own announcement copy by the deadline");
    cmd->add_flag("--json", o.json_out, "print the structured transcript document instead of text");
    cmd->add_flag("--log", o.show_log, "include the event log (JSON lines) in text output");
}

int cmd_run(const Overrides& o) {
    const json cfg = load_config(o.config_path);
    const auto config = protocol_config(cfg, o);
    config.validate();
    const auto r = qpv::run_honest(config, seed_of(cfg, o));
    if (o.json_out) {
        auto doc = qpv::transcript_json(r);
        doc["events"] = events_json(r.event_log);
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "run: n=" << config.n << " x=" << t(config.x) << " variant=" << qpv::to_string(config.variant)
                  << " deadline=" << t(qpv::deadline(config)) << "\n";
        print_transcript(std::cout, r, o.show_log);
    }
    return r.verdict.accepted ? 0 : 1;
}

int cmd_attack(const Overrides& o) {
    const json cfg = load_config(o.config_path);
    const auto config = attack_config(cfg, o);
    config.validate();
    const auto out = qpv::run_attack(config, seed_of(cfg, o));
    if (o.json_out) {
        auto doc = qpv::transcript_json(out.run);
        doc["events"] = events_json(out.run.event_log);
        doc["strategy"] = out.strategy;
        doc["earliest_complete_response_time"] = out.earliest_complete_response_time;
        doc["agreement_time"] = out.agreement_time == qpv::kNever ? json(nullptr) : json(out.agreement_time);
        doc["footprint"] = out.footprint;
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "attack: strategy=" << out.strategy << " n=" << config.base.n << " x=" << t(config.base.x)
              << " delta=" << t(config.delta) << " deadline=" << t(qpv::deadline(config.base)) << "\n";
    std::cout << "knowledge footprint: " << out.footprint << "\n";
    print_transcript(std::cout, out.run, o.show_log);
    std::cout << "colluder agreement t=" << t(out.agreement_time) << "\n";
    std::cout << "earliest_complete_response_time=" << t(out.earliest_complete_response_time) << "\n";
    std::cout << (out.verdict.accepted ? "ACCEPT" : "REJECT") << "(" << qpv::to_string(out.verdict.reason) << ")\n";
    return 0;
}

int cmd_montecarlo(const Overrides& o) {
    const json cfg = load_config(o.config_path);
    qpv::ExperimentSpec spec;
    try {
        if (cfg.contains("scenario")) {
            spec.scenario = qpv::parse_scenario(cfg["scenario"].get<std::string>());
        }
        if (cfg.contains("n") && cfg["n"].is_array()) {
            spec.n_list = cfg["n"].get<std::vector<std::size_t>>();
        }
        spec.trials = cfg.value("trials", spec.trials);
        spec.master_seed = cfg.value("master_seed", cfg.value("seed", spec.master_seed));
        spec.output_path = cfg.value("output", spec.output_path);
        spec.delta = cfg.value("delta", spec.delta);
        spec.rounds = cfg.value("rounds", spec.rounds);
        spec.workers = cfg.value("workers", spec.workers);
    } catch (const json::exception& e) {
        throw qpv::ConfigError(std::string("config: ") + e.what());
    }
    json base_cfg = cfg;
    if (base_cfg.contains("n") && base_cfg["n"].is_array()) {
        base_cfg.erase("n");
    }
    Overrides base_o = o;
    base_o.n.reset();
    spec.base = protocol_config(base_cfg, base_o);
    if (o.scenario) spec.scenario = qpv::parse_scenario(*o.scenario);
    if (o.n_list) spec.n_list = parse_n_list(*o.n_list);
    if (o.trials) spec.trials = *o.trials;
    if (o.seed) spec.master_seed = *o.seed;
    if (o.output) spec.output_path = *o.output;
    if (o.delta) spec.delta = *o.delta;
    if (o.rounds) spec.rounds = *o.rounds;
    if (o.workers) spec.workers = *o.workers;
    const auto format = qpv::parse_format(o.format.value_or(cfg.value("format", std::string("json"))));
    if (spec.output_path.empty()) {
        spec.output_path = format == qpv::ReportFormat::json ? "report.json" : "report.csv";
    }
    spec.validate();

    const auto result = qpv::run_experiment(spec);
    qpv::write_report(result, format, spec.output_path);

    std::cout << std::left << std::setw(18) << "scenario" << std::setw(5) << "n" << std::setw(10) << "trials"
              << std::setw(10) << "accepted" << std::setw(16) << "detection" << std::setw(16) << "expected"
              << std::setw(18) << "3sigma" << "pass\n";
    for (const auto& row : result.rows) {
        std::cout << std::left << std::setw(18) << row.scenario << std::setw(5) << row.n << std::setw(10)
                  << row.trials << std::setw(10) << row.accepted << std::setw(16) << qpv::detail::sig12(row.detection_rate)
                  << std::setw(16) << qpv::detail::sig12(row.expected_detection) << std::setw(18)
                  << qpv::detail::sig12(3.0 * row.sigma) << (row.pass ? "PASS" : "FAIL") << "\n";
    }
    std::cout << "report written to " << spec.output_path << "\n";
    return result.all_pass() ? 0 : 1;
}

int cmd_selftest(const std::vector<std::string>& suites) {
    const auto& names = suites.empty() ? qpv::selftest_suites() : suites;
    bool ok = true;
    for (const auto& name : names) {
        const auto r = qpv::run_selftest_suite(name);
        std::cout << (r.ok() ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.cases << " cases, " << r.failures
                  << " failures)\n";
        ok = ok && r.ok();
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum position-verification simulator"};
    app.require_subcommand(1);

    Overrides run_o, attack_o, mc_o;
    std::vector<std::string> suites;

    auto* run = app.add_subcommand("run", "one honest protocol trial; exit 0 on ACCEPT");
    add_protocol_flags(run, run_o);

    auto* attack = app.add_subcommand("attack", "one colluding-adversary trial; exit 0 when the run completes");
    add_protocol_flags(attack, attack_o);
    attack->add_option("--strategy", attack_o.strategy, "guess, swap-and-forward or bounded-rounds (default guess)");
    attack->add_option("--delta", attack_o.delta, "colluder offset from x, 0 < delta < x (default 0.1)");
    attack->add_option("--rounds", attack_o.rounds, "teleportation rounds for bounded-rounds (default 1)");
    attack->add_option("--preshared", attack_o.preshared, "cap on pre-shared colluder pairs (default unlimited)");
    attack->add_flag("--diagnostic", attack_o.diagnostic, "disable the timing check and pool after all arrivals");

    auto* mc = app.add_subcommand("montecarlo", "Monte Carlo detection-rate experiment; exit 0 iff every row passes");
    mc->add_option("--config", mc_o.config_path, "JSON config file (ExperimentSpec and protocol field names)");
    mc->add_option("--scenario", mc_o.scenario, "honest, guess, swap-and-forward or bounded-rounds (default guess)");
    mc->add_option("--n", mc_o.n_list, "comma-separated pair counts (default 4)");
    mc->add_option("--trials", mc_o.trials, "trials per n (default 10000)");
    mc->add_option("--seed", mc_o.seed, "master seed (default 0)");
    mc->add_option("--output", mc_o.output, "report path (default report.json or report.csv)");
    mc->add_option("--format", mc_o.format, "report format: json or csv (default json)");
    mc->add_option("--workers", mc_o.workers, "worker threads (default: available processors)");
    mc->add_option("--x", mc_o.x, "prover distance (default 1)");
    mc->add_option("--delta", mc_o.delta, "colluder offset (default 0.1)");
    mc->add_option("--rounds", mc_o.rounds, "rounds for bounded-rounds (default 1)");
    mc->add_option("--variant", mc_o.variant, "announcement variant: two-bit or single-bit");
    mc->add_option("--slack", mc_o.slack, "deadline slack (default 0)");

    auto* self = app.add_subcommand("selftest", "brute-force oracle suites; exit 0 iff all pass");
    self->add_option("--suite", suites, "run only these suites: teleport, swap, frame, reduction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            return cmd_run(run_o);
        }
        if (*attack) {
            return cmd_attack(attack_o);
        }
        if (*mc) {
            return cmd_montecarlo(mc_o);
        }
        return cmd_selftest(suites);
    } catch (const qpv::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
