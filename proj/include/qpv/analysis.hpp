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

#ifndef QPV_ANALYSIS_HPP
#define QPV_ANALYSIS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qpv/adversary.hpp"
#include "qpv/protocol.hpp"
#include "qpv/random.hpp"

namespace qpv {

enum class Scenario { honest = 0, guess = 1, swap_and_forward = 2, bounded_rounds = 3 };

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::honest:
            return "honest";
        case Scenario::guess:
            return "guess";
        case Scenario::swap_and_forward:
            return "swap-and-forward";
        case Scenario::bounded_rounds:
            return "bounded-rounds";
    }
    return "?";
}

inline Scenario parse_scenario(std::string_view s) {
    if (s == "honest") {
        return Scenario::honest;
    }
    if (s == "guess") {
        return Scenario::guess;
    }
    if (s == "swap-and-forward" || s == "swap_and_forward") {
        return Scenario::swap_and_forward;
    }
    if (s == "bounded-rounds" || s == "bounded_rounds") {
        return Scenario::bounded_rounds;
    }
    throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

struct ExperimentSpec {
    Scenario scenario = Scenario::guess;
    std::vector<std::size_t> n_list{4};
    std::size_t trials = 10000;
    std::uint64_t master_seed = 0;
    std::string output_path;
    /// Template for every trial; n is overwritten per row.
    ProtocolConfig base;
    double delta = 0.1;
    std::size_t rounds = 1;
    /// 0: one worker per available processor.
    unsigned workers = 0;

    void validate() const {
        if (trials < 1) {
            throw ConfigError("trials must be at least 1");
        }
        if (n_list.empty()) {
            throw ConfigError("n list must not be empty");
        }
        for (std::size_t n : n_list) {
            ProtocolConfig c = base;
            c.n = n;
            c.challenge_states.clear();
            c.bell_labels_v1.clear();
            c.bell_labels_v2.clear();
            if (scenario == Scenario::honest) {
                c.validate();
            } else {
                attack_config(n).validate();
            }
        }
    }

    ProtocolConfig protocol_config(std::size_t n) const {
        ProtocolConfig c = base;
        c.n = n;
        if (c.challenge_states.size() != n) {
            c.challenge_states.clear();
        }
        if (c.bell_labels_v1.size() != n) {
            c.bell_labels_v1.clear();
        }
        if (c.bell_labels_v2.size() != n) {
            c.bell_labels_v2.clear();
        }
        return c;
    }

    AttackConfig attack_config(std::size_t n) const {
        AttackConfig a;
        a.base = protocol_config(n);
        a.delta = delta;
        a.rounds = rounds;
        switch (scenario) {
            case Scenario::guess:
                a.strategy = StrategyKind::guess;
                break;
            case Scenario::swap_and_forward:
                a.strategy = StrategyKind::swap_and_forward;
                break;
            case Scenario::bounded_rounds:
                a.strategy = StrategyKind::bounded_rounds;
                break;
            case Scenario::honest:
                throw ConfigError("honest scenario has no attack configuration");
        }
        return a;
    }
};

/// Acceptance probability the model predicts: 1 for the honest prover, 2^-n
/// for guessing colluders, 0 for strategies that can only answer late.
inline double expected_acceptance(Scenario s, std::size_t n) {
    switch (s) {
        case Scenario::honest:
            return 1.0;
        case Scenario::guess:
            return std::ldexp(1.0, -static_cast<int>(n));
        case Scenario::swap_and_forward:
        case Scenario::bounded_rounds:
            return 0.0;
    }
    return 0.0;
}

struct ExperimentRow {
    std::string scenario;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t accepted = 0;
    double acceptance_rate = 0.0;
    double detection_rate = 0.0;
    double sigma = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double bound = 0.0;
    double expected_detection = 0.0;
    bool pass = false;

    friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;

    bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const ExperimentRow& r) { return r.pass; });
    }

    friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

/// Row statistics. sigma is the binomial standard deviation of the rate under
/// the model value; pass iff |detection - expected| <= 3 sigma.
inline ExperimentRow make_row(Scenario s, std::size_t n, std::size_t trials, std::size_t accepted) {
    ExperimentRow r;
    r.scenario = to_string(s);
    r.n = n;
    r.trials = trials;
    r.accepted = accepted;
    r.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(trials);
    r.detection_rate = 1.0 - r.acceptance_rate;
    const double p = expected_acceptance(s, n);
    r.sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    r.ci_low = r.detection_rate - 3.0 * r.sigma;
    r.ci_high = r.detection_rate + 3.0 * r.sigma;
    r.bound = 1.0 - std::ldexp(1.0, -static_cast<int>(n));
    r.expected_detection = 1.0 - p;
    r.pass = std::abs(r.detection_rate - r.expected_detection) <= 3.0 * r.sigma + 1e-12;
    return r;
}

/// One trial with logging off. Throws with context on failure.
inline bool trial_accepted(const ExperimentSpec& spec, std::size_t n, std::uint64_t seed) {
    if (spec.scenario == Scenario::honest) {
        const RunResult r = run_honest(spec.protocol_config(n), seed, false);
        if (!r.audit.empty()) {
            throw CausalityViolation(r.audit.front());
        }
        return r.verdict.accepted;
    }
    const AttackOutcome o = run_attack(spec.attack_config(n), seed, false);
    if (!o.run.audit.empty()) {
        throw CausalityViolation(o.run.audit.front());
    }
    return o.verdict.accepted;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    unsigned workers = spec.workers ? spec.workers : std::max(1U, std::thread::hardware_concurrency());
    ExperimentResult result;
    for (std::size_t n : spec.n_list) {
        const auto scenario_id = static_cast<std::uint64_t>(spec.scenario);
        std::vector<std::size_t> accepted(workers, 0);
        std::vector<std::string> errors(workers);
        std::atomic<bool> failed{false};
        auto work = [&](unsigned w) {
            for (std::size_t t = w; t < spec.trials && !failed.load(std::memory_order_relaxed); t += workers) {
                const std::uint64_t seed = derive_seed(spec.master_seed, scenario_id, n, t);
                try {
                    accepted[w] += trial_accepted(spec, n, seed) ? 1 : 0;
                } catch (const std::exception& e) {
                    errors[w] = to_string(spec.scenario) + " n=" + std::to_string(n) + " trial=" + std::to_string(t) +
                                " seed=" + std::to_string(seed) + ": " + e.what();
                    failed = true;
                    return;
                }
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back(work, w);
            }
            for (auto& th : pool) {
                th.join();
            }
        }
        for (const auto& e : errors) {
            if (!e.empty()) {
                throw std::runtime_error("trial failed: " + e);
            }
        }
        std::size_t total = 0;
        for (std::size_t a : accepted) {
            total += a;
        }
        result.rows.push_back(make_row(spec.scenario, n, spec.trials, total));
    }
    return result;
}

enum class ReportFormat { json, csv };

inline ReportFormat parse_format(std::string_view s) {
    if (s == "json") {
        return ReportFormat::json;
    }
    if (s == "csv") {
        return ReportFormat::csv;
    }
    throw ConfigError("unknown report format '" + std::string(s) + "' (expected json or csv)");
}

namespace detail {

inline std::string sig12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double round12(double v) { return std::stod(sig12(v)); }

}  // namespace detail

inline constexpr const char* kReportColumns[] = {"scenario", "n",      "trials",  "accepted",
                                                 "acceptance_rate", "detection_rate", "sigma", "ci_low",
                                                 "ci_high", "bound", "expected_detection", "pass"};

/// The result as it reads back from a report: floats at 12 significant digits.
inline ExperimentResult canonical(ExperimentResult r) {
    for (auto& row : r.rows) {
        for (double* f : {&row.acceptance_rate, &row.detection_rate, &row.sigma, &row.ci_low, &row.ci_high,
                          &row.bound, &row.expected_detection}) {
            *f = detail::round12(*f);
        }
    }
    return r;
}

inline std::string to_csv(const ExperimentResult& r) {
    std::string out;
    for (std::size_t c = 0; c < std::size(kReportColumns); ++c) {
        out += (c ? "," : "");
        out += kReportColumns[c];
    }
    out += '\n';
    using detail::sig12;
    for (const auto& row : r.rows) {
        out += row.scenario + "," + std::to_string(row.n) + "," + std::to_string(row.trials) + "," +
               std::to_string(row.accepted) + "," + sig12(row.acceptance_rate) + "," + sig12(row.detection_rate) +
               "," + sig12(row.sigma) + "," + sig12(row.ci_low) + "," + sig12(row.ci_high) + "," + sig12(row.bound) +
               "," + sig12(row.expected_detection) + "," + (row.pass ? "true" : "false") + "\n";
    }
    return out;
}

inline std::string to_json_report(const ExperimentResult& r) {
    nlohmann::ordered_json doc;
    doc["rows"] = nlohmann::ordered_json::array();
    using detail::round12;
    for (const auto& row : r.rows) {
        nlohmann::ordered_json j;
        j["scenario"] = row.scenario;
        j["n"] = row.n;
        j["trials"] = row.trials;
        j["accepted"] = row.accepted;
        j["acceptance_rate"] = round12(row.acceptance_rate);
        j["detection_rate"] = round12(row.detection_rate);
        j["sigma"] = round12(row.sigma);
        j["ci_low"] = round12(row.ci_low);
        j["ci_high"] = round12(row.ci_high);
        j["bound"] = round12(row.bound);
        j["expected_detection"] = round12(row.expected_detection);
        j["pass"] = row.pass;
        doc["rows"].push_back(j);
    }
    doc["all_pass"] = r.all_pass();
    return doc.dump(2) + "\n";
}

inline std::string render_report(const ExperimentResult& r, ReportFormat f) {
    return f == ReportFormat::json ? to_json_report(r) : to_csv(r);
}

inline ExperimentResult parse_csv_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty report");
    }
    ExperimentResult r;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != std::size(kReportColumns)) {
            throw std::runtime_error("malformed report row: " + line);
        }
        ExperimentRow row;
        row.scenario = f[0];
        row.n = std::stoull(f[1]);
        row.trials = std::stoull(f[2]);
        row.accepted = std::stoull(f[3]);
        row.acceptance_rate = std::stod(f[4]);
        row.detection_rate = std::stod(f[5]);
        row.sigma = std::stod(f[6]);
        row.ci_low = std::stod(f[7]);
        row.ci_high = std::stod(f[8]);
        row.bound = std::stod(f[9]);
        row.expected_detection = std::stod(f[10]);
        row.pass = f[11] == "true";
        r.rows.push_back(row);
    }
    return r;
}

inline ExperimentResult parse_json_report(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    ExperimentResult r;
    for (const auto& j : doc.at("rows")) {
        ExperimentRow row;
        row.scenario = j.at("scenario").get<std::string>();
        row.n = j.at("n").get<std::size_t>();
        row.trials = j.at("trials").get<std::size_t>();
        row.accepted = j.at("accepted").get<std::size_t>();
        row.acceptance_rate = j.at("acceptance_rate").get<double>();
        row.detection_rate = j.at("detection_rate").get<double>();
        row.sigma = j.at("sigma").get<double>();
        row.ci_low = j.at("ci_low").get<double>();
        row.ci_high = j.at("ci_high").get<double>();
        row.bound = j.at("bound").get<double>();
        row.expected_detection = j.at("expected_detection").get<double>();
        row.pass = j.at("pass").get<bool>();
        r.rows.push_back(row);
    }
    return r;
}

inline ExperimentResult parse_report(const std::string& text, ReportFormat f) {
    return f == ReportFormat::json ? parse_json_report(text) : parse_csv_report(text);
}

inline void write_report(const ExperimentResult& r, ReportFormat f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open report file " + path);
    }
    out << render_report(r, f);
    if (!out) {
        throw std::runtime_error("failed writing report file " + path);
    }
}

}  // namespace qpv

#endif  // QPV_ANALYSIS_HPP
