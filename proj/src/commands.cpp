#include "qmsg/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qmsg/instance_io.hpp"
#include "qmsg/learner.hpp"
#include "qmsg/measures.hpp"
#include "qmsg/oracle.hpp"
#include "qmsg/proofs.hpp"
#include "qmsg/sampling.hpp"

namespace qmsg {

namespace {

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Accumulates the report so it can be written in one deterministic piece.
class Report {
public:
    Report(const ExperimentConfig& cfg) {
        line("# qmsg report");
        std::string header = "# command=" + cfg.command;
        if (!cfg.instance_path.empty()) header += " instance=" + cfg.instance_path;
        if (cfg.seed_set) header += " seed=" + std::to_string(cfg.seed);
        line(header);
        line(std::string("# rng=") + kRngAlgorithmId);
    }

    void line(const std::string& text) { body_ += text + "\n"; }

    void metric(const std::string& name, double value) {
        line(name + "," + format_metric(value));
    }
    void metric(const std::string& name, std::size_t value) {
        line(name + "," + std::to_string(value));
    }
    void metric(const std::string& name, const std::string& value) { line(name + "," + value); }

    const std::string& text() const { return body_; }

private:
    std::string body_;
};

void emit(const Report& report, const ExperimentConfig& cfg, std::ostream& console) {
    if (cfg.output_path.empty()) {
        console << report.text();
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report to " + cfg.output_path);
    out << report.text();
}

std::string replay_path(const ExperimentConfig& cfg) {
    return cfg.output_path.empty() ? cfg.command + ".replay" : cfg.output_path + ".replay";
}

void write_replay_file(const ExperimentConfig& cfg, const std::string& body,
                       std::ostream& console) {
    const std::string path = replay_path(cfg);
    std::ofstream out(path, std::ios::binary);
    if (out) {
        out << body;
        console << "replay file written to " << path << "\n";
    }
}

std::string replay_header(const std::map<std::string, std::string>& keys) {
    std::string out = "[replay]\n";
    for (const auto& [key, value] : keys) out += key + " " + value + "\n";
    return out;
}

// ---------------------------------------------------------------- entropy

constexpr double kSweepSlack = 1e-9;

struct EntropyTrialDetail {
    EntropyTrialOutcome outcome;
    std::string note;
};

EntropyTrialDetail run_entropy_trial_detailed(std::uint64_t seed, std::size_t trial) {
    Xoshiro256StarStar rng(mix_seed(seed, trial));
    const std::size_t d = std::size_t{2} << rng.uniform_below(3);
    const bool identical_pair = trial % 8 == 7;
    const DensityMatrix rho =
        trial % 4 == 0 ? random_pure_density(d, rng) : random_density(d, rng);
    const DensityMatrix sigma = identical_pair ? rho : random_density(d, rng);
    const Projector proj = random_projector(d, 1 + rng.uniform_below(d - 1), rng);

    EntropyTrialDetail detail;
    EntropyTrialOutcome& out = detail.outcome;
    const EntropyValue rel = relative_entropy(rho, sigma);
    if (rel.is_infinite()) {
        detail.note = "relative entropy unexpectedly infinite";
        return detail;
    }
    const double s = rel.bits();
    const double distance = trace_distance(rho, sigma);

    out.pinsker = distance <= std::sqrt(2.0 * std::log(2.0) * s) + kSweepSlack;
    if (!out.pinsker) detail.note = "pinsker";

    const EntropyValue pinched = relative_entropy(pinch(rho, proj), pinch(sigma, proj));
    out.uhlmann = !pinched.is_infinite() && pinched.bits() <= s + kSweepSlack;
    if (!out.uhlmann && detail.note.empty()) detail.note = "uhlmann";

    const EntropyValue min_ent = relative_min_entropy(rho, sigma);
    out.ordering = !min_ent.is_infinite() && s <= min_ent.bits() + kSweepSlack;
    if (!out.ordering && detail.note.empty()) detail.note = "ordering";

    // Nonnegativity is enforced by EntropyValue (negative values throw);
    // here the equality case must coincide with closeness in trace distance.
    out.klein = (s <= 1e-9) == (distance <= 1e-6);
    if (!out.klein && detail.note.empty()) detail.note = "klein";
    return detail;
}

// ------------------------------------------------------------------ learn

int command_learn(const ExperimentConfig& cfg, std::ostream& console) {
    const Instance parsed = parse_instance_file(cfg.instance_path);
    const auto* inst = std::get_if<ProtocolInstance>(&parsed);
    if (!inst)
        throw ParseError(cfg.instance_path + ": learn expects a protocol instance file");
    if (inst->protocol.dim() > cfg.dim_cap)
        throw std::invalid_argument("learn: instance dimension " +
                                    std::to_string(inst->protocol.dim()) +
                                    " exceeds --dim-cap " + std::to_string(cfg.dim_cap));

    const LearnerConfig learner_cfg(cfg.epsilon_override.value_or(inst->protocol.epsilon));

    Report report(cfg);
    report.line("# per-x table");
    report.line("x,records,message_bits,updates,audit_pass");

    bool all_pass = true;
    std::string failure_note;
    std::string audit_table;
    DeterministicProtocol det =
        compile_deterministic_protocol(inst->protocol, inst->function, learner_cfg);
    for (std::size_t x = 0; x < inst->function.x_count(); ++x) {
        const LearningRun run = run_learning(inst->protocol, inst->function, x, learner_cfg);
        const AuditReport audit = audit_progress(run, learner_cfg);
        if (!audit.passed) {
            all_pass = false;
            if (failure_note.empty())
                failure_note = "audit failed at x=" + std::to_string(x) + ": " +
                               audit.first_failure;
        }
        report.line(std::to_string(x) + "," + std::to_string(run.transcript.size()) + "," +
                    std::to_string(det.message_bits[x]) + "," +
                    std::to_string(run.updates.size()) + "," +
                    (audit.passed ? "1" : "0"));
        for (const AuditLine& line : audit.lines)
            audit_table += std::to_string(x) + "," + std::to_string(line.update_index) + "," +
                           line.step + "," + format_metric(line.lhs) + "," +
                           format_metric(line.rhs) + "," + (line.passed ? "1" : "0") + "\n";
    }

    report.line("# audit table");
    report.line("x,update,step,lhs,rhs,pass");
    if (!audit_table.empty()) {
        audit_table.pop_back();  // Report::line appends the newline
        report.line(audit_table);
    }

    const ValidationResult validation = validate_compiled(det, inst->function);
    const OneWayCost oracle_cost = exact_one_way_cost(inst->function, cfg.exact_limit);
    const std::size_t distinct = distinct_message_count(det);

    report.line("# summary");
    report.line("metric,value");
    report.metric("cost_bits", det.cost_bits);
    report.metric("cost_bound_bits", det.cost_bound_bits);
    report.metric("distinct_messages", distinct);
    report.metric("oracle_messages", oracle_cost.messages);
    report.metric("oracle_bits", oracle_cost.bits);
    report.metric("oracle_exact", oracle_cost.exact ? std::size_t{1} : std::size_t{0});
    report.metric("compiled_matches_function", validation.ok ? std::size_t{1} : std::size_t{0});

    if (!validation.ok) {
        all_pass = false;
        failure_note = "compiled protocol disagrees at x=" +
                       std::to_string(validation.counterexample->first) + ", y=" +
                       std::to_string(validation.counterexample->second);
    }
    if (oracle_cost.exact && oracle_cost.messages > distinct) {
        all_pass = false;
        failure_note = "oracle lower bound exceeds the compiled message count";
    }
    if (static_cast<double>(det.cost_bits) > det.cost_bound_bits) {
        all_pass = false;
        failure_note = "compiled cost exceeds the transcript-length bound";
    }

    report.metric("pass", all_pass ? std::size_t{1} : std::size_t{0});
    emit(report, cfg, console);
    if (!all_pass) {
        console << "learn: " << failure_note << "\n";
        write_replay_file(cfg,
                          replay_header({{"command", "learn"},
                                         {"epsilon", format_metric(learner_cfg.epsilon())}}) +
                              serialize(parsed),
                          console);
        return kExitInvariantFailure;
    }
    return kExitPass;
}

// ------------------------------------------------------------------ majix

int command_majix(const ExperimentConfig& cfg, std::ostream& console) {
    if (!cfg.seed_set) throw std::invalid_argument("majix: --seed is required");
    const Instance parsed = parse_instance_file(cfg.instance_path);
    const auto* inst = std::get_if<MajIxInstance>(&parsed);
    if (!inst) throw ParseError(cfg.instance_path + ": majix expects a [majix] instance file");
    if (inst->n > cfg.dim_cap)
        throw std::invalid_argument("majix: n = " + std::to_string(inst->n) +
                                    " exceeds --dim-cap " + std::to_string(cfg.dim_cap));

    const std::size_t trials = cfg.trials == 0 ? 10000 : cfg.trials;
    const CellValue value = majix_value(*inst);
    const std::size_t ones = inst->ones_inside();
    const double root = std::sqrt(static_cast<double>(inst->n));
    const double honest = majix_acceptance(*inst, majix_honest_proof(*inst));
    const MajIxCheat cheat = majix_optimal_cheat(*inst);

    std::size_t accepted = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Xoshiro256StarStar rng(mix_seed(cfg.seed, t));
        accepted += static_cast<std::size_t>(majix_bob_to_alice(*inst, cfg.reps, rng));
    }
    const double empirical = static_cast<double>(accepted) / static_cast<double>(trials);
    const double single_shot = static_cast<double>(ones) / root;
    const double rep_bound = std::pow(0.9, static_cast<double>(cfg.reps));

    Report report(cfg);
    report.line("# summary");
    report.line("metric,value");
    report.metric("n", inst->n);
    report.metric("ones_inside", ones);
    report.metric("value", value == CellValue::One   ? std::string("1")
                           : value == CellValue::Zero ? std::string("0")
                                                      : std::string("*"));
    report.metric("honest_acceptance", honest);
    report.metric("cheat_value", cheat.value);
    report.metric("cheat_closed_form", cheat.closed_form);
    report.metric("soundness_bound", 0.9);
    report.line("# monte-carlo");
    report.line("seed,n,k,reps,trials,empirical_acceptance");
    report.line(std::to_string(cfg.seed) + "," + std::to_string(inst->n) + "," +
                std::to_string(ones) + "," + std::to_string(cfg.reps) + "," +
                std::to_string(trials) + "," + format_metric(empirical));

    bool pass = true;
    std::string note;
    if (value == CellValue::One) {
        if (std::abs(honest - 1.0) > 1e-9) {
            pass = false;
            note = "completeness is not 1 on a 1-input";
        }
        if (pass && empirical != 1.0) {
            pass = false;
            note = "sampling protocol rejected a 1-input";
        }
    }
    if (value == CellValue::Zero) {
        if (cheat.value > 0.9 + 1e-9) {
            pass = false;
            note = "cheating optimum exceeds the 0.9 soundness bound";
        }
        const double sigma_hat =
            std::sqrt(rep_bound * (1.0 - rep_bound) / static_cast<double>(trials));
        if (pass && empirical > rep_bound + 3.0 * sigma_hat) {
            pass = false;
            note = "empirical acceptance exceeds the repetition bound";
        }
    }
    if (std::abs(single_shot - cheat.closed_form) > 1e-12) {
        pass = false;
        note = "closed-form bookkeeping mismatch";
    }
    report.metric("pass", pass ? std::size_t{1} : std::size_t{0});
    emit(report, cfg, console);
    if (!pass) {
        console << "majix: " << note << "\n";
        write_replay_file(cfg,
                          replay_header({{"command", "majix"},
                                         {"seed", std::to_string(cfg.seed)},
                                         {"reps", std::to_string(cfg.reps)},
                                         {"trials", std::to_string(trials)}}) +
                              serialize(parsed),
                          console);
        return kExitInvariantFailure;
    }
    return kExitPass;
}

// -------------------------------------------------------------------- lsd

int command_lsd(const ExperimentConfig& cfg, std::ostream& console) {
    const Instance parsed = parse_instance_file(cfg.instance_path);
    const auto* inst = std::get_if<LsdInstance>(&parsed);
    if (!inst) throw ParseError(cfg.instance_path + ": lsd expects an [lsd] instance file");

    const double distance = lsd_distance(*inst);
    const double cos_theta = lsd_top_singular_value(*inst);
    const LsdOptimum best = lsd_optimal_proof(*inst);
    const double replayed = lsd_protocol(*inst, best.proof);
    const double close_cut = 0.1 * std::sqrt(2.0);
    const double far_cut = 0.9 * std::sqrt(2.0);
    const std::string promise =
        distance <= close_cut ? "close" : distance >= far_cut ? "far" : "outside";

    Report report(cfg);
    report.line("metric,value");
    report.metric("dim", inst->dim);
    report.metric("distance", distance);
    report.metric("cos_theta1", cos_theta);
    report.metric("optimal_acceptance", best.value);
    report.metric("optimal_acceptance_replayed", replayed);
    report.metric("promise", promise);

    bool pass = true;
    std::string note;
    if (std::abs(best.value - cos_theta * cos_theta) > 1e-9) {
        pass = false;
        note = "optimal acceptance is not cos^2(theta_1)";
    }
    if (std::abs(replayed - best.value) > 1e-9) {
        pass = false;
        note = "protocol simulation disagrees with the eigen optimum";
    }
    if (promise == "close" && best.value < 0.98) {
        pass = false;
        note = "close instance accepted below 0.98";
    }
    if (promise == "far" && best.value > 0.0361 + 1e-9) {
        pass = false;
        note = "far instance accepted above 0.0361";
    }
    report.metric("pass", pass ? std::size_t{1} : std::size_t{0});
    emit(report, cfg, console);
    if (!pass) {
        console << "lsd: " << note << "\n";
        write_replay_file(cfg, replay_header({{"command", "lsd"}}) + serialize(parsed), console);
        return kExitInvariantFailure;
    }
    return kExitPass;
}

// ---------------------------------------------------------- entropy-check

int command_entropy_check(const ExperimentConfig& cfg, std::ostream& console) {
    if (!cfg.seed_set) throw std::invalid_argument("entropy-check: --seed is required");
    const std::size_t trials = cfg.trials == 0 ? 1000 : cfg.trials;
    const EntropySweepResult result = run_entropy_sweeps(cfg.seed, trials);

    Report report(cfg);
    report.line("check,trials,failures");
    report.line("pinsker," + std::to_string(trials) + "," +
                std::to_string(result.pinsker_failures));
    report.line("uhlmann," + std::to_string(trials) + "," +
                std::to_string(result.uhlmann_failures));
    report.line("ordering," + std::to_string(trials) + "," +
                std::to_string(result.ordering_failures));
    report.line("klein," + std::to_string(trials) + "," +
                std::to_string(result.klein_failures));
    emit(report, cfg, console);

    if (!result.passed()) {
        const std::size_t trial = *result.first_failed_trial;
        const EntropyTrialDetail detail = run_entropy_trial_detailed(cfg.seed, trial);
        console << "entropy-check: trial " << trial << " failed (" << detail.note << ")\n";
        write_replay_file(cfg,
                          replay_header({{"command", "entropy-check"},
                                         {"seed", std::to_string(cfg.seed)},
                                         {"trial", std::to_string(trial)}}),
                          console);
        return kExitInvariantFailure;
    }
    return kExitPass;
}

// ----------------------------------------------------------------- oracle

int command_oracle(const ExperimentConfig& cfg, std::ostream& console) {
    const Instance parsed = parse_instance_file(cfg.instance_path);
    const auto* f = std::get_if<PartialFunction>(&parsed);
    if (!f) throw ParseError(cfg.instance_path + ": oracle expects a [function] instance file");

    const ConflictGraph graph = distinct_rows(*f);
    const OneWayCost cost = exact_one_way_cost(*f, cfg.exact_limit);

    Report report(cfg);
    report.line("metric,value");
    report.metric("rows", f->x_count());
    report.metric("cols", f->y_count());
    report.metric("defined_cells", f->defined_count());
    report.metric("conflict_edges", graph.edge_count());
    report.metric("messages", cost.messages);
    report.metric("bits", cost.bits);
    report.metric("exact", cost.exact ? std::size_t{1} : std::size_t{0});
    emit(report, cfg, console);
    return kExitPass;
}

// ----------------------------------------------------------------- replay

std::map<std::string, std::string> split_replay_section(std::string& text) {
    std::istringstream stream(text);
    std::string line;
    std::string rest;
    std::map<std::string, std::string> keys;
    bool in_replay = false;
    while (std::getline(stream, line)) {
        std::istringstream tokens(line);
        std::string first;
        tokens >> first;
        if (first == "[replay]") {
            in_replay = true;
            continue;
        }
        if (!first.empty() && first.front() == '[') in_replay = false;
        if (in_replay && !first.empty() && first.front() != '#') {
            std::string value;
            tokens >> value;
            keys[first] = value;
            continue;
        }
        rest += line + "\n";
    }
    text = rest;
    return keys;
}

int command_replay(const ExperimentConfig& cfg, std::ostream& console) {
    std::ifstream in(cfg.instance_path);
    if (!in) throw ParseError(cfg.instance_path + ": cannot open replay file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    const auto keys = split_replay_section(text);
    const auto it = keys.find("command");
    if (it == keys.end()) throw ParseError(cfg.instance_path + ": replay file names no command");

    ExperimentConfig inner = cfg;
    inner.command = it->second;
    inner.output_path.clear();

    if (inner.command == "entropy-check") {
        const std::uint64_t seed = std::stoull(keys.at("seed"));
        const std::size_t trial = std::stoull(keys.at("trial"));
        const EntropyTrialDetail detail = run_entropy_trial_detailed(seed, trial);
        console << "replay entropy-check seed=" << seed << " trial=" << trial << ": "
                << (detail.outcome.all() ? "pass" : "fail (" + detail.note + ")") << "\n";
        return detail.outcome.all() ? kExitPass : kExitInvariantFailure;
    }

    // The remaining commands replay from the embedded instance text.
    const std::string temp_path = cfg.instance_path + ".instance";
    {
        std::ofstream out(temp_path, std::ios::binary);
        out << text;
    }
    inner.instance_path = temp_path;
    if (keys.count("seed")) {
        inner.seed = std::stoull(keys.at("seed"));
        inner.seed_set = true;
    }
    if (keys.count("reps")) inner.reps = std::stoull(keys.at("reps"));
    if (keys.count("trials")) inner.trials = std::stoull(keys.at("trials"));
    if (keys.count("epsilon")) inner.epsilon_override = std::stod(keys.at("epsilon"));
    const int status = run_command(inner, console);
    std::remove(temp_path.c_str());
    return status;
}

}  // namespace

EntropyTrialOutcome run_entropy_trial(std::uint64_t seed, std::size_t trial) {
    return run_entropy_trial_detailed(seed, trial).outcome;
}

EntropySweepResult run_entropy_sweeps(std::uint64_t seed, std::size_t trials) {
    EntropySweepResult result;
    result.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        const EntropyTrialOutcome outcome = run_entropy_trial(seed, t);
        if (!outcome.pinsker) ++result.pinsker_failures;
        if (!outcome.uhlmann) ++result.uhlmann_failures;
        if (!outcome.ordering) ++result.ordering_failures;
        if (!outcome.klein) ++result.klein_failures;
        if (!outcome.all() && !result.first_failed_trial) result.first_failed_trial = t;
    }
    return result;
}

int run_command(const ExperimentConfig& cfg, std::ostream& console) {
    try {
        if (cfg.command == "learn") return command_learn(cfg, console);
        if (cfg.command == "majix") return command_majix(cfg, console);
        if (cfg.command == "lsd") return command_lsd(cfg, console);
        if (cfg.command == "entropy-check") return command_entropy_check(cfg, console);
        if (cfg.command == "oracle") return command_oracle(cfg, console);
        if (cfg.command == "replay") return command_replay(cfg, console);
        console << "unknown command '" << cfg.command << "'\n";
        return kExitInputError;
    } catch (const ParseError& e) {
        console << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        console << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        console << "invariant failure: " << e.what() << "\n";
        return kExitInvariantFailure;
    }
}

}  // namespace qmsg
