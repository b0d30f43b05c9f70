#include <CLI11.hpp>

#include <iostream>

#include "qmsg/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale toolkit for one-way quantum message protocols: the guess-update "
                 "compiler with its progress audit, the exact deterministic oracle, and the "
                 "MajIx / LSD proof-verification protocols."};
    app.require_subcommand(1);

    qmsg::ExperimentConfig cfg;

    auto add_common = [&cfg](CLI::App* sub, bool needs_instance) {
        if (needs_instance)
            sub->add_option("instance", cfg.instance_path, "instance file")->required();
        sub->add_option("--seed", cfg.seed, "64-bit RNG seed");
        sub->add_option("--out", cfg.output_path, "report file (stdout when omitted)");
        sub->add_option("--trials", cfg.trials, "trial count (command-specific default)");
        sub->add_option("--dim-cap", cfg.dim_cap, "instance dimension cap");
        sub->add_option("--exact-limit", cfg.exact_limit, "row cap for exact coloring");
    };

    CLI::App* learn = app.add_subcommand(
        "learn", "compile a quantum protocol into a deterministic one and audit every update");
    add_common(learn, true);
    double epsilon_override = 0.0;
    learn->add_option("--epsilon", epsilon_override, "override the learner error bound");

    CLI::App* majix = app.add_subcommand(
        "majix", "completeness, cheating optimum, and the sampled B-to-A protocol");
    add_common(majix, true);
    majix->add_option("--reps", cfg.reps, "repetitions of the sampling protocol");

    CLI::App* lsd = app.add_subcommand("lsd", "subspace distance and proof acceptance");
    add_common(lsd, true);

    CLI::App* entropy = app.add_subcommand("entropy-check",
                                           "Pinsker/Uhlmann/ordering/Klein inequality sweeps");
    add_common(entropy, false);

    CLI::App* oracle =
        app.add_subcommand("oracle", "exact one-way cost from the conflict graph");
    add_common(oracle, true);

    CLI::App* replay = app.add_subcommand("replay", "re-run a failure's replay file");
    add_common(replay, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? qmsg::kExitPass : qmsg::kExitInputError;
    }

    for (CLI::App* sub : {learn, majix, lsd, entropy, oracle, replay}) {
        if (!sub->parsed()) continue;
        cfg.command = sub->get_name();
        cfg.seed_set = sub->count("--seed") > 0;
    }
    if (learn->parsed() && learn->count("--epsilon") > 0) cfg.epsilon_override = epsilon_override;

    return qmsg::run_command(cfg, std::cout);
}
