#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "qklab/experiment.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

qklab::ExperimentConfig load_config(const CommonOpts& o) {
    qklab::ExperimentConfig cfg =
        o.config.empty() ? qklab::ExperimentConfig{} : qklab::ExperimentConfig::from_file(o.config);
    if (o.seed_set) cfg.seed = o.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "key=value config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "override the config seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
}

int report(const qklab::ExperimentSummary& sum, const std::string& what) {
    if (sum.ok) {
        std::cout << what << ": ok\n";
        return 0;
    }
    std::cerr << what << ": FAILED\n";
    for (const std::string& f : sum.failures) std::cerr << "  - " << f << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qklab: quasi-Kahler deformation laboratory on T^2 x M"};
    app.require_subcommand(1);

    CommonOpts hOpts, sOpts, lOpts, wOpts, pOpts;
    CLI::App* cmdH = app.add_subcommand("verify-hormander",
                                        "certify full bracket rank at sampled points");
    CLI::App* cmdS = app.add_subcommand("singular-set",
                                        "locate the zero locus of W");
    CLI::App* cmdL = app.add_subcommand("lambda1",
                                        "full pipeline: deform the metric and bound lambda1");
    CLI::App* cmdW = app.add_subcommand("sweep",
                                        "lambda1 and norms across a phi_max schedule");
    CLI::App* cmdP = app.add_subcommand("poincare",
                                        "empirical vs exact Poincare constant at p=q=2");
    add_common(cmdH, hOpts);
    add_common(cmdS, sOpts);
    add_common(cmdL, lOpts);
    add_common(cmdW, wOpts);
    add_common(cmdP, pOpts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmdH->parsed())
            return report(qklab::run_hormander(load_config(hOpts), hOpts.out), "verify-hormander");
        if (cmdS->parsed())
            return report(qklab::run_singular(load_config(sOpts), sOpts.out), "singular-set");
        if (cmdL->parsed())
            return report(qklab::run_experiment(load_config(lOpts), lOpts.out), "lambda1");
        if (cmdW->parsed())
            return report(qklab::run_sweep(load_config(wOpts), wOpts.out), "sweep");
        if (cmdP->parsed())
            return report(qklab::run_poincare(load_config(pOpts), pOpts.out), "poincare");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
