#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qklab/construction.hpp"
#include "qklab/hormander.hpp"

namespace qklab {

/// Flat key=value experiment configuration. Unknown keys are errors.
struct ExperimentConfig {
    std::string preset = "t4-d1";
    int grid_n = 16;                      // nodes per axis of the main grid
    std::vector<double> phi_max = {4.0};  // strictly increasing for sweeps
    double delta = 0.39269908169872414;   // pi/8
    double p = 1.8;
    double eig_tol = 1e-8;
    int eig_max_iter = 5000;
    std::uint64_t seed = 1;
    int test_functions = 100;
    int bracket_depth = 6;
    int hormander_lattice = 2000;
    int hormander_grid_n = 4;             // auxiliary grid mixed into rank samples
    double sv_tol = 1e-6;
    double singular_tol = 1e-8;

    static ExperimentConfig from_file(const std::string& path);
    void validate() const;
    std::string to_json() const;
};

struct SweepRow {
    double phi_max;
    double delta;
    double inv_phi_norm;
    double K;
    double lambda1;
    int iterations;
    double residual;
    double chain_min_slack;
    int chain_violations;
};

struct ExperimentSummary {
    ExperimentConfig config;
    double isotropy_max = 0.0;
    RankReport hormander;
    int bracket_count = 0;
    SingularReport singular;
    double max_det_defect = 0.0;
    std::vector<SweepRow> rows;
    bool ok = false;
    std::vector<std::string> failures;

    std::string to_json() const;
};

/// Full pipeline: construction, isotropy, singular set, Hoermander
/// certification, then bump/metric/assembly/lambda1/chain per phi_max.
/// Writes summary.json under outDir. `ok` is true iff every invariant
/// check passed.
ExperimentSummary run_experiment(const ExperimentConfig& config, const std::string& outDir);

/// phi_max sweep: writes sweep.csv and summary.json under outDir;
/// records monotonicity violations (lambda1 strictly increasing,
/// inv_phi_norm strictly decreasing) in `failures`.
ExperimentSummary run_sweep(const ExperimentConfig& config, const std::string& outDir);

/// Hoermander certification only; writes hormander.json.
ExperimentSummary run_hormander(const ExperimentConfig& config, const std::string& outDir);

/// Singular-set detection only; writes summary.json.
ExperimentSummary run_singular(const ExperimentConfig& config, const std::string& outDir);

/// p=q=2 Poincare constant plus test-function table; writes poincare.csv
/// and summary.json.
ExperimentSummary run_poincare(const ExperimentConfig& config, const std::string& outDir);

} // namespace qklab
