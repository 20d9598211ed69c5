#include "qklab/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "qklab/assemble.hpp"
#include "qklab/eigensolve.hpp"
#include "qklab/poincare.hpp"
#include "qklab/quasikahler.hpp"

namespace qklab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(trim(item)));
    return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir + "/" + name);
    if (!os) throw std::runtime_error("cannot write " + dir + "/" + name);
    os << body;
}

struct Stage {
    // wraps a pipeline step so failures carry the stage name
    template <typename F>
    static auto run(const std::string& name, F&& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            throw std::runtime_error("stage '" + name + "': " + e.what());
        }
    }
};

nlohmann::json singular_json(const SingularReport& s) {
    return {
        {"generic_dim", s.generic_dim},
        {"empty", s.empty},
        {"x_roots", s.x_roots},
        {"grid_fraction", s.grid_fraction},
        {"fibers_checked", s.fibers_checked},
        {"newton_fallbacks", s.newton_fallbacks},
        {"max_root_residual", s.max_root_residual},
    };
}

} // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(stripped.substr(0, eq));
        std::string val = trim(stripped.substr(eq + 1));
        if (key == "preset") c.preset = val;
        else if (key == "grid_n") c.grid_n = std::stoi(val);
        else if (key == "phi_max") c.phi_max = parse_double_list(val);
        else if (key == "delta") c.delta = std::stod(val);
        else if (key == "p") c.p = std::stod(val);
        else if (key == "eig_tol") c.eig_tol = std::stod(val);
        else if (key == "eig_max_iter") c.eig_max_iter = std::stoi(val);
        else if (key == "seed") c.seed = std::stoull(val);
        else if (key == "test_functions") c.test_functions = std::stoi(val);
        else if (key == "bracket_depth") c.bracket_depth = std::stoi(val);
        else if (key == "hormander_lattice") c.hormander_lattice = std::stoi(val);
        else if (key == "hormander_grid_n") c.hormander_grid_n = std::stoi(val);
        else if (key == "sv_tol") c.sv_tol = std::stod(val);
        else if (key == "singular_tol") c.singular_tol = std::stod(val);
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    preset_by_name(preset); // throws on unknown preset
    if (grid_n < 4 || grid_n % 2 != 0)
        throw std::invalid_argument("config: grid_n must be even and >= 4");
    if (phi_max.empty()) throw std::invalid_argument("config: phi_max list empty");
    for (size_t i = 0; i < phi_max.size(); ++i) {
        if (phi_max[i] < 1.0) throw std::invalid_argument("config: phi_max values must be >= 1");
        if (i > 0 && phi_max[i] <= phi_max[i - 1])
            throw std::invalid_argument("config: phi_max values must be strictly increasing");
    }
    if (preset == "t4-d2-singular" && delta <= 0.0)
        throw std::invalid_argument("config: delta must be positive for a preset with a singular set");
    if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("config: p must lie in (1,2)");
    if (eig_tol <= 0) throw std::invalid_argument("config: eig_tol must be positive");
    if (test_functions < 1) throw std::invalid_argument("config: test_functions must be >= 1");
    if (bracket_depth < 1) throw std::invalid_argument("config: bracket_depth must be >= 1");
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["preset"] = preset;
    j["grid_n"] = grid_n;
    j["phi_max"] = phi_max;
    j["delta"] = delta;
    j["p"] = p;
    j["eig_tol"] = eig_tol;
    j["eig_max_iter"] = eig_max_iter;
    j["seed"] = seed;
    j["test_functions"] = test_functions;
    j["bracket_depth"] = bracket_depth;
    j["hormander_lattice"] = hormander_lattice;
    j["hormander_grid_n"] = hormander_grid_n;
    j["sv_tol"] = sv_tol;
    j["singular_tol"] = singular_tol;
    return j.dump(2);
}

std::string ExperimentSummary::to_json() const {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config.to_json());
    j["isotropy_max"] = isotropy_max;
    j["hormander"] = nlohmann::json::parse(hormander.points_sampled > 0 ? hormander.to_json() : "{}");
    j["bracket_count"] = bracket_count;
    j["singular"] = singular_json(singular);
    j["max_det_defect"] = max_det_defect;
    j["rows"] = nlohmann::json::array();
    for (const SweepRow& r : rows) {
        j["rows"].push_back({
            {"phi_max", r.phi_max},
            {"delta", r.delta},
            {"inv_phi_norm", r.inv_phi_norm},
            {"K", r.K},
            {"lambda1", r.lambda1},
            {"iterations", r.iterations},
            {"residual", r.residual},
            {"chain_min_slack", r.chain_min_slack},
            {"chain_violations", r.chain_violations},
        });
    }
    j["ok"] = ok;
    j["failures"] = failures;
    return j.dump(2);
}

namespace {

// shared pipeline core for run_experiment / run_sweep
ExperimentSummary pipeline(const ExperimentConfig& config, bool fullChecks) {
    config.validate();
    ExperimentSummary sum;
    sum.config = config;

    ConstructionSpec spec = preset_by_name(config.preset);
    auto [V, W] = Stage::run("construction", [&] { return build_construction(spec); });
    std::vector<VectorField> fields = {V, W};
    BaseStructure base = base_structure(spec.ambient_dim);
    PeriodicGrid grid(spec.ambient_dim, config.grid_n);

    // isotropy
    Stage::run("isotropy", [&] {
        std::mt19937_64 rng(config.seed + 17);
        std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
        std::vector<std::vector<double>> samples(10000, std::vector<double>(spec.ambient_dim));
        for (auto& pt : samples)
            for (double& x : pt) x = uni(rng);
        sum.isotropy_max = isotropy_check(V, W, base, samples);
        if (sum.isotropy_max >= 1e-14)
            sum.failures.push_back("isotropy pairing exceeds 1e-14");
        return 0;
    });

    // singular set
    sum.singular = Stage::run("singular-set", [&] {
        return find_singular_set(spec, grid, config.singular_tol);
    });

    // Hoermander certification
    if (fullChecks) {
        Stage::run("hormander", [&] {
            auto brackets = generate_brackets(fields, config.bracket_depth);
            sum.bracket_count = static_cast<int>(brackets.size());
            std::vector<VectorField> bf;
            for (auto& b : brackets) bf.push_back(b.field);
            PeriodicGrid aux(spec.ambient_dim, config.hormander_grid_n);
            auto samples = hormander_samples(aux, config.hormander_lattice, sum.singular.x_roots);
            sum.hormander = rank_report(bf, samples, config.sv_tol, config.bracket_depth);
            if (sum.hormander.min_rank < spec.ambient_dim)
                sum.failures.push_back("Hoermander rank deficient at a sample point");
            return 0;
        });
    }

    // deformation sweep
    std::vector<SparseMatrix> derivs;
    for (const VectorField& X : fields)
        derivs.push_back(assemble_vector_derivative(grid, X));
    double K = sup_field_norm(fields, grid);

    for (double phiMax : config.phi_max) {
        SweepRow row{};
        row.phi_max = phiMax;
        row.delta = config.delta;
        row.K = K;

        // midpoint sampling: the metric feeding the assembly lives at
        // cell centers, half a spacing off the nodes on every axis
        double mid = 0.5 * grid.spacing();
        std::vector<double> phiField = Stage::run("bump", [&] {
            return build_bump(sum.singular, config.delta, phiMax, grid, mid);
        });
        row.inv_phi_norm = inv_phi_norm(phiField, config.p, grid);

        MetricField metric = Stage::run("metric", [&] {
            return build_metric_field(grid, V, W, phiField, base, 1e-8, mid);
        });
        sum.max_det_defect = std::max(sum.max_det_defect, metric.max_det_defect());

        SparseMatrix A = Stage::run("assembly", [&] {
            return assemble_laplace_beltrami(grid, metric);
        });

        SpectrumResult eigres = Stage::run("lambda1", [&] {
            EigenOptions opts;
            opts.tol = config.eig_tol;
            opts.max_iterations = config.eig_max_iter;
            opts.seed = config.seed;
            return lowest_eigenpairs(A, 1, opts);
        });
        row.lambda1 = eigres.lambda1();
        row.iterations = eigres.iterations;
        row.residual = eigres.residuals[0];

        Stage::run("chain", [&] {
            std::mt19937_64 rng(config.seed + 101);
            double minSlack = std::numeric_limits<double>::infinity();
            int violations = 0;
            for (int t = 0; t < config.test_functions; ++t) {
                std::vector<double> u = random_band_limited(grid, config.grid_n / 4, rng);
                ChainReport cr = verify_estimate_chain(grid, derivs, A, phiField, u, config.p, K);
                minSlack = std::min(minSlack, cr.slack);
                if (!cr.ok) ++violations;
            }
            row.chain_min_slack = minSlack;
            row.chain_violations = violations;
            if (violations > 0)
                sum.failures.push_back("estimate chain violated at phi_max="
                                       + std::to_string(phiMax));
            return 0;
        });

        sum.rows.push_back(row);
    }

    if (sum.max_det_defect >= 1e-10)
        sum.failures.push_back("volume invariance violated: |det g - 1| >= 1e-10");

    sum.ok = sum.failures.empty();
    return sum;
}

} // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config, const std::string& outDir) {
    ExperimentSummary sum = pipeline(config, true);
    write_file(outDir, "summary.json", sum.to_json());
    return sum;
}

ExperimentSummary run_sweep(const ExperimentConfig& config, const std::string& outDir) {
    if (config.phi_max.size() < 2)
        throw std::invalid_argument("sweep: at least 2 phi_max values required");
    ExperimentSummary sum = pipeline(config, false);

    for (size_t i = 1; i < sum.rows.size(); ++i) {
        if (!(sum.rows[i].lambda1 > sum.rows[i - 1].lambda1))
            sum.failures.push_back("lambda1 not strictly increasing between rows "
                                   + std::to_string(i - 1) + " and " + std::to_string(i));
        if (!(sum.rows[i].inv_phi_norm < sum.rows[i - 1].inv_phi_norm))
            sum.failures.push_back("inv_phi_norm not strictly decreasing between rows "
                                   + std::to_string(i - 1) + " and " + std::to_string(i));
    }
    sum.ok = sum.failures.empty();

    std::ostringstream csv;
    csv << "# qklab sweep schema v1\n";
    csv << "phi_max,delta,inv_phi_norm,K,lambda1,iterations,residual,chain_min_slack\n";
    csv.precision(15);
    for (const SweepRow& r : sum.rows)
        csv << r.phi_max << "," << r.delta << "," << r.inv_phi_norm << "," << r.K << ","
            << r.lambda1 << "," << r.iterations << "," << r.residual << ","
            << r.chain_min_slack << "\n";
    write_file(outDir, "sweep.csv", csv.str());
    write_file(outDir, "summary.json", sum.to_json());
    return sum;
}

ExperimentSummary run_hormander(const ExperimentConfig& config, const std::string& outDir) {
    config.validate();
    ExperimentSummary sum;
    sum.config = config;
    ConstructionSpec spec = preset_by_name(config.preset);
    auto [V, W] = build_construction(spec);
    PeriodicGrid grid(spec.ambient_dim, config.grid_n);

    sum.singular = find_singular_set(spec, grid, config.singular_tol);
    auto brackets = generate_brackets({V, W}, config.bracket_depth);
    sum.bracket_count = static_cast<int>(brackets.size());
    std::vector<VectorField> bf;
    for (auto& b : brackets) bf.push_back(b.field);
    PeriodicGrid aux(spec.ambient_dim, config.hormander_grid_n);
    auto samples = hormander_samples(aux, config.hormander_lattice, sum.singular.x_roots);
    sum.hormander = rank_report(bf, samples, config.sv_tol, config.bracket_depth);

    sum.ok = sum.hormander.min_rank == spec.ambient_dim;
    if (!sum.ok) sum.failures.push_back("rank deficient sample points found");
    write_file(outDir, "hormander.json", sum.hormander.to_json());
    write_file(outDir, "summary.json", sum.to_json());
    return sum;
}

ExperimentSummary run_singular(const ExperimentConfig& config, const std::string& outDir) {
    config.validate();
    ExperimentSummary sum;
    sum.config = config;
    ConstructionSpec spec = preset_by_name(config.preset);
    PeriodicGrid grid(spec.ambient_dim, config.grid_n);
    sum.singular = find_singular_set(spec, grid, config.singular_tol);
    sum.ok = true;
    write_file(outDir, "summary.json", sum.to_json());
    return sum;
}

ExperimentSummary run_poincare(const ExperimentConfig& config, const std::string& outDir) {
    config.validate();
    ExperimentSummary sum;
    sum.config = config;
    ConstructionSpec spec = preset_by_name(config.preset);
    auto [V, W] = build_construction(spec);
    std::vector<VectorField> fields = {V, W};
    PeriodicGrid grid(spec.ambient_dim, config.grid_n);

    std::mt19937_64 rng(config.seed + 202);
    std::vector<std::vector<double>> testFns;
    for (int t = 0; t < config.test_functions; ++t)
        testFns.push_back(random_band_limited(grid, config.grid_n / 4, rng));

    EigenOptions opts;
    opts.tol = config.eig_tol;
    opts.max_iterations = config.eig_max_iter;
    opts.seed = config.seed;
    PoincareReport rep = estimate_constant(grid, fields, 2.0, 2.0, testFns, opts);

    std::ostringstream csv;
    csv << "# qklab poincare schema v1\n";
    csv << "index,norm_q,energy_p,ratio,slack\n";
    csv.precision(15);
    for (size_t i = 0; i < rep.rows.size(); ++i)
        csv << i << "," << rep.rows[i].norm_q << "," << rep.rows[i].energy_p << ","
            << rep.rows[i].ratio << "," << rep.rows[i].slack << "\n";
    write_file(outDir, "poincare.csv", csv.str());

    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config.to_json());
    j["p"] = rep.p;
    j["q"] = rep.q;
    j["exact_constant"] = rep.exact_constant;
    j["empirical_constant"] = rep.empirical_constant;
    j["violations"] = rep.violations;
    j["zero_energy_witnesses"] = rep.zero_energy_witnesses;
    write_file(outDir, "summary.json", j.dump(2));

    sum.ok = rep.violations == 0;
    if (!sum.ok) sum.failures.push_back("Poincare inequality violated");
    return sum;
}

} // namespace qklab
