// Experiment runner: `run` executes one study from a JSON config, `reference`
// stores an overkill solution for reuse, `report` summarizes result directories.

#include "sgeig/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#ifndef SGEIG_VERSION
#define SGEIG_VERSION "0.0.0"
#endif

using namespace sgeig;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Typed, path-tracking access to one JSON object; unknown keys are errors.
class Section {
public:
    Section(json j, std::string path) : j_(std::move(j)), path_(std::move(path)) {
        if (!j_.is_null() && !j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        used_.insert(key);
        if (j_.is_null() || !j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        const std::string where = path_ + "." + key;
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where + ": expected true or false");
            return v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
            if (std::is_unsigned_v<T> && v.get<long long>() < 0) throw ConfigError(where + ": must be non-negative");
            return v.get<T>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where + ": expected a number");
            return v.get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where + ": expected a string");
            return v.get<std::string>();
        } else {
            using E = typename T::value_type;
            if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty array");
            T out;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number_integer() || v[i].get<long long>() <= 0) {
                    throw ConfigError(where + "[" + std::to_string(i) + "]: expected a positive integer");
                }
                out.push_back(v[i].get<E>());
            }
            return out;
        }
    }

    bool has(const std::string& key) const { return !j_.is_null() && j_.contains(key); }

    /// Sub-object (null if absent), marked as consumed.
    json take(const std::string& key) {
        used_.insert(key);
        return has(key) ? j_.at(key) : json();
    }

    void finish() const {
        if (j_.is_null()) return;
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) throw ConfigError(path_ + "." + key + ": unknown field");
        }
    }

private:
    json j_;
    std::string path_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

const std::set<std::string> kStudies{"solve",       "spatial",  "stochastic", "iteration",
                                     "coefficients", "subspace", "statistics", "residual"};

struct Config {
    std::string study;
    std::string output;
    ProblemConfig problem;
    /// Largest admissible number of parameter dimensions M(A); 0 leaves it open.
    std::uint32_t max_terms = 0;
    // stochastic
    std::size_t size = 31;
    std::vector<std::size_t> sizes{5, 8, 12, 20, 31, 52, 80, 121};
    std::size_t reference_size = 264;
    // iteration
    double tol = 1e-10;
    int steps = 16;
    int q = 3;
    bool sum_trick = true;
    std::optional<double> shift;
    int burn_in = 3;
    double increment_floor = 1e-9;
    double plateau_factor = 2.0;
    // spatial
    std::vector<int> cells{4, 8, 16};
    int reference_cells = 32;
    // validation
    std::size_t samples = 256;
    std::uint64_t seed = 20240531;
    std::size_t points = 20;
    double floor_fraction = 1.0 / 3.0;
    double floor_factor = 10.0;
    int crossing_points = 41;
    std::size_t tail_start = 2;
};

Config parse_config(const json& j) {
    Section root(j, "config");
    Config c;
    c.study = root.get<std::string>("study", "");
    require(kStudies.count(c.study) == 1,
            "config.study: expected one of solve, spatial, stochastic, iteration, coefficients, subspace, "
            "statistics, residual");
    c.output = root.get<std::string>("output", "results/" + c.study);

    Section problem(root.take("problem"), "config.problem");
    c.problem.cells = problem.get("cells", 8);
    c.problem.order = problem.get("order", 2);
    c.problem.varsigma = problem.get("varsigma", 3.2);
    c.max_terms = problem.get<std::uint32_t>("max_terms", 0);
    problem.finish();
    require(c.problem.cells >= 1, "config.problem.cells: must be at least 1");
    require(c.problem.order == 1 || c.problem.order == 2, "config.problem.order: must be 1 or 2");
    require(c.problem.varsigma > 1.0, "config.problem.varsigma: must exceed 1");

    Section stoch(root.take("stochastic"), "config.stochastic");
    c.size = stoch.get<std::size_t>("size", c.size);
    if (stoch.has("eps")) {
        const double eps = stoch.get("eps", 0.0);
        require(eps > 0.0 && eps < 1.0, "config.stochastic.eps: must lie in (0, 1)");
        require(!stoch.has("size"), "config.stochastic: give either size or eps, not both");
        c.size = generate_index_set(DecayWeights::algebraic(c.problem.varsigma), eps).size();
    }
    c.sizes = stoch.get("sizes", c.sizes);
    c.reference_size = stoch.get<std::size_t>("reference_size", c.reference_size);
    stoch.finish();
    require(c.size >= 1, "config.stochastic.size: must be at least 1");

    Section it(root.take("iteration"), "config.iteration");
    c.tol = it.get("tol", c.tol);
    c.steps = it.get("steps", c.steps);
    c.q = it.get("q", c.q);
    c.sum_trick = it.get("sum_trick", c.sum_trick);
    if (it.has("shift")) c.shift = it.get("shift", 0.0);
    c.burn_in = it.get("burn_in", c.burn_in);
    c.increment_floor = it.get("increment_floor", c.increment_floor);
    c.plateau_factor = it.get("plateau_factor", c.plateau_factor);
    it.finish();
    require(c.tol > 0.0, "config.iteration.tol: must be positive");
    require(c.steps >= 1, "config.iteration.steps: must be at least 1");
    require(c.q >= 1, "config.iteration.q: must be at least 1");

    Section sp(root.take("spatial"), "config.spatial");
    c.cells = sp.get("cells", c.cells);
    c.reference_cells = sp.get("reference_cells", c.reference_cells);
    sp.finish();
    for (int n : c.cells) {
        require(c.reference_cells % n == 0 && n < c.reference_cells,
                "config.spatial.cells: every entry must properly divide reference_cells");
    }

    Section val(root.take("validation"), "config.validation");
    c.samples = val.get<std::size_t>("samples", c.study == "statistics" ? 10000 : c.samples);
    c.seed = val.get<std::uint64_t>("seed", c.seed);
    c.points = val.get<std::size_t>("points", c.points);
    c.floor_fraction = val.get("floor_fraction", c.floor_fraction);
    c.floor_factor = val.get("floor_factor", c.floor_factor);
    c.crossing_points = val.get("crossing_points", c.crossing_points);
    c.tail_start = val.get<std::size_t>("tail_start", c.tail_start);
    val.finish();
    require(c.samples >= 2, "config.validation.samples: must be at least 2");
    require(c.floor_fraction > 0.0 && c.floor_fraction <= 1.0, "config.validation.floor_fraction: must lie in (0, 1]");

    root.take("reference");  // read by `reference`
    root.finish();

    if (c.max_terms > 0) {
        std::size_t largest = std::max(c.size, *std::max_element(c.sizes.begin(), c.sizes.end()));
        if (c.study == "stochastic" || c.study == "coefficients" || c.study == "iteration") {
            largest = std::max(largest, c.reference_size);
        }
        const auto m =
            generate_index_set_with_size(DecayWeights::algebraic(c.problem.varsigma), largest).active_dimensions();
        require(m <= c.max_terms, "config.problem.max_terms: the largest index set (#A = " + std::to_string(largest) +
                                      ") needs " + std::to_string(m) + " parameter dimensions");
    }
    const int finest = std::max(c.problem.cells, c.study == "spatial" ? c.reference_cells : 0);
    if (finest > 32 || c.reference_size > 264 || c.samples > 20000) {
        std::cerr << "note: parameters beyond desk scale; expect a long run\n";
    }
    return c;
}

// Fully resolved config (defaults filled in); its canonical dump is hashed.
json resolved(const Config& c) {
    json j;
    j["study"] = c.study;
    j["output"] = c.output;
    j["problem"] = {{"cells", c.problem.cells},
                    {"order", c.problem.order},
                    {"varsigma", c.problem.varsigma},
                    {"max_terms", c.max_terms}};
    j["stochastic"] = {{"size", c.size}, {"sizes", c.sizes}, {"reference_size", c.reference_size}};
    j["iteration"] = {{"tol", c.tol},         {"steps", c.steps},         {"q", c.q},
                      {"sum_trick", c.sum_trick}, {"burn_in", c.burn_in}, {"increment_floor", c.increment_floor},
                      {"plateau_factor", c.plateau_factor}};
    if (c.shift) j["iteration"]["shift"] = *c.shift;
    j["spatial"] = {{"cells", c.cells}, {"reference_cells", c.reference_cells}};
    j["validation"] = {{"samples", c.samples},           {"seed", c.seed},
                       {"points", c.points},             {"floor_fraction", c.floor_fraction},
                       {"floor_factor", c.floor_factor}, {"crossing_points", c.crossing_points},
                       {"tail_start", c.tail_start}};
    return j;
}

std::string config_hash(const json& resolved_config) {
    json copy = resolved_config;
    copy.erase("output");
    return hex64(fnv1a64(copy.dump()));
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

SpatialStudyOptions spatial_options(const Config& c) {
    return {c.problem.order, c.problem.varsigma, c.cells, c.reference_cells, c.size, c.steps};
}
StochasticStudyOptions stochastic_options(const Config& c) {
    return {c.problem, c.sizes, c.reference_size, std::min(c.tol, 1e-11), std::max(c.steps, 100)};
}
IterationStudyOptions iteration_options(const Config& c) {
    return {c.problem, c.size, c.reference_size, c.steps, c.burn_in, c.increment_floor, c.plateau_factor};
}

// The reference a study needs, or nullopt if it uses none.
std::optional<ReferenceConfig> required_reference(const Config& c) {
    if (c.study == "spatial") return spatial_reference_config(spatial_options(c));
    if (c.study == "stochastic" || c.study == "coefficients") return stochastic_reference_config(stochastic_options(c));
    if (c.study == "iteration") return iteration_reference_config(iteration_options(c));
    return std::nullopt;
}

json reference_json(const ReferenceConfig& r) {
    return {{"cells", r.problem.cells}, {"order", r.problem.order}, {"varsigma", r.problem.varsigma},
            {"size", r.size},           {"steps", r.steps},         {"tol", r.tol}};
}

ReferenceConfig reference_from_json(const json& j, const std::string& path) {
    Section s(j, path);
    ReferenceConfig r;
    r.problem.cells = s.get("cells", r.problem.cells);
    r.problem.order = s.get("order", r.problem.order);
    r.problem.varsigma = s.get("varsigma", r.problem.varsigma);
    r.size = s.get<std::size_t>("size", r.size);
    r.steps = s.get("steps", r.steps);
    r.tol = s.get("tol", r.tol);
    s.finish();
    return r;
}

bool same_reference(const ReferenceConfig& a, const ReferenceConfig& b) { return reference_json(a) == reference_json(b); }

struct Output {
    fs::path dir;
    std::vector<std::pair<std::string, std::string>> prefix;
    json files = json::array();

    void csv(const std::string& name, const Table& table) {
        std::ofstream out(dir / name);
        write_csv(out, table, prefix);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        files.push_back(name);
    }
};

json fit_json(const LinearFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_standard_error", f.slope_standard_error}};
}

json run_study(const Config& c, const ReferenceSolution* ref, Output& out) {
    json s;
    if (c.study == "solve") {
        const Mesh mesh(c.problem.cells, c.problem.order);
        const auto set = generate_index_set_with_size(DecayWeights::algebraic(c.problem.varsigma), c.size);
        const auto op = build_parametric_operator(mesh, std::max<std::uint32_t>(set.active_dimensions(), 1),
                                                  c.problem.varsigma);
        const GalerkinSystem sys(op, set, c.shift);
        InverseIterationOptions opts;
        opts.tol = c.tol;
        opts.max_steps = c.steps;
        const auto r = SpectralInverseIteration(sys, opts).run();
        Table history{{"k", "increment", "mu_change", "mu_mean", "cg_iterations", "cg_residual", "newton_iterations",
                       "delta_rcond"},
                      {}};
        for (const auto& h : r.history) {
            history.add_row({std::to_string(h.k), format_number(h.increment), format_number(h.mu_change),
                             format_number(h.mu_mean), std::to_string(h.cg_iterations), format_number(h.cg_residual),
                             std::to_string(h.newton_iterations), format_number(h.delta_rcond)});
        }
        out.csv("history.csv", history);
        Table coeffs{{"position", "alpha", "mu", "mu_rayleigh", "eigenvector_norm"}, {}};
        const Eigen::MatrixXd mu_blocks = op.mass * r.u;
        for (std::size_t k = 0; k < set.size(); ++k) {
            const auto a = static_cast<Eigen::Index>(k);
            coeffs.add_row({std::to_string(k + 1), "\"" + set[k].to_string() + "\"", format_number(r.mu[a]),
                            format_number(r.mu_rayleigh[a]),
                            format_number(std::sqrt(r.u.col(a).dot(mu_blocks.col(a))))});
        }
        out.csv("coefficients.csv", coeffs);
        s = {{"size", set.size()},     {"active_dimensions", set.active_dimensions()},
             {"steps", r.steps},       {"converged", r.converged},
             {"mean", r.mean()},       {"variance", r.variance()},
             {"rayleigh_mean", r.mu_rayleigh[0]}};
    } else if (c.study == "spatial") {
        const auto r = spatial_study(spatial_options(c), ref);
        out.csv("spatial.csv", r.table());
        s = {{"eigenfunction_fit", fit_json(r.eigenfunction_fit)}, {"eigenvalue_fit", fit_json(r.eigenvalue_fit)}};
    } else if (c.study == "stochastic") {
        const auto r = stochastic_study(stochastic_options(c), ref);
        out.csv("stochastic.csv", r.table());
        s = {{"eigenfunction_fit", fit_json(r.eigenfunction_fit)},
             {"eigenvalue_fit", fit_json(r.eigenvalue_fit)},
             {"monotone", r.monotone}};
    } else if (c.study == "coefficients") {
        const auto r = coefficient_study(*ref, c.tail_start);
        out.csv("coefficients.csv", r.table());
        s = {{"eigenvector_slope", r.decay.eigenvector_slope},
             {"eigenvector_envelope_slope", r.decay.eigenvector_envelope_slope},
             {"eigenvector_sorted_slope", r.decay.eigenvector_sorted_slope},
             {"eigenvalue_slope", r.decay.eigenvalue_slope},
             {"eigenvalue_sorted_slope", r.decay.eigenvalue_sorted_slope}};
    } else if (c.study == "iteration") {
        const auto r = iteration_study(iteration_options(c), ref);
        out.csv("iteration.csv", r.table());
        s = {{"mu1", r.mu1},
             {"mu2", r.mu2},
             {"rate", r.rate},
             {"ratio_window", {r.ratio_first, r.ratio_last}},
             {"ratio_max_deviation", r.ratio_max_deviation},
             {"plateau_last", r.plateau_last},
             {"eigenfunction_slope", r.eigenfunction_slope},
             {"eigenvalue_slope", r.eigenvalue_slope}};
    } else if (c.study == "subspace") {
        SubspaceStudyOptions o;
        o.problem = c.problem;
        o.size = c.size;
        o.q = c.q;
        o.steps = c.steps;
        o.sum_trick = c.sum_trick;
        o.samples = c.samples;
        o.floor_fraction = c.floor_fraction;
        o.floor_factor = c.floor_factor;
        o.crossing_points = c.crossing_points;
        const auto r = subspace_study(o);
        out.csv("subspace.csv", r.table());
        if (!r.crossing.parameter.empty()) out.csv("crossing.csv", r.crossing_table());
        s = {{"center_values", r.center_values}, {"rate", r.rate},
             {"angle_floor", r.angle_floor},     {"variance_floor", r.variance_floor},
             {"window_last", r.window_last},     {"ratio_min", r.ratio_min},
             {"ratio_max", r.ratio_max},         {"crossings", r.crossing.swaps}};
    } else if (c.study == "statistics") {
        const auto r = statistics_study({c.problem, c.size, c.samples, c.seed});
        out.csv("statistics.csv", r.table());
        s = {{"mean_z", r.mean_z}, {"variance_z", r.variance_z}};
    } else if (c.study == "residual") {
        const auto r = residual_study({c.problem, c.size, c.points, c.seed, std::min(c.tol, 1e-11)});
        out.csv("residual.csv", r.table());
        s = {{"max_residual", r.max_residual},
             {"max_normalization_error", r.max_normalization_error},
             {"median_eigenvalue_error", r.median_eigenvalue_error}};
    }
    return s;
}

// Loads a stored reference after checking that it is the one the study needs
// and that its coefficients still hash to the recorded value.
ReferenceSolution load_checked(const fs::path& dir, const ReferenceConfig& want) {
    const json m = read_json(dir / "manifest.json");
    const ReferenceConfig have = reference_from_json(m.at("reference"), "manifest.reference");
    if (!same_reference(have, want)) {
        throw ConfigError("stored reference " + reference_json(have).dump() + " does not match the required " +
                          reference_json(want).dump());
    }
    ReferenceSolution ref = load_reference(dir, have);
    if (hex64(ref.hash()) != m.at("result_hash").get<std::string>()) {
        throw std::runtime_error("stored reference in " + dir.string() + " fails its hash check");
    }
    return ref;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_run(const std::string& config_path, const std::string& output_override, const std::string& reference_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    Config c = parse_config(read_json(config_path));
    if (!output_override.empty()) c.output = output_override;
    const json rc = resolved(c);
    const std::string hash = config_hash(rc);
    Output out{c.output, {{"config_hash", hash}, {"version", SGEIG_VERSION}}, json::array()};
    fs::create_directories(out.dir);

    json reference_info = nullptr;
    ReferenceSolution ref;
    const ReferenceSolution* ref_ptr = nullptr;
    if (const auto want = required_reference(c)) {
        if (!reference_dir.empty()) {
            ref = load_checked(reference_dir, *want);
            reference_info = {{"source", reference_dir}};
        } else {
            ref = compute_reference(*want);
            reference_info = {{"source", "computed"}};
        }
        reference_info["config"] = reference_json(*want);
        reference_info["result_hash"] = hex64(ref.hash());
        ref_ptr = &ref;
    }
    const json summary = run_study(c, ref_ptr, out);
    json manifest = {{"tool", "sgeig"},          {"version", SGEIG_VERSION}, {"study", c.study},
                     {"config", rc},             {"config_hash", hash},      {"summary", summary},
                     {"files", out.files},       {"reference", reference_info},
                     {"elapsed_seconds", seconds_since(t0)}};
    write_json(out.dir / "manifest.json", manifest);
    std::cout << c.study << " " << hash << " -> " << out.dir.string() << "\n" << summary.dump(2) << "\n";
    return 0;
}

int cmd_reference(const std::string& config_path, const std::string& output_override) {
    const auto t0 = std::chrono::steady_clock::now();
    const json j = read_json(config_path);
    ReferenceConfig rc;
    std::string output = "results/reference";
    if (j.contains("study")) {
        // Precompute exactly the reference that `run` would need for this study.
        Config c = parse_config(j);
        const auto want = required_reference(c);
        if (!want) throw ConfigError("config.study: study '" + c.study + "' uses no reference");
        rc = *want;
        output = c.output + "-reference";
    } else {
        Section root(j, "config");
        const json section = root.take("reference");
        output = root.get<std::string>("output", output);
        root.finish();
        rc = reference_from_json(section, "config.reference");
    }
    require(rc.size >= 1, "config.reference.size: must be at least 1");
    require(rc.steps >= 1 || rc.tol > 0.0, "config.reference: need steps >= 1 or tol > 0");
    if (!output_override.empty()) output = output_override;

    const ReferenceSolution ref = compute_reference(rc);
    save_reference(ref, output);
    const json manifest = {{"tool", "sgeig"},
                           {"version", SGEIG_VERSION},
                           {"kind", "reference"},
                           {"reference", reference_json(rc)},
                           {"config_hash", hex64(fnv1a64(reference_json(rc).dump()))},
                           {"result_hash", hex64(ref.hash())},
                           {"size", ref.set.size()},
                           {"active_dimensions", ref.set.active_dimensions()},
                           {"dofs", ref.u.rows()},
                           {"steps", ref.steps},
                           {"mean_eigenvalue", ref.mu[0]},
                           {"files", {"index_set.txt", "result.bin"}},
                           {"elapsed_seconds", seconds_since(t0)}};
    write_json(fs::path(output) / "manifest.json", manifest);
    std::cout << "reference " << hex64(ref.hash()) << " -> " << output << "\n";
    return 0;
}

void report_one(const fs::path& manifest_path) {
    const json m = read_json(manifest_path);
    const std::string where = manifest_path.parent_path().string();
    if (m.value("kind", "") == "reference") {
        std::printf("%-40s reference  result %s  #A=%zu  N=%lld  E[mu]=%.10g\n", where.c_str(),
                    m.at("result_hash").get<std::string>().c_str(), m.at("size").get<std::size_t>(),
                    m.at("dofs").get<long long>(), m.at("mean_eigenvalue").get<double>());
        return;
    }
    std::printf("%-40s %-12s config %s\n", where.c_str(), m.at("study").get<std::string>().c_str(),
                m.at("config_hash").get<std::string>().c_str());
    for (const auto& [key, value] : m.at("summary").items()) {
        if (value.is_object() && value.contains("slope")) {
            std::printf("    %-28s slope %.4f +- %.4f\n", key.c_str(), value["slope"].get<double>(),
                        value["slope_standard_error"].get<double>());
        } else {
            std::printf("    %-28s %s\n", key.c_str(), value.dump().c_str());
        }
    }
}

int cmd_report(const std::vector<std::string>& inputs) {
    std::vector<fs::path> manifests;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_regular_file(p)) {
            manifests.push_back(p);
        } else if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file() && e.path().filename() == "manifest.json") manifests.push_back(e.path());
        } else {
            throw std::runtime_error("no such file or directory: " + in);
        }
    }
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) throw std::runtime_error("no manifest.json found");
    for (const auto& m : manifests) report_one(m);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral stochastic Galerkin eigenvalue studies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SGEIG_VERSION);

    std::string config, output, reference;
    auto* run = app.add_subcommand("run", "run one study from a JSON config");
    run->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output, "output directory (overrides config.output)");
    run->add_option("-r,--reference", reference, "stored reference directory to reuse")->check(CLI::ExistingDirectory);

    auto* ref = app.add_subcommand("reference", "compute and store an overkill reference");
    ref->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
    ref->add_option("-o,--output", output, "output directory");

    std::vector<std::string> inputs;
    auto* report = app.add_subcommand("report", "summarize result directories");
    report->add_option("inputs", inputs, "result directories or manifest files")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config, output, reference);
        if (*ref) return cmd_reference(config, output);
        if (*report) return cmd_report(inputs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
