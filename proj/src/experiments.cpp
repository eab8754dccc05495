#include "sgeig/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sgeig {

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size()) throw std::logic_error("table row has the wrong number of cells");
    rows.push_back(std::move(cells));
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, const Table& table, const std::vector<std::pair<std::string, std::string>>& prefix) {
    bool first = true;
    auto cell = [&](const std::string& s) {
        if (!first) out << ',';
        first = false;
        out << s;
    };
    for (const auto& p : prefix) cell(p.first);
    for (const auto& c : table.columns) cell(c);
    out << '\n';
    for (const auto& row : table.rows) {
        first = true;
        for (const auto& p : prefix) cell(p.second);
        for (const auto& c : row) cell(c);
        out << '\n';
    }
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string num(double x) { return format_number(x); }
template <class T>
std::string num_i(T x) {
    return std::to_string(x);
}

MultiIndexSet make_set(double varsigma, std::size_t size) {
    return generate_index_set_with_size(DecayWeights::algebraic(varsigma), size);
}

ParametricOperator make_operator(const Mesh& mesh, const MultiIndexSet& set, double varsigma) {
    return build_parametric_operator(mesh, std::max<std::uint32_t>(set.active_dimensions(), 1), varsigma);
}

// Flip u so that its mean block has a non-negative M-overlap with `like`.
void align_sign(Eigen::MatrixXd& u, const Eigen::VectorXd& like, const SparseMatrix& mass) {
    if (u.col(0).dot(mass * like) < 0.0) u = -u;
}

std::string serialize_coefficients(const Eigen::MatrixXd& u, const Eigen::VectorXd& mu) {
    std::string bytes = "SGEIGREF";
    auto put_u64 = [&](std::uint64_t v) { bytes.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put_u64(static_cast<std::uint64_t>(u.rows()));
    put_u64(static_cast<std::uint64_t>(u.cols()));
    bytes.append(reinterpret_cast<const char*>(u.data()), sizeof(double) * static_cast<std::size_t>(u.size()));
    bytes.append(reinterpret_cast<const char*>(mu.data()), sizeof(double) * static_cast<std::size_t>(mu.size()));
    return bytes;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_reference(const ReferenceSolution& ref, const ReferenceConfig& want, const char* study) {
    const auto& a = ref.config.problem;
    const auto& b = want.problem;
    if (a.cells != b.cells || a.order != b.order || a.varsigma != b.varsigma || ref.set.size() < want.size ||
        ref.config.size != want.size) {
        std::ostringstream msg;
        msg << study << ": reference (n=" << a.cells << ", order=" << a.order << ", #A=" << ref.set.size()
            << ") does not match the required (n=" << b.cells << ", order=" << b.order << ", #A>=" << want.size << ")";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t ReferenceSolution::hash() const { return fnv1a64(serialize_coefficients(u, mu)); }

ReferenceSolution compute_reference(const ReferenceConfig& config) {
    ReferenceSolution ref;
    ref.config = config;
    ref.set = make_set(config.problem.varsigma, config.size);
    const Mesh mesh(config.problem.cells, config.problem.order);
    const auto op = make_operator(mesh, ref.set, config.problem.varsigma);
    const GalerkinSystem sys(op, ref.set);
    InverseIterationOptions opts;
    if (config.tol > 0.0) {
        opts.tol = config.tol;
        opts.max_steps = 500;
    } else {
        opts.max_steps = config.steps;
        opts.run_all_steps = true;
        opts.tol = std::numeric_limits<double>::min();
    }
    opts.rayleigh = false;
    auto result = SpectralInverseIteration(sys, opts).run();
    ref.u = std::move(result.u);
    ref.mu = std::move(result.mu);
    ref.steps = result.steps;
    return ref;
}

void save_reference(const ReferenceSolution& ref, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "index_set.txt");
        write_index_set(out, ref.set);
        if (!out) throw std::runtime_error("cannot write " + (dir / "index_set.txt").string());
    }
    std::ofstream out(dir / "result.bin", std::ios::binary);
    const std::string bytes = serialize_coefficients(ref.u, ref.mu);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + (dir / "result.bin").string());
}

ReferenceSolution load_reference(const std::filesystem::path& dir, const ReferenceConfig& config) {
    ReferenceSolution ref;
    ref.config = config;
    {
        std::ifstream in(dir / "index_set.txt");
        if (!in) throw std::runtime_error("cannot read " + (dir / "index_set.txt").string());
        ref.set = read_index_set(in);
    }
    std::ifstream in(dir / "result.bin", std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + (dir / "result.bin").string());
    char magic[8];
    std::uint64_t rows = 0, cols = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in || std::string(magic, 8) != "SGEIGREF" || cols != ref.set.size()) {
        throw std::runtime_error("result.bin is malformed or does not match index_set.txt");
    }
    ref.u.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    ref.mu.resize(static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(ref.u.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
    in.read(reinterpret_cast<char*>(ref.mu.data()), static_cast<std::streamsize>(sizeof(double) * cols));
    if (!in) throw std::runtime_error("result.bin is truncated");
    if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("result.bin has trailing bytes");
    ref.steps = config.steps;
    return ref;
}

void embed_coefficients(const MultiIndexSet& set, const MultiIndexSet& target, const Eigen::MatrixXd& u,
                        const Eigen::VectorXd& mu, Eigen::MatrixXd& u_out, Eigen::VectorXd& mu_out) {
    u_out = Eigen::MatrixXd::Zero(u.rows(), static_cast<Eigen::Index>(target.size()));
    mu_out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target.size()));
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto pos = target.position_of(set[k]);
        if (!pos) throw std::invalid_argument("embed_coefficients: " + set[k].to_string() + " not in target set");
        u_out.col(static_cast<Eigen::Index>(*pos)) = u.col(static_cast<Eigen::Index>(k));
        mu_out[static_cast<Eigen::Index>(*pos)] = mu[static_cast<Eigen::Index>(k)];
    }
}

// ---------------------------------------------------------------------------

ReferenceConfig spatial_reference_config(const SpatialStudyOptions& o) {
    return ReferenceConfig{{o.reference_cells, o.order, o.varsigma}, o.size, o.steps, 0.0};
}

SpatialStudy spatial_study(const SpatialStudyOptions& o, const ReferenceSolution* reference) {
    const ReferenceConfig want = spatial_reference_config(o);
    ReferenceSolution computed;
    if (!reference) {
        computed = compute_reference(want);
        reference = &computed;
    }
    check_reference(*reference, want, "spatial study");
    const Mesh fine(o.reference_cells, o.order);
    const SparseMatrix fine_mass = assemble_mass(fine);
    SpatialStudy study;
    study.reference_hash = reference->hash();
    std::vector<double> hs, eu, em;
    for (const int n : o.cells) {
        if (o.reference_cells % n != 0) throw std::invalid_argument("spatial study: meshes must be nested");
        const Mesh mesh(n, o.order);
        const auto op = make_operator(mesh, reference->set, o.varsigma);
        const GalerkinSystem sys(op, reference->set);
        InverseIterationOptions opts;
        opts.max_steps = o.steps;
        opts.run_all_steps = true;
        opts.tol = std::numeric_limits<double>::min();
        opts.rayleigh = false;
        const auto r = SpectralInverseIteration(sys, opts).run();
        Eigen::MatrixXd u(fine_mass.rows(), r.u.cols());
        for (Eigen::Index a = 0; a < u.cols(); ++a) u.col(a) = prolongate(mesh, fine, r.u.col(a));
        align_sign(u, reference->u.col(0), fine_mass);
        SpatialRow row;
        row.cells = n;
        row.h = 1.0 / n;
        row.dofs = op.dof_count();
        row.eigenfunction_error = tensor_norm(u - reference->u, fine_mass);
        row.eigenvalue_error = (r.mu - reference->mu).norm();
        study.rows.push_back(row);
        hs.push_back(row.h);
        eu.push_back(row.eigenfunction_error);
        em.push_back(row.eigenvalue_error);
    }
    study.eigenfunction_fit = fit_loglog(hs, eu);
    study.eigenvalue_fit = fit_loglog(hs, em);
    return study;
}

Table SpatialStudy::table() const {
    Table t{{"cells", "h", "dofs", "eigenfunction_error", "eigenvalue_error"}, {}};
    for (const auto& r : rows)
        t.add_row({num_i(r.cells), num(r.h), num_i(r.dofs), num(r.eigenfunction_error), num(r.eigenvalue_error)});
    return t;
}

// ---------------------------------------------------------------------------

ReferenceConfig stochastic_reference_config(const StochasticStudyOptions& o) {
    return ReferenceConfig{o.problem, o.reference_size, 0, std::min(o.tol, 1e-12)};
}

StochasticStudy stochastic_study(const StochasticStudyOptions& o, const ReferenceSolution* reference) {
    const ReferenceConfig want = stochastic_reference_config(o);
    ReferenceSolution computed;
    if (!reference) {
        computed = compute_reference(want);
        reference = &computed;
    }
    check_reference(*reference, want, "stochastic study");
    const Mesh mesh(o.problem.cells, o.problem.order);
    const auto op = make_operator(mesh, reference->set, o.problem.varsigma);
    StochasticStudy study;
    study.reference_hash = reference->hash();
    std::vector<double> sizes, eu, em;
    for (const std::size_t target : o.sizes) {
        const auto set = make_set(o.problem.varsigma, target);
        if (set.size() >= reference->set.size()) throw std::invalid_argument("stochastic study: sweep exceeds reference");
        const GalerkinSystem sys(op, set);
        InverseIterationOptions opts;
        opts.tol = o.tol;
        opts.max_steps = o.max_steps;
        opts.rayleigh = false;
        const auto r = SpectralInverseIteration(sys, opts).run();
        Eigen::MatrixXd u;
        Eigen::VectorXd mu;
        embed_coefficients(set, reference->set, r.u, r.mu, u, mu);
        align_sign(u, reference->u.col(0), op.mass);
        StochasticRow row;
        row.size = set.size();
        row.eps = set.eps();
        row.active_dimensions = set.active_dimensions();
        row.steps = r.steps;
        row.eigenfunction_error = tensor_norm(u - reference->u, op.mass);
        row.eigenvalue_error = (mu - reference->mu).norm();
        study.rows.push_back(row);
        sizes.push_back(static_cast<double>(row.size));
        eu.push_back(row.eigenfunction_error);
        em.push_back(row.eigenvalue_error);
    }
    study.eigenfunction_fit = fit_loglog(sizes, eu);
    study.eigenvalue_fit = fit_loglog(sizes, em);
    study.monotone = true;
    for (std::size_t k = 1; k < study.rows.size(); ++k) {
        study.monotone = study.monotone && eu[k] <= 1.01 * eu[k - 1] && em[k] <= 1.01 * em[k - 1];
    }
    return study;
}

Table StochasticStudy::table() const {
    Table t{{"size", "eps", "active_dimensions", "steps", "eigenfunction_error", "eigenvalue_error"}, {}};
    for (const auto& r : rows)
        t.add_row({num_i(r.size), num(r.eps), num_i(r.active_dimensions), num_i(r.steps), num(r.eigenfunction_error),
                   num(r.eigenvalue_error)});
    return t;
}

// ---------------------------------------------------------------------------

CoefficientStudy coefficient_study(const ReferenceSolution& reference, std::size_t tail_start) {
    const Mesh mesh(reference.config.problem.cells, reference.config.problem.order);
    const SparseMatrix mass = assemble_mass(mesh);
    if (mass.rows() != reference.u.rows()) throw std::invalid_argument("coefficient study: mesh does not match");
    return CoefficientStudy{reference.set, coefficient_decay_report(reference.u, reference.mu, mass, tail_start)};
}

Table CoefficientStudy::table() const {
    Table t{{"position", "alpha", "total_degree", "weight", "eigenvector_norm", "eigenvalue_abs",
             "eigenvector_sorted", "eigenvalue_sorted"},
            {}};
    for (std::size_t k = 0; k < set.size(); ++k) {
        t.add_row({num_i(k + 1), "\"" + set[k].to_string() + "\"", num_i(set[k].total_degree()), num(set.weight(k)),
                   num(decay.eigenvector_norms[k]), num(decay.eigenvalue_norms[k]), num(decay.eigenvector_sorted[k]),
                   num(decay.eigenvalue_sorted[k])});
    }
    return t;
}

// ---------------------------------------------------------------------------

ReferenceConfig iteration_reference_config(const IterationStudyOptions& o) {
    return ReferenceConfig{o.problem, o.reference_size, 0, 1e-13};
}

IterationStudy iteration_study(const IterationStudyOptions& o, const ReferenceSolution* reference) {
    const ReferenceConfig want = iteration_reference_config(o);
    ReferenceSolution computed;
    if (!reference) {
        computed = compute_reference(want);
        reference = &computed;
    }
    check_reference(*reference, want, "iteration study");
    const Mesh mesh(o.problem.cells, o.problem.order);
    const auto op = make_operator(mesh, reference->set, o.problem.varsigma);
    const auto set = make_set(o.problem.varsigma, o.size);
    const GalerkinSystem sys(op, set);

    IterationStudy study;
    study.reference_hash = reference->hash();
    const auto center = deterministic_eigensolve(op, {}, 2);
    study.mu1 = center.values[0];
    study.mu2 = center.values[1];
    study.rate = study.mu1 / study.mu2;

    InverseIterationOptions fixed_opts;
    fixed_opts.tol = 1e-13;
    fixed_opts.max_steps = 500;
    fixed_opts.rayleigh = false;
    const auto fixed = SpectralInverseIteration(sys, fixed_opts).run();

    InverseIterationOptions opts;
    opts.max_steps = o.steps;
    opts.run_all_steps = true;
    opts.rayleigh = false;
    double previous = 0.0;
    (void)SpectralInverseIteration(sys, opts).run(std::nullopt, [&](const IterationState& s, const StepRecord& rec) {
        IterationRow row;
        row.k = rec.k;
        row.increment = rec.increment;
        row.ratio = previous > 0.0 ? rec.increment / previous : 0.0;
        previous = rec.increment;
        row.mu_change = rec.mu_change;
        row.mu_mean = rec.mu_mean;
        row.cg_iterations = rec.cg_iterations;
        row.newton_iterations = rec.newton_iterations;
        Eigen::MatrixXd u = s.u;
        align_sign(u, fixed.u.col(0), op.mass);
        row.eigenfunction_iteration_error = tensor_norm(u - fixed.u, op.mass);
        row.eigenvalue_iteration_error = (s.mu - fixed.mu).norm();
        Eigen::MatrixXd ue;
        Eigen::VectorXd me;
        embed_coefficients(set, reference->set, s.u, s.mu, ue, me);
        align_sign(ue, reference->u.col(0), op.mass);
        row.eigenfunction_error = tensor_norm(ue - reference->u, op.mass);
        row.eigenvalue_error = (me - reference->mu).norm();
        study.rows.push_back(row);
    });

    study.ratio_first = o.burn_in + 2;
    study.ratio_last = 0;
    for (const auto& r : study.rows) {
        if (r.k < study.ratio_first) continue;
        if (!(r.increment > o.increment_floor)) break;
        study.ratio_last = r.k;
        study.ratio_max_deviation = std::max(study.ratio_max_deviation, std::abs(r.ratio - study.rate));
    }
    const double plateau = study.rows.back().eigenfunction_error;
    for (const auto& r : study.rows) {
        if (!(r.eigenfunction_error > o.plateau_factor * plateau)) break;
        study.plateau_last = r.k;
    }
    std::vector<double> ks, lu, lm;
    for (int k = 1; k <= study.plateau_last; ++k) {
        const auto& r = study.rows[static_cast<std::size_t>(k - 1)];
        ks.push_back(k);
        lu.push_back(std::log(r.eigenfunction_iteration_error));
        lm.push_back(std::log(r.eigenvalue_iteration_error));
    }
    if (ks.size() >= 2) {
        study.eigenfunction_slope = fit_line(ks, lu).slope;
        study.eigenvalue_slope = fit_line(ks, lm).slope;
    }
    return study;
}

Table IterationStudy::table() const {
    Table t{{"k", "increment", "ratio", "mu_change", "mu_mean", "eigenfunction_error", "eigenvalue_error",
             "eigenfunction_iteration_error", "eigenvalue_iteration_error", "cg_iterations", "newton_iterations"},
            {}};
    for (const auto& r : rows)
        t.add_row({num_i(r.k), num(r.increment), num(r.ratio), num(r.mu_change), num(r.mu_mean),
                   num(r.eigenfunction_error), num(r.eigenvalue_error), num(r.eigenfunction_iteration_error),
                   num(r.eigenvalue_iteration_error), num_i(r.cg_iterations), num_i(r.newton_iterations)});
    return t;
}

// ---------------------------------------------------------------------------

SubspaceStudy subspace_study(const SubspaceStudyOptions& o) {
    const Mesh mesh(o.problem.cells, o.problem.order);
    const auto set = make_set(o.problem.varsigma, o.size);
    const auto op = make_operator(mesh, set, o.problem.varsigma);
    const GalerkinSystem sys(op, set);

    SubspaceStudy study;
    const auto center = deterministic_eigensolve(op, {}, o.q + 1);
    study.center_values.assign(center.values.data(), center.values.data() + center.values.size());
    study.rate = center.values[o.q - 1] / center.values[o.q];

    const auto points = quasi_random_points(set.active_dimensions(), o.samples);
    std::vector<Eigen::MatrixXd> oracle;
    oracle.reserve(points.size());
    DeterministicEigensolver solver(op);
    for (const auto& y : points) oracle.push_back(solver.solve(y, o.q).vectors);

    SubspaceOptions opts;
    opts.q = o.q;
    opts.max_steps = o.steps;
    opts.run_all_steps = true;
    opts.sum_trick = o.sum_trick;
    double previous = 0.0;
    (void)SpectralSubspaceIteration(sys, opts).run([&](const SpectralBasis& basis, const SubspaceStepRecord& rec) {
        std::vector<double> theta;
        theta.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            theta.push_back(subspace_angle(basis.vectors, set, op.mass, points[i], oracle[i]));
        }
        const auto stats = angle_statistics(theta);
        SubspaceRow row;
        row.k = rec.k;
        row.mean_theta = stats.mean;
        row.variance_theta = stats.variance;
        row.angle = std::acos(std::min(1.0, stats.mean));
        row.ratio = previous > 0.0 ? row.angle / previous : 0.0;
        previous = row.angle;
        row.subspace_increment = rec.subspace_increment;
        row.max_increment = rec.max_increment;
        row.cg_iterations = rec.cg_iterations;
        row.orth_residual = rec.orth_residual;
        study.rows.push_back(row);
    });

    const auto tail = static_cast<std::size_t>(std::ceil(o.floor_fraction * static_cast<double>(study.rows.size())));
    std::vector<double> angles, variances;
    for (std::size_t k = study.rows.size() - std::max<std::size_t>(tail, 1); k < study.rows.size(); ++k) {
        angles.push_back(study.rows[k].angle);
        variances.push_back(study.rows[k].variance_theta);
    }
    study.angle_floor = median(angles);
    study.variance_floor = median(variances);
    for (const auto& r : study.rows) {
        if (!(r.angle > o.floor_factor * study.angle_floor)) break;
        study.window_last = r.k;
    }
    study.ratio_min = std::numeric_limits<double>::infinity();
    study.ratio_max = 0.0;
    for (int k = 2; k <= study.window_last; ++k) {
        const double r = study.rows[static_cast<std::size_t>(k - 1)].ratio;
        study.ratio_min = std::min(study.ratio_min, r);
        study.ratio_max = std::max(study.ratio_max, r);
    }
    if (o.q >= 3 && op.terms() >= 1) study.crossing = scan_crossing(op, 1, 1, o.crossing_points, o.q + 1);
    return study;
}

Table SubspaceStudy::table() const {
    Table t{{"k", "mean_theta", "variance_theta", "angle", "ratio", "subspace_increment", "max_increment",
             "cg_iterations", "orth_residual"},
            {}};
    for (const auto& r : rows)
        t.add_row({num_i(r.k), num(r.mean_theta), num(r.variance_theta), num(r.angle), num(r.ratio),
                   num(r.subspace_increment), num(r.max_increment), num_i(r.cg_iterations), num(r.orth_residual)});
    return t;
}

Table SubspaceStudy::crossing_table() const {
    Table t;
    t.columns.push_back("y1");
    const std::size_t q = crossing.values.empty() ? 0 : crossing.values.front().size();
    for (std::size_t i = 0; i < q; ++i) t.columns.push_back("mu" + std::to_string(i + 1));
    for (std::size_t k = 0; k < crossing.parameter.size(); ++k) {
        std::vector<std::string> row{num(crossing.parameter[k])};
        for (double v : crossing.values[k]) row.push_back(num(v));
        t.add_row(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------

StatisticsStudy statistics_study(const StatisticsStudyOptions& o) {
    const Mesh mesh(o.problem.cells, o.problem.order);
    const auto set = make_set(o.problem.varsigma, o.size);
    const auto op = make_operator(mesh, set, o.problem.varsigma);
    const GalerkinSystem sys(op, set);
    const auto r = SpectralInverseIteration(sys).run();
    StatisticsStudy study;
    study.chaos = statistics_from_coefficients(r.mu);
    study.rayleigh = statistics_from_coefficients(r.mu_rayleigh);
    DeterministicEigensolver solver(op);
    study.monte_carlo = monte_carlo([&](std::span<const double> y) { return solver.solve(y, 1).values[0]; },
                                    set.active_dimensions(), o.samples, o.seed);
    study.mean_z = std::abs(study.chaos.mean - study.monte_carlo.mean) / study.monte_carlo.mean_standard_error;
    study.variance_z =
        std::abs(study.chaos.variance - study.monte_carlo.variance) / study.monte_carlo.variance_standard_error;
    return study;
}

Table StatisticsStudy::table() const {
    Table t{{"estimator", "mean", "variance", "mean_standard_error", "variance_standard_error", "samples"}, {}};
    auto add = [&](const char* name, const SampleStatistics& s) {
        t.add_row({name, num(s.mean), num(s.variance), num(s.mean_standard_error), num(s.variance_standard_error),
                   num_i(s.samples)});
    };
    add("chaos", chaos);
    add("chaos_rayleigh", rayleigh);
    add("monte_carlo", monte_carlo);
    return t;
}

// ---------------------------------------------------------------------------

ResidualStudy residual_study(const ResidualStudyOptions& o) {
    const Mesh mesh(o.problem.cells, o.problem.order);
    const auto set = make_set(o.problem.varsigma, o.size);
    const auto op = make_operator(mesh, set, o.problem.varsigma);
    const GalerkinSystem sys(op, set);
    InverseIterationOptions opts;
    opts.tol = o.tol;
    opts.max_steps = 500;
    opts.rayleigh = false;
    const auto r = SpectralInverseIteration(sys, opts).run();
    if (!r.converged) throw SolverError("residual study: the expansion did not converge");
    ResidualStudy study;
    DeterministicEigensolver oracle(op);
    std::vector<double> mu_errors;
    for (const auto& y : random_points(op.terms(), o.points, o.seed)) {
        ResidualRow row;
        row.y = y;
        const Eigen::VectorXd u = evaluate_expansion(r.u, set, y);
        const double mu = evaluate_expansion(r.mu, set, y);
        const Eigen::VectorXd mu_u = op.mass * u;
        row.residual = (assemble_pointwise(op, y) * u - mu * mu_u).norm() / (mu * mu_u.norm());
        row.normalization_error = std::abs(std::sqrt(u.dot(mu_u)) - 1.0);
        const auto err = pointwise_error(r.u, r.mu, set, op.mass, y, oracle.solve(y, 1));
        row.eigenvalue_error = err.eigenvalue;
        row.eigenvector_error = err.eigenvector;
        study.max_residual = std::max(study.max_residual, row.residual);
        study.max_normalization_error = std::max(study.max_normalization_error, row.normalization_error);
        mu_errors.push_back(err.eigenvalue);
        study.rows.push_back(std::move(row));
    }
    study.median_eigenvalue_error = median(mu_errors);
    return study;
}

Table ResidualStudy::table() const {
    Table t{{"point", "residual", "normalization_error", "eigenvalue_error", "eigenvector_error"}, {}};
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        t.add_row({num_i(k), num(r.residual), num(r.normalization_error), num(r.eigenvalue_error),
                   num(r.eigenvector_error)});
    }
    return t;
}

}  // namespace sgeig
