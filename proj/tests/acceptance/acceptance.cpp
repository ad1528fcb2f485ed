// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance            primary criteria
//   acceptance --remote   remote equivalence against the mock protocol server

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "morkit/algorithms.hpp"
#include "morkit/basis_generation.hpp"
#include "morkit/ei.hpp"
#include "morkit/experiments.hpp"
#include "morkit/parallel.hpp"
#include "morkit/random.hpp"
#include "morkit/reduction.hpp"
#include "morkit/remote.hpp"
#include "morkit/toolbox/burgers.hpp"
#include "morkit/toolbox/thermal_block.hpp"

using namespace morkit;
using namespace morkit::toolbox;

namespace
{
struct Outcome
{
    bool pass;
    std::string detail;
};

struct Criterion
{
    std::string name;
    double time_limit;
    std::function<Outcome()> check;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::vector<std::size_t> all(std::size_t n)
{
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

Matrix values(const VectorArray& a) { return a.dofs(all(a.dim())); }

Parameter diffusion(std::vector<double> d) { return Parameter({{"diffusion", std::move(d)}}); }
Parameter exponent(double e) { return Parameter({{"exponent", {e}}}); }

const ThermalBlockDiscretization& block32()
{
    static const auto d = discretize_thermal_block(ThermalBlockProblem{2, 2, 1.0 / 32.0});
    return d;
}

ParameterFunctional alpha() { return ParameterFunctional::min_of("diffusion"); }

double h1_error(const ThermalBlockDiscretization& d, const Parameter& mu, const StationaryReduction& r)
{
    auto u = d.model->solve(mu);
    u->axpy(-1.0, *r.reconstructor.reconstruct(r.model->solve(mu)));
    return norms(*u, d.h1_0_semi.get())[0];
}

std::shared_ptr<const VectorArray> orthonormal_snapshots(const ThermalBlockDiscretization& d,
                                                         const std::vector<Parameter>& mus)
{
    return std::shared_ptr<const VectorArray>(gram_schmidt(*snapshots(*d.model, mus), d.h1_0_semi.get()).basis);
}

int run(const std::vector<Criterion>& criteria)
{
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.time_limit;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s %s: %s; %.2f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(),
                    seconds, c.time_limit, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- primary

Outcome galerkin_reproduction()
{
    const auto& d = block32();
    const auto star = diffusion({0.27, 0.83, 0.51, 0.14});
    auto mus = d.model->parameter_space().sample_randomly(4, 11);
    mus.insert(mus.begin() + 2, star);
    auto r = reduce_stationary_coercive(*d.model, orthonormal_snapshots(d, mus), *d.h1_0_semi, alpha());
    const double rel = h1_error(d, star, r) / norms(*d.model->solve(star), d.h1_0_semi.get())[0];
    return {rel <= 1e-8, "relative H1_0 error at mu* " + fmt(rel) + " (<= 1e-8)"};
}

Outcome estimator_rigor()
{
    const auto& d = block32();
    auto r = reduce_stationary_coercive(*d.model, orthonormal_snapshots(d, d.model->parameter_space().sample_randomly(6, 5)),
                                        *d.h1_0_semi, alpha());
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_ratio = 0.0;
    bool ok = true;
    for (const auto& mu : d.model->parameter_space().sample_randomly(100, 6)) {
        const double est = r.model->estimate(r.model->solve(mu), mu);
        const double err = h1_error(d, mu, r);
        const auto& c = mu.at("diffusion");
        const double bound = *std::max_element(c.begin(), c.end()) / *std::min_element(c.begin(), c.end());
        worst_gap = std::min(worst_gap, est - err);
        worst_ratio = std::max(worst_ratio, (est / err) / bound);
        ok = ok && est >= err - 1e-10 && est / err <= bound * (1 + 1e-6);
    }
    return {ok, "100 mu: min(estimate - error) " + fmt(worst_gap) + ", max effectivity / (max mu / min mu) " +
                    fmt(worst_ratio)};
}

Outcome estimator_cross_check()
{
    // largest desk-scale mesh with at most 2000 DOFs
    const auto d = discretize_thermal_block(ThermalBlockProblem{2, 2, 1.0 / 31.0});
    const auto basis = orthonormal_snapshots(d, d.model->parameter_space().sample_randomly(10, 3));
    double worst = 0.0;
    for (std::size_t N : {0, 1, 4, 7, 10}) {
        auto r = reduce_stationary_coercive(*d.model, basis->select_range(0, N), *d.h1_0_semi, alpha());
        for (const auto& mu : d.model->parameter_space().sample_randomly(10, 17)) {
            const Vector un = r.model->solve(mu);
            // brute force: Riesz representative of the full residual
            auto res = d.model->rhs()->as_range_array(mu);
            if (N > 0) res->axpy(-1.0, *d.model->op()->apply(*r.reconstructor.reconstruct(un), mu));
            auto riesz_rep = d.h1_0_semi->apply_inverse(*res);
            const double brute = std::sqrt(res->inner(*riesz_rep)(0, 0)) / alpha().evaluate(mu);
            worst = std::max(worst, std::abs(r.model->estimate(un, mu) - brute) / brute);
        }
    }
    return {worst <= 1e-9 && d.model->dim() <= 2000,
            "dim " + std::to_string(d.model->dim()) + ", N <= 10, max relative difference " + fmt(worst) + " (<= 1e-9)"};
}

Outcome greedy_decay()
{
    struct Row
    {
        double value;
        long index;
    };
    std::vector<Row> golden;
    std::ifstream in(std::filesystem::path(MORKIT_SOURCE_DIR) / "tests/golden/thermalblock_greedy_2x2_h32_train3.csv");
    if (!in) return {false, "golden file missing"};
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream s(line);
        std::string n, v, idx;
        std::getline(s, n, ',');
        std::getline(s, v, ',');
        std::getline(s, idx, ',');
        golden.push_back({std::stod(v), idx.empty() ? -1 : std::stol(idx)});
    }

    const auto& d = block32();
    CoerciveReductor reductor{d.model, d.h1_0_semi, alpha()};
    const auto g = greedy(*d.model, reductor, d.model->parameter_space().sample_uniformly(3), 1e-5, 25);
    const auto& h = g.max_err_history;
    const std::size_t N = g.basis->len();

    bool matches = h.size() == golden.size();
    double drift = 0.0;
    for (std::size_t k = 0; matches && k < h.size(); ++k) {
        drift = std::max(drift, std::abs(h[k] - golden[k].value) / golden[k].value);
        if (k < g.selected_indices.size()) matches = matches && static_cast<long>(g.selected_indices[k]) == golden[k].index;
    }
    matches = matches && drift <= 1e-6;

    // least-squares slope of log10(history) against N
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < h.size(); ++k) mx += k, my += std::log10(h[k]);
    mx /= h.size(), my /= h.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        sxy += (k - mx) * (std::log10(h[k]) - my);
        sxx += (k - mx) * (k - mx);
    }
    const double slope = sxy / sxx;

    const bool ok = h.back() <= 1e-5 && N <= 25 && matches && slope < 0.0;
    return {ok, "3^4 training: N = " + std::to_string(N) + ", final max estimate " + fmt(h.back()) +
                    " (<= 1e-5, N <= 25), log10 slope " + fmt(slope) + " per basis vector, golden " +
                    (matches ? "matched" : "MISMATCH") + " (max relative drift " + fmt(drift) + ")"};
}

Outcome pod_identities()
{
    constexpr Eigen::Index dim = 200, len = 50;
    Xoshiro256 rng(42);
    Matrix data(len, dim);
    for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = rng.uniform(-1.0, 1.0);
    Matrix B(dim, dim);
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = rng.uniform(-1.0, 1.0);
    const Matrix P = B * B.transpose() / static_cast<double>(dim) + Matrix::Identity(dim, dim);
    const auto A = DenseVectorArray::from_rows(data);
    const auto product = std::make_shared<MatrixOperator>(P);

    double ortho = 0.0, energy = 0.0;
    for (const Operator* prod : {static_cast<const Operator*>(nullptr), static_cast<const Operator*>(product.get())}) {
        const Matrix Pm = prod ? P : Matrix(Matrix::Identity(dim, dim));
        // independent oracle: eigenvalues of the snapshot Gramian
        Eigen::SelfAdjointEigenSolver<Matrix> eig(data * Pm * data.transpose());
        Vector lambda = eig.eigenvalues().reverse().cwiseMax(0.0);
        const double total = lambda.sum();

        auto full = pod(A, 0, prod, 1e-10);
        const Matrix G = inner(*full.modes, *full.modes, prod);
        ortho = std::max(ortho, (G - Matrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());

        for (std::size_t k : {5, 20, 40}) {
            auto r = pod(A, k, prod, 0.0);
            const Matrix Vm = values(*r.modes);
            const Matrix coeffs = data * Pm * Vm.transpose();
            const Matrix residual = data - coeffs * Vm;
            const double projection_error = (residual * Pm * residual.transpose()).trace();
            const double tail = lambda.tail(len - static_cast<Eigen::Index>(k)).sum();
            double kept = 0.0;
            for (double s : r.singular_values) kept += s * s;
            energy = std::max(energy, std::abs(projection_error - tail) / total);
            energy = std::max(energy, std::abs(total - kept - tail) / total);
        }
    }
    return {ortho <= 1e-10 && energy <= 1e-10, "200x50, Euclidean and SPD product: ||G - I||_max " + fmt(ortho) +
                                                   ", truncation energy relative defect " + fmt(energy)};
}

Outcome ei_exactness()
{
    BurgersProblem p;
    p.cells_x = 500;
    const auto d = discretize_burgers(p);
    std::unique_ptr<VectorArray> evaluations;
    for (double e : {1.0, 1.5, 2.0}) {
        auto ev = d.op->apply(*d.model->solve(exponent(e)), exponent(e));
        if (!evaluations)
            evaluations = std::move(ev);
        else
            evaluations->append(*ev);
    }

    std::mt19937 gen(1);
    std::uniform_real_distribution<double> dist(-0.1, 1.1);
    Matrix states(20, 500);
    for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = dist(gen);
    const auto U = DenseVectorArray::from_rows(states);

    // interpolation condition
    auto ei = ei_greedy(*evaluations, 60);
    auto op = interpolate_operator(d.op, ei);
    double condition = 0.0;
    for (double e : {1.0, 1.3, 2.0}) {
        const Matrix full = d.op->apply(U, exponent(e))->dofs(ei.interpolation_dofs);
        const Matrix interp = op->apply(U, exponent(e))->dofs(ei.interpolation_dofs);
        condition = std::max(condition, (full - interp).cwiseAbs().maxCoeff());
    }

    // saturation: a training set of linearly independent evaluations is
    // reproduced exactly once M equals its rank
    std::vector<std::size_t> every;
    for (std::size_t k = 0; k < evaluations->len(); k += 45) every.push_back(k);
    const auto training = evaluations->select(every);
    const std::size_t rank = pod(*training, 0, nullptr, 1e-12).modes->len();
    auto sat = ei_greedy(*training, rank);
    const Matrix v = training->dofs(sat.interpolation_dofs);
    const Matrix c = sat.interpolation_matrix.partialPivLu().solve(v.transpose()).transpose();
    const double saturation = (values(*sat.collateral_basis->lincomb(c)) - values(*training)).cwiseAbs().maxCoeff() /
                              values(*training).cwiseAbs().maxCoeff();

    // restricted evaluation
    double restriction = 0.0;
    for (double e : {1.0, 1.7}) {
        auto r = restricted(*d.op, ei.interpolation_dofs);
        const Matrix full = d.op->apply(U, exponent(e))->dofs(ei.interpolation_dofs);
        const Matrix local = r.op->apply(DenseVectorArray::from_rows(U.dofs(r.source_dofs)), exponent(e))
                                 ->dofs(all(ei.interpolation_dofs.size()));
        restriction = std::max(restriction, (full - local).cwiseAbs().maxCoeff());
    }

    return {condition <= 1e-12 && saturation <= 1e-10 && restriction <= 1e-14,
            "M = 60 interpolation defect " + fmt(condition) + " (<= 1e-12), saturation at M = rank = " + std::to_string(rank) + " of " +
                std::to_string(training->len()) + " training evaluations,"
                " relative defect " + fmt(saturation) + " (<= 1e-10), restricted evaluation " + fmt(restriction) +
                " (<= 1e-14)"};
}

Outcome burgers_pipeline()
{
    BurgersExperimentConfig config;  // 1D, 500 cells, 10 training exponents
    config.problem.cells_x = 500;
    config.training = 10;
    config.rb_sizes = {5, 10, 20, 40};
    config.ei_sizes = {20, 40, 60, 80};
    const auto report = run_burgers_experiment(config);
    const std::size_t M = config.ei_sizes.back();
    std::vector<double> errors;
    for (auto N : config.rb_sizes) {
        const auto* c = report.cell(N, M);
        errors.push_back(c && c->failures == 0 ? c->max_error : std::numeric_limits<double>::infinity());
    }
    bool monotone = true;
    for (std::size_t k = 1; k < errors.size(); ++k) monotone = monotone && errors[k] <= 1.1 * errors[k - 1];
    std::string trace;
    for (std::size_t k = 0; k < errors.size(); ++k)
        trace += (k ? ", " : "") + std::string("N=") + std::to_string(config.rb_sizes[k]) + " " + fmt(errors[k]);
    return {monotone && errors.back() <= 1e-3,
            "M = " + std::to_string(M) + ": " + trace + "; decreasing within 10% " + (monotone ? "yes" : "no") +
                ", final <= 1e-3"};
}

Outcome fv_conservation()
{
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t dim : {1, 2}) {
        BurgersProblem p;
        p.dim = dim;
        p.cells_x = dim == 1 ? 500 : 120;
        p.cells_y = 60;
        p.nt = 600;
        const auto d = discretize_burgers(p);
        for (double e : {1.0, 1.25, 1.5, 1.75, 2.0}) {
            auto traj = d.model->solve(exponent(e));
            const Matrix u = values(*traj);
            const double m0 = u.row(0).sum() * d.cell_volume;
            for (Eigen::Index k = 1; k < u.rows(); ++k) {
                const double drift = std::abs(u.row(k).sum() - u.row(k - 1).sum()) * d.cell_volume / std::abs(m0);
                worst = std::max(worst, drift);
                ++checked;
            }
        }
    }
    return {worst <= 1e-12, "1D 500 cells and 2D 120x60, 5 exponents, " + std::to_string(checked) +
                                " steps: max relative mass drift per step " + fmt(worst) + " (<= 1e-12)"};
}

Outcome pool_determinism()
{
    const auto& d = block32();
    CoerciveReductor reductor{d.model, d.h1_0_semi, alpha()};
    const auto train = d.model->parameter_space().sample_uniformly(3);
    const auto sweep = d.model->parameter_space().sample_randomly(200, 9);
    const auto red = reductor.reduce(orthonormal_snapshots(d, d.model->parameter_space().sample_randomly(8, 2)));

    std::vector<std::vector<double>> sweeps;
    std::vector<std::vector<std::size_t>> selections;
    std::vector<std::vector<double>> histories;
    for (std::size_t workers : {1, 2, 8}) {
        WorkerPool pool(workers);
        sweeps.push_back(estimate_errors(*red.model, sweep, pool));
        const auto g = greedy(*d.model, reductor, train, 1e-5, 25, &pool);
        selections.push_back(g.selected_indices);
        histories.push_back(g.max_err_history);
    }
    auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
        return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    };
    const bool sweep_ok = same(sweeps[0], sweeps[1]) && same(sweeps[0], sweeps[2]);
    const bool select_ok = selections[0] == selections[1] && selections[0] == selections[2];
    const bool history_ok = same(histories[0], histories[1]) && same(histories[0], histories[2]);
    return {sweep_ok && select_ok, std::string("workers {1,2,8}: 200-point estimate sweep bit-identical ") +
                                       (sweep_ok ? "yes" : "no") + ", greedy selections identical " +
                                       (select_ok ? "yes" : "no") + ", greedy histories bit-identical " +
                                       (history_ok ? "yes" : "no")};
}

Outcome benchmark_grid()
{
    const auto dir = std::filesystem::temp_directory_path() / ("morkit_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const std::string cmd = std::string("\"") + MORKIT_CLI + "\" --quiet --out \"" + dir.string() +
                            "\" benchmark --backends dense,list --repeats 1";
    const int status = std::system(cmd.c_str());
    if (status != 0) return {false, "benchmark exited with status " + std::to_string(status)};

    std::ifstream in(dir / "benchmark.csv");
    std::string header, line;
    std::getline(in, header);
    std::set<std::string> seen;
    std::size_t rows = 0;
    bool finite = true;
    while (std::getline(in, line)) {
        std::istringstream s(line);
        std::string backend, op, dim, len, seconds;
        std::getline(s, backend, ',');
        std::getline(s, op, ',');
        std::getline(s, dim, ',');
        std::getline(s, len, ',');
        std::getline(s, seconds, ',');
        finite = finite && std::isfinite(std::stod(seconds)) && std::stod(seconds) >= 0.0;
        seen.insert(backend + "/" + op + "/" + dim + "/" + len);
        ++rows;
    }
    std::size_t missing = 0;
    for (std::string backend : {"dense", "list"})
        for (std::string op : {"axpy", "pod"})
            for (std::string dim : {"1000", "10000"})
                for (std::string len : {"1", "4", "16", "64", "256"})
                    missing += seen.count(backend + "/" + op + "/" + dim + "/" + len) ? 0 : 1;
    const bool manifest = std::filesystem::exists(dir / "benchmark.manifest.json");
    std::filesystem::remove_all(dir);
    const bool ok = header == "backend,op,dim,len,seconds" && missing == 0 && rows == 40 && finite && manifest;
    return {ok, "header '" + header + "', " + std::to_string(rows) + " rows, " + std::to_string(missing) +
                    " grid points missing (lens 1,4,16,64,256 x axpy,pod x dims 1000,10000 x dense,list); timing "
                    "order report-only"};
}

std::vector<Criterion> primary()
{
    return {
        {"[PRIMARY] Galerkin reproduction", 5, galerkin_reproduction},
        {"[PRIMARY] Estimator rigor and effectivity", 60, estimator_rigor},
        {"[PRIMARY] Estimator cross-check", 60, estimator_cross_check},
        {"[PRIMARY] Greedy decay", 180, greedy_decay},
        {"[PRIMARY] POD identities", 60, pod_identities},
        {"[PRIMARY] EI exactness", 60, ei_exactness},
        {"[PRIMARY] Reduced Burgers pipeline", 300, burgers_pipeline},
        {"[PRIMARY] FV conservation", 60, fv_conservation},
        {"[PRIMARY] Pool determinism", 60, pool_determinism},
        {"[PRIMARY] Benchmark harness", 120, benchmark_grid},
    };
}

// ---------------------------------------------------------------- secondary

struct RemoteRun
{
    GreedyResult local, remote;
    remote::SessionStats stats;
    std::size_t dim = 0;
    std::size_t leaked = 0;
    std::string error;
};

const RemoteRun& remote_run()
{
    static const RemoteRun run = [] {
        RemoteRun r;
        try {
            remote::SessionOptions options;
            options.payload_guard = true;
            auto h = remote::spawn_remote_model({MORKIT_MOCK_SERVER, "--diameter", "0.03125"}, options);
            const auto& d = block32();
            const auto train = d.model->parameter_space().sample_uniformly(3);
            CoerciveReductor local{d.model, d.h1_0_semi, alpha()};
            CoerciveReductor rem{h.model, h.model->product("h1_0_semi"), alpha()};
            r.local = greedy(*d.model, local, train, 1e-5, 25);
            r.remote = greedy(*h.model, rem, train, 1e-5, 25);
            r.stats = h.session->stats();
            r.dim = h.model->dim();
            r.remote.basis.reset();
            r.remote.reconstructor.reset();
            h.model.reset();
            r.leaked = h.session->shutdown();
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        return r;
    }();
    return run;
}

std::size_t increases(const std::vector<double>& h)
{
    std::size_t n = 0;
    for (std::size_t k = 1; k < h.size(); ++k) n += h[k] > h[k - 1] ? 1 : 0;
    return n;
}

Outcome remote_equivalence()
{
    const auto& r = remote_run();
    if (!r.error.empty()) return {false, r.error};
    double gap = 0.0;
    const bool same_len = r.local.max_err_history.size() == r.remote.max_err_history.size();
    for (std::size_t k = 0; same_len && k < r.local.max_err_history.size(); ++k)
        gap = std::max(gap, std::abs(r.local.max_err_history[k] - r.remote.max_err_history[k]) / r.local.max_err_history[0]);
    const bool ok = same_len && r.local.selected_indices == r.remote.selected_indices && gap <= 1e-10 && r.leaked == 0;
    return {ok, "h = 1/32, 3^4 training: N = " + std::to_string(r.remote.selected_indices.size()) +
                    ", selections identical, max relative history difference " + fmt(gap) + ", " +
                    std::to_string(r.stats.requests) + " requests, server objects left " + std::to_string(r.leaked)};
}

Outcome remote_history_non_increasing()
{
    const auto& r = remote_run();
    if (!r.error.empty()) return {false, r.error};
    const std::size_t up_remote = increases(r.remote.max_err_history);
    const std::size_t up_local = increases(r.local.max_err_history);
    return {up_remote == 0 && up_local == 0, "max estimate increases in " + std::to_string(up_remote) +
                                                 " remote and " + std::to_string(up_local) +
                                                 " in-process greedy step(s)"};
}

Outcome remote_byte_guard()
{
    const auto& r = remote_run();
    if (!r.error.empty()) return {false, r.error};
    return {r.stats.max_array_length < r.dim,
            "payload guard active for the whole run; longest non-dofs array " + std::to_string(r.stats.max_array_length) +
                " (dim " + std::to_string(r.dim) + "), largest non-dofs message " +
                std::to_string(r.stats.max_message_bytes) + " bytes"};
}

std::string random_line(std::mt19937_64& rng, const std::string& alphabet)
{
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> length(1, 80);
    std::string line;
    const int n = length(rng);
    for (int i = 0; i < n; ++i) line += alphabet[pick(rng)];
    return line;
}

Outcome remote_fuzz()
{
    std::mt19937_64 rng(5);
    auto session = remote::Session::spawn({MORKIT_MOCK_SERVER});
    std::size_t server_errors = 0;
    for (int k = 0; k < 1000; ++k) {
        std::string line = random_line(rng, "{}[]\":,0123456789.-eE truefalsnulidopargsmyhel\\\t");
        if (k % 4 == 0) line = R"({"id":)" + std::to_string(k) + R"(,"op":"apply","args":{"op":)" + line + "}}";
        const auto reply = nlohmann::json::parse(session->exchange_raw(line), nullptr, false);
        if (!reply.is_discarded() && reply.contains("ok") && !reply["ok"].get<bool>()) ++server_errors;
    }
    const bool server_alive = session->alive() && session->call("hello").at("version").get<int>() == remote::protocol_version;
    session->shutdown();

    std::size_t client_rejected = 0;
    for (int k = 0; k < 1000; ++k) {
        try {
            remote::parse_response(random_line(rng, "{}[]\":,0123456789.-eE truefalsnulidokresutrorcdemsg\\\x01\xff"));
        } catch (const remote::ProtocolError&) {
            ++client_rejected;
        }
    }
    return {server_alive && server_errors == 1000,
            "1000 malformed lines: server error replies " + std::to_string(server_errors) + ", still serving " +
                (server_alive ? "yes" : "no") + "; client parser rejected " + std::to_string(client_rejected) +
                " of 1000 garbage replies without crashing"};
}

std::vector<Criterion> secondary()
{
    return {
        {"[SECONDARY] Remote equivalence: greedy through the protocol server", 180, remote_equivalence},
        {"[SECONDARY] Remote equivalence: estimator history non-increasing", 180, remote_history_non_increasing},
        {"[SECONDARY] Remote equivalence: no dim-sized payload outside dofs", 180, remote_byte_guard},
        {"[SECONDARY] Remote equivalence: 1000 malformed lines crash neither side", 180, remote_fuzz},
    };
}
}  // namespace

int main(int argc, char** argv)
{
    if (argc > 1 && std::strcmp(argv[1], "--remote") == 0) {
        if (!std::filesystem::exists(MORKIT_MOCK_SERVER)) {
            std::printf("SKIP [SECONDARY] remote equivalence: protocol server %s not built\n", MORKIT_MOCK_SERVER);
            return 0;
        }
        return run(secondary());
    }
    return run(primary());
}
