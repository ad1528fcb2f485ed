#include <algorithm>
#include <cstdio>
#include <iostream>
#include <limits>

#include "common.hpp"
#include "morkit/parallel.hpp"
#include "morkit/toolbox/thermal_block.hpp"

namespace morkit::cli
{

std::vector<DecayRow> error_decay(const StationaryModel& model, const CoerciveReductor& reductor,
                                  const VectorArray& basis, const std::vector<Parameter>& test,
                                  const std::vector<Parameter>* train)
{
    const Operator* product = reductor.product.get();
    auto solve_all = [&](const std::vector<Parameter>& mus) {
        std::vector<std::unique_ptr<VectorArray>> u;
        for (const auto& mu : mus) u.push_back(model.solve(mu));
        return u;
    };
    const auto test_solutions = solve_all(test);
    const auto train_solutions = train ? solve_all(*train) : std::vector<std::unique_ptr<VectorArray>>{};

    std::vector<DecayRow> rows;
    for (std::size_t n = 0; n <= basis.len(); ++n) {
        const auto red = reductor.reduce(std::shared_ptr<const VectorArray>(basis.select_range(0, n)));
        auto error_at = [&](const Parameter& mu, const VectorArray& u, double* estimate) {
            const Vector un = red.model->solve(mu);
            if (estimate) *estimate = red.model->estimate(un, mu);
            auto e = u.copy();
            e->axpy(-1.0, *red.reconstructor.reconstruct(un));
            return norms(*e, product)[0];
        };
        DecayRow row;
        row.n = n;
        row.min_effectivity = std::numeric_limits<double>::infinity();
        row.max_effectivity = 0.0;
        for (std::size_t i = 0; i < test.size(); ++i) {
            double est = 0.0;
            const double err = error_at(test[i], *test_solutions[i], &est);
            row.max_error = std::max(row.max_error, err);
            row.mean_error += err / static_cast<double>(test.size());
            row.max_estimate = std::max(row.max_estimate, est);
            row.mean_estimate += est / static_cast<double>(test.size());
            if (err > 1e-14 * norms(*test_solutions[i], product)[0]) {
                row.min_effectivity = std::min(row.min_effectivity, est / err);
                row.max_effectivity = std::max(row.max_effectivity, est / err);
            }
        }
        if (row.max_effectivity == 0.0) row.min_effectivity = row.max_effectivity = std::numeric_limits<double>::quiet_NaN();
        if (train) {
            double worst = 0.0;
            for (std::size_t i = 0; i < train->size(); ++i)
                worst = std::max(worst, error_at((*train)[i], *train_solutions[i], nullptr));
            row.max_train_error = worst;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_decay_csv(const std::filesystem::path& path, const std::vector<DecayRow>& rows)
{
    auto out = open_output(path);
    out << "n,max_error,mean_error,max_estimate,mean_estimate,min_effectivity,max_effectivity,max_train_error\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.max_error << ',' << r.mean_error << ',' << r.max_estimate << ',' << r.mean_estimate
            << ',' << r.min_effectivity << ',' << r.max_effectivity << ',';
        if (r.max_train_error) out << *r.max_train_error;
        out << '\n';
    }
}

void print_decay(std::ostream& out, const std::string& title, const std::vector<DecayRow>& rows)
{
    out << title << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "%4s  %12s  %12s  %12s  %9s\n", "N", "max error", "max estimate", "train error",
                  "max eff.");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%4zu  %12.4e  %12.4e  %12s  %9.3f\n", r.n, r.max_error, r.max_estimate,
                      r.max_train_error ? std::to_string(*r.max_train_error).c_str() : "-", r.max_effectivity);
        out << line;
    }
}

int run_thermalblock(const ThermalBlockOptions& o, const Context& ctx)
{
    Manifest manifest;
    manifest.command = "thermalblock";
    manifest.argv = ctx.argv;
    Stopwatch total;

    const auto [bx, by] = parse_blocks(o.blocks);
    toolbox::ThermalBlockProblem problem;
    problem.blocks_x = bx;
    problem.blocks_y = by;
    problem.diameter = parse_fraction(o.diameter);
    WorkerPool pool(resolve_pool_size(ctx.workers));
    manifest.config = {{"blocks", {bx, by}},     {"diameter", problem.diameter}, {"method", o.method},
                       {"snapshots", o.snapshots}, {"rb_size", o.rb_size},       {"test_size", o.test_size},
                       {"seed", o.seed},         {"tol", o.tol},               {"workers", pool.size()},
                       {"estimator", o.estimator}, {"csv_schema", "thermalblock_errors/1"}};

    Stopwatch phase;
    const auto d = toolbox::discretize_thermal_block(problem);
    manifest.timings["discretize"] = phase.seconds();
    manifest.results["dim"] = d.model->dim();

    CoerciveReductor reductor{d.model, d.h1_0_semi, ParameterFunctional::min_of("diffusion")};
    reductor.variant = o.estimator == "gramian" ? EstimatorData::Variant::gramian : EstimatorData::Variant::orthonormalized;
    const auto& space = d.model->parameter_space();

    std::vector<Parameter> train;
    std::shared_ptr<const VectorArray> basis;
    phase = {};
    if (o.method == "naive") {
        basis = naive_basis(*d.model, o.rb_size, o.seed + 1, d.h1_0_semi.get());
    } else {
        if (o.snapshots == 0) throw UsageError("--snapshots must be positive");
        train = space.sample_uniformly(o.snapshots);
        if (o.method == "pod") {
            basis = pod_basis(*d.model, train, o.rb_size, d.h1_0_semi.get(), 1e-10).modes;
        } else {
            const auto g = greedy(*d.model, reductor, train, o.tol, o.rb_size, &pool);
            basis = g.basis;
            manifest.results["greedy"] = g.to_json();
            auto out = open_output(ctx.out / "thermalblock_greedy.csv");
            out << "n,max_estimated_error,selected_index\n";
            for (std::size_t k = 0; k < g.max_err_history.size(); ++k) {
                out << k << ',' << g.max_err_history[k] << ',';
                if (k < g.selected_indices.size()) out << g.selected_indices[k];
                out << '\n';
            }
            manifest.outputs.push_back((ctx.out / "thermalblock_greedy.csv").string());
            if (!ctx.quiet) {
                std::cout << "greedy: " << to_string(g.status) << ", N = " << g.basis->len()
                          << ", final max estimate = " << g.max_err_history.back() << '\n';
                const auto ups = std::count_if(g.max_err_history.begin() + 1, g.max_err_history.end(),
                                               [&, k = std::size_t{0}](double v) mutable {
                                                   return v > g.max_err_history[k++];
                                               });
                if (ups > 0) std::cout << "note: max estimate increased in " << ups << " greedy step(s)\n";
            }
        }
    }
    manifest.timings["basis"] = phase.seconds();
    manifest.results["basis_size"] = basis->len();

    // random test set, disjoint from the training grid
    std::vector<Parameter> test;
    for (const auto& mu : space.sample_randomly(o.test_size + train.size(), o.seed)) {
        if (test.size() == o.test_size) break;
        if (std::find(train.begin(), train.end(), mu) == train.end()) test.push_back(mu);
    }

    phase = {};
    const auto rows = error_decay(*d.model, reductor, *basis, test, train.empty() ? nullptr : &train);
    manifest.timings["evaluation"] = phase.seconds();
    write_decay_csv(ctx.out / "thermalblock_errors.csv", rows);
    manifest.outputs.push_back((ctx.out / "thermalblock_errors.csv").string());
    manifest.results["final_max_error"] = rows.back().max_error;
    manifest.results["final_max_estimate"] = rows.back().max_estimate;
    if (!ctx.quiet) print_decay(std::cout, "thermal block, method " + o.method + " (H1_0 seminorm errors on test set)", rows);

    manifest.timings["total"] = total.seconds();
    manifest.write(ctx.out, exit_ok);
    return exit_ok;
}

}  // namespace morkit::cli
