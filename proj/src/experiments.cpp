#include "morkit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "morkit/errors.hpp"
#include "morkit/reduction.hpp"

namespace morkit
{

namespace
{
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Parameter exponent(double e) { return Parameter({{"exponent", {e}}}); }
}  // namespace

PodResult pod_of_trajectories(const std::vector<std::shared_ptr<const VectorArray>>& trajectories, std::size_t modes,
                              const Operator* product, double rtol)
{
    if (trajectories.empty()) throw InvalidArgument("pod_of_trajectories: no trajectories");
    std::unique_ptr<VectorArray> pooled;
    for (const auto& t : trajectories) {
        auto p = pod(*t, 0, product, rtol);
        Matrix scale = Matrix::Zero(static_cast<Eigen::Index>(p.singular_values.size()), static_cast<Eigen::Index>(p.modes->len()));
        for (std::size_t k = 0; k < p.singular_values.size(); ++k)
            scale(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = p.singular_values[k];
        auto scaled = p.modes->lincomb(scale);
        if (!pooled)
            pooled = std::move(scaled);
        else
            pooled->append(*scaled);
    }
    return pod(*pooled, modes, product, rtol);
}

double relative_linf_l2_error(const VectorArray& reference, const VectorArray& approximation, const Operator* product)
{
    if (reference.len() != approximation.len()) throw DimensionMismatch("relative error: trajectory lengths differ");
    auto diff = approximation.copy();
    diff->axpy(-1.0, reference);
    const double ref = norms(reference, product).maxCoeff();
    const Vector e = norms(*diff, product);
    for (Eigen::Index i = 0; i < e.size(); ++i)
        if (!std::isfinite(e[i])) return INFINITY;
    return e.maxCoeff() / ref;
}

const BurgersCell* BurgersReport::cell(std::size_t N, std::size_t M) const
{
    for (const auto& c : cells)
        if (c.rb_size == N && c.ei_size == M) return &c;
    return nullptr;
}

nlohmann::json BurgersReport::to_json() const
{
    nlohmann::json j;
    auto arr = nlohmann::json::array();
    for (const auto& c : cells)
        arr.push_back({{"rb_size", c.rb_size}, {"ei_size", c.ei_size},
                       {"rb_size_used", c.rb_size_used}, {"ei_size_used", c.ei_size_used}, {"max_error", c.max_error},
                       {"mean_error", c.mean_error}, {"failures", c.failures}});
    j["cells"] = arr;
    j["test_exponents"] = test_exponents;
    j["rb_singular_values"] = rb_singular_values;
    j["ei_max_errors"] = ei_max_errors;
    j["ei_training_size"] = ei_training_size;
    j["ei_condition"] = ei_condition;
    j["timings"] = {{"full_solves", timings.full_solves}, {"ei", timings.ei},          {"pod", timings.pod},
                    {"reduced", timings.reduced},         {"test_full", timings.test_full}};
    return j;
}

BurgersReport run_burgers_experiment(const BurgersExperimentConfig& config)
{
    if (config.rb_sizes.empty() || config.ei_sizes.empty()) throw InvalidArgument("burgers: empty N or M list");
    const auto d = toolbox::discretize_burgers(config.problem);
    const auto& space = d.model->parameter_space();
    BurgersReport report;

    auto t = Clock::now();
    std::vector<std::shared_ptr<const VectorArray>> trajectories, evaluations;
    for (const auto& mu : space.sample_uniformly(config.training)) {
        std::shared_ptr<const VectorArray> traj = d.model->solve(mu);
        evaluations.push_back(d.op->apply(*traj, mu));
        trajectories.push_back(std::move(traj));
    }
    report.timings.full_solves = seconds_since(t);

    const std::size_t max_N = *std::max_element(config.rb_sizes.begin(), config.rb_sizes.end());
    const std::size_t max_M = *std::max_element(config.ei_sizes.begin(), config.ei_sizes.end());

    t = Clock::now();
    auto compressed = pod_of_trajectories(evaluations, 0, nullptr, config.pod_rtol);
    report.ei_training_size = compressed.modes->len();
    auto scaled = compressed.modes->copy();
    scaled->scal(std::vector<double>(compressed.singular_values.begin(), compressed.singular_values.end()));
    const EIData ei = ei_greedy(*scaled, max_M);
    report.ei_max_errors = ei.max_errors;
    report.ei_condition = ei.condition_number();
    report.timings.ei = seconds_since(t);

    t = Clock::now();
    auto rb = pod_of_trajectories(trajectories, max_N, nullptr, config.pod_rtol);
    report.rb_singular_values = rb.singular_values;
    std::shared_ptr<const VectorArray> basis(std::move(rb.modes));
    report.timings.pod = seconds_since(t);

    report.test_exponents = config.extra_test_exponents;
    for (const auto& mu : space.sample_randomly(config.test_size, config.seed)) report.test_exponents.push_back(mu.at("exponent")[0]);

    t = Clock::now();
    std::vector<std::unique_ptr<VectorArray>> reference;
    for (double e : report.test_exponents) reference.push_back(d.model->solve(exponent(e)));
    report.timings.test_full = seconds_since(t);

    t = Clock::now();
    for (std::size_t M : config.ei_sizes) {
        const EIData eim = ei.truncated(std::min(M, ei.size()));
        auto ei_op = interpolate_operator(d.op, eim);
        InstationaryModel ei_model(ei_op, nullptr, d.model->initial_data_ptr(), d.model->T(), d.model->nt(), {}, space);
        for (std::size_t N : config.rb_sizes) {
            auto red = reduce_instationary(ei_model, basis->select_range(0, std::min(N, basis->len())));
            BurgersCell cell;
            cell.rb_size = N;
            cell.ei_size = M;
            cell.ei_size_used = eim.size();
            cell.rb_size_used = std::min(N, basis->len());
            for (std::size_t k = 0; k < reference.size(); ++k) {
                double err = INFINITY;
                try {
                    auto u = red.model->solve(exponent(report.test_exponents[k]));
                    err = relative_linf_l2_error(*reference[k], *red.reconstructor.reconstruct(*u));
                } catch (const SolverError&) {
                }
                if (!std::isfinite(err)) ++cell.failures;
                cell.max_error = std::max(cell.max_error, err);
                cell.mean_error += err / static_cast<double>(reference.size());
            }
            report.cells.push_back(cell);
        }
    }
    report.timings.reduced = seconds_since(t);
    return report;
}

}  // namespace morkit
