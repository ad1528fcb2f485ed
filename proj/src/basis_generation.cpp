#include "morkit/basis_generation.hpp"

#include <chrono>

#include "morkit/algorithms.hpp"
#include "morkit/errors.hpp"

namespace morkit
{

namespace
{
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::shared_ptr<const ReducedStationaryModel> as_shared(const StationaryReduction& r) { return r.model; }
}  // namespace

StationaryReduction CoerciveReductor::reduce(std::shared_ptr<const VectorArray> basis) const
{
    return reduce_stationary_coercive(*model, std::move(basis), *product, coercivity, variant);
}

std::unique_ptr<VectorArray> snapshots(const StationaryModel& model, const std::vector<Parameter>& training_set)
{
    if (training_set.empty()) throw InvalidArgument("snapshots: empty training set");
    auto result = model.solve(training_set.front());
    for (std::size_t i = 1; i < training_set.size(); ++i) result->append(*model.solve(training_set[i]));
    return result;
}

std::unique_ptr<VectorArray> naive_basis(const StationaryModel& model, std::size_t n, std::uint64_t seed,
                                         const Operator* product)
{
    if (n == 0) throw InvalidArgument("naive_basis: n must be >= 1");
    auto s = snapshots(model, model.parameter_space().sample_randomly(n, seed));
    return std::move(gram_schmidt(*s, product).basis);
}

PodResult pod_basis(const StationaryModel& model, const std::vector<Parameter>& training_set, std::size_t modes,
                    const Operator* product, double rtol)
{
    return pod(*snapshots(model, training_set), modes, product, rtol);
}

std::vector<double> estimate_errors(const ReducedStationaryModel& rm, const std::vector<Parameter>& parameters,
                                    WorkerPool& pool)
{
    if (!pool.has_task("greedy_estimate"))
        pool.register_task<double, Parameter, ReducedStationaryModel>(
            "greedy_estimate", [](const Parameter& mu, const ReducedStationaryModel& m) { return m.estimate(m.solve(mu), mu); });
    // non-owning alias: the caller keeps rm alive for the duration of the map
    std::shared_ptr<const ReducedStationaryModel> ctx(&rm, [](const ReducedStationaryModel*) {});
    return pool.map<double, Parameter, ReducedStationaryModel>("greedy_estimate", parameters, ctx);
}

std::string to_string(GreedyResult::Status status)
{
    switch (status) {
        case GreedyResult::Status::tolerance_reached: return "tolerance_reached";
        case GreedyResult::Status::max_size_reached: return "max_size_reached";
        case GreedyResult::Status::stagnated: return "stagnated";
        case GreedyResult::Status::extension_failed: return "extension_failed";
    }
    return "unknown";
}

nlohmann::json GreedyResult::to_json() const
{
    nlohmann::json j;
    j["basis_size"] = basis ? basis->len() : 0;
    j["max_err_history"] = max_err_history;
    j["selected_indices"] = selected_indices;
    auto params = nlohmann::json::array();
    for (const auto& mu : selected_parameters) params.push_back(morkit::to_json(mu));
    j["selected_parameters"] = params;
    j["status"] = to_string(status);
    j["diagnostic"] = diagnostic;
    j["timings"] = {{"estimate", timings.estimate}, {"solve", timings.solve}, {"extend", timings.extend},
                    {"reduce", timings.reduce},     {"total", timings.total}};
    return j;
}

GreedyResult greedy(const StationaryModel& model, const CoerciveReductor& reductor,
                    const std::vector<Parameter>& training_set, double tol, std::optional<std::size_t> max_size,
                    WorkerPool* pool)
{
    if (training_set.empty()) throw InvalidArgument("greedy: empty training set");
    if (!(tol > 0.0) && !max_size) throw InvalidArgument("greedy: need tol > 0 or a maximum basis size");
    WorkerPool local_pool(1);
    WorkerPool& p = pool ? *pool : local_pool;

    const auto start = Clock::now();
    GreedyResult result;
    std::shared_ptr<const VectorArray> basis = model.rhs()->as_range_array(training_set.front())->zeros(0);

    auto t = Clock::now();
    auto reduction = reductor.reduce(basis);
    result.timings.reduce += seconds_since(t);

    while (true) {
        t = Clock::now();
        const auto estimates = estimate_errors(*reduction.model, training_set, p);
        result.timings.estimate += seconds_since(t);

        std::size_t best = 0;
        for (std::size_t i = 1; i < estimates.size(); ++i)
            if (estimates[i] > estimates[best]) best = i;
        const double max_err = estimates[best];
        result.max_err_history.push_back(max_err);

        if (max_err <= tol) {
            result.status = GreedyResult::Status::tolerance_reached;
            break;
        }
        if (max_size && basis->len() >= *max_size) {
            result.status = GreedyResult::Status::max_size_reached;
            break;
        }
        const auto& h = result.max_err_history;
        if (h.size() > 3 && !(h.back() < (1.0 - 1e-10) * h[h.size() - 4])) {
            result.status = GreedyResult::Status::stagnated;
            result.diagnostic = "max estimated error did not decrease over 3 iterations (" + std::to_string(h.back()) + ")";
            break;
        }

        t = Clock::now();
        auto snapshot = model.solve(training_set[best]);
        result.timings.solve += seconds_since(t);

        t = Clock::now();
        auto extended = basis->copy();
        extended->append(*snapshot);
        auto gs = gram_schmidt(*extended, reductor.product.get(), basis->len());
        result.timings.extend += seconds_since(t);
        if (!gs.dropped.empty()) {
            result.status = GreedyResult::Status::extension_failed;
            result.diagnostic = "snapshot at " + training_set[best].to_string() + " is linearly dependent on the basis";
            break;
        }
        basis = std::shared_ptr<const VectorArray>(std::move(gs.basis));
        result.selected_parameters.push_back(training_set[best]);
        result.selected_indices.push_back(best);

        t = Clock::now();
        reduction = reductor.reduce(basis);
        result.timings.reduce += seconds_since(t);
    }

    result.basis = basis;
    result.reduced_model = as_shared(reduction);
    result.reconstructor = std::make_shared<Reconstructor>(reduction.reconstructor);
    result.timings.total = seconds_since(start);
    return result;
}

PodGreedyExtension pod_greedy_extension(const VectorArray& basis, const VectorArray& trajectory,
                                        const Operator* product, std::size_t modes, double zero_rtol)
{
    if (basis.dim() != trajectory.dim()) throw DimensionMismatch("pod_greedy_extension: dimension mismatch");
    PodGreedyExtension result;
    auto error = trajectory.copy();
    if (basis.len() > 0) {
        const Matrix coeffs = inner(basis, trajectory, product);  // N x len
        error->axpy(-1.0, *basis.lincomb(coeffs.transpose()));
    }
    result.basis = basis.copy();
    if (error->len() == 0) return result;
    if (norms(*error, product).maxCoeff() <= zero_rtol * norms(trajectory, product).maxCoeff()) return result;

    auto p = pod(*error, modes, product);
    result.singular_values = p.singular_values;
    const std::size_t before = basis.len();
    result.basis->append(*p.modes);
    auto gs = gram_schmidt(*result.basis, product, before);
    result.basis = std::move(gs.basis);
    result.added = result.basis->len() - before;
    return result;
}

}  // namespace morkit
