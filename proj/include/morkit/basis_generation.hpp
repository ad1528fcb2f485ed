#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morkit/algorithms.hpp"
#include "morkit/models.hpp"
#include "morkit/parallel.hpp"
#include "morkit/reduction.hpp"

namespace morkit
{

/// Builds a reduced model for a given basis (the "reductor" of the greedy).
struct CoerciveReductor
{
    std::shared_ptr<const StationaryModel> model;
    OperatorPtr product;
    ParameterFunctional coercivity;
    EstimatorData::Variant variant = EstimatorData::Variant::orthonormalized;

    StationaryReduction reduce(std::shared_ptr<const VectorArray> basis) const;
};

/// Gram-Schmidt of snapshots at n random parameters.
std::unique_ptr<VectorArray> naive_basis(const StationaryModel& model, std::size_t n, std::uint64_t seed,
                                         const Operator* product = nullptr);

/// Snapshot matrix of the model at every training parameter (sequential).
std::unique_ptr<VectorArray> snapshots(const StationaryModel& model, const std::vector<Parameter>& training_set);

/// POD modes of the snapshots at the training parameters.
PodResult pod_basis(const StationaryModel& model, const std::vector<Parameter>& training_set, std::size_t modes,
                    const Operator* product = nullptr, double rtol = 1e-7);

struct GreedyResult
{
    enum class Status
    {
        tolerance_reached,
        max_size_reached,
        stagnated,
        extension_failed
    };

    std::shared_ptr<const VectorArray> basis;
    /// max estimated error over the training set, one entry per estimation
    /// sweep (entry k belongs to basis size k)
    std::vector<double> max_err_history;
    std::vector<Parameter> selected_parameters;
    std::vector<std::size_t> selected_indices;
    std::shared_ptr<const ReducedStationaryModel> reduced_model;
    std::shared_ptr<const Reconstructor> reconstructor;
    Status status = Status::tolerance_reached;
    std::string diagnostic;

    struct Timings
    {
        double estimate = 0.0;
        double solve = 0.0;
        double extend = 0.0;
        double reduce = 0.0;
        double total = 0.0;
    } timings;

    nlohmann::json to_json() const;
};

std::string to_string(GreedyResult::Status status);

/// Weak greedy. Each iteration estimates the error on the training set via
/// the pool (task "greedy_estimate"), takes the argmax (lowest index on
/// ties), solves once at that parameter and extends the basis by
/// Gram-Schmidt. Stops when the max estimate is <= tol, when the basis has
/// max_size vectors, or (with a diagnostic) when the max estimate fails to
/// decrease by a factor 1 - 1e-10 over 3 iterations or a snapshot is
/// linearly dependent on the basis.
GreedyResult greedy(const StationaryModel& model, const CoerciveReductor& reductor,
                    const std::vector<Parameter>& training_set, double tol, std::optional<std::size_t> max_size,
                    WorkerPool* pool = nullptr);

/// rm.estimate(rm.solve(mu), mu) for every mu, through the pool.
std::vector<double> estimate_errors(const ReducedStationaryModel& rm, const std::vector<Parameter>& parameters,
                                    WorkerPool& pool);

struct PodGreedyExtension
{
    std::unique_ptr<VectorArray> basis;
    std::size_t added = 0;
    /// leading singular values of the projection-error trajectory
    std::vector<double> singular_values;
};

/// Appends the first `modes` POD modes of the projection error of the
/// trajectory onto span(basis). Adds nothing if that error is zero, i.e. at
/// most zero_rtol times the largest trajectory norm.
PodGreedyExtension pod_greedy_extension(const VectorArray& basis, const VectorArray& trajectory,
                                        const Operator* product = nullptr, std::size_t modes = 1,
                                        double zero_rtol = 1e-12);

}  // namespace morkit
