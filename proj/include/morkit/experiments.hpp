#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "morkit/algorithms.hpp"
#include "morkit/basis_generation.hpp"
#include "morkit/ei.hpp"
#include "morkit/toolbox/burgers.hpp"
#include "morkit/toolbox/thermal_block.hpp"

namespace morkit
{

/// POD of a set of trajectories: each one is compressed with `rtol` first,
/// the modes scaled by their singular values are pooled and compressed
/// again. Avoids a Gramian over all time steps at once.
PodResult pod_of_trajectories(const std::vector<std::shared_ptr<const VectorArray>>& trajectories, std::size_t modes,
                              const Operator* product = nullptr, double rtol = 1e-7);

/// max_t ||u(t) - v(t)|| / max_t ||u(t)||
double relative_linf_l2_error(const VectorArray& reference, const VectorArray& approximation,
                              const Operator* product = nullptr);

struct BurgersExperimentConfig
{
    toolbox::BurgersProblem problem;
    std::size_t training = 10;
    std::vector<std::size_t> rb_sizes{5, 10, 20, 40};
    std::vector<std::size_t> ei_sizes{20, 40, 60, 80};
    std::size_t test_size = 5;
    std::uint64_t seed = 0;
    double pod_rtol = 1e-7;
    /// extra test parameters evaluated in addition to the random ones
    std::vector<double> extra_test_exponents;
};

struct BurgersCell
{
    std::size_t rb_size = 0;
    std::size_t ei_size = 0;
    /// M actually used (capped by the EI training rank)
    std::size_t ei_size_used = 0;
    std::size_t rb_size_used = 0;
    double max_error = 0.0;
    double mean_error = 0.0;
    /// test parameters whose reduced trajectory became non-finite
    std::size_t failures = 0;
};

struct BurgersReport
{
    std::vector<BurgersCell> cells;
    std::vector<double> test_exponents;
    std::vector<double> rb_singular_values;
    std::vector<double> ei_max_errors;
    std::size_t ei_training_size = 0;
    double ei_condition = 0.0;
    struct Timings
    {
        double full_solves = 0.0;
        double ei = 0.0;
        double pod = 0.0;
        double reduced = 0.0;
        double test_full = 0.0;
    } timings;

    const BurgersCell* cell(std::size_t N, std::size_t M) const;
    nlohmann::json to_json() const;
};

/// EI-Greedy on compressed operator evaluations along the training
/// trajectories, POD basis of those trajectories, reduced explicit-Euler
/// solves over the (N, M) grid and relative L-inf-L2 errors over random test
/// exponents.
BurgersReport run_burgers_experiment(const BurgersExperimentConfig& config);

}  // namespace morkit
