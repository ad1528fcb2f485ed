#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "morkit/basis_generation.hpp"

namespace morkit::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

/// Flag values that only fail validation after parsing (exit 2).
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Stopwatch
{
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

/// JSON run manifest written to <out>/<command>.manifest.json.
struct Manifest
{
    std::string command;
    std::vector<std::string> argv;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json timings = nlohmann::json::object();
    std::vector<std::string> outputs;
    std::vector<std::string> notes;

    void write(const std::filesystem::path& dir, int exit_code) const;
};

struct Context
{
    std::filesystem::path out = ".";
    std::vector<std::string> argv;
    std::optional<std::size_t> workers;
    bool quiet = false;
};

/// "1/32" or "0.03125"
double parse_fraction(const std::string& s);
/// "MxN"
std::pair<std::size_t, std::size_t> parse_blocks(const std::string& s);
/// "a:b"
std::pair<double, double> parse_range(const std::string& s);

std::ofstream open_output(const std::filesystem::path& path);

/// Path of a sibling executable (same directory as this binary).
std::filesystem::path sibling_executable(const std::string& name);

struct ThermalBlockOptions
{
    std::string blocks = "2x2";
    std::string diameter = "1/32";
    std::string method = "greedy";
    std::size_t snapshots = 3;
    std::size_t rb_size = 25;
    std::size_t test_size = 10;
    std::uint64_t seed = 0;
    double tol = 1e-5;
    std::string estimator = "orthonormalized";
};

struct BurgersOptions
{
    std::size_t dim = 1;
    std::size_t cells = 500;
    std::optional<std::size_t> cells_y;
    std::string exponent_range = "1:2";
    std::size_t nt = 600;
    double T = 0.3;
    std::size_t snapshot_params = 10;
    std::vector<std::size_t> rb_sizes{5, 10, 20, 40};
    std::vector<std::size_t> ei_sizes{20, 40, 60, 80};
    std::size_t test_size = 5;
    std::uint64_t seed = 0;
    std::vector<double> extra_test_exponents;
};

struct BenchmarkOptions
{
    std::vector<std::string> ops{"axpy", "pod"};
    std::vector<std::size_t> dims{1000, 10000};
    std::vector<std::size_t> lens{1, 4, 16, 64, 256};
    std::vector<std::string> backends{"dense", "list", "remote"};
    std::size_t repeats = 5;
    std::string server;
};

struct RemoteDemoOptions
{
    std::string server;
    std::string diameter = "1/32";
    std::size_t snapshots = 3;
    std::size_t rb_size = 25;
    double tol = 1e-5;
    double timeout = 60.0;
};

struct DecayRow
{
    std::size_t n = 0;
    double max_error = 0.0;
    double mean_error = 0.0;
    double max_estimate = 0.0;
    double mean_estimate = 0.0;
    double min_effectivity = 0.0;
    double max_effectivity = 0.0;
    /// max true error over the training set, if one was given
    std::optional<double> max_train_error;
};

/// True (product norm) errors and estimates over `test` for every basis
/// prefix 0..len(basis).
std::vector<DecayRow> error_decay(const StationaryModel& model, const CoerciveReductor& reductor,
                                  const VectorArray& basis, const std::vector<Parameter>& test,
                                  const std::vector<Parameter>* train = nullptr);

void write_decay_csv(const std::filesystem::path& path, const std::vector<DecayRow>& rows);
void print_decay(std::ostream& out, const std::string& title, const std::vector<DecayRow>& rows);

int run_thermalblock(const ThermalBlockOptions& o, const Context& ctx);
int run_burgers(const BurgersOptions& o, const Context& ctx);
int run_benchmark(const BenchmarkOptions& o, const Context& ctx);
int run_remote_demo(const RemoteDemoOptions& o, const Context& ctx);

}  // namespace morkit::cli
