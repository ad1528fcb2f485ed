#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>

#include "common.hpp"
#include "morkit/algorithms.hpp"
#include "morkit/random.hpp"
#include "morkit/remote.hpp"

namespace morkit::cli
{

namespace
{
DenseVectorArray random_dense(std::size_t dim, std::size_t len, std::uint64_t seed)
{
    DenseVectorArray a(dim, len);
    Xoshiro256 rng(seed);
    for (auto& v : a.data()) v = rng.uniform(-1.0, 1.0);
    return a;
}

std::unique_ptr<VectorArray> make_local(const std::string& backend, std::size_t dim, std::size_t len, std::uint64_t seed)
{
    auto dense = random_dense(dim, len, seed);
    if (backend == "list") return std::make_unique<ListVectorArray>(ListVectorArray::from_dense(dense));
    return std::make_unique<DenseVectorArray>(std::move(dense));
}

/// best-of-`repeats` wall time; `prepare` runs untimed before each repeat
double best_of(std::size_t repeats, const std::function<void()>& prepare, const std::function<void()>& body)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < repeats; ++r) {
        prepare();
        Stopwatch w;
        body();
        best = std::min(best, w.seconds());
    }
    return best;
}

struct Row
{
    std::string backend, op;
    std::size_t dim, len;
    double seconds;
};

void measure(const std::string& backend, const std::string& op, std::size_t dim, std::size_t len, std::size_t repeats,
             const std::function<std::unique_ptr<VectorArray>(std::uint64_t)>& make, std::vector<Row>& rows)
{
    auto x = make(2);
    std::unique_ptr<VectorArray> a;
    double seconds = 0.0;
    if (op == "axpy") {
        seconds = best_of(repeats, [&] { a = make(1); }, [&] { a->axpy(1.0, *x); });
    } else {
        a = make(1);
        seconds = best_of(repeats, [] {}, [&] { (void)pod(*a); });
    }
    rows.push_back({backend, op, dim, len, seconds});
}
}  // namespace

int run_benchmark(const BenchmarkOptions& o, const Context& ctx)
{
    Manifest manifest;
    manifest.command = "benchmark";
    manifest.argv = ctx.argv;
    Stopwatch total;
    if (o.repeats == 0) throw UsageError("--repeats must be positive");
    for (const auto& op : o.ops)
        if (op != "axpy" && op != "pod") throw UsageError("--op must be axpy or pod, got '" + op + "'");
    for (const auto& b : o.backends)
        if (b != "dense" && b != "list" && b != "remote") throw UsageError("unknown backend '" + b + "'");
    manifest.config = {{"ops", o.ops},           {"dims", o.dims},        {"lens", o.lens},
                       {"backends", o.backends}, {"repeats", o.repeats}, {"csv_schema", "benchmark/1"}};

    std::vector<Row> rows;
    for (const auto& backend : o.backends) {
        if (backend == "remote") {
            const std::string server = o.server.empty() ? sibling_executable("morkit_mock_server").string() : o.server;
            remote::RemoteModelHandle h;
            try {
                h = remote::spawn_remote_model({server});
            } catch (const std::exception& e) {
                const std::string note = std::string("remote backend skipped: ") + e.what();
                std::cerr << note << '\n';
                manifest.notes.push_back(note);
                continue;
            }
            const std::size_t dim = h.model->dim();
            manifest.notes.push_back("remote backend measured at the server dimension " + std::to_string(dim));
            std::shared_ptr<VectorArray> u = h.model->solve(h.model->parameter_space().sample_uniformly(1)[0]);
            for (const auto& op : o.ops)
                for (auto len : o.lens) {
                    auto make = [&](std::uint64_t seed) {
                        Matrix c(static_cast<Eigen::Index>(len), 1);
                        Xoshiro256 rng(seed);
                        for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, 0) = rng.uniform(-1.0, 1.0);
                        return u->lincomb(c);
                    };
                    measure("remote", op, dim, len, o.repeats, make, rows);
                }
            u.reset();
            h.model.reset();
            h.session->shutdown();
            continue;
        }
        for (const auto& op : o.ops)
            for (auto dim : o.dims)
                for (auto len : o.lens)
                    measure(backend, op, dim, len, o.repeats,
                            [&](std::uint64_t seed) { return make_local(backend, dim, len, seed); }, rows);
    }

    const auto csv = ctx.out / "benchmark.csv";
    {
        auto out = open_output(csv);
        out << "backend,op,dim,len,seconds\n";
        for (const auto& r : rows) out << r.backend << ',' << r.op << ',' << r.dim << ',' << r.len << ',' << r.seconds << '\n';
    }
    manifest.outputs.push_back(csv.string());
    manifest.results["rows"] = rows.size();
    manifest.notes.push_back("timing comparisons between backends are report-only");
    if (!ctx.quiet) {
        char line[128];
        std::snprintf(line, sizeof line, "%-8s %-5s %9s %5s %12s\n", "backend", "op", "dim", "len", "seconds");
        std::cout << line;
        for (const auto& r : rows) {
            std::snprintf(line, sizeof line, "%-8s %-5s %9zu %5zu %12.3e\n", r.backend.c_str(), r.op.c_str(), r.dim, r.len,
                          r.seconds);
            std::cout << line;
        }
    }
    manifest.timings["total"] = total.seconds();
    manifest.write(ctx.out, exit_ok);
    return exit_ok;
}

}  // namespace morkit::cli
