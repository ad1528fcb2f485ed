#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "common.hpp"
#include "morkit/errors.hpp"

using namespace morkit::cli;

int main(int argc, char** argv)
{
    CLI::App app{"morkit: reduced basis experiments"};
    app.require_subcommand(1);
    Context ctx;
    ctx.argv.assign(argv, argv + argc);
    std::string out = ".";
    std::size_t workers = 0;
    app.add_option("--out", out, "directory for CSV files and the run manifest");
    app.add_option("--workers", workers, "worker pool size (default: MORKIT_WORKERS or 1)")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", ctx.quiet, "no tables on stdout");

    ThermalBlockOptions tb;
    auto* tbc = app.add_subcommand("thermalblock", "thermal block basis generation and error decay");
    tbc->add_option("--blocks", tb.blocks, "block layout MxN")->capture_default_str();
    tbc->add_option("--diameter", tb.diameter, "mesh diameter, e.g. 1/32")->capture_default_str();
    tbc->add_option("--method", tb.method)->check(CLI::IsMember({"naive", "pod", "greedy"}))->capture_default_str();
    tbc->add_option("--snapshots", tb.snapshots, "training points per parameter dimension (pod, greedy)")
        ->capture_default_str();
    tbc->add_option("--rb-size", tb.rb_size, "maximal basis size")->capture_default_str();
    tbc->add_option("--test-size", tb.test_size)->capture_default_str();
    tbc->add_option("--seed", tb.seed)->capture_default_str();
    tbc->add_option("--tol", tb.tol, "greedy tolerance")->capture_default_str();
    tbc->add_option("--estimator", tb.estimator)
        ->check(CLI::IsMember({"orthonormalized", "gramian"}))
        ->capture_default_str();

    BurgersOptions bu;
    auto* buc = app.add_subcommand("burgers", "Burgers EI + POD reduction error table");
    buc->add_option("--dim", bu.dim)->check(CLI::IsMember({1, 2}))->capture_default_str();
    buc->add_option("--cells", bu.cells, "cells along x")->capture_default_str();
    buc->add_option("--cells-y", bu.cells_y, "cells along y (2D, default cells/2)");
    buc->add_option("--exponent-range", bu.exponent_range)->capture_default_str();
    buc->add_option("--nt", bu.nt)->capture_default_str();
    buc->add_option("--T", bu.T)->check(CLI::PositiveNumber)->capture_default_str();
    buc->add_option("--snapshot-params", bu.snapshot_params)->capture_default_str();
    buc->add_option("--rb-sizes", bu.rb_sizes)->delimiter(',')->capture_default_str();
    buc->add_option("--ei-sizes", bu.ei_sizes)->delimiter(',')->capture_default_str();
    buc->add_option("--test-size", bu.test_size)->capture_default_str();
    buc->add_option("--seed", bu.seed)->capture_default_str();
    buc->add_option("--test-exponents", bu.extra_test_exponents, "additional test exponents")->delimiter(',');

    BenchmarkOptions be;
    auto* bec = app.add_subcommand("benchmark", "axpy / POD timings per backend");
    bec->add_option("--op", be.ops)->delimiter(',')->capture_default_str();
    bec->add_option("--dims", be.dims)->delimiter(',')->capture_default_str();
    bec->add_option("--lens", be.lens)->delimiter(',')->capture_default_str();
    bec->add_option("--backends", be.backends)->delimiter(',')->capture_default_str();
    bec->add_option("--repeats", be.repeats)->capture_default_str();
    bec->add_option("--server", be.server, "protocol server executable for the remote backend");

    RemoteDemoOptions rd;
    auto* rdc = app.add_subcommand("remote-demo", "greedy in-process and through the protocol server");
    rdc->add_option("--server", rd.server, "protocol server executable (default: morkit_mock_server)");
    rdc->add_option("--diameter", rd.diameter)->capture_default_str();
    rdc->add_option("--snapshots", rd.snapshots)->capture_default_str();
    rdc->add_option("--rb-size", rd.rb_size)->capture_default_str();
    rdc->add_option("--tol", rd.tol)->capture_default_str();
    rdc->add_option("--timeout", rd.timeout, "seconds per protocol call")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }
    ctx.out = out;
    if (workers > 0) ctx.workers = workers;

    try {
        if (*tbc) return run_thermalblock(tb, ctx);
        if (*buc) return run_burgers(bu, ctx);
        if (*bec) return run_benchmark(be, ctx);
        return run_remote_demo(rd, ctx);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "morkit: %s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "morkit: %s\n", e.what());
        return exit_failure;
    }
}
