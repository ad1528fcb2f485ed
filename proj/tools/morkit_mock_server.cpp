// Protocol v1 server over the in-process thermal block discretization.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "morkit/remote.hpp"
#include "morkit/toolbox/thermal_block.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"morkit protocol v1 mock server (thermal block)"};
    std::size_t bx = 2, by = 2;
    double diameter = 1.0 / 32.0;
    morkit::remote::ServerOptions options;
    app.add_option("--blocks-x", bx)->check(CLI::PositiveNumber);
    app.add_option("--blocks-y", by)->check(CLI::PositiveNumber);
    app.add_option("--diameter", diameter)->check(CLI::PositiveNumber);
    app.add_option("--version", options.version, "protocol version to announce");
    app.add_option("--crash-after", options.crash_after, "exit abruptly after this many requests");
    app.add_option("--hang-after", options.hang_after, "stop responding after this many requests");
    app.add_option("--garbage-after", options.garbage_after, "answer with garbage after this many requests");
    CLI11_PARSE(app, argc, argv);

    try {
        std::ios::sync_with_stdio(false);
        morkit::toolbox::ThermalBlockProblem problem;
        problem.blocks_x = bx;
        problem.blocks_y = by;
        problem.diameter = diameter;
        const auto d = morkit::toolbox::discretize_thermal_block(problem);
        return morkit::remote::serve(*d.model, std::cin, std::cout, options);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "morkit_mock_server: %s\n", e.what());
        return 1;
    }
}
