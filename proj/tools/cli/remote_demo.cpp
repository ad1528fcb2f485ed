#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "common.hpp"
#include "morkit/remote.hpp"
#include "morkit/toolbox/thermal_block.hpp"

namespace morkit::cli
{

namespace
{
struct Run
{
    GreedyResult greedy;
    std::vector<DecayRow> rows;
    double seconds = 0.0;
};

Run run_pipeline(std::shared_ptr<const StationaryModel> model, OperatorPtr product, const std::vector<Parameter>& train,
                 const std::vector<Parameter>& test, const RemoteDemoOptions& o)
{
    Stopwatch w;
    CoerciveReductor reductor{model, std::move(product), ParameterFunctional::min_of("diffusion")};
    Run r{greedy(*model, reductor, train, o.tol, o.rb_size), {}, 0.0};
    r.rows = error_decay(*model, reductor, *r.greedy.basis, test);
    r.seconds = w.seconds();
    return r;
}

std::size_t increases(const std::vector<double>& h)
{
    std::size_t n = 0;
    for (std::size_t k = 1; k < h.size(); ++k) n += h[k] > h[k - 1] ? 1 : 0;
    return n;
}
}  // namespace

int run_remote_demo(const RemoteDemoOptions& o, const Context& ctx)
{
    Manifest manifest;
    manifest.command = "remote-demo";
    manifest.argv = ctx.argv;
    const std::string server = o.server.empty() ? sibling_executable("morkit_mock_server").string() : o.server;
    const double h = parse_fraction(o.diameter);
    if (!(o.timeout > 0.0)) throw UsageError("--timeout must be positive");
    manifest.config = {{"server", server}, {"diameter", h},   {"snapshots", o.snapshots},
                       {"rb_size", o.rb_size}, {"tol", o.tol}, {"timeout", o.timeout}};

    toolbox::ThermalBlockProblem problem;
    problem.diameter = h;
    const auto local = toolbox::discretize_thermal_block(problem);
    const auto train = local.model->parameter_space().sample_uniformly(o.snapshots);
    const auto test = local.model->parameter_space().sample_randomly(10, 1);

    const auto in_process = run_pipeline(local.model, local.h1_0_semi, train, test, o);

    remote::SessionOptions options;
    options.timeout = std::chrono::milliseconds(static_cast<long>(o.timeout * 1000));
    options.payload_guard = true;
    Run remote_run;
    remote::SessionStats stats;
    std::size_t leaked = 0;
    try {
        std::ostringstream diameter;
        diameter.precision(17);
        diameter << h;
        auto handle = remote::spawn_remote_model({server, "--diameter", diameter.str()}, options);
        remote_run = run_pipeline(handle.model, handle.model->product("h1_0_semi"), train, test, o);
        stats = handle.session->stats();
        remote_run.greedy.basis.reset();
        remote_run.greedy.reconstructor.reset();
        handle.model.reset();
        leaked = handle.session->shutdown();
    } catch (const remote::SessionError& e) {
        std::cerr << "remote session failed: " << e.what() << '\n';
        manifest.notes.push_back(std::string("session failure: ") + e.what());
        manifest.write(ctx.out, exit_failure);
        return exit_failure;
    }

    const bool same_selection = in_process.greedy.selected_indices == remote_run.greedy.selected_indices;
    double history_gap = 0.0;
    if (in_process.greedy.max_err_history.size() == remote_run.greedy.max_err_history.size())
        for (std::size_t k = 0; k < in_process.greedy.max_err_history.size(); ++k)
            history_gap = std::max(history_gap, std::abs(in_process.greedy.max_err_history[k] -
                                                         remote_run.greedy.max_err_history[k]));
    else
        history_gap = std::numeric_limits<double>::infinity();

    write_decay_csv(ctx.out / "remote_demo_inprocess.csv", in_process.rows);
    write_decay_csv(ctx.out / "remote_demo_remote.csv", remote_run.rows);
    manifest.outputs = {(ctx.out / "remote_demo_inprocess.csv").string(), (ctx.out / "remote_demo_remote.csv").string()};
    manifest.results = {{"in_process", in_process.greedy.to_json()},
                        {"remote", remote_run.greedy.to_json()},
                        {"same_selected_parameters", same_selection},
                        {"max_history_difference", history_gap},
                        {"requests", stats.requests},
                        {"bytes_sent", stats.bytes_sent},
                        {"bytes_received", stats.bytes_received},
                        {"largest_non_dofs_message_bytes", stats.max_message_bytes},
                        {"longest_non_dofs_array", stats.max_array_length},
                        {"dim", local.model->dim()},
                        {"server_live_objects_at_shutdown", leaked}};
    manifest.timings = {{"in_process", in_process.seconds}, {"remote", remote_run.seconds}};

    if (!ctx.quiet) {
        print_decay(std::cout, "in-process thermal block", in_process.rows);
        print_decay(std::cout, "remote server thermal block", remote_run.rows);
        std::cout << "greedy status: in-process " << to_string(in_process.greedy.status) << ", remote "
                  << to_string(remote_run.greedy.status) << '\n'
                  << "selected parameter sequences identical: " << (same_selection ? "yes" : "no") << '\n'
                  << "max |history difference|: " << history_gap << '\n'
                  << "estimate increases along the history: in-process " << increases(in_process.greedy.max_err_history)
                  << ", remote " << increases(remote_run.greedy.max_err_history) << '\n'
                  << "protocol: " << stats.requests << " requests, " << stats.bytes_sent + stats.bytes_received
                  << " bytes, longest non-dofs array " << stats.max_array_length << " (dim " << local.model->dim()
                  << ")\n"
                  << "time: in-process " << in_process.seconds << " s, remote " << remote_run.seconds << " s\n";
    }
    const int code = same_selection && leaked == 0 ? exit_ok : exit_failure;
    manifest.write(ctx.out, code);
    return code;
}

}  // namespace morkit::cli
