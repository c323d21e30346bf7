#include "commands.hpp"

#include "qcurv/balancing.hpp"
#include "qcurv/interactions.hpp"
#include "qcurv/quadrature.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace qcurv;

namespace {

int fail(int code, const std::string& kind, const std::string& msg) {
    Json err{{"error", kind}, {"message", msg}, {"exit_code", code}};
    std::cerr << err.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcurv: kernels, Delaunay sweeps, interaction constants, balancing and residual diagnostics"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    double tol = -1.0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config or a manifest from an earlier run")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--tol", tol, "override the command tolerance");
    app.add_option("--threads", threads, "worker threads (QCURV_THREADS if unset)");
    app.fallthrough();
    for (const auto& name : cli::command_names()) app.add_subcommand(name, "run " + name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string command = app.get_subcommands().front()->get_name();
    cli::RunOptions opt{tol, threads};
    if (threads > 0) setenv("QCURV_THREADS", std::to_string(threads).c_str(), 1);

    try {
        Json cfg = cli::resolve_config(command, cli::unwrap_manifest(read_json_file(config_path), command), opt);
        cli::Outputs out = cli::run_command(command, cfg, opt);
        Json manifest = cli::make_manifest(command, cfg, out, opt);

        fs::create_directories(out_dir);
        for (const auto& [name, content] : out.files) write_file_atomic(fs::path(out_dir) / name, content);
        write_file_atomic(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
        std::cout << out.summary.dump(2) << '\n';
        return 0;
    } catch (const ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const ParamError& e) {
        return fail(2, "config", e.what());
    } catch (const Json::exception& e) {
        return fail(2, "config", e.what());
    } catch (const SolverError& e) {
        return fail(3, "solver", e.what());
    } catch (const QuadratureError& e) {
        return fail(3, "quadrature", e.what());
    } catch (const std::exception& e) {
        return fail(3, "runtime", e.what());
    }
}
