#include "cli/config.hpp"
#include "cli/output.hpp"
#include "cli/runners.hpp"
#include "gcf/errors.hpp"
#include "gcf/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"grand-canonical thermodynamic formalism on finite-alphabet shift spaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    unsigned threads = 0;
    bool threads_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const char* names[] = {"admissibility", "spectrum", "pressure",
                           "sweep",         "grandstats", "maxent"};
    for (const char* n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "experiment config file (JSON)")->required();
        sub->add_option("--out", out_override, "output directory");
        sub->add_option("--threads", threads, "worker thread count")
            ->each([&](const std::string&) { threads_set = true; });
        sub->add_option("--seed", seed, "RNG seed override")
            ->each([&](const std::string&) { seed_set = true; });
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    try {
        gcf::cli::RunContext ctx;
        ctx.cfg = gcf::cli::load_config(config_path);
        if (seed_set) ctx.cfg.seed = seed;

        // out dir: flag > GCF_OUT > config > cwd
        const char* env_out = std::getenv("GCF_OUT");
        if (!out_override.empty())
            ctx.out_dir = out_override;
        else if (env_out && *env_out)
            ctx.out_dir = env_out;
        else
            ctx.out_dir = ctx.cfg.out_dir;

        // threads: flag > GCF_THREADS > hardware default
        if (threads_set) {
            gcf::set_thread_count(threads);
        } else if (const char* env_threads = std::getenv("GCF_THREADS")) {
            gcf::set_thread_count(static_cast<unsigned>(std::strtoul(env_threads, nullptr, 10)));
        }

        auto t0 = std::chrono::steady_clock::now();
        int code = gcf::cli::run_command(command, ctx);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::cerr << "[" << gcf::cli::kVersionTag << "] " << command << " finished in " << ms
                  << " ms, exit " << code << "\n";
        return code;
    } catch (const gcf::cli::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return gcf::cli::kConfigError;
    } catch (const gcf::DomainError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return gcf::cli::kConfigError;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return gcf::cli::kMathFailure;
    }
}
