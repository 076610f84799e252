#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ultraheat/errors.hpp"
#include "ultraheat/parallel.hpp"
#include "ultraheat/runner.hpp"

int main(int argc, char** argv)
{
    using namespace ultraheat;
    CLI::App app{"p-adic heat kernels, spectral noise and mild solutions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    for (const char* name : {"kernel", "verify", "spectral", "noise-test", "simulate", "moments"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--threads", threads, "worker threads; 0 = all cores");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    if (!threads) {
        if (const char* env = std::getenv("ULTRAHEAT_THREADS")) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                std::cerr << "ULTRAHEAT_THREADS must be an integer\n";
                return exit_usage;
            }
        }
    }
    set_thread_count(threads.value_or(0));

    RunConfig config;
    try {
        std::string text = "{}";
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            std::stringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        config = parse_config(text);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    }
    config.command = app.get_subcommands().front()->get_name();
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output = out_dir;
    return run(config, std::cerr);
}
