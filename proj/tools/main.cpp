#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "heisenet/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-probe linear-network estimation toolkit"};
    std::string config_path;
    std::string output_path;
    std::uint64_t seed_override = 0;
    int threads_override = 0;
    bool seed_given = false;

    app.add_option("config", config_path, "Path to a key = value config file")->required();
    app.add_option("--output", output_path, "Write the report here instead of standard output");
    app.add_option("--seed", seed_override, "Override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--threads", threads_override, "Worker threads for Monte Carlo runs");

    CLI11_PARSE(app, argc, argv);

    std::ifstream config_file(config_path);
    if (!config_file) {
        std::cerr << "error: cannot open config file '" << config_path << "'\n";
        return 1;
    }
    std::stringstream buffer;
    buffer << config_file.rdbuf();

    heisenet::RunSpec spec;
    try {
        spec = heisenet::parse_config(buffer.str(), std::cerr);
    } catch (const heisenet::ConfigError& error) {
        if (error.line() > 0) {
            std::cerr << "config:" << error.line() << ": " << error.what() << '\n';
        } else {
            std::cerr << "config: " << error.what() << '\n';
        }
        return 1;
    }
    if (seed_given) {
        spec.experiment.seed = seed_override;
    }
    if (threads_override > 0) {
        spec.experiment.threads = threads_override;
    }

    if (output_path.empty()) {
        return heisenet::run(spec, std::cout, std::cerr);
    }
    std::ofstream output(output_path);
    if (!output) {
        std::cerr << "error: cannot open output file '" << output_path << "'\n";
        return 1;
    }
    return heisenet::run(spec, output, std::cerr);
}
