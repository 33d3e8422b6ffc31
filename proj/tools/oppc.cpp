// oppc - command-line front end for scenario runs

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oppc/runner.hpp"

namespace {

using namespace oppc;

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::filesystem::path resolve(const std::string& arg) {
    std::filesystem::path p(arg);
    if (std::filesystem::exists(p)) return p;
    for (const char* ext : {"", ".yaml", ".yml", ".json"}) {
        auto q = scenario_directory() / (arg + ext);
        if (std::filesystem::exists(q)) return q;
    }
    return p;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-photon phase control simulator"};
    app.require_subcommand(1);

    RunOptions options;
    std::string out_dir, format;
    unsigned seed = 0;
    app.add_option("--out-dir", out_dir, "Output directory (default: scenario output.dir)");
    app.add_option("--jobs", options.jobs, "Maximum parallel propagations")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Reserved; engines are deterministic");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    std::string path, parameter;
    std::vector<double> values;

    auto* run = app.add_subcommand("run", "Propagate a scenario and report phase contrast");
    run->add_option("scenario", path, "Scenario file or shipped name")->required();

    auto* sw = app.add_subcommand("sweep", "Run a parameter ladder");
    sw->add_option("scenario", path, "Scenario file or shipped name")->required();
    sw->add_option("--parameter", parameter, "field_scale, coupling_scale, omega_c, beta or mask.<name>.<field>");
    sw->add_option("--values", values, "Parameter values (default: the scenario's sweep block)");

    auto* oc = app.add_subcommand("oracle-compare", "Compare the reduced engine with the exact composite");
    oc->add_option("scenario", path, "Scenario file or shipped name")->required();

    auto* val = app.add_subcommand("validate", "Parse and validate only");
    val->add_option("scenario", path, "Scenario file or shipped name")->required();

    auto* list = app.add_subcommand("list-scenarios", "List shipped scenarios");

    CLI11_PARSE(app, argc, argv);
    if (!out_dir.empty()) options.out_dir = out_dir;
    if (!format.empty()) options.formats = {format};

    try {
        if (list->parsed()) {
            for (const auto& p : shipped_scenarios()) std::cout << p.stem().string() << "\t" << p.string() << "\n";
            return 0;
        }
        const Scenario s = load_scenario(resolve(path));
        if (val->parsed()) {
            std::cout << s.name << ": ok\n";
            return 0;
        }
        if (run->parsed()) {
            print(run_scenario(s, options).summary);
        } else if (sw->parsed()) {
            const std::string p = parameter.empty() ? s.analysis.sweep_parameter : parameter;
            const std::vector<double> v = values.empty() ? s.analysis.sweep_values : values;
            require(!p.empty(), ErrorKind::ValidationError, "sweep.parameter: not given");
            print(sweep(s, p, v, options).summary);
        } else if (oc->parsed()) {
            print(oracle_compare(s, options).summary);
        }
    } catch (const Error& e) {
        std::cerr << "oppc: " << (path.empty() ? "" : path + ": ") << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "oppc: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
