#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ephs/model.hpp"

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ephs::Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ephs::Error("cannot open '" + path + "' for writing");
    out << content;
}

ephs::ValidatorConfig validator_config(int samples, std::uint64_t seed)
{
    ephs::ValidatorConfig config;
    config.samples = samples;
    config.seed = seed;
    return config;
}

/// check: parse, validate reversible/irreversible components against the
/// consistency conditions, flatten every system, and run the junction lints.
int run_check(const std::string& path, int samples, std::uint64_t seed)
{
    ephs::ModelDocument doc = ephs::parse_model(read_file(path));
    const ephs::ValidatorConfig config = validator_config(samples, seed);

    bool ok = true;
    std::size_t validated = 0;
    for (const auto& [name, comp] : doc.components) {
        ephs::ValidationReport report;
        if (const auto* r = std::get_if<ephs::ReversibleComponent>(&comp))
            report = ephs::validate_reversible(name, *r, doc.environment, doc.registry,
                                               config);
        else if (const auto* irr = std::get_if<ephs::IrreversibleComponent>(&comp))
            report = ephs::validate_irreversible(name, *irr, doc.environment,
                                                 doc.registry, config);
        else
            continue;
        ++validated;
        if (!report.ok()) {
            ok = false;
            std::cout << report.to_string() << "\n";
        }
    }

    for (const auto& def : doc.systems) {
        try {
            ephs::FlattenedSystem flat = ephs::flatten(def.system);
            ephs::LintReport lints = ephs::check_wellformed(flat);
            for (const auto& e : lints.errors) {
                ok = false;
                std::cout << "system '" << def.name << "': error: " << e << "\n";
            }
            for (const auto& w : lints.warnings)
                std::cout << "system '" << def.name << "': warning: " << w << "\n";
        } catch (const ephs::Error& e) {
            ok = false;
            std::cout << "system '" << def.name << "': error: " << e.what() << "\n";
        }
    }

    std::cout << validated << " components validated" << (ok ? "" : ", with failures")
              << "\n";
    return ok ? 0 : 1;
}

int run_flatten(const std::string& path, const std::string& system_name)
{
    ephs::ModelDocument doc = ephs::parse_model(read_file(path));
    const ephs::SystemDef* def = doc.find_system(system_name);
    if (def == nullptr)
        throw ephs::Error("no system named '" + system_name + "'");
    ephs::FlattenedSystem flat = ephs::flatten(def->system);
    std::cout << ephs::equation_listing(flat, doc.environment);
    ephs::LintReport lints = ephs::check_wellformed(flat);
    for (const auto& e : lints.errors)
        std::cout << "error: " << e << "\n";
    for (const auto& w : lints.warnings)
        std::cout << "warning: " << w << "\n";
    return lints.ok() ? 0 : 1;
}

int run_simulate(const std::string& path, const std::string& system_name,
                 const std::string& config_name, const std::string& out_path)
{
    ephs::ModelDocument doc = ephs::parse_model(read_file(path));
    const ephs::SystemDef* def = doc.find_system(system_name);
    if (def == nullptr)
        throw ephs::Error("no system named '" + system_name + "'");
    const ephs::SimulationConfig* config = doc.find_simulation(system_name, config_name);
    if (config == nullptr)
        throw ephs::Error("no simulation config for system '" + system_name + "'" +
                          (config_name.empty() ? "" : " named '" + config_name + "'"));

    ephs::AssembledModel model = ephs::AssembledModel::build(
        ephs::flatten(def->system), doc.environment, doc.registry, config->inputs);
    std::map<std::string, double> init(config->init.begin(), config->init.end());
    std::vector<double> x0 = model.initial_state(init);
    ephs::Trajectory traj = ephs::simulate(model, config->t_end, config->dt, x0);
    write_file(out_path, ephs::to_csv(traj));

    ephs::AuditReport report = ephs::audit(model, traj);
    std::cout << "simulated '" << system_name << "' for t_end = " << config->t_end
              << ", dt = " << config->dt << " (" << traj.t.size() << " rows)\n"
              << report.to_string();
    return 0;
}

int run_diagram(const std::string& path, const std::string& pattern_name,
                const std::string& out_path)
{
    ephs::ModelDocument doc = ephs::parse_model(read_file(path));
    const ephs::PatternDef* def = doc.find_pattern(pattern_name);
    if (def == nullptr)
        throw ephs::Error("no pattern named '" + pattern_name + "'");
    write_file(out_path, ephs::to_dot(def->pattern, pattern_name));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compiler, consistency checker, and simulator for exergetic "
                 "port-Hamiltonian system models"};
    app.require_subcommand(1);

    int samples = 64;
    std::uint64_t seed = 0;
    app.add_option("--samples", samples, "Validator sample count")->capture_default_str();
    app.add_option("--seed", seed, "Validator sampling seed")->capture_default_str();

    std::string file;
    std::string system_name;
    std::string config_name;
    std::string pattern_name;
    std::string out_path;

    CLI::App* check = app.add_subcommand("check", "Validate a model file");
    check->add_option("file", file, "Model file")->required();

    CLI::App* flatten = app.add_subcommand(
        "flatten", "Flatten a system and print its components, junctions, and equations");
    flatten->add_option("file", file, "Model file")->required();
    flatten->add_option("--system", system_name, "System to flatten")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "Integrate a system");
    simulate->add_option("file", file, "Model file")->required();
    simulate->add_option("--system", system_name, "System to simulate")->required();
    simulate->add_option("--config", config_name, "Simulation config name");
    simulate->add_option("--out", out_path, "Trajectory CSV path")->required();

    CLI::App* diagram = app.add_subcommand("diagram", "Export a pattern as Graphviz DOT");
    diagram->add_option("file", file, "Model file")->required();
    diagram->add_option("--pattern", pattern_name, "Pattern to export")->required();
    diagram->add_option("--out", out_path, "DOT output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check)
            return run_check(file, samples, seed);
        if (*flatten)
            return run_flatten(file, system_name);
        if (*simulate)
            return run_simulate(file, system_name, config_name, out_path);
        if (*diagram)
            return run_diagram(file, pattern_name, out_path);
    } catch (const ephs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
