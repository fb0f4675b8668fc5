#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "ephs/model.hpp"

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const std::string& motor_text()
{
    static std::string text = read_file(std::string(EPHS_MODELS_DIR) + "/motor.ephs");
    return text;
}

const ephs::ModelDocument& motor_doc()
{
    static ephs::ModelDocument doc = ephs::parse_model(motor_text());
    return doc;
}

ephs::AssembledModel motor_model()
{
    const auto& doc = motor_doc();
    std::vector<ephs::SignalBinding> inputs{
        {ephs::Name::parse("q"), ephs::SignalBinding::Slot::Effort,
         ephs::Expr::constant(10.0)},
        {ephs::Name::parse("p"), ephs::SignalBinding::Slot::Flow,
         ephs::Expr::constant(0.0)}};
    return ephs::AssembledModel::build(ephs::flatten(doc.find_system("motor")->system),
                                       doc.environment, doc.registry, inputs);
}

void BM_ParseMotor(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(ephs::parse_model(motor_text()));
}
BENCHMARK(BM_ParseMotor);

void BM_FlattenMotor(benchmark::State& state)
{
    const auto& doc = motor_doc();
    for (auto _ : state)
        benchmark::DoNotOptimize(ephs::flatten(doc.find_system("motor")->system));
}
BENCHMARK(BM_FlattenMotor);

void BM_MotorRhs(benchmark::State& state)
{
    ephs::AssembledModel model = motor_model();
    std::vector<double> x{0.3, 0.2, 0.1, 0.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(model.rhs(0.0, x));
}
BENCHMARK(BM_MotorRhs);

void BM_MotorSimulate1s(benchmark::State& state)
{
    ephs::AssembledModel model = motor_model();
    std::vector<double> x0 = model.initial_state({});
    for (auto _ : state)
        benchmark::DoNotOptimize(ephs::simulate(model, 1.0, 0.01, x0));
}
BENCHMARK(BM_MotorSimulate1s);

void BM_ValidateLossElement(benchmark::State& state)
{
    const auto& doc = motor_doc();
    const auto& c = std::get<ephs::IrreversibleComponent>(*doc.find_component("mloss"));
    ephs::ValidatorConfig config;
    config.samples = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ephs::validate_irreversible("mloss", c, doc.environment, doc.registry, config));
}
BENCHMARK(BM_ValidateLossElement)->Arg(64)->Arg(512);

} // namespace

BENCHMARK_MAIN();
