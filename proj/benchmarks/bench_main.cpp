#include <benchmark/benchmark.h>

#include <string>

#include "fpd/build.hpp"
#include "fpd/queries.hpp"
#include "fpd/rules.hpp"
#include "fpd/script.hpp"
#include "fpd/xml.hpp"

namespace {

// Chain of n operators with intermediate states in between, one resource
// per operator, and a fork/join diamond every eighth step.
fpd::Model chain_model(int operators) {
    fpd::Process p;
    p.identification.unique_ident = "p";
    p.identification.short_name = "Chain";
    p.system_boundary_id = "limit";

    auto state = [&](const std::string& id, fpd::Placement placement) {
        fpd::StateNode node;
        node.identification.unique_ident = id;
        node.identification.short_name = id;
        node.placement = placement;
        p.states.push_back(node);
    };

    state("s0", fpd::Placement::Boundary);
    int flow = 0;
    auto connect = [&](const std::string& from, const std::string& to) {
        p.flows.push_back({"f" + std::to_string(++flow), from, to});
    };

    for (int i = 1; i <= operators; ++i) {
        std::string op_id = "op" + std::to_string(i);
        std::string out_id = "s" + std::to_string(i);
        fpd::ProcessOperator op;
        op.identification.unique_ident = op_id;
        op.identification.short_name = op_id;
        p.operators.push_back(op);
        state(out_id, i == operators ? fpd::Placement::Boundary
                                     : fpd::Placement::Intermediate);

        if (i % 8 == 0) {
            std::string fork_id = "fork" + std::to_string(i);
            std::string join_id = "join" + std::to_string(i);
            std::string side_id = "side" + std::to_string(i);
            fpd::ConnectorNode fork, join;
            fork.identification.unique_ident = fork_id;
            fork.kind = fpd::ConnectorKind::Fork;
            join.identification.unique_ident = join_id;
            join.kind = fpd::ConnectorKind::Join;
            p.connectors.push_back(fork);
            p.connectors.push_back(join);
            state(side_id, fpd::Placement::Intermediate);
            connect("s" + std::to_string(i - 1), fork_id);
            connect(fork_id, op_id);
            connect(fork_id, side_id);
            connect(side_id, op_id);
            connect(op_id, join_id);
            connect(join_id, out_id);
            // The join needs a second feed to satisfy its arity.
            connect(fork_id, join_id);
        } else {
            connect("s" + std::to_string(i - 1), op_id);
            connect(op_id, out_id);
        }

        fpd::TechnicalResource resource;
        resource.identification.unique_ident = "r" + std::to_string(i);
        p.resources.push_back(resource);
        p.usages.push_back({"u" + std::to_string(i), op_id,
                            "r" + std::to_string(i)});
    }
    auto built = fpd::build_model({p});
    return std::move(*built.model);
}

void BM_Validate(benchmark::State& state) {
    fpd::Model model = chain_model(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto diagnostics = fpd::validate(model);
        benchmark::DoNotOptimize(diagnostics);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Validate)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_FlowPaths(benchmark::State& state) {
    fpd::Model model = chain_model(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto paths = fpd::flow_paths(model.processes[0]);
        benchmark::DoNotOptimize(paths);
    }
}
BENCHMARK(BM_FlowPaths)->RangeMultiplier(4)->Range(8, 512);

void BM_SerializeXml(benchmark::State& state) {
    fpd::Model model = chain_model(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        std::string doc = fpd::xml::serialize(model);
        benchmark::DoNotOptimize(doc);
    }
}
BENCHMARK(BM_SerializeXml)->RangeMultiplier(4)->Range(8, 512);

void BM_DeserializeXml(benchmark::State& state) {
    std::string doc =
        fpd::xml::serialize(chain_model(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        auto result = fpd::xml::deserialize(doc);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_DeserializeXml)->RangeMultiplier(4)->Range(8, 512);

void BM_ParseScript(benchmark::State& state) {
    std::string text =
        fpd::script::print(chain_model(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        auto result = fpd::script::parse(text);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_ParseScript)->RangeMultiplier(4)->Range(8, 512);

void BM_PrintScript(benchmark::State& state) {
    fpd::Model model = chain_model(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        std::string text = fpd::script::print(model);
        benchmark::DoNotOptimize(text);
    }
}
BENCHMARK(BM_PrintScript)->RangeMultiplier(4)->Range(8, 512);

}  // namespace

BENCHMARK_MAIN();
