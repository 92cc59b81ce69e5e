#include <aporia/distance.hpp>
#include <aporia/emotion.hpp>
#include <aporia/poet.hpp>
#include <aporia/trust.hpp>

#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

namespace {

using namespace aporia;

const std::filesystem::path fixtures = std::filesystem::path(APORIA_SOURCE_DIR) / "fixtures";
const std::string premise = "A girl alone at home picks up a menacing call from a stranger who may be a killer.";

void BM_TokenDistance(benchmark::State& state)
{
    const distance::DistanceSpec spec{distance::DistanceKind::TokenSimilarity, "", "default"};
    const Payload r = std::string("Yes, somewhere outside the house tonight");
    const Payload rp = std::string("Yes, hidden inside the house with the phone");
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance::answer_distance(r, rp, spec));
    }
}
BENCHMARK(BM_TokenDistance);

void BM_Compose(benchmark::State& state)
{
    const auto tax = emotion::default_taxonomy();
    const distance::AporiaResult pi{0.857, true, {}};
    int step = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(emotion::compose(step / 1000.0 - 1.0, pi, tax));
        step = step == 2000 ? 0 : step + 1;
    }
}
BENCHMARK(BM_Compose);

void BM_Fold(benchmark::State& state)
{
    std::vector<trust::EmotionEvent> log;
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        log.push_back({"svc", i % 2 ? trust::Resource::Time : trust::Resource::Money, "x", (i % 10) / 10.0,
                       i % 3 ? trust::Direction::Favorable : trust::Direction::Unfavorable,
                       static_cast<std::uint64_t>(i + 1), i});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(trust::fold("svc", log));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fold)->Arg(100)->Arg(10'000);

void BM_PoetRound(benchmark::State& state)
{
    auto agent = poet::scripted_agent(knowledge::load_knowledge_base(fixtures / "scream" / "kb.json"),
                                      {distance::DistanceKind::TokenSimilarity, "", "default"},
                                      emotion::load_lexicon(fixtures / "scream" / "lexicon.json"),
                                      emotion::default_taxonomy());
    const std::vector<std::string> proposal = {"fear", "amusement", "neutral", "surprise"};
    for (auto _ : state) {
        auto s = poet::start_test(proposal, *agent, "bench", Timestamp(0));
        s = poet::poet_step(s, poet::SendPremise{premise, "what happens next?", Timestamp(1)}, *agent);
        s = poet::poet_step(s, poet::AgentAnswer{Timestamp(2)}, *agent);
        s = poet::poet_step(s, poet::SendReveal{"Yes, hidden inside the house", Timestamp(3)}, *agent);
        s = poet::poet_step(s, poet::AgentEmotion{Timestamp(4)}, *agent);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_PoetRound);

}  // namespace

BENCHMARK_MAIN();
