#include "criteria.hpp"

#include "gen.hpp"
#include "poet_language.hpp"
#include "properties.hpp"

#include <aporia/distance.hpp>
#include <aporia/emotion.hpp>
#include <aporia/ledger.hpp>
#include <aporia/policy.hpp>
#include <aporia/protocol.hpp>
#include <aporia/runner.hpp>
#include <aporia/sigma_bank.hpp>
#include <aporia/timing.hpp>
#include <aporia/trust.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>

namespace aporia::acceptance {

namespace {

using testing::fixture;

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Outcome timing_table()
{
    const Stopwatch sw;
    const auto timelines = timing::load_timeline_dir(fixture("catapult"));
    const auto steps = timing::summarize(timelines);
    const double secs = sw.seconds();
    const double want[] = {2.88, 0.81, 2.34};
    bool pass = timelines.size() == 5 && steps.size() == 3 && secs < 1.0;
    std::string got;
    for (std::size_t i = 0; i < steps.size() && i < 3; ++i) {
        pass = pass && std::abs(steps[i].mean_s - want[i]) <= 0.005;
        got += fmt::format("{}{:.4f}", i ? ", " : "", steps[i].mean_s);
    }
    return {pass, fmt::format("averages ({}) from {} timelines in {:.3f}s", got, timelines.size(), secs)};
}

Outcome pause_window()
{
    const Stopwatch sw;
    int mismatches = 0;
    for (int ms = 0; ms <= 5000; ++ms) {
        const bool expected = ms >= 600 && ms <= 800;
        const bool got = timing::classify_pause(ms / 1000.0) == timing::PauseClass::Substantial;
        mismatches += expected != got ? 1 : 0;
    }
    const double secs = sw.seconds();
    return {mismatches == 0 && secs < 1.0, fmt::format("{} mismatches over 5001 grid points in {:.3f}s", mismatches, secs)};
}

Outcome gamma_threshold_grid()
{
    int mismatches = 0;
    int boundary = 0;
    for (int kt = 0; kt <= 20; ++kt) {
        for (int kg = 0; kg <= 20; ++kg) {
            const double gamma = kg / 20.0;
            const double threshold = kt / 20.0;
            const knowledge::Theory t{"phi", {}, {}, gamma};
            const knowledge::KnowledgeBase kb("grid", threshold, {t}, {{"", "x"}});
            const double expected = kg < kt ? gamma : 0.0;
            mismatches += distance::theory_distance(t, kb).pi != expected ? 1 : 0;
            boundary += kg == kt ? 1 : 0;
        }
    }
    return {mismatches == 0, fmt::format("{} mismatches over 441 pairs ({} on gamma = T)", mismatches, boundary)};
}

Outcome balance_example()
{
    const auto r = distance::answer_distance(99900.0, 0.0, {distance::DistanceKind::NumericAbs});
    return {r.pi == 99900.0, fmt::format("pi = {:.6f}", r.pi)};
}

trust::InvocationRecord transfer(double ob, double a, double nb)
{
    trust::InvocationRecord rec;
    rec.service_id = "bank";
    rec.function = "transfer";
    rec.inputs = {{"a", a}};
    rec.outputs = {{"ob", ob}, {"nb", nb}};
    return rec;
}

Outcome contract_violations()
{
    const auto contract = trust::transfer_service_contract("bank");
    auto money = [&](double nb) { return trust::observe(transfer(100, 50, nb), contract).at(0); };
    const auto under = money(40);
    const auto over = money(60);
    const auto exact = money(50);
    const bool pass = under.direction == trust::Direction::Unfavorable && std::abs(under.intensity - 0.2) <= 1e-9 &&
                      over.direction == trust::Direction::Unfavorable && std::abs(over.intensity - 0.2) <= 1e-9 &&
                      exact.direction == trust::Direction::Favorable && exact.intensity == 0.0;
    return {pass, fmt::format("nb=40 {} {:.9f}, nb=60 {} {:.9f}, nb=50 {} {}", trust::to_string(under.direction),
                              under.intensity, trust::to_string(over.direction), over.intensity,
                              trust::to_string(exact.direction), exact.intensity)};
}

Outcome bored_boundary()
{
    const auto contract = trust::transfer_service_contract("bank");
    auto is_bored = [&](double actual_ms) {
        trust::TrustLedger ledger;
        auto rec = transfer(100, 50, 50);
        rec.costs[trust::Resource::Time] = {100.0, actual_ms};
        ledger.record(rec, contract);
        return trust::bored(ledger.state("bank"), trust::Resource::Time);
    };
    const bool at121 = is_bored(121);
    const bool at120 = is_bored(120);
    return {at121 && !at120, fmt::format("bored(121ms) = {}, bored(120ms) = {}", at121, at120)};
}

emotion::ListenerPipelineResult pipeline(const std::string& name)
{
    const auto f = std::get<runner::AporiaFixture>(runner::load_protocol_fixture(fixture(name)));
    return emotion::run_listener_pipeline(f.premise, f.question.value_or(""), std::get<std::string>(f.reveal), f.kb,
                                          f.distance, f.lexicon.value(), emotion::default_taxonomy());
}

Outcome parody_pair()
{
    const auto a = pipeline("scream");
    const auto b = pipeline("scary-movie");
    const bool pass = std::abs(a.pi - b.pi) <= 1e-9 && a.emotion == "fear" && b.emotion == "amusement";
    return {pass, fmt::format("scream pi {:.9f} {}, scary-movie pi {:.9f} {}", a.pi, a.emotion, b.pi, b.emotion)};
}

Outcome poet_language()
{
    const Stopwatch sw;
    const auto session = testing::enumerate_session_language(8);
    const auto server = testing::enumerate_server_language(8);
    const double secs = sw.seconds();
    const bool pass = session.ok() && server.ok() && secs < 10.0;
    std::string detail = fmt::format("{} session strings, {} wire strings, {:.2f}s", session.cases, server.cases, secs);
    for (const auto* r : {&session, &server}) {
        if (!r->ok()) {
            detail += fmt::format("; {}: {}", r->name, r->counterexample);
        }
    }
    return {pass, detail};
}

Outcome sigma_soundness()
{
    using namespace protocol;
    int wrong = 0;
    for (std::int64_t n = 1; n <= 100; ++n) {
        for (bool honest : {true, false}) {
            auto bank = std::make_shared<SimulatedBank>(100'000, "token");
            BankProver prover(bank, honest ? std::optional<std::string>("token") : std::nullopt);
            auto s = new_session(ProtocolKind::Sigma, make_bank_instance(bank));
            s = step(s, prover.setup(Timestamp(0)));
            const auto e = withdraw_challenge(n, Timestamp(1));
            s = step(s, e);
            s = step(s, prover.respond(e, Timestamp(2)));
            const auto d = std::get<SigmaDecision>(*transcript(s).outcome);
            const bool ok = d == (honest ? SigmaDecision::Accept : SigmaDecision::Reject) &&
                            bank->balance() == (honest ? 100'000 - n : 100'000);
            wrong += ok ? 0 : 1;
        }
    }
    return {wrong == 0, fmt::format("{} wrong decisions over 200 runs", wrong)};
}

Outcome property_suites()
{
    double total = 0.0;
    bool pass = true;
    std::string detail;
    for (const auto& r : testing::all_properties(20240601)) {
        total += r.seconds;
        pass = pass && r.ok() && r.cases >= 10'000;
        detail += fmt::format("{} {}/{}; ", r.name, r.cases - r.failures, r.cases);
        if (!r.ok()) {
            detail += fmt::format("[{}] ", r.counterexample);
        }
    }
    pass = pass && total < 60.0;
    return {pass, detail + fmt::format("total {:.2f}s", total)};
}

}  // namespace

std::vector<Criterion> criteria()
{
    return {
        {"catapult timing averages", timing_table},
        {"substantial pause window", pause_window},
        {"gamma/threshold grid", gamma_threshold_grid},
        {"balance distance", balance_example},
        {"transfer contract violations", contract_violations},
        {"bored boundary", bored_boundary},
        {"parody pair", parody_pair},
        {"poet step-order language", poet_language},
        {"sigma bank soundness", sigma_soundness},
        {"property suites", property_suites},
    };
}

}  // namespace aporia::acceptance
