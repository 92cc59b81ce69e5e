#include "properties.hpp"

#include "gen.hpp"

#include <aporia/distance.hpp>
#include <aporia/knowledge.hpp>
#include <aporia/ledger.hpp>
#include <aporia/trust.hpp>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <map>

namespace aporia::testing {

namespace {

using distance::DistanceKind;
using distance::DistanceSpec;

class Recorder {
public:
    explicit Recorder(std::string name) : start_(std::chrono::steady_clock::now()) { result_.name = std::move(name); }

    void check(bool ok, const std::string& detail)
    {
        ++result_.cases;
        if (!ok) {
            if (result_.failures++ == 0) {
                result_.counterexample = detail;
            }
        }
    }

    PropertyResult finish()
    {
        result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return result_;
    }

private:
    PropertyResult result_;
    std::chrono::steady_clock::time_point start_;
};

bool same_bits(double a, double b)
{
    return std::memcmp(&a, &b, sizeof a) == 0;
}

// Plain re-implementation of the default tokenizer.
std::set<std::string> oracle_tokens(const std::string& text)
{
    std::set<std::string> out;
    std::string cur;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if ((u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z')) {
            cur += static_cast<char>(u >= 'A' && u <= 'Z' ? u - 'A' + 'a' : u);
        } else if (!cur.empty()) {
            out.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) {
        out.insert(cur);
    }
    return out;
}

double oracle_jaccard_distance(const std::set<std::string>& a, const std::set<std::string>& b)
{
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    std::size_t common = 0;
    for (const auto& x : a) {
        common += b.count(x);
    }
    const std::size_t all = a.size() + b.size() - common;
    return 1.0 - static_cast<double>(common) / static_cast<double>(all);
}

}  // namespace

PropertyResult distance_symmetry(std::uint64_t seed, std::size_t cases)
{
    Recorder rec("distance symmetry");
    Gen g(seed);
    const DistanceSpec abs{DistanceKind::NumericAbs};
    const DistanceSpec rel{DistanceKind::NumericRelative};
    const DistanceSpec tok{DistanceKind::TokenSimilarity};
    for (std::size_t i = 0; i < cases; ++i) {
        const double x = g.number();
        const double y = g.coin(0.1) ? x : g.number();
        const std::string s = g.sentence();
        const std::string t = g.coin(0.1) ? s : g.sentence();

        const double a1 = distance::answer_distance(x, y, abs).pi;
        const double a2 = distance::answer_distance(y, x, abs).pi;
        const double r1 = distance::answer_distance(x, y, rel).pi;
        const double r2 = distance::answer_distance(y, x, rel).pi;
        const double t1 = distance::answer_distance(s, t, tok).pi;
        const double t2 = distance::answer_distance(t, s, tok).pi;
        const double t_oracle = oracle_jaccard_distance(oracle_tokens(s), oracle_tokens(t));

        const bool ok = same_bits(a1, a2) && same_bits(r1, r2) && same_bits(t1, t2) && a1 == std::abs(x - y) &&
                        std::abs(t1 - t_oracle) <= 1e-12 && r1 >= 0.0 && r1 <= 1.0 && t1 >= 0.0 && t1 <= 1.0;
        rec.check(ok, fmt::format("x={} y={} s='{}' t='{}' abs={}/{} rel={}/{} tok={}/{} oracle={}", x, y, s, t, a1,
                                  a2, r1, r2, t1, t2, t_oracle));
    }
    return rec.finish();
}

PropertyResult triangle_inequality(std::uint64_t seed, std::size_t cases)
{
    Recorder rec("triangle inequality (jaccard, numeric_abs)");
    Gen g(seed);
    const DistanceSpec abs{DistanceKind::NumericAbs};
    const DistanceSpec tok{DistanceKind::TokenSimilarity};
    constexpr double eps = 1e-12;
    for (std::size_t i = 0; i < cases; ++i) {
        // Direct on token sets.
        const auto a = g.token_set();
        const auto b = g.token_set();
        const auto c = g.token_set();
        auto d = [](const std::set<std::string>& u, const std::set<std::string>& v) {
            return 1.0 - distance::jaccard_similarity(u, v);
        };
        const bool sets_ok = d(a, c) <= d(a, b) + d(b, c) + eps;

        // Through the public distance on sentences.
        const std::string s1 = g.sentence(), s2 = g.sentence(), s3 = g.sentence();
        auto dt = [&](const std::string& u, const std::string& v) { return distance::answer_distance(u, v, tok).pi; };
        const bool text_ok = dt(s1, s3) <= dt(s1, s2) + dt(s2, s3) + eps;

        const double x = g.number(), y = g.number(), z = g.number();
        auto dn = [&](double u, double v) { return distance::answer_distance(u, v, abs).pi; };
        const bool num_ok = dn(x, z) <= dn(x, y) + dn(y, z) + 1e-9 * (1.0 + std::abs(x) + std::abs(z));

        rec.check(sets_ok && text_ok && num_ok,
                  fmt::format("sets {}|{}|{} text '{}'|'{}'|'{}' numbers {} {} {}", fmt::join(a, ","),
                              fmt::join(b, ","), fmt::join(c, ","), s1, s2, s3, x, y, z));
    }
    return rec.finish();
}

PropertyResult threshold_monotonicity(std::uint64_t seed, std::size_t cases)
{
    Recorder rec("threshold monotonicity");
    Gen g(seed);
    for (std::size_t i = 0; i < cases; ++i) {
        // The first 21 cases sit exactly on the grid, then random costs, some
        // of them snapped to the grid.
        double gamma = i <= 20 ? static_cast<double>(i) / 20.0 : g.real(0.0, 1.0);
        if (i > 20 && g.coin(0.25)) {
            gamma = static_cast<double>(g.integer(0, 20)) / 20.0;
        }
        const knowledge::Theory theory{"phi", {}, {}, gamma};
        double previous = -1.0;
        bool ok = true;
        std::string detail;
        for (int k = 0; k <= 20; ++k) {
            const double t = static_cast<double>(k) / 20.0;
            const knowledge::KnowledgeBase kb("grid", t, {theory}, {{"", "x"}});
            const double pi = distance::theory_distance(theory, kb).pi;
            const double expected = gamma < t ? gamma : 0.0;
            if (pi != expected || pi < previous) {
                ok = false;
                detail = fmt::format("gamma={} T={} pi={} expected={} previous={}", gamma, t, pi, expected, previous);
                break;
            }
            previous = pi;
        }
        rec.check(ok, detail);
    }
    return rec.finish();
}

PropertyResult ledger_replay_determinism(std::uint64_t seed, std::size_t cases)
{
    Recorder rec("trust-ledger replay determinism");
    Gen g(seed);
    const auto scratch = std::filesystem::temp_directory_path() / fmt::format("aporia-replay-{}-{}", seed, g.bits());
    for (std::size_t i = 0; i < cases; ++i) {
        const std::string service = fmt::format("svc{}", i % 7);
        const bool long_log = i % 1000 == 0;
        const auto n = long_log ? 1000 : g.integer(1, 40);
        std::vector<trust::EmotionEvent> log;
        for (std::int64_t k = 1; k <= n; ++k) {
            log.push_back(random_event(g, service, static_cast<std::uint64_t>(k)));
        }

        const auto once = trust::fold(service, log);
        const auto twice = trust::fold(service, log);

        // Oracle fold over (resource, direction) cells.
        std::map<std::pair<trust::Resource, int>, double> means;
        std::map<trust::Resource, std::uint64_t> counts;
        for (const auto& ev : log) {
            auto& m = means[{ev.resource, static_cast<int>(ev.direction)}];
            m = trust::default_decay * m + (1.0 - trust::default_decay) * ev.intensity;
            ++counts[ev.resource];
        }
        bool oracle_ok = once.count == static_cast<std::uint64_t>(n);
        for (const auto& [cell, mean] : means) {
            const auto* agg = once.find(cell.first);
            oracle_ok = oracle_ok && agg != nullptr &&
                        same_bits(agg->mean(static_cast<trust::Direction>(cell.second)), mean) &&
                        agg->count == counts[cell.first];
        }

        // Through the log line format.
        std::vector<trust::EmotionEvent> reparsed;
        for (const auto& ev : log) {
            reparsed.push_back(trust::parse_event_line(trust::to_ndjson_line(ev), service));
        }
        const bool lines_ok = reparsed == log && trust::fold(service, reparsed) == once;

        // Long logs also go through the on-disk ledger.
        bool disk_ok = true;
        if (long_log) {
            std::filesystem::remove_all(scratch);
            {
                trust::TrustLedger ledger(scratch);
                for (const auto& ev : log) {
                    ledger.ingest(ev);
                }
                disk_ok = ledger.state(service) == once;
            }
            const auto a = trust::TrustLedger::replay(scratch);
            const auto b = trust::TrustLedger::replay(scratch);
            disk_ok = disk_ok && a->state(service) == once && b->state(service) == once;
        }
        rec.check(once == twice && oracle_ok && lines_ok && disk_ok,
                  fmt::format("case {} service {} events {} (fold {}, oracle {}, lines {}, disk {})", i, service, n,
                              once == twice, oracle_ok, lines_ok, disk_ok));
    }
    std::filesystem::remove_all(scratch);
    return rec.finish();
}

PropertyResult least_cost_bruteforce(std::uint64_t seed, std::size_t cases)
{
    Recorder rec("least-cost explanation vs brute force");
    Gen g(seed);
    for (std::size_t i = 0; i < cases; ++i) {
        const int n = static_cast<int>(g.integer(1, 4));
        std::vector<int> sixteenths;
        const auto kb = random_kb(g, n, &sixteenths);

        std::vector<knowledge::TheorySet> candidates;
        const auto m = g.integer(1, 8);
        for (std::int64_t c = 0; c < m; ++c) {
            knowledge::TheorySet s;
            const auto mask = g.integer(1, (1 << n) - 1);
            for (int b = 0; b < n; ++b) {
                if (mask & (1 << b)) {
                    s.insert("t" + std::to_string(b));
                }
            }
            candidates.push_back(std::move(s));
        }

        // Oracle: integer cost sums, then the smallest sorted id list.
        int best_cost = 1 << 30;
        std::vector<std::string> best_ids;
        for (const auto& c : candidates) {
            int cost = 0;
            std::vector<std::string> ids(c.begin(), c.end());
            std::sort(ids.begin(), ids.end());
            for (const auto& id : ids) {
                cost += sixteenths[static_cast<std::size_t>(std::stoi(id.substr(1)))];
            }
            if (cost < best_cost || (cost == best_cost && ids < best_ids)) {
                best_cost = cost;
                best_ids = ids;
            }
        }

        const auto got = knowledge::least_cost_explanation("obs", candidates, kb);
        const std::vector<std::string> got_ids(got.begin(), got.end());
        const bool member = std::find(candidates.begin(), candidates.end(), got) != candidates.end();
        bool minimal = true;
        for (const auto& c : candidates) {
            minimal = minimal && knowledge::rejection_cost(got, kb) <= knowledge::rejection_cost(c, kb);
        }
        rec.check(member && minimal && got_ids == best_ids,
                  fmt::format("costs/16 {} candidates {} got {{{}}} expected {{{}}}", fmt::join(sixteenths, ","),
                              candidates.size(), fmt::join(got_ids, ","), fmt::join(best_ids, ",")));
    }
    return rec.finish();
}

std::vector<PropertyResult> all_properties(std::uint64_t seed, std::size_t cases)
{
    return {distance_symmetry(seed, cases), triangle_inequality(seed + 1, cases), threshold_monotonicity(seed + 2, cases),
            ledger_replay_determinism(seed + 3, cases), least_cost_bruteforce(seed + 4, cases)};
}

}  // namespace aporia::testing
