#include "aporia/trust.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace aporia::trust {

using nlohmann::json;

std::string_view to_string(Resource r) noexcept
{
    switch (r) {
    case Resource::Money: return "Money";
    case Resource::Time: return "Time";
    case Resource::Data: return "Data";
    case Resource::Compute: return "Compute";
    }
    return "Money";
}

std::string_view to_string(Direction d) noexcept
{
    return d == Direction::Favorable ? "Favorable" : "Unfavorable";
}

Resource resource_from_string(std::string_view name)
{
    const auto lower = detail::ascii_lower(name);
    if (lower == "money") return Resource::Money;
    if (lower == "time") return Resource::Time;
    if (lower == "data") return Resource::Data;
    if (lower == "compute") return Resource::Compute;
    throw Error(Errc::invalid_argument, fmt::format("unknown resource '{}'", name));
}

Direction direction_from_string(std::string_view name)
{
    const auto lower = detail::ascii_lower(name);
    if (lower == "favorable") return Direction::Favorable;
    if (lower == "unfavorable") return Direction::Unfavorable;
    throw Error(Errc::invalid_argument, fmt::format("unknown direction '{}'", name));
}

double transfer_contract(double ob, double a)
{
    if (!(ob >= 0.0) || !(a >= 0.0)) {
        throw Error(Errc::invalid_argument, fmt::format("transfer amounts must be non-negative (ob={}, a={})", ob, a));
    }
    return ob >= a ? ob - a : ob;
}

std::set<Resource> Contract::resources() const
{
    std::set<Resource> out;
    for (const auto& [r, _] : expectations) {
        out.insert(r);
    }
    return out;
}

void validate(const Contract& contract)
{
    if (contract.expectations.empty()) {
        throw Error(Errc::invalid_argument,
                    fmt::format("contract for {}.{} covers no resource", contract.service_id, contract.function));
    }
    for (const auto& [r, e] : contract.expectations) {
        if (!e.measure) {
            throw Error(Errc::invalid_argument, fmt::format("contract expectation for {} has no measure", to_string(r)));
        }
    }
}

ResourceExpectation cost_expectation(Resource resource, Comparison comparison)
{
    return {comparison, [resource](const InvocationRecord& rec) -> std::optional<ResourceAmount> {
                auto it = rec.costs.find(resource);
                if (it == rec.costs.end()) {
                    return std::nullopt;
                }
                return it->second;
            }};
}

namespace {

double named(const std::map<std::string, double>& values, const std::string& key, std::string_view side)
{
    auto it = values.find(key);
    if (it == values.end()) {
        throw Error(Errc::contract_mismatch, fmt::format("transfer record lacks {} '{}'", side, key));
    }
    return it->second;
}

}  // namespace

Contract transfer_service_contract(std::string service_id)
{
    Contract c;
    c.service_id = std::move(service_id);
    c.function = "transfer";
    c.expectations[Resource::Money] = {Comparison::Exact, [](const InvocationRecord& rec) {
                                           const double a = named(rec.inputs, "a", "input");
                                           const double ob = named(rec.outputs, "ob", "output");
                                           const double nb = named(rec.outputs, "nb", "output");
                                           return std::optional<ResourceAmount>({transfer_contract(ob, a), nb});
                                       }};
    c.expectations[Resource::Time] = cost_expectation(Resource::Time, Comparison::AtMost);
    return c;
}

const std::string& EmotionMap::label(Resource r, Direction d, Deviation dev) const
{
    if (d == Direction::Favorable) {
        return favorable;
    }
    auto it = unfavorable.find({r, dev});
    return it == unfavorable.end() ? fallback : it->second;
}

double contract_deviation(double expected, double actual)
{
    return std::min(1.0, std::fabs(expected - actual) / std::max(std::fabs(expected), 1.0));
}

std::vector<EmotionEvent> observe(const InvocationRecord& rec,
                                  const Contract& contract,
                                  std::uint64_t first_seq,
                                  const EmotionMap& map)
{
    validate(contract);
    if (rec.service_id != contract.service_id || rec.function != contract.function) {
        throw Error(Errc::contract_mismatch,
                    fmt::format("record {}.{} does not match contract {}.{}", rec.service_id, rec.function,
                                contract.service_id, contract.function));
    }
    auto check_amount = [](double v, std::string_view what) {
        if (!(v >= 0.0)) {
            throw Error(Errc::invalid_argument, fmt::format("negative amount for {}", what));
        }
    };
    for (const auto& [k, v] : rec.inputs) check_amount(v, k);
    for (const auto& [k, v] : rec.outputs) check_amount(v, k);
    for (const auto& [r, amount] : rec.costs) {
        check_amount(amount.expected, to_string(r));
        check_amount(amount.actual, to_string(r));
    }

    std::vector<EmotionEvent> events;
    std::uint64_t seq = first_seq;
    for (const auto& [resource, expectation] : contract.expectations) {
        const auto amount = expectation.measure(rec);
        if (!amount) {
            continue;
        }
        const Deviation dev = amount->actual < amount->expected   ? Deviation::Under
                              : amount->actual > amount->expected ? Deviation::Over
                                                                  : Deviation::None;
        const bool within = dev == Deviation::None
                            || (expectation.comparison == Comparison::AtMost && dev == Deviation::Under);
        EmotionEvent ev;
        ev.service_id = rec.service_id;
        ev.resource = resource;
        ev.direction = within ? Direction::Favorable : Direction::Unfavorable;
        ev.intensity = contract_deviation(amount->expected, amount->actual);
        ev.emotion = map.label(resource, ev.direction, dev);
        ev.seq = seq++;
        ev.ts_ms = rec.ts_ms;
        events.push_back(std::move(ev));
    }
    return events;
}

const ResourceAggregate* EmotionState::find(Resource r) const
{
    auto it = resources.find(r);
    return it == resources.end() ? nullptr : &it->second;
}

EmotionState apply(const EmotionState& state, const EmotionEvent& ev)
{
    if (!state.service_id.empty() && ev.service_id != state.service_id) {
        throw Error(Errc::invalid_argument,
                    fmt::format("event for service '{}' applied to '{}'", ev.service_id, state.service_id));
    }
    if (ev.seq != state.count + 1) {
        throw Error(Errc::sequence_gap,
                    fmt::format("service '{}': expected seq {}, got {}", state.service_id, state.count + 1, ev.seq));
    }
    if (!(ev.intensity >= 0.0 && ev.intensity <= 1.0)) {
        throw Error(Errc::invalid_argument, fmt::format("event intensity {} outside [0,1]", ev.intensity));
    }
    EmotionState next = state;
    auto& agg = next.resources[ev.resource];
    auto& mean = agg.decayed_mean[static_cast<std::size_t>(ev.direction)];
    mean = next.decay * mean + (1.0 - next.decay) * ev.intensity;
    agg.last = ev;
    ++agg.count;
    ++next.count;
    return next;
}

EmotionState fold(std::string service_id, std::span<const EmotionEvent> log, double decay)
{
    EmotionState state;
    state.service_id = std::move(service_id);
    state.decay = decay;
    for (const auto& ev : log) {
        state = apply(state, ev);
    }
    return state;
}

std::string to_ndjson_line(const EmotionEvent& ev)
{
    return json{{"seq", ev.seq},
                {"resource", to_string(ev.resource)},
                {"emotion", ev.emotion},
                {"intensity", ev.intensity},
                {"direction", to_string(ev.direction)},
                {"ts", ev.ts_ms}}
        .dump();
}

EmotionEvent parse_event_line(std::string_view line, std::string service_id)
{
    const json doc = detail::parse_json(line, "event log");
    return detail::with_parse_errors("event log", [&] {
        EmotionEvent ev;
        ev.service_id = std::move(service_id);
        ev.seq = doc.at("seq").get<std::uint64_t>();
        ev.resource = resource_from_string(doc.at("resource").get<std::string>());
        ev.emotion = doc.at("emotion").get<std::string>();
        ev.intensity = doc.at("intensity").get<double>();
        ev.direction = direction_from_string(doc.at("direction").get<std::string>());
        ev.ts_ms = doc.at("ts").get<std::int64_t>();
        return ev;
    });
}

}  // namespace aporia::trust
