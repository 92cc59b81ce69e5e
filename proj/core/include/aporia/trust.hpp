#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aporia::trust {

enum class Resource { Money, Time, Data, Compute };
enum class Direction { Favorable, Unfavorable };

// Sign of actual - expected.
enum class Deviation { None, Under, Over };

std::string_view to_string(Resource r) noexcept;
std::string_view to_string(Direction d) noexcept;
Resource resource_from_string(std::string_view name);   // case-insensitive
Direction direction_from_string(std::string_view name);

// Expected nb for `ob, nb := transfer(a)`: ob - a when ob >= a, else ob.
double transfer_contract(double ob, double a);

struct ResourceAmount {
    double expected = 0.0;
    double actual = 0.0;
};

// Amounts must be non-negative.
struct InvocationRecord {
    std::string service_id;
    std::string function;
    std::map<std::string, double> inputs;
    std::map<std::string, double> outputs;
    std::map<Resource, ResourceAmount> costs;   // money units, ms, bytes
    std::int64_t ts_ms = 0;
};

// Exact: any difference violates the contract. AtMost: spending less than
// expected is within the contract.
enum class Comparison { Exact, AtMost };

struct ResourceExpectation {
    Comparison comparison = Comparison::AtMost;
    // Pulls (expected, actual) out of a record; nullopt when the record says
    // nothing about this resource.
    std::function<std::optional<ResourceAmount>(const InvocationRecord&)> measure;
};

struct Contract {
    std::string service_id;
    std::string function;
    std::map<Resource, ResourceExpectation> expectations;

    std::set<Resource> resources() const;
};

void validate(const Contract& contract);

// Expectation reading record.costs[resource].
ResourceExpectation cost_expectation(Resource resource, Comparison comparison = Comparison::AtMost);

// Money: nb must equal transfer_contract(ob, a) from inputs "a" and outputs
// "ob", "nb". Time: actual ms at most expected ms when the record carries it.
Contract transfer_service_contract(std::string service_id);

// Resource/deviation to emotion label.
struct EmotionMap {
    std::string favorable = "contentment";
    std::map<std::pair<Resource, Deviation>, std::string> unfavorable = {
        {{Resource::Money, Deviation::Under}, "sadness"},
        {{Resource::Money, Deviation::Over}, "surprise"},
        {{Resource::Time, Deviation::Under}, "boredom"},
        {{Resource::Time, Deviation::Over}, "boredom"},
    };
    std::string fallback = "discontent";

    const std::string& label(Resource r, Direction d, Deviation dev) const;
};

struct EmotionEvent {
    std::string service_id;
    Resource resource = Resource::Money;
    std::string emotion;
    double intensity = 0.0;
    Direction direction = Direction::Favorable;
    std::uint64_t seq = 0;
    std::int64_t ts_ms = 0;

    bool operator==(const EmotionEvent&) const = default;
};

// min(1, |expected - actual| / max(|expected|, 1))
double contract_deviation(double expected, double actual);

// One event per resource the record reports on, numbered from `first_seq`.
// Intensity is the deviation in both directions, so an exact match is a
// Favorable event at 0 and spending under an AtMost budget is Favorable at
// the relative saving.
std::vector<EmotionEvent> observe(const InvocationRecord& rec,
                                  const Contract& contract,
                                  std::uint64_t first_seq = 1,
                                  const EmotionMap& map = {});

inline constexpr double default_decay = 0.9;

struct ResourceAggregate {
    std::optional<EmotionEvent> last;
    std::array<double, 2> decayed_mean{0.0, 0.0};   // indexed by Direction
    std::uint64_t count = 0;

    double mean(Direction d) const noexcept { return decayed_mean[static_cast<std::size_t>(d)]; }

    bool operator==(const ResourceAggregate&) const = default;
};

struct EmotionState {
    std::string service_id;
    double decay = default_decay;
    std::uint64_t count = 0;
    std::map<Resource, ResourceAggregate> resources;

    const ResourceAggregate* find(Resource r) const;

    bool operator==(const EmotionState&) const = default;
};

EmotionState apply(const EmotionState& state, const EmotionEvent& ev);

EmotionState fold(std::string service_id, std::span<const EmotionEvent> log, double decay = default_decay);

// Threshold on the Time deviation above which a service is boring: more
// than 120% of the expected time.
inline constexpr double bored_deviation = 0.2;

// Event log line: {seq, resource, emotion, intensity, direction, ts}.
std::string to_ndjson_line(const EmotionEvent& ev);
EmotionEvent parse_event_line(std::string_view line, std::string service_id);

}  // namespace aporia::trust
