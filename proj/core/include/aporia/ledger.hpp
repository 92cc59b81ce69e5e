#pragma once

#include "aporia/policy.hpp"
#include "aporia/trust.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace aporia::trust {

// Per-service emotion states fed by events. Applies for one service are
// serialized; readers get a copy of the state as of the last completed apply.
// With a log directory every accepted event is appended to <dir>/<service>.ndjson.
class TrustLedger {
public:
    explicit TrustLedger(std::optional<std::filesystem::path> log_dir = std::nullopt, double decay = default_decay);
    ~TrustLedger();

    TrustLedger(const TrustLedger&) = delete;
    TrustLedger& operator=(const TrustLedger&) = delete;

    // The event's seq must follow the service's count.
    EmotionState ingest(const EmotionEvent& ev);

    // Observes the record against the contract, numbering events after the
    // service's current count, and ingests them atomically.
    std::vector<EmotionEvent> record(const InvocationRecord& rec, const Contract& contract, const EmotionMap& map = {});

    EmotionState state(const std::string& service_id) const;
    std::vector<std::string> services() const;

    // Rebuilds a ledger from every *.ndjson log in `dir`; the file stem is the
    // service id. The replayed ledger does not write back to `dir`.
    static std::unique_ptr<TrustLedger> replay(const std::filesystem::path& dir, double decay = default_decay);

private:
    struct Entry;
    Entry& entry(const std::string& service_id);
    const Entry* find(const std::string& service_id) const;

    std::optional<std::filesystem::path> log_dir_;
    double decay_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::unique_ptr<Entry>> entries_;
};

// Highest Favorable-Money decayed mean among the candidates that satisfy the
// policy; ties go to the smallest id. Unknown candidates have an empty state.
std::optional<std::string> select_service(std::span<const std::string> candidates,
                                          const Policy& policy,
                                          const TrustLedger& ledger);

std::optional<std::string> select_service(std::span<const EmotionState> states, const Policy& policy);

}  // namespace aporia::trust
