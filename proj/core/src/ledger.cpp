#include "aporia/ledger.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace aporia::trust {

struct TrustLedger::Entry {
    mutable std::mutex mutex;
    EmotionState state;
    std::ofstream log;
};

TrustLedger::TrustLedger(std::optional<std::filesystem::path> log_dir, double decay)
    : log_dir_(std::move(log_dir)), decay_(decay)
{
    if (!(decay_ > 0.0 && decay_ < 1.0)) {
        throw Error(Errc::invalid_argument, fmt::format("decay factor {} outside (0,1)", decay_));
    }
    if (log_dir_) {
        std::error_code ec;
        std::filesystem::create_directories(*log_dir_, ec);
        if (ec) {
            throw Error(Errc::io_error, fmt::format("cannot create {}: {}", log_dir_->string(), ec.message()));
        }
    }
}

TrustLedger::~TrustLedger() = default;

TrustLedger::Entry& TrustLedger::entry(const std::string& service_id)
{
    {
        std::shared_lock lock(map_mutex_);
        auto it = entries_.find(service_id);
        if (it != entries_.end()) {
            return *it->second;
        }
    }
    if (service_id.empty() || service_id.find_first_of("/\\") != std::string::npos) {
        throw Error(Errc::invalid_argument, fmt::format("invalid service id '{}'", service_id));
    }
    std::unique_lock lock(map_mutex_);
    auto& slot = entries_[service_id];
    if (!slot) {
        slot = std::make_unique<Entry>();
        slot->state.service_id = service_id;
        slot->state.decay = decay_;
        if (log_dir_) {
            const auto path = *log_dir_ / (service_id + ".ndjson");
            slot->log.open(path, std::ios::app);
            if (!slot->log) {
                throw Error(Errc::io_error, "cannot open " + path.string());
            }
        }
    }
    return *slot;
}

const TrustLedger::Entry* TrustLedger::find(const std::string& service_id) const
{
    std::shared_lock lock(map_mutex_);
    auto it = entries_.find(service_id);
    return it == entries_.end() ? nullptr : it->second.get();
}

EmotionState TrustLedger::ingest(const EmotionEvent& ev)
{
    auto& e = entry(ev.service_id);
    std::lock_guard lock(e.mutex);
    e.state = apply(e.state, ev);
    if (e.log.is_open()) {
        e.log << to_ndjson_line(ev) << '\n';
        e.log.flush();
    }
    return e.state;
}

std::vector<EmotionEvent> TrustLedger::record(const InvocationRecord& rec, const Contract& contract,
                                              const EmotionMap& map)
{
    auto& e = entry(rec.service_id);
    std::lock_guard lock(e.mutex);
    auto events = observe(rec, contract, e.state.count + 1, map);
    EmotionState next = e.state;
    for (const auto& ev : events) {
        next = apply(next, ev);
    }
    e.state = std::move(next);
    if (e.log.is_open()) {
        for (const auto& ev : events) {
            e.log << to_ndjson_line(ev) << '\n';
        }
        e.log.flush();
    }
    return events;
}

EmotionState TrustLedger::state(const std::string& service_id) const
{
    if (const auto* e = find(service_id)) {
        std::lock_guard lock(e->mutex);
        return e->state;
    }
    EmotionState empty;
    empty.service_id = service_id;
    empty.decay = decay_;
    return empty;
}

std::vector<std::string> TrustLedger::services() const
{
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : entries_) {
        out.push_back(id);
    }
    return out;
}

std::unique_ptr<TrustLedger> TrustLedger::replay(const std::filesystem::path& dir, double decay)
{
    if (!std::filesystem::is_directory(dir)) {
        throw Error(Errc::io_error, "not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& item : std::filesystem::directory_iterator(dir)) {
        if (item.is_regular_file() && item.path().extension() == ".ndjson") {
            files.push_back(item.path());
        }
    }
    std::sort(files.begin(), files.end());
    auto ledger = std::make_unique<TrustLedger>(std::nullopt, decay);
    for (const auto& f : files) {
        const auto service = f.stem().string();
        std::istringstream in(detail::read_file(f));
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) {
                continue;
            }
            try {
                ledger->ingest(parse_event_line(line, service));
            } catch (const Error& e) {
                throw Error(e.code(), fmt::format("{}:{}: {}", f.string(), line_no, e.what()));
            }
        }
        ledger->entry(service);
    }
    return ledger;
}

std::optional<std::string> select_service(std::span<const EmotionState> states, const Policy& policy)
{
    const EmotionState* best = nullptr;
    double best_score = 0.0;
    for (const auto& s : states) {
        if (!evaluate_policy(policy, s)) {
            continue;
        }
        const auto* money = s.find(Resource::Money);
        const double score = money ? money->mean(Direction::Favorable) : 0.0;
        if (!best || score > best_score || (score == best_score && s.service_id < best->service_id)) {
            best = &s;
            best_score = score;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return best->service_id;
}

std::optional<std::string> select_service(std::span<const std::string> candidates,
                                          const Policy& policy,
                                          const TrustLedger& ledger)
{
    if (candidates.empty()) {
        throw Error(Errc::invalid_argument, "select_service needs at least one candidate");
    }
    std::vector<EmotionState> states;
    states.reserve(candidates.size());
    for (const auto& id : candidates) {
        states.push_back(ledger.state(id));
    }
    return select_service(states, policy);
}

}  // namespace aporia::trust
