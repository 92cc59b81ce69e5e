#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aporia::timing {

struct TimelineEvent {
    std::string name;
    double time_s = 0.0;

    bool operator==(const TimelineEvent&) const = default;
};

// At least two events with strictly increasing times.
class Timeline {
public:
    Timeline(std::string label, std::vector<TimelineEvent> events);

    const std::string& label() const noexcept { return label_; }
    const std::vector<TimelineEvent>& events() const noexcept { return events_; }

private:
    std::string label_;
    std::vector<TimelineEvent> events_;
};

struct Step {
    std::string from;
    std::string to;
    double duration_s = 0.0;
};

std::vector<Step> intervals(const Timeline& timeline);

enum class PauseClass { Short, Substantial, Long };

std::string_view to_string(PauseClass value) noexcept;

// Closed window; the defaults are the 0.6 s - 0.8 s substantial pause.
struct PauseWindow {
    double lower_s = 0.6;
    double upper_s = 0.8;
};

PauseClass classify_pause(double duration_s, const PauseWindow& window = {});

struct StepSummary {
    std::string from;
    std::string to;
    double mean_s = 0.0;
};

// Column means of the per-row steps. All timelines must share one event
// name sequence.
std::vector<StepSummary> summarize(std::span<const Timeline> timelines);

// Half-up rounding used for report output only.
double round_half_up(double value, int decimals = 2);

struct ListenerModel {
    double compute_time_s = 0.0;
};

enum class AnticipationRisk { Missed, Optimal, Anticipation };

std::string_view to_string(AnticipationRisk value) noexcept;

// Missed below c, Optimal on [c, c + grace], Anticipation beyond.
AnticipationRisk anticipation_risk(double interval_s, const ListenerModel& model, double grace_s = 0.8);

// CSV with header "event,time_s". The label is the file stem.
Timeline load_timeline_csv(const std::filesystem::path& path);
Timeline parse_timeline_csv(std::string label, std::string_view csv);

// Every *.csv in `dir`, ordered by first event time.
std::vector<Timeline> load_timeline_dir(const std::filesystem::path& dir);

// Aligned text table: event times, per-row steps, then the average step row.
std::string format_report(std::span<const Timeline> timelines);

}  // namespace aporia::timing
