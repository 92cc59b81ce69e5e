#include "aporia/timing.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace aporia::timing {

Timeline::Timeline(std::string label, std::vector<TimelineEvent> events)
    : label_(std::move(label)), events_(std::move(events))
{
    if (events_.size() < 2) {
        throw Error(Errc::invalid_argument, fmt::format("timeline '{}' needs at least two events", label_));
    }
    for (std::size_t i = 1; i < events_.size(); ++i) {
        if (!(events_[i].time_s > events_[i - 1].time_s)) {
            throw Error(Errc::invalid_argument,
                        fmt::format("timeline '{}' is not strictly increasing at '{}'", label_, events_[i].name));
        }
    }
}

std::vector<Step> intervals(const Timeline& timeline)
{
    const auto& ev = timeline.events();
    std::vector<Step> steps;
    steps.reserve(ev.size() - 1);
    for (std::size_t i = 1; i < ev.size(); ++i) {
        steps.push_back({ev[i - 1].name, ev[i].name, ev[i].time_s - ev[i - 1].time_s});
    }
    return steps;
}

std::string_view to_string(PauseClass value) noexcept
{
    switch (value) {
    case PauseClass::Short: return "short";
    case PauseClass::Substantial: return "substantial";
    case PauseClass::Long: return "long";
    }
    return "short";
}

PauseClass classify_pause(double duration_s, const PauseWindow& window)
{
    if (!(duration_s >= 0.0)) {
        throw Error(Errc::invalid_argument, fmt::format("pause duration must be non-negative, got {}", duration_s));
    }
    if (duration_s < window.lower_s) {
        return PauseClass::Short;
    }
    if (duration_s <= window.upper_s) {
        return PauseClass::Substantial;
    }
    return PauseClass::Long;
}

std::vector<StepSummary> summarize(std::span<const Timeline> timelines)
{
    if (timelines.empty()) {
        throw Error(Errc::invalid_argument, "summarize needs at least one timeline");
    }
    const auto& reference = timelines.front().events();
    std::vector<StepSummary> out;
    for (std::size_t i = 1; i < reference.size(); ++i) {
        out.push_back({reference[i - 1].name, reference[i].name, 0.0});
    }
    for (const auto& t : timelines) {
        const auto& ev = t.events();
        bool same = ev.size() == reference.size();
        for (std::size_t i = 0; same && i < ev.size(); ++i) {
            same = ev[i].name == reference[i].name;
        }
        if (!same) {
            throw Error(Errc::invalid_argument,
                        fmt::format("timeline '{}' has a different event sequence", t.label()));
        }
        const auto steps = intervals(t);
        for (std::size_t i = 0; i < steps.size(); ++i) {
            out[i].mean_s += steps[i].duration_s;
        }
    }
    for (auto& s : out) {
        s.mean_s /= static_cast<double>(timelines.size());
    }
    return out;
}

double round_half_up(double value, int decimals)
{
    if (value < 0) {
        return -round_half_up(-value, decimals);
    }
    const double scale = std::pow(10.0, decimals);
    // The epsilon absorbs binary representation error such as 0.855 -> 0.85499...
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

std::string_view to_string(AnticipationRisk value) noexcept
{
    switch (value) {
    case AnticipationRisk::Missed: return "missed";
    case AnticipationRisk::Optimal: return "optimal";
    case AnticipationRisk::Anticipation: return "anticipation";
    }
    return "missed";
}

AnticipationRisk anticipation_risk(double interval_s, const ListenerModel& model, double grace_s)
{
    if (!(model.compute_time_s > 0.0)) {
        throw Error(Errc::invalid_argument, "listener compute time must be positive");
    }
    if (interval_s < model.compute_time_s) {
        return AnticipationRisk::Missed;
    }
    if (interval_s <= model.compute_time_s + grace_s) {
        return AnticipationRisk::Optimal;
    }
    return AnticipationRisk::Anticipation;
}

Timeline parse_timeline_csv(std::string label, std::string_view csv)
{
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t line_no = 0;
    std::vector<TimelineEvent> events;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != "event,time_s") {
                throw Error(Errc::parse_error, fmt::format("{}: expected header 'event,time_s'", label));
            }
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw Error(Errc::parse_error, fmt::format("{}:{}: expected two fields", label, line_no));
        }
        const std::string name = line.substr(0, comma);
        const std::string number = line.substr(comma + 1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
        if (name.empty() || ec != std::errc{} || ptr != number.data() + number.size()) {
            throw Error(Errc::parse_error, fmt::format("{}:{}: malformed row", label, line_no));
        }
        events.push_back({name, value});
    }
    if (!header_seen) {
        throw Error(Errc::parse_error, fmt::format("{}: empty timeline file", label));
    }
    return Timeline(std::move(label), std::move(events));
}

Timeline load_timeline_csv(const std::filesystem::path& path)
{
    return parse_timeline_csv(path.stem().string(), detail::read_file(path));
}

std::vector<Timeline> load_timeline_dir(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) {
        throw Error(Errc::io_error, "not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Timeline> timelines;
    for (const auto& f : files) {
        timelines.push_back(load_timeline_csv(f));
    }
    std::stable_sort(timelines.begin(), timelines.end(), [](const Timeline& a, const Timeline& b) {
        return a.events().front().time_s < b.events().front().time_s;
    });
    return timelines;
}

namespace {

std::string pad_right(std::string_view s, std::size_t width)
{
    return fmt::format("{:<{}}", s, width);
}

std::string pad_left(std::string_view s, std::size_t width)
{
    return fmt::format("{:>{}}", s, width);
}

std::string signed_step(double value)
{
    return fmt::format("{:+.2f}", round_half_up(value));
}

}  // namespace

std::string format_report(std::span<const Timeline> timelines)
{
    const auto averages = summarize(timelines);
    constexpr std::string_view average_label = "Average step";

    std::size_t label_width = average_label.size();
    for (const auto& t : timelines) {
        label_width = std::max(label_width, t.label().size());
    }

    const auto& names = timelines.front().events();
    std::vector<std::size_t> time_widths;
    for (std::size_t c = 0; c < names.size(); ++c) {
        std::size_t w = names[c].name.size();
        for (const auto& t : timelines) {
            w = std::max(w, fmt::format("{:.2f}", round_half_up(t.events()[c].time_s)).size());
        }
        time_widths.push_back(w);
    }

    std::vector<std::vector<std::string>> step_cells;
    for (const auto& t : timelines) {
        std::vector<std::string> row;
        for (const auto& s : intervals(t)) {
            row.push_back(signed_step(s.duration_s));
        }
        step_cells.push_back(std::move(row));
    }
    std::vector<std::string> average_cells;
    for (const auto& a : averages) {
        average_cells.push_back(signed_step(a.mean_s));
    }
    std::vector<std::size_t> step_widths(averages.size(), 0);
    for (std::size_t c = 0; c < averages.size(); ++c) {
        step_widths[c] = average_cells[c].size();
        for (const auto& row : step_cells) {
            step_widths[c] = std::max(step_widths[c], row[c].size());
        }
    }

    std::string out = pad_right("Timeline", label_width);
    for (std::size_t c = 0; c < names.size(); ++c) {
        out += "  " + pad_left(names[c].name, time_widths[c]);
    }
    out += '\n';
    for (const auto& t : timelines) {
        out += pad_right(t.label(), label_width);
        for (std::size_t c = 0; c < names.size(); ++c) {
            out += "  " + pad_left(fmt::format("{:.2f}", round_half_up(t.events()[c].time_s)), time_widths[c]);
        }
        out += '\n';
    }

    out += "\nSteps (s):";
    for (const auto& a : averages) {
        out += fmt::format(" [{} -> {}]", a.from, a.to);
    }
    out += '\n';
    for (std::size_t r = 0; r < timelines.size(); ++r) {
        out += pad_right(timelines[r].label(), label_width);
        for (std::size_t c = 0; c < averages.size(); ++c) {
            out += "  " + pad_left(step_cells[r][c], step_widths[c]);
        }
        out += '\n';
    }
    out += pad_right(average_label, label_width);
    for (std::size_t c = 0; c < averages.size(); ++c) {
        out += "  " + pad_left(average_cells[c], step_widths[c]);
    }
    out += '\n';
    return out;
}

}  // namespace aporia::timing
