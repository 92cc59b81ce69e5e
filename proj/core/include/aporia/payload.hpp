#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

namespace aporia {

// Message content: free text or a number.
using Payload = std::variant<std::string, double>;

inline bool is_text(const Payload& p) noexcept { return std::holds_alternative<std::string>(p); }
inline bool is_number(const Payload& p) noexcept { return std::holds_alternative<double>(p); }

std::string describe(const Payload& p);

// Seconds with millisecond resolution, stored as integral milliseconds so
// that replayed transcripts compare exactly.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t millis) : millis_(millis) {}

    static Timestamp from_seconds(double seconds)
    {
        return Timestamp(static_cast<std::int64_t>(std::llround(seconds * 1000.0)));
    }

    constexpr std::int64_t millis() const noexcept { return millis_; }
    double seconds() const noexcept { return static_cast<double>(millis_) / 1000.0; }

    constexpr auto operator<=>(const Timestamp&) const = default;

private:
    std::int64_t millis_ = 0;
};

}  // namespace aporia
