#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aporia {

enum class Errc {
    invalid_argument,
    not_found,
    out_of_order,
    timestamp_regression,
    type_mismatch,
    not_allowed,
    parse_error,
    io_error,
    sequence_gap,
    contract_mismatch,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library. The code lets callers (the CLI, the
// wire server) map failures without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace aporia
