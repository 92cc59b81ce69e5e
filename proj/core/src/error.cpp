#include "aporia/error.hpp"

namespace aporia {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::not_found: return "not_found";
    case Errc::out_of_order: return "out_of_order";
    case Errc::timestamp_regression: return "timestamp_regression";
    case Errc::type_mismatch: return "type_mismatch";
    case Errc::not_allowed: return "not_allowed";
    case Errc::parse_error: return "parse_error";
    case Errc::io_error: return "io_error";
    case Errc::sequence_gap: return "sequence_gap";
    case Errc::contract_mismatch: return "contract_mismatch";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

}  // namespace aporia
