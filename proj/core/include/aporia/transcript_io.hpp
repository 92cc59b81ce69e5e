#pragma once

#include "aporia/distance.hpp"
#include "aporia/protocol.hpp"

#include <string>
#include <string_view>

namespace aporia::protocol {

// One JSON object per line with keys {seq, kind, payload, timestamp,
// implicit}; a final {outcome} line follows once the run has an outcome.
// Premise payloads are objects {"p", "q", "q_implicit"} and emotion report
// payloads are {"e", "pi"}; everything else is a plain string or number.
std::string to_ndjson(const Transcript& transcript);

// Inverse of to_ndjson. The protocol kind is inferred from the first
// message; `session_id` is not part of the line format.
Transcript parse_ndjson(std::string_view text, std::string session_id = "session");

std::string aporia_result_json(const distance::AporiaResult& result);

}  // namespace aporia::protocol
