#pragma once

#include "properties.hpp"

#include <string>

namespace aporia::testing {

// Event letters: H hello, P premise, A answer, R reveal, E emotion, N next,
// V verdict. The procedure's words are H (PARE) (N PARE)* V.
inline constexpr std::string_view poet_alphabet = "HPARENV";

bool is_poet_prefix(std::string_view word);

// Every string over the alphabet up to `max_len` is fed to poet_step; a
// string must be accepted in full exactly when it is a prefix of the
// language, and the accepted letters must always spell such a prefix.
PropertyResult enumerate_session_language(int max_len = 8);

// Same over client frames at the wire server. Answer and emotion frames
// come from the server, so a client sending them is always rejected.
PropertyResult enumerate_server_language(int max_len = 8);

}  // namespace aporia::testing
