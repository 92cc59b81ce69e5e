#pragma once

#include "aporia/protocol.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace aporia::protocol {

// Desk-scale stand-in for a bank account. Knowledge of the capability token
// plays the role of the witness w. No cryptography.
class SimulatedBank {
public:
    SimulatedBank(std::int64_t balance, std::string capability_token);

    std::int64_t balance() const;
    bool authorizes(std::string_view token) const;

    // Throws not_allowed on a wrong token or insufficient funds.
    void withdraw(std::string_view token, std::int64_t amount);

private:
    mutable std::mutex mutex_;
    std::int64_t balance_;
    std::string token_;
};

// x is the balance the verifier observed when the instance was created; D
// accepts iff z is "Done" and the balance has since dropped by exactly e.
SigmaInstance make_bank_instance(std::shared_ptr<SimulatedBank> bank);

// Prover side of the withdraw challenge. Without a token it still answers
// "Done" but cannot move any money.
class BankProver {
public:
    BankProver(std::shared_ptr<SimulatedBank> bank, std::optional<std::string> token);

    ProtocolMessage setup(Timestamp ts) const;
    ProtocolMessage respond(const ProtocolMessage& challenge, Timestamp ts) const;

private:
    std::shared_ptr<SimulatedBank> bank_;
    std::optional<std::string> token_;
};

ProtocolMessage withdraw_challenge(std::int64_t amount, Timestamp ts);

}  // namespace aporia::protocol
