#include "aporia/sigma_bank.hpp"

#include "aporia/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aporia::protocol {

SimulatedBank::SimulatedBank(std::int64_t balance, std::string capability_token)
    : balance_(balance), token_(std::move(capability_token))
{
    if (balance < 0) {
        throw Error(Errc::invalid_argument, "balance must be non-negative");
    }
}

std::int64_t SimulatedBank::balance() const
{
    std::lock_guard lock(mutex_);
    return balance_;
}

bool SimulatedBank::authorizes(std::string_view token) const
{
    std::lock_guard lock(mutex_);
    return !token_.empty() && token == token_;
}

void SimulatedBank::withdraw(std::string_view token, std::int64_t amount)
{
    std::lock_guard lock(mutex_);
    if (token_.empty() || token != token_) {
        throw Error(Errc::not_allowed, "withdrawal refused: bad capability token");
    }
    if (amount < 0 || amount > balance_) {
        throw Error(Errc::not_allowed, fmt::format("withdrawal of {} refused", amount));
    }
    balance_ -= amount;
}

SigmaInstance make_bank_instance(std::shared_ptr<SimulatedBank> bank)
{
    if (!bank) {
        throw Error(Errc::invalid_argument, "null bank");
    }
    SigmaInstance instance;
    instance.common_input = static_cast<double>(bank->balance());
    instance.relation_check = [bank](const Payload&, const Payload& w) {
        const auto* token = std::get_if<std::string>(&w);
        return token != nullptr && bank->authorizes(*token);
    };
    instance.decision = [bank](const Payload& x, const Payload&, const Payload& e, const Payload& z) {
        const auto* observed = std::get_if<double>(&x);
        const auto* amount = std::get_if<double>(&e);
        const auto* reply = std::get_if<std::string>(&z);
        if (observed == nullptr || amount == nullptr || reply == nullptr || *reply != "Done") {
            return false;
        }
        const double drop = *observed - static_cast<double>(bank->balance());
        return drop == *amount;
    };
    return instance;
}

BankProver::BankProver(std::shared_ptr<SimulatedBank> bank, std::optional<std::string> token)
    : bank_(std::move(bank)), token_(std::move(token))
{
}

ProtocolMessage BankProver::setup(Timestamp ts) const
{
    return make_message(MessageKind::Setup, std::string("I control this account"), ts);
}

ProtocolMessage BankProver::respond(const ProtocolMessage& challenge, Timestamp ts) const
{
    const auto* amount = std::get_if<double>(&challenge.payload);
    if (challenge.kind != MessageKind::Challenge || amount == nullptr) {
        throw Error(Errc::type_mismatch, "withdraw challenge must carry a numeric amount");
    }
    if (token_) {
        bank_->withdraw(*token_, static_cast<std::int64_t>(std::llround(*amount)));
    }
    return make_message(MessageKind::Response, std::string("Done"), ts);
}

ProtocolMessage withdraw_challenge(std::int64_t amount, Timestamp ts)
{
    return make_message(MessageKind::Challenge, static_cast<double>(amount), ts);
}

}  // namespace aporia::protocol
