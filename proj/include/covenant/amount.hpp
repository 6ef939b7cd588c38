// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_AMOUNT_HPP
#define COVENANT_AMOUNT_HPP

#include <covenant/common.hpp>

#include <cstdint>
#include <string>

namespace covenant {

/** Integer satoshi amount bounded by the 21M BTC supply. */
class Amount
{
public:
    static constexpr std::uint64_t COIN = 100'000'000;
    static constexpr std::uint64_t MAX_MONEY = 21'000'000 * COIN;

    constexpr Amount() = default;
    explicit Amount(std::uint64_t sats);

    constexpr std::uint64_t sats() const noexcept { return m_sats; }

    /** Overflow and MAX_MONEY checked. */
    friend Amount operator+(Amount a, Amount b);
    /** Throws on underflow. */
    friend Amount operator-(Amount a, Amount b);
    Amount& operator+=(Amount other) { return *this = *this + other; }
    Amount& operator-=(Amount other) { return *this = *this - other; }

    auto operator<=>(const Amount&) const = default;

    /** Decimal BTC rendering for CLI display only. */
    std::string to_btc_string() const;

private:
    std::uint64_t m_sats{0};
};

} // namespace covenant

#endif // COVENANT_AMOUNT_HPP
