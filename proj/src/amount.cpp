// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/amount.hpp>

#include <cstdio>

namespace covenant {

Amount::Amount(std::uint64_t sats) : m_sats(sats)
{
    if (sats > MAX_MONEY) throw Error(Errc::amount, "amount " + std::to_string(sats) + " exceeds MAX_MONEY");
}

Amount operator+(Amount a, Amount b)
{
    // both operands are <= MAX_MONEY so the raw sum cannot wrap
    return Amount(a.m_sats + b.m_sats);
}

Amount operator-(Amount a, Amount b)
{
    if (b.m_sats > a.m_sats) throw Error(Errc::amount, "amount underflow");
    return Amount(a.m_sats - b.m_sats);
}

std::string Amount::to_btc_string() const
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%llu.%08llu", static_cast<unsigned long long>(m_sats / COIN),
                  static_cast<unsigned long long>(m_sats % COIN));
    return buf;
}

} // namespace covenant
