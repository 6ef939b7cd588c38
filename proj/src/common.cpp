// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/common.hpp>

#include <algorithm>

namespace covenant {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::serialization: return "serialization";
    case Errc::script: return "script";
    case Errc::sighash: return "sighash";
    case Errc::key: return "key";
    case Errc::seed_rejected: return "seed-rejected";
    case Errc::policy: return "policy";
    case Errc::protocol: return "protocol";
    case Errc::graph: return "graph";
    case Errc::fee: return "fee";
    case Errc::parse: return "parse";
    case Errc::proof: return "proof";
    case Errc::amount: return "amount";
    }
    return "unknown";
}

std::string to_hex(ByteView data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

namespace {
int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}
} // namespace

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0) throw ParseError(hex.size(), "odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_value(hex[i]);
        if (hi < 0) throw ParseError(i, "invalid hex character");
        const int lo = hex_value(hex[i + 1]);
        if (lo < 0) throw ParseError(i + 1, "invalid hex character");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

Hash256 Hash256::from_span(ByteView data)
{
    if (data.size() != 32) throw Error(Errc::parse, "hash must be 32 bytes, got " + std::to_string(data.size()));
    Hash256 h;
    std::copy(data.begin(), data.end(), h.bytes.begin());
    return h;
}

Hash256 Hash256::from_hex(std::string_view hex)
{
    if (hex.size() != 64) throw ParseError(hex.size(), "hash hex must be 64 characters");
    return from_span(covenant::from_hex(hex));
}

Hash256 Hash256::from_display_hex(std::string_view hex)
{
    Hash256 h = from_hex(hex);
    std::reverse(h.bytes.begin(), h.bytes.end());
    return h;
}

std::string Hash256::hex() const { return to_hex(bytes); }

std::string Hash256::display_hex() const
{
    auto rev = bytes;
    std::reverse(rev.begin(), rev.end());
    return to_hex(rev);
}

bool Hash256::is_null() const
{
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

} // namespace covenant
