// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_COMMON_HPP
#define COVENANT_COMMON_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace covenant {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class Errc {
    serialization,
    script,
    sighash,
    key,
    seed_rejected,
    policy,
    protocol,
    graph,
    fee,
    parse,
    proof,
    amount,
};

std::string_view to_string(Errc code);

/** Base class for every error raised by the library. */
class Error : public std::runtime_error
{
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), m_code(code) {}
    Errc code() const noexcept { return m_code; }

private:
    Errc m_code;
};

/** Parse failure carrying the byte offset where decoding stopped. */
class ParseError : public Error
{
public:
    ParseError(std::size_t offset, const std::string& what)
        : Error(Errc::parse, what + " at byte offset " + std::to_string(offset)), m_offset(offset) {}
    std::size_t offset() const noexcept { return m_offset; }

private:
    std::size_t m_offset;
};

/**
 * 32-byte hash in internal byte order. Transaction identifiers are displayed
 * byte-reversed, matching the Bitcoin convention.
 */
struct Hash256 {
    std::array<std::uint8_t, 32> bytes{};

    static Hash256 from_span(ByteView data);
    /** Parse 64 hex chars in internal order. */
    static Hash256 from_hex(std::string_view hex);
    /** Parse 64 hex chars in display (reversed) order. */
    static Hash256 from_display_hex(std::string_view hex);

    std::string hex() const;
    std::string display_hex() const;
    bool is_null() const;
    ByteView view() const { return bytes; }

    auto operator<=>(const Hash256&) const = default;
};

std::string to_hex(ByteView data);
/** Decode lowercase hex. Throws ParseError with the offending offset. */
Bytes from_hex(std::string_view hex);

inline Bytes concat(ByteView a, ByteView b)
{
    Bytes out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

} // namespace covenant

#endif // COVENANT_COMMON_HPP
