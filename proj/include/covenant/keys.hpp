// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_KEYS_HPP
#define COVENANT_KEYS_HPP

#include <covenant/common.hpp>

#include <array>
#include <cstdint>
#include <random>
#include <string>

namespace covenant {

/** 256-bit unsigned integer, big-endian. */
using U256 = std::array<std::uint8_t, 32>;

U256 u256_from_hex(std::string_view hex);
U256 u256_from_uint(std::uint64_t v);
std::string u256_hex(const U256& v);

namespace secp256k1 {

/** Group order n. */
const U256& order();
/** Field prime p. */
const U256& field_prime();
/** 1 <= v < n */
bool is_valid_scalar(const U256& v);
/** v mod n */
U256 reduce_mod_order(const U256& v);
/** x < p and x^3 + 7 is a quadratic residue mod p. */
bool x_lifts_to_curve(const U256& x);

} // namespace secp256k1

/** Compressed secp256k1 point; always on the curve and never the identity. */
class PublicKey
{
public:
    static constexpr std::size_t SIZE = 33;

    /** Throws Error(Errc::key) unless `data` is a valid compressed point. */
    static PublicKey from_bytes(ByteView data);
    static PublicKey from_hex(std::string_view hex);

    const std::array<std::uint8_t, SIZE>& bytes() const { return m_data; }
    ByteView view() const { return m_data; }
    std::string hex() const { return to_hex(m_data); }
    /** First 8 bytes of SHA256(compressed key), hex. */
    std::string fingerprint() const;

    auto operator<=>(const PublicKey&) const = default;

private:
    PublicKey() = default;
    std::array<std::uint8_t, SIZE> m_data{};
};

/**
 * Secret scalar in [1, n-1]. Move-only; the scalar is wiped on destruction
 * and by destroy(). Copies must be made explicitly with duplicate().
 */
class PrivateKey
{
public:
    static PrivateKey from_bytes(ByteView data);
    static PrivateKey from_hex(std::string_view hex);
    /** Deterministic generation for simulations and tests. */
    template <typename URBG>
    static PrivateKey generate(URBG& rng)
    {
        for (;;) {
            U256 candidate;
            for (auto& b : candidate) b = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 255)(rng));
            if (secp256k1::is_valid_scalar(candidate)) return PrivateKey(candidate);
        }
    }
    /** OS entropy. */
    static PrivateKey generate_secure();

    PrivateKey(PrivateKey&& other) noexcept;
    PrivateKey& operator=(PrivateKey&& other) noexcept;
    PrivateKey(const PrivateKey&) = delete;
    PrivateKey& operator=(const PrivateKey&) = delete;
    ~PrivateKey();

    PrivateKey duplicate() const;
    bool valid() const { return m_valid; }
    /** Wipes the scalar. Any later use throws Error(Errc::key). */
    void destroy() noexcept;

    PublicKey public_key() const;
    /** Big-endian scalar; throws if destroyed. */
    const U256& scalar() const;
    std::string hex() const { return u256_hex(scalar()); }

private:
    explicit PrivateKey(const U256& scalar) : m_scalar(scalar), m_valid(true) {}

    U256 m_scalar{};
    bool m_valid{false};
};

} // namespace covenant

#endif // COVENANT_KEYS_HPP
