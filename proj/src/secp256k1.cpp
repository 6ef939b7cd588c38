// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "curve.hpp"

#include <covenant/hash.hpp>

#include <openssl/crypto.h>
#include <openssl/err.h>
#include <openssl/obj_mac.h>
#include <openssl/rand.h>

#include <algorithm>

namespace covenant {

U256 u256_from_hex(std::string_view hex)
{
    if (hex.size() > 64) throw ParseError(64, "256-bit value longer than 64 hex characters");
    std::string padded(64 - hex.size(), '0');
    padded += hex;
    const Bytes raw = from_hex(padded);
    U256 out;
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

U256 u256_from_uint(std::uint64_t v)
{
    U256 out{};
    for (int i = 0; i < 8; ++i) out[31 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return out;
}

std::string u256_hex(const U256& v) { return to_hex(v); }

namespace curve {

namespace {

struct GroupHolder {
    EC_GROUP* group;
    Bn order;
    Bn prime;
    GroupHolder() : group(EC_GROUP_new_by_curve_name(NID_secp256k1))
    {
        if (!group) throw std::runtime_error("secp256k1 group unavailable in libcrypto");
        EC_GROUP_get_order(group, order.get(), nullptr);
        EC_GROUP_get_curve(group, prime.get(), nullptr, nullptr, nullptr);
        EC_GROUP_precompute_mult(group, nullptr);
    }
    ~GroupHolder() { EC_GROUP_free(group); }
};

const GroupHolder& holder()
{
    static const GroupHolder h;
    return h;
}

struct CtxHolder {
    BN_CTX* c{BN_CTX_new()};
    ~CtxHolder() { BN_CTX_free(c); }
};

void check(int rc, const char* what)
{
    if (rc != 1) {
        ERR_clear_error();
        throw std::runtime_error(std::string("libcrypto failure: ") + what);
    }
}

} // namespace

const EC_GROUP* group() { return holder().group; }

BN_CTX* ctx()
{
    thread_local CtxHolder h;
    return h.c;
}

const Bn& n() { return holder().order; }
const Bn& p() { return holder().prime; }

Bn::Bn() : m_bn(BN_new()) {}

Bn::Bn(const U256& be) : m_bn(BN_bin2bn(be.data(), static_cast<int>(be.size()), nullptr)) {}

Bn::Bn(unsigned long v) : m_bn(BN_new()) { BN_set_word(m_bn.get(), v); }

Bn::Bn(const Bn& other) : m_bn(BN_dup(other.get())) {}

Bn& Bn::operator=(const Bn& other)
{
    if (this != &other) m_bn.reset(BN_dup(other.get()));
    return *this;
}

U256 Bn::to_u256() const
{
    U256 out{};
    if (BN_bn2binpad(m_bn.get(), out.data(), static_cast<int>(out.size())) != 32) {
        throw std::runtime_error("value does not fit in 256 bits");
    }
    return out;
}

Point::Point() : m_pt(EC_POINT_new(group())) {}

Point::Point(const Point& other) : m_pt(EC_POINT_dup(other.get(), group())) {}

Point& Point::operator=(const Point& other)
{
    if (this != &other) m_pt.reset(EC_POINT_dup(other.get(), group()));
    return *this;
}

bool Point::is_infinity() const { return EC_POINT_is_at_infinity(group(), m_pt.get()) == 1; }

Bn mod_n(const Bn& a)
{
    Bn r;
    check(BN_nnmod(r.get(), a.get(), n().get(), ctx()), "BN_nnmod");
    return r;
}

Bn add_mod_n(const Bn& a, const Bn& b)
{
    Bn r;
    check(BN_mod_add(r.get(), a.get(), b.get(), n().get(), ctx()), "BN_mod_add");
    return r;
}

Bn sub_mod_n(const Bn& a, const Bn& b)
{
    Bn r;
    check(BN_mod_sub(r.get(), a.get(), b.get(), n().get(), ctx()), "BN_mod_sub");
    return r;
}

Bn mul_mod_n(const Bn& a, const Bn& b)
{
    Bn r;
    check(BN_mod_mul(r.get(), a.get(), b.get(), n().get(), ctx()), "BN_mod_mul");
    return r;
}

Bn inv_mod_n(const Bn& a)
{
    Bn r;
    if (!BN_mod_inverse(r.get(), a.get(), n().get(), ctx())) {
        ERR_clear_error();
        throw std::runtime_error("scalar has no inverse mod n");
    }
    return r;
}

Point lincomb(const Bn& a, const Point* P, const Bn& b)
{
    Point r;
    if (P) {
        check(EC_POINT_mul(group(), r.get(), a.get(), P->get(), b.get(), ctx()), "EC_POINT_mul");
    } else {
        check(EC_POINT_mul(group(), r.get(), a.get(), nullptr, nullptr, ctx()), "EC_POINT_mul");
    }
    return r;
}

Point mul_generator(const Bn& k) { return lincomb(k, nullptr, Bn(0UL)); }

Point mul(const Point& P, const Bn& k) { return lincomb(Bn(0UL), &P, k); }

Point add(const Point& a, const Point& b)
{
    Point r;
    check(EC_POINT_add(group(), r.get(), a.get(), b.get(), ctx()), "EC_POINT_add");
    return r;
}

Point negate(const Point& a)
{
    Point r = a;
    check(EC_POINT_invert(group(), r.get(), ctx()), "EC_POINT_invert");
    return r;
}

Bn affine_x(const Point& P)
{
    Bn x;
    check(EC_POINT_get_affine_coordinates(group(), P.get(), x.get(), nullptr, ctx()), "EC_POINT_get_affine_coordinates");
    return x;
}

std::optional<Point> lift_x(const Bn& x, bool odd_y)
{
    if (BN_is_negative(x.get()) || x.cmp(p()) >= 0) return std::nullopt;
    BN_CTX* c = ctx();
    Bn rhs;
    Bn seven(7UL);
    Bn three(3UL);
    check(BN_mod_exp(rhs.get(), x.get(), three.get(), p().get(), c), "BN_mod_exp");
    check(BN_mod_add(rhs.get(), rhs.get(), seven.get(), p().get(), c), "BN_mod_add");
    // p = 3 mod 4, so a square root candidate is rhs^((p+1)/4)
    Bn exp;
    check(BN_add_word(exp.get(), 1) , "BN_add_word");
    check(BN_add(exp.get(), p().get(), exp.get()), "BN_add");
    check(BN_rshift(exp.get(), exp.get(), 2), "BN_rshift");
    Bn y;
    check(BN_mod_exp(y.get(), rhs.get(), exp.get(), p().get(), c), "BN_mod_exp");
    Bn y2;
    check(BN_mod_sqr(y2.get(), y.get(), p().get(), c), "BN_mod_sqr");
    if (y2.cmp(rhs) != 0) return std::nullopt;
    if (static_cast<bool>(BN_is_odd(y.get())) != odd_y) {
        check(BN_sub(y.get(), p().get(), y.get()), "BN_sub");
    }
    Point pt;
    check(EC_POINT_set_affine_coordinates(group(), pt.get(), x.get(), y.get(), c), "EC_POINT_set_affine_coordinates");
    return pt;
}

std::optional<Point> decode_point(ByteView compressed)
{
    if (compressed.size() != 33 || (compressed[0] != 0x02 && compressed[0] != 0x03)) return std::nullopt;
    U256 x;
    std::copy(compressed.begin() + 1, compressed.end(), x.begin());
    return lift_x(Bn(x), compressed[0] == 0x03);
}

std::array<std::uint8_t, 33> encode_point(const Point& P)
{
    std::array<std::uint8_t, 33> out{};
    if (P.is_infinity()) throw std::runtime_error("cannot encode the point at infinity");
    const std::size_t len = EC_POINT_point2oct(group(), P.get(), POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx());
    if (len != 33) throw std::runtime_error("EC_POINT_point2oct failed");
    return out;
}

} // namespace curve

namespace secp256k1 {

const U256& order()
{
    static const U256 v = curve::n().to_u256();
    return v;
}

const U256& field_prime()
{
    static const U256 v = curve::p().to_u256();
    return v;
}

bool is_valid_scalar(const U256& v)
{
    const bool zero = std::all_of(v.begin(), v.end(), [](std::uint8_t b) { return b == 0; });
    return !zero && v < order();
}

U256 reduce_mod_order(const U256& v)
{
    return curve::mod_n(curve::Bn(v)).to_u256();
}

bool x_lifts_to_curve(const U256& x)
{
    return curve::lift_x(curve::Bn(x), false).has_value();
}

} // namespace secp256k1

PublicKey PublicKey::from_bytes(ByteView data)
{
    if (data.size() != SIZE || (data[0] != 0x02 && data[0] != 0x03)) {
        throw Error(Errc::key, "public key must be a 33-byte compressed encoding");
    }
    if (!curve::decode_point(data)) throw Error(Errc::key, "public key is not on secp256k1");
    PublicKey k;
    std::copy(data.begin(), data.end(), k.m_data.begin());
    return k;
}

PublicKey PublicKey::from_hex(std::string_view hex) { return from_bytes(covenant::from_hex(hex)); }

std::string PublicKey::fingerprint() const
{
    const Hash256 h = sha256(view());
    return to_hex(ByteView(h.bytes).first(8));
}

PrivateKey PrivateKey::from_bytes(ByteView data)
{
    if (data.size() != 32) throw Error(Errc::key, "private key must be 32 bytes");
    U256 v;
    std::copy(data.begin(), data.end(), v.begin());
    if (!secp256k1::is_valid_scalar(v)) throw Error(Errc::key, "private key outside [1, n-1]");
    return PrivateKey(v);
}

PrivateKey PrivateKey::from_hex(std::string_view hex)
{
    Bytes raw = covenant::from_hex(hex);
    PrivateKey k = from_bytes(raw);
    OPENSSL_cleanse(raw.data(), raw.size());
    return k;
}

PrivateKey PrivateKey::generate_secure()
{
    for (;;) {
        U256 candidate;
        if (RAND_bytes(candidate.data(), static_cast<int>(candidate.size())) != 1) {
            throw std::runtime_error("RAND_bytes failed");
        }
        if (secp256k1::is_valid_scalar(candidate)) return PrivateKey(candidate);
    }
}

PrivateKey::PrivateKey(PrivateKey&& other) noexcept : m_scalar(other.m_scalar), m_valid(other.m_valid)
{
    other.destroy();
}

PrivateKey& PrivateKey::operator=(PrivateKey&& other) noexcept
{
    if (this != &other) {
        destroy();
        m_scalar = other.m_scalar;
        m_valid = other.m_valid;
        other.destroy();
    }
    return *this;
}

PrivateKey::~PrivateKey() { destroy(); }

PrivateKey PrivateKey::duplicate() const { return PrivateKey(scalar()); }

void PrivateKey::destroy() noexcept
{
    OPENSSL_cleanse(m_scalar.data(), m_scalar.size());
    m_valid = false;
}

const U256& PrivateKey::scalar() const
{
    if (!m_valid) throw Error(Errc::key, "private key has been destroyed");
    return m_scalar;
}

PublicKey PrivateKey::public_key() const
{
    const auto pt = curve::mul_generator(curve::Bn(scalar()));
    const auto enc = curve::encode_point(pt);
    return PublicKey::from_bytes(enc);
}

} // namespace covenant
