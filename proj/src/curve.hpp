// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

// Thin RAII layer over OpenSSL BIGNUM / EC_POINT for secp256k1 field and
// group arithmetic. Private to the library.

#ifndef COVENANT_SRC_CURVE_HPP
#define COVENANT_SRC_CURVE_HPP

#include <covenant/keys.hpp>

#include <openssl/bn.h>
#include <openssl/ec.h>

#include <memory>
#include <optional>

namespace covenant::curve {

struct BnDeleter {
    void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
};
struct PointDeleter {
    void operator()(EC_POINT* p) const { EC_POINT_clear_free(p); }
};

class Bn
{
public:
    Bn();
    explicit Bn(const U256& be);
    explicit Bn(unsigned long v);
    Bn(const Bn& other);
    Bn& operator=(const Bn& other);
    Bn(Bn&&) noexcept = default;
    Bn& operator=(Bn&&) noexcept = default;

    BIGNUM* get() const { return m_bn.get(); }
    U256 to_u256() const;
    bool is_zero() const { return BN_is_zero(m_bn.get()); }
    int cmp(const Bn& other) const { return BN_cmp(m_bn.get(), other.get()); }

private:
    std::unique_ptr<BIGNUM, BnDeleter> m_bn;
};

class Point
{
public:
    Point();
    Point(const Point& other);
    Point& operator=(const Point& other);
    Point(Point&&) noexcept = default;
    Point& operator=(Point&&) noexcept = default;

    EC_POINT* get() const { return m_pt.get(); }
    bool is_infinity() const;

private:
    std::unique_ptr<EC_POINT, PointDeleter> m_pt;
};

const EC_GROUP* group();
BN_CTX* ctx();
const Bn& n();
const Bn& p();

Bn mod_n(const Bn& a);
Bn add_mod_n(const Bn& a, const Bn& b);
Bn sub_mod_n(const Bn& a, const Bn& b);
Bn mul_mod_n(const Bn& a, const Bn& b);
Bn inv_mod_n(const Bn& a);

/** a*G + b*P (either scalar may be zero). */
Point lincomb(const Bn& a, const Point* P, const Bn& b);
Point mul_generator(const Bn& k);
Point mul(const Point& P, const Bn& k);
Point add(const Point& a, const Point& b);
Point negate(const Point& a);

/** Affine x-coordinate; the point must not be at infinity. */
Bn affine_x(const Point& P);

/** Point with the given x and y parity, if x^3+7 is a square mod p. */
std::optional<Point> lift_x(const Bn& x, bool odd_y);

std::optional<Point> decode_point(ByteView compressed);
std::array<std::uint8_t, 33> encode_point(const Point& P);

} // namespace covenant::curve

#endif // COVENANT_SRC_CURVE_HPP
