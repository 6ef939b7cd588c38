// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "curve.hpp"

#include <covenant/ecdsa.hpp>
#include <covenant/hash.hpp>

#include <openssl/crypto.h>

#include <algorithm>

namespace covenant {

namespace {

using curve::Bn;

Bn digest_scalar(const Hash256& digest)
{
    U256 e;
    std::copy(digest.bytes.begin(), digest.bytes.end(), e.begin());
    return curve::mod_n(Bn(e));
}

const U256& half_order()
{
    static const U256 v = [] {
        Bn h(secp256k1::order());
        BN_rshift1(h.get(), h.get());
        return h.to_u256();
    }();
    return v;
}

bool in_range(const U256& v) { return secp256k1::is_valid_scalar(v); }

/** Bytes needed by the minimal big-endian representation. */
std::size_t value_width(const U256& v)
{
    auto it = std::find_if(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; });
    return static_cast<std::size_t>(v.end() - it);
}

Bytes der_integer(const U256& v)
{
    auto it = std::find_if(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; });
    Bytes body(it, v.end());
    if (body.empty()) body.push_back(0);
    if (body[0] & 0x80) body.insert(body.begin(), 0);
    Bytes out{0x02, static_cast<std::uint8_t>(body.size())};
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

/** RFC 6979 section 3.2 with HMAC-SHA256, as a candidate stream. */
class NonceStream
{
public:
    NonceStream(const U256& key, const Hash256& digest)
    {
        const U256 h = digest_scalar(digest).to_u256();
        m_v.fill(0x01);
        m_k.fill(0x00);
        for (std::uint8_t round : {0x00, 0x01}) {
            Bytes msg(m_v.begin(), m_v.end());
            msg.push_back(round);
            msg.insert(msg.end(), key.begin(), key.end());
            msg.insert(msg.end(), h.begin(), h.end());
            m_k = hmac_sha256(m_k, msg).bytes;
            m_v = hmac_sha256(m_k, m_v).bytes;
            OPENSSL_cleanse(msg.data(), msg.size());
        }
    }

    ~NonceStream()
    {
        OPENSSL_cleanse(m_k.data(), m_k.size());
        OPENSSL_cleanse(m_v.data(), m_v.size());
    }

    U256 next()
    {
        for (;;) {
            if (m_started) {
                Bytes msg(m_v.begin(), m_v.end());
                msg.push_back(0x00);
                m_k = hmac_sha256(m_k, msg).bytes;
                m_v = hmac_sha256(m_k, m_v).bytes;
            }
            m_started = true;
            m_v = hmac_sha256(m_k, m_v).bytes;
            U256 k;
            std::copy(m_v.begin(), m_v.end(), k.begin());
            if (in_range(k)) return k;
        }
    }

private:
    std::array<std::uint8_t, 32> m_k{};
    std::array<std::uint8_t, 32> m_v{};
    bool m_started{false};
};

std::optional<PublicKey> key_from_point(const curve::Point& pt)
{
    if (pt.is_infinity()) return std::nullopt;
    return PublicKey::from_bytes(curve::encode_point(pt));
}

} // namespace

bool is_low_s(const EcdsaSignature& sig) { return sig.s <= half_order(); }

EcdsaSignature malleate(const EcdsaSignature& sig)
{
    return {sig.r, curve::sub_mod_n(Bn(0UL), Bn(sig.s)).to_u256()};
}

EcdsaSignature sign(const PrivateKey& key, const Hash256& digest)
{
    const Bn d(key.scalar());
    const Bn e = digest_scalar(digest);
    NonceStream nonces(key.scalar(), digest);
    for (;;) {
        const Bn k(nonces.next());
        const Bn r = curve::mod_n(curve::affine_x(curve::mul_generator(k)));
        if (r.is_zero()) continue;
        const Bn s = curve::mul_mod_n(curve::inv_mod_n(k), curve::add_mod_n(e, curve::mul_mod_n(r, d)));
        if (s.is_zero()) continue;
        EcdsaSignature sig{r.to_u256(), s.to_u256()};
        if (!is_low_s(sig)) sig = malleate(sig);
        if (value_width(sig.r) < 32 || value_width(sig.s) < 32) continue;
        return sig;
    }
}

bool verify(const PublicKey& pub, const Hash256& digest, const EcdsaSignature& sig, bool allow_high_s)
{
    if (!in_range(sig.r) || !in_range(sig.s)) return false;
    if (!allow_high_s && !is_low_s(sig)) return false;
    const auto P = curve::decode_point(pub.view());
    if (!P) return false;
    const Bn w = curve::inv_mod_n(Bn(sig.s));
    const Bn u1 = curve::mul_mod_n(digest_scalar(digest), w);
    const Bn u2 = curve::mul_mod_n(Bn(sig.r), w);
    const curve::Point X = curve::lincomb(u1, &*P, u2);
    if (X.is_infinity()) return false;
    return curve::mod_n(curve::affine_x(X)).to_u256() == sig.r;
}

std::vector<PublicKey> recover_pubkeys(const Hash256& digest, const EcdsaSignature& sig)
{
    std::vector<PublicKey> out;
    if (!in_range(sig.r) || !in_range(sig.s)) return out;
    const Bn r(sig.r);
    const Bn r_inv = curve::inv_mod_n(r);
    const Bn e = digest_scalar(digest);
    // P = r^-1 s R - r^-1 e G
    const Bn a = curve::sub_mod_n(Bn(0UL), curve::mul_mod_n(r_inv, e));
    const Bn b = curve::mul_mod_n(r_inv, Bn(sig.s));
    for (int j = 0; j < 2; ++j) {
        Bn x = r;
        if (j == 1) BN_add(x.get(), x.get(), curve::n().get());
        for (bool odd : {false, true}) {
            const auto R = curve::lift_x(x, odd);
            if (!R) continue;
            const auto candidate = key_from_point(curve::lincomb(a, &*R, b));
            if (!candidate || !verify(*candidate, digest, sig, true)) continue;
            if (std::find(out.begin(), out.end(), *candidate) == out.end()) out.push_back(*candidate);
        }
    }
    return out;
}

RecoveredCommitment nums_signature(const Hash256& digest)
{
    for (unsigned long r = 1; r <= NUMS_MAX_ITERATIONS; ++r) {
        const EcdsaSignature sig{u256_from_uint(r), u256_from_uint(1)};
        const auto keys = recover_pubkeys(digest, sig);
        if (!keys.empty()) return {sig, keys.front()};
    }
    throw Error(Errc::key, "no liftable NUMS r value within the iteration bound");
}

EcdsaSignature seeded_values(const SignatureSeeds& seeds)
{
    return {secp256k1::reduce_mod_order(sha256(seeds.seed_r).bytes),
            secp256k1::reduce_mod_order(sha256(seeds.seed_s).bytes)};
}

RecoveredCommitment seeded_signature(const SignatureSeeds& seeds, const Hash256& digest)
{
    const EcdsaSignature sig = seeded_values(seeds);
    if (!in_range(sig.r)) throw Error(Errc::seed_rejected, "SHA256(seed_r) reduces to zero; choose a new seed_r");
    if (!in_range(sig.s)) throw Error(Errc::seed_rejected, "SHA256(seed_s) reduces to zero; choose a new seed_s");
    if (value_width(sig.r) < 32) throw Error(Errc::seed_rejected, "r encodes shorter than 32 bytes; choose a new seed_r");
    if (value_width(sig.s) < 32) throw Error(Errc::seed_rejected, "s encodes shorter than 32 bytes; choose a new seed_s");
    if (!secp256k1::x_lifts_to_curve(sig.r)) {
        throw Error(Errc::seed_rejected, "r does not lift to a curve point; choose a new seed_r");
    }
    const auto keys = recover_pubkeys(digest, sig);
    if (keys.empty()) throw Error(Errc::seed_rejected, "no recoverable key for these seeds");
    return {sig, keys.front()};
}

Bytes der_encode(const EcdsaSignature& sig)
{
    if (!in_range(sig.r) || !in_range(sig.s)) throw Error(Errc::key, "signature values outside [1, n-1]");
    Bytes body = der_integer(sig.r);
    const Bytes s = der_integer(sig.s);
    body.insert(body.end(), s.begin(), s.end());
    Bytes out{0x30, static_cast<std::uint8_t>(body.size())};
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

EcdsaSignature der_decode(ByteView der)
{
    if (der.size() < 8) throw ParseError(der.size(), "DER signature too short");
    if (der.size() > 72) throw ParseError(72, "DER signature too long");
    if (der[0] != 0x30) throw ParseError(0, "DER signature must start with a sequence tag");
    if (der[1] != der.size() - 2) throw ParseError(1, "DER sequence length mismatch");

    std::size_t pos = 2;
    auto read_int = [&](U256& out) {
        if (pos + 2 > der.size()) throw ParseError(pos, "truncated DER integer");
        if (der[pos] != 0x02) throw ParseError(pos, "expected DER integer tag");
        const std::size_t len = der[pos + 1];
        const std::size_t start = pos + 2;
        if (len == 0) throw ParseError(pos + 1, "zero-length DER integer");
        if (start + len > der.size()) throw ParseError(pos + 1, "DER integer overruns signature");
        if (der[start] & 0x80) throw ParseError(start, "negative DER integer");
        if (len > 1 && der[start] == 0 && !(der[start + 1] & 0x80)) {
            throw ParseError(start, "non-minimal DER integer padding");
        }
        ByteView digits = der.subspan(start, len);
        if (digits[0] == 0) digits = digits.subspan(1);
        if (digits.size() > 32) throw ParseError(start, "DER integer exceeds 256 bits");
        out.fill(0);
        std::copy(digits.begin(), digits.end(), out.end() - static_cast<std::ptrdiff_t>(digits.size()));
        if (!in_range(out)) throw ParseError(start, "DER integer outside [1, n-1]");
        pos = start + len;
    };

    EcdsaSignature sig;
    read_int(sig.r);
    read_int(sig.s);
    if (pos != der.size()) throw ParseError(pos, "trailing bytes after DER signature");
    return sig;
}

} // namespace covenant
