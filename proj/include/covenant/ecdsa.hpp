// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_ECDSA_HPP
#define COVENANT_ECDSA_HPP

#include <covenant/common.hpp>
#include <covenant/keys.hpp>

#include <optional>
#include <vector>

namespace covenant {

struct EcdsaSignature {
    U256 r{};
    U256 s{};

    bool operator==(const EcdsaSignature&) const = default;
};

/** s <= n/2 */
bool is_low_s(const EcdsaSignature& sig);
/** (r, n - s): the other valid signature for the same key and digest. */
EcdsaSignature malleate(const EcdsaSignature& sig);

/**
 * Deterministic ECDSA. The nonce comes from the RFC 6979 HMAC-DRBG; candidates
 * are skipped until r and the low-s normalized s both need a full 32-byte
 * integer, so the DER encoding is always 70 to 72 bytes long.
 */
EcdsaSignature sign(const PrivateKey& key, const Hash256& digest);

/**
 * Standard verification with e = digest mod n. High-s values are rejected
 * unless allow_high_s is set, which is how NUMS and seeded signatures (whose
 * s is chosen externally) are checked.
 */
bool verify(const PublicKey& pub, const Hash256& digest, const EcdsaSignature& sig, bool allow_high_s = false);

/**
 * Every P = r^-1 (sR - eG) over the lifts of r and r+n (even y first), keeping
 * only candidates that verify. Empty when r has no lift.
 */
std::vector<PublicKey> recover_pubkeys(const Hash256& digest, const EcdsaSignature& sig);

/** A signature whose key was recovered rather than generated. */
struct RecoveredCommitment {
    EcdsaSignature signature;
    PublicKey key;
};

constexpr int NUMS_MAX_ITERATIONS = 1000;

/** Starts at (1, 1) and increments r until it lifts. */
RecoveredCommitment nums_signature(const Hash256& digest);

struct SignatureSeeds {
    Bytes seed_r;
    Bytes seed_s;

    bool operator==(const SignatureSeeds&) const = default;
};

/** (SHA256(seed_r) mod n, SHA256(seed_s) mod n) with no further checks. */
EcdsaSignature seeded_values(const SignatureSeeds& seeds);

/**
 * Signature from seeds plus its first verifying recovered key. Throws
 * Error(Errc::seed_rejected) when r does not lift, either value reduces to
 * zero, or either value would encode shorter than 32 bytes.
 */
RecoveredCommitment seeded_signature(const SignatureSeeds& seeds, const Hash256& digest);

/** Strict DER: minimal lengths, leading zero only before a set high bit. */
Bytes der_encode(const EcdsaSignature& sig);
/** Throws ParseError on any non-canonical encoding or out-of-range value. */
EcdsaSignature der_decode(ByteView der);

} // namespace covenant

#endif // COVENANT_ECDSA_HPP
