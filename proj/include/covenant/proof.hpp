// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_PROOF_HPP
#define COVENANT_PROOF_HPP

#include <covenant/mechanisms.hpp>

#include <optional>
#include <string>
#include <vector>

namespace covenant {

/** Record that an enforcer destroyed its key; one per destroyed key. */
struct DeletionAttestation {
    std::string enforcer;
    /** PublicKey::fingerprint() of the destroyed key's public half. */
    std::string key_fingerprint;
    /** Logical time of the deletion in the protocol schedule. */
    std::uint64_t event_index{0};
    /** Made by the key itself immediately before destruction, over attestation_digest(). */
    EcdsaSignature signature;

    bool operator==(const DeletionAttestation&) const = default;
};

/** SHA256 of a tag, the enforcer id, the fingerprint and the event index. */
Hash256 attestation_digest(const std::string& enforcer, const std::string& key_fingerprint, std::uint64_t event_index);
/** Signs the attestation with `key`; the caller destroys the key afterwards. */
DeletionAttestation attest_deletion(const std::string& enforcer, const PrivateKey& key, std::uint64_t event_index);
bool verify_attestation(const DeletionAttestation& attestation, const PublicKey& key);

enum class ProofKind { reserves, covenant };

std::string_view to_string(ProofKind kind);

/**
 * Self-contained evidence that a deposit output is bound by a covenant
 * (kind covenant) or controlled by its custodians (kind reserves).
 */
struct ProofBundle {
    ProofKind kind{ProofKind::covenant};
    DepositSpec deposit;
    Transaction deposit_tx;
    std::uint32_t vout{0};
    /** Address derivation: must equal the script derived from `deposit` and hash to the output. */
    Script witness_script;
    /** The covenant transaction, or the reserves transaction for kind reserves. */
    Transaction covenant_tx;
    /** Input of covenant_tx spending the deposit output. */
    std::size_t input_index{0};
    /** Commitment signatures, or custodial signatures for reserves. */
    std::vector<CommitmentSignature> signatures;
    bool nums{false};
    std::optional<SignatureSeeds> seeds;
    std::optional<Hash256> template_hash;
    std::vector<DeletionAttestation> attestations;
    /** Reserves only: message committed by the null-outpoint input. */
    std::optional<Hash256> message;
};

struct ProofVerdict {
    /** Empty when accepted; otherwise a reason such as "ctv-mismatch". */
    std::string reason;
    std::string detail;

    bool accepted() const { return reason.empty(); }
};

ProofVerdict verify_proof(const ProofBundle& bundle);
/**
 * Parses and verifies a JSON bundle. Parse failures give "malformed"; display
 * fields (address, opcode listing, mechanism) must agree with the evidence.
 */
ProofVerdict verify_proof_json(const std::string& text);

struct CovenantEvidence {
    DepositSpec deposit;
    Transaction deposit_tx;
    std::uint32_t vout{0};
    CovenantTemplate tmpl;
    std::size_t input_index{0};
    std::vector<CommitmentSignature> signatures;
    std::optional<SignatureSeeds> seeds;
    std::vector<DeletionAttestation> attestations;
};

/** Mechanism is taken from evidence.deposit. */
ProofBundle prove_covenant(const CovenantEvidence& evidence);

/**
 * Transaction with a null-outpoint input carrying `message` in its witness and
 * the deposit output as second input, signed with SIGHASH_ALL by the
 * custodial keys given. Invalid on-chain by construction.
 */
ProofBundle prove_reserves(const DepositSpec& deposit, const Transaction& deposit_tx, std::uint32_t vout,
                           const Hash256& message, const std::vector<const PrivateKey*>& custodial_keys);

/** JSON with a top-level "format": 1. */
std::string proof_to_json(const ProofBundle& bundle);
/** Throws ParseError / Error(Errc::parse) on malformed input. */
ProofBundle proof_from_json(const std::string& text);

} // namespace covenant

#endif // COVENANT_PROOF_HPP
