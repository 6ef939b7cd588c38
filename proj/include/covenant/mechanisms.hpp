// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_MECHANISMS_HPP
#define COVENANT_MECHANISMS_HPP

#include <covenant/ecdsa.hpp>
#include <covenant/keys.hpp>
#include <covenant/sighash.hpp>
#include <covenant/transaction.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace covenant {

enum class Mechanism { deleted_key, recovered_key, ctv };

std::string_view to_string(Mechanism m);
/** "deleted-key", "recovered-key" or "ctv". */
Mechanism mechanism_from_string(std::string_view text);

/** m-of-n over the enforcement keys P_l. */
struct EnforcementPolicy {
    int m{1};
    int n{1};
    std::vector<PublicKey> keys;

    /** Throws Error(Errc::policy) unless 1 <= m <= n <= 15 and keys.size() == n. */
    void validate() const;
    /** Destroyed keys needed before the covenant is enforced. */
    int deletions_required() const { return n - m + 1; }
    bool contains(const PublicKey& key) const;
};

/** j-of-k over the custodial keys Q_i. */
struct CustodialPolicy {
    int j{1};
    int k{1};
    std::vector<PublicKey> keys;

    void validate() const;
};

struct RefundPath {
    /** Absolute block height from which the refund key may spend. */
    std::uint32_t height{0};
    PublicKey key;
};

/** Everything that determines a deposit's witness script. */
struct DepositSpec {
    Mechanism mechanism{Mechanism::deleted_key};
    /** deleted-key only. */
    std::optional<EnforcementPolicy> enforcement;
    CustodialPolicy custodial;
    /** recovered-key: one recovered key per disjoint branch. */
    std::vector<PublicKey> recovered_keys;
    /** ctv: one template hash per branch or fee variant. */
    std::vector<Hash256> ctv_hashes;
    /** Prefix `<h> CHECKLOCKTIMEVERIFY DROP` on the covenant path. */
    std::optional<std::uint32_t> activation_height;
    std::optional<RefundPath> refund;

    /** Number of alternative commitment branches in the script. */
    std::size_t branch_count() const;
};

struct DepositAddress {
    Script witness_script;
    /** 0x00 || PUSH32(SHA256(witness_script)) */
    Script locking_script;
    /** "p2wsh:<hex program>" */
    std::string address;
};

/** Throws Error(Errc::policy) when the mechanism's required extras are missing or invalid. */
DepositAddress deposit_address(const DepositSpec& spec);
Script deposit_witness_script(const DepositSpec& spec);

/**
 * The commitment clause alone in its terminal (non-VERIFY) form, used for
 * cost accounting: `<m> P.. <n> CHECKMULTISIG`, `<P> CHECKSIG` or `<h> CHECKTEMPLATEVERIFY`.
 */
Script commitment_clause(const DepositSpec& spec, std::size_t branch = 0);
/** The custodial clause alone in terminal form. */
Script custodial_clause(const CustodialPolicy& cust);

/** Witness for the covenant path. Signatures are DER plus type byte, in key order. */
struct CovenantWitnessParts {
    std::vector<Bytes> custodial_sigs;
    /** deleted-key: m signatures in key order; recovered-key: the commitment signature. */
    std::vector<Bytes> enforcement_sigs;
    std::size_t branch{0};
};

std::vector<Bytes> covenant_witness(const DepositSpec& spec, const CovenantWitnessParts& parts);
std::vector<Bytes> refund_witness(const DepositSpec& spec, const Bytes& refund_sig);

/** An unsigned covenant transaction and the sighash type of each input. */
struct CovenantTemplate {
    Transaction transaction;
    std::vector<SigHashType> sighash_types;
    Mechanism mechanism{Mechanism::deleted_key};

    /** Throws Error(Errc::policy) when types and inputs disagree or recovered-key inputs lack NOINPUT. */
    void validate() const;
};

/** Template whose inputs all use `type`. */
CovenantTemplate make_template(Transaction tx, Mechanism mechanism, SigHashType type);

struct CommitmentSignature {
    std::size_t input_index{0};
    EcdsaSignature signature;
    SigHashType type;
    PublicKey signer;

    /** DER followed by the type byte, as placed in a witness. */
    Bytes encoded() const;
};

/** DER plus type byte over the input's sighash digest. */
Bytes sign_input(const Transaction& tx, std::size_t input_index, const PrivateKey& key,
                 const SpentOutputContext& ctx, SigHashType type);

/** Throws Error(Errc::key) when the key is not one of the policy's P_l. */
CommitmentSignature sign_commitment(const CovenantTemplate& tmpl, std::size_t input_index, const PrivateKey& key,
                                    const SpentOutputContext& ctx, const EnforcementPolicy& policy);

bool verify_commitment(const CovenantTemplate& tmpl, const CommitmentSignature& sig, const SpentOutputContext& ctx);

enum class RecoveredStyle { nums, seeded };

struct RecoveredKeyCovenant {
    CommitmentSignature commitment;
    /** The key the deposit must commit to; no scalar for it exists anywhere. */
    PublicKey key;
    std::optional<SignatureSeeds> seeds;
};

/**
 * Non-interactive commitment: a NUMS or seeded signature over the NOINPUT
 * digest of input `input_index`, and the recovered key.
 */
RecoveredKeyCovenant build_recovered_key_covenant(const CovenantTemplate& tmpl, std::size_t input_index,
                                                  RecoveredStyle style,
                                                  const std::optional<SignatureSeeds>& seeds = std::nullopt);

/** NOINPUT digest used by the recovered-key mechanism; independent of the spent output. */
Hash256 recovered_key_digest(const CovenantTemplate& tmpl, std::size_t input_index);

struct CtvTemplateHash {
    Hash256 hash;
    std::uint32_t input_index{0};
};

CtvTemplateHash ctv_hash(const CovenantTemplate& tmpl, std::size_t input_index);

/** Byte counts of the commitment portion, under both conventions. */
struct CommitmentSize {
    Mechanism mechanism{Mechanism::deleted_key};
    /** DER signature length; 0 for ctv. */
    std::size_t der_bytes{0};
    /** Signature (DER only) + 1 opcode + 33 key; ctv: PUSH32 + hash + opcode. */
    std::size_t der_convention{0};
    /** As above with the sighash type byte counted. */
    std::size_t with_type_convention{0};
};

/** Sizes for a signature-based commitment. */
CommitmentSize commitment_size(Mechanism mechanism, const EcdsaSignature& sig);
/** Size of the ctv core `<32-byte hash> OP_CHECKTEMPLATEVERIFY`. */
CommitmentSize ctv_commitment_size(const Hash256& hash);

/** Commitment sizes observed over random keys, digests and seeds. */
struct SizeSweep {
    Mechanism mechanism{Mechanism::deleted_key};
    RecoveredStyle style{RecoveredStyle::nums};
    std::size_t samples{0};
    /** der_convention value -> occurrences. */
    std::map<std::size_t, std::size_t> der_convention;
    std::map<std::size_t, std::size_t> with_type_convention;
};

/**
 * Deleted-key samples count each signature and its high-s twin; seeded
 * samples skip rejected seeds.
 */
SizeSweep commitment_size_sweep(Mechanism mechanism, std::size_t samples, std::uint64_t seed,
                                RecoveredStyle style = RecoveredStyle::nums);

} // namespace covenant

#endif // COVENANT_MECHANISMS_HPP
