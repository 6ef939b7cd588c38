// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_SIGHASH_HPP
#define COVENANT_SIGHASH_HPP

#include <covenant/transaction.hpp>

#include <cstdint>
#include <string>

namespace covenant {

/**
 * Signature hash selector. Encoded as one byte: ALL=0x01, NONE=0x02,
 * SINGLE=0x03, ANYONECANPAY adds 0x80 and NOINPUT adds 0x40.
 *
 * NOINPUT commits to every output regardless of the base type and to none of
 * the inputs except the signed input's own sequence.
 */
struct SigHashType {
    enum class Base : std::uint8_t { ALL = 0x01, NONE = 0x02, SINGLE = 0x03 };

    static constexpr std::uint8_t ANYONECANPAY_FLAG = 0x80;
    static constexpr std::uint8_t NOINPUT_FLAG = 0x40;

    Base base{Base::ALL};
    bool anyonecanpay{false};
    bool noinput{false};

    static constexpr SigHashType all() { return {}; }
    static constexpr SigHashType all_anyonecanpay() { return {Base::ALL, true, false}; }
    static constexpr SigHashType single_anyonecanpay() { return {Base::SINGLE, true, false}; }
    static constexpr SigHashType noinput_all() { return {Base::ALL, false, true}; }
    static constexpr SigHashType noinput_anyonecanpay() { return {Base::ALL, true, true}; }

    std::uint8_t to_byte() const;
    /** Throws Error(Errc::sighash) on undefined bits or base values. */
    static SigHashType from_byte(std::uint8_t byte);
    /** "ALL", "NONE|ANYONECANPAY", "ALL|NOINPUT", ... */
    std::string to_string() const;
    static SigHashType from_string(std::string_view text);

    bool operator==(const SigHashType&) const = default;
};

/** What the signed input spends; for P2WSH the script code is the full witness script. */
struct SpentOutputContext {
    Script script_code;
    Amount amount;
};

/**
 * Double-SHA256 over the BIP-143 field layout with NOINPUT extensions.
 * Throws Error(Errc::sighash) for SINGLE without a matching output or an
 * out-of-range input index. The byte layout is documented in docs/sighash.md.
 */
Hash256 sighash_digest(const Transaction& tx, std::size_t input_index, const SpentOutputContext& ctx, SigHashType type);

/** Declarative view of the fields a signature of a given type endorses. */
struct CommittedFields {
    enum class Inputs { ALL, THIS_ONLY, NONE };
    enum class Outputs { ALL, SINGLE, NONE };

    bool version{true};
    bool locktime{true};
    Inputs inputs{Inputs::ALL};
    Outputs outputs{Outputs::ALL};
    /** Spent outpoint of the signed input. */
    bool outpoint{true};
    bool script_code{true};
    bool amount{true};
    /** Sequence numbers of the other inputs. */
    bool other_sequences{true};

    bool operator==(const CommittedFields&) const = default;
};

CommittedFields committed_fields(SigHashType type);
std::string describe(const CommittedFields& fields);

/**
 * True iff every field committed under `type` is equal between the two
 * (transaction, input, context) triples, i.e. a signature for one replays
 * onto the other.
 */
bool committed_fields_equal(SigHashType type,
                            const Transaction& a, std::size_t a_index, const SpentOutputContext& a_ctx,
                            const Transaction& b, std::size_t b_index, const SpentOutputContext& b_ctx);

/**
 * CHECKTEMPLATEVERIFY template hash: single SHA256 over version, locktime,
 * input count, SHA256 of the sequences, output count, SHA256 of the
 * serialized outputs and the input index. Integers are 4-byte little-endian.
 * Inputs never carry scriptSigs, so no scriptSig hash appears. Layout in
 * docs/sighash.md.
 */
Hash256 standard_template_hash(const Transaction& tx, std::uint32_t input_index);

} // namespace covenant

#endif // COVENANT_SIGHASH_HPP
