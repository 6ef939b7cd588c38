// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_TRANSACTION_HPP
#define COVENANT_TRANSACTION_HPP

#include <covenant/amount.hpp>
#include <covenant/common.hpp>
#include <covenant/script.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace covenant {

/** Sequence values below this signal replaceability. */
constexpr std::uint32_t SEQUENCE_FINAL = 0xffffffff;
constexpr std::uint32_t SEQUENCE_RBF_THRESHOLD = 0xfffffffe;
constexpr std::uint32_t SEQUENCE_RBF = 0xfffffffd;

struct OutPoint {
    Hash256 txid;
    std::uint32_t vout{0};

    /** All-zero txid with vout 0xffffffff, reserved for proof-of-reserves commitment inputs. */
    static OutPoint null() { return OutPoint{Hash256{}, 0xffffffff}; }
    bool is_null() const { return txid.is_null() && vout == 0xffffffff; }
    std::string to_string() const { return txid.display_hex() + ":" + std::to_string(vout); }

    auto operator<=>(const OutPoint&) const = default;
};

struct TxInput {
    OutPoint previous;
    std::uint32_t sequence{SEQUENCE_FINAL};
    std::vector<Bytes> witness;

    bool signals_rbf() const { return sequence < SEQUENCE_RBF_THRESHOLD; }
    bool operator==(const TxInput&) const = default;
};

struct TxOutput {
    Amount amount;
    Script locking_script;

    bool operator==(const TxOutput&) const = default;
};

struct Transaction {
    std::int32_t version{2};
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    std::uint32_t locktime{0};

    bool operator==(const Transaction&) const = default;

    bool signals_rbf() const;
    Amount total_output() const;
};

/** Byte writer for the Bitcoin wire encoding. */
class Writer
{
public:
    void u8(std::uint8_t v) { m_out.push_back(v); }
    void u32(std::uint32_t v);
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v);
    void compact_size(std::uint64_t n);
    void bytes(ByteView data) { m_out.insert(m_out.end(), data.begin(), data.end()); }
    /** compact_size length prefix followed by the bytes. */
    void var_bytes(ByteView data);

    const Bytes& data() const { return m_out; }
    Bytes take() { return std::move(m_out); }

private:
    Bytes m_out;
};

void serialize_outpoint(Writer& w, const OutPoint& op);
void serialize_output(Writer& w, const TxOutput& out);
Bytes serialize_output(const TxOutput& out);

/**
 * Wire serialization. With include_witness the BIP-144 marker/flag pair is
 * always written, even when every witness stack is empty.
 */
Bytes serialize(const Transaction& tx, bool include_witness);
/** Accepts both layouts; throws ParseError naming the failing offset. */
Transaction deserialize(ByteView data);

/** Double-SHA256 of the non-witness serialization (internal byte order). */
Hash256 txid(const Transaction& tx);
Hash256 wtxid(const Transaction& tx);
/** Size in bytes of the witness serialization. */
std::size_t tx_size(const Transaction& tx);

/** 0x00 || PUSH32(SHA256(witness_script)). */
Script p2wsh_address(const Script& witness_script);
/** "p2wsh:" + hex of the witness program. */
std::string p2wsh_address_string(const Script& witness_script);
std::string address_string_from_locking_script(const Script& locking_script);
bool is_p2wsh(const Script& locking_script);

} // namespace covenant

#endif // COVENANT_TRANSACTION_HPP
