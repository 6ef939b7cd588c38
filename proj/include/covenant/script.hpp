// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_SCRIPT_HPP
#define COVENANT_SCRIPT_HPP

#include <covenant/common.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covenant {

/** Opcode subset understood by the interpreter. Values follow Bitcoin. */
enum Opcode : std::uint8_t {
    OP_0 = 0x00,
    OP_PUSHDATA1 = 0x4c,
    OP_PUSHDATA2 = 0x4d,
    OP_1 = 0x51,
    OP_16 = 0x60,
    OP_IF = 0x63,
    OP_ELSE = 0x67,
    OP_ENDIF = 0x68,
    OP_DROP = 0x75,
    OP_EQUAL = 0x87,
    OP_EQUALVERIFY = 0x88,
    OP_CHECKSIG = 0xac,
    OP_CHECKSIGVERIFY = 0xad,
    OP_CHECKMULTISIG = 0xae,
    OP_CHECKMULTISIGVERIFY = 0xaf,
    OP_CHECKLOCKTIMEVERIFY = 0xb1,
    OP_CHECKSEQUENCEVERIFY = 0xb2,
    OP_CHECKTEMPLATEVERIFY = 0xb3,
};

constexpr std::size_t MAX_SCRIPT_SIZE = 10'000;
constexpr std::size_t MAX_WITNESS_SCRIPT_SIZE = 3'600;
constexpr std::size_t MAX_ELEMENT_SIZE = 520;
constexpr int MAX_MULTISIG_KEYS = 15;

bool is_push_opcode(std::uint8_t op);
bool is_known_opcode(std::uint8_t op);
std::string opcode_name(std::uint8_t op);

/** One decoded instruction; data is only populated for pushes. */
struct Instruction {
    std::uint8_t opcode{OP_0};
    Bytes data;

    bool is_push() const { return is_push_opcode(opcode); }
    bool operator==(const Instruction&) const = default;
};

/** Minimal little-endian sign-magnitude script number encoding. */
Bytes encode_script_num(std::int64_t value);
/** Throws Error(Errc::script) when the encoding is non-minimal or too long. */
std::int64_t decode_script_num(ByteView data, std::size_t max_size = 5);
/** Empty, all-zero and negative zero are false. */
bool cast_to_bool(ByteView data);

class Script
{
public:
    Script() = default;
    explicit Script(Bytes bytes) : m_bytes(std::move(bytes)) {}

    /** Minimal push of arbitrary data. */
    Script& push(ByteView data);
    /** OP_0 / OP_1..OP_16 for small values, minimal number push otherwise. */
    Script& push_int(std::int64_t value);
    Script& op(Opcode opcode);
    Script& append(const Script& other);

    const Bytes& bytes() const { return m_bytes; }
    std::size_t size() const { return m_bytes.size(); }
    bool empty() const { return m_bytes.empty(); }

    /** Decode into instructions; throws Error(Errc::script) on truncation or unknown opcodes. */
    std::vector<Instruction> parse() const;
    static Script from_instructions(const std::vector<Instruction>& ins);
    /** Human readable listing, e.g. "OP_2 <02ab..> OP_CHECKMULTISIG". */
    std::string to_asm() const;

    bool operator==(const Script&) const = default;

private:
    Bytes m_bytes;
};

} // namespace covenant

#endif // COVENANT_SCRIPT_HPP
