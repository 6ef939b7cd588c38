// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/script.hpp>

namespace covenant {

bool is_push_opcode(std::uint8_t op)
{
    return op <= OP_PUSHDATA2 || (op >= OP_1 && op <= OP_16);
}

bool is_known_opcode(std::uint8_t op)
{
    if (is_push_opcode(op)) return true;
    switch (op) {
    case OP_IF: case OP_ELSE: case OP_ENDIF: case OP_DROP: case OP_EQUAL: case OP_EQUALVERIFY:
    case OP_CHECKSIG: case OP_CHECKSIGVERIFY: case OP_CHECKMULTISIG: case OP_CHECKMULTISIGVERIFY:
    case OP_CHECKLOCKTIMEVERIFY: case OP_CHECKSEQUENCEVERIFY: case OP_CHECKTEMPLATEVERIFY:
        return true;
    default:
        return false;
    }
}

std::string opcode_name(std::uint8_t op)
{
    if (op == OP_0) return "OP_0";
    if (op >= OP_1 && op <= OP_16) return "OP_" + std::to_string(op - OP_1 + 1);
    switch (op) {
    case OP_PUSHDATA1: return "OP_PUSHDATA1";
    case OP_PUSHDATA2: return "OP_PUSHDATA2";
    case OP_IF: return "OP_IF";
    case OP_ELSE: return "OP_ELSE";
    case OP_ENDIF: return "OP_ENDIF";
    case OP_DROP: return "OP_DROP";
    case OP_EQUAL: return "OP_EQUAL";
    case OP_EQUALVERIFY: return "OP_EQUALVERIFY";
    case OP_CHECKSIG: return "OP_CHECKSIG";
    case OP_CHECKSIGVERIFY: return "OP_CHECKSIGVERIFY";
    case OP_CHECKMULTISIG: return "OP_CHECKMULTISIG";
    case OP_CHECKMULTISIGVERIFY: return "OP_CHECKMULTISIGVERIFY";
    case OP_CHECKLOCKTIMEVERIFY: return "OP_CHECKLOCKTIMEVERIFY";
    case OP_CHECKSEQUENCEVERIFY: return "OP_CHECKSEQUENCEVERIFY";
    case OP_CHECKTEMPLATEVERIFY: return "OP_CHECKTEMPLATEVERIFY";
    default: return "OP_UNKNOWN";
    }
}

Bytes encode_script_num(std::int64_t value)
{
    Bytes out;
    if (value == 0) return out;
    const bool neg = value < 0;
    std::uint64_t abs = neg ? static_cast<std::uint64_t>(-(value + 1)) + 1 : static_cast<std::uint64_t>(value);
    while (abs) {
        out.push_back(static_cast<std::uint8_t>(abs & 0xff));
        abs >>= 8;
    }
    if (out.back() & 0x80) {
        out.push_back(neg ? 0x80 : 0x00);
    } else if (neg) {
        out.back() |= 0x80;
    }
    return out;
}

std::int64_t decode_script_num(ByteView data, std::size_t max_size)
{
    if (data.size() > max_size) throw Error(Errc::script, "script number overflow");
    if (data.empty()) return 0;
    if ((data.back() & 0x7f) == 0 && (data.size() <= 1 || (data[data.size() - 2] & 0x80) == 0)) {
        throw Error(Errc::script, "non-minimally encoded script number");
    }
    std::int64_t result = 0;
    for (std::size_t i = 0; i < data.size(); ++i) result |= static_cast<std::int64_t>(data[i]) << (8 * i);
    if (data.back() & 0x80) {
        return -(result & ~(static_cast<std::int64_t>(0x80) << (8 * (data.size() - 1))));
    }
    return result;
}

bool cast_to_bool(ByteView data)
{
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i] != 0) {
            // negative zero
            return !(i == data.size() - 1 && data[i] == 0x80);
        }
    }
    return false;
}

Script& Script::push(ByteView data)
{
    if (data.size() < OP_PUSHDATA1) {
        m_bytes.push_back(static_cast<std::uint8_t>(data.size()));
    } else if (data.size() <= 0xff) {
        m_bytes.push_back(OP_PUSHDATA1);
        m_bytes.push_back(static_cast<std::uint8_t>(data.size()));
    } else if (data.size() <= 0xffff) {
        m_bytes.push_back(OP_PUSHDATA2);
        m_bytes.push_back(static_cast<std::uint8_t>(data.size() & 0xff));
        m_bytes.push_back(static_cast<std::uint8_t>(data.size() >> 8));
    } else {
        throw Error(Errc::script, "push exceeds 65535 bytes");
    }
    m_bytes.insert(m_bytes.end(), data.begin(), data.end());
    return *this;
}

Script& Script::push_int(std::int64_t value)
{
    if (value == 0) {
        m_bytes.push_back(OP_0);
    } else if (value >= 1 && value <= 16) {
        m_bytes.push_back(static_cast<std::uint8_t>(OP_1 + value - 1));
    } else {
        push(encode_script_num(value));
    }
    return *this;
}

Script& Script::op(Opcode opcode)
{
    m_bytes.push_back(opcode);
    return *this;
}

Script& Script::append(const Script& other)
{
    m_bytes.insert(m_bytes.end(), other.m_bytes.begin(), other.m_bytes.end());
    return *this;
}

std::vector<Instruction> Script::parse() const
{
    std::vector<Instruction> out;
    std::size_t pos = 0;
    while (pos < m_bytes.size()) {
        const std::size_t start = pos;
        const std::uint8_t op = m_bytes[pos++];
        Instruction ins{op, {}};
        if (op > OP_0 && op <= OP_PUSHDATA2) {
            std::size_t len = op;
            if (op == OP_PUSHDATA1) {
                if (pos + 1 > m_bytes.size()) throw Error(Errc::script, "truncated PUSHDATA1 at offset " + std::to_string(start));
                len = m_bytes[pos++];
            } else if (op == OP_PUSHDATA2) {
                if (pos + 2 > m_bytes.size()) throw Error(Errc::script, "truncated PUSHDATA2 at offset " + std::to_string(start));
                len = m_bytes[pos] | (m_bytes[pos + 1] << 8);
                pos += 2;
            }
            if (pos + len > m_bytes.size()) throw Error(Errc::script, "truncated push at offset " + std::to_string(start));
            ins.data.assign(m_bytes.begin() + pos, m_bytes.begin() + pos + len);
            pos += len;
        } else if (!is_known_opcode(op)) {
            throw Error(Errc::script, "unsupported opcode 0x" + to_hex(ByteView(&m_bytes[start], 1)) + " at offset " + std::to_string(start));
        }
        out.push_back(std::move(ins));
    }
    return out;
}

Script Script::from_instructions(const std::vector<Instruction>& ins)
{
    Script s;
    for (const auto& i : ins) {
        if (i.opcode > OP_0 && i.opcode <= OP_PUSHDATA2) {
            // re-encode with the original opcode so round trips are exact
            s.m_bytes.push_back(i.opcode);
            if (i.opcode == OP_PUSHDATA1) {
                s.m_bytes.push_back(static_cast<std::uint8_t>(i.data.size()));
            } else if (i.opcode == OP_PUSHDATA2) {
                s.m_bytes.push_back(static_cast<std::uint8_t>(i.data.size() & 0xff));
                s.m_bytes.push_back(static_cast<std::uint8_t>(i.data.size() >> 8));
            }
            s.m_bytes.insert(s.m_bytes.end(), i.data.begin(), i.data.end());
        } else {
            s.m_bytes.push_back(i.opcode);
        }
    }
    return s;
}

std::string Script::to_asm() const
{
    std::string out;
    for (const auto& ins : parse()) {
        if (!out.empty()) out += ' ';
        if (ins.opcode > OP_0 && ins.opcode <= OP_PUSHDATA2) {
            out += '<' + to_hex(ins.data) + '>';
        } else {
            out += opcode_name(ins.opcode);
        }
    }
    return out;
}

} // namespace covenant
