// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/hash.hpp>
#include <covenant/transaction.hpp>

namespace covenant {

bool Transaction::signals_rbf() const
{
    for (const auto& in : inputs) {
        if (in.signals_rbf()) return true;
    }
    return false;
}

Amount Transaction::total_output() const
{
    Amount total;
    for (const auto& out : outputs) total += out.amount;
    return total;
}

void Writer::u32(std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) m_out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::u64(std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) m_out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::compact_size(std::uint64_t n)
{
    if (n < 0xfd) {
        u8(static_cast<std::uint8_t>(n));
    } else if (n <= 0xffff) {
        u8(0xfd);
        u8(static_cast<std::uint8_t>(n));
        u8(static_cast<std::uint8_t>(n >> 8));
    } else if (n <= 0xffffffff) {
        u8(0xfe);
        u32(static_cast<std::uint32_t>(n));
    } else {
        u8(0xff);
        u64(n);
    }
}

void Writer::var_bytes(ByteView data)
{
    compact_size(data.size());
    bytes(data);
}

void serialize_outpoint(Writer& w, const OutPoint& op)
{
    w.bytes(op.txid.bytes);
    w.u32(op.vout);
}

void serialize_output(Writer& w, const TxOutput& out)
{
    if (out.locking_script.size() > MAX_SCRIPT_SIZE) {
        throw Error(Errc::serialization, "locking script exceeds " + std::to_string(MAX_SCRIPT_SIZE) + " bytes");
    }
    w.u64(out.amount.sats());
    w.var_bytes(out.locking_script.bytes());
}

Bytes serialize_output(const TxOutput& out)
{
    Writer w;
    serialize_output(w, out);
    return w.take();
}

Bytes serialize(const Transaction& tx, bool include_witness)
{
    Writer w;
    w.i32(tx.version);
    if (include_witness) {
        w.u8(0x00);
        w.u8(0x01);
    }
    w.compact_size(tx.inputs.size());
    for (const auto& in : tx.inputs) {
        serialize_outpoint(w, in.previous);
        w.compact_size(0); // no scriptSig: every spend is native segwit
        w.u32(in.sequence);
    }
    w.compact_size(tx.outputs.size());
    for (const auto& out : tx.outputs) serialize_output(w, out);
    if (include_witness) {
        for (const auto& in : tx.inputs) {
            w.compact_size(in.witness.size());
            for (const auto& item : in.witness) {
                if (item.size() > MAX_SCRIPT_SIZE) {
                    throw Error(Errc::serialization, "witness element exceeds " + std::to_string(MAX_SCRIPT_SIZE) + " bytes");
                }
                w.var_bytes(item);
            }
        }
    }
    w.u32(tx.locktime);
    return w.take();
}

namespace {

class Reader
{
public:
    explicit Reader(ByteView data) : m_data(data) {}

    std::uint8_t u8()
    {
        need(1, "byte");
        return m_data[m_pos++];
    }
    std::uint32_t u32()
    {
        need(4, "uint32");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(m_data[m_pos++]) << (8 * i);
        return v;
    }
    std::uint64_t u64()
    {
        need(8, "uint64");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(m_data[m_pos++]) << (8 * i);
        return v;
    }
    std::uint64_t compact_size()
    {
        const std::size_t start = m_pos;
        const std::uint8_t first = u8();
        std::uint64_t n = first;
        if (first == 0xfd) {
            need(2, "compact size");
            n = m_data[m_pos] | (m_data[m_pos + 1] << 8);
            m_pos += 2;
            if (n < 0xfd) throw ParseError(start, "non-canonical compact size");
        } else if (first == 0xfe) {
            n = u32();
            if (n <= 0xffff) throw ParseError(start, "non-canonical compact size");
        } else if (first == 0xff) {
            n = u64();
            if (n <= 0xffffffff) throw ParseError(start, "non-canonical compact size");
        }
        if (n > m_data.size()) throw ParseError(start, "compact size larger than input");
        return n;
    }
    Bytes bytes(std::size_t n)
    {
        need(n, "byte string");
        Bytes out(m_data.begin() + m_pos, m_data.begin() + m_pos + n);
        m_pos += n;
        return out;
    }
    std::uint8_t peek(std::size_t ahead = 0) const
    {
        if (m_pos + ahead >= m_data.size()) throw ParseError(m_pos + ahead, "unexpected end of data");
        return m_data[m_pos + ahead];
    }
    std::size_t pos() const { return m_pos; }
    bool done() const { return m_pos == m_data.size(); }

private:
    void need(std::size_t n, const char* what) const
    {
        if (m_pos + n > m_data.size()) throw ParseError(m_pos, std::string("truncated ") + what);
    }

    ByteView m_data;
    std::size_t m_pos{0};
};

} // namespace

Transaction deserialize(ByteView data)
{
    Reader r(data);
    Transaction tx;
    tx.version = static_cast<std::int32_t>(r.u32());
    bool has_witness = false;
    if (r.peek() == 0x00 && r.peek(1) == 0x01) {
        has_witness = true;
        r.u8();
        r.u8();
    }
    const auto n_in = r.compact_size();
    tx.inputs.resize(n_in);
    for (auto& in : tx.inputs) {
        in.previous.txid = Hash256::from_span(r.bytes(32));
        in.previous.vout = r.u32();
        const std::size_t at = r.pos();
        if (r.compact_size() != 0) throw ParseError(at, "scriptSig must be empty for native segwit inputs");
        in.sequence = r.u32();
    }
    const auto n_out = r.compact_size();
    tx.outputs.resize(n_out);
    for (auto& out : tx.outputs) {
        const std::size_t at = r.pos();
        const std::uint64_t sats = r.u64();
        if (sats > Amount::MAX_MONEY) throw ParseError(at, "output amount exceeds MAX_MONEY");
        out.amount = Amount(sats);
        const auto len = r.compact_size();
        if (len > MAX_SCRIPT_SIZE) throw ParseError(at, "locking script too large");
        out.locking_script = Script(r.bytes(len));
    }
    if (has_witness) {
        for (auto& in : tx.inputs) {
            const auto items = r.compact_size();
            in.witness.resize(items);
            for (auto& item : in.witness) item = r.bytes(r.compact_size());
        }
    }
    tx.locktime = r.u32();
    if (!r.done()) throw ParseError(r.pos(), "trailing bytes after transaction");
    return tx;
}

Hash256 txid(const Transaction& tx)
{
    return double_sha256(serialize(tx, false));
}

Hash256 wtxid(const Transaction& tx)
{
    return double_sha256(serialize(tx, true));
}

std::size_t tx_size(const Transaction& tx)
{
    return serialize(tx, true).size();
}

Script p2wsh_address(const Script& witness_script)
{
    if (witness_script.empty()) throw Error(Errc::script, "witness script must not be empty");
    if (witness_script.size() > MAX_WITNESS_SCRIPT_SIZE) {
        throw Error(Errc::script, "witness script exceeds " + std::to_string(MAX_WITNESS_SCRIPT_SIZE) + " bytes");
    }
    Script out;
    out.op(OP_0);
    out.push(sha256(witness_script.bytes()).bytes);
    return out;
}

bool is_p2wsh(const Script& locking_script)
{
    const auto& b = locking_script.bytes();
    return b.size() == 34 && b[0] == 0x00 && b[1] == 0x20;
}

std::string address_string_from_locking_script(const Script& locking_script)
{
    if (!is_p2wsh(locking_script)) throw Error(Errc::script, "not a P2WSH locking script");
    return "p2wsh:" + to_hex(ByteView(locking_script.bytes()).subspan(2));
}

std::string p2wsh_address_string(const Script& witness_script)
{
    return address_string_from_locking_script(p2wsh_address(witness_script));
}

} // namespace covenant
