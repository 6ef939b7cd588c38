// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/hash.hpp>
#include <covenant/sighash.hpp>

namespace covenant {

std::uint8_t SigHashType::to_byte() const
{
    std::uint8_t b = static_cast<std::uint8_t>(base);
    if (anyonecanpay) b |= ANYONECANPAY_FLAG;
    if (noinput) b |= NOINPUT_FLAG;
    return b;
}

SigHashType SigHashType::from_byte(std::uint8_t byte)
{
    const std::uint8_t low = byte & 0x3f;
    if (low < 0x01 || low > 0x03) {
        throw Error(Errc::sighash, "undefined sighash type byte 0x" + to_hex(ByteView(&byte, 1)));
    }
    SigHashType t;
    t.base = static_cast<Base>(low);
    t.anyonecanpay = (byte & ANYONECANPAY_FLAG) != 0;
    t.noinput = (byte & NOINPUT_FLAG) != 0;
    return t;
}

std::string SigHashType::to_string() const
{
    std::string s = base == Base::ALL ? "ALL" : base == Base::NONE ? "NONE" : "SINGLE";
    if (noinput) s += "|NOINPUT";
    if (anyonecanpay) s += "|ANYONECANPAY";
    return s;
}

SigHashType SigHashType::from_string(std::string_view text)
{
    SigHashType t;
    bool have_base = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t bar = text.find('|', pos);
        const auto part = text.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);
        if (part == "ALL" || part == "NONE" || part == "SINGLE") {
            if (have_base) throw Error(Errc::sighash, "duplicate sighash base in '" + std::string(text) + "'");
            t.base = part == "ALL" ? Base::ALL : part == "NONE" ? Base::NONE : Base::SINGLE;
            have_base = true;
        } else if (part == "ANYONECANPAY") {
            t.anyonecanpay = true;
        } else if (part == "NOINPUT" || part == "NO_INPUT") {
            t.noinput = true;
        } else {
            throw Error(Errc::sighash, "unknown sighash component '" + std::string(part) + "'");
        }
        if (bar == std::string_view::npos) break;
        pos = bar + 1;
    }
    return t;
}

namespace {

Hash256 hash_prevouts(const Transaction& tx)
{
    Writer w;
    for (const auto& in : tx.inputs) serialize_outpoint(w, in.previous);
    return double_sha256(w.data());
}

Hash256 hash_sequences(const Transaction& tx)
{
    Writer w;
    for (const auto& in : tx.inputs) w.u32(in.sequence);
    return double_sha256(w.data());
}

Hash256 hash_outputs(const Transaction& tx)
{
    Writer w;
    for (const auto& out : tx.outputs) serialize_output(w, out);
    return double_sha256(w.data());
}

} // namespace

Hash256 sighash_digest(const Transaction& tx, std::size_t input_index, const SpentOutputContext& ctx, SigHashType type)
{
    if (input_index >= tx.inputs.size()) {
        throw Error(Errc::sighash, "input index " + std::to_string(input_index) + " out of range");
    }
    const bool commit_inputs = !type.anyonecanpay && !type.noinput;

    Hash256 prevouts;
    Hash256 sequences;
    Hash256 outputs;
    if (commit_inputs) prevouts = hash_prevouts(tx);
    if (commit_inputs && type.base == SigHashType::Base::ALL) sequences = hash_sequences(tx);

    if (type.noinput || type.base == SigHashType::Base::ALL) {
        outputs = hash_outputs(tx);
    } else if (type.base == SigHashType::Base::SINGLE) {
        if (input_index >= tx.outputs.size()) {
            throw Error(Errc::sighash, "SIGHASH_SINGLE input " + std::to_string(input_index) + " has no matching output");
        }
        outputs = double_sha256(serialize_output(tx.outputs[input_index]));
    }

    const auto& in = tx.inputs[input_index];
    Writer w;
    w.i32(tx.version);
    w.bytes(prevouts.bytes);
    w.bytes(sequences.bytes);
    if (type.noinput) {
        serialize_outpoint(w, OutPoint{Hash256{}, 0});
        w.var_bytes(ByteView{});
        w.u64(0);
    } else {
        serialize_outpoint(w, in.previous);
        w.var_bytes(ctx.script_code.bytes());
        w.u64(ctx.amount.sats());
    }
    w.u32(in.sequence);
    w.bytes(outputs.bytes);
    w.u32(tx.locktime);
    w.u32(type.to_byte());
    return double_sha256(w.data());
}

CommittedFields committed_fields(SigHashType type)
{
    CommittedFields f;
    if (type.noinput) {
        f.inputs = CommittedFields::Inputs::NONE;
        f.outpoint = false;
        f.script_code = false;
        f.amount = false;
        f.other_sequences = false;
        f.outputs = CommittedFields::Outputs::ALL;
        return f;
    }
    if (type.anyonecanpay) {
        f.inputs = CommittedFields::Inputs::THIS_ONLY;
        f.other_sequences = false;
    }
    switch (type.base) {
    case SigHashType::Base::ALL:
        f.outputs = CommittedFields::Outputs::ALL;
        break;
    case SigHashType::Base::SINGLE:
        f.outputs = CommittedFields::Outputs::SINGLE;
        f.other_sequences = false;
        break;
    case SigHashType::Base::NONE:
        f.outputs = CommittedFields::Outputs::NONE;
        f.other_sequences = false;
        break;
    }
    return f;
}

std::string describe(const CommittedFields& f)
{
    std::string s = "version, locktime";
    switch (f.inputs) {
    case CommittedFields::Inputs::ALL: s += ", all inputs"; break;
    case CommittedFields::Inputs::THIS_ONLY: s += ", this input only"; break;
    case CommittedFields::Inputs::NONE: s += ", no inputs (own sequence only)"; break;
    }
    switch (f.outputs) {
    case CommittedFields::Outputs::ALL: s += ", all outputs"; break;
    case CommittedFields::Outputs::SINGLE: s += ", matching output"; break;
    case CommittedFields::Outputs::NONE: s += ", no outputs"; break;
    }
    if (f.outpoint) s += ", outpoint";
    if (f.script_code) s += ", script code";
    if (f.amount) s += ", amount";
    return s;
}

bool committed_fields_equal(SigHashType type,
                            const Transaction& a, std::size_t ai, const SpentOutputContext& actx,
                            const Transaction& b, std::size_t bi, const SpentOutputContext& bctx)
{
    const auto f = committed_fields(type);
    if (a.version != b.version || a.locktime != b.locktime) return false;
    if (a.inputs[ai].sequence != b.inputs[bi].sequence) return false;

    if (f.inputs == CommittedFields::Inputs::ALL) {
        if (a.inputs.size() != b.inputs.size()) return false;
        for (std::size_t i = 0; i < a.inputs.size(); ++i) {
            if (a.inputs[i].previous != b.inputs[i].previous) return false;
            if (f.other_sequences && a.inputs[i].sequence != b.inputs[i].sequence) return false;
        }
    }
    if (f.outpoint && a.inputs[ai].previous != b.inputs[bi].previous) return false;
    if (f.script_code && actx.script_code != bctx.script_code) return false;
    if (f.amount && actx.amount != bctx.amount) return false;

    switch (f.outputs) {
    case CommittedFields::Outputs::ALL:
        if (a.outputs != b.outputs) return false;
        break;
    case CommittedFields::Outputs::SINGLE:
        if (ai >= a.outputs.size() || bi >= b.outputs.size()) return false;
        if (a.outputs[ai] != b.outputs[bi]) return false;
        break;
    case CommittedFields::Outputs::NONE:
        break;
    }
    return true;
}

Hash256 standard_template_hash(const Transaction& tx, std::uint32_t input_index)
{
    Writer seqs;
    for (const auto& in : tx.inputs) seqs.u32(in.sequence);
    Writer outs;
    for (const auto& out : tx.outputs) serialize_output(outs, out);

    Writer w;
    w.i32(tx.version);
    w.u32(tx.locktime);
    w.u32(static_cast<std::uint32_t>(tx.inputs.size()));
    w.bytes(sha256(seqs.data()).bytes);
    w.u32(static_cast<std::uint32_t>(tx.outputs.size()));
    w.bytes(sha256(outs.data()).bytes);
    w.u32(input_index);
    return sha256(w.data());
}

} // namespace covenant
