// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/hash.hpp>
#include <covenant/proof.hpp>
#include <covenant/serde.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace covenant {

std::string_view to_string(ProofKind kind) { return kind == ProofKind::reserves ? "reserves" : "covenant"; }

namespace {

ByteView text_bytes(std::string_view s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

ProofVerdict fail(std::string reason, std::string detail) { return ProofVerdict{std::move(reason), std::move(detail)}; }

bool contains(const std::vector<PublicKey>& keys, const PublicKey& k)
{
    return std::find(keys.begin(), keys.end(), k) != keys.end();
}

/** Signature checks shared by deleted-key commitments and reserves custodial signatures. */
ProofVerdict check_threshold_signatures(const ProofBundle& b, const std::vector<PublicKey>& keys, int threshold,
                                        const SpentOutputContext& ctx, const char* foreign_reason)
{
    std::set<PublicKey> signers;
    for (const auto& s : b.signatures) {
        if (s.input_index != b.input_index) return fail("malformed", "signature for input " + std::to_string(s.input_index));
        if (!contains(keys, s.signer)) return fail(foreign_reason, "signer " + s.signer.fingerprint() + " not in policy");
        const auto f = committed_fields(s.type);
        if (f.outputs != CommittedFields::Outputs::ALL) {
            return fail("sighash-type", s.type.to_string() + " does not commit to every output");
        }
        if (b.kind == ProofKind::reserves && s.type != SigHashType::all()) {
            return fail("sighash-type", "reserves signatures must use ALL");
        }
        Hash256 digest;
        try {
            digest = sighash_digest(b.covenant_tx, b.input_index, ctx, s.type);
        } catch (const Error& e) {
            return fail("sighash-type", e.what());
        }
        if (!verify(s.signer, digest, s.signature, true)) {
            return fail(b.kind == ProofKind::reserves ? "custodial-sig" : "bad-sig",
                        "signature by " + s.signer.fingerprint() + " does not verify");
        }
        signers.insert(s.signer);
    }
    if (static_cast<int>(signers.size()) < threshold) {
        return fail("quorum", std::to_string(signers.size()) + " distinct signers, " + std::to_string(threshold) + " required");
    }
    return {};
}

ProofVerdict check_deleted_key(const ProofBundle& b, const SpentOutputContext& ctx)
{
    const EnforcementPolicy& policy = *b.deposit.enforcement;
    if (auto v = check_threshold_signatures(b, policy.keys, policy.m, ctx, "key-mismatch"); !v.accepted()) return v;

    std::map<std::string, PublicKey> by_fingerprint;
    for (const auto& k : policy.keys) by_fingerprint.emplace(k.fingerprint(), k);
    std::set<std::string> attested;
    for (const auto& a : b.attestations) {
        auto it = by_fingerprint.find(a.key_fingerprint);
        if (it == by_fingerprint.end()) {
            return fail("attestation-mismatch", "attestation for unknown key " + a.key_fingerprint);
        }
        if (!verify_attestation(a, it->second)) {
            return fail("attestation-mismatch", "attestation by " + a.enforcer + " is not signed by " + a.key_fingerprint);
        }
        attested.insert(a.key_fingerprint);
    }
    if (static_cast<int>(attested.size()) < policy.deletions_required()) {
        return fail("attestation-mismatch", std::to_string(attested.size()) + " deletions attested, " +
                                                std::to_string(policy.deletions_required()) + " required");
    }
    return {};
}

ProofVerdict check_recovered_key(const ProofBundle& b)
{
    if (b.signatures.size() != 1) return fail("malformed", "recovered-key proofs carry exactly one commitment signature");
    const CommitmentSignature& s = b.signatures.front();
    if (s.input_index != b.input_index) return fail("malformed", "signature for another input");
    if (!s.type.noinput) return fail("sighash-type", s.type.to_string() + " lacks NOINPUT");
    const Hash256 digest = sighash_digest(b.covenant_tx, b.input_index, SpentOutputContext{}, s.type);

    if (b.seeds) {
        if (seeded_values(*b.seeds) != s.signature) return fail("seed-mismatch", "seeds do not hash to (r, s)");
    } else if (b.nums) {
        if (nums_signature(digest).signature != s.signature) {
            return fail("nums-mismatch", "(r, s) is not the NUMS value for this template");
        }
    } else {
        return fail("malformed", "no NUMS or seed evidence");
    }
    const auto candidates = recover_pubkeys(digest, s.signature);
    if (!contains(candidates, s.signer)) return fail("key-mismatch", "signer is not recoverable from (r, s)");
    if (!verify(s.signer, digest, s.signature, true)) return fail("bad-sig", "commitment signature does not verify");
    if (!contains(b.deposit.recovered_keys, s.signer)) {
        return fail("key-mismatch", "deposit script does not commit to the recovered key");
    }
    return {};
}

ProofVerdict check_ctv(const ProofBundle& b)
{
    if (!b.template_hash) return fail("malformed", "no template hash");
    const Hash256 h = standard_template_hash(b.covenant_tx, static_cast<std::uint32_t>(b.input_index));
    if (h != *b.template_hash) return fail("ctv-mismatch", "template hash does not derive from the covenant transaction");
    const auto& hashes = b.deposit.ctv_hashes;
    if (std::find(hashes.begin(), hashes.end(), h) == hashes.end()) {
        return fail("ctv-mismatch", "deposit script does not commit to the template hash");
    }
    return {};
}

ProofVerdict check_reserves(const ProofBundle& b, const SpentOutputContext& ctx)
{
    const auto& ins = b.covenant_tx.inputs;
    if (!b.message || ins.empty() || !ins[0].previous.is_null() || b.input_index == 0) {
        return fail("malformed", "reserves transaction needs a null-outpoint commitment input first");
    }
    if (ins[0].witness.size() != 1 || ins[0].witness[0] != Bytes(b.message->bytes.begin(), b.message->bytes.end())) {
        return fail("message-mismatch", "commitment input does not carry the message hash");
    }
    return check_threshold_signatures(b, b.deposit.custodial.keys, b.deposit.custodial.j, ctx, "custodial-sig");
}

} // namespace

Hash256 attestation_digest(const std::string& enforcer, const std::string& key_fingerprint, std::uint64_t event_index)
{
    Writer w;
    w.bytes(text_bytes("covenant-kit/deletion"));
    w.var_bytes(text_bytes(enforcer));
    w.var_bytes(text_bytes(key_fingerprint));
    w.u64(event_index);
    return sha256(w.data());
}

DeletionAttestation attest_deletion(const std::string& enforcer, const PrivateKey& key, std::uint64_t event_index)
{
    const std::string fp = key.public_key().fingerprint();
    return DeletionAttestation{enforcer, fp, event_index, sign(key, attestation_digest(enforcer, fp, event_index))};
}

bool verify_attestation(const DeletionAttestation& a, const PublicKey& key)
{
    return key.fingerprint() == a.key_fingerprint &&
           verify(key, attestation_digest(a.enforcer, a.key_fingerprint, a.event_index), a.signature);
}

ProofVerdict verify_proof(const ProofBundle& b)
{
    if (b.vout >= b.deposit_tx.outputs.size()) return fail("malformed", "vout out of range");
    if (b.input_index >= b.covenant_tx.inputs.size()) return fail("malformed", "input index out of range");
    Script derived;
    try {
        derived = deposit_witness_script(b.deposit);
    } catch (const Error& e) {
        return fail("malformed", e.what());
    }
    if (derived != b.witness_script) return fail("address-mismatch", "witness script does not derive from the deposit terms");
    const TxOutput& out = b.deposit_tx.outputs[b.vout];
    if (out.locking_script != p2wsh_address(b.witness_script)) {
        return fail("address-mismatch", "deposit output is not locked to the witness script");
    }
    const OutPoint expected{txid(b.deposit_tx), b.vout};
    if (b.covenant_tx.inputs[b.input_index].previous != expected) {
        return fail("outpoint-mismatch", "covenant input does not spend " + expected.to_string());
    }
    const SpentOutputContext ctx{b.witness_script, out.amount};

    try {
        if (b.kind == ProofKind::reserves) return check_reserves(b, ctx);
        switch (b.deposit.mechanism) {
        case Mechanism::deleted_key: return check_deleted_key(b, ctx);
        case Mechanism::recovered_key: return check_recovered_key(b);
        case Mechanism::ctv: return check_ctv(b);
        }
    } catch (const Error& e) {
        return fail("malformed", e.what());
    }
    return fail("malformed", "unknown mechanism");
}

ProofVerdict verify_proof_json(const std::string& text)
{
    ProofBundle b;
    serde::json j;
    try {
        j = serde::parse(text);
        b = serde::proof_from_json(j);
    } catch (const std::exception& e) {
        return fail("malformed", e.what());
    }
    if (j.at("mechanism") != std::string(to_string(b.deposit.mechanism))) {
        return fail("malformed", "mechanism field disagrees with the deposit terms");
    }
    if (j.value("address", "") != p2wsh_address_string(b.witness_script) ||
        j.value("witness_script_asm", "") != b.witness_script.to_asm()) {
        return fail("address-mismatch", "displayed address or opcode listing disagrees with the witness script");
    }
    return verify_proof(b);
}

ProofBundle prove_covenant(const CovenantEvidence& ev)
{
    ev.tmpl.validate();
    if (ev.vout >= ev.deposit_tx.outputs.size()) throw Error(Errc::proof, "vout out of range");
    ProofBundle b;
    b.kind = ProofKind::covenant;
    b.deposit = ev.deposit;
    b.deposit_tx = ev.deposit_tx;
    b.vout = ev.vout;
    b.witness_script = deposit_witness_script(ev.deposit);
    b.covenant_tx = ev.tmpl.transaction;
    b.input_index = ev.input_index;
    b.signatures = ev.signatures;
    b.attestations = ev.attestations;
    switch (ev.deposit.mechanism) {
    case Mechanism::deleted_key:
        if (ev.signatures.empty()) throw Error(Errc::proof, "deleted-key proofs need commitment signatures");
        break;
    case Mechanism::recovered_key:
        if (ev.signatures.size() != 1) throw Error(Errc::proof, "recovered-key proofs need the commitment signature");
        b.seeds = ev.seeds;
        b.nums = !ev.seeds.has_value();
        break;
    case Mechanism::ctv:
        b.template_hash = ctv_hash(ev.tmpl, ev.input_index).hash;
        break;
    }
    return b;
}

ProofBundle prove_reserves(const DepositSpec& deposit, const Transaction& deposit_tx, std::uint32_t vout,
                           const Hash256& message, const std::vector<const PrivateKey*>& custodial_keys)
{
    if (vout >= deposit_tx.outputs.size()) throw Error(Errc::proof, "vout out of range");
    if (static_cast<int>(custodial_keys.size()) < deposit.custodial.j) {
        throw Error(Errc::key, std::to_string(custodial_keys.size()) + " custodial keys given, " +
                                   std::to_string(deposit.custodial.j) + " required");
    }
    const Script ws = deposit_witness_script(deposit);
    const TxOutput& out = deposit_tx.outputs[vout];

    Transaction tx;
    TxInput commitment;
    commitment.previous = OutPoint::null();
    commitment.witness.push_back(Bytes(message.bytes.begin(), message.bytes.end()));
    tx.inputs.push_back(commitment);
    tx.inputs.push_back(TxInput{OutPoint{txid(deposit_tx), vout}, SEQUENCE_FINAL, {}});
    tx.outputs.push_back(out);

    ProofBundle b;
    b.kind = ProofKind::reserves;
    b.deposit = deposit;
    b.deposit_tx = deposit_tx;
    b.vout = vout;
    b.witness_script = ws;
    b.input_index = 1;
    b.message = message;
    const SpentOutputContext ctx{ws, out.amount};
    const Hash256 digest = sighash_digest(tx, 1, ctx, SigHashType::all());
    std::vector<Bytes> sigs;
    for (const PrivateKey* key : custodial_keys) {
        const PublicKey pub = key->public_key();
        if (!contains(deposit.custodial.keys, pub)) {
            throw Error(Errc::key, "key " + pub.fingerprint() + " is not a custodial key of this deposit");
        }
        CommitmentSignature cs{1, sign(*key, digest), SigHashType::all(), pub};
        sigs.push_back(cs.encoded());
        b.signatures.push_back(cs);
    }
    tx.inputs[1].witness = sigs;
    tx.inputs[1].witness.push_back(ws.bytes());
    b.covenant_tx = tx;
    return b;
}

std::string proof_to_json(const ProofBundle& bundle) { return serde::to_json(bundle).dump(2); }

ProofBundle proof_from_json(const std::string& text) { return serde::proof_from_json(serde::parse(text)); }

} // namespace covenant
