// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/mechanisms.hpp>

#include <algorithm>
#include <random>

namespace covenant {

std::string_view to_string(Mechanism m)
{
    switch (m) {
    case Mechanism::deleted_key: return "deleted-key";
    case Mechanism::recovered_key: return "recovered-key";
    case Mechanism::ctv: return "ctv";
    }
    return "unknown";
}

Mechanism mechanism_from_string(std::string_view text)
{
    if (text == "deleted-key") return Mechanism::deleted_key;
    if (text == "recovered-key") return Mechanism::recovered_key;
    if (text == "ctv") return Mechanism::ctv;
    throw Error(Errc::policy, "unknown mechanism '" + std::string(text) + "'");
}

namespace {

void check_threshold(int t, int total, std::size_t key_count, const char* what)
{
    if (t < 1 || t > total || total > MAX_MULTISIG_KEYS) {
        throw Error(Errc::policy, std::string(what) + " threshold " + std::to_string(t) + "-of-" +
                                      std::to_string(total) + " outside 1 <= t <= total <= 15");
    }
    if (key_count != static_cast<std::size_t>(total)) {
        throw Error(Errc::policy, std::string(what) + " policy lists " + std::to_string(key_count) + " keys, expected " +
                                      std::to_string(total));
    }
}

/** Threshold clause over keys; VERIFY form for everything but the final clause. */
Script threshold_clause(int t, const std::vector<PublicKey>& keys, bool verify)
{
    Script s;
    if (keys.size() == 1 && t == 1) {
        s.push(keys[0].view());
        s.op(verify ? OP_CHECKSIGVERIFY : OP_CHECKSIG);
        return s;
    }
    s.push_int(t);
    for (const auto& k : keys) s.push(k.view());
    s.push_int(static_cast<std::int64_t>(keys.size()));
    s.op(verify ? OP_CHECKMULTISIGVERIFY : OP_CHECKMULTISIG);
    return s;
}

/** IF a ELSE IF b ELSE c ENDIF ENDIF over the alternatives. */
Script select_branch(const std::vector<Script>& arms)
{
    if (arms.size() == 1) return arms[0];
    Script s;
    s.op(OP_IF).append(arms[0]).op(OP_ELSE);
    const std::vector<Script> rest(arms.begin() + 1, arms.end());
    s.append(select_branch(rest)).op(OP_ENDIF);
    return s;
}

/** Bottom-to-top selector elements choosing arm `branch` of select_branch. */
std::vector<Bytes> branch_selectors(std::size_t branch, std::size_t count)
{
    std::vector<Bytes> out;
    if (branch + 1 < count) out.push_back(Bytes{1});
    for (std::size_t i = 0; i < branch; ++i) out.push_back(Bytes{});
    return out;
}

} // namespace

void EnforcementPolicy::validate() const { check_threshold(m, n, keys.size(), "enforcement"); }

bool EnforcementPolicy::contains(const PublicKey& key) const
{
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

void CustodialPolicy::validate() const { check_threshold(j, k, keys.size(), "custodial"); }

std::size_t DepositSpec::branch_count() const
{
    switch (mechanism) {
    case Mechanism::deleted_key: return 1;
    case Mechanism::recovered_key: return recovered_keys.size();
    case Mechanism::ctv: return ctv_hashes.size();
    }
    return 0;
}

Script commitment_clause(const DepositSpec& spec, std::size_t branch)
{
    switch (spec.mechanism) {
    case Mechanism::deleted_key: {
        if (!spec.enforcement) throw Error(Errc::policy, "deleted-key deposit needs an enforcement policy");
        spec.enforcement->validate();
        return threshold_clause(spec.enforcement->m, spec.enforcement->keys, false);
    }
    case Mechanism::recovered_key:
        if (branch >= spec.recovered_keys.size()) throw Error(Errc::policy, "recovered-key branch out of range");
        return Script().push(spec.recovered_keys[branch].view()).op(OP_CHECKSIG);
    case Mechanism::ctv:
        if (branch >= spec.ctv_hashes.size()) throw Error(Errc::policy, "ctv branch out of range");
        return Script().push(spec.ctv_hashes[branch].view()).op(OP_CHECKTEMPLATEVERIFY);
    }
    throw Error(Errc::policy, "unknown mechanism");
}

Script custodial_clause(const CustodialPolicy& cust)
{
    cust.validate();
    return threshold_clause(cust.j, cust.keys, false);
}

Script deposit_witness_script(const DepositSpec& spec)
{
    spec.custodial.validate();
    Script core;
    switch (spec.mechanism) {
    case Mechanism::deleted_key:
        if (!spec.enforcement) throw Error(Errc::policy, "deleted-key deposit needs an enforcement policy");
        spec.enforcement->validate();
        core.append(threshold_clause(spec.enforcement->m, spec.enforcement->keys, true));
        core.append(threshold_clause(spec.custodial.j, spec.custodial.keys, false));
        break;
    case Mechanism::recovered_key: {
        if (spec.recovered_keys.empty()) throw Error(Errc::policy, "recovered-key deposit needs the recovered key(s)");
        std::vector<Script> arms;
        for (const auto& key : spec.recovered_keys) arms.push_back(Script().push(key.view()).op(OP_CHECKSIGVERIFY));
        core.append(select_branch(arms));
        core.append(threshold_clause(spec.custodial.j, spec.custodial.keys, false));
        break;
    }
    case Mechanism::ctv: {
        if (spec.ctv_hashes.empty()) throw Error(Errc::policy, "ctv deposit needs at least one template hash");
        std::vector<Script> arms;
        for (const auto& h : spec.ctv_hashes) arms.push_back(Script().push(h.view()));
        core.append(threshold_clause(spec.custodial.j, spec.custodial.keys, true));
        core.append(select_branch(arms));
        core.op(OP_CHECKTEMPLATEVERIFY);
        break;
    }
    }

    Script covenant_path;
    if (spec.activation_height) {
        covenant_path.push_int(*spec.activation_height).op(OP_CHECKLOCKTIMEVERIFY).op(OP_DROP);
    }
    covenant_path.append(core);
    if (!spec.refund) return covenant_path;

    Script s;
    s.op(OP_IF).append(covenant_path).op(OP_ELSE);
    s.push_int(spec.refund->height).op(OP_CHECKLOCKTIMEVERIFY).op(OP_DROP);
    s.push(spec.refund->key.view()).op(OP_CHECKSIG);
    s.op(OP_ENDIF);
    return s;
}

DepositAddress deposit_address(const DepositSpec& spec)
{
    Script ws = deposit_witness_script(spec);
    if (ws.size() > MAX_WITNESS_SCRIPT_SIZE) throw Error(Errc::policy, "deposit witness script exceeds 3600 bytes");
    Script locking = p2wsh_address(ws);
    std::string addr = address_string_from_locking_script(locking);
    return DepositAddress{std::move(ws), std::move(locking), std::move(addr)};
}

std::vector<Bytes> covenant_witness(const DepositSpec& spec, const CovenantWitnessParts& parts)
{
    const std::size_t branches = spec.branch_count();
    if (parts.branch >= branches) throw Error(Errc::policy, "branch " + std::to_string(parts.branch) + " out of range");
    std::vector<Bytes> w;
    const auto selectors = branch_selectors(parts.branch, branches);
    switch (spec.mechanism) {
    case Mechanism::deleted_key:
    case Mechanism::recovered_key:
        w.insert(w.end(), parts.custodial_sigs.begin(), parts.custodial_sigs.end());
        w.insert(w.end(), parts.enforcement_sigs.begin(), parts.enforcement_sigs.end());
        w.insert(w.end(), selectors.begin(), selectors.end());
        break;
    case Mechanism::ctv:
        w.insert(w.end(), selectors.begin(), selectors.end());
        w.insert(w.end(), parts.custodial_sigs.begin(), parts.custodial_sigs.end());
        break;
    }
    if (spec.refund) w.push_back(Bytes{1});
    w.push_back(deposit_witness_script(spec).bytes());
    return w;
}

std::vector<Bytes> refund_witness(const DepositSpec& spec, const Bytes& refund_sig)
{
    if (!spec.refund) throw Error(Errc::policy, "deposit has no refund path");
    return {refund_sig, Bytes{}, deposit_witness_script(spec).bytes()};
}

void CovenantTemplate::validate() const
{
    if (sighash_types.size() != transaction.inputs.size()) {
        throw Error(Errc::policy, "template has " + std::to_string(transaction.inputs.size()) + " inputs but " +
                                      std::to_string(sighash_types.size()) + " sighash types");
    }
    if (mechanism == Mechanism::recovered_key) {
        for (const auto& t : sighash_types) {
            if (!t.noinput) throw Error(Errc::policy, "recovered-key templates must use NOINPUT sighash types");
        }
    }
}

CovenantTemplate make_template(Transaction tx, Mechanism mechanism, SigHashType type)
{
    CovenantTemplate t;
    t.sighash_types.assign(tx.inputs.size(), type);
    t.transaction = std::move(tx);
    t.mechanism = mechanism;
    t.validate();
    return t;
}

Bytes CommitmentSignature::encoded() const
{
    Bytes out = der_encode(signature);
    out.push_back(type.to_byte());
    return out;
}

Bytes sign_input(const Transaction& tx, std::size_t input_index, const PrivateKey& key,
                 const SpentOutputContext& ctx, SigHashType type)
{
    Bytes out = der_encode(sign(key, sighash_digest(tx, input_index, ctx, type)));
    out.push_back(type.to_byte());
    return out;
}

CommitmentSignature sign_commitment(const CovenantTemplate& tmpl, std::size_t input_index, const PrivateKey& key,
                                    const SpentOutputContext& ctx, const EnforcementPolicy& policy)
{
    tmpl.validate();
    const PublicKey pub = key.public_key();
    if (!policy.contains(pub)) {
        throw Error(Errc::key, "key " + pub.fingerprint() + " is not part of the enforcement policy");
    }
    if (input_index >= tmpl.sighash_types.size()) throw Error(Errc::policy, "input index out of range");
    const SigHashType type = tmpl.sighash_types[input_index];
    const Hash256 digest = sighash_digest(tmpl.transaction, input_index, ctx, type);
    return CommitmentSignature{input_index, sign(key, digest), type, pub};
}

bool verify_commitment(const CovenantTemplate& tmpl, const CommitmentSignature& sig, const SpentOutputContext& ctx)
{
    if (sig.input_index >= tmpl.transaction.inputs.size()) return false;
    try {
        const Hash256 digest = sighash_digest(tmpl.transaction, sig.input_index, ctx, sig.type);
        return verify(sig.signer, digest, sig.signature, true);
    } catch (const Error&) {
        return false;
    }
}

Hash256 recovered_key_digest(const CovenantTemplate& tmpl, std::size_t input_index)
{
    tmpl.validate();
    if (input_index >= tmpl.sighash_types.size()) throw Error(Errc::policy, "input index out of range");
    const SigHashType type = tmpl.sighash_types[input_index];
    if (!type.noinput) throw Error(Errc::policy, "recovered-key commitments need a NOINPUT sighash type");
    // NOINPUT ignores script code and amount, so the deposit need not exist yet.
    return sighash_digest(tmpl.transaction, input_index, SpentOutputContext{}, type);
}

RecoveredKeyCovenant build_recovered_key_covenant(const CovenantTemplate& tmpl, std::size_t input_index,
                                                  RecoveredStyle style, const std::optional<SignatureSeeds>& seeds)
{
    const Hash256 digest = recovered_key_digest(tmpl, input_index);
    const SigHashType type = tmpl.sighash_types[input_index];
    if (style == RecoveredStyle::nums) {
        const RecoveredCommitment rc = nums_signature(digest);
        return RecoveredKeyCovenant{CommitmentSignature{input_index, rc.signature, type, rc.key}, rc.key, std::nullopt};
    }
    if (!seeds) throw Error(Errc::seed_rejected, "seeded style needs seeds");
    const RecoveredCommitment rc = seeded_signature(*seeds, digest);
    return RecoveredKeyCovenant{CommitmentSignature{input_index, rc.signature, type, rc.key}, rc.key, seeds};
}

CtvTemplateHash ctv_hash(const CovenantTemplate& tmpl, std::size_t input_index)
{
    if (input_index >= tmpl.transaction.inputs.size()) throw Error(Errc::policy, "input index out of range");
    const auto idx = static_cast<std::uint32_t>(input_index);
    return CtvTemplateHash{standard_template_hash(tmpl.transaction, idx), idx};
}

CommitmentSize commitment_size(Mechanism mechanism, const EcdsaSignature& sig)
{
    if (mechanism == Mechanism::ctv) throw Error(Errc::policy, "ctv commitments carry no signature");
    CommitmentSize s;
    s.mechanism = mechanism;
    s.der_bytes = der_encode(sig).size();
    s.der_convention = s.der_bytes + 1 + PublicKey::SIZE;
    s.with_type_convention = s.der_convention + 1;
    return s;
}

CommitmentSize ctv_commitment_size(const Hash256& hash)
{
    CommitmentSize s;
    s.mechanism = Mechanism::ctv;
    s.der_convention = Script().push(hash.view()).op(OP_CHECKTEMPLATEVERIFY).size();
    s.with_type_convention = s.der_convention;
    return s;
}

SizeSweep commitment_size_sweep(Mechanism mechanism, std::size_t samples, std::uint64_t seed, RecoveredStyle style)
{
    SizeSweep sweep;
    sweep.mechanism = mechanism;
    sweep.style = style;
    sweep.samples = samples;
    std::mt19937_64 rng(seed);
    auto random_bytes = [&](std::size_t n) {
        Bytes b(n);
        for (auto& x : b) x = static_cast<std::uint8_t>(rng());
        return b;
    };
    auto record = [&](const CommitmentSize& c) {
        ++sweep.der_convention[c.der_convention];
        ++sweep.with_type_convention[c.with_type_convention];
    };
    for (std::size_t i = 0; i < samples; ++i) {
        const Hash256 digest = Hash256::from_span(random_bytes(32));
        switch (mechanism) {
        case Mechanism::deleted_key: {
            const PrivateKey key = PrivateKey::generate(rng);
            const EcdsaSignature sig = sign(key, digest);
            record(commitment_size(mechanism, sig));
            record(commitment_size(mechanism, malleate(sig)));
            break;
        }
        case Mechanism::recovered_key:
            if (style == RecoveredStyle::nums) {
                record(commitment_size(mechanism, nums_signature(digest).signature));
                break;
            }
            for (;;) {
                try {
                    const SignatureSeeds seeds{random_bytes(32), random_bytes(32)};
                    record(commitment_size(mechanism, seeded_signature(seeds, digest).signature));
                    break;
                } catch (const Error& e) {
                    if (e.code() != Errc::seed_rejected) throw;
                }
            }
            break;
        case Mechanism::ctv:
            record(ctv_commitment_size(digest));
            break;
        }
    }
    return sweep;
}

} // namespace covenant
