// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/serde.hpp>

namespace covenant::serde {

namespace {

json keys_json(const std::vector<PublicKey>& keys)
{
    json a = json::array();
    for (const auto& k : keys) a.push_back(k.hex());
    return a;
}

std::vector<PublicKey> keys_from_json(const json& j)
{
    std::vector<PublicKey> out;
    for (const auto& k : j) out.push_back(PublicKey::from_hex(k.get<std::string>()));
    return out;
}

std::string str(const json& j, const char* key) { return j.at(key).get<std::string>(); }

} // namespace

void require_format(const json& j, const char* what)
{
    if (!j.is_object() || !j.contains("format")) throw Error(Errc::parse, std::string(what) + " lacks a \"format\" field");
    if (j.at("format") != 1) {
        throw Error(Errc::parse, std::string(what) + " format " + j.at("format").dump() + " is not supported");
    }
}

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        throw ParseError(offset, "malformed JSON");
    }
}

json to_json(const Transaction& tx)
{
    return json{{"hex", to_hex(serialize(tx, true))}, {"txid", txid(tx).display_hex()}};
}

Transaction transaction_from_json(const json& j)
{
    const std::string hex = j.is_string() ? j.get<std::string>() : str(j, "hex");
    return deserialize(from_hex(hex));
}

json to_json(const EnforcementPolicy& p) { return json{{"m", p.m}, {"n", p.n}, {"keys", keys_json(p.keys)}}; }

EnforcementPolicy enforcement_from_json(const json& j)
{
    EnforcementPolicy p{j.at("m").get<int>(), j.at("n").get<int>(), keys_from_json(j.at("keys"))};
    p.validate();
    return p;
}

json to_json(const CustodialPolicy& p) { return json{{"j", p.j}, {"k", p.k}, {"keys", keys_json(p.keys)}}; }

CustodialPolicy custodial_from_json(const json& j)
{
    CustodialPolicy p{j.at("j").get<int>(), j.at("k").get<int>(), keys_from_json(j.at("keys"))};
    p.validate();
    return p;
}

json to_json(const DepositSpec& spec)
{
    json j{{"mechanism", std::string(to_string(spec.mechanism))}, {"custodial", to_json(spec.custodial)}};
    if (spec.enforcement) j["enforcement"] = to_json(*spec.enforcement);
    if (!spec.recovered_keys.empty()) j["recovered_keys"] = keys_json(spec.recovered_keys);
    if (!spec.ctv_hashes.empty()) {
        json h = json::array();
        for (const auto& x : spec.ctv_hashes) h.push_back(x.hex());
        j["ctv_hashes"] = h;
    }
    if (spec.activation_height) j["activation_height"] = *spec.activation_height;
    if (spec.refund) j["refund"] = json{{"height", spec.refund->height}, {"key", spec.refund->key.hex()}};
    return j;
}

DepositSpec deposit_spec_from_json(const json& j)
{
    DepositSpec spec;
    spec.mechanism = mechanism_from_string(str(j, "mechanism"));
    spec.custodial = custodial_from_json(j.at("custodial"));
    if (j.contains("enforcement")) spec.enforcement = enforcement_from_json(j.at("enforcement"));
    if (j.contains("recovered_keys")) spec.recovered_keys = keys_from_json(j.at("recovered_keys"));
    if (j.contains("ctv_hashes")) {
        for (const auto& h : j.at("ctv_hashes")) spec.ctv_hashes.push_back(Hash256::from_hex(h.get<std::string>()));
    }
    if (j.contains("activation_height")) spec.activation_height = j.at("activation_height").get<std::uint32_t>();
    if (j.contains("refund")) {
        const auto& r = j.at("refund");
        spec.refund = RefundPath{r.at("height").get<std::uint32_t>(), PublicKey::from_hex(str(r, "key"))};
    }
    return spec;
}

json to_json(const CovenantTemplate& t)
{
    json types = json::array();
    for (const auto& s : t.sighash_types) types.push_back(s.to_string());
    return json{{"mechanism", std::string(to_string(t.mechanism))},
                {"transaction", to_json(t.transaction)},
                {"sighash_types", types}};
}

CovenantTemplate template_from_json(const json& j)
{
    CovenantTemplate t;
    t.mechanism = mechanism_from_string(str(j, "mechanism"));
    t.transaction = transaction_from_json(j.at("transaction"));
    for (const auto& s : j.at("sighash_types")) t.sighash_types.push_back(SigHashType::from_string(s.get<std::string>()));
    t.validate();
    return t;
}

json to_json(const CommitmentSignature& s)
{
    return json{{"input", s.input_index},
                {"signer", s.signer.hex()},
                {"sig", to_hex(s.encoded())}};
}

CommitmentSignature commitment_from_json(const json& j)
{
    const Bytes sig = from_hex(str(j, "sig"));
    if (sig.empty()) throw Error(Errc::parse, "empty signature");
    const ByteView der(sig.data(), sig.size() - 1);
    return CommitmentSignature{j.at("input").get<std::size_t>(), der_decode(der), SigHashType::from_byte(sig.back()),
                               PublicKey::from_hex(str(j, "signer"))};
}

json to_json(const SignatureSeeds& s) { return json{{"seed_r", to_hex(s.seed_r)}, {"seed_s", to_hex(s.seed_s)}}; }

SignatureSeeds seeds_from_json(const json& j) { return {from_hex(str(j, "seed_r")), from_hex(str(j, "seed_s"))}; }

json to_json(const DeletionAttestation& a)
{
    return json{{"enforcer", a.enforcer},
                {"key_fingerprint", a.key_fingerprint},
                {"event_index", a.event_index},
                {"sig", to_hex(der_encode(a.signature))}};
}

DeletionAttestation attestation_from_json(const json& j)
{
    return {str(j, "enforcer"), str(j, "key_fingerprint"), j.at("event_index").get<std::uint64_t>(),
            der_decode(from_hex(str(j, "sig")))};
}

json to_json(const ProofBundle& b)
{
    const Script& ws = b.witness_script;
    json j{{"format", 1},
           {"kind", std::string(to_string(b.kind))},
           {"mechanism", std::string(to_string(b.deposit.mechanism))},
           {"deposit", to_json(b.deposit)},
           {"deposit_tx", to_hex(serialize(b.deposit_tx, false))},
           {"vout", b.vout},
           {"covenant_tx", to_hex(serialize(b.covenant_tx, true))},
           {"input_index", b.input_index},
           {"witness_script", to_hex(ws.bytes())},
           {"witness_script_asm", ws.to_asm()},
           {"address", p2wsh_address_string(ws)}};
    json sigs = json::array();
    for (const auto& s : b.signatures) sigs.push_back(to_json(s));
    j["signatures"] = sigs;
    if (b.nums) j["nums"] = true;
    if (b.seeds) j["seeds"] = to_json(*b.seeds);
    if (b.template_hash) j["template_hash"] = b.template_hash->hex();
    if (!b.attestations.empty()) {
        json a = json::array();
        for (const auto& x : b.attestations) a.push_back(to_json(x));
        j["attestations"] = a;
    }
    if (b.message) j["message"] = b.message->hex();
    return j;
}

ProofBundle proof_from_json(const json& j)
{
    require_format(j, "proof bundle");
    ProofBundle b;
    const std::string kind = str(j, "kind");
    if (kind == "reserves") {
        b.kind = ProofKind::reserves;
    } else if (kind == "covenant") {
        b.kind = ProofKind::covenant;
    } else {
        throw Error(Errc::parse, "unknown proof kind '" + kind + "'");
    }
    b.deposit = deposit_spec_from_json(j.at("deposit"));
    b.deposit_tx = deserialize(from_hex(str(j, "deposit_tx")));
    b.vout = j.at("vout").get<std::uint32_t>();
    b.covenant_tx = deserialize(from_hex(str(j, "covenant_tx")));
    b.input_index = j.at("input_index").get<std::size_t>();
    for (const auto& s : j.at("signatures")) b.signatures.push_back(commitment_from_json(s));
    b.nums = j.value("nums", false);
    if (j.contains("seeds")) b.seeds = seeds_from_json(j.at("seeds"));
    if (j.contains("template_hash")) b.template_hash = Hash256::from_hex(str(j, "template_hash"));
    if (j.contains("attestations")) {
        for (const auto& a : j.at("attestations")) b.attestations.push_back(attestation_from_json(a));
    }
    if (j.contains("message")) b.message = Hash256::from_hex(str(j, "message"));
    b.witness_script = Script(from_hex(str(j, "witness_script")));
    return b;
}

} // namespace covenant::serde
