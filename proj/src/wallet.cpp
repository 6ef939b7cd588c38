// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/serde.hpp>
#include <covenant/wallet.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace covenant {

using serde::json;

std::string verify_package(const WalletPackage& pkg)
{
    try {
        pkg.tmpl.validate();
        if (pkg.input_index >= pkg.tmpl.transaction.inputs.size()) return "input index out of range";
        if (pkg.tmpl.transaction.inputs[pkg.input_index].previous != pkg.deposit_outpoint) {
            return "template does not spend the deposit outpoint";
        }
        const SpentOutputContext ctx{deposit_witness_script(pkg.deposit), pkg.amount};
        switch (pkg.deposit.mechanism) {
        case Mechanism::deleted_key: {
            const EnforcementPolicy& policy = *pkg.deposit.enforcement;
            int valid = 0;
            for (const auto& s : pkg.signatures) {
                if (!policy.contains(s.signer) || s.input_index != pkg.input_index) return "signer outside the policy";
                if (!verify_commitment(pkg.tmpl, s, ctx)) return "bad commitment signature";
                ++valid;
            }
            if (valid < policy.m) return "fewer than m commitment signatures";
            break;
        }
        case Mechanism::recovered_key: {
            if (pkg.signatures.size() != 1) return "recovered-key package needs one signature";
            const auto& s = pkg.signatures[0];
            const auto& keys = pkg.deposit.recovered_keys;
            if (std::find(keys.begin(), keys.end(), s.signer) == keys.end()) return "recovered key not in deposit";
            if (!verify_commitment(pkg.tmpl, s, ctx)) return "bad commitment signature";
            break;
        }
        case Mechanism::ctv: {
            const Hash256 h = ctv_hash(pkg.tmpl, pkg.input_index).hash;
            const auto& hs = pkg.deposit.ctv_hashes;
            if (std::find(hs.begin(), hs.end(), h) == hs.end()) return "template hash not in deposit";
            break;
        }
        }
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const WalletKey& CovenantWallet::key(const std::string& label) const
{
    for (const auto& k : keys) {
        if (k.label == label) return k;
    }
    throw Error(Errc::key, "no key labelled " + label);
}

std::optional<PrivateKey> CovenantWallet::private_key(const std::string& label) const
{
    auto it = secret_keys.find(label);
    if (it == secret_keys.end()) return std::nullopt;
    return PrivateKey::from_hex(it->second);
}

void CovenantWallet::add_key(const std::string& label, const PrivateKey& secret)
{
    add_watch_only(label, secret.public_key());
    secret_keys[label] = secret.hex();
}

void CovenantWallet::add_watch_only(const std::string& label, const PublicKey& pub)
{
    for (const auto& k : keys) {
        if (k.label == label) throw Error(Errc::key, "key label " + label + " already used");
    }
    keys.push_back(WalletKey{label, pub});
}

void CovenantWallet::add_package(WalletPackage pkg)
{
    const std::string why = verify_package(pkg);
    if (!why.empty()) throw Error(Errc::proof, "package " + pkg.name + ": " + why);
    packages.push_back(std::move(pkg));
}

const WalletPackage& CovenantWallet::package(const std::string& name) const
{
    for (const auto& p : packages) {
        if (p.name == name) return p;
    }
    throw Error(Errc::proof, "no package named " + name);
}

void CovenantWallet::add_graph(const std::string& name, const CovenantGraph& graph)
{
    for (const auto& p : packages) {
        if (p.name.rfind(name + "/", 0) == 0) throw Error(Errc::graph, "graph name " + name + " already used");
    }
    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        const CovenantNode& node = graph.nodes[n];
        for (std::size_t i = 0; i < node.inputs.size(); ++i) {
            const NodeInput& in = node.inputs[i];
            WalletPackage p;
            p.name = name + "/" + node.label + (node.inputs.size() > 1 ? "#" + std::to_string(i) : "");
            p.deposit = in.spec;
            p.deposit_outpoint = node.tmpl.transaction.inputs[i].previous;
            p.amount = in.amount;
            p.tmpl = node.tmpl;
            p.input_index = i;
            p.signatures = in.commitments;
            if (in.spec.enforcement) {
                for (const auto& a : graph.attestations) {
                    for (const auto& k : in.spec.enforcement->keys) {
                        if (k.fingerprint() == a.key_fingerprint) p.attestations.push_back(a);
                    }
                }
            }
            if (in.seeds) secret_seeds[p.name] = *in.seeds;
            add_package(std::move(p));
        }
    }
    graphs.push_back(graph.to_json());
}

std::optional<Transaction> CovenantWallet::find_transaction(const Hash256& id) const
{
    const std::string want = id.display_hex();
    for (const auto& g : graphs) {
        const json j = json::parse(g);
        for (const char* section : {"roots", "nodes"}) {
            for (const auto& t : j.at(section)) {
                if (t.at("txid").get<std::string>() == want) return deserialize(from_hex(t.at("hex").get<std::string>()));
            }
        }
    }
    return std::nullopt;
}

ProofBundle CovenantWallet::prove_package(const std::string& name) const
{
    const WalletPackage& p = package(name);
    const auto deposit_tx = find_transaction(p.deposit_outpoint.txid);
    if (!deposit_tx) throw Error(Errc::proof, "deposit transaction of " + name + " is not in the wallet");
    CovenantEvidence ev;
    ev.deposit = p.deposit;
    ev.deposit_tx = *deposit_tx;
    ev.vout = p.deposit_outpoint.vout;
    ev.tmpl = p.tmpl;
    ev.input_index = p.input_index;
    ev.signatures = p.signatures;
    if (auto it = secret_seeds.find(name); it != secret_seeds.end()) ev.seeds = it->second;
    ev.attestations = p.attestations;
    return prove_covenant(ev);
}

ProofBundle CovenantWallet::prove_reserves(const std::string& name, const Hash256& message) const
{
    const WalletPackage& p = package(name);
    const auto deposit_tx = find_transaction(p.deposit_outpoint.txid);
    if (!deposit_tx) throw Error(Errc::proof, "deposit transaction of " + name + " is not in the wallet");
    std::vector<PrivateKey> held;
    for (const auto& k : keys) {
        for (const auto& c : p.deposit.custodial.keys) {
            if (k.key == c) {
                if (auto secret = private_key(k.label)) held.push_back(std::move(*secret));
            }
        }
    }
    std::vector<const PrivateKey*> ptrs;
    for (const auto& k : held) ptrs.push_back(&k);
    return covenant::prove_reserves(p.deposit, *deposit_tx, p.deposit_outpoint.vout, message, ptrs);
}

std::string CovenantWallet::to_json(bool include_secrets) const
{
    json j;
    j["format"] = 1;
    j["keys"] = json::array();
    for (const auto& k : keys) j["keys"].push_back({{"label", k.label}, {"pubkey", k.key.hex()}});
    j["packages"] = json::array();
    for (const auto& p : packages) {
        json pj;
        pj["name"] = p.name;
        pj["deposit"] = serde::to_json(p.deposit);
        pj["deposit_outpoint"] = {{"txid", p.deposit_outpoint.txid.display_hex()}, {"vout", p.deposit_outpoint.vout}};
        pj["amount"] = p.amount.sats();
        pj["template"] = serde::to_json(p.tmpl);
        pj["input_index"] = p.input_index;
        pj["signatures"] = json::array();
        for (const auto& s : p.signatures) pj["signatures"].push_back(serde::to_json(s));
        pj["attestations"] = json::array();
        for (const auto& a : p.attestations) pj["attestations"].push_back(serde::to_json(a));
        j["packages"].push_back(pj);
    }
    j["graphs"] = json::array();
    for (const auto& g : graphs) j["graphs"].push_back(json::parse(g));
    j["proofs"] = json::array();
    for (const auto& b : proofs) j["proofs"].push_back(serde::to_json(b));
    if (include_secrets) {
        json s;
        s["keys"] = json::object();
        for (const auto& [label, hex] : secret_keys) s["keys"][label] = hex;
        s["seeds"] = json::object();
        for (const auto& [name, seeds] : secret_seeds) s["seeds"][name] = serde::to_json(seeds);
        j["secrets"] = s;
    }
    return j.dump(2);
}

CovenantWallet CovenantWallet::from_json(const std::string& text)
{
    const json j = serde::parse(text);
    serde::require_format(j, "wallet");
    CovenantWallet w;
    try {
        for (const auto& k : j.at("keys")) {
            w.keys.push_back(WalletKey{k.at("label").get<std::string>(), PublicKey::from_hex(k.at("pubkey").get<std::string>())});
        }
        for (const auto& pj : j.at("packages")) {
            WalletPackage p;
            p.name = pj.at("name").get<std::string>();
            p.deposit = serde::deposit_spec_from_json(pj.at("deposit"));
            p.deposit_outpoint.txid = Hash256::from_display_hex(pj.at("deposit_outpoint").at("txid").get<std::string>());
            p.deposit_outpoint.vout = pj.at("deposit_outpoint").at("vout").get<std::uint32_t>();
            p.amount = Amount(pj.at("amount").get<std::uint64_t>());
            p.tmpl = serde::template_from_json(pj.at("template"));
            p.input_index = pj.at("input_index").get<std::size_t>();
            for (const auto& s : pj.at("signatures")) p.signatures.push_back(serde::commitment_from_json(s));
            for (const auto& a : pj.at("attestations")) p.attestations.push_back(serde::attestation_from_json(a));
            w.add_package(std::move(p));
        }
        for (const auto& g : j.at("graphs")) w.graphs.push_back(g.dump(2));
        for (const auto& b : j.at("proofs")) w.proofs.push_back(serde::proof_from_json(b));
        if (j.contains("secrets")) {
            const json& s = j.at("secrets");
            for (const auto& [label, hex] : s.at("keys").items()) {
                const PrivateKey k = PrivateKey::from_hex(hex.get<std::string>());
                if (k.public_key() != w.key(label).key) throw Error(Errc::key, "secret for " + label + " does not match its public key");
                w.secret_keys[label] = hex.get<std::string>();
            }
            for (const auto& [name, seeds] : s.at("seeds").items()) w.secret_seeds[name] = serde::seeds_from_json(seeds);
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("wallet: ") + e.what());
    }
    return w;
}

CovenantWallet CovenantWallet::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse, "cannot read wallet " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void CovenantWallet::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw Error(Errc::parse, "cannot write wallet " + path);
    out << to_json(true) << '\n';
}

std::string default_wallet_path()
{
    const char* env = std::getenv("COVENANT_WALLET");
    return env && *env ? env : "covenant-wallet.json";
}

} // namespace covenant
