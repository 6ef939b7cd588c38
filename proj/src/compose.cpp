// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/compose.hpp>
#include <covenant/hash.hpp>
#include <covenant/serde.hpp>

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace covenant {

namespace {

using json = nlohmann::json;

SigHashType level_type(Mechanism mech, const ChainLevel& level)
{
    if (level.sighash) return *level.sighash;
    return mech == Mechanism::recovered_key ? SigHashType::noinput_all() : SigHashType::all();
}

Amount extras_total(const ChainLevel& level)
{
    Amount sum;
    for (const auto& o : level.extra_outputs) sum += o.amount;
    return sum;
}

/** in - fee - extra outputs; throws when nothing is left for output 0. */
Amount spendable(Amount in, Amount fee, const ChainLevel& level)
{
    const Amount cost = fee + extras_total(level);
    if (cost >= in) {
        throw Error(Errc::fee, "fee " + std::to_string(fee.sats()) + " plus extra outputs exceeds input amount " +
                                   std::to_string(in.sats()));
    }
    return in - cost;
}

Transaction level_tx(const ChainLevel& level, std::size_t inputs, Amount out0, const Script& pay)
{
    Transaction tx;
    tx.locktime = level.locktime;
    for (std::size_t i = 0; i < inputs; ++i) tx.inputs.push_back(TxInput{OutPoint{}, level.sequence, {}});
    tx.outputs.push_back(TxOutput{out0, pay});
    tx.outputs.insert(tx.outputs.end(), level.extra_outputs.begin(), level.extra_outputs.end());
    return tx;
}

std::uint32_t find_vout(const Transaction& deposit, const DepositAddress& addr, Amount amount)
{
    for (std::size_t v = 0; v < deposit.outputs.size(); ++v) {
        const auto& o = deposit.outputs[v];
        if (o.locking_script == addr.locking_script && o.amount == amount) return static_cast<std::uint32_t>(v);
    }
    throw Error(Errc::graph, "deposit transaction does not pay " + std::to_string(amount.sats()) + " to " + addr.address);
}

struct KeySet {
    std::vector<PrivateKey> keys;
    EnforcementPolicy policy;
};

KeySet make_keys(int m, int n, std::mt19937_64& rng)
{
    KeySet ks;
    ks.policy.m = m;
    ks.policy.n = n;
    for (int i = 0; i < n; ++i) {
        ks.keys.push_back(PrivateKey::generate(rng));
        ks.policy.keys.push_back(ks.keys.back().public_key());
    }
    ks.policy.validate();
    return ks;
}

std::vector<CommitmentSignature> sign_all(const CovenantTemplate& tmpl, std::size_t input, const KeySet& ks,
                                          const SpentOutputContext& ctx)
{
    std::vector<CommitmentSignature> out;
    for (const auto& k : ks.keys) out.push_back(sign_commitment(tmpl, input, k, ctx, ks.policy));
    return out;
}

void destroy_keys(KeySet& ks, const std::string& prefix, std::vector<DeletionAttestation>& out, std::uint64_t& counter)
{
    for (std::size_t l = 0; l < ks.keys.size(); ++l) {
        out.push_back(attest_deletion(prefix + "enforcer-" + std::to_string(l), ks.keys[l], counter++));
        ks.keys[l].destroy();
    }
}

DepositSpec base_spec(const ChainRequest& req)
{
    DepositSpec s;
    s.mechanism = req.mechanism;
    s.custodial = req.custodial;
    return s;
}

RecoveredKeyCovenant commit_recovered(const CovenantTemplate& tmpl, std::size_t input, RecoveredStyle style,
                                      std::mt19937_64& rng)
{
    if (style == RecoveredStyle::nums) return build_recovered_key_covenant(tmpl, input, style);
    for (int attempt = 0; attempt < 256; ++attempt) {
        SignatureSeeds seeds;
        seeds.seed_r.resize(32);
        seeds.seed_s.resize(32);
        for (auto& b : seeds.seed_r) b = static_cast<std::uint8_t>(rng());
        for (auto& b : seeds.seed_s) b = static_cast<std::uint8_t>(rng());
        try {
            return build_recovered_key_covenant(tmpl, input, style, seeds);
        } catch (const Error& e) {
            if (e.code() != Errc::seed_rejected) throw;
        }
    }
    throw Error(Errc::seed_rejected, "no usable seeds after 256 attempts");
}

void check_request(const ChainRequest& req)
{
    req.custodial.validate();
    if (req.levels.empty()) throw Error(Errc::graph, "no covenant levels given");
}

GraphEdge make_edge(bool from_root, std::size_t parent, std::uint32_t vout, std::size_t child, std::size_t input,
                    Mechanism mech, const DepositSpec& spent)
{
    GraphEdge e;
    e.from_root = from_root;
    e.parent = parent;
    e.vout = vout;
    e.child = child;
    e.input = input;
    e.kind = mech == Mechanism::recovered_key ? EdgeKind::script_hash : EdgeKind::txid;
    e.script_hash = sha256(deposit_witness_script(spent).bytes());
    return e;
}

PublicKey dummy_key()
{
    static const PublicKey key = PrivateKey::from_hex(std::string(63, '0') + "1").public_key();
    return key;
}

/** Spec with the same script shape as the real one, for size estimates. */
DepositSpec shape_spec(const ChainRequest& req, std::size_t branches, bool with_refund)
{
    DepositSpec s = base_spec(req);
    switch (req.mechanism) {
    case Mechanism::deleted_key:
        s.enforcement = EnforcementPolicy{req.m, req.n, std::vector<PublicKey>(static_cast<std::size_t>(req.n), dummy_key())};
        break;
    case Mechanism::recovered_key:
        s.recovered_keys.assign(branches, dummy_key());
        break;
    case Mechanism::ctv:
        s.ctv_hashes.assign(branches, Hash256{});
        break;
    }
    if (with_refund) s.refund = req.refund;
    return s;
}

std::string edge_parent_name(const CovenantGraph& g, const GraphEdge& e)
{
    return e.from_root ? "deposit-" + std::to_string(e.parent) : g.nodes[e.parent].label;
}

} // namespace

Script wallet_script(const PublicKey& key)
{
    return Script().push(key.view()).op(OP_CHECKSIG);
}

void sign_wallet_input(Transaction& tx, std::size_t input_index, const PrivateKey& key, Amount amount, SigHashType type)
{
    const Script script = wallet_script(key.public_key());
    Bytes sig = sign_input(tx, input_index, key, SpentOutputContext{script, amount}, type);
    tx.inputs.at(input_index).witness = {std::move(sig), script.bytes()};
}

DepositFactory minting_factory(ChainState& chain, const PrivateKey& funder, Amount fee)
{
    return [&chain, &funder, fee](const DepositAddress& address, Amount amount) {
        const Script script = p2wsh_address(wallet_script(funder.public_key()));
        const Transaction funding = chain.mint({TxOutput{amount + fee, script}});
        Transaction deposit;
        deposit.inputs.push_back(TxInput{OutPoint{txid(funding), 0}, SEQUENCE_RBF, {}});
        deposit.outputs.push_back(TxOutput{amount, address.locking_script});
        sign_wallet_input(deposit, 0, funder, amount + fee);
        return deposit;
    };
}

void CovenantGraph::validate() const
{
    for (const auto& e : edges) {
        if (e.child >= nodes.size()) throw Error(Errc::graph, "edge names missing child " + std::to_string(e.child));
        const CovenantNode& child = nodes[e.child];
        if (e.input >= child.inputs.size()) throw Error(Errc::graph, "edge names missing input of " + child.label);
        const Transaction* parent = nullptr;
        if (e.from_root) {
            if (e.parent >= roots.size()) throw Error(Errc::graph, "edge names missing deposit " + std::to_string(e.parent));
            parent = &roots[e.parent];
        } else {
            if (e.parent >= nodes.size()) throw Error(Errc::graph, "edge names missing node " + std::to_string(e.parent));
            parent = &nodes[e.parent].tmpl.transaction;
        }
        if (e.vout >= parent->outputs.size()) {
            throw Error(Errc::graph, edge_parent_name(*this, e) + " has no output " + std::to_string(e.vout));
        }
        const Script& locking = parent->outputs[e.vout].locking_script;
        if (!is_p2wsh(locking)) {
            throw Error(Errc::graph, edge_parent_name(*this, e) + ":" + std::to_string(e.vout) +
                                         " is not a witness output; its spender's txid would be malleable");
        }
        const Script ws = deposit_witness_script(child.inputs[e.input].spec);
        if (p2wsh_address(ws) != locking) {
            throw Error(Errc::graph, child.label + " input " + std::to_string(e.input) + " is incompatible with " +
                                         edge_parent_name(*this, e) + ":" + std::to_string(e.vout));
        }
        if (e.kind == EdgeKind::script_hash && sha256(ws.bytes()) != e.script_hash) {
            throw Error(Errc::graph, "script hash of edge into " + child.label + " does not match");
        }
    }
    topological_order();
}

std::vector<std::size_t> CovenantGraph::topological_order() const
{
    std::vector<std::size_t> indegree(nodes.size(), 0);
    for (const auto& e : edges) {
        if (!e.from_root) ++indegree.at(e.child);
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const std::size_t n = ready.front();
        ready.pop_front();
        order.push_back(n);
        for (const auto& e : edges) {
            if (!e.from_root && e.parent == n && --indegree[e.child] == 0) ready.push_back(e.child);
        }
    }
    if (order.size() != nodes.size()) throw Error(Errc::graph, "covenant graph has a cycle");
    return order;
}

std::vector<std::size_t> CovenantGraph::children(std::size_t node) const
{
    std::vector<std::size_t> out;
    for (const auto& e : edges) {
        if (!e.from_root && e.parent == node && std::find(out.begin(), out.end(), e.child) == out.end()) {
            out.push_back(e.child);
        }
    }
    return out;
}

std::string CovenantGraph::to_json() const
{
    json j;
    j["format"] = 1;
    j["mechanism"] = std::string(to_string(mechanism));
    j["roots"] = json::array();
    for (const auto& r : roots) {
        j["roots"].push_back({{"txid", txid(r).display_hex()}, {"hex", to_hex(serialize(r, true))}});
    }
    j["nodes"] = json::array();
    for (const auto& n : nodes) {
        json node;
        node["label"] = n.label;
        node["txid"] = txid(n.tmpl.transaction).display_hex();
        node["hex"] = to_hex(serialize(n.tmpl.transaction, true));
        node["sighash_types"] = json::array();
        for (const auto& t : n.tmpl.sighash_types) node["sighash_types"].push_back(t.to_string());
        Amount covenant_in(0);
        for (const auto& in : n.inputs) covenant_in += in.amount;
        node["fee"] = static_cast<std::int64_t>(covenant_in.sats()) -
                      static_cast<std::int64_t>(n.tmpl.transaction.total_output().sats());
        node["fee_inputs"] = n.tmpl.transaction.inputs.size() - n.inputs.size();
        node["inputs"] = json::array();
        for (const auto& in : n.inputs) {
            json ij;
            ij["amount"] = in.amount.sats();
            ij["branch"] = in.branch;
            ij["witness_script"] = to_hex(deposit_witness_script(in.spec).bytes());
            ij["signatures"] = json::array();
            for (const auto& s : in.commitments) {
                ij["signatures"].push_back({{"signer", s.signer.hex()}, {"sig", to_hex(s.encoded())}});
            }
            node["inputs"].push_back(ij);
        }
        j["nodes"].push_back(node);
    }
    j["edges"] = json::array();
    for (const auto& e : edges) {
        json ej;
        ej["parent"] = e.from_root ? "deposit-" + std::to_string(e.parent) : nodes[e.parent].label;
        ej["vout"] = e.vout;
        ej["child"] = nodes[e.child].label;
        ej["input"] = e.input;
        ej["kind"] = e.kind == EdgeKind::txid ? "txid" : "script-hash";
        if (e.kind == EdgeKind::script_hash) ej["script_hash"] = e.script_hash.hex();
        j["edges"].push_back(ej);
    }
    j["attestations"] = json::array();
    for (const auto& a : attestations) {
        j["attestations"].push_back(serde::to_json(a));
    }
    return j.dump(2);
}

std::string CovenantGraph::render_tree() const
{
    std::ostringstream out;
    std::function<void(bool, std::size_t, int)> walk = [&](bool root, std::size_t idx, int depth) {
        for (const auto& e : edges) {
            if (e.from_root != root || e.parent != idx) continue;
            const CovenantNode& c = nodes[e.child];
            out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << ':' << e.vout << " -> " << c.label << ' '
                << txid(c.tmpl.transaction).display_hex() << " [" << (e.kind == EdgeKind::txid ? "txid" : "script-hash")
                << "] out " << c.tmpl.transaction.total_output().sats() << '\n';
            walk(false, e.child, depth + 1);
        }
    };
    for (std::size_t r = 0; r < roots.size(); ++r) {
        out << "deposit-" << r << ' ' << txid(roots[r]).display_hex() << '\n';
        walk(true, r, 1);
    }
    return out.str();
}

CovenantGraph build_chain(const ChainRequest& req, const DepositFactory& make_deposit, std::mt19937_64& rng)
{
    check_request(req);
    const std::size_t t = req.levels.size();
    std::vector<Amount> in(t), out(t);
    Amount a = req.deposit_amount;
    for (std::size_t i = 0; i < t; ++i) {
        in[i] = a;
        out[i] = spendable(a, req.levels[i].fee, req.levels[i]);
        a = out[i];
    }

    CovenantGraph g;
    g.mechanism = req.mechanism;
    std::vector<DepositSpec> specs(t, base_spec(req));
    std::vector<CovenantTemplate> tmpls(t);
    std::vector<std::vector<CommitmentSignature>> sigs(t);
    std::vector<std::optional<SignatureSeeds>> seeds(t);
    auto pay = [&](std::size_t i) {
        return i + 1 < t ? deposit_address(specs[i + 1]).locking_script : req.final_locking_script;
    };
    Transaction deposit;
    std::uint32_t vout = 0;

    if (req.mechanism == Mechanism::deleted_key) {
        std::vector<KeySet> keys;
        for (std::size_t i = 0; i < t; ++i) {
            keys.push_back(make_keys(req.m, req.n, rng));
            specs[i].enforcement = keys.back().policy;
        }
        specs[0].refund = req.refund;
        const DepositAddress addr = deposit_address(specs[0]);
        deposit = make_deposit(addr, req.deposit_amount);
        vout = find_vout(deposit, addr, req.deposit_amount);
        OutPoint prev{txid(deposit), vout};
        for (std::size_t i = 0; i < t; ++i) {
            Transaction tx = level_tx(req.levels[i], 1, out[i], pay(i));
            tx.inputs[0].previous = prev;
            tmpls[i] = make_template(tx, req.mechanism, level_type(req.mechanism, req.levels[i]));
            sigs[i] = sign_all(tmpls[i], 0, keys[i], SpentOutputContext{deposit_witness_script(specs[i]), in[i]});
            prev = OutPoint{txid(tx), 0};
        }
        std::uint64_t counter = 0;
        for (std::size_t i = 0; i < t; ++i) {
            destroy_keys(keys[i], "C" + std::to_string(i + 1) + "/", g.attestations, counter);
        }
    } else {
        for (std::size_t i = t; i-- > 0;) {
            tmpls[i] = make_template(level_tx(req.levels[i], 1, out[i], pay(i)), req.mechanism,
                                     level_type(req.mechanism, req.levels[i]));
            if (req.mechanism == Mechanism::recovered_key) {
                const RecoveredKeyCovenant rk = commit_recovered(tmpls[i], 0, req.style, rng);
                specs[i].recovered_keys = {rk.key};
                sigs[i] = {rk.commitment};
                seeds[i] = rk.seeds;
            } else {
                specs[i].ctv_hashes = {ctv_hash(tmpls[i], 0).hash};
            }
        }
        specs[0].refund = req.refund;
        const DepositAddress addr = deposit_address(specs[0]);
        deposit = make_deposit(addr, req.deposit_amount);
        vout = find_vout(deposit, addr, req.deposit_amount);
        OutPoint prev{txid(deposit), vout};
        for (std::size_t i = 0; i < t; ++i) {
            tmpls[i].transaction.inputs[0].previous = prev;
            prev = OutPoint{txid(tmpls[i].transaction), 0};
        }
    }

    g.roots.push_back(deposit);
    for (std::size_t i = 0; i < t; ++i) {
        g.nodes.push_back(CovenantNode{"C" + std::to_string(i + 1), tmpls[i], {NodeInput{specs[i], in[i], 0, sigs[i], seeds[i]}}});
        g.edges.push_back(make_edge(i == 0, i == 0 ? 0 : i - 1, i == 0 ? vout : 0, i, 0, req.mechanism, specs[i]));
    }
    g.validate();
    return g;
}

CovenantGraph build_disjoint(const ChainRequest& req, const ChainLevel& branch_a, const ChainLevel& branch_b,
                             const DepositFactory& make_deposit, std::mt19937_64& rng)
{
    req.custodial.validate();
    const Amount amount = req.deposit_amount;
    const std::array<const ChainLevel*, 2> levels{&branch_a, &branch_b};
    std::array<CovenantTemplate, 2> tmpls;
    std::array<std::vector<CommitmentSignature>, 2> sigs;
    std::array<std::optional<SignatureSeeds>, 2> seeds;
    for (std::size_t b = 0; b < 2; ++b) {
        const Amount out = spendable(amount, levels[b]->fee, *levels[b]);
        tmpls[b] = make_template(level_tx(*levels[b], 1, out, req.final_locking_script), req.mechanism,
                                 level_type(req.mechanism, *levels[b]));
    }

    CovenantGraph g;
    g.mechanism = req.mechanism;
    DepositSpec spec = base_spec(req);
    spec.refund = req.refund;
    std::optional<KeySet> keys;
    switch (req.mechanism) {
    case Mechanism::deleted_key:
        keys = make_keys(req.m, req.n, rng);
        spec.enforcement = keys->policy;
        break;
    case Mechanism::recovered_key:
        for (std::size_t b = 0; b < 2; ++b) {
            const RecoveredKeyCovenant rk = commit_recovered(tmpls[b], 0, req.style, rng);
            spec.recovered_keys.push_back(rk.key);
            sigs[b] = {rk.commitment};
            seeds[b] = rk.seeds;
        }
        break;
    case Mechanism::ctv:
        for (std::size_t b = 0; b < 2; ++b) spec.ctv_hashes.push_back(ctv_hash(tmpls[b], 0).hash);
        break;
    }
    const DepositAddress addr = deposit_address(spec);
    const Transaction deposit = make_deposit(addr, amount);
    const std::uint32_t vout = find_vout(deposit, addr, amount);
    const SpentOutputContext ctx{addr.witness_script, amount};
    for (std::size_t b = 0; b < 2; ++b) {
        tmpls[b].transaction.inputs[0].previous = OutPoint{txid(deposit), vout};
        if (keys) sigs[b] = sign_all(tmpls[b], 0, *keys, ctx);
    }
    if (keys) {
        std::uint64_t counter = 0;
        destroy_keys(*keys, "", g.attestations, counter);
    }

    g.roots.push_back(deposit);
    const bool branched = req.mechanism != Mechanism::deleted_key;
    for (std::size_t b = 0; b < 2; ++b) {
        g.nodes.push_back(CovenantNode{b == 0 ? "A" : "B", tmpls[b], {NodeInput{spec, amount, branched ? b : 0, sigs[b], seeds[b]}}});
        g.edges.push_back(make_edge(true, 0, vout, b, 0, req.mechanism, spec));
    }
    g.validate();
    return g;
}

CovenantGraph build_multi_deposit(const ChainRequest& req, std::size_t deposits, const DepositFactory& make_deposit,
                                  std::mt19937_64& rng)
{
    check_request(req);
    if (req.levels.size() != 1) throw Error(Errc::graph, "a multi-deposit covenant has exactly one level");
    if (deposits == 0) throw Error(Errc::graph, "at least one deposit is needed");
    const ChainLevel& level = req.levels[0];
    Amount total;
    for (std::size_t d = 0; d < deposits; ++d) total += req.deposit_amount;
    CovenantTemplate tmpl = make_template(level_tx(level, deposits, spendable(total, level.fee, level), req.final_locking_script),
                                          req.mechanism, level_type(req.mechanism, level));

    CovenantGraph g;
    g.mechanism = req.mechanism;
    std::vector<DepositSpec> specs(deposits, base_spec(req));
    std::vector<std::vector<CommitmentSignature>> sigs(deposits);
    std::vector<std::optional<SignatureSeeds>> seeds(deposits);
    std::vector<KeySet> keys;
    for (std::size_t d = 0; d < deposits; ++d) {
        specs[d].refund = req.refund;
        switch (req.mechanism) {
        case Mechanism::deleted_key:
            keys.push_back(make_keys(req.m, req.n, rng));
            specs[d].enforcement = keys.back().policy;
            break;
        case Mechanism::recovered_key: {
            const RecoveredKeyCovenant rk = commit_recovered(tmpl, d, req.style, rng);
            specs[d].recovered_keys = {rk.key};
            sigs[d] = {rk.commitment};
            seeds[d] = rk.seeds;
            break;
        }
        case Mechanism::ctv:
            specs[d].ctv_hashes = {ctv_hash(tmpl, d).hash};
            break;
        }
    }
    std::vector<std::uint32_t> vouts;
    for (std::size_t d = 0; d < deposits; ++d) {
        const DepositAddress addr = deposit_address(specs[d]);
        g.roots.push_back(make_deposit(addr, req.deposit_amount));
        vouts.push_back(find_vout(g.roots.back(), addr, req.deposit_amount));
        tmpl.transaction.inputs[d].previous = OutPoint{txid(g.roots.back()), vouts.back()};
    }
    if (!keys.empty()) {
        std::uint64_t counter = 0;
        for (std::size_t d = 0; d < deposits; ++d) {
            sigs[d] = sign_all(tmpl, d, keys[d], SpentOutputContext{deposit_witness_script(specs[d]), req.deposit_amount});
        }
        for (std::size_t d = 0; d < deposits; ++d) {
            destroy_keys(keys[d], "deposit-" + std::to_string(d) + "/", g.attestations, counter);
        }
    }

    CovenantNode node{"C", tmpl, {}};
    for (std::size_t d = 0; d < deposits; ++d) {
        node.inputs.push_back(NodeInput{specs[d], req.deposit_amount, 0, sigs[d], seeds[d]});
        g.edges.push_back(make_edge(true, d, vouts[d], 0, d, req.mechanism, specs[d]));
    }
    g.nodes.push_back(std::move(node));
    g.validate();
    return g;
}

Transaction finalize_node(const CovenantGraph& graph, std::size_t node, const std::vector<const PrivateKey*>& custodial_keys)
{
    const CovenantNode& n = graph.nodes.at(node);
    Transaction tx = n.tmpl.transaction;
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        const NodeInput& in = n.inputs[i];
        const SpentOutputContext ctx{deposit_witness_script(in.spec), in.amount};
        CovenantWitnessParts parts;
        parts.branch = in.branch;
        for (const auto& pub : in.spec.custodial.keys) {
            if (static_cast<int>(parts.custodial_sigs.size()) == in.spec.custodial.j) break;
            for (const PrivateKey* k : custodial_keys) {
                if (k && k->valid() && k->public_key() == pub) {
                    parts.custodial_sigs.push_back(sign_input(tx, i, *k, ctx, SigHashType::all()));
                    break;
                }
            }
        }
        if (static_cast<int>(parts.custodial_sigs.size()) < in.spec.custodial.j) {
            throw Error(Errc::key, n.label + " needs " + std::to_string(in.spec.custodial.j) + " custodial keys");
        }
        if (in.spec.mechanism == Mechanism::deleted_key) {
            for (const auto& pub : in.spec.enforcement->keys) {
                if (static_cast<int>(parts.enforcement_sigs.size()) == in.spec.enforcement->m) break;
                for (const auto& s : in.commitments) {
                    if (s.signer == pub) {
                        parts.enforcement_sigs.push_back(s.encoded());
                        break;
                    }
                }
            }
        } else if (in.spec.mechanism == Mechanism::recovered_key) {
            for (const auto& s : in.commitments) parts.enforcement_sigs.push_back(s.encoded());
        }
        tx.inputs[i].witness = covenant_witness(in.spec, parts);
    }
    return tx;
}

Transaction refund_spend(const CovenantGraph& graph, std::size_t root, std::uint32_t vout, const PrivateKey& refund_key,
                         const Script& destination, Amount fee)
{
    for (const auto& e : graph.edges) {
        if (!e.from_root || e.parent != root || e.vout != vout) continue;
        const NodeInput& in = graph.nodes[e.child].inputs[e.input];
        if (!in.spec.refund) throw Error(Errc::policy, "deposit has no refund path");
        Transaction tx;
        tx.locktime = in.spec.refund->height;
        tx.inputs.push_back(TxInput{OutPoint{txid(graph.roots.at(root)), vout}, SEQUENCE_RBF, {}});
        if (fee >= in.amount) throw Error(Errc::fee, "refund fee exceeds the deposit");
        tx.outputs.push_back(TxOutput{in.amount - fee, destination});
        const Bytes sig = sign_input(tx, 0, refund_key, SpentOutputContext{deposit_witness_script(in.spec), in.amount},
                                     SigHashType::all());
        tx.inputs[0].witness = refund_witness(in.spec, sig);
        return tx;
    }
    throw Error(Errc::graph, "no covenant input spends deposit-" + std::to_string(root) + ":" + std::to_string(vout));
}

void add_fee_input(CovenantGraph& graph, std::size_t node, const OutPoint& outpoint, SigHashType type)
{
    CovenantTemplate& t = graph.nodes.at(node).tmpl;
    t.transaction.inputs.push_back(TxInput{outpoint, SEQUENCE_RBF, {}});
    t.sighash_types.push_back(type);
}

void repoint_children(CovenantGraph& graph, std::size_t node)
{
    const Hash256 id = txid(graph.nodes.at(node).tmpl.transaction);
    for (const auto& e : graph.edges) {
        if (!e.from_root && e.parent == node) {
            graph.nodes[e.child].tmpl.transaction.inputs.at(e.input).previous = OutPoint{id, e.vout};
        }
    }
}

std::size_t estimate_spend_size(const Transaction& tx, const std::vector<DepositSpec>& input_specs)
{
    const Bytes sig(73, 0x30);
    Transaction t = tx;
    for (std::size_t i = 0; i < t.inputs.size(); ++i) {
        if (i >= input_specs.size()) {
            t.inputs[i].witness = {sig, Bytes(35, 0)};
            continue;
        }
        const DepositSpec& spec = input_specs[i];
        CovenantWitnessParts parts;
        parts.custodial_sigs.assign(static_cast<std::size_t>(spec.custodial.j), sig);
        if (spec.mechanism == Mechanism::deleted_key) {
            parts.enforcement_sigs.assign(static_cast<std::size_t>(spec.enforcement->m), sig);
        } else if (spec.mechanism == Mechanism::recovered_key) {
            parts.enforcement_sigs = {sig};
        }
        std::size_t best = 0;
        std::size_t best_branch = 0;
        for (std::size_t b = 0; b < spec.branch_count(); ++b) {
            parts.branch = b;
            t.inputs[i].witness = covenant_witness(spec, parts);
            if (tx_size(t) > best) {
                best = tx_size(t);
                best_branch = b;
            }
        }
        parts.branch = best_branch;
        t.inputs[i].witness = covenant_witness(spec, parts);
    }
    return tx_size(t);
}

VariantCounts variant_counts(Mechanism mechanism, std::uint64_t p, std::uint64_t t)
{
    VariantCounts c;
    c.chains = 1;
    std::uint64_t power = 1;
    std::uint64_t sum = 0;
    for (std::uint64_t i = 0; i < t; ++i) {
        power *= p;
        sum += power;
    }
    c.chains = power;
    c.prepared = mechanism == Mechanism::deleted_key ? sum : p * t;
    return c;
}

FeeVariantSet enumerate_fee_variants(const ChainRequest& req, const std::vector<std::uint64_t>& feerates,
                                     const DepositFactory& make_deposit, std::mt19937_64& rng, std::uint64_t cap)
{
    check_request(req);
    const std::size_t p = feerates.size();
    const std::size_t t = req.levels.size();
    if (p == 0) throw Error(Errc::fee, "no feerates given");
    std::uint64_t chains = 1;
    for (std::size_t i = 0; i < t; ++i) {
        chains *= p;
        if (chains > cap) {
            std::uint64_t full = 1;
            bool overflow = false;
            for (std::size_t k = 0; k < t && !overflow; ++k) {
                if (full > UINT64_MAX / p) overflow = true;
                else full *= p;
            }
            throw Error(Errc::fee, (overflow ? std::string("more than 2^64") : std::to_string(full)) +
                                       " variant chains exceed the cap of " + std::to_string(cap));
        }
    }

    const std::size_t branches = req.mechanism == Mechanism::deleted_key ? 1 : p;
    std::vector<std::size_t> sizes(t);
    for (std::size_t i = 0; i < t; ++i) {
        const Script pay = i + 1 < t ? p2wsh_address(Script(Bytes(1, 0))) : req.final_locking_script;
        sizes[i] = estimate_spend_size(level_tx(req.levels[i], 1, Amount(0), pay), {shape_spec(req, branches, i == 0)});
    }
    std::vector<std::vector<Amount>> outs(t, std::vector<Amount>(p));
    std::vector<Amount> budget(t);
    Amount a = req.deposit_amount;
    for (std::size_t i = 0; i < t; ++i) {
        budget[i] = a;
        Amount max_fee;
        for (std::size_t r = 0; r < p; ++r) {
            const Amount fee(feerates[r] * sizes[i]);
            outs[i][r] = spendable(a, fee, req.levels[i]);
            max_fee = std::max(max_fee, fee);
        }
        a = spendable(a, max_fee, req.levels[i]);
    }

    FeeVariantSet set;
    set.p = p;
    set.t = t;
    std::vector<DepositSpec> specs(t, base_spec(req));
    auto pay = [&](std::size_t i) {
        return i + 1 < t ? deposit_address(specs[i + 1]).locking_script : req.final_locking_script;
    };
    std::vector<DeletionAttestation> attestations;
    Transaction deposit;
    std::uint32_t vout = 0;

    struct Step {
        CovenantTemplate tmpl;
        std::vector<CommitmentSignature> sigs;
        std::size_t choice;
        std::optional<SignatureSeeds> seeds;
    };
    auto emit = [&](const std::vector<Step>& steps, const std::vector<Amount>& amounts) {
        CovenantGraph g;
        g.mechanism = req.mechanism;
        g.roots.push_back(deposit);
        std::vector<std::size_t> choice;
        for (std::size_t i = 0; i < t; ++i) {
            const std::size_t branch = req.mechanism == Mechanism::deleted_key ? 0 : steps[i].choice;
            g.nodes.push_back(CovenantNode{"C" + std::to_string(i + 1) + "." + std::to_string(steps[i].choice), steps[i].tmpl,
                                           {NodeInput{specs[i], amounts[i], branch, steps[i].sigs, steps[i].seeds}}});
            g.edges.push_back(make_edge(i == 0, i == 0 ? 0 : i - 1, i == 0 ? vout : 0, i, 0, req.mechanism, specs[i]));
            choice.push_back(steps[i].choice);
        }
        set.chains.push_back(std::move(g));
        set.choices.push_back(std::move(choice));
    };

    if (req.mechanism == Mechanism::deleted_key) {
        std::vector<KeySet> keys;
        for (std::size_t i = 0; i < t; ++i) {
            keys.push_back(make_keys(req.m, req.n, rng));
            specs[i].enforcement = keys.back().policy;
        }
        specs[0].refund = req.refund;
        const DepositAddress addr = deposit_address(specs[0]);
        deposit = make_deposit(addr, req.deposit_amount);
        vout = find_vout(deposit, addr, req.deposit_amount);
        std::vector<Script> scripts(t);
        for (std::size_t i = 0; i < t; ++i) scripts[i] = deposit_witness_script(specs[i]);

        std::vector<Step> steps;
        std::vector<Amount> amounts;
        std::function<void(std::size_t, OutPoint, Amount)> descend = [&](std::size_t i, OutPoint prev, Amount in) {
            for (std::size_t r = 0; r < p; ++r) {
                Transaction tx = level_tx(req.levels[i], 1, outs[i][r], pay(i));
                tx.inputs[0].previous = prev;
                CovenantTemplate tmpl = make_template(tx, req.mechanism, level_type(req.mechanism, req.levels[i]));
                auto sigs = sign_all(tmpl, 0, keys[i], SpentOutputContext{scripts[i], in});
                ++set.prepared_transactions;
                set.aggregate_bytes += sizes[i];
                steps.push_back(Step{tmpl, std::move(sigs), r, std::nullopt});
                amounts.push_back(in);
                if (i + 1 == t) emit(steps, amounts);
                else descend(i + 1, OutPoint{txid(tx), 0}, outs[i][r]);
                steps.pop_back();
                amounts.pop_back();
            }
        };
        descend(0, OutPoint{txid(deposit), vout}, req.deposit_amount);
        std::uint64_t counter = 0;
        for (std::size_t i = 0; i < t; ++i) destroy_keys(keys[i], "C" + std::to_string(i + 1) + "/", attestations, counter);
    } else {
        std::vector<std::vector<Step>> prepared(t);
        for (std::size_t i = t; i-- > 0;) {
            for (std::size_t r = 0; r < p; ++r) {
                CovenantTemplate tmpl = make_template(level_tx(req.levels[i], 1, outs[i][r], pay(i)), req.mechanism,
                                                      level_type(req.mechanism, req.levels[i]));
                Step step{tmpl, {}, r, std::nullopt};
                if (req.mechanism == Mechanism::recovered_key) {
                    const RecoveredKeyCovenant rk = commit_recovered(tmpl, 0, req.style, rng);
                    specs[i].recovered_keys.push_back(rk.key);
                    step.sigs = {rk.commitment};
                    step.seeds = rk.seeds;
                } else {
                    specs[i].ctv_hashes.push_back(ctv_hash(tmpl, 0).hash);
                }
                prepared[i].push_back(std::move(step));
                ++set.prepared_transactions;
                set.aggregate_bytes += sizes[i];
            }
        }
        specs[0].refund = req.refund;
        const DepositAddress addr = deposit_address(specs[0]);
        deposit = make_deposit(addr, req.deposit_amount);
        vout = find_vout(deposit, addr, req.deposit_amount);

        std::vector<std::size_t> digits(t, 0);
        for (std::uint64_t c = 0; c < chains; ++c) {
            std::vector<Step> steps;
            std::vector<Amount> amounts;
            OutPoint prev{txid(deposit), vout};
            Amount in = req.deposit_amount;
            for (std::size_t i = 0; i < t; ++i) {
                Step s = prepared[i][digits[i]];
                s.tmpl.transaction.inputs[0].previous = prev;
                prev = OutPoint{txid(s.tmpl.transaction), 0};
                amounts.push_back(in);
                in = outs[i][digits[i]];
                steps.push_back(std::move(s));
            }
            emit(steps, amounts);
            for (std::size_t i = t; i-- > 0;) {
                if (++digits[i] < p) break;
                digits[i] = 0;
            }
        }
    }
    for (auto& g : set.chains) g.attestations = attestations;
    return set;
}

Transaction cpfp_child(const Transaction& parent, Amount parent_fee, std::uint64_t target_feerate,
                       const WalletOutput& wallet, const Script& destination)
{
    if (!wallet.key) throw Error(Errc::key, "no wallet key given");
    if (wallet.outpoint.txid != txid(parent) || wallet.outpoint.vout >= parent.outputs.size()) {
        throw Error(Errc::graph, "wallet output " + wallet.outpoint.to_string() + " is not an output of the parent");
    }
    const TxOutput& spent = parent.outputs[wallet.outpoint.vout];
    if (spent.amount != wallet.amount || spent.locking_script != p2wsh_address(wallet_script(wallet.key->public_key()))) {
        throw Error(Errc::graph, "wallet output amount or script does not match the parent");
    }
    Transaction child;
    child.inputs.push_back(TxInput{wallet.outpoint, SEQUENCE_RBF, {}});
    child.outputs.push_back(TxOutput{Amount(0), destination});
    const std::size_t size_c = estimate_spend_size(child, {});
    const std::size_t size_p = tx_size(parent);
    const std::uint64_t package = target_feerate * (size_p + size_c);
    const std::uint64_t floor = MIN_RELAY_FEERATE * size_c;
    const std::uint64_t fee = package > parent_fee.sats() + floor ? package - parent_fee.sats() : floor;
    if (fee >= wallet.amount.sats()) {
        throw Error(Errc::fee, "child fee " + std::to_string(fee) + " exceeds wallet output " +
                                   std::to_string(wallet.amount.sats()));
    }
    child.outputs[0].amount = wallet.amount - Amount(fee);

    Transaction signed_child = child;
    const Script ws = wallet_script(wallet.key->public_key());
    const Bytes sig = sign_input(signed_child, 0, *wallet.key, SpentOutputContext{ws, wallet.amount}, SigHashType::all());
    signed_child.inputs[0].witness = {sig, ws.bytes()};
    return signed_child;
}

Transaction replay_signed_input(const Transaction& signed_tx, std::size_t input_index,
                                const std::vector<TxInput>& extra_inputs, const std::vector<TxOutput>& extra_outputs)
{
    if (input_index >= signed_tx.inputs.size() || input_index >= signed_tx.outputs.size()) {
        throw Error(Errc::sighash, "input " + std::to_string(input_index) + " has no matching output");
    }
    Transaction tx;
    tx.version = signed_tx.version;
    tx.locktime = signed_tx.locktime;
    tx.inputs.push_back(signed_tx.inputs[input_index]);
    tx.inputs.insert(tx.inputs.end(), extra_inputs.begin(), extra_inputs.end());
    tx.outputs.push_back(signed_tx.outputs[input_index]);
    tx.outputs.insert(tx.outputs.end(), extra_outputs.begin(), extra_outputs.end());
    return tx;
}

} // namespace covenant
