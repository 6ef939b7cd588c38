// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "reference.hpp"

#include <covenant/compose.hpp>
#include <covenant/hash.hpp>
#include <covenant/protocol.hpp>

#include <json.hpp>

#include <bit>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace covenant;
using json = nlohmann::json;

namespace {

const Mechanism MECHANISMS[] = {Mechanism::deleted_key, Mechanism::recovered_key, Mechanism::ctv};

/** Collects failures; an empty list means the criterion holds. */
struct Report {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what)
    {
        if (!ok) failures.push_back(what);
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
}

std::string mech_name(Mechanism m) { return std::string(to_string(m)); }

struct Coins {
    PrivateKey key;
    Script script;

    explicit Coins(std::mt19937_64& rng) : key(PrivateKey::generate(rng)), script(p2wsh_address(wallet_script(key.public_key()))) {}

    std::vector<OutPoint> mint(ChainState& chain, std::size_t count, Amount each) const
    {
        const Transaction tx = chain.mint(std::vector<TxOutput>(count, TxOutput{each, script}));
        std::vector<OutPoint> out;
        for (std::uint32_t i = 0; i < count; ++i) out.push_back(OutPoint{txid(tx), i});
        return out;
    }

    Transaction pay(const OutPoint& op, Amount amount, std::vector<TxOutput> outputs, std::uint32_t sequence = SEQUENCE_RBF,
                    SigHashType type = SigHashType::all()) const
    {
        Transaction tx;
        tx.inputs.push_back(TxInput{op, sequence, {}});
        tx.outputs = std::move(outputs);
        sign_wallet_input(tx, 0, key, amount, type);
        return tx;
    }

    TxOutput out(Amount amount) const { return TxOutput{amount, script}; }

    /** Spends each outpoint back to itself at `feerate`. */
    std::vector<Transaction> fillers(const std::vector<OutPoint>& ops, Amount each, std::uint64_t feerate) const
    {
        std::vector<Transaction> out;
        for (const auto& op : ops) {
            const std::size_t size = tx_size(pay(op, each, {this->out(each)}));
            out.push_back(pay(op, each, {this->out(Amount(each.sats() - feerate * (size + 1)))}));
        }
        return out;
    }
};

bool in_block(const Block& b, const Transaction& tx)
{
    return std::find(b.txids.begin(), b.txids.end(), txid(tx)) != b.txids.end();
}

struct Bench {
    std::mt19937_64 rng;
    ChainState chain;
    PrivateKey funder;
    PrivateKey custodian;

    explicit Bench(std::uint64_t seed) : rng(seed), funder(PrivateKey::generate(rng)), custodian(PrivateKey::generate(rng)) {}

    ChainRequest request(Mechanism mech, std::size_t levels, int m = 1, int n = 1) const
    {
        ChainRequest r;
        r.mechanism = mech;
        r.m = m;
        r.n = n;
        r.custodial = CustodialPolicy{1, 1, {custodian.public_key()}};
        r.levels.assign(levels, ChainLevel{});
        r.final_locking_script = p2wsh_address(Script().op(OP_1));
        return r;
    }

    DepositFactory factory() { return minting_factory(chain, funder); }

    std::vector<Transaction> finalize(const CovenantGraph& g) const
    {
        std::vector<Transaction> txs;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) txs.push_back(finalize_node(g, i, {&custodian}));
        return txs;
    }
};

/** Broadcasts roots and nodes in topological order; returns per-node validations. */
std::vector<Validation> broadcast(ChainState& chain, const CovenantGraph& g, const std::vector<Transaction>& txs)
{
    std::vector<Validation> out;
    for (const auto& root : g.roots) out.push_back(chain.accept_to_mempool(root).validation);
    out.clear();
    for (std::size_t idx : g.topological_order()) {
        out.push_back(chain.accept_to_mempool(txs[idx]).validation);
        if (!out.back().accepted()) break;
    }
    chain.mine_block();
    return out;
}

bool all_accepted(const std::vector<Validation>& vs, std::size_t expected)
{
    return vs.size() == expected && std::all_of(vs.begin(), vs.end(), [](const Validation& v) { return v.accepted(); });
}

// 1
void sizes(Report& r)
{
    const SizeSweep dk = commitment_size_sweep(Mechanism::deleted_key, 1000, 1);
    const std::size_t lo = dk.der_convention.begin()->first;
    const std::size_t hi = dk.der_convention.rbegin()->first;
    r.expect(lo == 104 && hi == 106, "deleted-key range " + std::to_string(lo) + "-" + std::to_string(hi));
    r.expect(dk.der_convention.count(104) && dk.der_convention.count(106), "deleted-key extremes not both observed");
    r.note("deleted-key " + std::to_string(lo) + "-" + std::to_string(hi) + " (with type byte " +
           std::to_string(dk.with_type_convention.begin()->first) + "-" + std::to_string(dk.with_type_convention.rbegin()->first) + ")");

    const RecoveredCommitment nums = nums_signature(sha256(std::string_view("acceptance")));
    const CommitmentSize ns = commitment_size(Mechanism::recovered_key, nums.signature);
    r.expect(ns.with_type_convention == 43, "NUMS commitment " + std::to_string(ns.with_type_convention));
    r.expect(ns.der_bytes + 1 == 9, "NUMS DER+type " + std::to_string(ns.der_bytes + 1));
    r.note("NUMS " + std::to_string(ns.with_type_convention) + " (DER only " + std::to_string(ns.der_convention) + ", DER+type " +
           std::to_string(ns.der_bytes + 1) + ")");

    const SizeSweep seeded = commitment_size_sweep(Mechanism::recovered_key, 300, 2, RecoveredStyle::seeded);
    const std::size_t slo = seeded.der_convention.begin()->first;
    const std::size_t shi = seeded.der_convention.rbegin()->first;
    r.expect(slo >= 104 && shi <= 106, "seeded range " + std::to_string(slo) + "-" + std::to_string(shi));
    r.note("seeded " + std::to_string(slo) + "-" + std::to_string(shi) + " (with type byte " +
           std::to_string(seeded.with_type_convention.begin()->first) + "-" +
           std::to_string(seeded.with_type_convention.rbegin()->first) + ")");

    const CommitmentSize ctv = ctv_commitment_size(Hash256{});
    r.expect(ctv.der_convention == 34 && ctv.with_type_convention == 34, "ctv core " + std::to_string(ctv.der_convention));
    r.expect(Hash256{}.bytes.size() == 32, "hash size");
    r.note("ctv 34, hash 32");
}

// 2
void sigops(Report& r)
{
    std::mt19937_64 rng(2);
    Transaction tx;
    tx.inputs.push_back(TxInput{OutPoint{sha256(std::string_view("in")), 0}, SEQUENCE_RBF, {}});
    tx.outputs.push_back(TxOutput{Amount(1'000), p2wsh_address(Script().op(OP_1))});
    const Amount amount(2'000);
    const PrivateKey cust = PrivateKey::generate(rng);
    const CustodialPolicy cp{1, 1, {cust.public_key()}};

    std::string dk;
    for (int n = 1; n <= 4; ++n) {
        std::vector<PrivateKey> keys;
        for (int i = 0; i < n; ++i) keys.push_back(PrivateKey::generate(rng));
        for (int m = 1; m <= n; ++m) {
            DepositSpec spec;
            spec.enforcement = EnforcementPolicy{m, n, {}};
            for (const auto& k : keys) spec.enforcement->keys.push_back(k.public_key());
            spec.custodial = cp;
            const Script clause = commitment_clause(spec);
            Stack st;
            for (int i = 0; i < m; ++i) {
                st.push_back(sign_input(tx, 0, keys[static_cast<std::size_t>(i)], SpentOutputContext{clause, amount}, SigHashType::all()));
            }
            const ExecResult res = eval_script(st, clause, TransactionChecker(tx, 0, amount));
            r.expect(res.ok() && st.back() == Bytes{1} && res.sigops == m,
                     "deleted-key " + std::to_string(m) + "-of-" + std::to_string(n) + " sigops " + std::to_string(res.sigops));
        }
    }
    r.note("deleted-key m for every m-of-n, n<=4");

    const CovenantTemplate rt = make_template(tx, Mechanism::recovered_key, SigHashType::noinput_all());
    const RecoveredKeyCovenant rk = build_recovered_key_covenant(rt, 0, RecoveredStyle::nums);
    DepositSpec rs;
    rs.mechanism = Mechanism::recovered_key;
    rs.recovered_keys = {rk.key};
    rs.custodial = cp;
    Stack rst{rk.commitment.encoded()};
    const ExecResult rr = eval_script(rst, commitment_clause(rs), TransactionChecker(tx, 0, amount));
    r.expect(rr.ok() && rst.back() == Bytes{1} && rr.sigops == 1, "recovered-key sigops " + std::to_string(rr.sigops));

    DepositSpec cs;
    cs.mechanism = Mechanism::ctv;
    cs.ctv_hashes = {standard_template_hash(tx, 0)};
    cs.custodial = cp;
    Stack cst;
    const ExecResult cr = eval_script(cst, commitment_clause(cs), TransactionChecker(tx, 0, amount));
    r.expect(cr.ok() && cr.sigops == 0, "ctv sigops " + std::to_string(cr.sigops));
    r.note("recovered-key " + std::to_string(rr.sigops) + ", ctv " + std::to_string(cr.sigops));
}

// 3
void recovery(Report& r)
{
    std::mt19937_64 rng(3);
    int found = 0;
    for (int i = 0; i < 1000; ++i) {
        const PrivateKey key = PrivateKey::generate(rng);
        Hash256 digest;
        for (auto& b : digest.bytes) b = static_cast<std::uint8_t>(rng());
        const auto keys = recover_pubkeys(digest, sign(key, digest));
        found += std::find(keys.begin(), keys.end(), key.public_key()) != keys.end() ? 1 : 0;
    }
    r.expect(found == 1000, std::to_string(found) + "/1000 recovered");
    r.note(std::to_string(found) + "/1000 signer keys recovered");
}

// 4
void lift_rate(Report& r)
{
    std::mt19937_64 rng(4);
    int lifted = 0;
    for (int i = 0; i < 10'000; ++i) {
        U256 x{};
        for (auto& b : x) b = static_cast<std::uint8_t>(rng());
        lifted += secp256k1::x_lifts_to_curve(x) ? 1 : 0;
    }
    const double rate = lifted / 10'000.0;
    r.expect(rate >= 0.48 && rate <= 0.52, "rate " + std::to_string(rate));
    r.note("lift rate " + std::to_string(rate).substr(0, 6));
}

// 5
void deletion(Report& r)
{
    const std::vector<SweepCase> cases = deletion_sweep(4, 5);
    std::size_t expected = 0;
    for (int n = 1; n <= 4; ++n) expected += static_cast<std::size_t>(n) << n;
    r.expect(cases.size() == expected, std::to_string(cases.size()) + " cases, expected " + std::to_string(expected));
    int thefts = 0;
    for (const auto& c : cases) {
        const std::string id = std::to_string(c.m) + "-of-" + std::to_string(c.n) + " mask " + std::to_string(c.leak_mask);
        r.expect(c.surviving == std::popcount(c.leak_mask), id + " surviving count");
        r.expect(c.theft_accepted == (c.surviving >= c.m), id + " theft " + (c.theft_accepted ? "accepted" : "rejected"));
        if (c.n - c.surviving >= c.n - c.m + 1) r.expect(!c.theft_accepted, id + " enforced after deletions");
        thefts += c.theft_accepted ? 1 : 0;
    }
    r.note(std::to_string(cases.size()) + " cases, " + std::to_string(thefts) + " thefts, all as predicted");
}

// 6
void protocol_outcomes(Report& r)
{
    const std::pair<const char*, Outcome> files[] = {
        {"honest.json", Outcome::covenant_active}, {"key_leak.json", Outcome::funds_at_risk}, {"stall.json", Outcome::aborted}};
    std::string seen;
    for (const auto& [file, outcome] : files) {
        std::ifstream in(std::string(COVENANT_SCENARIO_DIR) + "/" + file);
        std::stringstream ss;
        ss << in.rdbuf();
        const Scenario s = scenario_from_json(ss.str());
        const ProtocolTrace a = run_protocol(s);
        const ProtocolTrace b = run_protocol(s);
        r.expect(a.outcome == outcome, std::string(file) + " gave " + std::string(to_string(a.outcome)));
        r.expect(a.to_json_lines() == b.to_json_lines(), std::string(file) + " trace differs between runs");
        seen += (seen.empty() ? "" : ", ") + std::string(to_string(a.outcome));
    }
    r.note(seen);
}

// 7
void fees(Report& r)
{
    for (Mechanism mech : MECHANISMS) {
        Bench b(70);
        const std::vector<std::uint64_t> rates{2, 10};
        const FeeVariantSet set = enumerate_fee_variants(b.request(mech, 3), rates, b.factory(), b.rng);
        r.expect(set.chains.size() == 8, mech_name(mech) + " chains " + std::to_string(set.chains.size()));
        for (std::size_t c = 0; c < set.chains.size(); ++c) {
            ChainState fresh = b.chain;
            const auto results = broadcast(fresh, set.chains[c], b.finalize(set.chains[c]));
            r.expect(all_accepted(results, 3), mech_name(mech) + " variant " + std::to_string(c) + " invalid");
        }
    }
    r.note("8 valid variant chains per mechanism");

    int replaced = 0;
    int cases = 0;
    for (bool signaling : {true, false}) {
        for (std::uint64_t fee_b : {500u, 1'000u, 1'001u, 1'200u, 1'400u, 3'000u}) {
            for (std::size_t extra : {0u, 1u, 3u}) {
                std::mt19937_64 rng(71);
                ChainState chain;
                const Coins w(rng);
                const OutPoint op = w.mint(chain, 1, Amount(100'000))[0];
                const Transaction a =
                    w.pay(op, Amount(100'000), {w.out(Amount(99'000))}, signaling ? SEQUENCE_RBF : SEQUENCE_FINAL);
                chain.accept_to_mempool(a);
                std::vector<TxOutput> outs(extra, w.out(Amount(1'000)));
                outs.insert(outs.begin(), TxOutput{Amount(100'000 - fee_b - 1'000 * extra), p2wsh_address(Script().op(OP_1))});
                const Transaction bx = w.pay(op, Amount(100'000), outs);
                const bool expected = signaling && fee_b * tx_size(a) > 1'000 * tx_size(bx) && fee_b > 1'000;
                const bool got = chain.accept_to_mempool(bx).status == MempoolStatus::replaced;
                r.expect(got == expected, "replacement signaling=" + std::to_string(signaling) + " fee=" + std::to_string(fee_b) +
                                              " extra=" + std::to_string(extra));
                replaced += got ? 1 : 0;
                ++cases;
            }
        }
    }
    r.note("RBF " + std::to_string(replaced) + "/" + std::to_string(cases) + " replaced as predicted");

    {
        std::mt19937_64 rng(72);
        ChainState chain;
        const Coins w(rng);
        const Coins filler(rng);
        const OutPoint op = w.mint(chain, 1, Amount(200'000))[0];
        const Transaction parent = w.pay(op, Amount(200'000), {w.out(Amount(200'000))});
        chain.accept_to_mempool(parent);
        std::size_t capacity = 0;
        for (const auto& f : filler.fillers(filler.mint(chain, 30, Amount(50'000)), Amount(50'000), 5)) {
            chain.accept_to_mempool(f);
            capacity += tx_size(f);
        }
        ChainState without = chain;
        r.expect(!in_block(without.mine_block(capacity), parent), "zero-fee parent mined without a child");
        const Transaction child =
            cpfp_child(parent, Amount{}, 10, WalletOutput{OutPoint{txid(parent), 0}, Amount(200'000), &w.key}, w.script);
        r.expect(chain.accept_to_mempool(child).ok(), "child rejected");
        const Block blk = chain.mine_block(capacity);
        r.expect(in_block(blk, parent) && in_block(blk, child), "parent and child not in one block");
        r.note("CPFP parent+child in block " + std::to_string(blk.height));
    }

    {
        std::mt19937_64 rng(73);
        ChainState chain;
        const Coins honest(rng);
        const Coins adversary(rng);
        const Coins filler(rng);
        const OutPoint op = honest.mint(chain, 1, Amount(100'000))[0];
        const OutPoint adv = adversary.mint(chain, 1, Amount(5'000'000))[0];
        const Transaction signed_parent =
            honest.pay(op, Amount(100'000), {honest.out(Amount(100'000))}, SEQUENCE_RBF, SigHashType::single_anyonecanpay());
        const auto fillers = filler.fillers(filler.mint(chain, 40, Amount(50'000)), Amount(50'000), 20);
        std::size_t capacity = 0;
        for (const auto& f : fillers) capacity += tx_size(f);
        const std::uint64_t target = 30;
        const Transaction child = cpfp_child(signed_parent, Amount{}, target,
                                             WalletOutput{OutPoint{txid(signed_parent), 0}, Amount(100'000), &honest.key}, honest.script);

        ChainState control = chain;
        for (const auto& f : fillers) control.accept_to_mempool(f);
        control.accept_to_mempool(signed_parent);
        control.accept_to_mempool(child);
        const Block cb = control.mine_block(capacity);
        r.expect(in_block(cb, signed_parent) && in_block(cb, child), "unpinned package not mined");

        Transaction pinned = replay_signed_input(signed_parent, 0, {TxInput{adv, SEQUENCE_RBF, {}}},
                                                 {adversary.out(Amount(5'000'000 - 2'000))});
        sign_wallet_input(pinned, 1, adversary.key, Amount(5'000'000));
        r.expect(chain.accept_to_mempool(pinned).ok(), "replayed transaction rejected");
        for (const auto& f : fillers) chain.accept_to_mempool(f);
        r.expect(!chain.accept_to_mempool(signed_parent).ok(), "honest parent displaced the pin");
        r.expect(compare_feerate(Amount(2'000), tx_size(pinned), Amount(target), 1) < 0, "pinned feerate not below target");
        const Block b = chain.mine_block(capacity);
        r.expect(!in_block(b, pinned) && chain.in_mempool(txid(pinned)), "pinned package mined");
        r.note("pinned package excluded from a full block");
    }
}

// 8
void rebinding(Report& r)
{
    auto run = [&](Mechanism mech, std::optional<SigHashType> type) {
        Bench b(80);
        const PrivateKey payer = PrivateKey::generate(b.rng);
        ChainRequest req = b.request(mech, 3);
        for (auto& level : req.levels) level.sighash = type;
        CovenantGraph g = build_chain(req, b.factory(), b.rng);
        const Transaction funding = b.chain.mint({TxOutput{Amount(20'000), p2wsh_address(wallet_script(payer.public_key()))}});
        const Hash256 before = txid(g.nodes[1].tmpl.transaction);
        add_fee_input(g, 1, OutPoint{txid(funding), 0});
        repoint_children(g, 1);
        r.expect(txid(g.nodes[1].tmpl.transaction) != before, "fee input left the txid unchanged");
        auto txs = b.finalize(g);
        sign_wallet_input(txs[1], 1, payer, Amount(20'000));
        return broadcast(b.chain, g, txs);
    };
    const auto rk = run(Mechanism::recovered_key, std::nullopt);
    r.expect(all_accepted(rk, 3), "recovered-key chain broke after rebinding");
    const auto bound = run(Mechanism::deleted_key, SigHashType::all_anyonecanpay());
    r.expect(bound.size() == 3 && bound[0].accepted() && bound[1].accepted() && bound[2].reason == RejectReason::bad_sig,
             "txid-committing chain did not fail at the mutated edge");
    const auto floating = run(Mechanism::deleted_key, SigHashType::noinput_anyonecanpay());
    r.expect(all_accepted(floating, 3), "deleted-key NOINPUT chain broke after rebinding");
    r.note("NOINPUT chain valid; ALL|ANYONECANPAY chain rejected at C3 with " +
           (bound.empty() ? std::string("?") : std::string(to_string(bound.back().reason))));
}

// 9
void disjoint(Report& r)
{
    for (Mechanism mech : MECHANISMS) {
        for (std::size_t first : {0u, 1u}) {
            Bench b(90);
            ChainLevel alt;
            alt.fee = Amount(5'000);
            const CovenantGraph g = build_disjoint(b.request(mech, 1), ChainLevel{}, alt, b.factory(), b.rng);
            const auto txs = b.finalize(g);
            b.chain.accept_to_mempool(g.roots[0]);
            b.chain.mine_block();
            const std::string id = mech_name(mech) + " branch " + std::to_string(first);
            r.expect(b.chain.check_tx(txs[0]).accepted() && b.chain.check_tx(txs[1]).accepted(), id + " not both valid up front");
            r.expect(b.chain.accept_to_mempool(txs[first]).ok(), id + " rejected");
            b.chain.mine_block();
            r.expect(b.chain.check_tx(txs[1 - first]).reason == RejectReason::double_spend, id + " left the other branch valid");
        }
    }
    r.note("either branch excludes the other for all three mechanisms");
}

// 10
void proofs(Report& r)
{
    std::size_t flips = 0;
    std::set<std::string> reasons;
    for (Mechanism mech : MECHANISMS) {
        Bench b(100);
        const CovenantGraph g = build_chain(b.request(mech, 1, 2, 3), b.factory(), b.rng);
        const NodeInput& in = g.nodes[0].inputs[0];
        const ProofBundle bundle =
            prove_covenant(CovenantEvidence{in.spec, g.roots[0], 0, g.nodes[0].tmpl, 0, in.commitments, in.seeds, g.attestations});
        const std::string text = proof_to_json(bundle);
        r.expect(verify_proof_json(text).accepted(), mech_name(mech) + " honest bundle rejected");

        json root = json::parse(text);
        std::function<void(json&, const std::string&)> walk = [&](json& node, const std::string& path) {
            auto check = [&](const json& replacement) {
                const json saved = node;
                node = replacement;
                const ProofVerdict v = verify_proof_json(root.dump());
                node = saved;
                ++flips;
                if (v.accepted()) {
                    r.expect(false, mech_name(mech) + " accepted a flip in " + path);
                } else {
                    reasons.insert(v.reason);
                }
            };
            if (node.is_object()) {
                for (auto& [k, v] : node.items()) walk(v, path + "/" + k);
            } else if (node.is_array()) {
                for (std::size_t i = 0; i < node.size(); ++i) walk(node[i], path + "/" + std::to_string(i));
            } else if (node.is_string()) {
                const std::string s = node.get<std::string>();
                for (std::size_t i = 0; i < s.size(); ++i) {
                    for (int bit = 0; bit < 7; ++bit) {
                        std::string t = s;
                        t[i] = static_cast<char>(t[i] ^ (1 << bit));
                        check(t);
                    }
                }
            } else if (node.is_number_integer()) {
                const auto v = node.get<std::uint64_t>();
                for (int bit = 0; bit < 32; ++bit) check(v ^ (std::uint64_t{1} << bit));
            }
        };
        walk(root, "");

        ChainState chain = b.chain;
        chain.accept_to_mempool(g.roots[0]);
        chain.mine_block();
        const ProofBundle reserves =
            prove_reserves(in.spec, g.roots[0], 0, sha256(std::string_view("reserves")), {&b.custodian});
        r.expect(verify_proof(reserves).accepted(), mech_name(mech) + " reserves proof rejected");
        r.expect(!chain.check_tx(reserves.covenant_tx).accepted(), mech_name(mech) + " reserves transaction valid on-chain");
    }
    r.expect(reasons.count("") == 0, "unnamed rejection");
    r.note(std::to_string(flips) + " single-bit flips rejected, " + std::to_string(reasons.size()) + " distinct reasons");
}

// 11
void oracles(Report& r)
{
    std::mt19937_64 rng(110);
    int mismatches = 0;
    for (int i = 0; i < 10'000; ++i) {
        const ref::Bytes script = ref::random_script(rng);
        const Stack initial = ref::random_stack(rng);
        Stack fast = initial;
        const ExecResult res = eval_script(fast, Script(script), ref::FakeChecker{});
        const auto slow = ref::naive_eval(initial, script);
        if (res.ok() != slow.has_value() || (slow && fast != *slow)) ++mismatches;
    }
    r.expect(mismatches == 0, std::to_string(mismatches) + " script mismatches");

    int tx_mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const Transaction tx = ref::random_transaction(rng);
        if (serialize(tx, true) != ref::serialize(tx, true) || txid(tx).bytes != ref::dsha256(ref::serialize(tx, false))) {
            ++tx_mismatches;
        }
    }
    r.expect(tx_mismatches == 0, std::to_string(tx_mismatches) + " serialization mismatches");
    r.note("10000 scripts, 1000 transactions, " + std::to_string(mismatches + tx_mismatches) + " mismatches");
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Report&)>>> criteria{
        {"commitment sizes", sizes},
        {"commitment sigops", sigops},
        {"public key recovery", recovery},
        {"curve lift rate", lift_rate},
        {"deletion soundness", deletion},
        {"protocol outcomes", protocol_outcomes},
        {"fee machinery", fees},
        {"NOINPUT rebinding", rebinding},
        {"disjoint branches", disjoint},
        {"proof bundles", proofs},
        {"oracle equivalence", oracles},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Report report;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(report);
        } catch (const std::exception& e) {
            report.failures.push_back(std::string("exception: ") + e.what());
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        const bool ok = report.failures.empty();
        failed += ok ? 0 : 1;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << (i + 1 < 10 ? " " : "") << i + 1 << "  " << criteria[i].first << ": "
                  << (ok ? join(report.notes) : join(report.failures)) << " (" << ms << " ms)" << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass" << std::endl;
    return failed == 0 ? 0 : 1;
}
