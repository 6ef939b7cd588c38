// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/compose.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <set>

using namespace covenant;

namespace {

const Mechanism ALL_MECHANISMS[] = {Mechanism::deleted_key, Mechanism::recovered_key, Mechanism::ctv};

struct Bench {
    std::mt19937_64 rng;
    ChainState chain;
    PrivateKey funder;
    PrivateKey custodian;
    PrivateKey sink;

    explicit Bench(std::uint64_t seed)
        : rng(seed), funder(PrivateKey::generate(rng)), custodian(PrivateKey::generate(rng)), sink(PrivateKey::generate(rng))
    {
    }

    ChainRequest request(Mechanism mech, std::size_t levels, int m = 1, int n = 1)
    {
        ChainRequest r;
        r.mechanism = mech;
        r.m = m;
        r.n = n;
        r.custodial = CustodialPolicy{1, 1, {custodian.public_key()}};
        r.levels.assign(levels, ChainLevel{});
        r.final_locking_script = p2wsh_address(wallet_script(sink.public_key()));
        return r;
    }

    DepositFactory factory() { return minting_factory(chain, funder); }

    Transaction finalize(const CovenantGraph& g, std::size_t node) const { return finalize_node(g, node, {&custodian}); }
};

/** Submits roots and nodes in `order`; returns the index of the first rejected node or -1. */
int submit(ChainState& chain, const CovenantGraph& g, const std::vector<Transaction>& txs, const std::vector<std::size_t>& order,
           std::vector<Validation>* results = nullptr)
{
    for (const auto& root : g.roots) {
        if (!chain.accept_to_mempool(root).ok()) return -2;
    }
    for (std::size_t idx : order) {
        const MempoolResult r = chain.accept_to_mempool(txs[idx]);
        if (results) results->push_back(r.validation);
        if (!r.ok()) return static_cast<int>(idx);
    }
    chain.mine_block();
    return -1;
}

std::vector<Transaction> finalize_all(const Bench& s, const CovenantGraph& g)
{
    std::vector<Transaction> txs;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) txs.push_back(s.finalize(g, i));
    return txs;
}

} // namespace

TEST(Compose, ChainsConfirmForEveryMechanism)
{
    for (Mechanism mech : ALL_MECHANISMS) {
        Bench s(21);
        const CovenantGraph g = build_chain(s.request(mech, 3), s.factory(), s.rng);
        ASSERT_NO_THROW(g.validate());
        ASSERT_EQ(g.nodes.size(), 3u);
        EXPECT_EQ(g.nodes[0].label, "C1");
        EXPECT_EQ(g.nodes[2].label, "C3");
        std::vector<Validation> results;
        ASSERT_EQ(submit(s.chain, g, finalize_all(s, g), g.topological_order(), &results), -1) << to_string(mech);
        const int expected_sigops = mech == Mechanism::ctv ? 1 : 2;
        for (const auto& v : results) EXPECT_EQ(v.sigops, expected_sigops) << to_string(mech);
        const Transaction last = s.finalize(g, 2);
        EXPECT_EQ(s.chain.confirmations(txid(last)), 1u);
        EXPECT_EQ(last.outputs[0].locking_script, p2wsh_address(wallet_script(s.sink.public_key())));
    }
}

TEST(Compose, DeletedKeyChainWithThresholdPolicy)
{
    Bench s(22);
    const CovenantGraph g = build_chain(s.request(Mechanism::deleted_key, 2, 2, 3), s.factory(), s.rng);
    EXPECT_EQ(g.attestations.size(), 6u);
    for (const auto& node : g.nodes) EXPECT_EQ(node.inputs[0].commitments.size(), 3u);
    std::vector<Validation> results;
    ASSERT_EQ(submit(s.chain, g, finalize_all(s, g), g.topological_order(), &results), -1);
    for (const auto& v : results) EXPECT_EQ(v.sigops, 3);
}

TEST(Compose, OutOfOrderBroadcastRejectedAtFirstOrphan)
{
    for (Mechanism mech : {Mechanism::deleted_key, Mechanism::ctv}) {
        Bench s(23);
        const CovenantGraph g = build_chain(s.request(mech, 3), s.factory(), s.rng);
        const auto txs = finalize_all(s, g);
        ChainState chain = s.chain;
        std::vector<Validation> results;
        EXPECT_EQ(submit(chain, g, txs, {0, 2, 1}, &results), 2);
        EXPECT_EQ(results.back().reason, RejectReason::missing_utxo);
    }
}

TEST(Compose, RecoveredKeyChainSurvivesFeeInputOnIntermediate)
{
    Bench s(24);
    const PrivateKey payer = PrivateKey::generate(s.rng);
    CovenantGraph g = build_chain(s.request(Mechanism::recovered_key, 3), s.factory(), s.rng);
    const Transaction funding = s.chain.mint({TxOutput{Amount(20'000), p2wsh_address(wallet_script(payer.public_key()))}});
    const Hash256 before = txid(g.nodes[1].tmpl.transaction);
    add_fee_input(g, 1, OutPoint{txid(funding), 0});
    repoint_children(g, 1);
    ASSERT_NE(txid(g.nodes[1].tmpl.transaction), before);
    EXPECT_EQ(g.nodes[2].tmpl.transaction.inputs[0].previous.txid, txid(g.nodes[1].tmpl.transaction));
    EXPECT_NO_THROW(g.validate());

    auto txs = finalize_all(s, g);
    sign_wallet_input(txs[1], 1, payer, Amount(20'000));
    EXPECT_EQ(submit(s.chain, g, txs, g.topological_order()), -1);
}

TEST(Compose, TxidCommittingChainBreaksAtMutatedEdge)
{
    Bench s(25);
    const PrivateKey payer = PrivateKey::generate(s.rng);
    ChainRequest req = s.request(Mechanism::deleted_key, 3);
    for (auto& level : req.levels) level.sighash = SigHashType::all_anyonecanpay();
    CovenantGraph g = build_chain(req, s.factory(), s.rng);
    const Transaction funding = s.chain.mint({TxOutput{Amount(20'000), p2wsh_address(wallet_script(payer.public_key()))}});
    add_fee_input(g, 1, OutPoint{txid(funding), 0});
    repoint_children(g, 1);

    auto txs = finalize_all(s, g);
    sign_wallet_input(txs[1], 1, payer, Amount(20'000));
    std::vector<Validation> results;
    EXPECT_EQ(submit(s.chain, g, txs, g.topological_order(), &results), 2);
    EXPECT_TRUE(results[0].accepted());
    EXPECT_TRUE(results[1].accepted());
    EXPECT_EQ(results[2].reason, RejectReason::bad_sig);
}

TEST(Compose, DisjointBranchesExcludeEachOther)
{
    for (Mechanism mech : ALL_MECHANISMS) {
        for (std::size_t first : {0u, 1u}) {
            Bench s(26);
            ChainRequest req = s.request(mech, 1);
            ChainLevel a;
            ChainLevel b;
            b.fee = Amount(5'000);
            const CovenantGraph g = build_disjoint(req, a, b, s.factory(), s.rng);
            ASSERT_EQ(g.nodes.size(), 2u);
            EXPECT_EQ(g.nodes[0].label, "A");
            EXPECT_EQ(g.nodes[1].label, "B");
            const auto txs = finalize_all(s, g);
            ASSERT_TRUE(s.chain.accept_to_mempool(g.roots[0]).ok());
            s.chain.mine_block();
            for (const auto& tx : txs) EXPECT_TRUE(s.chain.check_tx(tx).accepted()) << to_string(mech);
            ASSERT_TRUE(s.chain.accept_to_mempool(txs[first]).ok());
            s.chain.mine_block();
            const Validation other = s.chain.check_tx(txs[1 - first]);
            EXPECT_EQ(other.reason, RejectReason::double_spend) << to_string(mech) << " " << first;
            EXPECT_FALSE(s.chain.accept_to_mempool(txs[1 - first]).ok());
        }
    }
}

TEST(Compose, MultiDepositWithRefund)
{
    for (Mechanism mech : ALL_MECHANISMS) {
        Bench s(27);
        const PrivateKey refund_key = PrivateKey::generate(s.rng);
        ChainRequest req = s.request(mech, 1);
        req.refund = RefundPath{50, refund_key.public_key()};
        const CovenantGraph g = build_multi_deposit(req, 3, s.factory(), s.rng);
        ASSERT_EQ(g.roots.size(), 3u);
        ASSERT_EQ(g.nodes.size(), 1u);
        EXPECT_EQ(g.nodes[0].tmpl.transaction.inputs.size(), 3u);

        for (const auto& root : g.roots) ASSERT_TRUE(s.chain.accept_to_mempool(root).ok());
        s.chain.mine_block();
        const ChainState snapshot = s.chain;
        const Transaction c = s.finalize(g, 0);
        const MempoolResult r = s.chain.accept_to_mempool(c);
        ASSERT_TRUE(r.ok()) << to_string(mech) << " " << r.validation.detail;

        ChainState refund_chain = snapshot;
        const Script dest = p2wsh_address(wallet_script(refund_key.public_key()));
        const Transaction refund = refund_spend(g, 1, 0, refund_key, dest, Amount(1'000));
        EXPECT_EQ(refund.locktime, 50u);
        EXPECT_EQ(refund_chain.check_tx(refund).reason, RejectReason::timelock);
        refund_chain.mine_blocks(50 - refund_chain.height());
        EXPECT_TRUE(refund_chain.check_tx(refund).accepted()) << to_string(mech);
    }
}

TEST(Compose, GraphValidationErrors)
{
    Bench s(28);
    const CovenantGraph g = build_chain(s.request(Mechanism::ctv, 2), s.factory(), s.rng);
    auto expect_graph_error = [](const CovenantGraph& bad) {
        try {
            bad.validate();
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::graph);
        }
    };

    CovenantGraph dangling = g;
    dangling.edges.push_back(GraphEdge{false, 7, 0, 1, 0, EdgeKind::txid, {}});
    expect_graph_error(dangling);

    CovenantGraph cycle = g;
    cycle.edges.push_back(GraphEdge{false, 1, 0, 0, 0, EdgeKind::txid, {}});
    expect_graph_error(cycle);

    CovenantGraph legacy = g;
    legacy.nodes[0].tmpl.transaction.outputs[0].locking_script = wallet_script(s.sink.public_key());
    expect_graph_error(legacy);
}

TEST(Compose, GraphRenderings)
{
    Bench s(29);
    const CovenantGraph g = build_chain(s.request(Mechanism::recovered_key, 2), s.factory(), s.rng);
    EXPECT_NE(g.to_json().find("\"C2\""), std::string::npos);
    const std::string tree = g.render_tree();
    EXPECT_LT(tree.find("C1"), tree.find("C2"));
    EXPECT_EQ(g.topological_order(), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(g.children(0), std::vector<std::size_t>{1});
    EXPECT_TRUE(g.children(1).empty());
}

TEST(Compose, GraphJsonCarriesFeeMetadata)
{
    Bench s(30);
    ChainRequest r = s.request(Mechanism::recovered_key, 2);
    r.levels[0].fee = Amount(700);
    r.levels[1].fee = Amount(1'300);
    CovenantGraph g = build_chain(r, s.factory(), s.rng);
    const Transaction funding = s.chain.mint({TxOutput{Amount(5'000), p2wsh_address(wallet_script(s.funder.public_key()))}});
    add_fee_input(g, 1, OutPoint{txid(funding), 0});

    const auto j = nlohmann::json::parse(g.to_json());
    EXPECT_EQ(j.at("mechanism"), "recovered-key");
    ASSERT_EQ(j.at("nodes").size(), 2u);
    EXPECT_EQ(j.at("nodes")[0].at("fee"), 700);
    EXPECT_EQ(j.at("nodes")[0].at("fee_inputs"), 0);
    EXPECT_EQ(j.at("nodes")[1].at("fee"), 1'300);
    EXPECT_EQ(j.at("nodes")[1].at("fee_inputs"), 1);
    EXPECT_EQ(j.at("edges").size(), 2u);
}

TEST(FeeVariants, TwoRatesThreeLevelsGiveEightValidChains)
{
    for (Mechanism mech : ALL_MECHANISMS) {
        Bench s(30);
        const std::vector<std::uint64_t> rates{2, 10};
        const FeeVariantSet set = enumerate_fee_variants(s.request(mech, 3), rates, s.factory(), s.rng);
        ASSERT_EQ(set.chains.size(), 8u) << to_string(mech);
        EXPECT_EQ(set.prepared_transactions, mech == Mechanism::deleted_key ? 14u : 6u);
        EXPECT_GT(set.aggregate_bytes, 0u);
        std::set<std::vector<std::size_t>> distinct(set.choices.begin(), set.choices.end());
        EXPECT_EQ(distinct.size(), 8u);
        const Hash256 deposit = txid(set.chains[0].roots[0]);
        for (std::size_t c = 0; c < set.chains.size(); ++c) {
            const CovenantGraph& g = set.chains[c];
            EXPECT_EQ(txid(g.roots[0]), deposit);
            ChainState fresh = s.chain;
            const auto txs = finalize_all(s, g);
            std::vector<Validation> results;
            ASSERT_EQ(submit(fresh, g, txs, g.topological_order(), &results), -1) << to_string(mech) << " chain " << c;
            for (std::size_t level = 0; level < txs.size(); ++level) {
                const std::uint64_t rate = rates[set.choices[c][level]];
                EXPECT_GE(results[level].fee.sats(), rate * results[level].size);
            }
        }
    }
}

TEST(FeeVariants, CountLaw)
{
    for (std::uint64_t p = 1; p <= 4; ++p) {
        for (std::uint64_t t = 1; t <= 5; ++t) {
            std::uint64_t power = 1;
            std::uint64_t geometric = 0;
            for (std::uint64_t i = 1; i <= t; ++i) {
                power *= p;
                geometric += power;
            }
            EXPECT_EQ(variant_counts(Mechanism::ctv, p, t).chains, power);
            EXPECT_EQ(variant_counts(Mechanism::ctv, p, t).prepared, p * t);
            EXPECT_EQ(variant_counts(Mechanism::recovered_key, p, t).prepared, p * t);
            EXPECT_EQ(variant_counts(Mechanism::deleted_key, p, t).prepared, geometric);

            Bench s(31);
            std::vector<std::uint64_t> rates;
            for (std::uint64_t i = 0; i < p; ++i) rates.push_back(1 + i);
            const FeeVariantSet set = enumerate_fee_variants(s.request(Mechanism::ctv, t), rates, s.factory(), s.rng);
            EXPECT_EQ(set.chains.size(), power) << p << "^" << t;
            EXPECT_EQ(set.prepared_transactions, p * t);
        }
    }
}

TEST(FeeVariants, DeletedKeyTreeCounts)
{
    for (std::uint64_t p = 1; p <= 3; ++p) {
        for (std::uint64_t t = 1; t <= 3; ++t) {
            Bench s(32);
            std::vector<std::uint64_t> rates;
            for (std::uint64_t i = 0; i < p; ++i) rates.push_back(1 + i);
            const FeeVariantSet set = enumerate_fee_variants(s.request(Mechanism::deleted_key, t), rates, s.factory(), s.rng);
            EXPECT_EQ(set.chains.size(), variant_counts(Mechanism::deleted_key, p, t).chains);
            EXPECT_EQ(set.prepared_transactions, variant_counts(Mechanism::deleted_key, p, t).prepared);
        }
    }
}

TEST(FeeVariants, SingleRateIsOneChain)
{
    Bench s(33);
    EXPECT_EQ(enumerate_fee_variants(s.request(Mechanism::ctv, 4), {5}, s.factory(), s.rng).chains.size(), 1u);
}

TEST(FeeVariants, CapIsEnforced)
{
    Bench s(34);
    try {
        enumerate_fee_variants(s.request(Mechanism::ctv, 7), {1, 2, 3, 4}, s.factory(), s.rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::fee);
        EXPECT_NE(std::string(e.what()).find("16384"), std::string::npos);
    }
    EXPECT_THROW(enumerate_fee_variants(s.request(Mechanism::ctv, 3), {1, 2}, s.factory(), s.rng, 7), Error);
}

TEST(Compose, EstimateCoversActualSize)
{
    for (Mechanism mech : ALL_MECHANISMS) {
        Bench s(35);
        const CovenantGraph g = build_chain(s.request(mech, 2), s.factory(), s.rng);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const Transaction tx = s.finalize(g, i);
            const std::size_t estimate = estimate_spend_size(g.nodes[i].tmpl.transaction, {g.nodes[i].inputs[0].spec});
            EXPECT_GE(estimate, tx_size(tx));
            if (mech != Mechanism::recovered_key) {
                EXPECT_LE(estimate, tx_size(tx) + 8) << to_string(mech);
            }
        }
    }
}

TEST(Compose, FinalizeNeedsCustodialKey)
{
    Bench s(36);
    const CovenantGraph g = build_chain(s.request(Mechanism::ctv, 1), s.factory(), s.rng);
    EXPECT_THROW(finalize_node(g, 0, {&s.sink}), Error);
}
