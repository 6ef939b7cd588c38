// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/compose.hpp>
#include <covenant/hash.hpp>
#include <covenant/wallet.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>

using namespace covenant;
using json = nlohmann::json;

namespace {

struct Vault {
    std::mt19937_64 rng{51};
    ChainState chain;
    PrivateKey funder = PrivateKey::generate(rng);
    PrivateKey custodian = PrivateKey::generate(rng);
    CovenantGraph graph;
    CovenantWallet wallet;

    explicit Vault(Mechanism mech, RecoveredStyle style = RecoveredStyle::nums)
    {
        ChainRequest r;
        r.mechanism = mech;
        r.m = 2;
        r.n = 3;
        r.style = style;
        r.custodial = CustodialPolicy{1, 1, {custodian.public_key()}};
        r.levels.assign(2, ChainLevel{});
        r.final_locking_script = p2wsh_address(Script().op(OP_1));
        graph = build_chain(r, minting_factory(chain, funder), rng);
        wallet.add_key("custodian", custodian);
        wallet.add_graph("vault", graph);
    }
};

} // namespace

TEST(Wallet, GraphBecomesVerifiedPackages)
{
    for (Mechanism mech : {Mechanism::deleted_key, Mechanism::recovered_key, Mechanism::ctv}) {
        Vault v(mech);
        ASSERT_EQ(v.wallet.packages.size(), 2u) << to_string(mech);
        EXPECT_EQ(v.wallet.package("vault/C1").tmpl.transaction, v.graph.nodes[0].tmpl.transaction);
        EXPECT_EQ(verify_package(v.wallet.package("vault/C2")), "");
        EXPECT_THROW(v.wallet.package("vault/C9"), Error);
        if (mech == Mechanism::deleted_key) {
            EXPECT_EQ(v.wallet.package("vault/C1").attestations.size(), 3u);
        }
        const ProofBundle proof = v.wallet.prove_package("vault/C1");
        EXPECT_TRUE(verify_proof(proof).accepted()) << to_string(mech) << " " << verify_proof(proof).detail;
        EXPECT_TRUE(v.wallet.find_transaction(txid(v.graph.roots[0])).has_value());
        EXPECT_TRUE(v.wallet.find_transaction(txid(v.graph.nodes[1].tmpl.transaction)).has_value());
        EXPECT_FALSE(v.wallet.find_transaction(sha256(std::string_view("absent"))).has_value());
    }
}

TEST(Wallet, ReservesFromHeldSecrets)
{
    Vault v(Mechanism::ctv);
    const ProofBundle b = v.wallet.prove_reserves("vault/C1", sha256(std::string_view("audit")));
    EXPECT_EQ(b.kind, ProofKind::reserves);
    EXPECT_TRUE(verify_proof(b).accepted());

    CovenantWallet watch;
    watch.add_watch_only("custodian", v.custodian.public_key());
    watch.add_graph("vault", v.graph);
    EXPECT_FALSE(watch.private_key("custodian").has_value());
    EXPECT_THROW(watch.prove_reserves("vault/C1", sha256(std::string_view("audit"))), Error);
}

TEST(Wallet, JsonRoundTrip)
{
    Vault v(Mechanism::recovered_key, RecoveredStyle::seeded);
    v.wallet.proofs.push_back(v.wallet.prove_package("vault/C1"));
    EXPECT_EQ(v.wallet.secret_seeds.size(), 2u);
    const std::string text = v.wallet.to_json();
    const CovenantWallet back = CovenantWallet::from_json(text);
    EXPECT_EQ(back.to_json(), text);
    EXPECT_EQ(back.private_key("custodian")->public_key(), v.custodian.public_key());
    EXPECT_TRUE(verify_proof(back.proofs[0]).accepted());
}

TEST(Wallet, PublicExportHoldsNoSecrets)
{
    Vault v(Mechanism::recovered_key, RecoveredStyle::seeded);
    const std::string pub = v.wallet.to_json(false);
    EXPECT_FALSE(json::parse(pub).contains("secrets"));
    for (const auto& [label, secret] : v.wallet.secret_keys) EXPECT_EQ(pub.find(secret), std::string::npos) << label;
    for (const auto& [name, seeds] : v.wallet.secret_seeds) {
        EXPECT_EQ(pub.find(to_hex(seeds.seed_r)), std::string::npos) << name;
    }
    const CovenantWallet back = CovenantWallet::from_json(pub);
    EXPECT_TRUE(back.secret_keys.empty());
    EXPECT_FALSE(back.private_key("custodian").has_value());
    EXPECT_EQ(back.packages.size(), 2u);
}

TEST(Wallet, TamperedPackageRejectedOnLoad)
{
    for (Mechanism mech : {Mechanism::deleted_key, Mechanism::recovered_key, Mechanism::ctv}) {
        Vault v(mech);
        json j = json::parse(v.wallet.to_json());
        json& tx = j["packages"][0]["template"]["transaction"]["hex"];
        Transaction changed = deserialize(from_hex(tx.get<std::string>()));
        changed.outputs[0].amount = changed.outputs[0].amount - Amount(1);
        tx = to_hex(serialize(changed, true));
        j["packages"][0]["template"]["transaction"]["txid"] = txid(changed).display_hex();
        try {
            CovenantWallet::from_json(j.dump());
            FAIL() << to_string(mech);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::proof);
            EXPECT_NE(std::string(e.what()).find("vault/C1"), std::string::npos);
        }
    }
}

TEST(Wallet, AddPackageVerifies)
{
    Vault v(Mechanism::ctv);
    WalletPackage pkg = v.wallet.package("vault/C1");
    pkg.name = "copy";
    pkg.tmpl.transaction.outputs[0].amount = Amount(5);
    EXPECT_NE(verify_package(pkg), "");
    EXPECT_THROW(v.wallet.add_package(pkg), Error);
}

TEST(Wallet, SaveAndLoad)
{
    Vault v(Mechanism::deleted_key);
    const auto path = std::filesystem::temp_directory_path() / "covenant-wallet-test.json";
    v.wallet.save(path.string());
    EXPECT_EQ(CovenantWallet::load(path.string()).to_json(), v.wallet.to_json());
    std::filesystem::remove(path);
    EXPECT_THROW(CovenantWallet::load(path.string()), Error);
}

TEST(Wallet, DefaultPathFromEnvironment)
{
    ::unsetenv("COVENANT_WALLET");
    EXPECT_EQ(default_wallet_path(), "covenant-wallet.json");
    ::setenv("COVENANT_WALLET", "/tmp/elsewhere.json", 1);
    EXPECT_EQ(default_wallet_path(), "/tmp/elsewhere.json");
    ::unsetenv("COVENANT_WALLET");
}
