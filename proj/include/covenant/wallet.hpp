// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_WALLET_HPP
#define COVENANT_WALLET_HPP

#include <covenant/compose.hpp>
#include <covenant/mechanisms.hpp>
#include <covenant/proof.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace covenant {

struct WalletKey {
    std::string label;
    PublicKey key;
};

/** A covenant template with the evidence binding it to its deposit output. */
struct WalletPackage {
    std::string name;
    DepositSpec deposit;
    OutPoint deposit_outpoint;
    Amount amount;
    CovenantTemplate tmpl;
    std::size_t input_index{0};
    /** Commitment signatures; empty for ctv. */
    std::vector<CommitmentSignature> signatures;
    /** Deleted-key: deletions of this deposit's enforcement keys. */
    std::vector<DeletionAttestation> attestations;
};

/** Empty when the package's evidence checks out against its deposit script. */
std::string verify_package(const WalletPackage& pkg);

/**
 * JSON wallet ("format": 1). Public data and a separate "secrets" section
 * holding private keys and signature seeds.
 */
struct CovenantWallet {
    std::vector<WalletKey> keys;
    std::vector<WalletPackage> packages;
    /** Graph documents as produced by CovenantGraph::to_json. */
    std::vector<std::string> graphs;
    std::vector<ProofBundle> proofs;
    /** label -> private scalar hex. */
    std::map<std::string, std::string> secret_keys;
    /** package name -> seeds. */
    std::map<std::string, SignatureSeeds> secret_seeds;

    /** Throws Error(Errc::key) for unknown labels. */
    const WalletKey& key(const std::string& label) const;
    std::optional<PrivateKey> private_key(const std::string& label) const;
    void add_key(const std::string& label, const PrivateKey& secret);
    void add_watch_only(const std::string& label, const PublicKey& key);
    /** Rejects packages that fail verify_package. */
    void add_package(WalletPackage pkg);
    const WalletPackage& package(const std::string& name) const;
    /**
     * Stores the graph and one package per covenant input, named
     * "<name>/<node label>" plus "#<input>" for multi-input nodes.
     */
    void add_graph(const std::string& name, const CovenantGraph& graph);
    /** Searches the roots and nodes of the stored graphs. */
    std::optional<Transaction> find_transaction(const Hash256& id) const;

    ProofBundle prove_package(const std::string& name) const;
    /** Signs with the custodial secrets held for the package's deposit. */
    ProofBundle prove_reserves(const std::string& name, const Hash256& message) const;

    std::string to_json(bool include_secrets = true) const;
    /** Throws Error(Errc::proof) naming the first package whose evidence fails. */
    static CovenantWallet from_json(const std::string& text);
    static CovenantWallet load(const std::string& path);
    void save(const std::string& path) const;
};

/** $COVENANT_WALLET, else "covenant-wallet.json". */
std::string default_wallet_path();

} // namespace covenant

#endif // COVENANT_WALLET_HPP
