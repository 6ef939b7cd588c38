// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_COMPOSE_HPP
#define COVENANT_COMPOSE_HPP

#include <covenant/chainstate.hpp>
#include <covenant/mechanisms.hpp>
#include <covenant/proof.hpp>

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace covenant {

/** Pay-to-key wallet script `<K> CHECKSIG`, used for funding, fee and CPFP outputs. */
Script wallet_script(const PublicKey& key);
/** Fills the witness of a wallet input with a signature of the given type. */
void sign_wallet_input(Transaction& tx, std::size_t input_index, const PrivateKey& key, Amount amount,
                       SigHashType type = SigHashType::all());

/** One covenant transaction in a chain, described by what it pays besides the chain output. */
struct ChainLevel {
    Amount fee{Amount(1'000)};
    /** Outputs after output 0, e.g. an anchor for CPFP. */
    std::vector<TxOutput> extra_outputs;
    std::uint32_t locktime{0};
    std::uint32_t sequence{SEQUENCE_RBF};
    /** Defaults: ALL for deleted-key, ALL|NOINPUT for recovered-key. */
    std::optional<SigHashType> sighash;
};

struct ChainRequest {
    Mechanism mechanism{Mechanism::deleted_key};
    /** Enforcement threshold per deleted-key level. */
    int m{1};
    int n{1};
    CustodialPolicy custodial;
    Amount deposit_amount{Amount(1'000'000)};
    std::vector<ChainLevel> levels;
    /** Locking script of the last level's output 0. */
    Script final_locking_script;
    RecoveredStyle style{RecoveredStyle::nums};
    /** Optional refund path on every deposit (multi-deposit). */
    std::optional<RefundPath> refund;
};

/** Produces a (signed) deposit transaction paying `amount` to `address`. */
using DepositFactory = std::function<Transaction(const DepositAddress& address, Amount amount)>;

/**
 * Factory minting a funding output to `funder` on `chain` and returning a
 * signed deposit spending it. The deposit is not submitted. Both references
 * must outlive the factory.
 */
DepositFactory minting_factory(ChainState& chain, const PrivateKey& funder, Amount fee = Amount(1'000));

/** Covenant-specific data for one spent output of a node. */
struct NodeInput {
    /** Terms of the output being spent. */
    DepositSpec spec;
    Amount amount;
    std::size_t branch{0};
    /** Commitment signatures in key order; empty for ctv. */
    std::vector<CommitmentSignature> commitments;
    /** Seeded recovered-key commitments only. */
    std::optional<SignatureSeeds> seeds;
};

struct CovenantNode {
    std::string label;
    CovenantTemplate tmpl;
    /** One entry per covenant input; inputs past these are fee inputs. */
    std::vector<NodeInput> inputs;
};

enum class EdgeKind { txid, script_hash };

/** Child input `input` of node `child` spends output `vout` of a root or node. */
struct GraphEdge {
    bool from_root{false};
    std::size_t parent{0};
    std::uint32_t vout{0};
    std::size_t child{0};
    std::size_t input{0};
    EdgeKind kind{EdgeKind::txid};
    /** SHA256 of the spent witness script, the compatibility predicate of script-hash edges. */
    Hash256 script_hash;
};

struct CovenantGraph {
    Mechanism mechanism{Mechanism::deleted_key};
    /** Deposit transactions. */
    std::vector<Transaction> roots;
    std::vector<CovenantNode> nodes;
    std::vector<GraphEdge> edges;
    /** Deleted-key only: one per destroyed enforcement key. */
    std::vector<DeletionAttestation> attestations;

    /** Throws Error(Errc::graph) on cycles, dangling edges or non-SegWit parents with dependents. */
    void validate() const;
    /** Node indices, parents before children. */
    std::vector<std::size_t> topological_order() const;
    std::vector<std::size_t> children(std::size_t node) const;
    std::string to_json() const;
    std::string render_tree() const;
};

/**
 * Linear chain deposit -> C1 -> ... -> Ct. Deleted-key chains are signed top
 * down with txid edges once the deposit exists; recovered-key and ctv chains
 * are committed bottom up before the deposit is built.
 */
CovenantGraph build_chain(const ChainRequest& request, const DepositFactory& make_deposit, std::mt19937_64& rng);

/** Two alternative covenant transactions spending the same deposit output. */
CovenantGraph build_disjoint(const ChainRequest& request, const ChainLevel& branch_a, const ChainLevel& branch_b,
                             const DepositFactory& make_deposit, std::mt19937_64& rng);

/**
 * One covenant transaction with an input per deposit. request.levels holds
 * exactly one level describing the covenant; `deposits` deposits are created.
 */
CovenantGraph build_multi_deposit(const ChainRequest& request, std::size_t deposits, const DepositFactory& make_deposit,
                                  std::mt19937_64& rng);

/** Signed transaction for a node: custodial signatures plus stored commitments. */
Transaction finalize_node(const CovenantGraph& graph, std::size_t node, const std::vector<const PrivateKey*>& custodial_keys);

/** Spend of root output (root, vout) through its refund branch. */
Transaction refund_spend(const CovenantGraph& graph, std::size_t root, std::uint32_t vout, const PrivateKey& refund_key,
                         const Script& destination, Amount fee);

/** Appends a pure fee input (no change) to a node's template. */
void add_fee_input(CovenantGraph& graph, std::size_t node, const OutPoint& outpoint, SigHashType type = SigHashType::all());

/** Points every child input of `node` at the node's current txid. */
void repoint_children(CovenantGraph& graph, std::size_t node);

/** Witness-serialized size with worst-case 73-byte signatures in every slot. */
std::size_t estimate_spend_size(const Transaction& tx, const std::vector<DepositSpec>& input_specs);

struct VariantCounts {
    std::uint64_t chains{0};
    /** Distinct transactions that must be pre-signed. */
    std::uint64_t prepared{0};
};

/** p^t chains; deleted-key prepares sum p^i, the others p*t. */
VariantCounts variant_counts(Mechanism mechanism, std::uint64_t p, std::uint64_t t);

struct FeeVariantSet {
    std::size_t p{0};
    std::size_t t{0};
    /** Linear graphs, one per combination of per-level feerates, all spending the same deposit. */
    std::vector<CovenantGraph> chains;
    /** Feerate index chosen at each level, per chain. */
    std::vector<std::vector<std::size_t>> choices;
    std::size_t prepared_transactions{0};
    /** Total witness-serialized bytes of the prepared transactions. */
    std::size_t aggregate_bytes{0};
};

constexpr std::uint64_t DEFAULT_VARIANT_CAP = 4'096;

/**
 * Every p^t chain with level fees feerate * estimated size. Throws
 * Error(Errc::fee) naming the count when p^t exceeds `cap`.
 */
FeeVariantSet enumerate_fee_variants(const ChainRequest& request, const std::vector<std::uint64_t>& feerates,
                                     const DepositFactory& make_deposit, std::mt19937_64& rng,
                                     std::uint64_t cap = DEFAULT_VARIANT_CAP);

struct WalletOutput {
    OutPoint outpoint;
    Amount amount;
    /** Signs the output; must match the wallet_script paid by the parent. */
    const PrivateKey* key{nullptr};
};

constexpr std::uint64_t MIN_RELAY_FEERATE = 1;

/**
 * Child spending `wallet` (an output of `parent`) back to `destination`, with
 * fee max(min relay, target * (size(parent) + size(child)) - parent_fee).
 * Throws Error(Errc::fee) when the wallet output cannot cover it.
 */
Transaction cpfp_child(const Transaction& parent, Amount parent_fee, std::uint64_t target_feerate,
                       const WalletOutput& wallet, const Script& destination);

/**
 * Fresh transaction whose input 0 and output 0 are the signed input and its
 * matching output, followed by the extra inputs and outputs. Models replay of
 * an ANYONECANPAY|SINGLE signature.
 */
Transaction replay_signed_input(const Transaction& signed_tx, std::size_t input_index,
                                const std::vector<TxInput>& extra_inputs, const std::vector<TxOutput>& extra_outputs);

} // namespace covenant

#endif // COVENANT_COMPOSE_HPP
