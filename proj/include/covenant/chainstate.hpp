// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_CHAINSTATE_HPP
#define COVENANT_CHAINSTATE_HPP

#include <covenant/interpreter.hpp>
#include <covenant/transaction.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace covenant {

enum class RejectReason {
    none,
    missing_utxo,
    bad_script,
    bad_sig,
    ctv_mismatch,
    timelock,
    negative_fee,
    double_spend,
    malformed,
    duplicate,
};

/** Machine-readable reason, e.g. "missing-utxo". */
std::string_view to_string(RejectReason reason);

struct Validation {
    RejectReason reason{RejectReason::none};
    std::string detail;
    Amount fee;
    std::size_t size{0};
    /** Signature operations executed across all inputs. */
    int sigops{0};

    bool accepted() const { return reason == RejectReason::none; }
};

struct Coin {
    TxOutput output;
    /** Height of the block that created it. */
    std::uint32_t height{0};
};

struct Block {
    std::uint32_t height{0};
    std::vector<Hash256> txids;
    std::size_t size{0};
    Amount fees;
};

struct MempoolEntry {
    Transaction tx;
    Hash256 txid;
    Amount fee;
    std::size_t size{0};
};

enum class MempoolStatus { accepted, replaced, rejected };

struct MempoolResult {
    MempoolStatus status{MempoolStatus::rejected};
    Validation validation;
    /** Transactions evicted by a replacement (conflicts and their descendants). */
    std::vector<Hash256> evicted;

    bool ok() const { return status != MempoolStatus::rejected; }
};

/** fee_a / size_a compared with fee_b / size_b without rounding. */
int compare_feerate(Amount fee_a, std::size_t size_a, Amount fee_b, std::size_t size_b);

struct ChainParams {
    /** Depth at which a transaction counts as confirmed. */
    std::uint32_t confirmation_depth{6};
    /** Value added to the UTXO set per mined block. Fees are not re-issued. */
    Amount block_subsidy;
};

/**
 * Single-node consensus state: UTXO set, spent-outpoint history, blocks and a
 * mempool with fee-based replacement. Single writer; copies are independent
 * snapshots.
 */
class ChainState
{
public:
    explicit ChainState(ChainParams params = {}) : m_params(params) {}

    const ChainParams& params() const { return m_params; }
    /** Height of the tip; 0 before any block. */
    std::uint32_t height() const { return m_height; }
    const std::vector<Block>& blocks() const { return m_blocks; }

    /**
     * Faucet: mines a block holding a single input-less transaction paying
     * `outputs`. Returns that transaction.
     */
    Transaction mint(const std::vector<TxOutput>& outputs);

    /** Consensus rules against the confirmed UTXO set only. */
    Validation check_tx(const Transaction& tx) const;

    MempoolResult accept_to_mempool(const Transaction& tx);

    /** Ancestor-package feerate selection up to capacity_bytes, then connects the block. */
    Block mine_block(std::size_t capacity_bytes = 1'000'000);
    /** mine_block repeated `count` times. */
    void mine_blocks(std::uint32_t count, std::size_t capacity_bytes = 1'000'000);

    std::optional<Coin> coin(const OutPoint& outpoint) const;
    bool is_spent(const OutPoint& outpoint) const { return m_spent.count(outpoint) != 0; }
    /** tip - inclusion height + 1, or 0 when not mined. */
    std::uint32_t confirmations(const Hash256& txid) const;
    bool is_confirmed(const Hash256& txid) const { return confirmations(txid) >= m_params.confirmation_depth; }

    bool in_mempool(const Hash256& txid) const { return m_mempool.count(txid) != 0; }
    std::vector<MempoolEntry> mempool() const;
    const std::map<OutPoint, Coin>& utxos() const { return m_utxos; }
    Amount total_utxo_value() const;

    /** UTXO set, spent outpoints, heights, blocks and mempool. */
    std::string to_json() const;
    static ChainState from_json(const std::string& text);
    /** One JSON object per line per block. */
    std::string block_log() const;

private:
    struct CoinView;

    Validation validate(const Transaction& tx, const CoinView& view, std::uint32_t next_height) const;
    void connect(const Transaction& tx, std::uint32_t height);
    std::set<Hash256> descendants(const std::set<Hash256>& roots) const;
    void remove_from_mempool(const Hash256& txid);

    ChainParams m_params;
    std::uint32_t m_height{0};
    std::uint64_t m_mint_counter{0};
    std::map<OutPoint, Coin> m_utxos;
    std::map<OutPoint, Hash256> m_spent;
    std::map<Hash256, std::uint32_t> m_tx_heights;
    std::vector<Block> m_blocks;
    std::map<Hash256, MempoolEntry> m_mempool;
    std::map<OutPoint, Hash256> m_mempool_spends;
};

} // namespace covenant

#endif // COVENANT_CHAINSTATE_HPP
