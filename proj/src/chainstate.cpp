// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/chainstate.hpp>
#include <covenant/hash.hpp>

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <sstream>

namespace covenant {

using json = nlohmann::json;

std::string_view to_string(RejectReason reason)
{
    switch (reason) {
    case RejectReason::none: return "accepted";
    case RejectReason::missing_utxo: return "missing-utxo";
    case RejectReason::bad_script: return "bad-script";
    case RejectReason::bad_sig: return "bad-sig";
    case RejectReason::ctv_mismatch: return "ctv-mismatch";
    case RejectReason::timelock: return "timelock";
    case RejectReason::negative_fee: return "negative-fee";
    case RejectReason::double_spend: return "double-spend";
    case RejectReason::malformed: return "malformed";
    case RejectReason::duplicate: return "duplicate";
    }
    return "unknown";
}

int compare_feerate(Amount fee_a, std::size_t size_a, Amount fee_b, std::size_t size_b)
{
    const auto lhs = static_cast<unsigned __int128>(fee_a.sats()) * size_b;
    const auto rhs = static_cast<unsigned __int128>(fee_b.sats()) * size_a;
    return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

/** Coins visible to a validation: confirmed UTXOs plus optional mempool outputs. */
struct ChainState::CoinView {
    const ChainState& state;
    bool with_mempool;
    std::uint32_t next_height;

    std::optional<Coin> get(const OutPoint& op) const
    {
        if (auto c = state.coin(op)) return c;
        if (!with_mempool) return std::nullopt;
        auto it = state.m_mempool.find(op.txid);
        if (it == state.m_mempool.end() || op.vout >= it->second.tx.outputs.size()) return std::nullopt;
        return Coin{it->second.tx.outputs[op.vout], next_height};
    }
};

namespace {

Validation reject(RejectReason reason, std::string detail)
{
    Validation v;
    v.reason = reason;
    v.detail = std::move(detail);
    return v;
}

RejectReason classify(const ExecResult& r)
{
    switch (r.error) {
    case ScriptError::template_mismatch:
    case ScriptError::template_size:
        return RejectReason::ctv_mismatch;
    case ScriptError::unsatisfied_locktime:
    case ScriptError::negative_locktime:
        return RejectReason::timelock;
    case ScriptError::checksigverify:
    case ScriptError::checkmultisigverify:
        return RejectReason::bad_sig;
    case ScriptError::eval_false:
        return r.failed_sig_check ? RejectReason::bad_sig : RejectReason::bad_script;
    default:
        return RejectReason::bad_script;
    }
}

} // namespace

Transaction ChainState::mint(const std::vector<TxOutput>& outputs)
{
    if (outputs.empty()) throw Error(Errc::amount, "mint needs at least one output");
    Transaction tx;
    tx.outputs = outputs;
    tx.locktime = static_cast<std::uint32_t>(m_mint_counter++);
    const Hash256 id = txid(tx);
    const std::uint32_t h = m_height + 1;
    for (std::uint32_t i = 0; i < outputs.size(); ++i) m_utxos[OutPoint{id, i}] = Coin{outputs[i], h};
    m_tx_heights[id] = h;
    m_blocks.push_back(Block{h, {id}, tx_size(tx), Amount{}});
    m_height = h;
    return tx;
}

std::optional<Coin> ChainState::coin(const OutPoint& outpoint) const
{
    auto it = m_utxos.find(outpoint);
    if (it == m_utxos.end()) return std::nullopt;
    return it->second;
}

std::uint32_t ChainState::confirmations(const Hash256& id) const
{
    auto it = m_tx_heights.find(id);
    if (it == m_tx_heights.end()) return 0;
    return m_height - it->second + 1;
}

Amount ChainState::total_utxo_value() const
{
    Amount total;
    for (const auto& [op, c] : m_utxos) total += c.output.amount;
    return total;
}

std::vector<MempoolEntry> ChainState::mempool() const
{
    std::vector<MempoolEntry> out;
    for (const auto& [id, e] : m_mempool) out.push_back(e);
    return out;
}

Validation ChainState::validate(const Transaction& tx, const CoinView& view, std::uint32_t next_height) const
{
    if (tx.inputs.empty()) return reject(RejectReason::malformed, "transaction has no inputs");
    if (tx.outputs.empty()) return reject(RejectReason::malformed, "transaction has no outputs");
    std::size_t size = 0;
    try {
        size = tx_size(tx);
    } catch (const Error& e) {
        return reject(RejectReason::malformed, e.what());
    }
    std::set<OutPoint> seen;
    for (const auto& in : tx.inputs) {
        if (!seen.insert(in.previous).second) {
            return reject(RejectReason::double_spend, "input " + in.previous.to_string() + " spent twice in one transaction");
        }
    }

    std::vector<Coin> coins;
    Amount in_total;
    for (const auto& in : tx.inputs) {
        auto c = view.get(in.previous);
        if (!c) {
            if (is_spent(in.previous)) {
                return reject(RejectReason::double_spend, "outpoint " + in.previous.to_string() + " already spent");
            }
            return reject(RejectReason::missing_utxo, "outpoint " + in.previous.to_string() + " not found");
        }
        in_total += c->output.amount;
        coins.push_back(*c);
    }
    Amount out_total;
    try {
        out_total = tx.total_output();
    } catch (const Error& e) {
        return reject(RejectReason::malformed, e.what());
    }
    if (out_total > in_total) {
        return reject(RejectReason::negative_fee, "outputs " + std::to_string(out_total.sats()) +
                                                      " exceed inputs " + std::to_string(in_total.sats()));
    }

    // Absolute locktime is enforced only when some input opts in.
    const bool locktime_active = std::any_of(tx.inputs.begin(), tx.inputs.end(),
                                             [](const TxInput& in) { return in.sequence != SEQUENCE_FINAL; });
    if (tx.locktime != 0 && locktime_active && tx.locktime >= next_height) {
        return reject(RejectReason::timelock, "locktime " + std::to_string(tx.locktime) + " not reached at height " +
                                                  std::to_string(next_height - 1));
    }
    if (tx.version >= 2) {
        for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
            const std::uint32_t seq = tx.inputs[i].sequence;
            if (seq & (1u << 31)) continue;
            const std::uint64_t needed = static_cast<std::uint64_t>(coins[i].height) + (seq & 0xffff);
            if (next_height < needed) {
                return reject(RejectReason::timelock, "input " + std::to_string(i) + " relative lock not reached");
            }
        }
    }

    Validation v;
    v.size = size;
    v.fee = in_total - out_total;
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const TransactionChecker checker(tx, i, coins[i].output.amount);
        const ExecResult r = verify_witness_input(tx.inputs[i].witness, coins[i].output.locking_script, checker);
        v.sigops += r.sigops;
        if (!r.ok()) {
            Validation bad = reject(classify(r), "input " + std::to_string(i) + ": " + std::string(to_string(r.error)));
            bad.sigops = v.sigops;
            return bad;
        }
    }
    return v;
}

Validation ChainState::check_tx(const Transaction& tx) const
{
    const CoinView view{*this, false, m_height + 1};
    return validate(tx, view, m_height + 1);
}

std::set<Hash256> ChainState::descendants(const std::set<Hash256>& roots) const
{
    std::set<Hash256> out = roots;
    std::vector<Hash256> work(roots.begin(), roots.end());
    while (!work.empty()) {
        const Hash256 id = work.back();
        work.pop_back();
        auto it = m_mempool.find(id);
        if (it == m_mempool.end()) continue;
        for (std::uint32_t i = 0; i < it->second.tx.outputs.size(); ++i) {
            auto sp = m_mempool_spends.find(OutPoint{id, i});
            if (sp != m_mempool_spends.end() && out.insert(sp->second).second) work.push_back(sp->second);
        }
    }
    return out;
}

void ChainState::remove_from_mempool(const Hash256& id)
{
    auto it = m_mempool.find(id);
    if (it == m_mempool.end()) return;
    for (const auto& in : it->second.tx.inputs) {
        auto sp = m_mempool_spends.find(in.previous);
        if (sp != m_mempool_spends.end() && sp->second == id) m_mempool_spends.erase(sp);
    }
    m_mempool.erase(it);
}

MempoolResult ChainState::accept_to_mempool(const Transaction& tx)
{
    MempoolResult result;
    const Hash256 id = txid(tx);
    if (m_mempool.count(id) || m_tx_heights.count(id)) {
        result.validation = reject(RejectReason::duplicate, "transaction " + id.display_hex() + " already known");
        return result;
    }

    std::set<Hash256> conflicts;
    for (const auto& in : tx.inputs) {
        auto sp = m_mempool_spends.find(in.previous);
        if (sp != m_mempool_spends.end()) conflicts.insert(sp->second);
    }
    const std::set<Hash256> evicted = descendants(conflicts);
    for (const auto& in : tx.inputs) {
        if (evicted.count(in.previous.txid)) {
            result.validation = reject(RejectReason::missing_utxo,
                                       "input " + in.previous.to_string() + " is created by a transaction it replaces");
            return result;
        }
    }

    const CoinView view{*this, true, m_height + 1};
    result.validation = validate(tx, view, m_height + 1);
    if (!result.validation.accepted()) return result;

    if (!conflicts.empty()) {
        Amount evicted_fees;
        for (const auto& c : conflicts) {
            const MempoolEntry& old = m_mempool.at(c);
            if (!old.tx.signals_rbf()) {
                result.validation = reject(RejectReason::double_spend, "conflicts with non-replaceable " + c.display_hex());
                return result;
            }
            if (compare_feerate(result.validation.fee, result.validation.size, old.fee, old.size) <= 0) {
                result.validation = reject(RejectReason::double_spend,
                                           "replacement feerate not above " + c.display_hex());
                return result;
            }
        }
        for (const auto& e : evicted) evicted_fees += m_mempool.at(e).fee;
        if (result.validation.fee <= evicted_fees) {
            result.validation = reject(RejectReason::double_spend, "replacement absolute fee " +
                                                                       std::to_string(result.validation.fee.sats()) +
                                                                       " not above " + std::to_string(evicted_fees.sats()));
            return result;
        }
        for (const auto& e : evicted) remove_from_mempool(e);
        result.evicted.assign(evicted.begin(), evicted.end());
        result.status = MempoolStatus::replaced;
    } else {
        result.status = MempoolStatus::accepted;
    }

    for (const auto& in : tx.inputs) m_mempool_spends[in.previous] = id;
    m_mempool[id] = MempoolEntry{tx, id, result.validation.fee, result.validation.size};
    return result;
}

void ChainState::connect(const Transaction& tx, std::uint32_t height)
{
    const Hash256 id = txid(tx);
    for (const auto& in : tx.inputs) {
        m_utxos.erase(in.previous);
        m_spent[in.previous] = id;
    }
    for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) m_utxos[OutPoint{id, i}] = Coin{tx.outputs[i], height};
    m_tx_heights[id] = height;
}

Block ChainState::mine_block(std::size_t capacity_bytes)
{
    // Unselected in-mempool ancestors of `id`, parents first.
    std::set<Hash256> selected;
    std::function<void(const Hash256&, std::vector<Hash256>&, std::set<Hash256>&)> collect =
        [&](const Hash256& tx_id, std::vector<Hash256>& order, std::set<Hash256>& seen) {
            if (selected.count(tx_id) || !seen.insert(tx_id).second) return;
            for (const auto& in : m_mempool.at(tx_id).tx.inputs) {
                if (m_mempool.count(in.previous.txid)) collect(in.previous.txid, order, seen);
            }
            order.push_back(tx_id);
        };

    Block block;
    block.height = m_height + 1;
    std::vector<Hash256> included;
    std::set<Hash256> skipped;
    for (;;) {
        std::optional<std::vector<Hash256>> best;
        Amount best_fee;
        std::size_t best_size = 0;
        Hash256 best_id;
        for (const auto& [tx_id, entry] : m_mempool) {
            if (selected.count(tx_id) || skipped.count(tx_id)) continue;
            std::vector<Hash256> package;
            std::set<Hash256> seen;
            collect(tx_id, package, seen);
            Amount fee;
            std::size_t size = 0;
            for (const auto& p : package) {
                fee += m_mempool.at(p).fee;
                size += m_mempool.at(p).size;
            }
            const int cmp = best ? compare_feerate(fee, size, best_fee, best_size) : 1;
            if (cmp > 0 || (cmp == 0 && tx_id < best_id)) {
                best = std::move(package);
                best_fee = fee;
                best_size = size;
                best_id = tx_id;
            }
        }
        if (!best) break;
        if (block.size + best_size > capacity_bytes) {
            skipped.insert(best_id);
            continue;
        }
        for (const auto& p : *best) {
            selected.insert(p);
            included.push_back(p);
        }
        block.size += best_size;
        block.fees += best_fee;
    }

    for (const auto& tx_id : included) {
        const Transaction tx = m_mempool.at(tx_id).tx;
        connect(tx, block.height);
        remove_from_mempool(tx_id);
    }
    block.txids = included;
    m_height = block.height;
    m_blocks.push_back(block);
    if (m_params.block_subsidy.sats() > 0) {
        Transaction reward;
        reward.outputs.push_back(TxOutput{m_params.block_subsidy, Script{}});
        reward.locktime = block.height;
        const Hash256 rid = txid(reward);
        m_utxos[OutPoint{rid, 0}] = Coin{reward.outputs[0], block.height};
        m_tx_heights[rid] = block.height;
    }
    return block;
}

void ChainState::mine_blocks(std::uint32_t count, std::size_t capacity_bytes)
{
    for (std::uint32_t i = 0; i < count; ++i) mine_block(capacity_bytes);
}

namespace {

json outpoint_json(const OutPoint& op) { return json{{"txid", op.txid.display_hex()}, {"vout", op.vout}}; }

OutPoint outpoint_from_json(const json& j)
{
    return OutPoint{Hash256::from_display_hex(j.at("txid").get<std::string>()), j.at("vout").get<std::uint32_t>()};
}

json block_json(const Block& b)
{
    json txids = json::array();
    for (const auto& t : b.txids) txids.push_back(t.display_hex());
    return json{{"height", b.height}, {"txids", txids}, {"size", b.size}, {"fees", b.fees.sats()}};
}

} // namespace

std::string ChainState::to_json() const
{
    json j;
    j["format"] = 1;
    j["height"] = m_height;
    j["confirmation_depth"] = m_params.confirmation_depth;
    j["block_subsidy"] = m_params.block_subsidy.sats();
    j["mint_counter"] = m_mint_counter;
    json utxos = json::array();
    for (const auto& [op, c] : m_utxos) {
        json u = outpoint_json(op);
        u["amount"] = c.output.amount.sats();
        u["script"] = to_hex(c.output.locking_script.bytes());
        u["height"] = c.height;
        utxos.push_back(u);
    }
    j["utxos"] = utxos;
    json spent = json::array();
    for (const auto& [op, by] : m_spent) {
        json s = outpoint_json(op);
        s["spent_by"] = by.display_hex();
        spent.push_back(s);
    }
    j["spent"] = spent;
    json heights = json::object();
    for (const auto& [id, h] : m_tx_heights) heights[id.display_hex()] = h;
    j["tx_heights"] = heights;
    json blocks = json::array();
    for (const auto& b : m_blocks) blocks.push_back(block_json(b));
    j["blocks"] = blocks;
    json pool = json::array();
    for (const auto& [id, e] : m_mempool) pool.push_back(to_hex(serialize(e.tx, true)));
    j["mempool"] = pool;
    return j.dump(2);
}

ChainState ChainState::from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.byte, "invalid chain state JSON");
    }
    try {
        if (j.at("format").get<int>() != 1) throw Error(Errc::parse, "unsupported chain state format");
        ChainParams params;
        params.confirmation_depth = j.at("confirmation_depth").get<std::uint32_t>();
        params.block_subsidy = Amount(j.at("block_subsidy").get<std::uint64_t>());
        ChainState st(params);
        st.m_height = j.at("height").get<std::uint32_t>();
        st.m_mint_counter = j.at("mint_counter").get<std::uint64_t>();
        for (const auto& u : j.at("utxos")) {
            st.m_utxos[outpoint_from_json(u)] =
                Coin{TxOutput{Amount(u.at("amount").get<std::uint64_t>()), Script(from_hex(u.at("script").get<std::string>()))},
                     u.at("height").get<std::uint32_t>()};
        }
        for (const auto& s : j.at("spent")) {
            st.m_spent[outpoint_from_json(s)] = Hash256::from_display_hex(s.at("spent_by").get<std::string>());
        }
        for (const auto& [id, h] : j.at("tx_heights").items()) st.m_tx_heights[Hash256::from_display_hex(id)] = h.get<std::uint32_t>();
        for (const auto& b : j.at("blocks")) {
            Block blk;
            blk.height = b.at("height").get<std::uint32_t>();
            blk.size = b.at("size").get<std::size_t>();
            blk.fees = Amount(b.at("fees").get<std::uint64_t>());
            for (const auto& t : b.at("txids")) blk.txids.push_back(Hash256::from_display_hex(t.get<std::string>()));
            st.m_blocks.push_back(std::move(blk));
        }
        // Replay the mempool so parents are admitted before children.
        std::vector<Transaction> pending;
        for (const auto& hex : j.at("mempool")) pending.push_back(deserialize(from_hex(hex.get<std::string>())));
        bool progress = true;
        while (!pending.empty() && progress) {
            progress = false;
            for (auto it = pending.begin(); it != pending.end();) {
                if (st.accept_to_mempool(*it).ok()) {
                    it = pending.erase(it);
                    progress = true;
                } else {
                    ++it;
                }
            }
        }
        if (!pending.empty()) throw Error(Errc::parse, "chain state mempool contains invalid transactions");
        return st;
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("chain state JSON: ") + e.what());
    }
}

std::string ChainState::block_log() const
{
    std::ostringstream out;
    for (const auto& b : m_blocks) out << block_json(b).dump() << '\n';
    return out.str();
}

} // namespace covenant
