// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/protocol.hpp>
#include <covenant/serde.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace covenant {

using serde::json;

std::string_view to_string(Deviation::Kind kind)
{
    switch (kind) {
    case Deviation::Kind::stall: return "stall";
    case Deviation::Kind::leak_key: return "leak-key";
    case Deviation::Kind::withhold_signature: return "withhold-signature";
    case Deviation::Kind::withhold_forwarding: return "withhold-forwarding";
    case Deviation::Kind::abort_deposit: return "abort-deposit";
    }
    return "unknown";
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::covenant_active: return "covenant-active";
    case Outcome::funds_at_risk: return "funds-at-risk";
    case Outcome::aborted: return "aborted";
    }
    return "unknown";
}

void Scenario::validate() const
{
    if (m < 1 || m > n || n > MAX_MULTISIG_KEYS) {
        throw Error(Errc::protocol, "enforcement policy " + std::to_string(m) + "-of-" + std::to_string(n) + " is invalid");
    }
    if (threshold < 1 || threshold > custodians || custodians > MAX_MULTISIG_KEYS) {
        throw Error(Errc::protocol, "custodial policy " + std::to_string(threshold) + "-of-" + std::to_string(custodians) +
                                        " is invalid");
    }
    if (amount.sats() <= 2'000) throw Error(Errc::protocol, "deposit amount must exceed the 2000 sat fees");
    for (const auto& d : adversary) {
        const bool per_enforcer = d.kind == Deviation::Kind::stall || d.kind == Deviation::Kind::leak_key ||
                                  d.kind == Deviation::Kind::withhold_signature;
        if (per_enforcer && (d.enforcer < 0 || d.enforcer >= n)) {
            throw Error(Errc::protocol, std::string(to_string(d.kind)) + " names enforcer " + std::to_string(d.enforcer) +
                                            " but only " + std::to_string(n) + " exist");
        }
        for (int c : d.custodians) {
            if (c < 0 || c >= custodians) throw Error(Errc::protocol, "withhold-forwarding names unknown custodian " + std::to_string(c));
        }
    }
}

namespace {

Deviation::Kind deviation_kind(const std::string& s)
{
    for (auto k : {Deviation::Kind::stall, Deviation::Kind::leak_key, Deviation::Kind::withhold_signature,
                   Deviation::Kind::withhold_forwarding, Deviation::Kind::abort_deposit}) {
        if (to_string(k) == s) return k;
    }
    throw Error(Errc::parse, "unknown adversary action '" + s + "'");
}

} // namespace

Scenario scenario_from_json(const std::string& text)
{
    const json j = serde::parse(text);
    serde::require_format(j, "scenario");
    try {
        Scenario s;
        s.m = j.at("policy").at("m").get<int>();
        s.n = j.at("policy").at("n").get<int>();
        s.custodians = j.at("custodians").get<int>();
        s.threshold = j.at("threshold").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("amount")) s.amount = Amount(j.at("amount").get<std::uint64_t>());
        if (j.contains("confirmation_depth")) s.confirmation_depth = j.at("confirmation_depth").get<std::uint32_t>();
        if (j.contains("timeout")) s.timeout = j.at("timeout").get<std::uint64_t>();
        if (j.contains("lifetime_threshold")) s.lifetime_threshold = j.at("lifetime_threshold").get<std::uint64_t>();
        for (const auto& a : j.value("adversary", json::array())) {
            Deviation d;
            d.kind = deviation_kind(a.at("action").get<std::string>());
            d.enforcer = a.value("enforcer", -1);
            if (a.contains("duration")) {
                if (a.at("duration").is_string()) {
                    if (a.at("duration") != "indefinite") throw Error(Errc::parse, "stall duration must be a number or \"indefinite\"");
                } else {
                    d.duration = a.at("duration").get<std::uint64_t>();
                }
            }
            if (a.contains("custodians")) d.custodians = a.at("custodians").get<std::vector<int>>();
            s.adversary.push_back(d);
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("scenario: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& s)
{
    json adv = json::array();
    for (const auto& d : s.adversary) {
        json a{{"action", std::string(to_string(d.kind))}};
        if (d.enforcer >= 0) a["enforcer"] = d.enforcer;
        if (d.kind == Deviation::Kind::stall) {
            if (d.duration) {
                a["duration"] = *d.duration;
            } else {
                a["duration"] = "indefinite";
            }
        }
        if (!d.custodians.empty()) a["custodians"] = d.custodians;
        adv.push_back(a);
    }
    json j{{"format", 1},
           {"policy", {{"m", s.m}, {"n", s.n}}},
           {"custodians", s.custodians},
           {"threshold", s.threshold},
           {"seed", s.seed},
           {"amount", s.amount.sats()},
           {"confirmation_depth", s.confirmation_depth},
           {"timeout", s.timeout},
           {"lifetime_threshold", s.lifetime_threshold},
           {"adversary", adv}};
    return j.dump(2);
}

std::string ProtocolTrace::to_json_lines() const
{
    std::ostringstream out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        json line = e.fields.empty() ? json::object() : json::parse(e.fields);
        line["t"] = e.time;
        line["seq"] = i;
        line["event"] = e.kind;
        line["actor"] = e.actor;
        out << line.dump() << '\n';
    }
    return out.str();
}

namespace {

constexpr std::uint64_t FEE = 1'000;

struct KeyHeld {
    PrivateKey key;
};
struct KeyDestroyed {
    DeletionAttestation attestation;
};
/** An enforcer either holds its key or holds only the attestation of its destruction. */
using KeyState = std::variant<KeyHeld, KeyDestroyed>;

struct PubkeyMsg {
    int enforcer;
    PublicKey key;
};
/** Exactly the transaction ID, output index and output amount. */
struct DepositDetails {
    Hash256 txid;
    std::uint32_t vout;
    Amount amount;
};
struct CommitmentMsg {
    int enforcer;
    CommitmentSignature signature;
    DeletionAttestation attestation;
};
struct PackageMsg {
    CovenantPackage package;
};
using Payload = std::variant<PubkeyMsg, DepositDetails, CommitmentMsg, PackageMsg>;

struct Envelope {
    std::uint64_t deliver_at;
    std::string from;
    std::string to;
    Payload payload;
};

struct Enforcer {
    std::string id;
    KeyState key;
    PublicKey pub;
    std::uint64_t keygen_time{0};
    std::map<int, PublicKey> peers;
    std::optional<DepositDetails> pending;
};

struct Custodian {
    std::string id;
    PrivateKey key;
    std::map<Hash256, CovenantPackage> partial;
    std::optional<CovenantPackage> complete;
};

std::string enforcer_id(int i) { return "enforcer-" + std::to_string(i); }
std::string custodian_id(int i) { return "custodian-" + std::to_string(i); }

class Simulation
{
public:
    explicit Simulation(const Scenario& sc) : m_sc(sc), m_rng(sc.seed)
    {
        m_sc.validate();
        ChainParams params;
        params.confirmation_depth = sc.confirmation_depth;
        m_trace.chain = ChainState(params);
    }

    ProtocolTrace run()
    {
        setup();
        while (!m_queue.empty()) {
            const std::uint64_t t = std::min_element(m_queue.begin(), m_queue.end(), [](const Envelope& a, const Envelope& b) {
                                        return a.deliver_at < b.deliver_at;
                                    })->deliver_at;
            if (!m_broadcast && !m_abandoned && t > m_sc.timeout) fire_timeout();
            std::vector<Envelope> batch;
            for (auto it = m_queue.begin(); it != m_queue.end();) {
                if (it->deliver_at == t) {
                    batch.push_back(std::move(*it));
                    it = m_queue.erase(it);
                } else {
                    ++it;
                }
            }
            std::shuffle(batch.begin(), batch.end(), m_rng);
            m_now = t;
            for (auto& env : batch) deliver(env);
        }
        if (!m_broadcast && !m_abandoned) fire_timeout();
        finish();
        return std::move(m_trace);
    }

private:
    void event(const std::string& kind, const std::string& actor, json fields = json::object())
    {
        m_trace.events.push_back(TraceEvent{m_now, kind, actor, fields.dump()});
    }

    const Deviation* deviation(Deviation::Kind kind, int enforcer = -1) const
    {
        for (const auto& d : m_sc.adversary) {
            if (d.kind == kind && (enforcer < 0 || d.enforcer == enforcer)) return &d;
        }
        return nullptr;
    }

    void send(const std::string& from, const std::string& to, Payload payload, std::uint64_t delay = 1)
    {
        m_queue.push_back(Envelope{m_now + delay, from, to, std::move(payload)});
    }

    void setup()
    {
        m_now = 0;
        for (int i = 0; i < m_sc.custodians; ++i) {
            m_custodians.push_back(Custodian{custodian_id(i), PrivateKey::generate(m_rng), {}, std::nullopt});
        }
        for (const auto& c : m_custodians) m_cust_policy.keys.push_back(c.key.public_key());
        m_cust_policy.j = m_sc.threshold;
        m_cust_policy.k = m_sc.custodians;

        // Pre-agreed template output: custodial control after a relative delay.
        m_vault_script = Script().push_int(144).op(OP_CHECKSEQUENCEVERIFY).op(OP_DROP).append(custodial_clause(m_cust_policy));

        m_depositor_key.emplace(PrivateKey::generate(m_rng));
        m_funding_script = Script().push(m_depositor_key->public_key().view()).op(OP_CHECKSIG);
        const Transaction mint = m_trace.chain.mint({TxOutput{m_sc.amount + Amount(FEE), p2wsh_address(m_funding_script)}});
        m_funding = OutPoint{txid(mint), 0};
        event("funding-minted", "depositor", {{"outpoint", m_funding.to_string()}, {"amount", (m_sc.amount + Amount(FEE)).sats()}});

        // Step 1: key generation; public keys go to the depositor and the other enforcers.
        for (int i = 0; i < m_sc.n; ++i) {
            PrivateKey key = PrivateKey::generate(m_rng);
            const PublicKey pub = key.public_key();
            m_enforcers.push_back(Enforcer{enforcer_id(i), KeyHeld{std::move(key)}, pub, m_now, {}, std::nullopt});
            m_enforcers.back().peers.emplace(i, pub);
            event("keygen", enforcer_id(i), {{"key", pub.fingerprint()}});
        }
        for (int i = 0; i < m_sc.n; ++i) {
            std::uint64_t delay = 1;
            if (const Deviation* d = deviation(Deviation::Kind::stall, i)) {
                if (!d->duration) {
                    event("stall", enforcer_id(i), {{"duration", "indefinite"}});
                    continue;
                }
                delay += *d->duration;
                event("stall", enforcer_id(i), {{"duration", *d->duration}});
            }
            const PubkeyMsg msg{i, m_enforcers[i].pub};
            send(enforcer_id(i), "depositor", msg, delay);
            for (int k = 0; k < m_sc.n; ++k) {
                if (k != i) send(enforcer_id(i), enforcer_id(k), msg, delay);
            }
        }
    }

    void deliver(Envelope& env)
    {
        if (m_abandoned) {
            event("message-dropped", env.to, {{"from", env.from}});
            return;
        }
        std::visit([&](auto& p) { handle(env, p); }, env.payload);
    }

    DepositSpec spec_from(const std::map<int, PublicKey>& keys) const
    {
        DepositSpec spec;
        spec.mechanism = Mechanism::deleted_key;
        EnforcementPolicy policy{m_sc.m, m_sc.n, {}};
        for (const auto& [i, k] : keys) policy.keys.push_back(k);
        spec.enforcement = policy;
        spec.custodial = m_cust_policy;
        return spec;
    }

    CovenantTemplate template_for(const DepositDetails& d) const
    {
        Transaction tx;
        tx.inputs.push_back(TxInput{OutPoint{d.txid, d.vout}, SEQUENCE_RBF, {}});
        tx.outputs.push_back(TxOutput{d.amount - Amount(FEE), p2wsh_address(m_vault_script)});
        return make_template(tx, Mechanism::deleted_key, SigHashType::all());
    }

    // Step 2 and 3 at the depositor; step 1 bookkeeping at enforcers.
    void handle(const Envelope& env, const PubkeyMsg& msg)
    {
        if (env.to == "depositor") {
            m_received_keys.emplace(msg.enforcer, msg.key);
            event("pubkey-received", "depositor", {{"from", env.from}, {"key", msg.key.fingerprint()}});
            if (static_cast<int>(m_received_keys.size()) == m_sc.n && !m_spec) build_deposit();
            return;
        }
        Enforcer& e = enforcer(env.to);
        e.peers.emplace(msg.enforcer, msg.key);
        if (e.pending && static_cast<int>(e.peers.size()) == m_sc.n) sign_and_delete(e);
    }

    void build_deposit()
    {
        m_spec = spec_from(m_received_keys);
        const DepositAddress addr = deposit_address(*m_spec);
        Transaction tx;
        tx.inputs.push_back(TxInput{m_funding, SEQUENCE_FINAL, {}});
        tx.outputs.push_back(TxOutput{m_sc.amount, addr.locking_script});
        m_deposit_tx = tx;
        const DepositDetails details{txid(tx), 0, m_sc.amount};
        m_tmpl = template_for(details);
        event("deposit-built", "depositor", {{"txid", details.txid.display_hex()}, {"address", addr.address}});
        for (int i = 0; i < m_sc.n; ++i) send("depositor", enforcer_id(i), details);
    }

    // Step 4.
    void handle(const Envelope& env, const DepositDetails& details)
    {
        Enforcer& e = enforcer(env.to);
        e.pending = details;
        event("details-received", e.id, {{"txid", details.txid.display_hex()}, {"vout", details.vout}, {"amount", details.amount.sats()}});
        if (static_cast<int>(e.peers.size()) == m_sc.n) sign_and_delete(e);
    }

    void sign_and_delete(Enforcer& e)
    {
        auto* held = std::get_if<KeyHeld>(&e.key);
        if (!held) return;
        const int index = enforcer_index(e.id);
        const DepositDetails details = *e.pending;
        e.pending.reset();
        const DepositSpec spec = spec_from(e.peers);
        const CovenantTemplate tmpl = template_for(details);
        const SpentOutputContext ctx{deposit_witness_script(spec), details.amount};
        const CommitmentSignature sig = sign_commitment(tmpl, 0, held->key, ctx, *spec.enforcement);
        event("commitment-signed", e.id, {{"covenant_txid", txid(tmpl.transaction).display_hex()}});

        if (deviation(Deviation::Kind::leak_key, index)) {
            m_leaked.emplace(index, held->key.duplicate());
            event("key-leaked", e.id, {{"key", e.pub.fingerprint()}});
        }
        const DeletionAttestation att = attest_deletion(e.id, held->key, m_now);
        held->key.destroy();
        e.key = KeyDestroyed{att};
        m_trace.attestations.push_back(att);
        event("key-destroyed", e.id, {{"key", att.key_fingerprint}, {"lifetime", m_now - e.keygen_time}});

        send(e.id, "depositor", CommitmentMsg{index, sig, att});
        if (deviation(Deviation::Kind::withhold_signature, index)) {
            event("signature-withheld", e.id);
            return;
        }
        // Step 6.
        const CovenantPackage pkg{spec, tmpl.transaction.inputs[0].previous, details.amount, tmpl, {sig}};
        for (const auto& c : m_custodians) send(e.id, c.id, PackageMsg{pkg});
    }

    // Step 5.
    void handle(const Envelope& env, const CommitmentMsg& msg)
    {
        const bool key_matches = m_received_keys.count(msg.enforcer) && m_received_keys.at(msg.enforcer) == msg.signature.signer &&
                                 msg.attestation.key_fingerprint == msg.signature.signer.fingerprint();
        const SpentOutputContext ctx{deposit_witness_script(*m_spec), m_sc.amount};
        const bool valid = key_matches && verify_commitment(*m_tmpl, msg.signature, ctx);
        m_notified.insert(msg.enforcer);
        if (valid) m_verified.emplace(msg.enforcer, msg.signature);
        event(valid ? "commitment-verified" : "commitment-rejected", "depositor", {{"from", env.from}});

        if (m_broadcast || static_cast<int>(m_verified.size()) < m_sc.m || static_cast<int>(m_notified.size()) < m_sc.n) return;
        if (deviation(Deviation::Kind::abort_deposit)) {
            if (!m_withheld) event("deposit-withheld", "depositor");
            m_withheld = true;
            return;
        }
        broadcast_deposit();
    }

    void broadcast_deposit()
    {
        Transaction tx = *m_deposit_tx;
        const SpentOutputContext ctx{m_funding_script, m_sc.amount + Amount(FEE)};
        tx.inputs[0].witness = {sign_input(tx, 0, *m_depositor_key, ctx, SigHashType::all()), m_funding_script.bytes()};
        const MempoolResult r = m_trace.chain.accept_to_mempool(tx);
        event("deposit-broadcast", "depositor", {{"txid", txid(tx).display_hex()}, {"status", std::string(to_string(r.validation.reason))}});
        if (!r.ok()) return;
        m_trace.chain.mine_blocks(m_sc.confirmation_depth);
        const Hash256 id = txid(tx);
        event("deposit-confirmed", "validator", {{"height", m_trace.chain.height()}, {"confirmations", m_trace.chain.confirmations(id)}});
        m_broadcast = true;
        m_trace.deposit_tx = tx;

        CovenantPackage pkg{*m_spec, OutPoint{id, 0}, m_sc.amount, *m_tmpl, {}};
        for (const auto& [i, sig] : m_verified) pkg.signatures.push_back(sig);
        m_trace.package = pkg;

        // Step 7.
        const Deviation* withhold = deviation(Deviation::Kind::withhold_forwarding);
        for (int c = 0; c < m_sc.custodians; ++c) {
            const bool skipped = withhold && (withhold->custodians.empty() ||
                                              std::count(withhold->custodians.begin(), withhold->custodians.end(), c));
            if (skipped) {
                event("forwarding-withheld", "depositor", {{"to", custodian_id(c)}});
                continue;
            }
            send("depositor", custodian_id(c), PackageMsg{pkg});
        }
    }

    void handle(const Envelope& env, const PackageMsg& msg)
    {
        Custodian& c = custodian(env.to);
        const CovenantPackage& in = msg.package;
        const SpentOutputContext ctx{deposit_witness_script(in.deposit), in.deposit_amount};
        const Hash256 key = txid(in.tmpl.transaction);
        auto it = c.partial.find(key);
        if (it == c.partial.end()) {
            CovenantPackage fresh = in;
            fresh.signatures.clear();
            it = c.partial.emplace(key, std::move(fresh)).first;
        }
        int accepted = 0;
        for (const auto& sig : in.signatures) {
            if (!in.deposit.enforcement->contains(sig.signer) || !verify_commitment(in.tmpl, sig, ctx)) continue;
            auto& have = it->second.signatures;
            if (std::none_of(have.begin(), have.end(), [&](const CommitmentSignature& s) { return s.signer == sig.signer; })) {
                have.push_back(sig);
                ++accepted;
            }
        }
        event("package-received", c.id, {{"from", env.from}, {"signatures", in.signatures.size()}, {"verified", accepted}});
        if (!c.complete && static_cast<int>(it->second.signatures.size()) >= in.deposit.enforcement->m) {
            c.complete = it->second;
            event("package-complete", c.id, {{"source", env.from}});
        }
    }

    void fire_timeout()
    {
        m_now = std::max(m_now, m_sc.timeout);
        m_abandoned = true;
        event("timeout", "depositor");
        for (auto& e : m_enforcers) {
            if (auto* held = std::get_if<KeyHeld>(&e.key)) {
                const DeletionAttestation att = attest_deletion(e.id, held->key, m_now);
                held->key.destroy();
                e.key = KeyDestroyed{att};
                event("key-destroyed", e.id, {{"key", att.key_fingerprint}, {"lifetime", m_now - e.keygen_time}, {"abandoned", true}});
            }
        }
    }

    /** Spend of the deposit to an attacker, signed by leaked keys and colluding custodians. */
    void attempt_theft()
    {
        const Hash256 id = txid(*m_trace.deposit_tx);
        const PrivateKey attacker = PrivateKey::generate(m_rng);
        Transaction theft;
        theft.inputs.push_back(TxInput{OutPoint{id, 0}, SEQUENCE_FINAL, {}});
        theft.outputs.push_back(TxOutput{m_sc.amount - Amount(FEE),
                                         p2wsh_address(Script().push(attacker.public_key().view()).op(OP_CHECKSIG))});
        const SpentOutputContext ctx{deposit_witness_script(*m_spec), m_sc.amount};

        std::vector<Bytes> cust_sigs;
        for (int c = 0; c < m_sc.threshold; ++c) cust_sigs.push_back(sign_input(theft, 0, m_custodians[c].key, ctx, SigHashType::all()));

        std::vector<int> survivors;
        for (const auto& [i, k] : m_leaked) survivors.push_back(i);
        std::vector<std::vector<int>> subsets;
        if (static_cast<int>(survivors.size()) >= m_sc.m) {
            std::vector<bool> pick(survivors.size(), false);
            std::fill(pick.begin(), pick.begin() + m_sc.m, true);
            do {
                std::vector<int> s;
                for (std::size_t i = 0; i < pick.size(); ++i) {
                    if (pick[i]) s.push_back(survivors[i]);
                }
                subsets.push_back(s);
            } while (std::prev_permutation(pick.begin(), pick.end()));
        } else {
            subsets.push_back(survivors);
        }

        for (const auto& subset : subsets) {
            std::vector<Bytes> enf_sigs;
            for (int i : subset) enf_sigs.push_back(sign_input(theft, 0, m_leaked.at(i), ctx, SigHashType::all()));
            // Missing signatures are filled by keys outside the policy.
            while (static_cast<int>(enf_sigs.size()) < m_sc.m) {
                enf_sigs.push_back(sign_input(theft, 0, PrivateKey::generate(m_rng), ctx, SigHashType::all()));
            }
            Transaction attempt = theft;
            attempt.inputs[0].witness = covenant_witness(*m_spec, CovenantWitnessParts{cust_sigs, enf_sigs, 0});
            const Validation v = m_trace.chain.check_tx(attempt);
            ++m_trace.theft_attempts;
            json keys = json::array();
            for (int i : subset) keys.push_back(enforcer_id(i));
            event("theft-attempt", "adversary", {{"keys", keys}, {"result", std::string(to_string(v.reason))}});
            if (v.accepted()) {
                m_trace.theft_accepted = true;
                return;
            }
        }
    }

    void check_covenant_spend()
    {
        const CovenantPackage& pkg = *m_trace.package;
        Transaction tx = pkg.tmpl.transaction;
        const SpentOutputContext ctx{deposit_witness_script(pkg.deposit), pkg.deposit_amount};
        std::vector<Bytes> cust_sigs;
        for (int c = 0; c < m_sc.threshold; ++c) cust_sigs.push_back(sign_input(tx, 0, m_custodians[c].key, ctx, SigHashType::all()));
        std::vector<Bytes> enf_sigs;
        for (const auto& s : pkg.signatures) {
            if (static_cast<int>(enf_sigs.size()) < m_sc.m) enf_sigs.push_back(s.encoded());
        }
        tx.inputs[0].witness = covenant_witness(pkg.deposit, CovenantWitnessParts{cust_sigs, enf_sigs, 0});
        const Validation v = m_trace.chain.check_tx(tx);
        event("covenant-spend-check", "validator", {{"txid", txid(tx).display_hex()}, {"result", std::string(to_string(v.reason))}});
    }

    void finish()
    {
        m_trace.surviving_keys = static_cast<int>(m_leaked.size());
        for (const auto& c : m_custodians) m_trace.custodian_has_package[c.id] = c.complete.has_value();
        const bool confirmed = m_broadcast && m_trace.chain.is_confirmed(txid(*m_trace.deposit_tx));
        if (!confirmed) {
            m_trace.outcome = Outcome::aborted;
        } else {
            attempt_theft();
            check_covenant_spend();
            m_trace.outcome = m_trace.theft_accepted ? Outcome::funds_at_risk : Outcome::covenant_active;
        }
        std::uint64_t longest = 0;
        for (const auto& [id, span] : key_lifetime_report(m_trace)) longest = std::max(longest, span);
        event("outcome", "harness", {{"outcome", std::string(to_string(m_trace.outcome))},
                                     {"surviving_keys", m_trace.surviving_keys},
                                     {"max_key_lifetime", longest},
                                     {"lifetime_exceeded", longest > m_sc.lifetime_threshold}});
    }

    int enforcer_index(const std::string& id) const { return std::stoi(id.substr(std::string("enforcer-").size())); }
    Enforcer& enforcer(const std::string& id) { return m_enforcers.at(enforcer_index(id)); }
    Custodian& custodian(const std::string& id)
    {
        return m_custodians.at(std::stoi(id.substr(std::string("custodian-").size())));
    }

    Scenario m_sc;
    std::mt19937_64 m_rng;
    ProtocolTrace m_trace;
    std::uint64_t m_now{0};
    std::vector<Envelope> m_queue;

    std::vector<Enforcer> m_enforcers;
    std::vector<Custodian> m_custodians;
    CustodialPolicy m_cust_policy;
    Script m_vault_script;

    std::optional<PrivateKey> m_depositor_key;
    Script m_funding_script;
    OutPoint m_funding;
    std::map<int, PublicKey> m_received_keys;
    std::optional<DepositSpec> m_spec;
    std::optional<Transaction> m_deposit_tx;
    std::optional<CovenantTemplate> m_tmpl;
    std::map<int, CommitmentSignature> m_verified;
    std::set<int> m_notified;
    bool m_broadcast{false};
    bool m_withheld{false};
    bool m_abandoned{false};

    std::map<int, PrivateKey> m_leaked;
};

} // namespace

ProtocolTrace run_protocol(const Scenario& scenario) { return Simulation(scenario).run(); }

std::map<std::string, std::uint64_t> key_lifetime_report(const ProtocolTrace& trace)
{
    std::map<std::string, std::uint64_t> born;
    std::map<std::string, std::uint64_t> spans;
    std::uint64_t end = 0;
    for (const auto& e : trace.events) {
        end = std::max(end, e.time);
        if (e.kind == "keygen") born[e.actor] = e.time;
        if (e.kind == "key-destroyed" && born.count(e.actor)) spans[e.actor] = e.time - born[e.actor];
    }
    for (const auto& [id, t] : born) {
        if (!spans.count(id)) spans[id] = end - t;
    }
    return spans;
}

std::vector<SweepCase> deletion_sweep(int max_n, std::uint64_t seed)
{
    std::vector<SweepCase> out;
    for (int n = 1; n <= max_n; ++n) {
        for (int m = 1; m <= n; ++m) {
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                Scenario s;
                s.m = m;
                s.n = n;
                s.seed = seed + mask;
                for (int i = 0; i < n; ++i) {
                    if (mask & (1u << i)) s.adversary.push_back(Deviation{Deviation::Kind::leak_key, i, std::nullopt, {}});
                }
                const ProtocolTrace t = run_protocol(s);
                out.push_back(SweepCase{m, n, mask, t.surviving_keys, t.theft_accepted});
            }
        }
    }
    return out;
}

} // namespace covenant
