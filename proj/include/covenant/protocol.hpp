// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_PROTOCOL_HPP
#define COVENANT_PROTOCOL_HPP

#include <covenant/chainstate.hpp>
#include <covenant/mechanisms.hpp>
#include <covenant/proof.hpp>

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace covenant {

/** One deviation from the honest deleted-key protocol. */
struct Deviation {
    enum class Kind { stall, leak_key, withhold_signature, withhold_forwarding, abort_deposit };

    Kind kind{Kind::stall};
    /** Enforcer index for stall, leak-key and withhold-signature. */
    int enforcer{-1};
    /** stall: extra delay in logical time; nullopt stalls forever. */
    std::optional<std::uint64_t> duration;
    /** withhold-forwarding: custodian indices skipped; empty means all of them. */
    std::vector<int> custodians;
};

std::string_view to_string(Deviation::Kind kind);

struct Scenario {
    int m{2};
    int n{3};
    /** Number of custodians k and their signing threshold j. */
    int custodians{1};
    int threshold{1};
    std::uint64_t seed{1};
    std::vector<Deviation> adversary;
    Amount amount{Amount(100'000'000)};
    std::uint32_t confirmation_depth{6};
    /** Logical time after which an unbroadcast deposit is abandoned. */
    std::uint64_t timeout{100};
    /** Key lifetimes above this are flagged in the trace. */
    std::uint64_t lifetime_threshold{20};

    /** Throws Error(Errc::protocol) for bad thresholds or deviations naming absent roles. */
    void validate() const;
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

enum class Outcome { covenant_active, funds_at_risk, aborted };

std::string_view to_string(Outcome o);

struct TraceEvent {
    std::uint64_t time{0};
    std::string kind;
    std::string actor;
    /** Event-specific fields as a compact JSON object. */
    std::string fields;
};

/** Everything a custodian needs to spend along the covenant. */
struct CovenantPackage {
    DepositSpec deposit;
    OutPoint deposit_outpoint;
    Amount deposit_amount;
    CovenantTemplate tmpl;
    std::vector<CommitmentSignature> signatures;
};

struct ProtocolTrace {
    std::vector<TraceEvent> events;
    Outcome outcome{Outcome::aborted};
    /** Signed deposit transaction, once broadcast. */
    std::optional<Transaction> deposit_tx;
    std::vector<DeletionAttestation> attestations;
    /** Custodian id -> whether it ended holding a verified complete package. */
    std::map<std::string, bool> custodian_has_package;
    /** Enforcement keys that exist outside an enforcer after the run. */
    int surviving_keys{0};
    int theft_attempts{0};
    bool theft_accepted{false};
    /** The depositor's package when the deposit was broadcast. */
    std::optional<CovenantPackage> package;
    ChainState chain;

    /** One JSON object per line. */
    std::string to_json_lines() const;
};

/**
 * Runs steps 1-7 of the deleted-key protocol on a deterministic logical-time
 * scheduler. Messages arrive one tick after sending; events sharing a tick
 * are ordered by a shuffle seeded from the scenario.
 */
ProtocolTrace run_protocol(const Scenario& scenario);

/** Enforcer id -> logical time from key generation to key destruction (or end of run). */
std::map<std::string, std::uint64_t> key_lifetime_report(const ProtocolTrace& trace);

struct SweepCase {
    int m{0};
    int n{0};
    /** Bit i set when enforcer i leaked its key. */
    unsigned leak_mask{0};
    int surviving{0};
    bool theft_accepted{false};
};

/** Every (m, n) with n <= max_n and every leak subset. */
std::vector<SweepCase> deletion_sweep(int max_n, std::uint64_t seed);

} // namespace covenant

#endif // COVENANT_PROTOCOL_HPP
