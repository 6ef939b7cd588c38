// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_SERDE_HPP
#define COVENANT_SERDE_HPP

// JSON forms of the data types shared by proofs, wallets, graphs and the CLI.

#include <covenant/mechanisms.hpp>
#include <covenant/proof.hpp>

#include <json.hpp>

namespace covenant::serde {

using nlohmann::json;

/** Rejects documents without "format": 1. */
void require_format(const json& j, const char* what);
/** json::parse with failures rethrown as ParseError carrying the byte offset. */
json parse(const std::string& text);

json to_json(const Transaction& tx);
Transaction transaction_from_json(const json& j);

json to_json(const EnforcementPolicy& p);
EnforcementPolicy enforcement_from_json(const json& j);
json to_json(const CustodialPolicy& p);
CustodialPolicy custodial_from_json(const json& j);
json to_json(const DepositSpec& spec);
DepositSpec deposit_spec_from_json(const json& j);

json to_json(const CovenantTemplate& t);
CovenantTemplate template_from_json(const json& j);
json to_json(const CommitmentSignature& s);
CommitmentSignature commitment_from_json(const json& j);
json to_json(const SignatureSeeds& s);
SignatureSeeds seeds_from_json(const json& j);
json to_json(const DeletionAttestation& a);
DeletionAttestation attestation_from_json(const json& j);

json to_json(const ProofBundle& b);
ProofBundle proof_from_json(const json& j);

} // namespace covenant::serde

#endif // COVENANT_SERDE_HPP
