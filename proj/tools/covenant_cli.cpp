// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/chainstate.hpp>
#include <covenant/compose.hpp>
#include <covenant/hash.hpp>
#include <covenant/protocol.hpp>
#include <covenant/serde.hpp>
#include <covenant/wallet.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace covenant;
using serde::json;

namespace {

/** Domain rejection: exit code 1. */
struct Rejected {
    std::string reason;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::parse, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(Errc::parse, "cannot write " + path);
    out << text << '\n';
}

std::string chain_path(const std::string& flag)
{
    if (!flag.empty()) return flag;
    const char* env = std::getenv("COVENANT_CHAIN");
    return env && *env ? env : "covenant-chain.json";
}

CovenantWallet open_wallet(const std::string& path)
{
    if (!std::filesystem::exists(path)) return CovenantWallet{};
    return CovenantWallet::load(path);
}

/** Wallet label, else a 64-hex scalar. */
PrivateKey resolve_private(const CovenantWallet& w, const std::string& ref)
{
    if (auto k = w.private_key(ref)) return std::move(*k);
    if (ref.size() == 64) return PrivateKey::from_hex(ref);
    throw Error(Errc::key, "no private key for " + ref);
}

/** Wallet label, else a 66-hex compressed key. */
PublicKey resolve_public(const CovenantWallet& w, const std::string& ref)
{
    for (const auto& k : w.keys) {
        if (k.label == ref) return k.key;
    }
    if (ref.size() == 66) return PublicKey::from_hex(ref);
    throw Error(Errc::key, "no public key for " + ref);
}

/** Creates a custodial key under `label` when the wallet lacks one. */
PrivateKey ensure_key(CovenantWallet& w, const std::string& label, std::mt19937_64& rng)
{
    if (auto k = w.private_key(label)) return std::move(*k);
    PrivateKey k = PrivateKey::generate(rng);
    w.add_key(label, k);
    return k;
}

std::string range_text(const std::map<std::size_t, std::size_t>& hist)
{
    if (hist.empty()) return "n/a";
    const std::size_t lo = hist.begin()->first;
    const std::size_t hi = hist.rbegin()->first;
    return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
}

struct BuildOptions {
    std::string mechanism{"deleted-key"};
    std::size_t levels{3};
    std::uint64_t amount{1'000'000};
    std::uint64_t fee{1'000};
    int m{1};
    int n{1};
    std::string custodian{"custodian"};
    std::string name{"chain"};
    std::string style{"nums"};
    std::string chain;
    std::uint64_t seed{1};
    std::string out;
    std::string sighash;
};

void add_build_options(CLI::App* cmd, BuildOptions& o)
{
    cmd->add_option("--mechanism", o.mechanism, "deleted-key, recovered-key or ctv");
    cmd->add_option("--amount", o.amount, "deposit amount in satoshis");
    cmd->add_option("--fee", o.fee, "fee per covenant transaction");
    cmd->add_option("--m", o.m, "enforcement threshold");
    cmd->add_option("--n", o.n, "enforcement keys");
    cmd->add_option("--custodian", o.custodian, "wallet label of the custodial key");
    cmd->add_option("--name", o.name, "name under which packages are stored");
    cmd->add_option("--style", o.style, "nums or seeded");
    cmd->add_option("--chain", o.chain, "mint funding and submit the deposit on this chain state");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--sighash", o.sighash, "commitment sighash type, e.g. ALL|ANYONECANPAY");
    cmd->add_option("--out", o.out, "write the graph JSON here");
}

ChainRequest make_request(const BuildOptions& o, const PublicKey& custodian, std::size_t levels)
{
    ChainRequest req;
    req.mechanism = mechanism_from_string(o.mechanism);
    req.m = o.m;
    req.n = o.n;
    req.custodial = CustodialPolicy{1, 1, {custodian}};
    req.deposit_amount = Amount(o.amount);
    ChainLevel level;
    level.fee = Amount(o.fee);
    if (!o.sighash.empty()) level.sighash = SigHashType::from_string(o.sighash);
    req.levels.assign(levels, level);
    req.final_locking_script = p2wsh_address(wallet_script(custodian));
    req.style = o.style == "seeded" ? RecoveredStyle::seeded : RecoveredStyle::nums;
    return req;
}

/** Builds with a minting factory on the given (or a scratch) chain, stores the graph and prints it. */
template <typename Build>
int run_build(const std::string& wallet_path, const BuildOptions& o, Build build)
{
    CovenantWallet w = open_wallet(wallet_path);
    std::mt19937_64 rng(o.seed);
    const PrivateKey custodian = ensure_key(w, o.custodian, rng);
    const PrivateKey funder = PrivateKey::generate(rng);
    ChainState chain = o.chain.empty() ? ChainState{} : ChainState::from_json(read_file(chain_path(o.chain)));
    const CovenantGraph g = build(custodian.public_key(), minting_factory(chain, funder), rng);
    if (!o.chain.empty()) {
        for (const auto& root : g.roots) {
            const MempoolResult r = chain.accept_to_mempool(root);
            if (!r.ok()) throw Rejected{std::string(to_string(r.validation.reason)) + ": " + r.validation.detail};
        }
        write_output(chain_path(o.chain), chain.to_json());
    }
    w.add_graph(o.name, g);
    w.save(wallet_path);
    std::cout << g.render_tree();
    if (!o.out.empty()) write_output(o.out, g.to_json());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"covenant: Bitcoin covenant construction, enforcement simulation and validation"};
    app.require_subcommand(1);
    std::string wallet_path = default_wallet_path();
    app.add_option("--wallet", wallet_path, "wallet file (default $COVENANT_WALLET or covenant-wallet.json)");

    std::string label, seed_text, hex, digest, seed_r, seed_s, spec_file, tmpl_file, key_ref, out, file, sighash_text;
    std::string mechanism{"ctv"}, style{"nums"}, state_flag, message, dest_ref;
    std::size_t input = 0, samples = 1000, blocks = 1, capacity = 1'000'000;
    std::uint64_t amount = 0, seed = 1, parent_fee = 0, feerate = 1, p = 2, t = 3, cap = DEFAULT_VARIANT_CAP;
    std::uint32_t vout = 0, depth = 6;
    bool reserves = false, public_only = false;
    std::vector<std::uint64_t> feerates;

    auto* keygen = app.add_subcommand("keygen", "generate a key and store it in the wallet");
    keygen->add_option("--label", label, "wallet label")->required();
    keygen->add_option("--seed", seed_text, "deterministic RNG seed (default: OS randomness)");

    auto* address = app.add_subcommand("address", "deposit address for a deposit spec");
    address->add_option("--spec", spec_file, "deposit spec JSON")->required();

    auto* ctv = app.add_subcommand("ctv-hash", "CHECKTEMPLATEVERIFY hash of a transaction");
    ctv->add_option("--tx", hex, "transaction hex")->required();
    ctv->add_option("--input", input, "input index");

    auto* nums = app.add_subcommand("nums-sig", "NUMS signature (r = s = 1) and its recovered key");
    nums->add_option("--digest", digest, "32-byte digest hex")->required();

    auto* seeded = app.add_subcommand("seeded-sig", "signature derived from public seeds and its recovered key");
    seeded->add_option("--digest", digest, "32-byte digest hex")->required();
    seeded->add_option("--seed-r", seed_r, "seed for r, hex")->required();
    seeded->add_option("--seed-s", seed_s, "seed for s, hex")->required();

    auto* signc = app.add_subcommand("sign-commitment", "commitment signature over a covenant template");
    signc->add_option("--template", tmpl_file, "covenant template JSON")->required();
    signc->add_option("--spec", spec_file, "deposit spec JSON of the spent output")->required();
    signc->add_option("--key", key_ref, "enforcement key label or hex")->required();
    signc->add_option("--amount", amount, "spent amount")->required();
    signc->add_option("--input", input, "input index");

    BuildOptions chain_opts, disjoint_opts, multi_opts;
    std::size_t deposits = 2;
    std::uint64_t fee_b = 2'000;
    std::uint32_t refund_height = 0;
    std::string refund_key;
    auto* bchain = app.add_subcommand("build-chain", "linear covenant chain");
    add_build_options(bchain, chain_opts);
    bchain->add_option("--levels", chain_opts.levels, "chain length");
    auto* bdisjoint = app.add_subcommand("build-disjoint", "two alternative covenants over one deposit");
    add_build_options(bdisjoint, disjoint_opts);
    bdisjoint->add_option("--fee-b", fee_b, "fee of branch B");
    auto* bmulti = app.add_subcommand("build-multideposit", "one covenant spending several deposits");
    add_build_options(bmulti, multi_opts);
    bmulti->add_option("--deposits", deposits, "number of deposits");
    bmulti->add_option("--refund-height", refund_height, "refund path height (0: none)");
    bmulti->add_option("--refund-key", refund_key, "refund key label or hex");

    auto* variants = app.add_subcommand("fee-variants", "enumerate fee-variant chains");
    variants->add_option("--p", p, "feerates per level");
    variants->add_option("--t", t, "chain length");
    variants->add_option("--mechanism", mechanism, "deleted-key, recovered-key or ctv");
    variants->add_option("--feerates", feerates, "explicit feerates (default 1..p)")->delimiter(',');
    variants->add_option("--cap", cap, "maximum number of chains");
    variants->add_option("--seed", seed, "RNG seed");

    auto* cpfp = app.add_subcommand("cpfp-child", "child transaction paying for its parent");
    cpfp->add_option("--parent", hex, "signed parent transaction hex")->required();
    cpfp->add_option("--parent-fee", parent_fee, "fee paid by the parent")->required();
    cpfp->add_option("--feerate", feerate, "target package feerate (sat/byte)")->required();
    cpfp->add_option("--vout", vout, "parent output owned by the wallet key")->required();
    cpfp->add_option("--key", key_ref, "wallet key label or hex")->required();
    cpfp->add_option("--dest", dest_ref, "destination key label or hex (default: --key)");

    auto* simulate = app.add_subcommand("simulate", "run the deleted-key enforcement protocol");
    simulate->add_option("scenario", file, "scenario JSON")->required();
    simulate->add_option("--trace", out, "write the JSON-lines trace here instead of stdout");

    auto* prove = app.add_subcommand("prove", "proof bundle for a wallet package");
    prove->add_option("--package", label, "package name")->required();
    prove->add_flag("--reserves", reserves, "proof of reserves instead of proof of covenant");
    prove->add_option("--message", message, "32-byte reserves message hex");
    prove->add_option("--out", out, "output file");

    auto* verify = app.add_subcommand("verify-proof", "verify a proof bundle");
    verify->add_option("bundle", file, "bundle JSON")->required();

    auto* chain = app.add_subcommand("chain", "validator state");
    chain->add_option("--state", state_flag, "state file (default $COVENANT_CHAIN or covenant-chain.json)");
    chain->require_subcommand(1);
    auto* cinit = chain->add_subcommand("init", "fresh chain state");
    cinit->add_option("--depth", depth, "confirmation depth");
    auto* csubmit = chain->add_subcommand("submit", "submit a transaction to the mempool");
    csubmit->add_option("tx", hex, "transaction hex")->required();
    auto* cmine = chain->add_subcommand("mine", "mine blocks");
    cmine->add_option("--blocks", blocks, "number of blocks");
    cmine->add_option("--capacity", capacity, "block capacity in bytes");
    auto* cstate = chain->add_subcommand("state", "print height, UTXO set and mempool");
    auto* cmint = chain->add_subcommand("mint", "faucet output paying a wallet key");
    cmint->add_option("--key", key_ref, "wallet key label or hex")->required();
    cmint->add_option("--amount", amount, "amount")->required();

    auto* size = app.add_subcommand("size-report", "commitment byte counts");
    size->add_option("--mechanism", mechanism, "deleted-key, recovered-key or ctv");
    size->add_option("--style", style, "nums or seeded (recovered-key)");
    size->add_option("--samples", samples, "random samples");
    size->add_option("--seed", seed, "RNG seed");

    auto* exportc = app.add_subcommand("export", "print the wallet");
    exportc->add_flag("--public", public_only, "omit the secrets section");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*keygen) {
            CovenantWallet w = open_wallet(wallet_path);
            std::mt19937_64 rng(seed_text.empty() ? 0 : std::stoull(seed_text));
            const PrivateKey k = seed_text.empty() ? PrivateKey::generate_secure() : PrivateKey::generate(rng);
            w.add_key(label, k);
            w.save(wallet_path);
            std::cout << json{{"label", label}, {"pubkey", k.public_key().hex()}}.dump() << '\n';
        } else if (*address) {
            const DepositSpec spec = serde::deposit_spec_from_json(serde::parse(read_file(spec_file)));
            const DepositAddress a = deposit_address(spec);
            std::cout << json{{"address", a.address},
                              {"witness_script", to_hex(a.witness_script.bytes())},
                              {"witness_script_asm", a.witness_script.to_asm()},
                              {"locking_script", to_hex(a.locking_script.bytes())}}
                             .dump(2)
                      << '\n';
        } else if (*ctv) {
            const Transaction tx = deserialize(from_hex(hex));
            std::cout << standard_template_hash(tx, static_cast<std::uint32_t>(input)).hex() << '\n';
        } else if (*nums || *seeded) {
            const Hash256 d = Hash256::from_hex(digest);
            const RecoveredCommitment rc =
                *nums ? nums_signature(d) : seeded_signature(SignatureSeeds{from_hex(seed_r), from_hex(seed_s)}, d);
            const CommitmentSize cs = commitment_size(Mechanism::recovered_key, rc.signature);
            std::cout << json{{"r", u256_hex(rc.signature.r)},
                              {"s", u256_hex(rc.signature.s)},
                              {"der", to_hex(der_encode(rc.signature))},
                              {"pubkey", rc.key.hex()},
                              {"der_convention_bytes", cs.der_convention},
                              {"with_type_bytes", cs.with_type_convention}}
                             .dump(2)
                      << '\n';
        } else if (*signc) {
            const CovenantWallet w = open_wallet(wallet_path);
            const CovenantTemplate tmpl = serde::template_from_json(serde::parse(read_file(tmpl_file)));
            const DepositSpec spec = serde::deposit_spec_from_json(serde::parse(read_file(spec_file)));
            if (!spec.enforcement) throw Error(Errc::policy, "spec has no enforcement policy");
            const PrivateKey k = resolve_private(w, key_ref);
            const CommitmentSignature s = sign_commitment(
                tmpl, input, k, SpentOutputContext{deposit_witness_script(spec), Amount(amount)}, *spec.enforcement);
            std::cout << serde::to_json(s).dump(2) << '\n';
        } else if (*bchain) {
            return run_build(wallet_path, chain_opts, [&](const PublicKey& c, const DepositFactory& f, std::mt19937_64& rng) {
                return build_chain(make_request(chain_opts, c, chain_opts.levels), f, rng);
            });
        } else if (*bdisjoint) {
            return run_build(wallet_path, disjoint_opts, [&](const PublicKey& c, const DepositFactory& f, std::mt19937_64& rng) {
                const ChainRequest req = make_request(disjoint_opts, c, 1);
                ChainLevel b = req.levels[0];
                b.fee = Amount(fee_b);
                return build_disjoint(req, req.levels[0], b, f, rng);
            });
        } else if (*bmulti) {
            const CovenantWallet w = open_wallet(wallet_path);
            std::optional<RefundPath> refund;
            if (refund_height != 0) refund = RefundPath{refund_height, resolve_public(w, refund_key)};
            return run_build(wallet_path, multi_opts, [&](const PublicKey& c, const DepositFactory& f, std::mt19937_64& rng) {
                ChainRequest req = make_request(multi_opts, c, 1);
                req.refund = refund;
                return build_multi_deposit(req, deposits, f, rng);
            });
        } else if (*variants) {
            if (feerates.empty()) {
                for (std::uint64_t r = 1; r <= p; ++r) feerates.push_back(r);
            }
            std::mt19937_64 rng(seed);
            const PrivateKey custodian = PrivateKey::generate(rng);
            const PrivateKey funder = PrivateKey::generate(rng);
            BuildOptions o;
            o.mechanism = mechanism;
            ChainRequest req = make_request(o, custodian.public_key(), t);
            ChainState scratch;
            const FeeVariantSet set = enumerate_fee_variants(req, feerates, minting_factory(scratch, funder), rng, cap);
            std::cout << set.chains.size() << " variant chains\n"
                      << set.prepared_transactions << " prepared transactions\n"
                      << set.aggregate_bytes << " aggregate bytes\n";
        } else if (*cpfp) {
            const CovenantWallet w = open_wallet(wallet_path);
            const Transaction parent = deserialize(from_hex(hex));
            const PrivateKey k = resolve_private(w, key_ref);
            const PublicKey dest = dest_ref.empty() ? k.public_key() : resolve_public(w, dest_ref);
            WalletOutput wo{OutPoint{txid(parent), vout}, parent.outputs.at(vout).amount, &k};
            const Transaction child = cpfp_child(parent, Amount(parent_fee), feerate, wo, p2wsh_address(wallet_script(dest)));
            std::cout << to_hex(serialize(child, true)) << '\n';
        } else if (*simulate) {
            const ProtocolTrace trace = run_protocol(scenario_from_json(read_file(file)));
            if (out.empty()) {
                std::cout << trace.to_json_lines();
            } else {
                std::ofstream(out) << trace.to_json_lines();
                std::cout << to_string(trace.outcome) << '\n';
            }
        } else if (*prove) {
            CovenantWallet w = open_wallet(wallet_path);
            const ProofBundle b = reserves ? w.prove_reserves(label, Hash256::from_hex(message)) : w.prove_package(label);
            w.proofs.push_back(b);
            w.save(wallet_path);
            write_output(out, proof_to_json(b));
        } else if (*verify) {
            const std::string text = read_file(file);
            serde::parse(text);
            const ProofVerdict v = verify_proof_json(text);
            if (!v.accepted()) throw Rejected{v.reason + (v.detail.empty() ? "" : ": " + v.detail)};
            std::cout << "accepted\n";
        } else if (*chain) {
            const std::string path = chain_path(state_flag);
            if (*cinit) {
                ChainParams params;
                params.confirmation_depth = depth;
                write_output(path, ChainState(params).to_json());
                return 0;
            }
            ChainState cs = ChainState::from_json(read_file(path));
            if (*csubmit) {
                const MempoolResult r = cs.accept_to_mempool(deserialize(from_hex(hex)));
                if (!r.ok()) throw Rejected{std::string(to_string(r.validation.reason)) + ": " + r.validation.detail};
                std::cout << (r.status == MempoolStatus::replaced ? "replaced " : "accepted ") << txid(deserialize(from_hex(hex))).display_hex()
                          << " fee " << r.validation.fee.sats() << '\n';
            } else if (*cmine) {
                for (std::size_t b = 0; b < blocks; ++b) {
                    const Block blk = cs.mine_block(capacity);
                    std::cout << "block " << blk.height << " txs " << blk.txids.size() << " fees " << blk.fees.sats() << '\n';
                }
            } else if (*cstate) {
                json j;
                j["height"] = cs.height();
                j["utxos"] = cs.utxos().size();
                j["total_value"] = cs.total_utxo_value().sats();
                j["mempool"] = json::array();
                for (const auto& e : cs.mempool()) j["mempool"].push_back({{"txid", e.txid.display_hex()}, {"fee", e.fee.sats()}, {"size", e.size}});
                std::cout << j.dump(2) << '\n';
            } else if (*cmint) {
                const CovenantWallet w = open_wallet(wallet_path);
                const Transaction tx = cs.mint({TxOutput{Amount(amount), p2wsh_address(wallet_script(resolve_public(w, key_ref)))}});
                std::cout << txid(tx).display_hex() << ":0\n";
            }
            write_output(path, cs.to_json());
        } else if (*size) {
            const Mechanism mech = mechanism_from_string(mechanism);
            const SizeSweep s = commitment_size_sweep(mech, samples, seed,
                                                      style == "seeded" ? RecoveredStyle::seeded : RecoveredStyle::nums);
            if (mech == Mechanism::ctv) {
                std::cout << "commitment bytes = " << range_text(s.der_convention) << '\n';
            } else {
                std::cout << "commitment bytes (DER only) = " << range_text(s.der_convention) << '\n'
                          << "commitment bytes (with sighash type) = " << range_text(s.with_type_convention) << '\n';
                for (const auto& [bytes, count] : s.der_convention) std::cout << "  " << bytes << ": " << count << '\n';
            }
        } else if (*exportc) {
            std::cout << open_wallet(wallet_path).to_json(!public_only) << '\n';
        }
    } catch (const Rejected& r) {
        std::cerr << "rejected: " << r.reason << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == Errc::parse ? 2 : 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
