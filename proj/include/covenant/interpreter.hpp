// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef COVENANT_INTERPRETER_HPP
#define COVENANT_INTERPRETER_HPP

#include <covenant/script.hpp>
#include <covenant/sighash.hpp>
#include <covenant/transaction.hpp>

#include <cstdint>
#include <string_view>
#include <vector>

namespace covenant {

constexpr std::size_t MAX_STACK_SIZE = 1'000;
constexpr int MAX_OPS_PER_SCRIPT = 201;

enum class ScriptError {
    ok,
    eval_false,
    bad_opcode,
    invalid_stack_operation,
    invalid_number,
    unbalanced_conditional,
    op_count,
    stack_size,
    push_size,
    verify,
    equalverify,
    checksigverify,
    checkmultisigverify,
    pubkey_count,
    sig_count,
    negative_locktime,
    unsatisfied_locktime,
    template_size,
    template_mismatch,
    witness_program_mismatch,
    witness_empty,
    cleanstack,
    script_size,
};

std::string_view to_string(ScriptError err);

/** Hooks the interpreter calls into for everything that needs the spending transaction. */
class SignatureChecker
{
public:
    virtual ~SignatureChecker() = default;
    /** sig carries the trailing sighash-type byte. */
    virtual bool check_sig(ByteView sig, ByteView pubkey, const Script& script_code) const = 0;
    virtual bool check_locktime(std::int64_t locktime) const = 0;
    virtual bool check_sequence(std::int64_t sequence) const = 0;
    virtual bool check_template(ByteView hash) const = 0;
};

/** Checker bound to one input of a real transaction. */
class TransactionChecker : public SignatureChecker
{
public:
    TransactionChecker(const Transaction& tx, std::size_t input_index, Amount amount)
        : m_tx(tx), m_index(input_index), m_amount(amount) {}

    bool check_sig(ByteView sig, ByteView pubkey, const Script& script_code) const override;
    bool check_locktime(std::int64_t locktime) const override;
    bool check_sequence(std::int64_t sequence) const override;
    bool check_template(ByteView hash) const override;

private:
    const Transaction& m_tx;
    std::size_t m_index;
    Amount m_amount;
};

using Stack = std::vector<Bytes>;

struct ExecResult {
    ScriptError error{ScriptError::ok};
    /** CHECKSIG-family operations executed; CHECKMULTISIG counts its threshold m. */
    int sigops{0};
    /** Some signature check returned false during execution. */
    bool failed_sig_check{false};

    bool ok() const { return error == ScriptError::ok; }
};

/**
 * Runs `script` over `stack` (bottom first). The stack is left as execution
 * ended. CHECKMULTISIG pops no dummy element.
 */
ExecResult eval_script(Stack& stack, const Script& script, const SignatureChecker& checker);

/**
 * P2WSH spend: the last witness element is the witness script, which must
 * hash to the program in `locking_script`; the rest form the initial stack.
 * Success requires exactly one true element left.
 */
ExecResult verify_witness_input(const std::vector<Bytes>& witness, const Script& locking_script,
                                const SignatureChecker& checker);

} // namespace covenant

#endif // COVENANT_INTERPRETER_HPP
