// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <covenant/ecdsa.hpp>
#include <covenant/hash.hpp>
#include <covenant/interpreter.hpp>

#include <algorithm>

namespace covenant {

std::string_view to_string(ScriptError err)
{
    switch (err) {
    case ScriptError::ok: return "ok";
    case ScriptError::eval_false: return "script evaluated to false";
    case ScriptError::bad_opcode: return "bad opcode";
    case ScriptError::invalid_stack_operation: return "invalid stack operation";
    case ScriptError::invalid_number: return "invalid script number";
    case ScriptError::unbalanced_conditional: return "unbalanced conditional";
    case ScriptError::op_count: return "operation limit exceeded";
    case ScriptError::stack_size: return "stack size limit exceeded";
    case ScriptError::push_size: return "push size limit exceeded";
    case ScriptError::verify: return "verify failed";
    case ScriptError::equalverify: return "EQUALVERIFY failed";
    case ScriptError::checksigverify: return "CHECKSIGVERIFY failed";
    case ScriptError::checkmultisigverify: return "CHECKMULTISIGVERIFY failed";
    case ScriptError::pubkey_count: return "public key count out of range";
    case ScriptError::sig_count: return "signature count out of range";
    case ScriptError::negative_locktime: return "negative locktime";
    case ScriptError::unsatisfied_locktime: return "locktime requirement not satisfied";
    case ScriptError::template_size: return "template hash must be 32 bytes";
    case ScriptError::template_mismatch: return "template hash mismatch";
    case ScriptError::witness_program_mismatch: return "witness script does not match program";
    case ScriptError::witness_empty: return "empty witness";
    case ScriptError::cleanstack: return "stack not clean after execution";
    case ScriptError::script_size: return "witness script too large";
    }
    return "unknown";
}

bool TransactionChecker::check_sig(ByteView sig, ByteView pubkey, const Script& script_code) const
{
    if (sig.empty()) return false;
    try {
        const SigHashType type = SigHashType::from_byte(sig.back());
        const EcdsaSignature decoded = der_decode(sig.first(sig.size() - 1));
        const PublicKey key = PublicKey::from_bytes(pubkey);
        const Hash256 digest = sighash_digest(m_tx, m_index, SpentOutputContext{script_code, m_amount}, type);
        return verify(key, digest, decoded, true);
    } catch (const Error&) {
        return false;
    }
}

bool TransactionChecker::check_locktime(std::int64_t locktime) const
{
    if (locktime > static_cast<std::int64_t>(m_tx.locktime)) return false;
    return m_tx.inputs[m_index].sequence != SEQUENCE_FINAL;
}

bool TransactionChecker::check_sequence(std::int64_t sequence) const
{
    constexpr std::uint32_t disable = 1u << 31;
    constexpr std::uint32_t mask = 0x0000ffff;
    const std::uint32_t tx_sequence = m_tx.inputs[m_index].sequence;
    if (m_tx.version < 2) return false;
    if (tx_sequence & disable) return false;
    return (static_cast<std::uint32_t>(sequence) & mask) <= (tx_sequence & mask);
}

bool TransactionChecker::check_template(ByteView hash) const
{
    const Hash256 expected = standard_template_hash(m_tx, static_cast<std::uint32_t>(m_index));
    return std::equal(hash.begin(), hash.end(), expected.bytes.begin(), expected.bytes.end());
}

namespace {

const Bytes TRUE_ELEMENT{1};
const Bytes FALSE_ELEMENT{};

struct ScriptFailure {
    ScriptError error;
};

class Machine
{
public:
    Machine(Stack& stack, const Script& script, const SignatureChecker& checker, ExecResult& result)
        : m_stack(stack), m_script(script), m_checker(checker), m_result(result) {}

    void run()
    {
        std::vector<Instruction> program;
        try {
            program = m_script.parse();
        } catch (const Error&) {
            fail(ScriptError::bad_opcode);
        }
        int op_count = 0;
        for (const auto& ins : program) {
            const bool executing = std::all_of(m_exec.begin(), m_exec.end(), [](bool b) { return b; });
            if (ins.data.size() > MAX_ELEMENT_SIZE) fail(ScriptError::push_size);
            if (ins.opcode > OP_16 && ++op_count > MAX_OPS_PER_SCRIPT) fail(ScriptError::op_count);

            if (ins.is_push()) {
                if (executing) push_constant(ins);
            } else if (executing || ins.opcode == OP_IF || ins.opcode == OP_ELSE || ins.opcode == OP_ENDIF) {
                step(ins.opcode, executing);
            }
            if (m_stack.size() > MAX_STACK_SIZE) fail(ScriptError::stack_size);
        }
        if (!m_exec.empty()) fail(ScriptError::unbalanced_conditional);
    }

private:
    [[noreturn]] static void fail(ScriptError e) { throw ScriptFailure{e}; }

    const Bytes& top(std::size_t depth = 0) const
    {
        if (m_stack.size() <= depth) fail(ScriptError::invalid_stack_operation);
        return m_stack[m_stack.size() - 1 - depth];
    }

    Bytes pop()
    {
        if (m_stack.empty()) fail(ScriptError::invalid_stack_operation);
        Bytes v = std::move(m_stack.back());
        m_stack.pop_back();
        return v;
    }

    static std::int64_t number(const Bytes& data, std::size_t max_size = 4)
    {
        try {
            return decode_script_num(data, max_size);
        } catch (const Error&) {
            fail(ScriptError::invalid_number);
        }
    }

    void push_constant(const Instruction& ins)
    {
        if (ins.opcode >= OP_1 && ins.opcode <= OP_16) {
            m_stack.push_back(encode_script_num(ins.opcode - OP_1 + 1));
        } else {
            m_stack.push_back(ins.data);
        }
    }

    bool check_sig(const Bytes& sig, const Bytes& key)
    {
        return m_checker.check_sig(sig, key, m_script);
    }

    void step(std::uint8_t opcode, bool executing)
    {
        switch (opcode) {
        case OP_IF: {
            bool value = false;
            if (executing) value = cast_to_bool(pop());
            m_exec.push_back(value);
            break;
        }
        case OP_ELSE:
            if (m_exec.empty()) fail(ScriptError::unbalanced_conditional);
            m_exec.back() = !m_exec.back();
            break;
        case OP_ENDIF:
            if (m_exec.empty()) fail(ScriptError::unbalanced_conditional);
            m_exec.pop_back();
            break;
        case OP_DROP:
            pop();
            break;
        case OP_EQUAL:
        case OP_EQUALVERIFY: {
            const Bytes a = pop();
            const Bytes b = pop();
            const bool equal = a == b;
            if (opcode == OP_EQUALVERIFY) {
                if (!equal) fail(ScriptError::equalverify);
            } else {
                m_stack.push_back(equal ? TRUE_ELEMENT : FALSE_ELEMENT);
            }
            break;
        }
        case OP_CHECKSIG:
        case OP_CHECKSIGVERIFY: {
            const Bytes key = pop();
            const Bytes sig = pop();
            ++m_result.sigops;
            const bool ok = check_sig(sig, key);
            if (!ok) m_result.failed_sig_check = true;
            if (opcode == OP_CHECKSIGVERIFY) {
                if (!ok) fail(ScriptError::checksigverify);
            } else {
                m_stack.push_back(ok ? TRUE_ELEMENT : FALSE_ELEMENT);
            }
            break;
        }
        case OP_CHECKMULTISIG:
        case OP_CHECKMULTISIGVERIFY:
            multisig(opcode == OP_CHECKMULTISIGVERIFY);
            break;
        case OP_CHECKLOCKTIMEVERIFY: {
            const std::int64_t locktime = number(top(), 5);
            if (locktime < 0) fail(ScriptError::negative_locktime);
            if (!m_checker.check_locktime(locktime)) fail(ScriptError::unsatisfied_locktime);
            break;
        }
        case OP_CHECKSEQUENCEVERIFY: {
            const std::int64_t sequence = number(top(), 5);
            if (sequence < 0) fail(ScriptError::negative_locktime);
            if (sequence & (std::int64_t{1} << 31)) break;
            if (!m_checker.check_sequence(sequence)) fail(ScriptError::unsatisfied_locktime);
            break;
        }
        case OP_CHECKTEMPLATEVERIFY: {
            const Bytes& hash = top();
            if (hash.size() != 32) fail(ScriptError::template_size);
            if (!m_checker.check_template(hash)) fail(ScriptError::template_mismatch);
            break;
        }
        default:
            fail(ScriptError::bad_opcode);
        }
    }

    void multisig(bool verify_form)
    {
        const std::int64_t n = number(top());
        if (n < 1 || n > MAX_MULTISIG_KEYS) fail(ScriptError::pubkey_count);
        const auto key_count = static_cast<std::size_t>(n);
        const std::int64_t m = number(top(key_count + 1));
        if (m < 1 || m > n) fail(ScriptError::sig_count);
        const auto sig_count = static_cast<std::size_t>(m);
        if (m_stack.size() < key_count + sig_count + 2) fail(ScriptError::invalid_stack_operation);

        // Both lists in push order: the first key and first signature are deepest.
        const std::size_t base = m_stack.size() - (key_count + sig_count + 2);
        const std::vector<Bytes> sigs(m_stack.begin() + base, m_stack.begin() + base + sig_count);
        const std::vector<Bytes> keys(m_stack.begin() + base + sig_count + 1,
                                      m_stack.begin() + base + sig_count + 1 + key_count);
        m_stack.resize(base);
        m_result.sigops += static_cast<int>(m);

        std::size_t isig = 0;
        std::size_t ikey = 0;
        bool ok = true;
        while (ok && isig < sigs.size()) {
            if (check_sig(sigs[isig], keys[ikey])) ++isig;
            ++ikey;
            if (sigs.size() - isig > keys.size() - ikey) ok = false;
        }
        if (!ok) m_result.failed_sig_check = true;
        if (verify_form) {
            if (!ok) fail(ScriptError::checkmultisigverify);
        } else {
            m_stack.push_back(ok ? TRUE_ELEMENT : FALSE_ELEMENT);
        }
    }

    Stack& m_stack;
    const Script& m_script;
    const SignatureChecker& m_checker;
    ExecResult& m_result;
    std::vector<bool> m_exec;
};

} // namespace

ExecResult eval_script(Stack& stack, const Script& script, const SignatureChecker& checker)
{
    ExecResult result;
    try {
        Machine(stack, script, checker, result).run();
    } catch (const ScriptFailure& f) {
        result.error = f.error;
    }
    return result;
}

ExecResult verify_witness_input(const std::vector<Bytes>& witness, const Script& locking_script,
                                const SignatureChecker& checker)
{
    ExecResult result;
    if (witness.empty()) {
        result.error = ScriptError::witness_empty;
        return result;
    }
    const Script witness_script(witness.back());
    if (witness_script.size() > MAX_WITNESS_SCRIPT_SIZE) {
        result.error = ScriptError::script_size;
        return result;
    }
    if (!is_p2wsh(locking_script) ||
        !std::equal(locking_script.bytes().begin() + 2, locking_script.bytes().end(),
                    sha256(witness_script.bytes()).bytes.begin())) {
        result.error = ScriptError::witness_program_mismatch;
        return result;
    }
    Stack stack(witness.begin(), witness.end() - 1);
    for (const auto& element : stack) {
        if (element.size() > MAX_ELEMENT_SIZE) {
            result.error = ScriptError::push_size;
            return result;
        }
    }
    result = eval_script(stack, witness_script, checker);
    if (!result.ok()) return result;
    if (stack.empty() || !cast_to_bool(stack.back())) {
        result.error = ScriptError::eval_false;
    } else if (stack.size() != 1) {
        result.error = ScriptError::cleanstack;
    }
    return result;
}

} // namespace covenant
