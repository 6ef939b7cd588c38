// Copyright (c) 2026 The covenant-kit developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

// Recursive reference interpreter: parses into a tree of conditional blocks
// and evaluates it directly. Written independently of src/interpreter.cpp.

#include "reference.hpp"

#include <memory>

namespace ref {

namespace {

struct Fail {};

struct Node {
    std::uint8_t op{0};
    Bytes data;
    /** IF only: alternating segments split at each ELSE. */
    std::vector<std::vector<Node>> segments;
};

bool known(std::uint8_t op)
{
    if (op <= 0x4d || (op >= 0x51 && op <= 0x60)) return true;
    for (std::uint8_t k : {0x63, 0x67, 0x68, 0x75, 0x87, 0x88, 0xac, 0xad, 0xae, 0xaf, 0xb1, 0xb2, 0xb3}) {
        if (op == k) return true;
    }
    return false;
}

std::vector<Node> parse_block(const Bytes& s, std::size_t& pos, int depth, int& ops, bool& saw_else_or_end)
{
    std::vector<Node> out;
    while (pos < s.size()) {
        const std::uint8_t op = s[pos];
        if (op == 0x67 || op == 0x68) {
            if (depth == 0) throw Fail{};
            saw_else_or_end = true;
            return out;
        }
        ++pos;
        if (!known(op)) throw Fail{};
        Node n{op, {}, {}};
        if (op >= 0x01 && op <= 0x4d) {
            std::size_t len = op;
            if (op == 0x4c) {
                if (pos + 1 > s.size()) throw Fail{};
                len = s[pos++];
            } else if (op == 0x4d) {
                if (pos + 2 > s.size()) throw Fail{};
                len = s[pos] | (s[pos + 1] << 8);
                pos += 2;
            }
            if (pos + len > s.size() || len > 520) throw Fail{};
            n.data.assign(s.begin() + static_cast<long>(pos), s.begin() + static_cast<long>(pos + len));
            pos += len;
        } else if (op > 0x60) {
            ++ops;
        }
        if (op == 0x63) {
            for (;;) {
                bool closed = false;
                n.segments.push_back(parse_block(s, pos, depth + 1, ops, closed));
                if (!closed) throw Fail{};
                ++ops;
                if (s[pos++] == 0x68) break;
            }
        }
        out.push_back(std::move(n));
    }
    return out;
}

std::int64_t num(const Bytes& d, std::size_t max)
{
    if (d.size() > max) throw Fail{};
    if (d.empty()) return 0;
    if ((d.back() & 0x7f) == 0 && (d.size() == 1 || !(d[d.size() - 2] & 0x80))) throw Fail{};
    std::int64_t v = 0;
    for (std::size_t i = 0; i < d.size(); ++i) v |= static_cast<std::int64_t>(d[i] & (i + 1 == d.size() ? 0x7f : 0xff)) << (8 * i);
    return (d.back() & 0x80) ? -v : v;
}

bool truthy(const Bytes& d)
{
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] != 0) return !(i + 1 == d.size() && d[i] == 0x80);
    }
    return false;
}

Bytes pop(std::vector<Bytes>& st)
{
    if (st.empty()) throw Fail{};
    Bytes v = st.back();
    st.pop_back();
    return v;
}

const Bytes& peek(const std::vector<Bytes>& st, std::size_t depth = 0)
{
    if (st.size() <= depth) throw Fail{};
    return st[st.size() - 1 - depth];
}

void run(const std::vector<Node>& block, std::vector<Bytes>& st)
{
    for (const Node& n : block) {
        const std::uint8_t op = n.op;
        if (op == 0x00) {
            st.push_back({});
        } else if (op <= 0x4d) {
            st.push_back(n.data);
        } else if (op >= 0x51 && op <= 0x60) {
            st.push_back(Bytes{static_cast<std::uint8_t>(op - 0x50)});
        } else if (op == 0x63) {
            const bool cond = truthy(pop(st));
            for (std::size_t k = 0; k < n.segments.size(); ++k) {
                if ((k % 2 == 0) == cond) run(n.segments[k], st);
            }
        } else if (op == 0x75) {
            pop(st);
        } else if (op == 0x87 || op == 0x88) {
            const bool eq = pop(st) == pop(st);
            if (op == 0x88 && !eq) throw Fail{};
            if (op == 0x87) st.push_back(eq ? Bytes{1} : Bytes{});
        } else if (op == 0xac || op == 0xad) {
            const Bytes key = pop(st);
            const bool ok = fake_sig(pop(st), key);
            if (op == 0xad && !ok) throw Fail{};
            if (op == 0xac) st.push_back(ok ? Bytes{1} : Bytes{});
        } else if (op == 0xae || op == 0xaf) {
            const std::int64_t nk = num(pop(st), 4);
            if (nk < 1 || nk > 15) throw Fail{};
            std::vector<Bytes> keys(static_cast<std::size_t>(nk));
            for (auto it = keys.rbegin(); it != keys.rend(); ++it) *it = pop(st);
            const std::int64_t ns = num(pop(st), 4);
            if (ns < 1 || ns > nk) throw Fail{};
            std::vector<Bytes> sigs(static_cast<std::size_t>(ns));
            for (auto it = sigs.rbegin(); it != sigs.rend(); ++it) *it = pop(st);
            std::size_t k = 0;
            std::size_t matched = 0;
            for (const auto& sig : sigs) {
                while (k < keys.size() && !fake_sig(sig, keys[k])) ++k;
                if (k == keys.size()) break;
                ++k;
                ++matched;
            }
            const bool ok = matched == sigs.size();
            if (op == 0xaf && !ok) throw Fail{};
            if (op == 0xae) st.push_back(ok ? Bytes{1} : Bytes{});
        } else if (op == 0xb1) {
            const std::int64_t v = num(peek(st), 5);
            if (v < 0 || !fake_locktime(v)) throw Fail{};
        } else if (op == 0xb2) {
            const std::int64_t v = num(peek(st), 5);
            if (v < 0) throw Fail{};
            if (!(v & (std::int64_t{1} << 31)) && !fake_sequence(v)) throw Fail{};
        } else if (op == 0xb3) {
            const Bytes& h = peek(st);
            if (h.size() != 32 || !fake_template(h)) throw Fail{};
        }
        if (st.size() > 1000) throw Fail{};
    }
}

} // namespace

std::optional<std::vector<Bytes>> naive_eval(std::vector<Bytes> stack, const Bytes& script)
{
    try {
        std::size_t pos = 0;
        int ops = 0;
        bool closed = false;
        const auto tree = parse_block(script, pos, 0, ops, closed);
        if (ops > 201) return std::nullopt;
        run(tree, stack);
        return stack;
    } catch (const Fail&) {
        return std::nullopt;
    }
}

} // namespace ref
