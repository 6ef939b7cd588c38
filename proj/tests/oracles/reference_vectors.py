#!/usr/bin/env python3
# Copyright (c) 2026 The covenant-kit developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or http://www.opensource.org/licenses/mit-license.php.

# Independent reference computations used to freeze expected values in the
# C++ test suites. Pure Python integers and hashlib only; shares no code with
# the library.
import hashlib
import hmac
import json

P = 2**256 - 2**32 - 977
N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8
G = (GX, GY)


def sha256(b):
    return hashlib.sha256(b).digest()


def dsha256(b):
    return sha256(sha256(b))


def add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a[0] == b[0] and (a[1] + b[1]) % P == 0:
        return None
    if a == b:
        lam = 3 * a[0] * a[0] * pow(2 * a[1], -1, P) % P
    else:
        lam = (b[1] - a[1]) * pow(b[0] - a[0], -1, P) % P
    x = (lam * lam - a[0] - b[0]) % P
    return (x, (lam * (a[0] - x) - a[1]) % P)


def mul(k, pt):
    r = None
    while k:
        if k & 1:
            r = add(r, pt)
        pt = add(pt, pt)
        k >>= 1
    return r


def compress(pt):
    return bytes([2 + (pt[1] & 1)]) + pt[0].to_bytes(32, "big")


def lift(x, odd):
    if x >= P:
        return None
    rhs = (pow(x, 3, P) + 7) % P
    y = pow(rhs, (P + 1) // 4, P)
    if y * y % P != rhs:
        return None
    if (y & 1) != odd:
        y = P - y
    return (x, y)


def verify(pub, digest, r, s):
    if not (1 <= r < N and 1 <= s < N):
        return False
    e = int.from_bytes(digest, "big") % N
    w = pow(s, -1, N)
    pt = add(mul(e * w % N, G), mul(r * w % N, pub))
    return pt is not None and pt[0] % N == r


def recover(digest, r, s):
    e = int.from_bytes(digest, "big") % N
    out = []
    for j in range(2):
        x = r + j * N
        for odd in (0, 1):
            R = lift(x, odd)
            if R is None:
                continue
            rinv = pow(r, -1, N)
            Q = mul(rinv, add(mul(s, R), mul((N - e) % N, G)))
            if Q is not None and verify(Q, digest, r, s):
                out.append(Q)
    return out


def rfc6979_nonce(key, digest):
    x = key.to_bytes(32, "big")
    h = (int.from_bytes(digest, "big") % N).to_bytes(32, "big")
    V = b"\x01" * 32
    K = b"\x00" * 32
    K = hmac.new(K, V + b"\x00" + x + h, hashlib.sha256).digest()
    V = hmac.new(K, V, hashlib.sha256).digest()
    K = hmac.new(K, V + b"\x01" + x + h, hashlib.sha256).digest()
    V = hmac.new(K, V, hashlib.sha256).digest()
    while True:
        V = hmac.new(K, V, hashlib.sha256).digest()
        k = int.from_bytes(V, "big")
        if 1 <= k < N:
            yield k
        K = hmac.new(K, V + b"\x00", hashlib.sha256).digest()
        V = hmac.new(K, V, hashlib.sha256).digest()


def der_int(v):
    b = v.to_bytes(32, "big").lstrip(b"\x00") or b"\x00"
    if b[0] & 0x80:
        b = b"\x00" + b
    return b"\x02" + bytes([len(b)]) + b


def der(r, s):
    body = der_int(r) + der_int(s)
    return b"\x30" + bytes([len(body)]) + body


def sign(key, digest):
    e = int.from_bytes(digest, "big") % N
    for k in rfc6979_nonce(key, digest):
        R = mul(k, G)
        r = R[0] % N
        if r == 0:
            continue
        s = pow(k, -1, N) * (e + r * key) % N
        if s == 0:
            continue
        if s > N // 2:
            s = N - s
        # full-width encodings only (DER 70..72 bytes)
        if len(der_int(r)) < 34 or len(der_int(s)) < 34:
            continue
        return r, s


def varint(n):
    if n < 0xFD:
        return bytes([n])
    if n <= 0xFFFF:
        return b"\xfd" + n.to_bytes(2, "little")
    return b"\xfe" + n.to_bytes(4, "little")


def ser_output(amount, script):
    return amount.to_bytes(8, "little") + varint(len(script)) + script


def ser_tx(tx, witness):
    out = tx["version"].to_bytes(4, "little", signed=True)
    if witness:
        out += b"\x00\x01"
    out += varint(len(tx["ins"]))
    for txid, vout, seq, _ in tx["ins"]:
        out += txid + vout.to_bytes(4, "little") + b"\x00" + seq.to_bytes(4, "little")
    out += varint(len(tx["outs"]))
    for amount, script in tx["outs"]:
        out += ser_output(amount, script)
    if witness:
        for *_, wit in tx["ins"]:
            out += varint(len(wit))
            for item in wit:
                out += varint(len(item)) + item
    out += tx["locktime"].to_bytes(4, "little")
    return out


def sighash(tx, idx, script_code, amount, t):
    base = t & 0x1F
    acp = bool(t & 0x80)
    noinput = bool(t & 0x40)
    z = b"\x00" * 32
    hp = z if (acp or noinput) else dsha256(b"".join(i[0] + i[1].to_bytes(4, "little") for i in tx["ins"]))
    hs = z if (acp or noinput or base != 1) else dsha256(b"".join(i[2].to_bytes(4, "little") for i in tx["ins"]))
    if noinput or base == 1:
        ho = dsha256(b"".join(ser_output(a, s) for a, s in tx["outs"]))
    elif base == 3:
        a, s = tx["outs"][idx]
        ho = dsha256(ser_output(a, s))
    else:
        ho = z
    txid, vout, seq, _ = tx["ins"][idx]
    outpoint = z + b"\x00" * 4 if noinput else txid + vout.to_bytes(4, "little")
    sc = b"" if noinput else script_code
    amt = 0 if noinput else amount
    pre = (tx["version"].to_bytes(4, "little", signed=True) + hp + hs + outpoint + varint(len(sc)) + sc
           + amt.to_bytes(8, "little") + seq.to_bytes(4, "little") + ho + tx["locktime"].to_bytes(4, "little")
           + t.to_bytes(4, "little"))
    return dsha256(pre)


def ctv_hash(tx, idx):
    b = tx["version"].to_bytes(4, "little", signed=True) + tx["locktime"].to_bytes(4, "little")
    b += len(tx["ins"]).to_bytes(4, "little")
    b += sha256(b"".join(i[2].to_bytes(4, "little") for i in tx["ins"]))
    b += len(tx["outs"]).to_bytes(4, "little")
    b += sha256(b"".join(ser_output(a, s) for a, s in tx["outs"]))
    b += idx.to_bytes(4, "little")
    return sha256(b)


def main():
    out = {}
    op1_script = b"\x51"
    p2wsh_op1 = b"\x00\x20" + sha256(op1_script)
    tx = {
        "version": 2,
        "ins": [(sha256(b"deposit"), 0, 0xFFFFFFFD, [b"\x01\x02", op1_script])],
        "outs": [(99_000, p2wsh_op1)],
        "locktime": 0,
    }
    out["tx_hex_nowit"] = ser_tx(tx, False).hex()
    out["tx_hex_wit"] = ser_tx(tx, True).hex()
    out["txid_display"] = dsha256(ser_tx(tx, False))[::-1].hex()
    out["wtxid_display"] = dsha256(ser_tx(tx, True))[::-1].hex()
    out["p2wsh_op1"] = p2wsh_op1.hex()

    # Two-in/two-out template used for sighash and ctv vectors.
    t2 = {
        "version": 2,
        "ins": [(sha256(b"in0"), 1, 0xFFFFFFFD, []), (sha256(b"in1"), 0, 0xFFFFFFFF, [])],
        "outs": [(50_000, p2wsh_op1), (20_000, b"\x00\x20" + sha256(b"\x52"))],
        "locktime": 144,
    }
    script_code = bytes.fromhex("51")
    out["t2_hex"] = ser_tx(t2, False).hex()
    out["sighash"] = {}
    for name, t in [("ALL", 0x01), ("NONE", 0x02), ("SINGLE", 0x03), ("ALL|ANYONECANPAY", 0x81),
                    ("NONE|ANYONECANPAY", 0x82), ("SINGLE|ANYONECANPAY", 0x83), ("ALL|NOINPUT", 0x41),
                    ("ALL|NOINPUT|ANYONECANPAY", 0xC1)]:
        out["sighash"][name] = sighash(t2, 0, script_code, 75_000, t).hex()
    out["ctv_t2_idx0"] = ctv_hash(t2, 0).hex()
    out["ctv_t2_idx1"] = ctv_hash(t2, 1).hex()

    # RFC6979 signing vector.
    digest = sha256(b"Satoshi Nakamoto")
    r, s = sign(1, digest)
    out["sign_key1"] = {"digest": digest.hex(), "r": "%064x" % r, "s": "%064x" % s, "der": der(r, s).hex()}
    key = int.from_bytes(sha256(b"enforcer key"), "big") % N
    d2 = sha256(b"covenant digest")
    r2, s2 = sign(key, d2)
    out["sign_fixed"] = {"key": "%064x" % key, "pub": compress(mul(key, G)).hex(), "digest": d2.hex(),
                         "r": "%064x" % r2, "s": "%064x" % s2,
                         "recovered": [compress(q).hex() for q in recover(d2, r2, s2)]}

    # NUMS: start at (1,1), increase r until it lifts.
    nd = sha256(b"nums template digest")
    r = 1
    while lift(r, 0) is None:
        r += 1
    cands = recover(nd, r, 1)
    out["nums"] = {"digest": nd.hex(), "r": r, "s": 1, "pub": compress(cands[0]).hex(),
                   "candidates": [compress(q).hex() for q in cands], "der": der(r, 1).hex()}

    # Seeded signature.
    seed_r, seed_s = b"seed-r-0", b"seed-s-0"
    i = 0
    while True:
        seed_r = ("seed-r-%d" % i).encode()
        rr = int.from_bytes(sha256(seed_r), "big") % N
        if lift(rr, 0) is not None and len(der_int(rr)) >= 34:
            break
        i += 1
    ss = int.from_bytes(sha256(seed_s), "big") % N
    cands = recover(nd, rr, ss)
    out["seeded"] = {"seed_r": seed_r.hex(), "seed_s": seed_s.hex(), "digest": nd.hex(), "r": "%064x" % rr,
                     "s": "%064x" % ss, "pub": compress(cands[0]).hex(), "der_len": len(der(rr, ss))}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
