#!/usr/bin/env python3
"""Reference values for the information-combining module.

Everything is computed from first principles in natural log:
  * h2 / h2inv via direct formula and bisection
  * the classical check-node bounds and the 0.799 convenient lower bound
  * the four arccos-chain expressions and the iid selector bounds
  * binary-input cq channel calculus (box/varo combining, duality) in numpy

Run:  python3 tools/oracles/combine_oracle.py
"""
import math

import numpy as np

LN2 = math.log(2.0)


def h2(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def h2inv(h):
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h2(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def convolve(a, b):
    return a * (1.0 - b) + (1.0 - a) * b


def classical_mgl(x, y):
    return h2(convolve(h2inv(x), h2inv(y)))


def classical_upper(x, y):
    return LN2 - (LN2 - x) * (LN2 - y) / LN2


def gx_lower(h):
    return 0.799 * h * (LN2 - h) / LN2 + h


def chain(a, b):
    # -2 ln cos( arccos(a*b)/2 - arccos(b)/2 ), the recurring building block
    return -2.0 * math.log(math.cos(0.5 * math.acos(a * b) - 0.5 * math.acos(b)))


def qmgl_two_branches(x, y):
    return (
        x + chain(1.0 - 2.0 * h2inv(LN2 - x), math.exp(y) - 1.0),
        y + chain(1.0 - 2.0 * h2inv(LN2 - y), math.exp(x) - 1.0),
        y + chain(1.0 - 2.0 * h2inv(x), 2.0 * math.exp(-y) - 1.0),
        x + chain(1.0 - 2.0 * h2inv(y), 2.0 * math.exp(-x) - 1.0),
    )


def qmgl_iid(h):
    t = h if h <= 0.5 * LN2 else LN2 - h
    a = 1.0 - 2.0 * h2inv(t)
    return h - 2.0 * math.log(math.cos(0.5 * math.acos(a * a) - 0.5 * math.acos(a)))


def qmgl_iid_convenient(h):
    t = h if h <= 0.5 * LN2 else LN2 - h
    if t == 0.0:
        return h
    return h + 0.083 * t / (1.0 - math.log(t))


def vn(rho):
    ev = np.linalg.eigvalsh(rho)
    ev = ev[ev > 1e-14]
    return float(-np.sum(ev * np.log(ev)))


def channel_entropy(r0, r1):
    return LN2 + 0.5 * (vn(r0) + vn(r1)) - vn(0.5 * (r0 + r1))


def box(p0, p1, q0, q1):
    o0 = 0.5 * (np.kron(p0, q0) + np.kron(p1, q1))
    o1 = 0.5 * (np.kron(p1, q0) + np.kron(p0, q1))
    return o0, o1


def varo(p0, p1, q0, q1):
    e = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
    o0 = 0.5 * (np.kron(e[0], np.kron(p0, q0)) + np.kron(e[1], np.kron(p1, q0)))
    o1 = 0.5 * (np.kron(e[0], np.kron(p1, q1)) + np.kron(e[1], np.kron(p0, q1)))
    return o0, o1


def sqrtm_h(rho):
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def dual(r0, r1):
    d = r0.shape[0]
    s = [sqrtm_h(r0), sqrtm_h(r1)]
    out = []
    for x in (0, 1):
        acc = np.zeros((2 * d, 2 * d), dtype=complex)
        for z in (0, 1):
            for zp in (0, 1):
                sign = (-1.0) ** (x * (z + zp))
                blk = (s[zp] @ s[z]).T
                ket = np.zeros((2, 2), dtype=complex)
                ket[z, zp] = 1.0
                acc += 0.5 * sign * np.kron(blk, ket)
        out.append(acc)
    return out


def fid(a, b):
    sa = sqrtm_h(a)
    return float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(sa @ b @ sa), 0.0, None))))


def main():
    print("== scalar freezes ==")
    print(f"classical_mgl(0.3, 0.5)      = {classical_mgl(0.3, 0.5):.15f}")
    print(f"classical_upper(0.3, 0.5)    = {classical_upper(0.3, 0.5):.15f}")
    br = qmgl_two_branches(0.3, 0.45)
    for i, b in enumerate(br):
        print(f"qmgl_two branch[{i}](0.3,0.45) = {b:.15f}")
    print(f"qmgl_two(0.3, 0.45)          = {max(br):.15f}  argmax={br.index(max(br))}")
    print(f"qmgl_iid(0.6)                = {qmgl_iid(0.6):.15f}")
    print(f"qmgl_iid(0.2)                = {qmgl_iid(0.2):.15f}")
    print(f"qmgl_iid_convenient(0.6)     = {qmgl_iid_convenient(0.6):.15f}")
    print(f"qmgl_iid_convenient(0.2)     = {qmgl_iid_convenient(0.2):.15f}")

    print("\n== gx_lower envelope: max over H of classical_mgl(H,H) - gx_lower(H) ==")
    hs = np.linspace(1e-9, LN2 - 1e-9, 200001)
    gaps = np.array([classical_mgl(h, h) - gx_lower(h) for h in hs])
    k = int(np.argmax(gaps))
    print(f"max gap = {gaps[k]:.12f} nats = {gaps[k]/LN2:.9f}*ln2 at H = {hs[k]:.6f}")
    print(f"min gap = {gaps.min():.3e}")

    print("\n== pure-pair box-combining closed form ==")
    for alpha in (0.3, 0.7, 1.1):
        c = math.cos(alpha)
        v0 = np.array([1.0, 0.0], dtype=complex)
        v1 = np.array([math.cos(alpha), math.sin(alpha)], dtype=complex)
        p0 = np.outer(v0, v0.conj())
        p1 = np.outer(v1, v1.conj())
        h = channel_entropy(p0, p1)
        o0, o1 = box(p0, p1, p0, p1)
        hminus = channel_entropy(o0, o1)
        closed = 2.0 * h - LN2 + h2(0.5 * (1.0 - c * c))
        print(f"alpha={alpha}: H={h:.12f} H_minus={hminus:.12f} "
              f"closed={closed:.12f} diff={hminus-closed:.2e}")

    print("\n== duality examples ==")
    p = 0.3
    b0 = np.diag([p, 1.0 - p]).astype(complex)
    b1 = np.diag([1.0 - p, p]).astype(complex)
    s0, s1 = dual(b0, b1)
    pur = [float(np.trace(s @ s).real) for s in (s0, s1)]
    print(f"BSC(0.3) dual: purity={pur[0]:.12f},{pur[1]:.12f} "
          f"H_dual={channel_entropy(s0, s1):.12f} ln2-h2(p)={LN2-h2(p):.12f} "
          f"F={fid(s0, s1):.12f} |2p-1|={abs(2*p-1):.12f}")

    eps = 0.35
    e0 = np.diag([1.0 - eps, 0.0, eps]).astype(complex)
    e1 = np.diag([0.0, 1.0 - eps, eps]).astype(complex)
    t0, t1 = dual(e0, e1)
    print(f"BEC(0.35) dual: H={channel_entropy(t0, t1):.12f} "
          f"(1-eps)ln2={ (1-eps)*LN2:.12f} F={fid(t0, t1):.12f}")

    rng = np.random.default_rng(5)
    t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r0 = t @ t.conj().T
    r0 /= np.trace(r0).real
    t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r1 = t @ t.conj().T
    r1 /= np.trace(r1).real
    d0, d1 = dual(r0, r1)
    print(f"random qubit channel: H(W)+H(Wdual)-ln2 = "
          f"{channel_entropy(r0, r1) + channel_entropy(d0, d1) - LN2:.3e}")
    dd0, dd1 = dual(d0, d1)
    print(f"involution: H(dualdual)-H(W) = "
          f"{channel_entropy(dd0, dd1) - channel_entropy(r0, r1):.3e}")

    # swap identity via entropies: H(W1d box W2d) vs ln2 - H(W1 varo W2)
    t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q0 = t @ t.conj().T
    q0 /= np.trace(q0).real
    t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q1 = t @ t.conj().T
    q1 /= np.trace(q1).real
    w1d = dual(r0, r1)
    w2d = dual(q0, q1)
    lhs = channel_entropy(*box(w1d[0], w1d[1], w2d[0], w2d[1]))
    rhs = LN2 - channel_entropy(*varo(r0, r1, q0, q1))
    print(f"swap identity gap = {lhs - rhs:.3e}")

    # chain rule on the same random pair
    chain_gap = (channel_entropy(*box(r0, r1, q0, q1))
                 + channel_entropy(*varo(r0, r1, q0, q1))
                 - channel_entropy(r0, r1) - channel_entropy(q0, q1))
    print(f"chain rule gap = {chain_gap:.3e}")


if __name__ == "__main__":
    main()
