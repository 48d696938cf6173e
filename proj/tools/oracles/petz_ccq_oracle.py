#!/usr/bin/env python3
"""Transpose-map recovery of ccq pure-pair states: numeric -2 ln F vs closed forms.

Builds tau on (A, C, B1B2) with B1 = s_(a xor c), B2 = s_c for pure qubit
pairs of overlap f, applies the Petz transpose map rebuilding either C or A
from B, and prints the recovered-state fidelity decay next to the two
candidate closed forms so the pairing and log base are pinned numerically.
"""
import numpy as np
import scipy.linalg as sla


def mpow(h, p):
    w, v = np.linalg.eigh(h)
    w = np.where(w > 1e-12, w, 0.0)
    wp = np.where(w > 0, np.power(w, p, where=w > 0), 0.0)
    return (v * wp) @ v.conj().T


def fidelity(a, b):
    sa = mpow(a, 0.5)
    m = sa @ b @ sa
    w = np.linalg.eigh(m)[0]
    return float(np.sum(np.sqrt(np.clip(w, 0, None))))


def ptrace(m, dims, keep):
    k = len(dims)
    t = m.reshape(dims + dims)
    drop = [i for i in range(k) if i not in keep]
    for i in sorted(drop, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
    d = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d, d)


def permute(m, dims, perm):
    k = len(dims)
    t = m.reshape(dims + dims)
    axes = list(perm) + [p + k for p in perm]
    t = np.transpose(t, axes)
    d = int(np.prod(dims))
    return t.reshape(d, d)


def ccq(s0, s1):
    out = np.zeros((16, 16), dtype=complex)
    for a in range(2):
        for c in range(2):
            pa = np.zeros((2, 2)); pa[a, a] = 1
            pc = np.zeros((2, 2)); pc[c, c] = 1
            b = np.kron([s0, s1][a ^ c], [s0, s1][c])
            out += 0.25 * np.kron(pa, np.kron(pc, b))
    return out


def petz_rebuild_middle(tau, dims):
    # channel slot2 -> (slot1, slot2) applied to the (slot0, slot2) marginal
    d0, d1, d2 = dims
    ref = ptrace(tau, dims, [1, 2])
    rin = ptrace(tau, dims, [2])
    K = mpow(ref, 0.5) @ np.kron(np.eye(d1), mpow(rin, -0.5))
    m02 = ptrace(tau, dims, [0, 2])
    emb = permute(np.kron(m02, np.eye(d1)), [d0, d2, d1], [0, 2, 1])
    KL = np.kron(np.eye(d0), K)
    return KL @ emb @ KL.conj().T


def main():
    for f in (0.6, 0.25, 0.9):
        psi0 = np.array([1.0, 0.0])
        psi1 = np.array([f, np.sqrt(1 - f * f)])
        s0 = np.outer(psi0, psi0.conj())
        s1 = np.outer(psi1, psi1.conj())
        tau = ccq(s0, s1)

        recC = petz_rebuild_middle(tau, [2, 2, 4])            # rebuild C from B
        taup = permute(tau, [2, 2, 4], [1, 0, 2])
        recA = petz_rebuild_middle(taup, [2, 2, 4])           # rebuild A from B
        vC = -2 * np.log(fidelity(tau, recC))
        vA = -2 * np.log(fidelity(taup, recA))

        fC = -np.log(0.5 * (1 + f**2 + (1 - f**2) ** 1.5))
        fA = -np.log(0.5 * (1 + f**4 + (1 - f**2) * np.sqrt(1 + f**2)))
        print(f"f={f}")
        print(f"  rebuild C: numeric {vC:.15f}  formula {fC:.15f}  diff {vC-fC:+.2e}")
        print(f"  rebuild A: numeric {vA:.15f}  formula {fA:.15f}  diff {vA-fA:+.2e}")
        print(f"  (log2 variants: C {fC/np.log(2):.15f}  A {fA/np.log(2):.15f})")


if __name__ == "__main__":
    main()
