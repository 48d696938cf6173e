#!/usr/bin/env python3
"""Reference values for the covariance-matrix calculus module.

Computes, with plain numpy/scipy linear algebra, every number frozen into
tests/test_gausscm.cpp: Schur complements, log-det information quantities,
the Gaussian transpose/recovery channel, symplectic spectra, matrix means,
g-functions, steerability values (including the bundled 8x8 fixture), and
the measurement-limit family.  Also property-checks the identities the C++
module asserts, so any convention mismatch is caught here first.

Run: python3 tools/oracles/gausscm_oracle.py
"""
import numpy as np
from scipy.linalg import expm

rng = np.random.default_rng(20260815)

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
SZ = np.diag([1.0, -1.0])


def omega(nmodes):
    return np.kron(np.eye(nmodes), J2)


def sym_pow(a, t):
    w, q = np.linalg.eigh(a)
    if np.min(w) <= 0 and t < 1:
        assert np.min(w) > -1e-12, f"not PSD: {np.min(w)}"
        w = np.clip(w, 0, None)
    return (q * w ** t) @ q.T


def symplectic_eigs(v):
    n = v.shape[0] // 2
    x = sym_pow(v, 0.5)
    m = x @ (1j * omega(n)) @ x
    w = np.linalg.eigvalsh(m)
    return np.sort(w)[n:]


def g_funcs(a):
    nu = symplectic_eigs(a)
    gp = float(np.sum(np.maximum(np.log(nu), 0.0)))
    gm = float(np.sum(np.maximum(-np.log(nu), 0.0)))
    return gp, gm


def schur(v, pivot):
    keep = [i for i in range(v.shape[0]) if i not in set(pivot)]
    a = v[np.ix_(pivot, pivot)]
    return v[np.ix_(keep, keep)] - v[np.ix_(keep, pivot)] @ np.linalg.solve(a, v[np.ix_(pivot, keep)])


def M(v):
    return 0.5 * np.linalg.slogdet(v)[1]


def mi(v, ra, rb):
    ra, rb = list(ra), list(rb)
    return M(v[np.ix_(ra, ra)]) + M(v[np.ix_(rb, rb)]) - M(v[np.ix_(ra + rb, ra + rb)])


def cmi(v, ra, rb, rc):
    ra, rb, rc = list(ra), list(rb), list(rc)
    return (M(v[np.ix_(ra + rc, ra + rc)]) + M(v[np.ix_(rb + rc, rb + rc)])
            - M(v) - M(v[np.ix_(rc, rc)]))


def geomean(a, b, t=0.5):
    rt = sym_pow(a, 0.5)
    rti = sym_pow(a, -0.5)
    return rt @ sym_pow(rti @ b @ rti, t) @ rt


def gamma_sharp(v):
    n = v.shape[0] // 2
    om = omega(n)
    return geomean(v, om @ np.linalg.inv(v) @ om.T)


def williamson(v):
    """v = S diag(nu_i I2) S^T with S symplectic; returns (S, nu)."""
    x = sym_pow(v, 0.5)
    n = v.shape[0] // 2
    a = x @ omega(n) @ x                      # antisymmetric
    w, u = np.linalg.eigh(1j * a)             # eigenpairs come in +-nu
    cols = []
    nu = []
    for k in range(n, 2 * n):                 # positive eigenvalues ascending
        nu.append(w[k])
        uk = u[:, k]
        xk = np.sqrt(2) * np.real(uk)
        yk = np.sqrt(2) * np.imag(uk)
        cols += [yk, xk]                      # order (y, x) gives  O^T A O = nu J2
    o = np.column_stack(cols)
    dhalf = np.kron(np.diag(1.0 / np.sqrt(nu)), np.eye(2))
    s = x @ o @ dhalf
    nu = np.array(nu)
    assert np.max(np.abs(s @ omega(n) @ s.T - omega(n))) < 1e-9, "S not symplectic"
    assert np.max(np.abs(s @ np.kron(np.diag(nu), np.eye(2)) @ s.T - v)) < 1e-9
    return s, nu


def purification(v):
    """[[V, L],[L^T, Delta]] pure, with L = S (+) sqrt(nu^2-1) sigma_z."""
    s, nu = williamson(v)
    n = len(nu)
    wf = np.kron(np.diag(np.sqrt(np.maximum(nu * nu - 1.0, 0.0))), SZ)
    delta = np.kron(np.diag(nu), np.eye(2))
    top = np.hstack([v, s @ wf])
    bot = np.hstack([wf @ s.T, delta])
    g = np.vstack([top, bot])
    assert np.max(np.abs(symplectic_eigs(g) - 1.0)) < 1e-8, "purification not pure"
    return g


def random_qcm(nmodes, nu_max, scale=0.35):
    h = rng.normal(0, scale, (2 * nmodes, 2 * nmodes))
    h = 0.5 * (h + h.T)
    s = expm(omega(nmodes) @ h)
    nu = rng.uniform(1.0, nu_max, nmodes)
    return s @ np.kron(np.diag(nu), np.eye(2)) @ s.T


def petz_channel(v, da, db, dc):
    """Recovery C -> BC built from the B,Z,C blocks of v (dims in rows)."""
    b = v[da:da + db, da:da + db]
    z = v[da:da + db, da + db:]
    c = v[da + db:, da + db:]
    zci = z @ np.linalg.inv(c)
    h = np.zeros((da + db + dc, da + dc))
    h[:da, :da] = np.eye(da)
    h[da:da + db, da:] = zci
    h[da + db:, da:] = np.eye(dc)
    k = np.zeros((da + db + dc, da + db + dc))
    k[da:da + db, da:da + db] = b - zci @ z.T
    return h, k


def rel_ent(a, b):
    d = a.shape[0]
    return 0.5 * (np.linalg.slogdet(b)[1] - np.linalg.slogdet(a)[1]
                  + np.trace(np.linalg.solve(b, a)) - d)


def fid(a, b):
    harm = 2.0 * np.linalg.inv(np.linalg.inv(a) + np.linalg.inv(b))
    f2 = np.exp(np.linalg.slogdet(harm)[1] - 0.5 * (np.linalg.slogdet(a)[1] + np.linalg.slogdet(b)[1]))
    return np.sqrt(f2)


print("=== 8x8 steering-monogamy fixture ===")
V8 = np.array([
    [1.2, -0.3, 0.4, -2.7, 1.8, -1.9, 0.4, -0.1],
    [-0.3, 0.9, -1.2, 0.4, -1.2, 0.5, -0.4, 0.1],
    [0.4, -1.2, 4.5, 1.6, -1.4, 1.8, -0.1, -0.3],
    [-2.7, 0.4, 1.6, 12.0, -9.5, 10.1, -1.4, -0.3],
    [1.8, -1.2, -1.4, -9.5, 11.9, -11.5, 1.6, 0.8],
    [-1.9, 0.5, 1.8, 10.1, -11.5, 11.9, -1.0, -1.4],
    [0.4, -0.4, -0.1, -1.4, 1.6, -1.0, 2.4, -2.0],
    [-0.1, 0.1, -0.3, -0.3, 0.8, -1.4, -2.0, 2.8],
])
assert np.max(np.abs(V8 - V8.T)) == 0
nu8 = symplectic_eigs(V8)
print("nu(V8)         =", " ".join(f"{x:.15g}" for x in nu8))
print("nu_min         =", f"{nu8[0]:.15g}")
print("purity_defect  =", f"{np.prod(nu8) - 1:.15g}")
print("min eig V+iOm  =", f"{np.min(np.linalg.eigvalsh(V8 + 1j * omega(4))):.6g}")
A_rows, B1_rows, B2_rows = [0, 1, 2, 3], [4, 5], [6, 7]
g_b12_a = g_funcs(schur(V8, B1_rows + B2_rows))[1]
m1 = V8[np.ix_(A_rows + B1_rows, A_rows + B1_rows)]
g_b1_a = g_funcs(schur(m1, [4, 5]))[1]
m2 = V8[np.ix_(A_rows + B2_rows, A_rows + B2_rows)]
g_b2_a = g_funcs(schur(m2, [4, 5]))[1]
print("G(B1B2>A)      =", f"{g_b12_a:.15g}")
print("G(B1>A)        =", f"{g_b1_a:.15g}")
print("G(B2>A)        =", f"{g_b2_a:.15g}")
print("mon2 gap       =", f"{g_b12_a - g_b1_a - g_b2_a:.15g}")
# mon steer 1 on the same fixture: A steers the pair
g_a_b12 = g_funcs(schur(V8, A_rows))[1]
g_a_b1 = g_funcs(schur(m1, [0, 1, 2, 3]))[1]
g_a_b2 = g_funcs(schur(m2, [0, 1, 2, 3]))[1]
print("G(A>B1B2)      =", f"{g_a_b12:.15g}")
print("G(A>B1)        =", f"{g_a_b1:.15g}")
print("G(A>B2)        =", f"{g_a_b2:.15g}")
print("mon1 gap       =", f"{g_a_b12 - g_a_b1 - g_a_b2:.15g}")

print()
print("=== scalar closed forms ===")
print("schur 2x2 (a=2,b=1.5,x=0.7): ", f"{1.5 - 0.49 / 2.0:.15g}")
nu_th = symplectic_eigs(np.diag([3.7, 3.7]))
print("thermal nu(diag(3.7,3.7))   =", f"{nu_th[0]:.15g}")
gp4, gm4 = g_funcs(np.diag([4.0, 4.0]))
print("g(diag(4,4))                = (", f"{gp4:.15g}", ",", f"{gm4:.15g}", ")  ln4 =", f"{np.log(4):.15g}")
gpq, gmq = g_funcs(np.diag([0.25, 0.25]))
print("g(diag(.25,.25))            = (", f"{gpq:.15g}", ",", f"{gmq:.15g}", ")")
gs_th = gamma_sharp(np.diag([3.7, 3.7]))
print("gamma#(diag(3.7,3.7)) - I   max =", f"{np.max(np.abs(gs_th - np.eye(2))):.3g}")
a_s, b_s = 2.0, 3.0
d_s = rel_ent(np.diag([a_s, a_s]), np.diag([b_s, b_s]))
f_s = fid(np.diag([a_s, a_s]), np.diag([b_s, b_s]))
print("D(2I2||3I2)                 =", f"{d_s:.15g}", " analytic:", f"{np.log(1.5) + 2.0 / 3.0 - 1.0:.15g}")
print("F(2I2||3I2)                 =", f"{f_s:.15g}", " analytic sqrt(24/25):", f"{np.sqrt(0.96):.15g}")
print("-2 ln F                     =", f"{-2 * np.log(f_s):.15g}")
gm_diag = geomean(np.diag([1.0, 4.0]), np.diag([9.0, 16.0]), 0.5)
print("diag geomean                =", f"{gm_diag[0, 0]:.15g}", f"{gm_diag[1, 1]:.15g}")


def tmsv(r):
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    return np.block([[c * np.eye(2), s * SZ], [s * SZ, c * np.eye(2)]])


print()
print("=== two-mode squeezed family ===")
for r in (0.3, 0.6, 0.9):
    v = tmsv(r)
    g = g_funcs(schur(v, [0, 1]))[1]
    print(f"steer TMSV r={r}: {g:.15g}  ln cosh {2 * r}: {np.log(np.cosh(2 * r)):.15g}")
    assert abs(g - np.log(np.cosh(2 * r))) < 1e-12

# squeezed thermal: V = nu * TMSV(r);  steer = ln(cosh(2r)/nu), upper = half_mi = ln cosh(2r)
nu_t, r_t = 1.2, 0.5
Vst = nu_t * tmsv(r_t)
steer_st = g_funcs(schur(Vst, [0, 1]))[1]
gs_st = gamma_sharp(Vst)
upper_st = M(gs_st[:2, :2])
half_mi_st = 0.5 * mi(Vst, [0, 1], [2, 3])
print(f"squeezed-thermal nu=1.2 r=0.5: steer={steer_st:.15g} (ln(cosh1/1.2)={np.log(np.cosh(1.0) / 1.2):.15g})")
print(f"  upper={upper_st:.15g}  half_mi={half_mi_st:.15g}  ln cosh 1={np.log(np.cosh(1.0)):.15g}")

print()
print("=== Markov chain instance (1 mode per party) ===")
C0 = np.array([[1.5, 0.2], [0.2, 1.1]])
Z0 = np.array([[0.3, -0.1], [0.25, 0.4]])
Y0 = np.array([[0.5, 0.1], [-0.2, 0.3]])
Ci = np.linalg.inv(C0)
B0 = Z0 @ Ci @ Z0.T + np.array([[0.8, 0.1], [0.1, 0.6]])
A0 = Y0 @ Ci @ Y0.T + np.array([[1.0, -0.15], [-0.15, 0.9]])
X0 = Y0 @ Ci @ Z0.T
V6 = np.block([[A0, X0, Y0], [X0.T, B0, Z0], [Y0.T, Z0.T, C0]])
rA, rB, rC = [0, 1], [2, 3], [4, 5]
print("min eig V6      =", f"{np.min(np.linalg.eigvalsh(V6)):.15g}")
print("I_M Markov      =", f"{cmi(V6, rA, rB, rC):.3g}")
V6p = V6.copy()
V6p[np.ix_(rA, rB)] += 0.01
V6p[np.ix_(rB, rA)] += 0.01
print("min eig V6p     =", f"{np.min(np.linalg.eigvalsh(V6p)):.15g}")
cmi_p = cmi(V6p, rA, rB, rC)
print("I_M perturbed   =", f"{cmi_p:.15g}")
# lower bound chain
Xp = V6p[np.ix_(rA, rB)]
D0 = Xp - Y0 @ Ci @ Z0.T
w_ac = schur(V6p[np.ix_(rA + rC, rA + rC)], [2, 3])
w_bc = schur(V6p[np.ix_(rB + rC, rB + rC)], [2, 3])
b1 = 0.5 * np.trace(np.linalg.solve(w_ac, D0) @ np.linalg.solve(w_bc, D0.T))
Ai, Bi = np.linalg.inv(V6p[np.ix_(rA, rA)]), np.linalg.inv(V6p[np.ix_(rB, rB)])
b2 = 0.5 * np.trace(Ai @ D0 @ Bi @ D0.T)
print("bound1          =", f"{b1:.15g}")
print("bound2          =", f"{b2:.15g}")
assert cmi_p >= b1 - 1e-12 >= b2 - 1e-12 >= -1e-12
# Petz on the perturbed instance: recovered = V tilde, D(V||Vt) = I_M
h_r, k_r = petz_channel(V6p, 2, 2, 2)
vac = V6p[np.ix_(rA + rC, rA + rC)]
vt = h_r @ vac @ h_r.T + k_r
vt_direct = V6p.copy()
vt_direct[np.ix_(rA, rB)] = Y0 @ Ci @ Z0.T
vt_direct[np.ix_(rB, rA)] = (Y0 @ Ci @ Z0.T).T
assert np.max(np.abs(vt - vt_direct)) < 1e-12
d_vt = rel_ent(V6p, vt)
print("D(V||Vtilde)    =", f"{d_vt:.15g}", " I_M:", f"{cmi_p:.15g}", " diff:", f"{d_vt - cmi_p:.3g}")
print("-2lnF(V,Vt)     =", f"{-2 * np.log(fid(V6p, vt)):.15g}")
# Markov instance: petz reproduces V6 exactly
h_m, k_m = petz_channel(V6, 2, 2, 2)
assert np.max(np.abs(h_m @ V6[np.ix_(rA + rC, rA + rC)] @ h_m.T + k_m - V6)) < 1e-12
# saturation conditions on V6: schur equality + inverse block-diagonality
assert np.max(np.abs(schur(V6, rB + rC) - schur(V6[np.ix_(rA + rC, rA + rC)], [2, 3]))) < 1e-12
V6i = np.linalg.inv(V6)
assert np.max(np.abs(V6i[np.ix_(rA, rB)])) < 1e-12

print()
print("=== cmi scalar hand formula (3x3, 1-dim parts) ===")
V3 = np.array([[2.0, 0.5, 0.4], [0.5, 1.8, 0.3], [0.4, 0.3, 1.6]])
i3 = cmi(V3, [0], [1], [2])
a3, b3, c3 = 2.0, 1.8, 1.6
x3, y3, z3 = 0.5, 0.4, 0.3
i3_hand = 0.5 * np.log((a3 * c3 - y3 ** 2) * (b3 * c3 - z3 ** 2) / (c3 * np.linalg.det(V3)))
d3 = x3 - y3 * z3 / c3
b1_3 = 0.5 * d3 ** 2 / ((a3 - y3 ** 2 / c3) * (b3 - z3 ** 2 / c3))
b2_3 = 0.5 * d3 ** 2 / (a3 * b3)
print("I_M(3x3)        =", f"{i3:.15g}", " hand:", f"{i3_hand:.15g}")
print("b1(3x3)         =", f"{b1_3:.15g}")
print("b2(3x3)         =", f"{b2_3:.15g}")
assert i3 >= b1_3 >= b2_3

print()
print("=== property sweeps (random) ===")
# log-det identities + SSA (classical PD, 3 x 1-mode parts)
worst_id1 = worst_id2 = worst_ssa = worst_op = 0.0
for _ in range(500):
    g = rng.normal(0, 1, (6, 9))
    v = g @ g.T / 9 + 0.05 * np.eye(6)
    ic = cmi(v, [0, 1], [2, 3], [4, 5])
    i_schur = mi(schur(v, [4, 5]), [0, 1], [2, 3])
    i_inv = mi(np.linalg.inv(v), [0, 1], [2, 3])
    worst_id1 = max(worst_id1, abs(ic - i_schur))
    worst_id2 = max(worst_id2, abs(ic - i_inv))
    worst_ssa = min(worst_ssa, ic)
    diff = schur(v[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])], [2, 3]) - schur(v, [2, 3, 4, 5])
    worst_op = min(worst_op, np.min(np.linalg.eigvalsh(diff)))
print("max |I_M - I_M(V/V_C)|  =", f"{worst_id1:.3g}")
print("max |I_M - I_M(V^-1)|   =", f"{worst_id2:.3g}")
print("min I_M (SSA)           =", f"{worst_ssa:.3g}")
print("min eig op-SSA          =", f"{worst_op:.3g}")

# det factorization + block inverse on random 6x6
for _ in range(200):
    g = rng.normal(0, 1, (6, 6))
    v = g @ g.T + 0.1 * np.eye(6)
    sc = schur(v, [0, 1, 2])
    assert abs(np.linalg.det(v) - np.linalg.det(v[:3, :3]) * np.linalg.det(sc)) < 1e-8 * abs(np.linalg.det(v))
    inv_block = np.linalg.inv(v)[3:, 3:]
    assert np.max(np.abs(inv_block - np.linalg.inv(sc))) < 1e-8

# rank additivity with pseudo-inverse pivot on rank-deficient PSD
for _ in range(200):
    g = rng.normal(0, 1, (6, 4))
    v = g @ g.T                      # rank 4
    a = v[:3, :3]
    sc = v[3:, 3:] - v[3:, :3] @ np.linalg.pinv(a) @ v[:3, 3:]
    rk = np.linalg.matrix_rank(v, tol=1e-10)
    rka = np.linalg.matrix_rank(a, tol=1e-10)
    rks = np.linalg.matrix_rank(sc, tol=1e-10)
    assert rk == rka + rks, (rk, rka, rks)

# geometric mean: det identity + congruence covariance
for _ in range(100):
    g1 = rng.normal(0, 1, (4, 4))
    g2 = rng.normal(0, 1, (4, 4))
    pa = g1 @ g1.T + 0.2 * np.eye(4)
    pb = g2 @ g2.T + 0.2 * np.eye(4)
    t = rng.uniform()
    gm = geomean(pa, pb, t)
    assert abs(np.linalg.det(gm) - np.linalg.det(pa) ** (1 - t) * np.linalg.det(pb) ** t) \
        < 1e-8 * np.linalg.det(gm)
    s = rng.normal(0, 1, (4, 4))
    lhs = geomean(s @ pa @ s.T, s @ pb @ s.T, 0.5)
    rhs = s @ geomean(pa, pb, 0.5) @ s.T
    assert np.max(np.abs(lhs - rhs)) < 1e-7 * max(1, np.max(np.abs(rhs)))

# QCM sampler: validity, det = prod nu^2, log-det ineq, INEQ2, gamma#
viol_logdet_qcm = 0
for _ in range(300):
    v = random_qcm(3, 3.0)
    nu = symplectic_eigs(v)
    assert nu[0] >= 1 - 1e-9
    assert abs(np.linalg.det(v) - np.prod(nu) ** 2) < 1e-6 * np.linalg.det(v)
    lhs = (M(v[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])]) + M(v[np.ix_([2, 3, 4, 5], [2, 3, 4, 5])])
           - M(v[:2, :2]) - M(v[2:4, 2:4]))
    if lhs < -1e-9:
        viol_logdet_qcm += 1
    # operator monogamy: V_AC/V_A >= Omega (V_BC/V_B)^-1 Omega^T
    vac = v[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])]
    vbc = v[np.ix_([2, 3, 4, 5], [2, 3, 4, 5])]
    sc_a = schur(vac, [0, 1])
    sc_b = schur(vbc, [0, 1])
    om1 = omega(1)
    diff = sc_a - om1 @ np.linalg.inv(sc_b) @ om1.T
    assert np.min(np.linalg.eigvalsh(diff)) > -1e-9
    gs = gamma_sharp(v)
    assert np.max(np.abs(symplectic_eigs(gs) - 1)) < 1e-7
    assert np.min(np.linalg.eigvalsh(v - gs)) > -1e-9
print("log-det ineq violations on QCMs: ", viol_logdet_qcm, "/300")

# log-det ineq CAN fail for non-QCM PD matrices (scaled-down QCMs)
viol_pd = 0
for _ in range(300):
    v = 0.05 * random_qcm(3, 3.0)
    lhs = (M(v[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])]) + M(v[np.ix_([2, 3, 4, 5], [2, 3, 4, 5])])
           - M(v[:2, :2]) - M(v[2:4, 2:4]))
    if lhs < -1e-9:
        viol_pd += 1
print("log-det ineq violations on scaled PD:", viol_pd, "/300 (existence required)")
assert viol_pd > 0

# CP map monotonicity:  Gamma(V_AB)/Gamma(V_B) >= V_AB/V_B  (map acts on trailing B)
for _ in range(200):
    g = rng.normal(0, 1, (4, 6))
    v = g @ g.T / 6 + 0.1 * np.eye(4)       # A = 2 rows, B = 2 rows
    gg = rng.normal(0, 1, (4, 6))
    gam = gg @ gg.T / 6 + 0.1 * np.eye(4)   # B = first 2 rows, B' = last 2
    m = np.zeros((6, 6))
    m[:2, :2] = v[:2, :2]
    m[:2, 2:4] = v[:2, 2:]
    m[2:4, :2] = v[2:, :2]
    m[2:4, 2:4] = v[2:, 2:] + gam[:2, :2]
    m[2:4, 4:] = gam[:2, 2:]
    m[4:, 2:4] = gam[2:, :2]
    m[4:, 4:] = gam[2:, 2:]
    out = schur(m, [2, 3])                  # on (A, B')
    lhs = schur(out, [2, 3])                # Gamma(V_AB)/Gamma(V_B)
    rhs = schur(v, [2, 3])
    assert np.min(np.linalg.eigvalsh(lhs - rhs)) > -1e-9
print("CP-map Schur monotonicity: ok (200 random)")

# steerability: additivity under direct sums; decrease under appended noise on steering side
for _ in range(100):
    v1 = random_qcm(2, 2.5)
    v2 = random_qcm(2, 2.5)
    vd = np.zeros((8, 8))
    vd[:4, :4] = v1
    vd[4:, 4:] = v2
    # direct-sum parts: A = (mode0 of v1, mode0 of v2), B = (mode1 of v1, mode1 of v2)
    perm = [0, 1, 4, 5, 2, 3, 6, 7]
    vp = vd[np.ix_(perm, perm)]
    g_joint = g_funcs(schur(vp, [0, 1, 2, 3]))[1]
    g_1 = g_funcs(schur(v1, [0, 1]))[1]
    g_2 = g_funcs(schur(v2, [0, 1]))[1]
    assert abs(g_joint - g_1 - g_2) < 1e-9
    noise = np.zeros((4, 4))
    nblk = rng.normal(0, 1, (2, 3))
    noise[:2, :2] = nblk @ nblk.T
    assert g_funcs(schur(v1 + noise, [0, 1]))[1] <= g_1 + 1e-9
print("steerability additivity + noise monotonicity: ok (100 random)")

# Petz identity D(V||Vtilde) = I_M on random 3-party PD
for _ in range(200):
    g = rng.normal(0, 1, (6, 9))
    v = g @ g.T / 9 + 0.05 * np.eye(6)
    h, k = petz_channel(v, 2, 2, 2)
    vt = h @ v[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])] @ h.T + k
    assert abs(rel_ent(v, vt) - cmi(v, [0, 1], [2, 3], [4, 5])) < 1e-9
    assert rel_ent(v, vt) >= -2 * np.log(fid(v, vt)) - 1e-9
print("Petz rel-ent identity + fidelity bound: ok (200 random)")

# hierarchy via gamma#-ansatz: half I_M >= upper >= steer on random 2-mode QCMs
for _ in range(300):
    v = random_qcm(2, 3.0)
    gs = gamma_sharp(v)
    upper = M(gs[:2, :2])
    hmi = 0.5 * mi(v, [0, 1], [2, 3])
    st = g_funcs(schur(v, [0, 1]))[1]
    assert hmi >= upper - 1e-9, (hmi, upper)
    assert upper >= st - 1e-9, (upper, st)
print("gamma#-candidate hierarchy: ok (300 random)")

print()
print("=== measurement-limit family ===")
S_t = np.block([[np.cosh(0.4) * np.eye(2), np.sinh(0.4) * SZ],
                [np.sinh(0.4) * SZ, np.cosh(0.4) * np.eye(2)]])
Vm = S_t @ np.diag([1.3, 1.3, 1.1, 1.1]) @ S_t.T
gsV = gamma_sharp(Vm)
w_mix = 0.98 * Vm + 0.02 * gsV
tau = gamma_sharp(w_mix)
assert np.min(np.linalg.eigvalsh(Vm - tau)) > -1e-12
gpur = purification(Vm)
Svm, nuvm = williamson(Vm)
L = gpur[:4, 4:]
Delta = gpur[4:, 4:]
print("nu(Vm)         =", " ".join(f"{x:.15g}" for x in nuvm))
ts = [1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001]
prev = None
for t in ts:
    tau_t = geomean(tau, gsV, t)
    sig = L.T @ np.linalg.solve(Vm - tau_t, L) - Delta
    assert np.max(np.abs(symplectic_eigs(sig) - 1)) < 1e-6, "sigma_C not pure"
    ext = np.zeros((8, 8))
    ext[:, :] = gpur
    ext[4:, 4:] += sig
    rec = schur(ext, [4, 5, 6, 7])
    assert np.max(np.abs(rec - tau_t)) < 1e-8
    dist = np.linalg.norm(rec - tau, "fro")
    pd_ = np.prod(symplectic_eigs(rec)) - 1
    icond = cmi(ext, [0, 1], [2, 3], [4, 5, 6, 7])
    print(f"t={t:<6g} dist={dist:.15g} purity_defect={pd_:.3g} cmi={icond:.15g}")
    if prev is not None:
        assert dist < prev
    prev = dist
print("I_M(A:B)_tau   =", f"{mi(tau, [0, 1], [2, 3]):.15g}")
print("steer(Vm)      =", f"{g_funcs(schur(Vm, [0, 1]))[1]:.15g}")
print("upper(Vm)      =", f"{M(gsV[:2, :2]):.15g}")
print("half_mi(Vm)    =", f"{0.5 * mi(Vm, [0, 1], [2, 3]):.15g}")

print()
print("all oracle checks passed")
