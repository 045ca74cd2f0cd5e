"""Independent high-precision oracle (mpmath) for frozen reference values.

Run: python3 oracles/derived_values.py > crates/ebq-core/tests/data/derived_oracle.json
"""
import json
import mpmath as mp

mp.mp.dps = 40

N, Q, R, CLEV = 2, mp.mpc("0.45", "0.05"), mp.mpf("4.3"), mp.mpf("1.2")
LQ = mp.log(Q)


def qpow(a):
    return mp.exp(a * LQ)


P = qpow(2 * R)
RS = R - CLEV
PS = qpow(2 * RS)
ETA = -mp.mpf(2 * N - 1) / 2
XI = qpow(-2 * ETA)


def qp1(x, p):
    return mp.qp(x, p)


def qp2(x, p1, p2):
    res, a = mp.mpc(1), mp.mpc(x)
    while abs(a) > mp.mpf(10) ** -45:
        res *= mp.qp(a, p1)
        a *= p2
    return res


def theta(z, p):
    return qp1(z, p) * qp1(p / z, p) * qp1(p, p)


def br(u, starred=False):
    r, p = (RS, PS) if starred else (R, P)
    return mp.exp((u * u / r - u) * LQ) * theta(mp.exp(2 * u * LQ), p)


def qnum(x):
    return (qpow(x) - qpow(-x)) / (Q - 1 / Q)


def qplus(x):
    return (qpow(x) + qpow(-x)) / (Q - 1 / Q)


def gram(m, n):
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        b[i][i] = 2 if i < n - 1 else 1
        if i + 1 < n:
            b[i][i + 1] = b[i + 1][i] = -1
    f = qnum(CLEV * m) / m * (1 - P ** m) / (1 - PS ** m) * qpow(-CLEV * m)
    return [[qnum(b[i][j] * m) * f for j in range(n)] for i in range(n)]


def eps(sign, j, m, n):
    eta = -mp.mpf(2 * n - 1) / 2
    cm = qnum(eta * m) / (qnum(m) ** 2 * qnum(2 * eta * m))
    pre = qpow(sign * j * m) * cm
    out = []
    for k in range(1, n + 1):
        t = qpow(sign * eta * m) * qnum(k * m) if k < j else sign * qplus((eta + k) * m)
        out.append(pre * t)
    return out


def brace(z, p):
    return qp2(z, p, XI * XI)


def rho_tilde(u):
    z = mp.exp(2 * u * LQ)
    b = lambda x: brace(x, P)
    q2 = Q * Q
    num = b(XI * z) ** 2 * b(XI * XI / q2 * z) * b(q2 * z) * b(P * XI * XI / z) * b(P / z) * b(P * XI * q2 / z) * b(P * XI / q2 / z)
    den = b(XI * XI * z) * b(z) * b(XI * q2 * z) * b(XI / q2 * z) * b(P * XI / z) ** 2 * b(P * XI * XI / q2 / z) * b(P * q2 / z)
    return num / den


def rho0(u):
    return qpow(-1) * mp.exp(2 * u / R * LQ) * rho_tilde(u)


def c2(x):
    return [float(mp.re(x)), float(mp.im(x))]


u = mp.mpc("0.37", "0.11")
s1 = mp.mpc("0.31", "0.07")
x = mp.mpc("0.2", "0.05")
nn = 1 / (qpow(mp.mpf(1) / 2) + qpow(-mp.mpf(1) / 2))
den = (1 - Q * x) * (1 - x / Q)
out = {
    "params": {"N": N, "q": c2(Q), "r": float(R), "c": float(CLEV)},
    "qpoch1_0.2_0.3": c2(qp1(mp.mpf("0.2"), mp.mpf("0.3"))),
    "qpoch2_0.1_0.2_0.3": c2(qp2(mp.mpf("0.1"), mp.mpf("0.2"), mp.mpf("0.3"))),
    "theta_z0.7+0.2i_p0.3+0.1i": c2(theta(mp.mpc("0.7", "0.2"), mp.mpc("0.3", "0.1"))),
    "bracket": c2(br(u)),
    "bracket_starred": c2(br(u, True)),
    "gram_m2": [[c2(v) for v in row] for row in gram(2, N)],
    "gram_m-3": [[c2(v) for v in row] for row in gram(-3, N)],
    "eps_plus1_m3": [c2(v) for v in eps(1, 1, 3, N)],
    "eps_minus2_m3": [c2(v) for v in eps(-1, 2, 3, N)],
    "fermion_ns": c2(mp.sqrt(x) * (1 - x) / den),
    "fermion_r": c2(nn * (1 - x) * (1 + x) / den),
    "bbar": c2(br(u) / br(u + 1)),
    "c_coef": c2(br(1) * br(s1 + u) / (br(s1) * br(u + 1))),
    "cbar_coef": c2(br(1) * br(s1 - u) / (br(s1) * br(u + 1))),
    "b_coef": c2(br(s1 + 1) * br(s1 - 1) * br(u) / (br(s1) ** 2 * br(u + 1))),
    "rho0": c2(rho0(u)),
}
print(json.dumps(out, indent=1))
