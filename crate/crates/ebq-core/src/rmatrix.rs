//! Ordered index set, dynamical parameter, coefficient functions, assembly,
//! scalar prefactors and the gauge data relating R-matrix entries to face weights.

use crate::error::{EbqError, Result};
use crate::special_functions::{brace, c, cpow, theta_raw, AlgebraParams, C};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

/// Labels in the order 1 ≺ 2 ≺ … ≺ N ≺ 0 ≺ −N ≺ … ≺ −1.
pub fn indices(n: usize) -> Vec<i32> {
    let n = n as i32;
    (1..=n).chain(std::iter::once(0)).chain((1..=n).rev().map(|j| -j)).collect()
}

pub fn pos(j: i32, n: usize) -> usize {
    let n = n as i32;
    let p = if j > 0 {
        j - 1
    } else if j == 0 {
        n
    } else {
        2 * n + 1 + j
    };
    p as usize
}

pub fn label(p: usize, n: usize) -> i32 {
    indices(n)[p]
}

pub fn prec(a: i32, b: i32, n: usize) -> bool {
    pos(a, n) < pos(b, n)
}

/// `ε_j`, `−ε_{|j|}` or 0 in ε-coordinates.
pub fn weight(j: i32, n: usize) -> Vec<i32> {
    let mut w = vec![0; n];
    if j > 0 {
        w[(j - 1) as usize] = 1;
    } else if j < 0 {
        w[(-j - 1) as usize] = -1;
    }
    w
}

/// The label whose weight equals `d`, if any.
pub fn step(d: &[i32], n: usize) -> Option<i32> {
    indices(n).into_iter().find(|&j| weight(j, n) == d)
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicalParam {
    pub s: Vec<C>,
}

impl DynamicalParam {
    /// Rejects non-generic values where a bracket in a denominator would vanish.
    pub fn new(s: Vec<C>, params: &AlgebraParams) -> Result<Self> {
        if s.len() != params.n {
            return Err(EbqError::InvalidParams(format!("s has {} components, N = {}", s.len(), params.n)));
        }
        let scale = params.br(c(0.5, 0.0)).norm();
        let bad = |x: C| params.br(x).norm() < 1e-9 * scale;
        for j in 0..s.len() {
            if bad(s[j]) || bad(2.0 * s[j] + 1.0) || bad(2.0 * s[j] - 1.0) {
                return Err(EbqError::InvalidParams(format!("s_{} = {} is not generic", j + 1, s[j])));
            }
            for k in j + 1..s.len() {
                if bad(s[j] - s[k]) || bad(s[j] + s[k]) {
                    return Err(EbqError::InvalidParams(format!("s_{} and s_{} are not generic", j + 1, k + 1)));
                }
            }
        }
        Ok(DynamicalParam { s })
    }

    /// Unchecked construction (used for shifted evaluations inside identities).
    pub fn raw(s: Vec<C>) -> Self {
        DynamicalParam { s }
    }

    pub fn get(&self, j: i32) -> C {
        lookup(&self.s, j)
    }

    pub fn shifted(&self, w: &[i32], k: f64) -> Self {
        DynamicalParam { s: self.s.iter().zip(w).map(|(x, &d)| x + k * d as f64).collect() }
    }
}

/// `s_j` with `s_{−j} = −s_j` and `s_0 = −1/2`.
pub fn lookup(s: &[C], j: i32) -> C {
    if j > 0 {
        s[(j - 1) as usize]
    } else if j < 0 {
        -s[(-j - 1) as usize]
    } else {
        c(-0.5, 0.0)
    }
}

fn upto(j: i32, n: usize) -> usize {
    if j == 0 {
        n
    } else {
        (j - 1) as usize
    }
}

pub fn g_s(j: i32, s: &[C], pr: &AlgebraParams) -> C {
    let b = |x: C| pr.br(x);
    let sj = lookup(s, j);
    let mut v = b(sj + 1.0) / b(sj);
    for m in 1..=pr.n {
        if m as i32 == j.abs() {
            continue;
        }
        let sm = s[m - 1];
        v *= b(sj - sm + 1.0) / b(sj - sm) * b(sj + sm + 1.0) / b(sj + sm);
    }
    v
}

pub fn h_s(s: &[C], pr: &AlgebraParams) -> C {
    indices(pr.n)
        .into_iter()
        .filter(|&k| k != 0)
        .map(|k| {
            let sk = lookup(s, k);
            pr.br(sk + 0.5 + 2.0 * pr.eta) / pr.br(sk + 0.5) * g_s(k, s, pr)
        })
        .sum()
}

pub fn coef_b(u: C, sd: C, pr: &AlgebraParams) -> C {
    let b = |x: C| pr.br(x);
    b(sd + 1.0) * b(sd - 1.0) * b(u) / (b(sd) * b(sd) * b(u + 1.0))
}

pub fn coef_bbar(u: C, pr: &AlgebraParams) -> C {
    pr.br(u) / pr.br(u + 1.0)
}

pub fn coef_c(u: C, sd: C, pr: &AlgebraParams) -> C {
    pr.br(c(1.0, 0.0)) * pr.br(sd + u) / (pr.br(sd) * pr.br(u + 1.0))
}

pub fn coef_cbar(u: C, sd: C, pr: &AlgebraParams) -> C {
    pr.br(c(1.0, 0.0)) * pr.br(sd - u) / (pr.br(sd) * pr.br(u + 1.0))
}

fn dcore(u: C, a: C, bb: C, pr: &AlgebraParams) -> C {
    let b = |x: C| pr.br(x);
    let eta = pr.eta;
    b(u) * b(c(1.0, 0.0)) * b(a + bb + 1.0 + eta - u) / (b(eta - u) * b(u + 1.0) * b(a + bb + 1.0))
}

/// `d(u, s_{j1}, s_{j2})` for `j1 ≺ j2`.
pub fn coef_d(u: C, j1: i32, j2: i32, s: &[C], pr: &AlgebraParams) -> C {
    let n = pr.n;
    let b = |x: C| pr.br(x);
    let (a, bb) = (lookup(s, j1), lookup(s, j2));
    let core = dcore(u, a, bb, pr);
    if pos(j2, n) <= n {
        let mut v = g_s(j1, s, pr) * core;
        for m in 1..=upto(j1, n) {
            v *= b(a - s[m - 1]) / b(a - s[m - 1] + 1.0);
        }
        for m in 1..=upto(j2, n) {
            v *= b(bb - s[m - 1] + 1.0) / b(bb - s[m - 1]);
        }
        return v;
    }
    if pos(j1, n) >= n {
        let (k, j) = (-j1, -j2);
        let mut v = g_s(j2, s, pr) * core;
        for m in 1..=upto(j, n) {
            v *= b(bb + s[m - 1]) / b(bb + s[m - 1] + 1.0);
        }
        for m in 1..=upto(k, n) {
            v *= b(a + s[m - 1] + 1.0) / b(a + s[m - 1]);
        }
        return v;
    }
    let k = -j2;
    let mut v = g_s(j1, s, pr) * g_s(j2, s, pr) * core;
    for m in 1..=upto(j1, n) {
        v *= b(a - s[m - 1]) / b(a - s[m - 1] + 1.0);
    }
    for m in 1..=upto(k, n) {
        v *= b(bb + s[m - 1]) / b(bb + s[m - 1] + 1.0);
    }
    v
}

/// `d̄(u, s_{j1}, s_{j2})` for `j1 ≺ j2`.
pub fn coef_dbar(u: C, j1: i32, j2: i32, s: &[C], pr: &AlgebraParams) -> C {
    let n = pr.n;
    let b = |x: C| pr.br(x);
    let (a, bb) = (lookup(s, j1), lookup(s, j2));
    let core = dcore(u, a, bb, pr);
    if pos(j2, n) < n {
        let mut v = g_s(j2, s, pr) * core;
        for m in 1..=upto(j1, n) {
            v *= b(a - s[m - 1] + 1.0) / b(a - s[m - 1]);
        }
        for m in 1..=upto(j2, n) {
            v *= b(bb - s[m - 1]) / b(bb - s[m - 1] + 1.0);
        }
        return v;
    }
    if pos(j1, n) > n {
        let (k, j) = (-j1, -j2);
        let mut v = g_s(j1, s, pr) * core;
        for m in 1..=upto(j, n) {
            v *= b(bb + s[m - 1] + 1.0) / b(bb + s[m - 1]);
        }
        for m in 1..=upto(k, n) {
            v *= b(a + s[m - 1]) / b(a + s[m - 1] + 1.0);
        }
        return v;
    }
    let k = -j2;
    let mut v = core;
    for m in 1..=upto(j1, n) {
        v *= b(a - s[m - 1] + 1.0) / b(a - s[m - 1]);
    }
    for m in 1..=upto(k, n) {
        v *= b(bb + s[m - 1] + 1.0) / b(bb + s[m - 1]);
    }
    v
}

/// `e_j(u, s)`; `j = 0` gives `e_0`.
pub fn coef_e(u: C, j: i32, s: &[C], pr: &AlgebraParams) -> C {
    let b = |x: C| pr.br(x);
    let eta = pr.eta;
    let one = c(1.0, 0.0);
    if j == 0 {
        return b(eta + u) * b(one) * b(2.0 * eta - u) / (b(eta - u) * b(u + 1.0) * b(C::from(2.0 * eta)))
            - b(u) * b(one) / (b(u + 1.0) * b(C::from(2.0 * eta))) * h_s(s, pr);
    }
    let sj = lookup(s, j);
    b(one) * b(2.0 * sj + 1.0 - u) / (b(u + 1.0) * b(2.0 * sj + 1.0))
        + b(u) * b(one) * b(2.0 * sj + 1.0 + eta - u) / (b(eta - u) * b(u + 1.0) * b(2.0 * sj + 1.0)) * g_s(j, s, pr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorMode {
    None,
    Rho0,
    RhoHatSquared,
}

#[derive(Debug, Clone)]
pub struct RMatrixValue {
    pub n: usize,
    pub u: C,
    pub s: Vec<C>,
    pub mode: PrefactorMode,
    /// `ρ̂⁺(u)²` when `mode` is `RhoHatSquared` (not multiplied in).
    pub tracked: Option<C>,
    pub m: DMatrix<C>,
}

impl RMatrixValue {
    /// Coefficient of `E_{a,b} ⊗ E_{c,d}`.
    pub fn get(&self, a: i32, b: i32, cc: i32, d: i32) -> C {
        let n = self.n;
        let dim = 2 * n + 1;
        self.m[(pos(a, n) * dim + pos(cc, n), pos(b, n) * dim + pos(d, n))]
    }

    pub fn allowed(a: i32, b: i32, cc: i32, d: i32, n: usize) -> bool {
        let (wa, wb, wc, wd) = (weight(a, n), weight(b, n), weight(cc, n), weight(d, n));
        (0..n).all(|k| wa[k] + wc[k] == wb[k] + wd[k])
    }

    pub fn to_json(&self) -> Value {
        let n = self.n;
        let idx = indices(n);
        let mut entries = Vec::new();
        for &a in &idx {
            for &cc in &idx {
                for &b in &idx {
                    for &d in &idx {
                        if !Self::allowed(a, b, cc, d, n) {
                            continue;
                        }
                        let v = self.get(a, b, cc, d);
                        entries.push(json!({"row": [a, cc], "col": [b, d], "re": v.re, "im": v.im}));
                    }
                }
            }
        }
        let mut out = json!({
            "N": n,
            "u": [self.u.re, self.u.im],
            "s": self.s.iter().map(|x| json!([x.re, x.im])).collect::<Vec<_>>(),
            "prefactor_mode": self.mode,
            "entries": entries,
        });
        if let Some(t) = self.tracked {
            out["rho_hat_squared"] = json!([t.re, t.im]);
        }
        out
    }
}

/// `R̄⁺(u, s)` as a dense matrix; coefficient of `E_{a,b}⊗E_{c,d}` at `(pos a·D + pos c, pos b·D + pos d)`.
pub fn rbar(u: C, s: &[C], pr: &AlgebraParams) -> DMatrix<C> {
    let n = pr.n;
    let dim = 2 * n + 1;
    let idx = indices(n);
    let mut r = DMatrix::from_element(dim * dim, dim * dim, C::from(0.0));
    let mut add = |a: i32, b: i32, cc: i32, d: i32, v: C| {
        r[(pos(a, n) * dim + pos(cc, n), pos(b, n) * dim + pos(d, n))] += v;
    };
    for &j in &idx {
        if j != 0 {
            add(j, j, j, j, C::from(1.0));
        }
    }
    let bb = coef_bbar(u, pr);
    for &j1 in &idx {
        for &j2 in &idx {
            if !prec(j1, j2, n) {
                continue;
            }
            if j2 != -j1 {
                let sd = lookup(s, j1) - lookup(s, j2);
                add(j1, j1, j2, j2, coef_b(u, sd, pr));
                add(j2, j2, j1, j1, bb);
                add(j1, j2, j2, j1, coef_c(u, sd, pr));
                add(j2, j1, j1, j2, coef_cbar(u, sd, pr));
            }
            add(-j2, j1, j2, -j1, coef_d(u, j1, j2, s, pr));
            add(-j1, j2, j1, -j2, coef_dbar(u, j1, j2, s, pr));
        }
    }
    for &j in &idx {
        add(-j, j, j, -j, coef_e(u, j, s, pr));
    }
    r
}

pub fn assemble(u: C, s: &DynamicalParam, mode: PrefactorMode, pr: &AlgebraParams) -> Result<RMatrixValue> {
    let mut m = rbar(u, &s.s, pr);
    let mut tracked = None;
    match mode {
        PrefactorMode::None => {}
        PrefactorMode::Rho0 => m *= rho0(u, pr, false),
        PrefactorMode::RhoHatSquared => tracked = Some(rho_hat_sq(u, pr)),
    }
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(EbqError::Pole(format!("R-matrix entry not finite at u = {u}")));
    }
    Ok(RMatrixValue { n: pr.n, u, s: s.s.clone(), mode, tracked, m })
}

/// Permutation operator on V⊗V in the same storage convention.
pub fn permutation(n: usize) -> DMatrix<C> {
    let dim = 2 * n + 1;
    let mut p = DMatrix::from_element(dim * dim, dim * dim, C::from(0.0));
    for i in 0..dim {
        for j in 0..dim {
            p[(i * dim + j, j * dim + i)] = C::from(1.0);
        }
    }
    p
}

// Scalar prefactors.

/// `ρ̃⁺(u)` (starred: `p ↦ p*`) from the double products `{·}`.
pub fn rho_tilde(u: C, pr: &AlgebraParams, starred: bool) -> C {
    let z = pr.z(u);
    rho_tilde_z(z, pr, starred)
}

pub fn rho_tilde_z(z: C, pr: &AlgebraParams, starred: bool) -> C {
    let p = if starred { pr.p_star } else { pr.p };
    let (xi, q) = (pr.xi, pr.q);
    let b = |x: C| brace(x, p, pr);
    let q2 = q * q;
    let num = b(xi * z).powi(2)
        * b(xi * xi / q2 * z)
        * b(q2 * z)
        * b(p * xi * xi / z)
        * b(p / z)
        * b(p * xi * q2 / z)
        * b(p * xi / q2 / z);
    let den = b(xi * xi * z)
        * b(z)
        * b(xi * q2 * z)
        * b(xi / q2 * z)
        * b(p * xi / z).powi(2)
        * b(p * xi * xi / q2 / z)
        * b(p * q2 / z);
    num / den
}

/// `ρ₀⁺(u) = q^{-1} z^{1/r} ρ̃⁺(u)`; starred uses `r*`, `p*`.
pub fn rho0(u: C, pr: &AlgebraParams, starred: bool) -> C {
    let (r, _) = pr.elliptic(starred);
    pr.qpowf(-1.0) * cpow(u, 1.0 / r, pr) * rho_tilde(u, pr, starred)
}

/// `C(u, ξ)`.
pub fn cfun(u: C, pr: &AlgebraParams) -> C {
    let z = pr.z(u);
    let (xi, q) = (pr.xi, pr.q);
    let x2 = xi * xi;
    let t = |w: C| theta_raw(w, x2, &pr.policy);
    let q2 = q * q;
    t(z).powi(2) * t(xi * q2 * z) * t(xi / q2 * z) / (t(xi * z).powi(2) * t(q2 * z) * t(z / q2))
}

/// `ρ̂⁺(u)² = ξ^{-2/r} C(u,ξ) ρ₀⁺(u)²`.
pub fn rho_hat_sq(u: C, pr: &AlgebraParams) -> C {
    let xi_pow = (-2.0 / pr.r * (-2.0 * pr.eta) * pr.log_q).exp();
    xi_pow * cfun(u, pr) * rho0(u, pr, false).powi(2)
}

/// `φ(u) = [u+1]/ρ₀⁺(u)`.
pub fn phi(u: C, pr: &AlgebraParams) -> C {
    pr.br(u + 1.0) / rho0(u, pr, false)
}

/// `μ(u)` (starred: `r ↦ r*`, `p ↦ p*`).
pub fn mu(u: C, pr: &AlgebraParams, starred: bool) -> C {
    let (r, p) = pr.elliptic(starred);
    let z = pr.z(u);
    let (xi, q) = (pr.xi, pr.q);
    let q2 = q * q;
    let b = |x: C| brace(x, p, pr);
    let a = b(p * xi * xi / q2 * z) * b(p * xi * z) * b(xi * z) * b(q2 * z)
        / (b(p * xi / q2 * z) * b(p * z) * b(xi * xi * z) * b(xi * q2 * z));
    let bb = b(p * xi / q2 / z) * b(p / z) * b(xi * xi / z) * b(xi * q2 / z)
        / (b(p * xi * xi / q2 / z) * b(p * xi / z) * b(xi / z) * b(q2 / z));
    cpow(u, -1.0 + 1.0 / r, pr) * a * bb
}

/// `χ(u)`.
pub fn chi(u: C, pr: &AlgebraParams) -> C {
    let z = pr.z(u);
    let (xi, q) = (pr.xi, pr.q);
    let t = |w: C| theta_raw(w, xi * xi, &pr.policy);
    t(z) * t(xi * z / (q * q)) / (t(xi * z) * t(xi * xi * z / (q * q)))
}

// Gauge data.

/// `G_{s_j}(j)`, the two-branch normalizer in `F(s, s+ĵ)`.
pub fn g_s_branch(j: i32, s: &[C], pr: &AlgebraParams) -> C {
    let b = |x: C| pr.br(x);
    let n = pr.n;
    let sj = lookup(s, j);
    if j > 0 {
        let mut v = C::from(1.0);
        for m in 1..j as usize {
            v *= b(sj - s[m - 1] + 1.0) / b(sj - s[m - 1]);
        }
        return v;
    }
    let mut v = b(sj + 1.0) / b(sj);
    for m in 1..=n {
        if m as i32 == -j {
            continue;
        }
        v *= b(sj - s[m - 1] + 1.0) / b(sj - s[m - 1]);
    }
    for m in (-j + 1) as usize..=n {
        v *= b(sj + s[m - 1] + 1.0) / b(sj + s[m - 1]);
    }
    v
}

/// `F(s, s+ĵ)²`; the `j = 0` step is the convention 1.
pub fn gauge_f_sq(s: &[C], j: i32, pr: &AlgebraParams) -> C {
    if j == 0 {
        return C::from(1.0);
    }
    g_s(j, s, pr) / g_s_branch(j, s, pr)
}

/// `F(s, s+ĵ)` on the principal branch.
pub fn gauge_f(s: &[C], j: i32, pr: &AlgebraParams) -> C {
    gauge_f_sq(s, j, pr).sqrt()
}

/// Extension of `F(s,s+0̂)²` under which every reflection and crossing face closes:
/// `−∏_m [s_m+½]/[s_m−½]`.
pub fn gauge_f0_sq_ext(s: &[C], pr: &AlgebraParams) -> C {
    let mut v = C::from(-1.0);
    for &x in s {
        v *= pr.br(x + 0.5) / pr.br(x - 0.5);
    }
    v
}

/// `G_a = ∏_j [a_j] ∏_{i<j} [a_i − a_j][a_i + a_j]` with sign factor ε(a) ≡ 1.
pub fn gauge_ga(a: &[C], pr: &AlgebraParams) -> C {
    let b = |x: C| pr.br(x);
    let mut v = C::from(1.0);
    for &x in a {
        v *= b(x);
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            v *= b(a[i] - a[j]) * b(a[i] + a[j]);
        }
    }
    v
}

/// JMO weight `W_JMO(a, a+î, a+î+ĵ, a+l̂ | u)` recovered from the R-matrix entry by inverting the gauge map.
/// Square roots of `F²` are taken on the principal branch.
pub fn to_jmo(a: &[C], i: i32, j: i32, k: i32, l: i32, u: C, pr: &AlgebraParams) -> C {
    let n = pr.n;
    let rb = rbar(u, a, pr);
    let dim = 2 * n + 1;
    let entry = rb[(pos(k, n) * dim + pos(l, n), pos(i, n) * dim + pos(j, n))];
    let eta = C::from(pr.eta);
    let pre = pr.br(eta) * pr.br(c(1.0, 0.0)) / (pr.br(eta - u) * pr.br(u + 1.0));
    let shift = |s: &[C], d: i32| -> Vec<C> {
        let w = weight(d, n);
        s.iter().zip(&w).map(|(x, &e)| x + e as f64).collect()
    };
    let ai = shift(a, i);
    let al = shift(a, l);
    let fr = gauge_f(a, i, pr) * gauge_f(&ai, j, pr) / (gauge_f(a, l, pr) * gauge_f(&al, k, pr));
    // The scalar ρ̂⁺(u) multiplies both R⁺ and the gauge factor, so it cancels.
    entry / (pre * fr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(n: usize) -> AlgebraParams {
        AlgebraParams::new(n, c(0.45, 0.05), c(4.3, 0.0), c(1.2, 0.0)).unwrap()
    }

    fn svec(n: usize) -> Vec<C> {
        (0..n).map(|k| c(0.31 + 0.53 * k as f64, 0.07)).collect()
    }

    #[test]
    fn positions_bijective() {
        for n in 1..=3 {
            let idx = indices(n);
            for (p, &j) in idx.iter().enumerate() {
                assert_eq!(pos(j, n), p);
                assert_eq!(label(p, n), j);
            }
        }
    }

    #[test]
    fn identity_at_zero() {
        for n in 1..=3 {
            let p = pr(n);
            let r = rbar(C::from(0.0), &svec(n), &p);
            let d = (r - permutation(n)).iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(d < 1e-12, "N={n}: {d}");
        }
    }

    #[test]
    fn trivial_coefficients() {
        let p = pr(2);
        let s = svec(2);
        let z = C::from(0.0);
        assert!(coef_b(z, c(0.3, 0.1), &p).norm() < 1e-15);
        assert!((coef_c(z, c(0.3, 0.1), &p) - 1.0).norm() < 1e-14);
        assert!((coef_e(z, 1, &s, &p) - 1.0).norm() < 1e-14);
        assert!(coef_d(z, 1, 2, &s, &p).norm() < 1e-15);
    }

    #[test]
    fn degenerate_s_rejected() {
        let p = pr(2);
        assert!(DynamicalParam::new(vec![c(0.3, 0.0), c(0.3, 0.0)], &p).is_err());
        assert!(DynamicalParam::new(svec(2), &p).is_ok());
    }
}
