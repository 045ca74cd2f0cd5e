//! Global identities of the R-matrix and its face weights: dynamical Yang–Baxter,
//! unitarity, reflection, crossing, 2nd inversion, initial condition, prefactor
//! inversion, and the structural R-matrix invariants.

use crate::error::Result;
use crate::report::{rel_err, CheckReport};
use crate::rmatrix::{
    coef_bbar, coef_d, coef_dbar, g_s, gauge_f0_sq_ext, gauge_f_sq, gauge_ga, indices, permutation, pos, prec,
    rbar, rho0, rho_hat_sq, rho_tilde, weight, RMatrixValue,
};
use crate::special_functions::{c, AlgebraParams, C};
use nalgebra::DMatrix;
use serde_json::json;
use std::collections::HashMap;

/// Heights `a = base + offset` with `offset` in the ε-lattice, and a cache of `R̄⁺(u, a)`.
pub struct FaceCtx<'a> {
    pub pr: &'a AlgebraParams,
    pub base: Vec<C>,
    cache: HashMap<(Vec<i32>, u64, u64), DMatrix<C>>,
}

/// How the `j = 0` gauge step enters reflection and crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroStep {
    /// `F(s, s+0̂) = 1`; only faces without a 0-step are compared.
    Unit,
    /// `F(s, s+0̂)² = −∏ [s_m+½]/[s_m−½]`; every face is compared.
    Extended,
}

type H = Vec<i32>;

impl<'a> FaceCtx<'a> {
    pub fn new(base: Vec<C>, pr: &'a AlgebraParams) -> Self {
        FaceCtx { pr, base, cache: HashMap::new() }
    }

    pub fn heights(&self, a: &[i32]) -> Vec<C> {
        self.base.iter().zip(a).map(|(x, &k)| x + k as f64).collect()
    }

    pub fn nbrs(&self, a: &[i32]) -> Vec<H> {
        let n = self.pr.n;
        indices(n).into_iter().map(|j| a.iter().zip(weight(j, n)).map(|(x, w)| x + w).collect()).collect()
    }

    pub fn step(&self, a: &[i32], b: &[i32]) -> Option<i32> {
        let d: Vec<i32> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        crate::rmatrix::step(&d, self.pr.n)
    }

    /// `W(a,b;d,c|u)` from `R̄⁺(u, a)`: `i = b−a`, `j = c−b`, `l = d−a`, `k = c−d`.
    pub fn w(&mut self, a: &[i32], b: &[i32], d: &[i32], cc: &[i32], u: C) -> C {
        let (Some(i), Some(j), Some(l), Some(k)) = (self.step(a, b), self.step(b, cc), self.step(a, d), self.step(d, cc))
        else {
            return C::from(0.0);
        };
        let n = self.pr.n;
        let dim = 2 * n + 1;
        let key = (a.to_vec(), u.re.to_bits(), u.im.to_bits());
        if !self.cache.contains_key(&key) {
            let m = rbar(u, &self.heights(a), self.pr);
            self.cache.insert(key.clone(), m);
        }
        self.cache[&key][(pos(k, n) * dim + pos(l, n), pos(i, n) * dim + pos(j, n))]
    }

    fn f2(&self, a: &[i32], b: &[i32], mode: ZeroStep) -> C {
        let j = self.step(a, b).expect("adjacent heights");
        let s = self.heights(a);
        match (j, mode) {
            (0, ZeroStep::Extended) => gauge_f0_sq_ext(&s, self.pr),
            _ => gauge_f_sq(&s, j, self.pr),
        }
    }

    fn ga(&self, a: &[i32]) -> C {
        gauge_ga(&self.heights(a), self.pr)
    }

    /// All faces `(a, b, d, c)` around the origin `a = 0` with every edge a valid step.
    fn faces(&self) -> Vec<[H; 4]> {
        let a = vec![0; self.pr.n];
        let mut out = Vec::new();
        for d in self.nbrs(&a) {
            for cc in self.nbrs(&d) {
                for b in self.nbrs(&a) {
                    if self.step(&b, &cc).is_some() {
                        out.push([a.clone(), b.clone(), d.clone(), cc.clone()]);
                    }
                }
            }
        }
        out
    }

    fn has_zero_step(&self, f: &[H; 4]) -> bool {
        let [a, b, d, cc] = f;
        [self.step(a, b), self.step(b, cc), self.step(a, d), self.step(d, cc)].contains(&Some(0))
    }
}

fn cjson(x: C) -> serde_json::Value {
    json!([x.re, x.im])
}

fn sample_json(u: C, s: &[C]) -> serde_json::Value {
    json!({"u": cjson(u), "s": s.iter().map(|x| cjson(*x)).collect::<Vec<_>>()})
}

/// `X(u) = [u][η−u+1]/([u+1][η−u])`, the ratio `ρ̂⁺(η−u)/ρ̂⁺(u)`.
pub fn crossing_ratio(u: C, pr: &AlgebraParams) -> C {
    let b = |x: C| pr.br(x);
    let eta = C::from(pr.eta);
    b(u) * b(eta - u + 1.0) / (b(u + 1.0) * b(eta - u))
}

/// `Σ_g W(a,g;d,c|u) W(a,b;g,c|−u) = δ_bd`: off-diagonal sums relative to the largest
/// term, diagonal sums against 1. `R̄⁺` carries no square roots, so no sign choice arises.
pub fn check_unitarity(u: C, a: &[C], pr: &AlgebraParams) -> Vec<CheckReport> {
    let mut ctx = FaceCtx::new(a.to_vec(), pr);
    let mut off = CheckReport::new("face.unitarity_offdiag", 1e-10);
    let mut diag = CheckReport::new("face.unitarity_diag", 1e-9);
    for [a, b, d, cc] in ctx.faces() {
        let mut tot = C::from(0.0);
        let mut scale = 0.0f64;
        for g in ctx.nbrs(&a) {
            let t = ctx.w(&a, &g, &d, &cc, u) * ctx.w(&a, &b, &g, &cc, -u);
            tot += t;
            scale = scale.max(t.norm());
        }
        if b == d {
            diag.record((tot - 1.0).norm(), (tot - 1.0).norm());
        } else {
            off.record(tot.norm(), if scale > 0.0 { tot.norm() / scale } else { tot.norm() });
        }
    }
    off.samples.push(sample_json(u, a));
    diag.samples.push(sample_json(u, a));
    vec![off, diag]
}

/// `W(a,b;d,c) F²(a,d) F²(d,c) = W(a,d;b,c) F²(a,b) F²(b,c)`.
pub fn check_reflection(u: C, a: &[C], pr: &AlgebraParams, mode: ZeroStep) -> CheckReport {
    let id = match mode {
        ZeroStep::Unit => "face.reflection",
        ZeroStep::Extended => "face.reflection_all_faces",
    };
    let mut rep = CheckReport::new(id, 1e-10);
    if mode == ZeroStep::Extended {
        rep = rep.info();
    }
    let mut ctx = FaceCtx::new(a.to_vec(), pr);
    for f in ctx.faces() {
        if mode == ZeroStep::Unit && ctx.has_zero_step(&f) {
            continue;
        }
        let [a, b, d, cc] = &f;
        let l = ctx.w(a, b, d, cc, u) * ctx.f2(a, d, mode) * ctx.f2(d, cc, mode);
        let r = ctx.w(a, d, b, cc, u) * ctx.f2(a, b, mode) * ctx.f2(b, cc, mode);
        rep.record((l - r).norm(), rel_err(l, r));
    }
    rep.samples.push(sample_json(u, a));
    rep
}

/// Crossing in squared form (gate), with the principal-branch signed form as a note.
pub fn check_crossing(u: C, a: &[C], pr: &AlgebraParams, mode: ZeroStep) -> CheckReport {
    let id = match mode {
        ZeroStep::Unit => "face.crossing_squared",
        ZeroStep::Extended => "face.crossing_squared_all_faces",
    };
    let mut rep = CheckReport::new(id, 1e-9);
    if mode == ZeroStep::Extended {
        rep = rep.info();
    }
    let eta = C::from(pr.eta);
    let x = crossing_ratio(u, pr);
    let mut ctx = FaceCtx::new(a.to_vec(), pr);
    let mut signs: Vec<C> = Vec::new();
    for f in ctx.faces() {
        if mode == ZeroStep::Unit && ctx.has_zero_step(&f) {
            continue;
        }
        let [a, b, d, cc] = &f;
        let w = ctx.w(a, b, d, cc, u);
        let wx = x * ctx.w(d, a, cc, b, eta - u);
        let fac = ctx.f2(b, cc, mode) * ctx.f2(cc, b, mode) / (ctx.f2(a, d, mode) * ctx.f2(d, a, mode)) * ctx.ga(b)
            * ctx.ga(d)
            / (ctx.ga(a) * ctx.ga(cc));
        let l = w * w;
        let r = fac * wx * wx;
        rep.record((l - r).norm(), rel_err(l, r));
        let signed = fac.sqrt() * wx;
        if w.norm() > 1e-12 && signed.norm() > 1e-12 {
            signs.push(w / signed);
        }
    }
    let plus = signs.iter().all(|s| (s - 1.0).norm() < 1e-6);
    let minus = signs.iter().all(|s| (s + 1.0).norm() < 1e-6);
    let mixed = signs.iter().filter(|s| (*s + 1.0).norm() < 1e-6).count();
    rep.note(format!(
        "signed (principal branch): {}",
        if plus {
            "consistent global sign +1".to_string()
        } else if minus {
            "consistent global sign -1".to_string()
        } else {
            format!("BranchWarning: {mixed}/{} faces take the other root", signs.len())
        }
    ));
    rep.samples.push(sample_json(u, a));
    rep
}

/// 2nd inversion: `Σ_g G_g W(a,b;d,g|η−u) W(c,d;b,g|η+u)·Y = δ_ac G_b G_d / G_a`, where
/// `Y = X(u)·X(−u)` carries the prefactor ratio.
pub fn check_inversion2(u: C, a: &[C], pr: &AlgebraParams) -> CheckReport {
    let mut rep = CheckReport::new("face.inversion2", 1e-9);
    let eta = C::from(pr.eta);
    let y = crossing_ratio(u, pr) * crossing_ratio(-u, pr);
    let mut ctx = FaceCtx::new(a.to_vec(), pr);
    let o = vec![0; pr.n];
    for b in ctx.nbrs(&o) {
        for d in ctx.nbrs(&o) {
            for cc in ctx.nbrs(&b) {
                if ctx.step(&d, &cc).is_none() {
                    continue;
                }
                let mut tot = C::from(0.0);
                let mut scale = 0.0f64;
                for g in ctx.nbrs(&b) {
                    if ctx.step(&d, &g).is_none() {
                        continue;
                    }
                    let t = ctx.ga(&g) * ctx.w(&o, &b, &d, &g, eta - u) * ctx.w(&cc, &d, &b, &g, eta + u) * y;
                    tot += t;
                    scale = scale.max(t.norm());
                }
                if cc == o {
                    let target = ctx.ga(&b) * ctx.ga(&d) / ctx.ga(&o);
                    rep.record((tot - target).norm(), rel_err(tot, target));
                } else {
                    rep.record(tot.norm(), if scale > 0.0 { tot.norm() / scale } else { tot.norm() });
                }
            }
        }
    }
    rep.samples.push(sample_json(u, a));
    rep
}

/// `ξ^{4/r}`: the constant by which the raw `ρ̂⁺(u)²ρ̂⁺(−u)²` differs from 1.
pub fn rho_inversion_constant(pr: &AlgebraParams) -> C {
    (4.0 / pr.r * (-2.0 * pr.eta) * pr.log_q).exp()
}

/// Both prefactor identities in squared form, plus a continuity-tracked signed root.
pub fn check_rho_inversion(u: C, pr: &AlgebraParams) -> Vec<CheckReport> {
    let k = rho_inversion_constant(pr);
    let norm_prod = |v: C| rho_hat_sq(v, pr) * rho_hat_sq(-v, pr) * k;
    let mut first = CheckReport::new("face.rho_inversion", 1e-10);
    let val = norm_prod(u);
    first.record((val - 1.0).norm(), (val - 1.0).norm());
    let raw = rho_hat_sq(u, pr) * rho_hat_sq(-u, pr);
    first.note(format!("raw product {:.10}{:+.10}i, normalized by xi^(4/r)", raw.re, raw.im));
    // Continuation of the square root along t·u from t = 0, where the product is 1.
    let mut root = C::from(1.0);
    let steps = 64;
    for i in 1..=steps {
        let t = i as f64 / steps as f64;
        let r = norm_prod(u * t).sqrt();
        root = if (r - root).norm() <= (r + root).norm() { r } else { -r };
    }
    first.note(format!("signed root by continuity: {:.6}{:+.6}i", root.re, root.im));
    first.samples.push(json!({"u": cjson(u)}));

    let mut second = CheckReport::new("face.rho_crossing", 1e-10);
    let eta = C::from(pr.eta);
    let x = crossing_ratio(u, pr);
    let l = rho_hat_sq(eta - u, pr);
    let r = rho_hat_sq(u, pr) * x * x;
    second.record((l - r).norm(), rel_err(l, r));
    second.samples.push(json!({"u": cjson(u)}));

    // ρ̃⁺/ρ̃⁺* recovered from the ρ₀-forms: ρ₀/ρ₀* = z^{1/r − 1/r*} ρ̃/ρ̃*.
    let mut third = CheckReport::new("face.rho_tilde_ratio", 1e-12).info();
    let direct = rho_tilde(u, pr, false) / rho_tilde(u, pr, true);
    let zpow = (2.0 * u * (1.0 / pr.r - 1.0 / pr.r_star) * pr.log_q).exp();
    let via = rho0(u, pr, false) / rho0(u, pr, true) / zpow;
    third.record((direct - via).norm(), rel_err(direct, via));
    third.samples.push(json!({"u": cjson(u)}));
    vec![first, second, third]
}

/// R̄⁺ on slots `(p0, p1)` of `V^{⊗3}`, with `s` shifted by `κ·weight(t)` for the basis
/// vector `t` of slot `shift_by` (unshifted when `None`).
fn three_slot(u: C, s: &[C], pair: (usize, usize), shift_by: Option<usize>, kappa: f64, pr: &AlgebraParams) -> DMatrix<C> {
    let n = pr.n;
    let dim = 2 * n + 1;
    let (pa, pb) = pair;
    let other = 3 - pa - pb;
    let mut m = DMatrix::from_element(dim.pow(3), dim.pow(3), C::from(0.0));
    let flat = |v: [usize; 3]| v[0] * dim * dim + v[1] * dim + v[2];
    let unshifted = rbar(u, s, pr);
    for t in indices(n) {
        let r = match shift_by {
            Some(_) => {
                let w = weight(t, n);
                let ss: Vec<C> = s.iter().zip(&w).map(|(x, &k)| x + kappa * k as f64).collect();
                rbar(u, &ss, pr)
            }
            None => unshifted.clone(),
        };
        let pt = pos(t, n);
        for i1 in 0..dim {
            for i2 in 0..dim {
                for o1 in 0..dim {
                    for o2 in 0..dim {
                        let v = r[(i1 * dim + i2, o1 * dim + o2)];
                        if v == C::from(0.0) {
                            continue;
                        }
                        let mut row = [0; 3];
                        let mut col = [0; 3];
                        row[pa] = i1;
                        row[pb] = i2;
                        row[other] = pt;
                        col[pa] = o1;
                        col[pb] = o2;
                        col[other] = pt;
                        m[(flat(row), flat(col))] += v;
                    }
                }
            }
        }
    }
    m
}

/// Both sides of the dynamical Yang–Baxter equation on `V^{⊗3}`.
pub fn dybe_sides(u1: C, u2: C, u3: C, s: &[C], pr: &AlgebraParams) -> (DMatrix<C>, DMatrix<C>) {
    let k = 1.0;
    let l = three_slot(u1 - u2, s, (0, 1), Some(2), k, pr)
        * three_slot(u1 - u3, s, (0, 2), None, 0.0, pr)
        * three_slot(u2 - u3, s, (1, 2), Some(0), k, pr);
    let r = three_slot(u2 - u3, s, (1, 2), None, 0.0, pr)
        * three_slot(u1 - u3, s, (0, 2), Some(1), k, pr)
        * three_slot(u1 - u2, s, (0, 1), None, 0.0, pr);
    (l, r)
}

/// DYBE residual in relative Frobenius norm.
pub fn check_dybe(u1: C, u2: C, u3: C, s: &[C], pr: &AlgebraParams) -> CheckReport {
    let mut rep = CheckReport::new("dybe.operator_form", 1e-9);
    let (l, r) = dybe_sides(u1, u2, u3, s, pr);
    let d = (&l - &r).norm();
    let sc = l.norm().max(r.norm());
    rep.record(d, if sc > 0.0 { d / sc } else { d });
    rep.samples.push(json!({
        "u": [cjson(u1), cjson(u2), cjson(u3)],
        "s": s.iter().map(|x| cjson(*x)).collect::<Vec<_>>(),
    }));
    rep
}

/// `R̄⁺(0, s) = P`.
pub fn check_initial_condition(s: &[C], pr: &AlgebraParams) -> CheckReport {
    let mut rep = CheckReport::new("rmatrix.initial_condition", 1e-12);
    let d = (rbar(C::from(0.0), s, pr) - permutation(pr.n)).iter().map(|x| x.norm()).fold(0.0, f64::max);
    rep.record(d, d);
    rep.samples.push(sample_json(C::from(0.0), s));
    rep
}

/// Structural invariants: weight mask, `b̄` spread, G-inversion, `d`/`d̄` at `u = 0`.
pub fn check_structure(u: C, s: &[C], pr: &AlgebraParams) -> Vec<CheckReport> {
    let n = pr.n;
    let dim = 2 * n + 1;
    let idx = indices(n);
    let m = rbar(u, s, pr);

    let mut mask = CheckReport::new("rmatrix.weight_conservation", 0.5);
    let mut bad = 0usize;
    for &a in &idx {
        for &b in &idx {
            for &cc in &idx {
                for &d in &idx {
                    let v = m[(pos(a, n) * dim + pos(cc, n), pos(b, n) * dim + pos(d, n))];
                    if !RMatrixValue::allowed(a, b, cc, d, n) && v != C::from(0.0) {
                        bad += 1;
                    }
                }
            }
        }
    }
    mask.record(bad as f64, bad as f64);
    mask.note(format!("{bad} nonzero entries outside the weight mask"));

    let mut spread = CheckReport::new("rmatrix.bbar_spread", 1e-14);
    let bb: Vec<C> = idx
        .iter()
        .flat_map(|&j1| idx.iter().map(move |&j2| (j1, j2)))
        .filter(|&(j1, j2)| prec(j1, j2, n) && j2 != -j1)
        .map(|(j1, j2)| m[(pos(j2, n) * dim + pos(j1, n), pos(j2, n) * dim + pos(j1, n))])
        .collect();
    let refv = coef_bbar(u, pr);
    for v in &bb {
        spread.record((v - refv).norm(), rel_err(*v, refv));
    }

    let mut ginv = CheckReport::new("rmatrix.g_inversion", 1e-10);
    for j in 1..=n as i32 {
        let w = weight(j, n);
        let down: Vec<C> = s.iter().zip(&w).map(|(x, &k)| x - k as f64).collect();
        let up: Vec<C> = s.iter().zip(&w).map(|(x, &k)| x + k as f64).collect();
        // G_{s_j − 1}: s_j lowered by one; G_{s_{−j} − 1}: s_{−j} = −s_j lowered, i.e. s_j raised.
        let a = g_s(j, &down, pr) * g_s(-j, s, pr);
        let b = g_s(-j, &up, pr) * g_s(j, s, pr);
        ginv.record((a - 1.0).norm(), (a - 1.0).norm());
        ginv.record((b - 1.0).norm(), (b - 1.0).norm());
    }

    let mut dz = CheckReport::new("rmatrix.d_vanish_at_zero", 1e-12);
    let zero = C::from(0.0);
    for &j1 in &idx {
        for &j2 in &idx {
            if !prec(j1, j2, n) {
                continue;
            }
            let d = coef_d(zero, j1, j2, s, pr).norm();
            let db = coef_dbar(zero, j1, j2, s, pr).norm();
            dz.record(d.max(db), d.max(db));
        }
    }
    let mut out = vec![mask, spread, ginv, dz];
    for r in &mut out {
        r.samples.push(sample_json(u, s));
    }
    out
}

/// Default generic heights used by the face checks when none are sampled.
pub fn default_heights(n: usize) -> Vec<C> {
    (0..n).map(|k| c(0.31 + 0.53 * k as f64, 0.07)).collect()
}

/// All face-form identities at one `(u, a)`.
pub fn face_suite(u: C, a: &[C], pr: &AlgebraParams) -> Result<Vec<CheckReport>> {
    let mut v = check_unitarity(u, a, pr);
    v.extend([
        check_reflection(u, a, pr, ZeroStep::Unit),
        check_reflection(u, a, pr, ZeroStep::Extended),
        check_crossing(u, a, pr, ZeroStep::Unit),
        check_crossing(u, a, pr, ZeroStep::Extended),
        check_inversion2(u, a, pr),
    ]);
    Ok(v)
}
