//! Closed-form resummation of the directed mode sums.
//!
//! For `m = σm'` (`m' ≥ 1`) every oscillator law, the Gram form and hence
//! `m·κ_m` are finite sums `Σ_t c_t B_t^{m'}` of monomials `B_t = q^{A + Bc + Cr}`
//! (after expanding `1/(1−X^{m'})` geometrically and truncating). Then
//! `Σ_{m'} κ_{σm'} x^{m'} = −Σ_t c_t Log(1 − B_t x)`, the meromorphic continuation
//! of the mode sum beyond its convergence annulus.

use super::OscLaw;
use crate::error::{EbqError, Result};
use crate::mode_algebra::RootData;
use crate::special_functions::{AlgebraParams, TruncationPolicy, C};
use std::collections::BTreeMap;

/// Exponent `(2A, B, C)` of `q^{A + Bc + Cr}`; `A` may be half-integral.
pub type Key = (i64, i64, i64);

const TOL: f64 = 1e-22;

const Q1: Key = (2, 0, 0);
const CC: Key = (0, 1, 0);
const PP: Key = (0, 0, 2);
const PS: Key = (0, -2, 2);

fn add(a: Key, b: Key) -> Key {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
}

fn mul(a: Key, k: i64) -> Key {
    (a.0 * k, a.1 * k, a.2 * k)
}

/// `q^{a/2}` as a key.
fn qhalf(a2: i64) -> Key {
    (a2, 0, 0)
}

/// Evaluation context for one direction `σ`.
pub struct Ctx<'a> {
    pub sign: i64,
    pub pr: &'a AlgebraParams,
    pub max_terms: usize,
}

impl Ctx<'_> {
    pub fn val(&self, k: Key) -> C {
        let pr = self.pr;
        ((C::from(k.0 as f64 / 2.0) + pr.c * k.1 as f64 + pr.r * k.2 as f64) * pr.log_q).exp()
    }
}

/// Finite exponential sum `Σ_t c_t B_t^{m'}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Es {
    pub d: BTreeMap<Key, C>,
}

impl Es {
    pub fn konst(c: C) -> Self {
        let mut d = BTreeMap::new();
        d.insert((0, 0, 0), c);
        Es { d }
    }

    pub fn zero() -> Self {
        Es::default()
    }

    pub fn add(&self, o: &Es) -> Es {
        let mut d = self.d.clone();
        for (k, v) in &o.d {
            *d.entry(*k).or_insert(C::from(0.0)) += v;
        }
        Es { d }
    }

    pub fn sub(&self, o: &Es) -> Es {
        self.add(&o.scale(C::from(-1.0)))
    }

    pub fn scale(&self, c: C) -> Es {
        Es { d: self.d.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Coefficients replaced by their moduli.
    pub fn abs(&self) -> Es {
        Es { d: self.d.iter().map(|(k, v)| (*k, C::from(v.norm()))).collect() }
    }

    pub fn mul(&self, o: &Es, ctx: &Ctx) -> Es {
        let mut d: BTreeMap<Key, C> = BTreeMap::new();
        for (k1, v1) in &self.d {
            for (k2, v2) in &o.d {
                *d.entry(add(*k1, *k2)).or_insert(C::from(0.0)) += v1 * v2;
            }
        }
        d.retain(|k, v| (*v * ctx.val(*k)).norm() > TOL);
        Es { d }
    }
}

/// `X^{m'}` for `X = q^{σe}`.
fn mono(ctx: &Ctx, e: Key) -> Es {
    let mut d = BTreeMap::new();
    d.insert(mul(e, ctx.sign), C::from(1.0));
    Es { d }
}

/// `1/(1 − X^{m'})` for `X = q^{σe}`, expanded in whichever of `X`, `1/X` is small.
fn inv1m(ctx: &Ctx, e: Key) -> Result<Es> {
    let b = mul(e, ctx.sign);
    let bv = ctx.val(b).norm();
    if (bv - 1.0).abs() < 1e-9 {
        return Err(EbqError::Domain("geometric expansion at |X| = 1".into()));
    }
    let mut d = BTreeMap::new();
    let (start, dir, coef) = if bv < 1.0 { (0, 1, 1.0) } else { (1, -1, -1.0) };
    let mut k = start;
    loop {
        if bv.powi(dir * k as i32) < TOL {
            break;
        }
        if k as usize > ctx.max_terms {
            return Err(EbqError::NonConvergent("geometric expansion exceeded max_terms".into()));
        }
        d.insert(mul(b, dir as i64 * k), C::from(coef));
        k += 1;
    }
    Ok(Es { d })
}

fn qn(ctx: &Ctx, e: Key) -> Es {
    mono(ctx, e).sub(&mono(ctx, mul(e, -1))).scale(1.0 / ctx.pr.qdiff())
}

fn qplus(ctx: &Ctx, e: Key) -> Es {
    mono(ctx, e).add(&mono(ctx, mul(e, -1))).scale(1.0 / ctx.pr.qdiff())
}

/// `1/[X]_q`.
fn invqn(ctx: &Ctx, e: Key) -> Result<Es> {
    Ok(mono(ctx, mul(e, -1)).mul(&inv1m(ctx, mul(e, -2))?, ctx).scale(ctx.pr.qdiff()))
}

fn one_minus(ctx: &Ctx, e: Key) -> Es {
    Es::konst(C::from(1.0)).sub(&mono(ctx, e))
}

fn prod(ctx: &Ctx, fs: &[Es]) -> Es {
    let mut out = Es::konst(C::from(1.0));
    for f in fs {
        out = out.mul(f, ctx);
    }
    out
}

/// `ε^{σj}` coefficients as exponential sums.
fn eps_es(ctx: &Ctx, sign: i64, j: usize) -> Result<Vec<Es>> {
    let n = ctx.pr.n;
    let eta2 = (2.0 * ctx.pr.eta).round() as i64;
    let q_eta = qhalf(eta2);
    let cm = prod(ctx, &[qn(ctx, q_eta), invqn(ctx, Q1)?, invqn(ctx, Q1)?, invqn(ctx, mul(q_eta, 2))?]);
    let pre = mono(ctx, mul(Q1, sign * j as i64)).mul(&cm, ctx);
    Ok((1..=n)
        .map(|k| {
            let t = if k < j {
                mono(ctx, mul(q_eta, sign)).mul(&qn(ctx, mul(Q1, k as i64)), ctx)
            } else {
                qplus(ctx, add(q_eta, mul(Q1, k as i64))).scale(C::from(sign as f64))
            };
            pre.mul(&t, ctx)
        })
        .collect())
}

fn unit_es(j: usize, n: usize, f: Es) -> Vec<Es> {
    (1..=n).map(|k| if k == j { f.clone() } else { Es::zero() }).collect()
}

/// `p^{m}/(1−p^{m})` as an exponential sum.
fn pgeom(ctx: &Ctx) -> Result<Es> {
    Ok(mono(ctx, PP).mul(&inv1m(ctx, PP)?, ctx))
}

/// Oscillator law of an operator at `m = σm'`.
pub fn osc_es(law: &OscLaw, ctx: &Ctx) -> Result<Vec<Es>> {
    let n = ctx.pr.n;
    let qd = ctx.pr.qdiff();
    let kfac = || -> Result<Es> { Ok(prod(ctx, &[qn(ctx, Q1), qn(ctx, Q1), pgeom(ctx)?]).scale(qd * qd)) };
    let times = |f: &Es, v: Vec<Es>| v.iter().map(|x| f.mul(x, ctx)).collect::<Vec<_>>();
    Ok(match *law {
        OscLaw::KPlus(j) => times(&kfac()?, eps_es(ctx, 1, j)?),
        OscLaw::KMinus(j) => times(&kfac()?, eps_es(ctx, -1, j)?),
        OscLaw::K0 => {
            let a = times(&kfac()?, eps_es(ctx, -1, n)?);
            let b = unit_es(n, n, pgeom(ctx)?.scale(qd));
            let h = mono(ctx, qhalf(1));
            a.iter().zip(&b).map(|(x, y)| h.mul(&x.add(y), ctx)).collect()
        }
        OscLaw::Psi(j) => unit_es(j, n, pgeom(ctx)?.scale(qd)),
        OscLaw::E(j) => unit_es(j, n, invqn(ctx, CC)?.scale(C::from(-1.0))),
        OscLaw::F(j) => {
            let f = prod(ctx, &[mono(ctx, CC), one_minus(ctx, PS), inv1m(ctx, PP)?, invqn(ctx, CC)?]);
            unit_es(j, n, f)
        }
        OscLaw::Phi => {
            let f = prod(ctx, &[mono(ctx, Q1).sub(&mono(ctx, mul(Q1, -1))), one_minus(ctx, PS), inv1m(ctx, PP)?]);
            times(&f, eps_es(ctx, -1, 1)?)
        }
        OscLaw::PsiStar => {
            let f = mono(ctx, Q1).sub(&mono(ctx, mul(Q1, -1))).scale(C::from(-1.0));
            times(&f, eps_es(ctx, -1, 1)?)
        }
    })
}

/// `m·G_m` as exponential sums.
fn gram_es(ctx: &Ctx) -> Result<Vec<Vec<Es>>> {
    let rd = RootData::new(ctx.pr.n);
    let f = prod(ctx, &[qn(ctx, CC), one_minus(ctx, PP), inv1m(ctx, PS)?, mono(ctx, mul(CC, -1))]);
    Ok(rd
        .b
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| if b == 0.0 { Es::zero() } else { qn(ctx, mul(Q1, b as i64)).mul(&f, ctx) })
                .collect()
        })
        .collect())
}

fn bil(x: &[Es], g: &[Vec<Es>], y: &[Es], ctx: &Ctx) -> Es {
    let mut tot = Es::zero();
    for i in 0..x.len() {
        for j in 0..y.len() {
            if g[i][j].d.is_empty() {
                continue;
            }
            tot = tot.add(&x[i].mul(&g[i][j], ctx).mul(&y[j], ctx));
        }
    }
    tot
}

/// `−Σ_t c_t Log(1 − B_t x)`.
fn logsum(e: &Es, x: C, ctx: &Ctx) -> C {
    e.d.iter().map(|(k, c)| -c * (C::from(1.0) - ctx.val(*k) * x).ln()).sum()
}

/// `Σ_{m≠0} κ_m e^{−m·dl}` by resummation, `dl = l₁ − l₂`.
pub fn log_exchange(a: &OscLaw, b: &OscLaw, dl: C, pr: &AlgebraParams, policy: &TruncationPolicy) -> Result<C> {
    let mut tot = C::from(0.0);
    for s in [1i64, -1] {
        let c1 = Ctx { sign: s, pr, max_terms: policy.max_terms };
        let c2 = Ctx { sign: -s, pr, max_terms: policy.max_terms };
        let e = bil(&osc_es(a, &c1)?, &gram_es(&c1)?, &osc_es(b, &c2)?, &c1).scale(C::from(s as f64));
        tot += logsum(&e, (-(s as f64) * dl).exp(), &c1);
    }
    Ok(tot)
}

/// Growth rates `(lim |κ_m|^{1/m}, lim |κ_{−m}|^{1/m})`: the largest monomial whose
/// coefficient survives cancellation (rounding-level coefficients relative to the
/// summed magnitudes of their contributions are dropped); `1e-300` when none does.
pub fn growth_rates(a: &OscLaw, b: &OscLaw, pr: &AlgebraParams, policy: &TruncationPolicy) -> Result<(f64, f64)> {
    let mut out = [1e-300f64; 2];
    for (i, s) in [1i64, -1].into_iter().enumerate() {
        let c1 = Ctx { sign: s, pr, max_terms: policy.max_terms };
        let c2 = Ctx { sign: -s, pr, max_terms: policy.max_terms };
        let (x, g, y) = (osc_es(a, &c1)?, gram_es(&c1)?, osc_es(b, &c2)?);
        let e = bil(&x, &g, &y, &c1);
        let abs = |v: &[Es]| v.iter().map(Es::abs).collect::<Vec<_>>();
        let ga: Vec<Vec<Es>> = g.iter().map(|row| abs(row)).collect();
        let scale = bil(&abs(&x), &ga, &abs(&y), &c1);
        for (k, c) in &e.d {
            let sc = scale.d.get(k).map_or(0.0, |v| v.norm());
            if c.norm() > 1e-12 * sc {
                out[i] = out[i].max(c1.val(*k).norm());
            }
        }
    }
    Ok((out[0], out[1]))
}

/// `m·κ_m` from the exponential sums at an explicit `m` (for cross-checks).
pub fn m_kappa(a: &OscLaw, b: &OscLaw, m: i32, pr: &AlgebraParams, policy: &TruncationPolicy) -> Result<C> {
    let s = m.signum() as i64;
    let mp = m.abs();
    let c1 = Ctx { sign: s, pr, max_terms: policy.max_terms };
    let c2 = Ctx { sign: -s, pr, max_terms: policy.max_terms };
    let e = bil(&osc_es(a, &c1)?, &gram_es(&c1)?, &osc_es(b, &c2)?, &c1).scale(C::from(s as f64));
    Ok(e.d.iter().map(|(k, c)| c * c1.val(*k).powi(mp)).sum::<C>() * s as f64)
}
