//! q-Pochhammer products, the odd theta function and the brackets `[u]`, `[u]*`.
//!
//! Every power of `q` is evaluated as `exp(a * log_q)` with one fixed branch of
//! `log q`, so all functions of `u` are single valued.

use crate::error::{EbqError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_terms: usize,
    pub ratio_guard: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tol: 1e-16, max_terms: 4096, ratio_guard: 0.95 }
    }
}

impl TruncationPolicy {
    /// Default policy with `max_terms` taken from `EBQ_MAX_TERMS` when set.
    pub fn from_env() -> Result<Self> {
        let mut p = TruncationPolicy::default();
        if let Ok(v) = std::env::var("EBQ_MAX_TERMS") {
            p.max_terms = v
                .trim()
                .parse()
                .map_err(|_| EbqError::InvalidParams(format!("EBQ_MAX_TERMS={v} is not an integer")))?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(EbqError::InvalidParams("tol must be positive".into()));
        }
        if self.max_terms < 8 {
            return Err(EbqError::InvalidParams("max_terms must be at least 8".into()));
        }
        if !(self.ratio_guard > 0.0 && self.ratio_guard < 1.0) {
            return Err(EbqError::InvalidParams("ratio_guard must lie in (0,1)".into()));
        }
        Ok(())
    }
}

/// Global constants (N, q, r, c) and their derived quantities.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraParams {
    pub n: usize,
    pub q: C,
    pub r: C,
    pub c: C,
    pub log_q: C,
    pub p: C,
    pub r_star: C,
    pub p_star: C,
    pub eta: f64,
    pub xi: C,
    pub policy: TruncationPolicy,
}

impl AlgebraParams {
    pub fn new(n: usize, q: C, r: C, c: C) -> Result<Self> {
        Self::with_policy(n, q, r, c, TruncationPolicy::default())
    }

    pub fn with_policy(n: usize, q: C, r: C, c: C, policy: TruncationPolicy) -> Result<Self> {
        policy.validate()?;
        if n == 0 {
            return Err(EbqError::InvalidParams("rank N must be positive".into()));
        }
        let aq = q.norm();
        if !(aq > 0.0 && aq < 1.0) {
            return Err(EbqError::InvalidParams(format!("|q| = {aq} must lie in (0,1)")));
        }
        let log_q = q.ln();
        let p = (2.0 * r * log_q).exp();
        let r_star = r - c;
        let p_star = (2.0 * r_star * log_q).exp();
        let eta = -(2.0 * n as f64 - 1.0) / 2.0;
        let xi = (-2.0 * eta * log_q).exp();
        for (name, v) in [("p", p), ("p*", p_star), ("xi^2", xi * xi)] {
            if !(v.norm() < policy.ratio_guard) {
                return Err(EbqError::InvalidParams(format!(
                    "|{name}| = {} violates the convergence guard {}",
                    v.norm(),
                    policy.ratio_guard
                )));
            }
            // The unchecked product paths truncate at max_terms; refuse nomes they cannot resolve.
            let needed = (policy.tol.ln() / v.norm().ln()).ceil() as usize + 2;
            if v.norm() > 0.0 && needed > policy.max_terms {
                return Err(EbqError::NonConvergent(format!(
                    "|{name}| = {} needs about {needed} product terms, max_terms = {}",
                    v.norm(),
                    policy.max_terms
                )));
            }
        }
        Ok(AlgebraParams { n, q, r, c, log_q, p, r_star, p_star, eta, xi, policy })
    }

    /// The same algebra at another level.
    pub fn at_level(&self, c: C) -> Result<Self> {
        Self::with_policy(self.n, self.q, self.r, c, self.policy)
    }

    /// `q^a = exp(a log q)`.
    pub fn qpow(&self, a: C) -> C {
        (a * self.log_q).exp()
    }

    pub fn qpowf(&self, a: f64) -> C {
        self.qpow(C::from(a))
    }

    /// `q - q^{-1}`.
    pub fn qdiff(&self) -> C {
        self.qpowf(1.0) - self.qpowf(-1.0)
    }

    /// Symmetric q-number `[x]_q = (q^x - q^{-x})/(q - q^{-1})`.
    pub fn qnum(&self, x: C) -> C {
        (self.qpow(x) - self.qpow(-x)) / self.qdiff()
    }

    /// `[x]_+ = (q^x + q^{-x})/(q - q^{-1})`.
    pub fn qplus(&self, x: C) -> C {
        (self.qpow(x) + self.qpow(-x)) / self.qdiff()
    }

    /// `(1 − p^m)/(1 − p*^m)`, evaluated without overflow for large |m|.
    pub fn pp_ratio(&self, m: i32) -> C {
        let one = C::from(1.0);
        if m >= 0 {
            (one - self.p.powi(m)) / (one - self.p_star.powi(m))
        } else {
            let k = -m;
            self.qpow(2.0 * self.c * m as f64) * (self.p.powi(k) - one) / (self.p_star.powi(k) - one)
        }
    }

    /// `p^m/(1 − p^m)`, evaluated without overflow for large |m|.
    pub fn p_geom(&self, m: i32) -> C {
        let one = C::from(1.0);
        if m >= 0 {
            self.p.powi(m) / (one - self.p.powi(m))
        } else {
            one / (self.p.powi(-m) - one)
        }
    }

    pub fn elliptic(&self, starred: bool) -> (C, C) {
        if starred {
            (self.r_star, self.p_star)
        } else {
            (self.r, self.p)
        }
    }

    /// `[u]` or `[u]*`.
    pub fn br(&self, u: C) -> C {
        bracket(u, self, false)
    }

    pub fn brs(&self, u: C) -> C {
        bracket(u, self, true)
    }

    /// `z = q^{2u}`.
    pub fn z(&self, u: C) -> C {
        cpow(u, C::from(1.0), self)
    }
}

fn qpoch1_raw(x: C, p: C, tol: f64, max_terms: usize) -> C {
    let mut res = C::from(1.0);
    let mut t = x;
    for _ in 0..max_terms {
        if t.norm() < tol {
            break;
        }
        res *= C::from(1.0) - t;
        t *= p;
    }
    res
}

/// `(x; p)_∞`, truncated once `|x p^n| < tol`.
pub fn qpoch1(x: C, p: C, policy: &TruncationPolicy) -> Result<C> {
    let ap = p.norm();
    if ap >= 1.0 {
        return Err(EbqError::NonConvergent(format!("qpoch1: |p| = {ap} >= 1")));
    }
    let mut res = C::from(1.0);
    let mut t = x;
    for _ in 0..policy.max_terms {
        if t.norm() == 0.0 || (t.norm() < policy.tol && ap < policy.ratio_guard) {
            return Ok(res);
        }
        if ap >= policy.ratio_guard {
            return Err(EbqError::NonConvergent(format!(
                "qpoch1: term ratio {ap} exceeds guard {}",
                policy.ratio_guard
            )));
        }
        res *= C::from(1.0) - t;
        t *= p;
    }
    Err(EbqError::NonConvergent("qpoch1: max_terms exceeded".into()))
}

/// `(x; p1, p2)_∞ = ∏_{n,m≥0} (1 - x p1^n p2^m)`.
pub fn qpoch2(x: C, p1: C, p2: C, policy: &TruncationPolicy) -> Result<C> {
    let a2 = p2.norm();
    if a2 >= 1.0 {
        return Err(EbqError::NonConvergent(format!("qpoch2: |p2| = {a2} >= 1")));
    }
    let mut res = C::from(1.0);
    let mut a = x;
    for _ in 0..policy.max_terms {
        if a.norm() == 0.0 || (a.norm() < policy.tol && a2 < policy.ratio_guard) {
            return Ok(res);
        }
        if a2 >= policy.ratio_guard {
            return Err(EbqError::NonConvergent("qpoch2: outer ratio exceeds guard".into()));
        }
        res *= qpoch1(a, p1, policy)?;
        a *= p2;
    }
    Err(EbqError::NonConvergent("qpoch2: max_terms exceeded".into()))
}

fn qpoch2_raw(x: C, p1: C, p2: C, tol: f64, max_terms: usize) -> C {
    let mut res = C::from(1.0);
    let mut a = x;
    for _ in 0..max_terms {
        if a.norm() < tol {
            break;
        }
        res *= qpoch1_raw(a, p1, tol, max_terms);
        a *= p2;
    }
    res
}

/// `Θ_p(z) = (z;p)_∞ (p/z;p)_∞ (p;p)_∞`.
pub fn theta_p(z: C, p: C, policy: &TruncationPolicy) -> Result<C> {
    if z.norm() == 0.0 {
        return Err(EbqError::Domain("theta_p at z = 0".into()));
    }
    Ok(qpoch1(z, p, policy)? * qpoch1(p / z, p, policy)? * qpoch1(p, p, policy)?)
}

/// Jacobi triple product series `Σ_n (-1)^n p^{n(n-1)/2} z^n`, used as an oracle for [`theta_p`].
pub fn theta_sum(z: C, p: C, policy: &TruncationPolicy) -> Result<C> {
    if z.norm() == 0.0 {
        return Err(EbqError::Domain("theta_sum at z = 0".into()));
    }
    if p.norm() >= 1.0 {
        return Err(EbqError::NonConvergent("theta_sum: |p| >= 1".into()));
    }
    let (lp, lz) = (p.ln(), z.ln());
    let mut tot = C::from(1.0);
    for n in 1..policy.max_terms as i64 {
        let mut small = true;
        for k in [n, -n] {
            let e = (k * (k - 1)) as f64 / 2.0;
            let t = (lp * e + lz * k as f64).exp() * if k % 2 == 0 { 1.0 } else { -1.0 };
            tot += t;
            small &= t.norm() < policy.tol * tot.norm().max(1.0);
        }
        if small && n > 2 {
            return Ok(tot);
        }
    }
    Err(EbqError::NonConvergent("theta_sum: max_terms exceeded".into()))
}

/// Theta function for validated parameters (|p| below the guard), no error path.
pub fn theta_raw(z: C, p: C, policy: &TruncationPolicy) -> C {
    let (t, m) = (policy.tol, policy.max_terms);
    qpoch1_raw(z, p, t, m) * qpoch1_raw(p / z, p, t, m) * qpoch1_raw(p, p, t, m)
}

/// `[u] = q^{u²/r - u} Θ_p(q^{2u})`; starred uses `r*`, `p*`.
pub fn bracket(u: C, params: &AlgebraParams, starred: bool) -> C {
    let (r, p) = params.elliptic(starred);
    let pre = ((u * u / r - u) * params.log_q).exp();
    pre * theta_raw(cpow(u, C::from(1.0), params), p, &params.policy)
}

/// `z^a` with `z = q^{2u}`, i.e. `exp(2 u a log q)`.
pub fn cpow(u: C, a: C, params: &AlgebraParams) -> C {
    (2.0 * u * a * params.log_q).exp()
}

/// Double product `{z} = (z; p, ξ²)_∞` for the given nome `p` (p or p*).
pub fn brace(z: C, p: C, params: &AlgebraParams) -> C {
    let pol = &params.policy;
    qpoch2_raw(z, p, params.xi * params.xi, pol.tol, pol.max_terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> AlgebraParams {
        AlgebraParams::new(2, c(0.45, 0.05), c(4.3, 0.0), c(1.2, 0.0)).unwrap()
    }

    #[test]
    fn trivial_products() {
        let pol = TruncationPolicy::default();
        assert_eq!(qpoch1(c(0.0, 0.0), c(0.3, 0.0), &pol).unwrap(), c(1.0, 0.0));
        assert!((qpoch1(c(0.5, 0.0), c(0.0, 0.0), &pol).unwrap() - 0.5).norm() < 1e-16);
        assert_eq!(qpoch2(c(0.0, 0.0), c(0.2, 0.0), c(0.3, 0.0), &pol).unwrap(), c(1.0, 0.0));
        assert!(qpoch1(c(0.1, 0.0), c(1.0, 0.0), &pol).is_err());
        assert!(qpoch1(c(0.1, 0.0), c(0.97, 0.0), &pol).is_err());
    }

    #[test]
    fn theta_zero_and_degenerate() {
        let pol = TruncationPolicy::default();
        let p = c(0.2, 0.1);
        assert!(theta_p(c(1.0, 0.0), p, &pol).unwrap().norm() < 1e-15);
        let z = c(0.3, 0.7);
        assert!((theta_p(z, c(0.0, 0.0), &pol).unwrap() - (1.0 - z)).norm() < 1e-15);
        assert!(theta_p(c(0.0, 0.0), p, &pol).is_err());
    }

    #[test]
    fn bracket_is_odd_and_antiperiodic() {
        let pr = params();
        let u = c(0.37, 0.11);
        assert!(pr.br(C::from(0.0)).norm() < 1e-15);
        assert!((pr.br(-u) + pr.br(u)).norm() < 1e-12 * pr.br(u).norm());
        assert!((pr.br(u + pr.r) + pr.br(u)).norm() < 1e-12 * pr.br(u).norm());
        assert!((pr.brs(u + pr.r_star) + pr.brs(u)).norm() < 1e-12 * pr.brs(u).norm());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(AlgebraParams::new(1, c(1.2, 0.0), c(4.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(AlgebraParams::new(1, c(0.45, 0.0), c(0.01, 0.0), c(0.0, 0.0)).is_err());
        assert!(AlgebraParams::new(0, c(0.45, 0.0), c(4.0, 0.0), c(0.0, 0.0)).is_err());
    }
}
