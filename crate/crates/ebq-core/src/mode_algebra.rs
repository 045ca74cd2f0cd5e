//! Boson modes over the simple roots of type B_N, orthonormal-basis modes `ε^{±j}_m`, `ε⁰_m`,
//! scalar commutators and the NS/R fermion contractions.

use crate::error::{EbqError, Result};
use crate::special_functions::{AlgebraParams, TruncationPolicy, C};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RootData {
    pub n: usize,
    pub b: Vec<Vec<f64>>,
}

impl RootData {
    pub fn new(n: usize) -> Self {
        let b = (0..n)
            .map(|i| (0..n).map(|j| dot(&alpha_eps(i + 1, n), &alpha_eps(j + 1, n)) as f64).collect())
            .collect();
        RootData { n, b }
    }
}

/// `α_j = ε_j − ε_{j+1}` (j < N), `α_N = ε_N`, in ε-coordinates.
pub fn alpha_eps(j: usize, n: usize) -> Vec<i32> {
    let mut v = vec![0; n];
    v[j - 1] = 1;
    if j < n {
        v[j] = -1;
    }
    v
}

pub fn dot(a: &[i32], b: &[i32]) -> i32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    pub m: i32,
    pub coeffs: DVector<C>,
}

impl ModeVector {
    pub fn new(m: i32, coeffs: DVector<C>) -> Result<Self> {
        if m == 0 {
            return Err(EbqError::Domain("mode degree must be nonzero".into()));
        }
        Ok(ModeVector { m, coeffs })
    }

    pub fn unit(j: usize, m: i32, n: usize) -> Result<Self> {
        let mut v = DVector::from_element(n, C::from(0.0));
        v[j - 1] = C::from(1.0);
        Self::new(m, v)
    }
}

/// `G_m(i,j) = [b_ij m][cm]/m · (1−p^m)/(1−p*^m) · q^{−cm}`.
pub fn gram(m: i32, pr: &AlgebraParams) -> Result<DMatrix<C>> {
    if m == 0 {
        return Err(EbqError::Domain("gram at m = 0".into()));
    }
    let mf = m as f64;
    if (C::from(1.0) - pr.p_star.powi(m)).norm() < 1e-14 {
        return Err(EbqError::Domain(format!("1 - p*^{m} vanishes")));
    }
    let f = pr.qnum(pr.c * mf) / mf * pr.pp_ratio(m) * pr.qpow(-pr.c * mf);
    let rd = RootData::new(pr.n);
    Ok(DMatrix::from_fn(pr.n, pr.n, |i, j| {
        if rd.b[i][j] == 0.0 {
            C::from(0.0)
        } else {
            pr.qnum(C::from(rd.b[i][j] * mf)) * f
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsLabel {
    Plus(usize),
    Minus(usize),
    Zero,
}

/// Coefficients of `ε^{±j}_m` (or `ε⁰_m`) over `α_{k,m}`.
pub fn eps_vector(label: EpsLabel, m: i32, pr: &AlgebraParams) -> Result<ModeVector> {
    Ok(ModeVector::new(m, eps_coeffs(label, m, pr)?)?)
}

pub fn eps_coeffs(label: EpsLabel, m: i32, pr: &AlgebraParams) -> Result<DVector<C>> {
    let n = pr.n;
    let mf = m as f64;
    let (sign, j) = match label {
        EpsLabel::Plus(j) => (1.0, j),
        EpsLabel::Minus(j) => (-1.0, j),
        EpsLabel::Zero => {
            let f = pr.qnum(C::from(mf / 2.0)) / pr.qnum(C::from(mf));
            let a = eps_coeffs(EpsLabel::Plus(n), m, pr)?;
            let b = eps_coeffs(EpsLabel::Minus(n), m, pr)?;
            return Ok((a + b) * f);
        }
    };
    if j == 0 || j > n {
        return Err(EbqError::InvalidIndexPattern(format!("eps index {j} outside 1..={n}")));
    }
    let eta = pr.eta;
    let d2 = pr.qnum(C::from(2.0 * eta * mf));
    if d2.norm() < 1e-14 {
        return Err(EbqError::Domain("[2ηm]_q vanishes".into()));
    }
    let cm = pr.qnum(C::from(eta * mf)) / (pr.qnum(C::from(mf)).powi(2) * d2);
    let pre = pr.qpowf(sign * j as f64 * mf) * cm;
    Ok(DVector::from_fn(n, |k, _| {
        let k = k + 1;
        let t = if k < j {
            pr.qpowf(sign * eta * mf) * pr.qnum(C::from(k as f64 * mf))
        } else {
            sign * pr.qplus(C::from((eta + k as f64) * mf))
        };
        pre * t
    }))
}

/// `[X, Y]`: zero unless the degrees cancel, else `xᵀ G_{m_X} y`.
pub fn commutator(x: &ModeVector, y: &ModeVector, pr: &AlgebraParams) -> Result<C> {
    if x.m + y.m != 0 {
        return Ok(C::from(0.0));
    }
    let g = gram(x.m, pr)?;
    Ok((x.coeffs.transpose() * g * &y.coeffs)[(0, 0)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sector {
    NS,
    R,
}

fn fermion_norm(pr: &AlgebraParams) -> C {
    C::from(1.0) / (pr.qpowf(0.5) + pr.qpowf(-0.5))
}

/// `⟨Ψ(z)Ψ(w)⟩` as a mode sum in `x = w/z`.
pub fn fermion_contraction(sector: Sector, x: C, pr: &AlgebraParams, policy: &TruncationPolicy) -> Result<C> {
    let ratio = x.norm() / pr.q.norm();
    if ratio >= policy.ratio_guard {
        return Err(EbqError::NonConvergent(format!("|x|/|q| = {ratio} exceeds the guard")));
    }
    let nn = fermion_norm(pr);
    let (mut tot, offset) = match sector {
        Sector::NS => (C::from(0.0), 0.5),
        Sector::R => (nn, 1.0),
    };
    let lx = x.ln();
    for k in 0..policy.max_terms {
        let m = offset + k as f64;
        let t = nn * (pr.qpowf(m) + pr.qpowf(-m)) * (lx * m).exp();
        tot += t;
        if t.norm() < policy.tol * tot.norm().max(1.0) {
            return Ok(tot);
        }
    }
    Err(EbqError::NonConvergent("fermion contraction: max_terms exceeded".into()))
}

/// Closed forms of the NS and R contractions.
pub fn fermion_closed_form(sector: Sector, x: C, pr: &AlgebraParams) -> C {
    let q = pr.q;
    let den = (C::from(1.0) - q * x) * (C::from(1.0) - x / q);
    match sector {
        Sector::NS => (x.ln() * 0.5).exp() * (C::from(1.0) - x) / den,
        Sector::R => fermion_norm(pr) * (C::from(1.0) - x) * (C::from(1.0) + x) / den,
    }
}

/// Closed forms (literal, with the one corrected exponent noted below) of the five
/// commutator families `[ε^{σj}_m, ε^{τk}_{−m}]`.
pub mod eps_commutators {
    use super::*;

    fn base(m: f64, pr: &AlgebraParams) -> C {
        pr.qnum(pr.c * m) / m * pr.pp_ratio(m as i32) * pr.qpow(-pr.c * m)
    }

    /// Same sign, same index.
    pub fn same(m: f64, pr: &AlgebraParams) -> C {
        let eta = pr.eta;
        let qd = pr.qdiff();
        base(m, pr) * pr.qnum(C::from(eta * m)) * pr.qnum(C::from(2.0 * (eta + 1.0) * m))
            / (qd * qd
                * pr.qnum(C::from(m)).powi(3)
                * pr.qnum(C::from(2.0 * eta * m))
                * pr.qnum(C::from((eta + 1.0) * m)))
    }

    /// Opposite signs, same index; `qd_power` is the exponent of `(q − q^{-1})` in the denominator
    /// (2 in the literal form, 1 as verified).
    pub fn opposite(sg: f64, j: usize, m: f64, pr: &AlgebraParams, qd_power: i32) -> C {
        let eta = pr.eta;
        let j = j as f64;
        -sg * pr.qpowf(sg * j * m) * base(m, pr) * pr.qnum(C::from(eta * m))
            / (pr.qnum(C::from(m)).powi(3) * pr.qdiff().powi(qd_power) * pr.qnum(C::from(2.0 * eta * m)))
            * (pr.qpowf(sg * (eta + j) * m) * pr.qnum(C::from(m))
                + sg * pr.qpowf(-sg * (j - 1.0) * m) * pr.qplus(C::from(eta * m)))
    }

    /// Same sign, different indices.
    pub fn same_sign(sg: f64, j: usize, k: usize, m: f64, pr: &AlgebraParams) -> C {
        let eta = pr.eta;
        let sgn = if k > j { 1.0 } else { -1.0 };
        -sg * sgn * pr.qpowf(-sg * (sgn * eta + k as f64 - j as f64) * m) * base(m, pr) * pr.qnum(C::from(eta * m))
            / (pr.qdiff() * pr.qnum(C::from(m)).powi(2) * pr.qnum(C::from(2.0 * eta * m)))
    }

    /// Opposite signs, different indices.
    pub fn opposite_sign(sg: f64, j: usize, k: usize, m: f64, pr: &AlgebraParams) -> C {
        let eta = pr.eta;
        -sg * pr.qpowf(sg * (eta + (j + k) as f64) * m) * base(m, pr) * pr.qnum(C::from(eta * m))
            / (pr.qdiff() * pr.qnum(C::from(m)).powi(2) * pr.qnum(C::from(2.0 * eta * m)))
    }
}
