//! Normal-ordered exponential operators with zero-mode bookkeeping and their
//! exchange scalars `A(z₁)B(z₂) = f · B(z₂)A(z₁)`.
//!
//! Oscillator parts are coefficient laws over the simple-root modes; the exchange
//! scalar is `exp(Σ_{m≠0} κ_m x^m)` with `κ_m = A.osc(m)ᵀ G_m B.osc(−m)` and
//! `x = a₂z₂/(a₁z₁)`, times a zero-mode factor built from exact exponents.

pub mod continuation;
pub mod relations;

use crate::error::{EbqError, Result};
use crate::mode_algebra::{alpha_eps, eps_coeffs, gram, EpsLabel};
use crate::special_functions::{AlgebraParams, TruncationPolicy, C};
use nalgebra::DVector;
use num_rational::Rational64;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Exact exponent `k + kr/r + krs/r*` with rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Lin {
    pub k: Rational64,
    pub kr: Rational64,
    pub krs: Rational64,
}

impl Lin {
    pub fn zero() -> Self {
        Lin::default()
    }

    pub fn konst(k: i64) -> Self {
        Lin { k: k.into(), ..Lin::default() }
    }

    pub fn over_r(n: i64) -> Self {
        Lin { kr: n.into(), ..Lin::default() }
    }

    pub fn over_rs(n: i64) -> Self {
        Lin { krs: n.into(), ..Lin::default() }
    }

    /// `c/(r r*) = 1/r* − 1/r`.
    pub fn c_over_rrs(n: i64) -> Self {
        Lin { kr: (-n).into(), krs: n.into(), ..Lin::default() }
    }

    pub fn scale(self, a: i64) -> Self {
        let a = Rational64::from(a);
        Lin { k: self.k * a, kr: self.kr * a, krs: self.krs * a }
    }

    pub fn is_zero(&self) -> bool {
        *self == Lin::zero()
    }

    /// The part that produces non-integer powers of `z`.
    pub fn fractional(&self) -> Lin {
        Lin { k: Rational64::from(0), ..*self }
    }

    pub fn eval(&self, pr: &AlgebraParams) -> C {
        let f = |x: Rational64| *x.numer() as f64 / *x.denom() as f64;
        C::from(f(self.k)) + f(self.kr) / pr.r + f(self.krs) / pr.r_star
    }
}

impl std::ops::Add for Lin {
    type Output = Lin;
    fn add(self, o: Lin) -> Lin {
        Lin { k: self.k + o.k, kr: self.kr + o.kr, krs: self.krs + o.krs }
    }
}

impl std::ops::Sub for Lin {
    type Output = Lin;
    fn sub(self, o: Lin) -> Lin {
        self + o.scale(-1)
    }
}

impl std::fmt::Display for Lin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + ({})/r + ({})/r*", self.k, self.kr, self.krs)
    }
}

/// `Σ_i a_i β_i` for an exact vector `a` and an integer lattice vector `β`.
pub fn pair(a: &[Lin], b: &[i32]) -> Lin {
    a.iter().zip(b).fold(Lin::zero(), |acc, (x, &y)| acc + x.scale(y as i64))
}

/// Oscillator coefficient laws `m ↦ ModeVector`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OscLaw {
    /// `k_{+j}(z)`.
    KPlus(usize),
    /// `k_{−j}(z)`.
    KMinus(usize),
    /// `k₀(z)`.
    K0,
    /// `ψ_j(z)`.
    Psi(usize),
    /// Oscillator part of `e_j(z)`.
    E(usize),
    /// Oscillator part of `f_j(z)`.
    F(usize),
    /// Type I vertex operator component `Φ₋₁`.
    Phi,
    /// Type II vertex operator component `Ψ*₋₁`.
    PsiStar,
}

fn unit(j: usize, n: usize) -> DVector<C> {
    let mut v = DVector::from_element(n, C::from(0.0));
    v[j - 1] = C::from(1.0);
    v
}

impl OscLaw {
    pub fn eval(&self, m: i32, pr: &AlgebraParams) -> Result<DVector<C>> {
        let n = pr.n;
        let mf = m as f64;
        let qd = pr.qdiff();
        let kosc = |label: EpsLabel| -> Result<DVector<C>> {
            let f = pr.qnum(C::from(mf)).powi(2) * qd * qd * pr.p_geom(m);
            Ok(eps_coeffs(label, m, pr)? * f)
        };
        let check_j = |j: usize| {
            if j == 0 || j > n {
                Err(EbqError::InvalidIndexPattern(format!("index {j} outside 1..={n}")))
            } else {
                Ok(())
            }
        };
        match *self {
            OscLaw::KPlus(j) => {
                check_j(j)?;
                kosc(EpsLabel::Plus(j))
            }
            OscLaw::KMinus(j) => {
                check_j(j)?;
                kosc(EpsLabel::Minus(j))
            }
            OscLaw::K0 => {
                let v = kosc(EpsLabel::Minus(n))? + unit(n, n) * (qd * pr.p_geom(m));
                Ok(v * pr.qpowf(mf / 2.0))
            }
            OscLaw::Psi(j) => {
                check_j(j)?;
                Ok(unit(j, n) * (qd * pr.p_geom(m)))
            }
            OscLaw::E(j) => {
                check_j(j)?;
                Ok(unit(j, n) * (-1.0 / pr.qnum(pr.c * mf)))
            }
            OscLaw::F(j) => {
                check_j(j)?;
                let f = pr.qpow(pr.c * mf) / (pr.pp_ratio(m) * pr.qnum(pr.c * mf));
                Ok(unit(j, n) * f)
            }
            OscLaw::Phi => {
                let f = (pr.qpowf(mf) - pr.qpowf(-mf)) / pr.pp_ratio(m);
                Ok(eps_coeffs(EpsLabel::Minus(1), m, pr)? * f)
            }
            OscLaw::PsiStar => {
                let f = -(pr.qpowf(mf) - pr.qpowf(-mf));
                Ok(eps_coeffs(EpsLabel::Minus(1), m, pr)? * f)
            }
        }
    }
}

/// A normal-ordered exponential: oscillator law plus zero-mode data.
///
/// The operator at spectral parameter `u` is
/// `:exp(osc at a·z): e^{β} e^{Q_γ} w^{hpow·h + ppow·P}` with `a = q^{arg_shift}`,
/// `z = q^{2u}` and `w = q^{zshift + 2u}`. `ppow` collects the `P/r*` and
/// `(P+h)/r` powers on `P`; their `h` part is folded into `hpow`.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorDescriptor {
    pub name: String,
    #[serde(skip)]
    pub osc: OscLaw,
    pub arg_shift: C,
    pub charge: Vec<i32>,
    pub qshift: Vec<i32>,
    #[serde(skip)]
    pub hpow: Vec<Lin>,
    #[serde(skip)]
    pub ppow: Vec<Lin>,
    pub zshift: C,
}

fn zeros(n: usize) -> Vec<i32> {
    vec![0; n]
}

fn lzeros(n: usize) -> Vec<Lin> {
    vec![Lin::zero(); n]
}

fn e_vec(j: usize, n: usize) -> Vec<i32> {
    let mut v = zeros(n);
    v[j - 1] = 1;
    v
}

fn lin_vec(v: &[i32], f: Lin) -> Vec<Lin> {
    v.iter().map(|&x| f.scale(x as i64)).collect()
}

impl OperatorDescriptor {
    /// Pure oscillator operator evaluated at `q^{shift} z`.
    pub fn bare(name: impl Into<String>, osc: OscLaw, shift: C, n: usize) -> Self {
        OperatorDescriptor {
            name: name.into(),
            osc,
            arg_shift: shift,
            charge: zeros(n),
            qshift: zeros(n),
            hpow: lzeros(n),
            ppow: lzeros(n),
            zshift: shift,
        }
    }

    /// `k_{±j}(q^{shift} z)`.
    pub fn k(sign: i32, j: usize, shift: f64, n: usize) -> Self {
        let (law, s) = if sign > 0 { (OscLaw::KPlus(j), "+") } else { (OscLaw::KMinus(j), "-") };
        Self::bare(format!("k{s}{j}"), law, C::from(shift), n)
    }

    pub fn k0(shift: f64, n: usize) -> Self {
        Self::bare("k0", OscLaw::K0, C::from(shift), n)
    }

    pub fn e_osc(j: usize, n: usize) -> Self {
        Self::bare(format!("e{j}"), OscLaw::E(j), C::from(0.0), n)
    }

    pub fn f_osc(j: usize, n: usize) -> Self {
        Self::bare(format!("f{j}"), OscLaw::F(j), C::from(0.0), n)
    }

    /// Modified current `K^+_{+j}(u) = k_{+j}(q^j z) e^{−Q_{ε_j}} ×` P- and h-powers.
    pub fn kk_plus(j: usize, pr: &AlgebraParams) -> Self {
        let n = pr.n;
        let e = e_vec(j, n);
        let mut o = Self::k(1, j, j as f64, n);
        o.name = format!("K+{j}");
        o.qshift = e.iter().map(|x| -x).collect();
        o.ppow = lin_vec(&e, Lin::c_over_rrs(-1));
        o.hpow = lin_vec(&e, Lin::over_r(1));
        o.zshift = j as f64 - pr.r;
        o
    }

    /// Modified current `K^+_{−j}(u)`.
    pub fn kk_minus(j: usize, pr: &AlgebraParams) -> Self {
        let n = pr.n;
        let e = e_vec(j, n);
        let sh = -(j as f64) - 2.0 * pr.eta;
        let mut o = Self::k(-1, j, sh, n);
        o.name = format!("K-{j}");
        o.qshift = e.clone();
        o.ppow = lin_vec(&e, Lin::c_over_rrs(1));
        o.hpow = lin_vec(&e, Lin::over_r(-1));
        o.zshift = sh - pr.r;
        o
    }

    /// Modified current `K^+_0(u)`.
    pub fn kk_zero(pr: &AlgebraParams) -> Self {
        let mut o = Self::k0(-pr.eta, pr.n);
        o.name = "K0".into();
        o
    }

    /// Current `E_j(u)`; at level one the h-power `α_j` is included.
    pub fn e_cur(j: usize, level_one: bool, pr: &AlgebraParams) -> Self {
        let n = pr.n;
        let a = alpha_eps(j, n);
        let mut o = Self::e_osc(j, n);
        o.name = format!("E{j}");
        o.charge = a.clone();
        o.qshift = a.iter().map(|x| -x).collect();
        o.ppow = lin_vec(&a, Lin::over_rs(-1));
        if level_one {
            o.hpow = lin_vec(&a, Lin::konst(1));
        }
        o
    }

    /// Current `F_j(u)`.
    pub fn f_cur(j: usize, pr: &AlgebraParams) -> Self {
        let n = pr.n;
        let a = alpha_eps(j, n);
        let mut o = Self::f_osc(j, n);
        o.name = format!("F{j}");
        o.charge = a.iter().map(|x| -x).collect();
        o.ppow = lin_vec(&a, Lin::over_r(1));
        o.hpow = lin_vec(&a, Lin::over_r(1) - Lin::konst(1));
        o
    }

    /// Type I component `Φ₋₁(u)`.
    pub fn phi(pr: &AlgebraParams) -> Self {
        let n = pr.n;
        let e = e_vec(1, n);
        let mut o = Self::bare("Phi", OscLaw::Phi, C::from(-3.0 - 2.0 * pr.eta), n);
        o.charge = e.clone();
        o.hpow = lin_vec(&e, Lin::konst(1) - Lin::over_r(1));
        o.ppow = lin_vec(&e, Lin::over_r(-1));
        o.zshift = C::from(-1.0 - 2.0 * pr.eta);
        o
    }

    /// Type II component `Ψ*₋₁(u)`.
    pub fn psi_star(pr: &AlgebraParams) -> Self {
        let n = pr.n;
        let e = e_vec(1, n);
        let mut o = Self::bare("PsiStar", OscLaw::PsiStar, C::from(-1.0 - 2.0 * pr.eta), n);
        o.charge = e.iter().map(|x| -x).collect();
        o.qshift = e.clone();
        o.hpow = lin_vec(&e, Lin::konst(-1));
        o.ppow = lin_vec(&e, Lin::over_rs(1));
        o.zshift = C::from(-2.0 * pr.eta);
        o
    }

    pub fn has_zero_modes(&self) -> bool {
        self.charge.iter().any(|&x| x != 0)
            || self.qshift.iter().any(|&x| x != 0)
            || self.hpow.iter().any(|x| !x.is_zero())
            || self.ppow.iter().any(|x| !x.is_zero())
    }
}

/// Cocycle sign of reordering `e^{a}e^{b} = ± e^{b}e^{a}`:
/// `(−1)^{(a,b) + (Σa)(Σb)}` on ε-coordinates.
pub fn lat_sign(a: &[i32], b: &[i32]) -> f64 {
    let dot: i64 = a.iter().zip(b).map(|(x, y)| (*x as i64) * (*y as i64)).sum();
    let sa: i64 = a.iter().map(|&x| x as i64).sum();
    let sb: i64 = b.iter().map(|&x| x as i64).sum();
    if (dot + sa * sb).rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `κ_m = A.osc(m)ᵀ G_m B.osc(−m)`, set to 0 when it is at rounding level relative to
/// `Σ |x_i G_ij y_j|`.
pub fn kappa(a: &OperatorDescriptor, b: &OperatorDescriptor, m: i32, pr: &AlgebraParams) -> Result<C> {
    let x = a.osc.eval(m, pr)?;
    let y = b.osc.eval(-m, pr)?;
    let g = gram(m, pr)?;
    let mut k = C::from(0.0);
    let mut scale = 0.0;
    for i in 0..x.len() {
        for j in 0..y.len() {
            let t = x[i] * g[(i, j)] * y[j];
            k += t;
            scale += t.norm();
        }
    }
    Ok(if k.norm() <= 1e-13 * scale { C::from(0.0) } else { k })
}

/// Log-argument `(shift + 2u) log q` of an operator's oscillator variable.
fn larg(o: &OperatorDescriptor, u: C, pr: &AlgebraParams) -> C {
    (o.arg_shift + 2.0 * u) * pr.log_q
}

/// `Σ_{k≥1} κ_{σk} e^{−σk(l₁−l₂)}` for one direction `σ = ±1`.
fn halfsum(
    a: &OperatorDescriptor,
    b: &OperatorDescriptor,
    dl: C,
    sg: i32,
    pr: &AlgebraParams,
    policy: &TruncationPolicy,
) -> Result<C> {
    let mut tot = C::from(0.0);
    for k in 1..=policy.max_terms as i32 {
        let m = sg * k;
        let t = kappa(a, b, m, pr)? * (-(m as f64) * dl).exp();
        if !t.is_finite() {
            return Err(EbqError::NonConvergent(format!("{}·{}: term {m} overflowed", a.name, b.name)));
        }
        tot += t;
        if k > 8 && t.norm() < policy.tol * tot.norm().max(1.0) {
            return Ok(tot);
        }
    }
    Err(EbqError::NonConvergent(format!("{}·{}: max_terms exceeded", a.name, b.name)))
}

/// Asymptotic growth rates `(ρ₊, ρ₋)` of `|κ_m|` for `m → ±∞`.
///
/// The two directed sums converge iff `ρ₊ < |e^{l₁−l₂}| < 1/ρ₋`.
pub fn rates(a: &OperatorDescriptor, b: &OperatorDescriptor, pr: &AlgebraParams) -> Result<(f64, f64)> {
    static CACHE: OnceLock<Mutex<HashMap<String, (f64, f64)>>> = OnceLock::new();
    let key = format!("{:?}{:?}{}{}{}{}{}", a.osc, b.osc, pr.n, pr.q, pr.r, pr.c, pr.policy.max_terms);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Ok(*r);
    }
    if let Ok(r) = continuation::growth_rates(&a.osc, &b.osc, pr, &pr.policy) {
        cache.lock().unwrap().insert(key, r);
        return Ok(r);
    }
    let mut out = [0.0; 2];
    for (i, sg) in [1, -1].into_iter().enumerate() {
        let k0 = kappa(a, b, sg * 30, pr)?;
        let k1 = kappa(a, b, sg * 31, pr)?;
        out[i] = if k0.norm() > 1e-300 { (k1 / k0).norm().max(1e-300) } else { 1e-300 };
    }
    Ok((out[0], out[1]))
}

/// Whether both directed contractions pass the ratio guard at `(u₁, u₂)`.
pub fn in_annulus(
    a: &OperatorDescriptor,
    u1: C,
    b: &OperatorDescriptor,
    u2: C,
    pr: &AlgebraParams,
    policy: &TruncationPolicy,
) -> Result<bool> {
    let (rp, rm) = rates(a, b, pr)?;
    let y = (larg(a, u1, pr) - larg(b, u2, pr)).re.exp();
    Ok(rp / y < policy.ratio_guard && rm * y < policy.ratio_guard)
}

/// A point `u₁` (for given `u₂`) inside the convergence annulus: `log|e^{l₁−l₂}|` is
/// placed at fraction `t` between the annulus edges (capped to `[10^{-2}, 10^2]`),
/// with `Im(u₁−u₂) = im`.
pub fn pick(
    a: &OperatorDescriptor,
    b: &OperatorDescriptor,
    u2: C,
    t: f64,
    im: f64,
    pr: &AlgebraParams,
) -> Result<C> {
    let (rp, rm) = rates(a, b, pr)?;
    let rp = rp.max(1e-2);
    let big = (1.0 / rm).min(1e2);
    if rp >= big {
        return Err(EbqError::NonConvergent(format!("{}·{}: empty convergence annulus", a.name, b.name)));
    }
    let lz = rp.ln() * (1.0 - t) + big.ln() * t;
    let lq = pr.log_q;
    let base = ((a.arg_shift - b.arg_shift + 2.0 * C::new(0.0, im)) * lq).re;
    let x = (lz - base) / (2.0 * lq.re);
    Ok(u2 + x + C::new(0.0, im))
}

/// Exponents `(e₁, e₂)` of the zero-mode factor `w₁^{e₁} / w₂^{e₂}`.
pub fn zero_mode_exponents(a: &OperatorDescriptor, b: &OperatorDescriptor) -> (Lin, Lin) {
    let e1 = pair(&a.hpow, &b.charge) + pair(&a.ppow, &b.qshift);
    let e2 = pair(&b.hpow, &a.charge) + pair(&b.ppow, &a.qshift);
    (e1, e2)
}

/// Log of the zero-mode monomial of `X(w_x)Y(w_y)` on the state with
/// eigenvalues `(h, P)`: `Y` acts first, then `X` sees the shifted state.
fn ordered_log(
    x: &OperatorDescriptor,
    lx: C,
    y: &OperatorDescriptor,
    ly: C,
    h: &[C],
    p: &[C],
    pr: &AlgebraParams,
) -> C {
    let power = |o: &OperatorDescriptor, h: &[C], p: &[C]| -> C {
        let mut s = C::from(0.0);
        for i in 0..h.len() {
            s += o.hpow[i].eval(pr) * h[i] + o.ppow[i].eval(pr) * p[i];
        }
        s
    };
    let h2: Vec<C> = h.iter().zip(&y.charge).map(|(a, &b)| a + b as f64).collect();
    let p2: Vec<C> = p.iter().zip(&y.qshift).map(|(a, &b)| a + b as f64).collect();
    power(y, h, p) * ly + power(x, &h2, &p2) * lx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ModeSum,
    Continued,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExchangeOutcome {
    pub scalar: C,
    pub residual_charge_ok: bool,
    pub p_independence_residual: f64,
    pub method: Method,
}

/// Zero-mode factor, its P-independence residual and the charge check.
fn zero_mode_part(
    a: &OperatorDescriptor,
    u1: C,
    b: &OperatorDescriptor,
    u2: C,
    pr: &AlgebraParams,
) -> Result<(C, f64, bool)> {
    let n = pr.n;
    for o in [a, b] {
        if o.charge.len() != n || o.qshift.len() != n || o.hpow.len() != n || o.ppow.len() != n {
            return Err(EbqError::ChargeMismatch(format!("{}: zero-mode data not of rank {n}", o.name)));
        }
    }
    let lw1 = (a.zshift + 2.0 * u1) * pr.log_q;
    let lw2 = (b.zshift + 2.0 * u2) * pr.log_q;
    let (e1, e2) = zero_mode_exponents(a, b);
    let sign = lat_sign(&a.charge, &b.charge);
    let exact = e1.eval(pr) * lw1 - e2.eval(pr) * lw2;
    // Explicit reordering on two unrelated states.
    let states: [(Vec<C>, Vec<C>); 2] = [
        ((0..n).map(|i| C::new(0.31 + 0.1 * i as f64, 0.07)).collect(), (0..n).map(|i| C::new(1.3 - 0.27 * i as f64, 0.11)).collect()),
        ((0..n).map(|i| C::new(-0.52 + 0.2 * i as f64, -0.03)).collect(), (0..n).map(|i| C::new(2.9 + 0.41 * i as f64, -0.2)).collect()),
    ];
    let mut diffs = Vec::new();
    for (h, p) in &states {
        let ab = ordered_log(a, lw1, b, lw2, h, p, pr);
        let ba = ordered_log(b, lw2, a, lw1, h, p, pr);
        diffs.push(ab - ba);
    }
    let scale = exact.norm().max(1.0);
    let p_res = (diffs[0] - diffs[1]).norm().max((diffs[0] - exact).norm()) / scale;
    let tot_a: Vec<i32> = a.charge.iter().zip(&b.charge).map(|(x, y)| x + y).collect();
    let tot_q: Vec<i32> = a.qshift.iter().zip(&b.qshift).map(|(x, y)| x + y).collect();
    let tot_b: Vec<i32> = b.charge.iter().zip(&a.charge).map(|(x, y)| x + y).collect();
    let tot_qb: Vec<i32> = b.qshift.iter().zip(&a.qshift).map(|(x, y)| x + y).collect();
    let charge_ok = tot_a == tot_b && tot_q == tot_qb;
    Ok((sign * exact.exp(), p_res, charge_ok))
}

/// `exp(Σ_{m≥1} κ_m x^m)`.
pub fn contraction(
    a: &OperatorDescriptor,
    b: &OperatorDescriptor,
    x: C,
    pr: &AlgebraParams,
    policy: &TruncationPolicy,
) -> Result<C> {
    if x.norm() == 0.0 {
        return Ok(C::from(1.0));
    }
    let (rp, _) = rates(a, b, pr)?;
    if rp * x.norm() >= policy.ratio_guard {
        return Err(EbqError::NonConvergent(format!("{}·{}: |x| outside the guard", a.name, b.name)));
    }
    Ok(halfsum(a, b, -x.ln(), 1, pr, policy)?.exp())
}

/// Exchange scalar from the two directed mode sums.
pub fn exchange_ratio(
    a: &OperatorDescriptor,
    u1: C,
    b: &OperatorDescriptor,
    u2: C,
    pr: &AlgebraParams,
    policy: &TruncationPolicy,
) -> Result<ExchangeOutcome> {
    if !in_annulus(a, u1, b, u2, pr, policy)? {
        return Err(EbqError::NonConvergent(format!(
            "{}({u1})·{}({u2}) outside the convergence annulus",
            a.name, b.name
        )));
    }
    let dl = larg(a, u1, pr) - larg(b, u2, pr);
    let osc = (halfsum(a, b, dl, 1, pr, policy)? + halfsum(a, b, dl, -1, pr, policy)?).exp();
    let (zm, p_res, charge_ok) = zero_mode_part(a, u1, b, u2, pr)?;
    if !charge_ok {
        return Err(EbqError::ChargeMismatch(format!("{}·{}", a.name, b.name)));
    }
    Ok(ExchangeOutcome { scalar: osc * zm, residual_charge_ok: charge_ok, p_independence_residual: p_res, method: Method::ModeSum })
}

/// Exchange scalar by closed-form resummation of the mode sums (valid on and off the annulus).
pub fn exchange_continued(
    a: &OperatorDescriptor,
    u1: C,
    b: &OperatorDescriptor,
    u2: C,
    pr: &AlgebraParams,
    policy: &TruncationPolicy,
) -> Result<ExchangeOutcome> {
    let dl = larg(a, u1, pr) - larg(b, u2, pr);
    let osc = continuation::log_exchange(&a.osc, &b.osc, dl, pr, policy)?.exp();
    let (zm, p_res, charge_ok) = zero_mode_part(a, u1, b, u2, pr)?;
    if !charge_ok {
        return Err(EbqError::ChargeMismatch(format!("{}·{}", a.name, b.name)));
    }
    Ok(ExchangeOutcome { scalar: osc * zm, residual_charge_ok: charge_ok, p_independence_residual: p_res, method: Method::Continued })
}

/// Mode sums inside the annulus, resummation otherwise.
pub fn exchange_auto(
    a: &OperatorDescriptor,
    u1: C,
    b: &OperatorDescriptor,
    u2: C,
    pr: &AlgebraParams,
    policy: &TruncationPolicy,
) -> Result<ExchangeOutcome> {
    if in_annulus(a, u1, b, u2, pr, policy)? {
        match exchange_ratio(a, u1, b, u2, pr, policy) {
            Err(EbqError::NonConvergent(_)) => {}
            other => return other,
        }
    }
    exchange_continued(a, u1, b, u2, pr, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn params(n: usize, cc: f64) -> AlgebraParams {
        AlgebraParams::new(n, c(0.3, 0.02), c(3.7, 0.0), c(cc, 0.0)).unwrap()
    }

    #[test]
    fn lin_arithmetic_is_exact() {
        let a = Lin::c_over_rrs(1) + Lin::over_r(1);
        assert_eq!(a, Lin::over_rs(1));
        assert!((Lin::konst(1) - Lin::konst(1)).is_zero());
    }

    #[test]
    fn cocycle_on_simple_roots() {
        for n in 1..=3 {
            for i in 1..=n {
                for j in 1..=n {
                    let (a, b) = (alpha_eps(i, n), alpha_eps(j, n));
                    let dot = crate::mode_algebra::dot;
                    let e = dot(&a, &b) + dot(&a, &a) * dot(&b, &b);
                    let want = if e.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                    assert_eq!(lat_sign(&a, &b), want);
                }
            }
        }
    }

    #[test]
    fn phi_phi_zero_mode_exponent() {
        let pr = params(2, 1.0);
        let f = OperatorDescriptor::phi(&pr);
        let (e1, e2) = zero_mode_exponents(&f, &f);
        assert_eq!(e1, Lin::konst(1) - Lin::over_r(1));
        assert_eq!(e1, e2);
    }

    #[test]
    fn contraction_at_zero_is_one() {
        let pr = params(1, 0.6);
        let k = OperatorDescriptor::k(1, 1, 0.0, 1);
        assert_eq!(contraction(&k, &k, c(0.0, 0.0), &pr, &pr.policy).unwrap(), c(1.0, 0.0));
    }
}
