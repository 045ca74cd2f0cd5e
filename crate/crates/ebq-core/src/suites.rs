//! Check orchestration: named suites, seeded sampling, canonical report ordering.

use crate::error::{EbqError, Result};
use crate::exchange_engine::relations::{
    check_psi_decomposition, check_vertex_exponents, k_current_catalog, kplus_catalog, merge_by_id, verify_relation, vertex_catalog,
    Relation, SamplePoint,
};
use crate::exec::Exec;
use crate::face_checks::{
    check_dybe, check_initial_condition, check_rho_inversion, check_structure, face_suite,
};
use crate::mode_algebra::{commutator, eps_coeffs, eps_vector, fermion_closed_form, fermion_contraction, gram, EpsLabel, ModeVector, Sector};
use crate::report::CheckReport;
use crate::rmatrix::DynamicalParam;
use crate::sampling::Sampler;
use crate::special_functions::{
    bracket, c, cpow, qpoch1, qpoch2, theta_p, theta_sum, AlgebraParams, TruncationPolicy, C,
};
use crate::exchange_engine::OscLaw;
use crate::vector_rep::{check_dbar_identity, check_e0_identity, check_h_decomposition, check_k_ef_exchange, check_rep_lr, RepConfig};
use nalgebra::DVector;
use serde_json::json;
use std::collections::BTreeMap;

pub const SCHEMA_ID: &str = "ebq-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Special,
    Modes,
    Exchange,
    Face,
    Dybe,
    RepLR,
    Vertex,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Special, Suite::Modes, Suite::Exchange, Suite::Face, Suite::Dybe, Suite::RepLR, Suite::Vertex];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Special => "special",
            Suite::Modes => "modes",
            Suite::Exchange => "exchange",
            Suite::Face => "face",
            Suite::Dybe => "dybe",
            Suite::RepLR => "repLR",
            Suite::Vertex => "vertex",
        }
    }

    /// Parse a comma-separated list; `all` selects every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(Suite::ALL);
                continue;
            }
            let hit = Suite::ALL.iter().find(|x| x.name().eq_ignore_ascii_case(part));
            match hit {
                Some(&x) => out.push(x),
                None => return Err(EbqError::InvalidParams(format!("unknown suite '{part}'"))),
            }
        }
        if out.is_empty() {
            return Err(EbqError::InvalidParams("no suite selected".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// Everything a verification run depends on.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Parameters at the generic level `c`; the vertex suite uses level 1 and the
    /// vector representation level 0.
    pub params: AlgebraParams,
    pub seed: u64,
    pub samples: usize,
    /// Fixed dynamical vector for the R-matrix suites instead of sampled ones.
    pub s: Option<Vec<C>>,
    pub tol_overrides: BTreeMap<String, f64>,
    pub exec: Exec,
}

impl RunConfig {
    pub fn new(params: AlgebraParams, seed: u64, samples: usize) -> Self {
        RunConfig { params, seed, samples, s: None, tol_overrides: BTreeMap::new(), exec: Exec::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(EbqError::InvalidParams("samples must be positive".into()));
        }
        if let Some(s) = &self.s {
            DynamicalParam::new(s.clone(), &self.params)?;
        }
        for (k, &v) in &self.tol_overrides {
            if !(v > 0.0) {
                return Err(EbqError::InvalidParams(format!("tolerance for {k} must be positive")));
            }
        }
        Ok(())
    }

    fn sampler(&self, suite: Suite) -> Sampler {
        Sampler::new(self.seed, suite as u64)
    }

    fn dynamical(&self, smp: &mut Sampler) -> Vec<C> {
        match &self.s {
            Some(s) => s.clone(),
            None => smp.dynamical(self.params.n),
        }
    }
}

/// Run the selected suites; reports are merged per check id and sorted by it.
pub fn run(suites: &[Suite], cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    let mut all = Vec::new();
    for &s in suites {
        all.extend(run_suite(s, cfg)?);
    }
    let mut out = merge_by_id(all);
    for r in &mut out {
        if let Some(&t) = cfg.tol_overrides.get(&r.check_id) {
            r.note(format!("tolerance overridden: {} -> {t}", r.tol));
            r.tol = t;
            r.pass = r.max_rel_residual < t;
        }
    }
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(out)
}

/// Whether every gate check passed.
pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass || !r.gate)
}

/// Failing gate checks first, each group in check-id order.
pub fn failing_first(mut reports: Vec<CheckReport>) -> Vec<CheckReport> {
    reports.sort_by(|a, b| {
        let fa = a.gate && !a.pass;
        let fb = b.gate && !b.pass;
        fb.cmp(&fa).then_with(|| a.check_id.cmp(&b.check_id))
    });
    reports
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let pr = &cfg.params;
    let mut smp = cfg.sampler(suite);
    match suite {
        Suite::Special => special::run(pr, &mut smp, cfg.samples),
        Suite::Modes => modes::run(pr, &mut smp, cfg.samples),
        Suite::Exchange => {
            let mut rels = k_current_catalog(pr);
            rels.extend(kplus_catalog(pr));
            let pts: Vec<SamplePoint> = (0..cfg.samples).map(|_| smp.exchange_point()).collect();
            let mut out = relation_sweep(&rels, &pts, pr, cfg.exec)?;
            let ms: Vec<i32> = (1..=6).flat_map(|m| [m, -m]).collect();
            out.push(check_psi_decomposition(pr, &ms, 1e-12)?);
            Ok(out)
        }
        Suite::Vertex => {
            let p1 = pr.at_level(c(1.0, 0.0))?;
            let rels = vertex_catalog(&p1);
            let pts: Vec<SamplePoint> = (0..cfg.samples).map(|_| smp.exchange_point()).collect();
            let mut out = relation_sweep(&rels, &pts, &p1, cfg.exec)?;
            out.extend(check_vertex_exponents(&p1));
            Ok(out)
        }
        Suite::Face => {
            let pts: Vec<(C, Vec<C>)> = (0..cfg.samples).map(|_| (smp.spectral(), cfg.dynamical(&mut smp))).collect();
            let res = cfg.exec.map(&pts, |(u, s)| -> Result<Vec<CheckReport>> {
                let mut v = vec![check_initial_condition(s, pr)];
                v.extend(check_structure(*u, s, pr));
                v.extend(face_suite(*u, s, pr)?);
                v.extend(check_rho_inversion(*u, pr));
                Ok(v)
            });
            flatten(res)
        }
        Suite::Dybe => {
            let pts: Vec<([C; 3], Vec<C>)> = (0..cfg.samples)
                .map(|_| ([smp.spectral(), smp.spectral() - 0.5, smp.spectral() * 0.5], cfg.dynamical(&mut smp)))
                .collect();
            let res = cfg.exec.map(&pts, |(u, s)| Ok(vec![check_dybe(u[0], u[1], u[2], s, pr)]));
            flatten(res)
        }
        Suite::RepLR => {
            let p0 = pr.at_level(c(0.0, 0.0))?;
            let rc = RepConfig::new(&p0);
            let pts: Vec<([C; 3], Vec<C>)> = (0..cfg.samples)
                .map(|_| ([smp.spectral(), smp.spectral(), smp.spectral() - 0.8], cfg.dynamical(&mut smp)))
                .collect();
            let res = cfg.exec.map(&pts, |(w, p)| -> Result<Vec<CheckReport>> {
                let mut v = check_rep_lr(w[0], p, &p0, rc)?;
                v.push(check_dbar_identity(w[0], p, &p0));
                v.push(check_e0_identity(w[0], p, &p0));
                v.extend(check_h_decomposition(w[0], &p0));
                v.extend(check_k_ef_exchange(w[1], w[2], p, &p0, rc)?);
                Ok(v)
            });
            flatten(res)
        }
    }
}

fn flatten(res: Vec<Result<Vec<CheckReport>>>) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for r in res {
        out.extend(r?);
    }
    Ok(merge_by_id(out))
}

fn relation_sweep(rels: &[Relation], pts: &[SamplePoint], pr: &AlgebraParams, exec: Exec) -> Result<Vec<CheckReport>> {
    let res = exec.map(rels, |rel| verify_relation(rel, pts, pr, &pr.policy, 1e-8));
    let mut reports = Vec::new();
    let mut inv = CheckReport::new("exchange.inverse_ratio", 1e-10);
    let mut pind = CheckReport::new("exchange.p_independence", 1e-10);
    let mut cont = CheckReport::new("exchange.continuation_agreement", 1e-10).info();
    for (rel, r) in rels.iter().zip(res) {
        let r = r?;
        inv.record_rel(r.inverse_residual);
        pind.record_rel(r.p_independence_residual);
        if let Some(x) = r.continuation_residual {
            cont.record_rel(x);
        }
        for rep in [&mut inv, &mut pind] {
            rep.samples.push(json!({"relation": format!("{} {}", rel.id, rel.label)}));
        }
        reports.push(r.report);
    }
    if rels.first().map(|r| r.id.starts_with("vertex")).unwrap_or(false) {
        for rep in [&mut inv, &mut pind, &mut cont] {
            rep.check_id = rep.check_id.replacen("exchange.", "vertex.", 1);
        }
    }
    reports.extend([inv, pind, cont]);
    Ok(merge_by_id(reports))
}

fn rel(a: C, b: C) -> f64 {
    rel_floor(a, b, 0.0)
}

/// `|a − b| / max(|a|, |b|, floor)`; the floor handles entries that vanish exactly.
fn rel_floor(a: C, b: C, floor: f64) -> f64 {
    let s = a.norm().max(b.norm()).max(floor);
    if s > 0.0 {
        (a - b).norm() / s
    } else {
        0.0
    }
}

mod special {
    use super::*;

    fn log_sum_qpoch(x: C, p: C) -> C {
        // exp Σ log(1 − x pⁿ), evaluated with a fixed generous term count.
        let mut s = C::from(0.0);
        let mut t = x;
        for _ in 0..400 {
            s += (C::from(1.0) - t).ln();
            t *= p;
        }
        s.exp()
    }

    fn nested_qpoch2(x: C, p1: C, p2: C) -> C {
        let mut res = C::from(1.0);
        let mut a = x;
        for _ in 0..200 {
            let mut b = a;
            for _ in 0..200 {
                res *= C::from(1.0) - b;
                b *= p1;
            }
            a *= p2;
        }
        res
    }

    pub fn run(pr: &AlgebraParams, smp: &mut Sampler, samples: usize) -> Result<Vec<CheckReport>> {
        let pol = TruncationPolicy::default();
        let mut triple = CheckReport::new("special.theta_triple_product", 1e-12);
        let mut sym = CheckReport::new("special.theta_symmetry", 1e-12);
        let mut quasi = CheckReport::new("special.theta_quasi_periodicity", 1e-12);
        let mut brq = CheckReport::new("special.bracket_quasi_periodicity", 1e-12);
        let mut brodd = CheckReport::new("special.bracket_odd", 1e-12);
        let mut q1 = CheckReport::new("special.qpoch1_oracle", 1e-13);
        let mut q2 = CheckReport::new("special.qpoch2_oracle", 1e-13);
        let mut cp = CheckReport::new("special.cpow_additivity", 1e-13);
        let mut derived = CheckReport::new("special.derived_constants", 1e-13);
        for k in 0..samples {
            // |p| ≤ 0.5, 0.5 ≤ |z| ≤ 2 for the series comparison.
            let u = smp.spectral();
            let v = smp.spectral();
            let p = C::from_polar(0.1 + 0.4 * u.re, 6.0 * v.im * 10.0);
            let z = C::from_polar(0.5 + 1.5 * v.re, 40.0 * u.im);
            let tp = theta_p(z, p, &pol)?;
            triple.record((tp - theta_sum(z, p, &pol)?).norm(), rel(tp, theta_sum(z, p, &pol)?));
            sym.record((tp - theta_p(p / z, p, &pol)?).norm(), rel(tp, theta_p(p / z, p, &pol)?));
            let lhs = theta_p(p * z, p, &pol)?;
            let rhs = -tp / z;
            quasi.record((lhs - rhs).norm(), rel(lhs, rhs));
            for starred in [false, true] {
                let (r, _) = pr.elliptic(starred);
                let b = bracket(u, pr, starred);
                let b_shift = bracket(u + r, pr, starred);
                brq.record((b_shift + b).norm(), rel(b_shift, -b));
                let bm = bracket(-u, pr, starred);
                brodd.record((bm + b).norm(), rel(bm, -b));
            }
            let x = u * 0.4;
            let pq = p * 0.6;
            let a = qpoch1(x, pq, &pol)?;
            q1.record((a - log_sum_qpoch(x, pq)).norm(), rel(a, log_sum_qpoch(x, pq)));
            let b = qpoch2(x * 0.5, pq, v * 0.5, &pol)?;
            let bo = nested_qpoch2(x * 0.5, pq, v * 0.5);
            q2.record((b - bo).norm(), rel(b, bo));
            let (e1, e2) = (c(1.0, 0.0) / pr.r, c(-0.3, 0.2) * v);
            let lhs = cpow(u, e1, pr) * cpow(u, e2, pr);
            cp.record_rel(rel(lhs, cpow(u, e1 + e2, pr)));
            cp.record_rel(rel(cpow(u, e1, pr) * cpow(u, -e1, pr), C::from(1.0)));
            for rep in [&mut triple, &mut sym, &mut quasi, &mut brq, &mut brodd, &mut q1, &mut q2, &mut cp] {
                rep.samples.push(json!({"index": k, "u": [u.re, u.im], "z": [z.re, z.im], "p": [p.re, p.im]}));
            }
        }
        derived.record_rel(rel(pr.xi * pr.qpowf(2.0 * pr.eta), C::from(1.0)));
        derived.record_rel(rel(pr.p_star, pr.p * pr.qpow(-2.0 * pr.c)));
        derived.record_rel(rel(pr.p, pr.qpow(2.0 * pr.r)));
        derived.samples.push(json!({"N": pr.n}));
        Ok(vec![triple, sym, quasi, brq, brodd, q1, q2, cp, derived])
    }
}

mod modes {
    use super::*;

    fn unit(j: usize, n: usize) -> DVector<C> {
        DVector::from_fn(n, |k, _| if k + 1 == j { C::from(1.0) } else { C::from(0.0) })
    }

    fn lab(sg: f64, j: usize) -> EpsLabel {
        if sg > 0.0 {
            EpsLabel::Plus(j)
        } else {
            EpsLabel::Minus(j)
        }
    }

    fn comm_eps(a: EpsLabel, b: EpsLabel, m: i32, pr: &AlgebraParams) -> Result<C> {
        commutator(&eps_vector(a, m, pr)?, &eps_vector(b, -m, pr)?, pr)
    }

    pub fn run(pr: &AlgebraParams, smp: &mut Sampler, samples: usize) -> Result<Vec<CheckReport>> {
        use crate::mode_algebra::eps_commutators;
        let n = pr.n;
        let mut same = CheckReport::new("modes.eps_eps.same_index", 1e-10);
        let mut opp = CheckReport::new("modes.eps_eps.opposite_index", 1e-10);
        let mut opp_printed = CheckReport::new("modes.eps_eps.opposite_index_literal", 1e-10).info();
        let mut ss = CheckReport::new("modes.eps_eps.same_sign", 1e-10);
        let mut os = CheckReport::new("modes.eps_eps.opposite_sign", 1e-10);
        let mut recon = CheckReport::new("modes.alpha_reconstruction", 1e-12);
        let mut ae = CheckReport::new("modes.alpha_eps_commutator", 1e-10);
        let mut ee = CheckReport::new("modes.eps_e_commutator", 1e-10);
        let mut ef = CheckReport::new("modes.eps_f_commutator", 1e-10);
        let mut sym = CheckReport::new("modes.gram_symmetry", 1e-13);
        let mut anti = CheckReport::new("modes.commutator_antisymmetry", 1e-13);
        let mut ns = CheckReport::new("modes.fermion_ns", 1e-10);
        let mut rr = CheckReport::new("modes.fermion_r", 1e-10);
        let qd = pr.qdiff();
        for m in 1..=6i32 {
            let mf = m as f64;
            let base = pr.qnum(pr.c * mf) / mf * pr.pp_ratio(m) * pr.qpow(-pr.c * mf);
            for sg in [1.0, -1.0] {
                for j in 1..=n {
                    same.record_rel(rel(comm_eps(lab(sg, j), lab(sg, j), m, pr)?, eps_commutators::same(mf, pr)));
                    let got = comm_eps(lab(sg, j), lab(-sg, j), m, pr)?;
                    opp.record_rel(rel(got, eps_commutators::opposite(sg, j, mf, pr, 1)));
                    opp_printed.record_rel(rel(got, eps_commutators::opposite(sg, j, mf, pr, 2)));
                    for k in (1..=n).filter(|&k| k != j) {
                        ss.record_rel(rel(comm_eps(lab(sg, j), lab(sg, k), m, pr)?, eps_commutators::same_sign(sg, j, k, mf, pr)));
                        os.record_rel(rel(comm_eps(lab(sg, j), lab(-sg, k), m, pr)?, eps_commutators::opposite_sign(sg, j, k, mf, pr)));
                    }
                    // α_{i,m} against ε^{±j}_{−m}, and ε^{±j}_m against the e_i, f_i exponents.
                    for i in 1..=n {
                        let alpha = ModeVector::new(m, unit(i, n))?;
                        let got = commutator(&alpha, &eps_vector(lab(sg, j), -m, pr)?, pr)?;
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let den = mf * (pr.qpowf(mf) - pr.qpowf(-mf));
                        let want = sg * base / (pr.qpowf(mf) - pr.qpowf(-mf)) * (pr.qpowf(-sg * mf) * d(i, j) - d(i + 1, j));
                        ae.record_rel(rel_floor(got, want, (base / den * mf).norm()));
                        let eps = eps_vector(lab(sg, j), m, pr)?;
                        let fac = pr.qpowf(sg * mf) * d(i, j) - d(j, i + 1);
                        let xe = ModeVector::new(-m, OscLaw::E(i).eval(-m, pr)?)?;
                        let want_e = sg * pr.qpow(-pr.c * mf) / den * pr.pp_ratio(m) * fac;
                        ee.record_rel(rel_floor(commutator(&eps, &xe, pr)?, want_e, (pr.pp_ratio(m) / den).norm()));
                        let xf = ModeVector::new(-m, OscLaw::F(i).eval(-m, pr)?)?;
                        let want_f = -sg / den * fac;
                        ef.record_rel(rel_floor(commutator(&eps, &xf, pr)?, want_f, (1.0 / den).norm()));
                    }
                }
                let v = smp.spectral();
                let x = ModeVector::new(m, DVector::from_fn(n, |k, _| v * (k as f64 + 1.0)))?;
                let y = ModeVector::new(-m, eps_coeffs(lab(sg, n), -m, pr)?)?;
                anti.record_rel(rel(commutator(&x, &y, pr)?, -commutator(&y, &x, pr)?));
            }
            let g = gram(m, pr)?;
            sym.record_rel((&g - g.transpose()).norm() / g.norm());
        }
        // Reconstruction of simple-root modes from the orthonormal-basis modes, both signs of m.
        for m in (1..=6i32).flat_map(|m| [m, -m]) {
            let mf = m as f64;
            for j in 1..n {
                for sg in [1.0, -1.0] {
                    let v = (eps_coeffs(lab(sg, j), m, pr)? - eps_coeffs(lab(sg, j + 1), m, pr)? * pr.qpowf(-sg * mf))
                        * (sg * pr.qnum(C::from(mf)).powi(2) * qd);
                    recon.record_rel((v - unit(j, n)).norm());
                }
            }
            let v = (eps_coeffs(EpsLabel::Plus(n), m, pr)? * pr.qpowf(-mf / 2.0)
                - eps_coeffs(EpsLabel::Minus(n), m, pr)? * pr.qpowf(mf / 2.0))
                * (pr.qnum(C::from(mf)) * (pr.qpowf(mf / 2.0) - pr.qpowf(-mf / 2.0)));
            recon.record_rel((v - unit(n, n)).norm());
        }
        for k in 0..samples {
            let u = smp.spectral();
            let x = C::from_polar(pr.q.norm() * (0.1 + 0.6 * u.re), 30.0 * u.im);
            for (sector, rep) in [(Sector::NS, &mut ns), (Sector::R, &mut rr)] {
                let a = fermion_contraction(sector, x, pr, &pr.policy)?;
                let b = fermion_closed_form(sector, x, pr);
                rep.record((a - b).norm(), rel(a, b));
                rep.samples.push(json!({"index": k, "x": [x.re, x.im]}));
            }
        }
        for rep in [&mut same, &mut opp, &mut opp_printed, &mut ss, &mut os, &mut recon, &mut ae, &mut ee, &mut ef, &mut sym, &mut anti] {
            rep.samples.push(json!({"N": n, "m": "1..6"}));
        }
        opp_printed.note("literal form has (q - q^-1)^2 in the denominator; the gate uses (q - q^-1)^1");
        Ok(vec![same, opp, opp_printed, ss, os, recon, ae, ee, ef, sym, anti, ns, rr])
    }
}

/// Every check id a full run can produce, for ranks 1 to 3.
pub fn check_ids() -> Vec<String> {
    let mut ids: Vec<String> = STATIC_IDS.iter().map(|s| s.to_string()).collect();
    for n in 1..=3 {
        if let Ok(pr) = AlgebraParams::new(n, c(0.45, 0.05), c(4.3, 0.0), c(1.2, 0.0)) {
            for r in k_current_catalog(&pr).into_iter().chain(kplus_catalog(&pr)) {
                ids.push(r.id.to_string());
            }
        }
    }
    ids.sort();
    ids.dedup();
    ids
}

const STATIC_IDS: &[&str] = &[
    "dybe.operator_form",
    "exchange.continuation_agreement",
    "exchange.inverse_ratio",
    "exchange.p_independence",
    "exchange.psi_decomposition",
    "face.crossing_squared",
    "face.crossing_squared_all_faces",
    "face.inversion2",
    "face.reflection",
    "face.reflection_all_faces",
    "face.rho_crossing",
    "face.rho_inversion",
    "face.rho_tilde_ratio",
    "face.unitarity_diag",
    "face.unitarity_offdiag",
    "modes.alpha_eps_commutator",
    "modes.alpha_reconstruction",
    "modes.eps_eps.opposite_index",
    "modes.eps_eps.opposite_index_literal",
    "modes.eps_eps.opposite_sign",
    "modes.eps_eps.same_index",
    "modes.eps_eps.same_sign",
    "modes.commutator_antisymmetry",
    "modes.eps_e_commutator",
    "modes.eps_f_commutator",
    "modes.fermion_ns",
    "modes.fermion_r",
    "modes.gram_symmetry",
    "vector.k_e_exchange",
    "vector.k_e_exchange_away_from_short_root",
    "vector.k_f_exchange",
    "vector.k_f_exchange_away_from_short_root",
    "replr.case_minus_j_j_lambda",
    "replr.dbar_identity",
    "replr.e0_identity",
    "replr.excluding_minus_k_j_terms",
    "replr.full_match",
    "replr.net_shift",
    "replr.net_shift_literal",
    "rmatrix.bbar_spread",
    "rmatrix.d_vanish_at_zero",
    "rmatrix.g_inversion",
    "rmatrix.initial_condition",
    "rmatrix.weight_conservation",
    "special.bracket_odd",
    "special.bracket_quasi_periodicity",
    "special.cpow_additivity",
    "special.derived_constants",
    "special.qpoch1_oracle",
    "special.qpoch2_oracle",
    "special.theta_quasi_periodicity",
    "special.theta_symmetry",
    "special.theta_triple_product",
    "vector.h_minus_decomposition",
    "vector.h_plus_decomposition",
    "vector.h_plus_decomposition_corrected",
    "vertex.continuation_agreement",
    "vertex.inverse_ratio",
    "vertex.p_independence",
    "vertex.phi_phi",
    "vertex.phi_phi_exponent",
    "vertex.phi_psi",
    "vertex.phi_psi_exponent",
    "vertex.phi_psi_oscillator",
    "vertex.psi_psi",
    "vertex.sufficient_e_psi",
    "vertex.sufficient_phi_f",
];
