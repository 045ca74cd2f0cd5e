//! Crate values against frozen high-precision references from `oracles/derived_values.py`.

use ebq_core::mode_algebra::{eps_coeffs, fermion_closed_form, gram, EpsLabel, Sector};
use ebq_core::rmatrix::{coef_b, coef_bbar, coef_c, coef_cbar, rho0};
use ebq_core::special_functions::{bracket, c, qpoch1, qpoch2, theta_p, AlgebraParams, TruncationPolicy, C};
use serde_json::Value;

const DATA: &str = include_str!("data/derived_oracle.json");

fn data() -> Value {
    serde_json::from_str(DATA).unwrap()
}

fn cval(v: &Value) -> C {
    c(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn params() -> AlgebraParams {
    AlgebraParams::new(2, c(0.45, 0.05), c(4.3, 0.0), c(1.2, 0.0)).unwrap()
}

fn close(got: C, want: C, tol: f64, what: &str) {
    let rel = (got - want).norm() / want.norm().max(1e-300);
    assert!(rel < tol, "{what}: got {got}, want {want}, rel {rel:e}");
}

#[test]
fn q_pochhammer_and_theta() {
    let d = data();
    let pol = TruncationPolicy::default();
    close(qpoch1(c(0.2, 0.0), c(0.3, 0.0), &pol).unwrap(), cval(&d["qpoch1_0.2_0.3"]), 1e-13, "qpoch1");
    close(
        qpoch2(c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0), &pol).unwrap(),
        cval(&d["qpoch2_0.1_0.2_0.3"]),
        1e-13,
        "qpoch2",
    );
    close(
        theta_p(c(0.7, 0.2), c(0.3, 0.1), &pol).unwrap(),
        cval(&d["theta_z0.7+0.2i_p0.3+0.1i"]),
        1e-12,
        "theta",
    );
}

#[test]
fn brackets() {
    let d = data();
    let pr = params();
    let u = c(0.37, 0.11);
    close(bracket(u, &pr, false), cval(&d["bracket"]), 1e-12, "[u]");
    close(bracket(u, &pr, true), cval(&d["bracket_starred"]), 1e-12, "[u]*");
}

#[test]
fn gram_matrices() {
    let d = data();
    let pr = params();
    for (m, key) in [(2, "gram_m2"), (-3, "gram_m-3")] {
        let g = gram(m, &pr).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                close(g[(i, j)], cval(&d[key][i][j]), 1e-12, key);
            }
        }
    }
}

#[test]
fn eps_coefficients() {
    let d = data();
    let pr = params();
    for (label, key) in [(EpsLabel::Plus(1), "eps_plus1_m3"), (EpsLabel::Minus(2), "eps_minus2_m3")] {
        let v = eps_coeffs(label, 3, &pr).unwrap();
        for k in 0..2 {
            close(v[k], cval(&d[key][k]), 1e-12, key);
        }
    }
}

#[test]
fn fermion_closed_forms() {
    let d = data();
    let pr = params();
    let x = c(0.2, 0.05);
    close(fermion_closed_form(Sector::NS, x, &pr), cval(&d["fermion_ns"]), 1e-13, "NS");
    close(fermion_closed_form(Sector::R, x, &pr), cval(&d["fermion_r"]), 1e-13, "R");
}

#[test]
fn rmatrix_coefficients_and_prefactor() {
    let d = data();
    let pr = params();
    let (u, s1) = (c(0.37, 0.11), c(0.31, 0.07));
    close(coef_bbar(u, &pr), cval(&d["bbar"]), 1e-12, "bbar");
    close(coef_c(u, s1, &pr), cval(&d["c_coef"]), 1e-12, "c");
    close(coef_cbar(u, s1, &pr), cval(&d["cbar_coef"]), 1e-12, "cbar");
    close(coef_b(u, s1, &pr), cval(&d["b_coef"]), 1e-12, "b");
    close(rho0(u, &pr, false), cval(&d["rho0"]), 1e-11, "rho0");
}
