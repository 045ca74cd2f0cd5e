//! Vector representation: K-current matrices and their Q-content, shifted products, H currents.

use ebq_core::rmatrix::{pos, rho0, weight};
use ebq_core::vector_rep::{check_h_decomposition, k_diagonal, pi_h, pi_k, KLabel, ShiftedMatrix};
use ebq_core::{c, AlgebraParams, C};
use nalgebra::DMatrix;
use std::sync::Arc;

fn params(n: usize) -> AlgebraParams {
    AlgebraParams::new(n, c(0.45, 0.05), c(4.3, 0.0), c(0.0, 0.0)).unwrap()
}

#[test]
fn k_plus_j_has_unit_entry_and_minus_eps_shift() {
    let pr = params(2);
    let w = c(0.37, 0.04);
    for j in 1..=2usize {
        let k = pi_k(KLabel::Plus(j), w, &pr);
        let m = k.eval(&[c(0.3, 0.0), c(0.9, 0.0)]);
        let jj = pos(j as i32, 2);
        assert!((m[(jj, jj)] - rho0(w, &pr, false)).norm() < 1e-13);
        let want: Vec<i32> = weight(j as i32, 2).iter().map(|x| -x).collect();
        assert_eq!(k.shift[jj][jj].as_ref().unwrap(), &want);
    }
}

#[test]
fn k_plus_j_entry_at_minus_j() {
    let pr = params(2);
    let w = c(0.37, 0.04);
    let b = |x: C| pr.br(x);
    for j in 1..=2i32 {
        let d = k_diagonal(KLabel::Plus(j as usize), w, &pr);
        let jf = j as f64;
        let want = b(w - 1.0) * b(w + jf + pr.eta - 1.0) / (b(w) * b(w + jf + pr.eta));
        assert!((d[pos(-j, 2)] - want).norm() < 1e-14 * want.norm());
    }
}

#[test]
fn k_zero_has_no_shift() {
    let pr = params(1);
    let k = pi_k(KLabel::Zero, c(0.4, 0.02), &pr);
    assert!(k.shift.iter().enumerate().all(|(i, row)| row[i].as_deref() == Some(&[0][..])));
}

#[test]
fn k_plus_times_k_minus_is_shift_free() {
    let pr = params(2);
    let w = c(0.41, 0.03);
    let prod = pi_k(KLabel::Plus(1), w, &pr).mul(&pi_k(KLabel::Minus(1), w, &pr)).unwrap();
    for i in 0..5 {
        assert_eq!(prod.shift[i][i].as_deref(), Some(&[0, 0][..]));
    }
}

#[test]
fn shifted_product_moves_argument() {
    // (f, β)(g, 0) = (f(P) g(P − β), β)
    let a = ShiftedMatrix::diagonal(1, Arc::new(|_| DMatrix::from_element(1, 1, c(2.0, 0.0))), vec![1]);
    let b = ShiftedMatrix::diagonal(1, Arc::new(|p: &[C]| DMatrix::from_element(1, 1, p[0])), vec![0]);
    let p = [c(0.7, 0.1)];
    let ab = a.mul(&b).unwrap();
    assert!((ab.eval(&p)[(0, 0)] - 2.0 * (p[0] - 1.0)).norm() < 1e-15);
    assert_eq!(ab.shift[0][0].as_deref(), Some(&[1][..]));
    let inv = a.inverse_diagonal().unwrap();
    let id = a.mul(&inv).unwrap();
    assert!((id.eval(&p)[(0, 0)] - 1.0).norm() < 1e-15);
    assert_eq!(id.shift[0][0].as_deref(), Some(&[0][..]));
}

#[test]
fn h_currents_build_and_minus_decomposition_holds() {
    let pr = params(2);
    let w = c(0.43, 0.03);
    let h = pi_h(true, 1, w, &pr);
    assert_eq!(h.dim, 5);
    let reps = check_h_decomposition(w, &pr);
    let minus = reps.iter().find(|r| r.check_id == "vector.h_minus_decomposition").unwrap();
    assert!(minus.pass, "residual {:e}", minus.max_rel_residual);
    let corrected = reps.iter().find(|r| r.check_id == "vector.h_plus_decomposition_corrected").unwrap();
    assert!(corrected.pass);
}
