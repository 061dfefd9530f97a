mod common;

use spca::numlin::{
    inv_sqrt_psd, orthonormality_defect, polar_orth, projector, subspace_loss, sym_eig, thin_svd, DenseMatrix,
    DEFAULT_RANK_TOL,
};

use common::*;

fn sym_part(m: &DenseMatrix) -> DenseMatrix {
    m.add(&m.transpose()).scale(0.5)
}

#[test]
fn singular_values_match_jacobi_eigenvalues() {
    let mut g = rng(1);
    for (rows, cols) in [(9, 4), (4, 9), (12, 12), (30, 7), (3, 1)] {
        let m = gaussian(rows, cols, &mut g);
        let k = rows.min(cols);
        let svd = thin_svd(&m, k).unwrap();
        let oracle = jacobi_eigenvalues(&m.gram());
        for (s, lam) in svd.singular_values.iter().zip(&oracle) {
            let want = lam.max(0.0).sqrt();
            assert!((s - want).abs() <= 1e-8 * want.max(1.0), "{rows}x{cols}: {s} vs {want}");
        }
        assert!(svd.reconstruct().sub(&m).max_abs() < 1e-9 * m.max_abs());
        assert!(orthonormality_defect(&svd.u) < 1e-10);
        assert!(orthonormality_defect(&svd.v()) < 1e-10);
    }
}

#[test]
fn singular_vectors_follow_sign_convention() {
    let mut g = rng(2);
    let m = gaussian(8, 5, &mut g);
    let v = thin_svd(&m, 3).unwrap().v();
    for j in 0..3 {
        let col = v.column(j);
        let big = col
            .iter()
            .copied()
            .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        assert!(big > 0.0);
    }
}

#[test]
fn eigendecomposition_matches_jacobi_and_reconstructs() {
    let mut g = rng(3);
    let a = gaussian(10, 10, &mut g);
    let m = sym_part(&a);
    let eig = sym_eig(&m).unwrap();
    for (x, y) in eig.eigenvalues.iter().zip(jacobi_eigenvalues(&m)) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(eig.reconstruct_with(|l| l).sub(&m).max_abs() < 1e-10);
}

#[test]
fn polar_defining_properties() {
    let mut g = rng(4);
    for _ in 0..20 {
        let m = gaussian(6, 2, &mut g);
        let a = polar_orth(&m, DEFAULT_RANK_TOL).unwrap();
        assert!(orthonormality_defect(&a) < 1e-9);
        let h = m.tr_matmul(&a);
        assert!(h.asymmetry() < 1e-9);
        let ev = jacobi_eigenvalues(&sym_part(&h));
        assert!(ev.iter().all(|&l| l >= -1e-9));
    }
}

#[test]
fn polar_agrees_with_inverse_square_root_route() {
    let mut g = rng(5);
    for (p, r) in [(6, 2), (20, 4), (9, 9)] {
        let m = gaussian(p, r, &mut g);
        let direct = polar_orth(&m, DEFAULT_RANK_TOL).unwrap();
        let via_gram = m.matmul(&inv_sqrt_psd(&m.gram(), DEFAULT_RANK_TOL).unwrap());
        assert!(direct.sub(&via_gram).max_abs() < 1e-9);
    }
}

#[test]
fn polar_maximizes_trace_against_random_frames() {
    let mut g = rng(6);
    let m = gaussian(7, 3, &mut g);
    let a = polar_orth(&m, DEFAULT_RANK_TOL).unwrap();
    let best = a.tr_matmul(&m).trace();
    for _ in 0..500 {
        let q = random_frame(7, 3, &mut g);
        assert!(q.tr_matmul(&m).trace() <= best + 1e-12);
    }
}

#[test]
fn inverse_square_root_commutes() {
    let mut g = rng(7);
    let b = gaussian(12, 5, &mut g);
    let m = b.gram();
    let p = inv_sqrt_psd(&m, DEFAULT_RANK_TOL).unwrap();
    assert!(p.matmul(&m).sub(&m.matmul(&p)).frobenius_norm() <= 1e-8 * m.frobenius_norm());
    let should_be_identity = p.matmul(&m).matmul(&p);
    assert!(should_be_identity.sub(&DenseMatrix::identity(5)).max_abs() < 1e-9);
}

#[test]
fn projector_idempotent_and_basis_free() {
    let mut g = rng(8);
    let v = random_frame(5, 2, &mut g);
    let pv = projector(&v).unwrap();
    assert!(pv.matmul(&pv).sub(&pv).max_abs() < 1e-10);
    let rot = random_frame(2, 2, &mut g);
    assert!(projector(&v.matmul(&rot)).unwrap().sub(&pv).max_abs() < 1e-10);
    assert!((pv.trace() - 2.0).abs() < 1e-12);
}

#[test]
fn subspace_loss_matches_explicit_projectors() {
    let mut g = rng(9);
    for (p, r) in [(4, 1), (10, 3), (25, 5)] {
        let v = random_frame(p, r, &mut g);
        let w = random_frame(p, r, &mut g);
        let fast = subspace_loss(&v, &w).unwrap();
        let slow = naive_projector_distance(&v, &w);
        assert!((fast - slow).abs() < 1e-12);
    }
}

#[test]
fn subspace_loss_planes_sharing_one_axis() {
    let v = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
    let w = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]).unwrap();
    assert!((subspace_loss(&v, &w).unwrap() - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn subspace_loss_rejects_bad_frames() {
    let v = DenseMatrix::eye_columns(4, 2);
    assert!(subspace_loss(&v, &DenseMatrix::eye_columns(4, 1)).is_err());
    assert!(subspace_loss(&v, &v.scale(2.0)).is_err());
}
