mod common;

use common::{dft_matrix, max_abs};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qbs_core::grid::{momentum_eigenvalues, momentum_matrix_fd};
use qbs_core::{build_grid, GridSpec};

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn spectrum_matches_dense_eigendecomposition() {
    for n_q in 2..=6 {
        let g = GridSpec::from_s_max(n_q, 135.0).unwrap();
        let dense = momentum_matrix_fd(&g).symmetric_eigen();
        let brute = sorted(dense.eigenvalues.iter().copied().collect());
        let spectral = sorted(momentum_eigenvalues(&g).into_vec());
        for (a, b) in brute.iter().zip(&spectral) {
            assert!((a - b).abs() < 1e-10, "n={n_q}: {a} vs {b}");
        }
    }
}

#[test]
fn dft_diagonalises_difference_operator() {
    for n_q in 2..=6 {
        let g = GridSpec::from_s_max(n_q, 135.0).unwrap();
        let n = g.len();
        let f = dft_matrix(n);
        let p = momentum_eigenvalues(&g);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            p.values().iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let rebuilt = &f * d * f.adjoint();
        assert!(
            max_abs(&(rebuilt - momentum_matrix_fd(&g))) < 1e-12,
            "n={n_q}"
        );
    }
}

#[test]
fn antisymmetry_up_to_twelve_qubits() {
    for n_q in 2..=12 {
        let g = build_grid(n_q, 9.0).unwrap();
        let p = momentum_eigenvalues(&g);
        let v = p.values();
        let n = v.len();
        // Rounding of the argument 2πk/N is what separates the two sines.
        let tol = 4.0 * std::f64::consts::TAU * f64::EPSILON / g.delta_x();
        for k in 1..n {
            assert!((v[k] + v[n - k]).abs() <= tol, "n={n_q} k={k}");
        }
    }
}

proptest! {
    #[test]
    fn lattice_is_uniform_and_symmetric(n_q in 2u32..=12, x_max in 0.1f64..40.0) {
        let g = build_grid(n_q, x_max).unwrap();
        let x = g.positions();
        prop_assert_eq!(x.len(), 1usize << n_q);
        prop_assert!((x[0] + x_max).abs() < 1e-12 * x_max);
        prop_assert!((x[x.len() - 1] - x_max).abs() < 1e-12 * x_max);
        for w in x.windows(2) {
            prop_assert!((w[1] - w[0] - g.delta_x()).abs() < 1e-9 * g.delta_x());
        }
    }

    #[test]
    fn momenta_bounded_by_inverse_spacing(n_q in 2u32..=12, x_max in 0.1f64..40.0) {
        let g = build_grid(n_q, x_max).unwrap();
        let bound = 1.0 / g.delta_x();
        for p in momentum_eigenvalues(&g).values() {
            prop_assert!(p.abs() <= bound * (1.0 + 1e-15));
        }
    }
}
