use nalgebra::DMatrix;
use num_complex::Complex64;

use super::compile::check_plan;
use crate::fourier::{bit_reverse, fwht, inverse_qft, qft};
use crate::grid::GridSpec;
use crate::hamiltonian::{
    embedded_eigenvalues, hermitian_eigenvalues, HamiltonianKind, TruncationPlan,
};
use crate::payoff::ContractParams;
use crate::Result;

/// Momentum-basis diagonals of the two blocks `cos(H̃)·e^{−iTH}` and
/// `sin(H̃)·e^{−iTH}`, either exact or rebuilt from the retained terms.
pub(crate) fn momentum_blocks(
    grid: &GridSpec,
    contract: &ContractParams,
    plan: Option<&TruncationPlan>,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let embedded = embedded_eigenvalues(grid, contract)?;
    let (h_tilde, h_herm) = match plan {
        None => (
            embedded.eigenvalues,
            hermitian_eigenvalues(grid, contract).eigenvalues,
        ),
        Some(plan) => {
            check_plan(plan, grid, contract)?;
            let n_q = grid.n_qubits();
            let rebuild = |kind: HamiltonianKind| {
                let mut natural = vec![0.0; grid.len()];
                for t in plan.terms.iter().filter(|t| t.kind == kind) {
                    natural[bit_reverse(t.word as usize, n_q)] += t.coefficient;
                }
                fwht(&mut natural);
                natural
            };
            (
                rebuild(HamiltonianKind::Embedded),
                rebuild(HamiltonianKind::Hermitian),
            )
        }
    };
    let t = contract.maturity;
    let phase = |h: f64| Complex64::from_polar(1.0, -t * h);
    let top = h_tilde
        .iter()
        .zip(&h_herm)
        .map(|(a, h)| a.cos() * phase(*h))
        .collect();
    let off = h_tilde
        .iter()
        .zip(&h_herm)
        .map(|(a, h)| a.sin() * phase(*h))
        .collect();
    Ok((top, off))
}

/// First column of the circulant `F†·diag(d)·F`.
fn circulant_column(diagonal: &[Complex64]) -> Vec<Complex64> {
    let n = diagonal.len();
    let mut v = vec![Complex64::new((n as f64).sqrt().recip(), 0.0); n];
    v.iter_mut().zip(diagonal).for_each(|(a, d)| *a *= d);
    inverse_qft(&mut v);
    v
}

/// Dense `2N × 2N` dilation propagator, row/column index `e·N + x` with `e`
/// the embedding qubit.
///
/// Blocks are `[[Ô, √(1−Ô²)], [√(1−Ô²), −Ô]]`, each multiplied by the drift
/// propagator `e^{−iTH}`. With a plan the diagonals come from the retained
/// Cartan terms only.
pub fn exact_propagator(
    grid: &GridSpec,
    contract: &ContractParams,
    truncated: Option<&TruncationPlan>,
) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let (top, off) = momentum_blocks(grid, contract, truncated)?;
    let (a, b) = (circulant_column(&top), circulant_column(&off));
    Ok(DMatrix::from_fn(2 * n, 2 * n, |row, col| {
        let (er, x) = (row / n, row % n);
        let (ec, y) = (col / n, col % n);
        let shift = (x + n - y) % n;
        match (er, ec) {
            (0, 0) => a[shift],
            (1, 1) => -a[shift],
            _ => b[shift],
        }
    }))
}

/// `F†·diag(d)·F·v`, the action of a momentum-diagonal operator on a register state.
pub(crate) fn apply_momentum_diagonal(v: &[Complex64], diagonal: &[Complex64]) -> Vec<Complex64> {
    let mut w = v.to_vec();
    qft(&mut w);
    w.iter_mut().zip(diagonal).for_each(|(a, d)| *a *= d);
    inverse_qft(&mut w);
    w
}
