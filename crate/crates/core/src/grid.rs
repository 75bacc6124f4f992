//! Position lattice, finite-difference momentum operator and sampling checks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fourier;
use crate::{Error, Result};

/// Largest register handled by the dense and statevector paths.
pub const MAX_REGISTER_QUBITS: u32 = 24;

/// Equispaced log-price lattice on `[-x_max, x_max]` with `2^n_q` points.
///
/// Index `i` sits at `x_i = -x_max + i·δx` with `δx = 2·x_max/(N−1)`, so both
/// end points are grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_qubits: u32,
    x_max: f64,
    delta_x: f64,
    positions: Vec<f64>,
}

impl GridSpec {
    pub fn new(n_qubits: u32, x_max: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::TooFewQubits(n_qubits));
        }
        if n_qubits > MAX_REGISTER_QUBITS {
            return Err(Error::TooManyQubits(n_qubits));
        }
        if !x_max.is_finite() || x_max <= 0.0 {
            return Err(Error::param("x_max", "finite and positive", x_max));
        }
        let n = 1usize << n_qubits;
        let delta_x = 2.0 * x_max / (n - 1) as f64;
        let mut positions: Vec<f64> = (0..n).map(|i| -x_max + i as f64 * delta_x).collect();
        // Pin the far end exactly; i·δx accumulates one rounding.
        positions[n - 1] = x_max;
        Ok(Self {
            n_qubits,
            x_max,
            delta_x,
            positions,
        })
    }

    /// Grid whose physical half-window `(-x_max/2, x_max/2)` maps onto stock
    /// prices `(1/S_max, S_max)`, i.e. `x_max = 2·ln(S_max)`.
    pub fn from_s_max(n_qubits: u32, s_max: f64) -> Result<Self> {
        if !s_max.is_finite() || s_max <= 1.0 {
            return Err(Error::param("s_max", "finite and greater than 1", s_max));
        }
        Self::new(n_qubits, 2.0 * s_max.ln())
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Number of lattice points `N = 2^n_q`.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn s_max(&self) -> f64 {
        (0.5 * self.x_max).exp()
    }

    /// Number of points in the physical half-window (the lower half of the
    /// register, before the mirrored copy).
    pub fn physical_len(&self) -> usize {
        self.len() / 2
    }

    /// Log-price of lattice index `j` once the half-window shift is undone.
    pub fn physical_log_price(&self, j: usize) -> f64 {
        -0.5 * self.x_max + j as f64 * self.delta_x
    }

    /// Stock prices `S_j = exp(-x_max/2 + j·δx)` for the physical half-window.
    pub fn physical_prices(&self) -> Vec<f64> {
        (0..self.physical_len())
            .map(|j| self.physical_log_price(j).exp())
            .collect()
    }
}

pub fn build_grid(n_qubits: u32, x_max: f64) -> Result<GridSpec> {
    GridSpec::new(n_qubits, x_max)
}

/// Eigenvalues of the periodic central-difference momentum operator, indexed
/// by Fourier index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSpectrum(Vec<f64>);

impl MomentumSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// `p_k = sin(2πk/N)/δx` for `k = 0..N`.
pub fn momentum_eigenvalues(grid: &GridSpec) -> MomentumSpectrum {
    let n = grid.len();
    let mut values: Vec<f64> = (0..n)
        .map(|k| (2.0 * PI * k as f64 / n as f64).sin() / grid.delta_x())
        .collect();
    // sin(π) and its multiples are not exactly zero in floating point.
    values[0] = 0.0;
    values[n / 2] = 0.0;
    MomentumSpectrum(values)
}

/// Dense `(−i/2δx)·(S − Sᵀ)` with periodic wraparound, where `S` is the
/// forward shift. Only used as a reference for the spectral path.
///
/// With the crate's DFT convention this equals `F·diag(p)·F†`; the QFT-side
/// ordering `F†·diag(p)·F` gives its negative.
pub fn momentum_matrix_fd(grid: &GridSpec) -> DMatrix<Complex64> {
    let n = grid.len();
    let c = Complex64::new(0.0, -0.5 / grid.delta_x());
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, (j + 1) % n)] += c;
        m[(j, (j + n - 1) % n)] -= c;
    }
    m
}

/// Mass of a lattice state near the edges of position and momentum space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NyquistReport {
    /// Squared-amplitude mass in the outer position band.
    pub position_tail_mass: f64,
    /// Squared-amplitude mass in the band around the Nyquist frequency.
    pub momentum_tail_mass: f64,
    /// Whether `δx ≤ π/x_max`, the sampling-spacing criterion.
    pub spacing_ok: bool,
    /// Both tail masses are below the tolerance.
    pub valid: bool,
}

/// Default fraction of lattice points counted as "edge".
pub const DEFAULT_EDGE_BAND: f64 = 1.0 / 16.0;

pub fn nyquist_report(amplitudes: &[Complex64], grid: &GridSpec, epsilon: f64) -> NyquistReport {
    nyquist_report_with_band(amplitudes, grid, epsilon, DEFAULT_EDGE_BAND)
}

/// Like [`nyquist_report`] with a configurable band fraction. Half of the band
/// sits at each edge; at least one point per edge is always included.
///
/// # Panics
/// If `amplitudes.len()` differs from the grid size.
pub fn nyquist_report_with_band(
    amplitudes: &[Complex64],
    grid: &GridSpec,
    epsilon: f64,
    band_fraction: f64,
) -> NyquistReport {
    let n = grid.len();
    assert_eq!(
        amplitudes.len(),
        n,
        "amplitude vector does not match the grid"
    );
    let per_side = ((n as f64 * band_fraction * 0.5).round() as usize).clamp(1, n / 2);

    let total: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let total = if total > 0.0 { total } else { 1.0 };

    let position_tail_mass = (0..per_side)
        .chain(n - per_side..n)
        .map(|i| amplitudes[i].norm_sqr())
        .sum::<f64>()
        / total;

    let mut spectrum = amplitudes.to_vec();
    fourier::qft(&mut spectrum);
    // The highest |frequency| sits at k = N/2; the band is centred there.
    let momentum_tail_mass = (n / 2 - per_side..n / 2 + per_side)
        .map(|k| spectrum[k].norm_sqr())
        .sum::<f64>()
        / total;

    NyquistReport {
        position_tail_mass,
        momentum_tail_mass,
        spacing_ok: grid.delta_x() <= PI / grid.x_max(),
        valid: position_tail_mass < epsilon && momentum_tail_mass < epsilon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_grid() {
        let g = build_grid(2, 3.0).unwrap();
        assert_eq!(g.positions(), &[-3.0, -1.0, 1.0, 3.0]);
        assert_eq!(g.delta_x(), 2.0);
    }

    #[test]
    fn reference_grid_spacing() {
        let x_max = 2.0 * 135f64.ln();
        let g = build_grid(8, x_max).unwrap();
        assert_eq!(g.len(), 256);
        assert!((g.delta_x() - 4.0 * 135f64.ln() / 255.0).abs() < 1e-15);
        let from_smax = GridSpec::from_s_max(8, 135.0).unwrap();
        assert_eq!(from_smax, g);
        assert!((g.s_max() - 135.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(build_grid(1, 1.0), Err(Error::TooFewQubits(1)));
        assert!(build_grid(3, f64::NAN).is_err());
        assert!(build_grid(3, f64::INFINITY).is_err());
        assert!(build_grid(3, -1.0).is_err());
        assert!(GridSpec::from_s_max(3, 0.5).is_err());
    }

    #[test]
    fn endpoints_and_spacing() {
        for n_q in 2..=12 {
            let g = build_grid(n_q, 4.7).unwrap();
            let x = g.positions();
            assert_eq!(x[0], -4.7);
            assert!((x[x.len() - 1] - 4.7).abs() <= 1e-12 * 4.7);
            for w in x.windows(2) {
                assert!(w[1] > w[0]);
                assert!((w[1] - w[0] - g.delta_x()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_qubit_spectrum() {
        let g = build_grid(2, 3.0).unwrap();
        let p = momentum_eigenvalues(&g);
        let expect = [0.0, 0.5, 0.0, -0.5];
        for (a, b) in p.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_index_is_max_momentum() {
        let g = build_grid(8, 2.0 * 135f64.ln()).unwrap();
        let p = momentum_eigenvalues(&g);
        assert!((p.values()[64] - 1.0 / g.delta_x()).abs() < 1e-12);
    }

    #[test]
    fn spectrum_antisymmetric_and_bounded() {
        for n_q in 2..=12 {
            let g = build_grid(n_q, 3.3).unwrap();
            let p = momentum_eigenvalues(&g);
            let v = p.values();
            let n = v.len();
            assert_eq!(v[0], 0.0);
            for k in 1..n {
                assert!((v[k] + v[n - k]).abs() < 1e-12 / g.delta_x());
                assert!(v[k].abs() <= 1.0 / g.delta_x() + 1e-12);
            }
        }
    }

    #[test]
    fn fd_matrix_two_qubits() {
        let g = build_grid(2, 3.0).unwrap();
        let m = momentum_matrix_fd(&g);
        let c = Complex64::new(0.0, 0.25);
        // row 0: [0, -i/(2δx), 0, +i/(2δx)]
        assert_eq!(m[(0, 1)], -c);
        assert_eq!(m[(0, 3)], c);
        assert_eq!(m[(1, 0)], c);
        assert_eq!(m[(3, 0)], -c);
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(m.adjoint(), m);
    }

    #[test]
    fn uniform_state_fails_position_check() {
        let g = build_grid(6, 2.0).unwrap();
        let amp = Complex64::new(1.0 / 8.0, 0.0);
        let r = nyquist_report(&vec![amp; 64], &g, 1e-6);
        assert!((r.position_tail_mass - 1.0 / 16.0).abs() < 1e-12);
        assert!(r.momentum_tail_mass < 1e-20);
        assert!(!r.valid);
    }

    #[test]
    fn delta_spike_fails_momentum_check() {
        let g = build_grid(6, 2.0).unwrap();
        let mut a = vec![Complex64::new(0.0, 0.0); 64];
        a[32] = Complex64::new(1.0, 0.0);
        let r = nyquist_report(&a, &g, 1e-6);
        assert_eq!(r.position_tail_mass, 0.0);
        assert!((r.momentum_tail_mass - 1.0 / 16.0).abs() < 1e-12);
        assert!(!r.valid);
    }

    #[test]
    fn smooth_bump_passes() {
        let g = build_grid(7, 6.0).unwrap();
        let a: Vec<Complex64> = g
            .positions()
            .iter()
            .map(|x| Complex64::new((-x * x).exp(), 0.0))
            .collect();
        let r = nyquist_report(&a, &g, 1e-6);
        assert!(r.valid, "{r:?}");
        assert!(r.spacing_ok);
    }
}
