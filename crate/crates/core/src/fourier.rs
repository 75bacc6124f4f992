//! Discrete Fourier and Walsh-Hadamard transforms shared by every module.
//!
//! One DFT convention is used throughout: `F[j][k] = ω^{jk} / √N` with
//! `ω = exp(2πi/N)`. This is the map `|x⟩ ↦ N^{-1/2} Σ_k ω^{xk} |k⟩` realised
//! by the QFT circuit, so applying [`qft`] and then [`inverse_qft`] around a
//! diagonal momentum operator reproduces what the compiled circuit does.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Applies `F` in place: `out[k] = N^{-1/2} Σ_j exp(2πi jk/N) x[j]`.
pub fn qft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
    normalize(buf);
}

/// Applies `F†` in place.
pub fn inverse_qft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
    normalize(buf);
}

fn normalize(buf: &mut [Complex64]) {
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for z in buf.iter_mut() {
        *z *= scale;
    }
}

/// Unnormalised fast Walsh-Hadamard transform in natural (Hadamard) order:
/// `out[m] = Σ_k x[k] (-1)^{popcount(k & m)}`.
///
/// # Panics
/// If the length is not a power of two.
pub fn fwht(buf: &mut [f64]) {
    let n = buf.len();
    assert!(
        n.is_power_of_two(),
        "Walsh-Hadamard length {n} is not a power of two"
    );
    let mut half = 1;
    while half < n {
        for block in buf.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Reverses the lowest `bits` bits of `value`.
pub fn bit_reverse(value: usize, bits: u32) -> usize {
    if bits == 0 {
        return 0;
    }
    value.reverse_bits() >> (usize::BITS - bits)
}
