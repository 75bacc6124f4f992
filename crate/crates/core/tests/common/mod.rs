#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use astro_float::{BigFloat, Consts, RoundingMode};
use nalgebra::DMatrix;
use num_complex::Complex64;
use qbs_core::circuit::{Circuit, Gate, QubitLayout};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_by_two(m: [[Complex64; 2]; 2]) -> CMat {
    CMat::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

fn identity() -> CMat {
    CMat::identity(2, 2)
}

fn pauli_x() -> CMat {
    two_by_two([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

fn pauli_y() -> CMat {
    two_by_two([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

fn pauli_z() -> CMat {
    two_by_two([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

fn proj(bit: usize) -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(bit, bit)] = c(1.0, 0.0);
    m
}

/// `⊗_q ops[q]` with qubit 0 as the leftmost (most significant) factor.
pub fn kron_all(ops: &[CMat]) -> CMat {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, m| acc.kronecker(m))
}

/// Operator acting as `m` on `qubit` and identity elsewhere.
pub fn embed(width: usize, placed: &[(usize, CMat)]) -> CMat {
    let ops: Vec<CMat> = (0..width)
        .map(|q| {
            placed
                .iter()
                .find(|(p, _)| *p == q)
                .map(|(_, m)| m.clone())
                .unwrap_or_else(identity)
        })
        .collect();
    kron_all(&ops)
}

/// Dense matrix of a single gate built from Kronecker products of 2×2 blocks.
pub fn gate_matrix(gate: &Gate, width: usize) -> CMat {
    let s = c(FRAC_1_SQRT_2, 0.0);
    match *gate {
        Gate::H(q) => embed(width, &[(q, two_by_two([[s, s], [s, -s]]))]),
        Gate::S(q) => embed(
            width,
            &[(
                q,
                two_by_two([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]),
            )],
        ),
        Gate::Sdg(q) => embed(
            width,
            &[(
                q,
                two_by_two([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]),
            )],
        ),
        Gate::Z(q) => embed(width, &[(q, pauli_z())]),
        Gate::X(q) => embed(width, &[(q, pauli_x())]),
        Gate::Rz { qubit, theta } => embed(
            width,
            &[(
                qubit,
                two_by_two([
                    [Complex64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
                    [c(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
                ]),
            )],
        ),
        Gate::Cnot { control, target } => {
            embed(width, &[(control, proj(0))])
                + embed(width, &[(control, proj(1)), (target, pauli_x())])
        }
        Gate::CPhase {
            control,
            target,
            theta,
        } => {
            let both = embed(width, &[(control, proj(1)), (target, proj(1))]);
            CMat::identity(1 << width, 1 << width)
                + both * (Complex64::from_polar(1.0, theta) - 1.0)
        }
        Gate::Swap(a, b) => {
            (CMat::identity(1 << width, 1 << width)
                + embed(width, &[(a, pauli_x()), (b, pauli_x())])
                + embed(width, &[(a, pauli_y()), (b, pauli_y())])
                + embed(width, &[(a, pauli_z()), (b, pauli_z())]))
                * c(0.5, 0.0)
        }
    }
}

/// Ordered product of the gate matrices times the tracked global phase.
pub fn circuit_matrix(circuit: &Circuit) -> CMat {
    let w = circuit.width();
    let mut u = CMat::identity(1 << w, 1 << w);
    for g in circuit.gates() {
        u = gate_matrix(g, w) * u;
    }
    u * Complex64::from_polar(1.0, circuit.global_phase())
}

/// `F_{jk} = e^{2πijk/N}/√N`.
pub fn dft_matrix(n: usize) -> CMat {
    let norm = (n as f64).sqrt().recip();
    CMat::from_fn(n, n, |j, k| {
        Complex64::from_polar(norm, 2.0 * PI * ((j * k) % n) as f64 / n as f64)
    })
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(1/N) Σ_k h_k (−1)^{Σ_j x_j i_j}` with `x_j` the `j`-th most significant bit of `k`.
pub fn brute_walsh(h: &[f64], word: u64, n_qubits: u32) -> f64 {
    let n = h.len();
    let mut acc = 0.0;
    for (k, hk) in h.iter().enumerate() {
        let mut parity = 0;
        for j in 0..n_qubits {
            let x_j = (k >> (n_qubits - 1 - j)) & 1;
            let i_j = (word >> j) as usize & 1;
            parity ^= x_j & i_j;
        }
        acc += if parity == 0 { *hk } else { -hk };
    }
    acc / n as f64
}

/// Hermitian Walsh coefficient summed in 192-bit arithmetic.
///
/// The f64 inputs (`x_max`, rate, volatility) are taken as exact; only the
/// spectrum and the signed sum are carried at high precision, so tiny words
/// do not inherit the rounding of the larger eigenvalues.
pub fn precise_hermitian_walsh(word: u64, n_qubits: u32, x_max: f64, rate: f64, sigma: f64) -> f64 {
    const P: usize = 192;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("constants cache");
    let big = |v: f64| BigFloat::from_f64(v, P);
    let n = 1usize << n_qubits;
    let two_pi = cc.pi(P, rm).mul(&big(2.0), P, rm);
    let dx = big(2.0)
        .mul(&big(x_max), P, rm)
        .div(&big((n - 1) as f64), P, rm);
    let drift = big(rate).sub(
        &big(sigma).mul(&big(sigma), P, rm).div(&big(2.0), P, rm),
        P,
        rm,
    );
    let scale = drift.div(&dx, P, rm);
    let mut acc = big(0.0);
    for k in 0..n {
        let angle = two_pi.mul(&big(k as f64), P, rm).div(&big(n as f64), P, rm);
        let hk = scale.mul(&angle.sin(P, rm, &mut cc), P, rm);
        let mut parity = 0;
        for j in 0..n_qubits {
            parity ^= (k >> (n_qubits - 1 - j)) & 1 & (word >> j) as usize;
        }
        acc = if parity == 0 {
            acc.add(&hk, P, rm)
        } else {
            acc.sub(&hk, P, rm)
        };
    }
    let mean = acc.div(&big(n as f64), P, rm);
    mean.to_string()
        .parse()
        .expect("decimal rendering of a finite value")
}

/// Restriction of a circuit unitary to inputs and outputs with `q_G = 0`,
/// reindexed as `e·N + x`.
pub fn restrict(u: &CMat, n_register: usize) -> (CMat, f64) {
    let layout = QubitLayout::new(n_register);
    let n = 1 << n_register;
    let mut out = CMat::zeros(2 * n, 2 * n);
    let mut leak: f64 = 0.0;
    for e_in in 0..2 {
        for x in 0..n {
            let col = layout.index(x, e_in == 1, false);
            for e_out in 0..2 {
                for y in 0..n {
                    out[(e_out * n + y, e_in * n + x)] =
                        u[(layout.index(y, e_out == 1, false), col)];
                    leak = leak.max(u[(layout.index(y, e_out == 1, true), col)].norm());
                }
            }
        }
    }
    (out, leak)
}
