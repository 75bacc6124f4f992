mod common;

use common::{brute_walsh, precise_hermitian_walsh};
use num_complex::Complex64;
use qbs_core::hamiltonian::{
    build_truncation_plan, closed_form_hermitian_coefficient, degeneracy_bound,
    embedded_asymptotic_coefficients, embedded_eigenvalues, hermitian_eigenvalues,
    minimum_valid_index, truncation_error_bound, truncation_index, walsh_coefficients,
};
use qbs_core::{ContractParams, GridSpec};

fn reference(n_q: u32) -> (GridSpec, ContractParams) {
    (
        GridSpec::from_s_max(n_q, 135.0).unwrap(),
        ContractParams::reference_put(),
    )
}

#[test]
fn closed_form_matches_precise_sum() {
    for n_q in 3..=8 {
        let (g, c) = reference(n_q);
        for word in (1..1u64 << n_q).step_by(2) {
            let brute = precise_hermitian_walsh(word, n_q, g.x_max(), c.rate, c.sigma);
            let cf = closed_form_hermitian_coefficient(word, &g, &c);
            assert!(
                (cf - brute).abs() <= 1e-9 * brute.abs(),
                "n={n_q} word={word:b}: {cf} vs {brute}"
            );
        }
    }
}

#[test]
fn fast_transform_matches_brute_force() {
    let (g, c) = reference(6);
    for h in [
        hermitian_eigenvalues(&g, &c),
        embedded_eigenvalues(&g, &c).unwrap(),
    ] {
        let e = walsh_coefficients(&h);
        for word in 0..64u64 {
            assert!((e.coefficient(word) - brute_walsh(&h.eigenvalues, word, 6)).abs() < 1e-12);
        }
    }
}

#[test]
fn parity_structure_of_expansions() {
    let (g, c) = reference(8);
    let herm = walsh_coefficients(&hermitian_eigenvalues(&g, &c));
    let emb = walsh_coefficients(&embedded_eigenvalues(&g, &c).unwrap());
    let mut herm_nonzero = 0;
    for word in 0..256u64 {
        if word & 1 == 0 {
            assert!(herm.coefficient(word).abs() < 1e-12);
        } else {
            herm_nonzero += 1;
            assert!(emb.coefficient(word).abs() < 1e-12);
        }
    }
    assert_eq!(herm_nonzero, 128);
}

#[test]
fn hermitian_leaders_at_reference_params() {
    let (g, c) = reference(8);
    let plan = build_truncation_plan(&g, &c, 14, 6).unwrap();
    let herm: Vec<(u64, Option<usize>)> =
        plan.hermitian_terms().map(|t| (t.word, t.index)).collect();
    // Qubit j is bit j of the word.
    let expected_words = [
        0b1, 0b111, 0b1011, 0b10011, 0b1101, 0b100011, 0b10101, 0b1000011, 0b100101, 0b11001, 0b11,
        0b10000011, 0b1000101, 0b101001,
    ];
    assert_eq!(
        herm.iter().map(|(w, _)| *w).collect::<Vec<_>>(),
        expected_words
    );
    let indices: Vec<usize> = herm.iter().map(|(_, i)| i.unwrap()).collect();
    assert_eq!(indices, vec![0, 1, 2, 3, 3, 4, 4, 5, 5, 5, 6, 6, 6, 6]);

    let first = plan.hermitian_terms().next().unwrap();
    assert!((first.coefficient - 2.3165).abs() < 1e-4);
    let emb: Vec<u64> = plan.embedded_terms().map(|t| t.word).collect();
    assert_eq!(emb, vec![0, 0b110, 0b1010, 0b1100, 0b10010, 0b10100]);
}

#[test]
fn index_ranking_follows_magnitude() {
    let (g, c) = reference(8);
    let herm = walsh_coefficients(&hermitian_eigenvalues(&g, &c));
    let words: Vec<u64> = (1..256u64).step_by(2).collect();
    for &a in &words {
        for &b in &words {
            let (ia, ib) = (
                truncation_index(a, 8).unwrap(),
                truncation_index(b, 8).unwrap(),
            );
            if ia < ib {
                assert!(
                    herm.coefficient(a).abs() >= herm.coefficient(b).abs() * (1.0 - 1e-12),
                    "{a:b} (I'={ia}) vs {b:b} (I'={ib})"
                );
            }
        }
    }
}

/// Number of Hermitian words with a given index, by enumeration.
fn exact_degeneracy(n_q: u32) -> Vec<usize> {
    let max = (n_q * (n_q - 1) / 2 - 1) as usize;
    let mut g = vec![0; max + 1];
    for word in (1..1u64 << n_q).step_by(2) {
        g[truncation_index(word, n_q).unwrap()] += 1;
    }
    g
}

#[test]
fn degeneracy_bound_dominates_enumeration() {
    for n_q in 3..=10 {
        let g = exact_degeneracy(n_q);
        for (index, count) in g.iter().enumerate().skip(1) {
            let bound = degeneracy_bound(index, n_q).unwrap();
            assert!((*count as f64) < bound, "n={n_q} I'={index}");
        }
        assert!(degeneracy_bound(g.len(), n_q).is_err());
        assert!(degeneracy_bound(0, n_q).is_err());
    }
    let g8 = exact_degeneracy(8);
    assert_eq!(g8[1], 1);
    assert!(degeneracy_bound(1, 8).unwrap() > 1.0);
}

#[test]
fn odd_body_degeneracy_is_symmetric() {
    // Subsets of {0, …, n−2} with an even number of elements, by sum.
    let n_q = 9u32;
    let m = n_q - 1;
    let top = (m * (m - 1) / 2) as usize;
    let mut g = vec![0usize; top + 1];
    for subset in 0u32..1 << m {
        if subset.count_ones() % 2 == 0 {
            let sum: u32 = (0..m).filter(|j| subset >> j & 1 == 1).sum();
            g[sum as usize] += 1;
        }
    }
    for i in 0..=top {
        assert_eq!(g[i], g[top - i]);
    }
}

/// `max_k |exp(iT Σ_{I'(J) ≥ M} h'_J W_J(k)) − 1|`; the operator is diagonal
/// in the momentum basis so its norm is the largest eigenvalue modulus.
fn dropped_deviation(m: usize, n_q: u32, c: &ContractParams, coeffs: &[f64]) -> f64 {
    let n = 1usize << n_q;
    let dropped: Vec<u64> = (1..n as u64)
        .step_by(2)
        .filter(|w| truncation_index(*w, n_q).unwrap() >= m)
        .collect();
    (0..n)
        .map(|k| {
            let angle: f64 = dropped
                .iter()
                .map(|&w| coeffs[w as usize] * sign(w, k, n_q))
                .sum();
            (Complex64::from_polar(1.0, c.maturity * angle) - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

fn sign(word: u64, k: usize, n_q: u32) -> f64 {
    let mut parity = 0;
    for j in 0..n_q {
        parity ^= (k >> (n_q - 1 - j)) & 1 & (word >> j) as usize;
    }
    if parity == 0 {
        1.0
    } else {
        -1.0
    }
}

#[test]
fn truncation_bound_dominates_dropped_terms() {
    let (g, c) = reference(8);
    let coeffs: Vec<f64> = (0..256u64)
        .map(|w| closed_form_hermitian_coefficient(w, &g, &c))
        .collect();
    let m_min = minimum_valid_index(&g, &c);
    assert_eq!(m_min, 13);
    let mut previous = f64::INFINITY;
    for m in m_min..=27 {
        let bound = truncation_error_bound(m, 1.0, &g, &c).unwrap();
        let measured = dropped_deviation(m as usize, 8, &c, &coeffs);
        assert!(measured <= bound, "M={m}: {measured} > {bound}");
        assert!(bound < previous);
        previous = bound;
    }
}

#[test]
fn asymptotic_identity_term_vs_exact() {
    let (g, c) = reference(8);
    let approx = embedded_asymptotic_coefficients(&g, &c).unwrap();
    let exact = walsh_coefficients(&embedded_eigenvalues(&g, &c).unwrap()).coefficient(0);
    let gap = (approx.identity_term - exact).abs();
    eprintln!(
        "identity term at n=8: asymptotic {} exact {exact} gap {gap}",
        approx.identity_term
    );
    assert!(gap < 0.5);
}
