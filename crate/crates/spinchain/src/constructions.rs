//! Analytic chain families with known transfer behavior, plus an inverse
//! eigenvalue solver that reconstructs a mirror-symmetric chain from a
//! target spectrum.

use num_rational::BigRational;

use crate::chain_model::{ChainSpec, Model, SingleExcitationOperator};
use crate::{exact, Error, Result};

/// Field-free Heisenberg chain with couplings `J_n = n(N-n)`. Its
/// single-excitation spectrum is `{-n(n-1)}` for `n = 1..N` — quadratically
/// spaced even integers, so the chain has a perfect revival at `t = pi` and
/// its end overlaps are the exact binomial weights of [`hahn_overlaps`].
pub fn hahn_chain(n: usize) -> Result<ChainSpec> {
    if n < 2 {
        return Err(Error::Validation("need at least two sites".into()));
    }
    let couplings: Vec<f64> = (1..n).map(|m| (m * (n - m)) as f64).collect();
    ChainSpec::field_free(Model::Heisenberg, couplings)
}

/// Exact squared end-site components `|<lambda_n|1>|^2` of the quadratic
/// chain of [`hahn_chain`], indexed by decreasing eigenvalue.
pub fn hahn_overlaps(n: usize) -> Result<Vec<BigRational>> {
    (1..=n).map(|mode| exact::binomial_overlap(n, mode)).collect()
}

/// Exchange chain (zero diagonal) with
/// `J_n^2 = n^2 (N-n)(N+n) / ((2n-1)(2n+1))`: the spectrum is the linear
/// ladder `{N-1, N-3, ..., -(N-1)}` and every eigenvector has squared first
/// component exactly `1/N`, giving a perfect revival at `t = pi`. The chain
/// is not mirror-symmetric.
pub fn uniform_overlap_chain(n: usize) -> Result<ChainSpec> {
    if n < 2 {
        return Err(Error::Validation("need at least two sites".into()));
    }
    let couplings: Vec<f64> = (1..n)
        .map(|m| {
            let m2 = (m * m) as f64;
            let num = m2 * ((n - m) as f64) * ((n + m) as f64);
            let den = ((2 * m - 1) * (2 * m + 1)) as f64;
            (num / den).sqrt()
        })
        .collect();
    ChainSpec::field_free(Model::Exchange, couplings)
}

/// Exchange chain (zero diagonal) with `J_n = sqrt(n(2N-1-n))` for
/// `n <= N-2` and final coupling `J_{N-1} = sqrt(2N(N-1))`.
///
/// This is the length-`(2N-1)` linear-spectrum chain `J_n = sqrt(n(2N-1-n))`
/// folded at its center: the symmetric parity block of that chain is exactly
/// this matrix (folding multiplies the central coupling by sqrt(2), and
/// `2 * (N-1)(2N-1-(N-1)) = 2N(N-1)`). Its spectrum is every other rung of
/// the linear ladder, `{2N-2, 2N-6, ...}`, with constant gap 4, so both this
/// chain and the chain with its last site removed (the complementary parity
/// block, gap 4 offset by 2) have perfect revivals at `t = pi/2`, with a
/// relative phase of pi between them. The maximum eigenvalue is `2N-2`.
pub fn lm_chain(n: usize) -> Result<ChainSpec> {
    if n < 2 {
        return Err(Error::Validation("need at least two sites".into()));
    }
    let mut couplings: Vec<f64> = (1..n - 1).map(|m| ((m * (2 * n - 1 - m)) as f64).sqrt()).collect();
    couplings.push(((2 * n * (n - 1)) as f64).sqrt());
    ChainSpec::field_free(Model::Exchange, couplings)
}

/// Reconstructs the unique mirror-symmetric tridiagonal matrix with the
/// given strictly decreasing spectrum.
///
/// First-site overlaps follow from the alternating-product formula
/// `w_n ∝ (-1)^{n+1} / prod_{m != n} (lambda_n - lambda_m)` (positive for
/// any strictly decreasing input); the boundary vector `q_n = sqrt(w_n)`
/// then seeds a Lanczos three-term recurrence against `diag(spectrum)`,
/// with full reorthogonalization (run twice per step) for robustness at
/// these small sizes.
pub fn inverse_eigenvalue_persymmetric(spectrum: &[f64]) -> Result<SingleExcitationOperator> {
    let n = spectrum.len();
    if n == 0 {
        return Err(Error::Validation("spectrum must be non-empty".into()));
    }
    if let Some(bad) = spectrum.iter().find(|x| !x.is_finite()) {
        return Err(Error::Validation(format!("spectrum must be finite, got {bad}")));
    }
    if spectrum.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Validation("spectrum must be strictly decreasing".into()));
    }
    if n == 1 {
        return SingleExcitationOperator::new(vec![spectrum[0]], vec![]);
    }

    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut prod = 1.0;
        for (m, lam) in spectrum.iter().enumerate() {
            if m != i {
                prod *= spectrum[i] - lam;
            }
        }
        let cand = if i % 2 == 0 { 1.0 / prod } else { -1.0 / prod };
        if !(cand.is_finite() && cand > 0.0) {
            return Err(Error::Unrealizable(format!(
                "eigenvalue {} admits no positive end overlap (candidate {cand})",
                spectrum[i]
            )));
        }
        weights.push(cand);
    }
    let total: f64 = weights.iter().sum();
    let q: Vec<f64> = weights.iter().map(|w| (w / total).sqrt()).collect();

    let scale = spectrum.iter().fold(f64::MIN, |a, x| a.max(x.abs())).max(1.0);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut diagonal = Vec::with_capacity(n);
    let mut off_diagonal = Vec::with_capacity(n - 1);
    for j in 0..n {
        let v = basis[j].clone();
        let mut w: Vec<f64> = v.iter().zip(spectrum).map(|(x, lam)| x * lam).collect();
        let alpha = dot(&w, &v);
        diagonal.push(alpha);
        if j + 1 == n {
            break;
        }
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        if j > 0 {
            let beta_prev = off_diagonal[j - 1];
            for (wi, ui) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= beta_prev * ui;
            }
        }
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let beta = dot(&w, &w).sqrt();
        if beta <= 1e-10 * scale {
            return Err(Error::Unrealizable(format!(
                "recurrence broke down at step {} (residual {beta:.3e}); eigenvalues too close",
                j + 1
            )));
        }
        off_diagonal.push(beta);
        for wi in w.iter_mut() {
            *wi /= beta;
        }
        basis.push(w);
    }
    SingleExcitationOperator::new(diagonal, off_diagonal)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
