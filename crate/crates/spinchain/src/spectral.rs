//! Eigendecomposition of real symmetric tridiagonal operators and the
//! time-domain transfer/revival diagnostics built on top of it.
//!
//! The solver is the classic bisection + inverse-iteration pair: Sturm-count
//! bisection brackets each eigenvalue to full f64 accuracy, then a pivoted
//! tridiagonal solve refines the eigenvector, with reorthogonalization inside
//! clusters of close eigenvalues. Eigenvalues are reported in decreasing
//! order, matching the labeling conventions used throughout this crate.

use num_complex::Complex64;

use crate::chain_model::{parity_reduce, SingleExcitationOperator};
use crate::phase;
use crate::{Error, Result};
use num_bigint::BigUint;

/// Spectral data of a tridiagonal operator: `eigenvalues[n]` (decreasing)
/// with orthonormal `eigenvectors[n]`, sign-fixed so the first component of
/// significant magnitude is positive.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Transfer-at-revival summary: the fidelity and, when the return amplitude
/// is large enough for its argument to mean anything, the global phase.
#[derive(Debug, Clone, Copy)]
pub struct Revival {
    pub fidelity: f64,
    pub phase: Option<f64>,
}

/// Full eigendecomposition, eigenvalues decreasing.
pub fn eigendecompose(op: &SingleExcitationOperator) -> EigenSystem {
    let n = op.dimension();
    let d = &op.diagonal;
    let e = &op.off_diagonal;
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n);

    for block in split_blocks(d, e) {
        let bd = &d[block.clone()];
        let be = &e[block.start..block.end - 1];
        let vals = bisect_eigenvalues(bd, be);
        let vecs = eigenvectors_by_inverse_iteration(bd, be, &vals, block.start);
        for (v, vec) in vals.into_iter().zip(vecs) {
            let mut full = vec![0.0; n];
            full[block.start..block.end].copy_from_slice(&vec);
            pairs.push((v, full));
        }
    }

    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite eigenvalues"));
    let mut es = EigenSystem {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        eigenvectors: pairs.into_iter().map(|p| p.1).collect(),
    };
    for v in &mut es.eigenvectors {
        normalize_sign(v);
    }
    es
}

/// Eigendecomposition through the parity blocks of a centrosymmetric
/// operator. Each eigenvector is a lifted half-size parity eigenvector, so
/// the `(-1)^{n+1}` alternation of end products survives even when the two
/// parity spectra are separated by far less than f64 epsilon.
pub fn eigendecompose_centrosymmetric(op: &SingleExcitationOperator) -> Result<EigenSystem> {
    let (sym, anti) = parity_reduce(op)?;
    let es_s = eigendecompose(&sym);
    let es_a = eigendecompose(&anti);
    let half = sym.dimension();
    let n = op.dimension();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    let lift = |v: &[f64], sign: f64| -> Vec<f64> {
        let mut u = vec![0.0; n];
        for (i, &x) in v.iter().enumerate() {
            u[i] = x * inv_sqrt2;
            u[n - 1 - i] = sign * x * inv_sqrt2;
        }
        u
    };

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let (mut i, mut j) = (0usize, 0usize);
    while i < half || j < half {
        let take_sym = if i == half {
            false
        } else if j == half {
            true
        } else {
            es_s.eigenvalues[i] >= es_a.eigenvalues[j]
        };
        if take_sym {
            eigenvalues.push(es_s.eigenvalues[i]);
            eigenvectors.push(lift(&es_s.eigenvectors[i], 1.0));
            i += 1;
        } else {
            eigenvalues.push(es_a.eigenvalues[j]);
            eigenvectors.push(lift(&es_a.eigenvectors[j], -1.0));
            j += 1;
        }
    }
    for v in &mut eigenvectors {
        normalize_sign(v);
    }
    Ok(EigenSystem { eigenvalues, eigenvectors })
}

fn check_site(n: usize, site: usize) -> Result<usize> {
    if site == 0 || site > n {
        return Err(Error::Validation(format!(
            "site {site} out of range for a chain of {n} sites (sites are 1-based)"
        )));
    }
    Ok(site - 1)
}

/// `<to| exp(-i h t) |from>` with 1-based sites. Phases of magnitude beyond
/// the extended-reduction threshold are reduced in exact dyadic arithmetic.
pub fn transfer_amplitude(es: &EigenSystem, from: usize, to: usize, t: f64) -> Result<Complex64> {
    let a = check_site(es.dimension(), from)?;
    let b = check_site(es.dimension(), to)?;
    if !t.is_finite() {
        return Err(Error::Validation(format!("time must be finite, got {t}")));
    }
    let mut amp = Complex64::new(0.0, 0.0);
    for (lam, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
        amp += v[a] * v[b] * phase_factor(*lam, t);
    }
    Ok(amp)
}

/// `|<to| exp(-i h t) |from>|^2`.
pub fn transfer_fidelity(es: &EigenSystem, from: usize, to: usize, t: f64) -> Result<f64> {
    Ok(transfer_amplitude(es, from, to, t)?.norm_sqr())
}

/// Transfer fidelity at `t = k * pi` with `k` an arbitrary-precision
/// integer: each `lambda * k mod 2` is computed exactly, so `k` may be
/// astronomically large without any loss of phase accuracy.
pub fn fidelity_at_pi_multiple(es: &EigenSystem, from: usize, to: usize, k: &BigUint) -> Result<f64> {
    let a = check_site(es.dimension(), from)?;
    let b = check_site(es.dimension(), to)?;
    let mut amp = Complex64::new(0.0, 0.0);
    for (lam, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
        let theta = std::f64::consts::PI * phase::mod_two_at_integer_multiple(*lam, k);
        amp += v[a] * v[b] * Complex64::from_polar(1.0, -theta);
    }
    Ok(amp.norm_sqr())
}

/// Return amplitude diagnostics at one site: fidelity of `|site> -> |site>`
/// at time `t`, plus the global phase when the amplitude is non-negligible.
pub fn revival_fidelity(es: &EigenSystem, site: usize, t: f64) -> Result<Revival> {
    let s = check_site(es.dimension(), site)?;
    if !t.is_finite() {
        return Err(Error::Validation(format!("time must be finite, got {t}")));
    }
    let mut amp = Complex64::new(0.0, 0.0);
    for (lam, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
        amp += v[s] * v[s] * phase_factor(*lam, t);
    }
    let fidelity = amp.norm_sqr();
    let phase = if fidelity >= 1e-15 { Some(amp.arg()) } else { None };
    Ok(Revival { fidelity, phase })
}

/// First time in `[0, t_max]` at which the transfer fidelity reaches
/// `threshold`, refined by bisection from a uniform scan. The scan step must
/// advance the fastest phase by less than 0.1 rad, otherwise the grid could
/// step over a fidelity spike and the result would be unreliable.
pub fn earliest_time_to_fidelity(
    es: &EigenSystem,
    from: usize,
    to: usize,
    threshold: f64,
    t_max: f64,
    points: usize,
) -> Result<Option<f64>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Validation(format!("threshold must lie in (0, 1], got {threshold}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Validation(format!("t_max must be positive and finite, got {t_max}")));
    }
    if points < 2 {
        return Err(Error::Validation("need at least 2 scan points".into()));
    }
    let rate = es.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let dt = t_max / (points - 1) as f64;
    if rate * dt > 0.1 {
        return Err(Error::Validation(format!(
            "scan step {dt:.3e} advances the fastest phase by {:.3} rad; \
             increase points so the step stays below 0.1/|lambda|_max",
            rate * dt
        )));
    }

    let f = |t: f64| transfer_fidelity(es, from, to, t).expect("validated sites");
    let mut prev_t = 0.0;
    let mut prev_f = f(0.0);
    if prev_f >= threshold {
        return Ok(Some(0.0));
    }
    for i in 1..points {
        let t = i as f64 * dt;
        let ft = f(t);
        if ft >= threshold {
            // Bisect the upward crossing inside [prev_t, t].
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if f(mid) >= threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_t = t;
        prev_f = ft;
    }
    let _ = prev_f;
    Ok(None)
}

/// Uniform fidelity samples on `[t_start, t_end]`, endpoints included.
pub fn fidelity_sweep(
    es: &EigenSystem,
    from: usize,
    to: usize,
    t_start: f64,
    t_end: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(Error::Validation("need at least 2 sweep points".into()));
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
        return Err(Error::Validation(format!(
            "sweep window must be finite with t_end > t_start, got [{t_start}, {t_end}]"
        )));
    }
    let step = (t_end - t_start) / (points - 1) as f64;
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let t = if i + 1 == points { t_end } else { t_start + i as f64 * step };
        rows.push((t, transfer_fidelity(es, from, to, t)?));
    }
    Ok(rows)
}

/// Render sweep rows as `t,fidelity` CSV with shortest round-trip floats.
pub fn sweep_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("t,fidelity\n");
    for (t, f) in rows {
        out.push_str(&format!("{t},{f}\n"));
    }
    out
}

fn phase_factor(lambda: f64, t: f64) -> Complex64 {
    let prod = lambda * t;
    if prod.is_finite() && prod.abs() <= phase::EXTENDED_REDUCTION_THRESHOLD {
        Complex64::from_polar(1.0, -prod)
    } else {
        Complex64::from_polar(1.0, -phase::product_mod_two_pi(lambda, t))
    }
}

// ---------------------------------------------------------------------------
// Solver internals
// ---------------------------------------------------------------------------

/// Index ranges of the unreduced blocks: the matrix decouples wherever an
/// off-diagonal entry is negligible against its diagonal neighbors.
fn split_blocks(d: &[f64], e: &[f64]) -> Vec<std::ops::Range<usize>> {
    let n = d.len();
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..n.saturating_sub(1) {
        if e[i].abs() <= f64::EPSILON * (d[i].abs() + d[i + 1].abs()) {
            blocks.push(start..i + 1);
            start = i + 1;
        }
    }
    blocks.push(start..n);
    blocks
}

/// Number of eigenvalues strictly below `x` (Sturm count via the LDL^T
/// recurrence, with the standard tiny-pivot guard).
fn sturm_count(d: &[f64], e2: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0usize;
    let mut q = 1.0f64;
    for i in 0..d.len() {
        q = d[i] - x - if i > 0 { e2[i - 1] / q } else { 0.0 };
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of one unreduced block, decreasing, by bisection.
fn bisect_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![d[0]];
    }
    let e2: Vec<f64> = e.iter().map(|x| x * x).collect();
    let max_e2 = e2.iter().fold(0.0f64, |m, &x| m.max(x));
    let pivmin = f64::MIN_POSITIVE * max_e2.max(1.0);

    // Gershgorin bounds, slightly inflated.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < n - 1 { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    lo -= pad;
    hi += pad;

    // j-th smallest eigenvalue: bisect so that count(left) <= j < count(right).
    let mut vals = Vec::with_capacity(n);
    for j in 0..n {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            let tol = 2.0 * f64::EPSILON * a.abs().max(b.abs()) + 2.0 * pivmin;
            if b - a <= tol {
                break;
            }
            if sturm_count(d, &e2, mid, pivmin) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        vals.push(0.5 * (a + b));
    }
    vals.reverse(); // decreasing
    vals
}

/// Pivoted LU factorization of `T - lambda I` for a symmetric tridiagonal
/// `T`, retaining enough to solve quickly during inverse iteration.
struct TridiagLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagLu {
    fn factor(d: &[f64], e: &[f64], lambda: f64, pivmin: f64) -> TridiagLu {
        let n = d.len();
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swap = vec![false; n.saturating_sub(1)];

        // Running entries of the current row i at columns i, i+1, i+2.
        let mut bi = d[0] - lambda;
        let mut ci = if n > 1 { e[0] } else { 0.0 };
        let mut fi = 0.0;
        for i in 0..n.saturating_sub(1) {
            let ai = e[i];
            let bnext = d[i + 1] - lambda;
            let cnext = if i + 1 < n - 1 { e[i + 1] } else { 0.0 };
            if ai.abs() > bi.abs() {
                // Pivot on the subdiagonal row.
                swap[i] = true;
                let piv = guard_pivot(ai, pivmin);
                let m = bi / piv;
                u0[i] = piv;
                u1[i] = bnext;
                u2[i] = cnext;
                mult[i] = m;
                bi = ci - m * bnext;
                ci = fi - m * cnext;
            } else {
                let piv = guard_pivot(bi, pivmin);
                let m = ai / piv;
                u0[i] = piv;
                u1[i] = ci;
                u2[i] = fi;
                mult[i] = m;
                bi = bnext - m * ci;
                ci = cnext - m * fi;
            }
            fi = 0.0;
        }
        u0[n - 1] = guard_pivot(bi, pivmin);
        TridiagLu { u0, u1, u2, mult, swap }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.u0.len();
        let mut r = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                r.swap(i, i + 1);
            }
            r[i + 1] -= self.mult[i] * r[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = r[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
        x
    }
}

fn guard_pivot(p: f64, pivmin: f64) -> f64 {
    if p.abs() < pivmin {
        if p < 0.0 {
            -pivmin
        } else {
            pivmin
        }
    } else {
        p
    }
}

/// Eigenvectors by inverse iteration for eigenvalues given in decreasing
/// order, reorthogonalizing within clusters of nearly equal eigenvalues.
fn eigenvectors_by_inverse_iteration(
    d: &[f64],
    e: &[f64],
    vals: &[f64],
    block_offset: usize,
) -> Vec<Vec<f64>> {
    let n = d.len();
    if n == 1 {
        return vec![vec![1.0]];
    }
    let scale = {
        let mut m = 0.0f64;
        for i in 0..n {
            let r = d[i].abs()
                + if i > 0 { e[i - 1].abs() } else { 0.0 }
                + if i < n - 1 { e[i].abs() } else { 0.0 };
            m = m.max(r);
        }
        m.max(f64::MIN_POSITIVE)
    };
    // Pivot floor relative to the matrix scale: when the shift equals an
    // eigenvalue to the last bit the factorization's final pivot is exactly
    // zero, and a subnormal floor would overflow the solve.
    let pivmin = f64::EPSILON * scale;
    let ortol = 1e-3 * scale;

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut cluster_start = 0usize;
    for (idx, &lam) in vals.iter().enumerate() {
        if idx > 0 && (vals[idx - 1] - lam).abs() > ortol {
            cluster_start = idx;
        }
        let lu = TridiagLu::factor(d, e, lam, pivmin);
        let mut v = seeded_unit_vector(n, (block_offset as u64) << 32 | idx as u64);
        for _ in 0..5 {
            let mut y = lu.solve(&v);
            // Divide out the largest magnitude first so an amplification of
            // ~1/pivmin cannot overflow the squared norm.
            let peak = y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if peak == 0.0 || !peak.is_finite() {
                // Retry direction; extraordinarily unlikely with a random start.
                v = seeded_unit_vector(n, 0x9e3779b97f4a7c15 ^ idx as u64);
                continue;
            }
            for x in &mut y {
                *x /= peak;
            }
            orthogonalize(&mut y, &vectors[cluster_start..idx]);
            let norm = norm2(&y);
            if norm == 0.0 || !norm.is_finite() {
                v = seeded_unit_vector(n, 0x9e3779b97f4a7c15 ^ idx as u64);
                continue;
            }
            for x in &mut y {
                *x /= norm;
            }
            v = y;
        }
        orthogonalize(&mut v, &vectors[cluster_start..idx]);
        let norm = norm2(&v);
        for x in &mut v {
            *x /= norm;
        }
        vectors.push(v);
    }
    vectors
}

/// Two rounds of modified Gram-Schmidt against the given basis.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        if basis.is_empty() {
            break;
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Deterministic pseudo-random unit vector (xorshift64*).
fn seeded_unit_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed | 1;
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let bits = state.wrapping_mul(0x2545f4914f6cdd1d);
            // Uniform in [-1, 1).
            (bits >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect();
    let norm = norm2(&v);
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Flip the vector so its first component of significant magnitude is
/// positive (deterministic sign convention).
fn normalize_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    if let Some(i) = v.iter().position(|x| x.abs() > 1e-6 * max) {
        if v[i] < 0.0 {
            for y in v.iter_mut() {
                *y = -*y;
            }
        }
    }
}
