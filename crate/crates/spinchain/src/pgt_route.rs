//! Planning arbitrarily accurate end-to-end transfer across a weak central
//! junction.
//!
//! A quadratic-spectrum half chain (`constructions::hahn_chain`) is mirrored
//! around a central coupling `a`. The symmetric parity block keeps the bare
//! half-chain spectrum (perfect revivals at every multiple of pi); the
//! antisymmetric block's eigenvalues shift by `-2a * overlap_n` to first
//! order. Choosing `a` as an exact rational `X/(2k)` makes every first-order
//! phase `2 a k * overlap_n * pi` an odd multiple of pi at `t = k pi`, which
//! turns the revival into end-to-end transfer; the residual infidelity is
//! governed by the second-order term and scales as `(k a^2)^2`. This module
//! sizes `k` against a target infidelity, optionally truncates phase
//! alignment to the `M` heaviest modes for shorter times, evaluates plans
//! with exact dynamics, and generates the scaling datasets behind the two
//! summary figures.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::chain_model::{
    build_single_excitation_matrix, compose_mirror_chain, parity_reduce, ChainSpec, MirrorChain,
    Model, SingleExcitationOperator,
};
use crate::constructions::{hahn_chain, hahn_overlaps, lm_chain};
use crate::exact::{kummer_odd_check, minimal_phase_multiplier, rational_to_f64, retained_weight};
use crate::spectral::{
    eigendecompose, eigendecompose_centrosymmetric, fidelity_at_pi_multiple, fidelity_sweep,
};
use crate::{Error, Result};

/// Headroom applied when sizing `k` from the second-order error model, so
/// the predicted infidelity lands at `1/SAFETY_FACTOR^2` of the target.
pub const SAFETY_FACTOR: f64 = 1.25;

/// Scan window used by [`fig2_dataset`] callers by default: three revival
/// periods of the `pi/2`-revival half chain.
pub const DEFAULT_T_WINDOW: f64 = 3.0 * PI / 2.0;

/// Default bound on `k` above which [`evaluate_plan`] refuses to run.
///
/// Evaluation cost itself is flat (phases are reduced exactly), but each
/// eigenvalue carries an O(eps * norm) rounding uncertainty that the factor
/// `k * pi` amplifies; beyond roughly 10^12 the measured infidelity of a
/// 16-mode plan is dominated by that noise floor rather than by the plan.
pub fn default_k_ceiling() -> BigUint {
    BigUint::from(10u8).pow(12)
}

/// A transfer plan: run the mirrored quadratic chain of `2 * n_sites` spins
/// with central coupling `a` for time `t = k * pi`.
#[derive(Debug, Clone)]
pub struct PgtPlan {
    /// Half-chain length `N`.
    pub n_sites: usize,
    /// Target infidelity the plan was sized for.
    pub epsilon: f64,
    /// Central coupling, exact: `X/(2k)` where `X` keeps every retained
    /// first-order phase an odd multiple of pi.
    pub a: BigRational,
    /// Transfer time in units of pi.
    pub k: BigUint,
    /// Number of leading modes whose phases are aligned (`n_sites` when the
    /// full spectrum is used).
    pub m: usize,
    /// Fidelity predicted by the error model (truncation weight plus
    /// second-order term).
    pub predicted_fidelity: f64,
    /// Exact end-site weight of the discarded modes (zero for full plans).
    pub truncation_tail: BigRational,
    /// True when a truncated request fell back to the full spectrum.
    pub fallback: bool,
}

impl PgtPlan {
    /// Transfer time expressed in units of pi.
    pub fn t_over_pi(&self) -> &BigUint {
        &self.k
    }
}

fn validate_plan_inputs(n_sites: usize, epsilon: f64) -> Result<()> {
    if n_sites < 2 {
        return Err(Error::Validation("need at least two sites per half chain".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Validation(format!(
            "target infidelity must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

/// Exact central binomial `C(2N-2, N-1)` as a big rational helper.
fn central_binomial(n_sites: usize) -> BigUint {
    crate::exact::binomial(2 * n_sites as u64 - 2, n_sites as u64 - 1)
}

/// Ceil of `scale * big` where `scale` is a finite positive f64, computed
/// exactly through the rational value of the float.
fn ceil_scaled(scale: f64, big: &BigUint) -> BigUint {
    let s = BigRational::from_float(scale).expect("finite scale");
    let k = (s * BigRational::from_integer(BigInt::from(big.clone()))).ceil().to_integer();
    k.max(BigInt::one()).to_biguint().expect("positive by construction")
}

/// Plan a transfer aligning the phases of all `N` modes.
///
/// Requires every raw binomial difference `C(2N-2,N-n) - C(2N-2,N-n-1)` to
/// be odd (always true when `N` is a power of two); then `a = C/(2k)` with
/// `C = C(2N-2,N-1)` makes every first-order phase an odd multiple of pi,
/// and `k` is the smallest integer putting the modeled second-order
/// infidelity at `epsilon / SAFETY_FACTOR^2`.
pub fn plan_full_spectrum(n_sites: usize, epsilon: f64) -> Result<PgtPlan> {
    validate_plan_inputs(n_sites, epsilon)?;
    if !kummer_odd_check(n_sites, n_sites)? {
        return Err(Error::Infeasible(format!(
            "cannot align all {n_sites} modes: some binomial overlap difference is even \
             (guaranteed odd only when the half length is a power of two)"
        )));
    }
    let c_big = central_binomial(n_sites);
    let c2 = &c_big * &c_big;
    let coeff = second_order_coefficient(n_sites, n_sites)?;
    let k = ceil_scaled(SAFETY_FACTOR * (coeff / epsilon).sqrt() / 4.0, &c2);
    let a = BigRational::new(BigInt::from(c_big), BigInt::from(2u8) * BigInt::from(k.clone()));

    // k * a^2 = C^2 / (4k), evaluated exactly then rounded once.
    let ka2 = BigRational::new(BigInt::from(c2), BigInt::from(4u8) * BigInt::from(k.clone()));
    let x = rational_to_f64(&ka2);
    Ok(PgtPlan {
        n_sites,
        epsilon,
        a,
        k,
        m: n_sites,
        predicted_fidelity: 1.0 - coeff * x * x,
        truncation_tail: BigRational::zero(),
        fallback: false,
    })
}

/// Smallest `M` whose discarded end-site weight, doubled, stays under half
/// the infidelity budget: `4 * C(2N-2, N-M-1) / C(2N-2, N-1) < epsilon`,
/// compared in exact rational arithmetic.
pub fn truncation_order(n_sites: usize, epsilon: f64) -> Result<usize> {
    validate_plan_inputs(n_sites, epsilon)?;
    let eps = BigRational::from_float(epsilon).expect("validated finite");
    for m in 1..=n_sites {
        let tail = BigRational::one() - retained_weight(n_sites, m)?;
        if tail * BigRational::from_integer(BigInt::from(4u8)) < eps {
            return Ok(m);
        }
    }
    Ok(n_sites)
}

/// Plan a transfer aligning only the `M` heaviest modes, where `M` comes
/// from [`truncation_order`]. The multiplier `X = 2ak` is then the minimal
/// integer making the `M` retained phases odd
/// ([`crate::exact::minimal_phase_multiplier`]), usually far smaller than
/// the full-spectrum `C(2N-2, N-1)`; `k` is sized so the modeled
/// second-order infidelity fits in the remaining half budget. Falls back to
/// [`plan_full_spectrum`] (flagged) when no finite multiplier exists at the
/// selected `M`.
pub fn plan_truncated(n_sites: usize, epsilon: f64) -> Result<PgtPlan> {
    validate_plan_inputs(n_sites, epsilon)?;
    let m = truncation_order(n_sites, epsilon)?;
    let Some(multiplier) = minimal_phase_multiplier(n_sites, m)? else {
        let mut plan = plan_full_spectrum(n_sites, epsilon)?;
        plan.fallback = true;
        return Ok(plan);
    };
    let tail = BigRational::one() - retained_weight(n_sites, m)?;
    let coeff = second_order_coefficient(n_sites, m)?;
    let l2 = &multiplier * &multiplier;
    let k = ceil_scaled(SAFETY_FACTOR * (2.0 * coeff / epsilon).sqrt() / 4.0, &l2);
    let a = BigRational::new(
        BigInt::from(multiplier),
        BigInt::from(2u8) * BigInt::from(k.clone()),
    );
    let ka2 = BigRational::new(BigInt::from(l2), BigInt::from(4u8) * BigInt::from(k.clone()));
    let x = rational_to_f64(&ka2);
    let predicted = 1.0 - 2.0 * rational_to_f64(&tail) - coeff * x * x;
    Ok(PgtPlan {
        n_sites,
        epsilon,
        a,
        k,
        m,
        predicted_fidelity: predicted,
        truncation_tail: tail,
        fallback: false,
    })
}

/// Exact check of the plan's defining phase condition: `2ak * overlap_n` is
/// an odd integer for every retained mode `n <= M`.
pub fn plan_oddness_holds(plan: &PgtPlan) -> Result<bool> {
    let overlaps = hahn_overlaps(plan.n_sites)?;
    let two_k = BigRational::from_integer(BigInt::from(2u8) * BigInt::from(plan.k.clone()));
    let two_ak = &plan.a * two_k;
    for o in overlaps.iter().take(plan.m) {
        let x = &two_ak * o;
        if !x.is_integer() || x.numer().is_even() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Second-order error coefficient of the plan's fidelity model, summed over
/// the `m` retained modes of the `n_sites`-mode quadratic chain.
///
/// With `u_n = 4 pi overlap_n * sum_{j != n} overlap_j / (lambda_n -
/// lambda_j)` (the per-mode second-order phase slope against `k a^2`), the
/// modeled infidelity is `coeff * (k a^2)^2` where
/// `coeff = 1/2 sum o_n u_n^2 - 1/4 (sum o_n u_n)^2`.
fn second_order_coefficient(n_sites: usize, m: usize) -> Result<f64> {
    let overlaps: Vec<f64> = hahn_overlaps(n_sites)?.iter().map(rational_to_f64).collect();
    let lambdas: Vec<f64> = (1..=n_sites).map(|n| -((n * (n - 1)) as f64)).collect();
    let mut sum_ou2 = 0.0;
    let mut sum_ou = 0.0;
    for n in 0..m {
        let mut s = 0.0;
        for j in 0..n_sites {
            if j != n {
                s += overlaps[j] / (lambdas[n] - lambdas[j]);
            }
        }
        let u = 4.0 * PI * overlaps[n] * s;
        sum_ou2 += overlaps[n] * u * u;
        sum_ou += overlaps[n] * u;
    }
    Ok(0.5 * sum_ou2 - 0.25 * sum_ou * sum_ou)
}

/// Outcome of running a plan against exact dynamics.
#[derive(Debug, Clone, Copy)]
pub struct PlanEvaluation {
    /// `|<2N| exp(-i H k pi) |1>|^2` on the composed operator, phases
    /// reduced exactly.
    pub achieved_fidelity: f64,
    /// Largest `|mu_n - (lambda_n - 2a * overlap_n)|` over all modes, where
    /// `mu_n` / `lambda_n` are the antisymmetric / symmetric block
    /// eigenvalues.
    pub max_first_order_residual: f64,
    /// The residual above divided by `a^2`; an O(1) value confirms the
    /// first-order eigenvalue model with a second-order remainder.
    pub residual_over_a_squared: f64,
}

/// [`evaluate_plan_with_ceiling`] at the default `k` ceiling.
pub fn evaluate_plan(plan: &PgtPlan) -> Result<PlanEvaluation> {
    evaluate_plan_with_ceiling(plan, &default_k_ceiling())
}

/// Runs the plan's composed chain at `t = k pi` with exact phase reduction
/// and reports the achieved end-to-end fidelity plus a first-order check of
/// the antisymmetric-block eigenvalue shifts. Refuses plans whose `k`
/// exceeds `ceiling` (see [`default_k_ceiling`] for why the bound exists).
pub fn evaluate_plan_with_ceiling(plan: &PgtPlan, ceiling: &BigUint) -> Result<PlanEvaluation> {
    if &plan.k > ceiling {
        return Err(Error::Infeasible(format!(
            "plan needs t = {} pi, beyond the evaluation ceiling of {} pi; \
             pass a larger ceiling to force the run",
            plan.k, ceiling
        )));
    }
    let a = rational_to_f64(&plan.a);
    let half = hahn_chain(plan.n_sites)?;
    let mirror = MirrorChain::new(half, a, Model::Heisenberg)?;
    let h = compose_mirror_chain(&mirror);
    let es = eigendecompose_centrosymmetric(&h)?;
    let achieved = fidelity_at_pi_multiple(&es, 1, 2 * plan.n_sites, &plan.k)?;

    let (sym, anti) = parity_reduce(&h)?;
    let sym_es = eigendecompose(&sym);
    let anti_es = eigendecompose(&anti);
    let overlaps: Vec<f64> = hahn_overlaps(plan.n_sites)?.iter().map(rational_to_f64).collect();
    let mut max_residual = 0.0f64;
    for n in 0..plan.n_sites {
        let predicted = sym_es.eigenvalues[n] - 2.0 * a * overlaps[n];
        max_residual = max_residual.max((anti_es.eigenvalues[n] - predicted).abs());
    }
    Ok(PlanEvaluation {
        achieved_fidelity: achieved,
        max_first_order_residual: max_residual,
        residual_over_a_squared: if a > 0.0 { max_residual / (a * a) } else { 0.0 },
    })
}

/// One row of the multiplier-scaling dataset: half length `n = 2^r`, mode
/// count `m = ceil(sqrt(n))`, minimal odd multiplier `l`, and the fitted
/// axes `x = sqrt(n) ln n`, `y = ln l`.
#[derive(Debug, Clone)]
pub struct Fig1Row {
    pub n: usize,
    pub m: usize,
    pub l: BigUint,
    pub x: f64,
    pub y: f64,
}

/// Minimal phase multipliers for power-of-two half lengths at the
/// square-root mode count, with log axes for the linear fit.
pub fn fig1_dataset(r_values: &[u32]) -> Result<Vec<Fig1Row>> {
    let mut rows = Vec::with_capacity(r_values.len());
    for &r in r_values {
        if r < 1 {
            return Err(Error::Validation("exponents must be at least 1".into()));
        }
        if r > 16 {
            return Err(Error::Validation(format!(
                "exponent {r} gives a half length of 2^{r}; multipliers beyond 2^16 sites \
                 are out of supported range"
            )));
        }
        let n = 1usize << r;
        let m = (n as f64).sqrt().ceil() as usize;
        let l = minimal_phase_multiplier(n, m)?.ok_or_else(|| {
            Error::Infeasible(format!("no admissible multiplier for N = {n}, M = {m}"))
        })?;
        let x = (n as f64).sqrt() * (n as f64).ln();
        let y = ln_biguint(&l);
        rows.push(Fig1Row { n, m, l, x, y });
    }
    Ok(rows)
}

fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 53 {
        v.to_f64().expect("fits in f64 range").ln()
    } else {
        let shift = bits - 53;
        let top = (v >> shift).to_f64().expect("53-bit value");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Least-squares line through `(x, y)` points.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::Validation("need at least two points to fit a line".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Validation("x values are all identical".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept: my - slope * mx, r_squared })
}

/// One row of the junction-strength sweep: coupling `a`, the best
/// end-to-end fidelity over the scan window, and where it occurred.
#[derive(Debug, Clone, Copy)]
pub struct Fig2Row {
    pub a: f64,
    pub max_fidelity: f64,
    pub argmax_t: f64,
}

/// Thirteen logarithmically spaced junction couplings from `2N` to `20N` —
/// roughly one to ten times the half chain's spectral radius `2N - 2`.
pub fn default_a_grid(n_half: usize) -> Vec<f64> {
    let lo = (2 * n_half) as f64;
    let hi = (20 * n_half) as f64;
    let steps = 13;
    (0..steps).map(|i| lo * (hi / lo).powf(i as f64 / (steps - 1) as f64)).collect()
}

/// Sweeps the junction coupling of a mirrored `pi/2`-revival chain
/// ([`lm_chain`]) and records the best end-to-end fidelity over
/// `[0, t_window]` for each `a`. The scan grid keeps the fastest phase
/// advance near 0.1 rad per step (at least 4096 points).
pub fn fig2_dataset(n_half: usize, a_grid: &[f64], t_window: f64) -> Result<Vec<Fig2Row>> {
    if a_grid.is_empty() {
        return Err(Error::Validation("need at least one junction coupling".into()));
    }
    if !(t_window.is_finite() && t_window > 0.0) {
        return Err(Error::Validation(format!(
            "scan window must be positive and finite, got {t_window}"
        )));
    }
    if let Some(bad) = a_grid.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::Validation(format!(
            "junction couplings must be finite and non-negative, got {bad}"
        )));
    }
    let half = lm_chain(n_half)?;
    let mut rows = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        let mirror = MirrorChain::new(half.clone(), a, Model::Heisenberg)?;
        let es = eigendecompose_centrosymmetric(&compose_mirror_chain(&mirror))?;
        let spread = es.eigenvalues[0] - es.eigenvalues[es.dimension() - 1];
        let points = 4096usize.max((spread * t_window / (2.0 * PI) * 64.0).ceil() as usize);
        let sweep = fidelity_sweep(&es, 1, 2 * n_half, 0.0, t_window, points + 1)?;
        let mut best = (0.0f64, 0.0f64);
        for &(t, f) in &sweep {
            if f > best.1 {
                best = (t, f);
            }
        }
        rows.push(Fig2Row { a, max_fidelity: best.1, argmax_t: best.0 });
    }
    Ok(rows)
}

/// Strong-junction effective model of a mirrored half chain with a
/// Heisenberg junction: the antisymmetric parity block splits into one
/// detached site with effective field `d_N - 2a` plus the half chain with
/// its last row and column removed. Returns that trimmed operator and the
/// detached field; the true antisymmetric eigenvalues approach
/// `spec(trimmed) ∪ {detached}` at rate O(1/a).
pub fn large_a_effective_model(
    half: &ChainSpec,
    a: f64,
) -> Result<(SingleExcitationOperator, f64)> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::Validation(format!(
            "junction coupling must be finite and non-negative, got {a}"
        )));
    }
    let h = build_single_excitation_matrix(half);
    let n = h.dimension();
    if n < 2 {
        return Err(Error::Validation("half chain needs at least two sites".into()));
    }
    let trimmed = SingleExcitationOperator::new(
        h.diagonal[..n - 1].to_vec(),
        h.off_diagonal[..n - 2].to_vec(),
    )?;
    Ok((trimmed, h.diagonal[n - 1] - 2.0 * a))
}

/// Diagnostic relating the parity blocks' trace difference to candidate
/// revival phases.
#[derive(Debug, Clone)]
pub struct PhaseSumReport {
    /// `sum(anti) - sum(sym)`; equals `-2a` for a Heisenberg junction.
    pub trace_gap: f64,
    /// `(q, phi)` pairs with `phi = (gap * t1 - 2 pi q) / N` in `(-pi, pi]`:
    /// the relative phases compatible with the trace difference at time
    /// `t1`, one per winding number `q`.
    pub candidates: Vec<(i64, f64)>,
}

/// Enumerates the `(q, phi)` pairs consistent with the block trace
/// difference at time `t1`. Both spectra must come from the same
/// `parity_reduce` split (equal lengths).
pub fn phase_sum_rule_check(
    sym_spectrum: &[f64],
    anti_spectrum: &[f64],
    t1: f64,
) -> Result<PhaseSumReport> {
    let n = sym_spectrum.len();
    if n == 0 || anti_spectrum.len() != n {
        return Err(Error::Validation(format!(
            "spectra must be non-empty and equally long, got {n} and {}",
            anti_spectrum.len()
        )));
    }
    if !(t1.is_finite() && t1 > 0.0) {
        return Err(Error::Validation(format!("time must be positive and finite, got {t1}")));
    }
    if sym_spectrum.iter().chain(anti_spectrum).any(|x| !x.is_finite()) {
        return Err(Error::Validation("spectra must be finite".into()));
    }
    let trace_gap =
        anti_spectrum.iter().sum::<f64>() - sym_spectrum.iter().sum::<f64>();
    let g = trace_gap * t1;
    let tol = 1e-9 * (1.0 + g.abs());
    let q_lo = ((g - n as f64 * PI) / (2.0 * PI)).floor() as i64 - 1;
    let q_hi = ((g + n as f64 * PI) / (2.0 * PI)).ceil() as i64 + 1;
    let mut candidates = Vec::new();
    for q in q_lo..=q_hi {
        let raw = (g - 2.0 * PI * q as f64) / n as f64;
        if raw > PI + tol || raw <= -PI - tol {
            continue;
        }
        let phi = if raw <= -PI + tol { raw + 2.0 * PI } else { raw };
        candidates.push((q, phi));
    }
    Ok(PhaseSumReport { trace_gap, candidates })
}
