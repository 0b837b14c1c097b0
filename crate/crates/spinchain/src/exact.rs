//! Exact big-rational spectral identities.
//!
//! Everything here is integer or rational arithmetic with no rounding: end
//! overlaps of centrosymmetric chains from their spectra, 2-adic valuation
//! obstructions that rule perfect transfer out, closed-form overlap families
//! for the quadratic chain, and the odd-integer phase multipliers that the
//! transfer planner is built on.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Binomial coefficient `C(n, k)` (0 when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= BigUint::from(n - k + i);
        acc /= BigUint::from(i); // exact at every step
    }
    acc
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// Exact end-overlap table of a centrosymmetric chain with the given
/// integer spectrum: `overlaps[n] = |<lambda_n|1>|^2` as a rational, the
/// proportionality constant relating them to the alternating inverse gap
/// products, and whether the table is consistent with a field-free
/// Heisenberg chain (null top eigenvalue with end overlap exactly 1/N).
#[derive(Debug, Clone)]
pub struct ExactOverlapTable {
    pub spectrum: Vec<BigInt>,
    pub overlaps: Vec<BigRational>,
    pub normalizer: BigRational,
    pub field_free_heisenberg_compatible: bool,
}

/// Compute exact end overlaps from a spectrum of distinct integers in
/// decreasing order. The n-th overlap is proportional to
/// `(-1)^{n+1} / prod_{m != n}(lambda_n - lambda_m)`; for a decreasing
/// spectrum every such product is positive and they normalize to sum 1.
/// A misordered (but distinct) spectrum makes some product non-positive,
/// which is reported as unrealizable: no centrosymmetric chain lists its
/// eigenvalues that way.
pub fn exact_overlaps(spectrum: &[BigInt]) -> Result<ExactOverlapTable> {
    let n = spectrum.len();
    if n == 0 {
        return Err(Error::Validation("spectrum must be non-empty".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if spectrum[i] == spectrum[j] {
                return Err(Error::Validation(format!(
                    "duplicate eigenvalue {} at positions {i} and {j}",
                    spectrum[i]
                )));
            }
        }
    }

    let mut candidates = Vec::with_capacity(n);
    for i in 0..n {
        let mut prod = BigInt::one();
        for j in 0..n {
            if j != i {
                prod *= &spectrum[i] - &spectrum[j];
            }
        }
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let cand = BigRational::new(sign, prod);
        if !cand.is_positive() {
            return Err(Error::Unrealizable(format!(
                "alternating overlap candidate {i} is non-positive; \
                 spectrum not realizable as centrosymmetric chain in this order"
            )));
        }
        candidates.push(cand);
    }

    let total: BigRational = candidates.iter().cloned().sum();
    let overlaps: Vec<BigRational> = candidates.iter().map(|c| c / &total).collect();
    let parity = if n % 2 == 0 { -BigInt::one() } else { BigInt::one() };
    let normalizer = BigRational::from(parity) / &total;

    let uniform = BigRational::new(BigInt::one(), BigInt::from(n));
    let field_free_heisenberg_compatible = spectrum[0].is_zero() && overlaps[0] == uniform;

    Ok(ExactOverlapTable {
        spectrum: spectrum.to_vec(),
        overlaps,
        normalizer,
        field_free_heisenberg_compatible,
    })
}

/// 2-adic valuation of a nonzero rational: the exponent of 2 in its reduced
/// numerator minus the exponent in its reduced denominator.
pub fn two_adic_valuation(x: &BigRational) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::Validation("2-adic valuation of zero is undefined".into()));
    }
    let nu = |v: &BigUint| v.trailing_zeros().expect("nonzero") as i64;
    Ok(nu(x.numer().magnitude()) - nu(x.denom().magnitude()))
}

/// Outcome of an exact impossibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Impossible { reason: String },
    NotExcluded,
}

impl Verdict {
    pub fn is_impossible(&self) -> bool {
        matches!(self, Verdict::Impossible { .. })
    }
}

/// Result of the null-overlap perfect-transfer check.
#[derive(Debug, Clone)]
pub struct NoPstReport {
    pub verdict: Verdict,
    pub null_overlap: BigRational,
    pub required: BigRational,
}

/// Check whether a field-free Heisenberg chain could perform perfect
/// end-to-end transfer with this spectrum. The spectrum must be in transfer
/// normal form: decreasing, top eigenvalue 0, all consecutive gaps odd. The
/// null eigenvector of a field-free chain is uniform, so its end overlap
/// must be exactly 1/N; the exact overlap forced by the spectrum is compared
/// against that.
pub fn verify_no_pst(spectrum: &[BigInt]) -> Result<NoPstReport> {
    let n = spectrum.len();
    if n < 2 {
        return Err(Error::Validation("need at least two eigenvalues".into()));
    }
    if !spectrum[0].is_zero() {
        return Err(Error::Validation(format!(
            "top eigenvalue must be 0, got {}",
            spectrum[0]
        )));
    }
    for w in spectrum.windows(2) {
        let gap = &w[0] - &w[1];
        if !gap.is_positive() {
            return Err(Error::Validation("spectrum must be strictly decreasing".into()));
        }
        if gap.is_even() {
            return Err(Error::Validation(format!(
                "consecutive gap {gap} is even; transfer normal form needs odd gaps"
            )));
        }
    }

    let table = exact_overlaps(spectrum)?;
    let null_overlap = table.overlaps[0].clone();
    let required = BigRational::new(BigInt::one(), BigInt::from(n));
    let verdict = if null_overlap == required {
        Verdict::NotExcluded
    } else {
        Verdict::Impossible {
            reason: format!(
                "the null eigenvector's end overlap is {null_overlap}, but a field-free \
                 chain of {n} sites requires exactly {required}"
            ),
        }
    };
    Ok(NoPstReport { verdict, null_overlap, required })
}

/// Closed form for the null end overlap of the four-site spectrum
/// `(0, -(2a+1), -2b, -(2c+1))`: `-(2a+1-2b)(2c+1-2b) / (8b(a+c+1-b))`.
/// Requires `b >= a+1` and `c >= b` so the spectrum is strictly ordered.
pub fn n4_overlap_formula(a: u64, b: u64, c: u64) -> Result<BigRational> {
    if b < a + 1 || c < b {
        return Err(Error::Validation(format!(
            "parameters (a,b,c)=({a},{b},{c}) do not give a strictly decreasing spectrum"
        )));
    }
    let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
    let two = BigInt::from(2u8);
    let one = BigInt::one();
    let num = -((&two * &a + &one - &two * &b) * (&two * &c + &one - &two * &b));
    let den = BigInt::from(8u8) * &b * (&a + &c + &one - &b);
    if den.is_zero() {
        return Err(Error::Validation("degenerate parameters: zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

/// Summary of the exhaustive four-site impossibility sweep.
#[derive(Debug, Clone, Copy)]
pub struct N4ExhaustiveReport {
    pub cases: u64,
    pub all_differ_from_quarter: bool,
    pub formula_always_matches: bool,
}

/// Sweep every four-site spectrum `(0, -(2a+1), -2b, -(2c+1))` with
/// `a, b, c <= bound`, computing the exact null overlap two independent
/// ways and checking it never equals the 1/4 a field-free chain would need.
pub fn exhaustive_n4_no_pst(bound: u64) -> Result<N4ExhaustiveReport> {
    if bound < 2 {
        return Err(Error::Validation("bound must be at least 2".into()));
    }
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4u8));
    let mut cases = 0u64;
    let mut all_differ = true;
    let mut all_match = true;
    for a in 0..=bound {
        for b in a + 1..=bound {
            for c in b..=bound {
                let spectrum = [
                    BigInt::zero(),
                    -BigInt::from(2 * a + 1),
                    -BigInt::from(2 * b),
                    -BigInt::from(2 * c + 1),
                ];
                let direct = exact_overlaps(&spectrum)?.overlaps[0].clone();
                let formula = n4_overlap_formula(a, b, c)?;
                cases += 1;
                if direct == quarter {
                    all_differ = false;
                }
                if direct != formula {
                    all_match = false;
                }
            }
        }
    }
    Ok(N4ExhaustiveReport {
        cases,
        all_differ_from_quarter: all_differ,
        formula_always_matches: all_match,
    })
}

fn check_mode_range(n_sites: usize, mode: usize) -> Result<(u64, u64)> {
    if n_sites < 2 {
        return Err(Error::Validation("need at least two sites".into()));
    }
    if mode == 0 || mode > n_sites {
        return Err(Error::Validation(format!(
            "mode {mode} out of range 1..={n_sites}"
        )));
    }
    Ok((n_sites as u64, mode as u64))
}

/// Exact end overlap of the n-th mode of the quadratic-coupling chain, via
/// the binomial-difference form
/// `(C(2N-2, N-n) - C(2N-2, N-n-1)) / C(2N-2, N-1)`, cross-checked against
/// the equivalent factorial form `(2n-1)(N-1)!^2 / ((N+n-1)!(N-n)!)`.
pub fn binomial_overlap(n_sites: usize, mode: usize) -> Result<BigRational> {
    let value = binomial_overlap_binomial_form(n_sites, mode)?;
    let cross = binomial_overlap_factorial_form(n_sites, mode)?;
    assert_eq!(value, cross, "the two closed forms must agree exactly");
    Ok(value)
}

/// Binomial-difference form of the quadratic chain's end overlaps.
pub fn binomial_overlap_binomial_form(n_sites: usize, mode: usize) -> Result<BigRational> {
    let (n, k) = check_mode_range(n_sites, mode)?;
    let hi = binomial(2 * n - 2, n - k);
    let lo = if n >= k + 1 { binomial(2 * n - 2, n - k - 1) } else { BigUint::zero() };
    let num = BigInt::from(hi) - BigInt::from(lo);
    let den = BigInt::from(binomial(2 * n - 2, n - 1));
    Ok(BigRational::new(num, den))
}

/// Factorial form of the quadratic chain's end overlaps.
pub fn binomial_overlap_factorial_form(n_sites: usize, mode: usize) -> Result<BigRational> {
    let (n, k) = check_mode_range(n_sites, mode)?;
    let fnm1 = factorial(n - 1);
    let num = BigUint::from(2 * k - 1) * &fnm1 * &fnm1;
    let den = factorial(n + k - 1) * factorial(n - k);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// True iff every binomial difference `C(2N-2,N-n) - C(2N-2,N-n-1)` for
/// `n = 1..M` is odd, evaluated directly in big-integer arithmetic. This is
/// the integrality-and-oddness gate for phase-aligned transfer plans.
pub fn kummer_odd_check(n_sites: usize, m: usize) -> Result<bool> {
    let (n, m) = check_mode_range(n_sites, m)?;
    for k in 1..=m {
        let hi = binomial(2 * n - 2, n - k);
        let lo = if n >= k + 1 { binomial(2 * n - 2, n - k - 1) } else { BigUint::zero() };
        if (hi - lo).is_even() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Total weight of the `m` largest-overlap modes,
/// `1 - C(2N-2, N-m-1)/C(2N-2, N-1)` (exact telescoping identity).
pub fn retained_weight(n_sites: usize, m: usize) -> Result<BigRational> {
    let (n, m) = check_mode_range(n_sites, m)?;
    let tail = if n >= m + 1 { binomial(2 * n - 2, n - m - 1) } else { BigUint::zero() };
    let den = binomial(2 * n - 2, n - 1);
    Ok(BigRational::one() - BigRational::new(BigInt::from(tail), BigInt::from(den)))
}

fn nu2_big(v: &BigUint) -> i64 {
    v.trailing_zeros().expect("nonzero") as i64
}

/// Smallest positive integer `L` such that `L * w_n` is an odd integer for
/// every retained overlap `w_n` (n = 1..m) of the quadratic chain, or `None`
/// when no such integer exists. Exists iff `nu2(denominator) -
/// nu2(numerator)` is the same non-negative value `s` for all retained
/// modes; then `L = 2^s * lcm(odd parts of the denominators)`.
pub fn minimal_phase_multiplier(n_sites: usize, m: usize) -> Result<Option<BigUint>> {
    check_mode_range(n_sites, m)?;
    let mut shared_s: Option<i64> = None;
    let mut lcm_odd = BigUint::one();
    for k in 1..=m {
        let w = binomial_overlap_binomial_form(n_sites, k)?;
        let p = w.numer().magnitude();
        let q = w.denom().magnitude();
        let s = nu2_big(q) - nu2_big(p);
        match shared_s {
            None => shared_s = Some(s),
            Some(prev) if prev != s => return Ok(None),
            _ => {}
        }
        let odd_q = q >> (nu2_big(q) as u64);
        lcm_odd = lcm_odd.lcm(&odd_q);
    }
    let s = shared_s.expect("m >= 1");
    if s < 0 {
        return Ok(None);
    }
    Ok(Some(lcm_odd << (s as u64)))
}

/// Large-junction impossibility report: with all symmetric-block
/// eigenvalues even and all antisymmetric ones odd, the end overlap's
/// denominator picks up at least `N-1` powers of two, while `1/N` only has
/// `nu2(N)` of them.
#[derive(Debug, Clone)]
pub struct LargeANoGoReport {
    pub verdict: Verdict,
    pub overlap_valuation_bound: i64,
    pub required_valuation: i64,
}

/// Decide whether an N-site chain can satisfy the even/odd parity-split
/// spectrum transfer condition: the product of N-1 odd integers over N-1
/// even integers has 2-adic valuation at most -(N-1), but matching the
/// uniform end overlap 1/N needs valuation exactly -nu2(N). Only N = 2
/// survives.
pub fn large_a_no_go(n_sites: u64) -> Result<LargeANoGoReport> {
    if n_sites < 2 {
        return Err(Error::Validation("need at least two sites".into()));
    }
    let bound = -((n_sites - 1) as i64);
    let required = -(n_sites.trailing_zeros() as i64);
    let verdict = if bound < required {
        Verdict::Impossible {
            reason: format!(
                "the end overlap's 2-adic valuation is at most {bound}, \
                 but equaling 1/{n_sites} requires valuation {required}"
            ),
        }
    } else {
        Verdict::NotExcluded
    };
    Ok(LargeANoGoReport {
        verdict,
        overlap_valuation_bound: bound,
        required_valuation: required,
    })
}

/// Convenience: parse a decimal string into a big integer (for CLI use).
pub fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| Error::Validation(format!("invalid integer {s:?}: {e}")))
}

/// Render a rational as `p/q` (or plain `p` when integral).
pub fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Best-effort f64 value of a rational (for reporting only).
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a shifted quotient when numerator/denominator both
        // overflow f64 range.
        let scale = 1u64 << 60;
        let scaled = (x.numer() * BigInt::from(scale)) / x.denom();
        scaled.to_f64().unwrap_or(f64::NAN) / scale as f64
    })
}
