//! Transfer criteria: spectral gap conditions for perfect transfer and
//! revival, an exact lattice certificate for pretty good transfer with
//! integer spectra, and the big-integer feasibility inequality for linear
//! spectra.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::chain_model::SingleExcitationOperator;
use crate::{Error, Result};

/// True iff the operator is mirror-symmetric within `tol` (a necessary
/// condition for perfect end-to-end transfer).
pub fn check_centrosymmetry(op: &SingleExcitationOperator, tol: f64) -> bool {
    op.is_centrosymmetric(tol)
}

/// True iff every consecutive gap of the strictly decreasing spectrum,
/// times `t0/pi`, is an odd positive integer within `tol`.
pub fn check_pst_spectrum(spectrum: &[f64], t0: f64, tol: f64) -> bool {
    gaps_are_integers(spectrum, t0, tol, Parity::Odd)
}

/// True iff every consecutive gap times `t_r/pi` is an even positive
/// integer within `tol` (the perfect-revival condition).
pub fn check_revival_spectrum(spectrum: &[f64], t_r: f64, tol: f64) -> bool {
    gaps_are_integers(spectrum, t_r, tol, Parity::Even)
}

enum Parity {
    Odd,
    Even,
}

fn gaps_are_integers(spectrum: &[f64], t: f64, tol: f64, parity: Parity) -> bool {
    if !(t.is_finite() && t > 0.0) || spectrum.iter().any(|x| !x.is_finite()) {
        return false;
    }
    for w in spectrum.windows(2) {
        let gap = w[0] - w[1];
        if gap <= 0.0 {
            return false;
        }
        let x = gap * t / std::f64::consts::PI;
        let nearest = match parity {
            Parity::Odd => 2.0 * ((x - 1.0) / 2.0).round() + 1.0,
            Parity::Even => 2.0 * (x / 2.0).round(),
        };
        let floor = match parity {
            Parity::Odd => 1.0,
            Parity::Even => 2.0,
        };
        if nearest < floor || (x - nearest).abs() > tol {
            return false;
        }
    }
    true
}

/// Exact certificate for the pretty-good-transfer lattice condition on an
/// integer spectrum. `holds` means no integer vector `l` exists with
/// `sum l_i lambda_i = 0`, `sum l_i = 0`, and the sum of entries at even
/// (1-based) positions odd; `witness` carries such a vector when one does.
#[derive(Debug, Clone)]
pub struct PgstCertificate {
    pub holds: bool,
    pub witness: Option<Vec<BigInt>>,
    pub sign_pattern: Vec<i8>,
}

/// Decide pretty good transfer for a strictly decreasing integer spectrum.
/// A basis of the lattice `{l : sum l_i lambda_i = 0, sum l_i = 0}` is
/// computed by exact unimodular column elimination; the obstruction
/// functional `l -> sum of l at even positions (mod 2)` is linear over
/// GF(2), so checking it on basis vectors decides the whole lattice.
pub fn pgst_certificate(spectrum: &[BigInt]) -> Result<PgstCertificate> {
    let n = spectrum.len();
    if n == 0 {
        return Err(Error::Validation("spectrum must be non-empty".into()));
    }
    for w in spectrum.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::Validation(
                "spectrum must be strictly decreasing (duplicates included)".into(),
            ));
        }
    }
    let sign_pattern: Vec<i8> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    if n == 1 {
        return Ok(PgstCertificate { holds: true, witness: None, sign_pattern });
    }

    let rows = vec![spectrum.to_vec(), vec![BigInt::one(); n]];
    let basis = integer_kernel(rows);

    let mut witness = None;
    for b in &basis {
        if even_position_sum_is_odd(b) {
            witness = Some(b.clone());
            break;
        }
    }
    // The functional is GF(2)-linear, but if two even-parity basis vectors
    // summed to an odd one that would contradict linearity; still, guard the
    // reasoning with a direct check in debug builds.
    debug_assert!(basis.iter().all(|b| {
        let dot: BigInt = b.iter().zip(spectrum).map(|(l, s)| l * s).sum();
        let tot: BigInt = b.iter().sum();
        dot.is_zero() && tot.is_zero()
    }));

    Ok(PgstCertificate { holds: witness.is_none(), witness, sign_pattern })
}

/// Exact check that `l` violates pretty good transfer for `spectrum`:
/// orthogonal to the spectrum and to the all-ones vector, with odd sum over
/// even (1-based) positions.
pub fn verify_pgst_witness(spectrum: &[BigInt], l: &[BigInt]) -> bool {
    if l.len() != spectrum.len() {
        return false;
    }
    let dot: BigInt = l.iter().zip(spectrum).map(|(a, b)| a * b).sum();
    let total: BigInt = l.iter().sum();
    dot.is_zero() && total.is_zero() && even_position_sum_is_odd(l)
}

fn even_position_sum_is_odd(l: &[BigInt]) -> bool {
    let s: BigInt = l.iter().skip(1).step_by(2).sum();
    s.is_odd()
}

/// Verdict of the exact linear-spectrum counting inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

/// Exact big-integer test of whether a field-free chain of `n` sites can
/// carry a linear (equally spaced) spectrum: requires `N^N >= 4^{N-1}(N-1)!`
/// — true only for N = 2.
pub fn linear_spectrum_feasibility(n: u64) -> Result<Feasibility> {
    if n < 2 {
        return Err(Error::Validation("need at least two sites".into()));
    }
    let lhs = BigUint::from(n).pow(n as u32);
    let rhs = BigUint::from(4u8).pow(n as u32 - 1) * crate::exact::factorial(n - 1);
    Ok(if lhs >= rhs { Feasibility::Feasible } else { Feasibility::Infeasible })
}

/// Basis of the integer kernel of a small row-major matrix, via unimodular
/// column operations (Euclidean elimination with a tracked transform).
fn integer_kernel(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let nrows = rows.len();
    let ncols = rows[0].len();
    let mut a = rows;
    let mut u: Vec<Vec<BigInt>> = (0..ncols)
        .map(|j| (0..ncols).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let mut pivot = 0usize;
    for r in 0..nrows {
        if pivot >= ncols {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in pivot..ncols {
                if !a[r][j].is_zero()
                    && best.is_none_or(|b| a[r][j].magnitude() < a[r][b].magnitude())
                {
                    best = Some(j);
                }
            }
            let Some(jb) = best else { break };
            if jb != pivot {
                for row in a.iter_mut() {
                    row.swap(pivot, jb);
                }
                u.swap(pivot, jb);
            }
            let mut finished = true;
            for j in pivot + 1..ncols {
                if a[r][j].is_zero() {
                    continue;
                }
                let q = rounded_div(&a[r][j], &a[r][pivot]);
                if !q.is_zero() {
                    for row in a.iter_mut() {
                        let t = &row[pivot] * &q;
                        row[j] -= t;
                    }
                    let upiv = u[pivot].clone();
                    for (x, y) in u[j].iter_mut().zip(&upiv) {
                        *x -= &q * y;
                    }
                }
                if !a[r][j].is_zero() {
                    finished = false;
                }
            }
            if finished {
                pivot += 1;
                break;
            }
        }
    }
    (pivot..ncols).map(|j| u[j].clone()).collect()
}

fn rounded_div(num: &BigInt, den: &BigInt) -> BigInt {
    let q = num.div_floor(den);
    let r = num - &q * den;
    if (r.magnitude() << 1u8) > *den.magnitude() {
        q + BigInt::one()
    } else {
        q
    }
}
