//! Chain descriptions and their single-excitation matrices.
//!
//! A chain of `N` spins with nearest-neighbor couplings `J_1..J_{N-1}` and
//! on-site fields `B_1..B_N` acts on the single-excitation subspace as a real
//! symmetric tridiagonal `N x N` matrix. Two coupling models are supported:
//!
//! * `Exchange` (XX-type): diagonal entry `n` is `B_n`, off-diagonal entry `n`
//!   is `J_n`. The hopping amplitude equals `J_n` itself; no factor-of-two
//!   convention is applied.
//! * `Heisenberg`: diagonal entry `n` is `B_n - J_{n-1} - J_n` (missing terms
//!   at the ends), off-diagonal entry `n` is `J_n`. Field-free Heisenberg
//!   matrices annihilate the uniform vector and are negative semidefinite.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coupling model selecting how fields and couplings enter the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Heisenberg,
    Exchange,
}

/// Validated description of an `N`-spin chain.
///
/// Invariants: `couplings.len() == N - 1` with every coupling strictly
/// positive and finite, `fields.len() == N`, `N >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChainSpec")]
pub struct ChainSpec {
    model: Model,
    couplings: Vec<f64>,
    fields: Vec<f64>,
}

/// Serde shadow of [`ChainSpec`] before validation; `fields` defaults to zeros.
#[derive(Deserialize)]
struct RawChainSpec {
    model: Model,
    couplings: Vec<f64>,
    #[serde(default)]
    fields: Option<Vec<f64>>,
}

impl TryFrom<RawChainSpec> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawChainSpec) -> Result<Self> {
        ChainSpec::new(raw.model, raw.couplings, raw.fields)
    }
}

impl ChainSpec {
    /// Builds a validated chain spec. `fields = None` means all-zero fields
    /// (field-free). Fails on empty chains, non-positive or non-finite
    /// couplings, or a field list whose length is not `couplings.len() + 1`.
    pub fn new(model: Model, couplings: Vec<f64>, fields: Option<Vec<f64>>) -> Result<Self> {
        let n = couplings.len() + 1;
        if let Some(bad) = couplings.iter().find(|j| !(j.is_finite() && **j > 0.0)) {
            return Err(Error::Validation(format!(
                "couplings must be strictly positive and finite, got {bad}"
            )));
        }
        let fields = fields.unwrap_or_else(|| vec![0.0; n]);
        if fields.len() != n {
            return Err(Error::Validation(format!(
                "expected {n} fields for {} couplings, got {}",
                n - 1,
                fields.len()
            )));
        }
        if let Some(bad) = fields.iter().find(|b| !b.is_finite()) {
            return Err(Error::Validation(format!("fields must be finite, got {bad}")));
        }
        Ok(ChainSpec { model, couplings, fields })
    }

    /// Field-free constructor: all on-site fields zero.
    pub fn field_free(model: Model, couplings: Vec<f64>) -> Result<Self> {
        ChainSpec::new(model, couplings, None)
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// Number of sites `N`.
    pub fn len(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false // N >= 1 by construction
    }

    pub fn is_field_free(&self) -> bool {
        self.fields.iter().all(|b| *b == 0.0)
    }
}

/// Real symmetric tridiagonal matrix acting on site amplitudes.
///
/// `off_diagonal.len() == diagonal.len() - 1`; entry `i` couples sites `i+1`
/// and `i+2` (1-based site labels).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleExcitationOperator {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

impl SingleExcitationOperator {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::Validation("operator must have at least one site".into()));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::Validation(format!(
                "off-diagonal length {} does not match dimension {}",
                off_diagonal.len(),
                diagonal.len()
            )));
        }
        Ok(SingleExcitationOperator { diagonal, off_diagonal })
    }

    /// Matrix dimension (number of sites).
    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    /// Tridiagonal matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        assert_eq!(v.len(), n, "vector length mismatch");
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diagonal[i] * v[i];
            if i > 0 {
                acc += self.off_diagonal[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off_diagonal[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Infinity norm, used to scale tolerances.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dimension();
        let mut best: f64 = 0.0;
        for i in 0..n {
            let mut row = self.diagonal[i].abs();
            if i > 0 {
                row += self.off_diagonal[i - 1].abs();
            }
            if i + 1 < n {
                row += self.off_diagonal[i].abs();
            }
            best = best.max(row);
        }
        best
    }

    /// True when diagonal and off-diagonal are palindromic within `tol`
    /// (the matrix commutes with the site-reversal operator).
    pub fn is_centrosymmetric(&self, tol: f64) -> bool {
        let d = &self.diagonal;
        let e = &self.off_diagonal;
        let dn = d.len();
        let pal_d = (0..dn / 2).all(|i| (d[i] - d[dn - 1 - i]).abs() <= tol);
        let en = e.len();
        let pal_e = (0..en / 2).all(|i| (e[i] - e[en - 1 - i]).abs() <= tol);
        pal_d && pal_e
    }

    /// True when the diagonal matches `-(J_{n-1} + J_n)` built from the
    /// off-diagonal within `tol`, i.e. the operator is a field-free
    /// Heisenberg chain in disguise.
    pub fn is_field_free_heisenberg(&self, tol: f64) -> bool {
        let n = self.dimension();
        if self.off_diagonal.iter().any(|j| *j <= 0.0) {
            return false;
        }
        (0..n).all(|i| {
            let mut expect = 0.0;
            if i > 0 {
                expect -= self.off_diagonal[i - 1];
            }
            if i + 1 < n {
                expect -= self.off_diagonal[i];
            }
            (self.diagonal[i] - expect).abs() <= tol
        })
    }
}

/// Builds the single-excitation matrix of a chain under its coupling model.
pub fn build_single_excitation_matrix(spec: &ChainSpec) -> SingleExcitationOperator {
    let n = spec.len();
    let j = spec.couplings();
    let b = spec.fields();
    let mut diagonal = Vec::with_capacity(n);
    for i in 0..n {
        let d = match spec.model() {
            Model::Exchange => b[i],
            Model::Heisenberg => {
                let left = if i > 0 { j[i - 1] } else { 0.0 };
                let right = if i + 1 < n { j[i] } else { 0.0 };
                b[i] - left - right
            }
        };
        diagonal.push(d);
    }
    SingleExcitationOperator { diagonal, off_diagonal: j.to_vec() }
}

/// A length-`2N` chain formed by a half chain, its mirror image, and a single
/// junction coupling `a` between the two central sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorChain {
    pub half: ChainSpec,
    pub central_coupling: f64,
    pub junction_model: Model,
}

impl MirrorChain {
    pub fn new(half: ChainSpec, central_coupling: f64, junction_model: Model) -> Result<Self> {
        if !(central_coupling.is_finite() && central_coupling >= 0.0) {
            return Err(Error::Validation(format!(
                "central coupling must be finite and non-negative, got {central_coupling}"
            )));
        }
        Ok(MirrorChain { half, central_coupling, junction_model })
    }
}

/// Composes the mirror chain into its `2N x 2N` single-excitation matrix.
///
/// The half-chain matrix is reflected onto sites `N+1..2N`; the junction
/// contributes off-diagonal `a` between sites `N` and `N+1`, and for a
/// Heisenberg junction additionally `-a` to both central diagonal entries.
/// The result is centrosymmetric by construction.
pub fn compose_mirror_chain(mirror: &MirrorChain) -> SingleExcitationOperator {
    let half = build_single_excitation_matrix(&mirror.half);
    let n = half.dimension();
    let a = mirror.central_coupling;

    let mut diagonal = Vec::with_capacity(2 * n);
    diagonal.extend_from_slice(&half.diagonal);
    diagonal.extend(half.diagonal.iter().rev());
    if mirror.junction_model == Model::Heisenberg {
        diagonal[n - 1] -= a;
        diagonal[n] -= a;
    }

    let mut off_diagonal = Vec::with_capacity(2 * n - 1);
    off_diagonal.extend_from_slice(&half.off_diagonal);
    off_diagonal.push(a);
    off_diagonal.extend(half.off_diagonal.iter().rev());

    SingleExcitationOperator { diagonal, off_diagonal }
}

/// Splits a centrosymmetric even-dimensional operator into its symmetric and
/// antisymmetric parity blocks (each `N x N` for a `2N`-site operator).
///
/// In the parity basis `(|n> +- |2N+1-n>)/sqrt(2)` the matrix block-
/// diagonalizes into two tridiagonal halves that differ only in the last
/// diagonal entry: `d_N + e_N` (symmetric) and `d_N - e_N` (antisymmetric),
/// where `e_N` is the central off-diagonal entry. The full spectrum is the
/// union of the two block spectra.
pub fn parity_reduce(
    op: &SingleExcitationOperator,
) -> Result<(SingleExcitationOperator, SingleExcitationOperator)> {
    let dim = op.dimension();
    if dim % 2 != 0 {
        return Err(Error::Validation(format!(
            "parity reduction needs an even dimension, got {dim}"
        )));
    }
    let tol = 1e-12 * op.norm_inf().max(1.0);
    if !op.is_centrosymmetric(tol) {
        return Err(Error::Validation("operator is not centrosymmetric".into()));
    }
    let n = dim / 2;
    let d = &op.diagonal[..n];
    let e = &op.off_diagonal[..n - 1];
    let center = op.off_diagonal[n - 1];

    let mut sym_d = d.to_vec();
    sym_d[n - 1] += center;
    let mut anti_d = d.to_vec();
    anti_d[n - 1] -= center;

    Ok((
        SingleExcitationOperator { diagonal: sym_d, off_diagonal: e.to_vec() },
        SingleExcitationOperator { diagonal: anti_d, off_diagonal: e.to_vec() },
    ))
}
