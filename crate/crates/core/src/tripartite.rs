//! Three-qubit realignment, the SPA-PT map and the cut-wise tests built
//! from them.
//!
//! The three-qubit realignment flattens 2×2 blocks column-major, unlike the
//! bipartite [`crate::bipartite::vec_row`]. Both conventions are kept
//! separate.

use num_complex::Complex64;
use serde::Serialize;

use crate::bipartite::transpose_factor;
use crate::error::{Error, Result};
use crate::matsub::{hermitian_spectrum, ComplexMatrix};
use crate::states::{DensityMatrix, DimensionSignature};

/// Slack applied to every cut inequality.
pub const CUT_SLACK: f64 = 1e-9;
/// Weight of the identity in the SPA-PT map, and the biseparability bound.
pub const SPA_IDENTITY_WEIGHT: f64 = 0.1;
/// Weight of the partially transposed state in the SPA-PT map.
pub const SPA_STATE_WEIGHT: f64 = 0.2;

const Q_PERMUTATION: [usize; 8] = [0, 2, 4, 6, 1, 3, 5, 7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Qubit {
    A,
    B,
    C,
}

impl Qubit {
    pub const ALL: [Qubit; 3] = [Qubit::A, Qubit::B, Qubit::C];

    pub fn index(self) -> usize {
        match self {
            Qubit::A => 0,
            Qubit::B => 1,
            Qubit::C => 2,
        }
    }

    /// Cut label, e.g. `A|BC`.
    pub fn cut_label(self) -> &'static str {
        match self {
            Qubit::A => "A|BC",
            Qubit::B => "B|AC",
            Qubit::C => "C|AB",
        }
    }
}

impl std::fmt::Display for Qubit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Qubit::A => "A",
            Qubit::B => "B",
            Qubit::C => "C",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Qubit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Qubit::A),
            "B" | "b" => Ok(Qubit::B),
            "C" | "c" => Ok(Qubit::C),
            other => Err(Error::Argument(format!("unknown qubit label {other:?}"))),
        }
    }
}

fn require_tripartite(rho: &DensityMatrix) -> Result<()> {
    match rho.dims() {
        DimensionSignature::Tripartite => Ok(()),
        other => Err(Error::Signature(format!("expected a three-qubit state, got {other}"))),
    }
}

/// Column-major flattening `(z₁₁, z₂₁, …, z₁₂, z₂₂, …)`.
pub fn vec_col(x: &ComplexMatrix) -> Vec<Complex64> {
    (0..x.cols())
        .flat_map(|j| (0..x.rows()).map(move |i| (i, j)))
        .map(|(i, j)| x.get(i, j))
        .collect()
}

fn block(mat: &ComplexMatrix, p: usize, q: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |a, b| mat.get(2 * p + a, 2 * q + b))
}

#[derive(Debug, Clone)]
pub struct TripartiteRealigned {
    mat: ComplexMatrix,
    gram: ComplexMatrix,
    gram_min_eig: f64,
}

impl TripartiteRealigned {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// `(ρ^R)† ρ^R`.
    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    pub fn gram_min_eig(&self) -> f64 {
        self.gram_min_eig
    }
}

/// Three-qubit realignment. Viewing ρ as a 4×4 grid of 2×2 blocks `X_pq`,
/// row `2p + c` is `[vec(X_{p,2c}), vec(X_{p,2c+1})]` with column-major vec.
pub fn realign3(rho: &DensityMatrix) -> Result<TripartiteRealigned> {
    require_tripartite(rho)?;
    let src = rho.matrix();
    let mut data = Vec::with_capacity(64);
    for p in 0..4 {
        for c in 0..2 {
            data.extend(vec_col(&block(src, p, 2 * c)));
            data.extend(vec_col(&block(src, p, 2 * c + 1)));
        }
    }
    let mat = ComplexMatrix::new(8, 8, data)?;
    let gram = mat.adjoint().matmul(&mat)?;
    let gram_min_eig = hermitian_spectrum(&gram)?.min();
    Ok(TripartiteRealigned {
        mat,
        gram,
        gram_min_eig,
    })
}

/// Permutation matrix with `Q[i, π(i)] = 1`, π = (1,3,5,7,2,4,6,8).
pub fn q_operator() -> ComplexMatrix {
    ComplexMatrix::from_fn(8, 8, |i, j| {
        if Q_PERMUTATION[i] == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Transposes every 2×2 block of an 8×8 matrix in place.
pub fn tau(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != 8 || x.cols() != 8 {
        return Err(Error::Shape(format!("tau needs 8x8, got {}x{}", x.rows(), x.cols())));
    }
    Ok(ComplexMatrix::from_fn(8, 8, |r, c| {
        let (p, a) = (r / 2, r % 2);
        let (q, b) = (c / 2, c % 2);
        x.get(2 * p + b, 2 * q + a)
    }))
}

/// `(ρQ)^τ` without any cross-check.
pub fn permute_then_tau(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_tripartite(rho)?;
    tau(&rho.matrix().matmul(&q_operator())?)
}

/// `(ρQ)^τ`, checked against [`realign3`] entrywise.
pub fn realign3_via_q(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let via_q = permute_then_tau(rho)?;
    let direct = realign3(rho)?;
    let diff = via_q.max_abs_diff(direct.matrix());
    if diff > 1e-12 {
        return Err(Error::Numerical(format!(
            "(ρQ)^τ differs from the block realignment by {diff:e}"
        )));
    }
    Ok(via_q)
}

/// Partial transpose on one qubit of a three-qubit state.
pub fn partial_transpose3(rho: &DensityMatrix, x: Qubit) -> Result<ComplexMatrix> {
    require_tripartite(rho)?;
    transpose_factor(rho.matrix(), &[2, 2, 2], x.index())
}

/// SPA-PT on qubit X: `I/10 + ρ^{T_X}/5`.
pub fn spa_pt(rho: &DensityMatrix, x: Qubit) -> Result<ComplexMatrix> {
    let pt = partial_transpose3(rho, x)?;
    ComplexMatrix::identity(8)
        .scale(SPA_IDENTITY_WEIGHT)
        .add(&pt.scale(SPA_STATE_WEIGHT))
}

/// One cut inequality `lhs ≥ rhs` that every state biseparable in that cut
/// satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutVerdict {
    pub cut: Qubit,
    pub lhs: f64,
    pub rhs: f64,
    pub biseparable_consistent: bool,
}

impl CutVerdict {
    fn new(cut: Qubit, lhs: f64, rhs: f64) -> Self {
        Self {
            cut,
            lhs,
            rhs,
            biseparable_consistent: lhs >= rhs - CUT_SLACK,
        }
    }

    /// `rhs − lhs`; positive when the inequality is violated.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn violated(&self) -> bool {
        !self.biseparable_consistent
    }
}

/// `λ_min(SPA-PT_X(ρ)) ≥ 1/10`.
pub fn biseparability_check(rho: &DensityMatrix, x: Qubit) -> Result<CutVerdict> {
    let lhs = hermitian_spectrum(&spa_pt(rho, x)?)?.min();
    Ok(CutVerdict::new(x, lhs, SPA_IDENTITY_WEIGHT))
}

/// `λ_min(G + SPA-PT_X(ρ)) ≥ λ_min(G) + 1/10` with `G = (ρ^R)†ρ^R`.
pub fn realignment_cut_check(rho: &DensityMatrix, x: Qubit) -> Result<CutVerdict> {
    let realigned = realign3(rho)?;
    realignment_cut_check_with(&realigned, rho, x)
}

/// Same as [`realignment_cut_check`] reusing a computed realignment.
pub fn realignment_cut_check_with(realigned: &TripartiteRealigned, rho: &DensityMatrix, x: Qubit) -> Result<CutVerdict> {
    let sum = realigned.gram().add(&spa_pt(rho, x)?)?;
    let lhs = hermitian_spectrum(&sum)?.min();
    Ok(CutVerdict::new(x, lhs, realigned.gram_min_eig() + SPA_IDENTITY_WEIGHT))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Violated in all three cuts.
    FullyEntangled,
    /// Violated in at least one cut.
    NotFullySeparable,
    /// No cut violated; the test is one-sided and says nothing.
    Inconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::FullyEntangled => "fully_entangled",
            Classification::NotFullySeparable => "not_fully_separable",
            Classification::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripartiteClassification {
    pub classification: Classification,
    pub cuts: [CutVerdict; 3],
}

pub fn classify(rho: &DensityMatrix) -> Result<TripartiteClassification> {
    let realigned = realign3(rho)?;
    let mut cuts = [CutVerdict::new(Qubit::A, 0.0, 0.0); 3];
    for (slot, x) in cuts.iter_mut().zip(Qubit::ALL) {
        *slot = realignment_cut_check_with(&realigned, rho, x)?;
    }
    let violated = cuts.iter().filter(|c| c.violated()).count();
    let classification = match violated {
        3 => Classification::FullyEntangled,
        0 => Classification::Inconclusive,
        _ => Classification::NotFullySeparable,
    };
    Ok(TripartiteClassification { classification, cuts })
}
