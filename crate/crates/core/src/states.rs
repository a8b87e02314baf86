//! Validated density matrices and the state families used throughout the
//! crate. Basis ordering is lexicographic: |00⟩, |01⟩, |10⟩, |11⟩ for two
//! qubits, |000⟩ … |111⟩ for three.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matsub::{hermitian_spectrum, kron, ComplexMatrix};

pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
/// Slack on closed parameter-interval boundaries.
pub const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DimensionSignature {
    Bipartite { m: usize, n: usize },
    /// Three qubits, 2⊗2⊗2.
    Tripartite,
}

impl DimensionSignature {
    pub fn bipartite(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::Dimension(format!(
                "bipartite factors must be at least 2, got {m}x{n}"
            )));
        }
        Ok(Self::Bipartite { m, n })
    }

    pub fn total(&self) -> usize {
        match *self {
            Self::Bipartite { m, n } => m * n,
            Self::Tripartite => 8,
        }
    }

    /// Local dimensions in tensor order.
    pub fn factors(&self) -> Vec<usize> {
        match *self {
            Self::Bipartite { m, n } => vec![m, n],
            Self::Tripartite => vec![2, 2, 2],
        }
    }

    /// `Some(d)` for a d⊗d signature.
    pub fn square_dim(&self) -> Option<usize> {
        match *self {
            Self::Bipartite { m, n } if m == n => Some(m),
            _ => None,
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            Self::Bipartite { m, n } => Self::bipartite(m, n).map(|_| ()),
            Self::Tripartite => Ok(()),
        }
    }
}

impl std::fmt::Display for DimensionSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Bipartite { m, n } => write!(f, "{m}x{n}"),
            Self::Tripartite => write!(f, "2x2x2"),
        }
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix with its
/// subsystem structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: DimensionSignature,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks shape, Hermiticity, trace and positivity, in that order.
    pub fn validate(mat: ComplexMatrix, dims: DimensionSignature) -> Result<Self> {
        dims.check()?;
        let total = dims.total();
        if mat.rows() != total || mat.cols() != total {
            return Err(Error::Shape(format!(
                "signature {dims} needs a {total}x{total} matrix, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        mat.require_hermitian()?;
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = hermitian_spectrum(&mat)?.min();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { dims, mat })
    }

    /// Normalized pure state `|ψ⟩⟨ψ|`.
    pub fn from_ket(dims: DimensionSignature, ket: &[Complex64]) -> Result<Self> {
        if ket.len() != dims.total() {
            return Err(Error::Shape(format!(
                "ket of length {} for signature {dims}",
                ket.len()
            )));
        }
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("ket has zero or non-finite norm".into()));
        }
        let psi: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
        Self::validate(ComplexMatrix::outer(&psi, &psi), dims)
    }

    pub fn dims(&self) -> DimensionSignature {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// |Φ⁺⟩ = Σ|ii⟩/√d in d⊗d.
pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    let dims = DimensionSignature::bipartite(d, d)?;
    let ket: Vec<Complex64> = (0..d * d)
        .map(|k| if k / d == k % d { real(1.0) } else { real(0.0) })
        .collect();
    DensityMatrix::from_ket(dims, &ket)
}

/// |ij⟩⟨ij| in d⊗d.
pub fn product_basis_state(i: usize, j: usize, d: usize) -> Result<DensityMatrix> {
    let dims = DimensionSignature::bipartite(d, d)?;
    if i >= d || j >= d {
        return Err(Error::Domain(format!("basis index ({i}, {j}) out of range for d = {d}")));
    }
    let mut ket = vec![real(0.0); d * d];
    ket[i * d + j] = real(1.0);
    DensityMatrix::from_ket(dims, &ket)
}

/// Computational basis projector on three qubits, `index` in 0..8.
pub fn tri_basis_state(index: usize) -> Result<DensityMatrix> {
    if index >= 8 {
        return Err(Error::Domain(format!("three-qubit basis index {index} out of range")));
    }
    let mut ket = vec![real(0.0); 8];
    ket[index] = real(1.0);
    DensityMatrix::from_ket(DimensionSignature::Tripartite, &ket)
}

pub fn max_mixed(dims: DimensionSignature) -> Result<DensityMatrix> {
    dims.check()?;
    let n = dims.total();
    DensityMatrix::validate(ComplexMatrix::identity(n).scale(1.0 / n as f64), dims)
}

/// `ρ_A ⊗ ρ_B` from two single-system density matrices.
pub fn product_state(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<DensityMatrix> {
    let dims = DimensionSignature::bipartite(rho_a.rows(), rho_b.rows())?;
    DensityMatrix::validate(kron(rho_a, rho_b)?, dims)
}

/// GHZ state (|000⟩ + |111⟩)/√2.
pub fn ghz() -> DensityMatrix {
    let mut ket = vec![real(0.0); 8];
    ket[0] = real(1.0);
    ket[7] = real(1.0);
    DensityMatrix::from_ket(DimensionSignature::Tripartite, &ket).expect("GHZ is a valid state")
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {eps}")));
    }
    if eps == 1.0 {
        return Err(Error::Domain("epsilon = 1 is excluded from the family".into()));
    }
    Ok(())
}

/// Unnormalized diagonal plus the |00⟩,|11⟩,|22⟩ all-ones block shared by
/// both ε-families.
fn epsilon_skeleton(eps: f64) -> [[f64; 9]; 9] {
    let e2 = eps * eps;
    let mut m = [[0.0; 9]; 9];
    for &a in &[0, 4, 8] {
        for &b in &[0, 4, 8] {
            m[a][b] = 1.0;
        }
    }
    // |01⟩ |02⟩ |10⟩ |12⟩ |20⟩ |21⟩
    let diag = [(1, 1.0 / e2), (2, e2), (3, e2), (5, 1.0 / e2), (6, 1.0 / e2), (7, e2)];
    for (k, v) in diag {
        m[k][k] = v;
    }
    m
}

fn epsilon_state(eps: f64, couplings: &[(usize, usize)]) -> Result<DensityMatrix> {
    check_epsilon(eps)?;
    let mut m = epsilon_skeleton(eps);
    for &(a, b) in couplings {
        m[a][b] = 1.0;
        m[b][a] = 1.0;
    }
    let norm = 3.0 * (1.0 + eps * eps + 1.0 / (eps * eps));
    let flat: Vec<f64> = m.iter().flatten().map(|x| x / norm).collect();
    let dims = DimensionSignature::bipartite(3, 3)?;
    DensityMatrix::validate(ComplexMatrix::from_real(9, 9, &flat)?, dims)
}

/// 3⊗3 PPT entangled family, normalized by N = 3(1 + ε² + ε⁻²), with the
/// single |01⟩↔|10⟩ coherence. Its realigned matrix has rank 8.
pub fn rho_epsilon(eps: f64) -> Result<DensityMatrix> {
    epsilon_state(eps, &[(1, 3)])
}

/// Variant of [`rho_epsilon`] with all three coherences |01⟩↔|10⟩,
/// |02⟩↔|20⟩ and |12⟩↔|21⟩. Each coupled pair collapses to rank one under
/// realignment, so the realigned rank drops to 6.
pub fn rho_epsilon_symmetric(eps: f64) -> Result<DensityMatrix> {
    epsilon_state(eps, &[(1, 3), (2, 6), (5, 7)])
}

/// Closed parameter interval on which [`rho_a`] is defined.
pub fn rho_a_domain() -> (f64, f64) {
    let r = 141f64.sqrt();
    ((25.0 - r) / 50.0, (25.0 + r) / 100.0)
}

/// 3⊗3 NPT family with −11/50 coherences between |00⟩,|22⟩ and |11⟩,|12⟩.
pub fn rho_a(a: f64) -> Result<DensityMatrix> {
    let (lo, hi) = rho_a_domain();
    if !a.is_finite() || a < lo - DOMAIN_SLACK || a > hi + DOMAIN_SLACK {
        return Err(Error::Domain(format!("a = {a} outside [{lo}, {hi}]")));
    }
    let c = -11.0 / 50.0;
    let mut m = [[0.0; 9]; 9];
    m[0][0] = (1.0 - a) / 2.0;
    m[0][8] = c;
    m[8][0] = c;
    m[4][4] = 0.5 - a;
    m[4][5] = c;
    m[5][4] = c;
    m[5][5] = a;
    m[8][8] = a / 2.0;
    let flat: Vec<f64> = m.iter().flatten().copied().collect();
    DensityMatrix::validate(
        ComplexMatrix::from_real(9, 9, &flat)?,
        DimensionSignature::bipartite(3, 3)?,
    )
}

/// Pauli matrices with σ_y = [[0, −i], [i, 0]].
pub fn pauli(which: char) -> ComplexMatrix {
    let z = real(0.0);
    let o = real(1.0);
    let i = Complex64::new(0.0, 1.0);
    let data = match which {
        'I' => vec![o, z, z, o],
        'X' => vec![z, o, o, z],
        'Y' => vec![z, -i, i, z],
        'Z' => vec![o, z, z, -o],
        other => panic!("unknown Pauli label {other:?}"),
    };
    ComplexMatrix::new(2, 2, data).unwrap()
}

/// Three-fold Pauli product from a label such as `"XYY"`.
pub fn pauli_string(label: &str) -> ComplexMatrix {
    let mut chars = label.chars();
    let first = pauli(chars.next().expect("empty Pauli label"));
    chars.fold(first, |acc, ch| kron(&acc, &pauli(ch)).unwrap())
}

/// Correlation coefficients (r₁ … r₇) of the three-qubit family.
pub fn tri_family_coefficients(p1: f64, p3: f64) -> Result<[f64; 7]> {
    let p2 = 1.0 - p1 - 3.0 * p3;
    for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
        if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&p) {
            return Err(Error::Domain(format!("{name} = {p} outside [0, 1]")));
        }
    }
    let r1 = p1 + p2 - p3;
    let r4 = p1 - p2 + 3.0 * p3;
    let r5 = -p1 + p2 + p3;
    Ok([r1, r1, r1, r4, r5, r5, r5])
}

/// Three-qubit family built from mutually unbiased bases, parameterized by
/// (p₁, p₃) with p₂ = 1 − p₁ − 3p₃.
pub fn tri_family(p1: f64, p3: f64) -> Result<DensityMatrix> {
    let r = tri_family_coefficients(p1, p3)?;
    let terms = ["ZZI", "ZIZ", "IZZ", "XXX", "XYY", "YXY", "YYX"];
    let mut acc = pauli_string("III");
    for (coef, label) in r.iter().zip(terms) {
        acc = acc.add(&pauli_string(label).scale(*coef))?;
    }
    DensityMatrix::validate(acc.scale(1.0 / 8.0), DimensionSignature::Tripartite)
}
