//! Realignment, partial transposition and SWAP operators for bipartite
//! states, plus the realigned moments built on them.
//!
//! Two routes to the realigned matrix are kept separate on purpose:
//! [`realign`] rearranges blocks directly and works for any m⊗n, while
//! [`realign_via_swap`] computes `(ρP)^{T_B} P` and only exists for d⊗d.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matsub::{rank_of, singular_values, ComplexMatrix, Spectrum};
use crate::states::{DensityMatrix, DimensionSignature};

/// Largest imaginary part tolerated in quantities that are real in exact
/// arithmetic.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl std::str::FromStr for Subsystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            other => Err(Error::Argument(format!("unknown subsystem label {other:?}"))),
        }
    }
}

/// Row-major flattening `(x₁₁ … x₁ₙ, x₂₁ … x₂ₙ, …)` as a 1×(rows·cols) matrix.
pub fn vec_row(x: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::new(1, x.rows() * x.cols(), x.entries().to_vec()).unwrap()
}

/// Transposes the indices of tensor factor `which` of a square matrix on
/// a space with local dimensions `factors`.
pub fn transpose_factor(mat: &ComplexMatrix, factors: &[usize], which: usize) -> Result<ComplexMatrix> {
    let total: usize = factors.iter().product();
    if mat.rows() != total || mat.cols() != total {
        return Err(Error::Shape(format!(
            "factors {factors:?} need a {total}x{total} matrix, got {}x{}",
            mat.rows(),
            mat.cols()
        )));
    }
    if which >= factors.len() {
        return Err(Error::Argument(format!("no tensor factor {which}")));
    }
    // Stride of the chosen factor in a flat index.
    let stride: usize = factors[which + 1..].iter().product();
    let d = factors[which];
    Ok(ComplexMatrix::from_fn(total, total, |r, c| {
        let dr = (r / stride) % d;
        let dc = (c / stride) % d;
        let r2 = r - dr * stride + dc * stride;
        let c2 = c - dc * stride + dr * stride;
        mat.get(r2, c2)
    }))
}

fn bipartite_dims(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.dims() {
        DimensionSignature::Bipartite { m, n } => Ok((m, n)),
        other => Err(Error::Signature(format!("expected a bipartite state, got {other}"))),
    }
}

fn square_dim(rho: &DensityMatrix, what: &str) -> Result<usize> {
    let (m, n) = bipartite_dims(rho)?;
    if m != n {
        return Err(Error::Unsupported(format!("{what} needs a d⊗d state, got {m}⊗{n}")));
    }
    Ok(m)
}

pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> Result<ComplexMatrix> {
    let (m, n) = bipartite_dims(rho)?;
    let which = match subsystem {
        Subsystem::A => 0,
        Subsystem::B => 1,
    };
    transpose_factor(rho.matrix(), &[m, n], which)
}

/// The m²×n² realigned matrix of an m⊗n state with its singular values.
#[derive(Debug, Clone)]
pub struct RealignedMatrix {
    source_dims: DimensionSignature,
    mat: ComplexMatrix,
    singulars: Spectrum,
}

impl RealignedMatrix {
    fn new(source_dims: DimensionSignature, mat: ComplexMatrix) -> Self {
        let singulars = singular_values(&mat);
        Self {
            source_dims,
            mat,
            singulars,
        }
    }

    pub fn source_dims(&self) -> DimensionSignature {
        self.source_dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Descending singular values.
    pub fn singulars(&self) -> &Spectrum {
        &self.singulars
    }

    pub fn trace_norm(&self) -> f64 {
        self.singulars.sum()
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        rank_of(&self.singulars, rel_tol)
    }
}

/// Block-vec realignment: row `(i, k)` of the result is the row-major
/// flattening of the n×n block `Z_ik`, so entry `((i,k),(j,l)) = ρ((i,j),(k,l))`.
pub fn realign(rho: &DensityMatrix) -> Result<RealignedMatrix> {
    let (m, n) = bipartite_dims(rho)?;
    let src = rho.matrix();
    let mut data = Vec::with_capacity(m * m * n * n);
    for i in 0..m {
        for k in 0..m {
            let block = ComplexMatrix::from_fn(n, n, |j, l| src.get(i * n + j, k * n + l));
            data.extend_from_slice(vec_row(&block).entries());
        }
    }
    Ok(RealignedMatrix::new(rho.dims(), ComplexMatrix::new(m * m, n * n, data)?))
}

/// SWAP operator `P = Σ |ij⟩⟨ji|` on d⊗d.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapOperator {
    d: usize,
    mat: ComplexMatrix,
}

impl SwapOperator {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

fn check_swap_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Dimension(format!("SWAP needs d >= 2, got {d}")));
    }
    Ok(())
}

pub fn swap_operator(d: usize) -> Result<SwapOperator> {
    check_swap_dim(d)?;
    let mat = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        if i == l && j == k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(SwapOperator { d, mat })
}

/// Partial transpose of the SWAP, `P^{T_B} = Σ |ii⟩⟨jj| = d |Φ⁺⟩⟨Φ⁺|`.
pub fn swap_pt(d: usize) -> Result<ComplexMatrix> {
    check_swap_dim(d)?;
    Ok(ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        if r / d == r % d && c / d == c % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `(ρP)^{T_B} P`, the permutation/partial-transpose route to the realigned
/// matrix of a d⊗d state.
pub fn realign_via_swap(rho: &DensityMatrix) -> Result<RealignedMatrix> {
    let d = square_dim(rho, "realign_via_swap")?;
    let p = swap_operator(d)?;
    let rho_p = rho.matrix().matmul(p.matrix())?;
    let pt = transpose_factor(&rho_p, &[d, d], 1)?;
    Ok(RealignedMatrix::new(rho.dims(), pt.matmul(p.matrix())?))
}

/// `t₁ = Tr[ρ P^{T_B}]`, which equals `Tr[ρ^R]`.
pub fn first_moment(rho: &DensityMatrix) -> Result<f64> {
    let d = square_dim(rho, "first_moment")?;
    let t = rho.matrix().matmul(&swap_pt(d)?)?.trace();
    if t.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::Numerical(format!(
            "Tr[ρ P^T_B] has imaginary part {:e}",
            t.im
        )));
    }
    Ok(t.re)
}

/// Realigned moments of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    /// `Tr ρ^R`; only defined for d⊗d states.
    pub t1: Option<f64>,
    /// `T_j = Tr[((ρ^R)†ρ^R)^j]` for j = 1..=K, stored at index j − 1.
    pub t: Vec<f64>,
    /// Numerical rank of ρ^R.
    pub k: usize,
    /// Product of the k retained squared singular values.
    pub d_k: f64,
    /// `D_k^{1/k}`, evaluated in log space.
    pub d_k_root: f64,
    /// Largest and smallest retained singular values.
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl MomentVector {
    /// `T_j` for 1-based j.
    pub fn t_k(&self, j: usize) -> f64 {
        self.t[j - 1]
    }
}

pub fn moments(rho: &DensityMatrix, order: usize, rel_tol: f64) -> Result<MomentVector> {
    if order == 0 {
        return Err(Error::Argument("moment order must be at least 1".into()));
    }
    let realigned = realign(rho)?;
    let t1 = match rho.dims().square_dim() {
        Some(_) => Some(first_moment(rho)?),
        None => None,
    };
    Ok(moments_from(&realigned, t1, order, rel_tol))
}

/// Moment vector from an already realigned matrix.
pub fn moments_from(realigned: &RealignedMatrix, t1: Option<f64>, order: usize, rel_tol: f64) -> MomentVector {
    let sv = realigned.singulars().values();
    let t = (1..=order as i32)
        .map(|j| sv.iter().map(|s| s.powi(2 * j)).sum())
        .collect();
    let k = realigned.rank(rel_tol);
    let retained = &sv[..k];
    let log_sum: f64 = retained.iter().map(|s| (s * s).ln()).sum();
    let (d_k, d_k_root) = if k == 0 { (0.0, 0.0) } else { (log_sum.exp(), (log_sum / k as f64).exp()) };
    MomentVector {
        t1,
        t,
        k,
        d_k,
        d_k_root,
        sigma_max: retained.first().copied().unwrap_or(0.0),
        sigma_min: retained.last().copied().unwrap_or(0.0),
    }
}

/// `((σ²_min)^{j−1} T₁, (σ²_max)^{j−1} T₁)`, the bracket on `T_j`.
pub fn moment_brackets(mv: &MomentVector, sig_min: f64, sig_max: f64, k_index: usize) -> Result<(f64, f64)> {
    if k_index == 0 {
        return Err(Error::Argument("k_index must be at least 1".into()));
    }
    if sig_min > sig_max {
        return Err(Error::Argument(format!(
            "sig_min {sig_min} exceeds sig_max {sig_max}"
        )));
    }
    let t1 = mv.t_k(1);
    let e = (k_index - 1) as i32;
    Ok(((sig_min * sig_min).powi(e) * t1, (sig_max * sig_max).powi(e) * t1))
}
