//! Dense complex matrices and the handful of spectral quantities the
//! criteria need: Hermitian eigenvalues, singular values, the trace and
//! Frobenius norms, and a thresholded numerical rank.
//!
//! Storage is row-major. Spectral work is delegated to `nalgebra`; every norm
//! is computed from the singular values so there is a single numerical path.

use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance, scaled by `max(1, max |entry|)`.
pub const HERMITIAN_REL_TOL: f64 = 1e-10;

/// Default relative threshold for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Fails if the length is wrong or
    /// an entry is NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} has no entries")));
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Dimension(format!("{rows}x{cols} overflows usize")))?;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "{rows}x{cols} needs {expected} entries, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Panics if `f` produces a non-finite value; intended for internal
    /// construction from values that are already known to be finite.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &mut out[i * other.cols..(i + 1) * other.cols];
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot += a * other.get(k, j);
                }
            }
        }
        Self::new(self.rows, other.cols, out)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a_ij - b_ij|`. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - conj(a_ji)|`; requires a square matrix.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        self.require_square("hermitian_deviation")?;
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        Ok(dev)
    }

    pub fn hermitian_tolerance(&self) -> f64 {
        HERMITIAN_REL_TOL * self.max_abs_entry().max(1.0)
    }

    pub(crate) fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation()?;
        let tolerance = self.hermitian_tolerance();
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        Ok(())
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Eigenvalues, ascending.
    Eigen,
    /// Singular values, descending.
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    kind: SpectrumKind,
}

impl Spectrum {
    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        match self.kind {
            SpectrumKind::Eigen => self.values[0],
            SpectrumKind::Singular => self.values[self.values.len() - 1],
        }
    }

    pub fn max(&self) -> f64 {
        match self.kind {
            SpectrumKind::Eigen => self.values[self.values.len() - 1],
            SpectrumKind::Singular => self.values[0],
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Kronecker product; block `(i, j)` of the result is `a[i, j] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let overflow = || Error::Dimension("Kronecker product dimension overflows usize".into());
    let rows = a.rows.checked_mul(b.rows).ok_or_else(overflow)?;
    let cols = a.cols.checked_mul(b.cols).ok_or_else(overflow)?;
    rows.checked_mul(cols).ok_or_else(overflow)?;
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a.get(i / b.rows, j / b.cols) * b.get(i % b.rows, j % b.cols)
    }))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_spectrum(a: &ComplexMatrix) -> Result<Spectrum> {
    a.require_square("hermitian_spectrum")?;
    a.require_hermitian()?;
    // The solver reads one triangle; symmetrize so both halves contribute.
    let m = a.to_nalgebra();
    let sym = (&m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(Spectrum {
        values,
        kind: SpectrumKind::Eigen,
    })
}

/// Descending singular values, `min(rows, cols)` of them.
pub fn singular_values(a: &ComplexMatrix) -> Spectrum {
    let mut values: Vec<f64> = a
        .to_nalgebra()
        .singular_values()
        .iter()
        .map(|&s| s.max(0.0))
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Spectrum {
        values,
        kind: SpectrumKind::Singular,
    }
}

pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).sum()
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).values().iter().map(|s| s * s).sum::<f64>().sqrt()
}

/// Number of singular values above `rel_tol * σ_max`.
pub fn numerical_rank(a: &ComplexMatrix, rel_tol: f64) -> usize {
    rank_of(&singular_values(a), rel_tol)
}

/// Same as [`numerical_rank`] for an already computed singular spectrum.
pub fn rank_of(singulars: &Spectrum, rel_tol: f64) -> usize {
    assert!(rel_tol > 0.0, "rank tolerance must be positive, got {rel_tol}");
    assert_eq!(singulars.kind(), SpectrumKind::Singular);
    let top = singulars.max();
    if top == 0.0 {
        return 0;
    }
    singulars.values().iter().filter(|&&s| s > rel_tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn swap2() -> ComplexMatrix {
        ComplexMatrix::from_real(
            4,
            4,
            &[
                1., 0., 0., 0., //
                0., 0., 1., 0., //
                0., 1., 0., 0., //
                0., 0., 0., 1.,
            ],
        )
        .unwrap()
    }

    fn bell_realigned() -> ComplexMatrix {
        ComplexMatrix::identity(4).scale(0.5)
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(1., 0.); 3]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![c(1., 0.), c(f64::NAN, 0.)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn kron_identity_and_scalar() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));

        let m = ComplexMatrix::new(2, 2, vec![c(1., 2.), c(0., -1.), c(3., 0.), c(0.5, 0.5)]).unwrap();
        let s = ComplexMatrix::new(1, 1, vec![c(2., 0.)]).unwrap();
        assert_eq!(kron(&s, &m).unwrap(), m.scale(2.0));
    }

    #[test]
    fn kron_of_pauli_x_is_antidiagonal() {
        let x = ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap();
        let xx = kron(&x, &x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx.get(i, j), c(expected, 0.0));
            }
        }
    }

    #[test]
    fn kron_block_structure() {
        let a = ComplexMatrix::new(2, 3, (0..6).map(|k| c(k as f64, 1.0)).collect()).unwrap();
        let b = ComplexMatrix::new(3, 2, (0..6).map(|k| c(0.0, k as f64)).collect()).unwrap();
        let ab = kron(&a, &b).unwrap();
        assert_eq!((ab.rows(), ab.cols()), (6, 6));
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..2 {
                        assert_eq!(ab.get(i * 3 + p, j * 2 + q), a.get(i, j) * b.get(p, q));
                    }
                }
            }
        }
    }

    #[test]
    fn eigenvalues_of_simple_matrices() {
        let s = hermitian_spectrum(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(s.values(), &[1.0; 4]);

        // SWAP has characteristic polynomial (λ-1)^3 (λ+1).
        let s = hermitian_spectrum(&swap2()).unwrap();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (got, want) in s.values().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        let s = hermitian_spectrum(&ComplexMatrix::diag_real(&[3., 1., 2.])).unwrap();
        for (got, want) in s.values().iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(s.min(), s.values()[0]);
    }

    #[test]
    fn eigen_rejects_non_square_and_non_hermitian() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_spectrum(&rect), Err(Error::Shape(_))));
        let skew = ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        assert!(matches!(hermitian_spectrum(&skew), Err(Error::NotHermitian { .. })));
        // Below the relative tolerance is fine.
        let nearly = ComplexMatrix::from_real(2, 2, &[1., 1e-13, 0., 1.]).unwrap();
        assert!(hermitian_spectrum(&nearly).is_ok());
    }

    #[test]
    fn singular_values_and_norms() {
        let s = singular_values(&ComplexMatrix::identity(3));
        assert_eq!(s.values(), &[1.0; 3]);
        assert_eq!(singular_values(&ComplexMatrix::zeros(3, 2)).values(), &[0.0, 0.0]);

        let r = bell_realigned();
        for v in singular_values(&r).values() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(trace_norm(&r), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(frobenius_norm(&r), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_norm(&ComplexMatrix::identity(4)), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(frobenius_norm(&ComplexMatrix::identity(4)), 2.0, epsilon = 1e-14);
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(2, 2)), 0.0);
    }

    #[test]
    fn rank_counts() {
        assert_eq!(numerical_rank(&ComplexMatrix::identity(4), 1e-10), 4);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(4, 4), 1e-10), 0);
        let mut data = vec![c(0., 0.); 16];
        data[0] = c(1., 0.);
        let single = ComplexMatrix::new(4, 4, data).unwrap();
        assert_eq!(numerical_rank(&single, 1e-10), 1);
    }

    #[test]
    fn singular_spectrum_of_rectangular() {
        // [[3, 0, 0], [0, 0, 4]] has singular values 4, 3.
        let m = ComplexMatrix::from_real(2, 3, &[3., 0., 0., 0., 0., 4.]).unwrap();
        let s = singular_values(&m);
        assert_eq!(s.len(), 2);
        assert_abs_diff_eq!(s.values()[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values()[1], 3.0, epsilon = 1e-12);
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            ComplexMatrix::new(n, n, v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap()
        })
    }

    fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
        a.add(&a.adjoint()).unwrap().scale(0.5)
    }

    fn psd_from(a: &ComplexMatrix) -> ComplexMatrix {
        a.matmul(&a.adjoint()).unwrap()
    }

    /// Random matrix with rank at most `k`: a product of n×k and k×n factors.
    fn arb_low_rank(n: usize) -> impl Strategy<Value = (ComplexMatrix, usize)> {
        (1..=n).prop_flat_map(move |k| {
            let left = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * k);
            let right = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), k * n);
            (left, right).prop_map(move |(l, r)| {
                let l = ComplexMatrix::new(n, k, l.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
                let r = ComplexMatrix::new(k, n, r.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
                (l.matmul(&r).unwrap(), k)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_bounded_by_trace_norm(a in arb_matrix(5)) {
            prop_assert!(a.trace().norm() <= trace_norm(&a) + 1e-10);
        }

        #[test]
        fn weyl_lower_bound(a in arb_matrix(4), b in arb_matrix(4)) {
            let (ha, hb) = (hermitian_part(&a), hermitian_part(&b));
            let lhs = hermitian_spectrum(&ha).unwrap().min() + hermitian_spectrum(&hb).unwrap().min();
            let sum = hermitian_spectrum(&ha.add(&hb).unwrap()).unwrap().min();
            prop_assert!(lhs <= sum + 1e-10);
        }

        #[test]
        fn trace_sandwich(a in arb_matrix(4), b in arb_matrix(4)) {
            let ha = hermitian_part(&a);
            let pb = psd_from(&b);
            let spec = hermitian_spectrum(&ha).unwrap();
            let tr_b = pb.trace().re;
            let tr_ab = ha.matmul(&pb).unwrap().trace().re;
            prop_assert!(spec.min() * tr_b <= tr_ab + 1e-10);
            prop_assert!(tr_ab <= spec.max() * tr_b + 1e-10);
        }

        #[test]
        fn trace_norm_rank_inequality((a, k) in arb_low_rank(5)) {
            let rank = numerical_rank(&a, DEFAULT_RANK_TOL);
            prop_assert!(rank <= k);
            prop_assert!(trace_norm(&a) <= (rank as f64).sqrt() * frobenius_norm(&a) + 1e-10);
        }

        #[test]
        fn adjoint_has_same_singular_values(a in arb_matrix(4)) {
            let s = singular_values(&a);
            let t = singular_values(&a.adjoint());
            for (x, y) in s.values().iter().zip(t.values()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn frobenius_matches_entry_sum(a in arb_matrix(4)) {
            let direct = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((frobenius_norm(&a) - direct).abs() < 1e-10);
        }
    }
}
