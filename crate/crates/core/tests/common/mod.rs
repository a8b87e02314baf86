//! Random state generators shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use realign::matsub::kron;
use realign::{ComplexMatrix, DensityMatrix, DimensionSignature};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn haar_ket(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// `G G† / Tr`, with G an n×n complex Gaussian matrix.
pub fn ginibre_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let rho = g.matmul(&g.adjoint()).unwrap();
    let tr = rho.trace().re;
    rho.scale(1.0 / tr)
}

pub fn ginibre_state(dims: DimensionSignature, rng: &mut impl Rng) -> DensityMatrix {
    DensityMatrix::validate(ginibre_matrix(dims.total(), rng), dims).unwrap()
}

/// `p |ψ⟩⟨ψ| + (1 − p) I/n` with Haar ψ and uniform p.
pub fn noisy_pure(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let psi = haar_ket(n, rng);
    let p: f64 = rng.random();
    ComplexMatrix::outer(&psi, &psi)
        .scale(p)
        .add(&ComplexMatrix::identity(n).scale((1.0 - p) / n as f64))
        .unwrap()
}

pub fn random_product(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    realign::states::product_state(&noisy_pure(d, rng), &noisy_pure(d, rng)).unwrap()
}

/// Convex mixture of 1 to 4 products of three noisy pure qubits.
pub fn fully_separable_tri(rng: &mut impl Rng) -> DensityMatrix {
    let terms = rng.random_range(1..=4);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = ComplexMatrix::zeros(8, 8);
    for w in weights {
        let ab = kron(&noisy_pure(2, rng), &noisy_pure(2, rng)).unwrap();
        let abc = kron(&ab, &noisy_pure(2, rng)).unwrap();
        acc = acc.add(&abc.scale(w / total)).unwrap();
    }
    DensityMatrix::validate(acc, DimensionSignature::Tripartite).unwrap()
}

/// `p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/d²`.
pub fn isotropic(d: usize, p: f64) -> DensityMatrix {
    let phi = realign::states::max_entangled(d).unwrap();
    let n = d * d;
    let mat = phi
        .matrix()
        .scale(p)
        .add(&ComplexMatrix::identity(n).scale((1.0 - p) / n as f64))
        .unwrap();
    DensityMatrix::validate(mat, phi.dims()).unwrap()
}

pub fn sq(d: usize) -> DimensionSignature {
    DimensionSignature::bipartite(d, d).unwrap()
}
