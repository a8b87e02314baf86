//! Shot-level simulation of measuring `t₁ = Tr[ρ P^{T_B}]`.
//!
//! `P^{T_B} = d |Φ⁺⟩⟨Φ⁺|`, so `t₁` is `d` times the probability of the
//! `|Φ⁺⟩⟨Φ⁺|` outcome of the two-outcome measurement
//! `{|Φ⁺⟩⟨Φ⁺|, I − |Φ⁺⟩⟨Φ⁺|}`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

const PROBABILITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub shots: u64,
    pub seed: u64,
}

/// Born-rule probability `⟨Φ⁺|ρ|Φ⁺⟩` for a d⊗d state.
pub fn projector_probability(rho: &DensityMatrix) -> Result<(usize, f64)> {
    let d = rho
        .dims()
        .square_dim()
        .ok_or_else(|| Error::Unsupported(format!("t1 estimation needs a d⊗d state, got {}", rho.dims())))?;
    let m = rho.matrix();
    // ⟨Φ⁺|ρ|Φ⁺⟩ = (1/d) Σ_{i,j} ρ(ii, jj)
    let sum: Complex64 = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i * d + i, j * d + j))
        .sum();
    let p = sum.re / d as f64;
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::Numerical(format!("outcome probability {p} outside [0, 1]")));
    }
    Ok((d, p.clamp(0.0, 1.0)))
}

/// Simulates `shots` measurements and returns `d · (successes / shots)`
/// with its binomial standard error. Deterministic in `(ρ, shots, seed)`.
pub fn sample_t1(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    let (d, p) = projector_probability(rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let successes = Binomial::new(shots, p)
        .map_err(|e| Error::Numerical(format!("binomial({shots}, {p}): {e}")))?
        .sample(&mut rng);
    let n = shots as f64;
    let p_hat = successes as f64 / n;
    let d = d as f64;
    Ok(ShotEstimate {
        estimate: d * p_hat,
        stderr: d * (p_hat * (1.0 - p_hat) / n).sqrt(),
        shots,
        seed,
    })
}
