//! Separability criteria on top of the realignment machinery, and a
//! `detect` entry point that runs a selection of them on one state.
//!
//! Every criterion is reported as `value` vs `threshold` with the convention
//! that `value > threshold + SLACK` means the separability inequality is
//! violated, so the state is entangled.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::bipartite::{first_moment, moments_from, partial_transpose, realign, Subsystem};
use crate::error::{Error, Result};
use crate::matsub::trace_norm;
use crate::states::{DensityMatrix, DimensionSignature};
use crate::tripartite::{biseparability_check, classify, Classification, CutVerdict, Qubit};

/// Absolute slack on every inequality.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionKind {
    Ccnr,
    T1,
    RMoment,
    T1Moment,
    ConcurrenceLb,
    /// Realignment + SPA-PT cut inequality on three qubits.
    TriRealign,
    /// SPA-PT biseparability bound on three qubits.
    SpaPt,
}

impl CriterionKind {
    pub const BIPARTITE: [CriterionKind; 4] = [
        CriterionKind::Ccnr,
        CriterionKind::T1,
        CriterionKind::RMoment,
        CriterionKind::T1Moment,
    ];
    pub const TRIPARTITE: [CriterionKind; 2] = [CriterionKind::TriRealign, CriterionKind::SpaPt];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Ccnr => "ccnr",
            CriterionKind::T1 => "t1",
            CriterionKind::RMoment => "r_moment",
            CriterionKind::T1Moment => "t1_moment",
            CriterionKind::ConcurrenceLb => "concurrence_lb",
            CriterionKind::TriRealign => "tri_realign",
            CriterionKind::SpaPt => "spa_pt",
        }
    }

    pub fn is_tripartite(self) -> bool {
        matches!(self, CriterionKind::TriRealign | CriterionKind::SpaPt)
    }

    /// Default selection for a signature.
    pub fn defaults_for(dims: DimensionSignature) -> Vec<CriterionKind> {
        match dims {
            DimensionSignature::Bipartite { .. } => Self::BIPARTITE.to_vec(),
            DimensionSignature::Tripartite => Self::TRIPARTITE.to_vec(),
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "ccnr" => CriterionKind::Ccnr,
            "t1" => CriterionKind::T1,
            "r_moment" => CriterionKind::RMoment,
            "t1_moment" => CriterionKind::T1Moment,
            "concurrence_lb" => CriterionKind::ConcurrenceLb,
            "tri_realign" => CriterionKind::TriRealign,
            "spa_pt" => CriterionKind::SpaPt,
            other => return Err(Error::Argument(format!("unknown criterion {other:?}"))),
        };
        Ok(kind)
    }
}

impl Serialize for CriterionKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub name: CriterionKind,
    /// Qubit cut for the three-qubit criteria.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<Qubit>,
    pub value: f64,
    pub threshold: f64,
    pub violated: bool,
    pub detail: BTreeMap<String, f64>,
}

impl CriterionResult {
    fn new(name: CriterionKind, value: f64, threshold: f64) -> Self {
        Self {
            name,
            cut: None,
            value,
            threshold,
            violated: value > threshold + SLACK,
            detail: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.detail.insert(key.to_string(), v);
        self
    }

    /// `value − threshold`; positive means violated (up to slack).
    pub fn margin(&self) -> f64 {
        self.value - self.threshold
    }

    /// Display label, with the cut for three-qubit criteria.
    pub fn label(&self) -> String {
        match self.cut {
            Some(q) => format!("{}[{}]", self.name, q.cut_label()),
            None => self.name.to_string(),
        }
    }

    /// Cut inequalities read `lhs ≥ rhs`; flipped here so that
    /// `value > threshold` is the violation.
    fn from_cut(name: CriterionKind, v: CutVerdict) -> Self {
        let mut r = Self::new(name, v.rhs, v.lhs).with("lhs", v.lhs).with("rhs", v.rhs);
        r.cut = Some(v.cut);
        r.violated = v.violated();
        r
    }
}

fn require_bipartite(rho: &DensityMatrix) -> Result<()> {
    match rho.dims() {
        DimensionSignature::Bipartite { .. } => Ok(()),
        other => Err(Error::Unsupported(format!("bipartite criterion on a {other} state"))),
    }
}

fn require_square(rho: &DensityMatrix, what: &str) -> Result<usize> {
    require_bipartite(rho)?;
    rho.dims()
        .square_dim()
        .ok_or_else(|| Error::Unsupported(format!("{what} needs a d⊗d state, got {}", rho.dims())))
}

/// Realignment (CCNR): separable states have `‖ρ^R‖₁ ≤ 1`.
pub fn ccnr(rho: &DensityMatrix) -> Result<CriterionResult> {
    require_bipartite(rho)?;
    let value = realign(rho)?.trace_norm();
    Ok(CriterionResult::new(CriterionKind::Ccnr, value, 1.0))
}

/// First realigned moment: separable d⊗d states have `Tr[ρ P^{T_B}] ≤ 1`.
pub fn t1_criterion(rho: &DensityMatrix) -> Result<CriterionResult> {
    require_square(rho, "t1")?;
    Ok(CriterionResult::new(CriterionKind::T1, first_moment(rho)?, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcurrenceMode {
    /// Uses `max(‖ρ^{T_B}‖₁, ‖ρ^R‖₁)`.
    Full,
    /// Uses only the measurable `t₁`.
    T1Only,
}

/// Lower bound on the concurrence of a d⊗d state, clamped at zero.
pub fn concurrence_lower_bound(rho: &DensityMatrix, mode: ConcurrenceMode) -> Result<f64> {
    let d = require_square(rho, "concurrence_lb")? as f64;
    let prefactor = (2.0 / (d * (d - 1.0))).sqrt();
    let base = match mode {
        ConcurrenceMode::Full => {
            let pt = trace_norm(&partial_transpose(rho, Subsystem::B)?);
            pt.max(realign(rho)?.trace_norm())
        }
        ConcurrenceMode::T1Only => first_moment(rho)?,
    };
    Ok((prefactor * (base - 1.0)).max(0.0))
}

fn concurrence_result(rho: &DensityMatrix) -> Result<CriterionResult> {
    let full = concurrence_lower_bound(rho, ConcurrenceMode::Full)?;
    let t1_only = concurrence_lower_bound(rho, ConcurrenceMode::T1Only)?;
    Ok(CriterionResult::new(CriterionKind::ConcurrenceLb, full, 0.0).with("t1_only", t1_only))
}

/// R-moment criterion: separable states have `k(k−1) D_k^{1/k} + T₁ ≤ 1`.
pub fn r_moment_criterion(rho: &DensityMatrix, rel_tol: f64) -> Result<CriterionResult> {
    require_bipartite(rho)?;
    let mv = moments_from(&realign(rho)?, None, 1, rel_tol);
    let k = mv.k as f64;
    let value = k * (k - 1.0) * mv.d_k_root + mv.t_k(1);
    Ok(CriterionResult::new(CriterionKind::RMoment, value, 1.0)
        .with("k", k)
        .with("d_k", mv.d_k)
        .with("T1", mv.t_k(1)))
}

/// Measurable moment criterion: separable d⊗d states have
/// `t₁²/k ≤ 1 − k(k−1) D_k^{1/k}`.
pub fn t1_moment_criterion(rho: &DensityMatrix, rel_tol: f64) -> Result<CriterionResult> {
    require_square(rho, "t1_moment")?;
    let t1 = first_moment(rho)?;
    let mv = moments_from(&realign(rho)?, Some(t1), 1, rel_tol);
    let k = mv.k as f64;
    let lhs = t1 * t1 / k;
    let rhs = 1.0 - k * (k - 1.0) * mv.d_k_root;
    Ok(CriterionResult::new(CriterionKind::T1Moment, lhs, rhs)
        .with("k", k)
        .with("d_k", mv.d_k)
        .with("t1", t1)
        .with("T1", mv.t_k(1)))
}

/// Runs one bipartite criterion by kind.
pub fn evaluate(rho: &DensityMatrix, kind: CriterionKind, rel_tol: f64) -> Result<CriterionResult> {
    match kind {
        CriterionKind::Ccnr => ccnr(rho),
        CriterionKind::T1 => t1_criterion(rho),
        CriterionKind::RMoment => r_moment_criterion(rho, rel_tol),
        CriterionKind::T1Moment => t1_moment_criterion(rho, rel_tol),
        CriterionKind::ConcurrenceLb => concurrence_result(rho),
        CriterionKind::TriRealign | CriterionKind::SpaPt => Err(Error::Unsupported(format!(
            "{kind} is evaluated per cut; use detect or the tripartite module"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    Undetected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "entangled",
            Verdict::Undetected => "undetected",
        })
    }
}

/// A selected criterion that could not be evaluated on this state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionFailure {
    pub name: CriterionKind,
    pub message: String,
    #[serde(skip)]
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub state_label: String,
    pub dims: String,
    pub results: Vec<CriterionResult>,
    pub errors: Vec<CriterionFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub verdict: Verdict,
}

impl DetectionReport {
    pub fn violations(&self) -> usize {
        self.results.iter().filter(|r| r.violated).count()
    }

    pub fn result(&self, name: CriterionKind) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// Runs every selected criterion. Criteria that do not apply to the state's
/// signature produce an entry in `errors`; the report is still built.
pub fn detect(rho: &DensityMatrix, label: &str, selection: &[CriterionKind], rel_tol: f64) -> DetectionReport {
    let mut results = Vec::new();
    let mut errors = Vec::new();
    let mut classification = None;
    let is_tri = rho.dims() == DimensionSignature::Tripartite;

    for &kind in selection {
        let outcome: Result<Vec<CriterionResult>> = match (kind, is_tri) {
            (CriterionKind::TriRealign, true) => classify(rho).map(|c| {
                classification = Some(c.classification);
                c.cuts.iter().map(|v| CriterionResult::from_cut(kind, *v)).collect()
            }),
            (CriterionKind::SpaPt, true) => Qubit::ALL
                .iter()
                .map(|&q| biseparability_check(rho, q).map(|v| CriterionResult::from_cut(kind, v)))
                .collect(),
            (k, true) => Err(Error::Unsupported(format!("{k} is a bipartite criterion"))),
            (k, false) if k.is_tripartite() => {
                Err(Error::Unsupported(format!("{k} needs a three-qubit state")))
            }
            (k, false) => evaluate(rho, k, rel_tol).map(|r| vec![r]),
        };
        match outcome {
            Ok(rs) => results.extend(rs),
            Err(e) => errors.push(CriterionFailure {
                name: kind,
                message: e.to_string(),
                error: e,
            }),
        }
    }

    let verdict = if results.iter().any(|r| r.violated) {
        Verdict::Entangled
    } else {
        Verdict::Undetected
    };
    DetectionReport {
        state_label: label.to_string(),
        dims: rho.dims().to_string(),
        results,
        errors,
        classification,
        verdict,
    }
}
