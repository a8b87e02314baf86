//! Parameter sweeps over the state families with bisection refinement of
//! the violation boundaries.
//!
//! Margins are signed so that a positive value always means the
//! separability inequality is violated. Points where a family is undefined
//! (ε = 1, or p₂ < 0 on the three-qubit grid) are skipped.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{evaluate, CriterionKind, SLACK};
use crate::error::{Error, Result};
use crate::states::{rho_a, rho_epsilon, rho_epsilon_symmetric, tri_family, DensityMatrix};
use crate::tripartite::{biseparability_check, classify, Qubit};

/// Bisection iteration cap.
pub const MAX_BISECTIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RhoEps,
    RhoEpsSymmetric,
    RhoA,
    TriFamily,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RhoEps => "rho-eps",
            Family::RhoEpsSymmetric => "rho-eps-symmetric",
            Family::RhoA => "rho-a",
            Family::TriFamily => "tri-family",
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::RhoEps | Family::RhoEpsSymmetric => "epsilon",
            Family::RhoA => "a",
            Family::TriFamily => "p1,p3",
        }
    }

    fn state_1d(self, x: f64) -> Result<DensityMatrix> {
        match self {
            Family::RhoEps => rho_epsilon(x),
            Family::RhoEpsSymmetric => rho_epsilon_symmetric(x),
            Family::RhoA => rho_a(x),
            Family::TriFamily => Err(Error::Unsupported("tri-family is a two-parameter family".into())),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho-eps" => Ok(Family::RhoEps),
            "rho-eps-symmetric" => Ok(Family::RhoEpsSymmetric),
            "rho-a" => Ok(Family::RhoA),
            "tri-family" => Ok(Family::TriFamily),
            other => Err(Error::Argument(format!("unknown family {other:?}"))),
        }
    }
}

/// Evenly spaced grid `min, min + step, …` up to and including `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
            return Err(Error::Argument(format!(
                "invalid grid min={min} max={max} step={step}"
            )));
        }
        Ok(Self { min, max, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.min + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub family: Family,
    pub parameter: &'static str,
    pub criterion: CriterionKind,
    pub rows: Vec<SweepRow>,
    /// Disjoint, sorted `(lo, hi)` violation intervals.
    pub detected_intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriSweepRow {
    pub p1: f64,
    pub p3: f64,
    pub margin_a: f64,
    pub margin_b: f64,
    pub margin_c: f64,
    pub all_violated: bool,
}

/// One-parameter sweep evaluator; `None` when the point is outside the
/// family's domain.
fn point(family: Family, criterion: CriterionKind, x: f64, rel_tol: f64) -> Result<Option<SweepRow>> {
    let rho = match family.state_1d(x) {
        Ok(r) => r,
        Err(Error::Domain(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let r = evaluate(&rho, criterion, rel_tol)?;
    Ok(Some(SweepRow {
        parameter: x,
        lhs: r.value,
        rhs: r.threshold,
        margin: r.margin(),
        violated: r.violated,
    }))
}

fn margin_at(family: Family, criterion: CriterionKind, x: f64, rel_tol: f64) -> Result<f64> {
    point(family, criterion, x, rel_tol)?
        .map(|r| r.margin)
        .ok_or_else(|| Error::Domain(format!("refinement reached {x}, outside the {} domain", family.name())))
}

/// Bisects between a non-violating point `outside` and a violating point
/// `inside` until the bracket is narrower than `tol` and the margin at the
/// midpoint is within [`SLACK`] of zero, or the iteration cap is hit.
pub fn refine_boundary<F>(mut outside: f64, mut inside: f64, tol: f64, mut margin: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut mid = 0.5 * (outside + inside);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (outside + inside);
        let m = margin(mid)?;
        if (inside - outside).abs() <= tol && m.abs() < SLACK {
            return Ok(mid);
        }
        if m > 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(mid)
}

pub fn sweep_1d(
    family: Family,
    criterion: CriterionKind,
    grid: Grid,
    refine_tol: f64,
    rel_tol: f64,
) -> Result<SweepResult> {
    if family == Family::TriFamily {
        return Err(Error::Unsupported("tri-family needs the two-parameter sweep".into()));
    }
    if criterion.is_tripartite() {
        return Err(Error::Unsupported(format!("{criterion} does not apply to {}", family.name())));
    }
    if refine_tol.is_nan() || refine_tol <= 0.0 {
        return Err(Error::Argument(format!("refine tolerance must be positive, got {refine_tol}")));
    }
    let evaluated: Vec<Option<SweepRow>> = grid
        .points()
        .into_par_iter()
        .map(|x| point(family, criterion, x, rel_tol))
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = evaluated.into_iter().flatten().collect();

    let mut detected_intervals = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        if !rows[i].violated {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < rows.len() && rows[i + 1].violated {
            i += 1;
        }
        let end = i;
        let f = |x| margin_at(family, criterion, x, rel_tol);
        let lo = if start == 0 {
            rows[start].parameter
        } else {
            refine_boundary(rows[start - 1].parameter, rows[start].parameter, refine_tol, f)?
        };
        let hi = if end + 1 == rows.len() {
            rows[end].parameter
        } else {
            refine_boundary(rows[end + 1].parameter, rows[end].parameter, refine_tol, f)?
        };
        detected_intervals.push((lo, hi));
        i += 1;
    }

    Ok(SweepResult {
        family,
        parameter: family.parameter_name(),
        criterion,
        rows,
        detected_intervals,
    })
}

/// Per-point cut margins over a (p₁, p₃) grid for the three-qubit family.
pub fn sweep_tri(criterion: CriterionKind, p1_grid: Grid, p3_grid: Grid) -> Result<Vec<TriSweepRow>> {
    if !criterion.is_tripartite() {
        return Err(Error::Unsupported(format!("{criterion} does not apply to tri-family")));
    }
    let p3s = p3_grid.points();
    let pairs: Vec<(f64, f64)> = p1_grid
        .points()
        .into_iter()
        .flat_map(|p1| p3s.iter().map(move |&p3| (p1, p3)))
        .collect();
    let rows: Vec<Option<TriSweepRow>> = pairs
        .into_par_iter()
        .map(|(p1, p3)| tri_point(criterion, p1, p3))
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn tri_point(criterion: CriterionKind, p1: f64, p3: f64) -> Result<Option<TriSweepRow>> {
    let rho = match tri_family(p1, p3) {
        Ok(r) => r,
        Err(Error::Domain(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let cuts = match criterion {
        CriterionKind::TriRealign => classify(&rho)?.cuts,
        _ => [
            biseparability_check(&rho, Qubit::A)?,
            biseparability_check(&rho, Qubit::B)?,
            biseparability_check(&rho, Qubit::C)?,
        ],
    };
    Ok(Some(TriSweepRow {
        p1,
        p3,
        margin_a: cuts[0].margin(),
        margin_b: cuts[1].margin(),
        margin_c: cuts[2].margin(),
        all_violated: cuts.iter().all(|c| c.violated()),
    }))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv_1d<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([result.parameter, "lhs", "rhs", "margin", "violated"]).map_err(csv_err)?;
    for r in &result.rows {
        w.write_record([
            format!("{}", r.parameter),
            format!("{:e}", r.lhs),
            format!("{:e}", r.rhs),
            format!("{:e}", r.margin),
            (r.violated as u8).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_csv_tri<W: Write>(rows: &[TriSweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p1", "p3", "margin_A", "margin_B", "margin_C", "all_violated"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            format!("{}", r.p1),
            format!("{}", r.p3),
            format!("{:e}", r.margin_a),
            format!("{:e}", r.margin_b),
            format!("{:e}", r.margin_c),
            (r.all_violated as u8).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoint() {
        let g = Grid::new(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(Grid::new(0.0, 1.0, 1.0 / 99.0).unwrap().points().len(), 100);
        assert_eq!(Grid::new(0.0, 1.0 / 3.0, 1.0 / 99.0).unwrap().points().len(), 34);
        assert!(Grid::new(1.0, 0.0, 0.1).is_err());
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bisection_finds_root_of_linear_margin() {
        let root = refine_boundary(0.0, 1.0, 1e-6, |x| Ok(x - 0.3)).unwrap();
        assert!((root - 0.3).abs() < 1e-6);
        let root = refine_boundary(1.0, 0.0, 1e-6, |x| Ok(0.7 - x)).unwrap();
        assert!((root - 0.7).abs() < 1e-6);
    }

    #[test]
    fn family_criterion_mismatch() {
        let g = Grid::new(0.6, 0.7, 0.05).unwrap();
        assert!(matches!(
            sweep_1d(Family::RhoEps, CriterionKind::TriRealign, g, 1e-6, 1e-10),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            sweep_1d(Family::TriFamily, CriterionKind::Ccnr, g, 1e-6, 1e-10),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(sweep_tri(CriterionKind::Ccnr, g, g), Err(Error::Unsupported(_))));
    }

    #[test]
    fn epsilon_one_is_skipped() {
        let g = Grid::new(0.99, 1.01, 0.01).unwrap();
        let res = sweep_1d(Family::RhoEps, CriterionKind::Ccnr, g, 1e-6, 1e-10).unwrap();
        assert_eq!(res.rows.len(), 2);
    }

    #[test]
    fn tri_grid_skips_infeasible_points() {
        let g1 = Grid::new(0.0, 1.0, 0.5).unwrap();
        let g3 = Grid::new(0.0, 0.3, 0.3).unwrap();
        let rows = sweep_tri(CriterionKind::TriRealign, g1, g3).unwrap();
        // p2 = 1 − p1 − 3p3 is negative at (0.5, 0.3) and (1.0, 0.3).
        assert_eq!(rows.len(), 4);
    }

    #[test]
    fn csv_headers() {
        let g = Grid::new(0.6, 0.7, 0.05).unwrap();
        let res = sweep_1d(Family::RhoEps, CriterionKind::T1Moment, g, 1e-6, 1e-10).unwrap();
        let mut buf = Vec::new();
        write_csv_1d(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("epsilon,lhs,rhs,margin,violated\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
