//! Coefficient-by-coefficient checking of catalog entries.

mod chains;
mod grid;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, EntryKind, Side};
use crate::dsl::{EvalError, InvalidReason, Specialization};
use crate::QSeries;

pub use chains::{chains, verify_chain, Chain, ChainReport, Step};
pub use grid::{describe, SpecGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Invalid,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Invalid => "INVALID",
        })
    }
}

/// The lowest exponent where two series differ. Coefficients are decimal
/// strings since they can exceed any fixed-width integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub exp: i64,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub id: String,
    #[serde(rename = "N")]
    pub order: i64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<Mismatch>,
    /// The specialization that failed, for transformations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    /// Why an identity was invalid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<InvalidReason>,
    pub tried: u64,
    pub valid: u64,
    pub ms: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One line of plain text.
    pub fn summary(&self) -> String {
        let mut s = format!("{:<4} {} N={}", self.status, self.id, self.order);
        if self.tried > 0 {
            s += &format!(" valid={}/{}", self.valid, self.tried);
        }
        if let Some(m) = &self.first_mismatch {
            s += &format!(" first mismatch at q^{}: {} vs {}", m.exp, m.lhs, m.rhs);
        }
        if let Some(at) = &self.at {
            s += &format!(" [{at}]");
        }
        if let Some(r) = &self.reason {
            s += &format!(" ({r})");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{id}: {err}")]
    Eval { id: String, err: EvalError },
    #[error("'{0}' has free parameters; verify it as a transformation")]
    NotIdentity(String),
    #[error("'{0}' has no free parameters; verify it as an identity")]
    NotTransformation(String),
}

/// Outcome at one specialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Equal,
    Differ(Mismatch),
    Invalid(InvalidReason),
}

pub fn compare(lhs: &QSeries, rhs: &QSeries) -> Option<Mismatch> {
    lhs.first_mismatch(rhs).map(|(exp, l, r)| Mismatch {
        exp,
        lhs: l.to_string(),
        rhs: r.to_string(),
    })
}

/// Evaluates both sides of `id` under `spec` and compares them.
pub fn check_point(cat: &Catalog, id: &str, spec: &Specialization, order: i64) -> Result<Outcome, VerifyError> {
    let side = |s| match cat.evaluate_side(id, s, spec, order)? {
        Ok(v) => Ok(Ok(v)),
        Err(EvalError::Invalid(r)) => Ok(Err(r)),
        Err(err) => Err(VerifyError::Eval {
            id: id.to_string(),
            err,
        }),
    };
    let l = match side(Side::Lhs)? {
        Ok(v) => v,
        Err(r) => return Ok(Outcome::Invalid(r)),
    };
    let r = match side(Side::Rhs)? {
        Ok(v) => v,
        Err(r) => return Ok(Outcome::Invalid(r)),
    };
    Ok(match compare(&l, &r) {
        None => Outcome::Equal,
        Some(m) => Outcome::Differ(m),
    })
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

pub fn verify_identity(cat: &Catalog, id: &str, order: i64) -> Result<VerifyReport, VerifyError> {
    let start = Instant::now();
    let entry = cat.get(id)?;
    if entry.kind != EntryKind::Identity {
        return Err(VerifyError::NotIdentity(id.to_string()));
    }
    let outcome = check_point(cat, entry.id(), &Specialization::new(), order)?;
    let mut report = VerifyReport {
        id: entry.id().to_string(),
        order,
        status: Status::Pass,
        first_mismatch: None,
        at: None,
        reason: None,
        tried: 0,
        valid: 0,
        ms: 0,
    };
    match outcome {
        Outcome::Equal => {}
        Outcome::Differ(m) => {
            report.status = Status::Fail;
            report.first_mismatch = Some(m);
        }
        Outcome::Invalid(r) => {
            report.status = Status::Invalid;
            report.reason = Some(r);
        }
    }
    report.ms = elapsed_ms(start);
    Ok(report)
}

/// Checks every grid point of a transformation. Status is INVALID when no
/// point is valid.
pub fn verify_transformation(
    cat: &Catalog,
    id: &str,
    grid: &SpecGrid,
    order: i64,
) -> Result<VerifyReport, VerifyError> {
    let start = Instant::now();
    let entry = cat.get(id)?;
    if entry.kind != EntryKind::Transformation {
        return Err(VerifyError::NotTransformation(id.to_string()));
    }
    let points = grid.points(&entry.params, entry.id());
    let outcomes: Vec<Outcome> = points
        .par_iter()
        .map(|s| check_point(cat, entry.id(), s, order))
        .collect::<Result<_, _>>()?;
    let mut report = VerifyReport {
        id: entry.id().to_string(),
        order,
        status: Status::Pass,
        first_mismatch: None,
        at: None,
        reason: None,
        tried: points.len() as u64,
        valid: 0,
        ms: 0,
    };
    for (spec, o) in points.iter().zip(outcomes) {
        match o {
            Outcome::Invalid(_) => {}
            Outcome::Equal => report.valid += 1,
            Outcome::Differ(m) => {
                report.valid += 1;
                if report.first_mismatch.is_none() {
                    report.status = Status::Fail;
                    report.first_mismatch = Some(m);
                    report.at = Some(describe(spec));
                }
            }
        }
    }
    if report.valid == 0 {
        report.status = Status::Invalid;
    }
    report.ms = elapsed_ms(start);
    Ok(report)
}

/// Checks Watson's terminating transformation for `n = 0..=n_max`.
pub fn verify_watson_terminating(
    cat: &Catalog,
    n_max: i64,
    grid: &SpecGrid,
    order: i64,
) -> Result<VerifyReport, VerifyError> {
    let grid = SpecGrid {
        int_min: 0,
        int_max: n_max,
        ..grid.clone()
    };
    verify_transformation(cat, "Wat", &grid, order)
}

/// Runs every entry with the engine its kind calls for, in catalog order.
pub fn verify_all(cat: &Catalog, grid: &SpecGrid, order: i64) -> Result<Vec<VerifyReport>, VerifyError> {
    cat.entries()
        .iter()
        .map(|e| match e.kind {
            EntryKind::Identity => verify_identity(cat, e.id(), order),
            EntryKind::Transformation => verify_transformation(cat, e.id(), grid, order),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> &'static Catalog {
        Catalog::builtin()
    }

    #[test]
    fn identity_passes() {
        let r = verify_identity(cat(), "rr1-a", 100).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.first_mismatch, None);
    }

    #[test]
    fn corrupted_identity_fails() {
        let c = Catalog::from_sources(&[(
            "x",
            "bad: sum(n>=0) q^(n^2) / poch(q; q; n) = 1 / poch(q, q^3; q^5; inf)",
        )])
        .unwrap();
        let r = verify_identity(&c, "bad", 50).unwrap();
        assert_eq!(r.status, Status::Fail);
        let m = r.first_mismatch.unwrap();
        // parts from {1, 3}: 3 = 3 = 1+1+1, against one gap-2 partition
        assert_eq!((m.exp, m.lhs.as_str(), m.rhs.as_str()), (3, "1", "2"));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        assert!(matches!(
            verify_identity(cat(), "eq1", 20),
            Err(VerifyError::NotIdentity(_))
        ));
        assert!(matches!(
            verify_transformation(cat(), "rr1-a", &SpecGrid::default(), 20),
            Err(VerifyError::NotTransformation(_))
        ));
        assert!(matches!(
            verify_identity(cat(), "missing", 20),
            Err(VerifyError::Catalog(CatalogError::UnknownId(_)))
        ));
    }

    #[test]
    fn transformation_over_grid() {
        let r = verify_transformation(cat(), "binomeq", &SpecGrid::default(), 40).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
        assert_eq!(r.tried, 240);
        assert!(r.valid >= 20);
    }

    #[test]
    fn wrong_transformation_fails_with_location() {
        let c = Catalog::from_sources(&[(
            "x",
            "bad: sum(n>=0) poch(a; q; n) * z^n / poch(q; q; n) = poch(a*z; q; inf) / poch(z*q; q; inf)",
        )])
        .unwrap();
        let r = verify_transformation(&c, "bad", &SpecGrid::default(), 30).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.at.is_some());
    }

    #[test]
    fn watson_small() {
        let g = SpecGrid {
            max_points: 40,
            ..SpecGrid::default()
        };
        let r = verify_watson_terminating(cat(), 2, &g, 30).unwrap();
        assert_eq!(r.status, Status::Pass, "{}", r.summary());
    }

    #[test]
    fn json_shape() {
        let r = verify_identity(cat(), "rr1-a", 20).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let expected = format!(
            r#"{{"id":"rr1-a","N":20,"status":"PASS","tried":0,"valid":0,"ms":{}}}"#,
            r.ms
        );
        assert_eq!(text, expected);
    }
}
