//! Derivation chains: the displayed steps of a proof, each of which must
//! expand to the same series.

use std::time::Instant;

use serde::Serialize;

use super::{compare, describe, Mismatch, SpecGrid, Status, VerifyError};
use crate::catalog::{Catalog, Params, Side};
use crate::dsl::{evaluate, parse_expr, parse_record, EvalError, RecordBody, Specialization};
use crate::QSeries;

/// One line of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// A DSL expression.
    Expr(&'static str),
    /// `times` multiplied by one side of `of`, which is a catalog id or an
    /// `instance(...)` of one.
    Side {
        of: &'static str,
        side: Side,
        times: &'static str,
    },
}

impl Step {
    fn lhs(of: &'static str) -> Step {
        Step::Side {
            of,
            side: Side::Lhs,
            times: "1",
        }
    }

    fn rhs(of: &'static str) -> Step {
        Step::Side {
            of,
            side: Side::Rhs,
            times: "1",
        }
    }

    fn sides(of: &'static str, times: &'static str) -> [Step; 2] {
        [
            Step::Side {
                of,
                side: Side::Lhs,
                times,
            },
            Step::Side {
                of,
                side: Side::Rhs,
                times,
            },
        ]
    }

    pub fn describe(&self) -> String {
        match self {
            Step::Expr(e) => e.to_string(),
            Step::Side { of, side, times } => {
                let s = if *side == Side::Lhs { "lhs" } else { "rhs" };
                if *times == "1" {
                    format!("{s} of {of}")
                } else {
                    format!("{times} * {s} of {of}")
                }
            }
        }
    }

    fn evaluate(
        &self,
        cat: &Catalog,
        spec: &Specialization,
        order: i64,
    ) -> Result<Result<QSeries, EvalError>, VerifyError> {
        let parse_err = |e: crate::dsl::ParseError| VerifyError::Eval {
            id: self.describe(),
            err: EvalError::Unsupported(e.to_string()),
        };
        match self {
            Step::Expr(text) => {
                let e = parse_expr(text).map_err(parse_err)?;
                Ok(evaluate(&e, spec, order))
            }
            Step::Side { of, side, times } => {
                let base = if of.starts_with("instance(") {
                    let rec = parse_record(&format!("step: {of}")).map_err(parse_err)?;
                    let RecordBody::Instance(inst) = rec.body else {
                        unreachable!("parsed as an instance")
                    };
                    cat.evaluate_instance(&inst, *side, spec, order)?
                } else {
                    cat.evaluate_side(of, *side, spec, order)?
                };
                let factor = evaluate(&parse_expr(times).map_err(parse_err)?, spec, order);
                Ok(base.and_then(|b| factor.map(|f| f.mul_mixed(&b))))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub name: &'static str,
    /// Free symbols shared by the steps, checked over a grid.
    pub symbols: &'static [&'static str],
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub name: String,
    #[serde(rename = "N")]
    pub order: i64,
    pub status: Status,
    /// Index of the first step that differs from step 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    pub tried: u64,
    pub valid: u64,
    pub ms: u64,
}

/// Checks that every step agrees with the first, at each grid point where
/// all steps are valid.
pub fn verify_chain(cat: &Catalog, chain: &Chain, grid: &SpecGrid, order: i64) -> Result<ChainReport, VerifyError> {
    let start = Instant::now();
    let points = if chain.symbols.is_empty() {
        vec![Specialization::new()]
    } else {
        let params = Params {
            symbols: chain.symbols.iter().map(|s| s.to_string()).collect(),
            ints: Default::default(),
        };
        let grid = SpecGrid {
            qsubs: vec![Default::default()],
            ..grid.clone()
        };
        grid.points(&params, chain.name)
    };
    let mut report = ChainReport {
        name: chain.name.to_string(),
        order,
        status: Status::Pass,
        step: None,
        first_mismatch: None,
        at: None,
        tried: points.len() as u64,
        valid: 0,
        ms: 0,
    };
    'points: for spec in &points {
        let mut values = Vec::with_capacity(chain.steps.len());
        for s in &chain.steps {
            match s.evaluate(cat, spec, order)? {
                Ok(v) => values.push(v),
                Err(EvalError::Invalid(_)) => continue 'points,
                Err(err) => {
                    return Err(VerifyError::Eval {
                        id: format!("{}: {}", chain.name, s.describe()),
                        err,
                    })
                }
            }
        }
        report.valid += 1;
        if report.first_mismatch.is_some() {
            continue;
        }
        for (i, v) in values.iter().enumerate().skip(1) {
            if let Some(m) = compare(&values[0], v) {
                report.status = Status::Fail;
                report.step = Some(i);
                report.first_mismatch = Some(m);
                if !chain.symbols.is_empty() {
                    report.at = Some(describe(spec));
                }
                break;
            }
        }
    }
    if report.valid == 0 {
        report.status = Status::Invalid;
    }
    report.ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// The proofs of the corollaries, step by step.
pub fn chains() -> Vec<Chain> {
    use Step::Expr;
    let mut out = Vec::new();

    let mut steps = vec![
        Step::lhs("c1eq"),
        Expr("sum(n>=0) poch(q; q^2; n) * q^(n^2-n) * (-q^3)^n / poch(-q^2; q^2; n) / poch(q^2; q^2; n)"),
    ];
    steps.extend(Step::sides("c1-eq1", "1"));
    steps.extend([
        Expr("sum(n>=0) poch(-q^2; q^2; n) * q^(n^2-n) * (q^2)^n / poch(q^3; q^2; n) / poch(q^2; q^2; n) * poch(q^3; q^2; inf) / poch(-q^2; q^2; inf)"),
        Expr("sum(n>=0) poch(-q^2; q^2; n) * q^(n^2+n) / poch(q; q; 2*n+1) * poch(q; q^2; inf) / poch(-q^2; q^2; inf)"),
    ]);
    steps.extend(Step::sides("a28", "poch(q; q^2; inf) / poch(-q^2; q^2; inf)"));
    steps.push(Step::rhs("c1eq"));
    out.push(Chain {
        name: "c1",
        symbols: &[],
        steps,
    });

    let mut steps = vec![
        Step::lhs("c2eq"),
        Expr("1 / poch(q; q; 1) * sum(n>=0) poch(-q^2; q^2; n) * q^(n^2) / poch(q^3; q^2; n) / poch(q^2; q^2; n)"),
    ];
    steps.extend(Step::sides("c2-eq2", "1 / poch(q; q; 1)"));
    steps.extend([
        Expr("1 / poch(q; q; 1) * poch(-q; q^2; inf) / poch(q^3; q^2; inf)"),
        Step::rhs("c2eq"),
    ]);
    out.push(Chain {
        name: "c2",
        symbols: &[],
        steps,
    });

    let mut steps = vec![
        Step::lhs("c3eq"),
        Expr("sum(n>=0) poch(-1; q^2; n) * poch(-q; q^2; n) * q^(n^2+n) / poch(q^2; q^2; n) / poch(q; q^2; n) / poch(-q; q^2; n)"),
        Expr("sum(n>=0) poch(-1; q^2; n) * q^(n^2-n) * (q^2)^n / poch(q; q^2; n) / poch(q^2; q^2; n)"),
    ];
    steps.extend(Step::sides("c3-eq1", "1"));
    steps.extend([
        Expr("sum(n>=0) (-1)^n * q^(n^2) * poch(q; q^2; n) / poch(-q^2; q^2; n) / poch(q^2; q^2; n) * poch(-q^2; q^2; inf) / poch(q; q^2; inf)"),
        Expr("sum(n>=0) (-1)^n * q^(n^2) * poch(q; q^2; n) / poch(q^4; q^4; n) * poch(-q^2; q^2; inf) / poch(q; q^2; inf)"),
    ]);
    steps.extend(Step::sides("a25", "poch(-q^2; q^2; inf) / poch(q; q^2; inf)"));
    steps.push(Step::rhs("c3eq"));
    out.push(Chain {
        name: "c3",
        symbols: &[],
        steps,
    });

    let mut steps = vec![
        Step::lhs("id13"),
        Expr("sum(n>=0) poch(-q; q^2; n) * q^(n^2-n) * (q^2)^n / poch(q^2; q^2; n)"),
    ];
    steps.extend(Step::sides("c4-eq1a", "1"));
    steps.extend([
        Expr("poch(-q^2; q^2; inf) * sum(n>=0) (q^3)^n * q^(2*n^2-2*n) / poch(-q^2; q^2; n) / poch(q^2; q^2; n)"),
        Expr("poch(-q^2; q^2; inf) * sum(n>=0) (q^3)^n * q^(2*n^2-2*n) / poch(q^4; q^4; n)"),
        Expr("poch(-q^2; q^2; inf) * poch(-q^3; q^4; inf)"),
        Step::rhs("id13"),
    ]);
    out.push(Chain {
        name: "c4",
        symbols: &[],
        steps,
    });

    let mut steps = vec![
        Step::lhs("id14"),
        Expr("1 / poch(q; q; 1) * sum(n>=0) poch(-q; q^2; n) * q^(n^2-n) * (q^2)^n / poch(q^3; q^2; n) / poch(q^2; q^2; n)"),
    ];
    steps.extend(Step::sides("c5-eq2", "1 / poch(q; q; 1)"));
    steps.extend([
        Expr("1 / poch(q; q; 1) * poch(-q^2; q^2; inf) / poch(q^3; q^2; inf)"),
        Step::rhs("id14"),
    ]);
    out.push(Chain {
        name: "c5",
        symbols: &[],
        steps,
    });

    let mut steps = vec![
        Step::lhs("id17"),
        Expr("1 / poch(q; q; 1) * sum(n>=0) q^((3*n^2-3*n)/2) * (q^3)^n / poch(q^3; q^2; n) / poch(q; q; n)"),
    ];
    steps.extend(Step::sides("c6-eq3", "1 / poch(q; q; 1)"));
    steps.push(Expr(
        "1 / poch(q; q; 1) / poch(q^3; q^2; inf) * sum(n>=0) q^(2*n^2-n) * (q^3)^n / poch(q^2; q^2; n)",
    ));
    steps.extend(Step::sides(
        "instance(rr1-b; q -> q^2)",
        "1 / poch(q; q; 1) / poch(q^3; q^2; inf)",
    ));
    steps.push(Step::rhs("id17"));
    out.push(Chain {
        name: "c6",
        symbols: &[],
        steps,
    });

    out.push(Chain {
        name: "Wat1",
        symbols: &["a", "b", "c"],
        steps: vec![
            Step::lhs("Wat1"),
            Step::lhs("Wat1-W4"),
            Step::rhs("Wat1-W4"),
            Step::rhs("Wat1"),
        ],
    });

    let mut steps = vec![
        Expr("sum(r>=0) poch(c*q^(2*r); q; 1) * poch(-c, c; q; r) * (-c)^r * q^(2*r^2) / poch(-q, q; q; r)"),
        Expr("sum(r>=0) poch(c*q^(2*r); q; 1) * poch(c^2; q^2; r) * (-c)^r * q^(2*r^2) / poch(q^2; q^2; r)"),
        Step::lhs("instance(eq11; q -> q^2)"),
        Expr("poch(c; q; inf) / poch(-q; q; inf) * sum(j>=0) q^j * poch(-c; q; j) * q^((j^2-j)/2) / poch(q; q; j)"),
    ];
    steps.extend(Step::sides(
        "instance(leb1; a = -c)",
        "poch(c; q; inf) / poch(-q; q; inf)",
    ));
    steps.extend([
        Expr("poch(c^2*q^2; q^4; inf) * poch(c; q^2; inf)"),
        Step::rhs("instance(eq11; q -> q^2)"),
    ]);
    out.push(Chain {
        name: "c11",
        symbols: &["c"],
        steps,
    });

    let mut steps = vec![
        Expr("sum(r>=0) poch(-a*q^(2*r); q; 1) * poch(-a, -b, a, b; q; r) * (-a/b^2)^r * q^(r^2+r) / poch(a*q/b, -q, -a*q/b, q; q; r)"),
    ];
    steps.extend(Step::sides(
        "instance(W3; a = -a, c = -b, d = a, e = b)",
        "poch(-a; q; 1)",
    ));
    steps.push(Expr(
        "poch(-a, -q/b; q; inf) / poch(-q, -a*q/b; q; inf) * sum(r>=0) poch(a, b; q; r) * (-q/b)^r / poch(a*q/b, q; q; r)",
    ));
    steps.extend(Step::sides("beq", "poch(-a, -q/b; q; inf) / poch(-q, -a*q/b; q; inf)"));
    steps.extend([
        Step::rhs("instance(c12eq; b = b^2; q -> q^2)"),
        Step::lhs("instance(c12eq; b = b^2; q -> q^2)"),
    ]);
    out.push(Chain {
        name: "c12",
        symbols: &["a", "b"],
        steps,
    });

    let mut steps = vec![
        Step::lhs("c13eq"),
        Expr("sum(n>=0) q^(2*n^2+2*n) * (q^(-2))^n * poch(q; q^2; n) / poch(-q, -q^2, q^2; q^2; n)"),
    ];
    steps.extend(Step::sides("c13-W13", "1"));
    steps.push(Expr(
        "1 / poch(-q^2; q^2; inf) * sum(r>=0) poch(-1; q^2; r) * q^(r^2+r) / poch(-q; q^2; r) / poch(q^2; q^2; r)",
    ));
    steps.extend(Step::sides("c13-eq1", "1 / poch(-q^2; q^2; inf)"));
    steps.push(Expr(
        "1 / poch(-q; q^2; inf) * sum(r>=0) poch(-q; q^2; r) * q^(r^2) / poch(-q^2; q^2; r) / poch(q^2; q^2; r)",
    ));
    steps.extend(Step::sides("slater25", "1 / poch(-q; q^2; inf)"));
    steps.push(Step::rhs("c13eq"));
    out.push(Chain {
        name: "c13",
        symbols: &[],
        steps,
    });

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_chain_holds() {
        let cat = Catalog::builtin();
        let grid = SpecGrid {
            max_points: 60,
            ..SpecGrid::default()
        };
        for c in chains() {
            let r = verify_chain(cat, &c, &grid, 60).unwrap();
            assert_eq!(
                r.status,
                Status::Pass,
                "{r:?}\n{:?}",
                r.step.map(|i| c.steps[i].describe())
            );
            if !c.symbols.is_empty() {
                assert!(r.valid >= 10, "{}: {} valid", c.name, r.valid);
            }
        }
    }

    #[test]
    fn a_wrong_step_is_located() {
        let chain = Chain {
            name: "bad",
            symbols: &[],
            steps: vec![
                Step::lhs("rr1-a"),
                Step::rhs("rr1-a"),
                Step::Expr("1 / poch(q, q^3; q^5; inf)"),
            ],
        };
        let r = verify_chain(Catalog::builtin(), &chain, &SpecGrid::default(), 30).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.step, Some(2));
        assert_eq!(r.first_mismatch.unwrap().exp, 3);
    }
}
