use std::fmt;

use serde::Serialize;

use crate::ilp::{IlpModel, RowTag, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    Length { expected: usize, got: usize },
    Bound { var: String, value: i32, lb: i32, ub: i32 },
    Inequality { row: RowTag, lhs: i64, rhs: i64 },
    Equality { row: RowTag, lhs: i64, rhs: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Length { expected, got } => write!(f, "vector has {got} entries, model {expected}"),
            Violation::Bound { var, value, lb, ub } => write!(f, "{var} = {value} outside [{lb}, {ub}]"),
            Violation::Inequality { row, lhs, rhs } => write!(f, "{row}: {lhs} > {rhs}"),
            Violation::Equality { row, lhs, rhs } => write!(f, "{row}: {lhs} != {rhs}"),
        }
    }
}

/// Every bound and row of `model` that `x` violates; empty iff feasible.
pub fn check_feasible(model: &IlpModel, x: &[i32]) -> Vec<Violation> {
    if x.len() != model.n_vars() {
        return vec![Violation::Length {
            expected: model.n_vars(),
            got: x.len(),
        }];
    }
    let mut out = Vec::new();
    for (v, &val) in x.iter().enumerate() {
        let (lb, ub) = (model.lb[v], model.ub[v]);
        if val < lb || val > ub {
            out.push(Violation::Bound {
                var: model.layout.name(v),
                value: val,
                lb,
                ub,
            });
        }
    }
    for row in &model.rows {
        let lhs = row.activity(x);
        match row.sense {
            Sense::Le if lhs > row.rhs => out.push(Violation::Inequality {
                row: row.tag,
                lhs,
                rhs: row.rhs,
            }),
            Sense::Eq if lhs != row.rhs => out.push(Violation::Equality {
                row: row.tag,
                lhs,
                rhs: row.rhs,
            }),
            _ => {}
        }
    }
    out
}
