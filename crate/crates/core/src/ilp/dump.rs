//! LP-style text dumps of models and solutions.

use std::fmt::Write as _;

use super::{IlpModel, Row, Sense, VarLayout};

fn linear(out: &mut String, layout: &VarLayout, terms: impl Iterator<Item = (usize, i128)>) {
    let mut first = true;
    for (v, a) in terms {
        let sign = if a < 0 {
            "-"
        } else if first {
            ""
        } else {
            "+"
        };
        let mag = a.unsigned_abs();
        if !first {
            out.push(' ');
        }
        if mag == 1 {
            let _ = write!(out, "{sign}{}", layout.name(v));
        } else {
            let _ = write!(out, "{sign}{mag} {}", layout.name(v));
        }
        first = false;
    }
    if first {
        out.push('0');
    }
}

fn row_line(out: &mut String, layout: &VarLayout, row: &Row) {
    let _ = write!(out, " {}: ", row.tag);
    linear(out, layout, row.terms.iter().map(|&(v, a)| (v, a as i128)));
    let op = match row.sense {
        Sense::Le => "<=",
        Sense::Eq => "=",
    };
    let _ = writeln!(out, " {op} {}", row.rhs);
}

pub(super) fn model_to_string(m: &IlpModel) -> String {
    let l = &m.layout;
    let mut out = String::from("maximize\n obj: ");
    linear(
        &mut out,
        l,
        m.c.iter().enumerate().filter(|(_, &c)| c != 0).map(|(v, &c)| (v, c)),
    );
    out.push_str("\nsubject to\n");
    for row in &m.rows {
        row_line(&mut out, l, row);
    }
    out.push_str("bounds\n");
    for v in 0..m.n_vars() {
        let _ = writeln!(out, " {} <= {} <= {}", m.lb[v], l.name(v), m.ub[v]);
    }
    out.push_str("end\n");
    out
}

pub(super) fn solution_to_string(m: &IlpModel, x: &[i32]) -> String {
    let mut out = String::new();
    for (v, &val) in x.iter().enumerate() {
        if val != 0 {
            let _ = writeln!(out, "{} = {val}", m.layout.name(v));
        }
    }
    out
}
