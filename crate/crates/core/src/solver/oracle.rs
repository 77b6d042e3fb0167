//! Exhaustive reference solver for small models. Enumerates running sets,
//! injective node placements, link placements and reallocation flags, then
//! completes flows and checks the full point against every row.

use crate::error::{Error, Result};
use crate::ilp::IlpModel;

use super::feasibility::check_feasible;
use super::flows::complete_flows;
use super::{Solution, SolverConfig, Status};

fn check_size(model: &IlpModel, cfg: &SolverConfig) -> Result<()> {
    let n = model.layout.n_assignment();
    if n > cfg.oracle_var_limit {
        return Err(Error::OracleRefused(format!(
            "{n} assignment variables exceed the oracle limit of {}",
            cfg.oracle_var_limit
        )));
    }
    Ok(())
}

/// Rows that only touch placement variables (no `M`, no flows) can reject a
/// candidate before the reallocation flags are enumerated.
fn early_rows(model: &IlpModel) -> Vec<usize> {
    let l = model.layout;
    let m0 = l.m(0);
    model
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.terms.iter().all(|&(v, _)| v < m0))
        .map(|(i, _)| i)
        .collect()
}

struct Enumerator<'a> {
    model: &'a IlpModel,
    early: Vec<usize>,
    x: Vec<i32>,
    running_nodes: Vec<usize>,
    running_links: Vec<usize>,
}

impl Enumerator<'_> {
    /// Calls `visit` with every complete feasible point for the current `r`.
    fn place_nodes(&mut self, idx: usize, visit: &mut dyn FnMut(&[i32]) -> bool) -> bool {
        let l = self.model.layout;
        if idx == self.running_nodes.len() {
            return self.place_links(0, visit);
        }
        let j = self.running_nodes[idx];
        for i in 0..l.n_cus {
            let v = l.xcn(i, j);
            if self.model.ub[v] < 1 {
                continue;
            }
            if self.running_nodes[..idx].iter().any(|&o| self.x[l.xcn(i, o)] == 1) {
                continue;
            }
            self.x[v] = 1;
            let stop = self.place_nodes(idx + 1, visit);
            self.x[v] = 0;
            if stop {
                return true;
            }
        }
        false
    }

    fn place_links(&mut self, idx: usize, visit: &mut dyn FnMut(&[i32]) -> bool) -> bool {
        let l = self.model.layout;
        if idx == self.running_links.len() {
            if !self.early.iter().all(|&r| self.model.rows[r].is_satisfied(&self.x)) {
                return false;
            }
            return self.set_moves(visit);
        }
        let k = self.running_links[idx];
        for p in 0..l.n_paths {
            let v = l.xpl(p, k);
            if self.model.ub[v] < 1 {
                continue;
            }
            self.x[v] = 1;
            let stop = self.place_links(idx + 1, visit);
            self.x[v] = 0;
            if stop {
                return true;
            }
        }
        false
    }

    fn set_moves(&mut self, visit: &mut dyn FnMut(&[i32]) -> bool) -> bool {
        let l = self.model.layout;
        let n = l.n_nodes;
        for mask in 0u64..(1u64 << n) {
            for j in 0..n {
                self.x[l.m(j)] = ((mask >> j) & 1) as i32;
            }
            let mut full = self.x.clone();
            if complete_flows(self.model, &mut full).is_err() {
                continue;
            }
            if check_feasible(self.model, &full).is_empty() && visit(&full) {
                return true;
            }
        }
        for j in 0..n {
            self.x[l.m(j)] = 0;
        }
        false
    }

    /// Enumerates feasible points with running set `mask` (bit k = app k).
    fn run(&mut self, mask: u64, visit: &mut dyn FnMut(&[i32]) -> bool) -> bool {
        let l = self.model.layout;
        let s = &self.model.structure;
        self.x.iter_mut().for_each(|v| *v = 0);
        for k in 0..l.n_apps {
            self.x[l.r(k)] = ((mask >> k) & 1) as i32;
        }
        self.running_nodes = (0..l.n_nodes).filter(|&j| (mask >> s.node_app[j]) & 1 == 1).collect();
        self.running_links = (0..l.n_links).filter(|&k| (mask >> s.link_app[k]) & 1 == 1).collect();
        self.place_nodes(0, visit)
    }
}

fn enumerator(model: &IlpModel) -> Enumerator<'_> {
    Enumerator {
        model,
        early: early_rows(model),
        x: vec![0; model.n_vars()],
        running_nodes: Vec::new(),
        running_links: Vec::new(),
    }
}

/// Maximum-objective feasible point by exhaustive enumeration; ties go to
/// the lexicographically smallest vector.
pub fn brute_force(model: &IlpModel, cfg: &SolverConfig) -> Result<Solution> {
    check_size(model, cfg)?;
    let l = model.layout;
    if l.n_apps >= 63 || l.n_nodes >= 63 {
        return Err(Error::OracleRefused("too many applications or nodes".into()));
    }
    let mut e = enumerator(model);
    let mut best: Option<(i128, Vec<i32>)> = None;
    for mask in 0..(1u64 << l.n_apps) {
        e.run(mask, &mut |x| {
            let obj = model.objective(x);
            let better = match &best {
                None => true,
                Some((b, bx)) => obj > *b || (obj == *b && x < bx.as_slice()),
            };
            if better {
                best = Some((obj, x.to_vec()));
            }
            false
        });
    }
    Ok(match best {
        Some((objective, x)) => Solution {
            x,
            objective,
            status: Status::Optimal,
        },
        None => Solution {
            x: Vec::new(),
            objective: 0,
            status: Status::Infeasible,
        },
    })
}

/// Every running set (`r` vector) admitting at least one feasible point.
pub fn feasible_executable_sets(model: &IlpModel, cfg: &SolverConfig) -> Result<Vec<Vec<bool>>> {
    check_size(model, cfg)?;
    let l = model.layout;
    if l.n_apps >= 63 || l.n_nodes >= 63 {
        return Err(Error::OracleRefused("too many applications or nodes".into()));
    }
    let mut e = enumerator(model);
    let mut out = Vec::new();
    for mask in 0..(1u64 << l.n_apps) {
        if e.run(mask, &mut |_| true) {
            out.push((0..l.n_apps).map(|k| (mask >> k) & 1 == 1).collect());
        }
    }
    Ok(out)
}
