//! Communication flows for a fixed assignment. Each (allocator, sink)
//! column is an independent unit flow whose cheapest completion is a
//! shortest path in the healthy subgraph.

use crate::error::{Error, Result};
use crate::ilp::{IlpModel, VarLayout};
use crate::platform::{FaultState, PlatformGraph, ShortestPathTree};

/// Signed path entries `(path, ±1)` for every allocator and sink CU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flows {
    /// `columns[k][j]`: flow of allocator `k` towards sink `j`.
    pub columns: Vec<Vec<Vec<(usize, i32)>>>,
    /// Total number of traversed paths, `Σ |X^{Comm}|`.
    pub cost: u64,
}

impl Flows {
    /// Writes `X^{Comm}` and the matching `X̂` into a full decision vector.
    pub fn write_into(&self, layout: &VarLayout, x: &mut [i32]) {
        for v in layout.n_assignment()..layout.n_vars() {
            x[v] = 0;
        }
        for (k, cols) in self.columns.iter().enumerate() {
            for (j, col) in cols.iter().enumerate() {
                for &(p, s) in col {
                    x[layout.xcomm(k, p, j)] = s;
                    x[layout.xhat(k, p, j)] = s.abs();
                }
            }
        }
    }
}

/// Sum of hop distances from `host` to every active CU, or `None` when the
/// host cannot serve them all (inactive host while there is demand, or an
/// unreachable sink).
pub fn host_cost(g: &PlatformGraph, f: &FaultState, active: &[bool], host: usize) -> Option<u64> {
    if !active.iter().any(|&a| a) {
        return Some(0);
    }
    if !active[host] {
        return None;
    }
    let tree = ShortestPathTree::build(g, f, host);
    let mut total = 0u64;
    for (j, &a) in active.iter().enumerate() {
        if a {
            total += tree.dist[j]? as u64;
        }
    }
    Some(total)
}

/// Shortest-path flows from each running allocator's host (`hosts[k]`,
/// `None` when dropped) to every active CU. Entries are `+1` when the path
/// is walked along its orientation in G and `-1` against it.
pub fn solve_flows(g: &PlatformGraph, f: &FaultState, active: &[bool], hosts: &[Option<usize>]) -> Result<Flows> {
    let n = g.n_cus();
    let any_demand = active.iter().any(|&a| a);
    let mut columns = Vec::with_capacity(hosts.len());
    let mut cost = 0u64;
    for (k, host) in hosts.iter().enumerate() {
        let mut cols = vec![Vec::new(); n];
        if let (Some(h), true) = (*host, any_demand) {
            if !active[h] {
                return Err(Error::Internal(format!(
                    "allocator {k} hosted on CU {h}, which cannot reach the active CUs"
                )));
            }
            let tree = ShortestPathTree::build(g, f, h);
            for (j, col) in cols.iter_mut().enumerate() {
                if !active[j] {
                    continue;
                }
                let hops = tree
                    .path_to(j)
                    .ok_or_else(|| Error::Internal(format!("sink CU {j} unreachable from allocator {k} on CU {h}")))?;
                for (p, from, _) in hops {
                    let sign = if g.edges()[p].0 == from { 1 } else { -1 };
                    col.push((p, sign));
                }
                col.sort_unstable();
                cost += col.len() as u64;
            }
        }
        columns.push(cols);
    }
    Ok(Flows { columns, cost })
}

/// Completes the flow block of `x` from its assignment block. Errors when
/// some running allocator's host cannot serve all active CUs.
pub fn complete_flows(model: &IlpModel, x: &mut [i32]) -> Result<u64> {
    let l = &model.layout;
    let s = &model.structure;
    let hosts: Vec<Option<usize>> = s
        .allocators
        .iter()
        .map(|&(node, app)| {
            if x[l.r(app)] == 1 {
                (0..l.n_cus).find(|&i| x[l.xcn(i, node)] == 1)
            } else {
                None
            }
        })
        .collect();
    let flows = solve_flows(&s.platform, &s.faults, &s.comm_active, &hosts)?;
    flows.write_into(l, x);
    Ok(flows.cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::platform::build_mesh;

    #[test]
    fn self_hosted_sink_is_free() {
        let g = build_mesh(2, 2, false).unwrap();
        let f = FaultState::healthy(4);
        let fl = solve_flows(&g, &f, &[true; 4], &[Some(2)]).unwrap();
        assert!(fl.columns[0][2].is_empty());
        assert_eq!(fl.cost, 1 + 2 + 1);
    }

    #[test]
    fn line_flow_is_forward() {
        let g = build_mesh(1, 3, false).unwrap();
        let f = FaultState::healthy(3);
        let fl = solve_flows(&g, &f, &[true; 3], &[Some(0)]).unwrap();
        assert_eq!(fl.columns[0][2], vec![(0, 1), (1, 1)]);
        let back = solve_flows(&g, &f, &[true; 3], &[Some(2)]).unwrap();
        assert_eq!(back.columns[0][0], vec![(0, -1), (1, -1)]);
    }

    #[test]
    fn center_of_three_by_three() {
        let g = build_mesh(3, 3, false).unwrap();
        let f = FaultState::healthy(9);
        assert_eq!(solve_flows(&g, &f, &[true; 9], &[Some(4)]).unwrap().cost, 12);
        assert_eq!(host_cost(&g, &f, &[true; 9], 4), Some(12));
    }

    #[test]
    fn dropped_allocator_and_bad_host() {
        let g = build_mesh(1, 3, false).unwrap();
        let f = FaultState::with_faulty(3, &[1]);
        let active = [false, false, false];
        let fl = solve_flows(&g, &f, &active, &[None, Some(0)]).unwrap();
        assert_eq!(fl.cost, 0);
        let active = [true, false, true];
        assert!(solve_flows(&g, &f, &active, &[Some(0)]).is_err());
        assert!(solve_flows(&g, &f, &active, &[Some(1)]).is_err());
        assert_eq!(host_cost(&g, &f, &active, 0), None);
    }
}
