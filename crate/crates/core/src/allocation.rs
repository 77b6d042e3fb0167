//! Placement of Application Nodes on CUs, the `X^{CUs→nodes}` matrix in a
//! form that is convenient to store, compare and print.

use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::appmodel::AppRegistry;
use crate::error::{Error, Result};
use crate::ilp::VarLayout;
use crate::platform::{FaultState, PlatformGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub n_cus: usize,
    /// Host CU of each global node; `None` when its application is dropped.
    pub placement: Vec<Option<usize>>,
}

impl Allocation {
    pub fn empty(n_cus: usize, n_nodes: usize) -> Self {
        Self {
            n_cus,
            placement: vec![None; n_nodes],
        }
    }

    /// From a binary `n_cus × n_nodes` matrix.
    pub fn from_matrix(m: &Array2<i32>) -> Result<Self> {
        let (n_cus, n_nodes) = m.dim();
        let mut placement = vec![None; n_nodes];
        for j in 0..n_nodes {
            for i in 0..n_cus {
                match m[[i, j]] {
                    0 => {}
                    1 if placement[j].is_none() => placement[j] = Some(i),
                    1 => {
                        return Err(Error::Model(format!(
                            "previous allocation places node {j} on more than one CU"
                        )))
                    }
                    v => return Err(Error::Model(format!("non-binary allocation entry {v}"))),
                }
            }
        }
        Ok(Self { n_cus, placement })
    }

    pub fn to_matrix(&self) -> Array2<i32> {
        let mut m = Array2::zeros((self.n_cus, self.placement.len()));
        for (j, cu) in self.placement.iter().enumerate() {
            if let Some(i) = cu {
                m[[*i, j]] = 1;
            }
        }
        m
    }

    /// Reads the `X^{CUs→nodes}` block of a solution vector.
    pub fn from_solution(x: &[i32], layout: &VarLayout) -> Self {
        let placement = (0..layout.n_nodes)
            .map(|j| (0..layout.n_cus).find(|&i| x[layout.xcn(i, j)] == 1))
            .collect();
        Self {
            n_cus: layout.n_cus,
            placement,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.placement.len()
    }

    pub fn host_of(&self, node: usize) -> Option<usize> {
        self.placement[node]
    }

    /// Node placed on `cu`, if any.
    pub fn occupant(&self, cu: usize) -> Option<usize> {
        self.placement.iter().position(|p| *p == Some(cu))
    }

    pub fn validate(&self, n_cus: usize, n_nodes: usize) -> Result<()> {
        if self.n_cus != n_cus || self.placement.len() != n_nodes {
            return Err(Error::Model(format!(
                "allocation is {}x{}, expected {n_cus}x{n_nodes}",
                self.n_cus,
                self.placement.len()
            )));
        }
        if let Some(cu) = self.placement.iter().flatten().find(|&&cu| cu >= n_cus) {
            return Err(Error::Model(format!("allocation uses unknown CU {cu}")));
        }
        Ok(())
    }

    /// Text rendering, highest mesh row first: the app's initial on occupied
    /// CUs, `#` on faulty ones and `.` on idle ones.
    pub fn render_grid(&self, g: &PlatformGraph, reg: &AppRegistry, faults: &FaultState) -> String {
        let mut out = String::new();
        for r in (0..g.rows()).rev() {
            for c in 0..g.cols() {
                let cu = r * g.cols() + c;
                let ch = if faults.faulty[cu] {
                    '#'
                } else if let Some(node) = self.occupant(cu) {
                    reg.apps()[reg.node_app(node)].name.chars().next().unwrap_or('?')
                } else {
                    '.'
                };
                out.push(ch);
            }
            out.push('\n');
        }
        for (k, app) in reg.apps().iter().enumerate() {
            let cus: Vec<String> = reg
                .app_nodes(k)
                .filter_map(|n| self.placement[n].map(|cu| cu.to_string()))
                .collect();
            let state = if cus.is_empty() {
                "dropped".to_string()
            } else {
                cus.join(",")
            };
            let _ = writeln!(out, "{}: {}", app.name, state);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_and_errors() {
        let a = Allocation {
            n_cus: 3,
            placement: vec![Some(2), None, Some(0)],
        };
        assert_eq!(Allocation::from_matrix(&a.to_matrix()).unwrap(), a);
        let mut bad = a.to_matrix();
        bad[[1, 0]] = 1;
        assert!(Allocation::from_matrix(&bad).is_err());
        assert_eq!(a.occupant(2), Some(0));
        assert!(a.validate(3, 3).is_ok());
        assert!(a.validate(2, 3).is_err());
    }
}
