//! Objective weights. Executing an application must outweigh every
//! reallocation and path-length term, avoiding a reallocation must outweigh
//! every path-length term, and each application must outweigh all
//! lower-priority applications together.

use serde::Serialize;

use crate::appmodel::AppRegistry;
use crate::error::{Error, Result};
use crate::platform::PlatformGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coefficients {
    /// Upper bound on the total communication cost, `n_realloc·n_cus·n_paths`.
    pub beta: i128,
    /// Penalty per reallocated node, `beta + 1`.
    pub realloc_weight: i128,
    /// `alpha[k]` rewards running the app of priority rank `k + 1`.
    pub alpha: Vec<i128>,
}

impl Coefficients {
    /// `alpha` by descending recursion:
    /// `alpha[k] = sum(alpha[k+1..]) + (beta+1)·n_nodes + beta + 1`.
    /// Overflow of the 128-bit width is an error, including in the sum of
    /// all weights, so a solver adding them up cannot wrap either.
    pub fn compute(n_apps: usize, n_nodes: usize, beta: i128) -> Result<Self> {
        if beta < 0 {
            return Err(Error::Model(format!("negative beta {beta}")));
        }
        let overflow = || Error::Overflow(format!("alpha for {n_apps} apps, {n_nodes} nodes, beta {beta}"));
        let realloc_weight = beta.checked_add(1).ok_or_else(overflow)?;
        let base = realloc_weight
            .checked_mul(n_nodes as i128)
            .and_then(|v| v.checked_add(realloc_weight))
            .ok_or_else(overflow)?;
        let mut alpha = vec![0i128; n_apps];
        let mut suffix: i128 = 0;
        for k in (0..n_apps).rev() {
            alpha[k] = suffix.checked_add(base).ok_or_else(overflow)?;
            suffix = suffix.checked_add(alpha[k]).ok_or_else(overflow)?;
        }
        // headroom for objective sums over every variable
        suffix
            .checked_add(base)
            .and_then(|v| v.checked_mul(2))
            .ok_or_else(overflow)?;
        Ok(Self {
            beta,
            realloc_weight,
            alpha,
        })
    }
}

/// `beta = n_realloc · n_cus · n_paths` and the matching alpha ladder.
pub fn compute_coefficients(reg: &AppRegistry, g: &PlatformGraph) -> Result<Coefficients> {
    let beta = (reg.n_realloc() as i128)
        .checked_mul(g.n_cus() as i128)
        .and_then(|v| v.checked_mul(g.n_paths() as i128))
        .ok_or_else(|| Error::Overflow("beta".into()))?;
    Coefficients::compute(reg.n_apps(), reg.n_nodes(), beta)
}
