//! Exact solver for the allocation program, a brute-force reference and a
//! feasibility checker.

mod feasibility;
mod flows;
mod oracle;
mod search;

use serde::{Deserialize, Serialize};

use crate::allocation::Allocation;
use crate::ilp::IlpModel;

pub use feasibility::{check_feasible, Violation};
pub use flows::{complete_flows, host_cost, solve_flows, Flows};
pub use oracle::{brute_force, feasible_executable_sets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    /// Budget exhausted; `x` holds the best point found, if any.
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Full decision vector; empty when no feasible point is known.
    pub x: Vec<i32>,
    pub objective: i128,
    pub status: Status,
}

impl Solution {
    pub fn has_point(&self) -> bool {
        !self.x.is_empty() || self.status == Status::Optimal
    }

    pub fn allocation(&self, model: &IlpModel) -> Option<Allocation> {
        self.has_point()
            .then(|| Allocation::from_solution(&self.x, &model.layout))
    }

    /// Running flag of every application.
    pub fn running(&self, model: &IlpModel) -> Vec<bool> {
        (0..model.layout.n_apps)
            .map(|k| self.has_point() && self.x[model.layout.r(k)] == 1)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub timeout_ms: u64,
    pub node_limit: u64,
    /// Largest assignment-variable count the brute-force oracle accepts.
    pub oracle_var_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            timeout_ms: 60_000,
            node_limit: 50_000_000,
            oracle_var_limit: 64,
        }
    }
}

/// Provably optimal solution by branch and bound, deterministic for equal
/// inputs.
pub fn solve(model: &IlpModel, cfg: &SolverConfig) -> Solution {
    search::Search::new(model, cfg).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appmodel::{AppRegistry, AppSpec};
    use crate::ilp::{build_model, BuildOptions};
    use crate::platform::{build_mesh, FaultState};

    fn solve_both(
        g: &crate::platform::PlatformGraph,
        specs: Vec<AppSpec>,
        f: &FaultState,
    ) -> (IlpModel, Solution, Solution) {
        let reg = AppRegistry::new(specs).unwrap();
        let m = build_model(g, &reg, f, None, BuildOptions::default()).unwrap();
        let cfg = SolverConfig::default();
        let a = solve(&m, &cfg);
        let b = brute_force(&m, &cfg).unwrap();
        (m, a, b)
    }

    #[test]
    fn single_cu_single_node() {
        let g = build_mesh(1, 1, false).unwrap();
        let (m, s, b) = solve_both(&g, vec![AppSpec::grid("a", 1, 1, 1)], &FaultState::healthy(1));
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.x, vec![1, 1, 0]);
        assert_eq!(s.objective, m.coefficients.alpha[0]);
        assert_eq!(b, s);
    }

    #[test]
    fn capacity_keeps_top_priority() {
        let g = build_mesh(2, 2, false).unwrap();
        let specs = vec![
            AppSpec::grid("a", 1, 1, 3),
            AppSpec::grid("b", 2, 1, 2),
            AppSpec::grid("c", 3, 1, 1),
        ];
        let (m, s, b) = solve_both(&g, specs, &FaultState::with_faulty(4, &[3]));
        assert_eq!(s.running(&m), vec![true, false, false]);
        assert_eq!(s.objective, b.objective);
        assert!(check_feasible(&m, &s.x).is_empty());
    }

    #[test]
    fn oversize_app_lets_others_run() {
        let g = build_mesh(2, 2, false).unwrap();
        let specs = vec![
            AppSpec::grid("a", 1, 1, 5),
            AppSpec::grid("b", 2, 1, 2),
            AppSpec::grid("c", 3, 1, 1),
        ];
        let reg = AppRegistry::new(specs).unwrap();
        let m = build_model(&g, &reg, &FaultState::healthy(4), None, BuildOptions::default()).unwrap();
        let s = solve(&m, &SolverConfig::default());
        assert_eq!(s.running(&m), vec![false, true, true]);
        assert!(check_feasible(&m, &s.x).is_empty());
    }

    #[test]
    fn flip_one_bit_breaks_feasibility() {
        let g = build_mesh(2, 2, false).unwrap();
        let specs = vec![AppSpec::grid("a", 1, 1, 2), AppSpec::grid("b", 2, 1, 1).as_allocator(0)];
        let (m, s, b) = solve_both(&g, specs, &FaultState::healthy(4));
        assert_eq!(s.objective, b.objective);
        for v in 0..m.layout.n_nodes * m.layout.n_cus {
            let mut x = s.x.clone();
            x[v] = 1 - x[v];
            assert!(
                !check_feasible(&m, &x).is_empty(),
                "flipping {} kept feasibility",
                m.layout.name(v)
            );
        }
        assert!(check_feasible(&m, &vec![0; m.n_vars()]).is_empty());
    }

    #[test]
    fn oracle_refuses_large_models() {
        let g = build_mesh(4, 4, false).unwrap();
        let reg = AppRegistry::new(vec![AppSpec::grid("a", 1, 2, 2)]).unwrap();
        let m = build_model(&g, &reg, &FaultState::healthy(16), None, BuildOptions::default()).unwrap();
        assert!(brute_force(&m, &SolverConfig::default()).is_err());
    }

    #[test]
    fn node_limit_times_out() {
        let g = build_mesh(2, 2, false).unwrap();
        let reg = AppRegistry::new(vec![AppSpec::grid("a", 1, 1, 2)]).unwrap();
        let m = build_model(&g, &reg, &FaultState::healthy(4), None, BuildOptions::default()).unwrap();
        let cfg = SolverConfig {
            node_limit: 1,
            ..SolverConfig::default()
        };
        assert_eq!(solve(&m, &cfg).status, Status::TimedOut);
    }
}
