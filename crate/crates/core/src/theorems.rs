//! Checks on the objective coefficients and on the drop order of the
//! optimum. Every check returns a report carrying the first violated
//! inequality as exact integers.

use serde::Serialize;

use crate::appmodel::AppRegistry;
use crate::error::Result;
use crate::ilp::{build_model, BuildOptions, Coefficients};
use crate::platform::{FaultState, PlatformGraph};
use crate::solver::{brute_force, check_feasible, feasible_executable_sets, solve, SolverConfig, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Index (or index pair) at which the inequality fails.
    pub indices: Vec<usize>,
    pub lhs: i128,
    pub rhs: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TheoremReport {
    fn pass(name: &str) -> Self {
        Self {
            name: name.into(),
            holds: true,
            witness: None,
            note: None,
        }
    }

    fn fail(name: &str, indices: Vec<usize>, lhs: i128, rhs: i128) -> Self {
        Self {
            name: name.into(),
            holds: false,
            witness: Some(Witness { indices, lhs, rhs }),
            note: None,
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

/// Sum of `alpha[from..]`; `None` on overflow.
fn tail_sum(alpha: &[i128], from: usize) -> Option<i128> {
    alpha[from.min(alpha.len())..]
        .iter()
        .try_fold(0i128, |acc, &a| acc.checked_add(a))
}

/// Running an application outweighs every reallocation and path term:
/// `alpha_k > realloc_weight · n_nodes + beta` for all k.
pub fn check_theorem_1(coef: &Coefficients, n_nodes: usize) -> TheoremReport {
    const NAME: &str = "theorem_1";
    let rhs = coef
        .realloc_weight
        .checked_mul(n_nodes as i128)
        .and_then(|v| v.checked_add(coef.beta));
    let Some(rhs) = rhs else {
        return TheoremReport::fail(NAME, Vec::new(), 0, 0).with_note("overflow".into());
    };
    match coef.alpha.iter().position(|&a| a <= rhs) {
        Some(k) => TheoremReport::fail(NAME, vec![k], coef.alpha[k], rhs),
        None => TheoremReport::pass(NAME),
    }
}

/// Avoiding one reallocation outweighs every path term:
/// `realloc_weight > beta`.
pub fn check_theorem_2(coef: &Coefficients) -> TheoremReport {
    const NAME: &str = "theorem_2";
    if coef.realloc_weight > coef.beta {
        TheoremReport::pass(NAME)
    } else {
        TheoremReport::fail(NAME, Vec::new(), coef.realloc_weight, coef.beta)
    }
}

/// Each application outweighs all lower-priority ones together:
/// `alpha_k > sum(alpha[k+1..])`.
pub fn check_theorem_3(coef: &Coefficients) -> TheoremReport {
    const NAME: &str = "theorem_3";
    for k in 0..coef.alpha.len() {
        let Some(rest) = tail_sum(&coef.alpha, k + 1) else {
            return TheoremReport::fail(NAME, vec![k], coef.alpha[k], 0).with_note("overflow".into());
        };
        if coef.alpha[k] <= rest {
            return TheoremReport::fail(NAME, vec![k], coef.alpha[k], rest);
        }
    }
    TheoremReport::pass(NAME)
}

/// `alpha_i > sum(alpha[j..]) > 0` for all `i < j`.
pub fn check_lemma_alpha(coef: &Coefficients) -> TheoremReport {
    const NAME: &str = "lemma_alpha";
    let a = &coef.alpha;
    for j in 0..a.len() {
        let Some(tail) = tail_sum(a, j) else {
            return TheoremReport::fail(NAME, vec![j], 0, 0).with_note("overflow".into());
        };
        if tail <= 0 {
            return TheoremReport::fail(NAME, vec![j, j], tail, 0);
        }
        for i in 0..j {
            if a[i] <= tail {
                return TheoremReport::fail(NAME, vec![i, j], a[i], tail);
            }
        }
    }
    TheoremReport::pass(NAME)
}

/// `n_nodes >= sum(nodes[j..]) >= nodes[j] > 0` for all j, over per-app
/// node counts in priority order.
pub fn check_fact_nnodes_counts(counts: &[usize]) -> TheoremReport {
    const NAME: &str = "fact_nnodes";
    let total: i128 = counts.iter().map(|&c| c as i128).sum();
    for j in 0..counts.len() {
        let tail: i128 = counts[j..].iter().map(|&c| c as i128).sum();
        let own = counts[j] as i128;
        if total < tail {
            return TheoremReport::fail(NAME, vec![j], total, tail);
        }
        if tail < own {
            return TheoremReport::fail(NAME, vec![j], tail, own);
        }
        if own <= 0 {
            return TheoremReport::fail(NAME, vec![j], own, 0);
        }
    }
    TheoremReport::pass(NAME)
}

pub fn check_fact_nnodes(reg: &AppRegistry) -> TheoremReport {
    let counts: Vec<usize> = (0..reg.n_apps()).map(|k| reg.n_nodes_of(k)).collect();
    check_fact_nnodes_counts(&counts)
}

/// Symbolic checks in a fixed order.
pub fn check_all(coef: &Coefficients, reg: &AppRegistry) -> Vec<TheoremReport> {
    vec![
        check_theorem_1(coef, reg.n_nodes()),
        check_theorem_2(coef),
        check_theorem_3(coef),
        check_lemma_alpha(coef),
        check_fact_nnodes(reg),
    ]
}

/// True when `a` ranks above `b` with application 0 most significant.
pub fn lex_greater(a: &[bool], b: &[bool]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return *x;
        }
    }
    false
}

/// For every fault set, the running set of the solver's optimum must be the
/// priority-lexicographic maximum of all feasible running sets.
pub fn priority_drop_experiment(
    g: &PlatformGraph,
    reg: &AppRegistry,
    fault_sets: &[Vec<usize>],
    options: BuildOptions,
    cfg: &SolverConfig,
) -> Result<TheoremReport> {
    const NAME: &str = "priority_drop";
    for faults in fault_sets {
        let f = FaultState::with_faulty(g.n_cus(), faults);
        let model = build_model(g, reg, &f, None, options)?;
        let sol = solve(&model, cfg);
        if sol.status != Status::Optimal {
            return Ok(
                TheoremReport::fail(NAME, faults.clone(), 0, 0).with_note(format!("solver status {:?}", sol.status))
            );
        }
        let running = sol.running(&model);
        let sets = feasible_executable_sets(&model, cfg)?;
        let best = sets.iter().fold(None::<&Vec<bool>>, |acc, s| match acc {
            Some(b) if !lex_greater(s, b) => Some(b),
            _ => Some(s),
        });
        if best != Some(&running) {
            let enc = |s: &[bool]| s.iter().fold(0i128, |acc, &b| acc * 2 + b as i128);
            return Ok(
                TheoremReport::fail(NAME, faults.clone(), enc(&running), best.map_or(-1, |b| enc(b)))
                    .with_note("solver running set differs from the lexicographic maximum".into()),
            );
        }
    }
    Ok(TheoremReport::pass(NAME))
}

/// All subsets of `0..n` with at most `k` elements, by size then
/// lexicographically.
pub fn fault_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=k.min(n) {
        extend(n, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// One disagreement found by [`oracle_sweep`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepMismatch {
    pub faults: Vec<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub cases: usize,
    pub mismatches: Vec<SweepMismatch>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the solver with the brute-force oracle on every fault set of
/// size at most `max_faults`: equal status and objective, a feasible point,
/// and a running set that is the priority-lexicographic maximum.
pub fn oracle_sweep(
    g: &PlatformGraph,
    reg: &AppRegistry,
    options: BuildOptions,
    cfg: &SolverConfig,
    max_faults: usize,
) -> Result<SweepReport> {
    let mut report = SweepReport {
        cases: 0,
        mismatches: Vec::new(),
    };
    for faults in fault_subsets(g.n_cus(), max_faults) {
        let f = FaultState::with_faulty(g.n_cus(), &faults);
        let model = build_model(g, reg, &f, None, options)?;
        let oracle = brute_force(&model, cfg)?;
        let sol = solve(&model, cfg);
        report.cases += 1;
        let mut fail = |reason: String| {
            report.mismatches.push(SweepMismatch {
                faults: faults.clone(),
                reason,
            })
        };
        if sol.status != oracle.status {
            fail(format!("status {:?} vs oracle {:?}", sol.status, oracle.status));
            continue;
        }
        if sol.status != Status::Optimal {
            continue;
        }
        if sol.objective != oracle.objective {
            fail(format!("objective {} vs oracle {}", sol.objective, oracle.objective));
            continue;
        }
        let v = check_feasible(&model, &sol.x);
        if !v.is_empty() {
            fail(format!("{} violated rows, first: {}", v.len(), v[0]));
            continue;
        }
        let running = sol.running(&model);
        let sets = feasible_executable_sets(&model, cfg)?;
        if let Some(s) = sets.iter().find(|s| lex_greater(s, &running)) {
            fail(format!("running set {running:?} beaten by feasible {s:?}"));
        }
    }
    Ok(report)
}
