//! Depth-first branch and bound over the assignment variables
//! (`X^{CUs→nodes}`, `X^{paths→links}`, `r`, `M`) with bound propagation on
//! every row that involves only those variables. Communication flows are
//! completed exactly at the leaves.

use std::time::{Duration, Instant};

use crate::ilp::{IlpModel, Sense};

use super::flows::{complete_flows, host_cost};
use super::{Solution, SolverConfig, Status};

struct SRow {
    terms: Vec<(usize, i64)>,
    rhs: i64,
    eq: bool,
    max_abs: i64,
    min_act: i64,
    max_act: i64,
}

pub(super) struct Search<'a> {
    model: &'a IlpModel,
    n: usize,
    lo: Vec<i8>,
    hi: Vec<i8>,
    rows: Vec<SRow>,
    cols: Vec<Vec<(usize, i64)>>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    order: Vec<(usize, i8)>,
    cursor: usize,
    host_cost: Vec<Option<u64>>,
    usable: Vec<bool>,
    incumbent: Option<(i128, Vec<i32>)>,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    aborted: bool,
}

impl<'a> Search<'a> {
    pub(super) fn new(model: &'a IlpModel, cfg: &SolverConfig) -> Self {
        let l = model.layout;
        let n = l.n_assignment();
        let mut rows = Vec::new();
        let mut cols = vec![Vec::new(); n];
        for row in &model.rows {
            if row.terms.iter().any(|&(v, _)| v >= n) {
                continue;
            }
            let id = rows.len();
            for &(v, a) in &row.terms {
                cols[v].push((id, a));
            }
            let (mut min_act, mut max_act) = (0, 0);
            for &(_, a) in &row.terms {
                if a > 0 {
                    max_act += a;
                } else {
                    min_act += a;
                }
            }
            rows.push(SRow {
                terms: row.terms.clone(),
                rhs: row.rhs,
                eq: row.sense == Sense::Eq,
                max_abs: row.terms.iter().map(|t| t.1.abs()).max().unwrap_or(0),
                min_act,
                max_act,
            });
        }

        let s = &model.structure;
        let host_cost: Vec<Option<u64>> = (0..l.n_cus)
            .map(|h| host_cost(&s.platform, &s.faults, &s.comm_active, h))
            .collect();

        let mut order: Vec<(usize, i8)> = (0..l.n_apps).map(|k| (l.r(k), 1)).collect();
        for j in 0..l.n_nodes {
            let hint = s.previous.as_ref().and_then(|p| p.placement[j]);
            if let Some(h) = hint {
                order.push((l.xcn(h, j), 1));
            }
            for i in (0..l.n_cus).filter(|&i| Some(i) != hint) {
                order.push((l.xcn(i, j), 1));
            }
        }
        for k in 0..l.n_links {
            for p in 0..l.n_paths {
                order.push((l.xpl(p, k), 1));
            }
        }
        for j in 0..l.n_nodes {
            order.push((l.m(j), 0));
        }

        let timeout = Duration::from_millis(cfg.timeout_ms);
        let n_rows = rows.len();
        Self {
            model,
            n,
            lo: vec![0; n],
            hi: vec![1; n],
            rows,
            cols,
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; n_rows],
            order,
            cursor: 0,
            host_cost,
            usable: vec![true; l.n_cus],
            incumbent: None,
            nodes: 0,
            node_limit: cfg.node_limit,
            deadline: Instant::now().checked_add(timeout),
            aborted: false,
        }
    }

    fn fix(&mut self, v: usize, val: i8) {
        self.lo[v] = val;
        self.hi[v] = val;
        self.trail.push(v);
        for &(r, a) in &self.cols[v] {
            let row = &mut self.rows[r];
            match (a > 0, val == 1) {
                (true, true) => row.min_act += a,
                (true, false) => row.max_act -= a,
                (false, true) => row.max_act += a,
                (false, false) => row.min_act -= a,
            }
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap_or_default();
            let val = self.lo[v];
            for &(r, a) in &self.cols[v] {
                let row = &mut self.rows[r];
                match (a > 0, val == 1) {
                    (true, true) => row.min_act -= a,
                    (true, false) => row.max_act += a,
                    (false, true) => row.max_act -= a,
                    (false, false) => row.min_act += a,
                }
            }
            self.lo[v] = 0;
            self.hi[v] = 1;
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r] = false;
        }
    }

    /// Propagates queued rows to a fixpoint; false on conflict.
    fn propagate(&mut self) -> bool {
        let mut forced: Vec<(usize, i8)> = Vec::new();
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let row = &self.rows[r];
            if row.min_act > row.rhs || (row.eq && row.max_act < row.rhs) {
                self.clear_queue();
                return false;
            }
            let slack_le = row.rhs - row.min_act;
            let slack_ge = if row.eq { row.max_act - row.rhs } else { i64::MAX };
            if slack_le >= row.max_abs && slack_ge >= row.max_abs {
                continue;
            }
            forced.clear();
            for &(v, a) in &row.terms {
                if self.lo[v] == self.hi[v] {
                    continue;
                }
                if a.abs() > slack_le {
                    forced.push((v, if a > 0 { 0 } else { 1 }));
                } else if a.abs() > slack_ge {
                    forced.push((v, if a > 0 { 1 } else { 0 }));
                }
            }
            for i in 0..forced.len() {
                let (v, val) = forced[i];
                if self.lo[v] != self.hi[v] {
                    self.fix(v, val);
                } else if self.lo[v] != val {
                    self.clear_queue();
                    return false;
                }
            }
        }
        true
    }

    /// Optimistic objective of the current subtree, or `None` when it
    /// provably holds no feasible point.
    fn bound(&self) -> Option<i128> {
        let m = self.model;
        let l = m.layout;
        let coef = &m.coefficients;
        let mut occupied = vec![false; l.n_cus];
        let mut placed = vec![false; l.n_nodes];
        for j in 0..l.n_nodes {
            for i in 0..l.n_cus {
                if self.lo[l.xcn(i, j)] == 1 {
                    occupied[i] = true;
                    placed[j] = true;
                }
            }
        }
        let free = (0..l.n_cus).filter(|&i| self.usable[i] && !occupied[i]).count();
        let mut unplaced = vec![0usize; l.n_apps];
        for j in 0..l.n_nodes {
            if !placed[j] {
                unplaced[m.structure.node_app[j]] += 1;
            }
        }
        let mut need = 0;
        for k in 0..l.n_apps {
            if self.lo[l.r(k)] == 1 {
                need += unplaced[k];
            }
        }
        if need > free {
            return None;
        }
        let mut cap = free - need;
        let mut total: i128 = 0;
        for k in 0..l.n_apps {
            let r = l.r(k);
            if self.lo[r] == 1 {
                total += coef.alpha[k];
            } else if self.hi[r] == 1 && unplaced[k] <= cap {
                cap -= unplaced[k];
                total += coef.alpha[k];
            }
        }
        for j in 0..l.n_nodes {
            if self.lo[l.m(j)] == 1 {
                total -= coef.realloc_weight;
            }
        }
        for &(node, app) in &m.structure.allocators {
            if self.lo[l.r(app)] == 1 {
                let best = (0..l.n_cus)
                    .filter(|&h| self.hi[l.xcn(h, node)] == 1)
                    .filter_map(|h| self.host_cost[h])
                    .min()?;
                total -= best as i128;
            }
        }
        Some(total)
    }

    fn leaf(&mut self) {
        let m = self.model;
        let mut x = vec![0i32; m.n_vars()];
        for v in 0..self.n {
            x[v] = self.lo[v] as i32;
        }
        if complete_flows(m, &mut x).is_err() {
            return;
        }
        let obj = m.objective(&x);
        if self.incumbent.as_ref().is_none_or(|(best, _)| obj > *best) {
            log::debug!("incumbent {obj} after {} nodes", self.nodes);
            self.incumbent = Some((obj, x));
        }
    }

    fn dfs(&mut self) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit
            || (self.nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.aborted = true;
            return;
        }
        let Some(bound) = self.bound() else { return };
        if let Some((best, _)) = &self.incumbent {
            if bound <= *best {
                return;
            }
        }
        let saved = self.cursor;
        while self.cursor < self.order.len() && self.lo[self.order[self.cursor].0] == self.hi[self.order[self.cursor].0]
        {
            self.cursor += 1;
        }
        if self.cursor == self.order.len() {
            self.leaf();
            self.cursor = saved;
            return;
        }
        let (v, first) = self.order[self.cursor];
        for val in [first, 1 - first] {
            let mark = self.trail.len();
            self.fix(v, val);
            if self.propagate() {
                self.dfs();
            }
            self.undo_to(mark);
            if self.aborted {
                break;
            }
        }
        self.cursor = saved;
    }

    pub(super) fn run(mut self) -> Solution {
        let m = self.model;
        let l = m.layout;
        // bounds fixed in the model, and allocator hosts that cannot serve
        // every active CU
        let mut root: Vec<(usize, i8)> = Vec::new();
        for v in 0..self.n {
            if m.ub[v] < 1 {
                root.push((v, 0));
            } else if m.lb[v] > 0 {
                root.push((v, 1));
            }
        }
        for &(node, _) in &m.structure.allocators {
            for h in 0..l.n_cus {
                if self.host_cost[h].is_none() {
                    root.push((l.xcn(h, node), 0));
                }
            }
        }
        let mut ok = true;
        for (v, val) in root {
            if self.lo[v] != self.hi[v] {
                self.fix(v, val);
            } else if self.lo[v] != val {
                ok = false;
            }
        }
        for r in 0..self.rows.len() {
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
        ok = ok && self.propagate();
        if ok {
            for i in 0..l.n_cus {
                self.usable[i] = (0..l.n_nodes).any(|j| self.hi[l.xcn(i, j)] == 1);
            }
            self.dfs();
        }
        log::debug!("search visited {} nodes", self.nodes);
        let status = if self.aborted {
            Status::TimedOut
        } else if self.incumbent.is_some() {
            Status::Optimal
        } else {
            Status::Infeasible
        };
        match self.incumbent {
            Some((objective, x)) => Solution { x, objective, status },
            None => Solution {
                x: Vec::new(),
                objective: 0,
                status,
            },
        }
    }
}
