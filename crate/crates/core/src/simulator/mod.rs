//! Discrete-event simulation of the decentralized platform: replicated
//! allocators solving the same program, majority votes on allocations and
//! controller outputs, fault injection and a fan plant under TMR control.

mod plant;
mod vote;

use std::collections::VecDeque;
use std::fmt::Write as _;

use log::{debug, info};
use serde::Serialize;
use serde_json::{json, Value};

use crate::allocation::Allocation;
use crate::appmodel::AppRegistry;
use crate::error::{Error, Result};
use crate::ilp::{build_model, BuildOptions};
use crate::platform::{FaultState, PlatformGraph};
use crate::scenario::{FaultAction, FaultEvent, FaultKind, Scenario};
use crate::solver::{check_feasible, solve, SolverConfig, Status};

pub use plant::{plant_step, PlantState};
pub use vote::{majority_vote, majority_vote_slots, quorum, vote_allocations, vote_by, VoteResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Fault,
    Recover,
    Solve,
    Vote,
    Apply,
    Drop,
    Realloc,
    Controller,
    Plant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub t: u64,
    pub kind: EventKind,
    pub payload: Value,
}

/// An allocation that was put in force, with the fault state it was
/// computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct AppliedRecord {
    pub t: u64,
    pub faulty: Vec<bool>,
    pub previous: Option<Allocation>,
    pub x: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub clock: u64,
    pub fault: FaultState,
    /// CUs blamed by a vote; excluded from allocation until their
    /// computational fault is cleared.
    pub suspected: Vec<bool>,
    pub x_old: Option<Allocation>,
    pub app_running: Vec<bool>,
    /// Last solution vector computed by each allocator replica.
    pub replica_outputs: Vec<Option<Vec<i32>>>,
    pub plant: PlantState,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SimStats {
    pub events: usize,
    pub solves: usize,
    pub applies: usize,
    pub drops: usize,
    pub reallocations: usize,
    pub failed_votes: usize,
    pub timeouts: usize,
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub trace: Vec<TraceEvent>,
    pub final_allocation: Option<Allocation>,
    pub final_running: Vec<bool>,
    pub applied: Vec<AppliedRecord>,
    pub plant_log: Vec<(u64, f64, f64)>,
    pub stats: SimStats,
}

impl SimOutcome {
    pub fn trace_jsonl(&self) -> String {
        to_jsonl(&self.trace)
    }

    pub fn plant_csv(&self) -> String {
        plant_csv(&self.plant_log)
    }
}

pub fn to_jsonl(trace: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in trace {
        out.push_str(&serde_json::to_string(e).unwrap_or_default());
        out.push('\n');
    }
    out
}

pub fn plant_csv(log: &[(u64, f64, f64)]) -> String {
    let mut out = String::from("t,thrust,command\n");
    for (t, thrust, cmd) in log {
        let _ = writeln!(out, "{t},{thrust},{cmd}");
    }
    out
}

/// Output of a controller replica on a corrupted host.
fn corrupt_value(u: f64, offset: f64, replica: usize) -> f64 {
    u + offset * (replica as f64 + 1.0)
}

/// Output of an allocator replica on a corrupted host.
fn corrupt_solution(mut x: Vec<i32>) -> Vec<i32> {
    if let Some(v) = x.first_mut() {
        *v = 1 - *v;
    }
    x
}

pub struct Simulator {
    g: PlatformGraph,
    reg: AppRegistry,
    options: BuildOptions,
    cfg: SolverConfig,
    degraded: bool,
    tolerance: f64,
    offset: f64,
    dt: f64,
    state: SimState,
    queue: VecDeque<FaultEvent>,
    /// Voted solution and the fault set it was computed for.
    pending: Option<(Vec<i32>, FaultState)>,
    needs_solve: bool,
    applied: Vec<AppliedRecord>,
    plant_log: Vec<(u64, f64, f64)>,
    stats: SimStats,
}

impl Simulator {
    /// Builds the engine and computes the initial allocation at `t = 0`.
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let g = scenario.platform()?;
        let reg = scenario.registry()?;
        let n = g.n_cus();
        let state = SimState {
            clock: 0,
            fault: FaultState::healthy(n),
            suspected: vec![false; n],
            x_old: None,
            app_running: vec![false; reg.n_apps()],
            replica_outputs: vec![None; reg.n_realloc().max(1)],
            plant: PlantState::new(&scenario.plant),
            trace: Vec::new(),
        };
        let o = &scenario.options;
        let mut sim = Self {
            g,
            reg,
            options: o.build_options(),
            cfg: o.solver_config(),
            degraded: o.degraded_vote,
            tolerance: o.vote_tolerance,
            offset: o.corruption_offset,
            dt: scenario.plant.dt,
            state,
            queue: scenario.faults.iter().copied().collect(),
            pending: None,
            needs_solve: false,
            applied: Vec::new(),
            plant_log: Vec::new(),
            stats: SimStats::default(),
        };
        sim.bootstrap()?;
        Ok(sim)
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn platform(&self) -> &PlatformGraph {
        &self.g
    }

    pub fn registry(&self) -> &AppRegistry {
        &self.reg
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.state.trace
    }

    pub fn allocation(&self) -> Option<&Allocation> {
        self.state.x_old.as_ref()
    }

    pub fn applied(&self) -> &[AppliedRecord] {
        &self.applied
    }

    pub fn stats(&self) -> SimStats {
        self.stats
    }

    /// True while a computed allocation waits to be applied or a solve is due.
    pub fn busy(&self) -> bool {
        self.pending.is_some() || self.needs_solve
    }

    /// Queues an event for the next tick.
    pub fn inject(&mut self, cu: usize, kind: FaultKind, action: FaultAction) -> Result<()> {
        if cu >= self.g.n_cus() {
            return Err(Error::Scenario(format!("unknown CU {cu}")));
        }
        let t = self.state.clock + 1;
        let at = self.queue.iter().position(|e| e.t > t).unwrap_or(self.queue.len());
        self.queue.insert(at, FaultEvent { t, cu, kind, action });
        Ok(())
    }

    pub fn pending_events(&self) -> usize {
        self.queue.len()
    }

    fn emit(&mut self, kind: EventKind, payload: Value) {
        self.stats.events += 1;
        debug!("t={} {:?} {}", self.state.clock, kind, payload);
        self.state.trace.push(TraceEvent {
            t: self.state.clock,
            kind,
            payload,
        });
    }

    fn bootstrap(&mut self) -> Result<()> {
        self.solve_round()?;
        if let Some((x, f)) = self.pending.take() {
            self.apply(x, f)?;
        }
        Ok(())
    }

    /// Fault set seen by the allocators: crashed or blamed CUs.
    fn believed_faults(&self) -> FaultState {
        let mut f = FaultState::healthy(self.g.n_cus());
        for i in 0..self.g.n_cus() {
            f.faulty[i] = self.state.fault.faulty[i] || self.state.suspected[i];
        }
        f
    }

    fn app_hosts(&self, app: usize) -> Vec<usize> {
        match &self.state.x_old {
            Some(a) => self.reg.app_nodes(app).filter_map(|n| a.host_of(n)).collect(),
            None => Vec::new(),
        }
    }

    /// Running with no crashed host.
    fn replica_alive(&self, app: usize) -> bool {
        let hosts = self.app_hosts(app);
        self.state.app_running[app] && !hosts.is_empty() && hosts.iter().all(|&c| !self.state.fault.faulty[c])
    }

    fn replica_corrupted(&self, app: usize) -> bool {
        self.app_hosts(app).iter().any(|&c| self.state.fault.comp_fault[c])
    }

    fn blame(&mut self, apps: &[usize]) {
        for &app in apps {
            for cu in self.app_hosts(app) {
                if !self.state.suspected[cu] {
                    info!("t={} CU {cu} blamed by vote", self.state.clock);
                    self.state.suspected[cu] = true;
                    self.needs_solve = true;
                }
            }
        }
    }

    fn solve_round(&mut self) -> Result<()> {
        self.needs_solve = false;
        let f = self.believed_faults();
        let bootstrap = self.state.x_old.is_none() && self.applied.is_empty();
        let model = build_model(&self.g, &self.reg, &f, self.state.x_old.as_ref(), self.options)?;
        // without allocator apps a single external solver stands in
        let central = self.reg.n_realloc() == 0;
        let n = self.reg.n_realloc().max(1);
        let mut outputs: Vec<Option<Vec<i32>>> = vec![None; n];
        for (k, out) in outputs.iter_mut().enumerate() {
            let app = (!central).then(|| self.reg.alloc_app(k));
            if !bootstrap && app.is_some_and(|a| !self.replica_alive(a)) {
                continue;
            }
            let sol = solve(&model, &self.cfg);
            self.stats.solves += 1;
            let corrupted = !bootstrap && app.is_some_and(|a| self.replica_corrupted(a));
            self.emit(
                EventKind::Solve,
                json!({
                    "replica": k,
                    "status": sol.status,
                    "objective": sol.objective.to_string(),
                    "corrupted": corrupted,
                }),
            );
            if sol.status == Status::TimedOut {
                self.stats.timeouts += 1;
            }
            if sol.status != Status::Optimal {
                continue;
            }
            let x = if corrupted { corrupt_solution(sol.x) } else { sol.x };
            *out = Some(x);
        }
        let result = vote_allocations(&outputs, self.degraded);
        self.state.replica_outputs = outputs;
        let minority: Vec<usize> = if central {
            Vec::new()
        } else {
            result.minority.iter().map(|&k| self.reg.alloc_app(k)).collect()
        };
        self.emit(
            EventKind::Vote,
            json!({
                "voter": "allocation",
                "quorum_met": result.quorum_met,
                "minority": result.minority,
                "present": self.state.replica_outputs.iter().filter(|o| o.is_some()).count(),
            }),
        );
        match result.output {
            Some(x) => {
                self.pending = Some((x, f));
                self.blame(&minority);
            }
            None => self.stats.failed_votes += 1,
        }
        Ok(())
    }

    fn apply(&mut self, x: Vec<i32>, f: FaultState) -> Result<()> {
        let model = build_model(&self.g, &self.reg, &f, self.state.x_old.as_ref(), self.options)?;
        let violations = check_feasible(&model, &x);
        let alloc = Allocation::from_solution(&x, &model.layout);
        let running: Vec<bool> = (0..self.reg.n_apps()).map(|k| x[model.layout.r(k)] == 1).collect();
        self.emit(
            EventKind::Apply,
            json!({
                "placement": alloc.placement,
                "running": running,
                "objective": model.objective(&x).to_string(),
                "violations": violations.len(),
            }),
        );
        self.stats.applies += 1;
        for k in 0..self.reg.n_apps() {
            if self.state.app_running[k] && !running[k] {
                self.stats.drops += 1;
                self.emit(EventKind::Drop, json!({ "app": self.reg.apps()[k].name }));
            }
        }
        if let Some(prev) = &self.state.x_old {
            let moves: Vec<(usize, usize, usize)> = (0..alloc.n_nodes())
                .filter_map(|j| match (prev.host_of(j), alloc.host_of(j)) {
                    (Some(a), Some(b)) if a != b => Some((j, a, b)),
                    _ => None,
                })
                .collect();
            for (node, from, to) in moves {
                self.stats.reallocations += 1;
                let app = &self.reg.apps()[self.reg.node_app(node)].name;
                self.emit(
                    EventKind::Realloc,
                    json!({ "node": node, "app": app, "from": from, "to": to }),
                );
            }
        }
        self.applied.push(AppliedRecord {
            t: self.state.clock,
            faulty: f.faulty.clone(),
            previous: self.state.x_old.clone(),
            x,
        });
        self.state.x_old = Some(alloc);
        self.state.app_running = running;
        Ok(())
    }

    fn handle(&mut self, e: FaultEvent) {
        let cu = e.cu;
        let s = &mut self.state;
        let kind = match e.action {
            FaultAction::Inject => EventKind::Fault,
            FaultAction::Recover => EventKind::Recover,
        };
        match (e.kind, e.action) {
            (FaultKind::Crash, FaultAction::Inject) => {
                s.fault.faulty[cu] = true;
                self.needs_solve = true;
            }
            (FaultKind::Crash, FaultAction::Recover) => {
                s.fault.faulty[cu] = false;
                self.needs_solve = true;
            }
            (FaultKind::Computational, FaultAction::Inject) => s.fault.comp_fault[cu] = true,
            (FaultKind::Computational, FaultAction::Recover) => {
                s.fault.comp_fault[cu] = false;
                if s.suspected[cu] {
                    s.suspected[cu] = false;
                    self.needs_solve = true;
                }
            }
        }
        info!("t={} {:?} {:?} on CU {cu}", self.state.clock, e.kind, e.action);
        self.emit(kind, json!({ "cu": cu, "fault": e.kind }));
    }

    fn controller_step(&mut self) -> Option<f64> {
        let u = self.state.plant.control_law();
        let apps = self.reg.controller_apps().to_vec();
        let values: Vec<Option<f64>> = apps
            .iter()
            .enumerate()
            .map(|(idx, &app)| {
                self.replica_alive(app).then(|| {
                    if self.replica_corrupted(app) {
                        corrupt_value(u, self.offset, idx)
                    } else {
                        u
                    }
                })
            })
            .collect();
        if values.is_empty() {
            return None;
        }
        let result = majority_vote_slots(&values, self.tolerance);
        if result.quorum_met {
            let blamed: Vec<usize> = result.minority.iter().map(|&i| apps[i]).collect();
            self.blame(&blamed);
        }
        self.emit(
            EventKind::Controller,
            json!({
                "outputs": values,
                "command": result.output,
                "quorum_met": result.quorum_met,
                "minority": result.minority,
            }),
        );
        result.output
    }

    /// Advances one tick.
    pub fn step(&mut self) -> Result<()> {
        self.state.clock += 1;
        let t = self.state.clock;
        if let Some((x, f)) = self.pending.take() {
            self.apply(x, f)?;
        }
        while self.queue.front().is_some_and(|e| e.t <= t) {
            let e = self.queue.pop_front().expect("front checked");
            self.handle(e);
        }
        let command = self.controller_step();
        plant_step(&mut self.state.plant, command, self.dt);
        let p = self.state.plant;
        self.plant_log.push((t, p.thrust, p.command));
        self.emit(EventKind::Plant, json!({ "thrust": p.thrust, "command": p.command }));
        if self.needs_solve {
            self.solve_round()?;
        }
        Ok(())
    }

    /// Steps until no allocation work is outstanding, at most `max` ticks.
    pub fn settle(&mut self, max: u64) -> Result<()> {
        for _ in 0..max {
            if !self.busy() {
                break;
            }
            self.step()?;
        }
        Ok(())
    }

    pub fn into_outcome(self) -> SimOutcome {
        SimOutcome {
            trace: self.state.trace,
            final_allocation: self.state.x_old,
            final_running: self.state.app_running,
            applied: self.applied,
            plant_log: self.plant_log,
            stats: self.stats,
        }
    }

    /// Text grid of the current allocation.
    pub fn render(&self) -> String {
        let f = self.believed_faults();
        match &self.state.x_old {
            Some(a) => a.render_grid(&self.g, &self.reg, &f),
            None => Allocation::empty(self.g.n_cus(), self.reg.n_nodes()).render_grid(&self.g, &self.reg, &f),
        }
    }
}

/// Runs a scenario to its horizon.
pub fn run_scenario(scenario: &Scenario) -> Result<SimOutcome> {
    let mut sim = Simulator::new(scenario)?;
    for _ in 0..scenario.horizon() {
        sim.step()?;
    }
    Ok(sim.into_outcome())
}

/// Re-checks every applied allocation against a freshly built model of the
/// fault state it was applied under. Returns `(t, violation count)` for the
/// failing ones.
pub fn audit_applied(
    g: &PlatformGraph,
    reg: &AppRegistry,
    options: BuildOptions,
    applied: &[AppliedRecord],
) -> Result<Vec<(u64, usize)>> {
    let mut bad = Vec::new();
    for rec in applied {
        let faulty: Vec<usize> = (0..rec.faulty.len()).filter(|&i| rec.faulty[i]).collect();
        let f = FaultState::with_faulty(g.n_cus(), &faulty);
        let model = build_model(g, reg, &f, rec.previous.as_ref(), options)?;
        let v = check_feasible(&model, &rec.x);
        if !v.is_empty() {
            bad.push((rec.t, v.len()));
        }
    }
    Ok(bad)
}
