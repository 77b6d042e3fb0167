//! Scenario files: platform, applications, options, fault schedule and
//! plant parameters, as JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::appmodel::{AppRegistry, AppSpec};
use crate::error::{Error, Result};
use crate::ilp::BuildOptions;
use crate::platform::{build_mesh, PlatformGraph};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformSpec {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub torus: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cu_types: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
    #[serde(default = "default_node_limit")]
    pub node_limit: u64,
}

fn default_timeout() -> u64 {
    SolverConfig::default().timeout_ms
}

fn default_node_limit() -> u64 {
    SolverConfig::default().node_limit
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            timeout_ms: default_timeout(),
            node_limit: default_node_limit(),
        }
    }
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_offset() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOptions {
    #[serde(default)]
    pub orientation: bool,
    #[serde(default)]
    pub types: bool,
    /// Accept the majority of present replicas instead of an absolute one.
    #[serde(default)]
    pub degraded_vote: bool,
    #[serde(default = "default_tolerance")]
    pub vote_tolerance: f64,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Last simulated tick; defaults to 20 ticks after the last fault event.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    /// Added to the output of a computationally faulty controller replica,
    /// scaled by its replica index plus one.
    #[serde(default = "default_offset")]
    pub corruption_offset: f64,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            orientation: false,
            types: false,
            degraded_vote: false,
            vote_tolerance: default_tolerance(),
            solver: SolverOptions::default(),
            horizon: None,
            corruption_offset: default_offset(),
        }
    }
}

impl ScenarioOptions {
    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            orientation: self.orientation,
            types: self.types,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            timeout_ms: self.solver.timeout_ms,
            node_limit: self.solver.node_limit,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    Crash,
    Computational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultAction {
    Inject,
    Recover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultEvent {
    pub t: u64,
    pub cu: usize,
    pub kind: FaultKind,
    pub action: FaultAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub reference: f64,
    pub gain_kp: f64,
    pub time_constant: f64,
    pub max_thrust: f64,
    pub dt: f64,
}

impl Default for PlantSpec {
    fn default() -> Self {
        Self {
            reference: 5.0,
            gain_kp: 0.5,
            time_constant: 0.5,
            max_thrust: 10.0,
            dt: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub platform: PlatformSpec,
    pub applications: Vec<AppSpec>,
    #[serde(default)]
    pub options: ScenarioOptions,
    #[serde(default)]
    pub faults: Vec<FaultEvent>,
    #[serde(default)]
    pub plant: PlantSpec,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.platform.rows * self.platform.cols;
        if n == 0 {
            return Err(Error::Scenario("platform must have at least one CU".into()));
        }
        if let Some(types) = &self.platform.cu_types {
            if types.len() != n {
                return Err(Error::Scenario(format!("{} CU types for {n} CUs", types.len())));
            }
        }
        for w in self.faults.windows(2) {
            if w[1].t < w[0].t {
                return Err(Error::Scenario(format!("fault times decrease at t = {}", w[1].t)));
            }
        }
        if let Some(e) = self.faults.iter().find(|e| e.cu >= n) {
            return Err(Error::Scenario(format!("fault on unknown CU {}", e.cu)));
        }
        let o = &self.options;
        if o.vote_tolerance.is_nan() || o.vote_tolerance < 0.0 || !o.corruption_offset.is_finite() {
            return Err(Error::Scenario(
                "vote tolerance and corruption offset must be finite, tolerance >= 0".into(),
            ));
        }
        if o.solver.timeout_ms == 0 || o.solver.node_limit == 0 {
            return Err(Error::Scenario("solver budgets must be positive".into()));
        }
        let p = &self.plant;
        if !(p.dt > 0.0 && p.time_constant > 0.0)
            || ![p.reference, p.gain_kp, p.max_thrust].iter().all(|v| v.is_finite())
        {
            return Err(Error::Scenario(
                "plant needs dt > 0, time_constant > 0 and finite parameters".into(),
            ));
        }
        self.registry()?;
        self.platform()?;
        Ok(())
    }

    pub fn platform(&self) -> Result<PlatformGraph> {
        let g = build_mesh(self.platform.rows, self.platform.cols, self.platform.torus)?;
        match &self.platform.cu_types {
            Some(t) => g.with_cu_types(t.clone()),
            None => Ok(g),
        }
    }

    pub fn registry(&self) -> Result<AppRegistry> {
        AppRegistry::new(self.applications.clone())
    }

    /// Tick of the last scheduled event plus a settling margin, unless set.
    pub fn horizon(&self) -> u64 {
        self.options
            .horizon
            .unwrap_or_else(|| self.faults.last().map_or(0, |e| e.t) + 20)
    }

    /// The 4×4 platform with three controllers, three allocator replicas and
    /// a dummy application, without faults.
    pub fn demo() -> Self {
        let mut applications = Vec::new();
        for i in 1..=3 {
            applications.push(AppSpec::grid(&format!("controller_{i}"), i, 1, 2).as_controller());
        }
        for i in 1..=3 {
            applications.push(AppSpec::grid(&format!("allocator_{i}"), i + 3, 1, 1).as_allocator(0));
        }
        applications.push(AppSpec::grid("dummy", 7, 1, 2));
        Self {
            platform: PlatformSpec {
                rows: 4,
                cols: 4,
                torus: false,
                cu_types: None,
            },
            applications,
            options: ScenarioOptions::default(),
            faults: Vec::new(),
            plant: PlantSpec::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_round_trips() {
        let s = Scenario::demo();
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
        let reg = s.registry().unwrap();
        assert_eq!((reg.n_apps(), reg.n_nodes(), reg.n_realloc()), (7, 11, 3));
    }

    #[test]
    fn schema_errors() {
        assert!(Scenario::from_json("{").is_err());
        assert!(Scenario::from_json(r#"{"platform":{"rows":0,"cols":2},"applications":[]}"#).is_err());
        let mut s = Scenario::demo();
        s.faults = vec![
            FaultEvent {
                t: 5,
                cu: 1,
                kind: FaultKind::Crash,
                action: FaultAction::Inject,
            },
            FaultEvent {
                t: 3,
                cu: 1,
                kind: FaultKind::Crash,
                action: FaultAction::Recover,
            },
        ];
        assert!(s.validate().is_err());
        let minimal = r#"{"platform":{"rows":1,"cols":1},"applications":[{"name":"a","priority":1,"shape":{"grid":{"rows":1,"cols":1}}}]}"#;
        let s = Scenario::from_json(minimal).unwrap();
        assert_eq!(s.horizon(), 20);
    }
}
