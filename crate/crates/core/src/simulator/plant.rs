//! First-order fan model driven by a proportional controller.

use serde::Serialize;

use crate::scenario::PlantSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlantState {
    pub thrust: f64,
    pub reference: f64,
    pub gain_kp: f64,
    /// PWM duty cycle in [0, 1].
    pub command: f64,
    pub time_constant: f64,
    pub max_thrust: f64,
}

impl PlantState {
    pub fn new(spec: &PlantSpec) -> Self {
        Self {
            thrust: 0.0,
            reference: spec.reference,
            gain_kp: spec.gain_kp,
            command: 0.0,
            time_constant: spec.time_constant,
            max_thrust: spec.max_thrust,
        }
    }

    /// Output of one healthy controller replica.
    pub fn control_law(&self) -> f64 {
        (self.gain_kp * (self.reference - self.thrust)).clamp(0.0, 1.0)
    }
}

/// Advances the lag by `dt`. An absent command stops the fan.
pub fn plant_step(p: &mut PlantState, command: Option<f64>, dt: f64) {
    p.command = command.unwrap_or(0.0).clamp(0.0, 1.0);
    p.thrust += dt / p.time_constant * (p.command * p.max_thrust - p.thrust);
}
