//! Closed-loop fan under three voted controller replicas: one corrupted
//! replica is masked, two divergent ones stop the fan until they recover.

use noc_realloc::scenario::Scenario;
use noc_realloc::simulator::{run_scenario, EventKind};

fn main() -> noc_realloc::error::Result<()> {
    let s = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/tmr.json"))?;
    let out = run_scenario(&s)?;
    for e in out
        .trace
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Fault | EventKind::Recover))
    {
        println!("t={:>3} {:?} {}", e.t, e.kind, e.payload);
    }
    println!("\n  t  thrust   command");
    for (t, thrust, cmd) in out.plant_log.iter().filter(|(t, _, _)| t % 5 == 0) {
        let bar = "#".repeat((thrust * 6.0).round() as usize);
        println!("{t:>3}  {thrust:6.3}   {cmd:5.3}  {bar}");
    }
    Ok(())
}
