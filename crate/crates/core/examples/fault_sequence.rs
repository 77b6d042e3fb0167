//! Replays a scenario file (default: the demo fault sequence) and prints the
//! allocation grid every time it changes.

use noc_realloc::scenario::Scenario;
use noc_realloc::simulator::Simulator;

fn main() -> noc_realloc::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/demo.json").to_string());
    let s = Scenario::load(&path)?;
    let mut sim = Simulator::new(&s)?;
    println!("t = 0\n{}", sim.render());
    let mut last = sim.render();
    for _ in 0..s.horizon() {
        sim.step()?;
        let now = sim.render();
        if now != last {
            println!("t = {}\n{now}", sim.state().clock);
            last = now;
        }
    }
    println!("{:?}", sim.stats());
    Ok(())
}
