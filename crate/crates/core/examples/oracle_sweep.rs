//! Cross-checks the branch-and-bound solver against exhaustive enumeration
//! for every fault set of up to two CUs on a 2x3 mesh.

use std::time::Instant;

use noc_realloc::appmodel::{AppRegistry, AppSpec};
use noc_realloc::ilp::BuildOptions;
use noc_realloc::platform::build_mesh;
use noc_realloc::solver::SolverConfig;
use noc_realloc::theorems::oracle_sweep;

fn main() -> noc_realloc::error::Result<()> {
    let g = build_mesh(2, 3, false)?;
    let reg = AppRegistry::new(vec![
        AppSpec::grid("a", 1, 1, 2),
        AppSpec::grid("b", 2, 1, 2),
        AppSpec::grid("alloc", 3, 1, 1).as_allocator(0),
    ])?;
    let t = Instant::now();
    let report = oracle_sweep(&g, &reg, BuildOptions::default(), &SolverConfig::default(), 2)?;
    println!(
        "{} fault sets in {:?}, {} mismatches",
        report.cases,
        t.elapsed(),
        report.mismatches.len()
    );
    for m in &report.mismatches {
        println!("  {:?}: {}", m.faults, m.reason);
    }
    Ok(())
}
