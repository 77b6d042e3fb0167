//! Solves the 4x4 demo platform with three TMR controllers, three allocator
//! replicas and a low-priority dummy, then crashes two CUs and reallocates.

use std::time::Instant;

use noc_realloc::ilp::build_model;
use noc_realloc::platform::FaultState;
use noc_realloc::scenario::Scenario;
use noc_realloc::solver::{check_feasible, solve};

fn main() -> noc_realloc::error::Result<()> {
    let s = Scenario::demo();
    let g = s.platform()?;
    let reg = s.registry()?;
    let cfg = s.options.solver_config();

    let healthy = FaultState::healthy(g.n_cus());
    let model = build_model(&g, &reg, &healthy, None, s.options.build_options())?;
    let t = Instant::now();
    let sol = solve(&model, &cfg);
    println!(
        "{} variables, {} rows, {:?} in {:?}, objective {}",
        model.n_vars(),
        model.rows.len(),
        sol.status,
        t.elapsed(),
        sol.objective
    );
    let first = sol.allocation(&model).expect("demo is feasible");
    print!("{}", first.render_grid(&g, &reg, &healthy));

    let hit: Vec<usize> = [first.host_of(0), first.host_of(6)].into_iter().flatten().collect();
    let faults = FaultState::with_faulty(g.n_cus(), &hit);
    let model = build_model(&g, &reg, &faults, Some(&first), s.options.build_options())?;
    let sol = solve(&model, &cfg);
    println!("\nafter crashing CUs {hit:?}: objective {}", sol.objective);
    let second = sol.allocation(&model).expect("still feasible");
    print!("{}", second.render_grid(&g, &reg, &faults));
    let moved = (0..reg.n_nodes())
        .filter(|&j| first.host_of(j).is_some() && second.host_of(j).is_some() && first.host_of(j) != second.host_of(j))
        .count();
    println!(
        "nodes moved: {moved}, violations: {}",
        check_feasible(&model, &sol.x).len()
    );
    Ok(())
}
