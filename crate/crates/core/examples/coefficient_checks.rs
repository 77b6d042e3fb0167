//! Objective coefficients of the demo and the symbolic checks on them, plus
//! a deliberately broken coefficient set with its witness.

use noc_realloc::ilp::{compute_coefficients, Coefficients};
use noc_realloc::scenario::Scenario;
use noc_realloc::theorems::{check_all, check_theorem_3};

fn main() -> noc_realloc::error::Result<()> {
    let s = Scenario::demo();
    let (g, reg) = (s.platform()?, s.registry()?);
    let c = compute_coefficients(&reg, &g)?;
    println!("beta = {}, realloc weight = {}", c.beta, c.realloc_weight);
    for (app, a) in reg.apps().iter().zip(&c.alpha) {
        println!("  alpha[{}] = {a}", app.name);
    }
    for r in check_all(&c, &reg) {
        println!("{:<12} {}", r.name, if r.holds { "holds" } else { "FAILS" });
    }
    let broken = Coefficients {
        alpha: vec![3, 2, 2],
        ..c
    };
    println!(
        "\nalpha = [3, 2, 2]: {}",
        serde_json::to_string(&check_theorem_3(&broken))?
    );
    Ok(())
}
