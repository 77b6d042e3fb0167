//! Writes the LP text of a small model and the DOT graph of its platform to
//! standard output.

use noc_realloc::appmodel::{AppRegistry, AppSpec};
use noc_realloc::ilp::{build_model, BuildOptions};
use noc_realloc::platform::{build_mesh, FaultState};

fn main() -> noc_realloc::error::Result<()> {
    let g = build_mesh(1, 2, false)?;
    let reg = AppRegistry::new(vec![AppSpec::grid("a", 1, 1, 2), AppSpec::grid("b", 2, 1, 1)])?;
    let f = FaultState::healthy(2);
    let model = build_model(&g, &reg, &f, None, BuildOptions::default())?;
    print!("{}", model.to_lp_string());
    println!();
    print!("{}", g.to_dot(Some(&f)));
    Ok(())
}
