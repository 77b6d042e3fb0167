//! Broadcast routes of an allocator: the unit flows from its host to every
//! reachable healthy CU, compared with BFS distances.

use noc_realloc::platform::{build_mesh, healthy_subgraph, FaultState, ShortestPathTree};
use noc_realloc::solver::solve_flows;

fn main() -> noc_realloc::error::Result<()> {
    let g = build_mesh(4, 4, false)?;
    let f = FaultState::with_faulty(16, &[5, 6, 9]);
    let h = healthy_subgraph(&g, &f)?;
    let active: Vec<bool> = (0..16).map(|i| !f.faulty[i] && h.degree[i] > 0).collect();
    let host = 0;
    let flows = solve_flows(&g, &f, &active, &[Some(host)])?;
    let tree = ShortestPathTree::build(&g, &f, host);
    println!(
        "allocator on CU {host}, faulty {:?}, total cost {}",
        f.faulty_cus(),
        flows.cost
    );
    for (sink, col) in flows.columns[0].iter().enumerate() {
        if !active[sink] {
            continue;
        }
        let route: Vec<String> = tree
            .path_to(sink)
            .unwrap_or_default()
            .iter()
            .map(|(_, from, to)| format!("{from}->{to}"))
            .collect();
        println!(
            "  sink {sink:>2}: {} links, bfs {:?}  {}",
            col.len(),
            tree.dist[sink],
            route.join(" ")
        );
    }
    Ok(())
}
