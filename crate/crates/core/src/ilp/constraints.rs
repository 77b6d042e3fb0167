//! Objective vector and constraint families.

use crate::allocation::Allocation;
use crate::appmodel::AppRegistry;
use crate::error::{Error, Result};
use crate::platform::{FaultState, HealthySubgraph, PlatformGraph};

use super::{BuildOptions, Coefficients, ModelBuilder, RowTag, Sense, VarLayout};

/// `c[r_k] = alpha_k`, `c[M_j] = -(beta+1)`, `c[X̂] = -1`, zero elsewhere.
pub fn build_objective(coef: &Coefficients, layout: &VarLayout) -> Vec<i128> {
    let mut c = vec![0i128; layout.n_vars()];
    for (k, &a) in coef.alpha.iter().enumerate().take(layout.n_apps) {
        c[layout.r(k)] = a;
    }
    for j in 0..layout.n_nodes {
        c[layout.m(j)] = -coef.realloc_weight;
    }
    for v in layout.n_primary()..layout.n_vars() {
        c[v] = -1;
    }
    c
}

/// Capacity of CUs and paths, and the coupling of node/link assignment to
/// the running flag of their application.
pub fn add_partitioning_constraints(b: &mut ModelBuilder, reg: &AppRegistry, g: &PlatformGraph) {
    let l = b.layout;
    for i in 0..g.n_cus() {
        let terms = (0..l.n_nodes).map(|j| (l.xcn(i, j), 1)).collect();
        b.push(RowTag::CuCapacity { cu: i }, Sense::Le, terms, 1);
    }
    for j in 0..l.n_nodes {
        let mut terms: Vec<_> = (0..l.n_cus).map(|i| (l.xcn(i, j), 1)).collect();
        terms.push((l.r(reg.node_app(j)), -1));
        b.push(RowTag::NodeAssign { node: j }, Sense::Eq, terms, 0);
    }
    for p in 0..l.n_paths {
        let terms = (0..l.n_links).map(|k| (l.xpl(p, k), 1)).collect();
        b.push(RowTag::PathCapacity { path: p }, Sense::Le, terms, 1);
    }
    for k in 0..l.n_links {
        let mut terms: Vec<_> = (0..l.n_paths).map(|p| (l.xpl(p, k), 1)).collect();
        terms.push((l.r(reg.link_app(k)), -1));
        b.push(RowTag::LinkAssign { link: k }, Sense::Eq, terms, 0);
    }
}

/// `X^{CUs→nodes} H = Ĝ X^{paths→links}`, one row per (CU, link): a CU
/// hosting an endpoint of a link must carry that link on an incident path.
pub fn add_compliance_constraints(b: &mut ModelBuilder, reg: &AppRegistry, g: &PlatformGraph) -> Result<()> {
    let l = b.layout;
    let h = reg.h();
    let endpoints: Vec<Vec<usize>> = (0..l.n_links)
        .map(|k| (0..l.n_nodes).filter(|&n| h[[n, k]] != 0).collect())
        .collect();
    if let Some(k) = endpoints.iter().position(|e| e.len() != 2) {
        return Err(Error::Model(format!("application link {k} does not join two nodes")));
    }
    for i in 0..g.n_cus() {
        let incident: Vec<usize> = g.neighbors(i).into_iter().map(|(_, p)| p).collect();
        for (k, ends) in endpoints.iter().enumerate() {
            let mut terms: Vec<_> = ends.iter().map(|&n| (l.xcn(i, n), 1)).collect();
            terms.extend(incident.iter().map(|&p| (l.xpl(p, k), -1)));
            b.push(RowTag::Compliance { cu: i, link: k }, Sense::Eq, terms, 0);
        }
    }
    Ok(())
}

/// For every node placed in `previous`: stay, move (M = 1) or be dropped.
pub fn add_reallocation_constraints(
    b: &mut ModelBuilder,
    reg: &AppRegistry,
    previous: Option<&Allocation>,
) -> Result<()> {
    let Some(prev) = previous else { return Ok(()) };
    let l = b.layout;
    prev.validate(l.n_cus, l.n_nodes)?;
    for (j, host) in prev.placement.iter().enumerate() {
        if let Some(i) = *host {
            let terms = vec![(l.r(reg.node_app(j)), -1), (l.m(j), 1), (l.xcn(i, j), 1)];
            b.push(RowTag::Realloc { cu: i, node: j }, Sense::Eq, terms, 0);
        }
    }
    Ok(())
}

/// Empties faulty CUs and healthy CUs cut off by faults, and forbids any
/// flow over a path touching a faulty CU.
pub fn add_fault_constraints(b: &mut ModelBuilder, g: &PlatformGraph, f: &FaultState, healthy: &HealthySubgraph) {
    let l = b.layout;
    for i in 0..g.n_cus() {
        let tag = if f.faulty[i] {
            RowTag::Fault { cu: i }
        } else if healthy.is_isolated(i) {
            RowTag::Isolated { cu: i }
        } else {
            continue;
        };
        let terms = (0..l.n_nodes).map(|j| (l.xcn(i, j), 1)).collect();
        b.push(tag, Sense::Eq, terms, 0);
    }
    for (p, &(t, h)) in g.edges().iter().enumerate() {
        if f.faulty[t] || f.faulty[h] {
            for k in 0..l.n_realloc {
                for j in 0..l.n_cus {
                    b.fix_zero(l.xcomm(k, p, j));
                }
            }
        }
    }
}

/// Which CUs take part in allocator communication under a fault state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommRoles {
    /// Healthy, linked to at least one healthy neighbor, and in a healthy
    /// component where some allocator could run. Only these CUs source or
    /// sink allocator traffic.
    pub active: Vec<bool>,
}

pub fn comm_roles(
    g: &PlatformGraph,
    reg: &AppRegistry,
    f: &FaultState,
    healthy: &HealthySubgraph,
    options: BuildOptions,
) -> CommRoles {
    let can_host = |cu: usize| {
        !options.types || (0..reg.n_realloc()).any(|k| g.cu_types()[cu] == reg.node_type(reg.node_of_alloc(k)))
    };
    let served: Vec<bool> = healthy
        .components
        .iter()
        .map(|members| members.iter().any(|&cu| can_host(cu)))
        .collect();
    let active = (0..g.n_cus())
        .map(|i| {
            !f.faulty[i] && g.degree(i) > 0 && healthy.degree[i] > 0 && healthy.component[i].is_some_and(|c| served[c])
        })
        .collect();
    CommRoles { active }
}

/// `G X^{Comm,k} = S^k`: a unit flow from allocator `k`'s host to every
/// active CU. The demand is scaled by the allocator's running flag so a
/// dropped allocator owes no traffic.
pub fn add_comm_constraints(b: &mut ModelBuilder, reg: &AppRegistry, g: &PlatformGraph, roles: &CommRoles) {
    let l = b.layout;
    let incident: Vec<Vec<(usize, i64)>> = (0..g.n_cus())
        .map(|i| {
            g.edges()
                .iter()
                .enumerate()
                .filter_map(|(p, &(t, h))| {
                    if t == i {
                        Some((p, -1))
                    } else if h == i {
                        Some((p, 1))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..l.n_realloc {
        let node = reg.node_of_alloc(k);
        let r = l.r(reg.alloc_app(k));
        for j in 0..l.n_cus {
            let demand = roles.active[j];
            for i in 0..l.n_cus {
                let mut terms: Vec<_> = incident[i].iter().map(|&(p, s)| (l.xcomm(k, p, j), s)).collect();
                if demand && roles.active[i] {
                    terms.push((l.xcn(i, node), 1));
                    if i == j {
                        terms.push((r, -1));
                    }
                }
                if !terms.is_empty() {
                    b.push(
                        RowTag::Flow {
                            alloc: k,
                            cu: i,
                            sink: j,
                        },
                        Sense::Eq,
                        terms,
                        0,
                    );
                }
            }
        }
    }
}

fn right_of(g: &PlatformGraph, cu: usize) -> Option<usize> {
    let (row, col) = g.position(cu);
    if col + 1 < g.cols() {
        Some(cu + 1)
    } else if g.is_torus() && g.cols() > 1 {
        Some(row * g.cols())
    } else {
        None
    }
}

fn left_of(g: &PlatformGraph, cu: usize) -> Option<usize> {
    let (row, col) = g.position(cu);
    if col > 0 {
        Some(cu - 1)
    } else if g.is_torus() && g.cols() > 1 {
        Some(row * g.cols() + g.cols() - 1)
    } else {
        None
    }
}

fn up_of(g: &PlatformGraph, cu: usize) -> Option<usize> {
    let (row, col) = g.position(cu);
    if row + 1 < g.rows() {
        Some(cu + g.n_row())
    } else if g.is_torus() && g.rows() > 1 {
        Some(col)
    } else {
        None
    }
}

fn down_of(g: &PlatformGraph, cu: usize) -> Option<usize> {
    let (row, col) = g.position(cu);
    if row > 0 {
        Some(cu - g.n_row())
    } else if g.is_torus() && g.rows() > 1 {
        Some((g.rows() - 1) * g.cols() + col)
    } else {
        None
    }
}

/// Keeps grid applications in their compiled shape: the node to the right
/// of node `n` sits on the CU right of `n`'s host, the node one grid row
/// further sits one mesh row up. Anchors whose neighbor would leave the mesh
/// are fixed to zero.
pub fn add_orientation_constraints(b: &mut ModelBuilder, reg: &AppRegistry, g: &PlatformGraph) {
    let l = b.layout;
    for (k, graph) in reg.graphs().iter().enumerate() {
        let Some((ar, ac)) = graph.grid else { continue };
        let base = reg.topleft_node(k);
        for y in 0..ar {
            for x in 0..ac {
                let n = base + y * ac + x;
                if x + 1 < ac {
                    for i in 0..g.n_cus() {
                        match right_of(g, i) {
                            Some(ri) => b.push(
                                RowTag::OrientRight { app: k, cu: i, node: n },
                                Sense::Eq,
                                vec![(l.xcn(i, n), 1), (l.xcn(ri, n + 1), -1)],
                                0,
                            ),
                            None => b.fix_zero(l.xcn(i, n)),
                        }
                        if left_of(g, i).is_none() {
                            b.fix_zero(l.xcn(i, n + 1));
                        }
                    }
                }
                if y + 1 < ar {
                    for i in 0..g.n_cus() {
                        match up_of(g, i) {
                            Some(ui) => b.push(
                                RowTag::OrientUp { app: k, cu: i, node: n },
                                Sense::Eq,
                                vec![(l.xcn(i, n), 1), (l.xcn(ui, n + ac), -1)],
                                0,
                            ),
                            None => b.fix_zero(l.xcn(i, n)),
                        }
                        if down_of(g, i).is_none() {
                            b.fix_zero(l.xcn(i, n + ac));
                        }
                    }
                }
            }
        }
    }
}

/// A node may only run on a CU of its own type.
pub fn add_type_constraints(b: &mut ModelBuilder, reg: &AppRegistry, g: &PlatformGraph) {
    let l = b.layout;
    for j in 0..l.n_nodes {
        for i in 0..l.n_cus {
            if g.cu_types()[i] != reg.node_type(j) {
                b.fix_zero(l.xcn(i, j));
            }
        }
    }
}

/// `X <= X̂` and `-X <= X̂` for every communication variable.
pub fn add_abs_linearization(b: &mut ModelBuilder) {
    let l = b.layout;
    for k in 0..l.n_realloc {
        for j in 0..l.n_cus {
            for p in 0..l.n_paths {
                let (x, h) = (l.xcomm(k, p, j), l.xhat(k, p, j));
                b.push(
                    RowTag::AbsPos {
                        alloc: k,
                        path: p,
                        cu: j,
                    },
                    Sense::Le,
                    vec![(x, 1), (h, -1)],
                    0,
                );
                b.push(
                    RowTag::AbsNeg {
                        alloc: k,
                        path: p,
                        cu: j,
                    },
                    Sense::Le,
                    vec![(x, -1), (h, -1)],
                    0,
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, IlpModel};
    use super::*;
    use crate::appmodel::AppSpec;
    use crate::platform::{build_mesh, healthy_subgraph};

    fn model(g: &PlatformGraph, specs: Vec<AppSpec>, f: &FaultState, opts: BuildOptions) -> IlpModel {
        build_model(g, &AppRegistry::new(specs).unwrap(), f, None, opts).unwrap()
    }

    fn satisfies(m: &IlpModel, x: &[i32]) -> bool {
        x.iter()
            .zip(m.lb.iter().zip(&m.ub))
            .all(|(v, (lo, hi))| lo <= v && v <= hi)
            && m.rows.iter().all(|r| r.is_satisfied(x))
    }

    /// Every feasible 0/1 point of a model without flow variables, with no
    /// reallocation flag set.
    fn enumerate(m: &IlpModel) -> Vec<Vec<i32>> {
        enumerate_with_moves(m)
            .into_iter()
            .filter(|x| (0..m.layout.n_nodes).all(|j| x[m.layout.m(j)] == 0))
            .collect()
    }

    fn enumerate_with_moves(m: &IlpModel) -> Vec<Vec<i32>> {
        let n = m.n_vars();
        assert!(n <= 20 && m.layout.n_realloc == 0);
        (0..1u32 << n)
            .map(|mask| (0..n).map(|v| ((mask >> v) & 1) as i32).collect::<Vec<_>>())
            .filter(|x| satisfies(m, x))
            .collect()
    }

    #[test]
    fn objective_blocks() {
        let g = build_mesh(1, 1, false).unwrap();
        let m = model(
            &g,
            vec![AppSpec::grid("a", 1, 1, 1).as_allocator(0)],
            &FaultState::healthy(1),
            BuildOptions::default(),
        );
        assert_eq!(m.c, vec![0, 2, -1]);
        let g = build_mesh(2, 2, false).unwrap();
        let specs = vec![AppSpec::grid("a", 1, 1, 2), AppSpec::grid("b", 2, 1, 1).as_allocator(0)];
        let m = model(&g, specs, &FaultState::healthy(4), BuildOptions::default());
        let l = m.layout;
        for k in 0..l.n_realloc {
            for p in 0..l.n_paths {
                for j in 0..l.n_cus {
                    assert_eq!(m.c[l.xcomm(k, p, j)], 0);
                    assert_eq!(m.c[l.xhat(k, p, j)], -1);
                    assert_eq!((m.lb[l.xcomm(k, p, j)], m.ub[l.xcomm(k, p, j)]), (-1, 1));
                }
            }
        }
        assert_eq!(m.c.iter().filter(|&&c| c > 0).count(), 2);
    }

    #[test]
    fn one_cu_cannot_run_two_nodes() {
        let g = build_mesh(1, 1, false).unwrap();
        let m = model(
            &g,
            vec![AppSpec::grid("a", 1, 1, 2)],
            &FaultState::healthy(1),
            BuildOptions::default(),
        );
        let pts = enumerate(&m);
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|x| x[m.layout.r(0)] == 0));
    }

    #[test]
    fn link_follows_nodes() {
        let g = build_mesh(1, 2, false).unwrap();
        let m = model(
            &g,
            vec![AppSpec::grid("a", 1, 1, 2)],
            &FaultState::healthy(2),
            BuildOptions::default(),
        );
        let l = m.layout;
        let running: Vec<_> = enumerate(&m).into_iter().filter(|x| x[l.r(0)] == 1).collect();
        assert_eq!(running.len(), 2);
        assert!(running.iter().all(|x| x[l.xpl(0, 0)] == 1));
        // a node on a CU with no carried link violates compliance
        let mut x = vec![0; m.n_vars()];
        x[l.xcn(0, 0)] = 1;
        assert!(m
            .rows
            .iter()
            .any(|r| matches!(r.tag, RowTag::Compliance { cu: 0, link: 0 }) && !r.is_satisfied(&x)));
    }

    #[test]
    fn reallocation_rows() {
        let g = build_mesh(1, 2, false).unwrap();
        let reg = AppRegistry::new(vec![AppSpec::grid("a", 1, 1, 1)]).unwrap();
        let prev = Allocation {
            n_cus: 2,
            placement: vec![Some(1)],
        };
        let m = build_model(&g, &reg, &FaultState::healthy(2), Some(&prev), BuildOptions::default()).unwrap();
        let l = m.layout;
        let pts = enumerate_with_moves(&m);
        for x in &pts {
            match (x[l.r(0)], x[l.m(0)]) {
                (1, 0) => assert_eq!(x[l.xcn(1, 0)], 1),
                (1, 1) => assert_eq!((x[l.xcn(1, 0)], x[l.xcn(0, 0)]), (0, 1)),
                (0, m0) => assert_eq!((m0, x[l.xcn(1, 0)]), (0, 0)),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert_eq!(pts.len(), 3);
    }

    #[test]
    fn faulty_and_isolated_cus_are_emptied() {
        let g = build_mesh(2, 2, false).unwrap();
        let f = FaultState::with_faulty(4, &[1, 2]);
        let specs = vec![AppSpec::grid("a", 1, 1, 1).as_allocator(0)];
        let m = model(&g, specs, &f, BuildOptions::default());
        let tags: Vec<_> = m
            .rows
            .iter()
            .filter(|r| matches!(r.tag, RowTag::Fault { .. } | RowTag::Isolated { .. }))
            .map(|r| r.tag)
            .collect();
        assert_eq!(
            tags,
            vec![
                RowTag::Isolated { cu: 0 },
                RowTag::Fault { cu: 1 },
                RowTag::Fault { cu: 2 },
                RowTag::Isolated { cu: 3 }
            ]
        );
        // every path touches a faulty CU
        let l = m.layout;
        for p in 0..4 {
            for j in 0..4 {
                assert_eq!(m.ub[l.xcomm(0, p, j)], 0);
            }
        }
        assert!(m.structure.comm_active.iter().all(|a| !a));
        let h = healthy_subgraph(&g, &FaultState::healthy(4)).unwrap();
        let reg = AppRegistry::new(Vec::new()).unwrap();
        let mut b = ModelBuilder::new(VarLayout::new(&g, &reg));
        add_fault_constraints(&mut b, &g, &FaultState::healthy(4), &h);
        assert!(b.rows.is_empty());
    }

    fn flow_cost_oracle(m: &IlpModel, x: &mut [i32], sink: usize) -> Option<i64> {
        let l = m.layout;
        let rows: Vec<_> = m
            .rows
            .iter()
            .filter(|r| matches!(r.tag, RowTag::Flow { sink: s, .. } if s == sink))
            .collect();
        let mut best = None;
        for code in 0..3usize.pow(l.n_paths as u32) {
            let mut c = code;
            let mut cost = 0;
            for p in 0..l.n_paths {
                let v = (c % 3) as i32 - 1;
                c /= 3;
                x[l.xcomm(0, p, sink)] = v;
                cost += v.abs() as i64;
            }
            if rows.iter().all(|r| r.is_satisfied(x)) {
                best = Some(best.map_or(cost, |b: i64| b.min(cost)));
            }
        }
        best
    }

    #[test]
    fn flow_demand_and_cost() {
        let g = build_mesh(2, 2, false).unwrap();
        let m = model(
            &g,
            vec![AppSpec::grid("a", 1, 1, 1).as_allocator(0)],
            &FaultState::healthy(4),
            BuildOptions::default(),
        );
        let l = m.layout;
        let mut x = vec![0; m.n_vars()];
        x[l.xcn(0, 0)] = 1;
        x[l.r(0)] = 1;
        assert_eq!(flow_cost_oracle(&m, &mut x, 3), Some(2));
        assert_eq!(flow_cost_oracle(&m, &mut x, 0), Some(0));
        assert_eq!(flow_cost_oracle(&m, &mut x, 1), Some(1));
        // a dropped allocator owes nothing
        let mut x = vec![0; m.n_vars()];
        assert_eq!(flow_cost_oracle(&m, &mut x, 3), Some(0));
    }

    #[test]
    fn single_path_flow_direction() {
        let g = build_mesh(1, 2, false).unwrap();
        let m = model(
            &g,
            vec![AppSpec::grid("a", 1, 1, 1).as_allocator(0)],
            &FaultState::healthy(2),
            BuildOptions::default(),
        );
        let l = m.layout;
        let mut x = vec![0; m.n_vars()];
        x[l.xcn(0, 0)] = 1;
        x[l.r(0)] = 1;
        x[l.xcomm(0, 0, 1)] = 1;
        assert!(m
            .rows
            .iter()
            .filter(|r| matches!(r.tag, RowTag::Flow { .. }))
            .all(|r| r.is_satisfied(&x)));
        x[l.xcomm(0, 0, 1)] = -1;
        assert!(!m
            .rows
            .iter()
            .filter(|r| matches!(r.tag, RowTag::Flow { .. }))
            .all(|r| r.is_satisfied(&x)));
    }

    #[test]
    fn orientation_boundaries() {
        let opts = BuildOptions {
            orientation: true,
            types: false,
        };
        let g = build_mesh(2, 2, false).unwrap();
        let m = model(&g, vec![AppSpec::grid("a", 1, 1, 2)], &FaultState::healthy(4), opts);
        let l = m.layout;
        assert_eq!(m.ub[l.xcn(1, 0)], 0);
        assert_eq!(m.ub[l.xcn(3, 0)], 0);
        assert_eq!(m.ub[l.xcn(0, 1)], 0);
        assert_eq!(m.ub[l.xcn(0, 0)], 1);

        let g = build_mesh(4, 4, false).unwrap();
        let m = model(&g, vec![AppSpec::grid("a", 1, 2, 2)], &FaultState::healthy(16), opts);
        let l = m.layout;
        // anchored at CU 0 the whole grid is determined
        let mut x = vec![0; m.n_vars()];
        for (node, cu) in [(0, 0), (1, 1), (2, 4), (3, 5)] {
            x[l.xcn(cu, node)] = 1;
        }
        let orient = |x: &[i32]| {
            m.rows
                .iter()
                .filter(|r| matches!(r.tag, RowTag::OrientRight { .. } | RowTag::OrientUp { .. }))
                .all(|r| r.is_satisfied(x))
        };
        assert!(orient(&x));
        x[l.xcn(5, 3)] = 0;
        x[l.xcn(6, 3)] = 1;
        assert!(!orient(&x));

        let g = build_mesh(3, 3, false).unwrap();
        let m = model(&g, vec![AppSpec::grid("a", 1, 1, 1)], &FaultState::healthy(9), opts);
        assert!(!m
            .rows
            .iter()
            .any(|r| matches!(r.tag, RowTag::OrientRight { .. } | RowTag::OrientUp { .. })));
    }

    #[test]
    fn torus_orientation_wraps() {
        let opts = BuildOptions {
            orientation: true,
            types: false,
        };
        let g = build_mesh(3, 3, true).unwrap();
        let m = model(&g, vec![AppSpec::grid("a", 1, 1, 2)], &FaultState::healthy(9), opts);
        assert!(m.ub.iter().all(|&u| u == 1));
        assert!(m
            .rows
            .iter()
            .any(|r| r.tag == RowTag::OrientRight { app: 0, cu: 2, node: 0 }
                && r.terms == vec![(m.layout.xcn(2, 0), 1), (m.layout.xcn(0, 1), -1)]));
    }

    #[test]
    fn type_matching() {
        let opts = BuildOptions {
            orientation: false,
            types: true,
        };
        let g = build_mesh(1, 2, false).unwrap().with_cu_types(vec![0, 1]).unwrap();
        let m = model(
            &g,
            vec![AppSpec::grid("a", 1, 1, 2).with_node_types(vec![0, 1])],
            &FaultState::healthy(2),
            opts,
        );
        let running: Vec<_> = enumerate(&m).into_iter().filter(|x| x[m.layout.r(0)] == 1).collect();
        assert_eq!(running.len(), 1);
        assert_eq!(
            Allocation::from_solution(&running[0], &m.layout).placement,
            vec![Some(0), Some(1)]
        );

        let g = build_mesh(2, 2, false).unwrap();
        let m = model(&g, vec![AppSpec::grid("a", 1, 1, 2)], &FaultState::healthy(4), opts);
        assert!(m.ub.iter().all(|&u| u == 1));
    }

    #[test]
    fn abs_rows_pair_up() {
        let g = build_mesh(2, 2, false).unwrap();
        let m = model(
            &g,
            vec![AppSpec::grid("a", 1, 1, 1).as_allocator(0)],
            &FaultState::healthy(4),
            BuildOptions::default(),
        );
        let l = m.layout;
        let n = m
            .rows
            .iter()
            .filter(|r| matches!(r.tag, RowTag::AbsPos { .. } | RowTag::AbsNeg { .. }))
            .count();
        assert_eq!(n, 2 * l.n_aux());
        let mut x = vec![0; m.n_vars()];
        let rows: Vec<_> = m
            .rows
            .iter()
            .filter(|r| matches!(r.tag, RowTag::AbsPos { .. } | RowTag::AbsNeg { .. }))
            .collect();
        for v in [-1, 1] {
            x[l.xcomm(0, 2, 3)] = v;
            x[l.xhat(0, 2, 3)] = 0;
            assert!(!rows.iter().all(|r| r.is_satisfied(&x)));
            x[l.xhat(0, 2, 3)] = 1;
            assert!(rows.iter().all(|r| r.is_satisfied(&x)));
        }
    }
}
