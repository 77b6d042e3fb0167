//! The allocation integer program: variable layout, objective, and every
//! constraint family, assembled from a platform, an application registry, a
//! fault state and (for reallocations) the previous allocation.

mod coefficients;
mod constraints;
mod dump;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::allocation::Allocation;
use crate::appmodel::AppRegistry;
use crate::error::{Error, Result};
use crate::platform::{healthy_subgraph, FaultState, PlatformGraph};

pub use coefficients::{compute_coefficients, Coefficients};
pub use constraints::{
    add_abs_linearization, add_comm_constraints, add_compliance_constraints, add_fault_constraints,
    add_orientation_constraints, add_partitioning_constraints, add_reallocation_constraints, add_type_constraints,
    build_objective, comm_roles, CommRoles,
};

/// Index map of the decision vector. Blocks, in order: `X^{CUs→nodes}`,
/// `X^{paths→links}`, `r`, `M`, `X^{Comm,k}` for every allocator, then the
/// absolute-value auxiliaries `X̂^{Comm,k}`. Matrices are flattened column by
/// column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarLayout {
    pub n_cus: usize,
    pub n_nodes: usize,
    pub n_paths: usize,
    pub n_links: usize,
    pub n_apps: usize,
    pub n_realloc: usize,
}

/// Decoded meaning of a variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRef {
    Xcn { cu: usize, node: usize },
    Xpl { path: usize, link: usize },
    R { app: usize },
    M { node: usize },
    Xcomm { alloc: usize, path: usize, cu: usize },
    Xhat { alloc: usize, path: usize, cu: usize },
}

impl VarLayout {
    pub fn new(g: &PlatformGraph, reg: &AppRegistry) -> Self {
        Self {
            n_cus: g.n_cus(),
            n_nodes: reg.n_nodes(),
            n_paths: g.n_paths(),
            n_links: reg.n_links(),
            n_apps: reg.n_apps(),
            n_realloc: reg.n_realloc(),
        }
    }

    fn off_pl(&self) -> usize {
        self.n_cus * self.n_nodes
    }

    fn off_r(&self) -> usize {
        self.off_pl() + self.n_paths * self.n_links
    }

    fn off_m(&self) -> usize {
        self.off_r() + self.n_apps
    }

    fn off_comm(&self) -> usize {
        self.off_m() + self.n_nodes
    }

    fn comm_block(&self) -> usize {
        self.n_paths * self.n_cus
    }

    fn off_hat(&self) -> usize {
        self.off_comm() + self.n_realloc * self.comm_block()
    }

    pub fn xcn(&self, cu: usize, node: usize) -> usize {
        node * self.n_cus + cu
    }

    pub fn xpl(&self, path: usize, link: usize) -> usize {
        self.off_pl() + link * self.n_paths + path
    }

    pub fn r(&self, app: usize) -> usize {
        self.off_r() + app
    }

    pub fn m(&self, node: usize) -> usize {
        self.off_m() + node
    }

    pub fn xcomm(&self, alloc: usize, path: usize, cu: usize) -> usize {
        self.off_comm() + alloc * self.comm_block() + cu * self.n_paths + path
    }

    pub fn xhat(&self, alloc: usize, path: usize, cu: usize) -> usize {
        self.off_hat() + alloc * self.comm_block() + cu * self.n_paths + path
    }

    /// Variables of the original formulation (everything but `X̂`).
    pub fn n_primary(&self) -> usize {
        self.off_hat()
    }

    pub fn n_aux(&self) -> usize {
        self.n_realloc * self.comm_block()
    }

    pub fn n_vars(&self) -> usize {
        self.n_primary() + self.n_aux()
    }

    /// Variables decided by assignment search: `X^{CUs→nodes}`,
    /// `X^{paths→links}`, `r` and `M` occupy `0..n_assignment()`.
    pub fn n_assignment(&self) -> usize {
        self.off_comm()
    }

    pub fn is_flow_var(&self, var: usize) -> bool {
        var >= self.off_comm()
    }

    pub fn describe(&self, var: usize) -> VarRef {
        let split = |rel: usize| {
            let (alloc, rest) = (rel / self.comm_block(), rel % self.comm_block());
            (alloc, rest % self.n_paths, rest / self.n_paths)
        };
        if var < self.off_pl() {
            VarRef::Xcn {
                cu: var % self.n_cus,
                node: var / self.n_cus,
            }
        } else if var < self.off_r() {
            let rel = var - self.off_pl();
            VarRef::Xpl {
                path: rel % self.n_paths,
                link: rel / self.n_paths,
            }
        } else if var < self.off_m() {
            VarRef::R {
                app: var - self.off_r(),
            }
        } else if var < self.off_comm() {
            VarRef::M {
                node: var - self.off_m(),
            }
        } else if var < self.off_hat() {
            let (alloc, path, cu) = split(var - self.off_comm());
            VarRef::Xcomm { alloc, path, cu }
        } else {
            let (alloc, path, cu) = split(var - self.off_hat());
            VarRef::Xhat { alloc, path, cu }
        }
    }

    pub fn name(&self, var: usize) -> String {
        match self.describe(var) {
            VarRef::Xcn { cu, node } => format!("Xcn[{cu},{node}]"),
            VarRef::Xpl { path, link } => format!("Xpl[{path},{link}]"),
            VarRef::R { app } => format!("r[{app}]"),
            VarRef::M { node } => format!("M[{node}]"),
            VarRef::Xcomm { alloc, path, cu } => format!("Xcomm[{alloc},{path},{cu}]"),
            VarRef::Xhat { alloc, path, cu } => format!("Xhat[{alloc},{path},{cu}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Eq,
}

/// Which constraint produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowTag {
    CuCapacity { cu: usize },
    NodeAssign { node: usize },
    PathCapacity { path: usize },
    LinkAssign { link: usize },
    Compliance { cu: usize, link: usize },
    Realloc { cu: usize, node: usize },
    Fault { cu: usize },
    Isolated { cu: usize },
    Flow { alloc: usize, cu: usize, sink: usize },
    OrientRight { app: usize, cu: usize, node: usize },
    OrientUp { app: usize, cu: usize, node: usize },
    AbsPos { alloc: usize, path: usize, cu: usize },
    AbsNeg { alloc: usize, path: usize, cu: usize },
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowTag::CuCapacity { cu } => write!(f, "cu_cap[{cu}]"),
            RowTag::NodeAssign { node } => write!(f, "node_assign[{node}]"),
            RowTag::PathCapacity { path } => write!(f, "path_cap[{path}]"),
            RowTag::LinkAssign { link } => write!(f, "link_assign[{link}]"),
            RowTag::Compliance { cu, link } => write!(f, "comply[{cu},{link}]"),
            RowTag::Realloc { cu, node } => write!(f, "realloc[{cu},{node}]"),
            RowTag::Fault { cu } => write!(f, "fault[{cu}]"),
            RowTag::Isolated { cu } => write!(f, "isolated[{cu}]"),
            RowTag::Flow { alloc, cu, sink } => write!(f, "flow[{alloc},{cu},{sink}]"),
            RowTag::OrientRight { app, cu, node } => write!(f, "orient_r[{app},{cu},{node}]"),
            RowTag::OrientUp { app, cu, node } => write!(f, "orient_u[{app},{cu},{node}]"),
            RowTag::AbsPos { alloc, path, cu } => write!(f, "abs_pos[{alloc},{path},{cu}]"),
            RowTag::AbsNeg { alloc, path, cu } => write!(f, "abs_neg[{alloc},{path},{cu}]"),
        }
    }
}

/// One linear constraint `terms · x (<= | =) rhs`, terms sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub tag: RowTag,
    pub sense: Sense,
    pub terms: Vec<(usize, i64)>,
    pub rhs: i64,
}

impl Row {
    pub fn new(tag: RowTag, sense: Sense, mut terms: Vec<(usize, i64)>, rhs: i64) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(usize, i64)> = Vec::with_capacity(terms.len());
        for (v, a) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += a,
                _ => merged.push((v, a)),
            }
        }
        merged.retain(|t| t.1 != 0);
        Self {
            tag,
            sense,
            terms: merged,
            rhs,
        }
    }

    pub fn activity(&self, x: &[i32]) -> i64 {
        self.terms.iter().map(|&(v, a)| a * x[v] as i64).sum()
    }

    pub fn is_satisfied(&self, x: &[i32]) -> bool {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Keep every grid application in its compiled orientation.
    pub orientation: bool,
    /// Restrict nodes to CUs of the same type label.
    pub types: bool,
}

/// Structural facts the solver uses to complete communication flows without
/// searching over them. Everything here is also encoded in the rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStructure {
    pub node_app: Vec<usize>,
    pub link_app: Vec<usize>,
    pub platform: PlatformGraph,
    pub faults: FaultState,
    /// CUs that take part in allocator communication as source or sink.
    pub comm_active: Vec<bool>,
    /// Per allocator replica: (global allocator node, application index).
    pub allocators: Vec<(usize, usize)>,
    pub previous: Option<Allocation>,
}

/// `maximize cᵀx  s.t.  rows, lb <= x <= ub, x integer`.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub c: Vec<i128>,
    pub rows: Vec<Row>,
    pub lb: Vec<i32>,
    pub ub: Vec<i32>,
    pub layout: VarLayout,
    pub coefficients: Coefficients,
    pub structure: ModelStructure,
}

impl IlpModel {
    pub fn n_vars(&self) -> usize {
        self.c.len()
    }

    /// Inequality rows `M₁x <= b₁`.
    pub fn ineq_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.sense == Sense::Le)
    }

    /// Equality rows `M₂x = b₂`.
    pub fn eq_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.sense == Sense::Eq)
    }

    pub fn objective(&self, x: &[i32]) -> i128 {
        self.c.iter().zip(x).map(|(&c, &v)| c * v as i128).sum()
    }

    /// Plain-text LP-style dump, stable across runs.
    pub fn to_lp_string(&self) -> String {
        dump::model_to_string(self)
    }

    pub fn solution_to_string(&self, x: &[i32]) -> String {
        dump::solution_to_string(self, x)
    }
}

/// Accumulates rows and bounds for one model.
pub struct ModelBuilder {
    pub layout: VarLayout,
    pub rows: Vec<Row>,
    pub lb: Vec<i32>,
    pub ub: Vec<i32>,
}

impl ModelBuilder {
    pub fn new(layout: VarLayout) -> Self {
        let n = layout.n_vars();
        let mut lb = vec![0; n];
        let ub = vec![1; n];
        for v in layout.n_assignment()..layout.n_primary() {
            lb[v] = -1;
        }
        Self {
            layout,
            rows: Vec::new(),
            lb,
            ub,
        }
    }

    pub fn push(&mut self, tag: RowTag, sense: Sense, terms: Vec<(usize, i64)>, rhs: i64) {
        self.rows.push(Row::new(tag, sense, terms, rhs));
    }

    /// Fixes a variable to zero through its bounds.
    pub fn fix_zero(&mut self, var: usize) {
        self.lb[var] = 0;
        self.ub[var] = 0;
    }
}

/// Builds the complete model. `previous` is the allocation in force before
/// this solve; `None` for the initial allocation.
pub fn build_model(
    g: &PlatformGraph,
    reg: &AppRegistry,
    faults: &FaultState,
    previous: Option<&Allocation>,
    options: BuildOptions,
) -> Result<IlpModel> {
    if faults.n_cus() != g.n_cus() {
        return Err(Error::Model(format!(
            "fault state has {} CUs, platform {}",
            faults.n_cus(),
            g.n_cus()
        )));
    }
    if let Some(prev) = previous {
        prev.validate(g.n_cus(), reg.n_nodes())?;
    }
    let layout = VarLayout::new(g, reg);
    let coefficients = compute_coefficients(reg, g)?;
    let healthy = healthy_subgraph(g, faults)?;
    let roles = comm_roles(g, reg, faults, &healthy, options);

    let mut b = ModelBuilder::new(layout);
    add_partitioning_constraints(&mut b, reg, g);
    add_compliance_constraints(&mut b, reg, g)?;
    add_reallocation_constraints(&mut b, reg, previous)?;
    add_fault_constraints(&mut b, g, faults, &healthy);
    add_comm_constraints(&mut b, reg, g, &roles);
    if options.orientation {
        add_orientation_constraints(&mut b, reg, g);
    }
    if options.types {
        add_type_constraints(&mut b, reg, g);
    }
    add_abs_linearization(&mut b);
    let c = build_objective(&coefficients, &layout);

    let structure = ModelStructure {
        node_app: reg.node_apps().to_vec(),
        link_app: reg.link_apps().to_vec(),
        platform: g.clone(),
        faults: faults.clone(),
        comm_active: roles.active,
        allocators: (0..reg.n_realloc())
            .map(|k| (reg.node_of_alloc(k), reg.alloc_app(k)))
            .collect(),
        previous: previous.cloned(),
    };
    Ok(IlpModel {
        c,
        rows: b.rows,
        lb: b.lb,
        ub: b.ub,
        layout,
        coefficients,
        structure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appmodel::AppSpec;
    use crate::platform::build_mesh;

    #[test]
    fn layout_is_column_major_and_contiguous() {
        let l = VarLayout {
            n_cus: 3,
            n_nodes: 2,
            n_paths: 2,
            n_links: 1,
            n_apps: 1,
            n_realloc: 2,
        };
        assert_eq!(l.xcn(0, 0), 0);
        assert_eq!(l.xcn(2, 0), 2);
        assert_eq!(l.xcn(0, 1), 3);
        assert_eq!(l.xpl(1, 0), 7);
        assert_eq!(l.r(0), 8);
        assert_eq!(l.m(1), 10);
        assert_eq!(l.xcomm(0, 0, 0), 11);
        assert_eq!(l.xcomm(1, 1, 2), 11 + 6 + 5);
        assert_eq!(l.n_primary(), 3 * 2 + 2 + 1 + 2 + 2 * 6);
        assert_eq!(l.n_aux(), 12);
        for v in 0..l.n_vars() {
            let back = match l.describe(v) {
                VarRef::Xcn { cu, node } => l.xcn(cu, node),
                VarRef::Xpl { path, link } => l.xpl(path, link),
                VarRef::R { app } => l.r(app),
                VarRef::M { node } => l.m(node),
                VarRef::Xcomm { alloc, path, cu } => l.xcomm(alloc, path, cu),
                VarRef::Xhat { alloc, path, cu } => l.xhat(alloc, path, cu),
            };
            assert_eq!(back, v);
        }
    }

    #[test]
    fn row_merges_terms() {
        let r = Row::new(RowTag::Fault { cu: 0 }, Sense::Eq, vec![(3, 1), (1, 2), (3, -1)], 0);
        assert_eq!(r.terms, vec![(1, 2)]);
    }

    fn demo_registry() -> AppRegistry {
        let mut specs = Vec::new();
        for i in 0..3 {
            specs.push(AppSpec::grid(&format!("c{i}"), i + 1, 1, 2).as_controller());
        }
        for i in 0..3 {
            specs.push(AppSpec::grid(&format!("a{i}"), i + 4, 1, 1).as_allocator(0));
        }
        specs.push(AppSpec::grid("d", 7, 1, 2));
        AppRegistry::new(specs).unwrap()
    }

    #[test]
    fn demo_variable_count() {
        let g = build_mesh(4, 4, false).unwrap();
        let reg = demo_registry();
        let m = build_model(&g, &reg, &FaultState::healthy(16), None, BuildOptions::default()).unwrap();
        assert_eq!(m.n_vars(), 176 + 24 * reg.n_links() + 18 + 2304);
        assert_eq!(m.c.iter().filter(|&&c| c > 0).count(), 7);
        assert!(m.rows.iter().all(|r| !matches!(r.tag, RowTag::Realloc { .. })));
    }

    #[test]
    fn empty_registry_model() {
        let g = build_mesh(2, 2, false).unwrap();
        let reg = AppRegistry::new(Vec::new()).unwrap();
        let m = build_model(&g, &reg, &FaultState::healthy(4), None, BuildOptions::default()).unwrap();
        assert_eq!(m.n_vars(), 0);
        assert_eq!(m.objective(&[]), 0);
    }

    #[test]
    fn build_is_deterministic() {
        let g = build_mesh(4, 4, false).unwrap();
        let reg = demo_registry();
        let f = FaultState::with_faulty(16, &[5, 10]);
        let opts = BuildOptions {
            orientation: true,
            types: false,
        };
        let a = build_model(&g, &reg, &f, None, opts).unwrap().to_lp_string();
        let b = build_model(&g, &reg, &f, None, opts).unwrap().to_lp_string();
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let g = build_mesh(2, 2, false).unwrap();
        let reg = demo_registry();
        assert!(build_model(&g, &reg, &FaultState::healthy(3), None, BuildOptions::default()).is_err());
        let prev = Allocation::empty(4, 3);
        assert!(build_model(&g, &reg, &FaultState::healthy(4), Some(&prev), BuildOptions::default()).is_err());
    }
}
