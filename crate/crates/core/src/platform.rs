//! Platform graph: a mesh of computational units (CUs) joined by physical
//! links, its incidence matrices, and the healthy subgraph left after faults.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed graph of CUs. CU `i` of a mesh sits at row `i / cols`, column
/// `i % cols`; `n_row` (CUs per mesh row) equals `cols`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformGraph {
    n_cus: usize,
    edges: Vec<(usize, usize)>,
    rows: usize,
    cols: usize,
    torus: bool,
    cu_types: Vec<u32>,
}

impl PlatformGraph {
    /// Builds a graph from an explicit edge list. `rows`/`cols` describe the
    /// mesh geometry used by orientation constraints; for a non-mesh graph
    /// pass `rows = 1, cols = n_cus`.
    pub fn from_edges(n_cus: usize, edges: Vec<(usize, usize)>, rows: usize, cols: usize, torus: bool) -> Result<Self> {
        if rows * cols != n_cus {
            return Err(Error::Platform(format!(
                "geometry {rows}x{cols} does not match {n_cus} CUs"
            )));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n_cus || b >= n_cus {
                return Err(Error::Platform(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::Platform(format!("self-loop on CU {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Platform(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Self {
            n_cus,
            edges,
            rows,
            cols,
            torus,
            cu_types: vec![0; n_cus],
        })
    }

    pub fn with_cu_types(mut self, cu_types: Vec<u32>) -> Result<Self> {
        if cu_types.len() != self.n_cus {
            return Err(Error::Platform(format!(
                "{} CU types given for {} CUs",
                cu_types.len(),
                self.n_cus
            )));
        }
        self.cu_types = cu_types;
        Ok(self)
    }

    pub fn n_cus(&self) -> usize {
        self.n_cus
    }

    pub fn n_paths(&self) -> usize {
        self.edges.len()
    }

    /// CUs per mesh row.
    pub fn n_row(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_torus(&self) -> bool {
        self.torus
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cu_types(&self) -> &[u32] {
        &self.cu_types
    }

    /// `(row, col)` of a CU in the mesh.
    pub fn position(&self, cu: usize) -> (usize, usize) {
        (cu / self.cols, cu % self.cols)
    }

    /// Neighbors of `cu` as `(neighbor, path index)`, sorted by neighbor index.
    pub fn neighbors(&self, cu: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter_map(|(p, &(a, b))| {
                if a == cu {
                    Some((b, p))
                } else if b == cu {
                    Some((a, p))
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, cu: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == cu || b == cu).count()
    }

    /// Index of the path joining `a` and `b`, in either direction.
    pub fn path_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|&(t, h)| (t == a && h == b) || (t == b && h == a))
    }

    /// Incidence matrix G (`n_cus × n_paths`): -1 at the tail of each edge,
    /// +1 at its head.
    pub fn incidence_matrix(&self) -> Array2<i32> {
        let mut g = Array2::zeros((self.n_cus, self.edges.len()));
        for (p, &(tail, head)) in self.edges.iter().enumerate() {
            g[[tail, p]] = -1;
            g[[head, p]] = 1;
        }
        g
    }

    /// Graphviz rendering: one node per CU labelled with its index and health,
    /// one undirected edge per physical link.
    pub fn to_dot(&self, faults: Option<&FaultState>) -> String {
        let mut out = String::from("graph platform {\n");
        for cu in 0..self.n_cus {
            let faulty = faults.is_some_and(|f| f.faulty[cu]);
            let health = if faulty { "faulty" } else { "healthy" };
            let _ = writeln!(out, "  cu{cu} [label=\"{cu}\\n{health}\"];");
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  cu{a} -- cu{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Square (or toroidal) mesh. Each CU links to its right neighbor (`i + 1`)
/// and its top neighbor (`i + cols`); non-wrapping edges run from the lower
/// to the higher index.
pub fn build_mesh(rows: usize, cols: usize, torus: bool) -> Result<PlatformGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::Platform(format!("empty mesh {rows}x{cols}")));
    }
    let n = rows * cols;
    let mut edges = Vec::new();
    for i in 0..n {
        let (r, c) = (i / cols, i % cols);
        if c + 1 < cols {
            edges.push((i, i + 1));
        } else if torus && cols > 2 {
            edges.push((i, r * cols));
        }
        if r + 1 < rows {
            edges.push((i, i + cols));
        } else if torus && rows > 2 {
            edges.push((i, c));
        }
    }
    PlatformGraph::from_edges(n, edges, rows, cols, torus)
}

/// Elementwise absolute value of an incidence matrix.
pub fn unoriented_incidence(g: &Array2<i32>) -> Result<Array2<i32>> {
    if let Some(bad) = g.iter().find(|v| !(-1..=1).contains(*v)) {
        return Err(Error::Platform(format!("incidence entry {bad} outside {{-1, 0, 1}}")));
    }
    Ok(g.mapv(i32::abs))
}

/// Per-CU fault flags. `faulty` marks crashed (detected) CUs; `comp_fault`
/// marks CUs producing corrupted results, which only the simulator models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultState {
    pub faulty: Vec<bool>,
    pub comp_fault: Vec<bool>,
}

impl FaultState {
    pub fn healthy(n_cus: usize) -> Self {
        Self {
            faulty: vec![false; n_cus],
            comp_fault: vec![false; n_cus],
        }
    }

    /// Fault state with the listed CUs crashed.
    pub fn with_faulty(n_cus: usize, faulty: &[usize]) -> Self {
        let mut state = Self::healthy(n_cus);
        for &cu in faulty {
            state.faulty[cu] = true;
        }
        state
    }

    pub fn n_cus(&self) -> usize {
        self.faulty.len()
    }

    pub fn faulty_cus(&self) -> Vec<usize> {
        (0..self.faulty.len()).filter(|&i| self.faulty[i]).collect()
    }
}

/// Subgraph induced by healthy CUs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HealthySubgraph {
    /// Degree counting only edges between two healthy CUs; 0 for faulty CUs.
    pub degree: Vec<usize>,
    /// Component id of each healthy CU.
    pub component: Vec<Option<usize>>,
    /// Healthy components, each sorted, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    full_degree: Vec<usize>,
}

impl HealthySubgraph {
    /// A healthy CU whose every neighbor has failed. CUs without any link in
    /// the platform itself are not isolated by faults and are excluded.
    pub fn is_isolated(&self, cu: usize) -> bool {
        self.component[cu].is_some() && self.full_degree[cu] > 0 && self.degree[cu] == 0
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        matches!((self.component[a], self.component[b]), (Some(x), Some(y)) if x == y)
    }
}

/// Degrees and connected components of the healthy subgraph.
pub fn healthy_subgraph(g: &PlatformGraph, f: &FaultState) -> Result<HealthySubgraph> {
    let n = g.n_cus();
    if f.n_cus() != n || f.comp_fault.len() != n {
        return Err(Error::Platform(format!(
            "fault state covers {} CUs, platform has {n}",
            f.n_cus()
        )));
    }
    let mut degree = vec![0; n];
    let mut full_degree = vec![0; n];
    for &(a, b) in g.edges() {
        full_degree[a] += 1;
        full_degree[b] += 1;
        if !f.faulty[a] && !f.faulty[b] {
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    let mut component = vec![None; n];
    let mut components = Vec::new();
    for start in 0..n {
        if f.faulty[start] || component[start].is_some() {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        component[start] = Some(id);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for (v, _) in g.neighbors(u) {
                if !f.faulty[v] && component[v].is_none() {
                    component[v] = Some(id);
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    Ok(HealthySubgraph {
        degree,
        component,
        components,
        full_degree,
    })
}

/// Breadth-first search from `src` through healthy CUs. Neighbors are
/// expanded lowest index first, so the returned tree is deterministic.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    pub source: usize,
    pub dist: Vec<Option<usize>>,
    /// `(parent CU, path index)` on the tree edge into each reached CU.
    pub parent: Vec<Option<(usize, usize)>>,
}

impl ShortestPathTree {
    pub fn build(g: &PlatformGraph, f: &FaultState, src: usize) -> Self {
        let n = g.n_cus();
        let mut dist = vec![None; n];
        let mut parent = vec![None; n];
        if !f.faulty[src] {
            dist[src] = Some(0);
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                let du = dist[u].unwrap_or(0);
                for (v, p) in g.neighbors(u) {
                    if !f.faulty[v] && dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        parent[v] = Some((u, p));
                        queue.push_back(v);
                    }
                }
            }
        }
        Self {
            source: src,
            dist,
            parent,
        }
    }

    /// Edges `(path, from, to)` walked from the source to `target`, in order.
    pub fn path_to(&self, target: usize) -> Option<Vec<(usize, usize, usize)>> {
        self.dist[target]?;
        let mut hops = Vec::new();
        let mut cur = target;
        while let Some((prev, p)) = self.parent[cur] {
            hops.push((p, prev, cur));
            cur = prev;
        }
        hops.reverse();
        Some(hops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_sizes() {
        let g = build_mesh(2, 2, false).unwrap();
        assert_eq!((g.n_cus(), g.n_paths()), (4, 4));
        let g = build_mesh(4, 4, false).unwrap();
        assert_eq!((g.n_cus(), g.n_paths()), (16, 24));
        let g = build_mesh(1, 1, false).unwrap();
        assert_eq!((g.n_cus(), g.n_paths()), (1, 0));
        assert!(build_mesh(0, 3, false).is_err());
    }

    #[test]
    fn mesh_edge_count_formula_exhaustive() {
        for rows in 1..=8 {
            for cols in 1..=8 {
                let g = build_mesh(rows, cols, false).unwrap();
                assert_eq!(g.n_paths(), rows * (cols - 1) + cols * (rows - 1));
                for &(a, b) in g.edges() {
                    assert!(a < b);
                    let (ra, ca) = g.position(a);
                    let (rb, cb) = g.position(b);
                    assert_eq!(ra.abs_diff(rb) + ca.abs_diff(cb), 1);
                }
            }
        }
    }

    #[test]
    fn torus_has_wrap_links() {
        let g = build_mesh(3, 3, true).unwrap();
        assert_eq!(g.n_paths(), 18);
        assert!(g.path_between(2, 0).is_some());
        assert!(g.path_between(6, 0).is_some());
        // 2 columns: the wrap link would duplicate the direct one
        let g = build_mesh(2, 2, true).unwrap();
        assert_eq!(g.n_paths(), 4);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(PlatformGraph::from_edges(2, vec![(0, 0)], 1, 2, false).is_err());
        assert!(PlatformGraph::from_edges(2, vec![(0, 1), (1, 0)], 1, 2, false).is_err());
        assert!(PlatformGraph::from_edges(2, vec![(0, 2)], 1, 2, false).is_err());
    }

    #[test]
    fn incidence_of_single_edge() {
        let g = PlatformGraph::from_edges(2, vec![(0, 1)], 1, 2, false).unwrap();
        let m = g.incidence_matrix();
        assert_eq!(m.column(0).to_vec(), vec![-1, 1]);
    }

    #[test]
    fn incidence_columns_balance() {
        for (r, c) in [(2, 2), (3, 4), (4, 4)] {
            let m = build_mesh(r, c, false).unwrap().incidence_matrix();
            for col in m.columns() {
                assert_eq!(col.sum(), 0);
                assert_eq!(col.iter().map(|v| v.abs()).sum::<i32>(), 2);
            }
        }
        let m = build_mesh(4, 4, false).unwrap().incidence_matrix();
        assert_eq!(m.iter().filter(|&&v| v != 0).count(), 48);
    }

    #[test]
    fn unoriented_is_abs() {
        let g = Array2::from_shape_vec((2, 1), vec![-1, 1]).unwrap();
        assert_eq!(
            unoriented_incidence(&g).unwrap(),
            Array2::from_shape_vec((2, 1), vec![1, 1]).unwrap()
        );
        let z = Array2::<i32>::zeros((3, 2));
        assert_eq!(unoriented_incidence(&z).unwrap(), z);
        let bad = Array2::from_shape_vec((1, 1), vec![2]).unwrap();
        assert!(unoriented_incidence(&bad).is_err());

        let mesh = build_mesh(2, 2, false).unwrap();
        let gh = unoriented_incidence(&mesh.incidence_matrix()).unwrap();
        for cu in 0..4 {
            assert_eq!(gh.row(cu).sum() as usize, mesh.degree(cu));
            assert_eq!(mesh.degree(cu), 2);
        }
    }

    #[test]
    fn healthy_subgraph_examples() {
        let g = build_mesh(2, 2, false).unwrap();
        let h = healthy_subgraph(&g, &FaultState::healthy(4)).unwrap();
        assert_eq!(h.degree, vec![2; 4]);
        assert_eq!(h.components, vec![vec![0, 1, 2, 3]]);

        let h = healthy_subgraph(&g, &FaultState::with_faulty(4, &[1, 2])).unwrap();
        assert_eq!(h.degree, vec![0, 0, 0, 0]);
        assert_eq!(h.components, vec![vec![0], vec![3]]);
        assert!(h.is_isolated(0) && h.is_isolated(3));
        assert!(!h.is_isolated(1));

        let g = build_mesh(1, 3, false).unwrap();
        let h = healthy_subgraph(&g, &FaultState::with_faulty(3, &[1])).unwrap();
        assert_eq!((h.degree[0], h.degree[2]), (0, 0));

        let g = build_mesh(1, 1, false).unwrap();
        let h = healthy_subgraph(&g, &FaultState::healthy(1)).unwrap();
        assert!(!h.is_isolated(0));
    }

    #[test]
    fn bfs_paths() {
        let g = build_mesh(3, 3, false).unwrap();
        let t = ShortestPathTree::build(&g, &FaultState::healthy(9), 4);
        let total: usize = (0..9).filter_map(|j| t.dist[j]).sum();
        assert_eq!(total, 12);
        let hops = t.path_to(0).unwrap();
        assert_eq!(hops.len(), 2);
        assert_eq!(hops.last().unwrap().2, 0);
    }

    #[test]
    fn dot_export_lists_everything() {
        let g = build_mesh(2, 2, false).unwrap();
        let dot = g.to_dot(Some(&FaultState::with_faulty(4, &[3])));
        assert_eq!(dot.matches(" -- ").count(), 4);
        assert!(dot.contains("cu3 [label=\"3\\nfaulty\"]"));
    }
}
