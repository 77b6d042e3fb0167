//! Applications as graphs of Application Nodes joined by Application Links,
//! and the registry that lays all of them out in one global numbering.

use std::ops::Range;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppShape {
    /// Axis-aligned grid; local nodes are numbered row-major from the top-left.
    Grid { rows: usize, cols: usize },
    /// Arbitrary node count with an explicit link list of local node pairs.
    Explicit {
        nodes: usize,
        #[serde(default)]
        links: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppSpec {
    pub name: String,
    /// 1 is the highest priority.
    pub priority: usize,
    pub shape: AppShape,
    /// Per-node type labels; empty means every node has type 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_types: Vec<u32>,
    #[serde(default)]
    pub allocator: bool,
    #[serde(default)]
    pub controller: bool,
    /// Local node running the allocator (required when `allocator`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocator_node: Option<usize>,
}

impl AppSpec {
    pub fn grid(name: &str, priority: usize, rows: usize, cols: usize) -> Self {
        Self {
            name: name.to_string(),
            priority,
            shape: AppShape::Grid { rows, cols },
            node_types: Vec::new(),
            allocator: false,
            controller: false,
            allocator_node: None,
        }
    }

    pub fn explicit(name: &str, priority: usize, nodes: usize, links: Vec<(usize, usize)>) -> Self {
        Self {
            shape: AppShape::Explicit { nodes, links },
            ..Self::grid(name, priority, 1, 1)
        }
    }

    /// Marks the app as an allocator replica running on local node `node`.
    pub fn as_allocator(mut self, node: usize) -> Self {
        self.allocator = true;
        self.allocator_node = Some(node);
        self
    }

    pub fn as_controller(mut self) -> Self {
        self.controller = true;
        self
    }

    pub fn with_node_types(mut self, types: Vec<u32>) -> Self {
        self.node_types = types;
        self
    }
}

/// Graph of one application with its unoriented incidence matrix H^k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppGraph {
    pub n_nodes: usize,
    pub links: Vec<(usize, usize)>,
    /// `n_nodes × n_links`, one 1 per link endpoint.
    pub h: Array2<i32>,
    /// `(rows, cols)` for grid-shaped apps.
    pub grid: Option<(usize, usize)>,
}

impl AppGraph {
    pub fn n_links(&self) -> usize {
        self.links.len()
    }
}

pub fn build_app_graph(spec: &AppSpec) -> Result<AppGraph> {
    let (n_nodes, links, grid) = match &spec.shape {
        AppShape::Grid { rows, cols } => {
            if rows * cols == 0 {
                return Err(Error::Application(format!(
                    "app '{}' has an empty {rows}x{cols} grid",
                    spec.name
                )));
            }
            let mut links = Vec::new();
            for r in 0..*rows {
                for c in 0..*cols {
                    let i = r * cols + c;
                    if c + 1 < *cols {
                        links.push((i, i + 1));
                    }
                    if r + 1 < *rows {
                        links.push((i, i + cols));
                    }
                }
            }
            (rows * cols, links, Some((*rows, *cols)))
        }
        AppShape::Explicit { nodes, links } => {
            if *nodes == 0 {
                return Err(Error::Application(format!("app '{}' has no nodes", spec.name)));
            }
            for &(a, b) in links {
                if a >= *nodes || b >= *nodes || a == b {
                    return Err(Error::Application(format!(
                        "app '{}' link ({a},{b}) is invalid for {nodes} nodes",
                        spec.name
                    )));
                }
            }
            (*nodes, links.clone(), None)
        }
    };
    let mut h = Array2::zeros((n_nodes, links.len()));
    for (j, &(a, b)) in links.iter().enumerate() {
        h[[a, j]] = 1;
        h[[b, j]] = 1;
    }
    Ok(AppGraph {
        n_nodes,
        links,
        h,
        grid,
    })
}

/// All applications in priority order with their global node/link numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct AppRegistry {
    apps: Vec<AppSpec>,
    graphs: Vec<AppGraph>,
    node_offset: Vec<usize>,
    link_offset: Vec<usize>,
    node_app: Vec<usize>,
    link_app: Vec<usize>,
    node_types: Vec<u32>,
    alloc_apps: Vec<usize>,
    node_of_alloc: Vec<usize>,
    controller_apps: Vec<usize>,
    h: Array2<i32>,
}

impl AppRegistry {
    pub fn new(specs: Vec<AppSpec>) -> Result<Self> {
        let mut apps = specs;
        apps.sort_by_key(|a| a.priority);
        for (k, app) in apps.iter().enumerate() {
            if app.priority != k + 1 {
                let dup = k > 0 && apps[k - 1].priority == app.priority;
                return Err(Error::Application(if dup {
                    format!("duplicate priority rank {}", app.priority)
                } else {
                    format!("priority ranks must be exactly 1..={}", apps.len())
                }));
            }
        }
        let graphs = apps.iter().map(build_app_graph).collect::<Result<Vec<_>>>()?;

        let mut node_offset = Vec::with_capacity(apps.len());
        let mut link_offset = Vec::with_capacity(apps.len());
        let (mut node_app, mut link_app, mut node_types) = (Vec::new(), Vec::new(), Vec::new());
        let (mut alloc_apps, mut node_of_alloc, mut controller_apps) = (Vec::new(), Vec::new(), Vec::new());
        for (k, (app, graph)) in apps.iter().zip(&graphs).enumerate() {
            node_offset.push(node_app.len());
            link_offset.push(link_app.len());
            if !app.node_types.is_empty() && app.node_types.len() != graph.n_nodes {
                return Err(Error::Application(format!(
                    "app '{}' has {} node types for {} nodes",
                    app.name,
                    app.node_types.len(),
                    graph.n_nodes
                )));
            }
            for local in 0..graph.n_nodes {
                node_app.push(k);
                node_types.push(app.node_types.get(local).copied().unwrap_or(0));
            }
            link_app.extend(std::iter::repeat_n(k, graph.n_links()));
            if app.allocator {
                let local = app
                    .allocator_node
                    .ok_or_else(|| Error::Application(format!("allocator app '{}' has no allocator_node", app.name)))?;
                if local >= graph.n_nodes {
                    return Err(Error::Application(format!(
                        "allocator node {local} of app '{}' does not exist",
                        app.name
                    )));
                }
                alloc_apps.push(k);
                node_of_alloc.push(node_offset[k] + local);
            }
            if app.controller {
                controller_apps.push(k);
            }
        }

        let mut h = Array2::zeros((node_app.len(), link_app.len()));
        for (k, graph) in graphs.iter().enumerate() {
            let (n0, l0) = (node_offset[k], link_offset[k]);
            for ((i, j), &v) in graph.h.indexed_iter() {
                h[[n0 + i, l0 + j]] = v;
            }
        }

        Ok(Self {
            apps,
            graphs,
            node_offset,
            link_offset,
            node_app,
            link_app,
            node_types,
            alloc_apps,
            node_of_alloc,
            controller_apps,
            h,
        })
    }

    pub fn apps(&self) -> &[AppSpec] {
        &self.apps
    }

    pub fn graphs(&self) -> &[AppGraph] {
        &self.graphs
    }

    pub fn n_apps(&self) -> usize {
        self.apps.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.node_app.len()
    }

    pub fn n_links(&self) -> usize {
        self.link_app.len()
    }

    /// Number of allocator replicas (apps flagged as allocators).
    pub fn n_realloc(&self) -> usize {
        self.alloc_apps.len()
    }

    /// Block-diagonal application incidence matrix H.
    pub fn h(&self) -> &Array2<i32> {
        &self.h
    }

    /// Application owning global node `i`, written N(i).
    pub fn node_app(&self, i: usize) -> usize {
        self.node_app[i]
    }

    /// Application owning global link `i`, written L(i).
    pub fn link_app(&self, i: usize) -> usize {
        self.link_app[i]
    }

    pub fn node_apps(&self) -> &[usize] {
        &self.node_app
    }

    pub fn link_apps(&self) -> &[usize] {
        &self.link_app
    }

    pub fn node_type(&self, i: usize) -> u32 {
        self.node_types[i]
    }

    /// Global node hosting allocator replica `k`.
    pub fn node_of_alloc(&self, k: usize) -> usize {
        self.node_of_alloc[k]
    }

    /// Application index of allocator replica `k`.
    pub fn alloc_app(&self, k: usize) -> usize {
        self.alloc_apps[k]
    }

    pub fn controller_apps(&self) -> &[usize] {
        &self.controller_apps
    }

    /// Global index of app `k`'s top-left (local 0) node.
    pub fn topleft_node(&self, k: usize) -> usize {
        self.node_offset[k]
    }

    pub fn app_nodes(&self, k: usize) -> Range<usize> {
        self.node_offset[k]..self.node_offset[k] + self.graphs[k].n_nodes
    }

    pub fn app_links(&self, k: usize) -> Range<usize> {
        self.link_offset[k]..self.link_offset[k] + self.graphs[k].n_links()
    }

    pub fn n_nodes_of(&self, k: usize) -> usize {
        self.graphs[k].n_nodes
    }

    pub fn app_index(&self, name: &str) -> Option<usize> {
        self.apps.iter().position(|a| a.name == name)
    }
}
