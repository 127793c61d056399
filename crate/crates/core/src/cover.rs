//! Truncated universal covering of a Coxeter graph.
//!
//! Vertices of the covering tree are the non-backtracking walks starting at
//! a fixed root; the projection sends a walk to its last vertex.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{CoxeterGraph, GraphError, VertexId};

/// Safety cap on the number of enumerated walks.
pub const MAX_COVER_VERTICES: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("{{{0}, {1}}} is not an edge of the base graph")]
    NotAnEdge(String, String),
    #[error("truncation depth must be at least {min}, got {depth}")]
    BadDepth { depth: usize, min: usize },
    #[error("covering to depth {depth} would exceed {MAX_COVER_VERTICES} vertices")]
    TooLarge { depth: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Index of a covering vertex; ids follow breadth-first order.
pub type CoverId = u32;

/// A non-backtracking walk `(v_0, …, v_k)` from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverVertex {
    pub path: Vec<VertexId>,
}

impl CoverVertex {
    pub fn depth(&self) -> usize {
        self.path.len() - 1
    }

    /// The projection `p`.
    pub fn project(&self) -> VertexId {
        *self.path.last().unwrap()
    }

    /// Tree distance through the longest common prefix.
    pub fn distance(&self, other: &CoverVertex) -> usize {
        let common = self
            .path
            .iter()
            .zip(&other.path)
            .take_while(|(a, b)| a == b)
            .count();
        self.path.len() + other.path.len() - 2 * common
    }

    pub fn render(&self, g: &CoxeterGraph) -> String {
        let names: Vec<&str> = self.path.iter().map(|&v| g.name(v)).collect();
        format!("({})", names.join(","))
    }
}

/// Which side of the distinguished edge a vertex lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Strictly closer to `s1'`.
    First,
    /// Strictly closer to `s2'`.
    Second,
}

#[derive(Debug, Clone)]
pub struct CoveredGraph {
    graph: CoxeterGraph,
    root: VertexId,
    mate: VertexId,
    depth: usize,
    vertices: Vec<CoverVertex>,
    parent: Vec<Option<CoverId>>,
    children: Vec<Vec<CoverId>>,
    index: HashMap<Vec<VertexId>, CoverId>,
}

impl CoveredGraph {
    /// Enumerates every non-backtracking walk from `s1` of length at most `depth`.
    pub fn build(
        g: &CoxeterGraph,
        s1: VertexId,
        s2: VertexId,
        depth: usize,
    ) -> Result<Self, CoverError> {
        if !g.is_edge(s1, s2) {
            return Err(CoverError::NotAnEdge(g.name(s1).into(), g.name(s2).into()));
        }
        if depth < 2 {
            return Err(CoverError::BadDepth { depth, min: 2 });
        }
        let mut cover = CoveredGraph {
            graph: g.clone(),
            root: s1,
            mate: s2,
            depth,
            vertices: vec![CoverVertex { path: vec![s1] }],
            parent: vec![None],
            children: vec![Vec::new()],
            index: HashMap::new(),
        };
        cover.index.insert(vec![s1], 0);
        let mut frontier: Vec<CoverId> = vec![0];
        for _ in 0..depth {
            let mut next = Vec::new();
            for &id in &frontier {
                let path = cover.vertices[id as usize].path.clone();
                let last = *path.last().unwrap();
                let prev = path.len().checked_sub(2).map(|i| path[i]);
                for &w in g.neighbors(last) {
                    if Some(w) == prev {
                        continue;
                    }
                    if cover.vertices.len() >= MAX_COVER_VERTICES {
                        return Err(CoverError::TooLarge { depth });
                    }
                    let mut p = path.clone();
                    p.push(w);
                    let child = cover.vertices.len() as CoverId;
                    cover.index.insert(p.clone(), child);
                    cover.vertices.push(CoverVertex { path: p });
                    cover.parent.push(Some(id));
                    cover.children.push(Vec::new());
                    cover.children[id as usize].push(child);
                    next.push(child);
                }
            }
            frontier = next;
        }
        Ok(cover)
    }

    pub fn graph(&self) -> &CoxeterGraph {
        &self.graph
    }

    pub fn root_vertex(&self) -> VertexId {
        self.root
    }

    pub fn mate_vertex(&self) -> VertexId {
        self.mate
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, id: CoverId) -> &CoverVertex {
        &self.vertices[id as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (CoverId, &CoverVertex)> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (i as CoverId, v))
    }

    pub fn find(&self, path: &[VertexId]) -> Option<CoverId> {
        self.index.get(path).copied()
    }

    /// Looks a walk up by vertex names.
    pub fn find_named(&self, names: &[&str]) -> Result<Option<CoverId>, GraphError> {
        let path = names
            .iter()
            .map(|n| self.graph.vertex(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.find(&path))
    }

    /// `s1'`.
    pub fn s1_lift(&self) -> CoverId {
        0
    }

    /// `s2'`.
    pub fn s2_lift(&self) -> CoverId {
        self.find(&[self.root, self.mate]).expect("depth >= 2")
    }

    pub fn project(&self, id: CoverId) -> VertexId {
        self.vertex(id).project()
    }

    pub fn depth_of(&self, id: CoverId) -> usize {
        self.vertex(id).depth()
    }

    pub fn parent(&self, id: CoverId) -> Option<CoverId> {
        self.parent[id as usize]
    }

    pub fn children(&self, id: CoverId) -> &[CoverId] {
        &self.children[id as usize]
    }

    /// Neighbors inside the truncation: parent first, then children.
    pub fn neighbors(&self, id: CoverId) -> Vec<CoverId> {
        self.parent(id)
            .into_iter()
            .chain(self.children(id).iter().copied())
            .collect()
    }

    /// The neighbor of `id` lying over `s`, if it is inside the truncation.
    pub fn neighbor_over(&self, id: CoverId, s: VertexId) -> Option<CoverId> {
        self.neighbors(id)
            .into_iter()
            .find(|&b| self.project(b) == s)
    }

    /// Tree edges as `(parent, child)`.
    pub fn edges(&self) -> impl Iterator<Item = (CoverId, CoverId)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c as CoverId)))
    }

    pub fn distance(&self, a: CoverId, b: CoverId) -> usize {
        self.vertex(a).distance(self.vertex(b))
    }

    pub fn side(&self, id: CoverId) -> Side {
        let d1 = self.distance(id, self.s1_lift());
        let d2 = self.distance(id, self.s2_lift());
        if d1 < d2 {
            Side::First
        } else {
            Side::Second
        }
    }

    /// `(S1', S2')`: vertices strictly closer to `s1'`, resp. `s2'`.
    pub fn partition(&self) -> (Vec<CoverId>, Vec<CoverId>) {
        self.vertices()
            .map(|(id, _)| id)
            .partition(|&id| self.side(id) == Side::First)
    }

    /// Checks that every vertex below the truncation depth projects its
    /// neighborhood bijectively onto the base neighborhood.
    pub fn covering_property_holds(&self) -> bool {
        self.vertices()
            .filter(|(_, v)| v.depth() < self.depth)
            .all(|(id, v)| {
                let mut proj: Vec<VertexId> = self
                    .neighbors(id)
                    .iter()
                    .map(|&b| self.project(b))
                    .collect();
                proj.sort_unstable();
                proj == self.graph.neighbors(v.project())
            })
    }

    /// One line per vertex: `path<TAB>depth<TAB>projection`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (_, v) in self.vertices() {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                v.render(&self.graph),
                v.depth(),
                self.graph.name(v.project())
            ));
        }
        out
    }
}
