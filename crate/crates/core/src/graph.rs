//! Coxeter graphs: parsing, spanning trees, circuits and the closed-path
//! generators of the fundamental group.
//!
//! A Coxeter graph has the generators as vertices and an edge `{s, t}`
//! whenever `m_st >= 3`, labelled by `m_st` (possibly infinite). Pairs with
//! `m_st = 2` are simply absent. Every tie in this module is broken by the
//! order in which vertices were declared, so trees and generators are
//! reproducible from the input text alone.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Index of a vertex in declaration order.
pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: loop edge on vertex `{vertex}`")]
    LoopEdge { line: usize, vertex: String },
    #[error("line {line}: duplicate edge {{{a}, {b}}}")]
    DuplicateEdge { line: usize, a: String, b: String },
    #[error("line {line}: bad label `{label}` (expected an integer >= 3 or `inf`)")]
    BadLabel { line: usize, label: String },
    #[error("graph is not connected")]
    Disconnected,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("not a spanning tree of this graph")]
    NotSpanningTree,
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(String, String),
}

/// Edge label `m_st`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Finite(u32),
    Infinite,
}

impl Label {
    pub fn finite(self) -> Option<u32> {
        match self {
            Label::Finite(m) => Some(m),
            Label::Infinite => None,
        }
    }

    /// True for `m >= 4`, including infinity.
    pub fn is_big(self) -> bool {
        match self {
            Label::Finite(m) => m >= 4,
            Label::Infinite => true,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(m) => write!(f, "{m}"),
            Label::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Label::Finite(m) => s.serialize_u32(*m),
            Label::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Order of the product `st` in the Coxeter group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOrder {
    Finite(u32),
    Infinite,
}

/// A finite, connected, simple graph with labelled edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterGraph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    /// Keyed by `(min, max)` vertex id.
    edges: BTreeMap<(VertexId, VertexId), Label>,
    adjacency: Vec<Vec<VertexId>>,
}

fn key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CoxeterGraph {
    /// Builds and validates a graph from names and `(a, b, label)` triples.
    pub fn new<S: AsRef<str>>(names: &[S], edges: &[(S, S, Label)]) -> Result<Self, GraphError> {
        let mut builder = Builder::default();
        for n in names {
            builder.declare(n.as_ref(), 0)?;
        }
        for (a, b, l) in edges {
            builder.edge(a.as_ref(), b.as_ref(), *l, 0)?;
        }
        builder.finish()
    }

    /// Parses the line-based graph format:
    ///
    /// ```text
    /// # comment
    /// vertices: a b c
    /// edge a b 3
    /// edge b c inf
    /// ```
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut builder = Builder::default();
        let mut seen_vertices = false;
        let mut pending = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("vertices:") {
                if seen_vertices {
                    return Err(GraphError::Syntax {
                        line,
                        message: "more than one vertices line".into(),
                    });
                }
                seen_vertices = true;
                let mut any = false;
                for name in rest.split_whitespace() {
                    builder.declare(name, line)?;
                    any = true;
                }
                if !any {
                    return Err(GraphError::Syntax {
                        line,
                        message: "vertices line declares no vertices".into(),
                    });
                }
                continue;
            }
            let toks: Vec<&str> = trimmed.split_whitespace().collect();
            if toks[0] != "edge" {
                return Err(GraphError::Syntax {
                    line,
                    message: format!("unrecognized line `{trimmed}`"),
                });
            }
            if toks.len() != 4 {
                return Err(GraphError::Syntax {
                    line,
                    message: "expected `edge <name> <name> <label>`".into(),
                });
            }
            let label = parse_label(toks[3]).ok_or_else(|| GraphError::BadLabel {
                line,
                label: toks[3].to_string(),
            })?;
            pending.push((line, toks[1].to_string(), toks[2].to_string(), label));
        }
        if !seen_vertices {
            return Err(GraphError::Syntax {
                line: 0,
                message: "missing vertices line".into(),
            });
        }
        for (line, a, b, label) in pending {
            builder.edge(&a, &b, label, line)?;
        }
        builder.finish()
    }

    /// Renders the graph back into the text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = format!("vertices: {}\n", self.names.join(" "));
        for (&(a, b), label) in &self.edges {
            out.push_str(&format!(
                "edge {} {} {}\n",
                self.names[a], self.names[b], label
            ));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    /// Edges as `(a, b, label)` with `a < b`, ordered by `(a, b)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Label)> + '_ {
        self.edges.iter().map(|(&(a, b), &l)| (a, b, l))
    }

    pub fn label(&self, a: VertexId, b: VertexId) -> Option<Label> {
        self.edges.get(&key(a, b)).copied()
    }

    pub fn is_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains_key(&key(a, b))
    }

    /// Order of `st`: 1 on the diagonal, 2 for non-adjacent pairs.
    pub fn pair_order(&self, s: VertexId, t: VertexId) -> PairOrder {
        if s == t {
            return PairOrder::Finite(1);
        }
        match self.label(s, t) {
            None => PairOrder::Finite(2),
            Some(Label::Finite(m)) => PairOrder::Finite(m),
            Some(Label::Infinite) => PairOrder::Infinite,
        }
    }

    /// `E_s`, in declaration order.
    pub fn neighbors(&self, s: VertexId) -> &[VertexId] {
        &self.adjacency[s]
    }

    pub fn neighbors_of(&self, name: &str) -> Result<Vec<&str>, GraphError> {
        let s = self.vertex(name)?;
        Ok(self.adjacency[s].iter().map(|&t| self.name(t)).collect())
    }

    /// Finite labels that occur on edges.
    pub fn finite_labels(&self) -> BTreeSet<u32> {
        self.edges.values().filter_map(|l| l.finite()).collect()
    }

    /// Largest finite label, or `None` for a graph without finite labels.
    pub fn max_finite_label(&self) -> Option<u32> {
        self.finite_labels().into_iter().max()
    }

    /// `|E| - |S| + 1`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + 1 - self.names.len()
    }

    pub fn classify_case(&self) -> CaseTag {
        match self.cycle_rank() {
            0 => CaseTag::Tree,
            1 if self.edges.values().any(|l| l.is_big()) => CaseTag::OneCircuitWithBigLabel,
            1 => CaseTag::OneCircuitAllThrees,
            _ => CaseTag::TwoCircuits,
        }
    }

    /// Replaces every infinite label by `m0`.
    pub fn replace_infinite_labels(&self, m0: u32) -> CoxeterGraph {
        assert!(m0 >= 3, "replacement label must be at least 3");
        let mut g = self.clone();
        for l in g.edges.values_mut() {
            if *l == Label::Infinite {
                *l = Label::Finite(m0);
            }
        }
        g
    }

    /// Breadth-first spanning tree; neighbors are visited in declaration order.
    pub fn spanning_tree(&self, root: VertexId) -> Result<SpanningTree, GraphError> {
        if root >= self.len() {
            return Err(GraphError::UnknownVertex(root.to_string()));
        }
        let mut parent = vec![None; self.len()];
        let mut depth = vec![usize::MAX; self.len()];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        SpanningTree::from_parents(self, root, parent)
    }

    /// One closed-path generator per non-tree edge, in edge order, each based at `s0`.
    pub fn fundamental_generators(
        &self,
        tree: &SpanningTree,
        s0: VertexId,
    ) -> Result<Vec<ClosedPathGenerator>, GraphError> {
        if !tree.spans(self) {
            return Err(GraphError::NotSpanningTree);
        }
        if s0 >= self.len() {
            return Err(GraphError::UnknownVertex(s0.to_string()));
        }
        let mut out = Vec::new();
        for (a, b, _) in self.edges() {
            if tree.contains_edge(a, b) {
                continue;
            }
            let to_a = tree.path(s0, a).vertices;
            let ab = tree.path(a, b).vertices;
            // first vertex on the way from s0 to a that lies on the circuit
            let on_circuit: BTreeSet<VertexId> = ab.iter().copied().collect();
            let attach_pos = to_a.iter().position(|v| on_circuit.contains(v)).unwrap();
            let attach = to_a[attach_pos];
            let da = tree.path(attach, a).vertices.len();
            let db = tree.path(attach, b).vertices.len();
            let (tail, head) = if da > db || (da == db && a < b) {
                (a, b)
            } else {
                (b, a)
            };
            let mut path: Vec<VertexId> = to_a[..=attach_pos].to_vec();
            path.extend(tree.path(attach, tail).vertices.into_iter().skip(1));
            path.extend(tree.path(head, attach).vertices);
            let back: Vec<VertexId> = to_a[..attach_pos].iter().rev().copied().collect();
            path.extend(back);
            out.push(ClosedPathGenerator {
                edge: (a, b),
                tail,
                head,
                attach,
                path,
            });
        }
        Ok(out)
    }

    /// True for the three-vertex path with labels 3 and infinity.
    pub fn pgl_roles(&self) -> Option<[VertexId; 3]> {
        if self.len() != 3 || self.edge_count() != 2 {
            return None;
        }
        let middle = (0..3).find(|&v| self.adjacency[v].len() == 2)?;
        let ends = &self.adjacency[middle];
        let (mut three, mut inf) = (None, None);
        for &e in ends {
            match self.label(middle, e)? {
                Label::Finite(3) => three = Some(e),
                Label::Infinite => inf = Some(e),
                _ => return None,
            }
        }
        Some([three?, middle, inf?])
    }
}

fn parse_label(tok: &str) -> Option<Label> {
    if tok == "inf" {
        return Some(Label::Infinite);
    }
    match tok.parse::<u32>() {
        Ok(m) if m >= 3 => Some(Label::Finite(m)),
        _ => None,
    }
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: BTreeMap<(VertexId, VertexId), Label>,
}

impl Builder {
    fn declare(&mut self, name: &str, line: usize) -> Result<(), GraphError> {
        if self.index.contains_key(name) {
            return Err(GraphError::Syntax {
                line,
                message: format!("vertex `{name}` declared twice"),
            });
        }
        self.index.insert(name.to_string(), self.names.len());
        self.names.push(name.to_string());
        Ok(())
    }

    fn edge(&mut self, a: &str, b: &str, label: Label, line: usize) -> Result<(), GraphError> {
        let undeclared = |n: &str| GraphError::Syntax {
            line,
            message: format!("edge endpoint `{n}` is not declared"),
        };
        let ia = *self.index.get(a).ok_or_else(|| undeclared(a))?;
        let ib = *self.index.get(b).ok_or_else(|| undeclared(b))?;
        if ia == ib {
            return Err(GraphError::LoopEdge {
                line,
                vertex: a.to_string(),
            });
        }
        if let Label::Finite(m) = label {
            if m < 3 {
                return Err(GraphError::BadLabel {
                    line,
                    label: m.to_string(),
                });
            }
        }
        if self.edges.insert(key(ia, ib), label).is_some() {
            return Err(GraphError::DuplicateEdge {
                line,
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        Ok(())
    }

    fn finish(self) -> Result<CoxeterGraph, GraphError> {
        if self.names.is_empty() {
            return Err(GraphError::Syntax {
                line: 0,
                message: "no vertices".into(),
            });
        }
        let mut adjacency = vec![Vec::new(); self.names.len()];
        for &(a, b) in self.edges.keys() {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let g = CoxeterGraph {
            names: self.names,
            index: self.index,
            edges: self.edges,
            adjacency,
        };
        let mut seen = vec![false; g.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &g.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }
}

/// Circuit structure of a graph, as far as the constructions care.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    TwoCircuits,
    OneCircuitWithBigLabel,
    OneCircuitAllThrees,
    Tree,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A walk through adjacent vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<VertexId>,
}

impl Path {
    pub fn is_walk_in(&self, g: &CoxeterGraph) -> bool {
        !self.vertices.is_empty() && self.vertices.windows(2).all(|w| g.is_edge(w[0], w[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    depth: Vec<usize>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl SpanningTree {
    /// Validates a parent map against `g`.
    pub fn from_parents(
        g: &CoxeterGraph,
        root: VertexId,
        parent: Vec<Option<VertexId>>,
    ) -> Result<Self, GraphError> {
        if parent.len() != g.len() || parent[root].is_some() {
            return Err(GraphError::NotSpanningTree);
        }
        let mut edges = BTreeSet::new();
        let mut depth = vec![0; g.len()];
        for v in 0..g.len() {
            if v == root {
                continue;
            }
            let p = parent[v].ok_or(GraphError::NotSpanningTree)?;
            if !g.is_edge(v, p) {
                return Err(GraphError::NotSpanningTree);
            }
            edges.insert(key(v, p));
            // walking up must reach the root within |S| steps
            let (mut cur, mut steps) = (v, 0);
            while let Some(up) = parent[cur] {
                cur = up;
                steps += 1;
                if steps > g.len() {
                    return Err(GraphError::NotSpanningTree);
                }
            }
            if cur != root {
                return Err(GraphError::NotSpanningTree);
            }
            depth[v] = steps;
        }
        Ok(SpanningTree {
            root,
            parent,
            depth,
            edges,
        })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    /// Tree edge set `E_0`, as `(min, max)` pairs.
    pub fn edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.edges
    }

    pub fn contains_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains(&key(a, b))
    }

    fn spans(&self, g: &CoxeterGraph) -> bool {
        self.parent.len() == g.len()
            && self.edges.len() + 1 == g.len()
            && self.edges.iter().all(|&(a, b)| g.is_edge(a, b))
    }

    /// The unique simple path from `a` to `b` inside the tree.
    pub fn path(&self, a: VertexId, b: VertexId) -> Path {
        let (mut x, mut y) = (a, b);
        let mut up = vec![x];
        let mut down = vec![y];
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].unwrap();
            up.push(x);
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].unwrap();
            down.push(y);
        }
        while x != y {
            x = self.parent[x].unwrap();
            y = self.parent[y].unwrap();
            up.push(x);
            down.push(y);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        Path { vertices: up }
    }

    pub fn tree_path(&self, g: &CoxeterGraph, a: &str, b: &str) -> Result<Path, GraphError> {
        Ok(self.path(g.vertex(a)?, g.vertex(b)?))
    }
}

/// Closed path at the base vertex crossing one non-tree edge exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedPathGenerator {
    /// The defining non-tree edge, `(min, max)`.
    pub edge: (VertexId, VertexId),
    /// Endpoint the path visits first when crossing `edge`.
    pub tail: VertexId,
    /// Endpoint the path visits right after crossing `edge`.
    pub head: VertexId,
    /// Vertex where the base path meets the circuit.
    pub attach: VertexId,
    /// Vertex sequence, starting and ending at the base vertex.
    pub path: Vec<VertexId>,
}

impl ClosedPathGenerator {
    pub fn base(&self) -> VertexId {
        self.path[0]
    }

    /// The same loop walked backwards.
    pub fn reversed(&self) -> ClosedPathGenerator {
        ClosedPathGenerator {
            edge: self.edge,
            tail: self.head,
            head: self.tail,
            attach: self.attach,
            path: self.path.iter().rev().copied().collect(),
        }
    }

    /// Orients the loop so that it crosses its edge from `tail` to `head`.
    pub fn oriented(&self, tail: VertexId, head: VertexId) -> Option<ClosedPathGenerator> {
        if (self.tail, self.head) == (tail, head) {
            Some(self.clone())
        } else if (self.head, self.tail) == (tail, head) {
            Some(self.reversed())
        } else {
            None
        }
    }

    /// Number of edges traversed.
    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() <= 1
    }

    pub fn render(&self, g: &CoxeterGraph) -> String {
        let names: Vec<&str> = self.path.iter().map(|&v| g.name(v)).collect();
        format!("({})", names.join(","))
    }
}
