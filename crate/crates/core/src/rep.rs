//! The three representation families as exact, locally finite operators on a
//! truncation window.
//!
//! Each family lives on an infinite basis. A [`RepWindow`] keeps a *core*
//! (where assertions are made) plus a *buffer* of `B` extra layers. Every
//! generator has an explicit action table on all indices up to one layer
//! below the outer edge, so any word of length `≤ B` applied to a core
//! vector is computed without truncation. Reaching past the table is a hard
//! [`RepError::WindowExceeded`], never a silent zero.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::cover::{CoverError, CoverId, CoveredGraph};
use crate::graph::{ClosedPathGenerator, CoxeterGraph, GraphError, Label, SpanningTree, VertexId};
use crate::linalg::SparseRow;
use crate::scalar::{Scalar, ScalarContext, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("construction preconditions violated: {0}")]
    CaseMismatch(String),
    #[error("covering depth {have} is too shallow, need {need}")]
    TooShallow { have: usize, need: usize },
    #[error("index {index} is outside the action window")]
    WindowExceeded { index: String },
    #[error("word of length {len} exceeds buffer {buffer}")]
    WordTooLong { len: usize, buffer: usize },
    #[error("vector is not in the (-1)-eigenspace of {0}")]
    NotInMinusEigenspace(String),
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(String, String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// A basis vector of one of the three families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisIndex {
    /// `α_{s,n}`.
    Pi1 { vertex: VertexId, n: i64 },
    /// `α_a` for a covering vertex `a`.
    Cov(CoverId),
    /// `u_i`, `i ≥ 0`.
    PglU(u32),
    /// `v_i`, `i ≥ 1`.
    PglV(u32),
}

/// Finite linear combination of basis vectors with no stored zeros.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SparseVector(SparseRow<BasisIndex>);

impl fmt::Debug for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().map(|(k, v)| (k, v.to_string())))
            .finish()
    }
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(index: BasisIndex, ctx: &Arc<ScalarContext>) -> Self {
        let mut v = Self::zero();
        v.add_term(index, &ctx.one());
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisIndex, Scalar)>) -> Self {
        let mut v = Self::zero();
        for (i, c) in terms {
            v.add_term(i, &c);
        }
        v
    }

    pub fn from_row(row: SparseRow<BasisIndex>) -> Self {
        Self::from_terms(row)
    }

    pub fn as_row(&self) -> &SparseRow<BasisIndex> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: &BasisIndex) -> Option<&Scalar> {
        self.0.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.0.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &BasisIndex> {
        self.0.keys()
    }

    pub fn add_term(&mut self, index: BasisIndex, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.0.get_mut(&index) {
            Some(cur) => {
                *cur = &*cur + coeff;
                if cur.is_zero() {
                    self.0.remove(&index);
                }
            }
            None => {
                self.0.insert(index, coeff.clone());
            }
        }
    }

    /// `self += coeff * other`.
    pub fn add_scaled(&mut self, coeff: &Scalar, other: &SparseVector) {
        for (i, c) in other.iter() {
            self.add_term(*i, &(coeff * c));
        }
    }

    pub fn plus(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_term(*i, c);
        }
        out
    }

    pub fn minus(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_term(*i, &-c);
        }
        out
    }

    pub fn scaled(&self, coeff: &Scalar) -> SparseVector {
        let mut out = SparseVector::zero();
        out.add_scaled(coeff, self);
        out
    }

    pub fn neg(&self) -> SparseVector {
        SparseVector(self.0.iter().map(|(k, v)| (*k, -v)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pi1,
    Cover,
    Pgl,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Pi1 => "pi1",
            Family::Cover => "cover",
            Family::Pgl => "pgl",
        })
    }
}

/// A special non-tree edge traversed from `tail` to `head` by its generator loop.
///
/// In the gluing formulas `head` plays `s_i` and `tail` plays `t_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedSpecialEdge {
    pub tail: VertexId,
    pub head: VertexId,
}

#[derive(Debug, Clone)]
pub struct Pi1Structure {
    pub tree: SpanningTree,
    pub base: VertexId,
    pub e1: OrientedSpecialEdge,
    pub e2: OrientedSpecialEdge,
    /// Generator loops: `c_1` through `e1`, `c_2` through `e2`, then the rest.
    pub generators: Vec<ClosedPathGenerator>,
}

#[derive(Debug, Clone)]
pub struct CoverStructure {
    pub cover: CoveredGraph,
    pub s1: VertexId,
    pub s2: VertexId,
    pub label: u32,
}

#[derive(Debug, Clone)]
pub struct PglStructure {
    /// Graph vertices playing `s1`, `s2`, `s3`.
    pub roles: [VertexId; 3],
}

#[derive(Debug, Clone)]
pub enum Structure {
    Pi1(Pi1Structure),
    Cover(CoverStructure),
    Pgl(PglStructure),
}

type ActionTable = BTreeMap<BasisIndex, SparseVector>;

/// Generator action tables of one family on a finite window.
#[derive(Debug, Clone)]
pub struct RepWindow {
    family: Family,
    graph: CoxeterGraph,
    ctx: Arc<ScalarContext>,
    core: usize,
    buffer: usize,
    tables: Vec<ActionTable>,
    core_indices: Vec<BasisIndex>,
    structure: Structure,
}

fn coupling(
    ctx: &Arc<ScalarContext>,
    g: &CoxeterGraph,
    s: VertexId,
    t: VertexId,
) -> Result<Scalar, ScalarError> {
    ctx.two_cos(1, g.label(s, t).expect("caller checks adjacency"))
}

/// `α + c β`.
fn glue(ctx: &Arc<ScalarContext>, this: BasisIndex, c: Scalar, other: BasisIndex) -> SparseVector {
    SparseVector::from_terms([(this, ctx.one()), (other, c)])
}

/// Pulls infinite labels down to `m0`, leaving everything else unchanged.
pub fn replace_infinite_labels(g: &CoxeterGraph, m0: u32) -> CoxeterGraph {
    g.replace_infinite_labels(m0)
}

/// Representation glued along the fundamental group of the graph.
///
/// `α_{s,n}` for `s ∈ S`, `n ∈ Z`. Generators negate their own lines, couple
/// adjacent lines at the same level with `2cos(π/m)`, and along the two
/// special edges shift the level by one (the second with dyadic weights).
#[allow(clippy::too_many_arguments)]
pub fn build_pi1_rep(
    g: &CoxeterGraph,
    tree: &SpanningTree,
    base: VertexId,
    e1: OrientedSpecialEdge,
    e2: OrientedSpecialEdge,
    window: usize,
    buffer: usize,
    ctx: &Arc<ScalarContext>,
) -> Result<RepWindow, RepError> {
    let mismatch = |m: &str| Err(RepError::CaseMismatch(m.to_string()));
    if g.cycle_rank() < 2 {
        return mismatch("graph needs at least two independent circuits");
    }
    if g.edges().any(|(_, _, l)| l == Label::Infinite) {
        return mismatch("infinite labels must be replaced first");
    }
    if window < 1 || buffer < 1 {
        return mismatch("window and buffer must be positive");
    }
    let key = |e: OrientedSpecialEdge| (e.tail.min(e.head), e.tail.max(e.head));
    if key(e1) == key(e2) {
        return mismatch("special edges must be distinct");
    }
    for e in [e1, e2] {
        if !g.is_edge(e.tail, e.head) || tree.contains_edge(e.tail, e.head) {
            return mismatch(&format!(
                "{{{}, {}}} is not a non-tree edge",
                g.name(e.tail),
                g.name(e.head)
            ));
        }
    }
    let all = g.fundamental_generators(tree, base)?;
    let mut generators = Vec::with_capacity(all.len());
    for e in [e1, e2] {
        let c = all
            .iter()
            .find(|c| c.edge == key(e))
            .expect("one loop per non-tree edge");
        generators.push(c.oriented(e.tail, e.head).unwrap());
    }
    generators.extend(
        all.iter()
            .filter(|c| c.edge != key(e1) && c.edge != key(e2))
            .cloned(),
    );

    let c1 = coupling(ctx, g, e1.head, e1.tail)?;
    let c2 = coupling(ctx, g, e2.head, e2.tail)?;
    let reach = (window + buffer - 1) as i64;
    let mut tables = vec![ActionTable::new(); g.len()];
    for (s, table) in tables.iter_mut().enumerate() {
        for t in 0..g.len() {
            let generic = if s != t && g.is_edge(s, t) {
                Some(coupling(ctx, g, s, t)?)
            } else {
                None
            };
            for n in -reach..=reach {
                let here = BasisIndex::Pi1 { vertex: t, n };
                let at = |v, n| BasisIndex::Pi1 { vertex: v, n };
                let image = if s == t {
                    SparseVector::unit(here, ctx).neg()
                } else if (s, t) == (e1.head, e1.tail) {
                    glue(ctx, here, c1.clone(), at(s, n + 1))
                } else if (s, t) == (e1.tail, e1.head) {
                    glue(ctx, here, c1.clone(), at(s, n - 1))
                } else if (s, t) == (e2.head, e2.tail) {
                    glue(ctx, here, &ctx.pow2(n) * &c2, at(s, n + 1))
                } else if (s, t) == (e2.tail, e2.head) {
                    glue(ctx, here, &ctx.pow2(1 - n) * &c2, at(s, n - 1))
                } else if let Some(c) = &generic {
                    glue(ctx, here, c.clone(), at(s, n))
                } else {
                    SparseVector::unit(here, ctx)
                };
                table.insert(here, image);
            }
        }
    }
    let core_indices = (0..g.len())
        .flat_map(|v| {
            (-(window as i64)..=window as i64).map(move |n| BasisIndex::Pi1 { vertex: v, n })
        })
        .collect();
    Ok(RepWindow {
        family: Family::Pi1,
        graph: g.clone(),
        ctx: Arc::clone(ctx),
        core: window,
        buffer,
        tables,
        core_indices,
        structure: Structure::Pi1(Pi1Structure {
            tree: tree.clone(),
            base,
            e1,
            e2,
            generators,
        }),
    })
}

/// Representation on the universal covering, `α_a` for covering vertices `a`.
///
/// The distinguished edge `{s1', s2'}` is coupled with `2cos(2π/m)`, every
/// other covering edge with `2cos(π/m)` (2 for infinite labels).
pub fn build_cover_rep(
    g: &CoxeterGraph,
    cover: &CoveredGraph,
    depth: usize,
    buffer: usize,
    ctx: &Arc<ScalarContext>,
) -> Result<RepWindow, RepError> {
    let (s1, s2) = (cover.root_vertex(), cover.mate_vertex());
    let label = match g.label(s1, s2) {
        Some(Label::Finite(m)) if m >= 4 => m,
        Some(l) => {
            return Err(RepError::CaseMismatch(format!(
                "distinguished edge needs a finite label >= 4, got {l}"
            )))
        }
        None => return Err(RepError::NotAnEdge(g.name(s1).into(), g.name(s2).into())),
    };
    if buffer < 1 {
        return Err(RepError::CaseMismatch("buffer must be positive".into()));
    }
    if cover.depth() < depth + buffer {
        return Err(RepError::TooShallow {
            have: cover.depth(),
            need: depth + buffer,
        });
    }
    let special = ctx.two_cos(2, Label::Finite(label))?;
    let (s1p, s2p) = (cover.s1_lift(), cover.s2_lift());
    let mut tables = vec![ActionTable::new(); g.len()];
    for (s, table) in tables.iter_mut().enumerate() {
        let couplings: Vec<Option<Scalar>> = (0..g.len())
            .map(|t| {
                if t != s && g.is_edge(s, t) {
                    coupling(ctx, g, s, t).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<_, _>>()?;
        for (a, v) in cover.vertices() {
            if v.depth() + 1 > depth + buffer {
                continue;
            }
            let here = BasisIndex::Cov(a);
            let pa = v.project();
            let image = if s == pa {
                SparseVector::unit(here, ctx).neg()
            } else if s == s1 && a == s2p {
                glue(ctx, here, special.clone(), BasisIndex::Cov(s1p))
            } else if s == s2 && a == s1p {
                glue(ctx, here, special.clone(), BasisIndex::Cov(s2p))
            } else if let Some(c) = &couplings[pa] {
                let b = cover.neighbor_over(a, s).expect("covering deep enough");
                glue(ctx, here, c.clone(), BasisIndex::Cov(b))
            } else {
                SparseVector::unit(here, ctx)
            };
            table.insert(here, image);
        }
    }
    let core_indices = cover
        .vertices()
        .filter(|(_, v)| v.depth() <= depth)
        .map(|(a, _)| BasisIndex::Cov(a))
        .collect();
    Ok(RepWindow {
        family: Family::Cover,
        graph: g.clone(),
        ctx: Arc::clone(ctx),
        core: depth,
        buffer,
        tables,
        core_indices,
        structure: Structure::Cover(CoverStructure {
            cover: cover.clone(),
            s1,
            s2,
            label,
        }),
    })
}

/// Representation of the group with graph `s1 -3- s2 -inf- s3`.
///
/// `u_0` spans a trivial summand for `<s1, s2>`, each pair `(u_i, v_i)` a
/// copy of `ρ_1`; `s3` permutes the basis along a ladder.
pub fn build_pgl_rep(
    g: &CoxeterGraph,
    window: usize,
    buffer: usize,
    ctx: &Arc<ScalarContext>,
) -> Result<RepWindow, RepError> {
    let roles = g.pgl_roles().ok_or_else(|| {
        RepError::CaseMismatch("graph must be a path with labels 3 and inf".into())
    })?;
    if window < 1 || buffer < 1 {
        return Err(RepError::CaseMismatch(
            "window and buffer must be positive".into(),
        ));
    }
    let [r1, r2, r3] = roles;
    let reach = (window + buffer - 1) as u32;
    let half = |n| ctx.ratio(n, 2);
    let mut tables = vec![ActionTable::new(); g.len()];
    for i in 0..=reach {
        let u = BasisIndex::PglU(i);
        tables[r1].insert(u, SparseVector::unit(u, ctx));
        if i == 0 {
            tables[r2].insert(u, SparseVector::unit(u, ctx));
        } else {
            let v = BasisIndex::PglV(i);
            tables[r1].insert(v, SparseVector::unit(v, ctx).neg());
            tables[r2].insert(u, SparseVector::from_terms([(u, half(-1)), (v, half(3))]));
            tables[r2].insert(v, SparseVector::from_terms([(u, half(1)), (v, half(1))]));
            let vpartner = if i % 2 == 1 { i + 1 } else { i - 1 };
            tables[r3].insert(v, SparseVector::unit(BasisIndex::PglV(vpartner), ctx));
        }
        let upartner = if i % 2 == 0 { i + 1 } else { i - 1 };
        tables[r3].insert(u, SparseVector::unit(BasisIndex::PglU(upartner), ctx));
    }
    let mut core_indices = vec![BasisIndex::PglU(0)];
    for i in 1..=window as u32 {
        core_indices.push(BasisIndex::PglU(i));
        core_indices.push(BasisIndex::PglV(i));
    }
    core_indices.sort();
    Ok(RepWindow {
        family: Family::Pgl,
        graph: g.clone(),
        ctx: Arc::clone(ctx),
        core: window,
        buffer,
        tables,
        core_indices,
        structure: Structure::Pgl(PglStructure { roles }),
    })
}

impl RepWindow {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn graph(&self) -> &CoxeterGraph {
        &self.graph
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    /// `W` or `D`.
    pub fn core(&self) -> usize {
        self.core
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn generator_count(&self) -> usize {
        self.tables.len()
    }

    pub fn generator_name(&self, s: VertexId) -> &str {
        self.graph.name(s)
    }

    /// Core basis indices in index order.
    pub fn core_indices(&self) -> &[BasisIndex] {
        &self.core_indices
    }

    pub fn is_core(&self, index: &BasisIndex) -> bool {
        let w = self.core as i64;
        match (*index, &self.structure) {
            (BasisIndex::Pi1 { n, .. }, Structure::Pi1(_)) => n.abs() <= w,
            (BasisIndex::Cov(a), Structure::Cover(c)) => c.cover.depth_of(a) <= self.core,
            (BasisIndex::PglU(i), Structure::Pgl(_)) => i as i64 <= w,
            (BasisIndex::PglV(i), Structure::Pgl(_)) => i >= 1 && i as i64 <= w,
            _ => false,
        }
    }

    /// Whether `s` has an action table entry for `index`.
    pub fn in_domain(&self, index: &BasisIndex) -> bool {
        self.tables[0].contains_key(index)
    }

    pub fn unit(&self, index: BasisIndex) -> SparseVector {
        SparseVector::unit(index, &self.ctx)
    }

    /// Core indices of the (-1)-eigenspace of `s` spanned by basis vectors.
    pub fn minus_indices(&self, s: VertexId) -> Vec<BasisIndex> {
        self.core_indices
            .iter()
            .filter(|i| match (**i, &self.structure) {
                (BasisIndex::Pi1 { vertex, .. }, _) => vertex == s,
                (BasisIndex::Cov(a), Structure::Cover(c)) => c.cover.project(a) == s,
                (BasisIndex::PglV(_), Structure::Pgl(p)) => p.roles[0] == s,
                _ => false,
            })
            .copied()
            .collect()
    }

    /// The image of a single basis vector.
    pub fn action(&self, s: VertexId, index: &BasisIndex) -> Result<&SparseVector, RepError> {
        self.tables[s]
            .get(index)
            .ok_or_else(|| RepError::WindowExceeded {
                index: self.render_index(index),
            })
    }

    /// Linear extension of the action table of `s`.
    pub fn apply(&self, s: VertexId, v: &SparseVector) -> Result<SparseVector, RepError> {
        let mut out = SparseVector::zero();
        for (i, c) in v.iter() {
            out.add_scaled(c, self.action(s, i)?);
        }
        Ok(out)
    }

    /// Applies `word` right to left; `v` must lie in the core and `|word| ≤ B`.
    pub fn apply_word(
        &self,
        word: &[VertexId],
        v: &SparseVector,
    ) -> Result<SparseVector, RepError> {
        if word.len() > self.buffer {
            return Err(RepError::WordTooLong {
                len: word.len(),
                buffer: self.buffer,
            });
        }
        if let Some(i) = v.support().find(|i| !self.is_core(i)) {
            return Err(RepError::WindowExceeded {
                index: self.render_index(i),
            });
        }
        word.iter()
            .rev()
            .try_fold(v.clone(), |acc, &s| self.apply(s, &acc))
    }

    /// `f_st(v) = (t·v - v) / 2cos(π/m_st)`, mapping `V_-^s` to `V_-^t`.
    pub fn f_map(
        &self,
        s: VertexId,
        t: VertexId,
        v: &SparseVector,
    ) -> Result<SparseVector, RepError> {
        let label = self.graph.label(s, t).ok_or_else(|| {
            RepError::NotAnEdge(self.graph.name(s).into(), self.graph.name(t).into())
        })?;
        if self.apply(s, v)? != v.neg() {
            return Err(RepError::NotInMinusEigenspace(self.graph.name(s).into()));
        }
        let inv = self.ctx.two_cos(1, label)?.inv()?;
        let out = self.apply(t, v)?.minus(v).scaled(&inv);
        debug_assert!(self.apply(t, &out).map(|w| w == out.neg()).unwrap_or(true));
        Ok(out)
    }

    /// Composite of `f`-maps along a closed path, evaluated on every core
    /// `α_{s0,n}`; returns `n ↦ image`.
    pub fn monodromy(
        &self,
        c: &ClosedPathGenerator,
    ) -> Result<BTreeMap<i64, SparseVector>, RepError> {
        let base = c.base();
        let w = self.core as i64;
        let mut out = BTreeMap::new();
        for n in -w..=w {
            out.insert(
                n,
                self.transport(&c.path, &self.unit(BasisIndex::Pi1 { vertex: base, n }))?,
            );
        }
        Ok(out)
    }

    /// Composite of `f`-maps along consecutive edges of `path`.
    pub fn transport(&self, path: &[VertexId], v: &SparseVector) -> Result<SparseVector, RepError> {
        path.windows(2)
            .try_fold(v.clone(), |acc, step| self.f_map(step[0], step[1], &acc))
    }

    pub fn render_index(&self, index: &BasisIndex) -> String {
        match (*index, &self.structure) {
            (BasisIndex::Pi1 { vertex, n }, _) => {
                format!("alpha[{},{}]", self.graph.name(vertex), n)
            }
            (BasisIndex::Cov(a), Structure::Cover(c)) => {
                format!("alpha[{}]", c.cover.vertex(a).render(&self.graph))
            }
            (BasisIndex::Cov(a), _) => format!("alpha[#{a}]"),
            (BasisIndex::PglU(i), _) => format!("u[{i}]"),
            (BasisIndex::PglV(i), _) => format!("v[{i}]"),
        }
    }

    pub fn render_vector(&self, v: &SparseVector) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let terms: Vec<String> = v
            .iter()
            .map(|(i, c)| format!("({c})*{}", self.render_index(i)))
            .collect();
        terms.join(" + ")
    }

    /// One line per table entry: `generator<TAB>index<TAB>image`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (s, table) in self.tables.iter().enumerate() {
            for (i, img) in table {
                out.push_str(&format!(
                    "{}\t{}\t{}\n",
                    self.graph.name(s),
                    self.render_index(i),
                    self.render_vector(img)
                ));
            }
        }
        out
    }

    /// Flips the sign of one table entry. Fault injection for tests.
    #[doc(hidden)]
    pub fn corrupt_sign(&mut self, s: VertexId, index: &BasisIndex) -> bool {
        match self.tables[s].get_mut(index) {
            Some(img) => {
                *img = img.neg();
                true
            }
            None => false,
        }
    }
}
