//! Exact checks on representation windows: relation sweeps, fixed spaces,
//! the `V_1` dichotomy, dihedral block decomposition and cyclic closure.
//!
//! Relation checks report `pass`/`fail` with a counterexample. Statements
//! about infinite-dimensional spaces are only witnessed at window scale and
//! carry status `evidence`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cover::{CoveredGraph, Side};
use crate::dihedral::{classify_block, DihedralError, IrrepKind, SquareMatrix};
use crate::graph::{PairOrder, VertexId};
use crate::linalg::{Echelon, SparseRow};
use crate::rep::{
    BasisIndex, CoverStructure, Family, RepError, RepWindow, SparseVector, Structure,
};

/// Word budget for closure from `u_0`; reaches `u_i, v_i` for `i ≤ 3`.
pub const PGL_CLOSURE_BUDGET: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub index: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub status: Status,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl VerificationReport {
    fn new(name: impl Into<String>, status: Status, details: Value) -> Self {
        VerificationReport {
            name: name.into(),
            status,
            details,
            counterexample: None,
        }
    }

    fn failed(name: impl Into<String>, details: Value, cx: Counterexample) -> Self {
        VerificationReport {
            name: name.into(),
            status: Status::Fail,
            details,
            counterexample: Some(cx),
        }
    }

    fn skipped(name: impl Into<String>, reason: &str) -> Self {
        Self::new(name, Status::Skipped, json!({ "reason": reason }))
    }

    fn from_error(name: impl Into<String>, index: String, e: &RepError) -> Self {
        let cx = Counterexample {
            index,
            expected: "defined".into(),
            got: e.to_string(),
        };
        Self::failed(name, json!({ "error": e.to_string() }), cx)
    }

    pub fn is_failure(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Checks `word · α = α` on every core basis vector.
fn relation_sweep(rep: &RepWindow, word: &[VertexId]) -> Result<(), Counterexample> {
    let hit = rep.core_indices().par_iter().find_map_first(|i| {
        let v = rep.unit(*i);
        let got = match rep.apply_word(word, &v) {
            Ok(w) if w == v => return None,
            Ok(w) => rep.render_vector(&w),
            Err(e) => e.to_string(),
        };
        Some(Counterexample {
            index: rep.render_index(i),
            expected: rep.render_vector(&v),
            got,
        })
    });
    hit.map_or(Ok(()), Err)
}

/// `s² = e` for every generator on every core index.
pub fn check_involutions(rep: &RepWindow) -> VerificationReport {
    let name = "involutions";
    if rep.buffer() < 2 {
        return VerificationReport::skipped(name, "buffer smaller than 2");
    }
    for s in 0..rep.generator_count() {
        if let Err(cx) = relation_sweep(rep, &[s, s]) {
            return VerificationReport::failed(
                name,
                json!({ "generator": rep.generator_name(s) }),
                cx,
            );
        }
    }
    VerificationReport::new(
        name,
        Status::Pass,
        json!({ "generators": rep.generator_count(), "indices": rep.core_indices().len() }),
    )
}

/// `(st)^{m_st} = e` on every core index; `m = ∞` pairs are skipped.
pub fn check_braid(rep: &RepWindow, s: VertexId, t: VertexId) -> VerificationReport {
    let name = format!("braid({},{})", rep.generator_name(s), rep.generator_name(t));
    let m = match rep.graph().pair_order(s, t) {
        PairOrder::Infinite => return VerificationReport::skipped(name, "m = inf"),
        PairOrder::Finite(m) => m as usize,
    };
    if rep.buffer() < 2 * m {
        return VerificationReport::skipped(name, "buffer smaller than 2m");
    }
    let word: Vec<VertexId> = (0..2 * m).map(|i| if i % 2 == 0 { s } else { t }).collect();
    let details = json!({ "m": m, "indices": rep.core_indices().len() });
    match relation_sweep(rep, &word) {
        Ok(()) => VerificationReport::new(name, Status::Pass, details),
        Err(cx) => VerificationReport::failed(name, details, cx),
    }
}

/// Rows of the stacked system `(s - 1)·v = 0` over core columns, keyed by
/// `(generator, output index)`.
pub fn fixed_space_system(
    rep: &RepWindow,
    generators: &[VertexId],
) -> Result<BTreeMap<(VertexId, BasisIndex), SparseRow<BasisIndex>>, RepError> {
    let mut rows: BTreeMap<(VertexId, BasisIndex), SparseRow<BasisIndex>> = BTreeMap::new();
    for &s in generators {
        let images: Vec<SparseVector> = rep
            .core_indices()
            .par_iter()
            .map(|i| rep.apply(s, &rep.unit(*i)).map(|w| w.minus(&rep.unit(*i))))
            .collect::<Result<_, _>>()?;
        for (col, img) in rep.core_indices().iter().zip(images) {
            for (j, c) in img.iter() {
                rows.entry((s, *j)).or_default().insert(*col, c.clone());
            }
        }
    }
    Ok(rows)
}

/// Basis of the core vectors fixed by every generator in `generators`.
pub fn fixed_space(
    rep: &RepWindow,
    generators: &[VertexId],
) -> Result<Vec<SparseVector>, RepError> {
    let mut e = Echelon::new();
    for row in fixed_space_system(rep, generators)?.values() {
        e.insert(row);
    }
    let one = rep.context().one();
    Ok(e.kernel(rep.core_indices(), &one)
        .into_iter()
        .map(SparseVector::from_row)
        .collect())
}

fn all_generators(rep: &RepWindow) -> Vec<VertexId> {
    (0..rep.generator_count()).collect()
}

fn fixed_space_report(rep: &RepWindow, basis: &[SparseVector]) -> VerificationReport {
    let name = "fixed_space";
    for v in basis {
        for s in 0..rep.generator_count() {
            match rep.apply(s, v) {
                Ok(w) if &w == v => {}
                Ok(w) => {
                    let cx = Counterexample {
                        index: rep.render_vector(v),
                        expected: rep.render_vector(v),
                        got: rep.render_vector(&w),
                    };
                    return VerificationReport::failed(
                        name,
                        json!({ "generator": rep.generator_name(s) }),
                        cx,
                    );
                }
                Err(e) => return VerificationReport::from_error(name, rep.render_vector(v), &e),
            }
        }
    }
    let rendered: Vec<String> = basis.iter().map(|v| rep.render_vector(v)).collect();
    VerificationReport::new(
        name,
        Status::Pass,
        json!({ "dimension": basis.len(), "core_dimension": rep.core_indices().len(), "basis": rendered }),
    )
}

/// For each generator `s`, the fixed space must inject into the coordinates
/// off the `(-1)`-eigenlines of `s`.
pub fn quotient_witness(rep: &RepWindow, basis: &[SparseVector]) -> VerificationReport {
    let name = "quotient_witness";
    for s in 0..rep.generator_count() {
        let minus: BTreeSet<BasisIndex> = rep.minus_indices(s).into_iter().collect();
        let mut e = Echelon::new();
        for v in basis {
            let r: SparseRow<BasisIndex> = v
                .iter()
                .filter(|(i, _)| !minus.contains(i))
                .map(|(i, c)| (*i, c.clone()))
                .collect();
            e.insert(&r);
        }
        if e.rank() < basis.len() {
            let cx = Counterexample {
                index: rep.generator_name(s).to_string(),
                expected: format!("rank {}", basis.len()),
                got: format!("rank {}", e.rank()),
            };
            return VerificationReport::failed(
                name,
                json!({ "generator": rep.generator_name(s) }),
                cx,
            );
        }
    }
    VerificationReport::new(name, Status::Pass, json!({ "dimension": basis.len() }))
}

/// Span of `{w · seed : |w| ≤ L}`.
#[derive(Debug, Clone)]
pub struct Closure {
    pub span: Echelon<BasisIndex>,
    /// Core basis vectors lying in the span.
    pub covered: BTreeSet<BasisIndex>,
    /// Dimension after each word length `0..=L`.
    pub growth: Vec<usize>,
}

impl Closure {
    pub fn dimension(&self) -> usize {
        self.span.rank()
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.span.contains(v.as_row())
    }
}

/// Incremental closure: each level applies every generator to the vectors
/// that entered the span at the previous level.
pub fn cyclic_closure(
    rep: &RepWindow,
    seed: &SparseVector,
    budget: usize,
) -> Result<Closure, RepError> {
    if budget > rep.buffer() {
        return Err(RepError::WordTooLong {
            len: budget,
            buffer: rep.buffer(),
        });
    }
    if let Some(i) = seed.support().find(|i| !rep.is_core(i)) {
        return Err(RepError::WindowExceeded {
            index: rep.render_index(i),
        });
    }
    let mut span = Echelon::new();
    let mut fresh = Vec::new();
    if span.insert(seed.as_row()).is_some() {
        fresh.push(seed.clone());
    }
    let mut growth = vec![span.rank()];
    for _ in 0..budget {
        let images: Vec<SparseVector> = fresh
            .par_iter()
            .flat_map_iter(|v| (0..rep.generator_count()).map(move |s| (s, v)))
            .map(|(s, v)| rep.apply(s, v))
            .collect::<Result<_, _>>()?;
        fresh.clear();
        for w in images {
            if span.insert(w.as_row()).is_some() {
                fresh.push(w);
            }
        }
        growth.push(span.rank());
        if fresh.is_empty() {
            break;
        }
    }
    let covered = rep
        .core_indices()
        .iter()
        .filter(|i| span.contains(rep.unit(**i).as_row()))
        .copied()
        .collect();
    Ok(Closure {
        span,
        covered,
        growth,
    })
}

fn closure_report(
    rep: &RepWindow,
    name: &str,
    seed: &SparseVector,
    budget: usize,
    expected: &[BasisIndex],
) -> VerificationReport {
    let closure = match cyclic_closure(rep, seed, budget) {
        Ok(c) => c,
        Err(e) => return VerificationReport::from_error(name, rep.render_vector(seed), &e),
    };
    let details = json!({
        "seed": rep.render_vector(seed),
        "budget": budget,
        "dimension": closure.dimension(),
        "growth": closure.growth,
        "covered": closure.covered.len(),
        "expected_covered": expected.len(),
        "core_dimension": rep.core_indices().len(),
    });
    match expected.iter().find(|i| !closure.covered.contains(i)) {
        None => VerificationReport::new(name, Status::Evidence, details),
        Some(i) => {
            let cx = Counterexample {
                index: rep.render_index(i),
                expected: "in span".into(),
                got: "not in span".into(),
            };
            VerificationReport::failed(name, details, cx)
        }
    }
}

fn cover_parts(rep: &RepWindow) -> &CoverStructure {
    match rep.structure() {
        Structure::Cover(c) => c,
        _ => panic!("cover family required"),
    }
}

/// The side playing `S_1'`: the larger class among core vertices, ties to
/// the side of `s1'`.
pub fn primary_side(cover: &CoveredGraph, depth: usize) -> Side {
    let (mut first, mut second) = (0usize, 0usize);
    for (id, v) in cover.vertices() {
        if v.depth() <= depth {
            match cover.side(id) {
                Side::First => first += 1,
                Side::Second => second += 1,
            }
        }
    }
    if second > first {
        Side::Second
    } else {
        Side::First
    }
}

fn side_of(cover: &CoveredGraph, i: &BasisIndex) -> Option<Side> {
    match i {
        BasisIndex::Cov(a) => Some(cover.side(*a)),
        _ => None,
    }
}

/// `m = 4`: `V_1` is invariant. `m > 4`: some generator moves a `V_1` vector
/// out of `V_1`, and the witness is recorded.
pub fn check_v1_invariance(rep: &RepWindow) -> VerificationReport {
    let name = "v1_invariance";
    let parts = cover_parts(rep);
    let cover = &parts.cover;
    let side = primary_side(cover, rep.core());
    let v1: Vec<BasisIndex> = rep
        .core_indices()
        .iter()
        .filter(|i| side_of(cover, i) == Some(side))
        .copied()
        .collect();
    let mut escape = None;
    'outer: for s in 0..rep.generator_count() {
        for i in &v1 {
            let img = match rep.apply(s, &rep.unit(*i)) {
                Ok(w) => w,
                Err(e) => return VerificationReport::from_error(name, rep.render_index(i), &e),
            };
            if img.support().any(|j| side_of(cover, j) != Some(side)) {
                escape = Some((s, *i, img));
                break 'outer;
            }
        }
    }
    let mut details =
        json!({ "m": parts.label, "primary_side": side, "v1_core_dimension": v1.len() });
    match (parts.label == 4, escape) {
        (true, None) => {
            details["invariant"] = json!(true);
            VerificationReport::new(name, Status::Pass, details)
        }
        (false, Some((s, i, img))) => {
            details["invariant"] = json!(false);
            details["witness"] = json!({
                "generator": rep.generator_name(s),
                "index": rep.render_index(&i),
                "image": rep.render_vector(&img),
            });
            VerificationReport::new(name, Status::Pass, details)
        }
        (true, Some((s, i, img))) => {
            details["generator"] = json!(rep.generator_name(s));
            let cx = Counterexample {
                index: rep.render_index(&i),
                expected: "image inside V1".into(),
                got: rep.render_vector(&img),
            };
            VerificationReport::failed(name, details, cx)
        }
        (false, None) => {
            let cx = Counterexample {
                index: rep.render_index(&BasisIndex::Cov(cover.s1_lift())),
                expected: "escape from V1".into(),
                got: "V1 invariant on the window".into(),
            };
            VerificationReport::failed(name, details, cx)
        }
    }
}

/// An `<s1, s2>`-block of core indices with its irreducible kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// `(β_r, β_t)` order for pairs.
    pub indices: Vec<BasisIndex>,
    pub kinds: Vec<IrrepKind>,
    /// `None` when the block straddles the distinguished edge.
    pub side: Option<Side>,
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    /// Core indices left out because their partner lies outside the core.
    pub excluded: Vec<BasisIndex>,
}

impl BlockDecomposition {
    pub fn multiplicities(&self) -> BTreeMap<IrrepKind, usize> {
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            for k in &b.kinds {
                *out.entry(*k).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn multiplicities_on(&self, side: Side) -> BTreeMap<IrrepKind, usize> {
        let mut out = BTreeMap::new();
        for b in self.blocks.iter().filter(|b| b.side == Some(side)) {
            for k in &b.kinds {
                *out.entry(*k).or_insert(0) += 1;
            }
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BlockError {
    #[error("block at {0} is not invariant")]
    NotInvariant(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Dihedral(#[from] DihedralError),
}

/// Matrix of `s` on `basis`, reading diagonal coefficients only when `quotient`.
fn restricted(
    rep: &RepWindow,
    s: VertexId,
    basis: &[BasisIndex],
    quotient: bool,
) -> Result<SquareMatrix, BlockError> {
    let zero = rep.context().zero();
    let mut rows = vec![vec![zero; basis.len()]; basis.len()];
    for (j, b) in basis.iter().enumerate() {
        let img = rep.apply(s, &rep.unit(*b))?;
        if !quotient && img.support().any(|i| !basis.contains(i)) {
            return Err(BlockError::NotInvariant(rep.render_index(b)));
        }
        for (i, row) in rows.iter_mut().enumerate() {
            if let Some(c) = img.get(&basis[i]) {
                row[j] = c.clone();
            }
        }
    }
    Ok(SquareMatrix::from_rows(rows))
}

/// Splits the core into `<s1, s2>`-blocks and classifies each.
///
/// Pairs are covering edges over `{s1, s2}` and are genuine subrepresentations.
/// Other vertices give one-dimensional quotients, classified by their
/// diagonal coefficients.
pub fn decompose_dihedral_blocks(rep: &RepWindow) -> Result<BlockDecomposition, BlockError> {
    let parts = cover_parts(rep);
    let (cover, s1, s2, m) = (&parts.cover, parts.s1, parts.s2, parts.label);
    let ctx = rep.context();
    let mut blocks = Vec::new();
    let mut excluded = Vec::new();
    let singleton = |a: BasisIndex| -> Result<Block, BlockError> {
        let r = restricted(rep, s1, &[a], true)?;
        let t = restricted(rep, s2, &[a], true)?;
        Ok(Block {
            indices: vec![a],
            kinds: classify_block(&r, &t, m, ctx)?,
            side: side_of(cover, &a),
        })
    };
    for i in rep.core_indices() {
        let BasisIndex::Cov(a) = *i else { continue };
        let p = cover.project(a);
        if p != s1 && p != s2 {
            blocks.push(singleton(*i)?);
            continue;
        }
        let other = if p == s1 { s2 } else { s1 };
        let partner = match cover.neighbor_over(a, other) {
            Some(b) if rep.is_core(&BasisIndex::Cov(b)) => b,
            _ => {
                excluded.push(*i);
                continue;
            }
        };
        if partner < a {
            continue;
        }
        let basis = if p == s1 {
            [BasisIndex::Cov(a), BasisIndex::Cov(partner)]
        } else {
            [BasisIndex::Cov(partner), BasisIndex::Cov(a)]
        };
        let r = restricted(rep, s1, &basis, false)?;
        let t = restricted(rep, s2, &basis, false)?;
        let kinds = classify_block(&r, &t, m, ctx)?;
        let (sa, sb) = (side_of(cover, &basis[0]), side_of(cover, &basis[1]));
        if kinds.len() == 2 && r.is_diagonal() && t.is_diagonal() {
            blocks.push(singleton(basis[0])?);
            blocks.push(singleton(basis[1])?);
        } else {
            blocks.push(Block {
                indices: basis.to_vec(),
                kinds,
                side: if sa == sb { sa } else { None },
            });
        }
    }
    Ok(BlockDecomposition { blocks, excluded })
}

fn multiplicity_json(m: &BTreeMap<IrrepKind, usize>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

/// Multiplicity checks on the block decomposition.
pub fn check_dihedral_blocks(rep: &RepWindow) -> VerificationReport {
    let name = "dihedral_blocks";
    let parts = cover_parts(rep);
    let cover = &parts.cover;
    let dec = match decompose_dihedral_blocks(rep) {
        Ok(d) => d,
        Err(e) => {
            let cx = Counterexample {
                index: "block".into(),
                expected: "classifiable".into(),
                got: e.to_string(),
            };
            return VerificationReport::failed(name, json!({ "error": e.to_string() }), cx);
        }
    };
    let s1p = BasisIndex::Cov(cover.s1_lift());
    let s2p = BasisIndex::Cov(cover.s2_lift());
    let side = primary_side(cover, rep.core());
    let mut details = json!({
        "m": parts.label,
        "blocks": dec.blocks.len(),
        "excluded": dec.excluded.len(),
        "multiplicities": multiplicity_json(&dec.multiplicities()),
    });
    let fail = |details: Value, b: &Block, expected: &str| {
        let got: Vec<String> = b.kinds.iter().map(|k| k.to_string()).collect();
        let index: Vec<String> = b.indices.iter().map(|i| rep.render_index(i)).collect();
        let cx = Counterexample {
            index: index.join(" "),
            expected: expected.into(),
            got: got.join(" "),
        };
        VerificationReport::failed(name, details, cx)
    };
    let distinguished = [s1p, s2p];
    for b in &dec.blocks {
        let is_distinguished = b.indices == distinguished;
        let ok = match (b.indices.len(), parts.label > 4) {
            (2, true) if is_distinguished => b.kinds == [IrrepKind::Rho(2)],
            (2, _) => b.kinds == [IrrepKind::Rho(1)],
            (1, _) if parts.label == 4 && distinguished.contains(&b.indices[0]) => true,
            (1, _) => b.kinds == [IrrepKind::Trivial],
            _ => false,
        };
        if !ok {
            let expected = if is_distinguished {
                "rho_2"
            } else if b.indices.len() == 2 {
                "rho_1"
            } else {
                "trivial"
            };
            return fail(details, b, expected);
        }
    }
    if parts.label > 4 {
        let count = dec
            .multiplicities()
            .get(&IrrepKind::Rho(2))
            .copied()
            .unwrap_or(0);
        details["rho_2"] = json!(count);
        if count != 1 {
            let cx = Counterexample {
                index: "rho_2".into(),
                expected: "1".into(),
                got: count.to_string(),
            };
            return VerificationReport::failed(name, details, cx);
        }
        return VerificationReport::new(name, Status::Pass, details);
    }
    // m = 4: the distinguished pair splits and its V_1 half is the unique
    // sign-on-s1 line there.
    let (anchor, kind) = match side {
        Side::First => (s1p, IrrepKind::EpsR),
        Side::Second => (s2p, IrrepKind::EpsT),
    };
    let on_side = dec.multiplicities_on(side);
    let count = on_side.get(&kind).copied().unwrap_or(0);
    let spanned = dec
        .blocks
        .iter()
        .any(|b| b.indices == [anchor] && b.kinds == [kind]);
    details["primary_side"] = json!(side);
    details["v1_multiplicities"] = multiplicity_json(&on_side);
    details["eps_s1"] = json!(count);
    if count != 1 || !spanned {
        let cx = Counterexample {
            index: rep.render_index(&anchor),
            expected: format!("{kind} once, spanned by this vector"),
            got: format!("multiplicity {count}"),
        };
        return VerificationReport::failed(name, details, cx);
    }
    VerificationReport::new(name, Status::Pass, details)
}

fn pi1_checks(rep: &RepWindow, out: &mut Vec<VerificationReport>) {
    let Structure::Pi1(p) = rep.structure() else {
        unreachable!()
    };
    let ctx = rep.context();
    let s0 = p.base;
    let at = |n| BasisIndex::Pi1 { vertex: s0, n };
    for (i, c) in p.generators.iter().enumerate() {
        let name = format!("monodromy_x{}", i + 1);
        let table = match rep.monodromy(c) {
            Ok(t) => t,
            Err(e) => {
                out.push(VerificationReport::from_error(
                    name,
                    c.render(rep.graph()),
                    &e,
                ));
                continue;
            }
        };
        let expected = |n: i64| match i {
            0 => rep.unit(at(n + 1)),
            1 => rep.unit(at(n + 1)).scaled(&ctx.pow2(n)),
            _ => rep.unit(at(n)),
        };
        let details = json!({ "path": c.render(rep.graph()), "range": rep.core() });
        let bad = table.iter().find(|(n, v)| **v != expected(**n));
        out.push(match bad {
            None => VerificationReport::new(name, Status::Pass, details),
            Some((n, v)) => VerificationReport::failed(
                name,
                details,
                Counterexample {
                    index: rep.render_index(&at(*n)),
                    expected: rep.render_vector(&expected(*n)),
                    got: rep.render_vector(v),
                },
            ),
        });
    }

    let name = "non_commutation";
    let seed = rep.unit(at(0));
    let composite = |first: &[VertexId], second: &[VertexId]| {
        rep.transport(first, &seed)
            .and_then(|v| rep.transport(second, &v))
    };
    let (c1, c2) = (&p.generators[0].path, &p.generators[1].path);
    out.push(match (composite(c2, c1), composite(c1, c2)) {
        (Ok(x1x2), Ok(x2x1)) => {
            let details = json!({
                "x1x2": rep.render_vector(&x1x2),
                "x2x1": rep.render_vector(&x2x1),
            });
            let want12 = rep.unit(at(2));
            let want21 = want12.scaled(&ctx.integer(2));
            if x1x2 == want12 && x2x1 == want21 {
                VerificationReport::new(name, Status::Pass, details)
            } else {
                let cx = Counterexample {
                    index: rep.render_index(&at(0)),
                    expected: format!(
                        "{} vs {}",
                        rep.render_vector(&want12),
                        rep.render_vector(&want21)
                    ),
                    got: format!(
                        "{} vs {}",
                        rep.render_vector(&x1x2),
                        rep.render_vector(&x2x1)
                    ),
                };
                VerificationReport::failed(name, details, cx)
            }
        }
        (Err(e), _) | (_, Err(e)) => {
            VerificationReport::from_error(name, rep.render_index(&at(0)), &e)
        }
    });

    let name = "f_map_inversion";
    let g = rep.graph();
    let mut checked = 0usize;
    for (a, b, _) in g.edges() {
        for (s, t) in [(a, b), (b, a)] {
            for i in rep.minus_indices(s) {
                let v = rep.unit(i);
                let back = rep.f_map(s, t, &v).and_then(|w| rep.f_map(t, s, &w));
                match back {
                    Ok(w) if w == v => checked += 1,
                    Ok(w) => {
                        let cx = Counterexample {
                            index: rep.render_index(&i),
                            expected: rep.render_vector(&v),
                            got: rep.render_vector(&w),
                        };
                        out.push(VerificationReport::failed(
                            name,
                            json!({ "edge": [g.name(s), g.name(t)] }),
                            cx,
                        ));
                        return;
                    }
                    Err(e) => {
                        out.push(VerificationReport::from_error(
                            name,
                            rep.render_index(&i),
                            &e,
                        ));
                        return;
                    }
                }
            }
        }
    }
    out.push(VerificationReport::new(
        name,
        Status::Pass,
        json!({ "vectors": checked }),
    ));
}

fn cover_checks(rep: &RepWindow, seed: u64, out: &mut Vec<VerificationReport>) {
    out.push(check_v1_invariance(rep));
    out.push(check_dihedral_blocks(rep));

    let parts = cover_parts(rep);
    let cover = &parts.cover;
    let side = primary_side(cover, rep.core());
    let restrict = parts.label == 4;
    let anchor = match side {
        Side::First => cover.s1_lift(),
        Side::Second => cover.s2_lift(),
    };
    let budget = rep.core().saturating_sub(1).min(rep.buffer());
    let expected: Vec<BasisIndex> = rep
        .core_indices()
        .iter()
        .filter(|i| match i {
            BasisIndex::Cov(a) => {
                cover.distance(*a, anchor) < budget && (!restrict || cover.side(*a) == side)
            }
            _ => false,
        })
        .copied()
        .collect();
    out.push(closure_report(
        rep,
        "closure_from_s1",
        &rep.unit(BasisIndex::Cov(anchor)),
        budget,
        &expected,
    ));

    let name = "closure_random_seed";
    let support: Vec<BasisIndex> = rep
        .core_indices()
        .iter()
        .filter(|i| match i {
            BasisIndex::Cov(a) => {
                cover.depth_of(*a) + budget <= rep.core() && (!restrict || cover.side(*a) == side)
            }
            _ => false,
        })
        .copied()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = rep.context();
    let mut pick = None;
    for _ in 0..16 {
        let v = SparseVector::from_terms(
            support
                .iter()
                .map(|i| (*i, ctx.integer(rng.gen_range(-3..=3)))),
        );
        let moved =
            (0..rep.generator_count()).any(|s| rep.apply(s, &v).map(|w| w != v).unwrap_or(false));
        if moved {
            pick = Some(v);
            break;
        }
    }
    match pick {
        None => out.push(VerificationReport::skipped(name, "no non-fixed seed found")),
        Some(v) => {
            let mut r = closure_report(rep, name, &v, budget, &[]);
            if let Some(d) = r.details.as_object_mut() {
                d.insert("rng_seed".into(), json!(seed));
                d.remove("expected_covered");
            }
            out.push(r);
        }
    }
}

fn pgl_checks(rep: &RepWindow, basis: &[SparseVector], out: &mut Vec<VerificationReport>) {
    let name = "closure_from_u0";
    if rep.buffer() < PGL_CLOSURE_BUDGET || rep.core() < 3 {
        out.push(VerificationReport::skipped(
            name,
            "window too small for budget 8",
        ));
    } else {
        let mut expected = vec![BasisIndex::PglU(0)];
        for i in 1..=3 {
            expected.extend([BasisIndex::PglU(i), BasisIndex::PglV(i)]);
        }
        out.push(closure_report(
            rep,
            name,
            &rep.unit(BasisIndex::PglU(0)),
            PGL_CLOSURE_BUDGET,
            &expected,
        ));
    }

    let name = "sign_eigenspace_disjoint";
    let Structure::Pgl(p) = rep.structure() else {
        unreachable!()
    };
    let v_lines: BTreeSet<BasisIndex> = rep.minus_indices(p.roles[0]).into_iter().collect();
    let mut e = Echelon::new();
    for v in basis {
        let r: SparseRow<BasisIndex> = v
            .iter()
            .filter(|(i, _)| !v_lines.contains(i))
            .map(|(i, c)| (*i, c.clone()))
            .collect();
        e.insert(&r);
    }
    out.push(if e.rank() == basis.len() {
        VerificationReport::new(
            name,
            Status::Pass,
            json!({ "fixed_dimension": basis.len() }),
        )
    } else {
        let cx = Counterexample {
            index: "v[*]".into(),
            expected: "no fixed vector on v lines".into(),
            got: format!("rank deficit {}", basis.len() - e.rank()),
        };
        VerificationReport::failed(name, json!({}), cx)
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    /// Seed of the random closure test.
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0x5eed }
    }
}

/// Every applicable check, in a fixed order.
pub fn run_suite(rep: &RepWindow, config: &SuiteConfig) -> Vec<VerificationReport> {
    let mut out = vec![check_involutions(rep)];
    let k = rep.generator_count();
    for s in 0..k {
        for t in s + 1..k {
            out.push(check_braid(rep, s, t));
        }
    }
    let basis = match fixed_space(rep, &all_generators(rep)) {
        Ok(b) => b,
        Err(e) => {
            out.push(VerificationReport::from_error(
                "fixed_space",
                "system".into(),
                &e,
            ));
            return out;
        }
    };
    out.push(fixed_space_report(rep, &basis));
    out.push(quotient_witness(rep, &basis));
    match rep.family() {
        Family::Pi1 => pi1_checks(rep, &mut out),
        Family::Cover => cover_checks(rep, config.seed, &mut out),
        Family::Pgl => pgl_checks(rep, &basis, &mut out),
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::CoxeterGraph;
    use crate::rep::{build_cover_rep, build_pgl_rep};
    use crate::scalar::ScalarContext;

    fn cover_rep(text: &str, depth: usize, buffer: usize) -> RepWindow {
        let g = CoxeterGraph::parse(text).unwrap();
        let ctx = ScalarContext::new(g.finite_labels());
        let cov = CoveredGraph::build(&g, 0, 1, depth + buffer).unwrap();
        build_cover_rep(&g, &cov, depth, buffer, &ctx).unwrap()
    }

    #[test]
    fn single_edge_is_one_rho2_block() {
        let rep = cover_rep("vertices: a b\nedge a b 6", 3, 1);
        let dec = decompose_dihedral_blocks(&rep).unwrap();
        assert_eq!(dec.blocks.len(), 1);
        assert_eq!(dec.blocks[0].kinds, [IrrepKind::Rho(2)]);
        assert!(dec.excluded.is_empty());
    }

    #[test]
    fn corrupted_table_is_caught() {
        let g = CoxeterGraph::parse("vertices: s1 s2 s3\nedge s1 s2 3\nedge s2 s3 inf").unwrap();
        let ctx: Arc<ScalarContext> = ScalarContext::new([3]);
        let mut rep = build_pgl_rep(&g, 4, 8, &ctx).unwrap();
        assert_eq!(check_involutions(&rep).status, Status::Pass);
        assert!(rep.corrupt_sign(1, &BasisIndex::PglV(2)));
        let r = check_involutions(&rep);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.counterexample.unwrap().index, "u[2]");
    }

    #[test]
    fn closure_of_fixed_vector_is_a_line() {
        let rep = cover_rep("vertices: a b c\nedge a b 4\nedge b c 3\nedge c a 3", 4, 4);
        let basis = fixed_space(&rep, &all_generators(&rep)).unwrap();
        for v in &basis {
            let c = cyclic_closure(&rep, v, 2).unwrap();
            assert_eq!(c.dimension(), 1);
        }
        let c = cyclic_closure(&rep, &rep.unit(BasisIndex::Cov(0)), 3).unwrap();
        assert_eq!(c.growth[0], 1);
        assert!(c.covered.contains(&BasisIndex::Cov(0)));
    }

    #[test]
    fn braid_skips_infinite_pairs() {
        let g = CoxeterGraph::parse("vertices: s1 s2 s3\nedge s1 s2 3\nedge s2 s3 inf").unwrap();
        let rep = build_pgl_rep(&g, 4, 8, &ScalarContext::new([3])).unwrap();
        assert_eq!(check_braid(&rep, 1, 2).status, Status::Skipped);
        assert_eq!(check_braid(&rep, 0, 1).status, Status::Pass);
        assert_eq!(check_braid(&rep, 0, 2).status, Status::Pass);
    }
}
