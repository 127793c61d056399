#![allow(dead_code)]

use coxrep_core::cover::CoveredGraph;
use coxrep_core::graph::CoxeterGraph;
use coxrep_core::rep::{build_cover_rep, build_pi1_rep, OrientedSpecialEdge, RepWindow};
use coxrep_core::scalar::{Scalar, ScalarContext};
use std::path::PathBuf;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> CoxeterGraph {
    let path = fixtures_dir().join(format!("{name}.cox"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    CoxeterGraph::parse(&text).unwrap()
}

pub const FIXTURES: [&str; 10] = [
    "bridged_triangles",
    "path",
    "pgl",
    "seven_vertex",
    "single_edge",
    "three_triangles",
    "triangle_333",
    "triangle_433",
    "triangle_533",
    "two_triangles",
];

/// Pi1 rep with base `0`, BFS tree and the natural orientation of the first two loops.
pub fn pi1_rep(g: &CoxeterGraph, w: usize, b: usize) -> RepWindow {
    let tree = g.spanning_tree(0).unwrap();
    let gens = g.fundamental_generators(&tree, 0).unwrap();
    let e = |i: usize| OrientedSpecialEdge {
        tail: gens[i].tail,
        head: gens[i].head,
    };
    let ctx = ScalarContext::new(g.finite_labels());
    build_pi1_rep(g, &tree, 0, e(0), e(1), w, b, &ctx).unwrap()
}

/// Cover rep with distinguished edge `(s1, s2)` given by name.
pub fn cover_rep(g: &CoxeterGraph, s1: &str, s2: &str, d: usize, b: usize) -> RepWindow {
    let ctx = ScalarContext::new(g.finite_labels());
    let cov = CoveredGraph::build(g, g.vertex(s1).unwrap(), g.vertex(s2).unwrap(), d + b).unwrap();
    build_cover_rep(g, &cov, d, b, &ctx).unwrap()
}

/// Rank by dense elimination, scanning columns from last to first.
pub fn dense_rank_reversed(mut rows: Vec<Vec<Scalar>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in (0..cols).rev() {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().unwrap();
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = &row[col] * &inv;
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * p);
                }
            }
        }
        rank += 1;
    }
    rank
}
