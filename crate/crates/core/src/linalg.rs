//! Exact sparse row reduction over [`Scalar`].
//!
//! Pivots are chosen by key order (smallest key first), never by magnitude.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type SparseRow<K> = BTreeMap<K, Scalar>;

/// A reduced row echelon basis that grows one vector at a time.
#[derive(Debug, Clone)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, SparseRow<K>>,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: BTreeMap::new(),
        }
    }
}

fn axpy<K: Ord + Clone>(target: &mut SparseRow<K>, coeff: &Scalar, row: &SparseRow<K>) {
    for (k, v) in row {
        let delta = coeff * v;
        match target.get_mut(k) {
            Some(cur) => {
                *cur = &*cur + &delta;
                if cur.is_zero() {
                    target.remove(k);
                }
            }
            None => {
                if !delta.is_zero() {
                    target.insert(k.clone(), delta);
                }
            }
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&K, &SparseRow<K>)> {
        self.rows.iter()
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseRow<K>) -> SparseRow<K> {
        let mut out: SparseRow<K> = v
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        let hits: Vec<K> = v
            .keys()
            .filter(|k| self.rows.contains_key(*k))
            .cloned()
            .collect();
        for p in hits {
            if let Some(c) = out.get(&p).cloned() {
                axpy(&mut out, &-&c, &self.rows[&p]);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseRow<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns the new pivot if `v` was independent.
    pub fn insert(&mut self, v: &SparseRow<K>) -> Option<K> {
        let mut r = self.reduce(v);
        let (pivot, lead) = r.iter().next().map(|(k, c)| (k.clone(), c.clone()))?;
        let inv = lead.inv().expect("nonzero leading entry");
        for c in r.values_mut() {
            *c = &*c * &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&pivot).cloned() {
                axpy(row, &-&c, &r);
            }
        }
        self.rows.insert(pivot.clone(), r);
        Some(pivot)
    }

    /// Null space of the inserted rows, read as equations over `columns`.
    ///
    /// One basis vector per non-pivot column `f`, with `x_f = one`.
    pub fn kernel(&self, columns: &[K], one: &Scalar) -> Vec<SparseRow<K>> {
        columns
            .iter()
            .filter(|f| !self.rows.contains_key(*f))
            .map(|f| {
                let mut v = SparseRow::new();
                v.insert(f.clone(), one.clone());
                for (p, row) in &self.rows {
                    if let Some(c) = row.get(f) {
                        v.insert(p.clone(), -c);
                    }
                }
                v
            })
            .collect()
    }
}

/// Rank of a list of rows.
pub fn rank<K: Ord + Clone>(rows: &[SparseRow<K>]) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}
