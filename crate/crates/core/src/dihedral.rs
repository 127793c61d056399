//! Irreducible representations of the finite dihedral group
//! `D_m = <r, t | r² = t² = (rt)^m = e>` and classification of small blocks.
//!
//! Matrices use the column convention: column `i` is the image of basis
//! vector `i`. The two-dimensional representations use the basis
//! `(β_r, β_t)` throughout.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Label;
use crate::linalg;
use crate::scalar::{Scalar, ScalarContext, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DihedralError {
    #[error("k = {k} is out of range for m = {m}")]
    BadK { m: u32, k: u32 },
    #[error("matrices do not define a representation of D_{0}")]
    NotARepresentation(u32),
    #[error("unrecognized block of dimension {0}")]
    UnrecognizedBlock(usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IrrepKind {
    Trivial,
    Sign,
    /// `r ↦ -1, t ↦ 1`.
    EpsR,
    /// `r ↦ 1, t ↦ -1`.
    EpsT,
    Rho(u32),
}

impl IrrepKind {
    pub fn dimension(self) -> usize {
        match self {
            IrrepKind::Rho(_) => 2,
            _ => 1,
        }
    }

    /// Values of `(r, t)` on a one-dimensional kind.
    fn signs(self) -> Option<(i64, i64)> {
        match self {
            IrrepKind::Trivial => Some((1, 1)),
            IrrepKind::Sign => Some((-1, -1)),
            IrrepKind::EpsR => Some((-1, 1)),
            IrrepKind::EpsT => Some((1, -1)),
            IrrepKind::Rho(_) => None,
        }
    }
}

impl fmt::Display for IrrepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepKind::Trivial => f.write_str("trivial"),
            IrrepKind::Sign => f.write_str("sign"),
            IrrepKind::EpsR => f.write_str("eps_r"),
            IrrepKind::EpsT => f.write_str("eps_t"),
            IrrepKind::Rho(k) => write!(f, "rho_{k}"),
        }
    }
}

impl Serialize for IrrepKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Small dense square matrix over [`Scalar`], row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl SquareMatrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> SquareMatrix {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix is not square");
        SquareMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(dim: usize, ctx: &Arc<ScalarContext>) -> SquareMatrix {
        let rows = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { ctx.one() } else { ctx.zero() })
                    .collect()
            })
            .collect();
        SquareMatrix::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.dim + j]
    }

    fn ctx(&self) -> &Arc<ScalarContext> {
        self.entries[0].context()
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(self.ctx().zero(), |acc, k| {
                            &acc + &(self.get(i, k) * other.get(k, j))
                        })
                    })
                    .collect()
            })
            .collect();
        SquareMatrix::from_rows(rows)
    }

    pub fn pow(&self, e: u32) -> SquareMatrix {
        (0..e).fold(SquareMatrix::identity(self.dim, self.ctx()), |acc, _| {
            acc.mul(self)
        })
    }

    pub fn trace(&self) -> Scalar {
        (0..self.dim).fold(self.ctx().zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn minus_identity_rows(&self) -> Vec<linalg::SparseRow<usize>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let e = self.get(i, j).clone();
                        (j, if i == j { &e - &self.ctx().one() } else { e })
                    })
                    .filter(|(_, e)| !e.is_zero())
                    .collect()
            })
            .collect()
    }

    /// Dimension of the +1-eigenspace.
    pub fn fixed_dimension(&self) -> usize {
        self.dim - linalg::rank(&self.minus_identity_rows())
    }
}

/// One irreducible (or, for `Rho(m/2)`, split) representation of `D_m`.
#[derive(Debug, Clone)]
pub struct DihedralIrrep {
    pub kind: IrrepKind,
    pub m: u32,
    /// `(M_r, M_t)` for the two-dimensional kinds.
    pub matrices: Option<(SquareMatrix, SquareMatrix)>,
}

impl DihedralIrrep {
    pub fn new(kind: IrrepKind, m: u32, ctx: &Arc<ScalarContext>) -> Result<Self, DihedralError> {
        let matrices = match kind {
            IrrepKind::Rho(k) => Some(rho_matrices(m, k, ctx)?),
            IrrepKind::EpsR | IrrepKind::EpsT if m % 2 == 1 => {
                return Err(DihedralError::NotARepresentation(m))
            }
            _ => None,
        };
        Ok(DihedralIrrep { kind, m, matrices })
    }

    /// Only `Rho(m/2)` is reducible.
    pub fn is_irreducible(&self) -> bool {
        !matches!(self.kind, IrrepKind::Rho(k) if 2 * k == self.m)
    }
}

/// `M_r = [[-1, c], [0, 1]]`, `M_t = [[1, 0], [c, -1]]` with `c = 2cos(kπ/m)`.
pub fn rho_matrices(
    m: u32,
    k: u32,
    ctx: &Arc<ScalarContext>,
) -> Result<(SquareMatrix, SquareMatrix), DihedralError> {
    if m < 3 || k < 1 || 2 * k > m {
        return Err(DihedralError::BadK { m, k });
    }
    let c = ctx.two_cos(k, Label::Finite(m))?;
    let r = SquareMatrix::from_rows(vec![
        vec![ctx.integer(-1), c.clone()],
        vec![ctx.zero(), ctx.one()],
    ]);
    let t = SquareMatrix::from_rows(vec![vec![ctx.one(), ctx.zero()], vec![c, ctx.integer(-1)]]);
    Ok((r, t))
}

fn satisfies_relations(r: &SquareMatrix, t: &SquareMatrix, m: u32) -> bool {
    r.mul(r).is_identity() && t.mul(t).is_identity() && r.mul(t).pow(m).is_identity()
}

/// Exact check of `M_r² = M_t² = (M_r M_t)^m = I`.
pub fn verify_dihedral_relations(
    m: u32,
    k: u32,
    ctx: &Arc<ScalarContext>,
) -> Result<bool, DihedralError> {
    let (r, t) = rho_matrices(m, k, ctx)?;
    Ok(satisfies_relations(&r, &t, m))
}

/// Dimension of the space fixed by both `M_r` and `M_t`.
pub fn common_fixed_dimension(
    m: u32,
    k: u32,
    ctx: &Arc<ScalarContext>,
) -> Result<usize, DihedralError> {
    let (r, t) = rho_matrices(m, k, ctx)?;
    let mut rows = r.minus_identity_rows();
    rows.extend(t.minus_identity_rows());
    Ok(2 - linalg::rank(&rows))
}

/// Decomposes a block of dimension 1 or 2 into irreducible kinds by character.
///
/// Returns the kinds sorted; a split two-dimensional block yields two entries.
pub fn classify_block(
    r: &SquareMatrix,
    t: &SquareMatrix,
    m: u32,
    ctx: &Arc<ScalarContext>,
) -> Result<Vec<IrrepKind>, DihedralError> {
    if r.dim() != t.dim() || !(1..=2).contains(&r.dim()) {
        return Err(DihedralError::UnrecognizedBlock(r.dim().max(t.dim())));
    }
    if !satisfies_relations(r, t, m) {
        return Err(DihedralError::NotARepresentation(m));
    }
    let ones: Vec<IrrepKind> = [
        IrrepKind::Trivial,
        IrrepKind::Sign,
        IrrepKind::EpsR,
        IrrepKind::EpsT,
    ]
    .into_iter()
    .filter(|k| m.is_multiple_of(2) || !matches!(k, IrrepKind::EpsR | IrrepKind::EpsT))
    .collect();
    let character = |kinds: &[IrrepKind]| -> (i64, i64, i64) {
        kinds.iter().fold((0, 0, 0), |(a, b, c), k| {
            let (x, y) = k.signs().unwrap();
            (a + x, b + y, c + x * y)
        })
    };
    let (tr_r, tr_t, tr_rt) = (r.trace(), t.trace(), r.mul(t).trace());
    let matches = |(a, b, c): (i64, i64, i64)| {
        tr_r == ctx.integer(a) && tr_t == ctx.integer(b) && tr_rt == ctx.integer(c)
    };
    if r.dim() == 1 {
        return ones
            .iter()
            .find(|k| matches(character(&[**k])))
            .map(|k| vec![*k])
            .ok_or(DihedralError::UnrecognizedBlock(1));
    }
    if tr_r.is_zero() && tr_t.is_zero() {
        for k in 1..m.div_ceil(2) {
            if 2 * k < m && tr_rt == ctx.two_cos(2 * k, Label::Finite(m))? {
                return Ok(vec![IrrepKind::Rho(k)]);
            }
        }
    }
    for (i, a) in ones.iter().enumerate() {
        for b in &ones[i..] {
            if matches(character(&[*a, *b])) {
                return Ok(vec![*a, *b]);
            }
        }
    }
    Err(DihedralError::UnrecognizedBlock(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one(ctx: &Arc<ScalarContext>, v: i64) -> SquareMatrix {
        SquareMatrix::from_rows(vec![vec![ctx.integer(v)]])
    }

    #[test]
    fn rho_for_m3() {
        let ctx = ScalarContext::new([3]);
        let (r, t) = rho_matrices(3, 1, &ctx).unwrap();
        let i = |v| ctx.integer(v);
        assert_eq!(
            r,
            SquareMatrix::from_rows(vec![vec![i(-1), i(1)], vec![i(0), i(1)]])
        );
        assert_eq!(
            t,
            SquareMatrix::from_rows(vec![vec![i(1), i(0)], vec![i(1), i(-1)]])
        );
        assert!(r.mul(&r).is_identity());
    }

    #[test]
    fn rho_half_is_diagonal() {
        let ctx = ScalarContext::new([4]);
        let (r, t) = rho_matrices(4, 2, &ctx).unwrap();
        assert!(r.is_diagonal() && t.is_diagonal());
        assert_eq!(
            classify_block(&r, &t, 4, &ctx).unwrap(),
            [IrrepKind::EpsR, IrrepKind::EpsT]
        );
        assert!(!DihedralIrrep::new(IrrepKind::Rho(2), 4, &ctx)
            .unwrap()
            .is_irreducible());
        assert_eq!(common_fixed_dimension(4, 2, &ctx).unwrap(), 0);
    }

    #[test]
    fn relations_hold() {
        for (m, k) in [(3, 1), (7, 3), (4, 1)] {
            let ctx = ScalarContext::new([m]);
            assert!(
                verify_dihedral_relations(m, k, &ctx).unwrap(),
                "m={m} k={k}"
            );
        }
    }

    #[test]
    fn no_common_fixed_vector() {
        for (m, k) in [(3, 1), (5, 2)] {
            let ctx = ScalarContext::new([m]);
            assert_eq!(common_fixed_dimension(m, k, &ctx).unwrap(), 0);
        }
    }

    #[test]
    fn bad_k() {
        let ctx = ScalarContext::new([5]);
        assert_eq!(
            rho_matrices(5, 3, &ctx).unwrap_err(),
            DihedralError::BadK { m: 5, k: 3 }
        );
        assert_eq!(
            rho_matrices(5, 0, &ctx).unwrap_err(),
            DihedralError::BadK { m: 5, k: 0 }
        );
    }

    #[test]
    fn one_dimensional_blocks() {
        let ctx = ScalarContext::new([4]);
        let cls = |a, b| classify_block(&one_by_one(&ctx, a), &one_by_one(&ctx, b), 4, &ctx);
        assert_eq!(cls(-1, -1).unwrap(), [IrrepKind::Sign]);
        assert_eq!(cls(1, 1).unwrap(), [IrrepKind::Trivial]);
        assert_eq!(cls(-1, 1).unwrap(), [IrrepKind::EpsR]);
        assert_eq!(cls(1, -1).unwrap(), [IrrepKind::EpsT]);
        let odd = ScalarContext::new([5]);
        let e = classify_block(&one_by_one(&odd, -1), &one_by_one(&odd, 1), 5, &odd);
        assert_eq!(e, Err(DihedralError::NotARepresentation(5)));
        assert_eq!(cls(2, 1), Err(DihedralError::NotARepresentation(4)));
    }

    #[test]
    fn two_dimensional_blocks() {
        let ctx = ScalarContext::new([5]);
        let (r, t) = rho_matrices(5, 2, &ctx).unwrap();
        assert_eq!(
            classify_block(&r, &t, 5, &ctx).unwrap(),
            [IrrepKind::Rho(2)]
        );
        let id = SquareMatrix::identity(2, &ctx);
        assert_eq!(
            classify_block(&id, &id, 5, &ctx).unwrap(),
            [IrrepKind::Trivial, IrrepKind::Trivial]
        );
        let i = |v| ctx.integer(v);
        let swap = SquareMatrix::from_rows(vec![vec![i(0), i(1)], vec![i(1), i(0)]]);
        assert_eq!(
            classify_block(&swap, &swap, 5, &ctx).unwrap(),
            [IrrepKind::Trivial, IrrepKind::Sign]
        );
    }
}
