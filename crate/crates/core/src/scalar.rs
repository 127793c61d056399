//! Exact arithmetic in the real cyclotomic field `Q(θ)`, `θ = 2cos(π/N)`.
//!
//! `N` is the lcm of all finite edge labels, so every coefficient
//! `2cos(kπ/m)` with `m | N` lives in this one field. Elements are stored as
//! rational coordinates in the power basis `1, θ, …, θ^{d-1}` and are always
//! reduced modulo the minimal polynomial `ψ_N` of `θ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::Label;
use crate::poly::{self, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars from different fields (N = {left} vs N = {right})")]
    ContextMismatch { left: u32, right: u32 },
    #[error("label {m} does not divide the field modulus {n}")]
    IncompatibleModulus { m: u32, n: u32 },
}

/// The field `Q(2cos(π/N))` together with the minimal polynomial of its generator.
#[derive(Debug)]
pub struct ScalarContext {
    n: u32,
    psi: Vec<BigInt>,
    psi_q: Poly,
    theta: f64,
}

/// `Φ_n`, by dividing `z^n - 1` by `Φ_e` for every proper divisor `e`.
fn cyclotomic(n: u64) -> Poly {
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    let mut result = poly::from_ints(&p);
    for e in 1..n {
        if n.is_multiple_of(e) {
            let (q, r) = poly::divrem(&result, &cyclotomic(e));
            debug_assert!(r.is_empty());
            result = q;
        }
    }
    result
}

/// Rewrites the palindromic `Φ_{2N}(z) = z^d ψ(z + 1/z)` in terms of `ψ`.
fn minimal_polynomial(n: u32) -> Vec<BigInt> {
    let mut rest = cyclotomic(2 * n as u64);
    let d = (rest.len() - 1) / 2;
    let z2_plus_1 = poly::from_ints(&[1, 0, 1]);
    let mut psi = vec![BigInt::zero(); d + 1];
    for k in (0..=d).rev() {
        let c = rest.get(d + k).cloned().unwrap_or_else(BigRational::zero);
        if c.is_zero() {
            continue;
        }
        let mut basis: Poly = vec![BigRational::zero(); d - k];
        basis.push(BigRational::one());
        for _ in 0..k {
            basis = poly::mul(&basis, &z2_plus_1);
        }
        let scaled: Poly = basis.iter().map(|x| x * &c).collect();
        rest = poly::sub(&rest, &scaled);
        assert!(c.is_integer());
        psi[k] = c.to_integer();
    }
    assert!(rest.is_empty(), "Φ_2N is not palindromic");
    psi
}

impl ScalarContext {
    /// Field for the lcm of `labels`; an empty set gives `N = 3` (the rationals).
    pub fn new(labels: impl IntoIterator<Item = u32>) -> Arc<ScalarContext> {
        let n = labels.into_iter().fold(1u32, |acc, m| acc.lcm(&m)).max(3);
        Self::for_modulus(n)
    }

    pub fn for_modulus(n: u32) -> Arc<ScalarContext> {
        assert!(n >= 3, "field modulus must be at least 3");
        let psi = minimal_polynomial(n);
        let psi_q = psi
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let theta = 2.0 * (std::f64::consts::PI / n as f64).cos();
        Arc::new(ScalarContext {
            n,
            psi,
            psi_q,
            theta,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.psi.len() - 1
    }

    /// Integer coefficients of `ψ_N`, lowest degree first; monic.
    pub fn minimal_polynomial(&self) -> &[BigInt] {
        &self.psi
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta
    }

    fn reduce(self: &Arc<Self>, p: &[BigRational]) -> Scalar {
        let (_, mut r) = poly::divrem(p, &self.psi_q);
        r.resize(self.degree(), BigRational::zero());
        Scalar {
            ctx: Arc::clone(self),
            coeffs: r,
        }
    }

    pub fn zero(self: &Arc<Self>) -> Scalar {
        Scalar {
            ctx: Arc::clone(self),
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(self: &Arc<Self>) -> Scalar {
        self.rational(BigRational::one())
    }

    pub fn integer(self: &Arc<Self>, v: i64) -> Scalar {
        self.rational(BigRational::from_integer(v.into()))
    }

    pub fn ratio(self: &Arc<Self>, num: i64, den: i64) -> Scalar {
        self.rational(BigRational::new(num.into(), den.into()))
    }

    pub fn rational(self: &Arc<Self>, q: BigRational) -> Scalar {
        let mut s = self.zero();
        s.coeffs[0] = q;
        s
    }

    /// `2^e` for any integer exponent.
    pub fn pow2(self: &Arc<Self>, e: i64) -> Scalar {
        let p = BigInt::one() << e.unsigned_abs();
        let q = if e >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        };
        self.rational(q)
    }

    /// The generator `θ = 2cos(π/N)`.
    pub fn theta(self: &Arc<Self>) -> Scalar {
        self.reduce(&poly::from_ints(&[0, 1]))
    }

    /// `D_j(θ) = 2cos(jπ/N)` from `D_0 = 2`, `D_1 = θ`, `D_{j+1} = θ D_j - D_{j-1}`.
    pub fn chebyshev(self: &Arc<Self>, j: u64) -> Scalar {
        let theta = self.theta();
        let mut prev = self.integer(2);
        if j == 0 {
            return prev;
        }
        let mut cur = theta.clone();
        for _ in 1..j {
            let next = &(&theta * &cur) - &prev;
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }

    /// `2cos(kπ/m)`; an infinite label gives the limiting value 2.
    pub fn two_cos(self: &Arc<Self>, k: u32, m: Label) -> Result<Scalar, ScalarError> {
        match m {
            Label::Infinite => Ok(self.integer(2)),
            Label::Finite(m) => {
                if m == 0 || !self.n.is_multiple_of(m) {
                    return Err(ScalarError::IncompatibleModulus { m, n: self.n });
                }
                Ok(self.chebyshev(k as u64 * (self.n / m) as u64))
            }
        }
    }
}

/// An element of a [`ScalarContext`] field.
#[derive(Clone)]
pub struct Scalar {
    ctx: Arc<ScalarContext>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n && self.coeffs == other.coeffs
    }
}

impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self)
    }
}

impl Scalar {
    pub fn context(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    /// Power-basis coordinates, lowest degree first.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this scalar lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }

    fn check(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.ctx.n != other.ctx.n {
            return Err(ScalarError::ContextMismatch {
                left: self.ctx.n,
                right: other.ctx.n,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Scalar {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Scalar {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        if let Some(q) = self.as_rational() {
            return Ok(other.scale(q));
        }
        if let Some(q) = other.as_rational() {
            return Ok(self.scale(q));
        }
        Ok(self.ctx.reduce(&poly::mul(&self.coeffs, &other.coeffs)))
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        Scalar {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(self.ctx.rational(q.recip()));
        }
        let mut a = self.coeffs.clone();
        poly::trim(&mut a);
        let (g, u) = poly::gcd_ext(&a, &self.ctx.psi_q);
        // ψ_N is irreducible, so any nonzero element is coprime to it
        assert_eq!(g.len(), 1, "minimal polynomial is not irreducible");
        Ok(self.ctx.reduce(&u))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        self.checked_mul(&other.inv()?)
    }

    /// Double-precision value; for display only.
    pub fn to_f64(&self) -> f64 {
        poly::eval_f64(&self.coeffs, self.ctx.theta)
    }

    pub fn render(&self) -> RenderedScalar {
        RenderedScalar {
            exact: self.to_string(),
            approx: self.to_f64(),
        }
    }
}

impl fmt::Display for Scalar {
    /// Polynomial in `t`, highest degree first, e.g. `1/2*t^2 - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = c.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match k {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Exact rendering plus a float approximation, for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderedScalar {
    pub exact: String,
    pub approx: f64,
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            /// Panics if the operands come from different fields.
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar context mismatch")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_phi(mut n: u64) -> u64 {
        let mut result = n;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                while n.is_multiple_of(p) {
                    n /= p;
                }
                result -= result / p;
            }
            p += 1;
        }
        if n > 1 {
            result -= result / n;
        }
        result
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn contexts_from_labels() {
        let c3 = ScalarContext::new([3]);
        assert_eq!(c3.modulus(), 3);
        assert_eq!(c3.minimal_polynomial(), ints(&[-1, 1]));
        let c4 = ScalarContext::new([4]);
        assert_eq!(c4.minimal_polynomial(), ints(&[-2, 0, 1]));
        let c12 = ScalarContext::new([3, 4]);
        assert_eq!((c12.modulus(), c12.degree()), (12, 4));
        assert_eq!(ScalarContext::new([]).modulus(), 3);
        for n in 3..40u32 {
            let ctx = ScalarContext::for_modulus(n);
            assert_eq!(ctx.degree() as u64, euler_phi(2 * n as u64) / 2, "N = {n}");
        }
    }

    #[test]
    fn cosine_values() {
        let c3 = ScalarContext::new([3]);
        assert!(c3.two_cos(1, Label::Finite(3)).unwrap().is_one());
        let c4 = ScalarContext::new([4]);
        assert!(c4.two_cos(2, Label::Finite(4)).unwrap().is_zero());
        assert_eq!(c4.two_cos(1, Label::Infinite).unwrap(), c4.integer(2));
        assert_eq!(
            c4.two_cos(1, Label::Finite(3)),
            Err(ScalarError::IncompatibleModulus { m: 3, n: 4 })
        );
        let sqrt2 = c4.two_cos(1, Label::Finite(4)).unwrap();
        assert_eq!(&sqrt2 * &sqrt2, c4.integer(2));
    }

    #[test]
    fn floats() {
        let c3 = ScalarContext::new([3]);
        assert!((c3.two_cos(1, Label::Finite(3)).unwrap().to_f64() - 1.0).abs() < 1e-12);
        let c4 = ScalarContext::new([4]);
        assert!((c4.two_cos(1, Label::Finite(4)).unwrap().to_f64() - 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(c4.ratio(-3, 2).to_f64(), -1.5);
    }

    #[test]
    fn rendering() {
        let c5 = ScalarContext::for_modulus(5);
        let t = c5.theta();
        let x = &(&t * &t).scale(&BigRational::new(1.into(), 2.into())) - &c5.one();
        assert_eq!(x.to_string(), "1/2*t - 1/2");
        assert_eq!(c5.zero().to_string(), "0");
        assert_eq!((-&t).to_string(), "-t");
        let c7 = ScalarContext::for_modulus(7);
        let t = c7.theta();
        let y = &(&t * &t).scale(&BigRational::new(1.into(), 2.into())) - &c7.one();
        assert_eq!(y.to_string(), "1/2*t^2 - 1");
    }

    #[test]
    fn inverse_and_errors() {
        let c5 = ScalarContext::for_modulus(5);
        let a = &c5.theta() + &c5.integer(3);
        assert!((&a * &a.inv().unwrap()).is_one());
        assert_eq!(c5.zero().inv(), Err(ScalarError::DivisionByZero));
        let c4 = ScalarContext::for_modulus(4);
        assert!(matches!(
            a.checked_add(&c4.one()),
            Err(ScalarError::ContextMismatch { .. })
        ));
        assert_eq!(c5.pow2(-3), c5.ratio(1, 8));
        assert_eq!(c5.pow2(4), c5.integer(16));
    }
}
