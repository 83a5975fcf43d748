//! Field abstraction used by the generic polynomial layer.
//!
//! Three implementations matter here: F_q itself, quotient extensions
//! F[x]/(g) used for residue fields of primes, and the rational function
//! field F_q(theta) that coordinates of cyclotomic integers live in.

use crate::error::{Error, Result};
use crate::fq::FqCtx;
use crate::poly::Poly;
use std::fmt;
use std::sync::Arc;

pub trait FieldCtx: Clone + fmt::Debug {
    type El: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn inv(&self, a: &Self::El) -> Result<Self::El>;
    /// Characteristic p.
    fn characteristic(&self) -> u64;

    fn pow(&self, a: &Self::El, mut e: u128) -> Self::El {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Extra structure available on finite fields: order and a canonical
/// enumeration, used by the factoring code for deterministic splitting.
pub trait FiniteFieldCtx: FieldCtx {
    fn order(&self) -> u128;
    fn elem_from_index(&self, i: u128) -> Self::El;
    fn index_of(&self, a: &Self::El) -> u128;
}

/// Quotient field F[x]/(modulus) for irreducible modulus over a finite field F.
#[derive(Clone)]
pub struct QuotCtx<F: FieldCtx> {
    pub base: F,
    /// Monic irreducible modulus.
    pub modulus: Poly<F>,
    deg: usize,
}

impl<F: FieldCtx> fmt::Debug for QuotCtx<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuotCtx(deg={})", self.deg)
    }
}

impl<F: FieldCtx> QuotCtx<F> {
    pub fn new(base: F, modulus: Poly<F>) -> Self {
        let deg = modulus.degree().expect("modulus must be nonzero");
        QuotCtx { base, modulus, deg }
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    /// Canonical reduction of a polynomial into the quotient.
    pub fn project(&self, p: &Poly<F>) -> Vec<F::El> {
        let (_, r) = p.divrem(&self.modulus, &self.base).expect("monic modulus");
        let mut v = r.coeffs;
        v.resize(self.deg, self.base.zero());
        v
    }

    pub fn lift(&self, a: &[F::El]) -> Poly<F> {
        Poly::new(a.to_vec(), &self.base)
    }

    /// Image of a base-field element.
    pub fn embed_base(&self, a: &F::El) -> Vec<F::El> {
        let mut v = vec![self.base.zero(); self.deg];
        v[0] = a.clone();
        v
    }

    /// The class of x itself.
    pub fn gen(&self) -> Vec<F::El> {
        if self.deg == 1 {
            // x = -c0 in F[x]/(x + c0)
            return vec![self.base.neg(&self.modulus.coeffs[0])];
        }
        let mut v = vec![self.base.zero(); self.deg];
        v[1] = self.base.one();
        v
    }
}

impl<F: FieldCtx> FieldCtx for QuotCtx<F> {
    type El = Vec<F::El>;

    fn zero(&self) -> Self::El {
        vec![self.base.zero(); self.deg]
    }
    fn one(&self) -> Self::El {
        let mut v = vec![self.base.zero(); self.deg];
        v[0] = self.base.one();
        v
    }
    fn is_zero(&self, a: &Self::El) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| self.base.add(x, y))
            .collect()
    }
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| self.base.sub(x, y))
            .collect()
    }
    fn neg(&self, a: &Self::El) -> Self::El {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El {
        let pa = self.lift(a);
        let pb = self.lift(b);
        let prod = pa.mul(&pb, &self.base);
        self.project(&prod)
    }
    fn inv(&self, a: &Self::El) -> Result<Self::El> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        let pa = self.lift(a);
        let (g, s, _) = Poly::xgcd(&pa, &self.modulus, &self.base)?;
        // g is a nonzero constant since modulus is irreducible and a != 0
        let g0 = g.coeffs.first().cloned().unwrap_or_else(|| self.base.zero());
        if g.degree() != Some(0) {
            return Err(Error::DivisionByZero);
        }
        let ginv = self.base.inv(&g0)?;
        let sval = s.scale(&ginv, &self.base);
        Ok(self.project(&sval))
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
}

impl<F: FiniteFieldCtx> FiniteFieldCtx for QuotCtx<F> {
    fn order(&self) -> u128 {
        self.base.order().pow(self.deg as u32)
    }
    fn elem_from_index(&self, i: u128) -> Self::El {
        let b = self.base.order();
        let mut v = Vec::with_capacity(self.deg);
        let mut i = i % b.pow(self.deg as u32);
        for _ in 0..self.deg {
            v.push(self.base.elem_from_index(i % b));
            i /= b;
        }
        v
    }
    fn index_of(&self, a: &Self::El) -> u128 {
        let b = self.base.order();
        let mut i = 0u128;
        for c in a.iter().rev() {
            i = i * b + self.base.index_of(c);
        }
        i
    }
}

/// Rational functions over F_q in theta: the field k = F_q(theta).
/// Elements are kept reduced with monic denominator.
#[derive(Clone)]
pub struct RatCtx {
    pub fq: Arc<FqCtx>,
}

#[derive(Clone, PartialEq)]
pub struct Rat {
    pub num: Poly<Arc<FqCtx>>,
    pub den: Poly<Arc<FqCtx>>,
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({:?}/{:?})", self.num.coeffs, self.den.coeffs)
    }
}

impl fmt::Debug for RatCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatCtx(q={})", self.fq.q)
    }
}

impl RatCtx {
    pub fn new(fq: Arc<FqCtx>) -> Self {
        RatCtx { fq }
    }

    pub fn from_poly(&self, p: Poly<Arc<FqCtx>>) -> Rat {
        Rat {
            num: p,
            den: Poly::one(&self.fq),
        }
    }

    pub fn from_parts(&self, num: Poly<Arc<FqCtx>>, den: Poly<Arc<FqCtx>>) -> Result<Rat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(num, den))
    }

    fn reduce(&self, num: Poly<Arc<FqCtx>>, den: Poly<Arc<FqCtx>>) -> Rat {
        if num.is_zero() {
            return Rat {
                num,
                den: Poly::one(&self.fq),
            };
        }
        let g = Poly::gcd(&num, &den, &self.fq).expect("nonzero");
        let (mut n, mut d) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (
                num.divrem(&g, &self.fq).unwrap().0,
                den.divrem(&g, &self.fq).unwrap().0,
            )
        };
        // normalize denominator monic
        let lead = *d.coeffs.last().unwrap();
        if lead != self.fq.one() {
            let li = self.fq.inv(&lead).unwrap();
            n = n.scale(&li, &self.fq);
            d = d.scale(&li, &self.fq);
        }
        Rat { num: n, den: d }
    }

    /// True when the element is a polynomial (denominator 1).
    pub fn is_integral(&self, a: &Rat) -> bool {
        a.den.degree() == Some(0)
    }

    /// theta-degree of the rational function; None for zero.
    pub fn deg(&self, a: &Rat) -> Option<i64> {
        let n = a.num.degree()?;
        Some(n as i64 - a.den.degree().unwrap() as i64)
    }
}

impl FieldCtx for RatCtx {
    type El = Rat;

    fn zero(&self) -> Rat {
        Rat {
            num: Poly::zero(),
            den: Poly::one(&self.fq),
        }
    }
    fn one(&self) -> Rat {
        Rat {
            num: Poly::one(&self.fq),
            den: Poly::one(&self.fq),
        }
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.num.is_zero()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        let num = a
            .num
            .mul(&b.den, &self.fq)
            .add(&b.num.mul(&a.den, &self.fq), &self.fq);
        let den = a.den.mul(&b.den, &self.fq);
        self.reduce(num, den)
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        self.add(a, &self.neg(b))
    }
    fn neg(&self, a: &Rat) -> Rat {
        Rat {
            num: a.num.neg(&self.fq),
            den: a.den.clone(),
        }
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        let num = a.num.mul(&b.num, &self.fq);
        let den = a.den.mul(&b.den, &self.fq);
        self.reduce(num, den)
    }
    fn inv(&self, a: &Rat) -> Result<Rat> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(a.den.clone(), a.num.clone()))
    }
    fn characteristic(&self) -> u64 {
        self.fq.p as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    #[test]
    fn quotient_field_inverse() {
        // F_9 realized as F_3[t]/(t^2+1)
        let f3 = FqCtx::prime(3).unwrap();
        let modulus = Poly::from_ints(&f3, &[1, 0, 1]);
        let f9 = QuotCtx::new(f3.clone(), modulus);
        let t = f9.gen();
        let t2 = f9.mul(&t, &t); // = -1
        assert_eq!(t2, f9.neg(&f9.one()));
        let ti = f9.inv(&t).unwrap();
        assert_eq!(f9.mul(&t, &ti), f9.one());
        assert_eq!(f9.order(), 9);
    }

    #[test]
    fn rational_function_arith() {
        let f3 = FqCtx::prime(3).unwrap();
        let k = RatCtx::new(f3.clone());
        let theta = k.from_poly(Poly::from_ints(&f3, &[0, 1]));
        let x = k.inv(&theta).unwrap(); // 1/theta
        let s = k.add(&x, &theta); // (1 + theta^2)/theta
        assert_eq!(s.num.coeffs.len(), 3);
        assert_eq!(s.den.coeffs.len(), 2);
        let back = k.sub(&s, &theta);
        assert_eq!(back, x);
        assert_eq!(k.deg(&x), Some(-1));
    }
}
