//! The coefficient field F_q, q = p^m.
//!
//! Elements are stored as a single table index in `0..q`; the index is the
//! base-p value of the little-endian coefficient vector over F_p. All
//! arithmetic goes through precomputed tables, which keeps the series layers
//! fast. The modulus must be irreducible of degree m over F_p; q is capped at
//! 256 (desk scale), which covers every configuration exercised here.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// An element of F_q, valid only together with its [`FqCtx`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(pub u8);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Context for F_q = F_p[x]/(modulus).
pub struct FqCtx {
    pub p: u32,
    pub m: u32,
    pub q: u32,
    /// Little-endian coefficients of the degree-m modulus over F_p (length m+1, monic).
    pub modulus: Vec<u32>,
    add_t: Vec<u8>,
    mul_t: Vec<u8>,
    neg_t: Vec<u8>,
    inv_t: Vec<u8>,
    /// x -> x^p
    frob_t: Vec<u8>,
}

impl fmt::Debug for FqCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqCtx(q={})", self.q)
    }
}

impl PartialEq for FqCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

fn vec_of_index(i: u32, p: u32, m: u32) -> Vec<u32> {
    let mut v = vec![0u32; m as usize];
    let mut i = i;
    for c in v.iter_mut() {
        *c = i % p;
        i /= p;
    }
    v
}

fn index_of_vec(v: &[u32], p: u32) -> u32 {
    let mut i = 0u32;
    for &c in v.iter().rev() {
        i = i * p + c;
    }
    i
}

/// Multiply coefficient vectors mod (modulus, p).
fn vec_mul(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let m = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * m];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // reduce by the monic modulus
    for k in (m..2 * m).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (j, &mj) in modulus.iter().enumerate().take(m) {
            let idx = k - m + j;
            prod[idx] = (prod[idx] + c * (p - mj % p)) % p;
        }
    }
    prod.truncate(m);
    prod
}

fn is_irreducible_fp(modulus: &[u32], p: u32) -> bool {
    // brute force: no roots and no factor of degree <= m/2 (m tiny here)
    let m = modulus.len() - 1;
    if m == 1 {
        return true;
    }
    // try all monic divisors of degree 1..=m/2
    let mut divs: Vec<Vec<u32>> = Vec::new();
    fn gen(deg: usize, p: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, pos: usize) {
        if pos == deg {
            let mut v = cur.clone();
            v.push(1);
            out.push(v);
            return;
        }
        for c in 0..p {
            cur.push(c);
            gen(deg, p, cur, out, pos + 1);
            cur.pop();
        }
    }
    for d in 1..=m / 2 {
        gen(d, p, &mut Vec::new(), &mut divs, 0);
    }
    'outer: for dv in divs {
        // polynomial remainder of modulus by dv over F_p
        let mut rem: Vec<u32> = modulus.to_vec();
        let dd = dv.len() - 1;
        while rem.len() > dd {
            let lead = *rem.last().unwrap();
            if lead != 0 {
                let shift = rem.len() - 1 - dd;
                for (j, &c) in dv.iter().enumerate() {
                    let idx = shift + j;
                    rem[idx] = (rem[idx] + lead * (p - c % p)) % p;
                }
            }
            rem.pop();
        }
        for &c in &rem {
            if c != 0 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

impl FqCtx {
    /// Prime field F_p.
    pub fn prime(p: u32) -> Result<Arc<FqCtx>> {
        FqCtx::new(p, 1, None)
    }

    /// F_q with q = p^m. For m > 1 a modulus (little-endian, length m+1,
    /// monic, irreducible over F_p) must be supplied.
    pub fn new(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Result<Arc<FqCtx>> {
        if p < 2 || m < 1 {
            return Err(Error::ConfigError("need p >= 2, m >= 1".into()));
        }
        // p prime?
        for d in 2..p {
            if d * d > p {
                break;
            }
            if p % d == 0 {
                return Err(Error::ConfigError(format!("p = {p} is not prime")));
            }
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= 256)
            .ok_or_else(|| Error::ConfigError("q = p^m must be <= 256".into()))?;
        let modulus = match modulus {
            Some(mut md) => {
                for c in md.iter_mut() {
                    *c %= p;
                }
                if md.len() != m as usize + 1 || *md.last().unwrap() != 1 {
                    return Err(Error::ConfigError(
                        "modulus must be monic of degree m".into(),
                    ));
                }
                if !is_irreducible_fp(&md, p) {
                    return Err(Error::ConfigError("modulus is reducible over F_p".into()));
                }
                md
            }
            None => {
                if m != 1 {
                    return Err(Error::ConfigError("m > 1 requires a modulus".into()));
                }
                vec![0, 1]
            }
        };

        let qn = q as usize;
        let mut add_t = vec![0u8; qn * qn];
        let mut mul_t = vec![0u8; qn * qn];
        let mut neg_t = vec![0u8; qn];
        let mut inv_t = vec![0u8; qn];
        let mut frob_t = vec![0u8; qn];
        for i in 0..q {
            let vi = vec_of_index(i, p, m);
            let mut nv = vi.clone();
            for c in nv.iter_mut() {
                *c = (p - *c) % p;
            }
            neg_t[i as usize] = index_of_vec(&nv, p) as u8;
            for j in 0..q {
                let vj = vec_of_index(j, p, m);
                let mut s = vi.clone();
                for (k, &c) in vj.iter().enumerate() {
                    s[k] = (s[k] + c) % p;
                }
                add_t[(i * q + j) as usize] = index_of_vec(&s, p) as u8;
                let pr = vec_mul(&vi, &vj, &modulus, p);
                mul_t[(i * q + j) as usize] = index_of_vec(&pr, p) as u8;
            }
        }
        // inverses and Frobenius by table powering
        for i in 1..q {
            let mut acc = i;
            // i^(q-2) = i^{-1}
            let mut e = q - 2;
            let mut result = 1u32; // index of one
            while e > 0 {
                if e & 1 == 1 {
                    result = mul_t[(result * q + acc) as usize] as u32;
                }
                acc = mul_t[(acc * q + acc) as usize] as u32;
                e >>= 1;
            }
            inv_t[i as usize] = result as u8;
        }
        for i in 0..q {
            let mut acc = 1u32;
            for _ in 0..p {
                acc = mul_t[(acc * q + i) as usize] as u32;
            }
            frob_t[i as usize] = acc as u8;
        }
        Ok(Arc::new(FqCtx {
            p,
            m,
            q,
            modulus,
            add_t,
            mul_t,
            neg_t,
            inv_t,
            frob_t,
        }))
    }

    /// x -> x^p (generates Gal(F_q/F_p)).
    #[inline]
    pub fn frobenius_p(&self, a: Fq) -> Fq {
        Fq(self.frob_t[a.0 as usize])
    }
    /// Integer -> prime-subfield element.
    pub fn from_int(&self, n: i64) -> Fq {
        let r = n.rem_euclid(self.p as i64) as u32;
        // element with coefficient vector (r, 0, ..)
        Fq(r as u8)
    }
    /// Coefficient vector over F_p (little-endian, length m).
    pub fn coeff_vec(&self, a: Fq) -> Vec<u32> {
        vec_of_index(a.0 as u32, self.p, self.m)
    }
    pub fn from_coeff_vec(&self, v: &[u32]) -> Fq {
        let mut w = vec![0u32; self.m as usize];
        for (i, &c) in v.iter().enumerate().take(self.m as usize) {
            w[i] = c % self.p;
        }
        Fq(index_of_vec(&w, self.p) as u8)
    }
}

// Field arithmetic goes through the `FieldCtx` trait implemented on
// `Arc<FqCtx>`, which is what every context struct stores.
impl crate::field::FieldCtx for Arc<FqCtx> {
    type El = Fq;

    #[inline]
    fn zero(&self) -> Fq {
        Fq(0)
    }
    #[inline]
    fn one(&self) -> Fq {
        Fq(1)
    }
    #[inline]
    fn is_zero(&self, a: &Fq) -> bool {
        a.0 == 0
    }
    #[inline]
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(self.add_t[a.0 as usize * self.q as usize + b.0 as usize])
    }
    #[inline]
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        let nb = self.neg_t[b.0 as usize];
        Fq(self.add_t[a.0 as usize * self.q as usize + nb as usize])
    }
    #[inline]
    fn neg(&self, a: &Fq) -> Fq {
        Fq(self.neg_t[a.0 as usize])
    }
    #[inline]
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(self.mul_t[a.0 as usize * self.q as usize + b.0 as usize])
    }
    #[inline]
    fn inv(&self, a: &Fq) -> Result<Fq> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Fq(self.inv_t[a.0 as usize]))
    }
    fn characteristic(&self) -> u64 {
        self.p as u64
    }
}

impl crate::field::FiniteFieldCtx for Arc<FqCtx> {
    fn order(&self) -> u128 {
        self.q as u128
    }
    fn elem_from_index(&self, i: u128) -> Fq {
        Fq((i % self.q as u128) as u8)
    }
    fn index_of(&self, a: &Fq) -> u128 {
        a.0 as u128
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    #[test]
    fn prime_field_arith() {
        let f3 = FqCtx::prime(3).unwrap();
        let two = f3.from_int(2);
        assert_eq!(f3.add(&two, &two), f3.one());
        assert_eq!(f3.mul(&two, &two), f3.one());
        assert_eq!(f3.inv(&two).unwrap(), two);
        assert_eq!(f3.neg(&f3.one()), two);
    }

    #[test]
    fn field_axioms_f9() {
        // F_9 = F_3[x]/(x^2+1)
        let f9 = FqCtx::new(3, 2, Some(vec![1, 0, 1])).unwrap();
        for i in 0..9u8 {
            for j in 0..9u8 {
                let a = Fq(i);
                let b = Fq(j);
                assert_eq!(f9.add(&a, &b), f9.add(&b, &a));
                assert_eq!(f9.mul(&a, &b), f9.mul(&b, &a));
                if j != 0 {
                    let inv = f9.inv(&b).unwrap();
                    assert_eq!(f9.mul(&b, &inv), f9.one());
                }
            }
        }
        // Frobenius has order m = 2
        for i in 0..9u8 {
            let a = Fq(i);
            assert_eq!(f9.frobenius_p(f9.frobenius_p(a)), a);
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        // x^2 - 1 = (x-1)(x+1) over F_3
        assert!(FqCtx::new(3, 2, Some(vec![2, 0, 1])).is_err());
    }

    #[test]
    fn frobenius_is_additive() {
        let f4 = FqCtx::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        for i in 0..4u8 {
            for j in 0..4u8 {
                let a = Fq(i);
                let b = Fq(j);
                assert_eq!(
                    f4.frobenius_p(f4.add(&a, &b)),
                    f4.add(&f4.frobenius_p(a), &f4.frobenius_p(b))
                );
            }
        }
    }
}
