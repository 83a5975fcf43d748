//! Dense univariate polynomials over a field context.
//!
//! `Poly<Arc<FqCtx>>` doubles as the ring A = F_q[theta]; helpers for that
//! case (sign, text encoding with "T" for theta) live at the bottom.

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::fq::{Fq, FqCtx};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct Poly<F: FieldCtx> {
    /// Little-endian coefficients, no trailing zeros.
    pub coeffs: Vec<F::El>,
}

impl<F: FieldCtx> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<F: FieldCtx> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<F: FieldCtx> Poly<F> {
    pub fn new(mut coeffs: Vec<F::El>, ctx: &F) -> Self {
        while let Some(c) = coeffs.last() {
            if ctx.is_zero(c) {
                coeffs.pop();
            } else {
                break;
            }
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(ctx: &F) -> Self {
        Poly {
            coeffs: vec![ctx.one()],
        }
    }

    pub fn constant(c: F::El, ctx: &F) -> Self {
        Poly::new(vec![c], ctx)
    }

    /// x^n
    pub fn monomial(n: usize, ctx: &F) -> Self {
        let mut v = vec![ctx.zero(); n + 1];
        v[n] = ctx.one();
        Poly { coeffs: v }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lead(&self, ctx: &F) -> F::El {
        self.coeffs.last().cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn coeff(&self, i: usize, ctx: &F) -> F::El {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn is_monic(&self, ctx: &F) -> bool {
        match self.coeffs.last() {
            Some(c) => *c == ctx.one(),
            None => false,
        }
    }

    pub fn add(&self, other: &Self, ctx: &F) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(ctx.add(&self.coeff(i, ctx), &other.coeff(i, ctx)));
        }
        Poly::new(v, ctx)
    }

    pub fn sub(&self, other: &Self, ctx: &F) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(ctx.sub(&self.coeff(i, ctx), &other.coeff(i, ctx)));
        }
        Poly::new(v, ctx)
    }

    pub fn neg(&self, ctx: &F) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| ctx.neg(c)).collect(),
        }
    }

    pub fn scale(&self, s: &F::El, ctx: &F) -> Self {
        if ctx.is_zero(s) {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|c| ctx.mul(c, s)).collect(), ctx)
    }

    pub fn mul(&self, other: &Self, ctx: &F) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ctx.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] = ctx.add(&v[i + j], &ctx.mul(a, b));
            }
        }
        Poly::new(v, ctx)
    }

    /// Shift by x^n.
    pub fn shift(&self, n: usize, ctx: &F) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ctx.zero(); n];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    /// Quotient and remainder; deg rem < deg divisor.
    pub fn divrem(&self, divisor: &Self, ctx: &F) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = ctx.inv(&divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let mut quot = vec![ctx.zero(); qlen];
        for k in (0..qlen).rev() {
            let c = ctx.mul(&rem[k + dd], &lead_inv);
            if ctx.is_zero(&c) {
                continue;
            }
            quot[k] = c.clone();
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = ctx.sub(&rem[k + j], &ctx.mul(&c, dj));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot, ctx), Poly::new(rem, ctx)))
    }

    /// Exact division; errors if a remainder is left.
    pub fn div_exact(&self, divisor: &Self, ctx: &F) -> Result<Self> {
        let (q, r) = self.divrem(divisor, ctx)?;
        if !r.is_zero() {
            return Err(Error::InexactDivision("polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic gcd.
    pub fn gcd(a: &Self, b: &Self, ctx: &F) -> Result<Self> {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, ctx)?;
            a = b;
            b = r;
        }
        if let Some(d) = a.degree() {
            let li = ctx.inv(&a.coeffs[d])?;
            a = a.scale(&li, ctx);
        }
        Ok(a)
    }

    /// Extended gcd: returns (g, s, t) with s*a + t*b = g (g monic).
    pub fn xgcd(a: &Self, b: &Self, ctx: &F) -> Result<(Self, Self, Self)> {
        let mut r0 = a.clone();
        let mut r1 = b.clone();
        let mut s0 = Poly::one(ctx);
        let mut s1 = Poly::zero();
        let mut t0 = Poly::zero();
        let mut t1 = Poly::one(ctx);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, ctx)?;
            let s = s0.sub(&q.mul(&s1, ctx), ctx);
            let t = t0.sub(&q.mul(&t1, ctx), ctx);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if let Some(d) = r0.degree() {
            let li = ctx.inv(&r0.coeffs[d])?;
            r0 = r0.scale(&li, ctx);
            s0 = s0.scale(&li, ctx);
            t0 = t0.scale(&li, ctx);
        }
        Ok((r0, s0, t0))
    }

    pub fn eval(&self, x: &F::El, ctx: &F) -> F::El {
        let mut acc = ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = ctx.add(&ctx.mul(&acc, x), c);
        }
        acc
    }

    /// Evaluate with coefficients mapped into another field.
    pub fn eval_map<G: FieldCtx>(
        &self,
        x: &G::El,
        tgt: &G,
        map: impl Fn(&F::El) -> G::El,
    ) -> G::El {
        let mut acc = tgt.zero();
        for c in self.coeffs.iter().rev() {
            acc = tgt.add(&tgt.mul(&acc, x), &map(c));
        }
        acc
    }

    pub fn compose(&self, inner: &Self, ctx: &F) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner, ctx).add(&Poly::constant(c.clone(), ctx), ctx);
        }
        acc
    }

    pub fn derivative(&self, ctx: &F) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let p = ctx.characteristic();
        let mut v = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let mult = (i as u64) % p;
            let mut acc = ctx.zero();
            for _ in 0..mult {
                acc = ctx.add(&acc, c);
            }
            v.push(acc);
        }
        Poly::new(v, ctx)
    }

    /// self^e mod m.
    pub fn pow_mod(&self, mut e: u128, m: &Self, ctx: &F) -> Result<Self> {
        let mut base = self.divrem(m, ctx)?.1;
        let mut acc = Poly::one(ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ctx).divrem(m, ctx)?.1;
            }
            base = base.mul(&base, ctx).divrem(m, ctx)?.1;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn make_monic(&self, ctx: &F) -> Self {
        match self.degree() {
            None => Poly::zero(),
            Some(d) => {
                let li = ctx.inv(&self.coeffs[d]).expect("nonzero lead");
                self.scale(&li, ctx)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// A = F_q[theta] specifics
// ---------------------------------------------------------------------------

/// Polynomials over F_q, i.e. elements of A = F_q[theta].
pub type PolyA = Poly<Arc<FqCtx>>;

impl PolyA {
    pub fn from_ints(fq: &Arc<FqCtx>, c: &[i64]) -> PolyA {
        Poly::new(c.iter().map(|&n| fq.from_int(n)).collect(), fq)
    }

    pub fn theta(fq: &Arc<FqCtx>) -> PolyA {
        Poly::from_ints(fq, &[0, 1])
    }

    /// sgn = leading coefficient (sign function of the paper restricted to A).
    pub fn sgn(&self, fq: &Arc<FqCtx>) -> Fq {
        self.coeffs.last().copied().unwrap_or_else(|| fq.zero())
    }

    /// Apply x -> x^p coefficientwise (Galois action of F_q/F_p).
    pub fn frobenius_p_coeffs(&self, fq: &Arc<FqCtx>) -> PolyA {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| fq.frobenius_p(c)).collect(),
        }
    }

    /// Deterministic order key: (degree, lexicographic coefficients from the
    /// top). Matches the enumeration order of `monic_by_degree`.
    pub fn order_key(&self) -> (usize, Vec<u8>) {
        let d = self.coeffs.len();
        let rev: Vec<u8> = self.coeffs.iter().rev().map(|c| c.0).collect();
        (d, rev)
    }

    /// Render with variable name "T". Coefficients print as integers for
    /// prime fields and as `[c0,c1,..]` vectors otherwise.
    pub fn to_text(&self, fq: &Arc<FqCtx>) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if fq.is_zero(&c) {
                continue;
            }
            let cs = if fq.m == 1 {
                c.0.to_string()
            } else {
                let v = fq.coeff_vec(c);
                format!(
                    "[{}]",
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            };
            let term = match i {
                0 => cs,
                1 if cs == "1" => "T".into(),
                1 => format!("{cs}T"),
                _ if cs == "1" => format!("T^{i}"),
                _ => format!("{cs}T^{i}"),
            };
            parts.push(term);
        }
        parts.join("+")
    }

    /// Parse the `to_text` format (also accepts '-' between terms and '*').
    pub fn parse(fq: &Arc<FqCtx>, s: &str) -> Result<PolyA> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::ConfigError("empty polynomial".into()));
        }
        let mut coeffs: Vec<Fq> = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0usize;
        let mut sign_neg = false;
        if bytes[0] == b'+' {
            i = 1;
        } else if bytes[0] == b'-' {
            i = 1;
            sign_neg = true;
        }
        while i < bytes.len() {
            // parse one term: [coeff][*]?[T[^exp]]?
            let start = i;
            let mut coeff: Option<Fq> = None;
            if bytes[i] == b'[' {
                let close = s[i..]
                    .find(']')
                    .ok_or_else(|| Error::ConfigError("unterminated coefficient vector".into()))?
                    + i;
                let inner = &s[i + 1..close];
                let v: Vec<u32> = inner
                    .split(',')
                    .map(|t| {
                        t.parse::<i64>()
                            .map(|n| n.rem_euclid(fq.p as i64) as u32)
                            .map_err(|_| Error::ConfigError(format!("bad coefficient {t}")))
                    })
                    .collect::<Result<_>>()?;
                coeff = Some(fq.from_coeff_vec(&v));
                i = close + 1;
            } else {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j > i {
                    let n: i64 = s[i..j]
                        .parse()
                        .map_err(|_| Error::ConfigError("bad integer".into()))?;
                    coeff = Some(fq.from_int(n));
                    i = j;
                }
            }
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            }
            let mut exp = 0usize;
            if i < bytes.len() && (bytes[i] == b'T' || bytes[i] == b't') {
                i += 1;
                exp = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let mut j = i;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == i {
                        return Err(Error::ConfigError("missing exponent".into()));
                    }
                    exp = s[i..j]
                        .parse()
                        .map_err(|_| Error::ConfigError("bad exponent".into()))?;
                    i = j;
                }
            }
            if i == start {
                return Err(Error::ConfigError(format!("cannot parse term in '{s}'")));
            }
            let mut c = coeff.unwrap_or_else(|| fq.one());
            if sign_neg {
                c = fq.neg(&c);
            }
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, fq.zero());
            }
            coeffs[exp] = fq.add(&coeffs[exp], &c);
            // separator
            sign_neg = false;
            if i < bytes.len() {
                match bytes[i] {
                    b'+' => i += 1,
                    b'-' => {
                        sign_neg = true;
                        i += 1;
                    }
                    _ => {
                        return Err(Error::ConfigError(format!(
                            "unexpected character '{}' in '{s}'",
                            bytes[i] as char
                        )))
                    }
                }
            }
        }
        Ok(Poly::new(coeffs, fq))
    }
}

/// All monic polynomials of exact degree d in (degree, lexicographic) order.
pub fn monic_by_degree(fq: &Arc<FqCtx>, d: usize) -> Vec<PolyA> {
    let q = fq.q as u64;
    let total = q.pow(d as u32);
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut coeffs = vec![fq.zero(); d + 1];
        coeffs[d] = fq.one();
        // most significant coefficient varies slowest
        let mut rest = idx;
        for j in 0..d {
            coeffs[j] = Fq((rest % q) as u8);
            rest /= q;
        }
        out.push(Poly { coeffs });
    }
    // order: lexicographic reading coefficients from the top down
    out.sort_by_key(|p| p.order_key());
    out
}

/// All polynomials (including zero and non-monic) of degree < d.
pub fn all_below_degree(fq: &Arc<FqCtx>, d: usize) -> Vec<PolyA> {
    let q = fq.q as u64;
    let total = q.pow(d as u32);
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut coeffs = vec![fq.zero(); d];
        let mut rest = idx;
        for c in coeffs.iter_mut() {
            *c = Fq((rest % q) as u8);
            rest /= q;
        }
        out.push(Poly::new(coeffs, fq));
    }
    out
}
