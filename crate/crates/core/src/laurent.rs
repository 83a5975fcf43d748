//! Truncated Laurent series over F_q in u = 1/theta-tilde, the numeric model
//! of the completion at the infinite place. theta itself embeds exactly as
//! -u^{-(q-1)}.
//!
//! Every value carries a precision floor: digits at u-exponents >= floor are
//! unknown, digits in [lead, floor) are certified. Arithmetic propagates
//! floors so that every reported digit stays certified; nothing is ever
//! rounded optimistically.

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::fq::{Fq, FqCtx};
use crate::poly::PolyA;
use std::fmt;
use std::sync::Arc;

/// Floor used for exactly-known zero values.
pub const EXACT_FLOOR: i64 = i64::MAX / 4;

#[derive(Clone)]
pub struct LaurentU {
    pub fq: Arc<FqCtx>,
    /// Exponent of the first stored digit. Meaningless when `digits` is empty.
    lead: i64,
    /// digits[i] is the coefficient of u^{lead+i}; leading digit nonzero,
    /// trailing zeros stripped (they are known zeros up to the floor).
    digits: Vec<Fq>,
    /// Digits at exponent >= floor are unknown.
    floor: i64,
}

impl fmt::Debug for LaurentU {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "O(u^{})", self.floor);
        }
        let mut parts = Vec::new();
        for (i, d) in self.digits.iter().enumerate().take(8) {
            if d.0 != 0 {
                parts.push(format!("{}*u^{}", d.0, self.lead + i as i64));
            }
        }
        if self.digits.len() > 8 {
            parts.push("..".into());
        }
        write!(f, "{} + O(u^{})", parts.join("+"), self.floor)
    }
}

impl LaurentU {
    fn normalized(fq: Arc<FqCtx>, mut lead: i64, mut digits: Vec<Fq>, floor: i64) -> LaurentU {
        if !digits.is_empty() {
            let keep = (floor.saturating_sub(lead)).max(0) as usize;
            digits.truncate(keep);
        }
        while let Some(&d) = digits.first() {
            if d.0 == 0 {
                digits.remove(0);
                lead += 1;
            } else {
                break;
            }
        }
        while let Some(&d) = digits.last() {
            if d.0 == 0 {
                digits.pop();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            LaurentU {
                fq,
                lead: floor,
                digits,
                floor,
            }
        } else {
            LaurentU {
                fq,
                lead,
                digits,
                floor,
            }
        }
    }

    /// The tracked zero O(u^floor).
    pub fn zero_tracked(fq: &Arc<FqCtx>, floor: i64) -> LaurentU {
        LaurentU {
            fq: fq.clone(),
            lead: floor,
            digits: Vec::new(),
            floor,
        }
    }

    /// Exactly-known zero.
    pub fn zero_exact(fq: &Arc<FqCtx>) -> LaurentU {
        LaurentU::zero_tracked(fq, EXACT_FLOOR)
    }

    /// c * u^e known to `prec` relative digits.
    pub fn monomial(fq: &Arc<FqCtx>, c: Fq, e: i64, prec: i64) -> LaurentU {
        if c.0 == 0 {
            return LaurentU::zero_exact(fq);
        }
        LaurentU {
            fq: fq.clone(),
            lead: e,
            digits: vec![c],
            floor: e + prec,
        }
    }

    pub fn one(fq: &Arc<FqCtx>, prec: i64) -> LaurentU {
        LaurentU::monomial(fq, fq.one(), 0, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// u-valuation. For a tracked zero this is the floor (a certified lower
    /// bound for the valuation of the exact value).
    pub fn val(&self) -> i64 {
        if self.digits.is_empty() {
            self.floor
        } else {
            self.lead
        }
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn leading_digit(&self) -> Fq {
        self.digits.first().copied().unwrap_or(Fq(0))
    }

    pub fn digit(&self, e: i64) -> Fq {
        if self.digits.is_empty() || e < self.lead {
            return Fq(0);
        }
        let i = (e - self.lead) as usize;
        self.digits.get(i).copied().unwrap_or(Fq(0))
    }

    /// Number of certified relative digits (floor - val).
    pub fn rel_prec(&self) -> i64 {
        self.floor - self.val()
    }

    pub fn add(&self, other: &LaurentU) -> LaurentU {
        let fq = &self.fq;
        let floor = self.floor.min(other.floor);
        if self.digits.is_empty() && other.digits.is_empty() {
            return LaurentU::zero_tracked(fq, floor);
        }
        let lead = self.val().min(other.val());
        let len = (floor.saturating_sub(lead)).max(0) as usize;
        let mut digits = vec![Fq(0); len];
        for (i, d) in digits.iter_mut().enumerate() {
            let e = lead + i as i64;
            *d = fq.add(&self.digit(e), &other.digit(e));
        }
        LaurentU::normalized(fq.clone(), lead, digits, floor)
    }

    pub fn neg(&self) -> LaurentU {
        let fq = &self.fq;
        LaurentU {
            fq: fq.clone(),
            lead: self.lead,
            digits: self.digits.iter().map(|d| fq.neg(d)).collect(),
            floor: self.floor,
        }
    }

    pub fn sub(&self, other: &LaurentU) -> LaurentU {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Fq) -> LaurentU {
        let fq = &self.fq;
        if c.0 == 0 {
            return LaurentU::zero_exact(fq);
        }
        LaurentU {
            fq: fq.clone(),
            lead: self.lead,
            digits: self.digits.iter().map(|d| fq.mul(d, &c)).collect(),
            floor: self.floor,
        }
    }

    /// Multiply by u^k exactly.
    pub fn shift(&self, k: i64) -> LaurentU {
        LaurentU {
            fq: self.fq.clone(),
            lead: self.lead + k,
            digits: self.digits.clone(),
            floor: self.floor.saturating_add(k),
        }
    }

    pub fn mul(&self, other: &LaurentU) -> LaurentU {
        let fq = &self.fq;
        // x = X + O(u^fa), y = Y + O(u^fb): XY + O(u^{va+fb}) + O(u^{vb+fa})
        let floor = (self.val().saturating_add(other.floor))
            .min(other.val().saturating_add(self.floor));
        if self.digits.is_empty() || other.digits.is_empty() {
            return LaurentU::zero_tracked(fq, floor);
        }
        let lead = self.lead + other.lead;
        let len = (floor.saturating_sub(lead)).max(0) as usize;
        let mut digits = vec![Fq(0); len];
        for (i, a) in self.digits.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            for (j, b) in other.digits.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                digits[i + j] = fq.add(&digits[i + j], &fq.mul(a, b));
            }
        }
        LaurentU::normalized(fq.clone(), lead, digits, floor)
    }

    pub fn inv(&self) -> Result<LaurentU> {
        let fq = &self.fq;
        if self.digits.is_empty() {
            return Err(Error::InsufficientPrecision(
                "inverse of a value with no known digits".into(),
            ));
        }
        let c0 = self.digits[0];
        let c0i = fq.inv(&c0)?;
        let n = self.rel_prec().max(0) as usize;
        // y = c0^{-1} u^{-lead} (1 + e_1 u + ...)^{-1} digit by digit
        let mut w = vec![Fq(0); n];
        if n > 0 {
            w[0] = fq.one();
            for k in 1..n {
                let mut s = Fq(0);
                for i in 1..=k {
                    let e_i = fq.mul(&self.digit(self.lead + i as i64), &c0i);
                    s = fq.add(&s, &fq.mul(&e_i, &w[k - i]));
                }
                w[k] = fq.neg(&s);
            }
        }
        let digits: Vec<Fq> = w.iter().map(|d| fq.mul(d, &c0i)).collect();
        let lead = -self.lead;
        let floor = lead + n as i64;
        Ok(LaurentU::normalized(fq.clone(), lead, digits, floor))
    }

    pub fn div(&self, other: &LaurentU) -> Result<LaurentU> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power (negative allowed for invertible values).
    pub fn pow_i(&self, e: i64) -> Result<LaurentU> {
        if e == 0 {
            return Ok(LaurentU::one(&self.fq, self.rel_prec().max(1)));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc: Option<LaurentU> = None;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => b.clone(),
                    Some(a) => a.mul(&b),
                });
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc.unwrap())
    }

    /// x -> x^{q^n}, exact since digit coefficients are fixed by x -> x^q.
    /// Digits spread to exponents multiplied by q^n; the floor scales the
    /// same way, so relative precision multiplies.
    pub fn pow_qn(&self, n: u32) -> LaurentU {
        let fq = &self.fq;
        if n == 0 {
            return self.clone();
        }
        let qn = (fq.q as i64).pow(n);
        if self.digits.is_empty() {
            return LaurentU::zero_tracked(fq, self.floor.saturating_mul(qn));
        }
        let len = (self.digits.len() - 1) * qn as usize + 1;
        let mut digits = vec![Fq(0); len];
        for (i, &d) in self.digits.iter().enumerate() {
            digits[i * qn as usize] = d;
        }
        LaurentU::normalized(
            fq.clone(),
            self.lead * qn,
            digits,
            self.floor.saturating_mul(qn),
        )
    }

    /// Inverse of `pow_qn(1)`: digit contraction. Errors unless every known
    /// digit sits at an exponent divisible by q.
    pub fn qth_root(&self) -> Result<LaurentU> {
        let fq = &self.fq;
        let q = fq.q as i64;
        if self.digits.is_empty() {
            return Ok(LaurentU::zero_tracked(fq, self.floor.div_euclid(q)));
        }
        if self.lead % q != 0 {
            return Err(Error::NotAQthPower);
        }
        let mut digits = Vec::new();
        for (i, &d) in self.digits.iter().enumerate() {
            let e = self.lead + i as i64;
            if e % q == 0 {
                digits.push(d);
            } else if d.0 != 0 {
                return Err(Error::NotAQthPower);
            }
        }
        // unknown region starts at ceil(floor/q)
        let floor = (self.floor + q - 1).div_euclid(q);
        Ok(LaurentU::normalized(fq.clone(), self.lead / q, digits, floor))
    }

    /// Square root in odd characteristic. Returns the root whose leading
    /// digit is `lead_digit` if given, otherwise the first root found.
    pub fn sqrt(&self, lead_digit: Option<Fq>) -> Result<LaurentU> {
        let fq = &self.fq;
        if fq.p == 2 {
            return Err(Error::NotASquare);
        }
        if self.digits.is_empty() {
            return Ok(LaurentU::zero_tracked(fq, self.floor / 2));
        }
        if self.lead % 2 != 0 {
            return Err(Error::NotASquare);
        }
        let c0 = self.digits[0];
        let y0 = match lead_digit {
            Some(want) => {
                if fq.mul(&want, &want) == c0 {
                    want
                } else {
                    return Err(Error::NotASquare);
                }
            }
            None => {
                let mut found = None;
                for i in 0..fq.q {
                    let cand = Fq(i as u8);
                    if fq.mul(&cand, &cand) == c0 {
                        found = Some(cand);
                        break;
                    }
                }
                found.ok_or(Error::NotASquare)?
            }
        };
        let n = self.rel_prec().max(0) as usize;
        let two_y0_inv = fq.inv(&fq.add(&y0, &y0))?;
        let mut y = vec![Fq(0); n.max(1)];
        y[0] = y0;
        for k in 1..n {
            // c_k = sum_{i+j=k} y_i y_j  =>  2 y_0 y_k = c_k - sum_{0<i<k}
            let mut s = Fq(0);
            for i in 1..k {
                s = fq.add(&s, &fq.mul(&y[i], &y[k - i]));
            }
            let ck = self.digit(self.lead + k as i64);
            y[k] = fq.mul(&fq.sub(&ck, &s), &two_y0_inv);
        }
        let lead = self.lead / 2;
        Ok(LaurentU::normalized(fq.clone(), lead, y, lead + n as i64))
    }

    /// theta = -u^{-(q-1)}, exact to `prec` relative digits.
    pub fn theta(fq: &Arc<FqCtx>, prec: i64) -> LaurentU {
        LaurentU::monomial(fq, fq.neg(&fq.one()), -(fq.q as i64 - 1), prec)
    }

    /// Embed an exact polynomial in A = F_q[theta].
    pub fn from_poly(fq: &Arc<FqCtx>, p: &PolyA, prec: i64) -> LaurentU {
        if p.is_zero() {
            return LaurentU::zero_exact(fq);
        }
        let qm1 = fq.q as i64 - 1;
        let d = p.degree().unwrap() as i64;
        let lead = -qm1 * d;
        let len = (qm1 * d + 1) as usize;
        let mut digits = vec![Fq(0); len];
        for (i, &c) in p.coeffs.iter().enumerate() {
            if c.0 == 0 {
                continue;
            }
            // theta^i = (-1)^i u^{-(q-1) i}
            let e = -qm1 * i as i64;
            let sign = if i % 2 == 0 { c } else { fq.neg(&c) };
            digits[(e - lead) as usize] = sign;
        }
        LaurentU::normalized(fq.clone(), lead, digits, lead + qm1 * d + prec)
    }

    /// Certified number of agreeing digits, relative to the larger of the two
    /// values: val(a-b) - min(val a, val b). When the difference is a tracked
    /// zero the difference floor gives a certified lower bound.
    pub fn agree_digits(&self, other: &LaurentU) -> i64 {
        let d = self.sub(other);
        d.val() - self.val().min(other.val())
    }

    /// Check that all known digits sit at exponents congruent to 0 mod n
    /// (used to verify membership in k_infty inside F_q((u))).
    pub fn supported_on_multiples_of(&self, n: i64) -> bool {
        if self.digits.is_empty() {
            return true;
        }
        for (i, &d) in self.digits.iter().enumerate() {
            if d.0 != 0 && (self.lead + i as i64).rem_euclid(n) != 0 {
                return false;
            }
        }
        true
    }

    /// Coefficient of theta^{-j} (j >= 1) when the value lies in k_infty:
    /// theta^{-j} = (-1)^j u^{j(q-1)}.
    pub fn theta_coeff(&self, j: i64) -> Fq {
        let fq = &self.fq;
        let d = self.digit(j * (fq.q as i64 - 1));
        if j % 2 == 0 {
            d
        } else {
            fq.neg(&d)
        }
    }

    /// Truncate the floor down to `floor` (weakening the certificate).
    pub fn with_floor(&self, floor: i64) -> LaurentU {
        let f = self.floor.min(floor);
        let digits = if self.digits.is_empty() {
            Vec::new()
        } else {
            let keep = (f - self.lead).max(0) as usize;
            self.digits.iter().copied().take(keep).collect()
        };
        LaurentU::normalized(self.fq.clone(), self.val(), digits, f)
    }

    /// JSON wire format: {lead_exp, digits, floor}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lead_exp": if self.digits.is_empty() { self.floor } else { self.lead },
            "digits": self.digits.iter().map(|d| d.0 as u64).collect::<Vec<_>>(),
            "floor": self.floor,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<FqCtx> {
        FqCtx::prime(3).unwrap()
    }

    #[test]
    fn theta_embedding() {
        let fq = f3();
        let th = LaurentU::theta(&fq, 32);
        assert_eq!(th.val(), -2);
        assert_eq!(th.leading_digit(), Fq(2));
        // theta * inv(theta) == 1 on tracked digits
        let ti = th.inv().unwrap();
        let prod = th.mul(&ti);
        assert!(prod.sub(&LaurentU::one(&fq, 32)).is_zero());
        // inv(theta) = -u^{q-1}
        assert_eq!(ti.val(), 2);
        assert_eq!(ti.leading_digit(), Fq(2));
    }

    #[test]
    fn mul_floor_tracking() {
        let fq = f3();
        let a = LaurentU::monomial(&fq, Fq(1), -3, 10); // floor 7
        let b = LaurentU::monomial(&fq, Fq(2), 5, 10); // floor 15
        let p = a.mul(&b);
        assert_eq!(p.val(), 2);
        // floor = min(-3 + 15, 5 + 7) = 12
        assert_eq!(p.floor(), 12);
    }

    #[test]
    fn frobenius_power_spreads_digits() {
        let fq = f3();
        // (u + u^2)^q = u^3 + u^6 for q = 3
        let mut x = LaurentU::monomial(&fq, Fq(1), 1, 20);
        x = x.add(&LaurentU::monomial(&fq, Fq(1), 2, 20));
        let y = x.pow_qn(1);
        assert_eq!(y.digit(3), Fq(1));
        assert_eq!(y.digit(6), Fq(1));
        assert_eq!(y.digit(4), Fq(0));
        assert_eq!(y.val(), 3);
        // q-th root undoes it
        let back = y.qth_root().unwrap();
        assert!(back.sub(&x).is_zero());
    }

    #[test]
    fn sqrt_squares_back() {
        let fq = f3();
        // theta^2 - theta embeds with even lead; sqrt must square back
        let th = LaurentU::theta(&fq, 48);
        let x = th.mul(&th).sub(&th);
        let r = x.sqrt(None).unwrap();
        let sq = r.mul(&r);
        assert!(sq.sub(&x).is_zero());
        assert!(sq.sub(&x).val() >= 40);
    }

    #[test]
    fn poly_embed_matches_horner() {
        let fq = f3();
        let p = PolyA::from_ints(&fq, &[1, 2, 0, 1]); // theta^3 + 2theta + 1
        let direct = LaurentU::from_poly(&fq, &p, 30);
        let th = LaurentU::theta(&fq, 40);
        let mut acc = LaurentU::zero_exact(&fq);
        for &c in p.coeffs.iter().rev() {
            acc = acc.mul(&th).add(&LaurentU::monomial(&fq, c, 0, 40));
        }
        assert!(direct.sub(&acc).is_zero());
    }

    #[test]
    fn insufficient_precision_on_unknown_inverse() {
        let fq = f3();
        let z = LaurentU::zero_tracked(&fq, 5);
        assert!(matches!(z.inv(), Err(Error::InsufficientPrecision(_))));
    }
}
