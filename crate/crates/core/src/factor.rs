//! Polynomial factorization over finite fields: squarefree decomposition,
//! distinct-degree splitting, then Cantor-Zassenhaus equal-degree splitting
//! (trace construction in characteristic 2). Randomness is a fixed-seed
//! ChaCha stream so results are reproducible run to run.

use crate::error::Result;
use crate::field::FiniteFieldCtx;
use crate::fq::FqCtx;
use crate::poly::{monic_by_degree, Poly, PolyA};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Full factorization of a nonzero polynomial into monic irreducibles with
/// multiplicity, plus the leading unit. Factors are returned sorted by
/// (degree, coefficient order) for determinism.
pub fn factor<F: FiniteFieldCtx>(f: &Poly<F>, ctx: &F) -> Result<(F::El, Vec<(Poly<F>, usize)>)> {
    let lead = f.lead(ctx);
    let monic = f.make_monic(ctx);
    let mut out: Vec<(Poly<F>, usize)> = Vec::new();
    factor_monic(&monic, ctx, &mut out)?;
    out.sort_by_key(|(p, _)| poly_key(p, ctx));
    Ok((lead, out))
}

fn poly_key<F: FiniteFieldCtx>(p: &Poly<F>, ctx: &F) -> (usize, Vec<u128>) {
    (
        p.coeffs.len(),
        p.coeffs.iter().rev().map(|c| ctx.index_of(c)).collect(),
    )
}

fn factor_monic<F: FiniteFieldCtx>(
    f: &Poly<F>,
    ctx: &F,
    out: &mut Vec<(Poly<F>, usize)>,
) -> Result<()> {
    match f.degree() {
        None | Some(0) => return Ok(()),
        Some(1) => {
            out.push((f.clone(), 1));
            return Ok(());
        }
        _ => {}
    }
    let deriv = f.derivative(ctx);
    if deriv.is_zero() {
        // f = g(x^p): take p-th roots of coefficients
        let p = ctx.characteristic() as usize;
        let root_exp = ctx.order() / ctx.characteristic() as u128;
        let mut g = Vec::new();
        for (i, c) in f.coeffs.iter().enumerate() {
            if i % p == 0 {
                g.push(ctx.pow(c, root_exp));
            }
        }
        let g = Poly::new(g, ctx);
        let mut sub = Vec::new();
        factor_monic(&g, ctx, &mut sub)?;
        for (q, e) in sub {
            out.push((q, e * p));
        }
        return Ok(());
    }
    let gcd = Poly::gcd(f, &deriv, ctx)?;
    let sqfree = if gcd.degree() == Some(0) {
        f.clone()
    } else {
        f.div_exact(&gcd, ctx)?
    };
    // distinct irreducibles of the squarefree part, each once
    let mut parts = Vec::new();
    factor_squarefree(&sqfree, ctx, 1, &mut parts)?;
    // exact multiplicities by trial division; recurse on whatever is left
    // (irreducibles whose multiplicity is divisible by p do not show up in
    // the squarefree part)
    let mut rest = f.clone();
    for (p, _) in parts {
        let mut e = 0usize;
        loop {
            let (q, r) = rest.divrem(&p, ctx)?;
            if !r.is_zero() {
                break;
            }
            e += 1;
            rest = q;
        }
        debug_assert!(e >= 1);
        out.push((p, e));
    }
    if rest.degree().unwrap_or(0) > 0 {
        let mut sub = Vec::new();
        factor_monic(&rest, ctx, &mut sub)?;
        for (p, e) in sub {
            match out.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 += e,
                None => out.push((p, e)),
            }
        }
    }
    Ok(())
}

fn factor_squarefree<F: FiniteFieldCtx>(
    f: &Poly<F>,
    ctx: &F,
    mult: usize,
    out: &mut Vec<(Poly<F>, usize)>,
) -> Result<()> {
    // distinct-degree
    let n = match f.degree() {
        None | Some(0) => return Ok(()),
        Some(n) => n,
    };
    let q = ctx.order();
    let x = Poly::monomial(1, ctx);
    let mut h = x.divrem(f, ctx)?.1; // x^{q^d} mod f, starting d=0
    let mut rest = f.clone();
    let mut d = 0usize;
    while rest.degree().unwrap_or(0) > 0 {
        d += 1;
        if 2 * d > rest.degree().unwrap() {
            // remainder is irreducible
            out.push((rest.clone(), mult));
            break;
        }
        h = h.pow_mod(q, &rest, ctx)?;
        let diff = h.sub(&x, ctx);
        let g = Poly::gcd(&diff, &rest, ctx)?;
        if g.degree().unwrap_or(0) > 0 {
            equal_degree_split(&g, d, ctx, mult, out)?;
            rest = rest.div_exact(&g, ctx)?;
            h = h.divrem(&rest, ctx)?.1;
        }
        if d >= n {
            break;
        }
    }
    Ok(())
}

fn equal_degree_split<F: FiniteFieldCtx>(
    f: &Poly<F>,
    d: usize,
    ctx: &F,
    mult: usize,
    out: &mut Vec<(Poly<F>, usize)>,
) -> Result<()> {
    let deg = f.degree().unwrap();
    if deg == d {
        out.push((f.clone(), mult));
        return Ok(());
    }
    let q = ctx.order();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4361726c69747au64 ^ deg as u64);
    loop {
        // deterministic pseudo-random polynomial of degree < deg
        let coeffs: Vec<F::El> = (0..deg)
            .map(|_| ctx.elem_from_index(rng.random::<u64>() as u128 % q))
            .collect();
        let r = Poly::new(coeffs, ctx);
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = if ctx.characteristic() == 2 {
            // trace splitting: T(r) = r + r^2 + r^4 + ... over F_2
            let e = (q.pow(d as u32)).trailing_zeros(); // q^d = 2^e
            let mut acc = r.divrem(f, ctx)?.1;
            let mut term = acc.clone();
            for _ in 1..e {
                term = term.mul(&term, ctx).divrem(f, ctx)?.1;
                acc = acc.add(&term, ctx);
            }
            Poly::gcd(&acc, f, ctx)?
        } else {
            let e = (q.pow(d as u32) - 1) / 2;
            let pw = r.pow_mod(e, f, ctx)?;
            let shifted = pw.sub(&Poly::one(ctx), ctx);
            Poly::gcd(&shifted, f, ctx)?
        };
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < deg {
            equal_degree_split(&g, d, ctx, mult, out)?;
            equal_degree_split(&f.div_exact(&g, ctx)?, d, ctx, mult, out)?;
            return Ok(());
        }
    }
}

/// Rabin irreducibility test.
pub fn is_irreducible<F: FiniteFieldCtx>(f: &Poly<F>, ctx: &F) -> Result<bool> {
    let n = match f.degree() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(n) => n,
    };
    let q = ctx.order();
    let x = Poly::monomial(1, ctx);
    // x^{q^n} == x mod f
    let mut h = x.divrem(f, ctx)?.1;
    for _ in 0..n {
        h = h.pow_mod(q, f, ctx)?;
    }
    if h != x.divrem(f, ctx)?.1 {
        return Ok(false);
    }
    // gcd(x^{q^{n/r}} - x, f) = 1 for prime divisors r of n
    let mut primes = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for r in primes {
        let e = n / r;
        let mut h = x.divrem(f, ctx)?.1;
        for _ in 0..e {
            h = h.pow_mod(q, f, ctx)?;
        }
        let g = Poly::gcd(&h.sub(&x, ctx), f, ctx)?;
        if g.degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Roots of f in the ground field, deterministic order.
pub fn roots<F: FiniteFieldCtx>(f: &Poly<F>, ctx: &F) -> Result<Vec<F::El>> {
    let mut out = Vec::new();
    if f.is_zero() {
        return Ok(out);
    }
    for i in 0..ctx.order() {
        let a = ctx.elem_from_index(i);
        if ctx.is_zero(&f.eval(&a, ctx)) {
            out.push(a);
        }
    }
    Ok(out)
}

/// All monic irreducibles in A = F_q[theta] of degree <= max_deg, sorted by
/// (degree, lexicographic coefficients).
pub fn monic_irreducibles(fq: &Arc<FqCtx>, max_deg: usize) -> Result<Vec<PolyA>> {
    let mut out = Vec::new();
    for d in 1..=max_deg {
        for p in monic_by_degree(fq, d) {
            if is_irreducible(&p, fq)? {
                out.push(p);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldCtx, QuotCtx};

    fn f3() -> Arc<FqCtx> {
        FqCtx::prime(3).unwrap()
    }

    #[test]
    fn counts_match_moebius() {
        // number of monic irreducibles of degree d is (1/d) sum_{e|d} mu(e) q^{d/e}
        for (p, m, modulus) in [(3u32, 1u32, None), (2, 1, None)] {
            let fq = FqCtx::new(p, m, modulus).unwrap();
            let q = fq.q as i64;
            let mu = |n: usize| -> i64 {
                match n {
                    1 => 1,
                    2 | 3 | 5 => -1,
                    4 => 0,
                    6 => 1,
                    _ => unreachable!(),
                }
            };
            let irr = monic_irreducibles(&fq, 6).unwrap();
            for d in 1..=6usize {
                let count = irr.iter().filter(|p| p.degree() == Some(d)).count() as i64;
                let mut expect = 0i64;
                for e in 1..=d {
                    if d % e == 0 {
                        expect += mu(e) * q.pow((d / e) as u32);
                    }
                }
                expect /= d as i64;
                assert_eq!(count, expect, "degree {d}");
            }
        }
    }

    #[test]
    fn spec_enumeration_examples() {
        let fq = f3();
        let deg1: Vec<_> = monic_irreducibles(&fq, 1)
            .unwrap()
            .iter()
            .map(|p| p.to_text(&fq))
            .collect();
        assert_eq!(deg1, vec!["T", "T+1", "T+2"]);
        let irr2 = monic_irreducibles(&fq, 2).unwrap();
        assert_eq!(irr2.iter().filter(|p| p.degree() == Some(2)).count(), 3);

        let f2 = FqCtx::prime(2).unwrap();
        let deg3: Vec<_> = monic_irreducibles(&f2, 3)
            .unwrap()
            .into_iter()
            .filter(|p| p.degree() == Some(3))
            .map(|p| p.to_text(&f2))
            .collect();
        assert_eq!(deg3, vec!["T^3+T+1", "T^3+T^2+1"]);
    }

    #[test]
    fn factor_remultiplies() {
        let fq = f3();
        // (theta^2+1)^2 * theta * (theta+1)^3
        let a = PolyA::from_ints(&fq, &[1, 0, 1]);
        let b = PolyA::theta(&fq);
        let c = PolyA::from_ints(&fq, &[1, 1]);
        let mut f = a.mul(&a, &fq);
        f = f.mul(&b, &fq);
        for _ in 0..3 {
            f = f.mul(&c, &fq);
        }
        let f = f.scale(&fq.from_int(2), &fq);
        let (lead, factors) = factor(&f, &fq).unwrap();
        let mut prod = PolyA::constant(lead, &fq);
        for (p, e) in &factors {
            assert!(is_irreducible(p, &fq).unwrap());
            for _ in 0..*e {
                prod = prod.mul(p, &fq);
            }
        }
        assert_eq!(prod, f);
        assert_eq!(factors.len(), 3);
    }

    #[test]
    fn theta_squared_plus_one_irreducible() {
        let fq = f3();
        let p = PolyA::from_ints(&fq, &[1, 0, 1]);
        assert!(is_irreducible(&p, &fq).unwrap());
    }

    #[test]
    fn factor_over_extension() {
        // z^2 + theta over F_3[theta]/(theta+1), i.e. z^2 - 1 -> (z-1)(z+1)
        let fq = f3();
        let wp = PolyA::from_ints(&fq, &[1, 1]);
        let fp = QuotCtx::new(fq.clone(), wp);
        let theta_bar = fp.gen();
        let z2 = Poly::new(vec![theta_bar, fp.zero(), fp.one()], &fp);
        let (_, factors) = factor(&z2, &fp).unwrap();
        assert_eq!(factors.len(), 2);
        assert!(factors.iter().all(|(p, e)| p.degree() == Some(1) && *e == 1));
    }

    #[test]
    fn factor_quartic_over_f9_remultiplies() {
        // z^4 + (theta+1) z^2 + 1 over F_9 = F_3[theta]/(theta^2+1)
        let fq = f3();
        let modulus = PolyA::from_ints(&fq, &[1, 0, 1]);
        let f9 = QuotCtx::new(fq.clone(), modulus);
        let t = f9.gen();
        let tp1 = f9.add(&t, &f9.one());
        let f = Poly::new(
            vec![f9.one(), f9.zero(), tp1, f9.zero(), f9.one()],
            &f9,
        );
        let (lead, factors) = factor(&f, &f9).unwrap();
        let mut prod = Poly::constant(lead, &f9);
        for (p, e) in &factors {
            for _ in 0..*e {
                prod = prod.mul(p, &f9);
            }
        }
        assert_eq!(prod, f);
    }

    #[test]
    fn char2_splitting() {
        let f2 = FqCtx::prime(2).unwrap();
        // x^4 + x = x(x+1)(x^2+x+1)
        let f = PolyA::from_ints(&f2, &[0, 1, 0, 0, 1]);
        let (_, factors) = factor(&f, &f2).unwrap();
        assert_eq!(factors.len(), 3);
        let mut prod = PolyA::one(&f2);
        for (p, e) in &factors {
            for _ in 0..*e {
                prod = prod.mul(p, &f2);
            }
        }
        assert_eq!(prod, f);
    }
}
