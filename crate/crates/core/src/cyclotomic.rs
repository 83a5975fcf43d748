//! The Carlitz cyclotomic field K = k(zeta_f) and its integers B = A[zeta].
//!
//! Elements of K are z-polynomials of degree < r over k = F_q(theta), reduced
//! modulo the cyclotomic polynomial delta_f(z). Primes of B away from f are
//! (wp, g_p(zeta)) pairs obtained by factoring delta_f modulo wp.

use crate::error::{Error, Result};
use crate::factor::{factor, is_irreducible, monic_irreducibles};
use crate::field::{FieldCtx, QuotCtx, Rat, RatCtx};
use crate::fq::{Fq, FqCtx};
use crate::poly::{all_below_degree, Poly, PolyA};
use std::sync::Arc;

/// Element of K in the zeta-power basis (z-degree < r, coefficients in k).
pub type KEl = Poly<RatCtx>;

/// Coefficients kappa_j of the additive polynomial C_a(z) = sum kappa_j z^{q^j},
/// kappa_j in A. The same data read with theta renamed t gives the two-variable
/// Carlitz polynomial.
pub fn carlitz_coeffs(fq: &Arc<FqCtx>, a: &PolyA) -> Vec<PolyA> {
    let q = fq.q as usize;
    let theta = PolyA::theta(fq);
    let deg = match a.degree() {
        None => return vec![PolyA::zero()],
        Some(d) => d,
    };
    // power[i] = coefficients of C_{theta^i}
    let mut power: Vec<PolyA> = vec![PolyA::one(fq)];
    let mut acc: Vec<PolyA> = vec![PolyA::zero(); deg + 1];
    for (i, &ci) in a.coeffs.iter().enumerate() {
        if ci.0 != 0 {
            for (j, kj) in power.iter().enumerate() {
                acc[j] = acc[j].add(&kj.scale(&ci, fq), fq);
            }
        }
        if i == deg {
            break;
        }
        // advance C_{theta^i} -> C_{theta^{i+1}}: k'_j = theta k_j + k_{j-1}^q
        let mut next: Vec<PolyA> = Vec::with_capacity(power.len() + 1);
        for j in 0..=power.len() {
            let mut term = PolyA::zero();
            if j < power.len() {
                term = power[j].mul(&theta, fq);
            }
            if j > 0 {
                let mut prev_q = PolyA::one(fq);
                for _ in 0..q {
                    prev_q = prev_q.mul(&power[j - 1], fq);
                }
                term = term.add(&prev_q, fq);
            }
            next.push(term);
        }
        power = next;
    }
    while acc.len() > 1 && acc.last().map(|p| p.is_zero()) == Some(true) {
        acc.pop();
    }
    acc
}

/// C_a(z) as a z-polynomial over k.
pub fn carlitz_z_poly(fq: &Arc<FqCtx>, kk: &RatCtx, a: &PolyA) -> Poly<RatCtx> {
    let coeffs = carlitz_coeffs(fq, a);
    let q = fq.q as usize;
    let mut v: Vec<Rat> = Vec::new();
    for (j, kj) in coeffs.iter().enumerate() {
        let deg = q.pow(j as u32);
        if v.len() <= deg {
            v.resize(deg + 1, kk.zero());
        }
        v[deg] = kk.from_poly(kj.clone());
    }
    Poly::new(v, kk)
}

/// A prime of B lying over wp (wp not dividing f): the pair (wp, g_p) with
/// g_p a monic irreducible factor of delta_f mod wp.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeOfB {
    pub wp: PolyA,
    /// g_p over F_wp; coefficients are vectors over F_q (little-endian in theta-bar).
    pub gp: Vec<Vec<Fq>>,
    /// ell = [F_p : F_q] = deg(wp) * deg_z(g_p).
    pub ell: usize,
}

impl PrimeOfB {
    pub fn res_deg_over_fp(&self) -> usize {
        self.gp.len() - 1
    }
    /// Norm degree: deg N(p) = ell.
    pub fn norm_degree(&self) -> usize {
        self.ell
    }
    /// N(p) = wp^{[F_p:F_wp]} in A.
    pub fn norm(&self, fq: &Arc<FqCtx>) -> PolyA {
        let mut n = PolyA::one(fq);
        for _ in 0..self.res_deg_over_fp() {
            n = n.mul(&self.wp, fq);
        }
        n
    }
    /// Canonical sort key: (norm degree, wp, g_p coefficients).
    pub fn order_key(&self) -> (usize, (usize, Vec<u8>), Vec<Vec<u8>>) {
        (
            self.ell,
            self.wp.order_key(),
            self.gp
                .iter()
                .rev()
                .map(|c| c.iter().rev().map(|d| d.0).collect())
                .collect(),
        )
    }
    pub fn to_json(&self, fq: &Arc<FqCtx>) -> serde_json::Value {
        serde_json::json!({
            "wp": self.wp.to_text(fq),
            "gp": self.gp.iter().map(|c| {
                let p = Poly { coeffs: c.clone() };
                p.to_text(fq)
            }).collect::<Vec<_>>(),
            "ell": self.ell,
        })
    }
}

/// Residue field tower F_p = (A/wp)[Z]/(g_p) of a prime.
pub struct ResidueField {
    pub fp: QuotCtx<Arc<FqCtx>>,
    pub fpz: QuotCtx<QuotCtx<Arc<FqCtx>>>,
    pub ell: usize,
}

pub struct CycCtx {
    pub fq: Arc<FqCtx>,
    pub kk: RatCtx,
    pub f: PolyA,
    pub f_factors: Vec<(PolyA, usize)>,
    /// delta_f as a monic z-polynomial with coefficients in A.
    pub delta_a: Vec<PolyA>,
    /// Same polynomial over k, used for reduction.
    pub delta_k: Poly<RatCtx>,
    /// r = [K:k] = #(A/fA)^x.
    pub r: usize,
    /// Unit residues b mod f, deg b < deg f, sorted by (degree, lex).
    pub unit_reps: Vec<PolyA>,
    /// zeta_conj[i] = C_{unit_reps[i]}(zeta) reduced mod delta_f.
    pub zeta_conj: Vec<KEl>,
}

impl CycCtx {
    pub fn new(fq: &Arc<FqCtx>, f: &PolyA) -> Result<Arc<CycCtx>> {
        if !f.is_monic(fq) || f.degree() == Some(0) || f.is_zero() {
            return Err(Error::ConfigError("f must be monic of degree >= 1".into()));
        }
        let kk = RatCtx::new(fq.clone());
        let (_, f_factors) = factor(f, fq)?;
        let d = f.degree().unwrap();

        // unit residues
        let mut unit_reps: Vec<PolyA> = all_below_degree(fq, d)
            .into_iter()
            .filter(|b| !b.is_zero() && Poly::gcd(b, f, fq).map(|g| g.degree() == Some(0)) == Ok(true))
            .collect();
        unit_reps.sort_by_key(|p| p.order_key());
        let r = unit_reps.len();

        // delta_f by Moebius over squarefree monic divisors of f:
        // delta_f = prod_{e | rad(f)} C_{f/e}(z)^{mu(e)}
        let primes: Vec<PolyA> = f_factors.iter().map(|(p, _)| p.clone()).collect();
        let mut num = Poly::one(&kk);
        let mut den = Poly::one(&kk);
        for mask in 0..(1u32 << primes.len()) {
            let mut e = PolyA::one(fq);
            let mut bits = 0;
            for (i, p) in primes.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    e = e.mul(p, fq);
                    bits += 1;
                }
            }
            let quotient = f.div_exact(&e, fq)?;
            let cz = carlitz_z_poly(fq, &kk, &quotient);
            if bits % 2 == 0 {
                num = num.mul(&cz, &kk);
            } else {
                den = den.mul(&cz, &kk);
            }
        }
        let delta_k = num.div_exact(&den, &kk).map_err(|_| {
            Error::InexactDivision("Moebius product for delta_f did not divide".into())
        })?;
        if delta_k.degree() != Some(r) {
            return Err(Error::InexactDivision(format!(
                "deg delta_f = {:?}, expected r = {}",
                delta_k.degree(),
                r
            )));
        }
        // coefficients must be integral (in A) and the polynomial monic
        let mut delta_a = Vec::with_capacity(r + 1);
        for c in &delta_k.coeffs {
            if !kk.is_integral(c) {
                return Err(Error::InexactDivision("delta_f not integral".into()));
            }
            delta_a.push(c.num.clone());
        }
        if delta_a[r] != PolyA::one(fq) {
            return Err(Error::InexactDivision("delta_f not monic".into()));
        }

        let mut ctx = CycCtx {
            fq: fq.clone(),
            kk,
            f: f.clone(),
            f_factors,
            delta_a,
            delta_k,
            r,
            unit_reps,
            zeta_conj: Vec::new(),
        };
        // conjugates C_b(zeta)
        let mut conj = Vec::with_capacity(r);
        for b in ctx.unit_reps.clone() {
            let cz = carlitz_z_poly(&ctx.fq, &ctx.kk, &b);
            conj.push(ctx.reduce(&cz));
        }
        ctx.zeta_conj = conj;
        Ok(Arc::new(ctx))
    }

    // ---- K arithmetic -----------------------------------------------------

    pub fn reduce(&self, p: &Poly<RatCtx>) -> KEl {
        p.divrem(&self.delta_k, &self.kk).expect("monic delta").1
    }

    pub fn zero(&self) -> KEl {
        Poly::zero()
    }
    pub fn one(&self) -> KEl {
        Poly::one(&self.kk)
    }
    pub fn zeta(&self) -> KEl {
        Poly::monomial(1, &self.kk)
    }
    pub fn from_rat(&self, a: Rat) -> KEl {
        Poly::constant(a, &self.kk)
    }
    pub fn from_poly_a(&self, a: &PolyA) -> KEl {
        Poly::constant(self.kk.from_poly(a.clone()), &self.kk)
    }
    pub fn add(&self, a: &KEl, b: &KEl) -> KEl {
        a.add(b, &self.kk)
    }
    pub fn sub(&self, a: &KEl, b: &KEl) -> KEl {
        a.sub(b, &self.kk)
    }
    pub fn neg(&self, a: &KEl) -> KEl {
        a.neg(&self.kk)
    }
    pub fn mul(&self, a: &KEl, b: &KEl) -> KEl {
        self.reduce(&a.mul(b, &self.kk))
    }
    pub fn inv(&self, a: &KEl) -> Result<KEl> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = Poly::xgcd(a, &self.delta_k, &self.kk)?;
        if g.degree() != Some(0) {
            // delta_f is irreducible over k, so this cannot happen for a != 0
            return Err(Error::DivisionByZero);
        }
        let gi = self.kk.inv(&g.coeffs[0])?;
        Ok(self.reduce(&s.scale(&gi, &self.kk)))
    }
    pub fn div(&self, a: &KEl, b: &KEl) -> Result<KEl> {
        Ok(self.mul(a, &self.inv(b)?))
    }
    pub fn pow(&self, a: &KEl, e: u64) -> KEl {
        let mut acc = self.one();
        let mut b = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
    /// x -> x^{q^n} (exact Frobenius power in K).
    pub fn pow_qn(&self, a: &KEl, n: u32) -> KEl {
        let mut acc = a.clone();
        for _ in 0..n {
            acc = self.pow(&acc, self.fq.q as u64);
        }
        acc
    }
    pub fn eq(&self, a: &KEl, b: &KEl) -> bool {
        a == b
    }

    /// Common denominator form: (integral coordinates, denominator in A).
    pub fn to_integral(&self, a: &KEl) -> (Vec<PolyA>, PolyA) {
        let fq = &self.fq;
        let mut den = PolyA::one(fq);
        for c in &a.coeffs {
            let g = Poly::gcd(&den, &c.den, fq).unwrap();
            den = den.mul(&c.den.div_exact(&g, fq).unwrap(), fq);
        }
        let mut coords = Vec::with_capacity(self.r);
        for j in 0..self.r {
            match a.coeffs.get(j) {
                Some(c) => {
                    let scale = den.div_exact(&c.den, fq).unwrap();
                    coords.push(c.num.mul(&scale, fq));
                }
                None => coords.push(PolyA::zero()),
            }
        }
        (coords, den)
    }

    /// True when all coordinates lie in A (element of B).
    pub fn is_integral(&self, a: &KEl) -> bool {
        a.coeffs.iter().all(|c| self.kk.is_integral(c))
    }

    // ---- Carlitz action and Galois ----------------------------------------

    /// C_a(x) for x in K.
    pub fn carlitz_apply(&self, a: &PolyA, x: &KEl) -> KEl {
        let coeffs = carlitz_coeffs(&self.fq, a);
        let q = self.fq.q as u64;
        let mut acc = self.zero();
        let mut xp = x.clone();
        for (j, kj) in coeffs.iter().enumerate() {
            if j > 0 {
                xp = self.pow(&xp, q);
            }
            if !kj.is_zero() {
                let term = self.mul(&self.from_poly_a(kj), &xp);
                acc = self.add(&acc, &term);
            }
        }
        acc
    }

    /// Index of b mod f within unit_reps.
    pub fn unit_index(&self, b: &PolyA) -> Result<usize> {
        let red = b.divrem(&self.f, &self.fq)?.1;
        self.unit_reps
            .iter()
            .position(|u| *u == red)
            .ok_or_else(|| Error::ConfigError("residue is not a unit mod f".into()))
    }

    /// Galois automorphism rho_b: zeta -> C_b(zeta).
    pub fn galois(&self, b: &PolyA, x: &KEl) -> Result<KEl> {
        let i = self.unit_index(b)?;
        Ok(self.apply_conj(i, x))
    }

    pub fn apply_conj(&self, i: usize, x: &KEl) -> KEl {
        let c = &self.zeta_conj[i];
        // Horner in the conjugate
        let mut acc = self.zero();
        for coeff in x.coeffs.iter().rev() {
            acc = self.mul(&acc, c);
            acc = self.add(&acc, &self.from_rat(coeff.clone()));
        }
        acc
    }

    /// Inverse automorphism rho_b^{-1}.
    pub fn galois_inv(&self, b: &PolyA) -> Result<PolyA> {
        // find c with bc = 1 mod f
        let (g, s, _) = Poly::xgcd(b, &self.f, &self.fq)?;
        if g.degree() != Some(0) {
            return Err(Error::ConfigError("not a unit mod f".into()));
        }
        let gi = self.fq.inv(&g.coeffs[0])?;
        Ok(s.scale(&gi, &self.fq).divrem(&self.f, &self.fq)?.1)
    }

    /// Field norm N_{K/k}(x) as a rational function (product of conjugates).
    pub fn norm(&self, x: &KEl) -> Rat {
        let mut acc = self.one();
        for i in 0..self.r {
            let cx = self.apply_conj(i, x);
            acc = self.mul(&acc, &cx);
        }
        debug_assert!(acc.degree().unwrap_or(0) == 0);
        acc.coeffs.first().cloned().unwrap_or_else(|| self.kk.zero())
    }

    /// Multiplicative order of wp in (A/fA)^x.
    pub fn order_mod_f(&self, wp: &PolyA) -> Result<usize> {
        let red = wp.divrem(&self.f, &self.fq)?.1;
        let mut acc = red.clone();
        for n in 1..=self.r {
            if acc.sub(&PolyA::one(&self.fq), &self.fq)
                .divrem(&self.f, &self.fq)?
                .1
                .is_zero()
            {
                return Ok(n);
            }
            acc = acc.mul(&red, &self.fq).divrem(&self.f, &self.fq)?.1;
        }
        Err(Error::ConfigError("order computation failed".into()))
    }

    // ---- primes ------------------------------------------------------------

    /// Split an unramified prime wp of A in B (Kummer-Dedekind on delta_f).
    pub fn split_prime(&self, wp: &PolyA) -> Result<Vec<PrimeOfB>> {
        let fq = &self.fq;
        if !wp.is_monic(fq) {
            return Err(Error::ConfigError("wp must be monic".into()));
        }
        if Poly::gcd(wp, &self.f, fq)?.degree() != Some(0) {
            return Err(Error::RamifiedPrime(wp.to_text(fq)));
        }
        let fp = QuotCtx::new(fq.clone(), wp.clone());
        // delta mod wp
        let dz: Poly<QuotCtx<Arc<FqCtx>>> = Poly::new(
            self.delta_a
                .iter()
                .map(|c| fp.project(c))
                .collect(),
            &fp,
        );
        let (_, factors) = factor(&dz, &fp)?;
        let expected = self.order_mod_f(wp)?;
        let mut out = Vec::new();
        for (g, e) in factors {
            if e != 1 {
                return Err(Error::RamifiedPrime(format!(
                    "repeated factor over {}",
                    wp.to_text(fq)
                )));
            }
            let degz = g.degree().unwrap();
            if degz != expected {
                return Err(Error::RamifiedPrime(format!(
                    "residue degree {} != order {} over {}",
                    degz,
                    expected,
                    wp.to_text(fq)
                )));
            }
            out.push(PrimeOfB {
                wp: wp.clone(),
                gp: g.coeffs.clone(),
                ell: wp.degree().unwrap() * degz,
            });
        }
        out.sort_by_key(|p| p.order_key());
        Ok(out)
    }

    /// All primes of B with norm degree <= max_norm_degree, canonical order.
    pub fn primes_up_to(&self, max_norm_degree: usize) -> Result<Vec<PrimeOfB>> {
        let mut out = Vec::new();
        for wp in monic_irreducibles(&self.fq, max_norm_degree)? {
            if Poly::gcd(&wp, &self.f, &self.fq)?.degree() != Some(0) {
                continue; // ramified primes are excluded everywhere
            }
            for pr in self.split_prime(&wp)? {
                if pr.norm_degree() <= max_norm_degree {
                    out.push(pr);
                }
            }
        }
        out.sort_by_key(|p| p.order_key());
        Ok(out)
    }

    pub fn residue_field(&self, pr: &PrimeOfB) -> ResidueField {
        let fp = QuotCtx::new(self.fq.clone(), pr.wp.clone());
        let gp = Poly {
            coeffs: pr.gp.clone(),
        };
        let fpz = QuotCtx::new(fp.clone(), gp);
        ResidueField {
            fp,
            fpz,
            ell: pr.ell,
        }
    }

    /// Reduce an element of K with denominator prime to wp into F_p.
    pub fn reduce_mod_p(
        &self,
        rf: &ResidueField,
        x: &KEl,
    ) -> Result<<QuotCtx<QuotCtx<Arc<FqCtx>>> as FieldCtx>::El> {
        let fp = &rf.fp;
        let fpz = &rf.fpz;
        let mut acc = fpz.zero();
        let zbar = fpz.gen();
        for c in x.coeffs.iter().rev() {
            let denr = fp.project(&c.den);
            if fp.is_zero(&denr) {
                return Err(Error::PoleAtPoint(
                    "denominator vanishes at the prime".into(),
                ));
            }
            let numr = fp.project(&c.num);
            let cred = fp.mul(&numr, &fp.inv(&denr)?);
            acc = fpz.add(&fpz.mul(&acc, &zbar), &fpz.embed_base(&cred));
        }
        Ok(acc)
    }

    /// Galois action on primes: the prime rho_b(p) over the same wp.
    pub fn galois_on_prime(&self, b: &PolyA, pr: &PrimeOfB) -> Result<PrimeOfB> {
        // rho_b(p) contains rho_b(g_p(zeta))
        let gz = self.gp_at_zeta(pr);
        let image = self.galois(b, &gz)?;
        for cand in self.split_prime(&pr.wp)? {
            if self.valuation(&image, &cand)? >= 1 {
                return Ok(cand);
            }
        }
        Err(Error::ConfigError("Galois image prime not found".into()))
    }

    /// g_p evaluated at zeta, an element of B generating p together with wp.
    pub fn gp_at_zeta(&self, pr: &PrimeOfB) -> KEl {
        let mut acc = self.zero();
        let zeta = self.zeta();
        for c in pr.gp.iter().rev() {
            // coefficient c is in A/wp; lift to A
            let lift = Poly {
                coeffs: c.clone(),
            };
            acc = self.add(&self.mul(&acc, &zeta), &self.from_poly_a(&lift));
        }
        acc
    }

    // ---- valuations ---------------------------------------------------------

    fn kel_from_coords(&self, coords: &[PolyA]) -> KEl {
        Poly::new(
            coords.iter().map(|c| self.kk.from_poly(c.clone())).collect(),
            &self.kk,
        )
    }

    /// v_p(x) for nonzero x whose denominator is prime to wp.
    pub fn valuation(&self, x: &KEl, pr: &PrimeOfB) -> Result<i64> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let fq = &self.fq;
        let (coords, den) = self.to_integral(x);
        // x = y/den: v_p(x) = v_p(y) - ord_wp(den), since v_p(a) = ord_wp(a)
        // for a in A at the unramified prime p
        let vden = ord_poly(fq, &den, &pr.wp)?;
        let mut v = 0i64;
        // basis_cache[n] is a Hermite-form A-basis of p^n
        let mut ident = Vec::new();
        for i in 0..self.r {
            let mut row = vec![PolyA::zero(); self.r];
            row[i] = PolyA::one(fq);
            ident.push(row);
        }
        let mut basis_cache: Vec<Vec<Vec<PolyA>>> = vec![ident];
        loop {
            let need = (v + 1) as usize;
            while basis_cache.len() <= need {
                let next = self.extend_power(pr, &basis_cache)?;
                basis_cache.push(next);
            }
            if membership(fq, &coords, &basis_cache[need]) {
                v += 1;
            } else {
                break;
            }
            if v > 4096 {
                return Err(Error::ConfigError("runaway valuation".into()));
            }
        }
        Ok(v - vden)
    }

    fn extend_power(
        &self,
        pr: &PrimeOfB,
        cache: &[Vec<Vec<PolyA>>],
    ) -> Result<Vec<Vec<PolyA>>> {
        let fq = &self.fq;
        let r = self.r;
        let prev = cache.last().unwrap();
        let gpz = self.gp_at_zeta(pr);
        let mut gens: Vec<Vec<PolyA>> = Vec::new();
        for row in prev {
            let el = self.kel_from_coords(row);
            for mult in [&self.from_poly_a(&pr.wp), &gpz] {
                let prod = self.mul(&el, mult);
                let (coords, den) = self.to_integral(&prod);
                debug_assert!(den.degree() == Some(0));
                gens.push(coords);
            }
        }
        hnf_rows(fq, gens, r)
    }

    // ---- q-th roots ---------------------------------------------------------

    /// Solve y^q = x in K by matching an integral monomial ansatz over F_q.
    pub fn qth_root(&self, x: &KEl) -> Result<KEl> {
        let fq = &self.fq;
        let q = fq.q as usize;
        if x.is_zero() {
            return Ok(self.zero());
        }
        let (coords, den) = self.to_integral(x);
        // denominator must be a q-th power E^q
        let eden = poly_qth_root(fq, &den).ok_or(Error::NotAQthPower)?;
        // reduction rows zeta^{q j} mod delta as A-coordinates
        let zeta = self.zeta();
        let mut zq_rows: Vec<(Vec<PolyA>, PolyA)> = Vec::new();
        for j in 0..self.r {
            let zq = self.pow(&zeta, (q * j) as u64);
            let (rc, rd) = self.to_integral(&zq);
            zq_rows.push((rc, rd));
        }
        // common denominator of the reduction rows (powers of delta's leading
        // structure; for monic delta over A the rows are integral, den = 1)
        for (_, rd) in &zq_rows {
            if rd.degree() != Some(0) {
                return Err(Error::QthRootFailure("non-integral zeta^q reduction".into()));
            }
        }
        let max_deg_x = coords
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .unwrap_or(0);
        let slack: usize = zq_rows
            .iter()
            .flat_map(|(rc, _)| rc.iter().filter_map(|c| c.degree()))
            .max()
            .unwrap_or(0);
        let bound_i = max_deg_x / q + 2;
        let rows_theta = q * bound_i + slack + 1;
        let ncols = (bound_i + 1) * self.r;
        let nrows = rows_theta * self.r;
        // build the F_q-linear system
        let mut mat = vec![vec![Fq(0); ncols + 1]; nrows];
        for i in 0..=bound_i {
            for j in 0..self.r {
                let col = i * self.r + j;
                // theta^{q i} * (zeta^{q j} mod delta)
                for (l, cl) in zq_rows[j].0.iter().enumerate() {
                    for (dtheta, &cc) in cl.coeffs.iter().enumerate() {
                        let row = l * rows_theta + dtheta + q * i;
                        if row < l * rows_theta + rows_theta {
                            mat[row][col] = fq.add(&mat[row][col], &cc);
                        }
                    }
                }
            }
        }
        for (l, cl) in coords.iter().enumerate() {
            for (dtheta, &cc) in cl.coeffs.iter().enumerate() {
                if dtheta >= rows_theta {
                    return Err(Error::NotAQthPower);
                }
                mat[l * rows_theta + dtheta][ncols] = cc;
            }
        }
        let sol = solve_fq(fq, &mut mat, ncols).ok_or(Error::NotAQthPower)?;
        // assemble y = (1/E) sum y_ij theta^i zeta^j
        let mut y = self.zero();
        for i in 0..=bound_i {
            for j in 0..self.r {
                let c = sol[i * self.r + j];
                if c.0 != 0 {
                    let mono = PolyA::monomial(i, fq).scale(&c, fq);
                    let term = self.mul(
                        &self.from_poly_a(&mono),
                        &self.pow(&zeta, j as u64),
                    );
                    y = self.add(&y, &term);
                }
            }
        }
        let einv = self
            .kk
            .inv(&self.kk.from_poly(eden))
            .map_err(|_| Error::NotAQthPower)?;
        y = y.scale(&einv, &self.kk);
        // verify exactly
        if self.pow(&y, q as u64) != *x {
            return Err(Error::NotAQthPower);
        }
        Ok(y)
    }
}

/// ord_wp of a nonzero element of A.
fn ord_poly(fq: &Arc<FqCtx>, a: &PolyA, wp: &PolyA) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut v = 0i64;
    let mut rest = a.clone();
    loop {
        let (q, r) = rest.divrem(wp, fq)?;
        if !r.is_zero() {
            return Ok(v);
        }
        v += 1;
        rest = q;
    }
}

/// Row Hermite form over A for a full-rank module of rank `r` given by
/// generator rows; returns r rows, row i with monic pivot at column i and
/// zero entries to the right of the pivot in later rows' pivot columns.
pub fn hnf_rows(fq: &Arc<FqCtx>, mut rows: Vec<Vec<PolyA>>, r: usize) -> Result<Vec<Vec<PolyA>>> {
    let mut out: Vec<Vec<PolyA>> = Vec::with_capacity(r);
    for col in (0..r).rev() {
        // euclidean reduction among rows with nonzero entry in `col`
        loop {
            let mut idxs: Vec<usize> = rows
                .iter()
                .enumerate()
                .filter(|(_, row)| !row[col].is_zero())
                .map(|(i, _)| i)
                .collect();
            if idxs.is_empty() {
                return Err(Error::ConfigError("module not full rank".into()));
            }
            if idxs.len() == 1 {
                break;
            }
            // pick the two smallest degrees and reduce
            idxs.sort_by_key(|&i| rows[i][col].degree().unwrap());
            let (ia, ib) = (idxs[0], idxs[1]);
            let (qq, _) = rows[ib][col].divrem(&rows[ia][col], fq)?;
            let rowa = rows[ia].clone();
            let rowb = &mut rows[ib];
            for c in 0..r {
                rowb[c] = rowb[c].sub(&rowa[c].mul(&qq, fq), fq);
            }
            if rows[ib].iter().all(|c| c.is_zero()) {
                rows.remove(ib);
            }
        }
        let idx = rows
            .iter()
            .position(|row| !row[col].is_zero())
            .expect("pivot row");
        let mut pivot_row = rows.remove(idx);
        // make pivot monic
        let lead = pivot_row[col].lead(fq);
        let li = fq.inv(&lead)?;
        for c in pivot_row.iter_mut() {
            *c = c.scale(&li, fq);
        }
        out.push(pivot_row);
    }
    out.reverse();
    Ok(out)
}

/// Is `coords` in the A-span of the HNF rows?
pub fn membership(fq: &Arc<FqCtx>, coords: &[PolyA], basis: &[Vec<PolyA>]) -> bool {
    let r = coords.len();
    let mut x = coords.to_vec();
    for col in (0..r).rev() {
        let row = &basis[col];
        if x[col].is_zero() {
            continue;
        }
        match x[col].divrem(&row[col], fq) {
            Ok((q, rem)) => {
                if !rem.is_zero() {
                    return false;
                }
                for c in 0..r {
                    x[c] = x[c].sub(&row[c].mul(&q, fq), fq);
                }
            }
            Err(_) => return false,
        }
    }
    x.iter().all(|c| c.is_zero())
}

/// Exact q-th root in A: exists iff support is divisible by q (coefficients
/// of F_q are fixed by the q-power map).
pub fn poly_qth_root(fq: &Arc<FqCtx>, a: &PolyA) -> Option<PolyA> {
    if a.is_zero() {
        return Some(PolyA::zero());
    }
    let q = fq.q as usize;
    let mut out = Vec::new();
    for (i, &c) in a.coeffs.iter().enumerate() {
        if i % q == 0 {
            out.push(c);
        } else if c.0 != 0 {
            return None;
        }
    }
    Some(Poly::new(out, fq))
}

/// Gaussian elimination over F_q on an augmented matrix (ncols unknowns, last
/// column the target). Returns one solution if consistent.
pub fn solve_fq(fq: &Arc<FqCtx>, mat: &mut [Vec<Fq>], ncols: usize) -> Option<Vec<Fq>> {
    let nrows = mat.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        let mut sel = None;
        for (rr, mrow) in mat.iter().enumerate().skip(row) {
            if mrow[col].0 != 0 {
                sel = Some(rr);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        mat.swap(row, sel);
        let pi = fq.inv(&mat[row][col]).ok()?;
        for c in col..=ncols {
            mat[row][c] = fq.mul(&mat[row][c], &pi);
        }
        for rr in 0..nrows {
            if rr != row && mat[rr][col].0 != 0 {
                let factor = mat[rr][col];
                for c in col..=ncols {
                    let s = fq.mul(&factor, &mat[row][c]);
                    mat[rr][c] = fq.sub(&mat[rr][c], &s);
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == nrows {
            break;
        }
    }
    // consistency
    for mrow in mat.iter().skip(row) {
        if mrow[ncols].0 != 0 && mrow[..ncols].iter().all(|c| c.0 == 0) {
            return None;
        }
    }
    let mut sol = vec![Fq(0); ncols];
    for (rr, col) in pivots {
        sol[col] = mat[rr][ncols];
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u32, f_ints: &[i64]) -> (Arc<FqCtx>, Arc<CycCtx>) {
        let fq = FqCtx::prime(q).unwrap();
        let f = PolyA::from_ints(&fq, f_ints);
        let ctx = CycCtx::new(&fq, &f).unwrap();
        (fq, ctx)
    }

    #[test]
    fn carlitz_basic() {
        let fq = FqCtx::prime(3).unwrap();
        let kk = RatCtx::new(fq.clone());
        // C_theta(z) = theta z + z^q
        let ctheta = carlitz_z_poly(&fq, &kk, &PolyA::theta(&fq));
        assert_eq!(ctheta.degree(), Some(3));
        assert_eq!(ctheta.coeffs[1], kk.from_poly(PolyA::theta(&fq)));
        assert_eq!(ctheta.coeffs[3], kk.one());
        // C_1 = identity
        let c1 = carlitz_z_poly(&fq, &kk, &PolyA::one(&fq));
        assert_eq!(c1.degree(), Some(1));
        // C_{theta+1}(z) = z^3 + (theta+1) z
        let ct1 = carlitz_z_poly(&fq, &kk, &PolyA::from_ints(&fq, &[1, 1]));
        assert_eq!(ct1.coeffs[1], kk.from_poly(PolyA::from_ints(&fq, &[1, 1])));
        assert_eq!(ct1.coeffs[3], kk.one());
    }

    #[test]
    fn delta_theta_is_z_qm1_plus_theta() {
        // f = theta: delta = z^{q-1} + theta
        let (fq, ctx) = setup(3, &[0, 1]);
        assert_eq!(ctx.r, 2);
        assert_eq!(ctx.delta_a.len(), 3);
        assert_eq!(ctx.delta_a[0], PolyA::theta(&fq));
        assert!(ctx.delta_a[1].is_zero());
        assert_eq!(ctx.delta_a[2], PolyA::one(&fq));
    }

    #[test]
    fn delta_theta2_minus_theta_q3() {
        // paper: z^4 + (theta+1) z^2 + 1
        let (fq, ctx) = setup(3, &[0, -1, 1]);
        assert_eq!(ctx.r, 4);
        assert_eq!(ctx.delta_a[0], PolyA::one(&fq));
        assert!(ctx.delta_a[1].is_zero());
        assert_eq!(ctx.delta_a[2], PolyA::from_ints(&fq, &[1, 1]));
        assert!(ctx.delta_a[3].is_zero());
        assert_eq!(ctx.delta_a[4], PolyA::one(&fq));
    }

    #[test]
    fn delta_theta2_q2_irreducible_witness() {
        let (fq, ctx) = setup(2, &[0, 0, 1]);
        assert_eq!(ctx.r, 2);
        // an irreducibility witness: some small prime whose order mod f is r
        let mut witness = false;
        for wp in monic_irreducibles(&fq, 3).unwrap() {
            if Poly::gcd(&wp, &ctx.f, &fq).unwrap().degree() != Some(0) {
                continue;
            }
            if ctx.order_mod_f(&wp).unwrap() == ctx.r {
                witness = true;
                break;
            }
        }
        assert!(witness);
    }

    #[test]
    fn galois_is_carlitz_on_torsion() {
        // rho_b(C_a(zeta)) = C_{ba}(zeta) for all units a, b
        let (fq, ctx) = setup(3, &[0, -1, 1]);
        for a in ctx.unit_reps.clone() {
            let ca = ctx.carlitz_apply(&a, &ctx.zeta());
            for b in ctx.unit_reps.clone() {
                let lhs = ctx.galois(&b, &ca).unwrap();
                let ba = a.mul(&b, &fq).divrem(&ctx.f, &fq).unwrap().1;
                let rhs = ctx.carlitz_apply(&ba, &ctx.zeta());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn delta_vanishes_on_conjugates() {
        let (_fq, ctx) = setup(3, &[0, -1, 1]);
        for i in 0..ctx.r {
            let c = ctx.zeta_conj[i].clone();
            let mut acc = ctx.zero();
            for coef in ctx.delta_a.iter().rev() {
                acc = ctx.mul(&acc, &c);
                acc = ctx.add(&acc, &ctx.from_poly_a(coef));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn split_prime_examples_q3_f_theta() {
        let (fq, ctx) = setup(3, &[0, 1]);
        // wp = theta + 1: z^2 + theta = z^2 - 1 mod (theta+1): two primes
        let wp = PolyA::from_ints(&fq, &[1, 1]);
        let primes = ctx.split_prime(&wp).unwrap();
        assert_eq!(primes.len(), 2);
        assert!(primes.iter().all(|p| p.ell == 1));
        // wp = theta - 1 = theta + 2: z^2 + 1 irreducible: one prime, ell 2
        let wp2 = PolyA::from_ints(&fq, &[2, 1]);
        let primes2 = ctx.split_prime(&wp2).unwrap();
        assert_eq!(primes2.len(), 1);
        assert_eq!(primes2[0].ell, 2);
        // ramified rejected
        assert!(matches!(
            ctx.split_prime(&PolyA::theta(&fq)),
            Err(Error::RamifiedPrime(_))
        ));
    }

    #[test]
    fn split_completely_when_one_mod_f() {
        // wp = 1 mod f splits completely with residue degree 1 over F_wp
        let (fq, ctx) = setup(3, &[0, 1]);
        let wp = PolyA::from_ints(&fq, &[1, 0, 1]); // theta^2 + 1 = 1 mod theta
        assert!(is_irreducible(&wp, &fq).unwrap());
        let primes = ctx.split_prime(&wp).unwrap();
        assert_eq!(primes.len(), ctx.r);
        for p in &primes {
            assert_eq!(p.res_deg_over_fp(), 1);
            assert_eq!(p.ell, wp.degree().unwrap());
        }
    }

    #[test]
    fn prime_counting_law() {
        // (#primes over wp) * (residue degree over F_wp) = r
        for (q, f) in [(3u32, vec![0i64, 1]), (3, vec![0, -1, 1]), (2, vec![0, 0, 1])] {
            let (fq, ctx) = setup(q, &f);
            for wp in monic_irreducibles(&fq, 3).unwrap() {
                if Poly::gcd(&wp, &ctx.f, &fq).unwrap().degree() != Some(0) {
                    continue;
                }
                let primes = ctx.split_prime(&wp).unwrap();
                let fdeg = primes[0].res_deg_over_fp();
                assert_eq!(primes.len() * fdeg, ctx.r);
            }
        }
    }

    #[test]
    fn valuation_examples() {
        let (fq, ctx) = setup(3, &[0, 1]);
        let wp = PolyA::from_ints(&fq, &[1, 1]);
        let primes = ctx.split_prime(&wp).unwrap();
        // v_p(wp) = 1 at each unramified p over wp
        for p in &primes {
            let v = ctx.valuation(&ctx.from_poly_a(&wp), p).unwrap();
            assert_eq!(v, 1);
        }
        // (zeta+1)(zeta-1) = zeta^2 - 1 = -(1+theta): valuations split
        let zp1 = ctx.add(&ctx.zeta(), &ctx.one());
        let vals: Vec<i64> = primes
            .iter()
            .map(|p| ctx.valuation(&zp1, p).unwrap())
            .collect();
        let mut sorted = vals.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1]);
        // additivity on a product
        let zm1 = ctx.sub(&ctx.zeta(), &ctx.one());
        let prod = ctx.mul(&zp1, &zm1);
        for p in &primes {
            let vp = ctx.valuation(&prod, p).unwrap();
            assert_eq!(
                vp,
                ctx.valuation(&zp1, p).unwrap() + ctx.valuation(&zm1, p).unwrap()
            );
        }
    }

    #[test]
    fn valuation_with_denominator() {
        let (fq, ctx) = setup(3, &[0, 1]);
        let wp = PolyA::from_ints(&fq, &[1, 1]);
        let primes = ctx.split_prime(&wp).unwrap();
        let x = ctx
            .div(&ctx.one(), &ctx.from_poly_a(&wp))
            .unwrap();
        for p in &primes {
            assert_eq!(ctx.valuation(&x, p).unwrap(), -1);
        }
    }

    #[test]
    fn qth_root_examples() {
        let (fq, ctx) = setup(3, &[0, 1]);
        // qth_root(zeta^q) = zeta
        let zq = ctx.pow(&ctx.zeta(), 3);
        assert_eq!(ctx.qth_root(&zq).unwrap(), ctx.zeta());
        // qth_root(theta^q + zeta^q) = theta + zeta
        let tq = ctx.from_poly_a(&PolyA::monomial(3, &fq));
        let x = ctx.add(&tq, &zq);
        let y = ctx.qth_root(&x).unwrap();
        let expect = ctx.add(&ctx.from_poly_a(&PolyA::theta(&fq)), &ctx.zeta());
        assert_eq!(y, expect);
        // non-root errors
        assert!(matches!(
            ctx.qth_root(&ctx.zeta()),
            Err(Error::NotAQthPower)
        ));
    }

    #[test]
    fn norm_multiplicativity() {
        let (fq, ctx) = setup(3, &[0, -1, 1]);
        let a = ctx.add(&ctx.zeta(), &ctx.from_poly_a(&PolyA::theta(&fq)));
        let b = ctx.add(&ctx.pow(&ctx.zeta(), 2), &ctx.one());
        let na = ctx.norm(&a);
        let nb = ctx.norm(&b);
        let nab = ctx.norm(&ctx.mul(&a, &b));
        assert_eq!(nab, ctx.kk.mul(&na, &nb));
    }

    #[test]
    fn norm_of_prime_matches_norm_degree() {
        // N(p)A has degree ell (norm compatibility)
        let (fq, ctx) = setup(3, &[0, 1]);
        for wp in monic_irreducibles(&fq, 3).unwrap() {
            if Poly::gcd(&wp, &ctx.f, &fq).unwrap().degree() != Some(0) {
                continue;
            }
            for p in ctx.split_prime(&wp).unwrap() {
                assert_eq!(p.norm(&fq).degree().unwrap(), p.norm_degree());
            }
        }
    }
}
