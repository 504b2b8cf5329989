//! Exact arithmetic in `Q(ζ_n)`: rational-coefficient vectors modulo the
//! n-th cyclotomic polynomial, complex embeddings, Galois conjugation, and
//! reduction of cyclotomic elements into a [`LocalContext`].

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::{gcd, Integer};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ff::{Fq2Elem, LocalContext};
use crate::nahm::{BigComplex, BigReal};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycError {
    #[error("invalid order n={0}")]
    InvalidOrder(u64),
    #[error("division by zero in Q(ζ_n)")]
    DivisionByZero,
    #[error("coefficient denominator divisible by q={0}")]
    BadDenominator(u64),
    #[error("order mismatch: element has n={elem}, context has n={ctx}")]
    OrderMismatch { elem: u64, ctx: u64 },
    #[error("exponent {k} is not coprime to n={n}")]
    NotCoprime { k: u64, n: u64 },
}

/// Euler's totient (small arguments).
pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            phi -= phi / p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

/// Coefficients (ascending, monic) of the n-th cyclotomic polynomial,
/// computed by iterated exact division of `x^n - 1` by `Φ_d` for `d | n`,
/// `d < n`.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic_poly requires n ≥ 1");
    if n == 1 {
        return vec![BigInt::from(-1), BigInt::from(1)];
    }
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = int_poly_div_exact(&num, &phi_d);
        }
    }
    num
}

/// Exact division of integer polynomials with a monic divisor.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let nd = rem.len() - 1;
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone();
        quot[k] = c.clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            let s = &c * &den[j];
            rem[k + j] -= s;
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()), "division was not exact");
    quot
}

/// A complex embedding `ζ ↦ e^{2πik/n}` with `gcd(k, n) = 1`.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct EmbeddingIndex(pub u64);

/// An element of `Q(ζ_n)` in canonical reduced form: a rational coefficient
/// vector of length `φ(n)` representing `Σ c_i ζ^i` modulo `Φ_n`.
/// Equality is coefficient equality.
#[derive(Clone, PartialEq, Eq)]
pub struct CycPoly {
    n: u64,
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycPoly(n={}, {})", self.n, self)
    }
}

impl fmt::Display for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            if i == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "z^{i}")?;
            } else {
                write!(f, "({c})*z^{i}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl CycPoly {
    /// Builds from raw coefficients of any length, reducing modulo `Φ_n`.
    pub fn new(n: u64, raw: Vec<BigRational>) -> Self {
        let phi = euler_phi(n) as usize;
        let modulus: Vec<BigRational> = cyclotomic_poly(n)
            .into_iter()
            .map(BigRational::from)
            .collect();
        let mut rem = raw;
        while rem.len() > phi {
            let top = rem.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = rem.len() - (modulus.len() - 1);
            for j in 0..modulus.len() - 1 {
                let s = &top * &modulus[j];
                rem[k + j] -= s;
            }
        }
        rem.resize(phi, BigRational::zero());
        CycPoly { n, coeffs: rem }
    }

    pub fn zero(n: u64) -> Self {
        CycPoly::new(n, Vec::new())
    }

    pub fn one(n: u64) -> Self {
        CycPoly::from_rational(n, BigRational::one())
    }

    pub fn from_rational(n: u64, c: BigRational) -> Self {
        CycPoly::new(n, vec![c])
    }

    pub fn from_integer(n: u64, c: i64) -> Self {
        CycPoly::from_rational(n, BigRational::from(BigInt::from(c)))
    }

    /// `ζ^k` (any integer `k`, reduced mod `n`).
    pub fn root_power(n: u64, k: i64) -> Self {
        let k = k.rem_euclid(n as i64) as usize;
        let mut raw = vec![BigRational::zero(); k + 1];
        raw[k] = BigRational::one();
        CycPoly::new(n, raw)
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational constant this element equals, if it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "mixed cyclotomic orders");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycPoly { n: self.n, coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "mixed cyclotomic orders");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycPoly { n: self.n, coeffs }
    }

    pub fn neg(&self) -> Self {
        CycPoly {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "mixed cyclotomic orders");
        let mut raw = vec![BigRational::zero(); 2 * self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        CycPoly::new(self.n, raw)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CycPoly {
            n: self.n,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Φ_n` (irreducible over `Q`, so every nonzero element is a unit).
    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        let modulus: Vec<BigRational> = cyclotomic_poly(self.n)
            .into_iter()
            .map(BigRational::from)
            .collect();
        // Extended gcd of (self, Φ_n) over Q[x].
        let mut r0 = trim(self.coeffs.clone());
        let mut r1 = modulus;
        let mut s0 = vec![BigRational::one()];
        let mut s1: Vec<BigRational> = vec![];
        while !is_zero_poly(&r1) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd (a nonzero constant), s0·self ≡ r0 (mod Φ_n).
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let coeffs = s0.iter().map(|v| v * &c).collect();
        Ok(CycPoly::new(self.n, coeffs))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, CycError> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = CycPoly::one(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// The Galois conjugate `ζ ↦ ζ^k`, `gcd(k, n) = 1`.
    pub fn galois_conjugate(&self, k: u64) -> Result<Self, CycError> {
        if gcd(k, self.n) != 1 {
            return Err(CycError::NotCoprime { k, n: self.n });
        }
        let mut raw = vec![BigRational::zero(); self.n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = ((i as u64 * k) % self.n) as usize;
            raw[idx] += c;
        }
        Ok(CycPoly::new(self.n, raw))
    }

    /// Whether the element is fixed by `ζ ↦ ζ^{-1}` (lies in the real
    /// subfield).
    pub fn is_real_subfield(&self) -> bool {
        match self.galois_conjugate(self.n - 1) {
            Ok(conj) => conj == *self,
            Err(_) => false,
        }
    }

    /// Evaluates the coefficient polynomial at `e^{2πik/n}`.
    pub fn complex_embed(&self, e: EmbeddingIndex, precision: u32) -> BigComplex {
        let wp = precision as usize + 32;
        let k = e.0 % self.n;
        let theta = BigReal::pi(wp)
            .mul_u64(2)
            .mul_u64(k)
            .div_u64(self.n);
        let z = BigComplex::new(theta.cos(), theta.sin());
        let mut acc = BigComplex::zero(wp);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&z);
            if !c.is_zero() {
                acc = acc.add(&BigComplex::from_real(BigReal::from_ratio(c, wp)));
            }
        }
        acc
    }

    /// Ring homomorphism `ζ ↦ ζ̄` into the context's `F_{q²}`.
    ///
    /// Elements of the real subfield land in `F_q` (the result is
    /// Frobenius-fixed) because `ζ̄^q = ζ̄^{-1}`.
    pub fn reduce_to_local(&self, ctx: &LocalContext) -> Result<Fq2Elem, CycError> {
        if self.n != ctx.n() {
            return Err(CycError::OrderMismatch {
                elem: self.n,
                ctx: ctx.n(),
            });
        }
        let q = BigInt::from(ctx.q());
        let mut acc = ctx.zero2();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.denom().mod_floor(&q).is_zero() {
                return Err(CycError::BadDenominator(ctx.q()));
            }
            let num = bigint_mod_q(c.numer(), ctx);
            let den = bigint_mod_q(c.denom(), ctx);
            let scalar = ctx.mul(&num, &ctx.inv(&den).expect("nonzero denominator"));
            let term = ctx.mul2(&ctx.lift(&scalar), &ctx.zeta_pow(i as i64));
            acc = ctx.add2(&acc, &term);
        }
        Ok(acc)
    }
}

fn bigint_mod_q(v: &BigInt, ctx: &LocalContext) -> crate::ff::FqElem {
    let q = BigInt::from(ctx.q());
    let r = v.mod_floor(&q);
    let (sign, mag) = r.into_parts();
    debug_assert_ne!(sign, Sign::Minus);
    ctx.fq_from_biguint(&mag)
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.len() > 1 && v.last().map(|c| c.is_zero()) == Some(true) {
        v.pop();
    }
    v
}

fn is_zero_poly(v: &[BigRational]) -> bool {
    v.iter().all(|c| c.is_zero())
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if is_zero_poly(a) || is_zero_poly(b) {
        return vec![BigRational::zero()];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); len];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let den = trim(den.to_vec());
    let mut rem = trim(num.to_vec());
    let dd = den.len() - 1;
    if rem.len() - 1 < dd || is_zero_poly(&rem) {
        return (vec![BigRational::zero()], rem);
    }
    let lead = den[dd].clone();
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for k in (0..rem.len() - dd).rev() {
        let c = &rem[k + dd] / &lead;
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for j in 0..=dd {
            let s = &c * &den[j];
            rem[k + j] -= s;
        }
    }
    rem.truncate(dd.max(1));
    (trim(quot), trim(rem))
}

/// Computes `D_ζ(1)² = (∏_{k=1}^{n-1}(1-ζ^k)^k)²` exactly in `Z[ζ]` and
/// reports whether it equals the rational constant `(-1)^{n(n-1)/2}·n^n`.
///
/// The product is accumulated in `Z[x]/(x^n - 1)`, where multiplying by
/// `(1 - x^k)` is a cyclic shift-and-subtract, and reduced modulo `Φ_n` at
/// the end.
pub fn d1_identity_check(n: u64) -> Result<(CycPoly, bool), CycError> {
    if n < 5 || gcd(n, 6) != 1 {
        return Err(CycError::InvalidOrder(n));
    }
    let len = n as usize;
    let mut d = vec![BigInt::zero(); len];
    d[0] = BigInt::one();
    for k in 1..len {
        for _ in 0..k {
            // d ← d · (1 - x^k)  in Z[x]/(x^n - 1)
            let mut next = vec![BigInt::zero(); len];
            for (i, c) in d.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                next[i] += c;
                next[(i + k) % len] -= c;
            }
            d = next;
        }
    }
    // Square by cyclic convolution.
    let mut sq = vec![BigInt::zero(); len];
    for i in 0..len {
        if d[i].is_zero() {
            continue;
        }
        for j in 0..len {
            if d[j].is_zero() {
                continue;
            }
            let prod = &d[i] * &d[j];
            sq[(i + j) % len] += prod;
        }
    }
    let value = CycPoly::new(n, sq.into_iter().map(BigRational::from).collect());
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let expected = BigInt::from(sign) * BigInt::from(n).pow(n as u32);
    let holds = value.as_rational() == Some(BigRational::from(expected));
    Ok((value, holds))
}

/// `n^n` with sign `(-1)^{n(n-1)/2}` as a big integer (the reference
/// constant of [`d1_identity_check`]).
pub fn d1_expected_constant(n: u64) -> BigInt {
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
    BigInt::from(sign) * BigInt::from(n).pow(n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::LocalContext;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![BigInt::from(-1), BigInt::from(1)]);
        let phi5: Vec<i64> = vec![1, 1, 1, 1, 1];
        assert_eq!(
            cyclotomic_poly(5),
            phi5.into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        // Φ₆ = x² - x + 1, via dividing x⁶-1 by Φ₁Φ₂Φ₃.
        let phi6: Vec<i64> = vec![1, -1, 1];
        assert_eq!(
            cyclotomic_poly(6),
            phi6.into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        // Product over divisors reconstructs x^n - 1.
        for n in [10u64, 12, 15] {
            let mut prod = vec![BigInt::one()];
            for d in 1..=n {
                if n % d == 0 {
                    let f = cyclotomic_poly(d);
                    let mut out = vec![BigInt::zero(); prod.len() + f.len() - 1];
                    for (i, a) in prod.iter().enumerate() {
                        for (j, b) in f.iter().enumerate() {
                            out[i + j] += a * b;
                        }
                    }
                    prod = out;
                }
            }
            let mut expect = vec![BigInt::zero(); n as usize + 1];
            expect[0] = BigInt::from(-1);
            expect[n as usize] = BigInt::one();
            assert_eq!(prod, expect);
        }
    }

    #[test]
    fn ring_identities() {
        let n = 5;
        let z = CycPoly::root_power(n, 1);
        let one = CycPoly::one(n);
        assert_eq!(z.mul(&one), z);
        // ζ·ζ⁴ = 1.
        assert_eq!(z.mul(&CycPoly::root_power(n, 4)), one);
        // (1-ζ)(1-ζ²)(1-ζ³)(1-ζ⁴) = Φ₅(1) = 5.
        let mut prod = CycPoly::one(n);
        for k in 1..5 {
            prod = prod.mul(&one.sub(&CycPoly::root_power(n, k)));
        }
        assert_eq!(prod, CycPoly::from_integer(n, 5));
    }

    #[test]
    fn inverse_roundtrip() {
        let n = 7;
        let x = CycPoly::new(
            n,
            vec![rat(2, 3), rat(-1, 1), rat(0, 1), rat(5, 2), rat(1, 7)],
        );
        let inv = x.inv().unwrap();
        assert_eq!(x.mul(&inv), CycPoly::one(n));
        assert_eq!(CycPoly::zero(n).inv().unwrap_err(), CycError::DivisionByZero);
    }

    #[test]
    fn galois_composition() {
        let n = 35;
        let x = CycPoly::new(n, (0..10).map(|i| rat(i as i64 + 1, 3)).collect());
        let a = x.galois_conjugate(2).unwrap().galois_conjugate(3).unwrap();
        let b = x.galois_conjugate(6).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            x.galois_conjugate(7).unwrap_err(),
            CycError::NotCoprime { k: 7, n: 35 }
        );
        // ζ + ζ⁻¹ is fixed by every conjugation's inverse pairing.
        let s = CycPoly::root_power(n, 1).add(&CycPoly::root_power(n, -1));
        assert!(s.is_real_subfield());
    }

    #[test]
    fn d1_small_orders() {
        let (v5, ok5) = d1_identity_check(5).unwrap();
        assert!(ok5);
        assert_eq!(v5.as_rational(), Some(BigRational::from(BigInt::from(3125))));
        let (v7, ok7) = d1_identity_check(7).unwrap();
        assert!(ok7);
        assert_eq!(
            v7.as_rational(),
            Some(BigRational::from(BigInt::from(-823543i64)))
        );
        assert_eq!(d1_identity_check(9).unwrap_err(), CycError::InvalidOrder(9));
    }

    #[test]
    fn d1_prime_power() {
        let (v, ok) = d1_identity_check(25).unwrap();
        assert!(ok);
        assert_eq!(v.as_rational(), Some(BigRational::from(d1_expected_constant(25))));
    }

    #[test]
    fn embed_basics() {
        let n = 5;
        let p = 192u32;
        // ζ at k=1 is cos 72° + i sin 72°.
        let z = CycPoly::root_power(n, 1).complex_embed(EmbeddingIndex(1), p);
        let wp = p as usize + 32;
        let theta = BigReal::pi(wp).mul_u64(2).div_u64(5);
        assert!(z.re.sub(&theta.cos()).abs().exponent().unwrap_or(-9999) < -(p as i64 - 16));
        // ζ + ζ⁻¹ ↦ 2cos 72° ≈ 0.618034.
        let s = CycPoly::root_power(n, 1).add(&CycPoly::root_power(n, -1));
        let v = s.complex_embed(EmbeddingIndex(1), p);
        let golden = BigReal::from_u64(5, wp).sqrt().sub(&BigReal::one(wp)).div_u64(2);
        assert!(v.re.sub(&golden).abs().exponent().unwrap_or(-9999) < -(p as i64 - 16));
        assert!(v.im.abs().exponent().unwrap_or(-9999) < -(p as i64 - 16));
        // Constants embed to themselves at every k.
        let c = CycPoly::from_integer(n, 5);
        for k in [1u64, 2, 3, 4] {
            let v = c.complex_embed(EmbeddingIndex(k), p);
            assert!(v.re.sub(&BigReal::from_u64(5, wp)).abs().exponent().unwrap_or(-9999) < -(p as i64 - 16));
        }
    }

    #[test]
    fn reduce_into_f19() {
        let ctx = LocalContext::build(19, 5).unwrap();
        let z = CycPoly::root_power(5, 1);
        assert_eq!(z.reduce_to_local(&ctx).unwrap(), *ctx.zeta());
        // ζ + ζ⁻¹ lands in F_q and equals 14 for the canonical ζ̄.
        let s = CycPoly::root_power(5, 1).add(&CycPoly::root_power(5, -1));
        let v = s.reduce_to_local(&ctx).unwrap();
        assert!(v.is_base());
        assert_eq!(v, ctx.fq2(14, 0));
        assert_eq!(ctx.frobenius(&v), v);
        // 2 - ζ - ζ⁴ ↦ 2 - 14 = 7 mod 19.
        let x = CycPoly::from_integer(5, 2).sub(&s);
        assert_eq!(x.reduce_to_local(&ctx).unwrap(), ctx.fq2(7, 0));
        // Denominator divisible by q is rejected.
        let bad = CycPoly::from_rational(5, rat(1, 19));
        assert_eq!(bad.reduce_to_local(&ctx).unwrap_err(), CycError::BadDenominator(19));
        // Order mismatch is rejected.
        let wrong = CycPoly::one(7);
        assert!(matches!(
            wrong.reduce_to_local(&ctx),
            Err(CycError::OrderMismatch { .. })
        ));
    }

    #[test]
    fn reduction_is_ring_hom() {
        let ctx = LocalContext::build(19, 5).unwrap();
        let x = CycPoly::new(5, vec![rat(1, 2), rat(3, 1), rat(0, 1), rat(-2, 5)]);
        let y = CycPoly::new(5, vec![rat(2, 3), rat(0, 1), rat(7, 4)]);
        let lhs = x.mul(&y).reduce_to_local(&ctx).unwrap();
        let rhs = ctx.mul2(
            &x.reduce_to_local(&ctx).unwrap(),
            &y.reduce_to_local(&ctx).unwrap(),
        );
        assert_eq!(lhs, rhs);
    }
}
