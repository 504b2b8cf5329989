//! The finite-field tower `F_q ⊂ F_{q²}` with a pinned order-`n` root of
//! unity and the discrete-log trivialization of `F_{q²}^× / F_{q²}^{×n}`.
//!
//! `F_{q²}` is represented as `F_q[t]/(t² - δ)` with `δ` the smallest
//! quadratic non-residue mod `q`, and the generator `g` is the
//! lexicographically smallest one, so every derived quantity (in particular
//! `ζ̄ = g^{(q²-1)/n}` and all power classes) is reproducible across runs.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::gcd;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::primes::{factorize, is_prime};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FfError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("incompatible order n={n} for q={q}: need n ≥ 5, gcd(n,6)=1 and n | q+1")]
    IncompatibleOrder { q: u64, n: u64 },
    #[error("no trivialization for (q={q}, n={n}): gcd(n, (q²-1)/n) ≠ 1")]
    TrivializationUnavailable { q: u64, n: u64 },
    #[error("zero input where a unit was required")]
    ZeroInput,
    #[error("exponent {0} is not coprime to n")]
    NotCoprime(u64),
}

/// A residue in `[0, q)`; the modulus `q` is carried by the context.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqElem(pub(crate) BigUint);

impl FqElem {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> u64 {
        self.0.to_u64().expect("residue exceeds u64 range")
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `a + b·t` with `t² = δ`; zero iff `a = b = 0`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fq2Elem {
    pub a: FqElem,
    pub b: FqElem,
}

impl Fq2Elem {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Whether the element lies in the prime field `F_q`.
    pub fn is_base(&self) -> bool {
        self.b.is_zero()
    }
}

impl fmt::Debug for Fq2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}t)", self.a.0, self.b.0)
    }
}

impl fmt::Display for Fq2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*t", self.a.0, self.b.0)
    }
}

/// A residue mod `n` representing the class `ζ̄^exponent · F_{q²}^{×n}`.
/// Addition of exponents corresponds to multiplication of classes.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PowerClass(pub u64);

impl PowerClass {
    pub fn exponent(&self) -> u64 {
        self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for PowerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The tower `F_q ⊂ F_{q²} = F_q(ζ̄)` with a fixed generator and a fixed
/// element `ζ̄` of multiplicative order exactly `n`.
///
/// Invariants established by [`LocalContext::build`]: `n | q+1`,
/// `gcd(n, (q²-1)/n) = 1` (so the trivialization exists), `ζ̄^q = ζ̄^{-1}`
/// (Frobenius acts on the root group by inversion), and `gcd(n, q-1) = 1`
/// (so `F_q^× ⊂ F_{q²}^{×n}` and unique n-th roots exist in `F_q`).
#[derive(Clone)]
pub struct LocalContext {
    q: u64,
    n: u64,
    delta: BigUint,
    big_q: BigUint,
    group_order: BigUint,
    /// `(q² - 1) / n`.
    cofactor: BigUint,
    /// `n^{-1} mod (q - 1)`.
    root_exponent: BigUint,
    g: Fq2Elem,
    zeta: Fq2Elem,
    /// `ζ̄^k` for `k = 0..n` (small `n`; cached for the product kernels).
    zeta_powers: Vec<Fq2Elem>,
    n_factors: Vec<(u64, u32)>,
}

impl fmt::Debug for LocalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalContext")
            .field("q", &self.q)
            .field("n", &self.n)
            .field("delta", &self.delta)
            .field("g", &self.g)
            .field("zeta", &self.zeta)
            .finish()
    }
}

impl LocalContext {
    /// Builds the canonical context for `(q, n)`.
    pub fn build(q: u64, n: u64) -> Result<Self, FfError> {
        if q < 3 || q % 2 == 0 || !is_prime(q) {
            return Err(FfError::NotPrime(q));
        }
        // n ≤ 10⁵ is the supported envelope for the discrete-log kernel.
        if !(5..=100_000).contains(&n) || gcd(n, 6) != 1 || (q + 1) % n != 0 {
            return Err(FfError::IncompatibleOrder { q, n });
        }
        let q2m1 = (q as u128) * (q as u128) - 1;
        if gcd(n as u128, q2m1 / n as u128) != 1 {
            return Err(FfError::TrivializationUnavailable { q, n });
        }

        let big_q = BigUint::from(q);
        let delta = smallest_non_residue(q);
        let group_order = BigUint::from(q2m1);
        let cofactor = &group_order / n;
        let root_exponent = mod_inverse(n % (q - 1), q - 1);

        let mut ctx = LocalContext {
            q,
            n,
            delta: BigUint::from(delta),
            big_q,
            group_order,
            cofactor,
            root_exponent: BigUint::from(root_exponent),
            g: Fq2Elem {
                a: FqElem(BigUint::zero()),
                b: FqElem(BigUint::zero()),
            },
            zeta: Fq2Elem {
                a: FqElem(BigUint::zero()),
                b: FqElem(BigUint::zero()),
            },
            zeta_powers: Vec::new(),
            n_factors: factorize(n),
        };
        ctx.g = ctx.smallest_generator();
        let zeta = ctx.pow2(&ctx.g, &ctx.cofactor.clone());
        ctx.set_zeta(zeta);
        Ok(ctx)
    }

    /// A variant of this context whose root of unity is `ζ̄^k`
    /// (requires `gcd(k, n) = 1` to preserve the order).
    pub fn with_zeta_power(&self, k: u64) -> Result<Self, FfError> {
        if gcd(k, self.n) != 1 {
            return Err(FfError::NotCoprime(k));
        }
        let mut ctx = self.clone();
        let z = self.zeta_pow(k as i64);
        ctx.set_zeta(z);
        Ok(ctx)
    }

    fn set_zeta(&mut self, zeta: Fq2Elem) {
        let mut pows = Vec::with_capacity(self.n as usize + 1);
        let mut acc = self.one2();
        for _ in 0..=self.n {
            pows.push(acc.clone());
            acc = self.mul2(&acc, &zeta);
        }
        self.zeta = zeta;
        self.zeta_powers = pows;
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> &BigUint {
        &self.delta
    }

    pub fn generator(&self) -> &Fq2Elem {
        &self.g
    }

    pub fn zeta(&self) -> &Fq2Elem {
        &self.zeta
    }

    /// `ζ̄^k` for any signed `k`.
    pub fn zeta_pow(&self, k: i64) -> Fq2Elem {
        let k = k.rem_euclid(self.n as i64) as usize;
        self.zeta_powers[k].clone()
    }

    // ---- F_q arithmetic ----

    pub fn fq(&self, v: u64) -> FqElem {
        FqElem(BigUint::from(v) % &self.big_q)
    }

    pub fn fq_from_biguint(&self, v: &BigUint) -> FqElem {
        FqElem(v % &self.big_q)
    }

    pub fn add(&self, x: &FqElem, y: &FqElem) -> FqElem {
        let mut s = &x.0 + &y.0;
        if s >= self.big_q {
            s -= &self.big_q;
        }
        FqElem(s)
    }

    pub fn sub(&self, x: &FqElem, y: &FqElem) -> FqElem {
        if x.0 >= y.0 {
            FqElem(&x.0 - &y.0)
        } else {
            FqElem(&self.big_q - &y.0 + &x.0)
        }
    }

    pub fn neg(&self, x: &FqElem) -> FqElem {
        if x.0.is_zero() {
            x.clone()
        } else {
            FqElem(&self.big_q - &x.0)
        }
    }

    pub fn mul(&self, x: &FqElem, y: &FqElem) -> FqElem {
        FqElem(&x.0 * &y.0 % &self.big_q)
    }

    pub fn inv(&self, x: &FqElem) -> Result<FqElem, FfError> {
        if x.is_zero() {
            return Err(FfError::ZeroInput);
        }
        let e = &self.big_q - 2u32;
        Ok(FqElem(x.0.modpow(&e, &self.big_q)))
    }

    pub fn pow(&self, x: &FqElem, e: &BigUint) -> FqElem {
        FqElem(x.0.modpow(e, &self.big_q))
    }

    // ---- F_{q²} arithmetic ----

    pub fn zero2(&self) -> Fq2Elem {
        Fq2Elem {
            a: FqElem(BigUint::zero()),
            b: FqElem(BigUint::zero()),
        }
    }

    pub fn one2(&self) -> Fq2Elem {
        Fq2Elem {
            a: FqElem(BigUint::one()),
            b: FqElem(BigUint::zero()),
        }
    }

    pub fn lift(&self, x: &FqElem) -> Fq2Elem {
        Fq2Elem {
            a: x.clone(),
            b: FqElem(BigUint::zero()),
        }
    }

    pub fn fq2(&self, a: u64, b: u64) -> Fq2Elem {
        Fq2Elem {
            a: self.fq(a),
            b: self.fq(b),
        }
    }

    pub fn add2(&self, x: &Fq2Elem, y: &Fq2Elem) -> Fq2Elem {
        Fq2Elem {
            a: self.add(&x.a, &y.a),
            b: self.add(&x.b, &y.b),
        }
    }

    pub fn sub2(&self, x: &Fq2Elem, y: &Fq2Elem) -> Fq2Elem {
        Fq2Elem {
            a: self.sub(&x.a, &y.a),
            b: self.sub(&x.b, &y.b),
        }
    }

    /// `1 - x`.
    pub fn one_minus2(&self, x: &Fq2Elem) -> Fq2Elem {
        self.sub2(&self.one2(), x)
    }

    pub fn mul2(&self, x: &Fq2Elem, y: &Fq2Elem) -> Fq2Elem {
        // (a + bt)(c + dt) = (ac + bd·δ) + (ad + bc)t
        let ac = &x.a.0 * &y.a.0;
        let bd = &x.b.0 * &y.b.0;
        let ad = &x.a.0 * &y.b.0;
        let bc = &x.b.0 * &y.a.0;
        Fq2Elem {
            a: FqElem((ac + bd * &self.delta) % &self.big_q),
            b: FqElem((ad + bc) % &self.big_q),
        }
    }

    pub fn inv2(&self, x: &Fq2Elem) -> Result<Fq2Elem, FfError> {
        if x.is_zero() {
            return Err(FfError::ZeroInput);
        }
        // 1/(a + bt) = (a - bt)/(a² - δb²); the norm is in F_q^×.
        let norm = self.sub(&self.mul(&x.a, &x.a), &self.mul(&FqElem(&x.b.0 * &self.delta % &self.big_q), &x.b));
        let ninv = self.inv(&norm)?;
        Ok(Fq2Elem {
            a: self.mul(&x.a, &ninv),
            b: self.neg(&self.mul(&x.b, &ninv)),
        })
    }

    pub fn pow2(&self, x: &Fq2Elem, e: &BigUint) -> Fq2Elem {
        let mut base = x.clone();
        let mut acc = self.one2();
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = self.mul2(&acc, &base);
            }
            base = self.mul2(&base, &base);
        }
        acc
    }

    pub fn pow2_u64(&self, x: &Fq2Elem, e: u64) -> Fq2Elem {
        self.pow2(x, &BigUint::from(e))
    }

    /// `x^e` with a signed exponent, reduced mod the group order `q² - 1`
    /// (requires `x ≠ 0` when `e < 0`).
    pub fn pow2_signed(&self, x: &Fq2Elem, e: i64) -> Result<Fq2Elem, FfError> {
        if e >= 0 {
            return Ok(self.pow2_u64(x, e as u64));
        }
        if x.is_zero() {
            return Err(FfError::ZeroInput);
        }
        let inv = self.inv2(x)?;
        Ok(self.pow2_u64(&inv, e.unsigned_abs()))
    }

    // ---- named operations ----

    /// The unique `x ∈ F_q^×` with `x^n = a`; `x = a^{n^{-1} mod (q-1)}`.
    pub fn unique_nth_root(&self, a: &FqElem) -> Result<FqElem, FfError> {
        if a.is_zero() {
            return Err(FfError::ZeroInput);
        }
        Ok(self.pow(a, &self.root_exponent.clone()))
    }

    /// `u^q`, the Frobenius of the tower; fixes exactly `F_q` and is an
    /// involution. In coordinates it is `a + bt ↦ a - bt` because
    /// `t^q = δ^{(q-1)/2} t = -t`.
    pub fn frobenius(&self, u: &Fq2Elem) -> Fq2Elem {
        Fq2Elem {
            a: u.a.clone(),
            b: self.neg(&u.b),
        }
    }

    /// The discrete-log trivialization: the unique `e ∈ Z/nZ` with
    /// `u ≡ ζ̄^e` modulo `F_{q²}^{×n}`. Computed as the Pohlig-Hellman
    /// logarithm of `u^{(q²-1)/n}` to base `ζ̄^{(q²-1)/n}` in the order-`n`
    /// cyclic subgroup.
    pub fn log_zeta(&self, u: &Fq2Elem) -> Result<PowerClass, FfError> {
        if u.is_zero() {
            return Err(FfError::ZeroInput);
        }
        let v = self.pow2(u, &self.cofactor.clone());
        let w = self.pow2(&self.zeta, &self.cofactor.clone());
        let mut residues = Vec::with_capacity(self.n_factors.len());
        for &(p, e) in &self.n_factors {
            let pe = p.pow(e);
            let side = self.n / pe;
            let w_i = self.pow2_u64(&w, side);
            let v_i = self.pow2_u64(&v, side);
            let x = self.prime_power_log(&w_i, &v_i, p, e)?;
            residues.push((x, pe));
        }
        Ok(PowerClass(crt(&residues)))
    }

    /// Pohlig-Hellman digit lifting inside the subgroup of order `p^e`.
    fn prime_power_log(&self, w: &Fq2Elem, v: &Fq2Elem, p: u64, e: u32) -> Result<u64, FfError> {
        let pe = p.pow(e);
        let gamma = self.pow2_u64(w, pe / p); // order p
        let w_inv = self.inv2(w)?;
        let mut x = 0u64;
        for j in 0..e {
            let shift = self.pow2_u64(&w_inv, x);
            let target = self.pow2_u64(&self.mul2(v, &shift), pe / p.pow(j + 1));
            let digit = self.bsgs(&gamma, &target, p)?;
            x += digit * p.pow(j);
        }
        Ok(x)
    }

    /// Baby-step giant-step in the cyclic group generated by `gamma` of
    /// prime order `p`.
    fn bsgs(&self, gamma: &Fq2Elem, target: &Fq2Elem, p: u64) -> Result<u64, FfError> {
        let m = (p as f64).sqrt().ceil() as u64;
        let mut table = HashMap::with_capacity(m as usize);
        let mut cur = self.one2();
        for j in 0..m {
            table.entry(cur.clone()).or_insert(j);
            cur = self.mul2(&cur, gamma);
        }
        // giant step factor: gamma^{-m}
        let giant = self.inv2(&self.pow2_u64(gamma, m))?;
        let mut y = target.clone();
        for i in 0..=m {
            if let Some(&j) = table.get(&y) {
                return Ok((i * m + j) % p);
            }
            y = self.mul2(&y, &giant);
        }
        // Unreachable for inputs in the subgroup; treated as a contract
        // violation rather than a panic.
        Err(FfError::ZeroInput)
    }

    /// `true` iff `u ∈ F_{q²}^{×n}`, equivalently `u^{(q²-1)/n} = 1`.
    pub fn is_nth_power(&self, u: &Fq2Elem) -> Result<bool, FfError> {
        if u.is_zero() {
            return Err(FfError::ZeroInput);
        }
        Ok(self.pow2(u, &self.cofactor.clone()) == self.one2())
    }

    pub fn class_add(&self, x: PowerClass, y: PowerClass) -> PowerClass {
        PowerClass((x.0 + y.0) % self.n)
    }

    /// `m · x` for a signed multiplicity.
    pub fn class_scale(&self, x: PowerClass, m: i64) -> PowerClass {
        let n = self.n as i128;
        let v = (x.0 as i128 * m as i128).rem_euclid(n);
        PowerClass(v as u64)
    }

    fn smallest_generator(&self) -> Fq2Elem {
        let order_factors: Vec<BigUint> = {
            let q2m1 = (self.q as u128) * (self.q as u128) - 1;
            factorize_u128(q2m1)
                .into_iter()
                .map(|(p, _)| &self.group_order / BigUint::from(p))
                .collect()
        };
        for a in 0..self.q {
            for b in 0..self.q {
                if a == 0 && b == 0 {
                    continue;
                }
                let cand = self.fq2(a, b);
                let one = self.one2();
                if order_factors
                    .iter()
                    .all(|e| self.pow2(&cand, e) != one)
                {
                    return cand;
                }
            }
        }
        unreachable!("F_{{q²}}^× is cyclic, a generator exists");
    }
}

fn smallest_non_residue(q: u64) -> u64 {
    let bq = BigUint::from(q);
    let e = BigUint::from((q - 1) / 2);
    for d in 2..q {
        if BigUint::from(d).modpow(&e, &bq) != BigUint::one() {
            return d;
        }
    }
    unreachable!("odd prime fields have non-residues");
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quo = old_r / r;
        (old_r, r) = (r, old_r - quo * r);
        (old_s, s) = (s, old_s - quo * s);
    }
    assert_eq!(old_r, 1, "inverse requires coprime inputs");
    old_s.rem_euclid(m as i128) as u64
}

fn factorize_u128(mut m: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x = 0i128;
    let mut modulus = 1i128;
    for &(r, m) in residues {
        let (r, m) = (r as i128, m as i128);
        // Solve x ≡ r (mod m) together with x ≡ x (mod modulus).
        let (mut old_r, mut rr) = (modulus, m);
        let (mut old_s, mut s) = (1i128, 0i128);
        while rr != 0 {
            let quo = old_r / rr;
            (old_r, rr) = (rr, old_r - quo * rr);
            (old_s, s) = (s, old_s - quo * s);
        }
        debug_assert_eq!(old_r, 1);
        let diff = (r - x).rem_euclid(m);
        let t = (old_s.rem_euclid(m) * diff).rem_euclid(m);
        x += modulus * t;
        modulus *= m;
        x = x.rem_euclid(modulus);
    }
    x as u64
}
