//! Arbitrary-precision real and complex values with explicit precision in
//! bits, wrapped around `astro-float` with a thread-local constants cache.
//!
//! Precision propagates as the maximum of the operand precisions; the
//! transcendental kernels in this crate pass working precisions with guard
//! bits on top of the caller's request.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_cc<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// An arbitrary-precision real number carrying its precision in bits.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    prec: usize,
}

impl BigReal {
    pub fn zero(prec: usize) -> Self {
        BigReal {
            v: BigFloat::from_u64(0, prec),
            prec,
        }
    }

    pub fn one(prec: usize) -> Self {
        BigReal {
            v: BigFloat::from_u64(1, prec),
            prec,
        }
    }

    pub fn from_u64(v: u64, prec: usize) -> Self {
        BigReal {
            v: BigFloat::from_u64(v, prec),
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        BigReal {
            v: BigFloat::from_i64(v, prec),
            prec,
        }
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        BigReal {
            v: BigFloat::from_f64(v, prec),
            prec,
        }
    }

    pub fn from_bigint(v: &BigInt, prec: usize) -> Self {
        let p = prec.max(v.bits() as usize + 8);
        let mag = BigReal {
            v: biguint_to_bigfloat(v.magnitude(), p),
            prec,
        };
        if v.sign() == Sign::Minus {
            mag.neg()
        } else {
            mag
        }
    }

    pub fn from_ratio(v: &BigRational, prec: usize) -> Self {
        let num = BigReal::from_bigint(v.numer(), prec + 16);
        let den = BigReal::from_bigint(v.denom(), prec + 16);
        let mut r = num.div(&den);
        r.prec = prec;
        r
    }

    /// Parses a decimal literal (e.g. "0.25", "1.5e-3").
    pub fn parse_dec(s: &str, prec: usize) -> Option<Self> {
        let v = with_cc(|cc| BigFloat::parse(s, Radix::Dec, prec, RM, cc));
        if v.is_nan() {
            return None;
        }
        Some(BigReal { v, prec })
    }

    pub fn pi(prec: usize) -> Self {
        BigReal {
            v: with_cc(|cc| cc.pi(prec, RM)),
            prec,
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_nan(&self) -> bool {
        self.v.is_nan()
    }

    /// Binary exponent `e` with `|x| ∈ [2^{e-1}, 2^e)`; `None` for zero.
    /// NaN reads as `i64::MAX` so that "is this tiny" checks never pass.
    pub fn exponent(&self) -> Option<i64> {
        if self.v.is_nan() {
            Some(i64::MAX)
        } else if self.v.is_zero() {
            None
        } else {
            self.v.exponent().map(|e| e as i64)
        }
    }

    fn wp(&self, rhs: &Self) -> usize {
        self.prec.max(rhs.prec)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.wp(rhs);
        BigReal {
            v: self.v.add(&rhs.v, p, RM),
            prec: p,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.wp(rhs);
        BigReal {
            v: self.v.sub(&rhs.v, p, RM),
            prec: p,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.wp(rhs);
        BigReal {
            v: self.v.mul(&rhs.v, p, RM),
            prec: p,
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.wp(rhs);
        BigReal {
            v: self.v.div(&rhs.v, p, RM),
            prec: p,
        }
    }

    pub fn neg(&self) -> Self {
        BigReal {
            v: self.v.neg(),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        BigReal {
            v: self.v.abs(),
            prec: self.prec,
        }
    }

    pub fn recip(&self) -> Self {
        BigReal {
            v: self.v.reciprocal(self.prec, RM),
            prec: self.prec,
        }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        self.mul(&BigReal::from_u64(k, self.prec))
    }

    pub fn div_u64(&self, k: u64) -> Self {
        self.div(&BigReal::from_u64(k, self.prec))
    }

    pub fn sqrt(&self) -> Self {
        BigReal {
            v: self.v.sqrt(self.prec, RM),
            prec: self.prec,
        }
    }

    pub fn exp(&self) -> Self {
        BigReal {
            v: with_cc(|cc| self.v.exp(self.prec, RM, cc)),
            prec: self.prec,
        }
    }

    pub fn ln(&self) -> Self {
        BigReal {
            v: with_cc(|cc| self.v.ln(self.prec, RM, cc)),
            prec: self.prec,
        }
    }

    pub fn sin(&self) -> Self {
        BigReal {
            v: with_cc(|cc| self.v.sin(self.prec, RM, cc)),
            prec: self.prec,
        }
    }

    pub fn cos(&self) -> Self {
        BigReal {
            v: with_cc(|cc| self.v.cos(self.prec, RM, cc)),
            prec: self.prec,
        }
    }

    pub fn atan(&self) -> Self {
        BigReal {
            v: with_cc(|cc| self.v.atan(self.prec, RM, cc)),
            prec: self.prec,
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = BigReal::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `atan2(y, x)` with the usual quadrant conventions; `arg(0, 0) = 0`.
    pub fn atan2(y: &Self, x: &Self) -> Self {
        let prec = y.wp(x);
        let pi = BigReal::pi(prec);
        if x.is_zero() && y.is_zero() {
            return BigReal::zero(prec);
        }
        if x.is_zero() {
            let half = pi.div_u64(2);
            return if y.is_negative() { half.neg() } else { half };
        }
        let base = y.div(x).atan();
        if !x.is_negative() {
            base
        } else if y.is_negative() {
            base.sub(&pi)
        } else {
            base.add(&pi)
        }
    }

    pub fn cmp_val(&self, rhs: &Self) -> Ordering {
        match self.v.cmp(&rhs.v) {
            Some(s) if s < 0 => Ordering::Less,
            Some(s) if s > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    pub fn lt(&self, rhs: &Self) -> bool {
        self.cmp_val(rhs) == Ordering::Less
    }

    pub fn gt(&self, rhs: &Self) -> bool {
        self.cmp_val(rhs) == Ordering::Greater
    }

    /// `(mantissa, k)` with `self = mantissa · 2^k` exactly; `None` for zero.
    pub fn to_mantissa_exp(&self) -> Option<(BigInt, i64)> {
        if self.v.is_zero() {
            return Some((BigInt::zero(), 0));
        }
        let (words, n_bits, sign, exp, _) = self.v.as_raw_parts()?;
        let mut digits = Vec::with_capacity(words.len() * 2);
        for w in words {
            digits.push(*w as u32);
            digits.push((*w >> 32) as u32);
        }
        let mant = BigUint::new(digits);
        let total_bits = words.len() * 64;
        let shift = exp as i64 - total_bits as i64;
        let mut m = BigInt::from(mant);
        if sign == astro_float::Sign::Neg {
            m = -m;
        }
        let _ = n_bits;
        Some((m, shift))
    }

    /// Largest integer `≤ self`, exactly.
    pub fn floor_bigint(&self) -> BigInt {
        let (m, k) = match self.to_mantissa_exp() {
            Some(p) => p,
            None => return BigInt::zero(),
        };
        if k >= 0 {
            m << k as usize
        } else {
            // Arithmetic shift right floors toward -inf for BigInt.
            m >> (-k) as usize
        }
    }

    /// Decimal string rendering (scientific form).
    pub fn to_dec_string(&self) -> String {
        with_cc(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }

    /// Nearest `f64` (for diagnostics; lossy).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let (m, k) = match self.to_mantissa_exp() {
            Some(p) => p,
            None => return f64::NAN,
        };
        // Keep the top 64 bits of the mantissa.
        let bits = m.magnitude().bits() as i64;
        let (top, extra) = if bits > 64 {
            ((m.magnitude() >> (bits - 64) as usize).to_u64_digits()[0], bits - 64)
        } else if m.magnitude().is_zero() {
            (0, 0)
        } else {
            (m.magnitude().to_u64_digits()[0], 0)
        };
        let val = top as f64 * 2f64.powi((k + extra) as i32);
        if m.is_negative() {
            -val
        } else {
            val
        }
    }
}

fn biguint_to_bigfloat(v: &BigUint, prec: usize) -> BigFloat {
    let mut acc = BigFloat::from_u64(0, prec);
    // Horner over 32-bit limbs avoids parsing decimal strings.
    let base = BigFloat::from_u64(1u64 << 32, prec);
    for limb in v.to_u32_digits().iter().rev() {
        acc = acc.mul(&base, prec, RM);
        acc = acc.add(&BigFloat::from_u64(*limb as u64, prec), prec, RM);
    }
    acc
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dec_string())
    }
}

/// A complex value over [`BigReal`].
#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        BigComplex {
            re: BigReal::zero(prec),
            im: BigReal::zero(prec),
        }
    }

    pub fn one(prec: usize) -> Self {
        BigComplex {
            re: BigReal::one(prec),
            im: BigReal::zero(prec),
        }
    }

    pub fn from_real(re: BigReal) -> Self {
        let prec = re.prec();
        BigComplex {
            re,
            im: BigReal::zero(prec),
        }
    }

    /// `r·e^{2πi·turns}`.
    pub fn from_polar_turns(r: &BigReal, turns: &BigRational, prec: usize) -> Self {
        let two_pi = BigReal::pi(prec).mul_u64(2);
        let theta = two_pi.mul(&BigReal::from_ratio(turns, prec));
        BigComplex {
            re: r.mul(&theta.cos()),
            im: r.mul(&theta.sin()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn prec(&self) -> usize {
        self.re.prec().max(self.im.prec())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        BigComplex {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        BigComplex {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        BigComplex {
            re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        }
    }

    pub fn mul_real(&self, rhs: &BigReal) -> Self {
        BigComplex {
            re: self.re.mul(rhs),
            im: self.im.mul(rhs),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let d = rhs.norm_sq();
        let num = self.mul(&rhs.conj());
        BigComplex {
            re: num.re.div(&d),
            im: num.im.div(&d),
        }
    }

    pub fn neg(&self) -> Self {
        BigComplex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn norm_sq(&self) -> BigReal {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> BigReal {
        self.norm_sq().sqrt()
    }

    pub fn arg(&self) -> BigReal {
        BigReal::atan2(&self.im, &self.re)
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        BigComplex {
            re: r.mul(&self.im.cos()),
            im: r.mul(&self.im.sin()),
        }
    }

    /// Principal logarithm: `ln|z| + i·arg(z)`, `arg ∈ (-π, π]`.
    pub fn ln(&self) -> Self {
        BigComplex {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }

    pub fn powi(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn powi_signed(&self, e: i64) -> Self {
        if e >= 0 {
            self.powi(e as u64)
        } else {
            BigComplex::one(self.prec()).div(&self.powi(e.unsigned_abs()))
        }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re.to_dec_string(), self.im.to_dec_string())
    }
}
