//! Dilogarithm kernels: the principal-branch `Li₂` for complex arguments,
//! the Rogers dilogarithm on the extended real line, and the single-valued
//! Bloch-Wigner function.
//!
//! Region reduction for `Li₂(z)`:
//! - `|z| ≤ 1/2`: defining power series;
//! - `|z| ≥ 2`: inversion `Li₂(z) = -Li₂(1/z) - π²/6 - ln²(-z)/2`;
//! - `|1-z| ≤ 1/4`: reflection `Li₂(z) = π²/6 - ln z·ln(1-z) - Li₂(1-z)`;
//! - otherwise the Bernoulli log-series in `w = -ln(1-z)`, which converges
//!   geometrically with ratio `|w|/2π ≤ 0.55` on the remaining annulus.
//!
//! Values on the cut `(1, ∞)` follow the limit from the upper half-plane.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use super::mp::{BigComplex, BigReal};
use super::NahmError;

/// Guard bits added on top of a requested precision.
pub(crate) const GUARD: usize = 32;

/// Cache of the series prefactors `B_k / (k!·(k+1))` (exact rationals).
static BERNOULLI_PREFACTORS: Lazy<Mutex<Vec<BigRational>>> = Lazy::new(|| Mutex::new(Vec::new()));

/// `B_k / (k!·(k+1))` for `k = 0..count`, extending the cache on demand.
fn bernoulli_prefactors(count: usize) -> Vec<BigRational> {
    let mut cache = BERNOULLI_PREFACTORS.lock().expect("prefactor cache");
    if cache.len() < count {
        // Bernoulli numbers by the defining recurrence
        //   Σ_{j=0}^{m} C(m+1, j)·B_j = 0  (m ≥ 1),  B_0 = 1.
        let mut bern: Vec<BigRational> = Vec::with_capacity(count);
        bern.push(BigRational::one());
        for m in 1..count {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one(); // C(m+1, 0)
            for (j, b) in bern.iter().enumerate() {
                acc += BigRational::from(binom.clone()) * b;
                binom = binom * BigInt::from(m as i64 + 1 - j as i64) / BigInt::from(j as i64 + 1);
            }
            let denom = BigRational::from(BigInt::from(m as i64 + 1));
            bern.push(-acc / denom);
        }
        cache.clear();
        let mut factorial = BigRational::one();
        for (k, b) in bern.iter().enumerate() {
            if k > 0 {
                factorial *= BigRational::from(BigInt::from(k as i64));
            }
            let pref = b / (&factorial * BigRational::from(BigInt::from(k as i64 + 1)));
            cache.push(pref);
        }
    }
    cache[..count].to_vec()
}

fn pi_sq_over_6(prec: usize) -> BigReal {
    let pi = BigReal::pi(prec);
    pi.mul(&pi).div_u64(6)
}

fn small(prec: usize) -> i64 {
    -(prec as i64) - 4
}

/// Direct series `Σ z^k / k²`, for `|z| ≤ 1/2`.
fn li2_series(z: &BigComplex, prec: usize) -> BigComplex {
    let mut acc = BigComplex::zero(prec);
    let mut zk = z.clone();
    let mut k = 1u64;
    loop {
        let term = zk.mul_real(&BigReal::from_u64(k * k, prec).recip());
        acc = acc.add(&term);
        if let Some(e) = term.abs().exponent() {
            if e < small(prec) {
                break;
            }
        } else {
            break;
        }
        k += 1;
        zk = zk.mul(z);
        if k > 64 * prec as u64 {
            break;
        }
    }
    acc
}

/// Bernoulli log-series: `Li₂(z) = Σ_k b_k·w^{k+1}` with `w = -ln(1-z)`.
fn li2_log_series(z: &BigComplex, prec: usize) -> BigComplex {
    let one = BigComplex::one(prec);
    let w = one.sub(z).ln().neg();
    // Ratio |w|/2π ≤ ~0.55 in the region this is called; the number of
    // terms needed is ~prec bits / 0.86.
    let terms = (prec as f64 * 1.3) as usize + 16;
    let prefs = bernoulli_prefactors(terms);
    let mut acc = BigComplex::zero(prec);
    let mut wk = w.clone(); // w^{k+1} for k = 0
    for (k, pref) in prefs.iter().enumerate() {
        if k % 2 == 0 || k == 1 {
            // Odd Bernoulli numbers vanish except B_1.
            let c = BigReal::from_ratio(pref, prec);
            acc = acc.add(&wk.mul_real(&c));
        }
        wk = wk.mul(&w);
        if let Some(e) = wk.abs().exponent() {
            if e < small(prec) {
                break;
            }
        } else {
            break;
        }
    }
    acc
}

fn li2_inner(z: &BigComplex, prec: usize) -> BigComplex {
    let one = BigComplex::one(prec);
    let abs = z.abs();
    let half = BigReal::parse_dec("0.5", prec).unwrap();
    let quarter = BigReal::parse_dec("0.25", prec).unwrap();
    let two = BigReal::from_u64(2, prec);

    if z.is_zero() {
        return BigComplex::zero(prec);
    }
    if one.sub(z).is_zero() {
        return BigComplex::from_real(pi_sq_over_6(prec));
    }
    if abs.cmp_val(&half) != std::cmp::Ordering::Greater {
        return li2_series(z, prec);
    }
    if abs.cmp_val(&two) != std::cmp::Ordering::Less {
        // Li₂(z) = -Li₂(1/z) - π²/6 - ln²(-z)/2
        let inv = one.div(z);
        let ln_neg = z.neg().ln();
        let corr = ln_neg.mul(&ln_neg).mul_real(&half);
        return li2_inner(&inv, prec)
            .neg()
            .sub(&BigComplex::from_real(pi_sq_over_6(prec)))
            .sub(&corr);
    }
    let omz = one.sub(z);
    if omz.abs().cmp_val(&quarter) != std::cmp::Ordering::Greater {
        // Li₂(z) = π²/6 - ln z·ln(1-z) - Li₂(1-z)
        let cross = z.ln().mul(&omz.ln());
        return BigComplex::from_real(pi_sq_over_6(prec))
            .sub(&cross)
            .sub(&li2_inner(&omz, prec));
    }
    li2_log_series(z, prec)
}

/// The principal-branch dilogarithm `Li₂(z)` to `precision` bits.
pub fn dilog(z: &BigComplex, precision: u32) -> Result<BigComplex, NahmError> {
    if precision as usize > 1 << 20 {
        return Err(NahmError::PrecisionUnachievable);
    }
    let wp = precision as usize + GUARD;
    let z = BigComplex::new(
        z.re.clone().add(&BigReal::zero(wp)),
        z.im.clone().add(&BigReal::zero(wp)),
    );
    Ok(li2_inner(&z, wp))
}

/// `Li₂(x)` for real `x < 1` (real output), used by the Rogers dilogarithm.
pub fn li2_real(x: &BigReal, precision: u32) -> BigReal {
    let wp = precision as usize + GUARD;
    let x = x.add(&BigReal::zero(wp));
    let one = BigReal::one(wp);
    let half = BigReal::parse_dec("0.5", wp).unwrap();
    if x.is_zero() {
        return BigReal::zero(wp);
    }
    if x.abs().cmp_val(&half) != std::cmp::Ordering::Greater {
        let mut acc = BigReal::zero(wp);
        let mut xk = x.clone();
        let mut k = 1u64;
        loop {
            let term = xk.div(&BigReal::from_u64(k * k, wp));
            acc = acc.add(&term);
            match term.abs().exponent() {
                Some(e) if e >= small(wp) => {}
                _ => break,
            }
            k += 1;
            xk = xk.mul(&x);
        }
        return acc;
    }
    if x.gt(&half) {
        // 1/2 < x < 1: reflection stays real.
        let omx = one.sub(&x);
        let cross = x.ln().mul(&omx.ln());
        return pi_sq_over_6(wp).sub(&cross).sub(&li2_real(&omx, precision));
    }
    // x < -1/2: Landen-type inversion on negative reals stays real:
    // Li₂(x) = -Li₂(x/(x-1)) - ln²(1-x)/2, with x/(x-1) ∈ (0, 1).
    let omx = one.sub(&x);
    let u = x.div(&x.sub(&one));
    let corr = omx.ln().powi(2).mul(&half);
    li2_real(&u, precision).neg().sub(&corr)
}

/// A point of `P¹(R)` for the Rogers dilogarithm.
#[derive(Clone, Debug)]
pub enum ExtendedReal {
    Finite(BigReal),
    Infinity,
}

impl ExtendedReal {
    pub fn finite(v: BigReal) -> Self {
        ExtendedReal::Finite(v)
    }
}

/// The Rogers dilogarithm, normalized so `L(0) = π²/6`, `L(1) = 0`,
/// `L(∞) = -π²/6`:
///
/// - `0 < x < 1`: `π²/6 - Li₂(x) - ln(x)·ln(1-x)/2`
/// - `x > 1`:     `-L(1/x)`
/// - `x < 0`:     `π²/6 - L(1-x)`
///
/// Callers compare values mod `π²/2` when working with classes.
pub fn rogers_l(x: &ExtendedReal, precision: u32) -> BigReal {
    let wp = precision as usize + GUARD;
    let pi26 = pi_sq_over_6(wp);
    let x = match x {
        ExtendedReal::Infinity => return pi26.neg(),
        ExtendedReal::Finite(v) => v.add(&BigReal::zero(wp)),
    };
    let one = BigReal::one(wp);
    if x.is_zero() {
        return pi26;
    }
    if x.cmp_val(&one) == std::cmp::Ordering::Equal {
        return BigReal::zero(wp);
    }
    if x.is_negative() {
        return pi26.sub(&rogers_l(&ExtendedReal::Finite(one.sub(&x)), precision));
    }
    if x.gt(&one) {
        return rogers_l(&ExtendedReal::Finite(one.div(&x)), precision).neg();
    }
    let omx = one.sub(&x);
    let half_cross = x.ln().mul(&omx.ln()).div_u64(2);
    pi26.sub(&li2_real(&x, precision)).sub(&half_cross)
}

/// The Bloch-Wigner dilogarithm `D(z) = Im Li₂(z) + arg(1-z)·ln|z|`,
/// single-valued and real-analytic off `{0, 1}`; zero on the real line.
pub fn bloch_wigner(z: &BigComplex, precision: u32) -> Result<BigReal, NahmError> {
    let wp = precision as usize + GUARD;
    if z.im.is_zero() {
        return Ok(BigReal::zero(wp));
    }
    let li2 = dilog(z, precision + GUARD as u32)?;
    let one = BigComplex::one(wp);
    let omz = one.sub(z);
    let term = omz.arg().mul(&z.abs().ln());
    Ok(li2.im.add(&term))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &BigReal, b: &BigReal, bits: i64) -> bool {
        match a.sub(b).abs().exponent() {
            None => true,
            Some(e) => {
                let scale = b.abs().exponent().unwrap_or(0);
                e < scale - bits
            }
        }
    }

    #[test]
    fn dilog_at_zero_and_one() {
        let p = 200u32;
        let z0 = BigComplex::zero(p as usize);
        assert!(dilog(&z0, p).unwrap().abs().is_zero());
        // Li₂(1) = π²/6, via the series-computed value at 1 (reflection path).
        let one = BigComplex::one(p as usize + GUARD);
        let v = dilog(&one, p).unwrap();
        let expect = pi_sq_over_6(p as usize + GUARD);
        assert!(close(&v.re, &expect, 190));
        assert!(v.im.abs().exponent().unwrap_or(-100_000) < -180);
    }

    #[test]
    fn dilog_at_half() {
        // Li₂(1/2) = π²/12 - ln²2/2, checked against the raw series too.
        let p = 200u32;
        let wp = p as usize + GUARD;
        let half = BigComplex::new(BigReal::parse_dec("0.5", wp).unwrap(), BigReal::zero(wp));
        let v = dilog(&half, p).unwrap();
        let pi = BigReal::pi(wp);
        let ln2 = BigReal::from_u64(2, wp).ln();
        let expect = pi.mul(&pi).div_u64(12).sub(&ln2.mul(&ln2).div_u64(2));
        assert!(close(&v.re, &expect, 190));
        let series = li2_series(&half, wp);
        assert!(close(&series.re, &expect, 190));
    }

    #[test]
    fn dilog_reference_values() {
        // Frozen from an independent 60-digit evaluation.
        let p = 200u32;
        let wp = p as usize + GUARD;
        let cases = [
            // (re(z), im(z), re(Li2), im(Li2))
            (
                "2",
                "0",
                "2.46740110027233965470862274996903778382842485181019765660334",
                "-2.1775860903036021305006888982376139473385837003692862943258",
            ),
            (
                "-2",
                "3",
                "-1.82518286917642481140929239631969680082221022718068995263074",
                "1.47408499831557126976822913005046819548254260758235883040832",
            ),
            (
                "0.9",
                "0.1",
                "1.26418673233875393174426133459292236312361318544624333023411",
                "0.243735679981014025397232822179001998010446947819755565105311",
            ),
        ];
        for (zr, zi, vr, vi) in cases {
            let z = BigComplex::new(
                BigReal::parse_dec(zr, wp).unwrap(),
                BigReal::parse_dec(zi, wp).unwrap(),
            );
            let v = dilog(&z, p).unwrap();
            let er = BigReal::parse_dec(vr, wp).unwrap();
            let ei = BigReal::parse_dec(vi, wp).unwrap();
            assert!(close(&v.re, &er, 180), "re mismatch for z={zr}+{zi}i");
            assert!(close(&v.im, &ei, 180), "im mismatch for z={zr}+{zi}i");
        }
    }

    #[test]
    fn rogers_special_points() {
        let p = 200u32;
        let wp = p as usize + GUARD;
        let pi26 = pi_sq_over_6(wp);
        assert!(rogers_l(&ExtendedReal::Finite(BigReal::one(wp)), p).is_zero());
        assert!(close(&rogers_l(&ExtendedReal::Finite(BigReal::zero(wp)), p), &pi26, 195));
        assert!(close(&rogers_l(&ExtendedReal::Infinity, p), &pi26.neg(), 195));
        // L(1/2) = π²/12.
        let half = BigReal::parse_dec("0.5", wp).unwrap();
        let expect = BigReal::pi(wp).powi(2).div_u64(12);
        assert!(close(&rogers_l(&ExtendedReal::Finite(half), p), &expect, 190));
    }

    #[test]
    fn rogers_reflection_property() {
        let p = 160u32;
        let wp = p as usize + GUARD;
        let pi26 = pi_sq_over_6(wp);
        for num in [1u64, 3, 7, 12, 18] {
            let x = BigReal::from_u64(num, wp).div_u64(20);
            let lx = rogers_l(&ExtendedReal::Finite(x.clone()), p);
            let lomx = rogers_l(&ExtendedReal::Finite(BigReal::one(wp).sub(&x)), p);
            assert!(close(&lx.add(&lomx), &pi26, 150));
        }
    }

    #[test]
    fn rogers_outside_unit_interval() {
        let p = 160u32;
        let wp = p as usize + GUARD;
        // x > 1: L(x) = -L(1/x).
        let x = BigReal::parse_dec("2.5", wp).unwrap();
        let lx = rogers_l(&ExtendedReal::Finite(x.clone()), p);
        let linv = rogers_l(&ExtendedReal::Finite(x.recip()), p);
        assert!(close(&lx, &linv.neg(), 150));
        // x < 0: L(x) = π²/6 - L(1-x); composing the two branches lands
        // back in (0, 1).
        let neg = BigReal::parse_dec("-0.75", wp).unwrap();
        let l = rogers_l(&ExtendedReal::Finite(neg.clone()), p);
        let via = pi_sq_over_6(wp).sub(&rogers_l(
            &ExtendedReal::Finite(BigReal::one(wp).sub(&neg)),
            p,
        ));
        assert!(close(&l, &via, 150));
    }

    #[test]
    fn real_dilog_landen_branch() {
        // li2_real on x < -1/2 agrees with the complex kernel on the axis.
        let p = 180u32;
        let wp = p as usize + GUARD;
        for s in ["-0.8", "-2.5", "-17.0"] {
            let x = BigReal::parse_dec(s, wp).unwrap();
            let real = li2_real(&x, p);
            let complex = dilog(&BigComplex::from_real(x), p).unwrap();
            assert!(close(&real, &complex.re, 160), "x = {s}");
            assert!(complex.im.abs().exponent().unwrap_or(i64::MIN) < -150);
        }
    }

    #[test]
    fn bloch_wigner_basics() {
        let p = 200u32;
        let wp = p as usize + GUARD;
        // Real arguments vanish identically.
        let z = BigComplex::new(BigReal::from_f64(0.75, wp), BigReal::zero(wp));
        assert!(bloch_wigner(&z, p).unwrap().is_zero());
        // Odd under conjugation.
        let z = BigComplex::new(BigReal::from_f64(0.4, wp), BigReal::from_f64(1.3, wp));
        let d = bloch_wigner(&z, p).unwrap();
        let dc = bloch_wigner(&z.conj(), p).unwrap();
        assert!(close(&d, &dc.neg(), 160));
        // Maximum value at e^{iπ/3}, frozen from a 60-digit oracle.
        let pi = BigReal::pi(wp);
        let theta = pi.div_u64(3);
        let root = BigComplex::new(theta.cos(), theta.sin());
        let dmax = bloch_wigner(&root, p).unwrap();
        let expect = BigReal::parse_dec(
            "1.01494160640965362502120255427452028594168930753029979201749",
            wp,
        )
        .unwrap();
        assert!(close(&dmax, &expect, 180));
    }
}
