//! Nahm-sum evaluation with a certified geometric tail bound, exact
//! q-series expansion on a rational exponent grid, and the Andrews-Gordon
//! data and identity check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dilog::GUARD;
use super::mp::{BigComplex, BigReal};
use super::solve::NahmTriple;
use super::NahmError;
use crate::cyclotomic::CycPoly;

/// The q-expansion of `f_{A,B,C}·q^{-C}` on the exponent grid `(1/denom)·Z`:
/// `coeffs[u]` is the coefficient of `q^{(offset + u)/denom}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NahmSeries {
    pub denom: u64,
    pub offset: i64,
    pub coeffs: Vec<BigRational>,
}

/// Common denominator of the exponent grid of `½mᵀAm + Bm (+ C)`.
///
/// Off-diagonal entries contribute `a_ij·m_i·m_j` (counted twice in the
/// symmetric sum), diagonals contribute `(a_ii/2)·m_i²`.
pub(crate) fn exponent_denominator(t: &NahmTriple, with_constant: bool) -> u64 {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut d = BigInt::one();
    for (i, row) in t.matrix().iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            if i == j {
                d = d.lcm((a * &half).denom());
            } else {
                d = d.lcm(a.denom());
            }
        }
    }
    for b in t.linear() {
        d = d.lcm(b.denom());
    }
    if with_constant {
        d = d.lcm(t.constant().denom());
    }
    d.to_u64().expect("desk-scale exponent denominators")
}

/// `½mᵀAm + Bm` as an exact rational.
fn lattice_exponent(t: &NahmTriple, m: &[u64]) -> BigRational {
    let mut e = BigRational::zero();
    for (i, row) in t.matrix().iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            if m[i] != 0 && m[j] != 0 {
                e += a * BigRational::from(BigInt::from(m[i] as i64 * m[j] as i64));
            }
        }
    }
    e /= BigRational::from(BigInt::from(2));
    for (i, b) in t.linear().iter().enumerate() {
        if m[i] != 0 {
            e += b * BigRational::from(BigInt::from(m[i] as i64));
        }
    }
    e
}

/// Rational lower bound `det(A)/trace(A)^{r-1} ≤ λ_min(A)` for SPD `A`.
fn lambda_lower_bound(t: &NahmTriple) -> BigRational {
    let a = t.matrix();
    let r = a.len();
    let det = determinant(a);
    if r == 1 {
        return det;
    }
    let mut trace = BigRational::zero();
    for (i, row) in a.iter().enumerate() {
        trace += &row[i];
    }
    let mut denom = BigRational::one();
    for _ in 0..r - 1 {
        denom *= &trace;
    }
    det / denom
}

fn determinant(a: &[Vec<BigRational>]) -> BigRational {
    let r = a.len();
    let mut m = a.to_vec();
    let mut det = BigRational::one();
    for col in 0..r {
        let piv = match (col..r).find(|&i| !m[i][col].is_zero()) {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = m[col][col].clone();
        for i in col + 1..r {
            let f = &m[i][col] / &inv;
            for j in col..r {
                let s = &f * &m[col][j];
                m[i][j] -= s;
            }
        }
    }
    det
}

/// Odometer over `[0, bound]^r` skipping the given prefix when the
/// callback returns `false` for a whole shell is not needed; plain
/// enumeration with a max-coordinate filter is enough at desk scale.
fn for_each_in_shell(r: usize, k: u64, mut f: impl FnMut(&[u64])) {
    // Points with max coordinate exactly k.
    let mut m = vec![0u64; r];
    loop {
        if m.iter().copied().max().unwrap_or(0) == k {
            f(&m);
        }
        // Odometer in base k+1.
        let mut i = 0;
        loop {
            if i == r {
                return;
            }
            if m[i] < k {
                m[i] += 1;
                break;
            }
            m[i] = 0;
            i += 1;
        }
    }
}

/// Evaluates the Nahm sum at `q = root^d`, where `root` fixes the branch of
/// `q^{1/d}` used for the rational exponent grid. The result is certified:
/// the omitted tail is below `tail_eps·|partial sum|` by a geometric bound
/// driven by `λ_min(A)`.
pub fn nahm_sum_at_root(
    t: &NahmTriple,
    root: &BigComplex,
    d: u64,
    tail_eps: &BigReal,
) -> Result<BigComplex, NahmError> {
    let r = t.rank();
    let wp = root.prec().max(tail_eps.prec()) + GUARD;
    let q = root.powi(d);
    let absq = q.abs();
    let one = BigReal::one(wp);
    if !absq.lt(&one) || absq.is_zero() {
        return Err(NahmError::NotConverged);
    }

    // Rigorous positive lower bound ρ ≤ (|q|; |q|)_∞.
    let ln_absq = absq.ln();
    let target = one.sub(&absq).div_u64(2);
    let j_bound = {
        let j = target.ln().div(&ln_absq); // ≥ 0 since both logs negative
        j.floor_bigint().to_u64().unwrap_or(0) + 1
    };
    let mut rho = BigReal::one(wp);
    let mut qj = absq.clone();
    for _ in 0..j_bound {
        rho = rho.mul(&one.sub(&qj));
        qj = qj.mul(&absq);
    }
    rho = rho.div_u64(2);
    let rho_inv_r = rho.recip().powi(r as u64);

    let lambda = BigReal::from_ratio(&lambda_lower_bound(t), wp);
    let beta1 = {
        let mut b = BigRational::zero();
        for v in t.linear() {
            b += v.abs();
        }
        BigReal::from_ratio(&b, wp)
    };
    let c_low = {
        let c = t.constant();
        if c.is_negative() {
            BigReal::from_ratio(c, wp)
        } else {
            BigReal::zero(wp)
        }
    };

    // Shell bound s(k) = r·(k+1)^{r-1}·|q|^{λk²/2 - β₁k + C_low}·ρ^{-r}.
    let shell_bound = |k: u64| -> BigReal {
        let kk = BigReal::from_u64(k, wp);
        let expo = lambda
            .mul(&kk)
            .mul(&kk)
            .div_u64(2)
            .sub(&beta1.mul(&kk))
            .add(&c_low);
        let count = BigReal::from_u64(r as u64, wp).mul(&kk.add(&one).powi(r as u64 - 1));
        count.mul(&expo.mul(&ln_absq).exp()).mul(&rho_inv_r)
    };
    // Bound on s(k+1)/s(k) for all k ≥ κ.
    let ratio_bound = |k: u64| -> BigReal {
        let kk = BigReal::from_u64(k, wp);
        let expo = lambda.mul(&kk).add(&lambda.div_u64(2)).sub(&beta1);
        BigReal::from_u64(2, wp)
            .powi(r as u64 - 1)
            .mul(&expo.mul(&ln_absq).exp())
    };

    let dd = BigInt::from(d);
    let exponent_int = |m: &[u64]| -> BigInt {
        let e = (lattice_exponent(t, m) + t.constant()) * BigRational::from(dd.clone());
        debug_assert!(e.denom().is_one(), "exponent off the 1/d grid");
        e.numer().clone()
    };

    // Pochhammer cache (q)_j.
    let mut poch: Vec<BigComplex> = vec![BigComplex::one(wp)];
    let mut total = BigComplex::zero(wp);
    let half = BigReal::parse_dec("0.5", wp).unwrap();
    let mut points_budget = 5_000_000u64;

    let mut k = 0u64;
    loop {
        while (poch.len() as u64) <= k {
            let j = poch.len() as u64;
            let factor = BigComplex::one(wp).sub(&q.powi(j));
            let prev = poch.last().unwrap().clone();
            poch.push(prev.mul(&factor));
        }
        let mut shell_err: Option<NahmError> = None;
        for_each_in_shell(r, k, |m| {
            if shell_err.is_some() {
                return;
            }
            if points_budget == 0 {
                shell_err = Some(NahmError::NotConverged);
                return;
            }
            points_budget -= 1;
            let u = exponent_int(m);
            let pw = match u.to_i64() {
                Some(v) => root.powi_signed(v),
                None => {
                    shell_err = Some(NahmError::ExponentGridOverflow(0, d));
                    return;
                }
            };
            let mut den = BigComplex::one(wp);
            for &mi in m {
                den = den.mul(&poch[mi as usize]);
            }
            total = total.add(&pw.div(&den));
        });
        if let Some(e) = shell_err {
            return Err(e);
        }

        if k >= 1 {
            let s_next = shell_bound(k + 1);
            let rb = ratio_bound(k + 1);
            if rb.lt(&half) {
                let tail = s_next.mul_u64(2);
                let cutoff = tail_eps.mul(&total.abs());
                if tail.lt(&cutoff) {
                    return Ok(total);
                }
            }
        }
        k += 1;
        if k > 100_000 {
            return Err(NahmError::NotConverged);
        }
    }
}

/// Evaluates `f_{A,B,C}(q)` for `0 < |q| < 1`, fixing the branch of
/// `q^{1/D}` on the exponent grid as the principal `D`-th root.
pub fn nahm_sum(t: &NahmTriple, q: &BigComplex, tail_eps: &BigReal) -> Result<BigComplex, NahmError> {
    let d = exponent_denominator(t, true);
    let root = if d == 1 {
        q.clone()
    } else {
        let ln = q.ln();
        BigComplex::new(ln.re.div_u64(d), ln.im.div_u64(d)).exp()
    };
    nahm_sum_at_root(t, &root, d, tail_eps)
}

/// Exact coefficients of the q-expansion of `f_{A,B,C}·q^{-C}` through the
/// exponent `order`.
pub fn nahm_series(t: &NahmTriple, order: i64) -> Result<NahmSeries, NahmError> {
    let r = t.rank();
    let d = exponent_denominator(t, false);
    let grid_len = (order.unsigned_abs() + 1) * d * 4;
    if grid_len > 4_000_000 {
        return Err(NahmError::ExponentGridOverflow(grid_len, d));
    }

    // Max coordinate bound from ½λk² - β₁k ≤ order.
    let lambda = lambda_lower_bound(t).to_f64().unwrap_or(f64::MIN_POSITIVE);
    let beta1: f64 = t
        .linear()
        .iter()
        .map(|b| b.abs().to_f64().unwrap_or(0.0))
        .sum();
    let bound = ((beta1 + (beta1 * beta1 + 2.0 * lambda * order.max(0) as f64).sqrt()) / lambda)
        .ceil() as u64
        + 1;

    // Collect (integer grid exponent, m) pairs with exponent ≤ order.
    let order_num = BigInt::from(order) * BigInt::from(d);
    let mut contributions: Vec<(BigInt, Vec<u64>)> = Vec::new();
    let mut min_e: Option<BigInt> = None;
    let mut m = vec![0u64; r];
    'outer: loop {
        let e = lattice_exponent(t, &m) * BigRational::from(BigInt::from(d));
        debug_assert!(e.denom().is_one());
        let e = e.numer().clone();
        if e <= order_num {
            match &min_e {
                None => min_e = Some(e.clone()),
                Some(me) if e < *me => min_e = Some(e.clone()),
                _ => {}
            }
            contributions.push((e, m.clone()));
        }
        let mut i = 0;
        loop {
            if i == r {
                break 'outer;
            }
            if m[i] < bound {
                m[i] += 1;
                break;
            }
            m[i] = 0;
            i += 1;
        }
    }
    let offset = min_e.unwrap_or_else(BigInt::zero);
    let len = (&order_num - &offset)
        .to_u64()
        .ok_or(NahmError::ExponentGridOverflow(grid_len, d))? as usize
        + 1;
    if len > 4_000_000 {
        return Err(NahmError::ExponentGridOverflow(len as u64, d));
    }

    let mut coeffs = vec![BigRational::zero(); len];
    for (e, m) in contributions {
        let base = (&e - &offset).to_u64().unwrap() as usize;
        // Integer-power expansion of ∏ 1/(q)_{m_i} to the needed degree.
        let degree = (len - 1 - base) / d as usize;
        let mut c = vec![BigInt::zero(); degree + 1];
        c[0] = BigInt::one();
        for &mi in &m {
            for j in 1..=mi as usize {
                // Divide by (1 - q^j): prefix sums with stride j.
                for idx in j..=degree {
                    let add = c[idx - j].clone();
                    c[idx] += add;
                }
            }
        }
        for (j, v) in c.into_iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            coeffs[base + j * d as usize] += BigRational::from(v);
        }
    }
    Ok(NahmSeries {
        denom: d,
        offset: offset.to_i64().unwrap_or(0),
        coeffs,
    })
}

/// The Andrews-Gordon matrix `A_n = (2·min(i,j))` of rank `(n-3)/2`.
pub fn ag_matrix(n: u64) -> Result<Vec<Vec<i64>>, NahmError> {
    if n < 5 || n % 2 == 0 {
        return Err(NahmError::InvalidOrder(n));
    }
    let r = ((n - 3) / 2) as usize;
    Ok((0..r)
        .map(|i| (0..r).map(|j| 2 * (i.min(j) as i64 + 1)).collect())
        .collect())
}

/// The Andrews-Gordon triple `(A_n, 0, 0)` together with the cyclotomic
/// solution orbit `X_k = (1-ζ^{2k})(1-ζ^{2k+4})/(1-ζ^{2k+2})²`, whose
/// entries are fixed by `ζ ↦ ζ^{-1}`.
pub fn ag_data(n: u64) -> Result<(NahmTriple, Vec<CycPoly>), NahmError> {
    let matrix = ag_matrix(n)?;
    let triple = NahmTriple::from_integer_matrix(&matrix)?;
    let r = ((n - 3) / 2) as i64;
    let mut xs = Vec::with_capacity(r as usize);
    for k in 1..=r {
        let one = CycPoly::one(n);
        let num = one
            .sub(&CycPoly::root_power(n, 2 * k))
            .mul(&one.sub(&CycPoly::root_power(n, 2 * k + 4)));
        let den = one.sub(&CycPoly::root_power(n, 2 * k + 2));
        let x = num.div(&den.mul(&den)).expect("denominator nonzero");
        debug_assert!(x.is_real_subfield());
        xs.push(x);
    }
    Ok((triple, xs))
}

/// Whether `f_{A_n,0,0}` matches the product
/// `∏_{k>0, 2k ≢ 0,±1 mod n} (1-q^k)^{-1}` through the exponent `order`.
pub fn ag_check(n: u64, order: i64) -> Result<bool, NahmError> {
    let (triple, _) = ag_data(n)?;
    let series = nahm_series(&triple, order)?;
    debug_assert_eq!(series.denom, 1);
    debug_assert_eq!(series.offset, 0);

    let degree = order.max(0) as usize;
    let mut prod = vec![BigInt::zero(); degree + 1];
    prod[0] = BigInt::one();
    for k in 1..=degree as u64 {
        let m = (2 * k) % n;
        if m == 0 || m == 1 || m == n - 1 {
            continue;
        }
        for idx in k as usize..=degree {
            let add = prod[idx - k as usize].clone();
            prod[idx] += add;
        }
    }
    Ok(series
        .coeffs
        .iter()
        .zip(prod.iter())
        .all(|(a, b)| *a == BigRational::from(b.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_bits(a: &BigReal, b: &BigReal, bits: i64) -> bool {
        match a.sub(b).abs().exponent() {
            None => true,
            Some(e) => e < b.abs().exponent().unwrap_or(0) - bits,
        }
    }

    #[test]
    fn series_rr_matrix() {
        // Σ q^{m²}/(q)_m = 1 + q + q² + q³ + 2q⁴ + 2q⁵ + 3q⁶ + 3q⁷ + 4q⁸ …
        let t = NahmTriple::from_integer_matrix(&[vec![2]]).unwrap();
        let s = nahm_series(&t, 8).unwrap();
        assert_eq!(s.denom, 1);
        assert_eq!(s.offset, 0);
        let got: Vec<i64> = s
            .coeffs
            .iter()
            .map(|c| c.to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(got, vec![1, 1, 1, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn series_half_grid() {
        // A = (1): exponents m²/2 on the half-integer grid. Recomputed by
        // an independent brute expansion: coefficients at exponents
        // 0, 1/2, 1, 3/2, 2, 5/2, 3, 7/2, 4 are 1,1,0,1,1,1,1,1,2.
        let t = NahmTriple::from_integer_matrix(&[vec![1]]).unwrap();
        let s = nahm_series(&t, 4).unwrap();
        assert_eq!(s.denom, 2);
        assert_eq!(s.offset, 0);
        let got: Vec<i64> = s
            .coeffs
            .iter()
            .map(|c| c.to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(got, vec![1, 1, 0, 1, 1, 1, 1, 1, 2]);
    }

    #[test]
    fn series_with_linear_term_matches_product() {
        // Σ q^{m²+m}/(q)_m = ∏_{k>0, k ≡ ±2 mod 5} (1-q^k)^{-1}:
        // the companion identity to the A = (2), B = 0 case.
        use num_bigint::BigInt;
        let t = NahmTriple::new(
            vec![vec![BigRational::from(BigInt::from(2))]],
            vec![BigRational::from(BigInt::from(1))],
            BigRational::zero(),
        )
        .unwrap();
        const ORDER: i64 = 40;
        let s = nahm_series(&t, ORDER).unwrap();
        assert_eq!((s.denom, s.offset), (1, 0));
        let mut prod = vec![BigInt::zero(); ORDER as usize + 1];
        prod[0] = BigInt::one();
        for k in 1..=ORDER as usize {
            if k % 5 != 2 && k % 5 != 3 {
                continue;
            }
            for idx in k..=ORDER as usize {
                let add = prod[idx - k].clone();
                prod[idx] += add;
            }
        }
        let got: Vec<BigInt> = s.coeffs.iter().map(|c| c.to_integer()).collect();
        assert_eq!(got, prod);
    }

    #[test]
    fn series_negative_linear_term() {
        // A = (2), B = (-2): exponents m² - 2m reach -1 at m = 1.
        // Hand-expanded oracle through exponent 3:
        //   m=0 → 1 at 0; m=1 → q^{-1}/(1-q); m=2 → 1/((1-q)(1-q²));
        //   m=3 → q³/(q)₃.
        use num_bigint::BigInt;
        let t = NahmTriple::new(
            vec![vec![BigRational::from(BigInt::from(2))]],
            vec![BigRational::from(BigInt::from(-2))],
            BigRational::zero(),
        )
        .unwrap();
        let s = nahm_series(&t, 3).unwrap();
        assert_eq!(s.denom, 1);
        assert_eq!(s.offset, -1);
        let got: Vec<i64> = s
            .coeffs
            .iter()
            .map(|c| c.to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(got, vec![1, 3, 2, 3, 4]);
    }

    #[test]
    fn series_grid_overflow_guard() {
        let t = NahmTriple::from_integer_matrix(&[vec![2]]).unwrap();
        assert!(matches!(
            nahm_series(&t, 2_000_000),
            Err(NahmError::ExponentGridOverflow(..))
        ));
    }

    #[test]
    fn series_order_zero() {
        let t = NahmTriple::from_integer_matrix(&[vec![2]]).unwrap();
        let s = nahm_series(&t, 0).unwrap();
        assert_eq!(s.coeffs.len(), 1);
        assert_eq!(s.coeffs[0], BigRational::one());
    }

    #[test]
    fn sum_matches_series_oracle() {
        // Direct numeric summation cross-check at q = 0.1 and q = 0.01.
        let p = 160usize;
        let eps = BigReal::parse_dec("1e-30", p).unwrap();
        let t = NahmTriple::from_integer_matrix(&[vec![2]]).unwrap();
        let q = BigComplex::from_real(BigReal::parse_dec("0.1", p).unwrap());
        let v = nahm_sum(&t, &q, &eps).unwrap();
        // Oracle: terms 1 + q/(1-q) + q⁴/((1-q)(1-q²)) + …
        let mut oracle = BigReal::zero(p);
        let qq = BigReal::parse_dec("0.1", p).unwrap();
        let mut poch = BigReal::one(p);
        for m in 0..40u64 {
            if m > 0 {
                poch = poch.mul(&BigReal::one(p).sub(&qq.powi(m)));
            }
            oracle = oracle.add(&qq.powi(m * m).div(&poch));
        }
        assert!(close_bits(&v.re, &oracle, 90));
        assert!(v.im.is_zero() || v.im.abs().exponent().unwrap() < -90);

        let t1 = NahmTriple::from_integer_matrix(&[vec![1]]).unwrap();
        let q = BigComplex::from_real(BigReal::parse_dec("0.01", p).unwrap());
        let v = nahm_sum(&t1, &q, &eps).unwrap();
        // 1 + q^{1/2}/(1-q) + q²/((1-q)(1-q²)) + … at q = 0.01.
        let q01 = BigReal::parse_dec("0.01", p).unwrap();
        let root = q01.sqrt();
        let mut oracle = BigReal::zero(p);
        let mut poch = BigReal::one(p);
        for m in 0..40u64 {
            if m > 0 {
                poch = poch.mul(&BigReal::one(p).sub(&q01.powi(m)));
            }
            oracle = oracle.add(&root.powi(m * m).div(&poch));
        }
        assert!(close_bits(&v.re, &oracle, 90));
    }

    #[test]
    fn sum_rejects_bad_modulus() {
        let p = 96usize;
        let t = NahmTriple::from_integer_matrix(&[vec![2]]).unwrap();
        let eps = BigReal::parse_dec("1e-10", p).unwrap();
        let q = BigComplex::from_real(BigReal::from_u64(2, p));
        assert_eq!(nahm_sum(&t, &q, &eps).unwrap_err(), NahmError::NotConverged);
    }

    #[test]
    fn ag_matrices() {
        assert_eq!(ag_matrix(5).unwrap(), vec![vec![2]]);
        assert_eq!(ag_matrix(7).unwrap(), vec![vec![2, 2], vec![2, 4]]);
        assert_eq!(
            ag_matrix(9).unwrap(),
            vec![vec![2, 2, 2], vec![2, 4, 4], vec![2, 4, 6]]
        );
        assert_eq!(ag_matrix(4).unwrap_err(), NahmError::InvalidOrder(4));
    }

    #[test]
    fn ag_identity_small_orders() {
        assert!(ag_check(5, 30).unwrap());
        assert!(ag_check(7, 30).unwrap());
    }

    #[test]
    fn rr_coefficients_positive_and_monotone() {
        let t = NahmTriple::from_integer_matrix(&[vec![2]]).unwrap();
        let s = nahm_series(&t, 40).unwrap();
        let vals: Vec<BigInt> = s.coeffs.iter().map(|c| c.to_integer()).collect();
        assert!(vals.iter().all(|v| *v >= BigInt::zero()));
        // Partial sums weakly increase.
        let mut prev = BigInt::zero();
        let mut acc = BigInt::zero();
        for v in vals {
            acc += v;
            assert!(acc >= prev);
            prev = acc.clone();
        }
    }
}
