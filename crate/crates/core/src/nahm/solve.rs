//! The distinguished solution of Nahm's equations `1 - X_i = ∏_j X_j^{a_ij}`
//! for symmetric positive-definite rational `A`, the associated Rogers
//! dilogarithm sum, and continued-fraction rational recognition.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dilog::{rogers_l, ExtendedReal, GUARD};
use super::mp::BigReal;
use super::NahmError;

/// A rational symmetric positive-definite matrix `A`, vector `B`, scalar `C`
/// defining a Nahm sum.
#[derive(Clone, Debug)]
pub struct NahmTriple {
    a: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
    c: BigRational,
}

impl NahmTriple {
    /// Validates symmetry and positive definiteness (exact leading principal
    /// minors) before constructing.
    pub fn new(
        a: Vec<Vec<BigRational>>,
        b: Vec<BigRational>,
        c: BigRational,
    ) -> Result<Self, NahmError> {
        check_spd(&a)?;
        assert_eq!(a.len(), b.len(), "B must have one entry per row of A");
        Ok(NahmTriple { a, b, c })
    }

    /// Integer-matrix convenience constructor with `B = 0`, `C = 0`.
    pub fn from_integer_matrix(a: &[Vec<i64>]) -> Result<Self, NahmError> {
        let rat: Vec<Vec<BigRational>> = a
            .iter()
            .map(|row| row.iter().map(|&v| BigRational::from(BigInt::from(v))).collect())
            .collect();
        let r = rat.len();
        NahmTriple::new(rat, vec![BigRational::zero(); r], BigRational::zero())
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<BigRational>] {
        &self.a
    }

    pub fn linear(&self) -> &[BigRational] {
        &self.b
    }

    pub fn constant(&self) -> &BigRational {
        &self.c
    }

    pub fn with_constant(mut self, c: BigRational) -> Self {
        self.c = c;
        self
    }
}

/// Sylvester's criterion on exact rationals.
fn check_spd(a: &[Vec<BigRational>]) -> Result<(), NahmError> {
    let r = a.len();
    if r == 0 {
        return Err(NahmError::NotPositiveDefinite);
    }
    for row in a {
        if row.len() != r {
            return Err(NahmError::NotSymmetric);
        }
    }
    for i in 0..r {
        for j in 0..i {
            if a[i][j] != a[j][i] {
                return Err(NahmError::NotSymmetric);
            }
        }
    }
    for k in 1..=r {
        if leading_minor(a, k) <= BigRational::zero() {
            return Err(NahmError::NotPositiveDefinite);
        }
    }
    Ok(())
}

fn leading_minor(a: &[Vec<BigRational>], k: usize) -> BigRational {
    let mut m: Vec<Vec<BigRational>> = (0..k).map(|i| a[i][..k].to_vec()).collect();
    let mut det = BigRational::one();
    for col in 0..k {
        let piv = (col..k).find(|&i| !m[i][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = m[col][col].clone();
        for i in col + 1..k {
            let f = &m[i][col] / &inv;
            for j in col..k {
                let sub = &f * &m[col][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Exact inverse by Gauss-Jordan; `A` must be invertible.
pub(crate) fn rational_inverse(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let r = a.len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..r {
        let piv = (col..r)
            .find(|&i| !m[i][col].is_zero())
            .expect("invertible matrix");
        m.swap(piv, col);
        inv.swap(piv, col);
        let d = m[col][col].clone();
        for j in 0..r {
            m[col][j] /= d.clone();
            inv[col][j] /= d.clone();
        }
        for i in 0..r {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..r {
                let s = &f * &m[col][j];
                m[i][j] -= s;
                let s = &f * &inv[col][j];
                inv[i][j] -= s;
            }
        }
    }
    inv
}

/// Dense linear solve with partial pivoting over [`BigReal`].
fn solve_linear(mut m: Vec<Vec<BigReal>>, mut rhs: Vec<BigReal>) -> Option<Vec<BigReal>> {
    let r = m.len();
    for col in 0..r {
        let mut piv = col;
        for i in col + 1..r {
            if m[i][col].abs().gt(&m[piv][col].abs()) {
                piv = i;
            }
        }
        if m[piv][col].is_zero() {
            return None;
        }
        m.swap(piv, col);
        rhs.swap(piv, col);
        for i in col + 1..r {
            let f = m[i][col].div(&m[col][col]);
            for j in col..r {
                let s = f.mul(&m[col][j]);
                m[i][j] = m[i][j].sub(&s);
            }
            let s = f.mul(&rhs[col]);
            rhs[i] = rhs[i].sub(&s);
        }
    }
    let prec = rhs[0].prec();
    let mut x = vec![BigReal::zero(prec); r];
    for i in (0..r).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..r {
            acc = acc.sub(&m[i][j].mul(&x[j]));
        }
        x[i] = acc.div(&m[i][i]);
    }
    Some(x)
}

/// The unique solution of `1 - X_i = ∏_j X_j^{a_ij}` in `(0,1)^r`, found by
/// damped fixed-point iteration `X ← exp(A⁻¹ ln(1-X))` from `(1/2,…,1/2)`
/// and refined by Newton on `G(X) = A·ln X - ln(1-X)` until
/// `‖G‖_∞ < 2^{16-precision}`.
pub fn solve_nahm(a: &[Vec<BigRational>], precision: u32) -> Result<Vec<BigReal>, NahmError> {
    check_spd(a)?;
    let r = a.len();
    let wp = precision as usize + GUARD;
    let a_inv = rational_inverse(a);
    let a_real: Vec<Vec<BigReal>> = a
        .iter()
        .map(|row| row.iter().map(|v| BigReal::from_ratio(v, wp)).collect())
        .collect();
    let a_inv_real: Vec<Vec<BigReal>> = a_inv
        .iter()
        .map(|row| row.iter().map(|v| BigReal::from_ratio(v, wp)).collect())
        .collect();

    let one = BigReal::one(wp);
    let half = BigReal::parse_dec("0.5", wp).unwrap();
    let mut x = vec![half.clone(); r];

    // Damped fixed-point stage: log X ← (log X + A⁻¹ log(1-X)) / 2,
    // clamped back into (margin, 1-margin); the raw map can escape the
    // unit cube when A⁻¹ has negative entries.
    let margin = BigReal::parse_dec("0.001", wp).unwrap();
    let upper = one.sub(&margin);
    let mut stage_tol = -48i64;
    for _ in 0..800 {
        let log1mx: Vec<BigReal> = x.iter().map(|xi| one.sub(xi).ln()).collect();
        let mut logx_new = Vec::with_capacity(r);
        for i in 0..r {
            let mut acc = BigReal::zero(wp);
            for j in 0..r {
                acc = acc.add(&a_inv_real[i][j].mul(&log1mx[j]));
            }
            logx_new.push(x[i].ln().add(&acc).div_u64(2));
        }
        let next: Vec<BigReal> = logx_new
            .iter()
            .map(|l| {
                let v = l.exp();
                if v.is_nan() || !v.gt(&margin) {
                    margin.clone()
                } else if !v.lt(&upper) {
                    upper.clone()
                } else {
                    v
                }
            })
            .collect();
        let delta = next
            .iter()
            .zip(&x)
            .map(|(a, b)| a.sub(b).abs())
            .fold(BigReal::zero(wp), |m, d| if d.gt(&m) { d } else { m });
        x = next;
        if delta.exponent().unwrap_or(i64::MIN) < stage_tol {
            break;
        }
    }
    stage_tol = 16 - precision as i64;

    // Newton refinement.
    let residual = |x: &[BigReal]| -> Vec<BigReal> {
        (0..r)
            .map(|i| {
                let mut acc = one.sub(&x[i]).ln().neg();
                for j in 0..r {
                    acc = acc.add(&a_real[i][j].mul(&x[j].ln()));
                }
                acc
            })
            .collect()
    };
    let mut converged = false;
    for _ in 0..64 {
        let g = residual(&x);
        let gmax = g
            .iter()
            .map(|v| v.abs())
            .fold(BigReal::zero(wp), |m, d| if d.gt(&m) { d } else { m });
        if gmax.exponent().unwrap_or(i64::MIN) < stage_tol {
            converged = true;
            break;
        }
        // J_ij = a_ij / X_j + δ_ij / (1 - X_i)
        let jac: Vec<Vec<BigReal>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let mut v = a_real[i][j].div(&x[j]);
                        if i == j {
                            v = v.add(&one.sub(&x[i]).recip());
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let delta = solve_linear(jac, g.iter().map(|v| v.neg()).collect())
            .ok_or(NahmError::NoConvergence)?;
        for i in 0..r {
            let mut next = x[i].add(&delta[i]);
            // Stay strictly inside (0, 1).
            if !next.is_negative() && next.lt(&one) && !next.is_zero() {
                x[i] = next;
            } else {
                next = x[i].add(&delta[i].div_u64(4));
                if !next.is_negative() && next.lt(&one) && !next.is_zero() {
                    x[i] = next;
                }
            }
        }
    }
    if !converged {
        return Err(NahmError::NoConvergence);
    }
    Ok(x)
}

/// `Σ_i L(X_i)` over the distinguished solution of the Nahm equation.
pub fn l_value(a: &[Vec<BigRational>], precision: u32) -> Result<BigReal, NahmError> {
    let x = solve_nahm(a, precision)?;
    let wp = precision as usize + GUARD;
    let mut acc = BigReal::zero(wp);
    for xi in &x {
        acc = acc.add(&rogers_l(&ExtendedReal::Finite(xi.clone()), precision));
    }
    Ok(acc)
}

/// Continued-fraction convergent `p/q` with `q ≤ max_denominator` and
/// `|v - p/q| < tolerance`, if one exists.
pub fn recognize_rational(
    v: &BigReal,
    max_denominator: u64,
    tolerance: &BigReal,
) -> Option<BigRational> {
    let max_den = BigInt::from(max_denominator.max(1));
    let mut x = v.clone();
    let mut a = x.floor_bigint();
    // Convergents p_k/q_k.
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (a.clone(), BigInt::one());
    for _ in 0..256 {
        if q <= max_den {
            let cand = BigRational::new(p.clone(), q.clone());
            let err = v.sub(&BigReal::from_ratio(&cand, v.prec())).abs();
            if err.lt(tolerance) {
                return Some(cand);
            }
        } else {
            return None;
        }
        let frac = x.sub(&BigReal::from_bigint(&a, v.prec()));
        // Remaining fractional part below working accuracy: stop.
        if frac.abs().exponent().unwrap_or(i64::MIN) < -(v.prec() as i64) + 16 {
            return None;
        }
        x = frac.recip();
        a = x.floor_bigint();
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn bits_close(a: &BigReal, b: &BigReal, bits: i64) -> bool {
        match a.sub(b).abs().exponent() {
            None => true,
            Some(e) => e < b.abs().exponent().unwrap_or(0) - bits,
        }
    }

    #[test]
    fn spd_validation() {
        // Asymmetric.
        let m = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(0, 1), rat(2, 1)]];
        assert_eq!(check_spd(&m).unwrap_err(), NahmError::NotSymmetric);
        // Symmetric but indefinite.
        let m = vec![vec![rat(1, 1), rat(3, 1)], vec![rat(3, 1), rat(1, 1)]];
        assert_eq!(check_spd(&m).unwrap_err(), NahmError::NotPositiveDefinite);
        // The Andrews-Gordon matrix for n = 7 is fine.
        let m = vec![vec![rat(2, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert!(check_spd(&m).is_ok());
    }

    #[test]
    fn solve_one_dimensional() {
        let p = 200u32;
        let wp = p as usize + GUARD;
        // A = (1): 1 - X = X, so X = 1/2 exactly.
        let x = solve_nahm(&[vec![rat(1, 1)]], p).unwrap();
        assert!(bits_close(&x[0], &BigReal::parse_dec("0.5", wp).unwrap(), 180));
        // A = (2): 1 - X = X², so X = (√5-1)/2.
        let x = solve_nahm(&[vec![rat(2, 1)]], p).unwrap();
        let golden = BigReal::from_u64(5, wp)
            .sqrt()
            .sub(&BigReal::one(wp))
            .div_u64(2);
        assert!(bits_close(&x[0], &golden, 180));
    }

    #[test]
    fn solve_two_dimensional_symmetric_case() {
        // A = ((2,1),(1,2)): X₁ = X₂ = the real root of 1 - X = X³.
        // Independent oracle: bisection on 1 - x - x³.
        let p = 192u32;
        let wp = p as usize + GUARD;
        let a = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(2, 1)]];
        let x = solve_nahm(&a, p).unwrap();
        let (mut lo, mut hi) = (BigReal::zero(wp), BigReal::one(wp));
        for _ in 0..(wp as u32 - 8) {
            let mid = lo.add(&hi).div_u64(2);
            let f = BigReal::one(wp).sub(&mid).sub(&mid.powi(3));
            if f.is_negative() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!(bits_close(&x[0], &lo, 170));
        assert!(bits_close(&x[1], &lo, 170));
        // Residual contract.
        let g0 = x[0]
            .ln()
            .mul_u64(2)
            .add(&x[1].ln())
            .sub(&BigReal::one(wp).sub(&x[0]).ln());
        assert!(g0.abs().exponent().unwrap_or(i64::MIN) < 16 - p as i64);
    }

    #[test]
    fn l_values_match_closed_forms() {
        let p = 200u32;
        let wp = p as usize + GUARD;
        let pi2 = BigReal::pi(wp).powi(2);
        // A = (2) → π²/15, A = (1) → π²/12.
        let l = l_value(&[vec![rat(2, 1)]], p).unwrap();
        assert!(bits_close(&l, &pi2.div_u64(15), 180));
        let l = l_value(&[vec![rat(1, 1)]], p).unwrap();
        assert!(bits_close(&l, &pi2.div_u64(12), 180));
    }

    #[test]
    fn recognize_simple_fractions() {
        let p = 128usize;
        let tol = BigReal::parse_dec("1e-9", p).unwrap();
        let v = BigReal::parse_dec("0.0666666666", p).unwrap();
        assert_eq!(recognize_rational(&v, 100, &tol), Some(rat(1, 15)));
        // √2/2 is not recognized at tight tolerance.
        let irr = BigReal::from_u64(2, p).sqrt().div_u64(2);
        let tight = BigReal::parse_dec("1e-12", p).unwrap();
        assert_eq!(recognize_rational(&irr, 100, &tight), None);
    }
}
