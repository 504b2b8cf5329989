//! Radial asymptotics of Nahm sums at roots of unity: evaluation along a
//! grid `q = e^{2πia/n}·e^{-h/n}`, a three-parameter fit of
//! `log f = L/(nh) + c₀ + c₁h`, and the embedding match for the
//! distinguished Nahm solution.

use num_integer::gcd;
use num_rational::BigRational;

use super::dilog::GUARD;
use super::mp::{BigComplex, BigReal};
use super::series::{ag_data, exponent_denominator, nahm_sum_at_root};
use super::solve::{l_value, solve_nahm};
use super::NahmError;
use crate::cyclotomic::EmbeddingIndex;

/// Fit report for the radial approach to `e^{2πia/n}`.
#[derive(Clone, Debug)]
pub struct AsymReport {
    /// The root of unity `a/n`.
    pub root_numerator: u64,
    pub root_denominator: u64,
    /// Descending grid of `h` values.
    pub grid: Vec<BigReal>,
    /// `f(e^{2πia/n}·e^{-h/n})` per grid point.
    pub values: Vec<BigComplex>,
    /// Fitted `L` in the model `log f = L/(nh) + c₀ + c₁h`.
    pub fitted_l: BigReal,
    /// Fitted exponential rate `L/n` (the coefficient of `1/h`).
    pub fitted_rate: BigReal,
    /// `Σ L(Xᵢ)` over the distinguished Nahm solution.
    pub predicted_l: BigReal,
    /// Predicted rate `L(ξ_A)/n`.
    pub predicted_rate: BigReal,
    /// Modulus of the fitted leading constant `e^{c₀}`.
    pub constant_modulus: BigReal,
    /// Phase of the fitted leading constant, in turns (mod 1).
    pub constant_phase_turns: BigReal,
    /// Per-point fit residuals `|log f - model|`.
    pub residuals: Vec<BigReal>,
}

/// Symmetric positive-definite solve for the small normal equations.
fn solve_normal(mut m: Vec<Vec<BigReal>>, mut rhs: Vec<BigReal>) -> Vec<BigReal> {
    let n = m.len();
    for col in 0..n {
        let mut piv = col;
        for i in col + 1..n {
            if m[i][col].abs().gt(&m[piv][col].abs()) {
                piv = i;
            }
        }
        m.swap(piv, col);
        rhs.swap(piv, col);
        for i in col + 1..n {
            let f = m[i][col].div(&m[col][col]);
            for j in col..n {
                let s = f.mul(&m[col][j]);
                m[i][j] = m[i][j].sub(&s);
            }
            let s = f.mul(&rhs[col]);
            rhs[i] = rhs[i].sub(&s);
        }
    }
    let prec = rhs[0].prec();
    let mut x = vec![BigReal::zero(prec); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul(&x[j]));
        }
        x[i] = acc.div(&m[i][i]);
    }
    x
}

fn least_squares(design: &[Vec<BigReal>], y: &[BigReal], prec: usize) -> Vec<BigReal> {
    let cols = design[0].len();
    let mut ata = vec![vec![BigReal::zero(prec); cols]; cols];
    let mut aty = vec![BigReal::zero(prec); cols];
    for (row, yi) in design.iter().zip(y) {
        for i in 0..cols {
            for j in 0..cols {
                ata[i][j] = ata[i][j].add(&row[i].mul(&row[j]));
            }
            aty[i] = aty[i].add(&row[i].mul(yi));
        }
    }
    solve_normal(ata, aty)
}

/// Evaluates the Nahm sum along the radial grid and fits
/// `log f(h) = L/(nh) + c₀ + c₁h` (real part: three parameters; imaginary
/// part: `c₀, c₁` only, after phase unwrapping).
///
/// The rational-exponent branch is fixed once from the representation
/// `a/n`: `q^{1/D} := e^{2πia/(nD)}·e^{-h/(nD)}` with `D` the exponent-grid
/// denominator.
pub fn radial_report(
    t: &super::NahmTriple,
    a: u64,
    n: u64,
    h_grid: &[BigReal],
    precision: u32,
) -> Result<AsymReport, NahmError> {
    if n == 0 || (n > 1 && gcd(a, n) != 1) || (n == 1 && a != 0) {
        return Err(NahmError::InvalidOrder(n));
    }
    if h_grid.len() < 3 {
        return Err(NahmError::IllConditionedFit {
            needed: 3,
            got: h_grid.len(),
        });
    }
    for w in h_grid.windows(2) {
        if !w[1].lt(&w[0]) || w[1].is_negative() || w[1].is_zero() {
            return Err(NahmError::IllConditionedFit {
                needed: 3,
                got: h_grid.len(),
            });
        }
    }

    let wp = precision as usize + GUARD;
    let d = exponent_denominator(t, true);
    let eps = {
        // Certify the tail below the fit's resolution.
        let e = BigReal::from_u64(2, wp);
        BigReal::one(wp).div(&e.powi(precision as u64))
    };

    let mut values = Vec::with_capacity(h_grid.len());
    let mut logs: Vec<BigComplex> = Vec::with_capacity(h_grid.len());
    let two_pi = BigReal::pi(wp).mul_u64(2);
    for h in h_grid {
        let h = h.add(&BigReal::zero(wp));
        // ω = e^{2πia/(nD)}·e^{-h/(nD)}
        let modulus = h.div_u64(n).div_u64(d).neg().exp();
        let turns = BigRational::new((a as i64).into(), (n as i64 * d as i64).into());
        let omega = BigComplex::from_polar_turns(&modulus, &turns, wp);
        let f = nahm_sum_at_root(t, &omega, d, &eps)?;
        let mut lf = f.ln();
        // Unwrap the phase against the previous grid point.
        if let Some(prev) = logs.last() {
            let diff = lf.im.sub(&prev.im);
            let k = diff.div(&two_pi).add(&BigReal::parse_dec("0.5", wp).unwrap());
            let k = k.floor_bigint();
            if !num_traits::Zero::is_zero(&k) {
                lf = BigComplex::new(lf.re, lf.im.sub(&BigReal::from_bigint(&k, wp).mul(&two_pi)));
            }
        }
        values.push(f);
        logs.push(lf);
    }

    // Real fit: [1/(nh), 1, h], three parameters exactly.
    let design_re: Vec<Vec<BigReal>> = h_grid
        .iter()
        .map(|h| {
            let h = h.add(&BigReal::zero(wp));
            vec![h.mul_u64(n).recip(), BigReal::one(wp), h]
        })
        .collect();
    let yre: Vec<BigReal> = logs.iter().map(|l| l.re.clone()).collect();
    let sol_re = least_squares(&design_re, &yre, wp);

    // Imaginary fit: [1, h].
    let design_im: Vec<Vec<BigReal>> = h_grid
        .iter()
        .map(|h| vec![BigReal::one(wp), h.add(&BigReal::zero(wp))])
        .collect();
    let yim: Vec<BigReal> = logs.iter().map(|l| l.im.clone()).collect();
    let sol_im = least_squares(&design_im, &yim, wp);

    let fitted_l = sol_re[0].clone();
    let fitted_rate = fitted_l.div_u64(n);
    let predicted_l = l_value(t.matrix(), precision)?;
    let predicted_rate = predicted_l.div_u64(n);

    let constant_modulus = sol_re[1].exp();
    let phase_turns = {
        let t = sol_im[0].div(&two_pi);
        t.sub(&BigReal::from_bigint(&t.floor_bigint(), wp))
    };

    let mut residuals = Vec::with_capacity(h_grid.len());
    for (i, h) in h_grid.iter().enumerate() {
        let h = h.add(&BigReal::zero(wp));
        let model_re = sol_re[0]
            .div(&h.mul_u64(n))
            .add(&sol_re[1])
            .add(&sol_re[2].mul(&h));
        let model_im = sol_im[0].add(&sol_im[1].mul(&h));
        let diff = BigComplex::new(logs[i].re.sub(&model_re), logs[i].im.sub(&model_im));
        residuals.push(diff.abs());
    }

    Ok(AsymReport {
        root_numerator: a,
        root_denominator: n,
        grid: h_grid.to_vec(),
        values,
        fitted_l,
        fitted_rate,
        predicted_l,
        predicted_rate,
        constant_modulus,
        constant_phase_turns: phase_turns,
        residuals,
    })
}

/// The embedding index `j` whose evaluation of the Andrews-Gordon
/// cyclotomic orbit matches the distinguished Nahm solution componentwise
/// within `2^{-precision/2}`. The match is settled empirically; indices
/// come in `±j` pairs and the smallest is returned.
pub fn match_root(n: u64, precision: u32) -> Result<EmbeddingIndex, NahmError> {
    let (triple, xs) = ag_data(n)?;
    let solved = solve_nahm(triple.matrix(), precision)?;
    let wp = precision as usize + GUARD;
    let tol_exp = -(precision as i64) / 2;
    for j in 1..n {
        if gcd(j, n) != 1 {
            continue;
        }
        let mut all = true;
        for (x, target) in xs.iter().zip(&solved) {
            let v = x.complex_embed(EmbeddingIndex(j), precision);
            let dist = v.sub(&BigComplex::from_real(target.add(&BigReal::zero(wp)))).abs();
            if dist.exponent().unwrap_or(i64::MIN) >= tol_exp {
                all = false;
                break;
            }
        }
        if all {
            return Ok(EmbeddingIndex(j));
        }
    }
    Err(NahmError::NoMatch)
}
