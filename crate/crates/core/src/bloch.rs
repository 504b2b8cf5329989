//! Formal Bloch-group elements over `P¹(F_q)`, the five-term relation, and
//! the presentation of `B(F_q) ⊗ Z/nZ` by normal-form linear algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::ff::{FqElem, LocalContext};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlochError {
    #[error("five-term entry hits an indeterminate 0/0 or ∞/∞")]
    IndeterminateForm,
    #[error("q={0} exceeds the configured enumeration bound and sampling is disabled")]
    ResourceLimit(u64),
    #[error("formal sum contains a point outside the presentation index")]
    UnknownPoint,
}

/// A point of `P¹(F_q) = F_q ∪ {∞}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjPoint {
    Finite(FqElem),
    Infinity,
}

impl ProjPoint {
    pub fn finite(v: FqElem) -> Self {
        ProjPoint::Finite(v)
    }

    pub fn is_degenerate(&self, ctx: &LocalContext) -> bool {
        match self {
            ProjPoint::Infinity => true,
            ProjPoint::Finite(v) => v.is_zero() || *v == ctx.fq(1),
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(v) => write!(f, "{v}"),
            ProjPoint::Infinity => write!(f, "∞"),
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(v) => write!(f, "{v}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// A finite integer combination of points of `P¹`; no zero multiplicities
/// are stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FormalSum(BTreeMap<ProjPoint, i64>);

impl FormalSum {
    pub fn new() -> Self {
        FormalSum(BTreeMap::new())
    }

    pub fn singleton(p: ProjPoint) -> Self {
        let mut s = FormalSum::new();
        s.add_term(p, 1);
        s
    }

    pub fn add_term(&mut self, p: ProjPoint, mult: i64) {
        if mult == 0 {
            return;
        }
        let e = self.0.entry(p.clone()).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.0.remove(&p);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (p, m) in rhs.iter() {
            out.add_term(p.clone(), m);
        }
        out
    }

    pub fn neg(&self) -> Self {
        FormalSum(self.0.iter().map(|(p, m)| (p.clone(), -m)).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return FormalSum::new();
        }
        FormalSum(self.0.iter().map(|(p, m)| (p.clone(), m * k)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProjPoint, i64)> {
        self.0.iter().map(|(p, &m)| (p, m))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn multiplicity(&self, p: &ProjPoint) -> i64 {
        self.0.get(p).copied().unwrap_or(0)
    }
}

impl fmt::Debug for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, m) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{m:+}[{p:?}]")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// ---- P¹ arithmetic ----

/// `x / y` in `P¹(F_q)`; indeterminate for 0/0 and ∞/∞.
pub fn p1_div(x: &ProjPoint, y: &ProjPoint, ctx: &LocalContext) -> Result<ProjPoint, BlochError> {
    use ProjPoint::*;
    match (x, y) {
        (Infinity, Infinity) => Err(BlochError::IndeterminateForm),
        (Finite(a), Finite(b)) if a.is_zero() && b.is_zero() => {
            Err(BlochError::IndeterminateForm)
        }
        (Infinity, Finite(_)) => Ok(Infinity),
        (Finite(a), Infinity) => {
            let _ = a;
            Ok(Finite(ctx.fq(0)))
        }
        (Finite(a), Finite(b)) => {
            if b.is_zero() {
                Ok(Infinity)
            } else {
                Ok(Finite(ctx.mul(a, &ctx.inv(b).expect("nonzero"))))
            }
        }
    }
}

/// `1 - x` in `P¹(F_q)` (fixes ∞).
pub fn p1_one_minus(x: &ProjPoint, ctx: &LocalContext) -> ProjPoint {
    match x {
        ProjPoint::Infinity => ProjPoint::Infinity,
        ProjPoint::Finite(v) => ProjPoint::Finite(ctx.sub(&ctx.fq(1), v)),
    }
}

/// `1 - 1/x` in `P¹(F_q)`.
pub fn p1_one_minus_inv(x: &ProjPoint, ctx: &LocalContext) -> ProjPoint {
    match x {
        ProjPoint::Infinity => ProjPoint::Finite(ctx.fq(1)),
        ProjPoint::Finite(v) if v.is_zero() => ProjPoint::Infinity,
        ProjPoint::Finite(v) => {
            let inv = ctx.inv(v).expect("nonzero");
            ProjPoint::Finite(ctx.sub(&ctx.fq(1), &inv))
        }
    }
}

/// The five-term element
/// `[X] - [Y] + [Y/X] - [(1-X⁻¹)/(1-Y⁻¹)] + [(1-X)/(1-Y)]`,
/// defined whenever no entry hits an indeterminate quotient.
pub fn five_term_element(
    x: &ProjPoint,
    y: &ProjPoint,
    ctx: &LocalContext,
) -> Result<FormalSum, BlochError> {
    let e3 = p1_div(y, x, ctx)?;
    let e4 = p1_div(&p1_one_minus_inv(x, ctx), &p1_one_minus_inv(y, ctx), ctx)?;
    let e5 = p1_div(&p1_one_minus(x, ctx), &p1_one_minus(y, ctx), ctx)?;
    let mut sum = FormalSum::new();
    sum.add_term(x.clone(), 1);
    sum.add_term(y.clone(), -1);
    sum.add_term(e3, 1);
    sum.add_term(e4, -1);
    sum.add_term(e5, 1);
    Ok(sum)
}

/// The explicit order-`n` element
/// `Σ_{ℓ=1}^{n-1} [((ζ̄^ℓ - ζ̄^{-ℓ})/(ζ̄ - ζ̄^{-1}))²]`;
/// every entry lands in `F_q`.
pub fn eta_element(ctx: &LocalContext) -> FormalSum {
    let den = ctx.sub2(ctx.zeta(), &ctx.zeta_pow(-1));
    let den_inv = ctx.inv2(&den).expect("ζ̄ ≠ ζ̄^{-1} for n odd");
    let mut sum = FormalSum::new();
    for l in 1..ctx.n() {
        let num = ctx.sub2(&ctx.zeta_pow(l as i64), &ctx.zeta_pow(-(l as i64)));
        let u = ctx.mul2(&num, &den_inv);
        let sq = ctx.mul2(&u, &u);
        debug_assert!(sq.is_base(), "eta entries lie in F_q");
        sum.add_term(ProjPoint::Finite(sq.a), 1);
    }
    sum
}

/// The Chebyshev-recurrence variant `Σ_{k=1}^{n-1} [1 - 1/F_k(s)²]` with
/// `s = ζ̄ + ζ̄^{-1}` and `F_0 = 0, F_1 = 1, F_{k+1} = s·F_k - F_{k-1}`.
pub fn chebyshev_element(ctx: &LocalContext) -> FormalSum {
    let s2 = ctx.add2(ctx.zeta(), &ctx.zeta_pow(-1));
    debug_assert!(s2.is_base());
    let s = s2.a;
    let one = ctx.fq(1);
    let mut f_prev = ctx.fq(0);
    let mut f_cur = one.clone();
    let mut sum = FormalSum::new();
    for _k in 1..ctx.n() {
        debug_assert!(!f_cur.is_zero(), "F_k(s) ≠ 0 for 1 ≤ k ≤ n-1");
        let sq = ctx.mul(&f_cur, &f_cur);
        let entry = ctx.sub(&one, &ctx.inv(&sq).expect("nonzero"));
        sum.add_term(ProjPoint::Finite(entry), 1);
        let next = ctx.sub(&ctx.mul(&s, &f_cur), &f_prev);
        f_prev = f_cur;
        f_cur = next;
    }
    sum
}

// ---- presentation ----

/// Options for [`group_presentation_with`].
#[derive(Clone, Debug)]
pub struct PresentationConfig {
    /// Full `(q+1)²` relation enumeration is used for `q` up to this bound.
    pub max_enumeration_q: u64,
    /// Number of random pairs sampled beyond the bound; `0` disables the
    /// sampled path, making larger `q` a [`BlochError::ResourceLimit`].
    pub sample_size: usize,
    /// Seed for the sampling generator.
    pub seed: u64,
}

impl Default for PresentationConfig {
    fn default() -> Self {
        PresentationConfig {
            max_enumeration_q: 200,
            sample_size: 20_000,
            seed: 0,
        }
    }
}

/// The quotient of the free `Z/nZ`-module on `P¹(F_q)` by `[0]`, `[1]`,
/// `[∞]` and the evaluable five-term relations, as invariant factors plus
/// projection data.
#[derive(Clone, Debug)]
pub struct Presentation {
    q: u64,
    n: u64,
    /// Invariant factors in descending divisibility order
    /// (`factors[i+1]` divides `factors[i]`).
    invariant_factors: Vec<u64>,
    /// Per kept coordinate: the modulus `d_j` and the column of the SNF
    /// right transform reduced mod `n`.
    projection: Vec<(u64, Vec<u64>)>,
    /// Coordinates of the distinguished generator (the eta element).
    eta_coords: Vec<u64>,
    /// Whether the relation set was sampled rather than enumerated.
    sampled: bool,
}

impl Presentation {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn eta_coordinates(&self) -> &[u64] {
        &self.eta_coords
    }

    pub fn sampled(&self) -> bool {
        self.sampled
    }

    /// Index of a point in the canonical ordering `0, 1, …, q-1, ∞`.
    fn point_index(&self, p: &ProjPoint) -> Result<usize, BlochError> {
        match p {
            ProjPoint::Infinity => Ok(self.q as usize),
            ProjPoint::Finite(v) => {
                let idx = v.to_u64();
                if idx < self.q {
                    Ok(idx as usize)
                } else {
                    Err(BlochError::UnknownPoint)
                }
            }
        }
    }

    /// Coordinates of a formal sum in `⊕ Z/d_jZ`.
    pub fn project(&self, xi: &FormalSum) -> Result<Vec<u64>, BlochError> {
        let cols = self.q as usize + 1;
        let mut vec = vec![0i64; cols];
        for (p, m) in xi.iter() {
            vec[self.point_index(p)?] += m;
        }
        let mut out = Vec::with_capacity(self.projection.len());
        for (d, col) in &self.projection {
            let mut acc: i128 = 0;
            for (i, &c) in col.iter().enumerate() {
                acc += vec[i] as i128 * c as i128;
            }
            out.push(acc.rem_euclid(*d as i128) as u64);
        }
        Ok(out)
    }
}

/// [`group_presentation_with`] under the default configuration.
pub fn group_presentation(ctx: &LocalContext) -> Result<Presentation, BlochError> {
    group_presentation_with(ctx, &PresentationConfig::default())
}

pub fn group_presentation_with(
    ctx: &LocalContext,
    config: &PresentationConfig,
) -> Result<Presentation, BlochError> {
    let q = ctx.q();
    let n = ctx.n();
    let cols = q as usize + 1;
    let mut ech = Echelon::new(n, cols);

    // Degenerate generators [0], [1], [∞].
    for idx in [0usize, 1, q as usize] {
        let mut row = vec![0u64; cols];
        row[idx] = 1;
        ech.insert(row);
    }

    let points: Vec<ProjPoint> = (0..q)
        .map(|v| ProjPoint::Finite(ctx.fq(v)))
        .chain(std::iter::once(ProjPoint::Infinity))
        .collect();

    let sampled = q > config.max_enumeration_q;
    if sampled && config.sample_size == 0 {
        return Err(BlochError::ResourceLimit(q));
    }
    let push_pair = |ech: &mut Echelon, x: &ProjPoint, y: &ProjPoint| {
        if let Ok(rel) = five_term_element(x, y, ctx) {
            let mut row = vec![0i64; cols];
            for (p, m) in rel.iter() {
                let idx = match p {
                    ProjPoint::Infinity => q as usize,
                    ProjPoint::Finite(v) => v.to_u64() as usize,
                };
                row[idx] += m;
            }
            let row_mod: Vec<u64> = row
                .iter()
                .map(|&v| v.rem_euclid(n as i64) as u64)
                .collect();
            ech.insert(row_mod);
        }
    };

    if !sampled {
        for x in &points {
            for y in &points {
                push_pair(&mut ech, x, y);
            }
        }
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        for _ in 0..config.sample_size {
            let xi = rng.gen_range(0..cols);
            let yi = rng.gen_range(0..cols);
            push_pair(&mut ech, &points[xi], &points[yi]);
        }
    }

    // Stack the echelon basis with n·I and go to Smith normal form over Z.
    let mut stacked: Vec<Vec<BigInt>> = ech
        .rows()
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    for i in 0..cols {
        let mut row = vec![BigInt::zero(); cols];
        row[i] = BigInt::from(n);
        stacked.push(row);
    }
    let (diag, v) = smith_with_right_transform(stacked, cols);

    let mut projection = Vec::new();
    let mut factors = Vec::new();
    for (j, d) in diag.iter().enumerate() {
        let d = d.magnitude().to_u64_digits();
        let d = if d.is_empty() { 0 } else { d[0] };
        debug_assert!(d != 0, "quotient lattice has full rank");
        if d > 1 {
            factors.push(d);
            let col: Vec<u64> = (0..cols)
                .map(|i| {
                    let r = v[i][j].mod_floor(&BigInt::from(n));
                    r.magnitude().to_u64_digits().first().copied().unwrap_or(0)
                })
                .collect();
            projection.push((d, col));
        }
    }
    // Descending divisibility order (largest factor first).
    factors.sort_unstable_by(|a, b| b.cmp(a));
    projection.sort_by_key(|p| std::cmp::Reverse(p.0));

    let mut pres = Presentation {
        q,
        n,
        invariant_factors: factors,
        projection,
        eta_coords: Vec::new(),
        sampled,
    };
    // Normalize onto the distinguished generator: rescale coordinates so
    // the eta element projects to 1 wherever its coordinate is a unit,
    // making reports comparable across primes.
    let raw_eta = pres.project(&eta_element(ctx))?;
    for (j, &e) in raw_eta.iter().enumerate() {
        let d = pres.projection[j].0;
        if e != 0 && gcd_u64(e, d) == 1 {
            let inv = mod_inv_u64(e, d);
            for v in pres.projection[j].1.iter_mut() {
                *v = ((*v as u128 * inv as u128) % d as u128) as u64;
            }
        }
    }
    pres.eta_coords = pres.project(&eta_element(ctx))?;
    Ok(pres)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn mod_inv_u64(a: u64, m: u64) -> u64 {
    let (g, s, _) = ext_gcd(a as i128, m as i128);
    debug_assert_eq!(g, 1);
    s.rem_euclid(m as i128) as u64
}

/// Row-echelon accumulator mod `n` using unimodular two-row gcd transforms;
/// keeps at most one row per pivot column, preserving the row span.
struct Echelon {
    n: u64,
    cols: usize,
    /// `pivot_rows[j]` is the row with leading column `j`, if any.
    pivot_rows: Vec<Option<Vec<u64>>>,
}

impl Echelon {
    fn new(n: u64, cols: usize) -> Self {
        Echelon {
            n,
            cols,
            pivot_rows: vec![None; cols],
        }
    }

    fn insert(&mut self, mut row: Vec<u64>) {
        let n = self.n as i128;
        let mut col = 0;
        while col < self.cols {
            if row[col] % self.n == 0 {
                col += 1;
                continue;
            }
            match &mut self.pivot_rows[col] {
                None => {
                    self.pivot_rows[col] = Some(row);
                    return;
                }
                Some(h) => {
                    let a = h[col] as i128;
                    let b = row[col] as i128;
                    let (g, s, t) = ext_gcd(a, b);
                    let (af, bf) = (a / g, b / g);
                    for i in col..self.cols {
                        let hi = h[i] as i128;
                        let ri = row[i] as i128;
                        let new_h = (s * hi + t * ri).rem_euclid(n) as u64;
                        let new_r = (af * ri - bf * hi).rem_euclid(n) as u64;
                        h[i] = new_h;
                        row[i] = new_r;
                    }
                    debug_assert_eq!(row[col] % self.n, 0);
                }
            }
        }
    }

    fn rows(&self) -> Vec<Vec<u64>> {
        self.pivot_rows.iter().flatten().cloned().collect()
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Smith normal form with tracking of the right transform `V`
/// (`U·M·V = diag`); returns the diagonal and `V`.
fn smith_with_right_transform(
    mut m: Vec<Vec<BigInt>>,
    cols: usize,
) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let rows = m.len();
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect();

    let rank = rows.min(cols);
    for t in 0..rank {
        'outer: loop {
            // Find the submatrix entry of minimal nonzero magnitude.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    match &best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if m[i][j].abs() < m[*bi][*bj].abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            let (bi, bj) = match best {
                None => break 'outer,
                Some(p) => p,
            };
            m.swap(t, bi);
            if bj != t {
                for row in m.iter_mut() {
                    row.swap(t, bj);
                }
                for row in v.iter_mut() {
                    row.swap(t, bj);
                }
            }

            let mut clean = true;
            // Clear the pivot column.
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let quo = m[i][t].div_floor(&m[t][t]);
                if !quo.is_zero() {
                    for j in t..cols {
                        let s = &quo * &m[t][j];
                        m[i][j] -= s;
                    }
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            // Clear the pivot row (column ops, applied to V too).
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let quo = m[t][j].div_floor(&m[t][t]);
                if !quo.is_zero() {
                    for i in 0..rows {
                        let s = &quo * &m[i][t];
                        m[i][j] -= s;
                    }
                    for i in 0..cols {
                        let s = &quo * &v[i][t];
                        v[i][j] -= s;
                    }
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let piv = m[t][t].clone();
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&m[i][j] % &piv).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    // Add the offending row to the pivot row and redo.
                    for j in t..cols {
                        let s = m[i][j].clone();
                        m[t][j] += s;
                    }
                }
                None => break 'outer,
            }
        }
        if m[t][t].is_negative() {
            for j in t..cols {
                m[t][j] = -m[t][j].clone();
            }
        }
    }
    let diag = (0..cols.min(rows)).map(|t| m[t][t].clone()).collect();
    (diag, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx195() -> LocalContext {
        LocalContext::build(19, 5).unwrap()
    }

    #[test]
    fn five_term_example_f19() {
        // Independent residue arithmetic: 2⁻¹ = 10, 3⁻¹ = 13 mod 19,
        // Y/X = 11, (1-10)/(1-13) = 15, (-1)/(-2) = 10.
        let ctx = ctx195();
        let x = ProjPoint::Finite(ctx.fq(2));
        let y = ProjPoint::Finite(ctx.fq(3));
        let ft = five_term_element(&x, &y, &ctx).unwrap();
        let expect: Vec<(u64, i64)> = vec![(2, 1), (3, -1), (10, 1), (11, 1), (15, -1)];
        let got: Vec<(u64, i64)> = ft
            .iter()
            .map(|(p, m)| match p {
                ProjPoint::Finite(v) => (v.to_u64(), m),
                ProjPoint::Infinity => panic!("unexpected ∞"),
            })
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn five_term_indeterminate() {
        let ctx = ctx195();
        let zero = ProjPoint::Finite(ctx.fq(0));
        assert_eq!(
            five_term_element(&zero, &zero, &ctx).unwrap_err(),
            BlochError::IndeterminateForm
        );
        let inf = ProjPoint::Infinity;
        assert_eq!(
            five_term_element(&inf, &inf, &ctx).unwrap_err(),
            BlochError::IndeterminateForm
        );
    }

    #[test]
    fn formal_sum_cancellation() {
        let ctx = ctx195();
        let p = ProjPoint::Finite(ctx.fq(7));
        let mut s = FormalSum::singleton(p.clone());
        s.add_term(p.clone(), -1);
        assert!(s.is_empty());
        s.add_term(p.clone(), 3);
        assert_eq!(s.multiplicity(&p), 3);
        assert_eq!(s.neg().multiplicity(&p), -3);
    }

    #[test]
    fn eta_support_19_5() {
        // Frozen from the brute-force oracle: {[1]: 2, [6]: 2}.
        let ctx = ctx195();
        let eta = eta_element(&ctx);
        assert_eq!(eta.support_len(), 2);
        assert_eq!(eta.multiplicity(&ProjPoint::Finite(ctx.fq(1))), 2);
        assert_eq!(eta.multiplicity(&ProjPoint::Finite(ctx.fq(6))), 2);
    }

    #[test]
    fn chebyshev_support_19_5() {
        // Frozen from the recurrence oracle: {[0]: 2, [4]: 2}.
        let ctx = ctx195();
        let cheb = chebyshev_element(&ctx);
        assert_eq!(cheb.support_len(), 2);
        assert_eq!(cheb.multiplicity(&ProjPoint::Finite(ctx.fq(0))), 2);
        assert_eq!(cheb.multiplicity(&ProjPoint::Finite(ctx.fq(4))), 2);
    }

    #[test]
    fn eta_entries_pair_up() {
        for (q, n) in [(19u64, 5u64), (13, 7), (43, 11)] {
            let ctx = LocalContext::build(q, n).unwrap();
            let eta = eta_element(&ctx);
            // ℓ = 1 contributes [1]; ℓ ↔ n-ℓ symmetry gives even multiplicities.
            assert!(eta.multiplicity(&ProjPoint::Finite(ctx.fq(1))) >= 1);
            for (_, m) in eta.iter() {
                assert_eq!(m % 2, 0);
            }
        }
    }

    #[test]
    fn presentation_19_5() {
        let ctx = ctx195();
        let pres = group_presentation(&ctx).unwrap();
        assert_eq!(pres.invariant_factors(), &[5]);
        assert!(!pres.sampled());
        // Every five-term relation projects to zero.
        let pts: Vec<ProjPoint> = (0..19)
            .map(|v| ProjPoint::Finite(ctx.fq(v)))
            .chain([ProjPoint::Infinity])
            .collect();
        for x in &pts {
            for y in &pts {
                if let Ok(rel) = five_term_element(x, y, &ctx) {
                    let coords = pres.project(&rel).unwrap();
                    assert!(coords.iter().all(|&c| c == 0), "nonzero at {x:?},{y:?}");
                }
            }
        }
        // Degenerate class.
        let zero = FormalSum::singleton(ProjPoint::Finite(ctx.fq(0)));
        assert_eq!(pres.project(&zero).unwrap(), vec![0]);
        // The eta element is the distinguished generator: after
        // normalization its coordinate is exactly 1.
        assert_eq!(pres.eta_coordinates(), &[1]);
    }

    #[test]
    fn presentation_13_7() {
        let ctx = LocalContext::build(13, 7).unwrap();
        let pres = group_presentation(&ctx).unwrap();
        assert_eq!(pres.invariant_factors(), &[7]);
    }

    #[test]
    fn inversion_identities_in_quotient() {
        // project([X] + [1/X]) = 0 and project([X] + [1-X]) = 0
        // for all X ∉ {0, 1, ∞}.
        let ctx = ctx195();
        let pres = group_presentation(&ctx).unwrap();
        for v in 2..19u64 {
            let x = ctx.fq(v);
            let inv = ctx.inv(&x).unwrap();
            let mut s = FormalSum::singleton(ProjPoint::Finite(x.clone()));
            s.add_term(ProjPoint::Finite(inv), 1);
            assert!(pres.project(&s).unwrap().iter().all(|&c| c == 0));
            let omx = ctx.sub(&ctx.fq(1), &x);
            let mut s = FormalSum::singleton(ProjPoint::Finite(x));
            s.add_term(ProjPoint::Finite(omx), 1);
            assert!(pres.project(&s).unwrap().iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn chebyshev_and_eta_project_equal() {
        for (q, n) in [(19u64, 5u64), (13, 7)] {
            let ctx = LocalContext::build(q, n).unwrap();
            let pres = group_presentation(&ctx).unwrap();
            let a = pres.project(&eta_element(&ctx)).unwrap();
            let b = pres.project(&chebyshev_element(&ctx)).unwrap();
            assert_eq!(a, b, "q={q} n={n}");
        }
    }

    #[test]
    fn resource_limit_when_sampling_disabled() {
        let ctx = LocalContext::build(229, 5).unwrap();
        let config = PresentationConfig {
            sample_size: 0,
            ..Default::default()
        };
        assert_eq!(
            group_presentation_with(&ctx, &config).unwrap_err(),
            BlochError::ResourceLimit(229)
        );
    }

    #[test]
    fn unknown_point_rejected() {
        let ctx = ctx195();
        let pres = group_presentation(&ctx).unwrap();
        let other = LocalContext::build(29, 5).unwrap();
        let bad = FormalSum::singleton(ProjPoint::Finite(other.fq(25)));
        assert_eq!(pres.project(&bad).unwrap_err(), BlochError::UnknownPoint);
    }
}
