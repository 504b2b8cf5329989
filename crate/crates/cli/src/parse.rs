//! Parsers for the small input languages of the CLI: formal sums, field
//! elements, cyclotomic coefficient vectors, Nahm triples, complex values,
//! and grids.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use dilog_units_core::bloch::{FormalSum, ProjPoint};
use dilog_units_core::ff::{Fq2Elem, LocalContext};
use dilog_units_core::nahm::{BigComplex, BigReal, NahmTriple};
use dilog_units_core::CycPoly;

pub type ParseResult<T> = Result<T, String>;

/// A point of `P¹(F_q)`: a residue or `inf`.
pub fn parse_point(s: &str, ctx: &LocalContext) -> ParseResult<ProjPoint> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(ProjPoint::Infinity);
    }
    let v: u64 = s.parse().map_err(|_| format!("bad point '{s}'"))?;
    Ok(ProjPoint::Finite(ctx.fq(v)))
}

/// A formal sum: comma-separated terms `mult*point` or bare `point`
/// (multiplicity 1), e.g. `2*1,-1*3,inf`.
pub fn parse_formal_sum(s: &str, ctx: &LocalContext) -> ParseResult<FormalSum> {
    let mut sum = FormalSum::new();
    for term in s.split(',') {
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        let (mult, point) = match term.split_once('*') {
            Some((m, p)) => {
                let m: i64 = m
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad multiplicity in '{term}'"))?;
                (m, p)
            }
            None => (1, term),
        };
        sum.add_term(parse_point(point, ctx)?, mult);
    }
    Ok(sum)
}

/// An element of `F_{q²}`: `a` or `a,b` meaning `a + b·t`.
pub fn parse_fq2(s: &str, ctx: &LocalContext) -> ParseResult<Fq2Elem> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse_u64 = |t: &str| -> ParseResult<u64> {
        t.parse().map_err(|_| format!("bad residue '{t}'"))
    };
    match parts.as_slice() {
        [a] => Ok(ctx.fq2(parse_u64(a)?, 0)),
        [a, b] => Ok(ctx.fq2(parse_u64(a)?, parse_u64(b)?)),
        _ => Err(format!("bad F_q² element '{s}'")),
    }
}

/// Exact rational: `p`, `-p`, or `p/q`.
pub fn parse_rational(s: &str) -> ParseResult<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| format!("bad rational '{s}'"))?;
            let q: BigInt = q.trim().parse().map_err(|_| format!("bad rational '{s}'"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in '{s}'"));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| format!("bad rational '{s}'"))?;
            Ok(BigRational::from(p))
        }
    }
}

/// A cyclotomic element as comma-separated rational coefficients of
/// ascending powers of ζ, e.g. `2,-1,0,0,-1` for `2 - ζ - ζ⁴`.
pub fn parse_cyc(s: &str, n: u64) -> ParseResult<CycPoly> {
    let coeffs: ParseResult<Vec<BigRational>> = s.split(',').map(parse_rational).collect();
    Ok(CycPoly::new(n, coeffs?))
}

/// A Nahm triple `A|B|C` with `A` rows separated by `;` and entries by `,`;
/// `B` and `C` may be omitted (zero). Example: `2,2;2,4|0,0|0`.
pub fn parse_triple(s: &str) -> ParseResult<NahmTriple> {
    let mut parts = s.split('|');
    let a_str = parts.next().ok_or("empty matrix")?;
    let a: ParseResult<Vec<Vec<BigRational>>> = a_str
        .split(';')
        .map(|row| row.split(',').map(parse_rational).collect())
        .collect();
    let a = a?;
    let r = a.len();
    let b = match parts.next() {
        Some(bs) if !bs.trim().is_empty() => {
            let b: ParseResult<Vec<BigRational>> = bs.split(',').map(parse_rational).collect();
            b?
        }
        _ => vec![BigRational::zero(); r],
    };
    if b.len() != r {
        return Err(format!("B has {} entries for a rank-{} matrix", b.len(), r));
    }
    let c = match parts.next() {
        Some(cs) if !cs.trim().is_empty() => parse_rational(cs)?,
        _ => BigRational::zero(),
    };
    NahmTriple::new(a, b, c).map_err(|e| e.to_string())
}

/// A complex value `re` or `re,im` in decimal notation.
pub fn parse_complex(s: &str, prec: usize) -> ParseResult<BigComplex> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let real = |t: &str| {
        BigReal::parse_dec(t, prec).ok_or_else(|| format!("bad decimal '{t}'"))
    };
    match parts.as_slice() {
        [re] => Ok(BigComplex::from_real(real(re)?)),
        [re, im] => Ok(BigComplex::new(real(re)?, real(im)?)),
        _ => Err(format!("bad complex value '{s}'")),
    }
}

/// A descending grid of positive decimals, e.g. `0.3,0.2,0.1`.
pub fn parse_grid(s: &str, prec: usize) -> ParseResult<Vec<BigReal>> {
    s.split(',')
        .map(|t| {
            BigReal::parse_dec(t.trim(), prec).ok_or_else(|| format!("bad grid value '{t}'"))
        })
        .collect()
}
