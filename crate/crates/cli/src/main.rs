//! `dilog-units`: finite Bloch groups, cyclic quantum dilogarithm unit
//! classes, exact cyclotomic identities, and Nahm-sum analytics from the
//! command line.
//!
//! Every subcommand mirrors exactly one library operation and emits a
//! single JSON document on stdout (or a key/value table with
//! `--format table`). Exit codes: 0 success, 1 a verification failed
//! (`holds = false`), 2 usage error, 3 resource/convergence error.

mod cache;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dilog_units_core::bloch::{self, ProjPoint};
use dilog_units_core::cyclotomic;
use dilog_units_core::ff::LocalContext;
use dilog_units_core::nahm::{self, BigReal, NahmError};
use dilog_units_core::{qdilog, CycPoly};

use cache::PrimeCache;
use output::*;

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Parser)]
#[command(name = "dilog-units", version, about = "Bloch groups, dilogarithm unit classes, and Nahm sums at desk scale")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Base prime q of the local context.
    #[arg(long, global = true)]
    q: Option<u64>,

    /// Root-of-unity order n.
    #[arg(long, global = true)]
    n: Option<u64>,

    /// Number of probe primes.
    #[arg(long, global = true)]
    primes: Option<usize>,

    /// Series truncation order.
    #[arg(long, global = true)]
    order: Option<i64>,

    /// Comma-separated descending decimals for the radial grid.
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Working precision in bits (≥ 64).
    #[arg(long, global = true, default_value_t = 192)]
    precision: u32,

    /// Seed for randomized relation sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Prime cache path (falls back to DILOG_UNITS_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker count for per-prime sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    parallelism: usize,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Lower bound for prime searches.
    #[arg(long = "q-min", global = true, default_value_t = 3)]
    q_min: u64,

    /// Numerator a of the radial root e^{2πia/n}.
    #[arg(long, global = true, default_value_t = 0)]
    a: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Finite Bloch group B(F_q) ⊗ Z/nZ.
    Bfq {
        #[command(subcommand)]
        sub: BfqCmd,
    },
    /// Cyclic quantum dilogarithm and unit classes.
    Qd {
        #[command(subcommand)]
        sub: QdCmd,
    },
    /// Exact cyclotomic arithmetic.
    Cyclo {
        #[command(subcommand)]
        sub: CycloCmd,
    },
    /// Nahm sums, dilogarithms, and radial asymptotics.
    Nahm {
        #[command(subcommand)]
        sub: NahmCmd,
    },
    /// Context-compatible prime search.
    Primes {
        #[command(subcommand)]
        sub: PrimesCmd,
    },
}

#[derive(Subcommand)]
enum BfqCmd {
    /// Invariant factors and projection data of the presentation.
    Group,
    /// Project a formal sum (terms `mult*point`, point = residue or `inf`).
    Project { sum: String },
    /// The distinguished order-n element.
    Eta,
}

#[derive(Subcommand)]
enum QdCmd {
    /// Cyclic quantum dilogarithm of an F_q² element (`a` or `a,b`).
    Dilog { x: String },
    /// Unit class of a formal sum.
    Pclass { sum: String },
    /// The mod-p-q dilogarithm on all of P¹(F_q).
    ModpqTable,
    /// Exact five-term identity check at (X, Y).
    Kms { x: u64, y: u64 },
    /// Compatibility checks: `power X k` or `divisor X r`.
    Compat {
        mode: String,
        x: u64,
        arg: u64,
    },
    /// Eta unit value over one context (--q) or several probe primes.
    EtaCheck,
}

#[derive(Subcommand)]
enum CycloCmd {
    /// Coefficients of the n-th cyclotomic polynomial.
    Phi,
    /// Exact evaluation of the squared dilogarithm product at 1.
    D1Check,
    /// Reduce a cyclotomic element (rational coefficients) into F_q².
    Reduce { element: String },
}

#[derive(Subcommand)]
enum NahmCmd {
    /// Distinguished solution of the Nahm equation (triple `A|B|C`).
    Solve { triple: String },
    /// Rogers dilogarithm sum over the distinguished solution.
    Lvalue { triple: String },
    /// Evaluate the Nahm sum at complex q (`re` or `re,im`).
    Sum { triple: String, at: String },
    /// Exact q-expansion coefficients through --order.
    Series { triple: String },
    /// Andrews-Gordon identity check at order n through --order.
    Ag,
    /// Radial asymptotics at e^{2πia/n} over --grid.
    Radial { triple: String },
    /// Embedding index matching the distinguished solution.
    MatchRoot,
    /// Torsion probe over cyclotomic entries (`;`-separated coefficient
    /// lists, or the shorthands `@eta` / `@ag`).
    Torsion { entries: String },
}

#[derive(Subcommand)]
enum PrimesCmd {
    /// The --primes smallest valid primes ≥ --q-min.
    Find,
}

enum AppError {
    Usage(String),
    Resource(String),
}

impl AppError {
    fn usage(e: impl ToString) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<String> for AppError {
    fn from(s: String) -> Self {
        AppError::Usage(s)
    }
}

impl From<dilog_units_core::ff::FfError> for AppError {
    fn from(e: dilog_units_core::ff::FfError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<dilog_units_core::cyclotomic::CycError> for AppError {
    fn from(e: dilog_units_core::cyclotomic::CycError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<dilog_units_core::bloch::BlochError> for AppError {
    fn from(e: dilog_units_core::bloch::BlochError) -> Self {
        match e {
            bloch::BlochError::ResourceLimit(_) => AppError::Resource(e.to_string()),
            _ => AppError::Usage(e.to_string()),
        }
    }
}

impl From<dilog_units_core::qdilog::QdilogError> for AppError {
    fn from(e: dilog_units_core::qdilog::QdilogError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<NahmError> for AppError {
    fn from(e: NahmError) -> Self {
        match e {
            NahmError::NotSymmetric
            | NahmError::NotPositiveDefinite
            | NahmError::InvalidOrder(_)
            | NahmError::BadEntry { .. }
            | NahmError::IllConditionedFit { .. } => AppError::Usage(e.to_string()),
            _ => AppError::Resource(e.to_string()),
        }
    }
}

impl From<dilog_units_core::primes::PrimeError> for AppError {
    fn from(e: dilog_units_core::primes::PrimeError) -> Self {
        AppError::Resource(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.precision < 64 {
        eprintln!("error: --precision must be at least 64");
        return ExitCode::from(2);
    }
    if cli.parallelism < 1 {
        eprintln!("error: --parallelism must be at least 1");
        return ExitCode::from(2);
    }
    let started = Instant::now();
    match dispatch(&cli) {
        Ok((command, inputs, result, holds)) => {
            let doc = document(&command, inputs, result, holds);
            match cli.format {
                Format::Json => println!("{doc}"),
                Format::Table => print!("{}", render_table(&doc, started.elapsed().as_millis())),
            }
            if holds == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

type Dispatched = (String, Value, Value, Option<bool>);

fn need_q(cli: &Cli) -> Result<u64, AppError> {
    cli.q.ok_or_else(|| AppError::Usage("--q is required".into()))
}

fn need_n(cli: &Cli) -> Result<u64, AppError> {
    cli.n.ok_or_else(|| AppError::Usage("--n is required".into()))
}

fn context(cli: &Cli) -> Result<LocalContext, AppError> {
    Ok(LocalContext::build(need_q(cli)?, need_n(cli)?)?)
}

fn dispatch(cli: &Cli) -> Result<Dispatched, AppError> {
    match &cli.cmd {
        Cmd::Bfq { sub } => bfq(cli, sub),
        Cmd::Qd { sub } => qd(cli, sub),
        Cmd::Cyclo { sub } => cyclo(cli, sub),
        Cmd::Nahm { sub } => nahm_cmd(cli, sub),
        Cmd::Primes { sub: PrimesCmd::Find } => {
            let n = need_n(cli)?;
            let count = cli.primes.unwrap_or(3);
            let mut cache = PrimeCache::open(cli.cache.clone());
            let primes = cache::find_local_primes(&mut cache, n, count, cli.q_min)?;
            Ok((
                "primes find".into(),
                json!({ "n": n, "count": count, "q_min": cli.q_min }),
                json!({ "primes": primes }),
                None,
            ))
        }
    }
}

fn bfq(cli: &Cli, sub: &BfqCmd) -> Result<Dispatched, AppError> {
    let ctx = context(cli)?;
    match sub {
        BfqCmd::Group => {
            let config = bloch::PresentationConfig {
                seed: cli.seed,
                ..Default::default()
            };
            let pres = bloch::group_presentation_with(&ctx, &config)?;
            Ok((
                "bfq group".into(),
                json!({ "q": ctx.q(), "n": ctx.n(), "seed": cli.seed }),
                json!({
                    "invariant_factors": pres.invariant_factors(),
                    "eta_coordinates": pres.eta_coordinates(),
                    "sampled": pres.sampled(),
                }),
                None,
            ))
        }
        BfqCmd::Project { sum } => {
            let xi = parse::parse_formal_sum(sum, &ctx)?;
            let pres = bloch::group_presentation(&ctx)?;
            let coords = pres.project(&xi)?;
            Ok((
                "bfq project".into(),
                json!({ "q": ctx.q(), "n": ctx.n(), "sum": json_formal_sum(&xi) }),
                json!({ "coordinates": coords, "invariant_factors": pres.invariant_factors() }),
                None,
            ))
        }
        BfqCmd::Eta => {
            let eta = bloch::eta_element(&ctx);
            Ok((
                "bfq eta".into(),
                json!({ "q": ctx.q(), "n": ctx.n() }),
                json!({ "element": json_formal_sum(&eta) }),
                None,
            ))
        }
    }
}

fn qd(cli: &Cli, sub: &QdCmd) -> Result<Dispatched, AppError> {
    match sub {
        QdCmd::Dilog { x } => {
            let ctx = context(cli)?;
            let xv = parse::parse_fq2(x, &ctx)?;
            let d = qdilog::cyclic_dilog(&xv, &ctx);
            Ok((
                "qd dilog".into(),
                json!({ "q": ctx.q(), "n": ctx.n(), "x": json_fq2(&xv) }),
                json!({ "value": json_fq2(&d), "is_zero": d.is_zero() }),
                None,
            ))
        }
        QdCmd::Pclass { sum } => {
            let ctx = context(cli)?;
            let xi = parse::parse_formal_sum(sum, &ctx)?;
            let class = qdilog::p_class(&xi, &ctx)?;
            Ok((
                "qd pclass".into(),
                json!({ "q": ctx.q(), "n": ctx.n(), "sum": json_formal_sum(&xi) }),
                json!({ "class": class.exponent() }),
                None,
            ))
        }
        QdCmd::ModpqTable => {
            let ctx = context(cli)?;
            let mut table = Vec::with_capacity(ctx.q() as usize + 1);
            for a in 0..ctx.q() {
                let c = qdilog::modpq_dilog(&ProjPoint::Finite(ctx.fq(a)), &ctx);
                table.push(c.exponent());
            }
            let inf = qdilog::modpq_dilog(&ProjPoint::Infinity, &ctx);
            Ok((
                "qd modpq-table".into(),
                json!({ "q": ctx.q(), "n": ctx.n() }),
                json!({ "table": table, "infinity": inf.exponent() }),
                None,
            ))
        }
        QdCmd::Kms { x, y } => {
            let ctx = context(cli)?;
            let rep = qdilog::kms_verify(&ctx.fq(*x), &ctx.fq(*y), &ctx)?;
            Ok((
                "qd kms".into(),
                json!({ "q": ctx.q(), "n": ctx.n(), "x": x, "y": y }),
                json!({ "lhs": json_fq2(&rep.lhs), "rhs": json_fq2(&rep.rhs) }),
                Some(rep.holds),
            ))
        }
        QdCmd::Compat { mode, x, arg } => {
            let ctx = context(cli)?;
            let holds = match mode.as_str() {
                "power" => qdilog::power_compat(&ctx.fq(*x), *arg, &ctx)?,
                "divisor" => qdilog::divisor_compat(&ctx.fq(*x), *arg, &ctx)?,
                other => {
                    return Err(AppError::usage(format!(
                        "compat mode must be 'power' or 'divisor', got '{other}'"
                    )))
                }
            };
            Ok((
                "qd compat".into(),
                json!({ "q": ctx.q(), "n": ctx.n(), "mode": mode, "x": x, "arg": arg }),
                json!({}),
                Some(holds),
            ))
        }
        QdCmd::EtaCheck => {
            let n = need_n(cli)?;
            let qs = match cli.q {
                Some(q) => vec![q],
                None => {
                    let mut cache = PrimeCache::open(cli.cache.clone());
                    cache::find_local_primes(&mut cache, n, cli.primes.unwrap_or(3), cli.q_min)?
                }
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.parallelism)
                .build()
                .map_err(|e| AppError::Resource(e.to_string()))?;
            let results: Result<Vec<(u64, u64, bool)>, AppError> = pool.install(|| {
                use rayon::prelude::*;
                qs.par_iter()
                    .map(|&q| {
                        let ctx = LocalContext::build(q, n)?;
                        let (class, holds) = qdilog::eta_unit_check(&ctx);
                        Ok((q, class.exponent(), holds))
                    })
                    .collect()
            });
            let results = results?;
            let all_hold = results.iter().all(|(_, _, h)| *h);
            let per_prime: Vec<Value> = results
                .iter()
                .map(|(q, class, holds)| json!({ "q": q, "class": class, "holds": holds }))
                .collect();
            Ok((
                "qd eta-check".into(),
                json!({ "n": n, "primes": qs }),
                json!({ "per_prime": per_prime }),
                Some(all_hold),
            ))
        }
    }
}

fn cyclo(cli: &Cli, sub: &CycloCmd) -> Result<Dispatched, AppError> {
    match sub {
        CycloCmd::Phi => {
            let n = need_n(cli)?;
            if n < 1 {
                return Err(AppError::usage("--n must be positive"));
            }
            let coeffs: Vec<Value> = cyclotomic::cyclotomic_poly(n)
                .iter()
                .map(json_bigint)
                .collect();
            Ok((
                "cyclo phi".into(),
                json!({ "n": n }),
                json!({ "coefficients": coeffs }),
                None,
            ))
        }
        CycloCmd::D1Check => {
            let n = need_n(cli)?;
            let (value, holds) = cyclotomic::d1_identity_check(n)?;
            let expected = cyclotomic::d1_expected_constant(n);
            Ok((
                "cyclo d1-check".into(),
                json!({ "n": n }),
                json!({
                    "value": json_cyc(&value),
                    "expected_constant": json_bigint(&expected),
                }),
                Some(holds),
            ))
        }
        CycloCmd::Reduce { element } => {
            let ctx = context(cli)?;
            let x = parse::parse_cyc(element, ctx.n())?;
            let v = x.reduce_to_local(&ctx)?;
            Ok((
                "cyclo reduce".into(),
                json!({ "q": ctx.q(), "n": ctx.n(), "element": json_cyc(&x) }),
                json!({ "value": json_fq2(&v), "in_base_field": v.is_base() }),
                None,
            ))
        }
    }
}

fn nahm_cmd(cli: &Cli, sub: &NahmCmd) -> Result<Dispatched, AppError> {
    let prec = cli.precision;
    let wp = prec as usize + 32;
    match sub {
        NahmCmd::Solve { triple } => {
            let t = parse::parse_triple(triple)?;
            let x = nahm::solve_nahm(t.matrix(), prec)?;
            let xs: Vec<Value> = x.iter().map(json_real).collect();
            Ok((
                "nahm solve".into(),
                json!({ "triple": triple, "precision": prec }),
                json!({ "solution": xs }),
                None,
            ))
        }
        NahmCmd::Lvalue { triple } => {
            let t = parse::parse_triple(triple)?;
            let l = nahm::l_value(t.matrix(), prec)?;
            Ok((
                "nahm lvalue".into(),
                json!({ "triple": triple, "precision": prec }),
                json!({ "l_value": json_real(&l) }),
                None,
            ))
        }
        NahmCmd::Sum { triple, at } => {
            let t = parse::parse_triple(triple)?;
            let q = parse::parse_complex(at, wp)?;
            let eps = BigReal::one(wp).div(&BigReal::from_u64(2, wp).powi(prec as u64));
            let v = nahm::nahm_sum(&t, &q, &eps)?;
            Ok((
                "nahm sum".into(),
                json!({ "triple": triple, "at": at, "precision": prec }),
                json!({ "value": json_complex(&v) }),
                None,
            ))
        }
        NahmCmd::Series { triple } => {
            let t = parse::parse_triple(triple)?;
            let order = cli.order.unwrap_or(20);
            let s = nahm::nahm_series(&t, order)?;
            let coeffs: Vec<Value> = s.coeffs.iter().map(json_rational).collect();
            Ok((
                "nahm series".into(),
                json!({ "triple": triple, "order": order }),
                json!({ "denominator": s.denom, "offset": s.offset, "coefficients": coeffs }),
                None,
            ))
        }
        NahmCmd::Ag => {
            let n = need_n(cli)?;
            let order = cli.order.unwrap_or(60);
            let holds = nahm::ag_check(n, order)?;
            Ok((
                "nahm ag".into(),
                json!({ "n": n, "order": order }),
                json!({}),
                Some(holds),
            ))
        }
        NahmCmd::Radial { triple } => {
            let t = parse::parse_triple(triple)?;
            let n = cli.n.unwrap_or(1);
            let grid_str = cli
                .grid
                .as_ref()
                .ok_or_else(|| AppError::usage("--grid is required"))?;
            let grid = parse::parse_grid(grid_str, wp)?;
            let rep = nahm::radial_report(&t, cli.a, n, &grid, prec)?;
            let values: Vec<Value> = rep.values.iter().map(json_complex).collect();
            let residuals: Vec<Value> = rep.residuals.iter().map(json_real).collect();
            Ok((
                "nahm radial".into(),
                json!({
                    "triple": triple,
                    "root": format!("{}/{}", rep.root_numerator, rep.root_denominator),
                    "grid": grid_str,
                    "precision": prec,
                }),
                json!({
                    "values": values,
                    "fitted_l": json_real(&rep.fitted_l),
                    "fitted_rate": json_real(&rep.fitted_rate),
                    "predicted_l": json_real(&rep.predicted_l),
                    "predicted_rate": json_real(&rep.predicted_rate),
                    "constant_modulus": json_real(&rep.constant_modulus),
                    "constant_phase_turns": json_real(&rep.constant_phase_turns),
                    "residuals": residuals,
                }),
                None,
            ))
        }
        NahmCmd::MatchRoot => {
            let n = need_n(cli)?;
            let j = nahm::match_root(n, prec)?;
            Ok((
                "nahm match-root".into(),
                json!({ "n": n, "precision": prec }),
                json!({ "embedding": j.0 }),
                None,
            ))
        }
        NahmCmd::Torsion { entries } => {
            let n = need_n(cli)?;
            let xs = torsion_entries(entries, n)?;
            let count = cli.primes.unwrap_or(5);
            let rep = nahm::torsion_probe(&xs, n, count, cli.q_min)?;
            let classes: Vec<Value> = rep
                .classes
                .iter()
                .map(|(q, c)| json!({ "q": q, "class": c.exponent() }))
                .collect();
            let skipped: Vec<Value> = rep
                .skipped
                .iter()
                .map(|(q, why)| json!({ "q": q, "reason": why }))
                .collect();
            Ok((
                "nahm torsion".into(),
                json!({ "n": n, "entries": entries, "primes": count, "q_min": cli.q_min }),
                json!({
                    "classes": classes,
                    "skipped": skipped,
                    "all_zero": rep.all_zero,
                    "constant_class": rep.constant_class,
                }),
                None,
            ))
        }
    }
}

/// Entries for the torsion probe: `;`-separated coefficient vectors, or
/// the standard orbits `@eta` (the global eta entries) and `@ag` (the
/// Andrews-Gordon solution orbit).
fn torsion_entries(spec: &str, n: u64) -> Result<Vec<CycPoly>, AppError> {
    match spec {
        "@eta" => {
            let den = CycPoly::root_power(n, 1).sub(&CycPoly::root_power(n, -1));
            let den_inv = den.inv().map_err(AppError::usage)?;
            Ok((1..n)
                .map(|l| {
                    let num = CycPoly::root_power(n, l as i64)
                        .sub(&CycPoly::root_power(n, -(l as i64)));
                    let u = num.mul(&den_inv);
                    u.mul(&u)
                })
                .collect())
        }
        "@ag" => {
            let (_, xs) = nahm::ag_data(n)?;
            Ok(xs)
        }
        other => other
            .split(';')
            .map(|part| parse::parse_cyc(part, n).map_err(AppError::Usage))
            .collect(),
    }
}
