use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use coxwalls_core::cover::{self, PermutationQuotient, DEFAULT_SIZE_CAP};
use coxwalls_core::partitions::{self, FamilySearch, GreedyConfig, PartitionFamily};
use coxwalls_core::probability::{self, LinkModel};
use coxwalls_core::rational::{self, Rational};
use coxwalls_core::{curvature, dot, morse, walls};
use coxwalls_core::{CertificateStatus, CoxeterPresentation, Exponent, TwoComplex};

#[derive(Parser)]
#[command(name = "coxwalls", version, about = "Covers, walls and orientations of Coxeter presentation complexes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Euler characteristic of the group, as an exact fraction.
    Chi(PresArgs),
    /// Whether every triple has reciprocal exponent sum at most 1.
    Dimension(PresArgs),
    /// Regular cover of the presentation complex from a permutation quotient.
    Cover(CoverArgs),
    /// Compressed cover: digons collapsed, polygon lifts identified.
    Compress(CoverArgs),
    /// Walls of the compressed cover (or of a complex file) and their pathologies.
    Walls(ComplexArgs),
    /// Random search for a wall orientation with good ascending and descending links.
    Orient(OrientArgs),
    /// Separating partition families.
    #[command(subcommand)]
    Partitions(PartitionCmd),
    /// Monte Carlo and exact failure probabilities of the link model, as CSV.
    Probe(ProbeArgs),
    /// Smallest rank at which the failure bound beats the cover degree bound, as CSV.
    Threshold(ThresholdArgs),
    /// Recursive upper bound on a multicolour Ramsey number.
    Ramsey {
        #[arg(required = true, num_args = 1..)]
        orders: Vec<u32>,
    },
    /// Curvature report for the compressed cover.
    Curvature(CurvatureArgs),
    /// Full pipeline: cover, compress, walls, orientation search, certificate.
    Certify(CertifyArgs),
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct PresSource {
    /// Uniform presentation as `r,m`; `m` may be `inf`.
    #[arg(long, value_name = "R,M")]
    uniform: Option<String>,
    /// Presentation JSON file.
    #[arg(long, value_name = "FILE")]
    presentation: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PresArgs {
    #[command(flatten)]
    source: PresSource,
}

#[derive(Args, Clone)]
struct CoverArgs {
    #[command(flatten)]
    source: PresSource,
    /// Quotient JSON file; defaults to star transpositions on r+1 points.
    #[arg(long, value_name = "FILE")]
    quotient: Option<PathBuf>,
    /// Largest group the enumeration may reach.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    cap: usize,
    /// Write the complex as JSON.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the 1-skeleton as DOT.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct ComplexSource {
    #[arg(long, value_name = "R,M")]
    uniform: Option<String>,
    #[arg(long, value_name = "FILE")]
    presentation: Option<PathBuf>,
    /// Complex JSON file, used as is.
    #[arg(long, value_name = "FILE")]
    complex: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ComplexArgs {
    #[command(flatten)]
    source: ComplexSource,
    #[arg(long, value_name = "FILE")]
    quotient: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    cap: usize,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the 1-skeleton with walls as DOT.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct OrientArgs {
    #[command(flatten)]
    complex: ComplexArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_attempts: u64,
}

#[derive(Subcommand)]
enum PartitionCmd {
    /// `k(r)`, the family size the counting argument guarantees.
    K {
        #[arg(long)]
        r: usize,
    },
    /// Sample families of k uniform partitions until one separates.
    Random {
        #[arg(long)]
        r: usize,
        /// Defaults to k(r).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_attempts: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Greedy family; random candidate pools (and so --seed) above rank 8.
    Greedy {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 2048)]
        pool: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// List the quadruples a family leaves unseparated.
    Verify { family: PathBuf },
    /// Product quotient of rank r from a family and a rank 4 quotient.
    Product {
        #[arg(long, value_name = "FILE")]
        family: PathBuf,
        #[arg(long)]
        m: u32,
        /// Rank 4 quotient; defaults to star transpositions on 5 points.
        #[arg(long, value_name = "FILE")]
        quotient: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u32>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Also enumerate exactly where the bit budget allows.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    qsize: Vec<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    cover: CoverArgs,
    #[arg(long, value_enum, default_value_t = Preset::RegularEuclidean)]
    preset: Preset,
    /// Also maximize over all regular sections at this 0-cell.
    #[arg(long)]
    brute_force_at: Option<usize>,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum Preset {
    RegularEuclidean,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: PresSource,
    #[arg(long, value_name = "FILE")]
    quotient: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    cap: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_attempts: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_uniform(s: &str) -> Result<CoxeterPresentation> {
    let (r, m) = s.split_once(',').context("expected --uniform r,m")?;
    let r: usize = r.trim().parse().context("rank is not an integer")?;
    let m = m.trim();
    if m == "inf" {
        return Ok(CoxeterPresentation::free(r)?);
    }
    let m: u32 = m.parse().context("exponent is not an integer or `inf`")?;
    Ok(CoxeterPresentation::uniform(r, m)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn presentation(uniform: &Option<String>, file: &Option<PathBuf>) -> Result<CoxeterPresentation> {
    match (uniform, file) {
        (Some(u), _) => parse_uniform(u),
        (_, Some(f)) => read_json(f),
        _ => bail!("no presentation given"),
    }
}

fn quotient(p: &CoxeterPresentation, file: &Option<PathBuf>) -> Result<PermutationQuotient> {
    match file {
        Some(f) => read_json(f),
        None => Ok(PermutationQuotient::star_transpositions(p.rank())),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => write_text(p, &text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_csv<T: Serialize>(rows: &[T], out: &Option<PathBuf>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner()?;
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

struct Built {
    presentation: Option<CoxeterPresentation>,
    degree: Option<usize>,
    complex: TwoComplex,
}

fn build_compressed(p: &CoxeterPresentation, qfile: &Option<PathBuf>, cap: usize) -> Result<(usize, TwoComplex)> {
    let q = quotient(p, qfile)?;
    let cov = cover::regular_cover(p, &q, cap)?;
    let k = cover::compress(&cov.complex, p)?;
    Ok((cov.degree, k))
}

fn build_from(args: &ComplexArgs) -> Result<Built> {
    let s = &args.source;
    if let Some(f) = &s.complex {
        return Ok(Built {
            presentation: None,
            degree: None,
            complex: read_json(f)?,
        });
    }
    let p = presentation(&s.uniform, &s.presentation)?;
    let (d, k) = build_compressed(&p, &args.quotient, args.cap)?;
    Ok(Built {
        presentation: Some(p),
        degree: Some(d),
        complex: k,
    })
}

#[derive(Serialize)]
struct ComplexSummary {
    degree: usize,
    zero_cells: usize,
    one_cells: usize,
    two_cells: usize,
    euler_characteristic: i64,
    #[serde(with = "rational::serde_str")]
    chi_per_degree: Rational,
    #[serde(with = "rational::serde_str")]
    group_euler_characteristic: Rational,
}

fn cmd_cover(a: &CoverArgs, compressed: bool) -> Result<u8> {
    let p = presentation(&a.source.uniform, &a.source.presentation)?;
    let q = quotient(&p, &a.quotient)?;
    let cov = cover::regular_cover(&p, &q, a.cap)?;
    let k = if compressed { cover::compress(&cov.complex, &p)? } else { cov.complex };
    let (v, e, f) = k.cell_counts();
    let summary = ComplexSummary {
        degree: cov.degree,
        zero_cells: v,
        one_cells: e,
        two_cells: f,
        euler_characteristic: k.euler_characteristic(),
        chi_per_degree: rational::int(k.euler_characteristic()) / rational::int(cov.degree as i64),
        group_euler_characteristic: p.euler_characteristic(),
    };
    if let Some(path) = &a.out {
        emit_json(&k, &Some(path.clone()))?;
    }
    if let Some(path) = &a.dot {
        write_text(path, &dot::to_dot(&k, None))?;
    }
    emit_json(&summary, &None)?;
    Ok(0)
}

fn cmd_walls(a: &ComplexArgs) -> Result<u8> {
    let b = build_from(a)?;
    let ws = walls::extract_walls(&b.complex)?;
    let report = walls::pathology_report_for(&b.complex, &ws);
    if let Some(path) = &a.dot {
        write_text(path, &dot::to_dot(&b.complex, Some(&ws)))?;
    }
    emit_json(&report, &a.out)?;
    eprintln!("{}", report.summary());
    Ok(0)
}

fn cmd_orient(a: &OrientArgs) -> Result<u8> {
    let b = build_from(&a.complex)?;
    let ws = walls::extract_walls(&b.complex)?;
    let outcome = morse::random_orientation_search(&b.complex, &ws, a.seed, a.max_attempts)?;
    if let Some(path) = &a.complex.dot {
        write_text(path, &dot::to_dot(&b.complex, Some(&ws)))?;
    }
    emit_json(&outcome, &a.complex.out)?;
    let _ = (b.presentation, b.degree);
    Ok(if outcome.success { 0 } else { 1 })
}

fn cmd_partitions(c: &PartitionCmd) -> Result<u8> {
    match c {
        PartitionCmd::K { r } => {
            println!("{}", partitions::k_required(*r)?);
            Ok(0)
        }
        PartitionCmd::Random {
            r,
            k,
            seed,
            max_attempts,
            out,
        } => {
            let k = match k {
                Some(k) => *k,
                None => partitions::k_required(*r)? as usize,
            };
            let res = partitions::random_family(*r, k, *seed, *max_attempts)?;
            let code = matches!(res, FamilySearch::Exhausted { .. }) as u8;
            match &res {
                FamilySearch::Found { family, .. } => emit_json(family, out)?,
                FamilySearch::Exhausted { .. } => emit_json(&res, out)?,
            }
            Ok(code)
        }
        PartitionCmd::Greedy { r, seed, pool, out } => {
            let seed = match seed {
                Some(s) => *s,
                None if *r <= partitions::EXHAUSTIVE_MAX_RANK => 0,
                None => bail!("--seed is required above rank {}", partitions::EXHAUSTIVE_MAX_RANK),
            };
            let f = partitions::greedy_family(*r, &GreedyConfig { seed, pool_size: *pool })?;
            eprintln!("greedy family of size {} (k(r) = {})", f.len(), partitions::k_required(*r)?);
            emit_json(&f, out)?;
            Ok(0)
        }
        PartitionCmd::Verify { family } => {
            let f: PartitionFamily = read_json(family)?;
            let open: Vec<Vec<usize>> = partitions::verify_family(&f)
                .iter()
                .map(|q| q.iter().map(|i| i + 1).collect())
                .collect();
            emit_json(&serde_json::json!({ "r": f.r, "size": f.len(), "unseparated": open }), &None)?;
            Ok(if open.is_empty() { 0 } else { 1 })
        }
        PartitionCmd::Product {
            family,
            m,
            quotient,
            cap,
            out,
        } => {
            let f: PartitionFamily = read_json(family)?;
            let q4 = match quotient {
                Some(path) => read_json(path)?,
                None => PermutationQuotient::star_transpositions(4),
            };
            let beta = partitions::product_homomorphism(f.r, *m, &f, &q4)?;
            let q4_order = q4.generated_group(*cap)?.order() as u64;
            let order = beta.generated_group(*cap)?.order();
            let bound = partitions::degree_bound(f.r, f.len() as u32, q4_order);
            eprintln!(
                "generated subgroup of order {order}; |Q|^k <= |Q| r^(4 log|Q| / log(32/29)) {}",
                if bound.holds { "holds" } else { "fails" }
            );
            emit_json(&beta, out)?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct ProbeRow {
    r: u32,
    m: u32,
    trials: u64,
    seed: u64,
    ascending_fails: f64,
    ascending_fails_se: f64,
    descending_fails: f64,
    descending_fails_se: f64,
    either_fails: f64,
    either_fails_se: f64,
    no_ascending_vertex: f64,
    no_descending_vertex: f64,
    p1: String,
    p2_bound: String,
    total_failure_bound: String,
    exact_ascending_fails: Option<String>,
    exact_either_fails: Option<String>,
}

fn cmd_probe(a: &ProbeArgs) -> Result<u8> {
    let mut rows = Vec::new();
    for &r in &a.r {
        for &m in &a.m {
            let model = LinkModel::new(r, m)?;
            let mc = probability::monte_carlo_failure(&model, a.trials, a.seed)?;
            let exact = if a.exact && model.total_bits() <= probability::EXACT_BIT_BUDGET {
                Some(probability::exact_failure_small(&model)?)
            } else {
                None
            };
            let bounds = if r >= 2 {
                (
                    probability::p2_bound(r, m)?.to_string(),
                    probability::total_failure_bound(r, m)?.to_string(),
                )
            } else {
                (String::new(), String::new())
            };
            rows.push(ProbeRow {
                r,
                m,
                trials: a.trials,
                seed: a.seed,
                ascending_fails: mc.ascending_fails.p,
                ascending_fails_se: mc.ascending_fails.std_err,
                descending_fails: mc.descending_fails.p,
                descending_fails_se: mc.descending_fails.std_err,
                either_fails: mc.either_fails.p,
                either_fails_se: mc.either_fails.std_err,
                no_ascending_vertex: mc.no_ascending_vertex.p,
                no_descending_vertex: mc.no_descending_vertex.p,
                p1: probability::p1(r)?.to_string(),
                p2_bound: bounds.0,
                total_failure_bound: bounds.1,
                exact_ascending_fails: exact.as_ref().map(|e| e.ascending_fails.to_string()),
                exact_either_fails: exact.as_ref().map(|e| e.either_fails.to_string()),
            });
        }
    }
    emit_csv(&rows, &a.out)?;
    Ok(0)
}

#[derive(Serialize)]
struct ThresholdRow {
    m: u32,
    qsize: u64,
    threshold_rank: u64,
}

fn cmd_threshold(a: &ThresholdArgs) -> Result<u8> {
    let mut rows = Vec::new();
    for &m in &a.m {
        for &q in &a.qsize {
            rows.push(ThresholdRow {
                m,
                qsize: q,
                threshold_rank: probability::threshold_rank(m, q)?,
            });
        }
    }
    emit_csv(&rows, &a.out)?;
    Ok(0)
}

#[derive(Serialize)]
struct CurvatureOutput {
    #[serde(flatten)]
    report: curvature::CurvatureReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force: Option<BruteForce>,
}

#[derive(Serialize)]
struct BruteForce {
    vertex: usize,
    max_section_curvature: Option<String>,
}

fn cmd_curvature(a: &CurvatureArgs) -> Result<u8> {
    let c = &a.cover;
    let p = presentation(&c.source.uniform, &c.source.presentation)?;
    let (_, k) = build_compressed(&p, &c.quotient, c.cap)?;
    let ac = match a.preset {
        Preset::RegularEuclidean => curvature::regular_euclidean_angles(&k)?,
    };
    let brute_force = match a.brute_force_at {
        Some(x) => Some(BruteForce {
            vertex: x,
            max_section_curvature: curvature::brute_force_sectional_at(&ac, x)?.map(|q| q.to_string()),
        }),
        None => None,
    };
    let out = CurvatureOutput {
        report: curvature::curvature_report(&p, &ac)?,
        brute_force,
    };
    emit_json(&out, &c.out)?;
    Ok(0)
}

fn cmd_certify(a: &CertifyArgs) -> Result<u8> {
    let p = presentation(&a.source.uniform, &a.source.presentation)?;
    let q = quotient(&p, &a.quotient)?;
    let cert = morse::certify(&p, &q, a.seed, a.max_attempts, a.cap)?;
    emit_json(&cert, &a.out)?;
    eprintln!("status: {:?}", cert.status);
    Ok(match cert.status {
        CertificateStatus::Partial => 1,
        _ => 0,
    })
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Chi(a) => {
            let p = presentation(&a.source.uniform, &a.source.presentation)?;
            println!("{}", p.euler_characteristic());
            Ok(0)
        }
        Cmd::Dimension(a) => {
            let p = presentation(&a.source.uniform, &a.source.presentation)?;
            match p.first_spherical_triple() {
                None => println!("dimension <= 2"),
                Some((i, j, k)) => {
                    let m = |a, b| match p.exponent(a, b) {
                        Exponent::Finite(m) => m.to_string(),
                        Exponent::Infinite => "inf".into(),
                    };
                    println!(
                        "spherical triple ({}, {}, {}) with exponents {}, {}, {}",
                        i + 1,
                        j + 1,
                        k + 1,
                        m(i, j),
                        m(j, k),
                        m(i, k)
                    );
                }
            }
            Ok(0)
        }
        Cmd::Cover(a) => cmd_cover(a, false),
        Cmd::Compress(a) => cmd_cover(a, true),
        Cmd::Walls(a) => cmd_walls(a),
        Cmd::Orient(a) => cmd_orient(a),
        Cmd::Partitions(c) => cmd_partitions(c),
        Cmd::Probe(a) => cmd_probe(a),
        Cmd::Threshold(a) => cmd_threshold(a),
        Cmd::Ramsey { orders } => {
            println!("{}", probability::ramsey_upper_bound(orders)?);
            Ok(0)
        }
        Cmd::Curvature(a) => cmd_curvature(a),
        Cmd::Certify(a) => cmd_certify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
