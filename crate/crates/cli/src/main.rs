//! `finite-hgf`: exact Gauss/Jacobi sums, hypergeometric function values,
//! Appell F₄ values, λ-tables, and identity verification over finite fields.
//!
//! All arithmetic is exact in cyclotomic fields; JSON output (the default)
//! carries exact values only. `--format text` adds an approximate complex
//! embedding for human reading, never for comparison. `--format csv` embeds
//! exact values as quoted JSON strings inside cells.
//!
//! Exit codes: 0 success, 1 at least one verification failure, 2 usage error.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use finite_hgf_core::chars::{parse_mult_char, parse_param_set};
use finite_hgf_core::gf::FieldDescriptor;
use finite_hgf_core::hgf::{appell_f4, HgfEvaluator};
use finite_hgf_core::verify::{verify_suite, IdentityId, Mode, VerificationReport};
use finite_hgf_core::{AddChar, CycloNum, FieldElem, FiniteField, HgfSpec, SumTables};

#[derive(Parser)]
#[command(name = "finite-hgf", version, about = "Exact hypergeometric sums over finite fields")]
struct Cli {
    /// Worker threads (overrides FINITE_HGF_THREADS; default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a field's modulus, generator, and size.
    FieldInfo(FieldInfoArgs),
    /// Evaluate F(α; β; λ) for explicit character multisets.
    Eval(EvalArgs),
    /// Print one Gauss sum g(χ).
    Gauss(GaussArgs),
    /// Print one Jacobi sum j(χ, χ′).
    Jacobi(JacobiArgs),
    /// Evaluate the Appell series F₄ at one point pair.
    F4(F4Args),
    /// Check catalog identities over one or more fields.
    Verify(VerifyArgs),
    /// Print F(α; β; λ) at every λ of the field.
    Table(TableArgs),
}

/// Field selection shared by all subcommands except `verify`.
#[derive(Args)]
struct FieldOpts {
    /// Field size q = p^f (a prime power).
    #[arg(long, value_name = "Q", conflicts_with_all = ["p", "f", "modulus"])]
    q: Option<u64>,

    /// Characteristic p (use with --f).
    #[arg(long, value_name = "P", requires = "f")]
    p: Option<u32>,

    /// Extension degree f (use with --p).
    #[arg(long, value_name = "F", requires = "p")]
    f: Option<u32>,

    /// Modulus coefficients a0,a1,…,af (constant term first, monic,
    /// irreducible); defaults to the lexicographically smallest choice.
    #[arg(long, value_delimiter = ',', value_name = "COEFFS", requires = "p")]
    modulus: Option<Vec<u32>>,
}

impl FieldOpts {
    fn build(&self) -> Result<Arc<FiniteField>> {
        let field = match (self.q, self.p, self.f) {
            (Some(q), None, None) => FiniteField::from_order(q)?,
            (None, Some(p), Some(f)) => match &self.modulus {
                Some(m) => FiniteField::with_modulus(p, f, m)?,
                None => FiniteField::new(p, f)?,
            },
            _ => bail!("select the field with --q N or with --p P --f F"),
        };
        Ok(Arc::new(field))
    }
}

#[derive(Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

/// Additive-character shift: ψ_a(x) = ψ(ax) for a nonzero element code a.
#[derive(Args)]
struct PsiOpt {
    /// Replace ψ by ψ_a (a = element code, nonzero).
    #[arg(long, value_name = "CODE")]
    psi_shift: Option<u64>,
}

impl PsiOpt {
    fn tables(&self, field: &Arc<FiniteField>) -> Result<SumTables> {
        Ok(match self.psi_shift {
            None => SumTables::new(field.clone()),
            Some(code) => {
                let shift = field.elem(code)?;
                SumTables::with_psi(field.clone(), AddChar::new(field, shift)?)
            }
        })
    }
}

#[derive(Args)]
struct FieldInfoArgs {
    #[command(flatten)]
    field: FieldOpts,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct GaussArgs {
    #[command(flatten)]
    field: FieldOpts,
    /// Character: bare index, `chi:J`, `eps`, `phi`, or `rho`.
    #[arg(long, allow_hyphen_values = true)]
    chi: String,
    #[command(flatten)]
    psi: PsiOpt,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct JacobiArgs {
    #[command(flatten)]
    field: FieldOpts,
    /// First character: bare index, `chi:J`, `eps`, `phi`, or `rho`.
    #[arg(long, allow_hyphen_values = true)]
    chi: String,
    /// Second character, same syntax.
    #[arg(long, allow_hyphen_values = true)]
    chi2: String,
    #[command(flatten)]
    psi: PsiOpt,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    field: FieldOpts,
    /// Numerator characters, comma-separated (`none` for empty).
    #[arg(long, allow_hyphen_values = true)]
    num: String,
    /// Denominator characters, comma-separated (`none` for empty).
    #[arg(long, allow_hyphen_values = true)]
    den: String,
    /// Argument λ: an element code, or a negative integer reduced into the
    /// prime field.
    #[arg(long, allow_negative_numbers = true)]
    lambda: i64,
    #[command(flatten)]
    psi: PsiOpt,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct F4Args {
    #[command(flatten)]
    field: FieldOpts,
    /// Character α.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Character β.
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Character γ.
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    /// Character γ′.
    #[arg(long, allow_hyphen_values = true)]
    gamma2: String,
    /// First argument (element code; negative integers embed via the prime field).
    #[arg(long, allow_negative_numbers = true)]
    x: i64,
    /// Second argument, same convention.
    #[arg(long, allow_negative_numbers = true)]
    y: i64,
    #[command(flatten)]
    psi: PsiOpt,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    field: FieldOpts,
    /// Numerator characters, comma-separated (`none` for empty).
    #[arg(long, allow_hyphen_values = true)]
    num: String,
    /// Denominator characters, comma-separated (`none` for empty).
    #[arg(long, allow_hyphen_values = true)]
    den: String,
    #[command(flatten)]
    psi: PsiOpt,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args)]
struct VerifyArgs {
    /// Field sizes to check, comma-separated prime powers.
    #[arg(long, value_delimiter = ',', required = true, value_name = "Q,...")]
    q: Vec<u64>,

    /// `all` or a comma-separated list of identity names.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    ids: Vec<String>,

    /// Tuple-selection strategy.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,

    /// Tuples per identity in sample mode.
    #[arg(long, default_value_t = 2000)]
    n: u64,

    /// Seed for sampled runs.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Also write the JSON report array to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Keep wall-clock timings (zeroed by default for reproducible output).
    #[arg(long)]
    timings: bool,

    #[command(flatten)]
    format: OutputOpts,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sample,
    Auto,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::FieldInfo(a) => cmd_field_info(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Gauss(a) => cmd_gauss(a),
        Command::Jacobi(a) => cmd_jacobi(a),
        Command::F4(a) => cmd_f4(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(a),
    }
}

/// Resolves parallelism: --threads beats FINITE_HGF_THREADS beats default.
fn configure_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("FINITE_HGF_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .with_context(|| format!("FINITE_HGF_THREADS must be an integer, got {v:?}"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("failed to configure the thread pool")?;
    }
    Ok(())
}

/// λ arguments: nonnegative values are element codes, negative values are
/// integers reduced into the prime field.
fn parse_point(field: &FiniteField, v: i64) -> Result<FieldElem> {
    if v < 0 {
        Ok(field.from_int(v))
    } else {
        Ok(field.elem(v as u64)?)
    }
}

/// Approximate complex embedding, 12 significant digits, display only.
fn approx_str(value: &CycloNum) -> String {
    let (re, im) = value.approx();
    if im >= 0.0 {
        format!("{re:.11e} + {im:.11e}i")
    } else {
        format!("{re:.11e} - {:.11e}i", -im)
    }
}

/// One CSV cell holding a JSON document: quoted, inner quotes doubled.
fn csv_cell<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("value serializes");
    format!("\"{}\"", json.replace('"', "\"\""))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_field_info(a: FieldInfoArgs) -> Result<i32> {
    let field = a.field.build()?;
    let d: FieldDescriptor = field.descriptor();
    match a.out.format {
        Format::Json => print_json(&d)?,
        Format::Text => {
            println!("p = {}", d.p);
            println!("f = {}", d.f);
            println!("q = {}", d.q);
            let poly: Vec<String> = d.modulus.iter().map(|c| c.to_string()).collect();
            println!("modulus = [{}] (constant term first)", poly.join(", "));
            println!("generator = {}", d.generator);
        }
        Format::Csv => {
            println!("p,f,q,modulus,generator");
            println!("{},{},{},{},{}", d.p, d.f, d.q, csv_cell(&d.modulus), d.generator);
        }
    }
    Ok(0)
}

fn cmd_gauss(a: GaussArgs) -> Result<i32> {
    let field = a.field.build()?;
    let chi = parse_mult_char(&a.chi, &field)?;
    let tables = a.psi.tables(&field)?;
    let value = tables.gauss(chi).clone();
    emit_value("g", &format!("g(chi:{})", chi.index), &value, a.out.format)
}

fn cmd_jacobi(a: JacobiArgs) -> Result<i32> {
    let field = a.field.build()?;
    let chi = parse_mult_char(&a.chi, &field)?;
    let chi2 = parse_mult_char(&a.chi2, &field)?;
    let tables = a.psi.tables(&field)?;
    let value = tables.jacobi(chi, chi2);
    let label = format!("j(chi:{}, chi:{})", chi.index, chi2.index);
    emit_value("j", &label, &value, a.out.format)
}

/// Prints one bare exact value in the requested format.
fn emit_value(csv_header: &str, label: &str, value: &CycloNum, format: Format) -> Result<i32> {
    match format {
        Format::Json => print_json(value)?,
        Format::Text => {
            println!("{label} = {value}");
            println!("  ≈ {} (approximate)", approx_str(value));
        }
        Format::Csv => {
            println!("{csv_header}");
            println!("{}", csv_cell(value));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct EvalOutput {
    value: CycloNum,
    field: FieldDescriptor,
    spec: HgfSpec,
    lambda: u64,
}

fn cmd_eval(a: EvalArgs) -> Result<i32> {
    let field = a.field.build()?;
    let num = parse_param_set(&a.num, &field)?;
    let den = parse_param_set(&a.den, &field)?;
    let spec = HgfSpec::new(num, den)?;
    let lambda = parse_point(&field, a.lambda)?;
    let tables = a.psi.tables(&field)?;
    let value = HgfEvaluator::new(&tables, &spec).eval(lambda);
    let out = EvalOutput {
        value,
        field: field.descriptor(),
        spec,
        lambda: lambda.code() as u64,
    };
    match a.out.format {
        Format::Json => print_json(&out)?,
        Format::Text => {
            println!("F over GF({}) at lambda = {}", out.field.q, out.lambda);
            println!("value = {}", out.value);
            println!("  ≈ {} (approximate)", approx_str(&out.value));
        }
        Format::Csv => {
            println!("lambda,value");
            println!("{},{}", out.lambda, csv_cell(&out.value));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct F4Output {
    value: CycloNum,
    field: FieldDescriptor,
    alpha: u64,
    beta: u64,
    gamma: u64,
    gamma2: u64,
    x: u64,
    y: u64,
}

fn cmd_f4(a: F4Args) -> Result<i32> {
    let field = a.field.build()?;
    let alpha = parse_mult_char(&a.alpha, &field)?;
    let beta = parse_mult_char(&a.beta, &field)?;
    let gamma = parse_mult_char(&a.gamma, &field)?;
    let gamma2 = parse_mult_char(&a.gamma2, &field)?;
    let x = parse_point(&field, a.x)?;
    let y = parse_point(&field, a.y)?;
    let tables = a.psi.tables(&field)?;
    let value = appell_f4(&tables, alpha, beta, gamma, gamma2, x, y);
    let out = F4Output {
        value,
        field: field.descriptor(),
        alpha: alpha.index,
        beta: beta.index,
        gamma: gamma.index,
        gamma2: gamma2.index,
        x: x.code() as u64,
        y: y.code() as u64,
    };
    match a.out.format {
        Format::Json => print_json(&out)?,
        Format::Text => {
            println!(
                "F4(chi:{}, chi:{}; chi:{}, chi:{}) over GF({}) at ({}, {})",
                out.alpha, out.beta, out.gamma, out.gamma2, out.field.q, out.x, out.y
            );
            println!("value = {}", out.value);
            println!("  ≈ {} (approximate)", approx_str(&out.value));
        }
        Format::Csv => {
            println!("x,y,value");
            println!("{},{},{}", out.x, out.y, csv_cell(&out.value));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct TableRow {
    lambda: u64,
    value: CycloNum,
}

#[derive(Serialize)]
struct TableOutput {
    field: FieldDescriptor,
    spec: HgfSpec,
    rows: Vec<TableRow>,
}

fn cmd_table(a: TableArgs) -> Result<i32> {
    let field = a.field.build()?;
    let num = parse_param_set(&a.num, &field)?;
    let den = parse_param_set(&a.den, &field)?;
    let spec = HgfSpec::new(num, den)?;
    let tables = a.psi.tables(&field)?;
    let ev = HgfEvaluator::new(&tables, &spec);
    let rows: Vec<TableRow> = (0..field.q() as u64)
        .map(|code| {
            let x = field.elem(code).expect("code in range");
            TableRow {
                lambda: code,
                value: ev.eval(x),
            }
        })
        .collect();
    let out = TableOutput {
        field: field.descriptor(),
        spec,
        rows,
    };
    match a.out.format {
        Format::Json => print_json(&out)?,
        Format::Text => {
            println!("F over GF({}), one row per lambda:", out.field.q);
            for row in &out.rows {
                println!(
                    "lambda = {:>3}: {}  (≈ {})",
                    row.lambda,
                    row.value,
                    approx_str(&row.value)
                );
            }
        }
        Format::Csv => {
            println!("lambda,value");
            for row in &out.rows {
                println!("{},{}", row.lambda, csv_cell(&row.value));
            }
        }
    }
    Ok(0)
}

fn parse_ids(tokens: &[String]) -> Result<Vec<IdentityId>> {
    if tokens.iter().any(|t| t.eq_ignore_ascii_case("all")) {
        if tokens.len() > 1 {
            bail!("`all` cannot be combined with other identity names");
        }
        return Ok(IdentityId::all().to_vec());
    }
    let mut ids = Vec::with_capacity(tokens.len());
    for t in tokens {
        let id = IdentityId::from_str(t.trim()).map_err(|e| {
            let names: Vec<&str> = IdentityId::all().iter().map(|i| i.name()).collect();
            anyhow::anyhow!("{e}; expected `all` or one of: {}", names.join(", "))
        })?;
        ids.push(id);
    }
    Ok(ids)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let ids = parse_ids(&a.ids)?;
    let mut fields = Vec::with_capacity(a.q.len());
    for &q in &a.q {
        fields.push(Arc::new(FiniteField::from_order(q)?));
    }
    let mode = match a.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sample => Mode::Sample { n: a.n, seed: a.seed },
        ModeArg::Auto => Mode::Auto { seed: a.seed },
    };

    let mut reports = verify_suite(&fields, &ids, mode);
    if !a.timings {
        for r in &mut reports {
            r.elapsed_ms = 0;
        }
    }
    for r in &reports {
        if let Some(reason) = &r.skip_reason {
            eprintln!("warning: {} at q = {} skipped: {}", r.identity, r.field.q, reason);
        } else if r.tuples_enumerated == 0 {
            eprintln!(
                "warning: {} at q = {} has no admissible parameter tuples",
                r.identity, r.field.q
            );
        }
    }

    if let Some(path) = &a.out {
        let json = serde_json::to_string_pretty(&reports)?;
        std::fs::write(path, json + "\n")
            .with_context(|| format!("cannot write report to {}", path.display()))?;
    }

    match a.format.format {
        Format::Json => print_json(&reports)?,
        Format::Text => {
            for r in &reports {
                println!("{}", report_line(r));
            }
        }
        Format::Csv => {
            println!(
                "identity,p,f,q,tuples_enumerated,tuples_checked,lambdas_per_tuple,\
                 failures,elapsed_ms,seed,skip_reason"
            );
            for r in &reports {
                println!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.identity,
                    r.field.p,
                    r.field.f,
                    r.field.q,
                    r.tuples_enumerated,
                    r.tuples_checked,
                    r.lambdas_per_tuple,
                    r.failures.len(),
                    r.elapsed_ms,
                    r.seed.map_or(String::new(), |s| s.to_string()),
                    r.skip_reason.as_deref().unwrap_or(""),
                );
            }
        }
    }

    let all_passed = reports.iter().all(VerificationReport::passed);
    Ok(if all_passed { 0 } else { 1 })
}

/// One human-readable summary line per verification report.
fn report_line(r: &VerificationReport) -> String {
    if let Some(reason) = &r.skip_reason {
        return format!("SKIP {} q={} ({})", r.identity, r.field.q, reason);
    }
    let status = if r.passed() { "PASS" } else { "FAIL" };
    let mut line = format!(
        "{status} {} q={} tuples={}/{} points={}",
        r.identity, r.field.q, r.tuples_checked, r.tuples_enumerated, r.lambdas_per_tuple
    );
    if !r.failures.is_empty() {
        line.push_str(&format!(" failures={}", r.failures.len()));
    }
    if let Some(seed) = r.seed {
        line.push_str(&format!(" seed={seed}"));
    }
    line
}
