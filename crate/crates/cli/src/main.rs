//! Command line front end. Every subcommand reads the shared map file
//! format (`-` for stdin), prints either human text or a single JSON
//! record, and exits 0 on success, 1 on an analysis-level negative
//! (not Keller, not an automorphism, no certificate), 2 on input errors.

use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use keller_core::criteria::{self, CertificateRule};
use keller_core::endo::{invert, parse_map_str, PolyMap};
use keller_core::extension::{coordinate_minpoly, extension_degree, verify_formanek};
use keller_core::families::{generate_family, Family, GeneratorSpec};
use keller_core::scan::{self, ScanConfig, ScanError, ScanOutcome};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "keller", version, about = "Exact analysis of polynomial maps of Q[x1..xn]")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Args)]
struct MapArgs {
    /// Map file; `-` reads stdin.
    file: String,
    /// Seed for sampled measurements; coordinate i uses seed+1+i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// triangular, affine, composed, druzkowski, lang_maslamani, essen_form.
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degree bound for nonlinear parts.
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Factor count for the composed family.
    #[arg(long, default_value_t = 2)]
    factors: usize,
    /// Leading linear block size for the Essen form.
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Scan config file; `-` reads stdin.
    config: String,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's report output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary style; the report file itself is always line-delimited JSON.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a map file and reprint it canonically.
    Parse(MapArgs),
    /// Jacobian determinant.
    Jacobian(MapArgs),
    /// Is the Jacobian determinant a nonzero constant?
    Keller(MapArgs),
    /// Invert an automorphism through its graph ideal.
    Invert(MapArgs),
    /// Field extension degree D = [C(x) : C(F)].
    Degree(MapArgs),
    /// Minimal polynomial of every coordinate over C(F).
    Minpoly(MapArgs),
    /// Is x_n linear over C(F, x1..x_{n-1})?
    Formanek(MapArgs),
    /// Run the certificate rule ladder.
    Classify(MapArgs),
    /// Split a 2D map with affine first coordinate into an affine map
    /// plus a C[F_1] tail.
    Cmw(MapArgs),
    /// Generate a map from one of the families.
    Generate(GenerateArgs),
    /// Run a conjecture scan from a config file.
    Scan(ScanArgs),
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INPUT, msg: e.to_string() }
    }

    fn negative(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_NEGATIVE, msg: e.to_string() }
    }
}

/// What a subcommand produced: both renderings plus the exit code.
struct Outcome {
    text: String,
    record: Value,
    code: u8,
}

impl Outcome {
    fn ok(text: String, record: Value) -> Self {
        Outcome { text, record, code: 0 }
    }
}

fn read_input(file: &str) -> Result<String, Failure> {
    if file == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(file).map_err(|e| Failure::input(format!("{file}: {e}")))
    }
}

fn load_map(file: &str) -> Result<PolyMap, Failure> {
    parse_map_str(&read_input(file)?).map_err(Failure::input)
}

fn coord_strings(map: &PolyMap) -> Vec<String> {
    map.coords().iter().map(|c| c.to_string()).collect()
}

fn map_record(map: &PolyMap) -> Value {
    json!({
        "nvars": map.nvars(),
        "metadata": map.metadata(),
        "coordinates": coord_strings(map),
    })
}

fn emit(format: Format, out: &Option<PathBuf>, outcome: &Outcome) -> Result<(), Failure> {
    let mut body = match format {
        Format::Text => outcome.text.clone(),
        Format::Records => outcome.record.to_string(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_parse(map: &PolyMap) -> Outcome {
    Outcome::ok(map.to_file_string(), map_record(map))
}

fn cmd_jacobian(map: &PolyMap) -> Outcome {
    let det = map.jacobian_det();
    Outcome::ok(
        det.to_string(),
        json!({ "determinant": det.to_string(), "keller": map.is_keller() }),
    )
}

fn cmd_keller(map: &PolyMap) -> Outcome {
    let keller = map.is_keller();
    Outcome {
        text: keller.to_string(),
        record: json!({ "keller": keller, "determinant": map.jacobian_det().to_string() }),
        code: if keller { 0 } else { EXIT_NEGATIVE },
    }
}

fn cmd_invert(map: &PolyMap) -> Result<Outcome, Failure> {
    match invert(map).map_err(Failure::negative)? {
        Some(inverse) => Ok(Outcome::ok(
            inverse.to_file_string(),
            json!({ "inverted": true, "inverse": coord_strings(&inverse) }),
        )),
        None => Ok(Outcome {
            text: "not an automorphism".to_string(),
            record: json!({ "inverted": false, "inverse": null }),
            code: EXIT_NEGATIVE,
        }),
    }
}

fn cmd_degree(map: &PolyMap, seed: u64) -> Result<Outcome, Failure> {
    let d = extension_degree(map, seed).map_err(Failure::negative)?;
    Ok(Outcome::ok(
        format!("extension degree: {d}"),
        json!({ "extension_degree": d, "seed": seed }),
    ))
}

fn cmd_minpoly(map: &PolyMap, seed: u64) -> Result<Outcome, Failure> {
    let mut text = String::new();
    let mut degrees = Vec::new();
    let mut polys = Vec::new();
    for i in 0..map.nvars() {
        let sub = seed.wrapping_add(1 + i as u64);
        let (d, p) = coordinate_minpoly(map, i, sub).map_err(Failure::negative)?;
        text.push_str(&format!("x{}: degree {}, {}\n", i + 1, d, p));
        degrees.push(d);
        polys.push(p.to_string());
    }
    Ok(Outcome::ok(
        text,
        json!({ "degrees": degrees, "polynomials": polys, "seed": seed }),
    ))
}

fn cmd_formanek(map: &PolyMap, seed: u64) -> Result<Outcome, Failure> {
    let rep = verify_formanek(map, seed).map_err(Failure::negative)?;
    let witness = rep.witness.as_ref().map(|w| w.to_string());
    let text = format!(
        "linear over C(F, x1..x{}): {}\nmeasured degree: {}\nwitness: {}\n",
        map.nvars().saturating_sub(1),
        rep.ok,
        rep.measured_degree,
        witness.as_deref().unwrap_or("none"),
    );
    Ok(Outcome {
        text,
        record: json!({
            "ok": rep.ok,
            "measured_degree": rep.measured_degree,
            "witness": witness,
            "seed": seed,
        }),
        code: if rep.ok { 0 } else { EXIT_NEGATIVE },
    })
}

fn cmd_classify(map: &PolyMap, seed: u64) -> Result<Outcome, Failure> {
    let cert = criteria::classify(map, seed).map_err(Failure::negative)?;
    let mut text = format!(
        "rule: {}\nverified_by_inversion: {}\n",
        cert.rule, cert.verified_by_inversion
    );
    for (k, v) in &cert.evidence {
        text.push_str(&format!("  {k}: {v}\n"));
    }
    let negative = cert.rule == CertificateRule::None && !cert.verified_by_inversion;
    Ok(Outcome {
        text,
        record: json!({
            "rule": cert.rule,
            "evidence": cert.evidence,
            "verified_by_inversion": cert.verified_by_inversion,
            "seed": seed,
        }),
        code: if negative { EXIT_NEGATIVE } else { 0 },
    })
}

fn cmd_cmw(map: &PolyMap) -> Result<Outcome, Failure> {
    if map.nvars() != 2 {
        return Err(Failure::negative("decomposition needs a two-variable map"));
    }
    let (g, c) = criteria::cmw_decompose_2d(map).map_err(Failure::negative)?;
    let coeffs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    let text = format!("g:\n{}coefficients: [{}]\n", g.to_file_string(), coeffs.join(", "));
    Ok(Outcome::ok(
        text,
        json!({ "g": coord_strings(&g), "coefficients": coeffs }),
    ))
}

fn cmd_generate(args: &GenerateArgs) -> Result<Outcome, Failure> {
    let family: Family = args.family.parse().map_err(Failure::input)?;
    let spec = GeneratorSpec {
        family,
        seed: args.seed,
        n: args.n,
        degree: args.degree,
        factors: args.factors,
        r: args.r.min(args.n),
    };
    let map = generate_family(&spec).map_err(Failure::negative)?;
    Ok(Outcome::ok(map.to_file_string(), map_record(&map)))
}

fn summary_text(outcome: &ScanOutcome, hash: &str, report: Option<&str>) -> String {
    fn counts(m: &std::collections::BTreeMap<String, usize>) -> String {
        m.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join(", ")
    }
    let s = &outcome.summary;
    let mut text = format!("maps: {} (keller {})\n", s.total, s.keller);
    if !s.by_status.is_empty() {
        text.push_str(&format!("status: {}\n", counts(&s.by_status)));
    }
    if !s.by_rule.is_empty() {
        text.push_str(&format!("rules: {}\n", counts(&s.by_rule)));
    }
    if !s.degree_conjecture.is_empty() {
        text.push_str(&format!("degree conjecture: {}\n", counts(&s.degree_conjecture)));
    }
    if !s.gcd_conjecture.is_empty() {
        text.push_str(&format!("gcd conjecture: {}\n", counts(&s.gcd_conjecture)));
    }
    text.push_str(&format!("hash: {hash}\n"));
    if let Some(path) = report {
        text.push_str(&format!("report: {path}\n"));
    }
    text
}

fn cmd_scan(args: &ScanArgs) -> Result<u8, Failure> {
    let mut cfg = ScanConfig::parse(&read_input(&args.config)?).map_err(Failure::input)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    match scan::run_scan(&cfg) {
        Ok(outcome) => {
            let hash = scan::determinism_hash(&outcome.records);
            match &cfg.output {
                Some(path) => {
                    scan::write_report(Path::new(path), &outcome.records)
                        .map_err(Failure::input)?;
                    match args.format {
                        Format::Text => {
                            print!("{}", summary_text(&outcome, &hash, Some(path)))
                        }
                        Format::Records => println!(
                            "{}",
                            json!({
                                "summary": outcome.summary,
                                "determinism_hash": hash,
                                "report": path,
                            })
                        ),
                    }
                }
                None => {
                    // records on stdout stay pipeable; summary goes to stderr
                    print!("{}", scan::report_to_string(&outcome.records));
                    eprint!("{}", summary_text(&outcome, &hash, None));
                }
            }
            Ok(0)
        }
        Err(ScanError::Counterexample(report)) => {
            if let Some(path) = &cfg.output {
                scan::write_report(Path::new(path), &report.completed)
                    .map_err(Failure::input)?;
            }
            eprintln!("COUNTEREXAMPLE-CANDIDATE: {report}");
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => Err(Failure::input(e)),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let (args, outcome) = match &cli.cmd {
        Cmd::Parse(a) => (a, cmd_parse(&load_map(&a.file)?)),
        Cmd::Jacobian(a) => (a, cmd_jacobian(&load_map(&a.file)?)),
        Cmd::Keller(a) => (a, cmd_keller(&load_map(&a.file)?)),
        Cmd::Invert(a) => (a, cmd_invert(&load_map(&a.file)?)?),
        Cmd::Degree(a) => (a, cmd_degree(&load_map(&a.file)?, a.seed)?),
        Cmd::Minpoly(a) => (a, cmd_minpoly(&load_map(&a.file)?, a.seed)?),
        Cmd::Formanek(a) => (a, cmd_formanek(&load_map(&a.file)?, a.seed)?),
        Cmd::Classify(a) => (a, cmd_classify(&load_map(&a.file)?, a.seed)?),
        Cmd::Cmw(a) => (a, cmd_cmw(&load_map(&a.file)?)?),
        Cmd::Generate(a) => {
            let outcome = cmd_generate(a)?;
            emit(a.format, &a.out, &outcome)?;
            return Ok(outcome.code);
        }
        Cmd::Scan(a) => return cmd_scan(a),
    };
    emit(args.format, &args.out, &outcome)?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
