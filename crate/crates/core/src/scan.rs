//! Conjecture scan harness: generates a corpus from the map families,
//! runs a configurable set of checks per map, and emits line-delimited
//! records whose content is fully determined by the config (timings
//! aside). A Keller map that fails inversion or the degree bound is a
//! counterexample candidate and aborts the run loudly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criteria::{
    degree_conjecture_record, gcd_conjecture_record, CriteriaError, MapAnalysis,
};
use crate::endo::{EndoError, PolyMap};
use crate::extension::{
    coordinate_minpoly_with_budget, tower_degree_with_budget, verify_formanek_with_budget,
    ExtError,
};
use crate::families::{druzkowski_corank, generate_family, parse_matrix, GeneratorSpec};
use crate::groebner::{Budget, GroebnerError};
use crate::text::parse_polynomial;

pub const SCHEMA_VERSION: u32 = 1;

/// SplitMix64 output function.
fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for map number `index`: the (index+1)-th output of the reference
/// SplitMix64 stream seeded with the master seed. Maps can therefore be
/// analyzed independently (and in any order) without coordination.
pub fn per_map_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    DegreeConjecture,
    GcdConjecture,
    Formanek,
    Minpoly,
    Classify,
    Invert,
    Tower,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::DegreeConjecture,
        Check::GcdConjecture,
        Check::Formanek,
        Check::Minpoly,
        Check::Classify,
        Check::Invert,
        Check::Tower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::DegreeConjecture => "degree_conjecture",
            Check::GcdConjecture => "gcd_conjecture",
            Check::Formanek => "formanek",
            Check::Minpoly => "minpoly",
            Check::Classify => "classify",
            Check::Invert => "invert",
            Check::Tower => "tower",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyRequest {
    pub family: crate::families::Family,
    pub count: usize,
}

/// Everything that determines a scan. Parsed from a key=value text file;
/// see `ScanConfig::parse` for the keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    pub families: Vec<FamilyRequest>,
    /// Literal maps appended after the generated corpus, e.g. negative
    /// controls.
    pub controls: Vec<PolyMap>,
    pub n_min: usize,
    pub n_max: usize,
    pub degree: u32,
    pub factors: usize,
    pub r: usize,
    pub seed: u64,
    pub checks: BTreeSet<Check>,
    pub budget: Budget,
    pub output: Option<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            families: Vec::new(),
            controls: Vec::new(),
            n_min: 2,
            n_max: 2,
            degree: 2,
            factors: 2,
            r: 1,
            seed: 0,
            checks: Check::ALL.into_iter().collect(),
            budget: Budget::default(),
            output: None,
        }
    }
}

impl ScanConfig {
    /// Key=value lines, `#` comments. Keys: `seed`, `n` (single value or
    /// `a..b` inclusive), `degree`, `factors`, `r`, `max_pairs`,
    /// `max_terms`, `output`, `checks` (comma list or `all`), repeated
    /// `family = name [count]` lines, and repeated `control = p1; ..; pk`
    /// lines giving literal maps coordinate by coordinate.
    pub fn parse(text: &str) -> Result<ScanConfig, ScanError> {
        let mut cfg = ScanConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let err = |msg: String| ScanError::ConfigLine { line: lineno, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => {
                    cfg.seed = value.parse().map_err(|_| err(format!("bad seed {value:?}")))?
                }
                "degree" => {
                    cfg.degree =
                        value.parse().map_err(|_| err(format!("bad degree {value:?}")))?
                }
                "factors" => {
                    cfg.factors =
                        value.parse().map_err(|_| err(format!("bad factors {value:?}")))?
                }
                "r" => cfg.r = value.parse().map_err(|_| err(format!("bad r {value:?}")))?,
                "max_pairs" => {
                    cfg.budget.max_pairs =
                        value.parse().map_err(|_| err(format!("bad max_pairs {value:?}")))?
                }
                "max_terms" => {
                    cfg.budget.max_terms =
                        value.parse().map_err(|_| err(format!("bad max_terms {value:?}")))?
                }
                "n" => {
                    let (lo, hi) = match value.split_once("..") {
                        Some((a, b)) => (a.trim(), b.trim()),
                        None => (value, value),
                    };
                    cfg.n_min =
                        lo.parse().map_err(|_| err(format!("bad variable count {lo:?}")))?;
                    cfg.n_max =
                        hi.parse().map_err(|_| err(format!("bad variable count {hi:?}")))?;
                    if cfg.n_min < 1 || cfg.n_max < cfg.n_min {
                        return Err(err(format!("empty variable range {value:?}")));
                    }
                }
                "family" => {
                    let mut parts = value.split_whitespace();
                    let name = parts.next().ok_or_else(|| err("missing family name".into()))?;
                    let family = name.parse().map_err(err)?;
                    let count = match parts.next() {
                        Some(c) => {
                            c.parse().map_err(|_| err(format!("bad family count {c:?}")))?
                        }
                        None => 1,
                    };
                    if parts.next().is_some() {
                        return Err(err(format!("trailing text after family count in {value:?}")));
                    }
                    cfg.families.push(FamilyRequest { family, count });
                }
                "control" => {
                    let map = parse_inline_map(value).map_err(err)?;
                    cfg.controls.push(map);
                }
                "checks" => {
                    cfg.checks = if value == "all" {
                        Check::ALL.into_iter().collect()
                    } else {
                        value
                            .split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .map(|s| s.parse().map_err(err))
                            .collect::<Result<_, _>>()?
                    };
                }
                "output" => cfg.output = Some(value.to_string()),
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }
}

/// Coordinates separated by semicolons; the ring size is the number of
/// coordinates.
fn parse_inline_map(value: &str) -> Result<PolyMap, String> {
    let parts: Vec<&str> = value.split(';').map(str::trim).collect();
    let n = parts.len();
    let coords = parts
        .iter()
        .map(|p| parse_polynomial(p, n).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut map = PolyMap::new(coords).map_err(|e| e.to_string())?;
    map.set_metadata("family", "control");
    map.set_metadata("source", value);
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordStatus {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "GENERATOR_FAILED")]
    GeneratorFailed,
    #[serde(rename = "BUDGET_EXCEEDED")]
    BudgetExceeded,
    #[serde(rename = "ANALYSIS_ERROR")]
    AnalysisError,
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordStatus::Ok => "OK",
            RecordStatus::GeneratorFailed => "GENERATOR_FAILED",
            RecordStatus::BudgetExceeded => "BUDGET_EXCEEDED",
            RecordStatus::AnalysisError => "ANALYSIS_ERROR",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "HOLDS")]
    Holds,
    #[serde(rename = "FAILS")]
    Fails,
    #[serde(rename = "OUT_OF_HYPOTHESIS")]
    OutOfHypothesis,
    #[serde(rename = "NOT_APPLICABLE")]
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "HOLDS",
            Verdict::Fails => "FAILS",
            Verdict::OutOfHypothesis => "OUT_OF_HYPOTHESIS",
            Verdict::NotApplicable => "NOT_APPLICABLE",
        })
    }
}

/// One line of the report. Field declaration order is the canonical key
/// order of the serialized object; timings sit last and are excluded
/// from the determinism hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub schema_version: u32,
    pub id: u64,
    pub family: String,
    pub generator_seed: u64,
    pub n: usize,
    pub status: RecordStatus,
    pub provenance: BTreeMap<String, String>,
    pub degrees: Vec<i64>,
    pub keller: bool,
    pub druzkowski_corank: Option<usize>,
    pub extension_degree: Option<u32>,
    pub minpoly_degrees: Option<Vec<u32>>,
    pub formanek_ok: Option<bool>,
    pub certificate_rule: Option<String>,
    pub certificate_verified: Option<bool>,
    pub degree_conjecture: Option<Verdict>,
    pub gcd_conjecture: Option<Verdict>,
    pub inverted: Option<bool>,
    pub tower_degrees: Option<Vec<u32>>,
    pub note: Option<String>,
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub reason: String,
    /// Full map file text including provenance comments.
    pub map: String,
    pub record: ScanRecord,
    /// Records finished before the abort.
    pub completed: Vec<ScanRecord>,
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.reason)?;
        writeln!(f, "map:")?;
        write!(f, "{}", self.map)?;
        write!(
            f,
            "record: {}",
            serde_json::to_string(&self.record).expect("records serialize")
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error("config line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },
    #[error("report line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("report schema version {found}, this build reads {expected}")]
    Schema { found: u32, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("COUNTEREXAMPLE-CANDIDATE: {0}")]
    Counterexample(Box<CounterexampleReport>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ScanSummary {
    pub total: usize,
    pub keller: usize,
    pub by_status: BTreeMap<String, usize>,
    pub by_rule: BTreeMap<String, usize>,
    pub degree_conjecture: BTreeMap<String, usize>,
    pub gcd_conjecture: BTreeMap<String, usize>,
}

impl ScanSummary {
    pub fn from_records(records: &[ScanRecord]) -> Self {
        let mut s = ScanSummary::default();
        for r in records {
            s.total += 1;
            if r.keller {
                s.keller += 1;
            }
            *s.by_status.entry(r.status.to_string()).or_default() += 1;
            if let Some(rule) = &r.certificate_rule {
                *s.by_rule.entry(rule.clone()).or_default() += 1;
            }
            if let Some(v) = r.degree_conjecture {
                *s.degree_conjecture.entry(v.to_string()).or_default() += 1;
            }
            if let Some(v) = r.gcd_conjecture {
                *s.gcd_conjecture.entry(v.to_string()).or_default() += 1;
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    pub summary: ScanSummary,
}

fn groebner_budget(e: &GroebnerError) -> bool {
    matches!(e, GroebnerError::PairBudget { .. } | GroebnerError::TermBudget { .. })
}

fn ext_budget(e: &ExtError) -> bool {
    match e {
        ExtError::Groebner(g) => groebner_budget(g),
        ExtError::DegenerateSamples { .. } => true,
        _ => false,
    }
}

fn criteria_budget(e: &CriteriaError) -> bool {
    match e {
        CriteriaError::Ext(x) => ext_budget(x),
        CriteriaError::Endo(EndoError::Groebner(g)) => groebner_budget(g),
        CriteriaError::Groebner(g) => groebner_budget(g),
        _ => false,
    }
}

/// Per-map failure bookkeeping: budget exhaustion is an expected,
/// explicitly recorded outcome; anything else is an analysis error.
#[derive(Default)]
struct Tally {
    budget: bool,
    error: bool,
    notes: Vec<String>,
}

impl Tally {
    fn miss(&mut self, check: Check, e: &CriteriaError) {
        if criteria_budget(e) {
            self.budget = true;
        } else {
            self.error = true;
        }
        self.notes.push(format!("{check}: {e}"));
    }
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn blank_record(id: u64, family: String, seed: u64, n: usize) -> ScanRecord {
    ScanRecord {
        schema_version: SCHEMA_VERSION,
        id,
        family,
        generator_seed: seed,
        n,
        status: RecordStatus::Ok,
        provenance: BTreeMap::new(),
        degrees: Vec::new(),
        keller: false,
        druzkowski_corank: None,
        extension_degree: None,
        minpoly_degrees: None,
        formanek_ok: None,
        certificate_rule: None,
        certificate_verified: None,
        degree_conjecture: None,
        gcd_conjecture: None,
        inverted: None,
        tower_degrees: None,
        note: None,
        timings_ms: BTreeMap::new(),
    }
}

fn abort(record: &mut ScanRecord, map: &PolyMap, reason: String) -> Box<CounterexampleReport> {
    record.note = Some(format!("COUNTEREXAMPLE-CANDIDATE: {reason}"));
    Box::new(CounterexampleReport {
        reason,
        map: map.to_file_string(),
        record: record.clone(),
        completed: Vec::new(),
    })
}

fn analyze_map(
    config: &ScanConfig,
    map: &PolyMap,
    family: String,
    seed: u64,
    id: u64,
    mut timings: BTreeMap<String, u64>,
) -> Result<ScanRecord, Box<CounterexampleReport>> {
    let n = map.nvars();
    let mut record = blank_record(id, family, seed, n);
    record.provenance = map.metadata().clone();
    record.degrees = map.degrees();
    record.keller = map.is_keller();
    if let Some(matrix) = map.metadata().get("matrix") {
        if let Some(a) = parse_matrix(matrix) {
            record.druzkowski_corank = druzkowski_corank(&a).ok();
        }
    }

    let analysis = MapAnalysis::with_budget(map.clone(), seed, config.budget);
    let mut tally = Tally::default();
    for &check in &config.checks {
        let t = Instant::now();
        match check {
            Check::DegreeConjecture => match degree_conjecture_record(&analysis) {
                Ok(rec) => {
                    record.extension_degree = Some(rec.extension_degree);
                    record.degree_conjecture = Some(if rec.holds {
                        Verdict::Holds
                    } else if rec.keller {
                        Verdict::Fails
                    } else {
                        Verdict::OutOfHypothesis
                    });
                    if rec.keller && !rec.holds {
                        return Err(abort(
                            &mut record,
                            map,
                            format!(
                                "Keller map with D = {} above the bound {}",
                                rec.extension_degree, rec.bound
                            ),
                        ));
                    }
                }
                Err(e) => tally.miss(check, &e),
            },
            Check::GcdConjecture => {
                if !record.keller {
                    record.gcd_conjecture = Some(Verdict::OutOfHypothesis);
                } else {
                    match gcd_conjecture_record(&analysis) {
                        Ok(rec) => {
                            record.gcd_conjecture = Some(if !rec.applicable {
                                Verdict::NotApplicable
                            } else if rec.automorphism_confirmed {
                                Verdict::Holds
                            } else {
                                Verdict::Fails
                            });
                            if rec.counterexample_candidate() {
                                return Err(abort(
                                    &mut record,
                                    map,
                                    "Keller map with pairwise coprime degrees failed to invert"
                                        .to_string(),
                                ));
                            }
                        }
                        Err(e) => tally.miss(check, &e),
                    }
                }
            }
            Check::Formanek => match verify_formanek_with_budget(map, seed, &config.budget) {
                Ok(rep) => record.formanek_ok = Some(rep.ok),
                Err(e) => tally.miss(check, &e.into()),
            },
            Check::Minpoly => {
                let mut degrees = Vec::with_capacity(n);
                let mut complete = true;
                for i in 0..n {
                    let sub = seed.wrapping_add(1 + i as u64);
                    match coordinate_minpoly_with_budget(map, i, sub, &config.budget) {
                        Ok((d, _)) => degrees.push(d),
                        Err(e) => {
                            tally.miss(check, &e.into());
                            complete = false;
                            break;
                        }
                    }
                }
                if complete {
                    record.minpoly_degrees = Some(degrees);
                }
            }
            Check::Classify => {
                if record.keller {
                    match analysis.classify() {
                        Ok(cert) => {
                            record.certificate_rule = Some(cert.rule.name().to_string());
                            record.certificate_verified = Some(cert.verified_by_inversion);
                        }
                        Err(e) => tally.miss(check, &e),
                    }
                }
            }
            Check::Invert => match analysis.inverse() {
                Ok(inverse) => {
                    record.inverted = Some(inverse.is_some());
                    if record.keller && inverse.is_none() {
                        return Err(abort(
                            &mut record,
                            map,
                            "Keller map failed to invert".to_string(),
                        ));
                    }
                }
                Err(e) => tally.miss(check, &e),
            },
            Check::Tower => {
                let mut degrees = Vec::with_capacity(n);
                let mut complete = true;
                for i in 0..n {
                    let sub = seed.wrapping_add(1 + i as u64);
                    match tower_degree_with_budget(map, i, sub, &config.budget) {
                        Ok(d) => degrees.push(d),
                        Err(e) => {
                            tally.miss(check, &e.into());
                            complete = false;
                            break;
                        }
                    }
                }
                if complete {
                    record.tower_degrees = Some(degrees);
                }
            }
        }
        timings.insert(check.name().to_string(), ms(t));
    }

    if tally.budget {
        record.status = RecordStatus::BudgetExceeded;
    } else if tally.error {
        record.status = RecordStatus::AnalysisError;
    }
    if !tally.notes.is_empty() {
        record.note = Some(tally.notes.join("; "));
    }
    record.timings_ms = timings;
    Ok(record)
}

fn generator_failed_record(
    id: u64,
    spec: &GeneratorSpec,
    e: &EndoError,
    elapsed: u64,
) -> ScanRecord {
    let mut record = blank_record(id, spec.family.name().to_string(), spec.seed, spec.n);
    record.status = RecordStatus::GeneratorFailed;
    record.provenance.insert("family".into(), spec.family.name().to_string());
    record.provenance.insert("seed".into(), spec.seed.to_string());
    record.provenance.insert("n".into(), spec.n.to_string());
    record.provenance.insert("degree".into(), spec.degree.to_string());
    record.note = Some(e.to_string());
    record.timings_ms.insert("generate".into(), elapsed);
    record
}

/// Runs the whole corpus in map-index order. Returns all records plus
/// the summary, or the counterexample report if a Keller map broke one
/// of the conjecture checks.
pub fn run_scan(config: &ScanConfig) -> Result<ScanOutcome, ScanError> {
    enum Job {
        Generate(GeneratorSpec),
        Literal(PolyMap),
    }
    let span = config.n_max - config.n_min + 1;
    let mut jobs: Vec<Job> = Vec::new();
    for req in &config.families {
        for k in 0..req.count {
            let n = config.n_min + (k % span);
            jobs.push(Job::Generate(GeneratorSpec {
                family: req.family,
                seed: 0,
                n,
                degree: config.degree,
                factors: config.factors,
                r: config.r.min(n),
            }));
        }
    }
    jobs.extend(config.controls.iter().cloned().map(Job::Literal));

    let mut records: Vec<ScanRecord> = Vec::new();
    for (idx, job) in jobs.into_iter().enumerate() {
        let id = idx as u64;
        let seed = per_map_seed(config.seed, id);
        let (map, family, timings) = match job {
            Job::Generate(mut spec) => {
                spec.seed = seed;
                let t = Instant::now();
                match generate_family(&spec) {
                    Ok(map) => {
                        let mut timings = BTreeMap::new();
                        timings.insert("generate".to_string(), ms(t));
                        (map, spec.family.name().to_string(), timings)
                    }
                    Err(e) => {
                        records.push(generator_failed_record(id, &spec, &e, ms(t)));
                        continue;
                    }
                }
            }
            Job::Literal(map) => (map, "control".to_string(), BTreeMap::new()),
        };
        match analyze_map(config, &map, family, seed, id, timings) {
            Ok(record) => records.push(record),
            Err(mut report) => {
                report.completed = std::mem::take(&mut records);
                return Err(ScanError::Counterexample(report));
            }
        }
    }
    let summary = ScanSummary::from_records(&records);
    Ok(ScanOutcome { records, summary })
}

pub fn report_to_string(records: &[ScanRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_report(path: &Path, records: &[ScanRecord]) -> Result<(), ScanError> {
    std::fs::write(path, report_to_string(records))?;
    Ok(())
}

pub fn parse_report(text: &str) -> Result<Vec<ScanRecord>, ScanError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let record: ScanRecord = serde_json::from_str(line)
            .map_err(|e| ScanError::Malformed { line: idx + 1, msg: e.to_string() })?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(ScanError::Schema {
                found: record.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn read_report(path: &Path) -> Result<Vec<ScanRecord>, ScanError> {
    parse_report(&std::fs::read_to_string(path)?)
}

/// SHA-256 over the serialized records with timing fields cleared, hex
/// encoded. Equal configs must give equal hashes.
pub fn determinism_hash(records: &[ScanRecord]) -> String {
    let mut hasher = Sha256::new();
    for r in records {
        let mut clean = r.clone();
        clean.timings_ms.clear();
        hasher.update(serde_json::to_string(&clean).expect("records serialize"));
        hasher.update(b"\n");
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
