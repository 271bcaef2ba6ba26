//! Configuration, the experiment registry and report files behind the
//! `radlab` binary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::formal::{
    compression_identity_check, delta, delta_bar, random_element, realize, support_test,
    FormalElement, SupportVerdict,
};
use crate::linalg::C64;
use crate::semigroup::{audit_colour_map, enumerate_words, Colour, ColourSequence, Word};
use crate::space::{generator_matrix, TruncatedBasis};
use crate::spectral::{
    block_norm, compression_norm_check, intro_counterexample, operator_norm, radical_bound_check,
    random_comparison_instance, semisimple_witness, tail_bound_check, weighted_comparison_check,
};
use crate::tree::{components_in, mirror_path, CheckOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}; expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    /// Largest truncation length any experiment may request.
    pub max_len_cap: usize,
    pub norm_tol: f64,
    pub suite_tol: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            max_len_cap: 20,
            norm_tol: 1e-12,
            suite_tol: 1e-9,
            seed: 0xC0FFEE,
            out_dir: PathBuf::from("radlab-out"),
            format: Format::Csv,
        }
    }
}

impl LabConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, LabError> {
        let config: LabConfig =
            toml::from_str(text).map_err(|e| LabError::Usage(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = fs::read_to_string(path)
            .map_err(|e| LabError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.max_len_cap > crate::semigroup::ENUMERATION_CAP {
            return Err(LabError::Usage(format!(
                "max_len_cap {} exceeds {}",
                self.max_len_cap,
                crate::semigroup::ENUMERATION_CAP
            )));
        }
        if [self.norm_tol, self.suite_tol].iter().any(|t| t.is_nan() || *t <= 0.0) {
            return Err(LabError::Usage("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error(transparent)]
    Core(Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<Error> for LabError {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } | Error::LengthCap { .. } => LabError::Budget(e.to_string()),
            other => LabError::Core(other),
        }
    }
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => 2,
            LabError::Budget(_) => 3,
            LabError::Core(Error::Schema { .. } | Error::Parse { .. } | Error::NotAColour { .. }) => 2,
            LabError::Core(_) | LabError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentId {
    Intro,
    ColourAudit,
    Components,
    Compression,
    BlockNorm,
    Comparison,
    Tail,
    Radical,
    Witness,
    Support,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Intro,
        ExperimentId::ColourAudit,
        ExperimentId::Components,
        ExperimentId::Compression,
        ExperimentId::BlockNorm,
        ExperimentId::Comparison,
        ExperimentId::Tail,
        ExperimentId::Radical,
        ExperimentId::Witness,
        ExperimentId::Support,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Intro => "intro",
            ExperimentId::ColourAudit => "colour-audit",
            ExperimentId::Components => "components",
            ExperimentId::Compression => "compression",
            ExperimentId::BlockNorm => "block-norm",
            ExperimentId::Comparison => "comparison",
            ExperimentId::Tail => "tail",
            ExperimentId::Radical => "radical",
            ExperimentId::Witness => "witness",
            ExperimentId::Support => "support",
        }
    }

    /// The statement each experiment checks.
    pub fn anchor(self) -> &'static str {
        match self {
            ExperimentId::Intro => "||(T T_0)^k|| = 1 on l^2(N); decay of T'^2k for compact perturbations",
            ExperimentId::ColourAudit => "colour map: membership, fixes hS, separates siblings, depth bound, suffix",
            ExperimentId::Components => "components of the n-subgraph are the root or g-paths; mirror paths",
            ExperimentId::Compression => "stratum identities for the depth-n part; ||T|| = ||P_n T P_n||",
            ExperimentId::BlockNorm => "||T|| is the maximum of its component block norms",
            ExperimentId::Comparison => "||M||' <= ||M|| for strictly lower triangular M under halved weight ratios",
            ExperimentId::Tail => "||T_c|| = 2^-depth(c) and ||(1 - P_n) T_c|| <= 2^-(n+1)",
            ExperimentId::Radical => "||(P_0 T P_0)^k|| <= prod eps_j; compression is multiplicative",
            ExperimentId::Witness => "<(UT)^m e_1, e_xi_m> = W(xi_m) lambda^m; power norms bounded below",
            ExperimentId::Support => "first word whose colour trace is a given sequence",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            ExperimentId::Intro => &["kmax", "lambda", "terms"],
            ExperimentId::ColourAudit => &["maxlen"],
            ExperimentId::Components => &["n", "maxlen"],
            ExperimentId::Compression | ExperimentId::BlockNorm => {
                &["n", "count", "maxlen", "terms", "seqlen"]
            }
            ExperimentId::Comparison => &["count", "maxdim"],
            ExperimentId::Tail => &["count", "nmax", "maxcolour"],
            ExperimentId::Radical => &["n", "count", "maxlen", "kmax", "depth", "terms", "seqlen"],
            ExperimentId::Witness => &["t", "m", "element"],
            ExperimentId::Support => &["colours", "maxlen"],
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| LabError::Usage(format!("unknown experiment {s:?}; see --list")))
    }
}

/// `key=value` experiment parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, LabError> {
        let mut map = BTreeMap::new();
        for item in items {
            let item = item.as_ref();
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| LabError::Usage(format!("parameter {item:?} is not key=value")))?;
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(LabError::Usage(format!("parameter {key} given twice")));
            }
        }
        Ok(Params(map))
    }

    fn check_keys(&self, id: ExperimentId) -> Result<(), LabError> {
        let allowed: BTreeSet<_> = id.allowed_params().iter().copied().collect();
        match self.0.keys().find(|k| !allowed.contains(k.as_str())) {
            Some(key) => Err(LabError::Usage(format!(
                "{id} does not take {key:?}; accepted: {}",
                id.allowed_params().join(", ")
            ))),
            None => Ok(()),
        }
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, LabError>
    where
        T::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|e| LabError::Usage(format!("{key}={raw}: {e}"))),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&'static str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Outcome of one experiment: tables for CSV, a JSON document, and the
/// assertions that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub id: ExperimentId,
    pub tables: Vec<Table>,
    pub json: Value,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seventeen significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn outcome(c: CheckOutcome) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn join_words<'a>(words: impl IntoIterator<Item = &'a Word>) -> String {
    words
        .into_iter()
        .map(Word::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

pub fn load_element(path: &Path) -> Result<FormalElement, LabError> {
    let text = fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        LabError::Core(Error::Schema {
            pointer: String::new(),
            message: e.to_string(),
        })
    })?;
    Ok(FormalElement::from_json_value(&value)?)
}

pub fn save_element(path: &Path, element: &FormalElement) -> Result<(), LabError> {
    let mut text = serde_json::to_string_pretty(&element.to_json()).expect("serializes");
    text.push('\n');
    write_atomically(path, text.as_bytes())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let io = |source| LabError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Writes `<id>.json`, or one CSV per table: `<id>.csv` for the first and
/// `<id>-<table>.csv` for the rest. Returns the written paths.
pub fn save_report(dir: &Path, report: &Report, format: Format) -> Result<Vec<PathBuf>, LabError> {
    fs::create_dir_all(dir).map_err(|source| LabError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    match format {
        Format::Json => {
            let doc = json!({
                "experiment": report.id.name(),
                "passed": report.passed(),
                "failures": report.failures,
                "report": report.json,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("serializes");
            text.push('\n');
            let path = dir.join(format!("{}.json", report.id));
            write_atomically(&path, text.as_bytes())?;
            written.push(path);
        }
        Format::Csv => {
            for (i, table) in report.tables.iter().enumerate() {
                let name = if i == 0 {
                    format!("{}.csv", report.id)
                } else {
                    format!("{}-{}.csv", report.id, table.name)
                };
                let mut writer = csv::Writer::from_writer(Vec::new());
                writer.write_record(&table.header).expect("in-memory write");
                for row in &table.rows {
                    writer.write_record(row).expect("in-memory write");
                }
                let bytes = writer.into_inner().expect("in-memory write");
                let path = dir.join(name);
                write_atomically(&path, &bytes)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

/// The record printed by `radlab colour <word>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColourRecord {
    pub word: Word,
    pub length: usize,
    pub depth: usize,
    pub is_colour: bool,
    pub colour: Option<Colour>,
    pub weight_log2: i64,
    pub path_weight_log2: i64,
}

impl ColourRecord {
    pub fn new(text: &str) -> Result<Self, Error> {
        let word: Word = text.parse()?;
        Ok(ColourRecord {
            length: word.len(),
            depth: word.depth(),
            is_colour: word.is_colour(),
            colour: word.colour().ok(),
            weight_log2: word.weight().log2(),
            path_weight_log2: word.path_weight().log2(),
            word,
        })
    }
}

impl fmt::Display for ColourRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dyadic = |log2: i64| format!("2^{log2} ({})", real(2f64.powi(log2 as i32)));
        writeln!(f, "word      {}", self.word)?;
        writeln!(f, "length    {}", self.length)?;
        writeln!(f, "depth     {}", self.depth)?;
        writeln!(f, "is_colour {}", self.is_colour)?;
        match &self.colour {
            Some(c) => writeln!(f, "colour    {c}")?,
            None => writeln!(f, "colour    none")?,
        }
        writeln!(f, "w         {}", dyadic(self.weight_log2))?;
        write!(f, "W         {}", dyadic(self.path_weight_log2))
    }
}

fn check_len(max_len: usize, config: &LabConfig) -> Result<(), LabError> {
    if max_len > config.max_len_cap {
        return Err(LabError::Budget(format!(
            "truncation length {max_len} exceeds the cap {}: basis dimension would be {}",
            config.max_len_cap,
            (1u64 << (max_len + 1)) - 1
        )));
    }
    Ok(())
}

fn seeded_elements(
    config: &LabConfig,
    basis: &TruncatedBasis,
    count: usize,
    depth: usize,
    terms: usize,
    seqlen: usize,
) -> Vec<FormalElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..count)
        .map(|_| random_element(&mut rng, basis, depth, terms, seqlen))
        .collect()
}

/// Seeded elements with a nonzero depth-0 part plus terms of depth
/// `<= depth`, so that the root compression is not trivially zero.
pub fn radical_elements(
    seed: u64,
    basis: &TruncatedBasis,
    count: usize,
    depth: usize,
    terms: usize,
    seqlen: usize,
) -> Vec<FormalElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let ray = random_element(&mut rng, basis, 0, terms, seqlen);
            ray.add(&random_element(&mut rng, basis, depth, terms, seqlen))
        })
        .collect()
}

/// Runs one experiment. Assertion failures are reported in
/// [`Report::failures`]; errors mean the run itself could not happen.
pub fn run_experiment(id: ExperimentId, params: &Params, config: &LabConfig) -> Result<Report, LabError> {
    params.check_keys(id)?;
    let tol = config.suite_tol;
    let mut failures = Vec::new();
    let mut tables = Vec::new();
    let json;
    match id {
        ExperimentId::Intro => {
            let kmax = params.get("kmax", 10usize)?;
            let lambda = params.get("lambda", 1.0f64)?;
            let terms = params.get("terms", 5usize)?;
            if kmax == 0 {
                return Err(LabError::Usage("kmax must be at least 1".into()));
            }
            let report = intro_counterexample(kmax, lambda, terms)?;
            let mut main = Table::new("intro", &["k", "norm", "exactly_one", "maps_e1"]);
            for row in &report.rows {
                main.push(vec![row.k.to_string(), real(row.norm), flag(row.exactly_one), flag(row.maps_e1_correctly)]);
                if !row.exactly_one || (row.norm - 1.0).abs() > config.norm_tol {
                    failures.push(format!("||(T T_0)^{}|| = {} is not 1", row.k, real(row.norm)));
                }
                if !row.maps_e1_correctly {
                    failures.push(format!("(T T_0)^{} e_1 is not e_{}", row.k, 2 * row.k + 1));
                }
            }
            let mut squares = Table::new("squares", &["n", "epsilon", "delta", "restricted_square"]);
            for s in &report.squares {
                squares.push(vec![s.n.to_string(), real(s.epsilon), real(s.delta), real(s.restricted_square)]);
                if s.restricted_square > s.delta + tol {
                    failures.push(format!("||T'^2 on E_{}|| exceeds delta", s.n));
                }
            }
            let mut decay = Table::new("decay", &["k", "norm", "bound"]);
            for d in &report.decay {
                decay.push(vec![d.k.to_string(), real(d.norm), real(d.bound)]);
                if d.norm > d.bound + tol {
                    failures.push(format!("||T'^{}|| exceeds the delta product", 2 * d.k));
                }
            }
            tables.extend([main, squares, decay]);
            json = to_json(&report);
        }
        ExperimentId::ColourAudit => {
            let max_len = params.get("maxlen", 12usize)?;
            check_len(max_len, config)?;
            let audit = audit_colour_map(max_len)?;
            let mut table = Table::new("failures", &["word", "property"]);
            for f in &audit.failures {
                let property = to_json(&f.property).as_str().unwrap_or_default().to_string();
                failures.push(format!("{}: {property}", f.word));
                table.push(vec![f.word.to_string(), property]);
            }
            tables.push(table);
            json = to_json(&audit);
        }
        ExperimentId::Components => {
            let n = params.get("n", 1usize)?;
            let max_len = params.get("maxlen", 6usize)?;
            check_len(max_len, config)?;
            let basis = TruncatedBasis::new(max_len)?;
            let comps = components_in(&basis, n)?;
            let mut table = Table::new(
                "components",
                &["kind", "base", "steps", "members", "entry", "interior", "exit", "mirror"],
            );
            let mut reports = Vec::new();
            for comp in &comps {
                let report = comp.report(n);
                let mirror = if comp.is_root() || comp.cut_by_truncation {
                    None
                } else {
                    match mirror_path(comp, n) {
                        Ok(path) => {
                            let matches = (1..=comp.steps).all(|i| {
                                path[i].colour().ok() == comp.members[i].colour().ok()
                            });
                            if !matches || path[0].depth() > n {
                                failures.push(format!("mirror of component at {} does not match", comp.base));
                            }
                            Some(path)
                        }
                        Err(e) => {
                            failures.push(format!("mirror of component at {}: {e}", comp.base));
                            None
                        }
                    }
                };
                let (entry, interior, exit) = match report.checks {
                    Some(c) => {
                        if c.any_failure() {
                            failures.push(format!("component at {} fails its colour-depth checks", comp.base));
                        }
                        (outcome(c.entry), outcome(c.interior), outcome(c.exit))
                    }
                    None => Default::default(),
                };
                table.push(vec![
                    to_json(&report.kind).as_str().unwrap_or_default().to_string(),
                    report.base.to_string(),
                    report.steps.to_string(),
                    join_words(&report.members),
                    entry,
                    interior,
                    exit,
                    mirror.as_deref().map(join_words).unwrap_or_default(),
                ]);
                let mut value = to_json(&report);
                value["mirror"] = to_json(&mirror);
                reports.push(value);
            }
            tables.push(table);
            json = json!({ "n": n, "max_len": max_len, "components": reports });
        }
        ExperimentId::Compression | ExperimentId::BlockNorm => {
            let n = params.get("n", 1usize)?;
            let count = params.get("count", 20usize)?;
            let max_len = params.get("maxlen", 8usize)?;
            let terms = params.get("terms", 5usize)?;
            let seqlen = params.get("seqlen", 3usize)?;
            check_len(max_len, config)?;
            let basis = TruncatedBasis::new(max_len)?;
            let elements = seeded_elements(config, &basis, count, n, terms, seqlen);
            let mut rows = Vec::new();
            if id == ExperimentId::Compression {
                let mut table = Table::new(
                    "compression",
                    &["index", "norm", "compressed_norm", "relative_gap", "diagonal_deviation",
                      "off_diagonal_deviation", "partition_exact", "delta_bar_norm"],
                );
                for (i, f) in elements.iter().enumerate() {
                    let (norm, compressed) = compression_norm_check(f, n, &basis)?;
                    let gap = (norm - compressed).abs();
                    let identity = compression_identity_check(f, n, &basis);
                    let reassembled = (0..=f.max_depth()).fold(FormalElement::zero(), |acc, j| acc.add(&delta(f, j)));
                    let partition_exact = reassembled == *f;
                    let delta_bar_norm = operator_norm(&realize(&delta_bar(f, n), &basis), config.norm_tol)?.value;
                    if gap > 1e-8 * norm {
                        failures.push(format!("element {i}: ||T|| - ||P_n T P_n|| = {}", real(gap)));
                    }
                    if identity.max_deviation() != 0.0 {
                        failures.push(format!("element {i}: stratum identity deviates by {}", real(identity.max_deviation())));
                    }
                    if !partition_exact {
                        failures.push(format!("element {i}: depth parts do not reassemble"));
                    }
                    if delta_bar_norm > norm + tol {
                        failures.push(format!("element {i}: depth-{n} part has larger norm"));
                    }
                    table.push(vec![
                        i.to_string(), real(norm), real(compressed), real(gap / norm.max(f64::MIN_POSITIVE)),
                        real(identity.diagonal_deviation), real(identity.off_diagonal_deviation),
                        flag(partition_exact), real(delta_bar_norm),
                    ]);
                    rows.push(json!({
                        "element": f.to_json(), "norm": norm, "compressed_norm": compressed,
                        "identity": identity, "partition_exact": partition_exact,
                        "delta_bar_norm": delta_bar_norm,
                    }));
                }
                tables.push(table);
            } else {
                let mut table = Table::new("block-norm", &["index", "norm", "block_norm", "components"]);
                for (i, f) in elements.iter().enumerate() {
                    let t = realize(f, &basis);
                    let norm = operator_norm(&t, config.norm_tol)?.value;
                    let blocks = block_norm(&t, n)?;
                    if (norm - blocks.value).abs() > tol {
                        failures.push(format!("element {i}: block maximum {} differs from {}", real(blocks.value), real(norm)));
                    }
                    table.push(vec![i.to_string(), real(norm), real(blocks.value), blocks.per_component.len().to_string()]);
                    rows.push(json!({ "element": f.to_json(), "norm": norm, "block_norm": blocks }));
                }
                tables.push(table);
            }
            json = json!({ "n": n, "max_len": max_len, "elements": rows });
        }
        ExperimentId::Comparison => {
            let count = params.get("count", 100usize)?;
            let max_dim = params.get("maxdim", 32usize)?;
            if max_dim < 2 {
                return Err(LabError::Usage("maxdim must be at least 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut table = Table::new(
                "comparison",
                &["index", "dimension", "normal", "primed", "shift_bound", "geometric_bound"],
            );
            let mut rows = Vec::new();
            for i in 0..count {
                let dim = rng.random_range(2..=max_dim);
                let (m, omega, omega_primed) = random_comparison_instance(&mut rng, dim);
                let r = weighted_comparison_check(&m, &omega, &omega_primed)?;
                if !r.holds(tol) {
                    failures.push(format!("instance {i}: primed norm {} exceeds {}", real(r.primed), real(r.normal)));
                }
                table.push(vec![
                    i.to_string(), dim.to_string(), real(r.normal), real(r.primed),
                    real(r.shift_bound), real(r.geometric_bound),
                ]);
                rows.push(json!({ "dimension": dim, "result": r }));
            }
            tables.push(table);
            json = json!({ "instances": rows });
        }
        ExperimentId::Tail => {
            let count = params.get("count", 20usize)?;
            let n_max = params.get("nmax", 2usize)?;
            let max_colour = params.get("maxcolour", 6usize)?;
            check_len(max_colour + 2, config)?;
            let colours = sample_colours(config.seed, count, max_colour)?;
            let mut table = Table::new(
                "tail",
                &["colour", "max_len", "norm", "expected_norm", "n", "tail_norm", "bound", "max_weight"],
            );
            let mut rows = Vec::new();
            for c in &colours {
                let basis = TruncatedBasis::new(c.len() + 2)?;
                let norm = operator_norm(&generator_matrix(c, &basis), config.norm_tol)?.value;
                let expected = c.word().weight().to_f64();
                if (norm - expected).abs() > 1e-10 {
                    failures.push(format!("||T_{c}|| = {} is not {}", real(norm), real(expected)));
                }
                for n in 0..=n_max {
                    let tail = tail_bound_check(c, n, &basis)?;
                    if !tail.holds(1e-10) {
                        failures.push(format!("tail of T_{c} at n = {n}: {} against {}", real(tail.computed), real(tail.bound)));
                    }
                    table.push(vec![
                        c.to_string(), basis.max_len().to_string(), real(norm), real(expected),
                        n.to_string(), real(tail.computed), real(tail.bound), real(tail.max_weight),
                    ]);
                    rows.push(json!({ "colour": c, "norm": norm, "n": n, "tail": tail }));
                }
            }
            tables.push(table);
            json = json!({ "rows": rows });
        }
        ExperimentId::Radical => {
            let n = params.get("n", 0usize)?;
            let count = params.get("count", 10usize)?;
            let max_len = params.get("maxlen", 10usize)?;
            let k_max = params.get("kmax", 8usize)?;
            let depth = params.get("depth", 2usize)?;
            let terms = params.get("terms", 5usize)?;
            let seqlen = params.get("seqlen", 3usize)?;
            check_len(max_len, config)?;
            let basis = TruncatedBasis::new(max_len)?;
            let elements = radical_elements(config.seed, &basis, count, depth, terms, seqlen);
            let mut table = Table::new("radical", &["index", "k", "norm", "root", "bound"]);
            let mut rows = Vec::new();
            for (i, f) in elements.iter().enumerate() {
                let report = radical_bound_check(f, n, &basis, k_max)?;
                if report.homomorphism_deviation != 0.0 {
                    failures.push(format!("element {i}: compression not multiplicative, deviation {}", real(report.homomorphism_deviation)));
                }
                for row in &report.rows {
                    if let Some(b) = row.bound {
                        if row.norm > b + tol {
                            failures.push(format!("element {i}: power {} has norm {} above {}", row.k, real(row.norm), real(b)));
                        }
                    }
                    table.push(vec![
                        i.to_string(), row.k.to_string(), real(row.norm), real(row.root),
                        row.bound.map(real).unwrap_or_default(),
                    ]);
                }
                rows.push(json!({ "element": f.to_json(), "report": report }));
            }
            tables.push(table);
            json = json!({ "n": n, "max_len": max_len, "elements": rows });
        }
        ExperimentId::Witness => {
            let t: Word = params.get("t", Word::from_letters(vec![crate::semigroup::Generator::H]))?;
            let m = params.get("m", 2usize)?;
            if m == 0 {
                return Err(LabError::Usage("m must be at least 1".into()));
            }
            let element = match params.raw("element") {
                Some(path) => load_element(Path::new(path))?,
                None => FormalElement::colour("h".parse().expect("h is a colour")),
            };
            let r = semisimple_witness(&element, &t, m, config.max_len_cap)?;
            if !r.holds(tol) {
                failures.push(format!(
                    "inner product {} against predicted {}, norm {} against {}",
                    r.inner, r.predicted, real(r.norm_m), real(r.lower_bound)
                ));
            }
            let mut table = Table::new(
                "witness",
                &["t", "m", "inner_re", "inner_im", "predicted_re", "predicted_im", "norm_m", "lower_bound"],
            );
            table.push(vec![
                r.t.to_string(), m.to_string(), real(r.inner.re), real(r.inner.im),
                real(r.predicted.re), real(r.predicted.im), real(r.norm_m), real(r.lower_bound),
            ]);
            tables.push(table);
            json = json!({ "element": element.to_json(), "witness": r });
        }
        ExperimentId::Support => {
            let colours = params.raw("colours").unwrap_or("hg,g");
            let max_len = params.get("maxlen", 6usize)?;
            check_len(max_len, config)?;
            let sequence = ColourSequence::new(
                colours
                    .split(',')
                    .map(|c| c.trim().parse::<Colour>())
                    .collect::<Result<Vec<_>, _>>()?,
            )?;
            let verdict = support_test(&sequence, max_len)?;
            let witness = match &verdict {
                SupportVerdict::Witness(t) => t.to_string(),
                SupportVerdict::NoWitnessUpTo(_) => String::new(),
            };
            let mut table = Table::new("support", &["sequence", "max_len", "witness"]);
            table.push(vec![sequence.to_string(), max_len.to_string(), witness]);
            tables.push(table);
            json = json!({ "sequence": sequence.to_string(), "verdict": verdict });
        }
    }
    Ok(Report {
        id,
        tables,
        json,
        failures,
    })
}

/// `count` distinct colours of length `<= max_len`, drawn with the seed and
/// returned in the global order.
pub fn sample_colours(seed: u64, count: usize, max_len: usize) -> Result<Vec<Colour>, Error> {
    let all: Vec<Colour> = enumerate_words(max_len)?
        .into_iter()
        .skip(1)
        .filter(Word::is_colour)
        .map(|w| Colour::new(w).expect("filtered"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, all.len(), count.min(all.len())).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| all[i].clone()).collect())
}

/// Runs experiments on up to `jobs` threads; results come back in input
/// order.
pub fn run_many(
    ids: &[ExperimentId],
    params: &Params,
    config: &LabConfig,
    jobs: usize,
) -> Vec<Result<Report, LabError>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<Report, LabError>>>> = ids.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, ids.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&id) = ids.get(i) else { break };
                let result = run_experiment(id, params, config);
                *slots[i].lock().expect("no poisoned slot") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("no poisoned slot").expect("every slot filled"))
        .collect()
}

/// Builds a single-term element, used by the CLI tests and the FFI.
pub fn element_from_colours(colours: &[&str], coeff: C64) -> Result<FormalElement, Error> {
    let sequence = ColourSequence::new(
        colours
            .iter()
            .map(|c| c.parse())
            .collect::<Result<Vec<Colour>, _>>()?,
    )?;
    Ok(FormalElement::monomial(coeff, sequence))
}
