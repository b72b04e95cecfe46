//! Flat `key = value` job files.
//!
//! List keys (`convex`, `concave`, `insert`) may repeat or hold several values
//! separated by `,` (twists) or `;` (insertions). `#` starts a comment.

use std::fmt::Write as _;
use std::path::PathBuf;

use concavex::bundle::{BundleSpec, Insertion};
use concavex::{DescendentReading, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Reading {
    /// Matches the printed descendent tables.
    #[default]
    Published,
    /// Plain flat-coordinate coefficients.
    Mirror,
}

impl Reading {
    pub fn name(self) -> &'static str {
        match self {
            Reading::Published => "published",
            Reading::Mirror => "mirror",
        }
    }

    pub fn engine(self) -> DescendentReading {
        match self {
            Reading::Published => DescendentReading::Published,
            Reading::Mirror => DescendentReading::Mirror,
        }
    }
}

/// Everything a run needs; unset optional fields fall back to defaults.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct JobConfig {
    pub n: Option<usize>,
    pub positives: Vec<u32>,
    pub negatives: Vec<u32>,
    pub points: Option<usize>,
    pub insertions: Vec<Insertion>,
    pub max_degree: Option<usize>,
    pub format: Option<Format>,
    pub reading: Option<Reading>,
    pub eta: bool,
    pub decimal_hint: bool,
    pub out: Option<PathBuf>,
    /// Golden table ids to verify; empty means none.
    pub golden: Vec<u8>,
    pub oracle: bool,
    pub integrality: bool,
    pub divisor: bool,
    pub consistency: bool,
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("{key}: expected a non-negative integer, got {v:?}")))
}

fn parse_enum<T: clap::ValueEnum>(key: &str, v: &str) -> Result<T> {
    T::from_str(v, true).map_err(|_| Error::Parse(format!("{key}: unknown value {v:?}")))
}

/// `all`, `tables` or `figs` select every golden table; otherwise a comma list of ids 1..4.
pub fn parse_golden_set(v: &str) -> Result<Vec<u8>> {
    let v = v.trim();
    if matches!(v, "all" | "tables" | "figs") {
        return Ok(vec![1, 2, 3, 4]);
    }
    let mut ids = Vec::new();
    for part in v.split(',') {
        let id: u8 = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("golden: unknown table {part:?}")))?;
        if !(1..=4).contains(&id) {
            return Err(Error::Parse(format!("golden: no table {id}; expected 1..4")));
        }
        ids.push(id);
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "n" => cfg.n = Some(parse_num(&key, value)?),
                "convex" => {
                    for v in value.split(',').filter(|s| !s.trim().is_empty()) {
                        cfg.positives.push(parse_num(&key, v.trim())?);
                    }
                }
                "concave" => {
                    for v in value.split(',').filter(|s| !s.trim().is_empty()) {
                        cfg.negatives.push(parse_num(&key, v.trim())?);
                    }
                }
                "points" => cfg.points = Some(parse_num(&key, value)?),
                "insert" => {
                    for v in value.split(';').filter(|s| !s.trim().is_empty()) {
                        cfg.insertions.push(v.trim().parse()?);
                    }
                }
                "max-degree" => cfg.max_degree = Some(parse_num(&key, value)?),
                "format" => cfg.format = Some(parse_enum(&key, value)?),
                "reading" => cfg.reading = Some(parse_enum(&key, value)?),
                "eta" => cfg.eta = parse_bool(&key, value)?,
                "decimal-hint" => cfg.decimal_hint = parse_bool(&key, value)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "golden" => cfg.golden = parse_golden_set(value)?,
                "oracle" => cfg.oracle = parse_bool(&key, value)?,
                "integrality" => cfg.integrality = parse_bool(&key, value)?,
                "divisor" => cfg.divisor = parse_bool(&key, value)?,
                "consistency" => cfg.consistency = parse_bool(&key, value)?,
                other => return Err(Error::Parse(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        Ok(cfg)
    }

    /// Serializes to the file format; `parse(to_text())` returns an equal value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(n) = self.n {
            let _ = writeln!(s, "n = {n}");
        }
        for l in &self.positives {
            let _ = writeln!(s, "convex = {l}");
        }
        for k in &self.negatives {
            let _ = writeln!(s, "concave = {k}");
        }
        if let Some(m) = self.points {
            let _ = writeln!(s, "points = {m}");
        }
        for i in &self.insertions {
            let _ = writeln!(s, "insert = {i}");
        }
        if let Some(d) = self.max_degree {
            let _ = writeln!(s, "max-degree = {d}");
        }
        if let Some(f) = self.format {
            let _ = writeln!(s, "format = {}", f.name());
        }
        if let Some(r) = self.reading {
            let _ = writeln!(s, "reading = {}", r.name());
        }
        if !self.golden.is_empty() {
            let ids: Vec<String> = self.golden.iter().map(u8::to_string).collect();
            let _ = writeln!(s, "golden = {}", ids.join(","));
        }
        if let Some(o) = &self.out {
            let _ = writeln!(s, "out = {}", o.display());
        }
        for (k, v) in [
            ("eta", self.eta),
            ("decimal-hint", self.decimal_hint),
            ("oracle", self.oracle),
            ("integrality", self.integrality),
            ("divisor", self.divisor),
            ("consistency", self.consistency),
        ] {
            if v {
                let _ = writeln!(s, "{k} = true");
            }
        }
        s
    }

    /// Fields set in `over` replace those in `self`; list flags replace whole lists.
    pub fn overlay(mut self, over: JobConfig) -> Self {
        if over.n.is_some() {
            self.n = over.n;
        }
        if !over.positives.is_empty() || !over.negatives.is_empty() {
            self.positives = over.positives;
            self.negatives = over.negatives;
        }
        if over.points.is_some() {
            self.points = over.points;
        }
        if !over.insertions.is_empty() {
            self.insertions = over.insertions;
        }
        if over.max_degree.is_some() {
            self.max_degree = over.max_degree;
        }
        if over.format.is_some() {
            self.format = over.format;
        }
        if over.reading.is_some() {
            self.reading = over.reading;
        }
        if over.out.is_some() {
            self.out = over.out;
        }
        self.eta |= over.eta;
        self.decimal_hint |= over.decimal_hint;
        if !over.golden.is_empty() {
            self.golden = over.golden;
        }
        self.oracle |= over.oracle;
        self.integrality |= over.integrality;
        self.divisor |= over.divisor;
        self.consistency |= over.consistency;
        self
    }

    pub fn bundle(&self) -> Result<BundleSpec> {
        let n = self
            .n
            .ok_or_else(|| Error::InvalidBundle("missing --n (ambient dimension)".into()))?;
        BundleSpec::new(n, self.positives.clone(), self.negatives.clone())
    }

    pub fn has_bundle(&self) -> bool {
        self.n.is_some()
    }
}
