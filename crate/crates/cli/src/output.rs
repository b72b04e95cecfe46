//! Table, CSV and JSON renderings of a run. Rows come out in (d, insertions) order.

use serde::Serialize;

use concavex::bundle::{BundleSpec, InsertionSpec};
use concavex::series::rat::{approx_f64, format_rat};
use concavex::{PipelineClass, Rat};

use crate::config::{Format, Reading};

pub struct Row {
    pub d: usize,
    pub insertions: InsertionSpec,
    pub k: Rat,
    pub eta: Option<Rat>,
}

pub struct Report {
    pub bundle: BundleSpec,
    pub class: PipelineClass,
    pub max_degree: usize,
    pub reading: Reading,
    pub eta: bool,
    pub decimal_hint: bool,
    pub rows: Vec<Row>,
}

const ETA_NAIVE: &str = "naive multiple-cover inversion";
const HINT_NOTE: &str = "approximate, non-authoritative";

fn signature(s: &InsertionSpec) -> String {
    s.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
}

fn hint(r: &Rat) -> String {
    format!("{:.6e}", approx_f64(r))
}

impl Report {
    fn two_point(&self) -> bool {
        self.rows.iter().any(|r| r.insertions.m() == 2)
    }

    fn eta_label(&self) -> &'static str {
        if self.two_point() {
            ETA_NAIVE
        } else {
            "multiple-cover inversion"
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn table(&self) -> String {
        let mut head = vec!["d".to_string(), "insertions".into(), "K".into()];
        if self.eta {
            head.push("eta".into());
        }
        if self.decimal_hint {
            head.push("~K".into());
        }
        let mut cells: Vec<Vec<String>> = vec![head];
        for r in &self.rows {
            let mut line = vec![r.d.to_string(), signature(&r.insertions), format_rat(&r.k)];
            if self.eta {
                line.push(r.eta.as_ref().map(format_rat).unwrap_or_else(|| "-".into()));
            }
            if self.decimal_hint {
                line.push(hint(&r.k));
            }
            cells.push(line);
        }
        let cols = cells[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| cells.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = format!(
            "# {}  class {}  reading {}  D={}\n",
            self.bundle,
            self.class,
            self.reading.name(),
            self.max_degree
        );
        if self.eta {
            out.push_str(&format!("# eta: {}\n", self.eta_label()));
        }
        if self.decimal_hint {
            out.push_str(&format!("# ~K: {HINT_NOTE}\n"));
        }
        for line in &cells {
            let padded: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if c == 1 {
                        format!("{:<w$}", s, w = widths[c])
                    } else {
                        format!("{:>w$}", s, w = widths[c])
                    }
                })
                .collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["d", "insertions", "K", "eta"];
        if self.decimal_hint {
            head.push("decimal_hint_non_authoritative");
        }
        w.write_record(&head).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![
                r.d.to_string(),
                signature(&r.insertions),
                format_rat(&r.k),
                r.eta.as_ref().map(format_rat).unwrap_or_default(),
            ];
            if self.decimal_hint {
                rec.push(hint(&r.k));
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn json(&self) -> String {
        let doc = JsonDoc {
            bundle: JsonBundle {
                n: self.bundle.n,
                positives: &self.bundle.positives,
                negatives: &self.bundle.negatives,
            },
            invariants: self
                .rows
                .iter()
                .map(|r| JsonRow {
                    d: r.d,
                    insertions: r
                        .insertions
                        .points
                        .iter()
                        .map(|p| JsonInsertion { h: p.h, psi: p.psi })
                        .collect(),
                    k: format_rat(&r.k),
                    eta: r.eta.as_ref().map(format_rat),
                    decimal_hint: self.decimal_hint.then(|| hint(&r.k)),
                })
                .collect(),
            meta: JsonMeta {
                max_degree: self.max_degree,
                pipeline_class: self.class.to_string(),
                reading: self.reading.name(),
                eta_convention: self.eta.then(|| self.eta_label()),
                decimal_hint: self.decimal_hint.then_some(HINT_NOTE),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    bundle: JsonBundle<'a>,
    invariants: Vec<JsonRow>,
    meta: JsonMeta,
}

#[derive(Serialize)]
struct JsonBundle<'a> {
    n: usize,
    positives: &'a [u32],
    negatives: &'a [u32],
}

#[derive(Serialize)]
struct JsonInsertion {
    h: u32,
    psi: u32,
}

#[derive(Serialize)]
struct JsonRow {
    d: usize,
    insertions: Vec<JsonInsertion>,
    #[serde(rename = "K")]
    k: String,
    eta: Option<String>,
    #[serde(rename = "decimalHint", skip_serializing_if = "Option::is_none")]
    decimal_hint: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonMeta {
    max_degree: usize,
    pipeline_class: String,
    reading: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_convention: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimal_hint: Option<&'static str>,
}
