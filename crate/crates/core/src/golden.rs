//! Printed reference tables for O(3)⊕O(−3) on P^5, shipped as `data/golden.csv`.
//!
//! Values are stored exactly as printed, misprints included.

use serde::Deserialize;

use crate::bundle::{BundleSpec, Insertion, InsertionSpec};
use crate::error::{Error, Result};
use crate::series::rat::parse_rat;
use crate::series::Rat;

pub const GOLDEN_CSV: &str = include_str!("../data/golden.csv");

/// Invariant or its resummed integral counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub enum Quantity {
    K,
    #[serde(rename = "eta")]
    Eta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenRow {
    pub table: u8,
    pub quantity: Quantity,
    pub insertions: InsertionSpec,
    pub d: usize,
    pub value: Rat,
}

#[derive(Deserialize)]
struct RawRow {
    table: u8,
    quantity: Quantity,
    insertions: String,
    d: usize,
    value: String,
}

/// The bundle all printed tables refer to.
pub fn golden_bundle() -> BundleSpec {
    BundleSpec::new(5, vec![3], vec![3]).expect("valid bundle")
}

/// Parses `H^2;tau_1(H)` style signatures.
pub fn parse_signature(s: &str) -> Result<InsertionSpec> {
    let points = s
        .split(';')
        .map(str::parse::<Insertion>)
        .collect::<Result<Vec<_>>>()?;
    InsertionSpec::new(points)
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.deserialize::<RawRow>() {
        let r = rec.map_err(|e| Error::Parse(e.to_string()))?;
        out.push(GoldenRow {
            table: r.table,
            quantity: r.quantity,
            insertions: parse_signature(&r.insertions)?,
            d: r.d,
            value: parse_rat(&r.value)?,
        });
    }
    Ok(out)
}

/// All shipped rows.
pub fn golden_rows() -> Vec<GoldenRow> {
    parse_golden(GOLDEN_CSV).expect("shipped golden data parses")
}

/// Rows for one table and quantity, ordered by signature then degree.
pub fn table(id: u8, quantity: Quantity) -> Vec<GoldenRow> {
    let mut rows: Vec<GoldenRow> = golden_rows()
        .into_iter()
        .filter(|r| r.table == id && r.quantity == quantity)
        .collect();
    rows.sort_by(|a, b| (&a.insertions, a.d).cmp(&(&b.insertions, b.d)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_data_is_complete() {
        let rows = golden_rows();
        assert_eq!(rows.len(), 90);
        assert_eq!(table(1, Quantity::K).len(), 10);
        assert_eq!(table(1, Quantity::Eta).len(), 10);
        assert_eq!(table(2, Quantity::K).len(), 30);
        assert_eq!(table(3, Quantity::K).len(), 10);
        assert_eq!(table(3, Quantity::Eta).len(), 10);
        assert_eq!(table(4, Quantity::K).len(), 20);
        let b = golden_bundle();
        for r in &rows {
            assert!(b.dimension_check(&r.insertions).admissible, "{:?}", r);
        }
    }

    #[test]
    fn bad_rows_are_errors() {
        let text = "table,quantity,insertions,d,value\n1,K,H^3,1,x\n";
        assert!(parse_golden(text).is_err());
        let text = "table,quantity,insertions,d,value\n1,Q,H^3,1,1\n";
        assert!(parse_golden(text).is_err());
    }
}
