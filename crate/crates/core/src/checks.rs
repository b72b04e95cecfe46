//! Self-checks shared by the test suites and the `check` command.

use std::collections::BTreeMap;

use crate::bundle::{BundleSpec, Insertion, InsertionSpec};
use crate::closed_forms::{am_invert_series, integrality_report, table_from_series};
use crate::error::Result;
use crate::golden::{self, Quantity};
use crate::localization::{localize_degree1, WeightVector};
use crate::mirror::{DescendentReading, MirrorPipeline};
use crate::recovery::compute;
use crate::series::rat::{format_rat, rat};
use crate::series::Rat;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, mismatches: Vec<String>, total: usize) -> Self {
        let passed = mismatches.is_empty();
        let detail = if passed {
            format!("{total} rows agree")
        } else {
            format!("{} of {total} rows differ: {}", mismatches.len(), mismatches.join("; "))
        };
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

fn mismatch(sig: &InsertionSpec, d: usize, got: &Rat, want: &Rat) -> String {
    format!("d={d} <{sig}> computed {} printed {}", format_rat(got), format_rat(want))
}

/// Compares every printed K row of one table against the pipeline.
pub fn golden_table(pipe: &MirrorPipeline, id: u8, reading: DescendentReading) -> Result<CheckOutcome> {
    let rows = golden::table(id, Quantity::K);
    let mut cache: BTreeMap<InsertionSpec, crate::recovery::InvariantTable> = BTreeMap::new();
    let mut bad = Vec::new();
    for r in &rows {
        if !cache.contains_key(&r.insertions) {
            let max_d = rows.iter().filter(|x| x.insertions == r.insertions).map(|x| x.d).max().unwrap_or(1);
            cache.insert(r.insertions.clone(), compute(pipe, &r.insertions, max_d, reading)?);
        }
        let got = cache[&r.insertions].get(r.d, &r.insertions).cloned().unwrap_or_default();
        if got != r.value {
            bad.push(mismatch(&r.insertions, r.d, &got, &r.value));
        }
    }
    Ok(CheckOutcome::new(format!("table {id} K"), bad, rows.len()))
}

/// Naive m=1 resummation of the computed one-point table against the printed η.
pub fn golden_eta_one_point(pipe: &MirrorPipeline) -> Result<CheckOutcome> {
    let rows = golden::table(1, Quantity::Eta);
    let sig = rows[0].insertions.clone();
    let max_d = rows.iter().map(|r| r.d).max().unwrap_or(1);
    let k = compute(pipe, &sig, max_d, DescendentReading::Mirror)?.by_degree(&sig);
    let eta = am_invert_series(&k, 1, max_d)?;
    let mut bad: Vec<String> = rows
        .iter()
        .filter(|r| eta[&r.d] != r.value)
        .map(|r| mismatch(&sig, r.d, &eta[&r.d], &r.value))
        .collect();
    let report = integrality_report(&table_from_series(&sig, &eta));
    bad.extend(report.failures().map(|(k, v, _)| format!("d={} eta {} is not an integer", k.d, format_rat(v))));
    Ok(CheckOutcome::new("table 1 eta (m=1 inversion, integrality)", bad, rows.len()))
}

/// The two-point η column against a naive m=2 inversion of its own K column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoPointEtaNote {
    pub naive_eta1: Rat,
    pub printed_eta1: Rat,
    /// printed K_1 minus printed η_1.
    pub gap: Rat,
    /// Printed one-point η_1(H^3).
    pub one_point_eta1: Rat,
    /// Degrees ≥ 2 where naive and printed η agree.
    pub agreeing_degrees: Vec<usize>,
    pub disagreeing_degrees: Vec<usize>,
}

impl TwoPointEtaNote {
    pub fn summary(&self) -> String {
        format!(
            "naive m=2 inversion gives eta_1 = {} vs printed {}; K_1 - eta_1 = {} {} eta_1(H^3) = {}; degrees >= 2 agreeing: {:?}, differing: {:?}",
            format_rat(&self.naive_eta1),
            format_rat(&self.printed_eta1),
            format_rat(&self.gap),
            if self.gap == self.one_point_eta1 { "equals" } else { "differs from" },
            format_rat(&self.one_point_eta1),
            self.agreeing_degrees,
            self.disagreeing_degrees
        )
    }
}

pub fn two_point_eta_note() -> Result<TwoPointEtaNote> {
    let k: BTreeMap<usize, Rat> = golden::table(3, Quantity::K).into_iter().map(|r| (r.d, r.value)).collect();
    let printed: BTreeMap<usize, Rat> = golden::table(3, Quantity::Eta).into_iter().map(|r| (r.d, r.value)).collect();
    let max_d = *k.keys().max().unwrap_or(&1);
    let naive = am_invert_series(&k, 2, max_d)?;
    let one_point_eta1 = golden::table(1, Quantity::Eta)
        .into_iter()
        .find(|r| r.d == 1)
        .map(|r| r.value)
        .unwrap_or_default();
    let (agree, differ): (Vec<usize>, Vec<usize>) = (2..=max_d).partition(|d| naive[d] == printed[d]);
    Ok(TwoPointEtaNote {
        naive_eta1: naive[&1].clone(),
        printed_eta1: printed[&1].clone(),
        gap: &k[&1] - &printed[&1],
        one_point_eta1,
        agreeing_degrees: agree,
        disagreeing_degrees: differ,
    })
}

/// d = 1 pipeline values against the localization oracle at several weights.
pub fn oracle_agreement(
    pipe: &MirrorPipeline,
    signatures: &[InsertionSpec],
    seeds: &[u64],
) -> Result<CheckOutcome> {
    let b = pipe.bundle();
    let mut bad = Vec::new();
    for sig in signatures {
        let got = compute(pipe, sig, 1, DescendentReading::Mirror)?.get(1, sig).cloned().unwrap_or_default();
        for &s in seeds {
            let w = WeightVector::random(b.n, s);
            let want = localize_degree1(b, sig, &w)?;
            if got != want {
                bad.push(format!(
                    "<{sig}> pipeline {} oracle {} (seed {s})",
                    format_rat(&got),
                    format_rat(&want)
                ));
            }
        }
    }
    Ok(CheckOutcome::new(
        format!("degree-1 oracle on {b}"),
        bad,
        signatures.len() * seeds.len(),
    ))
}

/// K_d(H^k, H) = d·K_d(H^k), plus its descendent form
/// K_d(H, τ_a(H^i)) = d·K_d(τ_a(H^i)) + K_d(τ_{a−1}(H^{i+1})) in the flat reading.
pub fn divisor_equation(pipe: &MirrorPipeline, max_degree: usize) -> Result<CheckOutcome> {
    let b = pipe.bundle();
    let w1 = b.required_weight(1);
    let mut bad = Vec::new();
    let mut total = 0;
    if w1 < 0 || w1 as usize > b.n {
        return Ok(CheckOutcome::new("divisor equation", vec![], 0));
    }
    let w1 = w1 as u32;
    let reading = DescendentReading::Mirror;
    let one = |i: u32, a: u32| -> Result<BTreeMap<usize, Rat>> {
        let s = InsertionSpec::new(vec![Insertion::new(i, a)])?;
        Ok(compute(pipe, &s, max_degree, reading)?.by_degree(&s))
    };
    let two = |k1: u32, i: u32, a: u32| -> Result<BTreeMap<usize, Rat>> {
        let s = InsertionSpec::new(vec![Insertion::new(k1, 0), Insertion::new(i, a)])?;
        Ok(compute(pipe, &s, max_degree, reading)?.by_degree(&s))
    };
    // H at the second point, and at the first.
    let base = one(w1, 0)?;
    for (label, lhs) in [("(H^k,H)", two(w1, 1, 0)?), ("(H,H^k)", two(1, w1, 0)?)] {
        for d in 1..=max_degree {
            total += 1;
            let want = rat(d as i64) * &base[&d];
            if lhs[&d] != want {
                bad.push(format!("{label} d={d}: {} vs {}", format_rat(&lhs[&d]), format_rat(&want)));
            }
        }
    }
    for a in 1..=w1 {
        let i = w1 - a;
        let lhs = two(1, i, a)?;
        let t = one(i, a)?;
        let lower = one(i + 1, a - 1)?;
        for d in 1..=max_degree {
            total += 1;
            let want = rat(d as i64) * &t[&d] + &lower[&d];
            if lhs[&d] != want {
                bad.push(format!(
                    "(H,tau_{a}(H^{i})) d={d}: {} vs {}",
                    format_rat(&lhs[&d]),
                    format_rat(&want)
                ));
            }
        }
    }
    Ok(CheckOutcome::new(format!("divisor equation on {b}"), bad, total))
}

/// Integrality of the m=1 resummation of a one-point table.
pub fn integrality(pipe: &MirrorPipeline, sig: &InsertionSpec, max_degree: usize) -> Result<CheckOutcome> {
    let k = compute(pipe, sig, max_degree, DescendentReading::Mirror)?.by_degree(sig);
    let eta = am_invert_series(&k, sig.m(), max_degree)?;
    let report = integrality_report(&table_from_series(sig, &eta));
    let bad = report
        .failures()
        .map(|(k, v, _)| format!("d={} eta={}", k.d, format_rat(v)))
        .collect();
    Ok(CheckOutcome::new(format!("integrality of eta <{sig}>"), bad, max_degree))
}

/// Signatures of all printed tables.
pub fn golden_signatures() -> Vec<InsertionSpec> {
    let mut s: Vec<InsertionSpec> = golden::golden_rows().into_iter().map(|r| r.insertions).collect();
    s.sort();
    s.dedup();
    s
}

pub fn golden_bundle() -> BundleSpec {
    golden::golden_bundle()
}
