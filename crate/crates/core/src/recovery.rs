//! Reading invariants off flat-coordinate series.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::bundle::{BundleSpec, Insertion, InsertionSpec, PipelineClass};
use crate::error::{Error, Result};
use crate::mirror::{DescendentReading, MirrorPipeline, MirrorSeries};
use crate::par;
use crate::series::rat::{factorial, rat, sign};
use crate::series::{HbarLaurent, Rat};

/// Coefficient of p^n in p^s · R at Q^d, as a polynomial in T.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionCell {
    pub d: usize,
    pub s: usize,
    /// `value[j]` multiplies T^j.
    pub value: Vec<HbarLaurent>,
}

impl ExtractionCell {
    pub fn is_zero(&self) -> bool {
        self.value.iter().all(HbarLaurent::is_zero)
    }

    /// Coefficient of T^j ħ^e.
    pub fn coeff(&self, j: usize, e: i32) -> Rat {
        self.value.get(j).map(|c| c.coeff(e)).unwrap_or_else(Rat::zero)
    }

    /// Entries as `(T-degree, ħ-exponent, value)`.
    pub fn entries(&self) -> Vec<(usize, i32, Rat)> {
        let mut out = Vec::new();
        for (j, c) in self.value.iter().enumerate() {
            for (e, v) in c.terms() {
                out.push((j, e, v.clone()));
            }
        }
        out
    }
}

pub fn extract_cell(r: &MirrorSeries, d: usize, s: usize) -> Result<ExtractionCell> {
    let series = &r.series;
    if d > series.q_order() {
        return Err(Error::OutOfRange(format!("degree {d} beyond q-order {}", series.q_order())));
    }
    let n = series.n();
    let value = (0..=series.t_bound())
        .map(|j| {
            if s > n {
                HbarLaurent::zero()
            } else {
                series.term(d, j).coeff(n - s).clone()
            }
        })
        .collect();
    Ok(ExtractionCell { d, s, value })
}

/// Overall sign in front of a ladder cell with `v` prior points and ψ-excess `a`.
pub fn ladder_sign(v: usize, a: usize, reading: DescendentReading) -> Rat {
    match reading {
        DescendentReading::Published if v == 0 && a >= 1 => sign(a as i64 + 1),
        _ => sign((v + a) as i64),
    }
}

/// Checks that a cell is `ε ħ^{v−2−a} Σ_{j≤a} L_j T^j/j!` and returns the L_j.
pub fn read_ladder(cell: &ExtractionCell, v: usize, a: usize, reading: DescendentReading) -> Result<Vec<Rat>> {
    let e = v as i32 - 2 - a as i32;
    for (j, ee, _) in cell.entries() {
        if ee != e || j > a {
            return Err(Error::ShapeViolation(format!(
                "cell d={} s={} has T^{j} hbar^{ee}; expected hbar^{e} and T-degree <= {a}",
                cell.d, cell.s
            )));
        }
    }
    let eps = ladder_sign(v, a, reading);
    Ok((0..=a)
        .map(|j| &eps * cell.coeff(j, e) * factorial(j as u64))
        .collect())
}

/// K_d from the s=1 cell, s=0 and s>1 cells cross-checked.
pub fn read_one_point(cells: &[ExtractionCell]) -> Result<Rat> {
    let c0 = &cells[0];
    let c1 = &cells[1];
    let d = c1.d;
    let v = 1;
    let base = sign(v as i64);
    // s = 1: (−1)^v ħ^{v−2} d K
    let k = &read_ladder(c1, v, 0, DescendentReading::Mirror)?[0] / rat(d as i64);
    // s = 0: (−1)^v ħ^{v−3} (2 − v − dT) K
    let e0 = v as i32 - 3;
    for (j, ee, _) in c0.entries() {
        if ee != e0 || j > 1 {
            return Err(Error::ShapeViolation(format!("s=0 cell at d={d} has T^{j} hbar^{ee}")));
        }
    }
    let want0 = &base * rat(2 - v as i64) * &k;
    let want1 = &base * rat(-(d as i64)) * &k;
    if c0.coeff(0, e0) != want0 || c0.coeff(1, e0) != want1 {
        return Err(Error::ShapeViolation(format!(
            "s=0 and s=1 cells disagree at d={d}: s=1 gives K={k}"
        )));
    }
    for c in &cells[2..] {
        if !c.is_zero() {
            return Err(Error::ShapeViolation(format!("s={} cell at d={d} does not vanish", c.s)));
        }
    }
    Ok(k)
}

/// (degree, insertions) row key; ordering is by degree first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantKey {
    pub d: usize,
    pub insertions: InsertionSpec,
}

/// Exact invariants keyed by degree and insertion signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantTable {
    rows: BTreeMap<InvariantKey, Rat>,
}

impl InvariantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, d: usize, insertions: InsertionSpec, value: Rat) {
        self.rows.insert(InvariantKey { d, insertions }, value);
    }

    pub fn get(&self, d: usize, insertions: &InsertionSpec) -> Option<&Rat> {
        self.rows.get(&InvariantKey {
            d,
            insertions: insertions.clone(),
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = (&InvariantKey, &Rat)> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values for one signature, indexed by degree.
    pub fn by_degree(&self, insertions: &InsertionSpec) -> BTreeMap<usize, Rat> {
        self.rows
            .iter()
            .filter(|(k, _)| &k.insertions == insertions)
            .map(|(k, v)| (k.d, v.clone()))
            .collect()
    }

    pub fn signatures(&self) -> Vec<InsertionSpec> {
        let mut s: Vec<InsertionSpec> = self.rows.keys().map(|k| k.insertions.clone()).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn extend(&mut self, other: InvariantTable) {
        self.rows.extend(other.rows);
    }
}

impl fmt::Display for InvariantTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.rows {
            writeln!(f, "d={} <{}> = {}", k.d, k.insertions, crate::series::rat::format_rat(v))?;
        }
        Ok(())
    }
}

fn check_insertions(b: &BundleSpec, ins: &InsertionSpec) -> Result<()> {
    ins.validate()?;
    if let Some(p) = ins.points.iter().find(|p| p.h as usize > b.n) {
        return Err(Error::InvalidInsertion(format!("{p}: H^{} vanishes on P^{}", p.h, b.n)));
    }
    b.dimension_check(ins).into_result()
}

fn degrees(q_order: usize, max_degree: usize) -> Result<Vec<usize>> {
    if max_degree > q_order {
        return Err(Error::OutOfRange(format!(
            "degree {max_degree} beyond the pipeline order {q_order}"
        )));
    }
    Ok((1..=max_degree).collect())
}

/// K_d(H^h) for 1 ≤ d ≤ D.
///
/// Mixed and convex bundles read the s=1 cell of the height-h series and check
/// it against the s=0 and s>1 cells and against the p^h-twisted height-0
/// series. Concave bundles only have the second route.
pub fn one_point(pipe: &MirrorPipeline, h: u32, max_degree: usize) -> Result<InvariantTable> {
    let b = pipe.bundle();
    let ins = InsertionSpec::new(vec![Insertion::new(h, 0)])?;
    check_insertions(b, &ins)?;
    let ds = degrees(pipe.q_order(), max_degree)?;
    let r0 = pipe.mirror_series(0, DescendentReading::Mirror)?;
    let twisted = |d: usize| -> Result<Rat> {
        let cell = extract_cell(&r0, d, h as usize)?;
        Ok(read_ladder(&cell, 0, 0, DescendentReading::Mirror)?.swap_remove(0))
    };
    let vals = match pipe.class() {
        PipelineClass::Concave2 => par::map_slice(&ds, |&d| twisted(d)),
        PipelineClass::MixedConvex => {
            let r = pipe.mirror_series(h as usize, DescendentReading::Mirror)?;
            par::map_slice(&ds, |&d| {
                let cells = (0..=b.n.max(1))
                    .map(|s| extract_cell(&r, d, s))
                    .collect::<Result<Vec<_>>>()?;
                let k = read_one_point(&cells)?;
                let k0 = twisted(d)?;
                if k != k0 {
                    return Err(Error::ShapeViolation(format!(
                        "height-{h} and height-0 routes disagree at d={d}: {k} vs {k0}"
                    )));
                }
                Ok(k)
            })
        }
    };
    let mut out = InvariantTable::new();
    for (d, v) in ds.into_iter().zip(vals) {
        out.insert(d, ins.clone(), v?);
    }
    Ok(out)
}

/// Ladder read with the T^j coefficients checked against their own cells.
fn ladder_table(
    pipe: &MirrorPipeline,
    ins: InsertionSpec,
    height: usize,
    v: usize,
    s: usize,
    a: usize,
    max_degree: usize,
    reading: DescendentReading,
) -> Result<InvariantTable> {
    let r = pipe.mirror_series(height, reading)?;
    let ds = degrees(pipe.q_order(), max_degree)?;
    let vals = par::map_slice(&ds, |&d| {
        let cell = extract_cell(&r, d, s)?;
        let ladder = read_ladder(&cell, v, a, reading)?;
        for j in 1..=a {
            let other = extract_cell(&r, d, s + j)?;
            let e_here = v as i32 - 2 - a as i32;
            let e_there = e_here + j as i32;
            let lhs = cell.coeff(j, e_here) * factorial(j as u64);
            let rhs = sign(j as i64) * other.coeff(0, e_there);
            if lhs != rhs {
                return Err(Error::ShapeViolation(format!(
                    "ladder incoherent at d={d}, s={s}, step {j}: {lhs} vs {rhs}"
                )));
            }
        }
        Ok(ladder[0].clone())
    });
    let mut out = InvariantTable::new();
    for (d, v) in ds.into_iter().zip(vals) {
        out.insert(d, ins.clone(), v?);
    }
    Ok(out)
}

/// K_d(τ_w(H^i)) for 1 ≤ d ≤ D.
pub fn one_point_descendent(
    pipe: &MirrorPipeline,
    i: u32,
    w: u32,
    max_degree: usize,
    reading: DescendentReading,
) -> Result<InvariantTable> {
    let ins = InsertionSpec::new(vec![Insertion::new(i, w)])?;
    check_insertions(pipe.bundle(), &ins)?;
    ladder_table(pipe, ins, 0, 0, i as usize, w as usize, max_degree, reading)
}

/// K_d(H^{k1}, τ_psi(H^i)) for 1 ≤ d ≤ D.
pub fn two_point(
    pipe: &MirrorPipeline,
    k1: u32,
    i: u32,
    psi: u32,
    max_degree: usize,
    reading: DescendentReading,
) -> Result<InvariantTable> {
    let ins = InsertionSpec::new(vec![Insertion::new(k1, 0), Insertion::new(i, psi)])?;
    check_insertions(pipe.bundle(), &ins)?;
    ladder_table(pipe, ins, k1 as usize, 1, i as usize, psi as usize, max_degree, reading)
}

/// Dispatches on the shape of the insertion list.
pub fn compute(
    pipe: &MirrorPipeline,
    ins: &InsertionSpec,
    max_degree: usize,
    reading: DescendentReading,
) -> Result<InvariantTable> {
    check_insertions(pipe.bundle(), ins)?;
    match ins.points.as_slice() {
        [p] if p.psi == 0 => one_point(pipe, p.h, max_degree),
        [p] => one_point_descendent(pipe, p.h, p.psi, max_degree, reading),
        [p1, p2] => two_point(pipe, p1.h, p2.h, p2.psi, max_degree, reading),
        _ => unreachable!("validated above"),
    }
}
