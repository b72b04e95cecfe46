//! Candelas potential, concave and multiple-cover formulas, and the
//! Aspinwall–Morrison resummation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::bundle::{BundleSpec, InsertionSpec};
use crate::error::{Error, Result};
use crate::mirror::MirrorPipeline;
use crate::recovery::{InvariantKey, InvariantTable};
use crate::series::rat::{factorial, rat, sign};
use crate::series::Rat;

/// (quadratic)·T² + Σ_d c_d e^{dT}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSeries {
    pub quadratic: Rat,
    pub instantons: BTreeMap<usize, Rat>,
}

/// One-point potential of O(n+1) on P^n in the flat coordinate.
pub fn candelas_potential(n: usize, max_degree: usize) -> Result<PotentialSeries> {
    if n < 4 {
        return Err(Error::Inapplicable(format!("the potential needs n >= 4, got {n}")));
    }
    let b = BundleSpec::new(n, vec![n as u32 + 1], vec![])?;
    let pipe = MirrorPipeline::new(&b, max_degree)?;
    let m = n - 3;
    let y = pipe.y_table(m)?;
    let missing = |q| Error::PrecisionBudget {
        requested: format!("y_{{{m},{q}}}"),
        needed: m + q,
        budget: y.budget,
    };
    let y01 = y.get(0, 1).ok_or_else(|| missing(1))?;
    let ym1 = y.get(m, 1).ok_or_else(|| missing(1))?;
    let ym2 = y.get(m, 2).ok_or_else(|| missing(2))?;
    let phi = y01.mul(ym1)?.sub(ym2).scale(&rat(n as i64 + 1));
    let flat = phi.shift_t(pipe.inverse_shift())?;

    for j in 0..=flat.t_bound() {
        let c = flat.scalar_coeff(0, j);
        if j != 2 && !c.is_zero() {
            return Err(Error::ShapeViolation(format!("potential has a Q^0 T^{j} term")));
        }
    }
    let mut instantons = BTreeMap::new();
    for d in 1..=max_degree {
        if (1..=flat.t_bound()).any(|j| !flat.scalar_coeff(d, j).is_zero()) {
            return Err(Error::ShapeViolation(format!("instanton coefficient at Q^{d} depends on T")));
        }
        instantons.insert(d, flat.scalar_coeff(d, 0));
    }
    if !flat.is_scalar() {
        return Err(Error::ShapeViolation("potential carries p or hbar".into()));
    }
    Ok(PotentialSeries {
        quadratic: flat.scalar_coeff(0, 2),
        instantons,
    })
}

/// Closed one-point formula for bundles with rk V⁻ ≥ 2.
pub fn concave_closed_form(b: &BundleSpec, d: usize) -> Result<Rat> {
    b.validate()?;
    if b.rank_neg() < 2 {
        return Err(Error::Inapplicable(format!("{b}: needs rank V- >= 2")));
    }
    let k = b.n as i64 - 2 - b.rank_pos() as i64 + b.rank_neg() as i64;
    if k <= 0 {
        return Err(Error::Inapplicable(format!("{b}: insertion height {k} is not positive")));
    }
    if d == 0 {
        return Err(Error::Inapplicable("degree must be at least 1".into()));
    }
    if b.rank_neg() > 2 {
        return Ok(Rat::zero());
    }
    let d64 = d as u64;
    let ksum: u64 = b.negatives.iter().map(|&k| k as u64).sum();
    let mut v = sign((d64 * ksum) as i64);
    for &l in &b.positives {
        v *= rat(l as i64) * factorial(l as u64 * d64);
    }
    for &k in &b.negatives {
        v *= factorial(k as u64 * d64 - 1);
    }
    let df = factorial(d64);
    for _ in 0..=b.n {
        v /= &df;
    }
    Ok(v)
}

/// (−1)^{(n+1)(d−1)}/d.
pub fn multiple_cover(n: usize, d: usize) -> Rat {
    assert!(n >= 1 && d >= 1, "multiple cover needs n, d >= 1");
    sign(((n + 1) * (d - 1)) as i64) / rat(d as i64)
}

fn cover_weight(ratio: usize, m: usize) -> Rat {
    let base = rat(ratio as i64);
    let e = m as i32 - 3;
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        Rat::one() / num_traits::pow(base, (-e) as usize)
    }
}

/// η_d = K_d − Σ_{e|d, e<d} η_e (d/e)^{m−3}, for one signature.
pub fn am_invert_series(k: &BTreeMap<usize, Rat>, m: usize, max_degree: usize) -> Result<BTreeMap<usize, Rat>> {
    let missing: Vec<usize> = (1..=max_degree).filter(|d| !k.contains_key(d)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingDegrees {
            signature: format!("m={m}"),
            missing,
        });
    }
    let mut eta = BTreeMap::new();
    for d in 1..=max_degree {
        let mut v = k[&d].clone();
        for e in (1..d).filter(|e| d % e == 0) {
            v -= &eta[&e] * cover_weight(d / e, m);
        }
        eta.insert(d, v);
    }
    Ok(eta)
}

/// K_d = Σ_{e|d} η_e (d/e)^{m−3}.
pub fn am_resum_series(eta: &BTreeMap<usize, Rat>, m: usize, max_degree: usize) -> Result<BTreeMap<usize, Rat>> {
    let mut k = BTreeMap::new();
    for d in 1..=max_degree {
        let mut v = Rat::zero();
        for e in (1..=d).filter(|e| d % e == 0) {
            let eta_e = eta.get(&e).ok_or_else(|| Error::MissingDegrees {
                signature: format!("m={m}"),
                missing: vec![e],
            })?;
            v += eta_e * cover_weight(d / e, m);
        }
        k.insert(d, v);
    }
    Ok(k)
}

fn map_table(
    k: &InvariantTable,
    max_degree: usize,
    f: impl Fn(&BTreeMap<usize, Rat>, usize, usize) -> Result<BTreeMap<usize, Rat>>,
) -> Result<InvariantTable> {
    let mut out = InvariantTable::new();
    for sig in k.signatures() {
        let m = sig.m();
        let series = f(&k.by_degree(&sig), m, max_degree).map_err(|e| match e {
            Error::MissingDegrees { missing, .. } => Error::MissingDegrees {
                signature: sig.to_string(),
                missing,
            },
            other => other,
        })?;
        for (d, v) in series {
            out.insert(d, sig.clone(), v);
        }
    }
    Ok(out)
}

/// Aspinwall–Morrison inversion of every signature in a table. The number
/// of points `m` is taken from each signature.
pub fn am_invert(k: &InvariantTable, max_degree: usize) -> Result<InvariantTable> {
    map_table(k, max_degree, am_invert_series)
}

pub fn am_resum(eta: &InvariantTable, max_degree: usize) -> Result<InvariantTable> {
    map_table(eta, max_degree, am_resum_series)
}

/// Per-row integrality verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityReport {
    pub rows: Vec<(InvariantKey, Rat, bool)>,
}

impl IntegralityReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.2)
    }

    pub fn failures(&self) -> impl Iterator<Item = &(InvariantKey, Rat, bool)> {
        self.rows.iter().filter(|r| !r.2)
    }
}

pub fn integrality_report(eta: &InvariantTable) -> IntegralityReport {
    IntegralityReport {
        rows: eta
            .rows()
            .map(|(k, v)| (k.clone(), v.clone(), v.is_integer()))
            .collect(),
    }
}

/// Convenience for building tables from a single signature.
pub fn table_from_series(sig: &InsertionSpec, series: &BTreeMap<usize, Rat>) -> InvariantTable {
    let mut t = InvariantTable::new();
    for (d, v) in series {
        t.insert(*d, sig.clone(), v.clone());
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Insertion;
    use crate::series::rat::{frac, parse_rat};

    fn series(v: &[&str]) -> BTreeMap<usize, Rat> {
        v.iter().enumerate().map(|(i, s)| (i + 1, parse_rat(s).unwrap())).collect()
    }

    #[test]
    fn concave_formula_examples() {
        let b = BundleSpec::new(1, vec![], vec![1, 1]).unwrap();
        for d in 1..=5 {
            assert_eq!(concave_closed_form(&b, d).unwrap(), frac(1, (d * d) as i64));
        }
        let b = BundleSpec::new(2, vec![], vec![1, 2]).unwrap();
        assert_eq!(concave_closed_form(&b, 2).unwrap(), frac(3, 4));
        let b = BundleSpec::new(3, vec![1], vec![1, 1, 1]).unwrap();
        assert_eq!(concave_closed_form(&b, 3).unwrap(), rat(0));
        let b = BundleSpec::new(4, vec![5], vec![]).unwrap();
        assert!(matches!(concave_closed_form(&b, 1), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn multiple_cover_examples() {
        assert_eq!(multiple_cover(3, 1), rat(1));
        assert_eq!(multiple_cover(1, 2), frac(1, 2));
        assert_eq!(multiple_cover(2, 2), frac(-1, 2));
    }

    #[test]
    fn am_examples() {
        let k = series(&["144", "-15228", "3387832"]);
        let eta = am_invert_series(&k, 1, 3).unwrap();
        assert_eq!(eta[&1], rat(144));
        assert_eq!(eta[&2], rat(-15264));
        assert_eq!(eta[&3], rat(3387816));
        assert_eq!(am_resum_series(&eta, 1, 3).unwrap(), k);
        let err = am_invert_series(&series(&["1"]), 1, 2).unwrap_err();
        assert_eq!(err, Error::MissingDegrees { signature: "m=1".into(), missing: vec![2] });
    }

    #[test]
    fn integrality() {
        let sig = InsertionSpec::new(vec![Insertion::new(3, 0)]).unwrap();
        let t = table_from_series(&sig, &series(&["2", "1/2"]));
        let r = integrality_report(&t);
        assert!(!r.pass());
        assert_eq!(r.failures().count(), 1);
        assert!(integrality_report(&InvariantTable::new()).pass());
    }

    #[test]
    fn quintic_potential() {
        let p = candelas_potential(4, 2).unwrap();
        assert_eq!(p.quadratic, frac(5, 2));
        assert_eq!(p.instantons[&1], rat(2875));
        assert!(matches!(candelas_potential(3, 2), Err(Error::Inapplicable(_))));
    }
}
