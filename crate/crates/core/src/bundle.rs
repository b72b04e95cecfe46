//! Split concavex bundles over P^n and their linear-model Euler data.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::series::rat::{rat, sign};
use crate::series::{LogQSeries, PClass, Rat};

/// V = ⊕O(l_i) ⊕ ⊕O(−k_i) over P^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleSpec {
    pub n: usize,
    pub positives: Vec<u32>,
    pub negatives: Vec<u32>,
}

/// How the downstream pipeline treats a bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PipelineClass {
    /// rk V⁻ ≥ 2: the raw extended series already has the right shape.
    Concave2,
    /// Everything else: full normalization and mirror map.
    MixedConvex,
}

impl fmt::Display for PipelineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PipelineClass::Concave2 => "CONCAVE2",
            PipelineClass::MixedConvex => "MIXED/CONVEX",
        })
    }
}

/// `coefficient · p^p_exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaMonomial {
    pub coefficient: Rat,
    pub p_exponent: i64,
}

impl BundleSpec {
    /// Validated constructor.
    pub fn new(n: usize, positives: Vec<u32>, negatives: Vec<u32>) -> Result<Self> {
        let b = Self {
            n,
            positives,
            negatives,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidBundle("ambient dimension n must be at least 1".into()));
        }
        if self.positives.iter().chain(&self.negatives).any(|&x| x == 0) {
            return Err(Error::InvalidBundle("twists must be nonzero (use l_i >= 1, k_i >= 1)".into()));
        }
        let total: u64 = self.positives.iter().chain(&self.negatives).map(|&x| x as u64).sum();
        if total != self.n as u64 + 1 {
            return Err(Error::InvalidBundle(format!(
                "sum of twists is {total}, but a concavex bundle on P^{} needs sum l_i + sum k_i = {}",
                self.n,
                self.n + 1
            )));
        }
        Ok(())
    }

    pub fn rank_pos(&self) -> usize {
        self.positives.len()
    }

    pub fn rank_neg(&self) -> usize {
        self.negatives.len()
    }

    pub fn class(&self) -> PipelineClass {
        if self.rank_neg() >= 2 {
            PipelineClass::Concave2
        } else {
            PipelineClass::MixedConvex
        }
    }

    /// e(V⁺)/e(V⁻) = ∏l_i/∏(−k_i) · p^{rk V⁺ − rk V⁻}.
    pub fn omega(&self) -> OmegaMonomial {
        let mut c = Rat::one();
        for &l in &self.positives {
            c *= rat(l as i64);
        }
        for &k in &self.negatives {
            c /= rat(-(k as i64));
        }
        OmegaMonomial {
            coefficient: c,
            p_exponent: self.rank_pos() as i64 - self.rank_neg() as i64,
        }
    }

    /// Ω as a class, when it has no pole in p.
    pub fn omega_class(&self) -> Result<PClass> {
        let om = self.omega();
        if om.p_exponent < 0 {
            return Err(Error::Unsupported(format!(
                "Omega = {}*p^{} has a pole and is not a class on P^{}",
                om.coefficient, om.p_exponent, self.n
            )));
        }
        Ok(PClass::monomial(self.n, om.p_exponent as usize, om.coefficient, 0))
    }

    /// Raw degree-d numerator with κ ↦ p.
    pub fn numerator(&self, d: usize) -> Result<PClass> {
        if d == 0 {
            return self.omega_class();
        }
        let n = self.n;
        let mut acc = PClass::one(n);
        for &l in &self.positives {
            let l = l as i64;
            for m in 0..=(l * d as i64) {
                acc = &acc * &PClass::linear(n, rat(l), rat(-m));
            }
        }
        for &k in &self.negatives {
            let k = k as i64;
            for m in 1..(k * d as i64) {
                acc = &acc * &PClass::linear(n, rat(-k), rat(m));
            }
        }
        Ok(acc)
    }

    /// Numerator with Ω stripped symbolically; equals 1 at d = 0.
    pub fn reduced_numerator(&self, d: usize) -> PClass {
        let n = self.n;
        let mut acc = PClass::one(n);
        if d == 0 {
            return acc;
        }
        for &l in &self.positives {
            let l = l as i64;
            for m in 1..=(l * d as i64) {
                acc = &acc * &PClass::linear(n, rat(l), rat(-m));
            }
        }
        for &k in &self.negatives {
            let k = k as i64;
            acc = &acc * &PClass::linear(n, rat(-k), rat(0));
            for m in 1..(k * d as i64) {
                acc = &acc * &PClass::linear(n, rat(-k), rat(m));
            }
        }
        acc
    }

    /// ∏_{m=1}^{d} (p − mħ)^{−(n+1)}.
    pub fn denominator_inverse(&self, d: usize) -> PClass {
        let n = self.n;
        let mut acc = PClass::one(n);
        for m in 1..=d as i64 {
            let inv = PClass::linear(n, rat(1), rat(-m))
                .invert_unit()
                .expect("p - m*hbar is a unit");
            acc = &acc * &inv.pow(n as u32 + 1);
        }
        acc
    }

    /// e^{−pt/ħ} up to the truncation orders.
    pub fn exp_minus_pt(&self, q_order: usize, t_bound: usize) -> LogQSeries {
        let n = self.n;
        let mut out = LogQSeries::zero(n, q_order, t_bound);
        for j in 0..=n.min(t_bound) {
            let c = sign(j as i64) / crate::series::rat::factorial(j as u64);
            out.set_term(0, j, PClass::monomial(n, j, c, -(j as i32)))
                .expect("within bounds");
        }
        out
    }

    /// Base hypergeometric series to order q^D. The raw q^0 term is left out
    /// when Ω has a pole in p.
    pub fn hg_base(&self, q_order: usize, normalized: bool) -> Result<LogQSeries> {
        let n = self.n;
        let tb = LogQSeries::default_t_bound(n, q_order);
        let rows: Vec<Result<PClass>> = par::map_range(q_order + 1, |d| {
            let num = if normalized {
                self.reduced_numerator(d)
            } else if d == 0 {
                match self.omega_class() {
                    Ok(c) => c,
                    Err(_) => PClass::zero(n),
                }
            } else {
                self.numerator(d)?
            };
            Ok(&num * &self.denominator_inverse(d))
        });
        let mut sum = LogQSeries::zero(n, q_order, tb);
        for (d, row) in rows.into_iter().enumerate() {
            sum.set_term(d, 0, row?)?;
        }
        sum.mul(&self.exp_minus_pt(q_order, tb))
    }

    /// Required total insertion weight for `m` marked points.
    pub fn required_weight(&self, m: usize) -> i64 {
        self.n as i64 - 3 + m as i64 - self.rank_pos() as i64 + self.rank_neg() as i64
    }

    pub fn dimension_check(&self, ins: &InsertionSpec) -> DimensionVerdict {
        let required = self.required_weight(ins.points.len());
        let actual = ins.total_weight();
        DimensionVerdict {
            required,
            actual,
            admissible: required == actual,
        }
    }
}

impl fmt::Display for BundleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.positives.iter().map(|l| format!("O({l})")).collect();
        parts.extend(self.negatives.iter().map(|k| format!("O(-{k})")));
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} on P^{}", parts.join("+"), self.n)
    }
}

/// Result of the critical-dimension test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionVerdict {
    pub required: i64,
    pub actual: i64,
    pub admissible: bool,
}

impl DimensionVerdict {
    pub fn into_result(self) -> Result<()> {
        if self.admissible {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                required: self.required,
                actual: self.actual,
            })
        }
    }
}

/// One marked point: ev^*H^h · ψ^psi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Insertion {
    pub h: u32,
    pub psi: u32,
}

impl Insertion {
    pub fn new(h: u32, psi: u32) -> Self {
        Self { h, psi }
    }

    pub fn weight(&self) -> i64 {
        (self.h + self.psi) as i64
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = match self.h {
            0 => "1".to_string(),
            1 => "H".to_string(),
            h => format!("H^{h}"),
        };
        if self.psi == 0 {
            f.write_str(&class)
        } else {
            write!(f, "tau_{}({class})", self.psi)
        }
    }
}

impl FromStr for Insertion {
    type Err = Error;

    /// Accepts `1`, `H`, `H^i`, `tau_w(..)` and `psi^w*H^i`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidInsertion(format!("cannot parse {s:?}; expected e.g. H^3 or tau_1(H^2)"));
        let parse_class = |c: &str| -> Result<u32> {
            match c {
                "1" | "H^0" => Ok(0),
                "H" => Ok(1),
                _ => c.strip_prefix("H^").and_then(|e| e.parse().ok()).ok_or_else(bad),
            }
        };
        if let Some(rest) = s.strip_prefix("tau_") {
            let (w, inner) = rest.split_once('(').ok_or_else(bad)?;
            let inner = inner.strip_suffix(')').ok_or_else(bad)?;
            let psi: u32 = w.parse().map_err(|_| bad())?;
            return Ok(Self::new(parse_class(inner)?, psi));
        }
        if let Some(rest) = s.strip_prefix("psi^") {
            let (w, inner) = rest.split_once('*').ok_or_else(bad)?;
            let psi: u32 = w.parse().map_err(|_| bad())?;
            return Ok(Self::new(parse_class(inner)?, psi));
        }
        Ok(Self::new(parse_class(&s)?, 0))
    }
}

/// Insertions at one or two marked points; only the last may carry ψ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InsertionSpec {
    pub points: Vec<Insertion>,
}

impl InsertionSpec {
    pub fn new(points: Vec<Insertion>) -> Result<Self> {
        let s = Self { points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.points.len();
        if !(1..=2).contains(&m) {
            return Err(Error::InvalidInsertion(format!("{m} marked points; only 1 or 2 are supported")));
        }
        if self.points[..m - 1].iter().any(|p| p.psi > 0) {
            return Err(Error::InvalidInsertion("only the last marked point may carry psi".into()));
        }
        Ok(())
    }

    pub fn total_weight(&self) -> i64 {
        self.points.iter().map(Insertion::weight).sum()
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }
}

impl fmt::Display for InsertionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Checks the ħ-window of every q^d coefficient of a base series.
pub fn check_hbar_window(b: &BundleSpec, series: &LogQSeries) -> Result<()> {
    let n = b.n as i32;
    for d in 0..=series.q_order() {
        let lo = -(n + 1) * d as i32 - n;
        let hi = b.positives.iter().map(|&l| l as i32 * d as i32 + 1).sum::<i32>()
            + b.negatives.iter().map(|&k| (k as i32 * d as i32 - 1).max(0)).sum::<i32>();
        for c in series.row(d) {
            for slot in c.coeffs() {
                for (e, v) in slot.terms() {
                    if !v.is_zero() && (e < lo || e > hi) {
                        return Err(Error::ShapeViolation(format!(
                            "q^{d} coefficient has hbar^{e} outside [{lo}, {hi}]"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
