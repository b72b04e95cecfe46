//! Height extension, mirror transformations and the normalization pipeline,
//! all in the nonequivariant limit.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::bundle::{BundleSpec, PipelineClass};
use crate::error::{Error, Result};
use crate::series::rat::{factorial, rat, sign};
use crate::series::{LogQSeries, PClass};

/// Whether Ω is still attached to a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    Raw,
    Normalized,
}

/// Hypergeometric series of height-k data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightSeries {
    pub bundle: BundleSpec,
    pub height: usize,
    pub series: LogQSeries,
    pub form: Form,
    /// True while no mirror transformation has been applied.
    pub base: bool,
}

impl HeightSeries {
    /// Untransformed height-0 series straight from the Euler data.
    pub fn base(bundle: &BundleSpec, q_order: usize, form: Form) -> Result<Self> {
        Ok(Self {
            bundle: bundle.clone(),
            height: 0,
            series: bundle.hg_base(q_order, form == Form::Normalized)?,
            form,
            base: true,
        })
    }

    fn derived(&self, series: LogQSeries, height: usize) -> Self {
        Self {
            bundle: self.bundle.clone(),
            height,
            series,
            form: self.form,
            base: false,
        }
    }
}

/// Multiplies the q^d coefficient by (p − dħ)^k.
pub fn extend_height(h: &HeightSeries, k: usize) -> Result<HeightSeries> {
    if h.height != 0 || !h.base {
        return Err(Error::NotBaseSeries);
    }
    let n = h.bundle.n;
    let s = &h.series;
    let mut out = LogQSeries::zero(n, s.q_order(), s.t_bound());
    for d in 0..=s.q_order() {
        let f = PClass::linear(n, rat(1), rat(-(d as i64))).pow(k as u32);
        for j in 0..=s.t_bound() {
            out.set_term(d, j, s.term(d, j) * &f)?;
        }
    }
    Ok(HeightSeries {
        height: k,
        series: out,
        ..h.clone()
    })
}

/// Applies −ħ d/dt, raising the height by one.
pub fn raise_height(h: &HeightSeries) -> HeightSeries {
    h.derived(h.series.d_dt().shift_hbar(1).neg(), h.height + 1)
}

/// Multiplication by a scalar unit u(t).
pub fn gauge_unit(h: &HeightSeries, u: &LogQSeries) -> Result<HeightSeries> {
    u.recip()?;
    Ok(h.derived(h.series.mul(u)?, h.height))
}

/// Multiplication by e^{f/ħ} for a q-positive scalar f.
pub fn gauge_exp(h: &HeightSeries, f: &LogQSeries) -> Result<HeightSeries> {
    check_q_positive_scalar(f)?;
    let e = f.shift_hbar(-1).exp_series()?;
    Ok(h.derived(h.series.mul(&e)?, h.height))
}

/// `h + f · h2` for a q-positive scalar f.
pub fn height_shift(h: &HeightSeries, f: &LogQSeries, h2: &HeightSeries) -> Result<HeightSeries> {
    if h.bundle != h2.bundle || h.form != h2.form {
        return Err(Error::MixedBundles);
    }
    check_q_positive_scalar(f)?;
    Ok(h.derived(h.series.add(&f.mul(&h2.series)?), h.height))
}

fn check_q_positive_scalar(f: &LogQSeries) -> Result<()> {
    if !f.is_scalar() {
        return Err(Error::BadShift("factor must be free of p and ħ".into()));
    }
    if f.row(0).iter().any(|c| !c.is_zero()) {
        return Err(Error::BadShift("factor must have q-valuation >= 1".into()));
    }
    Ok(())
}

/// The scalar series y_{k,q}(t) read off the normalized heights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YTable {
    pub entries: BTreeMap<(usize, usize), LogQSeries>,
    pub max_height: usize,
    pub budget: usize,
}

impl YTable {
    pub fn get(&self, k: usize, q: usize) -> Option<&LogQSeries> {
        self.entries.get(&(k, q))
    }

    /// y_{k,q} − t^q/q! must have q-valuation ≥ 1.
    pub fn check_leading(&self) -> Result<()> {
        for (&(k, q), y) in &self.entries {
            let mut lead = LogQSeries::zero(y.n(), y.q_order(), y.t_bound());
            lead.set_term(
                0,
                q,
                PClass::constant(y.n(), crate::series::HbarLaurent::constant(rat(1) / factorial(q as u64))),
            )?;
            let rest = y.sub(&lead);
            if rest.row(0).iter().any(|c| !c.is_zero()) {
                return Err(Error::ShapeViolation(format!("y_{{{k},{q}}} has a stray q^0 term")));
            }
        }
        Ok(())
    }

    /// y_{k,q} · y'_{k−1,1} = y'_{k−1,q+1} wherever all three are stored.
    pub fn check_recursion(&self) -> Result<usize> {
        let mut checked = 0;
        for (&(k, q), y) in &self.entries {
            if k == 0 {
                continue;
            }
            let (Some(a), Some(b)) = (self.get(k - 1, 1), self.get(k - 1, q + 1)) else {
                continue;
            };
            if y.mul(&a.d_dt())? != b.d_dt() {
                return Err(Error::ShapeViolation(format!("y-recursion fails at ({k},{q})")));
            }
            checked += 1;
        }
        Ok(checked)
    }
}

/// p-precision budget: heights and y-levels satisfy k + q ≤ budget.
pub fn precision_budget(b: &BundleSpec) -> usize {
    let e = b.omega().p_exponent.max(0) as usize;
    b.n.saturating_sub(e)
}

/// The normalization condition that would otherwise be imposed by a final
/// height shift: the ħ^{≥0} part of P_k is exactly p^k.
fn assert_normalized(h: &HeightSeries) -> Result<()> {
    let s = &h.series;
    for d in 0..=s.q_order() {
        for j in 0..=s.t_bound() {
            for (i, slot) in s.term(d, j).coeffs().iter().enumerate() {
                for (e, v) in slot.terms() {
                    if e < 0 {
                        continue;
                    }
                    let expected = d == 0 && j == 0 && i == h.height && e == 0;
                    if !(expected && v.is_one()) {
                        return Err(Error::ShapeViolation(format!(
                            "height {} is not normalized at q^{d} t^{j} p^{i} hbar^{e}",
                            h.height
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Raw heights of a concave bundle: every ħ^{≥0} term must already vanish.
fn assert_concave_shape(h: &HeightSeries) -> Result<()> {
    let s = &h.series;
    for d in 1..=s.q_order() {
        for j in 0..=s.t_bound() {
            for slot in s.term(d, j).coeffs() {
                if slot.terms().any(|(e, v)| e >= 0 && !v.is_zero()) {
                    return Err(Error::ShapeViolation(format!(
                        "raw height {} has an hbar^{{>=0}} term at q^{d}",
                        h.height
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Which coefficient convention the recovered invariants follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DescendentReading {
    /// Coefficients of e^{dT} in the flat coordinate.
    Mirror,
    /// Instanton part with explicit T rewritten back through t = T + H(Q).
    Published,
}

/// A raw height series re-expanded in the flat coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorSeries {
    pub bundle: BundleSpec,
    pub height: usize,
    pub series: LogQSeries,
    pub reading: DescendentReading,
}

type Cache<T> = Mutex<BTreeMap<usize, Arc<T>>>;

/// Lazily built heights, y-table and flat-coordinate series for one bundle.
pub struct MirrorPipeline {
    bundle: BundleSpec,
    q_order: usize,
    class: PipelineClass,
    budget: Option<usize>,
    map: LogQSeries,
    inverse_shift: LogQSeries,
    heights: Mutex<Vec<Arc<HeightSeries>>>,
    mirror: Cache<MirrorSeries>,
    published: Cache<MirrorSeries>,
}

impl MirrorPipeline {
    pub fn new(bundle: &BundleSpec, q_order: usize) -> Result<Self> {
        bundle.validate()?;
        let class = bundle.class();
        let n = bundle.n;
        let tb = LogQSeries::default_t_bound(n, q_order);
        let t = LogQSeries::t(n, q_order, tb);
        match class {
            PipelineClass::Concave2 => {
                let h0 = HeightSeries::base(bundle, q_order, Form::Raw)?;
                assert_concave_shape(&h0)?;
                Ok(Self {
                    bundle: bundle.clone(),
                    q_order,
                    class,
                    budget: None,
                    map: t,
                    inverse_shift: LogQSeries::zero(n, q_order, tb),
                    heights: Mutex::new(vec![Arc::new(h0)]),
                    mirror: Mutex::default(),
                    published: Mutex::default(),
                })
            }
            PipelineClass::MixedConvex => {
                if bundle.omega().p_exponent < 0 {
                    return Err(Error::Unsupported(format!(
                        "{bundle}: Omega has a pole but rank V- < 2; the raw series needs classes beyond p^n"
                    )));
                }
                let base = HeightSeries::base(bundle, q_order, Form::Normalized)?;
                let f0 = base.series.scalar_part(0, 0);
                let p0 = gauge_unit(&base, &f0.recip()?)?;
                assert_normalized(&p0)?;
                let budget = precision_budget(bundle);
                if budget < 1 {
                    return Err(Error::PrecisionBudget {
                        requested: "mirror map y_{0,1}".into(),
                        needed: 1,
                        budget,
                    });
                }
                let map = y_entry(&p0.series, 0, 1);
                let inverse_shift = map.invert_map()?.sub(&t);
                Ok(Self {
                    bundle: bundle.clone(),
                    q_order,
                    class,
                    budget: Some(budget),
                    map,
                    inverse_shift,
                    heights: Mutex::new(vec![Arc::new(p0)]),
                    mirror: Mutex::default(),
                    published: Mutex::default(),
                })
            }
        }
    }

    pub fn bundle(&self) -> &BundleSpec {
        &self.bundle
    }

    pub fn q_order(&self) -> usize {
        self.q_order
    }

    pub fn class(&self) -> PipelineClass {
        self.class
    }

    /// p-budget for normalized data; `None` for concave bundles.
    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    /// T(t) = y_{0,1}(t); the identity for concave bundles.
    pub fn mirror_map(&self) -> &LogQSeries {
        &self.map
    }

    /// H(Q) with t = T + H(Q).
    pub fn inverse_shift(&self) -> &LogQSeries {
        &self.inverse_shift
    }

    /// Height-k series: normalized P_k, or the raw extension for concave bundles.
    pub fn height(&self, k: usize) -> Result<Arc<HeightSeries>> {
        if let Some(b) = self.budget {
            if k > b {
                return Err(Error::PrecisionBudget {
                    requested: format!("height {k}"),
                    needed: k,
                    budget: b,
                });
            }
        }
        let mut heights = self.heights.lock().expect("height cache poisoned");
        while heights.len() <= k {
            let prev = heights.last().expect("height 0 present").clone();
            let next = match self.class {
                PipelineClass::Concave2 => {
                    let h = extend_height(&heights[0], prev.height + 1)?;
                    if assert_concave_shape(&h).is_err() {
                        return Err(Error::Unsupported(format!(
                            "{}: the raw extension to height {} is not normalized, and mirror transformations for rank V- >= 2 are not implemented",
                            self.bundle, h.height
                        )));
                    }
                    h
                }
                PipelineClass::MixedConvex => {
                    let y1 = y_entry(&prev.series, prev.height, 1);
                    let raised = raise_height(&prev);
                    let h = gauge_unit(&raised, &y1.d_dt().recip()?)?;
                    assert_normalized(&h)?;
                    h
                }
            };
            heights.push(Arc::new(next));
        }
        Ok(heights[k].clone())
    }

    /// y_{k,q} for all k ≤ max_height and 1 ≤ q with k + q ≤ budget.
    pub fn y_table(&self, max_height: usize) -> Result<YTable> {
        let Some(budget) = self.budget else {
            return Err(Error::WrongBundleClass {
                expected: PipelineClass::MixedConvex.to_string(),
                got: self.class.to_string(),
            });
        };
        let mut entries = BTreeMap::new();
        for k in 0..=max_height.min(budget) {
            let h = self.height(k)?;
            for q in 1..=budget - k {
                entries.insert((k, q), y_entry(&h.series, k, q));
            }
        }
        Ok(YTable {
            entries,
            max_height,
            budget,
        })
    }

    /// Raw height-k series in the flat coordinate under the chosen reading.
    pub fn mirror_series(&self, k: usize, reading: DescendentReading) -> Result<Arc<MirrorSeries>> {
        let cache = match reading {
            DescendentReading::Mirror => &self.mirror,
            DescendentReading::Published => &self.published,
        };
        if let Some(hit) = cache.lock().expect("mirror cache poisoned").get(&k) {
            return Ok(hit.clone());
        }
        let series = match (self.class, reading) {
            (PipelineClass::Concave2, _) => self.height(k)?.series.clone(),
            (PipelineClass::MixedConvex, DescendentReading::Mirror) => {
                let shifted = self.height(k)?.series.shift_t(&self.inverse_shift)?;
                shifted.mul_class(&self.bundle.omega_class()?)
            }
            (PipelineClass::MixedConvex, DescendentReading::Published) => {
                let m = self.mirror_series(k, DescendentReading::Mirror)?;
                m.series.drop_q0().substitute_t(&self.inverse_shift.neg())?
            }
        };
        let out = Arc::new(MirrorSeries {
            bundle: self.bundle.clone(),
            height: k,
            series,
            reading,
        });
        cache
            .lock()
            .expect("mirror cache poisoned")
            .entry(k)
            .or_insert(out.clone());
        Ok(out)
    }
}

/// (−1)^q times the p^{k+q} ħ^{−q} scalar part of a normalized height-k series.
fn y_entry(s: &LogQSeries, k: usize, q: usize) -> LogQSeries {
    s.scalar_part(k + q, -(q as i32)).scale(&sign(q as i64))
}

/// Runs the normalization for heights ≤ K.
pub fn normalize_pipeline(b: &BundleSpec, max_height: usize, q_order: usize) -> Result<(YTable, Vec<HeightSeries>)> {
    if b.class() != PipelineClass::MixedConvex {
        return Err(Error::WrongBundleClass {
            expected: PipelineClass::MixedConvex.to_string(),
            got: b.class().to_string(),
        });
    }
    let pipe = MirrorPipeline::new(b, q_order)?;
    let heights = (0..=max_height)
        .map(|k| pipe.height(k).map(|h| (*h).clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok((pipe.y_table(max_height)?, heights))
}

/// T(t) = y_{0,1}(t), or t itself for concave bundles.
pub fn mirror_map(b: &BundleSpec, q_order: usize) -> Result<LogQSeries> {
    Ok(MirrorPipeline::new(b, q_order)?.mirror_map().clone())
}

/// Coefficients of Q^d in H(Q) for quick inspection.
pub fn shift_coefficients(h: &LogQSeries) -> Vec<crate::series::Rat> {
    let mut v = h.scalar_q_coeffs();
    if let Some(c) = v.first_mut() {
        debug_assert!(c.is_zero());
        *c = crate::series::Rat::zero();
    }
    v
}
