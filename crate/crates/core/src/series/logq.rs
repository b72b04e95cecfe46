//! Series in q = e^t with polynomial t-dependence and class coefficients.

use std::fmt;

use num_traits::Zero;

use super::laurent::HbarLaurent;
use super::pclass::PClass;
use super::rat::{factorial, rat, Rat};
use crate::error::{Error, Result};
use crate::par;

/// `terms[d][j]` is the coefficient of `q^d t^j`; q-degrees run `0..=q_order`,
/// t-degrees `0..=t_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogQSeries {
    n: usize,
    q_order: usize,
    t_bound: usize,
    terms: Vec<Vec<PClass>>,
}

impl LogQSeries {
    /// Default t-degree bound for a series over P^n truncated at q^D.
    pub fn default_t_bound(n: usize, q_order: usize) -> usize {
        n + q_order
    }

    pub fn zero(n: usize, q_order: usize, t_bound: usize) -> Self {
        Self {
            n,
            q_order,
            t_bound,
            terms: vec![vec![PClass::zero(n); t_bound + 1]; q_order + 1],
        }
    }

    pub fn constant(c: PClass, q_order: usize, t_bound: usize) -> Self {
        let mut out = Self::zero(c.n(), q_order, t_bound);
        out.terms[0][0] = c;
        out
    }

    pub fn one(n: usize, q_order: usize, t_bound: usize) -> Self {
        Self::constant(PClass::one(n), q_order, t_bound)
    }

    /// The Kähler variable t.
    pub fn t(n: usize, q_order: usize, t_bound: usize) -> Self {
        assert!(t_bound >= 1, "t needs t_bound >= 1");
        let mut out = Self::zero(n, q_order, t_bound);
        out.terms[0][1] = PClass::one(n);
        out
    }

    /// Scalar series `Σ c_d q^d` from rational coefficients.
    pub fn scalar_q(n: usize, q_order: usize, t_bound: usize, coeffs: &[Rat]) -> Self {
        let mut out = Self::zero(n, q_order, t_bound);
        for (d, c) in coeffs.iter().enumerate().take(q_order + 1) {
            out.terms[d][0] = PClass::constant(n, HbarLaurent::constant(c.clone()));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q_order(&self) -> usize {
        self.q_order
    }

    pub fn t_bound(&self) -> usize {
        self.t_bound
    }

    /// Coefficient class of `q^d t^j`.
    pub fn term(&self, d: usize, j: usize) -> &PClass {
        &self.terms[d][j]
    }

    pub fn set_term(&mut self, d: usize, j: usize, c: PClass) -> Result<()> {
        if d > self.q_order {
            return Err(Error::OutOfRange(format!("q-degree {d} > {}", self.q_order)));
        }
        if j > self.t_bound {
            if c.is_zero() {
                return Ok(());
            }
            return Err(Error::TDegreeOverflow {
                degree: j,
                bound: self.t_bound,
            });
        }
        assert_eq!(c.n(), self.n, "class over a different P^n");
        self.terms[d][j] = c;
        Ok(())
    }

    pub fn row(&self, d: usize) -> &[PClass] {
        &self.terms[d]
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().flatten().all(PClass::is_zero)
    }

    /// Exact coefficient of `q^d t^j p^k ħ^e`.
    pub fn coeff(&self, d: usize, j: usize, k: usize, e: i32) -> Result<Rat> {
        if d > self.q_order || j > self.t_bound || k > self.n {
            return Err(Error::OutOfRange(format!(
                "(q^{d}, t^{j}, p^{k}) outside q<={}, t<={}, p<={}",
                self.q_order, self.t_bound, self.n
            )));
        }
        Ok(self.terms[d][j].coeff(k).coeff(e))
    }

    /// Largest t-power with a nonzero coefficient.
    pub fn t_degree(&self) -> Option<usize> {
        (0..=self.t_bound)
            .rev()
            .find(|&j| self.terms.iter().any(|row| !row[j].is_zero()))
    }

    /// Smallest q-power with a nonzero coefficient.
    pub fn q_valuation(&self) -> Option<usize> {
        self.terms
            .iter()
            .position(|row| row.iter().any(|c| !c.is_zero()))
    }

    /// Copy with a different truncation.
    pub fn retruncate(&self, q_order: usize, t_bound: usize) -> Result<Self> {
        let mut out = Self::zero(self.n, q_order, t_bound);
        for d in 0..=q_order.min(self.q_order) {
            for j in 0..=self.t_bound {
                out.set_term(d, j, self.terms[d][j].clone())?;
            }
        }
        Ok(out)
    }

    fn check_compat(&self, other: &Self) -> (usize, usize) {
        assert_eq!(self.n, other.n, "series over different P^n");
        (self.q_order.min(other.q_order), self.t_bound.max(other.t_bound))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (q, tb) = self.check_compat(other);
        let mut out = Self::zero(self.n, q, tb);
        for d in 0..=q {
            for (j, slot) in out.terms[d].iter_mut().enumerate() {
                if j <= self.t_bound {
                    slot.add_assign_ref(&self.terms[d][j]);
                }
                if j <= other.t_bound {
                    slot.add_assign_ref(&other.terms[d][j]);
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_terms(|c| -c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map_terms(|x| x.scale(c))
    }

    /// Multiply every coefficient by a fixed class.
    pub fn mul_class(&self, c: &PClass) -> Self {
        self.map_terms(|x| x * c)
    }

    /// Multiply by ħ^k.
    pub fn shift_hbar(&self, k: i32) -> Self {
        self.map_terms(|x| x.shift_hbar(k))
    }

    /// Multiply by p^j (truncating at p^{n+1}).
    pub fn shift_p(&self, j: usize) -> Self {
        self.map_terms(|x| x.shift_p(j))
    }

    pub fn map_terms<F: Fn(&PClass) -> PClass + Sync + Send>(&self, f: F) -> Self {
        let terms = par::map_slice(&self.terms, |row| row.iter().map(&f).collect());
        Self {
            n: self.n,
            q_order: self.q_order,
            t_bound: self.t_bound,
            terms,
        }
    }

    /// Product truncated at the smaller q-order; t-overflow is an error.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (q, tb) = self.check_compat(other);
        let n = self.n;
        let wide = self.t_bound + other.t_bound;
        let rows: Vec<Result<Vec<PClass>>> = par::map_range(q + 1, |d| {
            let mut row = vec![PClass::zero(n); wide + 1];
            for d1 in 0..=d {
                let (ra, rb) = (&self.terms[d1], &other.terms[d - d1]);
                for (j1, a) in ra.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j2, b) in rb.iter().enumerate() {
                        if !b.is_zero() {
                            row[j1 + j2].add_mul(a, b);
                        }
                    }
                }
            }
            if let Some(j) = (tb + 1..=wide).rev().find(|&j| !row[j].is_zero()) {
                return Err(Error::TDegreeOverflow { degree: j, bound: tb });
            }
            row.truncate(tb + 1);
            Ok(row)
        });
        let terms = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            q_order: q,
            t_bound: tb,
            terms,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.n, self.q_order, self.t_bound);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Total t-derivative with q = e^t.
    pub fn d_dt(&self) -> Self {
        let mut out = Self::zero(self.n, self.q_order, self.t_bound);
        for d in 0..=self.q_order {
            for j in 0..=self.t_bound {
                let mut c = self.terms[d][j].scale(&rat(d as i64));
                if j < self.t_bound {
                    c.add_assign_ref(&self.terms[d][j + 1].scale(&rat(j as i64 + 1)));
                }
                out.terms[d][j] = c;
            }
        }
        out
    }

    /// Exponential of a series whose `q^0 p^0` part vanishes identically.
    pub fn exp_series(&self) -> Result<Self> {
        if self.terms[0].iter().any(|c| !c.coeff(0).is_zero()) {
            return Err(Error::NonNilpotentConstant);
        }
        let mut acc = Self::one(self.n, self.q_order, self.t_bound);
        let mut power = acc.clone();
        // Each factor raises q-degree or p-degree, so the sum stops by q_order + n + 1.
        for k in 1..=(self.q_order + self.n + 1) as u64 {
            power = power.mul(self)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&(rat(1) / factorial(k))));
        }
        Ok(acc)
    }

    /// True when only `p^0 ħ^0` slots are populated.
    pub fn is_scalar(&self) -> bool {
        self.terms.iter().flatten().all(|c| {
            c.coeffs()[1..].iter().all(HbarLaurent::is_zero)
                && c.coeff(0).terms().all(|(e, _)| e == 0)
        })
    }

    /// Scalar coefficient of `q^d t^j`, assuming [`Self::is_scalar`].
    pub fn scalar_coeff(&self, d: usize, j: usize) -> Rat {
        self.terms[d][j].coeff(0).coeff(0)
    }

    fn check_shift(g: &Self) -> Result<()> {
        if !g.is_scalar() {
            return Err(Error::BadShift("shift must be free of p and ħ".into()));
        }
        for row in &g.terms {
            if row[1..].iter().any(|c| !c.is_zero()) {
                return Err(Error::BadShift("shift must not depend on t explicitly".into()));
            }
        }
        if !g.terms[0][0].is_zero() {
            return Err(Error::BadShift("shift must have q-valuation >= 1".into()));
        }
        Ok(())
    }

    /// Substitutes t → t + g, so that q^d picks up e^{d g}.
    pub fn shift_t(&self, g: &Self) -> Result<Self> {
        Self::check_shift(g)?;
        let (q, tb) = self.check_compat(g);
        let src = self.retruncate(q, tb)?;
        let g = g.retruncate(q, tb)?;
        let n = self.n;
        let tg = Self::t(n, q, tb).add(&g);
        let top = src.t_degree().unwrap_or(0);
        let mut tg_pows = vec![Self::one(n, q, tb)];
        for j in 1..=top {
            tg_pows.push(tg_pows[j - 1].mul(&tg)?);
        }
        let eg = g.exp_series()?;
        let mut eg_pows = vec![Self::one(n, q, tb)];
        for d in 1..=q {
            eg_pows.push(eg_pows[d - 1].mul(&eg)?);
        }
        let parts: Vec<Result<Self>> = par::map_range(q + 1, |d| {
            let mut inner = Self::zero(n, q - d, tb);
            for (j, c) in src.terms[d].iter().enumerate() {
                if !c.is_zero() {
                    inner = inner.add(&tg_pows[j].retruncate(q - d, tb)?.mul_class(c));
                }
            }
            let moved = inner.mul(&eg_pows[d].retruncate(q - d, tb)?)?;
            let mut out = Self::zero(n, q, tb);
            for dd in 0..=q - d {
                out.terms[dd + d] = moved.terms[dd].clone();
            }
            Ok(out)
        });
        let mut out = Self::zero(n, q, tb);
        for p in parts {
            out = out.add(&p?);
        }
        Ok(out)
    }

    /// Replaces each explicit t by t + g while leaving q untouched.
    pub fn substitute_t(&self, g: &Self) -> Result<Self> {
        Self::check_shift(g)?;
        let (q, tb) = self.check_compat(g);
        let src = self.retruncate(q, tb)?;
        let g = g.retruncate(q, tb)?;
        let n = self.n;
        let tg = Self::t(n, q, tb).add(&g);
        let top = src.t_degree().unwrap_or(0);
        let mut tg_pows = vec![Self::one(n, q, tb)];
        for j in 1..=top {
            tg_pows.push(tg_pows[j - 1].mul(&tg)?);
        }
        let mut out = Self::zero(n, q, tb);
        for d in 0..=q {
            let mut row = Self::zero(n, q, tb);
            for (j, c) in src.terms[d].iter().enumerate() {
                if !c.is_zero() {
                    row = row.add(&tg_pows[j].mul_class(c));
                }
            }
            for dd in 0..=q - d {
                for j in 0..=tb {
                    let c = &row.terms[dd][j];
                    if !c.is_zero() {
                        out.terms[dd + d][j].add_assign_ref(c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverts T(t) = t + G(q), returning t(T) = T + H(Q) in the same representation.
    pub fn invert_map(&self) -> Result<Self> {
        let g = self.sub(&Self::t(self.n, self.q_order, self.t_bound.max(1)));
        Self::check_shift(&g)?;
        let mut h = Self::zero(self.n, self.q_order, self.t_bound.max(1));
        // Each pass of H = −G(Q e^H) fixes one more q-order.
        for _ in 0..self.q_order {
            h = g.shift_t(&h)?.neg();
        }
        Ok(Self::t(self.n, self.q_order, h.t_bound).add(&h))
    }

    /// Multiplicative inverse of a scalar unit `c + O(q)`.
    pub fn recip(&self) -> Result<Self> {
        if !self.is_scalar() || self.terms[0][1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::NonUnit);
        }
        let c = self.scalar_coeff(0, 0);
        if c.is_zero() {
            return Err(Error::NonUnit);
        }
        let c_inv = rat(1) / c;
        let mut x = self.scale(&c_inv);
        x.terms[0][0] = PClass::zero(self.n);
        let minus_x = x.neg();
        let mut acc = Self::one(self.n, self.q_order, self.t_bound);
        let mut power = acc.clone();
        for _ in 0..self.q_order {
            power = power.mul(&minus_x)?;
            acc = acc.add(&power);
        }
        Ok(acc.scale(&c_inv))
    }

    /// Scalar series read off at `p^k ħ^e`.
    pub fn scalar_part(&self, k: usize, e: i32) -> Self {
        let mut out = Self::zero(self.n, self.q_order, self.t_bound);
        for d in 0..=self.q_order {
            for j in 0..=self.t_bound {
                let c = self.terms[d][j].coeff(k).coeff(e);
                if !c.is_zero() {
                    out.terms[d][j] = PClass::constant(self.n, HbarLaurent::constant(c));
                }
            }
        }
        out
    }

    /// Copy with the q^0 row cleared.
    pub fn drop_q0(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.terms[0] {
            *c = PClass::zero(self.n);
        }
        out
    }

    /// Leading constant check used by unit-like tests.
    pub fn is_one(&self) -> bool {
        *self == Self::one(self.n, self.q_order, self.t_bound)
    }

    /// Scalar coefficients of a t-free scalar series, `[c_0, …, c_D]`.
    pub fn scalar_q_coeffs(&self) -> Vec<Rat> {
        (0..=self.q_order).map(|d| self.scalar_coeff(d, 0)).collect()
    }
}

impl fmt::Display for LogQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (d, row) in self.terms.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    parts.push(format!("[{c}]*q^{d}*t^{j}"));
                }
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
