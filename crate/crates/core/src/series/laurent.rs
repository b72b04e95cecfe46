//! Finite Laurent polynomials in ħ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::rat::{format_rat, rat, Rat};

/// Sparse map from ħ-exponent to a nonzero rational coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HbarLaurent {
    terms: BTreeMap<i32, Rat>,
}

impl HbarLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(rat(1), 0)
    }

    /// `c · ħ^e`.
    pub fn monomial(c: Rat, e: i32) -> Self {
        let mut out = Self::zero();
        out.add_term(e, c);
        out
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    /// ħ itself.
    pub fn hbar() -> Self {
        Self::monomial(rat(1), 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, Rat)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of ħ^e.
    pub fn coeff(&self, e: i32) -> Rat {
        self.terms.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// The single term when this is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(i32, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, e: i32, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, c.clone());
        }
    }

    /// `self += a * b` without allocating the product.
    pub fn add_mul(&mut self, a: &Self, b: &Self) {
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                self.add_term(ea + eb, ca * cb);
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiply by ħ^k.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }
}

impl Add for &HbarLaurent {
    type Output = HbarLaurent;
    fn add(self, rhs: &HbarLaurent) -> HbarLaurent {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &HbarLaurent {
    type Output = HbarLaurent;
    fn sub(self, rhs: &HbarLaurent) -> HbarLaurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &HbarLaurent {
    type Output = HbarLaurent;
    fn mul(self, rhs: &HbarLaurent) -> HbarLaurent {
        let mut out = HbarLaurent::zero();
        out.add_mul(self, rhs);
        out
    }
}

impl Neg for &HbarLaurent {
    type Output = HbarLaurent;
    fn neg(self) -> HbarLaurent {
        HbarLaurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl fmt::Display for HbarLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format_rat(c),
                _ => format!("{}*h^{}", format_rat(c), e),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
