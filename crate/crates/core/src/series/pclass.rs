//! Classes in Q[ħ,ħ⁻¹][p]/(p^{n+1}).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::laurent::HbarLaurent;
use super::rat::{rat, Rat};
use crate::error::{Error, Result};

/// Dense vector of ħ-Laurent coefficients indexed by the p-exponent `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PClass {
    coeffs: Vec<HbarLaurent>,
}

impl PClass {
    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![HbarLaurent::zero(); n + 1],
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, HbarLaurent::one())
    }

    pub fn constant(n: usize, c: HbarLaurent) -> Self {
        let mut out = Self::zero(n);
        out.coeffs[0] = c;
        out
    }

    /// `c · p^j · ħ^e`, zero when `j > n`.
    pub fn monomial(n: usize, j: usize, c: Rat, e: i32) -> Self {
        let mut out = Self::zero(n);
        if j <= n {
            out.coeffs[j] = HbarLaurent::monomial(c, e);
        }
        out
    }

    /// `a·p + b·ħ`.
    pub fn linear(n: usize, a: Rat, b: Rat) -> Self {
        let mut out = Self::zero(n);
        out.coeffs[0] = HbarLaurent::monomial(b, 1);
        if n >= 1 {
            out.coeffs[1] = HbarLaurent::constant(a);
        }
        out
    }

    pub fn from_coeffs(coeffs: Vec<HbarLaurent>) -> Self {
        assert!(!coeffs.is_empty(), "a class needs at least the p^0 slot");
        Self { coeffs }
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &HbarLaurent {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[HbarLaurent] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, j: usize) -> &mut HbarLaurent {
        &mut self.coeffs[j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(HbarLaurent::is_zero)
    }

    fn check_n(&self, other: &Self) {
        assert_eq!(self.n(), other.n(), "classes over different P^n");
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        self.check_n(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign_ref(b);
        }
    }

    /// `self += a * b`, truncated at p^{n+1}.
    pub fn add_mul(&mut self, a: &Self, b: &Self) {
        a.check_n(b);
        self.check_n(a);
        let n = self.n();
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs[..=n - i].iter().enumerate() {
                if !bj.is_zero() {
                    self.coeffs[i + j].add_mul(ai, bj);
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn scale_laurent(&self, c: &HbarLaurent) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiply by ħ^k.
    pub fn shift_hbar(&self, k: i32) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x.shift(k)).collect(),
        }
    }

    /// Multiply by p^j, dropping everything pushed past p^n.
    pub fn shift_p(&self, j: usize) -> Self {
        let n = self.n();
        let mut out = Self::zero(n);
        for i in 0..=n {
            if i + j <= n {
                out.coeffs[i + j] = self.coeffs[i].clone();
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.n());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse, defined when the p^0 part is a nonzero ħ-monomial.
    pub fn invert_unit(&self) -> Result<Self> {
        let n = self.n();
        let (e, c) = match self.coeffs[0].len() {
            0 => return Err(Error::ZeroLeading),
            1 => self.coeffs[0].as_monomial().expect("single term"),
            k => return Err(Error::NonMonomialLeading(k)),
        };
        let u_inv = HbarLaurent::monomial(rat(1) / c, -e);
        // x = u(1 + y) with y nilpotent, so x⁻¹ = u⁻¹ Σ (−y)^j.
        let mut y = self.scale_laurent(&u_inv);
        y.coeffs[0] = HbarLaurent::zero();
        let minus_y = -&y;
        let mut acc = Self::one(n);
        let mut power = Self::one(n);
        for _ in 0..n {
            power = &power * &minus_y;
            if power.is_zero() {
                break;
            }
            acc.add_assign_ref(&power);
        }
        Ok(acc.scale_laurent(&u_inv))
    }

    /// Every slot holds at most one ħ-power and slot `j` holds ħ^{deg−j}.
    pub fn homogeneous_degree(&self) -> Option<Option<i32>> {
        let mut deg = None;
        for (j, c) in self.coeffs.iter().enumerate() {
            for (e, v) in c.terms() {
                if v.is_zero() {
                    continue;
                }
                let here = e + j as i32;
                match deg {
                    None => deg = Some(here),
                    Some(d) if d != here => return None,
                    _ => {}
                }
            }
        }
        Some(deg)
    }
}

impl Add for &PClass {
    type Output = PClass;
    fn add(self, rhs: &PClass) -> PClass {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &PClass {
    type Output = PClass;
    fn sub(self, rhs: &PClass) -> PClass {
        let mut out = self.clone();
        out.add_assign_ref(&-rhs);
        out
    }
}

impl Mul for &PClass {
    type Output = PClass;
    fn mul(self, rhs: &PClass) -> PClass {
        let mut out = PClass::zero(self.n());
        out.add_mul(self, rhs);
        out
    }
}

impl Neg for &PClass {
    type Output = PClass;
    fn neg(self) -> PClass {
        PClass {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for PClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({c})*p^{j}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat::frac;

    #[test]
    fn invert_p_minus_hbar_at_n1() {
        let x = PClass::linear(1, rat(1), rat(-1));
        let inv = x.invert_unit().unwrap();
        assert_eq!(inv.coeff(0), &HbarLaurent::monomial(rat(-1), -1));
        assert_eq!(inv.coeff(1), &HbarLaurent::monomial(rat(-1), -2));
    }

    #[test]
    fn invert_constant_at_n0() {
        let x = PClass::constant(0, HbarLaurent::constant(rat(2)));
        assert_eq!(
            x.invert_unit().unwrap(),
            PClass::constant(0, HbarLaurent::constant(frac(1, 2)))
        );
    }

    #[test]
    fn invert_round_trip_n2() {
        let x = PClass::linear(2, rat(1), rat(-1));
        assert_eq!(&x * &x.invert_unit().unwrap(), PClass::one(2));
    }

    #[test]
    fn invert_errors() {
        assert_eq!(PClass::zero(3).invert_unit(), Err(Error::ZeroLeading));
        let mut x = PClass::one(2);
        x.coeff_mut(0).add_term(1, rat(1));
        assert_eq!(x.invert_unit(), Err(Error::NonMonomialLeading(2)));
    }

    #[test]
    fn truncation_at_p_n_plus_one() {
        let p = PClass::monomial(2, 1, rat(1), 0);
        assert!(p.pow(3).is_zero());
        assert_eq!(p.pow(2), PClass::monomial(2, 2, rat(1), 0));
        assert_eq!(p.shift_p(1), PClass::monomial(2, 2, rat(1), 0));
        assert!(p.shift_p(2).is_zero());
    }

    #[test]
    fn homogeneity_detects_mixed_degrees() {
        let x = PClass::linear(2, rat(1), rat(-1));
        assert_eq!(x.homogeneous_degree(), Some(Some(1)));
        let y = &x + &PClass::one(2);
        assert_eq!(y.homogeneous_degree(), None);
    }
}
