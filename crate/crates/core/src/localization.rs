//! Degree-1 torus localization, used as an independent check.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{BundleSpec, InsertionSpec};
use crate::error::{Error, Result};
use crate::par;
use crate::series::rat::{checked_div, frac, rat};
use crate::series::Rat;

/// Torus weights λ_0, …, λ_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    lambdas: Vec<Rat>,
}

impl WeightVector {
    pub fn new(lambdas: Vec<Rat>) -> Result<Self> {
        for i in 0..lambdas.len() {
            for j in 0..i {
                if lambdas[i] == lambdas[j] {
                    return Err(Error::NonGenericWeights);
                }
            }
        }
        Ok(Self { lambdas })
    }

    /// Reproducible pseudo-random rational weights for P^n.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let v: Vec<Rat> = (0..=n)
                .map(|_| frac(rng.random_range(-1000..=1000), rng.random_range(1..=50)))
                .collect();
            if let Ok(w) = Self::new(v) {
                return w;
            }
        }
    }

    pub fn lambdas(&self) -> &[Rat] {
        &self.lambdas
    }
}

fn pow(x: &Rat, e: u32) -> Rat {
    num_traits::pow(x.clone(), e as usize)
}

/// Euler class of the obstruction bundle at the fixed line through q_i, q_j.
fn euler(b: &BundleSpec, li: &Rat, lj: &Rat) -> Rat {
    let mut e = Rat::one();
    for &l in &b.positives {
        for a in 0..=l as i64 {
            e *= rat(a) * li + rat(l as i64 - a) * lj;
        }
    }
    for &k in &b.negatives {
        for a in 1..k as i64 {
            e *= -(rat(a) * li + rat(k as i64 - a) * lj);
        }
    }
    e
}

/// K_1 for the given insertions by summing over fixed lines.
pub fn localize_degree1(b: &BundleSpec, ins: &InsertionSpec, w: &WeightVector) -> Result<Rat> {
    b.validate()?;
    ins.validate()?;
    b.dimension_check(ins).into_result()?;
    let lam = w.lambdas();
    let n = b.n;
    if lam.len() != n + 1 {
        return Err(Error::InvalidBundle(format!(
            "{} weights supplied for P^{n}",
            lam.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..=n)
        .flat_map(|i| (0..=n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let terms = par::map_slice(&pairs, |&(i, j)| -> Result<Rat> {
        let (li, lj) = (&lam[i], &lam[j]);
        let wdiff = li - lj;
        let mut normal = Rat::one();
        for (k, lk) in lam.iter().enumerate() {
            if k != i && k != j {
                normal *= (li - lk) * (lj - lk);
            }
        }
        let eu = euler(b, li, lj);
        match ins.points.as_slice() {
            [p] => {
                let num = pow(li, p.h) * pow(&-&wdiff, p.psi) * eu;
                checked_div(&num, &(&wdiff * &normal))
            }
            [p1, p2] => {
                let w2 = &wdiff * &wdiff;
                let num = pow(li, p1.h) * pow(lj, p2.h) * pow(&wdiff, p2.psi) * &eu;
                let mut v = checked_div(&num, &-(&w2 * &normal))?;
                if p2.psi == 0 {
                    let bubble = pow(li, p1.h + p2.h) * &eu;
                    v += checked_div(&bubble, &(&w2 * &normal))?;
                }
                Ok(v)
            }
            _ => unreachable!("validated"),
        }
    });
    let mut total = Rat::zero();
    for t in terms {
        total += t.map_err(|_| Error::NonGenericWeights)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Insertion;

    fn ins(v: &[(u32, u32)]) -> InsertionSpec {
        InsertionSpec::new(v.iter().map(|&(h, p)| Insertion::new(h, p)).collect()).unwrap()
    }

    #[test]
    fn degree_one_values() {
        let b = BundleSpec::new(5, vec![3], vec![3]).unwrap();
        let w = WeightVector::random(5, 7);
        assert_eq!(localize_degree1(&b, &ins(&[(3, 0)]), &w).unwrap(), rat(144));
        assert_eq!(localize_degree1(&b, &ins(&[(2, 0), (2, 0)]), &w).unwrap(), rat(261));
        let o = BundleSpec::new(3, vec![], vec![1, 1, 1, 1]).unwrap();
        assert_eq!(localize_degree1(&o, &ins(&[(3, 0), (3, 0)]), &WeightVector::random(3, 1)).unwrap(), rat(1));
        let q = BundleSpec::new(4, vec![5], vec![]).unwrap();
        assert_eq!(localize_degree1(&q, &ins(&[(1, 0)]), &WeightVector::random(4, 2)).unwrap(), rat(2875));
    }

    #[test]
    fn weight_independence() {
        let b = BundleSpec::new(5, vec![3], vec![3]).unwrap();
        let i = ins(&[(2, 0), (1, 1)]);
        let vals: Vec<Rat> = (0..3)
            .map(|s| localize_degree1(&b, &i, &WeightVector::random(5, s)).unwrap())
            .collect();
        assert_eq!(vals, vec![rat(-117); 3]);
    }

    #[test]
    fn degenerate_weights_are_rejected() {
        assert_eq!(WeightVector::new(vec![rat(1), rat(1)]), Err(Error::NonGenericWeights));
    }
}
