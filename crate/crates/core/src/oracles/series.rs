use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::law::{collect, to_f64, DiscreteLaw};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Largest `n` handled by [`exact_series_small`].
pub const MAX_EXACT_N: u32 = 12;
/// Cap on the number of (partial-sum value, atom) pairs per convolution step.
pub const STATE_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactTerm {
    pub n: u32,
    /// `E (|S_n| / n^{1/p})^q`
    pub moment: f64,
    /// Support size of `S_n`.
    pub support: usize,
    /// Exact total probability of `S_n` is 1.
    pub mass_is_one: bool,
}

/// Exact `E(|S_n| / n^{1/p})^q` for `n = 1..=n_limit` by repeated convolution of the law
/// of `S_n` on its value set.
pub fn exact_series_small(law: &DiscreteLaw, p: f64, q: f64, n_limit: u32) -> Result<Vec<ExactTerm>> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::Domain(format!("need p, q > 0, got p={p}, q={q}")));
    }
    if n_limit == 0 || n_limit > MAX_EXACT_N {
        return Err(Error::PreconditionViolated(format!(
            "n_limit must lie in 1..={MAX_EXACT_N}, got {n_limit}"
        )));
    }
    let mut dist: Vec<(f64, BigRational)> = vec![(0.0, BigRational::one())];
    let mut out = Vec::with_capacity(n_limit as usize);
    for n in 1..=n_limit {
        let states = dist.len() as u128 * law.len() as u128;
        if states > STATE_CAP {
            return Err(Error::StateSpaceExceeded {
                states,
                cap: STATE_CAP,
            });
        }
        dist = collect(
            dist.iter()
                .flat_map(|(s, ps)| law.atoms().iter().map(move |(x, px)| (s + x, ps * px))),
        );
        let scale = (n as f64).powf(1.0 / p);
        let moment: NeumaierSum = dist
            .iter()
            .map(|(s, ps)| to_f64(ps) * (s.abs() / scale).powf(q))
            .collect();
        let mass: BigRational = dist.iter().map(|(_, ps)| ps.clone()).sum();
        out.push(ExactTerm {
            n,
            moment: moment.value(),
            support: dist.len(),
            mass_is_one: !mass.is_zero() && mass == BigRational::one(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_small_cases() {
        let r = DiscreteLaw::rademacher();
        let t = exact_series_small(&r, 1.0, 1.0, 2).unwrap();
        assert_eq!(t[1].moment, 0.5);
        let t = exact_series_small(&r, 2.0, 2.0, 4).unwrap();
        assert!((t[3].moment - 1.0).abs() < 1e-15);
        assert!(t.iter().all(|e| e.mass_is_one));
    }

    #[test]
    fn zero_law() {
        let t = exact_series_small(&DiscreteLaw::point(0.0), 1.0, 0.5, 12).unwrap();
        assert!(t.iter().all(|e| e.moment == 0.0 && e.support == 1));
    }

    #[test]
    fn limits() {
        let r = DiscreteLaw::rademacher();
        assert!(exact_series_small(&r, 1.0, 1.0, 13).is_err());
        assert!(exact_series_small(&r, 1.0, 1.0, 0).is_err());
    }
}
