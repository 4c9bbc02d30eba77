use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::{ratio, rational, to_f64, DiscreteLaw};
use crate::error::{Error, Result};

/// One exact inequality instance `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`, rounded from the exact difference.
    pub margin: f64,
    /// Decided in exact arithmetic.
    pub holds: bool,
}

impl InequalityCheck {
    fn exact(instance: String, lhs: &BigRational, rhs: &BigRational) -> Self {
        // Cross-multiplied so that unreduced operands need no gcd.
        let l = lhs.numer() * rhs.denom();
        let r = rhs.numer() * lhs.denom();
        let margin = BigRational::new_raw(&r - &l, lhs.denom() * rhs.denom());
        Self {
            instance,
            lhs: to_f64(lhs),
            rhs: to_f64(rhs),
            margin: to_f64(&margin),
            holds: l <= r,
        }
    }
}

// Unreduced arithmetic for operands with positive denominators. Reducing powers with
// thousands of bits dominates the lattice runtime otherwise.
fn raw_add(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new_raw(
        a.numer() * b.denom() + b.numer() * a.denom(),
        a.denom() * b.denom(),
    )
}

fn raw_mul(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new_raw(a.numer() * b.numer(), a.denom() * b.denom())
}

/// `E max_{k <= n} Y_k >= n / (2K) E Y_1` for i.i.d. nonnegative `Y` with
/// `P(Y > 0) <= K / n`, evaluated exactly. Reported as `lhs = n E Y / (2K)` and
/// `rhs = E max` so that `holds` means `lhs <= rhs`.
pub fn lemma_max_check(law: &DiscreteLaw, n: u32, k: f64) -> Result<InequalityCheck> {
    if n == 0 {
        return Err(Error::PreconditionViolated("n must be positive".into()));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::PreconditionViolated(format!("K must be >= 1, got {k}")));
    }
    if law.atoms().iter().any(|(v, _)| *v < 0.0) {
        return Err(Error::PreconditionViolated("law must be nonnegative".into()));
    }
    let kr = rational(k)?;
    let nr = BigRational::from_integer(n.into());
    let positive = law.tail(0.0);
    if positive > &kr / &nr {
        return Err(Error::PreconditionViolated(format!(
            "P(Y > 0) = {} exceeds K/n = {}",
            to_f64(&positive),
            k / n as f64
        )));
    }
    // E max = sum over consecutive levels y_{j-1} < y_j of (y_j - y_{j-1}) P(max > y_{j-1}).
    let mut e_max = BigRational::zero();
    let mut prev = 0.0;
    for (v, _) in law.atoms().iter().filter(|(v, _)| *v > 0.0) {
        let survive = (BigRational::one() - law.tail(prev)).pow(n as i32);
        let p_max = BigRational::new_raw(survive.denom() - survive.numer(), survive.denom().clone());
        e_max = raw_add(&e_max, &raw_mul(&rational(v - prev)?, &p_max));
        prev = *v;
    }
    let mean = law.expect(|y| y)?;
    let bound = nr * mean / (BigRational::from_integer(2.into()) * kr);
    Ok(InequalityCheck::exact(format!("n={n} K={k}"), &bound, &e_max))
}

/// `P(g(V) <= t) E g(V) <= E g(V - V') + beta t` with `g(x) = |x|^p` and
/// `beta = max(1, 2^{p-1})`. The values of `g` are rounded once to floating point and
/// then used exactly.
pub fn symmetrization_check(law: &DiscreteLaw, p: f64, t: f64) -> Result<InequalityCheck> {
    if !(p > 0.0) || !(t >= 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "need p > 0 and t >= 0, got p={p}, t={t}"
        )));
    }
    let g = |x: f64| x.abs().powf(p);
    let beta = rational(1f64.max(2f64.powf(p - 1.0)))?;
    let small: BigRational = law
        .atoms()
        .iter()
        .filter(|(v, _)| g(*v) <= t)
        .map(|(_, q)| q.clone())
        .sum();
    let lhs = small * law.expect(g)?;
    let rhs = law.symmetrized().expect(g)? + beta * rational(t)?;
    Ok(InequalityCheck::exact(format!("p={p} t={t}"), &lhs, &rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub name: String,
    pub checked: usize,
    pub violations: Vec<InequalityCheck>,
    /// Smallest `rhs - lhs` seen.
    pub min_margin: f64,
    /// A few representative instances.
    pub samples: Vec<InequalityCheck>,
}

impl LatticeReport {
    fn from_checks(name: &str, checks: Vec<InequalityCheck>, keep: usize) -> Self {
        let min_margin = checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        let step = (checks.len() / keep.max(1)).max(1);
        Self {
            name: name.into(),
            checked: checks.len(),
            violations: checks.iter().filter(|c| !c.holds).cloned().collect(),
            min_margin,
            samples: checks.iter().step_by(step).take(keep).cloned().collect(),
        }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Scaled Bernoulli laws `c 1(U < theta)` with `K = 1`, `theta = 1/(j n)`, over
/// `n = 1..=n_max`, `j = 1..=10` and `c` in {0.1, 1, 7}.
pub fn lemma_max_lattice(n_max: u32) -> Result<LatticeReport> {
    let cells: Vec<(u32, i64, f64)> = (1..=n_max)
        .flat_map(|n| (1..=10).flat_map(move |j| [0.1, 1.0, 7.0].map(|c| (n, j, c))))
        .collect();
    let checks = cells
        .par_iter()
        .map(|&(n, j, c)| {
            let law = DiscreteLaw::scaled_bernoulli(c, ratio(1, j * n as i64))?;
            let mut check = lemma_max_check(&law, n, 1.0)?;
            check.instance = format!("c={c} theta=1/({j}*{n}) n={n} K=1");
            Ok(check)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeReport::from_checks("lemma-max", checks, 12))
}

/// Random law with 2 to 6 atoms at multiples of 1/4 in [-5, 5] and integer weights.
pub fn random_law(rng: &mut ChaCha8Rng) -> DiscreteLaw {
    let k = rng.gen_range(2..=6);
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = weights.iter().sum();
    let atoms = weights
        .iter()
        .map(|&w| (rng.gen_range(-20..=20) as f64 / 4.0, ratio(w, total)))
        .collect();
    DiscreteLaw::new(atoms).expect("weights normalise exactly")
}

pub const SYMMETRIZATION_EXPONENTS: [f64; 4] = [0.3, 0.7, 1.0, 1.5];
pub const SYMMETRIZATION_THRESHOLDS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];

/// `laws` random laws from `seed` times [`SYMMETRIZATION_EXPONENTS`] times
/// [`SYMMETRIZATION_THRESHOLDS`].
pub fn symmetrization_lattice(laws: usize, seed: u64) -> Result<LatticeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let laws: Vec<DiscreteLaw> = (0..laws).map(|_| random_law(&mut rng)).collect();
    let mut checks = Vec::new();
    for (i, law) in laws.iter().enumerate() {
        for p in SYMMETRIZATION_EXPONENTS {
            for t in SYMMETRIZATION_THRESHOLDS {
                let mut c = symmetrization_check(law, p, t)?;
                c.instance = format!("law#{i} {}", c.instance);
                checks.push(c);
            }
        }
    }
    Ok(LatticeReport::from_checks("symmetrization", checks, 12))
}

/// The fixed five-atom law on {-2, -1, 0, 1, 3}.
pub fn five_atom_law() -> DiscreteLaw {
    DiscreteLaw::new(vec![
        (-2.0, ratio(1, 10)),
        (-1.0, ratio(2, 10)),
        (0.0, ratio(3, 10)),
        (1.0, ratio(2, 10)),
        (3.0, ratio(2, 10)),
    ])
    .expect("five-atom law")
}
