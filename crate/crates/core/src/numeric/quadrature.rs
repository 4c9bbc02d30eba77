//! Globally adaptive Simpson quadrature.
//!
//! Intervals are kept in a max-heap keyed by their Richardson error estimate and the
//! worst one is bisected until the summed estimate meets the requested tolerance or
//! the interval budget runs out. Known discontinuities of the integrand should be
//! passed as breakpoints so that every initial interval is smooth.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Variable used on each smooth sub-interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substitution {
    /// Integrate in `t` directly.
    Linear,
    /// Integrate in `s = ln t` (requires `t > 0`); used for long geometric ranges.
    Log,
    /// `Log` on sub-intervals with `lo > 0` spanning more than a factor of 4, else `Linear`.
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of live intervals.
    pub budget: usize,
    pub substitution: Substitution,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            budget: 1_000_000,
            substitution: Substitution::Auto,
        }
    }
}

struct Cell {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    estimate: f64,
    error: f64,
    piece: usize,
}

/// A smooth sub-interval `[t0, t1]` and its bounds `[a, b]` in the working variable.
struct Piece {
    t0: f64,
    t1: f64,
    a: f64,
    b: f64,
    log_space: bool,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[inline]
fn simpson(h: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[lo, hi]`, splitting at every breakpoint strictly inside.
pub fn integrate<F>(f: F, lo: f64, hi: f64, breakpoints: &[f64], opts: &QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::Domain(format!("integration bounds [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let mut nodes = vec![lo];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi && x.is_finite())
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    nodes.extend(inner);
    nodes.push(hi);

    // Piece ends are evaluated as one-sided limits from inside the piece.
    let left_limit = |t: f64| -> f64 {
        if t > 0.0 {
            f(t * (1.0 - 4.0 * f64::EPSILON))
        } else {
            f(t - f64::MIN_POSITIVE)
        }
    };
    // g is the integrand in the working variable.
    let eval = |x: f64, piece: &Piece| -> f64 {
        let v = if x == piece.b {
            let t = piece.t1;
            if piece.log_space {
                left_limit(t) * t
            } else {
                left_limit(t)
            }
        } else if x == piece.a {
            let t = piece.t0;
            let v = f(t * (1.0 + 4.0 * f64::EPSILON));
            if piece.log_space {
                v * t
            } else {
                v
            }
        } else if piece.log_space {
            let t = x.exp().clamp(piece.t0, piece.t1);
            f(t) * t
        } else {
            f(x)
        };
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let pieces: Vec<Piece> = nodes
        .windows(2)
        .map(|w| {
            let (t0, t1) = (w[0], w[1]);
            let log_space = match opts.substitution {
                Substitution::Linear => false,
                Substitution::Log => t0 > 0.0,
                Substitution::Auto => t0 > 0.0 && t1 / t0 > 4.0,
            };
            let (a, b) = if log_space { (t0.ln(), t1.ln()) } else { (t0, t1) };
            Piece {
                t0,
                t1,
                a,
                b,
                log_space,
            }
        })
        .collect();

    let make_cell = |a: f64, b: f64, fa: f64, fm: f64, fb: f64, piece: usize| -> Cell {
        let pc = &pieces[piece];
        let m = 0.5 * (a + b);
        let flm = eval(0.5 * (a + m), pc);
        let frm = eval(0.5 * (m + b), pc);
        let whole = simpson(b - a, fa, fm, fb);
        let halves = simpson(m - a, fa, flm, fm) + simpson(b - m, fm, frm, fb);
        let diff = halves - whole;
        Cell {
            a,
            b,
            fa,
            fm,
            fb,
            estimate: halves + diff / 15.0,
            error: diff.abs() / 15.0,
            piece,
        }
    };

    let mut heap = BinaryHeap::new();
    for (i, pc) in pieces.iter().enumerate() {
        // Seed each smooth piece with a few equal cells.
        const SEED: usize = 4;
        let h = (pc.b - pc.a) / SEED as f64;
        for k in 0..SEED {
            let ca = pc.a + h * k as f64;
            let cb = if k + 1 == SEED {
                pc.b
            } else {
                pc.a + h * (k + 1) as f64
            };
            let fa = eval(ca, pc);
            let fb = eval(cb, pc);
            let fm = eval(0.5 * (ca + cb), pc);
            heap.push(make_cell(ca, cb, fa, fm, fb, i));
        }
    }

    loop {
        let (total, err): (f64, f64) = heap
            .iter()
            .fold((0.0, 0.0), |(s, e), c| (s + c.estimate, e + c.error));
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(total);
        }
        // Refine a batch of the worst cells before recomputing the totals.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let worst = match heap.pop() {
                Some(c) => c,
                None => break,
            };
            let m = 0.5 * (worst.a + worst.b);
            if (worst.b - worst.a) <= 4.0 * f64::EPSILON * m.abs().max(1e-300) {
                // Cannot bisect further; accept as is.
                heap.push(Cell { error: 0.0, ..worst });
                continue;
            }
            let left = make_cell(
                worst.a,
                m,
                worst.fa,
                eval(0.5 * (worst.a + m), &pieces[worst.piece]),
                worst.fm,
                worst.piece,
            );
            let right = make_cell(
                m,
                worst.b,
                worst.fm,
                eval(0.5 * (m + worst.b), &pieces[worst.piece]),
                worst.fb,
                worst.piece,
            );
            heap.push(left);
            heap.push(right);
        }
        if heap.len() > opts.budget {
            return Err(Error::QuadratureFailure {
                a: lo,
                b: hi,
                budget: opts.budget,
                err,
            });
        }
    }
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Fixed 8-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x, 0.0, 3.0, &[], &QuadOptions::default()).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn power_tail_over_many_decades() {
        // integral of t^-2 on [1, 1e12] = 1 - 1e-12
        let v = integrate(|t| t.powi(-2), 1.0, 1e12, &[], &QuadOptions::default()).unwrap();
        assert!((v - (1.0 - 1e-12)).abs() < 1e-9);
    }

    #[test]
    fn step_function_with_breakpoint() {
        let f = |t: f64| if t < 2.0 { 1.0 } else { 0.0 };
        let v = integrate(f, 0.0, 10.0, &[2.0], &QuadOptions::default()).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn unresolvable_jump_exhausts_small_budget() {
        let f = |t: f64| if t < std::f64::consts::PI { 1.0 } else { 0.0 };
        let opts = QuadOptions {
            budget: 16,
            rel_tol: 1e-14,
            abs_tol: 0.0,
            ..QuadOptions::default()
        };
        let r = integrate(f, 0.0, 10.0, &[], &opts);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_15() {
        let v = gauss_legendre(|x| x.powi(15) + x.powi(14), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }
}
