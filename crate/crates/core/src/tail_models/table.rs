use serde::Serialize;

use super::TailModel;
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, integrate, QuadOptions};

/// `G(t) = int_0^t P(|X|^p > s) ds` tabulated on a geometric grid.
///
/// Every breakpoint of the model is a grid node, so the integrand is smooth inside each
/// cell and a fixed Gauss–Legendre rule evaluates the partial cell in O(1).
#[derive(Debug, Clone, Serialize)]
pub struct CumulativeTailTable {
    #[serde(skip)]
    model: TailModel,
    pub p: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Worst-case error of linear interpolation inside each cell, from monotonicity
    /// of the integrand: `(t_{i+1} - t_i) (S(t_i) - S(t_{i+1}-))`.
    pub cell_bounds: Vec<f64>,
}

impl CumulativeTailTable {
    pub(super) fn build(model: TailModel, p: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::Domain(format!("table range t_max={t_max}")));
        }
        if points < 16 {
            return Err(Error::Domain(format!("table needs >= 16 points, got {points}")));
        }
        let breaks = model.power_breakpoints(p);
        let first = breaks.iter().copied().fold(t_max, f64::min);
        let t_min = first * 1e-3;
        let ratio = (t_max / t_min).powf(1.0 / (points - 1) as f64);
        let mut nodes = vec![0.0];
        nodes.extend((0..points).map(|i| t_min * ratio.powi(i as i32)));
        nodes.extend(breaks.iter().copied().filter(|&b| b < t_max));
        nodes.push(t_max);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();

        let s = |t: f64| model.power_survival(p, t);
        let opts = QuadOptions::default();
        let mut values = Vec::with_capacity(nodes.len());
        let mut cell_bounds = Vec::with_capacity(nodes.len() - 1);
        let mut acc = 0.0;
        values.push(0.0);
        for w in nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            acc += integrate(s, lo, hi, &[], &opts)?;
            values.push(acc);
            let left_limit = s(hi * (1.0 - 1e-14));
            cell_bounds.push((hi - lo) * (s(lo) - left_limit).max(0.0));
        }
        Ok(Self {
            model,
            p,
            nodes,
            values,
            cell_bounds,
        })
    }

    pub fn t_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// `G(t)` for `0 <= t <= t_max`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > self.t_max() {
            return Err(Error::Domain(format!(
                "t={t} outside the table range [0, {}]",
                self.t_max()
            )));
        }
        let i = self.nodes.partition_point(|&x| x <= t).saturating_sub(1);
        let lo = self.nodes[i];
        if t == lo {
            return Ok(self.values[i]);
        }
        let partial = self.partial_cell(lo, t);
        Ok(self.values[i] + partial)
    }

    /// `E[Y 1(a < Y <= b)]` for `Y = |X|^p`, using the table for the integral.
    pub fn truncated_moment(&self, a: f64, b: f64) -> Result<f64> {
        if !(0.0 <= a && a <= b) {
            return Err(Error::Domain(format!("truncation window [{a}, {b}]")));
        }
        if a == b {
            return Ok(0.0);
        }
        let s = |x: f64| self.model.power_survival(self.p, x);
        let v = a * s(a) - b * s(b) + self.integral(a, b)?;
        Ok(v.max(0.0))
    }

    /// `G(b) - G(a)`; evaluated directly when both ends share a cell.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if !(0.0 <= a && a <= b) || b > self.t_max() {
            return Err(Error::Domain(format!("integration window [{a}, {b}]")));
        }
        let cell = |t: f64| self.nodes.partition_point(|&x| x <= t);
        if cell(a) == cell(b) {
            return Ok(self.partial_cell(a, b));
        }
        Ok(self.value(b)? - self.value(a)?)
    }

    fn partial_cell(&self, lo: f64, t: f64) -> f64 {
        let s = |x: f64| self.model.power_survival(self.p, x);
        if lo > 0.0 {
            // Integrate in ln t inside the cell.
            gauss_legendre(
                |u| {
                    let x = u.exp();
                    s(x) * x
                },
                lo.ln(),
                t.ln(),
            )
        } else {
            gauss_legendre(s, lo, t)
        }
    }

    /// Interpolation bound for the cell containing `t`.
    pub fn cell_bound_at(&self, t: f64) -> f64 {
        let i = self.nodes.partition_point(|&x| x <= t).saturating_sub(1);
        self.cell_bounds.get(i).copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_gives_zero_table() {
        let t = TailModel::zero().cumulative_tail_table(1.0, 100.0, 32).unwrap();
        assert!(t.values.iter().all(|&v| v == 0.0));
        assert_eq!(t.value(42.0).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_unit_gives_min_t_one() {
        let t = TailModel::degenerate(1.0)
            .cumulative_tail_table(1.0, 100.0, 64)
            .unwrap();
        for x in [0.0, 0.3, 0.999, 1.0, 2.0, 50.0, 100.0] {
            assert!((t.value(x).unwrap() - x.min(1.0)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn pareto_table_matches_antiderivative() {
        let t = TailModel::pareto(2.0)
            .cumulative_tail_table(1.0, 1e4, 128)
            .unwrap();
        assert!((t.value(4.0).unwrap() - 1.75).abs() < 1e-9);
        for x in [0.5, 1.0, 1.7, 33.3, 9999.0] {
            let exact = if x <= 1.0 { x } else { 2.0 - 1.0 / x };
            assert!((t.value(x).unwrap() - exact).abs() < 1e-9 * exact, "x={x}");
        }
        assert!(t.values.windows(2).all(|w| w[1] >= w[0]));
        assert!(t.value(1e5).is_err());
    }

    #[test]
    fn rejects_too_few_points() {
        assert!(TailModel::pareto(2.0)
            .cumulative_tail_table(1.0, 10.0, 8)
            .is_err());
    }
}
