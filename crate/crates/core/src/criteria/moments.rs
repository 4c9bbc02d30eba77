use super::verdict::{decide, edge_evidence, last_decade, Asymptotics, Verdict};
use super::CriteriaOptions;
use crate::error::{Error, Result};
use crate::numeric::{integrate, NeumaierSum, QuadOptions};
use crate::tail_models::{TailModel, TailSignature};

/// Decade breakpoints `10^k` on `(lo, hi)`, so every quadrature piece spans at most a decade.
fn decades(lo: f64, hi: f64) -> Vec<f64> {
    (-12..=308)
        .map(|k| 10f64.powi(k))
        .filter(|&x| x > lo && x < hi)
        .collect()
}

/// Integrates `g` over `[0, xs[0]]` and each grid cell, returning the total and the
/// partial values at the grid points.
fn integrate_on_grid(g: impl Fn(f64) -> f64, grid: &[f64], breaks: &[f64]) -> Result<(f64, Vec<(f64, f64)>)> {
    let opts = QuadOptions::default();
    let mut bps: Vec<f64> = breaks.to_vec();
    bps.extend(decades(0.0, grid[0]));
    let mut acc = NeumaierSum::default();
    acc.add(integrate(&g, 0.0, grid[0], &bps, &opts)?);
    let mut partials = vec![(grid[0], acc.value())];
    for w in grid.windows(2) {
        acc.add(integrate(&g, w[0], w[1], breaks, &opts)?);
        partials.push((w[1], acc.value()));
    }
    Ok((acc.value(), partials))
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::Domain(format!("exponent p={p} outside (0, 2)")));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("exponent q={q} must be positive")));
    }
    Ok(())
}

fn check_cap(knee: f64, t_cap: f64) -> Result<()> {
    if !(t_cap > knee && t_cap.is_finite()) {
        return Err(Error::Domain(format!(
            "window edge {t_cap} must exceed the tail knee {knee}"
        )));
    }
    Ok(())
}

/// `int_0^inf P^{q/p}(|X|^q > t) dt` on `[0, t_cap]` with a convergence verdict.
pub fn integral_pq(model: &TailModel, p: f64, q: f64, opts: &CriteriaOptions) -> Result<Verdict> {
    check_exponents(p, q)?;
    let breaks = model.power_breakpoints(q);
    let knee = breaks.iter().copied().fold(0.0, f64::max);
    check_cap(knee, opts.t_cap)?;
    let r = q / p;
    let g = |t: f64| {
        let s = model.power_survival(q, t);
        if s == 0.0 {
            0.0
        } else {
            s.powf(r)
        }
    };
    let grid = last_decade(opts.t_cap, opts.per_decade);
    let (total, partials) = integrate_on_grid(g, &grid, &breaks)?;
    let values: Vec<f64> = grid.iter().map(|&t| g(t)).collect();
    let evidence = edge_evidence(&grid, &values, opts);
    let asym = model.signature().map(|sig| match sig {
        TailSignature::Bounded { upper } => Asymptotics::Vanishing { from: upper.powf(q) },
        TailSignature::Regular { c, .. } if c == 0.0 => Asymptotics::Vanishing { from: knee },
        TailSignature::Regular { a, b, d, .. } => Asymptotics::Regular {
            exponents: [a / p, b * r, d * r],
        },
    });
    Ok(decide(evidence, asym, total, partials, *values.last().unwrap()))
}

/// `E|X|^p = int_0^inf P(|X|^p > t) dt` on `[0, t_cap]`.
pub fn p_moment(model: &TailModel, p: f64, opts: &CriteriaOptions) -> Result<Verdict> {
    integral_pq(model, p, p, opts)
}

/// `h(x) = x^p ln^delta(1 + x)`.
fn llogl_transform(x: f64, p: f64, delta: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(p) * x.ln_1p().powf(delta)
    }
}

fn llogl_derivative(x: f64, p: f64, delta: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let l = x.ln_1p();
    p * x.powf(p - 1.0) * l.powf(delta) + x.powf(p) * delta * l.powf(delta - 1.0) / (1.0 + x)
}

/// Solves `h(x) = t` by bisection in `ln x`.
fn invert_llogl(t: f64, p: f64, delta: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let h = |s: f64| llogl_transform(s.exp(), p, delta);
    let (mut lo, mut hi) = (-700.0, 700.0);
    if !(h(lo) <= t && h(hi) >= t) {
        return Err(Error::InversionFailure { level: t });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// `E[|X|^p ln^delta(1 + |X|)] = int_0^inf P(h(|X|) > t) dt` on `[0, t_cap]`.
///
/// The integral is evaluated in `x = h^{-1}(t)` as `int S(x) h'(x) dx`; the edge
/// exponents are fitted on `S(h^{-1}(t))` in the original variable.
pub fn llogl_moment(model: &TailModel, p: f64, delta: f64, opts: &CriteriaOptions) -> Result<Verdict> {
    check_exponents(p, 1.0)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!(
            "log exponent delta={delta} must be positive"
        )));
    }
    let breaks = model.breakpoints();
    let knee = breaks.iter().copied().fold(0.0, f64::max);
    check_cap(llogl_transform(knee, p, delta), opts.t_cap)?;
    let grid_t = last_decade(opts.t_cap, opts.per_decade);
    let grid_x = grid_t
        .iter()
        .map(|&t| invert_llogl(t, p, delta))
        .collect::<Result<Vec<f64>>>()?;
    let integrand = |x: f64| {
        let s = model.survival(x);
        if s == 0.0 {
            0.0
        } else {
            s * llogl_derivative(x, p, delta)
        }
    };
    let (total, partials_x) = integrate_on_grid(integrand, &grid_x, &breaks)?;
    let partials: Vec<(f64, f64)> = grid_t
        .iter()
        .zip(&partials_x)
        .map(|(&t, &(_, v))| (t, v))
        .collect();
    let values: Vec<f64> = grid_x.iter().map(|&x| model.survival(x)).collect();
    let evidence = edge_evidence(&grid_t, &values, opts);
    let asym = model.signature().map(|sig| match sig {
        TailSignature::Bounded { upper } => Asymptotics::Vanishing {
            from: llogl_transform(upper, p, delta),
        },
        TailSignature::Regular { c, .. } if c == 0.0 => Asymptotics::Vanishing { from: knee },
        TailSignature::Regular { a, b, d, .. } => Asymptotics::Regular {
            exponents: [a / p, b - a * delta / p, d],
        },
    });
    Ok(decide(evidence, asym, total, partials, *values.last().unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::VerdictKind;

    #[test]
    fn inversion_round_trips() {
        for t in [1e-6, 0.3, 1.0, 1e4, 1e12] {
            let x = invert_llogl(t, 0.7, 0.5).unwrap();
            assert!((llogl_transform(x, 0.7, 0.5) / t - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_moments() {
        let opts = CriteriaOptions::default();
        let m = TailModel::degenerate(3.0);
        let v = integral_pq(&m, 0.5, 0.25, &opts).unwrap();
        assert_eq!(v.kind, VerdictKind::Converges);
        assert!(
            (v.estimate_on_window - 3f64.powf(0.25)).abs() < 1e-12,
            "{}",
            v.estimate_on_window
        );
        let v = llogl_moment(&TailModel::degenerate(1.0), 0.5, 0.5, &opts).unwrap();
        assert!((v.estimate_on_window - 2f64.ln().sqrt()).abs() < 1e-9);
    }
}
