//! Derivative-free minimizers: golden-section search, grid-then-golden
//! scalar minimization, and a Nelder–Mead simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarMin<T: Real = f64> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Golden-section search on `[lo, hi]`, stopping once the bracket is
/// narrower than `abs_tol`.
pub fn golden_section<T: Real, F>(mut f: F, lo: T, hi: T, abs_tol: T) -> ScalarMin<T>
where
    F: FnMut(T) -> T,
{
    let inv_phi = real::<T>((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while b - a > abs_tol && evals < 200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    if fc <= fd {
        ScalarMin { x: c, value: fc, evaluations: evals }
    } else {
        ScalarMin { x: d, value: fd, evaluations: evals }
    }
}

/// Index of the smallest finite value; ties go to the lower index.
pub fn argmin<T: Real>(values: &[T]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            Some(b) if values[b] <= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Minimizes over sampled points, then refines the bracket around the best
/// sample by golden section. Returns the better of the sample and the
/// refinement.
pub fn grid_then_golden<T: Real, F>(
    f: &mut F,
    grid: &[T],
    values: &[T],
    abs_tol: T,
) -> Option<ScalarMin<T>>
where
    F: FnMut(T) -> T,
{
    let i = argmin(values)?;
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let sample = ScalarMin {
        x: grid[i],
        value: values[i],
        evaluations: 0,
    };
    if lo == hi {
        return Some(sample);
    }
    let refined = golden_section(f, lo, hi, abs_tol);
    Some(if refined.value < sample.value { refined } else { sample })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptions<T: Real = f64> {
    /// Initial edge length along each coordinate.
    pub step: T,
    /// Converged when every vertex lies within this distance of the best.
    pub diameter_tol: T,
    pub max_evaluations: usize,
}

impl<T: Real> Default for SimplexOptions<T> {
    fn default() -> Self {
        Self {
            step: real(0.25),
            diameter_tol: real(1e-6),
            max_evaluations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexResult<T: Real = f64> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients (reflection 1, expansion 2,
/// contraction ½, shrink ½). Non-convergence is reported, not raised.
pub fn nelder_mead<T: Real, F>(mut f: F, start: &[T], opts: &SimplexOptions<T>) -> Result<SimplexResult<T>>
where
    F: FnMut(&[T]) -> T,
{
    let n = start.len();
    if n == 0 {
        return Err(Error::Config("simplex needs at least one coordinate".into()));
    }
    let half = real::<T>(0.5);
    let two = real::<T>(2.0);
    let mut pts: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    pts.push(start.to_vec());
    for k in 0..n {
        let mut p = start.to_vec();
        p[k] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<T> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let diameter = pts[1..]
            .iter()
            .map(|p| dist(p, &pts[0]))
            .fold(T::zero(), |a, b| a.max(b));
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }
        if evals >= opts.max_evaluations {
            break;
        }

        let mut centroid = vec![T::zero(); n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += *x;
            }
        }
        let inv = T::one() / real::<T>(n as f64);
        centroid.iter_mut().for_each(|c| *c *= inv);
        let worst = pts[n].clone();
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };

        let xr = along(T::one());
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(two);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(half);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-half);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=n {
            pts[i] = best
                .iter()
                .zip(&pts[i])
                .map(|(b, p)| *b + half * (*p - *b))
                .collect();
            vals[i] = f(&pts[i]);
        }
        evals += n;
    }

    let i = argmin(&vals).unwrap_or(0);
    Ok(SimplexResult {
        x: pts[i].clone(),
        value: vals[i],
        evaluations: evals,
        converged,
    })
}

fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
        .sqrt()
}

/// `n` logarithmically spaced points on `[lo, hi]` (both positive).
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi >= lo) || n == 0 {
        return Err(Error::Config("log grid needs 0 < lo <= hi and at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / real::<T>((n - 1) as f64);
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                (a + step * real::<T>(k as f64)).exp()
            }
        })
        .collect())
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linear_grid<T: Real>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if n == 0 || hi < lo {
        return Err(Error::Config("linear grid needs lo <= hi and at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / real::<T>((n - 1) as f64);
    Ok((0..n)
        .map(|k| if k == n - 1 { hi } else { lo + step * real::<T>(k as f64) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let r = golden_section(|x: f64| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-8);
        assert!((r.x - 0.3).abs() < 1e-7);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn argmin_prefers_first_of_ties_and_skips_nan() {
        assert_eq!(argmin(&[3.0, 1.0, 1.0, f64::NAN]), Some(1));
        assert_eq!(argmin(&[f64::NAN, f64::INFINITY]), None);
    }

    #[test]
    fn simplex_rosenbrock() {
        let rosen = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let opts = SimplexOptions {
            step: 0.5,
            diameter_tol: 1e-9,
            max_evaluations: 5000,
        };
        let r = nelder_mead(rosen, &[-1.2, 1.0], &opts).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn simplex_flags_budget_exhaustion() {
        let opts = SimplexOptions {
            step: 0.5,
            diameter_tol: 1e-14,
            max_evaluations: 20,
        };
        let r = nelder_mead(|p: &[f64]| p[0].powi(2) + p[1].powi(2), &[3.0, -2.0], &opts).unwrap();
        assert!(!r.converged);
        assert!(r.value < 13.0);
    }

    #[test]
    fn grids() {
        let g = log_grid(1e-5f64, 1e-2, 61).unwrap();
        assert_eq!(g.len(), 61);
        assert!((g[0] - 1e-5).abs() < 1e-20 && g[60] == 1e-2);
        assert!((g[20] - 1e-4).abs() < 1e-16);
        assert_eq!(log_grid(2.0, 2.0, 1).unwrap(), vec![2.0]);
        assert!(log_grid(0.0, 1.0, 5).is_err());
        let l = linear_grid(0.0f64, 1.0, 41).unwrap();
        assert_eq!(l[40], 1.0);
        assert!((l[1] - 0.025).abs() < 1e-15);
    }

    #[test]
    fn grid_then_golden_refines_interior() {
        let mut f = |x: f64| (x - 0.37).powi(2);
        let grid = linear_grid(0.0, 1.0, 11).unwrap();
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let r = grid_then_golden(&mut f, &grid, &vals, 1e-9).unwrap();
        assert!((r.x - 0.37).abs() < 1e-8);
    }
}
