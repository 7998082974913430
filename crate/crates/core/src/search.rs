//! Scalar search helpers: coarse grid scan, golden-section refinement, bisection.

use crate::error::{Error, Result};

/// 1/φ
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of `f` inside `[lo, hi]` until the bracket is narrower than `xtol`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !(xtol > 0.0) {
        return Err(Error::Domain(format!("golden_section needs lo < hi and xtol > 0, got [{lo}, {hi}], {xtol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 2;
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        evaluations += 1;
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(Minimum { x, value, evaluations })
}

/// Evaluates `f` on every grid point; failures are kept as `None`.
pub fn scan<F>(f: F, grid: &[f64]) -> Vec<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    grid.iter().map(|&x| f(x).ok().filter(|v| v.is_finite())).collect()
}

/// Number of strict interior local minima in a scanned curve, skipping missing points.
pub fn count_local_minima(values: &[Option<f64>]) -> usize {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    present.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count()
}

/// Bisection for a root of `f` on `[lo, hi]`; the endpoints must bracket a sign change.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "bisection interval [{lo}, {hi}] does not bracket a root ({fa:e}, {fb:e})"
        )));
    }
    while b - a > xtol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| Ok((x - 0.37).powi(2) + 1.0), 0.0, 2.0, 1e-8).unwrap();
        assert!((m.x - 0.37).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_rejects_empty_bracket() {
        assert!(golden_section(Ok, 1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn bisect_requires_bracket() {
        assert!(bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn local_minima_counting() {
        let v = [Some(3.0), Some(1.0), None, Some(2.0), Some(0.5), Some(4.0)];
        assert_eq!(count_local_minima(&v), 2);
    }
}
