//! Bracketed scalar root finding: grid scan, bisection, one Newton polish.

use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 1024;
pub const ROOT_TOL: f64 = 1e-12;

/// All sign-change roots of `h` on `[lo, hi]`.
///
/// The bracket is scanned on [`GRID_POINTS`] equally spaced points, each sign
/// change is bisected until `|h| < ROOT_TOL` (or the interval stops shrinking),
/// and a single Newton step is kept when it improves the residual.
pub fn find_roots<F>(h: F, lo: f64, hi: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    check_bracket(lo, hi)?;
    let n = GRID_POINTS - 1;
    let grid: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect();
    let values = grid.iter().map(|&s| h(s)).collect::<Result<Vec<_>>>()?;
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite value {} at s = {}",
            values[bad], grid[bad]
        )));
    }

    let mut roots = Vec::new();
    for i in 0..n {
        let (a, b) = (grid[i], grid[i + 1]);
        let (ha, hb) = (values[i], values[i + 1]);
        if ha == 0.0 {
            roots.push(a);
        } else if ha * hb < 0.0 {
            let r = bisect(&h, a, b, ha)?;
            roots.push(polish(&h, r, a, b)?);
        }
    }
    if values[n] == 0.0 {
        roots.push(hi);
    }
    Ok(roots)
}

fn check_bracket(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "bracket must satisfy lo < hi, got ({lo}, {hi})"
        )))
    }
}

fn bisect<F>(h: &F, mut a: f64, mut b: f64, mut ha: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Ok(m);
        }
        let hm = h(m)?;
        if hm.abs() < ROOT_TOL {
            return Ok(m);
        }
        if (hm < 0.0) == (ha < 0.0) {
            a = m;
            ha = hm;
        } else {
            b = m;
        }
    }
}

fn polish<F>(h: &F, r: f64, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let hr = h(r)?;
    let step = 1e-6 * r.abs().max(1.0);
    let (lo, hi) = ((r - step).max(a), (r + step).min(b));
    let slope = (h(hi)? - h(lo)?) / (hi - lo);
    if !(slope.is_finite() && slope != 0.0) {
        return Ok(r);
    }
    let candidate = r - hr / slope;
    if candidate < a || candidate > b {
        return Ok(r);
    }
    let hc = h(candidate)?;
    Ok(if hc.abs() <= hr.abs() { candidate } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_all_roots_of_a_cubic() {
        let roots = find_roots(|s| Ok((s - 1.0) * (s - 2.5) * (s - 4.0)), 0.1, 10.0).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, want) in roots.iter().zip([1.0, 2.5, 4.0]) {
            assert!((r - want).abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn no_sign_change_is_empty() {
        assert!(find_roots(|s| Ok(1.0 + s * s), -3.0, 3.0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn residual_meets_tolerance() {
        let h = |s: f64| Ok(s.cos() - 0.3 * s);
        for r in find_roots(h, 0.0, 20.0).unwrap() {
            assert!(h(r).unwrap().abs() < ROOT_TOL);
        }
    }

    #[test]
    fn bad_bracket_rejected() {
        assert!(find_roots(Ok, 2.0, 1.0).is_err());
        assert!(find_roots(Ok, f64::NAN, 1.0).is_err());
    }
}
