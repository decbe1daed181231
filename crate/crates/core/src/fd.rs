//! Central finite differences with optional Richardson extrapolation.

use crate::error::Result;
use crate::tensor::Components;

/// Step policy for a central difference: `h = rel · max(1, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdStep {
    pub rel: f64,
    pub richardson: bool,
}

impl FdStep {
    /// `ε^(1/3)` with one Richardson level; the step used by the gradient oracle.
    pub fn cube_root() -> Self {
        FdStep {
            rel: f64::EPSILON.cbrt(),
            richardson: true,
        }
    }

    /// `ε^(1/5)` with one Richardson level. The extrapolated difference is
    /// fourth order, so this step balances truncation against rounding.
    pub fn fifth_root() -> Self {
        FdStep {
            rel: f64::EPSILON.powf(0.2),
            richardson: true,
        }
    }

    pub fn plain(rel: f64) -> Self {
        FdStep {
            rel,
            richardson: false,
        }
    }

    pub fn halved(self) -> Self {
        FdStep {
            rel: 0.5 * self.rel,
            ..self
        }
    }

    pub fn step(&self, scale: f64) -> f64 {
        self.rel * scale.abs().max(1.0)
    }
}

impl Default for FdStep {
    fn default() -> Self {
        FdStep::fifth_root()
    }
}

/// Derivative at `s = 0` of `s ↦ f(s)` with absolute step `h`.
pub fn derivative_with_step<T, F>(f: F, h: f64, richardson: bool) -> Result<T>
where
    T: Components,
    F: Fn(f64) -> Result<T>,
{
    let coarse = T::lin(1.0, &f(h)?, -1.0, &f(-h)?).scale(0.5 / h);
    if !richardson {
        return Ok(coarse);
    }
    let half = 0.5 * h;
    let fine = T::lin(1.0, &f(half)?, -1.0, &f(-half)?).scale(0.5 / half);
    Ok(T::lin(4.0 / 3.0, &fine, -1.0 / 3.0, &coarse))
}

/// Derivative at `s = 0` of `s ↦ f(s)`, with the step scaled by `scale`.
pub fn derivative<T, F>(f: F, step: &FdStep, scale: f64) -> Result<T>
where
    T: Components,
    F: Fn(f64) -> Result<T>,
{
    derivative_with_step(f, step.step(scale), step.richardson)
}

/// Directional partials `∂/∂u^d` for `d = 0, 1, 2` of `f` at the base point `u`.
pub fn partials<T, F>(f: F, u: &[f64; 3], step: &FdStep) -> Result<[T; 3]>
where
    T: Components,
    F: Fn(&[f64; 3]) -> Result<T>,
{
    let scale = u.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut out = [T::zero(); 3];
    for (d, slot) in out.iter_mut().enumerate() {
        *slot = derivative(
            |s| {
                let mut probe = *u;
                probe[d] += s;
                f(&probe)
            },
            step,
            scale,
        )?;
    }
    Ok(out)
}
