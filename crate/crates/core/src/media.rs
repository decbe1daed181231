//! Refractive-index profiles `n(x)` and the optical factor `γ(x) = √(n²(x) − 1)`.
//!
//! Radially symmetric media are described by a radial function `f` with
//! `γ = f(s)`, where `s` is the distance to the symmetry axis (cylindrical)
//! or to the origin (spherical). Built-in profiles carry hand-derived
//! derivatives; user-supplied radial functions may provide one or fall back
//! to a finite-difference derivative.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{self, FdStep};
use crate::tensor::{norm, Components, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Cylindrical,
    Spherical,
}

impl Symmetry {
    /// Symmetry radius: `ρ = √(x₁² + x₂²)` or `r = |x|`.
    pub fn radius(self, x: &Vec3) -> f64 {
        match self {
            Symmetry::Cylindrical => x[0].hypot(x[1]),
            Symmetry::Spherical => norm(x),
        }
    }

    /// Gradient of the symmetry radius; undefined at `s = 0`.
    fn radial_unit(self, x: &Vec3, s: f64) -> Vec3 {
        match self {
            Symmetry::Cylindrical => [x[0] / s, x[1] / s, 0.0],
            Symmetry::Spherical => [x[0] / s, x[1] / s, x[2] / s],
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symmetry::Cylindrical => f.write_str("cylindrical"),
            Symmetry::Spherical => f.write_str("spherical"),
        }
    }
}

/// A user-supplied radial function `s ↦ f(s)` for `s > 0`.
pub trait RadialFunction: Send + Sync + fmt::Debug {
    fn value(&self, s: f64) -> f64;

    /// Exact derivative, when known. Without one, a central difference is used.
    fn derivative(&self, _s: f64) -> Option<f64> {
        None
    }

    /// `(f(0⁺), f′(0⁺))`, when the function extends continuously to `s = 0`.
    fn axis_limit(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Serializable description of the built-in profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Uniform {
        n0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symmetry: Option<Symmetry>,
    },
    GaussianMirage {
        epsilon: f64,
        width: f64,
        symmetry: Symmetry,
    },
    GaussianRing {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
        #[serde(default = "default_ring_symmetry")]
        symmetry: Symmetry,
    },
}

fn default_ring_symmetry() -> Symmetry {
    Symmetry::Cylindrical
}

#[derive(Clone)]
pub enum RefractiveProfile {
    Uniform {
        n0: f64,
    },
    CylindricalRadial(Arc<dyn RadialFunction>),
    SphericalRadial(Arc<dyn RadialFunction>),
    /// `n = 1 + ε·exp(−s²/w²)`.
    GaussianMirage {
        epsilon: f64,
        width: f64,
        symmetry: Symmetry,
    },
    /// `f(s) = base + amplitude·exp(−(s − center)²/w²)`.
    GaussianRing {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
        symmetry: Symmetry,
    },
}

impl fmt::Debug for RefractiveProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefractiveProfile::CylindricalRadial(func) => {
                f.debug_tuple("CylindricalRadial").field(func).finish()
            }
            RefractiveProfile::SphericalRadial(func) => {
                f.debug_tuple("SphericalRadial").field(func).finish()
            }
            other => match other.spec() {
                Some(spec) => spec.fmt(f),
                None => f.write_str("RefractiveProfile"),
            },
        }
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl RefractiveProfile {
    pub fn uniform(n0: f64) -> Result<Self> {
        if !(n0.is_finite() && n0 >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "uniform index must be >= 1, got {n0}"
            )));
        }
        Ok(RefractiveProfile::Uniform { n0 })
    }

    /// Uniform medium with the given constant `γ₀ ≥ 0`.
    pub fn uniform_gamma(gamma0: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {gamma0}"
            )));
        }
        Self::uniform((1.0 + gamma0 * gamma0).sqrt())
    }

    pub fn gaussian_mirage(epsilon: f64, width: f64, symmetry: Symmetry) -> Result<Self> {
        check_positive("epsilon", epsilon)?;
        check_positive("width", width)?;
        Ok(RefractiveProfile::GaussianMirage {
            epsilon,
            width,
            symmetry,
        })
    }

    pub fn gaussian_ring(
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
        symmetry: Symmetry,
    ) -> Result<Self> {
        check_positive("base", base)?;
        check_positive("center", center)?;
        check_positive("width", width)?;
        if !amplitude.is_finite() || base + amplitude.min(0.0) < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ring amplitude {amplitude} would make gamma negative"
            )));
        }
        Ok(RefractiveProfile::GaussianRing {
            base,
            amplitude,
            center,
            width,
            symmetry,
        })
    }

    pub fn cylindrical(f: impl RadialFunction + 'static) -> Self {
        RefractiveProfile::CylindricalRadial(Arc::new(f))
    }

    pub fn spherical(f: impl RadialFunction + 'static) -> Self {
        RefractiveProfile::SphericalRadial(Arc::new(f))
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        match *spec {
            ProfileSpec::Uniform { n0, .. } => Self::uniform(n0),
            ProfileSpec::GaussianMirage {
                epsilon,
                width,
                symmetry,
            } => Self::gaussian_mirage(epsilon, width, symmetry),
            ProfileSpec::GaussianRing {
                base,
                amplitude,
                center,
                width,
                symmetry,
            } => Self::gaussian_ring(base, amplitude, center, width, symmetry),
        }
    }

    /// The serializable description; `None` for user radial functions.
    pub fn spec(&self) -> Option<ProfileSpec> {
        match *self {
            RefractiveProfile::Uniform { n0 } => Some(ProfileSpec::Uniform { n0, symmetry: None }),
            RefractiveProfile::GaussianMirage {
                epsilon,
                width,
                symmetry,
            } => Some(ProfileSpec::GaussianMirage {
                epsilon,
                width,
                symmetry,
            }),
            RefractiveProfile::GaussianRing {
                base,
                amplitude,
                center,
                width,
                symmetry,
            } => Some(ProfileSpec::GaussianRing {
                base,
                amplitude,
                center,
                width,
                symmetry,
            }),
            RefractiveProfile::CylindricalRadial(_) | RefractiveProfile::SphericalRadial(_) => None,
        }
    }

    /// `None` for a uniform medium.
    pub fn symmetry(&self) -> Option<Symmetry> {
        match self {
            RefractiveProfile::Uniform { .. } => None,
            RefractiveProfile::CylindricalRadial(_) => Some(Symmetry::Cylindrical),
            RefractiveProfile::SphericalRadial(_) => Some(Symmetry::Spherical),
            RefractiveProfile::GaussianMirage { symmetry, .. }
            | RefractiveProfile::GaussianRing { symmetry, .. } => Some(*symmetry),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, RefractiveProfile::Uniform { .. })
    }

    /// `(f(s), f′(s))` for radially symmetric profiles.
    pub fn radial_f(&self, s: f64) -> Result<(f64, f64)> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::domain(
                [s, 0.0, 0.0],
                format!("symmetry radius must be >= 0, got {s}"),
            ));
        }
        match self {
            RefractiveProfile::Uniform { .. } => Err(Error::UnsupportedProfile(
                "a uniform medium has no radial function".into(),
            )),
            &RefractiveProfile::GaussianMirage { epsilon, width, .. } => {
                let w2 = width * width;
                let e = epsilon * (-s * s / w2).exp();
                let f = (e * (2.0 + e)).sqrt();
                let fp = -(2.0 * s / w2) * (1.0 + e) * (e / (2.0 + e)).sqrt();
                Ok((f, fp))
            }
            &RefractiveProfile::GaussianRing {
                base,
                amplitude,
                center,
                width,
                ..
            } => {
                let w2 = width * width;
                let d = s - center;
                let bump = amplitude * (-d * d / w2).exp();
                Ok((base + bump, -2.0 * d / w2 * bump))
            }
            RefractiveProfile::CylindricalRadial(func)
            | RefractiveProfile::SphericalRadial(func) => user_radial(func.as_ref(), s),
        }
    }

    /// `γ(x) = √(n²(x) − 1)`.
    pub fn gamma(&self, x: &Vec3) -> Result<f64> {
        let gamma = match (self, self.symmetry()) {
            (&RefractiveProfile::Uniform { n0 }, _) => ((n0 - 1.0) * (n0 + 1.0)).sqrt(),
            (_, Some(sym)) => self.radial_at(x, sym)?.0,
            (_, None) => unreachable!("only uniform profiles lack a symmetry"),
        };
        check_gamma(x, gamma)
    }

    /// Refractive index `n(x)`. For the mirage profile this is the defining
    /// expression `1 + ε·exp(−s²/w²)`, not a function of `γ`.
    pub fn refractive_index(&self, x: &Vec3) -> Result<f64> {
        match *self {
            RefractiveProfile::Uniform { n0 } => Ok(n0),
            RefractiveProfile::GaussianMirage {
                epsilon,
                width,
                symmetry,
            } => {
                let s = symmetry.radius(x);
                Ok(1.0 + epsilon * (-s * s / (width * width)).exp())
            }
            _ => {
                let g = self.gamma(x)?;
                Ok((1.0 + g * g).sqrt())
            }
        }
    }

    /// Exact spatial gradient `γ_s = ∂γ/∂x^s`.
    pub fn gamma_gradient(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.gamma_and_gradient(x)?.1)
    }

    /// `(γ(x), ∇γ(x))` in one evaluation.
    pub fn gamma_and_gradient(&self, x: &Vec3) -> Result<(f64, Vec3)> {
        let Some(sym) = self.symmetry() else {
            return Ok((self.gamma(x)?, Vec3::zero()));
        };
        let (f, fp, s) = self.radial_at(x, sym)?;
        let f = check_gamma(x, f)?;
        if s == 0.0 {
            if fp == 0.0 {
                return Ok((f, Vec3::zero()));
            }
            return Err(Error::domain(
                *x,
                format!("gradient undefined on the {sym} symmetry set (f'(0+) = {fp})"),
            ));
        }
        let unit = sym.radial_unit(x, s);
        Ok((f, unit.scale(fp)))
    }

    /// Central-difference gradient of [`gamma`](Self::gamma) with absolute
    /// step `h` and one Richardson level.
    pub fn gamma_gradient_fd(&self, x: &Vec3, h: f64) -> Result<Vec3> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        let mut grad = Vec3::zero();
        for (d, slot) in grad.iter_mut().enumerate() {
            *slot = fd::derivative_with_step(
                |t| {
                    let mut probe = *x;
                    probe[d] += t;
                    self.gamma(&probe)
                },
                h,
                true,
            )?;
        }
        Ok(grad)
    }

    /// Gradient oracle with the default step `max(1, |x|∞)·ε^(1/3)`.
    pub fn gamma_gradient_fd_default(&self, x: &Vec3) -> Result<Vec3> {
        let scale = x.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        self.gamma_gradient_fd(x, FdStep::cube_root().step(scale))
    }

    fn radial_at(&self, x: &Vec3, sym: Symmetry) -> Result<(f64, f64, f64)> {
        if !x.all_finite() {
            return Err(Error::domain(*x, "non-finite coordinates"));
        }
        let s = sym.radius(x);
        let (f, fp) = self.radial_f(s).map_err(|e| match e {
            Error::Domain { reason, .. } => Error::Domain { point: *x, reason },
            other => other,
        })?;
        Ok((f, fp, s))
    }
}

fn check_gamma(x: &Vec3, gamma: f64) -> Result<f64> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(gamma)
    } else {
        Err(Error::domain(
            *x,
            format!("gamma must be finite and >= 0, got {gamma}"),
        ))
    }
}

fn user_radial(func: &dyn RadialFunction, s: f64) -> Result<(f64, f64)> {
    if s == 0.0 {
        return func.axis_limit().ok_or_else(|| {
            Error::domain(
                [0.0; 3],
                "radial function has no declared limit at the symmetry set",
            )
        });
    }
    let f = func.value(s);
    let fp = match func.derivative(s) {
        Some(fp) => fp,
        None => {
            // One-sided room: keep probes at positive radius.
            let h = (FdStep::cube_root().step(s)).min(0.5 * s);
            fd::derivative_with_step(|t| Ok(func.value(s + t)), h, true)?
        }
    };
    if !(f.is_finite() && fp.is_finite()) {
        return Err(Error::domain(
            [s, 0.0, 0.0],
            format!("radial function is not finite at s = {s}"),
        ));
    }
    Ok((f, fp))
}
