//! Particular geodesic families of radially symmetric media.
//!
//! With `γ = f(s)` depending only on the symmetry radius, the equations of
//! motion admit circular helices, circles, vertical lines and axis segments.
//! Each solver returns families whose defining scalar equation is satisfied
//! to [`FAMILY_TOL`], together with a parametric form of the trajectory.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    el_residual, integrate, sample_grid, IntegratorConfig, Sample, Trajectory, TrajectoryMeta,
};
use crate::error::{Error, Result};
use crate::fd::{self, FdStep};
use crate::media::{RefractiveProfile, Symmetry};
use crate::metric::{energy, PhasePoint};
use crate::roots::find_roots;
use crate::tensor::{Components, Vec3};

/// Bound on the defining-equation residual of every returned family.
pub const FAMILY_TOL: f64 = 1e-10;

/// Bound on the pointwise equation-of-motion residual along a family.
pub const TRAJECTORY_TOL: f64 = 1e-8;

/// Which root of the quadratic in `v²` a helix comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootBranch {
    /// `+√Δ`
    Plus,
    /// `−√Δ`
    Minus,
    /// `2f + ρf′ = 0`: the quadratic collapses to `(1 − 2f²)v² = 1`.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelixBranch {
    /// Sense of rotation, `+1` or `−1`.
    pub omega_sign: i8,
    pub root: RootBranch,
}

/// Which closed-form validity interval applies at a radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalCase {
    /// `2f² < 1` and `2f + ρf′ ∈ [−(2f²−1)²/(4f), 0) ∪ (0, 2f)`: both roots.
    BelowHalf,
    /// `2f² > 1` and `2f + ρf′ ∈ (0, 2f)`: the `+√Δ` root only.
    AboveHalf,
    /// Neither interval holds.
    Outside,
}

/// The closed-form interval predicates for helices, kept as diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPrediction {
    pub case: IntervalCase,
    /// `2f + ρf′`
    pub slope_term: f64,
    /// `2f² − 1`
    pub index_term: f64,
    /// `(1 − 2f²)² + 4f(2f + ρf′)`
    pub discriminant: f64,
}

impl IntervalPrediction {
    pub fn predicts_solution(&self) -> bool {
        self.case != IntervalCase::Outside
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelixFamily {
    pub rho0: f64,
    pub omega0: f64,
    pub phi0: f64,
    pub branch: HelixBranch,
    /// `|ρω² + ff′v⁴/(1 + 2f²v²)|` with `v² = ρ²ω² + 1`.
    pub residual: f64,
    pub intervals: IntervalPrediction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircleKind {
    /// `(ρ₀cos t, ρ₀sin t, ζ₀)` around the cylinder axis.
    HorizontalOnAxis,
    /// `(r₀cos t, r₀sin t, 0)` around the origin.
    OriginCenteredEquatorial,
    /// `(r₀cos φ₀ sin t, r₀sin φ₀ sin t, r₀cos t)`.
    VerticalPlaneThroughOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleFamily {
    pub kind: CircleKind,
    pub radius: f64,
    /// `ζ₀` (horizontal), `θ₀ = π/2` (equatorial) or `φ₀` (vertical plane).
    pub plane_param: f64,
    pub residual: f64,
}

impl CircleFamily {
    /// Same circle moved to another plane of its kind. Equatorial circles
    /// have no free plane.
    pub fn with_plane_param(&self, plane_param: f64) -> Self {
        match self.kind {
            CircleKind::OriginCenteredEquatorial => self.clone(),
            _ => CircleFamily {
                plane_param,
                ..self.clone()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LineFamily {
    UniformStraightLine {
        x0: Vec3,
        velocity: Vec3,
    },
    /// `(ρ₀cos φ₀, ρ₀sin φ₀, t)`; `residual = |f′(ρ₀)|`.
    CylinderGenerator {
        rho0: f64,
        phi0: f64,
        residual: f64,
    },
    /// Motion along the `z` axis from height `r0` with speed `v0`. No closed
    /// form; trajectories come from the integrator.
    ZAxisSegment {
        r0: f64,
        v0: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Helix(HelixFamily),
    Circle(CircleFamily),
    Line(LineFamily),
}

impl From<HelixFamily> for Family {
    fn from(f: HelixFamily) -> Self {
        Family::Helix(f)
    }
}

impl From<CircleFamily> for Family {
    fn from(f: CircleFamily) -> Self {
        Family::Circle(f)
    }
}

impl From<LineFamily> for Family {
    fn from(f: LineFamily) -> Self {
        Family::Line(f)
    }
}

impl Family {
    /// `(x, v, a)` at time `t`, or `None` for axis segments.
    pub fn state(&self, t: f64) -> Option<(Vec3, Vec3, Vec3)> {
        Some(match self {
            Family::Helix(h) => {
                let (s, c) = (h.omega0 * t + h.phi0).sin_cos();
                let (r, w) = (h.rho0, h.omega0);
                (
                    [r * c, r * s, t],
                    [-r * w * s, r * w * c, 1.0],
                    [-r * w * w * c, -r * w * w * s, 0.0],
                )
            }
            Family::Circle(c) => {
                let r = c.radius;
                let (s, co) = t.sin_cos();
                match c.kind {
                    CircleKind::HorizontalOnAxis | CircleKind::OriginCenteredEquatorial => {
                        let z = if c.kind == CircleKind::HorizontalOnAxis {
                            c.plane_param
                        } else {
                            0.0
                        };
                        (
                            [r * co, r * s, z],
                            [-r * s, r * co, 0.0],
                            [-r * co, -r * s, 0.0],
                        )
                    }
                    CircleKind::VerticalPlaneThroughOrigin => {
                        let (sp, cp) = c.plane_param.sin_cos();
                        let x = [r * cp * s, r * sp * s, r * co];
                        (x, [r * cp * co, r * sp * co, -r * s], x.scale(-1.0))
                    }
                }
            }
            Family::Line(LineFamily::UniformStraightLine { x0, velocity }) => {
                (Vec3::lin(1.0, x0, t, velocity), *velocity, [0.0; 3])
            }
            &Family::Line(LineFamily::CylinderGenerator { rho0, phi0, .. }) => {
                let (s, c) = phi0.sin_cos();
                ([rho0 * c, rho0 * s, t], [0.0, 0.0, 1.0], [0.0; 3])
            }
            Family::Line(LineFamily::ZAxisSegment { .. }) => return None,
        })
    }

    /// Position and velocity at `t = 0`.
    pub fn initial_state(&self) -> (Vec3, Vec3) {
        match self {
            &Family::Line(LineFamily::ZAxisSegment { r0, v0 }) => ([0.0, 0.0, r0], [0.0, 0.0, v0]),
            other => {
                let (x, v, _) = other.state(0.0).expect("closed-form family");
                (x, v)
            }
        }
    }

    /// Time after which the motion repeats in the plane of rotation.
    pub fn period(&self) -> Option<f64> {
        match self {
            Family::Helix(h) if h.omega0 != 0.0 => {
                Some(2.0 * std::f64::consts::PI / h.omega0.abs())
            }
            Family::Circle(_) => Some(2.0 * std::f64::consts::PI),
            _ => None,
        }
    }

    /// Largest `el_residual` max-norm over `n` evenly spaced times on `[0, t_end]`.
    pub fn max_el_residual(
        &self,
        profile: &RefractiveProfile,
        t_end: f64,
        n: usize,
    ) -> Result<f64> {
        if self.state(0.0).is_none() {
            return Err(Error::UnsupportedProfile(
                "axis segments have no closed-form trajectory".into(),
            ));
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let t = t_end * i as f64 / (n.max(2) - 1) as f64;
            let r = el_residual(profile, |t| self.state(t).expect("closed form"), t)?;
            worst = worst.max(r.max_abs());
        }
        Ok(worst)
    }
}

fn radial_data(profile: &RefractiveProfile, s: f64) -> Result<(f64, f64)> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {s}"
        )));
    }
    profile.radial_f(s)
}

fn require(profile: &RefractiveProfile, sym: Symmetry, what: &str) -> Result<()> {
    match profile.symmetry() {
        Some(s) if s == sym => Ok(()),
        Some(s) => Err(Error::UnsupportedProfile(format!(
            "{what} needs a {sym} profile, got {s}"
        ))),
        None => Err(Error::UnsupportedProfile(format!(
            "{what} needs a {sym} profile, got a uniform medium"
        ))),
    }
}

fn require_radial(profile: &RefractiveProfile, what: &str) -> Result<Symmetry> {
    profile.symmetry().ok_or_else(|| {
        Error::UnsupportedProfile(format!("{what} needs a radially symmetric profile"))
    })
}

/// `v⁴/(1 + 2f²v²)` and its derivative with respect to `v²`.
fn push_factor(f: f64, v2: f64) -> (f64, f64) {
    let den = 1.0 + 2.0 * f * f * v2;
    (v2 * v2 / den, 2.0 * v2 * (1.0 + f * f * v2) / (den * den))
}

/// `ρω² + ff′v⁴/(1 + 2f²v²)`, `v² = ρ²ω² + 1`; zero exactly for helices.
pub fn helix_equation(profile: &RefractiveProfile, rho: f64, omega: f64) -> Result<f64> {
    let (f, fp) = radial_data(profile, rho)?;
    Ok(helix_equation_with(f, fp, rho, omega))
}

fn helix_equation_with(f: f64, fp: f64, rho: f64, omega: f64) -> f64 {
    let v2 = rho * rho * omega * omega + 1.0;
    rho * omega * omega + f * fp * push_factor(f, v2).0
}

/// The interval predicates that accompany the closed-form helix solutions.
pub fn helix_interval_prediction(
    profile: &RefractiveProfile,
    rho: f64,
) -> Result<IntervalPrediction> {
    require(profile, Symmetry::Cylindrical, "helix solutions")?;
    let (f, fp) = radial_data(profile, rho)?;
    Ok(interval_prediction(f, fp, rho))
}

fn interval_prediction(f: f64, fp: f64, rho: f64) -> IntervalPrediction {
    let q = 2.0 * f + rho * fp;
    let k = 2.0 * f * f - 1.0;
    let case =
        if k < 0.0 && f > 0.0 && ((q >= -k * k / (4.0 * f) && q < 0.0) || (q > 0.0 && q < 2.0 * f))
        {
            IntervalCase::BelowHalf
        } else if k > 0.0 && q > 0.0 && q < 2.0 * f {
            IntervalCase::AboveHalf
        } else {
            IntervalCase::Outside
        };
    IntervalPrediction {
        case,
        slope_term: q,
        index_term: k,
        discriminant: k * k + 4.0 * f * q,
    }
}

/// Angular velocities of the circular helices of radius `rho`.
///
/// With `u = v²` the helix condition is `f(2f+ρf′)u² + (1−2f²)u − 1 = 0`.
/// It is solved as a quadratic in `w = u − 1`, whose constant term is exactly
/// `ρff′`, so `f′ = 0` gives `w = 0` without cancellation. Every root with
/// `w > 0` yields a `±ω` pair, kept when its residual is below [`FAMILY_TOL`].
pub fn helix_omegas(profile: &RefractiveProfile, rho: f64) -> Result<Vec<HelixFamily>> {
    require(profile, Symmetry::Cylindrical, "helix solutions")?;
    let (f, fp) = radial_data(profile, rho)?;
    let intervals = interval_prediction(f, fp, rho);
    let a = f * (2.0 * f + rho * fp);
    let b = 1.0 - 2.0 * f * f;
    let c = rho * f * fp;

    let mut candidates: Vec<(RootBranch, f64)> = Vec::new();
    if a == 0.0 {
        if b != 0.0 {
            candidates.push((RootBranch::Linear, -c / b));
        }
    } else {
        let disc = b * b + 4.0 * a;
        if disc >= 0.0 {
            let sd = disc.sqrt();
            let bb = 2.0 * a + b;
            let sgn = if bb >= 0.0 { 1.0 } else { -1.0 };
            let q = -0.5 * (bb + sgn * sd);
            let (near, far) = if sgn > 0.0 {
                (RootBranch::Plus, RootBranch::Minus)
            } else {
                (RootBranch::Minus, RootBranch::Plus)
            };
            if q != 0.0 {
                candidates.push((far, q / a));
                candidates.push((near, c / q));
            }
        }
    }

    let mut out = Vec::new();
    for (root, w) in candidates {
        if !(w.is_finite() && w > 0.0) {
            continue;
        }
        let omega = polish_omega(f, fp, rho, w.sqrt() / rho);
        let residual = helix_equation_with(f, fp, rho, omega).abs();
        if residual >= FAMILY_TOL {
            continue;
        }
        for omega_sign in [1i8, -1] {
            out.push(HelixFamily {
                rho0: rho,
                omega0: f64::from(omega_sign) * omega,
                phi0: 0.0,
                branch: HelixBranch { omega_sign, root },
                residual,
                intervals: intervals.clone(),
            });
        }
    }
    Ok(out)
}

fn polish_omega(f: f64, fp: f64, rho: f64, omega: f64) -> f64 {
    let r0 = helix_equation_with(f, fp, rho, omega);
    let v2 = rho * rho * omega * omega + 1.0;
    let slope = 2.0 * rho * omega + f * fp * push_factor(f, v2).1 * 2.0 * rho * rho * omega;
    if slope == 0.0 || !slope.is_finite() {
        return omega;
    }
    let next = omega - r0 / slope;
    if next > 0.0 && helix_equation_with(f, fp, rho, next).abs() <= r0.abs() {
        next
    } else {
        omega
    }
}

/// `1 + 2f²s² + ff′s³`, whose positive roots are circle radii.
pub fn circle_equation(profile: &RefractiveProfile, s: f64) -> Result<f64> {
    let (f, fp) = radial_data(profile, s)?;
    Ok(1.0 + 2.0 * f * f * s * s + f * fp * s * s * s)
}

/// `1 + ff′r³/(1 + 2f²r²)`, the same condition written for the equatorial plane.
pub fn equatorial_equation(profile: &RefractiveProfile, r: f64) -> Result<f64> {
    let (f, fp) = radial_data(profile, r)?;
    Ok(1.0 + f * fp * r * r * r / (1.0 + 2.0 * f * f * r * r))
}

fn circle_roots(profile: &RefractiveProfile, bracket: (f64, f64)) -> Result<Vec<f64>> {
    check_bracket(bracket)?;
    find_roots(|s| circle_equation(profile, s), bracket.0, bracket.1)
}

fn check_bracket((lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )))
    }
}

/// Radii of the circular orbits on `bracket`: horizontal circles about the
/// axis for cylindrical profiles, equatorial circles for spherical ones.
pub fn circle_radii(profile: &RefractiveProfile, bracket: (f64, f64)) -> Result<Vec<CircleFamily>> {
    let sym = require_radial(profile, "circle solutions")?;
    let mut out = Vec::new();
    for r in circle_roots(profile, bracket)? {
        let family = match sym {
            Symmetry::Cylindrical => CircleFamily {
                kind: CircleKind::HorizontalOnAxis,
                radius: r,
                plane_param: 0.0,
                residual: circle_equation(profile, r)?.abs(),
            },
            Symmetry::Spherical => CircleFamily {
                kind: CircleKind::OriginCenteredEquatorial,
                radius: r,
                plane_param: std::f64::consts::FRAC_PI_2,
                residual: equatorial_equation(profile, r)?.abs(),
            },
        };
        if family.residual < FAMILY_TOL {
            out.push(family);
        }
    }
    Ok(out)
}

/// Radii where `f′ = 0`, each giving vertical lines on that cylinder.
pub fn generator_radii(
    profile: &RefractiveProfile,
    bracket: (f64, f64),
) -> Result<Vec<LineFamily>> {
    require(profile, Symmetry::Cylindrical, "generator lines")?;
    check_bracket(bracket)?;
    let roots = find_roots(|s| Ok(radial_data(profile, s)?.1), bracket.0, bracket.1)?;
    let mut out = Vec::new();
    for rho0 in roots {
        let residual = radial_data(profile, rho0)?.1.abs();
        if residual < FAMILY_TOL {
            out.push(LineFamily::CylinderGenerator {
                rho0,
                phi0: 0.0,
                residual,
            });
        }
    }
    Ok(out)
}

/// A constant-latitude circle `r = r₀`, `θ = θ₀` traversed with unit angular
/// speed, where `f′(r₀) = 0`. Such circles are tested, not assumed: off the
/// equator nothing balances the centripetal acceleration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatitudeCandidate {
    pub radius: f64,
    pub theta0: f64,
    /// `|f′(r₀)|`
    pub slope_residual: f64,
    /// Max-norm of the equation-of-motion residual along the circle.
    pub el_residual: f64,
}

impl LatitudeCandidate {
    pub fn is_geodesic(&self) -> bool {
        self.el_residual < TRAJECTORY_TOL
    }
}

/// Latitude circles at `theta0` over the roots of `f′` on `bracket`.
pub fn latitude_candidates(
    profile: &RefractiveProfile,
    bracket: (f64, f64),
    theta0: f64,
) -> Result<Vec<LatitudeCandidate>> {
    require(profile, Symmetry::Spherical, "latitude circles")?;
    check_bracket(bracket)?;
    let roots = find_roots(|s| Ok(radial_data(profile, s)?.1), bracket.0, bracket.1)?;
    let (st, ct) = theta0.sin_cos();
    let mut out = Vec::new();
    for r0 in roots {
        let curve = |t: f64| {
            let (s, c) = t.sin_cos();
            let a = r0 * st;
            (
                [a * c, a * s, r0 * ct],
                [-a * s, a * c, 0.0],
                [-a * c, -a * s, 0.0],
            )
        };
        let mut worst: f64 = 0.0;
        for i in 0..64 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            worst = worst.max(el_residual(profile, curve, t)?.max_abs());
        }
        out.push(LatitudeCandidate {
            radius: r0,
            theta0,
            slope_residual: radial_data(profile, r0)?.1.abs(),
            el_residual: worst,
        });
    }
    Ok(out)
}

/// Circle families of a spherical profile: equatorial circles and circles in
/// vertical planes through the origin (`φ₀ = 0`; see
/// [`CircleFamily::with_plane_param`]). Latitude circles are checked at
/// `θ₀ = π/4` and returned only if they satisfy the equations of motion.
pub fn sphere_circle_families(
    profile: &RefractiveProfile,
    bracket: (f64, f64),
) -> Result<Vec<CircleFamily>> {
    require(profile, Symmetry::Spherical, "sphere circle families")?;
    let mut out = Vec::new();
    for r in circle_roots(profile, bracket)? {
        let equatorial = equatorial_equation(profile, r)?.abs();
        if equatorial < FAMILY_TOL {
            out.push(CircleFamily {
                kind: CircleKind::OriginCenteredEquatorial,
                radius: r,
                plane_param: std::f64::consts::FRAC_PI_2,
                residual: equatorial,
            });
        }
        let vertical = circle_equation(profile, r)?.abs();
        if vertical < FAMILY_TOL {
            out.push(CircleFamily {
                kind: CircleKind::VerticalPlaneThroughOrigin,
                radius: r,
                plane_param: 0.0,
                residual: vertical,
            });
        }
    }
    for cand in latitude_candidates(profile, bracket, std::f64::consts::FRAC_PI_4)? {
        if cand.is_geodesic() && cand.slope_residual < FAMILY_TOL {
            out.push(CircleFamily {
                kind: CircleKind::HorizontalOnAxis,
                radius: cand.radius * cand.theta0.sin(),
                plane_param: cand.radius * cand.theta0.cos(),
                residual: cand.slope_residual,
            });
        }
    }
    Ok(out)
}

/// Bounds of the window `2f + sf′ ∈ (lower, 0)` where a non-constant radius
/// `ds/dt = F(s)` could balance the tangential equation.
pub fn incompatibility_window(f: f64, fp: f64, s: f64) -> (f64, f64, f64) {
    let s2f2 = s * s * f * f;
    let lower = -(1.0 + 4.0 * s2f2) / (2.0 * s * s * f * (1.0 + 3.0 * s2f2));
    (2.0 * f + s * fp, lower, 0.0)
}

/// `F(s) = √((−4f² − sff′ − √Δ′)/(6f³(2f + sf′)) − s²)` with
/// `Δ′ = 4f⁴ + s²f²f′² + 2sf³f′`, when real.
pub fn incompatibility_probe(profile: &RefractiveProfile, s: f64) -> Result<Option<f64>> {
    require_radial(profile, "the radial-drift probe")?;
    let (f, fp) = radial_data(profile, s)?;
    let (q, lower, upper) = incompatibility_window(f, fp, s);
    if !(f > 0.0 && q > lower && q < upper) {
        return Ok(None);
    }
    let dp = 4.0 * f.powi(4) + s * s * f * f * fp * fp + 2.0 * s * f.powi(3) * fp;
    if dp < 0.0 {
        return Ok(None);
    }
    let radicand = (-4.0 * f * f - s * f * fp - dp.sqrt()) / (6.0 * f.powi(3) * q) - s * s;
    Ok((radicand >= 0.0).then(|| radicand.sqrt()))
}

/// Equation-of-motion residual at `t = 0` of the planar curve with angular
/// speed 1 and radial speed `ds/dt = F(s)`, passing through radius `s`.
/// `None` outside the probe's existence window.
pub fn incompatibility_residual(profile: &RefractiveProfile, s: f64) -> Result<Option<Vec3>> {
    let Some(drift) = incompatibility_probe(profile, s)? else {
        return Ok(None);
    };
    let slope = fd::derivative(
        |h| {
            incompatibility_probe(profile, s + h)?
                .ok_or_else(|| Error::Numerical(format!("probe undefined near s = {s}")))
        },
        &FdStep::default(),
        s,
    );
    let Ok(slope) = slope else {
        return Ok(None);
    };
    // s'' = F F′, φ' = 1, φ'' = 0.
    let x = [s, 0.0, 0.0];
    let v = [drift, s, 0.0];
    let a = [drift * slope - s, 2.0 * drift, 0.0];
    Ok(Some(el_residual(profile, |_| (x, v, a), 0.0)?))
}

/// Exact samples of a closed-form family on `t_span`; axis segments are
/// integrated numerically from their initial condition.
pub fn make_trajectory(
    profile: &RefractiveProfile,
    family: &Family,
    t_span: (f64, f64),
    sample_every: f64,
) -> Result<Trajectory> {
    if !(t_span.0.is_finite() && t_span.1 > t_span.0 && sample_every > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "invalid sampling: span {t_span:?}, every {sample_every}"
        )));
    }
    if let Family::Line(LineFamily::ZAxisSegment { .. }) = family {
        let (x0, v0) = family.initial_state();
        let cfg = IntegratorConfig {
            t_span,
            sample_every,
            ..Default::default()
        };
        return integrate(profile, x0, v0, &cfg).map_err(|f| f.error);
    }
    let mut samples = Vec::new();
    for t in sample_grid(t_span, sample_every) {
        let (x, v, _) = family.state(t).expect("closed-form family");
        samples.push(Sample {
            t,
            x,
            v,
            energy: energy(profile, &PhasePoint::new(x, v))?,
        });
    }
    Ok(Trajectory {
        samples,
        meta: TrajectoryMeta {
            profile: profile.spec(),
            config: None,
            accepted_steps: 0,
            rejected_steps: 0,
            truncated: None,
        },
    })
}
