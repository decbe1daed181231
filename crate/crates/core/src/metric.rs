//! The Lagrangian `L = ½|y|² + (γ²/2)|y|⁴`, its fundamental tensor
//! `g_ij = σδ_ij + 2γ²y_iy_j`, the inverse, and the conserved energy.

use serde::{Deserialize, Serialize};

use crate::connection::{nonlinear_connection, semispray};
use crate::error::{Error, Result};
use crate::fd::{self, FdStep};
use crate::media::RefractiveProfile;
use crate::tensor::{dot, identity, kron, mat_mul, norm_sq, Components, Mat3, Vec3, DIM};

/// A point `(x, y)` of the phase space: position and direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec3,
    pub y: Vec3,
}

impl PhasePoint {
    pub fn new(x: Vec3, y: Vec3) -> Self {
        PhasePoint { x, y }
    }

    pub fn from_slice(v: &[f64; 6]) -> Self {
        PhasePoint {
            x: [v[0], v[1], v[2]],
            y: [v[3], v[4], v[5]],
        }
    }

    pub fn with_x(&self, x: Vec3) -> Self {
        PhasePoint { x, y: self.y }
    }

    pub fn with_y(&self, y: Vec3) -> Self {
        PhasePoint { x: self.x, y }
    }
}

/// A symmetric rank-2 tensor with both indices at the same level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymTensor2(pub Mat3);

impl SymTensor2 {
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn contract(&self, u: &Vec3, v: &Vec3) -> f64 {
        (0..DIM)
            .map(|i| (0..DIM).map(|j| self.0[i][j] * u[i] * v[j]).sum::<f64>())
            .sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..DIM {
            for j in 0..i {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }
}

/// Pointwise scalars shared by the closed-form geometric objects.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalScalars {
    pub gamma: f64,
    pub grad: Vec3,
    pub y: Vec3,
    /// `|y|²`
    pub ysq: f64,
    /// `γ_s y^s`
    pub grad_y: f64,
    pub sigma: f64,
    pub tau: f64,
}

impl LocalScalars {
    pub fn at(profile: &RefractiveProfile, p: &PhasePoint) -> Result<Self> {
        if !p.y.all_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite direction {:?}",
                p.y
            )));
        }
        let (gamma, grad) = profile.gamma_and_gradient(&p.x)?;
        Ok(Self::from_parts(gamma, grad, p.y))
    }

    /// Variant that skips the gradient, for quantities that only need `γ`.
    pub fn without_gradient(profile: &RefractiveProfile, p: &PhasePoint) -> Result<Self> {
        let gamma = profile.gamma(&p.x)?;
        Ok(Self::from_parts(gamma, [0.0; 3], p.y))
    }

    fn from_parts(gamma: f64, grad: Vec3, y: Vec3) -> Self {
        let ysq = norm_sq(&y);
        let g2y = gamma * gamma * ysq;
        LocalScalars {
            gamma,
            grad,
            y,
            ysq,
            grad_y: dot(&grad, &y),
            sigma: 0.5 + g2y,
            tau: 0.5 + 3.0 * g2y,
        }
    }
}

/// `σ = ½ + γ²|y|²` and `τ = ½ + 3γ²|y|²`.
pub fn sigma_tau(profile: &RefractiveProfile, p: &PhasePoint) -> Result<(f64, f64)> {
    let l = LocalScalars::without_gradient(profile, p)?;
    Ok((l.sigma, l.tau))
}

pub fn lagrangian(profile: &RefractiveProfile, p: &PhasePoint) -> Result<f64> {
    let l = LocalScalars::without_gradient(profile, p)?;
    Ok(0.5 * l.ysq + 0.5 * l.gamma * l.gamma * l.ysq * l.ysq)
}

pub fn fundamental_tensor(profile: &RefractiveProfile, p: &PhasePoint) -> Result<SymTensor2> {
    let l = LocalScalars::without_gradient(profile, p)?;
    Ok(fundamental_from(&l))
}

pub(crate) fn fundamental_from(l: &LocalScalars) -> SymTensor2 {
    let two_g2 = 2.0 * l.gamma * l.gamma;
    let mut g = Mat3::zero();
    for i in 0..DIM {
        for j in 0..=i {
            g[i][j] = l.sigma * kron(i, j) + two_g2 * l.y[i] * l.y[j];
            g[j][i] = g[i][j];
        }
    }
    SymTensor2(g)
}

/// `g^{jk} = δ^{jk}/σ − 2γ²/(στ)·y^j y^k`.
pub fn inverse_fundamental_tensor(
    profile: &RefractiveProfile,
    p: &PhasePoint,
) -> Result<SymTensor2> {
    let l = LocalScalars::without_gradient(profile, p)?;
    Ok(inverse_from(&l))
}

pub(crate) fn inverse_from(l: &LocalScalars) -> SymTensor2 {
    let c = 2.0 * l.gamma * l.gamma / (l.sigma * l.tau);
    let mut g = Mat3::zero();
    for j in 0..DIM {
        for k in 0..=j {
            g[j][k] = kron(j, k) / l.sigma - c * l.y[j] * l.y[k];
            g[k][j] = g[j][k];
        }
    }
    SymTensor2(g)
}

/// Eigenvalues of `g` in ascending order: `{σ, σ, τ}` (`τ` along `y`).
pub fn metric_spectrum(profile: &RefractiveProfile, p: &PhasePoint) -> Result<[f64; 3]> {
    let (sigma, tau) = sigma_tau(profile, p)?;
    Ok([sigma, sigma, tau])
}

/// Conserved energy of the autonomous Lagrangian,
/// `E = y^i ∂L/∂y^i − L = ½|y|² + (3/2)γ²|y|⁴`.
///
/// Equivalently `E = ½g_ij y^i y^j + ¼|y|²`.
pub fn energy(profile: &RefractiveProfile, p: &PhasePoint) -> Result<f64> {
    let l = LocalScalars::without_gradient(profile, p)?;
    let lagr = 0.5 * l.ysq + 0.5 * l.gamma * l.gamma * l.ysq * l.ysq;
    let y_dl_dy = (1.0 + 2.0 * l.gamma * l.gamma * l.ysq) * l.ysq;
    Ok(y_dl_dy - lagr)
}

/// `½ ∂²L/∂y^i∂y^j` by central second differences with one Richardson level.
pub fn hessian_oracle(profile: &RefractiveProfile, p: &PhasePoint) -> Result<SymTensor2> {
    let scale = p.y.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
    let h = f64::EPSILON.powf(1.0 / 6.0) * scale;
    let coarse = second_differences(profile, p, h)?;
    let fine = second_differences(profile, p, 0.5 * h)?;
    let hess = Mat3::lin(4.0 / 3.0, &fine, -1.0 / 3.0, &coarse);
    Ok(SymTensor2(hess.scale(0.5)))
}

fn second_differences(profile: &RefractiveProfile, p: &PhasePoint, h: f64) -> Result<Mat3> {
    let lag = |dy: [f64; 3]| lagrangian(profile, &p.with_y(p.y.add(&dy)));
    let unit = |i: usize, s: f64| {
        let mut e = [0.0; 3];
        e[i] = s;
        e
    };
    let center = lag([0.0; 3])?;
    let mut hess = Mat3::zero();
    for i in 0..DIM {
        hess[i][i] = (lag(unit(i, h))? - 2.0 * center + lag(unit(i, -h))?) / (h * h);
        for j in 0..i {
            let pp = lag(unit(i, h).add(&unit(j, h)))?;
            let pm = lag(unit(i, h).add(&unit(j, -h)))?;
            let mp = lag(unit(i, -h).add(&unit(j, h)))?;
            let mm = lag(unit(i, -h).add(&unit(j, -h)))?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Ok(hess)
}

/// `∂g_ij/∂y^k`, stored `[k][i][j]`, by central differences.
pub fn metric_y_derivative(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<[Mat3; 3]> {
    fd::partials(
        |y| Ok(fundamental_tensor(profile, &p.with_y(*y))?.0),
        &p.y,
        step,
    )
}

/// Cached geometry at one phase point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryBundle {
    pub point: PhasePoint,
    pub sigma: f64,
    pub tau: f64,
    pub g: SymTensor2,
    pub g_inv: SymTensor2,
    /// Semispray `G^i`.
    pub semispray: Vec3,
    /// Nonlinear connection `N^i_j`, row `i`.
    pub n: Mat3,
}

impl GeometryBundle {
    pub fn at(profile: &RefractiveProfile, p: &PhasePoint) -> Result<Self> {
        let l = LocalScalars::at(profile, p)?;
        Ok(GeometryBundle {
            point: *p,
            sigma: l.sigma,
            tau: l.tau,
            g: fundamental_from(&l),
            g_inv: inverse_from(&l),
            semispray: semispray(profile, p)?,
            n: nonlinear_connection(profile, p)?.n,
        })
    }

    /// `‖g·g⁻¹ − I‖∞`
    pub fn inverse_defect(&self) -> f64 {
        mat_mul(&self.g.0, &self.g_inv.0).max_abs_diff(&identity())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::Symmetry;

    fn gamma_one() -> RefractiveProfile {
        RefractiveProfile::uniform_gamma(1.0).unwrap()
    }

    fn e1() -> PhasePoint {
        PhasePoint::new([0.3, -0.2, 1.0], [1.0, 0.0, 0.0])
    }

    #[test]
    fn sigma_tau_cases() {
        let vacuum = RefractiveProfile::uniform(1.0).unwrap();
        let p = PhasePoint::new([1.0; 3], [2.0, 1.0, -3.0]);
        assert_eq!(sigma_tau(&vacuum, &p).unwrap(), (0.5, 0.5));
        let mirage = RefractiveProfile::gaussian_mirage(1.0, 2.5, Symmetry::Spherical).unwrap();
        assert_eq!(sigma_tau(&mirage, &p.with_y([0.0; 3])).unwrap(), (0.5, 0.5));
        let (s, t) = sigma_tau(&gamma_one(), &e1()).unwrap();
        assert!((s - 1.5).abs() < 1e-15 && (t - 3.5).abs() < 1e-15);
        assert!((t - s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lagrangian_cases() {
        let vacuum = RefractiveProfile::uniform(1.0).unwrap();
        let p = PhasePoint::new([0.0; 3], [3.0, 4.0, 0.0]);
        assert_eq!(lagrangian(&vacuum, &p).unwrap(), 12.5);
        assert_eq!(lagrangian(&gamma_one(), &p.with_y([0.0; 3])).unwrap(), 0.0);
        assert!((lagrangian(&gamma_one(), &e1()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn metric_examples() {
        let g = fundamental_tensor(&gamma_one(), &e1()).unwrap();
        let expect = [[3.5, 0.0, 0.0], [0.0, 1.5, 0.0], [0.0, 0.0, 1.5]];
        assert!(g.0.max_abs_diff(&expect) < 1e-15);
        let gi = inverse_fundamental_tensor(&gamma_one(), &e1()).unwrap();
        let expect = [
            [2.0 / 7.0, 0.0, 0.0],
            [0.0, 2.0 / 3.0, 0.0],
            [0.0, 0.0, 2.0 / 3.0],
        ];
        assert!(gi.0.max_abs_diff(&expect) < 1e-15);

        let vacuum = RefractiveProfile::uniform(1.0).unwrap();
        let p = PhasePoint::new([0.0; 3], [1.0, 2.0, 3.0]);
        assert_eq!(
            fundamental_tensor(&vacuum, &p).unwrap().0,
            identity().scale(0.5)
        );
        assert_eq!(
            inverse_fundamental_tensor(&vacuum, &p).unwrap().0,
            identity().scale(2.0)
        );
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&gamma_one(), &e1().with_y([0.0; 3])).unwrap(), 0.0);
        let vacuum = RefractiveProfile::uniform(1.0).unwrap();
        let p = PhasePoint::new([0.0; 3], [1.0, 2.0, 2.0]);
        assert!((energy(&vacuum, &p).unwrap() - 4.5).abs() < 1e-15);
        assert!((energy(&gamma_one(), &e1()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn energy_matches_contraction_form() {
        let mirage = RefractiveProfile::gaussian_mirage(0.8, 1.7, Symmetry::Cylindrical).unwrap();
        let p = PhasePoint::new([0.9, -1.1, 0.3], [0.7, -0.4, 1.3]);
        let g = fundamental_tensor(&mirage, &p).unwrap();
        let contraction = 0.5 * g.contract(&p.y, &p.y) + 0.25 * norm_sq(&p.y);
        assert!((energy(&mirage, &p).unwrap() - contraction).abs() < 1e-14);
    }

    #[test]
    fn hessian_oracle_examples() {
        let h = hessian_oracle(&gamma_one(), &e1()).unwrap();
        let expect = [[3.5, 0.0, 0.0], [0.0, 1.5, 0.0], [0.0, 0.0, 1.5]];
        assert!(h.0.max_abs_diff(&expect) < 1e-6);
        let vacuum = RefractiveProfile::uniform(1.0).unwrap();
        let h = hessian_oracle(&vacuum, &PhasePoint::new([0.0; 3], [0.2, 0.1, -0.3])).unwrap();
        assert!(h.0.max_abs_diff(&identity().scale(0.5)) < 1e-8);
        let mirage = RefractiveProfile::gaussian_mirage(1.0, 2.5, Symmetry::Spherical).unwrap();
        let h = hessian_oracle(&mirage, &PhasePoint::new([1.0, 0.0, 0.0], [0.0; 3])).unwrap();
        assert!(h.0.max_abs_diff(&identity().scale(0.5)) < 1e-8);
    }

    #[test]
    fn spectrum_of_g_is_sigma_sigma_tau() {
        let p = e1();
        let g = fundamental_tensor(&gamma_one(), &p).unwrap();
        let [s, _, t] = metric_spectrum(&gamma_one(), &p).unwrap();
        // y is the τ-eigenvector; anything orthogonal to it has eigenvalue σ.
        let gy = crate::tensor::mat_vec(&g.0, &p.y);
        assert!(gy.max_abs_diff(&p.y.scale(t)) < 1e-15);
        let perp = [0.0, 1.0, -1.0];
        let gp = crate::tensor::mat_vec(&g.0, &perp);
        assert!(gp.max_abs_diff(&perp.scale(s)) < 1e-15);
    }

    #[test]
    fn bundle_inverse_defect_small() {
        let mirage = RefractiveProfile::gaussian_mirage(0.5, 2.0, Symmetry::Spherical).unwrap();
        let b = GeometryBundle::at(
            &mirage,
            &PhasePoint::new([1.0, 0.5, -0.2], [3.0, -2.0, 0.5]),
        )
        .unwrap();
        assert!(b.inverse_defect() < 1e-12);
        assert!((b.tau - b.sigma - 2.0 * (b.sigma - 0.5)).abs() < 1e-12);
    }
}
