//! d-torsions, d-curvatures and metricity residuals of the Cartan connection.
//!
//! Derivatives of `N`, `L` and `C` are central differences of their closed
//! forms; every entry point has a `_with` variant taking the step so callers
//! can check step-halving stability.

use serde::Serialize;

use crate::connection::{
    adapted, cartan_closed_form, nonlinear_connection, x_partials, y_partials, CartanCoefficients,
};
use crate::error::Result;
use crate::fd::FdStep;
use crate::media::RefractiveProfile;
use crate::metric::{fundamental_tensor, metric_y_derivative, PhasePoint};
use crate::tensor::{Components, Mat3, Tensor3, Tensor4, DIM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorsionSet {
    /// `R^i_jk = δN^i_j/δx^k − δN^i_k/δx^j`
    pub r: Tensor3,
    /// `P^i_jk = ∂N^i_j/∂y^k − L^i_kj`
    pub p: Tensor3,
    /// `C^i_jk`
    pub c: Tensor3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSet {
    pub r: Tensor4,
    pub p: Tensor4,
    pub s: Tensor4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricityResiduals {
    /// `g_ij|k`, stored `[i][j][k]`.
    pub horizontal: Tensor3,
    /// `g_ij|k` in the vertical direction, stored `[i][j][k]`.
    pub vertical: Tensor3,
}

impl MetricityResiduals {
    pub fn max_abs(&self) -> f64 {
        self.horizontal.max_abs().max(self.vertical.max_abs())
    }
}

/// Largest `|T^i_jk + T^i_kj|`.
pub fn antisymmetry_defect3(t: &Tensor3) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                worst = worst.max((t[i][j][k] + t[i][k][j]).abs());
            }
        }
    }
    worst
}

/// Largest `|T^i_jkl + T^i_jlk|`.
pub fn antisymmetry_defect4(t: &Tensor4) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    worst = worst.max((t[i][j][k][l] + t[i][j][l][k]).abs());
                }
            }
        }
    }
    worst
}

/// Derivatives of the Cartan coefficients at one point.
struct CartanJet {
    at: CartanCoefficients,
    /// `δ(L, C)/δx^k`, index `k` outermost.
    horizontal: [CartanCoefficients; 3],
    /// `∂(L, C)/∂y^k`, index `k` outermost.
    vertical: [CartanCoefficients; 3],
}

impl CartanJet {
    fn at(profile: &RefractiveProfile, p: &PhasePoint, step: &FdStep) -> Result<Self> {
        let field = |q: &PhasePoint| cartan_closed_form(profile, q);
        let n = nonlinear_connection(profile, p)?.n;
        let dx = x_partials(field, p, step)?;
        let vertical = y_partials(field, p, step)?;
        Ok(CartanJet {
            at: cartan_closed_form(profile, p)?,
            horizontal: adapted(&n, &dx, &vertical),
            vertical,
        })
    }
}

pub fn torsions(profile: &RefractiveProfile, p: &PhasePoint) -> Result<TorsionSet> {
    torsions_with(profile, p, &FdStep::default())
}

pub fn torsions_with(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<TorsionSet> {
    let cartan = cartan_closed_form(profile, p)?;
    torsions_from(profile, p, step, &cartan)
}

fn torsions_from(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
    cartan: &CartanCoefficients,
) -> Result<TorsionSet> {
    let field = |q: &PhasePoint| Ok(nonlinear_connection(profile, q)?.n);
    let n = nonlinear_connection(profile, p)?.n;
    let dx: [Mat3; 3] = x_partials(field, p, step)?;
    let dy: [Mat3; 3] = y_partials(field, p, step)?;
    let dn = adapted(&n, &dx, &dy);
    let mut r = Tensor3::zero();
    let mut pt = Tensor3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                r[i][j][k] = dn[k][i][j] - dn[j][i][k];
                pt[i][j][k] = dy[k][i][j] - cartan.l[i][k][j];
            }
        }
    }
    Ok(TorsionSet {
        r,
        p: pt,
        c: cartan.c,
    })
}

/// `C^i_{jl|k}`, stored `[i][j][l][k]`.
pub fn h_covariant_c(profile: &RefractiveProfile, p: &PhasePoint) -> Result<Tensor4> {
    h_covariant_c_with(profile, p, &FdStep::default())
}

pub fn h_covariant_c_with(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<Tensor4> {
    let jet = CartanJet::at(profile, p, step)?;
    Ok(h_covariant_from(&jet))
}

fn h_covariant_from(jet: &CartanJet) -> Tensor4 {
    let (l, c) = (&jet.at.l, &jet.at.c);
    let mut out = Tensor4::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for m in 0..DIM {
                for k in 0..DIM {
                    let mut v = jet.horizontal[k].c[i][j][m];
                    for r in 0..DIM {
                        v += c[r][j][m] * l[i][r][k]
                            - c[i][r][m] * l[r][j][k]
                            - c[i][j][r] * l[r][m][k];
                    }
                    out[i][j][m][k] = v;
                }
            }
        }
    }
    out
}

pub fn curvatures(profile: &RefractiveProfile, p: &PhasePoint) -> Result<CurvatureSet> {
    curvatures_with(profile, p, &FdStep::default())
}

pub fn curvatures_with(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<CurvatureSet> {
    let jet = CartanJet::at(profile, p, step)?;
    let tors = torsions_from(profile, p, step, &jet.at)?;
    let c_bar = h_covariant_from(&jet);
    let (l, c) = (&jet.at.l, &jet.at.c);
    let (dl, vl, vc) = (&jet.horizontal, &jet.vertical, &jet.vertical);

    let mut r4 = Tensor4::zero();
    let mut p4 = Tensor4::zero();
    let mut s4 = Tensor4::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for m in 0..DIM {
                    let mut r = dl[m].l[i][j][k] - dl[k].l[i][j][m];
                    let mut pp = vl[m].l[i][j][k] - c_bar[i][j][m][k];
                    let mut s = vc[m].c[i][j][k] - vc[k].c[i][j][m];
                    for q in 0..DIM {
                        r += l[q][j][k] * l[i][q][m] - l[q][j][m] * l[i][q][k]
                            + c[i][j][q] * tors.r[q][k][m];
                        pp += c[i][j][q] * tors.p[q][k][m];
                        s += c[q][j][k] * c[i][q][m] - c[q][j][m] * c[i][q][k];
                    }
                    r4[i][j][k][m] = r;
                    p4[i][j][k][m] = pp;
                    s4[i][j][k][m] = s;
                }
            }
        }
    }
    Ok(CurvatureSet {
        r: r4,
        p: p4,
        s: s4,
    })
}

pub fn metricity_residuals(
    profile: &RefractiveProfile,
    p: &PhasePoint,
) -> Result<MetricityResiduals> {
    metricity_residuals_with(profile, p, &FdStep::default())
}

pub fn metricity_residuals_with(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<MetricityResiduals> {
    let metric = |q: &PhasePoint| Ok(fundamental_tensor(profile, q)?.0);
    let n = nonlinear_connection(profile, p)?.n;
    let dx: [Mat3; 3] = x_partials(metric, p, step)?;
    let dy = metric_y_derivative(profile, p, step)?;
    let dh = adapted(&n, &dx, &dy);
    let g = fundamental_tensor(profile, p)?.0;
    let cartan = cartan_closed_form(profile, p)?;
    let (l, c) = (&cartan.l, &cartan.c);

    let mut horizontal = Tensor3::zero();
    let mut vertical = Tensor3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut h = dh[k][i][j];
                let mut v = dy[k][i][j];
                for r in 0..DIM {
                    h -= l[r][i][k] * g[r][j] + l[r][j][k] * g[i][r];
                    v -= c[r][i][k] * g[r][j] + c[r][j][k] * g[i][r];
                }
                horizontal[i][j][k] = h;
                vertical[i][j][k] = v;
            }
        }
    }
    Ok(MetricityResiduals {
        horizontal,
        vertical,
    })
}
