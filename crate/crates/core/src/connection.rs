//! Semispray, canonical nonlinear connection, adapted derivatives and the
//! Cartan canonical connection.
//!
//! Index layout: `N^i_j` is `n[i][j]` (upper index = row); `L^i_jk` and
//! `C^i_jk` are `[i][j][k]`. Lowered forms follow `N_ij := N^r_i δ_rj`, which
//! makes `N_ij = N^j_i`. The combination `δ^{ir}N_rj` is the same number as
//! `N_ij` with its first index raised and therefore differs from `N^i_j`
//! whenever `N` is not symmetric.

use serde::Serialize;

use crate::error::Result;
use crate::fd::{self, FdStep};
use crate::media::RefractiveProfile;
use crate::metric::{fundamental_tensor, inverse_from, LocalScalars, PhasePoint};
use crate::tensor::{kron, transpose, Components, Mat3, Tensor3, Vec3, DIM};

/// `N^i_j` with its common contractions precomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearConnection {
    /// `N^i_j`, row `i`.
    pub n: Mat3,
    /// `N_ij = N^j_i`.
    pub lowered: Mat3,
    /// `N_i0 = N_ir y^r`.
    pub n_i0: Vec3,
    /// `N_0j = N_rj y^r`.
    pub n_0j: Vec3,
    /// `N_00 = N_ij y^i y^j`.
    pub n_00: f64,
}

impl NonlinearConnection {
    pub fn new(n: Mat3, y: &Vec3) -> Self {
        let lowered = transpose(&n);
        let mut n_i0 = Vec3::zero();
        let mut n_0j = Vec3::zero();
        let mut n_00 = 0.0;
        for i in 0..DIM {
            for r in 0..DIM {
                n_i0[i] += lowered[i][r] * y[r];
                n_0j[i] += lowered[r][i] * y[r];
                n_00 += lowered[i][r] * y[i] * y[r];
            }
        }
        NonlinearConnection {
            n,
            lowered,
            n_i0,
            n_0j,
            n_00,
        }
    }
}

/// Horizontal and vertical coefficients `(L^i_jk, C^i_jk)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CartanCoefficients {
    pub l: Tensor3,
    pub c: Tensor3,
}

impl CartanCoefficients {
    /// Largest `|T^i_jk − T^i_kj|` over both coefficient sets.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    worst = worst
                        .max((self.l[i][j][k] - self.l[i][k][j]).abs())
                        .max((self.c[i][j][k] - self.c[i][k][j]).abs());
                }
            }
        }
        worst
    }
}

impl Components for CartanCoefficients {
    fn zero() -> Self {
        CartanCoefficients {
            l: Tensor3::zero(),
            c: Tensor3::zero(),
        }
    }

    fn lin(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        CartanCoefficients {
            l: Tensor3::lin(a, &x.l, b, &y.l),
            c: Tensor3::lin(a, &x.c, b, &y.c),
        }
    }

    fn max_abs(&self) -> f64 {
        self.l.max_abs().max(self.c.max_abs())
    }

    fn all_finite(&self) -> bool {
        self.l.all_finite() && self.c.all_finite()
    }
}

/// Semispray `G^i` whose integral curves solve `ẍ + 2G = 0`.
pub fn semispray(profile: &RefractiveProfile, p: &PhasePoint) -> Result<Vec3> {
    let l = LocalScalars::at(profile, p)?;
    Ok(semispray_from(&l))
}

fn semispray_from(l: &LocalScalars) -> Vec3 {
    let (g, s, a) = (l.gamma, l.ysq, l.grad_y);
    let along_y = g / l.sigma * s * a - 3.0 * g.powi(3) / (2.0 * l.sigma * l.tau) * s * s * a;
    let along_grad = -g / (4.0 * l.sigma) * s * s;
    Vec3::lin(along_y, &l.y, along_grad, &l.grad)
}

/// Closed-form `N^i_j = ∂G^i/∂y^j`.
pub fn nonlinear_connection(
    profile: &RefractiveProfile,
    p: &PhasePoint,
) -> Result<NonlinearConnection> {
    let l = LocalScalars::at(profile, p)?;
    Ok(NonlinearConnection::new(nonlinear_from(&l), &p.y))
}

fn nonlinear_from(l: &LocalScalars) -> Mat3 {
    let (g, s, a, sig, tau) = (l.gamma, l.ysq, l.grad_y, l.sigma, l.tau);
    let (y, gr) = (&l.y, &l.grad);
    let g2 = g * g;
    let first = 2.0 * g / sig;
    let second = g * s / sig;
    let third = g.powi(3) * s * s / (2.0 * sig);
    let mut n = Mat3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            let yy = y[i] * y[j];
            let d = kron(i, j);
            let group2 = d * a + y[i] * gr[j]
                - gr[i] * y[j]
                - 2.0 * g2 / sig * yy * a
                - 6.0 * g2 / tau * yy * a;
            let group3 = gr[i] * y[j] / sig - 3.0 / tau * y[i] * gr[j] - 3.0 / tau * d * a
                + 6.0 * g2 / (sig * tau * tau) * (tau + 3.0 * sig) * yy * a;
            n[i][j] = first * yy * a + second * group2 + third * group3;
        }
    }
    n
}

/// Finite-difference oracle `∂G^i/∂y^j`.
pub fn nonlinear_connection_fd(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<Mat3> {
    let d: [Vec3; 3] = fd::partials(|y| semispray(profile, &p.with_y(*y)), &p.y, step)?;
    // d[j][i] = ∂G^i/∂y^j
    Ok(transpose(&d))
}

/// `∂T/∂y^r` for `r = 0, 1, 2` (derivative index outermost).
pub fn y_partials<T, F>(field: F, p: &PhasePoint, step: &FdStep) -> Result<[T; 3]>
where
    T: Components,
    F: Fn(&PhasePoint) -> Result<T>,
{
    fd::partials(|y| field(&p.with_y(*y)), &p.y, step)
}

/// `∂T/∂x^k` for `k = 0, 1, 2` (derivative index outermost).
pub fn x_partials<T, F>(field: F, p: &PhasePoint, step: &FdStep) -> Result<[T; 3]>
where
    T: Components,
    F: Fn(&PhasePoint) -> Result<T>,
{
    fd::partials(|x| field(&p.with_x(*x)), &p.x, step)
}

/// All adapted derivatives `δT/δx^k = ∂T/∂x^k − N^r_k ∂T/∂y^r`, index `k` outermost.
pub fn delta_x_all<T, F>(
    field: F,
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<[T; 3]>
where
    T: Components,
    F: Fn(&PhasePoint) -> Result<T>,
{
    let n = nonlinear_connection(profile, p)?.n;
    let dx = x_partials(&field, p, step)?;
    let dy = y_partials(&field, p, step)?;
    Ok(adapted(&n, &dx, &dy))
}

pub(crate) fn adapted<T: Components>(n: &Mat3, dx: &[T; 3], dy: &[T; 3]) -> [T; 3] {
    let mut out = *dx;
    for (k, slot) in out.iter_mut().enumerate() {
        for (r, dyr) in dy.iter().enumerate() {
            *slot = T::lin(1.0, slot, -n[r][k], dyr);
        }
    }
    out
}

/// Single adapted derivative `δT/δx^k`.
pub fn delta_x<T, F>(
    field: F,
    profile: &RefractiveProfile,
    p: &PhasePoint,
    k: usize,
    step: &FdStep,
) -> Result<T>
where
    T: Components,
    F: Fn(&PhasePoint) -> Result<T>,
{
    assert!(k < DIM, "index {k} out of range");
    let n = nonlinear_connection(profile, p)?.n;
    let dxk = fd::derivative(
        |s| {
            let mut x = p.x;
            x[k] += s;
            field(&p.with_x(x))
        },
        step,
        p.x.iter().fold(0.0_f64, |m, c| m.max(c.abs())),
    )?;
    let dy = y_partials(&field, p, step)?;
    let mut out = dxk;
    for (r, dyr) in dy.iter().enumerate() {
        out = T::lin(1.0, &out, -n[r][k], dyr);
    }
    Ok(out)
}

/// Closed-form Cartan coefficients.
pub fn cartan_closed_form(
    profile: &RefractiveProfile,
    p: &PhasePoint,
) -> Result<CartanCoefficients> {
    let l = LocalScalars::at(profile, p)?;
    let nc = NonlinearConnection::new(nonlinear_from(&l), &p.y);
    Ok(CartanCoefficients {
        l: horizontal_from(&l, &nc),
        c: vertical_from(&l),
    })
}

fn horizontal_from(l: &LocalScalars, nc: &NonlinearConnection) -> Tensor3 {
    let (g, s, a, sig, tau) = (l.gamma, l.ysq, l.grad_y, l.sigma, l.tau);
    let (y, gr) = (&l.y, &l.grad);
    let (nu, nl, n0, n0j, n00) = (&nc.n, &nc.lowered, &nc.n_i0, &nc.n_0j, nc.n_00);
    let outer = -g / sig;
    let inner = 2.0 * g.powi(3) / (sig * tau);
    let mut out = Tensor3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let (dij, dik, djk) = (kron(i, j), kron(i, k), kron(j, k));
                let sym_n = nl[j][k] + nl[k][j];
                let first = g * (dij * n0[k] + dik * n0[j] - djk * n0[i])
                    + s * (djk * gr[i] - dij * gr[k] - dik * gr[j])
                    + g * (sym_n * y[i]
                        + (nu[i][k] - nl[i][k]) * y[j]
                        + (nu[i][j] - nl[i][j]) * y[k])
                    + 2.0 * (gr[i] * y[j] * y[k] - y[i] * y[j] * gr[k] - y[i] * y[k] * gr[j]);
                let second = g * (y[j] * n0[k] + y[k] * n0[j] - djk * n00)
                    + s * (djk * a - y[j] * gr[k] - y[k] * gr[j])
                    + 2.0 * (y[j] * y[k] * a - y[j] * gr[k] * s - y[k] * gr[j] * s)
                    + g * (sym_n * s + (n0[k] - n0j[k]) * y[j] + (n0[j] - n0j[j]) * y[k]);
                out[i][j][k] = outer * first + inner * y[i] * second;
            }
        }
    }
    out
}

fn vertical_from(l: &LocalScalars) -> Tensor3 {
    let (g2, s, sig, tau, y) = (l.gamma * l.gamma, l.ysq, l.sigma, l.tau, &l.y);
    let a = g2 / sig;
    let b = 2.0 * g2 * g2 / (sig * tau);
    let mut out = Tensor3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                out[i][j][k] = a * (kron(i, j) * y[k] + kron(i, k) * y[j] + kron(j, k) * y[i])
                    - b * (s * kron(j, k) + 2.0 * y[j] * y[k]) * y[i];
            }
        }
    }
    out
}

/// Cartan coefficients from the defining Christoffel-type formulas, with
/// every derivative of `g` taken by finite differences in the adapted frame.
pub fn cartan_general(
    profile: &RefractiveProfile,
    p: &PhasePoint,
    step: &FdStep,
) -> Result<CartanCoefficients> {
    let metric = |q: &PhasePoint| Ok(fundamental_tensor(profile, q)?.0);
    let dg_h: [Mat3; 3] = delta_x_all(metric, profile, p, step)?;
    let dg_v: [Mat3; 3] = y_partials(metric, p, step)?;
    let ginv = inverse_from(&LocalScalars::without_gradient(profile, p)?).0;
    let mut l = Tensor3::zero();
    let mut c = Tensor3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut lh = 0.0;
                let mut cv = 0.0;
                for r in 0..DIM {
                    lh += ginv[i][r] * (dg_h[k][j][r] + dg_h[j][k][r] - dg_h[r][j][k]);
                    cv += ginv[i][r] * dg_v[k][j][r];
                }
                l[i][j][k] = 0.5 * lh;
                c[i][j][k] = 0.5 * cv;
            }
        }
    }
    Ok(CartanCoefficients { l, c })
}
