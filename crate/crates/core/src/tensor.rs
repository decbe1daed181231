//! Fixed-size tensor aliases over three spatial dimensions.
//!
//! Components are stored with the first index outermost, so `t[i][j][k]`
//! holds `T^i_jk` for every mixed tensor in this crate. Derivative helpers
//! return the differentiation index outermost; callers move it into place.

pub const DIM: usize = 3;

pub type Vec3 = [f64; 3];
pub type Mat3 = [Vec3; 3];
pub type Tensor3 = [Mat3; 3];
pub type Tensor4 = [Tensor3; 3];

/// Linear-space operations shared by scalars and nested component arrays.
pub trait Components: Copy {
    fn zero() -> Self;

    /// `a * x + b * y`, componentwise.
    fn lin(a: f64, x: &Self, b: f64, y: &Self) -> Self;

    fn max_abs(&self) -> f64;

    fn all_finite(&self) -> bool;

    fn add(&self, other: &Self) -> Self {
        Self::lin(1.0, self, 1.0, other)
    }

    fn sub(&self, other: &Self) -> Self {
        Self::lin(1.0, self, -1.0, other)
    }

    fn scale(&self, a: f64) -> Self {
        Self::lin(a, self, 0.0, self)
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }
}

impl Components for f64 {
    fn zero() -> Self {
        0.0
    }

    fn lin(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        a * x + b * y
    }

    fn max_abs(&self) -> f64 {
        self.abs()
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Components, const N: usize> Components for [T; N] {
    fn zero() -> Self {
        [T::zero(); N]
    }

    fn lin(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        std::array::from_fn(|i| T::lin(a, &x[i], b, &y[i]))
    }

    fn max_abs(&self) -> f64 {
        self.iter().map(Components::max_abs).fold(0.0, f64::max)
    }

    fn all_finite(&self) -> bool {
        self.iter().all(Components::all_finite)
    }
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm_sq(a: &Vec3) -> f64 {
    dot(a, a)
}

pub fn norm(a: &Vec3) -> f64 {
    norm_sq(a).sqrt()
}

pub fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

pub fn identity() -> Mat3 {
    let mut m = Mat3::zero();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = Mat3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = (0..DIM).map(|r| a[i][r] * b[r][j]).sum();
        }
    }
    out
}

pub fn mat_vec(a: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&a[0], v), dot(&a[1], v), dot(&a[2], v)]
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut out = Mat3::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// `Q · A · Qᵀ`
pub fn congruence(q: &Mat3, a: &Mat3) -> Mat3 {
    mat_mul(&mat_mul(q, a), &transpose(q))
}

/// Inverse via the adjugate; `None` when the determinant vanishes.
pub fn invert(a: &Mat3) -> Option<Mat3> {
    let c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    let c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
    let c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
    let det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv_det = 1.0 / det;
    Some([
        [
            c00 * inv_det,
            (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv_det,
            (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv_det,
        ],
        [
            c01 * inv_det,
            (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv_det,
            (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv_det,
        ],
        [
            c02 * inv_det,
            (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv_det,
            (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv_det,
        ],
    ])
}

/// Moves a leading derivative index `d` of `D[d][i][j]` to the last slot: `T[i][j][d]`.
pub fn derivative_last_2(d: &[Mat3; 3]) -> Tensor3 {
    let mut out = Tensor3::zero();
    for (k, dk) in d.iter().enumerate() {
        for i in 0..DIM {
            for j in 0..DIM {
                out[i][j][k] = dk[i][j];
            }
        }
    }
    out
}

/// Same as [`derivative_last_2`] for a rank-3 tensor: `D[d][i][j][k] -> T[i][j][k][d]`.
pub fn derivative_last_3(d: &[Tensor3; 3]) -> Tensor4 {
    let mut out = Tensor4::zero();
    for (l, dl) in d.iter().enumerate() {
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    out[i][j][k][l] = dl[i][j][k];
                }
            }
        }
    }
    out
}
