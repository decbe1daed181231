//! Anisotropic equations of motion and their numerical integration.
//!
//! The acceleration is
//!
//! ```text
//! dV/dt = −4γv²(1+3γ²v²) / ((1+2γ²v²)(1+6γ²v²)) · (γ_s V^s) V + γv⁴/(1+2γ²v²) · ∇γ
//! ```
//!
//! and trajectories are produced by an embedded Dormand–Prince 5(4) pair with
//! PI step control and continuous output, or by fixed-step classical RK4.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::error::{Error, Result};
use crate::media::{ProfileSpec, RefractiveProfile};
use crate::metric::{energy, PhasePoint};
use crate::tensor::{dot, norm_sq, Components, Vec3};

/// Acceleration `dV/dt` of the equations of motion at `(x, v)`.
pub fn motion_rhs(profile: &RefractiveProfile, x: &Vec3, v: &Vec3) -> Result<Vec3> {
    let (gamma, grad) = profile.gamma_and_gradient(x)?;
    let v2 = norm_sq(v);
    let g2v2 = gamma * gamma * v2;
    let drag = 4.0 * gamma * v2 * (1.0 + 3.0 * g2v2) / ((1.0 + 2.0 * g2v2) * (1.0 + 6.0 * g2v2));
    let push = gamma * v2 * v2 / (1.0 + 2.0 * g2v2);
    Ok(Vec3::lin(-drag * dot(&grad, v), v, push, &grad))
}

/// Residual `a − dV/dt(x, v)` of the equations of motion for a curve
/// supplying `(x, v, a)` at time `t`; zero exactly on solutions.
pub fn el_residual<F>(profile: &RefractiveProfile, curve: F, t: f64) -> Result<Vec3>
where
    F: Fn(f64) -> (Vec3, Vec3, Vec3),
{
    let (x, v, a) = curve(t);
    Ok(a.sub(&motion_rhs(profile, &x, &v)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Adaptive Dormand–Prince 5(4).
    #[default]
    Dopri5,
    /// Classical RK4 with the fixed step `max_step`.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_span: (f64, f64),
    pub sample_every: f64,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            t_span: (0.0, 10.0),
            sample_every: 0.1,
            method: Method::Dopri5,
        }
    }
}

impl IntegratorConfig {
    pub fn over(t0: f64, t1: f64) -> Self {
        IntegratorConfig {
            t_span: (t0, t1),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_step", self.max_step)?;
        positive("sample_every", self.sample_every)?;
        let (t0, t1) = self.t_span;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidParameter(format!(
                "t_span must satisfy t0 < t1, got ({t0}, {t1})"
            )));
        }
        Ok(())
    }

    fn span(&self) -> f64 {
        self.t_span.1 - self.t_span.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    /// `None` for user-defined radial profiles and analytic curves.
    pub profile: Option<ProfileSpec>,
    pub config: Option<IntegratorConfig>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Reason the run stopped early, if it did.
    pub truncated: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub meta: TrajectoryMeta,
}

pub const CSV_HEADER: [&str; 8] = ["t", "x1", "x2", "x3", "v1", "v2", "v3", "energy"];

impl Trajectory {
    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// `max_t |E(t) − E(0)| / max(E(0), 1e−30)`.
    pub fn energy_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        let e0 = first.energy;
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs())
            .fold(0.0, f64::max)
            / e0.max(1e-30)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for s in &self.samples {
            let row = [
                s.t, s.x[0], s.x[1], s.x[2], s.v[0], s.v[1], s.v[2], s.energy,
            ];
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads samples written by [`Trajectory::write_csv`].
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Sample>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r
        .headers()
        .map_err(|e| Error::InvalidParameter(format!("unreadable CSV header: {e}")))?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidParameter(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut samples = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidParameter(format!("CSV row {}: {e}", line + 1)))?;
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::InvalidParameter(format!(
                "CSV row {} has {} fields",
                line + 1,
                rec.len()
            )));
        }
        let mut vals = [0.0; 8];
        for (slot, field) in vals.iter_mut().zip(rec.iter()) {
            *slot = field.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("CSV row {}: bad number {field:?}", line + 1))
            })?;
        }
        samples.push(Sample {
            t: vals[0],
            x: [vals[1], vals[2], vals[3]],
            v: [vals[4], vals[5], vals[6]],
            energy: vals[7],
        });
    }
    Ok(samples)
}

/// An integration that stopped before reaching the end of the time span.
#[derive(Debug, Clone, ThisError)]
#[error("{error}")]
pub struct IntegrationFailure {
    pub error: Error,
    /// Samples up to and including the last valid state.
    pub partial: Box<Trajectory>,
}

type State = [Vec3; 2];

struct System<'a> {
    profile: &'a RefractiveProfile,
}

impl System<'_> {
    fn eval(&self, y: &State) -> Result<State> {
        Ok([y[1], motion_rhs(self.profile, &y[0], &y[1])?])
    }

    fn sample(&self, t: f64, y: &State) -> Result<Sample> {
        Ok(Sample {
            t,
            x: y[0],
            v: y[1],
            energy: energy(self.profile, &PhasePoint::new(y[0], y[1]))?,
        })
    }
}

/// Integrates the equations of motion from `(x0, v0)` over `cfg.t_span`.
pub fn integrate(
    profile: &RefractiveProfile,
    x0: Vec3,
    v0: Vec3,
    cfg: &IntegratorConfig,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let meta = TrajectoryMeta {
        profile: profile.spec(),
        config: Some(*cfg),
        accepted_steps: 0,
        rejected_steps: 0,
        truncated: None,
    };
    let mut traj = Trajectory {
        samples: Vec::new(),
        meta,
    };
    let fail = |traj: Trajectory, error: Error| IntegrationFailure {
        error,
        partial: Box::new(traj),
    };
    if let Err(e) = cfg.validate() {
        return Err(fail(traj, e));
    }
    if !(x0.all_finite() && v0.all_finite()) {
        return Err(fail(
            traj,
            Error::InvalidParameter("initial state must be finite".into()),
        ));
    }
    let sys = System { profile };
    let y0 = [x0, v0];
    let outcome = match cfg.method {
        Method::Dopri5 => dopri5(&sys, y0, cfg, &mut traj),
        Method::Rk4 => rk4(&sys, y0, cfg, &mut traj),
    };
    match outcome {
        Ok(()) => Ok(traj),
        Err(error) => {
            traj.meta.truncated = Some(error.to_string());
            Err(fail(traj, error))
        }
    }
}

/// Sample times `t0 + k·every` up to `t1`, with `t1` appended when off-grid.
pub(crate) fn sample_grid((t0, t1): (f64, f64), every: f64) -> Vec<f64> {
    let n = ((t1 - t0) / every + 1e-9).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * every).collect();
    let last = *ts.last().unwrap_or(&t0);
    if t1 - last > 1e-9 * every {
        ts.push(t1);
    } else if let Some(l) = ts.last_mut() {
        *l = l.min(t1);
    }
    ts
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const MAX_STEPS: usize = 5_000_000;

fn combo(y: &State, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out = State::lin(1.0, &out, *c, k);
    }
    out
}

fn error_norm(err: &State, y0: &State, y1: &State, cfg: &IntegratorConfig) -> f64 {
    let mut acc = 0.0;
    for a in 0..2 {
        for i in 0..3 {
            let sc = cfg.abs_tol + cfg.rel_tol * y0[a][i].abs().max(y1[a][i].abs());
            acc += (err[a][i] / sc).powi(2);
        }
    }
    (acc / 6.0).sqrt()
}

fn initial_step(sys: &System, y0: &State, f0: &State, cfg: &IntegratorConfig) -> Result<f64> {
    let scale = |y: &State| {
        let mut out = [[0.0; 3]; 2];
        for a in 0..2 {
            for i in 0..3 {
                out[a][i] = cfg.abs_tol + cfg.rel_tol * y[a][i].abs();
            }
        }
        out
    };
    let sc = scale(y0);
    let rms = |v: &State| {
        let mut acc = 0.0;
        for a in 0..2 {
            for i in 0..3 {
                acc += (v[a][i] / sc[a][i]).powi(2);
            }
        }
        (acc / 6.0).sqrt()
    };
    let (d0, d1) = (rms(y0), rms(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(cfg.max_step).min(cfg.span());
    let y1 = combo(y0, &[(h0, f0)]);
    let f1 = sys.eval(&y1)?;
    let d2 = rms(&f1.sub(f0)) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(cfg.max_step).min(cfg.span()))
}

fn dopri5(sys: &System, y0: State, cfg: &IntegratorConfig, traj: &mut Trajectory) -> Result<()> {
    let (t0, t1) = cfg.t_span;
    let times = sample_grid(cfg.t_span, cfg.sample_every);
    let mut next_sample = 0;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = sys.eval(&y)?;
    let mut h = initial_step(sys, &y, &k1, cfg)?;
    let mut facold: f64 = 1e-4;
    let expo = 0.2 - BETA * 0.75;
    let min_step = 1e-14 * cfg.span();

    traj.samples.push(sys.sample(t, &y)?);
    next_sample += 1;

    let mut steps = 0;
    while next_sample < times.len() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Numerical(format!(
                "step budget of {MAX_STEPS} exhausted at t = {t}"
            )));
        }
        if h < min_step {
            return Err(Error::StepUnderflow { t, h });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        let stage = |terms: &[(f64, &State)]| sys.eval(&combo(&y, terms));
        let attempt = (|| -> Result<(State, State, [State; 7])> {
            let k2 = stage(&[(h * A21, &k1)])?;
            let k3 = stage(&[(h * A31, &k1), (h * A32, &k2)])?;
            let k4 = stage(&[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)])?;
            let k5 = stage(&[
                (h * A51, &k1),
                (h * A52, &k2),
                (h * A53, &k3),
                (h * A54, &k4),
            ])?;
            let k6 = stage(&[
                (h * A61, &k1),
                (h * A62, &k2),
                (h * A63, &k3),
                (h * A64, &k4),
                (h * A65, &k5),
            ])?;
            let y_new = combo(
                &y,
                &[
                    (h * A71, &k1),
                    (h * A73, &k3),
                    (h * A74, &k4),
                    (h * A75, &k5),
                    (h * A76, &k6),
                ],
            );
            let k7 = sys.eval(&y_new)?;
            let err = combo(
                &State::zero(),
                &[
                    (h * E1, &k1),
                    (h * E3, &k3),
                    (h * E4, &k4),
                    (h * E5, &k5),
                    (h * E6, &k6),
                    (h * E7, &k7),
                ],
            );
            Ok((y_new, err, [k1, k2, k3, k4, k5, k6, k7]))
        })();

        let (y_new, err_vec, ks) = match attempt {
            Ok(v) => v,
            Err(e @ Error::Domain { .. }) => {
                // A stage left the domain; shrink and retry before giving up.
                traj.meta.rejected_steps += 1;
                if h * 0.25 < min_step {
                    let last_valid = sys.sample(t, &y)?;
                    if traj.samples.last().is_none_or(|s| s.t < last_valid.t) {
                        traj.samples.push(last_valid);
                    }
                    return Err(e);
                }
                h *= 0.25;
                continue;
            }
            Err(e) => return Err(e),
        };

        let err = error_norm(&err_vec, &y, &y_new, cfg);
        let fac11 = err.powf(expo);
        let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        if !err.is_finite() {
            traj.meta.rejected_steps += 1;
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            facold = err.max(1e-4);
            traj.meta.accepted_steps += 1;
            let t_new = if last { t1 } else { t + h };

            // Continuous extension on [t, t_new].
            let [k1s, _, k3, k4, k5, k6, k7] = ks;
            let ydiff = y_new.sub(&y);
            let bspl = State::lin(h, &k1s, -1.0, &ydiff);
            let r4 = combo(&ydiff, &[(-h, &k7), (-1.0, &bspl)]);
            let r5 = combo(
                &State::zero(),
                &[
                    (h * D1, &k1s),
                    (h * D3, &k3),
                    (h * D4, &k4),
                    (h * D5, &k5),
                    (h * D6, &k6),
                    (h * D7, &k7),
                ],
            );
            while next_sample < times.len() && times[next_sample] <= t_new {
                let ts = times[next_sample];
                let state = if ts == t_new {
                    y_new
                } else {
                    let s = (ts - t) / h;
                    let s1 = 1.0 - s;
                    let inner = State::lin(1.0, &r4, s1, &r5);
                    let inner = State::lin(1.0, &bspl, s, &inner);
                    let inner = State::lin(1.0, &ydiff, s1, &inner);
                    State::lin(1.0, &y, s, &inner)
                };
                traj.samples.push(sys.sample(ts, &state)?);
                next_sample += 1;
            }

            y = y_new;
            k1 = k7;
            t = t_new;
            if last {
                break;
            }
            h = (h / fac).min(cfg.max_step);
        } else {
            traj.meta.rejected_steps += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
    Ok(())
}

fn rk4(sys: &System, y0: State, cfg: &IntegratorConfig, traj: &mut Trajectory) -> Result<()> {
    let times = sample_grid(cfg.t_span, cfg.sample_every);
    let mut y = y0;
    traj.samples.push(sys.sample(times[0], &y)?);
    for w in times.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let n = ((tb - ta) / cfg.max_step).ceil().max(1.0) as usize;
        let h = (tb - ta) / n as f64;
        for step in 0..n {
            let t = ta + step as f64 * h;
            let k1 = sys.eval(&y);
            let advance = k1.and_then(|k1| {
                let k2 = sys.eval(&combo(&y, &[(0.5 * h, &k1)]))?;
                let k3 = sys.eval(&combo(&y, &[(0.5 * h, &k2)]))?;
                let k4 = sys.eval(&combo(&y, &[(h, &k3)]))?;
                Ok(combo(
                    &y,
                    &[
                        (h / 6.0, &k1),
                        (h / 3.0, &k2),
                        (h / 3.0, &k3),
                        (h / 6.0, &k4),
                    ],
                ))
            });
            match advance {
                Ok(next) => {
                    y = next;
                    traj.meta.accepted_steps += 1;
                }
                Err(e) => {
                    if step > 0 {
                        traj.samples.push(sys.sample(t, &y)?);
                    }
                    return Err(e);
                }
            }
        }
        traj.samples.push(sys.sample(tb, &y)?);
    }
    Ok(())
}
