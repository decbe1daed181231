//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lagrange_optics::closedform::{
    circle_radii, generator_radii, helix_equation, helix_omegas, Family, LineFamily,
};
use lagrange_optics::connection::{nonlinear_connection, semispray};
use lagrange_optics::dynamics::{integrate, IntegratorConfig};
use lagrange_optics::tensor::{norm, Components, Vec3};
use lagrange_optics::verify::{
    self, axis_excursion, bisect_helix_omega, equivariance_defect, family_tracking,
    helix_scan_radii, incompatibility_witness, random_phase_point, reference_mirage,
    uniform_degeneration, CheckResult,
};
use lagrange_optics::{RefractiveProfile, Result, Symmetry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

fn below(value: f64, tol: f64) -> Outcome {
    Outcome {
        passed: value < tol,
        detail: format!("{value:.3e} < {tol:.0e}"),
    }
}

fn from_check(r: CheckResult) -> Outcome {
    let cmp = if r.lower_bound { ">" } else { "<" };
    let mut detail = format!("{} {:.3e} {cmp} {:.0e}", r.name, r.value, r.tolerance);
    if let Some(n) = r.note {
        detail.push_str(&format!(" ({n})"));
    }
    Outcome {
        passed: r.passed,
        detail,
    }
}

fn check(name: &str) -> Outcome {
    from_check(verify::run_check(name, SEED).expect("known check"))
}

fn all(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|o| o.passed),
        detail: parts
            .into_iter()
            .map(|o| o.detail)
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.passed &= took < limit;
    o.detail.push_str(&format!(
        "; {:.3} s < {} s",
        took.as_secs_f64(),
        limit.as_secs()
    ));
    o
}

fn failed(e: impl ToString) -> Outcome {
    Outcome {
        passed: false,
        detail: e.to_string(),
    }
}

fn lift(r: Result<Outcome>) -> Outcome {
    r.unwrap_or_else(failed)
}

fn inverse_identity() -> Outcome {
    timed(Duration::from_secs(1), || check("metric.inverse"))
}

fn hessian() -> Outcome {
    check("metric.hessian")
}

fn connection() -> Outcome {
    let uniform = lift((|| {
        let u = RefractiveProfile::uniform(1.7)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let p = random_phase_point(&mut rng, &u);
            worst = worst
                .max(semispray(&u, &p)?.max_abs())
                .max(nonlinear_connection(&u, &p)?.n.max_abs());
        }
        Ok(Outcome {
            passed: worst == 0.0,
            detail: format!("uniform G, N max {worst:e} == 0"),
        })
    })());
    all(vec![check("connection.nonlinear-fd"), uniform])
}

fn cartan() -> Outcome {
    all(vec![
        check("connection.cartan-l"),
        check("connection.cartan-c"),
    ])
}

fn metricity() -> Outcome {
    check("curvature.metricity")
}

fn degenerations() -> Outcome {
    let uniform = lift(uniform_degeneration(SEED, 10).map(|(h, s4)| Outcome {
        passed: h < 1e-8 && s4 > 1e-3,
        detail: format!(
            "uniform R,P,R4,P4 {h:.3e} < 1e-8, |S4| = {s4:.3e} at x=(0.3,-0.2,1) y=(1,0.5,-0.3)"
        ),
    }));
    all(vec![check("curvature.vacuum"), uniform])
}

fn straight_lines() -> Outcome {
    lift((|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst: f64 = 0.0;
        for n0 in [1.0, 1.5, 2.4] {
            let u = RefractiveProfile::uniform(n0)?;
            for _ in 0..5 {
                let x0: Vec3 = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
                let v0: Vec3 = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
                let t = integrate(&u, x0, v0, &IntegratorConfig::over(0.0, 10.0))
                    .map_err(|f| f.error)?;
                let end = t.last().expect("samples");
                worst = worst.max(end.x.max_abs_diff(&Vec3::lin(1.0, &x0, 10.0, &v0)));
            }
        }
        Ok(below(worst, 1e-9))
    })())
}

fn energy_conservation() -> Outcome {
    check("dynamics.energy-drift")
}

fn helix() -> Outcome {
    timed(Duration::from_secs(5), || {
        lift((|| {
            let p = reference_mirage(Symmetry::Cylindrical);
            let mut branches = 0;
            let mut residual: f64 = 0.0;
            let mut bisect_gap: f64 = 0.0;
            for rho in helix_scan_radii() {
                let mut omegas: Vec<f64> = helix_omegas(&p, rho)?
                    .into_iter()
                    .map(|h| h.omega0)
                    .filter(|w| *w > 0.0)
                    .collect();
                omegas.sort_by(f64::total_cmp);
                for (i, &w) in omegas.iter().enumerate() {
                    branches += 1;
                    residual = residual.max(helix_equation(&p, rho, w)?.abs());
                    let lo = if i == 0 {
                        1e-9
                    } else {
                        0.5 * (omegas[i - 1] + w)
                    };
                    let hi = omegas.get(i + 1).map_or(10.0 * w + 1.0, |n| 0.5 * (w + n));
                    let b = bisect_helix_omega(&p, rho, lo, hi)?.unwrap_or(f64::INFINITY);
                    bisect_gap = bisect_gap.max((b - w).abs());
                }
            }
            let mut tracking: f64 = 0.0;
            for h in helix_omegas(&p, 4.0)? {
                tracking = tracking.max(family_tracking(
                    &p,
                    &Family::Helix(h),
                    &IntegratorConfig::default(),
                )?);
            }
            Ok(Outcome {
                passed: branches >= 1 && residual < 1e-10 && bisect_gap < 1e-10 && tracking < 1e-6,
                detail: format!(
                    "{branches} branches, residual {residual:.3e} < 1e-10, bisection {bisect_gap:.3e} < 1e-10, \
                     tracking {tracking:.3e} < 1e-6"
                ),
            })
        })())
    })
}

fn circles() -> Outcome {
    let closure = lift((|| {
        let p = reference_mirage(Symmetry::Cylindrical);
        let fams = circle_radii(&p, (0.1, 10.0))?;
        let mut worst: f64 = 0.0;
        for f in &fams {
            let r = f.radius;
            let t = integrate(
                &p,
                [r, 0.0, 0.0],
                [0.0, r, 0.0],
                &IntegratorConfig::over(0.0, 2.0 * PI),
            )
            .map_err(|e| e.error)?;
            worst = worst.max(norm(&t.last().expect("samples").x.sub(&[r, 0.0, 0.0])));
        }
        let radii: Vec<String> = fams.iter().map(|f| format!("{:.6}", f.radius)).collect();
        Ok(Outcome {
            passed: !fams.is_empty() && worst < 1e-6,
            detail: format!("roots [{}], closure {worst:.3e} < 1e-6", radii.join(", ")),
        })
    })());
    all(vec![closure, check("closedform.circle-symmetries-agree")])
}

fn generators() -> Outcome {
    let ring = lift((|| {
        let ring = RefractiveProfile::gaussian_ring(1.0, 1.0, 2.0, 1.0, Symmetry::Cylindrical)?;
        let gens = generator_radii(&ring, (0.1, 10.0))?;
        let [g @ LineFamily::CylinderGenerator { rho0, .. }] = gens.as_slice() else {
            return Ok(failed(format!("expected one generator, got {gens:?}")));
        };
        let el = Family::Line(g.clone()).max_el_residual(&ring, 10.0, 100)?;
        let err = (rho0 - 2.0).abs();
        Ok(Outcome {
            passed: err < 1e-10 && el < 1e-10,
            detail: format!("|ρ0 − 2| {err:.3e} < 1e-10, el_residual {el:.3e} < 1e-10"),
        })
    })());
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg = dir.path().join("mirage.json");
    std::fs::write(
        &cfg,
        r#"{"profile": {"kind": "gaussian-mirage", "epsilon": 1.0, "width": 2.5, "symmetry": "cylindrical"}}"#,
    )
    .expect("write config");
    let out = Command::new(env!("CARGO_BIN_EXE_lagrange-optics"))
        .args(["solve", "generator", "--config"])
        .arg(&cfg)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let cli = Outcome {
        passed: out.status.code() == Some(3) && stdout.trim() == "[]",
        detail: format!(
            "mirage exit {:?}, output {}",
            out.status.code(),
            stdout.trim()
        ),
    };
    all(vec![ring, cli])
}

fn axis_segments() -> Outcome {
    lift(axis_excursion(SEED, 10, &IntegratorConfig::default()).map(|w| below(w, 1e-10)))
}

fn incompatibility() -> Outcome {
    lift(incompatibility_witness().map(|w| match w {
        Some((s, r)) => Outcome {
            passed: r > 1e-4,
            detail: format!("at s = {s:.2}: el_residual {r:.3e} > 1e-4"),
        },
        None => failed("no point inside the existence window"),
    }))
}

fn equivariance() -> Outcome {
    lift(equivariance_defect(SEED, 20, &IntegratorConfig::default()).map(|w| below(w, 1e-8)))
}

fn full_verify() -> Outcome {
    timed(Duration::from_secs(60), || {
        let out = Command::new(env!("CARGO_BIN_EXE_lagrange-optics"))
            .args(["verify", "--suite", "all", "--seed", "42"])
            .output()
            .expect("binary runs");
        let text = String::from_utf8_lossy(&out.stdout);
        let fails: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
        Outcome {
            passed: out.status.success(),
            detail: format!(
                "{} checks, exit {:?}{}",
                text.lines()
                    .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
                    .count(),
                out.status.code(),
                if fails.is_empty() {
                    String::new()
                } else {
                    format!(", {}", fails.join(" | "))
                }
            ),
        }
    })
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 15] = [
        ("inverse metric identity", inverse_identity),
        ("hessian consistency", hessian),
        ("semispray and connection", connection),
        ("cartan dual path", cartan),
        ("metricity", metricity),
        ("degenerations", degenerations),
        ("straight lines in uniform media", straight_lines),
        ("energy conservation", energy_conservation),
        ("helix reproduction", helix),
        ("circle reproduction", circles),
        ("generator lines", generators),
        ("axis segments", axis_segments),
        ("incompatibility", incompatibility),
        ("equivariance", equivariance),
        ("full verify run", full_verify),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} of 15 criteria passed", 15 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
