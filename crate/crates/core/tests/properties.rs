use proptest::prelude::*;

use lagrange_optics::closedform::helix_omegas;
use lagrange_optics::config::RunConfig;
use lagrange_optics::connection::{cartan_closed_form, semispray};
use lagrange_optics::curvature::{
    antisymmetry_defect3, antisymmetry_defect4, curvatures, torsions,
};
use lagrange_optics::dynamics::{integrate, motion_rhs, read_csv, IntegratorConfig};
use lagrange_optics::metric::{
    energy, fundamental_tensor, inverse_fundamental_tensor, metric_spectrum,
};
use lagrange_optics::tensor::{
    congruence, identity, mat_mul, mat_vec, norm, Components, Mat3, Vec3,
};
use lagrange_optics::{PhasePoint, ProfileSpec, RefractiveProfile, Symmetry};

fn profiles() -> impl Strategy<Value = ProfileSpec> {
    let sym = prop_oneof![Just(Symmetry::Cylindrical), Just(Symmetry::Spherical)];
    prop_oneof![
        (1.0f64..3.0).prop_map(|n0| ProfileSpec::Uniform { n0, symmetry: None }),
        (0.1f64..2.0, 0.5f64..4.0, sym.clone()).prop_map(|(epsilon, width, symmetry)| {
            ProfileSpec::GaussianMirage {
                epsilon,
                width,
                symmetry,
            }
        }),
        (0.1f64..1.0, 0.1f64..1.0, 0.5f64..3.0, 0.3f64..1.5, sym).prop_map(
            |(base, amplitude, center, width, symmetry)| ProfileSpec::GaussianRing {
                base,
                amplitude,
                center,
                width,
                symmetry,
            }
        ),
    ]
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    [-r..r, -r..r, -r..r]
}

/// Positions kept off the symmetry axis and origin.
fn position() -> impl Strategy<Value = Vec3> {
    vec3(4.0).prop_filter("away from the axis", |x| x[0].hypot(x[1]) > 0.3)
}

fn setup() -> impl Strategy<Value = (RefractiveProfile, PhasePoint)> {
    (profiles(), position(), vec3(1.5)).prop_map(|(spec, x, y)| {
        (
            RefractiveProfile::from_spec(&spec).unwrap(),
            PhasePoint::new(x, y),
        )
    })
}

fn rotation() -> impl Strategy<Value = Mat3> {
    (0.0f64..std::f64::consts::TAU, vec3(1.0), any::<bool>())
        .prop_filter("axis", |(_, a, _)| norm(a) > 0.1)
        .prop_map(|(angle, a, flip)| {
            let n = norm(&a);
            let k = [a[0] / n, a[1] / n, a[2] / n];
            let (s, c) = angle.sin_cos();
            let mut r = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    r[i][j] = c * f64::from(u8::from(i == j)) + (1.0 - c) * k[i] * k[j];
                }
            }
            r[0][1] -= s * k[2];
            r[0][2] += s * k[1];
            r[1][0] += s * k[2];
            r[1][2] -= s * k[0];
            r[2][0] -= s * k[1];
            r[2][1] += s * k[0];
            if flip {
                // Reflection through the horizontal plane keeps both symmetry classes.
                r = mat_mul(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]], &r);
            }
            r
        })
}

fn scale_of(v: &Vec3) -> f64 {
    1.0 + v.max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_inverts((m, p) in setup()) {
        let g = fundamental_tensor(&m, &p).unwrap();
        let gi = inverse_fundamental_tensor(&m, &p).unwrap();
        prop_assert!(g.max_asymmetry() == 0.0);
        prop_assert!(mat_mul(&g.0, &gi.0).max_abs_diff(&identity()) < 1e-12);
    }

    #[test]
    fn metric_is_positive_with_tau_along_y((m, p) in setup()) {
        let [s1, s2, t] = metric_spectrum(&m, &p).unwrap();
        prop_assert!(s1 >= 0.5 && s1 == s2 && t >= s1);
        let g = fundamental_tensor(&m, &p).unwrap();
        let gy = mat_vec(&g.0, &p.y);
        prop_assert!(gy.max_abs_diff(&p.y.scale(t)) < 1e-12 * scale_of(&gy));
    }

    #[test]
    fn energy_matches_contraction((m, p) in setup()) {
        let g = fundamental_tensor(&m, &p).unwrap();
        let y2 = p.y.iter().map(|c| c * c).sum::<f64>();
        let e = 0.5 * g.contract(&p.y, &p.y) + 0.25 * y2;
        let got = energy(&m, &p).unwrap();
        prop_assert!((got - e).abs() < 1e-12 * (1.0 + e));
    }

    #[test]
    fn acceleration_is_minus_twice_semispray((m, p) in setup()) {
        let a = motion_rhs(&m, &p.x, &p.y).unwrap();
        let g = semispray(&m, &p).unwrap();
        prop_assert!(a.max_abs_diff(&g.scale(-2.0)) < 1e-12 * scale_of(&a));
    }

    #[test]
    fn acceleration_is_even_in_velocity((m, p) in setup()) {
        let neg = p.y.scale(-1.0);
        let a = motion_rhs(&m, &p.x, &p.y).unwrap();
        let b = motion_rhs(&m, &p.x, &neg).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-14 * scale_of(&a));
    }

    #[test]
    fn acceleration_is_equivariant((m, p) in setup(), r in rotation()) {
        prop_assume!(matches!(m.symmetry(), Some(Symmetry::Spherical)) || m.is_uniform());
        let a = motion_rhs(&m, &p.x, &p.y).unwrap();
        let ra = motion_rhs(&m, &mat_vec(&r, &p.x), &mat_vec(&r, &p.y)).unwrap();
        prop_assert!(ra.max_abs_diff(&mat_vec(&r, &a)) < 1e-12 * scale_of(&a));
    }

    #[test]
    fn metric_transforms_as_a_tensor((m, p) in setup(), r in rotation()) {
        prop_assume!(matches!(m.symmetry(), Some(Symmetry::Spherical)) || m.is_uniform());
        let g = fundamental_tensor(&m, &p).unwrap().0;
        let q = PhasePoint::new(mat_vec(&r, &p.x), mat_vec(&r, &p.y));
        let rg = fundamental_tensor(&m, &q).unwrap().0;
        prop_assert!(rg.max_abs_diff(&congruence(&r, &g)) < 1e-12 * (1.0 + g.max_abs()));
    }

    #[test]
    fn cartan_coefficients_are_symmetric((m, p) in setup()) {
        let c = cartan_closed_form(&m, &p).unwrap();
        prop_assert!(c.max_asymmetry() < 1e-12 * (1.0 + c.l.max_abs() + c.c.max_abs()));
    }

    #[test]
    fn config_json_round_trips(spec in profiles(), x in vec3(3.0), v in vec3(2.0), t1 in 0.5f64..30.0) {
        let text = serde_json::json!({
            "profile": spec,
            "initial": {"x": x, "v": v},
            "integrator": {"t_span": [0.0, t1]},
        })
        .to_string();
        let cfg = RunConfig::from_json(&text).unwrap();
        prop_assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn torsion_and_curvature_antisymmetry((m, p) in setup()) {
        let t = torsions(&m, &p).unwrap();
        prop_assert!(antisymmetry_defect3(&t.r) < 1e-8);
        let k = curvatures(&m, &p).unwrap();
        prop_assert!(antisymmetry_defect4(&k.s) < 1e-8);
        prop_assert!(antisymmetry_defect4(&k.r) < 1e-6);
    }

    #[test]
    fn time_reversal_retraces((m, p) in setup()) {
        let cfg = IntegratorConfig { sample_every: 1.0, ..IntegratorConfig::over(0.0, 2.0) };
        let fwd = integrate(&m, p.x, p.y, &cfg).unwrap();
        let end = *fwd.last().unwrap();
        let back = integrate(&m, end.x, end.v.scale(-1.0), &cfg).unwrap();
        let home = back.last().unwrap();
        prop_assert!(home.x.max_abs_diff(&p.x) < 1e-7 * scale_of(&p.x));
        prop_assert!(home.v.max_abs_diff(&p.y.scale(-1.0)) < 1e-7 * scale_of(&p.y));
    }

    #[test]
    fn csv_is_bit_stable((m, p) in setup()) {
        let cfg = IntegratorConfig { sample_every: 0.25, ..IntegratorConfig::over(0.0, 1.0) };
        let traj = integrate(&m, p.x, p.y, &cfg).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &traj.samples);
    }

    #[test]
    fn helices_come_in_counter_rotating_pairs(eps in 0.2f64..2.0, width in 0.8f64..4.0, rho in 0.3f64..8.0) {
        let m = RefractiveProfile::gaussian_mirage(eps, width, Symmetry::Cylindrical).unwrap();
        let hs = helix_omegas(&m, rho).unwrap();
        prop_assert!(hs.len().is_multiple_of(2));
        for h in &hs {
            prop_assert!(hs.iter().any(|o| o.omega0 == -h.omega0));
            prop_assert!(h.residual < 1e-10);
        }
    }
}
