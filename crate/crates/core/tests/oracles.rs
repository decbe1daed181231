//! Values frozen from independent high-precision computations: a symbolic
//! derivation of the semispray, connection and torsion from the Lagrangian
//! (40-digit evaluation), and mpmath root finding for the closed-form
//! families.

#![allow(clippy::excessive_precision)]

use lagrange_optics::closedform::{circle_radii, helix_omegas, incompatibility_probe, Family};
use lagrange_optics::connection::{cartan_closed_form, nonlinear_connection, semispray};
use lagrange_optics::curvature::torsions;
use lagrange_optics::dynamics::{el_residual, integrate, IntegratorConfig};
use lagrange_optics::metric::{
    energy, fundamental_tensor, inverse_fundamental_tensor, lagrangian, sigma_tau,
};
use lagrange_optics::tensor::{norm, Components, Mat3, Tensor3, Vec3};
use lagrange_optics::{PhasePoint, RefractiveProfile, Symmetry};

fn mirage_cyl() -> RefractiveProfile {
    RefractiveProfile::gaussian_mirage(1.0, 2.5, Symmetry::Cylindrical).unwrap()
}

fn assert_close<T: Components + std::fmt::Debug>(got: &T, want: &T, tol: f64) {
    let err = got.max_abs_diff(want);
    assert!(
        err < tol,
        "error {err:e} >= {tol:e}\n got  {got:?}\n want {want:?}"
    );
}

const GENERIC: PhasePoint = PhasePoint {
    x: [2.1, -0.7, 0.4],
    y: [0.4, 0.3, 0.2],
};

const REFERENCE: PhasePoint = PhasePoint {
    x: [3.0, 0.0, 0.0],
    y: [0.4, 0.3, 0.2],
};

#[test]
fn media_point_values() {
    let m = RefractiveProfile::gaussian_mirage(0.5, 2.0, Symmetry::Spherical).unwrap();
    assert!((m.gamma(&[0.0; 3]).unwrap() - 1.25f64.sqrt()).abs() < 1e-15);
    let ring = RefractiveProfile::gaussian_ring(1.0, 1.0, 2.0, 1.0, Symmetry::Cylindrical).unwrap();
    let (f, fp) = ring.radial_f(2.0).unwrap();
    assert!((f - 2.0).abs() < 1e-15);
    assert!(fp.abs() < 1e-15);
    assert!(ring.gamma_gradient(&[2.0, 0.0, 0.0]).unwrap()[0].abs() < 1e-8);
}

#[test]
fn unit_gamma_scalars() {
    let u = RefractiveProfile::uniform_gamma(1.0).unwrap();
    let p = PhasePoint::new([0.0; 3], [1.0, 0.0, 0.0]);
    let (s, t) = sigma_tau(&u, &p).unwrap();
    assert!((s - 1.5).abs() < 1e-15 && (t - 3.5).abs() < 1e-15);
    assert!((lagrangian(&u, &p).unwrap() - 1.0).abs() < 1e-15);
    let diag = |a: f64, b: f64| [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, b]];
    assert_close(
        &fundamental_tensor(&u, &p).unwrap().0,
        &diag(3.5, 1.5),
        1e-15,
    );
    assert_close(
        &inverse_fundamental_tensor(&u, &p).unwrap().0,
        &diag(2.0 / 7.0, 2.0 / 3.0),
        1e-15,
    );
    assert!((energy(&u, &p).unwrap() - 2.0).abs() < 1e-15);
    let flat = RefractiveProfile::uniform_gamma(0.0).unwrap();
    let q = PhasePoint::new([0.0; 3], [3.0, 4.0, 0.0]);
    assert!((energy(&flat, &q).unwrap() - 12.5).abs() < 1e-13);
}

#[test]
fn semispray_and_connection_at_reference_point() {
    let m = mirage_cyl();
    let g: Vec3 = [
        -0.006130635032591380873417995,
        -0.01138457499004259641706965,
        -0.007589716660028397611379766,
    ];
    let n: Mat3 = [
        [
            -0.05699585258374095327522873,
            0.01417598551240726712892669,
            0.009450657008271511419284462,
        ],
        [
            -0.04732692335406670891948091,
            -0.05209769770936215146450392,
            -0.009432742939480108938403395,
        ],
        [
            -0.03155128223604447261298727,
            -0.009432742939480108938403395,
            -0.04423707859312872734916776,
        ],
    ];
    assert_close(&semispray(&m, &REFERENCE).unwrap(), &g, 1e-14);
    assert_close(&nonlinear_connection(&m, &REFERENCE).unwrap().n, &n, 1e-13);
}

#[test]
fn connection_at_generic_point() {
    let m = mirage_cyl();
    let g: Vec3 = [
        -0.001229317246457702550669724,
        -0.01325640615212570877242474,
        -0.006307467031205358287375992,
    ];
    let n: Mat3 = [
        [
            -0.03841026553094585417367099,
            0.04039923077751606835623333,
            0.01758842491655832958952446,
        ],
        [
            -0.05979578915936388679451475,
            -0.04221873060652068247614606,
            -0.01412922700166854767881739,
        ],
        [
            -0.02865543043892472663389773,
            0.001285391450159137728990004,
            -0.03535260532348022427486884,
        ],
    ];
    assert_close(&semispray(&m, &GENERIC).unwrap(), &g, 1e-14);
    assert_close(&nonlinear_connection(&m, &GENERIC).unwrap().n, &n, 1e-13);
}

#[test]
fn cartan_coefficients_at_generic_point() {
    let l: Tensor3 = [
        [
            [
                -0.1241327604373396166106737,
                0.07655984317586090135092691,
                0.01574436312779475372086697,
            ],
            [
                0.07655984317586090135092691,
                0.1642999712396996219263122,
                0.03086276310823665136781741,
            ],
            [
                0.01574436312779475372086697,
                0.03086276310823665136781741,
                0.1229736869320195587655141,
            ],
        ],
        [
            [
                -0.1411450976082498673091432,
                -0.1411023155030034849384918,
                -0.03194335081142357613035954,
            ],
            [
                -0.1411023155030034849384918,
                0.04816068901178253702477366,
                -0.0005906412579545457601895640,
            ],
            [
                -0.03194335081142357613035954,
                -0.0005906412579545457601895640,
                -0.05271108039380324834767527,
            ],
        ],
        [
            [
                -0.05224359171668517556569792,
                -0.01261839268229735228476663,
                -0.1172068661248825426204139,
            ],
            [
                -0.01261839268229735228476663,
                0.003889996881788864374218947,
                0.04904411161555017723883742,
            ],
            [
                -0.1172068661248825426204139,
                0.04904411161555017723883742,
                0.006208122644675977066097147,
            ],
        ],
    ];
    let c: Tensor3 = [
        [
            [
                1.126847769777474282022746,
                0.2094081574690806312836226,
                0.1396054383127204208557484,
            ],
            [
                0.2094081574690806312836226,
                0.1552615309535186601879589,
                -0.09915947653753774521883039,
            ],
            [
                0.1396054383127204208557484,
                -0.09915947653753774521883039,
                0.2378944280681334478703175,
            ],
        ],
        [
            [
                0.02968160624479346807449255,
                0.3948969325859015444667990,
                -0.09915947653753774521883039,
            ],
            [
                0.3948969325859015444667990,
                0.9319003693034512385835360,
                0.1974484662929507722333995,
            ],
            [
                -0.09915947653753774521883039,
                0.1974484662929507722333995,
                0.1784208210511000859027381,
            ],
        ],
        [
            [
                0.01978773749652897871632837,
                -0.09915947653753774521883039,
                0.4775298297005163321491576,
            ],
            [
                -0.09915947653753774521883039,
                0.07763076547675933009397943,
                0.3581473722753872491118682,
            ],
            [
                0.4775298297005163321491576,
                0.3581473722753872491118682,
                0.6625833614262748862302033,
            ],
        ],
    ];
    let got = cartan_closed_form(&mirage_cyl(), &GENERIC).unwrap();
    assert_close(&got.l, &l, 1e-12);
    assert_close(&got.c, &c, 1e-12);
}

#[test]
fn horizontal_torsion_at_generic_point() {
    let r: Tensor3 = [
        [
            [
                0.0,
                -0.01759390004893941218624325,
                0.001895880547631061570442163,
            ],
            [
                0.01759390004893941218624325,
                0.0,
                0.001459564580261897965736249,
            ],
            [
                -0.001895880547631061570442163,
                -0.001459564580261897965736249,
                0.0,
            ],
        ],
        [
            [
                0.0,
                0.02857437036099239588889874,
                0.002300268063418812188180239,
            ],
            [
                -0.02857437036099239588889874,
                0.0,
                -0.006301351298650140712660466,
            ],
            [
                -0.002300268063418812188180239,
                0.006301351298650140712660466,
                0.0,
            ],
        ],
        [
            [
                0.0,
                0.0008407034831569142224439899,
                0.01025558453929015610015844,
            ],
            [
                -0.0008407034831569142224439899,
                0.0,
                0.01539897912132844643835024,
            ],
            [
                -0.01025558453929015610015844,
                -0.01539897912132844643835024,
                0.0,
            ],
        ],
    ];
    let t = torsions(&mirage_cyl(), &GENERIC).unwrap();
    assert_close(&t.r, &r, 1e-8);
}

#[test]
fn helix_angular_speeds_at_radius_four() {
    let mut got: Vec<f64> = helix_omegas(&mirage_cyl(), 4.0)
        .unwrap()
        .iter()
        .map(|h| h.omega0)
        .collect();
    got.sort_by(f64::total_cmp);
    let want = [
        -0.4454447610263705319633966514,
        -0.2824430722172093767058008409,
        0.2824430722172093767058008409,
        0.4454447610263705319633966514,
    ];
    assert_eq!(got.len(), want.len(), "{got:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{g} vs {w}");
    }
}

#[test]
fn circle_radii_of_reference_mirage() {
    let want = [3.703056248366226029363173225, 5.851571610853463636054791307];
    for sym in [Symmetry::Cylindrical, Symmetry::Spherical] {
        let m = RefractiveProfile::gaussian_mirage(1.0, 2.5, sym).unwrap();
        let mut got: Vec<f64> = circle_radii(&m, (0.1, 10.0))
            .unwrap()
            .iter()
            .map(|c| c.radius)
            .collect();
        got.sort_by(f64::total_cmp);
        got.dedup();
        assert_eq!(got.len(), 2, "{got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-11, "{g} vs {w}");
        }
    }
}

#[test]
fn radial_drift_at_seven() {
    let got = incompatibility_probe(&mirage_cyl(), 7.0).unwrap().unwrap();
    assert!((got - 8.216548342878948852471690536).abs() < 1e-10, "{got}");
}

#[test]
fn uniform_straight_line() {
    let u = RefractiveProfile::uniform(1.5).unwrap();
    let cfg = IntegratorConfig::over(0.0, 10.0);
    let traj = integrate(&u, [0.0; 3], [1.0, 2.0, 3.0], &cfg).unwrap();
    let end = traj.last().unwrap();
    assert!((end.t - 10.0).abs() < 1e-12);
    assert!(end.x.max_abs_diff(&[10.0, 20.0, 30.0]) < 1e-9);
}

#[test]
fn helix_residual_and_its_sensitivity() {
    let m = mirage_cyl();
    let helix = helix_omegas(&m, 4.0).unwrap().remove(0);
    let exact = Family::Helix(helix.clone());
    let mut off = helix;
    off.omega0 *= 1.0 + 1e-3;
    let off = Family::Helix(off);
    let worst = |fam: &Family| {
        (0..100)
            .map(|i| {
                let t = 0.37 * i as f64;
                norm(&el_residual(&m, |t| fam.state(t).unwrap(), t).unwrap())
            })
            .fold(0.0, f64::max)
    };
    assert!(worst(&exact) < 1e-10);
    assert!(worst(&off) > 1e-5);
}
