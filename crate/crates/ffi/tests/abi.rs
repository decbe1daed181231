use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use lagrange_optics_ffi::*;

fn mirage() -> *mut LoProfile {
    let mut p = ptr::null_mut();
    let s = unsafe { lo_profile_gaussian_mirage(1.0, 2.5, LoSymmetry::Cylindrical, &mut p) };
    assert_eq!(s, LoStatus::Ok);
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lo_last_error()) }
        .to_string_lossy()
        .into_owned()
}

const POINT: [f64; 6] = [3.0, 0.0, 0.0, 0.4, 0.3, 0.2];

#[test]
fn acceleration_is_minus_twice_semispray() {
    let p = mirage();
    let (mut g, mut a) = ([0.0; 3], [0.0; 3]);
    unsafe {
        assert_eq!(
            lo_semispray(p, POINT.as_ptr(), g.as_mut_ptr()),
            LoStatus::Ok
        );
        assert_eq!(
            lo_motion_rhs(p, POINT.as_ptr(), POINT[3..].as_ptr(), a.as_mut_ptr()),
            LoStatus::Ok
        );
        lo_profile_free(p);
    }
    for i in 0..3 {
        assert!((a[i] + 2.0 * g[i]).abs() < 1e-15);
    }
}

#[test]
fn connection_matches_core() {
    let p = mirage();
    let mut n = [0.0; 9];
    let (mut l, mut c) = ([0.0; 27], [0.0; 27]);
    let (mut r, mut pt, mut ct) = ([0.0; 27], [0.0; 27], [0.0; 27]);
    let (mut r4, mut p4, mut s4) = ([0.0; 81], [0.0; 81], [0.0; 81]);
    let (mut h, mut v) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            lo_nonlinear_connection(p, POINT.as_ptr(), n.as_mut_ptr()),
            LoStatus::Ok
        );
        assert_eq!(
            lo_cartan(p, POINT.as_ptr(), l.as_mut_ptr(), c.as_mut_ptr()),
            LoStatus::Ok
        );
        assert_eq!(
            lo_torsions(
                p,
                POINT.as_ptr(),
                r.as_mut_ptr(),
                pt.as_mut_ptr(),
                ct.as_mut_ptr()
            ),
            LoStatus::Ok
        );
        assert_eq!(
            lo_curvatures(
                p,
                POINT.as_ptr(),
                r4.as_mut_ptr(),
                p4.as_mut_ptr(),
                s4.as_mut_ptr()
            ),
            LoStatus::Ok
        );
        assert_eq!(
            lo_metricity(p, POINT.as_ptr(), &mut h, &mut v),
            LoStatus::Ok
        );
        lo_profile_free(p);
    }
    // N^2_1 from an independent symbolic evaluation.
    assert!((n[3] - -0.047_326_923_354_066_71).abs() < 1e-13);
    assert_eq!(c, ct);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(r[9 * i + 3 * j + k], -r[9 * i + 3 * k + j]);
            }
        }
    }
    assert!(h < 1e-5 && v < 1e-5);
    assert!(s4.iter().any(|x| x.abs() > 1e-6));
}

#[test]
fn profile_from_json_and_errors() {
    let mut p = ptr::null_mut();
    let json = CString::new(r#"{"kind": "uniform", "n0": 1.5}"#).unwrap();
    unsafe {
        assert_eq!(lo_profile_from_json(json.as_ptr(), &mut p), LoStatus::Ok);
        let mut gamma = 0.0;
        assert_eq!(
            lo_gamma(p, [1.0, 2.0, 3.0].as_ptr(), &mut gamma),
            LoStatus::Ok
        );
        assert!((gamma - 1.25f64.sqrt()).abs() < 1e-15);
        assert!(last_error().is_empty());
        let mut e = 0.0;
        assert_eq!(lo_energy(p, ptr::null(), &mut e), LoStatus::NullPointer);
        assert!(!last_error().is_empty());
        lo_profile_free(p);

        let bad = CString::new(r#"{"kind": "uniform", "n0": -1}"#).unwrap();
        assert_eq!(
            lo_profile_from_json(bad.as_ptr(), &mut p),
            LoStatus::InvalidArgument
        );
        let garbage = CString::new("{").unwrap();
        assert_eq!(
            lo_profile_from_json(garbage.as_ptr(), &mut p),
            LoStatus::InvalidArgument
        );
        assert_eq!(
            lo_profile_uniform(1.5, ptr::null_mut()),
            LoStatus::NullPointer
        );
    }
}

#[test]
fn solve_reports_unsupported_and_empty() {
    let mut u = ptr::null_mut();
    let mut out = ptr::null_mut();
    let helix = CString::new("helix").unwrap();
    unsafe {
        assert_eq!(lo_profile_uniform(1.5, &mut u), LoStatus::Ok);
        assert_eq!(
            lo_solve_json(u, helix.as_ptr(), 1.0, 0.1, 10.0, &mut out),
            LoStatus::Unsupported
        );
        assert!(out.is_null());
        lo_profile_free(u);

        let p = mirage();
        assert_eq!(
            lo_solve_json(p, helix.as_ptr(), 4.0, 0.0, 0.0, &mut out),
            LoStatus::Ok
        );
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        lo_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 4);
        let nope = CString::new("spiral").unwrap();
        assert_eq!(
            lo_solve_json(p, nope.as_ptr(), 4.0, 0.0, 0.0, &mut out),
            LoStatus::InvalidArgument
        );
        lo_profile_free(p);
    }
}

#[test]
fn integration_and_sample_access() {
    let p = mirage();
    let mut cfg = lo_integrator_config_default();
    cfg.t_end = 1.0;
    let mut t = ptr::null_mut();
    let mut row = [0.0; 8];
    unsafe {
        assert_eq!(
            lo_integrate(
                p,
                [3.0, 0.0, 0.0].as_ptr(),
                [0.0, 1.0, 0.0].as_ptr(),
                &cfg,
                &mut t
            ),
            LoStatus::Ok
        );
        assert_eq!(lo_trajectory_len(t), 11);
        assert_eq!(lo_trajectory_sample(t, 10, row.as_mut_ptr()), LoStatus::Ok);
        assert_eq!(row[0], 1.0);
        assert_eq!(
            lo_trajectory_sample(t, 11, row.as_mut_ptr()),
            LoStatus::InvalidArgument
        );
        lo_trajectory_free(t);

        cfg.t_end = 0.0;
        assert_eq!(
            lo_integrate(
                p,
                [3.0, 0.0, 0.0].as_ptr(),
                [0.0, 1.0, 0.0].as_ptr(),
                &cfg,
                &mut t
            ),
            LoStatus::InvalidArgument
        );
        assert!(t.is_null());
        lo_profile_free(p);
    }
}

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/abi-<hash> -> target/<profile>/liblagrange_optics_ffi.a
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("liblagrange_optics_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_header() {
    let Some(lib) = static_lib() else {
        eprintln!("static library not built; skipping");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
