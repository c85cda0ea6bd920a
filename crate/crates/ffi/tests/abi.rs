use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use nodal_shoot_ffi::*;

fn a1() -> *mut NsProblem {
    let mut p = ptr::null_mut();
    let s = unsafe { ns_problem_new_model(4, 1, 1, std::f64::consts::FRAC_PI_2, 4.0, 3.0, &mut p) };
    assert_eq!(s, NsStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let m = ns_last_error_message();
    assert!(!m.is_null());
    unsafe { CStr::from_ptr(m) }.to_string_lossy().into_owned()
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ns_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_spec_reports_constraint() {
    let mut p = ptr::null_mut();
    let s = unsafe { ns_problem_new_model(4, 3, 1, 1.0, 4.0, 3.0, &mut p) };
    assert_eq!(s, NsStatus::InvalidInput);
    assert!(p.is_null());
    assert!(last_error().contains("0 <= m1 <= n-2"));
}

#[test]
fn null_arguments() {
    unsafe {
        assert_eq!(ns_problem_new_model(4, 1, 1, 1.0, 4.0, 3.0, ptr::null_mut()), NsStatus::NullPointer);
        let mut t0 = 0.0;
        assert_eq!(ns_problem_t0(ptr::null(), &mut t0), NsStatus::NullPointer);
        assert!(ns_solution_alpha(ptr::null()).is_nan());
        assert_eq!(ns_solution_grid_len(ptr::null()), 0);
        ns_problem_free(ptr::null_mut());
        ns_solution_free(ptr::null_mut());
    }
}

#[test]
fn shoot_anchor_and_t0() {
    let p = a1();
    unsafe {
        let mut t0 = 0.0;
        assert_eq!(ns_problem_t0(p, &mut t0), NsStatus::Ok);
        assert!((t0 - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
        let (mut u, mut up, mut z) = (0.0, 0.0, 7usize);
        assert_eq!(ns_shoot(p, NsSide::Left, 1.0, &mut u, &mut up, &mut z), NsStatus::Ok);
        assert!((u - 1.0).abs() < 1e-9 && up.abs() < 1e-9 && z == 0);
        assert_eq!(ns_shoot(p, NsSide::Right, 2.0, ptr::null_mut(), &mut up, ptr::null_mut()), NsStatus::Ok);
        assert!(up > 0.0);
        ns_problem_free(p);
    }
}

#[test]
fn exponent_gate() {
    let mut pg = 0.0;
    let s = unsafe { ns_check_exponent(4, 1, 1, 5.0, &mut pg) };
    assert_eq!(s, NsStatus::ExponentPrecondition);
    assert_eq!(pg, 5.0);
    assert_eq!(unsafe { ns_check_exponent(4, 1, 1, 3.0, ptr::null_mut()) }, NsStatus::Ok);

    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(ns_problem_new_model(4, 1, 1, 1.0, 4.0, 5.0, &mut p), NsStatus::Ok);
        let mut sol = ptr::null_mut();
        assert_eq!(ns_find_nodal(p, 1, &mut sol), NsStatus::ExponentPrecondition);
        assert!(sol.is_null());
        assert!(last_error().contains("p_G = 5"));
        ns_problem_free(p);
    }
}

#[test]
fn find_antisymmetric_solution() {
    let p = a1();
    unsafe {
        let mut sol = ptr::null_mut();
        assert_eq!(ns_find_nodal(p, 1, &mut sol), NsStatus::Ok);
        let (a, b) = (ns_solution_alpha(sol), ns_solution_beta(sol));
        assert!((a + b).abs() <= 1e-6 * a.abs());
        assert!(ns_solution_passed(sol));
        assert_eq!(ns_solution_zero_count(sol), 1);
        assert!(ns_solution_residual(sol) < 1e-6);

        let mut len = 0;
        assert_eq!(ns_solution_zeros(sol, ptr::null_mut(), 0, &mut len), NsStatus::Ok);
        assert_eq!(len, 1);
        let mut z = [0.0];
        assert_eq!(ns_solution_zeros(sol, z.as_mut_ptr(), 1, &mut len), NsStatus::Ok);
        assert!((z[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-8);

        let n = ns_solution_grid_len(sol);
        let (mut t, mut u, mut up) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        assert_eq!(
            ns_solution_grid(sol, t.as_mut_ptr(), u.as_mut_ptr(), up.as_mut_ptr(), n - 1),
            NsStatus::InvalidInput
        );
        assert_eq!(
            ns_solution_grid(sol, t.as_mut_ptr(), u.as_mut_ptr(), up.as_mut_ptr(), n),
            NsStatus::Ok
        );
        assert_eq!(t[0], 0.0);
        assert_eq!(u[0], a);
        ns_solution_free(sol);
        ns_problem_free(p);
    }
}

#[test]
fn custom_profile_and_tolerances() {
    let expr = CString::new("2*cot(t) - 2*tan(t)").unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        let s = ns_problem_new_custom(4, 1, 1, std::f64::consts::FRAC_PI_2, expr.as_ptr(), 4.0, 3.0, &mut p);
        assert_eq!(s, NsStatus::Ok);
        assert_eq!(ns_problem_set_tolerances(p, -1.0, 1e-10), NsStatus::InvalidInput);
        assert_eq!(ns_problem_set_tolerances(p, 1e-11, 1e-11), NsStatus::Ok);
        let mut t0 = 0.0;
        assert_eq!(ns_problem_t0(p, &mut t0), NsStatus::Ok);
        assert!((t0 - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
        ns_problem_free(p);

        let bad = CString::new("2*cot(t").unwrap();
        let s = ns_problem_new_custom(4, 1, 1, 1.0, bad.as_ptr(), 4.0, 3.0, &mut p);
        assert_eq!(s, NsStatus::InvalidInput);
    }
}

#[test]
fn header_declares_api() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/nodal_shoot.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "typedef struct NsProblem NsProblem;",
        "typedef struct NsSolution NsSolution;",
        "NS_STATUS_EXPONENT_PRECONDITION = 5",
        "ns_find_nodal(",
        "ns_solution_grid(",
        "ns_last_error_message(",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Compiles `tests/c/smoke.c` against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Ok(exe) = std::env::current_exe() else { return };
    let Some(profile_dir) = exe.parent().and_then(|p| p.parent()) else { return };
    let lib = profile_dir.join("libnodal_shoot_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler unavailable");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile_dir();
    let bin = dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "smoke program failed: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("zeros=2"));
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nodal-shoot-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
