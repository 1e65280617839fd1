use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qbm_ffi::*;

fn natural(t: f64) -> QbmThermal {
    qbm_thermal_natural(t)
}

fn drude(gamma: f64, cutoff: f64) -> *mut QbmOscillator {
    let mut osc = ptr::null_mut();
    assert_eq!(unsafe { qbm_oscillator_new(1.0, 1.0, QbmDampingKind::Drude, gamma, cutoff, &mut osc) }, QbmStatus::Ok);
    osc
}

fn last_error() -> Option<String> {
    let p = qbm_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn moments_match_library() {
    let osc = drude(0.5, 20.0);
    let (mut q2, mut p2) = (0.0, 0.0);
    assert_eq!(unsafe { qbm_second_moments(osc, natural(1.0), &mut q2, &mut p2) }, QbmStatus::Ok);
    let spec = qbm::oscillator::OscillatorSpec::new(1.0, 1.0).unwrap();
    let damp = qbm::DampingModel::drude(0.5, 20.0).unwrap();
    let m = qbm::oscillator::second_moments(&spec, &damp, &qbm::ThermalParams::new(1.0).unwrap(), None).unwrap();
    assert_eq!((q2, p2), (m.q2, m.p2));
    assert!(last_error().is_none());
    unsafe { qbm_oscillator_free(osc) };
}

#[test]
fn error_codes_and_messages() {
    let mut osc = ptr::null_mut();
    let s = unsafe { qbm_oscillator_new(1.0, -2.0, QbmDampingKind::Ohmic, 0.1, 0.0, &mut osc) };
    assert_eq!(s, QbmStatus::InvalidArgument);
    assert!(osc.is_null());
    assert!(last_error().unwrap().contains("omega0"));

    let mut v = 0.0;
    assert_eq!(unsafe { qbm_ln_partition_function(ptr::null(), natural(1.0), &mut v) }, QbmStatus::NullPointer);

    // strictly ohmic friction has a divergent ⟨p²⟩
    let mut ohmic = ptr::null_mut();
    assert_eq!(unsafe { qbm_oscillator_new(1.0, 1.0, QbmDampingKind::Ohmic, 0.2, 0.0, &mut ohmic) }, QbmStatus::Ok);
    let (mut q2, mut p2) = (-1.0, -1.0);
    assert_eq!(unsafe { qbm_second_moments(ohmic, natural(1.0), &mut q2, &mut p2) }, QbmStatus::Divergent);
    assert_eq!((q2, p2), (-1.0, -1.0));

    let osc = drude(0.5, 1.0);
    let mut bath = ptr::null_mut();
    let s = unsafe { qbm_bath_discretize(osc, 20, QbmGridKind::Linear, 0.5, &mut bath) };
    assert_eq!(s, QbmStatus::InsufficientCoverage);
    unsafe {
        qbm_oscillator_free(osc);
        qbm_oscillator_free(ohmic);
        qbm_oscillator_free(ptr::null_mut());
    }
}

#[test]
fn bath_and_hamiltonian_round_trip() {
    let osc = drude(0.3, 10.0);
    let mut bath = ptr::null_mut();
    assert_eq!(unsafe { qbm_bath_discretize(osc, 300, QbmGridKind::Tangent, 0.0, &mut bath) }, QbmStatus::Ok);
    assert_eq!(unsafe { qbm_bath_len(bath) }, 300);
    let (mut m, mut w, mut c) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { qbm_bath_get(bath, 0, &mut m, &mut w, &mut c) }, QbmStatus::Ok);
    assert!(m == 1.0 && w > 0.0 && c > 0.0);
    assert_eq!(unsafe { qbm_bath_get(bath, 300, &mut m, &mut w, &mut c) }, QbmStatus::InvalidArgument);

    let mut h = ptr::null_mut();
    assert_eq!(unsafe { qbm_hamiltonian_new(osc, bath, &mut h) }, QbmStatus::Ok);
    let times = [0.0, 0.5, 1.0];
    let mut vals = [0.0; 3];
    assert_eq!(unsafe { qbm_hamiltonian_correlation(h, natural(0.5), times.as_ptr(), 3, vals.as_mut_ptr()) }, QbmStatus::Ok);
    let (mut q2, mut p2) = (0.0, 0.0);
    assert_eq!(unsafe { qbm_hamiltonian_moments(h, natural(0.5), &mut q2, &mut p2) }, QbmStatus::Ok);
    assert!((vals[0] - q2).abs() < 1e-12 * q2);
    let mut s = 0.0;
    assert_eq!(unsafe { qbm_position_correlation(osc, natural(0.5), 0.0, &mut s) }, QbmStatus::Ok);
    assert!((s - q2).abs() < 1e-4 * q2, "{s} vs {q2}");
    unsafe {
        qbm_hamiltonian_free(h);
        qbm_bath_free(bath);
        qbm_oscillator_free(osc);
    }
}

#[test]
fn crossover_undamped() {
    let mut osc = ptr::null_mut();
    assert_eq!(unsafe { qbm_oscillator_new(1.0, 1.0, QbmDampingKind::Ohmic, 0.0, 0.0, &mut osc) }, QbmStatus::Ok);
    let mut t0 = 0.0;
    assert_eq!(unsafe { qbm_crossover_temperature(osc, 1.0, 1.0, 1.0, &mut t0) }, QbmStatus::Ok);
    assert!((t0 - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    unsafe { qbm_oscillator_free(osc) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qbm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn static_lib() -> Option<PathBuf> {
    let deps = std::env::current_exe().ok()?.parent()?.to_path_buf();
    let lib = deps.parent()?.join("libqbm_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_header() {
    let Some(lib) = static_lib() else {
        eprintln!("static library not built yet; skipping C link test");
        return;
    };
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let built = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status();
    let Ok(built) = built else {
        eprintln!("no C compiler; skipping C link test");
        return;
    };
    assert!(built.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.trim_end().ends_with(" 400"), "{text}");
}
