//! Exercises the C ABI through the exported symbols, the way a foreign
//! binding would call them.

use std::ffi::{c_char, CString};
use std::io::Write;

use hallmhd_ffi::*;

fn write_config(dir: &std::path::Path, n: usize, dt: f64) -> CString {
    let path = dir.join("run.conf");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(
        f,
        "schema = hallmhd-config/1\nkind = solver\nnu = 0.1\nmu = 0.1\neta = 0.01\n\
         alpha = 1.0\ns = 2.0\nn = {n}\ndt = {dt}\nt_end = 0.05\nseed = 3\n\
         initial = taylor_green\n"
    )
    .unwrap();
    CString::new(path.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0u8; 512];
    let len = unsafe { hmhd_last_error_message(buf.as_mut_ptr() as *mut c_char, buf.len()) };
    buf.truncate(len.min(511));
    String::from_utf8_lossy(&buf).into_owned()
}

#[test]
fn solver_lifecycle_and_queries() {
    let dir = tempdir("lifecycle");
    let config = write_config(&dir, 16, 2e-3);
    let mut handle: *mut HmhdSolver = std::ptr::null_mut();
    let status = unsafe { hmhd_solver_new(config.as_ptr(), &mut handle) };
    assert!(status == HmhdStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());

    unsafe {
        assert_eq!(hmhd_solver_time(handle), 0.0);
        let mut e_u = 0.0;
        let mut e_b = 0.0;
        assert!(hmhd_solver_energy(handle, &mut e_u, &mut e_b) == HmhdStatus::Ok);
        assert!(e_u > 0.0 && e_b > 0.0);
        let e0 = e_u + e_b;

        assert!(
            hmhd_solver_step(handle, 5) == HmhdStatus::Ok,
            "{}",
            last_error()
        );
        assert!((hmhd_solver_time(handle) - 0.01).abs() < 1e-12);
        assert!(hmhd_solver_energy(handle, &mut e_u, &mut e_b) == HmhdStatus::Ok);
        assert!(e_u + e_b < e0, "energy should decay");

        let mut norm_u = 0.0;
        let mut norm_b = 0.0;
        assert!(hmhd_solver_sobolev_norm(handle, 2.0, &mut norm_u, &mut norm_b) == HmhdStatus::Ok);
        assert!(norm_u > 0.0 && norm_b > 0.0);

        let shells = hmhd_solver_shell_count(handle);
        assert_eq!(shells, 3); // q = -1, 0, 1 at N = 16
        let mut spec_u = vec![0.0; shells];
        let mut spec_b = vec![0.0; shells];
        assert!(
            hmhd_solver_shell_spectrum(
                handle,
                2.0,
                spec_u.as_mut_ptr(),
                spec_b.as_mut_ptr(),
                shells
            ) == HmhdStatus::Ok
        );
        let total: f64 = spec_u.iter().chain(&spec_b).sum();
        assert!(
            (total - (norm_u * norm_u + norm_b * norm_b)).abs() <= 1e-12 * total,
            "spectrum sums to the squared norms"
        );

        // spectrum with a too-short buffer is rejected
        assert!(
            hmhd_solver_shell_spectrum(handle, 2.0, spec_u.as_mut_ptr(), spec_b.as_mut_ptr(), 1)
                == HmhdStatus::InvalidArgument
        );

        let snap_path = CString::new(dir.join("out.snap").to_str().unwrap()).unwrap();
        assert!(hmhd_solver_write_snapshot(handle, snap_path.as_ptr()) == HmhdStatus::Ok);
        assert!(dir.join("out.snap").exists());

        hmhd_solver_free(handle);
    }
}

#[test]
fn error_paths_and_status_codes() {
    let missing = CString::new("/nonexistent/run.conf").unwrap();
    let mut handle: *mut HmhdSolver = std::ptr::null_mut();
    let status = unsafe { hmhd_solver_new(missing.as_ptr(), &mut handle) };
    assert!(status == HmhdStatus::ConfigError);
    assert!(handle.is_null());
    assert!(
        last_error().contains("cannot read file"),
        "{}",
        last_error()
    );

    unsafe {
        assert!(hmhd_solver_new(std::ptr::null(), &mut handle) == HmhdStatus::InvalidArgument);
        assert!(hmhd_solver_step(std::ptr::null_mut(), 1) == HmhdStatus::InvalidArgument);
        assert!(hmhd_solver_time(std::ptr::null()).is_nan());
        assert_eq!(hmhd_solver_shell_count(std::ptr::null()), 0);
        hmhd_solver_free(std::ptr::null_mut()); // no-op
    }

    // CFL violation surfaces as a numerical fault with a suggestion.
    let dir = tempdir("cfl");
    let config = write_config(&dir, 16, 10.0);
    let status = unsafe { hmhd_solver_new(config.as_ptr(), &mut handle) };
    assert!(status == HmhdStatus::Ok, "{}", last_error());
    let status = unsafe { hmhd_solver_step(handle, 1) };
    assert!(status == HmhdStatus::NumericalFault);
    assert!(last_error().contains("CFL"), "{}", last_error());
    unsafe { hmhd_solver_free(handle) };
}

#[test]
fn version_and_header_exist() {
    let version = unsafe { std::ffi::CStr::from_ptr(hmhd_version()) };
    assert!(!version.to_str().unwrap().is_empty());

    // The build script regenerates the C header next to this crate.
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hallmhd.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    for symbol in [
        "hmhd_solver_new",
        "hmhd_solver_step",
        "hmhd_solver_energy",
        "hmhd_solver_shell_spectrum",
        "hmhd_last_error_message",
        "HmhdStatus",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
}

fn tempdir(label: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hallmhd-ffi-{label}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
