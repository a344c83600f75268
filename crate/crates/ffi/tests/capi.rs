use std::ffi::{CStr, CString};
use std::ptr;

use spdetect_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(spd_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn identity_statistics() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(spd_matrix_identity(6, &mut m), SpdStatus::Ok);
        assert_eq!(spd_matrix_dim(m), 6);
        let mut v = SpdStatValue {
            value: 0.0,
            lower_cert: 0.0,
            upper_cert: 0.0,
            z_star: 0.0,
            iterations: 0,
        };
        assert_eq!(spd_mdp(m, 2, 64, &mut v), SpdStatus::Ok);
        assert!((v.value - 1.0).abs() < 1e-12);
        let mut support = [usize::MAX; 2];
        assert_eq!(spd_lambda_k(m, 2, 1000, &mut v, support.as_mut_ptr()), SpdStatus::Ok);
        assert!((v.value - 1.0).abs() < 1e-12);
        assert!(support.iter().all(|&i| i < 6));
        assert_eq!(spd_sdp(m, 2, 1e-4, 400, 25, SpdStepRule::Backtracking, &mut v), SpdStatus::Ok);
        assert!(v.lower_cert <= 1.0 + 1e-9 && v.upper_cert >= 1.0 - 1e-9);
        assert_eq!(spd_diag(m, &mut v), SpdStatus::Ok);
        assert_eq!(v.value, 1.0);
        assert!(v.z_star.is_nan());
        spd_matrix_free(m);
    }
}

#[test]
fn dense_round_trip_and_errors() {
    unsafe {
        let vals = [2.0, 0.5, 0.5, 1.0];
        let mut m = ptr::null_mut();
        assert_eq!(spd_matrix_from_dense(2, vals.as_ptr(), &mut m), SpdStatus::Ok);
        let mut x = 0.0;
        assert_eq!(spd_matrix_get(m, 0, 1, &mut x), SpdStatus::Ok);
        assert_eq!(x, 0.5);
        assert_eq!(spd_matrix_get(m, 2, 0, &mut x), SpdStatus::Dimension);
        assert!(!last_error().is_empty());
        let mut top = 0.0;
        assert_eq!(spd_largest_eigenvalue(m, 1e-12, &mut top), SpdStatus::Ok);
        assert!((top - (1.5 + 0.5f64.sqrt())).abs() < 1e-10);
        assert_eq!(last_error(), "");
        spd_matrix_free(m);

        let bad = [1.0, 0.3, 0.2, 1.0];
        let mut m = ptr::null_mut();
        assert_eq!(spd_matrix_from_dense(2, bad.as_ptr(), &mut m), SpdStatus::InvalidArgument);
        assert!(m.is_null());
        assert_eq!(spd_matrix_identity(2, ptr::null_mut()), SpdStatus::NullPointer);
        spd_matrix_free(ptr::null_mut());
    }
}

#[test]
fn samplers_and_covariance() {
    unsafe {
        let spec = CString::new("spiked:p=5,n=40,k=2,theta=1").unwrap();
        let mut d = ptr::null_mut();
        assert_eq!(spd_sample_model(spec.as_ptr(), 3, &mut d), SpdStatus::Ok);
        let (mut n, mut p) = (0, 0);
        assert_eq!(spd_data_shape(d, &mut n, &mut p), SpdStatus::Ok);
        assert_eq!((n, p), (40, 5));
        let mut buf = vec![0.0; n * p];
        assert_eq!(spd_data_copy(d, buf.as_mut_ptr(), buf.len()), SpdStatus::Ok);
        assert_eq!(spd_data_copy(d, buf.as_mut_ptr(), 3), SpdStatus::Dimension);

        let mut own = ptr::null_mut();
        assert_eq!(spd_data_new(n, p, buf.as_ptr(), &mut own), SpdStatus::Ok);
        let (mut a, mut b, mut c) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(spd_covariance(d, &mut a), SpdStatus::Ok);
        assert_eq!(spd_covariance(own, &mut b), SpdStatus::Ok);
        assert_eq!(spd_model_covariance(spec.as_ptr(), 3, &mut c), SpdStatus::Ok);
        for i in 0..p {
            for j in 0..p {
                let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
                spd_matrix_get(a, i, j, &mut x);
                spd_matrix_get(b, i, j, &mut y);
                spd_matrix_get(c, i, j, &mut z);
                assert_eq!(x, y);
                assert_eq!(x, z);
            }
        }
        for h in [a, b, c] {
            spd_matrix_free(h);
        }
        spd_data_free(d);
        spd_data_free(own);

        let bad = CString::new("spiked:p=5").unwrap();
        assert_eq!(spd_sample_model(bad.as_ptr(), 0, &mut d), SpdStatus::InvalidArgument);
    }
}

#[test]
fn thresholds_and_nonconvergence() {
    unsafe {
        let mut t = SpdThresholds {
            tau0: 0.0,
            tau1: 0.0,
            theta_bar: 0.0,
            feasible: false,
        };
        assert_eq!(spd_thresholds(50, 100, 5, 0.05, 1.0, SpdStatKind::Mdp, &mut t), SpdStatus::Ok);
        assert!(t.tau0 > 1.0 && t.theta_bar > 0.0);
        assert_eq!(
            spd_thresholds(50, 100, 51, 0.05, 1.0, SpdStatKind::Mdp, &mut t),
            SpdStatus::InvalidArgument
        );

        let mut m = ptr::null_mut();
        spd_matrix_identity(30, &mut m);
        let mut v = SpdStatValue {
            value: 0.0,
            lower_cert: 0.0,
            upper_cert: 0.0,
            z_star: 0.0,
            iterations: 0,
        };
        let s = spd_sdp(m, 3, 1e-14, 1, 1, SpdStepRule::Fixed, &mut v);
        assert_eq!(s, SpdStatus::NotConverged);
        assert!(v.lower_cert <= v.upper_cert);
        spd_matrix_free(m);
    }
}

#[test]
fn header_lists_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/spdetect.h")).unwrap();
    for name in [
        "spd_last_error",
        "spd_matrix_from_dense",
        "spd_covariance",
        "spd_lambda_k",
        "spd_mdp",
        "spd_sdp",
        "spd_diag",
        "spd_thresholds",
        "spd_sample_model",
        "SPD_STATUS_NOT_CONVERGED",
        "typedef struct SpdMatrix SpdMatrix",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let v = unsafe { CStr::from_ptr(spd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
