use std::ffi::{CStr, CString};
use std::ptr;

use sp2geo_ffi::*;

fn last_error() -> String {
    let p = sp2_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn point_round_trip_and_projections() {
    let coeffs = [0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.9, 0.0, -0.6];
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(sp2_point_exp(coeffs.as_ptr(), &mut p), Sp2Status::Ok);
        let mut reals = [0.0; 16];
        assert_eq!(sp2_point_to_reals(p, reals.as_mut_ptr()), Sp2Status::Ok);
        let mut q = ptr::null_mut();
        assert_eq!(sp2_point_from_reals(reals.as_ptr(), &mut q), Sp2Status::Ok);
        let (mut s7, mut s4) = ([0.0; 8], [0.0; 5]);
        assert_eq!(sp2_project_s7(q, s7.as_mut_ptr()), Sp2Status::Ok);
        assert_eq!(sp2_project_s4(q, s4.as_mut_ptr()), Sp2Status::Ok);
        assert_eq!(s7, reals[4..8].iter().chain(&reals[12..16]).copied().collect::<Vec<_>>()[..]);
        assert!((s4.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        sp2_point_free(p);
        sp2_point_free(q);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        assert_eq!(sp2_point_identity(ptr::null_mut()), Sp2Status::NullPointer);
        assert!(last_error().contains("null"));
        let mut id = ptr::null_mut();
        sp2_point_identity(&mut id);
        let mu = [1.0; 3];
        let mut t = ptr::null_mut();
        let s = sp2_geodesic(id, true, mu.as_ptr(), 3, Sp2Kind::SubRiemannian, 1e-2, 1.0, &mut t);
        assert_eq!(s, Sp2Status::InvalidArgument);
        assert!(last_error().contains("expected 10"));
        assert!(t.is_null());
        let mu = [0.0; 7];
        let s = sp2_geodesic(id, false, mu.as_ptr(), 7, Sp2Kind::DistributionK, 1e-2, 1.0, &mut t);
        assert_eq!(s, Sp2Status::InvalidArgument);
        let s = sp2_geodesic(id, false, mu.as_ptr(), 7, Sp2Kind::Riemannian, 2.0, 1.0, &mut t);
        assert_eq!(s, Sp2Status::InvalidArgument);
        sp2_point_free(id);
        sp2_point_free(ptr::null_mut());
        sp2_trace_free(ptr::null_mut());
        sp2_string_free(ptr::null_mut());
        assert_eq!(sp2_trace_len(ptr::null()), 0);
    }
}

#[test]
fn upstairs_trace_matches_csv() {
    unsafe {
        let mut id = ptr::null_mut();
        sp2_point_identity(&mut id);
        let mu = [0.4, 0.0, -1.0, 0.2, 0.3, 0.0, 0.1, 0.5, 0.0, 0.0];
        let mut t = ptr::null_mut();
        let s = sp2_geodesic(id, true, mu.as_ptr(), 10, Sp2Kind::SubRiemannian, 0.05, 1.0, &mut t);
        assert_eq!(s, Sp2Status::Ok);
        assert_eq!(sp2_trace_len(t), 21);
        assert_eq!(sp2_trace_point_dim(t), 16);
        let mut csv = ptr::null_mut();
        assert_eq!(sp2_trace_csv(t, &mut csv), Sp2Status::Ok);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        sp2_string_free(csv);
        let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        let (mut time, mut point, mut energy) = (0.0, [0.0; 16], 0.0);
        assert_eq!(sp2_trace_sample(t, 20, &mut time, point.as_mut_ptr(), &mut energy), Sp2Status::Ok);
        assert_eq!(last[0], time);
        assert_eq!(&last[1..17], &point[..]);
        assert_eq!(*last.last().unwrap(), energy);
        let (mut e, mut c) = (f64::NAN, f64::NAN);
        assert_eq!(sp2_trace_drift(t, &mut e, &mut c), Sp2Status::Ok);
        assert!(e < 1e-9 && c < 1e-9);
        sp2_trace_free(t);
        sp2_point_free(id);
    }
}

#[test]
fn verify_reports_json() {
    let (suite, bundle) = (CString::new("bilinear").unwrap(), CString::new("gromoll-meyer").unwrap());
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(sp2_verify(suite.as_ptr(), bundle.as_ptr(), 0, 3, &mut json), Sp2Status::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        sp2_string_free(json);
        assert!(text.contains("\"m-dependent\": true"));
        let nope = CString::new("nope").unwrap();
        assert_eq!(sp2_verify(nope.as_ptr(), bundle.as_ptr(), 0, 3, &mut json), Sp2Status::InvalidArgument);
        assert_eq!(sp2_verify(suite.as_ptr(), nope.as_ptr(), 0, 3, &mut json), Sp2Status::InvalidArgument);
    }
}
