use std::ffi::{CStr, CString};
use std::ptr;

use quatsurf_ffi::*;

const CYLINDER: &str = r#"{
  "surface": {"type": "cylinder", "grid": {"x_min": -0.5, "x_max": 0.5, "nx": 8, "ny": 12}},
  "pipeline": [{"op": "rho", "rho": [-1.5, 0.4], "section": {"source": "cylinder_oracle", "which": "one_plus"}}],
  "sweep": {"window": {"re_min": -4, "re_max": 0, "im_min": 0, "im_max": 0, "n_re": 3, "n_im": 1}}
}"#;

fn scene(json: &str) -> (*mut QsScene, QsStatus) {
    let text = CString::new(json).unwrap();
    let mut s = ptr::null_mut();
    let status = unsafe { qs_scene_from_json(text.as_ptr(), &mut s) };
    (s, status)
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { qs_string_free(s) };
    out
}

fn last_error() -> String {
    let p = qs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn scene_mesh_and_step_round_trip() {
    let (s, status) = scene(CYLINDER);
    assert_eq!(status, QsStatus::Ok);
    unsafe {
        assert_eq!(qs_scene_step_count(s), 1);
        let mut hash = ptr::null_mut();
        assert_eq!(qs_scene_config_hash(s, &mut hash), QsStatus::Ok);
        assert_eq!(take(hash).len(), 64);

        let mut mesh = ptr::null_mut();
        assert_eq!(qs_scene_surface_mesh(s, &mut mesh), QsStatus::Ok);
        assert_eq!(qs_mesh_vertex_count(mesh), 96);
        // Periodic in y: 7 × 12 quads.
        assert_eq!(qs_mesh_face_count(mesh), 84);
        let mut xyz = vec![0.0; 3 * 96];
        assert_eq!(qs_mesh_vertices(mesh, xyz.as_mut_ptr(), xyz.len()), QsStatus::Ok);
        // The cylinder has radius 1/2 about the real-part axis.
        for v in xyz.chunks(3) {
            assert!(((v[1] * v[1] + v[2] * v[2]).sqrt() - 0.5).abs() < 1e-12, "{v:?}");
        }
        let mut quads = vec![0usize; 4 * 84];
        assert_eq!(qs_mesh_faces(mesh, quads.as_mut_ptr(), quads.len()), QsStatus::Ok);
        assert!(quads.iter().all(|&i| i < 96));
        let mut obj = ptr::null_mut();
        assert_eq!(qs_mesh_to_obj(mesh, &mut obj), QsStatus::Ok);
        let (verts, faces) = quatsurf::io::parse_obj(&take(obj)).unwrap();
        assert_eq!(verts.len(), 96);
        assert_eq!(faces.len(), 84);
        qs_mesh_free(mesh);

        let mut step = ptr::null_mut();
        let mut diag = ptr::null_mut();
        assert_eq!(qs_scene_run_step(s, 0, &mut step, &mut diag), QsStatus::Ok);
        let d: serde_json::Value = serde_json::from_str(&take(diag)).unwrap();
        assert!(d["residuals"]["parallel"].as_f64().unwrap() < 1e-10);
        let mut flags = vec![9u8; 96];
        assert_eq!(qs_mesh_flags(step, flags.as_mut_ptr(), flags.len()), QsStatus::Ok);
        assert!(flags.iter().all(|&f| f <= 2));
        qs_mesh_free(step);

        let mut out = ptr::null_mut();
        assert_eq!(qs_scene_run_step(s, 1, &mut out, ptr::null_mut()), QsStatus::OutOfRange);
        assert!(out.is_null());
        assert!(last_error().contains("step 1"));

        let mut csv = ptr::null_mut();
        assert_eq!(qs_scene_sweep_csv(s, &mut csv), QsStatus::Ok);
        let csv = take(csv);
        assert!(csv.starts_with("re_rho,im_rho,re_h1,im_h1,re_h2,im_h2,resonance_flag\n"));
        assert_eq!(csv.lines().count(), 4);
        qs_scene_free(s);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let (s, status) = scene("{");
    assert_eq!(status, QsStatus::ConfigInvalid);
    assert!(s.is_null());
    assert!(last_error().starts_with("[ConfigInvalid]"));

    let (_, status) = scene(r#"{"surface": {"type": "revolution", "profile": {"p": "x", "q": "2"}, "grid": {"x_min": 0, "x_max": 1, "nx": 8, "ny": 8}}}"#);
    assert_eq!(status, QsStatus::ProfileInvalid);

    unsafe {
        assert_eq!(qs_scene_from_json(ptr::null(), &mut ptr::null_mut()), QsStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(qs_scene_from_json(bad.as_ptr().cast(), &mut ptr::null_mut()), QsStatus::InvalidUtf8);
        let mut mu = [0.0; 4];
        assert_eq!(qs_rho_to_mu(f64::NAN, 0.0, mu.as_mut_ptr()), QsStatus::DegenerateSpectral);
        assert_eq!(qs_mesh_vertices(ptr::null(), mu.as_mut_ptr(), 4), QsStatus::NullPointer);
        assert_eq!(qs_mesh_vertex_count(ptr::null()), 0);
        qs_scene_free(ptr::null_mut());
        qs_mesh_free(ptr::null_mut());
        qs_string_free(ptr::null_mut());
    }
}

#[test]
fn small_buffers_are_rejected() {
    let (s, _) = scene(CYLINDER);
    unsafe {
        let mut mesh = ptr::null_mut();
        assert_eq!(qs_scene_surface_mesh(s, &mut mesh), QsStatus::Ok);
        let mut xyz = vec![0.0; 10];
        assert_eq!(qs_mesh_vertices(mesh, xyz.as_mut_ptr(), xyz.len()), QsStatus::BufferTooSmall);
        assert!(last_error().contains("288"));
        qs_mesh_free(mesh);
        qs_scene_free(s);
    }
}

#[test]
fn spectral_conversions() {
    let mut rho = [0.0; 2];
    let mu = 7.0 - 4.0 * 3f64.sqrt();
    assert_eq!(unsafe { qs_mu_to_rho(mu, 0.0, rho.as_mut_ptr()) }, QsStatus::Ok);
    assert!((rho[0] + 3.0).abs() < 1e-12 && rho[1].abs() < 1e-12);
    assert_eq!(unsafe { qs_mu_to_rho(-1.0, 0.0, rho.as_mut_ptr()) }, QsStatus::Ok);
    assert_eq!(rho, [1.0, 0.0]);
    let mut pair = [0.0; 4];
    assert_eq!(unsafe { qs_rho_to_mu(0.3, -1.2, pair.as_mut_ptr()) }, QsStatus::Ok);
    for k in [0, 2] {
        assert_eq!(unsafe { qs_mu_to_rho(pair[k], pair[k + 1], rho.as_mut_ptr()) }, QsStatus::Ok);
        assert!((rho[0] - 0.3).abs() < 1e-13 && (rho[1] + 1.2).abs() < 1e-13, "{rho:?}");
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(qs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
