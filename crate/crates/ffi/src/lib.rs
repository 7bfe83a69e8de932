//! C interface to quatsurf.
//!
//! Every fallible function returns a [`QsStatus`]; on failure the message of
//! the most recent failure on the calling thread is available from
//! [`qs_last_error_message`]. Scenes and meshes are opaque handles released
//! with their `_free` functions; strings handed out by the library are released
//! with [`qs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quatsurf::io::{
    invariants_report, run_step, sweep_csv, to_json, InvariantsReport, MeshOutput, Provenance, RunConfig, Scene, VertexFlag,
};
use quatsurf::{QsError, SpectralPoint};
use quatsurf::c64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    OutOfRange = 3,
    BufferTooSmall = 4,
    Panic = 5,
    ConfigInvalid = 10,
    ProfileInvalid = 11,
    IoError = 12,
    Singular = 20,
    DegenerateSpectral = 21,
    DegenerateImmersion = 22,
    NotClosed = 23,
    RoundSphere = 24,
    StepTooCoarse = 25,
    DefectiveMonodromy = 26,
    Blowup = 27,
    SingularEverywhere = 28,
    NotIndependent = 29,
    SplittingDegenerate = 30,
    Dependent = 31,
    NotSmooth = 32,
    DegenerateDenominator = 33,
}

impl From<&QsError> for QsStatus {
    fn from(e: &QsError) -> Self {
        match e {
            QsError::ConfigInvalid(_) => QsStatus::ConfigInvalid,
            QsError::ProfileInvalid(_) => QsStatus::ProfileInvalid,
            QsError::IoError(_) => QsStatus::IoError,
            QsError::Singular(_) => QsStatus::Singular,
            QsError::DegenerateSpectral(_) => QsStatus::DegenerateSpectral,
            QsError::DegenerateImmersion(_) => QsStatus::DegenerateImmersion,
            QsError::NotClosed(_) => QsStatus::NotClosed,
            QsError::RoundSphere(_) => QsStatus::RoundSphere,
            QsError::StepTooCoarse(_) => QsStatus::StepTooCoarse,
            QsError::DefectiveMonodromy(_) => QsStatus::DefectiveMonodromy,
            QsError::Blowup(_) => QsStatus::Blowup,
            QsError::SingularEverywhere(_) => QsStatus::SingularEverywhere,
            QsError::NotIndependent(_) => QsStatus::NotIndependent,
            QsError::SplittingDegenerate(_) => QsStatus::SplittingDegenerate,
            QsError::Dependent(_) => QsStatus::Dependent,
            QsError::NotSmooth(_) => QsStatus::NotSmooth,
            QsError::DegenerateDenominator(_) => QsStatus::DegenerateDenominator,
        }
    }
}

/// A validated run configuration with its surface and grid.
pub struct QsScene {
    scene: Scene,
}

/// A projected quad mesh with per-vertex flags.
pub struct QsMesh {
    mesh: MeshOutput,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', "?")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(QsStatus, String);

impl From<QsError> for Failure {
    fn from(e: QsError) -> Self {
        Failure(QsStatus::from(&e), format!("[{}] {e}", e.kind()))
    }
}

fn fail(status: QsStatus, msg: &str) -> Failure {
    Failure(status, msg.to_string())
}

/// Runs `body`, converting errors and panics into a status and the last-error message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            QsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(QsStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(QsStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(QsStatus::NullPointer, &format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(QsStatus::InvalidUtf8, &format!("{what} is not valid UTF-8")))
}

fn new_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| fail(QsStatus::InvalidUtf8, "output contains an interior NUL"))
}

unsafe fn fill<T: Copy>(dst: *mut T, cap: usize, src: &[T]) -> Result<(), Failure> {
    if dst.is_null() {
        return Err(fail(QsStatus::NullPointer, "output buffer is null"));
    }
    if cap < src.len() {
        return Err(fail(QsStatus::BufferTooSmall, &format!("buffer holds {cap} values, {} needed", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Message of the most recent failed call on this thread, or null if none
/// failed yet. Valid until the next failure on this thread.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a JSON run configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_scene_from_json(json: *const c_char, out: *mut *mut QsScene) -> QsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let config = RunConfig::from_json(read_str(json, "json")?)?;
        *out = Box::into_raw(Box::new(QsScene { scene: Scene::new(config)? }));
        Ok(())
    })
}

/// Releases a scene. Null is ignored.
///
/// # Safety
/// `scene` must be null or a handle from [`qs_scene_from_json`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_scene_free(scene: *mut QsScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Hex SHA-256 of the canonical configuration (free with [`qs_string_free`]).
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_scene_config_hash(scene: *const QsScene, out: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let s = borrow(scene, "scene")?;
        *out_ptr(out, "out")? = new_string(s.scene.config_hash.clone())?;
        Ok(())
    })
}

/// Number of steps in the configured transform pipeline (0 for a null scene).
///
/// # Safety
/// `scene` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_scene_step_count(scene: *const QsScene) -> usize {
    scene.as_ref().map_or(0, |s| s.scene.config.pipeline.len())
}

fn mesh_of(scene: &Scene, label: &str, field: &quatsurf::surfaces::ImmersionField, flags: &[VertexFlag], spectral: Vec<String>) -> QsMesh {
    let provenance = Provenance {
        config_sha256: scene.config_hash.clone(),
        label: label.into(),
        spectral,
        projection: scene.config.output.projection,
    };
    QsMesh { mesh: MeshOutput::from_field(field, flags, MeshOutput::closes_in_y(field), provenance) }
}

/// Mesh of the configured surface itself.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_scene_surface_mesh(scene: *const QsScene, out: *mut *mut QsMesh) -> QsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = &borrow(scene, "scene")?.scene;
        let mesh = mesh_of(s, &s.config.output.stem, &s.sampled(), &[], Vec::new());
        *out = Box::into_raw(Box::new(mesh));
        Ok(())
    })
}

/// Runs pipeline step `index` on the configured surface. On success `*mesh`
/// receives the transformed mesh and, when `diagnostics` is non-null, the step
/// diagnostics as JSON.
///
/// # Safety
/// `scene` must be a live handle; `mesh` must be writable; `diagnostics` must
/// be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qs_scene_run_step(
    scene: *const QsScene,
    index: usize,
    mesh: *mut *mut QsMesh,
    diagnostics: *mut *mut c_char,
) -> QsStatus {
    guard(|| {
        let mesh = out_ptr(mesh, "mesh")?;
        *mesh = ptr::null_mut();
        if let Some(d) = diagnostics.as_mut() {
            *d = ptr::null_mut();
        }
        let s = &borrow(scene, "scene")?.scene;
        let step = s
            .config
            .pipeline
            .get(index)
            .ok_or_else(|| fail(QsStatus::OutOfRange, &format!("step {index} of {}", s.config.pipeline.len())))?;
        let res = run_step(s, step)?;
        let label = format!("{}_{index}_{}", s.config.output.stem, step.name());
        if let Some(d) = diagnostics.as_mut() {
            *d = new_string(to_json(&res.diagnostics)?)?;
        }
        *mesh = Box::into_raw(Box::new(mesh_of(s, &label, &res.surface, &res.flags, res.spectral)));
        Ok(())
    })
}

/// Multiplier sweep of the configured window as CSV text.
///
/// # Safety
/// `scene` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_scene_sweep_csv(scene: *const QsScene, out: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = &borrow(scene, "scene")?.scene;
        *out = new_string(sweep_csv(&quatsurf::io::sweep_rows(s)?)?)?;
        Ok(())
    })
}

/// Invariant suite report as JSON. `scene` may be null for the defaults;
/// `*passed` (if non-null) receives 1 when every check passed.
///
/// # Safety
/// `scene` must be null or a live handle; `out` must be writable; `passed`
/// must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qs_invariants_json(scene: *const QsScene, out: *mut *mut c_char, passed: *mut i32) -> QsStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = scene.as_ref().map(|s| &s.scene);
        let spec = s.and_then(|s| s.config.invariants.clone()).unwrap_or_default();
        let settings = s.map(|s| s.config.transport).unwrap_or_default();
        let report: InvariantsReport = invariants_report(&spec, &settings);
        if let Some(p) = passed.as_mut() {
            *p = i32::from(report.passed);
        }
        *out = new_string(to_json(&report)?)?;
        Ok(())
    })
}

/// Releases a mesh. Null is ignored.
///
/// # Safety
/// `mesh` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_free(mesh: *mut QsMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of vertices (0 for a null mesh).
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_vertex_count(mesh: *const QsMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.vertices.len())
}

/// Number of quad faces (0 for a null mesh).
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_face_count(mesh: *const QsMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.faces.len())
}

/// Copies `3 · vertex_count` coordinates (x, y, z per vertex) into `xyz`.
///
/// # Safety
/// `mesh` must be a live handle; `xyz` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_vertices(mesh: *const QsMesh, xyz: *mut f64, cap: usize) -> QsStatus {
    guard(|| {
        let m = &borrow(mesh, "mesh")?.mesh;
        let flat: Vec<f64> = m.vertices.iter().flatten().copied().collect();
        fill(xyz, cap, &flat)
    })
}

/// Copies `4 · face_count` zero-based vertex indices into `quads`.
///
/// # Safety
/// `mesh` must be a live handle; `quads` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_faces(mesh: *const QsMesh, quads: *mut usize, cap: usize) -> QsStatus {
    guard(|| {
        let m = &borrow(mesh, "mesh")?.mesh;
        let flat: Vec<usize> = m.faces.iter().flatten().copied().collect();
        fill(quads, cap, &flat)
    })
}

/// Copies one flag per vertex into `flags`: 0 regular, 1 singular, 2 branch point.
///
/// # Safety
/// `mesh` must be a live handle; `flags` must hold `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_flags(mesh: *const QsMesh, flags: *mut u8, cap: usize) -> QsStatus {
    guard(|| {
        let m = &borrow(mesh, "mesh")?.mesh;
        let codes: Vec<u8> = m.flags.iter().map(|f| f.code()).collect();
        fill(flags, cap, &codes)
    })
}

/// The mesh as OBJ text (free with [`qs_string_free`]).
///
/// # Safety
/// `mesh` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_to_obj(mesh: *const QsMesh, out: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let m = &borrow(mesh, "mesh")?.mesh;
        *out_ptr(out, "out")? = new_string(m.to_obj())?;
        Ok(())
    })
}

/// The mesh as ASCII PLY text (free with [`qs_string_free`]).
///
/// # Safety
/// `mesh` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qs_mesh_to_ply(mesh: *const QsMesh, out: *mut *mut c_char) -> QsStatus {
    guard(|| {
        let m = &borrow(mesh, "mesh")?.mesh;
        *out_ptr(out, "out")? = new_string(m.to_ply())?;
        Ok(())
    })
}

/// The two harmonic parameters `μ₊, μ₋` over the isothermic parameter `ϱ`,
/// written as `[re μ₊, im μ₊, re μ₋, im μ₋]`.
///
/// # Safety
/// `mu` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_rho_to_mu(rho_re: f64, rho_im: f64, mu: *mut f64) -> QsStatus {
    guard(|| {
        let (p, m) = SpectralPoint::from_rho(c64(rho_re, rho_im))?;
        fill(mu, 4, &[p.mu.re, p.mu.im, m.mu.re, m.mu.im])
    })
}

/// The isothermic parameter `ϱ` of the harmonic parameter `μ`, written as `[re, im]`.
///
/// # Safety
/// `rho` must hold 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_mu_to_rho(mu_re: f64, mu_im: f64, rho: *mut f64) -> QsStatus {
    guard(|| {
        let sp = SpectralPoint::from_mu(c64(mu_re, mu_im))?;
        fill(rho, 2, &[sp.rho.re, sp.rho.im])
    })
}
