use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::{DerivedSurface, Scene, Step};
use super::invariants::invariants_report;
use super::mesh::{MeshOutput, Provenance, VertexFlag};
use super::report::{sweep_csv, to_json, write_text};
use crate::connections::{multiplier_sweep, ConnectionFamily, Loop, SweepRow};
use crate::error::{QsError, QsResult};
use crate::quat::{Quaternion, SpectralPoint};
use crate::surfaces::{DualGauge, ImmersionField};
use crate::transforms::{
    bianchi_common, calapso, classical_darboux_riccati, cmc_sfd, cw_darboux, mu_darboux, rho_darboux, sfd_two_step,
    DarbouxResult, SINGULAR_FRACTION,
};

/// A transformed surface ready for export, with its diagnostics.
#[derive(Clone, Debug)]
pub struct StepOutput {
    pub surface: ImmersionField,
    pub flags: Vec<VertexFlag>,
    pub spectral: Vec<String>,
    pub diagnostics: Value,
}

fn spectral_label(name: &str, z: Complex64) -> String {
    format!("{name}={z}")
}

/// Singular nodes of a Darboux transform, marking zeros of `f̂ − f` as branch points.
fn darboux_flags(res: &DarbouxResult) -> Vec<VertexFlag> {
    let mut norms: Vec<f64> = res.t.iter().map(|q| q.norm()).filter(|v| v.is_finite()).collect();
    norms.sort_by(f64::total_cmp);
    let median = norms.get(norms.len() / 2).copied().unwrap_or(0.0);
    let mut flags = vec![VertexFlag::Regular; res.surface.grid.len()];
    for &k in &res.singular_nodes {
        let t = res.t[k].norm();
        flags[k] = if t.is_finite() && t <= SINGULAR_FRACTION * median { VertexFlag::Branch } else { VertexFlag::Singular };
    }
    flags
}

fn darboux_output(scene: &Scene, res: DarbouxResult, spectral: Vec<String>, extra: Value) -> StepOutput {
    let flags = darboux_flags(&res);
    let mut diagnostics = serde_json::to_value(res.diagnostics()).expect("diagnostics serialize");
    // The CMC condition is only meaningful against the parallel CMC dual.
    if scene.gauge != DualGauge::ParallelCmc {
        diagnostics["residuals"]["cmc"] = Value::Null;
    }
    diagnostics["singular_count"] = json!(res.singular_nodes.len());
    if let (Value::Object(d), Value::Object(e)) = (&mut diagnostics, extra) {
        d.extend(e);
    }
    StepOutput { surface: res.surface, flags, spectral, diagnostics }
}

fn plain_output(surface: ImmersionField, transform: &str, spectral: Vec<String>, extra: Value) -> StepOutput {
    let n = surface.grid.len();
    let mut diagnostics = json!({ "transform": transform });
    if let (Value::Object(d), Value::Object(e)) = (&mut diagnostics, extra) {
        d.extend(e);
    }
    StepOutput { surface, flags: vec![VertexFlag::Regular; n], spectral, diagnostics }
}

/// `|H − 1|` and real-part spread of a transform expected to be CMC in `Im ℍ`.
fn cmc_extras(res: &DarbouxResult) -> QsResult<Value> {
    Ok(json!({
        "mean_curvature_deviation": res.mean_curvature_deviation(1.0)?,
        "real_part_spread": res.real_part_spread(),
    }))
}

/// Runs one pipeline step on the configured surface.
pub fn run_step(scene: &Scene, step: &Step) -> QsResult<StepOutput> {
    let f = &scene.surface;
    let grid = &scene.grid;
    match step {
        Step::Classical { r, t0 } => {
            let dual = scene.dual()?;
            let res = classical_darboux_riccati(f.as_ref(), dual.as_ref(), grid, *r, Quaternion::from_array(*t0), scene.config.transport.substeps)?;
            Ok(darboux_output(scene, res, vec![format!("r={r}")], json!({})))
        }
        Step::Rho { rho, section } => {
            let dual = scene.dual()?;
            let phi = scene.isothermic_section(section, *rho)?;
            let res = rho_darboux(f.as_ref(), dual.as_ref(), &phi, *rho)?;
            Ok(darboux_output(scene, res, vec![spectral_label("rho", *rho)], json!({})))
        }
        Step::Mu { mu, section } => {
            scene.require_cmc("mu")?;
            let sp = SpectralPoint::from_mu(*mu)?;
            let alpha = scene.harmonic_section(section, sp)?;
            let res = mu_darboux(f, &alpha, sp)?;
            let extra = cmc_extras(&res)?;
            Ok(darboux_output(scene, res, vec![spectral_label("mu", *mu), spectral_label("rho", sp.rho)], extra))
        }
        Step::Bianchi { rho1, section1, rho2, section2 } => {
            let dual = scene.dual()?;
            let p1 = scene.isothermic_section(section1, *rho1)?;
            let p2 = scene.isothermic_section(section2, *rho2)?;
            let res = bianchi_common(f.as_ref(), dual.as_ref(), &p1, *rho1, &p2, *rho2)?;
            Ok(darboux_output(scene, res, vec![spectral_label("rho1", *rho1), spectral_label("rho2", *rho2)], json!({})))
        }
        Step::CmcSfd { mu, section } => {
            scene.require_cmc("cmc_sfd")?;
            let sp = SpectralPoint::from_mu(*mu)?;
            let alpha = scene.harmonic_section(section, sp)?;
            let surface = cmc_sfd(f.as_ref(), &alpha, sp)?;
            let spread = surface.real_part_spread(surface.grid.interior(surface.margin()));
            let extra = json!({ "parallel": alpha.transport_residual, "real_part_spread": spread });
            Ok(plain_output(surface, "cmc_sfd", vec![spectral_label("mu", *mu)], extra))
        }
        Step::CwDarboux { mu, n, section } => {
            scene.require_cmc("cw_darboux")?;
            let sp = SpectralPoint::from_mu(*mu)?;
            let alpha = scene.harmonic_section(section, sp)?;
            let n = Quaternion::from_array(*n);
            let res = cw_darboux(f, &alpha, sp, n)?;
            Ok(darboux_output(scene, res, vec![spectral_label("mu", *mu), format!("n={:?}", n.to_array())], json!({})))
        }
        Step::SfdTwoStep { rho, section1, section2 } => {
            let p1 = scene.isothermic_section(section1, *rho)?;
            let p2 = scene.isothermic_section(section2, *rho)?;
            let res = sfd_two_step(f.as_ref(), &p1, &p2, *rho)?;
            let extra = json!({ "residuals": res.residuals, "parallel": p1.transport_residual.max(p2.transport_residual) });
            Ok(plain_output(res.surface, "sfd_two_step", vec![spectral_label("rho", *rho)], extra))
        }
        Step::Calapso { r, section1, section2 } => {
            let rho = Complex64::new(*r, 0.0);
            let p1 = scene.isothermic_section(section1, rho)?;
            let p2 = scene.isothermic_section(section2, rho)?;
            let res = calapso(f.as_ref(), &p1, &p2)?;
            let extra = json!({ "mean_radius": res.mean_radius(), "radius_spread": res.radius_spread() });
            Ok(plain_output(res.surface, "calapso", vec![format!("r={r}")], extra))
        }
    }
}

fn write_mesh(scene: &Scene, out: &Path, name: &str, field: &ImmersionField, flags: &[VertexFlag], spectral: Vec<String>) -> QsResult<Vec<PathBuf>> {
    let o = &scene.config.output;
    let provenance = Provenance { config_sha256: scene.config_hash.clone(), label: name.to_string(), spectral, projection: o.projection };
    let mesh = MeshOutput::from_field(field, flags, MeshOutput::closes_in_y(field), provenance);
    let mut files = vec![out.join(format!("{name}.obj"))];
    write_text(&files[0], &mesh.to_obj())?;
    if o.ply {
        files.push(out.join(format!("{name}.ply")));
        write_text(&files[1], &mesh.to_ply())?;
    }
    Ok(files)
}

/// Mesh of the configured surface and of the requested derived surfaces, plus
/// a JSON summary of the surface's own residuals.
pub fn cmd_surface(scene: &Scene, out: &Path) -> QsResult<Vec<PathBuf>> {
    let stem = &scene.config.output.stem;
    let f = scene.sampled();
    let gauss = f.gauss_map()?;
    let h: Vec<f64> = gauss.interior.iter().map(|&k| gauss.h[k].norm()).collect();
    let mut files = write_mesh(scene, out, stem, &f, &[], Vec::new())?;
    let mut derived = serde_json::Map::new();
    for d in &scene.config.derived {
        let (name, field) = match d {
            DerivedSurface::Dual => ("dual", scene.dual_field()?),
            DerivedSurface::Parallel => ("parallel", scene.parallel_field()?),
        };
        files.extend(write_mesh(scene, out, &format!("{stem}_{name}"), &field, &[], Vec::new())?);
        derived.insert(name.into(), json!({ "conformality": field.conformality_residual() }));
    }
    let report = json!({
        "config_sha256": scene.config_hash,
        "surface": scene.surface.describe(),
        "nodes": [scene.grid.nx, scene.grid.ny],
        "conformality": f.conformality_residual(),
        "mean_curvature_range": [h.iter().cloned().fold(f64::INFINITY, f64::min), h.iter().cloned().fold(0.0, f64::max)],
        "derived": derived,
    });
    let path = out.join(&scene.config.output.diagnostics);
    write_text(&path, &to_json(&report)?)?;
    files.push(path);
    Ok(files)
}

/// One mesh per pipeline step and a JSON file of all step diagnostics.
pub fn cmd_darboux(scene: &Scene, out: &Path) -> QsResult<Vec<PathBuf>> {
    if scene.config.pipeline.is_empty() {
        return Err(QsError::ConfigInvalid("the pipeline is empty".into()));
    }
    let stem = &scene.config.output.stem;
    let mut files = Vec::new();
    let mut steps = Vec::new();
    for (i, step) in scene.config.pipeline.iter().enumerate() {
        let res = run_step(scene, step)?;
        let name = format!("{stem}_{i}_{}", step.name());
        files.extend(write_mesh(scene, out, &name, &res.surface, &res.flags, res.spectral.clone())?);
        steps.push(json!({ "index": i, "op": step.name(), "mesh": format!("{name}.obj"), "diagnostics": res.diagnostics }));
    }
    let report = json!({ "config_sha256": scene.config_hash, "surface": scene.surface.describe(), "steps": steps });
    let path = out.join(&scene.config.output.diagnostics);
    write_text(&path, &to_json(&report)?)?;
    files.push(path);
    Ok(files)
}

/// Multiplier map of the isothermic family of the configured surface.
pub fn sweep_rows(scene: &Scene) -> QsResult<Vec<SweepRow>> {
    let spec = scene.config.sweep.as_ref().ok_or_else(|| QsError::ConfigInvalid("no sweep section in the configuration".into()))?;
    if !scene.grid.periodic_y {
        return Err(QsError::ConfigInvalid("a sweep needs a grid periodic in y".into()));
    }
    let lp = Loop { x0: spec.x0.unwrap_or(scene.grid.x_min), y0: scene.grid.y_min, period: scene.grid.period_y, steps: scene.grid.ny };
    let dual = if spec.window.n_re * spec.window.n_im == 0 { None } else { Some(scene.dual()?) };
    let build = |rho: Complex64| ConnectionFamily::isothermic(scene.surface.clone(), dual.clone().expect("non-empty window"), rho);
    multiplier_sweep(build, &lp, scene.config.transport.substeps, &spec.window)
}

pub fn cmd_sweep(scene: &Scene, out: &Path) -> QsResult<Vec<PathBuf>> {
    let rows = sweep_rows(scene)?;
    let path = out.join(&scene.config.output.sweep);
    write_text(&path, &sweep_csv(&rows)?)?;
    Ok(vec![path])
}

/// The invariant suite as a JSON report. Failures are data, not errors.
pub fn cmd_invariants(scene: Option<&Scene>, out: &Path) -> QsResult<Vec<PathBuf>> {
    let spec = scene.and_then(|s| s.config.invariants.clone()).unwrap_or_default();
    let settings = scene.map(|s| s.config.transport).unwrap_or_default();
    let name = scene.map(|s| s.config.output.invariants.clone()).unwrap_or_else(|| "invariants.json".into());
    let report = invariants_report(&spec, &settings);
    let path = out.join(name);
    write_text(&path, &to_json(&report)?)?;
    Ok(vec![path])
}
