//! Cross-checks between algebraic section constructions and independent
//! numerical transport.

use std::sync::Arc;

use num_complex::Complex64;

use super::darboux::harmonic_partner;
use crate::connections::{transport_grid, ConnectionFamily, TransportSettings};
use crate::error::QsResult;
use crate::quat::{HVector2, Quaternion, SpectralPoint};
use crate::surfaces::field::sample_frames;
use crate::surfaces::{DomainGrid, ModelRef, ParallelModel};

fn relative_gap(a: &[Quaternion], b: &[Quaternion]) -> f64 {
    let scale = a.iter().map(|q| q.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm()).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE)
}

fn relative_gap_vec(a: &[HVector2], b: &[HVector2]) -> f64 {
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm()).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE)
}

/// For `α` parallel for the harmonic family of `f` at `μ`, the algebraic
/// partner `β = ½(Nα(a−1) + αb)` against `β` transported by the harmonic family
/// of the parallel surface `g = f + N`.
pub fn both_parallel_residual(f: &ModelRef, grid: &DomainGrid, sp: SpectralPoint, alpha0: Quaternion, settings: &TransportSettings) -> QsResult<f64> {
    let conn = ConnectionFamily::harmonic_at(f.clone(), sp);
    let alpha = transport_grid(&conn, grid, HVector2::new(alpha0, Quaternion::ZERO), settings)?;
    let frames = sample_frames(f.as_ref(), grid);
    let beta: Vec<Quaternion> = frames.iter().zip(&alpha.values).map(|(p, v)| harmonic_partner(p.n, v.a, &sp)).collect();
    let g: ModelRef = Arc::new(ParallelModel::new(f.clone()));
    let conn_g = ConnectionFamily::harmonic_at(g, sp);
    let beta_t = transport_grid(&conn_g, grid, HVector2::new(beta[0], Quaternion::ZERO), settings)?;
    let bt: Vec<Quaternion> = beta_t.values.iter().map(|v| v.a).collect();
    Ok(relative_gap(&beta, &bt))
}

/// `φ = (α₊ + α₋, β₊ + β₋)` from harmonic sections at `μ±` against the
/// section transported by the isothermic family with dual `g = f + N` at `ϱ`.
pub fn rho_section_residual(
    f: &ModelRef,
    grid: &DomainGrid,
    rho: Complex64,
    init: (Quaternion, Quaternion),
    settings: &TransportSettings,
) -> QsResult<f64> {
    let frames = sample_frames(f.as_ref(), grid);
    let mut phi = vec![HVector2::ZERO; grid.len()];
    for (sign, a0) in [(1.0, init.0), (-1.0, init.1)] {
        let sp = SpectralPoint::from_rho_branch(rho, sign);
        let conn = ConnectionFamily::harmonic_at(f.clone(), sp);
        let alpha = transport_grid(&conn, grid, HVector2::new(a0, Quaternion::ZERO), settings)?;
        for (k, v) in alpha.values.iter().enumerate() {
            phi[k] = phi[k] + HVector2::new(v.a, harmonic_partner(frames[k].n, v.a, &sp));
        }
    }
    let g: ModelRef = Arc::new(ParallelModel::new(f.clone()));
    let conn = ConnectionFamily::isothermic(f.clone(), g, rho)?;
    let tr = transport_grid(&conn, grid, phi[0], settings)?;
    Ok(relative_gap_vec(&phi, &tr.values))
}

/// `φ = e(α + n) + ψβ` against the section transported by the conformal
/// Gauss map family at `μ`.
pub fn cw_section_residual(
    f: &ModelRef,
    grid: &DomainGrid,
    sp: SpectralPoint,
    alpha0: Quaternion,
    n: Quaternion,
    settings: &TransportSettings,
) -> QsResult<f64> {
    let conn = ConnectionFamily::harmonic_at(f.clone(), sp);
    let alpha = transport_grid(&conn, grid, HVector2::new(alpha0, Quaternion::ZERO), settings)?;
    let frames = sample_frames(f.as_ref(), grid);
    let phi: Vec<HVector2> = frames
        .iter()
        .zip(&alpha.values)
        .map(|(p, v)| {
            let beta = harmonic_partner(p.n, v.a, &sp);
            HVector2::new(v.a + n + p.f * beta, beta)
        })
        .collect();
    let conn_s = ConnectionFamily::conformal_at(f.clone(), sp);
    let tr = transport_grid(&conn_s, grid, phi[0], settings)?;
    Ok(relative_gap_vec(&phi, &tr.values))
}
