//! Darboux transforms, Bianchi permutability, simple factor dressings and
//! associated-family constructions built from parallel sections.

pub mod associated;
pub mod bianchi;
pub mod correspondence;
pub mod darboux;
pub mod dressing;

pub use associated::{
    calapso, cw_assoc, cw_limit, harmonic_section_family, lawson, limit_isothermic_family, sphere_mean_curvature, sym_bobenko,
    CalapsoResult, LimitReport, LimitStep,
};
pub use bianchi::bianchi_common;
pub use correspondence::{both_parallel_residual, cw_section_residual, rho_section_residual};
pub use darboux::{classical_darboux_riccati, cw_darboux, g_mu_darboux, mu_darboux, rho_darboux};
pub use dressing::{cmc_sfd, cw_sfd, sfd_isothermic, sfd_two_step, DressingMatrix, SfdResult};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QsError, QsResult};
use crate::quat::Quaternion;
use crate::surfaces::grid::stencil_margin;
use crate::surfaces::model::normals_from_tangents;
use crate::surfaces::{diff_x, diff_y, wedge_residual, DomainGrid, FramePoint, ImmersionField};

/// Nodes where `|β|` or `|T|` drop below this fraction of their median are singular.
pub const SINGULAR_FRACTION: f64 = 1e-8;

/// Spectral data recorded with a transform.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SpectralSummary {
    pub rho: Option<[f64; 2]>,
    pub mu: Option<[f64; 2]>,
}

impl SpectralSummary {
    pub fn rho(rho: Complex64) -> Self {
        SpectralSummary { rho: Some([rho.re, rho.im]), mu: None }
    }

    pub fn rho_mu(rho: Complex64, mu: Complex64) -> Self {
        SpectralSummary { rho: Some([rho.re, rho.im]), mu: Some([mu.re, mu.im]) }
    }
}

/// Residual summary over non-singular interior nodes.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Residuals {
    /// Parallelism residual of the input section(s).
    pub parallel: f64,
    /// `|dT + df − T df^d ϱ̂ T|`, relative.
    pub riccati: Option<f64>,
    /// `|(T^d + N)² − (ϱ̂⁻¹ − 1)|`, meaningful when the dual is the parallel CMC surface.
    pub cmc: Option<f64>,
    /// `|df̂ ∧ df̂^d|` relative to `|df̂||df̂^d|`.
    pub wedge: Option<f64>,
}

/// Output of a Darboux-type transform sampled on a grid.
#[derive(Clone, Debug)]
pub struct DarbouxResult {
    pub transform: String,
    pub spectral: SpectralSummary,
    /// `f̂` on the unwrapped grid.
    pub surface: ImmersionField,
    /// `f̂ − f`.
    pub t: Vec<Quaternion>,
    pub n_hat: Vec<Quaternion>,
    pub r_hat: Vec<Quaternion>,
    /// `f̂^d = f^d + T^d` when the transform comes with a dual.
    pub dual: Option<ImmersionField>,
    pub t_dual: Option<Vec<Quaternion>>,
    pub singular_nodes: Vec<usize>,
    /// Per-node CMC condition residual, when evaluated.
    pub cmc_residual: Option<Vec<f64>>,
    pub residuals: Residuals,
}

/// Serializable diagnostics of a [`DarbouxResult`].
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub transform: String,
    pub spectral: SpectralSummary,
    pub residuals: Residuals,
    pub singular_nodes: Vec<usize>,
}

/// Ingredients shared by the Darboux-type constructions.
pub(crate) struct Assembly<'a> {
    pub transform: &'a str,
    pub spectral: SpectralSummary,
    pub grid: DomainGrid,
    pub frames: &'a [FramePoint],
    pub t: Vec<Quaternion>,
    /// Quantities whose near-vanishing marks a singular node (typically `|β|`).
    pub denominators: Vec<f64>,
    pub tangents: Option<(Vec<Quaternion>, Vec<Quaternion>)>,
    /// `(f^d, f^d_x, f^d_y)` per node.
    pub dual_frames: Option<(Vec<Quaternion>, Vec<Quaternion>, Vec<Quaternion>)>,
    pub t_dual: Option<Vec<Quaternion>>,
    /// `ϱ̂` per node, for the Riccati and CMC checks.
    pub rho_hat: Option<Vec<Quaternion>>,
    pub cmc: bool,
    pub parallel: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.retain(|x| x.is_finite());
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Indices where `|T|` or the denominators are tiny or not finite.
pub fn singular_nodes(t: &[Quaternion], denominators: &[f64]) -> Vec<usize> {
    let mt = median(t.iter().map(|q| q.norm()).collect());
    let md = median(denominators.to_vec());
    (0..t.len())
        .filter(|&k| {
            let tn = t[k].norm();
            !tn.is_finite() || tn < SINGULAR_FRACTION * mt || !(denominators[k] >= SINGULAR_FRACTION * md)
        })
        .collect()
}

/// Interior nodes at least a stencil margin away from every singular node.
pub fn good_nodes(grid: &DomainGrid, singular: &[usize], order: usize) -> Vec<usize> {
    let m = stencil_margin(order) as isize;
    let mut bad = vec![false; grid.len()];
    for &k in singular {
        let (i, j) = (k / grid.ny, k % grid.ny);
        for di in -m..=m {
            for dj in -m..=m {
                let ii = i as isize + di;
                let mut jj = j as isize + dj;
                if grid.periodic_y {
                    jj = jj.rem_euclid(grid.ny as isize);
                }
                if ii >= 0 && jj >= 0 && (ii as usize) < grid.nx && (jj as usize) < grid.ny {
                    bad[grid.idx(ii as usize, jj as usize)] = true;
                }
            }
        }
    }
    grid.interior(stencil_margin(order)).filter(|&k| !bad[k]).collect()
}

fn sanitize(values: &mut [Quaternion]) {
    for v in values.iter_mut() {
        if !v.is_finite() {
            *v = Quaternion::ZERO;
        }
    }
}

impl Assembly<'_> {
    pub fn finish(self) -> QsResult<DarbouxResult> {
        let grid = self.grid.unwrapped();
        let n = grid.len();
        let singular = singular_nodes(&self.t, &self.denominators);
        if singular.len() == n {
            return Err(QsError::SingularEverywhere(format!("{}: every node is singular", self.transform)));
        }
        let mut t = self.t;
        sanitize(&mut t);
        let values: Vec<Quaternion> = (0..n).map(|k| self.frames[k].f + t[k]).collect();
        let mut surface = match self.tangents {
            Some((mut fx, mut fy)) => {
                sanitize(&mut fx);
                sanitize(&mut fy);
                ImmersionField::with_tangents(grid, values, fx, fy)
            }
            None => ImmersionField::from_values(grid, values),
        };
        surface.is_r3 = surface.values.iter().all(|q| q.w.abs() < 1e-12);
        let order = surface.fd_order;
        let good = good_nodes(&grid, &singular, order);
        let (fx, fy) = surface.derivatives();
        let (n_hat, r_hat): (Vec<_>, Vec<_>) = (0..n)
            .map(|k| if fx[k].norm() > 0.0 { normals_from_tangents(fx[k], fy[k]) } else { (Quaternion::ZERO, Quaternion::ZERO) })
            .unzip();

        let mut residuals = Residuals { parallel: self.parallel, ..Default::default() };
        let mut dual = None;
        if let (Some((dv, dxs, dys)), Some(td)) = (&self.dual_frames, &self.t_dual) {
            let mut td = td.clone();
            sanitize(&mut td);
            let vals: Vec<Quaternion> = (0..n).map(|k| dv[k] + td[k]).collect();
            let d = ImmersionField::from_values(grid, vals);
            let (dx, dy) = d.derivatives();
            let sel = |v: &[Quaternion]| good.iter().map(|&k| v[k]).collect::<Vec<_>>();
            residuals.wedge = Some(wedge_residual(&sel(&fx), &sel(&fy), &sel(&dx), &sel(&dy)));
            if let Some(rh) = &self.rho_hat {
                let tx = diff_x(&grid, &t, order);
                let ty = diff_y(&grid, &t, order);
                let res = good
                    .iter()
                    .map(|&k| {
                        let p = &self.frames[k];
                        let qx = t[k] * dxs[k] * rh[k] * t[k];
                        let qy = t[k] * dys[k] * rh[k] * t[k];
                        let sx = (tx[k] + p.fx - qx).norm() / (p.fx.norm() + qx.norm());
                        let sy = (ty[k] + p.fy - qy).norm() / (p.fy.norm() + qy.norm());
                        sx.max(sy)
                    })
                    .fold(0.0, f64::max);
                residuals.riccati = Some(res);
            }
            dual = Some(d);
        }
        let mut cmc_residual = None;
        if let (true, Some(td), Some(rh)) = (self.cmc, &self.t_dual, &self.rho_hat) {
            let per: Vec<f64> = (0..n)
                .map(|k| {
                    let u = td[k] + self.frames[k].n;
                    let target = rh[k].inv() - Quaternion::ONE;
                    (u * u - target).norm()
                })
                .collect();
            residuals.cmc = Some(good.iter().map(|&k| per[k]).fold(0.0, f64::max));
            cmc_residual = Some(per);
        }
        Ok(DarbouxResult {
            transform: self.transform.to_string(),
            spectral: self.spectral,
            surface,
            t,
            n_hat,
            r_hat,
            dual,
            t_dual: self.t_dual,
            singular_nodes: singular,
            cmc_residual,
            residuals,
        })
    }
}

impl DarbouxResult {
    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            transform: self.transform.clone(),
            spectral: self.spectral,
            residuals: self.residuals,
            singular_nodes: self.singular_nodes.clone(),
        }
    }

    /// Interior nodes away from singular ones.
    pub fn good_nodes(&self) -> Vec<usize> {
        good_nodes(&self.surface.grid, &self.singular_nodes, self.surface.fd_order)
    }

    /// `max |H − target|` of `f̂` over good nodes.
    pub fn mean_curvature_deviation(&self, target: f64) -> QsResult<f64> {
        let g = self.surface.gauss_map()?;
        Ok(self.good_nodes().into_iter().map(|k| (g.h[k] - Quaternion::real(target)).norm()).fold(0.0, f64::max))
    }

    /// Spread of `Re f̂` over good nodes.
    pub fn real_part_spread(&self) -> f64 {
        self.surface.real_part_spread(self.good_nodes().into_iter())
    }
}
