use std::f64::consts::TAU;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mesh::Projection;
use super::report::sha256_hex;
use crate::connections::{monodromy, ConnectionFamily, Loop, SectionField, SweepWindow, TransportSettings};
use crate::error::{QsError, QsResult};
use crate::oracles::{CylinderOracle, CylinderSection, RevolutionOracle};
use crate::quat::{HVector2, Quaternion, SpectralPoint};
use crate::surfaces::dual::christoffel_dual;
use crate::surfaces::{
    parallel_surface, sample_normal_derivatives, DomainGrid, DualGauge, ImmersionField, ModelRef, ParallelModel,
    ProfileCurve, Revolution, SampledModel,
};

/// Complete description of one CLI run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    /// Defaults to `parallel_cmc` for the cylinder and `isothermic_formula` otherwise.
    #[serde(default)]
    pub dual_gauge: Option<DualGauge>,
    #[serde(default)]
    pub transport: TransportSettings,
    /// Derived surfaces written by `surface` next to the surface itself.
    #[serde(default)]
    pub derived: Vec<DerivedSurface>,
    /// Transforms of the configured surface, each written to its own mesh.
    #[serde(default)]
    pub pipeline: Vec<Step>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub invariants: Option<InvariantsSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceType {
    Cylinder,
    Revolution,
    Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    #[serde(rename = "type")]
    pub kind: SurfaceType,
    /// Profile `(p, q)` of `f = i p(x) + j q(x) e^{−iy}`; revolution only.
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    /// Node values `[w, x, y, z]` in grid order (column-major in x); grid only.
    #[serde(default)]
    pub samples: Option<Vec<[f64; 4]>>,
    pub grid: GridSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub p: String,
    pub q: String,
}

/// Parameter domain. The y-range is `[y_min, y_max)`, with `y_max` defaulting
/// to `y_min + 2π·y_turns`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub y_min: f64,
    #[serde(default)]
    pub y_max: Option<f64>,
    #[serde(default)]
    pub y_turns: Option<f64>,
    #[serde(default = "yes")]
    pub periodic_y: bool,
}

fn yes() -> bool {
    true
}

impl GridSpec {
    pub fn build(&self) -> QsResult<DomainGrid> {
        let y_max = match (self.y_max, self.y_turns) {
            (Some(_), Some(_)) => return Err(QsError::ConfigInvalid("give at most one of y_max and y_turns".into())),
            (Some(y), None) => y,
            (None, turns) => self.y_min + TAU * turns.unwrap_or(1.0),
        };
        DomainGrid::new(self.x_min, self.x_max, self.y_min, y_max, self.nx, self.ny, self.periodic_y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedSurface {
    /// The dual in the configured gauge.
    Dual,
    /// The parallel CMC surface `f + N`.
    Parallel,
}

/// Where a parallel section comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionSpec {
    /// Transport of an explicit initial value from the grid origin. `beta` is
    /// required for the isothermic family and must be absent for the harmonic one.
    Initial {
        alpha: [f64; 4],
        #[serde(default)]
        beta: Option<[f64; 4]>,
    },
    /// Closed-form cylinder section.
    CylinderOracle { which: CylinderSection },
    /// Closed-form section with multiplier of a surface of revolution, branch `±1`.
    RevolutionOracle { branch: f64 },
    /// Eigen-section of the period monodromy at the grid origin: basis vector
    /// `index` of the eigenspace of multiplier `multiplier` (0 or 1).
    Monodromy {
        multiplier: usize,
        #[serde(default)]
        index: usize,
    },
}

/// One transform of the configured surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    /// Classical Darboux transform by the Riccati equation, `T(origin) = t0`.
    Classical { r: f64, t0: [f64; 4] },
    /// `ϱ`-Darboux transform.
    Rho { rho: Complex64, section: SectionSpec },
    /// `μ`-Darboux transform of a CMC surface.
    Mu { mu: Complex64, section: SectionSpec },
    /// Common Darboux transform of two `ϱ`-Darboux transforms.
    Bianchi { rho1: Complex64, section1: SectionSpec, rho2: Complex64, section2: SectionSpec },
    /// Simple factor dressing of a CMC surface.
    CmcSfd { mu: Complex64, section: SectionSpec },
    /// Darboux transform of the conformal Gauss map with constant offset `n`.
    CwDarboux { mu: Complex64, n: [f64; 4], section: SectionSpec },
    /// Two-step dressing by two sections at the same `ϱ`.
    SfdTwoStep { rho: Complex64, section1: SectionSpec, section2: SectionSpec },
    /// Calapso transform by two sections of the real family at `r`.
    Calapso { r: f64, section1: SectionSpec, section2: SectionSpec },
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Classical { .. } => "classical",
            Step::Rho { .. } => "rho",
            Step::Mu { .. } => "mu",
            Step::Bianchi { .. } => "bianchi",
            Step::CmcSfd { .. } => "cmc_sfd",
            Step::CwDarboux { .. } => "cw_darboux",
            Step::SfdTwoStep { .. } => "sfd_two_step",
            Step::Calapso { .. } => "calapso",
        }
    }
}

/// Multiplier map of the isothermic family over a `ϱ`-window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub window: SweepWindow,
    /// `x` of the loop; defaults to the grid's `x_min`.
    #[serde(default)]
    pub x0: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsSpec {
    /// Replace the dual by the surface itself in the flatness checks (negative control).
    #[serde(default)]
    pub corrupt_dual: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// File-name stem of mesh outputs.
    pub stem: String,
    pub ply: bool,
    pub projection: Projection,
    pub diagnostics: String,
    pub sweep: String,
    pub invariants: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            stem: "surface".into(),
            ply: false,
            projection: Projection::DropReal,
            diagnostics: "diagnostics.json".into(),
            sweep: "sweep.csv".into(),
            invariants: "invariants.json".into(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> QsResult<Self> {
        serde_json::from_str(text).map_err(|e| QsError::ConfigInvalid(e.to_string()))
    }

    pub fn load(path: &Path) -> QsResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QsError::IoError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// SHA-256 of the canonical (re-serialized) configuration.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("configuration serializes").as_bytes())
    }

    pub fn gauge(&self) -> DualGauge {
        self.dual_gauge.unwrap_or(match self.surface.kind {
            SurfaceType::Cylinder => DualGauge::ParallelCmc,
            _ => DualGauge::IsothermicFormula,
        })
    }
}

/// A configuration resolved into models on a grid.
#[derive(Clone)]
pub struct Scene {
    pub config: RunConfig,
    pub config_hash: String,
    pub grid: DomainGrid,
    pub surface: ModelRef,
    /// The surface as a surface of revolution, when it is one.
    pub revolution: Option<Revolution>,
    pub gauge: DualGauge,
}

impl Scene {
    pub fn new(config: RunConfig) -> QsResult<Self> {
        let grid = config.surface.grid.build()?;
        let s = &config.surface;
        let (surface, revolution): (ModelRef, Option<Revolution>) = match s.kind {
            SurfaceType::Cylinder => {
                if s.profile.is_some() || s.samples.is_some() {
                    return Err(QsError::ConfigInvalid("a cylinder takes neither profile nor samples".into()));
                }
                let r = Revolution::cylinder();
                (Arc::new(r.clone()), Some(r))
            }
            SurfaceType::Revolution => {
                let p = s.profile.as_ref().ok_or_else(|| QsError::ConfigInvalid("revolution needs a profile".into()))?;
                if s.samples.is_some() {
                    return Err(QsError::ConfigInvalid("revolution takes no samples".into()));
                }
                let profile = ProfileCurve::new(&p.p, &p.q)?;
                profile.validate(grid.x_min, grid.x_max, 4 * grid.nx)?;
                let r = Revolution::new(profile);
                (Arc::new(r.clone()), Some(r))
            }
            SurfaceType::Grid => {
                let samples = s.samples.as_ref().ok_or_else(|| QsError::ConfigInvalid("grid surface needs samples".into()))?;
                if s.profile.is_some() {
                    return Err(QsError::ConfigInvalid("grid surface takes no profile".into()));
                }
                if samples.len() != grid.len() {
                    return Err(QsError::ConfigInvalid(format!("{} samples for a grid of {} nodes", samples.len(), grid.len())));
                }
                let values: Vec<Quaternion> = samples.iter().map(|a| Quaternion::from_array(*a)).collect();
                if !values.iter().all(|q| q.is_finite()) {
                    return Err(QsError::ConfigInvalid("samples must be finite".into()));
                }
                (Arc::new(SampledModel::new(&ImmersionField::from_values(grid, values))), None)
            }
        };
        let gauge = config.gauge();
        Ok(Scene { config_hash: config.hash(), config, grid, surface, revolution, gauge })
    }

    pub fn is_cylinder(&self) -> bool {
        self.config.surface.kind == SurfaceType::Cylinder
    }

    pub fn sampled(&self) -> ImmersionField {
        ImmersionField::from_model(self.surface.as_ref(), &self.grid)
    }

    /// Parallel CMC surface `f + N`, after checking `H = 1` and excluding the round sphere.
    pub fn parallel_field(&self) -> QsResult<ImmersionField> {
        let f = self.sampled();
        let gauss = f.gauss_map()?;
        parallel_surface(&f, &gauss, Some(sample_normal_derivatives(self.surface.as_ref(), &self.grid)))
    }

    /// Model of the dual in the configured gauge.
    pub fn dual(&self) -> QsResult<ModelRef> {
        match self.gauge {
            DualGauge::ParallelCmc => {
                self.parallel_field()?;
                Ok(Arc::new(ParallelModel::new(self.surface.clone())))
            }
            DualGauge::IsothermicFormula => match &self.revolution {
                Some(r) => Ok(Arc::new(r.formula_dual())),
                None => Ok(Arc::new(SampledModel::new(&christoffel_dual(&self.sampled())?.0))),
            },
        }
    }

    /// Sampled dual in the configured gauge.
    pub fn dual_field(&self) -> QsResult<ImmersionField> {
        match self.gauge {
            DualGauge::ParallelCmc => self.parallel_field(),
            DualGauge::IsothermicFormula => match &self.revolution {
                Some(r) => Ok(ImmersionField::from_model(&r.formula_dual(), &self.grid)),
                None => Ok(christoffel_dual(&self.sampled())?.0),
            },
        }
    }

    /// Harmonic-family constructions need a CMC surface with its parallel surface as dual.
    pub fn require_cmc(&self, op: &str) -> QsResult<()> {
        if self.gauge != DualGauge::ParallelCmc {
            return Err(QsError::ConfigInvalid(format!("{op} needs dual_gauge \"parallel_cmc\"")));
        }
        self.parallel_field().map(|_| ())
    }

    fn period_loop(&self) -> QsResult<Loop> {
        if !self.grid.periodic_y {
            return Err(QsError::ConfigInvalid("monodromy sections need a grid periodic in y".into()));
        }
        Ok(Loop { x0: self.grid.x(0), y0: self.grid.y(0), period: self.grid.period_y, steps: self.grid.ny })
    }

    fn monodromy_init(&self, conn: &ConnectionFamily, multiplier: usize, index: usize) -> QsResult<HVector2> {
        let m = monodromy(conn, &self.period_loop()?, self.config.transport.substeps)?;
        let space = match multiplier {
            0 => &m.eigen_sections.0,
            1 => &m.eigen_sections.1,
            _ => return Err(QsError::ConfigInvalid("multiplier must be 0 or 1".into())),
        };
        space
            .get(index)
            .copied()
            .ok_or_else(|| QsError::ConfigInvalid(format!("eigenspace has {} basis vectors; index {index} out of range", space.len())))
    }

    fn cylinder_oracle(&self, rho: Complex64) -> QsResult<CylinderOracle> {
        if !self.is_cylinder() || self.gauge != DualGauge::ParallelCmc {
            return Err(QsError::ConfigInvalid("cylinder_oracle sections need the cylinder with dual_gauge \"parallel_cmc\"".into()));
        }
        CylinderOracle::new(rho)
    }

    /// Parallel section of the isothermic family at `ϱ`.
    pub fn isothermic_section(&self, spec: &SectionSpec, rho: Complex64) -> QsResult<SectionField> {
        let settings = &self.config.transport;
        let conn = || -> QsResult<ConnectionFamily> { ConnectionFamily::isothermic(self.surface.clone(), self.dual()?, rho) };
        match spec {
            SectionSpec::Initial { alpha, beta } => {
                let beta = beta.ok_or_else(|| QsError::ConfigInvalid("isothermic sections need both alpha and beta".into()))?;
                let init = HVector2::new(Quaternion::from_array(*alpha), Quaternion::from_array(beta));
                crate::connections::transport_grid(&conn()?, &self.grid, init, settings)
            }
            SectionSpec::CylinderOracle { which } => self.cylinder_oracle(rho)?.section_field(*which, &self.grid),
            SectionSpec::RevolutionOracle { branch } => {
                let rev = self.revolution.clone().ok_or_else(|| QsError::ConfigInvalid("revolution_oracle needs a surface of revolution".into()))?;
                if self.gauge != DualGauge::IsothermicFormula {
                    return Err(QsError::ConfigInvalid("revolution_oracle sections need dual_gauge \"isothermic_formula\"".into()));
                }
                let o = RevolutionOracle::with_defaults(rev, rho, *branch, self.grid.x_min, self.grid.x_max)?;
                Ok(o.section_field(&self.grid))
            }
            SectionSpec::Monodromy { multiplier, index } => {
                let c = conn()?;
                let init = self.monodromy_init(&c, *multiplier, *index)?;
                crate::connections::transport_grid(&c, &self.grid, init, settings)
            }
        }
    }

    /// Parallel section `(α, 0)` of the harmonic family at `sp`.
    pub fn harmonic_section(&self, spec: &SectionSpec, sp: SpectralPoint) -> QsResult<SectionField> {
        let settings = &self.config.transport;
        let conn = ConnectionFamily::harmonic_at(self.surface.clone(), sp);
        let init = match spec {
            SectionSpec::Initial { alpha, beta } => {
                if beta.is_some() {
                    return Err(QsError::ConfigInvalid("harmonic sections take alpha only".into()));
                }
                HVector2::new(Quaternion::from_array(*alpha), Quaternion::ZERO)
            }
            SectionSpec::CylinderOracle { which } => {
                let o = self.cylinder_oracle(sp.rho)?;
                let expect = o.spectral(which.branch()).mu;
                if (expect - sp.mu).norm() > 1e-12 * sp.mu.norm().max(1.0) {
                    return Err(QsError::ConfigInvalid(format!("oracle section {which:?} belongs to μ = {expect}, not {}", sp.mu)));
                }
                let s = o.section_field(*which, &self.grid)?;
                return Ok(s.map(|v| HVector2::new(v.a, Quaternion::ZERO)));
            }
            SectionSpec::RevolutionOracle { .. } => {
                return Err(QsError::ConfigInvalid("revolution_oracle sections belong to the isothermic family".into()))
            }
            SectionSpec::Monodromy { multiplier, index } => self.monodromy_init(&conn, *multiplier, *index)?,
        };
        crate::connections::transport_grid(&conn, &self.grid, init, settings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CYL: &str = r#"{"surface": {"type": "cylinder", "grid": {"x_min": -1, "x_max": 1, "nx": 16, "ny": 16}}}"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = RunConfig::from_json(CYL).unwrap();
        assert_eq!(c.gauge(), DualGauge::ParallelCmc);
        assert_eq!(c.transport, TransportSettings::default());
        let s = Scene::new(c).unwrap();
        assert!(s.grid.periodic_y && (s.grid.period_y - TAU).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = CYL.replace("\"nx\"", "\"colour\": 1, \"nx\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(QsError::ConfigInvalid(_))));
        let bad = CYL.replace("}}}", "}}, \"pipeline\": [{\"op\": \"rho\", \"rho\": [1, 1], \"section\": {\"source\": \"monodromy\", \"multiplier\": 0, \"extra\": 2}}]}");
        assert!(matches!(RunConfig::from_json(&bad), Err(QsError::ConfigInvalid(_))));
        let bad = CYL.replace("}}}", "}}, \"pipeline\": [{\"op\": \"rho\", \"rho\": [1, 1], \"bogus\": 0, \"section\": {\"source\": \"monodromy\", \"multiplier\": 0}}]}");
        assert!(matches!(RunConfig::from_json(&bad), Err(QsError::ConfigInvalid(_))));
    }

    #[test]
    fn steps_parse() {
        let text = CYL.replace(
            "}}}",
            r#"}}, "pipeline": [
                {"op": "mu", "mu": [0.5, 0.5], "section": {"source": "initial", "alpha": [1, 0, 1, 0]}},
                {"op": "classical", "r": 0.75, "t0": [0, 0, 1, 0]},
                {"op": "rho", "rho": [1, 1], "section": {"source": "cylinder_oracle", "which": "one_plus"}}
            ]}"#,
        );
        let c = RunConfig::from_json(&text).unwrap();
        assert_eq!(c.pipeline.len(), 3);
        assert_eq!(c.pipeline[2].name(), "rho");
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = RunConfig::from_json(CYL).unwrap();
        let b = RunConfig::from_json(&CYL.replace(' ', "")).unwrap();
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn profile_errors_are_reported() {
        let text = r#"{"surface": {"type": "revolution", "profile": {"p": "x", "q": "2"}, "grid": {"x_min": 0, "x_max": 1, "nx": 8, "ny": 8}}}"#;
        let c = RunConfig::from_json(text).unwrap();
        assert!(matches!(Scene::new(c), Err(QsError::ProfileInvalid(_))));
    }

    #[test]
    fn round_sphere_has_no_parallel_dual() {
        let text = r#"{"surface": {"type": "revolution", "profile": {"p": "tanh(x)", "q": "sech(x)"},
            "grid": {"x_min": -1, "x_max": 1, "nx": 16, "ny": 16}}, "dual_gauge": "parallel_cmc"}"#;
        let s = Scene::new(RunConfig::from_json(text).unwrap()).unwrap();
        assert!(matches!(s.dual(), Err(QsError::RoundSphere(_))));
    }
}
