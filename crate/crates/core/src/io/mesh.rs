use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QsError, QsResult};
use crate::quat::Quaternion;
use crate::surfaces::ImmersionField;

/// ℝ⁴ → ℝ³ projection used for mesh export.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Orthogonal projection to `Im ℍ`.
    #[default]
    DropReal,
    DropI,
    DropJ,
    DropK,
    /// Stereographic projection of the sphere `|f| = const` from `|f|·1`.
    Stereographic,
}

impl Projection {
    /// Projected point, or `None` where it is not finite.
    pub fn apply(self, q: Quaternion) -> Option<[f64; 3]> {
        let p = match self {
            Projection::DropReal => [q.x, q.y, q.z],
            Projection::DropI => [q.w, q.y, q.z],
            Projection::DropJ => [q.w, q.x, q.z],
            Projection::DropK => [q.w, q.x, q.y],
            Projection::Stereographic => {
                let r = q.norm();
                let s = r / (r - q.w);
                [q.x * s, q.y * s, q.z * s]
            }
        };
        p.iter().all(|v| v.is_finite()).then_some(p)
    }

    pub fn name(self) -> &'static str {
        match self {
            Projection::DropReal => "drop_real",
            Projection::DropI => "drop_i",
            Projection::DropJ => "drop_j",
            Projection::DropK => "drop_k",
            Projection::Stereographic => "stereographic",
        }
    }
}

/// Per-vertex marker.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexFlag {
    #[default]
    Regular,
    /// The transform is undefined here (vanishing denominator or non-finite value).
    Singular,
    /// The transform is branched here (`f̂ − f` vanishes).
    Branch,
}

impl VertexFlag {
    /// Numeric code used in PLY output and the C interface.
    pub fn code(self) -> u8 {
        match self {
            VertexFlag::Regular => 0,
            VertexFlag::Singular => 1,
            VertexFlag::Branch => 2,
        }
    }
}

/// Provenance written at the top of every mesh file.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub label: String,
    pub spectral: Vec<String>,
    pub projection: Projection,
}

/// A quad mesh ready for export.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshOutput {
    pub vertices: Vec<[f64; 3]>,
    /// Vertex indices (0-based), counter-clockwise in parameter space.
    pub faces: Vec<[usize; 4]>,
    pub flags: Vec<VertexFlag>,
    pub provenance: Provenance,
}

impl MeshOutput {
    /// Grid mesh of a sampled surface. Faces touching flagged or non-finite
    /// vertices are omitted; non-finite vertices are written at the origin and
    /// flagged singular, flagged finite vertices keep their position.
    pub fn from_field(field: &ImmersionField, flags: &[VertexFlag], close_y: bool, provenance: Provenance) -> Self {
        let g = &field.grid;
        let mut out_flags: Vec<VertexFlag> = (0..g.len()).map(|k| flags.get(k).copied().unwrap_or_default()).collect();
        let vertices: Vec<[f64; 3]> = field
            .values
            .iter()
            .enumerate()
            .map(|(k, q)| match provenance.projection.apply(*q) {
                Some(p) if q.is_finite() => p,
                _ => {
                    out_flags[k] = VertexFlag::Singular;
                    [0.0; 3]
                }
            })
            .collect();
        let rows = if close_y { g.ny } else { g.ny - 1 };
        let mut faces = Vec::with_capacity((g.nx - 1) * rows);
        for i in 0..g.nx - 1 {
            for j in 0..rows {
                let j1 = (j + 1) % g.ny;
                let quad = [g.idx(i, j), g.idx(i + 1, j), g.idx(i + 1, j1), g.idx(i, j1)];
                if quad.iter().all(|&v| out_flags[v] == VertexFlag::Regular) {
                    faces.push(quad);
                }
            }
        }
        MeshOutput { vertices, faces, flags: out_flags, provenance }
    }

    /// Whether the last row of a sampled surface joins its first row: the gap
    /// is no larger than twice the largest step between consecutive rows.
    pub fn closes_in_y(field: &ImmersionField) -> bool {
        let g = &field.grid;
        if g.periodic_y {
            return true;
        }
        (0..g.nx).all(|i| {
            let col = &field.values[g.idx(i, 0)..g.idx(i, 0) + g.ny];
            let step = col.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
            let gap = (col[0] - col[g.ny - 1]).norm();
            gap.is_finite() && gap <= 2.0 * step
        })
    }

    fn header(&self, comment: &str) -> String {
        let p = &self.provenance;
        let mut s = String::new();
        let _ = writeln!(s, "{comment} quatsurf mesh");
        let _ = writeln!(s, "{comment} label {}", p.label);
        let _ = writeln!(s, "{comment} config_sha256 {}", p.config_sha256);
        for v in &p.spectral {
            let _ = writeln!(s, "{comment} spectral {v}");
        }
        let _ = writeln!(s, "{comment} projection {}", p.projection.name());
        s
    }

    /// Wavefront OBJ with 17 significant digits; flags go into comment lines.
    pub fn to_obj(&self) -> String {
        let mut s = self.header("#");
        for (name, flag) in [("singular", VertexFlag::Singular), ("branch", VertexFlag::Branch)] {
            let idx: Vec<String> = (0..self.flags.len()).filter(|&k| self.flags[k] == flag).map(|k| (k + 1).to_string()).collect();
            if !idx.is_empty() {
                let _ = writeln!(s, "# {name} {}", idx.join(" "));
            }
        }
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
        }
        s
    }

    /// ASCII PLY with a per-vertex `flag` property.
    pub fn to_ply(&self) -> String {
        let mut s = String::from("ply\nformat ascii 1.0\n");
        s.push_str(&self.header("comment"));
        let _ = writeln!(s, "element vertex {}", self.vertices.len());
        s.push_str("property double x\nproperty double y\nproperty double z\nproperty uchar flag\n");
        let _ = writeln!(s, "element face {}", self.faces.len());
        s.push_str("property list uchar int vertex_indices\nend_header\n");
        for (v, f) in self.vertices.iter().zip(&self.flags) {
            let _ = writeln!(s, "{:.16e} {:.16e} {:.16e} {}", v[0], v[1], v[2], f.code());
        }
        for f in &self.faces {
            let _ = writeln!(s, "4 {} {} {} {}", f[0], f[1], f[2], f[3]);
        }
        s
    }
}

/// Vertices and faces (0-based) of an OBJ file written by [`MeshOutput::to_obj`].
pub fn parse_obj(text: &str) -> QsResult<(Vec<[f64; 3]>, Vec<Vec<usize>>)> {
    let bad = |n: usize, what: &str| QsError::IoError(format!("OBJ line {n}: {what}"));
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts.map(|p| p.parse::<f64>().map_err(|_| bad(n + 1, "bad coordinate"))).collect::<QsResult<_>>()?;
                if c.len() != 3 {
                    return Err(bad(n + 1, "vertex needs three coordinates"));
                }
                vertices.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|p| p.split('/').next().unwrap_or("").parse::<usize>().map_err(|_| bad(n + 1, "bad index")))
                    .collect::<QsResult<_>>()?;
                if idx.iter().any(|&i| i == 0 || i > vertices.len()) {
                    return Err(bad(n + 1, "face index out of range"));
                }
                faces.push(idx.into_iter().map(|i| i - 1).collect());
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

pub fn read_obj(path: &Path) -> QsResult<(Vec<[f64; 3]>, Vec<Vec<usize>>)> {
    parse_obj(&std::fs::read_to_string(path)?)
}
