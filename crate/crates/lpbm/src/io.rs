//! JSON and CSV serialization for measures, bodies, and solver reports.
//!
//! All JSON writers emit pretty-printed output with a trailing newline and
//! preserve f64 values exactly, so a read followed by a write reproduces a
//! previously written file byte for byte.

use std::path::Path;
use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::body::{AnyBody, Polytope, SampledBody};
use crate::error::{LpbmError, Result};
use crate::minkowski::SolverReport;
use crate::spherical::{DirectionGrid, DiscreteMeasure};

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    dim: usize,
    directions: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FacetFile {
    normal: Vec<f64>,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
struct BodyFile {
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    facets: Option<Vec<FacetFile>>,
}

#[derive(Serialize, Deserialize)]
struct SampledFile {
    dim: usize,
    resolution: usize,
    support_values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    iterations: usize,
    final_residual: f64,
    converged: bool,
}

fn vec_of(v: &Vector3<f64>, dim: usize) -> Vec<f64> {
    if dim == 2 {
        vec![v.x, v.y]
    } else {
        vec![v.x, v.y, v.z]
    }
}

fn vec3_from(coords: &[f64], dim: usize) -> Result<Vector3<f64>> {
    if coords.len() != dim {
        return Err(LpbmError::Invalid(format!(
            "expected {dim} coordinates, found {}",
            coords.len()
        )));
    }
    Ok(Vector3::new(
        coords[0],
        coords[1],
        if dim == 3 { coords[2] } else { 0.0 },
    ))
}

fn render<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn measure_to_json(m: &DiscreteMeasure) -> Result<String> {
    render(&MeasureFile {
        dim: m.dim(),
        directions: m.directions().iter().map(|u| vec_of(u, m.dim())).collect(),
        masses: m.masses().to_vec(),
    })
}

pub fn measure_from_json(text: &str) -> Result<DiscreteMeasure> {
    let file: MeasureFile = serde_json::from_str(text)?;
    let atoms: Vec<(Vector3<f64>, f64)> = file
        .directions
        .iter()
        .zip(&file.masses)
        .map(|(c, &m)| Ok((vec3_from(c, file.dim)?, m)))
        .collect::<Result<_>>()?;
    DiscreteMeasure::from_atoms(file.dim, &atoms)
}

/// Serializes a polytope in vertex form.
pub fn polytope_to_json(p: &Polytope) -> Result<String> {
    render(&BodyFile {
        dim: p.dim(),
        vertices: Some(p.vertices().iter().map(|v| vec_of(v, p.dim())).collect()),
        facets: None,
    })
}

/// Serializes a polytope in facet (halfspace) form.
pub fn polytope_to_facet_json(p: &Polytope) -> Result<String> {
    render(&BodyFile {
        dim: p.dim(),
        vertices: None,
        facets: Some(
            p.facets()
                .iter()
                .map(|f| FacetFile {
                    normal: vec_of(&f.normal, p.dim()),
                    offset: f.offset,
                })
                .collect(),
        ),
    })
}

/// Reads a polytope from either vertex or facet form; exactly one of the two
/// fields must be present.
pub fn polytope_from_json(text: &str) -> Result<Polytope> {
    let file: BodyFile = serde_json::from_str(text)?;
    match (file.vertices, file.facets) {
        (Some(verts), None) => {
            let pts: Vec<Vector3<f64>> = verts
                .iter()
                .map(|c| vec3_from(c, file.dim))
                .collect::<Result<_>>()?;
            Polytope::from_points(file.dim, &pts)
        }
        (None, Some(facets)) => {
            let normals: Vec<Vector3<f64>> = facets
                .iter()
                .map(|f| vec3_from(&f.normal, file.dim))
                .collect::<Result<_>>()?;
            let offsets: Vec<f64> = facets.iter().map(|f| f.offset).collect();
            Polytope::from_halfspaces(file.dim, &normals, &offsets)
        }
        _ => Err(LpbmError::Invalid(
            "body file needs exactly one of `vertices` or `facets`".into(),
        )),
    }
}

pub fn sampled_to_json(s: &SampledBody) -> Result<String> {
    render(&SampledFile {
        dim: s.grid().dim(),
        resolution: s.grid().len(),
        support_values: s.support_values().to_vec(),
    })
}

/// Rebuilds the sampled body on a freshly constructed grid of the recorded
/// resolution; the recorded count must match the grid exactly.
pub fn sampled_from_json(text: &str) -> Result<SampledBody> {
    let file: SampledFile = serde_json::from_str(text)?;
    let grid = Arc::new(DirectionGrid::build(file.dim, file.resolution)?);
    if grid.len() != file.support_values.len() {
        return Err(LpbmError::Invalid(format!(
            "grid of resolution {} has {} directions but file holds {} values",
            file.resolution,
            grid.len(),
            file.support_values.len()
        )));
    }
    SampledBody::new(grid, file.support_values)
}

pub fn report_to_json(r: &SolverReport) -> Result<String> {
    render(&ReportFile {
        iterations: r.iterations,
        final_residual: r.final_residual,
        converged: r.converged,
    })
}

pub fn body_to_json(b: &AnyBody) -> Result<String> {
    match b {
        AnyBody::Polytope(p) => polytope_to_json(p),
        AnyBody::Sampled(s) => sampled_to_json(s),
    }
}

/// CSV rows `x,y`, one planar vertex per line in boundary order.
pub fn polygon_to_csv(p: &Polytope) -> Result<String> {
    if p.dim() != 2 {
        return Err(LpbmError::NotPlanar);
    }
    let mut out = String::from("x,y\n");
    for v in p.vertices() {
        out.push_str(&format!("{},{}\n", v.x, v.y));
    }
    Ok(out)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn write_string(path: &Path, content: &str) -> Result<()> {
    Ok(std::fs::write(path, content)?)
}
