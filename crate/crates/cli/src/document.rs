//! Versioned shape files.
//!
//! A file holds one document or an array of them:
//!
//! ```json
//! { "format_version": 1, "name": "square", "kind": "polygon",
//!   "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]] }
//! ```
//!
//! Fourier modes are rows `[a_k, a'_k, b_k, b'_k]` of
//! `x = a_0 + Σ a_k cos kσ + a'_k sin kσ`, `y = b_0 + Σ b_k cos kσ + b'_k sin kσ`.

use std::fs;
use std::path::Path;

use isomoment::fourier::FourierMode;
use isomoment::{Ellipsoid, FourierBoundary, Polygon, Shape, SimplicialBody};
use serde::{Deserialize, Serialize};

use crate::report::to_precise_json;
use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeDocument {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Polygon { vertices: Vec<[f64; 2]> },
    Simplicial { vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>> },
    Ellipsoid { center: Vec<f64>, semi_axes: Vec<f64> },
    Fourier { a0: f64, b0: f64, modes: Vec<[f64; 4]> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FileContents {
    One(ShapeDocument),
    Many(Vec<ShapeDocument>),
}

impl ShapeDocument {
    pub fn from_shape(shape: &Shape, name: Option<String>) -> Self {
        let payload = match shape {
            Shape::Polygon(p) => Payload::Polygon { vertices: p.vertices().to_vec() },
            Shape::Simplicial(b) => {
                Payload::Simplicial { vertices: b.vertices().to_vec(), simplices: b.simplices().to_vec() }
            }
            Shape::Ellipsoid(e) => {
                Payload::Ellipsoid { center: e.center().to_vec(), semi_axes: e.semi_axes().to_vec() }
            }
            Shape::Fourier(fb) => fourier_payload(fb),
        };
        Self { format_version: FORMAT_VERSION, name, payload }
    }

    /// Builds the shape, enforcing the invariants of its type.
    pub fn to_shape(&self) -> Result<Shape, CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Input(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let shape: Shape = match &self.payload {
            Payload::Polygon { vertices } => Polygon::new(vertices.clone())?.into(),
            Payload::Simplicial { vertices, simplices } => {
                SimplicialBody::from_simplices(vertices.clone(), simplices.clone())?.into()
            }
            Payload::Ellipsoid { center, semi_axes } => Ellipsoid::new(center.clone(), semi_axes.clone())?.into(),
            Payload::Fourier { a0, b0, modes } => {
                let modes =
                    modes.iter().map(|m| FourierMode { x_cos: m[0], x_sin: m[1], y_cos: m[2], y_sin: m[3] }).collect();
                let fb = FourierBoundary::new(*a0, *b0, modes)?;
                fb.validate()?;
                fb.into()
            }
        };
        Ok(shape)
    }
}

pub fn fourier_payload(fb: &FourierBoundary) -> Payload {
    Payload::Fourier {
        a0: fb.a0,
        b0: fb.b0,
        modes: fb.modes.iter().map(|m| [m.x_cos, m.x_sin, m.y_cos, m.y_sin]).collect(),
    }
}

pub fn parse_documents(text: &str) -> Result<Vec<ShapeDocument>, CliError> {
    let contents: FileContents = serde_json::from_str(text).map_err(|e| {
        // the untagged wrapper hides the real cause; retry as a single document for a useful message
        match serde_json::from_str::<ShapeDocument>(text) {
            Err(inner) => CliError::Input(format!("malformed shape file: {inner}")),
            Ok(_) => CliError::Input(format!("malformed shape file: {e}")),
        }
    })?;
    Ok(match contents {
        FileContents::One(d) => vec![d],
        FileContents::Many(v) => v,
    })
}

/// Reads and validates every shape in a file, labelling unnamed shapes by
/// their position.
pub fn load_shapes(path: &Path) -> Result<Vec<(String, Shape)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_documents(&text)?
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let shape =
                d.to_shape().map_err(|e| CliError::Input(format!("{}: shape {i}: {}", path.display(), e.message())))?;
            Ok((d.name.clone().unwrap_or_else(|| format!("shape-{i}")), shape))
        })
        .collect()
}

pub fn documents_to_string(docs: &[ShapeDocument]) -> String {
    to_precise_json(&docs)
}
