//! Bit-exact JSON serialization of grid fields.
//!
//! Schema: `{nx, ny, x0, y0, dx, dy, mask?: [bool…], values: [float…]}`
//! with values row-major and doubles printed as shortest round-trip
//! decimals, so read → write is byte-identical.

use super::GridField;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
pub struct FieldFile {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<bool>>,
    pub values: Vec<f64>,
}

impl FieldFile {
    pub fn from_field(f: &GridField) -> Self {
        FieldFile {
            nx: f.nx(),
            ny: f.ny(),
            x0: f.x0(),
            y0: f.y0(),
            dx: f.dx(),
            dy: f.dy(),
            mask: f.mask().map(|m| m.to_vec()),
            values: f.values().to_vec(),
        }
    }

    pub fn into_field(self) -> Result<GridField> {
        GridField::new(
            self.nx,
            self.ny,
            (self.x0, self.y0),
            (self.dx, self.dy),
            self.values,
            self.mask,
        )
    }
}

pub fn write_field(path: &Path, f: &GridField) -> Result<()> {
    let file = FieldFile::from_field(f);
    let text = serde_json::to_string(&file)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<GridField> {
    let text = std::fs::read_to_string(path)?;
    let file: FieldFile = serde_json::from_str(&text)?;
    file.into_field()
}
