//! Plain-text point samples: one sample per line, `x y v` (2D) or `x y z sdf` (3D).

use std::fmt::Write as _;
use std::path::Path;

use super::{SignalDataset, SignalKind};
use crate::error::{Error, Result};
use crate::tensor::Matrix;

pub fn load_point_samples(path: &Path) -> Result<SignalDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_point_samples(&text, &path.display().to_string())
}

/// Parses sample lines; blank lines and `#` comments are skipped. The domain is
/// the bounding box of the coordinates.
pub fn parse_point_samples(text: &str, label: &str) -> Result<SignalDataset> {
    let err = |line: usize, msg: String| Error::Parse {
        path: label.to_string(),
        line,
        msg,
    };
    let mut width = None;
    let mut coords = Vec::new();
    let mut targets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(i + 1, format!("not a number: {t:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 3 && values.len() != 4 {
            return Err(err(i + 1, format!("expected 3 or 4 values, found {}", values.len())));
        }
        if *width.get_or_insert(values.len()) != values.len() {
            return Err(err(i + 1, "mixed 2D and 3D samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(err(i + 1, "non-finite value".into()));
        }
        let (c, t) = values.split_at(values.len() - 1);
        coords.extend_from_slice(c);
        targets.push(t[0]);
    }
    let Some(width) = width else {
        return Err(err(0, "no samples".into()));
    };
    let n = targets.len();
    let kind = if width == 3 { SignalKind::Sdf2d } else { SignalKind::Sdf3d };
    SignalDataset::with_bounding_box(Matrix::from_vec(n, width - 1, coords)?, Matrix::from_vec(n, 1, targets)?, kind)
}

/// Writes a 2D or 3D scalar dataset; `f64` values use shortest round-trip formatting.
pub fn save_point_samples(ds: &SignalDataset, path: &Path) -> Result<()> {
    if !(2..=3).contains(&ds.in_dim()) || ds.out_dim() != 1 {
        return Err(Error::arg(format!(
            "point files hold 2D or 3D scalar samples, not {}→{}",
            ds.in_dim(),
            ds.out_dim()
        )));
    }
    let mut out = String::with_capacity(ds.len() * 64);
    for r in 0..ds.len() {
        for v in ds.coords.row(r) {
            write!(out, "{v} ").expect("writing to a String");
        }
        writeln!(out, "{}", ds.targets.get(r, 0)).expect("writing to a String");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
