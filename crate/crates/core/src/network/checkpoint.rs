//! Binary checkpoint container.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! offset  size  field
//! 0       8     magic "HOSCMLP\0"
//! 8       4     u32 format version (1)
//! 12      4     u32 in_dim
//! 16      4     u32 out_dim
//! 20      4     u32 hidden_width
//! 24      4     u32 hidden_layers (L)
//! 28      1     u8 init scheme (0 = siren uniform, 1 = standard uniform)
//! 29      8     u64 seed
//! 37      18·L  per hidden layer: u8 kind (0 relu, 1 sine, 2 hosc, 3 square),
//!               u8 trainable, f64 freq, f64 initial sharpness (0 if none)
//! ...           per affine layer l = 0..=L: weights fan_in·fan_out f64
//!               (row-major, fan_in rows), then bias fan_out f64
//! ...           L f64 log-sharpness values
//! ```
//!
//! Floats are stored by bit pattern, so a load of a save reproduces the
//! network exactly.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{InitScheme, Mlp, MlpSpec};
use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::tensor::Matrix;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"HOSCMLP\0";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(mlp: &Mlp, mut w: W) -> std::io::Result<()> {
    let spec = mlp.spec();
    let mut buf = Vec::with_capacity(64 + 8 * spec.parameter_count());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    for dim in [spec.in_dim, spec.out_dim, spec.hidden_width, spec.hidden_layers()] {
        buf.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    buf.push(match spec.init {
        InitScheme::SirenUniform => 0,
        InitScheme::StandardUniform => 1,
    });
    buf.extend_from_slice(&spec.seed.to_le_bytes());
    for act in &spec.activations {
        let kind = match act {
            Activation::Relu => 0u8,
            Activation::Sine { .. } => 1,
            Activation::Hosc { .. } => 2,
            Activation::SquareWave => 3,
        };
        buf.push(kind);
        buf.push(act.is_trainable() as u8);
        buf.extend_from_slice(&act.frequency().to_le_bytes());
        buf.extend_from_slice(&act.sharpness().unwrap_or(0.0).to_le_bytes());
    }
    for (w, b) in mlp.weights().iter().zip(mlp.biases()) {
        for v in w.as_slice().iter().chain(b.as_slice()) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    for v in mlp.log_sharp() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Contract(format!(
                "checkpoint truncated at byte {} (need {n} more)",
                self.pos
            )));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Mlp> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::io("<checkpoint stream>", e))?;
    let mut c = Cursor { bytes: &bytes, pos: 0 };
    if c.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Contract("not a checkpoint (bad magic)".into()));
    }
    let version = c.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Contract(format!("unsupported checkpoint version {version}")));
    }
    let in_dim = c.u32()? as usize;
    let out_dim = c.u32()? as usize;
    let hidden_width = c.u32()? as usize;
    let depth = c.u32()? as usize;
    let init = match c.u8()? {
        0 => InitScheme::SirenUniform,
        1 => InitScheme::StandardUniform,
        other => return Err(Error::Contract(format!("unknown init scheme tag {other}"))),
    };
    let seed = c.u64()?;
    let mut activations = Vec::with_capacity(depth);
    for _ in 0..depth {
        let kind = c.u8()?;
        let trainable = c.u8()? != 0;
        let freq = c.f64()?;
        let sharp = c.f64()?;
        activations.push(match kind {
            0 => Activation::Relu,
            1 => Activation::Sine { freq },
            2 => Activation::Hosc {
                sharp,
                freq,
                trainable,
            },
            3 => Activation::SquareWave,
            other => return Err(Error::Contract(format!("unknown activation tag {other}"))),
        });
    }
    let spec = MlpSpec {
        in_dim,
        out_dim,
        hidden_width,
        activations,
        init,
        seed,
    };
    spec.validate()?;
    let mut weights = Vec::with_capacity(depth + 1);
    let mut biases = Vec::with_capacity(depth + 1);
    for (fan_in, fan_out) in spec.layer_dims() {
        weights.push(Matrix::from_vec(fan_in, fan_out, c.f64s(fan_in * fan_out)?)?);
        biases.push(Matrix::from_vec(1, fan_out, c.f64s(fan_out)?)?);
    }
    let log_sharp = c.f64s(depth)?;
    if c.pos != bytes.len() {
        return Err(Error::Contract(format!(
            "{} trailing bytes after checkpoint payload",
            bytes.len() - c.pos
        )));
    }
    Mlp::from_parts(spec, weights, biases, log_sharp)
}

pub fn save_checkpoint(mlp: &Mlp, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_checkpoint(mlp, &mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Mlp> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(std::io::BufReader::new(f))
}
