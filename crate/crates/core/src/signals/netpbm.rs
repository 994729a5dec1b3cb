//! Binary 8-bit PGM (`P5`) and PPM (`P6`).

use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

pub fn read_pnm(path: &Path) -> Result<Image> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pnm(&bytes, &path.display().to_string())
}

/// Writes `P5` for one channel and `P6` for three; values are clamped and rounded.
pub fn write_pnm(path: &Path, image: &Image) -> Result<()> {
    let bytes = encode_pnm(image)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn encode_pnm(image: &Image) -> Result<Vec<u8>> {
    let magic = match image.channels {
        1 => "P5",
        3 => "P6",
        c => return Err(Error::arg(format!("netpbm supports 1 or 3 channels, not {c}"))),
    };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.data.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    Ok(out)
}

pub fn decode_pnm(bytes: &[u8], label: &str) -> Result<Image> {
    let mut cur = Header { bytes, pos: 0, line: 1, label };
    let magic = cur.token()?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        other => return Err(cur.err(format!("unsupported netpbm magic {other:?}"))),
    };
    let width = cur.number()?;
    let height = cur.number()?;
    let maxval = cur.number()?;
    if maxval == 0 || maxval > 255 {
        return Err(cur.err(format!("only 8-bit images are supported (maxval {maxval})")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !cur.bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(cur.err("missing whitespace after maxval".into()));
    }
    let raster = &bytes[cur.pos + 1..];
    let n = width * height * channels;
    if raster.len() < n {
        return Err(cur.err(format!("raster has {} bytes, expected {n}", raster.len())));
    }
    let scale = 1.0 / maxval as f64;
    let data = raster[..n].iter().map(|&b| (b as f64 * scale).min(1.0)).collect();
    Image::from_data(width, height, channels, data)
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    label: &'a str,
}

impl Header<'_> {
    fn err(&self, msg: String) -> Error {
        Error::Parse {
            path: self.label.to_string(),
            line: self.line,
            msg,
        }
    }

    fn token(&mut self) -> Result<String> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b'#') => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => {
                    if *b == b'\n' {
                        self.line += 1;
                    }
                    self.pos += 1;
                }
                Some(_) => break,
                None => return Err(self.err("unexpected end of header".into())),
            }
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse().map_err(|_| self.err(format!("expected a number, found {t:?}")))
    }
}
