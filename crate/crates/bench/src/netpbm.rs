//! Binary 8-bit PGM (`P5`) and PPM (`P6`).

use std::fs;
use std::path::Path;

use tubal::Tensor3;

use crate::BenchError;

/// Interleaved 8-bit pixels, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// 1 for gray, 3 for RGB.
    pub channels: usize,
    pub pixels: Vec<u8>,
}

impl Image {
    /// Height × width × channels tensor with values in `[0, 255]`.
    pub fn to_tensor(&self) -> Tensor3 {
        let c = self.channels;
        Tensor3::from_fn((self.height, self.width, c), |i, j, k| {
            self.pixels[(i * self.width + j) * c + k] as f64
        })
    }

    /// Rounds to the nearest level and clamps to `[0, 255]`.
    pub fn from_tensor(x: &Tensor3) -> Result<Self, BenchError> {
        let (height, width, channels) = x.dims();
        if channels != 1 && channels != 3 {
            return Err(BenchError::Format(format!(
                "images need 1 or 3 channels, got {channels}"
            )));
        }
        let mut pixels = Vec::with_capacity(height * width * channels);
        for i in 0..height {
            for j in 0..width {
                for k in 0..channels {
                    pixels.push(x.get(i, j, k).round().clamp(0.0, 255.0) as u8);
                }
            }
        }
        Ok(Self {
            width,
            height,
            channels,
            pixels,
        })
    }
}

pub fn encode(img: &Image) -> Vec<u8> {
    let magic = if img.channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<usize, BenchError> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| BenchError::Format("malformed netpbm header".into()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Image, BenchError> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => {
            return Err(BenchError::Format(
                "only binary PGM (P5) and PPM (P6) are supported".into(),
            ))
        }
    };
    let mut h = Header { bytes, pos: 2 };
    let width = h.number()?;
    let height = h.number()?;
    let maxval = h.number()?;
    if maxval != 255 {
        return Err(BenchError::Format(format!(
            "only 8-bit images are supported, maxval {maxval}"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(h.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(BenchError::Format("malformed netpbm header".into()));
    }
    let raster = &bytes[h.pos + 1..];
    let len = width * height * channels;
    if raster.len() < len {
        return Err(BenchError::Format(format!(
            "raster holds {} bytes, expected {len}",
            raster.len()
        )));
    }
    Ok(Image {
        width,
        height,
        channels,
        pixels: raster[..len].to_vec(),
    })
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image, BenchError> {
    decode(&fs::read(path)?)
}

pub fn write_image(path: impl AsRef<Path>, img: &Image) -> Result<(), BenchError> {
    fs::write(path, encode(img))?;
    Ok(())
}
