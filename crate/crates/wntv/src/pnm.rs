//! Binary PGM (P5) and PPM (P6) images with 8-bit samples.
//!
//! Values are written rounded half-up and clamped to `[0, 255]`. Masks are
//! PGM files where any nonzero byte marks an observed pixel; they are
//! written as 255 (observed) and 0 (missing).

use std::fs;
use std::path::Path;

use wntv_core::ImageBuffer;

use crate::error::{Error, PnmError, Result};

/// A decoded header: magic digit, width, height.
struct Header {
    channels: usize,
    width: usize,
    height: usize,
    data_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, PnmError> {
    let bad = |m: &str| PnmError::MalformedHeader(m.to_string());
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(bad("missing P5/P6 magic"));
    }
    let channels = match bytes[1] {
        b'5' => 1,
        b'6' => 3,
        other => return Err(PnmError::MalformedHeader(format!("unsupported magic P{}", other as char))),
    };
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // Whitespace and comments before each field.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(bad("header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(bad("expected a decimal number"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("number out of range"))?;
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(bad("missing whitespace after maxval")),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(bad("zero image dimension"));
    }
    if maxval != 255 {
        return Err(PnmError::UnsupportedDepth(maxval));
    }
    Ok(Header { channels, width: width as usize, height: height as usize, data_offset: pos })
}

/// Decodes a P5 or P6 file held in memory.
pub fn decode(bytes: &[u8]) -> Result<ImageBuffer> {
    let h = parse_header(bytes)?;
    let expected = h.width * h.height * h.channels;
    let payload = &bytes[h.data_offset..];
    if payload.len() < expected {
        return Err(PnmError::Truncated { expected, found: payload.len() }.into());
    }
    let data = payload[..expected].iter().map(|&b| f64::from(b)).collect();
    Ok(ImageBuffer::new(h.width, h.height, h.channels, data)?)
}

#[inline]
fn quantize(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn encode(image: &ImageBuffer) -> Vec<u8> {
    let magic = if image.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.data().iter().map(|&v| quantize(v)));
    out
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Reads an image and checks its channel count.
pub fn read_image_channels(path: impl AsRef<Path>, channels: usize) -> Result<ImageBuffer> {
    let img = read_image(path)?;
    if img.channels() != channels {
        return Err(PnmError::ChannelMismatch { expected: channels, found: img.channels() }.into());
    }
    Ok(img)
}

pub fn write_image(image: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(image)).map_err(|e| Error::io(path, e))
}

/// A pixel mask with its dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub observed: Vec<bool>,
}

impl Mask {
    /// Checks the mask against an image's dimensions.
    pub fn fits(&self, image: &ImageBuffer) -> Result<()> {
        if self.width == image.width() && self.height == image.height() {
            Ok(())
        } else {
            Err(wntv_core::Error::ImageMismatch(format!(
                "mask is {}x{}, image is {}x{}",
                self.width,
                self.height,
                image.width(),
                image.height()
            ))
            .into())
        }
    }
}

pub fn decode_mask(bytes: &[u8]) -> Result<Mask> {
    let h = parse_header(bytes)?;
    if h.channels != 1 {
        return Err(PnmError::ChannelMismatch { expected: 1, found: h.channels }.into());
    }
    let expected = h.width * h.height;
    let payload = &bytes[h.data_offset..];
    if payload.len() < expected {
        return Err(PnmError::Truncated { expected, found: payload.len() }.into());
    }
    Ok(Mask { width: h.width, height: h.height, observed: payload[..expected].iter().map(|&b| b != 0).collect() })
}

pub fn encode_mask(mask: &Mask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    out.extend(mask.observed.iter().map(|&m| if m { 255u8 } else { 0 }));
    out
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_mask(&bytes)
}

pub fn write_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_mask(mask)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_two_by_two() {
        let img = decode(b"P5 2 2 255 \x00\x10\x20\xff").unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (2, 2, 1));
        assert_eq!(img.data(), &[0.0, 16.0, 32.0, 255.0]);
    }

    #[test]
    fn comments_in_header() {
        let img = decode(b"P6\n# made by hand\n1 1\n# depth\n255\n\x01\x02\x03").unwrap();
        assert_eq!(img.data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn distinct_errors() {
        let err = |b: &[u8]| match decode(b) {
            Err(Error::Pnm(e)) => e,
            other => panic!("unexpected {other:?}"),
        };
        assert!(matches!(err(b"P3 1 1 255\n0 0 0"), PnmError::MalformedHeader(_)));
        assert!(matches!(err(b"P5 1 x 255\n\x00"), PnmError::MalformedHeader(_)));
        assert_eq!(err(b"P5 1 1 65535\n\x00\x00"), PnmError::UnsupportedDepth(65535));
        assert_eq!(err(b"P5 2 2 255\n\x00\x00\x00"), PnmError::Truncated { expected: 4, found: 3 });
    }

    #[test]
    fn rounding_and_clamping() {
        let img = ImageBuffer::new(5, 1, 1, vec![-3.0, 0.5, 1.49, 254.5, 300.0]).unwrap();
        let back = decode(&encode(&img)).unwrap();
        assert_eq!(back.data(), &[0.0, 1.0, 1.0, 255.0, 255.0]);
    }

    #[test]
    fn mask_values() {
        let m = decode_mask(b"P5 3 1 255\n\xff\x00\x80").unwrap();
        assert_eq!(m.observed, vec![true, false, true]);
        let all = decode_mask(b"P5 2 1 255\n\xff\xff").unwrap();
        assert!(all.observed.iter().all(|&b| b));
        let none = decode_mask(b"P5 2 1 255\n\x00\x00").unwrap();
        assert!(none.observed.iter().all(|&b| !b));
        assert_eq!(decode_mask(&encode_mask(&m)).unwrap(), m);
    }
}
