//! Images as functions on their patch sets.
//!
//! Every pixel `(x, y)` contributes one point: the `s1 x s2` window of
//! intensities centered on it (rows of the window outer, columns inner,
//! channels interleaved per pixel), optionally followed by the scaled pixel
//! coordinates `(lambda1 * x, lambda2 * y)`. Windows that cross the border
//! are completed by mirror reflection about the edge pixel, so index `-1`
//! reads index `1`. The image is the function `u(p_xy) = f(x, y)` on this
//! cloud.

use alloc::format;
use alloc::vec::Vec;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::solver::LabelConstraint;

/// A 1- or 3-channel raster with an observed-pixel mask.
///
/// `width` is the number of columns (`x`), `height` the number of rows (`y`).
/// Values are stored row-major with channels interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
    mask: Vec<bool>,
}

impl ImageBuffer {
    /// A fully observed image.
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!("image dimensions {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidParameter(format!("{channels} channels; expected 1 or 3")));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite pixel value".into()));
        }
        Ok(Self { width, height, channels, data, mask: alloc::vec![true; width * height] })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(width, height, channels, alloc::vec![value; width * height * channels])
    }

    /// Replaces the mask; `true` marks an observed pixel.
    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        self.set_mask(mask)?;
        Ok(self)
    }

    pub fn set_mask(&mut self, mask: Vec<bool>) -> Result<()> {
        if mask.len() != self.pixel_count() {
            return Err(Error::ImageMismatch(format!(
                "mask has {} pixels, image {}x{} has {}",
                mask.len(),
                self.width,
                self.height,
                self.pixel_count()
            )));
        }
        self.mask = mask;
        Ok(())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_fully_observed(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    #[inline]
    pub fn is_observed(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// One channel as a fully observed grayscale image.
    pub fn channel(&self, c: usize) -> Result<ImageBuffer> {
        if c >= self.channels {
            return Err(Error::InvalidParameter(format!("channel {c} of {}", self.channels)));
        }
        let data = self.data.chunks(self.channels).map(|px| px[c]).collect();
        ImageBuffer::new(self.width, self.height, 1, data)
    }

    pub(crate) fn same_geometry(&self, other: &ImageBuffer) -> Result<()> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(Error::ImageMismatch(format!("{}x{} vs {}x{}", self.width, self.height, other.width, other.height)))
        }
    }
}

/// Patch window and semi-local coordinate scales.
///
/// `s1` spans columns and `s2` rows; both must be odd.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchConfig {
    pub s1: usize,
    pub s2: usize,
    pub semi_local: bool,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for PatchConfig {
    /// 11 x 11 semi-local patches; the scales are filled in from the image
    /// by the pipelines.
    fn default() -> Self {
        Self { s1: 11, s2: 11, semi_local: true, lambda1: 0.0, lambda2: 0.0 }
    }
}

impl PatchConfig {
    pub fn plain(s1: usize, s2: usize) -> Self {
        Self { s1, s2, semi_local: false, lambda1: 0.0, lambda2: 0.0 }
    }

    pub fn dim(&self, channels: usize) -> usize {
        self.s1 * self.s2 * channels + if self.semi_local { 2 } else { 0 }
    }
}

/// The patch cloud of an image, one point per pixel in row-major pixel order.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSet {
    pub cloud: PointCloud,
    width: usize,
    height: usize,
}

impl PatchSet {
    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    /// Center pixel `(x, y)` of patch `p`.
    #[inline]
    pub fn pixel_of(&self, p: usize) -> (usize, usize) {
        (p % self.width, p / self.width)
    }

    #[inline]
    pub fn patch_of(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

#[inline]
fn reflect(i: isize, len: usize) -> usize {
    let last = len as isize - 1;
    let r = if i < 0 {
        -i
    } else if i > last {
        2 * last - i
    } else {
        i
    };
    r as usize
}

/// Builds the patch set of `image` (mask is ignored; every pixel contributes).
pub fn extract_patches(image: &ImageBuffer, config: &PatchConfig) -> Result<PatchSet> {
    let (w, h, ch) = (image.width(), image.height(), image.channels());
    if config.s1 % 2 == 0 || config.s2 % 2 == 0 {
        return Err(Error::InvalidParameter(format!("patch size {}x{} must be odd", config.s1, config.s2)));
    }
    if config.s1 > 2 * w - 1 || config.s2 > 2 * h - 1 {
        return Err(Error::InvalidParameter(format!(
            "patch size {}x{} too large for a {w}x{h} image",
            config.s1, config.s2
        )));
    }
    if config.semi_local && !(config.lambda1.is_finite() && config.lambda2.is_finite()) {
        return Err(Error::InvalidParameter("non-finite semi-local scale".into()));
    }
    let hx = (config.s1 / 2) as isize;
    let hy = (config.s2 / 2) as isize;
    let dim = config.dim(ch);
    let mut data = Vec::with_capacity(w * h * dim);
    for y in 0..h {
        for x in 0..w {
            for dy in -hy..=hy {
                let yy = reflect(y as isize + dy, h);
                for dx in -hx..=hx {
                    let xx = reflect(x as isize + dx, w);
                    for c in 0..ch {
                        data.push(image.get(xx, yy, c));
                    }
                }
            }
            if config.semi_local {
                data.push(config.lambda1 * x as f64);
                data.push(config.lambda2 * y as f64);
            }
        }
    }
    Ok(PatchSet { cloud: PointCloud::new(data, dim)?, width: w, height: h })
}

/// Semi-local coordinate scales `3 |f_S|_inf / width` and `3 |f_S|_inf / height`,
/// where `|f_S|_inf` is the largest absolute observed value over all channels.
pub fn semi_local_scales(image: &ImageBuffer) -> Result<(f64, f64)> {
    if image.observed_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let ch = image.channels();
    let max = image
        .data()
        .chunks(ch)
        .zip(image.mask())
        .filter(|(_, &m)| m)
        .flat_map(|(px, _)| px.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((3.0 * max / image.width() as f64, 3.0 * max / image.height() as f64))
}

/// Channel `channel` as a function on the patch set, with the observed pixels
/// as labels.
pub fn function_from_image(
    image: &ImageBuffer,
    patches: &PatchSet,
    channel: usize,
) -> Result<(Vec<f64>, LabelConstraint)> {
    if channel >= image.channels() {
        return Err(Error::InvalidParameter(format!("channel {channel} of {}", image.channels())));
    }
    if patches.width() != image.width() || patches.height() != image.height() {
        return Err(Error::ImageMismatch(format!(
            "patch set {}x{} vs image {}x{}",
            patches.width(),
            patches.height(),
            image.width(),
            image.height()
        )));
    }
    if image.observed_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let u: Vec<f64> = (0..patches.len())
        .map(|p| {
            let (x, y) = patches.pixel_of(p);
            image.get(x, y, channel)
        })
        .collect();
    let labels =
        LabelConstraint::new(patches.len(), (0..patches.len()).filter(|&p| image.mask()[p]).map(|p| (p, u[p])))?;
    Ok((u, labels))
}

/// Writes `u` back into channel `channel` of a copy of `target`: unobserved
/// pixels get `u` clamped to `[0, 255]`, observed pixels keep their values.
pub fn image_from_function(u: &[f64], patches: &PatchSet, channel: usize, target: &ImageBuffer) -> Result<ImageBuffer> {
    if u.len() != patches.len() {
        return Err(Error::ShapeMismatch { expected: patches.len(), actual: u.len() });
    }
    if channel >= target.channels() {
        return Err(Error::InvalidParameter(format!("channel {channel} of {}", target.channels())));
    }
    if patches.width() != target.width() || patches.height() != target.height() {
        return Err(Error::ImageMismatch("patch set and target differ".into()));
    }
    let mut out = target.clone();
    for (p, &v) in u.iter().enumerate() {
        let (x, y) = patches.pixel_of(p);
        if !target.is_observed(x, y) {
            out.set(x, y, channel, v.clamp(0.0, 255.0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn gray(w: usize, h: usize, data: Vec<f64>) -> ImageBuffer {
        ImageBuffer::new(w, h, 1, data).unwrap()
    }

    #[test]
    fn one_by_one_patches_are_pixels() {
        let img = gray(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let ps = extract_patches(&img, &PatchConfig::plain(1, 1)).unwrap();
        assert_eq!(ps.cloud.as_slice(), img.data());
        assert_eq!(ps.cloud.dim(), 1);
    }

    #[test]
    fn corner_patch_reflects_about_edge() {
        // f(x, y) = 10 y + x on a 3x3 image.
        let img = gray(3, 3, (0..9).map(|i| (10 * (i / 3) + i % 3) as f64).collect());
        let ps = extract_patches(&img, &PatchConfig::plain(3, 3)).unwrap();
        // Rows -1, 0, 1 -> 1, 0, 1; columns likewise.
        let expect = [11.0, 10.0, 11.0, 1.0, 0.0, 1.0, 11.0, 10.0, 11.0];
        assert_eq!(ps.cloud.point(ps.patch_of(0, 0)), &expect);
        // Bottom-right corner: rows 1, 2, 1 and columns 1, 2, 1.
        let expect = [11.0, 12.0, 11.0, 21.0, 22.0, 21.0, 11.0, 12.0, 11.0];
        assert_eq!(ps.cloud.point(ps.patch_of(2, 2)), &expect);
    }

    #[test]
    fn dimensions_and_semi_local_coordinates() {
        let img = ImageBuffer::filled(12, 12, 1, 7.0).unwrap();
        let cfg = PatchConfig { lambda1: 2.0, lambda2: 0.5, ..PatchConfig::default() };
        let ps = extract_patches(&img, &cfg).unwrap();
        assert_eq!(ps.cloud.dim(), 123);
        assert_eq!(extract_patches(&img, &PatchConfig::plain(11, 11)).unwrap().cloud.dim(), 121);
        let p = ps.cloud.point(ps.patch_of(5, 3));
        assert_eq!(&p[121..], &[10.0, 1.5]);
        let color = ImageBuffer::filled(12, 12, 3, 7.0).unwrap();
        assert_eq!(extract_patches(&color, &cfg).unwrap().cloud.dim(), 11 * 11 * 3 + 2);
    }

    #[test]
    fn rejects_bad_patch_sizes() {
        let img = ImageBuffer::filled(3, 3, 1, 0.0).unwrap();
        assert!(extract_patches(&img, &PatchConfig::plain(2, 3)).is_err());
        assert!(extract_patches(&img, &PatchConfig::plain(5, 5)).is_ok());
        assert!(extract_patches(&img, &PatchConfig::plain(7, 5)).is_err());
    }

    #[test]
    fn scales() {
        let full = ImageBuffer::filled(255, 255, 1, 255.0).unwrap();
        assert_eq!(semi_local_scales(&full).unwrap(), (3.0, 3.0));
        let zeros = ImageBuffer::filled(4, 4, 1, 0.0).unwrap();
        assert_eq!(semi_local_scales(&zeros).unwrap(), (0.0, 0.0));
        let mut img = ImageBuffer::filled(50, 100, 1, 0.0).unwrap();
        img.set(3, 3, 0, 100.0);
        img.set(4, 4, 0, 200.0);
        let mut mask = vec![true; 5000];
        mask[4 * 50 + 4] = false;
        let img = img.with_mask(mask).unwrap();
        assert_eq!(semi_local_scales(&img).unwrap(), (6.0, 3.0));
        let empty = zeros.with_mask(vec![false; 16]).unwrap();
        assert_eq!(semi_local_scales(&empty), Err(Error::EmptyMask));
    }

    #[test]
    fn function_and_back() {
        let img = gray(2, 2, vec![10.0, 20.0, 30.0, 40.0]).with_mask(vec![true, false, false, false]).unwrap();
        let ps = extract_patches(&img, &PatchConfig::plain(1, 1)).unwrap();
        let (u, labels) = function_from_image(&img, &ps, 0).unwrap();
        assert_eq!(u, vec![10.0, 20.0, 30.0, 40.0]);
        assert_eq!(labels.indices(), &[0]);
        assert_eq!(labels.values(), &[10.0]);

        let out = image_from_function(&[99.0, -5.0, 260.0, 12.5], &ps, 0, &img).unwrap();
        assert_eq!(out.data(), &[10.0, 0.0, 255.0, 12.5]);
        assert_eq!(out.mask(), img.mask());
    }

    #[test]
    fn full_mask_round_trip() {
        let img = ImageBuffer::new(3, 2, 3, (0..18).map(f64::from).collect()).unwrap();
        let ps = extract_patches(&img, &PatchConfig::plain(3, 3)).unwrap();
        let mut out = img.clone();
        for c in 0..3 {
            let (u, labels) = function_from_image(&img, &ps, c).unwrap();
            assert!(labels.is_complete());
            out = image_from_function(&u, &ps, c, &out).unwrap();
        }
        assert_eq!(out, img);
    }

    #[test]
    fn identical_neighborhoods_give_identical_patches() {
        // Vertical stripes: every interior pixel of one column sees the same window.
        let img = gray(8, 8, (0..64).map(|i| ((i % 8) % 2) as f64 * 100.0).collect());
        let ps = extract_patches(&img, &PatchConfig::plain(3, 3)).unwrap();
        assert_eq!(ps.cloud.point(ps.patch_of(3, 2)), ps.cloud.point(ps.patch_of(3, 5)));
        assert_eq!(ps.cloud.point(ps.patch_of(2, 2)), ps.cloud.point(ps.patch_of(4, 6)));
    }
}
