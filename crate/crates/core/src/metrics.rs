use crate::error::{Error, Result};
use crate::patch::ImageBuffer;

/// Peak signal-to-noise ratio `-20 log10(rms(u - gt) / 255)` in decibels,
/// with the RMS taken over every pixel and channel. Identical images give
/// `f64::INFINITY`.
pub fn psnr(u: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    if u.width() != gt.width() || u.height() != gt.height() || u.channels() != gt.channels() {
        return Err(Error::ImageMismatch(alloc::format!(
            "{}x{}x{} vs {}x{}x{}",
            u.width(),
            u.height(),
            u.channels(),
            gt.width(),
            gt.height(),
            gt.channels()
        )));
    }
    let sum: f64 = u.data().iter().zip(gt.data()).map(|(a, b)| (a - b) * (a - b)).sum();
    if sum == 0.0 {
        return Ok(f64::INFINITY);
    }
    let rms = libm::sqrt(sum / u.data().len() as f64);
    Ok(-20.0 * libm::log10(rms / 255.0))
}
