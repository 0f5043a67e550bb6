//! Patch-graph image inpainting and colorization.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_weight_graph, GraphParams, SparseWeightGraph};
use crate::metrics::psnr;
use crate::patch::{extract_patches, function_from_image, image_from_function, semi_local_scales};
use crate::patch::{ImageBuffer, PatchConfig, PatchSet};
use crate::solver::{solve, Solution, SolverKind, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InpaintOptions {
    /// Number of rebuild-graph-and-solve cycles.
    pub outer_iters: usize,
    pub rng_seed: u64,
    pub solver: SolverKind,
    pub solver_options: SolverOptions,
    /// When `semi_local` is set the scales are recomputed from the observed
    /// pixels and the given `lambda1`/`lambda2` are ignored.
    pub patch_config: PatchConfig,
    pub graph: GraphParams,
}

impl Default for InpaintOptions {
    fn default() -> Self {
        Self {
            outer_iters: 10,
            rng_seed: 0,
            solver: SolverKind::Wntv,
            solver_options: SolverOptions::default(),
            patch_config: PatchConfig::default(),
            graph: GraphParams::PATCHES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorizeOptions {
    pub solver: SolverKind,
    pub solver_options: SolverOptions,
    pub patch_config: PatchConfig,
    pub graph: GraphParams,
}

impl Default for ColorizeOptions {
    fn default() -> Self {
        Self {
            solver: SolverKind::Wntv,
            solver_options: SolverOptions::default(),
            patch_config: PatchConfig::default(),
            graph: GraphParams::PATCHES,
        }
    }
}

/// Per-cycle, per-channel progress of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    /// 1-based outer cycle.
    pub cycle: usize,
    pub channel: usize,
    /// PSNR of this channel against ground truth, when supplied.
    pub psnr: Option<f64>,
    pub bregman_iterations: usize,
    /// Final relative Bregman residual; `None` for the quadratic solvers.
    pub residual: Option<f64>,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub image: ImageBuffer,
    pub records: Vec<CycleRecord>,
    /// Whole-image PSNR after each cycle, when ground truth is supplied.
    pub cycle_psnr: Vec<f64>,
}

/// Replaces unobserved pixels by uniform values in `[0, 255]` drawn from a
/// generator seeded with `rng_seed`.
pub fn random_fill_init(image: &ImageBuffer, rng_seed: u64) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = image.clone();
    for y in 0..image.height() {
        for x in 0..image.width() {
            if !image.is_observed(x, y) {
                for c in 0..image.channels() {
                    out.set(x, y, c, rng.random_range(0.0..=255.0));
                }
            }
        }
    }
    out
}

/// A mask with exactly `round(rate * width * height)` observed pixels chosen
/// uniformly without replacement.
pub fn subsample_mask(width: usize, height: usize, rate: f64, rng_seed: u64) -> Result<Vec<bool>> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter(format!("sampling rate {rate} not in (0, 1]")));
    }
    let total = width * height;
    let count = libm::round(rate * total as f64) as usize;
    if count == 0 {
        return Err(Error::EmptyMask);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut mask = alloc::vec![false; total];
    for i in index::sample(&mut rng, total, count) {
        mask[i] = true;
    }
    Ok(mask)
}

fn patch_graph(patches: &PatchSet, params: GraphParams) -> Result<SparseWeightGraph> {
    build_weight_graph(&patches.cloud, params).map_err(|e| match e {
        Error::DegenerateBandwidth { point } => {
            let (x, y) = patches.pixel_of(point);
            Error::DegeneratePatch { x, y }
        }
        e => e,
    })
}

/// Solves one scalar problem per channel on a shared graph.
fn solve_channels(
    graph: &SparseWeightGraph,
    patches: &PatchSet,
    observed: &ImageBuffer,
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<Vec<Solution>> {
    let run = |c: usize| -> Result<Solution> {
        let (_, labels) = function_from_image(observed, patches, c)?;
        solve(solver, graph, &labels, opts)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..observed.channels()).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..observed.channels()).map(run).collect()
    }
}

fn check_truth(image: &ImageBuffer, truth: Option<&ImageBuffer>) -> Result<()> {
    if let Some(t) = truth {
        image.same_geometry(t)?;
        if t.channels() != image.channels() {
            return Err(Error::ImageMismatch(format!("{} vs {} channels", image.channels(), t.channels())));
        }
    }
    Ok(())
}

fn with_scales(config: PatchConfig, source: &ImageBuffer) -> Result<PatchConfig> {
    if !config.semi_local {
        return Ok(config);
    }
    let (lambda1, lambda2) = semi_local_scales(source)?;
    Ok(PatchConfig { lambda1, lambda2, ..config })
}

fn channel_psnr(image: &ImageBuffer, truth: Option<&ImageBuffer>, c: usize) -> Result<Option<f64>> {
    truth.map(|t| psnr(&image.channel(c)?, &t.channel(c)?)).transpose()
}

fn records_for(
    cycle: usize,
    solutions: Vec<Solution>,
    image: &ImageBuffer,
    truth: Option<&ImageBuffer>,
) -> Result<Vec<CycleRecord>> {
    solutions
        .into_iter()
        .enumerate()
        .map(|(channel, s)| {
            Ok(CycleRecord {
                cycle,
                channel,
                psnr: channel_psnr(image, truth, channel)?,
                bregman_iterations: s.iterations,
                residual: s.final_residual(),
                residual_history: s.residual_history,
            })
        })
        .collect()
}

/// Iterative patch-graph inpainting.
///
/// Unobserved pixels start from random values; each cycle rebuilds the patch
/// set and weight graph from the current image, interpolates every channel
/// from the observed pixels, and writes the result back. Observed pixels are
/// never modified. `truth`, if given, is only used for PSNR reporting.
pub fn inpaint(image: &ImageBuffer, opts: &InpaintOptions, truth: Option<&ImageBuffer>) -> Result<PipelineOutput> {
    inpaint_with(image, opts, truth, |_| {})
}

/// [`inpaint`], calling `on_cycle` with each cycle's records as soon as the
/// cycle finishes.
pub fn inpaint_with<F: FnMut(&[CycleRecord])>(
    image: &ImageBuffer,
    opts: &InpaintOptions,
    truth: Option<&ImageBuffer>,
    mut on_cycle: F,
) -> Result<PipelineOutput> {
    if opts.outer_iters == 0 {
        return Err(Error::InvalidParameter("outer_iters must be at least 1".into()));
    }
    check_truth(image, truth)?;
    if image.observed_count() == 0 {
        return Err(Error::EmptyMask);
    }
    if image.is_fully_observed() {
        let cycle_psnr = match truth {
            Some(t) => alloc::vec![psnr(image, t)?],
            None => Vec::new(),
        };
        return Ok(PipelineOutput { image: image.clone(), records: Vec::new(), cycle_psnr });
    }
    let config = with_scales(opts.patch_config, image)?;
    let mut current = random_fill_init(image, opts.rng_seed);
    let mut records = Vec::new();
    let mut cycle_psnr = Vec::new();
    for cycle in 1..=opts.outer_iters {
        let patches = extract_patches(&current, &config)?;
        let graph = patch_graph(&patches, opts.graph)?;
        let solutions = solve_channels(&graph, &patches, image, opts.solver, &opts.solver_options)?;
        for (c, s) in solutions.iter().enumerate() {
            current = image_from_function(&s.u, &patches, c, &current)?;
        }
        let fresh = records_for(cycle, solutions, &current, truth)?;
        on_cycle(&fresh);
        records.extend(fresh);
        if let Some(t) = truth {
            cycle_psnr.push(psnr(&current, t)?);
        }
    }
    Ok(PipelineOutput { image: current, records, cycle_psnr })
}

/// Colorizes a grayscale image from sparse color samples.
///
/// The patch graph is built once from `gray`; the red, green and blue
/// channels are interpolated separately on it from the observed pixels of
/// `samples`.
pub fn colorize(
    gray: &ImageBuffer,
    samples: &ImageBuffer,
    opts: &ColorizeOptions,
    truth: Option<&ImageBuffer>,
) -> Result<PipelineOutput> {
    if gray.channels() != 1 {
        return Err(Error::InvalidParameter(format!("gray image has {} channels", gray.channels())));
    }
    if samples.channels() != 3 {
        return Err(Error::InvalidParameter(format!("color samples have {} channels", samples.channels())));
    }
    gray.same_geometry(samples)?;
    check_truth(samples, truth)?;
    if samples.observed_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let geometry = gray.clone().with_mask(alloc::vec![true; gray.pixel_count()])?;
    let config = with_scales(opts.patch_config, &geometry)?;
    let patches = extract_patches(&geometry, &config)?;
    let graph = patch_graph(&patches, opts.graph)?;
    let solutions = solve_channels(&graph, &patches, samples, opts.solver, &opts.solver_options)?;
    let mut image = samples.clone();
    for (c, s) in solutions.iter().enumerate() {
        image = image_from_function(&s.u, &patches, c, &image)?;
    }
    let records = records_for(1, solutions, &image, truth)?;
    let cycle_psnr = match truth {
        Some(t) => alloc::vec![psnr(&image, t)?],
        None => Vec::new(),
    };
    Ok(PipelineOutput { image, records, cycle_psnr })
}
