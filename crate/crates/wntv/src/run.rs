//! Executes a validated [`RunConfig`].

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use wntv_core::pipeline::{colorize, inpaint_with, subsample_mask, ColorizeOptions, CycleRecord, InpaintOptions};
use wntv_core::ssl::{accuracy, run_ssl_on_graph, sample_label_set, sample_per_class};
use wntv_core::{build_weight_graph, ImageBuffer};

use crate::config::{Command, RunConfig};
use crate::error::{Error, Result};
use crate::idx::load_mnist_idx;
use crate::metrics::{MetricsLog, MetricsRecord, Psnr, Summary};
use crate::pnm::{read_image, read_image_channels, read_mask, write_image};

/// Mask draws use a seed distinct from the random fill of the inpainting
/// initializer.
const MASK_SEED_OFFSET: u64 = 0x6d61_736b;

pub fn mask_seed(seed: u64) -> u64 {
    seed ^ MASK_SEED_OFFSET
}

/// Runs the configured command, writing the output, metrics log and summary.
///
/// The configuration is validated and every input is read before any
/// output file is created.
pub fn run(config: &RunConfig) -> Result<Summary> {
    config.validate()?;
    let summary = match config.command()? {
        Command::Ssl => run_ssl(config)?,
        Command::Inpaint => run_inpaint(config)?,
        Command::Colorize => run_colorize(config)?,
    };
    if let Some(p) = &config.io.summary {
        summary.write(p)?;
    }
    Ok(summary)
}

fn base_summary(config: &RunConfig) -> Result<Summary> {
    Ok(Summary {
        run_id: config.run_id()?,
        command: config.command()?.name().to_string(),
        solver: config.solver_kind()?.to_string(),
        seed: config.run.seed,
        lambda: config.solver.lambda,
        mu: config.solver.mu,
        psnr: None,
        cycle_psnr: Vec::new(),
        accuracy: None,
        accuracy_unlabeled: None,
        labeled: 0,
        points: 0,
        max_bregman_iterations: 0,
        max_final_residual: None,
        output: config.io.output.clone(),
    })
}

fn required<'a>(p: &'a Option<std::path::PathBuf>, key: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Config(format!("io.{key} is required")))
}

fn fold_records(summary: &mut Summary, records: &[CycleRecord]) {
    for r in records {
        summary.max_bregman_iterations = summary.max_bregman_iterations.max(r.bregman_iterations);
        if let Some(res) = r.residual {
            summary.max_final_residual = Some(summary.max_final_residual.map_or(res, |m: f64| m.max(res)));
        }
    }
}

fn log_records(log: &mut MetricsLog, run_id: &str, records: &[CycleRecord], start: Instant) -> Result<()> {
    let wall_seconds = start.elapsed().as_secs_f64();
    for r in records {
        log.write(&MetricsRecord {
            run_id,
            cycle: r.cycle,
            channel: r.channel,
            psnr: r.psnr,
            iterations: r.bregman_iterations,
            residual: r.residual,
            wall_seconds,
        })?;
    }
    Ok(())
}

fn run_ssl(config: &RunConfig) -> Result<Summary> {
    let dataset = load_mnist_idx(required(&config.io.input, "input")?, required(&config.io.truth, "truth")?)?;
    let seed = config.run.seed;
    let labeled = match (config.ssl.per_class, config.ssl.labels) {
        (Some(pc), _) => sample_per_class(&dataset, pc, seed)?,
        (None, Some(count)) => sample_label_set(&dataset, count, seed, config.ssl.stratified)?,
        (None, None) => return Err(Error::Config("ssl needs ssl.labels or ssl.per_class".into())),
    };
    let run_id = config.run_id()?;
    let mut log = MetricsLog::create(config.io.metrics.as_deref())?;
    let start = Instant::now();
    info!("{run_id}: {} points, {} labeled", dataset.len(), labeled.len());
    let graph = build_weight_graph(&dataset.cloud, config.graph_params()?)?;
    info!("{run_id}: graph built with {} edges in {:.1?}", graph.edge_count(), start.elapsed());
    let kind = config.solver_kind()?;
    let outcome = run_ssl_on_graph(&graph, &dataset.truth, dataset.classes, &labeled, kind, &config.solver_options())?;
    let wall_seconds = start.elapsed().as_secs_f64();

    let mut summary = base_summary(config)?;
    for (class, (&iterations, history)) in
        outcome.bregman_iterations.iter().zip(&outcome.residual_histories).enumerate()
    {
        let residual = history.last().copied();
        log.write(&MetricsRecord {
            run_id: &run_id,
            cycle: 1,
            channel: class,
            psnr: None,
            iterations,
            residual,
            wall_seconds,
        })?;
        summary.max_bregman_iterations = summary.max_bregman_iterations.max(iterations);
        if let Some(r) = residual {
            summary.max_final_residual = Some(summary.max_final_residual.map_or(r, |m: f64| m.max(r)));
        }
    }
    log.finish()?;
    summary.accuracy = Some(accuracy(&outcome.predictions, &dataset.truth, &[])?);
    summary.accuracy_unlabeled = Some(accuracy(&outcome.predictions, &dataset.truth, &labeled)?);
    summary.labeled = labeled.len();
    summary.points = dataset.len();
    if let Some(p) = &config.io.output {
        let mut w = std::io::BufWriter::new(fs::File::create(p).map_err(|e| Error::io(p, e))?);
        for c in &outcome.predictions {
            writeln!(w, "{c}").map_err(|e| Error::io(p, e))?;
        }
        w.flush().map_err(|e| Error::io(p, e))?;
    }
    info!("{run_id}: accuracy {:.2}%", summary.accuracy.unwrap_or(0.0));
    Ok(summary)
}

/// Observed pixels from the mask file or a seeded draw; `None` means every
/// pixel is observed.
fn load_mask(config: &RunConfig, image: &ImageBuffer) -> Result<Option<Vec<bool>>> {
    if let Some(p) = &config.io.mask {
        let mask = read_mask(p)?;
        mask.fits(image)?;
        Ok(Some(mask.observed))
    } else if let Some(rate) = config.sample.rate {
        Ok(Some(subsample_mask(image.width(), image.height(), rate, mask_seed(config.run.seed))?))
    } else {
        Ok(None)
    }
}

fn run_inpaint(config: &RunConfig) -> Result<Summary> {
    let input = read_image(required(&config.io.input, "input")?)?;
    let truth = match &config.io.truth {
        Some(p) => Some(read_image(p)?),
        None if config.io.mask.is_none() && config.sample.rate.is_some() => Some(input.clone()),
        None => None,
    };
    let image = match load_mask(config, &input)? {
        Some(mask) => input.with_mask(mask)?,
        None => {
            warn!("no mask or sampling rate given; every pixel is observed");
            input
        }
    };
    let opts = InpaintOptions {
        outer_iters: config.inpaint.outer_iters,
        rng_seed: config.run.seed,
        solver: config.solver_kind()?,
        solver_options: config.solver_options(),
        patch_config: config.patch_config(),
        graph: config.graph_params()?,
    };
    let run_id = config.run_id()?;
    let mut log = MetricsLog::create(config.io.metrics.as_deref())?;
    let start = Instant::now();
    let mut log_err = None;
    let out = inpaint_with(&image, &opts, truth.as_ref(), |records| {
        if let Some(r) = records.first() {
            info!("{run_id}: cycle {} done after {:.1?}", r.cycle, start.elapsed());
        }
        if log_err.is_none() {
            log_err = log_records(&mut log, &run_id, records, start).err();
        }
    })?;
    if let Some(e) = log_err {
        return Err(e);
    }
    if out.records.is_empty() {
        // Nothing to solve; still leave one record behind.
        let psnr = out.cycle_psnr.last().copied();
        let wall_seconds = start.elapsed().as_secs_f64();
        for channel in 0..image.channels() {
            log.write(&MetricsRecord {
                run_id: &run_id,
                cycle: 0,
                channel,
                psnr,
                iterations: 0,
                residual: None,
                wall_seconds,
            })?;
        }
    }
    log.finish()?;
    finish_image(config, base_summary(config)?, &image, out.image, &out.records, &out.cycle_psnr)
}

fn run_colorize(config: &RunConfig) -> Result<Summary> {
    let gray = read_image_channels(required(&config.io.input, "input")?, 1)?;
    let truth = config.io.truth.as_ref().map(|p| read_image_channels(p, 3)).transpose()?;
    let color = match (&config.io.color, &truth) {
        (Some(p), _) => read_image_channels(p, 3)?,
        (None, Some(t)) => t.clone(),
        (None, None) => return Err(Error::Config("colorize needs io.color or io.truth".into())),
    };
    let mask =
        load_mask(config, &color)?.ok_or_else(|| Error::Config("colorize needs io.mask or sample.rate".into()))?;
    let samples = color.with_mask(mask)?;
    let opts = ColorizeOptions {
        solver: config.solver_kind()?,
        solver_options: config.solver_options(),
        patch_config: config.patch_config(),
        graph: config.graph_params()?,
    };
    let run_id = config.run_id()?;
    let mut log = MetricsLog::create(config.io.metrics.as_deref())?;
    let start = Instant::now();
    let out = colorize(&gray, &samples, &opts, truth.as_ref())?;
    log_records(&mut log, &run_id, &out.records, start)?;
    log.finish()?;
    finish_image(config, base_summary(config)?, &samples, out.image, &out.records, &out.cycle_psnr)
}

fn finish_image(
    config: &RunConfig,
    mut summary: Summary,
    observed: &ImageBuffer,
    image: ImageBuffer,
    records: &[CycleRecord],
    cycle_psnr: &[f64],
) -> Result<Summary> {
    fold_records(&mut summary, records);
    summary.cycle_psnr = cycle_psnr.iter().map(|&p| Psnr(p)).collect();
    summary.psnr = cycle_psnr.last().map(|&p| Psnr(p));
    summary.labeled = observed.observed_count();
    summary.points = observed.pixel_count();
    if let Some(p) = &config.io.output {
        write_image(&image, p)?;
    }
    if let Some(p) = summary.psnr {
        info!("{}: PSNR {}", summary.run_id, crate::metrics::format_psnr(p.0));
    }
    Ok(summary)
}

/// Grayscale version of a color image: the rounded mean of the channels.
pub fn gray_from_color(image: &ImageBuffer) -> Result<ImageBuffer> {
    let ch = image.channels();
    let data = image.data().chunks(ch).map(|p| (p.iter().sum::<f64>() / ch as f64).round()).collect();
    Ok(ImageBuffer::new(image.width(), image.height(), 1, data)?)
}
