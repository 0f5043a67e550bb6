//! Full 70,000-point MNIST classification at the 700 / 100 / 50 label budgets.
//!
//! Usage: `cargo run --release --example mnist_full -- DIR [SEED]`, where DIR
//! holds the four standard files (`train-images-idx3-ubyte`,
//! `train-labels-idx1-ubyte`, `t10k-images-idx3-ubyte`,
//! `t10k-labels-idx1-ubyte`, optionally gzipped). The graph is built once
//! (exact kNN; expect tens of minutes on one core) and shared by all runs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use wntv::idx::load_mnist_idx;
use wntv_core::ssl::{accuracy, run_ssl_on_graph, sample_label_set, LabeledDataset};
use wntv_core::{build_weight_graph, GraphParams, PointCloud, SolverKind, SolverOptions};

/// Reference accuracies per budget.
const REFERENCE: [(SolverKind, [f64; 3]); 4] = [
    (SolverKind::Gl, [93.15, 35.17, 20.09]),
    (SolverKind::Wnll, [93.25, 87.84, 73.60]),
    (SolverKind::Ntv, [93.78, 32.55, 28.00]),
    (SolverKind::Wntv, [94.08, 89.86, 78.35]),
];

fn find(dir: &Path, stem: &str) -> PathBuf {
    let plain = dir.join(stem);
    if plain.exists() {
        plain
    } else {
        dir.join(format!("{stem}.gz"))
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().ok_or("usage: mnist_full DIR [SEED]")?);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let train = load_mnist_idx(find(&dir, "train-images-idx3-ubyte"), find(&dir, "train-labels-idx1-ubyte"))?;
    let test = load_mnist_idx(find(&dir, "t10k-images-idx3-ubyte"), find(&dir, "t10k-labels-idx1-ubyte"))?;
    let mut data = train.cloud.as_slice().to_vec();
    data.extend_from_slice(test.cloud.as_slice());
    let mut truth = train.truth;
    truth.extend(test.truth);
    let ds = LabeledDataset::new(PointCloud::new(data, 784)?, truth)?;

    let start = Instant::now();
    let graph = build_weight_graph(&ds.cloud, GraphParams::POINT_CLOUD)?;
    eprintln!("graph on {} points built in {:.1?}", ds.len(), start.elapsed());

    let budgets = [700, 100, 50];
    println!("{:<6} {:>10} {:>10} {:>10}", "", "700/70000", "100/70000", "50/70000");
    for (kind, reference) in REFERENCE {
        let mut row = format!("{:<6}", kind.name());
        for (b, &count) in budgets.iter().enumerate() {
            let labeled = sample_label_set(&ds, count, seed.wrapping_add(b as u64), true)?;
            let out = run_ssl_on_graph(&graph, &ds.truth, ds.classes, &labeled, kind, &SolverOptions::default())?;
            let acc = accuracy(&out.predictions, &ds.truth, &[])?;
            row.push_str(&format!(" {acc:>5.2} ({:+.1})", acc - reference[b]));
        }
        println!("{row}");
    }
    Ok(())
}
