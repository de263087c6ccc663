//! Run a tiny sweep programmatically, write the per-trial CSV, and then
//! summarize it grouped by noise level. The CLI drives the same code via
//! `ssc sweep` and `ssc summarize`.

use ssc::harness::{run_sweep, summarize, SweepSpec};
use ssc::pipeline::Variant;

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir();
    let output = dir.join("ssc_mini_sweep.csv");
    let spec = SweepSpec {
        ambient_dim: 20,
        subspace_dims: vec![4, 4, 4],
        variants: vec![Variant::OmpSsc, Variant::AOmpSsc],
        samples_per_subspace: vec![15],
        noise_levels: vec![0.2, 0.5],
        bs: vec![1.0],
        ps: vec![0.5],
        ds: vec![3],
        alpha: 20.0,
        k: 3,
        trials: 5,
        master_seed: 42,
        output: output.clone(),
    };

    let rows = run_sweep(&spec, Some(1))?;
    println!("{} rows -> {}", rows.len(), output.display());

    let summary_path = dir.join("ssc_mini_summary.csv");
    let groups = ["variant".to_string(), "noise_level".to_string()];
    let summary = summarize(&output, &groups, &summary_path)?;
    for row in &summary {
        println!("{row:?}");
    }
    Ok(())
}
