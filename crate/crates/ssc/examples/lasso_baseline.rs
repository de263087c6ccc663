//! Run the l1-penalized baseline on a small instance and inspect the
//! sparsity of the learned representation.

use ssc::datagen::{generate, SubspaceModel};
use ssc::pipeline::{run, AlgorithmParams};

fn main() -> anyhow::Result<()> {
    let model = SubspaceModel::uniform(20, 3, 4, 20, 0.3, 3);
    let dataset = generate(&model)?;

    let result = run(&dataset, &AlgorithmParams::l1_ssc(3, 3))?;
    let metrics = result.metrics.expect("dataset carries ground truth");

    let supports: Vec<usize> = result
        .coefficients
        .iter()
        .map(|c| c.support_size())
        .collect();
    let mean_support = supports.iter().sum::<usize>() as f64 / supports.len() as f64;

    println!("error rate          {:.4}", metrics.error_rate);
    println!("subspace-preserving {:.1}%", metrics.sdp_percentage);
    println!("mean support size   {mean_support:.1}");
    Ok(())
}
