//! Run the pipeline stage by stage instead of through `run`: build the
//! self-representation, form the similarity graph, then spectrally
//! cluster it. Useful when you want to inspect intermediates.

use ssc::datagen::{generate, SubspaceModel};
use ssc::metrics::{clustering_error, connectivity};
use ssc::pipeline::{build_similarity, self_representation_pass, spectral_cluster, AlgorithmParams};

fn main() -> anyhow::Result<()> {
    let model = SubspaceModel::uniform(40, 3, 6, 45, 0.4, 5);
    let dataset = generate(&model)?;
    let truth = dataset.truth.clone().unwrap();

    let params = AlgorithmParams::a_omp_ssc(3, 1.0, 0.3, 3, 5);
    let (columns, _updated_points, counter) = self_representation_pass(&dataset, &params)?;
    println!("self-representation done: {} inner products", counter.inner_products);

    let graph = build_similarity(&columns);
    let conn = connectivity(&graph.a, &truth);
    println!("per-cluster connectivity: {conn:?}");

    let labels = spectral_cluster(&graph, params.k, params.seed)?;
    let err = clustering_error(&labels, &truth)?;
    println!("clustering error: {err:.4}");
    Ok(())
}
