//! Draw a synthetic union-of-subspaces dataset and save it as CSV files
//! that `ssc single` (or `load_matrix`) can read back.

use ssc::datagen::{generate, save_labels, save_matrix, SubspaceModel};

fn main() -> anyhow::Result<()> {
    let model = SubspaceModel::uniform(40, 3, 6, 45, 0.4, 7);
    let dataset = generate(&model)?;
    let truth = dataset.truth.as_ref().unwrap();

    println!(
        "{} points in R^{}, {} subspaces",
        dataset.num_points(),
        model.ambient_dim,
        model.num_subspaces()
    );
    let dir = std::env::temp_dir();
    let data_path = dir.join("ssc_demo_data.csv");
    let labels_path = dir.join("ssc_demo_labels.csv");
    save_matrix(&dataset.x, &data_path)?;
    save_labels(truth, &labels_path)?;
    println!("wrote {} and {}", data_path.display(), labels_path.display());
    Ok(())
}
