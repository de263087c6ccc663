//! Compare the active variant (point updating + dictionary dropping)
//! against plain OMP-based clustering over a handful of seeded trials.

use ssc::datagen::{generate, SubspaceModel};
use ssc::pipeline::{run, AlgorithmParams};

fn main() -> anyhow::Result<()> {
    let trials = 10;
    let mut plain_err = 0.0;
    let mut active_err = 0.0;
    let mut plain_ips = 0u64;
    let mut active_ips = 0u64;

    for seed in 0..trials {
        let model = SubspaceModel::uniform(40, 3, 6, 45, 0.6, seed);
        let dataset = generate(&model)?;

        let plain = run(&dataset, &AlgorithmParams::omp_ssc(3, 3, seed))?;
        let active = run(&dataset, &AlgorithmParams::a_omp_ssc(3, 1.0, 0.8, 3, seed))?;

        plain_err += plain.metrics.as_ref().unwrap().error_rate;
        active_err += active.metrics.as_ref().unwrap().error_rate;
        plain_ips += plain.counter.inner_products;
        active_ips += active.counter.inner_products;
    }

    let t = trials as f64;
    println!("mean error:      plain {:.4}  active {:.4}", plain_err / t, active_err / t);
    println!(
        "inner products:  plain {}  active {} ({:.0}% of plain)",
        plain_ips,
        active_ips,
        100.0 * active_ips as f64 / plain_ips as f64
    );
    Ok(())
}
