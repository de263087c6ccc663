//! Experiment front-end: flat key-value sweep configs, seeded Monte Carlo
//! sweeps over parameter grids, CSV result files, and grouped summaries.

use crate::datagen::{generate, load_matrix, DatagenError, SubspaceModel};
use crate::pipeline::{run, AlgorithmParams, LassoPenalty, PipelineError, Variant};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("result file parse error at line {0}: {1}")]
    Parse(usize, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// A full sweep: a generator template plus axes whose cross-product defines
/// the cells, each run for `trials` seeded trials.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub ambient_dim: usize,
    pub subspace_dims: Vec<usize>,
    /// Sweep axes; singleton lists pin an axis.
    pub variants: Vec<Variant>,
    pub samples_per_subspace: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub bs: Vec<f64>,
    pub ps: Vec<f64>,
    pub ds: Vec<usize>,
    pub alpha: f64,
    pub k: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub output: PathBuf,
}

/// One sweep cell: a concrete parameter point.
#[derive(Debug, Clone)]
pub struct Cell {
    pub variant: Variant,
    pub samples: usize,
    pub noise: f64,
    pub b: f64,
    pub p: f64,
    pub d: usize,
}

/// One trial's output row.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub cell: Cell,
    pub trial: usize,
    pub seed: u64,
    pub error_rate: f64,
    pub mean_connectivity: f64,
    pub sdp_percentage: f64,
    pub inner_products: u64,
    pub wall_time: f64,
}

pub const RESULT_HEADER: &str =
    "variant,samples_per_subspace,noise_level,b,p,d,trial,seed,error_rate,mean_connectivity,sdp_percentage,inner_products,wall_time";

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be >= 1".into()));
        }
        for (name, empty) in [
            ("variant", self.variants.is_empty()),
            ("samples_per_subspace", self.samples_per_subspace.is_empty()),
            ("noise_level", self.noise_levels.is_empty()),
            ("b", self.bs.is_empty()),
            ("p", self.ps.is_empty()),
            ("d", self.ds.is_empty()),
        ] {
            if empty {
                return Err(HarnessError::Config(format!("axis `{name}` is empty")));
            }
        }
        if self.subspace_dims.is_empty() {
            return Err(HarnessError::Config("subspace_dims is empty".into()));
        }
        if self.k == 0 {
            return Err(HarnessError::Config("k must be >= 1".into()));
        }
        Ok(())
    }

    /// Cells in deterministic order: variant, samples, noise, b, p, d
    /// (innermost last).
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &variant in &self.variants {
            for &samples in &self.samples_per_subspace {
                for &noise in &self.noise_levels {
                    for &b in &self.bs {
                        for &p in &self.ps {
                            for &d in &self.ds {
                                out.push(Cell {
                                    variant,
                                    samples,
                                    noise,
                                    b,
                                    p,
                                    d,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Parse the flat key-value config format: `key = value [value ...]`, `#`
/// comments, list values space-separated.
pub fn parse_config(text: &str) -> Result<SweepSpec, HarnessError> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, rest)) = line.split_once('=') else {
            return Err(HarnessError::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let values: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if values.is_empty() {
            return Err(HarnessError::Config(format!(
                "line {}: key `{}` has no value",
                lineno + 1,
                key.trim()
            )));
        }
        map.insert(key.trim().to_string(), values);
    }

    fn req<'a>(
        map: &'a BTreeMap<String, Vec<String>>,
        key: &str,
    ) -> Result<&'a Vec<String>, HarnessError> {
        map.get(key)
            .ok_or_else(|| HarnessError::Config(format!("missing key `{key}`")))
    }
    fn parse_list<T: std::str::FromStr>(vals: &[String], key: &str) -> Result<Vec<T>, HarnessError> {
        vals.iter()
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| HarnessError::Config(format!("bad value `{v}` for `{key}`")))
            })
            .collect()
    }
    fn scalar<T: std::str::FromStr + Copy>(
        map: &BTreeMap<String, Vec<String>>,
        key: &str,
    ) -> Result<T, HarnessError> {
        let vals = req(map, key)?;
        if vals.len() != 1 {
            return Err(HarnessError::Config(format!(
                "key `{key}` expects a single value"
            )));
        }
        parse_list::<T>(vals, key).map(|v| v[0])
    }

    let variants = req(&map, "variant")?
        .iter()
        .map(|v| {
            Variant::parse(v)
                .ok_or_else(|| HarnessError::Config(format!("unknown variant `{v}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let subspace_dims: Vec<usize> = parse_list(req(&map, "subspace_dims")?, "subspace_dims")?;

    let spec = SweepSpec {
        ambient_dim: scalar(&map, "ambient_dim")?,
        k: match map.get("k") {
            Some(v) => parse_list::<usize>(v, "k")?[0],
            None => subspace_dims.len(),
        },
        subspace_dims,
        variants,
        samples_per_subspace: parse_list(req(&map, "samples_per_subspace")?, "samples_per_subspace")?,
        noise_levels: parse_list(req(&map, "noise_level")?, "noise_level")?,
        bs: parse_list(req(&map, "b")?, "b")?,
        ps: parse_list(req(&map, "p")?, "p")?,
        ds: parse_list(req(&map, "d")?, "d")?,
        alpha: match map.get("alpha") {
            Some(v) => parse_list::<f64>(v, "alpha")?[0],
            None => 20.0,
        },
        trials: scalar(&map, "trials")?,
        master_seed: scalar(&map, "master_seed")?,
        output: PathBuf::from(&req(&map, "output")?[0]),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn parse_config_file(path: &Path) -> Result<SweepSpec, HarnessError> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Pairwise-distinct child seed for a (cell, trial) pair.
pub fn child_seed(master: u64, cell_idx: usize, trial_idx: usize) -> u64 {
    let mut z = master
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((cell_idx as u64) << 32 | trial_idx as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn run_cell_trial(spec: &SweepSpec, cell: &Cell, cell_idx: usize, trial: usize) -> Result<ResultRow, HarnessError> {
    let seed = child_seed(spec.master_seed, cell_idx, trial);
    let model = SubspaceModel {
        ambient_dim: spec.ambient_dim,
        subspace_dims: spec.subspace_dims.clone(),
        samples_per_subspace: vec![cell.samples; spec.subspace_dims.len()],
        noise_level: cell.noise,
        seed,
    };
    let dataset = generate(&model)?;
    let params = match cell.variant {
        Variant::L1Ssc => AlgorithmParams {
            penalty: LassoPenalty::Scaled { alpha: spec.alpha },
            ..AlgorithmParams::l1_ssc(spec.k, seed)
        },
        Variant::OmpSsc => AlgorithmParams::omp_ssc(cell.d, spec.k, seed),
        Variant::AOmpSsc => AlgorithmParams::a_omp_ssc(cell.d, cell.b, cell.p, spec.k, seed),
    };
    let result = run(&dataset, &params)?;
    let m = result
        .metrics
        .expect("generated data always carries ground truth");
    Ok(ResultRow {
        cell: cell.clone(),
        trial,
        seed,
        error_rate: m.error_rate,
        mean_connectivity: m.mean_connectivity,
        sdp_percentage: m.sdp_percentage,
        inner_products: m.inner_products,
        wall_time: m.wall_time,
    })
}

fn fmt_float(x: f64) -> String {
    // 9 significant digits
    format!("{x:.8e}")
}

fn write_rows(rows: &[ResultRow], path: &Path) -> Result<(), HarnessError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{RESULT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.cell.variant.as_str(),
            r.cell.samples,
            fmt_float(r.cell.noise),
            fmt_float(r.cell.b),
            fmt_float(r.cell.p),
            r.cell.d,
            r.trial,
            r.seed,
            fmt_float(r.error_rate),
            fmt_float(r.mean_connectivity),
            fmt_float(r.sdp_percentage),
            r.inner_products,
            fmt_float(r.wall_time),
        )?;
    }
    Ok(())
}

/// Execute every (cell, trial) pair, in parallel, and write the result CSV
/// in cell-then-trial order.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<ResultRow>, HarnessError> {
    spec.validate()?;
    let cells = spec.cells();
    let work: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();

    let execute = |(c, t): &(usize, usize)| run_cell_trial(spec, &cells[*c], *c, *t);
    let rows: Result<Vec<ResultRow>, HarnessError> = match jobs {
        Some(1) => work.iter().map(execute).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .install(|| work.par_iter().map(execute).collect()),
        None => work.par_iter().map(execute).collect(),
    };
    let rows = rows?;
    if let Some(dir) = spec.output.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_rows(&rows, &spec.output)?;
    Ok(rows)
}

/// Group key -> (mean, standard error, count) per metric.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub key: Vec<String>,
    pub count: usize,
    /// metric name -> (mean, stderr)
    pub stats: Vec<(String, f64, f64)>,
}

const GROUPABLE: &[&str] = &["variant", "samples_per_subspace", "noise_level", "b", "p", "d"];
const METRICS: &[&str] = &[
    "error_rate",
    "mean_connectivity",
    "sdp_percentage",
    "inner_products",
    "wall_time",
];

/// Aggregate a result file by the named axes: mean and standard error of
/// every metric per group. Writes `<out>` as CSV and `<out>.dat` as a
/// space-separated table for gnuplot.
pub fn summarize(
    input: &Path,
    group_by: &[String],
    out: &Path,
) -> Result<Vec<SummaryRow>, HarnessError> {
    for g in group_by {
        if !GROUPABLE.contains(&g.as_str()) {
            return Err(HarnessError::Config(format!(
                "cannot group by `{g}`; valid axes: {GROUPABLE:?}"
            )));
        }
    }
    let text = std::fs::read_to_string(input)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| HarnessError::Parse(0, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let col_idx = |name: &str| -> Result<usize, HarnessError> {
        cols.iter()
            .position(|&c| c == name)
            .ok_or_else(|| HarnessError::Parse(1, format!("missing column `{name}`")))
    };
    let group_idx: Vec<usize> = group_by
        .iter()
        .map(|g| col_idx(g))
        .collect::<Result<_, _>>()?;
    let metric_idx: Vec<usize> = METRICS.iter().map(|m| col_idx(m)).collect::<Result<_, _>>()?;

    let mut groups: BTreeMap<Vec<String>, Vec<Vec<f64>>> = BTreeMap::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(HarnessError::Parse(
                lineno + 1,
                format!("expected {} fields, got {}", cols.len(), fields.len()),
            ));
        }
        let key: Vec<String> = group_idx.iter().map(|&i| fields[i].to_string()).collect();
        let vals: Vec<f64> = metric_idx
            .iter()
            .map(|&i| {
                fields[i]
                    .parse::<f64>()
                    .map_err(|e| HarnessError::Parse(lineno + 1, e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        groups.entry(key).or_default().push(vals);
    }

    let mut rows = Vec::new();
    for (key, samples) in groups {
        let n = samples.len();
        let mut stats = Vec::new();
        for (mi, &mname) in METRICS.iter().enumerate() {
            let vals: Vec<f64> = samples.iter().map(|s| s[mi]).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                let var =
                    vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            stats.push((mname.to_string(), mean, stderr));
        }
        rows.push(SummaryRow {
            key,
            count: n,
            stats,
        });
    }

    // CSV
    let mut csv = String::new();
    let mut head: Vec<String> = group_by.to_vec();
    head.push("count".into());
    for m in METRICS {
        head.push(format!("{m}_mean"));
        head.push(format!("{m}_stderr"));
    }
    writeln!(csv, "{}", head.join(",")).unwrap();
    for r in &rows {
        let mut fields: Vec<String> = r.key.clone();
        fields.push(r.count.to_string());
        for (_, mean, se) in &r.stats {
            fields.push(fmt_float(*mean));
            fields.push(fmt_float(*se));
        }
        writeln!(csv, "{}", fields.join(",")).unwrap();
    }
    std::fs::write(out, &csv)?;

    // gnuplot-friendly block: space-separated, `#` header
    let mut dat = String::new();
    writeln!(dat, "# {}", head.join(" ")).unwrap();
    for r in &rows {
        let mut fields: Vec<String> = r.key.clone();
        fields.push(r.count.to_string());
        for (_, mean, se) in &r.stats {
            fields.push(fmt_float(*mean));
            fields.push(fmt_float(*se));
        }
        writeln!(dat, "{}", fields.join(" ")).unwrap();
    }
    std::fs::write(out.with_extension("dat"), &dat)?;
    Ok(rows)
}

/// One pipeline run on external data; prints labels and whatever metrics
/// ground truth allows.
pub fn run_single(
    data: &Path,
    labels: Option<&Path>,
    params: &AlgorithmParams,
    out: &mut dyn std::io::Write,
) -> Result<(), HarnessError> {
    let dataset = load_matrix(data, labels)?;
    let result = run(&dataset, params)?;
    writeln!(out, "points: {}", dataset.num_points())?;
    writeln!(out, "variant: {}", params.variant.as_str())?;
    writeln!(
        out,
        "labels: {}",
        result
            .labels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )?;
    writeln!(out, "inner_products: {}", result.counter.inner_products)?;
    writeln!(out, "wall_time: {}", fmt_float(result.wall_time))?;
    match &result.metrics {
        Some(m) => {
            writeln!(out, "error_rate: {}", fmt_float(m.error_rate))?;
            writeln!(out, "mean_connectivity: {}", fmt_float(m.mean_connectivity))?;
            writeln!(out, "sdp_percentage: {}", fmt_float(m.sdp_percentage))?;
        }
        None => {
            writeln!(out, "error_rate: n/a (no labels supplied)")?;
            writeln!(out, "sdp_percentage: n/a (no labels supplied)")?;
        }
    }
    Ok(())
}
