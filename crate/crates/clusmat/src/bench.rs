//! Benchmark harness: runs the multipliers over planted instances
//! described by a TOML config and emits one CSV row per run.

use std::io::Write;
use std::time::Instant;

use serde::Deserialize;

use clusmat_core::{
    exact_via_queries, mmclus_approx, mmclus_r_approx, BitMatrix, IntMatrix,
};

use crate::error::{AppError, Result};
use crate::parallel::{exact_clustered_threaded, naive_multiply_threaded, resolve_threads};
use crate::planted::{generate, Orientation, PlantedSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    /// Product shapes as `[p, q, r]` triples.
    pub shapes: Vec<[usize; 3]>,
    /// Row-clustering sizes to sweep.
    pub ells: Vec<usize>,
    /// Column-clustering sizes to sweep (two-sided algorithms only).
    #[serde(default)]
    pub ks: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Planted-instance parameters shared by all shapes.
    pub clusters: usize,
    pub flips: usize,
    #[serde(default = "default_density")]
    pub density: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Algorithms to run: any of "naive", "st", "approx", "rapprox",
    /// "query". A naive baseline row is always emitted per instance.
    pub algos: Vec<String>,
    /// Worker threads; 0 means auto.
    #[serde(default)]
    pub threads: usize,
}

fn default_density() -> f64 {
    0.5
}

fn default_epsilon() -> f64 {
    0.25
}

const VALID_ALGOS: [&str; 5] = ["naive", "st", "approx", "rapprox", "query"];

pub fn parse_config(text: &str) -> Result<BenchConfig> {
    let cfg: BenchConfig =
        toml::from_str(text).map_err(|e| AppError::Parse(format!("bench config: {e}")))?;
    if cfg.shapes.is_empty() || cfg.ells.is_empty() || cfg.seeds.is_empty() {
        return Err(AppError::Usage(
            "bench config needs at least one shape, ell, and seed".into(),
        ));
    }
    for algo in &cfg.algos {
        if !VALID_ALGOS.contains(&algo.as_str()) {
            return Err(AppError::Usage(format!(
                "unknown algo {algo:?}; expected one of {VALID_ALGOS:?}"
            )));
        }
    }
    let needs_k = cfg.algos.iter().any(|a| a == "rapprox");
    if needs_k && cfg.ks.is_empty() {
        return Err(AppError::Usage("rapprox requires a non-empty ks list".into()));
    }
    Ok(cfg)
}

pub const CSV_HEADER: &str =
    "p,q,r,algo,ell,k,seed,time_ms,certificate,max_abs_err,ham_cost,delta_updates_per_column\n";

struct Row {
    shape: [usize; 3],
    algo: &'static str,
    ell: Option<usize>,
    k: Option<usize>,
    seed: u64,
    time_ms: f64,
    certificate: Option<u32>,
    max_abs_err: Option<u32>,
    ham_cost: Option<u64>,
    delta_updates: Option<u64>,
}

impl Row {
    fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.3},{},{},{},{}",
            self.shape[0],
            self.shape[1],
            self.shape[2],
            self.algo,
            opt(&self.ell),
            opt(&self.k),
            self.seed,
            self.time_ms,
            opt(&self.certificate),
            opt(&self.max_abs_err),
            opt(&self.ham_cost),
            opt(&self.delta_updates),
        )?;
        Ok(())
    }
}

fn max_abs_err(exact: &IntMatrix, approx: &IntMatrix) -> u32 {
    let mut worst = 0u32;
    for i in 0..exact.rows() {
        for (x, y) in exact.row(i).iter().zip(approx.row(i)) {
            worst = worst.max(x.abs_diff(*y));
        }
    }
    worst
}

fn instance(cfg: &BenchConfig, shape: [usize; 3], seed: u64) -> Result<(BitMatrix, BitMatrix)> {
    let [p, q, r] = shape;
    let a = generate(&PlantedSpec {
        points: p,
        dim: q,
        num_clusters: cfg.clusters.min(p),
        max_flips: cfg.flips.min(q),
        density: cfg.density,
        seed: seed.wrapping_mul(2).wrapping_add(1),
        orientation: Orientation::Rows,
    })?;
    let b = generate(&PlantedSpec {
        points: r,
        dim: q,
        num_clusters: cfg.clusters.min(r),
        max_flips: cfg.flips.min(q),
        density: cfg.density,
        seed: seed.wrapping_mul(2).wrapping_add(2),
        orientation: Orientation::Cols,
    })?;
    Ok((a, b))
}

/// Runs every configured (shape, seed, algo, parameter) combination and
/// streams CSV rows to `w`.
pub fn run<W: Write>(cfg: &BenchConfig, w: &mut W) -> Result<()> {
    w.write_all(CSV_HEADER.as_bytes())?;
    let threads = resolve_threads((cfg.threads > 0).then_some(cfg.threads));
    let ks = if cfg.ks.is_empty() { vec![1] } else { cfg.ks.clone() };

    for &shape in &cfg.shapes {
        for &seed in &cfg.seeds {
            let (a, b) = instance(cfg, shape, seed)?;

            // naive baseline, always
            let start = Instant::now();
            let exact = naive_multiply_threaded(&a, &b, threads)?;
            Row {
                shape,
                algo: "naive",
                ell: None,
                k: None,
                seed,
                time_ms: start.elapsed().as_secs_f64() * 1e3,
                certificate: None,
                max_abs_err: Some(0),
                ham_cost: None,
                delta_updates: None,
            }
            .write(w)?;

            for &ell in &cfg.ells {
                if cfg.algos.iter().any(|s| s == "st") {
                    let start = Instant::now();
                    let res = exact_clustered_threaded(&a, &b, ell, ell, threads, 0, None)?;
                    Row {
                        shape,
                        algo: "st",
                        ell: Some(ell),
                        k: Some(ell),
                        seed,
                        time_ms: start.elapsed().as_secs_f64() * 1e3,
                        certificate: None,
                        max_abs_err: Some(max_abs_err(&exact, &res.c)),
                        ham_cost: Some(res.ham_cost_a.max(res.ham_cost_b)),
                        delta_updates: Some(res.delta_updates_per_column),
                    }
                    .write(w)?;
                }
                if cfg.algos.iter().any(|s| s == "approx") {
                    let start = Instant::now();
                    let res = mmclus_approx(&a, &b, ell)?;
                    Row {
                        shape,
                        algo: "approx",
                        ell: Some(ell),
                        k: None,
                        seed,
                        time_ms: start.elapsed().as_secs_f64() * 1e3,
                        certificate: Some(res.error_certificate),
                        max_abs_err: Some(max_abs_err(&exact, &res.d)),
                        ham_cost: None,
                        delta_updates: None,
                    }
                    .write(w)?;
                }
                if cfg.algos.iter().any(|s| s == "query") {
                    let start = Instant::now();
                    let res = exact_via_queries(&a, &b, ell)?;
                    Row {
                        shape,
                        algo: "query",
                        ell: Some(ell),
                        k: None,
                        seed,
                        time_ms: start.elapsed().as_secs_f64() * 1e3,
                        certificate: None,
                        max_abs_err: Some(max_abs_err(&exact, &res)),
                        ham_cost: None,
                        delta_updates: None,
                    }
                    .write(w)?;
                }
                if cfg.algos.iter().any(|s| s == "rapprox") {
                    for &k in &ks {
                        let start = Instant::now();
                        let res = mmclus_r_approx(&a, &b, ell, k, cfg.epsilon, seed)?;
                        Row {
                            shape,
                            algo: "rapprox",
                            ell: Some(ell),
                            k: Some(k),
                            seed,
                            time_ms: start.elapsed().as_secs_f64() * 1e3,
                            certificate: Some(res.error_certificate),
                            max_abs_err: Some(max_abs_err(&exact, &res.d)),
                            ham_cost: None,
                            delta_updates: None,
                        }
                        .write(w)?;
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"
        shapes = [[24, 32, 20]]
        ells = [4]
        ks = [3]
        seeds = [1, 2]
        clusters = 4
        flips = 2
        algos = ["st", "approx", "rapprox", "query"]
    "#;

    #[test]
    fn config_parses_with_defaults() {
        let cfg = parse_config(CFG).unwrap();
        assert_eq!(cfg.density, 0.5);
        assert_eq!(cfg.epsilon, 0.25);
        assert_eq!(cfg.threads, 0);
    }

    #[test]
    fn bad_configs_rejected() {
        assert!(parse_config("shapes = []").is_err());
        assert!(parse_config(&CFG.replace("\"st\"", "\"bogus\"")).is_err());
        assert!(parse_config(&CFG.replace("ks = [3]", "ks = []")).is_err());
        assert!(parse_config(&format!("{CFG}\nunknown_key = 1")).is_err());
    }

    #[test]
    fn run_emits_expected_rows_and_exact_algos_have_zero_error() {
        let cfg = parse_config(CFG).unwrap();
        let mut buf = Vec::new();
        run(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        // per seed: naive + st + approx + query + rapprox
        assert_eq!(rows.len(), 10);
        for row in rows {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields.len(), 12);
            let (algo, max_err) = (fields[3], fields[9]);
            if algo == "naive" || algo == "st" || algo == "query" {
                assert_eq!(max_err, "0", "row: {row}");
            }
            if algo == "approx" || algo == "rapprox" {
                let cert: u32 = fields[8].parse().unwrap();
                let err: u32 = max_err.parse().unwrap();
                assert!(err <= cert, "row: {row}");
            }
        }
    }
}
