//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use tempfile::TempDir;

use clusmat::planted::{generate, Orientation, PlantedSpec};
use clusmat_core::{
    brute_force_discrete_kcenter, build_cluster_spanning_tree, exact_clustered, exact_via_queries,
    gonzalez, mmclus_approx, mmclus_preproc, mmclus_preproc_randomized, mmclus_query_with_cost,
    mmclus_r_approx, mmclus_st, naive_multiply, randomized_kcenter, BitMatrix, IntMatrix,
};

fn report(num: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {num} [{name}]: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {num} ({name}) failed: {detail}");
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> BitMatrix {
    let cut = (density * u32::MAX as f64) as u64;
    let bools: Vec<Vec<bool>> = (0..rows)
        .map(|_| (0..cols).map(|_| (rng.next_u32() as u64) < cut).collect())
        .collect();
    BitMatrix::from_bool_rows(&bools).unwrap()
}

fn in_range(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

/// The shared corpus for criteria 1, 3, and 6: 200 seeded instances with
/// shapes in [8, 256] and densities cycling {0.1, 0.5, 0.9}.
fn corpus_instance(t: u64) -> (BitMatrix, BitMatrix, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0000 + t);
    let density = [0.1, 0.5, 0.9][(t % 3) as usize];
    let p = in_range(&mut rng, 8, 256);
    let q = in_range(&mut rng, 8, 256);
    let r = in_range(&mut rng, 8, 256);
    let ell = in_range(&mut rng, 1, p.min(r));
    let k = in_range(&mut rng, 1, r);
    let a = random_matrix(&mut rng, p, q, density);
    let b = random_matrix(&mut rng, q, r, density);
    (a, b, ell, k)
}

fn max_abs_err(c: &IntMatrix, d: &IntMatrix) -> u32 {
    let mut worst = 0;
    for i in 0..c.rows() {
        for (x, y) in c.row(i).iter().zip(d.row(i)) {
            worst = worst.max(x.abs_diff(*y));
        }
    }
    worst
}

#[test]
fn criterion_1_exact_oracle_equivalence() {
    let start = Instant::now();
    let mut mismatches = 0usize;
    for t in 0..200 {
        let (a, b, ell, k) = corpus_instance(t);
        let oracle = naive_multiply(&a, &b).unwrap();
        if exact_clustered(&a, &b, ell, k).unwrap().c != oracle {
            mismatches += 1;
        }
        if exact_via_queries(&a, &b, ell).unwrap() != oracle {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "exact-product oracle equivalence",
        mismatches == 0 && elapsed < 120.0,
        &format!("200 instances, {mismatches} mismatches, {elapsed:.1}s (budget 120s)"),
    );
}

#[test]
fn criterion_2_query_correctness() {
    let mut wrong = 0usize;
    for t in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_2000 + t);
        let p = in_range(&mut rng, 4, 64);
        let q = in_range(&mut rng, 4, 96);
        let r = in_range(&mut rng, 4, 48);
        let ell = in_range(&mut rng, 1, p.min(r));
        let k = in_range(&mut rng, 1, r);
        let a = random_matrix(&mut rng, p, q, 0.5);
        let b = random_matrix(&mut rng, q, r, 0.5);
        let oracle = naive_multiply(&a, &b).unwrap();

        let state = mmclus_preproc(&a, &b, ell).unwrap();
        for i in 0..p {
            for j in 0..r {
                let (v, _) = mmclus_query_with_cost(&state, i, j).unwrap();
                if v != oracle.get(i, j) {
                    wrong += 1;
                }
            }
        }
        for seed in 0..5 {
            let state = mmclus_preproc_randomized(&a, &b, ell, k, 0.25, seed).unwrap();
            for i in 0..p {
                for j in 0..r {
                    let (v, _) = mmclus_query_with_cost(&state, i, j).unwrap();
                    if v != oracle.get(i, j) {
                        wrong += 1;
                    }
                }
            }
        }
    }
    report(
        2,
        "exhaustive query sweeps equal oracle",
        wrong == 0,
        &format!("50 instances x (1 one-sided + 5 two-sided seeds), {wrong} wrong entries"),
    );
}

#[test]
fn criterion_3_approximation_certificates() {
    let mut violations = 0usize;
    for t in 0..200 {
        let (a, b, ell, k) = corpus_instance(t);
        let oracle = naive_multiply(&a, &b).unwrap();
        let res = mmclus_approx(&a, &b, ell).unwrap();
        if max_abs_err(&oracle, &res.d) > res.error_certificate {
            violations += 1;
        }
        for epsilon in [0.1, 0.25, 0.49] {
            let res = mmclus_r_approx(&a, &b, ell.min(a.rows()), k, epsilon, t).unwrap();
            if max_abs_err(&oracle, &res.d) > res.error_certificate {
                violations += 1;
            }
        }
    }
    report(
        3,
        "max |C-D| within error certificate",
        violations == 0,
        &format!("200 instances x (deterministic + 3 epsilons), {violations} violations"),
    );
}

#[test]
fn criterion_4_planted_radius_bounds() {
    let mut gonzalez_misses = 0usize;
    let mut randomized_hits = 0usize;
    let mut runs = 0usize;
    for &clusters in &[4usize, 16, 64] {
        for &s in &[0usize, 4, 16] {
            for seed in 0..20u64 {
                let m = generate(&PlantedSpec {
                    points: 256,
                    dim: 256,
                    num_clusters: clusters,
                    max_flips: s,
                    density: 0.5,
                    seed: seed.wrapping_mul(1000) + clusters as u64 * 10 + s as u64,
                    orientation: Orientation::Rows,
                })
                .unwrap();
                let points = m.row_views();
                let g = gonzalez(&points, clusters, 0).unwrap();
                if g.achieved_radius as usize > 2 * s {
                    gonzalez_misses += 1;
                }
                let r = randomized_kcenter(&points, clusters, 0.25, seed).unwrap();
                if f64::from(r.achieved_radius) <= 2.25 * s as f64 {
                    randomized_hits += 1;
                }
                runs += 1;
            }
        }
    }
    let hit_rate = randomized_hits as f64 / runs as f64;
    report(
        4,
        "planted-instance radius bounds",
        gonzalez_misses == 0 && hit_rate >= 0.9,
        &format!(
            "{runs} runs: farthest-point ≤2s misses={gonzalez_misses}, \
             randomized ≤2.25s hit rate {:.1}% (needs ≥90%)",
            hit_rate * 100.0
        ),
    );
}

#[test]
fn criterion_5_two_approximation_vs_brute_force() {
    let mut violations = 0usize;
    for t in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5000 + t);
        let k = in_range(&mut rng, 1, 3);
        let n = in_range(&mut rng, k, 14);
        let d = in_range(&mut rng, 1, 10);
        let m = random_matrix(&mut rng, n, d, 0.5);
        let points = m.row_views();
        let opt = brute_force_discrete_kcenter(&points, k).unwrap();
        let g = gonzalez(&points, k, 0).unwrap();
        if g.achieved_radius > 2 * opt {
            violations += 1;
        }
    }
    report(
        5,
        "farthest-point within 2x brute-force optimum",
        violations == 0,
        &format!("100 point sets (n≤14, d≤10, k≤3), {violations} violations"),
    );
}

#[test]
fn criterion_6_spanning_tree_cost_bounds() {
    let mut violations = 0usize;
    for t in 0..200 {
        let (a, b, ell, _) = corpus_instance(t);
        let points = a.row_views();
        let clustering = gonzalez(&points, ell, 0).unwrap();
        let tree = build_cluster_spanning_tree(&points, &clustering).unwrap();
        let p = a.rows() as u64;
        let q = a.cols() as u64;
        let bound =
            (p - ell as u64) * u64::from(clustering.achieved_radius) + (ell as u64 - 1) * q;
        if tree.ham_cost() > bound {
            violations += 1;
        }
        let st = mmclus_st(&a, &b, &tree).unwrap();
        if st.delta_updates_per_column > 2 * tree.ham_cost() {
            violations += 1;
        }
    }
    report(
        6,
        "tree ham cost and delta-update bounds",
        violations == 0,
        &format!("200 clustered instances, {violations} violations"),
    );
}

#[test]
fn criterion_7_query_work_bound() {
    let mut violations = 0usize;
    for t in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_2000 + t); // criterion-2 corpus
        let p = in_range(&mut rng, 4, 64);
        let q = in_range(&mut rng, 4, 96);
        let r = in_range(&mut rng, 4, 48);
        let ell = in_range(&mut rng, 1, p.min(r));
        let k = in_range(&mut rng, 1, r);
        let a = random_matrix(&mut rng, p, q, 0.5);
        let b = random_matrix(&mut rng, q, r, 0.5);

        let state = mmclus_preproc(&a, &b, ell).unwrap();
        for i in 0..p {
            for j in 0..r {
                let (_, cost) = mmclus_query_with_cost(&state, i, j).unwrap();
                if cost as u32 > state.radius_a {
                    violations += 1;
                }
            }
        }
        for seed in 0..5 {
            let state = mmclus_preproc_randomized(&a, &b, ell, k, 0.25, seed).unwrap();
            let bound = state.certificate();
            for i in 0..p {
                for j in 0..r {
                    let (_, cost) = mmclus_query_with_cost(&state, i, j).unwrap();
                    if cost as u32 > bound {
                        violations += 1;
                    }
                }
            }
        }
    }
    report(
        7,
        "per-query iterations within radius bound",
        violations == 0,
        &format!("criterion-2 corpus, {violations} violations"),
    );
}

#[test]
fn criterion_8_desk_scale_speedup() {
    let start = Instant::now();
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_clusmat");
    let a = dir.path().join("a.bmb");
    let b = dir.path().join("b.bmb");
    for (path, seed, orient) in [(&a, "81", "row"), (&b, "82", "col")] {
        let out = std::process::Command::new(bin)
            .arg("gen")
            .arg(path)
            .args(["--points", "2048", "--dim", "2048", "--clusters", "32"])
            .args(["--flips", "16", "--seed", seed, "--orientation", orient])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }

    let time_of = |algo_args: &[&str]| -> f64 {
        let out = std::process::Command::new(bin)
            .args(["multiply", a.to_str().unwrap(), b.to_str().unwrap()])
            .args(algo_args)
            .arg("--no-product")
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8_lossy(&out.stderr)
            .split_whitespace()
            .find_map(|tok| tok.strip_prefix("time_ms=").map(|v| v.parse().unwrap()))
            .expect("stats line with time_ms")
    };

    let naive_ms = time_of(&["--algo", "naive"]);
    let st_ms = time_of(&["--algo", "st", "--ell", "32"]);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        8,
        "spanning-tree multiply beats naive at n=2048",
        st_ms < naive_ms && elapsed < 300.0,
        &format!(
            "naive {naive_ms:.0}ms vs st {st_ms:.0}ms (ratio {:.2}x), total {elapsed:.1}s (budget 300s)",
            naive_ms / st_ms
        ),
    );
}
