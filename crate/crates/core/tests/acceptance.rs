//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mjw_core::changepoint::{
    merge_tau2, modal_changepoint_set, propose_segment_count, recover_u, run_chain_stream,
    sample_relocation, split_jacobian, split_jacobian_from_pair, split_tau2, SamplerConfig,
};
use mjw_core::density::{wasserstein, DiscreteDensity};
use mjw_core::market_analytics::{
    correlation_histogram, correlation_matrix, flat_trajectory, normalized_trajectory,
    rolling_pca, trajectory_dispersion, trajectory_distance_matrix, PricePanel, ReturnPanel,
    WindowSpec,
};
use mjw_core::matrix_analysis::{matrix_norm, triangle_test, DistanceMatrix, MatrixNorm, TriangleClass};
use mjw_core::pipeline::{run_pipeline, Stage};
use mjw_core::uncertain_sets::{hausdorff, mj_distance, mj_wasserstein, FiniteSet, SetWithUncertainty};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<f64, String> {
    let secs = start.elapsed().as_secs_f64();
    if start.elapsed() > limit {
        return Err(format!("took {secs:.1} s, limit {} s", limit.as_secs()));
    }
    Ok(secs)
}

// ---------------------------------------------------------------------------
// random inputs

fn random_points(rng: &mut ChaCha8Rng, max_len: usize, range: i64) -> Vec<f64> {
    let len = rng.random_range(1..=max_len);
    let mut v: Vec<f64> = sample(rng, range as usize, len)
        .into_iter()
        .map(|i| i as f64)
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn random_density(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> DiscreteDensity {
    let width = (hi - lo + 1) as usize;
    let atoms = rng.random_range(1..=width.min(6));
    let counts = sample(rng, width, atoms)
        .into_iter()
        .map(|i| (lo + i as i64, rng.random_range(1..=20u64)));
    DiscreteDensity::from_counts(counts).unwrap()
}

/// Up to `max_members` densities on disjoint blocks of `[0, 40·max_members)`.
fn random_uncertain_set(rng: &mut ChaCha8Rng, max_members: usize) -> SetWithUncertainty {
    let k = rng.random_range(1..=max_members);
    let blocks = sample(rng, max_members, k);
    let members = blocks
        .into_iter()
        .map(|b| {
            let lo = 40 * b as i64 + rng.random_range(0..10);
            let hi = lo + rng.random_range(0..25);
            random_density(rng, lo, hi)
        })
        .collect();
    SetWithUncertainty::new(members).unwrap()
}

// ---------------------------------------------------------------------------
// independent eigensolver: characteristic polynomial by Faddeev–LeVerrier,
// roots by Durand–Kerner, then Newton polishing

fn char_poly(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    // coefficients c[0..=n] of det(λI − A), c[n] = 1
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{n−k+1} I
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<f64>();
            }
            next[i][i] += c[n - k + 1];
        }
        m = next;
        let trace: f64 = (0..n)
            .map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<f64>())
            .sum();
        c[n - k] = -trace / k as f64;
    }
    c
}

fn poly_eval(c: &[f64], x: f64) -> (f64, f64) {
    let (mut p, mut dp) = (0.0, 0.0);
    for &coef in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + coef;
    }
    (p, dp)
}

fn oracle_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let c = char_poly(a);
    let n = a.len();
    let bound = 1.0 + c[..n].iter().map(|v| v.abs()).fold(0.0, f64::max);
    type C = (f64, f64);
    let mul = |x: C, y: C| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
    let div = |x: C, y: C| {
        let d = y.0 * y.0 + y.1 * y.1;
        ((x.0 * y.0 + x.1 * y.1) / d, (x.1 * y.0 - x.0 * y.1) / d)
    };
    let eval = |z: C| c.iter().rev().fold((0.0, 0.0), |acc, &k| {
        let p = mul(acc, z);
        (p.0 + k, p.1)
    });
    let mut roots: Vec<C> = (0..n)
        .map(|i| {
            let angle = 0.4 + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            (bound * angle.cos(), bound * angle.sin())
        })
        .collect();
    for _ in 0..5000 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut denom = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom = mul(denom, (roots[i].0 - roots[j].0, roots[i].1 - roots[j].1));
                }
            }
            let delta = div(eval(roots[i]), denom);
            roots[i] = (roots[i].0 - delta.0, roots[i].1 - delta.1);
            shift = shift.max(delta.0.abs() + delta.1.abs());
        }
        if shift < 1e-15 * bound {
            break;
        }
    }
    roots
        .into_iter()
        .map(|(mut x, _)| {
            for _ in 0..20 {
                let (p, dp) = poly_eval(&c, x);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            x
        })
        .collect()
}

fn oracle_mu(a: &[Vec<f64>]) -> Vec<f64> {
    let mut ev = oracle_eigenvalues(a);
    ev.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
    let total: f64 = ev.iter().map(|v| v.abs()).sum();
    ev.iter().map(|v| v.abs() / total).collect()
}

fn pearson_matrix(rows: &[Vec<f64>], start: usize, end: usize) -> Vec<Vec<f64>> {
    let n = rows.len();
    let len = (end - start + 1) as f64;
    let stats: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let x = &r[start..=end];
            let mean = x.iter().sum::<f64>() / len;
            let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>()).sqrt();
            (mean, sd)
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return 1.0;
                    }
                    let cov: f64 = (start..=end)
                        .map(|t| (rows[i][t] - stats[i].0) * (rows[j][t] - stats[j].0))
                        .sum();
                    cov / (stats[i].1 * stats[j].1)
                })
                .collect()
        })
        .collect()
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize, t: usize) -> Vec<Vec<f64>> {
    let z = Normal::new(0.0, 1.0).unwrap();
    let common: Vec<f64> = (0..t).map(|_| z.sample(rng)).collect();
    (0..n)
        .map(|_| {
            let load: f64 = rng.random_range(0.0..1.5);
            (0..t).map(|s| load * common[s] + z.sample(rng)).collect()
        })
        .collect()
}

fn tickers(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("T{i:02}")).collect()
}

// ---------------------------------------------------------------------------
// criteria

fn delta_set_reduction() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a = random_points(&mut rng, 8, 200);
        let b = random_points(&mut rng, 8, 200);
        let (fa, fb) = (FiniteSet::new(a.clone()).unwrap(), FiniteSet::new(b.clone()).unwrap());
        let (sa, sb) = (
            SetWithUncertainty::from_points(&a).unwrap(),
            SetWithUncertainty::from_points(&b).unwrap(),
        );
        for p in [0.5, 1.0, 2.0] {
            let plain = mj_distance(&fa, &fb, p).unwrap();
            for q in [1.0, 2.0] {
                let diff = (mj_wasserstein(&sa, &sb, p, q).unwrap() - plain).abs();
                worst = worst.max(diff);
            }
        }
    }
    ensure!(worst <= 1e-10, "max |difference| {worst:e}");
    let secs = within(Duration::from_secs(5), start)?;
    Ok(format!("200 pairs × 6 (p, q); max |difference| {worst:.1e}; {secs:.2} s"))
}

fn metric_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for case in 0..500 {
        let (f, g, h) = (
            random_density(&mut rng, 0, 60),
            random_density(&mut rng, 0, 60),
            random_density(&mut rng, 0, 60),
        );
        for q in [1.0, 2.0, 3.5] {
            let fg = wasserstein(&f, &g, q).unwrap();
            ensure!(fg == wasserstein(&g, &f, q).unwrap(), "wasserstein asymmetric, case {case}");
            ensure!(wasserstein(&f, &f, q).unwrap() == 0.0, "W(f, f) ≠ 0, case {case}");
            ensure!((fg == 0.0) == (f == g), "identity of indiscernibles, case {case}");
            let fh = wasserstein(&f, &h, q).unwrap();
            let gh = wasserstein(&g, &h, q).unwrap();
            ensure!(fh <= fg + gh + 1e-12 * (fg + gh), "triangle fails, case {case}, q {q}");
        }
    }
    for case in 0..500 {
        let a = FiniteSet::new(random_points(&mut rng, 10, 80)).unwrap();
        let b = FiniteSet::new(random_points(&mut rng, 10, 80)).unwrap();
        let same = a == b;
        ensure!(hausdorff(&a, &b) == hausdorff(&b, &a), "hausdorff asymmetric, case {case}");
        ensure!(hausdorff(&a, &a) == 0.0, "H(a, a) ≠ 0, case {case}");
        ensure!((hausdorff(&a, &b) == 0.0) == same, "hausdorff identity, case {case}");
        for p in [0.5, 1.0, 2.0] {
            let ab = mj_distance(&a, &b, p).unwrap();
            ensure!(ab == mj_distance(&b, &a, p).unwrap(), "mj asymmetric, case {case}");
            ensure!(mj_distance(&a, &a, p).unwrap() == 0.0, "mj(a, a) ≠ 0, case {case}");
            ensure!((ab == 0.0) == same, "mj identity, case {case}");
        }
    }
    for case in 0..500 {
        let s = random_uncertain_set(&mut rng, 5);
        let t = random_uncertain_set(&mut rng, 5);
        let same = s == t;
        for (p, q) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)] {
            let st = mj_wasserstein(&s, &t, p, q).unwrap();
            ensure!(st == mj_wasserstein(&t, &s, p, q).unwrap(), "mjw asymmetric, case {case}");
            ensure!(mj_wasserstein(&s, &s, p, q).unwrap() == 0.0, "mjw(s, s) ≠ 0, case {case}");
            ensure!((st == 0.0) == same, "mjw identity, case {case}");
        }
    }
    let secs = within(Duration::from_secs(10), start)?;
    Ok(format!("500 cases per distance; symmetry exact; {secs:.2} s"))
}

fn triangle_witness() -> Outcome {
    let s = FiniteSet::new(vec![0.0]).unwrap();
    let t = FiniteSet::new(vec![0.0, 1.0]).unwrap();
    let r = FiniteSet::new(vec![1.0]).unwrap();
    let (st, tr, sr) = (
        mj_distance(&s, &t, 1.0).unwrap(),
        mj_distance(&t, &r, 1.0).unwrap(),
        mj_distance(&s, &r, 1.0).unwrap(),
    );
    ensure!((st, tr, sr) == (0.25, 0.25, 1.0), "distances {st}, {tr}, {sr}");
    let d = DistanceMatrix::from_rows(
        vec!["S".into(), "T".into(), "R".into()],
        &[vec![0.0, st, sr], vec![st, 0.0, tr], vec![sr, tr, 0.0]],
    )
    .map_err(|e| e.to_string())?;
    let summary = triangle_test(&d).map_err(|e| e.to_string())?;
    let witness = summary
        .triples()
        .find(|x| x.ratio == 2.0 && x.class == TriangleClass::Yellow);
    ensure!(witness.is_some(), "no yellow triple with ratio 2.0");
    Ok(format!(
        "distances (0.25, 0.25, 1); yellow ratio 2.0; fail fraction {:.3}",
        summary.fail_fraction
    ))
}

fn hausdorff_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut closest = f64::INFINITY;
    for case in 0..50 {
        // sizes up to 12 keep (1/(2·12))^(1/64) above 0.95
        let pick = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(1..=12);
            let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..100.0)).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            FiniteSet::new(v).unwrap()
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let h = hausdorff(&a, &b);
        let mut last = 0.0;
        for e in 0..=6 {
            let p = f64::from(1u32 << e);
            let v = mj_distance(&a, &b, p).unwrap();
            ensure!(v >= last * (1.0 - 1e-12), "decrease at p = {p}, case {case}");
            last = v;
        }
        ensure!((h - last).abs() <= 0.05 * h, "p = 64 gives {last}, hausdorff {h}, case {case}");
        if h > 0.0 {
            closest = closest.min(last / h);
        }
    }
    Ok(format!("50 pairs; smallest mj₆₄ / hausdorff {closest:.4}"))
}

fn null_and_shift_series(seed: u64, shift: bool) -> Vec<f64> {
    common::shifted_returns(500, 250, 1.0, if shift { 4.0 } else { 1.0 }, 10_000 + seed)
}

fn sampler_correctness() -> Outcome {
    let start = Instant::now();
    // (a) amplitude split and merge
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let tau2 = 10f64.powf(rng.random_range(-3.0..3.0));
        let u = rng.random_range(0.01..0.99);
        let (l, r) = split_tau2(tau2, u);
        worst = worst
            .max((merge_tau2(l, r) - tau2).abs() / tau2)
            .max((recover_u(l, r) - u).abs())
            .max((split_jacobian(tau2, u) - split_jacobian_from_pair(l, r)).abs() / split_jacobian(tau2, u));
    }
    ensure!(worst <= 1e-12, "split/merge round trip error {worst:e}");

    // (b) proposal tables by frequency over 10⁵ draws
    let draws = 100_000;
    let freq = |hits: usize| hits as f64 / draws as f64;
    let cases = [(3, 10, 2, 0.5), (1, 10, 1, 1.0), (10, 10, 3, 0.0), (4, 10, 0, 0.0)];
    for (m, max, m2min, birth) in cases {
        let births = (0..draws)
            .filter(|_| propose_segment_count(m, max, m2min, &mut rng).unwrap().proposed == m + 1)
            .count();
        ensure!((freq(births) - birth).abs() <= 0.01, "segment count m={m}: {}", freq(births));
    }
    // neighbours at distance 50 are free; at t_min = 40 they block a side
    let local = [
        ((100, 150, 200), [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
        ((110, 150, 200), [0.0, 0.5, 0.5]),
        ((100, 150, 190), [0.5, 0.5, 0.0]),
        ((110, 150, 190), [0.0, 1.0, 0.0]),
    ];
    for ((left, xi, right), expected) in local {
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            let t = sample_relocation(xi, left, right, 40, 0.0, &mut rng);
            ensure!(t.abs_diff(xi) <= 1, "local move to {t}");
            counts[t + 1 - xi] += 1;
        }
        for k in 0..3 {
            ensure!((freq(counts[k]) - expected[k]).abs() <= 0.01, "local kernel {left}/{xi}/{right}: {counts:?}");
        }
    }
    let mut stay = 0;
    for _ in 0..draws {
        stay += (sample_relocation(150, 100, 200, 40, 0.2, &mut rng) == 150) as usize;
    }
    let expected = 0.2 / 21.0 + 0.8 / 3.0;
    ensure!((freq(stay) - expected).abs() <= 0.01, "mixture stay {}", freq(stay));

    // (c) and (d): 20 seeds each at 4000 iterations
    let config = SamplerConfig {
        n_iterations: 4000,
        n_burnin: 800,
        ..Default::default()
    };
    let mut null_ok = 0;
    let mut shift_ok = 0;
    for seed in 0..20u64 {
        let cfg = SamplerConfig { seed, ..config.clone() };
        let post = run_chain_stream(&null_and_shift_series(seed, false), &cfg, 0).map_err(|e| e.to_string())?;
        null_ok += (post.modal_m().map_err(|e| e.to_string())? == 1) as usize;

        let post = run_chain_stream(&null_and_shift_series(seed, true), &cfg, 0).map_err(|e| e.to_string())?;
        if post.modal_m().map_err(|e| e.to_string())? == 2 {
            let set = modal_changepoint_set(&post, 500).map_err(|e| e.to_string())?.expect("m = 2");
            shift_ok += ((set.members()[0].mode() - 250.0).abs() <= 25.0) as usize;
        }
    }
    ensure!(null_ok >= 18, "null series: modal m = 1 in {null_ok}/20");
    ensure!(shift_ok >= 18, "shift series: m = 2 near 250 in {shift_ok}/20");
    let secs = within(Duration::from_secs(600), start)?;
    Ok(format!(
        "round trip {worst:.1e}; tables within 0.01; null {null_ok}/20; shift {shift_ok}/20; {secs:.1} s"
    ))
}

fn eigen_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut a = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            for j in i + 1..6 {
                let v = rng.random_range(0.0..5.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let d = DistanceMatrix::from_rows(tickers(6), &a).map_err(|e| e.to_string())?;
        let op = matrix_norm(&d, MatrixNorm::Operator).map_err(|e| e.to_string())?;
        let oracle = oracle_eigenvalues(&a).into_iter().map(f64::abs).fold(0.0, f64::max);
        worst = worst.max((op - oracle).abs());
    }
    ensure!(worst <= 1e-8, "operator norm error {worst:e}");

    let mut mu_worst = 0.0f64;
    let mut sum_worst = 0.0f64;
    for (n, t, window) in [(6, 80, 45), (6, 60, 20), (5, 200, 45)] {
        let rows = random_rows(&mut rng, n, t);
        let panel = ReturnPanel::from_rows(tickers(n), rows.clone()).map_err(|e| e.to_string())?;
        let spectrum = rolling_pca(&panel, window, 10).map_err(|e| e.to_string())?;
        for (s, mu) in spectrum.mu.iter().enumerate() {
            let oracle = oracle_mu(&pearson_matrix(&rows, s, s + window - 1));
            for (x, y) in mu.iter().zip(&oracle) {
                mu_worst = mu_worst.max((x - y).abs());
            }
            sum_worst = sum_worst.max((mu.iter().sum::<f64>() - 1.0).abs());
        }
    }
    ensure!(mu_worst <= 1e-8, "μ error {mu_worst:e}");
    ensure!(sum_worst <= 1e-10, "μ sum error {sum_worst:e}");
    Ok(format!(
        "operator norm {worst:.1e}; μ {mu_worst:.1e}; Σμ − 1 {sum_worst:.1e}"
    ))
}

fn random_price_panel(rng: &mut ChaCha8Rng, n: usize, len: usize) -> PricePanel {
    let rows = (0..n)
        .map(|_| {
            let mut p = rng.random_range(5.0..500.0);
            (0..len)
                .map(|_| {
                    p *= rng.random_range(-0.05f64..0.05).exp();
                    p
                })
                .collect()
        })
        .collect();
    PricePanel::from_rows(tickers(n), rows).unwrap()
}

fn trajectory_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    // flat trajectories
    let flat = PricePanel::from_rows(tickers(3), vec![vec![3.0; 20], vec![70.0; 20], vec![0.2; 20]])
        .map_err(|e| e.to_string())?;
    let w = WindowSpec::new(2, 16, 20).unwrap();
    let g = normalized_trajectory(&flat, 1, w).map_err(|e| e.to_string())?;
    ensure!(g == flat_trajectory(15), "constant prices do not give the flat trajectory");
    let d = trajectory_distance_matrix(&flat, w).map_err(|e| e.to_string())?;
    ensure!(d.values().iter().all(|v| *v == 0.0), "flat trajectories at nonzero distance");

    let n = 8;
    let panel = random_price_panel(&mut rng, n, 400);
    let mut checked = 0;
    let mut tightest = 0.0f64;
    for _ in 0..100 {
        let a = rng.random_range(0..399);
        let b = rng.random_range(a..400);
        let w = WindowSpec::new(a, b, 400).unwrap();
        let d = trajectory_distance_matrix(&panel, w).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    ensure!(d.get(i, k) <= d.get(i, j) + d.get(j, k), "L¹ triangle fails on [{a}, {b}]");
                    checked += 1;
                }
            }
        }
        let norm = d.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        let m = trajectory_dispersion(&panel, w).map_err(|e| e.to_string())?;
        ensure!(norm <= 2.0 * m * n as f64, "norm {norm} above 2MN = {} on [{a}, {b}]", 2.0 * m * n as f64);
        if m > 0.0 {
            tightest = tightest.max(norm / (2.0 * m * n as f64));
        }
    }
    Ok(format!("{checked} ordered triples exact; 100 windows, largest ‖D‖ / 2MN {tightest:.3}"))
}

fn crisis_study() -> Outcome {
    let (n, t, lo, hi, window) = (20, 600, 300, 360, 45);
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let z = Normal::new(0.0, 1.0).unwrap();
    let factor: Vec<f64> = (0..t).map(|_| z.sample(&mut rng)).collect();
    let base: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..0.7)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..t)
                .map(|s| {
                    let load = if (lo..=hi).contains(&s) { 4.0 * base[i] } else { base[i] };
                    0.01 * (load * factor[s] + z.sample(&mut rng))
                })
                .collect()
        })
        .collect();
    let panel = ReturnPanel::from_rows(tickers(n), rows.clone()).map_err(|e| e.to_string())?;
    let spectrum = rolling_pca(&panel, window, 10).map_err(|e| e.to_string())?;
    let mu1 = spectrum.leading();
    let inside: Vec<f64> = (lo..=hi + 1 - window).map(|s| mu1[s]).collect();
    let outside: Vec<f64> = (0..mu1.len())
        .filter(|&s| s + window - 1 < lo || s > hi)
        .map(|s| mu1[s])
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (crisis_mu, base_mu) = (mean(&inside), mean(&outside));
    ensure!(crisis_mu >= 1.5 * base_mu, "μ₁ {crisis_mu:.3} vs baseline {base_mu:.3}");

    let hist_mean = |h: &mjw_core::market_analytics::CorrelationHistogram| {
        let total = h.total() as f64;
        h.counts
            .iter()
            .enumerate()
            .map(|(b, c)| *c as f64 * 0.5 * (h.edges[b] + h.edges[b + 1]))
            .sum::<f64>()
            / total
    };
    let crisis = correlation_matrix(&panel, WindowSpec::new(lo, hi, t).unwrap()).map_err(|e| e.to_string())?;
    let rest_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().enumerate().filter(|(s, _)| !(lo..=hi).contains(s)).map(|(_, v)| *v).collect())
        .collect();
    let rest_len = rest_rows[0].len();
    let rest_panel = ReturnPanel::from_rows(tickers(n), rest_rows).map_err(|e| e.to_string())?;
    let rest = correlation_matrix(&rest_panel, WindowSpec::new(0, rest_len - 1, rest_len).unwrap())
        .map_err(|e| e.to_string())?;
    let crisis_rho = hist_mean(&correlation_histogram(&crisis, 40).map_err(|e| e.to_string())?);
    let rest_rho = hist_mean(&correlation_histogram(&rest, 40).map_err(|e| e.to_string())?);
    ensure!(crisis_rho - rest_rho >= 0.2, "histogram mean ρ {crisis_rho:.3} vs {rest_rho:.3}");
    Ok(format!(
        "mean μ₁ {crisis_mu:.3} vs {base_mu:.3} ({:.2}×); histogram mean ρ {crisis_rho:.3} vs {rest_rho:.3}",
        crisis_mu / base_mu
    ))
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = common::smoke_corpus(dir.path());
    let mut reports = Vec::new();
    for name in ["first", "second"] {
        let config = common::smoke_config(input.clone(), dir.path().join(name));
        reports.push(run_pipeline(&config, Stage::All).map_err(|e| e.to_string())?);
    }
    ensure!(reports[0] == reports[1], "run reports differ");
    let mut files = vec!["report.json".to_string()];
    files.extend(reports[0].outputs.iter().map(|o| o.path.clone()));
    for f in &files {
        let a = std::fs::read(dir.path().join("first").join(f)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dir.path().join("second").join(f)).map_err(|e| e.to_string())?;
        ensure!(a == b, "{f} differs between runs");
    }
    let secs = within(Duration::from_secs(60), start)?;
    Ok(format!("{} files byte-identical; {secs:.1} s", files.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("delta-set reduction", delta_set_reduction),
        ("metric axioms", metric_axioms),
        ("triangle-failure witness", triangle_witness),
        ("hausdorff limit", hausdorff_limit),
        ("sampler correctness", sampler_correctness),
        ("eigen oracle", eigen_oracle),
        ("trajectory suite", trajectory_suite),
        ("synthetic crisis study", crisis_study),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
