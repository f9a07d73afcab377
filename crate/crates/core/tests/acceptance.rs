//! Acceptance criteria, one PASS/FAIL line each, run at their stated
//! tolerances and time budgets. Exits nonzero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use learned_dict::bench::{self, SpaceGrid, StreamSpec, UpdateStream, SUBSAMPLE_SIZES};
use learned_dict::binning::{self, k_for_percentage};
use learned_dict::dict::SplayTree;
use learned_dict::dynamic::RebuildTrigger;
use learned_dict::forest::{optimal_bst, optimize_over_k, ForestMode};
use learned_dict::segments::{self, epsilon_sweep, Segmentation};
use learned_dict::workloads::{self, gen_clustered, gen_queries, gen_uniform, subsample_matching_cdf};
use learned_dict::{oracle_rank_search, with_dictionary, AccessDistribution, DictKind, Execution, SortedDictionary};

/// Outcome detail of a passing criterion.
type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn mixed_queries(keys: &[u64], m: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0, u64::MAX];
    while out.len() < m {
        let x = match rng.gen_range(0..4) {
            0 => keys[rng.gen_range(0..keys.len())],
            1 => keys[rng.gen_range(0..keys.len())].wrapping_add(1),
            2 => keys[rng.gen_range(0..keys.len())].wrapping_sub(1),
            _ => rng.gen_range(0..=keys[keys.len() - 1].saturating_mul(2)),
        };
        out.push(x);
    }
    out
}

fn agree(name: &str, keys: &[u64], queries: &[u64], mut f: impl FnMut(u64) -> learned_dict::SearchOutcome) -> Check {
    for &x in queries {
        let (got, want) = (f(x), oracle_rank_search(keys, x));
        ensure!(got == want, "{name}: n={} query {x}: got {got:?}, expected {want:?}", keys.len());
    }
    Ok(String::new())
}

fn all_structures<D: SortedDictionary>(kind: DictKind, keys: &[u64], queries: &[u64]) -> Check {
    let params = kind.params();
    let n = keys.len();
    let mut plain = D::build(keys, &params).map_err(|e| e.to_string())?;
    agree(&format!("{kind}"), keys, queries, |x| plain.search_mut(x))?;
    for k in [1, n / 100, n / 10, n] {
        let k = k.max(1);
        let mut d = binning::build::<D>(keys, k, &params).map_err(|e| e.to_string())?;
        agree(&format!("{kind} binning k={k}"), keys, queries, |x| d.query_mut(x))?;
    }
    for eps in [1, 8, 64, n as u64 / 2] {
        let eps = eps.max(1);
        let mut d = segments::build::<D>(keys, eps, &params).map_err(|e| e.to_string())?;
        agree(&format!("{kind} segments eps={eps}"), keys, queries, |x| d.query_mut(x))?;
    }
    Ok(String::new())
}

fn ac1_oracle_equivalence() -> Check {
    let mut checked = 0;
    for (i, n) in [1usize, 2, 3, 10, 1000, 100_000].into_iter().enumerate() {
        let keys = gen_uniform(n, 1 << 40, 100 + i as u64).map_err(|e| e.to_string())?;
        let queries = mixed_queries(&keys, 10_000, i as u64);
        for kind in DictKind::all() {
            with_dictionary!(kind, D => all_structures::<D>(kind, &keys, &queries))?;
            checked += 9;
        }
    }
    Ok(format!("{checked} structures, 10000 queries each, 100% agreement"))
}

fn ac2_boosting_shape() -> Check {
    let keys = gen_uniform(1_000_000, 1 << 44, 2).map_err(|e| e.to_string())?;
    let w = gen_queries(&keys, 100_000, 0.5, 2).map_err(|e| e.to_string())?;
    let pcts = [1.0, 5.0, 10.0, 25.0, 50.0, 100.0];
    let rows = bench::bench_boost(
        "uniform",
        &keys,
        &[DictKind::Bbs],
        &pcts,
        &w.queries,
        bench::DEFAULT_REPEATS,
        Execution::default(),
    )
    .map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = rows.iter().filter(|r| r.model_id == "binning").map(|r| r.ratio_vs_plain).collect();
    let at10 = rows.iter().find(|r| r.model_param == k_for_percentage(keys.len(), 10.0) as u64).unwrap().ratio_vs_plain;
    ensure!(at10 < 0.9, "ratio at 10% is {at10:.3}, curve {ratios:.3?}");
    for (i, w) in ratios.windows(2).enumerate() {
        ensure!(w[1] <= w[0] * 1.1, "ratio rises from {:.3} at {}% to {:.3} at {}%", w[0], pcts[i], w[1], pcts[i + 1]);
    }
    Ok(format!("ratios {ratios:.3?} at {pcts:?}%"))
}

fn ac3_degenerate_binning() -> Check {
    let n = 100_000;
    let keys = gen_clustered(n, 0.001, 1 << 32, 3).map_err(|e| e.to_string())?;
    let d = binning::build::<learned_dict::dict::BranchyBinarySearch>(&keys, n, &Default::default())
        .map_err(|e| e.to_string())?;
    let empty = d.empty_intervals() as f64 / n as f64;
    ensure!(empty > 0.9, "only {:.1}% of bins empty", 100.0 * empty);
    let queries = mixed_queries(&keys, 10_000, 3);
    agree("clustered binning", &keys, &queries, |x| d.query(x))?;
    Ok(format!("{:.2}% of bins empty, max load {}", 100.0 * empty, d.max_load()))
}

fn ac4_max_load() -> Check {
    let n = 100_000;
    let bound = 2.0 * std::f64::consts::E.powi(2) * (n as f64).ln();
    let loads = Execution::default().map_indices(100, |s| {
        let keys = gen_uniform(n, 1 << 44, 4000 + s as u64).expect("universe fits");
        binning::build::<learned_dict::dict::BranchyBinarySearch>(&keys, n, &Default::default())
            .expect("nonempty")
            .max_load()
    });
    let ok = loads.iter().filter(|&&l| l as f64 <= bound).count();
    ensure!(ok >= 95, "{ok}/100 seeds within {bound:.1}");
    Ok(format!("{ok}/100 seeds within {bound:.1}, worst load {}", loads.iter().max().unwrap()))
}

fn ac5_epsilon_guarantee() -> Check {
    let n = 100_000;
    let sets = [
        ("uniform", gen_uniform(n, 1 << 44, 5)),
        ("clustered", gen_clustered(n, 0.001, 1 << 32, 5)),
        ("dense", bench::dense_uniform(n, 5)),
    ];
    let mut built = 0;
    for (name, keys) in sets {
        let keys = keys.map_err(|e| e.to_string())?;
        let mut last = usize::MAX;
        for eps in epsilon_sweep(n) {
            let s = Segmentation::fit(&keys, eps).map_err(|e| e.to_string())?;
            for seg in s.segments() {
                for j in seg.start_rank..seg.end_rank {
                    let err = (seg.predict(keys[j]) - j as i64).unsigned_abs();
                    ensure!(err <= eps, "{name} eps={eps}: key rank {j} predicted off by {err}");
                }
            }
            ensure!(s.len() <= last, "{name}: {} segments at eps={eps} after {last}", s.len());
            last = s.len();
            built += 1;
        }
    }
    Ok(format!("{built} segmentations, every key within eps"))
}

/// `(index, depth)` pairs for keys and for leaves.
type Shape = (Vec<(usize, u32)>, Vec<(usize, u32)>);

/// A named criterion with its time budget in seconds.
type Criterion = (&'static str, u64, fn() -> Check);

/// Key and leaf depths of every binary search tree over `n` keys.
fn all_trees(n: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    fn rec(lo: usize, hi: usize, d: u32) -> Vec<Shape> {
        if lo == hi {
            return vec![(vec![], vec![(lo, d)])];
        }
        let mut out = Vec::new();
        for r in lo..hi {
            let left = rec(lo, r, d + 1);
            let right = rec(r + 1, hi, d + 1);
            for (lk, ll) in &left {
                for (rk, rl) in &right {
                    let mut keys = vec![(r, d)];
                    keys.extend(lk.iter().chain(rk));
                    out.push((keys, ll.iter().chain(rl).copied().collect()));
                }
            }
        }
        out
    }
    rec(0, n, 0)
        .into_iter()
        .map(|(ks, ls)| {
            let mut kd = vec![0; n];
            let mut ld = vec![0; n + 1];
            for (i, d) in ks {
                kd[i] = d;
            }
            for (i, d) in ls {
                ld[i] = d;
            }
            (kd, ld)
        })
        .collect()
}

fn ac6_optimal_bst() -> Check {
    let shapes: Vec<_> = (0..=10).map(all_trees).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for inst in 0..1000 {
        let n = inst % 10 + 1;
        let mut p: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let mut q: Vec<f64> = (0..=n).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = p.iter().chain(&q).sum();
        p.iter_mut().chain(q.iter_mut()).for_each(|x| *x /= total);
        let brute = shapes[n]
            .iter()
            .map(|(kd, ld)| {
                p.iter().zip(kd).map(|(w, &d)| w * (d as f64 + 1.0)).sum::<f64>()
                    + q.iter().zip(ld).map(|(w, &d)| w * d as f64).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        let dp = optimal_bst(&p, &q).map_err(|e| e.to_string())?.cost;
        ensure!((dp - brute).abs() <= 1e-9, "instance {inst} (n={n}): dp {dp} vs enumeration {brute}");
    }
    Ok(format!("1000 instances, n=1..10, {} trees at n=10", shapes[10].len()))
}

fn ac7_entropy_bound() -> Check {
    let results = Execution::default().map_indices(1000, |inst| -> Result<(f64, f64, f64), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + inst as u64);
        let n = rng.gen_range(1..=200);
        let mut keys: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1u64 << 40)).collect();
        keys.sort_unstable();
        keys.dedup();
        let m = keys.len();
        let dist =
            AccessDistribution::from_weights((0..m).map(|_| rng.gen()).collect(), (0..=m).map(|_| rng.gen()).collect())
                .map_err(|e| e.to_string())?;
        let exact =
            optimize_over_k(&keys, &dist, 16, ForestMode::Exact, Execution::Sequential).map_err(|e| e.to_string())?;
        let approx =
            optimize_over_k(&keys, &dist, 16, ForestMode::Approx, Execution::Sequential).map_err(|e| e.to_string())?;
        for ((k, e), (_, a)) in exact.costs.iter().zip(&approx.costs) {
            if *a < e - 1e-9 {
                return Err(format!("instance {inst} k={k}: approx {a} below exact {e}"));
            }
        }
        Ok((exact.best.total_cost, approx.best.total_cost, exact.entropy))
    });
    let mut worst_slack = f64::INFINITY;
    for (i, r) in results.into_iter().enumerate() {
        let (exact, approx, h) = r?;
        ensure!(exact <= h + 2.0, "instance {i}: exact cost {exact} above H+2 = {}", h + 2.0);
        ensure!(approx >= exact - 1e-9, "instance {i}: approx {approx} below exact {exact}");
        worst_slack = worst_slack.min(h + 2.0 - exact);
    }
    Ok(format!("1000 instances, smallest slack to H+2 is {worst_slack:.4}"))
}

fn ac8_dynamic() -> Check {
    let n = 10_000usize;
    let universe = (n * n) as u64;
    let keys = gen_uniform(n, universe, 8).map_err(|e| e.to_string())?;
    let spec = StreamSpec::Uniform { insert: 1, delete: 1, search: 1 };
    let stream = UpdateStream::generate(&keys, 100_000, (0, universe - 1), spec, 8).map_err(|e| e.to_string())?;
    let r = bench::run_stream::<SplayTree>(&keys, n, &stream, 10).map_err(|e| e.to_string())?;
    let tpu = r.ledger.touches_per_update();
    let limit = 8.0 * (r.n_max as f64).log2();
    ensure!(tpu <= limit, "touches per update {tpu:.2} above {limit:.2}");
    let mut prev_n = r.n_initial;
    for (i, e) in r.ledger.events.iter().enumerate() {
        if e.trigger == RebuildTrigger::UpdateCount {
            let window = (prev_n / 2).max(1);
            ensure!(
                e.updates_since_previous == window,
                "rebuild {i} after {} updates, window {window}",
                e.updates_since_previous
            );
        } else {
            ensure!(
                e.updates_since_previous < (prev_n / 2).max(1) || e.trigger == RebuildTrigger::OutOfRange,
                "rebuild {i} overdue"
            );
        }
        prev_n = e.elements_touched;
    }
    let updates = r.ledger.count(RebuildTrigger::UpdateCount);

    let spaced: Vec<u64> = (0..n as u64).map(|i| i << 16).collect();
    let adv = UpdateStream::generate(&spaced, 20_000, (0, (n as u64) << 16), StreamSpec::Adversarial, 9)
        .map_err(|e| e.to_string())?;
    let a = bench::run_stream::<SplayTree>(&spaced, n, &adv, 4).map_err(|e| e.to_string())?;
    let growth = a.ledger.count(RebuildTrigger::DeltaGrowth);
    let bound = (a.delta_max / a.delta_0).log2() + 1.0;
    ensure!(growth as f64 <= bound, "{growth} gap-ratio rebuilds above {bound:.2}");
    Ok(format!(
        "no divergence, {tpu:.2} touches/update (limit {limit:.1}), {updates} update-count rebuilds; adversarial: {growth} gap-ratio rebuilds <= {bound:.2}"
    ))
}

fn ac9_delta_study() -> Check {
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for n in SUBSAMPLE_SIZES {
        let sets: Vec<_> =
            (0..20).map(|s| bench::dense_uniform(n, 900 + s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let r = bench::delta_report(sets.iter().map(|k| ("dense", k.as_slice())));
        let ok = r.iter().filter(|row| row.delta.unwrap() <= 20.0 * row.ln_n).count();
        ensure!(ok >= 19, "n={n}: {ok}/20 seeds with delta <= 20 ln n");
        summary.push(format!("n={n}: {ok}/20"));
        rows.extend(r);
    }
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf).map_err(|e| e.to_string())?;
    let header = String::from_utf8(buf).unwrap().lines().next().unwrap_or_default().to_string();
    for col in ["ln_n", "ln2_n", "ln3_n", "ln4_n"] {
        ensure!(header.split(',').any(|c| c == col), "column {col} missing from {header}");
    }
    Ok(summary.join(", "))
}

fn ac10_space_bounded() -> Check {
    let keys = gen_uniform(1_000_000, 1 << 44, 10).map_err(|e| e.to_string())?;
    let w = gen_queries(&keys, 100_000, 0.5, 10).map_err(|e| e.to_string())?;
    let kinds = vec![DictKind::Bbs, DictKind::Bfe, DictKind::Css];
    let grid = SpaceGrid::powers_of_two(keys.len(), kinds);
    let bounds = [0.05, 0.07, 0.2, 100.0];
    let (rows, all) = bench::space_bounded("uniform", &keys, &w.queries, &bounds, &grid, 3, Execution::default())
        .map_err(|e| e.to_string())?;
    for r in &rows {
        let (Some(id), Some(param), Some(pct)) = (&r.dictionary_id, r.model_param, r.space_overhead_pct) else {
            return Err(format!("bound {}% {}: infeasible", r.bound_pct, r.model_id));
        };
        ensure!(pct <= r.bound_pct, "bound {}%: reported {pct}%", r.bound_pct);
        let kind: DictKind = id.parse().map_err(|e: learned_dict::Error| e.to_string())?;
        let rebuilt = with_dictionary!(kind, D => {
            if r.model_id == "binning" {
                binning::build::<D>(&keys, param as usize, &kind.params()).map(|d| d.overhead_pct())
            } else {
                segments::build::<D>(&keys, param, &kind.params()).map(|d| d.overhead_pct())
            }
        })
        .map_err(|e| e.to_string())?;
        ensure!(
            rebuilt == pct && rebuilt <= r.bound_pct,
            "{} {id} {param}: accounting {rebuilt}% vs reported {pct}%",
            r.model_id
        );
    }
    let global = all.iter().min_by(|a, b| a.mean_query_ns.total_cmp(&b.mean_query_ns)).unwrap();
    let at_full =
        rows.iter().filter(|r| r.bound_pct == 100.0).filter_map(|r| r.mean_query_ns).fold(f64::INFINITY, f64::min);
    ensure!(
        at_full == global.mean_query_ns,
        "bound 100% returns {at_full:.1} ns but the global best is {} {} {}={} at {:.1} ns with {:.1}% overhead",
        global.dictionary_id,
        global.model_id,
        if global.model_id == "binning" { "k" } else { "eps" },
        global.model_param,
        global.mean_query_ns,
        global.space_overhead_pct
    );
    let picks: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{}%/{}={}:{}",
                r.bound_pct,
                r.model_id,
                r.dictionary_id.as_deref().unwrap_or("-"),
                r.model_param.unwrap_or(0)
            )
        })
        .collect();
    Ok(picks.join(" "))
}

fn ac11_subsampling() -> Check {
    let source = gen_uniform(1_000_000, 1 << 44, 11).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for target in SUBSAMPLE_SIZES {
        let (_, diag) = match subsample_matching_cdf(&source, target, 100, 11, Execution::default()) {
            Ok(r) => r,
            Err(workloads_err) => return Err(format!("target {target}: {workloads_err}")),
        };
        let chosen = diag.chosen_trial.expect("at least one acceptance");
        let chosen_kl = diag.records[chosen].kl;
        ensure!(
            diag.records.iter().filter(|r| r.accepted).all(|r| chosen_kl <= r.kl),
            "target {target}: chosen KL {chosen_kl} is not the smallest accepted"
        );
        summary.push(format!("{target}: {}/100 accepted", diag.accepted));
        if diag.acceptance_rate() < 0.99 {
            failures.push(format!("{target}: {:.0}% KS acceptance", 100.0 * diag.acceptance_rate()));
        }
    }
    let _ = workloads::KS_ALPHA;
    ensure!(failures.is_empty(), "{} (below 99%; all: {})", failures.join(", "), summary.join(", "));
    Ok(summary.join(", "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC-1 oracle equivalence", 120, ac1_oracle_equivalence),
        ("AC-2 boosting shape", 180, ac2_boosting_shape),
        ("AC-3 degenerate binning", 60, ac3_degenerate_binning),
        ("AC-4 max load", 120, ac4_max_load),
        ("AC-5 epsilon guarantee", 120, ac5_epsilon_guarantee),
        ("AC-6 optimal BST oracle", 120, ac6_optimal_bst),
        ("AC-7 entropy bound", 300, ac7_entropy_bound),
        ("AC-8 dynamic amortization", 180, ac8_dynamic),
        ("AC-9 gap ratio study", 60, ac9_delta_study),
        ("AC-10 space-bounded selection", 180, ac10_space_bounded),
        ("AC-11 KS/KL subsampling", 120, ac11_subsampling),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, budget, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => Err(format!("over budget ({budget} s): {detail}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} [{:.1} s] {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} [{:.1} s] {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
