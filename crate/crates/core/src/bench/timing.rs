use std::hint::black_box;
use std::time::Instant;

use crate::dict::SortedDictionary;
use crate::model::{GenericModel, LearnedDictionary, Route};

pub const DEFAULT_REPEATS: usize = 5;

/// Per-query times in nanoseconds, each the median over the measured passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub mean_query_ns: f64,
    pub prediction_ns: f64,
    pub final_search_ns: f64,
}

/// Median of `xs`; the mean of the middle pair for even lengths.
pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// One warm-up pass, then the median per-query time of `repeats` passes.
fn measure(repeats: usize, len: usize, mut pass: impl FnMut() -> u64) -> f64 {
    black_box(pass());
    let mut samples: Vec<f64> = (0..repeats.max(1))
        .map(|_| {
            let t = Instant::now();
            black_box(pass());
            t.elapsed().as_nanos() as f64 / len.max(1) as f64
        })
        .collect();
    median(&mut samples)
}

fn route_code(r: Route) -> u64 {
    match r {
        Route::Below => 0,
        Route::Above => 1,
        Route::Interval(i) => i as u64 + 2,
    }
}

/// Times a plain dictionary; all of its time is final-search time.
pub fn time_plain<D: SortedDictionary>(d: &mut D, queries: &[u64], repeats: usize) -> Timing {
    let mean = measure(repeats, queries.len(), || {
        queries.iter().fold(0u64, |acc, &x| acc.wrapping_add(d.search_mut(black_box(x)).rank as u64))
    });
    Timing { mean_query_ns: mean, prediction_ns: 0.0, final_search_ns: mean }
}

/// Times whole queries, the routing step alone, and the final search alone
/// with routes computed beforehand.
pub fn time_learned<M: GenericModel, D: SortedDictionary>(
    d: &mut LearnedDictionary<M, D>,
    queries: &[u64],
    repeats: usize,
) -> Timing {
    let mean = measure(repeats, queries.len(), || {
        queries.iter().fold(0u64, |acc, &x| acc.wrapping_add(d.query_mut(black_box(x)).rank as u64))
    });
    let prediction = measure(repeats, queries.len(), || {
        let m = d.model();
        queries.iter().fold(0u64, |acc, &x| acc.wrapping_add(route_code(m.route(black_box(x)))))
    });
    let routes: Vec<Route> = queries.iter().map(|&x| d.model().route(x)).collect();
    let search = measure(repeats, queries.len(), || {
        queries
            .iter()
            .zip(&routes)
            .fold(0u64, |acc, (&x, &r)| acc.wrapping_add(d.search_routed_mut(r, black_box(x)).rank as u64))
    });
    Timing { mean_query_ns: mean, prediction_ns: prediction, final_search_ns: search }
}
