//! ε-bounded piecewise-linear segmentation used as a variable-width model.
//!
//! Keys are scanned left to right while a streaming convex hull keeps the
//! set of lines that pass within `±ε` of every `(key, rank)` point seen so
//! far; a segment closes when that set becomes empty, so each segment is as
//! long as possible. The stored line is shifted up by one half so that its
//! floor stays inside the integer band despite rounding.

use crate::dict::{DictParams, SortedDictionary};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{GenericModel, LearnedDictionary, Route};

/// One linear piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub first_key: u64,
    pub slope: f64,
    /// Predicted rank at `first_key` (already includes the rounding shift).
    pub intercept: f64,
    pub start_rank: usize,
    pub end_rank: usize,
}

impl Segment {
    /// Predicted global rank of `x`.
    #[inline]
    pub fn predict(&self, x: u64) -> i64 {
        (self.intercept + self.slope * x.wrapping_sub(self.first_key) as f64).floor() as i64
    }
}

/// The routing half of a segmented dictionary.
#[derive(Debug, Clone)]
pub struct Segmentation {
    epsilon: u64,
    segments: Vec<Segment>,
    routing_keys: Vec<u64>,
    last_key: u64,
}

/// Segmentation with a dictionary per segment.
pub type SegmentPartition<D> = LearnedDictionary<Segmentation, D>;

impl Segmentation {
    pub fn epsilon(&self) -> u64 {
        self.epsilon
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Binary-search steps needed to route a query.
    pub fn routing_steps(&self) -> u32 {
        self.segments.len().next_power_of_two().trailing_zeros()
    }

    /// Zero-based segment for `x` within `[first key, last key]`.
    #[inline]
    pub fn segment_of(&self, x: u64) -> usize {
        self.routing_keys.partition_point(|&k| k <= x) - 1
    }

    /// Largest `|predict(A[j]) - j|` over the keys.
    pub fn max_error(&self, keys: &[u64]) -> u64 {
        self.segments
            .iter()
            .flat_map(|s| (s.start_rank..s.end_rank).map(move |j| (s.predict(keys[j]) - j as i64).unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Segments `keys` with error budget `epsilon`.
    pub fn fit(keys: &[u64], epsilon: u64) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::EmptyKeySet);
        }
        let eps = hull_epsilon(epsilon, keys.len());
        let mut segments = Vec::new();
        let mut hull = Hull::default();
        let mut start = 0;
        let mut j = 0;
        while j < keys.len() {
            if hull.add(keys[j] as i128, j as i128, eps) {
                j += 1;
                continue;
            }
            close(&mut segments, &hull, keys, start, j, epsilon);
            start = j;
            hull = Hull::default();
        }
        close(&mut segments, &hull, keys, start, keys.len(), epsilon);
        let routing_keys = segments.iter().map(|s| s.first_key).collect();
        Ok(Segmentation { epsilon, segments, routing_keys, last_key: *keys.last().unwrap() })
    }
}

/// Budgets beyond `n` admit the same lines as `n`; capping keeps every
/// slope product inside 128 bits.
fn hull_epsilon(epsilon: u64, n: usize) -> i128 {
    epsilon.min(n as u64) as i128
}

/// Emits the segment for `keys[start..end]`, splitting it further if float
/// rounding pushed any prediction out of the band.
fn close(out: &mut Vec<Segment>, hull: &Hull, keys: &[u64], start: usize, end: usize, epsilon: u64) {
    let (slope, intercept) = hull.line(keys[start] as i128);
    let seg = Segment { first_key: keys[start], slope, intercept: intercept + 0.5, start_rank: start, end_rank: end };
    let bad = (start..end).find(|&j| (seg.predict(keys[j]) - j as i64).unsigned_abs() > epsilon);
    match bad {
        None => out.push(seg),
        Some(j) => {
            let cut = j.max(start + 1);
            refit(out, keys, start, cut, epsilon);
            refit(out, keys, cut, end, epsilon);
        }
    }
}

fn refit(out: &mut Vec<Segment>, keys: &[u64], start: usize, end: usize, epsilon: u64) {
    if start == end {
        return;
    }
    let mut hull = Hull::default();
    for j in start..end {
        let fits = hull.add(keys[j] as i128, j as i128, hull_epsilon(epsilon, keys.len()));
        debug_assert!(fits, "a prefix of a feasible run is feasible");
    }
    close(out, &hull, keys, start, end, epsilon);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Point {
    x: i128,
    y: i128,
}

/// Direction vector compared by slope; every comparison is between vectors
/// whose `dx` have the same sign.
#[derive(Debug, Clone, Copy)]
struct Slope {
    dx: i128,
    dy: i128,
}

impl std::ops::Sub for Point {
    type Output = Slope;
    fn sub(self, o: Point) -> Slope {
        Slope { dx: self.x - o.x, dy: self.y - o.y }
    }
}

impl Slope {
    fn lt(self, o: Slope) -> bool {
        self.dy * o.dx < o.dy * self.dx
    }

    fn gt(self, o: Slope) -> bool {
        o.lt(self)
    }

    fn as_f64(self) -> f64 {
        self.dy as f64 / self.dx as f64
    }
}

fn cross(o: Point, a: Point, b: Point) -> i128 {
    let (u, v) = (a - o, b - o);
    u.dx * v.dy - u.dy * v.dx
}

/// Streaming feasible-line region. `upper` is the convex chain of the
/// `y + ε` points, `lower` that of the `y - ε` points, and `rect` holds the
/// two extreme feasible lines as point pairs `(0, 2)` and `(1, 3)`.
#[derive(Debug, Default)]
struct Hull {
    count: usize,
    rect: [Option<Point>; 4],
    upper: Vec<Point>,
    lower: Vec<Point>,
    upper_start: usize,
    lower_start: usize,
}

impl Hull {
    fn r(&self, i: usize) -> Point {
        self.rect[i].expect("rectangle initialised")
    }

    /// Adds `(x, y)`; returns `false`, leaving the hull unchanged, when no
    /// line stays within `±eps` of every point.
    fn add(&mut self, x: i128, y: i128, eps: i128) -> bool {
        let p1 = Point { x, y: y + eps };
        let p2 = Point { x, y: y - eps };
        match self.count {
            0 => {
                self.rect = [Some(p1), Some(p2), None, None];
                self.upper = vec![p1];
                self.lower = vec![p2];
                self.upper_start = 0;
                self.lower_start = 0;
                self.count = 1;
                return true;
            }
            1 => {
                self.rect[2] = Some(p2);
                self.rect[3] = Some(p1);
                self.upper.push(p1);
                self.lower.push(p2);
                self.count = 2;
                return true;
            }
            _ => {}
        }
        let slope1 = self.r(2) - self.r(0);
        let slope2 = self.r(3) - self.r(1);
        if (p1 - self.r(2)).lt(slope1) || (p2 - self.r(3)).gt(slope2) {
            return false;
        }
        if (p1 - self.r(1)).lt(slope2) {
            // tighten the maximum slope against the lower hull
            let mut min = self.lower[self.lower_start] - p1;
            let mut min_i = self.lower_start;
            for i in self.lower_start + 1..self.lower.len() {
                let val = self.lower[i] - p1;
                if val.gt(min) {
                    break;
                }
                min = val;
                min_i = i;
            }
            self.rect[1] = Some(self.lower[min_i]);
            self.rect[3] = Some(p1);
            self.lower_start = min_i;
            let mut end = self.upper.len();
            while end >= self.upper_start + 2 && cross(self.upper[end - 2], self.upper[end - 1], p1) <= 0 {
                end -= 1;
            }
            self.upper.truncate(end);
            self.upper.push(p1);
        }
        if (p2 - self.r(0)).gt(slope1) {
            // tighten the minimum slope against the upper hull
            let mut max = self.upper[self.upper_start] - p2;
            let mut max_i = self.upper_start;
            for i in self.upper_start + 1..self.upper.len() {
                let val = self.upper[i] - p2;
                if val.lt(max) {
                    break;
                }
                max = val;
                max_i = i;
            }
            self.rect[0] = Some(self.upper[max_i]);
            self.rect[2] = Some(p2);
            self.upper_start = max_i;
            let mut end = self.lower.len();
            while end >= self.lower_start + 2 && cross(self.lower[end - 2], self.lower[end - 1], p2) >= 0 {
                end -= 1;
            }
            self.lower.truncate(end);
            self.lower.push(p2);
        }
        self.count += 1;
        true
    }

    /// A feasible line as `(slope, value at origin)`.
    fn line(&self, origin: i128) -> (f64, f64) {
        if self.count <= 1 {
            let (a, b) = (self.r(0), self.r(1));
            return (0.0, ((a.y + b.y) / 2) as f64);
        }
        let (p0, p1, p2, p3) = (self.r(0), self.r(1), self.r(2), self.r(3));
        let s1 = p2 - p0;
        let s2 = p3 - p1;
        let (min_slope, max_slope) = (s1.as_f64(), s2.as_f64());
        let a = s1.dx * s2.dy - s1.dy * s2.dx;
        let (ix, iy) = if a == 0 {
            (p0.x as f64, p0.y as f64)
        } else {
            let b = ((p1.x - p0.x) * (p3.y - p1.y) - (p1.y - p0.y) * (p3.x - p1.x)) as f64 / a as f64;
            (p0.x as f64 + b * s1.dx as f64, p0.y as f64 + b * s1.dy as f64)
        };
        let slope = (min_slope + max_slope) / 2.0;
        (slope, iy - (ix - origin as f64) * slope)
    }
}

impl GenericModel for Segmentation {
    const ID: &'static str = "segments";

    fn intervals(&self) -> usize {
        self.segments.len()
    }

    #[inline]
    fn route(&self, x: u64) -> Route {
        if x < self.routing_keys[0] {
            Route::Below
        } else if x > self.last_key {
            Route::Above
        } else {
            Route::Interval(self.segment_of(x))
        }
    }

    fn heap_bytes(&self) -> usize {
        self.segments.capacity() * std::mem::size_of::<Segment>() + self.routing_keys.capacity() * 8
    }
}

pub fn build<D: SortedDictionary>(keys: &[u64], epsilon: u64, params: &DictParams) -> Result<SegmentPartition<D>> {
    build_with(keys, epsilon, params, Execution::default())
}

pub fn build_with<D: SortedDictionary>(
    keys: &[u64],
    epsilon: u64,
    params: &DictParams,
    exec: Execution,
) -> Result<SegmentPartition<D>> {
    let model = Segmentation::fit(keys, epsilon)?;
    let mut starts: Vec<usize> = model.segments.iter().map(|s| s.start_rank).collect();
    starts.push(keys.len());
    LearnedDictionary::from_parts(model, keys, starts, params, exec)
}

/// `ε = 1, 2, 4, …` up to `n / 2`.
pub fn epsilon_sweep(n: usize) -> Vec<u64> {
    let top = (n / 2).max(1) as u64;
    std::iter::successors(Some(1u64), |e| e.checked_mul(2)).take_while(|&e| e <= top).collect()
}
