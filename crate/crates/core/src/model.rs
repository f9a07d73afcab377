//! Learned versions of a sorted-set dictionary: a generic model that splits
//! the key array into contiguous intervals, plus one dictionary per interval.

use crate::dict::{DictParams, SortedDictionary, StaticDictionary};
use crate::error::Result;
use crate::exec::Execution;
use crate::keys::SearchOutcome;

/// Where a model sends a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Smaller than every key.
    Below,
    /// Larger than every key.
    Above,
    /// Zero-based interval index.
    Interval(usize),
}

/// A partition of the universe into intervals with a routing function.
pub trait GenericModel: Send + Sync {
    /// Short identifier used in CSV output.
    const ID: &'static str;

    fn intervals(&self) -> usize;

    fn route(&self, x: u64) -> Route;

    /// Heap bytes owned by the model itself.
    fn heap_bytes(&self) -> usize;
}

/// A generic model with a dictionary built over every non-empty interval.
///
/// `starts[i]..starts[i + 1]` is the rank range of interval `i`, so the
/// array doubles as the cumulative rank offset used when a query lands in an
/// empty interval.
#[derive(Debug, Clone)]
pub struct LearnedDictionary<M, D> {
    model: M,
    dicts: Vec<Option<D>>,
    starts: Vec<usize>,
}

impl<M: GenericModel, D: SortedDictionary> LearnedDictionary<M, D> {
    /// `starts` has `model.intervals() + 1` nondecreasing entries ending at
    /// `keys.len()`.
    pub fn from_parts(
        model: M,
        keys: &[u64],
        starts: Vec<usize>,
        params: &DictParams,
        exec: Execution,
    ) -> Result<Self> {
        debug_assert_eq!(starts.len(), model.intervals() + 1);
        debug_assert_eq!(starts.last().copied(), Some(keys.len()));
        let built = exec.map_indices(model.intervals(), |i| {
            let slice = &keys[starts[i]..starts[i + 1]];
            if slice.is_empty() {
                Ok(None)
            } else {
                D::build(slice, params).map(Some)
            }
        });
        let mut dicts = built.into_iter().collect::<Result<Vec<_>>>()?;
        dicts.shrink_to_fit();
        Ok(LearnedDictionary { model, dicts, starts })
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn len(&self) -> usize {
        *self.starts.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn intervals(&self) -> usize {
        self.dicts.len()
    }

    /// Rank range of interval `i`.
    pub fn interval_ranks(&self, i: usize) -> std::ops::Range<usize> {
        self.starts[i]..self.starts[i + 1]
    }

    pub fn interval_len(&self, i: usize) -> usize {
        self.starts[i + 1] - self.starts[i]
    }

    pub fn empty_intervals(&self) -> usize {
        self.dicts.iter().filter(|d| d.is_none()).count()
    }

    /// Largest number of keys in one interval.
    pub fn max_load(&self) -> usize {
        self.starts.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// Model overhead in bytes: the struct, the model, the per-interval
    /// dictionary handles, the rank offsets and every dictionary's auxiliary
    /// heap. The `8n` bytes of keys held by the dictionaries are excluded.
    pub fn overhead_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self.model.heap_bytes()
            + self.dicts.capacity() * std::mem::size_of::<Option<D>>()
            + self.starts.capacity() * std::mem::size_of::<usize>()
            + self.dicts.iter().flatten().map(|d| d.aux_heap_bytes()).sum::<usize>()
    }

    /// [`overhead_bytes`](Self::overhead_bytes) as a percentage of `8n`.
    pub fn overhead_pct(&self) -> f64 {
        100.0 * self.overhead_bytes() as f64 / (8.0 * self.len().max(1) as f64)
    }

    #[inline]
    fn finish(&self, route: Route, inner: impl FnOnce(usize) -> Option<SearchOutcome>) -> SearchOutcome {
        match route {
            Route::Below => SearchOutcome::new(0, false),
            Route::Above => SearchOutcome::new(self.len(), false),
            Route::Interval(i) => match inner(i) {
                Some(o) => o.offset(self.starts[i]),
                None => SearchOutcome::new(self.starts[i], false),
            },
        }
    }

    /// Query through exclusive access; the only entry point for
    /// self-adjusting final stages.
    #[inline]
    pub fn query_mut(&mut self, x: u64) -> SearchOutcome {
        let route = self.model.route(x);
        self.search_routed_mut(route, x)
    }

    /// [`query_mut`](Self::query_mut) for a query whose route is already known.
    #[inline]
    pub fn search_routed_mut(&mut self, route: Route, x: u64) -> SearchOutcome {
        let starts = &self.starts;
        match route {
            Route::Below => SearchOutcome::new(0, false),
            Route::Above => SearchOutcome::new(*starts.last().unwrap_or(&0), false),
            Route::Interval(i) => match self.dicts[i].as_mut() {
                Some(d) => d.search_mut(x).offset(starts[i]),
                None => SearchOutcome::new(starts[i], false),
            },
        }
    }
}

impl<M: GenericModel, D: StaticDictionary> LearnedDictionary<M, D> {
    #[inline]
    pub fn query(&self, x: u64) -> SearchOutcome {
        self.finish(self.model.route(x), |i| self.dicts[i].as_ref().map(|d| d.search(x)))
    }

    /// Final-stage search for a query whose route is already known.
    #[inline]
    pub fn search_routed(&self, route: Route, x: u64) -> SearchOutcome {
        self.finish(route, |i| self.dicts[i].as_ref().map(|d| d.search(x)))
    }

    pub fn query_batch(&self, xs: &[u64], exec: Execution) -> Vec<SearchOutcome> {
        exec.map_slice(xs, |&x| self.query(x))
    }
}

/// Answers a batch of queries against a plain dictionary.
pub fn search_batch<D: StaticDictionary>(d: &D, xs: &[u64], exec: Execution) -> Vec<SearchOutcome> {
    exec.map_slice(xs, |&x| d.search(x))
}
