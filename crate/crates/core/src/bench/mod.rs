//! Experiment drivers behind the `ldict` binary.
//!
//! Every driver returns plain row structs; [`write_csv`] serializes them with
//! a leading `schema` column. Timings are taken on the calling thread only,
//! builds may use the rayon pool.

mod boost;
mod delta;
mod epsilon;
mod forest;
mod record;
mod space;
mod stream;
mod timing;

pub use boost::{bench_boost, DEFAULT_PERCENTAGES};
pub use delta::{delta_report, dense_uniform, DeltaRow, DENSE_UNIVERSE_FACTOR, SUBSAMPLE_SIZES};
pub use epsilon::bench_epsilon;
pub use forest::{forest_report, DistSpec, ForestRow};
pub use record::{write_csv, write_csv_file, BenchRecord, SCHEMA_VERSION};
pub use space::{space_bounded, SpaceGrid, SpaceRow, SpaceStatus, DEFAULT_BOUNDS};
pub use stream::{run_stream, Mirror, StreamOp, StreamReport, StreamRow, StreamSpec, UpdateStream};
pub use timing::{median, time_learned, time_plain, Timing, DEFAULT_REPEATS};
