//! Windowed cleansing of trajectory streams.

pub mod config;
pub mod io;
pub mod stream;
pub mod window;

pub use config::Config;
pub use io::{read_locations, read_output, write_locations, write_output, OutputRow};
pub use stream::{group_monotonic, run_stream, StreamOutput, StreamReport};
pub use window::{
    run_window, ObjectContext, PhaseTimings, ServiceWindow, WindowResult, WindowStats,
};
