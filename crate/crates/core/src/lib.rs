//! Exact symbolic workbench for names of subsets of ω over the Cantor-space
//! measure algebra.

pub mod canjar;
pub mod clopen;
pub mod dyadic;
pub mod error;
pub mod filters;
pub mod interval;
pub mod names;
pub mod schedule;
pub mod solovay;

pub use clopen::{enumerate_clopens, BoolOp, Clopen, Coord};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use interval::IntervalPartition;
pub use names::{Bits, EventuallyPeriodicSet, Name, TailRule};
pub use schedule::Schedule;
