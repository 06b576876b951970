//! Exact measure arithmetic on Kronecker systems: twisted recurrence search
//! and the comparison with window densities.

mod crosscheck;
mod region;
mod search;

pub use crosscheck::{correspondence_crosscheck, slack, CrosscheckReport};
pub use region::{Interval, Region};
pub use search::{intersection_measure, twisted_recurrence_search, LengthRow, RecurrenceReport, TwistConfig};
