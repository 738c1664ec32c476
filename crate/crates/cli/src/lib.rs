//! Command-line front end for `pptmerge`.
//!
//! ```sh
//! pptmerge generate sep-no-merge --seed 7 --out sep.json
//! pptmerge classify sep.json --json report.json
//! pptmerge measure sep.json is-ppt --cut B:C
//! ```
//!
//! Exit codes: `0` success, `2` malformed input (unknown family, unreadable
//! state file, bad cut, missing labels), `3` generation failure or size cap
//! exceeded, `4` contradictory classification criteria.

pub mod app;
pub mod cut;
pub mod error;
pub mod report;
pub mod statefile;

pub use app::{run, Cli};
pub use error::{CliError, EXIT_FAILURE, EXIT_INCONSISTENT, EXIT_USAGE};
pub use statefile::{Labels, LoadedState, StateFile};
