//! Input language, analysis driver and report emitters for the ccgen engine.

pub mod analysis;
pub mod parse;
pub mod random;
pub mod report;

pub use analysis::{run_analysis, Command, Overrides};
pub use parse::{parse_system, ErrorClass, ParseError, SystemFile};
pub use report::{emit_structured, emit_text, parse_structured, AnalysisReport};
