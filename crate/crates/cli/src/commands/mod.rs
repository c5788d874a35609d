//! One module per subcommand; each writes its outputs and reports whether
//! its acceptance checks passed.

pub mod carleman;
pub mod geometry;
pub mod reconstruct;
pub mod simulate;
pub mod stability;
pub mod ucp;

pub struct Outcome {
    /// None for subcommands without an acceptance check.
    pub passed: Option<bool>,
    pub summary: String,
}
