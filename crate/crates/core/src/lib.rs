//! Exact truncated arithmetic for the Morava stabilizer group `S_n`, the
//! Lubin-Tate universal deformation `G_n` and the action of `S_n` on `E_0`.
//!
//! Everything is computed to an explicit finite precision: Witt vectors of
//! `F_{p^n}` modulo `p^k`, the deformation ring modulo `m^j`, series modulo
//! `x^{N+1}`.

pub mod arith;
pub mod fgl;
pub mod lubin_tate;
pub mod parse;
pub mod poly;
pub mod ring;
pub mod series;
pub mod stabilizer;
pub mod verdicts;

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "ltlab/1";

/// Any error the library reports.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error(transparent)]
    Parse(#[from] parse::ParseError),
    #[error(transparent)]
    Series(#[from] series::SeriesError),
    #[error(transparent)]
    Fgl(#[from] fgl::FglError),
    #[error(transparent)]
    Stab(#[from] stabilizer::StabError),
    #[error(transparent)]
    Lt(#[from] lubin_tate::LtError),
    #[error(transparent)]
    Verdict(#[from] verdicts::VerdictError),
}
