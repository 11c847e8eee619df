//! Coefficient sequences and the quasi-norms defined on them.

mod besov;
mod coeff;
mod lorentz;
mod params;
mod polygon;
mod triebel;

pub use besov::{besov_cone_term, besov_norm};
pub use coeff::{BlockKey, CoeffSeq};
pub use lorentz::{
    lemma_identification_check, lemma_weight, lorentz_norm, rearrangement, weighted_lp, LemmaReport,
    RearrangementStep,
};
pub use params::{parse_ext_real, SpaceParams, WeightSeq};
pub use params::ext_real as ext_real_serde;
pub use triebel::{tl_norm, tl_norm_report, TlMethod, TlReport};
