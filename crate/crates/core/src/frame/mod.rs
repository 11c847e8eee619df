//! Band-limited cone-adapted shearlet frame on the 2-D torus.

pub mod grid;
pub mod system;
pub mod window;

pub use grid::GridFunction;
pub use system::{band_list, eval_band, Band, BandCoeffs, ParsevalReport, ShearletSystem2D};
pub use window::{build_windows, Window1D};
