//! Stress constructions.
//!
//! * [`rubber_band`]: graphs with a `K_{d+1}` clique `H`. Free weights on
//!   the edges outside `H` determine an equilibrium configuration, and the
//!   weights on `H` are recovered by resolving the resulting load.
//! * [`gor`]: any `(d+1)`-connected graph. A general position orthogonal
//!   representation in `R^{n-d-1}` is centered by rescaling, and its
//!   (pseudo-)Gram matrix is the stress.

pub mod gor;
pub mod rubber_band;

pub use gor::{
    build_gor, center_gor, lss_stress, parse_signature, CenteringMap, OrthogonalRep,
};
pub use rubber_band::{
    complete_weights, equilibrium_configuration, free_edges, random_weights, rubber_band_readoff,
    rubber_band_stress, RubberBandInput, RubberBandOutput,
};
