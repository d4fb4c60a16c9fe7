//! Numerical workbench for equilibrium stresses of bar-joint frameworks.
//!
//! The crate computes stress spaces of frameworks, classifies stress
//! matrices as general position (Gstress) or locally full spanning
//! (Fstress), builds such stresses from rubber-band weights or from
//! orthogonal representations of the graph, extracts kernel frameworks,
//! and issues certificates for generic global rigidity, super stability
//! and stressed corank.
//!
//! All numerical code is generic over a [`Real`] scalar (`f32` or `f64`).
//! The `*64` aliases at the crate root fix the scalar to `f64`, which is
//! what the command line front end uses.

pub mod certificates;
pub mod constructions;
pub mod error;
pub mod frameworks;
pub mod graphs;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod statics;
pub mod stresses;

pub use error::{Error, Result};
pub use graphs::Graph;

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar used by every numerical routine.
pub trait Real:
    nalgebra::RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Default relative singular value cutoff for this precision.
    const DEFAULT_REL_TOL: f64;
    /// Default absolute floor below which a singular value is zero.
    const DEFAULT_ABS_FLOOR: f64;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_REL_TOL: f64 = 1e-9;
    const DEFAULT_ABS_FLOOR: f64 = 1e-12;
}

impl Real for f32 {
    const DEFAULT_REL_TOL: f64 = 1e-4;
    const DEFAULT_ABS_FLOOR: f64 = 1e-6;
}

pub type TolerancePolicy64 = linalg::TolerancePolicy<f64>;
pub type TolerancePolicy32 = linalg::TolerancePolicy<f32>;
pub type Framework64 = frameworks::Framework<f64>;
pub type Framework32 = frameworks::Framework<f32>;
pub type StressMatrix64 = stresses::StressMatrix<f64>;
pub type StressMatrix32 = stresses::StressMatrix<f32>;
pub type StressVector64 = stresses::StressVector<f64>;
pub type OrthogonalRep64 = constructions::OrthogonalRep<f64>;
pub type Load64 = statics::Load<f64>;

