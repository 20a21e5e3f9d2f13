//! Plane loops, their curvature and the mKdV hierarchy of isometric,
//! energy-preserving deformations.
//!
//! The crate has an exact side ([`jetalg`], [`hierarchy`], [`faber`]) working
//! over big rationals and a numerical side ([`spectral`], [`loopgeom`],
//! [`deform`], [`flow`]) that is generic over the float type through
//! [`scalar::Real`]. The aliases below fix the numerical side to `f64`.

pub mod deform;
pub mod error;
pub mod faber;
pub mod flow;
pub mod hierarchy;
pub mod io;
pub mod jetalg;
pub mod loopgeom;
pub mod scalar;
pub mod spectral;

pub use error::{Error, ErrorClass, Result};
pub use jetalg::DiffPoly;
pub use loopgeom::Tolerances;

pub type Grid = spectral::Grid<f64>;
pub type Curvature = loopgeom::CurvatureField<f64>;
pub type Loop = loopgeom::Immersion<f64>;
pub type Deformation = deform::DeformationField<f64>;
pub type Trajectory = flow::Trajectory<f64>;
