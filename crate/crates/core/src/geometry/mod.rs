//! Curves, annuli and metric cylinders, and the geometric constants derived from them.

pub mod annulus;
pub mod curve;
pub mod cylinder;

pub use annulus::{AnnulusConstants, AnnulusDomain, FoliationConstants, NormalCoords, RayHit, StarlikeReport};
pub use curve::{ArcLengthTable, ClosedCurve, Point};
pub use cylinder::{MetricCylinder, Profile};
