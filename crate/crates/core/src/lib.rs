//! Computational nonpositive curvature: wall systems, CAT(0) cube complexes,
//! Sageev's construction, median graph recognition, hyperbolicity
//! diagnostics and injective hulls of finite metric spaces.

pub mod complex;
pub mod error;
pub mod families;
pub mod hypdiag;
pub mod medianrec;
pub mod numeric;
pub mod sageev;
pub mod tightspan;
pub mod wallsys;
pub mod zeta;

pub use complex::{ComplexDoc, CubeComplex, HellyOutcome, Hull, Metric, Orientation, VertexPath};
pub use error::{Error, Result};
pub use hypdiag::{CurtainValue, DeltaEstimate, GridWitness, MetricValue, PseudoMetricTable, SeparationProfile};
pub use medianrec::{GraphDoc, MedianCheck, SimpleGraph};
pub use numeric::Rational;
pub use sageev::{RoundtripCertificate, WallMatch};
pub use tightspan::{FiniteMetric, HellyWitness, MetricDoc, MetricForm, Retraction, TightSpanReport, Tripod};
pub use wallsys::{Chain, Relation, Side, ValidationReport, Violation, ViolationKind, Wall, WallSystem, WallSystemDoc};
