//! Combinatorial toolkit for cancellation questions on A¹-fibered affine surfaces.

pub mod blowups;
pub mod cancellation;
pub mod covering;
pub mod divisors;
pub mod equations;
pub mod error;
pub mod invariants;
pub mod stretching;
pub mod trees;

pub use blowups::{BlowupSequence, BlowupStep, ExtendedGraph, StepKind};
pub use cancellation::{Certificate, CylinderVerdict, FamilyMember, Route, ZariskiKind, ZariskiStatus};
pub use covering::{DpdDivisor, DpdEntry, HjString};
pub use divisors::{BaseCurve, GraphDivisor, IsoOutcome, Matching, Mode};
pub use equations::{Classification, DanielewskiForm, MmForm, MmOutcome, NormalFormWitness};
pub use error::{Error, Result};
pub use invariants::{ClassGroup, InvariantReport};
pub use stretching::{Level, StretchEntry, StretchSpec};
pub use trees::{FiberTree, MultiplicityMap, VertexRecord};
