//! Closed-form solution families and the Möbius-transformation engine.

mod bubble;
mod catalog;
mod cylinder;
mod mobius;
mod sobolev;

pub use bubble::Bubble;
pub use catalog::{
    classical_example, CatalogEntry, ClassicalExample, FamilyBuilder, FamilyParams,
    FamilyRegistry,
};
pub use cylinder::{cylinder_check, cylinder_pullback_defect, CylinderImage};
pub use mobius::{
    audit_cell, classify_mobius, mobius_conformal_factor, mobius_normal_form, CellAudit,
    Classification,
    ClassifyOptions, Epsilon, Evidence, MetricKind, MetricPairing, MobiusTransform, NormalForm,
    Verdict,
};
pub use sobolev::{
    best_sobolev_constant, sobolev_quotient, sobolev_quotient_tensor, BubbleRadial,
    GaussianRadial, RadialFunction, RadialQuadrature, ScaledRadial, SobolevConvention,
    SobolevQuotient,
};
