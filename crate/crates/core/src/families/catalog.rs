//! Closed-form conformal factors with their declared constants.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{
    ConformalMetric, Point4, RadialPower, RationalQuadratic, ScalarField, Singularity,
    StandardGrid,
};

/// A solution family instance: the conformal factor plus the constants
/// `(a, A, R_h)` it is declared to satisfy.
#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub field: Arc<dyn ScalarField>,
    pub a: f64,
    /// `None` when the field solves `Δλ − aλ = Aλ³` for no constant `A`.
    pub big_a: Option<f64>,
    pub r_h: Option<f64>,
    pub metric: ConformalMetric,
    pub grid_radius: f64,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("field", &self.field.describe())
            .field("a", &self.a)
            .field("big_a", &self.big_a)
            .field("r_h", &self.r_h)
            .field("metric", &self.metric)
            .field("grid_radius", &self.grid_radius)
            .finish()
    }
}

impl CatalogEntry {
    /// Verification grid: [`StandardGrid::DEFAULT_POINTS`] points inside the
    /// entry's radius, away from the field's singular set.
    pub fn grid(&self, seed: u64) -> StandardGrid {
        StandardGrid::new(
            StandardGrid::DEFAULT_POINTS,
            self.grid_radius,
            StandardGrid::DEFAULT_EXCLUSION,
            &self.field.singular_set(),
            seed,
        )
    }

    pub fn singular_set(&self) -> Vec<Singularity> {
        self.field.singular_set()
    }
}

/// The named examples with closed-form factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalExample {
    /// `1/|x|`, the cylinder map.
    InverseRadius,
    /// `2/(1 − |x|²)` on the unit ball.
    PoincareBall,
    /// `2/(1 + |x|²)`, the identity into the round sphere.
    SphereIdentity,
    /// `|x|^α`, the identity into `|x|^{2α} dx²`.
    PowerAlpha(f64),
    /// `1/|x|²`, the inversion `x ↦ x/|x|²`.
    HarmonicInversion,
}

impl ClassicalExample {
    pub const NAMES: [&'static str; 5] = [
        "inverse_radius",
        "poincare_ball",
        "sphere_identity",
        "power_alpha",
        "harmonic_inversion",
    ];
}

impl fmt::Display for ClassicalExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalExample::InverseRadius => write!(f, "inverse_radius"),
            ClassicalExample::PoincareBall => write!(f, "poincare_ball"),
            ClassicalExample::SphereIdentity => write!(f, "sphere_identity"),
            ClassicalExample::PowerAlpha(a) => write!(f, "power_alpha({a})"),
            ClassicalExample::HarmonicInversion => write!(f, "harmonic_inversion"),
        }
    }
}

impl FromStr for ClassicalExample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("power_alpha").or_else(|| s.strip_prefix("power-alpha")) {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected power_alpha(<α>), got '{s}'")))?;
            let alpha = inner
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad exponent '{inner}': {e}")))?;
            return Ok(ClassicalExample::PowerAlpha(alpha));
        }
        match s.replace('-', "_").as_str() {
            "inverse_radius" => Ok(ClassicalExample::InverseRadius),
            "poincare_ball" => Ok(ClassicalExample::PoincareBall),
            "sphere_identity" => Ok(ClassicalExample::SphereIdentity),
            "harmonic_inversion" => Ok(ClassicalExample::HarmonicInversion),
            other => Err(Error::InvalidArgument(format!("unknown example '{other}'"))),
        }
    }
}

/// Builds the field of a classical example with its declared constants.
///
/// `R_h` follows `6A + 2a/λ² + R_h = 0`. For `power_alpha(−1)` this gives
/// `R_h = 6`, the curvature of the cylinder `ℝ × S³`.
pub fn classical_example(example: ClassicalExample) -> CatalogEntry {
    let origin = Point4::zeros();
    let flat = |name: String, field: Arc<dyn ScalarField>, big_a: Option<f64>, radius: f64| {
        CatalogEntry {
            name,
            field,
            a: 0.0,
            big_a,
            r_h: big_a.map(|b| -6.0 * b),
            metric: ConformalMetric::Flat,
            grid_radius: radius,
        }
    };
    let r = StandardGrid::DEFAULT_RADIUS;
    match example {
        ClassicalExample::InverseRadius => flat(
            example.to_string(),
            Arc::new(RadialPower::new(1.0, -1.0, origin)),
            Some(-1.0),
            r,
        ),
        ClassicalExample::PoincareBall => flat(
            example.to_string(),
            Arc::new(RationalQuadratic::identity_into_space_form(-1.0)),
            Some(2.0),
            1.0,
        ),
        ClassicalExample::SphereIdentity => flat(
            example.to_string(),
            Arc::new(RationalQuadratic::identity_into_space_form(1.0)),
            Some(-2.0),
            r,
        ),
        ClassicalExample::PowerAlpha(alpha) => flat(
            example.to_string(),
            Arc::new(RadialPower::new(1.0, alpha, origin)),
            (alpha == -1.0).then_some(-1.0),
            r,
        ),
        ClassicalExample::HarmonicInversion => flat(
            example.to_string(),
            Arc::new(RadialPower::new(1.0, -2.0, origin)),
            Some(0.0),
            r,
        ),
    }
}

/// Parameters a family may consume; unused ones are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams {
    pub delta: f64,
    pub center: Point4,
    pub alpha: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            delta: 1.0,
            center: Point4::zeros(),
            alpha: -1.0,
        }
    }
}

/// A named family that builds catalog entries from parameters.
pub trait FamilyBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, params: &FamilyParams) -> Result<CatalogEntry>;
}

struct Classical(&'static str);

impl FamilyBuilder for Classical {
    fn name(&self) -> &'static str {
        self.0
    }
    fn build(&self, params: &FamilyParams) -> Result<CatalogEntry> {
        let example = if self.0 == "power_alpha" {
            ClassicalExample::PowerAlpha(params.alpha)
        } else {
            self.0.parse()?
        };
        Ok(classical_example(example))
    }
}

struct BubbleFamily;

impl FamilyBuilder for BubbleFamily {
    fn name(&self) -> &'static str {
        "bubble"
    }
    fn build(&self, params: &FamilyParams) -> Result<CatalogEntry> {
        let b = super::Bubble::new(4, params.delta, params.center.as_slice().to_vec())?;
        Ok(CatalogEntry {
            name: format!("bubble(delta={})", params.delta),
            field: Arc::new(b.field4()?),
            a: 0.0,
            big_a: Some(-2.0),
            r_h: Some(12.0),
            metric: ConformalMetric::Flat,
            grid_radius: StandardGrid::DEFAULT_RADIUS,
        })
    }
}

/// Name-indexed family builders.
pub struct FamilyRegistry {
    families: BTreeMap<&'static str, Arc<dyn FamilyBuilder>>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self {
            families: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        for name in ClassicalExample::NAMES {
            r.register(Arc::new(Classical(name)));
        }
        r.register(Arc::new(BubbleFamily));
        r
    }

    pub fn register(&mut self, family: Arc<dyn FamilyBuilder>) {
        self.families.insert(family.name(), family);
    }

    /// Looks up `name`; `power_alpha(<α>)` is accepted with the exponent inline.
    pub fn build(&self, name: &str, params: &FamilyParams) -> Result<CatalogEntry> {
        let key = name.trim().replace('-', "_");
        if key.starts_with("power_alpha(") {
            let ClassicalExample::PowerAlpha(alpha) = name.parse()? else {
                unreachable!()
            };
            return self.build(
                "power_alpha",
                &FamilyParams {
                    alpha,
                    ..params.clone()
                },
            );
        }
        self.families
            .get(key.as_str())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{name}'")))?
            .build(params)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.keys().copied().collect()
    }
}
