//! Möbius transformations `x ↦ t_out + αQ(x − t_in)/|x − t_in|^ε` of ℝ⁴
//! and the biharmonicity of their four metric pairings.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Matrix4;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    Constant, ConformalMetric, EinsteinDatum, Point4, Product, Quadratic, RadialPower,
    RationalQuadratic, ScalarField, Singularity, StandardGrid, Vec4, SINGULAR_EXCLUSION,
};
use crate::residuals::{bfo_residual_on, eq4d_residual_on, tension_norm_on};

/// Tolerance on `QᵀQ = I`.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Epsilon {
    Zero,
    Two,
}

impl Epsilon {
    pub const ALL: [Epsilon; 2] = [Epsilon::Zero, Epsilon::Two];

    pub fn value(self) -> f64 {
        match self {
            Epsilon::Zero => 0.0,
            Epsilon::Two => 2.0,
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value() as u8)
    }
}

impl FromStr for Epsilon {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(Epsilon::Zero),
            "2" => Ok(Epsilon::Two),
            other => Err(Error::Parse(format!("eps must be 0 or 2, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobiusTransform {
    pub t_out: Vec4,
    pub t_in: Vec4,
    pub alpha: f64,
    pub q: Matrix4<f64>,
    pub eps: Epsilon,
}

fn orthogonality_defect(q: &Matrix4<f64>) -> f64 {
    (q.transpose() * q - Matrix4::identity()).abs().max()
}

impl MobiusTransform {
    pub fn new(t_out: Vec4, t_in: Vec4, alpha: f64, q: Matrix4<f64>, eps: Epsilon) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "alpha must be finite and positive (a sign belongs in Q), got {alpha}"
            )));
        }
        if t_out.iter().chain(t_in.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("translations must be finite".into()));
        }
        let d = orthogonality_defect(&q);
        if !(d <= ORTHOGONALITY_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "Q is not orthogonal: max |QᵀQ − I| = {d:.3e}"
            )));
        }
        Ok(Self {
            t_out,
            t_in,
            alpha,
            q,
            eps,
        })
    }

    pub fn identity() -> Self {
        Self {
            t_out: Vec4::zeros(),
            t_in: Vec4::zeros(),
            alpha: 1.0,
            q: Matrix4::identity(),
            eps: Epsilon::Zero,
        }
    }

    /// `x ↦ x/|x|²`.
    pub fn inversion() -> Self {
        Self {
            eps: Epsilon::Two,
            ..Self::identity()
        }
    }

    pub fn apply(&self, x: &Point4) -> Result<Point4> {
        let y = x - self.t_in;
        let scale = match self.eps {
            Epsilon::Zero => self.alpha,
            Epsilon::Two => {
                let r2 = y.norm_squared();
                if r2.sqrt() < SINGULAR_EXCLUSION {
                    return Err(Error::Domain(format!(
                        "point {:?} is the pole of the inversion",
                        x.as_slice()
                    )));
                }
                self.alpha / r2
            }
        };
        Ok(self.t_out + self.q * y * scale)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MobiusTransform) -> MobiusTransform {
        let (a2, b2, al2, q2) = (self.t_out, self.t_in, self.alpha, self.q);
        let (a1, b1, al1, q1) = (inner.t_out, inner.t_in, inner.alpha, inner.q);
        let q21 = q2 * q1;
        match (self.eps, inner.eps) {
            (Epsilon::Zero, e1) => MobiusTransform {
                t_out: a2 + q2 * (a1 - b2) * al2,
                t_in: b1,
                alpha: al2 * al1,
                q: q21,
                eps: e1,
            },
            (Epsilon::Two, Epsilon::Zero) => MobiusTransform {
                t_out: a2,
                t_in: b1 - q1.transpose() * (a1 - b2) / al1,
                alpha: al2 / al1,
                q: q21,
                eps: Epsilon::Two,
            },
            (Epsilon::Two, Epsilon::Two) => {
                let c = a1 - b2;
                if c.norm() == 0.0 {
                    return MobiusTransform {
                        t_out: a2,
                        t_in: b1,
                        alpha: al2 / al1,
                        q: q21,
                        eps: Epsilon::Zero,
                    };
                }
                let d = q1.transpose() * c;
                let d2 = d.norm_squared();
                let d_star = d / d2;
                let dh = d / d2.sqrt();
                let reflection = Matrix4::identity() - dh * dh.transpose() * 2.0;
                MobiusTransform {
                    t_out: a2 + q21 * d_star * al2,
                    t_in: b1 - d_star * al1,
                    alpha: al2 * al1 / d2,
                    q: q21 * reflection,
                    eps: Epsilon::Two,
                }
            }
        }
    }

    /// Random transform with translations in `[−1, 1]⁴`, `α ∈ [0.5, 2]` and
    /// `Q` from the QR factorization of a random matrix.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, eps: Epsilon) -> Self {
        let mut v = || Vec4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let t_out = v();
        let t_in = v();
        Self {
            t_out,
            t_in,
            alpha: rng.gen_range(0.5..2.0),
            q: random_orthogonal(rng),
            eps,
        }
    }

    /// Random transform on the sphere→sphere isometry locus.
    pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, eps: Epsilon) -> Self {
        let t_out = Vec4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let q = random_orthogonal(rng);
        let alpha = match eps {
            Epsilon::Zero => 1.0,
            Epsilon::Two => 1.0 + t_out.norm_squared(),
        };
        Self {
            t_out,
            t_in: q.transpose() * t_out,
            alpha,
            q,
            eps,
        }
    }

    /// Whether the sphere→sphere factor is identically 1, up to `tol`.
    pub fn on_isometry_locus(&self, tol: f64) -> bool {
        let target_alpha = match self.eps {
            Epsilon::Zero => 1.0,
            Epsilon::Two => 1.0 + self.t_out.norm_squared(),
        };
        (self.alpha - target_alpha).abs() <= tol * target_alpha
            && (self.t_in - self.q.transpose() * self.t_out).abs().max() <= tol
    }
}

fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<f64> {
    let m = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for k in 0..4 {
        if r[(k, k)] < 0.0 {
            out.column_mut(k).neg_mut();
        }
    }
    out
}

fn fmt_vec(v: &Vec4) -> String {
    v.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for MobiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = if self.q == Matrix4::identity() {
            "identity".to_string()
        } else {
            let mut entries = Vec::with_capacity(16);
            for i in 0..4 {
                for j in 0..4 {
                    entries.push(format!("{}", self.q[(i, j)]));
                }
            }
            entries.join(",")
        };
        write!(
            f,
            "eps={} alpha={} tout={} tin={} Q={}",
            self.eps,
            self.alpha,
            fmt_vec(&self.t_out),
            fmt_vec(&self.t_in),
            q
        )
    }
}

fn parse_list(key: &str, s: &str, len: usize) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{key}: bad number '{c}': {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if v.len() != len {
        return Err(Error::Parse(format!("{key} needs {len} entries, got {}", v.len())));
    }
    Ok(v)
}

impl FromStr for MobiusTransform {
    type Err = Error;

    /// Parses `eps=2 alpha=1.5 tout=0,0,0,0 tin=1,0,0,0 Q=identity`.
    /// `tout`, `tin` default to 0 and `Q` to the identity; `Q` otherwise
    /// takes 16 row-major entries.
    fn from_str(s: &str) -> Result<Self> {
        let (mut eps, mut alpha) = (None, None);
        let (mut t_out, mut t_in, mut q) = (Vec4::zeros(), Vec4::zeros(), Matrix4::identity());
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{token}'")))?;
            match key {
                "eps" => eps = Some(value.parse::<Epsilon>()?),
                "alpha" => {
                    alpha = Some(value.parse::<f64>().map_err(|e| {
                        Error::Parse(format!("alpha: bad number '{value}': {e}"))
                    })?)
                }
                "tout" => t_out = Vec4::from_vec(parse_list(key, value, 4)?),
                "tin" => t_in = Vec4::from_vec(parse_list(key, value, 4)?),
                "Q" | "q" => {
                    q = if value == "identity" {
                        Matrix4::identity()
                    } else {
                        Matrix4::from_row_slice(&parse_list(key, value, 16)?)
                    }
                }
                other => return Err(Error::Parse(format!("unknown transform key '{other}'"))),
            }
        }
        let eps = eps.ok_or_else(|| Error::Parse("missing eps".into()))?;
        let alpha = alpha.ok_or_else(|| Error::Parse("missing alpha".into()))?;
        MobiusTransform::new(t_out, t_in, alpha, q, eps).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Flat,
    Spherical,
}

impl MetricKind {
    fn short(self) -> &'static str {
        match self {
            MetricKind::Flat => "flat",
            MetricKind::Spherical => "sphere",
        }
    }

    fn descriptor(self) -> ConformalMetric {
        match self {
            MetricKind::Flat => ConformalMetric::Flat,
            MetricKind::Spherical => ConformalMetric::Spherical,
        }
    }

    fn datum(self) -> EinsteinDatum {
        match self {
            MetricKind::Flat => EinsteinDatum::flat4(),
            MetricKind::Spherical => EinsteinDatum::unit_sphere4(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MetricPairing {
    pub domain: MetricKind,
    pub codomain: MetricKind,
}

impl MetricPairing {
    pub const FLAT_FLAT: Self = Self::new(MetricKind::Flat, MetricKind::Flat);
    pub const FLAT_SPHERE: Self = Self::new(MetricKind::Flat, MetricKind::Spherical);
    pub const SPHERE_FLAT: Self = Self::new(MetricKind::Spherical, MetricKind::Flat);
    pub const SPHERE_SPHERE: Self = Self::new(MetricKind::Spherical, MetricKind::Spherical);
    pub const ALL: [Self; 4] = [
        Self::FLAT_FLAT,
        Self::FLAT_SPHERE,
        Self::SPHERE_FLAT,
        Self::SPHERE_SPHERE,
    ];

    pub const fn new(domain: MetricKind, codomain: MetricKind) -> Self {
        Self { domain, codomain }
    }
}

impl fmt::Display for MetricPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.domain.short(), self.codomain.short())
    }
}

impl FromStr for MetricPairing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace("->", "-").replace('_', "-");
        let kind = |k: &str| match k {
            "flat" => Ok(MetricKind::Flat),
            "sphere" | "spherical" => Ok(MetricKind::Spherical),
            other => Err(Error::Parse(format!("unknown metric '{other}'"))),
        };
        let (d, c) = norm
            .split_once('-')
            .ok_or_else(|| Error::Parse(format!("expected <domain>-<codomain>, got '{s}'")))?;
        Ok(Self::new(kind(d)?, kind(c)?))
    }
}

fn flat_sphere_quadratic(t: &MobiusTransform) -> Quadratic {
    let a2 = t.t_out.norm_squared();
    let w = t.q.transpose() * t.t_out * t.alpha;
    let (p, c) = match t.eps {
        Epsilon::Two => (1.0 + a2, t.alpha * t.alpha),
        Epsilon::Zero => (t.alpha * t.alpha, 1.0 + a2),
    };
    Quadratic::new(p, w, c, t.t_in)
}

fn flat_flat_factor(t: &MobiusTransform) -> Arc<dyn ScalarField> {
    match t.eps {
        Epsilon::Zero => Arc::new(Constant(t.alpha)),
        Epsilon::Two => Arc::new(RadialPower::new(t.alpha, -2.0, t.t_in)),
    }
}

/// The conformal factor `λ` with `φ*h = λ² g` for the pairing's metrics.
///
/// Factors are analytic. Negative `α` is rejected: its sign belongs in `Q`.
pub fn mobius_conformal_factor(
    t: &MobiusTransform,
    pairing: MetricPairing,
) -> Result<Arc<dyn ScalarField>> {
    if !(t.alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "conformal factors need alpha > 0, got {}",
            t.alpha
        )));
    }
    let flat_to_sphere =
        || -> Arc<dyn ScalarField> { Arc::new(RationalQuadratic::new(2.0 * t.alpha, flat_sphere_quadratic(t))) };
    let half = || -> Arc<dyn ScalarField> { Arc::new(Quadratic::half_one_plus_square()) };
    Ok(match (pairing.domain, pairing.codomain) {
        (MetricKind::Flat, MetricKind::Flat) => flat_flat_factor(t),
        (MetricKind::Flat, MetricKind::Spherical) => flat_to_sphere(),
        (MetricKind::Spherical, MetricKind::Flat) => Arc::new(Product::new(half(), flat_flat_factor(t))),
        (MetricKind::Spherical, MetricKind::Spherical) => Arc::new(Product::new(half(), flat_to_sphere())),
    })
}

/// `(δ, e)` with `λ(x) = 2δ/(δ² + |x − e|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalForm {
    pub delta: f64,
    pub e: [f64; 4],
}

impl NormalForm {
    pub fn center(&self) -> Point4 {
        Point4::from_column_slice(&self.e)
    }

    pub fn field(&self) -> RationalQuadratic {
        RationalQuadratic::bubble4(self.delta, self.center())
    }
}

/// Normal form of the flat→sphere factor: for `ε = 2`,
/// `δ = α/(1+|t_out|²)`, `e = t_in − αQᵀt_out/(1+|t_out|²)`; for `ε = 0`,
/// `δ = 1/α`, `e = t_in − Qᵀt_out/α`.
pub fn mobius_normal_form(t: &MobiusTransform, pairing: MetricPairing) -> Result<NormalForm> {
    if pairing != MetricPairing::FLAT_SPHERE {
        return Err(Error::Unsupported(format!(
            "the normal form is defined for flat-sphere, got {pairing}"
        )));
    }
    let a2 = t.t_out.norm_squared();
    let qta = t.q.transpose() * t.t_out;
    let (delta, e) = match t.eps {
        Epsilon::Two => (t.alpha / (1.0 + a2), t.t_in - qta * (t.alpha / (1.0 + a2))),
        Epsilon::Zero => (1.0 / t.alpha, t.t_in - qta / t.alpha),
    };
    Ok(NormalForm {
        delta,
        e: [e[0], e[1], e[2], e[3]],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Harmonic,
    ProperBiharmonic,
    NotBiharmonic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Harmonic => "harmonic",
            Classification::ProperBiharmonic => "proper_biharmonic",
            Classification::NotBiharmonic => "not_biharmonic",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    pub reason: String,
    pub bfo_sup: f64,
    /// `sup |Δ_g λ − aλ − Aλ³|` when the pairing has a declared `A`.
    pub eq4d_sup: Option<f64>,
    pub tension_sup: f64,
    pub normal_form: Option<NormalForm>,
    pub normal_form_error: Option<f64>,
    pub n_points: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub pairing: String,
    pub eps: u8,
    pub classification: Classification,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub seed: u64,
    pub grid_points: usize,
    /// Relative tolerance for membership of the sphere→sphere isometry locus.
    pub locus_tolerance: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            grid_points: StandardGrid::DEFAULT_POINTS,
            locus_tolerance: 1e-9,
        }
    }
}

fn evidence_grid(t: &MobiusTransform, domain: MetricKind, opts: &ClassifyOptions) -> StandardGrid {
    let radius = match domain {
        MetricKind::Flat => StandardGrid::DEFAULT_RADIUS,
        MetricKind::Spherical => StandardGrid::SPHERE_CHART_RADIUS,
    };
    let singular = match t.eps {
        Epsilon::Two => vec![Singularity::Point(t.t_in)],
        Epsilon::Zero => Vec::new(),
    };
    StandardGrid::new(
        opts.grid_points,
        radius,
        StandardGrid::DEFAULT_EXCLUSION,
        &singular,
        opts.seed,
    )
}

/// Classifies `t` for `pairing` following the closed-form analysis and
/// attaches residual evidence computed on a quasi-random grid.
pub fn classify_mobius(
    t: &MobiusTransform,
    pairing: MetricPairing,
    opts: &ClassifyOptions,
) -> Result<Verdict> {
    let lambda = mobius_conformal_factor(t, pairing)?;
    let (classification, reason, big_a) = match (pairing.domain, pairing.codomain, t.eps) {
        (MetricKind::Flat, MetricKind::Flat, Epsilon::Zero) => (
            Classification::Harmonic,
            "homothety: λ = α is constant".to_string(),
            Some(0.0),
        ),
        (MetricKind::Flat, MetricKind::Flat, Epsilon::Two) => (
            Classification::ProperBiharmonic,
            "λ = α/|x − t_in|² is harmonic and nonconstant".to_string(),
            Some(0.0),
        ),
        (MetricKind::Flat, MetricKind::Spherical, _) => (
            Classification::ProperBiharmonic,
            "λ is a bubble 2δ/(δ² + |x − e|²), solving Δλ = −2λ³".to_string(),
            Some(-2.0),
        ),
        (MetricKind::Spherical, MetricKind::Flat, _) => (
            Classification::NotBiharmonic,
            "no Möbius transformation from the sphere to flat space is biharmonic".to_string(),
            None,
        ),
        (MetricKind::Spherical, MetricKind::Spherical, _) => {
            if t.on_isometry_locus(opts.locus_tolerance) {
                (
                    Classification::Harmonic,
                    "isometry: δ = 1 and e = 0, so λ ≡ 1".to_string(),
                    None,
                )
            } else {
                (
                    Classification::NotBiharmonic,
                    "only isometries of the sphere are biharmonic".to_string(),
                    None,
                )
            }
        }
    };

    let metric = pairing.domain.descriptor();
    let datum = pairing.domain.datum();
    let grid = evidence_grid(t, pairing.domain, opts);
    let (mut bfo_sup, mut tension_sup, mut eq4d_sup) = (0.0f64, 0.0f64, 0.0f64);
    let mut n_failed = 0;
    for x in &grid.points {
        let sample = (|| -> Result<(f64, f64, Option<f64>)> {
            let b = bfo_residual_on(lambda.as_ref(), &metric, &datum, x)?.norm();
            let tn = tension_norm_on(lambda.as_ref(), &metric, 4, x)?;
            let e = big_a
                .map(|aa| eq4d_residual_on(lambda.as_ref(), &metric, datum.a, aa, x))
                .transpose()?;
            Ok((b, tn, e))
        })();
        match sample {
            Ok((b, tn, e)) if b.is_finite() && tn.is_finite() => {
                bfo_sup = bfo_sup.max(b);
                tension_sup = tension_sup.max(tn);
                if let Some(e) = e {
                    eq4d_sup = eq4d_sup.max(e.abs());
                }
            }
            _ => n_failed += 1,
        }
    }

    let (normal_form, normal_form_error) = if pairing == MetricPairing::FLAT_SPHERE {
        let nf = mobius_normal_form(t, pairing)?;
        let field = nf.field();
        let err = grid
            .points
            .iter()
            .map(|x| (field.value(x) - lambda.value(x)).abs())
            .fold(0.0, f64::max);
        (Some(nf), Some(err))
    } else {
        (None, None)
    };

    Ok(Verdict {
        pairing: pairing.to_string(),
        eps: t.eps.value() as u8,
        classification,
        evidence: Evidence {
            reason,
            bfo_sup,
            eq4d_sup: big_a.map(|_| eq4d_sup),
            tension_sup,
            normal_form,
            normal_form_error,
            n_points: grid.len(),
            n_failed,
        },
    })
}

/// Verdicts for `count` random transforms of one (pairing, ε) cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellAudit {
    pub pairing: String,
    pub eps: u8,
    pub count: usize,
    /// The shared classification, or `None` when the cell is not uniform.
    pub classification: Option<Classification>,
    pub bfo_sup_min: f64,
    pub bfo_sup_max: f64,
    pub tension_sup_max: f64,
    pub normal_form_error_max: Option<f64>,
    pub verdicts: Vec<Verdict>,
}

/// Classifies `count` transforms drawn with [`MobiusTransform::random`] from
/// ChaCha8 seeded with `seed`. Draws are sequential, classification runs in
/// parallel, and results keep draw order.
pub fn audit_cell(
    pairing: MetricPairing,
    eps: Epsilon,
    count: usize,
    seed: u64,
    opts: &ClassifyOptions,
) -> Result<CellAudit> {
    use rand::SeedableRng;
    use rayon::prelude::*;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let transforms: Vec<MobiusTransform> =
        (0..count).map(|_| MobiusTransform::random(&mut rng, eps)).collect();
    let verdicts = transforms
        .par_iter()
        .map(|t| classify_mobius(t, pairing, opts))
        .collect::<Result<Vec<_>>>()?;
    let first = verdicts.first().map(|v| v.classification);
    let classification = first.filter(|c| verdicts.iter().all(|v| v.classification == *c));
    let bfo = verdicts.iter().map(|v| v.evidence.bfo_sup);
    let nf_max = verdicts
        .iter()
        .filter_map(|v| v.evidence.normal_form_error)
        .reduce(f64::max);
    Ok(CellAudit {
        pairing: pairing.to_string(),
        eps: eps.value() as u8,
        count,
        classification,
        bfo_sup_min: bfo.clone().fold(f64::INFINITY, f64::min),
        bfo_sup_max: bfo.fold(0.0, f64::max),
        tension_sup_max: verdicts.iter().map(|v| v.evidence.tension_sup).fold(0.0, f64::max),
        normal_form_error_max: nf_max,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{laplacian_flat, DerivativeMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point4> {
        (0..n)
            .map(|_| Point4::from_fn(|_, _| rng.gen_range(-2.0..2.0)))
            .collect()
    }

    #[test]
    fn apply_examples() {
        let inv = MobiusTransform::inversion();
        let y = inv.apply(&Point4::new(2.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(y, Point4::new(0.5, 0.0, 0.0, 0.0));
        assert!(inv.apply(&Point4::zeros()).is_err());
        let x = Point4::new(0.3, -1.0, 2.0, 0.1);
        assert_eq!(MobiusTransform::identity().apply(&x).unwrap(), x);
        let mut tr = MobiusTransform::identity();
        tr.t_out = Vec4::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(tr.apply(&x).unwrap(), x + tr.t_out);
    }

    #[test]
    fn validation() {
        let q = Matrix4::identity() * 1.1;
        assert!(MobiusTransform::new(Vec4::zeros(), Vec4::zeros(), 1.0, q, Epsilon::Two).is_err());
        assert!(MobiusTransform::new(Vec4::zeros(), Vec4::zeros(), 0.0, Matrix4::identity(), Epsilon::Two).is_err());
        assert!(MobiusTransform::new(Vec4::zeros(), Vec4::zeros(), -1.0, Matrix4::identity(), Epsilon::Two).is_err());
        let mut t = MobiusTransform::identity();
        t.alpha = -1.0;
        assert!(mobius_conformal_factor(&t, MetricPairing::FLAT_FLAT).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let t: MobiusTransform = "eps=2 alpha=1.5 tout=0,0,0,0 tin=1,0,0,0 Q=identity".parse().unwrap();
        assert_eq!(t.eps, Epsilon::Two);
        assert_eq!(t.alpha, 1.5);
        assert_eq!(t.t_in, Vec4::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(t.to_string(), "eps=2 alpha=1.5 tout=0,0,0,0 tin=1,0,0,0 Q=identity");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = MobiusTransform::random(&mut rng, Epsilon::Zero);
        let back: MobiusTransform = r.to_string().parse().unwrap();
        assert_eq!(back, r);
        assert!("eps=1 alpha=1".parse::<MobiusTransform>().is_err());
        assert!("eps=2".parse::<MobiusTransform>().is_err());
        assert!("eps=2 alpha=1 Q=1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,2".parse::<MobiusTransform>().is_err());
        assert!("eps=2 alpha=1 tout=1,2".parse::<MobiusTransform>().is_err());
        assert!("eps=2 alpha=1 foo=1".parse::<MobiusTransform>().is_err());
    }

    #[test]
    fn pairing_names() {
        for p in MetricPairing::ALL {
            assert_eq!(p.to_string().parse::<MetricPairing>().unwrap(), p);
        }
        assert_eq!("flat->sphere".parse::<MetricPairing>().unwrap(), MetricPairing::FLAT_SPHERE);
        assert!("flat-torus".parse::<MetricPairing>().is_err());
    }

    #[test]
    fn factor_examples() {
        let x = Point4::new(0.4, 1.0, -0.3, 0.2);
        let f = mobius_conformal_factor(&MobiusTransform::inversion(), MetricPairing::FLAT_FLAT).unwrap();
        assert!((f.value(&x) - 1.0 / x.norm_squared()).abs() < 1e-15);
        let f = mobius_conformal_factor(&MobiusTransform::identity(), MetricPairing::FLAT_SPHERE).unwrap();
        assert!((f.value(&x) - 2.0 / (1.0 + x.norm_squared())).abs() < 1e-15);
    }

    #[test]
    fn flat_flat_laplacian_carries_alpha() {
        let mut t = MobiusTransform::inversion();
        t.alpha = 1.7;
        t.t_in = Vec4::new(0.2, 0.0, -0.1, 0.0);
        let f = mobius_conformal_factor(&t, MetricPairing::FLAT_FLAT).unwrap();
        let x = Point4::new(1.0, 0.5, 0.2, -0.3);
        let lap = laplacian_flat(f.as_ref(), &x, DerivativeMode::fd()).unwrap();
        // αε(ε−2)/|x−b|^{ε+2} vanishes for ε = 2; ε = 2 with exponent −2 is harmonic.
        assert!(lap.abs() < 1e-5);
        let g = RadialPower::new(t.alpha, -1.0, t.t_in);
        let r = (x - t.t_in).norm();
        let lap_g = laplacian_flat(&g, &x, DerivativeMode::fd()).unwrap();
        assert!((lap_g + t.alpha / r.powi(3)).abs() < 1e-5);
    }

    #[test]
    fn factors_match_chain_rule() {
        // λ(x) = ν(φ(x)) · μ_flat(x) / μ_domain(x), with ν the codomain metric factor.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for eps in Epsilon::ALL {
            for _ in 0..10 {
                let t = MobiusTransform::random(&mut rng, eps);
                let ff = mobius_conformal_factor(&t, MetricPairing::FLAT_FLAT).unwrap();
                for x in sample_points(&mut rng, 10) {
                    let z = t.apply(&x).unwrap();
                    let nu = 2.0 / (1.0 + z.norm_squared());
                    let mu = 2.0 / (1.0 + x.norm_squared());
                    let base = ff.value(&x);
                    let cases = [
                        (MetricPairing::FLAT_SPHERE, nu * base),
                        (MetricPairing::SPHERE_FLAT, base / mu),
                        (MetricPairing::SPHERE_SPHERE, nu * base / mu),
                    ];
                    for (p, expected) in cases {
                        let got = mobius_conformal_factor(&t, p).unwrap().value(&x);
                        assert!((got - expected).abs() < 1e-10 * expected.max(1.0), "{p}");
                    }
                }
            }
        }
    }

    #[test]
    fn normal_form_examples() {
        let p = MetricPairing::FLAT_SPHERE;
        let nf = mobius_normal_form(&MobiusTransform::inversion(), p).unwrap();
        assert_eq!((nf.delta, nf.e), (1.0, [0.0; 4]));
        let mut t = MobiusTransform::identity();
        t.alpha = 2.0;
        let nf = mobius_normal_form(&t, p).unwrap();
        assert_eq!((nf.delta, nf.e), (0.5, [0.0; 4]));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_orthogonal(&mut rng);
        let a = Vec4::new(0.6, 0.0, 0.8, 0.0);
        let t = MobiusTransform::new(a, Vec4::zeros(), 2.0, q, Epsilon::Two).unwrap();
        let nf = mobius_normal_form(&t, p).unwrap();
        assert!((nf.delta - 1.0).abs() < 1e-15);
        assert!((nf.center() + q.transpose() * a).norm() < 1e-15);
        let f = mobius_conformal_factor(&t, p).unwrap();
        for x in sample_points(&mut rng, 10) {
            assert!((nf.field().value(&x) - f.value(&x)).abs() < 1e-12);
        }
        assert!(mobius_normal_form(&t, MetricPairing::FLAT_FLAT).is_err());
    }

    #[test]
    fn audit_cells_are_uniform_and_reproducible() {
        let o = ClassifyOptions { grid_points: 40, ..Default::default() };
        let c = audit_cell(MetricPairing::SPHERE_FLAT, Epsilon::Two, 5, 11, &o).unwrap();
        assert_eq!(c.classification, Some(Classification::NotBiharmonic));
        assert!(c.bfo_sup_min > 1e-2);
        let again = audit_cell(MetricPairing::SPHERE_FLAT, Epsilon::Two, 5, 11, &o).unwrap();
        assert_eq!(c.bfo_sup_max.to_bits(), again.bfo_sup_max.to_bits());
        let fs = audit_cell(MetricPairing::FLAT_SPHERE, Epsilon::Zero, 5, 3, &o).unwrap();
        assert!(fs.normal_form_error_max.unwrap() < 1e-10);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for e2 in Epsilon::ALL {
            for e1 in Epsilon::ALL {
                for _ in 0..20 {
                    let t1 = MobiusTransform::random(&mut rng, e1);
                    let t2 = MobiusTransform::random(&mut rng, e2);
                    let c = t2.compose(&t1);
                    assert!(orthogonality_defect(&c.q) < 1e-12);
                    for x in sample_points(&mut rng, 5) {
                        let (Ok(z), Ok(w)) = (t1.apply(&x), c.apply(&x)) else { continue };
                        let Ok(zz) = t2.apply(&z) else { continue };
                        assert!((zz - w).norm() < 1e-8 * (1.0 + zz.norm()), "{e2}∘{e1}");
                    }
                }
            }
        }
    }

    #[test]
    fn isometry_locus_has_unit_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for eps in Epsilon::ALL {
            let t = MobiusTransform::random_isometry(&mut rng, eps);
            assert!(t.on_isometry_locus(1e-12));
            let f = mobius_conformal_factor(&t, MetricPairing::SPHERE_SPHERE).unwrap();
            for x in sample_points(&mut rng, 20) {
                assert!((f.value(&x) - 1.0).abs() < 1e-12);
            }
            let mut off = t.clone();
            off.alpha *= 1.01;
            assert!(!off.on_isometry_locus(1e-9));
        }
    }

    #[test]
    fn classification_examples() {
        let o = ClassifyOptions::default();
        let v = classify_mobius(&MobiusTransform::inversion(), MetricPairing::FLAT_FLAT, &o).unwrap();
        assert_eq!(v.classification, Classification::ProperBiharmonic);
        assert!(v.evidence.bfo_sup < 1e-5 && v.evidence.tension_sup > 0.0);
        let v = classify_mobius(&MobiusTransform::identity(), MetricPairing::FLAT_FLAT, &o).unwrap();
        assert_eq!(v.classification, Classification::Harmonic);
        assert_eq!(v.evidence.tension_sup, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut t = MobiusTransform::identity();
        t.q = random_orthogonal(&mut rng);
        let v = classify_mobius(&t, MetricPairing::SPHERE_SPHERE, &o).unwrap();
        assert_eq!(v.classification, Classification::Harmonic);
        assert!(v.evidence.bfo_sup < 1e-8);
        let v = classify_mobius(&t, MetricPairing::SPHERE_FLAT, &o).unwrap();
        assert_eq!(v.classification, Classification::NotBiharmonic);
        assert!(v.evidence.bfo_sup > 1e-2);
    }
}
