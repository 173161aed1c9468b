use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Point4, Singularity};

const HALTON_BASES: [u32; 4] = [2, 3, 5, 7];

/// Radical inverse of `index` in `base`.
pub fn halton(index: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut i = index;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Quasi-random verification points in a ball, away from singularities.
///
/// Points come from the 4-D Halton sequence (bases 2, 3, 5, 7) mapped onto
/// the cube `[−R, R]⁴` and filtered to the ball. Seed 0 is the plain
/// sequence; any other seed applies a Cranley–Patterson rotation drawn from
/// ChaCha8 seeded with that value.
#[derive(Debug, Clone, Serialize)]
pub struct StandardGrid {
    pub radius: f64,
    pub exclusion: f64,
    pub seed: u64,
    pub sequence: &'static str,
    #[serde(skip)]
    pub points: Vec<Point4>,
}

impl StandardGrid {
    pub const DEFAULT_POINTS: usize = 200;
    pub const DEFAULT_RADIUS: f64 = 5.0;
    pub const DEFAULT_EXCLUSION: f64 = 0.05;
    /// Sphere-domain grids stay inside this radius of the stereographic chart.
    pub const SPHERE_CHART_RADIUS: f64 = 3.0;

    pub fn new(
        count: usize,
        radius: f64,
        exclusion: f64,
        singular: &[Singularity],
        seed: u64,
    ) -> Self {
        let shift: [f64; 4] = if seed == 0 {
            [0.0; 4]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            [rng.gen(), rng.gen(), rng.gen(), rng.gen()]
        };
        let mut points = Vec::with_capacity(count);
        let mut index: u64 = 1;
        while points.len() < count {
            let mut x = Point4::zeros();
            for k in 0..4 {
                let u = (halton(index, HALTON_BASES[k]) + shift[k]).fract();
                x[k] = radius * (2.0 * u - 1.0);
            }
            index += 1;
            if x.norm() > radius {
                continue;
            }
            if singular.iter().any(|s| s.distance(&x) < exclusion) {
                continue;
            }
            points.push(x);
        }
        Self {
            radius,
            exclusion,
            seed,
            sequence: "halton-2-3-5-7",
            points,
        }
    }

    /// 200 points in `|x| ≤ 5` with a 0.05 exclusion around singularities.
    pub fn standard(singular: &[Singularity], seed: u64) -> Self {
        Self::new(
            Self::DEFAULT_POINTS,
            Self::DEFAULT_RADIUS,
            Self::DEFAULT_EXCLUSION,
            singular,
            seed,
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
