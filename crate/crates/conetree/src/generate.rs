//! Named space generators.

use std::f64::consts::PI;

use conetree_core::charseq::Strategy;
use conetree_core::metric::FiniteMetricSpace;
use conetree_core::spaces;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AtStage, Error, Result, Stage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// `n` equispaced points, arc metric, circumference 2π.
    Circle { n: usize },
    /// `n` equispaced points of `[0, 1]`.
    Interval { n: usize },
    /// `2^depth` middle-thirds Cantor points.
    Cantor { depth: u32 },
    /// `branching^depth` leaves of a regular tree.
    TreeBoundary { branching: usize, depth: u32 },
    /// `n` uniform random angles, chordal metric.
    RandomCircle { n: usize },
    /// `n` equispaced boundary points of the hyperbolic plane, chordal metric.
    VisualCircle { n: usize },
    SinglePoint,
}

pub const GENERATOR_NAMES: [&str; 7] = [
    "circle",
    "interval",
    "cantor",
    "tree_boundary",
    "random_circle",
    "visual_circle",
    "single_point",
];

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Circle { .. } => "circle",
            Generator::Interval { .. } => "interval",
            Generator::Cantor { .. } => "cantor",
            Generator::TreeBoundary { .. } => "tree_boundary",
            Generator::RandomCircle { .. } => "random_circle",
            Generator::VisualCircle { .. } => "visual_circle",
            Generator::SinglePoint => "single_point",
        }
    }

    /// Builds a generator from a name and the loose parameters accepted on
    /// the command line.
    pub fn from_parts(name: &str, n: Option<usize>, depth: Option<u32>, branching: Option<usize>) -> Result<Self> {
        let need_n = || n.ok_or_else(|| Error::Config(format!("generator {name} needs n")));
        let need_depth = || depth.ok_or_else(|| Error::Config(format!("generator {name} needs a depth")));
        Ok(match name {
            "circle" => Generator::Circle { n: need_n()? },
            "interval" => Generator::Interval { n: need_n()? },
            "cantor" => Generator::Cantor { depth: need_depth()? },
            "tree_boundary" => Generator::TreeBoundary {
                branching: branching.ok_or_else(|| Error::Config("tree_boundary needs a branching".into()))?,
                depth: need_depth()?,
            },
            "random_circle" => Generator::RandomCircle { n: need_n()? },
            "visual_circle" => Generator::VisualCircle { n: need_n()? },
            "single_point" => Generator::SinglePoint,
            other => {
                return Err(Error::Config(format!(
                    "unknown generator {other}; expected one of {}",
                    GENERATOR_NAMES.join(", ")
                )))
            }
        })
    }

    /// The covering strategy suited to this space.
    pub fn default_strategy(&self) -> Strategy {
        match self {
            // Chordal circles list their points in cyclic order.
            Generator::Circle { .. } | Generator::VisualCircle { .. } | Generator::RandomCircle { .. } => {
                Strategy::CircleArcs
            }
            Generator::Interval { .. } => Strategy::IntervalBlocks,
            Generator::Cantor { .. } => Strategy::CantorClopen,
            Generator::TreeBoundary { .. } => Strategy::TreeBoundaryCylinders,
            Generator::SinglePoint => Strategy::GenericGreedy,
        }
    }

    /// Whether the output depends on the seed.
    pub fn is_random(&self) -> bool {
        matches!(self, Generator::RandomCircle { .. })
    }

    pub fn generate(&self, seed: u64) -> Result<FiniteMetricSpace> {
        match *self {
            Generator::Circle { n } => spaces::circle(n),
            Generator::Interval { n } => spaces::interval(n),
            Generator::Cantor { depth } => spaces::cantor(depth),
            Generator::TreeBoundary { branching, depth } => spaces::tree_boundary(branching, depth),
            Generator::RandomCircle { n } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
                spaces::chordal_circle(&angles)
            }
            Generator::VisualCircle { n } => spaces::visual_metric_circle(n),
            Generator::SinglePoint => spaces::single_point(),
        }
        .at(Stage::Generate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let c4 = Generator::Circle { n: 4 }.generate(0).unwrap();
        assert!((c4.d(0, 1) - PI / 2.0).abs() < 1e-15);
        assert!((c4.d(0, 2) - PI).abs() < 1e-15);
        let i2 = Generator::Interval { n: 2 }.generate(0).unwrap();
        assert_eq!(i2.d(0, 1), 1.0);
        assert_eq!(Generator::Cantor { depth: 3 }.generate(0).unwrap().len(), 8);
        let v2 = Generator::VisualCircle { n: 2 }.generate(0).unwrap();
        assert!((v2.d(0, 1) - 2.0).abs() < 1e-15);
        let v4 = Generator::VisualCircle { n: 4 }.generate(0).unwrap();
        assert!((v4.d(0, 1) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn random_circle_follows_the_seed() {
        let g = Generator::RandomCircle { n: 50 };
        assert_eq!(g.generate(3).unwrap(), g.generate(3).unwrap());
        assert_ne!(g.generate(3).unwrap(), g.generate(4).unwrap());
    }

    #[test]
    fn parts_and_names() {
        for name in GENERATOR_NAMES {
            let g = Generator::from_parts(name, Some(8), Some(2), Some(2)).unwrap();
            assert_eq!(g.name(), name);
        }
        assert!(Generator::from_parts("circle", None, None, None).is_err());
        assert!(Generator::from_parts("sphere", Some(3), None, None).is_err());
        assert!(Generator::Circle { n: 0 }.generate(0).is_err());
    }
}
