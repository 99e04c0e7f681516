//! Deterministic generators for the test instances.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};

/// `n` equispaced points on a circle of circumference `2π`, arc metric.
pub fn circle(n: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::InvalidParameter("circle needs at least one point".into()));
    }
    let step = 2.0 * PI / n as f64;
    FiniteMetricSpace::with_indices(n, |i, j| {
        let k = i.abs_diff(j);
        k.min(n - k) as f64 * step
    })
}

/// `n` equispaced points of `[0, 1]`.
pub fn interval(n: usize) -> Result<FiniteMetricSpace> {
    match n {
        0 => Err(Error::InvalidParameter("interval needs at least one point".into())),
        1 => single_point(),
        _ => {
            let step = 1.0 / (n - 1) as f64;
            FiniteMetricSpace::with_indices(n, |i, j| i.abs_diff(j) as f64 * step)
        }
    }
}

/// Left endpoints of the `2^depth` intervals of the middle-thirds Cantor
/// construction at the given depth, Euclidean metric.
pub fn cantor(depth: u32) -> Result<FiniteMetricSpace> {
    if depth > 12 {
        return Err(Error::InvalidParameter(format!("cantor depth {depth} exceeds 12")));
    }
    let count = 1usize << depth;
    let xs: Vec<f64> = (0..count)
        .map(|code| {
            (0..depth)
                .map(|k| {
                    let bit = (code >> (depth - 1 - k)) & 1;
                    2.0 * bit as f64 * libm::pow(3.0, -((k + 1) as f64))
                })
                .sum()
        })
        .collect();
    FiniteMetricSpace::with_indices(count, |i, j| libm::fabs(xs[i] - xs[j]))
}

/// Leaves of the complete `branching`-ary tree of height `depth`, with
/// distance `2·(depth − |common prefix|)` scaled by `1/(2·depth)`.
pub fn tree_boundary(branching: usize, depth: u32) -> Result<FiniteMetricSpace> {
    if branching < 2 || depth == 0 {
        return Err(Error::InvalidParameter(
            "tree boundary needs branching ≥ 2 and depth ≥ 1".into(),
        ));
    }
    let count = branching
        .checked_pow(depth)
        .filter(|&c| c <= 4096)
        .ok_or_else(|| Error::InvalidParameter("tree boundary has more than 4096 leaves".into()))?;
    let digits = |mut x: usize| {
        let mut out = alloc::vec![0usize; depth as usize];
        for slot in out.iter_mut().rev() {
            *slot = x % branching;
            x /= branching;
        }
        out
    };
    let words: Vec<Vec<usize>> = (0..count).map(digits).collect();
    let ids = words
        .iter()
        .map(|w| w.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("."))
        .collect();
    FiniteMetricSpace::from_fn(ids, |i, j| {
        let common = words[i].iter().zip(&words[j]).take_while(|(a, b)| a == b).count();
        (depth as usize - common) as f64 / depth as f64
    })
}

/// Points of the unit circle at the given angles with the chordal metric
/// `2·sin(Δθ/2)`. Angles are sorted so ids follow the cyclic order.
pub fn chordal_circle(angles: &[f64]) -> Result<FiniteMetricSpace> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter("chordal circle needs at least one point".into()));
    }
    let mut sorted: Vec<f64> = angles
        .iter()
        .map(|&a| {
            let w = a % (2.0 * PI);
            if w < 0.0 {
                w + 2.0 * PI
            } else {
                w
            }
        })
        .collect();
    sorted.sort_by(f64::total_cmp);
    FiniteMetricSpace::with_indices(sorted.len(), |i, j| {
        if i == j {
            0.0
        } else {
            2.0 * libm::fabs(libm::sin((sorted[i] - sorted[j]) / 2.0))
        }
    })
}

/// `n` equispaced points on the boundary of the hyperbolic plane with the
/// chordal metric, which is visual for the base point at the disk center.
pub fn visual_metric_circle(n: usize) -> Result<FiniteMetricSpace> {
    if n < 2 {
        return Err(Error::InvalidParameter("visual circle needs at least two points".into()));
    }
    let angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    chordal_circle(&angles)
}

pub fn single_point() -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::with_indices(1, |_, _| 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_of_four() {
        let c = circle(4).unwrap();
        assert_eq!(c.d(0, 1), PI / 2.0);
        assert_eq!(c.d(0, 2), PI);
        assert_eq!(c.d(0, 3), PI / 2.0);
        assert_eq!(c.diam(), PI);
    }

    #[test]
    fn interval_of_two() {
        let s = interval(2).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.d(0, 1), 1.0);
        assert_eq!(interval(1).unwrap().len(), 1);
    }

    #[test]
    fn cantor_is_validated() {
        let c = cantor(3).unwrap();
        assert_eq!(c.len(), 8);
        // Leftmost and rightmost left endpoints: 0 and 2/3 + 2/9 + 2/27.
        assert!((c.diam() - 26.0 / 27.0).abs() < 1e-15);
        // Sibling cylinders at depth 3 are 2/27 apart.
        assert!((c.d(0, 1) - 2.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn tree_boundary_distances() {
        let t = tree_boundary(2, 3).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t.id(5), "1.0.1");
        assert_eq!(t.d(0, 1), 1.0 / 3.0);
        assert_eq!(t.d(0, 7), 1.0);
        assert!(tree_boundary(1, 3).is_err());
    }

    #[test]
    fn visual_circle_chords() {
        let v = visual_metric_circle(2).unwrap();
        assert!((v.d(0, 1) - 2.0).abs() < 1e-15);
        let v = visual_metric_circle(4).unwrap();
        assert!((v.d(0, 1) - 2f64.sqrt()).abs() < 1e-15);
        assert!((v.d(0, 2) - 2.0).abs() < 1e-15);
    }
}
