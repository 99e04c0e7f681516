//! Gromov products, δ-hyperbolicity and quasi-isometry fitting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::cone::cone_distance;
use crate::metric::FiniteMetricSpace;
use crate::tree::{bfs_on, RootedTree};
use crate::{Error, Result};

/// `(x|y)_o = (|xo| + |yo| - |xy|) / 2`.
pub fn gromov_product(space: &FiniteMetricSpace, o: usize, x: usize, y: usize) -> f64 {
    (space.d(x, o) + space.d(y, o) - space.d(x, y)) / 2.0
}

/// Smallest `δ ≥ 0` with `(x|z)_o ≥ min((x|y)_o, (y|z)_o) - δ` for all
/// triples, base point fixed. `O(n³)`.
pub fn delta_hyperbolicity(space: &FiniteMetricSpace, o: usize) -> f64 {
    let n = space.len();
    let g: Vec<f64> = (0..n * n).map(|k| gromov_product(space, o, k / n, k % n)).collect();
    let mut delta = 0.0f64;
    for x in 0..n {
        let gx = &g[x * n..(x + 1) * n];
        for z in 0..n {
            let gz = &g[z * n..(z + 1) * n];
            let best = gx.iter().zip(gz).map(|(a, b)| a.min(*b)).fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max(best - gx[z]);
        }
    }
    delta
}

/// `2δ` of a tree's path metric with base point the root, in exact integer
/// arithmetic. Distances come from breadth-first search, not from the
/// parent links' ancestor structure.
pub fn tree_twice_delta(tree: &RootedTree) -> Result<u32> {
    let n = tree.len();
    let adj = tree.adjacency();
    let mut dist = vec![0i16; n * n];
    for s in 0..n {
        let row = bfs_on(&adj, s);
        for (t, &d) in row.iter().enumerate() {
            if d == usize::MAX {
                return Err(Error::Tree(format!("vertex {t} unreachable from {s}")));
            }
            dist[s * n + t] = i16::try_from(d).map_err(|_| Error::Tree("tree too deep".into()))?;
        }
    }
    let o = tree.root();
    // Doubled Gromov products.
    let g: Vec<i16> = (0..n * n)
        .map(|k| {
            let (x, y) = (k / n, k % n);
            dist[x * n + o] + dist[y * n + o] - dist[x * n + y]
        })
        .collect();
    let mut twice = 0i16;
    for x in 0..n {
        let gx = &g[x * n..(x + 1) * n];
        for z in 0..n {
            let gz = &g[z * n..(z + 1) * n];
            let best = gx.iter().zip(gz).map(|(a, b)| *a.min(b)).max().unwrap_or(0);
            twice = twice.max(best - gx[z]);
        }
    }
    Ok(twice as u32)
}

/// The Λ values searched by [`fit_qi`]: `1, 1.05, …, 50`.
pub fn lambda_grid() -> impl Iterator<Item = f64> {
    (0..=980u32).map(|k| f64::from(20 + k) / 20.0)
}

/// A pair attaining one side of the fitted bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitWitness {
    pub index: usize,
    pub source: f64,
    pub target: f64,
}

/// `(Λ, σ)` with `source/Λ - σ ≤ target ≤ Λ source + σ` on every pair.
#[derive(Clone, Debug, PartialEq)]
pub struct QiFit {
    pub lambda: f64,
    pub sigma: f64,
    pub pairs: usize,
    /// Pair attaining `max(target - Λ source)`.
    pub upper_witness: Option<FitWitness>,
    /// Pair attaining `max(source/Λ - target)`.
    pub lower_witness: Option<FitWitness>,
    /// Violations found when re-checking every pair; zero by construction.
    pub upper_violations: usize,
    pub lower_violations: usize,
}

impl QiFit {
    pub fn verified(&self) -> bool {
        self.upper_violations == 0 && self.lower_violations == 0
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Vertices of the convex hull (monotone chain). Linear functionals attain
/// their maximum over the points on these.
fn hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for pass in 0..2 {
        let start = out.len();
        let iter: alloc::boxed::Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            alloc::boxed::Box::new(pts.iter())
        } else {
            alloc::boxed::Box::new(pts.iter().rev())
        };
        for &p in iter {
            while out.len() >= start + 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= 0.0 {
                out.pop();
            }
            out.push(p);
        }
        out.pop();
    }
    out
}

fn sigma_over(points: &[(f64, f64)], lambda: f64) -> f64 {
    points
        .iter()
        .map(|&(s, t)| (t - lambda * s).max(s / lambda - t))
        .fold(0.0, f64::max)
}

/// Fits `(Λ, σ)` over [`lambda_grid`], minimizing σ with ties to the
/// smaller Λ, then recomputes σ over every pair and re-checks both
/// inequalities.
pub fn fit_qi(pairs: &[(f64, f64)]) -> Result<QiFit> {
    if pairs.is_empty() {
        return Err(Error::Fit("no pairs to fit".into()));
    }
    if let Some((i, p)) = pairs
        .iter()
        .enumerate()
        .find(|(_, p)| !(p.0 >= 0.0 && p.1 >= 0.0 && p.0.is_finite() && p.1.is_finite()))
    {
        return Err(Error::Fit(format!("pair {i} = {p:?} is not a pair of distances")));
    }
    let vertices = hull(pairs.to_vec());
    let mut best = (f64::INFINITY, 1.0);
    for lambda in lambda_grid() {
        let sigma = sigma_over(&vertices, lambda);
        if sigma < best.0 {
            best = (sigma, lambda);
        }
    }
    let lambda = best.1;
    let mut sigma = 0.0f64;
    let mut upper: Option<(f64, usize)> = None;
    let mut lower: Option<(f64, usize)> = None;
    for (i, &(s, t)) in pairs.iter().enumerate() {
        let up = t - lambda * s;
        let down = s / lambda - t;
        if upper.is_none_or(|(v, _)| up > v) {
            upper = Some((up, i));
        }
        if lower.is_none_or(|(v, _)| down > v) {
            lower = Some((down, i));
        }
        sigma = sigma.max(up).max(down);
    }
    let witness = |w: Option<(f64, usize)>| {
        w.map(|(_, index)| FitWitness {
            index,
            source: pairs[index].0,
            target: pairs[index].1,
        })
    };
    // Checked as excesses over the bound, the form σ was computed in.
    let upper_violations = pairs.iter().filter(|&&(s, t)| t - lambda * s > sigma).count();
    let lower_violations = pairs.iter().filter(|&&(s, t)| s / lambda - t > sigma).count();
    Ok(QiFit {
        lambda,
        sigma,
        pairs: pairs.len(),
        upper_witness: witness(upper),
        lower_witness: witness(lower),
        upper_violations,
        lower_violations,
    })
}

/// Bounds of `d(ξ, ξ') / e^{-(x|x')_o}` over all pairs of `n` equispaced
/// boundary directions of the hyperbolic plane, `x`, `x'` the points at
/// distance `radius` from `o` along the rays towards `ξ`, `ξ'`, and `d` the
/// chordal metric.
pub fn visual_comparison(n: usize, radius: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two directions".into()));
    }
    let mut bounds = (f64::INFINITY, 0.0f64);
    for k in 1..n {
        let angle = 2.0 * PI * k as f64 / n as f64;
        let angle = angle.min(2.0 * PI - angle);
        let chord = 2.0 * libm::sin(angle / 2.0);
        let product = (2.0 * radius - cone_distance(radius, radius, angle)) / 2.0;
        let ratio = chord / libm::exp(-product);
        bounds = (bounds.0.min(ratio), bounds.1.max(ratio));
    }
    Ok(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(rows: &[&[f64]]) -> FiniteMetricSpace {
        FiniteMetricSpace::with_indices(rows.len(), |i, j| rows[i][j]).unwrap()
    }

    #[test]
    fn gromov_examples() {
        // Tripod: center 0, legs 3 and 4.
        let tripod = space(&[&[0.0, 3.0, 4.0], &[3.0, 0.0, 7.0], &[4.0, 7.0, 0.0]]);
        assert_eq!(gromov_product(&tripod, 0, 1, 2), 0.0);
        assert_eq!(gromov_product(&tripod, 0, 1, 1), 3.0);
        // o-x-x' on a line with |ox| = 3, |xx'| = 2.
        let line = space(&[&[0.0, 3.0, 5.0], &[3.0, 0.0, 2.0], &[5.0, 2.0, 0.0]]);
        assert_eq!(gromov_product(&line, 0, 1, 2), 3.0);
    }

    #[test]
    fn four_cycle_matches_brute_force() {
        let c4 = FiniteMetricSpace::with_indices(4, |i, j| {
            let k = i.abs_diff(j);
            k.min(4 - k) as f64
        })
        .unwrap();
        for o in 0..4 {
            let mut brute = 0.0f64;
            for x in 0..4 {
                for y in 0..4 {
                    for z in 0..4 {
                        let gp = |a, b| gromov_product(&c4, o, a, b);
                        brute = brute.max(gp(x, y).min(gp(y, z)) - gp(x, z));
                    }
                }
            }
            assert_eq!(delta_hyperbolicity(&c4, o), brute);
            assert_eq!(brute, 1.0);
        }
    }

    #[test]
    fn fit_identity_and_scaling() {
        let id: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, k as f64)).collect();
        let f = fit_qi(&id).unwrap();
        assert_eq!((f.lambda, f.sigma), (1.0, 0.0));
        let twice: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, 2.0 * k as f64)).collect();
        let f = fit_qi(&twice).unwrap();
        assert_eq!((f.lambda, f.sigma), (2.0, 0.0));
        assert!(f.verified());
        assert!(fit_qi(&[]).is_err());
        assert!(fit_qi(&[(1.0, f64::NAN)]).is_err());
    }

    #[test]
    fn hull_fit_matches_full_scan() {
        let pairs: Vec<(f64, f64)> = (0..400)
            .map(|k| {
                let s = (k as f64 * 0.37).sin().abs() * 10.0;
                (s, 3.0 * s + (k as f64 * 1.3).cos() * 2.0 + 2.0)
            })
            .collect();
        let f = fit_qi(&pairs).unwrap();
        let scan = lambda_grid()
            .map(|l| (sigma_over(&pairs, l), l))
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
        assert_eq!(f.lambda, scan.1);
        assert!((f.sigma - scan.0).abs() < 1e-12);
        assert!(f.verified());
    }

    #[test]
    fn chordal_metric_is_visual() {
        let (lo, hi) = visual_comparison(64, 20.0).unwrap();
        // e^{-(x|x')} ≈ sin(Δθ/2), so the ratio sits near 2.
        assert!(lo > 1.9 && hi < 2.1, "{lo} {hi}");
    }
}
