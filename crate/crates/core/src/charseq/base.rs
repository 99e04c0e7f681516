use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{covering_at_scale, level_scale, BaseSequence, Provenance, Strategy, MAX_DELTA};
use crate::covering::{ColoredCovering, Family};
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};

/// Covering variants tried per level before giving up.
const VARIANTS: usize = 12;

/// Achieved constants of a base sequence, each the worst level's ratio to
/// `r^j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseConstants {
    pub delta_lebesgue: f64,
    pub delta_disjoint: f64,
    pub delta_ball: f64,
    pub lambda: f64,
}

impl BaseConstants {
    /// The largest δ that all three δ-quantities support.
    pub fn delta(&self) -> f64 {
        self.delta_lebesgue.min(self.delta_disjoint).min(self.delta_ball)
    }
}

/// Makes every color class a `net_bound`-net by adding copies of members of
/// other colors that are `separation`-disjoint from the class.
///
/// Candidates are taken in (color, index) order and added only when they
/// reduce the net radius; the mesh is unchanged and the Lebesgue number
/// cannot decrease.
pub fn pad_nets(
    space: &FiniteMetricSpace,
    covering: &ColoredCovering,
    separation: f64,
    net_bound: f64,
) -> ColoredCovering {
    let mut classes = covering.classes.clone();
    let candidates: Vec<(usize, Vec<f64>, &crate::PointSet)> = covering
        .members()
        .map(|(c, _, m)| (c, space.distance_field(m), m))
        .collect();
    for (color, class) in classes.iter_mut().enumerate() {
        let mut union = class.union(space.len());
        let mut radius = space.net_radius(&union);
        if radius <= net_bound {
            continue;
        }
        let mut fields: Vec<Vec<f64>> = class.iter().map(|m| space.distance_field(m)).collect();
        for (c, field, member) in &candidates {
            if radius <= net_bound {
                break;
            }
            if *c == color || member.is_subset(&union) {
                continue;
            }
            let disjoint = fields
                .iter()
                .all(|f| f.iter().zip(field).all(|(a, b)| a.max(*b) >= separation));
            if !disjoint {
                continue;
            }
            let grown = union.union(member);
            let grown_radius = space.net_radius(&grown);
            if grown_radius < radius {
                class.members.push((*member).clone());
                fields.push(field.clone());
                union = grown;
                radius = grown_radius;
            }
        }
    }
    ColoredCovering::new(classes, covering.scale)
}

struct LevelMeasure {
    lebesgue: f64,
    disjoint: f64,
    ball: f64,
    lambda: f64,
}

fn measure(space: &FiniteMetricSpace, level: usize, cov: &ColoredCovering, scale: f64) -> Result<LevelMeasure> {
    let fail = |quantity: String| Error::BaseLevel { level, quantity };
    let mesh = cov.mesh(space).map_err(|_| fail("mesh: empty covering".into()))?;
    if mesh > scale {
        return Err(fail(format!("mesh {mesh} exceeds r^j = {scale}")));
    }
    if !cov.is_covering(space) {
        return Err(fail("coverage".into()));
    }
    let (lebesgue, _) = cov.scale_lebesgue(space)?;
    if !(lebesgue > 0.0) {
        return Err(fail("Lebesgue number is zero".into()));
    }
    let mut disjoint = f64::INFINITY;
    let mut ball = f64::INFINITY;
    let mut net = 0.0f64;
    for (color, class) in cov.classes.iter().enumerate() {
        let d = class.disjointness_radius(space);
        if !(d > 0.0) {
            return Err(fail(format!("color {color} is not disjoint")));
        }
        disjoint = disjoint.min(d);
        ball = ball.min(class.inner_ball_radius(space));
        let radius = space.net_radius(&class.union(space.len()));
        if !radius.is_finite() {
            return Err(fail(format!("color {color} is empty, not a net")));
        }
        net = net.max(radius);
    }
    Ok(LevelMeasure {
        lebesgue: lebesgue / scale,
        disjoint: disjoint / scale,
        ball: ball / scale,
        lambda: net / scale,
    })
}

/// Builds coverings `Û_1, …, Û_J` with `mesh Û_j ≤ r^j`, positive Lebesgue
/// number, disjoint color classes and inner balls, pads the classes into
/// nets, and measures the constants.
///
/// With `requested_delta = None` the sequence's δ is the achieved one, capped
/// at [`MAX_DELTA`]; a request above what was achieved is an error.
pub fn build_base(
    space: &FiniteMetricSpace,
    r: f64,
    colors: usize,
    depth: usize,
    strategy: Strategy,
    requested_delta: Option<f64>,
) -> Result<BaseSequence> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!("r = {r} is not in (0, 1)")));
    }
    if colors == 0 || depth == 0 {
        return Err(Error::InvalidParameter("need at least one color and one level".into()));
    }
    let mut levels = Vec::with_capacity(depth);
    let mut achieved = BaseConstants {
        delta_lebesgue: f64::INFINITY,
        delta_disjoint: f64::INFINITY,
        delta_ball: f64::INFINITY,
        lambda: 0.0,
    };
    let mut notes = Vec::new();
    let mut colors_used = colors;
    for level in 1..=depth {
        let scale = level_scale(r, level);
        let hint = requested_delta.unwrap_or(0.1);
        let mut last_err = None;
        let mut chosen = None;
        for variant in 0..VARIANTS {
            let Some(raw) = covering_at_scale(space, strategy, scale, colors, variant, hint) else {
                continue;
            };
            // Pad against the separation the raw covering already has.
            let separation = raw
                .classes
                .iter()
                .map(|f| f.disjointness_radius(space))
                .fold(f64::INFINITY, f64::min)
                .min(scale);
            let padded = pad_nets(space, &raw, separation, scale);
            match measure(space, level, &padded, scale) {
                Ok(m) => {
                    if variant > 0 {
                        notes.push(format!("level {level}: variant {variant}"));
                    }
                    chosen = Some((padded, m));
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        let (cov, m) = chosen.ok_or_else(|| {
            last_err.unwrap_or(Error::BaseLevel {
                level,
                quantity: format!("{strategy} produced no covering at mesh {scale}"),
            })
        })?;
        if cov.colors() > colors {
            notes.push(format!("level {level}: {} colors needed", cov.colors()));
            colors_used = colors_used.max(cov.colors());
        }
        achieved.delta_lebesgue = achieved.delta_lebesgue.min(m.lebesgue);
        achieved.delta_disjoint = achieved.delta_disjoint.min(m.disjoint);
        achieved.delta_ball = achieved.delta_ball.min(m.ball);
        achieved.lambda = achieved.lambda.max(m.lambda);
        levels.push(cov);
    }
    // Later levels may need more colors than earlier ones; give every level
    // the same color set, the extra classes padded from the other colors.
    if colors_used > colors {
        for (j, cov) in levels.iter_mut().enumerate() {
            if cov.colors() < colors_used {
                let scale = level_scale(r, j + 1);
                let mut classes = cov.classes.clone();
                classes.resize(colors_used, Family::default());
                let sep = achieved.delta_disjoint * scale;
                *cov = pad_nets(space, &ColoredCovering::new(classes, cov.scale), sep, scale);
                let m = measure(space, j + 1, cov, scale)?;
                achieved.lambda = achieved.lambda.max(m.lambda);
            }
        }
    }
    let delta_achieved = achieved.delta();
    let delta = match requested_delta {
        Some(d) if !(d > 0.0 && d <= delta_achieved) => {
            return Err(Error::Precondition(format!(
                "requested δ = {d} but the coverings only support δ = {delta_achieved}"
            )))
        }
        Some(d) => d,
        None => delta_achieved.min(MAX_DELTA),
    };
    Ok(BaseSequence {
        r,
        levels,
        delta,
        lambda: achieved.lambda.max(1.0),
        achieved,
        provenance: Provenance {
            strategy: strategy.name().to_string(),
            requested_colors: colors,
            colors_used,
            requested_delta,
            notes,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces;

    #[test]
    fn single_point_is_degenerate() {
        let sp = spaces::single_point().unwrap();
        let base = build_base(&sp, 0.5, 2, 3, Strategy::GenericGreedy, None).unwrap();
        assert_eq!(base.depth(), 3);
        for cov in &base.levels {
            for class in &cov.classes {
                assert_eq!(class.members, alloc::vec![sp.full()]);
            }
        }
        assert_eq!(base.lambda, 1.0);
    }

    #[test]
    fn circle_base_measures_constants() {
        let sp = spaces::circle(128).unwrap();
        let base = build_base(&sp, 0.25, 2, 3, Strategy::CircleArcs, None).unwrap();
        assert!(base.delta > 0.0 && base.delta <= MAX_DELTA);
        for (j, cov) in base.levels.iter().enumerate() {
            let scale = level_scale(0.25, j + 1);
            assert!(cov.mesh(&sp).unwrap() <= scale);
            for class in &cov.classes {
                assert!(class.is_r_disjoint(&sp, base.delta * scale));
                assert!(class.inner_ball_radius(&sp) >= base.delta * scale);
                assert!(sp.net_radius(&class.union(sp.len())) <= base.lambda * scale * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let sp = spaces::circle(16).unwrap();
        assert!(build_base(&sp, 1.0, 2, 2, Strategy::CircleArcs, None).is_err());
        assert!(build_base(&sp, 0.5, 0, 2, Strategy::CircleArcs, None).is_err());
        assert!(matches!(
            build_base(&sp, 0.5, 2, 2, Strategy::CircleArcs, Some(0.99)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn padding_fills_an_empty_class() {
        let sp = spaces::cantor(4).unwrap();
        let cov = covering_at_scale(&sp, Strategy::CantorClopen, 0.1, 2, 0, 0.1).unwrap();
        assert!(cov.classes[1].is_empty());
        let padded = pad_nets(&sp, &cov, 0.01, 0.1);
        assert!(!padded.classes[1].is_empty());
        assert_eq!(padded.classes[1].multiplicity(sp.len()), 1);
    }
}
