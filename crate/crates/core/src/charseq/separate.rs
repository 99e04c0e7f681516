use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{level_scale, verify_char_seq, BaseSequence, CharSequence, MAX_DELTA};
use crate::covering::{ColoredCovering, Family};
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};

/// `U ↦ B_{-4s}(U) *_{δs} Ĝ` applied memberwise to `family`.
///
/// Members that vanish stay in place as empty sets so positions keep
/// matching the input.
pub fn ast_shrink(space: &FiniteMetricSpace, family: &Family, ghat: &Family, s: f64, delta: f64) -> Result<Family> {
    if !(s > 0.0) {
        return Err(Error::Precondition(format!("s = {s} must be positive")));
    }
    if !(delta > 0.0 && delta <= MAX_DELTA) {
        return Err(Error::Precondition(format!("δ = {delta} is not in (0, 2/3]")));
    }
    if !ghat.is_r_disjoint(space, delta * s) {
        return Err(Error::Precondition(format!(
            "Ĝ is not δs-disjoint: radius {} < {}",
            ghat.disjointness_radius(space),
            delta * s
        )));
    }
    if !ghat.is_empty() {
        let mesh = ghat.mesh(space)?;
        if mesh > 2.0 * s {
            return Err(Error::Precondition(format!("mesh(Ĝ) = {mesh} exceeds 2s = {}", 2.0 * s)));
        }
    }
    let shrunk = Family::new(family.iter().map(|u| space.neighborhood(u, -4.0 * s)).collect());
    Ok(shrunk.star_merge(space, ghat, delta * s))
}

/// How [`separate`] treats the standing assumptions on `(r, δ, λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PreconditionPolicy {
    /// Refuse to run when an assumption fails.
    Enforce,
    /// Run anyway, record the failures, and let the verifier decide.
    #[default]
    Certify,
}

/// The standing assumptions that fail for these constants.
pub fn violated_preconditions(r: f64, delta: f64, lambda: f64) -> Vec<String> {
    let mut out = Vec::new();
    let lhs = 2.0 * r / (1.0 - r);
    if lhs > delta / 4.0 {
        out.push(format!("2r/(1-r) = {lhs} > δ/4 = {}", delta / 4.0));
    }
    if delta / 4.0 > 1.0 / 6.0 {
        out.push(format!("δ/4 = {} > 1/6", delta / 4.0));
    }
    if (lambda + 1.0) * r >= delta / 2.0 {
        out.push(format!("(λ+1)r = {} ≥ δ/2 = {}", (lambda + 1.0) * r, delta / 2.0));
    }
    out
}

/// `γ_{k,j}` for `1 ≤ j ≤ k ≤ depth`: `γ_{j,j} = δ/2`,
/// `γ_{k,j} = γ_{k-1,j} - 2 r^{k-j}`. Entry `[j-1][k-j]`.
pub fn gamma_trace(r: f64, delta: f64, depth: usize) -> Vec<Vec<f64>> {
    (1..=depth)
        .map(|j| {
            let mut row = vec![delta / 2.0];
            for k in (j + 1)..=depth {
                let prev = row[row.len() - 1];
                row.push(prev - 2.0 * level_scale(r, k - j));
            }
            row
        })
        .collect()
}

/// Runs the shrink-and-merge recursion and verifies the result; a failed
/// verification is an error carrying the worst witness.
pub fn separate(space: &FiniteMetricSpace, base: &BaseSequence, policy: PreconditionPolicy) -> Result<CharSequence> {
    let seq = separate_unverified(space, base, policy)?;
    let report = verify_char_seq(space, &seq);
    if report.passed() {
        Ok(seq)
    } else {
        Err(Error::Verification(report.summary()))
    }
}

/// The recursion alone.
///
/// For each color, `V_1 = Û_1` and
/// `V_{k+1} = B_{-4s}(V_k) *_{δs} Û_{k+1} ∪ Û_{k+1}` with `s = r^{k+1}/2`;
/// the level-`j` members are those descended from `Û_j`, intersected over
/// all steps. Declared constants are `δ/2`, `δ/4` and `λ + 1`.
pub fn separate_unverified(
    space: &FiniteMetricSpace,
    base: &BaseSequence,
    policy: PreconditionPolicy,
) -> Result<CharSequence> {
    let (r, delta, depth) = (base.r, base.delta, base.depth());
    let violated = violated_preconditions(r, delta, base.lambda);
    if policy == PreconditionPolicy::Enforce && !violated.is_empty() {
        return Err(Error::Precondition(violated.join("; ")));
    }
    let colors = base.colors();
    let mut provenance = base.provenance.clone();
    // final_sets[j][color] holds the running intersection for level j + 1.
    let mut final_sets: Vec<Vec<Family>> = base.levels.iter().map(|c| c.classes.clone()).collect();
    for color in 0..colors {
        // Origin level of each member of V_k, and the members themselves.
        let mut origin: Vec<usize> = vec![0; base.levels[0].classes[color].len()];
        let mut v = base.levels[0].classes[color].clone();
        for k in 1..depth {
            let s = level_scale(r, k + 1) / 2.0;
            let ghat = &base.levels[k].classes[color];
            let next = ast_shrink(space, &v, ghat, s, delta)?;
            let mut counters = vec![0usize; k];
            for ((member, prev), &j) in next.iter().zip(v.iter()).zip(&origin) {
                if !member.is_subset(prev) {
                    provenance
                        .notes
                        .push(format!("color {color}: level {} member grew at step {}", j + 1, k + 1));
                }
                let idx = counters[j];
                counters[j] += 1;
                final_sets[j][color].members[idx].intersect_with(member);
            }
            v = next;
            v.members.extend(ghat.iter().cloned());
            origin.extend(core::iter::repeat(k).take(ghat.len()));
        }
    }
    let mut dropped = 0usize;
    let levels: Vec<ColoredCovering> = final_sets
        .into_iter()
        .zip(&base.levels)
        .map(|(classes, orig)| {
            let classes = classes
                .into_iter()
                .map(|f| {
                    let before = f.len();
                    let kept = Family::new(f.members.into_iter().filter(|m| !m.is_empty()).collect());
                    dropped += before - kept.len();
                    kept
                })
                .collect();
            ColoredCovering::new(classes, orig.scale)
        })
        .collect();
    if dropped > 0 {
        provenance.notes.push(format!("{dropped} members shrank to nothing and were dropped"));
    }
    let shrink_totals = (1..=depth)
        .map(|j| {
            let applied: f64 = (j..depth).map(|k| 2.0 * level_scale(r, k + 1)).sum();
            (applied, 2.0 * level_scale(r, j + 1) / (1.0 - r))
        })
        .collect();
    Ok(CharSequence {
        r,
        levels,
        delta: delta / 2.0,
        gamma: delta / 4.0,
        lambda: base.lambda + 1.0,
        provenance,
        base_delta: delta,
        base_lambda: base.lambda,
        gamma_trace: gamma_trace(r, delta, depth),
        shrink_totals,
        violated_preconditions: violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charseq::{build_base, Strategy};
    use crate::spaces;
    use crate::PointSet;

    fn line(n: usize, h: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::with_indices(n, |i, j| h * i.abs_diff(j) as f64).unwrap()
    }

    #[test]
    fn far_ghat_is_not_absorbed() {
        let sp = line(100, 0.01);
        let u = Family::new(vec![PointSet::from_ids(100, 10..40)]);
        let g = Family::new(vec![PointSet::from_ids(100, 80..82)]);
        let s = 0.02;
        let out = ast_shrink(&sp, &u, &g, s, 0.5).unwrap();
        let expected = sp.neighborhood(&sp.neighborhood(&u.members[0], -4.0 * s), 0.5 * s);
        assert_eq!(out.members[0], expected);
        assert!(out.members[0].is_subset(&u.members[0]));
    }

    #[test]
    fn deep_ghat_is_absorbed() {
        let sp = line(100, 0.01);
        let u = Family::new(vec![PointSet::from_ids(100, 10..60)]);
        let g = Family::new(vec![PointSet::from_ids(100, 30..33)]);
        let s = 0.02;
        let out = ast_shrink(&sp, &u, &g, s, 0.5).unwrap();
        let ball = sp.neighborhood(&g.members[0], 0.5 * s);
        assert!(ball.is_subset(&out.members[0]));
        assert!(out.members[0].is_subset(&u.members[0]));
    }

    #[test]
    fn precondition_errors_name_the_bound() {
        let sp = line(20, 1.0);
        let u = Family::new(vec![PointSet::from_ids(20, 0..10)]);
        let wide = Family::new(vec![PointSet::from_ids(20, 0..5)]);
        let err = ast_shrink(&sp, &u, &wide, 1.0, 0.5).unwrap_err();
        assert!(alloc::format!("{err}").contains("mesh"));
        let close = Family::new(vec![PointSet::singleton(20, 3), PointSet::singleton(20, 4)]);
        // Neighbouring singletons are exactly 1-disjoint; δs = 1.25 is too much.
        let err = ast_shrink(&sp, &u, &close, 2.5, 0.5).unwrap_err();
        assert!(alloc::format!("{err}").contains("disjoint"));
        assert!(ast_shrink(&sp, &u, &close, 1.0, 0.7).is_err());
    }

    #[test]
    fn trace_follows_the_recursion() {
        let (r, delta) = (0.05, 0.6);
        let t = gamma_trace(r, delta, 3);
        assert_eq!(t[0], vec![0.3, 0.3 - 2.0 * 0.05, 0.3 - 2.0 * 0.05 - 2.0 * 0.0025]);
        assert_eq!(t[1], vec![0.3, 0.3 - 0.1]);
        assert_eq!(t[2], vec![0.3]);
        for row in &t {
            assert!(row.iter().all(|&g| g >= delta / 4.0));
        }
    }

    #[test]
    fn depth_one_is_identity() {
        let sp = spaces::circle(64).unwrap();
        let base = build_base(&sp, 0.25, 2, 1, Strategy::CircleArcs, None).unwrap();
        let seq = separate_unverified(&sp, &base, PreconditionPolicy::Certify).unwrap();
        assert_eq!(seq.levels, base.levels);
    }

    #[test]
    fn enforce_rejects_large_r() {
        let sp = spaces::circle(64).unwrap();
        let base = build_base(&sp, 0.25, 2, 2, Strategy::CircleArcs, None).unwrap();
        assert!(matches!(
            separate_unverified(&sp, &base, PreconditionPolicy::Enforce),
            Err(Error::Precondition(_))
        ));
    }
}
