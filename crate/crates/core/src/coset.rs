//! Atlases and cosets of a structured triple.
//!
//! An atlas A satisfies A A* A ⊆ A ⊆ A^<; a coset is an atlas that equals its
//! own up-closure. Sources and ranges are unit cosets, and composable cosets
//! multiply by (BC)^<. Two independent enumerators are provided: an exhaustive
//! subset filter, and a generator that rebuilds every coset from a single
//! member and a unit coset; they must agree.

use crate::order::Ctx;
use crate::sets::ElemSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CosetError {
    #[error("order {order} exceeds the subset-enumeration guard {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("sets are not composable: left source {left_source:?} differs from right range {right_range:?}")]
    NotComposable { left_source: Vec<usize>, right_range: Vec<usize> },
    #[error("set {set:?} is not an atlas")]
    NotAtlas { set: Vec<usize> },
    #[error("element {element} is outside the up-closure of {set:?}")]
    NotInUpClosure { element: usize, set: Vec<usize> },
    #[error("closure {closure:?} is not round, so no coset contains the seed")]
    NotRound { closure: Vec<usize> },
}

/// A ⊆ A^<.
pub fn is_round(ctx: &Ctx, a: &ElemSet) -> bool {
    a.is_subset(&ctx.up_closure(a))
}

/// The triple product A A* A.
pub fn triple_product(ctx: &Ctx, a: &ElemSet) -> ElemSet {
    let dual = ctx.dual(a);
    ctx.set_mul(&ctx.set_mul(a, &dual), a)
}

pub fn is_atlas(ctx: &Ctx, a: &ElemSet) -> bool {
    triple_product(ctx, a).is_subset(a) && is_round(ctx, a)
}

pub fn is_coset(ctx: &Ctx, c: &ElemSet) -> bool {
    triple_product(ctx, c).is_subset(c) && ctx.up_closure(c) == *c
}

/// Least superset of the seed closed under up-closure and the triple product,
/// provided the closure stays round; otherwise no coset contains the seed.
pub fn coset_closure(ctx: &Ctx, seed: &ElemSet) -> Result<ElemSet, CosetError> {
    let mut cur = *seed;
    loop {
        let next = cur.union(&ctx.up_closure(&cur)).union(&triple_product(ctx, &cur));
        if next == cur {
            break;
        }
        cur = next;
    }
    if is_round(ctx, &cur) {
        Ok(cur)
    } else {
        Err(CosetError::NotRound { closure: cur.to_vec() })
    }
}

/// Source unit coset (A* A)^< of an atlas.
pub fn source_of(ctx: &Ctx, a: &ElemSet) -> ElemSet {
    ctx.up_closure(&ctx.set_mul(&ctx.dual(a), a))
}

/// Range unit coset (A A*)^< of an atlas.
pub fn range_of(ctx: &Ctx, a: &ElemSet) -> ElemSet {
    ctx.up_closure(&ctx.set_mul(a, &ctx.dual(a)))
}

/// A^Z: right units of A inside Z.
pub fn z_right(ctx: &Ctx, a: &ElemSet) -> ElemSet {
    let sg = &ctx.s.sg;
    ElemSet::from_iter(
        ctx.order(),
        ctx.s.z_set.iter().filter(|&z| a.iter().any(|x| sg.mul(x, z) == x)),
    )
}

/// The mirrored set of left units of A inside Z.
pub fn z_left(ctx: &Ctx, a: &ElemSet) -> ElemSet {
    let sg = &ctx.s.sg;
    ElemSet::from_iter(
        ctx.order(),
        ctx.s.z_set.iter().filter(|&z| a.iter().any(|x| sg.mul(z, x) == x)),
    )
}

pub fn is_unit_coset(ctx: &Ctx, c: &ElemSet) -> bool {
    c.intersects(&ctx.s.n_set)
}

/// One enumerated coset with its derived data.
#[derive(Clone, Debug)]
pub struct CosetRecord {
    pub members: ElemSet,
    pub source: ElemSet,
    pub range: ElemSet,
    pub z_right: ElemSet,
    pub z_left: ElemSet,
    pub is_unit: bool,
}

pub fn make_record(ctx: &Ctx, members: ElemSet) -> CosetRecord {
    CosetRecord {
        members,
        source: source_of(ctx, &members),
        range: range_of(ctx, &members),
        z_right: z_right(ctx, &members),
        z_left: z_left(ctx, &members),
        is_unit: is_unit_coset(ctx, &members),
    }
}

fn guard(ctx: &Ctx) -> Result<(), CosetError> {
    let order = ctx.order();
    if order > ctx.subset_guard {
        return Err(CosetError::OrderTooLarge { order, max: ctx.subset_guard });
    }
    Ok(())
}

/// Iterate all nonempty subsets of the carrier as raw masks.
fn all_masks(order: usize) -> impl Iterator<Item = u64> {
    debug_assert!(order < 64);
    1..(1u64 << order)
}

/// Ground-truth enumerator: filter every nonempty subset. Results are sorted
/// by mask value, which fixes the canonical coset ids used downstream.
pub fn all_cosets(ctx: &Ctx) -> Result<Vec<CosetRecord>, CosetError> {
    guard(ctx)?;
    let order = ctx.order();
    let mut out = Vec::new();
    for mask in all_masks(order) {
        let set = ElemSet::from_bits(order, mask);
        if ctx.up_closure(&set) == set && triple_product(ctx, &set).is_subset(&set) {
            out.push(make_record(ctx, set));
        }
    }
    Ok(out)
}

/// All atlases, including the empty one.
pub fn all_atlases(ctx: &Ctx) -> Result<Vec<ElemSet>, CosetError> {
    guard(ctx)?;
    let order = ctx.order();
    let mut out = vec![ElemSet::empty(order)];
    for mask in all_masks(order) {
        let set = ElemSet::from_bits(order, mask);
        if is_atlas(ctx, &set) {
            out.push(set);
        }
    }
    Ok(out)
}

/// Cross-check enumerator: scan only unit cosets, then rebuild every coset as
/// (aU)^< from a member a and unit coset U. Sound because a coset B satisfies
/// B = (a s(B))^< for every a in B; complete because the rebuilt sets are
/// post-filtered through the coset test.
pub fn all_cosets_generated(ctx: &Ctx) -> Result<Vec<ElemSet>, CosetError> {
    guard(ctx)?;
    let order = ctx.order();
    let mut units = Vec::new();
    for mask in all_masks(order) {
        let set = ElemSet::from_bits(order, mask);
        if set.intersects(&ctx.s.n_set)
            && ctx.up_closure(&set) == set
            && triple_product(ctx, &set).is_subset(&set)
        {
            units.push(set);
        }
    }
    let mut found = std::collections::BTreeSet::new();
    for unit in &units {
        for a in 0..order {
            let seed = ctx.s.sg.elem_mul_set(a, unit);
            let candidate = ctx.up_closure(&seed);
            if !candidate.is_empty() && is_coset(ctx, &candidate) {
                found.insert(candidate);
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Right action witness: some b' with bb', b'b in Z and a member absorbing
/// bb' on the right.
pub fn acts_right(ctx: &Ctx, a: &ElemSet, b: usize) -> Option<usize> {
    let sg = &ctx.s.sg;
    (0..ctx.order()).find(|&bp| {
        ctx.s.z_set.contains(sg.mul(b, bp))
            && ctx.s.z_set.contains(sg.mul(bp, b))
            && a.iter().any(|x| sg.mul(x, sg.mul(b, bp)) == x)
    })
}

/// Left action witness: some b' with bb', b'b in Z and a member absorbing
/// b'b on the left.
pub fn acts_left(ctx: &Ctx, b: usize, a: &ElemSet) -> Option<usize> {
    let sg = &ctx.s.sg;
    (0..ctx.order()).find(|&bp| {
        ctx.s.z_set.contains(sg.mul(b, bp))
            && ctx.s.z_set.contains(sg.mul(bp, b))
            && a.iter().any(|x| sg.mul(sg.mul(bp, b), x) == x)
    })
}

/// (BC)^< for cosets with matching source and range.
pub fn coset_product(ctx: &Ctx, b: &ElemSet, c: &ElemSet) -> Result<ElemSet, CosetError> {
    if !is_coset(ctx, b) {
        return Err(CosetError::NotAtlas { set: b.to_vec() });
    }
    if !is_coset(ctx, c) {
        return Err(CosetError::NotAtlas { set: c.to_vec() });
    }
    let source = source_of(ctx, b);
    let range = range_of(ctx, c);
    if source != range {
        return Err(CosetError::NotComposable {
            left_source: source.to_vec(),
            right_range: range.to_vec(),
        });
    }
    Ok(ctx.up_closure(&ctx.set_mul(b, c)))
}

/// C*: the inverse coset.
pub fn coset_inverse(ctx: &Ctx, c: &ElemSet) -> ElemSet {
    ctx.dual(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{validate_semigroup, validate_structured};

    fn null_ctx() -> Ctx {
        let sg = validate_semigroup(
            &[vec![0, 0], vec![0, 0]],
            Some(vec!["0".into(), "a".into()]),
            64,
        )
        .unwrap();
        let all = sg.elements();
        Ctx::new(validate_structured(sg, all, all).unwrap())
    }

    fn z3_ctx() -> Ctx {
        let sg = validate_semigroup(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]], None, 64)
            .unwrap();
        let unit = ElemSet::singleton(3, 0);
        Ctx::new(validate_structured(sg, unit, unit).unwrap())
    }

    fn chain3_ctx() -> Ctx {
        let sg = validate_semigroup(&[vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]], None, 64)
            .unwrap();
        let all = sg.elements();
        Ctx::new(validate_structured(sg, all, all).unwrap())
    }

    #[test]
    fn null_semigroup_has_one_coset() {
        let ctx = null_ctx();
        let cosets = all_cosets(&ctx).unwrap();
        assert_eq!(cosets.len(), 1);
        assert_eq!(cosets[0].members, ElemSet::full(2));
        assert!(cosets[0].is_unit);
        // Neither singleton is a coset: {0} is not up-closed, {a} is not round.
        assert!(!is_coset(&ctx, &ElemSet::singleton(2, 0)));
        assert!(!is_coset(&ctx, &ElemSet::singleton(2, 1)));
        // The closure of {0} sweeps up to the whole carrier.
        assert_eq!(coset_closure(&ctx, &ElemSet::singleton(2, 0)).unwrap(), ElemSet::full(2));
        // {a} is its own closure but not round.
        assert!(matches!(
            coset_closure(&ctx, &ElemSet::singleton(2, 1)),
            Err(CosetError::NotRound { .. })
        ));
        // Empty set and {0} are atlases, {a} is not.
        let atlases = all_atlases(&ctx).unwrap();
        assert_eq!(
            atlases,
            vec![ElemSet::empty(2), ElemSet::singleton(2, 0), ElemSet::full(2)]
        );
        assert_eq!(acts_right(&ctx, &ElemSet::full(2), 1), Some(0));
    }

    #[test]
    fn z3_cosets_are_subgroup_cosets() {
        let ctx = z3_ctx();
        let cosets = all_cosets(&ctx).unwrap();
        let members: Vec<ElemSet> = cosets.iter().map(|c| c.members).collect();
        assert_eq!(
            members,
            vec![
                ElemSet::singleton(3, 0),
                ElemSet::singleton(3, 1),
                ElemSet::singleton(3, 2),
                ElemSet::full(3),
            ]
        );
        // Units: the trivial subgroup and the whole group.
        let units: Vec<bool> = cosets.iter().map(|c| c.is_unit).collect();
        assert_eq!(units, vec![true, false, false, true]);
        for c in &cosets {
            if c.members != ElemSet::full(3) {
                assert_eq!(c.source, ElemSet::singleton(3, 0));
                assert_eq!(c.range, ElemSet::singleton(3, 0));
            } else {
                assert_eq!(c.source, ElemSet::full(3));
            }
        }
        let g = ElemSet::singleton(3, 1);
        let gg = ElemSet::singleton(3, 2);
        assert_eq!(coset_product(&ctx, &g, &g).unwrap(), gg);
        assert_eq!(coset_product(&ctx, &g, &gg).unwrap(), ElemSet::singleton(3, 0));
        assert_eq!(coset_inverse(&ctx, &g), gg);
        assert!(matches!(
            coset_product(&ctx, &g, &ElemSet::full(3)),
            Err(CosetError::NotComposable { .. })
        ));
    }

    #[test]
    fn chain_cosets_are_filters() {
        let ctx = chain3_ctx();
        let cosets = all_cosets(&ctx).unwrap();
        let members: Vec<ElemSet> = cosets.iter().map(|c| c.members).collect();
        assert_eq!(
            members,
            vec![
                ElemSet::singleton(3, 2),
                ElemSet::from_iter(3, [1, 2]),
                ElemSet::full(3),
            ]
        );
        assert!(cosets.iter().all(|c| c.is_unit));
    }

    #[test]
    fn generator_enumeration_agrees_with_exhaustive_scan() {
        for ctx in [null_ctx(), z3_ctx(), chain3_ctx()] {
            let exhaustive: Vec<ElemSet> =
                all_cosets(&ctx).unwrap().into_iter().map(|c| c.members).collect();
            let generated = all_cosets_generated(&ctx).unwrap();
            assert_eq!(exhaustive, generated);
            // Every coset is rebuilt from each of its members and its source.
            for c in &exhaustive {
                let src = source_of(&ctx, c);
                for a in c.iter() {
                    let rebuilt = ctx.up_closure(&ctx.s.sg.elem_mul_set(a, &src));
                    assert_eq!(rebuilt, *c, "member {a} of {c:?}");
                }
            }
        }
    }

    #[test]
    fn subset_guard_blocks_enumeration() {
        let mut ctx = null_ctx();
        ctx.subset_guard = 1;
        assert!(matches!(all_cosets(&ctx), Err(CosetError::OrderTooLarge { order: 2, max: 1 })));
    }
}
