//! Directed cosets, filters, ultrafilters and the triangle relation.
//!
//! A directed set has a common lower bound inside itself for every pair; a
//! filter is a non-empty directed up-set. The directed cosets form an ideal
//! of the coset groupoid, every coset partitions uniquely into maximal
//! directed subsets, and that partition is the triangle relation carrying the
//! universality of the directed subrepresentation. Ultrafilters (maximal
//! proper filters) refine this further when the central set has a zero.

use std::collections::BTreeSet;

use crate::coset::CosetError;
use crate::cosetgpd::CosetGroupoid;
use crate::order::Ctx;
use crate::report::CheckReport;
use crate::sets::{ElemSet, PointSet};
use crate::topo::{generate_topology, FiniteGroupoid, GroupoidData, TopGroupoid};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error("ultrafilters need an absorbing zero inside the central set")]
    NoZero,
    #[error("directed subgroupoid laws failed:\n{report}")]
    Laws { report: Box<CheckReport> },
    #[error("filter structure disagrees with itself: {what}")]
    Inconsistent { what: String },
}

/// Every pair of elements has a common lower bound inside the set.
pub fn is_directed(ctx: &Ctx, d: &ElemSet) -> bool {
    for a in d.iter() {
        for b in d.iter() {
            if !ctx.dom.down_row(a).inter(&ctx.dom.down_row(b)).intersects(d) {
                return false;
            }
        }
    }
    true
}

/// A non-empty directed up-set.
pub fn is_filter(ctx: &Ctx, d: &ElemSet) -> bool {
    !d.is_empty() && is_directed(ctx, d) && ctx.up_closure(d) == *d
}

/// All filters, in mask order.
pub fn all_filters(ctx: &Ctx) -> Result<Vec<ElemSet>, FilterError> {
    let n = ctx.order();
    if n > ctx.subset_guard {
        return Err(CosetError::OrderTooLarge { order: n, max: ctx.subset_guard }.into());
    }
    let mut out = Vec::new();
    for bits in 0..(1u128 << n) {
        let d = ElemSet::from_bits(n, bits as u64);
        if is_filter(ctx, &d) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Maximal proper filters. Requires an absorbing zero inside the central set,
/// which makes a filter proper exactly when it avoids the zero.
pub fn ultrafilters(ctx: &Ctx) -> Result<Vec<ElemSet>, FilterError> {
    let zero = match ctx.s.sg.zero() {
        Some(z) if ctx.s.z_set.contains(z) => z,
        _ => return Err(FilterError::NoZero),
    };
    let proper: Vec<ElemSet> =
        all_filters(ctx)?.into_iter().filter(|f| !f.contains(zero)).collect();
    Ok(proper
        .iter()
        .filter(|f| !proper.iter().any(|g| f.is_subset(g) && *f != g))
        .copied()
        .collect())
}

/// Ids of the directed cosets, ascending.
pub fn directed_coset_ids(cg: &CosetGroupoid) -> Vec<usize> {
    (0..cg.size()).filter(|&c| is_directed(&cg.ctx, cg.members(c))).collect()
}

/// The directed part of a unit coset: the up-closure of its trace on N.
pub fn unit_directed_part(ctx: &Ctx, u: &ElemSet) -> ElemSet {
    ctx.up_closure(&u.inter(&ctx.s.n_set))
}

/// The restriction of the coset groupoid to an ideal of its elements, with
/// the subspace topology. Fails if the chosen ids are not actually closed
/// under inverses and products.
pub struct SubGroupoid {
    /// Coset ids retained, ascending; positions are the new element ids.
    pub ids: Vec<usize>,
    pub tg: TopGroupoid,
}

pub fn restrict_groupoid(cg: &CosetGroupoid, ids: &[usize]) -> Result<SubGroupoid, FilterError> {
    restrict_top_groupoid(&cg.tg, ids)
}

/// Same restriction for any topological groupoid: keeps the listed elements,
/// renumbers them by position, and traces the subbasis through.
pub fn restrict_top_groupoid(tg: &TopGroupoid, ids: &[usize]) -> Result<SubGroupoid, FilterError> {
    let ids: Vec<usize> = ids.to_vec();
    let pos = |c: usize| ids.iter().position(|&i| i == c);
    let k = ids.len();
    let mut inv = vec![0usize; k];
    let mut prod = vec![None; k * k];
    let g = &tg.gpd;
    for (i, &c) in ids.iter().enumerate() {
        inv[i] = pos(g.inv(c)).ok_or_else(|| FilterError::Inconsistent {
            what: format!("inverse of {} leaves the restriction", g.label(c)),
        })?;
        for (j, &d) in ids.iter().enumerate() {
            if let Some(cd) = g.prod(c, d) {
                prod[i * k + j] = Some(pos(cd).ok_or_else(|| FilterError::Inconsistent {
                    what: format!("product of {} and {} leaves the restriction", g.label(c), g.label(d)),
                })?);
            }
        }
    }
    let labels: Vec<String> = ids.iter().map(|&c| g.label(c).to_string()).collect();
    let gpd = FiniteGroupoid::from_data(GroupoidData { size: k, inv, prod, labels: Some(labels) })
        .map_err(|report| FilterError::Laws { report })?;
    let subbasis: Vec<PointSet> = tg
        .top
        .subbasis()
        .iter()
        .map(|s| PointSet::from_iter(k, ids.iter().enumerate().filter(|(_, &c)| s.contains(c)).map(|(i, _)| i)))
        .collect();
    let top = generate_topology(k, subbasis);
    Ok(SubGroupoid { ids, tg: TopGroupoid { gpd, top } })
}

/// The directed cosets as a subgroupoid of the coset groupoid.
pub fn directed_subgroupoid(cg: &CosetGroupoid) -> Result<SubGroupoid, FilterError> {
    restrict_groupoid(cg, &directed_coset_ids(cg))
}

/// The unique maximal directed subset of coset c containing element d: the
/// up-closure of (the directed part of the range) times d. The result is
/// verified to be a directed coset through d inside c before returning.
pub fn max_directed_at(cg: &CosetGroupoid, c: usize, d: usize) -> Result<usize, FilterError> {
    let ctx = &cg.ctx;
    let rec = &cg.cosets[c];
    if !rec.members.contains(d) {
        return Err(CosetError::NotInUpClosure { element: d, set: rec.members.to_vec() }.into());
    }
    let part = unit_directed_part(ctx, &rec.range);
    let dset = ctx.up_closure(&ctx.set_mul(&part, &ElemSet::singleton(ctx.order(), d)));
    let id = cg.id_of(&dset).ok_or_else(|| FilterError::Inconsistent {
        what: format!("directed part {} is not an enumerated coset", ctx.describe(&dset)),
    })?;
    if !dset.contains(d) || !dset.is_subset(&rec.members) || !is_directed(ctx, &dset) {
        return Err(FilterError::Inconsistent {
            what: format!(
                "directed part {} of {} through {} is malformed",
                ctx.describe(&dset),
                ctx.describe(&rec.members),
                ctx.label(d)
            ),
        });
    }
    Ok(id)
}

/// The triangle relation as (directed, coset) id pairs, sorted. Each coset is
/// paired with the maximal directed subsets that partition it.
pub fn triangle(cg: &CosetGroupoid) -> Result<Vec<(usize, usize)>, FilterError> {
    let mut pairs = BTreeSet::new();
    for c in 0..cg.size() {
        for d in cg.members(c).iter() {
            pairs.insert((max_directed_at(cg, c, d)?, c));
        }
    }
    Ok(pairs.into_iter().collect())
}

/// Literal check that d is a maximal directed subset of c, by scanning every
/// superset of d inside c. None when c is too large to scan.
pub fn is_maximal_directed_subset(
    ctx: &Ctx,
    d: &ElemSet,
    c: &ElemSet,
    cap: usize,
) -> Option<bool> {
    if !d.is_subset(c) || d.is_empty() || !is_directed(ctx, d) {
        return Some(false);
    }
    let extra: Vec<usize> = c.minus(d).to_vec();
    if extra.len() > cap {
        return None;
    }
    for bits in 1..(1u128 << extra.len()) {
        let mut bigger = *d;
        for (i, &x) in extra.iter().enumerate() {
            if bits >> i & 1 == 1 {
                bigger.insert(x);
            }
        }
        if is_directed(ctx, &bigger) {
            return Some(false);
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::equivalence_classes;
    use crate::coset::{is_coset, z_right};
    use crate::cosetgpd::build_coset_groupoid;
    use crate::fixtures::{structured_fixture, structured_fixtures};
    use crate::topo::check_etale;

    fn groupoid_for(name: &str) -> CosetGroupoid {
        build_coset_groupoid(Ctx::new(structured_fixture(name).unwrap())).unwrap()
    }

    #[test]
    fn directed_cosets_frozen() {
        assert_eq!(directed_coset_ids(&groupoid_for("null")), vec![0]);
        assert_eq!(directed_coset_ids(&groupoid_for("chain3")), vec![0, 1, 2]);
        assert_eq!(directed_coset_ids(&groupoid_for("ps2")), vec![0, 1, 2, 3]);
        // The full group is a coset but has no common lower bounds.
        assert_eq!(directed_coset_ids(&groupoid_for("z3")), vec![0, 1, 2]);
    }

    #[test]
    fn directed_cosets_are_exactly_the_filters() {
        // With a diagonal N, filters and directed cosets coincide.
        for (name, s) in structured_fixtures() {
            let ctx = Ctx::new(s);
            assert!(ctx.s.flags.n_diagonal, "{name}");
            let cg = build_coset_groupoid(ctx).unwrap();
            let from_cosets: Vec<ElemSet> = directed_coset_ids(&cg)
                .into_iter()
                .map(|c| *cg.members(c))
                .collect();
            let filters = all_filters(&cg.ctx).unwrap();
            assert_eq!(from_cosets, filters, "{name}");
            for f in &filters {
                assert!(is_coset(&cg.ctx, f), "{name}: filter {} not a coset", cg.ctx.describe(f));
            }
        }
    }

    #[test]
    fn filter_and_ultrafilter_counts_frozen() {
        let counts: Vec<(usize, usize)> = ["null", "chain3", "ps2", "i2"]
            .iter()
            .map(|name| {
                let ctx = Ctx::new(structured_fixture(name).unwrap());
                (all_filters(&ctx).unwrap().len(), ultrafilters(&ctx).unwrap().len())
            })
            .collect();
        assert_eq!(counts, vec![(1, 0), (3, 1), (4, 2), (7, 4)]);
        let z3 = Ctx::new(structured_fixture("z3").unwrap());
        assert!(matches!(ultrafilters(&z3), Err(FilterError::NoZero)));
    }

    #[test]
    fn chain3_ultrafilter_is_the_top_pair() {
        let ctx = Ctx::new(structured_fixture("chain3").unwrap());
        let ultra = ultrafilters(&ctx).unwrap();
        assert_eq!(ultra, vec![ElemSet::from_iter(3, [1, 2])]);
    }

    #[test]
    fn triangle_partitions_every_coset() {
        for (name, s) in structured_fixtures() {
            let cg = build_coset_groupoid(Ctx::new(s)).unwrap();
            let pairs = triangle(&cg).unwrap();
            for c in 0..cg.size() {
                let parts: Vec<ElemSet> = pairs
                    .iter()
                    .filter(|(_, cc)| *cc == c)
                    .map(|(d, _)| *cg.members(*d))
                    .collect();
                let mut union = ElemSet::empty(cg.ctx.order());
                for p in &parts {
                    assert!(!union.intersects(p), "{name}: overlap inside coset {c}");
                    union = union.union(p);
                }
                assert_eq!(union, *cg.members(c), "{name}: coset {c} not covered");
            }
        }
    }

    #[test]
    fn triangle_matches_literal_maximality() {
        for (name, s) in structured_fixtures() {
            let cg = build_coset_groupoid(Ctx::new(s)).unwrap();
            let pairs = triangle(&cg).unwrap();
            let directed = directed_coset_ids(&cg);
            for c in 0..cg.size() {
                for &d in &directed {
                    let expected = pairs.contains(&(d, c));
                    let literal = is_maximal_directed_subset(
                        &cg.ctx,
                        cg.members(d),
                        cg.members(c),
                        12,
                    )
                    .expect("fixture cosets are small");
                    assert_eq!(literal, expected, "{name}: pair ({d},{c})");
                }
            }
        }
    }

    #[test]
    fn triangle_detected_by_source_and_range_traces() {
        for (name, s) in structured_fixtures() {
            let ctx = Ctx::new(s);
            let n_set = ctx.s.n_set;
            let cg = build_coset_groupoid(ctx).unwrap();
            let pairs = triangle(&cg).unwrap();
            for c in 0..cg.size() {
                for &d in &directed_coset_ids(&cg) {
                    if !cg.members(d).is_subset(cg.members(c)) {
                        continue;
                    }
                    let is_pair = pairs.contains(&(d, c));
                    let rc = cg.cosets[c].range.inter(&n_set);
                    let rd = cg.cosets[d].range.inter(&n_set);
                    let sc = cg.cosets[c].source.inter(&n_set);
                    let sd = cg.cosets[d].source.inter(&n_set);
                    assert_eq!(is_pair, rc == rd, "{name}: range trace at ({d},{c})");
                    assert_eq!(is_pair, sc == sd, "{name}: source trace at ({d},{c})");
                    // Central absorbers detect the pair as well under diagonal N.
                    let cz = z_right(&cg.ctx, cg.members(c));
                    let dz = z_right(&cg.ctx, cg.members(d));
                    assert_eq!(is_pair, cz == dz, "{name}: central trace at ({d},{c})");
                }
            }
        }
    }

    #[test]
    fn triangle_preimages_of_slices_are_slices() {
        for (name, s) in structured_fixtures() {
            let cg = build_coset_groupoid(Ctx::new(s)).unwrap();
            let pairs = triangle(&cg).unwrap();
            for a in 0..cg.ctx.order() {
                let preimage: BTreeSet<usize> = pairs
                    .iter()
                    .filter(|(d, _)| cg.members(*d).contains(a))
                    .map(|(_, c)| *c)
                    .collect();
                let slice: BTreeSet<usize> = cg.slice_of(a).iter().collect();
                assert_eq!(preimage, slice, "{name}: element {a}");
            }
        }
    }

    #[test]
    fn directed_subgroupoid_is_an_etale_ideal_with_a_slice_basis() {
        for (name, s) in structured_fixtures() {
            let cg = build_coset_groupoid(Ctx::new(s)).unwrap();
            let directed = directed_coset_ids(&cg);
            // Ideal: a product with a directed factor is directed.
            let g = &cg.tg.gpd;
            for c in 0..cg.size() {
                for d in 0..cg.size() {
                    if let Some(cd) = g.prod(c, d) {
                        if directed.contains(&c) || directed.contains(&d) {
                            assert!(directed.contains(&cd), "{name}: ideal fails at ({c},{d})");
                        }
                    }
                }
            }
            let sub = directed_subgroupoid(&cg).unwrap();
            check_etale(&sub.tg).expect_clean();
            // The restricted slices form a basis: every minimal neighbourhood
            // is the trace of some membership slice.
            for x in 0..sub.tg.gpd.size() {
                let nbhd = sub.tg.top.min_nbhd(x);
                let found = (0..cg.ctx.order()).any(|a| {
                    let trace = PointSet::from_iter(
                        sub.ids.len(),
                        sub.ids
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| cg.members(c).contains(a))
                            .map(|(i, _)| i),
                    );
                    trace == *nbhd
                });
                assert!(found, "{name}: minimal neighbourhood of {x} is not a slice trace");
            }
        }
    }

    #[test]
    fn duals_and_translates_preserve_directedness() {
        for (name, s) in structured_fixtures() {
            let ctx = Ctx::new(s);
            let n = ctx.order();
            let sets: Vec<ElemSet> = if n <= 4 {
                (0..(1u64 << n)).map(|b| ElemSet::from_bits(n, b)).collect()
            } else {
                crate::coset::all_cosets(&ctx).unwrap().into_iter().map(|r| r.members).collect()
            };
            for d in sets {
                if d.is_empty() || !is_directed(&ctx, &d) {
                    continue;
                }
                let star = ctx.dual(&d);
                assert!(is_directed(&ctx, &star), "{name}: dual of {}", ctx.describe(&d));
                let sandwich = ctx.set_mul(&ctx.set_mul(&star, &d), &star);
                assert!(
                    sandwich.is_subset(&ctx.up_closure(&star)),
                    "{name}: sandwich escapes on {}",
                    ctx.describe(&d)
                );
                for c in 0..n {
                    if crate::coset::acts_left(&ctx, c, &d).is_some() {
                        let cd = ctx.set_mul(&ElemSet::singleton(n, c), &d);
                        assert!(
                            is_directed(&ctx, &cd),
                            "{name}: translate {}.{} not directed",
                            ctx.label(c),
                            ctx.describe(&d)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn directed_fibres_are_single_classes_up_closed() {
        // Inside a directed coset every element generates the whole coset
        // from its class: D = (class of d)^<.
        for (name, s) in structured_fixtures() {
            let cg = build_coset_groupoid(Ctx::new(s)).unwrap();
            for c in directed_coset_ids(&cg) {
                let classes = equivalence_classes(&cg.ctx, cg.members(c)).unwrap();
                for class in &classes {
                    assert_eq!(
                        cg.ctx.up_closure(class),
                        *cg.members(c),
                        "{name}: class closure in coset {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn unit_directed_parts_behave() {
        for (name, s) in structured_fixtures() {
            let ctx = Ctx::new(s);
            let diagonal = ctx.s.flags.n_diagonal;
            let cg = build_coset_groupoid(ctx).unwrap();
            for c in 0..cg.size() {
                if !cg.cosets[c].is_unit {
                    continue;
                }
                let u = cg.members(c);
                let part = unit_directed_part(&cg.ctx, u);
                assert!(is_coset(&cg.ctx, &part), "{name}: part of {c} not a coset");
                assert!(is_directed(&cg.ctx, &part), "{name}: part of {c} not directed");
                let part_id = cg.id_of(&part).unwrap();
                assert!(cg.cosets[part_id].is_unit, "{name}: part of {c} not a unit");
                assert_eq!(
                    part == *u,
                    is_directed(&cg.ctx, u),
                    "{name}: directed unit criterion at {c}"
                );
                if diagonal {
                    let zr = z_right(&cg.ctx, u);
                    assert_eq!(
                        part,
                        cg.ctx.up_closure(&zr),
                        "{name}: central description of the part at {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn ultrafilters_form_a_discrete_unit_ideal() {
        for name in ["null", "chain3", "ps2", "i2"] {
            let cg = groupoid_for(name);
            let ultra = ultrafilters(&cg.ctx).unwrap();
            let ids: Vec<usize> = ultra.iter().map(|u| cg.id_of(u).unwrap()).collect();
            let g = &cg.tg.gpd;
            // Ideal: products with an ultrafilter factor stay ultrafilters.
            for c in 0..cg.size() {
                for d in 0..cg.size() {
                    if let Some(cd) = g.prod(c, d) {
                        if ids.contains(&c) || ids.contains(&d) {
                            assert!(ids.contains(&cd), "{name}: ideal fails at ({c},{d})");
                        }
                    }
                }
            }
            // Distinct unit ultrafilters are separated by annihilating pairs.
            let units: Vec<usize> = ids.iter().copied().filter(|&c| g.is_unit(c)).collect();
            for (i, &u) in units.iter().enumerate() {
                for &v in units.iter().skip(i + 1) {
                    let sep = cg.members(u).iter().any(|a| {
                        cg.members(v).iter().any(|b| {
                            cg.ctx.s.sg.mul(a, b) == cg.ctx.s.sg.zero().unwrap()
                                && !ids.iter().any(|&w| {
                                    cg.members(w).contains(a) && cg.members(w).contains(b)
                                })
                        })
                    });
                    assert!(sep, "{name}: unit ultrafilters {u} and {v} inseparable");
                }
            }
        }
    }

    #[test]
    fn i2_ultrafilters_form_the_pair_groupoid() {
        let cg = groupoid_for("i2");
        let ultra = ultrafilters(&cg.ctx).unwrap();
        assert_eq!(ultra.len(), 4);
        let ids: Vec<usize> = ultra.iter().map(|u| cg.id_of(u).unwrap()).collect();
        let sub = restrict_groupoid(&cg, &ids).unwrap();
        let g = &sub.tg.gpd;
        assert_eq!(g.units().count(), 2);
        // Two units, one arrow each way: the pair groupoid on two objects.
        let arrows: Vec<usize> = (0..4).filter(|&x| !g.is_unit(x)).collect();
        assert_eq!(arrows.len(), 2);
        assert_eq!(g.inv(arrows[0]), arrows[1]);
        assert_eq!(g.prod(arrows[0], arrows[1]), Some(g.rng(arrows[0])));
        check_etale(&sub.tg).expect_clean();
    }

    #[test]
    fn guards_fire() {
        let cg = groupoid_for("z3");
        assert!(matches!(
            max_directed_at(&cg, 0, 2),
            Err(FilterError::Coset(CosetError::NotInUpClosure { .. }))
        ));
        let ctx = Ctx::with_guard(structured_fixture("z3").unwrap(), 2);
        assert!(matches!(
            all_filters(&ctx),
            Err(FilterError::Coset(CosetError::OrderTooLarge { .. }))
        ));
    }
}
