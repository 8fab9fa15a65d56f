//! Classes of coset-indexed equivalence and the bundle they form.
//!
//! Every atlas A identifies the elements of A^< it cannot tell apart: a and b
//! are identified when sat = sbt for some s, t in the dual. The classes over
//! each coset, paired with that coset, compose over the coset groupoid and
//! project back onto it. The construction cross-checks its own structure
//! (well-defined products, choice-independent inverses, central unit classes)
//! and fails loudly instead of producing a broken groupoid.

use std::collections::BTreeMap;

use crate::coset::{is_atlas, CosetError};
use crate::cosetgpd::CosetGroupoid;
use crate::report::CheckReport;
use crate::order::Ctx;
use crate::sections::SliceSection;
use crate::sets::{ElemSet, PointSet};
use crate::topo::{generate_topology, FiniteGroupoid, GroupoidBundle, GroupoidData, TopGroupoid};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error("bundle groupoid laws failed:\n{report}")]
    Laws { report: Box<CheckReport> },
    #[error("bundle structure disagrees with itself: {what}")]
    Inconsistent { what: String },
}

fn guard_pair(ctx: &Ctx, atlas: &ElemSet, a: usize, b: usize) -> Result<(), CosetError> {
    if !is_atlas(ctx, atlas) {
        return Err(CosetError::NotAtlas { set: atlas.to_vec() });
    }
    let up = ctx.up_closure(atlas);
    for x in [a, b] {
        if !up.contains(x) {
            return Err(CosetError::NotInUpClosure { element: x, set: atlas.to_vec() });
        }
    }
    Ok(())
}

/// Whether the atlas identifies a and b: some s, t in its dual have sat = sbt.
/// Both elements must lie in the up-closure of the atlas.
pub fn equivalent(ctx: &Ctx, atlas: &ElemSet, a: usize, b: usize) -> Result<bool, CosetError> {
    guard_pair(ctx, atlas, a, b)?;
    let star = ctx.dual(atlas);
    let mul = |x, y| ctx.s.sg.mul(x, y);
    let found = star
        .iter()
        .any(|s| star.iter().any(|t| mul(mul(s, a), t) == mul(mul(s, b), t)));
    Ok(found)
}

/// Orbit form: the two-sided central translates of a and of b intersect.
pub fn equivalent_by_orbit(
    ctx: &Ctx,
    atlas: &ElemSet,
    a: usize,
    b: usize,
) -> Result<bool, CosetError> {
    guard_pair(ctx, atlas, a, b)?;
    let zl = crate::coset::z_left(ctx, atlas);
    let zr = crate::coset::z_right(ctx, atlas);
    let orbit = |x: usize| {
        let xs = ElemSet::singleton(ctx.order(), x);
        ctx.set_mul(&ctx.set_mul(&zl, &xs), &zr)
    };
    Ok(orbit(a).intersects(&orbit(b)))
}

/// Single-witness form: some s in the dual has sa = sb inside the right
/// central set and as = bs inside the left one.
pub fn equivalent_by_witness(
    ctx: &Ctx,
    atlas: &ElemSet,
    a: usize,
    b: usize,
) -> Result<bool, CosetError> {
    guard_pair(ctx, atlas, a, b)?;
    let star = ctx.dual(atlas);
    let zl = crate::coset::z_left(ctx, atlas);
    let zr = crate::coset::z_right(ctx, atlas);
    let mul = |x, y| ctx.s.sg.mul(x, y);
    let found = star.iter().any(|s| {
        mul(s, a) == mul(s, b)
            && zr.contains(mul(s, a))
            && mul(a, s) == mul(b, s)
            && zl.contains(mul(a, s))
    });
    Ok(found)
}

/// Whether sub sits coinitially in the dual of the atlas: contained in it,
/// with up-closure recovering it exactly.
pub fn is_coinitial(ctx: &Ctx, sub: &ElemSet, atlas: &ElemSet) -> bool {
    let star = ctx.dual(atlas);
    sub.is_subset(&star) && ctx.up_closure(sub) == star
}

/// Restricted-witness form: some s in the given subset has as = bs. Agrees
/// with the other forms whenever the subset is coinitial in the dual.
pub fn equivalent_on(
    ctx: &Ctx,
    atlas: &ElemSet,
    sub: &ElemSet,
    a: usize,
    b: usize,
) -> Result<bool, CosetError> {
    guard_pair(ctx, atlas, a, b)?;
    let mul = |x, y| ctx.s.sg.mul(x, y);
    Ok(sub.iter().any(|s| mul(a, s) == mul(b, s)))
}

/// Evaluates the restricted-witness form against every coinitial subset at
/// once: None when the dual has no coinitial subset, otherwise whether each
/// one contains a witness s with as = bs.
///
/// A coinitial subset is a choice of elements of the dual whose up-rows stay
/// inside the dual and jointly cover it, so "some coinitial subset avoids the
/// witness set" reduces to one linear covering scan over the non-witnesses.
pub fn equivalent_on_every_coinitial(
    ctx: &Ctx,
    atlas: &ElemSet,
    a: usize,
    b: usize,
) -> Result<Option<bool>, CosetError> {
    guard_pair(ctx, atlas, a, b)?;
    let star = ctx.dual(atlas);
    let covers = |allowed: &dyn Fn(usize) -> bool| {
        let mut un = ElemSet::empty(ctx.order());
        for s in star.iter() {
            if allowed(s) && ctx.dom.up_row(s).is_subset(&star) {
                un = un.union(&ctx.dom.up_row(s));
            }
        }
        un == star
    };
    if !covers(&|_| true) {
        return Ok(None);
    }
    let mul = |x, y| ctx.s.sg.mul(x, y);
    let witnesses =
        ElemSet::from_iter(ctx.order(), star.iter().filter(|&s| mul(a, s) == mul(b, s)));
    Ok(Some(!covers(&|s| !witnesses.contains(s))))
}

/// Partition of a coset into its equivalence classes, ordered by mask. The
/// pairwise relation is checked to actually be an equivalence first.
pub fn equivalence_classes(ctx: &Ctx, coset: &ElemSet) -> Result<Vec<ElemSet>, BundleError> {
    let members: Vec<usize> = coset.to_vec();
    let k = members.len();
    let mut eq = vec![false; k * k];
    for i in 0..k {
        for j in 0..k {
            eq[i * k + j] = equivalent(ctx, coset, members[i], members[j])?;
        }
    }
    for i in 0..k {
        if !eq[i * k + i] {
            return Err(BundleError::Inconsistent {
                what: format!("relation on {} is not reflexive at {}", ctx.describe(coset), ctx.label(members[i])),
            });
        }
        for j in 0..k {
            if eq[i * k + j] != eq[j * k + i] {
                return Err(BundleError::Inconsistent {
                    what: format!("relation on {} is not symmetric", ctx.describe(coset)),
                });
            }
            for l in 0..k {
                if eq[i * k + j] && eq[j * k + l] && !eq[i * k + l] {
                    return Err(BundleError::Inconsistent {
                        what: format!("relation on {} is not transitive", ctx.describe(coset)),
                    });
                }
            }
        }
    }
    let mut classes: Vec<ElemSet> = Vec::new();
    let mut seen = vec![false; k];
    for i in 0..k {
        if seen[i] {
            continue;
        }
        let mut class = ElemSet::empty(ctx.order());
        for j in 0..k {
            if eq[i * k + j] {
                class.insert(members[j]);
                seen[j] = true;
            }
        }
        classes.push(class);
    }
    classes.sort();
    Ok(classes)
}

/// One point of the bundle: a class inside the fibre over a coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BundlePoint {
    pub coset: usize,
    pub class: ElemSet,
}

/// The class bundle over a coset groupoid, points ordered by (coset, class).
pub struct CosetBundle {
    pub cg: CosetGroupoid,
    pub points: Vec<BundlePoint>,
    pub bundle: GroupoidBundle,
    point_ids: BTreeMap<(usize, ElemSet), usize>,
}

impl CosetBundle {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// The class of element a in the fibre over the given coset.
    pub fn class_of(&self, coset: usize, a: usize) -> Option<ElemSet> {
        if !self.cg.members(coset).contains(a) {
            return None;
        }
        self.points
            .iter()
            .find(|p| p.coset == coset && p.class.contains(a))
            .map(|p| p.class)
    }

    pub fn point_id(&self, coset: usize, a: usize) -> Option<usize> {
        let class = self.class_of(coset, a)?;
        self.point_ids.get(&(coset, class)).copied()
    }

    pub fn describe_point(&self, p: usize) -> &str {
        self.bundle.total.gpd.label(p)
    }

    pub fn export_json(&self) -> serde_json::Value {
        let ctx = &self.cg.ctx;
        let points: Vec<serde_json::Value> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                serde_json::json!({
                    "id": i,
                    "coset": ctx.describe(self.cg.members(p.coset)),
                    "class": ctx.describe(&p.class),
                    "unit": self.bundle.total.gpd.is_unit(i),
                })
            })
            .collect();
        serde_json::json!({
            "points": self.points.len(),
            "fibres": self.cg.size(),
            "table": points,
        })
    }
}

/// Builds the class bundle over an already built coset groupoid.
///
/// The product of classes is computed from one representative pair and then
/// cross-checked against every other pair; the inverse is computed from every
/// admissible witness and all of them must land in the same class; the unit
/// over each unit coset must be the class holding its central absorbers. Any
/// disagreement is an error, not a silent repair.
pub fn build_coset_bundle(cg: CosetGroupoid) -> Result<CosetBundle, BundleError> {
    let ctx = &cg.ctx;
    let mut points: Vec<BundlePoint> = Vec::new();
    for c in 0..cg.size() {
        let classes = equivalence_classes(ctx, cg.members(c))?;
        let mut union = ElemSet::empty(ctx.order());
        for class in &classes {
            if union.intersects(class) {
                return Err(BundleError::Inconsistent {
                    what: format!("classes overlap in fibre {}", ctx.describe(cg.members(c))),
                });
            }
            union = union.union(class);
            points.push(BundlePoint { coset: c, class: *class });
        }
        if union != *cg.members(c) {
            return Err(BundleError::Inconsistent {
                what: format!("classes do not cover fibre {}", ctx.describe(cg.members(c))),
            });
        }
    }
    points.sort();
    let n = points.len();
    let point_ids: BTreeMap<(usize, ElemSet), usize> =
        points.iter().enumerate().map(|(i, p)| ((p.coset, p.class), i)).collect();
    let class_at = |coset: usize, a: usize| -> Option<usize> {
        points
            .iter()
            .position(|p| p.coset == coset && p.class.contains(a))
    };

    let mut prod: Vec<Option<usize>> = vec![None; n * n];
    for p in 0..n {
        for q in 0..n {
            let (ca, cb) = (points[p].coset, points[q].coset);
            let Some(cab) = cg.tg.gpd.prod(ca, cb) else { continue };
            let mut out: Option<usize> = None;
            for a in points[p].class.iter() {
                for b in points[q].class.iter() {
                    let Some(r) = class_at(cab, ctx.s.sg.mul(a, b)) else {
                        return Err(BundleError::Inconsistent {
                            what: format!(
                                "product {}{} escapes fibre {}",
                                ctx.label(a),
                                ctx.label(b),
                                ctx.describe(cg.members(cab))
                            ),
                        });
                    };
                    if *out.get_or_insert(r) != r {
                        return Err(BundleError::Inconsistent {
                            what: format!(
                                "product of classes over {} and {} depends on representatives",
                                ctx.describe(cg.members(ca)),
                                ctx.describe(cg.members(cb))
                            ),
                        });
                    }
                }
            }
            prod[p * n + q] = out;
        }
    }

    let mut inv = vec![0usize; n];
    for p in 0..n {
        let c = points[p].coset;
        let cstar = cg.tg.gpd.inv(c);
        let mut out: Option<usize> = None;
        let mut found = false;
        for a in points[p].class.iter() {
            for d in cg.members(c).iter() {
                for w in ctx.dom.witnesses(d, a).iter() {
                    found = true;
                    let Some(r) = class_at(cstar, w) else {
                        return Err(BundleError::Inconsistent {
                            what: format!(
                                "inverse witness {} escapes the dual fibre {}",
                                ctx.label(w),
                                ctx.describe(cg.members(cstar))
                            ),
                        });
                    };
                    if *out.get_or_insert(r) != r {
                        return Err(BundleError::Inconsistent {
                            what: format!(
                                "inverse of a class over {} depends on the witness",
                                ctx.describe(cg.members(c))
                            ),
                        });
                    }
                }
            }
        }
        match (found, out) {
            (true, Some(r)) => inv[p] = r,
            _ => {
                return Err(BundleError::Inconsistent {
                    what: format!("no inverse witness over {}", ctx.describe(cg.members(c))),
                })
            }
        }
    }

    let labels: Vec<String> = points
        .iter()
        .map(|p| {
            let rep = p.class.iter().next().expect("classes are non-empty");
            format!("[{}]{}", ctx.label(rep), ctx.describe(cg.members(p.coset)))
        })
        .collect();
    let gpd = FiniteGroupoid::from_data(GroupoidData {
        size: n,
        inv,
        prod,
        labels: Some(labels),
    })
    .map_err(|report| BundleError::Laws { report })?;

    // The unit over a unit coset must be the class of its central absorbers.
    for (c, rec) in cg.cosets.iter().enumerate() {
        if !rec.is_unit {
            continue;
        }
        if rec.z_right.is_empty() || !rec.z_right.is_subset(&rec.members) {
            return Err(BundleError::Inconsistent {
                what: format!(
                    "unit fibre {} lacks internal central absorbers",
                    ctx.describe(&rec.members)
                ),
            });
        }
        let mut unit_point: Option<usize> = None;
        for z in rec.z_right.iter() {
            let r = class_at(c, z).expect("central absorbers lie in the fibre");
            if *unit_point.get_or_insert(r) != r {
                return Err(BundleError::Inconsistent {
                    what: format!(
                        "central absorbers of {} split across classes",
                        ctx.describe(&rec.members)
                    ),
                });
            }
        }
        let u = unit_point.unwrap();
        if !gpd.is_unit(u) {
            return Err(BundleError::Inconsistent {
                what: format!(
                    "class of central absorbers over {} is not a unit",
                    ctx.describe(&rec.members)
                ),
            });
        }
    }
    let unit_fibres = points
        .iter()
        .enumerate()
        .filter(|(i, _)| gpd.is_unit(*i))
        .map(|(_, p)| p.coset)
        .collect::<Vec<_>>();
    for &c in &unit_fibres {
        if !cg.cosets[c].is_unit {
            return Err(BundleError::Inconsistent {
                what: format!("unit point over non-unit fibre {}", ctx.describe(cg.members(c))),
            });
        }
    }

    // Subbasis: for each element, the points whose class contains it and the
    // points whose fibre contains it (the projection preimage of a slice).
    let mut subbasis: Vec<PointSet> = Vec::new();
    for s in 0..ctx.order() {
        subbasis.push(PointSet::from_iter(
            n,
            points
                .iter()
                .enumerate()
                .filter(|(_, p)| p.class.contains(s))
                .map(|(i, _)| i),
        ));
        subbasis.push(PointSet::from_iter(
            n,
            points
                .iter()
                .enumerate()
                .filter(|(_, p)| cg.members(p.coset).contains(s))
                .map(|(i, _)| i),
        ));
    }
    let top = generate_topology(n, subbasis);
    let proj: Vec<usize> = points.iter().map(|p| p.coset).collect();
    let bundle = GroupoidBundle {
        total: TopGroupoid { gpd, top },
        base: cg.tg.clone(),
        proj,
    };
    Ok(CosetBundle { cg, points, bundle, point_ids })
}

/// The canonical sections of the class bundle: element a is defined on the
/// cosets containing it and sends each to the class of a there.
pub struct BundleRepresentation {
    pub sections: Vec<SliceSection>,
    /// Set when the central set is not symmetric; the sections still lift and
    /// stay continuous, but multiplicativity is only guaranteed under symmetry.
    pub symmetry_warning: bool,
}

pub fn bundle_representation(cb: &CosetBundle) -> BundleRepresentation {
    let n = cb.cg.ctx.order();
    let mut sections = Vec::with_capacity(n);
    for a in 0..n {
        let mut values = BTreeMap::new();
        for c in 0..cb.cg.size() {
            if cb.cg.members(c).contains(a) {
                values.insert(c, cb.point_id(c, a).expect("member has a class"));
            }
        }
        sections.push(SliceSection { values });
    }
    BundleRepresentation {
        sections,
        symmetry_warning: !cb.cg.ctx.s.flags.z_symmetric,
    }
}

/// Separation outcome: every pair of distinct elements must admit a coset
/// containing at least one of them and not identifying them.
pub struct Faithfulness {
    pub faithful: bool,
    pub witness: Option<(usize, usize)>,
    pub symmetry_warning: bool,
}

pub fn check_faithful(cb: &CosetBundle) -> Faithfulness {
    let n = cb.cg.ctx.order();
    let mut witness = None;
    'pairs: for a in 0..n {
        for b in a + 1..n {
            let mut separated = false;
            for c in 0..cb.cg.size() {
                let ha = cb.cg.members(c).contains(a);
                let hb = cb.cg.members(c).contains(b);
                if ha != hb || (ha && hb && cb.point_id(c, a) != cb.point_id(c, b)) {
                    separated = true;
                    break;
                }
            }
            if !separated {
                witness = Some((a, b));
                break 'pairs;
            }
        }
    }
    Faithfulness {
        faithful: witness.is_none(),
        witness,
        symmetry_warning: !cb.cg.ctx.s.flags.z_symmetric,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::all_atlases;
    use crate::cosetgpd::{build_coset_groupoid, coset_representation};
    use crate::fixtures::{structured_fixture, structured_fixtures};
    use crate::sections::{check_slice_section, section_product};
    use crate::topo::{check_bundle, check_etale_bundle};

    fn bundle_for(name: &str) -> CosetBundle {
        let ctx = Ctx::new(structured_fixture(name).unwrap());
        build_coset_bundle(build_coset_groupoid(ctx).unwrap()).unwrap()
    }

    #[test]
    fn guards_reject_bad_inputs() {
        let ctx = Ctx::new(structured_fixture("z3").unwrap());
        let not_atlas = ElemSet::from_iter(3, [1, 2]);
        assert!(matches!(
            equivalent(&ctx, &not_atlas, 1, 2),
            Err(CosetError::NotAtlas { .. })
        ));
        let g_only = ElemSet::singleton(3, 1);
        assert!(matches!(
            equivalent(&ctx, &g_only, 0, 1),
            Err(CosetError::NotInUpClosure { element: 0, .. })
        ));
    }

    #[test]
    fn null_semigroup_collapses_to_a_point() {
        let cb = bundle_for("null");
        assert_eq!(cb.size(), 1);
        assert!(cb.bundle.total.gpd.is_unit(0));
        let faith = check_faithful(&cb);
        assert!(!faith.faithful);
        assert_eq!(faith.witness, Some((0, 1)));
        let rep = bundle_representation(&cb);
        assert_eq!(rep.sections[0], rep.sections[1]);
    }

    #[test]
    fn cyclic_group_bundle_structure() {
        let cb = bundle_for("z3");
        // Fibres: {e}, {g}, {g2} with one class each, S with three.
        assert_eq!(cb.size(), 6);
        let sizes: Vec<usize> = (0..4)
            .map(|c| cb.points.iter().filter(|p| p.coset == c).count())
            .collect();
        assert_eq!(sizes, vec![1, 1, 1, 3]);
        let g = &cb.bundle.total.gpd;
        assert!(g.is_unit(0));
        assert!(g.is_unit(3));
        assert_eq!(g.units().to_vec(), vec![0, 3]);
        // [g,{g}][g,{g}] lands in the fibre over {g2}.
        assert_eq!(g.prod(1, 1), Some(2));
        // [g,S][g,S] = [g2,S], and its inverse swaps class within the fibre.
        assert_eq!(g.prod(4, 4), Some(5));
        assert_eq!(g.inv(4), 5);
        assert_eq!(g.prod(4, 5), Some(3));
        assert!(check_faithful(&cb).faithful);
    }

    #[test]
    fn semilattice_fibres_collapse_to_units() {
        for (name, expected) in [("chain3", 3), ("ps2", 4)] {
            let cb = bundle_for(name);
            assert_eq!(cb.size(), expected, "{name}");
            for p in 0..cb.size() {
                assert!(cb.bundle.total.gpd.is_unit(p), "{name} point {p}");
            }
            assert!(check_faithful(&cb).faithful, "{name}");
        }
    }

    #[test]
    fn equivalence_forms_agree() {
        for (name, s) in structured_fixtures() {
            let ctx = Ctx::new(s);
            let atlases = if ctx.order() <= 4 {
                all_atlases(&ctx).unwrap()
            } else {
                crate::coset::all_cosets(&ctx)
                    .unwrap()
                    .into_iter()
                    .map(|r| r.members)
                    .collect()
            };
            for atlas in atlases {
                if atlas.is_empty() {
                    continue;
                }
                let up = ctx.up_closure(&atlas);
                let star = ctx.dual(&atlas);
                for a in up.iter() {
                    for b in up.iter() {
                        let plain = equivalent(&ctx, &atlas, a, b).unwrap();
                        assert_eq!(
                            plain,
                            equivalent_by_orbit(&ctx, &atlas, a, b).unwrap(),
                            "{name} orbit form on {} at {a},{b}",
                            ctx.describe(&atlas)
                        );
                        assert_eq!(
                            plain,
                            equivalent_by_witness(&ctx, &atlas, a, b).unwrap(),
                            "{name} witness form on {} at {a},{b}",
                            ctx.describe(&atlas)
                        );
                        if is_coinitial(&ctx, &star, &atlas) {
                            assert_eq!(
                                plain,
                                equivalent_on(&ctx, &atlas, &star, a, b).unwrap(),
                                "{name} dual-restricted form on {}",
                                ctx.describe(&atlas)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coinitial_collapse_matches_subset_enumeration() {
        for (name, s) in structured_fixtures() {
            let ctx = Ctx::new(s);
            for rec in crate::coset::all_cosets(&ctx).unwrap() {
                let atlas = rec.members;
                let star = ctx.dual(&atlas);
                let sv = star.to_vec();
                if sv.len() > 10 {
                    continue;
                }
                let mut coinitials: Vec<ElemSet> = Vec::new();
                for bits in 0..(1u64 << sv.len()) {
                    let sub = ElemSet::from_iter(
                        ctx.order(),
                        sv.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &s)| s),
                    );
                    if is_coinitial(&ctx, &sub, &atlas) {
                        coinitials.push(sub);
                    }
                }
                for a in atlas.iter() {
                    for b in atlas.iter() {
                        let plain = equivalent(&ctx, &atlas, a, b).unwrap();
                        // Each coinitial subset decides the relation on its own.
                        for sub in &coinitials {
                            assert_eq!(
                                plain,
                                equivalent_on(&ctx, &atlas, sub, a, b).unwrap(),
                                "{name} subset {} of {}",
                                ctx.describe(sub),
                                ctx.describe(&atlas)
                            );
                        }
                        let all = equivalent_on_every_coinitial(&ctx, &atlas, a, b).unwrap();
                        let oracle = if coinitials.is_empty() {
                            None
                        } else {
                            Some(coinitials.iter().all(|sub| {
                                equivalent_on(&ctx, &atlas, sub, a, b).unwrap()
                            }))
                        };
                        assert_eq!(all, oracle, "{name} collapse on {}", ctx.describe(&atlas));
                    }
                }
            }
        }
    }

    #[test]
    fn every_fixture_bundle_is_etale() {
        for (name, s) in structured_fixtures() {
            let cb = bundle_for(name);
            let _ = s;
            check_bundle(&cb.bundle).expect_clean();
            check_etale_bundle(&cb.bundle).expect_clean();
            for c in 0..cb.cg.size() {
                let mut union = ElemSet::empty(cb.cg.ctx.order());
                for p in cb.points.iter().filter(|p| p.coset == c) {
                    assert!(!union.intersects(&p.class), "{name} fibre {c} overlaps");
                    union = union.union(&p.class);
                }
                assert_eq!(union, *cb.cg.members(c), "{name} fibre {c} cover");
            }
        }
    }

    #[test]
    fn canonical_sections_lift_and_multiply() {
        for (name, _) in structured_fixtures() {
            let cb = bundle_for(name);
            let rep = bundle_representation(&cb);
            assert!(!rep.symmetry_warning, "{name}");
            let n = cb.cg.ctx.order();
            let domains = coset_representation(&cb.cg);
            for a in 0..n {
                check_slice_section(&cb.bundle, &rep.sections[a]).expect_clean();
                assert_eq!(
                    rep.sections[a].domain(cb.cg.size()),
                    domains.assign[a],
                    "{name} domain of section {a}"
                );
            }
            for a in 0..n {
                for b in 0..n {
                    let ab = cb.cg.ctx.s.sg.mul(a, b);
                    let prod = section_product(&cb.bundle, &rep.sections[a], &rep.sections[b])
                        .unwrap();
                    assert_eq!(prod, rep.sections[ab], "{name}: section product at {a},{b}");
                }
            }
        }
    }

    #[test]
    fn faithfulness_matches_section_injectivity() {
        for (name, _) in structured_fixtures() {
            let cb = bundle_for(name);
            let faith = check_faithful(&cb);
            let rep = bundle_representation(&cb);
            let mut injective = true;
            for a in 0..rep.sections.len() {
                for b in a + 1..rep.sections.len() {
                    if rep.sections[a] == rep.sections[b] {
                        injective = false;
                    }
                }
            }
            assert_eq!(faith.faithful, injective, "{name}");
            assert_eq!(faith.faithful, name != "null", "{name}");
        }
    }

    #[test]
    fn unit_points_are_classes_of_central_absorbers() {
        for (name, _) in structured_fixtures() {
            let cb = bundle_for(name);
            for (i, p) in cb.points.iter().enumerate() {
                let rec = &cb.cg.cosets[p.coset];
                let expected = rec.is_unit && p.class.intersects(&rec.z_right);
                assert_eq!(
                    cb.bundle.total.gpd.is_unit(i),
                    expected,
                    "{name} point {i}"
                );
            }
        }
    }

    #[test]
    fn export_is_deterministic() {
        let a = bundle_for("z3").export_json().to_string();
        let b = bundle_for("z3").export_json().to_string();
        assert_eq!(a, b);
        assert!(a.contains("\"points\":6"));
    }
}
