//! Relations between groupoids and the factorizations they carry.
//!
//! A relation between two topological groupoids is kept as an explicit pair
//! set and interrogated for the morphism laws: functoriality, the star
//! conditions, continuity. Bundles pull back along such relations, a base
//! relation paired with a fibre map transports slice-sections, and the coset
//! machinery factors any lawful representation through the canonical ones,
//! with every factor pinned down pointwise.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::bundle::{bundle_representation, CosetBundle};
use crate::cosetgpd::{is_etale_representation, CosetGroupoid};
use crate::filters::{
    directed_subgroupoid, restrict_top_groupoid, triangle, FilterError, SubGroupoid,
};
use crate::order::Ctx;
use crate::report::CheckReport;
use crate::sections::{check_slice_section, section_product, SliceSection};
use crate::semigroup::MAX_RELATION_PAIRS;
use crate::sets::{ElemSet, PointSet};
use crate::topo::{
    generate_topology, is_slice, FiniteGroupoid, GroupoidBundle, GroupoidData, TopGroupoid,
};

#[derive(Debug, Error)]
pub enum MorphError {
    #[error("pair ({g}, {h}) out of range for carriers of sizes {left} and {right}")]
    PairOutOfRange { g: usize, h: usize, left: usize, right: usize },
    #[error("carrier mismatch: {what}")]
    Mismatch { what: String },
    #[error("assignment is not an etale representation:\n{report}")]
    NotRepresentation { report: Box<CheckReport> },
    #[error("factorization needs the symmetric product condition on the inner subsemigroup")]
    SymmetryRequired,
    #[error("the pair fails the bundle-morphism laws:\n{report}")]
    NotPierce { report: Box<CheckReport> },
    #[error("pulled-back carrier fails the groupoid laws:\n{report}")]
    Laws { report: Box<CheckReport> },
    #[error("inconsistent data: {what}")]
    Inconsistent { what: String },
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// A relation between the carriers of two topological groupoids, stored as an
/// explicit pair set. A pair (g, h) has g on the left carrier; composition
/// follows the pairs right to left, so a relation with singleton fibres over
/// the right carrier reads as a partial map from right to left.
#[derive(Clone, Debug)]
pub struct GroupoidRelation {
    pub left: TopGroupoid,
    pub right: TopGroupoid,
    pairs: BTreeSet<(usize, usize)>,
}

impl GroupoidRelation {
    pub fn new(
        left: TopGroupoid,
        right: TopGroupoid,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, MorphError> {
        let (nl, nr) = (left.gpd.size(), right.gpd.size());
        let mut set = BTreeSet::new();
        for (g, h) in pairs {
            if g >= nl || h >= nr {
                return Err(MorphError::PairOutOfRange { g, h, left: nl, right: nr });
            }
            set.insert((g, h));
        }
        Ok(GroupoidRelation { left, right, pairs: set })
    }

    pub fn identity(tg: &TopGroupoid) -> Self {
        let pairs = (0..tg.gpd.size()).map(|g| (g, g)).collect();
        GroupoidRelation { left: tg.clone(), right: tg.clone(), pairs }
    }

    /// Graph of a partial map from the right carrier into the left one.
    pub fn graph(
        left: TopGroupoid,
        right: TopGroupoid,
        map: &BTreeMap<usize, usize>,
    ) -> Result<Self, MorphError> {
        Self::new(left, right, map.iter().map(|(&h, &g)| (g, h)))
    }

    pub fn holds(&self, g: usize, h: usize) -> bool {
        self.pairs.contains(&(g, h))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn flip(&self) -> Self {
        GroupoidRelation {
            left: self.right.clone(),
            right: self.left.clone(),
            pairs: self.pairs.iter().map(|&(g, h)| (h, g)).collect(),
        }
    }

    /// Image of a subset of the right carrier.
    pub fn image(&self, set: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.left.gpd.size());
        for &(g, h) in &self.pairs {
            if set.contains(h) {
                out.insert(g);
            }
        }
        out
    }

    /// Preimage of a subset of the left carrier.
    pub fn preimage(&self, set: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.right.gpd.size());
        for &(g, h) in &self.pairs {
            if set.contains(g) {
                out.insert(h);
            }
        }
        out
    }

    pub fn domain(&self) -> PointSet {
        self.preimage(&PointSet::full(self.left.gpd.size()))
    }

    pub fn range(&self) -> PointSet {
        self.image(&PointSet::full(self.right.gpd.size()))
    }

    /// Pairs (g, i) with g related to some h here and h related to i in the
    /// other relation; the shared carrier sizes must match.
    pub fn compose(&self, other: &GroupoidRelation) -> Result<GroupoidRelation, MorphError> {
        if self.right.gpd.size() != other.left.gpd.size() {
            return Err(MorphError::Mismatch {
                what: format!(
                    "composition joins carriers of sizes {} and {}",
                    self.right.gpd.size(),
                    other.left.gpd.size()
                ),
            });
        }
        let mut pairs = BTreeSet::new();
        for &(g, h) in &self.pairs {
            for &(h2, i) in &other.pairs {
                if h == h2 {
                    pairs.insert((g, i));
                }
            }
        }
        Ok(GroupoidRelation { left: self.left.clone(), right: other.right.clone(), pairs })
    }

    /// At most one left partner per right element.
    pub fn is_function(&self) -> bool {
        let mut seen = vec![false; self.right.gpd.size()];
        for &(_, h) in &self.pairs {
            if seen[h] {
                return false;
            }
            seen[h] = true;
        }
        true
    }

    /// The underlying partial map right to left, when there is one.
    pub fn as_function(&self) -> Option<BTreeMap<usize, usize>> {
        let mut map = BTreeMap::new();
        for &(g, h) in &self.pairs {
            if map.insert(h, g).is_some() {
                return None;
            }
        }
        Some(map)
    }

    /// Pairs close under inverses, and left products track right products on
    /// composable pairs. Between spaces this already forces functionality:
    /// two pairs sharing a right unit would need a left product of two
    /// distinct units.
    pub fn functorial_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("functorial");
        let lg = &self.left.gpd;
        let rg = &self.right.gpd;
        for &(g, h) in &self.pairs {
            rep.check(self.holds(lg.inv(g), rg.inv(h)), "inverse-pair", || {
                format!(
                    "({}, {}) related but ({}, {}) not",
                    lg.label(g),
                    rg.label(h),
                    lg.label(lg.inv(g)),
                    rg.label(rg.inv(h))
                )
            });
        }
        for &(g, h) in &self.pairs {
            for &(g2, h2) in &self.pairs {
                if rg.composable(h, h2) {
                    let ok = match (lg.prod(g, g2), rg.prod(h, h2)) {
                        (Some(gg), Some(hh)) => self.holds(gg, hh),
                        _ => false,
                    };
                    rep.check(ok, "product-pair", || {
                        format!(
                            "{} {} composes on the right but {} {} does not track it",
                            rg.label(h),
                            rg.label(h2),
                            lg.label(g),
                            lg.label(g2)
                        )
                    });
                }
            }
        }
        rep
    }

    /// Rows (g, h, count): for each left g and right unit h with r(g)
    /// related to h, the number of right elements i with range h lifting g.
    fn star_fibre_counts(&self) -> Vec<(usize, usize, usize)> {
        let lg = &self.left.gpd;
        let rg = &self.right.gpd;
        let mut rows = Vec::new();
        for h in rg.units().iter() {
            for g in 0..lg.size() {
                if !self.holds(lg.rng(g), h) {
                    continue;
                }
                let count =
                    (0..rg.size()).filter(|&i| rg.rng(i) == h && self.holds(g, i)).count();
                rows.push((g, h, count));
            }
        }
        rows
    }

    pub fn star_injective_by_count(&self) -> bool {
        self.star_fibre_counts().iter().all(|&(_, _, c)| c <= 1)
    }

    pub fn star_surjective_by_count(&self) -> bool {
        self.star_fibre_counts().iter().all(|&(_, _, c)| c >= 1)
    }

    /// The preimage of the left units stays inside the right units.
    pub fn unit_preimages_are_units(&self) -> bool {
        self.preimage(self.left.gpd.units()).is_subset(self.right.gpd.units())
    }

    /// Preimages of singletons, hence of all slices, are slices.
    pub fn slice_preimages_are_slices(&self) -> bool {
        let nl = self.left.gpd.size();
        (0..nl).all(|g| is_slice(&self.right.gpd, &self.preimage(&PointSet::singleton(nl, g))))
    }

    /// The preimage of a product of singletons is the product of the
    /// preimages; unions extend this to arbitrary subsets.
    pub fn preimage_splits_products(&self) -> bool {
        let lg = &self.left.gpd;
        let rg = &self.right.gpd;
        let nl = lg.size();
        for a in 0..nl {
            for b in 0..nl {
                let lhs = match lg.prod(a, b) {
                    Some(ab) => self.preimage(&PointSet::singleton(nl, ab)),
                    None => PointSet::empty(rg.size()),
                };
                let rhs = rg.set_prod(
                    &self.preimage(&PointSet::singleton(nl, a)),
                    &self.preimage(&PointSet::singleton(nl, b)),
                );
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Products with one factor in the range land in the range. Every
    /// functorial star-surjective relation has this; the converse fails, so
    /// only the one direction is ever asserted.
    pub fn range_is_ideal(&self) -> bool {
        let lg = &self.left.gpd;
        let ran = self.range();
        for g in 0..lg.size() {
            for h in 0..lg.size() {
                if let Some(gh) = lg.prod(g, h) {
                    if (ran.contains(g) || ran.contains(h)) && !ran.contains(gh) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Lift counts stay at most one; on functorial relations the two
    /// set-level characterizations must agree with the count.
    pub fn star_injective_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("star-injective");
        let rows = self.star_fibre_counts();
        for &(g, h, c) in &rows {
            rep.check(c <= 1, "unique-lift", || {
                format!(
                    "{} has {} lifts at unit {}",
                    self.left.gpd.label(g),
                    c,
                    self.right.gpd.label(h)
                )
            });
        }
        if self.functorial_report().passed() {
            let by_count = rows.iter().all(|&(_, _, c)| c <= 1);
            rep.check(
                self.unit_preimages_are_units() == by_count,
                "agrees-with-unit-preimage",
                || "unit-preimage characterization disagrees with the lift count".into(),
            );
            rep.check(
                self.slice_preimages_are_slices() == by_count,
                "agrees-with-slice-preimage",
                || "slice-preimage characterization disagrees with the lift count".into(),
            );
        }
        rep
    }

    /// Lift counts stay at least one; on functorial relations the product
    /// splitting must agree with the count, and the range must then absorb
    /// products.
    pub fn star_surjective_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("star-surjective");
        let rows = self.star_fibre_counts();
        for &(g, h, c) in &rows {
            rep.check(c >= 1, "existing-lift", || {
                format!(
                    "{} has no lift at unit {}",
                    self.left.gpd.label(g),
                    self.right.gpd.label(h)
                )
            });
        }
        if self.functorial_report().passed() {
            let by_count = rows.iter().all(|&(_, _, c)| c >= 1);
            rep.check(
                self.preimage_splits_products() == by_count,
                "agrees-with-product-preimage",
                || "product-preimage characterization disagrees with the lift count".into(),
            );
            if by_count {
                rep.check(self.range_is_ideal(), "range-ideal", || {
                    "range fails to absorb products".into()
                });
            }
        }
        rep
    }

    /// Preimages of opens are open. Relational preimages commute with
    /// unions, so the basis settles every open; the full lattice is swept
    /// again whenever it is small enough to materialize.
    pub fn continuity_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("continuous");
        for b in self.left.top.basis() {
            rep.check(self.right.top.is_open(&self.preimage(&b)), "preimage-open", || {
                format!("preimage of basic open {:?} is not open", b.to_vec())
            });
        }
        if let Some(opens) = self.left.top.opens() {
            for o in opens {
                rep.check(self.right.top.is_open(&self.preimage(&o)), "preimage-open-full", || {
                    format!("preimage of open {:?} is not open", o.to_vec())
                });
            }
        }
        rep
    }

    pub fn is_continuous(&self) -> bool {
        self.continuity_report().passed()
    }

    /// Images of opens are open.
    pub fn is_open_relation(&self) -> bool {
        self.right.top.basis().iter().all(|b| self.left.top.is_open(&self.image(b)))
    }

    /// Functorial, star-bijective and continuous: the relations that compose
    /// as morphisms of etale groupoids.
    pub fn zakrzewski_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("zakrzewski");
        rep.merge(self.functorial_report());
        rep.merge(self.star_injective_report());
        rep.merge(self.star_surjective_report());
        rep.merge(self.continuity_report());
        rep
    }

    pub fn is_zakrzewski(&self) -> bool {
        self.zakrzewski_report().passed()
    }

    /// A functional relation passing the morphism laws.
    pub fn is_etale_morphism(&self) -> bool {
        self.is_function() && self.is_zakrzewski()
    }

    /// Cut down to any single slice on the left, the pair set reads as a
    /// partial function off the right carrier. Singletons and the basic open
    /// slices stand in for all slices.
    pub fn slice_restriction_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("slice-restriction");
        let nl = self.left.gpd.size();
        let mut slices: Vec<PointSet> = (0..nl).map(|g| PointSet::singleton(nl, g)).collect();
        for b in self.left.top.basis() {
            if is_slice(&self.left.gpd, &b) {
                slices.push(b);
            }
        }
        for b in &slices {
            for h in 0..self.right.gpd.size() {
                let c = b.iter().filter(|&g| self.holds(g, h)).count();
                rep.check(c <= 1, "functional-on-slices", || {
                    format!(
                        "slice {:?} relates {} left elements to {}",
                        b.to_vec(),
                        c,
                        self.right.gpd.label(h)
                    )
                });
            }
        }
        rep
    }
}

/// A bundle pulled back along a relation into its base: points are pairs of
/// a total element and a right-carrier element related to its shadow,
/// multiplied componentwise under the cylinder topology of both factors.
pub struct PullbackBundle {
    pub points: Vec<(usize, usize)>,
    pub bundle: GroupoidBundle,
    index: BTreeMap<(usize, usize), usize>,
}

impl PullbackBundle {
    pub fn point_id(&self, f: usize, h: usize) -> Option<usize> {
        self.index.get(&(f, h)).copied()
    }
}

pub fn pullback_bundle(
    pi: &GroupoidBundle,
    phi: &GroupoidRelation,
) -> Result<PullbackBundle, MorphError> {
    if phi.left.gpd.size() != pi.base.gpd.size() {
        return Err(MorphError::Mismatch {
            what: format!(
                "relation expects a base of size {}, bundle has {}",
                phi.left.gpd.size(),
                pi.base.gpd.size()
            ),
        });
    }
    let ft = &pi.total.gpd;
    let hg = &phi.right.gpd;
    let mut points = Vec::new();
    let mut index = BTreeMap::new();
    for f in 0..ft.size() {
        for h in 0..hg.size() {
            if phi.holds(pi.proj[f], h) {
                index.insert((f, h), points.len());
                points.push((f, h));
            }
        }
    }
    let k = points.len();
    let mut inv = vec![0usize; k];
    let mut prod = vec![None; k * k];
    for (p, &(f, h)) in points.iter().enumerate() {
        inv[p] = *index.get(&(ft.inv(f), hg.inv(h))).ok_or_else(|| MorphError::Inconsistent {
            what: format!(
                "inverse of ({}, {}) leaves the pulled-back carrier",
                ft.label(f),
                hg.label(h)
            ),
        })?;
    }
    for (p, &(f, h)) in points.iter().enumerate() {
        for (q, &(f2, h2)) in points.iter().enumerate() {
            if let Some(hh) = hg.prod(h, h2) {
                let ff = ft.prod(f, f2).ok_or_else(|| MorphError::Inconsistent {
                    what: format!(
                        "({}, {}) and ({}, {}) compose on the right only",
                        ft.label(f),
                        hg.label(h),
                        ft.label(f2),
                        hg.label(h2)
                    ),
                })?;
                prod[p * k + q] =
                    Some(*index.get(&(ff, hh)).ok_or_else(|| MorphError::Inconsistent {
                        what: format!(
                            "product of ({}, {}) and ({}, {}) leaves the pulled-back carrier",
                            ft.label(f),
                            hg.label(h),
                            ft.label(f2),
                            hg.label(h2)
                        ),
                    })?);
            }
        }
    }
    let labels: Vec<String> =
        points.iter().map(|&(f, h)| format!("({}, {})", ft.label(f), hg.label(h))).collect();
    let gpd = FiniteGroupoid::from_data(GroupoidData { size: k, inv, prod, labels: Some(labels) })
        .map_err(|report| MorphError::Laws { report })?;
    let mut subbasis = Vec::new();
    for s in pi.total.top.subbasis() {
        subbasis.push(PointSet::from_iter(
            k,
            points.iter().enumerate().filter(|(_, &(f, _))| s.contains(f)).map(|(p, _)| p),
        ));
    }
    for s in phi.right.top.subbasis() {
        subbasis.push(PointSet::from_iter(
            k,
            points.iter().enumerate().filter(|(_, &(_, h))| s.contains(h)).map(|(p, _)| p),
        ));
    }
    let total = TopGroupoid { gpd, top: generate_topology(k, subbasis) };
    let proj = points.iter().map(|&(_, h)| h).collect();
    let bundle = GroupoidBundle { total, base: phi.right.clone(), proj };
    Ok(PullbackBundle { points, bundle, index })
}

/// A relation between the bases together with a fibre map off the pullback;
/// the two must commute over the right base, and the map must be a
/// continuous functor. Transports slice-sections of the source bundle to the
/// target bundle.
pub struct PierceMorphism {
    pub source: GroupoidBundle,
    pub target: GroupoidBundle,
    pub phi: GroupoidRelation,
    pub pullback: PullbackBundle,
    pub tau: Vec<usize>,
}

/// Builds the pullback, evaluates the fibre map on its points, and refuses
/// the pair unless every morphism law holds.
pub fn pierce(
    source: &GroupoidBundle,
    target: &GroupoidBundle,
    phi: &GroupoidRelation,
    mut tau: impl FnMut(usize, usize) -> Result<usize, MorphError>,
) -> Result<PierceMorphism, MorphError> {
    let pullback = pullback_bundle(source, phi)?;
    let mut values = Vec::with_capacity(pullback.points.len());
    for &(f, h) in &pullback.points {
        let v = tau(f, h)?;
        if v >= target.total.gpd.size() {
            return Err(MorphError::Mismatch {
                what: format!("fibre map sends ({f}, {h}) outside the target carrier"),
            });
        }
        values.push(v);
    }
    let m = PierceMorphism {
        source: source.clone(),
        target: target.clone(),
        phi: phi.clone(),
        pullback,
        tau: values,
    };
    let rep = m.report();
    if !rep.passed() {
        return Err(MorphError::NotPierce { report: Box::new(rep) });
    }
    Ok(m)
}

pub fn identity_pierce(bundle: &GroupoidBundle) -> Result<PierceMorphism, MorphError> {
    pierce(bundle, bundle, &GroupoidRelation::identity(&bundle.base), |f, _| Ok(f))
}

impl PierceMorphism {
    pub fn report(&self) -> CheckReport {
        let mut rep = CheckReport::new("bundle-morphism");
        rep.merge(self.phi.zakrzewski_report());
        let pg = &self.pullback.bundle.total.gpd;
        let tt = &self.target.total.gpd;
        for p in 0..pg.size() {
            rep.check(self.tau[pg.inv(p)] == tt.inv(self.tau[p]), "map-inverse", || {
                format!("fibre map does not commute with inversion at {}", pg.label(p))
            });
        }
        for p in 0..pg.size() {
            for q in 0..pg.size() {
                if let Some(pq) = pg.prod(p, q) {
                    let ok = tt.prod(self.tau[p], self.tau[q]) == Some(self.tau[pq]);
                    rep.check(ok, "map-product", || {
                        format!(
                            "fibre map does not commute with the product at {} {}",
                            pg.label(p),
                            pg.label(q)
                        )
                    });
                }
            }
        }
        for b in self.target.total.top.basis() {
            let pre =
                PointSet::from_iter(pg.size(), (0..pg.size()).filter(|&p| b.contains(self.tau[p])));
            rep.check(self.pullback.bundle.total.top.is_open(&pre), "map-continuous", || {
                format!("fibre-map preimage of open {:?} is not open", b.to_vec())
            });
        }
        for p in 0..pg.size() {
            rep.check(
                self.target.proj[self.tau[p]] == self.pullback.bundle.proj[p],
                "projection-commutes",
                || format!("projections disagree at {}", pg.label(p)),
            );
        }
        rep
    }

    pub fn is_function(&self) -> bool {
        self.phi.is_function()
    }

    /// Transport of a slice-section: the value over a right element h is the
    /// fibre map applied at (a(g), h) for the unique g in dom(a) related
    /// to h. Uniqueness holds because the domain is a slice.
    pub fn induced(&self, a: &SliceSection) -> Result<SliceSection, MorphError> {
        let dom = a.domain(self.source.base.gpd.size());
        let mut values = BTreeMap::new();
        for h in self.phi.preimage(&dom).iter() {
            let mut partner = None;
            for g in dom.iter() {
                if self.phi.holds(g, h) {
                    if partner.is_some() {
                        return Err(MorphError::Inconsistent {
                            what: format!(
                                "two domain elements relate to {}",
                                self.phi.right.gpd.label(h)
                            ),
                        });
                    }
                    partner = Some(g);
                }
            }
            let g = partner.expect("preimage membership guarantees a partner");
            let f = a.at(g).expect("partner lies in the domain");
            let p = self.pullback.point_id(f, h).ok_or_else(|| MorphError::Inconsistent {
                what: format!("section value over {g} has no pullback point at {h}"),
            })?;
            values.insert(h, self.tau[p]);
        }
        Ok(SliceSection { values })
    }
}

/// The projection of an etale bundle, flipped into a relation from the total
/// groupoid onto the base. Flipping makes the fibres into preimages, which is
/// the orientation the star and continuity checks expect.
pub fn projection_inverse(bundle: &GroupoidBundle) -> Result<GroupoidRelation, MorphError> {
    GroupoidRelation::new(
        bundle.total.clone(),
        bundle.base.clone(),
        bundle.proj.iter().enumerate().map(|(f, &g)| (f, g)),
    )
}

/// The below-pairs as a relation from the directed restriction into the full
/// coset groupoid.
pub fn triangle_relation(
    cg: &CosetGroupoid,
    sub: &SubGroupoid,
) -> Result<GroupoidRelation, MorphError> {
    let mut pairs = Vec::new();
    for (d, c) in triangle(cg)? {
        let pos = sub.ids.iter().position(|&i| i == d).ok_or_else(|| MorphError::Inconsistent {
            what: format!("directed coset {d} missing from the restriction"),
        })?;
        pairs.push((pos, c));
    }
    GroupoidRelation::new(sub.tg.clone(), cg.tg.clone(), pairs)
}

/// The coset bundle cut down to the fibres over directed cosets. The
/// directed cosets absorb products, so the restriction closes.
pub struct DirectedBundle {
    pub sub: SubGroupoid,
    /// point_ids[p] is the id of point p in the full bundle total.
    pub point_ids: Vec<usize>,
    pub bundle: GroupoidBundle,
}

pub fn directed_bundle(cb: &CosetBundle) -> Result<DirectedBundle, MorphError> {
    let sub = directed_subgroupoid(&cb.cg)?;
    let keep: Vec<usize> =
        (0..cb.size()).filter(|&p| sub.ids.contains(&cb.points[p].coset)).collect();
    let total = restrict_top_groupoid(&cb.bundle.total, &keep)?;
    let proj = keep
        .iter()
        .map(|&p| sub.ids.iter().position(|&c| c == cb.points[p].coset).unwrap())
        .collect();
    let bundle = GroupoidBundle { total: total.tg, base: sub.tg.clone(), proj };
    Ok(DirectedBundle { sub, point_ids: keep, bundle })
}

/// The canonical sections of the directed bundle: each element's full-bundle
/// section restricted to directed cosets and renumbered.
pub fn directed_sections(cb: &CosetBundle, db: &DirectedBundle) -> Vec<SliceSection> {
    let n = cb.cg.ctx.order();
    (0..n)
        .map(|a| {
            let mut values = BTreeMap::new();
            for (d, &c) in db.sub.ids.iter().enumerate() {
                if let Some(p) = cb.point_id(c, a) {
                    let local = db.point_ids.iter().position(|&q| q == p).unwrap();
                    values.insert(d, local);
                }
            }
            SliceSection { values }
        })
        .collect()
}

/// The comparison between the directed bundle pulled back along the
/// below-pairs and the full bundle. The fibre map sends a pullback point to
/// the class of its elements in the fibre over the larger coset; it must
/// come out bijective and open, with the canonical sections corresponding.
pub struct DirectedIota {
    pub directed: DirectedBundle,
    pub pierce: PierceMorphism,
    pub report: CheckReport,
}

pub fn directed_iota(cb: &CosetBundle) -> Result<DirectedIota, MorphError> {
    let directed = directed_bundle(cb)?;
    let tri = triangle_relation(&cb.cg, &directed.sub)?;
    let pm = pierce(&directed.bundle, &cb.bundle, &tri, |p, c| {
        let class = cb.points[directed.point_ids[p]].class;
        let mut out = None;
        for a in class.iter() {
            let q = cb.point_id(c, a).ok_or_else(|| MorphError::Inconsistent {
                what: format!("{} has no class in coset {c}", cb.cg.ctx.label(a)),
            })?;
            match out {
                None => out = Some(q),
                Some(prev) if prev != q => {
                    return Err(MorphError::Inconsistent {
                        what: format!("class members split between fibre points of coset {c}"),
                    })
                }
                _ => {}
            }
        }
        out.ok_or_else(|| MorphError::Inconsistent { what: "empty class".into() })
    })?;
    let mut report = CheckReport::new("directed-comparison");
    let k = pm.pullback.points.len();
    let tsize = cb.bundle.total.gpd.size();
    report.check(k == tsize, "carrier-size", || {
        format!("pullback has {k} points, the full total has {tsize}")
    });
    let mut seen = vec![false; tsize];
    for &v in &pm.tau {
        seen[v] = true;
    }
    report.check(seen.iter().all(|&s| s), "onto", || "a fibre point is never reached".into());
    for b in pm.pullback.bundle.total.top.basis() {
        let img = PointSet::from_iter(tsize, b.iter().map(|p| pm.tau[p]));
        report.check(cb.bundle.total.top.is_open(&img), "open-map", || {
            format!("image of basic open {:?} is not open", b.to_vec())
        });
    }
    let full = bundle_representation(cb);
    let local = directed_sections(cb, &directed);
    for (a, sec) in local.iter().enumerate() {
        match pm.induced(sec) {
            Ok(s) => {
                report.check(s == full.sections[a], "sections-correspond", || {
                    format!("transported section of {} differs", cb.cg.ctx.label(a))
                });
            }
            Err(e) => report.violate(
                "sections-correspond",
                format!("transport failed for {}: {e}", cb.cg.ctx.label(a)),
            ),
        }
    }
    Ok(DirectedIota { directed, pierce: pm, report })
}

/// All relations between the left carrier and a target of the given size
/// whose preimage data reproduce the domains: masks over pairs (c, x) such
/// that for every element a, the x with some a-containing c related to them
/// are exactly theta[a]. None when the pair count breaks the scan budget or
/// the match is too loose to enumerate.
fn matching_relation_masks(
    memberships: &[ElemSet],
    n: usize,
    gsize: usize,
    theta: &[PointSet],
) -> Option<Vec<u64>> {
    let csize = memberships.len();
    let m = csize * gsize;
    if m > MAX_RELATION_PAIRS {
        return None;
    }
    let mut q = vec![vec![0u64; gsize]; n];
    for (c, members) in memberships.iter().enumerate() {
        for a in members.iter() {
            for x in 0..gsize {
                q[a][x] |= 1 << (c * gsize + x);
            }
        }
    }
    let mut out = Vec::new();
    'mask: for mask in 0..(1u64 << m) {
        for (a, row) in q.iter().enumerate() {
            for (x, &bits) in row.iter().enumerate() {
                if ((mask & bits) != 0) != theta[a].contains(x) {
                    continue 'mask;
                }
            }
        }
        out.push(mask);
        if out.len() > 4096 {
            return None;
        }
    }
    Some(out)
}

/// The unique factorization of an etale representation through the coset
/// slices: over each target element sits the coset of elements whose domain
/// contains it.
pub struct CosetFactorization {
    pub phi: GroupoidRelation,
    /// assign[x] is the coset id over the target element x.
    pub assign: Vec<usize>,
    pub report: CheckReport,
}

pub fn factor_through_cosets(
    cg: &CosetGroupoid,
    target: &TopGroupoid,
    theta: &[PointSet],
) -> Result<CosetFactorization, MorphError> {
    let ctx = &cg.ctx;
    let n = ctx.order();
    let gsize = target.gpd.size();
    if theta.len() != n || theta.iter().any(|s| s.len() != gsize) {
        return Err(MorphError::Mismatch {
            what: format!("{} domains for {} elements over {} points", theta.len(), n, gsize),
        });
    }
    if !ctx.s.flags.z_symmetric {
        return Err(MorphError::SymmetryRequired);
    }
    let rep_laws = is_etale_representation(ctx, target, theta);
    if !rep_laws.passed() {
        return Err(MorphError::NotRepresentation { report: Box::new(rep_laws) });
    }
    let mut assign = Vec::with_capacity(gsize);
    for x in 0..gsize {
        let mut set = ElemSet::empty(n);
        for a in 0..n {
            if theta[a].contains(x) {
                set.insert(a);
            }
        }
        let id = cg.id_of(&set).ok_or_else(|| MorphError::Inconsistent {
            what: format!("elements over point {x} do not form a coset"),
        })?;
        assign.push(id);
    }
    let phi = GroupoidRelation::new(
        cg.tg.clone(),
        target.clone(),
        assign.iter().enumerate().map(|(x, &c)| (c, x)),
    )?;
    let mut report = CheckReport::new("coset-factorization");
    report.merge(phi.zakrzewski_report());
    report.check(phi.is_function(), "functional", || {
        "two cosets sit over one target element".into()
    });
    for a in 0..n {
        let pre = phi.preimage(&cg.slice_of(a));
        report.check(pre == theta[a], "factors", || {
            format!(
                "pulled-back slice of {} is {:?}, want {:?}",
                ctx.label(a),
                pre.to_vec(),
                theta[a].to_vec()
            )
        });
    }
    // The value over each point is forced by the membership pattern alone.
    for x in 0..gsize {
        let count = (0..cg.size())
            .filter(|&c| (0..n).all(|a| cg.members(c).contains(a) == theta[a].contains(x)))
            .count();
        report.check(count == 1, "pointwise-forced", || {
            format!("{count} cosets match the membership pattern at point {x}")
        });
    }
    let memberships: Vec<ElemSet> = (0..cg.size()).map(|c| *cg.members(c)).collect();
    if let Some(masks) = matching_relation_masks(&memberships, n, gsize, theta) {
        let phi_mask: u64 =
            assign.iter().enumerate().fold(0, |acc, (x, &c)| acc | 1 << (c * gsize + x));
        let hits: Vec<u64> = masks
            .into_iter()
            .filter(|&mask| {
                (0..gsize).all(|x| {
                    (0..cg.size()).filter(|&c| mask >> (c * gsize + x) & 1 == 1).count() == 1
                })
            })
            .collect();
        report.check(hits == vec![phi_mask], "scan-unique", || {
            format!("{} total assignments reproduce the domains", hits.len())
        });
    }
    Ok(CosetFactorization { phi, assign, report })
}

/// The factorization pushed below: compose the coset factor with the
/// below-pairs to land in the directed restriction.
pub struct DirectedFactorization {
    pub base: CosetFactorization,
    pub sub: SubGroupoid,
    pub psi: GroupoidRelation,
    pub report: CheckReport,
}

pub fn factor_through_directed(
    cg: &CosetGroupoid,
    target: &TopGroupoid,
    theta: &[PointSet],
) -> Result<DirectedFactorization, MorphError> {
    let base = factor_through_cosets(cg, target, theta)?;
    let sub = directed_subgroupoid(cg)?;
    let tri = triangle_relation(cg, &sub)?;
    let psi = tri.compose(&base.phi)?;
    let n = cg.ctx.order();
    let gsize = target.gpd.size();
    let mut report = CheckReport::new("directed-factorization");
    report.merge(psi.zakrzewski_report());
    for a in 0..n {
        let da = PointSet::from_iter(
            sub.ids.len(),
            sub.ids.iter().enumerate().filter(|(_, &c)| cg.members(c).contains(a)).map(|(d, _)| d),
        );
        let pre = psi.preimage(&da);
        report.check(pre == theta[a], "factors", || {
            format!(
                "pulled-back directed slice of {} is {:?}, want {:?}",
                cg.ctx.label(a),
                pre.to_vec(),
                theta[a].to_vec()
            )
        });
    }
    // The fibre over each point is the unique family of directed cosets with
    // union the value there and a common source, and likewise a common range.
    for x in 0..gsize {
        let big = cg.members(base.assign[x]);
        let inside: Vec<usize> =
            (0..sub.ids.len()).filter(|&d| cg.members(sub.ids[d]).is_subset(big)).collect();
        if inside.len() > 20 {
            continue;
        }
        let fibre: BTreeSet<usize> = psi.pairs().filter(|&(_, h)| h == x).map(|(d, _)| d).collect();
        let mut src_families = 0usize;
        let mut rng_families = 0usize;
        let mut src_is_fibre = false;
        let mut rng_is_fibre = false;
        for mask in 1u32..(1 << inside.len()) {
            let fam: Vec<usize> = inside
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &d)| d)
                .collect();
            let mut union = ElemSet::empty(n);
            for &d in &fam {
                union = union.union(cg.members(sub.ids[d]));
            }
            if union != *big {
                continue;
            }
            let srcs: BTreeSet<usize> = fam.iter().map(|&d| cg.source_id(sub.ids[d])).collect();
            let rngs: BTreeSet<usize> = fam.iter().map(|&d| cg.range_id(sub.ids[d])).collect();
            let fam_set: BTreeSet<usize> = fam.into_iter().collect();
            if srcs.len() == 1 {
                src_families += 1;
                src_is_fibre |= fam_set == fibre;
            }
            if rngs.len() == 1 {
                rng_families += 1;
                rng_is_fibre |= fam_set == fibre;
            }
        }
        report.check(src_families == 1 && src_is_fibre, "unique-source-family", || {
            format!("{src_families} common-source families union to the value at point {x}")
        });
        report.check(rng_families == 1 && rng_is_fibre, "unique-range-family", || {
            format!("{rng_families} common-range families union to the value at point {x}")
        });
    }
    let memberships: Vec<ElemSet> = sub.ids.iter().map(|&c| *cg.members(c)).collect();
    if let Some(masks) = matching_relation_masks(&memberships, n, gsize, theta) {
        let psi_mask: u64 = psi.pairs().fold(0, |acc, (d, x)| acc | 1 << (d * gsize + x));
        let mut hits = Vec::new();
        for mask in masks {
            let mut pairs = Vec::new();
            for d in 0..sub.ids.len() {
                for x in 0..gsize {
                    if mask >> (d * gsize + x) & 1 == 1 {
                        pairs.push((d, x));
                    }
                }
            }
            let cand = GroupoidRelation::new(sub.tg.clone(), target.clone(), pairs)?;
            if cand.is_zakrzewski() {
                hits.push(mask);
            }
        }
        report.check(hits == vec![psi_mask], "scan-unique", || {
            format!("{} lawful relations reproduce the domains", hits.len())
        });
    }
    Ok(DirectedFactorization { base, sub, psi, report })
}

/// Checks that the sections form a representation: each one passes the
/// slice-section laws, products multiply along the semigroup, and the
/// domains alone already represent. Returns the domains for reuse.
fn section_representation_laws(
    ctx: &Ctx,
    target: &GroupoidBundle,
    theta: &[SliceSection],
) -> (CheckReport, Vec<PointSet>) {
    let mut rep = CheckReport::new("section-representation");
    let n = ctx.order();
    let base = target.base.gpd.size();
    for (a, sec) in theta.iter().enumerate() {
        let mut r = check_slice_section(target, sec);
        for v in &mut r.violations {
            v.witness = format!("section of {}: {}", ctx.label(a), v.witness);
        }
        rep.merge(r);
    }
    for a in 0..n {
        for b in 0..n {
            let ab = ctx.s.sg.mul(a, b);
            match section_product(target, &theta[a], &theta[b]) {
                Ok(p) => {
                    rep.check(p == theta[ab], "multiplicative", || {
                        format!(
                            "section of {} times section of {} is not the section of their product",
                            ctx.label(a),
                            ctx.label(b)
                        )
                    });
                }
                Err(e) => rep.violate(
                    "multiplicative",
                    format!("product of sections of {} and {}: {e}", ctx.label(a), ctx.label(b)),
                ),
            }
        }
    }
    let doms: Vec<PointSet> = theta.iter().map(|s| s.domain(base)).collect();
    rep.merge(is_etale_representation(ctx, &target.base, &doms));
    (rep, doms)
}

/// The unique factorization of a bundle representation through the canonical
/// one: the domains factor through the coset slices, and the fibre map over
/// a pullback point is the common section value of the class there.
pub struct BundleFactorization {
    pub base: CosetFactorization,
    pub pierce: PierceMorphism,
    pub report: CheckReport,
}

pub fn factor_bundle(
    cb: &CosetBundle,
    target: &GroupoidBundle,
    theta: &[SliceSection],
) -> Result<BundleFactorization, MorphError> {
    let ctx = &cb.cg.ctx;
    let n = ctx.order();
    if theta.len() != n {
        return Err(MorphError::Mismatch {
            what: format!("{} sections for {} elements", theta.len(), n),
        });
    }
    if !ctx.s.flags.z_symmetric {
        return Err(MorphError::SymmetryRequired);
    }
    let (laws, doms) = section_representation_laws(ctx, target, theta);
    if !laws.passed() {
        return Err(MorphError::NotRepresentation { report: Box::new(laws) });
    }
    let base = factor_through_cosets(&cb.cg, &target.base, &doms)?;
    let pm = pierce(&cb.bundle, target, &base.phi, |p, g| {
        let class = cb.points[p].class;
        let mut out = None;
        for a in class.iter() {
            let v = theta[a].at(g).ok_or_else(|| MorphError::Inconsistent {
                what: format!("section of {} misses point {g}", ctx.label(a)),
            })?;
            match out {
                None => out = Some(v),
                Some(prev) if prev != v => {
                    return Err(MorphError::Inconsistent {
                        what: format!("sections of one class disagree over point {g}"),
                    })
                }
                _ => {}
            }
        }
        out.ok_or_else(|| MorphError::Inconsistent { what: "empty class".into() })
    })?;
    let mut report = CheckReport::new("bundle-factorization");
    let canon = bundle_representation(cb);
    for a in 0..n {
        match pm.induced(&canon.sections[a]) {
            Ok(s) => {
                report.check(s == theta[a], "factors", || {
                    format!("transported canonical section of {} differs", ctx.label(a))
                });
            }
            Err(e) => report
                .violate("factors", format!("transport failed for {}: {e}", ctx.label(a))),
        }
    }
    // Every fibre-map value is pinned by some section through its point.
    for (p, &(f, g)) in pm.pullback.points.iter().enumerate() {
        let c = cb.points[f].coset;
        let forced = cb.points[f]
            .class
            .iter()
            .any(|a| canon.sections[a].at(c) == Some(f) && theta[a].at(g) == Some(pm.tau[p]));
        report.check(forced, "map-forced", || {
            format!("value over pullback point ({f}, {g}) is pinned by no section")
        });
    }
    Ok(BundleFactorization { base, pierce: pm, report })
}

/// The bundle factorization pushed below: the directed bundle maps onto the
/// target through the composed base relation.
pub struct DirectedBundleFactorization {
    pub base: DirectedFactorization,
    pub directed: DirectedBundle,
    pub pierce: PierceMorphism,
    pub report: CheckReport,
}

pub fn factor_bundle_directed(
    cb: &CosetBundle,
    target: &GroupoidBundle,
    theta: &[SliceSection],
) -> Result<DirectedBundleFactorization, MorphError> {
    let ctx = &cb.cg.ctx;
    let n = ctx.order();
    if theta.len() != n {
        return Err(MorphError::Mismatch {
            what: format!("{} sections for {} elements", theta.len(), n),
        });
    }
    if !ctx.s.flags.z_symmetric {
        return Err(MorphError::SymmetryRequired);
    }
    let (laws, doms) = section_representation_laws(ctx, target, theta);
    if !laws.passed() {
        return Err(MorphError::NotRepresentation { report: Box::new(laws) });
    }
    let base = factor_through_directed(&cb.cg, &target.base, &doms)?;
    let directed = directed_bundle(cb)?;
    let pm = pierce(&directed.bundle, target, &base.psi, |p, g| {
        let class = cb.points[directed.point_ids[p]].class;
        let mut out = None;
        for a in class.iter() {
            let v = theta[a].at(g).ok_or_else(|| MorphError::Inconsistent {
                what: format!("section of {} misses point {g}", ctx.label(a)),
            })?;
            match out {
                None => out = Some(v),
                Some(prev) if prev != v => {
                    return Err(MorphError::Inconsistent {
                        what: format!("sections of one class disagree over point {g}"),
                    })
                }
                _ => {}
            }
        }
        out.ok_or_else(|| MorphError::Inconsistent { what: "empty class".into() })
    })?;
    let mut report = CheckReport::new("directed-bundle-factorization");
    let local = directed_sections(cb, &directed);
    for a in 0..n {
        match pm.induced(&local[a]) {
            Ok(s) => {
                report.check(s == theta[a], "factors", || {
                    format!("transported directed section of {} differs", ctx.label(a))
                });
            }
            Err(e) => report
                .violate("factors", format!("transport failed for {}: {e}", ctx.label(a))),
        }
    }
    for (p, &(f, g)) in pm.pullback.points.iter().enumerate() {
        let full = directed.point_ids[f];
        let d = directed.bundle.proj[f];
        let forced = cb.points[full]
            .class
            .iter()
            .any(|a| local[a].at(d) == Some(f) && theta[a].at(g) == Some(pm.tau[p]));
        report.check(forced, "map-forced", || {
            format!("value over pullback point ({f}, {g}) is pinned by no directed section")
        });
    }
    Ok(DirectedBundleFactorization { base, directed, pierce: pm, report })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::bundle::build_coset_bundle;
    use crate::cosetgpd::{build_coset_groupoid, coset_representation};
    use crate::fixtures::{structured_fixture, structured_fixtures, triv_bundle, twist_bundle};
    use crate::sections::{all_slice_sections, section_semigroup};
    use crate::semigroup::{validate_semigroup, MAX_ORDER, MAX_SECTIONS};
    use crate::topo::{check_bundle, check_etale_bundle};

    fn groupoid_for(name: &str) -> CosetGroupoid {
        build_coset_groupoid(Ctx::new(structured_fixture(name).unwrap())).unwrap()
    }

    fn bundle_for(name: &str) -> CosetBundle {
        build_coset_bundle(groupoid_for(name)).unwrap()
    }

    fn discrete_space(k: usize) -> TopGroupoid {
        let prod =
            (0..k * k).map(|i| if i / k == i % k { Some(i / k) } else { None }).collect();
        let data = GroupoidData { size: k, inv: (0..k).collect(), prod, labels: None };
        TopGroupoid::discrete(FiniteGroupoid::from_data(data).unwrap())
    }

    fn cyclic_groupoid(k: usize) -> TopGroupoid {
        let mul: Vec<Vec<usize>> =
            (0..k).map(|a| (0..k).map(|b| (a + b) % k).collect()).collect();
        let table = validate_semigroup(&mul, None, MAX_ORDER).unwrap();
        let inv = (0..k).map(|a| (k - a) % k).collect();
        TopGroupoid::discrete(
            FiniteGroupoid::from_data(GroupoidData::from_group(&table, inv)).unwrap(),
        )
    }

    fn disjoint_double(tg: &TopGroupoid) -> TopGroupoid {
        let g = &tg.gpd;
        let n = g.size();
        let size = 2 * n;
        let mut inv = vec![0; size];
        let mut prod = vec![None; size * size];
        let mut labels = Vec::with_capacity(size);
        for copy in 0..2 {
            for x in 0..n {
                inv[copy * n + x] = copy * n + g.inv(x);
                labels.push(format!("{}{}", g.label(x), copy));
                for y in 0..n {
                    prod[(copy * n + x) * size + (copy * n + y)] =
                        g.prod(x, y).map(|v| copy * n + v);
                }
            }
        }
        let data = GroupoidData { size, inv, prod, labels: Some(labels) };
        TopGroupoid::discrete(FiniteGroupoid::from_data(data).unwrap())
    }

    #[test]
    fn relation_algebra_matches_hand_computed_sets() {
        let x = discrete_space(3);
        let y = discrete_space(2);
        let phi =
            GroupoidRelation::new(x.clone(), y.clone(), [(0, 0), (1, 0), (2, 1)]).unwrap();
        assert_eq!(phi.image(&PointSet::singleton(2, 0)).to_vec(), vec![0, 1]);
        assert_eq!(phi.preimage(&PointSet::from_iter(3, [0, 2])).to_vec(), vec![0, 1]);
        assert_eq!(phi.domain().to_vec(), vec![0, 1]);
        assert_eq!(phi.range().to_vec(), vec![0, 1, 2]);
        assert!(!phi.is_function());
        assert!(phi.flip().is_function());
        let id = GroupoidRelation::identity(&y);
        assert_eq!(
            phi.compose(&id).unwrap().pairs().collect::<Vec<_>>(),
            phi.pairs().collect::<Vec<_>>()
        );
        let psi = GroupoidRelation::new(y.clone(), x.clone(), [(0, 0), (1, 1), (1, 2)]).unwrap();
        let comp = phi.compose(&psi).unwrap();
        assert_eq!(comp.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 0), (2, 1), (2, 2)]);
        assert!(matches!(
            GroupoidRelation::new(x.clone(), y.clone(), [(5, 0)]),
            Err(MorphError::PairOutOfRange { .. })
        ));
    }

    #[test]
    fn group_homomorphisms_and_partial_maps_sit_at_opposite_extremes() {
        let z4 = cyclic_groupoid(4);
        let z2 = cyclic_groupoid(2);
        // the mod-2 quotient, stored with the quotiented group on the left
        let phi =
            GroupoidRelation::new(z4.clone(), z2.clone(), (0..4).map(|g| (g, g % 2))).unwrap();
        assert!(phi.is_zakrzewski());
        assert!(!phi.is_function());
        let flip = phi.flip();
        assert!(flip.is_function());
        assert!(flip.functorial_report().passed());
        assert!(!flip.star_injective_report().passed());
        assert!(flip.star_surjective_report().passed());
        // partial continuous maps between spaces are exactly the functional
        // lawful relations; a non-functional one already fails functoriality
        let x = discrete_space(3);
        let y = discrete_space(2);
        let t = GroupoidRelation::new(y.clone(), x.clone(), [(0, 0), (1, 1)]).unwrap();
        assert!(t.is_etale_morphism());
        let all = GroupoidRelation::new(
            y.clone(),
            x.clone(),
            (0..2).flat_map(|g| (0..3).map(move |h| (g, h))),
        )
        .unwrap();
        assert!(!all.functorial_report().passed());
        assert!(!all.is_zakrzewski());
    }

    #[test]
    fn a_missing_product_pair_breaks_functoriality() {
        let cg = groupoid_for("z3");
        let tg = &cg.tg;
        let (x, y) = tg
            .gpd
            .composable_pairs()
            .into_iter()
            .find(|&(x, y)| {
                let z = tg.gpd.prod(x, y).unwrap();
                z != x && z != y
            })
            .unwrap();
        let z = tg.gpd.prod(x, y).unwrap();
        let pairs: Vec<_> = (0..tg.gpd.size()).filter(|&g| g != z).map(|g| (g, g)).collect();
        let phi = GroupoidRelation::new(tg.clone(), tg.clone(), pairs).unwrap();
        let rep = phi.functorial_report();
        assert!(!rep.passed());
        assert!(rep.violations.iter().any(|v| v.law == "product-pair"));
    }

    #[test]
    fn star_characterizations_agree_on_both_quotient_directions() {
        let z4 = cyclic_groupoid(4);
        let z2 = cyclic_groupoid(2);
        let phi =
            GroupoidRelation::new(z4.clone(), z2.clone(), (0..4).map(|g| (g, g % 2))).unwrap();
        let flip = phi.flip();
        let cg = groupoid_for("z3");
        let sub = directed_subgroupoid(&cg).unwrap();
        let tri = triangle_relation(&cg, &sub).unwrap();
        for rel in [&phi, &flip, &tri] {
            assert!(rel.functorial_report().passed());
            assert_eq!(rel.star_injective_by_count(), rel.unit_preimages_are_units());
            assert_eq!(rel.star_injective_by_count(), rel.slice_preimages_are_slices());
            assert_eq!(rel.star_surjective_by_count(), rel.preimage_splits_products());
            if rel.star_surjective_by_count() {
                assert!(rel.range_is_ideal());
            }
        }
        assert!(!flip.star_injective_by_count());
        assert!(flip.star_surjective_by_count());
    }

    #[test]
    fn triangle_pairs_form_a_zakrzewski_morphism() {
        for (name, _) in structured_fixtures() {
            let cg = groupoid_for(name);
            let sub = directed_subgroupoid(&cg).unwrap();
            let tri = triangle_relation(&cg, &sub).unwrap();
            let rep = tri.zakrzewski_report();
            assert!(rep.passed(), "{name}: {rep}");
            assert!(tri.slice_restriction_report().passed(), "{name}");
            for a in 0..cg.ctx.order() {
                let da = PointSet::from_iter(
                    sub.ids.len(),
                    sub.ids
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| cg.members(c).contains(a))
                        .map(|(d, _)| d),
                );
                assert_eq!(tri.preimage(&da), cg.slice_of(a), "{name} element {a}");
            }
        }
        // the fibre over the full coset collects every directed coset below
        let cg = groupoid_for("z3");
        let sub = directed_subgroupoid(&cg).unwrap();
        let tri = triangle_relation(&cg, &sub).unwrap();
        assert!(!tri.is_function());
        let full = cg.id_of(&cg.ctx.s.sg.elements()).unwrap();
        assert_eq!(tri.image(&PointSet::singleton(cg.size(), full)).count(), 3);
    }

    #[test]
    fn bundle_projections_invert_to_open_zakrzewski_relations() {
        let bundles = vec![
            triv_bundle(),
            twist_bundle(),
            bundle_for("z3").bundle,
            bundle_for("ps2").bundle,
        ];
        for b in &bundles {
            let rel = projection_inverse(b).unwrap();
            assert!(rel.is_zakrzewski());
            assert!(rel.is_open_relation());
        }
        // collapsing the projection destroys the bundle and the relation
        let triv = triv_bundle();
        let broken = GroupoidBundle {
            total: triv.total.clone(),
            base: triv.base.clone(),
            proj: vec![0; triv.total.gpd.size()],
        };
        assert!(!check_bundle(&broken).passed());
        assert!(!projection_inverse(&broken).unwrap().is_zakrzewski());
    }

    #[test]
    fn pullback_along_the_identity_copies_the_bundle() {
        let triv = triv_bundle();
        let pm = identity_pierce(&triv).unwrap();
        assert_eq!(pm.pullback.points.len(), triv.total.gpd.size());
        assert!(check_bundle(&pm.pullback.bundle).passed());
        let sections = all_slice_sections(&triv, MAX_SECTIONS).unwrap();
        assert_eq!(sections.len(), 17);
        for s in &sections {
            assert_eq!(pm.induced(s).unwrap(), *s);
        }
    }

    #[test]
    fn pullback_along_a_double_cover_doubles_fibres() {
        let triv = triv_bundle();
        let double = disjoint_double(&triv.base);
        let n = triv.base.gpd.size();
        let phi = GroupoidRelation::new(
            triv.base.clone(),
            double.clone(),
            (0..2 * n).map(|h| (h % n, h)),
        )
        .unwrap();
        assert!(phi.is_zakrzewski());
        let pb = pullback_bundle(&triv, &phi).unwrap();
        assert_eq!(pb.points.len(), 2 * triv.total.gpd.size());
        assert!(check_bundle(&pb.bundle).passed());
        for h in 0..2 * n {
            let fibre = pb.bundle.proj.iter().filter(|&&g| g == h).count();
            let original = triv.proj.iter().filter(|&&g| g == h % n).count();
            assert_eq!(fibre, original);
        }
        // pushing a cylinder forward agrees with pulling the base image back
        for o in triv.total.top.basis() {
            let po = PointSet::from_iter(n, o.iter().map(|f| triv.proj[f]));
            for nb in double.top.basis() {
                let mut lhs = PointSet::empty(2 * n);
                for &(f, h) in &pb.points {
                    if o.contains(f) && nb.contains(h) {
                        lhs.insert(h);
                    }
                }
                let rhs = nb.inter(&phi.preimage(&po));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn directed_pullback_realizes_the_full_bundle() {
        for (name, _) in structured_fixtures() {
            let cb = bundle_for(name);
            let di = directed_iota(&cb).unwrap();
            assert!(di.report.passed(), "{name}: {}", di.report);
            assert!(check_etale_bundle(&di.directed.bundle).passed(), "{name}");
            for sec in directed_sections(&cb, &di.directed) {
                assert!(check_slice_section(&di.directed.bundle, &sec).passed(), "{name}");
            }
        }
    }

    #[test]
    fn collapsing_the_fibre_keeps_section_products() {
        let triv = triv_bundle();
        let base = triv.base.clone();
        let target = GroupoidBundle {
            total: base.clone(),
            base: base.clone(),
            proj: (0..base.gpd.size()).collect(),
        };
        assert!(check_bundle(&target).passed());
        let phi = GroupoidRelation::identity(&base);
        let pm = pierce(&triv, &target, &phi, |f, _| Ok(triv.proj[f])).unwrap();
        let sections = all_slice_sections(&triv, MAX_SECTIONS).unwrap();
        for a in &sections {
            let sa = pm.induced(a).unwrap();
            // the shadow keeps the domain and forgets the fibre
            assert_eq!(sa.domain(base.gpd.size()), a.domain(base.gpd.size()));
            for (&g, &v) in &sa.values {
                assert_eq!(v, g);
            }
            for b in &sections {
                let ab = section_product(&triv, a, b).unwrap();
                let sb = pm.induced(b).unwrap();
                let sab = section_product(&target, &sa, &sb).unwrap();
                assert_eq!(pm.induced(&ab).unwrap(), sab);
            }
        }
    }

    #[test]
    fn coset_representation_factors_through_itself() {
        for (name, _) in structured_fixtures() {
            let cg = groupoid_for(name);
            let rep = coset_representation(&cg);
            assert!(!rep.symmetry_warning, "{name}");
            let fact = factor_through_cosets(&cg, &cg.tg, &rep.assign).unwrap();
            assert!(fact.report.passed(), "{name}: {}", fact.report);
            assert_eq!(fact.assign, (0..cg.size()).collect::<Vec<_>>(), "{name}");
            assert!(fact.phi.is_etale_morphism(), "{name}");
        }
        // flipping the symmetry flag is refused up front
        let mut s = structured_fixture("z3").unwrap();
        s.flags.z_symmetric = false;
        let cg = build_coset_groupoid(Ctx::new(s)).unwrap();
        let rep = coset_representation(&cg);
        assert!(rep.symmetry_warning);
        assert!(matches!(
            factor_through_cosets(&cg, &cg.tg, &rep.assign),
            Err(MorphError::SymmetryRequired)
        ));
        // junk domains are refused with the failing laws attached
        let cg = groupoid_for("z3");
        let full = vec![PointSet::full(cg.size()); cg.ctx.order()];
        assert!(matches!(
            factor_through_cosets(&cg, &cg.tg, &full),
            Err(MorphError::NotRepresentation { .. })
        ));
    }

    #[test]
    fn directed_representation_factors_as_inclusion() {
        for (name, _) in structured_fixtures() {
            let cg = groupoid_for(name);
            let sub = directed_subgroupoid(&cg).unwrap();
            let theta: Vec<PointSet> = (0..cg.ctx.order())
                .map(|a| {
                    PointSet::from_iter(
                        sub.ids.len(),
                        sub.ids
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| cg.members(c).contains(a))
                            .map(|(d, _)| d),
                    )
                })
                .collect();
            let fact = factor_through_directed(&cg, &sub.tg, &theta).unwrap();
            assert!(fact.base.report.passed(), "{name}: {}", fact.base.report);
            assert!(fact.report.passed(), "{name}: {}", fact.report);
            assert_eq!(fact.base.assign, sub.ids, "{name}");
            let id_pairs: Vec<_> = (0..sub.ids.len()).map(|d| (d, d)).collect();
            assert_eq!(fact.psi.pairs().collect::<Vec<_>>(), id_pairs, "{name}");
        }
    }

    #[test]
    fn bundle_representation_factors_through_itself() {
        for (name, _) in structured_fixtures() {
            let cb = bundle_for(name);
            let canon = bundle_representation(&cb);
            assert!(!canon.symmetry_warning, "{name}");
            let fact = factor_bundle(&cb, &cb.bundle, &canon.sections).unwrap();
            assert!(fact.base.report.passed(), "{name}: {}", fact.base.report);
            assert!(fact.report.passed(), "{name}: {}", fact.report);
            assert_eq!(fact.base.assign, (0..cb.cg.size()).collect::<Vec<_>>(), "{name}");
            for (p, &(f, _)) in fact.pierce.pullback.points.iter().enumerate() {
                assert_eq!(fact.pierce.tau[p], f, "{name}");
            }
            // and the same sections factor through the directed restriction
            let dfact = factor_bundle_directed(&cb, &cb.bundle, &canon.sections).unwrap();
            assert!(dfact.base.report.passed(), "{name}: {}", dfact.base.report);
            assert!(dfact.report.passed(), "{name}: {}", dfact.report);
            let di = directed_iota(&cb).unwrap();
            assert_eq!(dfact.pierce.pullback.points, di.pierce.pullback.points, "{name}");
            assert_eq!(dfact.pierce.tau, di.pierce.tau, "{name}");
        }
    }

    #[test]
    fn section_semigroups_factor_through_their_own_bundles() {
        for bundle in [twist_bundle(), triv_bundle()] {
            let semi = section_semigroup(&bundle, MAX_SECTIONS).unwrap();
            let cb =
                build_coset_bundle(build_coset_groupoid(Ctx::new(semi.triple)).unwrap()).unwrap();
            let fact = factor_bundle(&cb, &bundle, &semi.sections).unwrap();
            assert!(fact.base.report.passed(), "{}", fact.base.report);
            assert!(fact.report.passed(), "{}", fact.report);
            // every fibre point a section names is reached by the fibre map
            let used: BTreeSet<usize> =
                semi.sections.iter().flat_map(|s| s.values.values().copied()).collect();
            let reached: BTreeSet<usize> = fact.pierce.tau.iter().copied().collect();
            assert_eq!(used, reached);
        }
    }
}
