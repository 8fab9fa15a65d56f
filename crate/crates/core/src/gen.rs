//! Semilattice spectra, inverse-semigroup cosets, and generated fixtures.
//!
//! Two classical constructions sit inside the general coset machinery as
//! special cases: a meet semilattice represents faithfully on the space of
//! its multiplicative filters, and an inverse semigroup whose designated
//! subsets are its idempotents has cosets in the textbook sense, closed
//! under the natural partial order. This module builds both pictures from
//! first principles, with no reference to domination, so the general
//! pipeline has something independent to agree with. It also generates the
//! symmetric inverse monoids programmatically as a check on the hand-rolled
//! tables.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::coset::{coset_product, is_coset, CosetError};
use crate::cosetgpd::{build_coset_groupoid, CosetGpdError};
use crate::filters::{all_filters, directed_subgroupoid, FilterError};
use crate::fixtures::{bundle_fixture, structured_fixture};
use crate::order::Ctx;
use crate::report::CheckReport;
use crate::semigroup::{
    validate_semigroup, validate_structured, CoreError, FiniteSemigroup, StructuredSemigroup,
    MAX_ORDER,
};
use crate::sets::{ElemSet, PointSet};
use crate::topo::{generate_topology, FiniteTopology, GroupoidBundle};

/// Exhaustive subset scans over a semigroup stop at this order.
pub const MAX_SCAN_ORDER: usize = 16;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("no fixture is named {name:?}")]
    UnknownFixture { name: String },
    #[error("not a meet semilattice: {what}")]
    NotSemilattice { what: String },
    #[error("not an inverse semigroup over its idempotents: {what}")]
    NotInverse { what: String },
    #[error("not a spatial representation:\n{report}")]
    NotRepresentation { report: Box<CheckReport> },
    #[error("order {order} exceeds the subset-enumeration guard {max}")]
    TooLarge { order: usize, max: usize },
    #[error("spectrum structure disagrees with itself: {what}")]
    Inconsistent { what: String },
    #[error(transparent)]
    Semigroup(#[from] CoreError),
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    CosetGpd(#[from] CosetGpdError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// A named example of either shape.
pub enum GenFixture {
    Semigroup(StructuredSemigroup),
    Bundle(GroupoidBundle),
}

/// Resolves a fixture name to the object it denotes.
pub fn gen_fixture(name: &str) -> Result<GenFixture, GenError> {
    if let Some(s) = structured_fixture(name) {
        return Ok(GenFixture::Semigroup(s));
    }
    if let Some(b) = bundle_fixture(name) {
        return Ok(GenFixture::Bundle(b));
    }
    Err(GenError::UnknownFixture { name: name.to_string() })
}

/// a <= b in the meet order: a = ab.
pub fn meet_below(sl: &FiniteSemigroup, a: usize, b: usize) -> bool {
    sl.mul(a, b) == a
}

fn require_semilattice(sl: &FiniteSemigroup) -> Result<(), GenError> {
    for a in 0..sl.order() {
        if sl.mul(a, a) != a {
            return Err(GenError::NotSemilattice {
                what: format!("{} is not idempotent", sl.label(a)),
            });
        }
    }
    if !sl.is_commutative() {
        return Err(GenError::NotSemilattice { what: "multiplication is not commutative".into() });
    }
    Ok(())
}

/// Multiplicative filter: non-empty, and a product lies inside exactly when
/// both factors do.
pub fn is_meet_filter(sl: &FiniteSemigroup, f: &ElemSet) -> bool {
    if f.is_empty() {
        return false;
    }
    for a in 0..sl.order() {
        for b in 0..sl.order() {
            if (f.contains(a) && f.contains(b)) != f.contains(sl.mul(a, b)) {
                return false;
            }
        }
    }
    true
}

/// Every multiplicative filter of a finite meet semilattice, carrying the
/// topology whose basic opens collect the filters through a given element.
pub struct FilterSpectrum {
    pub semilattice: FiniteSemigroup,
    /// Filters in ascending mask order.
    pub filters: Vec<ElemSet>,
    /// basic[a] = the set of spectrum points whose filter contains a.
    pub basic: Vec<PointSet>,
    pub topology: FiniteTopology,
}

pub fn filter_spectrum(sl: &FiniteSemigroup) -> Result<FilterSpectrum, GenError> {
    require_semilattice(sl)?;
    let n = sl.order();
    if n > MAX_SCAN_ORDER {
        return Err(GenError::TooLarge { order: n, max: MAX_SCAN_ORDER });
    }
    let mut filters = Vec::new();
    for bits in 1..(1u64 << n) {
        let f = ElemSet::from_bits(n, bits);
        if is_meet_filter(sl, &f) {
            filters.push(f);
        }
    }
    let basic: Vec<PointSet> = (0..n)
        .map(|a| PointSet::from_iter(filters.len(), filters.iter().enumerate().filter(|(_, f)| f.contains(a)).map(|(i, _)| i)))
        .collect();
    let topology = generate_topology(filters.len(), basic.clone());
    Ok(FilterSpectrum { semilattice: sl.clone(), filters, basic, topology })
}

impl FilterSpectrum {
    pub fn filter_id(&self, f: &ElemSet) -> Option<usize> {
        self.filters.iter().position(|g| g == f)
    }

    /// The principal filter: everything above a in the meet order.
    pub fn principal(&self, a: usize) -> ElemSet {
        let n = self.semilattice.order();
        let mut out = ElemSet::empty(n);
        for b in 0..n {
            if meet_below(&self.semilattice, a, b) {
                out.insert(b);
            }
        }
        out
    }

    /// Laws of the basic-open assignment: meets go to intersections, the
    /// basic opens cover the spectrum and separate elements, and principal
    /// filters are the minimal points of their basic opens.
    pub fn report(&self) -> CheckReport {
        let sl = &self.semilattice;
        let n = sl.order();
        let mut rep = CheckReport::new("filter spectrum");
        for a in 0..n {
            for b in 0..n {
                let want = self.basic[a].inter(&self.basic[b]);
                rep.check(self.basic[sl.mul(a, b)] == want, "meet-to-intersection", || {
                    format!(
                        "basic({}) differs from basic({}) /\\ basic({})",
                        sl.label(sl.mul(a, b)),
                        sl.label(a),
                        sl.label(b)
                    )
                });
            }
        }
        let mut cover = PointSet::empty(self.filters.len());
        for b in &self.basic {
            cover = cover.union(b);
        }
        rep.check(cover == PointSet::full(self.filters.len()), "covering", || {
            format!("basic opens cover only {:?}", cover.to_vec())
        });
        for a in 0..n {
            for b in (a + 1)..n {
                rep.check(self.basic[a] != self.basic[b], "faithful", || {
                    format!("basic({}) = basic({})", sl.label(a), sl.label(b))
                });
            }
        }
        for a in 0..n {
            let p = self.principal(a);
            let ok = self.filter_id(&p).is_some();
            rep.check(ok, "principal-is-filter", || {
                format!("{} is not a filter", sl.describe_set(&p))
            });
            for f in &self.filters {
                if f.contains(a) {
                    rep.check(p.is_subset(f), "principal-minimal", || {
                        format!(
                            "{} contains {} but not its principal filter",
                            sl.describe_set(f),
                            sl.label(a)
                        )
                    });
                }
            }
        }
        rep
    }
}

/// The map a spatial representation factors through, point by point.
pub struct FilterFactorization {
    /// phi[x] = the spectrum point whose filter collects what holds at x.
    pub phi: Vec<usize>,
    pub report: CheckReport,
}

/// Factors a spatial representation on a finite space through the filter
/// spectrum. The input must be open, covering, and turn meets into
/// intersections; the output map is continuous, recovers the representation
/// through the basic opens, and is the only map that does so.
pub fn filter_universal_factor(
    spectrum: &FilterSpectrum,
    space: &FiniteTopology,
    theta: &[PointSet],
) -> Result<FilterFactorization, GenError> {
    let sl = &spectrum.semilattice;
    let n = sl.order();
    if theta.len() != n {
        return Err(GenError::Inconsistent {
            what: format!("{} open sets for {} elements", theta.len(), n),
        });
    }
    for (a, t) in theta.iter().enumerate() {
        if t.len() != space.points() {
            return Err(GenError::Inconsistent {
                what: format!("image of {} lives on {} points, space has {}", sl.label(a), t.len(), space.points()),
            });
        }
    }

    let mut laws = CheckReport::new("spatial representation");
    for (a, t) in theta.iter().enumerate() {
        laws.check(space.is_open(t), "image-open", || {
            format!("image of {} = {:?} is not open", sl.label(a), t.to_vec())
        });
    }
    let mut cover = PointSet::empty(space.points());
    for t in theta {
        cover = cover.union(t);
    }
    laws.check(cover == PointSet::full(space.points()), "covering", || {
        format!("images cover only {:?}", cover.to_vec())
    });
    for a in 0..n {
        for b in 0..n {
            let want = theta[a].inter(&theta[b]);
            laws.check(theta[sl.mul(a, b)] == want, "meet-to-intersection", || {
                format!(
                    "image of {} differs from the intersection over {} and {}",
                    sl.label(sl.mul(a, b)),
                    sl.label(a),
                    sl.label(b)
                )
            });
        }
    }
    if !laws.passed() {
        return Err(GenError::NotRepresentation { report: Box::new(laws) });
    }

    let mut phi = Vec::with_capacity(space.points());
    for x in 0..space.points() {
        let mut trace = ElemSet::empty(n);
        for a in 0..n {
            if theta[a].contains(x) {
                trace.insert(a);
            }
        }
        let id = spectrum.filter_id(&trace).ok_or_else(|| GenError::Inconsistent {
            what: format!("the trace {} at point {x} is not a filter", sl.describe_set(&trace)),
        })?;
        phi.push(id);
    }

    let mut report = CheckReport::new("universal spectrum factor");
    for a in 0..n {
        let pre = PointSet::from_iter(
            space.points(),
            phi.iter().enumerate().filter(|(_, &f)| spectrum.basic[a].contains(f)).map(|(x, _)| x),
        );
        report.check(pre == theta[a], "factors-through-basic", || {
            format!("preimage of basic({}) is {:?}", sl.label(a), pre.to_vec())
        });
    }
    if let Some(opens) = spectrum.topology.opens() {
        for o in opens {
            let pre = PointSet::from_iter(
                space.points(),
                phi.iter().enumerate().filter(|(_, &f)| o.contains(f)).map(|(x, _)| x),
            );
            report.check(space.is_open(&pre), "preimage-open", || {
                format!("preimage of {:?} is {:?}, not open", o.to_vec(), pre.to_vec())
            });
        }
    }
    for x in 0..space.points() {
        let matches = spectrum
            .filters
            .iter()
            .filter(|f| (0..n).all(|a| f.contains(a) == theta[a].contains(x)))
            .count();
        report.check(matches == 1, "pointwise-forced", || {
            format!("{matches} filters match the trace at point {x}")
        });
    }
    Ok(FilterFactorization { phi, report })
}

/// a <= b in the natural order of an inverse semigroup: a = a a' b.
pub fn natural_below(sg: &FiniteSemigroup, inv: &[usize], a: usize, b: usize) -> bool {
    sg.mul(sg.mul(a, inv[a]), b) == a
}

fn natural_up_closure(sg: &FiniteSemigroup, inv: &[usize], t: &ElemSet) -> ElemSet {
    let n = sg.order();
    let mut out = ElemSet::empty(n);
    for s in 0..n {
        if t.iter().any(|x| natural_below(sg, inv, x, s)) {
            out.insert(s);
        }
    }
    out
}

fn set_inverse(sg: &FiniteSemigroup, inv: &[usize], t: &ElemSet) -> ElemSet {
    let mut out = ElemSet::empty(sg.order());
    for x in t.iter() {
        out.insert(inv[x]);
    }
    out
}

/// The two-sided membership condition: for a, b inside and c anywhere,
/// c lies in the set exactly when a b' c does.
fn classical_coset(sg: &FiniteSemigroup, inv: &[usize], c: &ElemSet) -> bool {
    for a in c.iter() {
        for b in c.iter() {
            let ab = sg.mul(a, inv[b]);
            for s in 0..sg.order() {
                if c.contains(s) != c.contains(sg.mul(ab, s)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Confronts the general coset machinery with the classical inverse-semigroup
/// picture on every subset: the membership condition, the closed form
/// C = C-up = C C' C, the groupoid product as an up-closed set product,
/// filters as directed cosets with multiplying basic opens, normality of the
/// idempotents, and the collapse of domination to the natural order.
pub fn inverse_semigroup_cosets_crosscheck(
    s: &StructuredSemigroup,
) -> Result<CheckReport, GenError> {
    let sg = &s.sg;
    let n = sg.order();
    let inv = sg.inverse_map().map_err(|e| GenError::NotInverse { what: e.to_string() })?;
    let idem = sg.idempotents();
    if s.n_set != idem || s.z_set != idem {
        return Err(GenError::NotInverse {
            what: "the designated subsets are not the idempotents".into(),
        });
    }
    if n > MAX_SCAN_ORDER {
        return Err(GenError::TooLarge { order: n, max: MAX_SCAN_ORDER });
    }

    let ctx = Ctx::new(s.clone());
    let cg = build_coset_groupoid(Ctx::new(s.clone()))?;
    let mut rep = CheckReport::new("inverse semigroup crosscheck");

    let mut classical_sets = BTreeSet::new();
    for bits in 0..(1u64 << n) {
        let c = ElemSet::from_bits(n, bits);
        let classical = classical_coset(sg, &inv, &c);
        let general = is_coset(&ctx, &c);
        let ci = set_inverse(sg, &inv, &c);
        let closed = natural_up_closure(sg, &inv, &c) == c
            && sg.set_mul(&sg.set_mul(&c, &ci), &c) == c;
        rep.check(classical == general, "coset-conditions-agree", || {
            format!(
                "{}: membership condition says {classical}, general machinery says {general}",
                sg.describe_set(&c)
            )
        });
        rep.check(classical == closed, "closed-form-agrees", || {
            format!(
                "{}: membership condition says {classical}, closed form says {closed}",
                sg.describe_set(&c)
            )
        });
        if classical && !c.is_empty() {
            classical_sets.insert(c);
        }
    }
    let listed: BTreeSet<ElemSet> = cg.cosets.iter().map(|r| r.members).collect();
    rep.check(classical_sets == listed, "enumeration-agrees", || {
        format!("{} classical cosets against {} listed", classical_sets.len(), listed.len())
    });

    product_crosscheck(&ctx, &cg, sg, &inv, &mut rep);

    let sub = directed_subgroupoid(&cg)?;
    let filters = all_filters(&ctx)?;
    let sub_members: Vec<ElemSet> = sub.ids.iter().map(|&i| cg.cosets[i].members).collect();
    let lhs: BTreeSet<ElemSet> = sub_members.iter().copied().collect();
    let rhs: BTreeSet<ElemSet> = filters.iter().copied().collect();
    rep.check(lhs == rhs, "directed-cosets-are-filters", || {
        format!("{} directed cosets against {} filters", lhs.len(), rhs.len())
    });
    let m = sub_members.len();
    let basic = |a: usize| {
        PointSet::from_iter(m, sub_members.iter().enumerate().filter(|(_, f)| f.contains(a)).map(|(i, _)| i))
    };
    for a in 0..n {
        for b in 0..n {
            let prod = sub.tg.gpd.set_prod(&basic(a), &basic(b));
            rep.check(prod == basic(sg.mul(a, b)), "basic-opens-multiply", || {
                format!(
                    "basic({}) . basic({}) = {:?}, expected basic({})",
                    sg.label(a),
                    sg.label(b),
                    prod.to_vec(),
                    sg.label(sg.mul(a, b))
                )
            });
        }
    }

    for t in 0..n {
        let left = sg.elem_mul_set(t, &idem);
        let right = sg.set_mul_elem(&idem, t);
        rep.check(left == right, "idempotents-normal", || {
            format!("{}E = {}, E{} = {}", sg.label(t), sg.describe_set(&left), sg.label(t), sg.describe_set(&right))
        });
    }
    for a in 0..n {
        for b in 0..n {
            let nat = natural_below(sg, &inv, a, b);
            let dom = ctx.dom.below(a, b);
            rep.check(nat == dom, "natural-order-is-domination", || {
                format!("{} <= {}: natural {nat}, domination {dom}", sg.label(a), sg.label(b))
            });
        }
    }
    Ok(rep)
}

/// Groupoid composability and products against the classical picture: two
/// cosets compose exactly when the natural source of the left matches the
/// natural range of the right, and the product is the up-closed set product.
fn product_crosscheck(
    ctx: &Ctx,
    cg: &crate::cosetgpd::CosetGroupoid,
    sg: &FiniteSemigroup,
    inv: &[usize],
    rep: &mut CheckReport,
) {
    for b in &cg.cosets {
        let bm = b.members;
        let bi = set_inverse(sg, inv, &bm);
        let src = natural_up_closure(sg, inv, &sg.set_mul(&bi, &bm));
        for c in &cg.cosets {
            let cm = c.members;
            let ci = set_inverse(sg, inv, &cm);
            let rng = natural_up_closure(sg, inv, &sg.set_mul(&cm, &ci));
            let composable = src == rng;
            match coset_product(ctx, &bm, &cm) {
                Ok(p) => {
                    rep.check(composable, "composability-agrees", || {
                        format!(
                            "{} . {} composes generally but not classically",
                            sg.describe_set(&bm),
                            sg.describe_set(&cm)
                        )
                    });
                    let want = natural_up_closure(sg, inv, &sg.set_mul(&bm, &cm));
                    rep.check(p == want, "product-is-up-closure", || {
                        format!(
                            "{} . {} = {}, expected {}",
                            sg.describe_set(&bm),
                            sg.describe_set(&cm),
                            sg.describe_set(&p),
                            sg.describe_set(&want)
                        )
                    });
                }
                Err(CosetError::NotComposable { .. }) => {
                    rep.check(!composable, "composability-agrees", || {
                        format!(
                            "{} . {} composes classically but not generally",
                            sg.describe_set(&bm),
                            sg.describe_set(&cm)
                        )
                    });
                }
                Err(e) => rep.violate("product-computes", e.to_string()),
            }
        }
    }
}

/// Runs the full coset pipeline on a semilattice and checks it lands on the
/// filter spectrum: same subsets, same basic opens, same topology.
pub fn semilattice_matches_general_pipeline(
    s: &StructuredSemigroup,
) -> Result<CheckReport, GenError> {
    let spectrum = filter_spectrum(&s.sg)?;
    let cg = build_coset_groupoid(Ctx::new(s.clone()))?;
    let n = s.order();
    let mut rep = CheckReport::new("semilattice pipeline coincidence");
    rep.check(cg.cosets.len() == spectrum.filters.len(), "point-count", || {
        format!("{} cosets against {} filters", cg.cosets.len(), spectrum.filters.len())
    });
    let mut align = Vec::with_capacity(spectrum.filters.len());
    for f in &spectrum.filters {
        match cg.id_of(f) {
            Some(c) => align.push(c),
            None => {
                rep.violate(
                    "cosets-are-filters",
                    format!("filter {} is not a coset", s.sg.describe_set(f)),
                );
                return Ok(rep);
            }
        }
    }
    for a in 0..n {
        let mapped: BTreeSet<usize> = spectrum.basic[a].iter().map(|i| align[i]).collect();
        let slice: BTreeSet<usize> = cg.slice_of(a).iter().collect();
        rep.check(mapped == slice, "basic-opens-match", || {
            format!("basic({}) lands on {:?}, slice is {:?}", s.sg.label(a), mapped, slice)
        });
    }
    for (i, f) in spectrum.filters.iter().enumerate() {
        let mapped: BTreeSet<usize> =
            spectrum.topology.min_nbhd(i).iter().map(|j| align[j]).collect();
        let there: BTreeSet<usize> = cg.tg.top.min_nbhd(align[i]).iter().collect();
        rep.check(mapped == there, "topologies-match", || {
            format!(
                "minimal neighbourhood of {} lands on {:?}, coset side has {:?}",
                s.sg.describe_set(f),
                mapped,
                there
            )
        });
    }
    Ok(rep)
}

/// The symmetric inverse monoid on n letters: all partial injections, with
/// multiplication "apply right, then left" and N = Z = the idempotents.
/// Maps are enumerated by their base-(n+1) encoding, digit 0 for undefined.
pub fn symmetric_inverse_fixture(n: usize) -> Result<StructuredSemigroup, GenError> {
    let mut maps: Vec<Vec<Option<usize>>> = Vec::new();
    let codes = (n as u64 + 1).pow(n as u32);
    'cand: for code in 0..codes {
        let mut m = Vec::with_capacity(n);
        let mut rest = code;
        for _ in 0..n {
            let d = (rest % (n as u64 + 1)) as usize;
            rest /= n as u64 + 1;
            m.push(if d == 0 { None } else { Some(d - 1) });
        }
        let mut seen = vec![false; n];
        for v in m.iter().flatten() {
            if seen[*v] {
                continue 'cand;
            }
            seen[*v] = true;
        }
        maps.push(m);
    }
    if maps.len() > MAX_ORDER {
        return Err(CoreError::OrderTooLarge { order: maps.len(), max: MAX_ORDER }.into());
    }
    let compose = |f: &[Option<usize>], g: &[Option<usize>]| -> Vec<Option<usize>> {
        (0..n).map(|x| g[x].and_then(|y| f[y])).collect()
    };
    let index_of = |m: &Vec<Option<usize>>| {
        maps.iter().position(|k| k == m).expect("composition left the enumerated maps")
    };
    let mul: Vec<Vec<usize>> = maps
        .iter()
        .map(|f| maps.iter().map(|g| index_of(&compose(f, g))).collect())
        .collect();
    let labels: Vec<String> = maps
        .iter()
        .map(|m| {
            let pairs: Vec<String> = m
                .iter()
                .enumerate()
                .filter_map(|(x, y)| y.map(|y| format!("{x}>{y}")))
                .collect();
            if pairs.is_empty() {
                "0".to_string()
            } else if m.iter().enumerate().all(|(x, y)| *y == Some(x)) {
                "id".to_string()
            } else {
                format!("[{}]", pairs.join(","))
            }
        })
        .collect();
    let sg = validate_semigroup(&mul, Some(labels), MAX_ORDER)?;
    let idem = sg.idempotents();
    Ok(validate_structured(sg, idem, idem)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chain3_fixture, null_fixture, ps2_fixture, z3_fixture};

    fn sets(sl: &FiniteSemigroup, masks: &[&[usize]]) -> Vec<ElemSet> {
        masks.iter().map(|m| ElemSet::from_iter(sl.order(), m.iter().copied())).collect()
    }

    #[test]
    fn chain_spectrum_matches_hand_enumeration() {
        let sl = chain3_fixture().sg;
        let spec = filter_spectrum(&sl).unwrap();
        assert_eq!(spec.filters, sets(&sl, &[&[2], &[1, 2], &[0, 1, 2]]));
        let counts: Vec<usize> = spec.basic.iter().map(|b| b.to_vec().len()).collect();
        assert_eq!(counts, vec![1, 2, 3]);
        spec.report().expect_clean();

        let one = validate_semigroup(&[vec![0]], None, MAX_ORDER).unwrap();
        let spec = filter_spectrum(&one).unwrap();
        assert_eq!(spec.filters.len(), 1);
        spec.report().expect_clean();
    }

    #[test]
    fn powerset_spectrum_is_faithful() {
        let sl = ps2_fixture().sg;
        let spec = filter_spectrum(&sl).unwrap();
        assert_eq!(spec.filters.len(), 4);
        for a in 0..4 {
            for b in (a + 1)..4 {
                assert_ne!(spec.basic[a], spec.basic[b]);
            }
        }
        spec.report().expect_clean();
    }

    #[test]
    fn non_semilattices_are_rejected() {
        let null = null_fixture().sg;
        assert!(matches!(filter_spectrum(&null), Err(GenError::NotSemilattice { .. })));
        let z3 = z3_fixture().sg;
        assert!(matches!(filter_spectrum(&z3), Err(GenError::NotSemilattice { .. })));
    }

    #[test]
    fn universal_factor_is_the_identity_on_the_spectrum_itself() {
        for s in [chain3_fixture(), ps2_fixture()] {
            let spec = filter_spectrum(&s.sg).unwrap();
            let fac = filter_universal_factor(&spec, &spec.topology, &spec.basic).unwrap();
            assert_eq!(fac.phi, (0..spec.filters.len()).collect::<Vec<_>>());
            fac.report.expect_clean();
        }
    }

    #[test]
    fn universal_factor_sends_elements_to_principal_filters() {
        for s in [chain3_fixture(), ps2_fixture()] {
            let sl = s.sg;
            let spec = filter_spectrum(&sl).unwrap();
            let n = sl.order();
            let theta: Vec<PointSet> = (0..n)
                .map(|a| PointSet::from_iter(n, (0..n).filter(|&b| meet_below(&sl, b, a))))
                .collect();
            let space = generate_topology(n, theta.clone());
            let fac = filter_universal_factor(&spec, &space, &theta).unwrap();
            fac.report.expect_clean();
            for b in 0..n {
                assert_eq!(spec.filters[fac.phi[b]], spec.principal(b));
            }
        }
    }

    #[test]
    fn broken_representations_are_rejected() {
        let sl = chain3_fixture().sg;
        let spec = filter_spectrum(&sl).unwrap();
        let space = FiniteTopology::discrete(2);

        let gap = vec![PointSet::empty(2), PointSet::empty(2), PointSet::singleton(2, 0)];
        match filter_universal_factor(&spec, &space, &gap) {
            Err(GenError::NotRepresentation { report }) => {
                assert!(report.violations.iter().any(|v| v.law == "covering"));
            }
            Err(e) => panic!("expected a covering failure, got {e}"),
            Ok(_) => panic!("expected a covering failure, got a factorization"),
        }

        let skew = vec![PointSet::full(2), PointSet::empty(2), PointSet::singleton(2, 0)];
        match filter_universal_factor(&spec, &space, &skew) {
            Err(GenError::NotRepresentation { report }) => {
                assert!(report.violations.iter().any(|v| v.law == "meet-to-intersection"));
            }
            Err(e) => panic!("expected a meet failure, got {e}"),
            Ok(_) => panic!("expected a meet failure, got a factorization"),
        }
    }

    #[test]
    fn crosscheck_passes_on_the_inverse_fixtures() {
        for name in ["chain3", "ps2", "z3", "i2"] {
            let s = structured_fixture(name).unwrap();
            inverse_semigroup_cosets_crosscheck(&s).unwrap().expect_clean();
        }
    }

    #[test]
    fn crosscheck_rejects_the_nilpotent_fixture() {
        let s = null_fixture();
        assert!(matches!(
            inverse_semigroup_cosets_crosscheck(&s),
            Err(GenError::NotInverse { .. })
        ));
    }

    #[test]
    fn group_cosets_are_the_subgroup_cosets() {
        let s = z3_fixture();
        let cg = build_coset_groupoid(Ctx::new(s)).unwrap();
        let got: BTreeSet<Vec<usize>> =
            cg.cosets.iter().map(|r| r.members.to_vec()).collect();
        let want: BTreeSet<Vec<usize>> =
            [vec![0], vec![1], vec![2], vec![0, 1, 2]].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn semilattice_pipeline_lands_on_the_spectrum() {
        for s in [chain3_fixture(), ps2_fixture()] {
            semilattice_matches_general_pipeline(&s).unwrap().expect_clean();
        }
        assert!(matches!(
            semilattice_matches_general_pipeline(&null_fixture()),
            Err(GenError::NotSemilattice { .. })
        ));
    }

    #[test]
    fn fixtures_resolve_by_name() {
        assert!(matches!(
            gen_fixture("z3"),
            Ok(GenFixture::Semigroup(s)) if s.order() == 3
        ));
        assert!(matches!(gen_fixture("twist"), Ok(GenFixture::Bundle(_))));
        assert!(matches!(gen_fixture("nope"), Err(GenError::UnknownFixture { .. })));
    }

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for slot in 0..k {
                let mut q = p.clone();
                q.insert(slot, k - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn generated_monoid_is_isomorphic_to_the_hand_rolled_table() {
        let gen = symmetric_inverse_fixture(2).unwrap();
        let hand = crate::fixtures::i2_fixture();
        assert_eq!(gen.order(), 7);
        let found = permutations(7).into_iter().any(|p| {
            (0..7).all(|a| {
                (0..7).all(|b| p[gen.sg.mul(a, b)] == hand.sg.mul(p[a], p[b]))
            })
        });
        assert!(found, "no isomorphism onto the hand-rolled table");
        inverse_semigroup_cosets_crosscheck(&gen).unwrap().expect_clean();
    }

    #[test]
    fn three_letter_monoid_validates_at_order_34() {
        let s = symmetric_inverse_fixture(3).unwrap();
        assert_eq!(s.order(), 34);
        assert_eq!(s.sg.idempotents().len(), 8);
        assert!(s.sg.is_inverse_semigroup());
        assert!(s.flags.n_diagonal);
        let inv = s.sg.inverse_map().unwrap();
        for t in 0..s.order() {
            let idem = s.sg.idempotents();
            assert_eq!(s.sg.elem_mul_set(t, &idem), s.sg.set_mul_elem(&idem, t));
        }
        assert_eq!(inv.len(), 34);
    }
}
