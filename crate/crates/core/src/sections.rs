//! Slice-sections of a groupoid bundle and the structured semigroup they
//! carry.
//!
//! A slice-section picks one total-space element over each point of an open
//! slice of the base, continuously. Sections multiply by multiplying their
//! values over composable pairs; the domains being slices makes the result a
//! function again. The full family is an inverse semigroup, its sections with
//! unit domains form the diagonal, and the idempotents are the sections with
//! unit values; the trio is validated as a structured semigroup rather than
//! trusted.

use std::collections::BTreeMap;

use crate::report::CheckReport;
use crate::semigroup::{validate_semigroup, validate_structured, StructuredSemigroup};
use crate::sets::{ElemSet, PointSet};
use crate::topo::{is_slice, GroupoidBundle};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SectionError {
    #[error("base has {size} arrows, above the slice-enumeration cap {max}")]
    BaseTooLarge { size: usize, max: usize },
    #[error("{needed} sections would be enumerated, above the cap {max}")]
    TooManySections { needed: usize, max: usize },
    #[error("section structure disagrees with itself: {what}")]
    Inconsistent { what: String },
}

/// Max base arrows for the subset scan that finds the open slices.
pub const MAX_SECTION_BASE: usize = 20;

/// A partial map from base arrows to total arrows. The domain is the key set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SliceSection {
    pub values: BTreeMap<usize, usize>,
}

impl SliceSection {
    pub fn empty() -> Self {
        SliceSection { values: BTreeMap::new() }
    }

    pub fn domain(&self, base_size: usize) -> PointSet {
        PointSet::from_iter(base_size, self.values.keys().copied())
    }

    pub fn at(&self, g: usize) -> Option<usize> {
        self.values.get(&g).copied()
    }

    /// Compact display: sorted g:f pairs.
    pub fn describe(&self) -> String {
        let items: Vec<String> =
            self.values.iter().map(|(g, f)| format!("{g}:{f}")).collect();
        format!("{{{}}}", items.join(","))
    }
}

/// Domain an open slice, values lift the projection, and the map respects
/// minimal neighbourhoods.
pub fn check_slice_section(bundle: &GroupoidBundle, a: &SliceSection) -> CheckReport {
    let mut rep = CheckReport::new("slice-section");
    let base = &bundle.base;
    let dom = a.domain(base.gpd.size());
    rep.check(base.top.is_open(&dom) && is_slice(&base.gpd, &dom), "domain-open-slice", || {
        format!("domain {dom:?}")
    });
    for (&g, &f) in &a.values {
        rep.check(bundle.proj[f] == g, "lifts-projection", || format!("{g} -> {f}"));
    }
    for (&g, &f) in &a.values {
        for h in base.top.min_nbhd(g).iter() {
            if let Some(fh) = a.at(h) {
                rep.check(
                    bundle.total.top.min_nbhd(f).contains(fh),
                    "continuous",
                    || format!("at {g}, nearby {h}"),
                );
            }
        }
    }
    rep
}

/// ab(gh) = a(g) b(h) over composable pairs; dom(ab) = dom(a) dom(b).
pub fn section_product(
    bundle: &GroupoidBundle,
    a: &SliceSection,
    b: &SliceSection,
) -> Result<SliceSection, SectionError> {
    let base = &bundle.base.gpd;
    let total = &bundle.total.gpd;
    let mut values = BTreeMap::new();
    for (&g, &fa) in &a.values {
        for (&h, &fb) in &b.values {
            let Some(gh) = base.prod(g, h) else { continue };
            let fv = total.prod(fa, fb).ok_or_else(|| SectionError::Inconsistent {
                what: format!("values over composable pair ({g}, {h}) do not compose"),
            })?;
            if let Some(prev) = values.insert(gh, fv) {
                if prev != fv {
                    return Err(SectionError::Inconsistent {
                        what: format!("two factorizations of {gh} give different values"),
                    });
                }
            }
        }
    }
    Ok(SliceSection { values })
}

/// a⁻¹(g) = a(g⁻¹)⁻¹ on the inverted domain.
pub fn section_inverse(bundle: &GroupoidBundle, a: &SliceSection) -> SliceSection {
    let base = &bundle.base.gpd;
    let total = &bundle.total.gpd;
    let values = a.values.iter().map(|(&g, &f)| (base.inv(g), total.inv(f))).collect();
    SliceSection { values }
}

/// Every slice-section of the bundle, in sorted order. The open slices come
/// from a subset scan of the base, so the base must be small; the assignment
/// count is guarded before any assignment is materialized.
pub fn all_slice_sections(
    bundle: &GroupoidBundle,
    max_sections: usize,
) -> Result<Vec<SliceSection>, SectionError> {
    let base = &bundle.base;
    let n = base.gpd.size();
    if n > MAX_SECTION_BASE {
        return Err(SectionError::BaseTooLarge { size: n, max: MAX_SECTION_BASE });
    }
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (f, &g) in bundle.proj.iter().enumerate() {
        fibers[g].push(f);
    }
    let mut slices = Vec::new();
    let mut needed = 0usize;
    for mask in 0u64..(1 << n) {
        let set = PointSet::from_iter(n, (0..n).filter(|i| mask >> i & 1 == 1));
        if base.top.is_open(&set) && is_slice(&base.gpd, &set) {
            let count: usize = set.iter().map(|g| fibers[g].len()).product();
            needed = needed.saturating_add(count);
            if needed > max_sections {
                return Err(SectionError::TooManySections { needed, max: max_sections });
            }
            slices.push(set);
        }
    }
    let mut out = Vec::new();
    for slice in &slices {
        let arrows: Vec<usize> = slice.iter().collect();
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        for &g in &arrows {
            let mut next = Vec::new();
            for partial in &stack {
                for &f in &fibers[g] {
                    let mut ext = partial.clone();
                    ext.push(f);
                    next.push(ext);
                }
            }
            stack = next;
        }
        for assignment in stack {
            let s = SliceSection {
                values: arrows.iter().copied().zip(assignment).collect(),
            };
            if check_slice_section(bundle, &s).passed() {
                out.push(s);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The slice-sections assembled into a structured semigroup: products by
/// table lookup, the unit-domain sections as N, the unit-valued sections as
/// Z. Validation runs the full structured-semigroup axioms.
pub struct SectionSemigroup {
    pub sections: Vec<SliceSection>,
    pub triple: StructuredSemigroup,
}

pub fn section_semigroup(
    bundle: &GroupoidBundle,
    max_sections: usize,
) -> Result<SectionSemigroup, SectionError> {
    let sections = all_slice_sections(bundle, max_sections)?;
    let index: BTreeMap<&SliceSection, usize> =
        sections.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let k = sections.len();
    let mut mul = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in 0..k {
            let p = section_product(bundle, &sections[i], &sections[j])?;
            mul[i][j] = *index.get(&p).ok_or_else(|| SectionError::Inconsistent {
                what: format!("product of sections {i} and {j} escaped the enumeration"),
            })?;
        }
    }
    let labels = sections.iter().map(|s| s.describe()).collect();
    let sg = validate_semigroup(&mul, Some(labels), k.max(1))
        .map_err(|e| SectionError::Inconsistent { what: e.to_string() })?;
    let base_units = bundle.base.gpd.units();
    let total_units = bundle.total.gpd.units();
    let n_set = ElemSet::from_iter(
        k,
        (0..k).filter(|&i| {
            sections[i].values.keys().all(|g| base_units.contains(*g))
        }),
    );
    let z_set = ElemSet::from_iter(
        k,
        (0..k).filter(|&i| {
            sections[i].values.values().all(|f| total_units.contains(*f))
        }),
    );
    let triple = validate_structured(sg, n_set, z_set)
        .map_err(|e| SectionError::Inconsistent { what: e.to_string() })?;
    Ok(SectionSemigroup { sections, triple })
}

/// S_g: the sections defined at g, as a set of section ids.
pub fn sections_at(sections: &[SliceSection], g: usize) -> ElemSet {
    ElemSet::from_iter(
        sections.len(),
        sections.iter().enumerate().filter(|(_, s)| s.at(g).is_some()).map(|(i, _)| i),
    )
}

/// S^f: the sections taking the value f (at the base point under f).
pub fn sections_through(
    bundle: &GroupoidBundle,
    sections: &[SliceSection],
    f: usize,
) -> ElemSet {
    let g = bundle.proj[f];
    ElemSet::from_iter(
        sections.len(),
        sections
            .iter()
            .enumerate()
            .filter(|(_, s)| s.at(g) == Some(f))
            .map(|(i, _)| i),
    )
}

/// Local inverses: every section through g admits a section through g⁻¹
/// inverting its values on the domain of some third section through g.
/// Returns a failing (g, section id) pair if the property fails.
pub fn is_local_inverse(
    bundle: &GroupoidBundle,
    sections: &[SliceSection],
) -> Option<(usize, usize)> {
    let base = &bundle.base.gpd;
    let total = &bundle.total.gpd;
    for g in 0..base.size() {
        for (ai, a) in sections.iter().enumerate() {
            if a.at(g).is_none() {
                continue;
            }
            let found = sections.iter().any(|ap| {
                if ap.at(base.inv(g)).is_none() {
                    return false;
                }
                sections.iter().any(|b| {
                    b.at(g).is_some()
                        && b.values.keys().all(|&h| {
                            match (a.at(h), ap.at(base.inv(h))) {
                                (Some(fa), Some(fp)) => fp == total.inv(fa),
                                _ => false,
                            }
                        })
                })
            });
            if !found {
                return Some((g, ai));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{triv_bundle, twist_bundle};
    use crate::semigroup::{validate_semigroup, MAX_SECTIONS};
    use crate::topo::{
        generate_topology, twisted_bundle, FiniteGroup, FiniteGroupoid, GroupoidData,
        TopGroupoid,
    };

    fn unit_only_sierpinski() -> TopGroupoid {
        let data = GroupoidData {
            size: 2,
            inv: vec![0, 1],
            prod: vec![Some(0), None, None, Some(1)],
            labels: Some(vec!["u0".into(), "u1".into()]),
        };
        let gpd = FiniteGroupoid::from_data(data).unwrap();
        let top = generate_topology(2, vec![PointSet::singleton(2, 1)]);
        TopGroupoid { gpd, top }
    }

    fn z2() -> FiniteGroup {
        FiniteGroup::new(
            validate_semigroup(&[vec![0, 1], vec![1, 0]], None, 64).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn section_counts_are_frozen() {
        let triv = all_slice_sections(&triv_bundle(), MAX_SECTIONS).unwrap();
        assert_eq!(triv.len(), 17);
        let twist = all_slice_sections(&twist_bundle(), MAX_SECTIONS).unwrap();
        assert_eq!(twist.len(), 5);
    }

    #[test]
    fn continuity_filter_cuts_sections_on_a_non_discrete_base() {
        let base = unit_only_sierpinski();
        let bundle = twisted_bundle(&base, &z2(), &|_, _| 0).unwrap();
        // Over the full two-unit slice only the locked assignments survive:
        // the minimal neighbourhood of u0 contains u1, forcing equal fiber
        // components. 1 (empty) + 2 (over {u1}) + 2 (over both) = 5.
        let got = all_slice_sections(&bundle, MAX_SECTIONS).unwrap();
        assert_eq!(got.len(), 5);
        // The same bundle with everything discrete frees {u0} as a domain
        // and unlocks the mixed assignments: 1 + 2 + 2 + 4 = 9.
        let disc_base = TopGroupoid::discrete(base.gpd.clone());
        let disc = twisted_bundle(&disc_base, &z2(), &|_, _| 0).unwrap();
        assert_eq!(all_slice_sections(&disc, MAX_SECTIONS).unwrap().len(), 9);
    }

    #[test]
    fn identity_bundle_over_sierpinski_is_a_meet_chain() {
        let base = unit_only_sierpinski();
        let bundle = GroupoidBundle {
            total: base.clone(),
            base: base.clone(),
            proj: vec![0, 1],
        };
        let ss = section_semigroup(&bundle, MAX_SECTIONS).unwrap();
        assert_eq!(ss.sections.len(), 3);
        // Sorted order: {}, {0:0,1:1}, {1:1}; products are domain meets.
        let m = &ss.triple.sg;
        assert_eq!(m.mul(1, 2), 2);
        assert_eq!(m.mul(2, 1), 2);
        assert_eq!(m.mul(0, 1), 0);
        assert!(ss.triple.flags.is_structured);
        assert_eq!(ss.triple.n_set, ElemSet::full(3));
        assert_eq!(ss.triple.z_set, ElemSet::full(3));
    }

    #[test]
    fn section_semigroups_of_the_bundle_fixtures_are_structured_and_inverse() {
        for (name, bundle) in [("triv", triv_bundle()), ("twist", twist_bundle())] {
            let ss = section_semigroup(&bundle, MAX_SECTIONS).unwrap();
            let t = &ss.triple;
            assert!(t.flags.is_structured, "{name}");
            assert!(t.flags.z_symmetric, "{name}");
            assert!(t.flags.n_diagonal, "{name}");
            assert!(t.sg.is_inverse_semigroup(), "{name}");
            // The empty section is the zero, and it is idempotent-valued.
            assert_eq!(t.flags.zero, Some(0), "{name}");
            assert!(t.z_set.contains(0), "{name}");
            // Idempotent sections are exactly the unit-valued ones.
            assert_eq!(t.sg.idempotents(), t.z_set, "{name}");
            // N strictly exceeds Z exactly when some unit-domain section
            // takes a non-unit value; the twisted fixture has such sections.
            assert!(t.z_set.is_subset(&t.n_set), "{name}");
            assert!(is_local_inverse(&bundle, &ss.sections).is_none(), "{name}");
            for s in &ss.sections {
                check_slice_section(&bundle, s).expect_clean();
                let inv = section_inverse(&bundle, s);
                check_slice_section(&bundle, &inv).expect_clean();
                // a a⁻¹ a = a in the inverse semigroup of sections.
                let p = section_product(&bundle, s, &inv).unwrap();
                let p = section_product(&bundle, &p, s).unwrap();
                assert_eq!(&p, s, "{name}");
            }
        }
    }

    #[test]
    fn twist_sections_have_a_non_unit_valued_diagonal() {
        let ss = section_semigroup(&twist_bundle(), MAX_SECTIONS).unwrap();
        // Sorted: {}, {0:0}, {0:1}, {1:2}, {1:3}. The first three sit over
        // the base unit; {0:1} values the non-unit isotropy element (0,-1),
        // so it lies in N but not Z.
        assert_eq!(ss.triple.n_set, ElemSet::from_iter(5, [0, 1, 2]));
        assert_eq!(ss.triple.z_set, ElemSet::from_iter(5, [0, 1]));
    }

    #[test]
    fn products_and_inverses_match_the_paper_formulas() {
        let bundle = triv_bundle();
        let sections = all_slice_sections(&bundle, MAX_SECTIONS).unwrap();
        let base = &bundle.base.gpd;
        for a in &sections {
            for b in &sections {
                let p = section_product(&bundle, a, b).unwrap();
                let dom_prod = base.set_prod(
                    &a.domain(base.size()),
                    &b.domain(base.size()),
                );
                assert_eq!(p.domain(base.size()), dom_prod);
            }
            let inv = section_inverse(&bundle, a);
            assert_eq!(
                inv.domain(base.size()),
                base.set_inv(&a.domain(base.size()))
            );
        }
    }

    // a = asb with as unit-domained iff s inverts b's values over dom(a).
    #[test]
    fn domination_matches_value_inversion_on_domains() {
        let bundle = twist_bundle();
        let ss = section_semigroup(&bundle, MAX_SECTIONS).unwrap();
        let m = &ss.triple.sg;
        let base = &bundle.base.gpd;
        let total = &bundle.total.gpd;
        let k = ss.sections.len();
        for a in 0..k {
            for s in 0..k {
                for b in 0..k {
                    let lhs = m.mul(m.mul(a, s), b) == a
                        && ss.triple.n_set.contains(m.mul(a, s));
                    let rhs = ss.sections[a].values.iter().all(|(&g, _)| {
                        match (
                            ss.sections[s].at(base.inv(g)),
                            ss.sections[b].at(g),
                        ) {
                            (Some(sv), Some(bv)) => sv == total.inv(bv),
                            _ => false,
                        }
                    });
                    assert_eq!(lhs, rhs, "sections ({a}, {s}, {b})");
                }
            }
        }
    }

    #[test]
    fn section_guards_fire() {
        let bundle = triv_bundle();
        assert!(matches!(
            all_slice_sections(&bundle, 3),
            Err(SectionError::TooManySections { .. })
        ));
    }
}
