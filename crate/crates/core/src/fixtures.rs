//! Built-in test subjects: small structured semigroups and etale bundles.
//!
//! Five structured triples cover the degenerate, semilattice, group and
//! inverse-monoid corners of the axioms, and two bundles (a trivial product
//! and a genuinely twisted one) feed the section machinery. Each fixture is
//! constructed programmatically from its defining data, then pushed through
//! the same validators the CLI applies to user input.

use crate::semigroup::{validate_semigroup, validate_structured, StructuredSemigroup};
use crate::sets::ElemSet;
use crate::topo::{
    twisted_bundle, FiniteGroup, FiniteGroupoid, GroupoidBundle, GroupoidData, TopGroupoid,
};

/// Two elements, every product the zero, N = Z = S: the standard example of
/// a structured semigroup with no faithful bundle representation.
pub fn null_fixture() -> StructuredSemigroup {
    let sg = validate_semigroup(
        &[vec![0, 0], vec![0, 0]],
        Some(vec!["0".into(), "a".into()]),
        crate::semigroup::MAX_ORDER,
    )
    .unwrap();
    validate_structured(sg, ElemSet::full(2), ElemSet::full(2)).unwrap()
}

/// Three-element meet chain 0 < e < f, with N = Z = S.
pub fn chain3_fixture() -> StructuredSemigroup {
    let mul: Vec<Vec<usize>> =
        (0..3).map(|a| (0..3).map(|b| a.min(b)).collect()).collect();
    let sg = validate_semigroup(
        &mul,
        Some(vec!["0".into(), "e".into(), "f".into()]),
        crate::semigroup::MAX_ORDER,
    )
    .unwrap();
    validate_structured(sg, ElemSet::full(3), ElemSet::full(3)).unwrap()
}

/// Powerset of a two-point set under intersection, with N = Z = S. Indices
/// are the subsets read as bitmasks.
pub fn ps2_fixture() -> StructuredSemigroup {
    let mul: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a & b).collect()).collect();
    let sg = validate_semigroup(
        &mul,
        Some(vec!["{}".into(), "{x}".into(), "{y}".into(), "{x,y}".into()]),
        crate::semigroup::MAX_ORDER,
    )
    .unwrap();
    validate_structured(sg, ElemSet::full(4), ElemSet::full(4)).unwrap()
}

/// Cyclic group of order three with N = Z = {e}: domination degenerates to
/// equality and the cosets are exactly the group elements plus the group.
pub fn z3_fixture() -> StructuredSemigroup {
    let mul: Vec<Vec<usize>> =
        (0..3).map(|a| (0..3).map(|b| (a + b) % 3).collect()).collect();
    let sg = validate_semigroup(
        &mul,
        Some(vec!["e".into(), "g".into(), "g2".into()]),
        crate::semigroup::MAX_ORDER,
    )
    .unwrap();
    validate_structured(sg, ElemSet::singleton(3, 0), ElemSet::singleton(3, 0)).unwrap()
}

// Partial injections on {0, 1} as sorted (input, output) pair lists; mul is
// "apply right, then left".
const I2_MAPS: [&[(usize, usize)]; 7] = [
    &[],
    &[(0, 0)],
    &[(0, 1)],
    &[(1, 0)],
    &[(1, 1)],
    &[(0, 0), (1, 1)],
    &[(0, 1), (1, 0)],
];

fn i2_compose(f: &[(usize, usize)], g: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &(x, y) in g {
        for &(y2, z) in f {
            if y == y2 {
                out.push((x, z));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Symmetric inverse monoid on two points: all seven partial injections,
/// with N = Z = the idempotents.
pub fn i2_fixture() -> StructuredSemigroup {
    let index_of = |m: &[(usize, usize)]| {
        I2_MAPS.iter().position(|k| *k == m).expect("composition left the seven maps")
    };
    let mul: Vec<Vec<usize>> = (0..7)
        .map(|a| (0..7).map(|b| index_of(&i2_compose(I2_MAPS[a], I2_MAPS[b]))).collect())
        .collect();
    let labels = vec![
        "0".into(),
        "[0>0]".into(),
        "[0>1]".into(),
        "[1>0]".into(),
        "[1>1]".into(),
        "id".into(),
        "sw".into(),
    ];
    let sg = validate_semigroup(&mul, Some(labels), crate::semigroup::MAX_ORDER).unwrap();
    let idem = sg.idempotents();
    validate_structured(sg, idem, idem).unwrap()
}

fn z2_group() -> FiniteGroup {
    let sg = validate_semigroup(
        &[vec![0, 1], vec![1, 0]],
        Some(vec!["1".into(), "-1".into()]),
        crate::semigroup::MAX_ORDER,
    )
    .unwrap();
    FiniteGroup::new(sg).unwrap()
}

/// Pair groupoid on two units times a discrete Z2, untwisted: the smallest
/// bundle whose base has a non-unit slice.
pub fn triv_bundle() -> GroupoidBundle {
    let base_gpd = FiniteGroupoid::from_data(GroupoidData::pair_groupoid(2)).unwrap();
    let base = TopGroupoid::discrete(base_gpd);
    let sigma = |_: usize, _: usize| 0usize;
    twisted_bundle(&base, &z2_group(), &sigma).unwrap()
}

/// One-unit Z2 groupoid twisted by the sign cocycle: the total space is
/// cyclic of order four, so the bundle does not split as a product.
pub fn twist_bundle() -> GroupoidBundle {
    let z2 = validate_semigroup(
        &[vec![0, 1], vec![1, 0]],
        Some(vec!["u".into(), "s".into()]),
        crate::semigroup::MAX_ORDER,
    )
    .unwrap();
    let base_gpd = FiniteGroupoid::from_data(GroupoidData::from_group(&z2, vec![0, 1])).unwrap();
    let base = TopGroupoid::discrete(base_gpd);
    let sigma = |x: usize, y: usize| usize::from(x == 1 && y == 1);
    twisted_bundle(&base, &z2_group(), &sigma).unwrap()
}

/// The slice-section semigroup of the untwisted bundle: 17 sections over the
/// pair groupoid, an inverse monoid with a genuinely non-commutative part.
pub fn sect_triv_fixture() -> StructuredSemigroup {
    crate::sections::section_semigroup(&triv_bundle(), crate::semigroup::MAX_SECTIONS)
        .unwrap()
        .triple
}

/// The slice-section semigroup of the twisted bundle: five sections whose
/// diagonal strictly exceeds its idempotents.
pub fn sect_twist_fixture() -> StructuredSemigroup {
    crate::sections::section_semigroup(&twist_bundle(), crate::semigroup::MAX_SECTIONS)
        .unwrap()
        .triple
}

pub const STRUCTURED_FIXTURE_NAMES: [&str; 5] = ["null", "chain3", "ps2", "z3", "i2"];
pub const EXTENDED_FIXTURE_NAMES: [&str; 7] =
    ["null", "chain3", "ps2", "z3", "i2", "sect-triv", "sect-twist"];
pub const BUNDLE_FIXTURE_NAMES: [&str; 2] = ["triv", "twist"];

pub fn structured_fixture(name: &str) -> Option<StructuredSemigroup> {
    match name {
        "null" => Some(null_fixture()),
        "chain3" => Some(chain3_fixture()),
        "ps2" => Some(ps2_fixture()),
        "z3" => Some(z3_fixture()),
        "i2" => Some(i2_fixture()),
        "sect-triv" => Some(sect_triv_fixture()),
        "sect-twist" => Some(sect_twist_fixture()),
        _ => None,
    }
}

pub fn bundle_fixture(name: &str) -> Option<GroupoidBundle> {
    match name {
        "triv" => Some(triv_bundle()),
        "twist" => Some(twist_bundle()),
        _ => None,
    }
}

/// The five hand-built structured fixtures, paired with their names.
pub fn structured_fixtures() -> Vec<(&'static str, StructuredSemigroup)> {
    STRUCTURED_FIXTURE_NAMES
        .iter()
        .map(|n| (*n, structured_fixture(n).unwrap()))
        .collect()
}

/// The hand-built fixtures plus the two induced section semigroups; the law
/// battery quantifies over these.
pub fn structured_fixtures_extended() -> Vec<(&'static str, StructuredSemigroup)> {
    EXTENDED_FIXTURE_NAMES
        .iter()
        .map(|n| (*n, structured_fixture(n).unwrap()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::SemigroupInput;
    use crate::topo::check_etale_bundle;

    #[test]
    fn all_structured_fixtures_validate_with_full_flags() {
        for (name, f) in structured_fixtures() {
            assert!(f.flags.is_structured, "{name}");
            assert!(f.flags.z_symmetric, "{name} not symmetric");
            assert!(f.flags.n_diagonal, "{name} not diagonal");
            assert!(f.flags.n_normal && f.flags.z_normal, "{name} normality");
        }
    }

    #[test]
    fn zeros_land_in_z_except_for_the_group() {
        assert_eq!(null_fixture().zero_in_z(), Some(0));
        assert_eq!(chain3_fixture().zero_in_z(), Some(0));
        assert_eq!(ps2_fixture().zero_in_z(), Some(0));
        assert_eq!(i2_fixture().zero_in_z(), Some(0));
        assert_eq!(z3_fixture().zero_in_z(), None);
    }

    #[test]
    fn i2_table_spot_checks() {
        let f = i2_fixture();
        let m = &f.sg;
        assert_eq!(m.mul(6, 6), 5, "swap squared is the identity");
        assert_eq!(m.mul(2, 3), 4);
        assert_eq!(m.mul(3, 2), 1);
        assert_eq!(m.mul(6, 2), 1);
        assert_eq!(m.mul(2, 6), 4);
        assert_eq!(m.idempotents(), ElemSet::from_iter(7, [0, 1, 4, 5]));
        assert!(m.is_inverse_semigroup());
        assert_eq!(m.inverse_map().unwrap(), vec![0, 1, 3, 2, 4, 5, 6]);
        assert_eq!(crate::semigroup::centre_of(m, &ElemSet::full(7)), ElemSet::from_iter(7, [0, 5]));
        assert_eq!(f.n_set, ElemSet::from_iter(7, [0, 1, 4, 5]));
    }

    #[test]
    fn bundle_fixtures_are_etale_bundles() {
        let triv = triv_bundle();
        check_etale_bundle(&triv).expect_clean();
        assert_eq!(triv.total.gpd.size(), 8);
        assert_eq!(triv.base.gpd.units().count(), 2);
        let twist = twist_bundle();
        check_etale_bundle(&twist).expect_clean();
        assert_eq!(twist.total.gpd.size(), 4);
    }

    #[test]
    fn structured_fixtures_round_trip_through_json() {
        for (name, f) in structured_fixtures() {
            let json = serde_json::to_string(&SemigroupInput::from_structured(&f)).unwrap();
            let back = crate::semigroup::parse_structured(&json, crate::semigroup::MAX_ORDER)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back.sg.table(), f.sg.table(), "{name}");
            assert_eq!(back.n_set, f.n_set, "{name}");
            assert_eq!(back.z_set, f.z_set, "{name}");
        }
    }
}
