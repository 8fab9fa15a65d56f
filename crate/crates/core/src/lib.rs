//! Workbench for finite structured semigroups.
//!
//! A structured semigroup is a triple (S, N, Z): a finite semigroup S with a
//! distinguished subsemigroup N and a central-in-N subsemigroup Z subject to
//! normality conditions. The crate builds the domination preorder carried by
//! such a triple, enumerates its cosets, assembles the coset groupoid and the
//! coset bundle over it, extracts filter subgroupoids, and checks the whole
//! tower of algebraic and topological laws exhaustively at small orders.
//!
//! Everything is deterministic: set enumerations are sorted by bitmask, maps
//! are BTree-backed, and reports serialize to stable JSON.

pub mod bundle;
pub mod coset;
pub mod cosetgpd;
pub mod filters;
pub mod fixtures;
pub mod gen;
pub mod laws;
pub mod morph;
pub mod order;
pub mod report;
pub mod sections;
pub mod semigroup;
pub mod sets;
pub mod topo;

pub use bundle::{
    build_coset_bundle, bundle_representation, check_faithful, equivalence_classes, equivalent,
    BundleError, BundlePoint, CosetBundle, Faithfulness,
};
pub use coset::{all_cosets, coset_closure, is_atlas, is_coset, CosetRecord};
pub use filters::{
    all_filters, directed_subgroupoid, is_directed, is_filter, triangle, ultrafilters,
    FilterError, SubGroupoid,
};
pub use gen::{
    filter_spectrum, filter_universal_factor, gen_fixture, inverse_semigroup_cosets_crosscheck,
    is_meet_filter, meet_below, natural_below, semilattice_matches_general_pipeline,
    symmetric_inverse_fixture, FilterFactorization, FilterSpectrum, GenError, GenFixture,
};
pub use laws::{
    battery_passed, bundle_battery, render_laws, theorem_battery, LawError,
    MAX_DIRECTED_SCAN_ORDER, MAX_PAIR_SCAN_ORDER,
};
pub use morph::{
    directed_bundle, directed_iota, directed_sections, factor_bundle, factor_bundle_directed,
    factor_through_cosets, factor_through_directed, identity_pierce, pierce, pullback_bundle,
    triangle_relation, BundleFactorization, CosetFactorization, DirectedBundle,
    DirectedBundleFactorization, DirectedFactorization, DirectedIota, GroupoidRelation,
    MorphError, PierceMorphism, PullbackBundle,
};
pub use order::{Ctx, Domination};
pub use report::{CheckReport, LawReport, Violation};
pub use semigroup::{
    parse_structured, validate_structured, FiniteSemigroup, SemigroupInput, StructuredSemigroup,
    MAX_ORDER, MAX_RELATION_PAIRS, MAX_SECTIONS,
};
pub use sets::{ElemSet, PointSet};
pub use topo::{
    check_bundle, check_etale, check_etale_bundle, check_groupoid, generate_topology,
    twisted_bundle, FiniteGroupoid, FiniteTopology, GroupoidBundle, GroupoidData, TopGroupoid,
};
