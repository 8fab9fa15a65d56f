//! Finite semigroups with a distinguished pair of subsemigroups.
//!
//! A structured triple (S, N, Z) consists of a finite semigroup S, a
//! Z-trinormal subsemigroup N, and a binormal subsemigroup Z contained in the
//! centre of N. All axioms are verified by exhaustive quantifier scans over
//! the multiplication table; every rejection carries the violating tuple.

use crate::sets::ElemSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on carrier order for which exhaustive subset enumeration is
/// attempted downstream. Element sets are single-word bitmasks, so the cap
/// also keeps `ElemSet` sound.
pub const MAX_ORDER: usize = 64;

/// Default cap on the number of slice-sections enumerated from a bundle.
/// The count grows as a sum of |fiber|^|slice| terms and explodes quickly.
pub const MAX_SECTIONS: usize = 4096;

/// Largest carrier product |G|*|H| for which factorization uniqueness is
/// additionally confirmed by scanning all 2^(|G|*|H|) relations.
pub const MAX_RELATION_PAIRS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetName {
    N,
    Z,
}

impl std::fmt::Display for SubsetName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubsetName::N => write!(f, "N"),
            SubsetName::Z => write!(f, "Z"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("multiplication table is not {order}x{order}: row {row} has length {len}")]
    NotSquare { order: usize, row: usize, len: usize },
    #[error("table entry mul[{a}][{b}] = {value} is outside the carrier 0..{order}")]
    NotClosed { a: usize, b: usize, value: usize, order: usize },
    #[error("associativity fails at ({a}, {b}, {c}): (ab)c = {left} but a(bc) = {right}")]
    NotAssociative { a: usize, b: usize, c: usize, left: usize, right: usize },
    #[error("{which} is not a subsemigroup: {a} * {b} = {product} escapes it")]
    NotSubsemigroup { which: SubsetName, a: usize, b: usize, product: usize },
    #[error("{which} contains {element} which is outside the carrier")]
    SubsetOutOfRange { which: SubsetName, element: usize },
    #[error("Z is not central in N: z = {z}, n = {n:?}")]
    ZNotCentralInN { z: usize, n: Option<usize> },
    #[error("binormality fails at (a, b, z) = ({a}, {b}, {z}): a product of the sandwich escapes Z")]
    BinormalityFails { a: usize, b: usize, z: usize },
    #[error("trinormality fails at (a, b, n) = ({a}, {b}, {n}): bna escapes N")]
    TrinormalityFails { a: usize, b: usize, n: usize },
    #[error("order {order} exceeds the configured cap {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("element {element} has no unique generalized inverse")]
    NotInverse { element: usize },
    #[error("invalid input: {0}")]
    InvalidJson(#[from] serde_json::Error),
    #[error("order field says {declared} but the table has {actual} rows")]
    OrderMismatch { declared: usize, actual: usize },
    #[error("labels list has {len} entries for order {order}")]
    LabelCountMismatch { len: usize, order: usize },
}

/// A finite semigroup given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSemigroup {
    order: usize,
    /// Row-major table: `table[a * order + b]` is the product ab.
    table: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteSemigroup {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn elements(&self) -> ElemSet {
        ElemSet::full(self.order)
    }

    /// Pointwise product of two subsets.
    pub fn set_mul(&self, a: &ElemSet, b: &ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.order);
        for x in a.iter() {
            for y in b.iter() {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    /// Left translate sA.
    pub fn elem_mul_set(&self, s: usize, a: &ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.order);
        for x in a.iter() {
            out.insert(self.mul(s, x));
        }
        out
    }

    /// Right translate As.
    pub fn set_mul_elem(&self, a: &ElemSet, s: usize) -> ElemSet {
        let mut out = ElemSet::empty(self.order);
        for x in a.iter() {
            out.insert(self.mul(x, s));
        }
        out
    }

    pub fn idempotents(&self) -> ElemSet {
        ElemSet::from_iter(self.order, (0..self.order).filter(|&a| self.mul(a, a) == a))
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The absorbing element, if one exists. It is unique when it does.
    pub fn zero(&self) -> Option<usize> {
        (0..self.order)
            .find(|&z| (0..self.order).all(|s| self.mul(z, s) == z && self.mul(s, z) == z))
    }

    /// The map a -> a' with aa'a = a and a'aa' = a', provided it is unique
    /// for every element; this is exactly the inverse-semigroup case.
    pub fn inverse_map(&self) -> Result<Vec<usize>, CoreError> {
        let mut inv = Vec::with_capacity(self.order);
        for a in 0..self.order {
            let mut found = None;
            for x in 0..self.order {
                if self.mul(self.mul(a, x), a) == a && self.mul(self.mul(x, a), x) == x {
                    if found.is_some() {
                        return Err(CoreError::NotInverse { element: a });
                    }
                    found = Some(x);
                }
            }
            inv.push(found.ok_or(CoreError::NotInverse { element: a })?);
        }
        Ok(inv)
    }

    pub fn is_inverse_semigroup(&self) -> bool {
        self.inverse_map().is_ok()
    }

    pub fn describe_set(&self, set: &ElemSet) -> String {
        let items: Vec<&str> = set.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", items.join(","))
    }
}

/// Checks that the table is square, closed and associative.
pub fn validate_semigroup(
    mul: &[Vec<usize>],
    labels: Option<Vec<String>>,
    max_order: usize,
) -> Result<FiniteSemigroup, CoreError> {
    let order = mul.len();
    if order == 0 {
        return Err(CoreError::EmptyCarrier);
    }
    if order > max_order || order > MAX_ORDER {
        return Err(CoreError::OrderTooLarge { order, max: max_order.min(MAX_ORDER) });
    }
    let mut table = Vec::with_capacity(order * order);
    for (row, r) in mul.iter().enumerate() {
        if r.len() != order {
            return Err(CoreError::NotSquare { order, row, len: r.len() });
        }
        for (col, &v) in r.iter().enumerate() {
            if v >= order {
                return Err(CoreError::NotClosed { a: row, b: col, value: v, order });
            }
            table.push(v);
        }
    }
    let labels = match labels {
        Some(l) => {
            if l.len() != order {
                return Err(CoreError::LabelCountMismatch { len: l.len(), order });
            }
            l
        }
        None => (0..order).map(|i| format!("e{i}")).collect(),
    };
    let sg = FiniteSemigroup { order, table, labels };
    for a in 0..order {
        for b in 0..order {
            let ab = sg.mul(a, b);
            for c in 0..order {
                let left = sg.mul(ab, c);
                let right = sg.mul(a, sg.mul(b, c));
                if left != right {
                    return Err(CoreError::NotAssociative { a, b, c, left, right });
                }
            }
        }
    }
    Ok(sg)
}

/// True when the subset is closed under multiplication.
pub fn is_subsemigroup(sg: &FiniteSemigroup, set: &ElemSet) -> bool {
    set.iter().all(|a| set.iter().all(|b| set.contains(sg.mul(a, b))))
}

/// True when sA = As for every element s.
pub fn is_normal(sg: &FiniteSemigroup, set: &ElemSet) -> bool {
    (0..sg.order()).all(|s| sg.elem_mul_set(s, set) == sg.set_mul_elem(set, s))
}

/// Binormality: ab, ba both in the set forces the sandwiches aYb and bYa in.
pub fn is_binormal(sg: &FiniteSemigroup, set: &ElemSet) -> Option<(usize, usize, usize)> {
    for a in 0..sg.order() {
        for b in 0..sg.order() {
            if set.contains(sg.mul(a, b)) && set.contains(sg.mul(b, a)) {
                for z in set.iter() {
                    if !set.contains(sg.mul(sg.mul(a, z), b))
                        || !set.contains(sg.mul(sg.mul(b, z), a))
                    {
                        return Some((a, b, z));
                    }
                }
            }
        }
    }
    None
}

/// Trinormality of N relative to Z: abn = n = nab with ab, ba in Z forces
/// bna into N.
pub fn is_trinormal(
    sg: &FiniteSemigroup,
    n_set: &ElemSet,
    z_set: &ElemSet,
) -> Option<(usize, usize, usize)> {
    for a in 0..sg.order() {
        for b in 0..sg.order() {
            let ab = sg.mul(a, b);
            let ba = sg.mul(b, a);
            if !z_set.contains(ab) || !z_set.contains(ba) {
                continue;
            }
            for n in n_set.iter() {
                if sg.mul(ab, n) == n && sg.mul(n, ab) == n {
                    let bna = sg.mul(sg.mul(b, n), a);
                    if !n_set.contains(bna) {
                        return Some((a, b, n));
                    }
                }
            }
        }
    }
    None
}

/// Symmetry: ab in the set forces baba in.
pub fn is_symmetric(sg: &FiniteSemigroup, set: &ElemSet) -> bool {
    for a in 0..sg.order() {
        for b in 0..sg.order() {
            if set.contains(sg.mul(a, b)) {
                let ba = sg.mul(b, a);
                if !set.contains(sg.mul(ba, ba)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Diagonality: ad, d, db all in the set forces adb in.
pub fn is_diagonal(sg: &FiniteSemigroup, set: &ElemSet) -> bool {
    for d in set.iter() {
        for a in 0..sg.order() {
            if !set.contains(sg.mul(a, d)) {
                continue;
            }
            for b in 0..sg.order() {
                if set.contains(sg.mul(d, b)) && !set.contains(sg.mul(sg.mul(a, d), b)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Centralizer of `subset` inside itself: elements commuting with the whole
/// subset.
pub fn centre_of(sg: &FiniteSemigroup, subset: &ElemSet) -> ElemSet {
    ElemSet::from_iter(
        sg.order(),
        subset.iter().filter(|&a| subset.iter().all(|b| sg.mul(a, b) == sg.mul(b, a))),
    )
}

/// Structural flags, all computed by exhaustive scans at validation time.
#[derive(Clone, Copy, Debug)]
pub struct StructuredFlags {
    pub is_structured: bool,
    pub n_normal: bool,
    pub z_normal: bool,
    pub z_binormal: bool,
    pub n_z_trinormal: bool,
    pub z_central_in_n: bool,
    pub z_symmetric: bool,
    pub n_diagonal: bool,
    /// Absorbing element of the whole semigroup, when one exists.
    pub zero: Option<usize>,
}

/// A validated structured triple (S, N, Z).
#[derive(Clone, Debug)]
pub struct StructuredSemigroup {
    pub sg: FiniteSemigroup,
    pub n_set: ElemSet,
    pub z_set: ElemSet,
    pub flags: StructuredFlags,
}

/// Validates the triple axioms; on success all auxiliary flags are filled in.
pub fn validate_structured(
    sg: FiniteSemigroup,
    n_set: ElemSet,
    z_set: ElemSet,
) -> Result<StructuredSemigroup, CoreError> {
    for (which, set) in [(SubsetName::N, &n_set), (SubsetName::Z, &z_set)] {
        for a in set.iter() {
            for b in set.iter() {
                let p = sg.mul(a, b);
                if !set.contains(p) {
                    return Err(CoreError::NotSubsemigroup { which, a, b, product: p });
                }
            }
        }
    }
    for z in z_set.iter() {
        if !n_set.contains(z) {
            return Err(CoreError::ZNotCentralInN { z, n: None });
        }
        for n in n_set.iter() {
            if sg.mul(z, n) != sg.mul(n, z) {
                return Err(CoreError::ZNotCentralInN { z, n: Some(n) });
            }
        }
    }
    if let Some((a, b, z)) = is_binormal(&sg, &z_set) {
        return Err(CoreError::BinormalityFails { a, b, z });
    }
    if let Some((a, b, n)) = is_trinormal(&sg, &n_set, &z_set) {
        return Err(CoreError::TrinormalityFails { a, b, n });
    }
    let flags = StructuredFlags {
        is_structured: true,
        n_normal: is_normal(&sg, &n_set),
        z_normal: is_normal(&sg, &z_set),
        z_binormal: true,
        n_z_trinormal: true,
        z_central_in_n: true,
        z_symmetric: is_symmetric(&sg, &z_set),
        n_diagonal: is_diagonal(&sg, &n_set),
        zero: sg.zero(),
    };
    Ok(StructuredSemigroup { sg, n_set, z_set, flags })
}

impl StructuredSemigroup {
    pub fn order(&self) -> usize {
        self.sg.order()
    }

    /// Zero element provided it lies in Z; this is the hypothesis the
    /// ultrafilter layer needs.
    pub fn zero_in_z(&self) -> Option<usize> {
        self.flags.zero.filter(|z| self.z_set.contains(*z))
    }
}

/// Wire format for a structured semigroup.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemigroupInput {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(rename = "Z")]
    pub z: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl SemigroupInput {
    pub fn from_structured(s: &StructuredSemigroup) -> Self {
        let order = s.order();
        SemigroupInput {
            order,
            mul: (0..order)
                .map(|a| (0..order).map(|b| s.sg.mul(a, b)).collect())
                .collect(),
            n: s.n_set.to_vec(),
            z: s.z_set.to_vec(),
            labels: Some(s.sg.labels().to_vec()),
        }
    }

    pub fn validate(&self, max_order: usize) -> Result<StructuredSemigroup, CoreError> {
        if self.order != self.mul.len() {
            return Err(CoreError::OrderMismatch { declared: self.order, actual: self.mul.len() });
        }
        let sg = validate_semigroup(&self.mul, self.labels.clone(), max_order)?;
        let order = sg.order();
        for (which, list) in [(SubsetName::N, &self.n), (SubsetName::Z, &self.z)] {
            if let Some(&e) = list.iter().find(|&&e| e >= order) {
                return Err(CoreError::SubsetOutOfRange { which, element: e });
            }
        }
        let n_set = ElemSet::from_iter(order, self.n.iter().copied());
        let z_set = ElemSet::from_iter(order, self.z.iter().copied());
        validate_structured(sg, n_set, z_set)
    }
}

/// Parses and fully validates the JSON wire format.
pub fn parse_structured(json: &str, max_order: usize) -> Result<StructuredSemigroup, CoreError> {
    let input: SemigroupInput = serde_json::from_str(json)?;
    input.validate(max_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null_table() -> Vec<Vec<usize>> {
        vec![vec![0, 0], vec![0, 0]]
    }

    #[test]
    fn rejects_non_associative_table() {
        // Left-zero on {0,1} except one corrupted entry.
        let mul = vec![vec![0, 0], vec![1, 0]];
        let err = validate_semigroup(&mul, None, MAX_ORDER).unwrap_err();
        assert!(matches!(err, CoreError::NotAssociative { .. }), "{err}");
    }

    #[test]
    fn rejects_non_closed_and_non_square() {
        let mul = vec![vec![0, 2], vec![0, 0]];
        assert!(matches!(
            validate_semigroup(&mul, None, MAX_ORDER).unwrap_err(),
            CoreError::NotClosed { value: 2, .. }
        ));
        let mul = vec![vec![0], vec![0, 0]];
        assert!(matches!(
            validate_semigroup(&mul, None, MAX_ORDER).unwrap_err(),
            CoreError::NotSquare { row: 0, len: 1, .. }
        ));
    }

    #[test]
    fn order_guard_fires() {
        let mul = vec![vec![0, 0], vec![0, 0]];
        assert!(matches!(
            validate_semigroup(&mul, None, 1).unwrap_err(),
            CoreError::OrderTooLarge { order: 2, max: 1 }
        ));
    }

    #[test]
    fn null_semigroup_is_structured_with_zero() {
        let sg = validate_semigroup(&null_table(), Some(vec!["0".into(), "a".into()]), 64).unwrap();
        let all = sg.elements();
        let s = validate_structured(sg, all, all).unwrap();
        assert!(s.flags.is_structured);
        assert!(s.flags.n_normal && s.flags.z_normal);
        assert!(s.flags.z_symmetric);
        assert!(s.flags.n_diagonal);
        assert_eq!(s.flags.zero, Some(0));
        assert_eq!(s.zero_in_z(), Some(0));
    }

    #[test]
    fn rejects_subset_that_is_not_closed() {
        // Z3: N = Z = {e}; {1} alone is not closed since 1*1 = 2.
        let mul = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let sg = validate_semigroup(&mul, None, 64).unwrap();
        let bad = ElemSet::from_iter(3, [1]);
        let err = validate_structured(sg, bad, bad).unwrap_err();
        assert!(matches!(
            err,
            CoreError::NotSubsemigroup { which: SubsetName::N, a: 1, b: 1, product: 2 }
        ));
    }

    #[test]
    fn centre_and_idempotents_of_z3() {
        let mul = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let sg = validate_semigroup(&mul, None, 64).unwrap();
        assert_eq!(centre_of(&sg, &sg.elements()), sg.elements());
        assert_eq!(sg.idempotents(), ElemSet::singleton(3, 0));
        assert!(sg.is_inverse_semigroup());
        assert_eq!(sg.inverse_map().unwrap(), vec![0, 2, 1]);
        assert_eq!(sg.zero(), None);
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"order":2,"mul":[[0,0],[0,0]],"N":[0,1],"Z":[0,1],"labels":["0","a"]}"#;
        let s = parse_structured(json, MAX_ORDER).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.sg.label(1), "a");
        let back = SemigroupInput::from_structured(&s);
        let reparsed = serde_json::to_string(&back).unwrap();
        let s2 = parse_structured(&reparsed, MAX_ORDER).unwrap();
        assert_eq!(s2.sg, s.sg);
    }

    #[test]
    fn json_rejects_order_mismatch() {
        let json = r#"{"order":3,"mul":[[0,0],[0,0]],"N":[0],"Z":[0]}"#;
        assert!(matches!(
            parse_structured(json, MAX_ORDER).unwrap_err(),
            CoreError::OrderMismatch { declared: 3, actual: 2 }
        ));
    }
}
