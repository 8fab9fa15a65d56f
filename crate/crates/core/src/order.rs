//! The domination relation of a structured triple.
//!
//! Element a is dominated by b via witness s when asb = a = bsa with as, sa
//! landing in N and bs, sb landing in Z. The whole ternary relation is
//! precomputed once; all set-level operators below are unions of per-element
//! rows, which keeps the exhaustive subset scans downstream cheap.

use crate::semigroup::StructuredSemigroup;
use crate::sets::ElemSet;

/// Definitional check, straight from the ternary formula.
pub fn dominates_raw(s: &StructuredSemigroup, a: usize, w: usize, b: usize) -> bool {
    let sg = &s.sg;
    let aw = sg.mul(a, w);
    let wa = sg.mul(w, a);
    let bw = sg.mul(b, w);
    let wb = sg.mul(w, b);
    sg.mul(aw, b) == a
        && sg.mul(bw, a) == a
        && s.n_set.contains(aw)
        && s.n_set.contains(wa)
        && s.z_set.contains(bw)
        && s.z_set.contains(wb)
}

/// One-sided variant: asb = a with as in N and bs, sb in Z.
pub fn dominates_left(s: &StructuredSemigroup, a: usize, w: usize, b: usize) -> bool {
    let sg = &s.sg;
    let aw = sg.mul(a, w);
    sg.mul(aw, b) == a
        && s.n_set.contains(aw)
        && s.z_set.contains(sg.mul(b, w))
        && s.z_set.contains(sg.mul(w, b))
}

/// Mirror one-sided variant: bsa = a with sa in N and bs, sb in Z.
pub fn dominates_right(s: &StructuredSemigroup, a: usize, w: usize, b: usize) -> bool {
    let sg = &s.sg;
    let wa = sg.mul(w, a);
    sg.mul(sg.mul(b, w), a) == a
        && s.n_set.contains(wa)
        && s.z_set.contains(sg.mul(b, w))
        && s.z_set.contains(sg.mul(w, b))
}

/// Fully materialized domination relation.
#[derive(Clone, Debug)]
pub struct Domination {
    order: usize,
    /// holds[a*n*n + w*n + b] = a <_w b
    holds: Vec<bool>,
    /// witnesses[a*n + b] = all w with a <_w b
    witnesses: Vec<ElemSet>,
    /// up[a] = everything dominating a
    up: Vec<ElemSet>,
    /// down[b] = everything dominated by b
    down: Vec<ElemSet>,
    /// wit_of[a] = all w witnessing a <_w b for some b
    wit_of: Vec<ElemSet>,
}

impl Domination {
    pub fn new(s: &StructuredSemigroup) -> Self {
        let n = s.order();
        let mut holds = vec![false; n * n * n];
        let mut witnesses = vec![ElemSet::empty(n); n * n];
        let mut up = vec![ElemSet::empty(n); n];
        let mut down = vec![ElemSet::empty(n); n];
        let mut wit_of = vec![ElemSet::empty(n); n];
        for a in 0..n {
            for w in 0..n {
                for b in 0..n {
                    if dominates_raw(s, a, w, b) {
                        holds[a * n * n + w * n + b] = true;
                        witnesses[a * n + b].insert(w);
                        up[a].insert(b);
                        down[b].insert(a);
                        wit_of[a].insert(w);
                    }
                }
            }
        }
        Domination { order: n, holds, witnesses, up, down, wit_of }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn holds(&self, a: usize, w: usize, b: usize) -> bool {
        self.holds[a * self.order * self.order + w * self.order + b]
    }

    /// a < b: dominated via at least one witness.
    #[inline]
    pub fn below(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn witnesses(&self, a: usize, b: usize) -> ElemSet {
        self.witnesses[a * self.order + b]
    }

    pub fn up_row(&self, a: usize) -> ElemSet {
        self.up[a]
    }

    pub fn down_row(&self, b: usize) -> ElemSet {
        self.down[b]
    }

    pub fn wit_row(&self, a: usize) -> ElemSet {
        self.wit_of[a]
    }

    /// All (a, b) pairs with a < b, row-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.order {
            for b in self.up[a].iter() {
                out.push((a, b));
            }
        }
        out
    }

    /// All witnessed triples (a, w, b).
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.order {
            for w in 0..self.order {
                for b in 0..self.order {
                    if self.holds(a, w, b) {
                        out.push((a, w, b));
                    }
                }
            }
        }
        out
    }
}

/// A structured triple with its precomputed domination relation. Everything
/// past validation consumes this.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub s: StructuredSemigroup,
    pub dom: Domination,
    /// Order cap for exhaustive subset enumeration.
    pub subset_guard: usize,
}

impl Ctx {
    pub fn new(s: StructuredSemigroup) -> Self {
        let dom = Domination::new(&s);
        Ctx { s, dom, subset_guard: crate::semigroup::MAX_ORDER }
    }

    pub fn with_guard(s: StructuredSemigroup, subset_guard: usize) -> Self {
        let mut ctx = Self::new(s);
        ctx.subset_guard = subset_guard;
        ctx
    }

    pub fn order(&self) -> usize {
        self.s.order()
    }

    pub fn label(&self, a: usize) -> &str {
        self.s.sg.label(a)
    }

    pub fn describe(&self, set: &ElemSet) -> String {
        self.s.sg.describe_set(set)
    }

    /// A^< : everything dominating some element of A.
    pub fn up_closure(&self, a: &ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.order());
        for x in a.iter() {
            out = out.union(&self.dom.up_row(x));
        }
        out
    }

    /// A^* : all witnesses for the domination of some element of A.
    pub fn dual(&self, a: &ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.order());
        for x in a.iter() {
            out = out.union(&self.dom.wit_row(x));
        }
        out
    }

    /// Down-closure: everything dominated by some element of A.
    pub fn down_closure(&self, a: &ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.order());
        for x in a.iter() {
            out = out.union(&self.dom.down_row(x));
        }
        out
    }

    pub fn set_mul(&self, a: &ElemSet, b: &ElemSet) -> ElemSet {
        self.s.sg.set_mul(a, b)
    }
}
