//! Finite topological groupoids, bundles between them, and cocycle twists.
//!
//! A finite topology is Alexandrov: every point has a minimal open
//! neighbourhood, namely the intersection of the subbasic sets containing it.
//! Those minimal neighbourhoods form a basis, so every openness or continuity
//! question below quantifies over at most one set per point. Relational
//! preimages and images distribute over unions (not intersections), which is
//! why quantifying over this basis is equivalent to quantifying over the full
//! open-set lattice.

use crate::report::CheckReport;
use crate::semigroup::FiniteSemigroup;
use crate::sets::PointSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopoError {
    #[error("not a group: {witness}")]
    NotAGroup { witness: String },
    #[error("cocycle violation at (g, h, i, t) = ({g}, {h:?}, {i:?}, {t:?})")]
    InvalidCocycle { g: usize, h: Option<usize>, i: Option<usize>, t: Option<usize> },
}

/// Topology on a finite carrier, represented by minimal neighbourhoods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTopology {
    points: usize,
    subbasis: Vec<PointSet>,
    min_nbhd: Vec<PointSet>,
}

/// Generates the topology spanned by a subbasis. The minimal neighbourhood of
/// a point is the intersection of all subbasic sets containing it (the whole
/// carrier when none does).
pub fn generate_topology(points: usize, subbasis: Vec<PointSet>) -> FiniteTopology {
    let mut min_nbhd = Vec::with_capacity(points);
    for x in 0..points {
        let mut nb = PointSet::full(points);
        for b in &subbasis {
            if b.contains(x) {
                nb.inter_with(b);
            }
        }
        min_nbhd.push(nb);
    }
    FiniteTopology { points, subbasis, min_nbhd }
}

impl FiniteTopology {
    pub fn discrete(points: usize) -> Self {
        generate_topology(points, (0..points).map(|i| PointSet::singleton(points, i)).collect())
    }

    pub fn indiscrete(points: usize) -> Self {
        generate_topology(points, Vec::new())
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn subbasis(&self) -> &[PointSet] {
        &self.subbasis
    }

    pub fn min_nbhd(&self, x: usize) -> &PointSet {
        &self.min_nbhd[x]
    }

    pub fn is_open(&self, set: &PointSet) -> bool {
        set.iter().all(|x| self.min_nbhd[x].is_subset(set))
    }

    /// Deduplicated minimal neighbourhoods: a basis of the topology.
    pub fn basis(&self) -> Vec<PointSet> {
        let mut b: Vec<PointSet> = self.min_nbhd.clone();
        b.sort();
        b.dedup();
        b
    }

    /// The full open-set lattice; only materialized on small carriers.
    pub fn opens(&self) -> Option<Vec<PointSet>> {
        if self.points > 20 {
            return None;
        }
        let mut out = Vec::new();
        for mask in 0..(1u64 << self.points) {
            let set = PointSet::from_iter(self.points, (0..self.points).filter(|i| mask >> i & 1 == 1));
            if self.is_open(&set) {
                out.push(set);
            }
        }
        Some(out)
    }
}

/// Raw groupoid data prior to validation. `prod` is row-major over pairs,
/// `None` marking non-composable pairs.
#[derive(Clone, Debug)]
pub struct GroupoidData {
    pub size: usize,
    pub inv: Vec<usize>,
    pub prod: Vec<Option<usize>>,
    pub labels: Option<Vec<String>>,
}

impl GroupoidData {
    pub fn prod(&self, g: usize, h: usize) -> Option<usize> {
        self.prod[g * self.size + h]
    }

    /// One-unit groupoid carried by a group table.
    pub fn from_group(table: &FiniteSemigroup, inv: Vec<usize>) -> Self {
        let n = table.order();
        let mut prod = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                prod.push(Some(table.mul(a, b)));
            }
        }
        GroupoidData { size: n, inv, prod, labels: Some(table.labels().to_vec()) }
    }

    /// Pair groupoid on k units: elements (i, j) composing as (i,j)(j,l) = (i,l).
    pub fn pair_groupoid(k: usize) -> Self {
        let size = k * k;
        let at = |i: usize, j: usize| i * k + j;
        let mut inv = vec![0; size];
        let mut prod = vec![None; size * size];
        let mut labels = vec![String::new(); size];
        for i in 0..k {
            for j in 0..k {
                inv[at(i, j)] = at(j, i);
                labels[at(i, j)] = format!("({i},{j})");
                for l in 0..k {
                    prod[at(i, j) * size + at(j, l)] = Some(at(i, l));
                }
            }
        }
        GroupoidData { size, inv, prod, labels: Some(labels) }
    }
}

/// Checks every groupoid law on raw data, reporting all violations.
pub fn check_groupoid(data: &GroupoidData) -> CheckReport {
    let mut rep = CheckReport::new("groupoid");
    let n = data.size;
    if data.inv.len() != n || data.prod.len() != n * n {
        rep.violate("well-formed", format!("inv len {} prod len {}", data.inv.len(), data.prod.len()));
        return rep;
    }
    for g in 0..n {
        if data.inv[g] >= n {
            rep.violate("well-formed", format!("inv({g}) = {} out of range", data.inv[g]));
            return rep;
        }
    }
    for (k, p) in data.prod.iter().enumerate() {
        if let Some(v) = p {
            if *v >= n {
                rep.violate("well-formed", format!("prod entry {k} = {v} out of range"));
                return rep;
            }
        }
    }
    for g in 0..n {
        rep.check(data.inv[data.inv[g]] == g, "involution", || format!("g = {g}"));
    }
    // Sources and ranges must exist before identity laws make sense.
    let mut src = vec![None; n];
    let mut rng = vec![None; n];
    for g in 0..n {
        src[g] = data.prod(data.inv[g], g);
        rng[g] = data.prod(g, data.inv[g]);
        rep.check(src[g].is_some(), "source-defined", || format!("g = {g}"));
        rep.check(rng[g].is_some(), "range-defined", || format!("g = {g}"));
    }
    if src.iter().any(|s| s.is_none()) || rng.iter().any(|r| r.is_none()) {
        return rep;
    }
    let src: Vec<usize> = src.into_iter().map(Option::unwrap).collect();
    let rng: Vec<usize> = rng.into_iter().map(Option::unwrap).collect();
    for g in 0..n {
        rep.check(data.prod(g, src[g]) == Some(g), "right-identity", || format!("g = {g}"));
        rep.check(data.prod(rng[g], g) == Some(g), "left-identity", || format!("g = {g}"));
        rep.check(src[data.inv[g]] == rng[g], "inverse-swaps-source-range", || format!("g = {g}"));
    }
    for g in 0..n {
        for h in 0..n {
            let defined = data.prod(g, h).is_some();
            rep.check(defined == (src[g] == rng[h]), "composable-iff-source-matches-range", || {
                format!("(g, h) = ({g}, {h})")
            });
            if let Some(gh) = data.prod(g, h) {
                rep.check(src[gh] == src[h] && rng[gh] == rng[g], "product-endpoints", || {
                    format!("(g, h) = ({g}, {h})")
                });
            }
        }
    }
    for g in 0..n {
        for h in 0..n {
            let Some(gh) = data.prod(g, h) else { continue };
            for i in 0..n {
                let Some(hi) = data.prod(h, i) else { continue };
                rep.check(data.prod(gh, i) == data.prod(g, hi), "associativity", || {
                    format!("(g, h, i) = ({g}, {h}, {i})")
                });
            }
        }
    }
    for g in 0..n {
        let u = src[g];
        rep.check(data.prod(u, u) == Some(u), "unit-idempotent", || format!("unit {u} of {g}"));
        rep.check(data.inv[u] == u, "unit-self-inverse", || format!("unit {u}"));
    }
    rep
}

/// A validated groupoid with cached sources, ranges and units.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    size: usize,
    inv: Vec<usize>,
    prod: Vec<Option<usize>>,
    src: Vec<usize>,
    rng: Vec<usize>,
    units: PointSet,
    labels: Vec<String>,
}

impl FiniteGroupoid {
    pub fn from_data(data: GroupoidData) -> Result<Self, Box<CheckReport>> {
        let rep = check_groupoid(&data);
        if !rep.passed() {
            return Err(Box::new(rep));
        }
        let n = data.size;
        let src: Vec<usize> = (0..n).map(|g| data.prod(data.inv[g], g).unwrap()).collect();
        let rng: Vec<usize> = (0..n).map(|g| data.prod(g, data.inv[g]).unwrap()).collect();
        let mut units = PointSet::empty(n);
        for g in 0..n {
            if data.prod(g, g) == Some(g) {
                units.insert(g);
            }
        }
        let labels = data.labels.unwrap_or_else(|| (0..n).map(|i| format!("g{i}")).collect());
        Ok(FiniteGroupoid { size: n, inv: data.inv, prod: data.prod, src, rng, units, labels })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    #[inline]
    pub fn prod(&self, g: usize, h: usize) -> Option<usize> {
        self.prod[g * self.size + h]
    }

    #[inline]
    pub fn src(&self, g: usize) -> usize {
        self.src[g]
    }

    #[inline]
    pub fn rng(&self, g: usize) -> usize {
        self.rng[g]
    }

    pub fn units(&self) -> &PointSet {
        &self.units
    }

    pub fn is_unit(&self, g: usize) -> bool {
        self.units.contains(g)
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    #[inline]
    pub fn composable(&self, g: usize, h: usize) -> bool {
        self.src[g] == self.rng[h]
    }

    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for g in 0..self.size {
            for h in 0..self.size {
                if self.composable(g, h) {
                    out.push((g, h));
                }
            }
        }
        out
    }

    pub fn set_inv(&self, a: &PointSet) -> PointSet {
        PointSet::from_iter(self.size, a.iter().map(|g| self.inv[g]))
    }

    /// Pointwise product of two subsets, keeping only defined compositions.
    pub fn set_prod(&self, a: &PointSet, b: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.size);
        for g in a.iter() {
            for h in b.iter() {
                if let Some(gh) = self.prod(g, h) {
                    out.insert(gh);
                }
            }
        }
        out
    }

    pub fn set_src(&self, a: &PointSet) -> PointSet {
        PointSet::from_iter(self.size, a.iter().map(|g| self.src[g]))
    }
}

/// B B⁻¹ ∪ B⁻¹ B ⊆ G⁰: the slice condition, checked literally.
pub fn is_slice(gpd: &FiniteGroupoid, b: &PointSet) -> bool {
    for g in b.iter() {
        for h in b.iter() {
            if let Some(p) = gpd.prod(g, gpd.inv(h)) {
                if !gpd.is_unit(p) {
                    return false;
                }
            }
            if let Some(p) = gpd.prod(gpd.inv(g), h) {
                if !gpd.is_unit(p) {
                    return false;
                }
            }
        }
    }
    true
}

/// A groupoid together with a topology on its arrow set.
#[derive(Clone, Debug)]
pub struct TopGroupoid {
    pub gpd: FiniteGroupoid,
    pub top: FiniteTopology,
}

impl TopGroupoid {
    pub fn discrete(gpd: FiniteGroupoid) -> Self {
        let top = FiniteTopology::discrete(gpd.size());
        TopGroupoid { gpd, top }
    }
}

fn relation_image(size_out: usize, pairs: impl Iterator<Item = (usize, usize)>, set: &PointSet) -> PointSet {
    // pairs (x, y): collect y for x in set.
    let mut out = PointSet::empty(size_out);
    for (x, y) in pairs {
        if set.contains(x) {
            out.insert(y);
        }
    }
    out
}

/// Continuity of the inverse and product maps, openness of the source map,
/// plus the open-slice characterization via minimal neighbourhoods.
pub fn check_etale(tg: &TopGroupoid) -> CheckReport {
    let mut rep = CheckReport::new("etale");
    let g = &tg.gpd;
    let t = &tg.top;
    let n = g.size();
    for b in t.basis() {
        rep.check(t.is_open(&g.set_inv(&b)), "inverse-continuous", || format!("basis {b:?}"));
    }
    check_product_continuous(g, t, t, &mut rep);
    for b in t.basis() {
        let image = relation_image(n, (0..n).map(|x| (x, g.src(x))), &b);
        rep.check(t.is_open(&image), "source-open", || format!("basis {b:?}"));
    }
    // Open slices form a basis exactly when every minimal neighbourhood is a
    // slice: an open slice through a point must contain that point's minimal
    // neighbourhood, and subsets of slices are slices.
    for x in 0..n {
        rep.check(is_slice(g, t.min_nbhd(x)), "min-nbhd-is-slice", || format!("point {x}"));
    }
    // The open slices close under pointwise product and inverse; quantified
    // over the basis slices, which generate all open slices under unions.
    let basis_slices: Vec<PointSet> =
        t.basis().into_iter().filter(|b| is_slice(g, b)).collect();
    for a in &basis_slices {
        let inv = g.set_inv(a);
        rep.check(t.is_open(&inv) && is_slice(g, &inv), "slice-inverse-closed", || {
            format!("slice {a:?}")
        });
        for b in &basis_slices {
            let p = g.set_prod(a, b);
            rep.check(t.is_open(&p) && is_slice(g, &p), "slice-product-closed", || {
                format!("slices {a:?}, {b:?}")
            });
        }
    }
    rep
}

/// Product continuity for a map from composable pairs of `g` into `g`, where
/// the domain carries the subspace topology of the product. On finite spaces
/// this is exactly: minimal boxes map into minimal neighbourhoods.
fn check_product_continuous(
    g: &FiniteGroupoid,
    t: &FiniteTopology,
    t_out: &FiniteTopology,
    rep: &mut CheckReport,
) {
    for (x, y) in g.composable_pairs() {
        let xy = g.prod(x, y).unwrap();
        let target = t_out.min_nbhd(xy);
        for xp in t.min_nbhd(x).iter() {
            for yp in t.min_nbhd(y).iter() {
                if g.composable(xp, yp) && !target.contains(g.prod(xp, yp).unwrap()) {
                    rep.violate(
                        "product-continuous",
                        format!("pair ({x}, {y}), nearby pair ({xp}, {yp})"),
                    );
                }
            }
        }
    }
}

/// A continuous open isofibration onto an etale base.
#[derive(Clone, Debug)]
pub struct GroupoidBundle {
    pub total: TopGroupoid,
    pub base: TopGroupoid,
    /// proj[f] is the base element under the total element f.
    pub proj: Vec<usize>,
}

pub fn check_bundle(bundle: &GroupoidBundle) -> CheckReport {
    let mut rep = CheckReport::new("bundle");
    let f = &bundle.total.gpd;
    let g = &bundle.base.gpd;
    let tf = &bundle.total.top;
    let tg = &bundle.base.top;
    let proj = &bundle.proj;
    if proj.len() != f.size() || proj.iter().any(|p| *p >= g.size()) {
        rep.violate("well-formed", "projection is not a map into the base".to_string());
        return rep;
    }
    // Total space is a topological groupoid.
    for b in tf.basis() {
        rep.check(tf.is_open(&f.set_inv(&b)), "total-inverse-continuous", || format!("basis {b:?}"));
    }
    check_product_continuous(f, tf, tf, &mut rep);
    {
        let mut base_rep = check_etale(&bundle.base);
        for v in &mut base_rep.violations {
            v.law = format!("base-{}", v.law);
        }
        rep.merge(base_rep);
    }
    for x in 0..f.size() {
        rep.check(proj[f.inv(x)] == g.inv(proj[x]), "functor-inverse", || format!("f = {x}"));
    }
    for (x, y) in f.composable_pairs() {
        let ok = g.composable(proj[x], proj[y])
            && g.prod(proj[x], proj[y]) == Some(proj[f.prod(x, y).unwrap()]);
        rep.check(ok, "functor-product", || format!("pair ({x}, {y})"));
    }
    for u in f.units().iter() {
        for v in f.units().iter() {
            if u < v {
                rep.check(proj[u] != proj[v], "isofibration-unit-injective", || {
                    format!("units {u}, {v}")
                });
            }
        }
    }
    // Equivalent formulation: composability downstairs lifts upstairs.
    for x in 0..f.size() {
        for y in 0..f.size() {
            if g.composable(proj[x], proj[y]) {
                rep.check(f.composable(x, y), "isofibration-reflects-composability", || {
                    format!("pair ({x}, {y})")
                });
            }
        }
    }
    for b in tg.basis() {
        let pre = PointSet::from_iter(f.size(), (0..f.size()).filter(|x| b.contains(proj[*x])));
        rep.check(tf.is_open(&pre), "projection-continuous", || format!("basis {b:?}"));
    }
    for b in tf.basis() {
        let img = PointSet::from_iter(g.size(), b.iter().map(|x| proj[x]));
        rep.check(tg.is_open(&img), "projection-open", || format!("basis {b:?}"));
    }
    rep
}

pub fn check_etale_bundle(bundle: &GroupoidBundle) -> CheckReport {
    let mut rep = check_bundle(bundle);
    let f = &bundle.total.gpd;
    let tf = &bundle.total.top;
    for x in 0..f.size() {
        let nb = tf.min_nbhd(x);
        let mut seen = std::collections::BTreeMap::new();
        for y in nb.iter() {
            if let Some(prev) = seen.insert(bundle.proj[y], y) {
                rep.violate("locally-injective", format!("point {x}: {prev} and {y} collide"));
                break;
            }
        }
    }
    // An etale bundle forces the total space to be etale in its own right.
    let mut total_rep = check_etale(&bundle.total);
    for v in &mut total_rep.violations {
        v.law = format!("total-{}", v.law);
    }
    rep.merge(total_rep);
    rep
}

/// A finite group: a semigroup table with identity and inverses.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub table: FiniteSemigroup,
    pub id: usize,
    pub inv: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(table: FiniteSemigroup) -> Result<Self, TopoError> {
        let n = table.order();
        let id = (0..n)
            .find(|&e| (0..n).all(|a| table.mul(e, a) == a && table.mul(a, e) == a))
            .ok_or_else(|| TopoError::NotAGroup { witness: "no identity".to_string() })?;
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            let i = (0..n)
                .find(|&x| table.mul(a, x) == id && table.mul(x, a) == id)
                .ok_or_else(|| TopoError::NotAGroup { witness: format!("{a} has no inverse") })?;
            inv.push(i);
        }
        Ok(FiniteGroup { table, id, inv })
    }
}

/// Twists an etale groupoid by a T-valued 2-cocycle. The cocycle laws are
/// checked exhaustively before the total space is assembled.
pub fn twisted_bundle(
    base: &TopGroupoid,
    t: &FiniteGroup,
    sigma: &dyn Fn(usize, usize) -> usize,
) -> Result<GroupoidBundle, TopoError> {
    let g = &base.gpd;
    let m = t.table.order();
    for x in 0..g.size() {
        if sigma(g.rng(x), x) != t.id {
            return Err(TopoError::InvalidCocycle { g: x, h: None, i: None, t: None });
        }
        if sigma(x, g.src(x)) != t.id {
            return Err(TopoError::InvalidCocycle { g: x, h: None, i: None, t: None });
        }
    }
    for (x, y) in g.composable_pairs() {
        let xy = g.prod(x, y).unwrap();
        for i in 0..g.size() {
            if !g.composable(y, i) {
                continue;
            }
            let yi = g.prod(y, i).unwrap();
            for tt in 0..m {
                let left = t.table.mul(t.table.mul(sigma(x, y), tt), sigma(xy, i));
                let right = t.table.mul(t.table.mul(sigma(x, yi), tt), sigma(y, i));
                if left != right {
                    return Err(TopoError::InvalidCocycle {
                        g: x,
                        h: Some(y),
                        i: Some(i),
                        t: Some(tt),
                    });
                }
            }
        }
    }
    let size = g.size() * m;
    let at = |x: usize, tt: usize| x * m + tt;
    let mut inv = vec![0; size];
    let mut prod = vec![None; size * size];
    let mut labels = vec![String::new(); size];
    for x in 0..g.size() {
        for tt in 0..m {
            let xi = g.inv(x);
            // (x,t)⁻¹ = (x⁻¹, σ(x,x⁻¹)⁻¹ t⁻¹) = (x⁻¹, (t σ(x,x⁻¹))⁻¹).
            inv[at(x, tt)] = at(xi, t.inv[t.table.mul(tt, sigma(x, xi))]);
            labels[at(x, tt)] = format!("({},{})", g.label(x), t.table.label(tt));
            for y in 0..g.size() {
                if !g.composable(x, y) {
                    continue;
                }
                let xy = g.prod(x, y).unwrap();
                for uu in 0..m {
                    prod[at(x, tt) * size + at(y, uu)] =
                        Some(at(xy, t.table.mul(t.table.mul(tt, sigma(x, y)), uu)));
                }
            }
        }
    }
    let data = GroupoidData { size, inv, prod, labels: Some(labels) };
    let total_gpd = FiniteGroupoid::from_data(data)
        .unwrap_or_else(|rep| panic!("twisted total space broke groupoid laws: {rep}"));
    // Product topology with T discrete: boxes (basis set of G) x (point of T).
    let mut subbasis = Vec::new();
    for b in base.top.basis() {
        for tt in 0..m {
            subbasis.push(PointSet::from_iter(size, b.iter().map(|x| at(x, tt))));
        }
    }
    let total = TopGroupoid { gpd: total_gpd, top: generate_topology(size, subbasis) };
    let proj = (0..size).map(|i| i / m).collect();
    Ok(GroupoidBundle { total, base: base.clone(), proj })
}

/// Deterministic DOT rendering: units become boxes, arrows join their source
/// unit to their range unit.
pub fn to_dot(g: &FiniteGroupoid) -> String {
    let mut out = String::from("digraph groupoid {\n");
    for u in g.units().iter() {
        out.push_str(&format!("  n{u} [shape=box label=\"{}\"];\n", g.label(u)));
    }
    for x in 0..g.size() {
        if !g.is_unit(x) {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{}\"];\n",
                g.src(x),
                g.rng(x),
                g.label(x)
            ));
        }
    }
    out.push_str("}\n");
    out
}
