//! The groupoid carried by the cosets of a structured triple.
//!
//! Coset ids are positions in the mask-sorted enumeration, so the whole
//! construction is deterministic. Composability is an equality of stored
//! source and range ids, the product is (BC)^<, the inverse is the dual, and
//! the topology is generated by the membership slices C_a = {C : a ∈ C}.
//! That the result satisfies the groupoid and etale laws is checked, not
//! assumed: construction fails loudly if a law breaks.

use std::collections::BTreeMap;

use crate::coset::{all_cosets, CosetError, CosetRecord};
use crate::order::Ctx;
use crate::report::CheckReport;
use crate::sets::{ElemSet, PointSet};
use crate::topo::{generate_topology, is_slice, FiniteGroupoid, GroupoidData, TopGroupoid};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CosetGpdError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error("coset groupoid laws failed:\n{report}")]
    GroupoidLaws { report: Box<CheckReport> },
    #[error("coset structure disagrees with itself: {what}")]
    Inconsistent { what: String },
}

/// The coset groupoid with its canonical topology.
pub struct CosetGroupoid {
    pub ctx: Ctx,
    pub cosets: Vec<CosetRecord>,
    pub tg: TopGroupoid,
    id_of: BTreeMap<ElemSet, usize>,
    src_id: Vec<usize>,
    rng_id: Vec<usize>,
}

impl CosetGroupoid {
    pub fn id_of(&self, members: &ElemSet) -> Option<usize> {
        self.id_of.get(members).copied()
    }

    pub fn members(&self, id: usize) -> &ElemSet {
        &self.cosets[id].members
    }

    pub fn size(&self) -> usize {
        self.cosets.len()
    }

    pub fn source_id(&self, id: usize) -> usize {
        self.src_id[id]
    }

    pub fn range_id(&self, id: usize) -> usize {
        self.rng_id[id]
    }

    /// C_a: the cosets containing a, as a point set of coset ids.
    pub fn slice_of(&self, a: usize) -> PointSet {
        PointSet::from_iter(
            self.cosets.len(),
            self.cosets.iter().enumerate().filter(|(_, r)| r.members.contains(a)).map(|(i, _)| i),
        )
    }

    /// Deterministic DOT rendering; coset members ride along as tooltips.
    pub fn to_dot(&self) -> String {
        let g = &self.tg.gpd;
        let mut out = String::from("digraph cosets {\n");
        for u in g.units().iter() {
            out.push_str(&format!(
                "  n{u} [shape=box label=\"{}\" tooltip=\"{}\"];\n",
                g.label(u),
                g.label(u)
            ));
        }
        for x in 0..g.size() {
            if !g.is_unit(x) {
                out.push_str(&format!(
                    "  n{} -> n{} [label=\"{}\" tooltip=\"{}\"];\n",
                    g.src(x),
                    g.rng(x),
                    g.label(x),
                    g.label(x)
                ));
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn export_json(&self) -> serde_json::Value {
        let cosets: Vec<serde_json::Value> = self
            .cosets
            .iter()
            .enumerate()
            .map(|(i, r)| {
                serde_json::json!({
                    "id": i,
                    "members": r.members.to_vec(),
                    "source": self.src_id[i],
                    "range": self.rng_id[i],
                    "unit": r.is_unit,
                })
            })
            .collect();
        serde_json::json!({
            "cosets": cosets,
            "subbasis": (0..self.ctx.order())
                .map(|a| self.slice_of(a).to_vec())
                .collect::<Vec<_>>(),
        })
    }
}

pub fn build_coset_groupoid(ctx: Ctx) -> Result<CosetGroupoid, CosetGpdError> {
    let cosets = all_cosets(&ctx)?;
    let n = cosets.len();
    let mut id_of = BTreeMap::new();
    for (i, r) in cosets.iter().enumerate() {
        id_of.insert(r.members, i);
    }
    let resolve = |set: &ElemSet, what: &str| {
        id_of.get(set).copied().ok_or_else(|| CosetGpdError::Inconsistent {
            what: format!("{what} {} is not a coset", ctx.describe(set)),
        })
    };
    let mut src_id = Vec::with_capacity(n);
    let mut rng_id = Vec::with_capacity(n);
    let mut inv = Vec::with_capacity(n);
    for r in &cosets {
        src_id.push(resolve(&r.source, "source")?);
        rng_id.push(resolve(&r.range, "range")?);
        inv.push(resolve(&ctx.dual(&r.members), "dual")?);
    }
    let mut prod = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            if src_id[i] == rng_id[j] {
                let p = ctx.up_closure(&ctx.set_mul(&cosets[i].members, &cosets[j].members));
                prod[i * n + j] = Some(resolve(&p, "product")?);
            }
        }
    }
    let labels = cosets.iter().map(|r| ctx.describe(&r.members)).collect();
    let data = GroupoidData { size: n, inv, prod, labels: Some(labels) };
    let gpd = FiniteGroupoid::from_data(data)
        .map_err(|report| CosetGpdError::GroupoidLaws { report })?;
    // The abstract source u with u = C⁻¹C must be the stored coset s(C), and
    // units must be exactly the cosets meeting N. Both are load-bearing.
    for i in 0..n {
        if gpd.src(i) != src_id[i] || gpd.rng(i) != rng_id[i] {
            return Err(CosetGpdError::Inconsistent {
                what: format!("groupoid endpoints of coset {i} differ from stored source/range"),
            });
        }
        if gpd.is_unit(i) != cosets[i].is_unit {
            return Err(CosetGpdError::Inconsistent {
                what: format!("unit status of coset {i} disagrees with the N-intersection test"),
            });
        }
    }
    let subbasis: Vec<PointSet> = (0..ctx.order())
        .map(|a| {
            PointSet::from_iter(
                n,
                cosets.iter().enumerate().filter(|(_, r)| r.members.contains(a)).map(|(i, _)| i),
            )
        })
        .collect();
    let top = generate_topology(n, subbasis);
    let tg = TopGroupoid { gpd, top };
    Ok(CosetGroupoid { ctx, cosets, tg, id_of, src_id, rng_id })
}

/// The assignment a ↦ θ(a), θ(a) a set of groupoid elements, together with
/// a flag recording whether the homomorphism law was actually guaranteed.
pub struct EtaleRepresentation {
    pub assign: Vec<PointSet>,
    pub symmetry_warning: bool,
}

/// a ↦ C_a. Without a symmetric Z the map is still built, but the flag warns
/// that the homomorphism law is not promised.
pub fn coset_representation(cg: &CosetGroupoid) -> EtaleRepresentation {
    EtaleRepresentation {
        assign: (0..cg.ctx.order()).map(|a| cg.slice_of(a)).collect(),
        symmetry_warning: !cg.ctx.s.flags.z_symmetric,
    }
}

/// Checks the four laws an etale representation must satisfy: open-slice
/// values, multiplicativity, cover, diagonal-to-unit-opens, and the local
/// roundness that lets neighbourhoods shrink.
pub fn is_etale_representation(
    ctx: &Ctx,
    tg: &TopGroupoid,
    assign: &[PointSet],
) -> CheckReport {
    let mut rep = CheckReport::new("etale-representation");
    let g = &tg.gpd;
    let t = &tg.top;
    for (a, v) in assign.iter().enumerate() {
        rep.check(t.is_open(v) && is_slice(g, v), "value-open-slice", || {
            format!("element {}", ctx.label(a))
        });
    }
    for a in 0..assign.len() {
        for b in 0..assign.len() {
            let ab = ctx.s.sg.mul(a, b);
            let prod = g.set_prod(&assign[a], &assign[b]);
            rep.check(prod == assign[ab], "multiplicative", || {
                format!("elements {} and {}", ctx.label(a), ctx.label(b))
            });
        }
    }
    let mut cover = PointSet::empty(g.size());
    for v in assign {
        cover.union_with(v);
    }
    rep.check(cover == PointSet::full(g.size()), "cover", || {
        format!("uncovered points {:?}", PointSet::full(g.size()).minus(&cover))
    });
    for n in ctx.s.n_set.iter() {
        let v = &assign[n];
        let in_units = v.is_subset(g.units());
        // Open in the unit subspace: minimal neighbourhoods relativize.
        let sub_open = v.iter().all(|x| t.min_nbhd(x).inter(g.units()).is_subset(v));
        rep.check(in_units && sub_open, "diagonal-to-unit-opens", || {
            format!("element {}", ctx.label(n))
        });
    }
    for a in 0..assign.len() {
        let below = ctx.dom.down_row(a);
        for g_pt in assign[a].iter() {
            let ok = below.iter().any(|b| assign[b].contains(g_pt));
            rep.check(ok, "locally-round", || {
                format!("element {} at point {g_pt}", ctx.label(a))
            });
        }
    }
    rep
}
