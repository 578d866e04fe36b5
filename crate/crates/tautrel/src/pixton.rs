//! Generalized Faber-Zagier relations on stable dual graphs.
//!
//! The two hypergeometric series
//! `A(z) = sum_i (6i)!/((3i)!(2i)!) (-z)^i / 1728^i` and
//! `B(z) = sum_i (6i)!/((3i)!(2i)!) (1+6i)/(1-6i) (-z)^i / 1728^i`
//! decorate legs, edges and vertices of stable graphs. A parity variable
//! `zeta_v` with `zeta_v^2 = 1` tracks a mod-2 grading per vertex; the
//! relation extracts the coefficient of `prod_v zeta_v^{g(v)-1}` and scales
//! each graph by `1/(|Aut| 2^{h^1})`. For `3d > g - 1 + sum(a_i)` the
//! degree-`d` part pairs to zero against every complementary class.

use crate::algebra::{kappa_pushforward, TautClass};
use crate::error::{Error, Result};
use crate::graph::{canonical_form, enumerate_stable_graphs, Canonical, Decoration};
use crate::rational::Rat;
use crate::ring::{Parity, Ring};
use crate::series::{BiSeries, TruncSeries};
use rayon::prelude::*;

/// The series pair `(A, B)` through `z^order`.
pub fn ab_series(order: usize) -> (TruncSeries<Rat>, TruncSeries<Rat>) {
    let mut a = TruncSeries::zero(order);
    let mut b = TruncSeries::zero(order);
    let mut coeff = Rat::one();
    for i in 0..=order as i64 {
        if i > 0 {
            // ratio of consecutive hypergeometric coefficients
            coeff *= &(Rat::frac(-(6 * i - 5), 144) * Rat::frac(6 * i - 1, i));
        }
        a.set_coeff(i as usize, coeff.clone());
        b.set_coeff(i as usize, coeff.clone() * Rat::frac(1 + 6 * i, 1 - 6 * i));
    }
    (a, b)
}

/// Leg factor for a marking of weight 0 or 1: `A` or `B` evaluated at
/// `zeta psi`, with an extra factor `zeta^a`; the `psi^k` coefficient
/// carries parity `k + a`.
pub fn leg_series(a: u32, order: usize) -> Result<TruncSeries<Parity<Rat>>> {
    if a > 1 {
        return Err(Error::BadMarkingWeight(a));
    }
    let (sa, sb) = ab_series(order);
    let base = if a == 0 { sa } else { sb };
    let mut out = TruncSeries::zero(order);
    for k in 0..=order {
        let parity = (k as u32 + a) % 2 == 1;
        out.set_coeff(k, Parity::graded(parity, base.coeff(k).clone()));
    }
    Ok(out)
}

/// Coefficients in `zeta'^i zeta''^j` for the edge series: the outer parity
/// is the first half-edge, the inner parity the second.
pub type EdgeCoeff = Parity<Parity<Rat>>;

fn edge_component(p1: bool, p2: bool, c: Rat) -> EdgeCoeff {
    Parity::graded(p1, Parity::graded(p2, c))
}

/// Numerator of the edge series:
/// `zeta' + zeta'' - A(zeta' psi') zeta'' B(zeta'' psi'')
///  - zeta' B(zeta' psi') A(zeta'' psi'')`.
pub fn edge_numerator(order: usize) -> BiSeries<EdgeCoeff> {
    let (sa, sb) = ab_series(order);
    let graded = |s: &TruncSeries<Rat>, shift: u32| -> (TruncSeries<Rat>, TruncSeries<Rat>) {
        // split into parts of parity 0 and 1 after adding `shift` to k
        let mut even = TruncSeries::zero(order);
        let mut odd = TruncSeries::zero(order);
        for k in 0..=order {
            if (k as u32 + shift) % 2 == 0 {
                even.set_coeff(k, s.coeff(k).clone());
            } else {
                odd.set_coeff(k, s.coeff(k).clone());
            }
        }
        (even, odd)
    };
    // A(zeta psi) = Ae(psi) + zeta Ao(psi); zeta B(zeta psi) = Bo + zeta Be.
    let (ae, ao) = graded(&sa, 0);
    let (bo, be) = graded(&sb, 1); // parity-0 part of zeta*B is Bo, parity-1 is Be
    let mut num = BiSeries::zero(order);
    num.add_to_coeff(0, 0, &edge_component(true, false, Rat::one()));
    num.add_to_coeff(0, 0, &edge_component(false, true, Rat::one()));
    // - (Ae + z'Ao)(psi') (Bo + z''Be)(psi'')
    // - (Bo + z'Be)(psi') (Ae + z''Ao)(psi'')
    for i in 0..=order {
        for j in 0..=order - i {
            let mut c = EdgeCoeff::zero();
            c = c.add(&edge_component(false, false, ae.coeff(i) * bo.coeff(j)));
            c = c.add(&edge_component(true, false, ao.coeff(i) * bo.coeff(j)));
            c = c.add(&edge_component(false, true, ae.coeff(i) * be.coeff(j)));
            c = c.add(&edge_component(true, true, ao.coeff(i) * be.coeff(j)));
            c = c.add(&edge_component(false, false, bo.coeff(i) * ae.coeff(j)));
            c = c.add(&edge_component(true, false, be.coeff(i) * ae.coeff(j)));
            c = c.add(&edge_component(false, true, bo.coeff(i) * ao.coeff(j)));
            c = c.add(&edge_component(true, true, be.coeff(i) * ao.coeff(j)));
            num.add_to_coeff(i, j, &c.neg());
        }
    }
    num
}

/// Edge series: the numerator divided by `psi' + psi''`. The numerator
/// vanishes under `psi'' -> -psi'`, which the division verifies.
pub fn edge_series(order: usize) -> Result<BiSeries<EdgeCoeff>> {
    edge_numerator(order + 1).divide_psisum().map(|q| {
        // the quotient is reliable through total order `order`
        let mut out = BiSeries::zero(order);
        for i in 0..=order {
            for j in 0..=order - i {
                out.set_coeff(i, j, q.coeff(i, j).clone());
            }
        }
        out
    })
}

/// Vertex kappa series: expanded terms of
/// `sum_k 1/k! pushforward( prod (psi - psi A(zeta psi)) )`
/// by total codimension, as (kappa multiset, parity-graded coefficient).
/// The parity of a term is the total kappa weight mod 2.
pub fn kappa_vertex_series(order: usize) -> Vec<(Vec<u32>, Parity<Rat>)> {
    let (sa, _) = ab_series(order.max(1));
    // single-marking factor: psi - psi A(zeta psi) = -sum_{j>=1} a_j zeta^j psi^{j+1}
    // a choice of j per extra marking; pushforward via Faber's formula.
    let mut acc: std::collections::BTreeMap<Vec<u32>, Parity<Rat>> = std::collections::BTreeMap::new();
    acc.insert(Vec::new(), Parity::one());
    // enumerate multisets {j_1 <= ... <= j_k} with sum <= order, j_i >= 1
    fn rec(
        start: u32,
        remaining: u32,
        chosen: &mut Vec<u32>,
        sa: &TruncSeries<Rat>,
        acc: &mut std::collections::BTreeMap<Vec<u32>, Parity<Rat>>,
    ) {
        if !chosen.is_empty() {
            // coefficient: 1/k! * prod(-a_{j_i}) * multinomial for orderings
            // iterating multisets: number of ordered tuples = k!/prod(mult!)
            // so 1/k! * (orderings) = 1/prod(mult!)
            let k = chosen.len();
            let mut coeff = Rat::one();
            let mut mult = 1u64;
            let mut run = 1u64;
            for i in 0..k {
                coeff *= &(-sa.coeff(chosen[i] as usize));
                if i > 0 && chosen[i] == chosen[i - 1] {
                    run += 1;
                    mult *= run;
                } else {
                    run = 1;
                }
            }
            coeff = coeff * Rat::from_int(mult as i64).inv().unwrap();
            let parity: u32 = chosen.iter().sum::<u32>() % 2;
            for (kappa, fab) in kappa_pushforward(chosen) {
                let c = Parity::graded(parity == 1, coeff.clone() * fab);
                let entry = acc.entry(kappa).or_insert_with(Parity::zero);
                *entry = entry.add(&c);
            }
        }
        let used: u32 = chosen.iter().sum();
        for j in start..=remaining {
            if used + j > remaining {
                break;
            }
            chosen.push(j);
            rec(j, remaining, chosen, sa, acc);
            chosen.pop();
        }
    }
    rec(1, order as u32, &mut Vec::new(), &sa, &mut acc);
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Request for one relation: genus, marking weights in `{0,1}`, and target
/// codimension `d` subject to `3d > g - 1 + sum(a_i)`.
#[derive(Clone, Debug)]
pub struct RelationRequest {
    pub g: u32,
    pub avec: Vec<u32>,
    pub d: u32,
}

impl RelationRequest {
    pub fn validate(&self) -> Result<()> {
        let n = self.avec.len() as i64;
        if 2 * i64::from(self.g) - 2 + n <= 0 {
            return Err(Error::Unstable {
                g: self.g,
                n: n as u32,
            });
        }
        for &a in &self.avec {
            if a > 1 {
                return Err(Error::BadMarkingWeight(a));
            }
        }
        let bound = i64::from(self.g) - 1 + self.avec.iter().map(|&a| i64::from(a)).sum::<i64>();
        if 3 * i64::from(self.d) <= bound {
            return Err(Error::DegreeBound {
                min: bound / 3,
                got: i64::from(self.d),
            });
        }
        Ok(())
    }
}

struct GraphSeries {
    legs: Vec<Vec<(u32, bool, Rat)>>,              // per marking: (psi exp, parity, coeff)
    edge: Vec<(u32, u32, bool, bool, Rat)>,        // (psi', psi'', parity', parity'', coeff)
    vertex: Vec<(Vec<u32>, u32, bool, Rat)>,       // (kappa multiset, weight, parity, coeff)
}

fn graph_series(avec: &[u32], d: u32) -> Result<GraphSeries> {
    let order = d as usize;
    let mut legs = Vec::new();
    for &a in avec {
        let s = leg_series(a, order)?;
        let mut terms = Vec::new();
        for k in 0..=order {
            let c = s.coeff(k);
            if !c.even.is_zero() {
                terms.push((k as u32, false, c.even.clone()));
            }
            if !c.odd.is_zero() {
                terms.push((k as u32, true, c.odd.clone()));
            }
        }
        legs.push(terms);
    }
    let es = edge_series(order)?;
    let mut edge = Vec::new();
    for i in 0..=order {
        for j in 0..=order - i {
            let c = es.coeff(i, j);
            for (p1, p2, v) in [
                (false, false, &c.even.even),
                (false, true, &c.even.odd),
                (true, false, &c.odd.even),
                (true, true, &c.odd.odd),
            ] {
                if !v.is_zero() {
                    edge.push((i as u32, j as u32, p1, p2, v.clone()));
                }
            }
        }
    }
    let mut vertex = Vec::new();
    for (kappa, c) in kappa_vertex_series(order) {
        let weight: u32 = kappa.iter().sum();
        if !c.even.is_zero() {
            vertex.push((kappa.clone(), weight, false, c.even.clone()));
        }
        if !c.odd.is_zero() {
            vertex.push((kappa, weight, true, c.odd.clone()));
        }
    }
    Ok(GraphSeries {
        legs,
        edge,
        vertex,
    })
}

/// Degree-`d` part of the relation for `(g, a-vector)` as a strata-algebra
/// class. Refuses requests outside the supported range, where the output
/// would carry no vanishing guarantee.
pub fn pixton_relation(req: &RelationRequest) -> Result<TautClass<Rat>> {
    req.validate()?;
    let g = req.g;
    let n = req.avec.len() as u32;
    let d = req.d;
    let series = graph_series(&req.avec, d)?;
    let graphs = enumerate_stable_graphs(g, n)?;
    let parts: Result<Vec<TautClass<Rat>>> = graphs
        .par_iter()
        .filter(|c| c.graph.num_edges() as u32 <= d)
        .map(|c| graph_contribution(c, &req.avec, d, &series))
        .collect();
    let mut out = TautClass::zero(g, n);
    for p in parts? {
        out = out.add(&p)?;
    }
    Ok(out)
}

/// Sum of decorated strata on one graph: choose a term per marking, edge and
/// vertex, subject to total codimension `d` and per-vertex parity
/// `g(v) - 1 (mod 2)`, then scale by `1/(|Aut| 2^{h^1})`.
fn graph_contribution(
    gamma: &Canonical,
    _avec: &[u32],
    d: u32,
    series: &GraphSeries,
) -> Result<TautClass<Rat>> {
    let g = &gamma.graph;
    let nv = g.num_vertices();
    let e_count = g.num_edges();
    let n = g.num_legs();
    let budget = d - e_count as u32;
    let total_g = g.total_genus();
    let mut out = TautClass::zero(total_g, n as u32);

    // choice stacks
    let mut psi_leg = vec![0u32; n];
    let mut psi_edge = vec![(0u32, 0u32); e_count];
    let mut kappas: Vec<Vec<u32>> = vec![Vec::new(); nv];
    let mut parity = vec![false; nv];
    let scale = Rat::from_int(gamma.aut as i64).inv().unwrap()
        * Rat::from_int(2i64.pow(g.h1())).inv().unwrap();

    struct Ctx<'a> {
        g: &'a crate::graph::StableGraph,
        series: &'a GraphSeries,
        scale: Rat,
    }
    let ctx = Ctx {
        g,
        series,
        scale,
    };

    #[allow(clippy::too_many_arguments)]
    fn legs_rec(
        ctx: &Ctx,
        i: usize,
        budget: u32,
        coeff: Rat,
        psi_leg: &mut Vec<u32>,
        psi_edge: &mut Vec<(u32, u32)>,
        kappas: &mut Vec<Vec<u32>>,
        parity: &mut Vec<bool>,
        out: &mut TautClass<Rat>,
    ) {
        if i == psi_leg.len() {
            edges_rec(ctx, 0, budget, coeff, psi_leg, psi_edge, kappas, parity, out);
            return;
        }
        let v = ctx.g.legs[i];
        for &(k, p, ref c) in &ctx.series.legs[i] {
            if k > budget {
                continue;
            }
            psi_leg[i] = k;
            parity[v] ^= p;
            legs_rec(ctx, i + 1, budget - k, coeff.clone() * c, psi_leg, psi_edge, kappas, parity, out);
            parity[v] ^= p;
            psi_leg[i] = 0;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn edges_rec(
        ctx: &Ctx,
        e: usize,
        budget: u32,
        coeff: Rat,
        psi_leg: &mut Vec<u32>,
        psi_edge: &mut Vec<(u32, u32)>,
        kappas: &mut Vec<Vec<u32>>,
        parity: &mut Vec<bool>,
        out: &mut TautClass<Rat>,
    ) {
        if e == psi_edge.len() {
            verts_rec(ctx, 0, budget, coeff, psi_leg, psi_edge, kappas, parity, out);
            return;
        }
        let (va, vb) = ctx.g.edges[e];
        for &(i, j, p1, p2, ref c) in &ctx.series.edge {
            if i + j > budget {
                continue;
            }
            psi_edge[e] = (i, j);
            parity[va] ^= p1;
            parity[vb] ^= p2;
            edges_rec(ctx, e + 1, budget - i - j, coeff.clone() * c, psi_leg, psi_edge, kappas, parity, out);
            parity[vb] ^= p2;
            parity[va] ^= p1;
            psi_edge[e] = (0, 0);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn verts_rec(
        ctx: &Ctx,
        v: usize,
        budget: u32,
        coeff: Rat,
        psi_leg: &mut Vec<u32>,
        psi_edge: &mut Vec<(u32, u32)>,
        kappas: &mut Vec<Vec<u32>>,
        parity: &mut Vec<bool>,
        out: &mut TautClass<Rat>,
    ) {
        let nv = ctx.g.num_vertices();
        if v == nv {
            if budget != 0 {
                return;
            }
            // parity extraction: coefficient of zeta_v^{g(v)-1}, odd for even g
            for w in 0..nv {
                let want_odd = ctx.g.genus[w] % 2 == 0;
                if parity[w] != want_odd {
                    return;
                }
            }
            let dec = Decoration {
                psi_leg: psi_leg.clone(),
                psi_edge: psi_edge.clone(),
                kappa: kappas.clone(),
            };
            out.add_term(canonical_form(ctx.g, &dec), coeff.clone() * &ctx.scale);
            return;
        }
        for (kappa, weight, p, c) in &ctx.series.vertex {
            if *weight > budget {
                continue;
            }
            kappas[v] = kappa.clone();
            parity[v] ^= p;
            verts_rec(ctx, v + 1, budget - weight, coeff.clone() * c, psi_leg, psi_edge, kappas, parity, out);
            parity[v] ^= p;
            kappas[v] = Vec::new();
        }
    }

    legs_rec(
        &ctx,
        0,
        budget,
        Rat::one(),
        &mut psi_leg,
        &mut psi_edge,
        &mut kappas,
        &mut parity,
        &mut out,
    );
    debug_assert!(out.is_zero() || out.homogeneous_degree() == Some(d));
    Ok(out)
}
