//! The strata algebra: rational (or ring-valued) linear combinations of
//! decorated strata, with gluing pushforward, kappa pushforward, and the
//! product of decorated strata via common degenerations.
//!
//! A stored generator `[Gamma, decoration]` denotes the pushforward of the
//! decoration along the gluing map of `Gamma`, with no automorphism factor;
//! callers that want the stratum class divide by `|Aut|` themselves.

use crate::error::{Error, Result};
use crate::graph::{
    canonical_form, canonical_graph, enumerate_isomorphisms, enumerate_stable_graphs, Canonical,
    Decoration, Iso, StableGraph,
};
use crate::rational::Rat;
use crate::ring::Ring;
use itertools::Itertools;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;
use std::sync::OnceLock;

/// Element of the strata algebra with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct TautClass<C: Ring> {
    pub g: u32,
    pub n: u32,
    terms: BTreeMap<String, (Canonical, C)>,
}

impl<C: Ring> TautClass<C> {
    pub fn zero(g: u32, n: u32) -> Self {
        TautClass {
            g,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn fundamental(g: u32, n: u32) -> Self {
        let mut t = Self::zero(g, n);
        t.add_term(canonical_graph(&StableGraph::smooth(g, n)), C::one());
        t
    }

    /// Smooth-vertex monomial with the given leg psi exponents and kappa
    /// multiset.
    pub fn psi_kappa_monomial(g: u32, n: u32, psi: &[u32], kappa: &[u32], coeff: C) -> Self {
        assert_eq!(psi.len(), n as usize);
        let graph = StableGraph::smooth(g, n);
        let mut dec = Decoration::trivial(&graph);
        dec.psi_leg = psi.to_vec();
        let mut k = kappa.to_vec();
        k.sort_unstable();
        dec.kappa = vec![k];
        let mut t = Self::zero(g, n);
        t.add_term(canonical_form(&graph, &dec), coeff);
        t
    }

    pub fn add_term(&mut self, stratum: Canonical, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        let key = stratum.key.clone();
        match self.terms.get_mut(&key) {
            Some((_, c)) => {
                *c = c.add(&coeff);
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, (stratum, coeff));
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Canonical, &C)> {
        self.terms.values().map(|(s, c)| (s, c))
    }

    pub fn coeff_of(&self, key: &str) -> Option<&C> {
        self.terms.get(key).map(|(_, c)| c)
    }

    fn check_ambient(&self, rhs: &Self) -> Result<()> {
        if self.g != rhs.g || self.n != rhs.n {
            return Err(Error::AmbientMismatch(self.g, self.n, rhs.g, rhs.n));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_ambient(rhs)?;
        let mut out = self.clone();
        for (s, c) in rhs.terms() {
            out.add_term(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.g, self.n);
        for (s, c) in self.terms() {
            out.add_term(s.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.g, self.n);
        for (s, x) in self.terms() {
            out.add_term(s.clone(), x.mul(c));
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&C::from_rat(r))
    }

    /// Codimension of a stored stratum.
    pub fn stratum_degree(s: &Canonical) -> u32 {
        s.graph.num_edges() as u32 + s.dec.degree()
    }

    /// The part of the class in the given codimension.
    pub fn degree_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.g, self.n);
        for (s, c) in self.terms() {
            if Self::stratum_degree(s) == d {
                out.add_term(s.clone(), c.clone());
            }
        }
        out
    }

    /// Degrees present, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        self.terms()
            .map(|(s, _)| Self::stratum_degree(s))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Common degree when homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let ds = self.degrees();
        match ds.as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> TautClass<D> {
        let mut out = TautClass::zero(self.g, self.n);
        for (s, c) in self.terms() {
            out.add_term(s.clone(), f(c));
        }
        out
    }
}

/// Coefficient serialization for the wire format.
pub trait CoeffJson {
    fn coeff_json(&self) -> serde_json::Value;
}

impl CoeffJson for Rat {
    fn coeff_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl CoeffJson for crate::ring::SqrtPhi {
    /// Integral-phi elements serialize as `[{"phiExp": c, "coeff": "p/q"}]`.
    fn coeff_json(&self) -> serde_json::Value {
        let mut parts = Vec::new();
        for (e, c) in self.terms() {
            assert!(e % 2 == 0, "serialized coefficients must be phi-integral");
            parts.push(serde_json::json!({ "phiExp": e / 2, "coeff": c.to_string() }));
        }
        serde_json::Value::Array(parts)
    }
}

impl<C: Ring + CoeffJson> TautClass<C> {
    /// Wire format: terms sorted by canonical encoding.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|(s, c)| {
                serde_json::json!({
                    "stratum": serde_json::to_value(s.to_json()).unwrap(),
                    "coeff": c.coeff_json(),
                })
            })
            .collect();
        serde_json::json!({
            "g": self.g,
            "n": self.n,
            "degree": self.homogeneous_degree(),
            "terms": terms,
        })
    }
}

/// Faber's pushforward formula: the forgetful image of
/// `psi^{b_1+1} ... psi^{b_k+1}` as a polynomial in kappa classes, returned
/// as pairs (kappa multiset, coefficient). Requires every `b_i >= 1`.
pub fn kappa_pushforward(exponents: &[u32]) -> Vec<(Vec<u32>, Rat)> {
    assert!(exponents.iter().all(|&b| b >= 1));
    let mut out: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
    for part in set_partitions(exponents.len()) {
        let mut kappa: Vec<u32> = part
            .iter()
            .map(|block| block.iter().map(|&i| exponents[i]).sum())
            .collect();
        let mut coeff = Rat::one();
        for block in &part {
            coeff *= &Rat::factorial(block.len() as u64 - 1);
        }
        kappa.sort_unstable();
        let entry = out.entry(kappa).or_insert_with(Rat::zero);
        *entry += &coeff;
    }
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// All set partitions of `{0, .., k-1}`.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for i in 0..k {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q: Vec<Vec<usize>> = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// Graft per-vertex classes into the vertices of `gamma` and push forward.
///
/// The factor for vertex `v` lives on the moduli of type `(g(v), n(v))`;
/// its markings are identified with the slots at `v`: the legs of `gamma`
/// at `v` in marking order, then the incident edge halves in edge order
/// (side 0 before side 1 for self-loops). No automorphism factor is applied.
pub fn glue_pushforward<C: Ring>(
    gamma: &Canonical,
    factors: &[TautClass<C>],
) -> Result<TautClass<C>> {
    let g = &gamma.graph;
    let nv = g.num_vertices();
    assert_eq!(factors.len(), nv);
    // slot lists per vertex: (is_leg, index, side)
    let mut slots: Vec<Vec<(bool, usize, usize)>> = vec![Vec::new(); nv];
    for (i, &v) in g.legs.iter().enumerate() {
        slots[v].push((true, i, 0));
    }
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        slots[a].push((false, i, 0));
        slots[b].push((false, i, 1));
    }
    for v in 0..nv {
        let f = &factors[v];
        if f.g != g.genus[v] || f.n != slots[v].len() as u32 {
            return Err(Error::SlotMismatch {
                expected: slots[v].len() as u32,
                got: f.n,
            });
        }
    }

    let total_g = g.total_genus();
    let total_n = g.num_legs() as u32;
    let mut out = TautClass::zero(total_g, total_n);

    let term_lists: Vec<Vec<(&Canonical, &C)>> = factors.iter().map(|f| f.terms().collect()).collect();
    if term_lists.iter().any(|t| t.is_empty()) {
        return Ok(out);
    }
    for combo in term_lists.iter().map(|t| t.iter()).multi_cartesian_product() {
        let mut genus = Vec::new();
        let mut offsets = Vec::with_capacity(nv);
        let mut kappa: Vec<Vec<u32>> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut psi_edge: Vec<(u32, u32)> = Vec::new();
        for (s, _) in combo.iter() {
            offsets.push(genus.len());
            genus.extend_from_slice(&s.graph.genus);
            kappa.extend(s.dec.kappa.iter().cloned());
            for (j, &(a, b)) in s.graph.edges.iter().enumerate() {
                let off = offsets.last().unwrap();
                edges.push((off + a, off + b));
                psi_edge.push(s.dec.psi_edge[j]);
            }
        }
        let mut legs = vec![0usize; g.num_legs()];
        let mut psi_leg = vec![0u32; g.num_legs()];
        // edge halves of gamma: resolved vertex and psi per (edge, side)
        let mut gamma_edge_halves = vec![((0usize, 0u32), (0usize, 0u32)); g.num_edges()];
        for v in 0..nv {
            let (s, _) = combo[v];
            for (slot, &(is_leg, idx, side)) in slots[v].iter().enumerate() {
                let inner_vertex = offsets[v] + s.graph.legs[slot];
                let psi = s.dec.psi_leg[slot];
                if is_leg {
                    legs[idx] = inner_vertex;
                    psi_leg[idx] = psi;
                } else if side == 0 {
                    gamma_edge_halves[idx].0 = (inner_vertex, psi);
                } else {
                    gamma_edge_halves[idx].1 = (inner_vertex, psi);
                }
            }
        }
        for &((a, pa), (b, pb)) in &gamma_edge_halves {
            edges.push((a, b));
            psi_edge.push((pa, pb));
        }
        let graph = StableGraph {
            genus,
            legs,
            edges,
        };
        let dec = Decoration {
            psi_leg,
            psi_edge,
            kappa,
        };
        let mut coeff = C::one();
        for (_, c) in combo.iter() {
            coeff = coeff.mul(c);
        }
        out.add_term(canonical_form(&graph, &dec), coeff);
    }
    Ok(out)
}

/// Pullback of a smooth-vertex psi/kappa monomial along the gluing map of
/// `gamma`: psi at a marking goes to psi at the leg slot of the carrying
/// vertex, kappa classes distribute additively over vertices. Returns the
/// multilinear expansion as per-vertex (psi-per-slot, kappa) monomials.
pub struct VertexMonomial {
    pub psi: Vec<u32>,
    pub kappa: Vec<u32>,
}

pub fn pullback_psi_kappa(
    gamma: &Canonical,
    psi: &[u32],
    kappa: &[u32],
) -> Vec<Vec<VertexMonomial>> {
    let g = &gamma.graph;
    let nv = g.num_vertices();
    // slots as in glue_pushforward
    let mut slot_count = vec![0usize; nv];
    let mut leg_slot = Vec::new();
    for &v in &g.legs {
        leg_slot.push(slot_count[v]);
        slot_count[v] += 1;
    }
    for &(a, b) in &g.edges {
        slot_count[a] += 1;
        slot_count[b] += 1;
    }
    let mut base: Vec<VertexMonomial> = (0..nv)
        .map(|v| VertexMonomial {
            psi: vec![0; slot_count[v]],
            kappa: Vec::new(),
        })
        .collect();
    for (i, &p) in psi.iter().enumerate() {
        base[g.legs[i]].psi[leg_slot[i]] += p;
    }
    let mut out = Vec::new();
    for assignment in crate::util::index_tuples(&vec![nv; kappa.len()]) {
        let mut term: Vec<VertexMonomial> = base
            .iter()
            .map(|m| VertexMonomial {
                psi: m.psi.clone(),
                kappa: m.kappa.clone(),
            })
            .collect();
        for (j, &v) in assignment.iter().enumerate() {
            term[v].kappa.push(kappa[j]);
        }
        for m in &mut term {
            m.kappa.sort_unstable();
        }
        out.push(term);
    }
    out
}

// ---------------------------------------------------------------------------
// Common degenerations (superposition) and the product
// ---------------------------------------------------------------------------

/// One structure of `(a, b)` on a common degeneration `gamma`: kept edge
/// sets with union all of `E(gamma)`, and flag isomorphisms from the bare
/// source graphs onto the respective contractions.
pub struct SuperStructure {
    pub gamma_index: usize,
    pub sa: Vec<usize>,
    pub vmap_a: Vec<usize>,
    pub iso_a: Iso,
    pub sb: Vec<usize>,
    pub vmap_b: Vec<usize>,
    pub iso_b: Iso,
}

/// All common-degeneration structures for bare graphs `a`, `b` of type
/// `(g, n)`, together with the list of ambient graphs. Cached by canonical
/// keys.
pub struct Superposition {
    pub gammas: Vec<Canonical>,
    pub structures: Vec<SuperStructure>,
}

fn superposition_cache() -> &'static Mutex<BTreeMap<(String, String, u32, u32), std::sync::Arc<Superposition>>> {
    static CACHE: OnceLock<
        Mutex<BTreeMap<(String, String, u32, u32), std::sync::Arc<Superposition>>>,
    > = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Key of a concrete labeled graph. The cached structures below hold vertex
/// and edge maps relative to the exact input labeling, so the cache must not
/// identify isomorphic graphs with different labelings.
fn labeled_key(g: &StableGraph) -> String {
    format!("{:?}|{:?}|{:?}", g.genus, g.legs, g.edges)
}

pub fn superposition(
    a: &StableGraph,
    b: &StableGraph,
    g: u32,
    n: u32,
) -> Result<std::sync::Arc<Superposition>> {
    let akey = labeled_key(a);
    let bkey = labeled_key(b);
    if let Some(s) = superposition_cache()
        .lock()
        .unwrap()
        .get(&(akey.clone(), bkey.clone(), g, n))
    {
        return Ok(s.clone());
    }
    let ea = a.num_edges();
    let eb = b.num_edges();
    let gammas: Vec<Canonical> = enumerate_stable_graphs(g, n)?
        .into_iter()
        .filter(|c| c.graph.num_edges() <= ea + eb && c.graph.num_edges() >= ea.max(eb))
        .collect();
    let mut structures = Vec::new();
    for (gi, gamma) in gammas.iter().enumerate() {
        let e = gamma.graph.num_edges();
        let edge_ids: Vec<usize> = (0..e).collect();
        // candidate kept-edge subsets of the right sizes, with contraction data
        let mut subsets_a = Vec::new();
        for sa in edge_ids.iter().cloned().combinations(ea) {
            let keep: BTreeSet<usize> = sa.iter().cloned().collect();
            let (contr, vmap) = gamma.graph.contract_complement(&keep);
            let isos = enumerate_isomorphisms(a, &contr);
            if !isos.is_empty() {
                subsets_a.push((sa, vmap, isos));
            }
        }
        if subsets_a.is_empty() {
            continue;
        }
        let mut subsets_b = Vec::new();
        for sb in edge_ids.iter().cloned().combinations(eb) {
            let keep: BTreeSet<usize> = sb.iter().cloned().collect();
            let (contr, vmap) = gamma.graph.contract_complement(&keep);
            let isos = enumerate_isomorphisms(b, &contr);
            if !isos.is_empty() {
                subsets_b.push((sb, vmap, isos));
            }
        }
        for (sa, vmap_a, isos_a) in &subsets_a {
            for (sb, vmap_b, isos_b) in &subsets_b {
                // union must cover all edges
                let mut covered = vec![false; e];
                for &i in sa {
                    covered[i] = true;
                }
                for &i in sb {
                    covered[i] = true;
                }
                if !covered.iter().all(|&c| c) {
                    continue;
                }
                for iso_a in isos_a {
                    for iso_b in isos_b {
                        structures.push(SuperStructure {
                            gamma_index: gi,
                            sa: sa.clone(),
                            vmap_a: vmap_a.clone(),
                            iso_a: iso_a.clone(),
                            sb: sb.clone(),
                            vmap_b: vmap_b.clone(),
                            iso_b: iso_b.clone(),
                        });
                    }
                }
            }
        }
    }
    let arc = std::sync::Arc::new(Superposition {
        gammas,
        structures,
    });
    superposition_cache()
        .lock()
        .unwrap()
        .insert((akey, bkey, g, n), arc.clone());
    Ok(arc)
}

/// Transport the decorations of `src` (on graph `a`) onto `gamma` through a
/// kept-edge set and a flag isomorphism `a -> contraction`. Kappa classes
/// distribute over the merged vertices; the expansion is returned as a list
/// of decorations with unit coefficient each.
fn transport_decorations(
    gamma: &StableGraph,
    src: &Canonical,
    sa: &[usize],
    vmap: &[usize],
    iso: &Iso,
) -> Vec<Decoration> {
    let mut base = Decoration::trivial(gamma);
    // legs keep their markings
    for (i, &p) in src.dec.psi_leg.iter().enumerate() {
        base.psi_leg[i] += p;
    }
    // edges of a map to kept edges of gamma
    for (j, &(pa, pb)) in src.dec.psi_edge.iter().enumerate() {
        let (cedge, flip) = iso.edge_map[j];
        let gedge = sa[cedge];
        let (qa, qb) = if flip { (pb, pa) } else { (pa, pb) };
        base.psi_edge[gedge].0 += qa;
        base.psi_edge[gedge].1 += qb;
    }
    // kappa distributes over the preimage classes of merged vertices
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut flat_kappa: Vec<u32> = Vec::new();
    for (v, kap) in src.dec.kappa.iter().enumerate() {
        if kap.is_empty() {
            continue;
        }
        let target = iso.vertex_map[v];
        let class: Vec<usize> = (0..gamma.num_vertices())
            .filter(|&w| vmap[w] == target)
            .collect();
        for &k in kap {
            classes.push(class.clone());
            flat_kappa.push(k);
        }
    }
    if flat_kappa.is_empty() {
        return vec![base];
    }
    let sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
    let mut out = Vec::new();
    for choice in crate::util::index_tuples(&sizes) {
        let mut dec = base.clone();
        for (j, &ci) in choice.iter().enumerate() {
            dec.kappa[classes[j][ci]].push(flat_kappa[j]);
        }
        for k in &mut dec.kappa {
            k.sort_unstable();
        }
        out.push(dec);
    }
    out
}

/// Decoration transport along a common-degeneration structure, exposed for
/// the projection-formula pairing path.
pub fn transport_decorations_public(
    gamma: &StableGraph,
    src: &Canonical,
    kept: &[usize],
    vmap: &[usize],
    iso: &Iso,
) -> Vec<Decoration> {
    transport_decorations(gamma, src, kept, vmap, iso)
}

fn merge_decorations(gamma: &StableGraph, parts: &[&Decoration]) -> Decoration {
    let mut out = Decoration::trivial(gamma);
    for d in parts {
        for (i, &p) in d.psi_leg.iter().enumerate() {
            out.psi_leg[i] += p;
        }
        for (i, &(a, b)) in d.psi_edge.iter().enumerate() {
            out.psi_edge[i].0 += a;
            out.psi_edge[i].1 += b;
        }
        for (v, k) in d.kappa.iter().enumerate() {
            out.kappa[v].extend_from_slice(k);
        }
    }
    for k in &mut out.kappa {
        k.sort_unstable();
    }
    out
}

/// Product in the strata algebra.
///
/// For decorated strata the product is the sum over common degenerations,
/// with transported decorations and one excess factor `-(psi' + psi'')` per
/// edge shared by both sides, weighted by `1/|Aut(gamma)|` per structure.
pub fn multiply<C: Ring>(x: &TautClass<C>, y: &TautClass<C>) -> Result<TautClass<C>> {
    if x.g != y.g || x.n != y.n {
        return Err(Error::AmbientMismatch(x.g, x.n, y.g, y.n));
    }
    let mut out = TautClass::zero(x.g, x.n);
    for (sa, ca) in x.terms() {
        for (sb, cb) in y.terms() {
            let sup = superposition(&sa.graph, &sb.graph, x.g, x.n)?;
            let cab = ca.mul(cb);
            for st in &sup.structures {
                let gamma = &sup.gammas[st.gamma_index];
                let aut_inv = Rat::from_int(gamma.aut as i64).inv().unwrap();
                let coeff = cab.scale(&aut_inv);
                let decs_a = transport_decorations(&gamma.graph, sa, &st.sa, &st.vmap_a, &st.iso_a);
                let decs_b = transport_decorations(&gamma.graph, sb, &st.sb, &st.vmap_b, &st.iso_b);
                // excess: edges in both kept sets
                let sa_set: BTreeSet<usize> = st.sa.iter().cloned().collect();
                let shared: Vec<usize> = st
                    .sb
                    .iter()
                    .cloned()
                    .filter(|e| sa_set.contains(e))
                    .collect();
                for da in &decs_a {
                    for db in &decs_b {
                        let merged = merge_decorations(&gamma.graph, &[da, db]);
                        // expand prod_{e in shared} -(psi'_e + psi''_e)
                        for sides in crate::util::index_tuples(&vec![2; shared.len()]) {
                            let mut dec = merged.clone();
                            for (j, &side) in sides.iter().enumerate() {
                                let e = shared[j];
                                if side == 0 {
                                    dec.psi_edge[e].0 += 1;
                                } else {
                                    dec.psi_edge[e].1 += 1;
                                }
                            }
                            let sign = if shared.len() % 2 == 0 {
                                Rat::one()
                            } else {
                                -Rat::one()
                            };
                            out.add_term(
                                canonical_form(&gamma.graph, &dec),
                                coeff.scale(&sign),
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fundamental(g: u32, n: u32) -> TautClass<Rat> {
        TautClass::fundamental(g, n)
    }

    #[test]
    fn add_scale_prune() {
        let x = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[1], &[], Rat::from_int(2));
        let half = x.scale_rat(&Rat::frac(1, 2));
        let expect = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[1], &[], Rat::one());
        assert_eq!(half, expect);
        assert!(x.sub(&x).unwrap().is_zero());
        assert_eq!(x.add(&TautClass::zero(1, 1)).unwrap(), x);
    }

    #[test]
    fn ambient_mismatch_rejected() {
        let x = fundamental(1, 1);
        let y = fundamental(2, 0);
        assert!(matches!(x.add(&y), Err(Error::AmbientMismatch(..))));
        assert!(matches!(multiply(&x, &y), Err(Error::AmbientMismatch(..))));
    }

    #[test]
    fn kappa_pushforward_small() {
        // one factor: kappa_b
        assert_eq!(kappa_pushforward(&[3]), vec![(vec![3], Rat::one())]);
        // two factors: kappa_a kappa_b + kappa_{a+b}
        let r = kappa_pushforward(&[1, 2]);
        assert_eq!(
            r,
            vec![(vec![1, 2], Rat::one()), (vec![3], Rat::one())]
        );
        // three equal factors: kappa_1^3 + 3 kappa_1 kappa_2 + 2 kappa_3
        let r = kappa_pushforward(&[1, 1, 1]);
        assert_eq!(
            r,
            vec![
                (vec![1, 1, 1], Rat::one()),
                (vec![1, 2], Rat::from_int(3)),
                (vec![3], Rat::from_int(2)),
            ]
        );
    }

    #[test]
    fn glue_identity_on_trivial_graph() {
        let gamma = canonical_graph(&StableGraph::smooth(1, 1));
        let x = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[1], &[], Rat::one());
        let glued = glue_pushforward(&gamma, &[x.clone()]).unwrap();
        assert_eq!(glued, x);
    }

    #[test]
    fn glue_self_loop_gives_boundary_stratum() {
        let loop_graph = canonical_graph(&StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        });
        let glued = glue_pushforward(&loop_graph, &[fundamental(0, 3)]).unwrap();
        assert_eq!(glued.num_terms(), 1);
        let (s, c) = glued.terms().next().unwrap();
        assert_eq!(s.key, loop_graph.key);
        assert_eq!(c, &Rat::one());
    }

    #[test]
    fn glue_psi_on_either_loop_slot_agrees() {
        let loop_graph = canonical_graph(&StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        });
        // psi at slot 1 (first loop half) vs slot 2 (second loop half)
        let f1 = TautClass::<Rat>::psi_kappa_monomial(0, 3, &[0, 1, 0], &[], Rat::one());
        let f2 = TautClass::<Rat>::psi_kappa_monomial(0, 3, &[0, 0, 1], &[], Rat::one());
        let g1 = glue_pushforward(&loop_graph, &[f1]).unwrap();
        let g2 = glue_pushforward(&loop_graph, &[f2]).unwrap();
        assert_eq!(g1, g2);
        assert!(!g1.is_zero());
    }

    #[test]
    fn slot_mismatch_rejected() {
        let loop_graph = canonical_graph(&StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        });
        assert!(matches!(
            glue_pushforward(&loop_graph, &[fundamental(0, 4)]),
            Err(Error::SlotMismatch { .. })
        ));
    }

    #[test]
    fn multiply_by_fundamental_is_identity() {
        let x = TautClass::<Rat>::psi_kappa_monomial(2, 0, &[], &[1], Rat::frac(5, 3));
        let prod = multiply(&x, &fundamental(2, 0)).unwrap();
        assert_eq!(prod, x);
    }

    #[test]
    fn psi_times_kappa_merges_decorations() {
        let psi = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[1], &[], Rat::one());
        let kap = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[0], &[1], Rat::one());
        let prod = multiply(&psi, &kap).unwrap();
        let expect = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[1], &[1], Rat::one());
        assert_eq!(prod, expect);
    }

    #[test]
    fn separating_divisor_self_intersection() {
        // [delta_1 as pushforward]^2 on moduli (2,0): excess term only
        let sep = StableGraph {
            genus: vec![1, 1],
            legs: vec![],
            edges: vec![(0, 1)],
        };
        let mut d = TautClass::<Rat>::zero(2, 0);
        d.add_term(canonical_graph(&sep), Rat::one());
        let sq = multiply(&d, &d).unwrap();
        // expect 2 * xi_*(-psi' - psi''): both psi-decorated strata are
        // identified by the vertex swap, giving one term with coefficient -4
        assert_eq!(sq.num_terms(), 1);
        let (s, c) = sq.terms().next().unwrap();
        assert_eq!(c, &Rat::from_int(-4));
        assert_eq!(s.dec.psi_edge[0].0 + s.dec.psi_edge[0].1, 1);
    }

    #[test]
    fn pullback_kappa_distributes() {
        let sep = canonical_graph(&StableGraph {
            genus: vec![1, 1],
            legs: vec![],
            edges: vec![(0, 1)],
        });
        let terms = pullback_psi_kappa(&sep, &[], &[1]);
        assert_eq!(terms.len(), 2);
        // psi_1 on the self-loop graph lands on a leg slot of the vertex
        let loop_graph = canonical_graph(&StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        });
        let terms = pullback_psi_kappa(&loop_graph, &[1], &[]);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0][0].psi[0], 1);
    }
}
