//! Stable dual graphs: enumeration, canonical labeling, automorphism counts,
//! contractions, isomorphisms, and decorated strata.
//!
//! A stable graph has genus-labeled vertices, edges glued from two half-edges,
//! and numbered legs. Stability requires `2g(v) - 2 + n(v) > 0` at every
//! vertex, where `n(v)` counts incident half-edges and legs, and the total
//! genus is `h^1 + sum g(v)`. Automorphisms fix all legs; self-loops with
//! interchangeable halves contribute a factor 2 each.

use crate::error::{Error, Result};
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;
use std::sync::OnceLock;

/// Bare stable graph. Edge halves are ordered pairs `(side 0, side 1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StableGraph {
    pub genus: Vec<u32>,
    pub legs: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// Psi and kappa decorations on a stable graph.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Decoration {
    pub psi_leg: Vec<u32>,
    pub psi_edge: Vec<(u32, u32)>,
    pub kappa: Vec<Vec<u32>>,
}

impl Decoration {
    pub fn trivial(g: &StableGraph) -> Self {
        Decoration {
            psi_leg: vec![0; g.legs.len()],
            psi_edge: vec![(0, 0); g.edges.len()],
            kappa: vec![Vec::new(); g.genus.len()],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.psi_leg.iter().all(|&p| p == 0)
            && self.psi_edge.iter().all(|&(a, b)| a == 0 && b == 0)
            && self.kappa.iter().all(|k| k.is_empty())
    }

    /// Total codimension carried by the decorations alone.
    pub fn degree(&self) -> u32 {
        self.psi_leg.iter().sum::<u32>()
            + self.psi_edge.iter().map(|&(a, b)| a + b).sum::<u32>()
            + self.kappa.iter().flatten().sum::<u32>()
    }
}

impl StableGraph {
    pub fn smooth(g: u32, n: u32) -> Self {
        StableGraph {
            genus: vec![g],
            legs: vec![0; n as usize],
            edges: Vec::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn h1(&self) -> u32 {
        (self.num_edges() + 1 - self.num_vertices()) as u32
    }

    pub fn total_genus(&self) -> u32 {
        self.genus.iter().sum::<u32>() + self.h1()
    }

    /// Half-edge and leg count at a vertex.
    pub fn valence(&self, v: usize) -> u32 {
        let legs = self.legs.iter().filter(|&&w| w == v).count();
        let halves = self
            .edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum::<usize>();
        (legs + halves) as u32
    }

    pub fn is_connected(&self) -> bool {
        let v = self.num_vertices();
        if v == 0 {
            return false;
        }
        let mut seen = vec![false; v];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &(a, b) in &self.edges {
                for (p, q) in [(a, b), (b, a)] {
                    if p == x && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_stable(&self) -> bool {
        self.is_connected()
            && (0..self.num_vertices())
                .all(|v| 2 * i64::from(self.genus[v]) - 2 + i64::from(self.valence(v)) > 0)
    }

    /// Dimension of the product of the vertex moduli.
    pub fn dim(&self) -> i64 {
        (0..self.num_vertices())
            .map(|v| 3 * i64::from(self.genus[v]) - 3 + i64::from(self.valence(v)))
            .sum()
    }

    /// Contract all edges not in `keep`. Returns the contracted graph, the
    /// vertex map, and for each kept edge (in `keep` order) its index in the
    /// contracted graph. Contracted loops and parallel edges raise genus.
    pub fn contract_complement(&self, keep: &BTreeSet<usize>) -> (StableGraph, Vec<usize>) {
        let v = self.num_vertices();
        let mut parent: Vec<usize> = (0..v).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        let mut extra_genus = vec![0u32; v];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if keep.contains(&i) {
                continue;
            }
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra == rb {
                extra_genus[ra] += 1;
            } else {
                parent[ra] = rb;
                extra_genus[rb] += extra_genus[ra];
            }
        }
        let mut root_to_new: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vertex_map = vec![0usize; v];
        let mut genus = Vec::new();
        for x in 0..v {
            let r = find(&mut parent, x);
            let idx = *root_to_new.entry(r).or_insert_with(|| {
                genus.push(0);
                genus.len() - 1
            });
            vertex_map[x] = idx;
        }
        for x in 0..v {
            let r = find(&mut parent, x);
            if r == x {
                genus[vertex_map[x]] += extra_genus[x];
            }
            genus[vertex_map[x]] += self.genus[x];
        }
        // The loop above adds extra genus once (at the root) and vertex genus
        // for every member of the class.
        let legs = self.legs.iter().map(|&w| vertex_map[w]).collect();
        let edges = keep
            .iter()
            .map(|&i| {
                let (a, b) = self.edges[i];
                (vertex_map[a], vertex_map[b])
            })
            .collect();
        (
            StableGraph {
                genus,
                legs,
                edges,
            },
            vertex_map,
        )
    }
}

/// Flag-level isomorphism from one graph to another: a vertex bijection plus
/// an edge bijection with an orientation flag (true = sides swapped).
#[derive(Clone, Debug)]
pub struct Iso {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<(usize, bool)>,
}

/// All flag-level isomorphisms `a -> b` fixing legs.
pub fn enumerate_isomorphisms(a: &StableGraph, b: &StableGraph) -> Vec<Iso> {
    let mut out = Vec::new();
    let va = a.num_vertices();
    if va != b.num_vertices() || a.num_edges() != b.num_edges() || a.legs.len() != b.legs.len() {
        return out;
    }
    // candidate vertex images by (genus, leg multiset, valence)
    let sig = |g: &StableGraph, v: usize| {
        (
            g.genus[v],
            g.legs
                .iter()
                .enumerate()
                .filter(|(_, &w)| w == v)
                .map(|(i, _)| i)
                .collect::<Vec<_>>(),
            g.valence(v),
        )
    };
    let sigs_a: Vec<_> = (0..va).map(|v| sig(a, v)).collect();
    let sigs_b: Vec<_> = (0..va).map(|v| sig(b, v)).collect();

    let mut vmap = vec![usize::MAX; va];
    let mut used = vec![false; va];
    fn rec(
        v: usize,
        va: usize,
        sigs_a: &[(u32, Vec<usize>, u32)],
        sigs_b: &[(u32, Vec<usize>, u32)],
        a: &StableGraph,
        b: &StableGraph,
        vmap: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Iso>,
    ) {
        if v == va {
            // match edges under vmap
            complete_edges(a, b, vmap, out);
            return;
        }
        for w in 0..va {
            if used[w] || sigs_a[v] != sigs_b[w] {
                continue;
            }
            vmap[v] = w;
            used[w] = true;
            rec(v + 1, va, sigs_a, sigs_b, a, b, vmap, used, out);
            used[w] = false;
            vmap[v] = usize::MAX;
        }
    }

    fn complete_edges(a: &StableGraph, b: &StableGraph, vmap: &[usize], out: &mut Vec<Iso>) {
        // group a-edges by mapped unordered endpoint pair, b-edges likewise
        let key_a = |&(x, y): &(usize, usize)| {
            let (p, q) = (vmap[x], vmap[y]);
            if p <= q {
                (p, q)
            } else {
                (q, p)
            }
        };
        let key_b = |&(x, y): &(usize, usize)| if x <= y { (x, y) } else { (y, x) };
        let mut groups_a: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut groups_b: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in a.edges.iter().enumerate() {
            groups_a.entry(key_a(e)).or_default().push(i);
        }
        for (i, e) in b.edges.iter().enumerate() {
            groups_b.entry(key_b(e)).or_default().push(i);
        }
        if groups_a.keys().collect::<Vec<_>>() != groups_b.keys().collect::<Vec<_>>()
            || groups_a
                .values()
                .zip(groups_b.values())
                .any(|(x, y)| x.len() != y.len())
        {
            return;
        }
        // for each group: all bijections; loops also get both orientations
        let group_keys: Vec<_> = groups_a.keys().cloned().collect();
        let mut assignments: Vec<Vec<Vec<(usize, usize, bool)>>> = Vec::new();
        for k in &group_keys {
            let ea = &groups_a[k];
            let eb = &groups_b[k];
            let is_loop = k.0 == k.1;
            let mut opts = Vec::new();
            for perm in eb.iter().permutations(eb.len()) {
                if is_loop {
                    // every loop can be matched straight or flipped
                    for flips in 0..(1u32 << ea.len()) {
                        let m = ea
                            .iter()
                            .zip(&perm)
                            .enumerate()
                            .map(|(idx, (&x, &&y))| (x, y, flips >> idx & 1 == 1))
                            .collect::<Vec<_>>();
                        opts.push(m);
                    }
                } else {
                    let m = ea
                        .iter()
                        .zip(&perm)
                        .map(|(&x, &&y)| {
                            let (xa, _) = a.edges[x];
                            let (ya, _) = b.edges[y];
                            (x, y, vmap[xa] != ya)
                        })
                        .collect::<Vec<_>>();
                    opts.push(m);
                }
            }
            assignments.push(opts);
        }
        // cartesian product of group options
        let mut idx = vec![0usize; assignments.len()];
        loop {
            let mut edge_map = vec![(0usize, false); a.edges.len()];
            for (gi, opts) in assignments.iter().enumerate() {
                for &(x, y, f) in &opts[idx[gi]] {
                    edge_map[x] = (y, f);
                }
            }
            out.push(Iso {
                vertex_map: vmap.to_vec(),
                edge_map,
            });
            // increment
            let mut carry = 0;
            loop {
                if carry == assignments.len() {
                    return;
                }
                idx[carry] += 1;
                if idx[carry] < assignments[carry].len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
        }
    }

    rec(
        0, va, &sigs_a, &sigs_b, a, b, &mut vmap, &mut used, &mut out,
    );
    out
}

/// Canonical form of a decorated graph: relabeled representative, canonical
/// key, and the automorphism count of the decorated object.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Canonical {
    pub graph: StableGraph,
    pub dec: Decoration,
    pub aut: u64,
    pub key: String,
}

type Encoding = (
    Vec<(u32, Vec<u32>)>,
    Vec<(usize, u32)>,
    Vec<((usize, u32), (usize, u32))>,
);

fn encode_under(g: &StableGraph, dec: &Decoration, perm: &[usize]) -> Encoding {
    let v = g.num_vertices();
    let mut verts = vec![(0u32, Vec::new()); v];
    for x in 0..v {
        let mut k = dec.kappa[x].clone();
        k.sort_unstable();
        verts[perm[x]] = (g.genus[x], k);
    }
    let legs: Vec<(usize, u32)> = g
        .legs
        .iter()
        .zip(&dec.psi_leg)
        .map(|(&w, &p)| (perm[w], p))
        .collect();
    let mut edges: Vec<((usize, u32), (usize, u32))> = g
        .edges
        .iter()
        .zip(&dec.psi_edge)
        .map(|(&(a, b), &(pa, pb))| {
            let ha = (perm[a], pa);
            let hb = (perm[b], pb);
            if ha <= hb {
                (ha, hb)
            } else {
                (hb, ha)
            }
        })
        .collect();
    edges.sort_unstable();
    (verts, legs, edges)
}

fn encoding_key(e: &Encoding) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    write!(s, "v").unwrap();
    for (g, k) in &e.0 {
        write!(s, "{g}[{}]", k.iter().map(|x| x.to_string()).join(",")).unwrap();
    }
    write!(s, ";l").unwrap();
    for (w, p) in &e.1 {
        write!(s, "{w}.{p},").unwrap();
    }
    write!(s, ";e").unwrap();
    for ((a, pa), (b, pb)) in &e.2 {
        write!(s, "{a}.{pa}-{b}.{pb},").unwrap();
    }
    s
}

/// Canonical labeling by refinement plus exhaustive search over residual
/// vertex permutations.
pub fn canonical_form(g: &StableGraph, dec: &Decoration) -> Canonical {
    assert_eq!(dec.psi_leg.len(), g.legs.len());
    assert_eq!(dec.psi_edge.len(), g.edges.len());
    assert_eq!(dec.kappa.len(), g.genus.len());
    let v = g.num_vertices();

    // invariant per vertex: genus, kappa, leg set with psi, valence
    let inv = |x: usize| {
        let mut k = dec.kappa[x].clone();
        k.sort_unstable();
        let legs: Vec<(usize, u32)> = g
            .legs
            .iter()
            .zip(&dec.psi_leg)
            .enumerate()
            .filter(|(_, (&w, _))| w == x)
            .map(|(i, (_, &p))| (i, p))
            .collect();
        (g.genus[x], k, legs, g.valence(x))
    };
    let invs: Vec<_> = (0..v).map(inv).collect();

    // group vertices by invariant; target positions sorted by invariant
    let mut order: Vec<usize> = (0..v).collect();
    order.sort_by(|&a, &b| invs[a].cmp(&invs[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &x in &order {
        if let Some(last) = groups.last_mut() {
            if invs[*last.last().unwrap()] == invs[x] {
                last.push(x);
                continue;
            }
        }
        groups.push(vec![x]);
    }
    let offsets: Vec<usize> = groups
        .iter()
        .scan(0usize, |acc, g| {
            let o = *acc;
            *acc += g.len();
            Some(o)
        })
        .collect();

    let mut best: Option<Encoding> = None;
    let mut best_count = 0u64;

    let group_perms: Vec<Vec<Vec<usize>>> = groups
        .iter()
        .map(|grp| {
            grp.iter()
                .cloned()
                .permutations(grp.len())
                .collect::<Vec<_>>()
        })
        .collect();

    let mut idx = vec![0usize; groups.len()];
    loop {
        let mut perm = vec![0usize; v];
        for (gi, grp_perm) in group_perms.iter().enumerate() {
            for (j, &x) in grp_perm[idx[gi]].iter().enumerate() {
                perm[x] = offsets[gi] + j;
            }
        }
        let enc = encode_under(g, dec, &perm);
        match &best {
            None => {
                best = Some(enc);
                best_count = 1;
            }
            Some(b) => match enc.cmp(b) {
                std::cmp::Ordering::Less => {
                    best = Some(enc);
                    best_count = 1;
                }
                std::cmp::Ordering::Equal => best_count += 1,
                std::cmp::Ordering::Greater => {}
            },
        }
        // increment multi-index
        let mut carry = 0;
        loop {
            if carry == groups.len() {
                let enc = best.unwrap();
                return finish_canonical(enc, best_count);
            }
            idx[carry] += 1;
            if idx[carry] < group_perms[carry].len() {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
    }
}

fn finish_canonical(enc: Encoding, perm_count: u64) -> Canonical {
    // edge symmetry factors: equal normalized decorated edges are
    // interchangeable; a self-loop with equal halves can also swap its halves
    let mut aut = perm_count;
    let mut run = 1u64;
    for i in 0..enc.2.len() {
        if i > 0 && enc.2[i] == enc.2[i - 1] {
            run += 1;
            aut *= run; // multiplies up to run! across the run
        } else {
            run = 1;
        }
        let ((a, pa), (b, pb)) = enc.2[i];
        if a == b && pa == pb {
            aut *= 2;
        }
    }
    let key = encoding_key(&enc);
    let graph = StableGraph {
        genus: enc.0.iter().map(|(g, _)| *g).collect(),
        legs: enc.1.iter().map(|(w, _)| *w).collect(),
        edges: enc.2.iter().map(|(a, b)| (a.0, b.0)).collect(),
    };
    let dec = Decoration {
        psi_leg: enc.1.iter().map(|(_, p)| *p).collect(),
        psi_edge: enc.2.iter().map(|(a, b)| (a.1, b.1)).collect(),
        kappa: enc.0.iter().map(|(_, k)| k.clone()).collect(),
    };
    Canonical {
        graph,
        dec,
        aut,
        key,
    }
}

/// Canonical form of a bare graph.
pub fn canonical_graph(g: &StableGraph) -> Canonical {
    canonical_form(g, &Decoration::trivial(g))
}

fn graph_table() -> &'static Mutex<BTreeMap<(u32, u32), Vec<Canonical>>> {
    static TABLE: OnceLock<Mutex<BTreeMap<(u32, u32), Vec<Canonical>>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// All isomorphism classes of stable graphs of type `(g, n)`, in canonical
/// key order. Memoized; the fill is idempotent.
pub fn enumerate_stable_graphs(g: u32, n: u32) -> Result<Vec<Canonical>> {
    if 2 * i64::from(g) - 2 + i64::from(n) <= 0 {
        return Err(Error::Unstable { g, n });
    }
    if let Some(v) = graph_table().lock().unwrap().get(&(g, n)) {
        return Ok(v.clone());
    }
    let mut found: BTreeMap<String, Canonical> = BTreeMap::new();
    let max_v = (2 * i64::from(g) - 2 + i64::from(n)).max(1) as usize;
    for v_count in 1..=max_v {
        // genus assignments with total at most g
        for genus in (0..v_count)
            .map(|_| 0..=g)
            .multi_cartesian_product()
            .filter(|gs| gs.iter().sum::<u32>() <= g)
        {
            let h1 = g - genus.iter().sum::<u32>();
            let e_count = h1 as usize + v_count - 1;
            let pairs: Vec<(usize, usize)> = (0..v_count)
                .flat_map(|i| (i..v_count).map(move |j| (i, j)))
                .collect();
            for legs in crate::util::index_tuples(&vec![v_count; n as usize]) {
                for edge_sel in pairs.iter().combinations_with_replacement(e_count) {
                    let graph = StableGraph {
                        genus: genus.clone(),
                        legs: legs.clone(),
                        edges: edge_sel.iter().map(|&&e| e).collect(),
                    };
                    if !graph.is_stable() {
                        continue;
                    }
                    debug_assert_eq!(graph.total_genus(), g);
                    let c = canonical_graph(&graph);
                    found.entry(c.key.clone()).or_insert(c);
                }
            }
        }
    }
    let list: Vec<Canonical> = found.into_values().collect();
    graph_table()
        .lock()
        .unwrap()
        .entry((g, n))
        .or_insert_with(|| list.clone());
    Ok(list)
}

/// Partitions of `w` into parts `>= 1`, each partition sorted ascending.
pub fn partitions(w: u32) -> Vec<Vec<u32>> {
    fn rec(w: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if w == 0 {
            out.push(cur.clone());
            return;
        }
        for p in min..=w {
            cur.push(p);
            rec(w - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(w, 1, &mut Vec::new(), &mut out);
    out
}

/// All decorated strata on a canonical graph with the given total
/// codimension, deduplicated and in canonical key order. Decorations beyond
/// the dimension of a vertex moduli space are omitted.
pub fn enumerate_decorations(graph: &Canonical, codim: u32) -> Vec<Canonical> {
    let e = graph.graph.num_edges() as u32;
    if codim < e {
        return Vec::new();
    }
    let budget = codim - e;
    let g = &graph.graph;
    let nv = g.num_vertices();
    let vertex_dim: Vec<i64> = (0..nv)
        .map(|v| 3 * i64::from(g.genus[v]) - 3 + i64::from(g.valence(v)))
        .collect();

    // slots: legs, then edge halves; each slot belongs to a vertex
    let mut slot_vertex: Vec<usize> = g.legs.clone();
    for &(a, b) in &g.edges {
        slot_vertex.push(a);
        slot_vertex.push(b);
    }
    let n_slots = slot_vertex.len();

    let mut found: BTreeMap<String, Canonical> = BTreeMap::new();
    let mut psi = vec![0u32; n_slots];

    fn distribute(
        slot: usize,
        remaining: u32,
        psi: &mut Vec<u32>,
        slot_vertex: &[usize],
        vertex_load: &mut Vec<i64>,
        vertex_dim: &[i64],
        g: &StableGraph,
        found: &mut BTreeMap<String, Canonical>,
    ) {
        if slot == psi.len() {
            // distribute `remaining` into kappa weights per vertex
            kappa_distribute(0, remaining, &mut Vec::new(), psi, vertex_load, vertex_dim, g, found);
            return;
        }
        let v = slot_vertex[slot];
        for take in 0..=remaining {
            if vertex_load[v] + i64::from(take) > vertex_dim[v] {
                break;
            }
            psi[slot] = take;
            vertex_load[v] += i64::from(take);
            distribute(slot + 1, remaining - take, psi, slot_vertex, vertex_load, vertex_dim, g, found);
            vertex_load[v] -= i64::from(take);
            psi[slot] = 0;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn kappa_distribute(
        v: usize,
        remaining: u32,
        kappas: &mut Vec<Vec<u32>>,
        psi: &[u32],
        vertex_load: &mut Vec<i64>,
        vertex_dim: &[i64],
        g: &StableGraph,
        found: &mut BTreeMap<String, Canonical>,
    ) {
        let nv = g.num_vertices();
        if v == nv {
            if remaining > 0 {
                return;
            }
            let n = g.legs.len();
            let dec = Decoration {
                psi_leg: psi[..n].to_vec(),
                psi_edge: (0..g.edges.len())
                    .map(|i| (psi[n + 2 * i], psi[n + 2 * i + 1]))
                    .collect(),
                kappa: kappas.clone(),
            };
            let c = canonical_form(g, &dec);
            found.entry(c.key.clone()).or_insert(c);
            return;
        }
        for w in 0..=remaining {
            if vertex_load[v] + i64::from(w) > vertex_dim[v] {
                break;
            }
            vertex_load[v] += i64::from(w);
            for part in partitions(w) {
                kappas.push(part);
                kappa_distribute(v + 1, remaining - w, kappas, psi, vertex_load, vertex_dim, g, found);
                kappas.pop();
            }
            vertex_load[v] -= i64::from(w);
        }
    }

    let mut vertex_load = vec![0i64; nv];
    distribute(
        0,
        budget,
        &mut psi,
        &slot_vertex,
        &mut vertex_load,
        &vertex_dim,
        g,
        &mut found,
    );
    found.into_values().collect()
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct VertexJson {
    genus: u32,
}

/// Wire format for a decorated graph. Slots number the half-edge positions at
/// a vertex: legs at the vertex in marking order first, then edge halves in
/// edge order. Psi exponents are keyed by `"v:slot"`.
#[derive(Serialize, Deserialize)]
pub struct GraphJson {
    vertices: Vec<VertexJson>,
    legs: Vec<usize>,
    edges: Vec<[[usize; 2]; 2]>,
    aut: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<BTreeMap<String, u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<Vec<Vec<u32>>>,
}

impl Canonical {
    pub fn to_json(&self) -> GraphJson {
        let g = &self.graph;
        // slot bookkeeping per vertex
        let mut next_slot = vec![0usize; g.num_vertices()];
        let mut leg_slot = Vec::new();
        for &v in &g.legs {
            leg_slot.push(next_slot[v]);
            next_slot[v] += 1;
        }
        let mut edges = Vec::new();
        let mut half_slots = Vec::new();
        for &(a, b) in &g.edges {
            let sa = next_slot[a];
            next_slot[a] += 1;
            let sb = next_slot[b];
            next_slot[b] += 1;
            edges.push([[a, sa], [b, sb]]);
            half_slots.push(((a, sa), (b, sb)));
        }
        let mut psi = BTreeMap::new();
        for (i, &p) in self.dec.psi_leg.iter().enumerate() {
            if p > 0 {
                psi.insert(format!("{}:{}", g.legs[i], leg_slot[i]), p);
            }
        }
        for (i, &(pa, pb)) in self.dec.psi_edge.iter().enumerate() {
            let ((a, sa), (b, sb)) = half_slots[i];
            if pa > 0 {
                psi.insert(format!("{a}:{sa}"), pa);
            }
            if pb > 0 {
                psi.insert(format!("{b}:{sb}"), pb);
            }
        }
        let has_kappa = self.dec.kappa.iter().any(|k| !k.is_empty());
        GraphJson {
            vertices: g.genus.iter().map(|&genus| VertexJson { genus }).collect(),
            legs: g.legs.clone(),
            edges,
            aut: self.aut,
            psi: if psi.is_empty() { None } else { Some(psi) },
            kappa: if has_kappa {
                Some(self.dec.kappa.clone())
            } else {
                None
            },
        }
    }
}
