//! Exact psi/kappa intersection numbers and the evaluation and pairing
//! engine for strata-algebra classes.
//!
//! Pure psi integrals are computed by a Virasoro-type recursion seeded by
//! the two base values; kappa classes are converted to extra psi insertions
//! by inclusion-exclusion. All values are memoized in a table that can be
//! persisted to disk.

use crate::algebra::{multiply, set_partitions, superposition, TautClass};
use crate::error::{Error, Result};
use crate::graph::{enumerate_decorations, enumerate_stable_graphs, Canonical, Decoration, StableGraph};
use crate::rational::Rat;
use crate::ring::Ring;
use itertools::Itertools;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::OnceLock;
use std::sync::RwLock;

/// Key of a memoized intersection value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TauKey {
    pub g: u32,
    pub psi: Vec<u32>,
    pub kappa: Vec<u32>,
}

impl TauKey {
    pub fn new(g: u32, mut psi: Vec<u32>, mut kappa: Vec<u32>) -> Self {
        psi.sort_unstable();
        kappa.sort_unstable();
        TauKey { g, psi, kappa }
    }

    fn to_line(&self, value: &Rat) -> String {
        format!(
            "{};{};{} {}",
            self.g,
            self.psi.iter().map(|x| x.to_string()).join(","),
            self.kappa.iter().map(|x| x.to_string()).join(","),
            value
        )
    }

    fn parse_line(line: &str) -> Option<(TauKey, Rat)> {
        let (key, val) = line.trim().split_once(' ')?;
        let mut parts = key.split(';');
        let g = parts.next()?.parse().ok()?;
        let parse_list = |s: &str| -> Option<Vec<u32>> {
            if s.is_empty() {
                Some(Vec::new())
            } else {
                s.split(',').map(|x| x.parse().ok()).collect()
            }
        };
        let psi = parse_list(parts.next()?)?;
        let kappa = parse_list(parts.next()?)?;
        let value = Rat::from_str(val).ok()?;
        Some((TauKey::new(g, psi, kappa), value))
    }
}

fn memo() -> &'static RwLock<BTreeMap<TauKey, Rat>> {
    static MEMO: OnceLock<RwLock<BTreeMap<TauKey, Rat>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(BTreeMap::new()))
}

/// Snapshot of all memoized values (for invariant sweeps and cache dumps).
pub fn memo_snapshot() -> Vec<(TauKey, Rat)> {
    memo()
        .read()
        .unwrap()
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

/// Write the memo table to a writer, one sorted `key value` line each.
pub fn save_cache(w: &mut impl Write) -> std::io::Result<()> {
    for (k, v) in memo_snapshot() {
        writeln!(w, "{}", k.to_line(&v))?;
    }
    Ok(())
}

/// Merge cache lines into the memo table.
pub fn load_cache(r: impl BufRead) -> std::io::Result<usize> {
    let mut count = 0;
    let mut table = memo().write().unwrap();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some((k, v)) = TauKey::parse_line(&line) {
            table.insert(k, v);
            count += 1;
        }
    }
    Ok(count)
}

/// Integral of a pure psi monomial over the moduli of stable curves:
/// zero on dimension mismatch, error on an unstable `(g, n)`.
pub fn psi_intersection(g: u32, exponents: &[u32]) -> Result<Rat> {
    if 2 * i64::from(g) - 2 + exponents.len() as i64 <= 0 {
        return Err(Error::Unstable {
            g,
            n: exponents.len() as u32,
        });
    }
    Ok(tau_value(g, exponents))
}

/// Internal total function: unstable or dimension-mismatched input gives 0.
fn tau_value(g: u32, exponents: &[u32]) -> Rat {
    let n = exponents.len() as i64;
    if 2 * i64::from(g) - 2 + n <= 0 {
        return Rat::zero();
    }
    let dim = 3 * i64::from(g) - 3 + n;
    let total: i64 = exponents.iter().map(|&x| i64::from(x)).sum();
    if total != dim {
        return Rat::zero();
    }
    let key = TauKey::new(g, exponents.to_vec(), Vec::new());
    if let Some(v) = memo().read().unwrap().get(&key) {
        return v.clone();
    }
    let value = tau_compute(g, &key.psi);
    memo().write().unwrap().insert(key, value.clone());
    value
}

fn tau_compute(g: u32, exps: &[u32]) -> Rat {
    // seeds
    if g == 0 && exps == [0, 0, 0] {
        return Rat::one();
    }
    if g == 1 && exps == [1] {
        return Rat::frac(1, 24);
    }
    let maxpos = exps
        .iter()
        .enumerate()
        .max_by_key(|(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap();
    let k = exps[maxpos];
    let rest: Vec<u32> = exps
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != maxpos)
        .map(|(_, &v)| v)
        .collect();
    if k >= 2 {
        return dvv(g, k, &rest);
    }
    if let Some(zpos) = exps.iter().position(|&v| v == 0) {
        // string equation
        let rest: Vec<u32> = exps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != zpos)
            .map(|(_, &v)| v)
            .collect();
        let mut acc = Rat::zero();
        for j in 0..rest.len() {
            if rest[j] == 0 {
                continue;
            }
            let mut lowered = rest.clone();
            lowered[j] -= 1;
            acc += &tau_value(g, &lowered);
        }
        return acc;
    }
    // all exponents equal 1, some removable by the dilaton equation
    let rest = &exps[1..];
    let factor = 2 * i64::from(g) - 2 + rest.len() as i64;
    tau_value(g, rest) * Rat::from_int(factor)
}

/// Virasoro-type recursion removing one insertion of exponent `k >= 2`:
///
/// `(2k+1)!! <tau_k prod tau_{d_i}> = sum_j (2d_j+2k-1)!!/(2d_j-1)!!
///  <tau_{d_j+k-1} ...> + 1/2 sum_{a+b=k-2} (2a+1)!!(2b+1)!!
///  [ <tau_a tau_b ...>_{g-1} + ordered splits ]`.
fn dvv(g: u32, k: u32, rest: &[u32]) -> Rat {
    let mut rhs = Rat::zero();
    for j in 0..rest.len() {
        let d = rest[j];
        let coeff = Rat::double_factorial(2 * i64::from(d) + 2 * i64::from(k) - 1)
            / &Rat::double_factorial(2 * i64::from(d) - 1);
        let mut args: Vec<u32> = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, &v)| v)
            .collect();
        args.push(d + k - 1);
        rhs += &(coeff * tau_value(g, &args));
    }
    if k >= 2 {
        let half = Rat::frac(1, 2);
        for a in 0..=(k - 2) {
            let b = k - 2 - a;
            let c = Rat::double_factorial(2 * i64::from(a) + 1)
                * Rat::double_factorial(2 * i64::from(b) + 1);
            // non-separating reduction
            if g >= 1 {
                let mut args = rest.to_vec();
                args.push(a);
                args.push(b);
                rhs += &(&half * &(c.clone() * tau_value(g - 1, &args)));
            }
            // separating splits, ordered
            let m = rest.len();
            for g1 in 0..=g {
                let g2 = g - g1;
                for mask in 0..(1u32 << m) {
                    let mut args1 = vec![a];
                    let mut args2 = vec![b];
                    for (i, &d) in rest.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            args1.push(d);
                        } else {
                            args2.push(d);
                        }
                    }
                    let v1 = tau_value(g1, &args1);
                    if v1.is_zero() {
                        continue;
                    }
                    let v2 = tau_value(g2, &args2);
                    if v2.is_zero() {
                        continue;
                    }
                    rhs += &(&half * &(c.clone() * v1 * v2));
                }
            }
        }
    }
    rhs / &Rat::double_factorial(2 * i64::from(k) + 1)
}

/// Mixed psi/kappa integral. Kappa classes are converted to extra psi
/// insertions by inclusion-exclusion over merges: each partition of the
/// kappa set contributes `prod_B (-1)^{|B|-1} <... tau_{b(B)+1}>`.
pub fn kappa_psi_intersection(key: &TauKey) -> Result<Rat> {
    let g = key.g;
    let n = key.psi.len() as u32;
    if 2 * i64::from(g) - 2 + i64::from(n) <= 0 {
        return Err(Error::Unstable { g, n });
    }
    Ok(kappa_psi_value(g, &key.psi, &key.kappa))
}

fn kappa_psi_value(g: u32, psi: &[u32], kappa: &[u32]) -> Rat {
    // kappa_0 is a multiple of the fundamental class
    let mut scalar = Rat::one();
    let kappa: Vec<u32> = kappa
        .iter()
        .filter(|&&b| {
            if b == 0 {
                let factor = 2 * i64::from(g) - 2 + psi.len() as i64;
                scalar *= &Rat::from_int(factor);
                false
            } else {
                true
            }
        })
        .cloned()
        .collect();
    if kappa.is_empty() {
        return scalar * tau_value(g, psi);
    }
    let key = TauKey::new(g, psi.to_vec(), kappa.clone());
    if let Some(v) = memo().read().unwrap().get(&key) {
        return scalar * v.clone();
    }
    let mut acc = Rat::zero();
    for part in set_partitions(kappa.len()) {
        let mut args = psi.to_vec();
        let mut sign = Rat::one();
        for block in &part {
            let b: u32 = block.iter().map(|&i| kappa[i]).sum();
            args.push(b + 1);
            if block.len() % 2 == 0 {
                sign = -sign;
            }
        }
        acc += &(sign * tau_value(g, &args));
    }
    memo().write().unwrap().insert(key, acc.clone());
    scalar * acc
}

/// Per-vertex data of one stratum term: genus, psi exponents at all slots,
/// kappa multiset.
fn vertex_data(s: &Canonical) -> Vec<(u32, Vec<u32>, Vec<u32>)> {
    let g = &s.graph;
    let nv = g.num_vertices();
    let mut psi: Vec<Vec<u32>> = vec![Vec::new(); nv];
    for (i, &v) in g.legs.iter().enumerate() {
        psi[v].push(s.dec.psi_leg[i]);
    }
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        psi[a].push(s.dec.psi_edge[i].0);
        psi[b].push(s.dec.psi_edge[i].1);
    }
    (0..nv)
        .map(|v| (g.genus[v], psi[v].clone(), s.dec.kappa[v].clone()))
        .collect()
}

fn stratum_integral(s: &Canonical) -> Rat {
    let mut acc = Rat::one();
    for (g, psi, kappa) in vertex_data(s) {
        let v = kappa_psi_value(g, &psi, &kappa);
        if v.is_zero() {
            return Rat::zero();
        }
        acc *= &v;
    }
    acc
}

/// Integral of a strata-algebra class: per stored generator the product of
/// vertex integrals (treating half-edges as markings), zero off the top
/// degree.
pub fn integrate<C: Ring>(x: &TautClass<C>) -> C {
    let dim = 3 * i64::from(x.g) - 3 + i64::from(x.n);
    let mut acc = C::zero();
    for (s, c) in x.terms() {
        if i64::from(TautClass::<C>::stratum_degree(s)) != dim {
            continue;
        }
        let v = stratum_integral(s);
        if !v.is_zero() {
            acc = acc.add(&c.scale(&v));
        }
    }
    acc
}

/// Pairing through the product: `integrate(multiply(x, y))`, with a
/// complementary-degree check on homogeneous inputs.
pub fn pair(x: &TautClass<Rat>, y: &TautClass<Rat>) -> Result<Rat> {
    if x.is_zero() || y.is_zero() {
        return Ok(Rat::zero());
    }
    let dim = 3 * i64::from(x.g) - 3 + i64::from(x.n);
    if let (Some(dx), Some(dy)) = (x.homogeneous_degree(), y.homogeneous_degree()) {
        if i64::from(dx) + i64::from(dy) != dim {
            return Err(Error::DegreeMismatch(dx, dy, dim as u32));
        }
    }
    Ok(integrate(&multiply(x, y)?))
}

/// Independent projection-formula evaluation of `integrate(x * [stratum])`:
/// the common degenerations are traversed and integrated vertex by vertex
/// without ever materializing the product class.
pub fn pair_projection(x: &TautClass<Rat>, stratum: &Canonical) -> Result<Rat> {
    let mut acc = Rat::zero();
    for (sa, ca) in x.terms() {
        let sup = superposition(&sa.graph, &stratum.graph, x.g, x.n)?;
        for st in &sup.structures {
            let gamma = &sup.gammas[st.gamma_index];
            let aut_inv = Rat::from_int(gamma.aut as i64).inv().unwrap();
            let decs_a =
                transport_for_pairing(&gamma.graph, sa, &st.sa, &st.vmap_a, &st.iso_a);
            let decs_b =
                transport_for_pairing(&gamma.graph, stratum, &st.sb, &st.vmap_b, &st.iso_b);
            let sa_set: std::collections::BTreeSet<usize> = st.sa.iter().cloned().collect();
            let shared: Vec<usize> = st
                .sb
                .iter()
                .cloned()
                .filter(|e| sa_set.contains(e))
                .collect();
            let sign = if shared.len() % 2 == 0 {
                Rat::one()
            } else {
                -Rat::one()
            };
            for da in &decs_a {
                for db in &decs_b {
                    for sides in crate::util::index_tuples(&vec![2; shared.len()]) {
                        let mut dec = merge_two(&gamma.graph, da, db);
                        for (j, &side) in sides.iter().enumerate() {
                            let e = shared[j];
                            if side == 0 {
                                dec.psi_edge[e].0 += 1;
                            } else {
                                dec.psi_edge[e].1 += 1;
                            }
                        }
                        let c = Canonical {
                            graph: gamma.graph.clone(),
                            dec,
                            aut: 1,
                            key: String::new(),
                        };
                        let v = stratum_integral(&c);
                        if !v.is_zero() {
                            acc += &(ca * &(&(&aut_inv * &sign) * &v));
                        }
                    }
                }
            }
        }
    }
    Ok(acc)
}

fn transport_for_pairing(
    gamma: &StableGraph,
    src: &Canonical,
    kept: &[usize],
    vmap: &[usize],
    iso: &crate::graph::Iso,
) -> Vec<Decoration> {
    crate::algebra::transport_decorations_public(gamma, src, kept, vmap, iso)
}

fn merge_two(gamma: &StableGraph, a: &Decoration, b: &Decoration) -> Decoration {
    let mut out = Decoration::trivial(gamma);
    for d in [a, b] {
        for (i, &p) in d.psi_leg.iter().enumerate() {
            out.psi_leg[i] += p;
        }
        for (i, &(x, y)) in d.psi_edge.iter().enumerate() {
            out.psi_edge[i].0 += x;
            out.psi_edge[i].1 += y;
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

/// Outcome of pairing a candidate relation against every decorated stratum
/// of complementary degree.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub degree: u32,
    pub complementary_degree: u32,
    /// (canonical stratum key, pairing value)
    pub pairings: Vec<(String, Rat)>,
    pub consistent: bool,
}

/// Pair `x` against every complementary-degree decorated stratum. The
/// verdict is "consistent with zero" exactly when all pairings vanish.
/// With `cross_check` set, every pairing is evaluated both through the
/// product and through the projection formula, and the two must agree.
pub fn relation_verify(x: &TautClass<Rat>, cross_check: bool) -> Result<VerifyReport> {
    let dim = 3 * i64::from(x.g) - 3 + i64::from(x.n);
    let degree = match x.homogeneous_degree() {
        Some(d) => d,
        None if x.is_zero() => 0,
        None => {
            return Err(Error::Invalid(
                "relation_verify needs a homogeneous class".into(),
            ))
        }
    };
    if i64::from(degree) > dim {
        return Err(Error::Invalid("degree exceeds dimension".into()));
    }
    let comp = (dim - i64::from(degree)) as u32;
    let mut strata = Vec::new();
    for graph in enumerate_stable_graphs(x.g, x.n)? {
        strata.extend(enumerate_decorations(&graph, comp));
    }
    let pairings: Result<Vec<(String, Rat)>> = strata
        .par_iter()
        .map(|s| {
            let v = pair_projection(x, s)?;
            if cross_check {
                let mut y = TautClass::<Rat>::zero(x.g, x.n);
                y.add_term(s.clone(), Rat::one());
                let w = pair(x, &y)?;
                if v != w {
                    return Err(Error::Invalid(format!(
                        "pairing paths disagree on {}: {} vs {}",
                        s.key, v, w
                    )));
                }
            }
            Ok((s.key.clone(), v))
        })
        .collect();
    let pairings = pairings?;
    let consistent = pairings.iter().all(|(_, v)| v.is_zero());
    Ok(VerifyReport {
        degree,
        complementary_degree: comp,
        pairings,
        consistent,
    })
}

/// Iterated single-peel conversion oracle: removes kappa classes one at a
/// time in the given order. Used to check order independence of the closed
/// formula.
pub fn kappa_conversion_oracle(g: u32, psi: &[u32], kappa: &[u32], peel_order: &[usize]) -> Rat {
    fn rec(g: u32, psi: &[u32], kappa: &[u32], order: &[usize]) -> Rat {
        if kappa.is_empty() {
            return tau_value(g, psi);
        }
        let pos = *order.last().unwrap();
        let b = kappa[pos];
        let rest: Vec<u32> = kappa
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, &v)| v)
            .collect();
        let rest_order: Vec<usize> = order[..order.len() - 1]
            .iter()
            .map(|&i| if i > pos { i - 1 } else { i })
            .collect();
        // subsets of the remaining kappas merge into the new marking
        let m = rest.len();
        let mut acc = Rat::zero();
        for mask in 0..(1u32 << m) {
            let mut merged = b;
            let mut kept = Vec::new();
            let mut kept_order_src = Vec::new();
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    merged += rest[i];
                } else {
                    kept.push(rest[i]);
                    kept_order_src.push(i);
                }
            }
            // skip orders referring to merged kappas: rebuild peel order on kept
            let mut kept_order: Vec<usize> = Vec::new();
            for &o in &rest_order {
                if let Some(p) = kept_order_src.iter().position(|&s| s == o) {
                    kept_order.push(p);
                }
            }
            let sign = if mask.count_ones() % 2 == 0 {
                Rat::one()
            } else {
                -Rat::one()
            };
            let mut args = psi.to_vec();
            args.push(merged + 1);
            acc += &(sign * rec(g, &args, &kept, &kept_order));
        }
        acc
    }
    assert_eq!(peel_order.len(), kappa.len());
    rec(g, psi, kappa, peel_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::canonical_graph;

    #[test]
    fn base_values() {
        assert_eq!(psi_intersection(0, &[0, 0, 0]).unwrap(), Rat::one());
        assert_eq!(psi_intersection(1, &[1]).unwrap(), Rat::frac(1, 24));
        assert_eq!(psi_intersection(2, &[4]).unwrap(), Rat::frac(1, 1152));
        assert_eq!(psi_intersection(3, &[7]).unwrap(), Rat::frac(1, 82944));
    }

    #[test]
    fn unstable_is_an_error() {
        assert!(matches!(
            psi_intersection(0, &[0, 0]),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_zero() {
        assert_eq!(psi_intersection(1, &[2]).unwrap(), Rat::zero());
        assert_eq!(psi_intersection(0, &[1, 0, 0]).unwrap(), Rat::zero());
    }

    #[test]
    fn genus_two_mixed_values() {
        assert_eq!(psi_intersection(2, &[2, 3]).unwrap(), Rat::frac(29, 5760));
        assert_eq!(psi_intersection(2, &[2, 2, 2]).unwrap(), Rat::frac(7, 240));
        assert_eq!(psi_intersection(2, &[0, 2, 4]).unwrap(), Rat::frac(11, 1440));
    }

    #[test]
    fn genus_zero_closed_form() {
        // <tau_{d_1}..tau_{d_n}>_0 = (n-3)! / prod d_i!
        for (exps, expect) in [
            (vec![0, 0, 0, 1], Rat::one()),
            (vec![0, 0, 0, 0, 2], Rat::one()),
            (vec![0, 0, 0, 0, 1, 2], Rat::from_int(3)),
            (vec![0, 0, 0, 0, 0, 2, 2], Rat::from_int(6)),
        ] {
            let n = exps.len() as i64;
            let mut denom = Rat::one();
            for &d in &exps {
                denom *= &Rat::factorial(d as u64);
            }
            let formula = Rat::factorial((n - 3) as u64) / &denom;
            assert_eq!(formula, expect);
            assert_eq!(psi_intersection(0, &exps).unwrap(), expect);
        }
    }

    #[test]
    fn string_and_dilaton_on_memo() {
        // populate
        psi_intersection(2, &[4]).unwrap();
        psi_intersection(2, &[2, 3]).unwrap();
        psi_intersection(1, &[1, 1, 1]).unwrap();
        for (key, value) in memo_snapshot() {
            if !key.kappa.is_empty() {
                continue;
            }
            let n = key.psi.len() as i64;
            // string: <tau_0 prod tau_{a_i}> = sum_i <... tau_{a_i - 1} ...>
            let mut with_zero = key.psi.clone();
            with_zero.push(0);
            let lhs = tau_value(key.g, &with_zero);
            let mut rhs = Rat::zero();
            for j in 0..key.psi.len() {
                if key.psi[j] == 0 {
                    continue;
                }
                let mut lowered = key.psi.clone();
                lowered[j] -= 1;
                rhs += &tau_value(key.g, &lowered);
            }
            assert_eq!(lhs, rhs, "string fails at {key:?}");
            // dilaton
            let mut with_one = key.psi.clone();
            with_one.push(1);
            let lhs = tau_value(key.g, &with_one);
            let rhs = value.clone() * Rat::from_int(2 * i64::from(key.g) - 2 + n);
            assert_eq!(lhs, rhs, "dilaton fails at {key:?}");
        }
    }

    #[test]
    fn kappa_values() {
        // kappa_1 on the one-pointed genus-1 space
        let k = TauKey::new(1, vec![0], vec![1]);
        assert_eq!(kappa_psi_intersection(&k).unwrap(), Rat::frac(1, 24));
        // pure psi delegates
        let k = TauKey::new(0, vec![0, 0, 0], vec![]);
        assert_eq!(kappa_psi_intersection(&k).unwrap(), Rat::one());
        let k = TauKey::new(0, vec![0, 0, 1], vec![]);
        assert_eq!(kappa_psi_intersection(&k).unwrap(), Rat::zero());
    }

    #[test]
    fn kappa_zero_expands_to_euler_count() {
        // kappa_0 = (2g - 2 + n) times the fundamental class
        let k = TauKey::new(0, vec![0, 0, 0], vec![0]);
        assert_eq!(kappa_psi_intersection(&k).unwrap(), Rat::one());
        let k = TauKey::new(0, vec![0, 0, 0, 1], vec![0]);
        assert_eq!(kappa_psi_intersection(&k).unwrap(), Rat::from_int(2));
    }

    #[test]
    fn relation_verify_trivial_cases() {
        // the zero class is consistent with zero
        let rep = relation_verify(&TautClass::<Rat>::zero(2, 0), false).unwrap();
        assert!(rep.consistent);
        // a lone kappa_1 on the genus-2 space is not a relation
        let kap = TautClass::<Rat>::psi_kappa_monomial(2, 0, &[], &[1], Rat::one());
        let rep = relation_verify(&kap, false).unwrap();
        assert!(!rep.consistent);
        assert!(rep.pairings.iter().any(|(_, v)| !v.is_zero()));
    }

    #[test]
    fn kappa_conversion_order_independent() {
        // kappa_1^3 on genus 2, and mixed exponents on genus 1
        for (g, psi, kappa) in [
            (2u32, vec![], vec![1, 1, 1]),
            (1, vec![1], vec![1, 1]),
            (2, vec![0], vec![1, 2]),
        ] {
            let closed = kappa_psi_value(g, &psi, &kappa);
            let k = kappa.len();
            for order in (0..k).permutations(k) {
                let v = kappa_conversion_oracle(g, &psi, &kappa, &order);
                assert_eq!(v, closed, "order {order:?}");
            }
        }
    }

    #[test]
    fn kappa_closed_formula_genus_zero_anchor() {
        // On the six-pointed rational space: kappa_1^3 integrates to 61.
        assert_eq!(
            kappa_psi_value(0, &[0, 0, 0, 0, 0, 0], &[1, 1, 1]),
            Rat::from_int(61)
        );
    }

    #[test]
    fn integrate_basics() {
        assert_eq!(
            integrate(&TautClass::<Rat>::fundamental(0, 3)),
            Rat::one()
        );
        let psi1 = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[1], &[], Rat::one());
        assert_eq!(integrate(&psi1), Rat::frac(1, 24));
        // boundary stratum with coefficient 1/2 integrates to 1/2
        let loop_graph = canonical_graph(&StableGraph {
            genus: vec![0],
            legs: vec![0],
            edges: vec![(0, 0)],
        });
        let mut d = TautClass::<Rat>::zero(1, 1);
        d.add_term(loop_graph, Rat::frac(1, 2));
        assert_eq!(integrate(&d), Rat::frac(1, 2));
    }

    #[test]
    fn pairing_degree_checks() {
        let psi1 = TautClass::<Rat>::psi_kappa_monomial(1, 1, &[1], &[], Rat::one());
        assert_eq!(
            pair(&psi1, &TautClass::fundamental(1, 1)).unwrap(),
            Rat::frac(1, 24)
        );
        assert_eq!(
            pair(&psi1, &TautClass::zero(1, 1)).unwrap(),
            Rat::zero()
        );
        assert!(matches!(
            pair(&psi1, &psi1),
            Err(Error::DegreeMismatch(..))
        ));
    }

    #[test]
    fn separating_divisor_cube() {
        // triple self-intersection of the separating boundary pushforward on
        // the genus-2 space: 8 * 1/576
        let sep = canonical_graph(&StableGraph {
            genus: vec![1, 1],
            legs: vec![],
            edges: vec![(0, 1)],
        });
        let mut d = TautClass::<Rat>::zero(2, 0);
        d.add_term(sep, Rat::one());
        let sq = multiply(&d, &d).unwrap();
        let cube = multiply(&sq, &d).unwrap();
        assert_eq!(integrate(&cube), Rat::frac(1, 72));
    }

    #[test]
    fn pair_symmetry_and_projection_agreement() {
        // all generator pairs of complementary degree on the two-pointed
        // genus-1 space, every degree split
        let graphs = enumerate_stable_graphs(1, 2).unwrap();
        for d in 0..=2u32 {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for c in &graphs {
                left.extend(enumerate_decorations(c, d));
                right.extend(enumerate_decorations(c, 2 - d));
            }
            for a in &left {
                let mut x = TautClass::<Rat>::zero(1, 2);
                x.add_term(a.clone(), Rat::one());
                for b in &right {
                    let mut y = TautClass::<Rat>::zero(1, 2);
                    y.add_term(b.clone(), Rat::one());
                    let xy = pair(&x, &y).unwrap();
                    let yx = pair(&y, &x).unwrap();
                    assert_eq!(xy, yx);
                    let proj = pair_projection(&x, b).unwrap();
                    assert_eq!(xy, proj, "projection disagrees on {} x {}", a.key, b.key);
                }
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        psi_intersection(2, &[4]).unwrap();
        let mut buf = Vec::new();
        save_cache(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("1/1152"));
        let loaded = load_cache(std::io::BufReader::new(text.as_bytes())).unwrap();
        assert!(loaded > 0);
    }
}
