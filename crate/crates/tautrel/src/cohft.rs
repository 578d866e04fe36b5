//! Cohomological field theory calculus: trivial theories from Frobenius
//! algebra data, R-matrix series with the symplectic condition, the graph
//! sum action on the strata algebra, and extraction of tautological
//! relations from pole coefficients.

use crate::algebra::{set_partitions, TautClass};
use crate::asymptotics::{stationary_phase, CriticalExpansion};
use crate::error::{Error, Result};
use crate::graph::{canonical_form, enumerate_stable_graphs, Canonical, Decoration};
use crate::pixton::{pixton_relation, RelationRequest};
use crate::rational::Rat;
use crate::ring::{LambdaLaurent, Ring, SqrtPhi};
use crate::series::{BiSeries, TruncSeries};

/// How the trivial theory evaluates on basis insertions.
#[derive(Clone, Debug)]
pub enum TqftMode<K: Ring> {
    /// Semisimple formula `sum_i delta_i^{g-1} prod_j c_{ij}` from the
    /// idempotent decomposition of the basis vectors.
    Idempotent,
    /// Rank-two parity rule: with `b` insertions of the second basis vector,
    /// the value is `2^g sqrt_phi^{g-1+b}` when `g - 1 + b` is even, else 0.
    Parity { sqrt_phi: K },
}

/// Frobenius algebra data in a declared basis, with optional idempotent
/// decomposition. `delta` holds the inverse pairing norms of the
/// idempotents; `basis_in_idem[j][i]` expresses basis vector `j` in the
/// idempotent basis.
#[derive(Clone, Debug)]
pub struct FrobeniusAlgebra<K: Ring> {
    pub dim: usize,
    pub eta: Vec<Vec<K>>,
    pub eta_inv: Vec<Vec<K>>,
    pub unit: Vec<K>,
    pub delta: Vec<K>,
    pub delta_inv: Vec<K>,
    pub basis_in_idem: Vec<Vec<K>>,
    pub tqft_mode: TqftMode<K>,
}

impl<K: Ring> FrobeniusAlgebra<K> {
    /// Trivial one-dimensional algebra with unit pairing.
    pub fn one_dimensional() -> Self {
        FrobeniusAlgebra {
            dim: 1,
            eta: vec![vec![K::one()]],
            eta_inv: vec![vec![K::one()]],
            unit: vec![K::one()],
            delta: vec![K::one()],
            delta_inv: vec![K::one()],
            basis_in_idem: vec![vec![K::one()]],
            tqft_mode: TqftMode::Idempotent,
        }
    }

    /// Trivial-theory value on basis insertions given by their counts.
    pub fn tqft(&self, g: u32, basis_counts: &[u32]) -> K {
        match &self.tqft_mode {
            TqftMode::Parity { sqrt_phi } => {
                assert_eq!(self.dim, 2);
                let b = basis_counts[1];
                let e = i64::from(g) - 1 + i64::from(b);
                if e % 2 != 0 {
                    return K::zero();
                }
                let mut v = K::from_rat(&Rat::from_int(2).pow(g as i32));
                if e >= 0 {
                    for _ in 0..e {
                        v = v.mul(sqrt_phi);
                    }
                } else {
                    let inv = sqrt_phi.try_inv().expect("sqrt_phi must be invertible");
                    for _ in 0..(-e) {
                        v = v.mul(&inv);
                    }
                }
                v
            }
            TqftMode::Idempotent => {
                let mut acc = K::zero();
                for i in 0..self.dim {
                    // delta_i^{g-1}
                    let mut val = if g >= 1 {
                        let mut p = K::one();
                        for _ in 0..(g - 1) {
                            p = p.mul(&self.delta[i]);
                        }
                        p
                    } else {
                        self.delta_inv[i].clone()
                    };
                    for (j, &count) in basis_counts.iter().enumerate() {
                        for _ in 0..count {
                            val = val.mul(&self.basis_in_idem[j][i]);
                        }
                    }
                    acc = acc.add(&val);
                }
                acc
            }
        }
    }
}

/// Square matrix of truncated series in `z`.
#[derive(Clone, PartialEq, Debug)]
pub struct RMatrix<K: Ring> {
    pub entries: Vec<Vec<TruncSeries<K>>>,
}

impl<K: Ring> RMatrix<K> {
    pub fn identity(dim: usize, order: usize) -> Self {
        RMatrix {
            entries: (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            if i == j {
                                TruncSeries::one(order)
                            } else {
                                TruncSeries::zero(order)
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn order(&self) -> usize {
        self.entries[0][0].order()
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let d = self.dim();
        let order = self.order();
        let mut out = Vec::new();
        for i in 0..d {
            let mut row = Vec::new();
            for j in 0..d {
                let mut acc = TruncSeries::zero(order);
                for k in 0..d {
                    acc = acc.add(&self.entries[i][k].mul(&rhs.entries[k][j])?);
                }
                row.push(acc);
            }
            out.push(row);
        }
        Ok(RMatrix { entries: out })
    }

    pub fn is_identity(&self) -> bool {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j {
                    TruncSeries::one(self.order())
                } else {
                    TruncSeries::zero(self.order())
                };
                if self.entries[i][j] != expect {
                    return false;
                }
            }
        }
        true
    }

    /// First (order, row, col) where the product with `rhs` differs from the
    /// identity.
    fn identity_defect(product: &Self) -> Option<(usize, usize, usize)> {
        let d = product.dim();
        for k in 0..=product.order() {
            for i in 0..d {
                for j in 0..d {
                    let expect = if i == j && k == 0 { K::one() } else { K::zero() };
                    if product.entries[i][j].coeff(k) != &expect {
                        return Some((k, i, j));
                    }
                }
            }
        }
        None
    }
}

/// Inverse through the symplectic condition: the adjoint of `R(-z)` with
/// respect to `eta`. The product with the input is verified to be the
/// identity through the truncation order.
pub fn rmatrix_inverse<K: Ring>(
    r: &RMatrix<K>,
    eta: &[Vec<K>],
    eta_inv: &[Vec<K>],
) -> Result<RMatrix<K>> {
    let d = r.dim();
    let order = r.order();
    let neg: Vec<Vec<TruncSeries<K>>> = (0..d)
        .map(|i| (0..d).map(|j| r.entries[i][j].compose_neg()).collect())
        .collect();
    let mut entries = Vec::new();
    for i in 0..d {
        let mut row = Vec::new();
        for j in 0..d {
            let mut acc = TruncSeries::zero(order);
            for k in 0..d {
                for l in 0..d {
                    let scalar = eta_inv[i][k].mul(&eta[l][j]);
                    if scalar.is_zero() {
                        continue;
                    }
                    acc = acc.add(&neg[l][k].scale(&scalar));
                }
            }
            row.push(acc);
        }
        entries.push(row);
    }
    let inv = RMatrix { entries };
    let product = r.mul(&inv)?;
    if let Some((order, row, col)) = RMatrix::identity_defect(&product) {
        return Err(Error::SymplecticViolation { order, row, col });
    }
    Ok(inv)
}

// ---------------------------------------------------------------------------
// The rank-two theory attached to the projective line
// ---------------------------------------------------------------------------

/// Frobenius data of the rank-two theory in the basis `{1, H}` with
/// `H^2 = phi` and antidiagonal pairing, over any ring containing `sqrt_phi`.
fn rank_two_frobenius<K: Ring>(sqrt_phi: K) -> FrobeniusAlgebra<K> {
    let s = sqrt_phi.clone();
    let two_s = s.add(&s);
    let two_s_inv = two_s.try_inv().expect("sqrt_phi invertible");
    FrobeniusAlgebra {
        dim: 2,
        eta: vec![vec![K::zero(), K::one()], vec![K::one(), K::zero()]],
        eta_inv: vec![vec![K::zero(), K::one()], vec![K::one(), K::zero()]],
        unit: vec![K::one(), K::zero()],
        // idempotents eps_{+-} = 1/2 +- H/(2 sqrt_phi); inverse norms -+2 sqrt_phi
        delta: vec![two_s.clone(), two_s.neg()],
        delta_inv: vec![two_s_inv.clone(), two_s_inv.neg()],
        basis_in_idem: vec![vec![K::one(), K::one()], vec![s.clone(), s.neg()]],
        tqft_mode: TqftMode::Parity { sqrt_phi },
    }
}

/// The limit Frobenius algebra over Laurent polynomials in `sqrt(phi)`.
pub fn p1_limit_frobenius() -> FrobeniusAlgebra<SqrtPhi> {
    rank_two_frobenius(SqrtPhi::sqrt_phi())
}

/// The equivariant Frobenius algebra over Laurent polynomials in `lambda`
/// and `sqrt(phi)`.
pub fn p1_frobenius() -> FrobeniusAlgebra<LambdaLaurent> {
    rank_two_frobenius(LambdaLaurent::monomial(0, SqrtPhi::sqrt_phi()))
}

/// The two asymptotic series of the superpotential
/// `e^x + q e^{-x} - lambda x` at the plus critical point: the plain
/// expansion and the one with the extra insertion, as series in `z` over
/// Laurent polynomials in `lambda` and `sqrt(phi)`.
pub fn p1_asymptotic_series(order: usize) -> Result<(TruncSeries<LambdaLaurent>, TruncSeries<LambdaLaurent>)> {
    let lambda = LambdaLaurent::lambda_pow(1);
    let delta = LambdaLaurent::monomial(0, SqrtPhi::monomial(1, Rat::from_int(2))); // 2 sqrt(phi)
    let delta_inv = delta.try_inv().unwrap();
    // potential coefficients alternate: lambda at odd k, delta at even k
    let mut pot = Vec::new();
    for k in 3..=(2 * order as u32 + 2) {
        let f = if k % 2 == 1 {
            lambda.clone()
        } else {
            delta.clone()
        };
        pot.push((k, f));
    }
    let e0 = CriticalExpansion::new(delta.clone()).with_potential(pot.clone());
    let g0 = stationary_phase(&e0, order)?;
    // insertion (1 + lambda/delta) e^x - lambda/delta, with the overall
    // sqrt(phi) factor stripped
    let ratio = lambda.mul(&delta_inv);
    let mut ins = vec![(0u32, LambdaLaurent::one())];
    let one_plus = LambdaLaurent::one().add(&ratio);
    for j in 1..=(2 * order as u32) {
        let c = one_plus.scale(&Rat::factorial(u64::from(j)).inv().unwrap());
        ins.push((j, c));
    }
    let e1 = CriticalExpansion::new(delta)
        .with_potential(pot)
        .with_insertion(ins);
    let g1 = stationary_phase(&e1, order)?;
    Ok((g0, g1))
}

/// R-matrix of the equivariant theory in the basis `{1, H}`, assembled from
/// the even and odd parts of the two asymptotic series. Entries are Laurent
/// polynomials in `lambda` and `phi` (integral `phi` powers).
pub fn p1_rmatrix(order: usize) -> Result<RMatrix<LambdaLaurent>> {
    let (g0, g1) = p1_asymptotic_series(order)?;
    let s = LambdaLaurent::monomial(0, SqrtPhi::sqrt_phi());
    let s_inv = s.try_inv().unwrap();
    let entries = vec![
        vec![g1.even_part(), g1.odd_part().scale(&s)],
        vec![g0.odd_part().scale(&s_inv), g0.even_part()],
    ];
    let r = RMatrix { entries };
    for row in &r.entries {
        for e in row {
            for c in e.coeffs() {
                for (_, sp) in c.terms() {
                    if !sp.is_phi_integral() {
                        return Err(Error::HalfPowerResidue);
                    }
                }
            }
        }
    }
    // symplectic condition
    let f = p1_frobenius();
    rmatrix_inverse(&r, &f.eta, &f.eta_inv)?;
    Ok(r)
}

/// Limit R-matrix over Laurent polynomials in `sqrt(phi)`: substitute
/// `z -> -(4/3) z / lambda^2` in the equivariant R-matrix and set
/// `lambda^{-1} = 0`. A surviving positive power of `lambda` is an error.
pub fn limit_rmatrix(order: usize) -> Result<RMatrix<SqrtPhi>> {
    let r = p1_rmatrix(order)?;
    let scale = LambdaLaurent::monomial(-2, SqrtPhi::from_rat(&Rat::frac(-4, 3)));
    let mut entries = Vec::new();
    for row in &r.entries {
        let mut new_row = Vec::new();
        for e in row {
            let scaled = e.compose_scale(&scale);
            let mut coeffs = Vec::new();
            for c in scaled.coeffs() {
                coeffs.push(c.lambda_inv_to_zero().ok_or(Error::LambdaResidue)?);
            }
            new_row.push(TruncSeries::from_coeffs(coeffs));
        }
        entries.push(new_row);
    }
    Ok(RMatrix { entries })
}

/// The same limit matrix assembled directly from the hypergeometric pair:
/// `[[B^e, -sqrt_phi B^o], [-A^o/sqrt_phi, A^e]]` at `z / phi^{3/2}`.
pub fn limit_rmatrix_direct(order: usize) -> RMatrix<SqrtPhi> {
    let (a, b) = crate::pixton::ab_series(order);
    let w = SqrtPhi::monomial(-3, Rat::one());
    let lift = |s: &TruncSeries<Rat>| -> TruncSeries<SqrtPhi> {
        s.map(SqrtPhi::from_rat).compose_scale(&w)
    };
    let s = SqrtPhi::sqrt_phi();
    let s_inv = s.try_inv().unwrap();
    let av = lift(&a);
    let bv = lift(&b);
    RMatrix {
        entries: vec![
            vec![bv.even_part(), bv.odd_part().scale(&s).neg()],
            vec![av.odd_part().scale(&s_inv).neg(), av.even_part()],
        ],
    }
}

/// Inverse of the limit matrix in closed form:
/// `[[A^e, sqrt_phi B^o], [A^o/sqrt_phi, B^e]]` at `z / phi^{3/2}`.
pub fn limit_rmatrix_inverse_direct(order: usize) -> RMatrix<SqrtPhi> {
    let (a, b) = crate::pixton::ab_series(order);
    let w = SqrtPhi::monomial(-3, Rat::one());
    let lift = |s: &TruncSeries<Rat>| -> TruncSeries<SqrtPhi> {
        s.map(SqrtPhi::from_rat).compose_scale(&w)
    };
    let s = SqrtPhi::sqrt_phi();
    let s_inv = s.try_inv().unwrap();
    let av = lift(&a);
    let bv = lift(&b);
    RMatrix {
        entries: vec![
            vec![av.even_part(), bv.odd_part().scale(&s)],
            vec![av.odd_part().scale(&s_inv), bv.even_part()],
        ],
    }
}

// ---------------------------------------------------------------------------
// The R-matrix action as a graph sum
// ---------------------------------------------------------------------------

struct ActionSeries<K: Ring> {
    /// per input basis vector: (psi exponent, output basis, coefficient)
    leg: Vec<Vec<(u32, usize, K)>>,
    /// (psi', psi'', basis', basis'', coefficient)
    edge: Vec<(u32, u32, usize, usize, K)>,
    /// vertex tail options: (weight, extra basis counts, kappa multiset, coefficient)
    tail: Vec<(u32, Vec<u32>, Vec<u32>, K)>,
}

fn action_series<K: Ring>(
    f: &FrobeniusAlgebra<K>,
    r: &RMatrix<K>,
    max_degree: u32,
) -> Result<ActionSeries<K>> {
    let dim = f.dim;
    let order = max_degree as usize;
    // one extra order so the edge division is exact through `order`
    let needed = order + 1;
    if r.order() < needed {
        return Err(Error::OrderMismatch(r.order(), needed));
    }
    let r1 = RMatrix {
        entries: r
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.truncate(needed)).collect())
            .collect(),
    };
    let rinv = rmatrix_inverse(&r1, &f.eta, &f.eta_inv)?;

    // legs: R^{-1}(psi) e_mu has component nu given by entry (nu, mu)
    let mut leg = Vec::new();
    for mu in 0..dim {
        let mut terms = Vec::new();
        for nu in 0..dim {
            let series = &rinv.entries[nu][mu];
            for k in 0..=order {
                let c = series.coeff(k);
                if !c.is_zero() {
                    terms.push((k as u32, nu, c.clone()));
                }
            }
        }
        leg.push(terms);
    }

    // edge bivector: (eta^{-1} - (R^{-1} ⊗ R^{-1}) eta^{-1}) / (psi' + psi'')
    let mut edge = Vec::new();
    for mu in 0..dim {
        for nu in 0..dim {
            let mut num = BiSeries::<K>::zero(order + 1);
            let c = &f.eta_inv[mu][nu];
            if !c.is_zero() {
                num.add_to_coeff(0, 0, c);
            }
            for alpha in 0..dim {
                for beta in 0..dim {
                    let e = &f.eta_inv[alpha][beta];
                    if e.is_zero() {
                        continue;
                    }
                    let prod =
                        BiSeries::outer(&rinv.entries[mu][alpha], &rinv.entries[nu][beta]);
                    for i in 0..=order + 1 {
                        for j in 0..=order + 1 - i {
                            let v = prod.coeff(i, j).mul(e);
                            if !v.is_zero() {
                                num.add_to_coeff(i, j, &v.neg());
                            }
                        }
                    }
                }
            }
            let q = num.divide_psisum()?;
            for i in 0..=order {
                for j in 0..=order - i {
                    let v = q.coeff(i, j);
                    if !v.is_zero() {
                        edge.push((i as u32, j as u32, mu, nu, v.clone()));
                    }
                }
            }
        }
    }

    // tail series T(psi) = psi (Id - R^{-1}(psi)) 1, component nu
    let mut tail_terms: Vec<(u32, usize, K)> = Vec::new();
    for nu in 0..dim {
        let mut series = TruncSeries::<K>::zero(needed);
        for mu in 0..dim {
            if f.unit[mu].is_zero() {
                continue;
            }
            series = series.add(&rinv.entries[nu][mu].scale(&f.unit[mu]));
        }
        // T_nu coefficient at psi^{k+1} is (unit_nu delta_{k,0} - series_k)
        for k in 0..=order {
            let mut c = series.coeff(k).neg();
            if k == 0 {
                c = c.add(&f.unit[nu]);
            }
            let e = k + 1;
            if c.is_zero() {
                continue;
            }
            if e < 2 {
                return Err(Error::TailContract);
            }
            if (e - 1) as u32 <= max_degree {
                tail_terms.push((e as u32, nu, c));
            }
        }
    }

    // tail options per vertex: multisets of tail terms with partitions
    let mut tail: Vec<(u32, Vec<u32>, Vec<u32>, K)> = Vec::new();
    tail.push((0, vec![0; dim], Vec::new(), K::one()));
    // enumerate multisets by nondecreasing index into tail_terms
    fn rec<K: Ring>(
        start: usize,
        budget: u32,
        chosen: &mut Vec<usize>,
        tail_terms: &[(u32, usize, K)],
        dim: usize,
        out: &mut Vec<(u32, Vec<u32>, Vec<u32>, K)>,
    ) {
        if !chosen.is_empty() {
            // base coefficient: prod c_i / prod mult!
            let mut coeff = K::one();
            let mut mult = 1u64;
            let mut run = 1u64;
            for (i, &t) in chosen.iter().enumerate() {
                coeff = coeff.mul(&tail_terms[t].2);
                if i > 0 && chosen[i] == chosen[i - 1] {
                    run += 1;
                    mult *= run;
                } else {
                    run = 1;
                }
            }
            coeff = coeff.scale(&Rat::from_int(mult as i64).inv().unwrap());
            let mut counts = vec![0u32; dim];
            for &t in chosen.iter() {
                counts[tail_terms[t].1] += 1;
            }
            let weight: u32 = chosen.iter().map(|&t| tail_terms[t].0 - 1).sum();
            // partitions of the slots into kappa blocks
            for part in set_partitions(chosen.len()) {
                let mut kappa: Vec<u32> = part
                    .iter()
                    .map(|b| b.iter().map(|&s| tail_terms[chosen[s]].0 - 1).sum())
                    .collect();
                kappa.sort_unstable();
                let mut c = coeff.clone();
                for b in &part {
                    c = c.scale(&Rat::factorial(b.len() as u64 - 1));
                }
                out.push((weight, counts.clone(), kappa, c));
            }
        }
        for t in start..tail_terms.len() {
            let w = tail_terms[t].0 - 1;
            let used: u32 = chosen.iter().map(|&s| tail_terms[s].0 - 1).sum();
            if used + w > budget {
                continue;
            }
            chosen.push(t);
            rec(start.max(t), budget, chosen, tail_terms, dim, out);
            chosen.pop();
        }
    }
    rec(0, max_degree, &mut Vec::new(), &tail_terms, dim, &mut tail);

    Ok(ActionSeries {
        leg,
        edge,
        tail,
    })
}

/// The R-matrix action on the trivial theory, as a strata-algebra class
/// with coefficients in `K`, truncated at total codimension `max_degree`.
/// Insertions are given by basis indices.
pub fn rmatrix_action<K: Ring>(
    f: &FrobeniusAlgebra<K>,
    r: &RMatrix<K>,
    g: u32,
    insertions: &[usize],
    max_degree: u32,
) -> Result<TautClass<K>> {
    let n = insertions.len() as u32;
    let series = action_series(f, r, max_degree)?;
    let mut out = TautClass::zero(g, n);
    for gamma in enumerate_stable_graphs(g, n)? {
        if gamma.graph.num_edges() as u32 > max_degree {
            continue;
        }
        let part = graph_action(&gamma, f, insertions, max_degree, &series)?;
        out = out.add(&part)?;
    }
    Ok(out)
}

fn graph_action<K: Ring>(
    gamma: &Canonical,
    f: &FrobeniusAlgebra<K>,
    insertions: &[usize],
    max_degree: u32,
    series: &ActionSeries<K>,
) -> Result<TautClass<K>> {
    let g = &gamma.graph;
    let nv = g.num_vertices();
    let n = g.num_legs();
    let e_count = g.num_edges();
    let budget = max_degree - e_count as u32;
    let mut out = TautClass::zero(g.total_genus(), n as u32);
    let aut_inv = Rat::from_int(gamma.aut as i64).inv().unwrap();

    let mut psi_leg = vec![0u32; n];
    let mut psi_edge = vec![(0u32, 0u32); e_count];
    let mut kappas: Vec<Vec<u32>> = vec![Vec::new(); nv];
    let mut counts: Vec<Vec<u32>> = vec![vec![0; f.dim]; nv];

    // DFS over legs, then edges, then per-vertex tail options
    #[allow(clippy::too_many_arguments)]
    fn legs_rec<K: Ring>(
        gamma: &Canonical,
        f: &FrobeniusAlgebra<K>,
        insertions: &[usize],
        series: &ActionSeries<K>,
        i: usize,
        budget: u32,
        coeff: K,
        psi_leg: &mut Vec<u32>,
        psi_edge: &mut Vec<(u32, u32)>,
        kappas: &mut Vec<Vec<u32>>,
        counts: &mut Vec<Vec<u32>>,
        aut_inv: &Rat,
        out: &mut TautClass<K>,
    ) {
        let g = &gamma.graph;
        if i == psi_leg.len() {
            edges_rec(
                gamma, f, series, 0, budget, coeff, psi_leg, psi_edge, kappas, counts, aut_inv,
                out,
            );
            return;
        }
        let v = g.legs[i];
        for (k, nu, c) in &series.leg[insertions[i]] {
            if *k > budget {
                continue;
            }
            psi_leg[i] = *k;
            counts[v][*nu] += 1;
            legs_rec(
                gamma,
                f,
                insertions,
                series,
                i + 1,
                budget - k,
                coeff.mul(c),
                psi_leg,
                psi_edge,
                kappas,
                counts,
                aut_inv,
                out,
            );
            counts[v][*nu] -= 1;
            psi_leg[i] = 0;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn edges_rec<K: Ring>(
        gamma: &Canonical,
        f: &FrobeniusAlgebra<K>,
        series: &ActionSeries<K>,
        e: usize,
        budget: u32,
        coeff: K,
        psi_leg: &mut Vec<u32>,
        psi_edge: &mut Vec<(u32, u32)>,
        kappas: &mut Vec<Vec<u32>>,
        counts: &mut Vec<Vec<u32>>,
        aut_inv: &Rat,
        out: &mut TautClass<K>,
    ) {
        let g = &gamma.graph;
        if e == psi_edge.len() {
            verts_rec(
                gamma, f, series, 0, budget, coeff, psi_leg, psi_edge, kappas, counts, aut_inv,
                out,
            );
            return;
        }
        let (va, vb) = g.edges[e];
        for (k1, k2, mu, nu, c) in &series.edge {
            if k1 + k2 > budget {
                continue;
            }
            psi_edge[e] = (*k1, *k2);
            counts[va][*mu] += 1;
            counts[vb][*nu] += 1;
            edges_rec(
                gamma,
                f,
                series,
                e + 1,
                budget - k1 - k2,
                coeff.mul(c),
                psi_leg,
                psi_edge,
                kappas,
                counts,
                aut_inv,
                out,
            );
            counts[vb][*nu] -= 1;
            counts[va][*mu] -= 1;
            psi_edge[e] = (0, 0);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn verts_rec<K: Ring>(
        gamma: &Canonical,
        f: &FrobeniusAlgebra<K>,
        series: &ActionSeries<K>,
        v: usize,
        budget: u32,
        coeff: K,
        psi_leg: &mut Vec<u32>,
        psi_edge: &mut Vec<(u32, u32)>,
        kappas: &mut Vec<Vec<u32>>,
        counts: &mut Vec<Vec<u32>>,
        aut_inv: &Rat,
        out: &mut TautClass<K>,
    ) {
        let g = &gamma.graph;
        let nv = g.num_vertices();
        if v == nv {
            let mut value = coeff.scale(aut_inv);
            for w in 0..nv {
                let t = f.tqft(g.genus[w], &counts[w]);
                if t.is_zero() {
                    return;
                }
                value = value.mul(&t);
            }
            let dec = Decoration {
                psi_leg: psi_leg.clone(),
                psi_edge: psi_edge.clone(),
                kappa: kappas.clone(),
            };
            out.add_term(canonical_form(g, &dec), value);
            return;
        }
        for (w, extra, kappa, c) in &series.tail {
            if *w > budget {
                continue;
            }
            for (b, x) in extra.iter().enumerate() {
                counts[v][b] += x;
            }
            kappas[v] = kappa.clone();
            verts_rec(
                gamma,
                f,
                series,
                v + 1,
                budget - w,
                coeff.mul(c),
                psi_leg,
                psi_edge,
                kappas,
                counts,
                aut_inv,
                out,
            );
            kappas[v] = Vec::new();
            for (b, x) in extra.iter().enumerate() {
                counts[v][b] -= x;
            }
        }
    }

    legs_rec(
        gamma,
        f,
        insertions,
        series,
        0,
        budget,
        K::one(),
        &mut psi_leg,
        &mut psi_edge,
        &mut kappas,
        &mut counts,
        &aut_inv,
        &mut out,
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// The reconstructed limit theory and relation extraction
// ---------------------------------------------------------------------------

/// Reconstructed class of the limit theory with insertions `H^{a_i}`,
/// truncated at `max_degree`. All `phi` powers are integral.
pub fn omega_class(g: u32, avec: &[u32], max_degree: u32) -> Result<TautClass<SqrtPhi>> {
    for &a in avec {
        if a > 1 {
            return Err(Error::BadMarkingWeight(a));
        }
    }
    let f = p1_limit_frobenius();
    let r = limit_rmatrix(max_degree as usize + 1)?;
    let insertions: Vec<usize> = avec.iter().map(|&a| a as usize).collect();
    let omega = rmatrix_action(&f, &r, g, &insertions, max_degree)?;
    for (_, c) in omega.terms() {
        if !c.is_phi_integral() {
            return Err(Error::HalfPowerResidue);
        }
    }
    Ok(omega)
}

/// Exponent bookkeeping: a class of codimension `d` carries `phi^c` with
/// `3d + 2c = g - 1 + sum(a_i)`; poles (`c < 0`) are tautological relations.
pub fn phi_exponent(g: u32, avec: &[u32], d: u32) -> (i64, bool) {
    let e = i64::from(g) - 1 + avec.iter().map(|&a| i64::from(a)).sum::<i64>() - 3 * i64::from(d);
    (e.div_euclid(2), e.rem_euclid(2) == 0)
}

/// The pole coefficient of the reconstructed class in the given degree.
/// Requires `3d > g - 1 + sum(a_i)`; the result equals `2^g` times the
/// corresponding hypergeometric relation, which is checked by the caller in
/// tests rather than assumed here.
pub fn extract_relations(g: u32, avec: &[u32], d: u32) -> Result<TautClass<Rat>> {
    let req = RelationRequest {
        g,
        avec: avec.to_vec(),
        d,
    };
    req.validate()?;
    let (c, integral) = phi_exponent(g, avec, d);
    let omega = omega_class(g, avec, d)?;
    let part = omega.degree_part(d);
    let mut out = TautClass::zero(g, avec.len() as u32);
    if !integral {
        // the parity constraint leaves no component in this degree
        return Ok(out);
    }
    for (s, coeff) in part.terms() {
        let r = coeff.phi_coeff(c as i32);
        if !r.is_zero() {
            out.add_term(s.clone(), r);
        }
    }
    Ok(out)
}

/// Both sides of the pole identification: the extracted pole coefficient
/// and `2^g` times the hypergeometric relation.
pub fn extraction_comparison(g: u32, avec: &[u32], d: u32) -> Result<(TautClass<Rat>, TautClass<Rat>)> {
    let extracted = extract_relations(g, avec, d)?;
    let relation = pixton_relation(&RelationRequest {
        g,
        avec: avec.to_vec(),
        d,
    })?;
    let scaled = relation.scale_rat(&Rat::from_int(2).pow(g as i32));
    Ok((extracted, scaled))
}
