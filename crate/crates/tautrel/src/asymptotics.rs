//! One-dimensional stationary-phase expansion of oscillating integrals.
//!
//! Near a nondegenerate critical point the integrand is
//! `exp((u + D x^2/2 + f_3 x^3/6 + f_4 x^4/24 + ...)/z) * I(x)`.
//! After shifting to the critical point and rescaling
//! `x -> x * D^{-1/2} * sqrt(-z)`, the Gaussian moments produce a formal
//! power series in `z`; the engine returns that series with the prefactor
//! `exp(u/z)/sqrt(D)` stripped.
//!
//! Half powers of `(-z)` and of `D` are tracked as signed exponents and must
//! cancel by parity; a residual half power is reported as an error rather
//! than dropped.

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::ring::Ring;
use crate::series::TruncSeries;
use std::collections::BTreeMap;

/// Normalized Gaussian moment: `(i-1)!!` for even `i`, `0` for odd `i`.
pub fn gaussian_moment(i: u64) -> Rat {
    if i % 2 == 1 {
        Rat::zero()
    } else {
        Rat::double_factorial(i as i64 - 1)
    }
}

/// Bernoulli number `B_n` (convention `B_1 = -1/2`), via the defining
/// recurrence `sum_{j<=m} C(m+1, j) B_j = 0`.
pub fn bernoulli(n: u32) -> Rat {
    let mut b: Vec<Rat> = Vec::with_capacity(n as usize + 1);
    for m in 0..=n as usize {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
        let mut acc = Rat::zero();
        let mut binom = Rat::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            acc += &(&binom * bj);
            // C(m+1, j+1) = C(m+1, j) * (m+1-j)/(j+1)
            binom *= &Rat::frac((m + 1 - j) as i64, (j + 1) as i64);
        }
        let coeff = Rat::frac(-1, (m + 1) as i64);
        b.push(acc * coeff);
    }
    b.pop().unwrap()
}

/// Data of one nondegenerate critical point.
///
/// `potential` holds the higher coefficients `f_k` of `x^k/k!` for `k >= 3`;
/// `insertion` holds plain coefficients `c_j` of `x^j` in the unscaled
/// variable, with the empty list meaning `I = 1`.
#[derive(Clone, Debug)]
pub struct CriticalExpansion<R: Ring> {
    pub delta: R,
    pub potential: Vec<(u32, R)>,
    pub insertion: Vec<(u32, R)>,
}

impl<R: Ring> CriticalExpansion<R> {
    pub fn new(delta: R) -> Self {
        CriticalExpansion {
            delta,
            potential: Vec::new(),
            insertion: Vec::new(),
        }
    }

    pub fn with_potential(mut self, terms: impl IntoIterator<Item = (u32, R)>) -> Self {
        for (k, f) in terms {
            assert!(k >= 3, "potential coefficients start at x^3");
            self.potential.push((k, f));
        }
        self
    }

    pub fn with_insertion(mut self, terms: impl IntoIterator<Item = (u32, R)>) -> Self {
        self.insertion.extend(terms);
        self
    }
}

// Key: (power of x, power of nu = sqrt(-z)). The power of D^{-1/2} always
// equals the power of x and is reconstructed at the end.
type Poly<R> = BTreeMap<(u64, u64), R>;

fn poly_mul_term<R: Ring>(p: &Poly<R>, x: u64, nu: u64, c: &R, max_nu: u64) -> Poly<R> {
    let mut out = Poly::new();
    for ((px, pn), pc) in p {
        let n = pn + nu;
        if n > max_nu {
            continue;
        }
        let v = pc.mul(c);
        if v.is_zero() {
            continue;
        }
        let key = (px + x, n);
        let entry = out.entry(key).or_insert_with(R::zero);
        *entry = entry.add(&v);
    }
    out
}

fn poly_add_assign<R: Ring>(p: &mut Poly<R>, q: Poly<R>) {
    for (k, v) in q {
        let entry = p.entry(k).or_insert_with(R::zero);
        *entry = entry.add(&v);
        if entry.is_zero() {
            p.remove(&k);
        }
    }
}

/// Stationary-phase expansion through `z^order`, with the prefactor
/// `exp(u/z)/sqrt(D)` stripped; the constant term is `I(0)`.
pub fn stationary_phase<R: Ring>(e: &CriticalExpansion<R>, order: usize) -> Result<TruncSeries<R>> {
    let delta_inv = e.delta.try_inv().ok_or(Error::NotInvertible)?;
    let max_nu = 2 * order as u64;

    // Exponent polynomial: sum_k (-f_k / k!) x^k nu^{k-2}.
    let mut exponent = Poly::<R>::new();
    for (k, f) in &e.potential {
        let k = *k as u64;
        if k < 3 || k.saturating_sub(2) > max_nu || f.is_zero() {
            continue;
        }
        let c = f.neg().scale(&Rat::factorial(k).inv().unwrap());
        let entry = exponent.entry((k, k - 2)).or_insert_with(R::zero);
        *entry = entry.add(&c);
    }

    // exp(exponent): every term has nu-power >= 1, so the sum is finite.
    let mut expansion = Poly::<R>::new();
    expansion.insert((0, 0), R::one());
    let mut power = Poly::<R>::new();
    power.insert((0, 0), R::one());
    let mut mfac = Rat::one();
    for m in 1..=max_nu {
        let mut next = Poly::<R>::new();
        for ((x, nu), c) in &exponent {
            poly_add_assign(&mut next, poly_mul_term(&power, *x, *nu, c, max_nu));
        }
        power = next;
        if power.is_empty() {
            break;
        }
        mfac *= &Rat::from_int(m as i64);
        let inv = R::from_rat(&mfac.inv().unwrap());
        let mut scaled = Poly::<R>::new();
        for (k, v) in &power {
            scaled.insert(*k, v.mul(&inv));
        }
        poly_add_assign(&mut expansion, scaled);
    }

    // Insertion I(x): x^j picks up nu^j from the rescaling.
    let integrand = if e.insertion.is_empty() {
        expansion
    } else {
        let mut out = Poly::<R>::new();
        for (j, c) in &e.insertion {
            let j = *j as u64;
            if j > max_nu || c.is_zero() {
                continue;
            }
            poly_add_assign(&mut out, poly_mul_term(&expansion, j, j, c, max_nu));
        }
        out
    };

    // Integrate against the Gaussian and collect powers of z.
    let mut series: TruncSeries<R> = TruncSeries::zero(order);
    let mut delta_inv_pows = vec![R::one()];
    for ((x, nu), c) in &integrand {
        let moment = gaussian_moment(*x);
        if moment.is_zero() {
            continue;
        }
        if nu % 2 == 1 || x % 2 == 1 {
            return Err(Error::HalfPowerResidue);
        }
        let zpow = (nu / 2) as usize;
        if zpow > order {
            continue;
        }
        let half_x = (x / 2) as usize;
        while delta_inv_pows.len() <= half_x {
            let last = delta_inv_pows.last().unwrap().mul(&delta_inv);
            delta_inv_pows.push(last);
        }
        // nu^{2m} = (-z)^m
        let sign = if zpow % 2 == 0 { moment.clone() } else { -&moment };
        let term = c.mul(&delta_inv_pows[half_x]).scale(&sign);
        let updated = series.coeff(zpow).add(&term);
        series.set_coeff(zpow, updated);
    }
    Ok(series)
}

/// Stationary-phase factor of the logarithmic potential `x - a ln(x)` about
/// its critical point `x = a`, as a series in `z`.
///
/// Equals `exp(sum_{l>=1} B_{2l}/(2l(2l-1)) (-z/a)^{2l-1})`, the Stirling
/// correction of the gamma function.
pub fn stirling_factor<R: Ring>(a: &R, order: usize) -> Result<TruncSeries<R>> {
    let a_inv = a.try_inv().ok_or(Error::NotInvertible)?;
    // x - a ln(a + x) expands to x^2/(2a) - x^3/(3a^2) + ... :
    // f_k = (-1)^k (k-1)! a^{1-k} for k >= 2, and Delta = f_2 = 1/a.
    let mut pot = Vec::new();
    let mut apow = a_inv.mul(&a_inv); // a^{-2}
    for k in 3..=(2 * order as u32 + 2) {
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        let c = Rat::factorial(k as u64 - 1) * sign;
        pot.push((k, apow.scale(&c)));
        apow = apow.mul(&a_inv);
    }
    let e = CriticalExpansion::new(a_inv.clone()).with_potential(pot);
    stationary_phase(&e, order)
}

/// The Bernoulli exponential `exp(sum_l B_{2l}/(2l(2l-1)) (t z)^{2l-1})`
/// through `z^order`, with `t` a ring element.
pub fn bernoulli_exponential<R: Ring>(t: &R, order: usize) -> TruncSeries<R> {
    let mut f = TruncSeries::<R>::zero(order);
    let mut l = 1u32;
    while (2 * l - 1) as usize <= order {
        let c = bernoulli(2 * l) * Rat::frac(1, (2 * l * (2 * l - 1)) as i64);
        f.set_coeff((2 * l - 1) as usize, R::from_rat(&c));
        l += 1;
    }
    // substitute z -> t z
    f.compose_scale(t).exp()
}
