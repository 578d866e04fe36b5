//! Coefficient rings.
//!
//! The engine works over a small tower of explicitly declared rings:
//! rationals, Laurent polynomials in a square root `s` of the parameter
//! `phi` (`s^2 = phi`), Laurent polynomials in the equivariant parameter
//! `lambda` over the former, and a parity extension `a + b*zeta` with
//! `zeta^2 = 1`. Mixing rings is a type error, not a runtime condition.

use crate::rational::Rat;
use std::collections::BTreeMap;
use std::fmt;

/// Commutative ring with unit. All values are immutable; operations are pure.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Embedding of the rationals.
    fn from_rat(r: &Rat) -> Self;
    /// Multiplicative inverse where the element happens to be invertible.
    fn try_inv(&self) -> Option<Self> {
        None
    }

    fn scale(&self, r: &Rat) -> Self {
        self.mul(&Self::from_rat(r))
    }
}

impl Ring for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv()
    }
}

/// Laurent polynomial in `s` where `s^2 = phi`; exponents of `s` are
/// half-integer exponents of `phi` doubled. Even exponents are integral
/// powers of `phi`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SqrtPhi {
    coeffs: BTreeMap<i32, Rat>,
}

impl SqrtPhi {
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Rat)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let entry = coeffs.entry(e).or_insert_with(Rat::zero);
            *entry += &c;
            if entry.is_zero() {
                coeffs.remove(&e);
            }
        }
        SqrtPhi { coeffs }
    }

    /// `c * s^e`.
    pub fn monomial(e: i32, c: Rat) -> Self {
        Self::from_terms([(e, c)])
    }

    /// `c * phi^k`.
    pub fn phi_pow(k: i32, c: Rat) -> Self {
        Self::monomial(2 * k, c)
    }

    /// `s = sqrt(phi)`.
    pub fn sqrt_phi() -> Self {
        Self::monomial(1, Rat::one())
    }

    pub fn coeff(&self, e: i32) -> Rat {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// True when only integral powers of `phi` occur.
    pub fn is_phi_integral(&self) -> bool {
        self.coeffs.keys().all(|e| e % 2 == 0)
    }

    /// Coefficient of `phi^k`, requiring the element to be `phi`-integral.
    pub fn phi_coeff(&self, k: i32) -> Rat {
        self.coeff(2 * k)
    }

    /// Substitute `s -> lambda/2`, the specialization where the deformation
    /// parameter vanishes.
    pub fn subst_sqrt_phi_half_lambda(&self) -> LambdaLaurent {
        let mut acc = LambdaLaurent::zero();
        for (e, c) in self.terms() {
            let m = LambdaLaurent::monomial(e, SqrtPhi::from_rat(&(c * &Rat::frac(1, 2).pow(e))));
            acc = acc.add(&m);
        }
        acc
    }
}

impl fmt::Debug for SqrtPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *e == 0 {
                write!(f, "{c}")?;
            } else if e % 2 == 0 {
                write!(f, "({c})*phi^{}", e / 2)?;
            } else {
                write!(f, "({c})*s^{e}")?;
            }
        }
        Ok(())
    }
}

impl Ring for SqrtPhi {
    fn zero() -> Self {
        SqrtPhi::default()
    }
    fn one() -> Self {
        SqrtPhi::monomial(0, Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &rhs.coeffs {
            let entry = coeffs.entry(*e).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(e);
            }
        }
        SqrtPhi { coeffs }
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut coeffs: BTreeMap<i32, Rat> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                let e = e1 + e2;
                let entry = coeffs.entry(e).or_insert_with(Rat::zero);
                *entry += &(c1 * c2);
                if entry.is_zero() {
                    coeffs.remove(&e);
                }
            }
        }
        SqrtPhi { coeffs }
    }
    fn neg(&self) -> Self {
        SqrtPhi {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
    fn from_rat(r: &Rat) -> Self {
        SqrtPhi::monomial(0, r.clone())
    }
    fn try_inv(&self) -> Option<Self> {
        if self.coeffs.len() != 1 {
            return None;
        }
        let (e, c) = self.coeffs.iter().next().unwrap();
        Some(SqrtPhi::monomial(-e, c.inv()?))
    }
}

/// Laurent polynomial in `lambda` with [`SqrtPhi`] coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct LambdaLaurent {
    coeffs: BTreeMap<i32, SqrtPhi>,
}

impl LambdaLaurent {
    pub fn monomial(e: i32, c: SqrtPhi) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        LambdaLaurent { coeffs }
    }

    pub fn lambda_pow(e: i32) -> Self {
        Self::monomial(e, SqrtPhi::one())
    }

    pub fn coeff(&self, e: i32) -> SqrtPhi {
        self.coeffs.get(&e).cloned().unwrap_or_else(SqrtPhi::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &SqrtPhi)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn has_positive_lambda(&self) -> bool {
        self.coeffs.keys().any(|e| *e > 0)
    }

    /// Set `lambda^{-1} = 0`: keep the `lambda^0` part. Errors (None) when a
    /// positive power of `lambda` survives.
    pub fn lambda_inv_to_zero(&self) -> Option<SqrtPhi> {
        if self.has_positive_lambda() {
            return None;
        }
        Some(self.coeff(0))
    }
}

impl fmt::Debug for LambdaLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *e == 0 {
                write!(f, "[{c:?}]")?;
            } else {
                write!(f, "[{c:?}]*lambda^{e}")?;
            }
        }
        Ok(())
    }
}

impl Ring for LambdaLaurent {
    fn zero() -> Self {
        LambdaLaurent::default()
    }
    fn one() -> Self {
        LambdaLaurent::monomial(0, SqrtPhi::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &rhs.coeffs {
            let entry = coeffs.entry(*e).or_insert_with(SqrtPhi::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                coeffs.remove(e);
            }
        }
        LambdaLaurent { coeffs }
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut coeffs: BTreeMap<i32, SqrtPhi> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                let e = e1 + e2;
                let entry = coeffs.entry(e).or_insert_with(SqrtPhi::zero);
                *entry = entry.add(&c1.mul(c2));
                if entry.is_zero() {
                    coeffs.remove(&e);
                }
            }
        }
        LambdaLaurent { coeffs }
    }
    fn neg(&self) -> Self {
        LambdaLaurent {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }
    fn from_rat(r: &Rat) -> Self {
        LambdaLaurent::monomial(0, SqrtPhi::from_rat(r))
    }
    fn try_inv(&self) -> Option<Self> {
        if self.coeffs.len() != 1 {
            return None;
        }
        let (e, c) = self.coeffs.iter().next().unwrap();
        Some(LambdaLaurent::monomial(-e, c.try_inv()?))
    }
}

/// `a + b*zeta` with `zeta^2 = 1`; tracks a Z/2 grading.
#[derive(Clone, PartialEq, Default)]
pub struct Parity<R: Ring> {
    pub even: R,
    pub odd: R,
}

impl<R: Ring> Parity<R> {
    pub fn new(even: R, odd: R) -> Self {
        Parity { even, odd }
    }

    /// Homogeneous element of the given parity (false = even).
    pub fn graded(parity: bool, c: R) -> Self {
        if parity {
            Parity::new(R::zero(), c)
        } else {
            Parity::new(c, R::zero())
        }
    }

    /// `zeta`.
    pub fn zeta() -> Self {
        Parity::new(R::zero(), R::one())
    }

    /// Coefficient of `zeta^k`, depending on `k` only mod 2.
    pub fn component(&self, k: u32) -> &R {
        if k % 2 == 0 {
            &self.even
        } else {
            &self.odd
        }
    }
}

impl<R: Ring> fmt::Debug for Parity<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})*zeta", self.even, self.odd)
    }
}

impl<R: Ring> Ring for Parity<R> {
    fn zero() -> Self {
        Parity::new(R::zero(), R::zero())
    }
    fn one() -> Self {
        Parity::new(R::one(), R::zero())
    }
    fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Parity::new(self.even.add(&rhs.even), self.odd.add(&rhs.odd))
    }
    fn sub(&self, rhs: &Self) -> Self {
        Parity::new(self.even.sub(&rhs.even), self.odd.sub(&rhs.odd))
    }
    fn mul(&self, rhs: &Self) -> Self {
        // (a + b z)(c + d z) = (ac + bd) + (ad + bc) z, using z^2 = 1.
        Parity::new(
            self.even.mul(&rhs.even).add(&self.odd.mul(&rhs.odd)),
            self.even.mul(&rhs.odd).add(&self.odd.mul(&rhs.even)),
        )
    }
    fn neg(&self) -> Self {
        Parity::new(self.even.neg(), self.odd.neg())
    }
    fn from_rat(r: &Rat) -> Self {
        Parity::new(R::from_rat(r), R::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_squares_to_one() {
        let z: Parity<Rat> = Parity::zeta();
        assert_eq!(z.mul(&z), Parity::one());
    }

    #[test]
    fn parity_square_odd_part_is_2ab() {
        // (a + b z)^2 = (a^2 + b^2) + 2ab z
        let p = Parity::new(Rat::frac(3, 5), Rat::frac(-2, 7));
        let sq = p.mul(&p);
        let two_ab = Rat::from_int(2) * (Rat::frac(3, 5) * Rat::frac(-2, 7));
        assert_eq!(sq.odd, two_ab);
        assert_eq!(
            sq.even,
            Rat::frac(3, 5).pow(2) + Rat::frac(-2, 7).pow(2)
        );
    }

    #[test]
    fn sqrt_phi_square_is_phi() {
        let s = SqrtPhi::sqrt_phi();
        assert_eq!(s.mul(&s), SqrtPhi::phi_pow(1, Rat::one()));
        assert!(s.mul(&s).is_phi_integral());
        assert!(!s.is_phi_integral());
    }

    #[test]
    fn monomial_inverse() {
        let x = SqrtPhi::monomial(3, Rat::frac(2, 5));
        let inv = x.try_inv().unwrap();
        assert_eq!(x.mul(&inv), SqrtPhi::one());
        let y = x.add(&SqrtPhi::one());
        assert!(y.try_inv().is_none());
    }

    #[test]
    fn lambda_specialization() {
        // lambda^2 * phi^{-1} at s = lambda/2 becomes 4 * phi^0 ... in lambda terms:
        // substitute into s^2 -> lambda^2/4.
        let x = SqrtPhi::phi_pow(1, Rat::one());
        let l = x.subst_sqrt_phi_half_lambda();
        assert_eq!(l.coeff(2), SqrtPhi::from_rat(&Rat::frac(1, 4)));
    }
}
