//! Truncated formal power series in one and two variables.
//!
//! A [`TruncSeries`] of order `D` stores coefficients `c_0..c_D`; every
//! operation on inputs of order `D` is correct through order `D`. The
//! bivariate [`BiSeries`] is used for edge terms in the two cotangent
//! variables `psi'`, `psi''`.

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::ring::Ring;

/// Univariate truncated power series over a declared coefficient ring.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncSeries<R: Ring> {
    coeffs: Vec<R>,
}

impl<R: Ring> TruncSeries<R> {
    pub fn from_coeffs(coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty());
        TruncSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![R::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = R::one();
        s
    }

    pub fn constant(c: R, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The variable `z` (zero when `order = 0`).
    pub fn var(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = R::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &R {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: R) {
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(R::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, R::zero());
        TruncSeries { coeffs }
    }

    fn check_order(&self, rhs: &Self) -> Result<()> {
        if self.order() != rhs.order() {
            return Err(Error::OrderMismatch(self.order(), rhs.order()));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_order(rhs).expect("series order mismatch");
        TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(R::neg).collect(),
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let d = self.order();
        let mut coeffs = vec![R::zero(); d + 1];
        for i in 0..=d {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=d - i {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&self.coeffs[i].mul(&rhs.coeffs[j]));
            }
        }
        Ok(TruncSeries { coeffs })
    }

    /// Substitute `z -> c * z`.
    pub fn compose_scale(&self, c: &R) -> Self {
        let mut pow = R::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a.mul(&pow));
            pow = pow.mul(c);
        }
        TruncSeries { coeffs }
    }

    /// Substitute `z -> -z`.
    pub fn compose_neg(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in coeffs.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = c.neg();
            }
        }
        TruncSeries { coeffs }
    }

    pub fn even_part(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in coeffs.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = R::zero();
            }
        }
        TruncSeries { coeffs }
    }

    pub fn odd_part(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in coeffs.iter_mut().enumerate() {
            if k % 2 == 0 {
                *c = R::zero();
            }
        }
        TruncSeries { coeffs }
    }

    /// `exp(f)` for `f` with zero constant term.
    pub fn exp(&self) -> Self {
        assert!(self.coeffs[0].is_zero(), "exp needs vanishing constant term");
        let d = self.order();
        let mut acc = Self::one(d);
        let mut term = Self::one(d);
        let mut kfac = Rat::one();
        for k in 1..=d {
            term = term.mul(self).unwrap();
            kfac *= &Rat::from_int(k as i64);
            let inv = kfac.inv().unwrap();
            acc = acc.add(&term.scale(&R::from_rat(&inv)));
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> TruncSeries<S> {
        TruncSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// Bivariate truncated series in `psi'` (rows) and `psi''` (columns),
/// keeping total degree at most `order`.
#[derive(Clone, PartialEq, Debug)]
pub struct BiSeries<R: Ring> {
    order: usize,
    grid: Vec<R>, // (order+1) x (order+1), row-major; entries above total degree kept zero
}

impl<R: Ring> BiSeries<R> {
    pub fn zero(order: usize) -> Self {
        BiSeries {
            order,
            grid: vec![R::zero(); (order + 1) * (order + 1)],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> &R {
        &self.grid[i * (self.order + 1) + j]
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: R) {
        assert!(i + j <= self.order);
        self.grid[i * (self.order + 1) + j] = c;
    }

    pub fn add_to_coeff(&mut self, i: usize, j: usize, c: &R) {
        assert!(i + j <= self.order);
        let idx = i * (self.order + 1) + j;
        self.grid[idx] = self.grid[idx].add(c);
    }

    pub fn is_zero(&self) -> bool {
        self.grid.iter().all(R::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.order, rhs.order);
        BiSeries {
            order: self.order,
            grid: self
                .grid
                .iter()
                .zip(&rhs.grid)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        BiSeries {
            order: self.order,
            grid: self.grid.iter().map(R::neg).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.order, rhs.order);
        let d = self.order;
        let mut out = BiSeries::zero(d);
        for i1 in 0..=d {
            for j1 in 0..=d - i1 {
                let a = self.coeff(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=d - i1 - j1 {
                    for j2 in 0..=d - i1 - j1 - i2 {
                        let b = rhs.coeff(i2, j2);
                        if b.is_zero() {
                            continue;
                        }
                        out.add_to_coeff(i1 + i2, j1 + j2, &a.mul(b));
                    }
                }
            }
        }
        out
    }

    /// Product of two univariate series, one in `psi'` and one in `psi''`.
    pub fn outer(a: &TruncSeries<R>, b: &TruncSeries<R>) -> Self {
        assert_eq!(a.order(), b.order());
        let d = a.order();
        let mut out = BiSeries::zero(d);
        for i in 0..=d {
            for j in 0..=d - i {
                out.set_coeff(i, j, a.coeff(i).mul(b.coeff(j)));
            }
        }
        out
    }

    /// The restriction `psi'' -> -psi'` as a univariate series in `psi'`.
    pub fn restrict_antidiagonal(&self) -> TruncSeries<R> {
        let d = self.order;
        let mut out = TruncSeries::zero(d);
        for i in 0..=d {
            let mut acc = R::zero();
            for j in 0..=i {
                let c = self.coeff(i - j, j);
                let signed = if j % 2 == 0 { c.clone() } else { c.neg() };
                acc = acc.add(&signed);
            }
            out.set_coeff(i, acc);
        }
        out
    }

    /// Exact division by `psi' + psi''` through total order `order - 1`.
    ///
    /// Fails with the first offending coefficient when the numerator does not
    /// vanish under `psi'' -> -psi'`.
    pub fn divide_psisum(&self) -> Result<BiSeries<R>> {
        let d = self.order;
        let mut q: BiSeries<R> = BiSeries::zero(d);
        // n[i][j] = q[i-1][j] + q[i][j-1]; solve ascending in j for i+j <= d-1.
        for j in 0..d {
            for i in 0..d - j {
                // coefficient of psi'^{i+1} psi''^{j} in the numerator
                let n = self.coeff(i + 1, j);
                let prev = if j == 0 {
                    R::zero()
                } else {
                    q.coeff(i + 1, j - 1).clone()
                };
                q.set_coeff(i, j, n.sub(&prev));
            }
        }
        // Verify q * (psi' + psi'') reproduces the numerator through order d.
        let mut check = BiSeries::zero(d);
        for i in 0..=d {
            for j in 0..=d - i {
                let c = q.coeff(i, j);
                if c.is_zero() {
                    continue;
                }
                if i + 1 + j <= d {
                    check.add_to_coeff(i + 1, j, c);
                }
                if i + j + 1 <= d {
                    check.add_to_coeff(i, j + 1, c);
                }
            }
        }
        for i in 0..=d {
            for j in 0..=d - i {
                if check.coeff(i, j) != self.coeff(i, j) {
                    return Err(Error::NotDivisible { row: i, col: j });
                }
            }
        }
        Ok(q)
    }
}
