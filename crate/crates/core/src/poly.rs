//! Polynomials in `x_0..x_n` with `Cl_n`-valued coefficients, and the
//! first-order operators built from them: the Euclidean Dirac pair
//! `D_0`/`conj(D_0)`, the Euler operator, the angular operators
//! `Gamma_0`/`conj(Gamma_0)` and the ambient Laplacian.

use crate::clifford::{Multivector, MvJson};
use crate::error::{CoreError, Result};
use crate::scalar::{Coeff, Q};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent tuple `(alpha_0, ..., alpha_n)`.
pub type Expo = Vec<u8>;

/// Differential operators acting on [`CliffordPolynomial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffOp {
    /// `D_0 = e_0 d/dx_0 + sum_i e_i d/dx_i`
    D0,
    /// Bar of `D_0`: `d/dx_0 - sum_i e_i d/dx_i`
    D0Bar,
    /// Euler operator `sum_j x_j d/dx_j`
    Er,
    /// Angular operator `sum_j e_0 e_j (x_0 d_j - x_j d_0) - sum_{i<j} e_i e_j (x_i d_j - x_j d_i)`
    Gamma0,
    /// Bar of `Gamma0`: the `e_0 e_j` terms flip sign, the `e_i e_j` terms do not
    Gamma0Bar,
    /// Laplacian in the `n+1` ambient variables
    Laplacian,
}

/// Left multiplication by the sphere variable or its bar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParavectorFactor {
    W,
    WBar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordPolynomial<T: Coeff> {
    n: usize,
    terms: BTreeMap<Expo, Multivector<T>>,
}

impl<T: Coeff> CliffordPolynomial<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(mv: Multivector<T>) -> Self {
        let n = mv.n();
        let mut p = Self::zero(n);
        p.add_term(vec![0; n + 1], mv);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(Multivector::one(n))
    }

    /// The scalar monomial `x_j`.
    pub fn variable(n: usize, j: usize) -> Self {
        assert!(j <= n);
        let mut expo = vec![0u8; n + 1];
        expo[j] = 1;
        let mut p = Self::zero(n);
        p.add_term(expo, Multivector::one(n));
        p
    }

    /// The paravector variable `x = x_0 + x_1 e_1 + ... + x_n e_n`.
    pub fn paravector_variable(n: usize) -> Self {
        let mut p = Self::zero(n);
        for j in 0..=n {
            let mut expo = vec![0u8; n + 1];
            expo[j] = 1;
            let coeff = if j == 0 {
                Multivector::one(n)
            } else {
                Multivector::basis_vector(n, j)
            };
            p.add_term(expo, coeff);
        }
        p
    }

    /// `r^2 = x_0^2 + ... + x_n^2`.
    pub fn radius_sq(n: usize) -> Self {
        let mut p = Self::zero(n);
        for j in 0..=n {
            let mut expo = vec![0u8; n + 1];
            expo[j] = 2;
            p.add_term(expo, Multivector::one(n));
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Multivector<T>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, expo: &Expo) -> Multivector<T> {
        self.terms
            .get(expo)
            .cloned()
            .unwrap_or_else(|| Multivector::zero(self.n))
    }

    pub fn add_term(&mut self, expo: Expo, mv: Multivector<T>) {
        debug_assert_eq!(expo.len(), self.n + 1);
        if mv.is_zero() {
            return;
        }
        match self.terms.get_mut(&expo) {
            Some(cur) => {
                let sum = &*cur + &mv;
                if sum.is_zero() {
                    self.terms.remove(&expo);
                } else {
                    *cur = sum;
                }
            }
            None => {
                self.terms.insert(expo, mv);
            }
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&a| a as usize).sum())
            .max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self
            .terms
            .keys()
            .map(|e| e.iter().map(|&a| a as usize).sum::<usize>());
        match degs.next() {
            None => true,
            Some(first) => degs.all(|d| d == first),
        }
    }

    /// Split into homogeneous parts, keyed by degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<usize, Self> {
        let mut out: BTreeMap<usize, Self> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d: usize = e.iter().map(|&a| a as usize).sum();
            out.entry(d)
                .or_insert_with(|| Self::zero(self.n))
                .add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn try_multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let expo: Expo = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(expo, ca.product(cb));
            }
        }
        Ok(out)
    }

    /// Clifford-bilinear product; coefficients multiply left-to-right.
    pub fn multiply(&self, other: &Self) -> Self {
        self.try_multiply(other).expect("dimension mismatch")
    }

    pub fn scale(&self, factor: &T) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.scale(factor));
        }
        out
    }

    /// Left multiplication by a constant multivector.
    pub fn mul_const_left(&self, mv: &Multivector<T>) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), mv.product(c));
        }
        out
    }

    /// Right multiplication by a constant multivector.
    pub fn mul_const_right(&self, mv: &Multivector<T>) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.product(mv));
        }
        out
    }

    pub fn derivative(&self, j: usize) -> Self {
        assert!(j <= self.n);
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut expo = e.clone();
            expo[j] -= 1;
            out.add_term(expo, c.scale(&T::from_int(e[j] as i64)));
        }
        out
    }

    /// `x_j * p` (scalar variable multiplication).
    pub fn mul_variable(&self, j: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut expo = e.clone();
            expo[j] += 1;
            out.add_term(expo, c.clone());
        }
        out
    }

    /// Apply one of the named differential operators.
    pub fn apply_diff_op(&self, op: DiffOp) -> Self {
        let n = self.n;
        match op {
            DiffOp::D0 => {
                let mut out = Self::zero(n);
                for j in 0..=n {
                    let d = self.derivative(j);
                    let coeff = if j == 0 {
                        Multivector::one(n)
                    } else {
                        Multivector::basis_vector(n, j)
                    };
                    out = &out + &d.mul_const_left(&coeff);
                }
                out
            }
            DiffOp::D0Bar => {
                let mut out = self.derivative(0);
                for j in 1..=n {
                    let e = Multivector::basis_vector(n, j);
                    out = &out - &self.derivative(j).mul_const_left(&e);
                }
                out
            }
            DiffOp::Er => {
                let mut out = Self::zero(n);
                for j in 0..=n {
                    out = &out + &self.derivative(j).mul_variable(j);
                }
                out
            }
            DiffOp::Gamma0 => self.gamma(false),
            DiffOp::Gamma0Bar => self.gamma(true),
            DiffOp::Laplacian => {
                let mut out = Self::zero(n);
                for j in 0..=n {
                    out = &out + &self.derivative(j).derivative(j);
                }
                out
            }
        }
    }

    fn gamma(&self, bar: bool) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        // e_0 e_j terms: L_{0j} = x_0 d_j - x_j d_0, with sign -1 in the bar version
        for j in 1..=n {
            let l = &self.derivative(j).mul_variable(0) - &self.derivative(0).mul_variable(j);
            let e = Multivector::basis_vector(n, j);
            let term = l.mul_const_left(&e);
            out = if bar { &out - &term } else { &out + &term };
        }
        // e_i e_j terms: always with sign -1
        for i in 1..=n {
            for j in (i + 1)..=n {
                let l = &self.derivative(j).mul_variable(i) - &self.derivative(i).mul_variable(j);
                let eij = Multivector::basis_vector(n, i).product(&Multivector::basis_vector(n, j));
                out = &out - &l.mul_const_left(&eij);
            }
        }
        out
    }

    /// Left-multiply by the paravector variable `x` or its bar.
    pub fn mult_paravector(&self, which: ParavectorFactor) -> Self {
        let x = Self::paravector_variable(self.n);
        let factor = match which {
            ParavectorFactor::W => x,
            ParavectorFactor::WBar => x.bar_coeffwise(),
        };
        factor.multiply(self)
    }

    /// Apply the bar involution to every coefficient and keep exponents.
    ///
    /// For the paravector variable this realizes `x -> bar(x)`.
    pub fn bar_coeffwise(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.bar());
        }
        out
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&Multivector<T>) -> Multivector<U>) -> CliffordPolynomial<U> {
        let mut out = CliffordPolynomial::<U>::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn to_f64(&self) -> CliffordPolynomial<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Max absolute coefficient entry, for residual reporting.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|mv| mv.terms().map(|(_, c)| c.to_f64().abs()))
            .fold(0.0, f64::max)
    }
}

impl CliffordPolynomial<f64> {
    /// Evaluate at a point of `R^{n+1}` given as a paravector.
    pub fn evaluate(&self, point: &Multivector<f64>) -> Multivector<f64> {
        let mut coords = vec![0.0; self.n + 1];
        coords[0] = point.scalar_part();
        for j in 1..=self.n {
            coords[j] = point.coeff(1 << (j - 1));
        }
        let mut out = Multivector::zero(self.n);
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for j in 0..=self.n {
                m *= coords[j].powi(e[j] as i32);
            }
            out = &out + &c.scale(&m);
        }
        out
    }
}

impl<'a, T: Coeff> Add for &'a CliffordPolynomial<T> {
    type Output = CliffordPolynomial<T>;
    fn add(self, rhs: Self) -> CliffordPolynomial<T> {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a, T: Coeff> Sub for &'a CliffordPolynomial<T> {
    type Output = CliffordPolynomial<T>;
    fn sub(self, rhs: Self) -> CliffordPolynomial<T> {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a, T: Coeff> Mul for &'a CliffordPolynomial<T> {
    type Output = CliffordPolynomial<T>;
    fn mul(self, rhs: Self) -> CliffordPolynomial<T> {
        self.multiply(rhs)
    }
}

impl<T: Coeff> Neg for &CliffordPolynomial<T> {
    type Output = CliffordPolynomial<T>;
    fn neg(self) -> CliffordPolynomial<T> {
        self.map_coeffs(|c| -c)
    }
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub alpha: Vec<u8>,
    pub coeff: MvJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub terms: Vec<PolyTermJson>,
}

impl CliffordPolynomial<Q> {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| PolyTermJson {
                    alpha: e.clone(),
                    coeff: c.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolyJson) -> Result<Self> {
        let mut p = Self::zero(json.n);
        for t in &json.terms {
            if t.alpha.len() != json.n + 1 {
                return Err(CoreError::Domain("alpha length mismatch".into()));
            }
            p.add_term(t.alpha.clone(), Multivector::<Q>::from_json(&t.coeff)?);
        }
        Ok(p)
    }
}
