//! The Clifford algebra `Cl_n` over the relation `e_i^2 = -1`.
//!
//! Blades are bitmasks over the generators `e_1..e_n`; the empty blade is the
//! identity `e_0`.  Coefficients live in any [`Coeff`] ring, so the same code
//! serves exact-rational identity checking and float matrix assembly.

use crate::error::{CoreError, Result};
use crate::scalar::{Coeff, Q};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Blade index: bit `i-1` set means the generator `e_i` is present.
pub type Blade = u16;

/// The three involutions of `Cl_n`.
///
/// Grade-`k` signs: reversion `(-1)^{k(k-1)/2}`, conjugation
/// `(-1)^{k(k+1)/2}`, bar `(-1)^k`.  Reversion and conjugation are
/// anti-automorphisms; bar (their composition) is an automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Involution {
    Reversion,
    Conjugation,
    Bar,
}

impl Involution {
    pub fn sign(self, grade: u32) -> i64 {
        let k = grade as u64;
        let exp = match self {
            Involution::Reversion => k * (k.saturating_sub(1)) / 2,
            Involution::Conjugation => k * (k + 1) / 2,
            Involution::Bar => k,
        };
        if exp % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Multiply two basis blades; returns `(sign, blade)` with `e_i^2 = -1`.
pub fn blade_product(a: Blade, b: Blade) -> (i64, Blade) {
    let mut sign = 1i64;
    let mut acc = a;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        // transpositions moving e_j past the generators of `acc` above j
        let higher = (acc >> (j + 1)).count_ones();
        if higher % 2 == 1 {
            sign = -sign;
        }
        let bit = 1u16 << j;
        if acc & bit != 0 {
            sign = -sign; // e_j^2 = -1
            acc &= !bit;
        } else {
            acc |= bit;
        }
    }
    (sign, acc)
}

/// Element of `Cl_n`: sparse map from canonical blade to coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector<T: Coeff> {
    n: usize,
    terms: BTreeMap<Blade, T>,
}

impl<T: Coeff> Multivector<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 12, "generator count {n} too large for 2^n storage");
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, value: T) -> Self {
        let mut mv = Self::zero(n);
        mv.set(0, value);
        mv
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    /// The generator `e_i`, 1-based.
    pub fn basis_vector(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "generator e_{i} out of range for Cl_{n}");
        let mut mv = Self::zero(n);
        mv.set(1 << (i - 1), T::one());
        mv
    }

    /// Paravector `c_0 + c_1 e_1 + ... + c_n e_n` from components.
    pub fn paravector(n: usize, components: &[T]) -> Self {
        assert_eq!(components.len(), n + 1);
        let mut mv = Self::zero(n);
        mv.set(0, components[0].clone());
        for i in 1..=n {
            mv.set(1 << (i - 1), components[i].clone());
        }
        mv
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Blade, T)>) -> Self {
        let mut mv = Self::zero(n);
        for (b, c) in terms {
            mv.add_term(b, c);
        }
        mv
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, blade: Blade) -> T {
        self.terms.get(&blade).cloned().unwrap_or_else(T::zero)
    }

    pub fn scalar_part(&self) -> T {
        self.coeff(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &T)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    fn set(&mut self, blade: Blade, value: T) {
        if value.is_zero() {
            self.terms.remove(&blade);
        } else {
            self.terms.insert(blade, value);
        }
    }

    pub fn add_term(&mut self, blade: Blade, value: T) {
        debug_assert!(blade < (1 << self.n));
        let cur = self.coeff(blade);
        self.set(blade, cur + value);
    }

    pub fn try_product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = Self::zero(self.n);
        for (&ba, ca) in &self.terms {
            for (&bb, cb) in &other.terms {
                let (sign, blade) = blade_product(ba, bb);
                let mut c = ca.clone() * cb.clone();
                if sign < 0 {
                    c = -c;
                }
                out.add_term(blade, c);
            }
        }
        Ok(out)
    }

    /// Geometric product; panics on generator-count mismatch.
    pub fn product(&self, other: &Self) -> Self {
        self.try_product(other).expect("generator count mismatch")
    }

    pub fn scale(&self, factor: &T) -> Self {
        let mut out = Self::zero(self.n);
        for (&b, c) in &self.terms {
            out.set(b, c.clone() * factor.clone());
        }
        out
    }

    pub fn involution(&self, kind: Involution) -> Self {
        let mut out = Self::zero(self.n);
        for (&b, c) in &self.terms {
            let sign = kind.sign(b.count_ones());
            let c = if sign < 0 { -c.clone() } else { c.clone() };
            out.set(b, c);
        }
        out
    }

    pub fn reversion(&self) -> Self {
        self.involution(Involution::Reversion)
    }

    pub fn conjugation(&self) -> Self {
        self.involution(Involution::Conjugation)
    }

    pub fn bar(&self) -> Self {
        self.involution(Involution::Bar)
    }

    /// Keep blades of grade `k` only.
    pub fn try_grade_project(&self, k: usize) -> Result<Self> {
        if k > self.n {
            return Err(CoreError::Domain(format!(
                "grade {k} out of range for Cl_{}",
                self.n
            )));
        }
        let mut out = Self::zero(self.n);
        for (&b, c) in &self.terms {
            if b.count_ones() as usize == k {
                out.set(b, c.clone());
            }
        }
        Ok(out)
    }

    pub fn grade_project(&self, k: usize) -> Self {
        self.try_grade_project(k).expect("grade out of range")
    }

    /// Largest grade with a nonzero coefficient, `None` when zero.
    pub fn max_grade(&self) -> Option<usize> {
        self.terms.keys().map(|b| b.count_ones() as usize).max()
    }

    /// True when supported on grades 0 and 1 only.
    pub fn is_paravector(&self) -> bool {
        self.terms.keys().all(|b| b.count_ones() <= 1)
    }

    pub fn norm_sq(&self) -> T {
        let mut acc = T::zero();
        for c in self.terms.values() {
            acc = acc + c.clone() * c.clone();
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Multivector<U> {
        let mut out = Multivector::<U>::zero(self.n);
        for (&b, c) in &self.terms {
            out.set(b, f(c));
        }
        out
    }

    pub fn to_f64(&self) -> Multivector<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

impl Multivector<Q> {
    pub fn from_q_terms(n: usize, terms: &[(&[usize], Q)]) -> Self {
        let mut mv = Self::zero(n);
        for (gens, c) in terms {
            let mut blade: Blade = 0;
            for &g in gens.iter() {
                assert!(g >= 1 && g <= n);
                blade |= 1 << (g - 1);
            }
            mv.add_term(blade, c.clone());
        }
        mv
    }
}

impl<'a, T: Coeff> Add for &'a Multivector<T> {
    type Output = Multivector<T>;
    fn add(self, rhs: Self) -> Multivector<T> {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (&b, c) in &rhs.terms {
            out.add_term(b, c.clone());
        }
        out
    }
}

impl<'a, T: Coeff> Sub for &'a Multivector<T> {
    type Output = Multivector<T>;
    fn sub(self, rhs: Self) -> Multivector<T> {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (&b, c) in &rhs.terms {
            out.add_term(b, -c.clone());
        }
        out
    }
}

impl<'a, T: Coeff> Mul for &'a Multivector<T> {
    type Output = Multivector<T>;
    fn mul(self, rhs: Self) -> Multivector<T> {
        self.product(rhs)
    }
}

impl<T: Coeff> Neg for &Multivector<T> {
    type Output = Multivector<T>;
    fn neg(self) -> Multivector<T> {
        self.map_coeffs(|c| -c.clone())
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"n": int, "terms": [{"blade": [int...], "coeff": number|"p/q"}]}
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Number(f64),
    Ratio(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MvTermJson {
    pub blade: Vec<usize>,
    pub coeff: CoeffJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MvJson {
    pub n: usize,
    pub terms: Vec<MvTermJson>,
}

fn blade_to_gens(b: Blade) -> Vec<usize> {
    (0..16).filter(|i| b & (1 << i) != 0).map(|i| i + 1).collect()
}

fn gens_to_blade(gens: &[usize], n: usize) -> Result<Blade> {
    let mut blade: Blade = 0;
    for &g in gens {
        if g < 1 || g > n {
            return Err(CoreError::Domain(format!("generator e_{g} out of range")));
        }
        blade |= 1 << (g - 1);
    }
    Ok(blade)
}

impl Multivector<Q> {
    pub fn to_json(&self) -> MvJson {
        MvJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(&b, c)| MvTermJson {
                    blade: blade_to_gens(b),
                    coeff: CoeffJson::Ratio(format!("{}/{}", c.numer(), c.denom())),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &MvJson) -> Result<Self> {
        let mut mv = Self::zero(json.n);
        for t in &json.terms {
            let blade = gens_to_blade(&t.blade, json.n)?;
            let c = match &t.coeff {
                CoeffJson::Ratio(s) => parse_ratio(s)?,
                CoeffJson::Number(x) => {
                    if x.fract() != 0.0 {
                        return Err(CoreError::Domain(format!(
                            "non-integer float {x} in rational multivector"
                        )));
                    }
                    crate::scalar::qi(*x as i64)
                }
            };
            mv.add_term(blade, c);
        }
        Ok(mv)
    }
}

impl Multivector<f64> {
    pub fn to_json(&self) -> MvJson {
        MvJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(&b, c)| MvTermJson {
                    blade: blade_to_gens(b),
                    coeff: CoeffJson::Number(*c),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &MvJson) -> Result<Self> {
        let mut mv = Self::zero(json.n);
        for t in &json.terms {
            let blade = gens_to_blade(&t.blade, json.n)?;
            let c = match &t.coeff {
                CoeffJson::Number(x) => *x,
                CoeffJson::Ratio(s) => parse_ratio(s)?.to_f64(),
            };
            mv.add_term(blade, c);
        }
        Ok(mv)
    }
}

fn parse_ratio(s: &str) -> Result<Q> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<num::BigInt>()
            .map_err(|e| CoreError::Domain(format!("bad rational '{s}': {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => Ok(Q::new(parse_int(p)?, parse_int(q)?)),
        None => Ok(Q::from_integer(parse_int(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn e(n: usize, i: usize) -> Multivector<Q> {
        Multivector::basis_vector(n, i)
    }

    #[test]
    fn generator_squares_to_minus_one() {
        let e1 = e(2, 1);
        let sq = &e1 * &e1;
        assert_eq!(sq, Multivector::scalar(2, qi(-1)));
    }

    #[test]
    fn generators_anticommute() {
        let e1 = e(3, 1);
        let e2 = e(3, 2);
        let ab = &e1 * &e2;
        let ba = &e2 * &e1;
        assert_eq!(ab, -&ba);
    }

    #[test]
    fn associativity_example() {
        // (e1 e2) e2 = -e1
        let e1 = e(2, 1);
        let e2 = e(2, 2);
        let lhs = &(&e1 * &e2) * &e2;
        assert_eq!(lhs, -&e1);
    }

    #[test]
    fn one_vector_squares_to_minus_norm() {
        let v = Multivector::from_q_terms(3, &[(&[1], qi(2)), (&[2], qi(-3)), (&[3], qi(1))]);
        let sq = &v * &v;
        assert_eq!(sq, Multivector::scalar(3, qi(-14)));
        assert_eq!(sq.grade_project(0).scalar_part(), qi(-14));
    }

    #[test]
    fn involution_signs() {
        let n = 2;
        let e12 = &e(n, 1) * &e(n, 2);
        assert_eq!(e12.reversion(), -&e12);
        assert_eq!(e(n, 1).conjugation(), -&e(n, 1));
        assert_eq!(e12.bar(), e12.clone());
        assert_eq!(e12.conjugation(), -&e12);
    }

    #[test]
    fn norm_examples() {
        let n = 2;
        let a = Multivector::from_q_terms(n, &[(&[], qi(1)), (&[1], qi(1))]);
        assert!((a.norm() - 2f64.sqrt()).abs() < 1e-15);
        let b = &e(n, 1) * &a.clone(); // e1 (1 + e1) = e1 - 1
        assert!((b.norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Multivector::<Q>::zero(n).norm(), 0.0);
    }

    #[test]
    fn grade_projection() {
        let n = 2;
        let a = Multivector::from_q_terms(n, &[(&[], qi(1)), (&[1], qi(1)), (&[1, 2], qi(1))]);
        assert_eq!(a.grade_project(1), e(n, 1));
        let twice = a.grade_project(1).grade_project(1);
        assert_eq!(twice, e(n, 1));
        let back: Multivector<Q> = (0..=n).fold(Multivector::zero(n), |acc, k| {
            &acc + &a.grade_project(k)
        });
        assert_eq!(back, a);
        assert!(a.try_grade_project(5).is_err());
    }

    #[test]
    fn paravector_bar_identity() {
        // bar(x) x = |x|^2 for paravectors
        let x = Multivector::paravector(3, &[qi(2), qi(-1), qi(3), qi(5)]);
        let p = &x.bar() * &x;
        assert_eq!(p, Multivector::scalar(3, qi(4 + 1 + 9 + 25)));
    }

    #[test]
    fn json_roundtrip_rational() {
        let a = Multivector::from_q_terms(2, &[(&[], q(1, 3)), (&[1, 2], qi(-2))]);
        let j = a.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back: MvJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Multivector::<Q>::from_json(&back).unwrap(), a);
    }
}
