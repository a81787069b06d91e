//! Fischer decomposition of homogeneous polynomials into harmonic layers:
//! `p = h_k + r^2 h_{k-2} + r^4 h_{k-4} + ...`, computed exactly by the
//! Laplacian recursion `Delta(r^{2j} h_m) = 2j (2m + 2j + d - 2) r^{2j-2} h_m`
//! in `d = n + 1` ambient variables.

use crate::error::{CoreError, Result};
use crate::poly::{CliffordPolynomial, DiffOp};
use crate::scalar::Coeff;
use std::collections::BTreeMap;

/// Harmonic layers of a homogeneous polynomial of degree `k`:
/// `p = sum_j r^{2j} h_{k-2j}` with every `h` harmonic.
#[derive(Debug, Clone)]
pub struct HarmonicComponents<T: Coeff> {
    pub n: usize,
    pub degree: usize,
    /// `(m, h_m)` pairs, highest degree first; zero layers are omitted.
    pub components: Vec<(usize, CliffordPolynomial<T>)>,
}

impl<T: Coeff> HarmonicComponents<T> {
    /// Reassemble `sum_j r^{2j} h_{k-2j}` exactly.
    pub fn reassemble(&self) -> CliffordPolynomial<T> {
        let r2 = CliffordPolynomial::radius_sq(self.n);
        let mut out = CliffordPolynomial::zero(self.n);
        for (m, h) in &self.components {
            let mut term = h.clone();
            let mut j = (self.degree - m) / 2;
            while j > 0 {
                term = r2.multiply(&term);
                j -= 1;
            }
            out = &out + &term;
        }
        out
    }

    /// Restriction to the unit sphere: set `r = 1`, i.e. the plain sum of layers.
    pub fn sphere_restriction(&self) -> CliffordPolynomial<T> {
        let mut out = CliffordPolynomial::zero(self.n);
        for (_, h) in &self.components {
            out = &out + h;
        }
        out
    }
}

/// Decompose a homogeneous polynomial into harmonic layers.
pub fn harmonic_decompose<T: Coeff>(p: &CliffordPolynomial<T>) -> Result<HarmonicComponents<T>> {
    if !p.is_homogeneous() {
        return Err(CoreError::Contract(
            "harmonic decomposition requires a homogeneous polynomial".into(),
        ));
    }
    let n = p.n();
    let degree = p.degree().unwrap_or(0);
    let layers = decompose_rec(p, degree);
    let components = layers
        .into_iter()
        .filter(|(_, h)| !h.is_zero())
        .map(|(m, h)| (m, h))
        .rev()
        .collect();
    Ok(HarmonicComponents {
        n,
        degree,
        components,
    })
}

fn decompose_rec<T: Coeff>(
    p: &CliffordPolynomial<T>,
    k: usize,
) -> BTreeMap<usize, CliffordPolynomial<T>> {
    let n = p.n();
    let d = (n + 1) as i64;
    let mut out = BTreeMap::new();
    if p.is_zero() {
        return out;
    }
    if k <= 1 {
        out.insert(k, p.clone());
        return out;
    }
    let lap = p.apply_diff_op(DiffOp::Laplacian);
    if lap.is_zero() {
        out.insert(k, p.clone());
        return out;
    }
    // Delta p = sum_{j>=1} lambda_j r^{2(j-1)} h_{k-2j},
    // lambda_j = 2j (2k - 2j + d - 2)
    let sub = decompose_rec(&lap, k - 2);
    let r2 = CliffordPolynomial::radius_sq(n);
    let mut rest = CliffordPolynomial::zero(n);
    for (m, g) in sub {
        // g sits at degree m = k - 2j
        let j = ((k - 2 - m) / 2 + 1) as i64;
        let lambda = 2 * j * (2 * k as i64 - 2 * j + d - 2);
        debug_assert!(lambda != 0);
        let h = g.map_coeffs(|c| c.map_coeffs(|x| x.div_int(lambda)));
        let mut lifted = h.clone();
        for _ in 0..j {
            lifted = r2.multiply(&lifted);
        }
        rest = &rest + &lifted;
        out.insert(m, h);
    }
    out.insert(k, &p.clone() - &rest);
    out
}

/// Restrict an arbitrary polynomial to the sphere as a map
/// `degree -> harmonic component` (layers of equal parity merge).
pub fn sphere_reduce<T: Coeff>(
    p: &CliffordPolynomial<T>,
) -> Result<BTreeMap<usize, CliffordPolynomial<T>>> {
    let mut out: BTreeMap<usize, CliffordPolynomial<T>> = BTreeMap::new();
    for (_, part) in p.homogeneous_parts() {
        let dec = harmonic_decompose(&part)?;
        for (m, h) in dec.components {
            match out.get_mut(&m) {
                Some(acc) => {
                    let sum = &*acc + &h;
                    if sum.is_zero() {
                        out.remove(&m);
                    } else {
                        *acc = sum;
                    }
                }
                None => {
                    out.insert(m, h);
                }
            }
        }
    }
    out.retain(|_, h| !h.is_zero());
    Ok(out)
}
