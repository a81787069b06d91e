//! Exact integration of polynomials over the unit sphere `S^n` (raw surface
//! measure, so `|S^2| = 4 pi`).
//!
//! Every nonzero monomial integral is a rational multiple of a fixed power of
//! `pi` depending only on `n`; the rational part is carried exactly and the
//! `pi` power is attached at the end.  The `L^2` pairing used throughout is
//! `(u, v) = integral of conj(u) v`, whose scalar part is positive definite.

use crate::clifford::Multivector;
use crate::error::Result;
use crate::poly::CliffordPolynomial;
use crate::scalar::{gamma_half_exact, q_to_f64, qi, Q};
use num::Zero;

/// Power of `pi` common to all nonzero monomial integrals over `S^n`.
pub fn pi_power(n: usize) -> u32 {
    if n % 2 == 0 {
        (n / 2) as u32
    } else {
        ((n + 1) / 2) as u32
    }
}

/// `pi^(pi_power(n))` as a float.
pub fn pi_factor(n: usize) -> f64 {
    std::f64::consts::PI.powi(pi_power(n) as i32)
}

/// Exact `integral over S^n of x^alpha dS`, reported in units of
/// `pi^(pi_power(n))`.  Zero when any exponent is odd.
pub fn monomial_integral(n: usize, alpha: &[u8]) -> Q {
    debug_assert_eq!(alpha.len(), n + 1);
    if alpha.iter().any(|&a| a % 2 == 1) {
        return Q::zero();
    }
    // 2 prod_j Gamma((alpha_j + 1)/2) / Gamma((|alpha| + n + 1)/2)
    let mut num = qi(2);
    let mut half_powers: i64 = 0;
    for &a in alpha {
        let (r, h) = gamma_half_exact(a as u64 + 1);
        num = num * r;
        half_powers += h as i64;
    }
    let total: u64 = alpha.iter().map(|&a| a as u64).sum::<u64>() + n as u64 + 1;
    let (den, h_den) = gamma_half_exact(total);
    half_powers -= h_den as i64;
    debug_assert_eq!(half_powers, 2 * pi_power(n) as i64);
    num / den
}

/// Exact integral of a polynomial restricted to `S^n`, in `pi^(pi_power(n))` units.
pub fn integrate_poly(p: &CliffordPolynomial<Q>) -> Multivector<Q> {
    let n = p.n();
    let mut out = Multivector::zero(n);
    for (expo, mv) in p.terms() {
        let w = monomial_integral(n, expo);
        if w.is_zero() {
            continue;
        }
        for (blade, c) in mv.terms() {
            out.add_term(blade, c.clone() * w.clone());
        }
    }
    out
}

/// Clifford-valued sphere pairing `(u, v) = integral of conj(u) v dS`,
/// returned as `(value in pi-units, pi power)`.
pub fn sphere_inner_product(
    u: &CliffordPolynomial<Q>,
    v: &CliffordPolynomial<Q>,
) -> Result<(Multivector<Q>, u32)> {
    let product = u
        .map_coeffs(|c| c.conjugation())
        .try_multiply(v)?;
    Ok((integrate_poly(&product), pi_power(u.n())))
}

/// Same pairing as a float multivector with the `pi` factor applied.
pub fn sphere_inner_product_f64(
    u: &CliffordPolynomial<Q>,
    v: &CliffordPolynomial<Q>,
) -> Result<Multivector<f64>> {
    let (mv, pow) = sphere_inner_product(u, v)?;
    let factor = std::f64::consts::PI.powi(pow as i32);
    Ok(mv.map_coeffs(|c| q_to_f64(c) * factor))
}

/// Scalar pairing `<u, v> = Sc integral conj(u) v`, exact, in `pi` units.
///
/// Because `Sc(conj(e_A) e_B) = delta_{AB}`, this reduces to a sum of scalar
/// polynomial products per blade.
pub fn scalar_inner(u: &CliffordPolynomial<Q>, v: &CliffordPolynomial<Q>) -> Q {
    let n = u.n();
    debug_assert_eq!(n, v.n());
    let mut acc = Q::zero();
    for (eu, cu) in u.terms() {
        for (ev, cv) in v.terms() {
            // integral weight of the combined monomial
            let mut combined = vec![0u8; n + 1];
            let mut odd = false;
            for j in 0..=n {
                combined[j] = eu[j] + ev[j];
                odd |= combined[j] % 2 == 1;
            }
            if odd {
                continue;
            }
            let mut dot = Q::zero();
            for (blade, a) in cu.terms() {
                let b = cv.coeff(blade);
                if !b.is_zero() {
                    dot = dot + a.clone() * b;
                }
            }
            if dot.is_zero() {
                continue;
            }
            acc = acc + dot * monomial_integral(n, &combined);
        }
    }
    acc
}
