//! Construction of the polynomial spaces behind the spherical analysis:
//! scalar harmonic bases in Cauchy-data form, left-monogenic bases via the
//! Cauchy-Kovalevskaya extension, the `bar(x) conj(M)` companion spaces, and
//! the Almansi-Fischer splitting `H_k = M_k + bar(x) conj(M_{k-1})`.

use crate::clifford::{Blade, Multivector};
use crate::error::{CoreError, Result};
use crate::fischer::harmonic_decompose;
use crate::poly::{CliffordPolynomial, DiffOp, Expo};
use crate::scalar::{Coeff, Q};

type P = CliffordPolynomial<Q>;

/// Monomials of total degree `deg` in `vars` variables, lexicographic.
pub fn monomials(vars: usize, deg: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; vars];
    fn rec(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, idx: usize, left: usize) {
        if idx + 1 == cur.len() {
            cur[idx] = left as u8;
            out.push(cur.clone());
            return;
        }
        for a in (0..=left).rev() {
            cur[idx] = a as u8;
            rec(out, cur, idx + 1, left - a);
        }
    }
    if vars == 0 {
        if deg == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(&mut out, &mut cur, 0, deg);
    out
}

fn tangential_monomial(n: usize, beta: &[u8]) -> P {
    // x'^beta in variables x_1..x_n, embedded in x_0..x_n
    let mut expo: Expo = vec![0u8; n + 1];
    expo[1..=n].copy_from_slice(beta);
    let mut p = P::zero(n);
    p.add_term(expo, Multivector::one(n));
    p
}

/// Laplacian in the tangential variables `x_1..x_n` only.
fn tangential_laplacian(p: &P) -> P {
    let n = p.n();
    let mut out = P::zero(n);
    for j in 1..=n {
        out = &out + &p.derivative(j).derivative(j);
    }
    out
}

/// Tangential Dirac `D_x = sum_{i>=1} e_i d/dx_i` (left coefficients).
fn tangential_dirac(p: &P) -> P {
    let n = p.n();
    let mut out = P::zero(n);
    for i in 1..=n {
        let e = Multivector::basis_vector(n, i);
        out = &out + &p.derivative(i).mul_const_left(&e);
    }
    out
}

/// Scalar harmonic homogeneous basis of degree `m` in Cauchy-data form.
///
/// Elements are indexed by their data `(a_0, a_1)` on `x_0 = 0`: the even
/// family extends `a_0 = x'^beta` (`|beta| = m`), the odd family extends
/// `a_1 = x'^beta` (`|beta| = m-1`).  Reading coordinates off a harmonic
/// polynomial is therefore just reading its `x_0^0` and `x_0^1` monomials.
pub fn scalar_harmonic_basis(n: usize, m: usize) -> Vec<P> {
    let mut out = Vec::new();
    for parity in 0..=1usize {
        if m < parity {
            continue;
        }
        for beta in monomials(n, m - parity) {
            let mut b = tangential_monomial(n, &beta);
            if parity == 1 {
                b = b.mul_variable(0);
            }
            // b_{j+2} = -Delta' b_j / ((j+2)(j+1)), h = sum x_0^j b_j
            let mut h = b.clone();
            let mut bj = b;
            let mut j = parity as i64;
            loop {
                let next = tangential_laplacian(&bj);
                if next.is_zero() {
                    break;
                }
                let denom = (j + 2) * (j + 1);
                // -Delta'b_j / denom, then two extra powers of x_0
                bj = next
                    .map_coeffs(|c| c.map_coeffs(|x| -x.div_int(denom)))
                    .mul_variable(0)
                    .mul_variable(0);
                // bj currently carries x_0^{j+2} already via mul_variable
                h = &h + &bj;
                j += 2;
            }
            out.push(h);
        }
    }
    out
}

/// Dimension of the scalar harmonic space of degree `m` on `S^n`.
pub fn scalar_harmonic_dim(n: usize, m: usize) -> usize {
    let even = monomials(n, m).len();
    let odd = if m >= 1 { monomials(n, m - 1).len() } else { 0 };
    even + odd
}

/// All blades of `Cl_n` in ascending index order.
pub fn all_blades(n: usize) -> Vec<Blade> {
    (0..(1u16 << n)).collect()
}

/// Real-linear basis of the `Cl_n`-valued harmonic homogeneous polynomials of
/// degree `m`: the scalar harmonic basis tensored with the blades.
pub fn harmonic_clifford_basis(n: usize, m: usize) -> Vec<P> {
    let scalars = scalar_harmonic_basis(n, m);
    let mut out = Vec::new();
    for blade in all_blades(n) {
        let mut mv = Multivector::zero(n);
        mv.add_term(blade, Q::from_integer(1.into()));
        for h in &scalars {
            out.push(h.mul_const_right(&mv));
        }
    }
    out
}

/// Left-monogenic homogeneous basis of degree `m` by Cauchy-Kovalevskaya
/// extension of the data `x'^beta e_A` on `x_0 = 0`:
/// `p = sum_j x_0^j / j! (-D_x)^j u`.
pub fn monogenic_basis(n: usize, m: usize) -> Vec<P> {
    let mut out = Vec::new();
    for blade in all_blades(n) {
        let mut mv = Multivector::zero(n);
        mv.add_term(blade, Q::from_integer(1.into()));
        for beta in monomials(n, m) {
            let u = tangential_monomial(n, &beta).mul_const_right(&mv);
            let mut p = u.clone();
            let mut term = u;
            let mut j: i64 = 0;
            loop {
                let next = tangential_dirac(&term);
                if next.is_zero() {
                    break;
                }
                j += 1;
                term = next.map_coeffs(|c| c.map_coeffs(|x| -x.div_int(j))).mul_variable(0);
                p = &p + &term;
            }
            debug_assert!(p.apply_diff_op(DiffOp::D0).is_zero());
            out.push(p);
        }
    }
    out
}

/// Basis of `bar(x) conj(M_{k-1})`, the degree-`k` companion of the monogenics.
pub fn anti_monogenic_companion_basis(n: usize, k: usize) -> Vec<P> {
    if k == 0 {
        return Vec::new();
    }
    let xbar = P::paravector_variable(n).bar_coeffwise();
    monogenic_basis(n, k - 1)
        .into_iter()
        .map(|p| xbar.multiply(&p.bar_coeffwise()))
        .collect()
}

/// The two Almansi-Fischer parts of a harmonic homogeneous `h` of degree `k`:
/// `h = p_k + bar(x) conj(p_{k-1})`, both parts left-monogenic.
///
/// Computed by exact eigenprojection of the angular operator on `H_k`
/// (eigenvalues `-k` and `n + k - 1`).
pub fn almansi_fischer(h: &P) -> Result<(P, P)> {
    let n = h.n();
    if h.is_zero() {
        return Ok((P::zero(n), P::zero(n)));
    }
    if !h.is_homogeneous() {
        return Err(CoreError::Contract(
            "Almansi-Fischer input must be homogeneous".into(),
        ));
    }
    if !h.apply_diff_op(DiffOp::Laplacian).is_zero() {
        return Err(CoreError::Contract(
            "Almansi-Fischer input must be harmonic".into(),
        ));
    }
    let k = h.degree().unwrap_or(0);
    let gamma_h = h.apply_diff_op(DiffOp::Gamma0);
    // projector onto the (n + k - 1)-eigenspace: (Gamma0 + k) / (n + 2k - 1)
    let denom = (n + 2 * k) as i64 - 1;
    let q_part = (&gamma_h + &h.scale(&crate::scalar::qi(k as i64)))
        .map_coeffs(|c| c.map_coeffs(|x| x.div_int(denom)));
    let p_part = &h.clone() - &q_part;
    // recover p_{k-1}: x * q_part = r^2 conj(p_{k-1})
    let p_km1 = if q_part.is_zero() {
        P::zero(n)
    } else {
        let lifted = P::paravector_variable(n).multiply(&q_part);
        let dec = harmonic_decompose(&lifted)?;
        let mut inner = P::zero(n);
        for (m, comp) in dec.components {
            if m + 2 == k + 1 {
                inner = comp;
            } else if !comp.is_zero() {
                return Err(CoreError::Contract(
                    "angular projection did not produce a pure companion part".into(),
                ));
            }
        }
        inner.bar_coeffwise()
    };
    Ok((p_part, p_km1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_harmonic_dims() {
        // S^2: 2m+1; S^3: (m+1)^2
        for m in 0..=6 {
            assert_eq!(scalar_harmonic_basis(2, m).len(), 2 * m + 1);
            assert_eq!(scalar_harmonic_basis(3, m).len(), (m + 1) * (m + 1));
        }
    }

    #[test]
    fn scalar_harmonics_are_harmonic() {
        for n in [2usize, 3] {
            for m in 0..=4 {
                for h in scalar_harmonic_basis(n, m) {
                    assert!(h.is_homogeneous());
                    assert_eq!(h.degree().unwrap_or(0), m);
                    assert!(h.apply_diff_op(DiffOp::Laplacian).is_zero());
                }
            }
        }
    }

    #[test]
    fn monogenic_dims_and_kernel() {
        // n=2: real dim 4(m+1); constants at m=0
        assert_eq!(monogenic_basis(2, 0).len(), 4);
        assert_eq!(monogenic_basis(2, 1).len(), 8);
        assert_eq!(monogenic_basis(3, 1).len(), 24);
        for n in [2usize, 3] {
            for m in 0..=3 {
                for p in monogenic_basis(n, m) {
                    assert!(p.apply_diff_op(DiffOp::D0).is_zero());
                    assert!(p.apply_diff_op(DiffOp::Laplacian).is_zero());
                }
            }
        }
    }

    #[test]
    fn full_harmonic_dim_counts() {
        assert_eq!(harmonic_clifford_basis(2, 1).len(), 12);
        assert_eq!(harmonic_clifford_basis(2, 2).len(), 20);
        // dim M_k + dim companion = dim H_k
        for n in [2usize, 3] {
            for k in 1..=4 {
                let dim_h = harmonic_clifford_basis(n, k).len();
                let dim_p = monogenic_basis(n, k).len();
                let dim_q = anti_monogenic_companion_basis(n, k).len();
                assert_eq!(dim_p + dim_q, dim_h, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn gamma_eigenvalues_on_both_parts() {
        // Gamma0 p = -m p on monogenics, Gamma0 q = (n + k - 1) q on companions
        for n in [2usize, 3] {
            for m in 0..=3 {
                for p in monogenic_basis(n, m) {
                    let got = p.apply_diff_op(DiffOp::Gamma0);
                    assert_eq!(got, p.scale(&qi(-(m as i64))));
                }
            }
            for k in 1..=3 {
                for q in anti_monogenic_companion_basis(n, k) {
                    let got = q.apply_diff_op(DiffOp::Gamma0);
                    assert_eq!(got, q.scale(&qi((n + k) as i64 - 1)));
                }
            }
        }
    }

    #[test]
    fn companions_are_harmonic() {
        for n in [2usize, 3] {
            for k in 1..=3 {
                for q in anti_monogenic_companion_basis(n, k) {
                    assert!(q.apply_diff_op(DiffOp::Laplacian).is_zero());
                    assert!(q.is_homogeneous());
                }
            }
        }
    }

    #[test]
    fn almansi_of_bar_x() {
        // bar(x) = bar(x) * conj(1): parts (0, 1)
        let n = 2;
        let xbar = P::paravector_variable(n).bar_coeffwise();
        let (p1, p0) = almansi_fischer(&xbar).unwrap();
        assert!(p1.is_zero());
        assert_eq!(p0, P::one(n));
    }

    #[test]
    fn almansi_of_monogenic() {
        let n = 2;
        let e1 = Multivector::basis_vector(n, 1);
        let p = &P::variable(n, 1) - &P::variable(n, 0).mul_const_left(&e1);
        let (pk, pkm1) = almansi_fischer(&p).unwrap();
        assert_eq!(pk, p);
        assert!(pkm1.is_zero());
    }

    #[test]
    fn almansi_reassembly_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in [2usize, 3] {
            for k in 1..=4 {
                let basis = harmonic_clifford_basis(n, k);
                // random rational combination
                let mut h = P::zero(n);
                for b in &basis {
                    let c = qi(rng.gen_range(-2..=2i64));
                    h = &h + &b.scale(&c);
                }
                if h.is_zero() {
                    continue;
                }
                let (pk, pkm1) = almansi_fischer(&h).unwrap();
                assert!(pk.apply_diff_op(DiffOp::D0).is_zero());
                assert!(pkm1.apply_diff_op(DiffOp::D0).is_zero());
                let xbar = P::paravector_variable(n).bar_coeffwise();
                let back = &pk + &xbar.multiply(&pkm1.bar_coeffwise());
                assert_eq!(back, h);
            }
        }
    }

    #[test]
    fn non_harmonic_rejected() {
        let n = 2;
        let p = &P::variable(n, 0) * &P::variable(n, 0);
        assert!(almansi_fischer(&p).is_err());
    }
}
