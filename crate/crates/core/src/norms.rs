//! Operator norms in the `L^2(S^n)` geometry and the closed-form bound
//! expressions the measured values are reported against.

use crate::error::{CoreError, Result};
use crate::operators::{OperatorEngine, OperatorTag};
use crate::scalar::sphere_area;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// `L^T M L^{-T}` for the Gram Cholesky factor `L`: the operator in
/// orthonormal coordinates.
pub fn whitened(engine: &OperatorEngine, m: &DMatrix<f64>) -> DMatrix<f64> {
    let l = engine.basis().gram_chol();
    // X = L^{-1} M^T  =>  A = L^T (M L^{-T}) = L^T X^T
    let x = l
        .clone()
        .solve_lower_triangular(&m.transpose())
        .expect("Cholesky factor is nonsingular");
    l.transpose() * x.transpose()
}

/// Largest Gram singular value of the operator over its valid input degrees.
pub fn operator_norm_l2(engine: &OperatorEngine, tag: OperatorTag) -> Result<f64> {
    let op = engine.operator(tag)?;
    let aw = whitened(engine, &op.matrix);
    let restricted = engine.restrict_columns(&aw, op.valid_degree());
    let svd = restricted.svd(false, false);
    Ok(svd.singular_values.max())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormsReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub trunc: usize,
    pub t_norm: f64,
    pub t_expected: f64,
    pub t_lp_bound: f64,
    pub pi_s0_norm: f64,
    pub pi_s0_bound_square: f64,
    pub pi_s0_bound_triangle: f64,
    pub pi_s1_norm: f64,
    pub pi_s1_claimed: f64,
    pub notes: Vec<String>,
}

/// Measure `T`, `Pi_{s,0}`, `Pi_{s,1}` and report them against the
/// closed-form expressions.
pub fn norms_report(engine: &OperatorEngine) -> Result<NormsReport> {
    let n = engine.n();
    let nf = n as f64;
    let t_norm = operator_norm_l2(engine, OperatorTag::T)?;
    let pi0 = operator_norm_l2(engine, OperatorTag::Pi0)?;
    let pi1 = operator_norm_l2(engine, OperatorTag::Pi1)?;
    let mut notes = vec![];
    if (pi1 - 1.0).abs() > 1e-6 {
        notes.push(format!(
            "pi_s1 measures {pi1:.12} on the truncation: the composition is built from two \
             different angular gradings and is not an isometry; the classical isometry claim \
             identifies the gradings"
        ));
    }
    Ok(NormsReport {
        n,
        trunc: engine.trunc(),
        t_norm,
        t_expected: 2.0 / nf,
        t_lp_bound: sphere_area((n - 1) as u32) / 4.0,
        pi_s0_norm: pi0,
        pi_s0_bound_square: 1.0 + 4.0 / (nf * nf),
        pi_s0_bound_triangle: 1.0 + 2.0 / nf,
        pi_s1_norm: pi1,
        pi_s1_claimed: 1.0,
        notes,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub p: f64,
    #[serde(rename = "Bp")]
    pub b_p: f64,
    pub omega_n: f64,
    pub omega_n_minus_1: f64,
    pub t_lp_bound: f64,
    pub kernel_theta_integral: f64,
    pub kernel_full_mass: f64,
    pub riesz_factor: f64,
    pub pi_s0_lp_bound: f64,
    pub pi_s1_lp_bound: f64,
}

/// Evaluate the closed-form `L^p` bound expressions; pure arithmetic.
pub fn theoretical_bounds(n: usize, p: f64, b_p: f64) -> Result<BoundsReport> {
    if !(p > 1.0) {
        return Err(CoreError::Domain(format!("p must exceed 1, got {p}")));
    }
    if !(b_p > 0.0) {
        return Err(CoreError::Domain(format!("Bp must be positive, got {b_p}")));
    }
    let nf = n as f64;
    let omega_n = sphere_area(n as u32);
    let omega_nm1 = sphere_area((n - 1) as u32);
    let theta = kernel_theta_integral(n);
    let riesz = (std::f64::consts::PI.sqrt() / (2.0 * 2.0f64.sqrt())) * (p / (p - 1.0)).sqrt() * b_p;
    Ok(BoundsReport {
        n,
        p,
        b_p,
        omega_n,
        omega_n_minus_1: omega_nm1,
        t_lp_bound: omega_nm1 / 4.0,
        kernel_theta_integral: theta,
        kernel_full_mass: omega_nm1 * theta,
        riesz_factor: riesz,
        pi_s0_lp_bound: (nf - 1.0) * riesz + (nf / 2.0 - 1.0) * omega_nm1 / 4.0,
        pi_s1_lp_bound: (nf - 1.0) * riesz + (nf / 2.0) * omega_nm1 / 4.0,
    })
}

/// The polar integral `int_0^pi cos^{n-1}(theta/2) dtheta
/// = sqrt(pi) Gamma(n/2) / Gamma((n+1)/2)`.
pub fn kernel_theta_integral(n: usize) -> f64 {
    let (gn, hn) = crate::scalar::gamma_half_exact(n as u64);
    let (gn1, hn1) = crate::scalar::gamma_half_exact(n as u64 + 1);
    let pi = std::f64::consts::PI;
    pi.sqrt() * crate::scalar::q_to_f64(&gn) * pi.powf(hn as f64 / 2.0)
        / (crate::scalar::q_to_f64(&gn1) * pi.powf(hn1 as f64 / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_integral_values() {
        assert!((kernel_theta_integral(2) - 2.0).abs() < 1e-12);
        assert!((kernel_theta_integral(4) - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_at_n3_p2() {
        // (n-1) * sqrt(pi)/(2 sqrt2) * sqrt(2) * 1 + (1/2) omega_2 / 4 = sqrt(pi) + pi/2
        let r = theoretical_bounds(3, 2.0, 1.0).unwrap();
        let expected = std::f64::consts::PI.sqrt() + std::f64::consts::PI / 2.0;
        assert!((r.pi_s0_lp_bound - expected).abs() < 1e-12);
        assert!((r.omega_n_minus_1 - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn t_bound_at_n2() {
        let r = theoretical_bounds(2, 2.0, 1.0).unwrap();
        assert!((r.t_lp_bound - std::f64::consts::PI / 2.0).abs() < 1e-12);
        assert!((r.omega_n - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn p_domain_checked() {
        assert!(theoretical_bounds(2, 1.0, 1.0).is_err());
        assert!(theoretical_bounds(2, 2.0, -1.0).is_err());
    }

    #[test]
    fn t_norm_is_two_over_n() {
        let eng = OperatorEngine::new(2, 4).unwrap();
        let t = operator_norm_l2(&eng, OperatorTag::T).unwrap();
        assert!((t - 1.0).abs() < 1e-9, "got {t}");
    }
}
