//! Fixed-point solver for the spherical Beltrami equations
//! `D_s f = q (DsBar + wbar) f` (variant `s0`) and `D_s f = q DsBar f`
//! (variant `s1`), in spectral (whole-sphere) or quadrature (cap) mode.
//!
//! The iteration is `h_{k+1} = q (rhs(phi) + Pi h_k)` from `h_0 = 0`; under
//! `|q|_inf |Pi| < 1` it is a contraction and `f = phi + T h`.

use crate::basis::l2_norm_sq_f64;
use crate::clifford::Multivector;
use crate::error::{CoreError, Result};
use crate::mesh::{CapMesh, MeshFunction};
use crate::norms::operator_norm_l2;
use crate::operators::{OperatorEngine, OperatorTag};
use crate::poly::CliffordPolynomial;
use crate::quadrature::{
    cauchy_transform_quad, cauchy_kernel_value, ds_bar_of_kernel, ds_bar_plus_wbar_of_kernel,
    pi_s0_quad, PiQuadScheme,
};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeltramiVariant {
    S0,
    S1,
}

/// Coefficient function `q`: a constant multivector or a polynomial
/// restriction to the sphere.
#[derive(Debug, Clone)]
pub enum QCoeff {
    Constant(Multivector<f64>),
    Poly(CliffordPolynomial<f64>),
}

impl QCoeff {
    pub fn eval(&self, p: &Multivector<f64>) -> Multivector<f64> {
        match self {
            QCoeff::Constant(c) => c.clone(),
            QCoeff::Poly(poly) => poly.evaluate(p),
        }
    }

    pub fn as_poly(&self, n: usize) -> CliffordPolynomial<f64> {
        match self {
            QCoeff::Constant(c) => CliffordPolynomial::constant(c.clone()),
            QCoeff::Poly(poly) => {
                assert_eq!(poly.n(), n);
                poly.clone()
            }
        }
    }
}

/// Monogenic seed.
#[derive(Debug, Clone)]
pub enum PhiSpec {
    Zero,
    /// `phi = G_s(. - pole)` with the pole strictly outside the cap.
    CauchyKernel { pole: Multivector<f64> },
}

/// Problem mode: dense spectral operators on the whole sphere, or cap
/// quadrature.
pub enum BeltramiMode<'a> {
    Spectral { engine: &'a OperatorEngine },
    Quadrature { mesh: &'a CapMesh },
}

pub struct BeltramiProblem<'a> {
    pub variant: BeltramiVariant,
    pub mode: BeltramiMode<'a>,
    pub q: QCoeff,
    pub phi: PhiSpec,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecheckReport {
    pub q_inf: f64,
    pub pi_norm: f64,
    pub product: f64,
    pub pass: bool,
    pub margin: f64,
}

/// Outcome of the fixed-point iteration.
#[derive(Debug)]
pub struct BeltramiResult {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub observed_rate: Option<f64>,
    pub final_fixed_point_residual: f64,
    pub warnings: Vec<String>,
    pub solution: BeltramiSolution,
}

#[derive(Debug)]
pub enum BeltramiSolution {
    Spectral {
        h: DVector<f64>,
        f: DVector<f64>,
    },
    Quadrature {
        h: MeshFunction,
        f: MeshFunction,
    },
}

/// Quasi-uniform deterministic point set (Fibonacci lattice) on `S^2`.
pub fn fibonacci_sphere(count: usize) -> Vec<Multivector<f64>> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            Multivector::paravector(2, &[z, r * phi.cos(), r * phi.sin()])
        })
        .collect()
}

/// Estimate `|q|_inf` by dense sampling (spectral) or node max (quadrature).
pub fn q_sup_norm(q: &QCoeff, mode: &BeltramiMode) -> f64 {
    match mode {
        BeltramiMode::Spectral { engine } => {
            if engine.n() == 2 {
                fibonacci_sphere(10_000)
                    .iter()
                    .map(|p| q.eval(p).norm())
                    .fold(0.0, f64::max)
            } else {
                // constants are exact; polynomials sampled on a lattice of S^3
                match q {
                    QCoeff::Constant(c) => c.norm(),
                    QCoeff::Poly(poly) => sample_s3(4_000)
                        .iter()
                        .map(|p| poly.evaluate(p).norm())
                        .fold(0.0, f64::max),
                }
            }
        }
        BeltramiMode::Quadrature { mesh } => mesh
            .interior
            .iter()
            .map(|n| q.eval(&n.point).norm())
            .fold(0.0, f64::max),
    }
}

fn sample_s3(count: usize) -> Vec<Multivector<f64>> {
    // deterministic low-discrepancy-ish lattice on S^3
    let mut out = Vec::with_capacity(count);
    let g = 1.533_751_168_755_204_3_f64; // plastic-number based spacings
    let g2 = g * g;
    let g3 = g2 * g;
    for i in 0..count {
        let u = (i as f64 * g).fract();
        let v = (i as f64 * g2).fract();
        let w = (i as f64 * g3).fract();
        let theta = (1.0 - 2.0 * u).acos();
        let phi = std::f64::consts::PI * v;
        let psi = 2.0 * std::f64::consts::PI * w;
        let x0 = theta.cos();
        let s = theta.sin();
        out.push(Multivector::paravector(
            3,
            &[
                x0,
                s * phi.cos(),
                s * phi.sin() * psi.cos(),
                s * phi.sin() * psi.sin(),
            ],
        ));
    }
    out
}

/// `|q|_inf |Pi| < 1` gate.
pub fn contraction_precheck(problem: &BeltramiProblem, pi_norm: f64) -> PrecheckReport {
    let q_inf = q_sup_norm(&problem.q, &problem.mode);
    let product = q_inf * pi_norm;
    PrecheckReport {
        q_inf,
        pi_norm,
        product,
        pass: product < 1.0,
        margin: 1.0 - product,
    }
}

/// Measured operator norm of the relevant `Pi` for the problem mode.
pub fn pi_norm_for(problem: &BeltramiProblem) -> Result<f64> {
    match (&problem.mode, problem.variant) {
        (BeltramiMode::Spectral { engine }, BeltramiVariant::S0) => {
            operator_norm_l2(engine, OperatorTag::Pi0)
        }
        (BeltramiMode::Spectral { engine }, BeltramiVariant::S1) => {
            operator_norm_l2(engine, OperatorTag::Pi1)
        }
        (BeltramiMode::Quadrature { mesh }, variant) => {
            quadrature_pi_norm_estimate(mesh, variant)
        }
    }
}

/// Power iteration on the quadrature `Pi` for a norm estimate.
fn quadrature_pi_norm_estimate(mesh: &CapMesh, variant: BeltramiVariant) -> Result<f64> {
    let targets: Vec<_> = mesh.interior.iter().map(|n| n.point.clone()).collect();
    let mut v = MeshFunction {
        values: mesh
            .interior
            .iter()
            .enumerate()
            .map(|(i, n)| {
                // deterministic pseudo-random start with all blades populated
                let s = (i as f64 * 0.7391).sin();
                let c = (i as f64 * 1.1731).cos();
                Multivector::from_terms(
                    2,
                    [
                        (0u16, 0.3 + s),
                        (1u16, c),
                        (2u16, s * c),
                        (3u16, 0.5 - c),
                    ],
                )
                .scale(&(1.0 + 0.1 * (n.weight.fract())))
            })
            .collect(),
    };
    let l2 = |f: &MeshFunction| f.lp_norm(mesh, 2.0);
    let mut norm = 0.0;
    for _ in 0..8 {
        let nv = l2(&v);
        if nv == 0.0 {
            break;
        }
        v = v.scale(1.0 / nv);
        let fv = apply_pi_quad(mesh, &v, &targets, variant);
        norm = l2(&fv);
        v = fv;
    }
    Ok(norm)
}

fn apply_pi_quad(
    mesh: &CapMesh,
    f: &MeshFunction,
    targets: &[Multivector<f64>],
    variant: BeltramiVariant,
) -> MeshFunction {
    let scheme = if mesh.boundary.is_empty() {
        PiQuadScheme::Stabilized
    } else {
        PiQuadScheme::JumpCorrected
    };
    let pi0 = pi_s0_quad(mesh, f, targets, scheme, f);
    match variant {
        BeltramiVariant::S0 => pi0,
        BeltramiVariant::S1 => {
            // Pi_{s,1} = Pi_{s,0} - wbar T
            let t = cauchy_transform_quad(mesh, f, targets);
            let wbar_t = MeshFunction {
                values: targets
                    .iter()
                    .zip(&t.values)
                    .map(|(w, tv)| w.bar().product(tv))
                    .collect(),
            };
            pi0.sub(&wbar_t)
        }
    }
}

/// Solve by Banach iteration; `start` overrides the default zero start.
pub fn solve_fixed_point(
    problem: &BeltramiProblem,
    start: Option<&BeltramiStart>,
) -> Result<BeltramiResult> {
    match &problem.mode {
        BeltramiMode::Spectral { engine } => solve_spectral(problem, engine, start),
        BeltramiMode::Quadrature { mesh } => solve_quadrature(problem, mesh, start),
    }
}

/// Optional nonzero starting iterate.
pub enum BeltramiStart {
    Spectral(DVector<f64>),
    Quadrature(MeshFunction),
}

fn observed_rate(history: &[f64]) -> Option<f64> {
    // geometric mean of successive update ratios, first step skipped
    let ratios: Vec<f64> = history
        .windows(2)
        .skip(1)
        .filter(|w| w[0] > 1e-300)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        None
    } else {
        let log_sum: f64 = ratios.iter().map(|r| r.max(1e-300).ln()).sum();
        Some((log_sum / ratios.len() as f64).exp())
    }
}

fn solve_spectral(
    problem: &BeltramiProblem,
    engine: &OperatorEngine,
    start: Option<&BeltramiStart>,
) -> Result<BeltramiResult> {
    let basis = engine.basis();
    let n = engine.n();
    if !matches!(problem.phi, PhiSpec::Zero) {
        return Err(CoreError::Contract(
            "whole-sphere spectral mode admits only the zero monogenic seed \
             (the spherical Dirac operator has trivial kernel)"
                .into(),
        ));
    }
    let pi_tag = match problem.variant {
        BeltramiVariant::S0 => OperatorTag::Pi0,
        BeltramiVariant::S1 => OperatorTag::Pi1,
    };
    let pi = engine.operator(pi_tag)?;
    let t = engine.operator(OperatorTag::T)?;
    let q_poly = problem.q.as_poly(n);
    let mut warnings = Vec::new();

    let mut h = match start {
        Some(BeltramiStart::Spectral(v)) => v.clone(),
        Some(_) => return Err(CoreError::Contract("start vector mode mismatch".into())),
        None => DVector::zeros(basis.dim()),
    };
    let rhs = DVector::zeros(basis.dim()); // (DsBar + wbar) phi with phi = 0
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..problem.max_iterations {
        iterations = k + 1;
        let u = &rhs + &(&pi.matrix * &h);
        let u_fun = basis.synth(&u).as_poly();
        let product = q_poly.multiply(&u_fun);
        let expansion = basis.expand_f64(&product)?;
        let h_next = expansion.coords;
        let h_norm = basis.norm(&h_next);
        if expansion.discarded_norm > 0.1 * h_norm.max(1e-300) && h_norm > 0.0 {
            warnings.push(format!(
                "iteration {iterations}: truncation discarded {:.3e} against iterate norm {:.3e}",
                expansion.discarded_norm, h_norm
            ));
        }
        let update = basis.norm(&(&h_next - &h));
        history.push(update);
        h = h_next;
        if update <= problem.tolerance * h_norm.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CoreError::NonConvergence {
            iterations,
            residual: *history.last().unwrap_or(&f64::NAN),
            history,
        });
    }
    // final fixed-point residual |h - q (rhs + Pi h)| / max(1, |h|)
    let u = &rhs + &(&pi.matrix * &h);
    let product = q_poly.multiply(&basis.synth(&u).as_poly());
    let rhs_h = basis.expand_f64(&product)?.coords;
    let final_residual = basis.norm(&(&h - &rhs_h)) / basis.norm(&h).max(1.0);
    let f = t.matrix.clone() * &h; // f = phi + T h with phi = 0
    Ok(BeltramiResult {
        iterations,
        observed_rate: observed_rate(&history),
        residual_history: history,
        final_fixed_point_residual: final_residual,
        warnings,
        solution: BeltramiSolution::Spectral { h, f },
    })
}

fn solve_quadrature(
    problem: &BeltramiProblem,
    mesh: &CapMesh,
    start: Option<&BeltramiStart>,
) -> Result<BeltramiResult> {
    let targets: Vec<_> = mesh.interior.iter().map(|n| n.point.clone()).collect();
    let n_pts = targets.len();
    // rhs(phi) at the nodes, in closed form
    let rhs = match (&problem.phi, problem.variant) {
        (PhiSpec::Zero, _) => MeshFunction::zeros(n_pts),
        (PhiSpec::CauchyKernel { pole }, BeltramiVariant::S0) => {
            check_pole(mesh, pole)?;
            MeshFunction::sample(targets.iter().cloned(), |p| {
                ds_bar_plus_wbar_of_kernel(p, pole)
            })
        }
        (PhiSpec::CauchyKernel { pole }, BeltramiVariant::S1) => {
            check_pole(mesh, pole)?;
            MeshFunction::sample(targets.iter().cloned(), |p| ds_bar_of_kernel(p, pole))
        }
    };
    let q_vals = MeshFunction::sample(targets.iter().cloned(), |p| problem.q.eval(p));
    let l2 = |f: &MeshFunction| f.lp_norm(mesh, 2.0);

    let mut h = match start {
        Some(BeltramiStart::Quadrature(f)) => f.clone(),
        Some(_) => return Err(CoreError::Contract("start vector mode mismatch".into())),
        None => MeshFunction::zeros(n_pts),
    };
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..problem.max_iterations {
        iterations = k + 1;
        let pi_h = apply_pi_quad(mesh, &h, &targets, problem.variant);
        let h_next = q_vals.mul_pointwise(&rhs.add(&pi_h));
        let update = l2(&h_next.sub(&h));
        history.push(update);
        let h_norm = l2(&h_next);
        h = h_next;
        if update <= problem.tolerance * h_norm.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CoreError::NonConvergence {
            iterations,
            residual: *history.last().unwrap_or(&f64::NAN),
            history,
        });
    }
    let pi_h = apply_pi_quad(mesh, &h, &targets, problem.variant);
    let fixed = q_vals.mul_pointwise(&rhs.add(&pi_h));
    let final_residual = l2(&h.sub(&fixed)) / l2(&h).max(1.0);
    // f = phi + T h
    let t_h = cauchy_transform_quad(mesh, &h, &targets);
    let phi_vals = match &problem.phi {
        PhiSpec::Zero => MeshFunction::zeros(n_pts),
        PhiSpec::CauchyKernel { pole } => {
            MeshFunction::sample(targets.iter().cloned(), |p| cauchy_kernel_value(p, pole))
        }
    };
    let f = phi_vals.add(&t_h);
    Ok(BeltramiResult {
        iterations,
        observed_rate: observed_rate(&history),
        residual_history: history,
        final_fixed_point_residual: final_residual,
        warnings: Vec::new(),
        solution: BeltramiSolution::Quadrature { h, f },
    })
}

fn check_pole(mesh: &CapMesh, pole: &Multivector<f64>) -> Result<()> {
    let p = crate::mesh::to_coords(pole);
    let dot = p[0] * mesh.axis[0] + p[1] * mesh.axis[1] + p[2] * mesh.axis[2];
    let angle = dot.clamp(-1.0, 1.0).acos();
    if angle <= mesh.theta_c {
        return Err(CoreError::Domain(
            "monogenic seed pole must lie outside the cap".into(),
        ));
    }
    Ok(())
}

/// `|D_s f - q rhs_op(f)|_{L^2} / |f|` on the valid subspace, evaluated with
/// the engine matrices (spectral consistency check).
pub fn spectral_consistency_residual(
    engine: &OperatorEngine,
    variant: BeltramiVariant,
    q: &QCoeff,
    f: &DVector<f64>,
) -> Result<f64> {
    let basis = engine.basis();
    let ds = engine.operator(OperatorTag::Ds)?;
    let rhs_op = match variant {
        BeltramiVariant::S0 => {
            let dsb = engine.operator(OperatorTag::DsBar)?;
            let wb = engine.operator(OperatorTag::WBar)?;
            &dsb.matrix + &wb.matrix
        }
        BeltramiVariant::S1 => engine.operator(OperatorTag::DsBar)?.matrix.clone(),
    };
    let lhs = &ds.matrix * f;
    let rhs_f = &rhs_op * f;
    let q_poly = q.as_poly(engine.n());
    let product = q_poly.multiply(&basis.synth(&rhs_f).as_poly());
    let rhs = basis.expand_f64(&product)?.coords;
    let fnorm = basis.norm(f).max(1e-300);
    Ok(basis.norm(&(&lhs - &rhs)) / fnorm)
}

/// Contribution of a polynomial beyond the truncation degree, used by tests.
pub fn poly_l2_norm(p: &CliffordPolynomial<f64>) -> f64 {
    l2_norm_sq_f64(p).max(0.0).sqrt()
}
