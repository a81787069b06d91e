//! Quadrature realizations of the spherical Cauchy transform, the boundary
//! transform, the Borel-Pompeiu identity and the explicit singular-integral
//! form of `Pi_{s,0}` on `S^2`.
//!
//! The kernel `G_s(w - v) = bar(w - v) / |w - v|^n` is normalized by
//! `1 / omega_{n-1}` (the area of the equatorial sphere): locally the sphere
//! is flat `R^n` and that is the Dirac fundamental-solution constant there.
//! The boundaryless Borel-Pompeiu identity pins this calibration in tests.
//!
//! Weak singularities are handled by excluding nodes within geodesic radius
//! `2h` of the target, with no correction term; convergence order is
//! measured, not assumed.  The hot loops run on a flat `Cl_2` representation
//! (four components) with fixed summation order per target.

use crate::clifford::Multivector;
use crate::error::Result;
use crate::mesh::{to_coords, CapMesh, MeshFunction};
use crate::poly::{CliffordPolynomial, DiffOp, ParavectorFactor};
use crate::scalar::{q, sphere_area, Q};
use serde::{Deserialize, Serialize};

/// `1 / omega_{n-1}` for the sphere `S^n`.
pub fn kernel_normalization(n: usize) -> f64 {
    1.0 / sphere_area((n - 1) as u32)
}

// ---------------------------------------------------------------------------
// Flat Cl_2 arithmetic: components (1, e1, e2, e12).
// ---------------------------------------------------------------------------

pub(crate) type Cl2 = [f64; 4];

#[inline]
fn mul(a: &Cl2, b: &Cl2) -> Cl2 {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] + a[2] * b[0] - a[1] * b[3] + a[3] * b[1],
        a[0] * b[3] + a[3] * b[0] + a[1] * b[2] - a[2] * b[1],
    ]
}

#[inline]
fn axpy(acc: &mut Cl2, c: f64, x: &Cl2) {
    acc[0] += c * x[0];
    acc[1] += c * x[1];
    acc[2] += c * x[2];
    acc[3] += c * x[3];
}

#[inline]
fn sub(a: &Cl2, b: &Cl2) -> Cl2 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn mv_to_cl2(v: &Multivector<f64>) -> Cl2 {
    debug_assert_eq!(v.n(), 2);
    [v.coeff(0), v.coeff(1), v.coeff(2), v.coeff(3)]
}

fn cl2_to_mv(c: &Cl2) -> Multivector<f64> {
    Multivector::from_terms(
        2,
        [(0u16, c[0]), (1u16, c[1]), (2u16, c[2]), (3u16, c[3])],
    )
}

/// Point coordinates plus weight, flattened for the inner loops.
struct FlatNodes {
    pts: Vec<[f64; 3]>,
    wgt: Vec<f64>,
    vals: Vec<Cl2>,
}

fn flatten(points: &[crate::mesh::MeshNode], f: &MeshFunction) -> FlatNodes {
    FlatNodes {
        pts: points.iter().map(|n| to_coords(&n.point)).collect(),
        wgt: points.iter().map(|n| n.weight).collect(),
        vals: f.values.iter().map(mv_to_cl2).collect(),
    }
}

#[inline]
fn cos_angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `G_s(w - v) = bar(w - v) / |w - v|^n` at `n = 2`.
pub fn cauchy_kernel(w: &Multivector<f64>, v: &Multivector<f64>) -> Multivector<f64> {
    let d = w - v;
    let nsq = d.norm_sq();
    d.bar().scale(&(1.0 / nsq))
}

/// Apply the spherical Dirac operator `D_s = w (Gamma_0 - n/2)` to an exact
/// polynomial.
pub fn ds_poly(p: &CliffordPolynomial<Q>) -> CliffordPolynomial<Q> {
    let n = p.n() as i64;
    let g = p.apply_diff_op(DiffOp::Gamma0);
    let shifted = &g - &p.scale(&q(n, 2));
    shifted.mult_paravector(ParavectorFactor::W)
}

/// `T_Omega f(w) = (1/omega_{n-1}) sum_v wgt G_s(w-v) f(v)`, nodes within
/// geodesic radius `2h` of the target excluded.
pub fn cauchy_transform_quad(
    mesh: &CapMesh,
    f: &MeshFunction,
    targets: &[Multivector<f64>],
) -> MeshFunction {
    let c = kernel_normalization(2);
    let cos_eps = (2.0 * mesh.h).cos();
    let nodes = flatten(&mesh.interior, f);
    let values = targets
        .iter()
        .map(|wmv| {
            let w = to_coords(wmv);
            let mut acc: Cl2 = [0.0; 4];
            for i in 0..nodes.pts.len() {
                let v = &nodes.pts[i];
                if cos_angle(&w, v) > cos_eps {
                    continue; // geodesic distance below the exclusion radius
                }
                let d = [w[0] - v[0], w[1] - v[1], w[2] - v[2]];
                let dsq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                let k: Cl2 = [d[0], -d[1], -d[2], 0.0];
                let kf = mul(&k, &nodes.vals[i]);
                axpy(&mut acc, nodes.wgt[i] * c / dsq, &kf);
            }
            cl2_to_mv(&acc)
        })
        .collect();
    MeshFunction { values }
}

/// `F_{dOmega} f(w) = (1/omega_{n-1}) sum_b arc G_s(w-b) n(b) f(b)`; the
/// integrand is smooth for interior targets.
///
/// The conormal entering the formula is the negative of the geometric
/// outward conormal stored on the mesh: with the kernel convention
/// `G_s(w - v)`, the reproduction identities (`F phi = phi` for monogenic
/// `phi`, and Borel-Pompeiu) hold with that orientation.  Both identities
/// are pinned by closed-form values in the tests.
pub fn boundary_transform_quad(
    mesh: &CapMesh,
    f_boundary: &MeshFunction,
    targets: &[Multivector<f64>],
) -> MeshFunction {
    let c = kernel_normalization(2);
    let values = targets
        .iter()
        .map(|wmv| {
            let w = to_coords(wmv);
            let mut acc: Cl2 = [0.0; 4];
            for (node, fv) in mesh.boundary.iter().zip(&f_boundary.values) {
                let v = to_coords(&node.point);
                let d = [w[0] - v[0], w[1] - v[1], w[2] - v[2]];
                let dsq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                let k: Cl2 = [d[0], -d[1], -d[2], 0.0];
                let nrm = mv_to_cl2(&node.conormal);
                let knf = mul(&mul(&k, &nrm), &mv_to_cl2(fv));
                axpy(&mut acc, -node.weight * c / dsq, &knf);
            }
            cl2_to_mv(&acc)
        })
        .collect();
    MeshFunction { values }
}

/// Row of a convergence study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub residual: f64,
    pub observed_order: Option<f64>,
}

/// Max Borel-Pompeiu residual `|F_dOmega f + T_Omega D_s f - f|` over the
/// given targets (all at least `3h` inside the cap).
pub fn borel_pompeiu_residual_at(
    f: &CliffordPolynomial<Q>,
    mesh: &CapMesh,
    targets: &[Multivector<f64>],
) -> f64 {
    let ff = f.to_f64();
    let dsf = ds_poly(f).to_f64();
    let f_int = MeshFunction::sample(mesh.interior.iter().map(|n| n.point.clone()), |p| {
        dsf.evaluate(p)
    });
    let f_bnd = MeshFunction::sample(mesh.boundary.iter().map(|n| n.point.clone()), |p| {
        ff.evaluate(p)
    });
    let t_part = cauchy_transform_quad(mesh, &f_int, targets);
    let b_part = boundary_transform_quad(mesh, &f_bnd, targets);
    let mut worst = 0.0f64;
    for ((w, t), b) in targets.iter().zip(&t_part.values).zip(&b_part.values) {
        let err = (&(t + b) - &ff.evaluate(w)).norm();
        worst = worst.max(err);
    }
    worst
}

/// Residual over the mesh's own interior targets with margin `3h`.
pub fn borel_pompeiu_residual(f: &CliffordPolynomial<Q>, mesh: &CapMesh) -> f64 {
    let targets = mesh.interior_targets(3.0 * mesh.h);
    borel_pompeiu_residual_at(f, mesh, &targets)
}

/// Borel-Pompeiu convergence ladder over mesh spacings.
///
/// A fixed target set (interior points with margin `3 max(h)`) is used for
/// every row so the measured order is not polluted by target-set changes.
pub fn borel_pompeiu_study(
    f: &CliffordPolynomial<Q>,
    axis: [f64; 3],
    theta_c: f64,
    spacings: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    let h_max = spacings.iter().cloned().fold(0.0f64, f64::max);
    let coarse = CapMesh::build(axis, theta_c, h_max.min(0.05).max(0.02))?;
    let targets = coarse.interior_targets(3.0 * h_max);
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &h in spacings {
        let mesh = CapMesh::build(axis, theta_c, h)?;
        let residual = borel_pompeiu_residual_at(f, &mesh, &targets);
        let observed_order = rows.last().map(|prev: &ConvergenceRow| {
            (prev.residual / residual).ln() / (prev.h / h).ln()
        });
        rows.push(ConvergenceRow {
            h,
            residual,
            observed_order,
        });
    }
    Ok(rows)
}

/// Evaluation scheme for the explicit `Pi_{s,0}` expression.
///
/// The kernel pair is a genuinely singular (Calderon-Zygmund) system: its
/// angular average cancels between the two kernels, so the principal value
/// exists, but a plain excluded-node sum does not converge to it on an
/// unsymmetric mesh.  `Stabilized` evaluates the same principal value
/// through the constant mode, whose image `Pi_{s,0} 1 = -2 w_0 bar(w)` is
/// known in closed form on the whole sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiQuadScheme {
    /// Plain excluded-node sum with the pointwise term `((1-n)/n) f(w)`.
    Stated,
    /// Plain sum with the tangentially projected jump
    /// `((1-n) - wbar^2)/n f(w)`.
    JumpCorrected,
    /// Whole-sphere principal-value form
    /// `sum K (f(v) - f(w)) + (Pi 1)(w) f(w)`.
    Stabilized,
}

/// `(Pi_{s,0} 1)(w) = -2 w_0 bar(w)` on the whole `S^2`.
pub fn pi_s0_of_one(w: &Multivector<f64>) -> Multivector<f64> {
    w.bar().scale(&(-2.0 * w.scalar_part()))
}

/// The summed singular kernels of the explicit expression at `n = 2` (the
/// third kernel carries the factor `1 - n/2` and vanishes here).
#[inline]
fn pi_kernel_flat(w: &[f64; 3], wbar: &Cl2, coeff1: &Cl2, v: &[f64; 3]) -> Cl2 {
    let n = 2.0f64;
    let d = [w[0] - v[0], w[1] - v[1], w[2] - v[2]];
    let dsq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let dbar: Cl2 = [d[0], -d[1], -d[2], 0.0];
    // term 1: (1 - n - wbar^2)/|w-v|^n
    let mut k: Cl2 = [0.0; 4];
    axpy(&mut k, 1.0 / dsq, coeff1);
    // term 2: n (vbar - <w,v> wbar) bar(w-v) / |w-v|^{n+2}
    let wv = cos_angle(w, v);
    let mut mixed: Cl2 = [v[0], -v[1], -v[2], 0.0];
    axpy(&mut mixed, -wv, wbar);
    let t2 = mul(&mixed, &dbar);
    axpy(&mut k, n / (dsq * dsq), &t2);
    k
}

/// Explicit singular-integral form of `Pi_{s,0}` on `S^2`.
///
/// Integrals normalized by `1/omega_{n-1}`, nodes within geodesic radius
/// `2h` of the target excluded.  `f_at_targets` supplies the pointwise term.
pub fn pi_s0_quad(
    mesh: &CapMesh,
    f: &MeshFunction,
    targets: &[Multivector<f64>],
    scheme: PiQuadScheme,
    f_at_targets: &MeshFunction,
) -> MeshFunction {
    let n = 2.0f64;
    let c = kernel_normalization(2);
    let cos_eps = (2.0 * mesh.h).cos();
    debug_assert!(
        !(scheme == PiQuadScheme::Stabilized && !mesh.boundary.is_empty()),
        "the stabilized scheme uses the whole-sphere constant mode"
    );
    let nodes = flatten(&mesh.interior, f);
    let values = targets
        .iter()
        .zip(&f_at_targets.values)
        .map(|(wmv, fw_mv)| {
            let w = to_coords(wmv);
            let fw = mv_to_cl2(fw_mv);
            let wbar: Cl2 = [w[0], -w[1], -w[2], 0.0];
            let wbar_sq = mul(&wbar, &wbar);
            let coeff1: Cl2 = [1.0 - n - wbar_sq[0], -wbar_sq[1], -wbar_sq[2], -wbar_sq[3]];
            let mut acc: Cl2 = [0.0; 4];
            for i in 0..nodes.pts.len() {
                let v = &nodes.pts[i];
                if cos_angle(&w, v) > cos_eps {
                    continue;
                }
                let k = pi_kernel_flat(&w, &wbar, &coeff1, v);
                let integrand = match scheme {
                    PiQuadScheme::Stabilized => mul(&k, &sub(&nodes.vals[i], &fw)),
                    _ => mul(&k, &nodes.vals[i]),
                };
                axpy(&mut acc, nodes.wgt[i] * c, &integrand);
            }
            let pointwise = match scheme {
                PiQuadScheme::Stated => {
                    let mut p: Cl2 = [0.0; 4];
                    axpy(&mut p, (1.0 - n) / n, &fw);
                    p
                }
                PiQuadScheme::JumpCorrected => {
                    let p = mul(&coeff1, &fw);
                    [p[0] / n, p[1] / n, p[2] / n, p[3] / n]
                }
                PiQuadScheme::Stabilized => {
                    let pi1: Cl2 = [
                        -2.0 * w[0] * w[0],
                        2.0 * w[0] * w[1],
                        2.0 * w[0] * w[2],
                        0.0,
                    ];
                    mul(&pi1, &fw)
                }
            };
            let mut total = acc;
            axpy(&mut total, 1.0, &pointwise);
            cl2_to_mv(&total)
        })
        .collect();
    MeshFunction { values }
}

/// Closed form and quadrature cross-check of the kernel mass
/// `int_{S^n} |w - v|^{-(n-1)} dv`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelMass {
    pub n: usize,
    pub theta_integral_closed: f64,
    pub full_integral_closed: f64,
    pub quadrature: Option<f64>,
}

pub fn kernel_mass(n: usize, h_for_quadrature: Option<f64>) -> Result<KernelMass> {
    let theta = crate::norms::kernel_theta_integral(n);
    let full = sphere_area((n - 1) as u32) * theta;
    let quadrature = match h_for_quadrature {
        Some(h) if n == 2 => {
            let mesh = CapMesh::whole_sphere(h)?;
            let w = [1.0, 0.0, 0.0];
            let eps = 2.0 * h;
            let cos_eps = eps.cos();
            let mut acc = 0.0;
            for node in &mesh.interior {
                let v = to_coords(&node.point);
                if cos_angle(&w, &v) > cos_eps {
                    continue;
                }
                let d = [w[0] - v[0], w[1] - v[1], w[2] - v[2]];
                acc += node.weight / (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            }
            // the excluded geodesic disk integrates in closed form:
            // int_{theta < eps} dv/|w-v| = 4 pi sin(eps/2)
            acc += 4.0 * std::f64::consts::PI * (eps / 2.0).sin();
            Some(acc)
        }
        _ => None,
    };
    Ok(KernelMass {
        n,
        theta_integral_closed: theta,
        full_integral_closed: full,
        quadrature,
    })
}

// ---------------------------------------------------------------------------
// Closed forms around the Cauchy kernel `phi = G_s(. - pole)`, used as the
// monogenic seed on caps.
// ---------------------------------------------------------------------------

/// `phi(w) = G_s(w - pole)`.
pub fn cauchy_kernel_value(w: &Multivector<f64>, pole: &Multivector<f64>) -> Multivector<f64> {
    cauchy_kernel(w, pole)
}

/// `(DsBar + wbar) phi` for `phi = G_s(. - pole)` on `S^2`, in closed form.
pub fn ds_bar_plus_wbar_of_kernel(
    w: &Multivector<f64>,
    pole: &Multivector<f64>,
) -> Multivector<f64> {
    let n = 2.0f64;
    let d = w - pole;
    let rho2 = d.norm_sq();
    let dbar = d.bar();
    // D0bar phi = (1-n) rho^{-n} - n bar(d)^2 rho^{-n-2}
    let d0bar = &Multivector::scalar(2, (1.0 - n) / rho2)
        - &dbar.product(&dbar).scale(&(n / (rho2 * rho2)));
    // E_w phi = (wbar - (n/2) bar(d)) rho^{-n}
    let ew = (&w.bar() - &dbar.scale(&(n / 2.0))).scale(&(1.0 / rho2));
    // Gamma0bar phi = w D0bar phi - E_w phi
    let gbar = &w.product(&d0bar) - &ew;
    // (DsBar + wbar) phi = wbar (Gamma0bar - n/2 + 1) phi
    let phi = dbar.scale(&(1.0 / rho2));
    let inner = &gbar + &phi.scale(&(1.0 - n / 2.0));
    w.bar().product(&inner)
}

/// `DsBar phi` for the same kernel.
pub fn ds_bar_of_kernel(w: &Multivector<f64>, pole: &Multivector<f64>) -> Multivector<f64> {
    let plus = ds_bar_plus_wbar_of_kernel(w, pole);
    let phi = cauchy_kernel(w, pole);
    &plus - &w.bar().product(&phi)
}
