//! Latitude-band quadrature meshes on spherical caps of `S^2` and the mesh
//! function container used by the singular-integral operators.
//!
//! Nodes sit on rings of constant polar angle around the cap axis with
//! midpoint weights `sin(theta) dtheta dphi`; each ring carries a
//! deterministic golden-ratio phase offset so nodes do not align along
//! meridians.

use crate::clifford::Multivector;
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Interior quadrature node: unit paravector point and surface weight.
#[derive(Debug, Clone)]
pub struct MeshNode {
    pub point: Multivector<f64>,
    pub weight: f64,
}

/// Boundary node: point, arc weight and the outward unit conormal inside the
/// tangent plane of the sphere.
#[derive(Debug, Clone)]
pub struct BoundaryNode {
    pub point: Multivector<f64>,
    pub weight: f64,
    pub conormal: Multivector<f64>,
}

/// Quadrature mesh of a spherical cap (or the whole sphere) on `S^2`.
#[derive(Debug, Clone)]
pub struct CapMesh {
    pub axis: [f64; 3],
    pub theta_c: f64,
    pub h: f64,
    pub interior: Vec<MeshNode>,
    pub boundary: Vec<BoundaryNode>,
}

fn paravector(coords: [f64; 3]) -> Multivector<f64> {
    Multivector::paravector(2, &coords)
}

fn frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let a = axis;
    let pick = if a[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    // u = normalize(pick - (pick . a) a)
    let dot = pick[0] * a[0] + pick[1] * a[1] + pick[2] * a[2];
    let mut u = [
        pick[0] - dot * a[0],
        pick[1] - dot * a[1],
        pick[2] - dot * a[2],
    ];
    let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u = [u[0] / nu, u[1] / nu, u[2] / nu];
    let v = [
        a[1] * u[2] - a[2] * u[1],
        a[2] * u[0] - a[0] * u[2],
        a[0] * u[1] - a[1] * u[0],
    ];
    (a, u, v)
}

impl CapMesh {
    /// Build a cap mesh around `axis` with opening angle `theta_c` and target
    /// spacing `h`.
    pub fn build(axis: [f64; 3], theta_c: f64, h: f64) -> Result<Self> {
        if !(theta_c > 0.0 && theta_c < std::f64::consts::PI) {
            return Err(CoreError::Domain(format!(
                "cap opening angle {theta_c} outside (0, pi)"
            )));
        }
        Self::build_inner(axis, theta_c, h, true)
    }

    /// Whole-sphere mesh (no boundary).
    pub fn whole_sphere(h: f64) -> Result<Self> {
        Self::build_inner([1.0, 0.0, 0.0], std::f64::consts::PI, h, false)
    }

    fn build_inner(axis: [f64; 3], theta_c: f64, h: f64, with_boundary: bool) -> Result<Self> {
        if !(h > 0.0) {
            return Err(CoreError::Domain(format!("mesh spacing {h} must be positive")));
        }
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if norm < 1e-12 {
            return Err(CoreError::Domain("cap axis must be nonzero".into()));
        }
        let axis = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
        let (a, u, v) = frame(axis);
        let rings = (theta_c / h).ceil().max(1.0) as usize;
        let dtheta = theta_c / rings as f64;
        let golden = 0.618_033_988_749_894_9_f64;
        let mut interior = Vec::new();
        for j in 0..rings {
            let theta = (j as f64 + 0.5) * dtheta;
            let st = theta.sin();
            let ct = theta.cos();
            let count = ((2.0 * std::f64::consts::PI * st) / h).ceil().max(1.0) as usize;
            let dphi = 2.0 * std::f64::consts::PI / count as f64;
            let offset = (j as f64 * golden).fract();
            for i in 0..count {
                let phi = (i as f64 + offset) * dphi;
                let (cp, sp) = (phi.cos(), phi.sin());
                let p = [
                    ct * a[0] + st * (cp * u[0] + sp * v[0]),
                    ct * a[1] + st * (cp * u[1] + sp * v[1]),
                    ct * a[2] + st * (cp * u[2] + sp * v[2]),
                ];
                interior.push(MeshNode {
                    point: paravector(p),
                    weight: st * dtheta * dphi,
                });
            }
        }
        let mut boundary = Vec::new();
        if with_boundary {
            let st = theta_c.sin();
            let ct = theta_c.cos();
            let count = ((2.0 * std::f64::consts::PI * st) / h).ceil().max(8.0) as usize;
            let dphi = 2.0 * std::f64::consts::PI / count as f64;
            let arc_w = 2.0 * std::f64::consts::PI * st / count as f64;
            for i in 0..count {
                let phi = (i as f64 + 0.5) * dphi;
                let (cp, sp) = (phi.cos(), phi.sin());
                let p = [
                    ct * a[0] + st * (cp * u[0] + sp * v[0]),
                    ct * a[1] + st * (cp * u[1] + sp * v[1]),
                    ct * a[2] + st * (cp * u[2] + sp * v[2]),
                ];
                // d/dtheta direction: outward within the tangent plane
                let c = [
                    -st * a[0] + ct * (cp * u[0] + sp * v[0]),
                    -st * a[1] + ct * (cp * u[1] + sp * v[1]),
                    -st * a[2] + ct * (cp * u[2] + sp * v[2]),
                ];
                boundary.push(BoundaryNode {
                    point: paravector(p),
                    weight: arc_w,
                    conormal: paravector(c),
                });
            }
        }
        Ok(Self {
            axis,
            theta_c,
            h,
            interior,
            boundary,
        })
    }

    pub fn area(&self) -> f64 {
        self.interior.iter().map(|n| n.weight).sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary.iter().map(|n| n.weight).sum()
    }

    pub fn exact_area(&self) -> f64 {
        2.0 * std::f64::consts::PI * (1.0 - self.theta_c.cos())
    }

    pub fn exact_boundary_length(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.theta_c.sin()
    }

    /// Geodesic distance of a point to the cap boundary circle.
    pub fn distance_to_boundary(&self, p: &Multivector<f64>) -> f64 {
        let d = dot3(&to_coords(p), &self.axis).clamp(-1.0, 1.0);
        (self.theta_c - d.acos()).abs()
    }

    /// Interior nodes at geodesic distance at least `margin` from the boundary.
    pub fn interior_targets(&self, margin: f64) -> Vec<Multivector<f64>> {
        self.interior
            .iter()
            .filter(|n| self.distance_to_boundary(&n.point) >= margin)
            .map(|n| n.point.clone())
            .collect()
    }
}

pub fn to_coords(p: &Multivector<f64>) -> [f64; 3] {
    [p.scalar_part(), p.coeff(1), p.coeff(2)]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Geodesic distance between unit paravector points.
pub fn geodesic(a: &Multivector<f64>, b: &Multivector<f64>) -> f64 {
    dot3(&to_coords(a), &to_coords(b)).clamp(-1.0, 1.0).acos()
}

/// Values of a `Cl_2`-valued function at mesh nodes.
#[derive(Debug, Clone)]
pub struct MeshFunction {
    pub values: Vec<Multivector<f64>>,
}

impl MeshFunction {
    pub fn zeros(n_points: usize) -> Self {
        Self {
            values: vec![Multivector::zero(2); n_points],
        }
    }

    pub fn sample(points: impl Iterator<Item = Multivector<f64>>, f: impl Fn(&Multivector<f64>) -> Multivector<f64>) -> Self {
        Self {
            values: points.map(|p| f(&p)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|a| a.scale(&c)).collect(),
        }
    }

    /// Pointwise left multiplication by values of another function.
    pub fn mul_pointwise(&self, other: &Self) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.product(b))
                .collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete `L^p` norm with the mesh weights.
    pub fn lp_norm(&self, mesh: &CapMesh, p: f64) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(&mesh.interior)
            .map(|(v, node)| v.norm().powf(p) * node.weight)
            .sum();
        s.powf(1.0 / p)
    }
}

// JSON forms for meshes and mesh functions (values aligned with interior
// nodes).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFunctionJson {
    pub values: Vec<crate::clifford::MvJson>,
}

impl MeshFunction {
    pub fn to_json(&self) -> MeshFunctionJson {
        MeshFunctionJson {
            values: self.values.iter().map(|v| v.to_json()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapMeshJson {
    pub axis: [f64; 3],
    pub theta_c: f64,
    pub h: f64,
    /// Interior nodes as `[x0, x1, x2, weight]` rows.
    pub interior: Vec<[f64; 4]>,
    /// Boundary nodes as `[x0, x1, x2, weight, n0, n1, n2]` rows.
    pub boundary: Vec<[f64; 7]>,
}

impl CapMesh {
    pub fn to_json(&self) -> CapMeshJson {
        CapMeshJson {
            axis: self.axis,
            theta_c: self.theta_c,
            h: self.h,
            interior: self
                .interior
                .iter()
                .map(|n| {
                    let p = to_coords(&n.point);
                    [p[0], p[1], p[2], n.weight]
                })
                .collect(),
            boundary: self
                .boundary
                .iter()
                .map(|b| {
                    let p = to_coords(&b.point);
                    let c = to_coords(&b.conormal);
                    [p[0], p[1], p[2], b.weight, c[0], c[1], c[2]]
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_area_and_length_converge() {
        // theta_c = pi/3: area pi, boundary length pi sqrt(3)
        let axis = [1.0, 0.0, 0.0];
        let t = std::f64::consts::PI / 3.0;
        let coarse = CapMesh::build(axis, t, 0.08).unwrap();
        let fine = CapMesh::build(axis, t, 0.02).unwrap();
        let exact_area = std::f64::consts::PI;
        let exact_len = std::f64::consts::PI * 3.0f64.sqrt();
        assert!((fine.area() - exact_area).abs() < 1e-3);
        assert!((fine.boundary_length() - exact_len).abs() < 1e-3);
        let e_coarse = (coarse.area() - exact_area).abs();
        let e_fine = (fine.area() - exact_area).abs();
        assert!(e_fine * 2.0 <= e_coarse + 1e-12, "{e_coarse} vs {e_fine}");
    }

    #[test]
    fn degenerate_angle_rejected() {
        assert!(CapMesh::build([1.0, 0.0, 0.0], 0.0, 0.1).is_err());
        assert!(CapMesh::build([1.0, 0.0, 0.0], 4.0, 0.1).is_err());
    }

    #[test]
    fn whole_sphere_area() {
        let m = CapMesh::whole_sphere(0.05).unwrap();
        assert!(m.boundary.is_empty());
        assert!((m.area() - 4.0 * std::f64::consts::PI).abs() < 2e-3);
    }

    #[test]
    fn boundary_conormal_is_tangent_unit() {
        let m = CapMesh::build([0.0, 0.0, 1.0], 1.0, 0.1).unwrap();
        for b in &m.boundary {
            let p = to_coords(&b.point);
            let c = to_coords(&b.conormal);
            let dot = p[0] * c[0] + p[1] * c[1] + p[2] * c[2];
            assert!(dot.abs() < 1e-12);
            let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nodes_are_unit_points() {
        let m = CapMesh::build([0.5, 0.5, 0.7071], 0.8, 0.1).unwrap();
        for node in &m.interior {
            assert!((node.point.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mesh_json_shape() {
        let m = CapMesh::build([1.0, 0.0, 0.0], 0.7, 0.2).unwrap();
        let j = m.to_json();
        assert_eq!(j.interior.len(), m.interior.len());
        assert_eq!(j.boundary.len(), m.boundary.len());
        let s = serde_json::to_string(&j).unwrap();
        let back: CapMeshJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.interior.len(), j.interior.len());
    }
}
