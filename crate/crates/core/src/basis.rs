//! Truncated bases of `L^2(S^n)`: harmonic degree blocks split into the
//! monogenic part `P` and its companion part `Q` by exact angular-operator
//! eigenstructure, with Gram matrices in the conjugation pairing.
//!
//! Coordinates are extracted through the Cauchy-data form of the scalar
//! harmonic basis, so expansions of harmonic polynomials need no linear
//! solves; the `P/Q` change of basis is the only float inversion involved.

use crate::clifford::{Blade, Multivector};
use crate::error::{CoreError, Result};
use crate::fischer::sphere_reduce;
use crate::integrals::{pi_factor, scalar_inner};
use crate::poly::CliffordPolynomial;
use crate::scalar::{q_to_f64, Coeff, Q};
use crate::spaces::{
    all_blades, anti_monogenic_companion_basis, monogenic_basis, monomials, scalar_harmonic_basis,
};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

type PQ = CliffordPolynomial<Q>;

/// Subspace tag of a basis element within its degree block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubspaceTag {
    /// Left-monogenic part, angular eigenvalue `-m`.
    P,
    /// Companion part `bar(x) conj(M_{m-1})`, angular eigenvalue `n + m - 1`.
    Q,
}

/// One element of the truncated basis.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub degree: usize,
    pub tag: SubspaceTag,
    pub index: usize,
    pub poly: PQ,
}

/// Truncated expansion on the sphere: harmonic components per degree.
#[derive(Debug, Clone)]
pub struct SphericalFunction {
    pub n: usize,
    pub trunc: usize,
    /// `components[m]` is the degree-`m` harmonic part (float coefficients).
    pub components: Vec<CliffordPolynomial<f64>>,
}

impl SphericalFunction {
    pub fn zero(n: usize, trunc: usize) -> Self {
        Self {
            n,
            trunc,
            components: (0..=trunc).map(|_| CliffordPolynomial::zero(n)).collect(),
        }
    }

    /// Value on the sphere: sum of all components at the given unit paravector.
    pub fn evaluate(&self, point: &Multivector<f64>) -> Multivector<f64> {
        let mut out = Multivector::zero(self.n);
        for c in &self.components {
            out = &out + &c.evaluate(point);
        }
        out
    }

    /// Plain polynomial sum of the components (the sphere representative).
    pub fn as_poly(&self) -> CliffordPolynomial<f64> {
        let mut out = CliffordPolynomial::zero(self.n);
        for c in &self.components {
            out = &out + c;
        }
        out
    }
}

#[derive(Clone)]
struct DegreeBlock {
    /// parity -> exponent-in-`x_1..x_n` -> scalar index
    beta_index: [BTreeMap<Vec<u8>, usize>; 2],
    scalar_dim: usize,
    p_dim: usize,
    q_dim: usize,
    /// Tensor coordinates -> PQ coordinates.
    w_inv: DMatrix<f64>,
    /// Gram of the PQ elements (true units, `pi` included).
    gram: DMatrix<f64>,
}

/// Truncated `P/Q`-tagged basis with Gram data.
pub struct BasisDescriptor {
    pub n: usize,
    pub trunc: usize,
    pub elements: Vec<BasisElement>,
    blocks: Vec<DegreeBlock>,
    offsets: Vec<usize>,
    dim: usize,
    gram: DMatrix<f64>,
    chol_l: DMatrix<f64>,
}

/// Result of expanding a polynomial over the basis.
pub struct Expansion {
    pub coords: DVector<f64>,
    /// `L^2` norm of components beyond the truncation degree.
    pub discarded_norm: f64,
}

impl BasisDescriptor {
    /// Build the basis for `S^n` up to harmonic degree `trunc`.
    pub fn build(n: usize, trunc: usize) -> Result<Self> {
        let mut elements = Vec::new();
        let mut blocks = Vec::new();
        let mut offsets = Vec::new();
        let pi_c = pi_factor(n);
        for m in 0..=trunc {
            offsets.push(elements.len());
            let scalar_basis = scalar_harmonic_basis(n, m);
            let scalar_dim = scalar_basis.len();
            let mut beta_index = [BTreeMap::new(), BTreeMap::new()];
            let mut idx = 0usize;
            for parity in 0..=1usize {
                if m < parity {
                    continue;
                }
                for beta in monomials(n, m - parity) {
                    beta_index[parity].insert(beta, idx);
                    idx += 1;
                }
            }
            debug_assert_eq!(idx, scalar_dim);

            let p_basis = monogenic_basis(n, m);
            let q_basis = anti_monogenic_companion_basis(n, m);
            let p_dim = p_basis.len();
            let q_dim = q_basis.len();
            let tensor_dim = scalar_dim * (1usize << n);
            if p_dim + q_dim != tensor_dim {
                return Err(CoreError::Contract(format!(
                    "degree {m}: P+Q dimension {} does not match harmonic dimension {tensor_dim}",
                    p_dim + q_dim
                )));
            }

            // scalar Gram, exact then floated with the pi factor
            let mut s = DMatrix::zeros(scalar_dim, scalar_dim);
            for i in 0..scalar_dim {
                for j in i..scalar_dim {
                    let v = q_to_f64(&scalar_inner(&scalar_basis[i], &scalar_basis[j])) * pi_c;
                    s[(i, j)] = v;
                    s[(j, i)] = v;
                }
            }

            // W: tensor coordinates of the PQ elements
            let mut w = DMatrix::zeros(tensor_dim, tensor_dim);
            let push_cols = |polys: &[PQ], col0: usize, w: &mut DMatrix<f64>| {
                for (c, p) in polys.iter().enumerate() {
                    let coords =
                        tensor_coords_exact(n, scalar_dim, &beta_index, p).expect("harmonic coords");
                    for (r, v) in coords.iter().enumerate() {
                        w[(r, col0 + c)] = q_to_f64(v);
                    }
                }
            };
            push_cols(&p_basis, 0, &mut w);
            push_cols(&q_basis, p_dim, &mut w);

            let w_inv = w
                .clone()
                .try_inverse()
                .ok_or_else(|| CoreError::Contract(format!("degree {m}: singular basis change")))?;

            // Gram of PQ elements: W^T (S (x) I) W with blade-major tensor order
            let mut sg = DMatrix::zeros(tensor_dim, tensor_dim);
            for a in 0..(1usize << n) {
                for i in 0..scalar_dim {
                    for j in 0..scalar_dim {
                        sg[(a * scalar_dim + i, a * scalar_dim + j)] = s[(i, j)];
                    }
                }
            }
            let gram = w.transpose() * &sg * &w;

            for (i, p) in p_basis.iter().enumerate() {
                elements.push(BasisElement {
                    degree: m,
                    tag: SubspaceTag::P,
                    index: i,
                    poly: p.clone(),
                });
            }
            for (i, q) in q_basis.iter().enumerate() {
                elements.push(BasisElement {
                    degree: m,
                    tag: SubspaceTag::Q,
                    index: i,
                    poly: q.clone(),
                });
            }

            blocks.push(DegreeBlock {
                beta_index,
                scalar_dim,
                p_dim,
                q_dim,
                w_inv,
                gram,
            });
        }

        let dim = elements.len();
        let mut gram = DMatrix::zeros(dim, dim);
        for (m, b) in blocks.iter().enumerate() {
            let o = offsets[m];
            let d = b.gram.nrows();
            gram.view_mut((o, o), (d, d)).copy_from(&b.gram);
        }
        let chol = nalgebra::Cholesky::new(gram.clone())
            .ok_or_else(|| CoreError::Contract("Gram matrix is not positive definite".into()))?;
        let chol_l = chol.l();

        Ok(Self {
            n,
            trunc,
            elements,
            blocks,
            offsets,
            dim,
            gram,
            chol_l,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Lower Cholesky factor of the Gram matrix.
    pub fn gram_chol(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    pub fn degree_offset(&self, m: usize) -> usize {
        self.offsets[m]
    }

    pub fn degree_dim(&self, m: usize) -> usize {
        self.blocks[m].p_dim + self.blocks[m].q_dim
    }

    pub fn p_dim(&self, m: usize) -> usize {
        self.blocks[m].p_dim
    }

    pub fn q_dim(&self, m: usize) -> usize {
        self.blocks[m].q_dim
    }

    /// Indices of all elements with degree `<= max_degree`.
    pub fn indices_up_to_degree(&self, max_degree: usize) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.degree <= max_degree)
            .map(|(i, _)| i)
            .collect()
    }

    /// `<u, v>` in the Gram geometry.
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.gram * v)[(0, 0)]
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    /// Expand an exact polynomial; sphere-reduces first.
    pub fn expand_exact(&self, p: &PQ) -> Result<Expansion> {
        let reduced = sphere_reduce(p)?;
        self.expand_components(reduced)
    }

    /// Expand a float polynomial; sphere-reduces first.
    pub fn expand_f64(&self, p: &CliffordPolynomial<f64>) -> Result<Expansion> {
        let reduced = sphere_reduce(p)?;
        self.expand_components(reduced)
    }

    fn expand_components<T: Coeff>(
        &self,
        reduced: BTreeMap<usize, CliffordPolynomial<T>>,
    ) -> Result<Expansion> {
        let mut coords = DVector::zeros(self.dim);
        let mut discarded_sq = 0.0f64;
        for (m, h) in reduced {
            if m > self.trunc {
                let hf = h.map_coeffs(|c| c.to_f64());
                discarded_sq += l2_norm_sq_f64(&hf);
                continue;
            }
            let b = &self.blocks[m];
            let tensor = tensor_coords_generic(self.n, b.scalar_dim, &b.beta_index, &h)?;
            let tensor_v = DVector::from_iterator(tensor.len(), tensor.iter().map(|c| c.to_f64()));
            let pq = &b.w_inv * tensor_v;
            let o = self.offsets[m];
            for (i, v) in pq.iter().enumerate() {
                coords[o + i] = *v;
            }
        }
        Ok(Expansion {
            coords,
            discarded_norm: discarded_sq.sqrt(),
        })
    }

    /// Rebuild the spherical function from coordinates.
    pub fn synth(&self, coords: &DVector<f64>) -> SphericalFunction {
        assert_eq!(coords.len(), self.dim);
        let mut f = SphericalFunction::zero(self.n, self.trunc);
        for (i, e) in self.elements.iter().enumerate() {
            let c = coords[i];
            if c == 0.0 {
                continue;
            }
            let pf = e.poly.to_f64();
            f.components[e.degree] = &f.components[e.degree] + &pf.map_coeffs(|mv| mv.scale(&c));
        }
        f
    }

    /// The same basis truncated to a smaller degree.
    ///
    /// Elements are degree-major, so the restriction is a leading slice; the
    /// Gram matrix is block diagonal per degree, so its Cholesky factor
    /// restricts the same way.
    pub fn restrict(&self, trunc: usize) -> Self {
        assert!(trunc <= self.trunc);
        let dim = self.offsets.get(trunc + 1).copied().unwrap_or(self.dim);
        Self {
            n: self.n,
            trunc,
            elements: self.elements[..dim].to_vec(),
            blocks: self.blocks[..=trunc].to_vec(),
            offsets: self.offsets[..=trunc].to_vec(),
            dim,
            gram: self.gram.view((0, 0), (dim, dim)).into(),
            chol_l: self.chol_l.view((0, 0), (dim, dim)).into(),
        }
    }

    /// Serialize basis polynomials and the Gram matrix (dense row-major).
    pub fn to_json(&self) -> BasisJson {
        BasisJson {
            n: self.n,
            trunc: self.trunc,
            elements: self
                .elements
                .iter()
                .map(|e| BasisElementJson {
                    degree: e.degree,
                    tag: e.tag,
                    index: e.index,
                    poly: e.poly.to_json(),
                })
                .collect(),
            gram_row_major: self.gram.transpose().as_slice().to_vec(),
        }
    }
}

/// `L^2(S^n)` norm-squared of a float polynomial (true units).
pub fn l2_norm_sq_f64(p: &CliffordPolynomial<f64>) -> f64 {
    let n = p.n();
    let mut acc = 0.0;
    for (eu, cu) in p.terms() {
        for (ev, cv) in p.terms() {
            let combined: Vec<u8> = eu.iter().zip(ev).map(|(a, b)| a + b).collect();
            if combined.iter().any(|&a| a % 2 == 1) {
                continue;
            }
            let mut dot = 0.0;
            for (blade, a) in cu.terms() {
                dot += a * cv.coeff(blade);
            }
            if dot == 0.0 {
                continue;
            }
            acc += dot * q_to_f64(&crate::integrals::monomial_integral(n, &combined));
        }
    }
    acc * pi_factor(n)
}

fn tensor_coords_exact(
    n: usize,
    scalar_dim: usize,
    beta_index: &[BTreeMap<Vec<u8>, usize>; 2],
    h: &PQ,
) -> Result<Vec<Q>> {
    tensor_coords_generic(n, scalar_dim, beta_index, h)
}

/// Coordinates of a harmonic polynomial in the tensor basis
/// (blade-major: index `A * scalar_dim + i`), read off the Cauchy data.
fn tensor_coords_generic<T: Coeff>(
    n: usize,
    scalar_dim: usize,
    beta_index: &[BTreeMap<Vec<u8>, usize>; 2],
    h: &CliffordPolynomial<T>,
) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); scalar_dim << n];
    for (expo, mv) in h.terms() {
        let parity = expo[0] as usize;
        if parity > 1 {
            continue; // higher x_0 powers are determined by the data
        }
        let beta: Vec<u8> = expo[1..=n].to_vec();
        let i = *beta_index[parity].get(&beta).ok_or_else(|| {
            CoreError::Contract(format!(
                "monomial {expo:?} outside the expected harmonic block"
            ))
        })?;
        for (blade, c) in mv.terms() {
            let a = blade as usize;
            let slot = a * scalar_dim + i;
            out[slot] = out[slot].clone() + c.clone();
        }
    }
    Ok(out)
}

/// Tensor-basis product basis `h_i e_A` for a degree block, blade-major.
pub fn tensor_basis(n: usize, m: usize) -> Vec<PQ> {
    let scalars = scalar_harmonic_basis(n, m);
    let mut out = Vec::new();
    for blade in all_blades(n) {
        let mut mv: Multivector<Q> = Multivector::zero(n);
        mv.add_term(blade as Blade, crate::scalar::qi(1));
        for h in &scalars {
            out.push(h.mul_const_right(&mv));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisElementJson {
    pub degree: usize,
    pub tag: SubspaceTag,
    pub index: usize,
    pub poly: crate::poly::PolyJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisJson {
    pub n: usize,
    pub trunc: usize,
    pub elements: Vec<BasisElementJson>,
    pub gram_row_major: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::DiffOp;
    use crate::scalar::qi;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_sizes() {
        let b = BasisDescriptor::build(2, 2).unwrap();
        // (1 + 3 + 5) * 4 = 36
        assert_eq!(b.dim(), 36);
        let b0 = BasisDescriptor::build(2, 0).unwrap();
        assert_eq!(b0.dim(), 4);
        // constants: G = 4 pi I
        let g = b0.gram();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 4.0 * std::f64::consts::PI } else { 0.0 };
                assert!((g[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_is_spd() {
        for n in [2usize, 3] {
            let b = BasisDescriptor::build(n, 3).unwrap();
            assert!(nalgebra::Cholesky::new(b.gram().clone()).is_some());
        }
    }

    #[test]
    fn cross_degree_blocks_vanish() {
        // exact orthogonality of distinct-degree harmonics
        let n = 2;
        let b = BasisDescriptor::build(n, 3).unwrap();
        for (i, ei) in b.elements.iter().enumerate() {
            for (j, ej) in b.elements.iter().enumerate() {
                if ei.degree != ej.degree {
                    let v = q_to_f64(&scalar_inner(&ei.poly, &ej.poly));
                    assert!(v.abs() < 1e-12, "cross block ({i},{j}) = {v}");
                }
            }
        }
    }

    #[test]
    fn p_and_q_blocks_are_orthogonal() {
        // distinct angular eigenvalues of a symmetric operator
        let n = 2;
        let b = BasisDescriptor::build(n, 2).unwrap();
        for m in 1..=2usize {
            let o = b.degree_offset(m);
            let pd = b.p_dim(m);
            let qd = b.q_dim(m);
            for i in 0..pd {
                for j in 0..qd {
                    let v = b.gram()[(o + i, o + pd + j)];
                    assert!(v.abs() < 1e-9, "m={m} P{i} Q{j}: {v}");
                }
            }
        }
    }

    #[test]
    fn expand_constant() {
        let b = BasisDescriptor::build(2, 2).unwrap();
        let one = PQ::one(2);
        let e = b.expand_exact(&one).unwrap();
        assert!(e.discarded_norm == 0.0);
        for (i, el) in b.elements.iter().enumerate() {
            if el.degree > 0 {
                assert!(e.coords[i].abs() < 1e-12);
            }
        }
        let back = b.synth(&e.coords);
        let pt = Multivector::paravector(2, &[0.6, 0.8, 0.0]);
        let v = back.evaluate(&pt);
        assert!((v.scalar_part() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expand_x0_squared_hits_degrees_0_and_2() {
        let b = BasisDescriptor::build(2, 3).unwrap();
        let p = &PQ::variable(2, 0) * &PQ::variable(2, 0);
        let e = b.expand_exact(&p).unwrap();
        for (i, el) in b.elements.iter().enumerate() {
            if el.degree == 1 || el.degree == 3 {
                assert!(e.coords[i].abs() < 1e-12, "degree {} leak", el.degree);
            }
        }
    }

    #[test]
    fn expand_synth_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let b = BasisDescriptor::build(2, 3).unwrap();
        let mut coords = DVector::zeros(b.dim());
        for v in coords.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let f = b.synth(&coords);
        let e = b.expand_f64(&f.as_poly()).unwrap();
        let err = (&e.coords - &coords).amax();
        assert!(err < 1e-9, "roundtrip error {err}");
    }

    #[test]
    fn truncation_reports_discarded_norm() {
        let b = BasisDescriptor::build(2, 1).unwrap();
        // degree-2 harmonic: x0 x1 (harmonic), fully discarded
        let p = &PQ::variable(2, 0) * &PQ::variable(2, 1);
        let e = b.expand_exact(&p).unwrap();
        assert!(e.discarded_norm > 0.1);
        assert!(e.coords.amax() < 1e-12);
    }

    #[test]
    fn basis_json_carries_polys_and_gram() {
        let b = BasisDescriptor::build(2, 1).unwrap();
        let j = b.to_json();
        assert_eq!(j.elements.len(), b.dim());
        assert_eq!(j.gram_row_major.len(), b.dim() * b.dim());
        // row-major: entry (0, 0) first
        assert!((j.gram_row_major[0] - b.gram()[(0, 0)]).abs() < 1e-15);
        let s = serde_json::to_string(&j).unwrap();
        let back: BasisJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.trunc, 1);
    }

    #[test]
    fn eigen_relations_exact_on_elements() {
        let b = BasisDescriptor::build(2, 3).unwrap();
        for el in &b.elements {
            let got = el.poly.apply_diff_op(DiffOp::Gamma0);
            let lambda = match el.tag {
                SubspaceTag::P => -(el.degree as i64),
                SubspaceTag::Q => 2 + el.degree as i64 - 1,
            };
            assert_eq!(got, el.poly.scale(&qi(lambda)));
        }
    }
}
