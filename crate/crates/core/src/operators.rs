//! Dense matrix realizations of the spherical operators on a truncated basis.
//!
//! Multiplication by the sphere variable raises polynomial degree, so every
//! degree-raising factor costs one degree of validity at the truncation
//! boundary; `degree_raise` tracks that through compositions and
//! `valid_degree` is the largest input degree on which the matrix acts
//! exactly.
//!
//! The Cauchy transform is assembled from its degree-diagonal factor,
//! `T = M_wbar (n/2 - Gamma0bar)^{-1}`, which agrees with the inverse of the
//! spherical Dirac operator on every valid degree and stays well defined
//! under truncation (the raw truncated Dirac matrix is singular: its
//! top-degree monogenic columns leave the space).

use crate::basis::BasisDescriptor;
use crate::error::{CoreError, Result};
use crate::poly::{DiffOp, ParavectorFactor};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorTag {
    Gamma0,
    Gamma0Bar,
    /// Left multiplication by the sphere variable `w`.
    W,
    /// Left multiplication by `bar(w)`.
    WBar,
    Ds,
    DsBar,
    T,
    TBar,
    Pi0,
    Pi1,
    PiPlus,
    /// Spherical Laplacian assembled by composition `DsBar (Ds + W)`.
    DeltaS,
    /// Spherical Laplacian as the angular quadratic
    /// `-Gamma0^2 + (n-1) Gamma0 - (n^2/4 - n/2)`.
    DeltaSGamma,
}

impl OperatorTag {
    pub fn name(self) -> &'static str {
        match self {
            OperatorTag::Gamma0 => "gamma0",
            OperatorTag::Gamma0Bar => "gamma0_bar",
            OperatorTag::W => "w",
            OperatorTag::WBar => "w_bar",
            OperatorTag::Ds => "ds",
            OperatorTag::DsBar => "ds_bar",
            OperatorTag::T => "t",
            OperatorTag::TBar => "t_bar",
            OperatorTag::Pi0 => "pi_s0",
            OperatorTag::Pi1 => "pi_s1",
            OperatorTag::PiPlus => "pi_s_plus",
            OperatorTag::DeltaS => "delta_s",
            OperatorTag::DeltaSGamma => "delta_s_gamma",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let tag = match s {
            "gamma0" => OperatorTag::Gamma0,
            "gamma0_bar" | "gamma0-bar" => OperatorTag::Gamma0Bar,
            "w" => OperatorTag::W,
            "w_bar" | "w-bar" => OperatorTag::WBar,
            "ds" => OperatorTag::Ds,
            "ds_bar" | "ds-bar" => OperatorTag::DsBar,
            "t" => OperatorTag::T,
            "t_bar" | "t-bar" => OperatorTag::TBar,
            "pi_s0" | "pi0" => OperatorTag::Pi0,
            "pi_s1" | "pi1" => OperatorTag::Pi1,
            "pi_s_plus" | "pi-plus" => OperatorTag::PiPlus,
            "delta_s" | "delta-s" => OperatorTag::DeltaS,
            "delta_s_gamma" | "delta-s-gamma" => OperatorTag::DeltaSGamma,
            _ => return None,
        };
        Some(tag)
    }
}

/// Dense operator on the truncated basis (domain and codomain coincide).
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub tag: OperatorTag,
    pub matrix: DMatrix<f64>,
    /// Number of top degrees on which the matrix is inexact.
    pub degree_raise: usize,
    pub trunc: usize,
}

impl OperatorMatrix {
    /// Largest input degree on which the action is exact.
    pub fn valid_degree(&self) -> usize {
        self.trunc.saturating_sub(self.degree_raise)
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// Compose `self . other` (apply `other` first).
    pub fn compose(&self, other: &OperatorMatrix, tag: OperatorTag) -> Result<OperatorMatrix> {
        if self.matrix.ncols() != other.matrix.nrows() {
            return Err(CoreError::Incompatible(format!(
                "{} . {}: {}x{} vs {}x{}",
                self.tag.name(),
                other.tag.name(),
                self.matrix.nrows(),
                self.matrix.ncols(),
                other.matrix.nrows(),
                other.matrix.ncols()
            )));
        }
        Ok(OperatorMatrix {
            tag,
            matrix: &self.matrix * &other.matrix,
            degree_raise: self.degree_raise + other.degree_raise,
            trunc: self.trunc,
        })
    }
}

/// Operator factory over a fixed basis, with caching.
pub struct OperatorEngine {
    basis: Arc<BasisDescriptor>,
    cache: Mutex<BTreeMap<OperatorTag, Arc<OperatorMatrix>>>,
}

impl OperatorEngine {
    pub fn new(n: usize, trunc: usize) -> Result<Self> {
        let basis = Arc::new(BasisDescriptor::build(n, trunc)?);
        Ok(Self::over(basis))
    }

    pub fn over(basis: Arc<BasisDescriptor>) -> Self {
        Self {
            basis,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    pub fn trunc(&self) -> usize {
        self.basis.trunc
    }

    pub fn basis(&self) -> &BasisDescriptor {
        &self.basis
    }

    pub fn basis_arc(&self) -> Arc<BasisDescriptor> {
        Arc::clone(&self.basis)
    }

    /// Assemble (or fetch) the matrix for `tag`.
    pub fn operator(&self, tag: OperatorTag) -> Result<Arc<OperatorMatrix>> {
        if let Some(m) = self.cache.lock().unwrap().get(&tag) {
            return Ok(Arc::clone(m));
        }
        let built = Arc::new(self.build(tag)?);
        self.cache
            .lock()
            .unwrap()
            .insert(tag, Arc::clone(&built));
        Ok(built)
    }

    fn build(&self, tag: OperatorTag) -> Result<OperatorMatrix> {
        let n = self.n();
        let half_n = n as f64 / 2.0;
        match tag {
            OperatorTag::Gamma0 => self.assemble_exact(tag, 0, |p| p.apply_diff_op(DiffOp::Gamma0)),
            OperatorTag::Gamma0Bar => {
                self.assemble_exact(tag, 0, |p| p.apply_diff_op(DiffOp::Gamma0Bar))
            }
            OperatorTag::W => {
                self.assemble_exact(tag, 1, |p| p.mult_paravector(ParavectorFactor::W))
            }
            OperatorTag::WBar => {
                self.assemble_exact(tag, 1, |p| p.mult_paravector(ParavectorFactor::WBar))
            }
            OperatorTag::Ds => {
                let w = self.operator(OperatorTag::W)?;
                let g = self.operator(OperatorTag::Gamma0)?;
                let shifted = shift_diag(&g.matrix, -half_n);
                Ok(OperatorMatrix {
                    tag,
                    matrix: &w.matrix * shifted,
                    degree_raise: 1,
                    trunc: self.trunc(),
                })
            }
            OperatorTag::DsBar => {
                let w = self.operator(OperatorTag::WBar)?;
                let g = self.operator(OperatorTag::Gamma0Bar)?;
                let shifted = shift_diag(&g.matrix, -half_n);
                Ok(OperatorMatrix {
                    tag,
                    matrix: &w.matrix * shifted,
                    degree_raise: 1,
                    trunc: self.trunc(),
                })
            }
            OperatorTag::T => {
                // T = WBar (n/2 - Gamma0Bar)^{-1}
                let w = self.operator(OperatorTag::WBar)?;
                let g = self.operator(OperatorTag::Gamma0Bar)?;
                let factor = try_invert(tag, &shift_diag(&(-&g.matrix), half_n))?;
                Ok(OperatorMatrix {
                    tag,
                    matrix: &w.matrix * factor,
                    degree_raise: 1,
                    trunc: self.trunc(),
                })
            }
            OperatorTag::TBar => {
                let w = self.operator(OperatorTag::W)?;
                let g = self.operator(OperatorTag::Gamma0)?;
                let factor = try_invert(tag, &shift_diag(&(-&g.matrix), half_n))?;
                Ok(OperatorMatrix {
                    tag,
                    matrix: &w.matrix * factor,
                    degree_raise: 1,
                    trunc: self.trunc(),
                })
            }
            OperatorTag::Pi0 => {
                let dsbar = self.operator(OperatorTag::DsBar)?;
                let wbar = self.operator(OperatorTag::WBar)?;
                let t = self.operator(OperatorTag::T)?;
                Ok(OperatorMatrix {
                    tag,
                    matrix: (&dsbar.matrix + &wbar.matrix) * &t.matrix,
                    degree_raise: 2,
                    trunc: self.trunc(),
                })
            }
            OperatorTag::Pi1 => {
                let dsbar = self.operator(OperatorTag::DsBar)?;
                let t = self.operator(OperatorTag::T)?;
                dsbar.compose(&t, tag)
            }
            OperatorTag::PiPlus => {
                // (Ds - W)^{-1} DsBar = (Gamma0 - n/2 - 1)^{-1} WBar DsBar
                let g = self.operator(OperatorTag::Gamma0)?;
                let wbar = self.operator(OperatorTag::WBar)?;
                let dsbar = self.operator(OperatorTag::DsBar)?;
                let factor = try_invert(tag, &shift_diag(&g.matrix, -half_n - 1.0))?;
                Ok(OperatorMatrix {
                    tag,
                    matrix: factor * &wbar.matrix * &dsbar.matrix,
                    degree_raise: 2,
                    trunc: self.trunc(),
                })
            }
            OperatorTag::DeltaS => {
                let dsbar = self.operator(OperatorTag::DsBar)?;
                let ds = self.operator(OperatorTag::Ds)?;
                let w = self.operator(OperatorTag::W)?;
                Ok(OperatorMatrix {
                    tag,
                    matrix: &dsbar.matrix * (&ds.matrix + &w.matrix),
                    degree_raise: 2,
                    trunc: self.trunc(),
                })
            }
            OperatorTag::DeltaSGamma => {
                let g = self.operator(OperatorTag::Gamma0)?;
                let nn = n as f64;
                let c = nn * nn / 4.0 - nn / 2.0;
                let m = -(&g.matrix * &g.matrix) + (nn - 1.0) * &g.matrix
                    - DMatrix::identity(self.basis.dim(), self.basis.dim()).scale(c);
                Ok(OperatorMatrix {
                    tag,
                    matrix: m,
                    degree_raise: 0,
                    trunc: self.trunc(),
                })
            }
        }
    }

    /// Engine over the same basis truncated to a smaller degree; the exactly
    /// assembled primitive operators restrict by slicing (their action is
    /// degree-local), compositions are rebuilt lazily.
    pub fn restricted(&self, trunc: usize) -> Result<OperatorEngine> {
        assert!(trunc <= self.trunc());
        let basis = Arc::new(self.basis.restrict(trunc));
        let dim = basis.dim();
        let engine = OperatorEngine::over(basis);
        for tag in [
            OperatorTag::Gamma0,
            OperatorTag::Gamma0Bar,
            OperatorTag::W,
            OperatorTag::WBar,
        ] {
            let full = self.operator(tag)?;
            let sliced = OperatorMatrix {
                tag,
                matrix: full.matrix.view((0, 0), (dim, dim)).into(),
                degree_raise: full.degree_raise,
                trunc,
            };
            engine.cache.lock().unwrap().insert(tag, Arc::new(sliced));
        }
        Ok(engine)
    }

    /// Assemble a matrix column-by-column from the exact polynomial action.
    fn assemble_exact(
        &self,
        tag: OperatorTag,
        degree_raise: usize,
        action: impl Fn(&crate::poly::CliffordPolynomial<crate::scalar::Q>) -> crate::poly::CliffordPolynomial<crate::scalar::Q>,
    ) -> Result<OperatorMatrix> {
        let dim = self.basis.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (j, el) in self.basis.elements.iter().enumerate() {
            let out = action(&el.poly);
            if out.is_zero() {
                continue;
            }
            let exp = self.basis.expand_exact(&out)?;
            m.set_column(j, &exp.coords);
        }
        Ok(OperatorMatrix {
            tag,
            matrix: m,
            degree_raise,
            trunc: self.trunc(),
        })
    }

    /// Columns of `op` restricted to basis elements of degree at most `max_degree`.
    pub fn restrict_columns(&self, m: &DMatrix<f64>, max_degree: usize) -> DMatrix<f64> {
        let idx = self.basis.indices_up_to_degree(max_degree);
        let mut out = DMatrix::zeros(m.nrows(), idx.len());
        for (c, &j) in idx.iter().enumerate() {
            out.set_column(c, &m.column(j));
        }
        out
    }
}

fn shift_diag(m: &DMatrix<f64>, shift: f64) -> DMatrix<f64> {
    let mut out = m.clone();
    for i in 0..out.nrows().min(out.ncols()) {
        out[(i, i)] += shift;
    }
    out
}

/// Invert with an explicit singularity check (smallest singular value).
fn try_invert(tag: OperatorTag, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > smax * 1e-12) {
        return Err(CoreError::Singular {
            tag: tag.name().into(),
            cond: if smin > 0.0 { smax / smin } else { f64::INFINITY },
            detail: "degree-diagonal factor has a vanishing eigenvalue".into(),
        });
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| CoreError::Singular {
            tag: tag.name().into(),
            cond: smax / smin,
            detail: "inversion failed".into(),
        })
}
