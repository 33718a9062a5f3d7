//! The GNS construction and the central-projection split of functionals.
//!
//! The quotient Hilbert space is built from the eigendecomposition of the
//! Gram matrix of the state: eigenvectors above the relative threshold
//! `tol * lambda_max` become the quotient basis, scaled so that the basis
//! is orthonormal. Representation matrices realize left multiplication in
//! quotient coordinates.

use num_complex::Complex64;

use crate::algebra::{Functional, StarAlgebra, State};
use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, CVector};

/// Gram matrix `G_ij = rho(b_j* b_i)` (row index = left argument of the
/// GNS inner product).
pub fn gram_matrix(algebra: &StarAlgebra, state: &State, tol: f64) -> Result<CMatrix> {
    if state.functional.ambient_dim != algebra.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: algebra.ambient_dim,
            found: state.functional.ambient_dim,
        });
    }
    let k = algebra.span_dim();
    let mut gram = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let prod = algebra.basis[j].adjoint() * &algebra.basis[i];
            gram[(i, j)] = state.evaluate(&prod)?;
        }
    }
    let herm = matrix::hermiticity_residual(&gram);
    if herm > tol * matrix::max_abs(&gram).max(1.0) {
        return Err(Error::NotHermitian { residual: herm });
    }
    Ok(gram)
}

/// A GNS representation of `source` induced by `state`.
#[derive(Debug, Clone)]
pub struct GnsRepresentation {
    pub source: StarAlgebra,
    pub state: State,
    pub quotient_dim: usize,
    pub gram: CMatrix,
    /// m x k map from algebra coordinates to quotient coordinates.
    pub quotient_map: CMatrix,
    /// Section of the quotient map (k x m), picking representatives.
    pub section: CMatrix,
    pub rep_matrices: Vec<CMatrix>,
    pub cyclic_vector: CVector,
}

impl GnsRepresentation {
    /// `pi(a)` for any element of the algebra span, by linearity.
    pub fn represent(&self, a: &CMatrix, tol: f64) -> Result<CMatrix> {
        let co = self.source.coords(a, tol)?;
        let m = self.quotient_dim;
        let mut out = CMatrix::zeros(m, m);
        for (rep, &z) in self.rep_matrices.iter().zip(co.iter()) {
            out += rep * z;
        }
        Ok(out)
    }

    /// `rho(a) - <pi(a) x, x>` for one sample.
    pub fn reconstruction_residual(&self, a: &CMatrix, tol: f64) -> Result<f64> {
        let pi_a = self.represent(a, tol)?;
        let lhs = self.state.evaluate(a)?;
        let rhs: Complex64 = (self.cyclic_vector.adjoint() * &pi_a * &self.cyclic_vector)[(0, 0)];
        Ok((lhs - rhs).norm())
    }
}

/// Run the GNS construction for `state` on `algebra`.
pub fn gns_construct(algebra: &StarAlgebra, state: &State, tol: f64) -> Result<GnsRepresentation> {
    let gram = gram_matrix(algebra, state, tol)?;
    let k = algebra.span_dim();

    // In coordinates, <a_c, a_d> = d^H (G^T c); eigendecompose that form.
    let form = gram.transpose();
    let (vals, vecs) = matrix::eigh(&form);
    let lambda_max = vals.first().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = (0..k).filter(|&i| vals[i] > tol * lambda_max).collect();
    let m = kept.len();

    let mut quotient_map = CMatrix::zeros(m, k);
    let mut section = CMatrix::zeros(k, m);
    for (row, &i) in kept.iter().enumerate() {
        let sqrt_l = vals[i].sqrt();
        for col in 0..k {
            quotient_map[(row, col)] = vecs[(col, i)].conj() * sqrt_l;
            section[(col, row)] = vecs[(col, i)] / sqrt_l;
        }
    }

    // left-multiplication operators in algebra coordinates
    let products: Vec<CMatrix> = {
        let mut ps = Vec::with_capacity(k * k);
        for bi in &algebra.basis {
            for bj in &algebra.basis {
                ps.push(bi * bj);
            }
        }
        ps
    };
    let product_coords = algebra.coords_many(&products, tol.max(1e-9) * 1e3)?;

    let mut rep_matrices = Vec::with_capacity(k);
    for i in 0..k {
        let mut left_mult = CMatrix::zeros(k, k);
        for j in 0..k {
            left_mult.set_column(j, &product_coords[i * k + j]);
        }
        rep_matrices.push(&quotient_map * left_mult * &section);
    }

    let identity_coords = algebra.identity_coords(tol.max(1e-9) * 1e3)?;
    let cyclic_vector = &quotient_map * identity_coords;

    Ok(GnsRepresentation {
        source: algebra.clone(),
        state: state.clone(),
        quotient_dim: m,
        gram,
        quotient_map,
        section,
        rep_matrices,
        cyclic_vector,
    })
}

/// Max reconstruction residual over the samples.
pub fn verify_reconstruction(
    rep: &GnsRepresentation,
    samples: &[CMatrix],
    tol: f64,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for a in samples {
        worst = worst.max(rep.reconstruction_residual(a, tol)?);
    }
    Ok(worst)
}

/// Result of comparing two GNS representations of the same algebra.
#[derive(Debug, Clone)]
pub enum IntertwinerOutcome {
    Equivalent {
        unitary: CMatrix,
        unitarity_residual: f64,
        intertwining_residual: f64,
    },
    /// The representations were induced by different states; the witness
    /// is a basis element on which the states disagree.
    StatesDiffer { witness_index: usize, delta: f64 },
}

/// Find the unitary with `U pi_1(a) = pi_2(a) U` and `U x_1 = x_2` (up to
/// phase), by matching the cyclic orbits.
pub fn intertwiner(
    rep1: &GnsRepresentation,
    rep2: &GnsRepresentation,
    tol: f64,
) -> Result<IntertwinerOutcome> {
    let k = rep1.source.span_dim();
    if k != rep2.source.span_dim() || rep1.source.ambient_dim != rep2.source.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: rep2.source.span_dim(),
        });
    }
    for (i, b) in rep1.source.basis.iter().enumerate() {
        let delta = (rep1.state.evaluate(b)? - rep2.state.evaluate(b)?).norm();
        if delta > tol.max(1e-9) * 1e3 {
            return Ok(IntertwinerOutcome::StatesDiffer {
                witness_index: i,
                delta,
            });
        }
    }

    let m = rep1.quotient_dim;
    let mut orbit1 = CMatrix::zeros(m, k);
    let mut orbit2 = CMatrix::zeros(m, k);
    for i in 0..k {
        orbit1.set_column(i, &(&rep1.rep_matrices[i] * &rep1.cyclic_vector));
        orbit2.set_column(i, &(&rep2.rep_matrices[i] * &rep2.cyclic_vector));
    }
    let scale = matrix::spectral_norm(&orbit1).max(1.0);
    let pinv = orbit1
        .clone()
        .svd(true, true)
        .pseudo_inverse(1e-12 * scale)
        .expect("svd requested with u and v_t");
    let mut unitary = orbit2 * pinv;

    // fix the global phase so that <U x1, x2> is real positive
    let overlap: Complex64 =
        (rep2.cyclic_vector.adjoint() * &unitary * &rep1.cyclic_vector)[(0, 0)];
    if overlap.norm() > 0.0 {
        unitary *= (overlap / overlap.norm()).conj();
    }

    let unitarity_residual =
        matrix::max_abs(&(unitary.adjoint() * &unitary - matrix::identity(m)));
    let mut intertwining_residual = 0.0_f64;
    for i in 0..k {
        let lhs = &unitary * &rep1.rep_matrices[i];
        let rhs = &rep2.rep_matrices[i] * &unitary;
        intertwining_residual = intertwining_residual.max(matrix::max_abs(&(lhs - rhs)));
    }
    Ok(IntertwinerOutcome::Equivalent {
        unitary,
        unitarity_residual,
        intertwining_residual,
    })
}

/// The central projection splitting a *-homomorphism's kernel off the
/// algebra, with the data realizing `phi(T E) = pi(T)`.
#[derive(Debug, Clone)]
pub struct CentralSplit {
    pub source: StarAlgebra,
    pub hom_images: Vec<CMatrix>,
    /// Central projection with kernel = span * (I - E).
    pub e: CMatrix,
    pub kernel_dim: usize,
    pub phi_residual: f64,
    pub phi_injective: bool,
}

/// Find the central projection E with ker(pi) = A(1-E), so that pi
/// restricted to the corner A·E is injective; the homomorphism is given
/// by its images on the basis.
pub fn kernel_central_projection(
    algebra: &StarAlgebra,
    hom_images: &[CMatrix],
    tol: f64,
) -> Result<CentralSplit> {
    let k = algebra.span_dim();
    if hom_images.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: hom_images.len(),
        });
    }
    let coord_tol = tol.max(1e-9) * 1e3;
    let apply = |co: &CVector, images: &[CMatrix]| -> CMatrix {
        let d = images[0].nrows();
        let mut out = CMatrix::zeros(d, d);
        for (h, &z) in images.iter().zip(co.iter()) {
            out += h * z;
        }
        out
    };

    // *-homomorphism laws on the basis
    let scale = hom_images
        .iter()
        .map(matrix::max_abs)
        .fold(1.0_f64, f64::max);
    for (i, bi) in algebra.basis.iter().enumerate() {
        let adj_co = algebra.coords(&bi.adjoint(), coord_tol)?;
        let lhs = apply(&adj_co, hom_images);
        let residual = matrix::max_abs(&(lhs - hom_images[i].adjoint()));
        if residual > coord_tol * scale {
            return Err(Error::NotAHomomorphism {
                law: format!("pi(b{i}*) = pi(b{i})*"),
                residual,
            });
        }
        for (j, bj) in algebra.basis.iter().enumerate() {
            let prod_co = algebra.coords(&(bi * bj), coord_tol)?;
            let lhs = apply(&prod_co, hom_images);
            let residual = matrix::max_abs(&(lhs - &hom_images[i] * &hom_images[j]));
            if residual > coord_tol * scale * scale {
                return Err(Error::NotAHomomorphism {
                    law: format!("pi(b{i} b{j}) = pi(b{i}) pi(b{j})"),
                    residual,
                });
            }
        }
    }

    // kernel of the linear extension, as coefficient vectors
    let d2 = hom_images[0].nrows() * hom_images[0].ncols();
    let mut stacked = CMatrix::zeros(d2, k);
    for (j, h) in hom_images.iter().enumerate() {
        for (t, z) in h.iter().enumerate() {
            stacked[(t, j)] = *z;
        }
    }
    let kernel_coords = matrix::null_space(&stacked, tol.max(1e-12));
    let kernel_dim = kernel_coords.ncols();

    // support projection of the kernel ideal
    let n = algebra.ambient_dim;
    let p = if kernel_dim == 0 {
        CMatrix::zeros(n, n)
    } else {
        let mut s = CMatrix::zeros(n, n);
        for j in 0..kernel_dim {
            let kmat = algebra.from_coords(&kernel_coords.column(j).into());
            s += &kmat * kmat.adjoint();
        }
        let (vals, vecs) = matrix::eigh(&s);
        let lambda_max = vals.first().copied().unwrap_or(0.0).max(0.0);
        let mut proj = CMatrix::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            if v > tol.max(1e-12) * lambda_max {
                let col = vecs.column(i);
                proj += col * col.adjoint();
            }
        }
        proj
    };
    let e = matrix::identity(n) - p;

    // phi(T E) = pi(T) on the basis
    let mut phi_residual = 0.0_f64;
    for (i, bi) in algebra.basis.iter().enumerate() {
        let co = algebra.coords(&(bi * &e), coord_tol)?;
        let image = apply(&co, hom_images);
        phi_residual = phi_residual.max(matrix::max_abs(&(image - &hom_images[i])));
    }

    // phi injective iff span*E and the image have equal dimension
    let image_rank = matrix::numerical_rank(&stacked, 1e-9);
    let mut e_stack = CMatrix::zeros(n * n, k);
    for (j, b) in algebra.basis.iter().enumerate() {
        let be = b * &e;
        for (t, z) in be.iter().enumerate() {
            e_stack[(t, j)] = *z;
        }
    }
    let span_e_rank = matrix::numerical_rank(&e_stack, 1e-9);
    let phi_injective = span_e_rank == image_rank;

    Ok(CentralSplit {
        source: algebra.clone(),
        hom_images: hom_images.to_vec(),
        e,
        kernel_dim,
        phi_residual,
        phi_injective,
    })
}

/// The compression `lambda_E(f): T -> f(T E)`, i.e. pairing `E Lambda`.
pub fn lambda_e(f: &Functional, split: &CentralSplit) -> Result<Functional> {
    if f.ambient_dim != split.source.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: split.source.ambient_dim,
            found: f.ambient_dim,
        });
    }
    Functional::new(&split.e * &f.pairing)
}

/// Finite direct sum over a state list, the desk-scale stand-in for the
/// universal representation.
#[derive(Debug)]
pub struct UniversalSum {
    pub reps: Vec<GnsRepresentation>,
    pub total_dim: usize,
}

pub fn universal_direct_sum(
    algebra: &StarAlgebra,
    states: &[State],
    tol: f64,
) -> Result<UniversalSum> {
    let reps = states
        .iter()
        .map(|s| gns_construct(algebra, s, tol))
        .collect::<Result<Vec<_>>>()?;
    let total_dim = reps.iter().map(|r| r.quotient_dim).sum();
    Ok(UniversalSum { reps, total_dim })
}

/// Block-diagonal image of basis element `i` under the direct sum.
pub fn direct_sum_block(sum: &UniversalSum, i: usize) -> CMatrix {
    let mut out = CMatrix::zeros(sum.total_dim, sum.total_dim);
    let mut offset = 0;
    for rep in &sum.reps {
        let m = rep.quotient_dim;
        out.view_mut((offset, offset), (m, m))
            .copy_from(&rep.rep_matrices[i]);
        offset += m;
    }
    out
}
