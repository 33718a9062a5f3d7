//! Matrix *-algebras, linear functionals, states, and worlds.
//!
//! An algebra is stored as a Hilbert-Schmidt orthonormal basis of a unital
//! self-adjoint subalgebra of the ambient matrix algebra. Functionals use
//! the trace pairing `f(a) = tr(Lambda a)`, which is lossless in finite
//! dimension.

use num_complex::Complex64;

use crate::error::{Error, Result, StateRejection};
use crate::matrix::{self, c, CMatrix, CVector};

/// Pauli X, Y, Z in the computational basis.
pub fn pauli() -> [CMatrix; 3] {
    let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let y = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let z = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    [x, y, z]
}

/// A unital self-adjoint matrix algebra given by an HS-orthonormal basis.
#[derive(Debug, Clone)]
pub struct StarAlgebra {
    pub ambient_dim: usize,
    pub basis: Vec<CMatrix>,
}

impl StarAlgebra {
    /// The full matrix algebra on dimension `n`, in matrix-unit order
    /// (row-major E_kl, HS-orthonormal as given).
    pub fn full(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                let mut e = CMatrix::zeros(n, n);
                e[(k, l)] = c(1.0, 0.0);
                basis.push(e);
            }
        }
        StarAlgebra {
            ambient_dim: n,
            basis,
        }
    }

    /// The diagonal (abelian) algebra on dimension `n`.
    pub fn diagonal(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(k, k)] = c(1.0, 0.0);
            basis.push(e);
        }
        StarAlgebra {
            ambient_dim: n,
            basis,
        }
    }

    /// The scalar algebra `C * 1` on dimension `n`, basis `{1}`.
    pub fn scalars(n: usize) -> Self {
        StarAlgebra {
            ambient_dim: n,
            basis: vec![matrix::identity(n)],
        }
    }

    pub fn span_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.span_dim() == self.ambient_dim * self.ambient_dim
    }

    /// Stacked vectorized basis, one column per basis element.
    pub fn basis_stack(&self) -> CMatrix {
        let n2 = self.ambient_dim * self.ambient_dim;
        let mut stack = CMatrix::zeros(n2, self.basis.len());
        for (j, b) in self.basis.iter().enumerate() {
            for (t, z) in b.iter().enumerate() {
                stack[(t, j)] = *z;
            }
        }
        stack
    }

    /// Least-squares pseudo-inverse of the basis stack; the basis is
    /// required to be linearly independent, not orthonormal.
    fn basis_pinv(&self) -> CMatrix {
        let stack = self.basis_stack();
        let scale = stack.norm().max(1.0);
        stack
            .svd(true, true)
            .pseudo_inverse(1e-13 * scale)
            .expect("svd requested with u and v_t")
    }

    /// Coordinates of `x` in the basis. Errors when `x` lies outside the
    /// span.
    pub fn coords(&self, x: &CMatrix, tol: f64) -> Result<CVector> {
        Ok(self.coords_many(std::slice::from_ref(x), tol)?.pop().unwrap())
    }

    /// Batch version of [`coords`](Self::coords); factors the basis once.
    pub fn coords_many(&self, xs: &[CMatrix], tol: f64) -> Result<Vec<CVector>> {
        let pinv = self.basis_pinv();
        let n2 = self.ambient_dim * self.ambient_dim;
        let mut out = Vec::with_capacity(xs.len());
        for x in xs {
            if x.nrows() != self.ambient_dim || x.ncols() != self.ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.ambient_dim,
                    found: x.nrows(),
                });
            }
            let v = CVector::from_iterator(n2, x.iter().copied());
            let co = &pinv * v;
            let rebuilt = self.from_coords(&co);
            let scale = x.norm().max(1.0);
            let residual = (x - rebuilt).norm() / scale;
            if residual > tol {
                return Err(Error::OutsideSpan { residual });
            }
            out.push(co);
        }
        Ok(out)
    }

    pub fn from_coords(&self, co: &CVector) -> CMatrix {
        let mut out = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for (b, &z) in self.basis.iter().zip(co.iter()) {
            out += b * z;
        }
        out
    }

    pub fn identity_coords(&self, tol: f64) -> Result<CVector> {
        self.coords(&matrix::identity(self.ambient_dim), tol)
    }
}

/// Smallest unital *-algebra containing the generators.
///
/// Adjoins the identity and adjoints, then closes under pairwise products,
/// re-orthogonalizing the span each round until its dimension stabilizes.
/// The iteration cap can never bind (span dimension strictly increases and
/// is bounded by ambient_dim^2) but guards tolerance-induced oscillation.
pub fn generate_algebra(generators: &[CMatrix], tol: f64) -> Result<StarAlgebra> {
    let n = match generators.first() {
        Some(g) => g.nrows(),
        None => return Err(Error::InvalidArgument("no generators".into())),
    };
    for g in generators {
        matrix::check_square(g)?;
        matrix::check_finite(g)?;
        if g.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.nrows(),
            });
        }
    }

    let mut basis: Vec<CMatrix> = Vec::new();
    let push = |basis: &mut Vec<CMatrix>, cand: &CMatrix| {
        let mut r = cand.clone();
        for b in basis.iter() {
            let overlap = matrix::hs_inner(b, &r);
            r -= b * overlap;
        }
        let norm = r.norm();
        if norm > tol * cand.norm().max(1.0) {
            basis.push(r / c(norm, 0.0));
            true
        } else {
            false
        }
    };

    push(&mut basis, &matrix::identity(n));
    for g in generators {
        push(&mut basis, g);
        push(&mut basis, &g.adjoint());
    }

    for _ in 0..n * n {
        let len = basis.len();
        let mut grew = false;
        for i in 0..len {
            let bi_adj = basis[i].adjoint();
            grew |= push(&mut basis, &bi_adj);
            for j in 0..len {
                let prod = &basis[i] * &basis[j];
                grew |= push(&mut basis, &prod);
            }
        }
        if !grew {
            break;
        }
    }

    Ok(StarAlgebra {
        ambient_dim: n,
        basis,
    })
}

/// HS-orthonormal basis of the center `{z in span : [z, b] = 0 for all b}`.
pub fn center(algebra: &StarAlgebra, tol: f64) -> Vec<CMatrix> {
    let k = algebra.span_dim();
    let n = algebra.ambient_dim;
    // rows: stacked vec([b_i, b_j]) over j; columns indexed by i
    let mut constraints = CMatrix::zeros(k * n * n, k);
    for (i, bi) in algebra.basis.iter().enumerate() {
        for (j, bj) in algebra.basis.iter().enumerate() {
            let comm = matrix::commutator(bi, bj);
            for (t, z) in comm.iter().enumerate() {
                constraints[(j * n * n + t, i)] = *z;
            }
        }
    }
    let ns = matrix::null_space(&constraints, tol);
    (0..ns.ncols())
        .map(|j| algebra.from_coords(&ns.column(j).into()))
        .collect()
}

/// Linear functional via the trace pairing f(a) = tr(Lambda a).
#[derive(Debug, Clone)]
pub struct Functional {
    pub ambient_dim: usize,
    pub pairing: CMatrix,
}

impl Functional {
    pub fn new(pairing: CMatrix) -> Result<Self> {
        matrix::check_square(&pairing)?;
        matrix::check_finite(&pairing)?;
        Ok(Functional {
            ambient_dim: pairing.nrows(),
            pairing,
        })
    }

    pub fn evaluate(&self, a: &CMatrix) -> Result<Complex64> {
        if a.nrows() != self.ambient_dim || a.ncols() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: a.nrows(),
            });
        }
        Ok(matrix::trace(&(&self.pairing * a)))
    }
}

/// An accepted state: a functional with positivity and normalization
/// certificates filled in.
#[derive(Debug, Clone)]
pub struct State {
    pub functional: Functional,
    /// Min eigenvalue of the Gram matrix [f(b_i* b_j)] over the algebra
    /// basis it was accepted on.
    pub positivity_certificate: f64,
    pub normalization_residual: f64,
}

impl State {
    pub fn evaluate(&self, a: &CMatrix) -> Result<Complex64> {
        self.functional.evaluate(a)
    }

    pub fn pairing(&self) -> &CMatrix {
        &self.functional.pairing
    }

    /// State from a density matrix on the full algebra.
    pub fn from_density(lambda: CMatrix) -> Result<Self> {
        let f = Functional::new(lambda)?;
        let algebra = StarAlgebra::full(f.ambient_dim);
        is_state(&f, &algebra, 1e-9)
    }
}

/// Accept `f` as a state on `algebra` iff the Gram matrix
/// `G_ij = f(b_i* b_j)` is PSD within `tol` and `|f(1) - 1| <= tol`.
pub fn is_state(f: &Functional, algebra: &StarAlgebra, tol: f64) -> Result<State> {
    if f.ambient_dim != algebra.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: algebra.ambient_dim,
            found: f.ambient_dim,
        });
    }
    let k = algebra.span_dim();
    let gram = CMatrix::from_fn(k, k, |i, j| {
        let prod = algebra.basis[i].adjoint() * &algebra.basis[j];
        matrix::trace(&(&f.pairing * prod))
    });
    // a Gram matrix far from Hermitian cannot be positive
    let herm_defect = matrix::hermiticity_residual(&gram);
    let min_eig = matrix::min_eig_hermitian(&gram) - herm_defect;
    let norm_res = (f.evaluate(&matrix::identity(f.ambient_dim))? - c(1.0, 0.0)).norm();
    if min_eig < -tol {
        return Err(Error::NotAState(StateRejection::Positivity {
            min_gram_eig: min_eig,
        }));
    }
    if norm_res > tol {
        return Err(Error::NotAState(StateRejection::Normalization {
            residual: norm_res,
        }));
    }
    Ok(State {
        functional: f.clone(),
        positivity_certificate: min_eig,
        normalization_residual: norm_res,
    })
}

/// The vector state `omega_x(T) = <T x, x>`, i.e. `Lambda = x x*`.
pub fn vector_state(x: &CVector, tol: f64) -> Result<State> {
    let norm = x.norm();
    if (norm - 1.0).abs() > tol {
        return Err(Error::NotUnitVector { norm });
    }
    let lambda = x * x.adjoint();
    State::from_density(lambda)
}

/// Purity on the full matrix algebra: numerical rank 1 of the pairing.
pub fn is_pure(state: &State, algebra: &StarAlgebra, tol: f64) -> Result<bool> {
    if !algebra.is_full() {
        return Err(Error::NotFullAlgebra);
    }
    Ok(matrix::numerical_rank(state.pairing(), tol) == 1)
}

/// One term of a four-state decomposition.
pub type WeightedState = (Complex64, State);

/// Split a functional on the full algebra into at most four states:
/// coefficients `t1, -t2, i t3, -i t4` with `t_i >= 0`, from the spectral
/// positive/negative parts of the Hermitian real and imaginary parts of
/// the pairing.
pub fn four_state_decomposition(f: &Functional) -> Result<Vec<WeightedState>> {
    let lambda = &f.pairing;
    let herm = (lambda + lambda.adjoint()) * c(0.5, 0.0);
    let skew = (lambda - lambda.adjoint()) * c(0.0, -0.5);

    let mut parts: Vec<WeightedState> = Vec::new();
    let mut split = |h: &CMatrix, pos_coeff: Complex64, neg_coeff: Complex64| -> Result<()> {
        let (vals, vecs) = matrix::eigh(h);
        let n = h.nrows();
        let mut plus = CMatrix::zeros(n, n);
        let mut minus = CMatrix::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            let col = vecs.column(i);
            let proj = col * col.adjoint();
            if v > 0.0 {
                plus += proj * c(v, 0.0);
            } else if v < 0.0 {
                minus += proj * c(-v, 0.0);
            }
        }
        for (part, coeff) in [(plus, pos_coeff), (minus, neg_coeff)] {
            let t = matrix::trace(&part).re;
            if t > 1e-14 {
                let state = State::from_density(part / c(t, 0.0))?;
                parts.push((coeff * c(t, 0.0), state));
            }
        }
        Ok(())
    };

    split(&herm, c(1.0, 0.0), c(-1.0, 0.0))?;
    split(&skew, c(0.0, 1.0), c(0.0, -1.0))?;
    Ok(parts)
}

/// Reassemble the pairing matrix of a weighted-state combination.
pub fn recombine(parts: &[WeightedState], dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim, dim);
    for (coeff, s) in parts {
        out += s.pairing() * *coeff;
    }
    out
}

/// Residual `|s(sum e_i) - sum s(e_i)|` for an orthogonal projection
/// family; finite-dimensional states are normal, so this is ~0 always.
pub fn projection_additivity_check(
    state: &State,
    projections: &[CMatrix],
    tol: f64,
) -> Result<f64> {
    for (index, e) in projections.iter().enumerate() {
        matrix::check_square(e)?;
        let idem = matrix::max_abs(&(e * e - e));
        let herm = matrix::hermiticity_residual(e);
        if idem > tol || herm > tol {
            return Err(Error::NotAProjection {
                index,
                residual: idem.max(herm),
            });
        }
        for other in projections.iter().skip(index + 1) {
            if matrix::max_abs(&(e * other)) > tol {
                return Err(Error::NotAProjection {
                    index,
                    residual: matrix::max_abs(&(e * other)),
                });
            }
        }
    }
    let n = state.functional.ambient_dim;
    let join = projections
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, e| acc + e);
    let lhs = state.evaluate(&join)?;
    let rhs: Complex64 = projections
        .iter()
        .map(|e| state.evaluate(e))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok((lhs - rhs).norm())
}

/// An orthonormal basis of the system, stored as the columns of a unitary.
#[derive(Debug, Clone)]
pub struct World {
    pub dim: usize,
    pub basis_matrix: CMatrix,
}

impl World {
    pub fn new(basis_matrix: CMatrix, tol: f64) -> Result<Self> {
        matrix::check_square(&basis_matrix)?;
        matrix::check_finite(&basis_matrix)?;
        let n = basis_matrix.nrows();
        let defect = matrix::max_abs(&(basis_matrix.adjoint() * &basis_matrix - matrix::identity(n)));
        if defect > tol {
            return Err(Error::InvalidArgument(format!(
                "world basis is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(World {
            dim: n,
            basis_matrix,
        })
    }

    pub fn standard(n: usize) -> Self {
        World {
            dim: n,
            basis_matrix: matrix::identity(n),
        }
    }

    /// Discrete-Fourier world.
    pub fn fourier(n: usize) -> Self {
        let root = std::f64::consts::TAU / n as f64;
        let scale = 1.0 / (n as f64).sqrt();
        let m = CMatrix::from_fn(n, n, |j, k| {
            let angle = root * (j as f64) * (k as f64);
            c(angle.cos() * scale, angle.sin() * scale)
        });
        World {
            dim: n,
            basis_matrix: m,
        }
    }

    /// Worlds are identified up to per-column phases.
    pub fn identified_with(&self, other: &World, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        (0..self.dim).all(|j| {
            let overlap: Complex64 = self
                .basis_matrix
                .column(j)
                .adjoint()
                .dot(&other.basis_matrix.column(j).transpose());
            (overlap.norm() - 1.0).abs() <= tol
        })
    }
}

/// Transition matrix `(j,k) -> |<e_j, e'_k>|^2`; doubly stochastic.
pub fn born_matrix(w: &World, w_prime: &World) -> Result<nalgebra::DMatrix<f64>> {
    if w.dim != w_prime.dim {
        return Err(Error::DimensionMismatch {
            expected: w.dim,
            found: w_prime.dim,
        });
    }
    let overlap = w.basis_matrix.adjoint() * &w_prime.basis_matrix;
    Ok(nalgebra::DMatrix::from_fn(w.dim, w.dim, |j, k| {
        overlap[(j, k)].norm_sqr()
    }))
}

/// Pauli expectation triple (tr(Lambda X), tr(Lambda Y), tr(Lambda Z)).
pub fn bloch_point(state: &State) -> Result<[f64; 3]> {
    if state.functional.ambient_dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.functional.ambient_dim,
        });
    }
    let [x, y, z] = pauli();
    Ok([
        state.evaluate(&x)?.re,
        state.evaluate(&y)?.re,
        state.evaluate(&z)?.re,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{diag_reals, identity, max_abs, random_density};

    #[test]
    fn generate_identity_only() {
        let a = generate_algebra(&[identity(3)], 1e-9).unwrap();
        assert_eq!(a.span_dim(), 1);
    }

    #[test]
    fn generate_diagonal_from_distinct_eigenvalues() {
        // powers of diag(1,2) span the diagonal algebra
        let a = generate_algebra(&[diag_reals(&[1.0, 2.0])], 1e-9).unwrap();
        assert_eq!(a.span_dim(), 2);
    }

    #[test]
    fn generate_full_m2_from_pauli() {
        let [x, _, z] = pauli();
        let a = generate_algebra(&[x, z], 1e-9).unwrap();
        assert_eq!(a.span_dim(), 4);
    }

    #[test]
    fn generate_is_idempotent() {
        let [x, _, z] = pauli();
        let a = generate_algebra(&[x, z], 1e-9).unwrap();
        let b = generate_algebra(&a.basis, 1e-9).unwrap();
        assert_eq!(a.span_dim(), b.span_dim());
    }

    #[test]
    fn center_of_full_m2_is_scalars() {
        let a = StarAlgebra::full(2);
        assert_eq!(center(&a, 1e-9).len(), 1);
    }

    #[test]
    fn center_of_abelian_is_everything() {
        let a = StarAlgebra::diagonal(2);
        assert_eq!(center(&a, 1e-9).len(), 2);
    }

    #[test]
    fn center_of_block_algebra() {
        // M1 + M2 embedded in dim 3: center has dimension 2
        let mut e11 = CMatrix::zeros(3, 3);
        e11[(0, 0)] = c(1.0, 0.0);
        let mut gens = vec![e11];
        for (k, l) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let mut e = CMatrix::zeros(3, 3);
            e[(k, l)] = c(1.0, 0.0);
            gens.push(e);
        }
        let a = generate_algebra(&gens, 1e-9).unwrap();
        assert_eq!(a.span_dim(), 5);
        assert_eq!(center(&a, 1e-9).len(), 2);
    }

    #[test]
    fn evaluate_examples() {
        let f = Functional::new(diag_reals(&[0.5, 0.5])).unwrap();
        let v = f.evaluate(&identity(2)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);

        let pin = Functional::new(diag_reals(&[1.0, 0.0])).unwrap();
        let v = pin.evaluate(&diag_reals(&[3.0, 7.0])).unwrap();
        assert!((v - c(3.0, 0.0)).norm() < 1e-12);

        let [x, _, _] = pauli();
        let v = f.evaluate(&x).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_a_state() {
        for n in 2..=4 {
            let f = Functional::new(identity(n) / c(n as f64, 0.0)).unwrap();
            let s = is_state(&f, &StarAlgebra::full(n), 1e-9).unwrap();
            assert!(s.positivity_certificate > -1e-9);
        }
    }

    #[test]
    fn indefinite_pairing_rejected_for_positivity() {
        let f = Functional::new(diag_reals(&[2.0, -1.0])).unwrap();
        match is_state(&f, &StarAlgebra::full(2), 1e-9) {
            Err(Error::NotAState(StateRejection::Positivity { .. })) => {}
            other => panic!("expected positivity rejection, got {other:?}"),
        }
    }

    #[test]
    fn mixed_diagonal_state_accepted_and_not_pure() {
        let f = Functional::new(diag_reals(&[0.7, 0.3])).unwrap();
        let algebra = StarAlgebra::full(2);
        let s = is_state(&f, &algebra, 1e-9).unwrap();
        assert!(!is_pure(&s, &algebra, 1e-9).unwrap());
    }

    #[test]
    fn vector_state_examples() {
        let e1 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let s = vector_state(&e1, 1e-9).unwrap();
        assert!(max_abs(&(s.pairing() - diag_reals(&[1.0, 0.0]))) < 1e-12);

        let h = 1.0 / 2.0_f64.sqrt();
        let plus = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
        let s = vector_state(&plus, 1e-9).unwrap();
        assert!(s.pairing().iter().all(|z| (z - c(0.5, 0.0)).norm() < 1e-12));
        let [_, _, z] = pauli();
        assert!(s.evaluate(&z).unwrap().norm() < 1e-12);

        let bad = CVector::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            vector_state(&bad, 1e-9),
            Err(Error::NotUnitVector { .. })
        ));
    }

    #[test]
    fn purity_examples() {
        let algebra = StarAlgebra::full(2);
        let pure = State::from_density(diag_reals(&[1.0, 0.0])).unwrap();
        assert!(is_pure(&pure, &algebra, 1e-9).unwrap());

        let mixed = State::from_density(identity(2) / c(2.0, 0.0)).unwrap();
        assert!(!is_pure(&mixed, &algebra, 1e-9).unwrap());

        let nearly = State::from_density(diag_reals(&[0.999, 0.001])).unwrap();
        assert!(!is_pure(&nearly, &algebra, 1e-6).unwrap());

        assert!(is_pure(&pure, &StarAlgebra::diagonal(2), 1e-9).is_err());
    }

    #[test]
    fn four_state_decomposition_of_a_state_is_itself() {
        let f = Functional::new(diag_reals(&[1.0, 0.0])).unwrap();
        let parts = four_state_decomposition(&f).unwrap();
        assert_eq!(parts.len(), 1);
        assert!((parts[0].0 - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn four_state_decomposition_nilpotent() {
        // Lambda = [[0,1],[0,0]]: coefficients 1/2, -1/2, i/2, -i/2
        let mut lambda = CMatrix::zeros(2, 2);
        lambda[(0, 1)] = c(1.0, 0.0);
        let f = Functional::new(lambda.clone()).unwrap();
        let parts = four_state_decomposition(&f).unwrap();
        assert_eq!(parts.len(), 4);
        let mut coeffs: Vec<Complex64> = parts.iter().map(|p| p.0).collect();
        coeffs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let expected = [c(-0.5, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.5, 0.0)];
        for (got, want) in coeffs.iter().zip(expected.iter()) {
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
        let rebuilt = recombine(&parts, 2);
        assert!(max_abs(&(rebuilt - lambda)) < 1e-12);
    }

    #[test]
    fn four_state_decomposition_negative_state() {
        let f = Functional::new(identity(2) * c(-0.5, 0.0)).unwrap();
        let parts = four_state_decomposition(&f).unwrap();
        assert_eq!(parts.len(), 1);
        assert!((parts[0].0 - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn four_state_decomposition_random_reconstruction() {
        let mut rng = crate::test_rng(11);
        for _ in 0..100 {
            let n = 2 + (rng.gen_range(0..7)) as usize; // n <= 8
            let lambda = matrix::random_complex_matrix(&mut rng, n, n);
            let f = Functional::new(lambda.clone()).unwrap();
            let parts = four_state_decomposition(&f).unwrap();
            assert!(parts.len() <= 4);
            let rebuilt = recombine(&parts, n);
            assert!(max_abs(&(rebuilt - lambda)) < 1e-10);
            for (_, s) in &parts {
                assert!(s.positivity_certificate > -1e-9);
            }
        }
    }

    #[test]
    fn projection_additivity() {
        let s = State::from_density(identity(2) / c(2.0, 0.0)).unwrap();
        let projections = vec![diag_reals(&[1.0, 0.0]), diag_reals(&[0.0, 1.0])];
        let r = projection_additivity_check(&s, &projections, 1e-9).unwrap();
        assert!(r < 1e-12);

        let e1 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let s = vector_state(&e1, 1e-9).unwrap();
        let r = projection_additivity_check(&s, &[diag_reals(&[1.0, 0.0])], 1e-9).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn projection_additivity_random() {
        let mut rng = crate::test_rng(5);
        let s = State::from_density(random_density(&mut rng, 4)).unwrap();
        let u = matrix::random_unitary(&mut rng, 4);
        let p1 = u.column(0) * u.column(0).adjoint() + u.column(1) * u.column(1).adjoint();
        let p2 = u.column(2) * u.column(2).adjoint();
        let r = projection_additivity_check(&s, &[p1, p2], 1e-9).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn projection_additivity_rejects_non_projection() {
        let s = State::from_density(identity(2) / c(2.0, 0.0)).unwrap();
        let err = projection_additivity_check(&s, &[diag_reals(&[2.0, 0.0])], 1e-9);
        assert!(matches!(err, Err(Error::NotAProjection { index: 0, .. })));
    }

    #[test]
    fn born_matrix_same_world_is_identity() {
        let w = World::standard(3);
        let b = born_matrix(&w, &w).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((b[(j, k)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn born_matrix_rotated_and_fourier() {
        let t = std::f64::consts::FRAC_PI_4;
        let rot = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(t.cos(), 0.0),
                c(-t.sin(), 0.0),
                c(t.sin(), 0.0),
                c(t.cos(), 0.0),
            ],
        );
        let b = born_matrix(&World::standard(2), &World::new(rot, 1e-9).unwrap()).unwrap();
        assert!(b.iter().all(|&v| (v - 0.5).abs() < 1e-12));

        let b = born_matrix(&World::standard(3), &World::fourier(3)).unwrap();
        assert!(b.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn born_matrix_doubly_stochastic_random() {
        let mut rng = crate::test_rng(19);
        for _ in 0..20 {
            let n = rng.gen_range(2..8);
            let w1 = World::new(matrix::random_unitary(&mut rng, n), 1e-9).unwrap();
            let w2 = World::new(matrix::random_unitary(&mut rng, n), 1e-9).unwrap();
            let b = born_matrix(&w1, &w2).unwrap();
            for j in 0..n {
                assert!((b.row(j).sum() - 1.0).abs() < 1e-10);
                assert!((b.column(j).sum() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn world_identification_up_to_phase() {
        let w = World::fourier(3);
        let mut phased = w.basis_matrix.clone();
        for i in 0..3 {
            phased[(i, 1)] *= c(0.0, 1.0);
        }
        let w2 = World::new(phased, 1e-9).unwrap();
        assert!(w.identified_with(&w2, 1e-9));
        assert!(!w.identified_with(&World::standard(3), 1e-9));
    }

    #[test]
    fn bloch_points() {
        let mixed = State::from_density(identity(2) / c(2.0, 0.0)).unwrap();
        assert_eq!(bloch_point(&mixed).unwrap(), [0.0, 0.0, 0.0]);

        let up = State::from_density(diag_reals(&[1.0, 0.0])).unwrap();
        let b = bloch_point(&up).unwrap();
        assert!((b[0]).abs() < 1e-12 && (b[1]).abs() < 1e-12 && (b[2] - 1.0).abs() < 1e-12);

        let plus = State::from_density(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        ))
        .unwrap();
        let b = bloch_point(&plus).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && b[1].abs() < 1e-12 && b[2].abs() < 1e-12);
    }

    #[test]
    fn bloch_point_is_affine() {
        let mut rng = crate::test_rng(23);
        for _ in 0..20 {
            let l1 = random_density(&mut rng, 2);
            let l2 = random_density(&mut rng, 2);
            let t = rng.gen::<f64>();
            let s1 = State::from_density(l1.clone()).unwrap();
            let s2 = State::from_density(l2.clone()).unwrap();
            let mix = State::from_density(&l1 * c(t, 0.0) + &l2 * c(1.0 - t, 0.0)).unwrap();
            let b1 = bloch_point(&s1).unwrap();
            let b2 = bloch_point(&s2).unwrap();
            let bm = bloch_point(&mix).unwrap();
            for i in 0..3 {
                assert!((bm[i] - (t * b1[i] + (1.0 - t) * b2[i])).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gram_positivity_over_span_elements() {
        let mut rng = crate::test_rng(31);
        let algebra = StarAlgebra::full(3);
        let s = State::from_density(random_density(&mut rng, 3)).unwrap();
        for _ in 0..20 {
            let a = matrix::random_complex_matrix(&mut rng, 3, 3);
            let v = s.evaluate(&(a.adjoint() * &a)).unwrap();
            assert!(v.re >= -1e-10 && v.im.abs() < 1e-10);
        }
        let _ = algebra;
    }

    #[test]
    fn convex_combination_is_not_pure() {
        let algebra = StarAlgebra::full(2);
        let l1 = diag_reals(&[1.0, 0.0]);
        let l2 = diag_reals(&[0.0, 1.0]);
        let mix = State::from_density(l1 * c(0.3, 0.0) + l2 * c(0.7, 0.0)).unwrap();
        assert!(!is_pure(&mix, &algebra, 1e-9).unwrap());
    }

    use rand::Rng;
}
