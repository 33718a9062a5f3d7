//! CPTP channels, Uhlmann fidelity, and covariant 1-to-2 cloners.
//!
//! A channel is a Kraus family; "singular" output components are modeled
//! as trace leaked past the Fock cutoff — a completely positive,
//! trace-deficient piece that contributes zero to every fidelity
//! expectation.  The decomposed fidelity scan then exhibits the affine
//! law F(c) = c * F(normal part): the optimal cloner carries no leak.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::{coherent, weyl, FockMode, PhaseSpacePoint};
use crate::matrix::{self, c, CMatrix, CVector};

/// A completely positive, trace-nonincreasing map given by Kraus
/// operators (each out_dim x in_dim).
#[derive(Debug, Clone)]
pub struct Channel {
    pub kraus: Vec<CMatrix>,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>, tol: f64) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidArgument("channel needs at least one Kraus operator".into()));
        }
        let out_dim = kraus[0].nrows();
        let in_dim = kraus[0].ncols();
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            matrix::check_finite(k)?;
            if k.nrows() != out_dim || k.ncols() != in_dim {
                return Err(Error::DimensionMismatch {
                    expected: in_dim,
                    found: k.ncols(),
                });
            }
            sum += k.adjoint() * k;
        }
        // trace-nonincreasing: sum K*K <= I + tol
        let top = matrix::eigh(&sum).0[0];
        if top > 1.0 + tol.max(1e-9) {
            return Err(Error::InvalidArgument(format!(
                "Kraus sum exceeds identity (top eigenvalue {top})"
            )));
        }
        Ok(Channel { kraus, in_dim, out_dim })
    }

    pub fn identity(dim: usize) -> Self {
        Channel {
            kraus: vec![matrix::identity(dim)],
            in_dim: dim,
            out_dim: dim,
        }
    }

    /// The scalar c with sum K*K = c I, or None when non-uniform.
    pub fn trace_character(&self, tol: f64) -> Option<f64> {
        let mut sum = CMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        let c0 = matrix::trace(&sum).re / self.in_dim as f64;
        if matrix::max_abs(&(sum - matrix::identity(self.in_dim) * c(c0, 0.0))) <= tol {
            Some(c0)
        } else {
            None
        }
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        matches!(self.trace_character(tol), Some(c0) if (c0 - 1.0).abs() <= tol)
    }

    /// Every Kraus operator scaled by sqrt(factor); leaks 1-factor of the
    /// trace when the original channel was trace-preserving.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = c(factor.max(0.0).sqrt(), 0.0);
        Channel {
            kraus: self.kraus.iter().map(|k| k * s).collect(),
            in_dim: self.in_dim,
            out_dim: self.out_dim,
        }
    }
}

/// Schrodinger picture: rho -> sum K rho K*.
pub fn apply_schrodinger(ch: &Channel, rho: &CMatrix) -> Result<CMatrix> {
    if rho.nrows() != ch.in_dim || rho.ncols() != ch.in_dim {
        return Err(Error::DimensionMismatch {
            expected: ch.in_dim,
            found: rho.nrows(),
        });
    }
    let mut out = CMatrix::zeros(ch.out_dim, ch.out_dim);
    for k in &ch.kraus {
        out += k * rho * k.adjoint();
    }
    Ok(out)
}

/// Heisenberg picture: O -> sum K* O K.
pub fn apply_heisenberg(ch: &Channel, obs: &CMatrix) -> Result<CMatrix> {
    if obs.nrows() != ch.out_dim || obs.ncols() != ch.out_dim {
        return Err(Error::DimensionMismatch {
            expected: ch.out_dim,
            found: obs.nrows(),
        });
    }
    let mut out = CMatrix::zeros(ch.in_dim, ch.in_dim);
    for k in &ch.kraus {
        out += k.adjoint() * obs * k;
    }
    Ok(out)
}

fn check_density(rho: &CMatrix, tol: f64) -> Result<()> {
    matrix::check_square(rho)?;
    matrix::check_finite(rho)?;
    let herm = matrix::hermiticity_residual(rho);
    if herm > tol {
        return Err(Error::NotHermitian { residual: herm });
    }
    let min = matrix::min_eig_hermitian(rho);
    if min < -tol {
        return Err(Error::NotPositive { min_eig: min });
    }
    Ok(())
}

/// Uhlmann fidelity (tr sqrt(sqrt(r1) r2 sqrt(r1)))^2 via Hermitian
/// eigendecompositions.
pub fn fidelity(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    let tol = 1e-9;
    check_density(rho1, tol)?;
    check_density(rho2, tol)?;
    if rho1.nrows() != rho2.nrows() {
        return Err(Error::DimensionMismatch {
            expected: rho1.nrows(),
            found: rho2.nrows(),
        });
    }
    let s1 = matrix::hermitian_sqrt(rho1);
    let inner = &s1 * rho2 * &s1;
    let (vals, _) = matrix::eigh(&inner);
    // eigenvalues at the rounding floor would otherwise contribute
    // sqrt(noise) each, which is far above noise
    let cut = vals.first().copied().unwrap_or(0.0).max(0.0) * 64.0 * f64::EPSILON;
    let root_sum: f64 = vals
        .iter()
        .filter(|&&v| v > cut)
        .map(|&v| v.sqrt())
        .sum();
    Ok(root_sum * root_sum)
}

/// tr[Phi(|alpha><alpha|) |alpha><alpha|^{x2}] for a 1-to-2 channel,
/// evaluated as sum_i |<alpha x alpha| K_i |alpha>|^2 (pure input).
pub fn joint_fidelity(ch: &Channel, alpha: &PhaseSpacePoint, mode: &FockMode) -> Result<f64> {
    let d = ch.in_dim;
    if ch.out_dim != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: ch.out_dim,
        });
    }
    if mode.cutoff != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: mode.cutoff,
        });
    }
    let input = coherent(alpha, mode);
    let pair = kron_vec(&input, &input);
    let mut f = 0.0;
    for k in &ch.kraus {
        let amp: Complex64 = pair.dotc(&(k * &input));
        f += amp.norm_sqr();
    }
    Ok(f)
}

fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// The shift cloner: Kraus K -> (W_x tensor W_x)* K W_x, implementing
/// Phi^x(rho) = (W_x^{x2})* Phi(W_x rho W_x*) W_x^{x2}.
pub fn shift_cloner(ch: &Channel, x: &PhaseSpacePoint, mode: &FockMode) -> Result<Channel> {
    let d = mode.cutoff;
    if ch.in_dim != d || ch.out_dim != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: ch.out_dim,
        });
    }
    let w = weyl(x, mode);
    let w2 = matrix::kron(&w, &w).adjoint();
    let kraus = ch.kraus.iter().map(|k| &w2 * k * &w).collect();
    Ok(Channel {
        kraus,
        in_dim: ch.in_dim,
        out_dim: ch.out_dim,
    })
}

/// Uniform twirl of the channel over the grid of shifts; the Kraus
/// families are pooled with weights 1/N.
pub fn covariantize(ch: &Channel, grid: &[PhaseSpacePoint], mode: &FockMode) -> Result<Channel> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let scale = c((grid.len() as f64).sqrt().recip(), 0.0);
    let mut kraus = Vec::with_capacity(grid.len() * ch.kraus.len());
    for x in grid {
        let shifted = shift_cloner(ch, x, mode)?;
        for k in shifted.kraus {
            kraus.push(k * scale);
        }
    }
    Ok(Channel {
        kraus,
        in_dim: ch.in_dim,
        out_dim: ch.out_dim,
    })
}

/// Max over grid x test_states of the trace-norm distance between the
/// shifted and unshifted channel outputs.
pub fn covariance_residual(
    ch: &Channel,
    grid: &[PhaseSpacePoint],
    test_states: &[CMatrix],
    mode: &FockMode,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x in grid {
        let shifted = shift_cloner(ch, x, mode)?;
        for rho in test_states {
            let a = apply_schrodinger(&shifted, rho)?;
            let b = apply_schrodinger(ch, rho)?;
            worst = worst.max(matrix::trace_norm(&(a - b)));
        }
    }
    Ok(worst)
}

/// Decomposition of a 1-to-2 cloner into a normal part on both clones
/// plus leak components, as in the component-sum picture: weights are
/// indexed by the subset of clones the component is normal on ("12",
/// "1", "2", or "" for fully singular); only the "12" component carries
/// a channel — the others are pure trace leaks at the cutoff.
#[derive(Debug, Clone)]
pub struct ClonerDecomposition {
    pub normal: Channel,
    pub weights: BTreeMap<String, f64>,
}

impl ClonerDecomposition {
    pub fn new(normal: Channel, weights: BTreeMap<String, f64>) -> Result<Self> {
        let sum: f64 = weights.values().sum();
        if weights.values().any(|&w| w < -1e-12) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::UnnormalizedWeights { sum });
        }
        Ok(ClonerDecomposition { normal, weights })
    }

    pub fn normal_weight(&self) -> f64 {
        self.weights.get("12").copied().unwrap_or(0.0)
    }

    /// The assembled trace-deficient channel: the normal part scaled by
    /// its weight; every other component leaks past the cutoff and has
    /// no Kraus realization inside it.
    pub fn assemble(&self) -> Channel {
        self.normal.scaled(self.normal_weight())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub c12: f64,
    pub worst_fidelity: f64,
}

/// Sweep the normal weight c12 over [0,1] and report the worst-case
/// joint fidelity over the alpha grid at each step.  The table is affine
/// in c12 with slope equal to the normal part's own worst-case fidelity,
/// so its argmax sits at c12 = 1: a cloner gains nothing from leak.
pub fn decomposed_fidelity_scan(
    dec: &ClonerDecomposition,
    alpha_grid: &[PhaseSpacePoint],
    mode: &FockMode,
    steps: usize,
) -> Result<Vec<ScanRow>> {
    if alpha_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if steps < 2 {
        return Err(Error::InvalidArgument("scan needs at least 2 steps".into()));
    }
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let c12 = i as f64 / (steps - 1) as f64;
        let assembled = dec.normal.scaled(c12);
        let fids: Vec<f64> = alpha_grid
            .par_iter()
            .map(|alpha| joint_fidelity(&assembled, alpha, mode))
            .collect::<Result<Vec<f64>>>()?;
        let worst = fids.into_iter().fold(f64::INFINITY, f64::min);
        rows.push(ScanRow {
            c12,
            worst_fidelity: worst,
        });
    }
    Ok(rows)
}

/// The benign reference cloner: the vacuum-ancilla isometry
/// V psi = psi x vacuum, covariantized over the given grid of shifts.
pub fn reference_cloner(mode: &FockMode, grid: &[PhaseSpacePoint]) -> Result<Channel> {
    let d = mode.cutoff;
    let vac = mode.vacuum(1);
    let mut v = CMatrix::zeros(d * d, d);
    for i in 0..d {
        for j in 0..d {
            // (e_i x vac)(row i*d + j) <- vac[j] at input column i
            v[(i * d + j, i)] = vac[j];
        }
    }
    let base = Channel::new(vec![v], 1e-9)?;
    covariantize(&base, grid, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::square_grid;
    use rand::Rng;
    use crate::matrix::{diag_reals, identity, max_abs, random_density, random_unitary};

    fn pauli_depolarizing() -> Channel {
        let half = c(0.5, 0.0);
        let mut kraus = vec![identity(2) * half];
        kraus.extend(crate::algebra::pauli().iter().map(|s| s * half));
        Channel::new(kraus, 1e-12).unwrap()
    }

    #[test]
    fn identity_channel_preserves_states() {
        let mut rng = crate::test_rng(11);
        let rho = random_density(&mut rng, 4);
        let out = apply_schrodinger(&Channel::identity(4), &rho).unwrap();
        assert!(max_abs(&(out - rho)) < 1e-15);
    }

    #[test]
    fn unitary_kraus_conjugates() {
        let mut rng = crate::test_rng(12);
        let u = random_unitary(&mut rng, 3);
        let ch = Channel::new(vec![u.clone()], 1e-12).unwrap();
        let rho = random_density(&mut rng, 3);
        let out = apply_schrodinger(&ch, &rho).unwrap();
        assert!(max_abs(&(out - &u * &rho * u.adjoint())) < 1e-13);
        let obs = random_density(&mut rng, 3);
        let back = apply_heisenberg(&ch, &obs).unwrap();
        assert!(max_abs(&(back - u.adjoint() * &obs * &u)) < 1e-13);
    }

    #[test]
    fn depolarizing_flattens_to_maximally_mixed() {
        let ch = pauli_depolarizing();
        assert!(ch.is_trace_preserving(1e-12));
        let out = apply_schrodinger(&ch, &diag_reals(&[1.0, 0.0])).unwrap();
        assert!(max_abs(&(out - identity(2) * c(0.5, 0.0))) < 1e-13);
    }

    #[test]
    fn heisenberg_is_unital_for_tp_channel() {
        let ch = pauli_depolarizing();
        let out = apply_heisenberg(&ch, &identity(2)).unwrap();
        assert!(max_abs(&(out - identity(2))) < 1e-13);
    }

    #[test]
    fn duality_holds_on_random_triples() {
        let mut rng = crate::test_rng(13);
        for _ in 0..25 {
            let dim = 2 + rng.gen_range(0..5usize);
            let kraus: Vec<CMatrix> = (0..3)
                .map(|_| matrix::random_complex_matrix(&mut rng, dim, dim))
                .collect();
            let scale = kraus
                .iter()
                .map(|k| matrix::spectral_norm(&(k.adjoint() * k)))
                .sum::<f64>()
                .sqrt();
            let kraus = kraus.into_iter().map(|k| k / c(scale, 0.0)).collect();
            let ch = Channel::new(kraus, 1e-9).unwrap();
            let rho = random_density(&mut rng, dim);
            let obs = matrix::random_complex_matrix(&mut rng, dim, dim);
            let lhs = matrix::trace(&(&rho * apply_heisenberg(&ch, &obs).unwrap()));
            let rhs = matrix::trace(&(apply_schrodinger(&ch, &rho).unwrap() * &obs));
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn fidelity_of_equal_states_is_one() {
        let mut rng = crate::test_rng(14);
        let rho = random_density(&mut rng, 5);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_of_orthogonal_pure_states_is_zero() {
        let f = fidelity(&diag_reals(&[1.0, 0.0]), &diag_reals(&[0.0, 1.0])).unwrap();
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_pure_vs_maximally_mixed() {
        let f = fidelity(&diag_reals(&[1.0, 0.0]), &(identity(2) * c(0.5, 0.0))).unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_unitarily_invariant() {
        let mut rng = crate::test_rng(15);
        let a = random_density(&mut rng, 4);
        let b = random_density(&mut rng, 4);
        let f1 = fidelity(&a, &b).unwrap();
        let f2 = fidelity(&b, &a).unwrap();
        assert!((f1 - f2).abs() < 1e-9);
        let u = random_unitary(&mut rng, 4);
        let f3 = fidelity(&(&u * &a * u.adjoint()), &(&u * &b * u.adjoint())).unwrap();
        assert!((f1 - f3).abs() < 1e-9);
        assert!(f1 > -1e-12 && f1 < 1.0 + 1e-12);
    }

    #[test]
    fn pure_state_fidelity_reduces_to_trace_overlap() {
        let mut rng = crate::test_rng(16);
        for _ in 0..10 {
            let v = matrix::random_unit_vector(&mut rng, 6);
            let pure = &v * v.adjoint();
            let mixed = random_density(&mut rng, 6);
            let f = fidelity(&pure, &mixed).unwrap();
            let reduced = matrix::trace(&(&pure * &mixed)).re;
            assert!((f - reduced).abs() < 1e-9);
        }
    }

    #[test]
    fn non_psd_input_is_rejected() {
        let bad = diag_reals(&[1.5, -0.5]);
        assert!(fidelity(&bad, &diag_reals(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn joint_fidelity_of_clamped_preparer_is_one() {
        let mode = FockMode::new(8).unwrap();
        let alpha = PhaseSpacePoint::single(0.5, -0.3);
        let input = coherent(&alpha, &mode);
        let pair = kron_vec(&input, &input);
        let k = &pair * input.adjoint();
        let ch = Channel::new(vec![k], 1e-9).unwrap();
        let f = joint_fidelity(&ch, &alpha, &mode).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    fn vacuum_ancilla(mode: &FockMode) -> Channel {
        let d = mode.cutoff;
        let vac = mode.vacuum(1);
        let mut v = CMatrix::zeros(d * d, d);
        for i in 0..d {
            for j in 0..d {
                v[(i * d + j, i)] = vac[j];
            }
        }
        Channel::new(vec![v], 1e-12).unwrap()
    }

    #[test]
    fn vacuum_ancilla_cloner_at_origin_is_perfect() {
        let mode = FockMode::new(8).unwrap();
        let ch = vacuum_ancilla(&mode);
        let f = joint_fidelity(&ch, &PhaseSpacePoint::single(0.0, 0.0), &mode).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_ancilla_fidelity_matches_overlap_series() {
        // second clone stays in vacuum, so F = |<vac|alpha>|^2 = e^{-1/2}
        let mode = FockMode::new(40).unwrap();
        let ch = vacuum_ancilla(&mode);
        let f = joint_fidelity(&ch, &PhaseSpacePoint::single(1.0, 0.0), &mode).unwrap();
        assert!((f - (-0.5_f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn shift_by_zero_is_identity_operation() {
        let mode = FockMode::new(6).unwrap();
        let ch = vacuum_ancilla(&mode);
        let shifted = shift_cloner(&ch, &PhaseSpacePoint::single(0.0, 0.0), &mode).unwrap();
        for (a, b) in ch.kraus.iter().zip(&shifted.kraus) {
            assert!(max_abs(&(a - b)) < 1e-12);
        }
    }

    #[test]
    fn shift_and_unshift_cancel_on_test_states() {
        let mode = FockMode::new(24).unwrap();
        let ch = vacuum_ancilla(&mode);
        let x = PhaseSpacePoint::single(0.4, 0.2);
        let there = shift_cloner(&ch, &x, &mode).unwrap();
        let back = shift_cloner(&there, &x.negate(), &mode).unwrap();
        for alpha in [(0.0, 0.0), (0.3, -0.2)] {
            let v = coherent(&PhaseSpacePoint::single(alpha.0, alpha.1), &mode);
            let rho = &v * v.adjoint();
            let a = apply_schrodinger(&back, &rho).unwrap();
            let b = apply_schrodinger(&ch, &rho).unwrap();
            assert!(matrix::trace_norm(&(a - b)) < 1e-9);
        }
    }

    #[test]
    fn covariantize_on_origin_grid_is_identity() {
        let mode = FockMode::new(6).unwrap();
        let ch = vacuum_ancilla(&mode);
        let grid = vec![PhaseSpacePoint::single(0.0, 0.0)];
        let out = covariantize(&ch, &grid, &mode).unwrap();
        for (a, b) in ch.kraus.iter().zip(&out.kraus) {
            assert!(max_abs(&(a - b)) < 1e-12);
        }
    }

    /// rho -> tr(rho) I/d^2: exactly shift-covariant at any cutoff.
    fn flattening_cloner(d: usize) -> Channel {
        let inv = c(1.0 / d as f64, 0.0);
        let mut kraus = Vec::with_capacity(d * d * d);
        for i in 0..d * d {
            for j in 0..d {
                let mut k = CMatrix::zeros(d * d, d);
                k[(i, j)] = inv;
                kraus.push(k);
            }
        }
        Channel::new(kraus, 1e-9).unwrap()
    }

    #[test]
    fn covariant_channel_is_fixed_by_covariantize() {
        let mode = FockMode::new(4).unwrap();
        let ch = flattening_cloner(4);
        let grid = square_grid(1, 0.5);
        let mut rng = crate::test_rng(17);
        let states: Vec<CMatrix> = (0..3).map(|_| random_density(&mut rng, 4)).collect();
        assert!(covariance_residual(&ch, &grid, &states, &mode).unwrap() < 1e-9);
        let out = covariantize(&ch, &grid, &mode).unwrap();
        for rho in &states {
            let a = apply_schrodinger(&out, rho).unwrap();
            let b = apply_schrodinger(&ch, rho).unwrap();
            assert!(matrix::trace_norm(&(a - b)) < 1e-9);
        }
    }

    #[test]
    fn fixed_output_channel_is_far_from_covariant_and_improves() {
        let mode = FockMode::new(8).unwrap();
        let ch = vacuum_ancilla(&mode);
        let grid = square_grid(1, 0.5);
        let v = coherent(&PhaseSpacePoint::single(0.0, 0.0), &mode);
        let states = vec![&v * v.adjoint()];
        let before = covariance_residual(&ch, &grid, &states, &mode).unwrap();
        assert!(before > 0.1);
        let twirled = covariantize(&ch, &grid, &mode).unwrap();
        let after = covariance_residual(&twirled, &grid, &states, &mode).unwrap();
        assert!(after < before);
    }

    #[test]
    fn scan_is_affine_with_argmax_at_one() {
        let mode = FockMode::new(8).unwrap();
        let grid = square_grid(1, 0.5);
        let normal = reference_cloner(&mode, &grid).unwrap();
        let mut weights = BTreeMap::new();
        weights.insert("12".to_string(), 0.5);
        weights.insert(String::new(), 0.5);
        let dec = ClonerDecomposition::new(normal, weights).unwrap();
        let alphas = square_grid(1, 0.5);
        let rows = decomposed_fidelity_scan(&dec, &alphas, &mode, 5).unwrap();
        assert_eq!(rows.len(), 5);
        let slope = rows.last().unwrap().worst_fidelity;
        assert!(slope > 0.0);
        for row in &rows {
            assert!((row.worst_fidelity - row.c12 * slope).abs() < 1e-12);
        }
        let best = rows
            .iter()
            .max_by(|a, b| a.worst_fidelity.partial_cmp(&b.worst_fidelity).unwrap())
            .unwrap();
        assert_eq!(best.c12, 1.0);
    }

    #[test]
    fn unnormalized_weights_are_rejected() {
        let mode = FockMode::new(4).unwrap();
        let normal = vacuum_ancilla(&mode);
        let mut weights = BTreeMap::new();
        weights.insert("12".to_string(), 0.9);
        assert!(matches!(
            ClonerDecomposition::new(normal, weights),
            Err(Error::UnnormalizedWeights { .. })
        ));
    }

    #[test]
    fn trace_character_flags_non_uniform_sums() {
        let k = diag_reals(&[1.0, 0.5]);
        let ch = Channel::new(vec![k], 1e-9).unwrap();
        assert!(ch.trace_character(1e-9).is_none());
        assert!(Channel::identity(3).trace_character(1e-12) == Some(1.0));
    }
}
