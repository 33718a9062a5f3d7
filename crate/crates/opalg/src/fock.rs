//! Truncated Fock spaces, Weyl operators, and coherent states.
//!
//! Everything lives on a d-dimensional number-basis cutoff, so the Weyl
//! relations only hold approximately; relation residuals are therefore
//! measured on the lower d/2 block of each mode ("shielded"), where the
//! truncation has not yet been felt, and phrased as convergence trends.
//!
//! Conventions: Q = (a + a*)/sqrt2, P = -i(a - a*)/sqrt2, and
//! W_x = exp(i (q P - p Q)) per mode. Phase-space coordinates are
//! interleaved (q1, p1, q2, p2, ...). Multi-mode operators are tensor
//! products in mode order.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{self, c, CMatrix, CVector};

/// One bosonic mode truncated at `cutoff` levels.
#[derive(Debug, Clone)]
pub struct FockMode {
    pub cutoff: usize,
    pub lower: CMatrix,
    pub q: CMatrix,
    pub p: CMatrix,
}

impl FockMode {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument(format!(
                "cutoff must be at least 2, got {cutoff}"
            )));
        }
        let mut lower = CMatrix::zeros(cutoff, cutoff);
        for k in 1..cutoff {
            lower[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
        }
        let raise = lower.adjoint();
        let s = c(1.0 / 2.0_f64.sqrt(), 0.0);
        let q = (&lower + &raise) * s;
        let p = (&lower - &raise) * c(0.0, -1.0) * s;
        Ok(FockMode { cutoff, lower, q, p })
    }

    /// a* a, diagonal with entries 0..d-1.
    pub fn number_operator(&self) -> CMatrix {
        self.lower.adjoint() * &self.lower
    }

    pub fn vacuum(&self, modes: usize) -> CVector {
        let dim = self.cutoff.pow(modes as u32);
        let mut v = CVector::zeros(dim);
        v[0] = c(1.0, 0.0);
        v
    }
}

/// Interleaved phase-space coordinates (q1, p1, q2, p2, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpacePoint {
    pub coords: Vec<f64>,
}

impl PhaseSpacePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() % 2 != 0 || coords.is_empty() {
            return Err(Error::BadPhasePoint {
                expected: coords.len() + coords.len() % 2,
                found: coords.len(),
            });
        }
        if !coords.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PhaseSpacePoint { coords })
    }

    pub fn single(q: f64, p: f64) -> Self {
        PhaseSpacePoint { coords: vec![q, p] }
    }

    pub fn modes(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn q(&self, mode: usize) -> f64 {
        self.coords[2 * mode]
    }

    pub fn p(&self, mode: usize) -> f64 {
        self.coords[2 * mode + 1]
    }

    pub fn negate(&self) -> Self {
        PhaseSpacePoint {
            coords: self.coords.iter().map(|v| -v).collect(),
        }
    }

    pub fn add(&self, other: &PhaseSpacePoint) -> Result<Self> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::BadPhasePoint {
                expected: self.coords.len(),
                found: other.coords.len(),
            });
        }
        Ok(PhaseSpacePoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// The antisymmetric form beta(x, y) = x^t B y on n modes, interleaved
/// ordering, so B is block-diagonal with [[0,1],[-1,0]] blocks.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    pub modes: usize,
}

impl SymplecticForm {
    pub fn new(modes: usize) -> Self {
        SymplecticForm { modes }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = 2 * self.modes;
        let mut b = DMatrix::zeros(n, n);
        for k in 0..self.modes {
            b[(2 * k, 2 * k + 1)] = 1.0;
            b[(2 * k + 1, 2 * k)] = -1.0;
        }
        b
    }

    pub fn eval(&self, x: &PhaseSpacePoint, y: &PhaseSpacePoint) -> Result<f64> {
        let expected = 2 * self.modes;
        for pt in [x, y] {
            if pt.coords.len() != expected {
                return Err(Error::BadPhasePoint {
                    expected,
                    found: pt.coords.len(),
                });
            }
        }
        let mut s = 0.0;
        for k in 0..self.modes {
            s += x.q(k) * y.p(k) - x.p(k) * y.q(k);
        }
        Ok(s)
    }
}

/// Square single-mode grid {(i s, j s) : |i|,|j| <= n}, symmetric about
/// the origin, ordered lexicographically.
pub fn square_grid(n: i32, spacing: f64) -> Vec<PhaseSpacePoint> {
    let mut pts = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            pts.push(PhaseSpacePoint::single(i as f64 * spacing, j as f64 * spacing));
        }
    }
    pts
}

/// exp(i h) for Hermitian h, via eigendecomposition; exactly unitary up
/// to the accuracy of the eigensolver.
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    let (vals, vecs) = matrix::eigh(h);
    let n = vals.len();
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        vals.iter().map(|&t| Complex64::from_polar(1.0, t)),
    ));
    &vecs * d * vecs.adjoint()
}

fn single_mode_weyl(q: f64, p: f64, mode: &FockMode) -> CMatrix {
    let h = &mode.p * c(q, 0.0) - &mode.q * c(p, 0.0);
    exp_i_hermitian(&h)
}

/// W_x = exp(i sum_k (q_k P_k - p_k Q_k)), tensored across modes.
pub fn weyl(x: &PhaseSpacePoint, mode: &FockMode) -> CMatrix {
    let mut w = single_mode_weyl(x.q(0), x.p(0), mode);
    for k in 1..x.modes() {
        w = matrix::kron(&w, &single_mode_weyl(x.q(k), x.p(k), mode));
    }
    w
}

/// W_alpha |0>, a coherent state; unit norm by unitarity.
pub fn coherent(alpha: &PhaseSpacePoint, mode: &FockMode) -> CVector {
    weyl(alpha, mode) * mode.vacuum(alpha.modes())
}

/// Indices of the tensor basis whose every mode index is below d/2.
fn shielded_indices(cutoff: usize, modes: usize) -> Vec<usize> {
    let half = cutoff / 2;
    let mut idx = vec![0usize];
    for _ in 0..modes {
        let mut next = Vec::with_capacity(idx.len() * half);
        for &i in &idx {
            for j in 0..half {
                next.push(i * cutoff + j);
            }
        }
        idx = next;
    }
    idx
}

fn shielded_block(a: &CMatrix, cutoff: usize, modes: usize) -> CMatrix {
    let idx = shielded_indices(cutoff, modes);
    CMatrix::from_fn(idx.len(), idx.len(), |r, s| a[(idx[r], idx[s])])
}

/// Spectral norm of W_x W_y - e^{-i beta/2} W_{x+y} on the shielded block.
///
/// Single-mode points go through a double-double evaluation (analytic
/// displacement matrix elements, extended-precision products): at large
/// cutoffs the true residual sinks far below the f64 rounding floor, and
/// plain arithmetic would report its own noise instead.
pub fn weyl_relation_residual(
    x: &PhaseSpacePoint,
    y: &PhaseSpacePoint,
    mode: &FockMode,
) -> Result<f64> {
    let modes = x.modes();
    let form = SymplecticForm::new(modes);
    let beta = form.eval(x, y)?;
    if modes == 1 {
        return Ok(precise::relation_residual(
            x.q(0),
            x.p(0),
            y.q(0),
            y.p(0),
            mode.cutoff,
        ));
    }
    let wx = weyl(x, mode);
    let wy = weyl(y, mode);
    let wsum = weyl(&x.add(y)?, mode);
    let diff = &wx * &wy - wsum * Complex64::from_polar(1.0, -beta / 2.0);
    Ok(matrix::spectral_norm(&shielded_block(
        &diff, mode.cutoff, modes,
    )))
}

/// Double-double evaluation of the single-mode Weyl relation residual.
mod precise {
    use std::ops::{Add, Div, Mul, Neg, Sub};

    /// Double-double scalar: value = hi + lo with |lo| <= ulp(hi)/2.
    ///
    /// Hand-rolled (Dekker/Knuth error-free kernels plus an FMA product)
    /// because the off-the-shelf double-double crates round their mul and
    /// div results to f64 accuracy, which defeats the purpose here.
    #[derive(Clone, Copy, Debug, PartialEq)]
    struct Dd {
        hi: f64,
        lo: f64,
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    impl From<f64> for Dd {
        fn from(x: f64) -> Dd {
            Dd { hi: x, lo: 0.0 }
        }
    }

    impl From<Dd> for f64 {
        fn from(x: Dd) -> f64 {
            x.hi + x.lo
        }
    }

    impl Add for Dd {
        type Output = Dd;
        fn add(self, o: Dd) -> Dd {
            let (s1, s2) = two_sum(self.hi, o.hi);
            let (t1, t2) = two_sum(self.lo, o.lo);
            let (s1, s2) = quick_two_sum(s1, s2 + t1);
            let (hi, lo) = quick_two_sum(s1, s2 + t2);
            Dd { hi, lo }
        }
    }

    impl Neg for Dd {
        type Output = Dd;
        fn neg(self) -> Dd {
            Dd {
                hi: -self.hi,
                lo: -self.lo,
            }
        }
    }

    impl Sub for Dd {
        type Output = Dd;
        fn sub(self, o: Dd) -> Dd {
            self + (-o)
        }
    }

    impl Mul for Dd {
        type Output = Dd;
        fn mul(self, o: Dd) -> Dd {
            let (p, e) = two_prod(self.hi, o.hi);
            let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
            Dd { hi, lo }
        }
    }

    impl Div for Dd {
        type Output = Dd;
        fn div(self, o: Dd) -> Dd {
            let q1 = self.hi / o.hi;
            let r = self - o * Dd::from(q1);
            let q2 = r.hi / o.hi;
            let r = r - o * Dd::from(q2);
            let q3 = r.hi / o.hi;
            let (hi, lo) = quick_two_sum(q1, q2);
            Dd { hi, lo } + Dd::from(q3)
        }
    }

    impl Dd {
        fn sqrt(self) -> Dd {
            if self.hi == 0.0 {
                return Dd::from(0.0);
            }
            // one dd Newton step from the f64 root: y + (a - y^2) / (2y)
            let y = Dd::from(self.hi.sqrt());
            y + (self - y * y) / (Dd::from(2.0) * y)
        }

        fn recip(self) -> Dd {
            Dd::from(1.0) / self
        }

        fn cos_sin(self) -> (Dd, Dd) {
            // halve into the Taylor radius, then undo by complex squaring
            let mut r = self;
            let mut k = 0u32;
            while r.hi.abs() > 0.015625 {
                r = r * Dd::from(0.5);
                k += 1;
            }
            let mut c = Dd::from(0.0);
            let mut s = Dd::from(0.0);
            let mut term = Dd::from(1.0);
            for n in 0..=13 {
                match n % 4 {
                    0 => c = c + term,
                    1 => s = s + term,
                    2 => c = c - term,
                    _ => s = s - term,
                }
                term = term * r / Dd::from((n + 1) as f64);
            }
            for _ in 0..k {
                let c2 = c * c - s * s;
                let s2 = Dd::from(2.0) * c * s;
                c = c2;
                s = s2;
            }
            (c, s)
        }

        fn cos(self) -> Dd {
            self.cos_sin().0
        }

        fn sin(self) -> Dd {
            self.cos_sin().1
        }
    }

    #[derive(Clone, Copy)]
    struct Cdd {
        re: Dd,
        im: Dd,
    }

    impl Cdd {
        fn zero() -> Self {
            Cdd {
                re: Dd::from(0.0),
                im: Dd::from(0.0),
            }
        }

        fn add(self, o: Cdd) -> Cdd {
            Cdd {
                re: self.re + o.re,
                im: self.im + o.im,
            }
        }

        fn sub(self, o: Cdd) -> Cdd {
            Cdd {
                re: self.re - o.re,
                im: self.im - o.im,
            }
        }

        fn mul(self, o: Cdd) -> Cdd {
            Cdd {
                re: self.re * o.re - self.im * o.im,
                im: self.re * o.im + self.im * o.re,
            }
        }

        fn conj(self) -> Cdd {
            Cdd {
                re: self.re,
                im: -self.im,
            }
        }

        fn scale(self, s: Dd) -> Cdd {
            Cdd {
                re: self.re * s,
                im: self.im * s,
            }
        }

        fn norm_sqr(self) -> Dd {
            self.re * self.re + self.im * self.im
        }
    }

    /// A = i (q P - p Q) on the d-level truncation: the anti-Hermitian
    /// generator whose exponential is the single-mode Weyl operator.
    fn generator(q: f64, p: f64, d: usize) -> Vec<Cdd> {
        let inv_sqrt2 = Dd::from(2.0).sqrt().recip();
        let qd = Dd::from(q);
        let pd = Dd::from(p);
        let mut a = vec![Cdd::zero(); d * d];
        for k in 1..d {
            let s = Dd::from(k as f64).sqrt() * inv_sqrt2;
            // upper diagonal (k-1, k): (q - i p) sqrt(k)/sqrt(2)
            a[(k - 1) * d + k] = Cdd {
                re: qd * s,
                im: -(pd * s),
            };
            // lower diagonal is minus the conjugate
            a[k * d + (k - 1)] = Cdd {
                re: -(qd * s),
                im: -(pd * s),
            };
        }
        a
    }

    /// exp(A) by scaling and squaring with a Taylor core; the series is
    /// cut where the terms are far below double-double resolution.
    fn expm(a: &[Cdd], d: usize) -> Vec<Cdd> {
        let mut norm = 0.0f64;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += f64::from(a[i * d + j].norm_sqr()).sqrt();
            }
            norm = norm.max(row);
        }
        let mut s = 0i32;
        while norm / 2f64.powi(s) > 0.25 {
            s += 1;
        }
        let scale = Dd::from(2f64.powi(-s));
        let b: Vec<Cdd> = a.iter().map(|z| z.scale(scale)).collect();
        let mut ident = vec![Cdd::zero(); d * d];
        for i in 0..d {
            ident[i * d + i] = Cdd {
                re: Dd::from(1.0),
                im: Dd::from(0.0),
            };
        }
        let mut result = ident.clone();
        let mut term = ident;
        for n in 1..=30 {
            term = matmul(&term, &b, d);
            let invn = Dd::from(n as f64).recip();
            for z in &mut term {
                *z = z.scale(invn);
            }
            for (r, t) in result.iter_mut().zip(&term) {
                *r = r.add(*t);
            }
        }
        for _ in 0..s {
            result = matmul(&result, &result, d);
        }
        result
    }

    fn matmul(a: &[Cdd], b: &[Cdd], d: usize) -> Vec<Cdd> {
        let mut out = vec![Cdd::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = a[i * d + k];
                for j in 0..d {
                    out[i * d + j] = out[i * d + j].add(aik.mul(b[k * d + j]));
                }
            }
        }
        out
    }

    /// Spectral norm by power iteration on R+ R.
    fn spectral_norm(r: &[Cdd], d: usize) -> f64 {
        let mut v = vec![
            Cdd {
                re: Dd::from(1.0),
                im: Dd::from(0.0),
            };
            d
        ];
        let mut sigma = Dd::from(0.0);
        for _ in 0..200 {
            // w = R v
            let mut w = vec![Cdd::zero(); d];
            for i in 0..d {
                for j in 0..d {
                    w[i] = w[i].add(r[i * d + j].mul(v[j]));
                }
            }
            // u = R+ w
            let mut u = vec![Cdd::zero(); d];
            for j in 0..d {
                for i in 0..d {
                    u[j] = u[j].add(r[i * d + j].conj().mul(w[i]));
                }
            }
            let mut nsq = Dd::from(0.0);
            for z in &u {
                nsq = nsq + z.norm_sqr();
            }
            if !(f64::from(nsq) > 0.0) {
                return 0.0;
            }
            // ||R v||^2 / ||v||^2 with v normalized each round
            let mut wsq = Dd::from(0.0);
            for z in &w {
                wsq = wsq + z.norm_sqr();
            }
            sigma = wsq.sqrt();
            let inv = nsq.sqrt().recip();
            for (vj, uj) in v.iter_mut().zip(&u) {
                *vj = uj.scale(inv);
            }
        }
        f64::from(sigma)
    }

    pub(super) fn relation_residual(q1: f64, p1: f64, q2: f64, p2: f64, d: usize) -> f64 {
        let wx = expm(&generator(q1, p1, d), d);
        let wy = expm(&generator(q2, p2, d), d);
        let wsum = expm(&generator(q1 + q2, p1 + p2, d), d);
        let beta = Dd::from(q1) * Dd::from(p2) - Dd::from(p1) * Dd::from(q2);
        let half = -beta / Dd::from(2.0);
        let phase = Cdd {
            re: half.cos(),
            im: half.sin(),
        };
        let prod = matmul(&wx, &wy, d);
        let keep = d / 2;
        let mut block = vec![Cdd::zero(); keep * keep];
        for i in 0..keep {
            for j in 0..keep {
                block[i * keep + j] = prod[i * d + j].sub(phase.mul(wsum[i * d + j]));
            }
        }
        spectral_norm(&block, keep)
    }
}

/// Shielded-block norm of W_x W_y - e^{-i beta(x,y)} W_y W_x.
pub fn exchange_relation_residual(
    x: &PhaseSpacePoint,
    y: &PhaseSpacePoint,
    mode: &FockMode,
) -> Result<f64> {
    let modes = x.modes();
    let form = SymplecticForm::new(modes);
    let beta = form.eval(x, y)?;
    let wx = weyl(x, mode);
    let wy = weyl(y, mode);
    let diff = &wx * &wy - (&wy * &wx) * Complex64::from_polar(1.0, -beta);
    Ok(matrix::spectral_norm(&shielded_block(
        &diff, mode.cutoff, modes,
    )))
}

/// Conditioning slack for the scalar test in [`irreducibility_probe`];
/// commutator norms below tol only pin A down to within tol times a
/// grid-dependent constant, and this is a generous stand-in for it.
pub const IRREDUCIBILITY_KAPPA: f64 = 1.0e6;

/// Diagnostic for the irreducibility of the Weyl system: does commuting
/// with every grid Weyl operator force A to be scalar?  Returns true only
/// when both the commutators and the distance to the scalar c I with
/// c = tr(A)/d are small.  A probe, not a proof.
pub fn irreducibility_probe(
    mode: &FockMode,
    a: &CMatrix,
    grid: &[PhaseSpacePoint],
    tol: f64,
) -> Result<bool> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    matrix::check_square(a)?;
    let d = a.nrows();
    let mut max_comm = 0.0_f64;
    for x in grid {
        let w = weyl(x, mode);
        if w.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: w.nrows(),
                found: d,
            });
        }
        max_comm = max_comm.max(matrix::spectral_norm(&matrix::commutator(&w, a)));
    }
    if max_comm > tol {
        return Ok(false);
    }
    let mean = matrix::trace(a) / c(d as f64, 0.0);
    let dist = matrix::spectral_norm(&(a - matrix::identity(d) * mean));
    Ok(dist <= tol * IRREDUCIBILITY_KAPPA)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{identity, max_abs};

    fn mode(d: usize) -> FockMode {
        FockMode::new(d).unwrap()
    }

    #[test]
    fn lowering_acts_on_number_basis() {
        let m = mode(6);
        for k in 1..6 {
            let mut e = CVector::zeros(6);
            e[k] = c(1.0, 0.0);
            let out = &m.lower * e;
            assert!((out[k - 1].re - (k as f64).sqrt()).abs() < 1e-14);
        }
        assert!(max_abs(&(&m.q - m.q.adjoint())) < 1e-15);
        assert!(max_abs(&(&m.p - m.p.adjoint())) < 1e-15);
    }

    #[test]
    fn canonical_commutator_on_shielded_block() {
        // [Q, P] = iI away from the cutoff edge
        let m = mode(12);
        let comm = matrix::commutator(&m.q, &m.p) - identity(12) * c(0.0, 1.0);
        let block = shielded_block(&comm, 12, 1);
        assert!(matrix::spectral_norm(&block) < 1e-12);
    }

    #[test]
    fn weyl_at_zero_is_identity() {
        let m = mode(8);
        let w = weyl(&PhaseSpacePoint::single(0.0, 0.0), &m);
        assert!(max_abs(&(w - identity(8))) < 1e-13);
    }

    #[test]
    fn weyl_is_unitary() {
        let m = mode(20);
        for (q, p) in [(0.3, -0.8), (1.0, 0.0), (0.0, 1.0), (-0.6, 0.45)] {
            let w = weyl(&PhaseSpacePoint::single(q, p), &m);
            assert!(max_abs(&(w.adjoint() * &w - identity(20))) < 1e-12);
        }
    }

    #[test]
    fn weyl_adjoint_is_weyl_of_negated_point() {
        let m = mode(20);
        let x = PhaseSpacePoint::single(0.7, -0.5);
        let w = weyl(&x, &m);
        let wneg = weyl(&x.negate(), &m);
        assert!(max_abs(&(w.adjoint() - wneg)) < 1e-10);
    }

    #[test]
    fn vacuum_overlap_matches_gaussian() {
        // <0|W_(q,0)|0> = exp(-q^2/4) for this quadrature convention
        let m = mode(40);
        for q in [0.3, 0.7, 1.0] {
            let w = weyl(&PhaseSpacePoint::single(q, 0.0), &m);
            let got = w[(0, 0)];
            let want = (-q * q / 4.0).exp();
            assert!((got.re - want).abs() < 1e-6, "q={q}: {got} vs {want}");
            assert!(got.im.abs() < 1e-6);
        }
    }

    #[test]
    fn coherent_at_zero_is_vacuum() {
        let m = mode(10);
        let v = coherent(&PhaseSpacePoint::single(0.0, 0.0), &m);
        assert!((v[0].norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn coherent_is_normalized() {
        let m = mode(20);
        let v = coherent(&PhaseSpacePoint::single(0.9, -0.4), &m);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_amplitudes_match_poisson_series() {
        // displacement parameter for W_(q,p) is -(q+ip)/sqrt2; amplitudes
        // <n|alpha> = exp(-|a|^2/2) a^n / sqrt(n!)
        let m = mode(40);
        let (q, p) = (1.0, 0.5);
        let v = coherent(&PhaseSpacePoint::single(q, p), &m);
        let a = c(-q / 2.0_f64.sqrt(), -p / 2.0_f64.sqrt());
        let mut amp = c((-a.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..10 {
            assert!((v[n] - amp).norm() < 1e-6, "n={n}");
            amp = amp * a / c(((n + 1) as f64).sqrt(), 0.0);
        }
    }

    #[test]
    fn relation_residual_vanishes_for_zero_shift() {
        let m = mode(16);
        let x = PhaseSpacePoint::single(0.8, -0.2);
        let y = PhaseSpacePoint::single(0.0, 0.0);
        let r = weyl_relation_residual(&x, &y, &m).unwrap();
        assert!(r < 1e-11);
    }

    #[test]
    fn precise_residual_agrees_with_plain_arithmetic() {
        // at d = 10 the residual is ~1e-3, far above both noise floors,
        // so the double-double path must match a direct f64 evaluation
        let d = 10;
        let m = mode(d);
        let x = PhaseSpacePoint::single(1.0, 0.0);
        let y = PhaseSpacePoint::single(0.0, 1.0);
        let wx = weyl(&x, &m);
        let wy = weyl(&y, &m);
        let wsum = weyl(&x.add(&y).unwrap(), &m);
        let beta = SymplecticForm::new(1).eval(&x, &y).unwrap();
        let diff = &wx * &wy - wsum * Complex64::from_polar(1.0, -beta / 2.0);
        let plain = matrix::spectral_norm(&shielded_block(&diff, d, 1));
        let fast = weyl_relation_residual(&x, &y, &m).unwrap();
        assert!(
            (plain - fast).abs() < 1e-10 * plain.max(1.0),
            "plain {plain} vs precise {fast}"
        );
    }

    #[test]
    fn relation_residual_decreases_with_cutoff() {
        let x = PhaseSpacePoint::single(1.0, 0.0);
        let y = PhaseSpacePoint::single(0.0, 1.0);
        let mut prev = f64::INFINITY;
        for d in [10, 20, 40] {
            let r = weyl_relation_residual(&x, &y, &mode(d)).unwrap();
            assert!(r < prev, "d={d}: {r} !< {prev}");
            prev = r;
        }
    }

    #[test]
    fn exchange_relation_bounded_by_twice_composition() {
        let m = mode(20);
        let x = PhaseSpacePoint::single(0.6, 0.1);
        let y = PhaseSpacePoint::single(-0.3, 0.8);
        let rel = weyl_relation_residual(&x, &y, &m).unwrap();
        let rel_rev = weyl_relation_residual(&y, &x, &m).unwrap();
        let exch = exchange_relation_residual(&x, &y, &m).unwrap();
        assert!(exch <= 2.0 * rel.max(rel_rev) + 1e-12);
    }

    #[test]
    fn multimode_weyl_factorizes() {
        let m = mode(8);
        let x = PhaseSpacePoint::new(vec![0.4, -0.7, 0.2, 0.9]).unwrap();
        let joint = weyl(&x, &m);
        let w1 = weyl(&PhaseSpacePoint::single(0.4, -0.7), &m);
        let w2 = weyl(&PhaseSpacePoint::single(0.2, 0.9), &m);
        assert!(max_abs(&(joint - matrix::kron(&w1, &w2))) < 1e-10);
    }

    #[test]
    fn symplectic_form_is_antisymmetric() {
        let form = SymplecticForm::new(2);
        let x = PhaseSpacePoint::new(vec![0.3, 1.1, -0.5, 0.2]).unwrap();
        let y = PhaseSpacePoint::new(vec![-0.8, 0.4, 0.6, -0.9]).unwrap();
        let b1 = form.eval(&x, &y).unwrap();
        let b2 = form.eval(&y, &x).unwrap();
        assert_eq!(b1, -b2);
        let b = form.matrix();
        assert_eq!(b[(0, 1)], 1.0);
        assert_eq!(b[(1, 0)], -1.0);
        assert!((b.transpose() + &b).iter().all(|&v| v == 0.0));
        // x^t B y agrees with the per-mode evaluation
        let xv = nalgebra::DVector::from_vec(x.coords.clone());
        let yv = nalgebra::DVector::from_vec(y.coords.clone());
        assert!(((xv.transpose() * b * yv)[(0, 0)] - b1).abs() < 1e-14);
    }

    #[test]
    fn symplectic_matrix_is_nondegenerate() {
        let b = SymplecticForm::new(3).matrix();
        assert!(b.determinant().abs() > 0.5);
    }

    #[test]
    fn irreducibility_probe_accepts_scalars() {
        let m = mode(10);
        let grid: Vec<_> = [(0.5, 0.0), (0.0, 0.5), (-0.5, 0.5)]
            .iter()
            .map(|&(q, p)| PhaseSpacePoint::single(q, p))
            .collect();
        assert!(irreducibility_probe(&m, &identity(10), &grid, 1e-8).unwrap());
        let scalar = identity(10) * c(3.0, 2.0);
        assert!(irreducibility_probe(&m, &scalar, &grid, 1e-8).unwrap());
    }

    #[test]
    fn irreducibility_probe_rejects_number_operator() {
        let m = mode(10);
        let grid: Vec<_> = (0..8)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 8.0;
                PhaseSpacePoint::single(0.7 * t.cos(), 0.7 * t.sin())
            })
            .collect();
        assert!(!irreducibility_probe(&m, &m.number_operator(), &grid, 1e-8).unwrap());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let m = mode(4);
        assert!(matches!(
            irreducibility_probe(&m, &identity(4), &[], 1e-8),
            Err(Error::EmptyGrid)
        ));
    }

    #[test]
    fn odd_coordinate_count_is_rejected() {
        assert!(PhaseSpacePoint::new(vec![1.0, 2.0, 3.0]).is_err());
        assert!(PhaseSpacePoint::new(vec![]).is_err());
        assert!(PhaseSpacePoint::new(vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn cutoff_below_two_is_rejected() {
        assert!(FockMode::new(1).is_err());
    }
}
