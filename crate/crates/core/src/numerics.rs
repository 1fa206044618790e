//! Dense linear-algebra kernel shared by every metric.
//!
//! Matrices are `nalgebra::DMatrix<f64>`; factorizations come from nalgebra,
//! while the matrix exponential, the Lyapunov solver and the finite-horizon
//! Gramian are implemented here.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

fn check_square(m: &DenseMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn cholesky(m: &DenseMatrix) -> Result<Cholesky<f64, Dyn>> {
    check_square(m, "matrix")?;
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-8 * scale {
        return Err(Error::NotPositiveDefinite);
    }
    Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite)
}

/// Solves `m X = rhs` for symmetric positive definite `m`.
pub fn solve_spd(m: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if rhs.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch("rhs rows must match matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(rhs.clone());
    }
    Ok(cholesky(m)?.solve(rhs))
}

pub fn inverse_spd(m: &DenseMatrix) -> Result<DenseMatrix> {
    if m.nrows() == 0 {
        check_square(m, "matrix")?;
        return Ok(m.clone());
    }
    Ok(cholesky(m)?.inverse())
}

/// `log det m` from the Cholesky diagonal.
pub fn log_det_spd(m: &DenseMatrix) -> Result<f64> {
    if m.nrows() == 0 {
        check_square(m, "matrix")?;
        return Ok(0.0);
    }
    let chol = cholesky(m)?;
    let l = chol.l_dirty();
    Ok((0..m.nrows()).map(|i| 2.0 * l[(i, i)].ln()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankTolerance {
    /// `max(rows, cols) * eps * sigma_max`.
    #[default]
    Default,
    Absolute(f64),
}

/// Number of singular values above the tolerance.
pub fn numerical_rank(m: &DenseMatrix, tol: RankTolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = match tol {
        RankTolerance::Default => m.nrows().max(m.ncols()) as f64 * f64::EPSILON * smax,
        RankTolerance::Absolute(t) => t,
    };
    sv.iter().filter(|&&s| s > cut).count()
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &DenseMatrix) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn pade_low(a: &DenseMatrix, b: &[f64]) -> (DenseMatrix, DenseMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut pow = DenseMatrix::identity(n, n);
    let mut u_inner = DenseMatrix::zeros(n, n);
    let mut v = DenseMatrix::zeros(n, n);
    for j in (0..b.len()).step_by(2) {
        v += &pow * b[j];
        u_inner += &pow * b[j + 1];
        pow = &pow * &a2;
    }
    (a * u_inner, v)
}

/// Matrix exponential by scaling and squaring with a Pade approximant.
pub fn expm(m: &DenseMatrix) -> Result<DenseMatrix> {
    check_square(m, "expm argument")?;
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("expm argument has non-finite entries".into()));
    }
    let nrm = norm1(m);
    let (u, v, squarings) = if let Some(&(deg, _)) = THETA.iter().find(|&&(_, th)| nrm <= th) {
        let b: &[f64] = match deg {
            3 => &PADE3,
            5 => &PADE5,
            7 => &PADE7,
            _ => &PADE9,
        };
        let (u, v) = pade_low(m, b);
        (u, v, 0)
    } else {
        let s = (nrm / THETA13).log2().ceil().max(0.0) as i32;
        let a = m / 2f64.powi(s);
        let b = &PADE13;
        let id = DenseMatrix::identity(n, n);
        let a2 = &a * &a;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
            + &a6 * b[7]
            + &a4 * b[5]
            + &a2 * b[3]
            + &id * b[1];
        let u = &a * u_inner;
        let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
            + &a6 * b[6]
            + &a4 * b[4]
            + &a2 * b[2]
            + &id * b[0];
        (u, v, s)
    };
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::InvalidParameter("singular Pade denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// `m^k` by binary powering.
pub fn matrix_power(m: &DenseMatrix, mut k: u64) -> Result<DenseMatrix> {
    check_square(m, "matrix power base")?;
    let n = m.nrows();
    let mut result = DenseMatrix::identity(n, n);
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    Ok(result)
}

/// Largest real part among the eigenvalues, or `None` for a 0x0 matrix.
pub fn spectral_abscissa(a: &DenseMatrix) -> Result<Option<f64>> {
    check_square(a, "system matrix")?;
    if a.nrows() == 0 {
        return Ok(None);
    }
    let eig = a.complex_eigenvalues();
    Ok(Some(eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)))
}

/// Eigenvalues within `HURWITZ_MARGIN * max(1, max |a_ij|)` of the imaginary
/// axis count as marginal, so a Laplacian's rounded zero eigenvalue does not
/// pass as stable.
pub const HURWITZ_MARGIN: f64 = 1e-9;

pub fn is_hurwitz(a: &DenseMatrix) -> Result<bool> {
    let margin = HURWITZ_MARGIN * a.amax().max(1.0);
    Ok(spectral_abscissa(a)?.is_none_or(|r| r < -margin))
}

fn smith_doubling(a: &DenseMatrix, q: &DenseMatrix, shift: f64) -> Result<DenseMatrix> {
    let n = a.nrows();
    let id = DenseMatrix::identity(n, n);
    let minus = (a - &id * shift).lu();
    let m_inv = minus
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter("Cayley shift hit an eigenvalue".into()))?;
    let mut u = &m_inv * (a + &id * shift);
    let mut w = (&m_inv * q * m_inv.transpose()) * (2.0 * shift);
    for _ in 0..200 {
        let inc = &u * &w * u.transpose();
        let inc_norm = inc.amax();
        w += inc;
        if inc_norm <= 1e-18 * w.amax().max(f64::MIN_POSITIVE) {
            break;
        }
        u = &u * &u;
    }
    Ok((&w + w.transpose()) * 0.5)
}

/// Solves `A W + W A^T + Q = 0` for Hurwitz `A`.
pub fn lyapunov_solve(a: &DenseMatrix, q: &DenseMatrix) -> Result<DenseMatrix> {
    check_square(a, "system matrix")?;
    let n = a.nrows();
    if q.shape() != (n, n) {
        return Err(Error::DimensionMismatch("Q must match A".into()));
    }
    if n == 0 {
        return Ok(q.clone());
    }
    let eig = a.complex_eigenvalues();
    if eig.iter().any(|z| z.re >= 0.0) {
        return Err(Error::NotHurwitz);
    }
    let moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    let lo = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = moduli.iter().cloned().fold(0.0, f64::max);
    let shift = (lo * hi).sqrt();
    let mut w = smith_doubling(a, q, shift)?;
    // Residual correction passes.
    let q_norm = q.amax().max(f64::MIN_POSITIVE);
    for _ in 0..2 {
        let resid = a * &w + &w * a.transpose() + q;
        if resid.amax() <= 1e-14 * q_norm {
            break;
        }
        w += smith_doubling(a, &resid, shift)?;
    }
    Ok(w)
}

/// Infinite-horizon controllability Gramian: `A W + W A^T + B B^T = 0`.
pub fn lyapunov_gramian(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch("B rows must match A".into()));
    }
    lyapunov_solve(a, &(b * b.transpose()))
}

/// `int_0^T e^{A t} Q e^{A^T t} dt`.
///
/// The block exponential of `[[A, Q], [0, -A^T]] h` is evaluated on a short
/// sub-interval `h = T / 2^k` with `|A|_1 h <= 1`, then the horizon is doubled
/// `k` times with `G(2t) = G(t) + e^{A t} G(t) e^{A^T t}`. Evaluating the block
/// exponential over the full horizon loses all precision once `e^{-A^T T}`
/// becomes large.
pub fn finite_horizon_gramian_q(a: &DenseMatrix, q: &DenseMatrix, horizon: f64) -> Result<DenseMatrix> {
    check_square(a, "system matrix")?;
    let n = a.nrows();
    if q.shape() != (n, n) {
        return Err(Error::DimensionMismatch("Q must match A".into()));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidParameter("horizon must be positive and finite".into()));
    }
    if n == 0 {
        return Ok(q.clone());
    }
    let doublings = (norm1(a) * horizon).log2().ceil().clamp(0.0, 60.0) as u32;
    let h = horizon / 2f64.powi(doublings as i32);
    let mut big = DenseMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&(a * h));
    big.view_mut((0, n), (n, n)).copy_from(&(q * h));
    big.view_mut((n, n), (n, n)).copy_from(&(-a.transpose() * h));
    let e = expm(&big)?;
    let mut prop = e.view((0, 0), (n, n)).clone_owned();
    let g12 = e.view((0, n), (n, n)).clone_owned();
    let mut gamma = g12 * prop.transpose();
    gamma = (&gamma + gamma.transpose()) * 0.5;
    for _ in 0..doublings {
        gamma = &gamma + &prop * &gamma * prop.transpose();
        prop = &prop * &prop;
    }
    Ok((&gamma + gamma.transpose()) * 0.5)
}

/// Finite-horizon controllability Gramian over `[t0, t1]`.
pub fn finite_horizon_gramian(a: &DenseMatrix, b: &DenseMatrix, t0: f64, t1: f64) -> Result<DenseMatrix> {
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch("B rows must match A".into()));
    }
    finite_horizon_gramian_q(a, &(b * b.transpose()), t1 - t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, scale: f64, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, n, |_, _| (rng.random::<f64>() * 2.0 - 1.0) * scale)
    }

    fn random_spd(n: usize, seed: u64) -> DenseMatrix {
        let m = random_matrix(n, 1.0, seed);
        &m * m.transpose() + DenseMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn solve_spd_examples() {
        let id = DenseMatrix::identity(3, 3);
        assert_eq!(solve_spd(&id, &id).unwrap(), id);
        let d = DenseMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = solve_spd(&d, &DenseMatrix::identity(2, 2)).unwrap();
        let expected = DenseMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25]);
        assert!((x - expected).amax() < 1e-15);
        let m = random_spd(6, 1);
        let rhs = random_matrix(6, 1.0, 2);
        let x = solve_spd(&m, &rhs).unwrap();
        assert!((&m * &x - &rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn solve_spd_rejects_indefinite() {
        let m = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(solve_spd(&m, &DenseMatrix::identity(2, 2)), Err(Error::NotPositiveDefinite));
        let singular = DenseMatrix::zeros(2, 2);
        assert_eq!(log_det_spd(&singular), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(log_det_spd(&DenseMatrix::identity(4, 4)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let m = DenseMatrix::from_row_slice(2, 2, &[e, 0.0, 0.0, e]);
        assert_relative_eq!(log_det_spd(&m).unwrap(), 2.0, epsilon = 1e-15);
        let r = random_spd(5, 3);
        let eig_oracle: f64 = r.clone().symmetric_eigen().eigenvalues.iter().map(|x| x.ln()).sum();
        assert!((log_det_spd(&r).unwrap() - eig_oracle).abs() < 1e-9);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&DenseMatrix::zeros(3, 4), RankTolerance::Default), 0);
        assert_eq!(numerical_rank(&DenseMatrix::identity(5, 5), RankTolerance::Default), 5);
        let m = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(numerical_rank(&m, RankTolerance::Default), 1);
        assert_eq!(numerical_rank(&DenseMatrix::zeros(0, 3), RankTolerance::Default), 0);
        let small = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-6]);
        assert_eq!(numerical_rank(&small, RankTolerance::Absolute(1e-3)), 1);
    }

    #[test]
    fn expm_examples() {
        assert_eq!(expm(&DenseMatrix::zeros(3, 3)).unwrap(), DenseMatrix::identity(3, 3));
        let e = expm(&DenseMatrix::from_element(1, 1, -1.0)).unwrap();
        assert_relative_eq!(e[(0, 0)], (-1.0f64).exp(), max_relative = 1e-14);
        // Path 0-1 grounded at 1: full grounded L = [[1,-1],[0,0]], t = ln 2.
        let l = DenseMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 0.0]);
        let p = expm(&(-l * 2f64.ln())).unwrap();
        assert_relative_eq!(p[(0, 0)], 0.5, epsilon = 1e-14);
        assert_relative_eq!(p[(0, 1)], 0.5, epsilon = 1e-14);
        assert_relative_eq!(p[(1, 1)], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_large_norm_matches_diagonal_closed_form() {
        let d = DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-30.0, 0.5, 12.0]));
        let q = random_matrix(3, 1.0, 9);
        let q_inv = q.clone().try_inverse().unwrap();
        let m = &q * &d * &q_inv;
        let expected = &q
            * DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                (-30.0f64).exp(),
                0.5f64.exp(),
                12.0f64.exp(),
            ]))
            * &q_inv;
        let got = expm(&m).unwrap();
        assert!((&got - &expected).norm() <= 1e-9 * expected.norm());
    }

    #[test]
    fn expm_inverse_identity() {
        for seed in 0..20 {
            let m = random_matrix(5, 1.0, seed);
            let m = &m * (2.0 / m.norm().max(1e-12)) * ((seed % 4 + 1) as f64 / 4.0);
            let prod = expm(&m).unwrap() * expm(&(-&m)).unwrap();
            assert!((prod - DenseMatrix::identity(5, 5)).amax() < 1e-8);
        }
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let m = random_matrix(4, 0.5, 4);
        let mut direct = DenseMatrix::identity(4, 4);
        for _ in 0..13 {
            direct = &direct * &m;
        }
        assert!((matrix_power(&m, 13).unwrap() - direct).amax() < 1e-13);
        assert_eq!(matrix_power(&m, 0).unwrap(), DenseMatrix::identity(4, 4));
    }

    #[test]
    fn lyapunov_examples() {
        let a = -DenseMatrix::identity(2, 2);
        let w = lyapunov_gramian(&a, &DenseMatrix::identity(2, 2)).unwrap();
        assert!((w - DenseMatrix::identity(2, 2) * 0.5).amax() < 1e-14);
        let w1 = lyapunov_gramian(
            &DenseMatrix::from_element(1, 1, -1.0),
            &DenseMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        assert_relative_eq!(w1[(0, 0)], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn lyapunov_residual_on_random_stable() {
        for seed in 0..10 {
            let m = random_matrix(4, 1.0, 100 + seed);
            let abscissa = spectral_abscissa(&m).unwrap().unwrap();
            let a = &m - DenseMatrix::identity(4, 4) * (abscissa + 0.3);
            let b = random_matrix(4, 1.0, 200 + seed).columns(0, 2).clone_owned();
            let bbt = &b * b.transpose();
            let w = lyapunov_gramian(&a, &b).unwrap();
            let resid = &a * &w + &w * a.transpose() + &bbt;
            assert!(resid.norm() <= 1e-8 * bbt.norm(), "seed {seed}: {}", resid.norm());
        }
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let a = DenseMatrix::from_row_slice(2, 2, &[0.1, 1.0, 0.0, -1.0]);
        assert_eq!(lyapunov_gramian(&a, &DenseMatrix::identity(2, 2)), Err(Error::NotHurwitz));
    }

    #[test]
    fn finite_horizon_examples() {
        let a = DenseMatrix::from_element(1, 1, -1.0);
        let b = DenseMatrix::from_element(1, 1, 1.0);
        let g = finite_horizon_gramian(&a, &b, 0.0, 30.0).unwrap();
        let closed = (1.0 - (-60.0f64).exp()) / 2.0;
        assert!((g[(0, 0)] - closed).abs() < 1e-9);
        let zero_b = DenseMatrix::zeros(3, 2);
        let g0 = finite_horizon_gramian(&random_matrix(3, 1.0, 1), &zero_b, 0.0, 2.0).unwrap();
        assert_eq!(g0, DenseMatrix::zeros(3, 3));
        let g2 = finite_horizon_gramian(&DenseMatrix::zeros(1, 1), &b, 1.0, 3.0).unwrap();
        assert_relative_eq!(g2[(0, 0)], 2.0, epsilon = 1e-13);
        assert!(finite_horizon_gramian(&a, &b, 1.0, 1.0).is_err());
    }

    #[test]
    fn finite_horizon_converges_to_lyapunov() {
        for seed in 0..5 {
            let m = random_matrix(4, 1.0, 300 + seed);
            let abscissa = spectral_abscissa(&m).unwrap().unwrap();
            let a = &m - DenseMatrix::identity(4, 4) * (abscissa + 0.5);
            let b = random_matrix(4, 1.0, 400 + seed);
            let rate = spectral_abscissa(&a).unwrap().unwrap().abs();
            let w = lyapunov_gramian(&a, &b).unwrap();
            let g = finite_horizon_gramian(&a, &b, 0.0, 40.0 / rate).unwrap();
            assert!((&g - &w).norm() < 1e-6 * w.norm());
        }
    }
}
