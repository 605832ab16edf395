//! Test-only reference implementations, kept independent of the code paths
//! they check. Used by unit tests across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Deliberately does not share any code with the SVD-based production path.
pub fn jacobi_hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();

    let off = |m: &DMatrix<Complex64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s
    };
    let scale: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);

    for _sweep in 0..100 {
        if off(&m) <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let u = apq / mag; // e^{jφ}
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // unitary J: J_pp = c, J_pq = s, J_qp = −s·conj(u), J_qq = c·conj(u)
                let ubar = u.conj();
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = aip * c - aiq * (ubar * s);
                    m[(i, q)] = aip * s + aiq * (ubar * c);
                }
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = apj * c - aqj * (u * s);
                    m[(q, j)] = apj * s + aqj * (u * c);
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)].re).collect()
}

/// Random matrix with i.i.d. CN(0,1) entries.
pub fn random_complex_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Random complex vector with i.i.d. CN(0,1) entries.
pub fn random_complex_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // diag(5, 2, −1) conjugated by a Householder-ish unitary
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let g = random_complex_matrix(3, 3, &mut rng);
        let q = g.qr().q();
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(5.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let a = &q * d * q.adjoint();
        let mut ev = jacobi_hermitian_eigenvalues(&a);
        ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert!((ev[0] - 5.0).abs() < 1e-10);
        assert!((ev[1] - 2.0).abs() < 1e-10);
        assert!((ev[2] + 1.0).abs() < 1e-10);
    }
}
