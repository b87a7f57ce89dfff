//! Cyclic Jacobi eigensolver for small symmetric and Hermitian matrices.

use nalgebra::{DMatrix, DVector, Matrix6};
use num_complex::Complex64;

pub type CMatrix6 = Matrix6<Complex64>;

/// Eigenvalues (ascending) and column eigenvectors of a real symmetric matrix.
pub fn jacobi_symmetric(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(1e-300);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// Eigenpairs of a Hermitian 6×6 matrix through its real 12×12 embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is that of `h` with each value doubled.
pub fn jacobi_hermitian(h: &CMatrix6) -> ([f64; 6], CMatrix6) {
    let big = DMatrix::from_fn(12, 12, |r, c| {
        let z = h[(r % 6, c % 6)];
        match (r < 6, c < 6) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let (vals, vecs) = jacobi_symmetric(&big);
    let mut out = [0.0; 6];
    let mut ev = CMatrix6::zeros();
    let mut taken: Vec<nalgebra::Vector6<Complex64>> = vec![];
    let mut slot = 0;
    for idx in 0..12 {
        if slot == 6 {
            break;
        }
        let mut z = nalgebra::Vector6::from_fn(|r, _| Complex64::new(vecs[(r, idx)], vecs[(r + 6, idx)]));
        for w in &taken {
            let proj = w.dotc(&z);
            z -= w * proj;
        }
        let nz = z.norm();
        if nz < 1e-6 {
            continue;
        }
        z /= Complex64::new(nz, 0.0);
        out[slot] = vals[idx];
        ev.set_column(slot, &z);
        taken.push(z);
        slot += 1;
    }
    (out, ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_exact() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let (vals, _) = jacobi_symmetric(&d);
        assert_eq!(vals.as_slice(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn symmetric_matches_reconstruction() {
        let m = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 + if i == j { 2.0 } else { 0.0 });
        let s = &m + m.transpose();
        let (vals, vecs) = jacobi_symmetric(&s);
        let recon = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!((recon - &s).norm() < 1e-12);
        let mut ref_vals: Vec<f64> = s.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ref_vals.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(ref_vals) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigenpairs() {
        let mut h = CMatrix6::zeros();
        for i in 0..6 {
            for j in 0..6 {
                let z = Complex64::new(((i + 2 * j) % 4) as f64, (i as f64 - j as f64) * 0.3);
                h[(i, j)] += z;
                h[(j, i)] += z.conj();
            }
        }
        let (vals, vecs) = jacobi_hermitian(&h);
        for c in 0..6 {
            let s = vecs.column(c);
            let r = h * s - s * Complex64::new(vals[c], 0.0);
            assert!(r.norm() < 1e-11);
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}
