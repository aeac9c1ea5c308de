//! Dense symmetric linear algebra for small covariance matrices (d ≤ ~16):
//! Cholesky factorization for determinants and a cyclic Jacobi eigensolver.
//! Determinants are never computed by cofactor expansion; the covariance
//! matrices of clustered observation times are ill-conditioned.

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix
/// in row-major order. `None` if the matrix is not (numerically) positive
/// definite.
pub fn cholesky(dim: usize, data: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(data.len(), dim * dim);
    let scale: f64 = (0..dim).map(|i| data[i * dim + i].abs()).fold(0.0, f64::max);
    let floor = scale * f64::EPSILON * dim as f64;
    let mut l = vec![0.0f64; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = data[i * dim + j];
            for k in 0..j {
                sum -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if sum <= floor {
                    return None;
                }
                l[i * dim + i] = sum.sqrt();
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    Some(l)
}

/// Determinant of a symmetric positive semi-definite matrix via Cholesky;
/// 0 when the factorization fails (numerically singular).
pub fn det_psd(dim: usize, data: &[f64]) -> f64 {
    match cholesky(dim, data) {
        Some(l) => {
            let mut det = 1.0;
            for i in 0..dim {
                let d = l[i * dim + i];
                det *= d * d;
            }
            det
        }
        None => 0.0,
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted in
/// descending order. Converges to machine precision for the small dense
/// matrices used here.
pub fn symmetric_eigenvalues(dim: usize, data: &[f64]) -> Vec<f64> {
    assert_eq!(data.len(), dim * dim);
    let mut a = data.to_vec();
    if dim == 1 {
        return vec![a[0]];
    }
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = frob.max(f64::MIN_POSITIVE) * 1e-15;
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p * dim + q] * a[p * dim + q];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    eig
}
