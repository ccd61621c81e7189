//! Dense and structured eigensolvers.
//!
//! The mean-field search needs the quasiparticle energies thousands of times
//! but never the modes. Those energies are the singular values of a cyclic
//! bidiagonal matrix: relabelling the ring zig-zag turns it into a band matrix
//! with two sub- and super-diagonals, LAPACK reduces that to bidiagonal form
//! and finishes with dqds. Everything is O(n²) and accurate to eps·‖K‖
//! absolutely. General dense problems go to nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
///
/// Column `k` of `vectors` belongs to `values[k]`.
pub fn symmetric_eigen(m: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or_else(|| {
        Error::Solver(format!("symmetric eigensolver did not converge (n = {n})"))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok((values, vectors))
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_norm_symmetric(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0).ok_or_else(|| {
        Error::Solver(format!("symmetric eigensolver did not converge (n = {n})"))
    })?;
    Ok(eig
        .eigenvalues
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs())))
}

/// Singular values (ascending) of the cyclic bidiagonal matrix with diagonal
/// `diag`, `upper[i]` at `(i, i+1)` and `corner` at `(n-1, 0)`.
///
/// For `n = 2` the corner sits at `(1, 0)` and the matrix is a general 2×2.
pub fn cyclic_bidiagonal_singular_values(
    diag: &[f64],
    upper: &[f64],
    corner: f64,
) -> Result<Vec<f64>> {
    let n = diag.len();
    if n < 2 || upper.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "cyclic bidiagonal needs n >= 2 and n-1 couplings (n = {n}, couplings = {})",
            upper.len()
        )));
    }
    // Zig-zag relabelling 0, n-1, 1, n-2, ... puts every ring neighbour at
    // distance <= 2.
    let mut position = vec![0usize; n];
    for t in 0..n {
        let site = if t % 2 == 0 { t / 2 } else { n - 1 - t / 2 };
        position[site] = t;
    }
    const KL: usize = 2;
    const KU: usize = 2;
    let ldab = KL + KU + 1;
    // LAPACK band storage: A(r, c) lives at ab[c * ldab + KU + r - c].
    let mut ab = vec![0.0; ldab * n];
    let mut put = |site_r: usize, site_c: usize, v: f64| {
        let (r, c) = (position[site_r], position[site_c]);
        ab[c * ldab + KU + r - c] += v;
    };
    for (i, &d) in diag.iter().enumerate() {
        put(i, i, d);
    }
    for (i, &u) in upper.iter().enumerate() {
        put(i, i + 1, u);
    }
    put(n - 1, 0, corner);

    let size = n as i32;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n - 1];
    let mut work = vec![0.0; 4 * n];
    let mut info = 0;
    // SAFETY: every buffer matches the dimensions passed alongside it, and no
    // singular vectors are requested, so the unit-length placeholders are
    // never touched.
    unsafe {
        lapack::dgbbrd(
            b'N',
            size,
            size,
            &[0],
            KL as i32,
            KU as i32,
            &mut ab,
            ldab as i32,
            &mut d,
            &mut e,
            &mut [0.0],
            1,
            &mut [0.0],
            1,
            &mut [0.0],
            1,
            &mut work,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Solver(format!(
            "band bidiagonalization failed (info = {info})"
        )));
    }
    // SAFETY: as above; with no vectors requested dbdsqr runs dqds in place.
    unsafe {
        lapack::dbdsqr(
            b'U',
            size,
            &[0],
            &[0],
            &[0],
            &mut d,
            &mut e,
            &mut [0.0],
            1,
            &mut [0.0],
            1,
            &mut [0.0],
            1,
            &mut work,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Solver(format!(
            "bidiagonal singular values did not converge (info = {info})"
        )));
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}
