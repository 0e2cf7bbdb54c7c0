//! Dense complex matrix helpers and a deterministic Hermitian eigensolver.
//!
//! Everything in this module is hand-written on purpose: the verification
//! story of the crate rests on the diagonalization being an independent,
//! fully auditable route to the spectra, so the multiply and the eigensolver
//! avoid opaque third-party kernels.
//!
//! The eigensolver reduces the complex Hermitian problem to a real symmetric
//! one of doubled dimension, tridiagonalizes it with Householder reflections
//! (values only), and finds the eigenvalues with an implicit-shift QL
//! iteration. It is deterministic: identical inputs give identical output.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Dense complex matrix alias used across the crate.
pub type CMat = Array2<Complex64>;
/// Dense complex vector alias.
pub type CVec = Array1<Complex64>;

/// `A * B` with an i-k-j loop.
///
/// Two properties of this kernel are load-bearing for tests elsewhere:
///
/// * k ascends for every output entry, so each entry is one fixed
///   left-to-right sum — two algebraically identical products accumulate in
///   the same order and round identically;
/// * exact-zero left factors are skipped, so the (very sparse) ladder-built
///   operators multiply in O(nnz * n) time and entries never absorb
///   signed-zero noise from structurally absent terms.
pub fn matmul(a: &CMat, b: &CMat) -> Result<CMat> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    if ac != br {
        return Err(CoreError::DimensionMismatch(format!(
            "matmul: left is {ar}x{ac}, right is {br}x{bc}"
        )));
    }
    let mut out = Array2::from_elem((ar, bc), Complex64::new(0.0, 0.0));
    let bs = b.as_slice().expect("matmul: right operand must be standard layout");
    let os = out.as_slice_mut().expect("matmul: output is standard layout");
    for i in 0..ar {
        let row = out_row(os, i, bc);
        for k in 0..ac {
            let aik = a[(i, k)];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let brow = &bs[k * bc..(k + 1) * bc];
            for (o, &bkj) in row.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

fn out_row(slice: &mut [Complex64], i: usize, cols: usize) -> &mut [Complex64] {
    &mut slice[i * cols..(i + 1) * cols]
}

/// `M * v`, with the same k-ascending, exact-zero-skipping accumulation as
/// [`matmul`].
pub fn matvec(m: &CMat, v: &CVec) -> Result<CVec> {
    let (r, c) = m.dim();
    if c != v.len() {
        return Err(CoreError::DimensionMismatch(format!(
            "matvec: matrix is {r}x{c}, vector has length {}",
            v.len()
        )));
    }
    let mut out = Array1::from_elem(r, Complex64::new(0.0, 0.0));
    for i in 0..r {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..c {
            let mik = m[(i, k)];
            if mik.re == 0.0 && mik.im == 0.0 {
                continue;
            }
            acc += mik * v[k];
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn adjoint(m: &CMat) -> CMat {
    let (r, c) = m.dim();
    let mut out = Array2::from_elem((c, r), Complex64::new(0.0, 0.0));
    for i in 0..r {
        for j in 0..c {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
    out
}

/// Largest entry magnitude, `max_ij |m_ij|`.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max_ij |m_ij - conj(m_ji)|`: how far the matrix is from Hermitian.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let (r, c) = m.dim();
    if r != c {
        return f64::INFINITY;
    }
    let mut defect = 0.0f64;
    for i in 0..r {
        for j in i..c {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            defect = defect.max(d);
        }
    }
    defect
}

/// All eigenvalues of a Hermitian matrix, ascending.
///
/// The input must be Hermitian within `1e-10 * max|entry|`; the solve then
/// runs on the exactly Hermitized `(M + M^dagger)/2`. The complex problem
/// `(A + iB) v = lambda v` is equivalent to the real symmetric problem
/// `[[A, -B], [B, A]]` of doubled dimension whose spectrum is each lambda
/// twice; the doubled eigenvalues are paired off after sorting.
pub fn eigvalsh(m: &CMat) -> Result<Vec<f64>> {
    let (r, c) = m.dim();
    if r != c {
        return Err(CoreError::DimensionMismatch(format!("eigvalsh: matrix is {r}x{c}")));
    }
    if r == 0 {
        return Ok(Vec::new());
    }
    let scale = max_abs(m);
    let defect = hermiticity_defect(m);
    let allowed = 1e-10 * scale.max(f64::MIN_POSITIVE);
    if defect > allowed {
        return Err(CoreError::NotHermitian { defect, allowed });
    }

    // Doubled real symmetric matrix from the Hermitized input.
    let n = r;
    let mut d = vec![0.0f64; 4 * n * n];
    let dn = 2 * n;
    for i in 0..n {
        for j in 0..n {
            let h = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            d[i * dn + j] = h.re;
            d[(i + n) * dn + (j + n)] = h.re;
            d[i * dn + (j + n)] = -h.im;
            d[(i + n) * dn + j] = h.im;
        }
    }

    let mut diag = vec![0.0f64; dn];
    let mut off = vec![0.0f64; dn];
    tridiagonalize_symmetric(&mut d, dn, &mut diag, &mut off);
    ql_implicit(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);

    // Every eigenvalue appears exactly twice; average adjacent pairs.
    let mut out = Vec::with_capacity(n);
    for p in 0..n {
        out.push(0.5 * (diag[2 * p] + diag[2 * p + 1]));
    }
    Ok(out)
}

/// Householder reduction of a symmetric matrix (row-major in `a`, dimension
/// `n`) to tridiagonal form; eigenvalues only, so the orthogonal factor is
/// not accumulated. On return `diag` holds the diagonal and `off[1..]` the
/// subdiagonal (`off[0] = 0`).
fn tridiagonalize_symmetric(a: &mut [f64], n: usize, diag: &mut [f64], off: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i; // row i has l = i entries to the left of the diagonal
        let mut h = 0.0f64;
        if l > 1 {
            let mut scale = 0.0f64;
            for k in 0..l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                off[i] = a[i * n + (l - 1)];
            } else {
                let inv_scale = 1.0 / scale;
                for k in 0..l {
                    a[i * n + k] *= inv_scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + (l - 1)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                off[i] = scale * g;
                h -= f * g;
                a[i * n + (l - 1)] = f - g;
                let mut f_acc = 0.0f64;
                for j in 0..l {
                    // u = A . v / h accumulated into off[] (temporary use)
                    let mut g_acc = 0.0f64;
                    for k in 0..=j {
                        g_acc += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..l {
                        g_acc += a[k * n + j] * a[i * n + k];
                    }
                    off[j] = g_acc / h;
                    f_acc += off[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..l {
                    let f = a[i * n + j];
                    let g = off[j] - hh * f;
                    off[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * off[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            off[i] = a[i * n + (l - 1)];
        }
        diag[i] = h;
    }
    diag[0] = 0.0;
    off[0] = 0.0;
    for i in 0..n {
        diag[i] = a[i * n + i];
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix given by its
/// diagonal and subdiagonal (`off[1..]`); eigenvalues land in `diag`,
/// unsorted.
fn ql_implicit(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        off[i - 1] = off[i];
    }
    off[n - 1] = 0.0;
    // Absolute deflation floor at the scale of the whole matrix. Degenerate
    // clusters leave subdiagonal couplings parked a few ulps above the
    // local-scale test below (noise of the cluster value, not of the pair
    // difference), and those would otherwise exhaust the sweep budget; at
    // this size they are rounding noise of the input, so deflating them
    // keeps the usual backward-error guarantee.
    let anorm = diag
        .iter()
        .zip(off.iter())
        .map(|(d, e)| d.abs() + e.abs())
        .fold(0.0, f64::max);
    if !anorm.is_finite() {
        return Err(CoreError::InvalidRequest(
            "eigvalsh: matrix has non-finite entries".to_string(),
        ));
    }
    let floor = 16.0 * f64::EPSILON * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a negligible subdiagonal element.
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd || off[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                let bad = diag.iter().chain(off.iter()).filter(|v| !v.is_finite()).count();
                return Err(CoreError::InvalidRequest(format!(
                    "eigvalsh: QL iteration failed to converge within 50 sweeps \
                     (n = {n}, l = {l}, m = {m}, off[l] = {:.3e}, diag[l] = {:.3e}, \
                     non-finite entries = {bad})",
                    off[l], diag[l]
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + copysign_nonzero(r, g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    diag[l] -= p;
                    off[l] = g;
                    off[m] = 0.0;
                }
            }
        }
    }
    Ok(())
}

fn copysign_nonzero(magnitude: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 { magnitude } else { -magnitude }
}
