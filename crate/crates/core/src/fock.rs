//! Truncated two-mode Fock-basis matrix representations of every operator
//! the models are built from: single-mode ladders, positions and momenta,
//! complex coordinates, angular momentum, deformed (shifted) coordinates,
//! frame-dependent ladder pairs, and number states.
//!
//! Basis convention: the two-mode basis states are `|n_x, n_y>` with
//! `0 <= n_x, n_y < N` and the flat index `n_x * N + n_y` (row-major in the
//! first mode). All builders record the per-mode cutoff and the reference
//! length `l_ref` used for the position/momentum representation so that
//! mismatched operands are caught instead of silently combined.
//!
//! Truncation artifacts live in the top levels of each mode; commutator
//! identities are therefore checked on an *interior projector* that drops a
//! margin of top levels.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::linalg::{adjoint, matmul, matvec, max_abs, CMat, CVec};
use crate::params::{derive, PhysParams};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Default interior margin for a per-mode cutoff `n`: one fifth, rounded up.
pub fn default_margin(n: usize) -> usize {
    n.div_ceil(5)
}

/// Single-mode annihilation matrix: entries `a[n-1, n] = sqrt(n)`.
pub fn ladder(n: usize) -> Result<CMat> {
    if n < 2 {
        return Err(CoreError::CutoffTooSmall(format!(
            "single-mode ladder needs a cutoff of at least 2 levels, got {n}"
        )));
    }
    let mut a = Array2::from_elem((n, n), c(0.0, 0.0));
    for k in 1..n {
        a[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Which of the two modes a single-mode operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    X,
    Y,
}

/// Embed a single-mode `N x N` operator into the two-mode `N^2 x N^2` space,
/// acting on the designated mode and as the identity on the other.
pub fn embed_two_modes(op: &CMat, mode: Mode) -> Result<CMat> {
    let (r, cdim) = op.dim();
    if r != cdim {
        return Err(CoreError::DimensionMismatch(format!(
            "embed_two_modes: operator must be square, got {r}x{cdim}"
        )));
    }
    let n = r;
    let dim = n * n;
    let mut out = Array2::from_elem((dim, dim), c(0.0, 0.0));
    match mode {
        Mode::X => {
            for ix in 0..n {
                for jx in 0..n {
                    let v = op[(ix, jx)];
                    if v.re == 0.0 && v.im == 0.0 {
                        continue;
                    }
                    for iy in 0..n {
                        out[(ix * n + iy, jx * n + iy)] = v;
                    }
                }
            }
        }
        Mode::Y => {
            for iy in 0..n {
                for jy in 0..n {
                    let v = op[(iy, jy)];
                    if v.re == 0.0 && v.im == 0.0 {
                        continue;
                    }
                    for ix in 0..n {
                        out[(ix * n + iy, ix * n + jy)] = v;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Two-mode position and momentum matrices at a reference length scale.
#[derive(Debug, Clone)]
pub struct CoordinateSet {
    pub per_mode_cutoff: usize,
    pub l_ref: f64,
    pub x: CMat,
    pub y: CMat,
    pub p_x: CMat,
    pub p_y: CMat,
}

/// Build `x, y, p_x, p_y` on the two-mode basis:
/// `x = l_ref (a_x + a_x^dagger) / sqrt(2)`,
/// `p_x = i (a_x^dagger - a_x) / (l_ref sqrt(2))`, and likewise for `y`.
///
/// `l_ref` is an arbitrary positive reference length; physical eigenvalues
/// must not depend on it (that independence is itself tested downstream).
pub fn position_momentum(n: usize, l_ref: f64) -> Result<CoordinateSet> {
    if l_ref <= 0.0 || !l_ref.is_finite() {
        return Err(CoreError::InvalidScale(l_ref));
    }
    let a = ladder(n)?;
    let ax = embed_two_modes(&a, Mode::X)?;
    let ay = embed_two_modes(&a, Mode::Y)?;
    let sqrt2 = std::f64::consts::SQRT_2;
    let xs = l_ref / sqrt2;
    let ps = 1.0 / (l_ref * sqrt2);
    let build = |am: &CMat, pos_scale: f64, mom_scale: f64| -> (CMat, CMat) {
        let ad = adjoint(am);
        let pos = (am + &ad).mapv(|v| v * pos_scale);
        let mom = (&ad - am).mapv(|v| v * c(0.0, mom_scale));
        (pos, mom)
    };
    let (x, p_x) = build(&ax, xs, ps);
    let (y, p_y) = build(&ay, xs, ps);
    Ok(CoordinateSet { per_mode_cutoff: n, l_ref, x, y, p_x, p_y })
}

/// Complex coordinates and momenta built from a [`CoordinateSet`].
#[derive(Debug, Clone)]
pub struct ComplexCoords {
    pub per_mode_cutoff: usize,
    pub l_ref: f64,
    /// `z = x + i y`.
    pub z: CMat,
    /// `z_bar = x - i y`; the matrix adjoint of `z`, exactly.
    pub z_bar: CMat,
    /// `p_z = (p_x - i p_y) / 2`.
    pub p_z: CMat,
    /// `p_z_bar = (p_x + i p_y) / 2`; the matrix adjoint of `p_z`, exactly.
    pub p_z_bar: CMat,
}

/// `z = x + iy`, `z_bar = x - iy`, `p_z = (p_x - i p_y)/2`,
/// `p_z_bar = (p_x + i p_y)/2`.
///
/// The canonical pairs are `[z, p_z] = i` and `[z_bar, p_z_bar] = i` (checked
/// on the interior projector), with `[z, p_z_bar] = [z_bar, p_z] = 0`.
pub fn complex_coords(coords: &CoordinateSet) -> ComplexCoords {
    let i1 = c(0.0, 1.0);
    let z = &coords.x + &coords.y.mapv(|v| v * i1);
    let z_bar = &coords.x - &coords.y.mapv(|v| v * i1);
    let p_z = (&coords.p_x - &coords.p_y.mapv(|v| v * i1)).mapv(|v| v * 0.5);
    let p_z_bar = (&coords.p_x + &coords.p_y.mapv(|v| v * i1)).mapv(|v| v * 0.5);
    ComplexCoords {
        per_mode_cutoff: coords.per_mode_cutoff,
        l_ref: coords.l_ref,
        z,
        z_bar,
        p_z,
        p_z_bar,
    }
}

/// Orbital angular momentum `L_z = i (z p_z - z_bar p_z_bar)`.
///
/// Entry-for-entry this equals `x p_y - y p_x` (the two expressions are the
/// same linear combination of the same matrix monomials, and the
/// zero-skipping multiply accumulates them identically), which is asserted
/// in tests rather than assumed.
pub fn angular_momentum(cc: &ComplexCoords) -> Result<CMat> {
    let zp = matmul(&cc.z, &cc.p_z)?;
    let zbp = matmul(&cc.z_bar, &cc.p_z_bar)?;
    Ok((&zp - &zbp).mapv(|v| v * c(0.0, 1.0)))
}

/// Whether downstream Hamiltonian assembly keeps or drops the terms of
/// second order in `theta` that arise from products of shifted coordinates.
/// The shifted coordinates themselves are always the literal first-degree
/// expressions; this tag only matters to quadratic assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ShiftOrder {
    Exact,
    FirstOrder,
}

/// Deformed (shifted) coordinates `z_hat = z + i theta p_z_bar` and
/// `z_hat_bar = z_bar - i theta p_z`.
#[derive(Debug, Clone)]
pub struct BoppPair {
    pub per_mode_cutoff: usize,
    pub l_ref: f64,
    pub theta: f64,
    pub order: ShiftOrder,
    pub z_hat: CMat,
    pub z_hat_bar: CMat,
}

/// Build the shifted coordinates. `z_hat_bar` is the matrix adjoint of
/// `z_hat` exactly, and on the interior projector `[z_hat, z_hat_bar] =
/// 2 theta` while `[z_hat, p_z] = i` is preserved.
pub fn bopp_shift(cc: &ComplexCoords, theta: f64, order: ShiftOrder) -> BoppPair {
    let it = c(0.0, theta);
    let z_hat = &cc.z + &cc.p_z_bar.mapv(|v| v * it);
    let z_hat_bar = &cc.z_bar - &cc.p_z.mapv(|v| v * it);
    BoppPair {
        per_mode_cutoff: cc.per_mode_cutoff,
        l_ref: cc.l_ref,
        theta,
        order,
        z_hat,
        z_hat_bar,
    }
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &CMat, b: &CMat) -> Result<CMat> {
    let ab = matmul(a, b)?;
    let ba = matmul(b, a)?;
    Ok(&ab - &ba)
}

/// Diagonal 0/1 projector onto `|n_x, n_y>` with both `n_x` and `n_y` below
/// `n - margin`. `margin = 0` is the whole space (used by the self-check
/// command to demonstrate the truncation artifacts it otherwise excludes).
pub fn interior_projector(n: usize, margin: usize) -> Result<CMat> {
    if margin >= n {
        return Err(CoreError::InvalidMargin { margin, cutoff: n });
    }
    let keep = n - margin;
    let dim = n * n;
    let mut p = Array2::from_elem((dim, dim), c(0.0, 0.0));
    for nx in 0..keep {
        for ny in 0..keep {
            let i = nx * n + ny;
            p[(i, i)] = c(1.0, 0.0);
        }
    }
    Ok(p)
}

/// A frame-dependent ladder pair on the two-mode space.
///
/// For a positive frame constant `beta`,
/// `a = (2 i p_z + beta z_bar) / (2 sqrt(beta))` and
/// `b = (2 i p_z_bar + beta z) / (2 sqrt(beta))` satisfy
/// `[a, a^dagger] = [b, b^dagger] = 1` with all cross commutators zero, and
/// `a^dagger a - b^dagger b = L_z` for every `beta`.
#[derive(Debug, Clone)]
pub struct LadderPair {
    pub per_mode_cutoff: usize,
    pub l_ref: f64,
    /// Frame constant: energy density of the quadratic form the pair
    /// diagonalizes (`e*B_tilde` for the Landau frame, `m_tilde*varpi` for
    /// the oscillator frame).
    pub beta: f64,
    pub a: CMat,
    pub b: CMat,
}

/// Build the ladder pair for an arbitrary positive frame constant.
pub fn ladders_for_beta(cc: &ComplexCoords, beta: f64) -> Result<LadderPair> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(CoreError::IllPosed(format!(
            "ladder frame constant must be positive and finite, got {beta}"
        )));
    }
    let s = 1.0 / (2.0 * beta.sqrt());
    let two_i = c(0.0, 2.0 * s);
    let bs = c(beta * s, 0.0);
    let a = &cc.p_z.mapv(|v| v * two_i) + &cc.z_bar.mapv(|v| v * bs);
    let b = &cc.p_z_bar.mapv(|v| v * two_i) + &cc.z.mapv(|v| v * bs);
    Ok(LadderPair { per_mode_cutoff: cc.per_mode_cutoff, l_ref: cc.l_ref, beta, a, b })
}

/// Which model's natural frame to use for [`model_ladders`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderModel {
    /// Frame constant `e * B_tilde`.
    Landau,
    /// Frame constant `m_tilde * varpi`.
    Oscillator,
}

/// The ladder pair in the frame the named model's Hamiltonian diagonalizes
/// in. The second operator is the adjoint-corrected partner: the pair
/// satisfies the canonical algebra (`[b, b^dagger] = +1`), which fixes the
/// sign of the momentum term in `b`.
pub fn model_ladders(
    phys: &PhysParams,
    model: LadderModel,
    cc: &ComplexCoords,
) -> Result<LadderPair> {
    let d = derive(phys);
    let beta = match model {
        LadderModel::Landau => {
            let beta = phys.e * d.b_tilde;
            if beta.is_nan() || beta <= 0.0 {
                return Err(CoreError::IllPosed(format!(
                    "Landau ladder frame requires e*B_tilde > 0, got {beta}"
                )));
            }
            beta
        }
        LadderModel::Oscillator => {
            if !d.well_posed_oscillator {
                return Err(CoreError::IllPosed(format!(
                    "oscillator ladder frame requires m_tilde > 0 and varpi^2 > 0, got \
                     m_tilde = {}, varpi^2 = {}",
                    d.m_tilde, d.varpi_sq
                )));
            }
            d.m_tilde * d.varpi()
        }
    };
    ladders_for_beta(cc, beta)
}

/// A vector on the two-mode basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub per_mode_cutoff: usize,
    pub amplitudes: CVec,
    /// `(n1, n2)` when constructed as a number state.
    pub label: Option<(u32, u32)>,
}

impl StateVector {
    /// Euclidean norm of the amplitudes.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Build the normalized number state
/// `(a^dagger)^{n1} (b^dagger)^{n2} |0,0> / sqrt(n1! n2!)`.
///
/// The construction is faithful to that formula; it yields a unit-norm
/// eigenvector of `a^dagger a` and `b^dagger b` when the pair's frame is
/// matched to the basis scale (`beta * l_ref^2 = 1`), which is how every
/// caller in this crate uses it.
pub fn build_number_state(n1: u32, n2: u32, pair: &LadderPair) -> Result<StateVector> {
    let n = pair.per_mode_cutoff;
    if (n1 as usize) + (n2 as usize) >= n.saturating_sub(1) {
        return Err(CoreError::CutoffTooSmall(format!(
            "number state ({n1}, {n2}) needs n1 + n2 < N - 1 = {}",
            n.saturating_sub(1)
        )));
    }
    let dim = n * n;
    let mut v = CVec::from_elem(dim, c(0.0, 0.0));
    v[0] = c(1.0, 0.0); // |0, 0> has flat index 0
    let a_dag = adjoint(&pair.a);
    let b_dag = adjoint(&pair.b);
    for _ in 0..n1 {
        v = matvec(&a_dag, &v)?;
    }
    for _ in 0..n2 {
        v = matvec(&b_dag, &v)?;
    }
    let mut fact = 1.0f64;
    for k in 1..=n1 {
        fact *= k as f64;
    }
    for k in 1..=n2 {
        fact *= k as f64;
    }
    let scale = c(1.0 / fact.sqrt(), 0.0);
    Ok(StateVector {
        per_mode_cutoff: n,
        amplitudes: v.mapv(|x| x * scale),
        label: Some((n1, n2)),
    })
}

/// One named residual from the operator-algebra suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AlgebraCheck {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Outcome of the operator-algebra self-check suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AlgebraReport {
    pub per_mode_cutoff: usize,
    pub margin: usize,
    pub l_ref: f64,
    pub theta: f64,
    /// Ladder frame constant the suite ran with.
    pub beta: f64,
    pub checks: Vec<AlgebraCheck>,
    pub all_pass: bool,
}

/// Run the operator-algebra residual suite on the interior projector:
/// ladder commutators against the identity, ladder cross commutators against
/// zero, the deformed coordinate commutator against `2 theta`, the angular
/// momentum dual form entry-for-entry, and adjoint pairing of the
/// conjugate-coordinate matrices.
pub fn algebra_suite(
    n: usize,
    l_ref: f64,
    margin: usize,
    theta: f64,
    beta: f64,
) -> Result<AlgebraReport> {
    const THRESHOLD: f64 = 1e-9;
    let coords = position_momentum(n, l_ref)?;
    let cc = complex_coords(&coords);
    let pair = ladders_for_beta(&cc, beta)?;
    let p = interior_projector(n, margin)?;
    let dim = n * n;
    let eye = Array2::from_diag_elem(dim, c(1.0, 0.0));

    let restrict = |m: &CMat| -> Result<f64> {
        let pm = matmul(&p, m)?;
        Ok(max_abs(&matmul(&pm, &p)?))
    };

    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64| {
        checks.push(AlgebraCheck {
            name: name.to_string(),
            residual,
            threshold: THRESHOLD,
            pass: residual <= THRESHOLD,
        });
    };

    let comm_a = commutator(&pair.a, &adjoint(&pair.a))?;
    push("ladder-commutator-a", restrict(&(&comm_a - &eye))?);

    let comm_b = commutator(&pair.b, &adjoint(&pair.b))?;
    push("ladder-commutator-b", restrict(&(&comm_b - &eye))?);

    let cross = commutator(&pair.a, &pair.b)?;
    let cross_dag = commutator(&pair.a, &adjoint(&pair.b))?;
    push("ladder-cross-commutators", restrict(&cross)?.max(restrict(&cross_dag)?));

    let bopp = bopp_shift(&cc, theta, ShiftOrder::Exact);
    let comm_zhat = commutator(&bopp.z_hat, &bopp.z_hat_bar)?;
    let two_theta = eye.mapv(|v| v * 2.0 * theta);
    push("deformed-coordinate-commutator", restrict(&(&comm_zhat - &two_theta))?);

    let lz = angular_momentum(&cc)?;
    let xpy = matmul(&coords.x, &coords.p_y)?;
    let ypx = matmul(&coords.y, &coords.p_x)?;
    let dual = &xpy - &ypx;
    push("angular-momentum-dual-form", max_abs(&(&lz - &dual)));

    let adj = max_abs(&(&cc.z_bar - &adjoint(&cc.z)))
        .max(max_abs(&(&cc.p_z_bar - &adjoint(&cc.p_z))))
        .max(max_abs(&(&bopp.z_hat_bar - &adjoint(&bopp.z_hat))));
    push("adjoint-pairing", adj);

    let all_pass = checks.iter().all(|ch| ch.pass);
    Ok(AlgebraReport { per_mode_cutoff: n, margin, l_ref, theta, beta, checks, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;

    const TAU: f64 = 1e-10;

    fn coords(n: usize, l_ref: f64) -> CoordinateSet {
        position_momentum(n, l_ref).unwrap()
    }

    fn ccoords(n: usize, l_ref: f64) -> ComplexCoords {
        complex_coords(&coords(n, l_ref))
    }

    fn eye(dim: usize) -> CMat {
        Array2::from_diag_elem(dim, c(1.0, 0.0))
    }

    fn interior_residual(m: &CMat, n: usize, margin: usize) -> f64 {
        let p = interior_projector(n, margin).unwrap();
        max_abs(&matmul(&matmul(&p, m).unwrap(), &p).unwrap())
    }

    #[test]
    fn ladder_entries_are_square_roots() {
        let a = ladder(3).unwrap();
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(a[(1, 2)], c(2f64.sqrt(), 0.0));
        let nonzero = a.iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn ladder_two_levels() {
        let a = ladder(2).unwrap();
        assert_eq!(a[(0, 0)], c(0.0, 0.0));
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(a[(1, 0)], c(0.0, 0.0));
        assert_eq!(a[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn ladder_rejects_tiny_cutoff() {
        assert!(matches!(ladder(1), Err(CoreError::CutoffTooSmall(_))));
    }

    #[test]
    fn single_mode_commutator_has_the_truncation_corner() {
        // [a, a^dagger] = diag(1, 1, -(N-1)) at N = 3, up to the rounding
        // of sqrt(k)^2 (which lands one ulp off k for non-square k).
        let a = ladder(3).unwrap();
        let comm = commutator(&a, &adjoint(&a)).unwrap();
        assert!((comm[(0, 0)] - c(1.0, 0.0)).norm() <= 1e-12);
        assert!((comm[(1, 1)] - c(1.0, 0.0)).norm() <= 1e-12);
        assert!((comm[(2, 2)] - c(-2.0, 0.0)).norm() <= 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(comm[(i, j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn embedding_identity_is_identity() {
        let n = 4;
        let id = eye(n);
        assert_eq!(embed_two_modes(&id, Mode::X).unwrap(), eye(n * n));
        assert_eq!(embed_two_modes(&id, Mode::Y).unwrap(), eye(n * n));
    }

    #[test]
    fn embedding_acts_on_the_designated_mode_only() {
        // a_x applied to |1, 0> gives |0, 0>.
        let n = 3;
        let ax = embed_two_modes(&ladder(n).unwrap(), Mode::X).unwrap();
        let mut v = CVec::from_elem(n * n, c(0.0, 0.0));
        v[n] = c(1.0, 0.0); // |1, 0> has flat index 1*n + 0
        let w = matvec(&ax, &v).unwrap();
        assert_eq!(w[0], c(1.0, 0.0));
        assert_eq!(w.iter().filter(|x| x.norm() > 0.0).count(), 1);
    }

    #[test]
    fn different_modes_commute_exactly() {
        let n = 4;
        let ax = embed_two_modes(&ladder(n).unwrap(), Mode::X).unwrap();
        let ay = embed_two_modes(&ladder(n).unwrap(), Mode::Y).unwrap();
        let comm = commutator(&ax, &adjoint(&ay)).unwrap();
        assert_eq!(max_abs(&comm), 0.0);
    }

    #[test]
    fn mode_permutation_round_trip() {
        // Swapping the two mode indices maps an X embedding onto the Y
        // embedding of the same operator, exactly.
        let n = 4;
        let op = ladder(n).unwrap();
        let on_x = embed_two_modes(&op, Mode::X).unwrap();
        let on_y = embed_two_modes(&op, Mode::Y).unwrap();
        let dim = n * n;
        let mut perm = Array2::from_elem((dim, dim), c(0.0, 0.0));
        for nx in 0..n {
            for ny in 0..n {
                perm[(nx * n + ny, ny * n + nx)] = c(1.0, 0.0);
            }
        }
        let swapped = matmul(&matmul(&perm, &on_x).unwrap(), &perm).unwrap();
        assert_eq!(swapped, on_y);
    }

    #[test]
    fn position_momentum_rejects_bad_scale() {
        assert!(matches!(position_momentum(4, 0.0), Err(CoreError::InvalidScale(_))));
        assert!(matches!(position_momentum(4, -1.0), Err(CoreError::InvalidScale(_))));
    }

    #[test]
    fn canonical_commutator_on_the_interior() {
        let n = 8;
        let cs = coords(n, 0.7);
        let comm = commutator(&cs.x, &cs.p_x).unwrap();
        let dev = &comm - &eye(n * n).mapv(|v| v * c(0.0, 1.0));
        assert!(interior_residual(&dev, n, 1) <= TAU);
    }

    #[test]
    fn cross_mode_position_momentum_commute_exactly() {
        let n = 6;
        let cs = coords(n, 1.3);
        assert_eq!(max_abs(&commutator(&cs.x, &cs.p_y).unwrap()), 0.0);
    }

    #[test]
    fn ground_state_position_variance() {
        // <0| x^2 |0> = l_ref^2 / 2.
        let n = 6;
        let l = 0.9;
        let cs = coords(n, l);
        let x2 = matmul(&cs.x, &cs.x).unwrap();
        let got = x2[(0, 0)].re;
        assert!((got - l * l / 2.0).abs() <= 1e-15);
    }

    #[test]
    fn coordinate_matrices_are_hermitian_exactly() {
        let cs = coords(6, 1.1);
        for m in [&cs.x, &cs.y, &cs.p_x, &cs.p_y] {
            assert_eq!(hermiticity_defect(m), 0.0);
        }
    }

    #[test]
    fn complex_coordinate_canonical_pairs() {
        let n = 8;
        let cc = ccoords(n, 0.8);
        let i_eye = eye(n * n).mapv(|v| v * c(0.0, 1.0));
        let comm_zp = commutator(&cc.z, &cc.p_z).unwrap();
        assert!(interior_residual(&(&comm_zp - &i_eye), n, 1) <= TAU);
        let comm_zbpb = commutator(&cc.z_bar, &cc.p_z_bar).unwrap();
        assert!(interior_residual(&(&comm_zbpb - &i_eye), n, 1) <= TAU);
        // Mixed pairs vanish.
        assert!(interior_residual(&commutator(&cc.z, &cc.p_z_bar).unwrap(), n, 1) <= TAU);
        assert!(interior_residual(&commutator(&cc.z_bar, &cc.p_z).unwrap(), n, 1) <= TAU);
    }

    #[test]
    fn commutative_coordinates_commute_exactly() {
        let cc = ccoords(6, 1.0);
        assert_eq!(max_abs(&commutator(&cc.z, &cc.z_bar).unwrap()), 0.0);
    }

    #[test]
    fn adjoint_pairing_is_exact() {
        let cc = ccoords(6, 0.6);
        assert_eq!(max_abs(&(&cc.z_bar - &adjoint(&cc.z))), 0.0);
        assert_eq!(max_abs(&(&cc.p_z_bar - &adjoint(&cc.p_z))), 0.0);
    }

    #[test]
    fn coordinate_quadratic_identity() {
        // (z z_bar + z_bar z) / 2 = x^2 + y^2; the two sides accumulate the
        // same terms in different orders, so allow a couple of ulp per entry.
        let n = 7;
        let cc = ccoords(n, 1.2);
        let cs = coords(n, 1.2);
        let lhs = (&matmul(&cc.z, &cc.z_bar).unwrap() + &matmul(&cc.z_bar, &cc.z).unwrap())
            .mapv(|v| v * 0.5);
        let rhs = &matmul(&cs.x, &cs.x).unwrap() + &matmul(&cs.y, &cs.y).unwrap();
        let scale = max_abs(&rhs);
        assert!(max_abs(&(&lhs - &rhs)) <= 4.0 * f64::EPSILON * scale);
    }

    #[test]
    fn angular_momentum_dual_form_is_entry_exact() {
        let n = 9;
        let cs = coords(n, 0.85);
        let cc = complex_coords(&cs);
        let lz = angular_momentum(&cc).unwrap();
        let dual = &matmul(&cs.x, &cs.p_y).unwrap() - &matmul(&cs.y, &cs.p_x).unwrap();
        assert_eq!(lz, dual);
    }

    #[test]
    fn angular_momentum_annihilates_the_vacuum() {
        let n = 6;
        let lz = angular_momentum(&ccoords(n, 1.0)).unwrap();
        let mut v = CVec::from_elem(n * n, c(0.0, 0.0));
        v[0] = c(1.0, 0.0);
        let w = matvec(&lz, &v).unwrap();
        assert_eq!(w.iter().map(|x| x.norm()).fold(0.0, f64::max), 0.0);
    }

    #[test]
    fn angular_momentum_spectrum_is_integer_on_complete_sectors() {
        // L_z preserves the total quanta q = n_x + n_y. Sectors with
        // q <= N - 1 are complete in the truncated basis, so restricting to
        // them must give integer eigenvalues; higher sectors are truncated
        // mid-multiplet and are excluded.
        let n = 8;
        let lz = angular_momentum(&ccoords(n, 1.0)).unwrap();
        let keep: Vec<usize> = (0..n * n).filter(|i| (i / n) + (i % n) < n).collect();
        let k = keep.len();
        let mut sub = Array2::from_elem((k, k), c(0.0, 0.0));
        for (r, &i) in keep.iter().enumerate() {
            for (s, &j) in keep.iter().enumerate() {
                sub[(r, s)] = lz[(i, j)];
            }
        }
        for ev in crate::linalg::eigvalsh(&sub).unwrap() {
            assert!((ev - ev.round()).abs() <= 1e-9, "non-integer eigenvalue {ev}");
        }
    }

    #[test]
    fn bopp_shift_deformed_commutator() {
        let n = 12;
        let theta = 0.3;
        let cc = ccoords(n, 1.0);
        let bp = bopp_shift(&cc, theta, ShiftOrder::Exact);
        let comm = commutator(&bp.z_hat, &bp.z_hat_bar).unwrap();
        let target = eye(n * n).mapv(|v| v * 2.0 * theta);
        let res = interior_residual(&(&comm - &target), n, 2);
        assert!(res <= 1e-10 * 1.0f64.max(theta.abs()), "residual {res}");
    }

    #[test]
    fn bopp_shift_zero_theta_is_the_identity_shift() {
        let cc = ccoords(5, 0.9);
        let bp = bopp_shift(&cc, 0.0, ShiftOrder::Exact);
        assert_eq!(bp.z_hat, cc.z);
        assert_eq!(bp.z_hat_bar, cc.z_bar);
    }

    #[test]
    fn bopp_shift_preserves_coordinate_momentum_commutator() {
        let n = 10;
        let cc = ccoords(n, 1.0);
        let bp = bopp_shift(&cc, 0.4, ShiftOrder::Exact);
        let comm = commutator(&bp.z_hat, &cc.p_z).unwrap();
        let i_eye = eye(n * n).mapv(|v| v * c(0.0, 1.0));
        assert!(interior_residual(&(&comm - &i_eye), n, 2) <= TAU);
    }

    #[test]
    fn bopp_shift_adjoint_pairing_is_exact() {
        let cc = ccoords(6, 1.0);
        let bp = bopp_shift(&cc, -0.7, ShiftOrder::Exact);
        assert_eq!(max_abs(&(&bp.z_hat_bar - &adjoint(&bp.z_hat))), 0.0);
    }

    #[test]
    fn interior_projector_rank() {
        let p = interior_projector(10, 2).unwrap();
        let rank: f64 = p.diag().iter().map(|v| v.re).sum();
        assert_eq!(rank, 64.0);
    }

    #[test]
    fn interior_projector_hides_the_ladder_artifact() {
        // P [a_x, a_x^dagger] P = P for margin >= 1: the artifact sits in the
        // top level only, and interior entries are exact up to sqrt rounding.
        let n = 6;
        let ax = embed_two_modes(&ladder(n).unwrap(), Mode::X).unwrap();
        let comm = commutator(&ax, &adjoint(&ax)).unwrap();
        let p = interior_projector(n, 1).unwrap();
        let pcp = matmul(&matmul(&p, &comm).unwrap(), &p).unwrap();
        assert!(max_abs(&(&pcp - &p)) <= 1e-12);
    }

    #[test]
    fn interior_projector_rejects_empty_interior() {
        assert!(matches!(interior_projector(5, 5), Err(CoreError::InvalidMargin { .. })));
        assert!(matches!(interior_projector(5, 9), Err(CoreError::InvalidMargin { .. })));
    }

    #[test]
    fn frame_ladder_algebra_on_the_interior() {
        let n = 16;
        let phys = PhysParams::new(1.0, 1.0, 1.0, 0.0, 0.2, 0.5);
        let cc = ccoords(n, 1.0);
        let pair = model_ladders(&phys, LadderModel::Landau, &cc).unwrap();
        let id = eye(n * n);
        let comm_a = commutator(&pair.a, &adjoint(&pair.a)).unwrap();
        assert!(interior_residual(&(&comm_a - &id), n, default_margin(n)) <= TAU);
        let comm_b = commutator(&pair.b, &adjoint(&pair.b)).unwrap();
        assert!(interior_residual(&(&comm_b - &id), n, default_margin(n)) <= TAU);
        let cross = commutator(&pair.a, &pair.b).unwrap();
        assert!(interior_residual(&cross, n, default_margin(n)) <= TAU);
        let cross_dag = commutator(&pair.a, &adjoint(&pair.b)).unwrap();
        assert!(interior_residual(&cross_dag, n, default_margin(n)) <= TAU);
    }

    #[test]
    fn number_difference_equals_angular_momentum() {
        // a^dagger a - b^dagger b = L_z holds for any frame constant.
        let n = 10;
        let cc = ccoords(n, 1.0);
        for beta in [0.4, 1.0, 2.5] {
            let pair = ladders_for_beta(&cc, beta).unwrap();
            let na = matmul(&adjoint(&pair.a), &pair.a).unwrap();
            let nb = matmul(&adjoint(&pair.b), &pair.b).unwrap();
            let lz = angular_momentum(&cc).unwrap();
            let res = interior_residual(&(&(&na - &nb) - &lz), n, 2);
            assert!(res <= TAU, "beta = {beta}: residual {res}");
        }
    }

    #[test]
    fn matched_frame_ladder_reduces_to_symmetric_gauge_form() {
        // theta = 0 and l_ref = 1/sqrt(e*B_tilde): a = (a_x - i a_y)/sqrt(2).
        let n = 8;
        let phys = PhysParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.5);
        let beta = derive(&phys).b_tilde * phys.e;
        let l = 1.0 / beta.sqrt();
        let cc = ccoords(n, l);
        let pair = model_ladders(&phys, LadderModel::Landau, &cc).unwrap();
        let ax = embed_two_modes(&ladder(n).unwrap(), Mode::X).unwrap();
        let ay = embed_two_modes(&ladder(n).unwrap(), Mode::Y).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let reference = &ax.mapv(|v| v * s) - &ay.mapv(|v| v * c(0.0, s));
        assert!(max_abs(&(&pair.a - &reference)) <= 1e-12);
    }

    #[test]
    fn ladders_reject_non_positive_frame() {
        let cc = ccoords(4, 1.0);
        assert!(matches!(ladders_for_beta(&cc, 0.0), Err(CoreError::IllPosed(_))));
        assert!(matches!(ladders_for_beta(&cc, -2.0), Err(CoreError::IllPosed(_))));
    }

    #[test]
    fn model_ladders_reject_ill_posed_frames() {
        let n = 6;
        let cc = ccoords(n, 1.0);
        // Landau frame at the critical deformation: B_tilde = 0.
        let at_critical = PhysParams::new(1.0, 1.0, 4.0, 0.0, -1.0, 0.5);
        assert!(matches!(
            model_ladders(&at_critical, LadderModel::Landau, &cc),
            Err(CoreError::IllPosed(_))
        ));
        // Oscillator frame with negative effective mass.
        let negative_mass = PhysParams::new(1.0, 1.0, 2.0, 1.0, -2.0, 0.5);
        assert!(matches!(
            model_ladders(&negative_mass, LadderModel::Oscillator, &cc),
            Err(CoreError::IllPosed(_))
        ));
    }

    fn matched_pair(n: usize, beta: f64) -> LadderPair {
        let cc = ccoords(n, 1.0 / beta.sqrt());
        ladders_for_beta(&cc, beta).unwrap()
    }

    #[test]
    fn vacuum_number_state_is_the_first_basis_vector() {
        let pair = matched_pair(6, 0.8);
        let v = build_number_state(0, 0, &pair).unwrap();
        assert_eq!(v.amplitudes[0], c(1.0, 0.0));
        assert_eq!(v.norm(), 1.0);
    }

    #[test]
    fn number_states_are_normalized() {
        let pair = matched_pair(10, 1.7);
        for (n1, n2) in [(1, 0), (0, 1), (2, 1), (3, 3), (4, 0)] {
            let v = build_number_state(n1, n2, &pair).unwrap();
            assert!((v.norm() - 1.0).abs() <= 1e-12, "({n1},{n2}): norm {}", v.norm());
        }
    }

    #[test]
    fn number_states_are_number_operator_eigenvectors() {
        let pair = matched_pair(12, 0.6);
        let na = matmul(&adjoint(&pair.a), &pair.a).unwrap();
        let nb = matmul(&adjoint(&pair.b), &pair.b).unwrap();
        for (n1, n2) in [(0u32, 0u32), (1, 0), (0, 2), (2, 3), (4, 1)] {
            let v = build_number_state(n1, n2, &pair).unwrap();
            let nav = matvec(&na, &v.amplitudes).unwrap();
            let nbv = matvec(&nb, &v.amplitudes).unwrap();
            let res_a = (&nav - &v.amplitudes.mapv(|x| x * n1 as f64))
                .iter()
                .map(|x| x.norm())
                .fold(0.0, f64::max);
            let res_b = (&nbv - &v.amplitudes.mapv(|x| x * n2 as f64))
                .iter()
                .map(|x| x.norm())
                .fold(0.0, f64::max);
            assert!(res_a <= 1e-10, "({n1},{n2}): a-number residual {res_a}");
            assert!(res_b <= 1e-10, "({n1},{n2}): b-number residual {res_b}");
        }
    }

    #[test]
    fn number_state_rejects_states_outside_the_cutoff() {
        let pair = matched_pair(5, 1.0);
        assert!(matches!(build_number_state(2, 2, &pair), Err(CoreError::CutoffTooSmall(_))));
    }

    #[test]
    fn algebra_suite_passes_on_a_healthy_configuration() {
        let report = algebra_suite(16, 1.0, default_margin(16), 0.2, 0.525).unwrap();
        assert!(report.all_pass, "{:?}", report.checks);
        assert_eq!(report.checks.len(), 6);
    }

    #[test]
    fn algebra_suite_flags_truncation_artifacts_without_a_margin() {
        let report = algebra_suite(3, 1.0, 0, 0.0, 0.5).unwrap();
        assert!(!report.all_pass);
        let comm_a = report.checks.iter().find(|ch| ch.name == "ladder-commutator-a").unwrap();
        // The commutator's top-corner artifact is O(N); far above threshold.
        assert!(comm_a.residual >= 1.0);
    }
}
