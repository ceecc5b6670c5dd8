//! The general PT-symmetric qubit Hamiltonian, its spectrum and its propagator.
//!
//! With `sin α = s/t` the matrix
//!
//! ```text
//! H = J [[r + t cos ξ − i s sin ξ,  i s cos ξ + t sin ξ],
//!        [i s cos ξ + t sin ξ,      r − t cos ξ + i s sin ξ]]
//! ```
//!
//! has eigenvalues `J(r ± t cos α)`, real as long as `s² ≤ t²`. α is taken on the
//! principal arcsin branch; `(t, α)` and `(−t, −α)` with `ξ ↦ ξ + π` describe the
//! same matrix, and every downstream formula depends only on `s`, `t cos α` and ξ.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;

/// Below this `|μτ|` the propagator uses the power series of `cos` and `sin(x)/x`.
const SERIES_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PTParams {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub xi: f64,
    /// Energy scale; must be nonzero.
    pub j: f64,
    /// Dimensionless evolution parameter `J τ′ / ħ`.
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    /// `s² < t²`: real, non-degenerate spectrum.
    Unbroken,
    /// `s² = t²`: eigenvalues and eigenvectors coalesce.
    Exceptional,
    /// `s² > t²`: complex-conjugate eigenvalue pair.
    Broken,
}

impl PTParams {
    pub fn new(r: f64, s: f64, t: f64, xi: f64, j: f64, tau: f64) -> Self {
        Self { r, s, t, xi, j, tau }
    }

    /// Parameters reaching a given `(α, ξ, t₁)` with `r = 0`, `t = J = 1`.
    ///
    /// Requires `|α| < π/2`; at the exceptional point `t₁ = 0` for every τ.
    pub fn from_alpha(alpha: f64, xi: f64, t1: f64) -> Result<Self> {
        if !(alpha.abs() < PI / 2.0) {
            return Err(invalid(format!(
                "alpha = {alpha} must lie strictly inside (-pi/2, pi/2)"
            )));
        }
        Ok(Self {
            r: 0.0,
            s: alpha.sin(),
            t: 1.0,
            xi,
            j: 1.0,
            tau: t1 / alpha.cos(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.r, self.s, self.t, self.xi, self.j, self.tau];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(invalid("Hamiltonian parameters must be finite"));
        }
        if self.j == 0.0 {
            return Err(invalid("energy scale J must be nonzero"));
        }
        Ok(())
    }

    pub fn phase(&self) -> Phase {
        let (s, t) = (self.s.abs(), self.t.abs());
        if s < t {
            Phase::Unbroken
        } else if s == t {
            Phase::Exceptional
        } else {
            Phase::Broken
        }
    }

    /// Errors unless the parameters lie in the unbroken, real-spectrum family.
    pub fn require_unbroken(&self) -> Result<()> {
        self.validate()?;
        if self.t == 0.0 {
            return Err(invalid("t must be nonzero for a real-spectrum Hamiltonian"));
        }
        match self.phase() {
            Phase::Unbroken => Ok(()),
            Phase::Exceptional => Err(Error::ExceptionalPoint { t: self.t }),
            Phase::Broken => Err(Error::BrokenPhase {
                s: self.s,
                t: self.t,
            }),
        }
    }

    pub fn alpha(&self) -> Result<f64> {
        alpha_of(self)
    }

    /// `t₁ = t τ cos α`, the coordinate every closed form is written in.
    pub fn t1(&self) -> Result<f64> {
        Ok(self.t * self.tau * self.alpha()?.cos())
    }

    /// `μ² = t² − s²`, factored for accuracy near the exceptional point.
    fn mu_squared(&self) -> f64 {
        (self.t - self.s) * (self.t + self.s)
    }
}

/// The matrix `J·H_PT`.
pub fn build_hamiltonian(p: &PTParams) -> ComplexMatrix {
    scaled_generator(p).scale_real(p.j)
}

/// `H_PT` without the energy scale.
fn scaled_generator(p: &PTParams) -> ComplexMatrix {
    let (sx, cx) = p.xi.sin_cos();
    let d = C64::new(p.t * cx, -p.s * sx);
    let off = C64::new(p.t * sx, p.s * cx);
    let r = C64::new(p.r, 0.0);
    ComplexMatrix::from_vec(2, vec![r + d, off, off, r - d]).expect("2x2")
}

/// `α = arcsin(s/t)` on the principal branch.
pub fn alpha_of(p: &PTParams) -> Result<f64> {
    if p.t == 0.0 {
        return Err(invalid("alpha is undefined for t = 0"));
    }
    let ratio = p.s / p.t;
    if ratio.abs() > 1.0 {
        return Err(Error::BrokenPhase { s: p.s, t: p.t });
    }
    Ok(ratio.asin())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PTEigensystem {
    pub alpha: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub v_plus: [C64; 2],
    pub v_minus: [C64; 2],
}

impl PTEigensystem {
    /// `|⟨v₊|v₋⟩|` under the Dirac inner product; nonzero unless the Hamiltonian is Hermitian.
    pub fn overlap(&self) -> f64 {
        (self.v_plus[0].conj() * self.v_minus[0] + self.v_plus[1].conj() * self.v_minus[1]).norm()
    }
}

/// Energies from `E± = J(r ± t cos α)`; eigenvectors by a direct 2×2 null-space solve.
pub fn eigensystem(p: &PTParams) -> Result<PTEigensystem> {
    p.require_unbroken()?;
    let alpha = alpha_of(p)?;
    let e_plus = p.j * (p.r + p.t * alpha.cos());
    let e_minus = p.j * (p.r - p.t * alpha.cos());
    let h = build_hamiltonian(p);
    Ok(PTEigensystem {
        alpha,
        e_plus,
        e_minus,
        v_plus: null_vector(&h, e_plus),
        v_minus: null_vector(&h, e_minus),
    })
}

/// Unit vector spanning the kernel of `h − e·I` for a 2×2 `h` with eigenvalue `e`.
fn null_vector(h: &ComplexMatrix, e: f64) -> [C64; 2] {
    let e = C64::new(e, 0.0);
    // Rows of (h - e) are orthogonal to the kernel; use the better conditioned one.
    let row0 = [h[(0, 0)] - e, h[(0, 1)]];
    let row1 = [h[(1, 0)], h[(1, 1)] - e];
    let n0 = row0[0].norm_sqr() + row0[1].norm_sqr();
    let n1 = row1[0].norm_sqr() + row1[1].norm_sqr();
    let v = if n0 >= n1 {
        [row0[1], -row0[0]]
    } else {
        [row1[1], -row1[0]]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if norm == 0.0 {
        // h = e·I: any vector is an eigenvector.
        return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    }
    [v[0] / norm, v[1] / norm]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub matrix: ComplexMatrix,
    /// Regime the propagator was evaluated in; the broken phase uses hyperbolic branches.
    pub phase: Phase,
}

/// Closed-form `U = e^{−i H_PT τ}`.
///
/// `(H_PT − r)² = μ²·I` with `μ² = t² − s²`, so
/// `U = e^{−irτ} [cos(μτ) I − i (sin(μτ)/μ)(H_PT − r)]`. For `μ²τ² < 0` the
/// trigonometric factors become hyperbolic; near `μτ = 0` power series are used.
pub fn propagator(p: &PTParams) -> Propagator {
    let m2 = p.mu_squared();
    let z = m2 * p.tau * p.tau; // (μτ)²
    let (cos_part, sinc_part) = if z.abs() < SERIES_CUTOFF * SERIES_CUTOFF {
        // cos x = 1 − x²/2 + x⁴/24, sin(x)/x = 1 − x²/6 + x⁴/120, with x² = z.
        (
            1.0 - z / 2.0 + z * z / 24.0,
            p.tau * (1.0 - z / 6.0 + z * z / 120.0),
        )
    } else if m2 > 0.0 {
        let mu = m2.sqrt();
        let x = mu * p.tau;
        (x.cos(), x.sin() / mu)
    } else {
        let nu = (-m2).sqrt();
        let x = nu * p.tau;
        (x.cosh(), x.sinh() / nu)
    };

    let mut k = scaled_generator(p);
    for i in 0..2 {
        k[(i, i)] -= C64::new(p.r, 0.0);
    }
    let minus_i_sinc = C64::new(0.0, -sinc_part);
    let mut u = k.scale(minus_i_sinc);
    for i in 0..2 {
        u[(i, i)] += C64::new(cos_part, 0.0);
    }
    let global = C64::from_polar(1.0, -p.r * p.tau);
    Propagator {
        matrix: u.scale(global),
        phase: p.phase(),
    }
}

/// True iff `P(φ̃)·conj(h)·P(φ̃) = h` entrywise within `tol`,
/// with `P(φ̃) = [[cos φ̃, sin φ̃], [sin φ̃, −cos φ̃]]`.
pub fn pt_symmetry_check(h: &ComplexMatrix, phi_tilde: f64, tol: f64) -> bool {
    pt_symmetry_defect(h, phi_tilde) <= tol
}

/// `max |P conj(h) P − h|` entrywise.
pub fn pt_symmetry_defect(h: &ComplexMatrix, phi_tilde: f64) -> f64 {
    assert_eq!(h.dim(), 2, "parity check is defined for 2x2 matrices");
    let (s, c) = phi_tilde.sin_cos();
    let parity = ComplexMatrix::from_vec(
        2,
        vec![
            C64::new(c, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(-c, 0.0),
        ],
    )
    .expect("2x2");
    let transformed = &(&parity * &h.conj()) * &parity;
    transformed.max_abs_diff(h)
}

/// Scans φ̃ over `[0, π)` on a lattice of the given step and returns the angle with the
/// smallest parity defect together with that defect.
pub fn find_parity_angle(h: &ComplexMatrix, step: f64) -> (f64, f64) {
    let n = (PI / step).ceil() as usize;
    (0..n)
        .map(|k| {
            let phi = k as f64 * step;
            (phi, pt_symmetry_defect(h, phi))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_reference;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_limit_is_diagonal() {
        let h = build_hamiltonian(&PTParams::new(1.0, 0.0, 1.0, 0.0, 1.0, 0.0));
        assert!(h.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 0.0])) < 1e-15);
        assert_eq!(h.trace(), c(2.0, 0.0));
    }

    #[test]
    fn substitution_xi_half_pi() {
        // r=0, s=1, t=2, ξ=π/2: diag(−i s, +i s) = (−i, i), off-diagonal t = 2.
        let h = build_hamiltonian(&PTParams::new(0.0, 1.0, 2.0, FRAC_PI_2, 1.0, 0.0));
        let want = ComplexMatrix::from_rows(&[[c(0., -1.), c(2., 0.)], [c(2., 0.), c(0., 1.)]]).unwrap();
        assert!(h.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn substitution_xi_zero() {
        let h = build_hamiltonian(&PTParams::new(0.0, 0.5, 1.0, 0.0, 1.0, 0.0));
        let want =
            ComplexMatrix::from_rows(&[[c(1., 0.), c(0., 0.5)], [c(0., 0.5), c(-1., 0.)]]).unwrap();
        assert_eq!(h, want);
    }

    #[test]
    fn trace_is_two_j_r() {
        let p = PTParams::new(0.3, 0.2, -0.9, 2.1, -1.7, 0.4);
        let tr = build_hamiltonian(&p).trace();
        assert!((tr - c(2.0 * p.j * p.r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn alpha_values() {
        let mk = |s, t| PTParams::new(0.0, s, t, 0.0, 1.0, 1.0);
        assert_eq!(alpha_of(&mk(0.0, 1.0)).unwrap(), 0.0);
        assert!((alpha_of(&mk(0.5, 1.0)).unwrap() - PI / 6.0).abs() < 1e-15);
        let ep = mk(1.0, 1.0);
        assert_eq!(alpha_of(&ep).unwrap(), FRAC_PI_2);
        assert_eq!(ep.phase(), Phase::Exceptional);
        assert!(matches!(alpha_of(&mk(2.0, 1.0)), Err(Error::BrokenPhase { .. })));
        assert!(matches!(alpha_of(&mk(0.0, 0.0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn eigensystem_hermitian_case() {
        let es = eigensystem(&PTParams::new(0.0, 0.0, 1.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!((es.e_plus, es.e_minus), (1.0, -1.0));
        assert!((es.v_plus[0].norm() - 1.0).abs() < 1e-15 && es.v_plus[1].norm() < 1e-15);
        assert!(es.v_minus[0].norm() < 1e-15 && (es.v_minus[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigensystem_energy_formula() {
        let p = PTParams::new(2.0, 0.5, 1.0, 0.7, 3.0, 1.0);
        let es = eigensystem(&p).unwrap();
        let root3_2 = 3f64.sqrt() / 2.0;
        assert!((es.e_plus - 3.0 * (2.0 + root3_2)).abs() < 1e-12);
        assert!((es.e_minus - 3.0 * (2.0 - root3_2)).abs() < 1e-12);
    }

    #[test]
    fn eigenvectors_become_nonorthogonal() {
        let es = eigensystem(&PTParams::new(0.0, 0.9, 1.0, 0.3, 1.0, 1.0)).unwrap();
        assert!(es.overlap() > 0.5, "overlap {}", es.overlap());
        let nearly = eigensystem(&PTParams::new(0.0, 1.0 - 1e-8, 1.0, 0.3, 1.0, 1.0)).unwrap();
        assert!(nearly.overlap() > 0.999);
    }

    #[test]
    fn eigensystem_rejects_exceptional_and_broken() {
        assert!(matches!(
            eigensystem(&PTParams::new(0.0, 1.0, 1.0, 0.0, 1.0, 1.0)),
            Err(Error::ExceptionalPoint { .. })
        ));
        assert!(matches!(
            eigensystem(&PTParams::new(0.0, 1.5, 1.0, 0.0, 1.0, 1.0)),
            Err(Error::BrokenPhase { .. })
        ));
    }

    #[test]
    fn propagator_trivial_cases() {
        let p = PTParams::new(0.4, 0.3, 1.0, 1.0, 1.0, 0.0);
        assert!(propagator(&p).matrix.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let theta0 = 0.83;
        let u = propagator(&PTParams::new(0.0, 0.0, 1.0, 0.0, 1.0, theta0)).matrix;
        let want = ComplexMatrix::from_rows(&[
            [C64::from_polar(1.0, -theta0), c(0., 0.)],
            [c(0., 0.), C64::from_polar(1.0, theta0)],
        ])
        .unwrap();
        assert!(u.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn propagator_at_exceptional_point_is_linear_in_tau() {
        // K² = 0 at s = t, so U = e^{-irτ}(I − iKτ) exactly.
        let p = PTParams::new(0.0, 1.0, 1.0, 0.4, 1.0, 2.5);
        let u = propagator(&p).matrix;
        let a = build_hamiltonian(&p).scale(c(0.0, -p.tau));
        assert!(u.max_abs_diff(&expm_reference(&a)) < 1e-12);
    }

    #[test]
    fn propagator_continuous_at_exceptional_point() {
        let limit = propagator(&PTParams::new(0.2, 1.0, 1.0, 0.9, 1.0, 1.7)).matrix;
        let near = propagator(&PTParams::new(0.2, 1.0 - 1e-8, 1.0, 0.9, 1.0, 1.7)).matrix;
        assert!(near.max_abs_diff(&limit) <= 1e-6);
    }

    #[test]
    fn broken_phase_is_flagged_and_matches_expm() {
        let p = PTParams::new(0.1, 2.0, 1.0, 0.5, 1.0, 0.8);
        let prop = propagator(&p);
        assert_eq!(prop.phase, Phase::Broken);
        let a = build_hamiltonian(&p).scale(c(0.0, -p.tau));
        assert!(prop.matrix.max_abs_diff(&expm_reference(&a)) < 1e-10);
    }

    #[test]
    fn parity_examples() {
        let h = build_hamiltonian(&PTParams::new(0.0, 0.5, 1.0, FRAC_PI_2, 1.0, 0.0));
        assert!(pt_symmetry_check(&h, FRAC_PI_2, 1e-12));
        assert!(pt_symmetry_check(&ComplexMatrix::from_real_diag(&[2., 0.]), 0.0, 1e-12));
        let generic = ComplexMatrix::from_rows(&[[c(0.3, 0.7), c(1.1, -0.4)], [c(-0.2, 0.5), c(0.9, 0.1)]])
            .unwrap();
        assert!(!pt_symmetry_check(&generic, 0.37, 1e-6));
        let (_, best) = find_parity_angle(&generic, 1e-3);
        assert!(best > 1e-2);
    }

    fn arb_unbroken() -> impl Strategy<Value = PTParams> {
        (
            -2.0f64..2.0,
            -0.999f64..0.999,
            0.1f64..2.0,
            prop::bool::ANY,
            0.0f64..(2.0 * PI),
            prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
            -3.0f64..3.0,
        )
            .prop_map(|(r, u, tmag, neg, xi, j, tau)| {
                let t = if neg { -tmag } else { tmag };
                PTParams::new(r, u * t, t, xi, j, tau)
            })
    }

    proptest! {
        #[test]
        fn eigenpairs_have_small_residual(p in arb_unbroken()) {
            let es = eigensystem(&p).unwrap();
            let h = build_hamiltonian(&p);
            for (e, v) in [(es.e_plus, es.v_plus), (es.e_minus, es.v_minus)] {
                let hv0 = h[(0, 0)] * v[0] + h[(0, 1)] * v[1] - v[0] * e;
                let hv1 = h[(1, 0)] * v[0] + h[(1, 1)] * v[1] - v[1] * e;
                prop_assert!((hv0.norm_sqr() + hv1.norm_sqr()).sqrt() <= 1e-10 * (1.0 + p.j.abs() * 4.0));
            }
            let tcos = p.t * es.alpha.cos();
            prop_assert!((es.e_plus - p.j * (p.r + tcos)).abs() <= 1e-10);
        }

        #[test]
        fn numeric_spectrum_is_real(p in arb_unbroken()) {
            // Eigenvalues of a 2×2 from trace and determinant.
            let h = build_hamiltonian(&p);
            let tr = h.trace();
            let disc = (tr * tr / 4.0 - h.det()).sqrt();
            for lam in [tr / 2.0 + disc, tr / 2.0 - disc] {
                prop_assert!(lam.im.abs() <= 1e-10 * (1.0 + lam.norm()));
            }
        }

        #[test]
        fn propagator_matches_expm(p in arb_unbroken()) {
            let u = propagator(&p).matrix;
            let a = build_hamiltonian(&p).scale(c(0.0, -p.tau / p.j));
            prop_assert!(u.max_abs_diff(&expm_reference(&a)) <= 1e-10);
            prop_assert!((u.det().norm() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn hermitian_case_is_unitary(r in -2.0f64..2.0, t in 0.1f64..2.0, xi in 0.0f64..6.3, tau in -3.0f64..3.0) {
            let u = propagator(&PTParams::new(r, 0.0, t, xi, 1.0, tau)).matrix;
            prop_assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-10);
        }

        #[test]
        fn some_parity_angle_exists(p in arb_unbroken()) {
            let h = build_hamiltonian(&p);
            let (phi, defect) = find_parity_angle(&h, 1e-3);
            // The lattice misses the exact angle by at most half a step.
            prop_assert!(defect <= 1e-3 * 2.0 * h.max_abs().max(1.0), "phi {} defect {}", phi, defect);
            // The angle found tracks ξ modulo π.
            let gap = (phi - p.xi.rem_euclid(PI)).abs();
            prop_assert!(gap.min(PI - gap) <= 1e-3, "phi {} xi {}", phi, p.xi);
        }
    }
}
