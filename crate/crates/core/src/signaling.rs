//! Alice's local non-unitary evolution, reduced states of the remote parties and
//! how well those parties can tell the evolution happened.
//!
//! All closed forms take `(α, ξ, t₁)`; `r` and the overall scale drop out after
//! renormalization.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{propagator, PTParams};
use crate::linalg::{hermitian_eigenvalues, tensor, trace_norm, ComplexMatrix};
use crate::states::{density, make_state, reduced, StateSpec, BOB, CHARU};

/// Trace distance below which a channel counts as non-signaling.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Post-evolution traces at or below this cannot be renormalized.
pub const DEGENERATE_TRACE: f64 = 1e-14;
/// Largest tolerated disagreement between a closed form and the numeric path.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// `(U⊗I⊗…)ρ(U⊗I⊗…)†`, divided by its trace.
pub fn evolve_alice(rho: &ComplexMatrix, u: &ComplexMatrix, n_parties: usize) -> Result<ComplexMatrix> {
    if u.dim() != 2 {
        return Err(invalid(format!("propagator must be 2x2, got {0}x{0}", u.dim())));
    }
    if !(2..=3).contains(&n_parties) || rho.dim() != 1 << n_parties {
        return Err(invalid(format!(
            "state of dimension {} does not describe {} qubits",
            rho.dim(),
            n_parties
        )));
    }
    let k = tensor(u, &ComplexMatrix::identity(1 << (n_parties - 1)));
    let out = &(&k * rho) * &k.adjoint();
    let tr = out.trace().re;
    if !(tr > DEGENERATE_TRACE) {
        return Err(Error::DegenerateEvolution(tr));
    }
    Ok(out.scale_real(1.0 / tr))
}

/// Applies `U` to the leading qubit of a pure state and renormalizes.
pub fn evolve_alice_pure(psi: &[C64], u: &ComplexMatrix) -> Result<Vec<C64>> {
    let half = psi.len() / 2;
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for i in 0..half {
        let (a, b) = (psi[i], psi[half + i]);
        out[i] = u[(0, 0)] * a + u[(0, 1)] * b;
        out[half + i] = u[(1, 0)] * a + u[(1, 1)] * b;
    }
    let n2: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    if !(n2 > DEGENERATE_TRACE) {
        return Err(Error::DegenerateEvolution(n2));
    }
    let k = 1.0 / n2.sqrt();
    out.iter_mut().for_each(|z| *z *= k);
    Ok(out)
}

/// Reduced state of everyone except Alice, for a pure state vector.
pub fn remote_state(psi: &[C64]) -> ComplexMatrix {
    let half = psi.len() / 2;
    let mut rho = ComplexMatrix::zeros(half);
    for (lo, hi) in [(0, half), (half, psi.len())] {
        let part = &psi[lo..hi];
        for j in 0..half {
            for k in 0..half {
                rho[(j, k)] += part[j] * part[k].conj();
            }
        }
    }
    rho
}

/// `1/2 + ‖ρ₁ − ρ₂‖₁/4`.
pub fn helstrom(rho1: &ComplexMatrix, rho2: &ComplexMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(invalid("helstrom: dimension mismatch"));
    }
    Ok(0.5 + trace_norm(&(rho1 - rho2))? / 4.0)
}

/// Helstrom probability for the remote parties' joint state, via the pure-state path.
pub fn global_probability(psi: &[C64], u: &ComplexMatrix) -> Result<f64> {
    let post = evolve_alice_pure(psi, u)?;
    helstrom(&remote_state(&post), &remote_state(psi))
}

/// Sorted eigenvalues of `ρ₁ − ρ₂`.
pub fn difference_spectrum(rho1: &ComplexMatrix, rho2: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&(rho1 - rho2))
}

// ---------------------------------------------------------------------------
// Closed forms

/// `b₁…b₄` and `N₂` of the bipartite evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellCoefficients {
    pub b1: f64,
    pub b2: f64,
    pub b3: C64,
    pub b4: C64,
    pub n2: f64,
}

pub fn bell_coefficients(alpha: f64, xi: f64, t1: f64) -> BellCoefficients {
    let (ta, sec) = (alpha.tan(), 1.0 / alpha.cos());
    let (st, ct) = t1.sin_cos();
    let common = 2.0 * sec * sec * st * st + (2.0 * t1).cos();
    let skew = ta * (2.0 * t1).sin() * xi.sin();
    let b3 = C64::new(ct * xi.cos(), sec * st) * (2.0 * ta * st);
    BellCoefficients {
        b1: common - skew,
        b2: common + skew,
        b3,
        b4: b3.conj(),
        n2: 2.0 * common,
    }
}

/// Bob's state after Alice evolves her half of `(|00⟩ + |11⟩)/√2`.
pub fn bob_reduced_bell_closed_form(alpha: f64, t1: f64, xi: f64) -> ComplexMatrix {
    let b = bell_coefficients(alpha, xi, t1);
    ComplexMatrix::from_rows(&[[re(b.b1), b.b4], [b.b3, re(b.b2)]])
        .expect("2x2")
        .scale_real(1.0 / b.n2)
}

/// `N₃`, the trace of the unnormalized GHZ joint state times two.
pub fn ghz_norm(alpha: f64, theta: f64, xi: f64, t1: f64) -> f64 {
    let ta = alpha.tan();
    let sec2 = 1.0 / alpha.cos().powi(2);
    2.0 * (sec2 - ta * (ta * (2.0 * t1).cos() + (2.0 * theta).cos() * (2.0 * t1).sin() * xi.sin()))
}

/// Bob and Charu's joint state after the evolution, GHZ family.
pub fn ghz_joint_closed_form(alpha: f64, theta: f64, xi: f64, t1: f64) -> ComplexMatrix {
    let b = bell_coefficients(alpha, xi, t1);
    let (s, c) = theta.sin_cos();
    let s2t = (2.0 * theta).sin();
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 0)] = re(2.0 * b.b1 * c * c);
    m[(0, 3)] = b.b4 * s2t;
    m[(3, 0)] = b.b3 * s2t;
    m[(3, 3)] = re(2.0 * b.b2 * s * s);
    m.scale_real(1.0 / ghz_norm(alpha, theta, xi, t1))
}

/// `N₅ = N₆`, the trace of the unnormalized W joint state.
pub fn w_norm(alpha: f64, theta: f64, xi: f64, t1: f64) -> f64 {
    let ta = alpha.tan();
    1.0 / alpha.cos().powi(2)
        + ta * ((2.0 * theta).cos() * xi.sin() * (2.0 * t1).sin() - ta * (2.0 * t1).cos())
}

/// Bob and Charu's joint state after the evolution, W family.
pub fn w_joint_closed_form(alpha: f64, theta: f64, phi: f64, xi: f64, t1: f64) -> ComplexMatrix {
    let b = bell_coefficients(alpha, xi, t1);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let w1 = (2.0 * theta).sin() * cp;
    let w2 = (2.0 * theta).sin() * sp;
    let s2 = st * st;
    let mid = re(b.b1 / 2.0 * (2.0 * phi).sin() * s2);
    let z = re(0.0);
    ComplexMatrix::from_rows(&[
        [re(b.b2 * ct * ct), b.b3 * (w1 / 2.0), b.b3 * (w2 / 2.0), z],
        [b.b4 * (w1 / 2.0), re(b.b1 * cp * cp * s2), mid, z],
        [b.b4 * (w2 / 2.0), mid, re(b.b1 * s2 * sp * sp), z],
        [z, z, z, z],
    ])
    .expect("4x4")
    .scale_real(1.0 / w_norm(alpha, theta, xi, t1))
}

/// The bracketed radicand shared by the GHZ and W eigenvalues.
fn ghz_radicand(alpha: f64, theta: f64, xi: f64, t1: f64) -> f64 {
    let ca2 = alpha.cos().powi(2);
    let c2a = (2.0 * alpha).cos();
    let c4t = (4.0 * theta).cos();
    let sx2 = xi.sin().powi(2);
    let c2x = (2.0 * xi).cos();
    let c2t1 = (2.0 * t1).cos();
    let v = -4.0 * ca2 * c4t * sx2 + c2a * (c2x + 3.0)
        - c2t1 * (4.0 * ca2 * c4t * sx2 - c2a * (c2x + 3.0) - c2x + 5.0)
        + c2x
        + 11.0;
    v.max(0.0)
}

/// Nonzero eigenvalue `λ₃` of the GHZ joint-state difference; `P_GHZ = (1 + |λ₃|)/2`.
pub fn lambda3_ghz(alpha: f64, theta: f64, xi: f64, t1: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let n4 = sa * ca * (2.0 * theta).cos() * (2.0 * t1).sin() * xi.sin() + sa * sa * (2.0 * t1).cos() - 1.0;
    sa * (2.0 * theta).sin() * t1.sin() * ghz_radicand(alpha, theta, xi, t1).sqrt() / (4.0 * n4)
}

/// Nonzero eigenvalue `δ₃` of the W joint-state difference; independent of φ.
pub fn delta3_w(alpha: f64, theta: f64, _phi: f64, xi: f64, t1: f64) -> f64 {
    let sec = 1.0 / alpha.cos();
    let n6 = w_norm(alpha, theta, xi, t1);
    -alpha.tan() * sec * (2.0 * theta).sin() * t1.sin() * ghz_radicand(alpha, theta, xi, t1).sqrt()
        / (4.0 * n6)
}

/// `λ′₃` for the rotated-basis GHZ state with equal weights (θ = π/4); it does not
/// depend on `x`, `y` or `ξ` there.
pub fn lambda3_rotated(alpha: f64, t1: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let c2t1 = (2.0 * t1).cos();
    let n8 = ca * ca * (2.0 * sa * sa * c2t1 - 2.0);
    let radicand = ((2.0 * alpha).cos() + 3.0 - 2.0 * sa * sa * c2t1).max(0.0);
    -sa * ca * ca * t1.sin() * radicand.sqrt() / n8
}

/// Coefficients of the rotated-basis GHZ evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedCoefficients {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub b5: f64,
    pub b6: f64,
    pub b7: C64,
    pub b8: C64,
    pub n7: f64,
    pub g5: C64,
    pub g6: C64,
    pub g7: C64,
    pub g8: C64,
    pub g9: C64,
    pub g10: C64,
    pub g11: C64,
    pub g12: C64,
    pub g13: C64,
}

pub fn rotated_coefficients(alpha: f64, xi: f64, x: f64, y: f64, t1: f64, theta: f64) -> RotatedCoefficients {
    let (sa, ca) = alpha.sin_cos();
    let (ta, sec) = (sa / ca, 1.0 / ca);
    let (sxi, cxi) = xi.sin_cos();
    let (sx, cx) = x.sin_cos();
    let (sy, cy) = y.sin_cos();
    let st1 = t1.sin();
    let (s2t1, c2t1) = (2.0 * t1).sin_cos();
    let (sth, cth) = theta.sin_cos();
    let (s2th, c2th) = (2.0 * theta).sin_cos();

    let n7 = cth * cth * (sec * sec - ta * ta * c2t1)
        + sth * sth * (2.0 * sec * sec * st1 * st1 + c2t1)
        + ta * c2th * (-sxi * s2t1 * cx - 2.0 * sec * st1 * st1 * sx * sy + cxi * s2t1 * sx * cy);
    let b5 = (sec * sec + ta * (s2t1 * (cxi * sx * cy - sxi * cx) - ta * c2t1)
        - 2.0 * ta * sec * st1 * st1 * sx * sy)
        / n7;
    let b6 = sec * sec
        * (ca * ca * c2t1 + sa * ca * s2t1 * (sxi * cx - cxi * sx * cy) + 2.0 * st1 * st1 * (sa * sx * sy + 1.0))
        / n7;
    let b_re = ta * (2.0 * sec * st1 * st1 * cx * sy - s2t1 * (sxi * sx + cxi * cx * cy));
    let b_im = ta * (2.0 * sec * st1 * st1 * cy + cxi * s2t1 * sy);
    let b7 = C64::new(b_re, -b_im) / n7;
    let b8 = b7.conj();

    let e = C64::from_polar(1.0, y);
    let (sh, ch) = (x / 2.0).sin_cos();
    let (sh2, ch2) = (sh * sh, ch * ch);
    let (c2, s2) = (cth * cth, sth * sth);
    let sx2 = sx * sx;
    let b78 = b7 + b8;

    let g5 = re(8.0 * b5 * c2 * ch2 * ch2 + 8.0 * b6 * s2 * sh2 * sh2) + b78 * (s2th * sx2);
    let g6 = e * (0.5 * sx) * (re(cth * ch2) * (re(b5 * cth) - b7 * sth) + re(sth * sh2) * (b8 * cth - b6 * sth));
    let g7 = e * e * (re((b5 * c2 + b6 * s2) * sx2) + (b7 * (ch2 * ch2) + b8 * (sh2 * sh2)) * (4.0 * sth * cth));
    let g8 = e.conj()
        * sx
        * (re(c2th * ((b5 - b6) * cx + b5 + b6) + b5 * cx + b5 + b6 * cx - b6)
            - (b78 * cx - b7 + b8) * s2th);
    let g9 = (re((b5 - b6) * c2th + b5 + b6) - b78 * s2th) * sx2;
    let g10 = e * (0.5 * sx) * (re(b5 * c2 * sh2 - b6 * s2 * ch2) + (b78 * cx + b7 - b8) * (0.25 * s2th));
    let g11 = e.conj()
        * e.conj()
        * (re((b5 * c2 + b6 * s2) * sx2) + (b7 * (sh2 * sh2) + b8 * (ch2 * ch2)) * (4.0 * sth * cth));
    let g12 = e.conj() * (0.5 * sx) * (re(b5 * c2 * sh2 - b6 * s2 * ch2) + (b78 * cx - b7 + b8) * (0.25 * s2th));
    let g13 = re(8.0 * b5 * c2 * sh2 * sh2 + 8.0 * b6 * s2 * ch2 * ch2) + b78 * (s2th * sx2);

    RotatedCoefficients {
        theta,
        x,
        y,
        b5,
        b6,
        b7,
        b8,
        n7,
        g5,
        g6,
        g7,
        g8,
        g9,
        g10,
        g11,
        g12,
        g13,
    }
}

impl RotatedCoefficients {
    /// Bob and Charu's joint state rebuilt from `g₅…g₁₃`. The `b`s already carry
    /// `1/N₇`, so the matrix of `g`s has trace 8.
    pub fn joint(&self) -> ComplexMatrix {
        let rows = [
            [self.g5, self.g8, self.g8, self.g11 * 2.0],
            [self.g6 * 8.0, self.g9, self.g9, self.g12 * 8.0],
            [self.g6 * 8.0, self.g9, self.g9, self.g12 * 8.0],
            [self.g7 * 2.0, self.g10 * 8.0, self.g10 * 8.0, self.g13],
        ];
        ComplexMatrix::from_rows(&rows).expect("4x4").scale_real(1.0 / 8.0)
    }

    /// Bob's (equivalently Charu's) state after the evolution.
    pub fn bob(&self) -> ComplexMatrix {
        let (sth, cth) = self.theta.sin_cos();
        let (sh, ch) = (self.x / 2.0).sin_cos();
        let (b5, b6) = (self.b5, self.b6);
        let (c2, s2) = (cth * cth, sth * sth);
        let off = C64::from_polar(
            self.x.sin() * ((b5 + b6) * (2.0 * self.theta).cos() + b5 - b6),
            -self.y,
        );
        ComplexMatrix::from_rows(&[
            [re(4.0 * (b5 * c2 * ch * ch + b6 * s2 * sh * sh)), off],
            [off.conj(), re(4.0 * (b5 * c2 * sh * sh + b6 * s2 * ch * ch))],
        ])
        .expect("2x2")
        .scale_real(0.25)
    }

    /// Nonzero eigenvalue magnitude of the joint-state difference at any `(x, y, ξ, θ)`.
    pub fn lambda(&self) -> f64 {
        let (sth, cth) = self.theta.sin_cos();
        (cth * (cth * cth * (self.b5 - 1.0).powi(2) + sth * sth * self.b7.norm_sqr()).sqrt()).abs()
    }
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionScenario {
    pub state: StateSpec,
    pub ham: PTParams,
    /// `t τ cos α`, kept in sync with `ham`.
    pub t1: f64,
}

impl EvolutionScenario {
    pub fn new(state: StateSpec, ham: PTParams) -> Result<Self> {
        ham.require_unbroken()?;
        let t1 = ham.t1()?;
        Ok(Self { state, ham, t1 })
    }

    pub fn from_alpha(state: StateSpec, alpha: f64, xi: f64, t1: f64) -> Result<Self> {
        Self::new(state, PTParams::from_alpha(alpha, xi, t1)?)
    }

    fn check(&self) -> Result<f64> {
        self.ham.require_unbroken()?;
        let t1 = self.ham.t1()?;
        if (t1 - self.t1).abs() > 1e-12 * t1.abs().max(1.0) {
            return Err(invalid(format!(
                "scenario t1 = {} disagrees with its Hamiltonian (t1 = {t1})",
                self.t1
            )));
        }
        self.ham.alpha()
    }
}

/// Before/after states of the remote parties and how distinguishable they are.
///
/// For the two-qubit Bell scenario the "global" channel is Bob alone and the
/// Charu fields are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingReport {
    pub family: String,
    pub alpha: f64,
    pub xi: f64,
    pub t1: f64,
    pub tol: f64,
    #[serde(rename = "rho_pre_BC")]
    pub rho_pre_bc: ComplexMatrix,
    #[serde(rename = "rho_post_BC")]
    pub rho_post_bc: ComplexMatrix,
    #[serde(rename = "rho_pre_B")]
    pub rho_pre_b: ComplexMatrix,
    #[serde(rename = "rho_post_B")]
    pub rho_post_b: ComplexMatrix,
    #[serde(rename = "rho_pre_C")]
    pub rho_pre_c: Option<ComplexMatrix>,
    #[serde(rename = "rho_post_C")]
    pub rho_post_c: Option<ComplexMatrix>,
    pub d_global: f64,
    #[serde(rename = "d_B")]
    pub d_b: f64,
    #[serde(rename = "d_C")]
    pub d_c: Option<f64>,
    pub p_global: f64,
    #[serde(rename = "p_B")]
    pub p_b: f64,
    #[serde(rename = "p_C")]
    pub p_c: Option<f64>,
    /// Largest eigenvalue of the global difference matrix.
    pub lambda_numeric: f64,
    pub lambda_closed: Option<f64>,
    /// Largest entrywise gap between closed-form and numeric matrices, when checked.
    pub closed_form_residual: Option<f64>,
    pub global_nosignaling: bool,
    pub local_nosignaling: bool,
}

fn distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    trace_norm(&(a - b))
}

fn agree(name: &'static str, closed: f64, numeric: f64) -> Result<()> {
    if (closed - numeric).abs() > CLOSED_FORM_TOL || !closed.is_finite() {
        return Err(Error::ClosedFormMismatch { name, closed, numeric });
    }
    Ok(())
}

fn agree_matrix(name: &'static str, closed: &ComplexMatrix, numeric: &ComplexMatrix) -> Result<f64> {
    let gap = closed.max_abs_diff(numeric);
    if !(gap <= CLOSED_FORM_TOL) {
        return Err(Error::ClosedFormMismatch {
            name,
            closed: gap,
            numeric: 0.0,
        });
    }
    Ok(gap)
}

pub fn analyze(scenario: &EvolutionScenario, tol: f64) -> Result<SignalingReport> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let alpha = scenario.check()?;
    let (xi, t1) = (scenario.ham.xi, scenario.t1);
    let spec = &scenario.state;
    let n = spec.n_qubits();
    let rho = density(&make_state(spec)?);
    let u = propagator(&scenario.ham).matrix;
    let rho_u = evolve_alice(&rho, &u, n)?;

    let (pre_bc, post_bc, pre_b, post_b, pre_c, post_c) = if n == 2 {
        let pre = reduced(&rho, &[BOB])?;
        let post = reduced(&rho_u, &[BOB])?;
        (pre.clone(), post.clone(), pre, post, None, None)
    } else {
        (
            reduced(&rho, &[BOB, CHARU])?,
            reduced(&rho_u, &[BOB, CHARU])?,
            reduced(&rho, &[BOB])?,
            reduced(&rho_u, &[BOB])?,
            Some(reduced(&rho, &[CHARU])?),
            Some(reduced(&rho_u, &[CHARU])?),
        )
    };

    let d_global = distance(&post_bc, &pre_bc)?;
    let d_b = distance(&post_b, &pre_b)?;
    let d_c = match (&post_c, &pre_c) {
        (Some(a), Some(b)) => Some(distance(a, b)?),
        _ => None,
    };
    let lambda_numeric = *difference_spectrum(&post_bc, &pre_bc)?.last().expect("nonempty");

    let (lambda_closed, closed_form_residual) = match *spec {
        StateSpec::Bell => {
            let gap = agree_matrix("bell rho_B", &bob_reduced_bell_closed_form(alpha, t1, xi), &post_b)?;
            (None, Some(gap))
        }
        StateSpec::Ghz { theta } => {
            let gap = agree_matrix("ghz rho_BC", &ghz_joint_closed_form(alpha, theta, xi, t1), &post_bc)?;
            let l = lambda3_ghz(alpha, theta, xi, t1);
            agree("lambda3", l.abs(), lambda_numeric)?;
            (Some(l), Some(gap))
        }
        StateSpec::W { theta, phi } => {
            let gap = agree_matrix("w rho_BC", &w_joint_closed_form(alpha, theta, phi, xi, t1), &post_bc)?;
            let l = delta3_w(alpha, theta, phi, xi, t1);
            agree("delta3", l.abs(), lambda_numeric)?;
            (Some(l), Some(gap))
        }
        StateSpec::RotatedGhz { theta, x, y } => {
            let k = rotated_coefficients(alpha, xi, x, y, t1, theta);
            let gap = agree_matrix("rotated rho_BC", &k.joint(), &post_bc)?
                .max(agree_matrix("rotated rho_B", &k.bob(), &post_b)?);
            let l = k.lambda();
            agree("lambda3_rotated", l, lambda_numeric)?;
            (Some(l), Some(gap))
        }
        StateSpec::Custom { .. } => (None, None),
    };

    let local = d_b.max(d_c.unwrap_or(0.0));
    Ok(SignalingReport {
        family: spec.family().to_string(),
        alpha,
        xi,
        t1,
        tol,
        rho_pre_bc: pre_bc,
        rho_post_bc: post_bc,
        rho_pre_b: pre_b,
        rho_post_b: post_b,
        rho_pre_c: pre_c,
        rho_post_c: post_c,
        d_global,
        d_b,
        d_c,
        p_global: 0.5 + d_global / 4.0,
        p_b: 0.5 + d_b / 4.0,
        p_c: d_c.map(|d| 0.5 + d / 4.0),
        lambda_numeric,
        lambda_closed,
        closed_form_residual,
        global_nosignaling: d_global <= tol,
        local_nosignaling: local <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_reference;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    fn u_of(alpha: f64, xi: f64, t1: f64) -> ComplexMatrix {
        propagator(&PTParams::from_alpha(alpha, xi, t1).unwrap()).matrix
    }

    /// Independent oracle: `exp(−iHτ)` by Taylor series, then a full 3-qubit
    /// sandwich and partial trace.
    fn oracle_post(spec: &StateSpec, alpha: f64, xi: f64, t1: f64, keep: &[usize]) -> ComplexMatrix {
        let p = PTParams::from_alpha(alpha, xi, t1).unwrap();
        let h = crate::hamiltonian::build_hamiltonian(&p);
        let u = expm_reference(&h.scale(C64::new(0.0, -p.tau)));
        let rho = density(&make_state(spec).unwrap());
        let n = spec.n_qubits();
        reduced(&evolve_alice(&rho, &u, n).unwrap(), keep).unwrap()
    }

    #[test]
    fn identity_leaves_state_alone() {
        let rho = density(&make_state(&StateSpec::W { theta: 0.4, phi: 0.3 }).unwrap());
        let out = evolve_alice(&rho, &ComplexMatrix::identity(2), 3).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn unitary_keeps_bob_maximally_mixed() {
        let rho = density(&make_state(&StateSpec::Bell).unwrap());
        let u = u_of(0.0, 0.8, 1.3);
        let b = reduced(&evolve_alice(&rho, &u, 2).unwrap(), &[BOB]).unwrap();
        assert!(b.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-14);
    }

    #[test]
    fn evolve_rejects_bad_shapes_and_zero_trace() {
        let rho = ComplexMatrix::identity(8).scale_real(0.125);
        assert!(evolve_alice(&rho, &ComplexMatrix::identity(4), 3).is_err());
        assert!(evolve_alice(&rho, &ComplexMatrix::identity(2), 2).is_err());
        let zero = ComplexMatrix::zeros(2);
        assert!(matches!(evolve_alice(&rho, &zero, 3), Err(Error::DegenerateEvolution(_))));
        assert!(matches!(
            evolve_alice_pure(&make_state(&StateSpec::Bell).unwrap(), &zero),
            Err(Error::DegenerateEvolution(_))
        ));
    }

    #[test]
    fn bell_closed_form_matches_numeric() {
        for (a, xi, t1) in [(FRAC_PI_6, FRAC_PI_3, 0.4), (FRAC_PI_4, FRAC_PI_2, 0.5), (1.2, 2.5, -1.7)] {
            let numeric = oracle_post(&StateSpec::Bell, a, xi, t1, &[BOB]);
            assert!(bob_reduced_bell_closed_form(a, t1, xi).max_abs_diff(&numeric) < 1e-10);
        }
    }

    #[test]
    fn bell_closed_form_trivial_limits() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(bob_reduced_bell_closed_form(0.0, 0.9, 0.3).max_abs_diff(&half) < 1e-15);
        assert!(bob_reduced_bell_closed_form(1.1, 0.0, 0.3).max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn helstrom_edge_cases() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let b = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!((helstrom(&a, &a).unwrap() - 0.5).abs() < 1e-15);
        assert!((helstrom(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(helstrom(&a, &ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn ghz_probability_at_reported_optimum() {
        let sc = EvolutionScenario::from_alpha(StateSpec::Ghz { theta: 0.519 }, 9.0 * PI / 20.0, FRAC_PI_2, PI / 18.0)
            .unwrap();
        let r = analyze(&sc, DEFAULT_TOL).unwrap();
        assert!((r.p_global - 0.786).abs() < 5e-4, "{}", r.p_global);
        assert!(r.p_global > r.p_b);
    }

    #[test]
    fn w_probability_at_reported_optimum() {
        let p = 0.5 * (1.0 + delta3_w(2.0 * PI / 5.0, FRAC_PI_3, FRAC_PI_4, FRAC_PI_2, 0.3479).abs());
        assert!((p - 0.781).abs() < 5e-4, "{p}");
    }

    #[test]
    fn rotated_probability_at_reported_optimum() {
        let p = 0.5 * (1.0 + lambda3_rotated(9.0 * PI / 20.0, FRAC_PI_2).abs());
        assert!((p - 0.75).abs() < 5e-4, "{p}");
        assert_eq!(lambda3_rotated(0.0, 0.7), 0.0);
    }

    #[test]
    fn eigenvalue_closed_forms_vanish_at_trivial_points() {
        assert_eq!(lambda3_ghz(0.8, 0.0, 1.0, 0.6), 0.0);
        assert_eq!(lambda3_ghz(0.8, 0.3, 1.0, 0.0), 0.0);
        assert_eq!(delta3_w(0.8, 0.0, 0.3, 1.0, 0.6), 0.0);
    }

    #[test]
    fn ghz_and_w_joint_closed_forms_match_numeric() {
        let (a, th, ph, xi, t1) = (0.9, 0.7, 0.3, 1.2, 0.8);
        let ghz = oracle_post(&StateSpec::Ghz { theta: th }, a, xi, t1, &[BOB, CHARU]);
        assert!(ghz_joint_closed_form(a, th, xi, t1).max_abs_diff(&ghz) < 1e-10);
        let w = oracle_post(&StateSpec::W { theta: th, phi: ph }, a, xi, t1, &[BOB, CHARU]);
        assert!(w_joint_closed_form(a, th, ph, xi, t1).max_abs_diff(&w) < 1e-10);
    }

    #[test]
    fn rotated_closed_forms_match_numeric() {
        let (a, xi, x, y, t1, th) = (0.7, 1.1, 0.9, 0.4, 0.5, 0.6);
        let spec = StateSpec::RotatedGhz { theta: th, x, y };
        let k = rotated_coefficients(a, xi, x, y, t1, th);
        assert!(k.n7 > 0.0);
        assert!((k.b7 - k.b8.conj()).norm() < 1e-15);
        assert!((k.joint().trace() - re(1.0)).norm() < 1e-12);
        assert!(k.joint().max_abs_diff(&oracle_post(&spec, a, xi, t1, &[BOB, CHARU])) < 1e-10);
        assert!(k.bob().max_abs_diff(&oracle_post(&spec, a, xi, t1, &[BOB])) < 1e-10);
        assert!(k.bob().max_abs_diff(&oracle_post(&spec, a, xi, t1, &[CHARU])) < 1e-10);
    }

    #[test]
    fn rotated_coefficients_reduce_to_plain_ghz() {
        let (a, xi, t1, th) = (0.8, 1.3, 0.6, 0.5);
        let k = rotated_coefficients(a, xi, 0.0, 0.0, t1, th);
        let b = bell_coefficients(a, xi, t1);
        let n7 = ghz_norm(a, th, xi, t1) / 2.0;
        assert!((k.n7 - n7).abs() < 1e-12);
        assert!((k.b5 - b.b1 / n7).abs() < 1e-12);
        assert!((k.b6 - b.b2 / n7).abs() < 1e-12);
        assert!((k.b7 + b.b3 / n7).norm() < 1e-12);
        assert!((k.b8 + b.b4 / n7).norm() < 1e-12);
    }

    #[test]
    fn rotated_coefficients_hermitian_limit() {
        let k = rotated_coefficients(0.0, 0.4, 1.0, 0.5, 0.9, 0.3);
        assert!(k.b7.norm() < 1e-15 && k.b8.norm() < 1e-15);
        let spec = StateSpec::RotatedGhz { theta: 0.3, x: 1.0, y: 0.5 };
        let pre = reduced(&density(&make_state(&spec).unwrap()), &[BOB, CHARU]).unwrap();
        assert!(k.joint().max_abs_diff(&pre) < 1e-12);
    }

    #[test]
    fn ghz_xi_zero_preserves_local_states() {
        let sc = EvolutionScenario::new(
            StateSpec::Ghz { theta: 0.7 },
            PTParams::from_alpha(0.5, 0.0, 0.8).unwrap(),
        )
        .unwrap();
        let r = analyze(&sc, DEFAULT_TOL).unwrap();
        assert!(r.local_nosignaling);
        assert!(!r.global_nosignaling);
    }

    #[test]
    fn w_breaks_local_preservation() {
        let sc = EvolutionScenario::from_alpha(StateSpec::W { theta: 1.0, phi: FRAC_PI_4 }, 0.9, 1.0, 0.6).unwrap();
        let r = analyze(&sc, DEFAULT_TOL).unwrap();
        assert!(!r.local_nosignaling);
        assert!(!r.global_nosignaling);
    }

    #[test]
    fn rotated_surface_preserves_local_states() {
        let (th, xi) = (0.4, 1.2);
        let sc = EvolutionScenario::from_alpha(StateSpec::RotatedGhz { theta: th, x: xi, y: 0.0 }, 1.1, xi, 0.7).unwrap();
        let r = analyze(&sc, DEFAULT_TOL).unwrap();
        assert!(r.local_nosignaling);
        let c2 = (2.0 * th).cos();
        let want = ComplexMatrix::from_rows(&[
            [re((c2 * xi.cos() + 1.0) / 2.0), re(c2 * xi.sin() / 2.0)],
            [re(c2 * xi.sin() / 2.0), re((1.0 - c2 * xi.cos()) / 2.0)],
        ])
        .unwrap();
        assert!(r.rho_post_b.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn report_json_is_flat_and_round_trips() {
        let sc = EvolutionScenario::from_alpha(StateSpec::Ghz { theta: 0.6 }, 0.9, 1.0, 0.4).unwrap();
        let r = analyze(&sc, DEFAULT_TOL).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["d_B"].is_number());
        assert!(v["global_nosignaling"].is_boolean());
        assert_eq!(v["rho_post_BC"][0][0].as_array().unwrap().len(), 2);
        let back: SignalingReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn bell_report_has_no_charu() {
        let sc = EvolutionScenario::from_alpha(StateSpec::Bell, 0.6, 0.2, 0.9).unwrap();
        let r = analyze(&sc, DEFAULT_TOL).unwrap();
        assert!(r.rho_pre_c.is_none() && r.d_c.is_none());
        assert!((r.d_global - r.d_b).abs() < 1e-15);
        assert!(r.d_b > 1e-3);
    }

    #[test]
    fn analyze_rejects_bad_input() {
        let broken = PTParams::new(0.0, 2.0, 1.0, 0.3, 1.0, 1.0);
        assert!(matches!(
            EvolutionScenario::new(StateSpec::Bell, broken),
            Err(Error::BrokenPhase { .. })
        ));
        let mut sc = EvolutionScenario::from_alpha(StateSpec::Bell, 0.6, 0.2, 0.9).unwrap();
        assert!(analyze(&sc, 0.0).is_err());
        sc.t1 += 1e-6;
        assert!(analyze(&sc, DEFAULT_TOL).is_err());
    }

    #[test]
    fn pure_and_density_paths_agree() {
        let spec = StateSpec::W { theta: 0.9, phi: 0.4 };
        let psi = make_state(&spec).unwrap();
        let u = u_of(1.0, 0.7, 0.5);
        let a = remote_state(&evolve_alice_pure(&psi, &u).unwrap());
        let b = reduced(&evolve_alice(&density(&psi), &u, 3).unwrap(), &[BOB, CHARU]).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    fn arb_family() -> impl Strategy<Value = StateSpec> {
        prop_oneof![
            (0.0f64..1.6).prop_map(|theta| StateSpec::Ghz { theta }),
            (0.0f64..1.6, 0.0f64..1.6).prop_map(|(theta, phi)| StateSpec::W { theta, phi }),
            (0.0f64..1.6, -3.2f64..3.2, -3.2f64..3.2).prop_map(|(theta, x, y)| StateSpec::RotatedGhz { theta, x, y }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn difference_spectrum_pattern(spec in arb_family(), a in 0.0f64..1.5, xi in -3.2f64..3.2, t1 in -3.2f64..3.2) {
            let psi = make_state(&spec).unwrap();
            let u = u_of(a, xi, t1);
            let post = remote_state(&evolve_alice_pure(&psi, &u).unwrap());
            let d = &post - &remote_state(&psi);
            prop_assert!(d.trace().norm() <= 1e-12);
            let ev = hermitian_eigenvalues(&d).unwrap();
            prop_assert!(ev[1].abs() <= 1e-9 && ev[2].abs() <= 1e-9);
            prop_assert!((ev[0] + ev[3]).abs() <= 1e-9);
        }

        #[test]
        fn hermitian_evolution_never_signals(spec in arb_family(), xi in -3.2f64..3.2, t1 in -3.2f64..3.2) {
            let sc = EvolutionScenario::from_alpha(spec, 0.0, xi, t1).unwrap();
            let r = analyze(&sc, DEFAULT_TOL).unwrap();
            prop_assert!((r.p_global - 0.5).abs() <= 1e-10);
            prop_assert!((r.p_b - 0.5).abs() <= 1e-10);
            prop_assert!((r.p_c.unwrap() - 0.5).abs() <= 1e-10);
        }

        #[test]
        fn discarding_a_party_never_helps(spec in arb_family(), a in 0.0f64..1.5, xi in -3.2f64..3.2, t1 in -3.2f64..3.2) {
            let sc = EvolutionScenario::from_alpha(spec, a, xi, t1).unwrap();
            let r = analyze(&sc, DEFAULT_TOL).unwrap();
            prop_assert!(r.p_global >= r.p_b.max(r.p_c.unwrap()) - 1e-12);
            for (p, d) in [(r.p_global, r.d_global), (r.p_b, r.d_b)] {
                prop_assert!((p - 0.5 - d / 4.0).abs() <= 1e-12);
                prop_assert!((0.5..=1.0).contains(&p));
            }
        }

        #[test]
        fn bell_coefficient_identities(a in -1.5f64..1.5, xi in -7.0f64..7.0, t1 in -7.0f64..7.0) {
            let b = bell_coefficients(a, xi, t1);
            prop_assert!(b.n2 >= 2.0 - 1e-12);
            prop_assert!((b.b3 - b.b4.conj()).norm() <= 1e-12);
            prop_assert!((b.b1 + b.b2 - b.n2).abs() <= 1e-9 * b.n2);
        }

        #[test]
        fn rotated_closed_forms_hold(a in 0.0f64..1.5, xi in -3.2f64..3.2, x in -3.2f64..3.2,
                                     y in -3.2f64..3.2, t1 in -3.2f64..3.2, th in 0.0f64..1.6) {
            let k = rotated_coefficients(a, xi, x, y, t1, th);
            prop_assert!(k.n7 > 0.0);
            let psi = make_state(&StateSpec::RotatedGhz { theta: th, x, y }).unwrap();
            let post = evolve_alice_pure(&psi, &u_of(a, xi, t1)).unwrap();
            let bc = remote_state(&post);
            prop_assert!(k.joint().max_abs_diff(&bc) <= 1e-9);
            prop_assert!(k.bob().max_abs_diff(&reduced(&bc, &[0]).unwrap()) <= 1e-9);
            let ev = difference_spectrum(&bc, &remote_state(&psi)).unwrap();
            prop_assert!((k.lambda() - ev[3]).abs() <= 1e-9);
        }
    }
}
