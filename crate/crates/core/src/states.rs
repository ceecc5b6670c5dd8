//! Shared pure states and their reduced density matrices.
//!
//! Qubit A (Alice) is the most significant index, then B, then C. Angles are in
//! radians and accepted over all of ℝ; plots use θ, φ ∈ [0, π/2].

use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{partial_trace, ComplexMatrix};

pub const NORM_TOL: f64 = 1e-12;

/// Qubit positions in the computational-basis ordering.
pub const ALICE: usize = 0;
pub const BOB: usize = 1;
pub const CHARU: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateSpec {
    /// `(|00⟩ + |11⟩)/√2`.
    Bell,
    /// `cos θ|000⟩ + sin θ|111⟩`.
    Ghz { theta: f64 },
    /// `sin θ cos φ|001⟩ + sin θ sin φ|010⟩ + cos θ|100⟩`.
    W { theta: f64, phi: f64 },
    /// `cos θ|0′0′0′⟩ + sin θ|1′1′1′⟩` in the rotated basis
    /// `|0′⟩ = cos(x/2)|0⟩ + e^{iy} sin(x/2)|1⟩`, `|1′⟩ = sin(x/2)|0⟩ − e^{iy} cos(x/2)|1⟩`.
    RotatedGhz { theta: f64, x: f64, y: f64 },
    /// Arbitrary three-qubit amplitudes; normalized by [`make_state`].
    Custom { amplitudes: Vec<C64> },
}

impl StateSpec {
    pub fn n_qubits(&self) -> usize {
        match self {
            StateSpec::Bell => 2,
            _ => 3,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            StateSpec::Bell => "bell",
            StateSpec::Ghz { .. } => "ghz",
            StateSpec::W { .. } => "w",
            StateSpec::RotatedGhz { .. } => "rotated-ghz",
            StateSpec::Custom { .. } => "custom",
        }
    }

    /// Parses 16 whitespace-separated reals as 8 `(re, im)` amplitude pairs.
    pub fn custom_from_text(text: &str) -> Result<Self> {
        let values = text
            .split_whitespace()
            .map(f64::from_str)
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| invalid(format!("custom amplitudes: {e}")))?;
        if values.len() != 16 {
            return Err(invalid(format!(
                "custom amplitudes need 16 reals (8 re/im pairs), got {}",
                values.len()
            )));
        }
        let amplitudes = values.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        Ok(StateSpec::Custom { amplitudes })
    }
}

/// The two vectors of the rotated single-qubit basis.
pub fn rotated_basis(x: f64, y: f64) -> ([C64; 2], [C64; 2]) {
    let (sh, ch) = (x / 2.0).sin_cos();
    let e = C64::from_polar(1.0, y);
    (
        [C64::new(ch, 0.0), e * sh],
        [C64::new(sh, 0.0), -e * ch],
    )
}

fn kron3(v: &[C64; 2]) -> Vec<C64> {
    let mut out = Vec::with_capacity(8);
    for &a in v {
        for &b in v {
            for &c in v {
                out.push(a * b * c);
            }
        }
    }
    out
}

/// Amplitude vector of the state, normalized to unit Dirac norm.
pub fn make_state(spec: &StateSpec) -> Result<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let real = |v: f64| C64::new(v, 0.0);
    let amps = match spec {
        StateSpec::Bell => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![real(h), zero, zero, real(h)]
        }
        StateSpec::Ghz { theta } => {
            let (s, c) = theta.sin_cos();
            let mut v = vec![zero; 8];
            v[0] = real(c);
            v[7] = real(s);
            v
        }
        StateSpec::W { theta, phi } => {
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let mut v = vec![zero; 8];
            v[0b001] = real(st * cp);
            v[0b010] = real(st * sp);
            v[0b100] = real(ct);
            v
        }
        StateSpec::RotatedGhz { theta, x, y } => {
            let (zero_p, one_p) = rotated_basis(*x, *y);
            let (s, c) = theta.sin_cos();
            kron3(&zero_p)
                .into_iter()
                .zip(kron3(&one_p))
                .map(|(a, b)| a * c + b * s)
                .collect()
        }
        StateSpec::Custom { amplitudes } => {
            if amplitudes.len() != 8 {
                return Err(invalid(format!(
                    "custom state needs 8 amplitudes, got {}",
                    amplitudes.len()
                )));
            }
            amplitudes.clone()
        }
    };
    normalize(amps)
}

fn normalize(mut v: Vec<C64>) -> Result<Vec<C64>> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("state amplitudes must be finite"));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(invalid("state vector is zero and cannot be normalized"));
    }
    for z in &mut v {
        *z /= norm;
    }
    Ok(v)
}

/// `|ψ⟩⟨ψ|`.
pub fn density(psi: &[C64]) -> ComplexMatrix {
    ComplexMatrix::outer(psi, psi)
}

fn qubit_count(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        d => Err(invalid(format!("expected a 1-, 2- or 3-qubit matrix, got dimension {d}"))),
    }
}

/// Reduced state on the listed qubits of a 2- or 3-qubit density matrix.
pub fn reduced(rho: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = qubit_count(rho.dim())?;
    partial_trace(rho, &vec![2; n], keep)
}

/// Density matrix of a normalized state spec.
pub fn density_of(spec: &StateSpec) -> Result<ComplexMatrix> {
    make_state(spec).map(|psi| density(&psi))
}
