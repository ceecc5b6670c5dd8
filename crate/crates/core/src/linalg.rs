//! Dense complex linear algebra for the tiny matrices used here (dimension 2, 4 or 8).
//!
//! Storage is row-major. Everything is a pure function on immutable values.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

/// Entrywise tolerance used when an input is required to be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Convergence threshold on the off-diagonal Frobenius norm of the Jacobi iteration.
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Taylor order used by [`expm_reference`] after scaling the argument below 1/2 in norm.
const EXPM_ORDER: usize = 18;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must equal `dim²`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(invalid("rows must form a square matrix"));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(dim, data)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|psi⟩⟨phi|`.
    pub fn outer(psi: &[C64], phi: &[C64]) -> Self {
        assert_eq!(psi.len(), phi.len(), "outer product of unequal lengths");
        let n = psi.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = psi[i] * phi[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.dim)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermiticity, `max |A - A†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let f = a[row * n + col] / p;
                for k in col..n {
                    let v = a[col * n + k];
                    a[row * n + k] -= f * v;
                }
            }
        }
        det
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `Tr(ρ²)` for a density matrix.
    pub fn purity(&self) -> f64 {
        (self * self).trace().re
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({0}x{0}) [", self.dim)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.8}{:+.8}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

// Nested arrays of [re, im] pairs, one inner array per row.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .rows()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Kronecker product: entry `(i·dim_b + k, j·dim_b + l)` is `a[i,j]·b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Traces out every subsystem not listed in `keep`.
///
/// Subsystem 0 is the most significant index. The kept subsystems appear in
/// the result in increasing index order.
pub fn partial_trace(
    rho: &ComplexMatrix,
    subsystem_dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = subsystem_dims.iter().product();
    if subsystem_dims.is_empty() || total != rho.dim {
        return Err(invalid(format!(
            "subsystem dimensions {subsystem_dims:?} do not factor a {0}x{0} matrix",
            rho.dim
        )));
    }
    if keep.is_empty() {
        return Err(invalid("at least one subsystem must be kept"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= subsystem_dims.len()) {
        return Err(invalid(format!(
            "keep set {keep:?} is not a set of subsystem indices below {}",
            subsystem_dims.len()
        )));
    }
    let traced: Vec<usize> = (0..subsystem_dims.len())
        .filter(|i| !kept.contains(i))
        .collect();

    // Strides of each subsystem in the full index.
    let mut strides = vec![1usize; subsystem_dims.len()];
    for i in (0..subsystem_dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * subsystem_dims[i + 1];
    }
    let out_dim: usize = kept.iter().map(|&i| subsystem_dims[i]).product();

    let kept_offsets = index_offsets(&kept, subsystem_dims, &strides);
    let env_offsets = index_offsets(&traced, subsystem_dims, &strides);

    let mut out = ComplexMatrix::zeros(out_dim);
    for (a, &oa) in kept_offsets.iter().enumerate() {
        for (b, &ob) in kept_offsets.iter().enumerate() {
            out[(a, b)] = env_offsets.iter().map(|&e| rho[(oa + e, ob + e)]).sum();
        }
    }
    Ok(out)
}

/// Full-space offsets of every joint label of the listed subsystems, in
/// lexicographic order (first listed subsystem most significant).
fn index_offsets(systems: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &sys in systems {
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..dims[sys]).map(move |d| o + d * strides[sys]))
            .collect();
    }
    offsets
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(invalid(format!(
            "matrix is not Hermitian (max |A - A^dagger| = {defect:e})"
        )));
    }
    let n = h.dim;
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let scale = a.frobenius_norm().max(1.0);
    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }

    let mut evs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    evs.sort_by(f64::total_cmp);
    Ok(evs)
}

/// One unitary rotation `A <- V† A V` acting on rows/columns `p, q` that zeroes `A[p,q]`.
///
/// `V = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` where `A[p,q] = |g| e^{iφ}`.
fn jacobi_rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let mag = g.norm();
    if mag == 0.0 {
        return;
    }
    let phase = g / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let pc = phase.conj();
    let v_pp = C64::new(c, 0.0);
    let v_pq = C64::new(s, 0.0);
    let v_qp = -pc * s;
    let v_qq = pc * c;

    let n = a.dim;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * v_pp + akq * v_qp;
        a[(k, q)] = akp * v_pq + akq * v_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = v_pp.conj() * apk + v_qp.conj() * aqk;
        a[(q, k)] = v_pq.conj() * apk + v_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|l| l.abs()).sum())
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// This is the independent oracle for the closed-form propagator; it makes no
/// use of the two-level structure.
pub fn expm_reference(a: &ComplexMatrix) -> ComplexMatrix {
    expm_taylor(a, EXPM_ORDER)
}

/// Scaling and squaring with a Taylor polynomial of the given order.
pub fn expm_taylor(a: &ComplexMatrix, order: usize) -> ComplexMatrix {
    let norm = a.norm1();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));

    // Horner evaluation of sum_{k<=order} X^k / k!.
    let n = a.dim;
    let mut result = ComplexMatrix::identity(n);
    for k in (1..=order).rev() {
        result = &(&scaled * &result).scale_real(1.0 / k as f64) + &ComplexMatrix::identity(n);
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    fn random_matrix(dim: usize, seed: &[f64]) -> ComplexMatrix {
        let data = (0..dim * dim)
            .map(|k| c(seed[(2 * k) % seed.len()], seed[(2 * k + 1) % seed.len()]))
            .collect();
        ComplexMatrix::from_vec(dim, data).unwrap()
    }

    fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
        (m + &m.adjoint()).scale_real(0.5)
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert!(ComplexMatrix::from_vec(2, vec![c(1., 0.); 3]).is_err());
        assert!(ComplexMatrix::from_vec(0, vec![]).is_err());
    }

    #[test]
    fn tensor_identities_and_projectors() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
        let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert_eq!(tensor(&p0, &p0), ComplexMatrix::from_real_diag(&[1., 0., 0., 0.]));
    }

    #[test]
    fn tensor_sigma_x_sigma_z() {
        let m = tensor(&pauli_x(), &pauli_z());
        // Hand-evaluated index formula: (i*2+k, j*2+l) = x[i,j] z[k,l].
        let mut expected = ComplexMatrix::zeros(4);
        expected[(0, 2)] = c(1., 0.);
        expected[(1, 3)] = c(-1., 0.);
        expected[(2, 0)] = c(1., 0.);
        expected[(3, 1)] = c(-1., 0.);
        assert_eq!(m, expected);
    }

    #[test]
    fn partial_trace_product_state() {
        let p00 = ComplexMatrix::from_real_diag(&[1., 0., 0., 0.]);
        let r = partial_trace(&p00, &[2, 2], &[1]).unwrap();
        assert_eq!(r, ComplexMatrix::from_real_diag(&[1., 0.]));
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)];
        let rho = ComplexMatrix::outer(&psi, &psi);
        for keep in [0, 1] {
            let r = partial_trace(&rho, &[2, 2], &[keep]).unwrap();
            assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 0.5])) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_keeps_order_and_traces_middle() {
        // rho = a ⊗ b ⊗ c with distinct factors; keeping {0, 2} must return a ⊗ c.
        let a = ComplexMatrix::from_rows(&[[c(0.7, 0.), c(0.1, 0.2)], [c(0.1, -0.2), c(0.3, 0.)]])
            .unwrap();
        let b = ComplexMatrix::from_real_diag(&[0.25, 0.75]);
        let cc = ComplexMatrix::from_rows(&[[c(0.4, 0.), c(0., -0.3)], [c(0., 0.3), c(0.6, 0.)]])
            .unwrap();
        let rho = tensor(&tensor(&a, &b), &cc);
        let r = partial_trace(&rho, &[2, 2, 2], &[0, 2]).unwrap();
        assert!(r.max_abs_diff(&tensor(&a, &cc)) < 1e-15);
        let r = partial_trace(&rho, &[2, 2, 2], &[1]).unwrap();
        assert!(r.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = ComplexMatrix::identity(4);
        assert!(partial_trace(&rho, &[2, 2, 2], &[0]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[1, 1]).is_err());
    }

    #[test]
    fn eigenvalues_of_simple_matrices() {
        let e = hermitian_eigenvalues(&ComplexMatrix::from_real_diag(&[3., 1.])).unwrap();
        assert_eq!(e, vec![1., 3.]);
        let e = hermitian_eigenvalues(&pauli_x()).unwrap();
        assert!((e[0] + 1.).abs() < 1e-15 && (e[1] - 1.).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[[c(0., 0.), c(1., 0.)], [c(0., 0.), c(0., 0.)]]).unwrap();
        assert!(hermitian_eigenvalues(&m).is_err());
    }

    #[test]
    fn eigenvalues_of_degenerate_spectrum() {
        // U diag(1,1,2,2) U† with a non-trivial unitary from a Hermitian generator.
        let g = hermitian_part(&random_matrix(4, &[0.3, -0.7, 1.1, 0.4, -0.2, 0.9]));
        let u = expm_reference(&g.scale(c(0., 1.)));
        let m = &(&u * &ComplexMatrix::from_real_diag(&[1., 1., 2., 2.])) * &u.adjoint();
        let e = hermitian_eigenvalues(&m).unwrap();
        for (got, want) in e.iter().zip([1., 1., 2., 2.]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn trace_norm_cases() {
        assert_eq!(trace_norm(&ComplexMatrix::from_real_diag(&[1., -1.])).unwrap(), 2.0);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(4)).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(h, 0.), c(h, 0.)];
        let minus = [c(h, 0.), c(-h, 0.)];
        let d = &ComplexMatrix::outer(&plus, &plus) - &ComplexMatrix::outer(&minus, &minus);
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn expm_known_values() {
        assert!(expm_reference(&ComplexMatrix::zeros(2)).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-16);
        let a = pauli_z().scale(c(0., -std::f64::consts::FRAC_PI_2));
        let want = ComplexMatrix::from_rows(&[[c(0., -1.), c(0., 0.)], [c(0., 0.), c(0., 1.)]]).unwrap();
        assert!(expm_reference(&a).max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn expm_converged_against_doubled_order() {
        let a = random_matrix(4, &[1.3, -0.4, 2.2, 0.9, -1.7, 0.5, 0.8]);
        let lo = expm_taylor(&a, EXPM_ORDER);
        let hi = expm_taylor(&a, 2 * EXPM_ORDER);
        assert!(lo.max_abs_diff(&hi) <= 1e-12 * hi.max_abs());
    }

    #[test]
    fn det_of_known_matrices() {
        let m = ComplexMatrix::from_rows(&[[c(1., 1.), c(2., 0.)], [c(0., 3.), c(4., 0.)]]).unwrap();
        // (1+i)·4 − 2·3i = 4 − 2i
        assert!((m.det() - c(4., -2.)).norm() < 1e-15);
        assert!((tensor(&m, &ComplexMatrix::identity(2)).det() - m.det() * m.det()).norm() < 1e-12);
    }

    fn arb_entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-2.0f64..2.0, 2 * n * n)
    }

    fn mat_from(n: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_vec(n, v.chunks(2).map(|p| c(p[0], p[1])).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn tensor_trace_multiplies(a in arb_entries(2), b in arb_entries(4)) {
            let (a, b) = (mat_from(2, &a), mat_from(4, &b));
            let t = tensor(&a, &b);
            prop_assert!((t.trace() - a.trace() * b.trace()).norm() <= 1e-12 * (1.0 + t.max_abs() * 8.0));
        }

        #[test]
        fn tensor_is_associative(a in arb_entries(2), b in arb_entries(2), c_ in arb_entries(2)) {
            let (a, b, cc) = (mat_from(2, &a), mat_from(2, &b), mat_from(2, &c_));
            let left = tensor(&tensor(&a, &b), &cc);
            let right = tensor(&a, &tensor(&b, &cc));
            prop_assert!(left.max_abs_diff(&right) <= 1e-14);
        }

        #[test]
        fn partial_trace_preserves_trace_and_hermiticity(v in arb_entries(8), keep in 0usize..3) {
            let m = mat_from(8, &v);
            let rho = &m * &m.adjoint();
            let r = partial_trace(&rho, &[2, 2, 2], &[keep]).unwrap();
            prop_assert!((r.trace() - rho.trace()).norm() <= 1e-12 * rho.trace().norm().max(1.0));
            prop_assert!(r.is_hermitian(1e-12));
            let all = partial_trace(&rho, &[2, 2, 2], &[0, 1, 2]).unwrap();
            prop_assert!(all.max_abs_diff(&rho) == 0.0);
        }

        #[test]
        fn eigenvalues_reproduce_power_sums(v in arb_entries(4)) {
            let h = hermitian_part(&mat_from(4, &v));
            let e = hermitian_eigenvalues(&h).unwrap();
            let s1: f64 = e.iter().sum();
            let s2: f64 = e.iter().map(|x| x * x).sum();
            prop_assert!((s1 - h.trace().re).abs() <= 1e-9);
            prop_assert!((s2 - (&h * &h).trace().re).abs() <= 1e-9);
            prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn trace_norm_triangle(a in arb_entries(4), b in arb_entries(4)) {
            let (x, y) = (hermitian_part(&mat_from(4, &a)), hermitian_part(&mat_from(4, &b)));
            let lhs = trace_norm(&(&x + &y)).unwrap();
            prop_assert!(lhs <= trace_norm(&x).unwrap() + trace_norm(&y).unwrap() + 1e-9);
        }

        #[test]
        fn expm_inverse_pair(v in proptest::collection::vec(-1.25f64..1.25, 32)) {
            // Entries bounded so that the 1-norm stays at or below 5.
            let a = mat_from(4, &v);
            prop_assume!(a.norm1() <= 5.0);
            let prod = &expm_reference(&a) * &expm_reference(&a.scale_real(-1.0));
            prop_assert!(prod.max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-9);
        }

        #[test]
        fn serde_round_trip(v in arb_entries(2)) {
            let m = mat_from(2, &v);
            let json = serde_json::to_string(&m).unwrap();
            let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
