//! 4×4 complex matrices, the signature (3,1) Hermitian form, group membership
//! and random sampling of SL(4,ℂ) and SU(3,1) elements.
//!
//! Inverses of unimodular matrices are computed through the classical
//! adjugate, so `inverse(g)` is exact cofactor arithmetic rather than a
//! pivoted factorization.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default tolerance for determinant and Hermitian-form residuals.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Matrix of the Hermitian form `⟨z, w⟩ = w* H z = z₁w̄₄ + z₂w̄₂ + z₃w̄₃ + z₄w̄₁`.
///
/// `H = H*`, `H² = I`, signature (3,1).
pub const H: ComplexMatrix4 = ComplexMatrix4::new(
    ZERO, ZERO, ZERO, ONE, //
    ZERO, ONE, ZERO, ZERO, //
    ZERO, ZERO, ONE, ZERO, //
    ONE, ZERO, ZERO, ZERO,
);

/// Which group a [`GroupElement`] is validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "SL4")]
    Sl4,
    #[serde(rename = "SU31")]
    Su31,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flavor::Sl4 => write!(f, "SL4"),
            Flavor::Su31 => write!(f, "SU31"),
        }
    }
}

pub fn diag(d: [C64; 4]) -> ComplexMatrix4 {
    ComplexMatrix4::from_diagonal(&Vector4::from(d))
}

pub fn real_diag(d: [f64; 4]) -> ComplexMatrix4 {
    diag(d.map(|x| C64::new(x, 0.0)))
}

pub fn multiply(a: &ComplexMatrix4, b: &ComplexMatrix4) -> ComplexMatrix4 {
    a * b
}

pub fn trace(a: &ComplexMatrix4) -> C64 {
    a.trace()
}

/// `σ(A) = ½(tr(A)² − tr(A²))`, the second elementary symmetric function of
/// the eigenvalues.
pub fn sigma(a: &ComplexMatrix4) -> C64 {
    let t = a.trace();
    (t * t - (a * a).trace()) * 0.5
}

/// Max-norm `max |a_ij|`.
pub fn max_norm(a: &ComplexMatrix4) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn is_finite(a: &ComplexMatrix4) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn det3(m: &ComplexMatrix4, rows: [usize; 3], cols: [usize; 3]) -> C64 {
    let e = |i: usize, j: usize| m[(rows[i], cols[j])];
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

fn complement(k: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut n = 0;
    for i in 0..4 {
        if i != k {
            out[n] = i;
            n += 1;
        }
    }
    out
}

/// Classical adjugate: entry `(i, j)` is `(−1)^{i+j}` times the minor obtained
/// by deleting row `j` and column `i`. Satisfies `a · adj(a) = det(a) · I`.
pub fn adjugate(a: &ComplexMatrix4) -> ComplexMatrix4 {
    ComplexMatrix4::from_fn(|i, j| {
        let minor = det3(a, complement(j), complement(i));
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    })
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(a: &ComplexMatrix4) -> C64 {
    (0..4).fold(ZERO, |acc, j| {
        let minor = det3(a, [1, 2, 3], complement(j));
        if j % 2 == 0 {
            acc + a[(0, j)] * minor
        } else {
            acc - a[(0, j)] * minor
        }
    })
}

/// Inverse of a general invertible matrix as `adj(a) / det(a)`.
///
/// Fails with [`Error::SingularMatrix`] when the Frobenius condition estimate
/// `‖a‖·‖a⁻¹‖` exceeds `max_condition`.
pub fn checked_inverse(a: &ComplexMatrix4, max_condition: f64) -> Result<ComplexMatrix4> {
    let det = determinant(a);
    let adj = adjugate(a);
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::SingularMatrix { condition: f64::INFINITY });
    }
    let inv = adj / det;
    let condition = a.norm() * inv.norm();
    if !condition.is_finite() || condition > max_condition {
        return Err(Error::SingularMatrix { condition });
    }
    Ok(inv)
}

/// Inverse of a unimodular matrix, which is exactly its adjugate.
pub fn inverse_unimodular(a: &ComplexMatrix4, tol: f64) -> Result<ComplexMatrix4> {
    let residual = (determinant(a) - ONE).norm();
    if residual > tol {
        return Err(Error::NotUnimodular { residual });
    }
    Ok(adjugate(a))
}

/// Coefficients of `χ_A(x) = x⁴ − t1·x³ + σ·x² − t_inv·x + det`.
///
/// For unimodular `A`, `t_inv = tr(A⁻¹)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyData {
    pub t1: C64,
    pub sigma: C64,
    pub t_inv: C64,
    pub det: C64,
}

impl CharPolyData {
    /// Coefficients of the general (not necessarily unimodular) characteristic
    /// polynomial. The linear coefficient is `tr(adj A)`.
    pub fn of_matrix(a: &ComplexMatrix4) -> Self {
        Self { t1: a.trace(), sigma: sigma(a), t_inv: adjugate(a).trace(), det: determinant(a) }
    }

    /// Monic coefficients `[c0, c1, c2, c3]` of `x⁴ + c3 x³ + c2 x² + c1 x + c0`.
    pub fn monic_coefficients(&self) -> [C64; 4] {
        [self.det, -self.t_inv, self.sigma, -self.t1]
    }

    /// `‖A⁴ − t1A³ + σA² − t_inv A + det·I‖_max`.
    pub fn cayley_hamilton_residual(&self, a: &ComplexMatrix4) -> f64 {
        let a2 = a * a;
        let a3 = a2 * a;
        let a4 = a3 * a;
        let r = a4 - a3 * self.t1 + a2 * self.sigma - a * self.t_inv + ComplexMatrix4::identity() * self.det;
        max_norm(&r)
    }
}

pub fn char_poly(g: &GroupElement) -> Result<CharPolyData> {
    let data = CharPolyData::of_matrix(&g.matrix);
    let residual = (data.det - ONE).norm();
    if residual > g.tol {
        return Err(Error::NotUnimodular { residual });
    }
    Ok(data)
}

fn sort_eigenvalues(mut v: [C64; 4]) -> [C64; 4] {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Eigenvalues with multiplicity, sorted lexicographically by `(Re, Im)`.
///
/// Uses a complex Schur decomposition of the matrix. If the QR iteration does
/// not converge, falls back to simultaneous root iteration on the
/// characteristic polynomial; if that also fails the input is reported as
/// ill-conditioned through [`Error::ConvergenceFailure`].
pub fn eigenvalues(a: &ComplexMatrix4) -> Result<[C64; 4]> {
    if !is_finite(a) {
        return Err(Error::ConvergenceFailure);
    }
    if let Some(schur) = nalgebra::Schur::try_new(*a, f64::EPSILON, 500) {
        if let Some(ev) = schur.eigenvalues() {
            let v = [ev[0], ev[1], ev[2], ev[3]];
            if v.iter().all(|z| z.is_finite()) {
                return Ok(sort_eigenvalues(v));
            }
        }
    }
    polynomial_roots(CharPolyData::of_matrix(a).monic_coefficients())
        .map(sort_eigenvalues)
        .ok_or(Error::ConvergenceFailure)
}

/// Aberth–Ehrlich iteration for the roots of a monic quartic, with fixed
/// deterministic starting points.
pub(crate) fn polynomial_roots(c: [C64; 4]) -> Option<[C64; 4]> {
    let eval = |z: C64| {
        let p = (((z + c[3]) * z + c[2]) * z + c[1]) * z + c[0];
        let dp = ((z * 4.0 + c[3] * 3.0) * z + c[2] * 2.0) * z + c[1];
        (p, dp)
    };
    let radius = 1.0 + c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let mut z: [C64; 4] = std::array::from_fn(|k| C64::from_polar(0.5 * radius, 0.4 + 2.0 * PI * k as f64 / 4.0));
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..4 {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..4).filter(|&j| j != k).map(|j| ONE / (z[k] - z[j])).sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z.iter().all(|r| r.is_finite()).then_some(z)
}

/// Residuals reported by [`is_su31`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub is_member: bool,
    /// `‖a* H a − H‖_max`
    pub form_residual: f64,
    /// `|det a − 1|`
    pub det_residual: f64,
}

pub fn is_su31(a: &ComplexMatrix4, tol: f64) -> MembershipReport {
    let form_residual = max_norm(&(a.adjoint() * H * a - H));
    let det_residual = (determinant(a) - ONE).norm();
    MembershipReport { is_member: form_residual <= tol && det_residual <= tol, form_residual, det_residual }
}

/// A unimodular 4×4 complex matrix, optionally validated to lie in SU(3,1).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: ComplexMatrix4,
    flavor: Flavor,
    tol: f64,
}

impl GroupElement {
    pub fn new(matrix: ComplexMatrix4, flavor: Flavor) -> Result<Self> {
        Self::with_tolerance(matrix, flavor, MEMBERSHIP_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix4, flavor: Flavor, tol: f64) -> Result<Self> {
        if !is_finite(&matrix) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        match flavor {
            Flavor::Sl4 => {
                let residual = (determinant(&matrix) - ONE).norm();
                if residual > tol {
                    return Err(Error::NotUnimodular { residual });
                }
            }
            Flavor::Su31 => {
                let report = is_su31(&matrix, tol);
                if report.det_residual > tol {
                    return Err(Error::NotUnimodular { residual: report.det_residual });
                }
                if report.form_residual > tol {
                    return Err(Error::FlavorMismatch(format!(
                        "matrix does not preserve the (3,1) form (residual {:.3e})",
                        report.form_residual
                    )));
                }
            }
        }
        Ok(Self { matrix, flavor, tol })
    }

    pub fn sl4(matrix: ComplexMatrix4) -> Result<Self> {
        Self::new(matrix, Flavor::Sl4)
    }

    pub fn su31(matrix: ComplexMatrix4) -> Result<Self> {
        Self::new(matrix, Flavor::Su31)
    }

    pub fn identity(flavor: Flavor) -> Self {
        Self { matrix: ComplexMatrix4::identity(), flavor, tol: MEMBERSHIP_TOL }
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.matrix
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Same matrix, validated as an SU(3,1) element.
    pub fn to_su31(&self) -> Result<Self> {
        Self::with_tolerance(self.matrix, Flavor::Su31, self.tol)
    }

    /// Demote to the SL(4,ℂ) flavor (always succeeds).
    pub fn to_sl4(&self) -> Self {
        Self { flavor: Flavor::Sl4, ..self.clone() }
    }

    pub fn is_su31(&self) -> bool {
        self.flavor == Flavor::Su31 || is_su31(&self.matrix, self.tol).is_member
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> GroupElement {
        Self { matrix: adjugate(&self.matrix), ..self.clone() }
    }

    /// Group product; the result keeps the common flavor.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let flavor = if self.flavor == Flavor::Su31 && other.flavor == Flavor::Su31 {
            Flavor::Su31
        } else {
            Flavor::Sl4
        };
        Self { matrix: self.matrix * other.matrix, flavor, tol: self.tol.max(other.tol) }
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &GroupElement) -> GroupElement {
        let flavor = if self.flavor == Flavor::Su31 && g.flavor == Flavor::Su31 {
            Flavor::Su31
        } else {
            Flavor::Sl4
        };
        Self { matrix: g.matrix * self.matrix * adjugate(&g.matrix), flavor, tol: self.tol.max(g.tol) }
    }
}

pub fn inverse(g: &GroupElement) -> Result<GroupElement> {
    inverse_unimodular(&g.matrix, g.tol)?;
    Ok(g.inverse())
}

pub fn expm(x: &ComplexMatrix4) -> ComplexMatrix4 {
    x.exp()
}

/// Complex basis of the traceless matrices: `E_jk` (j ≠ k) followed by
/// `E_jj − E_{j+1,j+1}`.
pub fn sl4_basis() -> &'static [ComplexMatrix4; 15] {
    static BASIS: OnceLock<[ComplexMatrix4; 15]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut out = Vec::with_capacity(15);
        for j in 0..4 {
            for k in 0..4 {
                if j != k {
                    let mut e = ComplexMatrix4::zeros();
                    e[(j, k)] = ONE;
                    out.push(e);
                }
            }
        }
        for j in 0..3 {
            let mut e = ComplexMatrix4::zeros();
            e[(j, j)] = ONE;
            e[(j + 1, j + 1)] = -ONE;
            out.push(e);
        }
        out.try_into().expect("15 traceless generators")
    })
}

/// Real basis of `su(3,1) = {X : X*H + HX = 0, tr X = 0}`, orthonormal for
/// the real inner product `Re tr(X* Y)`.
pub fn su31_basis() -> &'static [ComplexMatrix4; 15] {
    static BASIS: OnceLock<[ComplexMatrix4; 15]> = OnceLock::new();
    BASIS.get_or_init(|| {
        // X = H K with K anti-Hermitian spans u(3,1); remove the trace with the
        // central element iI, then orthonormalize.
        let mut candidates = Vec::with_capacity(16);
        for j in 0..4 {
            for k in j..4 {
                let mut k1 = ComplexMatrix4::zeros();
                if j == k {
                    k1[(j, j)] = I;
                    candidates.push(k1);
                } else {
                    k1[(j, k)] = ONE;
                    k1[(k, j)] = -ONE;
                    candidates.push(k1);
                    let mut k2 = ComplexMatrix4::zeros();
                    k2[(j, k)] = I;
                    k2[(k, j)] = I;
                    candidates.push(k2);
                }
            }
        }
        let mut basis: Vec<ComplexMatrix4> = Vec::with_capacity(15);
        for k in candidates {
            let x = H * k;
            let mut x = x - ComplexMatrix4::identity() * (x.trace() / 4.0);
            for b in &basis {
                let c = real_inner(b, &x);
                x -= b * C64::new(c, 0.0);
            }
            let n = real_inner(&x, &x).sqrt();
            if n > 1e-8 {
                basis.push(x / C64::new(n, 0.0));
            }
        }
        basis.try_into().expect("su(3,1) is 15-dimensional")
    })
}

fn real_inner(a: &ComplexMatrix4, b: &ComplexMatrix4) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Deterministic stream for a seed; the tag separates the sampler families.
pub(crate) fn seeded_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

/// Largest Frobenius condition number accepted by [`random_sl4`].
pub const SL4_MAX_CONDITION: f64 = 60.0;

/// Random SL(4,ℂ) element: complex Gaussian entries (variance 1), redrawn
/// from the same stream until the condition estimate is below
/// [`SL4_MAX_CONDITION`], then divided by the principal fourth root of the
/// determinant.
pub fn random_sl4(seed: u64) -> GroupElement {
    let mut rng = seeded_rng(seed, 1);
    loop {
        let m = ComplexMatrix4::from_fn(|_, _| {
            C64::new(gaussian(&mut rng), gaussian(&mut rng)) * std::f64::consts::FRAC_1_SQRT_2
        });
        let det = determinant(&m);
        let Ok(inv) = checked_inverse(&m, SL4_MAX_CONDITION) else {
            continue;
        };
        debug_assert!(inv.iter().all(|z| z.is_finite()));
        let m = m / det.powf(0.25);
        return GroupElement { matrix: m, flavor: Flavor::Sl4, tol: MEMBERSHIP_TOL };
    }
}

/// Random element of the Lie algebra su(3,1) with Gaussian coordinates of
/// standard deviation `scale` in the orthonormal basis.
pub fn random_su31_algebra(rng: &mut ChaCha8Rng, scale: f64) -> ComplexMatrix4 {
    su31_basis()
        .iter()
        .fold(ComplexMatrix4::zeros(), |acc, b| acc + b * C64::new(scale * gaussian(rng), 0.0))
}

/// `exp(X)` for a random `X ∈ su(3,1)`; `scale = 0` gives the identity.
pub fn random_su31(seed: u64, scale: f64) -> GroupElement {
    assert!(scale >= 0.0, "scale must be non-negative");
    let mut rng = seeded_rng(seed, 2);
    let x = random_su31_algebra(&mut rng, scale);
    GroupElement { matrix: expm(&x), flavor: Flavor::Su31, tol: MEMBERSHIP_TOL }
}

/// Scale of the conjugating element used by [`random_loxodromic`].
pub const LOXODROMIC_CONJUGATOR_SCALE: f64 = 0.5;

/// `k · diag(λ, u, v, 1/λ̄) · k⁻¹` with `|λ| = modulus`, `|u| = |v| = 1`,
/// `λ/λ̄ · u · v = 1` and `k` a random SU(3,1) element.
pub fn random_loxodromic(seed: u64, modulus: f64) -> GroupElement {
    assert!(modulus > 1.0, "loxodromic modulus must exceed 1");
    let mut rng = seeded_rng(seed, 3);
    let theta = rng.random_range(0.0..2.0 * PI);
    let phi = rng.random_range(0.0..2.0 * PI);
    let lambda = C64::from_polar(modulus, theta);
    let u = C64::from_polar(1.0, phi);
    let v = C64::from_polar(1.0, -2.0 * theta - phi);
    let d = diag([lambda, u, v, ONE / lambda.conj()]);
    let k = random_su31(rng.random(), LOXODROMIC_CONJUGATOR_SCALE);
    GroupElement { matrix: k.matrix * d * adjugate(&k.matrix), flavor: Flavor::Su31, tol: MEMBERSHIP_TOL }
}

// ---------------------------------------------------------------------------
// JSON representation

/// `{"rows": [[[re, im] × 4] × 4]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: [[[f64; 2]; 4]; 4],
}

impl From<&ComplexMatrix4> for MatrixJson {
    fn from(m: &ComplexMatrix4) -> Self {
        Self { rows: std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im])) }
    }
}

impl From<&MatrixJson> for ComplexMatrix4 {
    fn from(j: &MatrixJson) -> Self {
        ComplexMatrix4::from_fn(|r, c| C64::new(j.rows[r][c][0], j.rows[r][c][1]))
    }
}

/// `{"rows": ..., "flavor": "SL4" | "SU31"}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElementJson {
    pub rows: [[[f64; 2]; 4]; 4],
    pub flavor: Flavor,
}

impl From<&GroupElement> for GroupElementJson {
    fn from(g: &GroupElement) -> Self {
        Self { rows: MatrixJson::from(&g.matrix).rows, flavor: g.flavor }
    }
}

impl GroupElementJson {
    /// Validates the invariants of the declared flavor.
    pub fn to_element(&self) -> Result<GroupElement> {
        let m = ComplexMatrix4::from(&MatrixJson { rows: self.rows });
        GroupElement::new(m, self.flavor)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupElementJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        GroupElementJson::deserialize(d)?.to_element().map_err(serde::de::Error::custom)
    }
}

/// Singular values of a dynamically sized complex matrix, descending.
pub(crate) fn singular_values(m: DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_product(a: &ComplexMatrix4, b: &ComplexMatrix4) -> ComplexMatrix4 {
        let mut out = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = ZERO;
                for k in 0..4 {
                    s += a[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    #[test]
    fn hermitian_form_constant() {
        assert_eq!(H, H.adjoint());
        assert_eq!(H * H, ComplexMatrix4::identity());
        let eig = nalgebra::SymmetricEigen::new(H).eigenvalues;
        let neg = eig.iter().filter(|&&l| l < 0.0).count();
        assert_eq!((4 - neg, neg), (3, 1));
    }

    #[test]
    fn multiply_examples() {
        let m = random_sl4(3).matrix;
        assert_eq!(multiply(&ComplexMatrix4::identity(), &m), m);
        let p = multiply(&real_diag([2.0, 1.0, 1.0, 0.5]), &real_diag([0.5, 1.0, 1.0, 2.0]));
        assert_eq!(p, ComplexMatrix4::identity());
        let a = random_sl4(10).matrix;
        let b = random_sl4(11).matrix;
        assert!(max_norm(&(multiply(&a, &b) - naive_product(&a, &b))) < 1e-13);
    }

    #[test]
    fn adjugate_examples() {
        assert_eq!(adjugate(&ComplexMatrix4::identity()), ComplexMatrix4::identity());
        assert_eq!(adjugate(&real_diag([2.0, 1.0, 1.0, 0.5])), real_diag([0.5, 1.0, 1.0, 2.0]));
        for seed in 0..50 {
            let mut rng = seeded_rng(seed, 99);
            let a = ComplexMatrix4::from_fn(|_, _| C64::new(gaussian(&mut rng), gaussian(&mut rng)));
            let lu_det = a.lu().determinant();
            assert!((determinant(&a) - lu_det).norm() < 1e-10 * (1.0 + lu_det.norm()));
            let r = a * adjugate(&a) - ComplexMatrix4::identity() * determinant(&a);
            assert!(max_norm(&r) < 1e-10, "seed {seed}: {}", max_norm(&r));
        }
    }

    #[test]
    fn adjugate_is_anti_homomorphism() {
        for seed in 0..50 {
            let a = random_sl4(2 * seed).matrix;
            let b = random_sl4(2 * seed + 1).matrix;
            let lhs = adjugate(&(a * b));
            let rhs = adjugate(&b) * adjugate(&a);
            assert!(max_norm(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn inverse_examples() {
        let id = GroupElement::identity(Flavor::Sl4);
        assert_eq!(inverse(&id).unwrap().matrix, ComplexMatrix4::identity());
        let g = GroupElement::sl4(diag([I, ONE, -ONE, I])).unwrap();
        assert_eq!(*inverse(&g).unwrap().matrix(), diag([-I, ONE, -ONE, -I]));
        for seed in 0..50 {
            let g = random_su31(seed, 1.0);
            let via_form = H * g.matrix.adjoint() * H;
            assert!(max_norm(&(g.inverse().matrix - via_form)) < 1e-10);
            assert!(max_norm(&(g.matrix * g.inverse().matrix - ComplexMatrix4::identity())) < 1e-10);
        }
        let bad = real_diag([2.0, 1.0, 1.0, 1.0]);
        assert!(matches!(inverse_unimodular(&bad, 1e-9), Err(Error::NotUnimodular { .. })));
        assert!(matches!(GroupElement::sl4(bad), Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn trace_and_sigma_examples() {
        assert_eq!(trace(&ComplexMatrix4::identity()), C64::new(4.0, 0.0));
        assert_eq!(trace(&real_diag([2.0, 1.0, 1.0, 0.5])), C64::new(4.5, 0.0));
        assert_eq!(trace(&diag([I, ONE, -ONE, I])), C64::new(0.0, 2.0));
        assert_eq!(sigma(&ComplexMatrix4::identity()), C64::new(6.0, 0.0));
        assert_eq!(sigma(&real_diag([2.0, 1.0, 1.0, 0.5])), C64::new(7.0, 0.0));
        let s = sigma(&diag([I, ONE, -ONE, I]));
        assert_eq!(s, C64::new(-2.0, 0.0));
    }

    #[test]
    fn char_poly_examples() {
        let id = GroupElement::identity(Flavor::Sl4);
        let c = char_poly(&id).unwrap();
        assert_eq!((c.t1, c.sigma, c.t_inv, c.det), (C64::new(4.0, 0.0), C64::new(6.0, 0.0), C64::new(4.0, 0.0), ONE));
        let d = GroupElement::su31(real_diag([2.0, 1.0, 1.0, 0.5])).unwrap();
        let c = char_poly(&d).unwrap();
        assert_eq!((c.t1, c.sigma, c.t_inv, c.det), (C64::new(4.5, 0.0), C64::new(7.0, 0.0), C64::new(4.5, 0.0), ONE));
        for seed in 0..100 {
            let g = random_su31(seed, 1.0);
            let c = char_poly(&g).unwrap();
            assert!((c.t_inv - c.t1.conj()).norm() < 1e-10);
            assert!(c.sigma.im.abs() < 1e-10);
            assert!(c.cayley_hamilton_residual(g.matrix()) < 1e-9);
            let s = random_sl4(seed);
            assert!(char_poly(&s).unwrap().cayley_hamilton_residual(s.matrix()) < 1e-9);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let e = eigenvalues(&real_diag([2.0, 1.0, 1.0, 0.5])).unwrap();
        let expect = [0.5, 1.0, 1.0, 2.0].map(|x| C64::new(x, 0.0));
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12);
        }
        let e = eigenvalues(&diag([I, ONE, -ONE, I])).unwrap();
        let expect = [-ONE, I, I, ONE];
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12);
        }
        for seed in 0..100 {
            let a = random_sl4(seed).matrix;
            let e = eigenvalues(&a).unwrap();
            let prod = e.iter().fold(ONE, |p, z| p * z);
            let sum: C64 = e.iter().sum();
            assert!((prod - determinant(&a)).norm() < 1e-8);
            assert!((sum - a.trace()).norm() < 1e-8);
        }
        let mut bad = ComplexMatrix4::identity();
        bad[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert_eq!(eigenvalues(&bad), Err(Error::ConvergenceFailure));
    }

    #[test]
    fn polynomial_root_fallback_matches_schur() {
        for seed in 0..30 {
            let a = random_sl4(seed).matrix;
            let roots = sort_eigenvalues(polynomial_roots(CharPolyData::of_matrix(&a).monic_coefficients()).unwrap());
            let eig = eigenvalues(&a).unwrap();
            for (r, e) in roots.iter().zip(eig.iter()) {
                assert!((r - e).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(is_su31(&real_diag([2.0, 1.0, 1.0, 0.5]), 1e-9).is_member);
        assert!(is_su31(&diag([I, ONE, -ONE, I]), 1e-9).is_member);
        let r = is_su31(&real_diag([2.0, 1.0, 1.0, 1.0]), 1e-9);
        assert!(!r.is_member);
        assert!((r.det_residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn su31_basis_is_in_the_algebra() {
        let basis = su31_basis();
        for (i, x) in basis.iter().enumerate() {
            assert!(max_norm(&(x.adjoint() * H + H * x)) < 1e-14);
            assert!(x.trace().norm() < 1e-14);
            for (j, y) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((real_inner(x, y) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_sl4_properties() {
        assert_eq!(random_sl4(7), random_sl4(7));
        assert_ne!(random_sl4(0).matrix, random_sl4(1).matrix);
        for seed in 0..1000 {
            let g = random_sl4(seed);
            assert!((determinant(g.matrix()) - ONE).norm() < 1e-10);
            assert!(max_norm(g.matrix()) < 10.0);
        }
    }

    #[test]
    fn random_su31_properties() {
        assert_eq!(*random_su31(5, 0.0).matrix(), ComplexMatrix4::identity());
        assert_eq!(random_su31(5, 1.0), random_su31(5, 1.0));
        for seed in 0..1000 {
            let g = random_su31(seed, 1.0);
            let r = is_su31(g.matrix(), 1e-9);
            assert!(r.is_member, "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn random_loxodromic_moduli() {
        for seed in 0..100 {
            let g = random_loxodromic(seed, 2.0);
            assert!(is_su31(g.matrix(), 1e-8).is_member);
            let mut moduli: Vec<f64> = eigenvalues(g.matrix()).unwrap().iter().map(|z| z.norm()).collect();
            moduli.sort_by(f64::total_cmp);
            for (m, e) in moduli.iter().zip([0.5, 1.0, 1.0, 2.0]) {
                assert!((m - e).abs() < 1e-8, "seed {seed}: {moduli:?}");
            }
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let g = random_su31(4, 1.0);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"flavor\":\"SU31\""));
        let back: GroupElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back.matrix(), g.matrix());
        let bad = r#"{"rows": [[[2,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],
                     [[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]], "flavor": "SL4"}"#;
        assert!(serde_json::from_str::<GroupElement>(bad).is_err());
    }
}
