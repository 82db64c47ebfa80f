//! Isometry type of SU(3,1) elements, reducibility of pairs, and the reduced
//! invariants of reducible loxodromic pairs.
//!
//! Reducibility uses Burnside's criterion: the pair is irreducible iff the
//! words in `A`, `B` span all 16 dimensions of the 4×4 matrices. When the
//! span is smaller, invariant subspaces are extracted as cyclic subspaces
//! `𝒜v` of eigenvectors `v` of a generic element of the span.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    adjugate, determinant, diag, eigenvalues, expm, max_norm, random_su31_algebra, seeded_rng, sigma, singular_values, ComplexMatrix4,
    Flavor, GroupElement, C64, H, ONE, ZERO,
};

/// Default modulus tolerance for [`classify_isometry`].
pub const ISOMETRY_TOL: f64 = 1e-6;

/// Relative residual below which a new word image counts as already spanned.
pub const SPAN_TOL: f64 = 1e-8;

/// Gram eigenvalues with absolute value below this are null directions.
pub const SIGNATURE_ZERO_TOL: f64 = 1e-8;

/// Max off-block residual accepted from [`block_decompose`].
pub const BLOCK_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsometryType {
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// Thresholds used by [`classify_isometry_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryTolerances {
    /// An eigenvalue cluster with `||μ| − 1| > modulus` is off the unit circle.
    pub modulus: f64,
    /// Eigenvalues closer than this (relative) are treated as one cluster.
    pub cluster_radius: f64,
    /// Singular values of `g − μI` below `rank · max(1, ‖g‖)` are zero.
    pub rank: f64,
    /// Individual eigenvalues farther than this from the unit circle make a
    /// marginal diagonalizability test ambiguous.
    pub unit_circle_noise: f64,
}

impl Default for IsometryTolerances {
    fn default() -> Self {
        Self { modulus: ISOMETRY_TOL, cluster_radius: 1e-4, rank: 1e-7, unit_circle_noise: 1e-9 }
    }
}

struct Cluster {
    mean: C64,
    multiplicity: usize,
}

fn cluster_eigenvalues(ev: &[C64; 4], radius: f64) -> Vec<Cluster> {
    // union-find over 4 points
    let mut parent = [0usize, 1, 2, 3];
    fn root(p: &mut [usize; 4], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if (ev[i] - ev[j]).norm() <= radius * ev[i].norm().max(1.0) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut out: Vec<(usize, Cluster)> = Vec::new();
    for i in 0..4 {
        let r = root(&mut parent, i);
        match out.iter_mut().find(|(k, _)| *k == r) {
            Some((_, c)) => {
                c.mean += ev[i];
                c.multiplicity += 1;
            }
            None => out.push((r, Cluster { mean: ev[i], multiplicity: 1 })),
        }
    }
    out.into_iter()
        .map(|(_, mut c)| {
            c.mean /= c.multiplicity as f64;
            c
        })
        .collect()
}

fn to_dmatrix(m: &ComplexMatrix4) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

fn spectral_norm(m: &ComplexMatrix4) -> f64 {
    singular_values(to_dmatrix(m))[0]
}

pub fn classify_isometry(g: &GroupElement, tol: f64) -> Result<IsometryType> {
    classify_isometry_with(g, &IsometryTolerances { modulus: tol, ..Default::default() })
}

/// Loxodromic iff an eigenvalue cluster lies off the unit circle; otherwise
/// elliptic iff `g` is diagonalizable, else parabolic.
///
/// Cluster means are used for the modulus test since the mean of a cluster
/// of perturbed eigenvalues is far more accurate than its members.
pub fn classify_isometry_with(g: &GroupElement, tol: &IsometryTolerances) -> Result<IsometryType> {
    if !g.is_su31() {
        return Err(Error::FlavorMismatch("isometry classification requires an SU(3,1) element".into()));
    }
    let m = g.matrix();
    let ev = eigenvalues(m)?;
    let clusters = cluster_eigenvalues(&ev, tol.cluster_radius);
    if clusters.iter().any(|c| (c.mean.norm() - 1.0).abs() > tol.modulus) {
        return Ok(IsometryType::Loxodromic);
    }
    let scale = spectral_norm(m).max(1.0);
    let zero = tol.rank * scale;
    let marginal_upper = 10.0 * tol.cluster_radius * scale;
    let mut diagonalizable = true;
    let mut marginal = false;
    for c in clusters.iter().filter(|c| c.multiplicity > 1) {
        let shifted = m - ComplexMatrix4::identity() * c.mean;
        let mut s = singular_values(to_dmatrix(&shifted));
        s.reverse();
        let critical = s[c.multiplicity - 1];
        if critical > zero {
            diagonalizable = false;
            if critical <= marginal_upper {
                marginal = true;
            }
        }
    }
    let near_boundary = ev.iter().any(|z| (z.norm() - 1.0).abs() > tol.unit_circle_noise);
    if marginal && near_boundary {
        return Err(Error::ToleranceAmbiguous(format!(
            "eigenvalue moduli {:?} are within tolerance of the unit circle and the diagonalizability test is marginal",
            ev.map(|z| z.norm())
        )));
    }
    Ok(if diagonalizable { IsometryType::Elliptic } else { IsometryType::Parabolic })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Irreducible,
    ReducibleLine,
    ReduciblePlane,
    ReducibleOther,
}

/// Signature `(positive, negative)` of the Hermitian form restricted to a
/// subspace, plus the number of null directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub null: usize,
}

impl Signature {
    pub fn pair(&self) -> (usize, usize) {
        (self.positive, self.negative)
    }

    pub fn is_degenerate(&self) -> bool {
        self.null > 0
    }
}

/// A subspace of ℂ⁴ stored as Euclidean-orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub basis: Vec<[C64; 4]>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(4, self.basis.len(), |i, j| self.basis[j][i])
    }

    /// Orthonormal basis of the column span of `m`.
    fn from_span(m: &DMatrix<C64>, rel_tol: f64) -> Subspace {
        if m.ncols() == 0 {
            return Subspace { basis: Vec::new() };
        }
        let svd = m.clone().svd(true, false);
        let u = svd.u.expect("requested U");
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let basis = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > rel_tol * smax.max(f64::MIN_POSITIVE))
            .map(|k| std::array::from_fn(|i| u[(i, k)]))
            .collect();
        Subspace { basis }
    }

    fn sum(&self, other: &Subspace) -> Subspace {
        let cols: Vec<[C64; 4]> = self.basis.iter().chain(&other.basis).copied().collect();
        Subspace::from_span(&DMatrix::from_fn(4, cols.len(), |i, j| cols[j][i]), 1e-8)
    }

    /// `{z : ⟨z, w⟩ = 0 for all w}` with respect to `H`.
    pub fn h_complement(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace { basis: (0..4).map(|k| std::array::from_fn(|i| if i == k { ONE } else { ZERO })).collect() };
        }
        // rows w* H; null space via SVD of the conjugate-transpose system
        let hw = to_dmatrix(&H) * self.matrix();
        let sys = hw.adjoint();
        let full = DMatrix::from_fn(4, 4, |i, j| if i < sys.nrows() { sys[(i, j)] } else { ZERO });
        let svd = full.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        let basis = (0..4)
            .filter(|&k| svd.singular_values[k] <= 1e-10)
            .map(|k| std::array::from_fn(|i| v_t[(k, i)].conj()))
            .collect();
        Subspace { basis }
    }

    pub fn signature(&self) -> Signature {
        let v = self.matrix();
        let gram = v.adjoint() * to_dmatrix(&H) * &v;
        let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(gram).eigenvalues;
        let positive = eig.iter().filter(|&&l| l > SIGNATURE_ZERO_TOL).count();
        let negative = eig.iter().filter(|&&l| l < -SIGNATURE_ZERO_TOL).count();
        Signature { positive, negative, null: eig.len() - positive - negative }
    }

    pub fn is_invariant_under(&self, m: &ComplexMatrix4, tol: f64) -> bool {
        let v = self.matrix();
        let image = to_dmatrix(m) * &v;
        let proj = &v * (v.adjoint() * &image);
        (image - proj).iter().all(|z| z.norm() <= tol * max_norm(m).max(1.0))
    }
}

/// Verdict of the Burnside test plus any invariant subspace found.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducibilityReport {
    pub verdict: Verdict,
    pub span_dimension: usize,
    pub subspace: Option<Subspace>,
    pub signature: Option<Signature>,
}

/// Orthonormal basis (as 4×4 matrices) of the algebra generated by `a`, `b`.
///
/// Starts with `{I, A, B}` and left-multiplies the newest elements by `A` and
/// `B` until a whole round adds nothing or the span is 16-dimensional.
pub fn algebra_span(a: &ComplexMatrix4, b: &ComplexMatrix4) -> Vec<ComplexMatrix4> {
    let mut basis: Vec<ComplexMatrix4> = Vec::with_capacity(16);
    let try_add = |m: &ComplexMatrix4, basis: &mut Vec<ComplexMatrix4>| -> bool {
        let n = m.norm();
        if n == 0.0 || !n.is_finite() {
            return false;
        }
        let mut r = m / C64::new(n, 0.0);
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for q in basis.iter() {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let rn = r.norm();
        if rn > SPAN_TOL {
            basis.push(r / C64::new(rn, 0.0));
            true
        } else {
            false
        }
    };
    let mut frontier: Vec<ComplexMatrix4> = Vec::new();
    for m in [ComplexMatrix4::identity(), *a, *b] {
        if try_add(&m, &mut basis) {
            frontier.push(m);
        }
    }
    while !frontier.is_empty() && basis.len() < 16 {
        let mut next = Vec::new();
        for m in &frontier {
            for g in [a, b] {
                let p = g * m;
                let p = p / C64::new(p.norm().max(f64::MIN_POSITIVE), 0.0);
                if try_add(&p, &mut basis) {
                    next.push(p);
                }
                if basis.len() == 16 {
                    break;
                }
            }
        }
        frontier = next;
    }
    basis
}

/// Proper invariant subspaces of the algebra spanned by `span`: cyclic
/// subspaces of eigenvectors of a generic element, closed under sums.
fn invariant_subspaces(span: &[ComplexMatrix4]) -> Vec<Subspace> {
    let mut rng = seeded_rng(0x5eed, 7);
    let generic = span.iter().fold(ComplexMatrix4::zeros(), |acc, q| {
        acc + q * C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let Ok(ev) = eigenvalues(&generic) else {
        return Vec::new();
    };
    let scale = spectral_norm(&generic).max(f64::MIN_POSITIVE);
    let mut vectors: Vec<[C64; 4]> = Vec::new();
    for lambda in ev {
        let shifted = to_dmatrix(&(generic - ComplexMatrix4::identity() * lambda));
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        for k in 0..4 {
            if svd.singular_values[k] <= 1e-6 * scale {
                vectors.push(std::array::from_fn(|i| v_t[(k, i)].conj()));
            }
        }
    }
    let mut minimal: Vec<Subspace> = Vec::new();
    for v in vectors {
        let images = DMatrix::from_fn(4, span.len(), |i, j| {
            let w = span[j] * nalgebra::Vector4::from(v);
            w[i]
        });
        let s = Subspace::from_span(&images, 1e-8);
        if s.dim() > 0 && s.dim() < 4 && !minimal.iter().any(|t| same_subspace(t, &s)) {
            minimal.push(s);
        }
    }
    let mut all = minimal.clone();
    let k = minimal.len().min(6);
    for mask in 1u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut acc = Subspace { basis: Vec::new() };
        for (i, s) in minimal.iter().enumerate().take(k) {
            if mask & (1 << i) != 0 {
                acc = acc.sum(s);
            }
        }
        if acc.dim() < 4 && !all.iter().any(|t| same_subspace(t, &acc)) {
            all.push(acc);
        }
    }
    all.sort_by_key(Subspace::dim);
    all
}

fn same_subspace(a: &Subspace, b: &Subspace) -> bool {
    a.dim() == b.dim() && a.sum(b).dim() == a.dim()
}

fn both_loxodromic(a: &GroupElement, b: &GroupElement) -> bool {
    [a, b].iter().all(|g| matches!(classify_isometry(g, ISOMETRY_TOL), Ok(IsometryType::Loxodromic)))
}

/// Burnside span dimension and, for reducible pairs, a common invariant
/// subspace. Line/plane verdicts need SU(3,1) inputs with both generators
/// loxodromic and an invariant subspace of signature (1,1) or (2,1).
pub fn irreducibility(a: &GroupElement, b: &GroupElement) -> ReducibilityReport {
    let span = algebra_span(a.matrix(), b.matrix());
    let span_dimension = span.len();
    if span_dimension == 16 {
        return ReducibilityReport { verdict: Verdict::Irreducible, span_dimension, subspace: None, signature: None };
    }
    let subspaces = invariant_subspaces(&span);
    let su31 = a.is_su31() && b.is_su31();
    if !su31 {
        let subspace = subspaces.into_iter().next();
        return ReducibilityReport { verdict: Verdict::ReducibleOther, span_dimension, subspace, signature: None };
    }
    let mut candidates: Vec<(Subspace, Signature)> = Vec::new();
    for s in subspaces {
        let sig = s.signature();
        if !sig.is_degenerate() {
            let c = s.h_complement();
            let csig = c.signature();
            candidates.push((c, csig));
        }
        candidates.push((s, sig));
    }
    if both_loxodromic(a, b) {
        for (want_dim, want_sig, verdict) in [(2, (1, 1), Verdict::ReducibleLine), (3, (2, 1), Verdict::ReduciblePlane)] {
            if let Some((s, sig)) = candidates
                .iter()
                .find(|(s, sig)| s.dim() == want_dim && sig.pair() == want_sig && !sig.is_degenerate())
            {
                return ReducibilityReport { verdict, span_dimension, subspace: Some(s.clone()), signature: Some(*sig) };
            }
        }
    }
    let first = candidates.into_iter().min_by_key(|(s, _)| s.dim());
    ReducibilityReport {
        verdict: Verdict::ReducibleOther,
        span_dimension,
        signature: first.as_ref().map(|(_, sig)| *sig),
        subspace: first.map(|(s, _)| s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReducedCase {
    Line,
    Plane,
}

impl ReducedCase {
    pub fn verdict(self) -> Verdict {
        match self {
            ReducedCase::Line => Verdict::ReducibleLine,
            ReducedCase::Plane => Verdict::ReduciblePlane,
        }
    }
}

/// Line: `tr A, tr B, tr AB, σA, σB, σ(AB)`.
/// Plane: `tr A, tr B, tr AB, tr(A⁻¹B), tr[A,B], σA, σB`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedInvariants {
    pub case: ReducedCase,
    pub values: Vec<C64>,
}

impl ReducedInvariants {
    pub fn distance(&self, other: &ReducedInvariants) -> f64 {
        if self.case != other.case {
            return f64::INFINITY;
        }
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// The invariant values without any hypothesis checks.
pub fn reduced_invariant_values(a: &ComplexMatrix4, b: &ComplexMatrix4, case: ReducedCase) -> Vec<C64> {
    let ab = a * b;
    match case {
        ReducedCase::Line => vec![a.trace(), b.trace(), ab.trace(), sigma(a), sigma(b), sigma(&ab)],
        ReducedCase::Plane => {
            let a_inv = adjugate(a);
            let commutator = ab * a_inv * adjugate(b);
            vec![a.trace(), b.trace(), ab.trace(), (a_inv * b).trace(), commutator.trace(), sigma(a), sigma(b)]
        }
    }
}

pub fn reduced_invariants(a: &GroupElement, b: &GroupElement, case: ReducedCase) -> Result<ReducedInvariants> {
    for (name, g) in [("A", a), ("B", b)] {
        if classify_isometry(g, ISOMETRY_TOL)? != IsometryType::Loxodromic {
            return Err(Error::NotLoxodromic(name));
        }
    }
    let report = irreducibility(a, b);
    if report.verdict != case.verdict() {
        return Err(Error::CaseMismatch { expected: format!("{:?}", case.verdict()), found: format!("{:?}", report.verdict) });
    }
    Ok(ReducedInvariants { case, values: reduced_invariant_values(a.matrix(), b.matrix(), case) })
}

/// Change of basis `k` (with `k*Hk = H`, `det k = 1`) and the block-diagonal
/// pair `k⁻¹Ak`, `k⁻¹Bk`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub case: ReducedCase,
    pub k: GroupElement,
    pub a_block: ComplexMatrix4,
    pub b_block: ComplexMatrix4,
    pub off_block_residual: f64,
}

/// Coordinates of the first block: `{e₁, e₄}` for a line, `{e₁, e₂, e₄}` for
/// a plane.
pub fn block_coordinates(case: ReducedCase) -> &'static [usize] {
    match case {
        ReducedCase::Line => &[0, 3],
        ReducedCase::Plane => &[0, 1, 3],
    }
}

pub fn off_block_residual(m: &ComplexMatrix4, case: ReducedCase) -> f64 {
    let first = block_coordinates(case);
    let mut r = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if first.contains(&i) != first.contains(&j) {
                r = r.max(m[(i, j)].norm());
            }
        }
    }
    r
}

/// Vectors `u` of `s` with `⟨u_i, u_j⟩ = ±δ_ij`, positive ones first.
fn h_orthonormalize(s: &Subspace) -> Result<(Vec<[C64; 4]>, Vec<[C64; 4]>)> {
    let v = s.matrix();
    let gram = v.adjoint() * to_dmatrix(&H) * &v;
    let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(gram);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() <= SIGNATURE_ZERO_TOL {
            return Err(Error::DecompositionFailed("invariant subspace is degenerate for the form".into()));
        }
        let col: DVector<C64> = &v * eig.eigenvectors.column(k) / C64::new(l.abs().sqrt(), 0.0);
        let u: [C64; 4] = std::array::from_fn(|i| col[i]);
        if l > 0.0 {
            pos.push(u);
        } else {
            neg.push(u);
        }
    }
    Ok((pos, neg))
}

pub fn block_decompose(a: &GroupElement, b: &GroupElement, report: &ReducibilityReport) -> Result<BlockDecomposition> {
    let case = match report.verdict {
        Verdict::ReducibleLine => ReducedCase::Line,
        Verdict::ReduciblePlane => ReducedCase::Plane,
        v => return Err(Error::DecompositionFailed(format!("verdict {v:?} has no block form"))),
    };
    let w = report.subspace.as_ref().ok_or_else(|| Error::DecompositionFailed("report carries no subspace".into()))?;
    let (w_pos, w_neg) = h_orthonormalize(w)?;
    let (c_pos, c_neg) = h_orthonormalize(&w.h_complement())?;
    let expected = match case {
        ReducedCase::Line => (1, 1, 2, 0),
        ReducedCase::Plane => (2, 1, 1, 0),
    };
    if (w_pos.len(), w_neg.len(), c_pos.len(), c_neg.len()) != expected {
        return Err(Error::DecompositionFailed("subspace signature does not match the case".into()));
    }
    let s2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let p = w_pos[0];
    let n = w_neg[0];
    // null vectors f1, f4 with ⟨f1, f4⟩ = 1
    let f1: [C64; 4] = std::array::from_fn(|i| (p[i] + n[i]) * s2);
    let f4: [C64; 4] = std::array::from_fn(|i| (p[i] - n[i]) * s2);
    let (f2, f3) = match case {
        ReducedCase::Line => (c_pos[0], c_pos[1]),
        ReducedCase::Plane => (w_pos[1], c_pos[0]),
    };
    let mut k = ComplexMatrix4::from_fn(|i, j| [f1, f2, f3, f4][j][i]);
    // fix the determinant with a phase on the positive column f2
    let det = determinant(&k);
    let phase = C64::from_polar(1.0, -det.arg());
    for i in 0..4 {
        k[(i, 1)] *= phase;
    }
    let k = GroupElement::new(k, Flavor::Su31)
        .map_err(|e| Error::DecompositionFailed(format!("change of basis left SU(3,1): {e}")))?;
    let k_inv = k.inverse();
    let a_block = k_inv.matrix() * a.matrix() * k.matrix();
    let b_block = k_inv.matrix() * b.matrix() * k.matrix();
    let scale = max_norm(a.matrix()).max(max_norm(b.matrix())).max(1.0);
    let off_block = off_block_residual(&a_block, case).max(off_block_residual(&b_block, case));
    if off_block > BLOCK_RESIDUAL_TOL * scale {
        return Err(Error::DecompositionFailed(format!("off-block residual {off_block:.3e}")));
    }
    Ok(BlockDecomposition { case, k, a_block, b_block, off_block_residual: off_block })
}

/// Random loxodromic pair preserving the block splitting of `case`.
///
/// Each generator is `k·diag(λ, u, v, 1/λ̄)·k⁻¹` where `k = exp(X)` and `X` is
/// a random su(3,1) element with its off-block entries removed. The moduli
/// `|λ|` are drawn from `[1.5, 3]`.
pub fn random_reducible_pair(seed: u64, case: ReducedCase) -> (GroupElement, GroupElement) {
    let mut rng = seeded_rng(seed, 8);
    let first = block_coordinates(case);
    let mut generator = || {
        let modulus = rng.random_range(1.5..3.0);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let lambda = C64::from_polar(modulus, theta);
        let u = C64::from_polar(1.0, phi);
        let v = C64::from_polar(1.0, -2.0 * theta - phi);
        let d = diag([lambda, u, v, ONE / lambda.conj()]);
        let mut x = random_su31_algebra(&mut rng, 0.7);
        for i in 0..4 {
            for j in 0..4 {
                if first.contains(&i) != first.contains(&j) {
                    x[(i, j)] = ZERO;
                }
            }
        }
        let k = expm(&x);
        GroupElement::su31(k * d * adjugate(&k)).expect("block conjugate of a diagonal element")
    };
    let a = generator();
    let b = generator();
    (a, b)
}

// ---------------------------------------------------------------------------
// Report for the command line

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub span_dimension: usize,
    /// Per-generator isometry type; `None` with a message in
    /// `isometry_errors` when classification failed.
    pub isometry: [Option<IsometryType>; 2],
    pub isometry_errors: [Option<String>; 2],
    pub subspace_basis: Option<Vec<[[f64; 2]; 4]>>,
    pub signature: Option<(usize, usize)>,
    pub degenerate: Option<bool>,
    pub tolerances: IsometryTolerances,
    pub span_tol: f64,
    pub signature_zero_tol: f64,
}

pub fn classify_pair(a: &GroupElement, b: &GroupElement) -> ClassificationReport {
    let tolerances = IsometryTolerances::default();
    let iso = [a, b].map(|g| classify_isometry_with(g, &tolerances));
    let report = irreducibility(a, b);
    ClassificationReport {
        verdict: report.verdict,
        span_dimension: report.span_dimension,
        isometry: [0, 1].map(|i| iso[i].as_ref().ok().copied()),
        isometry_errors: [0, 1].map(|i| iso[i].as_ref().err().map(|e| e.to_string())),
        subspace_basis: report
            .subspace
            .as_ref()
            .map(|s| s.basis.iter().map(|v| v.map(|z| [z.re, z.im])).collect()),
        signature: report.signature.map(|s| s.pair()),
        degenerate: report.signature.map(|s| s.is_degenerate()),
        tolerances,
        span_tol: SPAN_TOL,
        signature_zero_tol: SIGNATURE_ZERO_TOL,
    }
}
