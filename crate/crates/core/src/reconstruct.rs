//! Conjugacy from coordinates: fingerprint comparison, explicit conjugators
//! for irreducible and reducible pairs, and least-squares fitting of a pair
//! to a target trace vector.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classify::{irreducibility, reduced_invariants, ReducedCase, Verdict};
use crate::coords::{compute, traces_of, Catalog, TraceVector};
use crate::error::{Error, Result};
use crate::matrix::{
    adjugate, checked_inverse, determinant, expm, max_norm, seeded_rng, sl4_basis, su31_basis, ComplexMatrix4, Flavor,
    GroupElement, C64, H, I, MEMBERSHIP_TOL, ZERO,
};

/// Default coordinate tolerance for [`conjugacy_test`].
pub const CONJUGACY_TOL: f64 = 1e-9;

/// Singular values below this fraction of the largest span the intertwiner
/// kernel.
pub const KERNEL_TOL: f64 = 1e-8;

/// Max conjugation residual accepted for a returned conjugator.
pub const CONJUGATOR_RESIDUAL_TOL: f64 = 1e-7;

/// Tolerance for equality of reduced invariants.
pub const REDUCED_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjugacyVerdict {
    Conjugate,
    NotConjugate,
    /// Coordinates agree but a pair failed the irreducibility screen, so the
    /// orbit may not be closed.
    CoordinatesEqualUnverified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyCertificate {
    pub conjugate: bool,
    pub verdict: ConjugacyVerdict,
    pub conjugator: Option<GroupElement>,
    /// Max-norm distance of the trace vectors, or of the reduced invariants
    /// for [`reduced_conjugacy_test`].
    pub coordinate_distance: f64,
    pub kernel_dimension: Option<usize>,
    /// `max(‖MAM⁻¹ − A′‖, ‖MBM⁻¹ − B′‖)` when a conjugator is present.
    pub conjugation_residual: Option<f64>,
    pub catalog: Option<Catalog>,
    pub tolerance: f64,
}

/// Compare catalog coordinates. Equal coordinates certify conjugacy only
/// when both pairs are irreducible.
pub fn conjugacy_test(
    a: &GroupElement,
    b: &GroupElement,
    a2: &GroupElement,
    b2: &GroupElement,
    catalog: Catalog,
    tol: f64,
) -> Result<ConjugacyCertificate> {
    let p = compute(catalog, a, b)?;
    let q = compute(catalog, a2, b2)?;
    let distance = p.distance(&q);
    let verdict = if distance >= tol {
        ConjugacyVerdict::NotConjugate
    } else if irreducibility(a, b).verdict == Verdict::Irreducible && irreducibility(a2, b2).verdict == Verdict::Irreducible {
        ConjugacyVerdict::Conjugate
    } else {
        ConjugacyVerdict::CoordinatesEqualUnverified
    };
    Ok(ConjugacyCertificate {
        conjugate: verdict == ConjugacyVerdict::Conjugate,
        verdict,
        conjugator: None,
        coordinate_distance: distance,
        kernel_dimension: None,
        conjugation_residual: None,
        catalog: Some(catalog),
        tolerance: tol,
    })
}

/// The 32×16 system `MA − A′M = 0`, `MB − B′M = 0` on column-major `vec M`.
fn intertwiner_system(a: &ComplexMatrix4, b: &ComplexMatrix4, a2: &ComplexMatrix4, b2: &ComplexMatrix4) -> DMatrix<C64> {
    let mut sys = DMatrix::from_element(32, 16, ZERO);
    for (block, (x, x2)) in [(a, a2), (b, b2)].into_iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let row = 16 * block + i + 4 * j;
                for k in 0..4 {
                    // (MX)_ij = Σ_k M_ik X_kj
                    sys[(row, i + 4 * k)] += x[(k, j)];
                    // (X′M)_ij = Σ_k X′_ik M_kj
                    sys[(row, k + 4 * j)] -= x2[(i, k)];
                }
            }
        }
    }
    sys
}

/// Orthonormal basis of the intertwiner space, as matrices.
pub fn intertwiner_kernel(
    a: &ComplexMatrix4,
    b: &ComplexMatrix4,
    a2: &ComplexMatrix4,
    b2: &ComplexMatrix4,
) -> Vec<ComplexMatrix4> {
    let svd = intertwiner_system(a, b, a2, b2).svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    (0..16)
        .filter(|&k| svd.singular_values[k] <= KERNEL_TOL * smax.max(1.0))
        .map(|k| ComplexMatrix4::from_fn(|i, j| v_t[(k, i + 4 * j)].conj()))
        .collect()
}

fn conjugation_residual(m: &ComplexMatrix4, pairs: [(&ComplexMatrix4, &ComplexMatrix4); 2]) -> f64 {
    let m_inv = adjugate(m);
    pairs.iter().map(|(x, x2)| max_norm(&(m * *x * m_inv - *x2))).fold(0.0, f64::max)
}

/// Divide by the principal fourth root of the determinant.
fn unimodular(m: &ComplexMatrix4) -> Option<ComplexMatrix4> {
    let det = determinant(m);
    let scale = m.norm().powi(4);
    (det.norm() > 1e-10 * scale && det.is_finite()).then(|| m / det.powf(0.25))
}

fn conjugator_element(m: ComplexMatrix4, su31: bool) -> GroupElement {
    let scale = max_norm(&m).max(1.0);
    let tol = MEMBERSHIP_TOL * scale.powi(4);
    if su31 {
        if let Ok(g) = GroupElement::with_tolerance(m, Flavor::Su31, tol) {
            return g;
        }
    }
    GroupElement::with_tolerance(m, Flavor::Sl4, tol).expect("determinant normalized to 1")
}

/// Solve for `M` with `MAM⁻¹ = A′`, `MBM⁻¹ = B′`, `det M = 1`.
///
/// For an irreducible `(A, B)` the intertwiners form a line when the pairs
/// are conjugate; `M` is unique up to the center `{±1, ±i}`.
pub fn find_conjugator(
    a: &GroupElement,
    b: &GroupElement,
    a2: &GroupElement,
    b2: &GroupElement,
) -> Result<ConjugacyCertificate> {
    let report = irreducibility(a, b);
    if report.verdict != Verdict::Irreducible {
        return Err(Error::NotIrreducible { span_dimension: report.span_dimension });
    }
    let kernel = intertwiner_kernel(a.matrix(), b.matrix(), a2.matrix(), b2.matrix());
    let dim = kernel.len();
    if dim != 1 {
        return Err(Error::NoConjugator(format!("intertwiner space has dimension {dim}")));
    }
    let m = unimodular(&kernel[0]).ok_or_else(|| Error::NoConjugator("intertwiner is singular".into()))?;
    let residual = conjugation_residual(&m, [(a.matrix(), a2.matrix()), (b.matrix(), b2.matrix())]);
    if residual >= CONJUGATOR_RESIDUAL_TOL {
        return Err(Error::NoConjugator(format!("conjugation residual {residual:.3e}")));
    }
    let su31 = [a, b, a2, b2].iter().all(|g| g.is_su31());
    let distance = if su31 {
        compute(Catalog::Su3122, a, b)?.distance(&compute(Catalog::Su3122, a2, b2)?)
    } else {
        compute(Catalog::Sl4Djokovic30, a, b)?.distance(&compute(Catalog::Sl4Djokovic30, a2, b2)?)
    };
    Ok(ConjugacyCertificate {
        conjugate: true,
        verdict: ConjugacyVerdict::Conjugate,
        conjugator: Some(conjugator_element(m, su31)),
        coordinate_distance: distance,
        kernel_dimension: Some(dim),
        conjugation_residual: Some(residual),
        catalog: Some(if su31 { Catalog::Su3122 } else { Catalog::Sl4Djokovic30 }),
        tolerance: CONJUGATOR_RESIDUAL_TOL,
    })
}

/// Denman–Beavers iteration for `S^{-1/2}`; needs no eigenvalues of `S` on
/// the closed negative real axis.
fn inverse_sqrt(s: &ComplexMatrix4) -> Option<ComplexMatrix4> {
    let mut y = *s;
    let mut z = ComplexMatrix4::identity();
    for _ in 0..100 {
        let y_inv = checked_inverse(&y, 1e12).ok()?;
        let z_inv = checked_inverse(&z, 1e12).ok()?;
        let y_next = (y + z_inv) * C64::new(0.5, 0.0);
        let z_next = (z + y_inv) * C64::new(0.5, 0.0);
        let step = max_norm(&(z_next - z));
        y = y_next;
        z = z_next;
        if step < 1e-15 * max_norm(&z).max(1.0) {
            return Some(z);
        }
    }
    None
}

/// An invertible intertwiner `M` of SU(3,1) pairs can be rescaled on each
/// block to preserve the form: `S = H M*HM` commutes with both generators and
/// `M S^{-1/2}` is an isometry when `S` is positive.
fn to_isometry(m: &ComplexMatrix4) -> Option<ComplexMatrix4> {
    let s = H * m.adjoint() * H * m;
    let r = inverse_sqrt(&s)?;
    let iso = m * r;
    let form = iso.adjoint() * H * iso - H;
    (max_norm(&form) < 1e-8).then_some(iso)
}

/// Compare the reduced invariants of two reducible loxodromic pairs and, if
/// they agree, find a block-respecting conjugator by sampling random
/// invertible elements of the intertwiner space.
pub fn reduced_conjugacy_test(
    a: &GroupElement,
    b: &GroupElement,
    a2: &GroupElement,
    b2: &GroupElement,
) -> Result<ConjugacyCertificate> {
    let case = match irreducibility(a, b).verdict {
        Verdict::ReducibleLine => ReducedCase::Line,
        Verdict::ReduciblePlane => ReducedCase::Plane,
        v => {
            return Err(Error::CaseMismatch {
                expected: "ReducibleLine or ReduciblePlane".into(),
                found: format!("{v:?}"),
            })
        }
    };
    let p = reduced_invariants(a, b, case)?;
    let q = reduced_invariants(a2, b2, case)?;
    let distance = p.distance(&q);
    let mut cert = ConjugacyCertificate {
        conjugate: false,
        verdict: ConjugacyVerdict::NotConjugate,
        conjugator: None,
        coordinate_distance: distance,
        kernel_dimension: None,
        conjugation_residual: None,
        catalog: None,
        tolerance: REDUCED_TOL,
    };
    if distance >= REDUCED_TOL {
        return Ok(cert);
    }
    let kernel = intertwiner_kernel(a.matrix(), b.matrix(), a2.matrix(), b2.matrix());
    cert.kernel_dimension = Some(kernel.len());
    let pairs = [(a.matrix(), a2.matrix()), (b.matrix(), b2.matrix())];
    let mut rng = seeded_rng(0x1e7e, 10);
    for _ in 0..16 {
        if kernel.is_empty() {
            break;
        }
        let m = kernel.iter().fold(ComplexMatrix4::zeros(), |acc, k| {
            acc + k * C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let Some(m) = unimodular(&m) else { continue };
        let m = to_isometry(&m).and_then(|iso| unimodular(&iso)).unwrap_or(m);
        let residual = conjugation_residual(&m, pairs);
        if residual < CONJUGATOR_RESIDUAL_TOL {
            cert.conjugate = true;
            cert.verdict = ConjugacyVerdict::Conjugate;
            cert.conjugator = Some(conjugator_element(m, true));
            cert.conjugation_residual = Some(residual);
            return Ok(cert);
        }
    }
    cert.verdict = ConjugacyVerdict::CoordinatesEqualUnverified;
    Ok(cert)
}

// ---------------------------------------------------------------------------
// Least-squares reconstruction

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tol: f64,
    pub fd_step: f64,
    pub initial_damping: f64,
    pub damping_factor: f64,
    /// Standard deviation of the random starting point in algebra
    /// coordinates.
    pub init_scale: f64,
    #[serde(skip)]
    pub initial_guess: Option<(GroupElement, GroupElement)>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 32,
            max_iterations: 200,
            tol: 1e-6,
            fd_step: 1e-6,
            initial_damping: 1e-3,
            damping_factor: 10.0,
            init_scale: 1.0,
            initial_guess: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub pair: (GroupElement, GroupElement),
    /// Max-norm mismatch between the pair's coordinates and the target.
    pub residual: f64,
    /// Iterations of the start that produced `pair`.
    pub iterations: usize,
    pub restarts_used: usize,
    /// Index of the start that produced `pair`; the initial guess is start 0.
    pub best_start: usize,
    pub converged: bool,
    /// Sum of squared residuals after each accepted step of the best start.
    pub cost_history: Vec<f64>,
    pub config: FitConfig,
}

/// Directions of the exponential parameterization: real coefficients on the
/// su(3,1) basis, or real and imaginary coefficients on the sl(4) basis.
fn directions(flavor: Flavor) -> Vec<ComplexMatrix4> {
    match flavor {
        Flavor::Su31 => su31_basis().to_vec(),
        Flavor::Sl4 => sl4_basis().iter().flat_map(|e| [*e, e * I]).collect(),
    }
}

struct Problem<'a> {
    target: &'a TraceVector,
    dirs: Vec<ComplexMatrix4>,
}

impl Problem<'_> {
    fn residuals(&self, a: &ComplexMatrix4, b: &ComplexMatrix4) -> Option<DVector<f64>> {
        let t = traces_of(self.target.catalog.words(), a, b);
        let n = t.len();
        let mut r = DVector::zeros(2 * n);
        for (i, (z, w)) in t.iter().zip(&self.target.values).enumerate() {
            let d = z - w;
            r[i] = d.re;
            r[n + i] = d.im;
        }
        r.iter().all(|x| x.is_finite()).then_some(r)
    }

    fn max_mismatch(r: &DVector<f64>) -> f64 {
        let n = r.len() / 2;
        (0..n).map(|i| r[i].hypot(r[n + i])).fold(0.0, f64::max)
    }

    fn n_params(&self) -> usize {
        2 * self.dirs.len()
    }

    /// `(A·exp(X), B·exp(Y))` for the parameter vector `p = (X, Y)`.
    fn step(&self, a: &ComplexMatrix4, b: &ComplexMatrix4, p: &DVector<f64>) -> (ComplexMatrix4, ComplexMatrix4) {
        let k = self.dirs.len();
        let gen = |offset: usize| {
            self.dirs.iter().enumerate().fold(ComplexMatrix4::zeros(), |acc, (i, d)| acc + d * C64::new(p[offset + i], 0.0))
        };
        (a * expm(&gen(0)), b * expm(&gen(k)))
    }

    fn jacobian(&self, a: &ComplexMatrix4, b: &ComplexMatrix4, r0: &DVector<f64>, h: f64) -> Option<DMatrix<f64>> {
        let k = self.dirs.len();
        let mut jac = DMatrix::zeros(r0.len(), 2 * k);
        for (i, d) in self.dirs.iter().enumerate() {
            let e = expm(&(d * C64::new(h, 0.0)));
            let ra = self.residuals(&(a * e), b)?;
            let rb = self.residuals(a, &(b * e))?;
            jac.set_column(i, &((ra - r0) / h));
            jac.set_column(k + i, &((rb - r0) / h));
        }
        Some(jac)
    }
}

struct StartOutcome {
    a: ComplexMatrix4,
    b: ComplexMatrix4,
    residual: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn run_start(problem: &Problem, mut a: ComplexMatrix4, mut b: ComplexMatrix4, config: &FitConfig) -> StartOutcome {
    let Some(mut r) = problem.residuals(&a, &b) else {
        return StartOutcome { a, b, residual: f64::INFINITY, iterations: 0, history: Vec::new() };
    };
    let mut cost = r.norm_squared();
    let mut history = vec![cost];
    let mut damping = config.initial_damping;
    let mut iterations = 0;
    while iterations < config.max_iterations && Problem::max_mismatch(&r) >= config.tol && damping < 1e12 {
        iterations += 1;
        let Some(jac) = problem.jacobian(&a, &b, &r, config.fd_step) else { break };
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut accepted = false;
        // retry with growing damping inside one iteration
        while damping < 1e12 {
            let lhs = &jtj + DMatrix::identity(problem.n_params(), problem.n_params()) * damping;
            let Some(chol) = lhs.cholesky() else {
                damping *= config.damping_factor;
                continue;
            };
            let delta = -chol.solve(&g);
            let (a_new, b_new) = problem.step(&a, &b, &delta);
            match problem.residuals(&a_new, &b_new) {
                Some(r_new) if r_new.norm_squared() < cost => {
                    a = a_new;
                    b = b_new;
                    cost = r_new.norm_squared();
                    r = r_new;
                    history.push(cost);
                    damping = (damping / config.damping_factor).max(1e-15);
                    accepted = true;
                    break;
                }
                _ => damping *= config.damping_factor,
            }
        }
        if !accepted {
            break;
        }
    }
    StartOutcome { a, b, residual: Problem::max_mismatch(&r), iterations, history }
}

fn random_start(flavor: Flavor, rng: &mut ChaCha8Rng, scale: f64) -> ComplexMatrix4 {
    let x = directions(flavor)
        .iter()
        .fold(ComplexMatrix4::zeros(), |acc, d| acc + d * C64::new(scale * rng.sample::<f64, _>(StandardNormal), 0.0));
    expm(&x)
}

fn fitted_element(m: ComplexMatrix4, flavor: Flavor) -> GroupElement {
    let tol = MEMBERSHIP_TOL * max_norm(&m).max(1.0).powi(4);
    GroupElement::with_tolerance(m, flavor, tol)
        .or_else(|_| GroupElement::with_tolerance(m, Flavor::Sl4, f64::INFINITY))
        .expect("infinite tolerance accepts any matrix")
}

/// Damped least squares on `(A₀·exp X, B₀·exp Y)`, re-centered after every
/// accepted step, with sequential seeded restarts until one converges.
///
/// Never fails: an unsuccessful search returns the best pair found with
/// `converged = false`.
pub fn fit_pair(target: &TraceVector, config: &FitConfig) -> FitResult {
    let flavor = if target.catalog.requires_su31() { Flavor::Su31 } else { Flavor::Sl4 };
    let problem = Problem { target, dirs: directions(flavor) };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(11);
    let mut best: Option<(StartOutcome, usize)> = None;
    let mut starts = 0;
    let total = config.restarts.max(1) + usize::from(config.initial_guess.is_some());
    for index in 0..total {
        let (a0, b0) = match (&config.initial_guess, index) {
            (Some((a, b)), 0) => (*a.matrix(), *b.matrix()),
            _ => (random_start(flavor, &mut rng, config.init_scale), random_start(flavor, &mut rng, config.init_scale)),
        };
        let outcome = run_start(&problem, a0, b0, config);
        starts += 1;
        let done = outcome.residual < config.tol;
        if best.as_ref().is_none_or(|(o, _)| outcome.residual < o.residual) {
            best = Some((outcome, index));
        }
        if done {
            break;
        }
    }
    let (outcome, best_start) = best.expect("at least one start");
    FitResult {
        pair: (fitted_element(outcome.a, flavor), fitted_element(outcome.b, flavor)),
        residual: outcome.residual,
        iterations: outcome.iterations,
        restarts_used: starts,
        best_start,
        converged: outcome.residual < config.tol,
        cost_history: outcome.history,
        config: FitConfig { initial_guess: None, ..config.clone() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::random_reducible_pair;
    use crate::matrix::{diag, random_sl4, random_su31, real_diag, ONE};

    fn su31_pair(seed: u64) -> (GroupElement, GroupElement) {
        (random_su31(2 * seed, 1.0), random_su31(2 * seed + 1, 1.0))
    }

    #[test]
    fn intertwiner_system_matches_direct_products() {
        let (a, b) = (random_sl4(1), random_sl4(2));
        let (a2, b2) = (random_sl4(3), random_sl4(4));
        let m = *random_sl4(5).matrix();
        let sys = intertwiner_system(a.matrix(), b.matrix(), a2.matrix(), b2.matrix());
        let v = DVector::from_iterator(16, (0..16).map(|k| m[(k % 4, k / 4)]));
        let out = sys * v;
        let da = m * a.matrix() - a2.matrix() * m;
        let db = m * b.matrix() - b2.matrix() * m;
        for k in 0..16 {
            assert!((out[k] - da[(k % 4, k / 4)]).norm() < 1e-12);
            assert!((out[16 + k] - db[(k % 4, k / 4)]).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_pairs_are_certified() {
        for seed in 0..20 {
            let (a, b) = su31_pair(seed);
            let g = random_su31(seed + 500, 0.5);
            let (a2, b2) = (a.conjugate_by(&g), b.conjugate_by(&g));
            let cert = conjugacy_test(&a, &b, &a2, &b2, Catalog::Su3122, CONJUGACY_TOL).unwrap();
            assert!(cert.conjugate && cert.coordinate_distance < 1e-9, "seed {seed}");
            let back = conjugacy_test(&a2, &b2, &a, &b, Catalog::Su3122, CONJUGACY_TOL).unwrap();
            assert_eq!(back.conjugate, cert.conjugate);
            assert!((back.coordinate_distance - cert.coordinate_distance).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_pair_is_unverified() {
        let id = GroupElement::identity(Flavor::Su31);
        let cert = conjugacy_test(&id, &id, &id, &id, Catalog::Su3122, CONJUGACY_TOL).unwrap();
        assert!(!cert.conjugate);
        assert_eq!(cert.verdict, ConjugacyVerdict::CoordinatesEqualUnverified);
        assert_eq!(cert.coordinate_distance, 0.0);
    }

    #[test]
    fn sl4_pair_rejected_by_su31_catalog() {
        let (a, b) = (random_sl4(0), random_sl4(1));
        let r = conjugacy_test(&a, &b, &a, &b, Catalog::Su3122, CONJUGACY_TOL);
        assert!(matches!(r, Err(Error::FlavorMismatch(_))));
    }

    #[test]
    fn find_conjugator_trivial_and_constructed() {
        let (a, b) = su31_pair(3);
        let cert = find_conjugator(&a, &b, &a, &b).unwrap();
        assert_eq!(cert.kernel_dimension, Some(1));
        let m = *cert.conjugator.unwrap().matrix();
        // a central element: m = c·I with c⁴ = 1
        let c = m[(0, 0)];
        assert!(max_norm(&(m - ComplexMatrix4::identity() * c)) < 1e-9);
        assert!((c.powi(4) - ONE).norm() < 1e-9);

        for seed in 0..20 {
            let (a, b) = su31_pair(seed);
            let g = random_su31(seed + 900, 0.5);
            let (a2, b2) = (a.conjugate_by(&g), b.conjugate_by(&g));
            let cert = find_conjugator(&a, &b, &a2, &b2).unwrap();
            let m = cert.conjugator.as_ref().unwrap();
            assert!(m.is_su31());
            assert!(cert.conjugation_residual.unwrap() < 1e-8);
            assert!((determinant(m.matrix()) - ONE).norm() < 1e-9);
            let ratio = m.matrix() * g.inverse().matrix();
            let c = ratio[(0, 0)];
            assert!(max_norm(&(ratio - ComplexMatrix4::identity() * c)) < 1e-7, "seed {seed}");
        }
    }

    #[test]
    fn find_conjugator_sl4() {
        for seed in 0..20 {
            let (a, b) = (random_sl4(3 * seed), random_sl4(3 * seed + 1));
            let g = random_sl4(3 * seed + 2);
            let (a2, b2) = (a.conjugate_by(&g), b.conjugate_by(&g));
            let cert = find_conjugator(&a, &b, &a2, &b2).unwrap();
            assert_eq!(cert.kernel_dimension, Some(1));
            assert!(cert.conjugation_residual.unwrap() < 1e-7);
        }
    }

    #[test]
    fn perturbed_pair_has_no_conjugator() {
        let (a, b) = su31_pair(8);
        let mut rng = seeded_rng(8, 99);
        let x = crate::matrix::random_su31_algebra(&mut rng, 1.0);
        let x = x / C64::new(x.norm(), 0.0) * C64::new(1e-2, 0.0);
        let b2 = GroupElement::su31(b.matrix() * expm(&x)).unwrap();
        assert!(matches!(find_conjugator(&a, &b, &a, &b2), Err(Error::NoConjugator(_))));
        let cert = conjugacy_test(&a, &b, &a, &b2, Catalog::Su3122, CONJUGACY_TOL).unwrap();
        assert!(!cert.conjugate && cert.coordinate_distance > 1e-4);
    }

    #[test]
    fn reducible_pair_has_no_irreducible_conjugator() {
        let (a, b) = random_reducible_pair(0, ReducedCase::Line);
        assert!(matches!(find_conjugator(&a, &b, &a, &b), Err(Error::NotIrreducible { span_dimension: 8 })));
    }

    #[test]
    fn reduced_conjugacy_of_constructed_pairs() {
        for case in [ReducedCase::Line, ReducedCase::Plane] {
            for seed in 0..20 {
                let (a, b) = random_reducible_pair(seed, case);
                let g = random_su31(seed + 300, 0.5);
                let (a2, b2) = (a.conjugate_by(&g), b.conjugate_by(&g));
                let cert = reduced_conjugacy_test(&a, &b, &a2, &b2).unwrap();
                assert!(cert.conjugate, "{case:?} seed {seed}: {cert:?}");
                assert!(cert.conjugation_residual.unwrap() < 1e-7);
                assert_eq!(cert.kernel_dimension, Some(2));
                assert!(cert.conjugator.as_ref().unwrap().is_su31());
            }
        }
    }

    #[test]
    fn reduced_conjugacy_distinct_phases() {
        let a = GroupElement::su31(real_diag([2.0, 1.0, 1.0, 0.5])).unwrap();
        let b = |phi: f64| {
            let u = C64::from_polar(1.0, phi);
            GroupElement::su31(diag([C64::new(3.0, 0.0), u, u.conj(), C64::new(1.0 / 3.0, 0.0)])).unwrap()
        };
        let cert = reduced_conjugacy_test(&a, &b(0.7), &a, &b(1.3)).unwrap();
        assert!(!cert.conjugate && cert.coordinate_distance > 1e-6);
        let (p, q) = random_reducible_pair(1, ReducedCase::Line);
        let (r, s) = random_reducible_pair(1, ReducedCase::Plane);
        assert!(matches!(reduced_conjugacy_test(&p, &q, &r, &s), Err(Error::CaseMismatch { .. })));
        let (x, y) = su31_pair(0);
        assert!(matches!(reduced_conjugacy_test(&x, &y, &x, &y), Err(Error::CaseMismatch { .. })));
    }

    #[test]
    fn fit_from_optimum_takes_no_steps() {
        let (a, b) = su31_pair(4);
        let target = compute(Catalog::Su3122, &a, &b).unwrap();
        let config = FitConfig { initial_guess: Some((a, b)), ..Default::default() };
        let fit = fit_pair(&target, &config);
        assert!(fit.converged && fit.iterations <= 2 && fit.residual < 1e-10);
        assert_eq!(fit.restarts_used, 1);
    }

    #[test]
    fn fit_recovers_su31_target() {
        let (a, b) = (random_su31(40, 0.8), random_su31(41, 0.8));
        let target = compute(Catalog::Su3122, &a, &b).unwrap();
        let fit = fit_pair(&target, &FitConfig { seed: 1, ..Default::default() });
        assert!(fit.converged, "residual {:e}", fit.residual);
        let again = compute(Catalog::Su3122, &fit.pair.0, &fit.pair.1).unwrap();
        assert!(again.distance(&target) < 1e-6);
        assert!(fit.cost_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn fit_identity_orbit() {
        let target = TraceVector::new(Catalog::Su3122, vec![C64::new(4.0, 0.0); 22]).unwrap();
        let fit = fit_pair(&target, &FitConfig { seed: 2, ..Default::default() });
        assert!(fit.converged, "residual {:e}", fit.residual);
        let again = compute(Catalog::Su3122, &fit.pair.0, &fit.pair.1).unwrap();
        assert!(again.values.iter().all(|z| (z - 4.0).norm() < 1e-6));
    }

    #[test]
    fn fit_result_json_round_trip() {
        let (a, b) = su31_pair(4);
        let target = compute(Catalog::Su3122, &a, &b).unwrap();
        let fit = fit_pair(&target, &FitConfig { initial_guess: Some((a, b)), ..Default::default() });
        let s = serde_json::to_string(&fit).unwrap();
        let back: FitResult = serde_json::from_str(&s).unwrap();
        // the membership tolerance is not serialized
        assert_eq!(back.pair.0.matrix(), fit.pair.0.matrix());
        assert_eq!(back.pair.1.matrix(), fit.pair.1.matrix());
        assert_eq!((back.residual, back.iterations, back.converged), (fit.residual, fit.iterations, fit.converged));
        assert_eq!(back.config, fit.config);
    }
}
