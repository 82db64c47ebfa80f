//! Trace-coordinate catalogs and the identities relating their entries.
//!
//! Three catalogs are provided, each a frozen ordered list of words:
//!
//! * [`Catalog::Sl4Djokovic30`]: the parameter system of 15 words up to word
//!   length 6 (with `tr(x⁴)`, `tr(y⁴)` removed) followed by the 15 further
//!   generators of lengths 5 to 10. Minimal generating set of the SL(4,ℂ)
//!   character variety of the rank 2 free group.
//! * [`Catalog::Sl4Symmetric30`]: an equivalent minimal system using inverse
//!   letters; apart from its last entry `x⁻¹y⁻¹x²y²` it is closed under
//!   exchanging `x` and `y`.
//! * [`Catalog::Su3122`]: 22 traces that determine polystable SU(3,1) pairs.
//!
//! Orders are part of the file format.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{adjugate, expm, singular_values, sigma, su31_basis, sl4_basis, ComplexMatrix4, GroupElement, C64};
use crate::word::{Evaluator, Word};

/// Default max-norm tolerance for comparing trace vectors.
pub const TRACE_VECTOR_TOL: f64 = 1e-8;

/// Default finite-difference step for [`jacobian_rank`].
pub const JACOBIAN_STEP: f64 = 1e-5;

/// Singular values below this fraction of `max(σ_max, 1)` count as zero.
pub const JACOBIAN_RANK_THRESHOLD: f64 = 1e-6;

const DJOKOVIC_30: [&str; 30] = [
    // parameter system, word lengths 1, 2, 3, 4, 6
    "x", "y", //
    "xx", "xy", "yy", //
    "xxx", "xxy", "xyy", "yyy", //
    "xxxy", "xxyy", "xyyy", "xyxy", //
    "xxyxxy", "yyxyyx", //
    // remaining generators, word lengths 5 to 10
    "xxxyy", "yyyxx", //
    "xxyyxy", "yyxxyx", //
    "xxxyyxy", "yyyxxyx", //
    "xxxyyxxy", "yyyxxyyx", "xxxyyyxy", "yyyxxxyx", //
    "xxxyxxyxy", "xxyyxyxxy", "yyxxyxyyx", "yyyxyyxyx", //
    "xxxyyyxxyy",
];

/// Symmetric table, weighted lengths 1 to 9.
const SYMMETRIC_HALF: [&str; 16] = [
    "x", //
    "xx", "xy", //
    "X", "xYY", //
    "Xy", "xxyy", "xyxy", //
    "Xyy", //
    "xxyxxy", "xxyyxy", //
    "Xyyxy", //
    "Xyyxxy", "XYxy", //
    "Xyxxyxy", "xxyyxyxxy",
];

const SYMMETRIC_EXTRA: &str = "XYxxyy";

const SU31_22: [&str; 22] = [
    "x", "y", //
    "xx", "xy", "yy", "Xy", //
    "xyy", "yxx", //
    "xxyy", "xyxy", "XYxy", //
    "Xyyxy", "Yxxyx", //
    "xxyxxy", "yyxyyx", "xxyyxy", "XYxxyy", "yyxxyx", "Xyyxxy", "Yxxyyx", //
    "Xyxxyxy", "Yxyyxyx",
];

/// Words whose trace is eliminated from the symmetric system on SU(3,1) via
/// `tr(w⁻¹) = conj tr(w)`.
pub const ELIMINATED_WORDS: [&str; 6] = ["X", "Y", "Xyy", "Yxx", "Yx", "YXyx"];

/// The five words `w` whose pair `(tr w, tr w²)` carries a real relation.
pub const SIGMA_WORDS: [&str; 5] = ["x", "y", "xy", "xxy", "yyx"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Catalog {
    Sl4Djokovic30,
    Sl4Symmetric30,
    Su3122,
}

impl Catalog {
    pub const ALL: [Catalog; 3] = [Catalog::Sl4Djokovic30, Catalog::Sl4Symmetric30, Catalog::Su3122];

    pub fn name(self) -> &'static str {
        match self {
            Catalog::Sl4Djokovic30 => "SL4_DJOKOVIC_30",
            Catalog::Sl4Symmetric30 => "SL4_SYMMETRIC_30",
            Catalog::Su3122 => "SU31_22",
        }
    }

    pub fn len(self) -> usize {
        self.words().len()
    }

    /// Whether evaluation requires both generators to lie in SU(3,1).
    pub fn requires_su31(self) -> bool {
        self == Catalog::Su3122
    }

    pub fn words(self) -> &'static [Word] {
        static DJ: OnceLock<Vec<Word>> = OnceLock::new();
        static SYM: OnceLock<Vec<Word>> = OnceLock::new();
        static SU: OnceLock<Vec<Word>> = OnceLock::new();
        match self {
            Catalog::Sl4Djokovic30 => DJ.get_or_init(|| checked(self, parse_all(&DJOKOVIC_30))),
            Catalog::Sl4Symmetric30 => SYM.get_or_init(|| checked(self, symmetric_catalog())),
            Catalog::Su3122 => SU.get_or_init(|| checked(self, parse_all(&SU31_22))),
        }
    }

    /// Position of the entry whose trace agrees identically with `tr(w)`.
    pub fn index_of(self, w: &Word) -> Option<usize> {
        let c = w.cyclic_canonical();
        self.words().iter().position(|e| e.cyclic_canonical() == c)
    }
}

fn parse_all(words: &[&str]) -> Vec<Word> {
    words.iter().map(|s| s.parse().expect("catalog literal")).collect()
}

/// The symmetric table, then its image under `x ↔ y` with words already
/// present up to cyclic rotation skipped, then `x⁻¹y⁻¹x²y²`.
fn symmetric_catalog() -> Vec<Word> {
    let half = parse_all(&SYMMETRIC_HALF);
    let mut out = half.clone();
    for w in half.iter().map(Word::apply_tau) {
        let c = w.cyclic_canonical();
        if !out.iter().any(|e| e.cyclic_canonical() == c) {
            out.push(w);
        }
    }
    out.push(SYMMETRIC_EXTRA.parse().expect("catalog literal"));
    out
}

fn expected_len(catalog: Catalog) -> usize {
    match catalog {
        Catalog::Sl4Djokovic30 | Catalog::Sl4Symmetric30 => 30,
        Catalog::Su3122 => 22,
    }
}

fn checked(catalog: Catalog, words: Vec<Word>) -> Vec<Word> {
    assert_eq!(words.len(), expected_len(catalog), "{} has the wrong length", catalog.name());
    let mut classes: Vec<Word> = words.iter().map(Word::cyclic_canonical).collect();
    classes.sort();
    classes.dedup();
    assert_eq!(classes.len(), words.len(), "{} has cyclically equal entries", catalog.name());
    words
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Catalog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Catalog::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown catalog {s:?}")))
    }
}

impl Serialize for Catalog {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Catalog {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Catalog values for one pair, in catalog order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceVector {
    pub catalog: Catalog,
    pub values: Vec<C64>,
}

impl TraceVector {
    pub fn new(catalog: Catalog, values: Vec<C64>) -> Result<Self> {
        if values.len() != catalog.len() {
            return Err(Error::InvalidInput(format!(
                "{} expects {} values, got {}",
                catalog.name(),
                catalog.len(),
                values.len()
            )));
        }
        Ok(Self { catalog, values })
    }

    /// Max-norm distance; vectors from different catalogs are infinitely far.
    pub fn distance(&self, other: &TraceVector) -> f64 {
        if self.catalog != other.catalog {
            return f64::INFINITY;
        }
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &TraceVector, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn get(&self, w: &Word) -> Option<C64> {
        self.catalog.index_of(w).map(|i| self.values[i])
    }
}

#[derive(Serialize, Deserialize)]
struct TraceVectorJson {
    catalog: Catalog,
    values: Vec<[f64; 2]>,
}

impl Serialize for TraceVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TraceVectorJson { catalog: self.catalog, values: self.values.iter().map(|z| [z.re, z.im]).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TraceVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TraceVectorJson::deserialize(d)?;
        TraceVector::new(j.catalog, j.values.iter().map(|v| C64::new(v[0], v[1])).collect())
            .map_err(serde::de::Error::custom)
    }
}

pub(crate) fn unimodular_evaluator(a: &GroupElement, b: &GroupElement) -> Evaluator {
    Evaluator::with_inverses(a.matrix(), b.matrix(), &adjugate(a.matrix()), &adjugate(b.matrix()))
}

fn require_su31(a: &GroupElement, b: &GroupElement, what: &str) -> Result<()> {
    if a.is_su31() && b.is_su31() {
        Ok(())
    } else {
        Err(Error::FlavorMismatch(format!("{what} requires both generators in SU(3,1)")))
    }
}

/// Traces of the given words at unimodular matrices.
pub fn traces_of(words: &[Word], a: &ComplexMatrix4, b: &ComplexMatrix4) -> Vec<C64> {
    let mut ev = Evaluator::with_inverses(a, b, &adjugate(a), &adjugate(b));
    words.iter().map(|w| ev.trace(w).expect("inverses supplied")).collect()
}

/// `values[i] = tr(evaluate(words[i], A, B))`.
pub fn compute(catalog: Catalog, a: &GroupElement, b: &GroupElement) -> Result<TraceVector> {
    if catalog.requires_su31() {
        require_su31(a, b, catalog.name())?;
    }
    Ok(TraceVector { catalog, values: traces_of(catalog.words(), a.matrix(), b.matrix()) })
}

/// Real coordinates: Re and Im of every SU(3,1) catalog value except the
/// imaginary parts of `tr(w²)` for the five `σ`-words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealCoordinateVector {
    pub slots: Vec<String>,
    pub values: Vec<f64>,
}

/// The `w²` words whose imaginary parts are dropped, in catalog terms.
pub fn dropped_square_words() -> Vec<Word> {
    SIGMA_WORDS.iter().map(|s| s.parse::<Word>().expect("literal")).map(|w| w.concat(&w)).collect()
}

fn real_slot_layout() -> &'static [(usize, bool)] {
    static LAYOUT: OnceLock<Vec<(usize, bool)>> = OnceLock::new();
    LAYOUT.get_or_init(|| {
        let dropped: Vec<usize> = dropped_square_words()
            .iter()
            .map(|w| Catalog::Su3122.index_of(w).expect("square word in catalog"))
            .collect();
        let mut out = Vec::with_capacity(39);
        for i in 0..Catalog::Su3122.len() {
            out.push((i, false));
            if !dropped.contains(&i) {
                out.push((i, true));
            }
        }
        out
    })
}

impl RealCoordinateVector {
    pub const LEN: usize = 39;

    /// Slot names `re(w)` / `im(w)` with `w` the ASCII catalog word.
    pub fn slot_names() -> Vec<String> {
        let words = Catalog::Su3122.words();
        real_slot_layout()
            .iter()
            .map(|&(i, imag)| format!("{}({})", if imag { "im" } else { "re" }, words[i]))
            .collect()
    }

    pub fn from_trace_vector(tv: &TraceVector) -> Result<Self> {
        if tv.catalog != Catalog::Su3122 {
            return Err(Error::FlavorMismatch(format!("real coordinates need SU31_22, got {}", tv.catalog)));
        }
        let values = real_slot_layout()
            .iter()
            .map(|&(i, imag)| if imag { tv.values[i].im } else { tv.values[i].re })
            .collect();
        Ok(Self { slots: Self::slot_names(), values })
    }

    fn slot(&self, name: &str) -> Option<f64> {
        self.slots.iter().position(|s| s == name).map(|i| self.values[i])
    }

    /// Rebuild the full SU(3,1) catalog vector, restoring each dropped
    /// `Im tr(w²)` as `Im(tr(w)²)` (σ(w) is real).
    pub fn to_trace_vector(&self) -> Result<TraceVector> {
        let words = Catalog::Su3122.words();
        let mut values = vec![C64::new(0.0, 0.0); words.len()];
        for (i, w) in words.iter().enumerate() {
            let re = self.slot(&format!("re({w})")).ok_or_else(|| Error::Parse(format!("missing slot re({w})")))?;
            values[i].re = re;
            if let Some(im) = self.slot(&format!("im({w})")) {
                values[i].im = im;
            }
        }
        for (base, square) in SIGMA_WORDS.iter().zip(dropped_square_words()) {
            let bi = Catalog::Su3122.index_of(&base.parse()?).expect("σ-word in catalog");
            let si = Catalog::Su3122.index_of(&square).expect("square in catalog");
            values[si].im = (values[bi] * values[bi]).im;
        }
        TraceVector::new(Catalog::Su3122, values)
    }
}

pub fn real_coords(a: &GroupElement, b: &GroupElement) -> Result<RealCoordinateVector> {
    RealCoordinateVector::from_trace_vector(&compute(Catalog::Su3122, a, b)?)
}

/// `tr(x⁻¹) = ⅓(tr(x³) + ½tr(x)³ − (3/2)tr(x)tr(x²))` for unimodular `x`.
pub fn recover_tr_x_inverse(t1: C64, t2: C64, t3: C64) -> C64 {
    (t3 + t1 * t1 * t1 * 0.5 - t1 * t2 * 1.5) / 3.0
}

/// `|LHS − RHS|` of
/// `−tr(ux⁻¹v) = tr(ux³v) − tr(x)tr(ux²v) + σ(x)tr(uxv) − tr(x⁻¹)tr(uv)`.
pub fn verify_sublemma(u: &Word, v: &Word, a: &GroupElement, b: &GroupElement) -> f64 {
    let mut ev = unimodular_evaluator(a, b);
    let mut t = |s: &str| {
        let mid: Word = s.parse().expect("literal");
        ev.trace(&u.concat(&mid).concat(v)).expect("inverses supplied")
    };
    let lhs = -t("X");
    let rhs = t("xxx") - a.matrix().trace() * t("xx") + sigma(a.matrix()) * t("x") - adjugate(a.matrix()).trace() * t("");
    (lhs - rhs).norm()
}

/// `tr(xy²) = tr(y)tr(xy) − σ(y)tr(x) + tr(y⁻¹)tr(xy⁻¹) − tr(xy⁻²)`.
pub fn recover_tr_xy2(a: &GroupElement, b: &GroupElement) -> C64 {
    recover_tr_xy2_with(a, b, false)
}

/// [`recover_tr_xy2`] with an optional sign flip on the `σ(y)` term, used to
/// check that the fuzz harness detects a broken identity.
#[doc(hidden)]
pub fn recover_tr_xy2_with(a: &GroupElement, b: &GroupElement, flip_sign: bool) -> C64 {
    let mut ev = unimodular_evaluator(a, b);
    let mut t = |s: &str| ev.trace(&s.parse().expect("literal")).expect("inverses supplied");
    let sigma_term = sigma(b.matrix()) * t("x");
    let sigma_term = if flip_sign { -sigma_term } else { sigma_term };
    t("y") * t("xy") - sigma_term + t("Y") * t("xY") - t("xYY")
}

/// Right-hand side of the elimination formula for `tr((y²x)²xyx)`, expressed
/// through catalog traces and complex conjugates (valid on SU(3,1) only):
///
/// `t(y²x)t(y²x²yx) − ½(t(y²x)² − t((y²x)²))t(x²y) + conj t(y²x)·t(xy⁻¹) − conj t(x⁻¹y²xy)`.
pub fn recover_long_word(a: &GroupElement, b: &GroupElement) -> Result<C64> {
    require_su31(a, b, "the long-word recovery")?;
    Ok(long_word_rhs(a.matrix(), b.matrix()))
}

/// The long word `(y²x)²xyx` whose trace [`recover_long_word`] recovers.
pub const LONG_WORD: &str = "yyxyyxxyx";

fn long_word_rhs(a: &ComplexMatrix4, b: &ComplexMatrix4) -> C64 {
    let mut ev = Evaluator::with_inverses(a, b, &adjugate(a), &adjugate(b));
    let mut t = |s: &str| ev.trace(&s.parse().expect("literal")).expect("inverses supplied");
    let v = t("yyx");
    v * t("yyxxyx") - (v * v - t("yyxyyx")) * 0.5 * t("xxy") + v.conj() * t("xY") - t("Xyyxy").conj()
}

/// Residuals `|tr(e) − conj tr(e⁻¹)|` for the six eliminated words `e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminatedReport {
    pub words: Vec<Word>,
    pub partners: Vec<Word>,
    pub residuals: Vec<f64>,
}

impl EliminatedReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// The raw residuals, computed for any unimodular pair.
pub fn eliminated_trace_residuals(a: &GroupElement, b: &GroupElement) -> EliminatedReport {
    let words: Vec<Word> = parse_all(&ELIMINATED_WORDS);
    let partners: Vec<Word> = words.iter().map(Word::invert).collect();
    let mut ev = unimodular_evaluator(a, b);
    let residuals = words
        .iter()
        .zip(&partners)
        .map(|(e, p)| {
            let te = ev.trace(e).expect("inverses supplied");
            let tp = ev.trace(p).expect("inverses supplied");
            (te - tp.conj()).norm()
        })
        .collect();
    EliminatedReport { words, partners, residuals }
}

pub fn verify_eliminated_traces(a: &GroupElement, b: &GroupElement) -> Result<EliminatedReport> {
    require_su31(a, b, "trace elimination")?;
    Ok(eliminated_trace_residuals(a, b))
}

/// Perturbation directions used by [`jacobian_rank`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationSpace {
    /// 15 complex traceless directions per generator; rank counted over ℂ.
    ComplexTraceless,
    /// 15 real su(3,1) directions per generator; rank counted over ℝ.
    Su31Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub step: f64,
    pub threshold: f64,
    pub space: PerturbationSpace,
}

/// Central-difference Jacobian of `(A e^{tE}, B)`, `(A, B e^{tE})` ↦ traces.
///
/// Rows are words, columns directions. For [`PerturbationSpace::Su31Real`]
/// the real and imaginary parts are stacked as separate real rows.
pub fn finite_difference_jacobian(
    words: &[Word],
    a: &ComplexMatrix4,
    b: &ComplexMatrix4,
    space: PerturbationSpace,
    h: f64,
) -> DMatrix<C64> {
    let basis: &[ComplexMatrix4; 15] = match space {
        PerturbationSpace::ComplexTraceless => sl4_basis(),
        PerturbationSpace::Su31Real => su31_basis(),
    };
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(30);
    for generator in 0..2 {
        for e in basis {
            let plus = expm(&(e * C64::new(h, 0.0)));
            let minus = expm(&(e * C64::new(-h, 0.0)));
            let (ap, bp, am, bm) = if generator == 0 {
                (a * plus, *b, a * minus, *b)
            } else {
                (*a, b * plus, *a, b * minus)
            };
            let fp = traces_of(words, &ap, &bp);
            let fm = traces_of(words, &am, &bm);
            columns.push(fp.iter().zip(&fm).map(|(p, m)| (p - m) / (2.0 * h)).collect());
        }
    }
    let n = words.len();
    match space {
        PerturbationSpace::ComplexTraceless => DMatrix::from_fn(n, 30, |i, j| columns[j][i]),
        PerturbationSpace::Su31Real => DMatrix::from_fn(2 * n, 30, |i, j| {
            let z = columns[j][i / 2];
            C64::new(if i % 2 == 0 { z.re } else { z.im }, 0.0)
        }),
    }
}

/// Numerical rank of the trace map restricted to `words`.
pub fn jacobian_rank_words(
    words: &[Word],
    a: &GroupElement,
    b: &GroupElement,
    space: PerturbationSpace,
    h: f64,
) -> JacobianReport {
    assert!(h > 0.0, "finite-difference step must be positive");
    let jac = finite_difference_jacobian(words, a.matrix(), b.matrix(), space, h);
    let singular_values = singular_values(jac);
    let threshold = JACOBIAN_RANK_THRESHOLD * singular_values.first().copied().unwrap_or(0.0).max(1.0);
    let rank = singular_values.iter().filter(|&&s| s > threshold).count();
    JacobianReport { rank, singular_values, step: h, threshold, space }
}

pub fn jacobian_rank(a: &GroupElement, b: &GroupElement, catalog: Catalog, h: f64) -> JacobianReport {
    let space = if catalog.requires_su31() { PerturbationSpace::Su31Real } else { PerturbationSpace::ComplexTraceless };
    jacobian_rank_words(catalog.words(), a, b, space, h)
}

/// The 15 parameter words (the first half of [`Catalog::Sl4Djokovic30`]).
pub fn parameter_words() -> &'static [Word] {
    &Catalog::Sl4Djokovic30.words()[..15]
}
