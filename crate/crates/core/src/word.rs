//! Reduced words in the free group on `x`, `y` and their evaluation on pairs
//! of matrices.
//!
//! Words print and parse as ASCII over `{x, y, X, Y}` where `X = x⁻¹` and
//! `Y = y⁻¹`, so `"Xyyxy"` is `x⁻¹y²xy`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{checked_inverse, ComplexMatrix4};

/// Largest condition estimate accepted when an inverse letter is evaluated.
pub const DEFAULT_MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
    XInv,
    YInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::X, Letter::Y, Letter::XInv, Letter::YInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
            Letter::Y => Letter::YInv,
            Letter::YInv => Letter::Y,
        }
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, Letter::XInv | Letter::YInv)
    }

    /// Swap `x` and `y`.
    pub fn swap(self) -> Letter {
        match self {
            Letter::X => Letter::Y,
            Letter::Y => Letter::X,
            Letter::XInv => Letter::YInv,
            Letter::YInv => Letter::XInv,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
            Letter::XInv => 'X',
            Letter::YInv => 'Y',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'x' => Some(Letter::X),
            'y' => Some(Letter::Y),
            'X' => Some(Letter::XInv),
            'Y' => Some(Letter::YInv),
            _ => None,
        }
    }
}

/// A freely reduced word. Every constructor reduces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Group inverse: reverse and invert each letter.
    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// The outer automorphism exchanging `x` and `y`.
    pub fn apply_tau(&self) -> Word {
        Word(self.0.iter().map(|l| l.swap()).collect())
    }

    /// The outer automorphism `x ↦ x⁻¹, y ↦ y⁻¹` (letter order kept).
    pub fn apply_iota(&self) -> Word {
        Word::reduce(self.0.iter().map(|l| l.inverse()))
    }

    /// Plain letters weigh 1, inverse letters weigh 3.
    pub fn weighted_length(&self) -> usize {
        self.0.iter().map(|l| if l.is_inverse() { 3 } else { 1 }).sum()
    }

    /// Strip mutually inverse first/last letters. Traces are unchanged.
    pub fn cyclic_reduce(&self) -> Word {
        let mut s = &self.0[..];
        while s.len() >= 2 && s[0] == s[s.len() - 1].inverse() {
            s = &s[1..s.len() - 1];
        }
        Word(s.to_vec())
    }

    /// Rotation by `k` letters to the left.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut v = self.0.clone();
        v.rotate_left(k % self.0.len());
        Word::reduce(v)
    }

    /// Lexicographically least rotation of the cyclic reduction; two words have
    /// identically equal traces on all pairs when their canonical forms agree.
    pub fn cyclic_canonical(&self) -> Word {
        let c = self.cyclic_reduce();
        (0..c.len().max(1)).map(|k| c.rotate(k)).min().unwrap_or_default()
    }

    /// Count of `x`-letters minus `x⁻¹`-letters, and likewise for `y`.
    pub fn exponent_sums(&self) -> (i64, i64) {
        self.0.iter().fold((0, 0), |(a, b), l| match l {
            Letter::X => (a + 1, b),
            Letter::XInv => (a - 1, b),
            Letter::Y => (a, b + 1),
            Letter::YInv => (a, b - 1),
        })
    }

    /// Unicode rendering with exponents, e.g. `x⁻¹y²xy`.
    pub fn pretty(&self) -> String {
        const SUP: [&str; 10] = ["⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"];
        if self.0.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == l {
                run += 1;
            }
            out.push(if matches!(l, Letter::X | Letter::XInv) { 'x' } else { 'y' });
            let exp: String = run.to_string().chars().map(|c| SUP[c.to_digit(10).unwrap() as usize]).collect();
            match (l.is_inverse(), run) {
                (false, 1) => {}
                (false, _) => out.push_str(&exp),
                (true, _) => {
                    out.push('⁻');
                    out.push_str(&exp);
                }
            }
            i += run;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses ASCII `{x, y, X, Y}`; the empty string is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("invalid letter {c:?} in word {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::reduce(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for parsing a word literal known to be valid.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

/// Evaluation context for one pair `(A, B)`; inverses are computed lazily and
/// cached.
#[derive(Debug, Clone)]
pub struct Evaluator {
    a: ComplexMatrix4,
    b: ComplexMatrix4,
    a_inv: Option<ComplexMatrix4>,
    b_inv: Option<ComplexMatrix4>,
    max_condition: f64,
}

impl Evaluator {
    pub fn new(a: &ComplexMatrix4, b: &ComplexMatrix4) -> Self {
        Self::with_max_condition(a, b, DEFAULT_MAX_CONDITION)
    }

    pub fn with_max_condition(a: &ComplexMatrix4, b: &ComplexMatrix4, max_condition: f64) -> Self {
        Self { a: *a, b: *b, a_inv: None, b_inv: None, max_condition }
    }

    /// Context with caller-supplied inverses (e.g. adjugates of unimodular
    /// matrices).
    pub fn with_inverses(a: &ComplexMatrix4, b: &ComplexMatrix4, a_inv: &ComplexMatrix4, b_inv: &ComplexMatrix4) -> Self {
        Self { a: *a, b: *b, a_inv: Some(*a_inv), b_inv: Some(*b_inv), max_condition: DEFAULT_MAX_CONDITION }
    }

    pub fn letter(&mut self, l: Letter) -> Result<ComplexMatrix4> {
        Ok(match l {
            Letter::X => self.a,
            Letter::Y => self.b,
            Letter::XInv => match self.a_inv {
                Some(m) => m,
                None => *self.a_inv.insert(checked_inverse(&self.a, self.max_condition)?),
            },
            Letter::YInv => match self.b_inv {
                Some(m) => m,
                None => *self.b_inv.insert(checked_inverse(&self.b, self.max_condition)?),
            },
        })
    }

    /// Left-to-right product of the letters; the empty word is the identity.
    pub fn eval(&mut self, w: &Word) -> Result<ComplexMatrix4> {
        let mut acc = ComplexMatrix4::identity();
        for &l in w.letters() {
            acc *= self.letter(l)?;
        }
        Ok(acc)
    }

    pub fn trace(&mut self, w: &Word) -> Result<num_complex::Complex64> {
        Ok(self.eval(w)?.trace())
    }
}

/// Substitute `A, B, A⁻¹, B⁻¹` for `x, y, x⁻¹, y⁻¹` and multiply left to right.
pub fn evaluate(w: &Word, a: &ComplexMatrix4, b: &ComplexMatrix4) -> Result<ComplexMatrix4> {
    Evaluator::new(a, b).eval(w)
}
