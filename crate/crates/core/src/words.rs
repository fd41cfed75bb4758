//! Free-group words, unoriented conjugacy classes and endomorphisms.
//!
//! Generator `i` is written as the `i`-th lowercase ASCII letter and its
//! inverse as the matching uppercase letter. Canonical forms use the letter
//! order `a < b < … < z < A < B < … < Z`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SurfaceStructure;

/// Largest supported rank; one letter per ASCII lowercase character.
pub const MAX_RANK: usize = 26;

const INV_BIT: u8 = 32;

/// A generator or its inverse.
///
/// The derived ordering puts every generator before every inverse, which is
/// the order canonical class representatives are minimized under.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator < MAX_RANK, "generator index {generator} out of range");
        Letter(generator as u8 | if inverse { INV_BIT } else { 0 })
    }

    pub fn generator(self) -> usize {
        (self.0 & !INV_BIT) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & INV_BIT != 0
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ INV_BIT)
    }

    /// Slot index in `0..2n`: `2g` for generator `g`, `2g + 1` for its inverse.
    pub fn slot(self) -> usize {
        2 * self.generator() + self.is_inverse() as usize
    }

    pub fn from_slot(slot: usize) -> Letter {
        Letter::new(slot / 2, slot % 2 == 1)
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Some(Letter::new(c as usize - 'A' as usize, true)),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

/// Freely reduces a letter sequence, checking every generator index against `rank`.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I, rank: usize) -> Result<Word> {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        if l.generator() >= rank {
            return Err(Error::Input(format!(
                "letter {} outside rank-{rank} alphabet",
                l.to_char()
            )));
        }
        push_reduced(&mut out, l);
    }
    Ok(Word(out))
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Parses an ASCII word over a rank-`rank` alphabet and reduces it.
    pub fn parse(s: &str, rank: usize) -> Result<Word> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            letters.push(
                Letter::from_char(c)
                    .ok_or_else(|| Error::Input(format!("invalid character {c:?} in word {s:?}")))?,
            );
        }
        reduce(letters, rank)
    }

    /// Reduces without a rank check. Letters are always below [`MAX_RANK`].
    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let mut out = Vec::new();
        for l in raw {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn generator(g: usize) -> Word {
        Word(vec![Letter::new(g, false)])
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

    /// Largest generator index plus one (0 for the identity).
    pub fn min_rank(&self) -> usize {
        self.0.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn pow(&self, m: usize) -> Word {
        let mut out = Word::identity();
        for _ in 0..m {
            out = out.mul(self);
        }
        out
    }

    /// Strips the longest `u … u⁻¹` wrapper, returning the cyclically reduced core.
    /// The cyclic rotation starting at position `k` (taken mod the length).
    pub fn rotated(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        Word(rotate(&self.0, k % self.0.len()))
    }

    pub fn cyclic_core(&self) -> &[Letter] {
        let w = &self.0;
        let (mut i, mut j) = (0, w.len());
        while j - i >= 2 && w[i] == w[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        &w[i..j]
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

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Starting index of the lexicographically least rotation (Booth).
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = s[j % n];
        let mut i = f[j - k - 1];
        while i != -1 && sj != s[(k + i as usize + 1) % n] {
            if sj < s[(k + i as usize + 1) % n] {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if sj != s[(k + (i + 1) as usize) % n] {
            // i == -1 here
            if sj < s[k % n] {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k % n
}

fn rotate(s: &[Letter], k: usize) -> Vec<Letter> {
    s[k..].iter().chain(&s[..k]).copied().collect()
}

/// Canonical representative of an unoriented conjugacy class.
///
/// The stored word is cyclically reduced and is the least rotation of either
/// the word or its inverse.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ConjClass(Word);

/// Canonical unoriented class of `w`.
pub fn conj_class(w: &Word) -> Result<ConjClass> {
    ConjClass::new(w)
}

impl ConjClass {
    pub fn new(w: &Word) -> Result<ConjClass> {
        let core = w.cyclic_core();
        if core.is_empty() {
            return Err(Error::TrivialWord);
        }
        let fwd = rotate(core, least_rotation(core));
        let inv: Vec<Letter> = core.iter().rev().map(|l| l.inverse()).collect();
        let bwd = rotate(&inv, least_rotation(&inv));
        Ok(ConjClass(Word(fwd.min(bwd))))
    }

    /// Oriented canonical form: least rotation of the cyclic core, no inversion.
    pub fn oriented(w: &Word) -> Result<Word> {
        let core = w.cyclic_core();
        if core.is_empty() {
            return Err(Error::TrivialWord);
        }
        Ok(Word(rotate(core, least_rotation(core))))
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Returns `(u, m)` with this class equal to the class of `u^m` and `u` primitive.
    pub fn primitive_root(&self) -> (ConjClass, usize) {
        let s = self.0.letters();
        let p = cyclic_period(s);
        // A rotation-minimal word with period p has a rotation-minimal prefix of length p,
        // and the inverse-minimality carries over the same way.
        (ConjClass(Word(s[..p].to_vec())), s.len() / p)
    }

    pub fn is_primitive_power(&self) -> bool {
        cyclic_period(self.0.letters()) == self.0.len()
    }

    pub fn pow(&self, m: usize) -> ConjClass {
        assert!(m >= 1);
        ConjClass(Word(self.0.letters().repeat(m)))
    }
}

/// Smallest `p` dividing `len` such that the word is `len / p` copies of its prefix.
fn cyclic_period(s: &[Letter]) -> usize {
    let n = s.len();
    let mut fail = vec![0usize; n + 1];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    let p = n - fail[n];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

impl From<ConjClass> for String {
    fn from(c: ConjClass) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for ConjClass {
    type Error = Error;
    fn try_from(s: String) -> Result<ConjClass> {
        ConjClass::new(&Word::parse(&s, MAX_RANK)?)
    }
}

/// Endomorphism of a free group given by the images of its generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub images: Vec<Word>,
    pub label: String,
}

impl Automorphism {
    pub fn new(images: Vec<Word>, label: impl Into<String>) -> Automorphism {
        Automorphism {
            images,
            label: label.into(),
        }
    }

    pub fn identity(rank: usize) -> Automorphism {
        Automorphism::new((0..rank).map(Word::generator).collect(), "id")
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len() * 2);
        for &l in w.letters() {
            let img = &self.images[l.generator()];
            if l.is_inverse() {
                for &m in img.letters().iter().rev() {
                    push_reduced(&mut out, m.inverse());
                }
            } else {
                for &m in img.letters() {
                    push_reduced(&mut out, m);
                }
            }
        }
        Word(out)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism::new(
            other.images.iter().map(|w| self.apply(w)).collect(),
            format!("{}∘{}", self.label, other.label),
        )
    }

    /// Surjectivity test: the images must fold to the full bouquet. For a
    /// finite-rank free group this is equivalent to bijectivity.
    pub fn is_automorphism(&self) -> bool {
        let n = self.rank();
        match crate::graphs::fold(n, &self.images) {
            Ok(g) => g.vertex_count() == 1 && g.edge_count() == n,
            Err(_) => false,
        }
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.label)?;
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}↦{}", Letter::new(i, false).to_char(), w)?;
        }
        write!(f, ")")
    }
}

/// Decides whether `c` is the class of `p^m` for a peripheral word `p` of the
/// surface, returning `m` if so.
pub fn is_peripheral(c: &ConjClass, s: &SurfaceStructure) -> Option<usize> {
    peripheral_power(c, s.peripheral_classes())
}

pub(crate) fn peripheral_power(c: &ConjClass, peripherals: &[ConjClass]) -> Option<usize> {
    for p in peripherals {
        if p.is_empty() || !c.len().is_multiple_of(p.len()) {
            continue;
        }
        let m = c.len() / p.len();
        if *c == p.pow(m) {
            return Some(m);
        }
    }
    None
}
