//! Marked hyperbolic structures given by holonomy matrices.
//!
//! A surface of genus `g` with `r ≥ 1` cusps has free fundamental group of
//! rank `n = 2g + r − 1`. The structure records one `SL(2, ℝ)` matrix per
//! generator, the peripheral (cusp) words, and the cyclic order of darts at
//! the base vertex that thickens the bouquet of circles into the surface.
//!
//! Integer surfaces are evaluated exactly: products run in checked `i64`
//! arithmetic and switch to `BigInt` on overflow.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::CoreGraph;
use crate::ribbon::{boundary_cycles, DartType, RibbonOrder};
use crate::words::{conj_class, Automorphism, ConjClass, Letter, Word, MAX_RANK};

/// Tolerance for parabolicity and determinant checks on non-integer surfaces.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub const BUILTIN_NAME: &str = "modular-torus";

type IntMat = [[i64; 2]; 2];
type BigMat = [[BigInt; 2]; 2];
type FloatMat = [[f64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub enum Holonomy {
    Integer(Vec<IntMat>),
    Float(Vec<FloatMat>),
}

/// Trace of a holonomy matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Trace {
    Exact(BigInt),
    Approx(f64),
}

impl Trace {
    pub fn to_f64(&self) -> f64 {
        match self {
            Trace::Exact(t) => t.to_f64().unwrap_or(f64::INFINITY),
            Trace::Approx(t) => *t,
        }
    }

    /// `ln |trace|`, finite even when the trace exceeds the float range.
    pub fn ln_abs(&self) -> f64 {
        match self {
            Trace::Exact(t) => {
                let bits = t.bits();
                if bits < 1000 {
                    t.abs().to_f64().unwrap().ln()
                } else {
                    let shift = bits - 64;
                    let top: BigInt = t.abs() >> shift;
                    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
                }
            }
            Trace::Approx(t) => t.abs().ln(),
        }
    }

    pub fn is_parabolic(&self) -> bool {
        match self {
            Trace::Exact(t) => t.abs() == BigInt::from(2),
            Trace::Approx(t) => (t.abs() - 2.0).abs() <= FLOAT_TOLERANCE,
        }
    }

    fn below_two(&self) -> bool {
        match self {
            Trace::Exact(t) => t.abs() < BigInt::from(2),
            Trace::Approx(t) => t.abs() < 2.0 - FLOAT_TOLERANCE,
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trace::Exact(t) => write!(f, "{t}"),
            Trace::Approx(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HolonomyClass {
    Hyperbolic,
    Parabolic,
}

/// On-disk surface description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceConfig {
    pub name: String,
    pub genus: usize,
    pub cusps: usize,
    pub ribbon_order: Vec<String>,
    pub peripherals: Vec<String>,
    pub matrices: BTreeMap<String, Vec<Vec<serde_json::Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcg_generators: Option<Vec<GeneratorConfig>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub label: String,
    pub images: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SurfaceStructure {
    pub name: String,
    pub genus: usize,
    pub cusps: usize,
    pub rank: usize,
    pub holonomy: Holonomy,
    pub peripherals: Vec<Word>,
    peripheral_classes: Vec<ConjClass>,
    pub ribbon: RibbonOrder,
    /// Mapping-class generators supplied by the config (the built-in surface has its own).
    pub mcg_generators: Option<Vec<Automorphism>>,
    pub builtin: bool,
    /// Problems found while reading the config that prevent full validation.
    load_errors: Vec<String>,
}

impl SurfaceStructure {
    /// Once-punctured torus with the integer holonomy `a ↦ [[1,1],[1,2]]`, `b ↦ [[1,−1],[−1,2]]`.
    pub fn modular_torus() -> SurfaceStructure {
        let peripheral = Word::parse("abAB", 2).unwrap();
        SurfaceStructure {
            name: BUILTIN_NAME.to_string(),
            genus: 1,
            cusps: 1,
            rank: 2,
            holonomy: Holonomy::Integer(vec![[[1, 1], [1, 2]], [[1, -1], [-1, 2]]]),
            peripheral_classes: vec![conj_class(&peripheral).unwrap()],
            peripherals: vec![peripheral],
            ribbon: RibbonOrder::standard(2),
            mcg_generators: None,
            builtin: true,
            load_errors: Vec::new(),
        }
    }

    /// Builds a structure from a config without validating it.
    pub fn from_config(cfg: &SurfaceConfig) -> SurfaceStructure {
        let mut errs = Vec::new();
        let rank = (2 * cfg.genus + cfg.cusps).saturating_sub(1);
        if rank == 0 || rank > MAX_RANK {
            errs.push(format!("rank: 2g + r − 1 = {rank} must lie in 1..={MAX_RANK}"));
        }
        let rank = rank.clamp(1, MAX_RANK);

        let mut ints: Vec<IntMat> = Vec::new();
        let mut floats: Vec<FloatMat> = Vec::new();
        let mut all_int = true;
        for g in 0..rank {
            let key = Letter::new(g, false).to_char().to_string();
            let Some(rows) = cfg.matrices.get(&key) else {
                errs.push(format!("matrices.{key}: missing"));
                ints.push([[1, 0], [0, 1]]);
                floats.push([[1.0, 0.0], [0.0, 1.0]]);
                continue;
            };
            if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                errs.push(format!("matrices.{key}: expected a 2×2 array"));
                ints.push([[1, 0], [0, 1]]);
                floats.push([[1.0, 0.0], [0.0, 1.0]]);
                continue;
            }
            let mut im = [[0i64; 2]; 2];
            let mut fm = [[0f64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let x = &rows[i][j];
                    match x.as_i64() {
                        Some(v) => im[i][j] = v,
                        None => all_int = false,
                    }
                    fm[i][j] = x.as_f64().unwrap_or(f64::NAN);
                }
            }
            ints.push(im);
            floats.push(fm);
        }
        for key in cfg.matrices.keys() {
            let ok = key.len() == 1
                && Letter::from_char(key.chars().next().unwrap())
                    .is_some_and(|l| !l.is_inverse() && l.generator() < rank);
            if !ok {
                errs.push(format!("matrices.{key}: not a generator of the rank-{rank} alphabet"));
            }
        }
        let holonomy = if all_int {
            Holonomy::Integer(ints)
        } else {
            Holonomy::Float(floats)
        };

        let mut peripherals = Vec::new();
        let mut peripheral_classes = Vec::new();
        for (i, p) in cfg.peripherals.iter().enumerate() {
            match Word::parse(p, rank).and_then(|w| conj_class(&w).map(|c| (w, c))) {
                Ok((w, c)) => {
                    peripherals.push(w);
                    peripheral_classes.push(c);
                }
                Err(e) => errs.push(format!("peripherals[{i}]: {e}")),
            }
        }

        let mut darts = Vec::new();
        for (i, d) in cfg.ribbon_order.iter().enumerate() {
            match DartType::parse(d) {
                Some(t) => darts.push(t),
                None => errs.push(format!("ribbon_order[{i}]: cannot parse {d:?}")),
            }
        }

        let mcg_generators = cfg.mcg_generators.as_ref().map(|gens| {
            gens.iter()
                .enumerate()
                .filter_map(|(i, g)| {
                    let images: Result<Vec<Word>> =
                        g.images.iter().map(|w| Word::parse(w, rank)).collect();
                    match images {
                        Ok(im) if im.len() == rank => Some(Automorphism::new(im, g.label.clone())),
                        Ok(_) => {
                            errs.push(format!("mcg_generators[{i}]: expected {rank} images"));
                            None
                        }
                        Err(e) => {
                            errs.push(format!("mcg_generators[{i}]: {e}"));
                            None
                        }
                    }
                })
                .collect()
        });

        SurfaceStructure {
            name: cfg.name.clone(),
            genus: cfg.genus,
            cusps: cfg.cusps,
            rank,
            holonomy,
            peripherals,
            peripheral_classes,
            ribbon: RibbonOrder::new(darts),
            mcg_generators,
            builtin: false,
            load_errors: errs,
        }
    }

    /// Reads and validates a JSON surface config.
    pub fn load(path: &Path) -> Result<SurfaceStructure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let cfg: SurfaceConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let s = SurfaceStructure::from_config(&cfg);
        validate(&s)?;
        Ok(s)
    }

    pub fn to_config(&self) -> SurfaceConfig {
        let mut matrices = BTreeMap::new();
        for g in 0..self.rank {
            let key = Letter::new(g, false).to_char().to_string();
            let rows = match &self.holonomy {
                Holonomy::Integer(m) => m[g]
                    .iter()
                    .map(|r| r.iter().map(|&x| serde_json::Number::from(x)).collect())
                    .collect(),
                Holonomy::Float(m) => m[g]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|&x| serde_json::Number::from_f64(x).unwrap())
                            .collect()
                    })
                    .collect(),
            };
            matrices.insert(key, rows);
        }
        SurfaceConfig {
            name: self.name.clone(),
            genus: self.genus,
            cusps: self.cusps,
            ribbon_order: self.ribbon.darts().iter().map(|d| d.to_string()).collect(),
            peripherals: self.peripherals.iter().map(|w| w.to_string()).collect(),
            matrices,
            mcg_generators: self.mcg_generators.as_ref().map(|gens| {
                gens.iter()
                    .map(|a| GeneratorConfig {
                        label: a.label.clone(),
                        images: a.images.iter().map(|w| w.to_string()).collect(),
                    })
                    .collect()
            }),
        }
    }

    pub fn peripheral_classes(&self) -> &[ConjClass] {
        &self.peripheral_classes
    }

    /// Growth exponent `6g − 6 + 2r` of orbit counts.
    pub fn counting_exponent(&self) -> i64 {
        6 * self.genus as i64 - 6 + 2 * self.cusps as i64
    }

    /// All violations of the structure invariants, each prefixed by its field path.
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.load_errors.clone();
        let n = self.rank;
        if self.cusps == 0 {
            v.push("cusps: at least one cusp is required".into());
        }
        if self.genus == 0 && self.cusps == 3 {
            v.push("genus/cusps: the thrice-punctured sphere has finite mapping class group".into());
        }
        if self.genus == 0 && self.cusps < 3 {
            v.push("genus/cusps: surface is not hyperbolic".into());
        }

        match &self.holonomy {
            Holonomy::Integer(ms) => {
                for (g, m) in ms.iter().enumerate() {
                    let det = m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128;
                    if det != 1 {
                        v.push(format!(
                            "matrices.{}: determinant {det} ≠ 1",
                            Letter::new(g, false).to_char()
                        ));
                    }
                }
            }
            Holonomy::Float(ms) => {
                for (g, m) in ms.iter().enumerate() {
                    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                    if !((det - 1.0).abs() <= FLOAT_TOLERANCE) {
                        v.push(format!(
                            "matrices.{}: determinant {det} ≠ 1",
                            Letter::new(g, false).to_char()
                        ));
                    }
                }
            }
        }

        if self.peripherals.len() != self.cusps {
            v.push(format!(
                "peripherals: {} words given for {} cusps",
                self.peripherals.len(),
                self.cusps
            ));
        }
        for (i, p) in self.peripherals.iter().enumerate() {
            if !holonomy_trace(p, self).is_parabolic() {
                v.push(format!(
                    "peripherals[{i}]: trace {} of {p} is not ±2",
                    holonomy_trace(p, self)
                ));
            }
        }

        // Discreteness spot check on short cyclically reduced words.
        if v.is_empty() {
            for w in short_words(n, 4) {
                let t = holonomy_trace(&w, self);
                if t.below_two() {
                    v.push(format!(
                        "matrices: |trace({w})| = {} < 2, representation not discrete",
                        t
                    ));
                    break;
                }
            }
        }

        let ribbon_errs = self.ribbon.check(n);
        let ribbon_ok = ribbon_errs.is_empty();
        v.extend(ribbon_errs.into_iter().map(|e| format!("ribbon_order: {e}")));
        if ribbon_ok {
            let bouquet = CoreGraph::bouquet(n);
            let mut found: Vec<ConjClass> = boundary_cycles(&bouquet, &self.ribbon)
                .iter()
                .filter_map(|w| conj_class(w).ok())
                .collect();
            let mut want = self.peripheral_classes.clone();
            found.sort();
            want.sort();
            if found != want {
                v.push(format!(
                    "ribbon_order: bouquet boundary {:?} does not match peripherals {:?}",
                    found, want
                ));
            }
        }

        if let Some(gens) = &self.mcg_generators {
            for (i, a) in gens.iter().enumerate() {
                if !a.is_automorphism() {
                    v.push(format!("mcg_generators[{i}]: images do not generate the free group"));
                }
            }
        }
        v
    }
}

/// Checks every invariant of the structure.
pub fn validate(s: &SurfaceStructure) -> Result<()> {
    let v = s.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Surface(v))
    }
}

fn short_words(n: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for slot in 0..2 * n {
                let l = Letter::from_slot(slot);
                if w.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut x = w.clone();
                x.push(l);
                next.push(x);
            }
        }
        for w in &next {
            if w.first().map(|f| f.inverse()) != w.last().copied() || w.len() == 1 {
                out.push(Word::from_letters(w.iter().copied()));
            }
        }
        layer = next;
    }
    out
}

fn int_inverse(m: &IntMat) -> IntMat {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

fn int_mul(x: &IntMat, y: &IntMat) -> Option<IntMat> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let a = x[i][0].checked_mul(y[0][j])?;
            let b = x[i][1].checked_mul(y[1][j])?;
            out[i][j] = a.checked_add(b)?;
        }
    }
    Some(out)
}

fn big_mul(x: &BigMat, y: &IntMat) -> BigMat {
    let e = |i: usize, j: usize| &x[i][0] * y[0][j] + &x[i][1] * y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn float_mul(x: &FloatMat, y: &FloatMat) -> FloatMat {
    let e = |i: usize, j: usize| x[i][0] * y[0][j] + x[i][1] * y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Trace of the holonomy of `w`; exact on integer surfaces.
pub fn holonomy_trace(w: &Word, s: &SurfaceStructure) -> Trace {
    match &s.holonomy {
        Holonomy::Integer(ms) => {
            let mat = |l: Letter| {
                let m = &ms[l.generator()];
                if l.is_inverse() {
                    int_inverse(m)
                } else {
                    *m
                }
            };
            let letters = w.letters();
            let mut acc: IntMat = [[1, 0], [0, 1]];
            let mut idx = 0;
            while idx < letters.len() {
                match int_mul(&acc, &mat(letters[idx])) {
                    Some(m) => acc = m,
                    None => break,
                }
                idx += 1;
            }
            if idx == letters.len() {
                return Trace::Exact(BigInt::from(acc[0][0] as i128 + acc[1][1] as i128));
            }
            let mut big: BigMat = [
                [BigInt::from(acc[0][0]), BigInt::from(acc[0][1])],
                [BigInt::from(acc[1][0]), BigInt::from(acc[1][1])],
            ];
            for &l in &letters[idx..] {
                big = big_mul(&big, &mat(l));
            }
            Trace::Exact(&big[0][0] + &big[1][1])
        }
        Holonomy::Float(ms) => {
            let mut acc: FloatMat = [[1.0, 0.0], [0.0, 1.0]];
            for &l in w.letters() {
                let m = &ms[l.generator()];
                let m = if l.is_inverse() {
                    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
                } else {
                    *m
                };
                acc = float_mul(&acc, &m);
            }
            Trace::Approx(acc[0][0] + acc[1][1])
        }
    }
}

/// Translation length `2·arccosh(|t|/2)` of a hyperbolic trace.
///
/// Evaluated in the log domain, `2·(ln|t| + ln((1 + √(1 − 4/t²))/2))`, once
/// `|t|` is too large for a direct `acosh`.
pub fn length_from_trace(t: &Trace) -> f64 {
    let x = t.to_f64().abs() / 2.0;
    if x.is_finite() && x < 1e8 {
        2.0 * x.acosh()
    } else {
        let ln_t = t.ln_abs();
        let inv_sq = (-2.0 * ln_t).exp() * 4.0;
        2.0 * (ln_t + ((1.0 + (1.0 - inv_sq).sqrt()) / 2.0).ln())
    }
}

/// Hyperbolic length of the closed geodesic in class `c`.
pub fn geodesic_length(c: &ConjClass, s: &SurfaceStructure) -> Result<f64> {
    let t = holonomy_trace(c.word(), s);
    if t.is_parabolic() {
        return Err(Error::Parabolic(c.to_string()));
    }
    if t.below_two() {
        return Err(Error::Discreteness(c.to_string()));
    }
    Ok(length_from_trace(&t))
}

pub fn classify(w: &Word, s: &SurfaceStructure) -> Result<HolonomyClass> {
    if w.is_empty() {
        return Err(Error::TrivialWord);
    }
    if holonomy_trace(w, s).is_parabolic() {
        Ok(HolonomyClass::Parabolic)
    } else {
        Ok(HolonomyClass::Hyperbolic)
    }
}
