//! Rational geodesic and subset currents with their computable shadows.
//!
//! A rational subset current is a finite positive ℚ-combination of subgroup
//! classes. It is never materialized as a measure; everything downstream
//! goes through the boundary projection `B`, the Euler characteristic of the
//! convex core, and the lengths derived from them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{geodesic_length, SurfaceStructure};
use crate::graphs::SubgroupClass;
use crate::ribbon::{classify_boundary, BoundaryReport};
use crate::words::{is_peripheral, ConjClass, Word};

pub type Weight = BigRational;

pub fn parse_weight(s: &str) -> Result<Weight> {
    let bad = || Error::Input(format!("invalid weight {s:?}"));
    let s = s.trim();
    let w = match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
    };
    Ok(w)
}

pub fn format_weight(w: &Weight) -> String {
    if w.is_integer() {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

/// Weighted multicurve: positive rational weights on primitive,
/// non-peripheral unoriented classes.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multicurve {
    weights: BTreeMap<ConjClass, Weight>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticurveEntry {
    pub class: String,
    pub weight: String,
}

impl Multicurve {
    pub fn zero() -> Multicurve {
        Multicurve::default()
    }

    /// Adds `w · η_c`. A non-primitive `c = u^m` contributes `m·w` to `u`.
    pub fn add(&mut self, c: &ConjClass, w: &Weight) {
        let (root, m) = c.primitive_root();
        let slot = self.weights.entry(root.clone()).or_insert_with(Weight::zero);
        *slot += w * BigInt::from(m);
        if slot.is_zero() {
            self.weights.remove(&root);
        }
    }

    /// Builds a multicurve, rejecting peripheral classes and non-positive weights.
    pub fn from_terms<'a, I>(terms: I, s: &SurfaceStructure) -> Result<Multicurve>
    where
        I: IntoIterator<Item = (&'a ConjClass, &'a Weight)>,
    {
        let mut m = Multicurve::zero();
        for (c, w) in terms {
            if !w.is_positive() {
                return Err(Error::Input(format!("weight {w} on {c} is not positive")));
            }
            if is_peripheral(c, s).is_some() {
                return Err(Error::Input(format!("class {c} is peripheral")));
            }
            m.add(c, w);
        }
        Ok(m)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConjClass, &Weight)> {
        self.weights.iter()
    }

    pub fn weight(&self, c: &ConjClass) -> Weight {
        self.weights.get(c).cloned().unwrap_or_else(Weight::zero)
    }

    pub fn scale(&self, q: &Weight) -> Multicurve {
        let mut out = Multicurve::zero();
        for (c, w) in &self.weights {
            out.add(c, &(w * q));
        }
        out
    }

    pub fn plus(&self, other: &Multicurve) -> Multicurve {
        let mut out = self.clone();
        for (c, w) in &other.weights {
            out.add(c, w);
        }
        out
    }

    /// Deterministic string key, e.g. `aaBAAb:1/2;ab:1`.
    pub fn key(&self) -> String {
        self.to_string()
    }

    pub fn entries(&self) -> Vec<MulticurveEntry> {
        self.weights
            .iter()
            .map(|(c, w)| MulticurveEntry {
                class: c.to_string(),
                weight: format_weight(w),
            })
            .collect()
    }
}

impl fmt::Display for Multicurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{c}:{}", format_weight(w))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Multicurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multicurve({self})")
    }
}

/// Finite positive combination `Σ wᵢ η_{Hᵢ}` of subgroup classes.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalSubsetCurrent {
    terms: BTreeMap<SubgroupClass, Weight>,
}

impl RationalSubsetCurrent {
    pub fn zero() -> RationalSubsetCurrent {
        RationalSubsetCurrent::default()
    }

    pub fn single(h: SubgroupClass) -> RationalSubsetCurrent {
        let mut c = RationalSubsetCurrent::zero();
        c.add(h, Weight::one());
        c
    }

    pub fn add(&mut self, h: SubgroupClass, w: Weight) {
        let slot = self.terms.entry(h).or_insert_with(Weight::zero);
        *slot += w;
    }

    /// Parses `w:g₁,g₂,…;w:…`, e.g. `1:aa,b;1/2:a`.
    pub fn parse(lit: &str, s: &SurfaceStructure) -> Result<RationalSubsetCurrent> {
        let mut out = RationalSubsetCurrent::zero();
        for term in lit.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (w, gens) = term
                .split_once(':')
                .ok_or_else(|| Error::Input(format!("term {term:?} must look like w:g1,g2")))?;
            let w = parse_weight(w)?;
            if !w.is_positive() {
                return Err(Error::Input(format!("weight in {term:?} must be positive")));
            }
            let gens = parse_generators(gens, s.rank)?;
            out.add(SubgroupClass::from_generators(&gens, s)?, w);
        }
        if out.terms.is_empty() {
            return Err(Error::Input("empty current literal".into()));
        }
        Ok(out)
    }

    /// The current `Σ w·η_{⟨c⟩}` of a multicurve.
    pub fn from_multicurve(m: &Multicurve, s: &SurfaceStructure) -> Result<RationalSubsetCurrent> {
        let mut out = RationalSubsetCurrent::zero();
        for (c, w) in m.iter() {
            out.add(SubgroupClass::cyclic(c, s)?, w.clone());
        }
        Ok(out)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SubgroupClass, &Weight)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, q: &Weight) -> RationalSubsetCurrent {
        RationalSubsetCurrent {
            terms: self.terms.iter().map(|(h, w)| (h.clone(), w * q)).collect(),
        }
    }

    pub fn plus(&self, other: &RationalSubsetCurrent) -> RationalSubsetCurrent {
        let mut out = self.clone();
        for (h, w) in &other.terms {
            out.add(h.clone(), w.clone());
        }
        out
    }

    /// Every term is a cyclic subgroup, i.e. the current is a geodesic current.
    pub fn is_geodesic_current(&self) -> bool {
        self.terms.keys().all(SubgroupClass::is_cyclic)
    }

    /// Canonical multiset key over `(class key, weight)` pairs.
    pub fn key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (h, w) in &self.terms {
            out.extend_from_slice(&(h.key().len() as u32).to_be_bytes());
            out.extend_from_slice(h.key());
            out.extend_from_slice(format_weight(w).as_bytes());
            out.push(b';');
        }
        out
    }
}

impl fmt::Debug for RationalSubsetCurrent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalSubsetCurrent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (h, w)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            let gens: Vec<String> = h.generators().iter().map(|g| g.to_string()).collect();
            write!(f, "{}:{}", format_weight(w), gens.join(","))?;
        }
        Ok(())
    }
}

/// Comma-separated word list.
pub fn parse_generators(list: &str, rank: usize) -> Result<Vec<Word>> {
    let words: Vec<&str> = list.split(',').map(str::trim).collect();
    if words.iter().any(|w| w.is_empty()) {
        return Err(Error::Input(format!("empty word in generator list {list:?}")));
    }
    words.iter().map(|w| Word::parse(w, rank)).collect()
}

/// Boundary report of a single subgroup class on the surface.
pub fn boundary_of(h: &SubgroupClass, s: &SurfaceStructure) -> Result<BoundaryReport> {
    classify_boundary(h.graph(), &s.ribbon, s)
}

/// `B(η_H) = ½ Σ_{c ∈ ∂C_H} η_c`, extended ℚ-linearly. Cusp components contribute
/// nothing; a boundary walk reading `u^m` contributes `m/2` to `u`.
pub fn boundary_projection(eta: &RationalSubsetCurrent, s: &SurfaceStructure) -> Result<Multicurve> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut out = Multicurve::zero();
    for (h, w) in eta.terms() {
        let coeff = w * &half;
        for cyc in boundary_of(h, s)?.geodesic_cycles() {
            out.add(&cyc.class, &(&coeff * BigInt::from(cyc.power)));
        }
    }
    Ok(out)
}

/// `Σ weight · ℓ(class)`, summed in canonical class order.
pub fn length_gc(gamma: &Multicurve, s: &SurfaceStructure) -> Result<f64> {
    let mut total = 0.0;
    for (c, w) in gamma.iter() {
        total += w.to_f64().unwrap() * geodesic_length(c, s)?;
    }
    Ok(total)
}

/// Generalized length `ℓ_SC = ℓ ∘ B`.
pub fn length_sc(eta: &RationalSubsetCurrent, s: &SurfaceStructure) -> Result<f64> {
    length_gc(&boundary_projection(eta, s)?, s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Area {
    pub value: f64,
    /// `Σ weight · χ(C_H)`.
    pub exact_chi: Weight,
}

/// Gauss–Bonnet area `Σ weight · (−2π χ(C_H))` together with the exact χ sum.
pub fn area(eta: &RationalSubsetCurrent) -> Area {
    let mut chi = Weight::zero();
    for (h, w) in eta.terms() {
        chi += w * BigInt::from(h.euler_characteristic());
    }
    Area {
        value: -2.0 * PI * chi.to_f64().unwrap(),
        exact_chi: chi,
    }
}

/// `α·ℓ_SC + β·Area` with `α, β ≥ 0`, not both zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub alpha: f64,
    pub beta: f64,
}

impl Functional {
    pub const LSC: Functional = Functional {
        alpha: 1.0,
        beta: 0.0,
    };
    pub const AREA: Functional = Functional {
        alpha: 0.0,
        beta: 1.0,
    };
    /// `ℓ_A = ℓ_SC + Area`, strictly positive on nonzero rational currents.
    pub const LA: Functional = Functional {
        alpha: 1.0,
        beta: 1.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Functional> {
        if !(alpha >= 0.0 && beta >= 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Input(format!(
                "functional coefficients must be finite and ≥ 0, got ({alpha}, {beta})"
            )));
        }
        if alpha == 0.0 && beta == 0.0 {
            return Err(Error::Input("functional (0, 0) is identically zero".into()));
        }
        Ok(Functional { alpha, beta })
    }

    /// `lsc`, `area`, `la`, or `α,β`.
    pub fn parse(s: &str) -> Result<Functional> {
        match s.trim() {
            "lsc" => Ok(Functional::LSC),
            "area" => Ok(Functional::AREA),
            "la" => Ok(Functional::LA),
            other => {
                let (a, b) = other
                    .split_once(',')
                    .ok_or_else(|| Error::Input(format!("unknown functional {other:?}")))?;
                let p = |x: &str| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Input(format!("bad coefficient {x:?}")))
                };
                Functional::new(p(a)?, p(b)?)
            }
        }
    }

    pub fn name(&self) -> String {
        match (self.alpha, self.beta) {
            (a, b) if a == 1.0 && b == 0.0 => "lsc".into(),
            (a, b) if a == 0.0 && b == 1.0 => "area".into(),
            (a, b) if a == 1.0 && b == 1.0 => "la".into(),
            (a, b) => format!("{a},{b}"),
        }
    }

    /// Combines precomputed components.
    pub fn combine(&self, lsc: f64, area: f64) -> f64 {
        let mut v = 0.0;
        if self.alpha != 0.0 {
            v += self.alpha * lsc;
        }
        if self.beta != 0.0 {
            v += self.beta * area;
        }
        v
    }
}

pub fn evaluate_functional(
    f: &Functional,
    eta: &RationalSubsetCurrent,
    s: &SurfaceStructure,
) -> Result<f64> {
    Functional::new(f.alpha, f.beta)?;
    Ok(f.combine(length_sc(eta, s)?, area(eta).value))
}
