//! Mapping classes as peripheral-preserving automorphisms, their action on
//! subgroup classes and multicurves, and orbit balls under a length functional.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::currents::{
    area, boundary_of, boundary_projection, length_gc, Functional, Multicurve,
    RationalSubsetCurrent, Weight,
};
use crate::error::{Error, Result};
use crate::geometry::SurfaceStructure;
use crate::graphs::SubgroupClass;
use crate::words::{conj_class, Automorphism, ConjClass, Word};

pub const DEFAULT_BALL_CAP: usize = 2_000_000;
pub const DEFAULT_MARGIN: f64 = 1.5;

#[derive(Clone, Debug)]
pub struct MappingClass {
    pub auto: Automorphism,
    /// Generator labels, leftmost applied last.
    pub generator_word: Vec<String>,
}

impl MappingClass {
    /// Wraps an automorphism after checking that it permutes the cusps.
    pub fn new(auto: Automorphism, s: &SurfaceStructure) -> Result<MappingClass> {
        let label = auto.label.clone();
        let m = MappingClass {
            auto,
            generator_word: vec![label],
        };
        if !m.preserves_peripherals(s) {
            return Err(Error::Config(format!(
                "{} does not map peripheral classes to peripheral classes",
                m.auto.label
            )));
        }
        Ok(m)
    }

    pub fn identity(rank: usize) -> MappingClass {
        MappingClass {
            auto: Automorphism::identity(rank),
            generator_word: Vec::new(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MappingClass) -> MappingClass {
        let mut word = self.generator_word.clone();
        word.extend(other.generator_word.iter().cloned());
        let mut auto = self.auto.compose(&other.auto);
        auto.label = word.join("·");
        MappingClass {
            auto,
            generator_word: word,
        }
    }

    pub fn preserves_peripherals(&self, s: &SurfaceStructure) -> bool {
        let periph = s.peripheral_classes();
        let mut images: Vec<ConjClass> = Vec::new();
        for p in &s.peripherals {
            match conj_class(&self.auto.apply(p)) {
                Ok(c) if periph.contains(&c) => images.push(c),
                _ => return false,
            }
        }
        let mut a = images;
        let mut b = periph.to_vec();
        a.sort();
        b.sort();
        a == b
    }

    pub fn apply(&self, w: &Word) -> Word {
        self.auto.apply(w)
    }
}

fn parse2(s: &str) -> Word {
    Word::parse(s, 2).expect("static word")
}

/// Dehn twists `t1: (a, b) ↦ (a, ab)` and `t2: (a, b) ↦ (ab, b)` with their
/// inverses `T1`, `T2` on the built-in punctured torus; configured generators
/// otherwise.
pub fn twist_generators(s: &SurfaceStructure) -> Result<Vec<MappingClass>> {
    if s.builtin {
        let gens = [
            ("t1", ["a", "ab"]),
            ("T1", ["a", "Ab"]),
            ("t2", ["ab", "b"]),
            ("T2", ["aB", "b"]),
        ];
        return gens
            .iter()
            .map(|(label, im)| {
                MappingClass::new(Automorphism::new(im.iter().map(|w| parse2(w)).collect(), *label), s)
            })
            .collect();
    }
    match &s.mcg_generators {
        Some(gens) if !gens.is_empty() => gens
            .iter()
            .map(|a| MappingClass::new(a.clone(), s))
            .collect(),
        _ => Err(Error::Config(format!(
            "surface {:?} has no mapping class generators configured",
            s.name
        ))),
    }
}

/// Composes generators named by label, applied right to left as written.
pub fn word_in_generators(gens: &[MappingClass], labels: &[&str], rank: usize) -> Result<MappingClass> {
    let mut out = MappingClass::identity(rank);
    for l in labels {
        let g = gens
            .iter()
            .find(|g| g.auto.label == *l)
            .ok_or_else(|| Error::Input(format!("unknown generator {l:?}")))?;
        out = out.compose(g);
    }
    Ok(out)
}

/// `φ([H]) = [φ(H)]`: fold the images of a free basis.
pub fn act_on_subgroup(phi: &MappingClass, h: &SubgroupClass) -> Result<SubgroupClass> {
    h.map(&phi.auto)
}

pub fn act_on_current(phi: &MappingClass, eta: &RationalSubsetCurrent) -> Result<RationalSubsetCurrent> {
    let mut out = RationalSubsetCurrent::zero();
    for (h, w) in eta.terms() {
        out.add(act_on_subgroup(phi, h)?, w.clone());
    }
    Ok(out)
}

pub fn act_on_multicurve(phi: &MappingClass, gamma: &Multicurve) -> Multicurve {
    let mut out = Multicurve::zero();
    for (c, w) in gamma.iter() {
        let img = conj_class(&phi.apply(c.word())).expect("automorphisms preserve nontrivial classes");
        out.add(&img, w);
    }
    out
}

/// How orbit elements are identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitMode {
    /// Orbit of the current η: the weighted multiset of terms.
    Current,
    /// Orbit of the ordered tuple J of subgroup classes with their weights.
    Tuple,
}

#[derive(Clone, Debug)]
pub struct OrbitConfig {
    pub functional: Functional,
    pub cutoff: f64,
    pub margin: f64,
    pub cap: usize,
    pub mode: OrbitMode,
}

impl OrbitConfig {
    pub fn new(functional: Functional, cutoff: f64) -> OrbitConfig {
        OrbitConfig {
            functional,
            cutoff,
            margin: DEFAULT_MARGIN,
            cap: DEFAULT_BALL_CAP,
            mode: OrbitMode::Current,
        }
    }

    pub fn margin(mut self, margin: f64) -> OrbitConfig {
        self.margin = margin;
        self
    }

    pub fn cap(mut self, cap: usize) -> OrbitConfig {
        self.cap = cap;
        self
    }

    pub fn mode(mut self, mode: OrbitMode) -> OrbitConfig {
        self.mode = mode;
        self
    }
}

#[derive(Clone, Debug)]
pub struct BallElement {
    pub key: Vec<u8>,
    pub terms: Vec<(SubgroupClass, Weight)>,
    pub value: f64,
    pub lsc: f64,
    pub area: f64,
    /// Key of the boundary projection `B` of the element.
    pub b_key: String,
}

impl BallElement {
    pub fn current(&self) -> RationalSubsetCurrent {
        let mut c = RationalSubsetCurrent::zero();
        for (h, w) in &self.terms {
            c.add(h.clone(), w.clone());
        }
        c
    }
}

#[derive(Clone, Debug)]
pub struct OrbitBall {
    pub seed: RationalSubsetCurrent,
    pub functional: Functional,
    pub cutoff: f64,
    pub margin: f64,
    pub mode: OrbitMode,
    /// Elements with value ≤ cutoff, sorted by key.
    pub elements: Vec<BallElement>,
    /// Distinct orbit elements evaluated, inside the ball or not.
    pub visited: usize,
    pub explored: usize,
    pub frontier_exhausted: bool,
}

impl OrbitBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn keys(&self) -> HashSet<Vec<u8>> {
        self.elements.iter().map(|e| e.key.clone()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.value).collect()
    }
}

fn state_key(terms: &[(SubgroupClass, Weight)], mode: OrbitMode) -> Vec<u8> {
    match mode {
        OrbitMode::Tuple => {
            let mut out = Vec::new();
            for (h, w) in terms {
                out.extend_from_slice(&(h.key().len() as u32).to_be_bytes());
                out.extend_from_slice(h.key());
                out.extend_from_slice(crate::currents::format_weight(w).as_bytes());
                out.push(b';');
            }
            out
        }
        OrbitMode::Current => {
            let mut c = RationalSubsetCurrent::zero();
            for (h, w) in terms {
                c.add(h.clone(), w.clone());
            }
            c.key()
        }
    }
}

struct Evaluated {
    key: Vec<u8>,
    terms: Vec<(SubgroupClass, Weight)>,
    value: f64,
    lsc: f64,
    area: f64,
    b_key: String,
}

fn evaluate(
    terms: Vec<(SubgroupClass, Weight)>,
    cfg: &OrbitConfig,
    s: &SurfaceStructure,
) -> Result<Evaluated> {
    let key = state_key(&terms, cfg.mode);
    let mut current = RationalSubsetCurrent::zero();
    for (h, w) in &terms {
        current.add(h.clone(), w.clone());
    }
    let b = boundary_projection(&current, s)?;
    let lsc = length_gc(&b, s)?;
    let area = area(&current).value;
    Ok(Evaluated {
        key,
        terms,
        value: cfg.functional.combine(lsc, area),
        lsc,
        area,
        b_key: b.key(),
    })
}

fn neighbors(
    terms: &[(SubgroupClass, Weight)],
    gens: &[MappingClass],
    cfg: &OrbitConfig,
    s: &SurfaceStructure,
) -> Result<Vec<Evaluated>> {
    gens.iter()
        .map(|phi| {
            let img = terms
                .iter()
                .map(|(h, w)| Ok((act_on_subgroup(phi, h)?, w.clone())))
                .collect::<Result<Vec<_>>>()?;
            evaluate(img, cfg, s)
        })
        .collect()
}

/// Breadth-first closure of the seed under the mapping class generators.
///
/// Elements with value ≤ `margin · cutoff` are expanded, the seed and a
/// greedy descent path from it always; elements with value ≤ `cutoff` are
/// reported. Completeness of the ball is heuristic: an orbit element can be
/// reachable only through elements above the margin.
pub fn orbit_ball(
    seed: &RationalSubsetCurrent,
    cfg: &OrbitConfig,
    s: &SurfaceStructure,
) -> Result<OrbitBall> {
    if !(cfg.cutoff > 0.0) {
        return Err(Error::Input(format!("cutoff must be positive, got {}", cfg.cutoff)));
    }
    if !(cfg.margin >= 1.0) {
        return Err(Error::Input(format!("margin must be ≥ 1, got {}", cfg.margin)));
    }
    Functional::new(cfg.functional.alpha, cfg.functional.beta)?;
    let gens = twist_generators(s)?;
    let limit = cfg.margin * cfg.cutoff;

    let seed_terms: Vec<(SubgroupClass, Weight)> =
        seed.terms().map(|(h, w)| (h.clone(), w.clone())).collect();
    let root = evaluate(seed_terms, cfg, s)?;

    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    let mut inside: Vec<BallElement> = Vec::new();
    let mut explored = 0usize;

    let record = |e: &Evaluated, inside: &mut Vec<BallElement>| {
        if e.value <= cfg.cutoff {
            inside.push(BallElement {
                key: e.key.clone(),
                terms: e.terms.clone(),
                value: e.value,
                lsc: e.lsc,
                area: e.area,
                b_key: e.b_key.clone(),
            });
        }
    };

    seen.insert(root.key.clone(), ());
    record(&root, &mut inside);
    let mut layer: Vec<Vec<(SubgroupClass, Weight)>> = vec![root.terms.clone()];

    // Greedy descent so that a seed far above the cutoff still reaches the
    // low part of its orbit.
    let mut cur = root;
    loop {
        let nbrs = neighbors(&cur.terms, &gens, cfg, s)?;
        explored += 1;
        let best = nbrs
            .into_iter()
            .min_by(|x, y| x.value.total_cmp(&y.value).then_with(|| x.key.cmp(&y.key)));
        match best {
            Some(b) if b.value < cur.value && !seen.contains_key(&b.key) => {
                seen.insert(b.key.clone(), ());
                record(&b, &mut inside);
                layer.push(b.terms.clone());
                cur = b;
            }
            _ => break,
        }
    }

    let partial = |inside: Vec<BallElement>, visited: usize, explored: usize| OrbitBall {
        seed: seed.clone(),
        functional: cfg.functional,
        cutoff: cfg.cutoff,
        margin: cfg.margin,
        mode: cfg.mode,
        elements: sorted(inside),
        visited,
        explored,
        frontier_exhausted: false,
    };

    while !layer.is_empty() {
        let results: Vec<Result<Vec<Evaluated>>> = layer
            .par_iter()
            .map(|terms| neighbors(terms, &gens, cfg, s))
            .collect();
        explored += layer.len();
        let mut next = Vec::new();
        for r in results {
            for e in r? {
                if seen.contains_key(&e.key) {
                    continue;
                }
                seen.insert(e.key.clone(), ());
                record(&e, &mut inside);
                if e.value <= limit {
                    next.push(e.terms);
                }
                if seen.len() > cfg.cap {
                    return Err(Error::BallLimit {
                        cap: cfg.cap,
                        partial: Box::new(partial(inside, seen.len(), explored)),
                    });
                }
            }
        }
        layer = next;
    }

    Ok(OrbitBall {
        frontier_exhausted: true,
        ..partial(inside, seen.len(), explored)
    })
}

fn sorted(mut v: Vec<BallElement>) -> Vec<BallElement> {
    v.sort_by(|a, b| a.key.cmp(&b.key));
    v
}

/// Lengths of the boundary components of one subgroup class (geodesic ones only).
pub fn boundary_lengths(h: &SubgroupClass, s: &SurfaceStructure) -> Result<Vec<f64>> {
    boundary_of(h, s)?
        .geodesic_cycles()
        .map(|c| crate::geometry::geodesic_length(&c.class.pow(c.power), s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> SurfaceStructure {
        SurfaceStructure::modular_torus()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    fn sub(gens: &[&str]) -> SubgroupClass {
        let ws: Vec<Word> = gens.iter().map(|x| w(x)).collect();
        SubgroupClass::from_generators(&ws, &torus()).unwrap()
    }

    #[test]
    fn twists() {
        let s = torus();
        let g = twist_generators(&s).unwrap();
        assert_eq!(g[0].apply(&w("b")), w("ab"));
        assert_eq!(g[2].apply(&w("abAB")), w("abAB"));
        for (x, y) in [(0, 1), (2, 3)] {
            let id = g[x].compose(&g[y]);
            assert_eq!(id.apply(&w("a")), w("a"));
            assert_eq!(id.apply(&w("b")), w("b"));
        }
    }

    #[test]
    fn abelianized_twists_generate_sl2z() {
        let s = torus();
        let g = twist_generators(&s).unwrap();
        let abel = |m: &MappingClass| -> [[i64; 2]; 2] {
            let mut cols = [[0i64; 2]; 2];
            for gen in 0..2 {
                for l in m.apply(&Word::generator(gen)).letters() {
                    cols[gen][l.generator()] += if l.is_inverse() { -1 } else { 1 };
                }
            }
            [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
        };
        assert_eq!(abel(&g[0]), [[1, 1], [0, 1]]);
        assert_eq!(abel(&g[2]), [[1, 0], [1, 1]]);
        // S = t2·T1·t2 has order 4 and together with t2 generates SL(2, ℤ).
        let sm = g[2].compose(&g[1]).compose(&g[2]);
        let m = abel(&sm);
        assert_eq!(m, [[0, -1], [1, 0]]);
    }

    #[test]
    fn user_surface_without_generators() {
        let mut s = torus();
        s.builtin = false;
        assert!(matches!(twist_generators(&s), Err(Error::Config(_))));
    }

    #[test]
    fn subgroup_action() {
        let s = torus();
        let g = twist_generators(&s).unwrap();
        assert_eq!(act_on_subgroup(&g[0], &sub(&["a"])).unwrap(), sub(&["a"]));
        assert_eq!(act_on_subgroup(&g[0], &sub(&["b"])).unwrap(), sub(&["ab"]));
        let h = sub(&["aaaa", "ab", "bb", "aaba", "aaBa"]);
        let ph = act_on_subgroup(&g[0], &h).unwrap();
        assert_eq!(ph, sub(&["aaaa", "aab", "abab", "aaaba", "aaB"]));
        assert_ne!(ph.key(), h.key());
    }

    #[test]
    fn multicurve_action() {
        let s = torus();
        let g = twist_generators(&s).unwrap();
        let one = Weight::from_integer(1.into());
        let mut m = Multicurve::zero();
        m.add(&conj_class(&w("b")).unwrap(), &one);
        let img = act_on_multicurve(&g[0], &m);
        assert_eq!(img.weight(&conj_class(&w("ab")).unwrap()), one);

        let eta = RationalSubsetCurrent::single(sub(&["aa", "b"]));
        let lhs = act_on_multicurve(&g[0], &boundary_projection(&eta, &s).unwrap());
        let rhs = boundary_projection(&act_on_current(&g[0], &eta).unwrap(), &s).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn small_balls() {
        let s = torus();
        let seed = RationalSubsetCurrent::single(sub(&["a"]));
        let ball = orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 2.0), &s).unwrap();
        assert_eq!(ball.len(), 3);
        assert!(ball.frontier_exhausted);
        let ball = orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 4.0), &s).unwrap();
        assert_eq!(ball.len(), 6);

        let fi = RationalSubsetCurrent::single(sub(&["a", "bb", "baB"]));
        for l in [0.5, 10.0, 100.0] {
            let ball = orbit_ball(&fi, &OrbitConfig::new(Functional::LSC, l), &s).unwrap();
            assert_eq!(ball.len(), 3, "L = {l}");
        }
    }

    #[test]
    fn seed_above_cutoff_descends() {
        let s = torus();
        let seed = RationalSubsetCurrent::single(sub(&["aab"]));
        let ball = orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 2.0).margin(1.0), &s).unwrap();
        assert_eq!(ball.len(), 3);
    }

    #[test]
    fn ball_cap() {
        let s = torus();
        let seed = RationalSubsetCurrent::single(sub(&["a"]));
        match orbit_ball(&seed, &OrbitConfig::new(Functional::LSC, 20.0).cap(10), &s) {
            Err(Error::BallLimit { cap, partial }) => {
                assert_eq!(cap, 10);
                assert!(!partial.frontier_exhausted);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn tuple_mode_distinguishes_swaps() {
        let s = torus();
        let mut seed = RationalSubsetCurrent::zero();
        seed.add(sub(&["a"]), Weight::from_integer(1.into()));
        seed.add(sub(&["b"]), Weight::from_integer(1.into()));
        let c = OrbitConfig::new(Functional::LSC, 6.0);
        let eta = orbit_ball(&seed, &c, &s).unwrap();
        let j = orbit_ball(&seed, &c.clone().mode(OrbitMode::Tuple), &s).unwrap();
        assert!(j.len() >= eta.len());
    }
}
