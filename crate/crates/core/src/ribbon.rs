//! Ribbon structure inherited from the surface and boundary extraction.
//!
//! The surface fixes a cyclic order of the `2n` dart types at the base vertex
//! of the bouquet. Every vertex of a core graph immerses into the bouquet, so
//! it inherits the restriction of that order to the dart types it has.
//! Thickening gives a compact surface whose boundary walks are the boundary
//! components of the convex core (cusps included).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SurfaceStructure;
use crate::graphs::CoreGraph;
use crate::words::{conj_class, is_peripheral, ConjClass, Letter, Word, MAX_RANK};

/// A generator together with a direction at a vertex: `a+` is the start of an
/// `a`-edge, `a-` its end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DartType {
    pub generator: usize,
    pub outgoing: bool,
}

impl DartType {
    pub fn parse(s: &str) -> Option<DartType> {
        let mut it = s.chars();
        let l = Letter::from_char(it.next()?)?;
        if l.is_inverse() {
            return None;
        }
        let outgoing = match it.next()? {
            '+' => true,
            '-' => false,
            _ => return None,
        };
        if it.next().is_some() {
            return None;
        }
        Some(DartType {
            generator: l.generator(),
            outgoing,
        })
    }

    /// The graph slot this dart occupies; leaving through it reads the letter of the same slot.
    pub fn slot(self) -> usize {
        2 * self.generator + (!self.outgoing) as usize
    }

    pub fn from_slot(slot: usize) -> DartType {
        DartType {
            generator: slot / 2,
            outgoing: slot.is_multiple_of(2),
        }
    }
}

impl fmt::Display for DartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = Letter::new(self.generator, false).to_char();
        write!(f, "{c}{}", if self.outgoing { '+' } else { '-' })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonOrder {
    darts: Vec<DartType>,
    /// position of each slot in the cyclic order, `usize::MAX` if absent
    position: Vec<usize>,
}

impl RibbonOrder {
    pub fn new(darts: Vec<DartType>) -> RibbonOrder {
        let mut position = vec![usize::MAX; 2 * MAX_RANK];
        for (i, d) in darts.iter().enumerate() {
            if d.generator < MAX_RANK && position[d.slot()] == usize::MAX {
                position[d.slot()] = i;
            }
        }
        RibbonOrder { darts, position }
    }

    /// `(g₁+, …, gₙ+, g₁−, …, gₙ−)`; for rank two this is `(a+, b+, a−, b−)`.
    pub fn standard(rank: usize) -> RibbonOrder {
        let mut darts: Vec<DartType> = (0..rank)
            .map(|g| DartType {
                generator: g,
                outgoing: true,
            })
            .collect();
        darts.extend((0..rank).map(|g| DartType {
            generator: g,
            outgoing: false,
        }));
        RibbonOrder::new(darts)
    }

    pub fn parse(items: &[&str]) -> Option<RibbonOrder> {
        items
            .iter()
            .map(|s| DartType::parse(s))
            .collect::<Option<Vec<_>>>()
            .map(RibbonOrder::new)
    }

    pub fn darts(&self) -> &[DartType] {
        &self.darts
    }

    /// Violations of "each of the `2n` dart types exactly once".
    pub fn check(&self, rank: usize) -> Vec<String> {
        let mut v = Vec::new();
        let mut seen = vec![0usize; 2 * MAX_RANK];
        for d in &self.darts {
            if d.generator >= rank {
                v.push(format!("dart {d} outside the rank-{rank} alphabet"));
            } else {
                seen[d.slot()] += 1;
            }
        }
        for slot in 0..2 * rank {
            match seen[slot] {
                1 => {}
                0 => v.push(format!("dart {} missing", DartType::from_slot(slot))),
                k => v.push(format!("dart {} repeated {k} times", DartType::from_slot(slot))),
            }
        }
        v
    }

    /// Successor of `slot` in the order restricted to the slots present at `v`.
    fn successor(&self, g: &CoreGraph, v: usize, slot: usize) -> usize {
        let n = self.darts.len();
        let start = self.position[slot];
        for step in 1..=n {
            let s = self.darts[(start + step) % n].slot();
            if g.slot(v, s).is_some() {
                return s;
            }
        }
        slot
    }
}

/// Boundary walks of the thickened graph, each read as a cyclic word.
///
/// A directed edge arriving at `v` continues along the dart that follows the
/// reverse of the arriving dart in `v`'s inherited order. Every directed edge
/// lies on exactly one walk.
pub fn boundary_cycles(g: &CoreGraph, order: &RibbonOrder) -> Vec<Word> {
    let w = 2 * g.ambient_rank();
    let n = g.vertex_count();
    let mut used = vec![false; n * w];
    let mut out = Vec::new();
    for v0 in 0..n {
        for s0 in 0..w {
            if used[v0 * w + s0] || g.slot(v0, s0).is_none() {
                continue;
            }
            let mut letters = Vec::new();
            let (mut v, mut s) = (v0, s0);
            loop {
                used[v * w + s] = true;
                letters.push(Letter::from_slot(s));
                let head = g.slot(v, s).expect("dart with no edge");
                let next = order.successor(g, head, s ^ 1);
                v = head;
                s = next;
                if (v, s) == (v0, s0) {
                    break;
                }
            }
            // Walks on a core graph never backtrack, so this is cyclically reduced.
            out.push(Word::from_letters(letters));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Geodesic,
    Cusp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCycle {
    /// The walk as read, starting at its first dart.
    pub word: String,
    /// Primitive root class of the walk.
    pub class: ConjClass,
    pub kind: BoundaryKind,
    /// The walk reads `class^power` (for cusps, the peripheral power).
    pub power: usize,
    #[serde(skip)]
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub cycles: Vec<BoundaryCycle>,
    pub euler_char: i64,
    pub genus: i64,
}

impl BoundaryReport {
    pub fn geodesic_cycles(&self) -> impl Iterator<Item = &BoundaryCycle> {
        self.cycles.iter().filter(|c| c.kind == BoundaryKind::Geodesic)
    }

    pub fn all_cusps(&self) -> bool {
        self.cycles.iter().all(|c| c.kind == BoundaryKind::Cusp)
    }
}

/// Splits boundary walks into cusps and geodesic boundary components and
/// recovers the genus of the closed-up core from `2 − 2g − b = χ`.
pub fn classify_boundary(
    g: &CoreGraph,
    order: &RibbonOrder,
    s: &SurfaceStructure,
) -> Result<BoundaryReport> {
    let words = boundary_cycles(g, order);
    let mut cycles = Vec::with_capacity(words.len());
    for w in &words {
        let c = conj_class(w)?;
        let (root, m) = c.primitive_root();
        let (kind, power) = match is_peripheral(&c, s) {
            Some(p) => (BoundaryKind::Cusp, p),
            None => (BoundaryKind::Geodesic, m),
        };
        cycles.push(BoundaryCycle {
            word: w.to_string(),
            class: root,
            kind,
            power,
            length: w.len(),
        });
    }
    let chi = g.euler_characteristic();
    let b = cycles.len() as i64;
    let twice_genus = 2 - b - chi;
    if twice_genus < 0 || twice_genus % 2 != 0 {
        return Err(Error::InternalConsistency(format!(
            "χ = {chi} with {b} boundary cycles gives non-integral genus"
        )));
    }
    Ok(BoundaryReport {
        cycles,
        euler_char: chi,
        genus: twice_genus / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fold;

    fn class(w: &str) -> ConjClass {
        conj_class(&Word::parse(w, 2).unwrap()).unwrap()
    }

    fn cycles_of(gens: &[&str]) -> Vec<String> {
        let ws: Vec<Word> = gens.iter().map(|s| Word::parse(s, 2).unwrap()).collect();
        let g = fold(2, &ws).unwrap().core();
        boundary_cycles(&g, &RibbonOrder::standard(2))
            .iter()
            .map(|w| w.to_string())
            .collect()
    }

    #[test]
    fn parse_darts() {
        assert_eq!(DartType::parse("b-").unwrap().slot(), 3);
        assert!(DartType::parse("A+").is_none());
        assert!(DartType::parse("a").is_none());
        assert!(DartType::parse("a+x").is_none());
    }

    #[test]
    fn bouquet_boundary() {
        assert_eq!(cycles_of(&["a", "b"]), vec!["aBAb"]);
    }

    #[test]
    fn annulus() {
        assert_eq!(cycles_of(&["a"]), vec!["a", "A"]);
    }

    #[test]
    fn one_holed_torus_core() {
        let c = cycles_of(&["aa", "b"]);
        assert_eq!(c.len(), 1);
        assert_eq!(conj_class(&Word::parse(&c[0], 2).unwrap()).unwrap(), class("aaBAAb"));
    }

    #[test]
    fn classification() {
        let s = SurfaceStructure::modular_torus();
        let rep = |gens: &[&str]| {
            let ws: Vec<Word> = gens.iter().map(|x| Word::parse(x, 2).unwrap()).collect();
            classify_boundary(&fold(2, &ws).unwrap().core(), &s.ribbon, &s).unwrap()
        };
        let r = rep(&["a", "b"]);
        assert_eq!((r.cycles.len(), r.euler_char, r.genus), (1, -1, 1));
        assert_eq!(r.cycles[0].kind, BoundaryKind::Cusp);

        let r = rep(&["a", "bb", "baB"]);
        assert_eq!((r.cycles.len(), r.euler_char, r.genus), (2, -2, 1));
        assert!(r.cycles.iter().all(|c| c.kind == BoundaryKind::Cusp && c.power == 1));

        let r = rep(&["aa", "b"]);
        assert_eq!((r.cycles.len(), r.euler_char, r.genus), (1, -1, 1));
        assert_eq!(r.cycles[0].kind, BoundaryKind::Geodesic);
        assert_eq!(r.cycles[0].class, class("aaBAAb"));
        assert_eq!(r.cycles[0].power, 1);

        let r = rep(&["aa"]);
        assert_eq!(r.cycles.len(), 2);
        assert!(r.cycles.iter().all(|c| c.class.to_string() == "a" && c.power == 2));
    }

    #[test]
    fn order_check() {
        let o = RibbonOrder::parse(&["a+", "b+", "a-"]).unwrap();
        assert_eq!(o.check(2), vec!["dart b- missing".to_string()]);
        let o = RibbonOrder::parse(&["a+", "b+", "a-", "a-"]).unwrap();
        assert_eq!(o.check(2).len(), 2);
    }
}
