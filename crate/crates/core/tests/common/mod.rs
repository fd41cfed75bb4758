#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use subset_currents::graphs::CoreGraph;
use subset_currents::mcg::{twist_generators, MappingClass};
use subset_currents::words::{reduce, Letter};
use subset_currents::{SubgroupClass, SurfaceStructure, Word};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn torus() -> SurfaceStructure {
    SurfaceStructure::modular_torus()
}

pub fn w(s: &str) -> Word {
    Word::parse(s, 26).unwrap()
}

/// Nonempty reduced word with length in `1..=max_len`.
pub fn random_word(r: &mut StdRng, rank: usize, max_len: usize) -> Word {
    let len = r.gen_range(1..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_slot(r.gen_range(0..2 * rank));
        if letters.last() == Some(&l.inverse()) {
            continue;
        }
        letters.push(l);
    }
    reduce(letters, rank).unwrap()
}

pub fn random_gens(r: &mut StdRng, rank: usize, max_gens: usize, max_len: usize) -> Vec<Word> {
    let n = r.gen_range(1..=max_gens);
    (0..n).map(|_| random_word(r, rank, max_len)).collect()
}

/// A random member of `Sub(G)` on the surface.
pub fn random_subgroup(
    r: &mut StdRng,
    s: &SurfaceStructure,
    max_gens: usize,
    max_len: usize,
) -> SubgroupClass {
    loop {
        let gens = random_gens(r, s.rank, max_gens, max_len);
        if let Ok(h) = SubgroupClass::from_generators(&gens, s) {
            return h;
        }
    }
}

/// Product of `1..=max_len` random twist generators.
pub fn random_mapping_class(r: &mut StdRng, s: &SurfaceStructure, max_len: usize) -> MappingClass {
    let gens = twist_generators(s).unwrap();
    let len = r.gen_range(1..=max_len);
    let mut m = MappingClass::identity(s.rank);
    for _ in 0..len {
        m = m.compose(&gens[r.gen_range(0..gens.len())]);
    }
    m
}

pub fn random_weight(r: &mut StdRng) -> subset_currents::Weight {
    subset_currents::Weight::new(r.gen_range(1..=12).into(), r.gen_range(1..=6).into())
}

/// Hall's recursion for the number of index-`k` subgroups of `F_n`.
pub fn hall_count(n: u32, k: usize) -> u128 {
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    let mut counts: Vec<u128> = vec![0];
    for j in 1..=k {
        let mut v = j as u128 * fact(j).pow(n - 1);
        for i in 1..j {
            v -= fact(j - i).pow(n - 1) * counts[i];
        }
        counts.push(v);
    }
    counts[k]
}

/// Brute-force isomorphism search between two labeled graphs.
///
/// Connected folded graphs are rigid once one vertex is matched, so trying
/// every image of vertex 0 is exhaustive.
pub fn brute_isomorphic(g: &CoreGraph, h: &CoreGraph) -> bool {
    let n = g.vertex_count();
    if n != h.vertex_count() || g.edge_count() != h.edge_count() || g.ambient_rank() != h.ambient_rank() {
        return false;
    }
    if n == 0 {
        return true;
    }
    let slots = 2 * g.ambient_rank();
    'start: for target in 0..n {
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        map[0] = target;
        used[target] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for s in 0..slots {
                match (g.slot(v, s), h.slot(map[v], s)) {
                    (None, None) => {}
                    (Some(a), Some(b)) => {
                        if map[a] == usize::MAX {
                            if used[b] {
                                continue 'start;
                            }
                            map[a] = b;
                            used[b] = true;
                            stack.push(a);
                        } else if map[a] != b {
                            continue 'start;
                        }
                    }
                    _ => continue 'start,
                }
            }
        }
        return true;
    }
    false
}
