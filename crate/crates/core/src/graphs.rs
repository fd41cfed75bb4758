//! Stallings core graphs.
//!
//! A finitely generated subgroup `H ≤ F_n` is encoded by a folded graph with
//! edges labeled by generators: at most one outgoing and one incoming edge per
//! label at every vertex. The loops at the basepoint spell exactly the
//! elements of `H`; forgetting the basepoint and pruning spurs gives a graph
//! that depends only on the conjugacy class of `H`.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::SurfaceStructure;
use crate::words::{conj_class, is_peripheral, Automorphism, ConjClass, Letter, Word};

const NONE: u32 = u32::MAX;

/// Largest index accepted by the low-index enumerators unless raised explicitly.
pub const DEFAULT_MAX_INDEX: usize = 8;

/// Folded labeled graph. Slots per vertex are indexed by [`Letter::slot`]:
/// slot `2g` holds the target of the outgoing `g`-edge, slot `2g + 1` the
/// source of the incoming one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoreGraph {
    rank: usize,
    adj: Vec<u32>,
    basepoint: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(k) => write!(f, "{k}"),
            Index::Infinite => write!(f, "infinite"),
        }
    }
}

impl CoreGraph {
    /// One vertex with a loop per generator: the graph of `F_n` itself.
    pub fn bouquet(rank: usize) -> CoreGraph {
        CoreGraph {
            rank,
            adj: vec![0u32; 2 * rank],
            basepoint: Some(0),
        }
    }

    /// Builds a graph from `(source, target, generator)` triples. Fails if the
    /// result is not folded.
    pub fn from_edges(
        rank: usize,
        vertex_count: usize,
        edges: &[(usize, usize, usize)],
        basepoint: Option<usize>,
    ) -> Result<CoreGraph> {
        let w = 2 * rank;
        let mut adj = vec![NONE; vertex_count * w];
        for &(s, t, g) in edges {
            if s >= vertex_count || t >= vertex_count || g >= rank {
                return Err(Error::Input(format!("edge ({s},{t},{g}) out of range")));
            }
            if adj[s * w + 2 * g] != NONE || adj[t * w + 2 * g + 1] != NONE {
                return Err(Error::Input(format!(
                    "edges are not folded at generator {}",
                    Letter::new(g, false).to_char()
                )));
            }
            adj[s * w + 2 * g] = t as u32;
            adj[t * w + 2 * g + 1] = s as u32;
        }
        if basepoint.is_some_and(|b| b >= vertex_count) {
            return Err(Error::Input("basepoint out of range".into()));
        }
        Ok(CoreGraph {
            rank,
            adj,
            basepoint,
        })
    }

    /// Rank of the ambient free group (the label alphabet).
    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        if self.rank == 0 {
            0
        } else {
            self.adj.len() / (2 * self.rank)
        }
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| (0..self.rank).filter(|&g| self.slot(v, 2 * g).is_some()).count())
            .sum()
    }

    /// Rank `E − V + 1` of the represented subgroup.
    pub fn subgroup_rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// Euler characteristic `V − E`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn with_basepoint(&self, v: usize) -> CoreGraph {
        assert!(v < self.vertex_count());
        CoreGraph {
            basepoint: Some(v),
            ..self.clone()
        }
    }

    #[inline]
    pub fn slot(&self, v: usize, slot: usize) -> Option<usize> {
        let t = self.adj[v * 2 * self.rank + slot];
        (t != NONE).then_some(t as usize)
    }

    /// Endpoint of the edge leaving `v` that reads `l`.
    #[inline]
    pub fn follow(&self, v: usize, l: Letter) -> Option<usize> {
        self.slot(v, l.slot())
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..2 * self.rank).filter(|&s| self.slot(v, s).is_some()).count()
    }

    /// Bitmask of occupied slots at `v`.
    pub fn slot_mask(&self, v: usize) -> u64 {
        (0..2 * self.rank)
            .filter(|&s| self.slot(v, s).is_some())
            .fold(0u64, |m, s| m | 1 << s)
    }

    /// Edges as `(source, target, generator)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            for g in 0..self.rank {
                if let Some(t) = self.slot(v, 2 * g) {
                    out.push((v, t, g));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for s in 0..2 * self.rank {
                if let Some(t) = self.slot(v, s) {
                    if !seen[t] {
                        seen[t] = true;
                        count += 1;
                        stack.push(t);
                    }
                }
            }
        }
        count == n
    }

    /// Every vertex has degree at least two, ignoring the basepoint.
    pub fn is_core(&self) -> bool {
        self.vertex_count() > 0
            && self.is_connected()
            && (0..self.vertex_count()).all(|v| self.degree(v) >= 2)
    }

    /// Forgets the basepoint and prunes degree-one vertices.
    pub fn core(&self) -> CoreGraph {
        CoreGraph {
            basepoint: None,
            ..self.clone()
        }
        .pruned()
    }

    /// Removes degree ≤ 1 vertices other than the basepoint until none remain.
    fn pruned(mut self) -> CoreGraph {
        let n = self.vertex_count();
        let w = 2 * self.rank;
        let mut alive = vec![true; n];
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut stack: Vec<usize> = (0..n)
            .filter(|&v| deg[v] <= 1 && Some(v) != self.basepoint)
            .collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for s in 0..w {
                let t = self.adj[v * w + s];
                if t != NONE {
                    let t = t as usize;
                    self.adj[v * w + s] = NONE;
                    if t != v {
                        self.adj[t * w + (s ^ 1)] = NONE;
                        deg[t] -= 1;
                        if deg[t] <= 1 && alive[t] && Some(t) != self.basepoint {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        if alive.iter().all(|&a| a) {
            return self;
        }
        let mut map = vec![NONE; n];
        let mut next = 0u32;
        for v in 0..n {
            if alive[v] {
                map[v] = next;
                next += 1;
            }
        }
        let mut adj = Vec::with_capacity(next as usize * w);
        for v in 0..n {
            if alive[v] {
                for s in 0..w {
                    let t = self.adj[v * w + s];
                    adj.push(if t == NONE { NONE } else { map[t as usize] });
                }
            }
        }
        CoreGraph {
            rank: self.rank,
            adj,
            basepoint: self.basepoint.map(|b| map[b] as usize),
        }
    }

    /// Renumbers vertices: old vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> CoreGraph {
        let n = self.vertex_count();
        let w = 2 * self.rank;
        let mut adj = vec![NONE; n * w];
        for v in 0..n {
            for s in 0..w {
                if let Some(t) = self.slot(v, s) {
                    adj[perm[v] * w + s] = perm[t] as u32;
                }
            }
        }
        CoreGraph {
            rank: self.rank,
            adj,
            basepoint: self.basepoint.map(|b| perm[b]),
        }
    }

    /// No two edges with the same label leave or enter any vertex, and the
    /// two slot tables agree.
    pub fn is_folded(&self) -> bool {
        for v in 0..self.vertex_count() {
            for s in 0..2 * self.rank {
                if let Some(t) = self.slot(v, s) {
                    if self.slot(t, s ^ 1) != Some(v) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// For a rank-one core graph (a single cycle), the word read once around it.
    pub fn cycle_word(&self) -> Option<Word> {
        if self.subgroup_rank() != 1 || !self.is_core() {
            return None;
        }
        let start = self.basepoint.unwrap_or(0);
        let mut letters = Vec::new();
        let mut v = start;
        let mut came_from: Option<usize> = None;
        loop {
            let s = (0..2 * self.rank)
                .find(|&s| self.slot(v, s).is_some() && Some(s) != came_from)
                .unwrap();
            letters.push(Letter::from_slot(s));
            v = self.slot(v, s).unwrap();
            came_from = Some(s ^ 1);
            if v == start {
                break;
            }
        }
        Some(Word::from_letters(letters))
    }
}

impl fmt::Debug for CoreGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoreGraph(V={}, edges=[", self.vertex_count())?;
        for (i, (s, t, g)) in self.edges().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}-{}->{t}", Letter::new(g, false).to_char())?;
        }
        write!(f, "], base={:?})", self.basepoint)
    }
}

struct Folder {
    width: usize,
    adj: Vec<u32>,
    parent: Vec<u32>,
    pending: Vec<(u32, u32)>,
}

impl Folder {
    fn new(rank: usize) -> Folder {
        let mut f = Folder {
            width: 2 * rank,
            adj: Vec::new(),
            parent: Vec::new(),
            pending: Vec::new(),
        };
        f.new_vertex();
        f
    }

    fn new_vertex(&mut self) -> u32 {
        let v = self.parent.len() as u32;
        self.parent.push(v);
        self.adj.extend(std::iter::repeat_n(NONE, self.width));
        v
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    fn get(&mut self, v: u32, slot: usize) -> Option<u32> {
        let t = self.adj[v as usize * self.width + slot];
        (t != NONE).then(|| self.find(t))
    }

    fn add_edge(&mut self, u: u32, slot: usize, v: u32) {
        let u = self.find(u);
        let v = self.find(v);
        if let Some(w) = self.get(u, slot) {
            self.pending.push((w, v));
        } else if let Some(x) = self.get(v, slot ^ 1) {
            self.pending.push((x, u));
        } else {
            self.adj[u as usize * self.width + slot] = v;
            self.adj[v as usize * self.width + (slot ^ 1)] = u;
        }
        self.settle();
    }

    fn settle(&mut self) {
        while let Some((x, y)) = self.pending.pop() {
            let x = self.find(x);
            let y = self.find(y);
            if x == y {
                continue;
            }
            self.parent[y as usize] = x;
            for s in 0..self.width {
                let z = self.adj[y as usize * self.width + s];
                if z == NONE {
                    continue;
                }
                self.adj[y as usize * self.width + s] = NONE;
                let z = self.find(z);
                match self.get(x, s) {
                    Some(w) => self.pending.push((w, z)),
                    None => self.adj[x as usize * self.width + s] = z,
                }
            }
        }
    }

    fn add_loop(&mut self, w: &Word) {
        let letters = w.letters();
        let mut cur = 0u32;
        for (i, &l) in letters.iter().enumerate() {
            if i + 1 == letters.len() {
                self.add_edge(cur, l.slot(), 0);
            } else {
                let c = self.find(cur);
                cur = match self.get(c, l.slot()) {
                    Some(t) => t,
                    None => {
                        let v = self.new_vertex();
                        self.add_edge(c, l.slot(), v);
                        v
                    }
                };
            }
        }
    }

    fn finish(mut self, rank: usize) -> CoreGraph {
        let n = self.parent.len();
        let mut map = vec![NONE; n];
        let mut next = 0u32;
        for v in 0..n as u32 {
            if self.find(v) == v {
                map[v as usize] = next;
                next += 1;
            }
        }
        let mut adj = vec![NONE; next as usize * self.width];
        for v in 0..n as u32 {
            if map[v as usize] == NONE {
                continue;
            }
            for s in 0..self.width {
                if let Some(t) = self.get(v, s) {
                    adj[map[v as usize] as usize * self.width + s] = map[t as usize];
                }
            }
        }
        let base = map[self.find(0) as usize] as usize;
        CoreGraph {
            rank,
            adj,
            basepoint: Some(base),
        }
        .pruned()
    }
}

/// Stallings graph of `⟨generators⟩ ≤ F_rank`, with basepoint.
pub fn fold(rank: usize, generators: &[Word]) -> Result<CoreGraph> {
    for g in generators {
        if g.min_rank() > rank {
            return Err(Error::Input(format!("generator {g} outside rank-{rank} alphabet")));
        }
    }
    if generators.iter().all(|g| g.is_empty()) {
        return Err(Error::TrivialSubgroup);
    }
    let mut f = Folder::new(rank);
    for g in generators.iter().filter(|g| !g.is_empty()) {
        f.add_loop(g);
    }
    let g = f.finish(rank);
    debug_assert!(g.is_folded());
    Ok(g)
}

/// Stallings membership: `w` reads a closed path at the basepoint.
pub fn contains(g: &CoreGraph, w: &Word) -> bool {
    let base = g.basepoint.unwrap_or(0);
    let mut v = base;
    for &l in w.letters() {
        match g.follow(v, l) {
            Some(t) => v = t,
            None => return false,
        }
    }
    v == base
}

/// Finite index equals the vertex count exactly when every slot is filled.
pub fn index(g: &CoreGraph) -> Index {
    if g.adj.iter().all(|&t| t != NONE) {
        Index::Finite(g.vertex_count())
    } else {
        Index::Infinite
    }
}

/// Breadth-first encoding from `start`: vertices numbered in discovery
/// order, scanning slots in letter order; then the outgoing targets of each
/// vertex in that numbering.
fn bfs_encoding(g: &CoreGraph, start: usize, out: &mut Vec<u8>, scratch: &mut Vec<u32>) {
    let n = g.vertex_count();
    let w = 2 * g.rank;
    scratch.clear();
    scratch.resize(n, NONE);
    let mut order = Vec::with_capacity(n);
    scratch[start] = 0;
    order.push(start);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for s in 0..w {
            if let Some(t) = g.slot(v, s) {
                if scratch[t] == NONE {
                    scratch[t] = order.len() as u32;
                    order.push(t);
                }
            }
        }
    }
    out.clear();
    out.push(g.rank as u8);
    out.extend_from_slice(&(n as u32).to_be_bytes());
    for &v in &order {
        for gen in 0..g.rank {
            let t = match g.slot(v, 2 * gen) {
                Some(t) => scratch[t],
                None => NONE,
            };
            out.extend_from_slice(&t.to_be_bytes());
        }
    }
}

/// Basepoint-free canonical form: equal for two connected folded graphs iff
/// they are isomorphic as labeled directed graphs.
///
/// The minimum of the breadth-first encodings is taken over the start
/// vertices whose (degree, slot mask) is maximal; that set is itself an
/// isomorphism invariant.
pub fn canonical_key(g: &CoreGraph) -> Vec<u8> {
    let n = g.vertex_count();
    let sig = |v: usize| (g.degree(v), g.slot_mask(v));
    let best_sig = (0..n).map(sig).max().unwrap_or((0, 0));
    let mut best: Option<Vec<u8>> = None;
    let mut buf = Vec::new();
    let mut scratch = Vec::new();
    for v in (0..n).filter(|&v| sig(v) == best_sig) {
        bfs_encoding(g, v, &mut buf, &mut scratch);
        if best.as_ref().is_none_or(|b| buf < *b) {
            best = Some(buf.clone());
        }
    }
    best.unwrap_or_default()
}

/// Canonical form of the basepointed graph (distinguishes subgroups, not classes).
pub fn based_key(g: &CoreGraph) -> Vec<u8> {
    let mut buf = Vec::new();
    bfs_encoding(g, g.basepoint.unwrap_or(0), &mut buf, &mut Vec::new());
    buf
}

/// Free basis of the subgroup read at the basepoint (vertex 0 if unset):
/// one word per edge outside a breadth-first spanning tree.
pub fn spanning_generators(g: &CoreGraph) -> Vec<Word> {
    let n = g.vertex_count();
    let base = g.basepoint.unwrap_or(0);
    let mut path: Vec<Option<Word>> = vec![None; n];
    // tree[v] = slot at the parent used to reach v, as (parent, slot)
    let mut tree: Vec<Option<(usize, usize)>> = vec![None; n];
    path[base] = Some(Word::identity());
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for s in 0..2 * g.rank {
            if let Some(t) = g.slot(v, s) {
                if path[t].is_none() {
                    let pv = path[v].as_ref().unwrap();
                    path[t] = Some(pv.mul(&Word::from_letters([Letter::from_slot(s)])));
                    tree[t] = Some((v, s));
                    queue.push_back(t);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (s, t, gen) in g.edges() {
        let is_tree = tree[t] == Some((s, 2 * gen)) || tree[s] == Some((t, 2 * gen + 1));
        if is_tree {
            continue;
        }
        let (Some(ps), Some(pt)) = (&path[s], &path[t]) else {
            continue;
        };
        out.push(ps.mul(&Word::generator(gen)).mul(&pt.inverse()));
    }
    out
}

/// Conjugacy class of a subgroup in `Sub(G)`: a nonempty core graph whose
/// cycle word, when cyclic, is not peripheral.
#[derive(Clone)]
pub struct SubgroupClass {
    graph: CoreGraph,
    key: Vec<u8>,
}

impl PartialEq for SubgroupClass {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for SubgroupClass {}

impl PartialOrd for SubgroupClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SubgroupClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

impl std::hash::Hash for SubgroupClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl fmt::Debug for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubgroupClass(")?;
        for (i, w) in self.generators().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

impl SubgroupClass {
    /// Validates membership in `Sub(G)` against the surface.
    pub fn new(graph: &CoreGraph, s: &SurfaceStructure) -> Result<SubgroupClass> {
        if graph.ambient_rank() != s.rank {
            return Err(Error::Input(format!(
                "graph over rank {} but surface has rank {}",
                graph.ambient_rank(),
                s.rank
            )));
        }
        let core = graph.core();
        if core.vertex_count() == 0 || core.edge_count() == 0 {
            return Err(Error::TrivialSubgroup);
        }
        if let Some(w) = core.cycle_word() {
            let c = conj_class(&w)?;
            if is_peripheral(&c, s).is_some() {
                return Err(Error::Input(format!(
                    "cyclic subgroup ⟨{c}⟩ is peripheral; its limit set is a single point"
                )));
            }
        }
        Ok(SubgroupClass::from_core_unchecked(core))
    }

    pub fn from_generators(gens: &[Word], s: &SurfaceStructure) -> Result<SubgroupClass> {
        SubgroupClass::new(&fold(s.rank, gens)?, s)
    }

    /// Class of the cyclic subgroup generated by a representative of `c`.
    pub fn cyclic(c: &ConjClass, s: &SurfaceStructure) -> Result<SubgroupClass> {
        SubgroupClass::from_generators(std::slice::from_ref(c.word()), s)
    }

    pub(crate) fn from_core_unchecked(core: CoreGraph) -> SubgroupClass {
        let key = canonical_key(&core);
        SubgroupClass { graph: core, key }
    }

    pub fn graph(&self) -> &CoreGraph {
        &self.graph
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn rank(&self) -> usize {
        self.graph.subgroup_rank()
    }

    pub fn is_cyclic(&self) -> bool {
        self.rank() == 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.graph.euler_characteristic()
    }

    pub fn index(&self) -> Index {
        index(&self.graph)
    }

    pub fn generators(&self) -> Vec<Word> {
        spanning_generators(&self.graph)
    }

    /// Image of the class under an endomorphism of the ambient group.
    pub fn map(&self, phi: &Automorphism) -> Result<SubgroupClass> {
        let images: Vec<Word> = self.generators().iter().map(|w| phi.apply(w)).collect();
        Ok(SubgroupClass::from_core_unchecked(
            fold(self.graph.ambient_rank(), &images)?.core(),
        ))
    }
}

/// Coset tables of every index-`k` subgroup of `F_rank`, one per subgroup.
///
/// Tables are built by backtracking: the first undefined entry in row-major
/// order is set either to an existing coset with a free inverse slot or to a
/// fresh coset. Each transitive permutation action with a marked point is
/// reached along exactly one branch.
fn coset_tables(rank: usize, k: usize, mut emit: impl FnMut(&[u32])) {
    let w = 2 * rank;
    let mut table = vec![NONE; k * w];
    fn rec(
        table: &mut Vec<u32>,
        w: usize,
        k: usize,
        count: usize,
        pos: usize,
        emit: &mut dyn FnMut(&[u32]),
    ) {
        let mut pos = pos;
        while pos < count * w && table[pos] != NONE {
            pos += 1;
        }
        if pos == count * w {
            if count == k {
                emit(table);
            }
            return;
        }
        let (c, s) = (pos / w, pos % w);
        for d in 0..count {
            if table[d * w + (s ^ 1)] == NONE {
                table[pos] = d as u32;
                table[d * w + (s ^ 1)] = c as u32;
                rec(table, w, k, count, pos + 1, emit);
                table[pos] = NONE;
                table[d * w + (s ^ 1)] = NONE;
            }
        }
        if count < k {
            let d = count;
            table[pos] = d as u32;
            table[d * w + (s ^ 1)] = c as u32;
            rec(table, w, k, count + 1, pos + 1, emit);
            table[pos] = NONE;
            table[d * w + (s ^ 1)] = NONE;
        }
    }
    if k == 0 || rank == 0 {
        return;
    }
    rec(&mut table, w, k, 1, 0, &mut emit);
}

fn check_index_bound(k: usize, max_k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Input("index must be at least 1".into()));
    }
    if k > max_k {
        return Err(Error::ResourceLimit(format!(
            "index {k} exceeds the configured bound {max_k}"
        )));
    }
    Ok(())
}

/// Every index-`k` subgroup of `F_rank` as a complete covering graph with
/// basepoint 0, sorted by basepointed key.
pub fn subgroups_of_index(rank: usize, k: usize) -> Result<Vec<CoreGraph>> {
    subgroups_of_index_bounded(rank, k, DEFAULT_MAX_INDEX)
}

pub fn subgroups_of_index_bounded(rank: usize, k: usize, max_k: usize) -> Result<Vec<CoreGraph>> {
    if rank == 0 {
        return Err(Error::Input("rank must be at least 1".into()));
    }
    check_index_bound(k, max_k)?;
    let mut out = Vec::new();
    coset_tables(rank, k, |t| {
        out.push(CoreGraph {
            rank,
            adj: t.to_vec(),
            basepoint: Some(0),
        })
    });
    out.sort_by_cached_key(based_key);
    Ok(out)
}

/// Number of index-`k` subgroups without materializing graphs.
pub fn count_subgroups_of_index(rank: usize, k: usize) -> usize {
    let mut n = 0;
    coset_tables(rank, k, |_| n += 1);
    n
}

/// All index-`k` subgroups of `h`, one entry per subgroup (conjugate
/// subgroups of `h` can share a class), each a `k`-sheeted cover of `h`'s graph.
pub fn finite_index_subgroups(h: &SubgroupClass, k: usize) -> Result<Vec<SubgroupClass>> {
    finite_index_subgroups_bounded(h, k, DEFAULT_MAX_INDEX)
}

pub fn finite_index_subgroups_bounded(
    h: &SubgroupClass,
    k: usize,
    max_k: usize,
) -> Result<Vec<SubgroupClass>> {
    check_index_bound(k, max_k)?;
    let basis = spanning_generators(&h.graph().with_basepoint(0));
    let r = basis.len();
    let substitute = Automorphism::new(basis, "basis");
    let ambient = h.graph().ambient_rank();
    let mut out = Vec::new();
    for cover in subgroups_of_index_bounded(r, k, max_k)? {
        let gens: Vec<Word> = spanning_generators(&cover)
            .iter()
            .map(|w| substitute.apply(w))
            .collect();
        out.push(SubgroupClass::from_core_unchecked(fold(ambient, &gens)?.core()));
    }
    out.sort();
    Ok(out)
}
