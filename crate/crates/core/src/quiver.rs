//! Finite quivers and their combinatorics.
//!
//! A [`Quiver`] is a set of vertices and an ordered list of named arrows. Paths
//! are nonempty composable arrow sequences ([`PathSeq`]). For acyclic quivers
//! this module enumerates all paths in canonical order (length first, then
//! lexicographic in arrow declaration index), computes the starting set and
//! the reduced quiver obtained by composing starting arrows with their
//! successors, partitions the paths accordingly, and enumerates arrow
//! automorphisms.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

/// Separator between arrow names in path names and composite arrow names.
pub const PATH_SEPARATOR: char = '.';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("quiver contains a cycle: {}", .0.join(" "))]
    CycleFound(Vec<String>),
    #[error("duplicate {kind} identifier `{name}`")]
    DuplicateIdentifier { kind: &'static str, name: String },
    #[error("arrow `{arrow}` refers to undeclared vertex `{vertex}`")]
    DanglingEndpoint { arrow: String, vertex: String },
    #[error("quiver has no arrows")]
    EmptyQuiver,
    #[error("quiver has length one, so there is nothing to reduce")]
    LengthOne,
    #[error("arrow `{arrow}` does not compose with path `{path}`")]
    NotComposable { arrow: String, path: String },
    #[error("reduction postcondition failed: {0}")]
    ReductionMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite quiver. Vertices and arrows are addressed by their index.
///
/// Equality compares the vertex *set* and the ordered arrow list by name, so
/// a quiver equals its text round trip regardless of where isolated vertices
/// were declared.
#[derive(Debug, Clone, Default)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        let own: BTreeSet<&str> = self.vertices.iter().map(String::as_str).collect();
        let theirs: BTreeSet<&str> = other.vertices.iter().map(String::as_str).collect();
        own == theirs
            && self.arrows.len() == other.arrows.len()
            && self.arrows.iter().zip(&other.arrows).all(|(a, b)| {
                a.name == b.name
                    && self.vertices[a.source] == other.vertices[b.source]
                    && self.vertices[a.target] == other.vertices[b.target]
            })
    }
}

impl Eq for Quiver {}

impl Quiver {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a quiver from explicit vertices and `(name, source, target)` arrows.
    pub fn new<V, A, S, T>(
        vertices: impl IntoIterator<Item = V>,
        arrows: impl IntoIterator<Item = (A, S, T)>,
    ) -> Result<Self, QuiverError>
    where
        V: Into<String>,
        A: Into<String>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut quiver = Self::empty();
        let mut vertex_ids = HashMap::new();
        for v in vertices {
            let v = v.into();
            if vertex_ids.contains_key(&v) {
                return Err(QuiverError::DuplicateIdentifier { kind: "vertex", name: v });
            }
            vertex_ids.insert(v.clone(), quiver.vertices.len());
            quiver.vertices.push(v);
        }
        let mut arrow_names = HashSet::new();
        for (name, source, target) in arrows {
            let (name, source, target) = (name.into(), source.into(), target.into());
            if !arrow_names.insert(name.clone()) {
                return Err(QuiverError::DuplicateIdentifier { kind: "arrow", name });
            }
            let lookup = |v: &String| {
                vertex_ids.get(v).copied().ok_or_else(|| QuiverError::DanglingEndpoint {
                    arrow: name.clone(),
                    vertex: v.clone(),
                })
            };
            let (source, target) = (lookup(&source)?, lookup(&target)?);
            quiver.arrows.push(Arrow { name, source, target });
        }
        Ok(quiver)
    }

    /// Builds a quiver whose vertices are the arrow endpoints, in order of
    /// first appearance.
    pub fn from_arrows<A, S, T>(arrows: impl IntoIterator<Item = (A, S, T)>) -> Result<Self, QuiverError>
    where
        A: Into<String>,
        S: Into<String>,
        T: Into<String>,
    {
        let arrows: Vec<(String, String, String)> = arrows
            .into_iter()
            .map(|(a, s, t)| (a.into(), s.into(), t.into()))
            .collect();
        let mut vertices: Vec<String> = Vec::new();
        for (_, s, t) in &arrows {
            for v in [s, t] {
                if !vertices.contains(v) {
                    vertices.push(v.clone());
                }
            }
        }
        Self::new(vertices, arrows)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, index: usize) -> &Arrow {
        &self.arrows[index]
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn vertex_name(&self, index: usize) -> &str {
        &self.vertices[index]
    }

    pub fn is_isolated(&self, vertex: usize) -> bool {
        !self.arrows.iter().any(|a| a.source == vertex || a.target == vertex)
    }

    /// `t(x) = s(y)` for arrows `x`, `y`.
    pub fn composable(&self, x: usize, y: usize) -> bool {
        self.arrows[x].target == self.arrows[y].source
    }

    pub fn path_source(&self, path: &PathSeq) -> usize {
        self.arrows[path.first()].source
    }

    pub fn path_target(&self, path: &PathSeq) -> usize {
        self.arrows[path.last()].target
    }

    pub fn is_path(&self, arrows: &[usize]) -> bool {
        !arrows.is_empty()
            && arrows.iter().all(|&a| a < self.arrows.len())
            && arrows.windows(2).all(|w| self.composable(w[0], w[1]))
    }

    /// Arrow names joined by `.`.
    pub fn path_name(&self, path: &PathSeq) -> String {
        let names: Vec<&str> = path.arrows().iter().map(|&a| self.arrows[a].name.as_str()).collect();
        names.join(&PATH_SEPARATOR.to_string())
    }

    /// Inverse of [`Quiver::path_name`] for quivers whose arrow names contain
    /// no separator.
    pub fn parse_path(&self, name: &str) -> Option<PathSeq> {
        let arrows = name
            .split(PATH_SEPARATOR)
            .map(|token| self.arrow_index(token.trim()))
            .collect::<Option<Vec<_>>>()?;
        self.is_path(&arrows).then_some(PathSeq(arrows))
    }

    /// Checks that the quiver has no directed cycle. Loops are cycles of
    /// length one. The witness lists the arrows of one cycle in order.
    pub fn validate(&self) -> Result<(), QuiverError> {
        let mut outgoing = vec![Vec::new(); self.vertices.len()];
        for (i, a) in self.arrows.iter().enumerate() {
            outgoing[a.source].push(i);
        }
        let mut dfs = CycleSearch {
            outgoing: &outgoing,
            arrows: &self.arrows,
            state: vec![Visit::New; self.vertices.len()],
            stack_vertices: Vec::new(),
            stack_arrows: Vec::new(),
        };
        for v in 0..self.vertices.len() {
            if dfs.state[v] == Visit::New {
                if let Some(cycle) = dfs.visit(v) {
                    let names = cycle.into_iter().map(|a| self.arrows[a].name.clone()).collect();
                    return Err(QuiverError::CycleFound(names));
                }
            }
        }
        Ok(())
    }

    /// All paths of length ≥ 1 in canonical order.
    pub fn enumerate_paths(&self) -> Result<Vec<PathSeq>, QuiverError> {
        self.validate()?;
        let mut outgoing = vec![Vec::new(); self.vertices.len()];
        for (i, a) in self.arrows.iter().enumerate() {
            outgoing[a.source].push(i);
        }
        let mut all: Vec<PathSeq> = Vec::new();
        let mut layer: Vec<PathSeq> = (0..self.arrows.len()).map(PathSeq::arrow).collect();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for p in &layer {
                for &a in &outgoing[self.path_target(p)] {
                    let mut arrows = p.0.clone();
                    arrows.push(a);
                    next.push(PathSeq(arrows));
                }
            }
            all.append(&mut layer);
            layer = next;
        }
        Ok(all)
    }

    /// Length of the longest path.
    pub fn length(&self) -> Result<usize, QuiverError> {
        let paths = self.enumerate_paths()?;
        paths.last().map(PathSeq::len).ok_or(QuiverError::EmptyQuiver)
    }

    /// Arrows that begin a path of maximal length, sorted by index.
    ///
    /// For a quiver of length one every arrow is a maximal path, so the
    /// starting set is the whole arrow set. The reduction never uses that case.
    pub fn starting_set(&self) -> Result<Vec<usize>, QuiverError> {
        let paths = self.enumerate_paths()?;
        let m = paths.last().map(PathSeq::len).ok_or(QuiverError::EmptyQuiver)?;
        let set: BTreeSet<usize> = paths.iter().filter(|p| p.len() == m).map(PathSeq::first).collect();
        Ok(set.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Visit {
    New,
    Active,
    Done,
}

struct CycleSearch<'a> {
    outgoing: &'a [Vec<usize>],
    arrows: &'a [Arrow],
    state: Vec<Visit>,
    stack_vertices: Vec<usize>,
    stack_arrows: Vec<usize>,
}

impl CycleSearch<'_> {
    fn visit(&mut self, v: usize) -> Option<Vec<usize>> {
        self.state[v] = Visit::Active;
        self.stack_vertices.push(v);
        for &a in &self.outgoing[v] {
            let w = self.arrows[a].target;
            match self.state[w] {
                Visit::Active => {
                    let start = self.stack_vertices.iter().position(|&u| u == w).unwrap();
                    let mut cycle = self.stack_arrows[start..].to_vec();
                    cycle.push(a);
                    return Some(cycle);
                }
                Visit::New => {
                    self.stack_arrows.push(a);
                    if let Some(cycle) = self.visit(w) {
                        return Some(cycle);
                    }
                    self.stack_arrows.pop();
                }
                Visit::Done => {}
            }
        }
        self.stack_vertices.pop();
        self.state[v] = Visit::Done;
        None
    }
}

/// A nonempty sequence of arrow indices.
///
/// Ordering is canonical: shorter paths first, then lexicographic by arrow
/// index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathSeq(Vec<usize>);

impl PathSeq {
    pub fn new(arrows: Vec<usize>) -> Option<Self> {
        (!arrows.is_empty()).then_some(Self(arrows))
    }

    pub fn arrow(a: usize) -> Self {
        Self(vec![a])
    }

    pub fn arrows(&self) -> &[usize] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    pub fn concat(&self, other: &PathSeq) -> PathSeq {
        let mut arrows = self.0.clone();
        arrows.extend_from_slice(&other.0);
        PathSeq(arrows)
    }

    /// Splits into a prefix of `at` arrows and the rest. Both parts must be
    /// nonempty.
    pub fn split_at(&self, at: usize) -> Option<(PathSeq, PathSeq)> {
        (at > 0 && at < self.0.len()).then(|| (PathSeq(self.0[..at].to_vec()), PathSeq(self.0[at..].to_vec())))
    }
}

impl Ord for PathSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for PathSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The quiver `Q'` on the same vertices whose arrows are the non-starting
/// arrows followed by all composites `a·b` with `a` in the starting set.
#[derive(Debug, Clone)]
pub struct ReducedQuiver {
    pub quiver: Quiver,
    /// For each arrow of `Q'`, the path of the parent quiver it stands for.
    pub origin: Vec<PathSeq>,
    /// Starting set of the parent quiver.
    pub starting_set: Vec<usize>,
}

impl ReducedQuiver {
    /// Flattens a path of `Q'` into the parent quiver.
    pub fn embed(&self, path: &PathSeq) -> PathSeq {
        PathSeq(path.arrows().iter().flat_map(|&a| self.origin[a].arrows().iter().copied()).collect())
    }

    /// The arrow of `Q'` standing for the given parent path, if any.
    pub fn arrow_for(&self, parent_path: &PathSeq) -> Option<usize> {
        self.origin.iter().position(|p| p == parent_path)
    }
}

pub fn reduced_quiver(q: &Quiver) -> Result<ReducedQuiver, QuiverError> {
    let paths = q.enumerate_paths()?;
    let m = paths.last().map(PathSeq::len).ok_or(QuiverError::EmptyQuiver)?;
    if m == 1 {
        return Err(QuiverError::LengthOne);
    }
    let starting_set = q.starting_set()?;
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    let mut origin = Vec::new();
    for (i, a) in q.arrows().iter().enumerate() {
        if starting_set.binary_search(&i).is_err() {
            arrows.push((a.name.clone(), q.vertex_name(a.source).into(), q.vertex_name(a.target).into()));
            origin.push(PathSeq::arrow(i));
        }
    }
    // Length-2 paths are already in canonical (lexicographic) order.
    for p in paths.iter().filter(|p| p.len() == 2 && starting_set.binary_search(&p.first()).is_ok()) {
        let name = q.path_name(p);
        arrows.push((name, q.vertex_name(q.path_source(p)).into(), q.vertex_name(q.path_target(p)).into()));
        origin.push(p.clone());
    }
    let quiver = Quiver::new(q.vertices().iter().cloned(), arrows)?;
    let reduced = ReducedQuiver { quiver, origin, starting_set };
    check_reduction(q, &reduced)?;
    Ok(reduced)
}

/// Checks `Path(Q) = S ⊔ Path(Q')` after flattening and `length(Q') = length(Q) - 1`.
pub fn check_reduction(q: &Quiver, reduced: &ReducedQuiver) -> Result<(), QuiverError> {
    let parent: Vec<PathSeq> = q.enumerate_paths()?;
    let m = parent.last().map(PathSeq::len).ok_or(QuiverError::EmptyQuiver)?;
    let child = reduced.quiver.enumerate_paths()?;
    let mut union: Vec<PathSeq> = reduced.starting_set.iter().map(|&a| PathSeq::arrow(a)).collect();
    for p in &child {
        let flat = reduced.embed(p);
        if !q.is_path(flat.arrows()) {
            return Err(QuiverError::ReductionMismatch(format!(
                "`{}` does not flatten to a path",
                reduced.quiver.path_name(p)
            )));
        }
        union.push(flat);
    }
    let distinct: HashSet<&PathSeq> = union.iter().collect();
    if distinct.len() != union.len() {
        return Err(QuiverError::ReductionMismatch("starting set and reduced paths overlap".into()));
    }
    let expected: HashSet<&PathSeq> = parent.iter().collect();
    if distinct != expected {
        return Err(QuiverError::ReductionMismatch(format!(
            "{} parent paths but {} after reduction",
            parent.len(),
            union.len()
        )));
    }
    let child_length = child.last().map(PathSeq::len).unwrap_or(0);
    if child_length + 1 != m {
        return Err(QuiverError::ReductionMismatch(format!(
            "reduced length {child_length}, expected {}",
            m - 1
        )));
    }
    Ok(())
}

/// Per-target-vertex blocks of the starting-set partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexBlock {
    pub vertex: usize,
    /// `S_j`: starting arrows ending at `vertex`.
    pub starting: Vec<usize>,
    /// `P1_j`: reduced paths leaving `vertex`.
    pub p1: Vec<PathSeq>,
    /// `P2_j`: products `a·y` with `a` in `S_j`, `y` in `P1_j`.
    pub p2: Vec<PathSeq>,
}

/// `Path(Q) = S ⊔ P1 ⊔ P2 ⊔ P0`, with every path expressed in the parent
/// quiver's arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverPartition {
    pub starting_set: Vec<usize>,
    pub blocks: Vec<VertexBlock>,
    pub p0: Vec<PathSeq>,
}

/// Which part of the partition a path falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionClass {
    Starting(usize),
    P1(usize),
    P2(usize),
    P0,
}

impl QuiverPartition {
    pub fn p1(&self) -> impl Iterator<Item = &PathSeq> {
        self.blocks.iter().flat_map(|b| b.p1.iter())
    }

    pub fn p2(&self) -> impl Iterator<Item = &PathSeq> {
        self.blocks.iter().flat_map(|b| b.p2.iter())
    }

    /// The block index and class of `path`, or `None` if it is not a path of
    /// the partitioned quiver.
    pub fn classify(&self, path: &PathSeq) -> Option<PartitionClass> {
        for (j, block) in self.blocks.iter().enumerate() {
            if path.len() == 1 && block.starting.contains(&path.first()) {
                return Some(PartitionClass::Starting(j));
            }
            if block.p1.contains(path) {
                return Some(PartitionClass::P1(j));
            }
            if block.p2.contains(path) {
                return Some(PartitionClass::P2(j));
            }
        }
        self.p0.contains(path).then_some(PartitionClass::P0)
    }

    /// Factors a `P2` path as `a·y` with `a` starting and `y` in `P1`.
    /// Returns `None` unless exactly one factorization exists.
    pub fn factor_p2(&self, path: &PathSeq) -> Option<(usize, PathSeq)> {
        let mut found = None;
        for block in &self.blocks {
            for &a in &block.starting {
                for y in &block.p1 {
                    if path.first() == a && path.arrows()[1..] == *y.arrows() {
                        if found.is_some() {
                            return None;
                        }
                        found = Some((a, y.clone()));
                    }
                }
            }
        }
        found
    }

    /// Disjointness, coverage of `Path(Q)` and unique factorization of `P2`.
    pub fn check(&self, q: &Quiver) -> Result<(), String> {
        let mut seen: HashSet<PathSeq> = HashSet::new();
        let mut push = |p: &PathSeq| {
            if !seen.insert(p.clone()) {
                return Err(format!("`{}` lies in two parts", q.path_name(p)));
            }
            Ok(())
        };
        for block in &self.blocks {
            for &a in &block.starting {
                push(&PathSeq::arrow(a))?;
            }
            for p in block.p1.iter().chain(&block.p2) {
                push(p)?;
            }
        }
        for p in &self.p0 {
            push(p)?;
        }
        let all: HashSet<PathSeq> = q.enumerate_paths().map_err(|e| e.to_string())?.into_iter().collect();
        if all != seen {
            return Err("partition does not cover Path(Q)".into());
        }
        let starting: BTreeSet<usize> = self.blocks.iter().flat_map(|b| b.starting.iter().copied()).collect();
        if starting.into_iter().collect::<Vec<_>>() != self.starting_set {
            return Err("blocks do not cover the starting set".into());
        }
        for p in self.p2() {
            if self.factor_p2(p).is_none() {
                return Err(format!("`{}` has no unique factorization", q.path_name(p)));
            }
        }
        for &a in &self.starting_set {
            for &b in &self.starting_set {
                if q.composable(a, b) {
                    return Err(format!("starting arrows `{}` and `{}` compose", q.arrow(a).name, q.arrow(b).name));
                }
            }
        }
        Ok(())
    }
}

pub fn partition(q: &Quiver) -> Result<QuiverPartition, QuiverError> {
    let reduced = reduced_quiver(q)?;
    partition_with(q, &reduced)
}

pub fn partition_with(q: &Quiver, reduced: &ReducedQuiver) -> Result<QuiverPartition, QuiverError> {
    let reduced_paths: Vec<PathSeq> = reduced
        .quiver
        .enumerate_paths()?
        .iter()
        .map(|p| reduced.embed(p))
        .collect();
    let mut target_vertices: Vec<usize> = Vec::new();
    for &a in &reduced.starting_set {
        let t = q.arrow(a).target;
        if !target_vertices.contains(&t) {
            target_vertices.push(t);
        }
    }
    let mut blocks = Vec::new();
    let mut covered: HashSet<PathSeq> = HashSet::new();
    for &v in &target_vertices {
        let starting: Vec<usize> = reduced.starting_set.iter().copied().filter(|&a| q.arrow(a).target == v).collect();
        let p1: Vec<PathSeq> = reduced_paths.iter().filter(|p| q.path_source(p) == v).cloned().collect();
        let mut p2: Vec<PathSeq> = Vec::new();
        for &a in &starting {
            for y in &p1 {
                p2.push(PathSeq::arrow(a).concat(y));
            }
        }
        p2.sort();
        covered.extend(p1.iter().cloned());
        covered.extend(p2.iter().cloned());
        blocks.push(VertexBlock { vertex: v, starting, p1, p2 });
    }
    let p0 = reduced_paths.into_iter().filter(|p| !covered.contains(p)).collect();
    Ok(QuiverPartition { starting_set: reduced.starting_set.clone(), blocks, p0 })
}

/// A bijection on arrow indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowPermutation {
    map: Vec<usize>,
}

impl ArrowPermutation {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    pub fn from_map(map: Vec<usize>) -> Option<Self> {
        let mut hit = vec![false; map.len()];
        for &i in &map {
            if i >= map.len() || std::mem::replace(&mut hit[i], true) {
                return None;
            }
        }
        Some(Self { map })
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Self { map }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, arrow: usize) -> usize {
        self.map[arrow]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self { map: other.map.iter().map(|&i| self.map[i]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
        }
        Self { map }
    }

    pub fn apply(&self, path: &PathSeq) -> PathSeq {
        PathSeq(path.arrows().iter().map(|&a| self.map[a]).collect())
    }

    /// `t(x) = s(y) ⟺ t(f x) = s(f y)` for all arrows.
    pub fn is_automorphism_of(&self, q: &Quiver) -> bool {
        let n = q.arrow_count();
        self.map.len() == n
            && (0..n).all(|x| (0..n).all(|y| q.composable(x, y) == q.composable(self.map[x], self.map[y])))
    }

    /// Nontrivial cycles, each starting at its smallest arrow.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.map.len()];
        let mut out = Vec::new();
        for start in 0..self.map.len() {
            if seen[start] || self.map[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.map[i];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle notation with arrow names, `id` for the identity.
    pub fn display<'a>(&'a self, q: &'a Quiver) -> impl fmt::Display + 'a {
        DisplayPermutation { perm: self, quiver: q }
    }
}

struct DisplayPermutation<'a> {
    perm: &'a ArrowPermutation,
    quiver: &'a Quiver,
}

impl fmt::Display for DisplayPermutation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.perm.cycles();
        if cycles.is_empty() {
            return f.write_str("id");
        }
        for cycle in cycles {
            let names: Vec<&str> = cycle.iter().map(|&a| self.quiver.arrow(a).name.as_str()).collect();
            write!(f, "({})", names.join(" "))?;
        }
        Ok(())
    }
}

pub fn apply_automorphism(f: &ArrowPermutation, x: &PathSeq) -> PathSeq {
    f.apply(x)
}

/// `adj[x][y]` iff arrow `x` is followed by arrow `y`.
pub fn composability_matrix(q: &Quiver) -> Vec<Vec<bool>> {
    let n = q.arrow_count();
    (0..n).map(|x| (0..n).map(|y| q.composable(x, y)).collect()).collect()
}

/// All automorphisms of the composability digraph on arrows, identity first,
/// in lexicographic order of their arrow maps.
pub fn automorphisms(q: &Quiver) -> Vec<ArrowPermutation> {
    let adj = composability_matrix(q);
    let colors = vec![0; adj.len()];
    let mut out: Vec<ArrowPermutation> = search_automorphisms(&adj, &colors)
        .into_iter()
        .map(|map| ArrowPermutation { map })
        .collect();
    out.sort();
    out
}

/// Groups arrows with identical predecessor and successor sets. Any
/// permutation inside a group is an automorphism.
fn twin_classes(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let column = |x: usize| -> Vec<bool> { (0..n).map(|z| adj[z][x]).collect() };
    for x in 0..n {
        let found = classes
            .iter_mut()
            .find(|c| adj[c[0]] == adj[x] && column(c[0]) == column(x));
        match found {
            Some(class) => class.push(x),
            None => classes.push(vec![x]),
        }
    }
    classes
}

/// A generating set of the automorphism group (without the identity).
///
/// The group is the product of the symmetric groups on twin classes extended
/// by the size-preserving automorphisms of the quotient digraph, so adjacent
/// transpositions inside each class plus the lifts of the quotient
/// automorphisms generate it.
pub fn automorphism_generators(q: &Quiver) -> Vec<ArrowPermutation> {
    let adj = composability_matrix(q);
    let n = adj.len();
    let classes = twin_classes(&adj);
    let mut generators = Vec::new();
    for class in &classes {
        for pair in class.windows(2) {
            generators.push(ArrowPermutation::transposition(n, pair[0], pair[1]));
        }
    }
    for lift in quotient_automorphisms(&adj, &classes) {
        let mut map = vec![0; n];
        for (c, class) in classes.iter().enumerate() {
            for (k, &x) in class.iter().enumerate() {
                map[x] = classes[lift[c]][k];
            }
        }
        let perm = ArrowPermutation { map };
        if !perm.is_identity() {
            generators.push(perm);
        }
    }
    generators
}

fn quotient_automorphisms(adj: &[Vec<bool>], classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let quotient: Vec<Vec<bool>> = classes
        .iter()
        .map(|a| classes.iter().map(|b| adj[a[0]][b[0]]).collect())
        .collect();
    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    search_automorphisms(&quotient, &sizes)
}

/// `|Aut(Q)|` from the twin-class decomposition, without enumerating.
pub fn automorphism_group_order(q: &Quiver) -> BigUint {
    let adj = composability_matrix(q);
    let classes = twin_classes(&adj);
    let mut order = BigUint::from(quotient_automorphisms(&adj, &classes).len());
    for class in &classes {
        for k in 2..=class.len() {
            order *= BigUint::from(k);
        }
    }
    if order == BigUint::from(0u8) {
        order = BigUint::one();
    }
    order
}

/// Backtracking over color-preserving bijections of a digraph, pruned by
/// in/out degree and adjacency to already-mapped nodes.
fn search_automorphisms(adj: &[Vec<bool>], colors: &[usize]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let out_degree: Vec<usize> = adj.iter().map(|row| row.iter().filter(|&&b| b).count()).collect();
    let in_degree: Vec<usize> = (0..n).map(|y| (0..n).filter(|&x| adj[x][y]).count()).collect();
    let signature = |x: usize| (colors[x], out_degree[x], in_degree[x], adj[x][x]);

    struct State<'a> {
        adj: &'a [Vec<bool>],
        candidates: Vec<Vec<usize>>,
        map: Vec<usize>,
        used: Vec<bool>,
        found: Vec<Vec<usize>>,
    }

    fn extend(state: &mut State<'_>, i: usize) {
        let n = state.adj.len();
        if i == n {
            state.found.push(state.map.clone());
            return;
        }
        for ci in 0..state.candidates[i].len() {
            let j = state.candidates[i][ci];
            if state.used[j] {
                continue;
            }
            let consistent = (0..i).all(|k| {
                let fk = state.map[k];
                state.adj[i][k] == state.adj[j][fk] && state.adj[k][i] == state.adj[fk][j]
            });
            if !consistent {
                continue;
            }
            state.map[i] = j;
            state.used[j] = true;
            extend(state, i + 1);
            state.used[j] = false;
        }
    }

    let candidates = (0..n)
        .map(|x| (0..n).filter(|&y| signature(x) == signature(y)).collect())
        .collect();
    let mut state = State { adj, candidates, map: vec![0; n], used: vec![false; n], found: Vec::new() };
    extend(&mut state, 0);
    state.found
}

/// The involution of `Q'` exchanging `x₁` and `a·x₁`, where `x₁` is the first
/// arrow of `x`. It maps `x` to `a·x`.
pub fn swap_automorphism(
    parent: &Quiver,
    reduced: &ReducedQuiver,
    a: usize,
    x: &PathSeq,
) -> Result<ArrowPermutation, QuiverError> {
    let not_composable = || QuiverError::NotComposable {
        arrow: parent.arrow(a).name.clone(),
        path: reduced.quiver.path_name(x),
    };
    if parent.arrow(a).target != reduced.quiver.path_source(x) {
        return Err(not_composable());
    }
    let x1 = x.first();
    let composite = PathSeq::arrow(a).concat(&reduced.origin[x1]);
    let ax1 = reduced.arrow_for(&composite).ok_or_else(not_composable)?;
    Ok(ArrowPermutation::transposition(reduced.quiver.arrow_count(), x1, ax1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Quiver {
        Quiver::from_arrows([("a", "v1", "v2"), ("b", "v2", "v3")]).unwrap()
    }

    fn branching() -> Quiver {
        Quiver::from_arrows([
            ("a", "v1", "v2"),
            ("b", "v2", "v4"),
            ("c", "v3", "v4"),
            ("d", "v3", "v4"),
            ("e", "v4", "v5"),
        ])
        .unwrap()
    }

    fn names(q: &Quiver, paths: &[PathSeq]) -> Vec<String> {
        paths.iter().map(|p| q.path_name(p)).collect()
    }

    #[test]
    fn rejects_loops_and_two_cycles() {
        let loop_q = Quiver::from_arrows([("a", "v1", "v1")]).unwrap();
        assert_eq!(loop_q.validate(), Err(QuiverError::CycleFound(vec!["a".into()])));
        let two = Quiver::from_arrows([("a", "v1", "v2"), ("b", "v2", "v1")]).unwrap();
        assert_eq!(two.validate(), Err(QuiverError::CycleFound(vec!["a".into(), "b".into()])));
        assert!(branching().validate().is_ok());
        assert!(Quiver::empty().validate().is_ok());
    }

    #[test]
    fn constructor_errors() {
        let dup = Quiver::from_arrows([("a", "v1", "v2"), ("a", "v2", "v3")]);
        assert!(matches!(dup, Err(QuiverError::DuplicateIdentifier { kind: "arrow", .. })));
        let dangling = Quiver::new(["v1"], [("a", "v1", "v2")]);
        assert!(matches!(dangling, Err(QuiverError::DanglingEndpoint { .. })));
        let dup_v = Quiver::new(["v1", "v1"], Vec::<(String, String, String)>::new());
        assert!(matches!(dup_v, Err(QuiverError::DuplicateIdentifier { kind: "vertex", .. })));
    }

    #[test]
    fn enumerates_example_paths() {
        let q = branching();
        let paths = q.enumerate_paths().unwrap();
        assert_eq!(names(&q, &paths), ["a", "b", "c", "d", "e", "a.b", "b.e", "c.e", "d.e", "a.b.e"]);
        assert_eq!(q.length().unwrap(), 3);
        assert_eq!(chain().length().unwrap(), 2);
        let disjoint = Quiver::from_arrows([("a", "u1", "u2"), ("b", "w1", "w2")]).unwrap();
        assert_eq!(disjoint.enumerate_paths().unwrap().len(), 2);
        assert_eq!(disjoint.length().unwrap(), 1);
        assert_eq!(Quiver::empty().length(), Err(QuiverError::EmptyQuiver));
    }

    #[test]
    fn starting_sets() {
        assert_eq!(chain().starting_set().unwrap(), vec![0]);
        assert_eq!(branching().starting_set().unwrap(), vec![0]);
        let one = Quiver::from_arrows([("a", "v1", "v2")]).unwrap();
        assert_eq!(one.starting_set().unwrap(), vec![0]);
    }

    #[test]
    fn reduces_chain_and_branching() {
        let r = reduced_quiver(&chain()).unwrap();
        let arrow_names: Vec<&str> = r.quiver.arrows().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(arrow_names, ["b", "a.b"]);
        assert_eq!(r.quiver.length().unwrap(), 1);

        let q = branching();
        let r = reduced_quiver(&q).unwrap();
        let arrow_names: Vec<&str> = r.quiver.arrows().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(arrow_names, ["b", "c", "d", "e", "a.b"]);
        assert_eq!(r.quiver.enumerate_paths().unwrap().len(), 9);

        let one = Quiver::from_arrows([("a", "v1", "v2")]).unwrap();
        assert_eq!(reduced_quiver(&one).unwrap_err(), QuiverError::LengthOne);
    }

    #[test]
    fn partitions_branching() {
        let q = branching();
        let part = partition(&q).unwrap();
        assert_eq!(part.blocks.len(), 1);
        let block = &part.blocks[0];
        assert_eq!(q.vertex_name(block.vertex), "v2");
        assert_eq!(block.starting, vec![0]);
        assert_eq!(names(&q, &block.p1), ["b", "b.e"]);
        assert_eq!(names(&q, &block.p2), ["a.b", "a.b.e"]);
        assert_eq!(names(&q, &part.p0), ["c", "d", "e", "c.e", "d.e"]);
        part.check(&q).unwrap();

        let q = chain();
        let part = partition(&q).unwrap();
        assert_eq!(names(&q, &part.blocks[0].p1), ["b"]);
        assert_eq!(names(&q, &part.blocks[0].p2), ["a.b"]);
        assert!(part.p0.is_empty());
    }

    #[test]
    fn automorphisms_of_examples() {
        assert_eq!(automorphisms(&chain()), vec![ArrowPermutation::identity(2)]);
        let q = branching();
        let auts = automorphisms(&q);
        assert_eq!(auts.len(), 2);
        assert_eq!(auts[1].display(&q).to_string(), "(c d)");
        assert_eq!(auts[0].display(&q).to_string(), "id");
        let parallel = Quiver::from_arrows([("a1", "v1", "v2"), ("a2", "v1", "v2")]).unwrap();
        assert_eq!(automorphisms(&parallel).len(), 2);
        assert_eq!(automorphisms(&Quiver::empty()), vec![ArrowPermutation::identity(0)]);
        assert_eq!(automorphism_group_order(&q), BigUint::from(2u8));
    }

    #[test]
    fn applies_automorphisms_to_paths() {
        let q = branching();
        let swap = automorphisms(&q).pop().unwrap();
        let ce = q.parse_path("c.e").unwrap();
        assert_eq!(q.path_name(&apply_automorphism(&swap, &ce)), "d.e");
        let abe = q.parse_path("a.b.e").unwrap();
        assert_eq!(apply_automorphism(&swap, &abe), abe);
    }

    #[test]
    fn swap_automorphism_maps_x_to_ax() {
        let q = chain();
        let r = reduced_quiver(&q).unwrap();
        let b = PathSeq::arrow(r.quiver.arrow_index("b").unwrap());
        let f = swap_automorphism(&q, &r, 0, &b).unwrap();
        assert!(f.is_automorphism_of(&r.quiver));
        assert_eq!(r.quiver.path_name(&f.apply(&b)), "a.b");
        assert!(f.compose(&f).is_identity());

        let q = branching();
        let r = reduced_quiver(&q).unwrap();
        let be = PathSeq::new(vec![r.quiver.arrow_index("b").unwrap(), r.quiver.arrow_index("e").unwrap()]).unwrap();
        let f = swap_automorphism(&q, &r, 0, &be).unwrap();
        assert!(f.is_automorphism_of(&r.quiver));
        assert_eq!(r.embed(&f.apply(&be)), q.parse_path("a.b.e").unwrap());

        let e = PathSeq::arrow(r.quiver.arrow_index("e").unwrap());
        assert!(matches!(swap_automorphism(&q, &r, 0, &e), Err(QuiverError::NotComposable { .. })));
    }

    #[test]
    fn generators_agree_with_enumeration() {
        let q = Quiver::from_arrows([
            ("a1", "v1", "v2"),
            ("a2", "v1", "v2"),
            ("a3", "v1", "v2"),
            ("b", "v2", "v3"),
            ("c1", "w1", "w2"),
            ("c2", "w2", "w3"),
        ])
        .unwrap();
        let all = automorphisms(&q);
        assert_eq!(BigUint::from(all.len()), automorphism_group_order(&q));
        for g in automorphism_generators(&q) {
            assert!(g.is_automorphism_of(&q));
            assert!(all.contains(&g));
        }
    }
}
