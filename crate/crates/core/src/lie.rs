//! The Lie algebra `n_Q` spanned by the paths of an acyclic quiver.
//!
//! The bracket of two paths is `x·y - y·x` where `·` is concatenation (zero
//! when the paths do not compose). At most one of the two products is nonzero,
//! so every bracket is zero or plus/minus a single path. The table stores
//! `[x_i, x_j]` for `i < j` only.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Add;

use num_traits::Zero;
use thiserror::Error;

use crate::quiver::{
    automorphism_generators, reduced_quiver, PathSeq, Quiver, QuiverError, ReducedQuiver,
};
use crate::rational::{int, one, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("both `{x}·{y}` and `{y}·{x}` are paths; the quiver has a cycle")]
    BothProductsNonzero { x: String, y: String },
    #[error("Jacobi identity fails on ({x}, {y}, {z})")]
    JacobiFailure { x: String, y: String, z: String },
    #[error("[n^{i}, n^{j}] != n^{}: {witness}", .i + .j)]
    GradedBracketFailure { i: usize, j: usize, witness: String },
    #[error("nice basis violation: {0}")]
    NiceBasisViolation(String),
    #[error("descending central series mismatch at C^{0}")]
    CentralSeriesMismatch(usize),
    #[error("extension hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("extended map is not a derivation of the parent algebra")]
    ExtensionNotDerivation,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `±x_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BracketEntry {
    pub index: usize,
    pub sign: Sign,
}

/// `x·y`: the concatenation when `t(x) = s(y)`, otherwise zero.
pub fn concat_product(q: &Quiver, x: &PathSeq, y: &PathSeq) -> Option<PathSeq> {
    (q.path_target(x) == q.path_source(y)).then(|| x.concat(y))
}

/// `[x, y] = x·y - y·x` as a signed path, or `None` for zero.
pub fn bracket(q: &Quiver, x: &PathSeq, y: &PathSeq) -> Result<Option<(Sign, PathSeq)>, LieError> {
    match (concat_product(q, x, y), concat_product(q, y, x)) {
        (Some(_), Some(_)) => Err(LieError::BothProductsNonzero { x: q.path_name(x), y: q.path_name(y) }),
        (Some(xy), None) => Ok(Some((Sign::Plus, xy))),
        (None, Some(yx)) => Ok(Some((Sign::Minus, yx))),
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Clone)]
pub struct QuiverLieAlgebra {
    quiver: Quiver,
    basis: Vec<PathSeq>,
    index: HashMap<PathSeq, usize>,
    table: BTreeMap<(usize, usize), BracketEntry>,
    /// Row-major `[x_i, x_j]` for all ordered pairs.
    dense: Vec<Option<BracketEntry>>,
    grading: Vec<Vec<usize>>,
}

/// Builds `n_Q` and checks antisymmetry, the single-output property and the
/// Jacobi identity on every basis triple.
pub fn build_algebra(q: &Quiver) -> Result<QuiverLieAlgebra, LieError> {
    let basis = q.enumerate_paths()?;
    if basis.is_empty() {
        return Err(QuiverError::EmptyQuiver.into());
    }
    let index: HashMap<PathSeq, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let n = basis.len();
    let mut table = BTreeMap::new();
    let mut dense = vec![None; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some((sign, path)) = bracket(q, &basis[i], &basis[j])? {
                // Acyclic composable sequences are always paths.
                let k = index[&path];
                table.insert((i, j), BracketEntry { index: k, sign });
                dense[i * n + j] = Some(BracketEntry { index: k, sign });
                dense[j * n + i] = Some(BracketEntry { index: k, sign: sign.flip() });
            }
        }
    }
    let m = basis.last().map(PathSeq::len).unwrap_or(0);
    let mut grading = vec![Vec::new(); m];
    for (i, p) in basis.iter().enumerate() {
        grading[p.len() - 1].push(i);
    }
    let alg = QuiverLieAlgebra { quiver: q.clone(), basis, index, table, dense, grading };
    alg.check_jacobi()?;
    Ok(alg)
}

impl QuiverLieAlgebra {
    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PathSeq] {
        &self.basis
    }

    pub fn path(&self, i: usize) -> &PathSeq {
        &self.basis[i]
    }

    pub fn index_of(&self, path: &PathSeq) -> Option<usize> {
        self.index.get(path).copied()
    }

    pub fn name(&self, i: usize) -> String {
        self.quiver.path_name(&self.basis[i])
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.name(i)).collect()
    }

    /// Length of the basis path `x_i`.
    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].len()
    }

    /// Nonzero brackets `[x_i, x_j]`, `i < j`.
    pub fn table(&self) -> &BTreeMap<(usize, usize), BracketEntry> {
        &self.table
    }

    /// `[x_i, x_j]` for any ordered pair.
    pub fn bracket_of(&self, i: usize, j: usize) -> Option<BracketEntry> {
        self.dense[i * self.dim() + j]
    }

    /// Index sets of `n^1, n^2, ..., n^m`.
    pub fn grading(&self) -> &[Vec<usize>] {
        &self.grading
    }

    pub fn grading_dims(&self) -> Vec<usize> {
        self.grading.iter().map(Vec::len).collect()
    }

    /// Length of the longest basis path.
    pub fn max_degree(&self) -> usize {
        self.grading.len()
    }

    /// Checks the Jacobi identity on every triple of basis paths.
    pub fn check_jacobi(&self) -> Result<(), LieError> {
        let n = self.dim();
        let mut terms: Vec<(usize, i64)> = Vec::with_capacity(3);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    terms.clear();
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        if let Some(ab) = self.bracket_of(a, b) {
                            if let Some(abc) = self.bracket_of(ab.index, c) {
                                terms.push((abc.index, ab.sign.value() * abc.sign.value()));
                            }
                        }
                    }
                    let mut sums: BTreeMap<usize, i64> = BTreeMap::new();
                    for &(idx, s) in &terms {
                        *sums.entry(idx).or_default() += s;
                    }
                    if sums.values().any(|&s| s != 0) {
                        return Err(LieError::JacobiFailure { x: self.name(i), y: self.name(j), z: self.name(k) });
                    }
                }
            }
        }
        Ok(())
    }

    /// `C^0 = n`, `C^k = [C^(k-1), n]`, as index sets, until zero.
    ///
    /// Brackets of basis vectors are signed basis vectors, so each term of the
    /// series is a coordinate subspace.
    pub fn central_series(&self) -> Vec<BTreeSet<usize>> {
        let n = self.dim();
        let mut series = vec![(0..n).collect::<BTreeSet<usize>>()];
        loop {
            let last = series.last().unwrap();
            let next: BTreeSet<usize> = last
                .iter()
                .flat_map(|&i| (0..n).filter_map(move |j| self.bracket_of(i, j)).map(|e| e.index))
                .collect();
            let done = next.is_empty();
            series.push(next);
            if done {
                return series;
            }
        }
    }

    /// The diagonal map sending each path to its length.
    pub fn length_grading(&self) -> DiagonalMap {
        DiagonalMap::new(self.basis.iter().map(|p| int(p.len() as i64)).collect())
    }

    /// The reduced quiver, its algebra and the basis embedding `n' → n_Q`.
    pub fn reduce(&self) -> Result<AlgebraReduction, LieError> {
        let reduced = reduced_quiver(&self.quiver)?;
        let algebra = build_algebra(&reduced.quiver)?;
        let embedding = algebra
            .basis()
            .iter()
            .map(|p| self.index_of(&reduced.embed(p)).expect("reduced path flattens into the parent"))
            .collect();
        Ok(AlgebraReduction { reduced, algebra, embedding })
    }
}

/// `n' = n_{Q'}` sitting inside `n_Q` as an ideal.
#[derive(Debug, Clone)]
pub struct AlgebraReduction {
    pub reduced: ReducedQuiver,
    pub algebra: QuiverLieAlgebra,
    /// Parent basis index of each reduced basis path.
    pub embedding: Vec<usize>,
}

/// The step `s` with `C^(s-1) ≠ 0` and `C^s = 0`. Also checks that `C^k` is
/// spanned by the paths of length at least `k + 1`.
pub fn nilpotency_step(alg: &QuiverLieAlgebra) -> Result<usize, LieError> {
    let series = alg.central_series();
    for (k, term) in series.iter().enumerate() {
        let expected: BTreeSet<usize> = (0..alg.dim()).filter(|&i| alg.degree(i) > k).collect();
        if *term != expected {
            return Err(LieError::CentralSeriesMismatch(k));
        }
    }
    Ok(series.len() - 1)
}

/// Checks `[n^i, n^j] = n^(i+j)` for all `i, j ≥ 1`, including `i + j > m`
/// where both sides vanish. The reverse inclusion is witnessed by splitting
/// each path of length `i + j` after its first `i` arrows.
pub fn check_graded_bracket(alg: &QuiverLieAlgebra) -> Result<(), LieError> {
    let m = alg.max_degree();
    for i in 1..=m {
        for j in 1..=m {
            let mut image = BTreeSet::new();
            for &x in &alg.grading[i - 1] {
                for &y in &alg.grading[j - 1] {
                    if let Some(e) = alg.bracket_of(x, y) {
                        image.insert(e.index);
                    }
                }
            }
            let target: BTreeSet<usize> = alg.grading.get(i + j - 1).map(|g| g.iter().copied().collect()).unwrap_or_default();
            if let Some(&stray) = image.difference(&target).next() {
                return Err(LieError::GradedBracketFailure { i, j, witness: format!("bracket lands on {}", alg.name(stray)) });
            }
            for &z in &target {
                let witnessed = alg.path(z).split_at(i).and_then(|(x, y)| {
                    let (xi, yi) = (alg.index_of(&x)?, alg.index_of(&y)?);
                    (alg.bracket_of(xi, yi) == Some(BracketEntry { index: z, sign: Sign::Plus })).then_some(())
                });
                if witnessed.is_none() || !image.contains(&z) {
                    return Err(LieError::GradedBracketFailure { i, j, witness: format!("{} not reached", alg.name(z)) });
                }
            }
        }
    }
    Ok(())
}

/// Checks both nice-basis conditions on the full structure constants
/// `c_ij^k`: at most one output `k` per `(i, j)` and at most one partner `j`
/// per `(i, k)`.
pub fn is_nice_basis(alg: &QuiverLieAlgebra) -> Result<(), LieError> {
    let n = alg.dim();
    let mut partners: HashMap<(usize, usize), usize> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            let outputs: Vec<usize> = alg.bracket_of(i, j).into_iter().map(|e| e.index).collect();
            if outputs.len() > 1 {
                return Err(LieError::NiceBasisViolation(format!("[{}, {}] has several outputs", alg.name(i), alg.name(j))));
            }
            for k in outputs {
                if let Some(&other) = partners.get(&(i, k)) {
                    return Err(LieError::NiceBasisViolation(format!(
                        "[{}, {}] and [{}, {}] both hit {}",
                        alg.name(i),
                        alg.name(other),
                        alg.name(i),
                        alg.name(j),
                        alg.name(k)
                    )));
                }
                partners.insert((i, k), j);
            }
        }
    }
    Ok(())
}

/// A linear map acting diagonally on the path basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalMap {
    entries: Vec<Rational>,
}

impl DiagonalMap {
    pub fn new(entries: Vec<Rational>) -> Self {
        Self { entries }
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: vec![one(); n] }
    }

    pub fn zero(n: usize) -> Self {
        Self { entries: vec![Rational::zero(); n] }
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Add for &DiagonalMap {
    type Output = DiagonalMap;

    fn add(self, rhs: &DiagonalMap) -> DiagonalMap {
        assert_eq!(self.len(), rhs.len(), "diagonal maps of different dimension");
        DiagonalMap::new(self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect())
    }
}

/// A diagonal map is a derivation iff `d_k = d_i + d_j` whenever
/// `[x_i, x_j] = ±x_k`.
pub fn is_derivation(alg: &QuiverLieAlgebra, d: &DiagonalMap) -> bool {
    d.len() == alg.dim()
        && alg
            .table()
            .iter()
            .all(|(&(i, j), e)| d.entries[e.index] == &d.entries[i] + &d.entries[j])
}

/// Checks that `d` is constant on the orbits of every generator of `Aut(Q)`
/// acting on paths, which for diagonal maps is commuting with `Aut(Q)`.
pub fn commutes_with_automorphisms(alg: &QuiverLieAlgebra, d: &DiagonalMap) -> Result<(), String> {
    for f in automorphism_generators(alg.quiver()) {
        for (i, p) in alg.basis().iter().enumerate() {
            let image = alg.index_of(&f.apply(p)).expect("automorphisms map paths to paths");
            if d.entries[i] != d.entries[image] {
                return Err(format!(
                    "{} and its image {} under {} carry different eigenvalues",
                    alg.name(i),
                    alg.name(image),
                    f.display(alg.quiver())
                ));
            }
        }
    }
    Ok(())
}

/// Extends a diagonal derivation of `n'` to `n_Q` by zero on the starting
/// set.
pub fn extend_derivation(
    parent: &QuiverLieAlgebra,
    reduction: &AlgebraReduction,
    d_prime: &DiagonalMap,
) -> Result<DiagonalMap, LieError> {
    let reduced = &reduction.algebra;
    if d_prime.len() != reduced.dim() {
        return Err(LieError::DimensionMismatch { expected: reduced.dim(), found: d_prime.len() });
    }
    if !is_derivation(reduced, d_prime) {
        return Err(LieError::HypothesisViolated("map is not a derivation of the reduced algebra".into()));
    }
    commutes_with_automorphisms(reduced, d_prime).map_err(LieError::HypothesisViolated)?;
    let mut entries = vec![Rational::zero(); parent.dim()];
    for (k, &i) in reduction.embedding.iter().enumerate() {
        entries[i] = d_prime.get(k).clone();
    }
    let extended = DiagonalMap::new(entries);
    if !is_derivation(parent, &extended) {
        return Err(LieError::ExtensionNotDerivation);
    }
    Ok(extended)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::automorphisms;
    use crate::rational::rat;

    fn chain() -> Quiver {
        Quiver::from_arrows([("a", "v1", "v2"), ("b", "v2", "v3")]).unwrap()
    }

    fn fork() -> Quiver {
        Quiver::from_arrows([("a", "v1", "v3"), ("b", "v2", "v3"), ("c", "v3", "v4"), ("d", "v4", "v5")]).unwrap()
    }

    fn path(q: &Quiver, name: &str) -> PathSeq {
        q.parse_path(name).unwrap()
    }

    #[test]
    fn concatenation_products() {
        let q = chain();
        let (a, b) = (path(&q, "a"), path(&q, "b"));
        assert_eq!(concat_product(&q, &a, &b), Some(path(&q, "a.b")));
        assert_eq!(concat_product(&q, &b, &a), None);
        assert_eq!(concat_product(&q, &a, &a), None);
    }

    #[test]
    fn brackets_from_examples() {
        let q = chain();
        assert_eq!(bracket(&q, &path(&q, "a"), &path(&q, "b")).unwrap(), Some((Sign::Plus, path(&q, "a.b"))));
        assert_eq!(bracket(&q, &path(&q, "b"), &path(&q, "a.b")).unwrap(), None);
        assert_eq!(bracket(&q, &path(&q, "a"), &path(&q, "a.b")).unwrap(), None);
        let q = fork();
        assert_eq!(bracket(&q, &path(&q, "a"), &path(&q, "c")).unwrap(), Some((Sign::Plus, path(&q, "a.c"))));
        assert_eq!(bracket(&q, &path(&q, "c"), &path(&q, "a")).unwrap(), Some((Sign::Minus, path(&q, "a.c"))));
    }

    #[test]
    fn both_products_signal_a_cycle() {
        let q = Quiver::from_arrows([("a", "v1", "v2"), ("b", "v2", "v1")]).unwrap();
        let err = bracket(&q, &PathSeq::arrow(0), &PathSeq::arrow(1)).unwrap_err();
        assert!(matches!(err, LieError::BothProductsNonzero { .. }));
        assert!(build_algebra(&q).is_err());
    }

    #[test]
    fn heisenberg_from_chain() {
        let alg = build_algebra(&chain()).unwrap();
        assert_eq!(alg.dim(), 3);
        assert_eq!(alg.table().len(), 1);
        assert_eq!(alg.table()[&(0, 1)], BracketEntry { index: 2, sign: Sign::Plus });
        assert_eq!(nilpotency_step(&alg).unwrap(), 2);
        check_graded_bracket(&alg).unwrap();
        is_nice_basis(&alg).unwrap();
    }

    #[test]
    fn fork_grading_and_step() {
        let alg = build_algebra(&fork()).unwrap();
        assert_eq!(alg.names(), ["a", "b", "c", "d", "a.c", "b.c", "c.d", "a.c.d", "b.c.d"]);
        assert_eq!(alg.grading_dims(), [4, 3, 2]);
        assert_eq!(nilpotency_step(&alg).unwrap(), 3);
        check_graded_bracket(&alg).unwrap();
        is_nice_basis(&alg).unwrap();
    }

    #[test]
    fn abelian_step_one() {
        let q = Quiver::from_arrows([("a", "u1", "u2"), ("b", "w1", "w2")]).unwrap();
        let alg = build_algebra(&q).unwrap();
        assert_eq!(nilpotency_step(&alg).unwrap(), 1);
        assert!(alg.table().is_empty());
        assert!(matches!(build_algebra(&Quiver::empty()), Err(LieError::Quiver(QuiverError::EmptyQuiver))));
    }

    #[test]
    fn derivation_checks() {
        let alg = build_algebra(&chain()).unwrap();
        assert!(!is_derivation(&alg, &DiagonalMap::identity(3)));
        assert!(is_derivation(&alg, &alg.length_grading()));
        assert!(is_derivation(&alg, &DiagonalMap::new(vec![rat(2, 3), rat(2, 3), rat(4, 3)])));
        assert!(!is_derivation(&alg, &DiagonalMap::identity(2)));
    }

    #[test]
    fn extends_derivations_by_zero() {
        let alg = build_algebra(&chain()).unwrap();
        let reduction = alg.reduce().unwrap();
        let ext = extend_derivation(&alg, &reduction, &DiagonalMap::identity(2)).unwrap();
        assert_eq!(ext, DiagonalMap::new(vec![int(0), int(1), int(1)]));
        let zero = extend_derivation(&alg, &reduction, &DiagonalMap::zero(2)).unwrap();
        assert_eq!(zero, DiagonalMap::zero(3));
        // b and a.b are swapped by an automorphism of the reduced quiver.
        let uneven = DiagonalMap::new(vec![int(1), int(2)]);
        assert!(matches!(extend_derivation(&alg, &reduction, &uneven), Err(LieError::HypothesisViolated(_))));
    }

    #[test]
    fn orbit_constant_but_not_a_derivation() {
        let alg = build_algebra(&fork()).unwrap();
        let reduction = alg.reduce().unwrap();
        let d = DiagonalMap::identity(reduction.algebra.dim());
        let err = extend_derivation(&alg, &reduction, &d).unwrap_err();
        assert!(matches!(err, LieError::HypothesisViolated(_)));
    }

    #[test]
    fn automorphisms_act_by_lie_automorphisms() {
        let q = Quiver::from_arrows([
            ("a", "v1", "v2"),
            ("b", "v2", "v4"),
            ("c", "v3", "v4"),
            ("d", "v3", "v4"),
            ("e", "v4", "v5"),
        ])
        .unwrap();
        let alg = build_algebra(&q).unwrap();
        for f in automorphisms(&q) {
            let image = |i: usize| alg.index_of(&f.apply(alg.path(i))).unwrap();
            for i in 0..alg.dim() {
                for j in 0..alg.dim() {
                    let mapped = alg.bracket_of(i, j).map(|e| BracketEntry { index: image(e.index), sign: e.sign });
                    assert_eq!(alg.bracket_of(image(i), image(j)), mapped);
                }
            }
        }
    }
}
