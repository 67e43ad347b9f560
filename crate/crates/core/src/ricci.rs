//! Diagonal metrics on `n_Q` and their Ricci curvature in exact arithmetic.
//!
//! Everything is computed on the unnormalized path basis. With an orthogonal
//! basis `x_i` of squared norms `|x_i|²`, the orthonormal vectors are
//! `x_i / |x_i|`, and every inner product that enters the curvature formulas
//! is a ratio of squared norms. No square roots appear.
//!
//! Two routes are provided. [`ricci_form`] evaluates the general nilpotent
//! formula for `⟨Ric x, y⟩` on all pairs from the full structure constants.
//! [`ricci_diagonal_nice`] uses the diagonal formula valid for nice orthogonal
//! bases and only walks the bracket table. They must agree.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lie::{build_algebra, LieError, QuiverLieAlgebra, Sign};
use crate::quiver::{partition_with, PartitionClass, Quiver, QuiverError};
use crate::rational::{format_rational, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RicciError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("metric has {found} entries but the algebra has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("squared norm of basis vector {index} is {value}, not positive")]
    NonPositiveNorm { index: usize, value: String },
    #[error("`{a}` and `{x}` do not concatenate to a basis path")]
    NotAProduct { a: String, x: String },
    #[error("|{x}|² = {x_norm} differs from |{ax}|² = {ax_norm}")]
    NormMismatch { x: String, ax: String, x_norm: String, ax_norm: String },
    #[error("Ricci operator is not diagonal at ({row}, {col})")]
    NonDiagonal { row: String, col: String },
    #[error("decomposition case {case} fails at `{path}`: {lhs} != {rhs}")]
    DecompositionFailure { case: &'static str, path: String, lhs: String, rhs: String },
    #[error("line {line}: {reason}")]
    MetricSyntax { line: usize, reason: String },
}

/// Squared norms of the path basis; the basis is orthogonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalMetric {
    norms_squared: Vec<Rational>,
}

impl DiagonalMetric {
    pub fn new(norms_squared: Vec<Rational>) -> Result<Self, RicciError> {
        if let Some((index, value)) = norms_squared.iter().enumerate().find(|(_, v)| !v.is_positive()) {
            return Err(RicciError::NonPositiveNorm { index, value: format_rational(value) });
        }
        Ok(Self { norms_squared })
    }

    /// All basis paths of unit length.
    pub fn ones(n: usize) -> Self {
        Self { norms_squared: vec![rat(1, 1); n] }
    }

    pub fn norms_squared(&self) -> &[Rational] {
        &self.norms_squared
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.norms_squared[i]
    }

    pub fn len(&self) -> usize {
        self.norms_squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms_squared.is_empty()
    }

    pub fn scaled(&self, factor: &Rational) -> Result<Self, RicciError> {
        Self::new(self.norms_squared.iter().map(|v| v * factor).collect())
    }

    /// The metric on a subalgebra spanned by the basis indices in `embedding`.
    pub fn restrict(&self, embedding: &[usize]) -> Self {
        Self { norms_squared: embedding.iter().map(|&i| self.norms_squared[i].clone()).collect() }
    }

    fn check_dim(&self, alg: &QuiverLieAlgebra) -> Result<(), RicciError> {
        if self.len() != alg.dim() {
            return Err(RicciError::DimensionMismatch { expected: alg.dim(), found: self.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RicciResult {
    /// `form[x][y] = ⟨Ric x, y⟩` on basis paths.
    pub form: Vec<Vec<Rational>>,
    /// Matrix of the Ricci operator in the path basis, `G⁻¹ · form`.
    pub operator: Vec<Vec<Rational>>,
    /// Eigenvalues when the operator is diagonal.
    pub diagonal: Option<Vec<Rational>>,
}

impl RicciResult {
    pub fn is_symmetric(&self) -> bool {
        let n = self.form.len();
        (0..n).all(|i| (0..i).all(|j| self.form[i][j] == self.form[j][i]))
    }

    /// Trace of the operator.
    pub fn scalar_curvature(&self) -> Rational {
        (0..self.operator.len()).map(|i| self.operator[i][i].clone()).sum()
    }

    /// `Σ_k ⟨Ric e_k, e_k⟩` over the orthonormalized basis.
    pub fn scalar_curvature_from_form(&self, g: &DiagonalMetric) -> Rational {
        (0..self.form.len()).map(|i| &self.form[i][i] / g.get(i)).sum()
    }
}

/// Structure constants `c_{uv}^k` of `[x_u, x_v]` as a sparse vector.
fn structure_vector(alg: &QuiverLieAlgebra, u: usize, v: usize) -> Vec<(usize, i64)> {
    alg.bracket_of(u, v).map(|e| (e.index, e.sign.value())).into_iter().collect()
}

/// `⟨Σ_k c_k x_k, x_w⟩` for an orthogonal basis.
fn pairing(vector: &[(usize, i64)], w: usize, g: &DiagonalMetric) -> Rational {
    vector
        .iter()
        .filter(|&&(k, _)| k == w)
        .map(|&(_, c)| Rational::from_integer(c.into()) * g.get(w))
        .sum()
}

/// `⟨Ric x, y⟩ = -½ Σ_{i,j} ⟨[x,X_i],X_j⟩⟨[y,X_i],X_j⟩ + ¼ Σ_{i,j} ⟨[X_i,X_j],x⟩⟨[X_i,X_j],y⟩`
/// with `X_i = x_i/|x_i|` orthonormal, for all pairs of basis paths `x, y`.
///
/// Expanding the unit vectors gives
/// `-½ Σ ⟨[x,x_i],x_j⟩⟨[y,x_i],x_j⟩ / (|x_i|²|x_j|²) + ¼ Σ ⟨[x_i,x_j],x⟩⟨[x_i,x_j],y⟩ / (|x_i|²|x_j|²)`.
/// Terms with a vanishing bracket are skipped.
pub fn ricci_form(alg: &QuiverLieAlgebra, g: &DiagonalMetric) -> Result<RicciResult, RicciError> {
    g.check_dim(alg)?;
    let n = alg.dim();
    let mut form = vec![vec![Rational::zero(); n]; n];
    let half = rat(1, 2);
    let quarter = rat(1, 4);

    for i in 0..n {
        let nonzero: Vec<(usize, Vec<(usize, i64)>)> = (0..n)
            .map(|u| (u, structure_vector(alg, u, i)))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        for (x, vx) in &nonzero {
            for (y, vy) in &nonzero {
                let sum: Rational = vx
                    .iter()
                    .map(|&(j, _)| pairing(vx, j, g) * pairing(vy, j, g) / (g.get(i) * g.get(j)))
                    .sum();
                form[*x][*y] -= &half * sum;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = structure_vector(alg, i, j);
            let denom = g.get(i) * g.get(j);
            for &(x, _) in &v {
                for &(y, _) in &v {
                    form[x][y] += &quarter * pairing(&v, x, g) * pairing(&v, y, g) / &denom;
                }
            }
        }
    }
    let operator: Vec<Vec<Rational>> = form
        .iter()
        .enumerate()
        .map(|(l, row)| row.iter().map(|v| v / g.get(l)).collect())
        .collect();
    let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || operator[i][j].is_zero()));
    let diagonal = is_diagonal.then(|| (0..n).map(|i| operator[i][i].clone()).collect());
    Ok(RicciResult { form, operator, diagonal })
}

/// `r_k = -½ Σ_{i,j} ⟨[X_k,X_i],X_j⟩² + ½ Σ_{i<j} ⟨[X_i,X_j],X_k⟩²`, where
/// `⟨[X_k,X_i],X_j⟩² = |x_j|² / (|x_k|² |x_i|²)` when `[x_k,x_i] = ±x_j`.
pub fn ricci_diagonal_nice(alg: &QuiverLieAlgebra, g: &DiagonalMetric) -> Result<Vec<Rational>, RicciError> {
    g.check_dim(alg)?;
    let mut r = vec![Rational::zero(); alg.dim()];
    let half = rat(1, 2);
    for (&(i, j), e) in alg.table() {
        let square = g.get(e.index) / (g.get(i) * g.get(j));
        let contribution = &half * square;
        r[i] -= &contribution;
        r[j] -= &contribution;
        r[e.index] += contribution;
    }
    Ok(r)
}

/// `⟨[ā, x̄], (ax)‾⟩²` for `a·x = ax`, after checking `|x|² = |ax|²`. Under
/// that hypothesis the value is `1/|a|²`.
pub fn bracket_norm_coefficient(
    alg: &QuiverLieAlgebra,
    g: &DiagonalMetric,
    a: usize,
    x: usize,
) -> Result<Rational, RicciError> {
    g.check_dim(alg)?;
    let ax = match alg.bracket_of(a, x) {
        Some(e) if e.sign == Sign::Plus => e.index,
        _ => return Err(RicciError::NotAProduct { a: alg.name(a), x: alg.name(x) }),
    };
    if g.get(x) != g.get(ax) {
        return Err(RicciError::NormMismatch {
            x: alg.name(x),
            ax: alg.name(ax),
            x_norm: format_rational(g.get(x)),
            ax_norm: format_rational(g.get(ax)),
        });
    }
    Ok(g.get(ax) / (g.get(a) * g.get(x)))
}

/// Verifies the four-case comparison between the Ricci eigenvalues of `n_Q`
/// and those of the reduced ideal `n'` with the restricted metric. Both sides
/// come from [`ricci_form`]; the corrections are summed directly from the
/// metric.
pub fn ricci_decomposition_check(q: &Quiver, g: &DiagonalMetric) -> Result<(), RicciError> {
    let alg = build_algebra(q)?;
    g.check_dim(&alg)?;
    let reduction = alg.reduce()?;
    let part = partition_with(q, &reduction.reduced)?;
    let g_prime = g.restrict(&reduction.embedding);
    let ric = diagonal_or_error(&alg, ricci_form(&alg, g)?)?;
    let ric_prime = diagonal_or_error(&reduction.algebra, ricci_form(&reduction.algebra, &g_prime)?)?;
    let mut reduced_index = vec![None; alg.dim()];
    for (k, &i) in reduction.embedding.iter().enumerate() {
        reduced_index[i] = Some(k);
    }
    let half = rat(1, 2);
    let coef2 = |u: usize, v: usize, uv: usize| g.get(uv) / (g.get(u) * g.get(v));
    let is_starting = |i: usize| alg.degree(i) == 1 && part.starting_set.contains(&alg.path(i).first());

    for x in 0..alg.dim() {
        let path = alg.path(x);
        let class = part.classify(path).ok_or_else(|| RicciError::DecompositionFailure {
            case: "partition",
            path: alg.name(x),
            lhs: "unclassified".into(),
            rhs: "-".into(),
        })?;
        let (case, rhs) = match class {
            PartitionClass::Starting(_) => {
                let sum: Rational = (0..alg.dim())
                    .filter_map(|y| match alg.bracket_of(x, y) {
                        Some(e) if e.sign == Sign::Plus => Some(coef2(x, y, e.index)),
                        _ => None,
                    })
                    .sum();
                ("S", -&half * sum)
            }
            PartitionClass::P1(_) => {
                let sum: Rational = (0..alg.dim())
                    .filter(|&a| is_starting(a))
                    .filter_map(|a| match alg.bracket_of(a, x) {
                        Some(e) if e.sign == Sign::Plus => Some(coef2(a, x, e.index)),
                        _ => None,
                    })
                    .sum();
                let own = &ric_prime[reduced_index[x].expect("P1 lies in n'")];
                ("P1", own - &half * sum)
            }
            PartitionClass::P2(_) => {
                if part.factor_p2(path).is_none() {
                    return Err(RicciError::DecompositionFailure {
                        case: "P2",
                        path: alg.name(x),
                        lhs: "no unique factorization".into(),
                        rhs: "b·c with b starting".into(),
                    });
                }
                let mut sum = Rational::zero();
                for b in (0..alg.dim()).filter(|&b| is_starting(b)) {
                    for c in 0..alg.dim() {
                        if matches!(alg.bracket_of(b, c), Some(e) if e.index == x && e.sign == Sign::Plus) {
                            sum += coef2(b, c, x);
                        }
                    }
                }
                let own = &ric_prime[reduced_index[x].expect("P2 lies in n'")];
                ("P2", own + &half * sum)
            }
            PartitionClass::P0 => ("P0", ric_prime[reduced_index[x].expect("P0 lies in n'")].clone()),
        };
        if ric[x] != rhs {
            return Err(RicciError::DecompositionFailure {
                case,
                path: alg.name(x),
                lhs: format_rational(&ric[x]),
                rhs: format_rational(&rhs),
            });
        }
    }
    Ok(())
}

pub(crate) fn diagonal_or_error(alg: &QuiverLieAlgebra, result: RicciResult) -> Result<Vec<Rational>, RicciError> {
    if let Some(d) = result.diagonal {
        return Ok(d);
    }
    let n = alg.dim();
    let (row, col) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && !result.operator[i][j].is_zero())
        .expect("a nonzero off-diagonal entry exists");
    Err(RicciError::NonDiagonal { row: alg.name(row), col: alg.name(col) })
}

/// Parses `<path-name> = <p>/<q>` lines. Blank lines and `#` comments are
/// skipped; paths without an entry get squared norm 1.
pub fn parse_metric(text: &str, alg: &QuiverLieAlgebra) -> Result<DiagonalMetric, RicciError> {
    let mut norms: Vec<Option<Rational>> = vec![None; alg.dim()];
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |reason: String| RicciError::MetricSyntax { line: line_no, reason };
        let (name, value) = line.split_once('=').ok_or_else(|| syntax("expected `<path> = <p>/<q>`".into()))?;
        let path = alg
            .quiver()
            .parse_path(name.trim())
            .ok_or_else(|| syntax(format!("`{}` is not a path", name.trim())))?;
        let index = alg.index_of(&path).ok_or_else(|| syntax(format!("`{}` is not a path", name.trim())))?;
        let value = parse_rational(value).map_err(syntax)?;
        if !value.is_positive() {
            return Err(syntax(format!("squared norm {} is not positive", format_rational(&value))));
        }
        if norms[index].replace(value).is_some() {
            return Err(syntax(format!("duplicate entry for `{}`", name.trim())));
        }
    }
    DiagonalMetric::new(norms.into_iter().map(|v| v.unwrap_or_else(|| rat(1, 1))).collect())
}

pub fn serialize_metric(alg: &QuiverLieAlgebra, g: &DiagonalMetric) -> String {
    (0..alg.dim()).map(|i| format!("{} = {}\n", alg.name(i), format_rational(g.get(i)))).collect()
}
