//! The transition matrix of a Schreier graph and its exact spectral
//! combinatorics.
//!
//! For a graph on `d` states over an alphabet of rank `n`, the transition
//! matrix `A` has `A[i][j]` = number of letters mapping state `i` to state
//! `j`. All row and column sums equal `n`, the Perron eigenvalue is `n`,
//! and `(A^k)[i][j]` counts positive words of length `k` leading from `i`
//! to `j`. Everything here is exact: big integers for powers, big
//! rationals for normalized limits.
//!
//! The period `h` is the gcd of all closed-walk lengths. Entries of `A^k`
//! vanish unless `k` is congruent to the minimal exponent `m_ij` (the
//! shortest-path length) modulo `h`; normalized powers accumulate on the
//! value `h/d` along that residue class. Note `m_ij` is the true graph
//! distance and may exceed `h`; only its residue matters to the limit
//! pattern.

use num::{BigRational, BigUint, Integer, One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{det_bigint, interpolate, RationalFunction};
use crate::schreier::{CosetAutomaton, SchreierGraph};
use num::BigInt;

/// Errors from matrix construction and spectral computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    /// Matrix must be square and nonempty.
    #[error("matrix must be square and nonempty")]
    BadShape,
    /// Period and minimal exponents need a strongly connected pattern.
    #[error("matrix is not irreducible: no strongly connected nonzero pattern")]
    NotIrreducible,
}

/// A square non-negative integer matrix, exact.
///
/// Built from a Schreier graph this is the letter-transition count matrix;
/// products and powers of such matrices are represented by the same type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    entries: Vec<Vec<BigUint>>,
}

impl TransitionMatrix {
    /// The transition matrix of a Schreier graph.
    pub fn from_graph(g: &SchreierGraph) -> Self {
        let d = g.d();
        let mut entries = vec![vec![BigUint::zero(); d]; d];
        for row in g.action() {
            for (s, &t) in row.iter().enumerate() {
                entries[s][t] += BigUint::one();
            }
        }
        TransitionMatrix { entries }
    }

    /// Builds from explicit entries (square, nonempty).
    pub fn from_entries(entries: Vec<Vec<BigUint>>) -> Result<Self, SpectralError> {
        let d = entries.len();
        if d == 0 || entries.iter().any(|row| row.len() != d) {
            return Err(SpectralError::BadShape);
        }
        Ok(TransitionMatrix { entries })
    }

    /// Identity matrix of the same size.
    pub fn identity(d: usize) -> Self {
        let mut entries = vec![vec![BigUint::zero(); d]; d];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = BigUint::one();
        }
        TransitionMatrix { entries }
    }

    /// Dimension.
    pub fn d(&self) -> usize {
        self.entries.len()
    }

    /// Entry access.
    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i][j]
    }

    /// All entries.
    pub fn entries(&self) -> &[Vec<BigUint>] {
        &self.entries
    }

    /// Row sums (all equal to the rank for graph matrices).
    pub fn row_sums(&self) -> Vec<BigUint> {
        self.entries
            .iter()
            .map(|row| row.iter().fold(BigUint::zero(), |a, b| a + b))
            .collect()
    }

    /// Column sums.
    pub fn col_sums(&self) -> Vec<BigUint> {
        let d = self.d();
        let mut sums = vec![BigUint::zero(); d];
        for row in &self.entries {
            for (j, e) in row.iter().enumerate() {
                sums[j] += e;
            }
        }
        sums
    }

    /// Matrix product.
    pub fn mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let d = self.d();
        assert_eq!(d, other.d(), "dimension mismatch");
        let mut entries = vec![vec![BigUint::zero(); d]; d];
        for i in 0..d {
            for (k, aik) in self.entries[i].iter().enumerate() {
                if aik.is_zero() {
                    continue;
                }
                for (j, bkj) in other.entries[k].iter().enumerate() {
                    if !bkj.is_zero() {
                        entries[i][j] += aik * bkj;
                    }
                }
            }
        }
        TransitionMatrix { entries }
    }

    /// `self^k` by binary exponentiation (`k = 0` gives the identity).
    pub fn pow(&self, k: usize) -> TransitionMatrix {
        let mut result = TransitionMatrix::identity(self.d());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `self^1 ..= self^k` as a vector (index `j` holds the power `j+1`).
    pub fn successive_powers(&self, k: usize) -> Vec<TransitionMatrix> {
        let mut out = Vec::with_capacity(k);
        let mut cur = self.clone();
        for _ in 0..k {
            out.push(cur.clone());
            cur = cur.mul(self);
        }
        out
    }

    /// Adjacency lists of the nonzero pattern.
    fn pattern(&self) -> Vec<Vec<usize>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect()
    }

    fn reachable_from_0(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
        let d = adj.len();
        let mut level = vec![None; d];
        level[0] = Some(0usize);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if level[v].is_none() {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn check_irreducible(&self) -> Result<Vec<usize>, SpectralError> {
        let adj = self.pattern();
        let fwd = Self::reachable_from_0(&adj);
        if fwd.iter().any(Option::is_none) {
            return Err(SpectralError::NotIrreducible);
        }
        let d = self.d();
        let mut radj = vec![Vec::new(); d];
        for (u, vs) in adj.iter().enumerate() {
            for &v in vs {
                radj[v].push(u);
            }
        }
        let bwd = Self::reachable_from_0(&radj);
        if bwd.iter().any(Option::is_none) {
            return Err(SpectralError::NotIrreducible);
        }
        Ok(fwd.into_iter().map(Option::unwrap).collect())
    }

    /// The period: gcd of all closed-walk lengths.
    ///
    /// Computed without enumerating cycles: take breadth-first levels from
    /// state 0 and gcd the quantity `level(u) + 1 - level(v)` over all
    /// edges `u -> v` of the nonzero pattern. Requires irreducibility.
    pub fn period(&self) -> Result<usize, SpectralError> {
        let level = self.check_irreducible()?;
        let adj = self.pattern();
        let mut g: usize = 0;
        for (u, vs) in adj.iter().enumerate() {
            for &v in vs {
                // BFS levels satisfy level(v) <= level(u) + 1.
                let diff = level[u] + 1 - level[v];
                g = g.gcd(&diff);
            }
        }
        debug_assert!(g >= 1, "a finite strongly connected graph has a cycle");
        Ok(g)
    }

    /// Shortest-path lengths `m[i][j]` of the nonzero pattern.
    ///
    /// `m[i][i] = 0`; `(A^k)[i][j]` is zero for `k < m[i][j]` and nonzero
    /// at `k = m[i][j]`. Requires irreducibility (so all pairs connect).
    pub fn min_exponents(&self) -> Result<MinExponents, SpectralError> {
        self.check_irreducible()?;
        let adj = self.pattern();
        let d = self.d();
        let mut m = vec![vec![0usize; d]; d];
        for i in 0..d {
            let mut dist = vec![None; d];
            dist[i] = Some(0usize);
            let mut queue = std::collections::VecDeque::from([i]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v].is_none() {
                        dist[v] = Some(dist[u].unwrap() + 1);
                        queue.push_back(v);
                    }
                }
            }
            for (j, dv) in dist.into_iter().enumerate() {
                m[i][j] = dv.expect("irreducible pattern connects all pairs");
            }
        }
        Ok(MinExponents { m })
    }
}

/// The matrix of shortest-path lengths (minimal exponents) of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinExponents {
    m: Vec<Vec<usize>>,
}

impl MinExponents {
    /// `m[i][j]`: length of the shortest directed path `i -> j`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.m[i][j]
    }

    /// Row `i` (distances from state `i`).
    pub fn row(&self, i: usize) -> &[usize] {
        &self.m[i]
    }

    /// Matrix size.
    pub fn d(&self) -> usize {
        self.m.len()
    }
}

/// The rank-one Perron data of a graph matrix, exact.
///
/// Left eigenvector `(1/d, ..., 1/d)`, right eigenvector `(1, ..., 1)`,
/// normalized so their product is 1; `P = v_right · v_left` is the all-`1/d`
/// matrix that normalized powers (Cesàro-)converge to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitData {
    /// Left Perron eigenvector, entries `1/d`.
    pub v_left: Vec<BigRational>,
    /// Right Perron eigenvector, entries `1`.
    pub v_right: Vec<BigRational>,
    /// The limit matrix `v_right · v_left`, entries `1/d`.
    pub p: Vec<Vec<BigRational>>,
}

impl LimitData {
    /// The limit data for a graph on `d` states.
    pub fn for_index(d: usize) -> Self {
        let inv_d = BigRational::new(BigInt::one(), BigInt::from(d));
        LimitData {
            v_left: vec![inv_d.clone(); d],
            v_right: vec![BigRational::one(); d],
            p: vec![vec![inv_d; d]; d],
        }
    }

    /// Consistency: `v_left · v_right = 1` and `P = v_right · v_left`.
    pub fn is_consistent(&self) -> bool {
        let dot: BigRational = self
            .v_left
            .iter()
            .zip(&self.v_right)
            .map(|(a, b)| a * b)
            .sum();
        if !dot.is_one() {
            return false;
        }
        self.p.iter().zip(&self.v_right).all(|(row, r)| {
            row.iter()
                .zip(&self.v_left)
                .all(|(p, l)| p == &(r * l))
        })
    }
}

/// Report of [`check_limits`]: where powers of the transition matrix
/// vanish and what their normalized values accumulate to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    /// States.
    pub d: usize,
    /// Period.
    pub h: usize,
    /// Highest power inspected.
    pub k_used: usize,
    /// Entries `(i, j, k)` nonzero although `k` is off the residue class
    /// of `m_ij` mod `h` (always empty for correct inputs).
    pub residue_violations: Vec<(usize, usize, usize)>,
    /// Entries `(i, j)` violating shortest-path minimality (nonzero below
    /// `m_ij`, or zero at `m_ij`).
    pub minimality_violations: Vec<(usize, usize)>,
    /// On-residue zero entries `(i, j, k)` with `k >= m_ij` ("holes").
    /// Sporadic small holes are possible for aperiodic graphs; holes at or
    /// beyond the strict threshold are genuine violations.
    pub holes: Vec<(usize, usize, usize)>,
    /// Holes at or beyond the per-entry strict threshold (see
    /// [`strict_nonzero_from`]); always empty for correct inputs.
    pub strict_holes: Vec<(usize, usize, usize)>,
    /// Largest observed hole, if any.
    pub max_hole: Option<usize>,
    /// Whether every Cesàro average over `k <= k_used` is within the
    /// tolerance of `1/d` (`None` when no tolerance was supplied).
    pub cesaro_ok: Option<bool>,
    /// For aperiodic graphs, whether `(A^K)/n^K` is within the tolerance
    /// of `1/d` entrywise (`None` when periodic or no tolerance).
    pub direct_ok: Option<bool>,
    /// Conjunction of the structural checks plus any numeric ones run.
    pub pass: bool,
}

/// The power from which on-residue entries are provably nonzero.
///
/// For cyclic-class blocks of size `d/h <= 2`, constant row and column
/// sums force primitive blocks to be entrywise positive, so entries are
/// nonzero from `m_ij` on. Larger blocks use the Wielandt primitivity
/// bound `m_ij + h * ((d/h - 1)^2 + 1)`.
pub fn strict_nonzero_from(m_ij: usize, d: usize, h: usize) -> usize {
    let block = d / h;
    if block <= 2 {
        m_ij
    } else {
        m_ij + h * ((block - 1) * (block - 1) + 1)
    }
}

/// Inspects powers `A^k` for `k <= k_max` against the period structure,
/// and optionally checks normalized limits against `1/d` to a tolerance.
///
/// Structural layer (always on, exact): entries must vanish off the
/// residue class of `m_ij` mod `h` and below `m_ij`, must be nonzero at
/// `m_ij`, and must be nonzero on-residue from [`strict_nonzero_from`]
/// onward. Numeric layer (when `tol` is given, still exact rationals):
/// Cesàro averages of `(A^k)/n^k` against `1/d`, plus the direct ratio at
/// `k_max` for aperiodic graphs.
pub fn check_limits(g: &SchreierGraph, k_max: usize, tol: Option<&BigRational>) -> LimitReport {
    let a = TransitionMatrix::from_graph(g);
    let d = a.d();
    let n = g.rank();
    let h = a.period().expect("Schreier graphs are irreducible");
    let m = a.min_exponents().expect("Schreier graphs are irreducible");

    let mut residue_violations = Vec::new();
    let mut minimality_violations = Vec::new();
    let mut holes = Vec::new();
    let mut strict_holes = Vec::new();

    let powers = a.successive_powers(k_max);
    let at = |k: usize, i: usize, j: usize| -> &BigUint {
        // k >= 1; powers[k-1] = A^k.
        powers[k - 1].entry(i, j)
    };

    for i in 0..d {
        for j in 0..d {
            let mij = m.get(i, j);
            // k = 0 is the identity: consistent with m_ii = 0 and zero
            // elsewhere; start checking at 1.
            if i == j && mij != 0 {
                minimality_violations.push((i, j));
            }
            for k in 1..=k_max {
                let zero = at(k, i, j).is_zero();
                let on_residue = k % h == mij % h;
                if !on_residue && !zero {
                    residue_violations.push((i, j, k));
                }
                if k < mij && !zero {
                    minimality_violations.push((i, j));
                }
                if k == mij && zero {
                    minimality_violations.push((i, j));
                }
                if on_residue && k >= mij && zero {
                    holes.push((i, j, k));
                    if k >= strict_nonzero_from(mij, d, h) {
                        strict_holes.push((i, j, k));
                    }
                }
            }
        }
    }
    minimality_violations.dedup();
    let max_hole = holes.iter().map(|&(_, _, k)| k).max();

    let (cesaro_ok, direct_ok) = match tol {
        None => (None, None),
        Some(tol) => {
            let inv_d = BigRational::new(BigInt::one(), BigInt::from(d));
            let nq = BigInt::from(n);
            let mut npow = BigInt::one();
            let mut sums = vec![vec![BigRational::zero(); d]; d];
            for k in 1..=k_max {
                npow = &npow * &nq;
                for (i, row) in sums.iter_mut().enumerate() {
                    for (j, s) in row.iter_mut().enumerate() {
                        *s += BigRational::new(
                            BigInt::from(at(k, i, j).clone()),
                            npow.clone(),
                        );
                    }
                }
            }
            let kq = BigRational::from(BigInt::from(k_max));
            let cesaro = sums.iter().flatten().all(|s| {
                let avg = s / &kq;
                (avg - &inv_d).abs() < *tol
            });
            let direct = if h == 1 {
                let denom = npow.clone();
                Some((0..d).all(|i| {
                    (0..d).all(|j| {
                        let ratio = BigRational::new(
                            BigInt::from(at(k_max, i, j).clone()),
                            denom.clone(),
                        );
                        (ratio - &inv_d).abs() < *tol
                    })
                }))
            } else {
                None
            };
            (Some(cesaro), direct)
        }
    };

    let pass = residue_violations.is_empty()
        && minimality_violations.is_empty()
        && strict_holes.is_empty()
        && cesaro_ok != Some(false)
        && direct_ok != Some(false);

    LimitReport {
        d,
        h,
        k_used: k_max,
        residue_violations,
        minimality_violations,
        holes,
        strict_holes,
        max_hole,
        cesaro_ok,
        direct_ok,
        pass,
    }
}

/// The `d × h` limit matrix `B` of a graph with period `h`.
///
/// Row `i` has the single nonzero entry `h/d` in column `m_0i mod h`
/// (shortest-path length from the base state, reduced). Along the residue
/// class of `m_0i`, normalized powers `(A^k)[0][i] / n^k` converge to
/// exactly this value.
pub fn build_b_matrix(g: &SchreierGraph) -> Vec<Vec<BigRational>> {
    let a = TransitionMatrix::from_graph(g);
    let d = a.d();
    let h = a.period().expect("Schreier graphs are irreducible");
    let m = a.min_exponents().expect("Schreier graphs are irreducible");
    let value = BigRational::new(BigInt::from(h), BigInt::from(d));
    let mut b = vec![vec![BigRational::zero(); h]; d];
    for (i, row) in b.iter_mut().enumerate() {
        row[m.get(0, i) % h] = value.clone();
    }
    b
}

/// Report of [`divisibility_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisibilityReport {
    /// The period.
    pub period: usize,
    /// The index (number of states).
    pub d: usize,
    /// Whether the period divides the index.
    pub divides: bool,
}

/// Checks that the period divides the index (it always does for Schreier
/// graphs; the report makes the fact auditable).
pub fn divisibility_check(g: &SchreierGraph) -> DivisibilityReport {
    let a = TransitionMatrix::from_graph(g);
    let period = a.period().expect("Schreier graphs are irreducible");
    let d = a.d();
    DivisibilityReport { period, d, divides: d % period == 0 }
}

/// Number of positive words of length exactly `k` accepted by a coset
/// automaton: the `(start, accept)` entry of `A^k`, exact.
pub fn count_words(c: &CosetAutomaton, k: usize) -> BigUint {
    let a = TransitionMatrix::from_graph(c.graph());
    a.pow(k).entry(c.start(), c.accept()).clone()
}

/// The coset growth series as an exact rational function.
///
/// `p(z) = sum_k (A^k)[start][accept] z^k` equals the `(start, accept)`
/// entry of `(I - zA)^{-1}`, computed as a cofactor over the determinant
/// by evaluation at integer points and interpolation (all exact). The
/// result is canonicalized by [`RationalFunction::new`].
pub fn generating_function(c: &CosetAutomaton) -> RationalFunction {
    let a = TransitionMatrix::from_graph(c.graph());
    let d = a.d();
    let (s, f) = (c.start(), c.accept());

    // M(t) = I - tA evaluated at integers t.
    let eval_m = |t: &BigInt| -> Vec<Vec<BigInt>> {
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let base = if i == j { BigInt::one() } else { BigInt::zero() };
                        base - t * BigInt::from(a.entry(i, j).clone())
                    })
                    .collect()
            })
            .collect()
    };

    // det(I - zA): degree <= d, so d+1 points.
    let xs: Vec<BigInt> = (0..=d as i64).map(BigInt::from).collect();
    let det_ys: Vec<BigInt> = xs.iter().map(|t| det_bigint(eval_m(t))).collect();
    let den = interpolate(&xs, &det_ys);

    // Cofactor C_{f,s}: (-1)^{f+s} times the minor with row f, column s
    // removed; degree <= d-1, so d points.
    let minor_xs: Vec<BigInt> = (0..d.max(1) as i64).map(BigInt::from).collect();
    let minor_ys: Vec<BigInt> = minor_xs
        .iter()
        .map(|t| {
            let m = eval_m(t);
            let sub: Vec<Vec<BigInt>> = m
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != f)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != s)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            det_bigint(sub)
        })
        .collect();
    let minor = interpolate(&minor_xs, &minor_ys);
    let num = if (f + s) % 2 == 0 { minor } else { minor.neg() };

    RationalFunction::new(num, den).expect("det(I - zA) has constant term 1")
}
