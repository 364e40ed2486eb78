//! Coset partitions of a free group and their exact verification.
//!
//! A partition is a list of parts, each a coset `H_i · α_i` given by a
//! coset automaton (subgroup graph plus accept state) and an optional
//! representative word. Verification explores the product of the part
//! automata breadth-first over positive letters: the parts partition the
//! group exactly when every reachable tuple of states is accepting in
//! exactly one coordinate. Because every letter permutes the states of
//! every part, positive-word reachability already covers the whole free
//! group, so this check decides the full partition property.
//!
//! On top of verification sit the period analyzers: the residue matrices
//! `C` (one period class) and `D` (two period classes stacked), the
//! multiplicity predictor driven by the repetition counts `r_h`, the
//! period-repetition laws expected of every valid partition, and the
//! exact generating-function identity `Σ_i p_i(z) = 1/(1 - nz)`.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::sync::Arc;

use num::{BigInt, BigRational, Integer, One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::RationalFunction;
use crate::schreier::{CosetAutomaton, SchreierError, SchreierGraph};
use crate::spectral::{generating_function, TransitionMatrix};
use crate::words::{Alphabet, SignedLetter, Word, WordError};

/// Errors from partition construction and analysis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    /// A partition needs at least one part.
    #[error("a partition needs at least one part")]
    Empty,
    /// All parts must share one alphabet.
    #[error("parts use different alphabets")]
    AlphabetMismatch,
    /// A provided representative word must reach the accept state.
    #[error("representative word {rep:?} reaches state {reached}, not the accept state {accept}")]
    RepMismatch {
        /// The representative, as text.
        rep: String,
        /// Where it actually leads from the base state.
        reached: usize,
        /// The declared accept state.
        accept: usize,
    },
    /// Analyzers require a verified partition.
    #[error("not a valid partition: analyzers require a verified partition")]
    InvalidPartition,
    /// No part has the requested period (> 1).
    #[error("no part has period {h} (periods > 1 are required here)")]
    PeriodAbsent {
        /// The requested period.
        h: usize,
    },
    /// The stacked residue matrix needs `h_prime < h`.
    #[error("period pair must satisfy h' < h, got h' = {h_prime}, h = {h}")]
    BadPeriodPair {
        /// The larger period argument.
        h: usize,
        /// The smaller period argument.
        h_prime: usize,
    },
    /// Word-level failure (parsing, alphabet mismatch).
    #[error(transparent)]
    Word(#[from] WordError),
    /// Graph-level failure (walks, state ranges).
    #[error(transparent)]
    Schreier(#[from] SchreierError),
}

/// One part of a partition: a coset of a finite-index subgroup.
#[derive(Debug, Clone)]
pub struct PartitionPart {
    /// Display name of the subgroup (parts of the same subgroup share it).
    pub name: String,
    /// The coset automaton: subgroup graph plus accept state.
    pub automaton: CosetAutomaton,
    /// Representative word, if one was given (the accept state determines
    /// the coset, so this is optional and recomputable).
    pub rep: Option<Word>,
}

impl PartitionPart {
    /// A part from an automaton, validating any provided representative.
    pub fn new(
        name: impl Into<String>,
        automaton: CosetAutomaton,
        rep: Option<Word>,
    ) -> Result<Self, PartitionError> {
        if let Some(rep) = &rep {
            let reached = automaton.graph().walk(automaton.start(), rep)?;
            if reached != automaton.accept() {
                return Err(PartitionError::RepMismatch {
                    rep: rep.to_string(),
                    reached,
                    accept: automaton.accept(),
                });
            }
        }
        Ok(PartitionPart { name: name.into(), automaton, rep })
    }

    /// A part determined by a representative word: the accept state is
    /// wherever the word leads from the base state.
    pub fn from_rep(
        name: impl Into<String>,
        graph: &Arc<SchreierGraph>,
        rep: Word,
    ) -> Result<Self, PartitionError> {
        let accept = graph.walk(0, &rep)?;
        let automaton = graph.automaton(accept)?;
        Ok(PartitionPart { name: name.into(), automaton, rep: Some(rep) })
    }

    /// The subgroup index of this part's subgroup.
    pub fn index(&self) -> usize {
        self.automaton.d()
    }

    /// The representative: the given one, or the canonical shortest one.
    pub fn rep_or_computed(&self) -> Word {
        match &self.rep {
            Some(r) => r.clone(),
            None => self
                .automaton
                .graph()
                .coset_reps()
                .rep(self.automaton.accept())
                .clone(),
        }
    }
}

/// A candidate coset partition of the free group.
#[derive(Debug, Clone)]
pub struct CosetPartition {
    parts: Vec<PartitionPart>,
}

impl CosetPartition {
    /// Builds a partition candidate; parts must share one alphabet.
    pub fn new(parts: Vec<PartitionPart>) -> Result<Self, PartitionError> {
        let first = parts.first().ok_or(PartitionError::Empty)?;
        let alphabet = first.automaton.graph().alphabet().clone();
        if parts
            .iter()
            .any(|p| p.automaton.graph().alphabet() != &alphabet)
        {
            return Err(PartitionError::AlphabetMismatch);
        }
        Ok(CosetPartition { parts })
    }

    /// The parts.
    pub fn parts(&self) -> &[PartitionPart] {
        &self.parts
    }

    /// The shared alphabet.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.parts[0].automaton.graph().alphabet()
    }

    /// Subgroup indices `d_i` per part.
    pub fn indices(&self) -> Vec<usize> {
        self.parts.iter().map(PartitionPart::index).collect()
    }

    /// Transition-matrix periods `h_i` per part.
    pub fn periods(&self) -> Vec<usize> {
        self.distinct_graphs()
            .map_parts(|g| {
                TransitionMatrix::from_graph(g)
                    .period()
                    .expect("Schreier graphs are irreducible")
            })
    }

    /// Minimal exponents `m_i`: shortest-path length from the base state
    /// to the accept state in each part's graph (true length, not reduced).
    pub fn min_exponents(&self) -> Vec<usize> {
        let dg = self.distinct_graphs();
        let exps: Vec<_> = dg
            .graphs
            .iter()
            .map(|g| {
                TransitionMatrix::from_graph(g)
                    .min_exponents()
                    .expect("Schreier graphs are irreducible")
            })
            .collect();
        self.parts
            .iter()
            .enumerate()
            .map(|(i, p)| exps[dg.coord_of_part[i]].get(0, p.automaton.accept()))
            .collect()
    }

    /// Deduplicates part graphs (parts of one subgroup share a graph) and
    /// records which product coordinate each part reads.
    fn distinct_graphs(&self) -> DistinctGraphs {
        let mut graphs: Vec<Arc<SchreierGraph>> = Vec::new();
        let mut coord_of_part = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            let g = p.automaton.graph();
            let coord = graphs
                .iter()
                .position(|known| Arc::ptr_eq(known, g))
                .unwrap_or_else(|| {
                    graphs.push(g.clone());
                    graphs.len() - 1
                });
            coord_of_part.push(coord);
        }
        DistinctGraphs { graphs, coord_of_part }
    }
}

struct DistinctGraphs {
    graphs: Vec<Arc<SchreierGraph>>,
    coord_of_part: Vec<usize>,
}

impl DistinctGraphs {
    /// Computes one value per distinct graph, then fans out per part.
    fn map_parts<T: Clone>(&self, f: impl Fn(&SchreierGraph) -> T) -> Vec<T> {
        let per_graph: Vec<T> = self.graphs.iter().map(|g| f(g)).collect();
        self.coord_of_part
            .iter()
            .map(|&c| per_graph[c].clone())
            .collect()
    }
}

/// A word witnessing that a candidate is not a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// A shortest positive word covered by ≠ 1 parts (ties broken by
    /// alphabet order).
    pub word: Word,
    /// The parts containing it (empty, or two and more).
    pub covered_by: Vec<usize>,
}

/// Result of [`verify_partition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    /// Whether the cosets partition the whole group.
    pub valid: bool,
    /// A shortest failure witness when invalid.
    pub witness: Option<Witness>,
    /// `Σ 1/d_i`, exact.
    pub density: BigRational,
    /// Whether two parts share an index (`d_i = d_j`, `i ≠ j`).
    pub multiplicity: bool,
    /// Number of parts.
    pub parts: usize,
    /// Indices `d_i` per part.
    pub indices: Vec<usize>,
    /// Number of reachable tuples of the product of the part automata.
    pub reachable_tuples: usize,
}

/// Exact density data from [`density_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    /// The reciprocals `1/d_i` in part order.
    pub terms: Vec<BigRational>,
    /// Their sum.
    pub sum: BigRational,
    /// Whether the sum is exactly 1 (necessary for a partition).
    pub is_one: bool,
}

/// `Σ 1/d_i` as an exact rational; equal to 1 for every partition.
pub fn density_check(p: &CosetPartition) -> DensityReport {
    let terms: Vec<BigRational> = p
        .indices()
        .iter()
        .map(|&d| BigRational::new(BigInt::one(), BigInt::from(d)))
        .collect();
    let sum: BigRational = terms.iter().cloned().sum();
    let is_one = sum.is_one();
    DensityReport { terms, sum, is_one }
}

fn has_multiplicity(indices: &[usize]) -> bool {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Decides whether the parts partition the free group, exactly.
///
/// Breadth-first search over tuples of per-part states, driven by
/// positive letters in alphabet order from the all-base tuple. The
/// candidate is a partition iff every reachable tuple is accepting in
/// exactly one coordinate; the first violating tuple in search order
/// yields a shortest witness word (lexicographically least among the
/// shortest). The search always completes, so the reachable-tuple count
/// is exact even for invalid candidates.
pub fn verify_partition(p: &CosetPartition) -> PartitionReport {
    let dg = p.distinct_graphs();
    let alphabet = p.alphabet();
    let rank = alphabet.rank();
    let accepts: Vec<(usize, usize)> = p
        .parts
        .iter()
        .enumerate()
        .map(|(i, part)| (dg.coord_of_part[i], part.automaton.accept()))
        .collect();

    let start: Vec<usize> = vec![0; dg.graphs.len()];
    // Parent links for witness reconstruction: tuple -> (parent, letter).
    let mut seen: HashMap<Vec<usize>, Option<(Vec<usize>, usize)>> = HashMap::new();
    seen.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let mut witness: Option<Witness> = None;
    let mut reachable = 0usize;

    while let Some(tuple) = queue.pop_front() {
        reachable += 1;
        if witness.is_none() {
            let covered_by: Vec<usize> = accepts
                .iter()
                .enumerate()
                .filter(|(_, &(coord, acc))| tuple[coord] == acc)
                .map(|(i, _)| i)
                .collect();
            if covered_by.len() != 1 {
                let mut letters = Vec::new();
                let mut cur = tuple.clone();
                while let Some(Some((parent, letter))) = seen.get(&cur) {
                    letters.push(SignedLetter::gen(*letter));
                    cur = parent.clone();
                }
                letters.reverse();
                let word = Word::from_letters(alphabet, letters)
                    .expect("positive letters are in range");
                witness = Some(Witness { word, covered_by });
            }
        }
        for letter in 0..rank {
            let next: Vec<usize> = tuple
                .iter()
                .zip(&dg.graphs)
                .map(|(&s, g)| g.action()[letter][s])
                .collect();
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), Some((tuple.clone(), letter)));
                queue.push_back(next);
            }
        }
    }

    let density = density_check(p);
    let indices = p.indices();
    PartitionReport {
        valid: witness.is_none(),
        witness,
        density: density.sum,
        multiplicity: has_multiplicity(&indices),
        parts: p.parts.len(),
        indices,
        reachable_tuples: reachable,
    }
}

/// The period data underlying the multiplicity analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodAnalysis {
    /// Periods `h_i` per part.
    pub periods: Vec<usize>,
    /// Minimal exponents `m_i` per part (true shortest-path lengths).
    pub min_exponents: Vec<usize>,
    /// Residues `m_i mod h_i` per part.
    pub residues: Vec<usize>,
    /// Distinct periods > 1, ascending.
    pub h_set: Vec<usize>,
    /// `(h, r_h)` for each `h` in `h_set`: how many parts have period `h`.
    pub repetitions: Vec<(usize, usize)>,
    /// Whether the members of `h_set` are pairwise coprime.
    pub pairwise_coprime: bool,
}

impl PeriodAnalysis {
    /// Computes the period data of a partition candidate.
    pub fn of(p: &CosetPartition) -> PeriodAnalysis {
        let periods = p.periods();
        let min_exponents = p.min_exponents();
        let residues = min_exponents
            .iter()
            .zip(&periods)
            .map(|(&m, &h)| m % h)
            .collect();
        let mut h_set: Vec<usize> = periods.iter().copied().filter(|&h| h > 1).collect();
        h_set.sort_unstable();
        h_set.dedup();
        let repetitions = h_set
            .iter()
            .map(|&h| (h, periods.iter().filter(|&&x| x == h).count()))
            .collect();
        let pairwise_coprime = h_set
            .iter()
            .enumerate()
            .all(|(i, &a)| h_set[i + 1..].iter().all(|&b| a.gcd(&b) == 1));
        PeriodAnalysis {
            periods,
            min_exponents,
            residues,
            h_set,
            repetitions,
            pairwise_coprime,
        }
    }

    /// `r_h` for a given `h`, if `h` is in the set.
    pub fn repetition(&self, h: usize) -> Option<usize> {
        self.repetitions
            .iter()
            .find(|&&(hh, _)| hh == h)
            .map(|&(_, r)| r)
    }
}

/// Builds the residue matrix of the parts with period exactly `h`.
///
/// One row per part with `h_i = h` (in part order), `h` columns; the row
/// of a part with index `d_i` holds the single nonzero value `h/d_i` in
/// column `m_i mod h`.
pub fn build_c_matrix(
    p: &CosetPartition,
    h: usize,
) -> Result<Vec<Vec<BigRational>>, PartitionError> {
    if h <= 1 {
        return Err(PartitionError::PeriodAbsent { h });
    }
    let analysis = PeriodAnalysis::of(p);
    let rows: Vec<usize> = (0..p.parts().len())
        .filter(|&i| analysis.periods[i] == h)
        .collect();
    if rows.is_empty() {
        return Err(PartitionError::PeriodAbsent { h });
    }
    Ok(rows
        .into_iter()
        .map(|i| {
            let d = p.parts()[i].index();
            let mut row = vec![BigRational::zero(); h];
            row[analysis.min_exponents[i] % h] =
                BigRational::new(BigInt::from(h), BigInt::from(d));
            row
        })
        .collect())
}

/// Builds the stacked residue matrix for two period classes `h' < h`.
///
/// First the rows of the parts with period `h'` (value `h'/d_i`, repeated
/// at every column congruent to `m_i mod h'`), then the rows of the parts
/// with period `h` (value `h/d_i` at columns `≡ m_i mod h`). The column
/// pattern repeats with period `lcm(h, h')`, so by default the matrix is
/// truncated to that many columns; `full` widens it to `2hh'`.
pub fn build_d_matrix(
    p: &CosetPartition,
    h: usize,
    h_prime: usize,
    full: bool,
) -> Result<Vec<Vec<BigRational>>, PartitionError> {
    if h_prime >= h {
        return Err(PartitionError::BadPeriodPair { h, h_prime });
    }
    if h_prime <= 1 {
        return Err(PartitionError::PeriodAbsent { h: h_prime });
    }
    let analysis = PeriodAnalysis::of(p);
    let class = |target: usize| -> Vec<usize> {
        (0..p.parts().len())
            .filter(|&i| analysis.periods[i] == target)
            .collect()
    };
    let prime_rows = class(h_prime);
    let h_rows = class(h);
    if prime_rows.is_empty() {
        return Err(PartitionError::PeriodAbsent { h: h_prime });
    }
    if h_rows.is_empty() {
        return Err(PartitionError::PeriodAbsent { h });
    }
    let width = if full { 2 * h * h_prime } else { h.lcm(&h_prime) };
    let make_row = |i: usize, modulus: usize| -> Vec<BigRational> {
        let d = p.parts()[i].index();
        let value = BigRational::new(BigInt::from(modulus), BigInt::from(d));
        let residue = analysis.min_exponents[i] % modulus;
        (0..width)
            .map(|j| {
                if j % modulus == residue {
                    value.clone()
                } else {
                    BigRational::zero()
                }
            })
            .collect()
    };
    Ok(prime_rows
        .into_iter()
        .map(|i| make_row(i, h_prime))
        .chain(h_rows.into_iter().map(|i| make_row(i, h)))
        .collect())
}

/// The repetition-count test for one period value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionOutcome {
    /// The period `h`.
    pub h: usize,
    /// Its repetition count `r_h`.
    pub r: usize,
    /// `r_h = h` or `h < r_h ≤ 2(h-1)`.
    pub strict: bool,
    /// `r_h = h` or `r_h ≤ 2(h-1)` (no lower bound on the second branch).
    pub loose: bool,
}

/// A lower bound on a repetition count, with its outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    /// The period whose repetition count is bounded.
    pub h: usize,
    /// The repetition count `r_h`.
    pub r: usize,
    /// The claimed lower bound.
    pub bound: i64,
    /// Whether `r ≥ bound`.
    pub holds: bool,
}

/// A divisor-pair bound `r_h ≥ h - (h/h')·r_{h'}` for `h' | h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorBound {
    /// The larger period.
    pub h: usize,
    /// The smaller period dividing it.
    pub h_prime: usize,
    /// Repetition count of `h`.
    pub r: usize,
    /// Repetition count of `h_prime`.
    pub r_prime: usize,
    /// The bound `h - (h/h')·r_{h'}` (may be non-positive).
    pub bound: i64,
    /// Whether `r ≥ bound`.
    pub holds: bool,
}

/// Result of the multiplicity analyzer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    /// The period data.
    pub analysis: PeriodAnalysis,
    /// Indices `d_i` per part.
    pub indices: Vec<usize>,
    /// Whether every index exceeds 1 (the analyzed regime).
    pub all_indices_above_one: bool,
    /// Whether the hypotheses apply: all indices > 1, some period > 1,
    /// and the distinct periods pairwise coprime.
    pub applicable: bool,
    /// Per-period outcomes of the repetition-count test.
    pub conditions: Vec<ConditionOutcome>,
    /// Whether the analyzer predicts an index repetition (applicable and
    /// some period passes the strict test).
    pub predicts_multiplicity: bool,
    /// Same with the loose test (reported separately, never used for the
    /// falsifier flag).
    pub loose_predicts_multiplicity: bool,
    /// Whether two indices actually coincide.
    pub actual_multiplicity: bool,
    /// Prediction made but no actual repetition — expected never.
    pub falsifier: bool,
    /// When exactly one period value > 1 exists: the bound `r ≥ h`.
    pub single_period_bound: Option<BoundCheck>,
    /// For pairs `h' | h` of distinct periods > 1: `r ≥ h - (h/h')·r'`.
    pub divisor_bounds: Vec<DivisorBound>,
}

/// The multiplicity analyzer: from period repetition counts to a
/// prediction that two subgroup indices coincide.
///
/// Requires a verified partition. The prediction applies when all indices
/// exceed 1 and the distinct periods > 1 are pairwise coprime; it fires
/// when some period `h` has `r_h = h` or `h < r_h ≤ 2(h-1)`. The report
/// also carries the looser variant without the lower bound, the actual
/// index-multiplicity of the partition, a falsifier flag (prediction
/// without actual repetition — expected never), and the auxiliary lower
/// bounds on repetition counts.
pub fn theorem1_analyze(p: &CosetPartition) -> Result<MultiplicityReport, PartitionError> {
    if !verify_partition(p).valid {
        return Err(PartitionError::InvalidPartition);
    }
    let analysis = PeriodAnalysis::of(p);
    let indices = p.indices();
    let all_indices_above_one = indices.iter().all(|&d| d > 1);
    let applicable =
        all_indices_above_one && !analysis.h_set.is_empty() && analysis.pairwise_coprime;

    let conditions: Vec<ConditionOutcome> = analysis
        .repetitions
        .iter()
        .map(|&(h, r)| ConditionOutcome {
            h,
            r,
            strict: r == h || (h < r && r <= 2 * (h - 1)),
            loose: r == h || r <= 2 * (h - 1),
        })
        .collect();

    let predicts_multiplicity = applicable && conditions.iter().any(|c| c.strict);
    let loose_predicts_multiplicity = applicable && conditions.iter().any(|c| c.loose);
    let actual_multiplicity = has_multiplicity(&indices);
    let falsifier = predicts_multiplicity && !actual_multiplicity;

    let single_period_bound = if all_indices_above_one && analysis.h_set.len() == 1 {
        let h = analysis.h_set[0];
        let r = analysis.repetition(h).unwrap();
        Some(BoundCheck { h, r, bound: h as i64, holds: r as i64 >= h as i64 })
    } else {
        None
    };

    let mut divisor_bounds = Vec::new();
    if all_indices_above_one {
        for &(h, r) in &analysis.repetitions {
            for &(h_prime, r_prime) in &analysis.repetitions {
                if h_prime < h && h % h_prime == 0 {
                    let bound = h as i64 - (h / h_prime) as i64 * r_prime as i64;
                    divisor_bounds.push(DivisorBound {
                        h,
                        h_prime,
                        r,
                        r_prime,
                        bound,
                        holds: r as i64 >= bound,
                    });
                }
            }
        }
    }

    Ok(MultiplicityReport {
        analysis,
        indices,
        all_indices_above_one,
        applicable,
        conditions,
        predicts_multiplicity,
        loose_predicts_multiplicity,
        actual_multiplicity,
        falsifier,
        single_period_bound,
        divisor_bounds,
    })
}

/// One period-repetition law, with the parts violating it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    /// Whether the law's hypotheses apply to this partition.
    pub applicable: bool,
    /// Whether it holds (vacuously true when not applicable).
    pub pass: bool,
    /// Part indices violating it.
    pub offenders: Vec<usize>,
}

/// The period-repetition laws every valid partition is expected to obey.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepetitionChecks {
    /// Periods `h_i` per part.
    pub periods: Vec<usize>,
    /// Whether the laws apply at all: at least two parts, all `d_i > 1`.
    pub applicable: bool,
    /// The maximal period, if > 1, is attained by at least two parts.
    pub max_period_repeats: CheckOutcome,
    /// Every period > 1 that does not properly divide another part's
    /// period is attained at least twice.
    pub non_divisor_periods_repeat: CheckOutcome,
    /// Every period equals or divides the period of some other part.
    pub equal_or_divides: CheckOutcome,
    /// All applicable laws hold.
    pub pass: bool,
}

/// Checks the period-repetition laws on a verified partition; failures
/// would falsify the expected structure and are reported as offenders.
pub fn period_repetition_checks(
    p: &CosetPartition,
) -> Result<RepetitionChecks, PartitionError> {
    if !verify_partition(p).valid {
        return Err(PartitionError::InvalidPartition);
    }
    let periods = p.periods();
    let indices = p.indices();
    let applicable = periods.len() >= 2 && indices.iter().all(|&d| d > 1);

    let vacuous = CheckOutcome { applicable: false, pass: true, offenders: Vec::new() };

    let max_period_repeats = if applicable {
        let max = *periods.iter().max().unwrap();
        if max > 1 {
            let holders: Vec<usize> = (0..periods.len())
                .filter(|&i| periods[i] == max)
                .collect();
            let pass = holders.len() >= 2;
            CheckOutcome {
                applicable: true,
                pass,
                offenders: if pass { Vec::new() } else { holders },
            }
        } else {
            vacuous.clone()
        }
    } else {
        vacuous.clone()
    };

    let non_divisor_periods_repeat = if applicable {
        let mut offenders = Vec::new();
        for (i, &h) in periods.iter().enumerate() {
            if h <= 1 {
                continue;
            }
            let properly_divides_other = periods
                .iter()
                .enumerate()
                .any(|(j, &hj)| j != i && hj != h && hj % h == 0);
            if properly_divides_other {
                continue;
            }
            let repeats = periods
                .iter()
                .enumerate()
                .any(|(j, &hj)| j != i && hj == h);
            if !repeats {
                offenders.push(i);
            }
        }
        CheckOutcome { applicable: true, pass: offenders.is_empty(), offenders }
    } else {
        vacuous.clone()
    };

    let equal_or_divides = if applicable {
        let mut offenders = Vec::new();
        for (i, &h) in periods.iter().enumerate() {
            let ok = periods
                .iter()
                .enumerate()
                .any(|(j, &hj)| j != i && hj % h == 0);
            if !ok {
                offenders.push(i);
            }
        }
        CheckOutcome { applicable: true, pass: offenders.is_empty(), offenders }
    } else {
        vacuous
    };

    let pass =
        max_period_repeats.pass && non_divisor_periods_repeat.pass && equal_or_divides.pass;
    Ok(RepetitionChecks {
        periods,
        applicable,
        max_period_repeats,
        non_divisor_periods_repeat,
        equal_or_divides,
        pass,
    })
}

/// Result of the generating-function identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenFunReport {
    /// The coset growth series per part, canonical.
    pub part_functions: Vec<RationalFunction>,
    /// Their sum, canonical.
    pub sum: RationalFunction,
    /// The expected value `1/(1 - nz)`.
    pub expected: RationalFunction,
    /// Whether sum = expected as rational functions (cross-multiplied).
    pub identity: bool,
    /// Highest series coefficient compared.
    pub checked_to: usize,
    /// Whether `Σ_i a_{i,k} = n^k` for all `k ≤ checked_to`.
    pub coefficients_ok: bool,
    /// Both checks passed.
    pub holds: bool,
}

/// Verifies `Σ_i p_i(z) = 1/(1 - nz)` exactly, plus the coefficientwise
/// form `Σ_i a_{i,k} = n^k` for `k ≤ k_max`.
///
/// True for every partition; a non-partition (density ≠ 1) fails both
/// layers. No validity precondition — the check itself is a detector.
pub fn genfun_identity_check(p: &CosetPartition, k_max: usize) -> GenFunReport {
    let n = p.alphabet().rank();
    let part_functions: Vec<RationalFunction> = p
        .parts()
        .iter()
        .map(|part| generating_function(&part.automaton))
        .collect();
    let sum = part_functions
        .iter()
        .fold(RationalFunction::zero(), |acc, f| acc.add(f));
    let expected = RationalFunction::geometric(n as u64);
    let identity = sum.equivalent(&expected);

    let series: Vec<Vec<BigInt>> = part_functions
        .iter()
        .map(|f| f.series(k_max).expect("coset series are integral"))
        .collect();
    let mut coefficients_ok = true;
    let nq = BigInt::from(n);
    let mut npow = BigInt::one();
    for k in 0..=k_max {
        let total: BigInt = series.iter().map(|s| s[k].clone()).sum();
        if total != npow {
            coefficients_ok = false;
            break;
        }
        npow = &npow * &nq;
    }

    let holds = identity && coefficients_ok;
    GenFunReport {
        part_functions,
        sum,
        expected,
        identity,
        checked_to: k_max,
        coefficients_ok,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schreier::build_schreier;

    fn f2() -> Arc<Alphabet> {
        Alphabet::with_rank(2).unwrap()
    }

    fn graph(a: &Arc<Alphabet>, gens: &[&str]) -> Arc<SchreierGraph> {
        let words: Vec<Word> = gens.iter().map(|t| Word::parse(a, t).unwrap()).collect();
        Arc::new(build_schreier(a, &words).unwrap())
    }

    fn part(name: &str, g: &Arc<SchreierGraph>, rep: &str) -> PartitionPart {
        let a = g.alphabet().clone();
        PartitionPart::from_rep(name, g, Word::parse(&a, rep).unwrap()).unwrap()
    }

    /// The reference partition: H of index 2, K of index 4, parts
    /// {H, Ka, Ka³}.
    fn reference_partition() -> CosetPartition {
        let a = f2();
        let h = graph(&a, &["aa", "bb", "ab"]);
        let k = graph(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB"]);
        CosetPartition::new(vec![
            part("H", &h, ""),
            part("K", &k, "a"),
            part("K", &k, "aaa"),
        ])
        .unwrap()
    }

    #[test]
    fn reference_partition_is_valid() {
        let p = reference_partition();
        let report = verify_partition(&p);
        assert!(report.valid);
        assert!(report.witness.is_none());
        assert_eq!(report.reachable_tuples, 4);
        assert!(report.density.is_one());
        assert!(report.multiplicity);
        assert_eq!(report.indices, vec![2, 4, 4]);
    }

    #[test]
    fn subgroup_with_all_cosets_is_valid() {
        let a = f2();
        let h = graph(&a, &["aa", "bb", "ab"]);
        let p = CosetPartition::new(vec![part("H", &h, ""), part("H", &h, "a")]).unwrap();
        let report = verify_partition(&p);
        assert!(report.valid);
        assert_eq!(report.reachable_tuples, 2);
    }

    #[test]
    fn missing_coset_gives_short_witness() {
        let a = f2();
        let k = graph(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB"]);
        let p = CosetPartition::new(vec![part("K", &k, ""), part("K", &k, "a")]).unwrap();
        let report = verify_partition(&p);
        assert!(!report.valid);
        assert_eq!(report.density, BigRational::new(1.into(), 2.into()));
        let w = report.witness.unwrap();
        assert!(w.word.len() <= 2);
        assert!(w.covered_by.is_empty());
        assert_eq!(w.word.to_string(), "aa");
    }

    #[test]
    fn double_cover_witness_lists_both_parts() {
        let a = f2();
        let h = graph(&a, &["aa", "bb", "ab"]);
        let p = CosetPartition::new(vec![
            part("H", &h, ""),
            part("H", &h, "a"),
            part("H", &h, "ab"),
        ])
        .unwrap();
        let report = verify_partition(&p);
        assert!(!report.valid);
        let w = report.witness.unwrap();
        // The empty word lies in H and in Hab (ab ∈ H).
        assert_eq!(w.word.len(), 0);
        assert_eq!(w.covered_by, vec![0, 2]);
    }

    #[test]
    fn rep_must_reach_accept() {
        let a = f2();
        let h = graph(&a, &["aa", "bb", "ab"]);
        let auto = h.automaton(1).unwrap();
        let err =
            PartitionPart::new("H", auto, Some(Word::parse(&a, "aa").unwrap())).unwrap_err();
        assert!(matches!(err, PartitionError::RepMismatch { reached: 0, accept: 1, .. }));
    }

    #[test]
    fn alphabets_must_match() {
        let a2 = f2();
        let a3 = Alphabet::with_rank(3).unwrap();
        let g2 = graph(&a2, &["a", "b"]);
        let g3 = graph(&a3, &["a", "b", "c"]);
        let err = CosetPartition::new(vec![part("A", &g2, ""), part("B", &g3, "")])
            .unwrap_err();
        assert!(matches!(err, PartitionError::AlphabetMismatch));
    }

    #[test]
    fn density_of_reference_indices() {
        let p = reference_partition();
        let d = density_check(&p);
        assert!(d.is_one);
        assert_eq!(
            d.terms,
            vec![
                BigRational::new(1.into(), 2.into()),
                BigRational::new(1.into(), 4.into()),
                BigRational::new(1.into(), 4.into()),
            ]
        );
    }

    #[test]
    fn periods_and_residues_of_reference() {
        let p = reference_partition();
        let analysis = PeriodAnalysis::of(&p);
        assert_eq!(analysis.periods, vec![2, 4, 4]);
        assert_eq!(analysis.min_exponents, vec![0, 1, 3]);
        assert_eq!(analysis.residues, vec![0, 1, 3]);
        assert_eq!(analysis.h_set, vec![2, 4]);
        assert_eq!(analysis.repetitions, vec![(2, 1), (4, 2)]);
        assert!(!analysis.pairwise_coprime);
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn c_matrix_of_reference() {
        let p = reference_partition();
        let c4 = build_c_matrix(&p, 4).unwrap();
        assert_eq!(
            c4,
            vec![
                vec![q(0, 1), q(1, 1), q(0, 1), q(0, 1)],
                vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)],
            ]
        );
        let c2 = build_c_matrix(&p, 2).unwrap();
        assert_eq!(c2, vec![vec![q(1, 1), q(0, 1)]]);
        assert!(matches!(
            build_c_matrix(&p, 3),
            Err(PartitionError::PeriodAbsent { h: 3 })
        ));
        assert!(matches!(
            build_c_matrix(&p, 1),
            Err(PartitionError::PeriodAbsent { h: 1 })
        ));
    }

    #[test]
    fn d_matrix_of_reference() {
        let p = reference_partition();
        let d = build_d_matrix(&p, 4, 2, false).unwrap();
        assert_eq!(
            d,
            vec![
                vec![q(1, 1), q(0, 1), q(1, 1), q(0, 1)],
                vec![q(0, 1), q(1, 1), q(0, 1), q(0, 1)],
                vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)],
            ]
        );
        // Column sums all 1 = Σ 1/d_i over the represented parts.
        for j in 0..4 {
            let col: BigRational = d.iter().map(|row| row[j].clone()).sum();
            assert!(col.is_one());
        }
        let full = build_d_matrix(&p, 4, 2, true).unwrap();
        assert_eq!(full.len(), 3);
        assert!(full.iter().all(|row| row.len() == 16));
        // The truncated matrix is the left lcm-wide block of the full one.
        for (t, f) in d.iter().zip(&full) {
            assert_eq!(&f[..4], &t[..]);
            assert_eq!(&f[4..8], &t[..]);
        }
        assert!(matches!(
            build_d_matrix(&p, 2, 4, false),
            Err(PartitionError::BadPeriodPair { h: 2, h_prime: 4 })
        ));
        assert!(matches!(
            build_d_matrix(&p, 4, 3, false),
            Err(PartitionError::PeriodAbsent { h: 3 })
        ));
    }

    #[test]
    fn analyzer_on_reference_is_not_applicable_but_bounds_hold() {
        let p = reference_partition();
        let r = theorem1_analyze(&p).unwrap();
        assert!(r.all_indices_above_one);
        assert!(!r.analysis.pairwise_coprime);
        assert!(!r.applicable);
        assert!(!r.predicts_multiplicity);
        assert!(r.actual_multiplicity);
        assert!(!r.falsifier);
        assert!(r.single_period_bound.is_none());
        assert_eq!(r.divisor_bounds.len(), 1);
        let b = &r.divisor_bounds[0];
        assert_eq!((b.h, b.h_prime, b.r, b.r_prime, b.bound), (4, 2, 2, 1, 2));
        assert!(b.holds);
    }

    #[test]
    fn analyzer_predicts_on_index_two_pair() {
        let a = f2();
        let h = graph(&a, &["aa", "bb", "ab"]);
        let p = CosetPartition::new(vec![part("H", &h, ""), part("H", &h, "a")]).unwrap();
        let r = theorem1_analyze(&p).unwrap();
        assert!(r.applicable);
        assert_eq!(r.analysis.h_set, vec![2]);
        assert_eq!(r.conditions.len(), 1);
        assert!(r.conditions[0].strict);
        assert!(r.predicts_multiplicity);
        assert!(r.actual_multiplicity);
        assert!(!r.falsifier);
        let b = r.single_period_bound.unwrap();
        assert!((b.h, b.r, b.holds) == (2, 2, true));
    }

    #[test]
    fn analyzer_rejects_invalid_partitions() {
        let a = f2();
        let k = graph(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB"]);
        let p = CosetPartition::new(vec![part("K", &k, ""), part("K", &k, "a")]).unwrap();
        assert!(matches!(
            theorem1_analyze(&p),
            Err(PartitionError::InvalidPartition)
        ));
        assert!(matches!(
            period_repetition_checks(&p),
            Err(PartitionError::InvalidPartition)
        ));
    }

    #[test]
    fn rank_one_modular_partition_periods_are_indices() {
        // 2Z, 4Z+1, 4Z+3 as subgroups of the rank-1 free group.
        let a = Alphabet::with_rank(1).unwrap();
        let two = graph(&a, &["aa"]);
        let four = graph(&a, &["aaaa"]);
        let p = CosetPartition::new(vec![
            part("2Z", &two, ""),
            part("4Z", &four, "a"),
            part("4Z", &four, "aaa"),
        ])
        .unwrap();
        let report = verify_partition(&p);
        assert!(report.valid);
        let analysis = PeriodAnalysis::of(&p);
        assert_eq!(analysis.periods, vec![2, 4, 4]);
        let checks = period_repetition_checks(&p).unwrap();
        assert!(checks.pass);
    }

    #[test]
    fn repetition_checks_on_reference() {
        let p = reference_partition();
        let checks = period_repetition_checks(&p).unwrap();
        assert!(checks.applicable);
        assert!(checks.max_period_repeats.pass);
        assert!(checks.non_divisor_periods_repeat.pass);
        assert!(checks.equal_or_divides.pass);
        assert!(checks.pass);
    }

    #[test]
    fn genfun_identity_on_reference() {
        let p = reference_partition();
        let r = genfun_identity_check(&p, 12);
        assert!(r.identity);
        assert!(r.coefficients_ok);
        assert!(r.holds);
        assert_eq!(r.sum, RationalFunction::geometric(2));
        assert_eq!(
            r.part_functions[0],
            RationalFunction::new(
                crate::poly::Poly::one(),
                crate::poly::Poly::from_ints(&[1, 0, -4]),
            )
            .unwrap()
        );
    }

    #[test]
    fn genfun_identity_fails_on_half_cover() {
        let a = f2();
        let k = graph(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB"]);
        let p = CosetPartition::new(vec![part("K", &k, ""), part("K", &k, "a")]).unwrap();
        let r = genfun_identity_check(&p, 8);
        assert!(!r.identity);
        assert!(!r.coefficients_ok);
        assert!(!r.holds);
    }

    #[test]
    fn genfun_identity_whole_group() {
        let a = f2();
        let whole = graph(&a, &["a", "b"]);
        let p = CosetPartition::new(vec![part("F", &whole, "")]).unwrap();
        let r = genfun_identity_check(&p, 6);
        assert!(r.holds);
        assert_eq!(r.sum, RationalFunction::geometric(2));
    }
}
