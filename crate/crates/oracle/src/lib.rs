//! Naive brute-force cross-checkers for `coset-core`.
//!
//! Everything in this crate is deliberately slow and simple: word counts are
//! obtained by enumerating every positive word up to a length bound and
//! walking it letter by letter over the raw transition tables, and partition
//! checks test every such word against every part.  No matrix powers, no
//! generating functions, no product constructions — the point is that these
//! routines share no algorithmic machinery with the library they check, so
//! agreement between the two is meaningful evidence of correctness.
//!
//! The only inputs read from `coset-core` values are plain accessors: the
//! transition table of a graph, the start/accept states of an automaton, and
//! the list of parts of a partition.
//!
//! Length bounds are enforced hard ([`MAX_COUNT_LEN`], [`MAX_CHECK_LEN`])
//! because the running time is `Θ(n^k)`; exceeding them returns
//! [`OracleError::BoundExceeded`] instead of hanging.

use coset_core::{CosetAutomaton, CosetPartition, SignedLetter, Word};
use num::{BigUint, One, Zero};
use thiserror::Error;

/// Largest word length accepted by [`brute_count`] and [`word_census`].
pub const MAX_COUNT_LEN: usize = 16;

/// Largest word length accepted by [`brute_partition_check`].
pub const MAX_CHECK_LEN: usize = 12;

/// Errors reported by the brute-force checkers.
#[derive(Debug, Error)]
pub enum OracleError {
    /// The requested length bound exceeds the hard cap for this operation.
    #[error("requested length bound {requested} exceeds the brute-force cap {limit}")]
    BoundExceeded {
        /// The bound that was asked for.
        requested: usize,
        /// The largest bound this operation accepts.
        limit: usize,
    },
}

/// Iterates over all positive words of a fixed length in lexicographic
/// order, invoking `visit` with the letter indices of each word.
///
/// Words are represented as slices of letter indices in `0..rank`, most
/// significant position first, so incrementing the rightmost position
/// fastest yields lexicographic order.  The empty word (length 0) results
/// in a single visit with an empty slice.
fn for_each_word(rank: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    let mut word = vec![0usize; len];
    loop {
        visit(&word);
        // Odometer increment, rightmost digit fastest.
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            word[pos] += 1;
            if word[pos] < rank {
                break;
            }
            word[pos] = 0;
        }
    }
}

/// Walks a positive word over a raw transition table.
fn walk_table(action: &[Vec<usize>], start: usize, word: &[usize]) -> usize {
    let mut state = start;
    for &letter in word {
        state = action[letter][state];
    }
    state
}

/// Counts positive words of each length `0..=k_max` accepted by `c`,
/// by enumerating and walking every single word.
///
/// Returns `counts` with `counts[k]` the number of positive words of length
/// exactly `k` that lead from the start state to the accept state.  Fails
/// with [`OracleError::BoundExceeded`] when `k_max > MAX_COUNT_LEN`.
pub fn brute_count(c: &CosetAutomaton, k_max: usize) -> Result<Vec<BigUint>, OracleError> {
    if k_max > MAX_COUNT_LEN {
        return Err(OracleError::BoundExceeded {
            requested: k_max,
            limit: MAX_COUNT_LEN,
        });
    }
    let graph = c.graph();
    let action = graph.action();
    let rank = graph.rank();
    let mut counts = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut count = BigUint::zero();
        for_each_word(rank, k, |word| {
            if walk_table(action, c.start(), word) == c.accept() {
                count += BigUint::one();
            }
        });
        counts.push(count);
    }
    Ok(counts)
}

/// Exact word counts per part and per length for a coset partition,
/// obtained by brute enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCensus {
    /// `counts[i][k]` is the number of positive words of length `k`
    /// accepted by part `i`.
    pub counts: Vec<Vec<BigUint>>,
    /// The largest length counted (inclusive).
    pub max_len: usize,
}

impl WordCensus {
    /// Sums the per-part counts at one length.
    pub fn total_at(&self, k: usize) -> BigUint {
        self.counts
            .iter()
            .map(|row| row[k].clone())
            .fold(BigUint::zero(), |a, b| a + b)
    }
}

/// Tallies, for every positive word of length `0..=k_max`, which parts of
/// `p` accept it.  One enumeration pass; every word is walked over every
/// part's table.
pub fn word_census(p: &CosetPartition, k_max: usize) -> Result<WordCensus, OracleError> {
    if k_max > MAX_COUNT_LEN {
        return Err(OracleError::BoundExceeded {
            requested: k_max,
            limit: MAX_COUNT_LEN,
        });
    }
    let rank = p.alphabet().rank();
    let machines: Vec<(&[Vec<usize>], usize, usize)> = p
        .parts()
        .iter()
        .map(|part| {
            let c = &part.automaton;
            (c.graph().action() as &[Vec<usize>], c.start(), c.accept())
        })
        .collect();
    let mut counts = vec![Vec::with_capacity(k_max + 1); machines.len()];
    for k in 0..=k_max {
        let mut at_k = vec![BigUint::zero(); machines.len()];
        for_each_word(rank, k, |word| {
            for (i, &(action, start, accept)) in machines.iter().enumerate() {
                if walk_table(action, start, word) == accept {
                    at_k[i] += BigUint::one();
                }
            }
        });
        for (i, c) in at_k.into_iter().enumerate() {
            counts[i].push(c);
        }
    }
    Ok(WordCensus { counts, max_len: k_max })
}

/// Outcome of a brute-force partition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteCheck {
    /// True when every enumerated word was accepted by exactly one part.
    pub ok: bool,
    /// The first word (shortest, then lexicographically earliest) accepted
    /// by a number of parts other than one, when any exists.
    pub witness: Option<Word>,
    /// How many parts accepted the witness (0, or ≥ 2).
    pub witness_multiplicity: Option<usize>,
    /// The largest length checked (inclusive).
    pub checked_len: usize,
}

/// Checks that every positive word of length `0..=k_max` is accepted by
/// exactly one part of `p`, by walking each word over each part's table.
///
/// Stops at the first failure; words are enumerated shortest first and in
/// lexicographic order within a length, so the reported witness is the
/// earliest one in that order.  Fails with [`OracleError::BoundExceeded`]
/// when `k_max > MAX_CHECK_LEN`.
pub fn brute_partition_check(
    p: &CosetPartition,
    k_max: usize,
) -> Result<BruteCheck, OracleError> {
    if k_max > MAX_CHECK_LEN {
        return Err(OracleError::BoundExceeded {
            requested: k_max,
            limit: MAX_CHECK_LEN,
        });
    }
    let alphabet = p.alphabet();
    let rank = alphabet.rank();
    let machines: Vec<(&[Vec<usize>], usize, usize)> = p
        .parts()
        .iter()
        .map(|part| {
            let c = &part.automaton;
            (c.graph().action() as &[Vec<usize>], c.start(), c.accept())
        })
        .collect();
    for k in 0..=k_max {
        let mut bad: Option<(Vec<usize>, usize)> = None;
        for_each_word(rank, k, |word| {
            if bad.is_some() {
                return;
            }
            let hits = machines
                .iter()
                .filter(|&&(action, start, accept)| walk_table(action, start, word) == accept)
                .count();
            if hits != 1 {
                bad = Some((word.to_vec(), hits));
            }
        });
        if let Some((letters, hits)) = bad {
            let word = Word::from_letters(
                alphabet,
                letters.into_iter().map(SignedLetter::gen),
            )
            .expect("enumerated letters are within the alphabet");
            return Ok(BruteCheck {
                ok: false,
                witness: Some(word),
                witness_multiplicity: Some(hits),
                checked_len: k_max,
            });
        }
    }
    Ok(BruteCheck {
        ok: true,
        witness: None,
        witness_multiplicity: None,
        checked_len: k_max,
    })
}

/// Number of index-`d` subgroups of a free group of rank `n`, by the
/// classical recurrence
///
/// ```text
/// N(1) = 1,
/// N(d) = d·(d!)^(n-1) − Σ_{i=1}^{d-1} ((d−i)!)^(n-1) · N(i).
/// ```
///
/// All arithmetic is exact.  `n ≥ 1` and `d ≥ 1` are required.
pub fn hall_count(n: usize, d: usize) -> BigUint {
    assert!(n >= 1, "rank must be at least 1");
    assert!(d >= 1, "index must be at least 1");
    // factorial[i] = i! as a big integer.
    let mut factorial = vec![BigUint::one(); d + 1];
    for i in 1..=d {
        factorial[i] = &factorial[i - 1] * BigUint::from(i);
    }
    let e = (n - 1) as u32;
    let mut counts: Vec<BigUint> = Vec::with_capacity(d + 1);
    counts.push(BigUint::zero()); // unused slot 0
    for m in 1..=d {
        let mut total = BigUint::from(m) * factorial[m].pow(e);
        for i in 1..m {
            let term = factorial[m - i].pow(e) * &counts[i];
            // The recurrence never goes negative for valid inputs.
            total -= term;
        }
        counts.push(total);
    }
    counts.pop().expect("counts is nonempty")
}
