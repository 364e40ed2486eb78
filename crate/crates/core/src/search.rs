//! Exhaustive search for coset partitions, and in particular for
//! distinct-index partitions (which would witness failures of the
//! Herzog–Schönheim expectation — none are ever found).
//!
//! The combinatorial core identifies coset partitions with exact covers:
//! take the reachable tuples of the product of the subgroup automata as
//! the universe; a coset (subgroup `i`, accept state `f`) covers the
//! tuples whose `i`-th coordinate is `f`; a set of cosets partitions the
//! free group exactly when it covers every reachable tuple exactly once.
//! The search layer enumerates index multisets with reciprocal sum 1,
//! drives all tuples of canonical subgroups with those indices through
//! the cover solver, and merges deduplicated findings deterministically —
//! the same report regardless of shard count, with a checkpointable state
//! for resuming long runs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::{verify_partition, CosetPartition, PartitionError, PartitionPart};
use crate::schreier::{enumerate_subgroups, SchreierError, SchreierGraph};
use crate::words::WordError;

/// Errors from search configuration and partition finding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    /// All subgroups must share one alphabet.
    #[error("subgroups use different alphabets")]
    AlphabetMismatch,
    /// The subgroup list must be nonempty.
    #[error("need at least one subgroup")]
    NoSubgroups,
    /// An invalid configuration, with the reason.
    #[error("invalid search configuration: {reason}")]
    BadConfig {
        /// What is wrong.
        reason: String,
    },
    /// A resume state that does not belong to the configuration.
    #[error("resume state does not match the configuration: {reason}")]
    BadState {
        /// What is inconsistent.
        reason: String,
    },
    /// Word-level failure.
    #[error(transparent)]
    Word(#[from] WordError),
    /// Graph-level failure.
    #[error(transparent)]
    Schreier(#[from] SchreierError),
    /// Partition-level failure.
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

fn bad_config(reason: impl Into<String>) -> SearchError {
    SearchError::BadConfig { reason: reason.into() }
}

/// Options for [`find_partitions_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FindOptions {
    /// Select at most one coset per subgroup (the distinct-index hunt;
    /// the general search allows several cosets of one subgroup).
    pub distinct_only: bool,
}

// ---------------------------------------------------------------------
// Exact cover over reachable product tuples
// ---------------------------------------------------------------------

/// A fixed-length bitset over the tuple universe.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits {
    blocks: Vec<u64>,
}

impl Bits {
    fn new(len: usize) -> Bits {
        Bits { blocks: vec![0; len.div_ceil(64)] }
    }

    fn set(&mut self, i: usize) {
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    fn disjoint(&self, other: &Bits) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & b == 0)
    }

    fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    fn andnot_assign(&mut self, other: &Bits) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    fn test(&self, i: usize) -> bool {
        self.blocks[i / 64] >> (i % 64) & 1 == 1
    }
}

struct Column {
    subgroup: usize,
    accept: usize,
    mask: Bits,
}

/// All exact covers of the product universe, as sorted column-id lists,
/// in depth-first discovery order.
///
/// Branches on the uncovered element with the fewest remaining candidate
/// columns (smallest element id on ties), trying candidates in column
/// order — fully deterministic.
fn exact_covers(universe: usize, columns: &[Column], distinct_only: bool) -> Vec<Vec<usize>> {
    let mut covered = Bits::new(universe);
    let mut used = vec![false; columns.iter().map(|c| c.subgroup + 1).max().unwrap_or(0)];
    let mut selection = Vec::new();
    let mut solutions = Vec::new();
    let full = {
        let mut b = Bits::new(universe);
        for i in 0..universe {
            b.set(i);
        }
        b
    };
    recurse(
        universe,
        columns,
        distinct_only,
        &mut covered,
        &full,
        &mut used,
        &mut selection,
        &mut solutions,
    );
    solutions
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    universe: usize,
    columns: &[Column],
    distinct_only: bool,
    covered: &mut Bits,
    full: &Bits,
    used: &mut [bool],
    selection: &mut Vec<usize>,
    solutions: &mut Vec<Vec<usize>>,
) {
    if covered == full {
        let mut sol = selection.clone();
        sol.sort_unstable();
        solutions.push(sol);
        return;
    }
    // The uncovered element with the fewest candidates.
    let candidate_ids = |e: usize| -> Vec<usize> {
        columns
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                c.mask.test(e)
                    && c.mask.disjoint(covered)
                    && !(distinct_only && used[c.subgroup])
            })
            .map(|(id, _)| id)
            .collect()
    };
    let mut best: Option<(usize, Vec<usize>)> = None;
    for e in 0..universe {
        if covered.test(e) {
            continue;
        }
        let cands = candidate_ids(e);
        let better = match &best {
            None => true,
            Some((_, b)) => cands.len() < b.len(),
        };
        if better {
            let empty = cands.is_empty();
            best = Some((e, cands));
            if empty {
                break;
            }
        }
    }
    let Some((_, cands)) = best else { return };
    for id in cands {
        let col = &columns[id];
        covered.or_assign(&col.mask);
        used[col.subgroup] = true;
        selection.push(id);
        recurse(
            universe, columns, distinct_only, covered, full, used, selection, solutions,
        );
        selection.pop();
        used[col.subgroup] = false;
        covered.andnot_assign(&col.mask);
    }
}

/// The reachable product tuples of a list of subgroup graphs (positive
/// letters from the all-base tuple, breadth-first) and the cover columns.
fn product_universe(
    subgroups: &[Arc<SchreierGraph>],
) -> Result<(Vec<Vec<usize>>, Vec<Column>), SearchError> {
    let first = subgroups.first().ok_or(SearchError::NoSubgroups)?;
    let alphabet = first.alphabet();
    if subgroups.iter().any(|g| g.alphabet() != alphabet) {
        return Err(SearchError::AlphabetMismatch);
    }
    let rank = alphabet.rank();

    let start = vec![0usize; subgroups.len()];
    let mut order: Vec<Vec<usize>> = vec![start.clone()];
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(start, 0)]);
    let mut head = 0;
    while head < order.len() {
        let tuple = order[head].clone();
        head += 1;
        for letter in 0..rank {
            let next: Vec<usize> = tuple
                .iter()
                .zip(subgroups)
                .map(|(&s, g)| g.action()[letter][s])
                .collect();
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), order.len());
                order.push(next);
            }
        }
    }

    let mut columns = Vec::new();
    for (i, g) in subgroups.iter().enumerate() {
        for f in 0..g.d() {
            let mut mask = Bits::new(order.len());
            for (t, tuple) in order.iter().enumerate() {
                if tuple[i] == f {
                    mask.set(t);
                }
            }
            columns.push(Column { subgroup: i, accept: f, mask });
        }
    }
    Ok((order, columns))
}

/// The covers of a subgroup list as `(subgroup position, accept)` pairs.
fn cover_sets(
    subgroups: &[Arc<SchreierGraph>],
    opts: &FindOptions,
) -> Result<Vec<Vec<(usize, usize)>>, SearchError> {
    let (universe, columns) = product_universe(subgroups)?;
    let covers = exact_covers(universe.len(), &columns, opts.distinct_only);
    Ok(covers
        .into_iter()
        .map(|sol| {
            sol.into_iter()
                .map(|id| (columns[id].subgroup, columns[id].accept))
                .collect()
        })
        .collect())
}

fn cover_to_partition(
    subgroups: &[Arc<SchreierGraph>],
    cover: &[(usize, usize)],
) -> Result<CosetPartition, SearchError> {
    let parts = cover
        .iter()
        .map(|&(i, f)| {
            PartitionPart::new(format!("G{i}"), subgroups[i].automaton(f)?, None)
                .map_err(SearchError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let p = CosetPartition::new(parts)?;
    // An exact cover of the reachable product is a partition by
    // construction; re-verify as a hard internal consistency check.
    assert!(verify_partition(&p).valid, "exact cover failed re-verification");
    Ok(p)
}

/// Every coset partition assembled from the given subgroups' cosets.
///
/// The universe is the reachable product-state set; each returned
/// partition is an exact cover, re-verified, in deterministic depth-first
/// discovery order. Multiple cosets of one subgroup are allowed (the
/// reference partition itself reuses a subgroup); see
/// [`find_partitions_with`] to restrict that.
pub fn find_partitions(
    subgroups: &[Arc<SchreierGraph>],
) -> Result<Vec<CosetPartition>, SearchError> {
    find_partitions_with(subgroups, &FindOptions::default())
}

/// [`find_partitions`] with options.
pub fn find_partitions_with(
    subgroups: &[Arc<SchreierGraph>],
    opts: &FindOptions,
) -> Result<Vec<CosetPartition>, SearchError> {
    cover_sets(subgroups, opts)?
        .iter()
        .map(|cover| cover_to_partition(subgroups, cover))
        .collect()
}

// ---------------------------------------------------------------------
// Counterexample search over index multisets
// ---------------------------------------------------------------------

/// Configuration of a counterexample search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Rank of the free group.
    pub rank: usize,
    /// Explicit index multiset to search (mutually exclusive with
    /// `max_index`).
    pub indices: Option<Vec<usize>>,
    /// Enumerate all index multisets with entries `2..=max_index` and
    /// reciprocal sum 1 (distinct entries unless `include_repeats`).
    pub max_index: Option<usize>,
    /// Allow repeated entries in enumerated multisets.
    pub include_repeats: bool,
    /// Cap on the number of parts of enumerated multisets.
    pub max_parts: usize,
    /// Select at most one coset per subgroup (the counterexample hunt).
    pub distinct_only: bool,
    /// Number of deterministic shards (tuple `t` goes to shard
    /// `t % shards`).
    pub shards: usize,
    /// Maximum number of new tuples to process in one run; exceeding it
    /// yields a partial report flagged incomplete.
    pub tuple_budget: Option<usize>,
}

impl SearchConfig {
    /// A default configuration for the given rank: no multiset source
    /// selected yet, 12 parts maximum, one shard, no budget.
    pub fn new(rank: usize) -> SearchConfig {
        SearchConfig {
            rank,
            indices: None,
            max_index: None,
            include_repeats: false,
            max_parts: 12,
            distinct_only: false,
            shards: 1,
            tuple_budget: None,
        }
    }
}

fn reciprocal_sum(indices: &[usize]) -> BigRational {
    indices
        .iter()
        .map(|&d| BigRational::new(BigInt::one(), BigInt::from(d)))
        .sum()
}

fn validate(cfg: &SearchConfig) -> Result<(), SearchError> {
    if cfg.rank < 1 {
        return Err(bad_config("rank must be at least 1"));
    }
    if cfg.shards < 1 {
        return Err(bad_config("shard count must be at least 1"));
    }
    if cfg.max_parts < 1 {
        return Err(bad_config("max_parts must be at least 1"));
    }
    match (&cfg.indices, cfg.max_index) {
        (Some(_), Some(_)) => {
            return Err(bad_config("give either an index multiset or a maximum index, not both"))
        }
        (None, None) => {
            return Err(bad_config("give an index multiset or a maximum index"))
        }
        (Some(indices), None) => {
            if indices.is_empty() {
                return Err(bad_config("index multiset must be nonempty"));
            }
            if indices.iter().any(|&d| d < 1) {
                return Err(bad_config("indices must be at least 1"));
            }
            if !reciprocal_sum(indices).is_one() {
                return Err(bad_config(
                    "index reciprocals must sum to 1 (necessary for a partition)",
                ));
            }
            if cfg.distinct_only {
                if indices.iter().any(|&d| d < 2) {
                    return Err(bad_config("distinct-index search requires all indices > 1"));
                }
                let mut sorted = indices.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != indices.len() {
                    return Err(bad_config("distinct-index search requires distinct indices"));
                }
            }
        }
        (None, Some(max_index)) => {
            if max_index < 2 {
                return Err(bad_config("maximum index must be at least 2"));
            }
        }
    }
    Ok(())
}

/// All index multisets with entries in `2..=max_index`, at most
/// `max_parts` entries, and reciprocal sum exactly 1, ascending within
/// each multiset and lexicographically ordered overall. Entries are
/// distinct unless `include_repeats`.
pub fn enumerate_multisets(
    max_index: usize,
    max_parts: usize,
    include_repeats: bool,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(
        d_min: usize,
        max_index: usize,
        slots: usize,
        remaining: &BigRational,
        include_repeats: bool,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining.is_zero() {
            if !current.is_empty() {
                out.push(current.clone());
            }
            return;
        }
        if slots == 0 {
            return;
        }
        for d in d_min..=max_index {
            let term = BigRational::new(BigInt::one(), BigInt::from(d));
            if &term > remaining {
                continue;
            }
            // All later entries are ≥ d, so at most slots·(1/d) remains
            // achievable; below that, larger d only shrinks it further.
            if remaining > &(BigRational::from(BigInt::from(slots as u64)) * &term) {
                break;
            }
            current.push(d);
            let next_min = if include_repeats { d } else { d + 1 };
            go(
                next_min,
                max_index,
                slots - 1,
                &(remaining - &term),
                include_repeats,
                current,
                out,
            );
            current.pop();
        }
    }
    go(
        2,
        max_index,
        max_parts,
        &BigRational::one(),
        include_repeats,
        &mut current,
        &mut out,
    );
    out
}

/// One subgroup choice group: an index value with its multiplicity in the
/// multiset, and the combinations (with repetition) of canonical
/// subgroups filling those slots.
struct GroupSpace {
    index: usize,
    multiplicity: usize,
    subgroups: Arc<Vec<Arc<SchreierGraph>>>,
    combos: Vec<Vec<usize>>,
}

struct MultisetSpace {
    indices: Vec<usize>,
    groups: Vec<GroupSpace>,
    tuples: usize,
}

struct TupleSpace {
    multisets: Vec<MultisetSpace>,
    /// Exclusive prefix sums of per-multiset tuple counts.
    offsets: Vec<usize>,
    total: usize,
    subgroup_counts: Vec<(usize, usize)>,
}

fn combinations_with_repetition(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn build_tuple_space(cfg: &SearchConfig) -> Result<TupleSpace, SearchError> {
    let alphabet = crate::words::Alphabet::with_rank(cfg.rank)?;
    let multiset_list: Vec<Vec<usize>> = match (&cfg.indices, cfg.max_index) {
        (Some(indices), None) => {
            let mut sorted = indices.clone();
            sorted.sort_unstable();
            vec![sorted]
        }
        (None, Some(max_index)) => {
            enumerate_multisets(max_index, cfg.max_parts, cfg.include_repeats)
        }
        _ => unreachable!("validated"),
    };

    let mut cache: BTreeMap<usize, Arc<Vec<Arc<SchreierGraph>>>> = BTreeMap::new();
    let mut subgroups_of = |d: usize| -> Arc<Vec<Arc<SchreierGraph>>> {
        cache
            .entry(d)
            .or_insert_with(|| {
                Arc::new(
                    enumerate_subgroups(&alphabet, d)
                        .into_iter()
                        .map(Arc::new)
                        .collect(),
                )
            })
            .clone()
    };

    let mut multisets = Vec::new();
    for indices in multiset_list {
        let mut groups: Vec<GroupSpace> = Vec::new();
        for &d in &indices {
            match groups.last_mut() {
                Some(g) if g.index == d => g.multiplicity += 1,
                _ => groups.push(GroupSpace {
                    index: d,
                    multiplicity: 1,
                    subgroups: subgroups_of(d),
                    combos: Vec::new(),
                }),
            }
        }
        for g in &mut groups {
            g.combos = combinations_with_repetition(g.subgroups.len(), g.multiplicity);
        }
        let tuples = groups.iter().map(|g| g.combos.len()).product();
        multisets.push(MultisetSpace { indices, groups, tuples });
    }

    let mut offsets = Vec::with_capacity(multisets.len());
    let mut total = 0usize;
    for m in &multisets {
        offsets.push(total);
        total += m.tuples;
    }
    let subgroup_counts = cache
        .iter()
        .map(|(&d, v)| (d, v.len()))
        .collect();
    Ok(TupleSpace { multisets, offsets, total, subgroup_counts })
}

impl TupleSpace {
    /// The subgroup list of the global tuple `t` (mixed-radix decode).
    fn tuple(&self, t: usize) -> Vec<Arc<SchreierGraph>> {
        let m = match self.offsets.binary_search(&t) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let space = &self.multisets[m];
        let mut rest = t - self.offsets[m];
        let mut ranks = vec![0usize; space.groups.len()];
        for (i, g) in space.groups.iter().enumerate().rev() {
            ranks[i] = rest % g.combos.len();
            rest /= g.combos.len();
        }
        let mut out = Vec::new();
        for (g, &rank) in space.groups.iter().zip(&ranks) {
            for &pos in &g.combos[rank] {
                out.push(g.subgroups[pos].clone());
            }
        }
        out
    }
}

/// One part of a found partition, in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FoundPart {
    /// Canonical action table of the subgroup.
    pub action: Vec<Vec<usize>>,
    /// Accept state in canonical numbering.
    pub accept: usize,
}

/// A partition found by the search, deduplicated across tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoundPartition {
    /// Subgroup indices of the parts, ascending.
    pub indices: Vec<usize>,
    /// The parts, sorted by (action table, accept).
    pub parts: Vec<FoundPart>,
    /// The smallest global tuple index where this partition appeared.
    pub first_tuple_index: usize,
    /// Whether all indices are distinct and greater than 1 — such a find
    /// is a counterexample to the distinct-index expectation.
    pub distinct_indices: bool,
}

impl FoundPartition {
    /// Rebuilds the partition as live automata (for re-verification).
    pub fn to_partition(
        &self,
        alphabet: &Arc<crate::words::Alphabet>,
    ) -> Result<CosetPartition, SearchError> {
        let parts = self
            .parts
            .iter()
            .enumerate()
            .map(|(i, part)| {
                let g = Arc::new(SchreierGraph::from_action(alphabet, part.action.clone())?);
                PartitionPart::new(format!("G{i}"), g.automaton(part.accept)?, None)
                    .map_err(SearchError::from)
            })
            .collect::<Result<Vec<_>, SearchError>>()?;
        CosetPartition::new(parts).map_err(SearchError::from)
    }
}

/// Resumable search position: per-shard watermarks plus raw findings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchState {
    /// Shard count the state was produced with (must match on resume).
    pub shards: usize,
    /// Per shard: how many of its tuples are already processed.
    pub watermarks: Vec<usize>,
    /// Total tuples processed so far.
    pub tuples_done: usize,
    /// Raw findings: `(global tuple index, partition)` in merged order.
    pub finds: Vec<(usize, Vec<FoundPart>, Vec<usize>)>,
}

impl SearchState {
    /// The empty state for a shard count.
    pub fn empty(shards: usize) -> SearchState {
        SearchState {
            shards,
            watermarks: vec![0; shards],
            tuples_done: 0,
            finds: Vec::new(),
        }
    }
}

/// The merged outcome of a counterexample search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    /// Rank searched.
    pub rank: usize,
    /// Index multisets searched, in order.
    pub multisets: Vec<Vec<usize>>,
    /// `(index, canonical subgroup count)` per index that occurred.
    pub subgroup_counts: Vec<(usize, usize)>,
    /// Total subgroup tuples in the space.
    pub total_tuples: usize,
    /// Tuples processed so far (across resumed runs).
    pub tuples_processed: usize,
    /// Whether the space is exhausted.
    pub complete: bool,
    /// All distinct partitions found, sorted by (indices, parts).
    pub partitions: Vec<FoundPartition>,
    /// The subset with pairwise-distinct indices > 1 — expected empty.
    pub counterexamples: Vec<FoundPartition>,
}

/// Canonical table plus the old→new state map of a graph (breadth-first
/// relabeling from the base state, letters in alphabet order).
fn canonical_with_map(g: &SchreierGraph) -> (Vec<Vec<usize>>, Vec<usize>) {
    let d = g.d();
    let rank = g.rank();
    let mut new_of_old = vec![usize::MAX; d];
    let mut old_of_new = Vec::with_capacity(d);
    new_of_old[0] = 0;
    old_of_new.push(0);
    let mut head = 0;
    while head < old_of_new.len() {
        let old = old_of_new[head];
        head += 1;
        for letter in 0..rank {
            let t = g.action()[letter][old];
            if new_of_old[t] == usize::MAX {
                new_of_old[t] = old_of_new.len();
                old_of_new.push(t);
            }
        }
    }
    let table: Vec<Vec<usize>> = (0..rank)
        .map(|letter| {
            (0..d)
                .map(|new| new_of_old[g.action()[letter][old_of_new[new]]])
                .collect()
        })
        .collect();
    (table, new_of_old)
}

/// One shard's work for this run: processes its next tuples up to `cap`.
fn run_shard(
    space: &TupleSpace,
    cfg: &SearchConfig,
    shard: usize,
    start_ordinal: usize,
    cap: usize,
) -> (usize, Vec<(usize, Vec<FoundPart>, Vec<usize>)>) {
    let opts = FindOptions { distinct_only: cfg.distinct_only };
    let mut finds = Vec::new();
    let mut done = 0usize;
    while done < cap {
        let global = shard + cfg.shards * (start_ordinal + done);
        if global >= space.total {
            break;
        }
        let subgroups = space.tuple(global);
        let covers = cover_sets(&subgroups, &opts).expect("enumerated subgroups are coherent");
        for cover in covers {
            // Internal consistency: an exact cover must re-verify.
            let p = cover_to_partition(&subgroups, &cover)
                .expect("enumerated subgroups are coherent");
            let mut indices: Vec<usize> = p.indices();
            indices.sort_unstable();
            let mut parts: Vec<FoundPart> = cover
                .iter()
                .map(|&(i, f)| {
                    let (action, map) = canonical_with_map(&subgroups[i]);
                    FoundPart { action, accept: map[f] }
                })
                .collect();
            parts.sort();
            finds.push((global, parts, indices));
        }
        done += 1;
    }
    (done, finds)
}

fn merge_report(
    cfg: &SearchConfig,
    space: &TupleSpace,
    state: &SearchState,
) -> SearchReport {
    let mut deduped: BTreeMap<Vec<FoundPart>, (usize, Vec<usize>)> = BTreeMap::new();
    for (tuple_index, parts, indices) in &state.finds {
        deduped
            .entry(parts.clone())
            .and_modify(|(first, _)| *first = (*first).min(*tuple_index))
            .or_insert((*tuple_index, indices.clone()));
    }
    let mut partitions: Vec<FoundPartition> = deduped
        .into_iter()
        .map(|(parts, (first_tuple_index, indices))| {
            let distinct_indices = indices.iter().all(|&d| d > 1) && {
                let mut s = indices.clone();
                s.dedup();
                s.len() == indices.len()
            };
            FoundPartition { indices, parts, first_tuple_index, distinct_indices }
        })
        .collect();
    partitions.sort_by(|a, b| {
        (&a.indices, &a.parts).cmp(&(&b.indices, &b.parts))
    });
    let counterexamples: Vec<FoundPartition> = partitions
        .iter()
        .filter(|p| p.distinct_indices)
        .cloned()
        .collect();
    let shard_size = |s: usize| -> usize {
        if space.total > s {
            (space.total - s).div_ceil(cfg.shards)
        } else {
            0
        }
    };
    let complete = (0..cfg.shards).all(|s| state.watermarks[s] >= shard_size(s));
    SearchReport {
        rank: cfg.rank,
        multisets: space.multisets.iter().map(|m| m.indices.clone()).collect(),
        subgroup_counts: space.subgroup_counts.clone(),
        total_tuples: space.total,
        tuples_processed: state.tuples_done,
        complete,
        partitions,
        counterexamples,
    }
}

/// Runs (or continues) a counterexample search.
///
/// Tuples are split deterministically over `cfg.shards` worker threads
/// (tuple `t` belongs to shard `t % shards`); results are merged and
/// deduplicated in a fixed order, so the report is identical for every
/// shard count. A `tuple_budget` caps the new tuples processed in this
/// run — split evenly across shards, again deterministically — and an
/// exceeded budget yields `complete = false` with a state to resume from.
pub fn resume_search(
    cfg: &SearchConfig,
    state: SearchState,
) -> Result<(SearchReport, SearchState), SearchError> {
    validate(cfg)?;
    if state.shards != cfg.shards || state.watermarks.len() != cfg.shards {
        return Err(SearchError::BadState {
            reason: format!(
                "state has {} shards, configuration has {}",
                state.watermarks.len(),
                cfg.shards
            ),
        });
    }
    let space = build_tuple_space(cfg)?;

    let caps: Vec<usize> = match cfg.tuple_budget {
        None => vec![usize::MAX; cfg.shards],
        Some(t) => (0..cfg.shards)
            .map(|s| t / cfg.shards + usize::from(s < t % cfg.shards))
            .collect(),
    };

    let mut results: Vec<(usize, Vec<(usize, Vec<FoundPart>, Vec<usize>)>)> =
        Vec::with_capacity(cfg.shards);
    if cfg.shards == 1 {
        results.push(run_shard(&space, cfg, 0, state.watermarks[0], caps[0]));
    } else {
        let space_ref = &space;
        let state_ref = &state;
        let caps_ref = &caps;
        results = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..cfg.shards)
                .map(|s| {
                    scope.spawn(move || {
                        run_shard(space_ref, cfg, s, state_ref.watermarks[s], caps_ref[s])
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
    }

    let mut new_state = state;
    for (s, (done, finds)) in results.into_iter().enumerate() {
        new_state.watermarks[s] += done;
        new_state.tuples_done += done;
        new_state.finds.extend(finds);
    }
    new_state.finds.sort();
    new_state.finds.dedup();

    let report = merge_report(cfg, &space, &new_state);
    Ok((report, new_state))
}

/// A fresh counterexample search (empty starting state).
pub fn search_counterexamples(
    cfg: &SearchConfig,
) -> Result<(SearchReport, SearchState), SearchError> {
    validate(cfg)?;
    resume_search(cfg, SearchState::empty(cfg.shards))
}
