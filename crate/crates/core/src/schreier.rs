//! Schreier graphs of finite-index subgroups.
//!
//! The Schreier graph of a subgroup `H <= F_n` has one state per right
//! coset, with each letter acting as a permutation of the states (the
//! graph is complete and bi-deterministic). State 0 is the coset `H`
//! itself. A subgroup given by generator words is built by folding a
//! wedge of loops; the subgroup has finite index exactly when the folded
//! graph is letter-complete.
//!
//! States produced by this module are always in canonical order: the
//! breadth-first discovery order from state 0, trying letters in alphabet
//! order. Two subgroups are equal iff their canonical action tables are
//! equal.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::words::{Alphabet, SignedLetter, Word, WordError};

/// Errors from graph construction and walks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchreierError {
    /// No (non-identity) generators: the trivial subgroup has infinite
    /// index in a free group of positive rank.
    #[error("no non-identity generators: trivial subgroup has infinite index")]
    EmptyGenerators,
    /// The folded graph is not letter-complete, so the subgroup has
    /// infinite index. Reports the first deficient state in breadth-first
    /// order together with the letter and edge direction that is missing.
    #[error(
        "subgroup has infinite index: state {state} has no {} edge for letter {letter:?}",
        if *.outgoing { "outgoing" } else { "incoming" }
    )]
    InfiniteIndex {
        /// Deficient state (breadth-first numbering of the folded core).
        state: usize,
        /// Letter whose edge is missing.
        letter: String,
        /// True when the missing edge is outgoing.
        outgoing: bool,
    },
    /// Word and graph are over different alphabets.
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    /// An explicit action table row is not a permutation.
    #[error("action of letter {letter:?} is not a permutation")]
    NotAPermutation {
        /// The offending letter.
        letter: String,
    },
    /// An explicit action table does not act transitively.
    #[error("action is not transitive: {reached} of {d} states reachable from state 0")]
    NotTransitive {
        /// States reachable from 0.
        reached: usize,
        /// Total states.
        d: usize,
    },
    /// A state index is out of range.
    #[error("state {state} out of range for graph with {d} states")]
    StateOutOfRange {
        /// The bad state.
        state: usize,
        /// Number of states.
        d: usize,
    },
    /// A word error surfaced while building from generators.
    #[error(transparent)]
    Word(#[from] WordError),
}

/// The Schreier graph: a transitive permutation action of the free group
/// on coset states, with state 0 the subgroup itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierGraph {
    alphabet: Arc<Alphabet>,
    /// `action[l][s]` = state reached from `s` by generator `l`.
    action: Vec<Vec<usize>>,
    /// `inverse[l][t]` = the unique `s` with `action[l][s] = t`.
    inverse: Vec<Vec<usize>>,
}

impl SchreierGraph {
    /// Builds a graph from an explicit action table `action[letter][state]`.
    ///
    /// Each row must be a permutation of `0..d` and the joint action must
    /// be transitive. The table is taken as-is (no relabeling); use
    /// [`SchreierGraph::canonical_form`] to compare subgroups.
    pub fn from_action(
        alphabet: &Arc<Alphabet>,
        action: Vec<Vec<usize>>,
    ) -> Result<Self, SchreierError> {
        if action.len() != alphabet.rank() {
            return Err(SchreierError::AlphabetMismatch);
        }
        let d = action.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(SchreierError::NotTransitive { reached: 0, d: 0 });
        }
        let mut inverse = vec![vec![usize::MAX; d]; action.len()];
        for (l, row) in action.iter().enumerate() {
            if row.len() != d {
                return Err(SchreierError::NotAPermutation {
                    letter: alphabet.name(l).to_string(),
                });
            }
            for (s, &t) in row.iter().enumerate() {
                if t >= d || inverse[l][t] != usize::MAX {
                    return Err(SchreierError::NotAPermutation {
                        letter: alphabet.name(l).to_string(),
                    });
                }
                inverse[l][t] = s;
            }
        }
        let g = SchreierGraph { alphabet: alphabet.clone(), action, inverse };
        let reached = g.reachable_count();
        if reached != d {
            return Err(SchreierError::NotTransitive { reached, d });
        }
        Ok(g)
    }

    /// Number of states (the subgroup's index).
    pub fn d(&self) -> usize {
        self.action[0].len()
    }

    /// Rank of the ambient free group.
    pub fn rank(&self) -> usize {
        self.action.len()
    }

    /// The alphabet.
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// The action table `action[letter][state]`.
    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// State reached from `s` by one signed letter.
    pub fn step(&self, s: usize, l: SignedLetter) -> usize {
        if l.inverse {
            self.inverse[l.letter][s]
        } else {
            self.action[l.letter][s]
        }
    }

    /// State reached from `start` by reading a whole word.
    pub fn walk(&self, start: usize, w: &Word) -> Result<usize, SchreierError> {
        if w.alphabet() != &self.alphabet {
            return Err(SchreierError::AlphabetMismatch);
        }
        if start >= self.d() {
            return Err(SchreierError::StateOutOfRange { state: start, d: self.d() });
        }
        Ok(w.letters().iter().fold(start, |s, &l| self.step(s, l)))
    }

    /// Shortest positive representative words for every coset.
    ///
    /// Breadth-first from state 0 trying letters in alphabet order, so
    /// each representative is the lexicographically least among the
    /// shortest positive words reaching its state. `rep(0)` is empty.
    pub fn coset_reps(&self) -> CosetRepTable {
        let d = self.d();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; d]; // (state, letter)
        let mut seen = vec![false; d];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            for l in 0..self.rank() {
                let t = self.action[l][s];
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, l));
                    queue.push_back(t);
                }
            }
        }
        let reps = (0..d)
            .map(|mut s| {
                let mut letters = Vec::new();
                while let Some((p, l)) = parent[s] {
                    letters.push(SignedLetter::gen(l));
                    s = p;
                }
                letters.reverse();
                Word::from_letters(&self.alphabet, letters).expect("letters are in range")
            })
            .collect();
        CosetRepTable { reps }
    }

    /// The relabeling `old state -> canonical state` (breadth-first from
    /// 0, letters in alphabet order).
    fn bfs_relabel(&self) -> Vec<usize> {
        bfs_relabel_table(&self.action)
    }

    /// The canonical action table of this subgroup.
    ///
    /// Relabels states in breadth-first discovery order; two graphs
    /// describe the same subgroup iff their canonical tables are equal.
    pub fn canonical_form(&self) -> Vec<Vec<usize>> {
        let relabel = self.bfs_relabel();
        apply_relabel(&self.action, &relabel)
    }

    /// This subgroup with states in canonical order.
    pub fn canonicalized(&self) -> SchreierGraph {
        let action = self.canonical_form();
        SchreierGraph::from_action(&self.alphabet, action).expect("relabeling preserves validity")
    }

    /// The automaton accepting one fixed coset of this subgroup.
    pub fn automaton(self: &Arc<Self>, accept: usize) -> Result<CosetAutomaton, SchreierError> {
        if accept >= self.d() {
            return Err(SchreierError::StateOutOfRange { state: accept, d: self.d() });
        }
        Ok(CosetAutomaton { graph: self.clone(), accept })
    }

    fn reachable_count(&self) -> usize {
        // Positive steps suffice: each letter is a permutation of a finite
        // set, so its inverse is a positive power of itself.
        let d = self.d();
        let mut seen = vec![false; d];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut count = 1;
        while let Some(s) = queue.pop_front() {
            for row in &self.action {
                let t = row[s];
                if !seen[t] {
                    seen[t] = true;
                    count += 1;
                    queue.push_back(t);
                }
            }
        }
        count
    }
}

fn bfs_relabel_table(action: &[Vec<usize>]) -> Vec<usize> {
    let d = action[0].len();
    let mut relabel = vec![usize::MAX; d];
    relabel[0] = 0;
    let mut order = VecDeque::from([0usize]);
    let mut next = 1;
    while let Some(s) = order.pop_front() {
        for row in action {
            let t = row[s];
            if relabel[t] == usize::MAX {
                relabel[t] = next;
                next += 1;
                order.push_back(t);
            }
        }
    }
    debug_assert_eq!(next, d, "relabeling requires a transitive action");
    relabel
}

fn apply_relabel(action: &[Vec<usize>], relabel: &[usize]) -> Vec<Vec<usize>> {
    let d = action[0].len();
    action
        .iter()
        .map(|row| {
            let mut new_row = vec![0; d];
            for (s, &t) in row.iter().enumerate() {
                new_row[relabel[s]] = relabel[t];
            }
            new_row
        })
        .collect()
}

/// Recognizer for one coset: the Schreier graph plus an accept state.
///
/// A word `w` lies in the coset `H·t` (where `t` is any representative
/// with `walk(0, t) = accept`) exactly when `walk(0, w) = accept`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAutomaton {
    graph: Arc<SchreierGraph>,
    accept: usize,
}

impl CosetAutomaton {
    /// The underlying graph.
    pub fn graph(&self) -> &Arc<SchreierGraph> {
        &self.graph
    }

    /// Start state (always the subgroup's own coset).
    pub fn start(&self) -> usize {
        0
    }

    /// Accept state.
    pub fn accept(&self) -> usize {
        self.accept
    }

    /// Index of the subgroup (number of states).
    pub fn d(&self) -> usize {
        self.graph.d()
    }

    /// Whether a word lies in this coset.
    pub fn accepts(&self, w: &Word) -> Result<bool, SchreierError> {
        Ok(self.graph.walk(0, w)? == self.accept)
    }
}

/// Shortest positive coset representatives, indexed by state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetRepTable {
    reps: Vec<Word>,
}

impl CosetRepTable {
    /// Representative of state `i` (`rep(0)` is the empty word).
    pub fn rep(&self, i: usize) -> &Word {
        &self.reps[i]
    }

    /// All representatives in state order.
    pub fn reps(&self) -> &[Word] {
        &self.reps
    }

    /// Number of cosets.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    /// True when there are no cosets (never happens for valid graphs).
    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Builds the Schreier graph of the subgroup generated by `generators`.
///
/// Starts from a wedge of loops at a base vertex (one loop per reduced
/// generator) and folds: whenever two same-letter edges leave, or enter, a
/// common vertex, their far endpoints are identified, until no fold
/// applies. The subgroup has finite index iff the folded graph has exactly
/// one outgoing and one incoming edge per letter at every vertex;
/// otherwise [`SchreierError::InfiniteIndex`] reports the first deficiency.
///
/// The result is canonically labeled, so it does not depend on the order
/// (or redundancy) of the generators.
pub fn build_schreier(
    alphabet: &Arc<Alphabet>,
    generators: &[Word],
) -> Result<SchreierGraph, SchreierError> {
    for g in generators {
        if g.alphabet() != alphabet {
            return Err(SchreierError::AlphabetMismatch);
        }
    }
    let generators: Vec<&Word> = generators.iter().filter(|g| !g.is_empty()).collect();
    if generators.is_empty() {
        return Err(SchreierError::EmptyGenerators);
    }

    // Wedge of loops: edge (src, letter, dst) means src --letter--> dst.
    let mut uf = UnionFind::new(1);
    let base = 0;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for g in &generators {
        let mut prev = base;
        let n = g.len();
        for (i, &l) in g.letters().iter().enumerate() {
            let next = if i + 1 == n { base } else { uf.push() };
            if l.inverse {
                edges.push((next, l.letter, prev));
            } else {
                edges.push((prev, l.letter, next));
            }
            prev = next;
        }
    }

    // Fold to a fixpoint. Each pass normalizes endpoints to class
    // representatives, drops duplicate edges, and merges the far endpoints
    // of any two same-letter edges sharing a near endpoint.
    loop {
        let mut changed = false;
        let mut seen = std::collections::HashSet::new();
        let mut out: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut inn: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut kept: Vec<(usize, usize, usize)> = Vec::new();
        for &(s, l, t) in &edges {
            let (s, t) = (uf.find(s), uf.find(t));
            if !seen.insert((s, l, t)) {
                changed = true; // duplicate edge collapsed
                continue;
            }
            if let Some(&t2) = out.get(&(s, l)) {
                if uf.union(t, t2) {
                    changed = true;
                }
            } else {
                out.insert((s, l), t);
            }
            if let Some(&s2) = inn.get(&(t, l)) {
                if uf.union(s, s2) {
                    changed = true;
                }
            } else {
                inn.insert((t, l), s);
            }
            kept.push((s, l, t));
        }
        edges = kept;
        if !changed {
            break;
        }
    }

    // Collect surviving classes in a deterministic breadth-first order
    // over existing edges (both directions), then check completeness.
    let rank = alphabet.rank();
    let base_root = uf.find(base);
    let mut out_map: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    let mut in_map: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    for &(s, l, t) in &edges {
        out_map.insert((s, l), t);
        in_map.insert((t, l), s);
    }
    let mut order: Vec<usize> = vec![base_root];
    let mut index_of: std::collections::HashMap<usize, usize> =
        std::collections::HashMap::from([(base_root, 0)]);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for l in 0..rank {
            for next in [out_map.get(&(v, l)), in_map.get(&(v, l))].into_iter().flatten() {
                if !index_of.contains_key(next) {
                    index_of.insert(*next, order.len());
                    order.push(*next);
                }
            }
        }
    }
    for (i, &v) in order.iter().enumerate() {
        for l in 0..rank {
            if !out_map.contains_key(&(v, l)) {
                return Err(SchreierError::InfiniteIndex {
                    state: i,
                    letter: alphabet.name(l).to_string(),
                    outgoing: true,
                });
            }
            if !in_map.contains_key(&(v, l)) {
                return Err(SchreierError::InfiniteIndex {
                    state: i,
                    letter: alphabet.name(l).to_string(),
                    outgoing: false,
                });
            }
        }
    }

    let d = order.len();
    let mut action = vec![vec![0usize; d]; rank];
    for (i, &v) in order.iter().enumerate() {
        for (l, row) in action.iter_mut().enumerate() {
            row[i] = index_of[&out_map[&(v, l)]];
        }
    }
    let g = SchreierGraph::from_action(alphabet, action)?;
    Ok(g.canonicalized())
}

/// Enumerates all subgroups of index exactly `d`, as canonical Schreier
/// graphs, in lexicographic order of their action tables.
///
/// A table is canonical when breadth-first search from state 0 (letters in
/// alphabet order) discovers states in numeric order, so each subgroup
/// appears exactly once. The search fills the table cell by cell in that
/// same order, which makes the canonicity and transitivity constraints
/// prunable early; only permutation actions are generated.
pub fn enumerate_subgroups(alphabet: &Arc<Alphabet>, d: usize) -> Vec<SchreierGraph> {
    assert!(d >= 1, "index must be at least 1");
    let rank = alphabet.rank();
    let mut action = vec![vec![usize::MAX; d]; rank];
    let mut used = vec![vec![false; d]; rank];
    let mut results = Vec::new();
    fill_cell(alphabet, d, rank, 0, 0, &mut action, &mut used, &mut results);
    results
}

#[allow(clippy::too_many_arguments)]
fn fill_cell(
    alphabet: &Arc<Alphabet>,
    d: usize,
    rank: usize,
    cell: usize,
    max_disc: usize,
    action: &mut [Vec<usize>],
    used: &mut [Vec<bool>],
    results: &mut Vec<SchreierGraph>,
) {
    if cell == d * rank {
        debug_assert_eq!(max_disc, d - 1);
        let g = SchreierGraph::from_action(alphabet, action.to_vec())
            .expect("construction maintains permutations and transitivity");
        results.push(g);
        return;
    }
    let (s, l) = (cell / rank, cell % rank);
    if s > max_disc {
        // State s was never discovered by earlier states: any completion
        // would be non-transitive or non-canonical.
        return;
    }
    // Known states first (in numeric order), then at most one fresh state.
    let fresh = max_disc + 1;
    for t in 0..=fresh.min(d - 1) {
        if t < fresh && used[l][t] {
            continue;
        }
        action[l][s] = t;
        used[l][t] = true;
        let new_max = max_disc.max(t);
        fill_cell(alphabet, d, rank, cell + 1, new_max, action, used, results);
        used[l][t] = false;
        action[l][s] = usize::MAX;
    }
}

/// Plain union-find with path halving.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn push(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        v
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns true when two distinct classes were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Alphabet> {
        Alphabet::with_rank(2).unwrap()
    }

    fn words(alphabet: &Arc<Alphabet>, texts: &[&str]) -> Vec<Word> {
        texts.iter().map(|t| Word::parse(alphabet, t).unwrap()).collect()
    }

    /// The index-4 subgroup generated by a^4, b^4, aB, aaBB, aaaBBB: both
    /// letters act as the 4-cycle 0 -> 1 -> 2 -> 3 -> 0.
    fn k_graph() -> SchreierGraph {
        let a = f2();
        build_schreier(&a, &words(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB"])).unwrap()
    }

    #[test]
    fn whole_group_has_one_state() {
        let a = f2();
        let g = build_schreier(&a, &words(&a, &["a", "b"])).unwrap();
        assert_eq!(g.d(), 1);
        assert_eq!(g.action(), &[vec![0], vec![0]]);
    }

    #[test]
    fn four_cycle_subgroup() {
        let g = k_graph();
        assert_eq!(g.d(), 4);
        assert_eq!(g.action(), &[vec![1, 2, 3, 0], vec![1, 2, 3, 0]]);
    }

    #[test]
    fn index_two_swap_subgroup() {
        let a = f2();
        let g = build_schreier(&a, &words(&a, &["aa", "bb", "ab"])).unwrap();
        assert_eq!(g.d(), 2);
        assert_eq!(g.action(), &[vec![1, 0], vec![1, 0]]);
    }

    #[test]
    fn generator_order_and_redundancy_do_not_matter() {
        let a = f2();
        let g1 = build_schreier(&a, &words(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB"])).unwrap();
        let g2 = build_schreier(&a, &words(&a, &["aaaBBB", "aB", "b^4", "aaBB", "a^4"])).unwrap();
        // Extra elements of the same subgroup fold away too.
        let g3 = build_schreier(
            &a,
            &words(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB", "a^8", "aBaB"]),
        )
        .unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1, g3);
    }

    #[test]
    fn infinite_index_is_detected() {
        let a = f2();
        let err = build_schreier(&a, &words(&a, &["a"])).unwrap_err();
        assert!(matches!(err, SchreierError::InfiniteIndex { letter, .. } if letter == "b"));
        // Commutator subgroup of F_2 contains neither generator: infinite index.
        let err = build_schreier(&a, &words(&a, &["abAB"])).unwrap_err();
        assert!(matches!(err, SchreierError::InfiniteIndex { .. }));
    }

    #[test]
    fn empty_generator_lists_are_rejected() {
        let a = f2();
        assert_eq!(build_schreier(&a, &[]).unwrap_err(), SchreierError::EmptyGenerators);
        let gens = words(&a, &["aA", ""]);
        assert_eq!(build_schreier(&a, &gens).unwrap_err(), SchreierError::EmptyGenerators);
    }

    #[test]
    fn generators_return_to_base() {
        let a = f2();
        let gens = words(&a, &["a^4", "b^4", "aB", "aaBB", "aaaBBB"]);
        let g = build_schreier(&a, &gens).unwrap();
        for w in &gens {
            assert_eq!(g.walk(0, w).unwrap(), 0, "generator {w} must fix the base coset");
        }
        // A non-member moves it.
        let w = Word::parse(&a, "ab").unwrap();
        assert_ne!(g.walk(0, &w).unwrap(), 0);
    }

    #[test]
    fn walk_handles_inverse_letters() {
        let g = k_graph();
        let a = g.alphabet().clone();
        assert_eq!(g.walk(0, &Word::parse(&a, "A").unwrap()).unwrap(), 3);
        assert_eq!(g.walk(2, &Word::parse(&a, "aB").unwrap()).unwrap(), 2);
    }

    #[test]
    fn walk_rejects_foreign_words_and_bad_states() {
        let g = k_graph();
        let other = Alphabet::with_rank(3).unwrap();
        let w = Word::parse(&other, "c").unwrap();
        assert_eq!(g.walk(0, &w).unwrap_err(), SchreierError::AlphabetMismatch);
        let a = g.alphabet().clone();
        let w = Word::parse(&a, "a").unwrap();
        assert!(matches!(g.walk(9, &w), Err(SchreierError::StateOutOfRange { state: 9, .. })));
    }

    #[test]
    fn reps_are_shortest_then_lex() {
        let g = k_graph();
        let reps = g.coset_reps();
        let texts: Vec<String> = reps.reps().iter().map(Word::to_string).collect();
        assert_eq!(texts, ["", "a", "aa", "aaa"]);
        for (i, rep) in reps.reps().iter().enumerate() {
            assert_eq!(g.walk(0, rep).unwrap(), i);
        }
    }

    #[test]
    fn from_action_validates() {
        let a = f2();
        // Not a permutation.
        assert!(matches!(
            SchreierGraph::from_action(&a, vec![vec![0, 0], vec![1, 0]]),
            Err(SchreierError::NotAPermutation { .. })
        ));
        // Permutations but not transitive.
        assert!(matches!(
            SchreierGraph::from_action(&a, vec![vec![0, 1], vec![0, 1]]),
            Err(SchreierError::NotTransitive { reached: 1, d: 2 })
        ));
        // Wrong number of rows.
        assert!(matches!(
            SchreierGraph::from_action(&a, vec![vec![0]]),
            Err(SchreierError::AlphabetMismatch)
        ));
    }

    #[test]
    fn canonical_form_is_relabel_invariant() {
        let a = f2();
        // The K graph with states renamed by the permutation 0,2,1,3.
        let renamed = SchreierGraph::from_action(
            &a,
            vec![vec![2, 3, 1, 0], vec![2, 3, 1, 0]],
        )
        .unwrap();
        assert_eq!(renamed.canonical_form(), k_graph().canonical_form());
    }

    #[test]
    fn enumeration_matches_known_small_counts() {
        let a = f2();
        assert_eq!(enumerate_subgroups(&a, 1).len(), 1);
        assert_eq!(enumerate_subgroups(&a, 2).len(), 3);
        assert_eq!(enumerate_subgroups(&a, 3).len(), 13);
        assert_eq!(enumerate_subgroups(&a, 4).len(), 71);
    }

    #[test]
    fn enumeration_yields_distinct_canonical_graphs() {
        let a = f2();
        let subs = enumerate_subgroups(&a, 3);
        let mut seen = std::collections::HashSet::new();
        for g in &subs {
            assert_eq!(g.canonical_form(), g.action(), "enumerated graphs are canonical");
            assert!(seen.insert(g.action().to_vec()), "no duplicates");
        }
    }

    #[test]
    fn rank_one_enumeration_is_the_cycle() {
        let z = Alphabet::with_rank(1).unwrap();
        for d in 1..=12 {
            let subs = enumerate_subgroups(&z, d);
            assert_eq!(subs.len(), 1, "index {d}");
            let expected: Vec<usize> = (0..d).map(|s| (s + 1) % d).collect();
            assert_eq!(subs[0].action(), &[expected]);
        }
    }

    #[test]
    fn automaton_accepts_its_coset() {
        let g = Arc::new(k_graph());
        let a = g.alphabet().clone();
        let m = g.automaton(1).unwrap();
        assert!(m.accepts(&Word::parse(&a, "a").unwrap()).unwrap());
        assert!(m.accepts(&Word::parse(&a, "b").unwrap()).unwrap());
        assert!(m.accepts(&Word::parse(&a, "a^5").unwrap()).unwrap());
        assert!(!m.accepts(&Word::parse(&a, "a^4").unwrap()).unwrap());
        assert!(g.automaton(4).is_err());
    }
}
