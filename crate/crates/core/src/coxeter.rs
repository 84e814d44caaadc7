//! Exact combinatorics of the right-angled Coxeter group attached to a
//! finite simple graph: normal forms, reduced products, clique words, and
//! the index sets that the operator decompositions range over.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

pub type Letter = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("letter {0} out of range for graph with {1} vertices")]
    LetterOutOfRange(Letter, usize),
    #[error("self-loop on vertex {0} is not allowed")]
    SelfLoop(Letter),
    #[error("edge ({0},{1}) references a vertex out of range")]
    EdgeOutOfRange(Letter, Letter),
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("expected a clique word, got {0}")]
    NotCliqueWord(String),
    #[error("expected a reduced product")]
    NotReducedProduct,
}

/// Finite simple graph with vertices `0..n`, the fixed total order on
/// vertices being the usual integer order (used for ShortLex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<bool>,
}

/// Group element in ShortLex-least reduced form. Only constructed through
/// [`SimpleGraph::normal_form`] and the operations built on it, so the
/// invariant holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn e() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letter_set(&self) -> BTreeSet<Letter> {
        self.0.iter().copied().collect()
    }

    /// ShortLex comparison: length first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.shortlex_cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "e")
        } else {
            let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Triple splitting (w1, w2, w3): w1·w2·w3 reduced with clique middle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleSplit {
    pub w1: Word,
    pub w2: Word,
    pub w3: Word,
}

/// Tuple (n_l, n_r, u_l, u_r, t) indexing a splitting pattern; the clique
/// triple (u_l, u_r, t) must lie in the set returned by
/// [`SimpleGraph::enumerate_clique_triples`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RhoTuple {
    pub n_l: usize,
    pub n_r: usize,
    pub u_l: Word,
    pub u_r: Word,
    pub t: Word,
}

impl RhoTuple {
    pub fn degree(&self) -> usize {
        self.n_l + self.u_l.len() + self.t.len() + self.u_r.len() + self.n_r
    }
}

/// A ρ-tuple together with a sub-clique word r of t.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TauTuple {
    pub rho: RhoTuple,
    pub r: Word,
}

/// The six word sets attached to a word u, truncated at length D.
#[derive(Debug, Clone)]
pub struct WordSets {
    pub wl: Vec<Word>,
    pub wr: Vec<Word>,
    pub wtl: Vec<Word>,
    pub wtr: Vec<Word>,
    pub wtl_n: Vec<Word>,
    pub wtr_n: Vec<Word>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: &[(Letter, Letter)]) -> Result<SimpleGraph, CoxeterError> {
        if n == 0 {
            return Err(CoxeterError::EmptyGraph);
        }
        let mut adj = vec![false; n * n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(CoxeterError::EdgeOutOfRange(a, b));
            }
            if a == b {
                return Err(CoxeterError::SelfLoop(a));
            }
            adj[a * n + b] = true;
            adj[b * n + a] = true;
        }
        Ok(SimpleGraph { n, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, a: Letter, b: Letter) -> bool {
        self.adj[a * self.n + b]
    }

    /// All cliques of the graph, including the empty clique, as sorted
    /// letter lists.
    pub fn cliques(&self) -> Vec<Vec<Letter>> {
        let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
        let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
        while let Some(cur) = frontier.pop() {
            let start = cur.last().map(|&l| l + 1).unwrap_or(0);
            for v in start..self.n {
                if cur.iter().all(|&u| self.adjacent(u, v)) {
                    let mut next = cur.clone();
                    next.push(v);
                    out.push(next.clone());
                    frontier.push(next);
                }
            }
        }
        out.sort();
        out
    }

    pub fn clique_count(&self) -> usize {
        self.cliques().len()
    }

    fn check_letters(&self, seq: &[Letter]) -> Result<(), CoxeterError> {
        for &l in seq {
            if l >= self.n {
                return Err(CoxeterError::LetterOutOfRange(l, self.n));
            }
        }
        Ok(())
    }

    /// ShortLex-least reduced word equivalent to the given letter sequence.
    pub fn normal_form(&self, seq: &[Letter]) -> Result<Word, CoxeterError> {
        self.check_letters(seq)?;
        let mut s: Vec<Letter> = seq.to_vec();
        // Reduce: delete any pair of equal letters separated only by
        // neighbours of that letter, until no such pair remains.
        'outer: loop {
            for i in 0..s.len() {
                for j in (i + 1)..s.len() {
                    if s[j] == s[i] {
                        // Everything strictly between i and j commutes with
                        // s[i] (otherwise the scan would have stopped).
                        s.remove(j);
                        s.remove(i);
                        continue 'outer;
                    }
                    if !self.adjacent(s[i], s[j]) {
                        break;
                    }
                }
            }
            break;
        }
        let (sorted, _) = self.sort_reduced(&s);
        Ok(Word(sorted))
    }

    /// Lexicographically least representative of a reduced letter sequence,
    /// together with the stable permutation `perm` (perm[src] = dst) that
    /// realizes it by commuting swaps. Equal letters keep their order.
    pub fn sort_reduced(&self, seq: &[Letter]) -> (Vec<Letter>, Vec<usize>) {
        let m = seq.len();
        let mut remaining: Vec<(Letter, usize)> =
            seq.iter().copied().zip(0..m).collect();
        let mut out: Vec<Letter> = Vec::with_capacity(m);
        let mut perm = vec![0usize; m];
        for dst in 0..m {
            // Positions movable to the front: every earlier remaining letter
            // commutes with (and differs from) this one.
            let mut best: Option<usize> = None;
            for i in 0..remaining.len() {
                let li = remaining[i].0;
                let movable = remaining[..i]
                    .iter()
                    .all(|&(lj, _)| lj != li && self.adjacent(lj, li));
                if movable {
                    match best {
                        None => best = Some(i),
                        Some(b) if li < remaining[b].0 => best = Some(i),
                        _ => {}
                    }
                }
            }
            let i = best.expect("reduced sequence always has a movable letter");
            let (_, src) = remaining.remove(i);
            out.push(seq[src]);
            perm[src] = dst;
        }
        (out, perm)
    }

    pub fn word_from_letters(&self, seq: &[Letter]) -> Result<Word, CoxeterError> {
        self.normal_form(seq)
    }

    pub fn single(&self, v: Letter) -> Word {
        assert!(v < self.n);
        Word(vec![v])
    }

    pub fn multiply(&self, w1: &Word, w2: &Word) -> Word {
        let mut seq = w1.0.clone();
        seq.extend_from_slice(&w2.0);
        self.normal_form(&seq).expect("letters already validated")
    }

    pub fn multiply_all(&self, ws: &[&Word]) -> Word {
        let mut seq = Vec::new();
        for w in ws {
            seq.extend_from_slice(&w.0);
        }
        self.normal_form(&seq).expect("letters already validated")
    }

    pub fn inverse(&self, w: &Word) -> Word {
        let seq: Vec<Letter> = w.0.iter().rev().copied().collect();
        self.normal_form(&seq).expect("letters already validated")
    }

    pub fn is_reduced_product(&self, ws: &[&Word]) -> bool {
        let total: usize = ws.iter().map(|w| w.len()).sum();
        self.multiply_all(ws).len() == total
    }

    pub fn is_clique_word(&self, w: &Word) -> bool {
        let l = &w.0;
        for i in 0..l.len() {
            for j in (i + 1)..l.len() {
                if !self.adjacent(l[i], l[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Clique word from a set of pairwise-adjacent letters.
    pub fn clique_word(&self, letters: &[Letter]) -> Result<Word, CoxeterError> {
        let mut ls: Vec<Letter> = letters.to_vec();
        ls.sort_unstable();
        ls.dedup();
        let w = Word(ls);
        if !self.is_clique_word(&w) {
            return Err(CoxeterError::NotCliqueWord(w.to_string()));
        }
        Ok(w)
    }

    /// Does w start with u, i.e. |w| = |u| + |u⁻¹w|?
    pub fn starts_with(&self, w: &Word, u: &Word) -> bool {
        if u.len() > w.len() {
            return false;
        }
        self.multiply(&self.inverse(u), w).len() == w.len() - u.len()
    }

    /// Does w end with u, i.e. |w| = |wu⁻¹| + |u|?
    pub fn ends_with(&self, w: &Word, u: &Word) -> bool {
        if u.len() > w.len() {
            return false;
        }
        self.multiply(w, &self.inverse(u)).len() == w.len() - u.len()
    }

    /// Maximal clique words that w starts with (s_l) and ends with (s_r).
    pub fn clique_prefix_suffix(&self, w: &Word) -> (Word, Word) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for v in 0..self.n {
            let sv = self.single(v);
            if self.starts_with(w, &sv) {
                left.push(v);
            }
            if self.ends_with(w, &sv) {
                right.push(v);
            }
        }
        (Word(left), Word(right))
    }

    pub fn s_l(&self, w: &Word) -> Word {
        self.clique_prefix_suffix(w).0
    }

    pub fn s_r(&self, w: &Word) -> Word {
        self.clique_prefix_suffix(w).1
    }

    /// All group elements of length at most `d`, in ShortLex order.
    pub fn enumerate_words(&self, d: usize) -> Vec<Word> {
        let mut all: Vec<Word> = vec![Word::e()];
        let mut level: Vec<Word> = vec![Word::e()];
        for _ in 0..d {
            let mut next: HashSet<Word> = HashSet::new();
            for w in &level {
                for v in 0..self.n {
                    let cand = self.multiply(w, &self.single(v));
                    if cand.len() == w.len() + 1 {
                        next.insert(cand);
                    }
                }
            }
            level = next.into_iter().collect();
            all.extend(level.iter().cloned());
            if level.is_empty() {
                break;
            }
        }
        all.sort();
        all
    }

    /// Left divisors of w: all u such that w starts with u.
    pub fn left_divisors(&self, w: &Word) -> Vec<Word> {
        let mut seen: HashSet<Word> = HashSet::new();
        seen.insert(Word::e());
        let mut frontier = vec![Word::e()];
        while let Some(u) = frontier.pop() {
            for v in 0..self.n {
                let cand = self.multiply(&u, &self.single(v));
                if cand.len() == u.len() + 1
                    && self.starts_with(w, &cand)
                    && !seen.contains(&cand)
                {
                    seen.insert(cand.clone());
                    frontier.push(cand);
                }
            }
        }
        let mut out: Vec<Word> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// The six word sets for u (each truncated to length ≤ D; the W̃_n
    /// variants additionally filtered to length n ≤ D).
    pub fn word_sets(&self, u: &Word, n: usize, d: usize) -> WordSets {
        let all = self.enumerate_words(d);
        let su = self.clique_prefix_suffix(u);
        let mut sets = WordSets {
            wl: Vec::new(),
            wr: Vec::new(),
            wtl: Vec::new(),
            wtr: Vec::new(),
            wtl_n: Vec::new(),
            wtr_n: Vec::new(),
        };
        for w in all {
            let uw = self.multiply(u, &w);
            if uw.len() == u.len() + w.len() {
                sets.wl.push(w.clone());
                if self.s_l(&uw) == su.0 {
                    sets.wtl.push(w.clone());
                    if w.len() == n {
                        sets.wtl_n.push(w.clone());
                    }
                }
            }
            let wu = self.multiply(&w, u);
            if wu.len() == w.len() + u.len() {
                sets.wr.push(w.clone());
                if self.s_r(&wu) == su.1 {
                    sets.wtr.push(w.clone());
                    if w.len() == n {
                        sets.wtr_n.push(w.clone());
                    }
                }
            }
        }
        sets
    }

    /// Membership tests for the individual word sets (no materialization).
    pub fn in_wl(&self, u: &Word, w: &Word) -> bool {
        self.multiply(u, w).len() == u.len() + w.len()
    }

    pub fn in_wr(&self, u: &Word, w: &Word) -> bool {
        self.multiply(w, u).len() == w.len() + u.len()
    }

    pub fn in_wtl(&self, u: &Word, w: &Word) -> bool {
        self.in_wl(u, w) && self.s_l(&self.multiply(u, w)) == self.s_l(u)
    }

    pub fn in_wtr(&self, u: &Word, w: &Word) -> bool {
        self.in_wr(u, w) && self.s_r(&self.multiply(w, u)) == self.s_r(u)
    }

    pub fn in_wtr_n(&self, u: &Word, w: &Word, n: usize) -> bool {
        w.len() == n && self.in_wtr(u, w)
    }

    /// The set of triple splittings of w.
    pub fn triple_splittings(&self, w: &Word) -> Vec<TripleSplit> {
        let mut out = Vec::new();
        for w1 in self.left_divisors(w) {
            let rest = self.multiply(&self.inverse(&w1), w);
            for w2 in self.left_divisors(&rest) {
                if !self.is_clique_word(&w2) {
                    continue;
                }
                let w3 = self.multiply(&self.inverse(&w2), &rest);
                out.push(TripleSplit {
                    w1: w1.clone(),
                    w2,
                    w3,
                });
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// The unique ρ-tuple whose pattern a given splitting matches
    /// (recovery formulas: t = w2, u_l = s_r(w1 w2)·w2, u_r = s_r(w3⁻¹ w2)·w2,
    /// n_l = |w1| − |u_l|, n_r = |w3| − |u_r|).
    pub fn rho_of_split(&self, omega: &TripleSplit) -> RhoTuple {
        let t = omega.w2.clone();
        let u_l = self.multiply(&self.s_r(&self.multiply(&omega.w1, &t)), &t);
        let u_r = self.multiply(
            &self.s_r(&self.multiply(&self.inverse(&omega.w3), &t)),
            &t,
        );
        RhoTuple {
            n_l: omega.w1.len() - u_l.len(),
            n_r: omega.w3.len() - u_r.len(),
            u_l,
            u_r,
            t,
        }
    }

    /// Splittings of w matching the ρ-pattern: w1 = v_l·u_l, w2 = t,
    /// w3 = u_r⁻¹·v_r⁻¹ with v_l ∈ W̃_{n_l}^R(u_l t), v_r ∈ W̃_{n_r}^R(u_r t).
    pub fn splittings_for_rho(&self, w: &Word, rho: &RhoTuple) -> Vec<TripleSplit> {
        if rho.degree() != w.len() {
            return Vec::new();
        }
        let ult = self.multiply(&rho.u_l, &rho.t);
        let urt = self.multiply(&rho.u_r, &rho.t);
        self.triple_splittings(w)
            .into_iter()
            .filter(|omega| {
                if omega.w2 != rho.t {
                    return false;
                }
                // v_l = w1·u_l⁻¹ must shorten by |u_l| and lie in W̃_{n_l}^R(u_l t).
                let v_l = self.multiply(&omega.w1, &self.inverse(&rho.u_l));
                if omega.w1.len() < rho.u_l.len()
                    || v_l.len() != omega.w1.len() - rho.u_l.len()
                {
                    return false;
                }
                if !self.in_wtr_n(&ult, &v_l, rho.n_l) {
                    return false;
                }
                let v_r = self.multiply(&self.inverse(&omega.w3), &self.inverse(&rho.u_r));
                if omega.w3.len() < rho.u_r.len()
                    || v_r.len() != omega.w3.len() - rho.u_r.len()
                {
                    return false;
                }
                self.in_wtr_n(&urt, &v_r, rho.n_r)
            })
            .collect()
    }

    /// The set of clique triples (u_l, u_r, t): u_l·t and t·u_r clique
    /// words and u_l·t·u_r reduced. Equivalent at letter level to: the
    /// three letter sets are pairwise disjoint cliques with u_l∪t and
    /// t∪u_r cliques.
    pub fn enumerate_clique_triples(&self) -> Vec<(Word, Word, Word)> {
        let cliques = self.cliques();
        let mut out = Vec::new();
        for cl in &cliques {
            for cr_ in &cliques {
                for ct in &cliques {
                    let u_l = Word(cl.clone());
                    let u_r = Word(cr_.clone());
                    let t = Word(ct.clone());
                    let ult = self.multiply(&u_l, &t);
                    let tur = self.multiply(&t, &u_r);
                    if ult.len() != u_l.len() + t.len() || !self.is_clique_word(&ult) {
                        continue;
                    }
                    if tur.len() != t.len() + u_r.len() || !self.is_clique_word(&tur) {
                        continue;
                    }
                    let full = self.multiply_all(&[&u_l, &t, &u_r]);
                    if full.len() != u_l.len() + t.len() + u_r.len() {
                        continue;
                    }
                    out.push((u_l, u_r, t));
                }
            }
        }
        out.sort();
        out
    }

    /// The growth constant: sum of 2^|t| over all clique triples.
    pub fn c_gamma(&self) -> u64 {
        self.enumerate_clique_triples()
            .iter()
            .map(|(_, _, t)| 1u64 << t.len())
            .sum()
    }

    /// All ρ-tuples of a given degree.
    pub fn rho_tuples(&self, degree: usize) -> Vec<RhoTuple> {
        let mut out = Vec::new();
        for (u_l, u_r, t) in self.enumerate_clique_triples() {
            let fixed = u_l.len() + t.len() + u_r.len();
            if fixed > degree {
                continue;
            }
            for n_l in 0..=(degree - fixed) {
                let n_r = degree - fixed - n_l;
                out.push(RhoTuple {
                    n_l,
                    n_r,
                    u_l: u_l.clone(),
                    u_r: u_r.clone(),
                    t: t.clone(),
                });
            }
        }
        out.sort();
        out
    }

    /// All sub-clique words r of a clique word t.
    pub fn sub_cliques(&self, t: &Word) -> Vec<Word> {
        let letters = t.letters();
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << letters.len()) {
            let sub: Vec<Letter> = letters
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &l)| l)
                .collect();
            out.push(Word(sub));
        }
        out.sort();
        out
    }
}

/// Shuffle data: the product word of a reduced tuple together with the
/// stable leg permutation (perm[src] = dst position in the product's
/// representative).
pub fn shuffle_perm(g: &SimpleGraph, ws: &[&Word]) -> Result<(Word, Vec<usize>), CoxeterError> {
    let mut seq: Vec<Letter> = Vec::new();
    for w in ws {
        seq.extend_from_slice(w.letters());
    }
    let total = seq.len();
    let prod = g.normal_form(&seq)?;
    if prod.len() != total {
        return Err(CoxeterError::NotReducedProduct);
    }
    let (sorted, perm) = g.sort_reduced(&seq);
    debug_assert_eq!(sorted, prod.letters());
    Ok((prod, perm))
}

/// Standard test graphs used throughout the suites.
pub fn test_graphs() -> Vec<(&'static str, SimpleGraph)> {
    vec![
        ("G1", SimpleGraph::new(1, &[]).unwrap()),
        ("G2", SimpleGraph::new(2, &[]).unwrap()),
        ("G3", SimpleGraph::new(2, &[(0, 1)]).unwrap()),
        ("G4", SimpleGraph::new(3, &[(0, 1), (1, 2)]).unwrap()),
    ]
}

/// Brute-force oracle: BFS closure over single delete (equal adjacent
/// letters) and swap (commuting adjacent letters) moves; returns the
/// ShortLex-least sequence of minimal length in the closure.
pub fn bfs_normal_form_oracle(g: &SimpleGraph, seq: &[Letter]) -> Vec<Letter> {
    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    let mut frontier: Vec<Vec<Letter>> = vec![seq.to_vec()];
    seen.insert(seq.to_vec());
    let mut best = seq.to_vec();
    while let Some(cur) = frontier.pop() {
        if cur.len() < best.len() || (cur.len() == best.len() && cur < best) {
            best = cur.clone();
        }
        for i in 0..cur.len().saturating_sub(1) {
            if cur[i] == cur[i + 1] {
                let mut next = cur.clone();
                next.remove(i + 1);
                next.remove(i);
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            } else if g.adjacent(cur[i], cur[i + 1]) {
                let mut next = cur.clone();
                next.swap(i, i + 1);
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
    }
    best
}

/// Brute-force triple-splitting oracle: enumerate ordered triples of words
/// with lengths summing to |w|, reduced product equal to w, clique middle.
pub fn brute_force_triple_splittings(g: &SimpleGraph, w: &Word) -> Vec<TripleSplit> {
    let all = g.enumerate_words(w.len());
    let mut out = Vec::new();
    for w1 in &all {
        for w2 in &all {
            if !g.is_clique_word(w2) {
                continue;
            }
            for w3 in &all {
                if w1.len() + w2.len() + w3.len() != w.len() {
                    continue;
                }
                if &g.multiply_all(&[w1, w2, w3]) == w {
                    out.push(TripleSplit {
                        w1: w1.clone(),
                        w2: w2.clone(),
                        w3: w3.clone(),
                    });
                }
            }
        }
    }
    out.sort();
    out
}

/// Brute-force clique-triple oracle: filter all word triples built from
/// cliques by the three defining conditions directly.
pub fn brute_force_clique_triples(g: &SimpleGraph) -> Vec<(Word, Word, Word)> {
    let clique_words: Vec<Word> = g
        .cliques()
        .iter()
        .map(|c| g.clique_word(c).unwrap())
        .collect();
    let mut out = Vec::new();
    for u_l in &clique_words {
        for u_r in &clique_words {
            for t in &clique_words {
                let ult = g.multiply(u_l, t);
                let tur = g.multiply(t, u_r);
                let reduced_lt = ult.len() == u_l.len() + t.len();
                let reduced_tr = tur.len() == t.len() + u_r.len();
                if !(reduced_lt && g.is_clique_word(&ult)) {
                    continue;
                }
                if !(reduced_tr && g.is_clique_word(&tur)) {
                    continue;
                }
                let full = g.multiply_all(&[u_l, t, u_r]);
                if full.len() == u_l.len() + t.len() + u_r.len() {
                    out.push((u_l.clone(), u_r.clone(), t.clone()));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Group all splittings of w by their recovered ρ (used to check the
/// partition property).
pub fn partition_by_rho(
    g: &SimpleGraph,
    w: &Word,
) -> HashMap<RhoTuple, Vec<TripleSplit>> {
    let mut map: HashMap<RhoTuple, Vec<TripleSplit>> = HashMap::new();
    for omega in g.triple_splittings(w) {
        let rho = g.rho_of_split(&omega);
        map.entry(rho).or_default().push(omega);
    }
    map
}
