//! Ground-truth enumeration: exhaustive counts of freely reduced trivial
//! words, driven by exact word-problem oracles for groups where the word
//! problem has an easy faithful model.
//!
//! The counts produced here are independent of the series machinery and
//! of the Markov chain — a plain depth-first walk over the tree of freely
//! reduced words with an exact identity test at every node — which makes
//! them the reference that everything else is compared against.

use crate::presentation::{Presentation, RelatorTable};
use crate::words::{Letter, Word};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

/// Node budget for the reduced-word DFS when none is given explicitly.
pub const DEFAULT_NODE_CAP: u128 = 200_000_000;

/// Bit budget for numerators/denominators in the affine oracle.
const AFFINE_BIT_CAP: u64 = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum BruteForceError {
    #[error("oracle cannot interpret generator index {index} (capacity {capacity})")]
    LetterOutOfRange { index: u16, capacity: usize },
    #[error("oracle expects {expected} generators but the presentation has {found}")]
    GeneratorCountMismatch { expected: usize, found: usize },
    #[error("oracle rejects relator-closure member '{relator}'; oracle and presentation disagree")]
    OracleRejectsRelator { relator: String },
    #[error("enumeration of {nodes} reduced words exceeds the cap of {cap}")]
    CapExceeded { nodes: u128, cap: u128 },
    #[error("affine oracle exceeded {AFFINE_BIT_CAP} bits of precision; word too deep")]
    AffineOverflow,
    #[error("invalid oracle: {0}")]
    InvalidOracle(String),
}

/// An exact decision procedure for "does this freely reduced word
/// represent the identity?" in a specific group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordProblemOracle {
    /// Free group: only the empty word is trivial.
    FreeGroup,
    /// Free abelian group of the given rank: trivial iff every exponent
    /// sum vanishes.
    FreeAbelian { rank: usize },
    /// Free product of cyclic groups of the given orders (each ≥ 2):
    /// trivial iff the syllable normal form is empty.
    FreeProductOfCyclics { orders: Vec<u32> },
    /// Baumslag–Solitar group BS(1,N) via its faithful affine action on
    /// the rationals: `a: x ↦ N·x`, `b: x ↦ x + 1`, letters composed
    /// rightmost first. Trivial iff the composite is the identity map.
    AffineBs1N { n: u32 },
}

impl WordProblemOracle {
    /// How many distinct generators the oracle can interpret; `None`
    /// means any number.
    pub fn generator_capacity(&self) -> Option<usize> {
        match self {
            WordProblemOracle::FreeGroup => None,
            WordProblemOracle::FreeAbelian { rank } => Some(*rank),
            WordProblemOracle::FreeProductOfCyclics { orders } => Some(orders.len()),
            WordProblemOracle::AffineBs1N { .. } => Some(2),
        }
    }

    pub fn validate(&self) -> Result<(), BruteForceError> {
        match self {
            WordProblemOracle::FreeGroup => Ok(()),
            WordProblemOracle::FreeAbelian { rank } => {
                if *rank == 0 {
                    Err(BruteForceError::InvalidOracle("rank must be positive".into()))
                } else {
                    Ok(())
                }
            }
            WordProblemOracle::FreeProductOfCyclics { orders } => {
                if orders.is_empty() || orders.iter().any(|o| *o < 2) {
                    Err(BruteForceError::InvalidOracle(
                        "cyclic factor orders must all be at least 2".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            WordProblemOracle::AffineBs1N { n } => {
                if *n < 2 {
                    Err(BruteForceError::InvalidOracle(
                        "affine oracle needs N ≥ 2 (N = 1 degenerates to Z²)".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Exact identity test.
    pub fn is_identity(&self, w: &Word) -> Result<bool, BruteForceError> {
        self.is_identity_letters(w.letters())
    }

    fn check_capacity(&self, letters: &[Letter]) -> Result<(), BruteForceError> {
        if let Some(capacity) = self.generator_capacity() {
            for l in letters {
                if l.index() as usize >= capacity {
                    return Err(BruteForceError::LetterOutOfRange {
                        index: l.index(),
                        capacity,
                    });
                }
            }
        }
        Ok(())
    }

    fn is_identity_letters(&self, letters: &[Letter]) -> Result<bool, BruteForceError> {
        self.check_capacity(letters)?;
        match self {
            WordProblemOracle::FreeGroup => Ok(letters.is_empty()),
            WordProblemOracle::FreeAbelian { rank } => {
                let mut sums = vec![0i64; *rank];
                for l in letters {
                    sums[l.index() as usize] += if l.is_inverse() { -1 } else { 1 };
                }
                Ok(sums.iter().all(|s| *s == 0))
            }
            WordProblemOracle::FreeProductOfCyclics { orders } => {
                // Stack of syllables (generator, exponent mod order); a
                // syllable whose exponent hits 0 pops, possibly merging
                // its neighbours and cascading.
                let mut stack: Vec<(u16, u32)> = Vec::new();
                for l in letters {
                    let order = orders[l.index() as usize];
                    let add = if l.is_inverse() { order - 1 } else { 1 };
                    match stack.last_mut() {
                        Some((g, e)) if *g == l.index() => {
                            *e = (*e + add) % order;
                            if *e == 0 {
                                stack.pop();
                            }
                        }
                        _ => {
                            stack.push((l.index(), add % order));
                        }
                    }
                }
                Ok(stack.is_empty())
            }
            WordProblemOracle::AffineBs1N { n } => {
                // Composite map x ↦ N^e·x + q, built rightmost letter
                // first: prepending letter l replaces f by l ∘ f.
                let big_n = BigInt::from(*n);
                let mut e: i64 = 0;
                let mut q = BigRational::zero();
                for l in letters.iter().rev() {
                    match (l.index(), l.is_inverse()) {
                        (0, false) => {
                            e += 1;
                            q *= BigRational::from_integer(big_n.clone());
                        }
                        (0, true) => {
                            e -= 1;
                            q /= BigRational::from_integer(big_n.clone());
                        }
                        (1, false) => q += BigRational::one(),
                        (1, true) => q -= BigRational::one(),
                        _ => unreachable!("capacity checked above"),
                    }
                    if q.numer().abs().bits() > AFFINE_BIT_CAP
                        || q.denom().bits() > AFFINE_BIT_CAP
                    {
                        return Err(BruteForceError::AffineOverflow);
                    }
                }
                Ok(e == 0 && q.is_zero())
            }
        }
    }
}

/// Number of freely reduced words of length `1..=max_len` over `k`
/// generator pairs: `2k (2k−1)^(n−1)` summed, saturating.
fn reduced_word_count(k: usize, max_len: usize) -> u128 {
    let branch = (2 * k).saturating_sub(1) as u128;
    let mut total = 0u128;
    let mut level = (2 * k) as u128;
    for _ in 0..max_len {
        total = total.saturating_add(level);
        level = level.saturating_mul(branch);
    }
    total
}

fn check_setup(
    presentation: &Presentation,
    oracle: &WordProblemOracle,
    max_len: usize,
    cap: u128,
) -> Result<(), BruteForceError> {
    oracle.validate()?;
    if let Some(capacity) = oracle.generator_capacity() {
        if presentation.generator_count() != capacity {
            return Err(BruteForceError::GeneratorCountMismatch {
                expected: capacity,
                found: presentation.generator_count(),
            });
        }
    }
    let nodes = reduced_word_count(presentation.generator_count(), max_len);
    if nodes > cap {
        return Err(BruteForceError::CapExceeded { nodes, cap });
    }
    // The oracle must agree that every relator-closure member is trivial;
    // a mismatch means the oracle models a different group (or the
    // generator conventions differ).
    for member in RelatorTable::closure(presentation).members() {
        if !oracle.is_identity(member)? {
            return Err(BruteForceError::OracleRejectsRelator {
                relator: member.display(presentation.names()).to_string(),
            });
        }
    }
    Ok(())
}

/// Depth-first walk over freely reduced words with `prefix` fixed,
/// testing every node against the oracle.
fn dfs_count(
    oracle: &WordProblemOracle,
    k: usize,
    prefix: &mut Vec<Letter>,
    max_len: usize,
    counts: &mut [u64],
) -> Result<(), BruteForceError> {
    if oracle.is_identity_letters(prefix)? {
        counts[prefix.len()] += 1;
    }
    if prefix.len() == max_len {
        return Ok(());
    }
    let last = *prefix.last().expect("dfs_count is entered below the root");
    for l in Letter::alphabet(k) {
        if l.cancels(&last) {
            continue;
        }
        prefix.push(l);
        dfs_count(oracle, k, prefix, max_len, counts)?;
        prefix.pop();
    }
    Ok(())
}

fn count_subtree(
    oracle: &WordProblemOracle,
    k: usize,
    first: Letter,
    max_len: usize,
) -> Result<Vec<u64>, BruteForceError> {
    let mut counts = vec![0u64; max_len + 1];
    let mut prefix = vec![first];
    dfs_count(oracle, k, &mut prefix, max_len, &mut counts)?;
    Ok(counts)
}

/// Exact cogrowth counts `c(0), …, c(max_len)`: the number of freely
/// reduced words of each length that the oracle deems trivial. Work is
/// split across the `2k` first letters.
pub fn count_trivial_words(
    presentation: &Presentation,
    oracle: &WordProblemOracle,
    max_len: usize,
) -> Result<Vec<u64>, BruteForceError> {
    count_trivial_words_with_cap(presentation, oracle, max_len, DEFAULT_NODE_CAP)
}

/// As [`count_trivial_words`] with an explicit node budget.
pub fn count_trivial_words_with_cap(
    presentation: &Presentation,
    oracle: &WordProblemOracle,
    max_len: usize,
    cap: u128,
) -> Result<Vec<u64>, BruteForceError> {
    check_setup(presentation, oracle, max_len, cap)?;
    let k = presentation.generator_count();
    let mut counts = vec![0u64; max_len + 1];
    counts[0] = 1; // the empty word is trivial in every group
    if max_len == 0 {
        return Ok(counts);
    }
    let subtree_counts = map_first_letters(k, |first| count_subtree(oracle, k, first, max_len))?;
    for sub in subtree_counts {
        for (total, c) in counts.iter_mut().zip(&sub) {
            *total += c;
        }
    }
    Ok(counts)
}

/// Sequential twin of [`count_trivial_words`], kept unconditionally for
/// benchmarking the parallel split against a plain walk.
pub fn count_trivial_words_seq(
    presentation: &Presentation,
    oracle: &WordProblemOracle,
    max_len: usize,
) -> Result<Vec<u64>, BruteForceError> {
    check_setup(presentation, oracle, max_len, DEFAULT_NODE_CAP)?;
    let k = presentation.generator_count();
    let mut counts = vec![0u64; max_len + 1];
    counts[0] = 1;
    if max_len == 0 {
        return Ok(counts);
    }
    for first in Letter::alphabet(k) {
        let sub = count_subtree(oracle, k, first, max_len)?;
        for (total, c) in counts.iter_mut().zip(&sub) {
            *total += c;
        }
    }
    Ok(counts)
}

/// Every freely reduced trivial word of length ≤ `max_len`, sorted.
pub fn truncated_state_space(
    presentation: &Presentation,
    oracle: &WordProblemOracle,
    max_len: usize,
    include_empty: bool,
) -> Result<Vec<Word>, BruteForceError> {
    check_setup(presentation, oracle, max_len, DEFAULT_NODE_CAP)?;
    let k = presentation.generator_count();
    let mut words = Vec::new();
    if include_empty {
        words.push(Word::empty());
    }
    if max_len == 0 {
        return Ok(words);
    }
    let per_letter = map_first_letters(k, |first| {
        let mut found = Vec::new();
        let mut prefix = vec![first];
        dfs_collect(oracle, k, &mut prefix, max_len, &mut found)?;
        Ok(found)
    })?;
    for sub in per_letter {
        words.extend(sub);
    }
    words.sort();
    Ok(words)
}

fn dfs_collect(
    oracle: &WordProblemOracle,
    k: usize,
    prefix: &mut Vec<Letter>,
    max_len: usize,
    found: &mut Vec<Word>,
) -> Result<(), BruteForceError> {
    if oracle.is_identity_letters(prefix)? {
        found.push(Word::from_reduced(prefix.clone()));
    }
    if prefix.len() == max_len {
        return Ok(());
    }
    let last = *prefix.last().expect("dfs_collect is entered below the root");
    for l in Letter::alphabet(k) {
        if l.cancels(&last) {
            continue;
        }
        prefix.push(l);
        dfs_collect(oracle, k, prefix, max_len, found)?;
        prefix.pop();
    }
    Ok(())
}

/// Applies `f` to each possible first letter, in parallel when the
/// `parallel` feature is on, and collects results in letter order.
fn map_first_letters<T: Send>(
    k: usize,
    f: impl Fn(Letter) -> Result<T, BruteForceError> + Sync,
) -> Result<Vec<T>, BruteForceError> {
    let letters: Vec<Letter> = Letter::alphabet(k).collect();
    #[cfg(feature = "parallel")]
    {
        letters.par_iter().map(|l| f(*l)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        letters.iter().map(|l| f(*l)).collect()
    }
}

/// Number of length-`n` walks on the 2q-regular tree that start and end
/// at the root, for `n = 0..=max_len` — equivalently the number of
/// arbitrary (not necessarily reduced) words over `q` generator pairs
/// that freely reduce to the empty word.
pub fn regular_tree_returns(q: usize, max_len: usize) -> Vec<BigInt> {
    assert!(q >= 1, "the tree needs a positive degree");
    let away_from_root = BigInt::from(2 * q);
    let away = BigInt::from(2 * q - 1);
    // dist[d] = number of walks of the current length ending at distance d.
    let mut dist: Vec<BigInt> = vec![BigInt::zero(); max_len + 2];
    dist[0] = BigInt::one();
    let mut returns = Vec::with_capacity(max_len + 1);
    returns.push(BigInt::one());
    for _ in 1..=max_len {
        let mut next: Vec<BigInt> = vec![BigInt::zero(); max_len + 2];
        for d in 0..=max_len {
            if dist[d].is_zero() {
                continue;
            }
            let out = if d == 0 { &away_from_root } else { &away };
            let stepped_away = &dist[d] * out;
            next[d + 1] += stepped_away;
            if d > 0 {
                let stepped_back = dist[d].clone();
                next[d - 1] += stepped_back;
            }
        }
        dist = next;
        returns.push(dist[0].clone());
    }
    returns
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::bundled;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle_for(name: &str) -> WordProblemOracle {
        match name {
            "z2" => WordProblemOracle::FreeAbelian { rank: 2 },
            "a2" => WordProblemOracle::FreeProductOfCyclics { orders: vec![2] },
            "k1" => WordProblemOracle::FreeProductOfCyclics { orders: vec![2, 3] },
            "k2" => WordProblemOracle::FreeProductOfCyclics { orders: vec![3, 3] },
            "k3" => WordProblemOracle::FreeProductOfCyclics { orders: vec![2, 2, 2] },
            "bs12" => WordProblemOracle::AffineBs1N { n: 2 },
            "bs13" => WordProblemOracle::AffineBs1N { n: 3 },
            other => panic!("no oracle for {other}"),
        }
    }

    #[test]
    fn abelian_oracle_on_commutators() {
        let p = bundled("z2").unwrap();
        let oracle = oracle_for("z2");
        assert!(oracle.is_identity(&p.word("a b A B").unwrap()).unwrap());
        // A longer trivial word: exponent sums vanish even though it is
        // far from a relator.
        let w = p.word("a^3 b^4 A B a b a^-3 b^-4").unwrap();
        assert_eq!(w.len(), 18);
        assert!(oracle.is_identity(&w).unwrap());
        assert!(!oracle.is_identity(&p.word("a").unwrap()).unwrap());
        assert!(!oracle.is_identity(&p.word("abab").unwrap()).unwrap());
    }

    #[test]
    fn cyclic_factor_oracle_reduces_syllables() {
        let p = bundled("k2").unwrap();
        let oracle = oracle_for("k2");
        assert!(oracle.is_identity(&p.word("a^3").unwrap()).unwrap());
        assert!(!oracle.is_identity(&p.word("a^2").unwrap()).unwrap());
        assert!(!oracle.is_identity(&p.word("a B a b A b A^2").unwrap()).unwrap());

        // Popping a completed syllable can merge its neighbours: in
        // <a,b | a^2, b^3> the word a b^3 a collapses in two cascading
        // steps.
        let k1 = bundled("k1").unwrap();
        let o1 = oracle_for("k1");
        assert!(o1.is_identity(&k1.word("a b^3 a").unwrap()).unwrap());
        assert!(!o1.is_identity(&k1.word("a b^2 a").unwrap()).unwrap());
        assert!(!o1.is_identity(&k1.word("abab").unwrap()).unwrap());
    }

    #[test]
    fn affine_oracle_composes_rightmost_first() {
        let p = bundled("bs12").unwrap();
        let oracle = oracle_for("bs12");
        // a b a^-1 b^-2 in BS(1,2): 2·((x − 2)/2 + 1) = x.
        assert!(oracle.is_identity(&p.word("a b A B^2").unwrap()).unwrap());
        assert!(!oracle.is_identity(&p.word("a b A B").unwrap()).unwrap());
        // Conjugates and inverses of the relator are trivial too.
        assert!(oracle.is_identity(&p.word("b a b A B^3").unwrap()).unwrap());
        assert!(oracle.is_identity(&p.word("b^2 a B A").unwrap()).unwrap());

        let p3 = bundled("bs13").unwrap();
        let o3 = oracle_for("bs13");
        assert!(o3.is_identity(&p3.word("a b A B^3").unwrap()).unwrap());
        assert!(!o3.is_identity(&p3.word("a b A B^2").unwrap()).unwrap());
    }

    #[test]
    fn affine_and_abelian_oracles_agree_on_translations() {
        // Words in a single generator land in the abelian part of
        // BS(1,2); both oracles must give the same verdict.
        let affine = WordProblemOracle::AffineBs1N { n: 2 };
        let abelian = WordProblemOracle::FreeAbelian { rank: 1 };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100_000 {
            let len = rng.gen_range(0..12);
            let letters: Vec<Letter> =
                (0..len).map(|_| Letter::new(0, rng.gen())).collect();
            let w = Word::reduce(letters);
            assert_eq!(
                affine.is_identity(&w).unwrap(),
                abelian.is_identity(&w).unwrap()
            );
        }
    }

    #[test]
    fn affine_oracle_caps_precision() {
        let mut letters = Vec::new();
        for _ in 0..5000 {
            letters.push(Letter::new(0, false));
        }
        letters.push(Letter::new(1, false));
        for _ in 0..5000 {
            letters.push(Letter::new(0, true));
        }
        let w = Word::reduce(letters);
        assert_eq!(w.len(), 10_001);
        let oracle = WordProblemOracle::AffineBs1N { n: 2 };
        assert_eq!(oracle.is_identity(&w).unwrap_err(), BruteForceError::AffineOverflow);
    }

    #[test]
    fn oracle_validation() {
        assert!(WordProblemOracle::FreeProductOfCyclics { orders: vec![2, 1] }
            .validate()
            .is_err());
        assert!(WordProblemOracle::FreeProductOfCyclics { orders: vec![] }
            .validate()
            .is_err());
        assert!(WordProblemOracle::AffineBs1N { n: 1 }.validate().is_err());
        assert!(WordProblemOracle::FreeAbelian { rank: 0 }.validate().is_err());
        assert!(WordProblemOracle::AffineBs1N { n: 2 }.validate().is_ok());
    }

    #[test]
    fn mismatched_oracle_is_rejected() {
        let p = bundled("a2").unwrap();
        // Z is the wrong group for <a | a^2>: the relator has exponent
        // sum 2, so the abelian oracle rejects it.
        let err = count_trivial_words(&p, &WordProblemOracle::FreeAbelian { rank: 1 }, 4)
            .unwrap_err();
        assert!(matches!(err, BruteForceError::OracleRejectsRelator { .. }));
        // Wrong generator count.
        let err =
            count_trivial_words(&p, &WordProblemOracle::FreeAbelian { rank: 2 }, 4).unwrap_err();
        assert_eq!(
            err,
            BruteForceError::GeneratorCountMismatch { expected: 2, found: 1 }
        );
    }

    #[test]
    fn order_two_cyclic_counts() {
        let p = bundled("a2").unwrap();
        let counts = count_trivial_words(&p, &oracle_for("a2"), 9).unwrap();
        assert_eq!(counts, vec![1, 0, 2, 0, 2, 0, 2, 0, 2, 0]);
    }

    #[test]
    fn commutator_lattice_counts_start_with_eight() {
        let p = bundled("z2").unwrap();
        let counts = count_trivial_words(&p, &oracle_for("z2"), 5).unwrap();
        assert_eq!(counts, vec![1, 0, 0, 0, 8, 0]);
    }

    #[test]
    fn free_group_counts_only_the_empty_word() {
        let p = crate::presentation::Presentation::free(2);
        let counts = count_trivial_words(&p, &WordProblemOracle::FreeGroup, 8).unwrap();
        assert_eq!(counts[0], 1);
        assert!(counts[1..].iter().all(|c| *c == 0));
    }

    #[test]
    fn truncated_spaces_match_hand_lists() {
        let z2 = bundled("z2").unwrap();
        let oracle = oracle_for("z2");
        assert!(truncated_state_space(&z2, &oracle, 3, false).unwrap().is_empty());
        let with_eps = truncated_state_space(&z2, &oracle, 4, true).unwrap();
        let closure = RelatorTable::closure(&z2);
        assert_eq!(with_eps.len(), 9);
        assert!(with_eps.contains(&Word::empty()));
        for member in closure.members() {
            assert!(with_eps.contains(member));
        }

        let a2 = bundled("a2").unwrap();
        let spaced = truncated_state_space(&a2, &oracle_for("a2"), 4, true).unwrap();
        let expected: Vec<Word> = ["", "aa", "AA", "aaaa", "AAAA"]
            .iter()
            .map(|s| a2.word(s).unwrap())
            .collect();
        let mut expected = expected;
        expected.sort();
        assert_eq!(spaced, expected);
    }

    #[test]
    fn trivial_word_sets_are_closed_under_inverse_and_rotation() {
        let p = bundled("z2").unwrap();
        let words = truncated_state_space(&p, &oracle_for("z2"), 6, true).unwrap();
        for w in &words {
            assert!(words.binary_search(&w.inverse()).is_ok(), "{w:?}");
            for rot in w.cyclic_permutations() {
                assert!(words.binary_search(&rot).is_ok(), "{w:?} -> {rot:?}");
            }
        }
    }

    #[test]
    fn node_cap_is_enforced_up_front() {
        let p = bundled("z2").unwrap();
        let err = count_trivial_words_with_cap(&p, &oracle_for("z2"), 12, 1000).unwrap_err();
        assert!(matches!(err, BruteForceError::CapExceeded { cap: 1000, .. }));
    }

    #[test]
    fn tree_returns_match_ballot_numbers() {
        // q = 1 is the walk on Z: central binomial coefficients.
        let q1 = regular_tree_returns(1, 6);
        let expected: Vec<BigInt> =
            [1, 0, 2, 0, 6, 0, 20].iter().map(|&n| BigInt::from(n)).collect();
        assert_eq!(q1, expected);
        // q = 2: the 4-regular tree.
        let q2 = regular_tree_returns(2, 4);
        let expected: Vec<BigInt> =
            [1, 0, 4, 0, 28].iter().map(|&n| BigInt::from(n)).collect();
        assert_eq!(q2, expected);
    }

    #[test]
    fn parallel_and_sequential_walks_agree() {
        let p = bundled("k2").unwrap();
        let oracle = oracle_for("k2");
        assert_eq!(
            count_trivial_words(&p, &oracle, 8).unwrap(),
            count_trivial_words_seq(&p, &oracle, 8).unwrap()
        );
    }
}
