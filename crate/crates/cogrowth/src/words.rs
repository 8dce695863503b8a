//! Freely reduced words over an indexed generating set.
//!
//! Generators are identified by index; a [`Letter`] is a generator index
//! plus a sign, and a [`Word`] is a sequence of letters containing no
//! adjacent pair `x x^-1`. All constructors reduce their input, so a
//! `Word` is freely reduced by construction and `len()` is the reduced
//! word length used throughout the sampler.

use std::fmt;

/// One symbol of a word: a generator or the inverse of one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter {
    index: u16,
    inverse: bool,
}

impl Letter {
    /// The letter `g_index` (positive) or `g_index^-1` (inverse).
    pub fn new(index: u16, inverse: bool) -> Self {
        Letter { index, inverse }
    }

    /// Generator index into the presentation's alphabet.
    pub fn index(&self) -> u16 {
        self.index
    }

    /// True for `g^-1`, false for `g`.
    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    /// The formal inverse of this letter.
    pub fn inverted(&self) -> Letter {
        Letter { index: self.index, inverse: !self.inverse }
    }

    /// Whether `self * other` cancels in the free group.
    pub fn cancels(&self, other: &Letter) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }

    /// All `2k` letters over `k` generators, in index order with the
    /// positive letter before its inverse.
    pub fn alphabet(generator_count: usize) -> impl Iterator<Item = Letter> {
        (0..generator_count as u16)
            .flat_map(|i| [Letter::new(i, false), Letter::new(i, true)])
    }
}

/// A freely reduced word. The empty word is the free-group identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    /// Free reduction of an arbitrary letter sequence: one stack pass,
    /// cancelling adjacent inverse pairs until none remain.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let iter = letters.into_iter();
        let mut stack: Vec<Letter> = Vec::with_capacity(iter.size_hint().0);
        for l in iter {
            match stack.last() {
                Some(top) if top.cancels(&l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Word { letters: stack }
    }

    /// Builds a word from letters that are already reduced.
    ///
    /// Debug builds assert reducedness; release builds trust the caller.
    /// Internal move code uses this on sequences it has reduced itself.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(
            letters.windows(2).all(|p| !p[0].cancels(&p[1])),
            "from_reduced called with a reducible sequence"
        );
        Word { letters }
    }

    /// Single letter as a word.
    pub fn from_letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Reduced word length `|w|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// True exactly for the identity of the free group.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letters of the word, left to right.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// `w^-1`: letters reversed and inverted. No reduction needed — the
    /// inverse of a reduced word is reduced.
    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverted).collect(),
        }
    }

    /// Free product `u * v`, reduced. Both inputs are reduced, so only
    /// the boundary can cancel: strip the longest mutually inverse
    /// tail/head pair, then splice.
    pub fn concat(&self, other: &Word) -> Word {
        let t = self.boundary_cancellation(other);
        let mut letters =
            Vec::with_capacity(self.len() + other.len() - 2 * t);
        letters.extend_from_slice(&self.letters[..self.len() - t]);
        letters.extend_from_slice(&other.letters[t..]);
        Word::from_reduced(letters)
    }

    /// Number of letter pairs that cancel where `self`'s tail meets
    /// `other`'s head.
    pub(crate) fn boundary_cancellation(&self, other: &Word) -> usize {
        let max = self.len().min(other.len());
        let mut t = 0;
        while t < max && self.letters[self.len() - 1 - t].cancels(&other.letters[t]) {
            t += 1;
        }
        t
    }

    /// All distinct free reductions of cyclic permutations of `w`:
    /// `reduce(s . p)` over every split `w = p . s`. The word itself is
    /// the `p = ε` split. Result is sorted and deduplicated.
    pub fn cyclic_permutations(&self) -> Vec<Word> {
        let mut out: Vec<Word> = (0..=self.len().saturating_sub(1))
            .map(|cut| {
                let rotated = self.letters[cut..]
                    .iter()
                    .chain(&self.letters[..cut])
                    .copied();
                Word::reduce(rotated)
            })
            .collect();
        if self.is_empty() {
            out.push(Word::empty());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Exponent sum of generator `index` (occurrences of `g` minus
    /// occurrences of `g^-1`).
    pub fn exponent_sum(&self, index: u16) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.index() == index)
            .map(|l| if l.is_inverse() { -1 } else { 1 })
            .sum()
    }

    /// Renders the word with single-letter generator names: lowercase for
    /// the generator, uppercase for its inverse (`a b a^-1` -> "abA").
    /// The empty word renders as "ε".
    pub fn display<'a>(&'a self, names: &'a [char]) -> impl fmt::Display + 'a {
        WordDisplay { word: self, names }
    }
}

struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [char],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "ε");
        }
        for l in self.word.letters() {
            let name = self
                .names
                .get(l.index() as usize)
                .copied()
                .unwrap_or('?');
            let c = if l.is_inverse() {
                name.to_ascii_uppercase()
            } else {
                name
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        for l in &self.letters {
            if l.index() < 26 {
                let name = (b'a' + l.index() as u8) as char;
                let c = if l.is_inverse() { name.to_ascii_uppercase() } else { name };
                write!(f, "{c}")?;
            } else {
                write!(f, "<{}{}>", l.index(), if l.is_inverse() { "'" } else { "" })?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Parses test words in the letter convention used across the crate:
    /// 'a'..'z' are generators 0.., 'A'..'Z' their inverses.
    pub(crate) fn word(s: &str) -> Word {
        Word::reduce(s.chars().map(|c| {
            let inverse = c.is_ascii_uppercase();
            let index = (c.to_ascii_lowercase() as u8 - b'a') as u16;
            Letter::new(index, inverse)
        }))
    }

    #[test]
    fn reduce_cancels_adjacent_inverses() {
        assert_eq!(word("abBA"), Word::empty());
        assert_eq!(word("abBc"), word("ac"));
        assert_eq!(word("aA"), Word::empty());
        assert_eq!(word("baaAAB"), Word::empty());
        // Cascading cancellation through the middle.
        assert_eq!(word("abcCBa"), word("aa"));
    }

    #[test]
    fn reduce_is_idempotent_on_examples() {
        for s in ["", "a", "abab", "aBaB", "abcABC"] {
            let w = word(s);
            assert_eq!(Word::reduce(w.letters().iter().copied()), w);
        }
    }

    #[test]
    fn concat_strips_boundary() {
        assert_eq!(word("ab").concat(&word("Ba")), word("aa"));
        assert_eq!(word("ab").concat(&word("BA")), Word::empty());
        assert_eq!(word("ab").concat(&word("cd")), word("abcd"));
        assert_eq!(Word::empty().concat(&word("x")), word("x"));
        assert_eq!(word("x").concat(&Word::empty()), word("x"));
    }

    #[test]
    fn inverse_reverses_and_flips() {
        assert_eq!(word("ab").inverse(), word("BA"));
        assert_eq!(Word::empty().inverse(), Word::empty());
        assert_eq!(word("aBc").inverse(), word("CbA"));
    }

    #[test]
    fn cyclic_permutations_of_commutator() {
        // abAB has four distinct reduced rotations.
        let perms = word("abAB").cyclic_permutations();
        let expected: Vec<Word> =
            ["abAB", "bABa", "ABab", "BabA"].iter().map(|s| word(s)).collect();
        let mut expected = expected;
        expected.sort();
        assert_eq!(perms, expected);
    }

    #[test]
    fn cyclic_permutations_reduce_unstable_rotations() {
        // aba^-1 is reduced but not cyclically reduced: two of its three
        // rotations reduce to the single letter b.
        let perms = word("abA").cyclic_permutations();
        let mut expected = vec![word("abA"), word("b")];
        expected.sort();
        assert_eq!(perms, expected);
    }

    #[test]
    fn cyclic_permutations_of_periodic_word_collapse() {
        assert_eq!(word("aa").cyclic_permutations(), vec![word("aa")]);
        assert_eq!(Word::empty().cyclic_permutations(), vec![Word::empty()]);
    }

    #[test]
    fn exponent_sums() {
        let w = word("aabAB");
        assert_eq!(w.exponent_sum(0), 1);
        assert_eq!(w.exponent_sum(1), 0);
        assert_eq!(w.exponent_sum(2), 0);
    }

    #[test]
    fn display_uses_case_for_sign() {
        let names = ['a', 'b'];
        assert_eq!(word("abA").display(&names).to_string(), "abA");
        assert_eq!(Word::empty().display(&names).to_string(), "ε");
    }

    fn arb_letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(
            (0u16..4, any::<bool>()).prop_map(|(i, s)| Letter::new(i, s)),
            0..64,
        )
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(ls in arb_letters()) {
            let once = Word::reduce(ls.iter().copied());
            let twice = Word::reduce(once.letters().iter().copied());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn reduction_preserves_length_parity(ls in arb_letters()) {
            let w = Word::reduce(ls.iter().copied());
            prop_assert_eq!(w.len() % 2, ls.len() % 2);
        }

        #[test]
        fn reduction_never_grows(ls in arb_letters()) {
            let w = Word::reduce(ls.iter().copied());
            prop_assert!(w.len() <= ls.len());
        }

        #[test]
        fn word_times_inverse_is_identity(ls in arb_letters()) {
            let w = Word::reduce(ls.iter().copied());
            prop_assert_eq!(w.concat(&w.inverse()), Word::empty());
            prop_assert_eq!(w.inverse().concat(&w), Word::empty());
        }

        #[test]
        fn concat_matches_full_reduction(a in arb_letters(), b in arb_letters()) {
            let u = Word::reduce(a.iter().copied());
            let v = Word::reduce(b.iter().copied());
            let via_concat = u.concat(&v);
            let via_reduce =
                Word::reduce(u.letters().iter().chain(v.letters()).copied());
            prop_assert_eq!(via_concat, via_reduce);
        }

        #[test]
        fn cyclic_permutations_closed_under_rotation(ls in arb_letters()) {
            let w = Word::reduce(ls.iter().copied());
            let perms = w.cyclic_permutations();
            for p in &perms {
                for q in p.cyclic_permutations() {
                    prop_assert!(perms.contains(&q));
                }
            }
        }

        #[test]
        fn exponent_sum_invariant_under_reduction(ls in arb_letters()) {
            let raw: i64 = ls
                .iter()
                .filter(|l| l.index() == 0)
                .map(|l| if l.is_inverse() { -1 } else { 1 })
                .sum();
            let w = Word::reduce(ls.iter().copied());
            prop_assert_eq!(w.exponent_sum(0), raw);
        }
    }
}
