//! Elementary moves of the sampler.
//!
//! Two kinds of move map trivial words to trivial words:
//!
//! * **Conjugation** by a letter `x`: `w -> reduce(x w x^-1)`. Changes the
//!   length by -2, 0 or +2.
//! * **Left-insertion** of a relator-closure member `R` at position `m`
//!   (counted from the right): split `w = u v` with `|v| = m`, reduce
//!   `u R` to `u'`, and form `u' v` — but only if that causes no
//!   cancellation to the right of the inserted relator. If the last
//!   letter of `u'` would cancel the first letter of `v`, the move is
//!   *guarded*: it leaves `w` unchanged. The guard is what makes the move
//!   reversible (re-inserting `R^-1` at the same `m` undoes it exactly).
//!
//! [`MoveDescriptor`] names one concrete move; enumeration helpers list
//! every descriptor mapping one word to another, which is how the
//! transition-probability and reversibility checks are built.

use crate::presentation::RelatorTable;
use crate::words::{Letter, Word};

/// `reduce(x w x^-1)`. Prepending one letter to a reduced word cancels at
/// most once, and likewise appending, so no full reduction pass is needed.
pub fn conjugate(w: &Word, x: Letter) -> Word {
    let letters = w.letters();
    let skip_front = letters.first().is_some_and(|f| x.cancels(f));
    let mut out = Vec::with_capacity(letters.len() + 2);
    if !skip_front {
        out.push(x);
    }
    out.extend_from_slice(&letters[usize::from(skip_front)..]);
    let back = x.inverted();
    match out.last() {
        Some(l) if l.cancels(&back) => {
            out.pop();
        }
        _ => out.push(back),
    }
    Word::from_reduced(out)
}

/// Left-inserts relator `R` into `w` at position `m` from the right:
/// `w = u v`, `|v| = m`, result `reduce(u R) v`.
///
/// Returns `None` when the guard fires — i.e. when appending `v` after
/// `reduce(u R)` would cancel — in which case the move leaves `w`
/// unchanged. Panics if `m > |w|`.
pub fn left_insert(w: &Word, relator: &Word, m: usize) -> Option<Word> {
    assert!(m <= w.len(), "insertion position {m} beyond word length {}", w.len());
    let (u, v) = w.letters().split_at(w.len() - m);
    let r = relator.letters();

    // Zipper the boundary of u and R; both sides are reduced, so only
    // the meeting point cancels.
    let max = u.len().min(r.len());
    let mut t = 0;
    while t < max && u[u.len() - 1 - t].cancels(&r[t]) {
        t += 1;
    }
    let u_keep = &u[..u.len() - t];
    let r_keep = &r[t..];

    // Guard: any cancellation between u' = u_keep r_keep and v rejects.
    let last = r_keep.last().or(u_keep.last());
    if let (Some(l), Some(f)) = (last, v.first()) {
        if l.cancels(f) {
            return None;
        }
    }

    let mut out = Vec::with_capacity(u_keep.len() + r_keep.len() + v.len());
    out.extend_from_slice(u_keep);
    out.extend_from_slice(r_keep);
    out.extend_from_slice(v);
    Some(Word::from_reduced(out))
}

/// One concrete elementary move.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MoveDescriptor {
    /// Conjugation by a fixed letter.
    Conjugation { letter: Letter },
    /// Insertion of closure member `relator` (an index into the
    /// [`RelatorTable`]) at position `position` from the right.
    LeftInsertion { relator: usize, position: usize },
}

impl MoveDescriptor {
    /// Applies the move. `None` means a guarded insertion (state
    /// unchanged); conjugations always produce a word.
    pub fn apply(&self, w: &Word, table: &RelatorTable) -> Option<Word> {
        match *self {
            MoveDescriptor::Conjugation { letter } => Some(conjugate(w, letter)),
            MoveDescriptor::LeftInsertion { relator, position } => {
                left_insert(w, &table.members()[relator], position)
            }
        }
    }

    /// The state the chain proposes from `w` under this move; a guarded
    /// insertion proposes `w` itself.
    pub fn proposal(&self, w: &Word, table: &RelatorTable) -> Word {
        self.apply(w, table).unwrap_or_else(|| w.clone())
    }

    pub fn is_conjugation(&self) -> bool {
        matches!(self, MoveDescriptor::Conjugation { .. })
    }
}

/// Every descriptor applicable to a word of length `len`: `2k`
/// conjugations and `|table| * (len + 1)` insertions.
pub fn all_descriptors<'a>(
    len: usize,
    table: &'a RelatorTable,
    generator_count: usize,
) -> impl Iterator<Item = MoveDescriptor> + 'a {
    let conjugations =
        Letter::alphabet(generator_count).map(|letter| MoveDescriptor::Conjugation { letter });
    let insertions = (0..table.len()).flat_map(move |relator| {
        (0..=len).map(move |position| MoveDescriptor::LeftInsertion { relator, position })
    });
    conjugations.chain(insertions)
}

/// All descriptors whose proposal from `w` is exactly `z`. With `z = w`
/// this picks up trivial conjugations and guarded insertions.
pub fn enumerate_moves(
    w: &Word,
    z: &Word,
    table: &RelatorTable,
    generator_count: usize,
) -> Vec<MoveDescriptor> {
    all_descriptors(w.len(), table, generator_count)
        .filter(|d| &d.proposal(w, table) == z)
        .collect()
}

/// Distinct proposals reachable from `w` in one move (including `w`
/// itself when some move proposes it).
pub fn reachable_states(w: &Word, table: &RelatorTable, generator_count: usize) -> Vec<Word> {
    let mut out: Vec<Word> = all_descriptors(w.len(), table, generator_count)
        .map(|d| d.proposal(w, table))
        .collect();
    out.sort();
    out.dedup();
    out
}
