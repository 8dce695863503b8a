//! Group presentations and the closure of their relator sets.
//!
//! A presentation file is plain text:
//!
//! ```text
//! # comment
//! gens: a b
//! rel: abAB
//! rel: [a,b]
//! rel: a^2 b A^3 B
//! ```
//!
//! Generators are single lowercase letters; an uppercase letter is the
//! inverse of its lowercase generator. Whitespace inside a word is
//! ignored. `[x,y]` abbreviates the commutator `x^-1 y^-1 x y`, `x^n`
//! repeats an atom (negative `n` inverts), and parentheses group, so
//! nested forms like `[[c,a],a]` or `(ab)^3` are accepted.
//!
//! The insertion move draws from the *closure* of the relator set: every
//! relator, every inverse, and every free reduction of their cyclic
//! permutations, deduplicated. [`RelatorTable`] holds that closure with
//! the uniform distribution over members.

use crate::words::{Letter, Word};
use thiserror::Error;

/// A finite presentation: named generators plus freely reduced,
/// nonempty relator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    names: Vec<char>,
    relators: Vec<Word>,
}

/// Errors from parsing or validating a presentation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: generator list is empty")]
    EmptyGenerators { line: usize },
    #[error("line {line}: duplicate generator '{name}'")]
    DuplicateGenerator { line: usize, name: char },
    #[error("line {line}: generator '{name}' is not a lowercase ASCII letter")]
    BadGeneratorName { line: usize, name: char },
    #[error("line {line}: second 'gens:' directive")]
    DuplicateGeneratorLine { line: usize },
    #[error("line {line}: relator before any 'gens:' line")]
    RelatorBeforeGenerators { line: usize },
    #[error("no 'gens:' line found")]
    MissingGenerators,
    #[error("line {line}: unknown letter '{letter}'")]
    UnknownLetter { line: usize, letter: char },
    #[error("line {line}: relator freely reduces to the empty word")]
    TrivialRelator { line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl Presentation {
    /// Builds a presentation from parts, enforcing the same invariants as
    /// the parser: at least one generator, distinct lowercase names,
    /// nonempty relators over the declared alphabet.
    pub fn new(names: Vec<char>, relators: Vec<Word>) -> Result<Self, ParseError> {
        if names.is_empty() {
            return Err(ParseError::EmptyGenerators { line: 0 });
        }
        for (i, &n) in names.iter().enumerate() {
            if !n.is_ascii_lowercase() {
                return Err(ParseError::BadGeneratorName { line: 0, name: n });
            }
            if names[..i].contains(&n) {
                return Err(ParseError::DuplicateGenerator { line: 0, name: n });
            }
        }
        for r in &relators {
            if r.is_empty() {
                return Err(ParseError::TrivialRelator { line: 0 });
            }
            for l in r.letters() {
                if l.index() as usize >= names.len() {
                    return Err(ParseError::UnknownLetter { line: 0, letter: '?' });
                }
            }
        }
        Ok(Presentation { names, relators })
    }

    /// Free group on `k` generators: no relators.
    pub fn free(k: usize) -> Self {
        let names = (0..k).map(|i| (b'a' + i as u8) as char).collect();
        Presentation { names, relators: Vec::new() }
    }

    /// Parses the presentation text format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut names: Option<Vec<char>> = None;
        let mut relators = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("gens:") {
                if names.is_some() {
                    return Err(ParseError::DuplicateGeneratorLine { line });
                }
                let mut list = Vec::new();
                for c in rest.chars().filter(|c| !c.is_whitespace()) {
                    if !c.is_ascii_lowercase() {
                        return Err(ParseError::BadGeneratorName { line, name: c });
                    }
                    if list.contains(&c) {
                        return Err(ParseError::DuplicateGenerator { line, name: c });
                    }
                    list.push(c);
                }
                if list.is_empty() {
                    return Err(ParseError::EmptyGenerators { line });
                }
                names = Some(list);
            } else if let Some(rest) = content.strip_prefix("rel:") {
                let names = names
                    .as_ref()
                    .ok_or(ParseError::RelatorBeforeGenerators { line })?;
                let letters = parse_word(rest, names, line)?;
                let word = Word::reduce(letters);
                if word.is_empty() {
                    return Err(ParseError::TrivialRelator { line });
                }
                relators.push(word);
            } else {
                return Err(ParseError::Syntax {
                    line,
                    message: format!("expected 'gens:' or 'rel:', got '{content}'"),
                });
            }
        }
        let names = names.ok_or(ParseError::MissingGenerators)?;
        Ok(Presentation { names, relators })
    }

    /// Generator names in index order.
    pub fn names(&self) -> &[char] {
        &self.names
    }

    /// Number of generators `k`; the move alphabet has `2k` letters.
    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    /// The relators as given (freely reduced).
    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Parses a word in this presentation's alphabet (same syntax as the
    /// `rel:` payload). Handy for tests and CLI spot checks.
    pub fn word(&self, text: &str) -> Result<Word, ParseError> {
        Ok(Word::reduce(parse_word(text, &self.names, 0)?))
    }
}

/// Recursive-descent parser for the word syntax.
struct WordParser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [char],
    line: usize,
}

fn parse_word(text: &str, names: &[char], line: usize) -> Result<Vec<Letter>, ParseError> {
    let mut p = WordParser {
        chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
        names,
        line,
    };
    let letters = p.word()?;
    if p.pos != p.chars.len() {
        return Err(p.syntax(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(letters)
}

impl WordParser<'_> {
    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax { line: self.line, message }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<Vec<Letter>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c == ',' || c == ']' || c == ')' {
                break;
            }
            let atom = self.atom()?;
            let exp = self.exponent()?;
            let (atom, times) = if exp < 0 { (invert(&atom), -exp) } else { (atom, exp) };
            for _ in 0..times {
                out.extend_from_slice(&atom);
            }
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Vec<Letter>, ParseError> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(',')?;
                let v = self.word()?;
                self.expect(']')?;
                // [u, v] = u^-1 v^-1 u v
                let mut c = invert(&u);
                c.extend(invert(&v));
                c.extend_from_slice(&u);
                c.extend_from_slice(&v);
                Ok(c)
            }
            Some('(') => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(')')?;
                Ok(u)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let lower = c.to_ascii_lowercase();
                let index = self
                    .names
                    .iter()
                    .position(|&n| n == lower)
                    .ok_or(ParseError::UnknownLetter { line: self.line, letter: c })?;
                Ok(vec![Letter::new(index as u16, c.is_ascii_uppercase())])
            }
            Some(c) => Err(self.syntax(format!("unexpected '{c}'"))),
            None => Err(self.syntax("unexpected end of word".into())),
        }
    }

    /// Parses an optional `^n` suffix; defaults to 1.
    fn exponent(&mut self) -> Result<i64, ParseError> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected digits after '^'".into()));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let value: i64 = digits
            .parse()
            .map_err(|_| self.syntax(format!("exponent '{digits}' out of range")))?;
        Ok(if negative { -value } else { value })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}'")))
        }
    }
}

fn invert(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(Letter::inverted).collect()
}

/// The closed relator set the insertion move draws from, with the uniform
/// distribution over members.
#[derive(Clone, Debug)]
pub struct RelatorTable {
    members: Vec<Word>,
    longest: usize,
}

impl RelatorTable {
    /// Closes the relator set under inversion and reduced cyclic
    /// permutation. Iterates to a fixed point, which matters only for
    /// relators that are not cyclically reduced; for cyclically reduced
    /// ones a single pass already closes the set.
    pub fn closure(presentation: &Presentation) -> RelatorTable {
        let mut members: std::collections::BTreeSet<Word> =
            presentation.relators().iter().cloned().collect();
        let mut queue: Vec<Word> = members.iter().cloned().collect();
        while let Some(w) = queue.pop() {
            let mut candidates = w.cyclic_permutations();
            candidates.push(w.inverse());
            for c in candidates {
                if !c.is_empty() && members.insert(c.clone()) {
                    queue.push(c);
                }
            }
        }
        let members: Vec<Word> = members.into_iter().collect();
        let longest = members.iter().map(Word::len).max().unwrap_or(0);
        RelatorTable { members, longest }
    }

    /// Closure members in a deterministic (sorted) order.
    pub fn members(&self) -> &[Word] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Uniform probability of drawing any one member.
    pub fn member_probability(&self) -> f64 {
        1.0 / self.members.len() as f64
    }

    /// Length of the longest member; bounds the per-move length change.
    pub fn longest(&self) -> usize {
        self.longest
    }
}

/// Presentations shipped with the crate, by short name.
///
/// * `z2` — `Z^2`, the free abelian group of rank 2
/// * `a2` — `Z_2`, the cyclic group of order 2
/// * `k1`, `k2`, `k3` — free products `Z_2 * Z_3`, `Z_3 * Z_3`,
///   `Z_2 * Z_2 * Z_2` (cogrowth known in closed form)
/// * `bs12`, `bs13`, `bs22`, `bs23`, `bs33`, `bs35` — Baumslag–Solitar
///   groups `BS(N,M)`
/// * `basilica1`..`basilica3` — one extension of the basilica group,
///   three different presentations
/// * `f1`..`f3` — Thompson's group `F`, three different presentations
pub const BUNDLED: &[(&str, &str)] = &[
    ("z2", include_str!("../presentations/z2.txt")),
    ("a2", include_str!("../presentations/a2.txt")),
    ("k1", include_str!("../presentations/k1.txt")),
    ("k2", include_str!("../presentations/k2.txt")),
    ("k3", include_str!("../presentations/k3.txt")),
    ("bs12", include_str!("../presentations/bs12.txt")),
    ("bs13", include_str!("../presentations/bs13.txt")),
    ("bs22", include_str!("../presentations/bs22.txt")),
    ("bs23", include_str!("../presentations/bs23.txt")),
    ("bs33", include_str!("../presentations/bs33.txt")),
    ("bs35", include_str!("../presentations/bs35.txt")),
    ("basilica1", include_str!("../presentations/basilica1.txt")),
    ("basilica2", include_str!("../presentations/basilica2.txt")),
    ("basilica3", include_str!("../presentations/basilica3.txt")),
    ("f1", include_str!("../presentations/f1.txt")),
    ("f2", include_str!("../presentations/f2.txt")),
    ("f3", include_str!("../presentations/f3.txt")),
];

/// Source text of a bundled presentation.
pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a bundled presentation by name.
pub fn bundled(name: &str) -> Option<Presentation> {
    bundled_source(name)
        .map(|text| Presentation::parse(text).expect("bundled presentation must parse"))
}
