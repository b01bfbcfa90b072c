//! Letters, words and ordered alphabets.
//!
//! Words are stored as letter codes (`u8`), where code `i` is the `i`-th
//! letter of the [`Alphabet`]. Comparing code vectors therefore gives the
//! lexicographic order induced by the alphabet, independent of how the
//! symbols themselves would sort as host strings.

use std::fmt;

use crate::error::{Error, Result};

/// Index of a letter in its alphabet.
pub type Letter = u8;

/// A finite word as a sequence of letter codes.
pub type Word = Vec<Letter>;

/// Upper bound on the alphabet size, so that letter sets fit in a `u64` mask.
pub const MAX_ALPHABET: usize = 64;

/// An ordered finite alphabet. Construction order is the lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: Vec<char>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("alphabet is empty".into()));
        }
        if letters.len() > MAX_ALPHABET {
            return Err(Error::InvalidInput(format!(
                "alphabet has {} letters, at most {MAX_ALPHABET} supported",
                letters.len()
            )));
        }
        for (i, c) in letters.iter().enumerate() {
            if letters[..i].contains(c) {
                return Err(Error::InvalidInput(format!("duplicate letter {c:?} in alphabet")));
            }
        }
        Ok(Self { letters })
    }

    /// Alphabet `a, b, c, ...` of the given size.
    pub fn latin(size: usize) -> Result<Self> {
        if size > 26 {
            return Err(Error::InvalidInput(format!("no latin alphabet of size {size}")));
        }
        Self::new((0..size as u8).map(|i| (b'a' + i) as char).collect())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn codes(&self) -> impl Iterator<Item = Letter> {
        0..self.letters.len() as Letter
    }

    pub fn symbol(&self, code: Letter) -> char {
        self.letters[code as usize]
    }

    pub fn code(&self, symbol: char) -> Option<Letter> {
        self.letters
            .iter()
            .position(|&c| c == symbol)
            .map(|i| i as Letter)
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        text.chars()
            .map(|c| self.code(c).ok_or(Error::UnknownLetter(c)))
            .collect()
    }

    pub fn render(&self, word: &[Letter]) -> String {
        word.iter().map(|&c| self.symbol(c)).collect()
    }

    /// Checks that every code of `word` names a letter of this alphabet.
    pub fn validate(&self, word: &[Letter]) -> Result<()> {
        match word.iter().find(|&&c| c as usize >= self.letters.len()) {
            Some(&c) => Err(Error::UnknownCode(c)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters.iter().collect();
        f.write_str(&s)
    }
}

/// A set of letters as a bit mask over letter codes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LetterSet(u64);

impl LetterSet {
    pub const EMPTY: Self = Self(0);

    pub fn insert(&mut self, letter: Letter) {
        self.0 |= 1 << letter;
    }

    pub fn contains(self, letter: Letter) -> bool {
        self.0 & (1 << letter) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Letter> {
        (0..MAX_ALPHABET as Letter).filter(move |&c| self.contains(c))
    }
}

impl FromIterator<Letter> for LetterSet {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        let mut set = Self::EMPTY;
        for c in iter {
            set.insert(c);
        }
        set
    }
}
