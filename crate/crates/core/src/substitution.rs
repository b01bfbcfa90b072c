//! Substitutions (non-erasing morphisms of a free monoid), primitivity,
//! fixed points and letter frequencies.

use std::fmt;

use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

/// A non-erasing substitution over an ordered alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    images: Vec<Word>,
}

/// Outcome of the primitivity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Primitivity {
    pub primitive: bool,
    /// Least `n` such that every `θ^n(a)` contains every letter.
    pub witness_power: Option<usize>,
}

/// A letter that is a strict prefix of its image under `θ^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointSeed {
    pub power: usize,
    pub letter: Letter,
}

impl Substitution {
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != alphabet.len() {
            return Err(Error::InvalidInput(format!(
                "{} images given for an alphabet of {} letters",
                images.len(),
                alphabet.len()
            )));
        }
        for (a, image) in images.iter().enumerate() {
            if image.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "image of {:?} is empty (erasing substitution)",
                    alphabet.symbol(a as Letter)
                )));
            }
            alphabet.validate(image)?;
        }
        Ok(Self { alphabet, images })
    }

    /// Builds a substitution from `letter -> image` rules. Every letter of the
    /// alphabet needs exactly one rule.
    pub fn from_rules(alphabet: Alphabet, rules: &[(char, &str)]) -> Result<Self> {
        let mut images: Vec<Option<Word>> = vec![None; alphabet.len()];
        for &(letter, image) in rules {
            let code = alphabet.code(letter).ok_or(Error::UnknownLetter(letter))?;
            let slot = &mut images[code as usize];
            if slot.is_some() {
                return Err(Error::InvalidInput(format!("two rules for letter {letter:?}")));
            }
            *slot = Some(alphabet.parse(image)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(a, img)| {
                img.ok_or_else(|| {
                    Error::InvalidInput(format!("no rule for letter {:?}", alphabet.symbol(a as Letter)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, letter: Letter) -> &[Letter] {
        &self.images[letter as usize]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Image of a word: the concatenation of the letter images in order.
    ///
    /// Panics if `word` holds a code outside the alphabet; use
    /// [`Substitution::try_apply`] on untrusted input.
    pub fn apply(&self, word: &[Letter]) -> Word {
        let len = word.iter().map(|&a| self.images[a as usize].len()).sum();
        let mut out = Vec::with_capacity(len);
        for &a in word {
            out.extend_from_slice(&self.images[a as usize]);
        }
        out
    }

    pub fn try_apply(&self, word: &[Letter]) -> Result<Word> {
        self.alphabet.validate(word)?;
        Ok(self.apply(word))
    }

    /// Applies the substitution to a word written with the alphabet symbols.
    pub fn apply_str(&self, text: &str) -> Result<String> {
        let word = self.alphabet.parse(text)?;
        Ok(self.alphabet.render(&self.apply(&word)))
    }

    /// `θ^k`, with `θ^0` the identity.
    pub fn power(&self, k: usize) -> Self {
        let mut images: Vec<Word> = self.alphabet.codes().map(|a| vec![a]).collect();
        for _ in 0..k {
            images = images.iter().map(|w| self.apply(w)).collect();
        }
        Self {
            alphabet: self.alphabet.clone(),
            images,
        }
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let n = self.alphabet.len();
        let mut counts = vec![vec![0u64; n]; n];
        for (a, image) in self.images.iter().enumerate() {
            for &b in image {
                counts[b as usize][a] += 1;
            }
        }
        IncidenceMatrix { counts }
    }

    /// Decides primitivity by searching for an entrywise positive power of the
    /// incidence pattern, up to the Wielandt bound `(|A|-1)^2 + 1`.
    pub fn is_primitive(&self) -> Primitivity {
        let n = self.alphabet.len();
        let base = self.incidence_matrix().support();
        let bound = (n - 1) * (n - 1) + 1;
        let mut current = base.clone();
        for power in 1..=bound {
            if current.iter().all(|row| row.iter().all(|&x| x)) {
                return Primitivity {
                    primitive: true,
                    witness_power: Some(power),
                };
            }
            current = bool_product(&current, &base);
        }
        Primitivity {
            primitive: false,
            witness_power: None,
        }
    }

    /// Finds a seed for a fixed point: the least power `k`, and within it the
    /// least letter `a`, such that `θ^k(a)` starts with `a` and has length at
    /// least 2. Powers are searched up to `|A|` times the longest cycle of the
    /// first-letter map.
    pub fn prolongable_seed(&self) -> Option<FixedPointSeed> {
        let n = self.alphabet.len();
        let first: Vec<Letter> = self.images.iter().map(|w| w[0]).collect();
        let max_cycle = (0..n)
            .map(|start| {
                let mut x = start as Letter;
                for _ in 0..n {
                    x = first[x as usize];
                }
                // x now lies on a cycle; measure it.
                let mut len = 1;
                let mut y = first[x as usize];
                while y != x {
                    y = first[y as usize];
                    len += 1;
                }
                len
            })
            .max()
            .unwrap_or(1);
        let mut images: Vec<Word> = self.alphabet.codes().map(|a| vec![a]).collect();
        for power in 1..=n * max_cycle {
            // The first two letters decide prolongability; θ(prefix) is a prefix of θ(w).
            images = images
                .iter()
                .map(|w| {
                    let mut next = self.apply(w);
                    next.truncate(2);
                    next
                })
                .collect();
            if let Some(letter) = self
                .alphabet
                .codes()
                .find(|&a| images[a as usize][0] == a && images[a as usize].len() >= 2)
            {
                return Some(FixedPointSeed { power, letter });
            }
        }
        None
    }

    /// Length-`min_len` prefix of the fixed point `θ^ω(seed)`.
    pub fn fixed_point_prefix(&self, seed: Letter, min_len: usize) -> Result<Word> {
        self.alphabet.validate(&[seed])?;
        let image = self.image(seed);
        if image[0] != seed || image.len() < 2 {
            return Err(Error::Precondition(format!(
                "{:?} is not a strict prefix of its image {:?}",
                self.alphabet.symbol(seed),
                self.alphabet.render(image)
            )));
        }
        let mut word = vec![seed];
        while word.len() < min_len {
            // θ(prefix) is again a prefix of the fixed point.
            word = self.apply(&word);
            word.truncate(min_len);
        }
        word.truncate(min_len);
        Ok(word)
    }

    /// Fixed-point prefix from [`Substitution::prolongable_seed`], together
    /// with the seed that produced it.
    pub fn any_fixed_point_prefix(&self, min_len: usize) -> Result<(FixedPointSeed, Word)> {
        let seed = self.prolongable_seed().ok_or_else(|| {
            Error::Precondition("no power of the substitution has a prolongable letter".into())
        })?;
        let word = self.power(seed.power).fixed_point_prefix(seed.letter, min_len)?;
        Ok((seed, word))
    }

    /// Letter frequencies: the Perron eigenvector of the incidence matrix,
    /// normalized to sum 1, computed by power iteration.
    pub fn perron_frequencies(&self) -> Result<Vec<f64>> {
        if !self.is_primitive().primitive {
            return Err(Error::Precondition(
                "letter frequencies need a primitive substitution".into(),
            ));
        }
        Ok(self.incidence_matrix().perron_vector())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, image) in self.images.iter().enumerate() {
            if a > 0 {
                f.write_str(", ")?;
            }
            write!(
                f,
                "{}->{}",
                self.alphabet.symbol(a as Letter),
                self.alphabet.render(image)
            )?;
        }
        Ok(())
    }
}

/// Letter-occurrence counts: entry `(b, a)` is the number of `b` in `θ(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    counts: Vec<Vec<u64>>,
}

impl IncidenceMatrix {
    pub fn size(&self) -> usize {
        self.counts.len()
    }

    pub fn entry(&self, b: Letter, a: Letter) -> u64 {
        self.counts[b as usize][a as usize]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn column_sum(&self, a: Letter) -> u64 {
        self.counts.iter().map(|row| row[a as usize]).sum()
    }

    fn support(&self) -> Vec<Vec<bool>> {
        self.counts
            .iter()
            .map(|row| row.iter().map(|&x| x > 0).collect())
            .collect()
    }

    fn perron_vector(&self) -> Vec<f64> {
        let n = self.size();
        let mut v = vec![1.0 / n as f64; n];
        for _ in 0..100_000 {
            let mut next: Vec<f64> = self
                .counts
                .iter()
                .map(|row| row.iter().zip(&v).map(|(&m, &x)| m as f64 * x).sum())
                .collect();
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= total);
            let delta = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            v = next;
            if delta < 1e-16 {
                break;
            }
        }
        let total: f64 = v.iter().sum();
        v.iter().map(|x| x / total).collect()
    }
}

fn bool_product(x: &[Vec<bool>], y: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| x[i][k] && y[k][j])).collect())
        .collect()
}
