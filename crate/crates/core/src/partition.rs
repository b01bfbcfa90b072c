//! Cylinder refinement of a shift into blocks on which the shift map is an
//! order-interval bijection.
//!
//! Starting from the cylinders of the two-letter factors, a cylinder
//! `Cyl(a·u)` is kept as soon as `u` is not left special (the only letter
//! that can precede `u` is then `a`, so dropping the first letter is
//! increasing on the whole cylinder); otherwise it is split by one more
//! letter at the next step. Words that are still splitting at the depth cap
//! approximate the preimages of the infinite left special words.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::language::FactorTable;
use crate::measure::MeasureTable;
use crate::word::{Letter, Word};

/// An emitted cylinder word `v^(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    /// 1-based emission index.
    pub index: usize,
    pub word: Word,
    /// Refinement step at emission, `|word| - 1`.
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionResult {
    pub cylinders: Vec<Cylinder>,
    /// Words of length `depth_cap` whose tail is still left special.
    pub unresolved: Vec<Word>,
    pub depth_cap: usize,
    alphabet_len: usize,
}

/// Where a finite prefix of an infinite word falls in a [`PartitionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Some emitted cylinder word (this index) is a prefix.
    Cylinder(usize),
    /// The prefix extends one of the unresolved words.
    Unresolved,
    /// The prefix is too short to decide.
    TooShort,
    /// No cylinder or unresolved word is compatible with the prefix: it is
    /// not a factor of the shift.
    NotInLanguage,
}

/// Runs the refinement up to words of length `depth_cap`.
pub fn refine(table: &FactorTable, depth_cap: usize) -> Result<PartitionResult> {
    if depth_cap < 2 || depth_cap + 1 > table.n_max() {
        return Err(Error::InvalidInput(format!(
            "depth cap {depth_cap} must lie in [2, {}] for a table of depth {}",
            table.n_max().saturating_sub(1),
            table.n_max()
        )));
    }
    let mut cylinders = Vec::new();
    let mut frontier: Vec<Word> = table.factors(2)?.to_vec();
    let mut unresolved = Vec::new();
    for d in 2..=depth_cap {
        let mut refining = Vec::new();
        for v in frontier {
            if table.is_left_special(&v[1..])? {
                refining.push(v);
            } else {
                cylinders.push(Cylinder {
                    index: cylinders.len() + 1,
                    step: d - 1,
                    word: v,
                });
            }
        }
        if d == depth_cap {
            unresolved = refining;
            break;
        }
        let next_level = table.factors(d + 1)?;
        frontier = Vec::new();
        for v in &refining {
            let range = table.prefix_range(v, d + 1)?;
            frontier.extend_from_slice(&next_level[range]);
        }
    }
    Ok(PartitionResult {
        cylinders,
        unresolved,
        depth_cap,
        alphabet_len: table.alphabet().len(),
    })
}

impl PartitionResult {
    pub fn cylinder(&self, k: usize) -> Option<&Cylinder> {
        k.checked_sub(1).and_then(|i| self.cylinders.get(i))
    }

    pub fn max_cylinder_len(&self) -> usize {
        self.cylinders.iter().map(|c| c.word.len()).max().unwrap_or(0)
    }

    /// Locates an infinite word from its finite prefix.
    pub fn classify_prefix(&self, prefix: &[Letter]) -> Result<Classification> {
        if let Some(&c) = prefix.iter().find(|&&c| c as usize >= self.alphabet_len) {
            return Err(Error::UnknownCode(c));
        }
        if let Some(c) = self.cylinders.iter().find(|c| prefix.starts_with(&c.word)) {
            return Ok(Classification::Cylinder(c.index));
        }
        if self.unresolved.iter().any(|u| prefix.starts_with(u)) {
            return Ok(Classification::Unresolved);
        }
        let open = self
            .cylinders
            .iter()
            .map(|c| &c.word)
            .chain(&self.unresolved)
            .any(|w| w.starts_with(prefix));
        Ok(if open {
            Classification::TooShort
        } else {
            Classification::NotInLanguage
        })
    }

    /// `1 - Σ_k μ(Cyl(v^(k)))`, the mass left to the unresolved words.
    pub fn residual_mass(&self, measures: &MeasureTable) -> Result<BigRational> {
        let mut covered = BigRational::zero();
        for c in &self.cylinders {
            let m = measures
                .estimate(&c.word)
                .ok_or_else(|| Error::InvalidInput(format!("no measure entry for cylinder {}", c.index)))?;
            covered += m;
        }
        Ok(BigRational::one() - covered)
    }
}
