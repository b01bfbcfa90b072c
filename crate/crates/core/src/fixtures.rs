//! Built-in substitutions used throughout the examples and checks.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::substitution::Substitution;
use crate::word::Alphabet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    ThueMorse,
    Fibonacci,
    Tribonacci,
    Tetranacci,
    RudinShapiro,
}

impl Fixture {
    pub const ALL: [Fixture; 5] = [
        Fixture::ThueMorse,
        Fixture::Fibonacci,
        Fixture::Tribonacci,
        Fixture::Tetranacci,
        Fixture::RudinShapiro,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::ThueMorse => "thue-morse",
            Fixture::Fibonacci => "fibonacci",
            Fixture::Tribonacci => "tribonacci",
            Fixture::Tetranacci => "tetranacci",
            Fixture::RudinShapiro => "rudin-shapiro",
        }
    }

    pub fn rules(self) -> &'static [(char, &'static str)] {
        match self {
            Fixture::ThueMorse => &[('a', "ab"), ('b', "ba")],
            Fixture::Fibonacci => &[('a', "ab"), ('b', "a")],
            Fixture::Tribonacci => &[('a', "ab"), ('b', "ac"), ('c', "a")],
            Fixture::Tetranacci => &[('a', "ab"), ('b', "ac"), ('c', "ad"), ('d', "a")],
            Fixture::RudinShapiro => &[('a', "ab"), ('b', "ac"), ('c', "db"), ('d', "dc")],
        }
    }

    pub fn substitution(self) -> Substitution {
        let rules = self.rules();
        let alphabet = Alphabet::latin(rules.len()).expect("fixture alphabet");
        Substitution::from_rules(alphabet, rules).expect("fixture rules are valid")
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fixture::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let known: Vec<_> = Fixture::ALL.iter().map(|f| f.name()).collect();
            Error::InvalidInput(format!("unknown fixture {s:?} (known: {})", known.join(", ")))
        })
    }
}
