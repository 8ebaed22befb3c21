use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::Lattice;

/// One defining relation of `L ≅ Z^n ⋊ Z^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Relation {
    /// `[x_i, x_j] = 1`
    FiberCommute { i: usize, j: usize },
    /// `[t_i, t_j] = 1`
    BaseCommute { i: usize, j: usize },
    /// `t_j x_i t_j⁻¹ = Π_s x_s^{e_s}`, with `e` the column `i` of `A_j`.
    Conjugation {
        j: usize,
        i: usize,
        #[serde(serialize_with = "ser_exponents", deserialize_with = "de_exponents")]
        exponents: Vec<BigInt>,
    },
}

fn ser_exponents<S: serde::Serializer>(e: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(e.iter().map(|x| x.to_string()))
}

fn de_exponents<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    let raw = Vec::<String>::deserialize(d)?;
    raw.iter()
        .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
        .collect()
}

/// Generators `x_1..x_n` (fiber) and `t_1..t_m` (base) with their relations.
/// Indices are zero-based in the data and one-based in the text rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub fiber_generators: usize,
    pub base_generators: usize,
    pub relations: Vec<Relation>,
}

impl Lattice {
    pub fn presentation(&self) -> Presentation {
        let (n, m) = (self.n(), self.m());
        let mut relations = Vec::with_capacity(n * (n - 1) / 2 + m * (m.saturating_sub(1)) / 2 + n * m);
        for i in 0..n {
            for j in i + 1..n {
                relations.push(Relation::FiberCommute { i, j });
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                relations.push(Relation::BaseCommute { i, j });
            }
        }
        for (j, a) in self.pair().holonomy().iter().enumerate() {
            for i in 0..n {
                relations.push(Relation::Conjugation { j, i, exponents: a.column(i) });
            }
        }
        Presentation { fiber_generators: n, base_generators: m, relations }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::FiberCommute { i, j } => write!(f, "[x{}, x{}] = 1", i + 1, j + 1),
            Relation::BaseCommute { i, j } => write!(f, "[t{}, t{}] = 1", i + 1, j + 1),
            Relation::Conjugation { j, i, exponents } => {
                let word: Vec<String> = exponents
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(s, e)| format!("x{}^{}", s + 1, e))
                    .collect();
                let rhs = if word.is_empty() { "1".to_string() } else { word.join(" ") };
                write!(f, "t{} x{} t{}^-1 = {}", j + 1, i + 1, j + 1, rhs)
            }
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (1..=self.fiber_generators)
            .map(|i| format!("x{i}"))
            .chain((1..=self.base_generators).map(|j| format!("t{j}")))
            .collect();
        writeln!(f, "generators: {}", gens.join(", "))?;
        for r in &self.relations {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
