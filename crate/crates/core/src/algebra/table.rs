use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldConfig;

/// Monomials keep their odd factors in a 64-bit mask.
pub const MAX_GENERATORS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub parity: Parity,
    pub degree: u64,
}

impl Generator {
    pub fn odd(name: impl Into<String>, degree: u64) -> Self {
        Generator {
            name: name.into(),
            parity: Parity::Odd,
            degree,
        }
    }

    pub fn even(name: impl Into<String>, degree: u64) -> Self {
        Generator {
            name: name.into(),
            parity: Parity::Even,
            degree,
        }
    }
}

/// The declared generators of a graded-commutative algebra over `F_p`.
///
/// Tensor products are realised by concatenating tables; the Koszul rule of
/// the product then applies across the factors automatically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorTable {
    field: FieldConfig,
    gens: Vec<Generator>,
}

impl GeneratorTable {
    pub fn new(field: FieldConfig, gens: Vec<Generator>) -> Result<Arc<Self>> {
        if gens.len() > MAX_GENERATORS {
            return Err(Error::InvalidInput(format!(
                "at most {MAX_GENERATORS} generators are supported, got {}",
                gens.len()
            )));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty() {
                return Err(Error::InvalidInput("empty generator name".into()));
            }
            let odd_degree = g.degree % 2 == 1;
            if odd_degree != (g.parity == Parity::Odd) {
                return Err(Error::InvalidInput(format!(
                    "generator {} has parity {:?} but degree {}",
                    g.name, g.parity, g.degree
                )));
            }
            if gens[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidInput(format!(
                    "duplicate generator name {}",
                    g.name
                )));
            }
        }
        Ok(Arc::new(GeneratorTable { field, gens }))
    }

    /// `H*(B(Z/p)^n) = E(x_1..x_n) ⊗ P(y_1..y_n)` with the given name prefixes.
    pub fn cohomology_named(
        field: FieldConfig,
        n: usize,
        x_prefix: &str,
        y_prefix: &str,
    ) -> Result<Arc<Self>> {
        let mut gens = Vec::with_capacity(2 * n);
        gens.extend((1..=n).map(|i| Generator::odd(format!("{x_prefix}{i}"), 1)));
        gens.extend((1..=n).map(|i| Generator::even(format!("{y_prefix}{i}"), 2)));
        GeneratorTable::new(field, gens)
    }

    pub fn cohomology(field: FieldConfig, n: usize) -> Result<Arc<Self>> {
        Self::cohomology_named(field, n, "x", "y")
    }

    /// The generators of `self` followed by those of `other`.
    pub fn concat(&self, other: &GeneratorTable) -> Result<Arc<Self>> {
        if self.field != other.field {
            return Err(Error::TableMismatch);
        }
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        GeneratorTable::new(self.field, gens)
    }

    #[inline]
    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    #[inline]
    pub fn generator(&self, idx: usize) -> &Generator {
        &self.gens[idx]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    #[inline]
    pub fn is_odd(&self, idx: usize) -> bool {
        self.gens[idx].parity == Parity::Odd
    }

    #[inline]
    pub fn degree_of(&self, idx: usize) -> u64 {
        self.gens[idx].degree
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn check_index(&self, idx: usize) -> Result<()> {
        if idx < self.gens.len() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "generator index {idx} out of range for a table of {} generators",
                self.gens.len()
            )))
        }
    }
}

impl fmt::Display for GeneratorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[", self.field.p())?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", g.name, g.degree)?;
        }
        write!(f, "]")
    }
}

/// Structural equality with a pointer fast path.
#[inline]
pub(crate) fn same_table(a: &Arc<GeneratorTable>, b: &Arc<GeneratorTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
