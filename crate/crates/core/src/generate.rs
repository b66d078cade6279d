//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::digraph::Digraph;
use crate::reduction::{CnfFormula, Literal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("density {0} is not in [0, 1]")]
    Density(f64),
    #[error("a 3-CNF clause needs at least 3 variables, got {0}")]
    TooFewVariables(usize),
    #[error("a formula needs at least one clause")]
    NoClauses,
}

/// Each ordered pair `(u, v)`, `u != v`, becomes an arc independently with
/// probability `density`. Pairs are visited in lexicographic order.
pub fn random_digraph(n: usize, density: f64, seed: u64) -> Result<Digraph, GenerateError> {
    if !(0.0..=1.0).contains(&density) {
        return Err(GenerateError::Density(density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(density) {
                arcs.push((u, v));
            }
        }
    }
    Ok(Digraph::new(n, arcs).expect("generated arcs are in range"))
}

/// A 3-CNF formula whose clauses each pick three distinct variables and random signs.
pub fn random_3cnf(var_count: usize, clause_count: usize, seed: u64) -> Result<CnfFormula, GenerateError> {
    if var_count < 3 {
        return Err(GenerateError::TooFewVariables(var_count));
    }
    if clause_count == 0 {
        return Err(GenerateError::NoClauses);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..clause_count)
        .map(|_| {
            let vars = rand::seq::index::sample(&mut rng, var_count, 3);
            vars.into_iter().map(|v| Literal::new(v, rng.random_bool(0.5))).collect()
        })
        .collect();
    Ok(CnfFormula::new(var_count, clauses).expect("three distinct variables per clause"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_digraph() {
        let a = random_digraph(8, 0.4, 17).unwrap();
        assert_eq!(a, random_digraph(8, 0.4, 17).unwrap());
        assert_ne!(a, random_digraph(8, 0.4, 18).unwrap());
    }

    #[test]
    fn density_extremes() {
        assert_eq!(random_digraph(5, 0.0, 1).unwrap().arc_count(), 0);
        assert_eq!(random_digraph(5, 1.0, 1).unwrap().arc_count(), 20);
        assert_eq!(random_digraph(5, 1.5, 1), Err(GenerateError::Density(1.5)));
    }

    #[test]
    fn formulas_are_well_formed() {
        let f = random_3cnf(5, 7, 3).unwrap();
        assert_eq!(f.clauses().len(), 7);
        assert_eq!(f, random_3cnf(5, 7, 3).unwrap());
        assert_eq!(random_3cnf(2, 1, 0), Err(GenerateError::TooFewVariables(2)));
    }
}
