//! Hierarchical log-linear models.
//!
//! The model of a simplicial complex on discrete variables is parameterized
//! by one factor per facet cell. The raw indicator rows of all facet
//! margins are heavily redundant, so they are reduced to a full-rank
//! integer row basis by exact elimination; this keeps the rational row
//! space, and the toric model depends on nothing else.

use crate::error::{Error, Result};
use crate::exact;
use crate::model::ToricModel;

/// Builds the hierarchical model for `facets` (subsets of variable indices)
/// over variables with the given numbers of levels. States are ordered
/// lexicographically with the first variable most significant. The scaling
/// is all ones; use [`ToricModel::with_scaling`] for other scalings.
pub fn hierarchical_model(facets: &[Vec<usize>], levels: &[usize]) -> Result<ToricModel> {
    if facets.is_empty() || levels.is_empty() {
        return Err(Error::InvalidConfig(
            "need at least one facet and one variable".into(),
        ));
    }
    if levels.iter().any(|&l| l < 2) {
        return Err(Error::InvalidConfig(
            "every variable needs at least two levels".into(),
        ));
    }
    for facet in facets {
        if facet.is_empty() {
            return Err(Error::InvalidConfig("facets must be nonempty".into()));
        }
        if facet.iter().any(|&v| v >= levels.len()) {
            return Err(Error::InvalidConfig(format!(
                "facet variable out of range (have {} variables)",
                levels.len()
            )));
        }
    }
    let n: usize = levels.iter().product();

    // One indicator row per cell of each facet margin.
    let mut raw: Vec<Vec<i64>> = Vec::new();
    for facet in facets {
        let cells: usize = facet.iter().map(|&v| levels[v]).product();
        for cell in 0..cells {
            let assignment = decode(cell, facet.iter().map(|&v| levels[v]));
            let mut row = vec![0i64; n];
            for (state, slot) in row.iter_mut().enumerate() {
                let full = decode(state, levels.iter().copied());
                if facet.iter().zip(&assignment).all(|(&v, &a)| full[v] == a) {
                    *slot = 1;
                }
            }
            raw.push(row);
        }
    }

    let basis = exact::integer_row_basis(&raw);
    let basis: Vec<Vec<i64>> = basis
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| i64::try_from(v).map_err(|_| Error::RankReductionFailed))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    let rank = basis.len();

    // The homogenizing row lies in the span (each facet's indicators sum to
    // it); drop one basis row so that basis-minus-row plus ones still spans.
    for drop in 0..rank {
        let a: Vec<Vec<i64>> = basis
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, r)| r.clone())
            .collect();
        if let Ok(model) = ToricModel::new(a, vec![1.0; n]) {
            // Guaranteed by construction, but cheap to verify exactly.
            let mut with_ones = basis.clone();
            with_ones.push(vec![1; n]);
            if exact::row_space_equal_i64(model.a_bar(), &with_ones) {
                return Ok(model);
            }
        }
    }
    Err(Error::RankReductionFailed)
}

fn decode(mut index: usize, sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let sizes: Vec<usize> = sizes.collect();
    let mut out = vec![0usize; sizes.len()];
    for (pos, &size) in sizes.iter().enumerate().rev() {
        out[pos] = index % size;
        index /= size;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cycle_matches_the_printed_matrix() {
        let model = hierarchical_model(&[vec![0, 1], vec![1, 2], vec![0, 2]], &[2, 2, 2]).unwrap();
        assert_eq!(model.n(), 8);
        assert_eq!(model.d(), 7);
        let mut printed = vec![
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            vec![0, 0, 1, 1, 0, 0, 1, 1],
            vec![0, 1, 0, 1, 0, 1, 0, 1],
            vec![0, 0, 0, 0, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 0, 0, 0, 1],
            vec![0, 0, 0, 0, 0, 1, 0, 1],
        ];
        printed.push(vec![1; 8]);
        assert!(exact::row_space_equal_i64(model.a_bar(), &printed));
    }

    #[test]
    fn four_cycle_matches_the_printed_matrix() {
        let model = hierarchical_model(
            &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
            &[2, 2, 2, 2],
        )
        .unwrap();
        assert_eq!(model.n(), 16);
        assert_eq!(model.d(), 9);
        let mut printed = vec![
            vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1],
            vec![0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1],
            vec![0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1],
            vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1],
            vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1],
            vec![0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1],
            vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1],
        ];
        printed.push(vec![1; 16]);
        assert!(exact::row_space_equal_i64(model.a_bar(), &printed));
    }

    #[test]
    fn saturated_single_facet_is_the_full_simplex() {
        let model = hierarchical_model(&[vec![0, 1]], &[2, 3]).unwrap();
        assert_eq!(model.n(), 6);
        assert_eq!(model.d(), 6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(hierarchical_model(&[], &[2, 2]).is_err());
        assert!(hierarchical_model(&[vec![0, 5]], &[2, 2]).is_err());
        assert!(hierarchical_model(&[vec![0]], &[1]).is_err());
    }

    #[test]
    fn no_three_way_interaction_with_an_mary_variable() {
        // One 3-level variable, two binary: 12 states, toric and full rank.
        let model = hierarchical_model(&[vec![0, 1], vec![0, 2], vec![1, 2]], &[3, 2, 2]).unwrap();
        assert_eq!(model.n(), 12);
        // 1 + main effects (2 + 1 + 1) + pairwise terms (2 + 2 + 1).
        assert_eq!(model.d(), 10);
    }
}
