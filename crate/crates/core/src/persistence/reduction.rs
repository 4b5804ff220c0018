//! Plain left-to-right boundary matrix reduction over every simplex.
//!
//! Slower than the default path but free of its shortcuts (no union-find,
//! no row compression), so the two can be checked against each other.

use super::{add_columns, index_filtration, Bar, PersistenceDiagram};
use crate::error::Result;
use crate::filtration::Filtration;

pub fn compute_persistence_by_reduction(f: &Filtration) -> Result<PersistenceDiagram> {
    let idx = index_filtration(f)?;
    let n = idx.simplices.len();
    let mut pivot_of = vec![usize::MAX; n];
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut paired = vec![false; n];
    let mut bars = Vec::new();
    for j in 0..n {
        let mut col = idx.facets[j].clone();
        while let Some(&low) = col.last() {
            match pivot_of[low] {
                usize::MAX => break,
                k => col = add_columns(&col, &columns[k]),
            }
        }
        if let Some(&low) = col.last() {
            pivot_of[low] = j;
            paired[low] = true;
            paired[j] = true;
            let dim = idx.simplices[low].1.dim();
            if dim <= 1 {
                bars.push(Bar::new(
                    dim as u8,
                    idx.simplices[low].0,
                    idx.simplices[j].0,
                ));
            }
        }
        columns[j] = col;
    }
    for (&(v, s), &done) in idx.simplices.iter().zip(&paired) {
        if !done && s.dim() <= 1 {
            bars.push(Bar::essential(s.dim() as u8, v));
        }
    }
    Ok(PersistenceDiagram::new(f.plane_id(), bars))
}
