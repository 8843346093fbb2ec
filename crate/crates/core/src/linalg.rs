//! Exact Gauss-Jordan elimination on sparse rational rows.
//!
//! The right-hand side may live in any [`Coeff`] ring, since every ring used
//! here is a rational vector space.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::poly::Coeff;
use crate::Rational;

pub type Row = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearError {
    Inconsistent,
}

/// Reduced row-echelon data: pivot column to (row, rhs).
struct Echelon<C> {
    pivots: Vec<(usize, Row, C)>,
    consistent: bool,
}

fn eliminate<C: Coeff>(rows: Vec<Row>, rhs: Vec<C>, ncols: usize) -> Echelon<C> {
    let mut work: Vec<(Row, C)> = rows
        .into_iter()
        .zip(rhs)
        .map(|(mut r, c)| {
            r.retain(|_, v| !v.is_zero());
            (r, c)
        })
        .collect();
    let mut is_pivot = vec![false; work.len()];
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..ncols {
        let best =
            (0..work.len()).filter(|&i| !is_pivot[i] && work[i].0.contains_key(&col)).min_by_key(|&i| work[i].0.len());
        let Some(p) = best else { continue };
        let inv = work[p].0[&col].recip();
        let (prow, prhs) = {
            let (r, c) = &mut work[p];
            for v in r.values_mut() {
                *v *= &inv;
            }
            *c = c.scale(&inv);
            (r.clone(), c.clone())
        };
        for (i, (r, c)) in work.iter_mut().enumerate() {
            if i == p {
                continue;
            }
            let Some(f) = r.get(&col).cloned() else { continue };
            for (k, v) in &prow {
                let e = r.entry(*k).or_insert_with(Rational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    r.remove(k);
                }
            }
            *c = c.sub_ref(&prhs.scale(&f));
        }
        is_pivot[p] = true;
        pivots.push((col, p));
    }
    let consistent = work.iter().enumerate().all(|(i, (r, c))| is_pivot[i] || !r.is_empty() || c.is_zero());
    let pivots = pivots.into_iter().map(|(col, i)| (col, work[i].0.clone(), work[i].1.clone())).collect();
    Echelon { pivots, consistent }
}

/// Solution of a linear system with free variables set to zero.
#[derive(Debug, Clone)]
pub struct Solution<C> {
    pub values: Vec<C>,
    pub free: Vec<usize>,
}

impl<C> Solution<C> {
    pub fn is_unique(&self) -> bool {
        self.free.is_empty()
    }
}

pub fn solve<C: Coeff>(rows: Vec<Row>, rhs: Vec<C>, ncols: usize) -> Result<Solution<C>, LinearError> {
    let ech = eliminate(rows, rhs, ncols);
    if !ech.consistent {
        return Err(LinearError::Inconsistent);
    }
    let mut values = vec![C::zero(); ncols];
    let mut pivot_col = vec![false; ncols];
    for (col, _, c) in &ech.pivots {
        values[*col] = c.clone();
        pivot_col[*col] = true;
    }
    let free = (0..ncols).filter(|&c| !pivot_col[c]).collect();
    Ok(Solution { values, free })
}

/// Basis of the kernel read off the reduced echelon form, one vector per free column.
pub fn nullspace(rows: Vec<Row>, ncols: usize) -> Vec<Vec<Rational>> {
    let n = rows.len();
    let ech = eliminate(rows, vec![Rational::zero(); n], ncols);
    let mut pivot_of: BTreeMap<usize, &Row> = BTreeMap::new();
    for (col, row, _) in &ech.pivots {
        pivot_of.insert(*col, row);
    }
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivot_of.contains_key(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[f] = Rational::from_integer(1.into());
        for (col, row) in &pivot_of {
            if let Some(x) = row.get(&f) {
                v[*col] = -x.clone();
            }
        }
        basis.push(v);
    }
    basis
}
