//! Sparse Gauss-Jordan elimination over the coefficient field.

use crate::field::RationalFunction;

/// Sparse row: `(column, coefficient)` pairs, strictly increasing columns,
/// no zero coefficients.
pub type Row = Vec<(usize, RationalFunction)>;

/// Reduced row echelon form of a set of rows.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    /// Rows with a leading one in a pivot-eligible column, sorted by pivot.
    /// Every pivot column is zero in all other rows.
    pub pivot_rows: Vec<Row>,
    /// Rows left over whose entries all lie in columns at or beyond the
    /// pivot limit, themselves in reduced echelon form.
    pub residual: Vec<Row>,
    /// Number of input rows that reduced to zero.
    pub zero_rows: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_rows.iter().map(|r| r[0].0)
    }
}

/// `a - f * b`.
pub fn sub_scaled(a: &Row, f: &RationalFunction, b: &Row) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = -(f * &b[j].1);
            out.push((cb, v));
            j += 1;
        } else {
            let v = &a[i].1 - &(f * &b[j].1);
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale_row(row: &Row, f: &RationalFunction) -> Row {
    row.iter().map(|(c, v)| (*c, v * f)).collect()
}

fn normalize(row: Row) -> Row {
    let lead = &row[0].1;
    if lead.is_one() {
        return row;
    }
    let inv = lead.recip().expect("leading coefficient is nonzero");
    row.iter().map(|(c, v)| (*c, if *c == row[0].0 { RationalFunction::one() } else { v * &inv })).collect()
}

/// Number of polynomial terms in a row, a proxy for coefficient size.
fn weight(row: &Row) -> usize {
    row.iter().map(|(_, v)| v.numer().num_terms() + v.denom().num_terms()).sum()
}

fn entry(row: &Row, col: usize) -> Option<&RationalFunction> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|k| &row[k].1)
}

/// Gauss-Jordan elimination. Only columns below `pivot_limit` may carry pivots.
/// Among rows competing for a pivot column the sparsest one is chosen.
pub fn rref(rows: Vec<Row>, pivot_limit: usize) -> Echelon {
    let mut zero_rows = 0;
    let mut active: Vec<Row> = Vec::with_capacity(rows.len());
    for r in rows {
        if r.is_empty() {
            zero_rows += 1;
        } else {
            active.push(r);
        }
    }
    let mut pivots: Vec<Row> = Vec::new();
    while let Some(col) = active.iter().map(|r| r[0].0).filter(|&c| c < pivot_limit).min() {
        let (best, _) = active
            .iter()
            .enumerate()
            .filter(|(_, r)| r[0].0 == col)
            .min_by_key(|(k, r)| (weight(r), r.len(), *k))
            .expect("some row has this leading column");
        let pivot = normalize(active.remove(best));
        let mut next = Vec::with_capacity(active.len());
        for r in active.drain(..) {
            if r[0].0 == col {
                let f = r[0].1.clone();
                let reduced = sub_scaled(&r, &f, &pivot);
                if reduced.is_empty() {
                    zero_rows += 1;
                } else {
                    next.push(reduced);
                }
            } else {
                next.push(r);
            }
        }
        active = next;
        pivots.push(pivot);
    }
    // back substitution, last pivot first
    for k in (0..pivots.len()).rev() {
        let (head, tail) = pivots.split_at_mut(k + 1);
        let row = &mut head[k];
        for p in tail.iter() {
            if let Some(f) = entry(row, p[0].0).cloned() {
                *row = sub_scaled(row, &f, p);
            }
        }
    }
    pivots.sort_by_key(|r| r[0].0);
    let residual = if active.is_empty() {
        Vec::new()
    } else {
        let inner = rref(active, usize::MAX);
        zero_rows += inner.zero_rows;
        inner.pivot_rows
    };
    Echelon { pivot_rows: pivots, residual, zero_rows }
}

/// Rank of a set of rows.
pub fn rank(rows: Vec<Row>) -> usize {
    rref(rows, usize::MAX).rank()
}
