//! Dense matrices over a division ring and left row-space linear algebra.
//!
//! Vectors are rows and act on the left of matrices (`v ↦ vA`); subspaces
//! are left row spaces. All elimination uses left row operations only, so
//! everything here is valid over noncommutative division rings.


use super::field::{DivisionRing, Scalar};
use crate::error::{Error, Result};

pub type Row = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

pub fn zero_row(r: &DivisionRing, n: usize) -> Row {
    vec![r.zero(); n]
}

pub fn unit_row(r: &DivisionRing, n: usize, i: usize) -> Row {
    let mut v = zero_row(r, n);
    v[i] = r.one();
    v
}

pub fn row_is_zero(r: &DivisionRing, v: &[Scalar]) -> bool {
    v.iter().all(|x| r.is_zero(x))
}

pub fn row_add(r: &DivisionRing, a: &[Scalar], b: &[Scalar]) -> Row {
    a.iter().zip(b).map(|(x, y)| r.add(x, y)).collect()
}

pub fn row_sub(r: &DivisionRing, a: &[Scalar], b: &[Scalar]) -> Row {
    a.iter().zip(b).map(|(x, y)| r.sub(x, y)).collect()
}

pub fn row_neg(r: &DivisionRing, a: &[Scalar]) -> Row {
    a.iter().map(|x| r.neg(x)).collect()
}

/// `s·v` (scalar on the left).
pub fn row_scale(r: &DivisionRing, s: &Scalar, v: &[Scalar]) -> Row {
    v.iter().map(|x| r.mul(s, x)).collect()
}

/// `v - s·w`.
fn row_axpy(r: &DivisionRing, v: &mut [Scalar], s: &Scalar, w: &[Scalar]) {
    for (x, y) in v.iter_mut().zip(w) {
        if !r.is_zero(y) {
            *x = r.sub(x, &r.mul(s, y));
        }
    }
}

/// `v·A`.
pub fn row_times(r: &DivisionRing, v: &[Scalar], a: &Mat) -> Row {
    assert_eq!(v.len(), a.rows, "row length must match matrix rows");
    let mut out = zero_row(r, a.cols);
    for (i, x) in v.iter().enumerate() {
        if r.is_zero(x) {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            let y = a.get(i, j);
            if !r.is_zero(y) {
                *o = r.add(o, &r.mul(x, y));
            }
        }
    }
    out
}

/// Reduces `v` modulo the row space of an RREF basis with the given pivot
/// columns; the result is the canonical coset representative.
pub fn reduce_mod(r: &DivisionRing, v: &[Scalar], basis: &[Row], pivots: &[usize]) -> Row {
    let mut out = v.to_vec();
    for (b, &p) in basis.iter().zip(pivots) {
        let c = out[p].clone();
        if !r.is_zero(&c) {
            row_axpy(r, &mut out, &c, b);
        }
    }
    out
}

/// Reduced row echelon form of the row space spanned by `rows`; returns the
/// nonzero rows and their pivot columns.
pub fn rref_rows(r: &DivisionRing, rows: &[Row], width: usize) -> (Vec<Row>, Vec<usize>) {
    let mut m: Vec<Row> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..width {
        if top == m.len() {
            break;
        }
        let Some(pr) = (top..m.len()).find(|&i| !r.is_zero(&m[i][col])) else {
            continue;
        };
        m.swap(top, pr);
        let inv = r.inv(&m[top][col]).expect("nonzero pivot");
        m[top] = row_scale(r, &inv, &m[top]);
        let pivot_row = m[top].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != top {
                let c = row[col].clone();
                if !r.is_zero(&c) {
                    row_axpy(r, row, &c, &pivot_row);
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    m.truncate(top);
    (m, pivots)
}

/// Whether `v` lies in the row space of an RREF basis.
pub fn in_span(r: &DivisionRing, v: &[Scalar], basis: &[Row], pivots: &[usize]) -> bool {
    row_is_zero(r, &reduce_mod(r, v, basis, pivots))
}

/// Basis of `{ v : v·M = 0 }` for the matrix whose rows are `rows`.
pub fn left_nullspace_rows(r: &DivisionRing, rows: &[Row], width: usize) -> Vec<Row> {
    let n = rows.len();
    let aug: Vec<Row> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend(unit_row(r, n, i));
            v
        })
        .collect();
    let (red, _) = rref_rows(r, &aug, width + n);
    let mut out: Vec<Row> = red
        .into_iter()
        .filter(|row| row_is_zero(r, &row[..width]))
        .map(|row| row[width..].to_vec())
        .collect();
    let (b, _) = rref_rows(r, &out, n);
    out = b;
    out
}

/// Some `v` with `v·M = b`, where `M` has the given rows.
pub fn solve_left_rows(r: &DivisionRing, rows: &[Row], width: usize, b: &[Scalar]) -> Option<Row> {
    let n = rows.len();
    let mut ext: Vec<Row> = rows.to_vec();
    ext.push(row_neg(r, b));
    let ns = left_nullspace_rows(r, &ext, width);
    // An RREF nullspace vector with a nonzero last coordinate exists iff solvable;
    // in RREF it is the unique row pivoting on column n, if any.
    let row = ns.iter().find(|v| !r.is_zero(&v[n]))?;
    let inv = r.inv(&row[n]).unwrap();
    let v = row_scale(r, &inv, row);
    Some(v[..n].to_vec())
}

/// Basis of `{ h : M·h = 0 }` written as rows (`h` a column), i.e. an
/// annihilator presentation of a left row space given in RREF.
pub fn right_nullspace_rref(r: &DivisionRing, basis: &[Row], pivots: &[usize], width: usize) -> Vec<Row> {
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut h = zero_row(r, width);
            h[f] = r.one();
            for (row, &p) in basis.iter().zip(pivots) {
                h[p] = r.neg(&row[f]);
            }
            h
        })
        .collect()
}

impl Mat {
    pub fn zeros(r: &DivisionRing, rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![r.zero(); rows * cols] }
    }

    pub fn identity(r: &DivisionRing, n: usize) -> Self {
        let mut m = Mat::zeros(r, n, n);
        for i in 0..n {
            m.set(i, i, r.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Row>, cols: usize) -> Result<Self> {
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::Shape(format!("all rows must have {cols} entries")));
        }
        let n = rows.len();
        Ok(Mat { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn diag(r: &DivisionRing, entries: &[Scalar]) -> Self {
        let mut m = Mat::zeros(r, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Row {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Row> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn mul(&self, r: &DivisionRing, o: &Mat) -> Result<Mat> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let rows = (0..self.rows).map(|i| row_times(r, &self.row(i), o)).collect();
        Mat::from_rows(rows, o.cols)
    }

    pub fn add(&self, r: &DivisionRing, o: &Mat) -> Result<Mat> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::Shape("matrix sizes differ".into()));
        }
        let data = self.data.iter().zip(&o.data).map(|(x, y)| r.add(x, y)).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, r: &DivisionRing, o: &Mat) -> Result<Mat> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::Shape("matrix sizes differ".into()));
        }
        let data = self.data.iter().zip(&o.data).map(|(x, y)| r.sub(x, y)).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn is_identity(&self, r: &DivisionRing) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        r.is_one(x)
                    } else {
                        r.is_zero(x)
                    }
                })
            })
    }

    /// Block diagonal `self ⊕ o`.
    pub fn direct_sum(&self, r: &DivisionRing, o: &Mat) -> Mat {
        let mut m = Mat::zeros(r, self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    pub fn rank(&self, r: &DivisionRing) -> usize {
        rref_rows(r, &self.to_rows(), self.cols).0.len()
    }

    pub fn inverse(&self, r: &DivisionRing) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape("only square matrices can be inverted".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let aug: Vec<Row> = (0..n)
            .map(|i| {
                let mut v = self.row(i);
                v.extend(unit_row(r, n, i));
                v
            })
            .collect();
        let (red, pivots) = rref_rows(r, &aug, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Mat::from_rows(red.into_iter().map(|row| row[n..].to_vec()).collect(), n)
    }

    pub fn is_invertible(&self, r: &DivisionRing) -> bool {
        self.is_square() && self.rank(r) == self.rows
    }
}

/// `mat_invert` as a free function.
pub fn mat_invert(r: &DivisionRing, a: &Mat) -> Result<Mat> {
    a.inverse(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(r: &DivisionRing, rows: &[&[i64]]) -> Mat {
        let cols = rows[0].len();
        Mat::from_rows(rows.iter().map(|row| row.iter().map(|&x| r.from_int(x)).collect()).collect(), cols)
            .unwrap()
    }

    #[test]
    fn invert_f5() {
        let f5 = DivisionRing::gf(5);
        assert_eq!(m(&f5, &[&[2]]).inverse(&f5).unwrap(), m(&f5, &[&[3]]));
        let q = DivisionRing::Rationals;
        assert_eq!(m(&q, &[&[1, 1], &[1, 1]]).inverse(&q), Err(Error::Singular));
        let a = m(&q, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        let prod = a.mul(&q, &a.inverse(&q).unwrap()).unwrap();
        assert!(prod.is_identity(&q));
    }

    #[test]
    fn nullspace_and_solve() {
        let f5 = DivisionRing::gf(5);
        // x1*2 + x2*1 = 0 -> basis (1, 3)
        let rows = vec![vec![f5.from_int(2)], vec![f5.from_int(1)]];
        let ns = left_nullspace_rows(&f5, &rows, 1);
        assert_eq!(ns, vec![vec![f5.from_int(1), f5.from_int(3)]]);
        let q = DivisionRing::Rationals;
        let a = m(&q, &[&[1, 2], &[3, 4]]);
        let b = vec![q.from_int(5), q.from_int(6)];
        let v = solve_left_rows(&q, &a.to_rows(), 2, &b).unwrap();
        assert_eq!(row_times(&q, &v, &a), b);
        let sing = m(&q, &[&[1, 1], &[1, 1]]);
        assert!(solve_left_rows(&q, &sing.to_rows(), 2, &b).is_none());
    }

    #[test]
    fn annihilator_of_row_space() {
        let q = DivisionRing::Rationals;
        let (basis, piv) = rref_rows(&q, &[vec![q.from_int(1), q.from_int(1), q.from_int(0)]], 3);
        let hs = right_nullspace_rref(&q, &basis, &piv, 3);
        assert_eq!(hs.len(), 2);
        for h in &hs {
            let dot = basis[0].iter().zip(h).fold(q.zero(), |acc, (x, y)| q.add(&acc, &q.mul(x, y)));
            assert!(q.is_zero(&dot));
        }
    }
}
