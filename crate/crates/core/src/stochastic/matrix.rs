//! Dense rectangular matrices over exact or floating entries.

use std::fmt;
use std::io::{Read, Write};
use std::ops::Index;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::rational::{format_rational, parse_rational, Rational};
use crate::numerics::surd::Surd;

/// Ring operations needed by matrix products.
pub trait Entry: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

/// Ordered entries with a notion of closeness: rationals (exact) and floats.
pub trait Scalar: Entry + PartialOrd {
    const EXACT: bool;
    /// Equality for rationals, `|a - b| <= tol` for floats.
    fn close(&self, o: &Self, tol: f64) -> bool;
    fn to_f64(&self) -> f64;
    fn from_rational(r: &Rational) -> Self;
    fn sqrt_of(&self) -> Option<Self>;
}

macro_rules! entry_ops {
    () => {
        fn add(&self, o: &Self) -> Self {
            self.clone() + o.clone()
        }
        fn sub(&self, o: &Self) -> Self {
            self.clone() - o.clone()
        }
        fn mul(&self, o: &Self) -> Self {
            self.clone() * o.clone()
        }
    };
}

impl Entry for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    entry_ops!();
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Entry for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    entry_ops!();
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Entry for Surd {
    fn zero() -> Self {
        Surd::zero()
    }
    fn one() -> Self {
        Surd::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn close(&self, o: &Self, _tol: f64) -> bool {
        self == o
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn sqrt_of(&self) -> Option<Self> {
        Surd::sqrt(self)?.to_rational()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn close(&self, o: &Self, tol: f64) -> bool {
        (self - o).abs() <= tol
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn sqrt_of(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("ragged matrix: row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("bad entry at row {row}, column {col}: {text}")]
    BadEntry { row: usize, col: usize, text: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A rectangular matrix stored row-major. Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> DenseMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(MatrixError::Ragged { row: i, got: row.len(), expected: c });
            }
            data.extend(row);
        }
        Ok(DenseMatrix { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        (i < self.rows && j < self.cols).then(|| &self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl Fn(&T) -> Option<U>) -> Option<DenseMatrix<U>> {
        Some(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Option<_>>()?,
        })
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T: Entry> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        DenseMatrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    /// Matrix product; panics on incompatible dimensions.
    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "incompatible dimensions for product");
        DenseMatrix::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let (a, b) = (&self[(i, k)], &o[(k, j)]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "incompatible dimensions for product");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    /// `A Aᵀ` without forming the transpose.
    pub fn gram_rows(&self) -> Self {
        DenseMatrix::from_fn(self.rows, self.rows, |i, k| {
            let mut acc = T::zero();
            for (a, b) in self.row(i).iter().zip(self.row(k)) {
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        })
    }

    /// Direct sum `self ⊕ o`.
    pub fn direct_sum(&self, o: &Self) -> Self {
        DenseMatrix::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => o[(i - self.rows, j - self.cols)].clone(),
                _ => T::zero(),
            }
        })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        *e == T::one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// Entrywise square, the Schur-square of a real matrix.
    pub fn schur_square(&self) -> Self {
        self.map(|x| x.mul(x))
    }
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |a, b| a.add(b)))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |a, i| a.add(&self[(i, j)])))
            .collect()
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> DenseMatrix<f64> {
        self.map(Scalar::to_f64)
    }
}

/// Schur-square of a matrix with square-root entries, when every entry
/// squares to a rational.
pub fn surd_schur_square(m: &DenseMatrix<Surd>) -> Option<DenseMatrix<Rational>> {
    m.try_map(|x| (x * x).to_rational())
}

impl fmt::Display for DenseMatrix<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A matrix in either arithmetic, as exchanged in files.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(DenseMatrix<Rational>),
    Float(DenseMatrix<f64>),
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    mode: String,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<String>,
}

impl AnyMatrix {
    pub fn to_json(&self, certificate: Option<&str>) -> serde_json::Value {
        let (mode, rows, cols, entries) = match self {
            AnyMatrix::Exact(m) => (
                "exact",
                m.rows,
                m.cols,
                m.to_rows()
                    .iter()
                    .map(|r| r.iter().map(|x| format_rational(x).into()).collect())
                    .collect(),
            ),
            AnyMatrix::Float(m) => (
                "float",
                m.rows,
                m.cols,
                m.to_rows()
                    .iter()
                    .map(|r| r.iter().map(|&x| x.into()).collect())
                    .collect(),
            ),
        };
        serde_json::to_value(MatrixJson {
            mode: mode.into(),
            rows,
            cols,
            entries,
            certificate: certificate.map(str::to_owned),
        })
        .expect("matrix json")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, MatrixError> {
        let j: MatrixJson = serde_json::from_value(v.clone())?;
        let bad = |row, col, v: &serde_json::Value| MatrixError::BadEntry { row, col, text: v.to_string() };
        let m = match j.mode.as_str() {
            "exact" => {
                let rows = j
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r.iter()
                            .enumerate()
                            .map(|(k, x)| {
                                x.as_str()
                                    .and_then(|s| parse_rational(s).ok())
                                    .ok_or_else(|| bad(i, k, x))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                AnyMatrix::Exact(DenseMatrix::from_rows(rows)?)
            }
            "float" => {
                let rows = j
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r.iter()
                            .enumerate()
                            .map(|(k, x)| x.as_f64().ok_or_else(|| bad(i, k, x)))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                AnyMatrix::Float(DenseMatrix::from_rows(rows)?)
            }
            other => return Err(MatrixError::Dimension(format!("unknown mode {other:?}"))),
        };
        let (r, c) = match &m {
            AnyMatrix::Exact(m) => (m.rows, m.cols),
            AnyMatrix::Float(m) => (m.rows, m.cols),
        };
        if (r, c) != (j.rows, j.cols) && !(r == 0 && j.rows == 0) {
            return Err(MatrixError::Dimension(format!(
                "declared {}x{}, found {r}x{c}",
                j.rows, j.cols
            )));
        }
        Ok(m)
    }

    /// Row-major CSV. Exact when every cell parses as a rational.
    pub fn read_csv(reader: impl Read) -> Result<Self, MatrixError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut cells = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            cells.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
        }
        let exact: Option<Vec<Vec<Rational>>> = cells
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s).ok()).collect())
            .collect();
        if let Some(rows) = exact {
            return Ok(AnyMatrix::Exact(DenseMatrix::from_rows(rows)?));
        }
        let rows = cells
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(k, s)| {
                        s.parse::<f64>()
                            .map_err(|_| MatrixError::BadEntry { row: i, col: k, text: s.clone() })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnyMatrix::Float(DenseMatrix::from_rows(rows)?))
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<(), MatrixError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        match self {
            AnyMatrix::Exact(m) => {
                for i in 0..m.rows {
                    w.write_record(m.row(i).iter().map(format_rational))?;
                }
            }
            AnyMatrix::Float(m) => {
                for i in 0..m.rows {
                    w.write_record(m.row(i).iter().map(|x| format!("{x:e}")))?;
                }
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Whether all entries are nonnegative.
pub fn is_nonnegative<T: Scalar>(m: &DenseMatrix<T>) -> bool {
    m.data.iter().all(|x| *x >= T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};

    #[test]
    fn schur_square_examples() {
        let id = DenseMatrix::<Rational>::identity(3);
        assert_eq!(id.schur_square(), id);
        let a = Surd::sqrt(&rat(2, 3)).unwrap();
        let b = Surd::sqrt(&rat(1, 3)).unwrap();
        let g = DenseMatrix::from_rows(vec![vec![a.clone(), b.clone()], vec![-&b, a]]).unwrap();
        let q = surd_schur_square(&g).unwrap();
        assert_eq!(q.to_rows(), vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]]);
        let perm = DenseMatrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(perm.schur_square(), perm);
    }

    #[test]
    fn products_and_sums() {
        let a = DenseMatrix::from_rows(vec![vec![int(1), int(2)], vec![int(3), int(4)]]).unwrap();
        assert_eq!(a.matmul(&DenseMatrix::identity(2)), a);
        assert_eq!(a.gram_rows(), a.matmul(&a.transpose()));
        assert_eq!(a.row_sums(), vec![int(3), int(7)]);
        assert_eq!(a.col_sums(), vec![int(4), int(6)]);
        assert_eq!(a.mul_vec(&[int(1), int(1)]), vec![int(3), int(7)]);
        let s = a.direct_sum(&DenseMatrix::identity(1));
        assert_eq!((s.rows(), s.cols()), (3, 3));
        assert_eq!(s[(2, 2)], int(1));
        assert_eq!(s[(0, 2)], int(0));
        assert!(a.get(2, 0).is_none());
        assert!(DenseMatrix::from_rows(vec![vec![int(1)], vec![]]).is_err());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let m = AnyMatrix::Exact(DenseMatrix::from_rows(vec![vec![rat(1, 2), int(0)], vec![int(3), rat(-1, 7)]]).unwrap());
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1/2,0\n3,-1/7\n");
        assert_eq!(AnyMatrix::read_csv(buf.as_slice()).unwrap(), m);
        assert_eq!(AnyMatrix::from_json(&m.to_json(None)).unwrap(), m);

        let f = AnyMatrix::read_csv("0.5, 1e-3\n2, 3\n".as_bytes()).unwrap();
        assert!(matches!(&f, AnyMatrix::Float(x) if x[(0, 1)] == 1e-3));
        assert_eq!(AnyMatrix::from_json(&f.to_json(Some("q"))).unwrap(), f);
    }
}
