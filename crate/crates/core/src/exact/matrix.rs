use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{ExactError, ExactScalar, Field, IntMatrix};

/// Dense row-major matrix over Q or one fixed real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<ExactScalar>,
}

fn shape_err(what: &str, a: (usize, usize), b: (usize, usize)) -> ExactError {
    ExactError::Shape(format!("{what}: {}x{} vs {}x{}", a.0, a.1, b.0, b.1))
}

impl ExactMatrix {
    /// Builds a matrix, determining the common field of its entries.
    pub fn new(rows: usize, cols: usize, data: Vec<ExactScalar>) -> Result<Self, ExactError> {
        if data.len() != rows * cols {
            return Err(ExactError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let mut field = Field::Rational;
        for x in &data {
            field = field.join(x.field())?;
        }
        Ok(ExactMatrix { rows, cols, field, data })
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactScalar) -> Result<Self, ExactError> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Recomputes the field tag as the smallest field holding every entry,
    /// so that equal matrices compare equal.
    fn refield(mut self) -> Self {
        self.field = self
            .data
            .iter()
            .map(ExactScalar::field)
            .find(|f| *f != Field::Rational)
            .unwrap_or(Field::Rational);
        self
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, field: Field::Rational, data: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ExactScalar::one();
        }
        m
    }

    pub fn diagonal(entries: Vec<ExactScalar>) -> Result<Self, ExactError> {
        let n = entries.len();
        let mut data = vec![ExactScalar::zero(); n * n];
        for (i, e) in entries.into_iter().enumerate() {
            data[i * n + i] = e;
        }
        Self::new(n, n, data)
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        ExactMatrix {
            rows: m.rows(),
            cols: m.cols(),
            field: Field::Rational,
            data: m.data().iter().cloned().map(ExactScalar::Integer).collect(),
        }
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::from_int(&IntMatrix::from_rows_i64(rows))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &[ExactScalar] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &ExactScalar {
        &self.data[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        ExactMatrix { rows: self.cols, cols: self.rows, field: self.field, data }
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        if self.cols != rhs.rows {
            return Err(shape_err("product", (self.rows, self.cols), (rhs.rows, rhs.cols)));
        }
        let field = self.field.join(rhs.field)?;
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = ExactScalar::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&a.checked_mul(b)?)?;
                }
                data.push(acc);
            }
        }
        Ok(ExactMatrix { rows: self.rows, cols: rhs.cols, field, data }.refield())
    }

    fn zip_with(
        &self,
        rhs: &ExactMatrix,
        what: &str,
        f: impl Fn(&ExactScalar, &ExactScalar) -> Result<ExactScalar, ExactError>,
    ) -> Result<ExactMatrix, ExactError> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(shape_err(what, (self.rows, self.cols), (rhs.rows, rhs.cols)));
        }
        let field = self.field.join(rhs.field)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect::<Result<_, _>>()?;
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, field, data }.refield())
    }

    pub fn add(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        self.zip_with(rhs, "sum", ExactScalar::checked_add)
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        self.zip_with(rhs, "difference", ExactScalar::checked_sub)
    }

    pub fn scale(&self, s: &ExactScalar) -> Result<ExactMatrix, ExactError> {
        let field = self.field.join(s.field())?;
        let data = self.data.iter().map(|a| a.checked_mul(s)).collect::<Result<_, _>>()?;
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, field, data }.refield())
    }

    /// Gaussian elimination to row echelon form; returns the echelon matrix,
    /// the pivot columns and the number of row swaps.
    fn echelon(&self) -> Result<(ExactMatrix, Vec<usize>, usize), ExactError> {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut swaps = 0;
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                a.swap_rows(p, row);
                swaps += 1;
            }
            let inv = a.get(row, col).checked_inv()?;
            for r in row + 1..a.rows {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).checked_mul(&inv)?;
                for c in col..a.cols {
                    let v = a.get(r, c).checked_sub(&factor.checked_mul(a.get(row, c))?)?;
                    a.data[r * a.cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Ok((a, pivots, swaps))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Rank over the entry field.
    pub fn rank(&self) -> usize {
        // entries share one field by construction, so elimination cannot fail
        self.echelon().map(|(_, p, _)| p.len()).unwrap_or(0)
    }

    pub fn det(&self) -> Result<ExactScalar, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape(format!("determinant of {}x{}", self.rows, self.cols)));
        }
        let (e, pivots, swaps) = self.echelon()?;
        if pivots.len() < self.rows {
            return Ok(ExactScalar::zero());
        }
        let mut d = if swaps % 2 == 0 { ExactScalar::one() } else { -ExactScalar::one() };
        for i in 0..self.rows {
            d = d.checked_mul(e.get(i, i))?;
        }
        Ok(d)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<ExactMatrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape(format!("inverse of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = ExactMatrix::identity(n);
        inv.field = self.field;
        for col in 0..n {
            let p = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(ExactError::Singular)?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot_inv = a.get(col, col).checked_inv()?;
            for c in 0..n {
                a.data[col * n + c] = a.get(col, c).checked_mul(&pivot_inv)?;
                inv.data[col * n + c] = inv.get(col, c).checked_mul(&pivot_inv)?;
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let va = a.get(r, c).checked_sub(&factor.checked_mul(a.get(col, c))?)?;
                    let vi = inv.get(r, c).checked_sub(&factor.checked_mul(inv.get(col, c))?)?;
                    a.data[r * n + c] = va;
                    inv.data[r * n + c] = vi;
                }
            }
        }
        Ok(inv.refield())
    }

    /// Integer power; negative exponents use the exact inverse.
    pub fn pow(&self, e: i64) -> Result<ExactMatrix, ExactError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = ExactMatrix::identity(self.rows);
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(ExactScalar::is_integer)
    }

    pub fn is_rational(&self) -> bool {
        self.data.iter().all(ExactScalar::is_rational)
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    /// Position of the first non-integer entry, if any.
    pub fn first_non_integer(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|x| !x.is_integer())
            .map(|i| (i / self.cols, i % self.cols))
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        let data = self
            .data
            .iter()
            .map(|x| x.as_integer().cloned())
            .collect::<Option<Vec<BigInt>>>()?;
        Some(IntMatrix::new(self.rows, self.cols, data))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).to_f64())
    }

    /// Splits `M = A + B sqrt(d)` into rational matrices; `B = 0` over Q.
    pub fn split_parts(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        self.data.iter().map(ExactScalar::parts).unzip()
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.data.iter().fold(BigInt::from(1), |acc, x| acc.lcm(&x.denominator()))
    }

    /// The rational linear system equivalent to `self * u = 0` for rational
    /// `u`: one block of rows for the rational parts and, over a quadratic
    /// field, one for the `sqrt d` parts. Each row is scaled to integers.
    pub fn rational_constraint_rows(&self) -> IntMatrix {
        let (a, b) = self.split_parts();
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for r in 0..self.rows {
            rows.push(a[r * self.cols..(r + 1) * self.cols].to_vec());
        }
        if self.field != Field::Rational {
            for r in 0..self.rows {
                let row = b[r * self.cols..(r + 1) * self.cols].to_vec();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        let cols = self.cols;
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for row in rows {
            use num_integer::Integer;
            let den = row.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            for x in row {
                data.push((x * BigRational::from_integer(den.clone())).to_integer());
            }
        }
        IntMatrix::new(n_rows, cols, data)
    }

    pub fn hstack(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        if self.rows != rhs.rows {
            return Err(shape_err("hstack", (self.rows, self.cols), (rhs.rows, rhs.cols)));
        }
        let cols = self.cols + rhs.cols;
        Self::from_fn(self.rows, cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                rhs.get(r, c - self.cols).clone()
            }
        })
    }

    /// Column sub-block `[start, end)`.
    pub fn columns(&self, start: usize, end: usize) -> ExactMatrix {
        let data = (0..self.rows)
            .flat_map(|r| (start..end).map(move |c| (r, c)))
            .map(|(r, c)| self.get(r, c).clone())
            .collect();
        ExactMatrix { rows: self.rows, cols: end - start, field: self.field, data }
    }

    /// Row sub-block `[start, end)`.
    pub fn row_block(&self, start: usize, end: usize) -> ExactMatrix {
        ExactMatrix {
            rows: end - start,
            cols: self.cols,
            field: self.field,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = ExactScalar;
    fn index(&self, (r, c): (usize, usize)) -> &ExactScalar {
        self.get(r, c)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_p() -> ExactMatrix {
        let half = BigRational::new(1.into(), 2.into());
        let a = ExactScalar::quadratic(half.clone(), half.clone(), 5).unwrap();
        let b = ExactScalar::quadratic(half.clone(), -half, 5).unwrap();
        ExactMatrix::from_rows(vec![vec![a, b], vec![ExactScalar::one(), ExactScalar::one()]]).unwrap()
    }

    #[test]
    fn inverse_over_quadratic_field() {
        let p = golden_p();
        assert_eq!(p.field(), Field::Quadratic(5));
        let inv = p.inverse().unwrap();
        assert_eq!(p.mul(&inv).unwrap(), ExactMatrix::identity(2));
        // det = (1+s)/2 - (1-s)/2 = sqrt 5
        assert_eq!(p.det().unwrap(), ExactScalar::sqrt_of(5).unwrap());
    }

    #[test]
    fn singular_detected() {
        let m = ExactMatrix::from_i64_rows(&[[1, 2], [2, 4]]);
        assert_eq!(m.inverse(), Err(ExactError::Singular));
        assert!(m.det().unwrap().is_zero());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn mixed_field_matrix_rejected() {
        let r = ExactMatrix::new(
            1,
            2,
            vec![ExactScalar::sqrt_of(2).unwrap(), ExactScalar::sqrt_of(3).unwrap()],
        );
        assert!(matches!(r, Err(ExactError::FieldMismatch(2, 3))));
    }

    #[test]
    fn constraint_rows_split_radical() {
        // [sqrt5, 1] u = 0 over Q forces u = 0
        let m = ExactMatrix::from_rows(vec![vec![ExactScalar::sqrt_of(5).unwrap(), ExactScalar::one()]]).unwrap();
        let rows = m.rational_constraint_rows();
        assert_eq!(rows, IntMatrix::from_rows_i64(&[[0, 1], [1, 0]]));
    }
}
