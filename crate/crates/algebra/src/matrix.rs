//! Dense matrices over any coefficient ring.

use std::fmt;

use crate::error::{AlgebraError, Result};
use crate::traits::{Field, Ring};

#[derive(Clone, PartialEq)]
pub struct Matrix<T: Ring> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(rows, cols, data)
    }

    pub fn try_from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<T>,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j)?);
            }
        }
        Ok(Matrix::new(rows, cols, data))
    }

    pub fn identity_like(n: usize, sample: &T) -> Self {
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                sample.ring_one_like()
            } else {
                sample.ring_zero_like()
            }
        })
    }

    pub fn zeros_like(rows: usize, cols: usize, sample: &T) -> Self {
        Matrix::from_fn(rows, cols, |_, _| sample.ring_zero_like())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix::new(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn try_map<U: Ring>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(f).collect::<Result<_>>()?,
        ))
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(AlgebraError::ShapeMismatch(self.rows, self.cols, o.rows, o.cols));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(Matrix::new(self.rows, self.cols, data))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()?;
        Ok(Matrix::new(self.rows, self.cols, data))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.ring_neg())
    }

    pub fn scale(&self, k: &T) -> Result<Self> {
        self.try_map(|a| a.try_mul(k))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(AlgebraError::ShapeMismatch(self.rows, self.cols, o.rows, o.cols));
        }
        let sample = self
            .data
            .first()
            .or(o.data.first())
            .ok_or(AlgebraError::ShapeMismatch(self.rows, self.cols, o.rows, o.cols))?;
        Matrix::try_from_fn(self.rows, o.cols, |i, j| {
            let mut acc = sample.ring_zero_like();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = o.get(k, j);
                if a.ring_is_zero() || b.ring_is_zero() {
                    continue;
                }
                acc = acc.try_add(&a.try_mul(b)?)?;
            }
            Ok(acc)
        })
    }

    /// `self·o − o·self`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn trace(&self) -> Result<T> {
        let n = self.rows.min(self.cols);
        let mut acc = self.data[0].ring_zero_like();
        for i in 0..n {
            acc = acc.try_add(self.get(i, i))?;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.ring_is_zero())
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_r) {
            for j in (0..self.cols).filter(|&j| j != skip_c) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix::new(self.rows - 1, self.cols - 1, data)
    }

    /// Division-free determinant by cofactor expansion; meant for small sizes.
    pub fn det(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(AlgebraError::ShapeMismatch(self.rows, self.cols, self.cols, self.rows));
        }
        match self.rows {
            0 => Err(AlgebraError::ShapeMismatch(0, 0, 0, 0)),
            1 => Ok(self.data[0].clone()),
            2 => self
                .get(0, 0)
                .try_mul(self.get(1, 1))?
                .try_sub(&self.get(0, 1).try_mul(self.get(1, 0))?),
            n => {
                let mut acc = self.data[0].ring_zero_like();
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.ring_is_zero() {
                        continue;
                    }
                    let term = a.try_mul(&self.minor(0, j).det()?)?;
                    acc = if j % 2 == 0 { acc.try_add(&term)? } else { acc.try_sub(&term)? };
                }
                Ok(acc)
            }
        }
    }

    /// Inverse via the adjugate; the determinant must be a unit of `T`.
    pub fn inverse_adjugate(&self) -> Result<Self> {
        let d = self.det()?;
        if d.ring_is_zero() {
            return Err(AlgebraError::SingularMatrix);
        }
        let di = d.try_inv()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Matrix::new(1, 1, vec![di]));
        }
        Matrix::try_from_fn(n, n, |i, j| {
            let c = self.minor(j, i).det()?;
            let c = if (i + j) % 2 == 0 { c } else { c.ring_neg() };
            c.try_mul(&di)
        })
    }
}

impl<F: Field> Matrix<F> {
    /// Gauss–Jordan inverse over a field.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(AlgebraError::ShapeMismatch(self.rows, self.cols, self.cols, self.rows));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity_like(n, &self.data[0]);
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(AlgebraError::SingularMatrix)?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).inv()?;
            for j in 0..n {
                let v = a.get(col, j).mul_ref(&p);
                a.set(col, j, v);
                let w = inv.get(col, j).mul_ref(&p);
                inv.set(col, j, w);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j).sub_ref(&f.mul_ref(a.get(col, j)));
                    a.set(r, j, v);
                    let w = inv.get(r, j).sub_ref(&f.mul_ref(inv.get(col, j)));
                    inv.set(r, j, w);
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination over a field.
    pub fn det_field(&self) -> Result<F> {
        if self.rows != self.cols || self.rows == 0 {
            return Err(AlgebraError::ShapeMismatch(self.rows, self.cols, self.cols, self.rows));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.data[0].one_like();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(self.data[0].zero_like());
            };
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                }
                det = det.neg_ref();
            }
            let p = a.get(col, col).clone();
            det = det.mul_ref(&p);
            let pi = p.inv()?;
            for r in col + 1..n {
                let f = a.get(r, col).mul_ref(&pi);
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a.get(r, j).sub_ref(&f.mul_ref(a.get(col, j)));
                    a.set(r, j, v);
                }
            }
        }
        Ok(det)
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Ring> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}
