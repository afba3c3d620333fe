//! Dense square matrices over a pluggable coefficient ring.
//!
//! The ring may be noncommutative (torus elements, skew series), so products
//! always keep the left factor's entries on the left. The Kronecker product is
//! ordered the same way.

use std::fmt;

use crate::error::{QcvError, Result};
use crate::scalar::{q_factorial, QScalar};

/// Minimal interface the matrix code needs from a coefficient ring. `QScalar`
/// acts centrally on every ring we use, which is what `scale_q` encodes.
pub trait Ring: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn scale_q(&self, s: &QScalar) -> Self;
}

impl Ring for QScalar {
    fn zero_like(&self) -> Self {
        QScalar::zero()
    }
    fn one_like(&self) -> Self {
        QScalar::one()
    }
    fn is_zero(&self) -> bool {
        QScalar::is_zero(self)
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale_q(&self, s: &QScalar) -> Self {
        self * s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingMatrix<R> {
    size: usize,
    entries: Vec<R>,
}

impl<R: Ring> RingMatrix<R> {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        assert!(size > 0, "empty matrix");
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(f(i, j));
            }
        }
        RingMatrix { size, entries }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "not square");
        RingMatrix {
            size,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Zero matrix in the same ring as `sample`.
    pub fn zeros(size: usize, sample: &R) -> Self {
        Self::from_fn(size, |_, _| sample.zero_like())
    }

    pub fn identity(size: usize, sample: &R) -> Self {
        Self::from_fn(size, |i, j| {
            if i == j {
                sample.one_like()
            } else {
                sample.zero_like()
            }
        })
    }

    pub fn diagonal(diag: Vec<R>) -> Self {
        let size = diag.len();
        let zero = diag[0].zero_like();
        let mut m = Self::zeros(size, &zero);
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: R) {
        self.entries[i * self.size + j] = value;
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &R)> {
        let n = self.size;
        self.entries
            .iter()
            .enumerate()
            .map(move |(k, e)| ((k / n, k % n), e))
    }

    pub fn map<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> RingMatrix<S> {
        RingMatrix {
            size: self.size,
            entries: self.entries.iter().map(&mut f).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.size, rhs.size, "size mismatch");
        RingMatrix {
            size: self.size,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.ring_add(b))
                .collect(),
        }
    }

    /// Ordered product: entry `(i,j) = sum_k self[i,k] * rhs[k,j]` with the
    /// left factor multiplied on the left.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.size, rhs.size, "size mismatch");
        let n = self.size;
        Self::from_fn(n, |i, j| {
            let mut acc: Option<R> = None;
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let b = rhs.get(k, j);
                if b.is_zero() {
                    continue;
                }
                let p = a.ring_mul(b);
                acc = Some(match acc {
                    Some(s) => s.ring_add(&p),
                    None => p,
                });
            }
            acc.unwrap_or_else(|| self.get(0, 0).zero_like())
        })
    }

    /// Left multiplication by a ring scalar applied to every entry.
    pub fn scale_left(&self, s: &R) -> Self {
        self.map(|e| s.ring_mul(e))
    }

    pub fn scale_q(&self, s: &QScalar) -> Self {
        self.map(|e| e.scale_q(s))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Leading principal block of the given size.
    pub fn leading_block(&self, size: usize) -> Self {
        assert!(size >= 1 && size <= self.size);
        Self::from_fn(size, |i, j| self.get(i, j).clone())
    }

    /// First entry where the two matrices differ.
    pub fn first_difference<'a>(&'a self, rhs: &'a Self) -> Option<(usize, usize, &'a R, &'a R)> {
        assert_eq!(self.size, rhs.size, "size mismatch");
        for i in 0..self.size {
            for j in 0..self.size {
                if self.get(i, j) != rhs.get(i, j) {
                    return Some((i, j, self.get(i, j), rhs.get(i, j)));
                }
            }
        }
        None
    }
}

/// Ordered Kronecker product: `(A (x) B)[(i,k),(j,l)] = A[i,j] * B[k,l]`, with
/// the A-entry multiplied on the left. Over noncommutative rings this order is
/// part of the definition.
pub fn kron<R: Ring>(a: &RingMatrix<R>, b: &RingMatrix<R>) -> RingMatrix<R> {
    let (na, nb) = (a.size(), b.size());
    RingMatrix::from_fn(na * nb, |r, c| {
        let (i, k) = (r / nb, r % nb);
        let (j, l) = (c / nb, c % nb);
        let x = a.get(i, j);
        let y = b.get(k, l);
        if x.is_zero() || y.is_zero() {
            x.zero_like()
        } else {
            x.ring_mul(y)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QExpBase {
    /// `e_q`: phase `q^{-n(n-1)/2}` on the degree-n term.
    Q,
    /// `e_{1/q}`: phase `q^{+n(n-1)/2}`.
    QInv,
}

impl QExpBase {
    /// The `v`-exponent of the phase on the degree-`n` term.
    pub fn phase_v_exp(self, n: i64) -> i64 {
        match self {
            QExpBase::Q => -n * (n - 1),
            QExpBase::QInv => n * (n - 1),
        }
    }
}

/// Matrix q-exponential `sum_n A^n/[n]! * base^{-n(n-1)/2}`.
///
/// Terminates when a power of `A` vanishes, which happens for nilpotent `A`
/// and for degree-truncated rings; otherwise fails after `max_terms` powers.
pub fn q_exp_matrix<R: Ring>(
    a: &RingMatrix<R>,
    base: QExpBase,
    max_terms: usize,
) -> Result<RingMatrix<R>> {
    let sample = a.get(0, 0);
    let mut acc = RingMatrix::identity(a.size(), sample);
    let mut power = RingMatrix::identity(a.size(), sample);
    let mut n: usize = 0;
    loop {
        power = power.mul(a);
        n += 1;
        if power.is_zero() {
            return Ok(acc);
        }
        if n > max_terms {
            return Err(QcvError::NotNilpotent { max_terms });
        }
        let coeff = &q_factorial(n as u32).inv() * &QScalar::v_pow(base.phase_v_exp(n as i64));
        acc = acc.add(&power.scale_q(&coeff));
    }
}

impl<R: Ring + fmt::Display> fmt::Display for RingMatrix<R> {
    /// Aligned pretty-printer used by the CLI `--dump` output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size;
        let cells: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        let mut widths = vec![0usize; n];
        for (k, s) in cells.iter().enumerate() {
            widths[k % n] = widths[k % n].max(s.len());
        }
        for i in 0..n {
            write!(f, "[ ")?;
            for j in 0..n {
                write!(f, "{:width$}", cells[i * n + j], width = widths[j])?;
                if j + 1 < n {
                    write!(f, " | ")?;
                }
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_int;

    fn qm(rows: Vec<Vec<i64>>) -> RingMatrix<QScalar> {
        RingMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(QScalar::from_int).collect())
                .collect(),
        )
    }

    #[test]
    fn mul_order_and_identity() {
        let a = qm(vec![vec![1, 2], vec![3, 4]]);
        let id = RingMatrix::identity(2, &QScalar::one());
        assert_eq!(a.mul(&id), a);
        assert_eq!(id.mul(&a), a);
    }

    #[test]
    fn kron_identity_and_mixed_product() {
        let id = RingMatrix::identity(2, &QScalar::one());
        assert_eq!(kron(&id, &id), RingMatrix::identity(4, &QScalar::one()));

        // (A (x) I)(I (x) B) = A (x) B over a commutative ring.
        let a = qm(vec![vec![1, 2], vec![3, 4]]);
        let b = qm(vec![vec![5, 6], vec![7, 8]]);
        let lhs = kron(&a, &id).mul(&kron(&id, &b));
        assert_eq!(lhs, kron(&a, &b));
    }

    #[test]
    fn q_exp_nilpotent() {
        // Strictly upper-triangular 2x2: e(T) = I + T for either base.
        let t = qm(vec![vec![0, 1], vec![0, 0]]);
        let e = q_exp_matrix(&t, QExpBase::Q, 8).unwrap();
        assert_eq!(e, qm(vec![vec![1, 1], vec![0, 1]]));

        // 3x3 single superdiagonal of q-integers: degree-2 term has 1/[2] and
        // the q^{-1} phase.
        let mut t3 = RingMatrix::zeros(3, &QScalar::zero());
        t3.set(0, 1, q_int(1));
        t3.set(1, 2, q_int(2));
        let e3 = q_exp_matrix(&t3, QExpBase::Q, 8).unwrap();
        let expect_02 = &(&q_int(1) * &q_int(2)) * &(&q_factorial(2).inv() * &QScalar::q_pow(-1));
        assert_eq!(e3.get(0, 2), &expect_02);
    }

    #[test]
    fn q_exp_rejects_non_nilpotent() {
        let id = RingMatrix::identity(2, &QScalar::one());
        assert!(matches!(
            q_exp_matrix(&id, QExpBase::Q, 10),
            Err(QcvError::NotNilpotent { .. })
        ));
    }

    #[test]
    fn q_exp_zero_is_identity() {
        let z = RingMatrix::zeros(3, &QScalar::zero());
        assert_eq!(
            q_exp_matrix(&z, QExpBase::QInv, 4).unwrap(),
            RingMatrix::identity(3, &QScalar::one())
        );
    }
}
