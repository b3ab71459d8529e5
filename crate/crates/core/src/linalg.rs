//! Dense kernels over [`Arith`]: skew-symmetric Pfaffian by Parlett–Reid
//! elimination and determinant by partially pivoted LU. Both return the
//! result as a sign and a log magnitude.

use crate::arith::Arith;

/// Sign and log-magnitude of a product that may under- or overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    /// -1, 0 or +1.
    pub sign: i8,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }
}

struct Acc<T: Arith> {
    sign: i8,
    log_abs: T,
}

impl<T: Arith> Acc<T> {
    fn new(ctx: T::Ctx) -> Self {
        Acc {
            sign: 1,
            log_abs: T::zero(ctx),
        }
    }

    fn mul(&mut self, v: &T, zero: &T) {
        if *v < *zero {
            self.sign = -self.sign;
        }
        self.log_abs.add_assign_ref(&v.abs().ln());
    }
}

/// Pfaffian of the `n × n` skew-symmetric row-major matrix `a` (destroyed).
/// Returns `(sign, ln|Pf|)` with the log kept in `T`.
///
/// Only the strict upper triangle is read, so the lower half may hold
/// anything.
pub fn pfaffian_in_place<T: Arith>(n: usize, a: &mut [T], ctx: T::Ctx) -> (i8, T) {
    assert_eq!(a.len(), n * n, "matrix storage does not match order");
    let zero = T::zero(ctx);
    if n % 2 == 1 {
        return (0, T::from_f64(f64::NEG_INFINITY, ctx));
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut acc = Acc::<T>::new(ctx);

    let mut k = 0;
    while k + 1 < n {
        let r = k + 1;
        // pivot: largest entry of row k right of the diagonal
        let mut q = r;
        for j in r + 1..n {
            if a[idx(k, j)].cmp_abs(&a[idx(k, q)]).is_gt() {
                q = j;
            }
        }
        if q != r {
            // symmetric interchange of indices r and q on the upper triangle
            a.swap(idx(k, r), idx(k, q));
            for j in q + 1..n {
                a.swap(idx(r, j), idx(q, j));
            }
            for j in r + 1..q {
                a.swap(idx(r, j), idx(j, q));
                a[idx(r, j)] = -a[idx(r, j)].clone();
                a[idx(j, q)] = -a[idx(j, q)].clone();
            }
            a[idx(r, q)] = -a[idx(r, q)].clone();
            acc.sign = -acc.sign;
        }
        let pivot = a[idx(k, r)].clone();
        if pivot.is_zero() {
            return (0, T::from_f64(f64::NEG_INFINITY, ctx));
        }
        acc.mul(&pivot, &zero);

        if k + 2 < n {
            // A[i][j] += τᵢ·A[j][r] − A[i][r]·τⱼ with τ = A[k][·]/pivot; in upper
            // storage A[i][r] = −A[r][i], so A[i][j] −= τᵢ·A[r][j] − A[r][i]·τⱼ.
            let tau: Vec<T> = (k + 2..n).map(|j| a[idx(k, j)].clone() / pivot.clone()).collect();
            let col: Vec<T> = (k + 2..n).map(|i| a[idx(r, i)].clone()).collect();
            let neg_col: Vec<T> = col.iter().map(|c| -c.clone()).collect();
            let base = k + 2;
            for i in base..n {
                for j in i + 1..n {
                    let e = &mut a[idx(i, j)];
                    e.sub_mul_assign(&tau[i - base], &col[j - base]);
                    e.sub_mul_assign(&neg_col[i - base], &tau[j - base]);
                }
            }
        }
        k += 2;
    }
    (acc.sign, acc.log_abs)
}

/// Determinant of the `n × n` row-major matrix `a` (destroyed) by LU with
/// partial pivoting; returns `(sign, ln|det|)`.
pub fn determinant_in_place<T: Arith>(n: usize, a: &mut [T], ctx: T::Ctx) -> (i8, T) {
    assert_eq!(a.len(), n * n, "matrix storage does not match order");
    let zero = T::zero(ctx);
    let idx = |i: usize, j: usize| i * n + j;
    let mut acc = Acc::<T>::new(ctx);

    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[idx(i, k)].cmp_abs(&a[idx(piv, k)]).is_gt() {
                piv = i;
            }
        }
        if a[idx(piv, k)].is_zero() {
            return (0, T::from_f64(f64::NEG_INFINITY, ctx));
        }
        if piv != k {
            for j in 0..n {
                a.swap(idx(k, j), idx(piv, j));
            }
            acc.sign = -acc.sign;
        }
        let pivot = a[idx(k, k)].clone();
        acc.mul(&pivot, &zero);
        let row: Vec<T> = (k + 1..n).map(|j| a[idx(k, j)].clone()).collect();
        for i in k + 1..n {
            let l = a[idx(i, k)].clone() / pivot.clone();
            for (jj, j) in (k + 1..n).enumerate() {
                a[idx(i, j)].sub_mul_assign(&l, &row[jj]);
            }
        }
    }
    (acc.sign, acc.log_abs)
}

/// `f64` convenience wrapper around [`pfaffian_in_place`].
pub fn pfaffian(n: usize, a: &[f64]) -> SignedLog {
    let mut work = a.to_vec();
    let (sign, log_abs) = pfaffian_in_place(n, &mut work, ());
    if sign == 0 {
        SignedLog::ZERO
    } else {
        SignedLog { sign, log_abs }
    }
}

/// `f64` convenience wrapper around [`determinant_in_place`].
pub fn determinant(n: usize, a: &[f64]) -> SignedLog {
    let mut work = a.to_vec();
    let (sign, log_abs) = determinant_in_place(n, &mut work, ());
    if sign == 0 {
        SignedLog::ZERO
    } else {
        SignedLog { sign, log_abs }
    }
}
