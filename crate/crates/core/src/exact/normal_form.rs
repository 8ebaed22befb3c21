//! Hermite and Smith normal forms over Z, and integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `(g, x, y)` with `x a + y b = g = gcd(a, b) >= 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Replaces rows `(p, q)` of `m` by `(x p + y q, u p + v q)`.
fn combine_rows(m: &mut IntMatrix, p: usize, q: usize, x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
    for c in 0..m.cols() {
        let a = m[(p, c)].clone();
        let b = m[(q, c)].clone();
        m[(p, c)] = x * &a + y * &b;
        m[(q, c)] = u * &a + v * &b;
    }
}

fn add_row_multiple(m: &mut IntMatrix, target: usize, source: usize, factor: &BigInt) {
    for c in 0..m.cols() {
        let s = &m[(source, c)] * factor;
        m[(target, c)] += s;
    }
}

fn add_col_multiple(m: &mut IntMatrix, target: usize, source: usize, factor: &BigInt) {
    for r in 0..m.rows() {
        let s = &m[(r, source)] * factor;
        m[(r, target)] += s;
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for c in 0..m.cols() {
        m[(r, c)] = -m[(r, c)].clone();
    }
}

/// Row Hermite normal form: returns `(H, U)` with `H = U M`, `U` unimodular,
/// `H` upper echelon with positive pivots and every entry above a pivot
/// reduced into `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.rows();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pivot_row = 0;
    for col in 0..m.cols() {
        if pivot_row == rows {
            break;
        }
        for r in pivot_row + 1..rows {
            if h[(r, col)].is_zero() {
                continue;
            }
            let a = h[(pivot_row, col)].clone();
            let b = h[(r, col)].clone();
            let (g, x, y) = ext_gcd(&a, &b);
            let ua = -(&b / &g);
            let va = &a / &g;
            combine_rows(&mut h, pivot_row, r, &x, &y, &ua, &va);
            combine_rows(&mut u, pivot_row, r, &x, &y, &ua, &va);
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            negate_row(&mut h, pivot_row);
            negate_row(&mut u, pivot_row);
        }
        let pivot = h[(pivot_row, col)].clone();
        for r in 0..pivot_row {
            let q = h[(r, col)].div_floor(&pivot);
            if !q.is_zero() {
                let neg = -q;
                add_row_multiple(&mut h, r, pivot_row, &neg);
                add_row_multiple(&mut u, r, pivot_row, &neg);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `S = U M V` diagonal,
/// nonnegative, and `s_1 | s_2 | ...`.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if s[(r, c)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(br, bc)| s[(r, c)].abs() < s[(br, bc)].abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else {
                return (s, u, v);
            };
            s.swap_rows(t, br);
            u.swap_rows(t, br);
            s.swap_cols(t, bc);
            v.swap_cols(t, bc);

            let pivot = s[(t, t)].clone();
            let mut clean = true;
            for r in t + 1..rows {
                let q = s[(r, t)].div_floor(&pivot);
                if !q.is_zero() {
                    let neg = -q;
                    add_row_multiple(&mut s, r, t, &neg);
                    add_row_multiple(&mut u, r, t, &neg);
                }
                clean &= s[(r, t)].is_zero();
            }
            for c in t + 1..cols {
                let q = s[(t, c)].div_floor(&pivot);
                if !q.is_zero() {
                    let neg = -q;
                    add_col_multiple(&mut s, c, t, &neg);
                    add_col_multiple(&mut v, c, t, &neg);
                }
                clean &= s[(t, c)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let offender = (t + 1..rows)
                .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !(&s[(r, c)] % &pivot).is_zero());
            match offender {
                Some((r, _)) => {
                    let one = BigInt::one();
                    add_row_multiple(&mut s, t, r, &one);
                    add_row_multiple(&mut u, t, r, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            negate_row(&mut s, t);
            negate_row(&mut u, t);
        }
    }
    (s, u, v)
}

/// Z-basis (as columns) of `{x in Z^N : E x = 0}`.
pub fn integer_kernel(e: &IntMatrix) -> IntMatrix {
    let n = e.cols();
    let (h, u) = hnf(&e.transpose());
    let rank = (0..h.rows()).take_while(|&r| h.row(r).iter().any(|x| !x.is_zero())).count();
    let k = n - rank;
    IntMatrix::from_fn(n, k, |r, c| u[(rank + c, r)].clone())
}

/// Column Hermite form: same column lattice, lower-triangular pattern of
/// the transposed row form.
pub(crate) fn column_hnf(m: &IntMatrix) -> IntMatrix {
    hnf(&m.transpose()).0.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut zero_rows_started = false;
        for r in 0..h.rows() {
            let lead = (0..h.cols()).find(|&c| !h[(r, c)].is_zero());
            match lead {
                None => zero_rows_started = true,
                Some(c) => {
                    if zero_rows_started || last_pivot.is_some_and(|p| c <= p) {
                        return false;
                    }
                    if !h[(r, c)].is_positive() {
                        return false;
                    }
                    for above in 0..r {
                        let v = &h[(above, c)];
                        if v.is_negative() || v >= &h[(r, c)] {
                            return false;
                        }
                    }
                    last_pivot = Some(c);
                }
            }
        }
        true
    }

    #[test]
    fn hnf_examples() {
        let m = IntMatrix::from_rows_i64(&[[2, 0], [0, 2]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, m);
        assert!(u.is_identity());

        let (h, u) = hnf(&IntMatrix::from_rows_i64(&[[0, 1], [1, 0]]));
        assert!(h.is_identity());
        assert_eq!(u.det().abs(), BigInt::one());

        let m = IntMatrix::from_rows_i64(&[[4, 6], [2, 2]]);
        let (h, u) = hnf(&m);
        assert!(is_hnf(&h));
        assert_eq!(u.mul(&m), h);
        assert_eq!(h.det().abs(), BigInt::from(4));
        // 2x2 HNF of this lattice: rows (2,0),(0,2) span the same rows as (4,6),(2,2)
        assert_eq!(h, IntMatrix::from_rows_i64(&[[2, 0], [0, 2]]));
    }

    #[test]
    fn hnf_rectangular_and_rank_deficient() {
        let m = IntMatrix::from_rows_i64(&[[3, 6, 9], [1, 2, 3], [0, 5, 7], [2, 4, 6]]);
        let (h, u) = hnf(&m);
        assert!(is_hnf(&h));
        assert_eq!(u.mul(&m), h);
        assert_eq!(u.det().abs(), BigInt::one());
        assert!(h.row(2).iter().all(Zero::is_zero));
    }

    #[test]
    fn snf_examples() {
        let (s, u, v) = snf(&IntMatrix::identity(3));
        assert!(s.is_identity() && u.is_identity() && v.is_identity());

        let m = IntMatrix::from_rows_i64(&[[2, 0], [0, 3]]);
        let (s, u, v) = snf(&m);
        assert_eq!(s, IntMatrix::from_rows_i64(&[[1, 0], [0, 6]]));
        assert_eq!(u.mul(&m).mul(&v), s);

        let m = IntMatrix::from_rows_i64(&[[2, 0], [0, 2]]);
        assert_eq!(snf(&m).0, m);
    }

    #[test]
    fn kernel_basis() {
        let e = IntMatrix::from_rows_i64(&[[1, 2, 3], [4, 5, 6]]);
        let k = integer_kernel(&e);
        assert_eq!(k.cols(), 1);
        assert!(e.mul(&k).is_zero());
        let col = k.column(0);
        assert_eq!(col.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1.into(), 2.into(), 1.into()]);
    }
}
