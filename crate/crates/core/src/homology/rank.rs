//! Exact rank over the rationals by fraction-free (Bareiss) elimination.
//!
//! Intermediate entries are minors of the input, so they stay integral. The
//! fast path runs in `i128` with checked arithmetic and falls back to
//! arbitrary precision if any product overflows.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::IntMatrix;

pub fn exact_rank(m: &IntMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 || m.is_zero() {
        return 0;
    }
    let rows = m.to_dense_rows();
    let narrow: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| i128::from(v)).collect())
        .collect();
    if let Some(r) = bareiss_i128(narrow) {
        return r;
    }
    let wide: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    bareiss_big(wide)
}

fn bareiss_i128(mut a: Vec<Vec<i128>>) -> Option<usize> {
    let (nr, nc) = (a.len(), a[0].len());
    let mut prev: i128 = 1;
    let mut row = 0;
    for col in 0..nc {
        let Some(p) = (row..nr).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(row, p);
        let pivot = a[row][col];
        for i in row + 1..nr {
            let lead = a[i][col];
            for j in col + 1..nc {
                let x = a[i][j].checked_mul(pivot)?;
                let y = lead.checked_mul(a[row][j])?;
                a[i][j] = x.checked_sub(y)? / prev;
            }
            a[i][col] = 0;
        }
        prev = pivot;
        row += 1;
        if row == nr {
            break;
        }
    }
    Some(row)
}

fn bareiss_big(mut a: Vec<Vec<BigInt>>) -> usize {
    let (nr, nc) = (a.len(), a[0].len());
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..nc {
        let Some(p) = (row..nr).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pivot = a[row][col].clone();
        for i in row + 1..nr {
            let lead = a[i][col].clone();
            for j in col + 1..nc {
                let v = (&a[i][j] * &pivot - &lead * &a[row][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = pivot;
        row += 1;
        if row == nr {
            break;
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[i64]]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn small_ranks() {
        assert_eq!(exact_rank(&IntMatrix::zeros(3, 4)), 0);
        assert_eq!(exact_rank(&from_rows(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(exact_rank(&from_rows(&[&[0, 1, 0], &[1, 0, 0], &[1, 1, 0]])), 2);
        assert_eq!(exact_rank(&from_rows(&[&[2, 0], &[0, 3], &[5, 7]])), 2);
    }

    #[test]
    fn wide_fallback_agrees() {
        // Entries large enough that i128 products overflow in the second step.
        let big = 1i64 << 62;
        let m = from_rows(&[&[big, 1, 3], &[3, big, 1], &[1, 3, big], &[big, 1, 3]]);
        let rows = m.to_dense_rows();
        let narrow: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| i128::from(v)).collect())
            .collect();
        assert!(bareiss_i128(narrow).is_none());
        assert_eq!(exact_rank(&m), 3);
    }
}
