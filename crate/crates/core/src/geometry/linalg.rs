use num_rational::BigRational;
use num_traits::Zero;

/// Solves the square system `m x = rhs` exactly. `None` if `m` is singular.
pub fn solve(m: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for j in c..=n {
            a[c][j] = &a[c][j] * &inv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in c..=n {
                let v = &a[r][j] - &f * &a[c][j];
                a[r][j] = v;
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn solves_small_systems() {
        let m = vec![vec![q(0, 1), q(2, 1)], vec![q(3, 1), q(1, 1)]];
        let x = solve(&m, &[q(4, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(1, 1), q(2, 1)]);
        let singular = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(solve(&singular, &[q(1, 1), q(1, 1)]).is_none());
    }
}
