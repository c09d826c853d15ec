// Dense LU factorization with partial pivoting for small MNA systems.

use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub(crate) struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factors the row-major `n x n` matrix. `None` when a pivot is (relatively) zero.
    pub(crate) fn factor(n: usize, mut a: Vec<f64>) -> Option<Lu> {
        debug_assert_eq!(a.len(), n * n);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        let tiny = scale * 1e-14;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for r in k + 1..n {
                let v = a[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= tiny {
                return None;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                if f != 0.0 {
                    a[r * n + k] = f;
                    for c in k + 1..n {
                        a[r * n + c] -= f * a[k * n + c];
                    }
                } else {
                    a[r * n + k] = 0.0;
                }
            }
        }
        Some(Lu { n, a, perm })
    }

    pub(crate) fn solve(&self, b: &[f64], x: &mut Vec<f64>) {
        let n = self.n;
        x.clear();
        x.extend(self.perm.iter().map(|&p| b[p]));
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.a[r * n + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.a[r * n + c] * x[c];
            }
            x[r] = s / self.a[r * n + r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn solves_permuted_system() {
        let lu = Lu::factor(3, vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0]).unwrap();
        let mut x = Vec::new();
        lu.solve(&[7.0, 3.0, 6.0], &mut x);
        let expect = [1.0, 2.0, 3.0];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn singular_detected() {
        assert!(Lu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).is_none());
    }
}
