//! Explicit representations by `u^2 + v^2 - w^2`.

/// `(u, v, w)` with `u^2 + v^2 - w^2 = n`, using a difference of consecutive
/// squares for odd `n` and `+1` for even `n`. `w` is taken non-negative.
pub fn represent_q3(n: i64) -> [i64; 3] {
    let n = n as i128;
    let (u, v, w) = if n.rem_euclid(2) == 1 { ((n + 1) / 2, 0, (n - 1) / 2) } else { (n / 2, 1, (n - 2) / 2) };
    [u as i64, v, w.abs() as i64]
}

pub fn q3(t: &[i64; 3]) -> i128 {
    let [u, v, w] = t.map(|x| x as i128);
    u * u + v * v - w * w
}

/// One representative triple per distinct element of `f`, in order of first
/// occurrence.
pub fn lift_f(f: &[i64]) -> Vec<[i64; 3]> {
    let mut seen = std::collections::BTreeSet::new();
    f.iter().filter(|n| seen.insert(**n)).map(|&n| represent_q3(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(represent_q3(5), [3, 0, 2]);
        assert_eq!(represent_q3(0), [0, 1, 1]);
        assert_eq!(represent_q3(4), [2, 1, 1]);
        assert_eq!(represent_q3(-3), [-1, 0, 2]);
    }

    #[test]
    fn lift_dedups() {
        assert!(lift_f(&[]).is_empty());
        assert_eq!(lift_f(&[5]), vec![[3, 0, 2]]);
        assert_eq!(lift_f(&[5, 5, -1]).len(), 2);
    }
}
