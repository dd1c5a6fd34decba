/// All permutations of `0..n` with their signs, generated by Heap's algorithm.
pub(crate) fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut out = vec![(perm.clone(), sign)];
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Binomial coefficient, saturating on overflow.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity_by_inversions(p: &[usize]) -> f64 {
        let mut inv = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    #[test]
    fn heap_generates_all_with_correct_sign() {
        for n in 0..=5 {
            let perms = signed_permutations(n);
            assert_eq!(perms.len() as f64, factorial(n));
            let mut seen: Vec<_> = perms.iter().map(|(p, _)| p.clone()).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), perms.len());
            for (p, s) in &perms {
                assert_eq!(*s, parity_by_inversions(p));
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(10, 10), 1);
    }
}
