//! Brute-force counts against a naive counter written from the
//! definitions: every boundary value ranges over all of Z/m and the
//! realness conditions are applied directly.

use arfspin::topology::admissible_n_values;
use arfspin::{brute_force_counts, SpinModulus, TopologicalType};
use num_bigint::BigUint;

/// `(even, odd)` for the decomposition with `n` invariant curves.
fn naive_counts(g: u32, k: u32, eps: u8, m: u32, n: u32) -> (u64, u64) {
    let m64 = m as u64;
    let exists = if m.is_multiple_of(2) {
        (g - 1).is_multiple_of(m / 2)
    } else {
        (g - 1).is_multiple_of(m)
    };
    if !exists {
        return (0, 0);
    }
    let handles = m64.pow(g + 1 - n);
    let free = (n - 1) as usize;
    let mut even = 0;
    let mut odd = 0;
    let total = m64.pow(2 * free as u32);
    for code in 0..total {
        let mut rest = code;
        let mut gamma = vec![0i64; free];
        let mut delta = vec![0i64; free];
        for x in gamma.iter_mut().chain(delta.iter_mut()) {
            *x = (rest % m64) as i64;
            rest /= m64;
        }
        let m = m as i64;
        let ovals_ok = gamma.iter().enumerate().all(|(i, &x)| {
            if (i as u32) < k {
                (2 * x) % m == 0
            } else {
                x == 0
            }
        });
        if !ovals_ok {
            continue;
        }
        let last = (1 - g as i64 - gamma.iter().sum::<i64>()).rem_euclid(m);
        let last_ok = if eps == 1 {
            (2 * last) % m == 0
        } else {
            last == 0
        };
        if !last_ok {
            continue;
        }
        let parity = if m % 2 == 0 {
            gamma
                .iter()
                .zip(&delta)
                .map(|(c, d)| (1 - c) * (1 - d))
                .sum::<i64>()
                .rem_euclid(2)
        } else {
            0
        };
        if parity == 0 {
            even += handles;
        } else {
            odd += handles;
        }
    }
    (even, odd)
}

#[test]
fn brute_force_matches_naive_counter() {
    let mut cells = 0;
    for t in TopologicalType::all_up_to(4) {
        for m in 2..=6 {
            for n in admissible_n_values(&t) {
                let r = brute_force_counts(&t, SpinModulus::new(m).unwrap(), Some(n)).unwrap();
                let (e, o) = naive_counts(t.g(), t.k(), t.eps(), m, n);
                assert_eq!(
                    (r.even.clone(), r.odd.clone()),
                    (BigUint::from(e), BigUint::from(o)),
                    "{t} m={m} n={n}"
                );
                cells += 1;
            }
        }
    }
    assert!(cells > 100);
}

#[test]
fn worked_examples() {
    assert_eq!(naive_counts(3, 2, 1, 2, 2), (12, 4));
    assert_eq!(naive_counts(5, 0, 0, 4, 2), (512, 512));
    assert_eq!(naive_counts(4, 2, 0, 3, 3), (81, 0));
    assert_eq!(naive_counts(4, 1, 1, 3, 1), (81, 0));
    assert_eq!(naive_counts(2, 0, 0, 2, 3), (0, 0));
    let r = brute_force_counts(
        &TopologicalType::new(3, 2, 1).unwrap(),
        SpinModulus::new(2).unwrap(),
        None,
    )
    .unwrap();
    assert_eq!(r.total, BigUint::from(16u32));
}
