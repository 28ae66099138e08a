use num_bigint::BigUint;

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// Pairs `(g, d)` with `1 <= g <= g_max`, `g < d <= 2g + 1` and
/// `g!` dividing `binomial(d, g + 1)`, in increasing order.
pub fn degree_divisibility_scan(g_max: u64) -> Vec<(u64, u64)> {
    let zero = BigUint::from(0u32);
    let mut out = Vec::new();
    for g in 1..=g_max {
        let f = factorial(g);
        for d in g + 1..=2 * g + 1 {
            if binomial(d, g + 1) % &f == zero {
                out.push((g, d));
            }
        }
    }
    out
}
