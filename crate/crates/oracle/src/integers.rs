//! Brute-force integer oracles for the coefficient sequences.

use num_bigint::BigUint;

/// `C(n, k)` by Pascal's triangle.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut row = vec![BigUint::from(1u32)];
    for i in 1..=n as usize {
        let mut next = vec![BigUint::from(1u32); i + 1];
        for j in 1..i {
            next[j] = &row[j - 1] + &row[j];
        }
        row = next;
    }
    row[k as usize].clone()
}

/// Numerator coefficients of the Beta-prime CDF written over
/// `(1+x)^(m+k-1)`, found by expanding `(1+x)^(m+k-1) - Σ_{j<m} C(m+k-1, j) x^j`.
/// Returned vector is indexed by power of `x` starting at 1.
pub fn beta_prime_cdf_numerator(m: u32, k: u32) -> Vec<BigUint> {
    let d = m + k - 1;
    (1..=d)
        .map(|j| {
            if j < m {
                BigUint::from(0u32)
            } else {
                binomial(d, j)
            }
        })
        .collect()
}

/// Schoolbook convolution.
pub fn convolve(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(0u32); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `[Σ_j v_j x^j]^power` by expanding the power through
/// repeated squaring, a different route from sequential convolution.
pub fn power(v: &[BigUint], power: u32) -> Vec<BigUint> {
    let mut result = vec![BigUint::from(1u32)];
    let mut base = v.to_vec();
    let mut e = power;
    while e > 0 {
        if e & 1 == 1 {
            result = convolve(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = convolve(&base, &base);
        }
    }
    result
}
