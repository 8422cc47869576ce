use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest block size the exact summation accepts.
pub const EXACT_MAX_N: usize = 16;

/// Exact Bhattacharyya parameters `Z(W_n^{(i)})` of the synthetic channels
/// under BSC(p), by summation over channel outputs and input prefixes.
///
/// Two exact symmetries of the BSC keep the sum tractable up to `n = 16`:
/// every prefix `u_0^{i-1}` contributes the same total (shift `y` by the
/// prefix codeword), and the summand is constant on cosets of the code
/// spanned by rows `i+1..n` of `G`, whose representatives are the outputs
/// vanishing above position `i`.
pub fn exact_reliabilities_small<T: Scalar>(n: usize, p: T) -> Result<Vec<T>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n > EXACT_MAX_N {
        return Err(Error::InvalidParameter(format!("exact oracle limited to n <= {EXACT_MAX_N}, got {n}")));
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::ProbabilityOutOfRange { value: p.as_f64(), range: "[0, 1]" });
    }
    let codewords = codeword_table(n);
    let q = T::one() - p;
    // weight[d] = p^d (1-p)^(n-d)
    let weight: Vec<T> = (0..=n).map(|d| p.powi(d as i32) * q.powi((n - d) as i32)).collect();
    let two = T::lit(2.0);
    let norm = two.powi(-(n as i32 - 1));

    Ok((0..n)
        .map(|i| {
            let tail = n - i - 1;
            let mut total = T::zero();
            for y in 0u32..(1u32 << (i + 1)) {
                let mut a = [T::zero(); 2];
                for (b, acc) in a.iter_mut().enumerate() {
                    for s in 0u32..(1u32 << tail) {
                        let u = ((b as u32) << i) | (s << (i + 1));
                        let d = (codewords[u as usize] ^ y).count_ones() as usize;
                        *acc += weight[d];
                    }
                    *acc *= norm;
                }
                total += (a[0] * a[1]).sqrt();
            }
            total * two.powi(i as i32) * two.powi(tail as i32)
        })
        .collect())
}

/// `uG` for every `u < 2^n`, words packed with position `k` at bit `k`.
fn codeword_table(n: usize) -> Vec<u32> {
    // Row i of G = F^{⊗m} has ones at the positions j with j ⊆ i.
    let rows: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| i & j == j).fold(0u32, |acc, j| acc | (1 << j)))
        .collect();
    let mut table = vec![0u32; 1 << n];
    for u in 1..(1usize << n) {
        let low = u.trailing_zeros() as usize;
        table[u] = table[u & (u - 1)] ^ rows[low];
    }
    table
}
