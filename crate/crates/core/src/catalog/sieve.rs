//! Prime, smooth-number and multiset-count generators.

/// Primes `p <= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Largest prime factor of every `m <= n` (`lpf[1] = 1`).
pub fn largest_prime_factors(n: usize) -> Vec<usize> {
    let mut lpf: Vec<usize> = vec![0; n + 1];
    if n >= 1 {
        lpf[1] = 1;
    }
    for p in 2..=n {
        if lpf[p] == 0 {
            let mut m = p;
            while m <= n {
                lpf[m] = p;
                m += p;
            }
        }
    }
    lpf
}

/// `f(m) = 1` if every prime factor of `m` is at most `y`, else 0, for `m = 1..=n`.
pub fn smooth_indicator(n: usize, y: usize) -> Vec<f64> {
    let lpf = largest_prime_factors(n);
    (1..=n).map(|m| if lpf[m] <= y { 1.0 } else { 0.0 }).collect()
}

/// Coefficients of `prod_j (1 - n_j^{-s})^{-m_j}` up to `n`: weighted counts of
/// factorisations `m = prod n_j^{e_j}` with weight `prod C(e_j + m_j - 1, m_j - 1)`.
pub fn multiset_counts(n: usize, gens: &[(u64, u32)]) -> Vec<f64> {
    let mut f = vec![0.0; n];
    f[0] = 1.0;
    for &(g, m) in gens {
        let g = g as usize;
        let mut next = f.clone();
        // multiply by sum_{e >= 1} C(e+m-1, m-1) g^{-es}
        let mut pow = g;
        let mut e = 1u64;
        while pow <= n {
            let w = binomial(e + m as u64 - 1, m as u64 - 1);
            for q in 1..=n / pow {
                if f[q - 1] != 0.0 {
                    next[q * pow - 1] += w * f[q - 1];
                }
            }
            match pow.checked_mul(g) {
                Some(p) => pow = p,
                None => break,
            }
            e += 1;
        }
        f = next;
    }
    f
}

fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}
