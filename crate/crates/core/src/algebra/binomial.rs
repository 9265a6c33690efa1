/// `C(a, b) mod p` by Lucas' theorem.
pub fn binomial_mod_p(mut a: u64, mut b: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let mut acc = 1u64;
    while b > 0 {
        let (ad, bd) = (a % p64, b % p64);
        if bd > ad {
            return 0;
        }
        acc = acc * small_binomial(ad, bd, p64) % p64;
        a /= p64;
        b /= p64;
    }
    acc as u32
}

fn small_binomial(a: u64, b: u64, p: u64) -> u64 {
    let b = b.min(a - b);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..b {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    // den is a product of integers < p, hence a unit
    num * mod_pow(den, p - 2, p) % p
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Multinomial coefficient `(Σ parts)! / Π parts! mod p`.
pub fn multinomial_mod_p(parts: &[u64], p: u32) -> u32 {
    let mut total = 0u64;
    let mut acc = 1u64;
    for &k in parts {
        total += k;
        acc = acc * binomial_mod_p(total, k, p) as u64 % p as u64;
        if acc == 0 {
            return 0;
        }
    }
    acc as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_binomial(a: u64, b: u64) -> u128 {
        if b > a {
            return 0;
        }
        let mut r: u128 = 1;
        for i in 0..b as u128 {
            r = r * (a as u128 - i) / (i + 1);
        }
        r
    }

    #[test]
    fn small_values() {
        assert_eq!(binomial_mod_p(3, 1, 3), 0);
        assert_eq!(binomial_mod_p(4, 1, 3), 1);
        assert_eq!(binomial_mod_p(10, 0, 3), 1);
        assert_eq!(binomial_mod_p(2, 5, 3), 0);
    }

    #[test]
    fn agrees_with_factorials() {
        for p in [3u32, 5] {
            for a in 0..=50u64 {
                for b in 0..=a {
                    assert_eq!(
                        binomial_mod_p(a, b, p) as u128,
                        exact_binomial(a, b) % p as u128,
                        "C({a},{b}) mod {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn multinomial_matches_product_of_binomials() {
        // 6!/(1!2!3!) = 60
        assert_eq!(multinomial_mod_p(&[1, 2, 3], 7), (60 % 7) as u32);
        assert_eq!(multinomial_mod_p(&[1, 2, 3], 5), 0);
    }
}
