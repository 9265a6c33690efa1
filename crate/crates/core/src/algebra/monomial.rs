use std::cmp::Ordering;
use std::fmt::Write as _;

use smallvec::SmallVec;

use super::table::GeneratorTable;
use crate::error::{Error, Result};

/// A product of generators in canonical form.
///
/// The odd part is a set of generator indices (bit `i` set means the odd
/// generator `i` occurs, once); the implied order is increasing index. The
/// even part maps generator index to a positive exponent, sorted by index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    odd: u64,
    even: SmallVec<[(u16, u32); 4]>,
}

/// Number of inversions created by writing the odd set `a` before `b`.
#[inline]
fn odd_crossings(a: u64, mut b: u64) -> u32 {
    let mut count = 0;
    while b != 0 {
        let j = b.trailing_zeros();
        let above = if j >= 63 { 0 } else { a >> (j + 1) };
        count += above.count_ones();
        b &= b - 1;
    }
    count
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn is_one(&self) -> bool {
        self.odd == 0 && self.even.is_empty()
    }

    /// The single generator `idx` of the table.
    pub fn generator(table: &GeneratorTable, idx: usize) -> Self {
        if table.is_odd(idx) {
            Monomial {
                odd: 1 << idx,
                even: SmallVec::new(),
            }
        } else {
            let mut even = SmallVec::new();
            even.push((idx as u16, 1));
            Monomial { odd: 0, even }
        }
    }

    /// Builds a monomial from explicit parts. Exponent entries of zero are
    /// dropped; indices must refer to generators of the right parity.
    pub fn from_parts(
        table: &GeneratorTable,
        odd: &[usize],
        even: &[(usize, u32)],
    ) -> Result<(bool, Self)> {
        let mut word = Vec::new();
        word.extend_from_slice(odd);
        for &(i, e) in even {
            table.check_index(i)?;
            if table.is_odd(i) {
                return Err(Error::InvalidInput(format!(
                    "{} is odd and cannot carry an exponent",
                    table.generator(i).name
                )));
            }
            for _ in 0..e {
                word.push(i);
            }
        }
        match normalize_word(table, &word)? {
            Some((sign, m)) => Ok((sign < 0, m)),
            None => Err(Error::InvalidInput("repeated odd generator".into())),
        }
    }

    #[inline]
    pub fn odd_mask(&self) -> u64 {
        self.odd
    }

    pub fn odd_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut bits = self.odd;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn odd_count(&self) -> u32 {
        self.odd.count_ones()
    }

    pub fn even_part(&self) -> &[(u16, u32)] {
        &self.even
    }

    pub fn exponent(&self, idx: usize) -> u32 {
        if self.odd >> idx & 1 == 1 {
            return 1;
        }
        self.even
            .iter()
            .find(|(i, _)| *i as usize == idx)
            .map_or(0, |&(_, e)| e)
    }

    pub fn degree(&self, table: &GeneratorTable) -> u64 {
        let odd: u64 = self.odd_indices().map(|i| table.degree_of(i)).sum();
        let even: u64 = self
            .even
            .iter()
            .map(|&(i, e)| e as u64 * table.degree_of(i as usize))
            .sum();
        odd + even
    }

    /// Parity of the degree; only odd generators contribute.
    #[inline]
    pub fn is_odd_degree(&self) -> bool {
        self.odd.count_ones() % 2 == 1
    }

    /// Product `self * other`; `None` when an odd generator repeats, otherwise
    /// the Koszul sign (`true` for negative) and the product.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        if self.odd & other.odd != 0 {
            return None;
        }
        let negative = odd_crossings(self.odd, other.odd) % 2 == 1;
        Some((
            negative,
            Monomial {
                odd: self.odd | other.odd,
                even: merge_even(&self.even, &other.even),
            },
        ))
    }

    /// Multiplies all even exponents by `k`. Only meaningful for purely even
    /// monomials, where it computes the `k`-th power.
    pub fn scale_even(&self, k: u32) -> Monomial {
        debug_assert_eq!(self.odd, 0);
        Monomial {
            odd: 0,
            even: self.even.iter().map(|&(i, e)| (i, e * k)).collect(),
        }
    }

    /// Splits into the factors whose generators lie in `mask` and the rest.
    /// Returns `(negative, inside, outside)` where `self = ± outside * inside`,
    /// i.e. the inside factors are moved to the right.
    pub fn split_right(&self, mask: u64) -> (bool, Monomial, Monomial) {
        let inside_odd = self.odd & mask;
        let outside_odd = self.odd & !mask;
        let negative = odd_crossings(outside_odd, inside_odd) % 2 == 1;
        let mut inside = SmallVec::new();
        let mut outside = SmallVec::new();
        for &(i, e) in &self.even {
            if mask >> i & 1 == 1 {
                inside.push((i, e));
            } else {
                outside.push((i, e));
            }
        }
        (
            negative,
            Monomial {
                odd: inside_odd,
                even: inside,
            },
            Monomial {
                odd: outside_odd,
                even: outside,
            },
        )
    }

    /// Bit mask of all generators occurring in the monomial.
    pub fn support(&self) -> u64 {
        self.even.iter().fold(self.odd, |m, &(i, _)| m | 1 << i)
    }

    /// Removes an odd generator, returning the sign of first moving it to the
    /// front.
    pub(crate) fn remove_odd(&self, idx: usize) -> Option<(bool, Monomial)> {
        if self.odd >> idx & 1 == 0 {
            return None;
        }
        let before = self.odd & ((1u64 << idx) - 1);
        let negative = before.count_ones() % 2 == 1;
        Some((
            negative,
            Monomial {
                odd: self.odd & !(1 << idx),
                even: self.even.clone(),
            },
        ))
    }

    /// Replaces the even exponent of `idx` (removing it when zero).
    pub(crate) fn with_exponent(&self, idx: usize, e: u32) -> Monomial {
        let mut even: SmallVec<[(u16, u32); 4]> =
            self.even.iter().copied().filter(|&(i, _)| i as usize != idx).collect();
        if e > 0 {
            let pos = even.partition_point(|&(i, _)| (i as usize) < idx);
            even.insert(pos, (idx as u16, e));
        }
        Monomial { odd: self.odd, even }
    }

    /// Relabels generators through `map` (source index to target index),
    /// returning the Koszul sign of restoring canonical order.
    pub(crate) fn relabel(&self, map: &[usize]) -> (bool, Monomial) {
        let mut odd = 0u64;
        let mut negative = false;
        for i in self.odd_indices() {
            let j = map[i];
            let above = if j >= 63 { 0 } else { odd >> (j + 1) };
            negative ^= above.count_ones() % 2 == 1;
            odd |= 1 << j;
        }
        let mut even: SmallVec<[(u16, u32); 4]> =
            self.even.iter().map(|&(i, e)| (map[i as usize] as u16, e)).collect();
        even.sort_unstable();
        (negative, Monomial { odd, even })
    }

    /// Canonical text, odd factors first, e.g. `x1*x2*y1^3`; `1` for the unit.
    pub fn render(&self, table: &GeneratorTable) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        let mut push = |out: &mut String, name: &str, e: u32| {
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(name);
            if e != 1 {
                let _ = write!(out, "^{e}");
            }
        };
        for i in self.odd_indices() {
            push(&mut out, &table.generator(i).name, 1);
        }
        for &(i, e) in &self.even {
            push(&mut out, &table.generator(i as usize).name, e);
        }
        out
    }

    /// Display order: total degree ascending, then larger exponents on
    /// earlier generators first.
    pub fn display_cmp(&self, other: &Monomial, table: &GeneratorTable) -> Ordering {
        self.degree(table)
            .cmp(&other.degree(table))
            .then_with(|| {
                for i in 0..table.len() {
                    let c = other.exponent(i).cmp(&self.exponent(i));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                Ordering::Equal
            })
    }
}

fn merge_even(a: &[(u16, u32)], b: &[(u16, u32)]) -> SmallVec<[(u16, u32); 4]> {
    let mut out = SmallVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Puts a word of generators into canonical order.
///
/// Returns `None` when an odd generator repeats (the product is zero), and
/// otherwise the sign `±1` of the permutation of odd factors together with
/// the canonical monomial. Even generators commute with everything.
pub fn normalize_word(table: &GeneratorTable, word: &[usize]) -> Result<Option<(i8, Monomial)>> {
    let mut acc = Monomial::one();
    let mut negative = false;
    for &g in word {
        table.check_index(g)?;
        match acc.mul(&Monomial::generator(table, g)) {
            Some((neg, m)) => {
                negative ^= neg;
                acc = m;
            }
            None => return Ok(None),
        }
    }
    Ok(Some((if negative { -1 } else { 1 }, acc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    fn table() -> std::sync::Arc<GeneratorTable> {
        GeneratorTable::cohomology(FieldConfig::new(3).unwrap(), 2).unwrap()
    }

    #[test]
    fn odd_transposition_flips_sign() {
        let t = table();
        let (sign, m) = normalize_word(&t, &[1, 0]).unwrap().unwrap();
        assert_eq!(sign, -1);
        assert_eq!(m.render(&t), "x1*x2");
    }

    #[test]
    fn repeated_odd_is_zero() {
        let t = table();
        assert!(normalize_word(&t, &[0, 0]).unwrap().is_none());
        assert!(normalize_word(&t, &[0, 2, 1, 0]).unwrap().is_none());
    }

    #[test]
    fn even_generators_commute() {
        let t = table();
        // y2, x1, y1
        let (sign, m) = normalize_word(&t, &[3, 0, 2]).unwrap().unwrap();
        assert_eq!(sign, 1);
        assert_eq!(m.render(&t), "x1*y1*y2");
    }

    #[test]
    fn unknown_index_rejected() {
        let t = table();
        assert!(normalize_word(&t, &[7]).is_err());
    }

    #[test]
    fn split_moves_inside_right() {
        let t = table();
        // x1*x2 with x1 designated: x1*x2 = -x2*x1
        let (_, m) = normalize_word(&t, &[0, 1]).unwrap().unwrap();
        let (neg, inside, outside) = m.split_right(1);
        assert!(neg);
        assert_eq!(inside.render(&t), "x1");
        assert_eq!(outside.render(&t), "x2");
    }

    #[test]
    fn degree_counts_exponents() {
        let t = table();
        let (_, m) = Monomial::from_parts(&t, &[1], &[(2, 3), (3, 1)]).unwrap();
        assert_eq!(m.degree(&t), 1 + 6 + 2);
        assert_eq!(m.exponent(2), 3);
        assert_eq!(m.exponent(0), 0);
    }
}
