use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::monomial::Monomial;
use super::table::{same_table, GeneratorTable, Parity};
use crate::error::{Error, Result};
use crate::field::FieldConfig;

/// A finite `F_p`-linear combination of canonical monomials.
///
/// Coefficients are stored as residues in `1..p`; zero terms are never
/// stored, so two elements are equal exactly when their term maps agree.
#[derive(Clone, Debug)]
pub struct Element {
    table: Arc<GeneratorTable>,
    terms: BTreeMap<Monomial, u32>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for Element {}

impl Element {
    pub fn zero(table: &Arc<GeneratorTable>) -> Self {
        Element {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(table: &Arc<GeneratorTable>) -> Self {
        Self::constant(table, 1)
    }

    pub fn constant(table: &Arc<GeneratorTable>, c: i64) -> Self {
        Self::from_monomial(table, c, Monomial::one())
    }

    pub fn generator(table: &Arc<GeneratorTable>, idx: usize) -> Self {
        Self::from_monomial(table, 1, Monomial::generator(table, idx))
    }

    /// The generator with the given name; panics if absent.
    pub fn named(table: &Arc<GeneratorTable>, name: &str) -> Self {
        let idx = table
            .index_of(name)
            .unwrap_or_else(|| panic!("no generator named {name}"));
        Self::generator(table, idx)
    }

    pub fn from_monomial(table: &Arc<GeneratorTable>, c: i64, m: Monomial) -> Self {
        let mut e = Self::zero(table);
        let c = table.field().reduce(c);
        e.add_term(m, c);
        e
    }

    pub fn from_terms(
        table: &Arc<GeneratorTable>,
        terms: impl IntoIterator<Item = (Monomial, u32)>,
    ) -> Self {
        let mut e = Self::zero(table);
        for (m, c) in terms {
            e.add_term(m, c % table.field().p());
        }
        e
    }

    #[inline]
    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    #[inline]
    pub fn field(&self) -> &FieldConfig {
        self.table.field()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: u32) {
        if c == 0 {
            return;
        }
        let f = *self.table.field();
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_table(&self, other: &Element) -> Result<()> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.check_table(other)?;
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in small.terms() {
            big.add_term(m.clone(), c);
        }
        Ok(big)
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.checked_add(&other.neg_ref())
    }

    pub fn add_assign_ref(&mut self, other: &Element) {
        assert!(same_table(&self.table, &other.table), "generator tables differ");
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Element, c: u32) {
        assert!(same_table(&self.table, &other.table), "generator tables differ");
        let f = *self.field();
        let c = c % f.p();
        if c == 0 {
            return;
        }
        for (m, d) in other.terms() {
            self.add_term(m.clone(), f.mul(c, d));
        }
    }

    pub fn scale(&self, c: u32) -> Element {
        let f = *self.field();
        let c = c % f.p();
        if c == 0 {
            return Element::zero(&self.table);
        }
        Element {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, &d)| (m.clone(), f.mul(c, d))).collect(),
        }
    }

    fn neg_ref(&self) -> Element {
        self.scale(self.field().p() - 1)
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        self.check_table(other)?;
        Ok(self.mul_filtered(other, |_| true))
    }

    /// Product keeping only monomials accepted by `keep`.
    ///
    /// When `keep` describes a set closed under taking factors (e.g. "the
    /// exponent of `g` is at most `r`"), filtering partial products computes
    /// the filtered part of a longer product exactly.
    pub fn mul_filtered(&self, other: &Element, keep: impl Fn(&Monomial) -> bool) -> Element {
        assert!(same_table(&self.table, &other.table), "generator tables differ");
        let f = *self.field();
        let mut out = Element::zero(&self.table);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if let Some((neg, m)) = a.mul(b) {
                    if !keep(&m) {
                        continue;
                    }
                    let c = f.mul(ca, cb);
                    out.add_term(m, if neg { f.neg(c) } else { c });
                }
            }
        }
        out
    }

    /// True when every term has even degree, so all terms commute.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| !m.is_odd_degree())
    }

    /// The `p`-th power. On even elements this is the Frobenius: monomials
    /// with an odd factor vanish and exponents scale by `p`.
    pub fn frobenius(&self) -> Element {
        let p = self.field().p();
        if !self.is_even() {
            return self.pow(p as u64);
        }
        Element {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.odd_mask() == 0)
                .map(|(m, &c)| (m.scale_even(p), c))
                .collect(),
        }
    }

    pub fn frobenius_iter(&self, times: u32) -> Element {
        let mut out = self.clone();
        for _ in 0..times {
            out = out.frobenius();
        }
        out
    }

    pub fn pow(&self, e: u64) -> Element {
        self.pow_filtered(e, |_| true)
    }

    /// `self^e`, pruning partial products with `keep` (see [`mul_filtered`]).
    ///
    /// [`mul_filtered`]: Element::mul_filtered
    pub fn pow_filtered(&self, mut e: u64, keep: impl Fn(&Monomial) -> bool + Copy) -> Element {
        let mut acc = Element::one(&self.table);
        if e == 0 {
            return acc;
        }
        let p = self.field().p() as u64;
        if self.is_even() {
            // base-p digits: u^e = prod_d (u^{p^d})^{e_d}
            let mut base = self.clone();
            loop {
                let digit = e % p;
                for _ in 0..digit {
                    acc = acc.mul_filtered(&base, keep);
                }
                e /= p;
                if e == 0 {
                    break;
                }
                base = base.frobenius();
                base.terms.retain(|m, _| keep(m));
            }
            acc
        } else {
            let mut base = self.clone();
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mul_filtered(&base, keep);
                }
                e >>= 1;
                if e > 0 {
                    base = base.mul_filtered(&base, keep);
                }
            }
            acc
        }
    }

    /// Degree of a nonzero homogeneous element; `None` for zero or mixed
    /// degrees.
    pub fn degree(&self) -> Option<u64> {
        let mut it = self.terms.keys().map(|m| m.degree(&self.table));
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// The homogeneous components, keyed by degree.
    pub fn graded_parts(&self) -> BTreeMap<u64, Element> {
        let mut out: BTreeMap<u64, Element> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.degree(&self.table))
                .or_insert_with(|| Element::zero(&self.table))
                .add_term(m.clone(), c);
        }
        out
    }

    /// Applies the algebra homomorphism into `target` determined by the
    /// generator images `image(g)`.
    pub fn map_hom(
        &self,
        target: &Arc<GeneratorTable>,
        image: impl Fn(usize) -> Element,
    ) -> Element {
        self.map_hom_filtered(target, image, |_| true)
    }

    pub fn map_hom_filtered(
        &self,
        target: &Arc<GeneratorTable>,
        image: impl Fn(usize) -> Element,
        keep: impl Fn(&Monomial) -> bool + Copy,
    ) -> Element {
        let mut out = Element::zero(target);
        for (m, c) in self.terms() {
            let mut acc = Element::constant(target, c as i64);
            for i in m.odd_indices() {
                acc = acc.mul_filtered(&image(i), keep);
                if acc.is_zero() {
                    break;
                }
            }
            for &(i, e) in m.even_part() {
                if acc.is_zero() {
                    break;
                }
                let img = image(i as usize).pow_filtered(e as u64, keep);
                acc = acc.mul_filtered(&img, keep);
            }
            out.add_scaled(&acc, 1);
        }
        out
    }

    /// Applies the ring endomorphism sending each listed generator to its
    /// image and fixing all others.
    pub fn substitute(&self, images: &[(usize, Element)]) -> Result<Element> {
        let mut table_images: Vec<Option<&Element>> = vec![None; self.table.len()];
        for (g, img) in images {
            self.table.check_index(*g)?;
            img.check_table(self)?;
            let gen = self.table.generator(*g);
            if !img.is_zero() {
                match img.degree() {
                    Some(d) if d == gen.degree => {}
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "image of {} is not homogeneous of degree {}",
                            gen.name, gen.degree
                        )))
                    }
                }
            }
            debug_assert!(img.is_zero() || (gen.parity == Parity::Odd) == (gen.degree % 2 == 1));
            table_images[*g] = Some(img);
        }
        Ok(self.map_hom(&self.table, |g| match table_images[g] {
            Some(img) => img.clone(),
            None => Element::generator(&self.table, g),
        }))
    }

    /// Re-expresses the element over `target`, sending generator `i` to
    /// generator `map[i]` (degrees and parities must agree).
    pub fn embed(&self, target: &Arc<GeneratorTable>, map: &[usize]) -> Result<Element> {
        if map.len() != self.table.len() {
            return Err(Error::Dimension(format!(
                "embedding map has {} entries for {} generators",
                map.len(),
                self.table.len()
            )));
        }
        for (i, &j) in map.iter().enumerate() {
            target.check_index(j)?;
            let (a, b) = (self.table.generator(i), target.generator(j));
            if a.degree != b.degree || a.parity != b.parity {
                return Err(Error::InvalidInput(format!(
                    "cannot embed {} as {}",
                    a.name, b.name
                )));
            }
        }
        let f = *self.field();
        let mut out = Element::zero(target);
        for (m, c) in self.terms() {
            let (neg, m2) = m.relabel(map);
            out.add_term(m2, if neg { f.neg(c) } else { c });
        }
        Ok(out)
    }

    /// Moves the element to `target` along a partial generator map. Every
    /// generator that occurs must be mapped, to one of equal degree and
    /// parity.
    pub fn transport(&self, target: &Arc<GeneratorTable>, map: &[Option<usize>]) -> Result<Element> {
        let f = *self.field();
        let mut full = vec![usize::MAX; self.table.len()];
        for (i, slot) in map.iter().enumerate().take(self.table.len()) {
            if let Some(j) = *slot {
                target.check_index(j)?;
                let (a, b) = (self.table.generator(i), target.generator(j));
                if a.degree != b.degree || a.parity != b.parity {
                    return Err(Error::InvalidInput(format!(
                        "cannot send {} to {}",
                        a.name, b.name
                    )));
                }
                full[i] = j;
            }
        }
        let mut out = Element::zero(target);
        for (m, c) in self.terms() {
            let support = m.support();
            if (0..self.table.len()).any(|i| support >> i & 1 == 1 && full[i] == usize::MAX) {
                return Err(Error::InvalidInput(
                    "element uses a generator with no image".into(),
                ));
            }
            let (neg, m2) = m.relabel(&full);
            out.add_term(m2, if neg { f.neg(c) } else { c });
        }
        Ok(out)
    }

    /// Coefficient extraction for the tensor decomposition along the
    /// generators in `subset` (a bit mask).
    ///
    /// Each term is rewritten as `± rest * pattern_part` by moving the
    /// subset factors to the right; terms whose subset part equals `pattern`
    /// contribute `± rest`.
    pub fn coefficient_of(&self, pattern: &Monomial, subset: u64) -> Result<Element> {
        if pattern.support() & !subset != 0 {
            return Err(Error::InvalidInput(
                "pattern uses generators outside the designated subset".into(),
            ));
        }
        let f = *self.field();
        let mut out = Element::zero(&self.table);
        for (m, c) in self.terms() {
            let (neg, inside, outside) = m.split_right(subset);
            if &inside == pattern {
                out.add_term(outside, if neg { f.neg(c) } else { c });
            }
        }
        Ok(out)
    }

    /// Like [`coefficient_of`](Element::coefficient_of) with the pattern
    /// given as a word of generator indices, which must already be in
    /// canonical order.
    pub fn coefficient_of_word(&self, word: &[usize], subset: u64) -> Result<Element> {
        for w in word.windows(2) {
            let (a, b) = (w[0], w[1]);
            if self.table.is_odd(a) && self.table.is_odd(b) && a >= b {
                return Err(Error::InvalidInput(
                    "pattern word is not in canonical order".into(),
                ));
            }
        }
        let pattern = match super::monomial::normalize_word(&self.table, word)? {
            Some((_, m)) => m,
            None => {
                return Err(Error::InvalidInput(
                    "pattern word repeats an odd generator".into(),
                ))
            }
        };
        self.coefficient_of(&pattern, subset)
    }

    /// Terms in display order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, u32)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|a, b| a.0.display_cmp(b.0, &self.table));
        v
    }

    /// Canonical text: `c*g1^e1*g2*...` terms joined by ` + `.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                let body = m.render(&self.table);
                match (c, m.is_one()) {
                    (_, true) => c.to_string(),
                    (1, false) => body,
                    _ => format!("{c}*{body}"),
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn parse(table: &Arc<GeneratorTable>, text: &str) -> Result<Element> {
        super::parse::parse_element(table, text)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("generator tables differ")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs).expect("generator tables differ")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs).expect("generator tables differ")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(p: u32, n: usize) -> Arc<GeneratorTable> {
        GeneratorTable::cohomology(FieldConfig::new(p).unwrap(), n).unwrap()
    }

    fn el(t: &Arc<GeneratorTable>, s: &str) -> Element {
        Element::parse(t, s).unwrap()
    }

    #[test]
    fn additive_cancellation() {
        let t = h(3, 2);
        let a = el(&t, "y1 + y2");
        let b = el(&t, "2*y2");
        assert_eq!(&a + &b, el(&t, "y1"));
        assert_eq!(&a + &Element::zero(&t), a);
    }

    #[test]
    fn coefficient_reduction() {
        let t3 = h(3, 1);
        let t5 = h(5, 1);
        assert_eq!(el(&t5, "2*y1") + el(&t5, "2*y1"), el(&t5, "4*y1"));
        assert_eq!(el(&t3, "2*y1") + el(&t3, "2*y1"), el(&t3, "y1"));
    }

    #[test]
    fn sign_rule() {
        let t = h(3, 2);
        let x1 = el(&t, "x1");
        let x2 = el(&t, "x2");
        assert_eq!((&x1 * &x2).render(), "x1*x2");
        assert_eq!((&x2 * &x1).render(), "2*x1*x2");
        assert_eq!(el(&t, "y1") * el(&t, "y1^2"), el(&t, "y1^3"));
    }

    #[test]
    fn odd_degree_elements_square_to_zero() {
        // the cross terms x1y2*(-x2y1) and (-x2y1)*x1y2 cancel by the sign rule
        let t = h(5, 2);
        let u = el(&t, "x1*y2 - x2*y1");
        assert!((&u * &u).is_zero());
        let v = el(&t, "x1*y2 + x2");
        assert_eq!(&u * &v, -(&v * &u));
    }

    #[test]
    fn frobenius_matches_power() {
        let t = h(3, 2);
        let u = el(&t, "y1*y2^2 + 2*y1^3 + x1*x2*y1");
        assert_eq!(u.frobenius(), u.pow(3));
        assert_eq!(u.pow(7), u.pow(3) * u.pow(3) * u.clone());
    }

    #[test]
    fn table_mismatch_is_error() {
        let a = Element::one(&h(3, 1));
        let b = Element::one(&h(3, 2));
        assert_eq!(a.checked_add(&b), Err(Error::TableMismatch));
        assert_eq!(a.checked_mul(&b), Err(Error::TableMismatch));
    }

    #[test]
    fn substitute_relabels() {
        let t = h(3, 2);
        let u = el(&t, "y1");
        let img = el(&t, "y1 + y2");
        assert_eq!(u.substitute(&[(2, img.clone())]).unwrap(), img);
        assert_eq!(u.substitute(&[]).unwrap(), u);
    }

    #[test]
    fn substitute_rejects_wrong_degree() {
        let t = h(3, 2);
        let u = el(&t, "y1");
        assert!(u.substitute(&[(2, el(&t, "x1"))]).is_err());
        assert!(u.substitute(&[(0, el(&t, "y2"))]).is_err());
    }

    #[test]
    fn coefficient_patterns() {
        let f = FieldConfig::new(3).unwrap();
        let gens = vec![
            super::super::table::Generator::odd("x1", 1),
            super::super::table::Generator::even("y1", 2),
            super::super::table::Generator::odd("t0", 1),
            super::super::table::Generator::odd("t1", 5),
            super::super::table::Generator::even("xi1", 4),
        ];
        let t = GeneratorTable::new(f, gens).unwrap();
        let milnor = 0b11100;
        let u = el(&t, "y1*xi1 + y1^3*xi1^3");
        let xi1 = Monomial::generator(&t, 4);
        assert_eq!(u.coefficient_of(&xi1, milnor).unwrap(), el(&t, "y1"));
        let tau0 = Monomial::generator(&t, 2);
        assert!(el(&t, "x1").coefficient_of(&tau0, milnor).unwrap().is_zero());
        let v = el(&t, "y1*t0*t1");
        assert_eq!(v.coefficient_of_word(&[2, 3], milnor).unwrap(), el(&t, "y1"));
        assert!(v.coefficient_of_word(&[3, 2], milnor).is_err());
        // pattern outside the subset
        assert!(v.coefficient_of(&Monomial::generator(&t, 1), milnor).is_err());
        // canonical order already has the Milnor factor on the right
        assert_eq!(el(&t, "x1*t0").coefficient_of(&tau0, milnor).unwrap(), el(&t, "x1"));
    }

    #[test]
    fn render_order_and_roundtrip() {
        let t = h(3, 2);
        let u = el(&t, "y2^9 + 2*x1*x2*y1^3");
        assert_eq!(u.render(), "2*x1*x2*y1^3 + y2^9");
        assert_eq!(Element::parse(&t, &u.render()).unwrap(), u);
        assert_eq!(Element::zero(&t).render(), "0");
        assert_eq!(Element::constant(&t, 2).render(), "2");
    }
}
