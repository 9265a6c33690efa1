//! The Steenrod algebra acting on `H*(B(Z/p)^n)`.
//!
//! Two independent routes are provided: the Bockstein and `P^k` from their
//! closed forms on monomials, and the general `St^{S,R}` read off the Milnor
//! coaction
//!
//! ```text
//! λ(x_j) = x_j ⊗ 1 + Σ_s y_j^{p^s} ⊗ τ_s,    λ(y_j) = Σ_i y_j^{p^i} ⊗ ξ_i  (ξ_0 = 1)
//! ```
//!
//! extended multiplicatively, with the Milnor factors kept to the right.

use std::sync::Arc;

use crate::algebra::{binomial_mod_p, Element, Generator, GeneratorTable, Monomial};
use crate::calibration;
use crate::error::{Error, Result};
use crate::milnor::MilnorIndex;

/// The rank `n` of a table laid out as `x_1..x_n, y_1..y_n`.
pub fn cohomology_rank(table: &GeneratorTable) -> Result<usize> {
    let n = table.len() / 2;
    let ok = table.len() % 2 == 0
        && (0..n).all(|i| table.is_odd(i) && table.degree_of(i) == 1)
        && (n..2 * n).all(|i| !table.is_odd(i) && table.degree_of(i) == 2);
    if ok {
        Ok(n)
    } else {
        Err(Error::InvalidInput(format!(
            "{table} is not a cohomology table x_1..x_n, y_1..y_n"
        )))
    }
}

/// The Bockstein: the derivation with `β(x_i) = y_i`, `β(y_i) = 0`.
pub fn bockstein(u: &Element) -> Result<Element> {
    let table = u.table();
    let n = cohomology_rank(table)?;
    let f = *u.field();
    let mut out = Element::zero(table);
    for (m, c) in u.terms() {
        // β(g_1 ... g_k) = Σ_l (-1)^{deg(g_1...g_{l-1})} g_1 ... β(g_l) ... g_k;
        // only the odd factors (listed first) contribute.
        for (pos, a) in m.odd_indices().enumerate() {
            let (_, rest) = m.remove_odd(a).expect("present");
            let y = Monomial::generator(table, n + a);
            let (neg, term) = rest.mul(&y).expect("even factor");
            debug_assert!(!neg);
            let sign = f.sign(pos as u64);
            out.add_term(term, f.mul(sign, c));
        }
    }
    Ok(out)
}

/// `P^k` by its closed form on monomials:
/// `P^k(x_A Π y_i^{c_i}) = x_A Σ_{Σ j_i = k} Π C(c_i, j_i) y_i^{c_i + j_i (p-1)}`.
pub fn pk(k: u64, u: &Element) -> Result<Element> {
    let table = u.table();
    cohomology_rank(table)?;
    let f = *u.field();
    let p = f.p();
    let mut out = Element::zero(table);
    for (m, c) in u.terms() {
        let even: Vec<(usize, u32)> = m.even_part().iter().map(|&(i, e)| (i as usize, e)).collect();
        let cap: u64 = even.iter().map(|&(_, e)| e as u64).sum();
        if k > cap {
            continue;
        }
        let mut js = vec![0u64; even.len()];
        distribute(k, 0, &even, &mut js, &mut |js| {
            let mut coeff = c;
            let mut mono = m.clone();
            for (slot, &(i, e)) in even.iter().enumerate() {
                let j = js[slot];
                coeff = f.mul(coeff, binomial_mod_p(e as u64, j, p));
                if coeff == 0 {
                    return;
                }
                mono = mono.with_exponent(i, e + (j as u32) * (p - 1));
            }
            out.add_term(mono, coeff);
        });
    }
    Ok(out)
}

fn distribute(
    left: u64,
    pos: usize,
    caps: &[(usize, u32)],
    js: &mut Vec<u64>,
    emit: &mut impl FnMut(&[u64]),
) {
    if pos == caps.len() {
        if left == 0 {
            emit(js);
        }
        return;
    }
    let rest_cap: u64 = caps[pos + 1..].iter().map(|&(_, e)| e as u64).sum();
    let lo = left.saturating_sub(rest_cap);
    let hi = left.min(caps[pos].1 as u64);
    for j in lo..=hi {
        js[pos] = j;
        distribute(left - j, pos + 1, caps, js, emit);
    }
    js[pos] = 0;
}

/// The merged algebra `H*(B(Z/p)^n) ⊗ E(τ_0..τ_{mτ-1}) ⊗ P(ξ_1..ξ_{mξ})`.
#[derive(Clone, Debug)]
pub struct Coaction {
    n: usize,
    mtau: usize,
    mxi: usize,
    cohomology: Arc<GeneratorTable>,
    table: Arc<GeneratorTable>,
}

impl Coaction {
    pub fn new(cohomology: &Arc<GeneratorTable>, mtau: usize, mxi: usize) -> Result<Self> {
        let n = cohomology_rank(cohomology)?;
        let f = *cohomology.field();
        let mut gens = cohomology.generators().to_vec();
        for s in 0..mtau {
            gens.push(Generator::odd(format!("tau{s}"), 2 * f.p_pow(s as u32) - 1));
        }
        for i in 1..=mxi {
            gens.push(Generator::even(format!("xi{i}"), 2 * f.p_pow(i as u32) - 2));
        }
        let table = GeneratorTable::new(f, gens)?;
        Ok(Coaction {
            n,
            mtau,
            mxi,
            cohomology: cohomology.clone(),
            table,
        })
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    fn tau_index(&self, s: usize) -> usize {
        2 * self.n + s
    }

    fn xi_index(&self, i: usize) -> usize {
        2 * self.n + self.mtau + i - 1
    }

    /// Bit mask of the Milnor generators.
    pub fn milnor_mask(&self) -> u64 {
        let lo = 2 * self.n;
        let hi = lo + self.mtau + self.mxi;
        (lo..hi).fold(0, |m, i| m | 1 << i)
    }

    fn y_pow(&self, j: usize, e: u32) -> Monomial {
        let exp = self.table.field().p_pow(e) as u32;
        Monomial::from_parts(&self.table, &[], &[(self.n + j, exp)])
            .expect("even")
            .1
    }

    fn generator_image(&self, g: usize) -> Element {
        let t = &self.table;
        if g < self.n {
            let mut img = Element::generator(t, g);
            for s in 0..self.mtau {
                let term = Element::from_monomial(t, 1, self.y_pow(g, s as u32))
                    * Element::generator(t, self.tau_index(s));
                img.add_assign_ref(&term);
            }
            img
        } else {
            let j = g - self.n;
            let mut img = Element::generator(t, g);
            for i in 1..=self.mxi {
                let term = Element::from_monomial(t, 1, self.y_pow(j, i as u32))
                    * Element::generator(t, self.xi_index(i));
                img.add_assign_ref(&term);
            }
            img
        }
    }

    /// The Milnor monomial `τ_S ξ^R`, if it fits in the truncation.
    pub fn milnor_monomial(&self, idx: &MilnorIndex) -> Result<Monomial> {
        if idx.minimal_m() > 0 && (idx.s().last().is_some_and(|&s| s as usize >= self.mtau) || idx.r().len() > self.mxi) {
            return Err(Error::InvalidInput(format!(
                "{idx} exceeds the truncation (mτ = {}, mξ = {})",
                self.mtau, self.mxi
            )));
        }
        let odd: Vec<usize> = idx.s().iter().map(|&s| self.tau_index(s as usize)).collect();
        let even: Vec<(usize, u32)> = idx
            .r()
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0)
            .map(|(i, &r)| (self.xi_index(i + 1), r))
            .collect();
        Ok(Monomial::from_parts(&self.table, &odd, &even)?.1)
    }

    fn check_input(&self, u: &Element) -> Result<()> {
        if **u.table() != *self.cohomology {
            return Err(Error::TableMismatch);
        }
        Ok(())
    }

    /// The full truncated coaction image of `u`.
    pub fn apply(&self, u: &Element) -> Result<CoactionImage> {
        self.check_input(u)?;
        let element = u.map_hom(&self.table, |g| self.generator_image(g));
        Ok(CoactionImage {
            element,
            coaction: self.clone(),
        })
    }

    /// The part of the coaction image whose Milnor factor divides
    /// `τ_S ξ^R`; enough to read off `St^{S,R}`.
    fn apply_pruned(&self, u: &Element, idx: &MilnorIndex) -> Result<Element> {
        self.check_input(u)?;
        let allowed_tau: u64 = idx
            .s()
            .iter()
            .fold(0, |m, &s| m | 1 << self.tau_index(s as usize));
        let all_tau: u64 = (0..self.mtau).fold(0, |m, s| m | 1 << self.tau_index(s));
        let mut xi_cap = vec![u32::MAX; self.table.len()];
        for i in 1..=self.mxi {
            xi_cap[self.xi_index(i)] = idx.r().get(i - 1).copied().unwrap_or(0);
        }
        let keep = |m: &Monomial| {
            m.odd_mask() & all_tau & !allowed_tau == 0
                && m.even_part().iter().all(|&(i, e)| e <= xi_cap[i as usize])
        };
        Ok(u.map_hom_filtered(&self.table, |g| self.generator_image(g), keep))
    }
}

/// `λ(u)` in the merged algebra, with its truncation.
#[derive(Clone, Debug)]
pub struct CoactionImage {
    pub element: Element,
    coaction: Coaction,
}

impl CoactionImage {
    pub fn truncation(&self) -> (usize, usize) {
        (self.coaction.mtau, self.coaction.mxi)
    }

    /// The coefficient of `τ_S ξ^R` (Milnor factors moved right, then
    /// stripped), as an element of the cohomology.
    pub fn coefficient(&self, idx: &MilnorIndex) -> Result<Element> {
        let pattern = self.coaction.milnor_monomial(idx)?;
        let coeff = self
            .element
            .coefficient_of(&pattern, self.coaction.milnor_mask())?;
        back_to_cohomology(&self.coaction, &coeff)
    }

    /// The `(∅, 0)` coefficient, which equals the input.
    pub fn counit(&self) -> Result<Element> {
        self.coefficient(&MilnorIndex::identity())
    }

    /// Largest Milnor degree among the terms.
    pub fn milnor_degree_bound(&self) -> u64 {
        let mask = self.coaction.milnor_mask();
        self.element
            .terms()
            .map(|(m, _)| m.split_right(mask).1.degree(self.coaction.table()))
            .max()
            .unwrap_or(0)
    }
}

fn back_to_cohomology(c: &Coaction, e: &Element) -> Result<Element> {
    let map: Vec<Option<usize>> = (0..c.table.len())
        .map(|i| (i < 2 * c.n).then_some(i))
        .collect();
    e.transport(&c.cohomology, &map)
}

pub fn milnor_coaction(u: &Element, mtau: usize, mxi: usize) -> Result<CoactionImage> {
    Coaction::new(u.table(), mtau, mxi)?.apply(u)
}

/// The raw coaction coefficient of `τ_S ξ^R` in `λ(u)`, before the
/// calibration sign.
pub fn coaction_coefficient(idx: &MilnorIndex, u: &Element) -> Result<Element> {
    let c = Coaction::new(u.table(), idx.s().last().map_or(0, |&s| s as usize + 1), idx.r().len())?;
    let pruned = c.apply_pruned(u, idx)?;
    let coeff = pruned.coefficient_of(&c.milnor_monomial(idx)?, c.milnor_mask())?;
    back_to_cohomology(&c, &coeff)
}

/// `St^{S,R}(u)` via the coaction, with the truncation chosen explicitly.
pub fn st_with_bounds(idx: &MilnorIndex, u: &Element, mtau: usize, mxi: usize) -> Result<Element> {
    let image = milnor_coaction(u, mtau, mxi)?;
    let raw = image.coefficient(idx)?;
    apply_kappa(idx, &raw, u)
}

/// `St^{S,R}(u)`.
pub fn st(idx: &MilnorIndex, u: &Element) -> Result<Element> {
    let raw = coaction_coefficient(idx, u)?;
    apply_kappa(idx, &raw, u)
}

/// Multiplies each graded piece of `raw` by the calibrated sign for the
/// degree of the corresponding piece of the input.
fn apply_kappa(idx: &MilnorIndex, raw: &Element, u: &Element) -> Result<Element> {
    if raw.is_zero() {
        return Ok(raw.clone());
    }
    let f = *u.field();
    let shift = idx.degree(&f);
    let cal = calibration::for_field(f)?;
    let mut out = Element::zero(u.table());
    for (d, part) in raw.graded_parts() {
        let q = d.checked_sub(shift).ok_or_else(|| {
            Error::InternalConsistency(format!("{idx} lowered degree to {d}"))
        })?;
        out.add_scaled(&part, f.reduce(cal.kappa(idx, q)? as i64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use crate::invariants::Invariants;

    fn inv(p: u32, n: usize) -> Invariants {
        Invariants::new(FieldConfig::new(p).unwrap(), n).unwrap()
    }

    fn el(i: &Invariants, s: &str) -> Element {
        Element::parse(i.table(), s).unwrap()
    }

    #[test]
    fn bockstein_examples() {
        let i2 = inv(3, 2);
        assert_eq!(bockstein(&i2.x(1)).unwrap(), i2.y(1));
        assert_eq!(bockstein(&el(&i2, "x1*x2")).unwrap(), el(&i2, "y1*x2 - x1*y2"));
        assert!(bockstein(&el(&i2, "y1^5")).unwrap().is_zero());
    }

    #[test]
    fn pk_examples() {
        let i2 = inv(3, 2);
        assert_eq!(pk(1, &i2.y(1)).unwrap(), el(&i2, "y1^3"));
        assert!(pk(1, &i2.mui(&[0]).unwrap()).unwrap().is_zero());
        assert_eq!(pk(1, &i2.mui(&[1]).unwrap()).unwrap(), i2.mui(&[0]).unwrap());
        assert_eq!(pk(0, &i2.mui(&[1]).unwrap()).unwrap(), i2.mui(&[1]).unwrap());
        assert!(pk(2, &i2.y(1)).unwrap().is_zero());
    }

    #[test]
    fn coaction_generator_rules() {
        let i1 = inv(3, 1);
        let img = milnor_coaction(&i1.x(1), 1, 0).unwrap();
        let expect = Element::parse(img.element.table(), "x1 + y1*tau0").unwrap();
        assert_eq!(img.element, expect);
        let img = milnor_coaction(&i1.y(1), 0, 1).unwrap();
        let expect = Element::parse(img.element.table(), "y1 + y1^3*xi1").unwrap();
        assert_eq!(img.element, expect);
        let img = milnor_coaction(&el(&i1, "y1^2"), 0, 1).unwrap();
        let expect = Element::parse(img.element.table(), "y1^2 + 2*y1^4*xi1 + y1^6*xi1^2").unwrap();
        assert_eq!(img.element, expect);
    }

    #[test]
    fn counit_recovers_input() {
        let i2 = inv(3, 2);
        let u = &i2.l_top(2) + &i2.mui(&[1]).unwrap();
        let img = milnor_coaction(&u, 2, 2).unwrap();
        assert_eq!(img.counit().unwrap(), u);
    }

    #[test]
    fn pruned_matches_full_extraction() {
        let i2 = inv(3, 2);
        let u = i2.mui(&[1]).unwrap();
        let idx = MilnorIndex::new(vec![0], vec![1]).unwrap();
        let full = milnor_coaction(&u, 2, 2).unwrap().coefficient(&idx).unwrap();
        assert_eq!(coaction_coefficient(&idx, &u).unwrap(), full);
    }
}
