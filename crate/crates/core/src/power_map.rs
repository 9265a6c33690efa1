//! The power map `d_m^* P_m : H*(X) → H*(B(Z/p)^m) ⊗ H*(X)` for
//! `X = B(Z/p)^n`, built from its values on generators and its signed
//! multiplicativity, and the extraction of `St^{S,R}` from its expansion in
//! the Dickson/Mùi coefficients.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::algebra::{solve_many, Element, GeneratorTable, Monomial, Solution};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::invariants::{BracketSpec, Invariants};
use crate::milnor::{enumerate_indices, MilnorIndex};
use crate::steenrod::cohomology_rank;
use crate::verdict::Verdict;

/// `μ(q) = (-1)^{hq(q-1)/2} (h!)^q`.
pub fn mu(field: &FieldConfig, q: u64) -> u32 {
    let h = field.h() as u64;
    let sign = field.sign(h * (q * q.saturating_sub(1) / 2));
    field.mul(sign, field.pow(field.h_factorial(), q))
}

/// `d_m^* P_m` for a fixed target rank `n` and coefficient rank `m`.
///
/// Elements of the image live over a merged table: the coefficient
/// generators `x'_1..x'_m, y'_1..y'_m` first, then `x_1..x_n, y_1..y_n`.
#[derive(Clone, Debug)]
pub struct PowerMap {
    field: FieldConfig,
    n: usize,
    m: usize,
    target: Arc<GeneratorTable>,
    primed: Option<Invariants>,
    table: Arc<GeneratorTable>,
    x_images: Vec<Element>,
    y_images: Vec<Element>,
}

impl PowerMap {
    pub fn new(field: FieldConfig, n: usize, m: usize) -> Result<Self> {
        let target = GeneratorTable::cohomology(field, n)?;
        Self::over(&target, m)
    }

    /// The power map on the cohomology whose table is `target`.
    pub fn over(target: &Arc<GeneratorTable>, m: usize) -> Result<Self> {
        let n = cohomology_rank(target)?;
        let field = *target.field();
        let primed = if m > 0 {
            Some(Invariants::with_names(field, m, "x'", "y'")?)
        } else {
            None
        };
        let table = match &primed {
            Some(inv) => inv.table().concat(target)?,
            None => target.clone(),
        };
        let mut pm = PowerMap {
            field,
            n,
            m,
            target: target.clone(),
            primed,
            table,
            x_images: Vec::new(),
            y_images: Vec::new(),
        };
        pm.x_images = (1..=n).map(|i| pm.build_dp_x(i)).collect::<Result<_>>()?;
        pm.y_images = (1..=n).map(|i| pm.build_dp_y(i)).collect::<Result<_>>()?;
        Ok(pm)
    }

    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn target(&self) -> &Arc<GeneratorTable> {
        &self.target
    }

    /// The coefficient-side invariants (rank `m`), absent when `m = 0`.
    pub fn coefficients(&self) -> Option<&Invariants> {
        self.primed.as_ref()
    }

    fn offset(&self) -> usize {
        2 * self.m
    }

    fn target_mask(&self) -> u64 {
        (self.offset()..self.table.len()).fold(0, |a, i| a | 1 << i)
    }

    /// A coefficient-side element moved into the merged table.
    pub fn lift_coefficient(&self, c: &Element) -> Result<Element> {
        let map: Vec<usize> = (0..2 * self.m).collect();
        c.embed(&self.table, &map)
    }

    /// A target-side element moved into the merged table.
    pub fn lift_target(&self, u: &Element) -> Result<Element> {
        if **u.table() != *self.target {
            return Err(Error::TableMismatch);
        }
        let map: Vec<usize> = (0..2 * self.n).map(|g| g + self.offset()).collect();
        u.embed(&self.table, &map)
    }

    fn target_y_pow(&self, i: usize, s: u32) -> Element {
        let e = self.field.p_pow(s) as u32;
        let (_, mono) = Monomial::from_parts(&self.table, &[], &[(self.offset() + self.n + i - 1, e)])
            .expect("even generator");
        Element::from_monomial(&self.table, 1, mono)
    }

    fn target_x(&self, i: usize) -> Element {
        Element::generator(&self.table, self.offset() + i - 1)
    }

    fn build_dp_y(&self, i: usize) -> Result<Element> {
        let Some(inv) = &self.primed else {
            return Ok(self.target_y_pow(i, 0));
        };
        let f = self.field;
        let mut out = Element::zero(&self.table);
        for s in 0..=self.m {
            let q = self.lift_coefficient(&inv.q(self.m, s)?)?;
            let term = &q * &self.target_y_pow(i, s as u32);
            out.add_scaled(&term, f.sign((self.m + s) as u64));
        }
        Ok(out)
    }

    fn build_dp_x(&self, i: usize) -> Result<Element> {
        let Some(inv) = &self.primed else {
            return Ok(self.target_x(i));
        };
        let f = self.field;
        let mut out = &self.lift_coefficient(&inv.tilde_l())? * &self.target_x(i);
        for s in 0..self.m {
            let mt = self.lift_coefficient(&inv.tilde_m(s as u32)?)?;
            let term = &mt * &self.target_y_pow(i, s as u32);
            out.add_scaled(&term, f.sign(1 + s as u64));
        }
        Ok(out.scale(f.pow(mu(&f, 1), self.m as u64)))
    }

    /// `d_m^* P_m y_i`, `1 ≤ i ≤ n`.
    pub fn dp_y(&self, i: usize) -> Result<&Element> {
        self.check_generator(i)?;
        Ok(&self.y_images[i - 1])
    }

    /// `d_m^* P_m x_i`, `1 ≤ i ≤ n`.
    pub fn dp_x(&self, i: usize) -> Result<&Element> {
        self.check_generator(i)?;
        Ok(&self.x_images[i - 1])
    }

    fn check_generator(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::InvalidInput(format!(
                "generator index {i} outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    /// `d_m^* P_m u`, evaluated monomial by monomial as the signed product
    /// of generator images.
    pub fn dp(&self, u: &Element) -> Result<Element> {
        if **u.table() != *self.target {
            return Err(Error::TableMismatch);
        }
        let f = self.field;
        let mh = (self.m as u64) * f.h() as u64;
        let mut powers: HashMap<(u16, u32), Element> = HashMap::new();
        let mut out = Element::zero(&self.table);
        for (mono, c) in u.terms() {
            // Each product step with partial degree q and next factor degree r
            // contributes (-1)^{mhqr}; only odd-by-odd steps can be odd, and
            // the l-th odd factor meets a partial product of parity l.
            let j = mono.odd_count() as u64;
            let sign = f.sign(mh * (j * j.saturating_sub(1) / 2));
            let mut acc = Element::constant(&self.table, f.mul(sign, c) as i64);
            for a in mono.odd_indices() {
                acc = &acc * &self.x_images[a];
            }
            for &(b, e) in mono.even_part() {
                let img = powers
                    .entry((b, e))
                    .or_insert_with(|| self.y_images[b as usize - self.n].pow(e as u64));
                acc = &acc * &*img;
            }
            out.add_assign_ref(&acc);
        }
        Ok(out)
    }

    /// The coefficient of `St^{S,R} u` in the expansion of `d_m^* P_m u` for
    /// `u` of degree `q`, over the coefficient table.
    pub fn coefficient_poly(&self, idx: &MilnorIndex, q: u64) -> Result<Element> {
        self.check_index(idx)?;
        let f = self.field;
        let r0 = idx.r0(q).ok_or_else(|| {
            Error::Precondition(format!("{idx} has r_0 < 0 in degree {q}"))
        })?;
        let scalar = f.mul(f.pow(mu(&f, q), self.m as u64), f.sign(idx.sign_exponent()));
        let Some(inv) = &self.primed else {
            return Ok(Element::constant(&self.target, scalar as i64));
        };
        let mut c = Element::constant(inv.table(), scalar as i64);
        for &s in idx.s() {
            c = &c * &inv.tilde_m(s)?;
        }
        c = &c * &inv.tilde_l().pow(r0);
        for (i, &r) in idx.r().iter().enumerate() {
            let i = i + 1;
            if r > 0 && i < self.m {
                c = &c * &inv.q(self.m, i)?.pow(r as u64);
            }
        }
        Ok(c)
    }

    fn check_index(&self, idx: &MilnorIndex) -> Result<()> {
        if idx.minimal_m() > self.m {
            return Err(Error::Precondition(format!(
                "{idx} needs m ≥ {}, have m = {}",
                idx.minimal_m(),
                self.m
            )));
        }
        Ok(())
    }

    /// Every `St^{S,R} u` with `max S < m`, `len R ≤ m`, `r_0 ≥ 0`, solved
    /// from the expansion of `d_m^* P_m u`. Zero values are included.
    pub fn extract_all(&self, u: &Element) -> Result<BTreeMap<MilnorIndex, Element>> {
        let mut total: BTreeMap<MilnorIndex, Element> = BTreeMap::new();
        for (q, part) in u.graded_parts() {
            for (idx, v) in self.extract_homogeneous(&part, q)? {
                match total.get_mut(&idx) {
                    Some(acc) => acc.add_assign_ref(&v),
                    None => {
                        total.insert(idx, v);
                    }
                }
            }
        }
        Ok(total)
    }

    fn extract_homogeneous(&self, u: &Element, q: u64) -> Result<BTreeMap<MilnorIndex, Element>> {
        let f = self.field;
        let d = self.dp(u)?;
        let mask = self.target_mask();
        // D = Σ_w P_w ⊗ w, grouped by the degree of the target monomial w.
        let mut by_target: BTreeMap<Monomial, BTreeMap<Monomial, u32>> = BTreeMap::new();
        for (mono, c) in d.terms() {
            let (neg, w, coeff) = mono.split_right(mask);
            let c = if neg { f.neg(c) } else { c };
            let slot = by_target.entry(w).or_default().entry(coeff).or_insert(0);
            *slot = f.add(*slot, c);
        }
        let mut buckets: BTreeMap<u64, Vec<(Monomial, BTreeMap<Monomial, u32>)>> = BTreeMap::new();
        for (w, poly) in by_target {
            let dw = w.degree(&self.table);
            buckets.entry(dw).or_default().push((w, poly));
        }

        let indices = enumerate_indices(&f, Some(q), None, Some(self.m))?;
        let mut by_degree: BTreeMap<u64, Vec<MilnorIndex>> = BTreeMap::new();
        for idx in indices {
            by_degree.entry(q + idx.degree(&f)).or_default().push(idx);
        }

        let mut out: BTreeMap<MilnorIndex, Element> = BTreeMap::new();
        for (deg, idxs) in &by_degree {
            let columns: Vec<Element> = idxs
                .iter()
                .map(|idx| self.coefficient_poly(idx, q))
                .collect::<Result<_>>()?;
            let targets = buckets.remove(deg).unwrap_or_default();
            let mut rows: BTreeSet<Monomial> = BTreeSet::new();
            for col in &columns {
                rows.extend(col.terms().map(|(m, _)| m.clone()));
            }
            for (_, poly) in &targets {
                rows.extend(poly.iter().filter(|(_, &c)| c != 0).map(|(m, _)| m.clone()));
            }
            let rows: Vec<Monomial> = rows.into_iter().collect();
            let row_of: HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut matrix = vec![vec![0u32; columns.len()]; rows.len()];
            for (j, col) in columns.iter().enumerate() {
                for (m, c) in col.terms() {
                    matrix[row_of[m]][j] = c;
                }
            }
            let rhs: Vec<Vec<u32>> = targets
                .iter()
                .map(|(_, poly)| {
                    let mut v = vec![0u32; rows.len()];
                    for (m, &c) in poly {
                        v[row_of[m]] = f.add(v[row_of[m]], c);
                    }
                    v
                })
                .collect();
            let (rank, sols) = solve_many(&f, &matrix, columns.len(), &rhs)?;
            if rank < columns.len() {
                return Err(Error::InternalConsistency(format!(
                    "expansion coefficients in degree {deg} have rank {rank} < {}",
                    columns.len()
                )));
            }
            let mut values: Vec<Element> = idxs.iter().map(|_| Element::zero(&self.target)).collect();
            for ((w, _), sol) in targets.iter().zip(sols) {
                let x = match sol {
                    Solution::Unique(x) => x,
                    Solution::Inconsistent { .. } => {
                        return Err(Error::InternalConsistency(format!(
                            "power map expansion is inconsistent in degree {deg}"
                        )))
                    }
                    Solution::NonUnique { .. } => {
                        return Err(Error::InternalConsistency(format!(
                            "power map expansion is not unique in degree {deg}"
                        )))
                    }
                };
                let w_target = self.drop_to_target(w)?;
                for (j, &c) in x.iter().enumerate() {
                    if c != 0 {
                        values[j].add_scaled(&w_target, c);
                    }
                }
            }
            for (idx, v) in idxs.iter().zip(values) {
                out.insert(idx.clone(), v);
            }
        }
        if let Some((deg, _)) = buckets.into_iter().next() {
            return Err(Error::InternalConsistency(format!(
                "power map image has target degree {deg} with no matching operation"
            )));
        }
        Ok(out)
    }

    fn drop_to_target(&self, w: &Monomial) -> Result<Element> {
        let map: Vec<Option<usize>> = (0..self.table.len())
            .map(|i| i.checked_sub(self.offset()))
            .collect();
        Element::from_monomial(&self.table, 1, w.clone()).transport(&self.target, &map)
    }

    /// `Σ c_{S,R} ⊗ St^{S,R} u` from the given operation values.
    pub fn reassemble(&self, u: &Element, values: &BTreeMap<MilnorIndex, Element>) -> Result<Element> {
        let mut out = Element::zero(&self.table);
        for q in u.graded_parts().into_keys() {
            for idx in enumerate_indices(&self.field, Some(q), None, Some(self.m))? {
                let Some(val) = values.get(&idx) else { continue };
                let shift = q + idx.degree(&self.field);
                let piece = val.graded_parts().remove(&shift);
                let Some(piece) = piece else { continue };
                let c = match &self.primed {
                    Some(_) => self.lift_coefficient(&self.coefficient_poly(&idx, q)?)?,
                    None => self.coefficient_poly(&idx, q)?,
                };
                out.add_assign_ref(&(&c * &self.lift_target(&piece)?));
            }
        }
        Ok(out)
    }

    /// `d_m^* P_m u - Σ c_{S,R} ⊗ St^{S,R} u` with the extracted values;
    /// zero exactly when the expansion is complete.
    pub fn completeness_residual(&self, u: &Element) -> Result<Element> {
        let values = self.extract_all(u)?;
        Ok(&self.dp(u)? - &self.reassemble(u, &values)?)
    }

    /// The expansion of `d_m^* P_m [e_1..e_n]` (`n` = target rank) over
    /// `(m+1)^n` column assignments, compared with the direct evaluation.
    pub fn verify_lemma23(&self, e: &[u32]) -> Result<Verdict> {
        if e.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "exponent list of length {} for rank {}",
                e.len(),
                self.n
            )));
        }
        if crate::invariants::has_repeats(e) {
            return Err(Error::Precondition(format!("exponents {e:?} are not distinct")));
        }
        let f = self.field;
        let target_inv = Invariants::new(f, self.n)?;
        let lhs = self.dp(&target_inv.bracket0(e)?)?;
        let mut rhs = Element::zero(&self.table);
        let mut phi = vec![0usize; self.n];
        loop {
            // slot sums r_{J_s} = Σ_{Φ(j)=s} p^{e_j}
            let mut r = vec![0u64; self.m + 1];
            for (j, &s) in phi.iter().enumerate() {
                r[s] += f.p_pow(e[j]);
            }
            let sign_exp = (self.m * self.n) as u64
                + (1..=self.m).map(|s| s as u64 * r[s]).sum::<u64>();
            let coeff = match &self.primed {
                Some(inv) => {
                    let mut c = inv.tilde_l().pow(2 * r[0]);
                    for (s, &rs) in r.iter().enumerate().take(self.m).skip(1) {
                        c = &c * &inv.q(self.m, s)?.pow(rs);
                    }
                    self.lift_coefficient(&c)?
                }
                None => Element::one(&self.table),
            };
            let shifted: Vec<u32> = e.iter().zip(&phi).map(|(&a, &s)| a + s as u32).collect();
            let b = self.lift_target(&target_inv.bracket0(&shifted)?)?;
            rhs.add_scaled(&(&coeff * &b), f.sign(sign_exp));
            if !advance(&mut phi, self.m + 1) {
                break;
            }
        }
        Ok(Verdict::compare(&lhs, &rhs))
    }

    /// The closed form of `d_m^* P_m (x_1 ... x_n)` summed over
    /// `S ⊂ {0..m-1}`, compared with the value built by multiplicativity.
    pub fn verify_product_of_x(&self) -> Result<Verdict> {
        let f = self.field;
        let n = self.n;
        let target_inv = Invariants::new(f, n)?;
        let mut prod = Element::one(&self.target);
        for i in 1..=n {
            prod = &prod * &target_inv.x(i);
        }
        let lhs = self.dp(&prod)?;
        let mut rhs = Element::zero(&self.table);
        for mask in 0u32..(1 << self.m) {
            let s: Vec<u32> = (0..self.m as u32).filter(|b| mask >> b & 1 == 1).collect();
            let t = s.len();
            if t > n {
                continue;
            }
            let idx = MilnorIndex::new(s.clone(), Vec::new())?;
            let sign_exp = (t * (n - t)) as u64 + idx.sign_exponent();
            let coeff = match &self.primed {
                Some(inv) => {
                    let mut c = inv.tilde_l().pow((n - t) as u64);
                    for &v in &s {
                        c = &c * &inv.tilde_m(v)?;
                    }
                    self.lift_coefficient(&c)?
                }
                None => Element::one(&self.table),
            };
            let spec = BracketSpec::new(n, n - t, s)?;
            let b = self.lift_target(&target_inv.bracket(&spec)?)?;
            rhs.add_scaled(&(&coeff * &b), f.sign(sign_exp));
        }
        let rhs = rhs.scale(f.pow(mu(&f, n as u64), self.m as u64));
        Ok(Verdict::compare(&lhs, &rhs))
    }
}

/// Odometer over `{0..base-1}^len`; false once it wraps.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// `St^{S,R} u` from the power map with coefficient rank `m`.
pub fn st_from_power_map(idx: &MilnorIndex, u: &Element, m: usize) -> Result<Element> {
    let pm = PowerMap::over(u.table(), m)?;
    pm.check_index(idx)?;
    let mut out = Element::zero(u.table());
    for (q, part) in u.graded_parts() {
        if idx.r0(q).is_none() {
            return Err(Error::Precondition(format!(
                "{idx} has r_0 < 0 on the degree-{q} part"
            )));
        }
        let values = pm.extract_homogeneous(&part, q)?;
        if let Some(v) = values.get(idx) {
            out.add_assign_ref(v);
        }
    }
    Ok(out)
}

/// The smallest coefficient rank able to see `idx`.
pub fn minimal_m(idx: &MilnorIndex) -> usize {
    idx.minimal_m()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldConfig {
        FieldConfig::new(3).unwrap()
    }

    #[test]
    fn mu_values() {
        let f = f3();
        assert_eq!(mu(&f, 0), 1);
        assert_eq!(mu(&f, 1), 1);
        assert_eq!(mu(&f, 2), 2);
        let f5 = FieldConfig::new(5).unwrap();
        // h = 2, h! = 2: μ(1) = 2, μ(2) = (-1)^2 * 4 = 4
        assert_eq!(mu(&f5, 1), 2);
        assert_eq!(mu(&f5, 2), 4);
    }

    #[test]
    fn generator_images_m1() {
        let pm = PowerMap::new(f3(), 1, 1).unwrap();
        let t = pm.table().clone();
        assert_eq!(*pm.dp_y(1).unwrap(), Element::parse(&t, "-y'1^2*y1 + y1^3").unwrap());
        assert_eq!(*pm.dp_x(1).unwrap(), Element::parse(&t, "y'1*x1 - x'1*y1").unwrap());
        assert!(pm.dp_x(2).is_err());
    }

    #[test]
    fn m_zero_is_identity() {
        let pm = PowerMap::new(f3(), 2, 0).unwrap();
        let u = Element::parse(pm.target(), "x1*x2*y1 + y2^4").unwrap();
        assert_eq!(pm.dp(&u).unwrap(), u);
    }

    #[test]
    fn generator_images_are_homogeneous() {
        let f = f3();
        for m in 0..=2 {
            let pm = PowerMap::new(f, 2, m).unwrap();
            let pm_deg = f.p_pow(m as u32);
            assert_eq!(pm.dp_x(1).unwrap().degree(), Some(pm_deg));
            assert_eq!(pm.dp_y(2).unwrap().degree(), Some(2 * pm_deg));
        }
    }

    #[test]
    fn oracle_basic_values() {
        let inv = Invariants::new(f3(), 1).unwrap();
        let y = inv.y(1);
        let v = st_from_power_map(&MilnorIndex::p_power(1), &y, 1).unwrap();
        assert_eq!(v, y.pow(3));
        let v = st_from_power_map(&MilnorIndex::bockstein(), &inv.x(1), 1).unwrap();
        assert_eq!(v, y);
        let u = &inv.x(1) * &y;
        assert_eq!(st_from_power_map(&MilnorIndex::identity(), &u, 1).unwrap(), u);
        assert!(st_from_power_map(&MilnorIndex::p_power(1), &inv.x(1), 1).is_err());
        assert!(st_from_power_map(&MilnorIndex::delta(2), &y, 1).is_err());
    }

    #[test]
    fn lemma_examples() {
        let f = f3();
        assert!(PowerMap::new(f, 1, 1).unwrap().verify_lemma23(&[0]).unwrap().is_verified());
        assert!(PowerMap::new(f, 2, 1).unwrap().verify_lemma23(&[0, 1]).unwrap().is_verified());
        assert!(PowerMap::new(f, 2, 2).unwrap().verify_lemma23(&[0, 2]).unwrap().is_verified());
        assert!(PowerMap::new(f, 2, 1).unwrap().verify_lemma23(&[1, 1]).is_err());
    }

    #[test]
    fn product_of_x_closed_form() {
        let f = f3();
        for n in 1..=2 {
            let pm = PowerMap::new(f, n, 1).unwrap();
            assert!(pm.verify_product_of_x().unwrap().is_verified(), "n = {n}");
        }
    }

    #[test]
    fn completeness_on_small_inputs() {
        let pm = PowerMap::new(f3(), 2, 1).unwrap();
        let inv = Invariants::new(f3(), 2).unwrap();
        for u in [inv.x(1), inv.y(2), &inv.x(1) * &inv.x(2), inv.l_top(2)] {
            assert!(pm.completeness_residual(&u).unwrap().is_zero());
        }
    }
}
