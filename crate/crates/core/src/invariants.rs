//! Determinantal invariants of `SL_n` in `H*(B(Z/p)^n) = E(x) ⊗ P(y)`.
//!
//! `[k; e_{k+1}, ..., e_n]` is computed by the subset expansion
//! `Σ_I sign(σ_I) x_I [e_{k+1}, ..., e_n]_{I'}`, so no division by `k!` is
//! ever needed. Dickson invariants come from the two-variable recursion and
//! are certified by multiplying back against `L_n`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{solve_mod_p, Element, GeneratorTable, Monomial, Solution};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::verdict::Verdict;

/// `[k; e_{k+1}, ..., e_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BracketSpec {
    pub n: usize,
    pub k: usize,
    pub exponents: Vec<u32>,
}

impl BracketSpec {
    pub fn new(n: usize, k: usize, exponents: Vec<u32>) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
        }
        if exponents.len() != n - k {
            return Err(Error::InvalidInput(format!(
                "[{k}; ...] in rank {n} needs {} exponents, got {}",
                n - k,
                exponents.len()
            )));
        }
        Ok(BracketSpec { n, k, exponents })
    }

    /// `k + 2 Σ p^{e_j}`.
    pub fn degree(&self, field: &FieldConfig) -> u64 {
        self.k as u64 + 2 * self.exponents.iter().map(|&e| field.p_pow(e)).sum::<u64>()
    }

    pub fn has_repeated_exponent(&self) -> bool {
        has_repeats(&self.exponents)
    }
}

pub(crate) fn has_repeats(v: &[u32]) -> bool {
    v.iter().enumerate().any(|(i, a)| v[..i].contains(a))
}

/// `{0, ..., top} \ skip`, in increasing order.
pub fn gap_sequence(top: u32, skip: &[u32]) -> Vec<u32> {
    (0..=top).filter(|e| !skip.contains(e)).collect()
}

fn check_mui_index(n: usize, s: &[u32]) -> Result<()> {
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!(
            "Mui index {s:?} is not strictly increasing"
        )));
    }
    if let Some(&last) = s.last() {
        if last as usize >= n {
            return Err(Error::InvalidInput(format!(
                "Mui index {s:?} must lie in 0..{}",
                n.saturating_sub(1)
            )));
        }
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], odd: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            out.push((prefix.clone(), odd));
            return;
        }
        for i in 0..n {
            if used[i] {
                continue;
            }
            // inversions contributed by placing i after the current prefix
            let inv = prefix.iter().filter(|&&j| j > i).count();
            used[i] = true;
            prefix.push(i);
            rec(prefix, used, odd ^ (inv % 2 == 1), out);
            prefix.pop();
            used[i] = false;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], false, &mut out);
    out
}

/// All `k`-element subsets of `0..n`, each increasing, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The invariants of rank `n`, over a table whose generators `0..n` are the
/// `x_i` and `n..2n` the `y_i`.
///
/// Dickson invariants `Q_{r,s}` for every `r ≤ n` are built once at
/// construction (in the first `r` variables) and certified.
#[derive(Clone, Debug)]
pub struct Invariants {
    field: FieldConfig,
    n: usize,
    table: Arc<GeneratorTable>,
    dickson: Vec<Vec<Element>>,
    v: Vec<Element>,
}

impl Invariants {
    pub fn new(field: FieldConfig, n: usize) -> Result<Self> {
        Self::with_names(field, n, "x", "y")
    }

    pub fn with_names(field: FieldConfig, n: usize, x_prefix: &str, y_prefix: &str) -> Result<Self> {
        let table = GeneratorTable::cohomology_named(field, n, x_prefix, y_prefix)?;
        let mut inv = Invariants {
            field,
            n,
            table,
            dickson: Vec::new(),
            v: Vec::new(),
        };
        inv.build_dickson()?;
        Ok(inv)
    }

    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    /// `x_i`, 1-based.
    pub fn x(&self, i: usize) -> Element {
        Element::generator(&self.table, i - 1)
    }

    /// `y_i`, 1-based.
    pub fn y(&self, i: usize) -> Element {
        Element::generator(&self.table, self.n + i - 1)
    }

    fn y_power(&self, var: usize, e: u32) -> Monomial {
        let exp = self.field.p_pow(e);
        assert!(exp <= u32::MAX as u64, "exponent p^{e} overflows");
        Monomial::from_parts(&self.table, &[], &[(self.n + var, exp as u32)])
            .expect("valid even generator")
            .1
    }

    /// `det(y_{vars[i]}^{p^{e_j}})` over the given 0-based variables.
    fn det_y(&self, vars: &[usize], e: &[u32]) -> Element {
        debug_assert_eq!(vars.len(), e.len());
        let mut out = Element::zero(&self.table);
        if has_repeats(e) {
            return out;
        }
        let f = self.field;
        for (perm, odd) in permutations(e.len()) {
            // Π_i y_{vars[i]}^{p^{e_{perm(i)}}}
            let mut m = Monomial::one();
            for (i, &j) in perm.iter().enumerate() {
                m = m.mul(&self.y_power(vars[i], e[j])).expect("even factors").1;
            }
            out.add_term(m, if odd { f.p() - 1 } else { 1 });
        }
        out
    }

    /// `[e_1, ..., e_r]` in the first `r = e.len()` variables.
    pub fn bracket0(&self, e: &[u32]) -> Result<Element> {
        if e.len() > self.n {
            return Err(Error::InvalidInput(format!(
                "{} exponents in rank {}",
                e.len(),
                self.n
            )));
        }
        let vars: Vec<usize> = (0..e.len()).collect();
        Ok(self.det_y(&vars, e))
    }

    /// `[k; e_{k+1}, ..., e_r]` in the first `r = spec.n` variables.
    pub fn bracket(&self, spec: &BracketSpec) -> Result<Element> {
        if spec.n > self.n {
            return Err(Error::InvalidInput(format!(
                "bracket of rank {} in rank {}",
                spec.n, self.n
            )));
        }
        BracketSpec::new(spec.n, spec.k, spec.exponents.clone())?;
        let r = spec.n;
        let f = self.field;
        let mut out = Element::zero(&self.table);
        if spec.has_repeated_exponent() {
            return Ok(out);
        }
        for subset in subsets(r, spec.k) {
            let rest: Vec<usize> = (0..r).filter(|i| !subset.contains(i)).collect();
            // sign of the shuffle (subset, rest) of (0..r)
            let shift: usize = subset.iter().enumerate().map(|(j, &i)| i - j).sum();
            let x_part = Element::from_monomial(
                &self.table,
                1,
                Monomial::from_parts(&self.table, &subset, &[]).expect("distinct odd").1,
            );
            let term = &x_part * &self.det_y(&rest, &spec.exponents);
            out.add_scaled(&term, f.sign(shift as u64));
        }
        debug_assert!(out.is_zero() || out.degree() == Some(spec.degree(&f)));
        Ok(out)
    }

    /// `L_{r,s} = [0, ..., ŝ, ..., r]` in the first `r` variables.
    pub fn l(&self, r: usize, s: usize) -> Result<Element> {
        if s > r || r > self.n {
            return Err(Error::InvalidInput(format!("L_{{{r},{s}}} out of range")));
        }
        self.bracket0(&gap_sequence(r as u32, &[s as u32]))
    }

    /// `L_r = L_{r,r}`; `L_0 = 1`.
    pub fn l_top(&self, r: usize) -> Element {
        self.l(r, r).expect("r within rank")
    }

    /// `V_r = Σ_{s<r} (-1)^{r+s-1} Q_{r-1,s} y_r^{p^s}`, with `V_1 = y_1`.
    pub fn v(&self, r: usize) -> Result<Element> {
        if r == 0 || r > self.n {
            return Err(Error::InvalidInput(format!("V_{r} out of range 1..={}", self.n)));
        }
        Ok(self.v[r].clone())
    }

    /// Dickson invariant `Q_{r,s}` in the first `r` variables.
    pub fn q(&self, r: usize, s: usize) -> Result<Element> {
        if s > r || r > self.n {
            return Err(Error::InvalidInput(format!("Q_{{{r},{s}}} out of range")));
        }
        Ok(self.dickson[r][s].clone())
    }

    fn build_dickson(&mut self) -> Result<()> {
        let f = self.field;
        let one = Element::one(&self.table);
        self.dickson = vec![vec![one.clone()]];
        self.v = vec![one.clone()];
        for r in 1..=self.n {
            let prev = &self.dickson[r - 1];
            let mut v = Element::zero(&self.table);
            for (s, q) in prev.iter().enumerate() {
                let y = Element::from_monomial(&self.table, 1, self.y_power(r - 1, s as u32));
                v.add_scaled(&(q * &y), f.sign((r + s + 1) as u64));
            }
            let v_pow = v.pow(f.p() as u64 - 1);
            let mut row = Vec::with_capacity(r + 1);
            for s in 0..r {
                let mut q = prev[s].mul_filtered(&v_pow, |_| true);
                if s > 0 {
                    q.add_assign_ref(&prev[s - 1].frobenius());
                }
                row.push(q);
            }
            row.push(one.clone());
            self.dickson.push(row);
            self.v.push(v);
        }
        for r in 1..=self.n {
            let l = self.l_top(r);
            for s in 0..=r {
                if &self.dickson[r][s] * &l != self.l(r, s)? {
                    return Err(Error::InternalConsistency(format!(
                        "Q_{{{r},{s}}} * L_{r} != L_{{{r},{s}}} at p = {}",
                        f.p()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `M_{n,s_1..s_k} = [k; 0, ..., ŝ_1, ..., ŝ_k, ..., n-1]`; the index must
    /// be nonempty.
    pub fn mui(&self, s: &[u32]) -> Result<Element> {
        if s.is_empty() {
            return Err(Error::InvalidInput("empty Mui index".into()));
        }
        self.mui_bracket(s)
    }

    /// The defining bracket of `M_{n,S}` for any `S ⊂ {0..n-1}`, including
    /// the empty index, whose bracket is `[0; 0, ..., n-1] = L_n`.
    pub fn mui_bracket(&self, s: &[u32]) -> Result<Element> {
        check_mui_index(self.n, s)?;
        let spec = BracketSpec::new(
            self.n,
            s.len(),
            gap_sequence(self.n as u32 - 1, s),
        )?;
        self.bracket(&spec)
    }

    /// `M̃_{n,s} = M_{n,s} L_n^{h-1}`.
    pub fn tilde_m(&self, s: u32) -> Result<Element> {
        let m = self.mui(&[s])?;
        Ok(&m * &self.l_top(self.n).pow(self.field.h() as u64 - 1))
    }

    /// `L̃_n = L_n^h`.
    pub fn tilde_l(&self) -> Element {
        self.l_top(self.n).pow(self.field.h() as u64)
    }

    /// Checks `(-1)^{k(k-1)/2} Σ_S (-1)^{|S|} M_{n,S} [S, e] = [k; e] L_n`,
    /// summing over `S = (s_1 < ... < s_k) ⊂ {0..n-1}`.
    pub fn decompose_i47(&self, spec: &BracketSpec) -> Result<Verdict> {
        if spec.k == 0 || spec.k >= spec.n || spec.n != self.n {
            return Err(Error::Precondition(format!(
                "decomposition needs 0 < k < n = {}, got k = {} in rank {}",
                self.n, spec.k, spec.n
            )));
        }
        let f = self.field;
        let mut lhs = Element::zero(&self.table);
        for subset in subsets(self.n, spec.k) {
            let s: Vec<u32> = subset.iter().map(|&i| i as u32).collect();
            let mut full = s.clone();
            full.extend_from_slice(&spec.exponents);
            let term = &self.mui(&s)? * &self.bracket0(&full)?;
            let sign = s.iter().map(|&v| v as u64).sum::<u64>();
            lhs.add_scaled(&term, f.sign(sign));
        }
        let lhs = lhs.scale(f.sign((spec.k * (spec.k - 1) / 2) as u64));
        let rhs = &self.bracket(spec)? * &self.l_top(self.n);
        Ok(Verdict::compare(&lhs, &rhs))
    }

    /// The elementary substitutions `x_i ↦ x_i + c x_j`, `y_i ↦ y_i + c y_j`
    /// for `i ≠ j`, `c ∈ F_p^×`, which generate `SL_n(F_p)`.
    pub fn elementary_substitutions(&self) -> Vec<Vec<(usize, Element)>> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in 1..=self.n {
                if i == j {
                    continue;
                }
                for c in 1..self.field.p() {
                    let xi = &self.x(i) + &self.x(j).scale(c);
                    let yi = &self.y(i) + &self.y(j).scale(c);
                    out.push(vec![(i - 1, xi), (self.n + i - 1, yi)]);
                }
            }
        }
        out
    }

    /// Whether `u` is fixed by every elementary generator of `SL_n`.
    pub fn sl_orbit_check(&self, u: &Element) -> Result<Verdict> {
        if u.table() != &self.table && **u.table() != *self.table {
            return Err(Error::TableMismatch);
        }
        for images in self.elementary_substitutions() {
            let moved = u.substitute(&images)?;
            if &moved != u {
                return Ok(Verdict::compare(&moved, u));
            }
        }
        Ok(Verdict::Verified)
    }
}

/// Solves `quotient * divisor = dividend` for a polynomial quotient in the
/// even generators by linear algebra over the graded coefficients.
///
/// Both inputs must be homogeneous and purely even. Returns `None` when no
/// exact quotient exists.
pub fn linear_quotient(dividend: &Element, divisor: &Element) -> Result<Option<Element>> {
    let table = dividend.table().clone();
    if divisor.table() != &table && **divisor.table() != *table {
        return Err(Error::TableMismatch);
    }
    if dividend.is_zero() {
        return Ok(Some(Element::zero(&table)));
    }
    let (Some(dd), Some(dv)) = (dividend.degree(), divisor.degree()) else {
        return Err(Error::InvalidInput("inputs must be homogeneous and nonzero".into()));
    };
    if dd < dv {
        return Ok(None);
    }
    let even: Vec<usize> = (0..table.len()).filter(|&i| !table.is_odd(i)).collect();
    let candidates = even_monomials(&table, &even, dd - dv);
    let products: Vec<Element> = candidates
        .iter()
        .map(|m| &Element::from_monomial(&table, 1, m.clone()) * divisor)
        .collect();
    let mut rows: Vec<Monomial> = dividend.terms().map(|(m, _)| m.clone()).collect();
    for pr in &products {
        rows.extend(pr.terms().map(|(m, _)| m.clone()));
    }
    rows.sort();
    rows.dedup();
    let matrix: Vec<Vec<u32>> = rows
        .iter()
        .map(|r| products.iter().map(|pr| pr.coefficient(r)).collect())
        .collect();
    let rhs: Vec<u32> = rows.iter().map(|r| dividend.coefficient(r)).collect();
    let f = *table.field();
    let x = match solve_mod_p(&f, &matrix, &rhs)? {
        Solution::Unique(x) => x,
        Solution::NonUnique { particular, .. } => particular,
        Solution::Inconsistent { .. } => return Ok(None),
    };
    Ok(Some(Element::from_terms(
        &table,
        candidates.into_iter().zip(x),
    )))
}

/// All monomials in the listed even generators of the given total degree.
fn even_monomials(table: &Arc<GeneratorTable>, gens: &[usize], degree: u64) -> Vec<Monomial> {
    fn rec(
        table: &GeneratorTable,
        gens: &[usize],
        left: u64,
        acc: &mut Vec<(usize, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        let Some((&g, rest)) = gens.split_first() else {
            if left == 0 {
                out.push(Monomial::from_parts(table, &[], acc).expect("even").1);
            }
            return;
        };
        let d = table.degree_of(g);
        let max = if d == 0 { 0 } else { left / d };
        for e in 0..=max {
            if e > 0 {
                acc.push((g, e as u32));
            }
            rec(table, rest, left - e * d, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(table, gens, degree, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(p: u32, n: usize) -> Invariants {
        Invariants::new(FieldConfig::new(p).unwrap(), n).unwrap()
    }

    fn el(i: &Invariants, s: &str) -> Element {
        Element::parse(i.table(), s).unwrap()
    }

    #[test]
    fn bracket0_examples() {
        let i1 = inv(3, 1);
        assert_eq!(i1.bracket0(&[2]).unwrap(), el(&i1, "y1^9"));
        let i2 = inv(3, 2);
        assert_eq!(i2.bracket0(&[0, 1]).unwrap(), el(&i2, "y1*y2^3 - y1^3*y2"));
        assert!(i2.bracket0(&[1, 1]).unwrap().is_zero());
    }

    #[test]
    fn bracket_examples() {
        let i2 = inv(3, 2);
        let full = i2.bracket(&BracketSpec::new(2, 2, vec![]).unwrap()).unwrap();
        assert_eq!(full, el(&i2, "x1*x2"));
        let m21 = i2.bracket(&BracketSpec::new(2, 1, vec![0]).unwrap()).unwrap();
        assert_eq!(m21, el(&i2, "x1*y2 - x2*y1"));
        let m20 = i2.bracket(&BracketSpec::new(2, 1, vec![1]).unwrap()).unwrap();
        assert_eq!(m20, el(&i2, "x1*y2^3 - x2*y1^3"));
        let as0 = i2.bracket(&BracketSpec::new(2, 0, vec![0, 2]).unwrap()).unwrap();
        assert_eq!(as0, i2.bracket0(&[0, 2]).unwrap());
        let i3 = inv(3, 3);
        let top = i3.bracket(&BracketSpec::new(3, 3, vec![]).unwrap()).unwrap();
        assert_eq!(top, el(&i3, "x1*x2*x3"));
        let rep = i3.bracket(&BracketSpec::new(3, 1, vec![2, 2]).unwrap()).unwrap();
        assert!(rep.is_zero());
    }

    #[test]
    fn bracket_spec_validation() {
        assert!(BracketSpec::new(2, 3, vec![]).is_err());
        assert!(BracketSpec::new(2, 1, vec![0, 1]).is_err());
        let spec = BracketSpec::new(3, 1, vec![0, 2]).unwrap();
        assert_eq!(spec.degree(&FieldConfig::new(3).unwrap()), 1 + 2 * (1 + 9));
    }

    #[test]
    fn l_examples() {
        let i1 = inv(3, 1);
        assert_eq!(i1.l_top(1), el(&i1, "y1"));
        let i2 = inv(3, 2);
        assert_eq!(i2.l_top(2), el(&i2, "y1*y2^3 - y1^3*y2"));
        assert_eq!(i2.l(2, 0).unwrap(), i2.l_top(2).pow(3));
        assert!(i2.l(2, 3).is_err());
    }

    #[test]
    fn v_examples() {
        let i2 = inv(3, 2);
        assert_eq!(i2.v(1).unwrap(), el(&i2, "y1"));
        assert_eq!(i2.v(2).unwrap(), el(&i2, "y2^3 - y1^2*y2"));
        for p in [3, 5] {
            let i3 = inv(p, 3);
            for r in 2..=3 {
                assert_eq!(&i3.v(r).unwrap() * &i3.l_top(r - 1), i3.l_top(r));
            }
        }
        assert!(i2.v(0).is_err());
    }

    #[test]
    fn dickson_examples() {
        let i2 = inv(3, 2);
        assert_eq!(i2.q(2, 2).unwrap(), Element::one(i2.table()));
        assert_eq!(
            i2.q(2, 1).unwrap(),
            el(&i2, "y1^6 + y1^4*y2^2 + y1^2*y2^4 + y2^6")
        );
        assert_eq!(i2.q(2, 0).unwrap(), i2.l_top(2).pow(2));
        assert_eq!(i2.q(1, 0).unwrap(), el(&i2, "y1^2"));
    }

    #[test]
    fn dickson_q0_relation() {
        for p in [3, 5] {
            let i3 = inv(p, 3);
            for r in 1..=3 {
                let lhs = i3.q(r, 0).unwrap();
                let rhs = &i3.q(r - 1, 0).unwrap() * &i3.v(r).unwrap().pow(p as u64 - 1);
                assert_eq!(lhs, rhs, "p={p} r={r}");
                assert_eq!(lhs, i3.l_top(r).pow(p as u64 - 1));
            }
        }
    }

    #[test]
    fn mui_examples() {
        let i2 = inv(3, 2);
        assert_eq!(i2.mui(&[1]).unwrap(), el(&i2, "x1*y2 - x2*y1"));
        assert_eq!(i2.mui(&[0]).unwrap(), el(&i2, "x1*y2^3 - x2*y1^3"));
        assert_eq!(i2.mui(&[0, 1]).unwrap(), el(&i2, "x1*x2"));
        assert!(i2.mui(&[]).is_err());
        assert!(i2.mui(&[2]).is_err());
        assert!(i2.mui(&[1, 0]).is_err());
        assert_eq!(i2.mui_bracket(&[]).unwrap(), i2.l_top(2));
        let i5 = inv(5, 2);
        assert_eq!(i5.mui(&[1]).unwrap(), el(&i5, "x1*y2 - x2*y1"));
    }

    #[test]
    fn tilde_examples() {
        let i1 = inv(3, 1);
        assert_eq!(i1.tilde_l(), el(&i1, "y1"));
        assert_eq!(i1.tilde_m(0).unwrap(), el(&i1, "x1"));
        let i2 = inv(5, 2);
        assert_eq!(i2.tilde_l(), i2.l_top(2).pow(2));
    }

    #[test]
    fn decomposition_identity() {
        let i2 = inv(3, 2);
        for e in [0, 5] {
            let spec = BracketSpec::new(2, 1, vec![e]).unwrap();
            assert!(i2.decompose_i47(&spec).unwrap().is_verified(), "e={e}");
        }
        let i3 = inv(3, 3);
        let spec = BracketSpec::new(3, 1, vec![0, 1]).unwrap();
        assert!(i3.decompose_i47(&spec).unwrap().is_verified());
        let spec = BracketSpec::new(3, 2, vec![2]).unwrap();
        assert!(i3.decompose_i47(&spec).unwrap().is_verified());
        assert!(i3.decompose_i47(&BracketSpec::new(3, 0, vec![0, 1, 2]).unwrap()).is_err());
    }

    #[test]
    fn sl_invariance_examples() {
        let i2 = inv(3, 2);
        assert!(i2.sl_orbit_check(&i2.l_top(2)).unwrap().is_verified());
        assert!(!i2.sl_orbit_check(&i2.y(1)).unwrap().is_verified());
        assert!(i2.sl_orbit_check(&i2.q(2, 1).unwrap()).unwrap().is_verified());
        assert!(i2.sl_orbit_check(&i2.mui(&[0]).unwrap()).unwrap().is_verified());
    }

    #[test]
    fn divisibility_by_l() {
        let i2 = inv(3, 2);
        let l2 = i2.l_top(2);
        for a in 0..=3 {
            for b in 0..=3 {
                if a == b {
                    continue;
                }
                let e = i2.bracket0(&[a, b]).unwrap();
                let q = linear_quotient(&e, &l2).unwrap().expect("divisible");
                assert_eq!(&q * &l2, e);
            }
        }
        assert!(linear_quotient(&i2.y(1), &l2).unwrap().is_none());
        let q21 = linear_quotient(&i2.l(2, 1).unwrap(), &l2).unwrap().unwrap();
        assert_eq!(q21, i2.q(2, 1).unwrap());
    }
}
