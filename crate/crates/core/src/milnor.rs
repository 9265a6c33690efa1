//! Milnor-basis indices `(S, R)` for the operations `St^{S,R}`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldConfig;

/// The index of `St^{S,R}`, dual to `τ_{s_1}...τ_{s_t} ξ_1^{r_1}...ξ_m^{r_m}`.
///
/// `R` is stored without trailing zeros, so `(k)` and `(k, 0)` are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MilnorIndex {
    s: Vec<u32>,
    r: Vec<u32>,
}

impl MilnorIndex {
    pub fn new(s: Vec<u32>, mut r: Vec<u32>) -> Result<Self> {
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "S = {s:?} must be strictly increasing"
            )));
        }
        while r.last() == Some(&0) {
            r.pop();
        }
        Ok(MilnorIndex { s, r })
    }

    pub fn identity() -> Self {
        MilnorIndex {
            s: Vec::new(),
            r: Vec::new(),
        }
    }

    /// `P^k = St^{∅,(k)}`.
    pub fn p_power(k: u32) -> Self {
        MilnorIndex::new(Vec::new(), vec![k]).expect("valid")
    }

    /// `β = St^{(0),∅}`.
    pub fn bockstein() -> Self {
        MilnorIndex::new(vec![0], Vec::new()).expect("valid")
    }

    /// `St^{(s),∅}`.
    pub fn tau(s: u32) -> Self {
        MilnorIndex::new(vec![s], Vec::new()).expect("valid")
    }

    /// `St^{∅,Δ_i}`: `R` has a single 1 in place `i` (`Δ_0 = 0`).
    pub fn delta(i: usize) -> Self {
        let mut r = vec![0; i];
        if i > 0 {
            r[i - 1] = 1;
        }
        MilnorIndex::new(Vec::new(), r).expect("valid")
    }

    pub fn s(&self) -> &[u32] {
        &self.s
    }

    pub fn r(&self) -> &[u32] {
        &self.r
    }

    /// `t = |S|`.
    pub fn t(&self) -> usize {
        self.s.len()
    }

    /// `Σ_{s∈S} (2p^s - 1) + Σ_i r_i (2p^i - 2)`.
    pub fn degree(&self, field: &FieldConfig) -> u64 {
        let taus: u64 = self.s.iter().map(|&s| 2 * field.p_pow(s) - 1).sum();
        let xis: u64 = self
            .r
            .iter()
            .enumerate()
            .map(|(i, &r)| r as u64 * (2 * field.p_pow(i as u32 + 1) - 2))
            .sum();
        taus + xis
    }

    /// `r(S,R) = t + s_1 + ... + s_t + r_1 + 2 r_2 + ... + m r_m`.
    pub fn sign_exponent(&self) -> u64 {
        let t = self.s.len() as u64;
        let s: u64 = self.s.iter().map(|&v| v as u64).sum();
        let r: u64 = self
            .r
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u64 + 1) * v as u64)
            .sum();
        t + s + r
    }

    /// `Σ r_i`.
    pub fn r_total(&self) -> u64 {
        self.r.iter().map(|&v| v as u64).sum()
    }

    /// Smallest `m` with `max(S) < m` and `len(R) ≤ m`.
    pub fn minimal_m(&self) -> usize {
        let from_s = self.s.last().map_or(0, |&s| s as usize + 1);
        from_s.max(self.r.len())
    }

    /// `r_0 = q - t - 2 Σ r_i`, if non-negative.
    pub fn r0(&self, q: u64) -> Option<u64> {
        q.checked_sub(self.t() as u64 + 2 * self.r_total())
    }

    /// Parses `beta`, `P^k`, or `St^{(s1,...),(r1,...)}`.
    pub fn parse(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::Parse {
            pos: 0,
            msg: format!("{msg} in operation {text:?}"),
        };
        if compact == "beta" {
            return Ok(MilnorIndex::bockstein());
        }
        if let Some(k) = compact.strip_prefix("P^") {
            let k = k.parse::<u32>().map_err(|_| bad("bad exponent"))?;
            return Ok(MilnorIndex::p_power(k));
        }
        let body = compact
            .strip_prefix("St^{")
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| bad("expected beta, P^k or St^{(S),(R)}"))?;
        let body = body.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let (s_part, rest) = body.split_once(')').ok_or_else(|| bad("unclosed S"))?;
        let rest = rest.strip_prefix(",(").ok_or_else(|| bad("expected ',('"))?;
        let r_part = rest.strip_suffix(')').ok_or_else(|| bad("unclosed R"))?;
        let list = |s: &str| -> Result<Vec<u32>> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|v| v.parse::<u32>().map_err(|_| bad("bad integer")))
                .collect()
        };
        MilnorIndex::new(list(s_part)?, list(r_part)?)
    }
}

impl fmt::Display for MilnorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "St^{{({}),({})}}", join(&self.s), join(&self.r))
    }
}

/// All indices with `degree ≤ budget` (when given), with `S ⊂ {0..m-1}` and
/// `len(R) ≤ m` (when `m` is given), and with `r_0 = q - t - 2Σr_i ≥ 0`
/// (when `q` is given). Sorted by degree, then by `(S, R)`.
pub fn enumerate_indices(
    field: &FieldConfig,
    q: Option<u64>,
    budget: Option<u64>,
    m: Option<usize>,
) -> Result<Vec<MilnorIndex>> {
    if m.is_none() && budget.is_none() {
        return Err(Error::InvalidInput(
            "enumeration needs a degree budget or a truncation m".into(),
        ));
    }
    let budget_ok = |d: u64| budget.is_none_or(|b| d <= b);
    let mut taus = Vec::new();
    for s in 0u32.. {
        if m.is_some_and(|m| s as usize >= m) || !budget_ok(2 * field.p_pow(s) - 1) {
            break;
        }
        taus.push(s);
    }
    let mut xis = Vec::new();
    for i in 1u32.. {
        if m.is_some_and(|m| i as usize > m) || !budget_ok(2 * field.p_pow(i) - 2) {
            break;
        }
        xis.push(i);
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << taus.len()) {
        let s: Vec<u32> = taus
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &s)| s)
            .collect();
        let tau_degree: u64 = s.iter().map(|&v| 2 * field.p_pow(v) - 1).sum();
        if !budget_ok(tau_degree) {
            continue;
        }
        let t = s.len() as u64;
        if q.is_some_and(|q| q < t) {
            continue;
        }
        // remaining allowance for Σ r_i from the r_0 constraint
        let r_cap = q.map(|q| (q - t) / 2);
        let mut r = vec![0u32; xis.len()];
        extend_r(field, &xis, 0, tau_degree, 0, r_cap, budget, &mut r, &s, &mut out);
    }
    out.sort_by(|a, b| {
        a.degree(field)
            .cmp(&b.degree(field))
            .then_with(|| a.cmp(b))
    });
    out.dedup();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend_r(
    field: &FieldConfig,
    xis: &[u32],
    pos: usize,
    degree: u64,
    total: u64,
    r_cap: Option<u64>,
    budget: Option<u64>,
    r: &mut Vec<u32>,
    s: &[u32],
    out: &mut Vec<MilnorIndex>,
) {
    if pos == xis.len() {
        out.push(MilnorIndex::new(s.to_vec(), r.clone()).expect("valid"));
        return;
    }
    let step = 2 * field.p_pow(xis[pos]) - 2;
    let mut k = 0u64;
    loop {
        let d = degree + k * step;
        if budget.is_some_and(|b| d > b) || r_cap.is_some_and(|c| total + k > c) {
            break;
        }
        r[pos] = k as u32;
        extend_r(field, xis, pos + 1, d, total + k, r_cap, budget, r, s, out);
        k += 1;
    }
    r[pos] = 0;
}
