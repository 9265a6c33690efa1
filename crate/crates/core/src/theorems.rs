//! Closed-form right-hand sides for the action of `St^{S,R}` and `P^t` on
//! bracket and Mùi invariants, and exhaustive verifiers comparing them with
//! the operation engines.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::invariants::{has_repeats, subsets, BracketSpec, Invariants};
use crate::milnor::{enumerate_indices, MilnorIndex};
use crate::power_map::PowerMap;
use crate::steenrod;
use crate::verdict::Verdict;

/// Largest coefficient rank the power-map oracle is run at.
pub const ORACLE_MAX_M: usize = 3;
/// The oracle runs when `q · p^m` stays within this bound (`q` the input
/// degree); beyond it the linear systems grow past desk scale.
pub const ORACLE_COST_LIMIT: u64 = 250;
/// Minimum number of control `R` values per bracket-action case.
pub const MIN_CONTROLS: usize = 3;

/// An assignment of the columns `k+1..n` of a bracket to Milnor slots
/// `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionJ {
    pub k: usize,
    /// `J_0, ..., J_m`, each a sorted list of column indices.
    pub blocks: Vec<Vec<usize>>,
    /// `r_{J_s} = Σ_{j ∈ J_s} p^{e_j}` for `s = 0..m`.
    pub slot_sums: Vec<u64>,
    /// `Φ_J(k+1), ..., Φ_J(n)`.
    pub phi: Vec<usize>,
}

impl PartitionJ {
    /// `R_J = (r_{J_1}, ..., r_{J_m})` without trailing zeros.
    pub fn r_vector(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.slot_sums[1..].iter().map(|&v| v as u32).collect();
        while r.last() == Some(&0) {
            r.pop();
        }
        r
    }

    /// `Φ_J(i)` for a column index `k < i ≤ n`.
    pub fn phi_of(&self, i: usize) -> usize {
        self.phi[i - self.k - 1]
    }
}

/// All `(m+1)^{n-k}` partitions `J` of the columns of `[k; e]`. For
/// pairwise distinct `e` the map `J ↦ R_J` is checked to be injective.
pub fn enumerate_partitions(field: &FieldConfig, k: usize, e: &[u32], m: usize) -> Result<Vec<PartitionJ>> {
    let cols = e.len();
    let mut out = Vec::new();
    let mut phi = vec![0usize; cols];
    loop {
        let mut blocks = vec![Vec::new(); m + 1];
        let mut slot_sums = vec![0u64; m + 1];
        for (j, &s) in phi.iter().enumerate() {
            blocks[s].push(k + 1 + j);
            slot_sums[s] += field.p_pow(e[j]);
        }
        out.push(PartitionJ {
            k,
            blocks,
            slot_sums,
            phi: phi.clone(),
        });
        if !odometer(&mut phi, m + 1) {
            break;
        }
    }
    if !has_repeats(e) {
        let mut seen = HashSet::new();
        for j in &out {
            if !seen.insert(j.r_vector()) {
                return Err(Error::InternalConsistency(format!(
                    "R_J = {:?} arises from two partitions for e = {e:?}",
                    j.r_vector()
                )));
            }
        }
    }
    Ok(out)
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// The engines every case is checked against.
pub struct Engines {
    field: FieldConfig,
    use_oracle: bool,
    cache: Mutex<HashMap<(usize, String, usize), Arc<BTreeMap<MilnorIndex, Element>>>>,
}

impl Engines {
    pub fn new(field: FieldConfig, use_oracle: bool) -> Self {
        Engines {
            field,
            use_oracle,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    /// The coefficient rank the oracle would use for `idx` on a degree-`q`
    /// input, if it is run at all.
    pub fn oracle_rank(&self, idx: &MilnorIndex, q: u64) -> Option<usize> {
        if !self.use_oracle || idx.r0(q).is_none() {
            return None;
        }
        let m = idx.minimal_m().max(1);
        (m <= ORACLE_MAX_M && q * self.field.p_pow(m as u32) <= ORACLE_COST_LIMIT).then_some(m)
    }

    fn oracle(&self, idx: &MilnorIndex, u: &Element) -> Result<Option<Element>> {
        let Some(q) = u.degree() else {
            return Ok(None);
        };
        let Some(m) = self.oracle_rank(idx, q) else {
            return Ok(None);
        };
        let key = (u.table().len(), u.render(), m);
        let cached = self.cache.lock().expect("cache lock").get(&key).cloned();
        let values = match cached {
            Some(v) => v,
            None => {
                let v = Arc::new(PowerMap::over(u.table(), m)?.extract_all(u)?);
                self.cache.lock().expect("cache lock").insert(key, v.clone());
                v
            }
        };
        Ok(Some(
            values.get(idx).cloned().unwrap_or_else(|| Element::zero(u.table())),
        ))
    }

    /// `St^{S,R} u` from the coaction and, where feasible, the oracle.
    pub fn st(&self, idx: &MilnorIndex, u: &Element) -> Result<Vec<(&'static str, Element)>> {
        let mut out = vec![("coaction", steenrod::st(idx, u)?)];
        if let Some(v) = self.oracle(idx, u)? {
            out.push(("oracle", v));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseVerdict {
    /// Every engine equals the stated right-hand side.
    Pass,
    /// Every engine equals a corrected right-hand side; the note says why.
    Explained,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineValue {
    pub engine: &'static str,
    pub value: String,
}

/// One grid cell.
#[derive(Clone, Debug, Serialize)]
pub struct CaseRecord {
    pub theorem: &'static str,
    pub p: u32,
    pub n: usize,
    pub input: String,
    pub operation: String,
    pub expected: String,
    pub engines: Vec<EngineValue>,
    pub verdict: CaseVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The right-hand side a case is judged against.
#[derive(Clone, Debug)]
pub struct Expectation {
    pub value: Element,
    /// Set when `value` corrects the closed form as stated.
    pub correction: Option<String>,
    /// Extra information that does not affect the verdict.
    pub remark: Option<String>,
}

impl Expectation {
    pub fn plain(value: Element) -> Self {
        Expectation {
            value,
            correction: None,
            remark: None,
        }
    }
}

struct Case {
    theorem: &'static str,
    p: u32,
    n: usize,
    input: String,
    operation: String,
    degree: Option<u64>,
    expected: Expectation,
    values: Vec<(&'static str, Element)>,
}

fn judge(case: Case) -> CaseRecord {
    let Case {
        theorem,
        p,
        n,
        input,
        operation,
        degree,
        expected,
        values,
    } = case;
    let Expectation {
        value,
        correction,
        remark,
    } = expected;
    let degree_ok = value.is_zero() || degree.is_none() || value.degree() == degree;
    let agree = values.iter().all(|(_, v)| *v == value);
    let (verdict, mut note) = match (degree_ok, agree, &correction) {
        (false, _, _) => (
            CaseVerdict::Mismatch,
            Some(format!("right-hand side is not homogeneous of degree {degree:?}")),
        ),
        (true, true, None) => (CaseVerdict::Pass, None),
        (true, true, Some(c)) => (CaseVerdict::Explained, Some(c.clone())),
        (true, false, _) => (CaseVerdict::Mismatch, correction.clone()),
    };
    if let Some(r) = remark {
        note = Some(match note {
            Some(n) => format!("{n}; {r}"),
            None => r,
        });
    }
    CaseRecord {
        theorem,
        p,
        n,
        input,
        operation,
        expected: value.render(),
        engines: values
            .into_iter()
            .map(|(engine, v)| EngineValue {
                engine,
                value: v.render(),
            })
            .collect(),
        verdict,
        note,
    }
}

/// The outcome of one verifier.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub records: Vec<CaseRecord>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn count(&self, v: CaseVerdict) -> usize {
        self.records.iter().filter(|r| r.verdict == v).count()
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CaseRecord> {
        self.records.iter().filter(|r| r.verdict == CaseVerdict::Mismatch)
    }

    /// No unexplained mismatch.
    pub fn is_clean(&self) -> bool {
        self.count(CaseVerdict::Mismatch) == 0
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
        self.notes.extend(other.notes);
    }

    /// Number of cases in which at least one value came from the oracle.
    pub fn oracle_cases(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.engines.iter().any(|e| e.engine == "oracle"))
            .count()
    }
}

fn bracket_label(spec: &BracketSpec) -> String {
    let e: Vec<String> = spec.exponents.iter().map(u32::to_string).collect();
    format!("[{};{}]", spec.k, e.join(","))
}

fn mui_label(n: usize, s: &[u32]) -> String {
    let s: Vec<String> = s.iter().map(u32::to_string).collect();
    format!("M_{{{n},{}}}", s.join(","))
}

/// `M_{n,S}` for an index given in any order, with `M_∅ = L_n`.
fn mui_any(inv: &Invariants, s: &[u32]) -> Result<Element> {
    let mut s = s.to_vec();
    s.sort_unstable();
    inv.mui_bracket(&s)
}

fn without(list: &[u32], pos: usize) -> Vec<u32> {
    list.iter()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .map(|(_, &v)| v)
        .collect()
}

// ---------------------------------------------------------------------------
// St^{S,R} on brackets

/// `St^{S,R}[k; e]`: the signed bracket
/// `(-1)^{t(k-t)} [k-t; s_1..s_t, e_j + Φ_J(j)]` when `R = R_J`, else 0.
/// Returns a flag when `t > k`, where the bracket is undefined and 0 is used.
pub fn rhs_theorem11(inv: &Invariants, spec: &BracketSpec, idx: &MilnorIndex) -> Result<(Element, Option<String>)> {
    if spec.has_repeated_exponent() {
        return Err(Error::Precondition(format!(
            "exponents {:?} are not pairwise distinct",
            spec.exponents
        )));
    }
    let f = *inv.field();
    let zero = Element::zero(inv.table());
    let t = idx.t();
    if t > spec.k {
        return Ok((zero, Some(format!("t = {t} > k = {}: taken as 0", spec.k))));
    }
    let parts = enumerate_partitions(&f, spec.k, &spec.exponents, idx.r().len())?;
    let Some(j) = parts.iter().find(|j| j.r_vector() == idx.r()) else {
        return Ok((zero, None));
    };
    let mut exps: Vec<u32> = idx.s().to_vec();
    for (pos, &e) in spec.exponents.iter().enumerate() {
        exps.push(e + j.phi[pos] as u32);
    }
    let b = inv.bracket(&BracketSpec::new(spec.n, spec.k - t, exps)?)?;
    Ok((b.scale(f.sign((t * (spec.k - t)) as u64)), None))
}

/// Every `R_J` for `m` slots, and at least [`MIN_CONTROLS`] other `R` of
/// length `≤ m` (all with Milnor degree `≤ budget`, more if needed).
pub fn theorem11_r_values(
    field: &FieldConfig,
    spec: &BracketSpec,
    m: usize,
    budget: u64,
) -> Result<(Vec<Vec<u32>>, Vec<Vec<u32>>)> {
    let rj: Vec<Vec<u32>> = enumerate_partitions(field, spec.k, &spec.exponents, m)?
        .iter()
        .map(PartitionJ::r_vector)
        .collect();
    let known: HashSet<&Vec<u32>> = rj.iter().collect();
    let mut b = budget.max(1);
    loop {
        let controls: Vec<Vec<u32>> = enumerate_indices(field, None, Some(b), Some(m))?
            .into_iter()
            .filter(|idx| idx.t() == 0 && !known.contains(&idx.r().to_vec()))
            .map(|idx| idx.r().to_vec())
            .collect();
        if controls.len() >= MIN_CONTROLS || m == 0 || b > 1 << 20 {
            return Ok((rj, controls));
        }
        b *= 2;
    }
}

/// The bracket action formula on `[k; e]` with `m` Milnor slots: every `S ⊂ {0..m-1}` with
/// `t ≤ k`, against every `R_J` and the control values.
pub fn verify_theorem11(
    engines: &Engines,
    spec: &BracketSpec,
    m: usize,
    budget: u64,
) -> Result<Report> {
    let f = *engines.field();
    if spec.has_repeated_exponent() {
        return Err(Error::Precondition(format!(
            "exponents {:?} are not pairwise distinct",
            spec.exponents
        )));
    }
    let inv = Invariants::new(f, spec.n)?;
    let u = inv.bracket(spec)?;
    let q = spec.degree(&f);
    let (rj, controls) = theorem11_r_values(&f, spec, m, budget)?;
    let mut cells = Vec::new();
    for t in 0..=spec.k.min(m) {
        for s in subsets(m, t) {
            let s: Vec<u32> = s.into_iter().map(|v| v as u32).collect();
            for (r, control) in rj
                .iter()
                .map(|r| (r, false))
                .chain(controls.iter().map(|r| (r, true)))
            {
                cells.push((MilnorIndex::new(s.clone(), r.clone())?, control));
            }
        }
    }
    let records = cells
        .par_iter()
        .map(|(idx, control)| {
            let (value, flag) = rhs_theorem11(&inv, spec, idx)?;
            let values = engines.st(idx, &u)?;
            Ok(judge(Case {
                theorem: "t11",
                p: f.p(),
                n: spec.n,
                input: bracket_label(spec),
                operation: idx.to_string(),
                degree: Some(q + idx.degree(&f)),
                expected: Expectation {
                    value,
                    correction: None,
                    remark: flag.or_else(|| control.then(|| format!("control R, m = {m}"))),
                },
                values,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        records,
        notes: Vec::new(),
    })
}

/// Ordered tuples of `len` distinct values from `pool`.
pub fn distinct_tuples(pool: &[u32], len: usize) -> Vec<Vec<u32>> {
    fn rec(pool: &[u32], len: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for &v in pool {
            if !cur.contains(&v) {
                cur.push(v);
                rec(pool, len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(pool, len, &mut Vec::new(), &mut out);
    out
}

/// The bracket-action grid in rank `n`: every `k` in `ks` and every ordered
/// tuple of distinct exponents from `pool`, for each `m` in `ms`.
pub fn verify_theorem11_grid(
    engines: &Engines,
    n: usize,
    ks: &[usize],
    pool: &[u32],
    ms: &[usize],
    budget: u64,
) -> Result<Report> {
    let mut report = Report::default();
    for &k in ks {
        if k > n {
            continue;
        }
        for e in distinct_tuples(pool, n - k) {
            let spec = BracketSpec::new(n, k, e)?;
            for &m in ms {
                report.extend(verify_theorem11(engines, &spec, m, budget)?);
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Shifting the last exponent by n

/// `Σ_{s<n} (-1)^{n+s-1} [k; e_{k+1}..e_{n-1}, e_n + s] Q_{n,s}^{p^{e_n}}`.
pub fn rhs_prop12(inv: &Invariants, k: usize, e: &[u32]) -> Result<Element> {
    let n = inv.rank();
    let f = *inv.field();
    let (&last, _) = e.split_last().ok_or_else(|| {
        Error::InvalidInput("the relation needs at least one exponent".into())
    })?;
    let mut out = Element::zero(inv.table());
    for s in 0..n {
        let mut shifted = e.to_vec();
        *shifted.last_mut().expect("nonempty") = last + s as u32;
        let b = inv.bracket(&BracketSpec::new(n, k, shifted)?)?;
        if b.is_zero() {
            continue;
        }
        let q = inv.q(n, s)?.frobenius_iter(last);
        out.add_scaled(&(&b * &q), f.sign((n + s + 1) as u64));
    }
    Ok(out)
}

/// Checks the relation for `[k; e]` in rank `n = inv.rank()`.
pub fn verify_prop12(inv: &Invariants, k: usize, e: &[u32]) -> Result<CaseRecord> {
    let n = inv.rank();
    let f = *inv.field();
    let mut shifted = e.to_vec();
    if let Some(l) = shifted.last_mut() {
        *l += n as u32;
    }
    let spec = BracketSpec::new(n, k, shifted)?;
    let lhs = inv.bracket(&spec)?;
    let rhs = rhs_prop12(inv, k, e)?;
    Ok(judge(Case {
        theorem: "p12",
        p: f.p(),
        n,
        input: bracket_label(&BracketSpec::new(n, k, e.to_vec())?),
        operation: format!("e_n -> e_n + {n}"),
        degree: Some(spec.degree(&f)),
        expected: Expectation::plain(rhs),
        values: vec![("bracket", lhs)],
    }))
}

/// The relation for every `0 ≤ k < n` and every `e ∈ pool^{n-k}`.
pub fn verify_prop12_grid(field: FieldConfig, n: usize, pool: &[u32]) -> Result<Report> {
    let inv = Invariants::new(field, n)?;
    let mut cells = Vec::new();
    for k in 0..n {
        let mut e = vec![0usize; n - k];
        loop {
            cells.push((k, e.iter().map(|&i| pool[i]).collect::<Vec<u32>>()));
            if !odometer(&mut e, pool.len()) {
                break;
            }
        }
    }
    let records = cells
        .par_iter()
        .map(|(k, e)| verify_prop12(&inv, *k, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        records,
        notes: vec![format!("k = {n} has no exponent to shift and is vacuous")],
    })
}

// ---------------------------------------------------------------------------
// P^t on Mùi invariants

/// Which closed-form branch produced a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch13 {
    Shift(Vec<u32>),
    Dickson(Vec<u32>),
}

fn interval_tuples(lo_hi: &[(i64, i64)]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in lo_hi {
        let mut next = Vec::new();
        for prefix in &out {
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(v as u32);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn shift_weight(field: &FieldConfig, s: &[u32], t: &[u32]) -> u64 {
    s.iter()
        .zip(t)
        .map(|(&a, &b)| (field.p_pow(a) - field.p_pow(b)) / (field.p() as u64 - 1))
        .sum()
}

/// Every tuple representing `t` in either branch.
pub fn theorem13_representations(field: &FieldConfig, n: usize, s: &[u32], t: u64) -> Vec<Branch13> {
    let k = s.len();
    let mut bounds: Vec<(i64, i64)> = Vec::new();
    let mut prev: i64 = -1;
    for &v in s {
        bounds.push((prev + 1, v as i64));
        prev = v as i64;
    }
    let mut out = Vec::new();
    for tuple in interval_tuples(&bounds) {
        if shift_weight(field, s, &tuple) == t {
            out.push(Branch13::Shift(tuple));
        }
    }
    let mut s_ext = s.to_vec();
    s_ext.push(n as u32);
    bounds.push((prev + 1, n as i64 - 1));
    for tuple in interval_tuples(&bounds) {
        debug_assert_eq!(tuple.len(), k + 1);
        if shift_weight(field, &s_ext, &tuple) == t {
            out.push(Branch13::Dickson(tuple));
        }
    }
    out
}

/// `P^t M_{n,S}` by the closed form. Errors on a representation collision.
pub fn rhs_theorem13(inv: &Invariants, t: u64, s: &[u32]) -> Result<Element> {
    let f = *inv.field();
    let n = inv.rank();
    let reps = theorem13_representations(&f, n, s, t);
    match reps.as_slice() {
        [] => Ok(Element::zero(inv.table())),
        [Branch13::Shift(tt)] => inv.mui(tt),
        [Branch13::Dickson(tt)] => {
            let k1 = tt.len();
            let mut out = Element::zero(inv.table());
            for i in 1..=k1 {
                let term = &mui_any(inv, &without(tt, i - 1))? * &inv.q(n, tt[i - 1] as usize)?;
                out.add_scaled(&term, f.sign((k1 - i) as u64));
            }
            Ok(out)
        }
        _ => Err(Error::Precondition(format!(
            "t = {t} has {} representations for S = {s:?}",
            reps.len()
        ))),
    }
}

/// Every Mùi index `S ⊂ {0..n-1}`, nonempty, in length-then-lex order.
pub fn mui_indices(n: usize) -> Vec<Vec<u32>> {
    (1..=n)
        .flat_map(|k| subsets(n, k))
        .map(|s| s.into_iter().map(|v| v as u32).collect())
        .collect()
}

/// `P^t M_{n,S}` for every Mùi index and every `t` with `2t ≤ deg M`
/// (capped at `t_max` when given).
pub fn verify_theorem13(engines: &Engines, n: usize, t_max: Option<u64>) -> Result<Report> {
    let f = *engines.field();
    let inv = Invariants::new(f, n)?;
    let mut cells = Vec::new();
    for s in mui_indices(n) {
        let deg = inv.mui(&s)?.degree().expect("homogeneous");
        let top = t_max.map_or(deg / 2, |c| c.min(deg / 2));
        for t in 0..=top {
            cells.push((s.clone(), t));
        }
    }
    let mut collisions = 0usize;
    let records = cells
        .par_iter()
        .map(|(s, t)| {
            let u = inv.mui(s)?;
            let idx = MilnorIndex::p_power(*t as u32);
            let mut values = vec![("pk", steenrod::pk(*t, &u)?)];
            values.extend(engines.st(&idx, &u)?);
            let (expected, collision) = match rhs_theorem13(&inv, *t, s) {
                Ok(v) => (v, None),
                Err(Error::Precondition(msg)) => (Element::zero(inv.table()), Some(msg)),
                Err(e) => return Err(e),
            };
            let mut rec = judge(Case {
                theorem: "t13",
                p: f.p(),
                n,
                input: mui_label(n, s),
                operation: format!("P^{t}"),
                degree: Some(u.degree().expect("homogeneous") + 2 * t * (f.p() as u64 - 1)),
                expected: Expectation::plain(expected.clone()),
                values,
            });
            if let Some(msg) = collision {
                rec.verdict = CaseVerdict::Mismatch;
                rec.note = Some(format!("representation collision: {msg}"));
            }
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    for r in &records {
        if r.note.as_deref().is_some_and(|n| n.starts_with("representation collision")) {
            collisions += 1;
        }
    }
    Ok(Report {
        records,
        notes: vec![format!("representation collisions: {collisions}")],
    })
}

// ---------------------------------------------------------------------------
// Special operations on Mùi invariants

/// `Δ_i` as a Milnor `R` (`Δ_0 = 0`).
pub fn delta(i: usize) -> Vec<u32> {
    MilnorIndex::delta(i).r().to_vec()
}

/// Control `R` values: `2Δ_1`, `Δ_1 + Δ_n`, `2Δ_n`.
fn delta_controls(n: usize) -> Vec<Vec<u32>> {
    let mut a = vec![0u32; n];
    a[0] = 2;
    let mut b = vec![0u32; n];
    b[0] = 1;
    b[n - 1] += 1;
    let mut c = vec![0u32; n];
    c[n - 1] = 2;
    let mut out = vec![a, b, c];
    out.dedup();
    out
}

fn signed_sum(
    inv: &Invariants,
    list: &[u32],
    sign: impl Fn(usize) -> u64,
    range: std::ops::RangeInclusive<usize>,
) -> Result<Element> {
    let f = *inv.field();
    let n = inv.rank();
    let mut out = Element::zero(inv.table());
    for t in range {
        let term = &mui_any(inv, &without(list, t))? * &inv.q(n, list[t] as usize)?;
        out.add_scaled(&term, f.sign(sign(t)));
    }
    Ok(out)
}

/// `St^{S',R} M_{n,1..n-1}` by the closed form; `S ⊂ {1..n-1}` increasing,
/// `S'` its complement there.
pub fn rhs_prop43(inv: &Invariants, s: &[u32], r: &[u32]) -> Result<Element> {
    let n = inv.rank();
    let k = s.len();
    let f = *inv.field();
    let mut list = vec![0u32];
    list.extend_from_slice(s);
    let zero = Element::zero(inv.table());
    let Some(i) = delta_position(r, n) else {
        return Ok(zero);
    };
    if i == n {
        let base = (k * (n - k)) as u64;
        return signed_sum(inv, &list, |t| base + t as u64, 0..=k);
    }
    match list.iter().position(|&v| v as usize == i) {
        Some(t) => {
            let e = ((k + 1) * (n - 1 - k) + list[t] as usize + t) as u64;
            Ok(mui_any(inv, &without(&list, t))?.scale(f.sign(e)))
        }
        None => Ok(zero),
    }
}

/// `i` with `R = Δ_i` (`R` of length at most `n`), if any.
fn delta_position(r: &[u32], n: usize) -> Option<usize> {
    if r.len() > n {
        return None;
    }
    if r.is_empty() {
        return Some(0);
    }
    let ones: Vec<usize> = r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i).collect();
    match ones.as_slice() {
        [i] if r[*i] == 1 => Some(i + 1),
        _ => None,
    }
}

fn complement_in(s: &[u32], lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|v| !s.contains(v)).collect()
}

/// `St^{S',R} M_{n,1..n-1}` over every `S ⊂ {1..n-1}` and every
/// `R ∈ {Δ_0..Δ_n}` plus controls.
pub fn verify_prop43(engines: &Engines, n: usize) -> Result<Report> {
    if n < 2 {
        return Err(Error::Precondition("needs n ≥ 2".into()));
    }
    let f = *engines.field();
    let inv = Invariants::new(f, n)?;
    let top: Vec<u32> = (1..n as u32).collect();
    let u = inv.mui(&top)?;
    let q = u.degree().expect("homogeneous");
    let mut cells = Vec::new();
    for k in 0..n {
        for s in subsets(n - 1, k) {
            let s: Vec<u32> = s.into_iter().map(|v| v as u32 + 1).collect();
            for r in (0..=n).map(delta).chain(delta_controls(n)) {
                cells.push((s.clone(), r));
            }
        }
    }
    let records = cells
        .par_iter()
        .map(|(s, r)| {
            let s_prime = complement_in(s, 1, n as u32 - 1);
            let idx = MilnorIndex::new(s_prime, r.clone())?;
            let expected = rhs_prop43(&inv, s, r)?;
            Ok(judge(Case {
                theorem: "p43",
                p: f.p(),
                n,
                input: mui_label(n, &top),
                operation: format!("{idx} (S = {s:?})"),
                degree: Some(q + idx.degree(&f)),
                expected: Expectation::plain(expected),
                values: engines.st(&idx, &u)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        records,
        notes: Vec::new(),
    })
}

/// `St^{∅,R} M_{n,S}` by the closed form. For `s_1 = 0` and `R = Δ_0` the
/// stated value 0 is replaced by `M_{n,S}`, since `St^{∅,Δ_0}` is the
/// identity; the second component says so.
pub fn rhs_prop44(inv: &Invariants, s: &[u32], r: &[u32]) -> Result<(Element, Option<String>)> {
    let n = inv.rank();
    let f = *inv.field();
    let zero = Element::zero(inv.table());
    let Some(i) = delta_position(r, n) else {
        return Ok((zero, None));
    };
    if s.first() == Some(&0) {
        if i == 0 {
            return Ok((
                inv.mui(s)?,
                Some("s_1 = 0, i = 0: St^{∅,Δ_0} is the identity, so the value is M_{n,S}, not 0".into()),
            ));
        }
        return Ok((zero, None));
    }
    let mut list = vec![0u32];
    list.extend_from_slice(s);
    let k = s.len();
    if i == n {
        return Ok((signed_sum(inv, &list, |t| (n + 1 + t) as u64, 0..=k)?, None));
    }
    match list.iter().position(|&v| v as usize == i) {
        Some(t) => {
            let e = list[t] as u64 + t as u64;
            Ok((mui_any(inv, &without(&list, t))?.scale(f.sign(e)), None))
        }
        None => Ok((zero, None)),
    }
}

/// `St^{∅,Δ_i} M_{n,S}` over every Mùi index and `0 ≤ i ≤ n`, plus controls.
pub fn verify_prop44(engines: &Engines, n: usize) -> Result<Report> {
    let f = *engines.field();
    let inv = Invariants::new(f, n)?;
    let mut cells = Vec::new();
    for s in mui_indices(n) {
        for r in (0..=n).map(delta).chain(delta_controls(n)) {
            cells.push((s.clone(), r));
        }
    }
    let records = cells
        .par_iter()
        .map(|(s, r)| {
            let u = inv.mui(s)?;
            let idx = MilnorIndex::new(Vec::new(), r.clone())?;
            let (value, correction) = rhs_prop44(&inv, s, r)?;
            Ok(judge(Case {
                theorem: "p44",
                p: f.p(),
                n,
                input: mui_label(n, s),
                operation: idx.to_string(),
                degree: Some(u.degree().expect("homogeneous") + idx.degree(&f)),
                expected: Expectation {
                    value,
                    correction,
                    remark: None,
                },
                values: engines.st(&idx, &u)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        records,
        notes: Vec::new(),
    })
}

/// Candidate readings of `St^{(s),∅} M_{n,S}`: each is a name and a value
/// (absent when the reading does not apply to this case).
pub fn prop45_readings(inv: &Invariants, s_idx: &[u32], s: usize) -> Result<Vec<(&'static str, Option<Element>)>> {
    let n = inv.rank();
    let f = *inv.field();
    let k = s_idx.len();
    let zero = Element::zero(inv.table());
    let with_zero: Option<Vec<u32>> = (s_idx.first() != Some(&0)).then(|| {
        let mut l = vec![0u32];
        l.extend_from_slice(s_idx);
        l
    });
    if s == n {
        // stated: Σ_{t=1..k} (-1)^{n+k+t+1} M_{S \ s_t} Q_{n,s_t}
        let a = signed_sum(inv, s_idx, |t| (n + k + t + 2) as u64, 0..=k - 1)?;
        // with s_0 = 0 joined to the index and the sum from t = 0
        let b = match &with_zero {
            Some(l) => Some(signed_sum(inv, l, |t| (n + k + t + 1) as u64, 0..=k)?),
            None => None,
        };
        // stated terms with the sign (-1)^{t+1}
        let c = signed_sum(inv, s_idx, |t| (t + 2) as u64, 0..=k - 1)?;
        return Ok(vec![("drop-s0", Some(a)), ("with-s0", b), ("sign-t+1", Some(c))]);
    }
    match s_idx.iter().position(|&v| v as usize == s) {
        Some(pos) => {
            let t = pos + 1;
            let sign = f.sign((k + s + t) as u64);
            let a = mui_any(inv, &without(s_idx, pos))?.scale(sign);
            let b = match &with_zero {
                Some(l) => Some(mui_any(inv, &without(l, t))?.scale(sign)),
                None => None,
            };
            Ok(vec![("drop-s0", Some(a)), ("with-s0", b)])
        }
        None => Ok(vec![("drop-s0", Some(zero))]),
    }
}

/// `St^{(s),∅} M_{n,S}` over every Mùi index and `0 ≤ s ≤ n`. The stated
/// formula names `s_0` without defining it and mixes the summation
/// indices; every reading is evaluated and the report says which ones the
/// engines confirm.
pub fn verify_prop45(engines: &Engines, n: usize) -> Result<Report> {
    let f = *engines.field();
    let inv = Invariants::new(f, n)?;
    let mut cells = Vec::new();
    for s_idx in mui_indices(n) {
        for s in 0..=n {
            cells.push((s_idx.clone(), s));
        }
    }
    let results = cells
        .par_iter()
        .map(|(s_idx, s)| {
            let u = inv.mui(s_idx)?;
            let idx = MilnorIndex::tau(*s as u32);
            let values = engines.st(&idx, &u)?;
            let readings = prop45_readings(&inv, s_idx, *s)?;
            let matching: Vec<&'static str> = readings
                .iter()
                .filter(|(_, v)| v.as_ref().is_some_and(|v| values.iter().all(|(_, w)| w == v)))
                .map(|(name, _)| *name)
                .collect();
            let primary = readings[0].1.clone().expect("primary reading applies");
            let expected = if matching.contains(&"drop-s0") || matching.is_empty() {
                Expectation {
                    value: primary,
                    correction: None,
                    remark: None,
                }
            } else {
                let name = matching[0];
                let value = readings
                    .iter()
                    .find(|(r, _)| *r == name)
                    .and_then(|(_, v)| v.clone())
                    .expect("matched reading has a value");
                Expectation {
                    value,
                    correction: Some(format!("confirmed reading: {name}")),
                    remark: None,
                }
            };
            let mut rec = judge(Case {
                theorem: "p45",
                p: f.p(),
                n,
                input: mui_label(n, s_idx),
                operation: idx.to_string(),
                degree: Some(u.degree().expect("homogeneous") + idx.degree(&f)),
                expected,
                values,
            });
            if readings.len() > 1 {
                let tag = format!("readings matching: {}", if matching.is_empty() { "none".to_string() } else { matching.join(",") });
                rec.note = Some(match rec.note {
                    Some(n) => format!("{n}; {tag}"),
                    None => tag,
                });
            }
            Ok((rec, *s == n, matching))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tally: BTreeMap<(&'static str, bool), usize> = BTreeMap::new();
    let (mut branch_n, mut branch_st) = (0usize, 0usize);
    let mut records = Vec::new();
    for (rec, top, matching) in results {
        let applicable = rec.note.as_deref().is_some_and(|n| n.contains("readings matching"));
        if applicable {
            if top {
                branch_n += 1;
            } else {
                branch_st += 1;
            }
            for name in matching {
                *tally.entry((name, top)).or_insert(0) += 1;
            }
        }
        records.push(rec);
    }
    let mut notes = Vec::new();
    for (label, top, total) in [("s = s_t", false, branch_st), ("s = n", true, branch_n)] {
        let parts: Vec<String> = tally
            .iter()
            .filter(|((_, t), _)| *t == top)
            .map(|((name, _), c)| format!("{name} {c}/{total}"))
            .collect();
        notes.push(format!("branch {label}: {}", if parts.is_empty() { "no matches".into() } else { parts.join(", ") }));
    }
    Ok(Report { records, notes })
}

// ---------------------------------------------------------------------------
// Identities of the power map

fn identity_record(theorem: &'static str, p: u32, n: usize, input: String, operation: String, v: Verdict) -> CaseRecord {
    let (expected, value, verdict, note) = match v {
        Verdict::Verified => ("identity".to_string(), "identity".to_string(), CaseVerdict::Pass, None),
        Verdict::Counterexample { lhs, rhs, witness } => {
            (rhs, lhs, CaseVerdict::Mismatch, Some(format!("first difference {witness}")))
        }
    };
    CaseRecord {
        theorem,
        p,
        n,
        input,
        operation,
        expected,
        engines: vec![EngineValue {
            engine: "power-map",
            value,
        }],
        verdict,
        note,
    }
}

/// The expansion of `d_m^* P_m [e_1..e_n]` over column assignments, for
/// every tuple and every `m` given.
pub fn verify_lemma23_grid(field: FieldConfig, n: usize, tuples: &[Vec<u32>], ms: &[usize]) -> Result<Report> {
    let mut cells = Vec::new();
    for &m in ms {
        for e in tuples {
            cells.push((m, e.clone()));
        }
    }
    let records = cells
        .par_iter()
        .map(|(m, e)| {
            let pm = PowerMap::new(field, n, *m)?;
            let v = pm.verify_lemma23(e)?;
            let spec = BracketSpec::new(n, 0, e.clone())?;
            Ok(identity_record("l23", field.p(), n, bracket_label(&spec), format!("dP m = {m}"), v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        records,
        notes: Vec::new(),
    })
}

/// `d_m^* P_m (x_1 ... x_n)` through multiplicativity against its closed
/// form, for each `m` given.
pub fn verify_prop22iii(field: FieldConfig, n: usize, ms: &[usize]) -> Result<Report> {
    let records = ms
        .par_iter()
        .map(|&m| {
            let pm = PowerMap::new(field, n, m)?;
            let v = pm.verify_product_of_x()?;
            Ok(identity_record("p22", field.p(), n, format!("[{n};]"), format!("dP m = {m}"), v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        records,
        notes: Vec::new(),
    })
}
