//! The sign relating coefficient extraction from the Milnor coaction to the
//! operations defined by the power-map expansion.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::invariants::Invariants;
use crate::milnor::{enumerate_indices, MilnorIndex};
use crate::power_map::PowerMap;
use crate::steenrod::coaction_coefficient;

/// Prime, degree bound and coefficient rank of the calibration run.
pub const CALIBRATION_PRIME: u32 = 3;
pub const CALIBRATION_DEGREE: u64 = 20;
pub const CALIBRATION_M: usize = 2;

/// The parities the sign is allowed to depend on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignKey {
    pub t: u8,
    pub q: u8,
    pub r: u8,
}

impl SignKey {
    pub fn of(idx: &MilnorIndex, q: u64) -> Self {
        SignKey {
            t: (idx.t() % 2) as u8,
            q: (q % 2) as u8,
            r: (idx.sign_exponent() % 2) as u8,
        }
    }
}

/// One comparison: on the degree-`q` input `label`, the operation `idx`
/// from the power map equals `sign` times the raw coaction coefficient.
#[derive(Clone, Debug)]
pub struct Observation {
    pub label: String,
    pub idx: MilnorIndex,
    pub q: u64,
    pub sign: i8,
}

/// The calibrated sign table.
#[derive(Clone, Debug)]
pub struct Calibration {
    signs: BTreeMap<SignKey, i8>,
    observations: Vec<Observation>,
}

impl Calibration {
    /// `κ = ±1` for `idx` applied in degree `q`.
    pub fn kappa(&self, idx: &MilnorIndex, q: u64) -> Result<i8> {
        let key = SignKey::of(idx, q);
        match self.signs.get(&key) {
            Some(&s) => Ok(s),
            None => Err(Error::Calibration(format!(
                "no calibration data for {idx} in degree {q} (key {key:?})"
            ))),
        }
    }

    pub fn signs(&self) -> &BTreeMap<SignKey, i8> {
        &self.signs
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// Whether every calibrated sign is `+1`.
    pub fn is_trivial(&self) -> bool {
        self.signs.values().all(|&s| s == 1)
    }
}

/// The calibration inputs over rank 2 at the calibration prime.
pub fn calibration_suite(field: FieldConfig) -> Result<Vec<(String, Element)>> {
    let inv = Invariants::new(field, 2)?;
    Ok(vec![
        ("x1".into(), inv.x(1)),
        ("y1".into(), inv.y(1)),
        ("x1*x2".into(), &inv.x(1) * &inv.x(2)),
        ("L_2".into(), inv.l_top(2)),
        ("M_{2,1}".into(), inv.mui(&[1])?),
        ("M_{2,0}".into(), inv.mui(&[0])?),
    ])
}

/// `scalar` with `oracle = scalar * raw`, if one exists.
fn proportionality(oracle: &Element, raw: &Element) -> Option<u32> {
    let f = *raw.field();
    let (m, c) = raw.terms().next()?;
    let scalar = f.mul(oracle.coefficient(m), f.inv(c)?);
    (raw.scale(scalar) == *oracle).then_some(scalar)
}

/// Compares the two engines over the calibration suite and collects one
/// observation per nonzero value.
pub fn observe(field: FieldConfig) -> Result<Vec<Observation>> {
    let mut out = Vec::new();
    let pm = PowerMap::new(field, 2, CALIBRATION_M)?;
    for (label, u) in calibration_suite(field)? {
        let q = u.degree().expect("homogeneous");
        let values = pm.extract_all(&u)?;
        for idx in enumerate_indices(&field, None, Some(CALIBRATION_DEGREE), Some(CALIBRATION_M))? {
            let raw = coaction_coefficient(&idx, &u)?;
            let oracle = match values.get(&idx) {
                Some(v) => v.clone(),
                None => Element::zero(u.table()),
            };
            if raw.is_zero() && oracle.is_zero() {
                continue;
            }
            let sign = match proportionality(&oracle, &raw) {
                Some(1) => 1,
                Some(s) if s == field.p() - 1 => -1,
                _ => {
                    return Err(Error::Calibration(format!(
                        "{idx} on {label}: power map gives {oracle}, coaction gives {raw}"
                    )))
                }
            };
            out.push(Observation {
                label: label.clone(),
                idx,
                q,
                sign,
            });
        }
    }
    Ok(out)
}

/// Builds the sign table from the calibration observations; conflicting
/// observations for one key are an error.
pub fn calibrate() -> Result<Calibration> {
    let field = FieldConfig::new(CALIBRATION_PRIME)?;
    let observations = observe(field)?;
    let mut signs: BTreeMap<SignKey, i8> = BTreeMap::new();
    for obs in &observations {
        let key = SignKey::of(&obs.idx, obs.q);
        match signs.get(&key) {
            Some(&s) if s != obs.sign => {
                return Err(Error::Calibration(format!(
                    "sign conflict at {key:?}: {} on {} gives {}, earlier {}",
                    obs.idx, obs.label, obs.sign, s
                )))
            }
            _ => {
                signs.insert(key, obs.sign);
            }
        }
    }
    Ok(Calibration {
        signs,
        observations,
    })
}

static GLOBAL: OnceLock<std::result::Result<Arc<Calibration>, String>> = OnceLock::new();

/// The calibration, computed on first use. The table is independent of the
/// prime it is applied at.
pub fn global() -> Result<Arc<Calibration>> {
    GLOBAL
        .get_or_init(|| calibrate().map(Arc::new).map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Calibration)
}

/// The calibration used for operations over `field`.
pub fn for_field(_field: FieldConfig) -> Result<Arc<Calibration>> {
    global()
}
