//! Exact additive-energy statistics of coefficient multisets.
//!
//! For independent uniform draws A1, A2 from A and B1, B2 from B, let
//! `Z = (A1 - A2)(B1 - B2)`. For a tuple `c` of nonzero integers,
//! `kappa_c(A,B)` is the probability that `c_1 Z_1 + .. + c_s Z_s = 0` over
//! iid copies of Z, equivalently the number `K_c` of index 4s-tuples with a
//! vanishing combination divided by `(n n')^{2s}`. The distinct-index count
//! `K'_c` uses the same normalization.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::scaling::IntegerPair;
use crate::error::{Error, Result};
use crate::multiset::WeightedMultiset;
use crate::rational::Rational;

/// Iteration and support budgets for the energy engines.
#[derive(Debug, Clone)]
pub struct EnergyBudget {
    /// Max index tuples the brute-force count may visit.
    pub max_brute_iterations: u64,
    /// Max atoms any intermediate convolution may hold.
    pub max_convolution_atoms: u64,
}

impl Default for EnergyBudget {
    fn default() -> Self {
        Self {
            max_brute_iterations: 1_000_000_000,
            max_convolution_atoms: 20_000_000,
        }
    }
}

/// A tuple of s >= 2 nonzero integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTuple(Vec<i64>);

impl CoefficientTuple {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidInput(
                "coefficient tuple needs at least two entries".into(),
            ));
        }
        if entries.iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput(
                "coefficient tuple entries must be nonzero".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// An exact law over rational values with probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueDistribution {
    atoms: BTreeMap<Rational, Rational>,
}

impl ValueDistribution {
    pub fn atoms(&self) -> &BTreeMap<Rational, Rational> {
        &self.atoms
    }

    pub fn mass(&self, v: &Rational) -> Rational {
        self.atoms.get(v).cloned().unwrap_or_else(Rational::zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    Convolution,
    Brute,
    BruteDistinct,
}

/// One energy computation: kappa, the raw tuple count it came from, and the
/// method that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyReport {
    pub kappa: Rational,
    /// `K_c` (or `K'_c` for the distinct brute force).
    pub raw_count: Option<BigUint>,
    pub method: EnergyMethod,
    pub s: usize,
    pub c: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct EnergyJson {
    method: EnergyMethod,
    s: usize,
    c: Vec<i64>,
    kappa: String,
    #[serde(rename = "K")]
    k: Option<String>,
}

impl EnergyReport {
    /// Emit `{"method":"convolution","s":2,"c":[1,-1],"kappa":"19/32","K":"152"}`.
    pub fn to_json(&self) -> String {
        let dto = EnergyJson {
            method: self.method,
            s: self.s,
            c: self.c.clone(),
            kappa: self.kappa.to_string(),
            k: self.raw_count.as_ref().map(|k| k.to_string()),
        };
        serde_json::to_string(&dto).expect("serializing plain fields")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: EnergyJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("energy JSON: {e}")))?;
        let kappa = crate::rational::parse_rational(&dto.kappa)?;
        let raw_count = match dto.k {
            Some(k) => Some(
                k.parse::<BigUint>()
                    .map_err(|_| Error::Parse(format!("bad count `{k}`")))?,
            ),
            None => None,
        };
        Ok(Self {
            kappa,
            raw_count,
            method: dto.method,
            s: dto.s,
            c: dto.c,
        })
    }
}

/// Law of one factor as value -> tuple count, over a known total.
fn difference_counts(ms: &WeightedMultiset) -> BTreeMap<Rational, BigUint> {
    let mut out: BTreeMap<Rational, BigUint> = BTreeMap::new();
    for (v1, m1) in ms.entries() {
        for (v2, m2) in ms.entries() {
            let d = v1 - v2;
            *out.entry(d).or_insert_with(BigUint::zero) += BigUint::from(*m1) * BigUint::from(*m2);
        }
    }
    out
}

/// Counts of `Z = (A1 - A2)(B1 - B2)` over the `(n n')^2` index 4-tuples.
fn z_counts(a: &WeightedMultiset, b: &WeightedMultiset) -> BTreeMap<Rational, BigUint> {
    let da = difference_counts(a);
    let db = difference_counts(b);
    let mut out: BTreeMap<Rational, BigUint> = BTreeMap::new();
    for (va, ca) in &da {
        for (vb, cb) in &db {
            *out.entry(va * vb).or_insert_with(BigUint::zero) += ca * cb;
        }
    }
    out
}

/// Exact law of `Z = (A1 - A2)(B1 - B2)`.
pub fn z_distribution(a: &WeightedMultiset, b: &WeightedMultiset) -> ValueDistribution {
    let counts = z_counts(a, b);
    let total: BigUint = counts.values().sum();
    let total = BigInt::from(total);
    let atoms = counts
        .into_iter()
        .map(|(v, c)| (v, Rational::new(BigInt::from(c), total.clone())))
        .collect();
    ValueDistribution { atoms }
}

fn convolve(
    x: &BTreeMap<Rational, BigUint>,
    y: &BTreeMap<Rational, BigUint>,
    budget: u64,
) -> Result<BTreeMap<Rational, BigUint>> {
    if (x.len() as u64).saturating_mul(y.len() as u64) > budget {
        return Err(Error::BudgetExceeded(format!(
            "convolution support would exceed {budget} atoms"
        )));
    }
    let mut out: BTreeMap<Rational, BigUint> = BTreeMap::new();
    for (vx, cx) in x {
        for (vy, cy) in y {
            *out.entry(vx + vy).or_insert_with(BigUint::zero) += cx * cy;
        }
    }
    Ok(out)
}

fn scaled_counts(z: &BTreeMap<Rational, BigUint>, c: i64) -> BTreeMap<Rational, BigUint> {
    let factor = Rational::from_integer(BigInt::from(c));
    z.iter().map(|(v, cnt)| (v * &factor, cnt.clone())).collect()
}

/// Exact `kappa_c` as the mass at zero of the law of `c_1 Z_1 + .. + c_s Z_s`,
/// by iterated exact convolution of tuple counts. The final factor is paired
/// off against the accumulated law instead of being materialized.
pub fn kappa_convolution(
    a: &WeightedMultiset,
    b: &WeightedMultiset,
    c: &CoefficientTuple,
    budget: &EnergyBudget,
) -> Result<EnergyReport> {
    let s = c.len();
    let z = z_counts(a, b);
    let mut factors: Vec<BTreeMap<Rational, BigUint>> = c
        .entries()
        .iter()
        .map(|&ck| scaled_counts(&z, ck))
        .collect();
    let last = factors.pop().expect("s >= 2");
    // fold smallest supports first to contain the intermediate growth
    factors.sort_by_key(|f| f.len());
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = convolve(&acc, f, budget.max_convolution_atoms)?;
    }
    let mut hits = BigUint::zero();
    // pair the small map against the large one
    let (small, large) = if acc.len() <= last.len() {
        (&acc, &last)
    } else {
        (&last, &acc)
    };
    for (v, cnt) in small {
        if let Some(other) = large.get(&(-v)) {
            hits += cnt * other;
        }
    }
    let nn = BigUint::from(a.size()) * BigUint::from(b.size());
    let denom = nn.pow(2 * s as u32);
    let kappa = Rational::new(BigInt::from(hits.clone()), BigInt::from(denom));
    Ok(EnergyReport {
        kappa,
        raw_count: Some(hits),
        method: EnergyMethod::Convolution,
        s,
        c: c.entries().to_vec(),
    })
}

/// Exact `K_c` (or `K'_c` with `distinct`) by direct enumeration of index
/// tuples, normalized by `(n n')^{2s}` in both cases.
pub fn kappa_bruteforce(
    a: &WeightedMultiset,
    b: &WeightedMultiset,
    c: &CoefficientTuple,
    distinct: bool,
    budget: &EnergyBudget,
) -> Result<EnergyReport> {
    let s = c.len();
    let n = a.size();
    let np = b.size();
    if distinct && (n > 64 || np > 64) {
        return Err(Error::InvalidInput(
            "distinct-index enumeration supports sizes up to 64".into(),
        ));
    }
    let tuples = (n as u128 * np as u128)
        .checked_pow(2 * s as u32)
        .ok_or_else(|| Error::BudgetExceeded("tuple count overflows u128".into()))?;
    if tuples > budget.max_brute_iterations as u128 {
        return Err(Error::BudgetExceeded(format!(
            "enumeration needs {tuples} tuples, budget is {}",
            budget.max_brute_iterations
        )));
    }

    let scaled = IntegerPair::from_multisets(a, b);
    let (av, bv) = (scaled.a, scaled.b);
    // overflow guard for the i128 partial sums
    let max_abs = |vs: &[BigInt]| vs.iter().map(|v| v.abs()).max().unwrap_or_else(BigInt::zero);
    let max_c = c.entries().iter().map(|x| x.unsigned_abs()).max().unwrap();
    let bound = BigInt::from(4u8)
        * BigInt::from(s as u64)
        * BigInt::from(max_c)
        * max_abs(&av)
        * max_abs(&bv);
    if bound >= BigInt::from(i128::MAX / 2) {
        return Err(Error::Overflow(
            "values too large for brute-force energy counting".into(),
        ));
    }
    let av: Vec<i128> = av.iter().map(|v| v.to_i128().expect("bound checked")).collect();
    let bv: Vec<i128> = bv.iter().map(|v| v.to_i128().expect("bound checked")).collect();

    let mut count: u128 = 0;
    enumerate_tuples(
        c.entries(),
        &av,
        &bv,
        distinct,
        0,
        0,
        0,
        0,
        &mut count,
    );

    let denom = (BigUint::from(n) * BigUint::from(np)).pow(2 * s as u32);
    let kappa = Rational::new(BigInt::from(count), BigInt::from(denom));
    Ok(EnergyReport {
        kappa,
        raw_count: Some(BigUint::from(count)),
        method: if distinct {
            EnergyMethod::BruteDistinct
        } else {
            EnergyMethod::Brute
        },
        s,
        c: c.entries().to_vec(),
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_tuples(
    c: &[i64],
    av: &[i128],
    bv: &[i128],
    distinct: bool,
    k: usize,
    partial: i128,
    used_a: u64,
    used_b: u64,
    count: &mut u128,
) {
    if k == c.len() {
        if partial == 0 {
            *count += 1;
        }
        return;
    }
    let ck = c[k] as i128;
    for ia in 0..av.len() {
        if distinct && used_a & (1 << ia) != 0 {
            continue;
        }
        for ja in 0..av.len() {
            if distinct && (ja == ia || used_a & (1 << ja) != 0) {
                continue;
            }
            let da = av[ia] - av[ja];
            let next_a = if distinct {
                used_a | (1 << ia) | (1 << ja)
            } else {
                used_a
            };
            for ib in 0..bv.len() {
                if distinct && used_b & (1 << ib) != 0 {
                    continue;
                }
                for jb in 0..bv.len() {
                    if distinct && (jb == ib || used_b & (1 << jb) != 0) {
                        continue;
                    }
                    let db = bv[ib] - bv[jb];
                    let next_b = if distinct {
                        used_b | (1 << ib) | (1 << jb)
                    } else {
                        used_b
                    };
                    enumerate_tuples(
                        c,
                        av,
                        bv,
                        distinct,
                        k + 1,
                        partial + ck * da * db,
                        next_a,
                        next_b,
                        count,
                    );
                }
            }
        }
    }
}

/// Diagnostic for the collision-energy upper bound on duplicate-free sets:
/// `kappa_{(1,-1)} * |A||B| / (ln|A| + ln|B|)`, the implied constant.
#[derive(Debug, Clone)]
pub struct RnrReport {
    pub kappa: Rational,
    pub ratio: f64,
    pub size_a: u64,
    pub size_b: u64,
}

pub fn rnr_ratio(
    a: &WeightedMultiset,
    b: &WeightedMultiset,
    budget: &EnergyBudget,
) -> Result<RnrReport> {
    if !a.is_set() || !b.is_set() {
        return Err(Error::InvalidInput(
            "collision-energy ratio requires duplicate-free inputs".into(),
        ));
    }
    if a.size() < 2 || b.size() < 2 {
        return Err(Error::InvalidInput(
            "collision-energy ratio requires sizes >= 2".into(),
        ));
    }
    let c = CoefficientTuple::new(vec![1, -1]).expect("static tuple");
    let report = kappa_convolution(a, b, &c, budget)?;
    let na = a.size() as f64;
    let nb = b.size() as f64;
    let ratio =
        crate::rational::rational_to_f64(&report.kappa) * na * nb / (na.ln() + nb.ln());
    Ok(RnrReport {
        kappa: report.kappa,
        ratio,
        size_a: a.size(),
        size_b: b.size(),
    })
}
