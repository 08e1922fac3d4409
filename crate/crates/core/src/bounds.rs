//! Bound formulas for the max point mass of permutation sums, and the
//! verdict harness that compares them against computed Q.
//!
//! Two of the bounds hide unspecified asymptotic constants; those are never
//! pass/fail unless the caller pins a constant, only reported with their
//! observed/bound ratio so trajectories can be inspected across a scan.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::{exact_distribution_auto, EngineCaps};
use crate::error::{Error, Result};
use crate::multiset::WeightedMultiset;
use crate::rational::{rational_to_f64, Rational};
use crate::sampler::{estimate_q, SampleConfig};

/// Bound families selectable by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Universal bound 1/(2*ceil(n/2)+1) for a set A against non-constant B.
    Pawlowski,
    /// Diversity bound C/(n*sqrt(M(B))), constant-free; reported only.
    Diversity,
    /// Product-diversity bound C*sqrt(n)(ln n)^2/sqrt(M(A)M(B)); reported only.
    ProductDiversity,
    /// Lower-bound diagnostic sqrt(n)/sqrt(M(A)M(B)) for integer staircases.
    TightnessLower,
    /// Conjectured extremal constant (12/sqrt(2*pi)) * n^{-5/2} for sets.
    ExtremalConjecture,
}

/// One requested bound check. A pinned constant turns the asymptotic bounds
/// into pass/fail comparisons; otherwise they are reported-only with C = 1.
#[derive(Debug, Clone)]
pub struct BoundSpec {
    pub kind: BoundKind,
    /// When set, the asymptotic bounds compare against C * formula.
    pub constant: Option<Rational>,
    /// Exponent slack in the product-diversity precondition M(A)M(B) >= n^{3+eps}.
    pub epsilon: Rational,
}

impl BoundSpec {
    pub fn new(kind: BoundKind) -> Self {
        Self {
            kind,
            constant: None,
            epsilon: Rational::new(1.into(), 10.into()),
        }
    }
}

/// Output-side bound identity; the stated universal bound and the bound
/// derived from the underlying permutation count are reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Pawlowski,
    PawlowskiCount,
    Diversity,
    ProductDiversity,
    TightnessLower,
    ExtremalConjecture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Satisfied,
    Violated,
    NotApplicable,
    ReportedOnly,
}

/// One bound comparison against the observed max point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictRecord {
    pub kind: VerdictKind,
    /// Decimal rendering of the bound; absent when not applicable.
    pub bound_value: Option<f64>,
    /// Exact rational bound where the formula is exact.
    pub bound_exact: Option<Rational>,
    pub observed_q: Rational,
    /// observed / bound.
    pub ratio: Option<f64>,
    pub status: VerdictStatus,
    pub note: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct VerdictJson {
    kind: VerdictKind,
    bound_value: Option<f64>,
    bound_exact: Option<String>,
    observed_q: String,
    ratio: Option<f64>,
    status: VerdictStatus,
    note: Option<String>,
}

impl VerdictRecord {
    pub fn to_json(&self) -> String {
        let dto = VerdictJson {
            kind: self.kind,
            bound_value: self.bound_value,
            bound_exact: self.bound_exact.as_ref().map(|b| b.to_string()),
            observed_q: self.observed_q.to_string(),
            ratio: self.ratio,
            status: self.status,
            note: self.note.clone(),
        };
        serde_json::to_string(&dto).expect("serializing plain fields")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: VerdictJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("verdict JSON: {e}")))?;
        Ok(Self {
            kind: dto.kind,
            bound_value: dto.bound_value,
            bound_exact: dto
                .bound_exact
                .map(|b| crate::rational::parse_rational(&b))
                .transpose()?,
            observed_q: crate::rational::parse_rational(&dto.observed_q)?,
            ratio: dto.ratio,
            status: dto.status,
            note: dto.note,
        })
    }
}

/// Exact `1/(2*ceil(n/2) + 1)` for n >= 3.
pub fn pawlowski_bound(n: u64) -> Result<Rational> {
    if n < 3 {
        return Err(Error::InvalidInput("universal bound requires n >= 3".into()));
    }
    Ok(Rational::new(BigInt::one(), BigInt::from(2 * n.div_ceil(2) + 1)))
}

/// The bound implied by the maximum hyperplane point count: `(n-1)!/n! = 1/n`
/// for odd n >= 3 and `n*(n-2)!/n! = 1/(n-1)` for even n >= 4.
pub fn pawlowski_count_bound(n: u64) -> Result<Rational> {
    if n < 3 {
        return Err(Error::InvalidInput("count bound requires n >= 3".into()));
    }
    let denom = if n % 2 == 1 { n } else { n - 1 };
    Ok(Rational::new(BigInt::one(), BigInt::from(denom)))
}

/// `C / (n * sqrt(M(B)))`, the diversity bound with its subpolynomial factor
/// stripped; callers surface the observed/bound ratio instead of asserting.
pub fn diversity_bound(n: u64, mb: &BigUint, constant: &Rational) -> Result<f64> {
    if mb.is_zero() {
        return Err(Error::NoDiversity);
    }
    require_positive_constant(constant)?;
    let mb_f = mb.to_f64().unwrap_or(f64::INFINITY);
    Ok(rational_to_f64(constant) / (n as f64 * mb_f.sqrt()))
}

/// `C * sqrt(n) * (ln n)^2 / sqrt(M(A) M(B))`.
pub fn product_diversity_bound(n: u64, ma: &BigUint, mb: &BigUint, constant: &Rational) -> Result<f64> {
    if ma.is_zero() || mb.is_zero() {
        return Err(Error::NoDiversity);
    }
    require_positive_constant(constant)?;
    let prod = (ma * mb).to_f64().unwrap_or(f64::INFINITY);
    let ln_n = (n as f64).ln();
    Ok(rational_to_f64(constant) * (n as f64).sqrt() * ln_n * ln_n / prod.sqrt())
}

/// Exact check of the precondition `M(A) M(B) >= n^(3+eps)` for rational
/// `eps = p/q > 0`, via `(M(A)M(B))^q >= n^(3q+p)` in big integers.
pub fn product_diversity_applicable(n: u64, ma: &BigUint, mb: &BigUint, epsilon: &Rational) -> Result<bool> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let p: u32 = epsilon
        .numer()
        .to_u32()
        .ok_or_else(|| Error::InvalidInput("epsilon numerator too large".into()))?;
    let q: u32 = epsilon
        .denom()
        .to_u32()
        .ok_or_else(|| Error::InvalidInput("epsilon denominator too large".into()))?;
    let lhs = (ma * mb).pow(q);
    let rhs = BigUint::from(n).pow(3 * q + p);
    Ok(lhs >= rhs)
}

/// `sqrt(n) / sqrt(M(A) M(B))`, the scale Q cannot drop below for integer
/// staircase inputs (up to a constant).
pub fn tightness_lower(n: u64, ma: &BigUint, mb: &BigUint) -> Result<f64> {
    if ma.is_zero() || mb.is_zero() {
        return Err(Error::NoDiversity);
    }
    let prod = (ma * mb).to_f64().unwrap_or(f64::INFINITY);
    Ok((n as f64).sqrt() / prod.sqrt())
}

/// `q * n^{5/2} * sqrt(2 pi) / 12`: the ratio of q to the conjectured
/// extremal value; hovers near 1 when the grid case is extremal.
pub fn conjecture_ratio(n: u64, q: &Rational) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput("conjecture ratio requires n >= 2".into()));
    }
    if !q.is_positive() || q > &Rational::one() {
        return Err(Error::InvalidInput("q must lie in (0, 1]".into()));
    }
    let n_f = n as f64;
    Ok(rational_to_f64(q) * n_f.powf(2.5) * (2.0 * std::f64::consts::PI).sqrt() / 12.0)
}

fn require_positive_constant(c: &Rational) -> Result<()> {
    if !c.is_positive() {
        return Err(Error::InvalidInput("constant C must be positive".into()));
    }
    Ok(())
}

/// How verify obtains the observed Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMethod {
    Exact,
    MonteCarlo,
}

/// Engine knobs for one verify call.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub caps: EngineCaps,
    pub sample: SampleConfig,
}

/// Evaluate the requested bounds against the observed max point mass.
///
/// The universal bound expands into two records: the stated formula and the
/// count-derived one. These disagree on small inputs, so a violation of the
/// stated bound alongside a satisfied count bound is flagged, not treated as
/// an engine error.
pub fn verify(
    a: &WeightedMultiset,
    b: &WeightedMultiset,
    specs: &[BoundSpec],
    method: QMethod,
    opts: &VerifyOptions,
) -> Result<Vec<VerdictRecord>> {
    if a.size() != b.size() {
        return Err(Error::SizeMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    let n = a.size();
    let observed = match method {
        QMethod::Exact => exact_distribution_auto(a, b, &opts.caps)?
            .max_point_mass()
            .q,
        QMethod::MonteCarlo => estimate_q(a, b, &opts.sample)?.q_hat,
    };
    let ma = a.diversity();
    let mb = b.diversity();

    let mut records = Vec::new();
    for spec in specs {
        let constant = spec.constant.clone().unwrap_or_else(Rational::one);
        let pinned = spec.constant.is_some();
        match spec.kind {
            BoundKind::Pawlowski => {
                let precondition_note = if n < 3 {
                    Some("requires n >= 3".to_string())
                } else if !a.is_set() {
                    Some("requires A to be a set".to_string())
                } else if b.is_constant() {
                    Some("coefficients all equal; bound requires them not all the same".to_string())
                } else {
                    None
                };
                match precondition_note {
                    Some(note) => {
                        for kind in [VerdictKind::Pawlowski, VerdictKind::PawlowskiCount] {
                            records.push(not_applicable(kind, &observed, note.clone()));
                        }
                    }
                    None => {
                        let stated = pawlowski_bound(n)?;
                        let counted = pawlowski_count_bound(n)?;
                        let stated_violated = observed > stated;
                        let note = if stated_violated && observed <= counted {
                            Some(
                                "stated bound exceeded while the count-derived bound holds; \
                                 the two formulas disagree on this input"
                                    .to_string(),
                            )
                        } else {
                            None
                        };
                        records.push(exact_record(
                            VerdictKind::Pawlowski,
                            stated,
                            &observed,
                            note,
                        ));
                        records.push(exact_record(
                            VerdictKind::PawlowskiCount,
                            counted,
                            &observed,
                            None,
                        ));
                    }
                }
            }
            BoundKind::Diversity => {
                if !a.is_set() {
                    records.push(not_applicable(
                        VerdictKind::Diversity,
                        &observed,
                        "requires A to be a set".into(),
                    ));
                } else if mb.is_zero() {
                    records.push(not_applicable(
                        VerdictKind::Diversity,
                        &observed,
                        "M(B) = 0".into(),
                    ));
                } else {
                    let value = diversity_bound(n, &mb, &constant)?;
                    records.push(asymptotic_record(
                        VerdictKind::Diversity,
                        value,
                        &observed,
                        pinned,
                    ));
                }
            }
            BoundKind::ProductDiversity => {
                if ma.is_zero() || mb.is_zero() {
                    records.push(not_applicable(
                        VerdictKind::ProductDiversity,
                        &observed,
                        "M(A) M(B) = 0".into(),
                    ));
                } else if !product_diversity_applicable(n, &ma, &mb, &spec.epsilon)? {
                    records.push(not_applicable(
                        VerdictKind::ProductDiversity,
                        &observed,
                        format!(
                            "M(A) M(B) = {} below n^(3+eps) with eps = {}",
                            &ma * &mb,
                            spec.epsilon
                        ),
                    ));
                } else {
                    let value = product_diversity_bound(n, &ma, &mb, &constant)?;
                    records.push(asymptotic_record(
                        VerdictKind::ProductDiversity,
                        value,
                        &observed,
                        pinned,
                    ));
                }
            }
            BoundKind::TightnessLower => {
                if ma.is_zero() || mb.is_zero() {
                    records.push(not_applicable(
                        VerdictKind::TightnessLower,
                        &observed,
                        "M(A) M(B) = 0".into(),
                    ));
                } else {
                    let value = tightness_lower(n, &ma, &mb)?;
                    records.push(VerdictRecord {
                        kind: VerdictKind::TightnessLower,
                        bound_value: Some(value),
                        bound_exact: None,
                        observed_q: observed.clone(),
                        ratio: Some(rational_to_f64(&observed) / value),
                        status: VerdictStatus::ReportedOnly,
                        note: None,
                    });
                }
            }
            BoundKind::ExtremalConjecture => {
                if n < 2 || !a.is_set() || !b.is_set() {
                    records.push(not_applicable(
                        VerdictKind::ExtremalConjecture,
                        &observed,
                        "requires distinct-value sets with n >= 2".into(),
                    ));
                } else {
                    let ratio = conjecture_ratio(n, &observed)?;
                    let value = rational_to_f64(&observed) / ratio;
                    records.push(VerdictRecord {
                        kind: VerdictKind::ExtremalConjecture,
                        bound_value: Some(value),
                        bound_exact: None,
                        observed_q: observed.clone(),
                        ratio: Some(ratio),
                        status: VerdictStatus::ReportedOnly,
                        note: None,
                    });
                }
            }
        }
    }
    Ok(records)
}

fn not_applicable(kind: VerdictKind, observed: &Rational, note: String) -> VerdictRecord {
    VerdictRecord {
        kind,
        bound_value: None,
        bound_exact: None,
        observed_q: observed.clone(),
        ratio: None,
        status: VerdictStatus::NotApplicable,
        note: Some(note),
    }
}

fn exact_record(
    kind: VerdictKind,
    bound: Rational,
    observed: &Rational,
    note: Option<String>,
) -> VerdictRecord {
    let status = if observed <= &bound {
        VerdictStatus::Satisfied
    } else {
        VerdictStatus::Violated
    };
    VerdictRecord {
        kind,
        bound_value: Some(rational_to_f64(&bound)),
        bound_exact: Some(bound.clone()),
        observed_q: observed.clone(),
        ratio: Some(rational_to_f64(&(observed / &bound))),
        status,
        note,
    }
}

fn asymptotic_record(
    kind: VerdictKind,
    value: f64,
    observed: &Rational,
    pinned: bool,
) -> VerdictRecord {
    let q_f = rational_to_f64(observed);
    let status = if pinned {
        if q_f <= value {
            VerdictStatus::Satisfied
        } else {
            VerdictStatus::Violated
        }
    } else {
        VerdictStatus::ReportedOnly
    };
    VerdictRecord {
        kind,
        bound_value: Some(value),
        bound_exact: None,
        observed_q: observed.clone(),
        ratio: Some(q_f / value),
        status,
        note: None,
    }
}

/// Fixed column order of the verdict table.
pub const VERDICT_CSV_HEADER: &str =
    "n,family,M_A,M_B,Q_exact,bound_kind,bound_value,ratio,status";

fn kind_label(kind: VerdictKind) -> &'static str {
    match kind {
        VerdictKind::Pawlowski => "pawlowski",
        VerdictKind::PawlowskiCount => "pawlowski-count",
        VerdictKind::Diversity => "diversity",
        VerdictKind::ProductDiversity => "product-diversity",
        VerdictKind::TightnessLower => "tightness-lower",
        VerdictKind::ExtremalConjecture => "extremal-conjecture",
    }
}

fn status_label(status: VerdictStatus) -> &'static str {
    match status {
        VerdictStatus::Satisfied => "satisfied",
        VerdictStatus::Violated => "violated",
        VerdictStatus::NotApplicable => "not-applicable",
        VerdictStatus::ReportedOnly => "reported-only",
    }
}

/// One CSV row; exact rational values are always quoted strings.
pub fn verdict_csv_row(
    n: u64,
    family: &str,
    ma: &BigUint,
    mb: &BigUint,
    record: &VerdictRecord,
) -> String {
    let bound = record
        .bound_value
        .map(|v| v.to_string())
        .unwrap_or_default();
    let ratio = record.ratio.map(|v| v.to_string()).unwrap_or_default();
    format!(
        "{},{},\"{}\",\"{}\",\"{}\",{},{},{},{}",
        n,
        family,
        ma,
        mb,
        record.observed_q,
        kind_label(record.kind),
        bound,
        ratio,
        status_label(record.status)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiset::{counterexample_pair, staircase, uniform_grid};
    use crate::rational::{parse_rational, rational_from_i64};

    fn ms(vals: &[i64]) -> WeightedMultiset {
        let v: Vec<Rational> = vals.iter().map(|&x| rational_from_i64(x)).collect();
        WeightedMultiset::from_values(&v).unwrap()
    }

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn universal_bound_values() {
        assert_eq!(pawlowski_bound(3).unwrap(), r("1/5"));
        assert_eq!(pawlowski_bound(4).unwrap(), r("1/5"));
        assert_eq!(pawlowski_bound(10).unwrap(), r("1/11"));
        assert!(pawlowski_bound(2).is_err());
    }

    #[test]
    fn count_bound_values() {
        assert_eq!(pawlowski_count_bound(3).unwrap(), r("1/3"));
        assert_eq!(pawlowski_count_bound(4).unwrap(), r("1/3"));
        assert_eq!(pawlowski_count_bound(5).unwrap(), r("1/5"));
        assert_eq!(pawlowski_count_bound(6).unwrap(), r("1/5"));
    }

    #[test]
    fn product_diversity_bound_value() {
        // n = 16, both sides fully distinct: M = 15*16*31/6 = 1240
        let m = BigUint::from(1240u32);
        let v = product_diversity_bound(16, &m, &m, &Rational::one()).unwrap();
        assert!((v - 0.024_798).abs() < 1e-5, "got {v}");
        assert!(product_diversity_bound(16, &BigUint::zero(), &m, &Rational::one()).is_err());
        assert!(product_diversity_bound(16, &m, &m, &Rational::zero()).is_err());
    }

    #[test]
    fn product_diversity_precondition_is_exact() {
        let eps = r("1/10");
        // M(A)M(B) = n^3 exactly fails the strict n^{3+eps} requirement
        let m64 = BigUint::from(64u32); // 64*64 = 4096 = 16^3
        assert!(!product_diversity_applicable(16, &m64, &m64, &eps).unwrap());
        // a comfortably larger product passes
        let big = BigUint::from(1240u32);
        assert!(product_diversity_applicable(16, &big, &big, &eps).unwrap());
        assert!(product_diversity_applicable(16, &big, &big, &r("-1")).is_err());
    }

    #[test]
    fn tightness_value_on_staircase_profile() {
        let m = BigUint::from(14u32);
        let v = tightness_lower(6, &m, &m).unwrap();
        assert!((v - 6f64.sqrt() / 14.0).abs() < 1e-12);
        assert!((v - 0.1750).abs() < 1e-4);
        assert!(tightness_lower(6, &BigUint::zero(), &m).is_err());
        let m14 = BigUint::from(14u32);
        let v4 = tightness_lower(4, &m14, &m14).unwrap();
        assert!((v4 - 2.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn conjecture_ratio_values() {
        let ratio = conjecture_ratio(3, &r("1/3")).unwrap();
        assert!((ratio - 1.0853).abs() < 1e-3, "got {ratio}");
        assert!(conjecture_ratio(1, &Rational::one()).is_err());
        assert!(conjecture_ratio(3, &r("0")).is_err());
        assert!(conjecture_ratio(3, &r("2")).is_err());
    }

    #[test]
    fn verify_reports_the_bound_discrepancy() {
        // observed Q = 1/3 exceeds the stated 1/5 but meets the count bound
        let a = ms(&[1, 2, 3]);
        let b = ms(&[0, 0, 1]);
        let recs = verify(
            &a,
            &b,
            &[BoundSpec::new(BoundKind::Pawlowski)],
            QMethod::Exact,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].kind, VerdictKind::Pawlowski);
        assert_eq!(recs[0].bound_exact, Some(r("1/5")));
        assert_eq!(recs[0].observed_q, r("1/3"));
        assert_eq!(recs[0].status, VerdictStatus::Violated);
        assert!(recs[0].note.is_some());
        assert_eq!(recs[1].kind, VerdictKind::PawlowskiCount);
        assert_eq!(recs[1].bound_exact, Some(r("1/3")));
        assert_eq!(recs[1].status, VerdictStatus::Satisfied);
    }

    #[test]
    fn verify_counterexample_family_is_out_of_scope_for_mamb() {
        let (a, b) = counterexample_pair(6).unwrap();
        let recs = verify(
            &a,
            &b,
            &[BoundSpec::new(BoundKind::ProductDiversity)],
            QMethod::Exact,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].status, VerdictStatus::NotApplicable);
        assert_eq!(recs[0].observed_q, r("1/2"));
    }

    #[test]
    fn verify_constant_b_marks_everything_not_applicable() {
        let a = ms(&[1, 2, 3]);
        let b = ms(&[4, 4, 4]);
        let specs: Vec<BoundSpec> = [
            BoundKind::Pawlowski,
            BoundKind::Diversity,
            BoundKind::ProductDiversity,
            BoundKind::TightnessLower,
            BoundKind::ExtremalConjecture,
        ]
        .into_iter()
        .map(BoundSpec::new)
        .collect();
        let recs = verify(&a, &b, &specs, QMethod::Exact, &VerifyOptions::default()).unwrap();
        assert!(recs
            .iter()
            .all(|rec| rec.status == VerdictStatus::NotApplicable));
        assert!(recs[0].note.as_deref().unwrap().contains("not all the same"));
        assert_eq!(recs[0].observed_q, Rational::one());
    }

    #[test]
    fn verify_grid_reports_conjecture_trajectory() {
        let g = uniform_grid(5).unwrap();
        let recs = verify(
            &g,
            &g,
            &[BoundSpec::new(BoundKind::ExtremalConjecture)],
            QMethod::Exact,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(recs[0].status, VerdictStatus::ReportedOnly);
        let ratio = recs[0].ratio.unwrap();
        assert!(ratio > 0.5 && ratio < 2.0, "ratio {ratio}");
    }

    #[test]
    fn pinned_constant_turns_asymptotics_into_verdicts() {
        let s = staircase(&[1, 1, 1, 1, 1, 1, 1, 1]).unwrap();
        let mut spec = BoundSpec::new(BoundKind::ProductDiversity);
        spec.constant = Some(rational_from_i64(1000));
        let recs = verify(&s, &s, &[spec], QMethod::Exact, &VerifyOptions::default()).unwrap();
        assert_eq!(recs[0].status, VerdictStatus::Satisfied);
    }

    #[test]
    fn csv_rows_quote_exact_values() {
        let a = ms(&[1, 2, 3]);
        let b = ms(&[0, 0, 1]);
        let recs = verify(
            &a,
            &b,
            &[BoundSpec::new(BoundKind::Pawlowski)],
            QMethod::Exact,
            &VerifyOptions::default(),
        )
        .unwrap();
        let row = verdict_csv_row(3, "custom", &a.diversity(), &b.diversity(), &recs[0]);
        assert_eq!(
            row,
            "3,custom,\"5\",\"1\",\"1/3\",pawlowski,0.2,1.6666666666666667,violated"
        );
    }

    #[test]
    fn verdict_json_roundtrip() {
        let a = ms(&[1, 2, 3]);
        let b = ms(&[0, 0, 1]);
        let recs = verify(
            &a,
            &b,
            &[BoundSpec::new(BoundKind::Pawlowski)],
            QMethod::Exact,
            &VerifyOptions::default(),
        )
        .unwrap();
        for rec in &recs {
            let text = rec.to_json();
            assert_eq!(&VerdictRecord::from_json(&text).unwrap(), rec);
        }
    }

    #[test]
    fn verify_by_sampling_uses_q_hat() {
        let a = ms(&[1, 2, 3]);
        let opts = VerifyOptions {
            caps: EngineCaps::default(),
            sample: SampleConfig {
                seed: 7,
                samples: 20_000,
                workers: 2,
            },
        };
        let recs = verify(
            &a,
            &a,
            &[BoundSpec::new(BoundKind::Pawlowski)],
            QMethod::MonteCarlo,
            &opts,
        )
        .unwrap();
        let q = rational_to_f64(&recs[0].observed_q);
        assert!((q - 1.0 / 3.0).abs() < 0.02, "q_hat {q}");
    }
}
