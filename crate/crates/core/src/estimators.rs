use crate::consensus::{consensus_fuzzy_1d, DEFAULT_MEMBERSHIP_THRESHOLD};
use crate::error::{Error, Result};
use crate::measurement::{common_dim, Measurement};

/// Consistency factor making the MAD comparable to a normal standard
/// deviation.
pub const MAD_CONSISTENCY: f64 = 0.6745;

/// IRLS stopping tolerance and iteration cap.
pub const IRLS_TOLERANCE: f64 = 1e-10;
pub const IRLS_MAX_ITERATIONS: usize = 200;

fn ensure_sample(sample: &[f64]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("sample values must be finite"));
    }
    Ok(())
}

pub fn mean(sample: &[f64]) -> Result<f64> {
    ensure_sample(sample)?;
    Ok(sample.iter().sum::<f64>() / sample.len() as f64)
}

pub fn median(sample: &[f64]) -> Result<f64> {
    ensure_sample(sample)?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        Ok(sorted[n / 2])
    } else {
        Ok(0.5 * (sorted[n / 2 - 1] + sorted[n / 2]))
    }
}

/// Median absolute deviation from the median, scaled by 1/0.6745.
///
/// Fails with [`Error::DegenerateScale`] when the MAD is zero (more than
/// half the sample identical); M-estimation then falls back to the median.
pub fn mad_scale(sample: &[f64]) -> Result<f64> {
    let center = median(sample)?;
    let deviations: Vec<f64> = sample.iter().map(|x| (x - center).abs()).collect();
    let mad = median(&deviations)?;
    if mad == 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok(mad / MAD_CONSISTENCY)
}

/// An M-estimator family with its tuning constants.
///
/// The defaults are the classical published constants. The Andrews weight
/// follows the sin(u·π/c)/(u·π/c) convention with the window |u| ≤ c (the
/// literature also uses sin(u/c) with window c·π; pick constants
/// accordingly).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psi {
    Huber { k: f64 },
    TukeyBiweight { c: f64 },
    Hampel { a: f64, b: f64, c: f64 },
    AndrewsSine { c: f64 },
}

impl Psi {
    pub fn huber() -> Psi {
        Psi::Huber { k: 1.339 }
    }

    pub fn tukey() -> Psi {
        Psi::TukeyBiweight { c: 4.685 }
    }

    pub fn hampel() -> Psi {
        Psi::Hampel {
            a: 1.7,
            b: 3.4,
            c: 8.5,
        }
    }

    pub fn andrews() -> Psi {
        Psi::AndrewsSine {
            c: 1.339 * std::f64::consts::PI,
        }
    }

    /// The four families with default constants, in report order.
    pub fn all_defaults() -> Vec<Psi> {
        vec![Psi::huber(), Psi::tukey(), Psi::hampel(), Psi::andrews()]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Psi::Huber { .. } => "huber",
            Psi::TukeyBiweight { .. } => "tukey",
            Psi::Hampel { .. } => "hampel",
            Psi::AndrewsSine { .. } => "andrews",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Psi::Huber { k } => k > 0.0 && k.is_finite(),
            Psi::TukeyBiweight { c } => c > 0.0 && c.is_finite(),
            Psi::Hampel { a, b, c } => {
                a > 0.0 && a <= b && b <= c && c.is_finite()
            }
            Psi::AndrewsSine { c } => c > 0.0 && c.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "invalid tuning constants for {self:?}"
            )))
        }
    }

    /// IRLS weight w(u) = ψ(u)/u, with the limit value 1 at u = 0.
    pub fn weight(&self, u: f64) -> f64 {
        let au = u.abs();
        match *self {
            Psi::Huber { k } => {
                if au <= k {
                    1.0
                } else {
                    k / au
                }
            }
            Psi::TukeyBiweight { c } => {
                if au <= c {
                    let r = u / c;
                    let t = 1.0 - r * r;
                    t * t
                } else {
                    0.0
                }
            }
            Psi::Hampel { a, b, c } => {
                if au <= a {
                    1.0
                } else if au <= b {
                    a / au
                } else if au <= c {
                    (a / au) * ((c - au) / (c - b))
                } else {
                    0.0
                }
            }
            Psi::AndrewsSine { c } => {
                if au <= c {
                    if u == 0.0 {
                        1.0
                    } else {
                        let t = u * std::f64::consts::PI / c;
                        t.sin() / t
                    }
                } else {
                    0.0
                }
            }
        }
    }
}

/// Why an M-estimate fell back to the plain median.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MFallback {
    DegenerateScale,
    AllWeightsZero,
}

/// Result of one IRLS M-estimation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub fallback: Option<MFallback>,
}

/// Location M-estimate by iteratively reweighted averaging.
///
/// Scale is the MAD-based estimate held fixed across iterations; the start
/// point is the median. A degenerate scale or an all-zero weight sum falls
/// back to the median with a marker instead of failing, and hitting the
/// iteration cap is reported via `converged`, never silently.
pub fn m_estimate(sample: &[f64], psi: &Psi) -> Result<MEstimate> {
    ensure_sample(sample)?;
    psi.validate()?;
    let start = median(sample)?;
    let scale = match mad_scale(sample) {
        Ok(s) => s,
        Err(Error::DegenerateScale) => {
            return Ok(MEstimate {
                value: start,
                iterations: 0,
                converged: true,
                fallback: Some(MFallback::DegenerateScale),
            });
        }
        Err(e) => return Err(e),
    };

    let mut t = start;
    for iteration in 1..=IRLS_MAX_ITERATIONS {
        let mut weight_sum = 0.0;
        let mut weighted_sum = 0.0;
        for &x in sample {
            let w = psi.weight((x - t) / scale);
            weight_sum += w;
            weighted_sum += w * x;
        }
        if weight_sum == 0.0 {
            return Ok(MEstimate {
                value: start,
                iterations: iteration,
                converged: false,
                fallback: Some(MFallback::AllWeightsZero),
            });
        }
        let next = weighted_sum / weight_sum;
        let delta = (next - t).abs();
        t = next;
        if delta <= IRLS_TOLERANCE {
            return Ok(MEstimate {
                value: t,
                iterations: iteration,
                converged: true,
                fallback: None,
            });
        }
    }
    Ok(MEstimate {
        value: t,
        iterations: IRLS_MAX_ITERATIONS,
        converged: false,
        fallback: None,
    })
}

/// One before/after comparison row.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub estimator: String,
    pub before: f64,
    pub after: f64,
    pub deviation: f64,
}

/// All estimator rows for one variable, plus any warnings raised while
/// computing them.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableReport {
    pub variable: String,
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub variables: Vec<VariableReport>,
}

fn variable_name(dim: usize, total: usize) -> String {
    if total <= 2 {
        ["x", "y"][dim].to_string()
    } else {
        format!("x{}", dim + 1)
    }
}

fn row(estimator: &str, before: f64, after: f64) -> ReportRow {
    ReportRow {
        estimator: estimator.to_string(),
        before,
        after,
        deviation: (after - before).abs(),
    }
}

/// Before/after comparison of all estimators on a clean and a contaminated
/// sample, one block per variable (dimension).
///
/// The consensus row uses the fuzzy point estimate, so it needs the
/// measurement errors; the classical rows use the raw values.
pub fn robustness_report(
    clean: &[Measurement],
    contaminated: &[Measurement],
    psis: &[Psi],
) -> Result<EstimatorReport> {
    let d = common_dim(clean)?;
    let d_after = common_dim(contaminated)?;
    if d != d_after {
        return Err(Error::invalid(format!(
            "clean data has d = {d} but contaminated data has d = {d_after}"
        )));
    }

    let mut variables = Vec::with_capacity(d);
    for k in 0..d {
        let clean_k: Vec<Measurement> =
            clean.iter().map(|m| m.project(k)).collect::<Result<_>>()?;
        let cont_k: Vec<Measurement> = contaminated
            .iter()
            .map(|m| m.project(k))
            .collect::<Result<_>>()?;
        let clean_values: Vec<f64> = clean_k.iter().map(|m| m.value(0)).collect();
        let cont_values: Vec<f64> = cont_k.iter().map(|m| m.value(0)).collect();

        let name = variable_name(k, d);
        let mut rows = Vec::new();
        let mut warnings = Vec::new();

        let before = consensus_fuzzy_1d(&clean_k, DEFAULT_MEMBERSHIP_THRESHOLD)?;
        let after = consensus_fuzzy_1d(&cont_k, DEFAULT_MEMBERSHIP_THRESHOLD)?;
        rows.push(row(
            "consensus",
            before.point_estimate[0],
            after.point_estimate[0],
        ));

        rows.push(row("mean", mean(&clean_values)?, mean(&cont_values)?));
        rows.push(row("median", median(&clean_values)?, median(&cont_values)?));

        for psi in psis {
            let b = m_estimate(&clean_values, psi)?;
            let a = m_estimate(&cont_values, psi)?;
            for (tag, est) in [("before", &b), ("after", &a)] {
                if let Some(f) = est.fallback {
                    warnings.push(format!(
                        "{name}/{}: {tag} fell back to the median ({f:?})",
                        psi.name()
                    ));
                } else if !est.converged {
                    warnings.push(format!(
                        "{name}/{}: {tag} hit the iteration cap without converging",
                        psi.name()
                    ));
                }
            }
            rows.push(row(psi.name(), b.value, a.value));
        }

        variables.push(VariableReport {
            variable: name,
            rows,
            warnings,
        });
    }
    Ok(EstimatorReport { variables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const X_CLEAN: [f64; 3] = [1.9, 2.0, 2.1];
    const X_CONT: [f64; 6] = [1.9, 2.0, 2.1, 4.0, 6.0, 7.0];
    const Y_CLEAN: [f64; 3] = [0.9, 1.0, 1.1];
    const Y_CONT: [f64; 6] = [0.9, 1.0, 1.1, 3.0, 5.0, 4.0];

    #[test]
    fn mean_values() {
        assert_eq!(mean(&X_CLEAN).unwrap(), 2.0);
        assert_abs_diff_eq!(mean(&X_CONT).unwrap(), 23.0 / 6.0, epsilon = 1e-15);
        assert_eq!(mean(&[7.5]).unwrap(), 7.5);
        assert!(mean(&[]).is_err());
        assert!(mean(&[f64::NAN]).is_err());
    }

    #[test]
    fn median_values() {
        assert_eq!(median(&X_CLEAN).unwrap(), 2.0);
        assert_abs_diff_eq!(median(&X_CONT).unwrap(), 3.05, epsilon = 1e-12);
        assert_abs_diff_eq!(median(&Y_CONT).unwrap(), 2.05, epsilon = 1e-12);
        assert_eq!(median(&[4.0]).unwrap(), 4.0);
        assert!(median(&[]).is_err());
    }

    #[test]
    fn mad_scale_values() {
        assert_abs_diff_eq!(
            mad_scale(&X_CLEAN).unwrap(),
            0.1 / MAD_CONSISTENCY,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            mad_scale(&X_CONT).unwrap(),
            1.10 / MAD_CONSISTENCY,
            epsilon = 1e-12
        );
        match mad_scale(&[3.0, 3.0, 3.0]) {
            Err(Error::DegenerateScale) => {}
            other => panic!("expected DegenerateScale, got {other:?}"),
        }
    }

    #[test]
    fn psi_weights() {
        let huber = Psi::huber();
        assert_eq!(huber.weight(0.0), 1.0);
        assert_eq!(huber.weight(1.0), 1.0);
        assert_abs_diff_eq!(huber.weight(2.678), 0.5, epsilon = 1e-12);

        let tukey = Psi::tukey();
        assert_eq!(tukey.weight(0.0), 1.0);
        assert_eq!(tukey.weight(5.0), 0.0);
        assert_abs_diff_eq!(tukey.weight(4.685), 0.0, epsilon = 1e-12);

        let hampel = Psi::hampel();
        assert_eq!(hampel.weight(1.0), 1.0);
        assert_abs_diff_eq!(hampel.weight(3.4), 0.5, epsilon = 1e-12);
        assert_eq!(hampel.weight(8.5), 0.0);
        assert_eq!(hampel.weight(9.0), 0.0);

        let andrews = Psi::andrews();
        assert_eq!(andrews.weight(0.0), 1.0);
        let c = 1.339 * std::f64::consts::PI;
        assert_abs_diff_eq!(andrews.weight(c), 0.0, epsilon = 1e-12);
        assert_eq!(andrews.weight(c + 0.1), 0.0);
    }

    #[test]
    fn psi_validation() {
        assert!(Psi::Huber { k: 0.0 }.validate().is_err());
        assert!(Psi::Hampel { a: 2.0, b: 1.0, c: 3.0 }.validate().is_err());
        assert!(Psi::AndrewsSine { c: f64::NAN }.validate().is_err());
        for psi in Psi::all_defaults() {
            assert!(psi.validate().is_ok());
        }
    }

    #[test]
    fn clean_samples_give_exact_centers() {
        for psi in Psi::all_defaults() {
            let est = m_estimate(&X_CLEAN, &psi).unwrap();
            assert!(est.converged);
            assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-8);
            let est = m_estimate(&Y_CLEAN, &psi).unwrap();
            assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-8);
            let est = m_estimate(&[1.0, 2.0, 3.0], &psi).unwrap();
            assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn huber_with_huge_k_is_the_mean() {
        let psi = Psi::Huber { k: 1e6 };
        let sample = [1.0, 2.0, 7.0, -3.0, 0.5];
        let est = m_estimate(&sample, &psi).unwrap();
        assert_abs_diff_eq!(est.value, mean(&sample).unwrap(), epsilon = 1e-12);
        assert!(est.converged);
    }

    #[test]
    fn degenerate_scale_falls_back_to_median() {
        let est = m_estimate(&[5.0, 5.0, 5.0, 9.0], &Psi::huber()).unwrap();
        assert_eq!(est.value, 5.0);
        assert_eq!(est.fallback, Some(MFallback::DegenerateScale));
    }

    #[test]
    fn equivariance() {
        use proptest::prelude::*;
        proptest!(|(alpha in 0.1..4.0f64, c in -10.0..10.0f64, seed in 0u64..50)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..12);
            let sample: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mapped: Vec<f64> = sample.iter().map(|x| alpha * x + c).collect();
            for psi in Psi::all_defaults() {
                let base = m_estimate(&sample, &psi).unwrap();
                let moved = m_estimate(&mapped, &psi).unwrap();
                prop_assert!(
                    (moved.value - (alpha * base.value + c)).abs() <= 1e-8,
                    "{}: {} vs {}",
                    psi.name(),
                    moved.value,
                    alpha * base.value + c
                );
            }
        });
    }

    #[test]
    fn symmetric_samples_return_the_center() {
        use proptest::prelude::*;
        proptest!(|(center in -10.0..10.0f64, spread in 0.1..3.0f64, pairs in 1usize..6)| {
            let mut sample = vec![center];
            for i in 1..=pairs {
                let offset = spread * i as f64;
                sample.push(center - offset);
                sample.push(center + offset);
            }
            prop_assert!((mean(&sample).unwrap() - center).abs() <= 1e-8);
            prop_assert!((median(&sample).unwrap() - center).abs() <= 1e-8);
            for psi in Psi::all_defaults() {
                let est = m_estimate(&sample, &psi).unwrap();
                prop_assert!(
                    (est.value - center).abs() <= 1e-8,
                    "{}: {} vs {center}",
                    psi.name(),
                    est.value
                );
            }
        });
    }

    #[test]
    fn report_reproduces_basic_estimator_table() {
        let clean: Vec<Measurement> = X_CLEAN
            .iter()
            .zip(&Y_CLEAN)
            .enumerate()
            .map(|(i, (&x, &y))| {
                Measurement::new(format!("S{}", i + 1), vec![x, y], vec![0.2, 0.2], 1.0).unwrap()
            })
            .collect();
        let contaminated: Vec<Measurement> = X_CONT
            .iter()
            .zip(&Y_CONT)
            .enumerate()
            .map(|(i, (&x, &y))| {
                Measurement::new(format!("S{}", i + 1), vec![x, y], vec![0.2, 0.2], 1.0).unwrap()
            })
            .collect();
        let report = robustness_report(&clean, &contaminated, &Psi::all_defaults()).unwrap();
        assert_eq!(report.variables.len(), 2);

        let x = &report.variables[0];
        assert_eq!(x.variable, "x");
        let by_name = |rows: &[ReportRow], n: &str| -> ReportRow {
            rows.iter().find(|r| r.estimator == n).unwrap().clone()
        };
        let consensus = by_name(&x.rows, "consensus");
        assert_eq!(consensus.deviation, 0.0);
        assert_abs_diff_eq!(consensus.before, 2.0, epsilon = 1e-9);
        let mean_row = by_name(&x.rows, "mean");
        assert_abs_diff_eq!(mean_row.after, 23.0 / 6.0, epsilon = 1e-12);
        let median_row = by_name(&x.rows, "median");
        assert_abs_diff_eq!(median_row.deviation, 1.05, epsilon = 1e-12);

        let y = &report.variables[1];
        assert_eq!(y.variable, "y");
        let consensus = by_name(&y.rows, "consensus");
        assert_eq!(consensus.deviation, 0.0);
        assert_abs_diff_eq!(consensus.before, 1.0, epsilon = 1e-9);
        let median_row = by_name(&y.rows, "median");
        assert_abs_diff_eq!(median_row.deviation, 1.05, epsilon = 1e-12);
    }

    #[test]
    fn identical_inputs_give_zero_deviations() {
        let ms: Vec<Measurement> = X_CLEAN
            .iter()
            .enumerate()
            .map(|(i, &x)| Measurement::scalar(format!("m{i}"), x, 0.2).unwrap())
            .collect();
        let report = robustness_report(&ms, &ms, &Psi::all_defaults()).unwrap();
        for var in &report.variables {
            for row in &var.rows {
                assert_eq!(row.deviation, 0.0, "{} deviates", row.estimator);
            }
        }
    }

    #[test]
    fn report_validates_dimensions() {
        let a = Measurement::scalar("a", 1.0, 0.1).unwrap();
        let b = Measurement::new("b", vec![1.0, 2.0], vec![0.1, 0.1], 1.0).unwrap();
        assert!(robustness_report(&[a.clone()], &[b], &[]).is_err());
        assert!(robustness_report(&[], &[a], &[]).is_err());
    }
}
