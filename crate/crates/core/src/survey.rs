use crate::consensus::{classify, consensus_fuzzy_1d, ConsensusResult};
use crate::error::{Error, Result};
use crate::estimators::{mean, median, ReportRow};
use crate::measurement::Measurement;

/// A grade-matrix survey: respondents × questions, grades within
/// `[scale_min, scale_max]`, missing answers allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyTable {
    respondents: Vec<String>,
    questions: Vec<String>,
    grades: Vec<Vec<Option<i64>>>,
    scale_min: i64,
    scale_max: i64,
}

impl SurveyTable {
    pub fn new(
        respondents: Vec<String>,
        questions: Vec<String>,
        grades: Vec<Vec<Option<i64>>>,
        scale_min: i64,
        scale_max: i64,
    ) -> Result<SurveyTable> {
        if respondents.is_empty() || questions.is_empty() {
            return Err(Error::invalid(
                "a survey needs at least one respondent and one question",
            ));
        }
        if scale_min > scale_max {
            return Err(Error::invalid(format!(
                "scale bounds out of order: {scale_min} > {scale_max}"
            )));
        }
        if grades.len() != respondents.len() {
            return Err(Error::invalid(format!(
                "{} grade rows for {} respondents",
                grades.len(),
                respondents.len()
            )));
        }
        for (i, r) in respondents.iter().enumerate() {
            if respondents[..i].contains(r) {
                return Err(Error::invalid(format!("duplicate respondent label {r:?}")));
            }
        }
        for (i, q) in questions.iter().enumerate() {
            if questions[..i].contains(q) {
                return Err(Error::invalid(format!("duplicate question label {q:?}")));
            }
        }
        for (r, row) in grades.iter().enumerate() {
            if row.len() != questions.len() {
                return Err(Error::invalid(format!(
                    "respondent {:?} has {} grades for {} questions",
                    respondents[r],
                    row.len(),
                    questions.len()
                )));
            }
            for (q, grade) in row.iter().enumerate() {
                if let Some(g) = grade {
                    if *g < scale_min || *g > scale_max {
                        return Err(Error::invalid(format!(
                            "grade {} of respondent {:?} on {:?} is outside the scale [{}, {}]",
                            g, respondents[r], questions[q], scale_min, scale_max
                        )));
                    }
                }
            }
        }
        Ok(SurveyTable {
            respondents,
            questions,
            grades,
            scale_min,
            scale_max,
        })
    }

    pub fn respondents(&self) -> &[String] {
        &self.respondents
    }

    pub fn questions(&self) -> &[String] {
        &self.questions
    }

    pub fn grade(&self, respondent: usize, question: usize) -> Option<i64> {
        self.grades[respondent][question]
    }

    pub fn scale(&self) -> (i64, i64) {
        (self.scale_min, self.scale_max)
    }

    /// Number of questions a respondent actually answered.
    pub fn answered(&self, respondent: usize) -> usize {
        self.grades[respondent].iter().flatten().count()
    }

    /// The table without the given respondents.
    pub fn without(&self, removed: &[String]) -> Result<SurveyTable> {
        let keep: Vec<usize> = (0..self.respondents.len())
            .filter(|&r| !removed.contains(&self.respondents[r]))
            .collect();
        if keep.is_empty() {
            return Err(Error::invalid("removing every respondent leaves no survey"));
        }
        SurveyTable::new(
            keep.iter().map(|&r| self.respondents[r].clone()).collect(),
            self.questions.clone(),
            keep.iter().map(|&r| self.grades[r].clone()).collect(),
            self.scale_min,
            self.scale_max,
        )
    }
}

/// Analysis options; the defaults treat adjacent grades on a 1–7 scale as
/// overlapping opinions and flag respondents who are outliers on a majority
/// of their answered questions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyOptions {
    pub grade_error: f64,
    pub flag_threshold: f64,
    pub min_answers: usize,
    pub min_depth: f64,
    pub membership_threshold: f64,
}

impl Default for SurveyOptions {
    fn default() -> SurveyOptions {
        SurveyOptions {
            grade_error: 1.0,
            flag_threshold: 0.5,
            min_answers: 3,
            min_depth: crate::consensus::DEFAULT_MIN_DEPTH,
            membership_threshold: crate::consensus::DEFAULT_MEMBERSHIP_THRESHOLD,
        }
    }
}

/// Verdict on one respondent.
#[derive(Debug, Clone, PartialEq)]
pub struct RespondentVerdict {
    pub respondent: String,
    pub out_of_consensus_fraction: f64,
    pub answered: usize,
    pub flagged: bool,
}

/// Consensus of one question; `None` when nobody answered it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionConsensus {
    pub question: String,
    pub result: Option<ConsensusResult>,
    pub no_consensus: bool,
}

/// Full survey analysis: per-question consensus before and after removing
/// flagged respondents, plus the verdicts themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyAnalysis {
    pub before: Vec<QuestionConsensus>,
    pub after: Vec<QuestionConsensus>,
    pub verdicts: Vec<RespondentVerdict>,
}

fn question_measurements(
    table: &SurveyTable,
    question: usize,
    grade_error: f64,
) -> Result<Vec<Measurement>> {
    let mut ms = Vec::new();
    for (r, label) in table.respondents.iter().enumerate() {
        if let Some(g) = table.grades[r][question] {
            ms.push(Measurement::scalar(label.clone(), g as f64, grade_error)?);
        }
    }
    Ok(ms)
}

fn question_consensus(
    table: &SurveyTable,
    question: usize,
    options: &SurveyOptions,
) -> Result<(QuestionConsensus, Vec<String>)> {
    let ms = question_measurements(table, question, options.grade_error)?;
    if ms.is_empty() {
        return Ok((
            QuestionConsensus {
                question: table.questions[question].clone(),
                result: None,
                no_consensus: true,
            },
            Vec::new(),
        ));
    }
    let result = consensus_fuzzy_1d(&ms, options.membership_threshold)?;
    let classification = classify(&ms, &result, options.min_depth);
    Ok((
        QuestionConsensus {
            question: table.questions[question].clone(),
            result: Some(result),
            no_consensus: classification.no_consensus,
        },
        classification.erroneous,
    ))
}

/// Runs the per-question consensus, flags incompetent respondents, removes
/// them, and reruns the consensus on the remainder.
pub fn analyze_survey(table: &SurveyTable, options: &SurveyOptions) -> Result<SurveyAnalysis> {
    if !(options.grade_error.is_finite() && options.grade_error >= 0.0) {
        return Err(Error::invalid(format!(
            "grade error must be finite and non-negative, got {}",
            options.grade_error
        )));
    }
    if !(0.0..=1.0).contains(&options.flag_threshold) {
        return Err(Error::invalid(format!(
            "flag threshold must be in [0, 1], got {}",
            options.flag_threshold
        )));
    }

    let q_count = table.questions.len();
    let mut before = Vec::with_capacity(q_count);
    let mut out_counts = vec![0usize; table.respondents.len()];
    for q in 0..q_count {
        let (qc, erroneous) = question_consensus(table, q, options)?;
        for label in &erroneous {
            let r = table
                .respondents
                .iter()
                .position(|x| x == label)
                .expect("outlier label comes from the table");
            out_counts[r] += 1;
        }
        before.push(qc);
    }

    let mut verdicts = Vec::with_capacity(table.respondents.len());
    for (r, label) in table.respondents.iter().enumerate() {
        let answered = table.answered(r);
        let fraction = if answered > 0 {
            out_counts[r] as f64 / answered as f64
        } else {
            0.0
        };
        let flagged = fraction > options.flag_threshold && answered >= options.min_answers;
        verdicts.push(RespondentVerdict {
            respondent: label.clone(),
            out_of_consensus_fraction: fraction,
            answered,
            flagged,
        });
    }

    let removed: Vec<String> = verdicts
        .iter()
        .filter(|v| v.flagged)
        .map(|v| v.respondent.clone())
        .collect();
    let after = if removed.is_empty() {
        before.clone()
    } else {
        let reduced = table.without(&removed)?;
        let mut after = Vec::with_capacity(q_count);
        for q in 0..q_count {
            let (qc, _) = question_consensus(&reduced, q, options)?;
            after.push(qc);
        }
        after
    };

    Ok(SurveyAnalysis {
        before,
        after,
        verdicts,
    })
}

/// Per-question estimator comparison between two surveys.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionComparison {
    pub question: String,
    pub rows: Vec<ReportRow>,
}

/// Comparison of consensus/mean/median stability across two versions of a
/// survey (e.g. with and without contaminating respondents).
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyComparison {
    pub questions: Vec<QuestionComparison>,
    /// Maximum deviation per estimator over all questions, in row order
    /// (consensus, mean, median).
    pub max_deviation: Vec<(String, f64)>,
}

pub fn survey_estimator_comparison(
    base: &SurveyTable,
    contaminated: &SurveyTable,
    options: &SurveyOptions,
) -> Result<SurveyComparison> {
    if base.questions != contaminated.questions {
        return Err(Error::invalid(
            "the two surveys must have the same questions",
        ));
    }
    let estimators = ["consensus", "mean", "median"];
    let mut questions = Vec::with_capacity(base.questions.len());
    let mut max_dev = vec![0f64; estimators.len()];
    for q in 0..base.questions.len() {
        let before_ms = question_measurements(base, q, options.grade_error)?;
        let after_ms = question_measurements(contaminated, q, options.grade_error)?;
        if before_ms.is_empty() || after_ms.is_empty() {
            return Err(Error::invalid(format!(
                "question {:?} has no answers in one of the surveys",
                base.questions[q]
            )));
        }
        let before_values: Vec<f64> = before_ms.iter().map(|m| m.value(0)).collect();
        let after_values: Vec<f64> = after_ms.iter().map(|m| m.value(0)).collect();

        let consensus_before = consensus_fuzzy_1d(&before_ms, options.membership_threshold)?;
        let consensus_after = consensus_fuzzy_1d(&after_ms, options.membership_threshold)?;
        let pairs = [
            (
                consensus_before.point_estimate[0],
                consensus_after.point_estimate[0],
            ),
            (mean(&before_values)?, mean(&after_values)?),
            (median(&before_values)?, median(&after_values)?),
        ];
        let mut rows = Vec::with_capacity(estimators.len());
        for (i, (&name, &(b, a))) in estimators.iter().zip(&pairs).enumerate() {
            let deviation = (a - b).abs();
            max_dev[i] = max_dev[i].max(deviation);
            rows.push(ReportRow {
                estimator: name.to_string(),
                before: b,
                after: a,
                deviation,
            });
        }
        questions.push(QuestionComparison {
            question: base.questions[q].clone(),
            rows,
        });
    }
    Ok(SurveyComparison {
        questions,
        max_deviation: estimators
            .iter()
            .map(|s| s.to_string())
            .zip(max_dev)
            .collect(),
    })
}
