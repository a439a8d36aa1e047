use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::trapezoid::Trapezoid;

/// One identified d-dimensional measurement: a value and a non-negative
/// error per dimension, plus a positive weight (multiplicity).
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    id: String,
    values: Vec<f64>,
    errors: Vec<f64>,
    weight: f64,
}

impl Measurement {
    pub fn new(
        id: impl Into<String>,
        values: Vec<f64>,
        errors: Vec<f64>,
        weight: f64,
    ) -> Result<Measurement> {
        let id = id.into();
        if values.is_empty() {
            return Err(Error::invalid(format!(
                "measurement {id:?} must have at least one dimension"
            )));
        }
        if values.len() != errors.len() {
            return Err(Error::invalid(format!(
                "measurement {id:?} has {} values but {} errors",
                values.len(),
                errors.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "measurement {id:?} has a non-finite value"
            )));
        }
        if errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::invalid(format!(
                "measurement {id:?} has a negative or non-finite error"
            )));
        }
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::invalid(format!(
                "measurement {id:?} has non-positive weight {weight}"
            )));
        }
        Ok(Measurement {
            id,
            values,
            errors,
            weight,
        })
    }

    /// Convenience constructor for the common one-dimensional, unit-weight case.
    pub fn scalar(id: impl Into<String>, value: f64, error: f64) -> Result<Measurement> {
        Measurement::new(id, vec![value], vec![error], 1.0)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn value(&self, dim: usize) -> f64 {
        self.values[dim]
    }

    pub fn error(&self, dim: usize) -> f64 {
        self.errors[dim]
    }

    /// The membership function of one coordinate (default ramp = error).
    pub fn trapezoid(&self, dim: usize) -> Result<Trapezoid> {
        Trapezoid::from_value_error(self.values[dim], self.errors[dim])
    }

    /// Core interval of one coordinate: value ± error.
    pub fn core(&self, dim: usize) -> Result<Interval> {
        let v = self.values[dim];
        let e = self.errors[dim];
        Interval::new(v - e, v + e)
    }

    /// Projection onto a single dimension, keeping id and weight.
    pub fn project(&self, dim: usize) -> Result<Measurement> {
        if dim >= self.dim() {
            return Err(Error::invalid(format!(
                "dimension {dim} out of range for measurement {:?} (d = {})",
                self.id,
                self.dim()
            )));
        }
        Measurement::new(
            self.id.clone(),
            vec![self.values[dim]],
            vec![self.errors[dim]],
            self.weight,
        )
    }
}

/// Checks that all measurements share one dimension and returns it.
pub fn common_dim(measurements: &[Measurement]) -> Result<usize> {
    let first = measurements
        .first()
        .ok_or_else(|| Error::invalid("empty measurement list"))?;
    let d = first.dim();
    for m in measurements {
        if m.dim() != d {
            return Err(Error::invalid(format!(
                "mixed dimensions: measurement {:?} has d = {} but {:?} has d = {}",
                first.id(),
                d,
                m.id(),
                m.dim()
            )));
        }
    }
    Ok(d)
}
