use super::geometry::Vec3;
use crate::error::{Error, Result};

/// Whether per-vertex values are densities or integrated over dual cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Pointwise,
    Integrated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    pub values: Vec<T>,
    pub measure: Measure,
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<Vec3>;

impl<T> Field<T>
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Div<f64, Output = T>,
{
    pub fn pointwise(values: Vec<T>) -> Self {
        Field { values, measure: Measure::Pointwise }
    }

    pub fn integrated(values: Vec<T>) -> Self {
        Field { values, measure: Measure::Integrated }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Converts to pointwise values by dividing by the dual area.
    pub fn to_pointwise(&self, dual_area: &[f64]) -> Result<Self> {
        self.check_len(dual_area)?;
        Ok(match self.measure {
            Measure::Pointwise => self.clone(),
            Measure::Integrated => {
                Self::pointwise(self.values.iter().zip(dual_area).map(|(&v, &a)| v / a).collect())
            }
        })
    }

    /// Converts to integrated values by multiplying by the dual area.
    pub fn to_integrated(&self, dual_area: &[f64]) -> Result<Self> {
        self.check_len(dual_area)?;
        Ok(match self.measure {
            Measure::Integrated => self.clone(),
            Measure::Pointwise => {
                Self::integrated(self.values.iter().zip(dual_area).map(|(&v, &a)| v * a).collect())
            }
        })
    }

    fn check_len(&self, other: &[f64]) -> Result<()> {
        if self.values.len() != other.len() {
            return Err(Error::LengthMismatch(self.values.len(), other.len()));
        }
        Ok(())
    }
}
