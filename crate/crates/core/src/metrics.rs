//! Point-forecast error metrics: MSE, MAE, RMSE and R².

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport<T> {
    pub mse: T,
    pub mae: T,
    pub rmse: T,
    /// `None` when the actual series is constant and R² is undefined.
    pub r2: Option<T>,
    pub n: usize,
}

impl<T: Scalar> MetricsReport<T> {
    pub const CSV_HEADER: &'static str = "kernel_name,mse,mae,rmse,r2,n";

    /// One table row: `kernel_name,mse,mae,rmse,r2,n`. An undefined R² is
    /// written as `undefined`.
    pub fn to_csv_row(&self, kernel_name: &str) -> String {
        let r2 = match self.r2 {
            Some(v) => v.to_string(),
            None => "undefined".to_string(),
        };
        format!("{kernel_name},{},{},{},{r2},{}", self.mse, self.mae, self.rmse, self.n)
    }
}

/// Population (`1/n`) metrics of `predicted` against `actual`.
pub fn compute_metrics<T: Scalar>(actual: &[T], predicted: &[T]) -> Result<MetricsReport<T>> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    if actual.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let n = T::from_usize(actual.len()).unwrap();
    let mut ss_res = T::zero();
    let mut abs_sum = T::zero();
    for (&y, &yhat) in actual.iter().zip(predicted) {
        let e = y - yhat;
        ss_res = ss_res + e * e;
        abs_sum = abs_sum + e.abs();
    }
    let mean = mean(actual);
    let ss_tot = actual.iter().fold(T::zero(), |acc, &y| acc + (y - mean) * (y - mean));
    let mse = ss_res / n;
    let r2 = if ss_tot > T::zero() {
        Some(T::one() - ss_res / ss_tot)
    } else {
        None
    };
    Ok(MetricsReport {
        mse,
        mae: abs_sum / n,
        rmse: mse.sqrt(),
        r2,
        n: actual.len(),
    })
}

/// Root mean squared error.
pub fn rmse<T: Scalar>(actual: &[T], predicted: &[T]) -> Result<T> {
    Ok(compute_metrics(actual, predicted)?.rmse)
}

/// Arithmetic mean, accumulated left to right.
pub fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, &x| acc + x) / T::from_usize(xs.len()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_fit() {
        let y = [1.0, 4.0, 2.0, 8.0];
        let m = compute_metrics(&y, &y).unwrap();
        assert_eq!((m.mse, m.mae, m.rmse, m.r2), (0.0, 0.0, 0.0, Some(1.0)));
    }

    #[test]
    fn hand_computed() {
        let m = compute_metrics(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(m.mse, 2.0 / 3.0);
        assert_eq!(m.mae, 2.0 / 3.0);
        assert_eq!(m.rmse, (2.0f64 / 3.0).sqrt());
        assert_eq!(m.r2, Some(0.0));
        assert_eq!(m.n, 3);
    }

    #[test]
    fn constant_actuals_flag_r2() {
        let m = compute_metrics(&[5.0, 5.0, 5.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(m.mse, 0.0);
        assert_eq!(m.r2, None);
        assert_eq!(m.to_csv_row("ES"), "ES,0,0,0,undefined,3");
    }

    #[test]
    fn errors() {
        assert!(matches!(
            compute_metrics(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(matches!(compute_metrics::<f64>(&[], &[]), Err(Error::EmptyInput)));
        assert!(matches!(
            compute_metrics(&[1.0], &[f64::INFINITY]),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn csv_row_round_trips_values() {
        let m = compute_metrics(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        let row = m.to_csv_row("Ensemble");
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "Ensemble");
        assert_eq!(fields[1].parse::<f64>().unwrap(), m.mse);
        assert_eq!(fields[3].parse::<f64>().unwrap(), m.rmse);
    }
}
