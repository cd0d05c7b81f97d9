use crate::matrix::Matrix;
use crate::par;

use super::{GammaSchedule, PcsError};

/// `(1 + m)^γ − 1`, evaluated as `expm1(γ · log1p(m))`.
#[inline]
pub fn stretch_value(magnitude: f64, gamma: f64) -> f64 {
    (gamma * magnitude.ln_1p()).exp_m1()
}

/// Applies the per-bin exponent of `schedule` to a `frames × bins` magnitude
/// matrix.
pub fn stretch_magnitude(mag: &Matrix<f64>, schedule: &GammaSchedule) -> Result<Matrix<f64>, PcsError> {
    if mag.cols() != schedule.len() {
        return Err(PcsError::ShapeMismatch { expected: (mag.rows(), schedule.len()), actual: mag.shape() });
    }
    check_magnitudes(mag)?;
    let gamma = schedule.gamma_per_bin();
    let mut out = mag.clone();
    par::for_each_row(out.as_mut_slice(), gamma.len(), |_, row| {
        for (m, &g) in row.iter_mut().zip(gamma) {
            *m = stretch_value(*m, g);
        }
    });
    Ok(out)
}

pub(crate) fn check_magnitudes(mag: &Matrix<f64>) -> Result<(), PcsError> {
    match mag.as_slice().iter().position(|&m| !(m >= 0.0 && m.is_finite())) {
        None => Ok(()),
        Some(i) => Err(PcsError::NegativeMagnitude {
            frame: i / mag.cols(),
            bin: i % mag.cols(),
            value: mag.as_slice()[i],
        }),
    }
}
