use crate::error::{Error, Result};

/// Steady-state level of a series and the index where it is first reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub plateau: f64,
    /// `None`: the series never settles.
    pub burn_in: Option<usize>,
}

fn mean(s: &[f64]) -> f64 {
    s.iter().sum::<f64>() / s.len() as f64
}

/// Plateau = mean of the last `window` points. The series counts as settled
/// only if the preceding window's mean is also within `rel_tol` of it; the
/// burn-in is then the first index `i` whose window `series[i..i + window]`
/// has mean within `rel_tol` of the plateau.
pub fn plateau_and_burn_in(series: &[f64], window: usize, rel_tol: f64) -> Result<Plateau> {
    if window == 0 || series.len() < 2 * window {
        return Err(Error::invalid(format!(
            "series of length {} is too short for window {window}",
            series.len()
        )));
    }
    let n = series.len();
    let plateau = mean(&series[n - window..]);
    let tol = rel_tol * plateau.abs();
    let close = |v: f64| (v - plateau).abs() <= tol;
    if !close(mean(&series[n - 2 * window..n - window])) {
        return Ok(Plateau { plateau, burn_in: None });
    }
    let burn_in = (0..=n - window).find(|&i| close(mean(&series[i..i + window])));
    Ok(Plateau { plateau, burn_in })
}
