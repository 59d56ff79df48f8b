//! Scaling-law estimation: least squares in log-log space.

use serde::Serialize;

/// Result of fitting y = a · x^slope: `intercept` is ln a.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares on (ln x, ln y). Points with a nonpositive
/// coordinate are skipped; at least two distinct x values are required.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<Fit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let m = logs.len() as f64;
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / m;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = logs.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(Fit {
        slope,
        intercept,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws_fit_perfectly() {
        let points: Vec<(f64, f64)> = (1..=6).map(|x| (x as f64, 3.0 * (x as f64).powi(2))).collect();
        let fit = fit_loglog(&points).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn a_known_imperfect_fit_matches_hand_computation() {
        // (1,1), (2,2), (4,8): in ln-space the ys are 0, ln2, 3·ln2 at
        // xs 0, ln2, 2·ln2. By hand: slope 3/2, intercept -ln2/6,
        // r² = 27/28.
        let fit = fit_loglog(&[(1.0, 1.0), (2.0, 2.0), (4.0, 8.0)]).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12);
        assert!((fit.intercept + 2.0f64.ln() / 6.0).abs() < 1e-12);
        assert!((fit.r2 - 27.0 / 28.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_yield_no_fit() {
        assert!(fit_loglog(&[]).is_none());
        assert!(fit_loglog(&[(2.0, 4.0)]).is_none());
        assert!(fit_loglog(&[(2.0, 4.0), (2.0, 8.0)]).is_none());
        assert!(fit_loglog(&[(-1.0, 4.0), (0.0, 8.0)]).is_none());
        // Nonpositive points are dropped, not fatal.
        let fit = fit_loglog(&[(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)]).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }
}
