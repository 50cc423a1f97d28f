use crate::error::{Error, Result};

/// Ordinary least-squares line through `(xs, ys)`; returns `(slope, intercept)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::domain(format!(
            "{} abscissae against {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::domain("linear fit needs at least two points"));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let scale = xs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    if sxx <= (f64::EPSILON * scale).powi(2) * n {
        return Err(Error::domain("abscissae are all equal"));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.5, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let (m, b) = linear_fit(&xs, &ys).unwrap();
        assert!((m - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);

        let (m, _) = linear_fit(&[0.0, 1.0], &[0.0, 3.0]).unwrap();
        assert!((m - 3.0).abs() < 1e-15);
    }

    #[test]
    fn residuals_are_orthogonal_to_design() {
        let xs: Vec<f64> = (0..10)
            .map(|i| (i as f64 * 0.7).sin() * 3.0 + i as f64)
            .collect();
        let ys: Vec<f64> = (0..10)
            .map(|i| (i as f64 * 1.3).cos() * 2.0 - 0.5 * i as f64)
            .collect();
        let (m, b) = linear_fit(&xs, &ys).unwrap();
        let r: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (m * x + b)).collect();
        assert!(r.iter().sum::<f64>().abs() < 1e-10);
        assert!(r.iter().zip(&xs).map(|(ri, x)| ri * x).sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[1.0]).is_err());
    }
}
