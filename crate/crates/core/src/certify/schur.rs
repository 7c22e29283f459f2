//! Limit of `M_lambda^{-1}` for `M_lambda = [M11 M12; 0 lambda M22]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dense::spectral_norm;
use crate::error::{Error, Result};

/// Accepted per-decade contraction of the deviation.
const DECADE_RATIO: (f64, f64) = (0.05, 0.2);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    pub lambdas: Vec<f64>,
    /// `||M_lambda^{-1} - blockdiag(M11^{-1}, 0)||_2` for each lambda.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// Deviation contraction per factor of ten in lambda, between neighbours.
    pub decade_ratios: Vec<f64>,
    /// Least-squares slope of `log dev` against `log lambda`.
    pub slope: f64,
    pub decays_inverse_linearly: bool,
}

pub fn schur_limit_check(m11: &DMatrix<f64>, m12: &DMatrix<f64>, m22: &DMatrix<f64>, lambdas: &[f64]) -> Result<SchurReport> {
    let (p, q) = (m11.nrows(), m22.nrows());
    if !m11.is_square() || !m22.is_square() || m12.nrows() != p || m12.ncols() != q {
        return Err(Error::Dimension(format!(
            "blocks must be p x p, p x q, q x q; got {:?}, {:?}, {:?}",
            m11.shape(),
            m12.shape(),
            m22.shape()
        )));
    }
    if lambdas.len() < 2 || lambdas.iter().any(|&l| !(l > 0.0)) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("need at least two increasing positive lambdas".into()));
    }
    let m11_inv = m11.clone().try_inverse().ok_or(Error::Singular)?;
    let n = p + q;
    let mut limit = DMatrix::zeros(n, n);
    limit.view_mut((0, 0), (p, p)).copy_from(&m11_inv);

    let mut deviations = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (p, p)).copy_from(m11);
        m.view_mut((0, p), (p, q)).copy_from(m12);
        m.view_mut((p, p), (q, q)).copy_from(&(m22 * lambda));
        let inv = m.try_inverse().ok_or(Error::Singular)?;
        deviations.push(spectral_norm(&(inv - &limit)));
    }

    let decade_ratios: Vec<f64> = lambdas
        .windows(2)
        .zip(deviations.windows(2))
        .map(|(l, d)| (d[1] / d[0]).powf(1.0 / (l[1] / l[0]).log10()))
        .collect();
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|d| d.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let decays = decade_ratios.iter().all(|r| (DECADE_RATIO.0..=DECADE_RATIO.1).contains(r));
    Ok(SchurReport {
        lambdas: lambdas.to_vec(),
        max_deviation: deviations.iter().copied().fold(0.0, f64::max),
        deviations,
        decade_ratios,
        slope,
        decays_inverse_linearly: decays,
    })
}

/// `10^1, ..., 10^6`.
pub fn default_lambdas() -> Vec<f64> {
    (1..=6).map(|e| 10f64.powi(e)).collect()
}
