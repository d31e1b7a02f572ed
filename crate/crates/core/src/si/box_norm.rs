use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-12;

/// `max p.v` over distributions `p` with `|p - p_hat|_inf <= psi`.
///
/// The feasible set is the box `[max(p_hat - psi, 0), min(p_hat + psi, 1)]`
/// intersected with the simplex. Starting from the lower corner, the
/// remaining mass is poured into coordinates in decreasing order of `v`
/// (lowest index first among ties) until it is used up. Use `-v` and negate
/// the result for the minimum.
///
/// Returns [`Error::InfeasibleBox`] when the box misses the simplex.
pub fn prob_est_norm(p_hat: &[f64], psi: f64, v: &[f64]) -> Result<f64> {
    if p_hat.len() != v.len() {
        return Err(Error::DimensionMismatch { what: "value vector", expected: p_hat.len(), got: v.len() });
    }
    let lower: Vec<f64> = p_hat.iter().map(|p| (p - psi).max(0.0)).collect();
    let cap: Vec<f64> = p_hat.iter().map(|p| (p + psi).min(1.0)).collect();
    let lower_mass: f64 = lower.iter().sum();
    let upper_mass: f64 = cap.iter().sum();
    if lower_mass > 1.0 + MASS_TOL || upper_mass < 1.0 - MASS_TOL {
        return Err(Error::InfeasibleBox { lower_mass, upper_mass });
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[j].total_cmp(&v[i]).then(i.cmp(&j)));
    let mut remaining = (1.0 - lower_mass).max(0.0);
    let mut total: f64 = lower.iter().zip(v).map(|(l, x)| l * x).sum();
    for i in order {
        if remaining <= 0.0 {
            break;
        }
        let add = (cap[i] - lower[i]).min(remaining);
        total += add * v[i];
        remaining -= add;
    }
    Ok(total)
}
