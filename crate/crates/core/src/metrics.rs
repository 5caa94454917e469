//! Forecast accuracy and inventory indicators.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_pair<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidInput("empty input".into()));
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "actuals",
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// Root mean squared error of `forecasts - actuals`.
pub fn rmse<T: Scalar>(forecasts: &[T], actuals: &[T]) -> Result<T> {
    check_pair(forecasts, actuals)?;
    let n = T::from_usize_lossy(forecasts.len());
    let ss: T = forecasts.iter().zip(actuals).map(|(&f, &y)| (f - y) * (f - y)).sum();
    Ok((ss / n).sqrt())
}

/// Mean error (bias); positive when forecasts run high.
pub fn me<T: Scalar>(forecasts: &[T], actuals: &[T]) -> Result<T> {
    check_pair(forecasts, actuals)?;
    let n = T::from_usize_lossy(forecasts.len());
    Ok(forecasts.iter().zip(actuals).map(|(&f, &y)| f - y).sum::<T>() / n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InventoryKpis<T> {
    pub lost_sales: T,
    pub excess_stock: T,
    /// Fraction of periods without a stockout.
    pub achieved_csl: T,
}

/// Lost sales, excess stock and achieved cycle service level when
/// `order_up_to[t]` units are available against `demand[t]`.
pub fn inventory_kpis<T: Scalar>(demand: &[T], order_up_to: &[T]) -> Result<InventoryKpis<T>> {
    check_pair(demand, order_up_to)?;
    let mut lost = T::zero();
    let mut excess = T::zero();
    let mut covered = 0usize;
    for (&d, &s) in demand.iter().zip(order_up_to) {
        if d > s {
            lost = lost + (d - s);
        } else {
            excess = excess + (s - d);
            covered += 1;
        }
    }
    Ok(InventoryKpis {
        lost_sales: lost,
        excess_stock: excess,
        achieved_csl: T::from_usize_lossy(covered) / T::from_usize_lossy(demand.len()),
    })
}

/// Summary of one evaluation. `sd_bias` is only known in simulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport<T> {
    pub rmse: T,
    pub me: T,
    pub sd_bias: Option<T>,
    pub lost_sales: T,
    pub excess_stock: T,
    pub achieved_csl: T,
    pub n: usize,
}

impl<T: Scalar> EvalReport<T> {
    pub fn new(forecasts: &[T], demand: &[T], order_up_to: &[T]) -> Result<Self> {
        let k = inventory_kpis(demand, order_up_to)?;
        Ok(Self {
            rmse: rmse(forecasts, demand)?,
            me: me(forecasts, demand)?,
            sd_bias: None,
            lost_sales: k.lost_sales,
            excess_stock: k.excess_stock,
            achieved_csl: k.achieved_csl,
            n: demand.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[1.0, 1.0], &[0.0, 2.0]).unwrap(), 1.0);
        assert_eq!(me(&[3.0, 3.0], &[3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(me(&[2.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!(rmse::<f64>(&[], &[]).is_err());
        assert!(me(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn kpi_values() {
        let k = inventory_kpis(&[5.0, 5.0], &[5.0, 5.0]).unwrap();
        assert_eq!((k.lost_sales, k.excess_stock, k.achieved_csl), (0.0, 0.0, 1.0));
        let k = inventory_kpis(&[10.0, 2.0], &[7.0, 7.0]).unwrap();
        assert_eq!((k.lost_sales, k.excess_stock, k.achieved_csl), (3.0, 5.0, 0.5));
        assert!(inventory_kpis(&[1.0], &[1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn rmse_decomposes(v in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..60)) {
            let (f, y): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let r = rmse(&f, &y).unwrap();
            let m = me(&f, &y).unwrap();
            let n = f.len() as f64;
            let var = f.iter().zip(&y).map(|(a, b)| (a - b - m).powi(2)).sum::<f64>() / n;
            prop_assert!((r * r - (m * m + var)).abs() <= 1e-10 * (1.0 + r * r));
            prop_assert!(r + 1e-12 >= m.abs());
        }

        #[test]
        fn kpi_balance(v in proptest::collection::vec((0.0f64..50.0, 0.0f64..50.0), 1..60)) {
            let (d, s): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let k = inventory_kpis(&d, &s).unwrap();
            let net: f64 = d.iter().zip(&s).map(|(a, b)| a - b).sum();
            prop_assert!((k.lost_sales - k.excess_stock - net).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&k.achieved_csl));
        }
    }
}
