//! JSON form `{dims, re, im}` for states; round-trips are bit-faithful at
//! double precision (serde_json prints shortest-roundtrip floats).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::qmath::{DensityOperator, PureState};

/// Wire form shared by pure states (one row) and density operators
/// (D rows).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateJson {
    pub fn from_pure(psi: &PureState) -> Self {
        StateJson {
            dims: vec![psi.dim()],
            re: vec![psi.amplitudes().iter().map(|c| c.re).collect()],
            im: vec![psi.amplitudes().iter().map(|c| c.im).collect()],
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        let d = rho.dim();
        let m = rho.matrix();
        StateJson {
            dims: vec![d],
            re: (0..d)
                .map(|i| (0..d).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..d)
                .map(|i| (0..d).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn to_pure(&self) -> Result<PureState> {
        let d = self.total_dim()?;
        if self.re.len() != 1
            || self.im.len() != 1
            || self.re[0].len() != d
            || self.im[0].len() != d
        {
            return Err(Error::InvalidState(
                "pure state JSON needs one row of length D".into(),
            ));
        }
        let amp: Vec<C64> = self.re[0]
            .iter()
            .zip(&self.im[0])
            .map(|(&r, &i)| C64::new(r, i))
            .collect();
        PureState::new(amp)
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        let d = self.total_dim()?;
        if self.re.len() != d || self.im.len() != d {
            return Err(Error::InvalidState("density JSON needs D rows".into()));
        }
        let mat = CMat::from_fn(d, d, |i, j| C64::new(self.re[i][j], self.im[i][j]));
        DensityOperator::new(mat)
    }

    fn total_dim(&self) -> Result<usize> {
        if self.dims.is_empty() {
            return Err(Error::InvalidState("empty dims".into()));
        }
        Ok(self.dims.iter().product())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn pure_round_trip_is_bit_faithful() {
        let amp = vec![
            C64::new(0.1234567890123456789_f64.sqrt(), 0.25),
            C64::new(-0.3, std::f64::consts::FRAC_1_SQRT_2),
        ];
        let norm: f64 = amp.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let psi = PureState::new(amp.iter().map(|c| c / norm).collect()).unwrap();
        let text = serde_json::to_string(&StateJson::from_pure(&psi)).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        let psi2 = back.to_pure().unwrap();
        for (a, b) in psi.amplitudes().iter().zip(psi2.amplitudes()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn density_round_trip() {
        let rho = DensityOperator::maximally_mixed(3).unwrap();
        let text = serde_json::to_string(&StateJson::from_density(&rho)).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        assert!(
            back.to_density()
                .unwrap()
                .matrix()
                .max_abs_diff(rho.matrix())
                == 0.0
        );
    }

    #[test]
    fn malformed_json_rejected() {
        let bad = StateJson {
            dims: vec![2],
            re: vec![vec![1.0, 0.0]],
            im: vec![vec![0.0]],
        };
        assert!(bad.to_pure().is_err());
        let not_density = StateJson {
            dims: vec![2],
            re: vec![vec![1.0, 0.0]],
            im: vec![vec![0.0, 0.0]],
        };
        assert!(not_density.to_density().is_err());
        let unnormalized = StateJson {
            dims: vec![2],
            re: vec![vec![1.0, 1.0]],
            im: vec![vec![0.0, 0.0]],
        };
        assert!(unnormalized.to_pure().is_err());
        let _ = ONE;
    }
}
