//! Integral identities a solution must satisfy on every ball, used as an
//! a-posteriori check on solved fields.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::profile::Energy;

use super::{CoefficientData, ScalarField};

/// Relative residuals of the two identities at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevResidual {
    /// Dilation (virial) identity.
    pub res1: f64,
    /// Energy identity `D(r) = r ∫ w w_r dt`.
    pub res2: f64,
}

impl PohozaevResidual {
    pub fn max(&self) -> f64 {
        self.res1.max(self.res2)
    }
}

pub fn pohozaev_residual(field: &ScalarField, coeff: &CoefficientData, r: f64) -> Result<PohozaevResidual> {
    let e = Energy::new(field, coeff)?;
    pohozaev_from_energy(&e, r)
}

pub fn pohozaev_from_energy(e: &Energy, r: f64) -> Result<PohozaevResidual> {
    let sf = e.surface(r)?;
    let (grad2, wr2, wwr, trace, q) = (sf.grad2, sf.wr2, sf.wwr, sf.trace, sf.q);
    let qd = e.at(&e.qd_mass, r)?;
    let pz = e.at(&e.p_virial, r)?;
    let terms1 = [
        0.5 * r * r * grad2,
        r * r * wr2,
        0.5 * qd,
        0.5 * r * q * trace * trace,
        pz,
    ];
    let res1 = terms1[0] - terms1[1] + terms1[2] - terms1[3] - terms1[4];
    let terms2 = [e.at(&e.dirichlet, r)?, e.at(&e.p_mass, r)?, r * wwr, e.at(&e.q_mass, r)?];
    let res2 = terms2[0] - terms2[1] - terms2[2] - terms2[3];
    let norm = |t: &[f64]| t.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok(PohozaevResidual {
        res1: res1.abs() / norm(&terms1),
        res2: res2.abs() / norm(&terms2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::ModeIndex;
    use crate::geometry::PolarGrid;
    use crate::solver::{solve_mixed_bvp, ArcData, ScalarFn};

    #[test]
    fn harmonic_modes_satisfy_both_identities() {
        let g = PolarGrid::new(1.0, 1e-4, 512, 33).unwrap();
        let k = |n| ModeIndex::new(n).unwrap();
        let f = ScalarField::mode_mixture(&g, 4, &[(k(1), 1.0), (k(3), -0.4)]).unwrap();
        let res = pohozaev_residual(&f, &CoefficientData::zero(), 0.5).unwrap();
        assert!(res.max() < 1e-6, "{res:?}");
    }

    #[test]
    fn solved_field_with_potentials() {
        let g = PolarGrid::new(1.0, 1e-4, 512, 33).unwrap();
        let coeff = CoefficientData::new(
            ScalarFn::parse("1 + 0.5*r*cos(t)").unwrap(),
            ScalarFn::parse("0.3 + 0.2*x").unwrap(),
            &g,
        )
        .unwrap();
        let sol = solve_mixed_bvp(&coeff, &ArcData::single(ModeIndex::new(1).unwrap(), 1.0), &g, 8).unwrap();
        let res = pohozaev_residual(&sol.field, &coeff, 0.5).unwrap();
        assert!(res.max() < 1e-3, "{res:?}");
    }
}
