//! Parameter sweeps and critical-point location over the closed-form
//! spectra.

use serde::Serialize;

use crate::analytic::{line_for, AnalyticModel, LevelIndex};
use crate::error::{CoreError, Result};
use crate::params::{derive, DerivedParams, PhysParams};

/// Physical parameter a sweep or root search varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParameter {
    Theta,
    B,
    Omega,
    M,
}

impl SweepParameter {
    pub fn id(&self) -> &'static str {
        match self {
            SweepParameter::Theta => "theta",
            SweepParameter::B => "B",
            SweepParameter::Omega => "omega",
            SweepParameter::M => "m",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(SweepParameter::Theta),
            "B" | "b" => Ok(SweepParameter::B),
            "omega" => Ok(SweepParameter::Omega),
            "m" => Ok(SweepParameter::M),
            other => Err(CoreError::UnknownParameter(format!(
                "unknown sweep parameter '{other}'; expected theta, B, omega, or m"
            ))),
        }
    }
}

/// Replace one physical parameter, keeping the rest of the base point.
pub fn apply(base: &PhysParams, parameter: SweepParameter, value: f64) -> PhysParams {
    let mut p = *base;
    match parameter {
        SweepParameter::Theta => p.theta = value,
        SweepParameter::B => p.b = value,
        SweepParameter::Omega => p.omega = value,
        SweepParameter::M => p.m = value,
    }
    p
}

/// A sweep request: one model, one varied parameter, a grid, and the levels
/// to tabulate at every grid point.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub model: AnalyticModel,
    pub base: PhysParams,
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub levels: Vec<LevelIndex>,
}

/// One grid point of a sweep. Level entries are `None` wherever the model
/// declined to evaluate (ill-posed parameters, gated critical point, bad
/// label); the row itself is always emitted so a sweep across a critical
/// value shows the breakdown instead of hiding it.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param_value: f64,
    pub well_posed: bool,
    pub derived: DerivedParams,
    pub e_squared: Vec<Option<f64>>,
    pub e_nonrel: Vec<Option<f64>>,
    /// Squared-energy gap between the two spin orientations of the first
    /// level label that appears with both, when both evaluated.
    pub splitting: Option<f64>,
}

/// Index pair (positive-spin level, negative-spin level) of the first label
/// present with both spin orientations.
fn splitting_pair(levels: &[LevelIndex]) -> Option<(usize, usize)> {
    for (i, level) in levels.iter().enumerate() {
        if let Some(j) = levels
            .iter()
            .position(|o| o.n1 == level.n1 && o.n2 == level.n2 && o.sigma_z == -level.sigma_z)
        {
            return Some(if level.sigma_z > 0 { (i, j) } else { (j, i) });
        }
    }
    None
}

/// Evaluate the closed-form levels across the grid.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.grid.is_empty() {
        return Err(CoreError::InvalidRequest("sweep grid is empty".to_string()));
    }
    if spec.grid.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidRequest(
            "sweep grid contains a non-finite value".to_string(),
        ));
    }
    for w in spec.grid.windows(2) {
        if w[1] <= w[0] {
            return Err(CoreError::InvalidRequest(format!(
                "sweep grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if spec.levels.is_empty() {
        return Err(CoreError::InvalidRequest("sweep needs at least one level".to_string()));
    }
    let pair = splitting_pair(&spec.levels);

    let mut rows = Vec::with_capacity(spec.grid.len());
    for &value in &spec.grid {
        let phys = apply(&spec.base, spec.parameter, value);
        let mut well_posed = true;
        let mut e_squared = Vec::with_capacity(spec.levels.len());
        let mut e_nonrel = Vec::with_capacity(spec.levels.len());
        for level in &spec.levels {
            match line_for(spec.model, &phys, level) {
                Ok(line) => {
                    e_squared.push(Some(line.e_squared));
                    e_nonrel.push(Some(line.e_nonrel));
                }
                Err(_) => {
                    well_posed = false;
                    e_squared.push(None);
                    e_nonrel.push(None);
                }
            }
        }
        let splitting = pair.and_then(|(p, m)| match (e_squared[p], e_squared[m]) {
            (Some(up), Some(down)) => Some(up - down),
            _ => None,
        });
        rows.push(SweepRow {
            param_value: value,
            well_posed,
            derived: derive(&phys),
            e_squared,
            e_nonrel,
            splitting,
        });
    }
    Ok(rows)
}

/// One point of a spin-splitting scan over the deformation.
#[derive(Debug, Clone, Serialize)]
pub struct SplittingRow {
    pub theta: f64,
    /// Squared-energy gap between the spin orientations of the ground
    /// label.
    pub gap: f64,
}

/// Ground-label spin splitting as a function of the deformation. Unlike
/// [`sweep`], evaluation errors propagate: this helper exists to measure
/// the splitting where the model is healthy.
pub fn splitting_scan(
    model: AnalyticModel,
    phys: &PhysParams,
    theta_grid: &[f64],
) -> Result<Vec<SplittingRow>> {
    if !matches!(model, AnalyticModel::LandauNc | AnalyticModel::OscillatorNc) {
        return Err(CoreError::InvalidRequest(format!(
            "spin splitting over the deformation is defined for the deformed models, \
             not {}",
            model.id()
        )));
    }
    if theta_grid.is_empty() {
        return Err(CoreError::InvalidRequest("splitting grid is empty".to_string()));
    }
    let up = LevelIndex::new(0, 0, 1)?;
    let down = LevelIndex::new(0, 0, -1)?;
    let mut rows = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let p = phys.with_theta(theta);
        let gap = line_for(model, &p, &up)?.e_squared - line_for(model, &p, &down)?.e_squared;
        rows.push(SplittingRow { theta, gap });
    }
    Ok(rows)
}

/// Where a model's spectrum degenerates, and how the located root compares
/// with the closed-form prediction for it.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalReport {
    pub model: String,
    pub parameter: String,
    /// Closed-form prediction for the critical value, where one exists.
    pub closed_form: Option<f64>,
    /// Root of the degeneracy criterion located by bracketing and
    /// bisection.
    pub root: f64,
    /// `root - closed_form`.
    pub difference: Option<f64>,
    /// Criterion value at the closed-form prediction; zero iff the
    /// prediction actually sits on the root.
    pub coefficient_at_closed_form: Option<f64>,
    pub notes: Vec<String>,
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * lo.abs().max(hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Locate the critical value of `parameter` for a deformed model by sign
/// change of its degeneracy criterion, seeded at the closed-form
/// prediction.
///
/// The bracket grows outward from the seed, so when the criterion has
/// several roots (the field criterion of the level-collapse model also
/// vanishes at zero field) the one nearest the prediction is reported.
pub fn locate_critical(
    model: AnalyticModel,
    phys: &PhysParams,
    parameter: SweepParameter,
) -> Result<CriticalReport> {
    if !matches!(parameter, SweepParameter::Theta | SweepParameter::B) {
        return Err(CoreError::InvalidRequest(format!(
            "critical values are located in theta or B, not {}",
            parameter.id()
        )));
    }
    let criterion: Box<dyn Fn(f64) -> f64> = match model {
        AnalyticModel::LandauNc => Box::new(move |x: f64| {
            let p = apply(phys, parameter, x);
            p.e * derive(&p).b_tilde
        }),
        AnalyticModel::OscillatorNc => Box::new(move |x: f64| {
            let p = apply(phys, parameter, x);
            (p.m / 2.0) * p.omega * p.omega * p.theta
                + (p.e * p.e * p.b * p.b / (8.0 * p.m)) * p.theta
                + p.e * p.b / (2.0 * p.m)
        }),
        other => {
            return Err(CoreError::InvalidRequest(format!(
                "critical-point location is defined for the deformed models, not {}",
                other.id()
            )))
        }
    };

    let closed_form: Option<f64> = match (model, parameter) {
        (AnalyticModel::LandauNc, SweepParameter::Theta) => {
            let eb = phys.e * phys.b;
            (eb != 0.0).then(|| -4.0 / eb)
        }
        (AnalyticModel::LandauNc, SweepParameter::B) => {
            let et = phys.e * phys.theta;
            (et != 0.0).then(|| -4.0 / et)
        }
        (AnalyticModel::OscillatorNc, SweepParameter::B) => {
            (phys.e != 0.0).then(|| -phys.m * phys.m * phys.omega * phys.omega * phys.theta
                / (2.0 * phys.e))
        }
        (AnalyticModel::OscillatorNc, SweepParameter::Theta) => {
            (phys.omega != 0.0 && phys.m != 0.0)
                .then(|| -2.0 * phys.e * phys.b / (phys.m * phys.m * phys.omega * phys.omega))
        }
        _ => unreachable!("model and parameter were both validated above"),
    };

    let seed = closed_form.unwrap_or(0.0);
    let scale = seed.abs().max(1.0);
    let f_seed = criterion(seed);
    let root = if f_seed == 0.0 {
        // Distinguish an exact hit from an identically vanishing criterion.
        if criterion(seed - scale) == 0.0 && criterion(seed + scale) == 0.0 {
            return Err(CoreError::NoSignChange(format!(
                "the degeneracy criterion of {} vanishes identically around {} = {seed}; \
                 no isolated critical value exists at this base point",
                model.id(),
                parameter.id()
            )));
        }
        seed
    } else {
        let mut h = scale * 1e-8;
        let mut bracket = None;
        for _ in 0..=64 {
            let lo = seed - h;
            let hi = seed + h;
            let f_lo = criterion(lo);
            if f_lo == 0.0 {
                bracket = Some((lo, lo));
                break;
            }
            if f_lo.is_finite() && (f_lo < 0.0) != (f_seed < 0.0) {
                bracket = Some((lo, seed));
                break;
            }
            let f_hi = criterion(hi);
            if f_hi == 0.0 {
                bracket = Some((hi, hi));
                break;
            }
            if f_hi.is_finite() && (f_hi < 0.0) != (f_seed < 0.0) {
                bracket = Some((seed, hi));
                break;
            }
            h *= 2.0;
        }
        let (lo, hi) = bracket.ok_or_else(|| {
            CoreError::NoSignChange(format!(
                "no sign change of the {} degeneracy criterion found around {} = {seed}",
                model.id(),
                parameter.id()
            ))
        })?;
        if lo == hi { lo } else { bisect(criterion.as_ref(), lo, hi) }
    };

    let mut notes = vec![match model {
        AnalyticModel::LandauNc => {
            "criterion: the effective field; at its zero the level tower collapses".to_string()
        }
        _ => "criterion: the angular coefficient of the effective oscillator, in cancelled \
              form"
            .to_string(),
    }];
    if matches!(model, AnalyticModel::OscillatorNc) {
        notes.push(
            "the closed-form value is half the coefficient's zero at leading order in \
             the deformation; the located root zeroes the coefficient itself"
                .to_string(),
        );
    }

    Ok(CriticalReport {
        model: model.id().to_string(),
        parameter: parameter.id().to_string(),
        closed_form,
        root,
        difference: closed_form.map(|c| root - c),
        coefficient_at_closed_form: closed_form.map(&*criterion),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn landau_phys() -> PhysParams {
        PhysParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.5)
    }

    fn levels_both_spins(n1: u32, n2: u32) -> Vec<LevelIndex> {
        vec![LevelIndex::new(n1, n2, 1).unwrap(), LevelIndex::new(n1, n2, -1).unwrap()]
    }

    #[test]
    fn sweep_splitting_crosses_zero_with_the_deformation() {
        let spec = SweepSpec {
            model: AnalyticModel::LandauNc,
            base: landau_phys(),
            parameter: SweepParameter::Theta,
            grid: vec![-0.2, -0.1, 0.0, 0.1, 0.2],
            levels: levels_both_spins(0, 0),
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 5);
        let gaps: Vec<f64> = rows.iter().map(|r| r.splitting.unwrap()).collect();
        // Gap e^2 B^2 theta / 2: odd in the deformation, linear slope 1/2.
        for (gap, theta) in gaps.iter().zip(&spec.grid) {
            assert!((gap - theta / 2.0).abs() <= 1e-12, "gap {gap} at theta {theta}");
        }
        assert_eq!(gaps[2], 0.0);
        assert!((gaps[1] + gaps[3]).abs() <= 1e-15, "odd symmetry");
    }

    #[test]
    fn ill_posed_rows_are_flagged_not_fatal() {
        let spec = SweepSpec {
            model: AnalyticModel::LandauNc,
            base: landau_phys(),
            parameter: SweepParameter::Theta,
            grid: vec![-4.5, -4.0, 0.0, 0.1],
            levels: levels_both_spins(0, 0),
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(!rows[0].well_posed);
        assert!(!rows[1].well_posed);
        assert!(rows[2].well_posed);
        assert!(rows[3].well_posed);
        assert!(rows[0].e_squared.iter().all(|v| v.is_none()));
        assert!(rows[0].splitting.is_none());
        assert!(rows[3].e_squared.iter().all(|v| v.is_some()));
    }

    #[test]
    fn single_point_sweep_matches_the_line_route() {
        let base = PhysParams::new(1.0, 1.0, 0.5, 0.3, 0.0, 0.5);
        let level = LevelIndex::new(1, 0, 1).unwrap();
        let spec = SweepSpec {
            model: AnalyticModel::OscillatorNc,
            base,
            parameter: SweepParameter::Theta,
            grid: vec![0.1],
            levels: vec![level],
        };
        let rows = sweep(&spec).unwrap();
        let direct = line_for(AnalyticModel::OscillatorNc, &base.with_theta(0.1), &level).unwrap();
        assert_eq!(rows[0].e_squared[0], Some(direct.e_squared));
        assert_eq!(rows[0].e_nonrel[0], Some(direct.e_nonrel));
        assert!(rows[0].splitting.is_none(), "single orientation has no gap");
    }

    #[test]
    fn mass_substitution_row_matches_direct_evaluation() {
        let base = PhysParams::new(1.0, 1.0, 0.5, 0.3, 0.1, 0.5);
        let level = LevelIndex::new(0, 0, 1).unwrap();
        let spec = SweepSpec {
            model: AnalyticModel::OscillatorNc,
            base,
            parameter: SweepParameter::M,
            grid: vec![2.0],
            levels: vec![level],
        };
        let rows = sweep(&spec).unwrap();
        let swapped = PhysParams::new(2.0, 1.0, 0.5, 0.3, 0.1, 0.5);
        let direct = line_for(AnalyticModel::OscillatorNc, &swapped, &level).unwrap();
        assert_eq!(rows[0].e_squared[0], Some(direct.e_squared));
    }

    #[test]
    fn sweep_validates_grid_and_levels() {
        let base = landau_phys();
        let levels = levels_both_spins(0, 0);
        let mk = |grid: Vec<f64>, levels: Vec<LevelIndex>| SweepSpec {
            model: AnalyticModel::LandauNc,
            base,
            parameter: SweepParameter::Theta,
            grid,
            levels,
        };
        assert!(matches!(
            sweep(&mk(vec![], levels.clone())),
            Err(CoreError::InvalidRequest(_))
        ));
        assert!(matches!(
            sweep(&mk(vec![0.2, 0.1], levels.clone())),
            Err(CoreError::InvalidRequest(_))
        ));
        assert!(matches!(
            sweep(&mk(vec![0.1, 0.1], levels.clone())),
            Err(CoreError::InvalidRequest(_))
        ));
        assert!(matches!(
            sweep(&mk(vec![0.1, f64::NAN], levels.clone())),
            Err(CoreError::InvalidRequest(_))
        ));
        assert!(matches!(sweep(&mk(vec![0.1], vec![])), Err(CoreError::InvalidRequest(_))));
    }

    #[test]
    fn splitting_scan_is_odd_and_linear_for_the_landau_family() {
        let rows =
            splitting_scan(AnalyticModel::LandauNc, &landau_phys(), &[0.0, 0.1, 0.2]).unwrap();
        let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
        assert!((gaps[0] - 0.0).abs() <= 1e-12);
        assert!((gaps[1] - 0.05).abs() <= 1e-12);
        assert!((gaps[2] - 0.1).abs() <= 1e-12);
        let minus = splitting_scan(AnalyticModel::LandauNc, &landau_phys(), &[-0.1]).unwrap();
        assert!((minus[0].gap + gaps[1]).abs() <= 1e-15, "odd in the deformation");
        // Errors propagate here, unlike in `sweep`.
        assert!(splitting_scan(AnalyticModel::LandauNc, &landau_phys(), &[-4.0]).is_err());
        assert!(matches!(
            splitting_scan(AnalyticModel::OscillatorCommutative, &landau_phys(), &[0.0]),
            Err(CoreError::InvalidRequest(_))
        ));
    }

    #[test]
    fn located_landau_root_matches_its_closed_form() {
        let phys = PhysParams::new(1.0, 0.7, 1.3, 0.0, 0.0, 0.5);
        let report = locate_critical(AnalyticModel::LandauNc, &phys, SweepParameter::Theta)
            .unwrap();
        let expected = -4.0 / (0.7 * 1.3);
        assert_eq!(report.closed_form, Some(expected));
        assert!(
            (report.root - expected).abs() <= 1e-12 * expected.abs(),
            "root {} vs {expected}",
            report.root
        );
        assert!(report.difference.unwrap().abs() <= 1e-12 * expected.abs());
        assert!(report.coefficient_at_closed_form.unwrap().abs() <= 1e-12);
    }

    #[test]
    fn located_oscillator_root_exposes_the_closed_form_gap() {
        // Worked point: the criterion root sits at roughly twice the
        // closed-form field value.
        let phys = PhysParams::new(1.0, 1.0, 0.0, 1.0, -0.05, 0.5);
        let report =
            locate_critical(AnalyticModel::OscillatorNc, &phys, SweepParameter::B).unwrap();
        assert_eq!(report.closed_form, Some(0.025));
        let expected = (-2.0 + 2.0 * (1.0f64 - 0.0025).sqrt()) / -0.05;
        assert!(
            (report.root - expected).abs() <= 1e-9,
            "root {} vs {expected}",
            report.root
        );
        assert!(report.difference.unwrap() > 0.02, "gap is first-order, not rounding");
        assert!(report.notes.iter().any(|n| n.contains("half the coefficient")));
    }

    #[test]
    fn criterion_at_the_closed_form_field_has_its_exact_residual() {
        // At the closed-form field the criterion equals
        // m w^2 t/4 + m^3 w^4 t^3 / 32 exactly; with m = w = e = 1 and
        // t = -0.2 that is -0.05025.
        let phys = PhysParams::new(1.0, 1.0, 0.0, 1.0, -0.2, 0.5);
        let report =
            locate_critical(AnalyticModel::OscillatorNc, &phys, SweepParameter::B).unwrap();
        assert_eq!(report.closed_form, Some(0.1));
        let residual = report.coefficient_at_closed_form.unwrap();
        assert!((residual - (-0.05025)).abs() <= 1e-15, "residual {residual}");
    }

    #[test]
    fn identically_zero_criterion_is_a_sign_change_error() {
        let phys = PhysParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.5);
        assert!(matches!(
            locate_critical(AnalyticModel::LandauNc, &phys, SweepParameter::Theta),
            Err(CoreError::NoSignChange(_))
        ));
    }

    #[test]
    fn locate_rejects_unsupported_requests() {
        let phys = landau_phys();
        assert!(matches!(
            locate_critical(AnalyticModel::OscillatorCommutative, &phys, SweepParameter::B),
            Err(CoreError::InvalidRequest(_))
        ));
        assert!(matches!(
            locate_critical(AnalyticModel::LandauNc, &phys, SweepParameter::M),
            Err(CoreError::InvalidRequest(_))
        ));
    }

    #[test]
    fn located_field_root_in_the_landau_family() {
        let phys = PhysParams::new(1.0, 1.0, 0.0, 0.0, 0.5, 0.5);
        let report =
            locate_critical(AnalyticModel::LandauNc, &phys, SweepParameter::B).unwrap();
        let expected = -8.0;
        assert_eq!(report.closed_form, Some(expected));
        assert!(
            (report.root - expected).abs() <= 1e-12 * expected.abs(),
            "root {} vs {expected}; the nearby trivial zero-field root must not win",
            report.root
        );
    }
}
