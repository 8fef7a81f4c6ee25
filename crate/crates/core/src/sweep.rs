//! Parameter sweeps over photon statistics and field occupations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::driving::{cop_from_average_flux, flux, Route};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::RefrigeratorParams;
use crate::photonstats::{PhotonDistribution, Statistic};
use crate::thermalbath::{cooling_threshold, thermal_field_heat_currents, ThermalFieldParams};

/// `points` values from `start` to `stop`, evenly spaced linearly or
/// logarithmically. Parsed from `start:stop:points[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    start: f64,
    stop: f64,
    points: usize,
    log: bool,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize, log: bool) -> Result<Self> {
        if points == 0 {
            return Err(Error::invalid("grid", "needs at least one point"));
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err(Error::invalid("grid", "bounds must be finite"));
        }
        if points > 1 && stop <= start {
            return Err(Error::invalid(
                "grid",
                format!("stop {stop} must exceed start {start}"),
            ));
        }
        if log && start <= 0.0 {
            return Err(Error::invalid("grid", "logarithmic grids need start > 0"));
        }
        Ok(Grid {
            start,
            stop,
            points,
            log,
        })
    }

    pub fn linear(start: f64, stop: f64, points: usize) -> Result<Self> {
        Self::new(start, stop, points, false)
    }

    pub fn logarithmic(start: f64, stop: f64, points: usize) -> Result<Self> {
        Self::new(start, stop, points, true)
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1, false)
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    /// Strictly increasing grid values; endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.start
                } else if i == self.points - 1 {
                    self.stop
                } else if self.log {
                    (self.start.ln() + (self.stop.ln() - self.start.ln()) * i as f64 / last).exp()
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || {
            Error::invalid(
                "grid",
                format!("expected start:stop:points[:log], got `{s}`"),
            )
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        Grid::new(start, stop, points, log)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)?;
        if self.log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

/// Whether grid values are mean photon numbers or native parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    #[default]
    ByMean,
    ByLambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    J,
    Qc,
    Qh,
    Qe,
    Cop,
    G2,
}

impl Output {
    pub const ALL: [Output; 6] = [
        Output::J,
        Output::Qc,
        Output::Qh,
        Output::Qe,
        Output::Cop,
        Output::G2,
    ];
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "j" | "j_bar" => Ok(Output::J),
            "qc" | "q_c" => Ok(Output::Qc),
            "qh" | "q_h" => Ok(Output::Qh),
            "qe" | "q_e" => Ok(Output::Qe),
            "cop" => Ok(Output::Cop),
            "g2" => Ok(Output::G2),
            other => Err(Error::invalid(
                "outputs",
                format!("unknown output `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub statistics: Vec<Statistic>,
    pub parameterization: Parameterization,
    pub grid: Grid,
    pub params: RefrigeratorParams,
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    /// All four built-in statistics over a log grid of mean photon numbers.
    pub fn four_statistics(params: RefrigeratorParams, grid: Grid) -> Self {
        SweepSpec {
            statistics: Statistic::BUILT_IN.to_vec(),
            parameterization: Parameterization::ByMean,
            grid,
            params,
            outputs: Output::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.statistics.is_empty() {
            return Err(Error::invalid(
                "statistics",
                "at least one statistic is required",
            ));
        }
        if self.statistics.contains(&Statistic::Custom) {
            return Err(Error::invalid(
                "statistics",
                "custom tables cannot be swept",
            ));
        }
        Ok(())
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}

/// One operating point of a sweep. Unrequested outputs are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub statistic: Statistic,
    pub lambda_or_nbar: f64,
    pub mean_photons: f64,
    pub intensity_x: f64,
    pub j_bar: Option<f64>,
    pub q_c: Option<f64>,
    pub q_h: Option<f64>,
    pub q_e: Option<f64>,
    pub cop: Option<f64>,
    pub g2: Option<f64>,
    pub route: Route,
    pub crosscheck: Option<f64>,
    pub flagged: bool,
}

fn sweep_point(spec: &SweepSpec, stat: Statistic, x: f64) -> Result<SweepRow> {
    let dist = match spec.parameterization {
        Parameterization::ByMean => PhotonDistribution::with_mean(stat, x)?,
        Parameterization::ByLambda => PhotonDistribution::from_parameter(stat, x)?,
    };
    let mean = match spec.parameterization {
        Parameterization::ByMean => x,
        Parameterization::ByLambda => dist.closed_form_mean(),
    };
    let p = &spec.params;
    let r = flux(p, &dist)?;
    let h = r.heat_currents(p);
    let g2 = if spec.wants(Output::G2) && mean > 0.0 {
        Some(dist.gk(2)?)
    } else {
        None
    };
    let pick = |o, v| spec.wants(o).then_some(v);
    Ok(SweepRow {
        statistic: stat,
        lambda_or_nbar: dist.parameter(),
        mean_photons: mean,
        intensity_x: p.xi0() * p.xi0() * mean,
        j_bar: pick(Output::J, r.j_bar),
        q_c: pick(Output::Qc, h.q_c),
        q_h: pick(Output::Qh, h.q_h),
        q_e: pick(Output::Qe, h.q_e),
        cop: if spec.wants(Output::Cop) {
            cop_from_average_flux(p, r.j_bar).cop()
        } else {
            None
        },
        g2,
        route: r.route,
        crosscheck: r.cross_check.map(|c| c.discrepancy),
        flagged: r.flagged(),
    })
}

/// Rows ordered by grid point, then by the order of `spec.statistics`.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let values = spec.grid.values();
    let jobs: Vec<(f64, Statistic)> = values
        .iter()
        .flat_map(|&x| spec.statistics.iter().map(move |&s| (x, s)))
        .collect();
    exec.map(&jobs, |&(x, s)| sweep_point(spec, s, x))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathStatus {
    Cooling,
    Heating,
    Inactive,
}

impl BathStatus {
    pub fn of(j: f64) -> Self {
        if j > 0.0 {
            BathStatus::Cooling
        } else if j < 0.0 {
            BathStatus::Heating
        } else {
            BathStatus::Inactive
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BathStatus::Cooling => "cooling",
            BathStatus::Heating => "heating",
            BathStatus::Inactive => "inactive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalBathRow {
    pub nbar_e: f64,
    pub j_prime: f64,
    pub q_c: f64,
    pub q_h: f64,
    pub q_e: f64,
    pub status: BathStatus,
    pub threshold: Option<f64>,
}

/// Thermally powered machine over a grid of field occupations.
pub fn thermal_bath_scan(
    params: &RefrigeratorParams,
    grid: &Grid,
    exec: Execution,
) -> Result<Vec<ThermalBathRow>> {
    let threshold = cooling_threshold(params.nbar_c(), params.nbar_h());
    let values = grid.values();
    exec.map(&values, |&ne| {
        let tp = ThermalFieldParams::new(*params, ne)?;
        let h = thermal_field_heat_currents(&tp);
        Ok(ThermalBathRow {
            nbar_e: ne,
            j_prime: h.j,
            q_c: h.q_c,
            q_h: h.q_h,
            q_e: h.q_e,
            status: BathStatus::of(h.j),
            threshold,
        })
    })
    .into_iter()
    .collect()
}

/// Index i of the first row past the single heating/cooling transition of a
/// scan. Inactive rows (J′ = 0, e.g. a grid point exactly at threshold) are
/// passed over. None when the sign changes zero or several times.
pub fn single_status_flip(rows: &[ThermalBathRow]) -> Option<usize> {
    let active: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].status != BathStatus::Inactive)
        .collect();
    let flips: Vec<usize> = active
        .windows(2)
        .filter(|w| rows[w[0]].status != rows[w[1]].status)
        .map(|w| w[1])
        .collect();
    match flips.as_slice() {
        [i] => Some(*i),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceRow {
    pub statistic: Statistic,
    pub lambda_or_nbar: f64,
    pub mean_photons: f64,
    pub k: u32,
    pub gk: f64,
}

/// g^(k) for k = 1..=k_max of each statistic at every grid mean.
pub fn coherence_profile(
    statistics: &[Statistic],
    grid: &Grid,
    parameterization: Parameterization,
    k_max: u32,
    exec: Execution,
) -> Result<Vec<CoherenceRow>> {
    let values = grid.values();
    let jobs: Vec<(f64, Statistic)> = values
        .iter()
        .flat_map(|&x| statistics.iter().map(move |&s| (x, s)))
        .collect();
    let rows: Result<Vec<Vec<CoherenceRow>>> = exec
        .map(&jobs, |&(x, s)| {
            let d = match parameterization {
                Parameterization::ByMean => PhotonDistribution::with_mean(s, x)?,
                Parameterization::ByLambda => PhotonDistribution::from_parameter(s, x)?,
            };
            let mean = d.closed_form_mean();
            (1..=k_max)
                .map(|k| {
                    Ok(CoherenceRow {
                        statistic: s,
                        lambda_or_nbar: d.parameter(),
                        mean_photons: mean,
                        k,
                        gk: d.gk(k)?,
                    })
                })
                .collect()
        })
        .into_iter()
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0.1:100:30:log".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 30);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[29], 100.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.to_string(), "0:1:5");
        assert_eq!("3:3:1".parse::<Grid>().unwrap().values(), vec![3.0]);
        for bad in ["1:0:3", "0:1:0", "0:1:3:log", "a:b:c", "1:2", "1:2:3:cubic"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sweep_rows_follow_grid_order() {
        let spec =
            SweepSpec::four_statistics(RefrigeratorParams::default(), "1:10:3".parse().unwrap());
        let rows = run_sweep(&spec, Execution::Parallel).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[0].statistic, Statistic::SubPoisson);
        assert_eq!(rows[3].statistic, Statistic::Thermal);
        assert_eq!(rows[4].mean_photons, 5.5);
        for r in &rows {
            assert!(!r.flagged);
            assert!((r.q_c.unwrap() + r.q_h.unwrap() + r.q_e.unwrap()).abs() < 1e-15);
        }
        let seq = run_sweep(&spec, Execution::Sequential).unwrap();
        assert_eq!(rows, seq);
    }

    #[test]
    fn outputs_filter_columns() {
        let mut spec =
            SweepSpec::four_statistics(RefrigeratorParams::default(), Grid::single(2.0).unwrap());
        spec.outputs = vec![Output::J];
        let rows = run_sweep(&spec, Execution::Sequential).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.j_bar.is_some() && r.g2.is_none() && r.cop.is_none()));
        spec.statistics.clear();
        assert!(run_sweep(&spec, Execution::Sequential).is_err());
    }

    #[test]
    fn by_lambda_reports_mean() {
        let spec = SweepSpec {
            statistics: vec![Statistic::SubPoisson],
            parameterization: Parameterization::ByLambda,
            grid: Grid::single(400.0).unwrap(),
            params: RefrigeratorParams::default(),
            outputs: Output::ALL.to_vec(),
        };
        let rows = run_sweep(&spec, Execution::Sequential).unwrap();
        assert_eq!(rows[0].lambda_or_nbar, 400.0);
        assert!((rows[0].mean_photons - 10.0).abs() < 1e-12);
    }

    #[test]
    fn bath_scan_flips_once_at_threshold() {
        let p = RefrigeratorParams::default().with_kappa(0.2).unwrap();
        let rows = thermal_bath_scan(&p, &"0:5:51".parse().unwrap(), Execution::Parallel).unwrap();
        let i = single_status_flip(&rows).unwrap();
        let th = rows[0].threshold.unwrap();
        assert_eq!(rows[20].status, BathStatus::Inactive);
        assert!(rows[i - 1].nbar_e <= th && th <= rows[i].nbar_e);
        let off = RefrigeratorParams::default();
        let rows =
            thermal_bath_scan(&off, &"0:5:6".parse().unwrap(), Execution::Sequential).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.j_prime == 0.0 && r.status == BathStatus::Inactive));
    }

    #[test]
    fn coherence_rows() {
        let rows = coherence_profile(
            &[Statistic::Thermal],
            &Grid::single(2.0).unwrap(),
            Parameterization::ByMean,
            3,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[2].gk - 6.0).abs() < 1e-12);
    }
}
