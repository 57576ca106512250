//! Simulation configuration: experiment presets, a flat `key = value` file
//! format, and construction of the mesh, time grid and solver.

use std::path::{Path, PathBuf};

use crate::assembly::LoadSpec;
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::material::{ElasticityLaw, MaterialParams};
use crate::mesh::{BoundarySegment, BoundarySpec, BoundaryTag, Mesh};
use crate::solvers::SolverTolerances;
use crate::timestepper::{ProblemData, Simulation, SnapshotPolicy, TimeGrid, TimeState};

/// Domain, boundary partition and loads of the predefined problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Cantilever on (0,2)×(0,1) under its own weight, no contact.
    Experiment1,
    /// As above with a frictional foundation under the left half of the bottom.
    Experiment2,
    /// Frictional contact along the whole bottom, pushed by a surface traction.
    Experiment3,
    /// Unit square used for the refinement studies.
    Square,
}

impl Scenario {
    pub fn from_id(id: &str) -> Result<Self> {
        match id.trim() {
            "1" => Ok(Scenario::Experiment1),
            "2" => Ok(Scenario::Experiment2),
            "3" => Ok(Scenario::Experiment3),
            "square" | "benchmark" => Ok(Scenario::Square),
            other => Err(Error::Config(format!("unknown experiment `{other}`, expected 1, 2, 3 or square"))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Scenario::Experiment1 => "1",
            Scenario::Experiment2 => "2",
            Scenario::Experiment3 => "3",
            Scenario::Square => "square",
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            Scenario::Square => (1.0, 1.0),
            _ => (2.0, 1.0),
        }
    }

    pub fn load(self) -> LoadSpec {
        match self {
            Scenario::Experiment1 => LoadSpec {
                body_force: [0.0, -0.2],
                traction: [0.0, 0.0],
            },
            Scenario::Experiment2 => LoadSpec {
                body_force: [0.0, -0.8],
                traction: [0.0, 0.0],
            },
            Scenario::Experiment3 => LoadSpec {
                body_force: [0.0, 0.0],
                traction: [-1.0, -1.0],
            },
            Scenario::Square => LoadSpec {
                body_force: [0.0, 0.0],
                traction: [-1.4, -0.2],
            },
        }
    }

    pub fn segments(self) -> Vec<BoundarySegment> {
        use BoundaryTag::*;
        let (w, h) = self.domain();
        let left = BoundarySegment::vertical(0.0, 0.0, h, Gamma1);
        let top = BoundarySegment::horizontal(h, 0.0, w, Gamma2);
        let right = BoundarySegment::vertical(w, 0.0, h, Gamma2);
        match self {
            Scenario::Experiment1 => vec![left, top, right, BoundarySegment::horizontal(0.0, 0.0, w, Gamma2)],
            Scenario::Experiment2 => vec![
                left,
                top,
                right,
                BoundarySegment::horizontal(0.0, 0.0, 1.0, Gamma3),
                BoundarySegment::horizontal(0.0, 1.0, w, Gamma2),
            ],
            Scenario::Experiment3 | Scenario::Square => {
                vec![left, top, right, BoundarySegment::horizontal(0.0, 0.0, w, Gamma3)]
            }
        }
    }
}

/// Time resolution, given either as a step size or as a step count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeResolution {
    Step(f64),
    Count(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub width: f64,
    pub height: f64,
    /// Explicit boundary partition replacing the scenario's.
    pub segments: Option<Vec<BoundarySegment>>,
    pub params: MaterialParams,
    /// Use the von Mises elasticity operator instead of damaged elasticity.
    pub von_mises: bool,
    pub eta: f64,
    pub friction_bound: f64,
    pub load: LoadSpec,
    pub final_time: f64,
    pub time: TimeResolution,
    pub h: f64,
    pub zeta0: f64,
    pub tolerances: SolverTolerances,
    pub out_dir: Option<PathBuf>,
    pub snapshots: SnapshotPolicy,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::scenario(Scenario::Experiment1)
    }
}

/// Parses `1/m` or a decimal number.
pub fn parse_fraction(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || Error::Config(format!("`{text}` is not a positive number or fraction"));
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => text.parse().map_err(|_| bad())?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(bad())
    }
}

pub fn parse_snapshots(text: &str) -> Result<SnapshotPolicy> {
    match text.trim() {
        "final" => Ok(SnapshotPolicy::Final),
        "all" => Ok(SnapshotPolicy::All),
        other => other
            .strip_prefix("every:")
            .and_then(|m| m.trim().parse::<usize>().ok())
            .filter(|&m| m > 0)
            .map(SnapshotPolicy::Every)
            .ok_or_else(|| Error::Config(format!("snapshot policy `{other}` is not final, all or every:<m>"))),
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("{key}: `{value}` is not a finite number")))
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: `{value}` is not a non-negative integer")))
}

fn parse_pair(key: &str, value: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("{key}: expected `x, y`, got `{value}`")));
    }
    Ok([parse_number(key, parts[0])?, parse_number(key, parts[1])?])
}

/// `v|h <at> <from> <to> <1|2|3>`.
fn parse_segment(value: &str) -> Result<BoundarySegment> {
    let bad = || Error::Config(format!("segment: expected `v|h <at> <from> <to> <1|2|3>`, got `{value}`"));
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 5 {
        return Err(bad());
    }
    let at = parse_number("segment", parts[1])?;
    let from = parse_number("segment", parts[2])?;
    let to = parse_number("segment", parts[3])?;
    let tag = match parts[4] {
        "1" => BoundaryTag::Gamma1,
        "2" => BoundaryTag::Gamma2,
        "3" => BoundaryTag::Gamma3,
        _ => return Err(bad()),
    };
    match parts[0] {
        "v" => Ok(BoundarySegment::vertical(at, from, to, tag)),
        "h" => Ok(BoundarySegment::horizontal(at, from, to, tag)),
        _ => Err(bad()),
    }
}

impl SimConfig {
    /// Defaults for a scenario at `h = k = 1/32`.
    pub fn scenario(scenario: Scenario) -> Self {
        let (width, height) = scenario.domain();
        SimConfig {
            scenario,
            width,
            height,
            segments: None,
            params: MaterialParams::default(),
            von_mises: false,
            eta: 1.0,
            friction_bound: FrictionModel::default().bound,
            load: scenario.load(),
            final_time: 1.0,
            time: TimeResolution::Step(1.0 / 32.0),
            h: 1.0 / 32.0,
            zeta0: 1.0,
            tolerances: SolverTolerances::default(),
            out_dir: None,
            snapshots: SnapshotPolicy::Final,
        }
    }

    pub fn experiment(id: &str) -> Result<Self> {
        Ok(Self::scenario(Scenario::from_id(id)?))
    }

    /// Switches domain, boundary partition and loads to another scenario,
    /// keeping material, discretization and solver settings.
    pub fn set_scenario(&mut self, scenario: Scenario) {
        let (width, height) = scenario.domain();
        self.scenario = scenario;
        self.width = width;
        self.height = height;
        self.segments = None;
        self.load = scenario.load();
    }

    pub fn with_resolution(mut self, h: f64, k: f64) -> Self {
        self.h = h;
        self.time = TimeResolution::Step(k);
        self
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        let p = &mut self.params;
        let t = &mut self.tolerances;
        match key {
            "experiment" => self.set_scenario(Scenario::from_id(value)?),
            "width" => self.width = parse_number(key, value)?,
            "height" => self.height = parse_number(key, value)?,
            "h" => self.h = parse_fraction(value)?,
            "k" => self.time = TimeResolution::Step(parse_fraction(value)?),
            "steps" => self.time = TimeResolution::Count(parse_count(key, value)?),
            "final_time" => self.final_time = parse_number(key, value)?,
            "visc_shear" => p.visc_shear = parse_number(key, value)?,
            "visc_bulk" => p.visc_bulk = parse_number(key, value)?,
            "lame_mu" => p.lame_mu = parse_number(key, value)?,
            "lame_lambda" => p.lame_lambda = parse_number(key, value)?,
            "kappa" => p.kappa = parse_number(key, value)?,
            "source_floor" => p.source_floor = parse_number(key, value)?,
            "yield_sigma" => p.yield_sigma = Some(parse_number(key, value)?),
            "eta" => self.eta = parse_number(key, value)?,
            "elasticity" => {
                self.von_mises = match value {
                    "damaged" => false,
                    "von_mises" => true,
                    _ => return Err(Error::Config(format!("elasticity: `{value}` is not damaged or von_mises"))),
                }
            }
            "friction_bound" => self.friction_bound = parse_number(key, value)?,
            "body_force" => self.load.body_force = parse_pair(key, value)?,
            "traction" => self.load.traction = parse_pair(key, value)?,
            "zeta0" => self.zeta0 = parse_number(key, value)?,
            "u0" => {
                if value != "zero" {
                    return Err(Error::Config(format!("u0: only `zero` is supported, got `{value}`")));
                }
            }
            "segment" => self.segments.get_or_insert_with(Vec::new).push(parse_segment(value)?),
            "cg_rel_tol" => t.cg_rel_tol = parse_number(key, value)?,
            "cg_max_iters" => t.cg_max_iters = parse_count(key, value)?,
            "qp_rel_tol" => t.qp_rel_tol = parse_number(key, value)?,
            "qp_max_sweeps" => t.qp_max_sweeps = parse_count(key, value)?,
            "sor_omega" => t.sor_omega = parse_number(key, value)?,
            "newton_grad_tol" => t.newton_grad_tol = parse_number(key, value)?,
            "newton_max_iters" => t.newton_max_iters = parse_count(key, value)?,
            "rho_start" => t.rho_start = parse_number(key, value)?,
            "rho_final" => t.rho_final = parse_number(key, value)?,
            "rho_factor" => t.rho_factor = parse_number(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "snapshots" => self.snapshots = parse_snapshots(value)?,
            _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies the settings of a `key = value` text. Blank lines and lines
    /// starting with `#` are ignored. An `experiment` line is applied before
    /// all others so that it never discards explicit settings.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        let mut pairs = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            pairs.push((key.trim(), value.trim()));
        }
        pairs.sort_by_key(|(k, _)| *k != "experiment");
        for (key, value) in pairs {
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_str(&text)
    }

    pub fn boundary(&self) -> Result<BoundarySpec> {
        BoundarySpec::new(self.segments.clone().unwrap_or_else(|| self.scenario.segments()))
    }

    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::structured(self.width, self.height, self.h)?.classify_boundary(&self.boundary()?)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        match self.time {
            TimeResolution::Step(k) => TimeGrid::with_step(self.final_time, k),
            TimeResolution::Count(n) => TimeGrid::new(self.final_time, n),
        }
    }

    pub fn law(&self) -> ElasticityLaw {
        if self.von_mises {
            ElasticityLaw::VonMises {
                eta: self.eta,
                yield_sigma: self.params.yield_sigma.unwrap_or(1.0),
            }
        } else {
            ElasticityLaw::Damaged
        }
    }

    pub fn problem_data(&self) -> Result<ProblemData> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::Config(format!("eta = {} must be positive", self.eta)));
        }
        Ok(ProblemData {
            params: self.params,
            law: self.law(),
            friction: FrictionModel::new(self.friction_bound)?,
            load: self.load,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.zeta0) {
            return Err(Error::Config(format!("zeta0 = {} must lie in [0, 1]", self.zeta0)));
        }
        self.params.validate()?;
        self.tolerances.validate()?;
        self.grid()?;
        self.boundary()?;
        self.problem_data()?;
        Ok(())
    }

    pub fn simulation(&self) -> Result<Simulation> {
        self.validate()?;
        Simulation::new(self.mesh()?, self.problem_data()?, self.grid()?, self.tolerances)
    }

    pub fn initial_state(&self, sim: &Simulation) -> Result<TimeState> {
        sim.constant_initial_state(self.zeta0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(parse_fraction("1/32").unwrap(), 1.0 / 32.0);
        assert_eq!(parse_fraction(" 0.25 ").unwrap(), 0.25);
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("-1/4").is_err());
        let err = parse_fraction("abc").unwrap_err().to_string();
        assert!(err.contains("abc"));
    }

    #[test]
    fn snapshot_policies() {
        assert_eq!(parse_snapshots("final").unwrap(), SnapshotPolicy::Final);
        assert_eq!(parse_snapshots("all").unwrap(), SnapshotPolicy::All);
        assert_eq!(parse_snapshots("every:4").unwrap(), SnapshotPolicy::Every(4));
        assert!(parse_snapshots("every:0").is_err());
        assert!(parse_snapshots("sometimes").is_err());
    }

    #[test]
    fn defaults_follow_the_model_data() {
        let c = SimConfig::default();
        assert_eq!(c.final_time, 1.0);
        assert_eq!(c.params.visc_shear, 2.0);
        assert_eq!(c.params.visc_bulk, 2.0);
        assert_eq!(c.params.lame_mu, 4.0);
        assert_eq!(c.params.lame_lambda, 4.0);
        assert_eq!(c.params.kappa, 0.5);
        assert_eq!(c.friction_bound, 20.0);
        assert_eq!(c.zeta0, 1.0);
        assert_eq!(c.grid().unwrap().steps, 32);
    }

    #[test]
    fn experiment_presets() {
        let e2 = SimConfig::experiment("2").unwrap();
        assert_eq!(e2.load.body_force, [0.0, -0.8]);
        let mesh = e2.mesh().unwrap();
        assert!((mesh.tagged_length(BoundaryTag::Gamma3) - 1.0).abs() < 1e-12);
        let e3 = SimConfig::experiment("3").unwrap();
        assert_eq!(e3.load.traction, [-1.0, -1.0]);
        assert!((e3.mesh().unwrap().tagged_length(BoundaryTag::Gamma3) - 2.0).abs() < 1e-12);
        let e1 = SimConfig::experiment("1").unwrap();
        assert_eq!(e1.mesh().unwrap().tagged_length(BoundaryTag::Gamma3), 0.0);
        let sq = SimConfig::scenario(Scenario::Square);
        assert_eq!(sq.load.traction, [-1.4, -0.2]);
        assert!((sq.mesh().unwrap().tagged_length(BoundaryTag::Gamma2) - 2.0).abs() < 1e-12);
        assert!(SimConfig::experiment("4").is_err());
    }

    #[test]
    fn file_settings() {
        let mut c = SimConfig::default();
        c.apply_str(
            "# comment\n\nh = 1/8\nk = 1/4\nkappa = 0.25\ntraction = 1, -2\nexperiment = 3\nsnapshots = every:2\n",
        )
        .unwrap();
        assert_eq!(c.scenario, Scenario::Experiment3);
        assert_eq!(c.h, 0.125);
        assert_eq!(c.grid().unwrap().steps, 4);
        assert_eq!(c.params.kappa, 0.25);
        assert_eq!(c.load.traction, [1.0, -2.0]);
        assert_eq!(c.snapshots, SnapshotPolicy::Every(2));
        assert!(c.apply_str("bogus = 1").is_err());
        assert!(c.apply_str("no equals sign").is_err());
    }

    #[test]
    fn explicit_segments() {
        let mut c = SimConfig::scenario(Scenario::Square);
        c.apply_str("segment = v 0 0 1 1\nsegment = h 1 0 1 2\nsegment = v 1 0 1 2\nsegment = h 0 0 1 2\nh = 1/4")
            .unwrap();
        let mesh = c.mesh().unwrap();
        assert_eq!(mesh.tagged_length(BoundaryTag::Gamma3), 0.0);
        c.set("segment", "h 0 0 1 3").unwrap();
        assert!(c.mesh().is_err());
    }

    #[test]
    fn time_step_must_divide_final_time() {
        let c = SimConfig::default().with_resolution(1.0 / 8.0, 0.3);
        assert!(c.grid().is_err());
    }

    #[test]
    fn von_mises_selection() {
        let mut c = SimConfig::default();
        c.apply_str("elasticity = von_mises\neta = 3\nyield_sigma = 0.5").unwrap();
        assert_eq!(
            c.law(),
            ElasticityLaw::VonMises {
                eta: 3.0,
                yield_sigma: 0.5
            }
        );
    }
}
