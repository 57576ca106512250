//! Refinement studies in `h` or `k` against a fine reference solution,
//! with relative errors, observed orders and a CSV report.

use std::path::Path;

use serde::Deserialize;

use crate::assembly::{v_norm, z0_norm};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::mesh::{reciprocal_of, Mesh};
use crate::spaces::{transfer_scalar, transfer_vector, ScalarField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    H,
    K,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "h" => Ok(Sweep::H),
            "k" => Ok(Sweep::K),
            other => Err(Error::Config(format!("sweep variable `{other}` is not h or k"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sweep::H => "h",
            Sweep::K => "k",
        }
    }
}

/// Time points at which errors are measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ErrorTime {
    /// Final time only.
    #[default]
    Final,
    /// Largest error over the time nodes shared with the reference grid,
    /// divided by the largest reference norm over the same nodes.
    MaxOverCommonNodes,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub value: f64,
    pub rel_err_w: f64,
    pub order_w: Option<f64>,
    pub rel_err_zeta: f64,
    pub order_zeta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub sweep: Sweep,
    pub fixed: f64,
    pub reference: f64,
    /// `‖w‖_V` of the reference solution at the final time.
    pub ref_norm_w: f64,
    /// `‖ζ‖_{Z0}` of the reference solution at the final time.
    pub ref_norm_zeta: f64,
    pub rows: Vec<ConvergenceRow>,
}

/// Orders `log2(e_{i-1} / e_i)` for a sequence refined by factors of two.
pub fn compute_orders(errors: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = errors.iter().find(|&&e| !(e.is_finite() && e > 0.0)) {
        return Err(Error::InvalidInput(format!("error {bad} must be positive")));
    }
    Ok(errors.windows(2).map(|p| (p[0] / p[1]).log2()).collect())
}

/// Orders for arbitrary refinement ratios: `ln(e_{i-1}/e_i) / ln(v_{i-1}/v_i)`.
/// An order is `None` when either error vanishes.
pub fn orders_for(values: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for i in 1..values.len() {
        let (a, b) = (errors[i - 1], errors[i]);
        out.push((a > 0.0 && b > 0.0).then(|| (a / b).ln() / (values[i - 1] / values[i]).ln()));
    }
    out
}

/// Fields kept from one run of a study.
#[derive(Clone, Debug)]
pub struct StudyRun {
    pub mesh: Mesh,
    pub time_step: f64,
    /// `(step, w, ζ)`, ending with the final step.
    pub states: Vec<(usize, VectorField, ScalarField)>,
}

impl StudyRun {
    fn final_fields(&self) -> &(usize, VectorField, ScalarField) {
        self.states.last().expect("a study run keeps its final state")
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    /// Problem data; its `h` and time resolution are overridden.
    pub base: SimConfig,
    pub sweep: Sweep,
    /// Swept resolutions, coarsest first.
    pub values: Vec<f64>,
    /// Resolution of the variable that is not swept.
    pub fixed: f64,
    /// Reference resolution of the swept variable.
    pub reference: f64,
    pub error_time: ErrorTime,
    /// Run the sweep entries on separate threads.
    pub parallel: bool,
}

impl ConvergenceStudy {
    pub fn new(base: SimConfig, sweep: Sweep, values: Vec<f64>, fixed: f64, reference: f64) -> Self {
        ConvergenceStudy {
            base,
            sweep,
            values,
            fixed,
            reference,
            error_time: ErrorTime::Final,
            parallel: true,
        }
    }

    fn resolution(&self, value: f64) -> (f64, f64) {
        match self.sweep {
            Sweep::H => (value, self.fixed),
            Sweep::K => (self.fixed, value),
        }
    }

    pub fn config_for(&self, value: f64) -> SimConfig {
        let (h, k) = self.resolution(value);
        self.base.clone().with_resolution(h, k)
    }

    pub fn reference_config(&self) -> SimConfig {
        self.config_for(self.reference)
    }

    fn count(&self, value: f64) -> Result<usize> {
        match self.sweep {
            Sweep::H => reciprocal_of(value),
            Sweep::K => {
                let grid = self.config_for(value).grid()?;
                Ok(grid.steps)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(Error::Config("a convergence study needs at least two resolutions".into()));
        }
        if self.values.windows(2).any(|p| !(p[1] < p[0])) {
            return Err(Error::Config("sweep values must be strictly refining".into()));
        }
        let fine = self.count(self.reference)?;
        for &v in &self.values {
            let c = self.count(v)?;
            if c > fine || fine % c != 0 {
                return Err(Error::NotNested(format!(
                    "{} = {v} is not nested in the reference {} = {}",
                    self.sweep.name(),
                    self.sweep.name(),
                    self.reference
                )));
            }
        }
        self.reference_config().validate()
    }

    fn execute(&self, value: f64) -> Result<StudyRun> {
        let config = self.config_for(value);
        let sim = config.simulation()?;
        let keep_all = self.error_time == ErrorTime::MaxOverCommonNodes;
        let mut states = Vec::new();
        let last = sim.grid().steps;
        sim.run_with(config.initial_state(&sim)?, |s| {
            if keep_all || s.step == last {
                states.push((s.step, s.w.clone(), s.zeta.clone()));
            }
            Ok(())
        })?;
        Ok(StudyRun {
            mesh: sim.mesh().clone(),
            time_step: sim.grid().k(),
            states,
        })
    }

    fn execute_all(&self, values: &[f64]) -> Result<Vec<StudyRun>> {
        if !self.parallel {
            return values.iter().map(|&v| self.execute(v)).collect();
        }
        std::thread::scope(|scope| {
            let handles: Vec<_> = values
                .iter()
                .map(|&v| scope.spawn(move || self.execute(v)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("convergence worker panicked"))
                .collect()
        })
    }

    pub fn compute_reference(&self) -> Result<StudyRun> {
        self.validate()?;
        self.execute(self.reference)
    }

    /// Runs the reference and every sweep entry.
    pub fn run(&self) -> Result<ConvergenceReport> {
        self.validate()?;
        let mut all = self.values.clone();
        all.push(self.reference);
        let mut runs = self.execute_all(&all)?;
        let reference = runs.pop().expect("reference run");
        self.assemble(&reference, &runs)
    }

    /// Runs the sweep entries and compares them with a precomputed reference.
    pub fn run_against(&self, reference: &StudyRun) -> Result<ConvergenceReport> {
        self.validate()?;
        let runs = self.execute_all(&self.values)?;
        self.assemble(reference, &runs)
    }

    fn assemble(&self, reference: &StudyRun, runs: &[StudyRun]) -> Result<ConvergenceReport> {
        let (_, ref_w, ref_zeta) = reference.final_fields();
        let ref_norm_w = v_norm(ref_w, &reference.mesh)?;
        let ref_norm_zeta = z0_norm(ref_zeta, &reference.mesh)?;
        let mut err_w = Vec::with_capacity(runs.len());
        let mut err_zeta = Vec::with_capacity(runs.len());
        for run in runs {
            let (ew, ez) = relative_errors(reference, run, self.error_time)?;
            err_w.push(ew);
            err_zeta.push(ez);
        }
        let order_w = orders_for(&self.values, &err_w);
        let order_zeta = orders_for(&self.values, &err_zeta);
        let rows = (0..runs.len())
            .map(|i| ConvergenceRow {
                value: self.values[i],
                rel_err_w: err_w[i],
                order_w: order_w[i],
                rel_err_zeta: err_zeta[i],
                order_zeta: order_zeta[i],
            })
            .collect();
        Ok(ConvergenceReport {
            sweep: self.sweep,
            fixed: self.fixed,
            reference: self.reference,
            ref_norm_w,
            ref_norm_zeta,
            rows,
        })
    }
}

fn difference_norms(reference: &StudyRun, run: &StudyRun, state: usize, ref_state: usize) -> Result<[f64; 4]> {
    let (_, w, zeta) = &run.states[state];
    let (_, rw, rz) = &reference.states[ref_state];
    let w_fine = transfer_vector(w, &run.mesh, &reference.mesh)?;
    let z_fine = transfer_scalar(zeta, &run.mesh, &reference.mesh)?;
    Ok([
        v_norm(&rw.sub(&w_fine)?, &reference.mesh)?,
        z0_norm(&rz.sub(&z_fine)?, &reference.mesh)?,
        v_norm(rw, &reference.mesh)?,
        z0_norm(rz, &reference.mesh)?,
    ])
}

/// Relative errors of `run` against `reference` in `‖·‖_V` and `‖·‖_{Z0}`,
/// measured on the reference mesh.
pub fn relative_errors(reference: &StudyRun, run: &StudyRun, time: ErrorTime) -> Result<(f64, f64)> {
    let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
    match time {
        ErrorTime::Final => {
            let n = difference_norms(reference, run, run.states.len() - 1, reference.states.len() - 1)?;
            Ok((ratio(n[0], n[2]), ratio(n[1], n[3])))
        }
        ErrorTime::MaxOverCommonNodes => {
            let stride = (run.time_step / reference.time_step).round() as usize;
            let mut max = [0.0f64; 4];
            for (i, &(step, _, _)) in run.states.iter().enumerate() {
                if step == 0 {
                    continue;
                }
                let j = reference
                    .states
                    .iter()
                    .position(|s| s.0 == step * stride)
                    .ok_or_else(|| Error::NotNested(format!("time step {step} has no reference node")))?;
                let n = difference_norms(reference, run, i, j)?;
                for c in 0..4 {
                    max[c] = max[c].max(n[c]);
                }
            }
            Ok((ratio(max[0], max[2]), ratio(max[1], max[3])))
        }
    }
}

const HEADER: [&str; 10] = [
    "sweep",
    "fixed",
    "reference",
    "ref_norm_w_v",
    "ref_norm_zeta_z0",
    "value",
    "rel_err_w_v",
    "order_w",
    "rel_err_zeta_z0",
    "order_zeta",
];

#[derive(Deserialize)]
struct Record {
    sweep: String,
    fixed: f64,
    reference: f64,
    ref_norm_w_v: f64,
    ref_norm_zeta_z0: f64,
    value: f64,
    rel_err_w_v: f64,
    order_w: Option<f64>,
    rel_err_zeta_z0: f64,
    order_zeta: Option<f64>,
}

fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

impl ConvergenceReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(HEADER)?;
        for row in &self.rows {
            w.write_record([
                self.sweep.name().to_string(),
                sci(self.fixed),
                sci(self.reference),
                sci(self.ref_norm_w),
                sci(self.ref_norm_zeta),
                sci(row.value),
                sci(row.rel_err_w),
                opt_sci(row.order_w),
                sci(row.rel_err_zeta),
                opt_sci(row.order_zeta),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut report: Option<ConvergenceReport> = None;
        for rec in r.deserialize() {
            let rec: Record = rec?;
            let row = ConvergenceRow {
                value: rec.value,
                rel_err_w: rec.rel_err_w_v,
                order_w: rec.order_w,
                rel_err_zeta: rec.rel_err_zeta_z0,
                order_zeta: rec.order_zeta,
            };
            match report.as_mut() {
                Some(rep) => rep.rows.push(row),
                None => {
                    report = Some(ConvergenceReport {
                        sweep: Sweep::parse(&rec.sweep)?,
                        fixed: rec.fixed,
                        reference: rec.reference,
                        ref_norm_w: rec.ref_norm_w_v,
                        ref_norm_zeta: rec.ref_norm_zeta_z0,
                        rows: vec![row],
                    })
                }
            }
        }
        report.ok_or_else(|| Error::InvalidInput(format!("{} contains no rows", path.display())))
    }

    /// Plain-text table for terminals.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{}-sweep, fixed {} = {}, reference {} = {}: |w|_V = {:.5}, |zeta|_Z0 = {:.5}\n",
            self.sweep.name(),
            match self.sweep {
                Sweep::H => "k",
                Sweep::K => "h",
            },
            fraction(self.fixed),
            self.sweep.name(),
            fraction(self.reference),
            self.ref_norm_w,
            self.ref_norm_zeta
        );
        out.push_str(&format!(
            "{:>8}  {:>12}  {:>7}  {:>12}  {:>7}\n",
            self.sweep.name(),
            "err_w_V",
            "order",
            "err_zeta_Z0",
            "order"
        ));
        for r in &self.rows {
            let o = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
            out.push_str(&format!(
                "{:>8}  {:>12.4e}  {:>7}  {:>12.4e}  {:>7}\n",
                fraction(r.value),
                r.rel_err_w,
                o(r.order_w),
                r.rel_err_zeta,
                o(r.order_zeta)
            ));
        }
        out
    }
}

fn fraction(v: f64) -> String {
    let m = (1.0 / v).round();
    if m >= 1.0 && (m * v - 1.0).abs() < 1e-12 {
        format!("1/{m}")
    } else {
        format!("{v}")
    }
}
