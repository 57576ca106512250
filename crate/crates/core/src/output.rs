//! File output: legacy ASCII VTK field files, a structural VTK validator,
//! and the per-step time series.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::assembly::elastic_stress;
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::timestepper::{Simulation, SimulationRun, StepSummary, TimeState};

/// Renders a state as a legacy VTK unstructured grid: displacement,
/// velocity and damage as point data, stress and the norm of its deviator
/// as cell data. At `n = 0` the stress is the elastic stress of the initial
/// data.
pub fn vtk_string(sim: &Simulation, state: &TimeState) -> Result<String> {
    let mesh = sim.mesh();
    let stress = match &state.stress {
        Some(s) => s.clone(),
        None => elastic_stress(&state.u, &state.zeta, mesh, &sim.data().params, &sim.data().law)?,
    };
    let np = mesh.num_vertices();
    let nt = mesh.num_triangles();
    let mut s = String::with_capacity(200 * (np + nt));
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "step {} time {:e}", state.step, state.time);
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {np} double");
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:e} {:e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        let _ = writeln!(s, "5");
    }
    let _ = writeln!(s, "POINT_DATA {np}");
    for (name, field) in [("displacement", &state.u), ("velocity", &state.w)] {
        let _ = writeln!(s, "VECTORS {name} double");
        for v in &field.values {
            let _ = writeln!(s, "{:e} {:e} 0", v[0], v[1]);
        }
    }
    let _ = writeln!(s, "SCALARS damage double 1\nLOOKUP_TABLE default");
    for z in &state.zeta.values {
        let _ = writeln!(s, "{z:e}");
    }
    let _ = writeln!(s, "CELL_DATA {nt}");
    let _ = writeln!(s, "TENSORS stress double");
    for t in &stress.values {
        let _ = writeln!(s, "{:e} {:e} 0\n{:e} {:e} 0\n0 0 0", t.xx, t.xy, t.xy, t.yy);
    }
    let _ = writeln!(s, "SCALARS deviatoric_stress double 1\nLOOKUP_TABLE default");
    for t in &stress.values {
        let _ = writeln!(s, "{:e}", t.deviator().norm());
    }
    Ok(s)
}

pub fn write_vtk(path: &Path, sim: &Simulation, state: &TimeState) -> Result<()> {
    std::fs::write(path, vtk_string(sim, state)?)?;
    Ok(())
}

/// Counts and array names found by [`validate_vtk`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VtkSummary {
    pub points: usize,
    pub cells: usize,
    pub point_arrays: Vec<String>,
    pub cell_arrays: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(format!("VTK: {}", msg.into()))
}

struct Tokens<'a> {
    inner: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.inner.next().ok_or_else(|| invalid(format!("unexpected end while reading {what}")))
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        let got = self.next(word)?;
        if got == word {
            Ok(())
        } else {
            Err(invalid(format!("expected `{word}`, found `{got}`")))
        }
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let t = self.next(what)?;
        t.parse().map_err(|_| invalid(format!("{what}: `{t}` is not a count")))
    }

    fn finite(&mut self, what: &str) -> Result<f64> {
        let t = self.next(what)?;
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| invalid(format!("{what}: `{t}` is not a finite number")))
    }

    fn numbers(&mut self, n: usize, what: &str) -> Result<()> {
        for _ in 0..n {
            self.finite(what)?;
        }
        Ok(())
    }
}

fn read_arrays(tok: &mut Tokens, n: usize, names: &mut Vec<String>) -> Result<()> {
    while let Some(&kind) = tok.inner.peek() {
        let width = match kind {
            "SCALARS" | "VECTORS" | "TENSORS" => kind,
            _ => break,
        };
        tok.next("array")?;
        let name = tok.next("array name")?.to_string();
        tok.next("array type")?;
        let comps = match width {
            "SCALARS" => {
                if tok.inner.peek() != Some(&"LOOKUP_TABLE") {
                    tok.count("component count")?;
                }
                tok.expect("LOOKUP_TABLE")?;
                tok.next("lookup table")?;
                1
            }
            "VECTORS" => 3,
            _ => 9,
        };
        tok.numbers(n * comps, &name)?;
        names.push(name);
    }
    Ok(())
}

/// Checks that a legacy VTK unstructured grid has consistent counts, valid
/// connectivity and finite data.
pub fn validate_vtk(text: &str) -> Result<VtkSummary> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if !header.starts_with("# vtk DataFile Version") {
        return Err(invalid("missing header"));
    }
    lines.next();
    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let mut tok = Tokens {
        inner: rest.split_whitespace().peekable(),
    };
    tok.expect("ASCII")?;
    tok.expect("DATASET")?;
    tok.expect("UNSTRUCTURED_GRID")?;
    tok.expect("POINTS")?;
    let np = tok.count("point count")?;
    tok.next("point type")?;
    tok.numbers(3 * np, "points")?;
    tok.expect("CELLS")?;
    let nc = tok.count("cell count")?;
    let size = tok.count("cell list size")?;
    let mut used = 0;
    for _ in 0..nc {
        let k = tok.count("cell size")?;
        used += k + 1;
        for _ in 0..k {
            if tok.count("cell vertex")? >= np {
                return Err(invalid("cell vertex index out of range"));
            }
        }
    }
    if used != size {
        return Err(invalid(format!("cell list size {size} but {used} entries")));
    }
    tok.expect("CELL_TYPES")?;
    if tok.count("cell type count")? != nc {
        return Err(invalid("CELL_TYPES count differs from CELLS"));
    }
    for _ in 0..nc {
        tok.count("cell type")?;
    }
    let mut point_arrays = Vec::new();
    let mut cell_arrays = Vec::new();
    while let Some(section) = tok.inner.next() {
        match section {
            "POINT_DATA" => {
                if tok.count("point data count")? != np {
                    return Err(invalid("POINT_DATA count differs from POINTS"));
                }
                read_arrays(&mut tok, np, &mut point_arrays)?;
            }
            "CELL_DATA" => {
                if tok.count("cell data count")? != nc {
                    return Err(invalid("CELL_DATA count differs from CELLS"));
                }
                read_arrays(&mut tok, nc, &mut cell_arrays)?;
            }
            other => return Err(invalid(format!("unexpected token `{other}`"))),
        }
    }
    Ok(VtkSummary {
        points: np,
        cells: nc,
        point_arrays,
        cell_arrays,
    })
}

const TIMESERIES_HEADER: [&str; 5] = ["step", "time", "min_zeta", "max_zeta", "norm_w_v"];

pub fn write_timeseries(path: &Path, history: &[StepSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TIMESERIES_HEADER)?;
    for s in history {
        w.write_record([
            s.step.to_string(),
            format!("{:e}", s.time),
            format!("{:e}", s.min_zeta),
            format!("{:e}", s.max_zeta),
            format!("{:e}", s.norm_w_v),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_timeseries(path: &Path) -> Result<Vec<StepSummary>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<StepSummary>, _>>()?)
}

/// Result of [`run_experiment`].
#[derive(Debug)]
pub struct ExperimentOutput {
    pub run: SimulationRun,
    pub files: Vec<PathBuf>,
}

/// Runs a configured simulation and writes `fields_t0.vtk`, `fields_tN.vtk`
/// for the final state, `fields_t<n>.vtk` for other kept snapshots, and
/// `timeseries.csv` into `out_dir`.
pub fn run_experiment(config: &SimConfig, out_dir: &Path) -> Result<ExperimentOutput> {
    let sim = config.simulation()?;
    let run = sim.run(config.initial_state(&sim)?, config.snapshots)?;
    std::fs::create_dir_all(out_dir)?;
    let last = sim.grid().steps;
    let mut files = Vec::new();
    for state in &run.snapshots {
        let name = if state.step == last {
            "fields_tN.vtk".to_string()
        } else {
            format!("fields_t{}.vtk", state.step)
        };
        let path = out_dir.join(name);
        write_vtk(&path, &sim, state)?;
        files.push(path);
    }
    let ts = out_dir.join("timeseries.csv");
    write_timeseries(&ts, &run.history)?;
    files.push(ts);
    Ok(ExperimentOutput { run, files })
}
