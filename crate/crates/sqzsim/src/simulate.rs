//! Netlist to trace and report, with no file IO.

use sqzsim_core::budget::{build_report, Measured, SqueezingReport};
use sqzsim_core::homodyne::{sweep, synthesize_trace, HomodyneTrace};
use sqzsim_core::netlist::{compile, parse_bytes, CompiledCircuit};
use sqzsim_core::units::relative_to_db;

use crate::report::{number, report_object, to_json_string};
use crate::trace_csv::trace_to_string;
use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimulateOptions {
    /// Seed for the estimator noise. Without one the trace is noiseless.
    pub seed: Option<u64>,
    pub noiseless: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub circuit: CompiledCircuit,
    pub trace: HomodyneTrace,
    pub report: SqueezingReport,
}

impl Simulation {
    pub fn csv(&self) -> Result<String, AppError> {
        trace_to_string(&self.trace)
    }

    pub fn report_json(&self) -> String {
        let mut object = report_object(&self.report);
        let mut trace = serde_json::Map::new();
        trace.insert("points".into(), self.trace.len().into());
        trace.insert("noiseless".into(), self.trace.noiseless.into());
        trace.insert("seed".into(), self.trace.config.seed.into());
        trace.insert("eta_hd".into(), number(self.circuit.plan.eta_hd));
        object.insert("trace".into(), trace.into());
        to_json_string(object)
    }
}

pub fn run(source: &[u8], options: SimulateOptions) -> Result<Simulation, AppError> {
    let spec = parse_bytes(source)?;
    let circuit = compile(&spec)?;
    let state = circuit.simulate()?;
    let plan = &circuit.plan;
    let clean = sweep(&state, plan.mode, &plan.config, &plan.sweep)?;
    let (trace, uncertainty) = match options.seed {
        Some(seed) if !options.noiseless => {
            let config = sqzsim_core::homodyne::HomodyneConfig {
                seed: Some(seed),
                ..plan.config
            };
            let noisy = synthesize_trace(&clean, &config)?;
            (noisy, relative_to_db(config.estimator_relative_sigma()))
        }
        _ => (clean, 0.0),
    };
    let report = build_report(
        Measured::new(trace.min_db(), uncertainty),
        Measured::new(trace.max_db(), uncertainty),
        plan.detection_budget(),
    )?;
    Ok(Simulation {
        circuit,
        trace,
        report,
    })
}
