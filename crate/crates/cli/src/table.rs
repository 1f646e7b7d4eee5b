//! Analytic and Monte Carlo outage tables and their CSV form.

use std::io::{self, Write};

use mfsec_core::analytic::{outage_cj, outage_df, outage_dt, outage_mf, CjVariant, DfVariant};
use mfsec_core::montecarlo::{point_seed, PairedEstimate, SweepParameter};
use mfsec_core::{linear_to_db, SnrProfile, TargetRate};

use crate::config::RunSpec;
use crate::error::Result;
use crate::format::g12;
use crate::parallel;

pub const HEADER_DB: &str = "sweep_var,sweep_value_db,po_mf,po_dt,po_df_printed,po_df_corrected,po_cj,\
mc_mf,mc_mf_stderr,mc_dt,mc_dt_stderr,mc_df,mc_df_stderr,mc_cj,mc_cj_stderr,n_trials,seed";
pub const HEADER_RATE: &str = "sweep_var,sweep_value_bpshz,po_mf,po_dt,po_df_printed,po_df_corrected,po_cj,\
mc_mf,mc_mf_stderr,mc_dt,mc_dt_stderr,mc_df,mc_df_stderr,mc_cj,mc_cj_stderr,n_trials,seed";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analytic {
    pub mf: f64,
    pub dt: f64,
    pub df_printed: f64,
    pub df_corrected: f64,
    /// As-printed CJ closed form.
    pub cj: f64,
}

impl Analytic {
    pub fn evaluate(p: &SnrProfile, r: TargetRate) -> Result<Self> {
        Ok(Self {
            mf: outage_mf(p, r)?,
            dt: outage_dt(p, r)?,
            df_printed: outage_df(p, r, DfVariant::AsPrinted)?,
            df_corrected: outage_df(p, r, DfVariant::Corrected)?,
            cj: outage_cj(p, r, CjVariant::AsPrinted)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// dB for SNR sweeps, b/s/Hz for rate sweeps.
    pub value: f64,
    pub analytic: Analytic,
    pub mc: PairedEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub parameter: SweepParameter,
    pub rows: Vec<Row>,
}

/// Evaluates every grid point of `spec`. Point `i` is simulated with
/// `point_seed(spec.seed, i)`.
pub fn compute(spec: &RunSpec) -> Result<Table> {
    let parameter = spec.sweep_parameter()?;
    let base = spec.profile()?;
    let rate = spec.target_rate()?;
    let sweep = spec.sweep()?;
    let values = spec.grid()?;
    let mut rows = Vec::with_capacity(values.len());
    for (i, (&value, &core_value)) in values.iter().zip(&sweep.grid).enumerate() {
        let (p, r) = parameter.apply(&base, rate, core_value)?;
        let analytic = Analytic::evaluate(&p, r)?;
        let mc = parallel::estimate_paired(&p, r, spec.n_trials, point_seed(spec.seed, i), spec.workers)?;
        rows.push(Row { value, analytic, mc });
    }
    Ok(Table { parameter, rows })
}

/// A single operating point, written as a one-row γ_se table.
pub fn compute_point(spec: &RunSpec) -> Result<Table> {
    let mut one = spec.clone();
    one.sweep_var = SweepParameter::GammaSe.name().into();
    one.start = spec.gamma_se_db;
    one.stop = spec.gamma_se_db;
    one.step = 1.0;
    let t = compute(&one)?;
    debug_assert!((linear_to_db(one.profile()?.gamma_se) - t.rows[0].value).abs() < 1e-9);
    Ok(t)
}

pub fn write_csv<W: Write>(out: &mut W, spec: &RunSpec, table: &Table) -> io::Result<()> {
    writeln!(out, "{}", spec.provenance())?;
    let header = if table.parameter.is_snr() { HEADER_DB } else { HEADER_RATE };
    writeln!(out, "{header}")?;
    for row in &table.rows {
        let a = &row.analytic;
        let m = &row.mc;
        let fields = [
            table.parameter.name().to_string(),
            g12(row.value),
            g12(a.mf),
            g12(a.dt),
            g12(a.df_printed),
            g12(a.df_corrected),
            g12(a.cj),
            g12(m.mf.p_hat),
            g12(m.mf.std_err),
            g12(m.dt.p_hat),
            g12(m.dt.std_err),
            g12(m.df.p_hat),
            g12(m.df.std_err),
            g12(m.cj.p_hat),
            g12(m.cj.std_err),
            m.mf.n_trials.to_string(),
            m.mf.seed.to_string(),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
