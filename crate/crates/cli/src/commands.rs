//! Command execution. Every command renders its CSV into memory and then
//! writes it in one piece, so the bytes never depend on scheduling.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;

use mfsec_core::montecarlo::McConfig;
use mfsec_core::protocol::{run_protocol_trial, TrialOutcome};
use mfsec_core::Scheme;

use crate::config::{Command, RunSpec};
use crate::error::{CliError, Result};
use crate::format::g12;
use crate::validate::{self, ValidateOptions};
use crate::{parallel, table};

pub const MC_HEADER: &str = "scheme,p_hat,std_err,n_trials,seed";
pub const PROTOCOL_HEADER: &str = "trial,relay_failure,destination_ber,eavesdropper_ber,eavesdropper_source_ber";
pub const DEFAULT_REPORT: &str = "validation_report.md";

/// Created before the computation so an unwritable path fails fast.
enum Sink {
    Stdout,
    File(File, std::path::PathBuf),
}

impl Sink {
    fn open(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => File::create(p)
                .map(|f| Sink::File(f, p.to_path_buf()))
                .map_err(|source| CliError::Output { path: p.to_path_buf(), source }),
        }
    }

    fn finish(self, bytes: &[u8]) -> Result<()> {
        match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(bytes).and_then(|_| out.flush()).map_err(|source| CliError::Output {
                    path: "<stdout>".into(),
                    source,
                })
            }
            Sink::File(mut f, path) => f.write_all(bytes).map_err(|source| CliError::Output { path, source }),
        }
    }

    fn abandon(self) {
        if let Sink::File(f, path) = self {
            drop(f);
            let _ = fs::remove_file(path);
        }
    }
}

fn emit(path: Option<&Path>, render: impl FnOnce() -> Result<Vec<u8>>) -> Result<()> {
    let sink = Sink::open(path)?;
    match render() {
        Ok(bytes) => sink.finish(&bytes),
        Err(e) => {
            sink.abandon();
            Err(e)
        }
    }
}

pub fn run(spec: &RunSpec) -> Result<()> {
    spec.validate()?;
    match spec.command {
        Command::Point | Command::Sweep | Command::Fig2 | Command::Fig3 | Command::Fig4 => {
            emit(spec.output.as_deref(), || render_table(spec))
        }
        Command::Mc => emit(spec.output.as_deref(), || render_mc(spec)),
        Command::Protocol => emit(spec.output.as_deref(), || render_protocol(spec)),
        Command::Validate => run_validate(spec),
    }
}

pub fn render_table(spec: &RunSpec) -> Result<Vec<u8>> {
    let t = if spec.command == Command::Point { table::compute_point(spec)? } else { table::compute(spec)? };
    let mut buf = Vec::new();
    table::write_csv(&mut buf, spec, &t).expect("in-memory write");
    Ok(buf)
}

pub fn render_mc(spec: &RunSpec) -> Result<Vec<u8>> {
    let profile = spec.profile()?;
    let rate = spec.target_rate()?;
    let rows: Vec<(Scheme, mfsec_core::OutageEstimate)> = if spec.scheme == "all" {
        let est = parallel::estimate_paired(&profile, rate, spec.n_trials, spec.seed, spec.workers)?;
        Scheme::ALL.into_iter().map(|s| (s, *est.get(s))).collect()
    } else {
        let scheme = spec.scheme()?;
        let cfg = McConfig { n_trials: spec.n_trials, seed: spec.seed, scheme, profile, rate };
        vec![(scheme, parallel::estimate_outage(&cfg, spec.workers)?)]
    };
    let mut buf = Vec::new();
    writeln!(buf, "{}", spec.provenance()).expect("in-memory write");
    writeln!(buf, "{MC_HEADER}").expect("in-memory write");
    for (s, e) in rows {
        writeln!(buf, "{},{},{},{},{}", s.name(), g12(e.p_hat), g12(e.std_err), e.n_trials, e.seed)
            .expect("in-memory write");
    }
    Ok(buf)
}

pub fn render_protocol(spec: &RunSpec) -> Result<Vec<u8>> {
    let profile = spec.profile()?;
    let cfg = spec.protocol_config();
    let trials: Vec<u64> = (0..spec.n_trials).collect();
    let outcomes = parallel::map_ordered(&trials, spec.workers, |&i| run_protocol_trial(&profile, &cfg, spec.seed, i));
    let mut buf = Vec::new();
    writeln!(buf, "{}", spec.provenance()).expect("in-memory write");
    writeln!(buf, "{PROTOCOL_HEADER}").expect("in-memory write");
    for (i, o) in trials.iter().zip(outcomes) {
        let line = match o? {
            TrialOutcome::RelayFailure => format!("{i},true,,,"),
            TrialOutcome::Completed { destination_ber, eavesdropper_ber, eavesdropper_source_ber } => format!(
                "{i},false,{},{},{}",
                g12(destination_ber),
                g12(eavesdropper_ber),
                g12(eavesdropper_source_ber)
            ),
        };
        writeln!(buf, "{line}").expect("in-memory write");
    }
    Ok(buf)
}

fn run_validate(spec: &RunSpec) -> Result<()> {
    let report_path = spec.report.clone().unwrap_or_else(|| DEFAULT_REPORT.into());
    let csv_sink = Sink::open(spec.output.as_deref())?;
    let report_sink = match Sink::open(Some(&report_path)) {
        Ok(s) => s,
        Err(e) => {
            csv_sink.abandon();
            return Err(e);
        }
    };
    let v = match validate::run(ValidateOptions { n_trials: spec.n_trials, seed: spec.seed, workers: spec.workers }) {
        Ok(v) => v,
        Err(e) => {
            csv_sink.abandon();
            report_sink.abandon();
            return Err(e);
        }
    };
    let mut csv = Vec::new();
    validate::write_csv(&mut csv, &spec.provenance(), &v).expect("in-memory write");
    csv_sink.finish(&csv)?;
    report_sink.finish(validate::report(&v).as_bytes())?;
    eprintln!(
        "DF matching variant: {}; CJ matching variant: {}; report written to {}",
        v.matching_df().unwrap_or("none"),
        v.matching_cj().unwrap_or("none"),
        report_path.display()
    );
    if v.closed_forms_ok() {
        Ok(())
    } else {
        Err(CliError::Formula("MF/DT closed forms disagree with their oracles; see the report".into()))
    }
}

#[cfg(test)]
mod tests {
    use std::fs;
    use std::path::PathBuf;

    use crate::cli::main_with;
    use crate::table::{HEADER_DB, HEADER_RATE};

    /// Runs the CLI in-process with `-o <tmp>`; returns exit code and CSV text.
    fn run(args: &[&str]) -> (i32, String) {
        let dir = tempfile::tempdir().unwrap();
        let out: PathBuf = dir.path().join("out.csv");
        let mut full = vec!["mfsec"];
        full.extend_from_slice(args);
        full.extend(["-o", out.to_str().unwrap()]);
        let code = main_with(full);
        (code, fs::read_to_string(out).unwrap_or_default())
    }

    fn code(args: &[&str]) -> i32 {
        main_with(std::iter::once("mfsec").chain(args.iter().copied()))
    }

    fn rows(csv: &str) -> Vec<Vec<String>> {
        csv.lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect()
    }

    #[test]
    fn fig2_csv_schema_and_shape() {
        let (code, text) = run(&["fig2", "-n", "20000"]);
        assert_eq!(code, 0);
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# mfsec {\"command\":\"fig2\""));
        assert_eq!(lines.next().unwrap(), HEADER_DB);
        let rows = rows(&text);
        assert_eq!(rows.len(), 21);
        assert!(rows.iter().all(|r| r[0] == "gamma_se" && r.len() == 17));
        let mf: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
        assert!(mf.windows(2).all(|w| w[1] >= w[0]), "{mf:?}");
        for r in &rows {
            for v in &r[2..15] {
                assert!((0.0..=1.0).contains(&v.parse::<f64>().unwrap()), "{r:?}");
            }
        }
    }

    #[test]
    fn fig4_uses_rate_header() {
        let (_, text) = run(&["fig4", "-n", "1000"]);
        assert_eq!(text.lines().nth(1).unwrap(), HEADER_RATE);
        let rows = rows(&text);
        assert_eq!(rows.first().unwrap()[1], "0.1");
        assert_eq!(rows.last().unwrap()[1], "2");
    }

    #[test]
    fn strong_eavesdropper_saturates_every_scheme() {
        let (code, text) = run(&["point", "--gamma-se-db", "90", "-n", "1000"]);
        assert_eq!(code, 0);
        let row = &rows(&text)[0];
        for k in (2..15).filter(|k| *k < 7 || k % 2 == 1) {
            assert!(row[k].parse::<f64>().unwrap() > 0.999_99, "{row:?}");
        }
    }

    #[test]
    fn config_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        fs::write(&cfg, r#"{"gamma_se_db": 4.5, "n_trials": 500, "seed": 1}"#).unwrap();
        let (code, text) = run(&["point", "--config", cfg.to_str().unwrap(), "--seed", "2"]);
        assert_eq!(code, 0);
        let header = text.lines().next().unwrap();
        assert!(header.contains("\"gamma_se_db\":4.5") && header.contains("\"seed\":2") && header.contains("\"n_trials\":500"));
        assert_eq!(rows(&text)[0][1], "4.5");
    }

    #[test]
    fn mc_and_protocol_outputs() {
        let (_, one) = run(&["mc", "--scheme", "dt", "-n", "1000", "--seed", "5"]);
        assert_eq!(one.lines().nth(1).unwrap(), super::MC_HEADER);
        let dt_row = one.lines().nth(2).unwrap();
        assert!(dt_row.starts_with("dt,") && dt_row.ends_with(",1000,5"));
        let (_, all) = run(&["mc", "--scheme", "all", "-n", "1000", "--seed", "5"]);
        assert_eq!(all.lines().count(), 6);
        assert!(all.lines().any(|l| l == dt_row), "paired DT row equals the single-scheme run");

        let (_, text) = run(&["protocol", "-n", "10", "--block-len", "64", "--noiseless", "--gamma-sr-db", "60"]);
        assert_eq!(text.lines().nth(1).unwrap(), super::PROTOCOL_HEADER);
        assert_eq!(text.lines().count(), 12);
        for line in text.lines().skip(2) {
            let f: Vec<_> = line.split(',').collect();
            assert_eq!((f[1], f[2]), ("false", "0"));
        }
    }

    #[test]
    fn validate_writes_report() {
        let dir = tempfile::tempdir().unwrap();
        let md = dir.path().join("v.md");
        let (code, csv) = run(&["validate", "-n", "200000", "--report", md.to_str().unwrap()]);
        assert_eq!(code, 0);
        let report = fs::read_to_string(md).unwrap();
        assert!(report.contains("Matching DF variant: `as_printed`"), "{report}");
        assert_eq!(csv.lines().nth(1).unwrap(), crate::validate::CSV_HEADER);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(code(&["--help"]), 0);
        assert_eq!(code(&["--version"]), 0);
        assert_eq!(code(&["bogus"]), 1);
        assert_eq!(code(&["point", "--trials", "many"]), 1);
        assert_eq!(code(&["sweep", "--sweep-var", "gamma_xx"]), 1);
        assert_eq!(code(&["point", "--config", "/nonexistent/run.json"]), 1);
        assert_eq!(code(&["point", "--gamma-sd-db", "inf"]), 2);
        assert_eq!(code(&["sweep", "--step", "0"]), 2);
        assert_eq!(code(&["sweep", "--start", "5", "--stop", "1"]), 2);
        assert_eq!(code(&["point", "--rate", "-1"]), 2);
        assert_eq!(code(&["point", "-n", "10", "-o", "/nonexistent/dir/out.csv"]), 3);
    }

    #[test]
    fn formula_inconsistency_exits_4_without_partial_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("p.csv");
        let args = ["point", "-n", "10", "--gamma-se-db", "-5", "--gamma-re-db", "-10", "--rate", "1", "-o"];
        assert_eq!(code(&[&args[..], &[out.to_str().unwrap()]].concat()), 4);
        assert!(!out.exists());
    }
}
