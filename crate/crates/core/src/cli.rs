//! The `dpgon` command line.
//!
//! Exit codes: 0 on success, 1 when a class fails validation or an audit finds
//! discrepancies, 2 for usage and parse errors.
//!
//! If `DPGON_CACHE` names a directory, curve tables are read from and written
//! to `curves-S<n>.json` there.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::cones::{curve_table, install_curve_table, CurveClassTable, CurveKind};
use crate::error::Error;
use crate::gonality::{analyze, AnalysisReport, CaseTag, PencilDescriptor, Subfamily};
use crate::lattice::{DivisorClass, SurfaceId};
use crate::tabulate::{audit_with, sweep, AuditOptions, Coverage, Format, SweepSpec};

#[derive(Debug, Parser)]
#[command(
    name = "dpgon",
    about = "Gonality and Clifford index of curves on Del Pezzo surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyse one linear system |L|.
    Analyze {
        /// Class in `n:a;b1,...,bn` form.
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum)]
        subfamily: Option<SubfamilyArg>,
    },
    /// List the (-1)-curves, conic classes or line-pullback classes.
    Curves {
        #[arg(long)]
        surface: usize,
        #[arg(long = "type", value_enum)]
        kind: KindArg,
        #[arg(long)]
        json: bool,
    },
    /// Analyse every nef class up to a given anticanonical degree.
    Sweep {
        #[arg(long)]
        surface: usize,
        #[arg(long)]
        max_kdeg: i64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compare the structured search with brute force over a box.
    Audit {
        #[arg(long)]
        surface: usize,
        #[arg(long)]
        max_kdeg: i64,
        /// `full` visits every class, `orbits` one class per Weyl orbit.
        /// Defaults to `full` up to seven points.
        #[arg(long, value_enum)]
        coverage: Option<CoverageArg>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SubfamilyArg {
    General,
    Special,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Neg1,
    Conic,
    Sq1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CoverageArg {
    Full,
    Orbits,
}

/// A failure with the exit code it maps to.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Lattice(_) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure(1, e.to_string())
}

fn surface_arg(n: usize) -> Result<SurfaceId, Failure> {
    SurfaceId::new(n).map_err(|e| Failure(2, e.to_string()))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Failure(2, "--jobs must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Failure(1, e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Analyze { class, json, subfamily } => {
            let l: DivisorClass = class
                .parse()
                .map_err(|e: crate::lattice::LatticeError| Failure(2, e.to_string()))?;
            load_cache(l.surface(), err);
            let report = analyze(&l)?;
            store_cache(l.surface(), err);
            let subfamily = subfamily.map(|s| match s {
                SubfamilyArg::General => Subfamily::General,
                SubfamilyArg::Special => Subfamily::Special,
            });
            if subfamily == Some(Subfamily::Special) && report.gonality.case_tag == CaseTag::Constant {
                return Err(Failure(
                    1,
                    format!("{l} has constant gonality, there is no special subfamily"),
                ));
            }
            if json {
                serde_json::to_writer_pretty(&mut *out, &report).map_err(|e| Failure(1, e.to_string()))?;
                writeln!(out).map_err(io)?;
            } else {
                write_report(out, &report, subfamily).map_err(io)?;
            }
            Ok(0)
        }
        Command::Curves { surface, kind, json } => {
            let surface = surface_arg(surface)?;
            load_cache(surface, err);
            let kind = match kind {
                KindArg::Neg1 => CurveKind::Neg1,
                KindArg::Conic => CurveKind::Conic,
                KindArg::Sq1 => CurveKind::Sq1,
            };
            let classes = curve_table(surface).of_kind(kind);
            store_cache(surface, err);
            if json {
                let body = serde_json::json!({
                    "surface": surface.n(),
                    "type": kind,
                    "count": classes.len(),
                    "classes": classes,
                });
                serde_json::to_writer_pretty(&mut *out, &body).map_err(|e| Failure(1, e.to_string()))?;
                writeln!(out).map_err(io)?;
            } else {
                let mut w = csv::Writer::from_writer(&mut *out);
                let csv_err = |e: csv::Error| Failure(1, e.to_string());
                w.write_record(["class", "self_intersection", "kdeg"])
                    .map_err(csv_err)?;
                for c in classes {
                    w.write_record([c.to_string(), c.self_intersection().to_string(), c.kdeg().to_string()])
                        .map_err(csv_err)?;
                }
                w.flush().map_err(io)?;
            }
            Ok(0)
        }
        Command::Sweep {
            surface,
            max_kdeg,
            out: path,
            format,
            jobs,
        } => {
            let surface = surface_arg(surface)?;
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            load_cache(surface, err);
            let spec = SweepSpec::new(surface, max_kdeg, &path, format);
            let rows = with_jobs(jobs, || sweep(&spec))??;
            store_cache(surface, err);
            writeln!(out, "wrote {rows} rows to {}", path.display()).map_err(io)?;
            Ok(0)
        }
        Command::Audit {
            surface,
            max_kdeg,
            coverage,
            jobs,
            json,
        } => {
            let surface = surface_arg(surface)?;
            let mut options = AuditOptions::for_surface(surface);
            match coverage {
                Some(CoverageArg::Full) => options.coverage = Coverage::Full,
                Some(CoverageArg::Orbits) => options.coverage = Coverage::WeylOrbits,
                None => {}
            }
            load_cache(surface, err);
            let found = with_jobs(jobs, || audit_with(surface, max_kdeg, options))?;
            store_cache(surface, err);
            if json {
                serde_json::to_writer_pretty(&mut *out, &found).map_err(|e| Failure(1, e.to_string()))?;
                writeln!(out).map_err(io)?;
            } else {
                for d in &found {
                    writeln!(out, "{}\t{}\t{}", d.class, d.check, d.detail).map_err(io)?;
                }
                writeln!(out, "{} discrepancies", found.len()).map_err(io)?;
            }
            Ok(if found.is_empty() { 0 } else { 1 })
        }
    }
}

fn write_pencils(out: &mut dyn Write, label: &str, list: &[PencilDescriptor]) -> std::io::Result<()> {
    for p in list {
        let d = p.d.map(|d| d.to_string()).unwrap_or_else(|| "none".into());
        writeln!(
            out,
            "pencil ({label}): {} D={} {} [{}] degree {}",
            p.clause,
            d,
            p.correction.as_str(),
            p.applicability,
            p.degree
        )?;
    }
    Ok(())
}

fn write_report(out: &mut dyn Write, r: &AnalysisReport, subfamily: Option<Subfamily>) -> std::io::Result<()> {
    let g = &r.gonality;
    let c = &r.clifford;
    writeln!(out, "class: {}", g.l)?;
    writeln!(out, "genus: {}", g.genus)?;
    writeln!(out, "k0: {}", g.k0)?;
    for m in &g.minimal_set {
        writeln!(out, "minimal divisor: {} value {} ({})", m.d, m.value, m.kind.as_str())?;
    }
    writeln!(out, "case: {}", g.case_tag.as_str())?;
    match g.gonality_special {
        Some(s) => writeln!(
            out,
            "gonality: {} general, {} special ({})",
            g.gonality_general,
            s,
            g.special_family.as_deref().unwrap_or_default()
        )?,
        None => writeln!(out, "gonality: {}", g.gonality_general)?,
    }
    if c.defined {
        let general = c.clifford_general.unwrap_or_default();
        match c.clifford_special {
            Some(s) => writeln!(out, "clifford index: {general} general, {s} special")?,
            None => writeln!(out, "clifford index: {general}")?,
        }
        writeln!(out, "clifford dimension: {}", c.clifford_dimension.unwrap_or(1))?;
        match c.exceptional_witness {
            Some(w) => writeln!(out, "exceptional: yes, witness {w}")?,
            None => writeln!(out, "exceptional: no")?,
        }
    } else {
        writeln!(out, "clifford index: undefined (genus below 4)")?;
    }
    writeln!(out, "k_max: {}", r.k_max)?;
    if subfamily != Some(Subfamily::Special) {
        write_pencils(out, "general", &r.pencils_general)?;
    }
    if subfamily != Some(Subfamily::General) {
        if let Some(list) = &r.pencils_special {
            write_pencils(out, "special", list)?;
        }
    }
    Ok(())
}

fn cache_file(surface: SurfaceId) -> Option<PathBuf> {
    let dir = std::env::var_os("DPGON_CACHE")?;
    Some(Path::new(&dir).join(format!("curves-S{}.json", surface.n())))
}

/// Installs a cached curve table if one is present and valid. Problems with
/// the cache are reported and otherwise ignored.
fn load_cache(surface: SurfaceId, err: &mut dyn Write) {
    let Some(path) = cache_file(surface) else { return };
    let Ok(text) = std::fs::read_to_string(&path) else {
        return;
    };
    let result = serde_json::from_str::<CurveClassTable>(&text)
        .map_err(Error::from)
        .and_then(|t| {
            if t.surface == surface {
                install_curve_table(t)
            } else {
                Err(Error::InvalidArgument("wrong surface".into()))
            }
        });
    if let Err(e) = result {
        let _ = writeln!(err, "warning: ignoring curve cache {}: {e}", path.display());
    }
}

fn store_cache(surface: SurfaceId, err: &mut dyn Write) {
    let Some(path) = cache_file(surface) else { return };
    if path.exists() {
        return;
    }
    let write = || -> Result<(), Error> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("json.partial");
        std::fs::write(&tmp, serde_json::to_vec(curve_table(surface))?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    };
    if let Err(e) = write() {
        let _ = writeln!(err, "warning: could not write curve cache {}: {e}", path.display());
    }
}
