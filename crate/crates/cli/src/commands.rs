//! Dispatch from parsed arguments to reports.

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;
use namebench_core::canjar::{cn_check, is_full_window, splice, CnVerdict, FullnessVerdict};
use namebench_core::filters::{
    ap1_diagonalize, borel_cantelli_verdict, nu_window, prefix_join_measure, BcVerdict,
};
use namebench_core::solovay::{density, partition_family, tail_limit_window, DensityOutcome, MeasureValue, DEFAULT_PARTITION_BOUND};
use namebench_core::{Clopen, Dyadic, EventuallyPeriodicSet, IntervalPartition, Name, Schedule};
use serde_json::{json, Value};

use crate::cli::{BcCmd, CanjarCmd, Cli, Command, EvalCmd, GlobalArgs, NameArg, SolovayCmd};
use crate::report::{CommandReport, SuiteReport};
use crate::settings::{Format, Settings};
use crate::suites::{j, run_suite, SUITES};
use crate::{parse, CliError};

/// Exponents `e` of the `ε = 2^-e` rows in certificate tables.
const TABLE_EXPONENTS: [u32; 4] = [1, 5, 10, 20];

pub enum Output {
    Suites(Vec<SuiteReport>),
    Command(CommandReport),
}

impl Output {
    pub fn passed(&self) -> bool {
        match self {
            Output::Suites(rs) => rs.iter().all(SuiteReport::all_pass),
            Output::Command(_) => true,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Suites(rs), Format::Json) if rs.len() == 1 => rs[0].to_json(),
            (Output::Suites(rs), Format::Json) => {
                serde_json::to_string_pretty(&json!({ "schema": crate::report::SCHEMA, "suites": rs }))
                    .expect("reports serialize")
                    + "\n"
            }
            (Output::Suites(rs), Format::Tsv) => {
                let mut out = String::new();
                for (i, r) in rs.iter().enumerate() {
                    let tsv = r.to_tsv();
                    // one header for the whole table
                    out.push_str(if i == 0 { &tsv } else { tsv.split_once('\n').map_or("", |(_, rest)| rest) });
                }
                out
            }
            (Output::Command(r), Format::Json) => r.to_json(),
            (Output::Command(r), Format::Tsv) => r.to_tsv(),
        }
    }
}

pub fn settings_from(global: &GlobalArgs) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = &global.config {
        s.apply_config_file(path)?;
    }
    if let Some(v) = global.seed {
        s.seed = v;
    }
    if let Some(v) = global.window {
        s.window = v;
    }
    if let Some(v) = global.depth {
        s.set("depth", &v.to_string())?;
    }
    if let Some(v) = &global.format {
        s.set("format", v)?;
    }
    if let Some(v) = &global.thread {
        s.set("thread", v)?;
    }
    if let Some(v) = &global.out {
        s.out = Some(v.display().to_string());
    }
    Ok(s)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_name(arg: &NameArg) -> Result<Name, CliError> {
    match (&arg.name, &arg.name_file) {
        (Some(text), _) => parse("name", text),
        (None, Some(path)) => parse("name", read(path)?.trim()),
        (None, None) => Err(CliError::Usage("a name is required (--name or --name-file)".into())),
    }
}

/// A JSON list of names, or one inline name per line with `#` comments.
pub fn load_names(path: &Path) -> Result<Vec<Name>, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        let names: Vec<Name> =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for n in &names {
            n.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        }
        return Ok(names);
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse("name", l))
        .collect()
}

fn measure_provenance(v: &MeasureValue) -> String {
    match v {
        MeasureValue::Exact {
            stabilization_index, ..
        } => format!("structural: stabilizes from k = {stabilization_index}"),
        MeasureValue::Conditional { .. } => "structural: one value per residue class, chosen by the thread".into(),
        MeasureValue::Interval { window, .. } => format!("window: no stabilization proof, range over k ≤ {window}"),
    }
}

fn eps_rows() -> Vec<Dyadic> {
    TABLE_EXPONENTS.iter().map(|&e| Dyadic::pow2_neg(e)).collect()
}

fn tail_limit_report(command: &str, m: &Name, b: &Clopen, s: &Settings) -> CommandReport {
    let v = tail_limit_window(m, b, s.window);
    CommandReport::new(
        command,
        json!({ "name": m.to_string(), "clopen": b.to_string(), "window": s.window }),
        j(&v),
        measure_provenance(&v),
    )
}

fn density_report(command: &str, m: &Name) -> Result<CommandReport, CliError> {
    let d = density(m)?;
    let provenance = match &d {
        DensityOutcome::Density(_) => "structural: cell densities of the symbolic tail",
        DensityOutcome::Conditional(_) => "structural: one density per residue class, chosen by the thread",
    };
    let constant = d.unconditional().and_then(|d| d.as_constant().cloned());
    Ok(CommandReport::new(
        command,
        json!({ "name": m.to_string() }),
        json!({ "density": j(&d), "constant": j(&constant) }),
        provenance,
    ))
}

fn bc_report(command: &str, sch: &Schedule, x: &EventuallyPeriodicSet) -> Result<CommandReport, CliError> {
    let inputs = json!({ "schedule": sch.to_string(), "set": x.to_string() });
    Ok(match borel_cantelli_verdict(sch, x)? {
        BcVerdict::Divergent(cert) => {
            let rows = eps_rows()
                .into_iter()
                .map(|eps| {
                    let n = cert.n_for(&eps)?;
                    Ok(json!({ "epsilon": j(&eps), "n": n, "product_bound": j(cert.bound_at(n)) }))
                })
                .collect::<Result<Vec<Value>, CliError>>()?;
            CommandReport::new(
                command,
                inputs,
                json!({ "verdict": "divergent", "table": rows }),
                "closed-form: N(ε) is the least N with Π(1 − a_k) < ε",
            )
        }
        BcVerdict::Convergent(cert) => {
            let rows: Vec<Value> = (0..=10u64)
                .map(|n| json!({ "n": n, "tail_bound": j(cert.tail_bound(n)) }))
                .collect();
            CommandReport::new(
                command,
                inputs,
                json!({ "verdict": "convergent", "reason": j(cert.reason), "table": rows }),
                "closed-form: explicit bound on Σ_{k>n} a_k",
            )
        }
    })
}

fn full_report(command: &str, m: &Name, p: &Clopen, x: &EventuallyPeriodicSet, s: &Settings) -> Result<CommandReport, CliError> {
    let inputs = json!({ "name": m.to_string(), "p": p.to_string(), "set": x.to_string(), "window": s.window });
    let v = is_full_window(m, p, x, s.window)?;
    let (result, provenance) = match &v {
        FullnessVerdict::Full(cert) => {
            let table = cert.table(&eps_rows())?;
            (
                json!({ "verdict": "full", "certificate": j(cert), "table": j(&table) }),
                format!("certificate: {}", cert.kind()),
            )
        }
        FullnessVerdict::NotFull { attained, .. } => (
            j(&v),
            if *attained {
                "exact: the prefix join stabilizes".to_string()
            } else {
                "structural: exact limit of the residuals".to_string()
            },
        ),
        FullnessVerdict::Unknown { .. } => (j(&v), "window: exact residual at the window only".to_string()),
    };
    Ok(CommandReport::new(command, inputs, result, provenance))
}

fn run_command(command: &Command, s: &Settings) -> Result<Output, CliError> {
    let report = match command {
        Command::Suite { id } => {
            let ids: Vec<&str> = if id == "all" { SUITES.to_vec() } else { vec![id.as_str()] };
            let reports = ids
                .into_iter()
                .map(|id| {
                    let start = std::time::Instant::now();
                    let r = run_suite(id, s)?;
                    eprintln!(
                        "{id}: {} passed, {} failed in {:.2}s",
                        r.passed,
                        r.failed,
                        start.elapsed().as_secs_f64()
                    );
                    Ok(r)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            return Ok(Output::Suites(reports));
        }
        Command::Solovay(SolovayCmd::Density { name }) => density_report("solovay density", &load_name(name)?)?,
        Command::Solovay(SolovayCmd::TailLimit { name, clopen }) => {
            tail_limit_report("solovay tail-limit", &load_name(name)?, &parse("clopen", clopen)?, s)
        }
        Command::Solovay(SolovayCmd::Partition { n }) => {
            let family = partition_family(*n, DEFAULT_PARTITION_BOUND)?;
            let names: Vec<Value> = family
                .iter()
                .map(|m| {
                    let c = density(m).ok().and_then(|d| d.unconditional().and_then(|d| d.as_constant().cloned()));
                    json!({ "name": m.to_string(), "density": j(&c) })
                })
                .collect();
            CommandReport::new(
                "solovay partition",
                json!({ "n": n }),
                json!({ "names": names }),
                "structural: sibling split of the sliding patterns",
            )
        }
        Command::Bc(BcCmd::Verdict { schedule, set }) => {
            bc_report("bc verdict", &parse("schedule", schedule)?, &parse("set", set)?)?
        }
        Command::Bc(BcCmd::PrefixJoin { schedule, set, n, big_n }) => {
            let sch: Schedule = parse("schedule", schedule)?;
            let x: EventuallyPeriodicSet = parse("set", set)?;
            let m = namebench_core::filters::fresh_independent(&sch)?;
            let v = prefix_join_measure(&m, &x, *n, *big_n)?;
            CommandReport::new(
                "bc prefix-join",
                json!({ "schedule": sch.to_string(), "set": x.to_string(), "n": n, "N": big_n }),
                json!({ "measure": j(&v) }),
                "closed-form: 1 − Π_{k∈X, n<k≤N} (1 − a_k)",
            )
        }
        Command::Ap1 { names } => {
            let ms = load_names(names)?;
            let (m, report) = ap1_diagonalize(&ms, &s.thread, s.window)?;
            CommandReport::new(
                "ap1",
                json!({ "names": ms.iter().map(|m| m.to_string()).collect::<Vec<_>>(), "thread": s.thread.to_string(), "window": s.window }),
                json!({ "name": m.to_string(), "report": j(&report) }),
                "structural: splice along members of the finite intersection of the U_n",
            )
        }
        Command::Canjar(CanjarCmd::Full { name, p, set }) => {
            full_report("canjar full", &load_name(name)?, &parse("clopen", p)?, &parse("set", set)?, s)?
        }
        Command::Canjar(CanjarCmd::Cn { name, p, n, set, big_n }) => {
            let e = load_name(name)?;
            let (p, x): (Clopen, EventuallyPeriodicSet) = (parse("clopen", p)?, parse("set", set)?);
            let v = cn_check(&e, &p, *n, &x, *big_n)?;
            let provenance = match v {
                CnVerdict::InCnUpTo { .. } => "exact prefix join; membership is established only up to N",
                CnVerdict::NotInCn { .. } => "exact prefix join; the full join only grows, so this is final",
            };
            CommandReport::new(
                "canjar cn",
                json!({ "name": e.to_string(), "p": p.to_string(), "n": n, "set": x.to_string(), "N": big_n }),
                j(&v),
                provenance,
            )
        }
        Command::Canjar(CanjarCmd::Splice { cuts, names }) => {
            let cuts: IntervalPartition = parse("cuts", cuts)?;
            let es = load_names(names)?;
            let e = splice(&cuts, &es)?;
            let values: Vec<Value> = (0..=s.window)
                .map(|k| json!({ "k": k, "interval": cuts.interval_index(k), "measure": j(e.eval(k).measure()) }))
                .collect();
            CommandReport::new(
                "canjar splice",
                json!({ "cuts": cuts.to_string(), "names": es.iter().map(|m| m.to_string()).collect::<Vec<_>>() }),
                json!({ "name": e.to_string(), "values": values }),
                "structural: E(k) = E_n(k) for k in I_n",
            )
        }
        Command::Eval(EvalCmd::TailLimit { name, clopen }) => {
            tail_limit_report("eval tail-limit", &load_name(name)?, &parse("clopen", clopen)?, s)
        }
        Command::Eval(EvalCmd::Density { name }) => density_report("eval density", &load_name(name)?)?,
        Command::Eval(EvalCmd::Nu { name }) => {
            let m = load_name(name)?;
            let v = nu_window(&m, &s.thread, s.window);
            CommandReport::new(
                "eval nu",
                json!({ "name": m.to_string(), "thread": s.thread.to_string(), "window": s.window }),
                j(&v),
                measure_provenance(&v),
            )
        }
        Command::Eval(EvalCmd::Bc { schedule, set }) => {
            bc_report("eval bc", &parse("schedule", schedule)?, &parse("set", set)?)?
        }
        Command::Eval(EvalCmd::Full { name, p, set }) => {
            full_report("eval full", &load_name(name)?, &parse("clopen", p)?, &parse("set", set)?, s)?
        }
    };
    Ok(Output::Command(report))
}

pub fn execute(cli: &Cli) -> Result<(Output, Settings), CliError> {
    let settings = settings_from(&cli.global)?;
    let out = run_command(&cli.command, &settings)?;
    Ok((out, settings))
}

/// Parse, run, write the report; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (out, settings) = match execute(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let text = out.render(settings.format);
    match &settings.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {path}: {e}");
                return 1;
            }
        }
        None => print!("{text}"),
    }
    if out.passed() {
        0
    } else {
        1
    }
}
