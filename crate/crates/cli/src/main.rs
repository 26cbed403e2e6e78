use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qrr_core::catalog::{Catalog, EntryKind, Side};
use qrr_core::dsl::{evaluate, parse_expr, Specialization};
use qrr_core::partitions::{verify_partition_theorem, Theorem};
use qrr_core::prodsearch::{detect_period, prodmake, search, SearchFamily};
use qrr_core::qdifference::{run_suite, SuiteSizes};
use qrr_core::verify::{
    chains, verify_all, verify_chain, verify_identity, verify_transformation, verify_watson_terminating, SpecGrid,
    Status, VerifyReport,
};

const USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "qrr", version, about = "Exact checks of Rogers-Ramanujan type identities")]
struct Cli {
    /// Print JSON instead of text (one object per line).
    #[arg(long, global = true)]
    json: bool,
    /// Report 0 for every elapsed-time field, so output is reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Smallest exponent e in symbol values +-q^e.
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    grid_exp_min: i64,
    /// Largest exponent e in symbol values +-q^e.
    #[arg(long, default_value_t = 4)]
    grid_exp_max: i64,
    /// Cap on grid points per entry (0 for no cap).
    #[arg(long, default_value_t = 240)]
    max_points: usize,
}

impl GridArgs {
    fn grid(&self) -> SpecGrid {
        SpecGrid {
            exp_min: self.grid_exp_min,
            exp_max: self.grid_exp_max,
            max_points: self.max_points,
            ..SpecGrid::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Lhs,
    Rhs,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog entries.
    List,
    /// Verify one catalog entry, or every entry of a .qrr file.
    Verify {
        #[arg(long, required_unless_present = "file")]
        id: Option<String>,
        /// Extra source file, loaded on top of the catalog.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(short = 'N', long = "order", default_value_t = 200)]
        order: i64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Verify every catalog entry.
    VerifyAll {
        #[arg(short = 'N', long = "order", default_value_t = 200)]
        order: i64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check the derivation chains of the corollary proofs.
    Chains {
        /// Only the chain with this name.
        #[arg(long)]
        name: Option<String>,
        #[arg(short = 'N', long = "order", default_value_t = 100)]
        order: i64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Watson's terminating transformation for n = 0..=nmax.
    Watson {
        #[arg(long, default_value_t = 5)]
        nmax: i64,
        #[arg(short = 'N', long = "order", default_value_t = 150)]
        order: i64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Fermionic and bosonic polynomial sequences and their limits.
    Qdiff {
        /// P_n = Q_n is checked for n <= nmax.
        #[arg(long, default_value_t = 40)]
        nmax: usize,
        /// S_v = P_v and the c_v recurrence for v <= vmax.
        #[arg(long, default_value_t = 8)]
        vmax: usize,
        /// Degree through which limits are compared.
        #[arg(short = 'N', long = "order", default_value_t = 60)]
        order: usize,
    },
    /// Equinumerosity of a partition theorem.
    Partitions {
        /// tGG1, tGG2, tGGn or tGGn1; all four when omitted.
        #[arg(long)]
        theorem: Option<Theorem>,
        #[arg(long, default_value_t = 80)]
        max: u64,
    },
    /// Search a family of sums for infinite products.
    Search {
        /// A family file, or the name of a built-in family.
        #[arg(long)]
        family: String,
        #[arg(short = 'N', long = "order", default_value_t = 100)]
        order: usize,
    },
    /// Exponents e_k with f = prod (1 - q^k)^(-e_k).
    Prodmake {
        /// Catalog entry whose side to use.
        #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
        id: Option<String>,
        #[arg(long, value_enum, default_value = "lhs")]
        side: SideArg,
        /// A DSL expression instead of a catalog entry.
        #[arg(long)]
        expr: Option<String>,
        #[arg(short = 'N', long = "order", default_value_t = 100)]
        order: usize,
        #[arg(long, default_value_t = 24)]
        max_period: usize,
    },
}

/// Output sink that also tracks the worst status seen.
struct Run {
    json: bool,
    timing: bool,
    out: io::BufWriter<io::Stdout>,
    fail: bool,
    invalid: bool,
}

impl Run {
    fn status(&mut self, s: Status) {
        match s {
            Status::Pass => {}
            Status::Fail => self.fail = true,
            Status::Invalid => self.invalid = true,
        }
    }

    fn ms(&self, ms: u64) -> u64 {
        if self.timing {
            ms
        } else {
            0
        }
    }

    fn json<T: Serialize>(&mut self, v: &T) {
        let line = serde_json::to_string(v).expect("reports serialize");
        let _ = writeln!(self.out, "{line}");
    }

    fn text(&mut self, s: &str) {
        let _ = writeln!(self.out, "{s}");
    }

    fn report(&mut self, mut r: VerifyReport) {
        r.ms = self.ms(r.ms);
        self.status(r.status);
        if self.json {
            self.json(&r);
        } else {
            let s = r.summary();
            self.text(&s);
        }
    }

    fn exit_code(&mut self) -> ExitCode {
        let _ = self.out.flush();
        if self.fail {
            ExitCode::from(2)
        } else if self.invalid {
            ExitCode::from(3)
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("qrr: {msg}");
    ExitCode::from(USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let catalog = match Catalog::load() {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let mut run = Run {
        json: cli.json,
        timing: !cli.no_timing,
        out: io::BufWriter::new(io::stdout()),
        fail: false,
        invalid: false,
    };
    match execute(cli.command, &catalog, &mut run) {
        Ok(()) => run.exit_code(),
        Err(msg) => {
            let _ = run.out.flush();
            usage(msg)
        }
    }
}

fn verify_entry(cat: &Catalog, id: &str, grid: &SpecGrid, order: i64) -> Result<VerifyReport, String> {
    let entry = cat.get(id).map_err(|e| e.to_string())?;
    let r = match entry.kind {
        EntryKind::Identity => verify_identity(cat, id, order),
        EntryKind::Transformation => verify_transformation(cat, id, grid, order),
    };
    r.map_err(|e| e.to_string())
}

fn check_order(order: i64) -> Result<(), String> {
    if order < 1 {
        return Err(format!("order must be at least 1, got {order}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct ProdmakeOut<'a> {
    source: &'a str,
    #[serde(rename = "N")]
    order: usize,
    shift: i64,
    exponents: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<String>,
}

fn execute(cmd: Command, catalog: &Catalog, run: &mut Run) -> Result<(), String> {
    match cmd {
        Command::List => {
            #[derive(Serialize)]
            struct Row<'a> {
                id: &'a str,
                kind: EntryKind,
                params: Vec<String>,
                file: &'a str,
            }
            for e in catalog.entries() {
                let params: Vec<String> = e.params.names().into_iter().collect();
                if run.json {
                    run.json(&Row {
                        id: e.id(),
                        kind: e.kind,
                        params,
                        file: &e.file,
                    });
                } else {
                    let kind = match e.kind {
                        EntryKind::Identity => "identity",
                        EntryKind::Transformation => "transformation",
                    };
                    run.text(&format!("{}\t{kind}\t{}", e.id(), params.join(",")));
                }
            }
        }
        Command::Verify { id, file, order, grid } => {
            check_order(order)?;
            let grid = grid.grid();
            match file {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                    let name = path.display().to_string();
                    let mut sources: Vec<(String, String)> = Catalog::builtin_sources()
                        .iter()
                        .map(|(n, t)| (n.to_string(), t.to_string()))
                        .collect();
                    sources.push((name.clone(), text));
                    let cat = Catalog::from_sources(&sources).map_err(|e| e.to_string())?;
                    let ids: Vec<String> = match id {
                        Some(id) => vec![id],
                        None => cat
                            .entries()
                            .iter()
                            .filter(|e| e.file == name)
                            .map(|e| e.id().to_string())
                            .collect(),
                    };
                    for id in ids {
                        let r = verify_entry(&cat, &id, &grid, order)?;
                        run.report(r);
                    }
                }
                None => {
                    let id = id.expect("clap requires --id without --file");
                    let r = verify_entry(catalog, &id, &grid, order)?;
                    run.report(r);
                }
            }
        }
        Command::VerifyAll { order, grid } => {
            check_order(order)?;
            let reports = verify_all(catalog, &grid.grid(), order).map_err(|e| e.to_string())?;
            let total = reports.len();
            let passed = reports.iter().filter(|r| r.passed()).count();
            for r in reports {
                run.report(r);
            }
            if !run.json {
                run.text(&format!("{passed}/{total} entries passed"));
            }
        }
        Command::Chains { name, order, grid } => {
            check_order(order)?;
            let all = chains();
            let selected: Vec<_> = match &name {
                Some(n) => all.into_iter().filter(|c| c.name == n).collect(),
                None => all,
            };
            if selected.is_empty() {
                return Err(format!("no chain named {:?}", name.unwrap_or_default()));
            }
            let grid = grid.grid();
            for c in &selected {
                let mut r = verify_chain(catalog, c, &grid, order).map_err(|e| e.to_string())?;
                r.ms = run.ms(r.ms);
                run.status(r.status);
                if run.json {
                    run.json(&r);
                } else {
                    let mut s = format!("{:<4} {} N={} steps={}", r.status, r.name, r.order, c.steps.len());
                    if let Some(i) = r.step {
                        s += &format!(" step {i} ({}) differs", c.steps[i].describe());
                    }
                    if let Some(m) = &r.first_mismatch {
                        s += &format!(" at q^{}: {} vs {}", m.exp, m.lhs, m.rhs);
                    }
                    run.text(&s);
                }
            }
        }
        Command::Watson { nmax, order, grid } => {
            check_order(order)?;
            if nmax < 0 {
                return Err(format!("nmax must be nonnegative, got {nmax}"));
            }
            let r = verify_watson_terminating(catalog, nmax, &grid.grid(), order).map_err(|e| e.to_string())?;
            run.report(r);
        }
        Command::Qdiff { nmax, vmax, order } => {
            let sizes = SuiteSizes {
                n_max: nmax,
                n_biv: nmax.min(SuiteSizes::default().n_biv),
                limit_deg: order,
                v_max: vmax.max(1),
                c_n_max: SuiteSizes::default().c_n_max,
            };
            for mut c in run_suite(catalog, sizes).map_err(|e| e.to_string())? {
                c.ms = run.ms(c.ms);
                run.status(c.status);
                if run.json {
                    run.json(&c);
                } else {
                    run.text(&format!("{:<4} {}: {}", c.status, c.name, c.detail));
                }
            }
        }
        Command::Partitions { theorem, max } => {
            let list = match theorem {
                Some(t) => vec![t],
                None => Theorem::ALL.to_vec(),
            };
            for t in list {
                let mut r = verify_partition_theorem(catalog, t, max).map_err(|e| e.to_string())?;
                r.ms = run.ms(r.ms);
                run.status(r.status);
                if run.json {
                    run.json(&r);
                    continue;
                }
                run.text(&format!("# {} {}", r.theorem, r.status));
                run.text("n\tcongruence\tgap");
                for row in &r.rows {
                    run.text(&format!("{}\t{}\t{}", row.n, row.congruence, row.gap));
                }
                if let Some(n) = r.first_mismatch {
                    run.text(&format!("# counts differ at n = {n}"));
                }
                if let Some(n) = r.series_mismatch {
                    run.text(&format!(
                        "# counts differ from the {} coefficients at n = {n}",
                        t.catalog_id()
                    ));
                }
            }
        }
        Command::Search { family, order } => {
            let fam = match SearchFamily::builtin(&family) {
                Some(f) => f,
                None => SearchFamily::from_file(std::path::Path::new(&family)).map_err(|e| e.to_string())?,
            };
            let mut r = search(&fam, catalog, order);
            r.ms = run.ms(r.ms);
            if run.json {
                for c in &r.candidates {
                    run.json(c);
                }
            } else {
                run.text(&format!(
                    "# {} N={} tried={} invalid={} candidates={}",
                    r.family,
                    r.order,
                    r.tried,
                    r.invalid,
                    r.candidates.len()
                ));
                for c in &r.candidates {
                    let mut s = format!("{} = {}", c.lhs_dsl, c.product_dsl);
                    if !c.known.is_empty() {
                        s += &format!("  [known: {}]", c.known.join(", "));
                    }
                    for x in &c.rescaled {
                        s += &format!("  [{} with q -> q^{}]", x.id, x.d);
                    }
                    run.text(&s);
                }
            }
        }
        Command::Prodmake {
            id,
            side,
            expr,
            order,
            max_period,
        } => {
            let (source, series) = match (id, expr) {
                (Some(id), _) => {
                    let side = match side {
                        SideArg::Lhs => Side::Lhs,
                        SideArg::Rhs => Side::Rhs,
                    };
                    let s = catalog
                        .evaluate_side(&id, side, &Specialization::default(), order as i64)
                        .map_err(|e| e.to_string())?
                        .map_err(|e| format!("{id}: {e}"))?;
                    (id, s)
                }
                (None, Some(text)) => {
                    let e = parse_expr(&text).map_err(|e| e.to_string())?;
                    let s = evaluate(&e, &Specialization::default(), order as i64).map_err(|e| e.to_string())?;
                    (text, s)
                }
                (None, None) => unreachable!("clap requires --id or --expr"),
            };
            let lead = series.lead().ok_or("series is zero")?;
            let exps = prodmake(&series.shift(-lead), order).map_err(|e| e.to_string())?;
            let form = detect_period(&exps, max_period, 2 * max_period);
            let out = ProdmakeOut {
                source: &source,
                order,
                shift: lead,
                exponents: exps.iter().map(|e| e.to_string()).collect(),
                period: form.as_ref().map(|f| f.period),
                pattern: form.as_ref().map(|f| f.exponents.clone()),
                product: form.as_ref().map(|f| {
                    let mut f = f.clone();
                    f.shift = lead;
                    f.to_dsl()
                }),
            };
            if run.json {
                run.json(&out);
            } else {
                run.text(&format!("{} N={} shift={}", out.source, order, lead));
                run.text(&format!("exponents: {}", out.exponents.join(" ")));
                match (&out.period, &out.product) {
                    (Some(m), Some(p)) => run.text(&format!("period {m}: {p}")),
                    _ => run.text("NO_PERIOD"),
                }
            }
        }
    }
    Ok(())
}
