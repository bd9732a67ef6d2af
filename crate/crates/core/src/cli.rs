//! Command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! usage or input errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chartable::{emit_ctb, parse_ctb, validate, CharacterTable};
use crate::dixon::character_table_dixon;
use crate::dl_rank1::{
    build_family, check_dl_orthogonality, check_sum, check_sym, check_sym_regular, check_valrt, check_valuni,
    semisimple_unipotent_values, CheckReport, FamilyKind, Rank1Family,
};
use crate::regunip::{
    compare_with_expectations, filter_candidates, is_prime, load_expectations, load_pool, load_pools,
    regular_unipotent_order, ExceptionalType, Pool,
};
use crate::rigidity::{class_product_count, rigidity_verdict, ClassTriple};
use crate::smallgrp::{closure, lemma_sl, lemma_so, parse_generators, GroupSpec, LemmaReport, DEFAULT_CLOSURE_CAP};

#[derive(Debug, Parser)]
#[command(name = "rigidkit", version, about = "Exact character-table checks for rigid class triples")]
struct Cli {
    /// Print `key = value` blocks instead of text reports.
    #[arg(long, global = true)]
    machine: bool,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check orthogonality, integrality and class data of a CTB table.
    Validate {
        table: PathBuf,
    },
    /// Count tuples with product 1 in the given classes.
    Structconst {
        table: PathBuf,
        #[arg(required = true, num_args = 1..)]
        classes: Vec<String>,
    },
    /// Rigidity report for a class triple.
    Rigid(RigidArgs),
    /// Character table of a matrix group by the Dixon-Schneider method, as CTB.
    Dixon(DixonArgs),
    /// Generic table of GL2, SL2 or PGL2 over F_q, or its identity checks.
    Dl {
        /// GL2, SL2 or PGL2.
        family: FamilyKind,
        #[arg(long)]
        q: u64,
        /// Run the identity checks instead of printing the table.
        #[arg(long)]
        checks: bool,
    },
    /// Symmetry between semisimple characters of a family and its dual.
    Dualsym {
        family: FamilyKind,
        #[arg(long)]
        q: u64,
    },
    /// Regular unipotent orders and the candidate subgroup filter.
    Regunip(RegunipArgs),
    /// Brute-force triple counts (involution, quadratic unipotent, regular unipotent).
    Lemma {
        #[command(subcommand)]
        group: LemmaGroup,
    },
}

#[derive(Debug, Args)]
struct RigidArgs {
    table: PathBuf,
    c1: String,
    c2: String,
    c3: String,
    /// Order of the center.
    #[arg(long, default_value_t = 1)]
    center: u64,
    /// Assume every product-1 triple generates the group.
    #[arg(long)]
    assume_generation: bool,
}

#[derive(Debug, Args)]
struct DixonArgs {
    /// Group spec such as `SL(2,5)`, `GL(2,3)`, `SO(4,3)` or `PSL(2,7)`.
    #[arg(long, conflicts_with = "generators", required_unless_present = "generators")]
    group: Option<String>,
    /// File of `matrix <n> <p>` generator blocks.
    #[arg(long)]
    generators: Option<PathBuf>,
    /// Read generators modulo scalars.
    #[arg(long, requires = "generators")]
    projective: bool,
    /// Table name (defaults to the group spec or file stem).
    #[arg(long)]
    name: Option<String>,
    /// Maximum number of group elements.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP)]
    cap: usize,
}

#[derive(Debug, Args)]
struct RegunipArgs {
    /// G2, F4, E6, E7 or E8.
    #[arg(long = "type", value_name = "TYPE")]
    ty: Option<ExceptionalType>,
    #[arg(long)]
    p: Option<u64>,
    /// Pool file, or a directory holding one `.pool` file per type.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Drop candidates with cyclic Sylow p-subgroups.
    #[arg(long)]
    two_classes: bool,
    /// Compare every pool in `--pool` with an expected survivor file.
    #[arg(long, requires = "pool")]
    expected: Option<PathBuf>,
    /// Largest prime used with `--expected`.
    #[arg(long, default_value_t = 200)]
    max_prime: u64,
}

#[derive(Debug, Subcommand)]
enum LemmaGroup {
    /// SL_n(q).
    Sl {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
    },
    /// SO_2m(q) on the hyperbolic form.
    So {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: u64,
    },
}

enum Outcome {
    Pass,
    CheckFailed,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<Outcome, Failure>;

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
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
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf = Vec::new();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buf)),
            Err(e) => Err(Failure(e.to_string())),
        },
        None => dispatch(&cli, &mut buf),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::CheckFailed) => 1,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn read_table(path: &Path) -> Result<CharacterTable, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_ctb(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn class_index(table: &CharacterTable, name: &str) -> Result<usize, Failure> {
    table
        .class_index(name)
        .ok_or_else(|| Failure(format!("unknown class `{name}` in table {}", table.name)))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let machine = cli.machine;
    match &cli.command {
        Command::Validate { table } => {
            let t = read_table(table)?;
            let report = validate(&t);
            if machine {
                for c in &report.checks {
                    writeln!(out, "{} = {}", c.name, if c.passed { "pass" } else { "fail" })?;
                }
                writeln!(out, "passed = {}", report.passed())?;
            } else {
                writeln!(out, "table {}: {} classes, order {}", t.name, t.num_classes(), t.order)?;
                write!(out, "{report}")?;
            }
            Ok(outcome(report.passed()))
        }
        Command::Structconst { table, classes } => {
            let t = read_table(table)?;
            let idx = classes.iter().map(|c| class_index(&t, c)).collect::<Result<Vec<_>, _>>()?;
            let n = class_product_count(&t, &idx)?;
            if machine {
                writeln!(out, "N = {n}")?;
            } else {
                writeln!(out, "{}: tuples in {} with product 1: {n}", t.name, classes.join(" x "))?;
            }
            Ok(Outcome::Pass)
        }
        Command::Rigid(a) => {
            let t = read_table(&a.table)?;
            let triple = ClassTriple::new(class_index(&t, &a.c1)?, class_index(&t, &a.c2)?, class_index(&t, &a.c3)?);
            let report = rigidity_verdict(&t, triple, a.center, a.assume_generation)?;
            if machine {
                write!(out, "{}", report.machine_block())?;
            } else {
                write!(out, "{report}")?;
            }
            Ok(Outcome::Pass)
        }
        Command::Dixon(a) => dixon(a, out),
        Command::Dl { family, q, checks } => {
            let fam = build_family(*family, *q)?;
            if !checks {
                write!(out, "{}", emit_ctb(&fam.table))?;
                return Ok(Outcome::Pass);
            }
            let dual = build_family(family.dual(), *q)?;
            let reports = dl_reports(&fam, &dual)?;
            print_reports(out, &reports, machine)
        }
        Command::Dualsym { family, q } => {
            let fam = build_family(*family, *q)?;
            let dual = build_family(family.dual(), *q)?;
            let reports = vec![check_sym(&fam, &dual)?, check_sym_regular(&fam, &dual)?];
            print_reports(out, &reports, machine)
        }
        Command::Regunip(a) => regunip(a, out, machine),
        Command::Lemma { group } => {
            let report = match *group {
                LemmaGroup::Sl { n, q } => lemma_sl(n, q)?,
                LemmaGroup::So { m, q } => lemma_so(m, q)?,
            };
            print_lemma(out, &report, machine)?;
            Ok(outcome(report.total() == 0))
        }
    }
}

fn dixon(a: &DixonArgs, out: &mut dyn Write) -> CmdResult {
    let (gens, default_name) = match (&a.group, &a.generators) {
        (Some(spec), _) => {
            let spec: GroupSpec = spec.parse()?;
            (spec.generators(), spec.to_string())
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            let stem = path.file_stem().map_or("G".into(), |s| s.to_string_lossy().into_owned());
            (parse_generators(&text, a.projective)?, stem)
        }
        (None, None) => return Err(Failure("one of --group or --generators is required".into())),
    };
    let group = closure(&gens, a.cap)?;
    let part = group.conjugacy_classes();
    let table = character_table_dixon(&group, &part, a.name.as_deref().unwrap_or(&default_name))?;
    write!(out, "{}", emit_ctb(&table))?;
    Ok(outcome(validate(&table).passed()))
}

fn dl_reports(fam: &Rank1Family, dual: &Rank1Family) -> Result<Vec<CheckReport>, Failure> {
    let (_, valuni) = check_valuni(fam)?;
    Ok(vec![
        valuni,
        check_sum(fam),
        semisimple_unipotent_values(fam, dual)?,
        check_valrt(fam)?,
        check_dl_orthogonality(fam),
    ])
}

fn print_reports(out: &mut dyn Write, reports: &[CheckReport], machine: bool) -> CmdResult {
    let ok = reports.iter().all(CheckReport::passed);
    if machine {
        for r in reports {
            writeln!(out, "report = {}", r.title)?;
            for c in &r.checks {
                writeln!(out, "check = {} {}", if c.holds() { "pass" } else { "fail" }, c.name)?;
            }
            writeln!(out, "identities = {}", r.checks.len())?;
            writeln!(out, "failures = {}", r.failures().len())?;
        }
        writeln!(out, "passed = {ok}")?;
    } else {
        for r in reports {
            write!(out, "{r}")?;
        }
    }
    Ok(outcome(ok))
}

fn print_lemma(out: &mut dyn Write, report: &LemmaReport, machine: bool) -> Result<(), Failure> {
    if machine {
        writeln!(out, "group = {}", report.group)?;
        for (i, c) in report.counts.iter().enumerate() {
            writeln!(out, "count_{} = {}", i + 1, c.count)?;
        }
        writeln!(out, "total = {}", report.total())?;
    } else {
        write!(out, "{report}")?;
    }
    Ok(())
}

fn pool_for(path: &Path, ty: ExceptionalType) -> Result<Pool, Failure> {
    if path.is_dir() {
        load_pools(path)?
            .into_iter()
            .find(|p| p.ty == ty)
            .ok_or_else(|| Failure(format!("no {ty} pool in {}", path.display())))
    } else {
        let pool = load_pool(path)?;
        if pool.ty != ty {
            return Err(Failure(format!("{} holds a {} pool, not {ty}", path.display(), pool.ty)));
        }
        Ok(pool)
    }
}

fn regunip(a: &RegunipArgs, out: &mut dyn Write, machine: bool) -> CmdResult {
    if let Some(expected) = &a.expected {
        let pool_dir = a.pool.as_ref().expect("clap requires --pool");
        let pools = if pool_dir.is_dir() {
            load_pools(pool_dir)?
        } else {
            vec![load_pool(pool_dir)?]
        };
        let exps = load_expectations(expected)?;
        let mismatches = compare_with_expectations(&pools, &exps, a.max_prime)?;
        for m in &mismatches {
            writeln!(out, "mismatch = {m}")?;
        }
        writeln!(out, "pools = {}", pools.len())?;
        writeln!(out, "mismatches = {}", mismatches.len())?;
        return Ok(outcome(mismatches.is_empty()));
    }
    let (Some(ty), Some(p)) = (a.ty, a.p) else {
        return Err(Failure("regunip needs --type and --p (or --pool with --expected)".into()));
    };
    if !is_prime(p) {
        return Err(Failure(format!("{p} is not a prime")));
    }
    writeln!(out, "order = {}", regular_unipotent_order(ty, p))?;
    if let Some(path) = &a.pool {
        let pool = pool_for(path, ty)?;
        let report = filter_candidates(ty, p, &pool.candidates, a.two_classes)?;
        if machine {
            for v in &report.verdicts {
                writeln!(out, "candidate = {} {} {}", v.label, v.max_order, v.verdict)?;
            }
            let s: Vec<String> = report.survivors().into_iter().collect();
            writeln!(out, "survivors = {}", s.join(","))?;
        } else {
            write!(out, "{report}")?;
        }
    }
    Ok(Outcome::Pass)
}
