//! `theoria`: trees, series, algebras and the check harness from the shell.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 on usage, parse
//! or bound errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use theoria_core::algebra::{coproduct, effective_mono, enumerate_algebras, pushout, Algebra, Bar};
use theoria_core::graded::{GradedSet, Profile};
use theoria_core::series::{compose, star_product, Series};
use theoria_core::signature::Signature;
use theoria_core::theory::Theory;
use theoria_core::trees::enumerate_trees;
use theoria_core::verify::{self, Config};

mod input;

#[derive(Parser)]
#[command(name = "theoria", version, about = "Trees, series, algebras and checks for finitary algebraic theories")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

/// Bounds and output settings. Defaults mirror the harness defaults.
#[derive(Args, Clone, Debug)]
struct Opts {
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    max_arity: u64,
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    max_vertices: u64,
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    max_carrier: u64,
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    truncation: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

impl Opts {
    fn arity(&self) -> usize {
        self.max_arity as usize
    }

    fn vertices(&self) -> usize {
        self.max_vertices as usize
    }

    fn theory(&self, spec: &str) -> Result<Arc<dyn Theory>> {
        input::theory(spec, self.arity(), self.vertices())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    /// Graph description, for tree listings.
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate or count trees of a signature.
    Trees {
        #[command(subcommand)]
        action: TreesCmd,
    },
    /// Composition, star product and evaluation of series.
    Series {
        #[command(subcommand)]
        action: SeriesCmd,
    },
    /// Colimits, enumeration, effective monos and the bar construction.
    Algebra {
        #[command(subcommand)]
        action: AlgebraCmd,
    },
    /// Run one named check, or `all`.
    Check {
        name: Option<String>,
        /// List the available checks.
        #[arg(long)]
        list: bool,
        /// Random instances for the randomized checks.
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Add wall-clock per check (the report is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand)]
enum TreesCmd {
    /// Trees of one profile in canonical order.
    Enumerate {
        #[arg(long, default_value = "binary")]
        sig: String,
        /// For example `*<-(*,*)`.
        #[arg(long)]
        profile: String,
    },
    /// Tree counts for every profile up to `--max-arity` inputs.
    Count {
        #[arg(long, default_value = "binary")]
        sig: String,
        #[arg(long)]
        profile: Option<String>,
    },
}

#[derive(Subcommand)]
enum SeriesCmd {
    /// `A ∘ B` tabulated up to `--max-arity`.
    Compose {
        /// `unit`, `free:<signature>` or a tabulated series file.
        left: String,
        right: String,
    },
    /// The star product of two signatures.
    Star { left: String, right: String },
    /// A series at a graded set (`3`, `2,1`, or a file).
    Evaluate { series: String, set: String },
}

#[derive(Args)]
struct Span {
    /// Theory: a built-in name or a finite theory file.
    #[arg(long, default_value = "pointed")]
    theory: String,
    /// `X` in `X ← U → V`.
    #[arg(long)]
    x: String,
    #[arg(long, default_value = "free:0")]
    u: String,
    #[arg(long)]
    v: String,
    /// `f: U → X` as target names; the unique map when omitted.
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Coproduct of algebras (`free:N` or files).
    Coproduct {
        #[arg(long, default_value = "pointed")]
        theory: String,
        #[arg(required = true)]
        algebras: Vec<String>,
    },
    /// Pushout `X ⊔_U V`.
    Pushout(Span),
    /// Algebras with at most `--max-carrier` elements, up to isomorphism.
    Enumerate {
        #[arg(long, default_value = "pointed")]
        theory: String,
    },
    /// Whether `f: X → Y` is an effective monomorphism.
    EffectiveMono {
        #[arg(long, default_value = "pointed")]
        theory: String,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        map: Option<String>,
    },
    /// Levels of the bar construction up to `--truncation`.
    Bar(Span),
}

fn emit(opts: &Opts, out: &mut String, table: String, record: Value) -> Result<()> {
    match opts.format {
        Format::Table => *out += &table,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&record)?)?,
        Format::Dot => bail!("dot output is only available for `trees enumerate`"),
    }
    Ok(())
}

fn profile(sig: &Signature, text: &str) -> Result<Profile> {
    let p = Profile::parse(text, sig.sorts())?;
    p.validate(sig.sorts())?;
    Ok(p)
}

fn trees(opts: &Opts, action: &TreesCmd, out: &mut String) -> Result<()> {
    match action {
        TreesCmd::Enumerate { sig, profile: p } => {
            let sig = input::signature(sig)?;
            let p = profile(&sig, p)?;
            let en = enumerate_trees(&sig, &p, opts.vertices())?;
            let shown = p.display(sig.sorts());
            match opts.format {
                Format::Dot => en.trees.iter().for_each(|t| *out += &t.to_dot(&sig)),
                Format::Json => {
                    let trees: Vec<Value> = en.trees.iter().map(|t| t.to_value(&sig)).collect();
                    let record = json!({ "profile": shown, "truncated": en.truncated, "trees": trees });
                    writeln!(out, "{}", serde_json::to_string_pretty(&record)?)?;
                }
                Format::Table => {
                    for t in &en.trees {
                        writeln!(out, "{}", t.display(&sig))?;
                    }
                    let more = if en.truncated { " (truncated)" } else { "" };
                    writeln!(out, "{} trees of profile {shown}{more}", en.trees.len())?;
                }
            }
        }
        TreesCmd::Count { sig, profile: p } => {
            let sig = input::signature(sig)?;
            let profiles = match p {
                Some(p) => vec![profile(&sig, p)?],
                None => Profile::all_up_to(sig.sorts(), opts.arity()),
            };
            let mut rows = Vec::new();
            for p in &profiles {
                let en = enumerate_trees(&sig, p, opts.vertices())?;
                rows.push((p.display(sig.sorts()), en.trees.len(), en.truncated));
            }
            let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(7).max(7);
            let mut table = format!("{:width$}  trees\n", "profile");
            for (p, n, truncated) in &rows {
                table += &format!("{p:width$}  {n}{}\n", if *truncated { "+" } else { "" });
            }
            if rows.iter().any(|r| r.2) {
                table += &format!("+ more trees exist beyond {} vertices\n", opts.vertices());
            }
            let record = rows
                .iter()
                .map(|(p, n, truncated)| json!({ "profile": p, "count": n, "truncated": truncated }))
                .collect();
            emit(opts, out, table, Value::Array(record))?;
        }
    }
    Ok(())
}

fn graded_record(x: &GradedSet) -> Value {
    let sorts = x.sorts();
    sorts.sorts().map(|s| (sorts.name(s).to_string(), json!(x.names(s)))).collect::<serde_json::Map<_, _>>().into()
}

fn series_table(a: &dyn Series, bound: usize) -> Result<(String, Value)> {
    let (dom, cod) = (a.domain(), a.codomain());
    let mut table = String::new();
    let mut record = Vec::new();
    for out in cod.sorts() {
        for w in dom.arities_up_to(bound) {
            let labels: Vec<String> = (0..a.size(out, &w)?).map(|e| a.label(out, &w, e)).collect();
            let shown = format!("{}<-{}", cod.name(out), w.display(dom));
            table += &format!("{shown}  {}  {}\n", labels.len(), labels.join(" "));
            record.push(json!({ "profile": shown, "size": labels.len(), "elements": labels }));
        }
    }
    Ok((table, Value::Array(record)))
}

fn series(opts: &Opts, action: &SeriesCmd, out: &mut String) -> Result<()> {
    match action {
        SeriesCmd::Compose { left, right } => {
            let (l, r) = (input::SeriesArg::parse(left)?, input::SeriesArg::parse(right)?);
            let sorts = l.sorts().or(r.sorts()).cloned();
            let (l, r) = (l.build(sorts.as_ref()), r.build(sorts.as_ref()));
            let c = compose(l.as_ref(), r.as_ref(), opts.arity())?;
            let (table, record) = series_table(&c, opts.arity())?;
            emit(opts, out, table, record)
        }
        SeriesCmd::Star { left, right } => {
            let s = star_product(&input::signature(left)?, &input::signature(right)?)?;
            let mut table = String::new();
            for op in s.ops() {
                table += &format!("{}  {}\n", op.name, op.profile.display(s.sorts()));
            }
            table += &format!("{} operations\n", s.len());
            emit(opts, out, table, serde_json::from_str(&s.to_json())?)
        }
        SeriesCmd::Evaluate { series, set } => {
            let arg = input::SeriesArg::parse(series)?;
            let sorts = arg.sorts().cloned().unwrap_or_else(theoria_core::graded::SortSet::single);
            let a = arg.build(Some(&sorts));
            let x = input::graded_set(set, &sorts)?;
            let ev = a.evaluate(&x)?;
            let mut table = String::new();
            for s in ev.set.sorts().sorts() {
                table += &format!("{}: {} elements\n", ev.set.sorts().name(s), ev.set.len(s));
            }
            emit(opts, out, table, graded_record(&ev.set))
        }
    }
}

fn algebra_record(a: &Algebra) -> Result<Value> {
    Ok(serde_json::from_str(&a.to_json())?)
}

fn describe(a: &Algebra) -> String {
    let mut out = format!("{}\n", a.carrier());
    for (g, gen) in a.generators().iter().enumerate() {
        let names: Vec<&str> = a
            .table(g)
            .iter()
            .map(|&i| a.carrier().names(gen.output)[i].as_str())
            .collect();
        out += &format!("  {}: [{}]\n", gen.name, names.join(", "));
    }
    out
}

fn span(opts: &Opts, s: &Span) -> Result<(Algebra, Algebra, Algebra, theoria_core::graded::GradedMap, theoria_core::graded::GradedMap)> {
    let theory = opts.theory(&s.theory)?;
    let (x, u, v) = (input::algebra(&theory, &s.x)?, input::algebra(&theory, &s.u)?, input::algebra(&theory, &s.v)?);
    let f = input::map(&u, &x, s.f.as_deref())?;
    let g = input::map(&u, &v, s.g.as_deref())?;
    Ok((x, u, v, f, g))
}

fn algebra(opts: &Opts, action: &AlgebraCmd, out: &mut String) -> Result<()> {
    match action {
        AlgebraCmd::Coproduct { theory, algebras } => {
            let theory = opts.theory(theory)?;
            let parts = algebras.iter().map(|a| input::algebra(&theory, a)).collect::<Result<Vec<_>>>()?;
            let c = coproduct(&parts.iter().collect::<Vec<_>>())?;
            let table = format!("{} elements\n{}", c.algebra().carrier().total_len(), describe(c.algebra()));
            emit(opts, out, table, algebra_record(c.algebra())?)
        }
        AlgebraCmd::Pushout(s) => {
            let (x, u, v, f, g) = span(opts, s)?;
            let p = pushout(&x, &v, &u, &f, &g)?;
            let table = format!("{} elements\n{}", p.algebra().carrier().total_len(), describe(p.algebra()));
            emit(opts, out, table, algebra_record(p.algebra())?)
        }
        AlgebraCmd::Enumerate { theory } => {
            let theory = opts.theory(theory)?;
            let (found, raw) = enumerate_algebras(&theory, opts.max_carrier as usize)?;
            let mut table = String::new();
            for (k, a) in found.iter().enumerate() {
                table += &format!("#{k}  {}", describe(a));
            }
            table += &format!(
                "{} algebras up to isomorphism with at most {} elements ({raw} structures)\n",
                found.len(),
                opts.max_carrier
            );
            let list = found.iter().map(algebra_record).collect::<Result<Vec<_>>>()?;
            emit(opts, out, table, json!({ "algebras": list, "structures": raw }))
        }
        AlgebraCmd::EffectiveMono { theory, source, target, map } => {
            let theory = opts.theory(theory)?;
            let (x, y) = (input::algebra(&theory, source)?, input::algebra(&theory, target)?);
            let f = input::map(&x, &y, map.as_deref())?;
            let v = effective_mono(&x, &y, &f)?;
            let mut table = format!(
                "mono: {}\neffective: {}\nequalizer: {} elements, image: {} elements\n",
                if v.mono { "yes" } else { "no" },
                if v.effective { "yes" } else { "no" },
                v.equalizer_size,
                v.image_size
            );
            if let Some(w) = &v.witness {
                table += &format!("witness: {w}\n");
            }
            emit(opts, out, table, serde_json::to_value(&v)?)
        }
        AlgebraCmd::Bar(s) => {
            let (x, u, v, f, g) = span(opts, s)?;
            let bar = Bar::new(x, u, v, f, g)?;
            let top = opts.truncation as usize;
            let sizes = (0..=top)
                .map(|n| Ok(bar.level(n)?.algebra().carrier().total_len()))
                .collect::<Result<Vec<_>>>()?;
            let laws = bar.check_identities(top)?;
            let (q, p, bijective) = bar.augmentation()?;
            let mut table = String::from("level  size\n");
            for (n, size) in sizes.iter().enumerate() {
                table += &format!("{n:5}  {size}\n");
            }
            table += &format!(
                "simplicial identities: {} ({} checked)\ncoequalizer of d0, d1: {q}, pushout: {p}, comparison {}\n",
                if laws.passed() { "hold" } else { "FAIL" },
                laws.checked,
                if bijective { "bijective" } else { "not bijective" }
            );
            let record = json!({
                "levels": sizes,
                "identities": laws.passed(),
                "checked": laws.checked,
                "coequalizer": q,
                "pushout": p,
                "bijective": bijective,
            });
            emit(opts, out, table, record)
        }
    }
}

fn check(opts: &Opts, name: Option<&str>, list: bool, instances: usize, timing: bool, out: &mut String) -> Result<bool> {
    if list {
        for spec in verify::CHECKS {
            writeln!(out, "{:24}  {}", spec.name, spec.claim)?;
        }
        return Ok(true);
    }
    let Some(name) = name else { bail!("name a check, `all`, or pass --list") };
    let cfg = Config {
        seed: opts.seed,
        max_arity: opts.arity(),
        max_vertices: opts.vertices(),
        max_carrier: opts.max_carrier as usize,
        truncation: opts.truncation as usize,
        instances,
        timing,
    };
    let report = if name == "all" { verify::run_all(&cfg) } else { verify::run(name, &cfg)? };
    emit(opts, out, report.to_string(), serde_json::from_str(&report.to_json())?)?;
    Ok(report.passed)
}

fn run(cli: &Cli, out: &mut String) -> Result<bool> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Trees { action } => trees(opts, action, out)?,
        Command::Series { action } => series(opts, action, out)?,
        Command::Algebra { action } => algebra(opts, action, out)?,
        Command::Check { name, list, instances, timing } => {
            return check(opts, name.as_deref(), *list, *instances, *timing, out);
        }
    }
    Ok(true)
}

/// 0 when everything passed, 1 when a check failed, 2 on any error.
fn status(result: &Result<bool>) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli, &mut out);
    if let Err(e) = &result {
        eprintln!("error: {e:#}");
    }
    let code = ExitCode::from(status(&result));
    // A reader that closes the pipe early is not an error.
    match std::io::stdout().lock().write_all(out.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        _ => code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use theoria_core::algebra::free_algebra;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(status(&Ok(true)), 0);
        assert_eq!(status(&Ok(false)), 1);
        assert_eq!(status(&Err(anyhow::anyhow!("bad input"))), 2);
    }

    #[test]
    fn defaults_match_the_harness() {
        let cli = Cli::parse_from(["theoria", "check", "all"]);
        let d = Config::default();
        let o = &cli.opts;
        assert_eq!(o.seed, d.seed);
        assert_eq!(o.arity(), d.max_arity);
        assert_eq!(o.vertices(), d.max_vertices);
        assert_eq!(o.max_carrier as usize, d.max_carrier);
        assert_eq!(o.truncation as usize, d.truncation);
    }

    #[test]
    fn unit_theory_has_one_algebra_per_size() {
        let theory = input::theory("free:empty", 2, 2).unwrap();
        let x = free_algebra(&theory, &GradedSet::with_sizes(theory.sorts(), &[2])).unwrap();
        assert_eq!(x.algebra.carrier().total_len(), 2);
    }
}
