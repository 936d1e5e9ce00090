//! Command-line front end.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::finab::{Budget, FinAbGroup};
use crate::inversion::{multi_invert_zero, Bracket, MomentTable};
use crate::localize::{localized_moments, reconstruct_probability, ModuleMomentTable};
use crate::qseries::{inversion_coefficient, SimpleType};
use crate::rational::{self, Rational};
use crate::sampler::{self, SamplerConfig};
use crate::surjcount::{sur_single, MultiIndex, TypeBasis};
use crate::verify::{run_suite, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "momentforge",
    version,
    about = "Recover measures on finite modules from surjection moments"
)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Print rationals as decimals.
    #[arg(long, global = true)]
    pub decimal: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TypeArg {
    /// Abelian simple type with endomorphism field of this size.
    #[arg(long)]
    pub abelian: Option<u64>,
    /// Non-abelian simple type with this many automorphisms.
    #[arg(long)]
    pub nonabelian: Option<u64>,
}

impl TypeArg {
    fn resolve(&self) -> Result<SimpleType> {
        match (self.abelian, self.nonabelian) {
            (Some(h), None) => SimpleType::abelian(h),
            (None, Some(a)) => SimpleType::non_abelian(a),
            _ => Err(Error::input(
                "give exactly one of --abelian or --nonabelian",
            )),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inversion coefficient c_k.
    Coeffs {
        #[command(flatten)]
        kind: TypeArg,
        #[arg(long)]
        k: u32,
        /// List c_0 through c_k.
        #[arg(long)]
        all: bool,
    },
    /// Sur(G^e, G^k) for a simple type G.
    Sur {
        #[command(flatten)]
        kind: TypeArg,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        k: u32,
    },
    /// Bracket on the mass at the trivial object from a moment table.
    Invert {
        /// Moment table JSON ("-" for stdin).
        #[arg(long)]
        file: PathBuf,
        /// Truncation per basis type; one value applies to all types.
        #[arg(long, value_delimiter = ',', required = true)]
        rmax: Vec<u32>,
        /// Elimination order as a permutation of basis positions.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Moments of the localized measure at M, as a moment table.
    Localize {
        /// Module moment table JSON ("-" for stdin).
        #[arg(long)]
        file: PathBuf,
        /// The module M, as JSON ({"2":[2,1]}) or cyclic orders (4x2, or 1 for trivial).
        #[arg(long)]
        group: String,
        /// Primes of the basis (default: the table's primes).
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',', required = true)]
        kbound: Vec<u32>,
    },
    /// Bracket on μ(M) from module moments.
    Reconstruct {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',', required = true)]
        rmax: Vec<u32>,
    },
    /// Sample random cokernels; print the empirical measure or a convergence report.
    Sample {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        cap: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        extra_cols: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: u64,
        /// Report on these groups instead of printing the measure.
        #[arg(long = "target")]
        targets: Vec<String>,
        /// Prefix lengths to report at (default: just --count).
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<u64>>,
        #[arg(long, default_value_t = 10)]
        rmax: u32,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the oracle suite.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::input(format!("cannot read stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn with_file<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    parse(&read_input(path)?).map_err(|e| match e {
        Error::Input(msg) => Error::input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses `{"2":[2,1]}`, `4x2`, `Z/4 x Z/2`, `0` or `1`.
pub fn parse_group(text: &str) -> Result<FinAbGroup> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text)
            .map_err(|e| Error::input(format!("bad group {text:?}: {e}")));
    }
    if matches!(text, "0" | "1" | "trivial") {
        return Ok(FinAbGroup::trivial());
    }
    let orders = text
        .split(['x', ','])
        .map(|part| {
            let part = part.trim().trim_start_matches("Z/");
            part.parse::<u64>()
                .map_err(|_| Error::input(format!("bad group {text:?}: {part:?} is not an order")))
        })
        .collect::<Result<Vec<_>>>()?;
    FinAbGroup::from_cyclic_orders(&orders)
}

fn multi(values: &[u32], len: usize, what: &str) -> Result<MultiIndex> {
    match values {
        [v] => Ok(MultiIndex(vec![*v; len])),
        _ if values.len() == len => Ok(MultiIndex(values.to_vec())),
        _ => Err(Error::input(format!(
            "--{what} needs 1 or {len} values, got {}",
            values.len()
        ))),
    }
}

fn module_basis(table: &ModuleMomentTable, basis: &Option<Vec<u64>>) -> Result<TypeBasis> {
    match basis {
        Some(primes) => TypeBasis::primes(primes),
        None => TypeBasis::primes(&table.primes().iter().copied().collect::<Vec<_>>()),
    }
}

struct Printer {
    pretty: bool,
    decimal: bool,
}

impl Printer {
    fn rational(&self, q: &Rational) -> String {
        if self.decimal {
            format!("{:.12}", rational::to_f64(q))
        } else {
            rational::format(q)
        }
    }

    fn bracket(&self, b: &Bracket) -> String {
        if self.pretty {
            b.render()
        } else if self.decimal {
            serde_json::json!({
                "lower": rational::to_f64(&b.lower),
                "upper": rational::to_f64(&b.upper),
            })
            .to_string()
        } else {
            b.to_json().to_string()
        }
    }

    fn json(&self, v: &serde_json::Value) -> String {
        if self.pretty {
            serde_json::to_string_pretty(v).expect("json renders")
        } else {
            v.to_string()
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::input(format!("cannot write output: {e}"))
}

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let printer = Printer {
        pretty: cli.pretty,
        decimal: cli.decimal,
    };
    match &cli.command {
        Command::Coeffs { kind, k, all } => {
            let t = kind.resolve()?;
            let from = if *all { 0 } else { *k };
            for i in from..=*k {
                let c = printer.rational(&inversion_coefficient(t, i));
                if *all {
                    writeln!(out, "{i}\t{c}").map_err(io_err)?;
                } else {
                    writeln!(out, "{c}").map_err(io_err)?;
                }
            }
        }
        Command::Sur { kind, e, k } => {
            writeln!(out, "{}", sur_single(kind.resolve()?, *e, *k)).map_err(io_err)?;
        }
        Command::Invert { file, rmax, order } => {
            let mut table = with_file(file, MomentTable::from_json)?;
            if let Some(order) = order {
                table = table.reorder(order)?;
            }
            let r = multi(rmax, table.basis().len(), "rmax")?;
            let b = multi_invert_zero(&table, &r)?;
            writeln!(out, "{}", printer.bracket(&b)).map_err(io_err)?;
        }
        Command::Localize {
            file,
            group,
            basis,
            kbound,
        } => {
            let table = with_file(file, ModuleMomentTable::from_json)?;
            let m = parse_group(group)?;
            let basis = module_basis(&table, basis)?;
            let k = multi(kbound, basis.len(), "kbound")?;
            let local = localized_moments(&table, &m, &basis, &k)?;
            writeln!(out, "{}", printer.json(&local.to_json())).map_err(io_err)?;
        }
        Command::Reconstruct {
            file,
            group,
            basis,
            rmax,
        } => {
            let table = with_file(file, ModuleMomentTable::from_json)?;
            let m = parse_group(group)?;
            let basis = module_basis(&table, basis)?;
            let r = multi(rmax, basis.len(), "rmax")?;
            let b = reconstruct_probability(&table, &m, &basis, &r)?;
            writeln!(out, "{}", printer.bracket(&b)).map_err(io_err)?;
        }
        Command::Sample {
            p,
            cap,
            n,
            extra_cols,
            seed,
            count,
            targets,
            counts,
            rmax,
            csv,
        } => {
            let config = SamplerConfig {
                p: *p,
                cap: *cap,
                n: *n,
                extra_cols: *extra_cols,
                seed: *seed,
                count: *count,
            };
            if targets.is_empty() {
                let mu = sampler::sample_measure(&config)?;
                writeln!(out, "{}", printer.json(&mu.to_json())).map_err(io_err)?;
                return Ok(());
            }
            let targets = targets
                .iter()
                .map(|t| parse_group(t))
                .collect::<Result<Vec<_>>>()?;
            let counts = counts.clone().unwrap_or_else(|| vec![*count]);
            let records = sampler::convergence_report(&config, &counts, &targets, *rmax)?;
            if printer.pretty {
                for r in &records {
                    writeln!(
                        out,
                        "t={:<8} {:<16} freq {:.6}  bracket {}  reference {:.6}",
                        r.t,
                        r.group.to_string(),
                        rational::to_f64(&r.frequency),
                        r.bracket.render(),
                        r.reference
                    )
                    .map_err(io_err)?;
                }
            } else {
                sampler::write_jsonl(&records, out)?;
            }
            if let Some(path) = csv {
                let mut file = std::fs::File::create(path)
                    .map_err(|e| Error::input(format!("cannot create {}: {e}", path.display())))?;
                sampler::write_csv(&records, &mut file)?;
            }
        }
        Command::Verify { quick, seed } => {
            let options = VerifyOptions {
                quick: *quick,
                seed: *seed,
                budget: Budget::from_env()?,
            };
            let outcomes = run_suite(&options);
            let mut failed = 0;
            let mut starved = 0;
            for o in &outcomes {
                let (tag, detail) = match &o.result {
                    Ok(d) => ("PASS", d.clone()),
                    Err(e) => {
                        failed += 1;
                        if matches!(e, Error::Budget(_)) {
                            starved += 1;
                        }
                        ("FAIL", e.to_string())
                    }
                };
                writeln!(
                    out,
                    "{tag} {}: {detail} [{:.2}s]",
                    o.name,
                    o.elapsed.as_secs_f64()
                )
                .map_err(io_err)?;
            }
            let total = outcomes.len();
            if failed > 0 && failed == starved {
                return Err(Error::budget(format!(
                    "{failed} of {total} checks hit the enumeration budget (raise it with {})",
                    crate::finab::BUDGET_ENV
                )));
            }
            if failed > 0 {
                return Err(Error::consistency(format!(
                    "{failed} of {total} checks failed"
                )));
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut buffer = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(Error::input("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::input(format!("cannot start thread pool: {e}")))
            .and_then(|pool| pool.install(|| run(&cli, &mut buffer))),
        None => run(&cli, &mut buffer),
    };
    let _ = out.write_all(&buffer);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let args = std::iter::once("momentforge").chain(args.iter().copied());
        let code = main_with_args(args, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn scalar_commands() {
        assert_eq!(
            run_args(&["sur", "--abelian", "2", "--e", "2", "--k", "1"]),
            (0, "3\n".into(), "".into())
        );
        assert_eq!(
            run_args(&["coeffs", "--abelian", "2", "--k", "2"]).1,
            "1/3\n"
        );
        assert_eq!(
            run_args(&["sur", "--nonabelian", "120", "--e", "2", "--k", "2"]).1,
            "28800\n"
        );
        assert!(
            run_args(&["--decimal", "coeffs", "--abelian", "2", "--k", "2"])
                .1
                .starts_with("0.333333")
        );
    }

    #[test]
    fn flag_errors() {
        assert_eq!(run_args(&["sur", "--abelian", "2", "--e", "2"]).0, 1);
        assert_eq!(
            run_args(&[
                "sur",
                "--abelian",
                "2",
                "--nonabelian",
                "60",
                "--e",
                "1",
                "--k",
                "1"
            ])
            .0,
            1
        );
        assert_eq!(
            run_args(&["sur", "--abelian", "6", "--e", "1", "--k", "1"]).0,
            1
        );
        assert_eq!(
            run_args(&["coeffs", "--abelian", "2", "--k", "1", "--bogus"]).0,
            1
        );
        assert_eq!(
            run_args(&["sample", "--p", "2", "--n", "3", "--count", "5"]).0,
            1
        );
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn group_syntax() {
        let z4z2: FinAbGroup = serde_json::from_str(r#"{"2":[2,1]}"#).unwrap();
        assert_eq!(parse_group("4x2").unwrap(), z4z2);
        assert_eq!(parse_group("Z/4 x Z/2").unwrap(), z4z2);
        assert_eq!(parse_group(r#"{"2":[2,1]}"#).unwrap(), z4z2);
        assert_eq!(parse_group("6").unwrap(), FinAbGroup::cyclic(6).unwrap());
        assert!(parse_group("1").unwrap().is_trivial());
        assert!(parse_group("4y").is_err());
    }

    #[test]
    fn module_primes_default_to_table() {
        let table = ModuleMomentTable::from_fn(BTreeSet::from([2, 3]), 6, |_| {
            Rational::from_integer(1.into())
        })
        .unwrap();
        assert_eq!(
            module_basis(&table, &None).unwrap(),
            TypeBasis::primes(&[2, 3]).unwrap()
        );
    }
}
