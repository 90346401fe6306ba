use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use balmer::dot::dot_of_space;
use balmer::error::{EngineError, Result};
use balmer::ideal::{balmer_spectrum, enumerate_radical_ideals, spectrum_of_stabilization};
use balmer::lattice::{birkhoff_round_trip, check_coherent_frame_seeded};
use balmer::mf::{absorption_check, mf_tensor_hat, mf_validate};
use balmer::poly::Poly;
use balmer::presentation::{CategoryPresentation, Label};
use balmer::presets;
use balmer::report::ValidationReport;
use balmer::schema::{
    from_json_str, full_report, to_json_pretty, ChainFile, LatticeFile, MfFile, PresentationFile,
    SpaceFile, SpectrumSection, SpliceFile,
};
use balmer::space::{are_homeomorphic, hochster_dual};
use balmer::splice::splice;

/// Analyze finitely presented tensor categories: enumerate radical thick
/// tensor ideals, compute prime spectra and their dualities, and work with
/// matrix factorizations and extension chains.
#[derive(Parser)]
#[command(name = "balmer", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the machine-readable document for the command to this file.
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Label cap for ideal enumeration; BALMER_CAP sets the default.
    #[arg(long, global = true, value_name = "N")]
    cap: Option<usize>,
    /// Seed for sampled property sweeps.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a presentation file against the structural laws.
    Validate { file: PathBuf },
    /// List every radical thick tensor ideal of a presentation.
    Ideals { file: PathBuf },
    /// Compute the prime spectrum with its topology.
    Spectrum {
        file: PathBuf,
        /// Write the specialization diagram to this file as DOT.
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
    },
    /// Match radical ideals against specialization-closed point sets.
    Classify { file: PathBuf },
    /// Quotient by projective-injective labels and analyze the result.
    Stabilize {
        file: PathBuf,
        /// Comma-separated labels generating the ideal to kill.
        #[arg(long, value_name = "a,b")]
        ideal: String,
    },
    /// Dualize a space file, or the spectrum of a presentation.
    Hochster {
        /// Space document to dualize.
        file: Option<PathBuf>,
        /// Presentation whose spectrum is dualized instead.
        #[arg(long, value_name = "PRESENTATION", conflicts_with = "file")]
        from_spectrum: Option<PathBuf>,
    },
    /// Frame checks and the irreducible-poset round trip for a lattice file.
    Birkhoff { file: PathBuf },
    /// Matrix factorization tools.
    Mf {
        #[command(subcommand)]
        command: MfCommand,
    },
    /// Extension chain splicing.
    Splice {
        #[command(subcommand)]
        command: SpliceCommand,
    },
    /// List bundled presentations, or print one as a document.
    Presets { name: Option<String> },
}

#[derive(Subcommand)]
enum MfCommand {
    /// Check the defining identities of a factorization file.
    Validate { file: PathBuf },
    /// Tensor two factorization files and validate the result.
    Tensor { first: PathBuf, second: PathBuf },
    /// Search for the isomorphism absorbing a trivial factor of `potential`.
    Absorb {
        file: PathBuf,
        /// Potential of the trivial factor, e.g. "y^2".
        potential: String,
        /// Degree bound for isomorphism entries.
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
}

#[derive(Subcommand)]
enum SpliceCommand {
    /// Splice the two chains of a file and print the result.
    Demo { file: PathBuf },
}

fn main() -> ExitCode {
    // Die quietly on closed pipes (`balmer spectrum f | head`) instead of
    // panicking: the runtime ignores SIGPIPE, so restore the default.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn effective_cap(cli: &Cli) -> Option<usize> {
    cli.cap.or_else(|| std::env::var("BALMER_CAP").ok().and_then(|v| v.parse().ok()))
}

fn read_doc<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    from_json_str(&text, &path.display().to_string())
}

fn load_presentation(path: &Path) -> Result<CategoryPresentation> {
    read_doc::<PresentationFile>(path)?.to_presentation()
}

fn write_json<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    if let Some(path) = &cli.json {
        fs::write(path, to_json_pretty(value)?)?;
    }
    Ok(())
}

fn parse_ideal(arg: &str) -> Result<BTreeSet<Label>> {
    arg.split(',').map(|part| Label::new(part.trim())).collect()
}

fn run(cli: &Cli) -> Result<bool> {
    let cap = effective_cap(cli);
    match &cli.command {
        Command::Validate { file } => {
            let p = load_presentation(file)?;
            let report = p.validate()?;
            print!("{report}");
            write_json(cli, &report)?;
            Ok(report.passed())
        }
        Command::Ideals { file } => {
            let p = load_presentation(file)?;
            let lattice = enumerate_radical_ideals(&p, cap)?;
            println!("radical thick tensor ideals: {}", lattice.elements.len());
            for e in &lattice.elements {
                println!("  {e}");
            }
            let names: Vec<String> = lattice.elements.iter().map(|e| e.to_string()).collect();
            write_json(cli, &json!({ "ideals": names }))?;
            Ok(true)
        }
        Command::Spectrum { file, dot } => {
            let p = load_presentation(file)?;
            let space = balmer_spectrum(&p, cap)?;
            println!("prime ideals: {}", space.points.len());
            for point in &space.points {
                println!("  {point}");
            }
            println!("closed sets: {}; specialization: {}",
                space.closed_sets.len(), space.specialization_direction);
            if let Some(out) = dot {
                fs::write(out, dot_of_space(&space.to_top_space(), "spectrum")?)?;
            }
            write_json(cli, &SpectrumSection::of(&space))?;
            Ok(true)
        }
        Command::Classify { file } => {
            let p = load_presentation(file)?;
            let report = full_report(&p, cap)?;
            println!(
                "{} radical ideals <-> {} specialization-closed subsets",
                report.bijection.ideal_count, report.bijection.thomason_count
            );
            for (ideal, support) in &report.bijection.pairs {
                println!("  {ideal} <-> {support}");
            }
            let checks = ValidationReport { checks: report.checks.clone() };
            print!("{checks}");
            write_json(cli, &report)?;
            Ok(checks.passed())
        }
        Command::Stabilize { file, ideal } => {
            let p = load_presentation(file)?;
            let ideal = parse_ideal(ideal)?;
            let stabilized = p.stabilize(&ideal)?;
            let space = spectrum_of_stabilization(&p, &ideal, cap)?;
            println!(
                "stabilized presentation keeps {} of {} labels",
                stabilized.labels.len(),
                p.labels.len()
            );
            println!("prime ideals after stabilization: {}", space.points.len());
            for point in &space.points {
                println!("  {point}");
            }
            write_json(cli, &PresentationFile::from_presentation(&stabilized))?;
            Ok(true)
        }
        Command::Hochster { file, from_spectrum } => {
            let space = match (file, from_spectrum) {
                (Some(path), None) => read_doc::<SpaceFile>(path)?.to_space()?,
                (None, Some(path)) => {
                    balmer_spectrum(&load_presentation(path)?, cap)?.to_top_space()
                }
                _ => {
                    return Err(EngineError::Precondition(
                        "pass a space file or --from-spectrum with a presentation".into(),
                    ))
                }
            };
            let outcome = hochster_dual(&space)?;
            println!(
                "dual has {} points and {} closed sets",
                outcome.dual.len(),
                outcome.dual.closed_sets().len()
            );
            let mut involutive = true;
            if space.len() <= 8 {
                let double = hochster_dual(&outcome.dual)?;
                involutive = are_homeomorphic(&double.dual, &space)?;
                println!(
                    "double dual homeomorphic to original: {}",
                    if involutive { "yes" } else { "NO" }
                );
            }
            write_json(cli, &SpaceFile::from_space(&outcome.dual))?;
            Ok(involutive)
        }
        Command::Birkhoff { file } => {
            let lattice = read_doc::<LatticeFile>(file)?.to_lattice()?;
            let mut report =
                check_coherent_frame_seeded(&lattice, None, cli.seed.unwrap_or(0xC0FFEE));
            let outcome = birkhoff_round_trip(&lattice)?;
            println!(
                "join-irreducible poset: {}",
                if outcome.irreducible_poset.is_empty() {
                    "empty".to_string()
                } else {
                    outcome.irreducible_poset.names().join(", ")
                }
            );
            report.merge(outcome.report);
            print!("{report}");
            write_json(
                cli,
                &json!({
                    "irreducible_poset": {
                        "names": outcome.irreducible_poset.names(),
                        "hasse": outcome
                            .irreducible_poset
                            .covers()
                            .iter()
                            .map(|&(i, j)| {
                                (
                                    outcome.irreducible_poset.names()[i].clone(),
                                    outcome.irreducible_poset.names()[j].clone(),
                                )
                            })
                            .collect::<Vec<_>>(),
                    },
                    "checks": report.checks,
                }),
            )?;
            Ok(report.passed())
        }
        Command::Mf { command } => run_mf(cli, command),
        Command::Splice { command } => match command {
            SpliceCommand::Demo { file } => {
                let doc: SpliceFile = read_doc(file)?;
                let first = doc.first.to_chain()?;
                let second = doc.second.to_chain()?;
                let result = splice(&first, &second)?;
                println!("first:   {first}");
                println!("second:  {second}");
                println!(
                    "spliced: {result}   (degree {} + {} = {}, sign {})",
                    first.degree(),
                    second.degree(),
                    result.degree(),
                    result.sign
                );
                write_json(cli, &ChainFile::from_chain(&result))?;
                Ok(true)
            }
        },
        Command::Presets { name } => match name {
            None => {
                for (preset_name, _) in presets::all() {
                    println!("{preset_name}");
                }
                Ok(true)
            }
            Some(n) => {
                let p = presets::by_name(n).ok_or_else(|| {
                    EngineError::Precondition(format!(
                        "unknown preset {n}; run `balmer presets` for the list"
                    ))
                })?;
                let file = PresentationFile::from_presentation(&p);
                print!("{}", to_json_pretty(&file)?);
                write_json(cli, &file)?;
                Ok(true)
            }
        },
    }
}

fn run_mf(cli: &Cli, command: &MfCommand) -> Result<bool> {
    match command {
        MfCommand::Validate { file } => {
            let m = read_doc::<MfFile>(file)?.to_mf()?;
            let report = mf_validate(&m);
            print!("{report}");
            write_json(cli, &report)?;
            Ok(report.passed())
        }
        MfCommand::Tensor { first, second } => {
            let a = read_doc::<MfFile>(first)?.to_mf()?;
            let b = read_doc::<MfFile>(second)?.to_mf()?;
            let product = mf_tensor_hat(&a, &b)?;
            println!(
                "{}x{} tensor {}x{} -> {}x{} factorization of {}",
                a.size(),
                a.size(),
                b.size(),
                b.size(),
                product.size(),
                product.size(),
                product.f
            );
            let report = mf_validate(&product);
            print!("{report}");
            write_json(cli, &MfFile::from_mf(&product))?;
            Ok(report.passed())
        }
        MfCommand::Absorb { file, potential, degree } => {
            let a = read_doc::<MfFile>(file)?.to_mf()?;
            let g = Poly::parse(potential)?;
            let outcome = absorption_check(&a, &g, *degree)?;
            print!("{}", outcome.report);
            write_json(
                cli,
                &json!({
                    "checks": outcome.report.checks,
                    "witness": outcome.witness,
                }),
            )?;
            Ok(outcome.report.passed())
        }
    }
}
