//! `lattice`: command-line front end for the lattice descriptor codec.
//!
//! Exit codes: 0 on success, 1 when validation finds violations (or
//! `compare` finds the inputs distinct), 2 on malformed input or any
//! other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_codec::canonicalizer::{self, CanonicalizeConfig, ChiralityMode};
use lattice_codec::encoder::{self, EncodeConfig};
use lattice_codec::io::{DescriptorFile, LatticeFile, TOOL_VERSION};
use lattice_codec::mechanics::{self, DOF_PER_NODE};
use lattice_codec::reconstructor;
use lattice_codec::types::{DescriptorSet, UnitCell};
use lattice_codec::validator::{self, ValidationReport};
use lattice_codec::{io, properties, tessellator, Error};

const ENV_TOL_POS: &str = "LATTICE_CODEC_TOL_POS";

#[derive(Parser)]
#[command(name = "lattice", version, about = "Codec for periodic lattice truss materials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Chirality {
    /// Keep mirror images distinct.
    Strict,
    /// Identify mirror images (default).
    #[default]
    Ignore,
}

impl Chirality {
    fn mode(self) -> ChiralityMode {
        match self {
            Chirality::Strict => ChiralityMode::Preserve,
            Chirality::Ignore => ChiralityMode::Ignore,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
    Obj,
}

#[derive(Args)]
struct IoArgs {
    /// Input file (lattice or descriptor JSON).
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long = "out", value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TolArgs {
    /// Position tolerance; falls back to LATTICE_CODEC_TOL_POS, then to a
    /// relative default.
    #[arg(long = "tol-pos", value_name = "EPS")]
    tol_pos: Option<f64>,
    /// Distance tolerance for embeddability checks.
    #[arg(long = "tol-dist", value_name = "TAU")]
    tol_dist: Option<f64>,
}

impl TolArgs {
    fn position_tolerance(&self) -> Result<Option<f64>, String> {
        if let Some(v) = self.tol_pos {
            return Ok(Some(v));
        }
        match std::env::var(ENV_TOL_POS) {
            Ok(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("{ENV_TOL_POS}={s:?} is not a number")),
            Err(_) => Ok(None),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Encode a lattice file into the five descriptor matrices.
    Encode {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value_t = Chirality::Ignore)]
        chirality: Chirality,
    },
    /// Check the structural rules; works on either file type, or on every
    /// JSON file in a directory.
    Validate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Rewrite the descriptors in the canonical frame and labeling.
    Canonicalize {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value_t = Chirality::Ignore)]
        chirality: Chirality,
    },
    /// Print the canonical fingerprint.
    Fingerprint {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value_t = Chirality::Ignore)]
        chirality: Chirality,
    },
    /// Decide whether two inputs describe the same material.
    Compare {
        /// First input file.
        a: PathBuf,
        /// Second input file.
        b: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value_t = Chirality::Ignore)]
        chirality: Chirality,
    },
    /// Rebuild coordinates from a descriptor file.
    Reconstruct {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Print scalar properties; optionally write the coefficient matrices.
    Properties {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Parent material density, enables the relative density line.
        #[arg(long, value_name = "RHO_S")]
        parent_density: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Assemble the global beam-frame stiffness matrix.
    Stiffness {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Beam elements per strut.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Poisson ratio for the torsion terms.
        #[arg(long, default_value_t = 0.3)]
        nu: f64,
        /// Fix all six DOFs of a node (repeatable).
        #[arg(long = "fix", value_name = "NODE")]
        fixed: Vec<usize>,
        /// Point load NODE:DOF:VALUE with DOF in 0..6 (repeatable);
        /// triggers a static solve.
        #[arg(long = "load", value_name = "NODE:DOF:VALUE")]
        loads: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Tile the cell into a larger one.
    Tessellate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Repetitions per axis, e.g. 2x2x2.
        #[arg(long, value_name = "M1xM2xM3")]
        dims: String,
    },
    /// Write the cell geometry for external tools.
    Export {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, value_enum, default_value_t = Format::Obj)]
        format: Format,
    },
}

/// Either of the two JSON file types, decided by shape.
enum Input {
    Lattice(LatticeFile),
    Descriptors(DescriptorFile),
}

impl Input {
    fn load(path: &Path) -> Result<Input, Error> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        if value.get("nodes").is_some() {
            LatticeFile::load(path).map(Input::Lattice)
        } else if value.get("g").is_some() {
            DescriptorFile::load(path).map(Input::Descriptors)
        } else {
            Err(Error::Parse {
                path: path.display().to_string(),
                msg: "neither a lattice file (no \"nodes\") nor a descriptor file (no \"g\")"
                    .into(),
            })
        }
    }

    /// A coordinatized cell: direct for lattice files, rebuilt for
    /// descriptor files.
    fn to_cell(&self, tol_pos: Option<f64>) -> Result<UnitCell<f64>, Error> {
        match self {
            Input::Lattice(f) => f.to_cell(),
            Input::Descriptors(f) => {
                let desc = f.to_descriptors()?;
                Ok(reconstructor::rebuild_cell(&desc, tol_pos)?.0)
            }
        }
    }

    fn to_descriptors(&self, tol_pos: Option<f64>) -> Result<DescriptorSet<f64>, Error> {
        match self {
            Input::Lattice(f) => {
                let cfg = EncodeConfig { position_tolerance: tol_pos, run_validation: false };
                encoder::encode(&f.to_cell()?, &cfg)
            }
            Input::Descriptors(f) => f.to_descriptors(),
        }
    }
}

fn write_out(output: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match output {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_lines(report: &ValidationReport) -> String {
    if report.is_clean() {
        format!("clean (periodic dimension {})\n", report.periodic_dimension())
    } else {
        let mut out = String::new();
        for v in report.violations() {
            out.push_str(&format!("{:?} {:?}: {}\n", v.rule, v.indices, v.detail));
        }
        out.push_str(&format!("periodic dimension {}\n", report.periodic_dimension()));
        out
    }
}

fn validate_input(input: &Input, tol: &TolArgs, eps: Option<f64>) -> Result<ValidationReport, Error> {
    match input {
        Input::Lattice(f) => {
            let cell = f.to_cell()?;
            let cfg = EncodeConfig { position_tolerance: eps, run_validation: false };
            let desc = encoder::encode(&cell, &cfg)?;
            validator::validate_raw(
                desc.geometry(),
                desc.density(),
                desc.stretching(),
                desc.bending(),
                desc.packing(),
                Some(&cell),
                eps,
                tol.tol_dist,
            )
        }
        Input::Descriptors(f) => {
            let desc = f.to_descriptors()?;
            validator::validate_raw(
                desc.geometry(),
                desc.density(),
                desc.stretching(),
                desc.bending(),
                desc.packing(),
                None,
                eps,
                tol.tol_dist,
            )
        }
    }
}

/// Validate every `.json` file in a directory, one worker thread each.
fn validate_dir(dir: &Path, tol: &TolArgs, eps: Option<f64>) -> u8 {
    let mut paths: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("{}: {e}", dir.display());
            return 2;
        }
    };
    paths.sort();
    let results: Vec<(PathBuf, u8, String)> = std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .map(|path| {
                scope.spawn(move || {
                    let outcome = std::panic::catch_unwind(|| {
                        Input::load(path).and_then(|input| validate_input(&input, tol, eps))
                    });
                    match outcome {
                        Ok(Ok(report)) => {
                            let code = u8::from(!report.is_clean());
                            (path.clone(), code, report_lines(&report))
                        }
                        Ok(Err(e)) => (path.clone(), 2, format!("error: {e}\n")),
                        Err(_) => (path.clone(), 2, "error: internal panic\n".into()),
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread")).collect()
    });
    let mut worst = 0;
    for (path, code, text) in results {
        worst = worst.max(code);
        for line in text.lines() {
            println!("{}: {line}", path.display());
        }
    }
    worst
}

fn fingerprint_of(input: &Input, eps: Option<f64>, chirality: Chirality) -> Result<String, Error> {
    let cell = input.to_cell(eps)?;
    let cfg = CanonicalizeConfig { chirality: chirality.mode(), position_tolerance: eps };
    canonicalizer::fingerprint(&cell, &cfg)
}

fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() != 3 {
        return Err(format!("--dims wants M1xM2xM3, got {s:?}"));
    }
    let mut out = [0usize; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .parse::<usize>()
            .map_err(|_| format!("--dims component {part:?} is not a count"))?;
    }
    Ok(out)
}

fn parse_load(s: &str) -> Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let err = || format!("--load wants NODE:DOF:VALUE, got {s:?}");
    if parts.len() != 3 {
        return Err(err());
    }
    let node = parts[0].parse::<usize>().map_err(|_| err())?;
    let dof = parts[1].parse::<usize>().map_err(|_| err())?;
    let value = parts[2].parse::<f64>().map_err(|_| err())?;
    if dof >= DOF_PER_NODE {
        return Err(format!("DOF {dof} out of range 0..{DOF_PER_NODE}"));
    }
    Ok((node, dof, value))
}

fn matrix_rows(m: &lattice_codec::Mat) -> Vec<Vec<f64>> {
    m.to_rows()
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Encode { io: ioargs, tol, chirality } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            let cell = match input {
                Input::Lattice(ref f) => f.to_cell()?,
                Input::Descriptors(_) => {
                    return Err(Error::Parse {
                        path: ioargs.input.display().to_string(),
                        msg: "encode wants a lattice file".into(),
                    })
                }
            };
            let cfg = EncodeConfig { position_tolerance: eps, run_validation: true };
            let desc = match encoder::encode(&cell, &cfg) {
                Ok(d) => d,
                Err(Error::Validation(report)) => {
                    eprint!("{}", report_lines(&report));
                    return Ok(1);
                }
                Err(e) => return Err(e),
            };
            let fp = fingerprint_of(&input, eps, chirality)?;
            let file = DescriptorFile::from_descriptors(&desc, Some(fp));
            let text = serde_json::to_string_pretty(&file)
                .map_err(|e| Error::Domain(e.to_string()))?;
            write_out(&ioargs.output, &(text + "\n"))?;
            Ok(0)
        }
        Command::Validate { io: ioargs, tol } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            if ioargs.input.is_dir() {
                return Ok(validate_dir(&ioargs.input, &tol, eps));
            }
            let input = Input::load(&ioargs.input)?;
            let report = validate_input(&input, &tol, eps)?;
            let text = report_lines(&report);
            write_out(&ioargs.output, &text)?;
            Ok(u8::from(!report.is_clean()))
        }
        Command::Canonicalize { io: ioargs, tol, chirality } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            let cell = input.to_cell(eps)?;
            let cfg = CanonicalizeConfig { chirality: chirality.mode(), position_tolerance: eps };
            let canon = canonicalizer::canonicalize_cell(&cell, &cfg)?;
            let fp = canonicalizer::fingerprint(&cell, &cfg)?;
            let file = DescriptorFile::from_descriptors(&canon.descriptors, Some(fp));
            let text = serde_json::to_string_pretty(&file)
                .map_err(|e| Error::Domain(e.to_string()))?;
            write_out(&ioargs.output, &(text + "\n"))?;
            Ok(0)
        }
        Command::Fingerprint { io: ioargs, tol, chirality } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            let fp = fingerprint_of(&input, eps, chirality)?;
            write_out(&ioargs.output, &(fp + "\n"))?;
            Ok(0)
        }
        Command::Compare { a, b, tol, chirality } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let fa = fingerprint_of(&Input::load(&a)?, eps, chirality)?;
            let fb = fingerprint_of(&Input::load(&b)?, eps, chirality)?;
            if fa == fb {
                println!("equivalent");
                Ok(0)
            } else {
                println!("distinct");
                Ok(1)
            }
        }
        Command::Reconstruct { io: ioargs, tol } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            let desc = match input {
                Input::Descriptors(ref f) => f.to_descriptors()?,
                Input::Lattice(_) => {
                    return Err(Error::Parse {
                        path: ioargs.input.display().to_string(),
                        msg: "reconstruct wants a descriptor file".into(),
                    })
                }
            };
            let (cell, _) = reconstructor::rebuild_cell(&desc, eps)?;
            let file = LatticeFile::from_cell(&cell);
            let text = serde_json::to_string_pretty(&file)
                .map_err(|e| Error::Domain(e.to_string()))?;
            write_out(&ioargs.output, &(text + "\n"))?;
            Ok(0)
        }
        Command::Properties { io: ioargs, tol, parent_density, format } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            let desc = input.to_descriptors(eps)?;
            let s = properties::summary(&desc, parent_density)?;
            println!("nodes: {}", s.nodes);
            println!("struts: {}", s.struts);
            println!("average coordination: {}", s.average_coordination);
            println!("weight: {}", s.weight);
            println!("periodic dimension: {}", s.periodic_dimension);
            if let Some(rho) = s.density {
                println!("density: {rho}");
            }
            if let Some(rel) = s.relative_density {
                println!("relative density: {rel}");
            }
            if let Some(out) = &ioargs.output {
                let c = properties::coefficient_matrices(&desc)?;
                let text = match format {
                    Format::Json => {
                        let v = serde_json::json!({
                            "stretch": io::extended_to_json(&c.stretch),
                            "bend1": io::extended_to_json(&c.bend1),
                            "bend2": io::extended_to_json(&c.bend2),
                            "bend3": io::extended_to_json(&c.bend3),
                        });
                        serde_json::to_string_pretty(&v)
                            .map_err(|e| Error::Domain(e.to_string()))?
                            + "\n"
                    }
                    Format::Csv => {
                        let mut text = String::new();
                        for (name, m) in [
                            ("stretch", &c.stretch),
                            ("bend1", &c.bend1),
                            ("bend2", &c.bend2),
                            ("bend3", &c.bend3),
                        ] {
                            text.push_str(name);
                            text.push('\n');
                            text.push_str(&io::csv_extended(m));
                            text.push('\n');
                        }
                        text
                    }
                    Format::Obj => {
                        return Err(Error::Domain(
                            "coefficient matrices have no OBJ form".into(),
                        ))
                    }
                };
                std::fs::write(out, text)?;
            }
            Ok(0)
        }
        Command::Stiffness { io: ioargs, tol, m, nu, fixed, loads, format } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            let cell = input.to_cell(eps)?;
            let global = mechanics::assemble_global(&cell, m, nu)?;
            let dof = global.matrix.n();
            let mut solution: Option<Vec<f64>> = None;
            if !loads.is_empty() {
                let mut load_vec = vec![0.0; dof];
                for spec in &loads {
                    let (node, d, value) = parse_load(spec).map_err(Error::Domain)?;
                    if node == 0 || node > global.node_positions.len() {
                        return Err(Error::Domain(format!("load names unknown node {node}")));
                    }
                    load_vec[(node - 1) * DOF_PER_NODE + d] += value;
                }
                let mut fixed_dofs = Vec::new();
                for &node in &fixed {
                    if node == 0 || node > global.node_positions.len() {
                        return Err(Error::Domain(format!("--fix names unknown node {node}")));
                    }
                    fixed_dofs.extend((0..DOF_PER_NODE).map(|d| (node - 1) * DOF_PER_NODE + d));
                }
                solution = Some(mechanics::solve_static(&global.matrix, &load_vec, &fixed_dofs)?);
            }
            let text = match format {
                Format::Json => {
                    let v = serde_json::json!({
                        "dof_per_node": DOF_PER_NODE,
                        "original_nodes": global.original_nodes,
                        "node_positions": global
                            .node_positions
                            .iter()
                            .map(|p| p.0)
                            .collect::<Vec<_>>(),
                        "matrix": matrix_rows(&global.matrix),
                        "displacements": solution,
                    });
                    serde_json::to_string_pretty(&v).map_err(|e| Error::Domain(e.to_string()))?
                        + "\n"
                }
                Format::Csv => {
                    let mut text = String::new();
                    for row in matrix_rows(&global.matrix) {
                        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                        text.push_str(&cells.join(","));
                        text.push('\n');
                    }
                    if let Some(u) = &solution {
                        text.push('\n');
                        let cells: Vec<String> = u.iter().map(|v| v.to_string()).collect();
                        text.push_str(&cells.join(","));
                        text.push('\n');
                    }
                    text
                }
                Format::Obj => {
                    return Err(Error::Domain("stiffness matrices have no OBJ form".into()))
                }
            };
            write_out(&ioargs.output, &text)?;
            Ok(0)
        }
        Command::Tessellate { io: ioargs, tol, dims } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let counts = parse_dims(&dims).map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            let cell = input.to_cell(eps)?;
            let tiled = tessellator::tessellate(&cell, counts, eps)?;
            let file = LatticeFile::from_cell(tiled.as_unit_cell());
            let text = serde_json::to_string_pretty(&file)
                .map_err(|e| Error::Domain(e.to_string()))?;
            write_out(&ioargs.output, &(text + "\n"))?;
            Ok(0)
        }
        Command::Export { io: ioargs, tol, format } => {
            let eps = tol.position_tolerance().map_err(Error::Domain)?;
            let input = Input::load(&ioargs.input)?;
            match format {
                Format::Obj => {
                    let cell = input.to_cell(eps)?;
                    write_out(&ioargs.output, &io::obj_from_cell(&cell))?;
                }
                Format::Csv => {
                    let desc = input.to_descriptors(eps)?;
                    let mut text = String::new();
                    for (name, m) in [
                        ("g", desc.geometry()),
                        ("d", desc.density()),
                        ("kt", desc.stretching()),
                        ("kb", desc.bending()),
                    ] {
                        text.push_str(name);
                        text.push('\n');
                        text.push_str(&io::csv_matrix(m));
                        text.push('\n');
                    }
                    text.push_str("p\n");
                    text.push_str(&io::csv_packing(desc.packing()));
                    write_out(&ioargs.output, &text)?;
                }
                Format::Json => {
                    let desc = input.to_descriptors(eps)?;
                    let file = DescriptorFile::from_descriptors(&desc, None);
                    let text = serde_json::to_string_pretty(&file)
                        .map_err(|e| Error::Domain(e.to_string()))?;
                    write_out(&ioargs.output, &(text + "\n"))?;
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Error::Validation(report)) => {
            eprint!("{}", report_lines(&report));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error ({TOOL_VERSION}): {e}");
            ExitCode::from(2)
        }
    }
}
