//! `tomo`: reconstruct, check and render bar tilings from their projections.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tomo_core::bench;
use tomo_core::error::Error;
use tomo_core::exact::ExactSolver;
use tomo_core::format::{
    check, from_json, render_ascii, render_svg, to_json, GadgetFile, InstanceFile, ThreeColorFile, TilingFile,
};
use tomo_core::greedy::{is_block_uniform, tile_block_uniform, tile_histogram_h1};
use tomo_core::hardness::{find_gadget, frozen_gadget, reduce, verify_gadget};
use tomo_core::separation::{analyze_cuts, check_condition1, check_condition2};
use tomo_core::uniform::{
    decompose, feasible_uniform_rectangle, feasible_uniform_torus, tile_uniform_rectangle, tile_uniform_torus,
    UniformParams,
};
use tomo_core::{Instance, Shape, Tiling};

const EXIT_UNSOLVABLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "tomo", version, about = "Bar tilings from horizontal and vertical projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TilingOutput {
    Json,
    Ascii,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderFormat {
    Ascii,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Rectangle,
    Torus,
}

#[derive(Subcommand)]
enum Command {
    /// Find one tiling with the given projections.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = TilingOutput::Json)]
        format: TilingOutput,
        /// Largest region the exact solver accepts, in cells.
        #[arg(long, default_value_t = ExactSolver::default().cell_budget)]
        cell_budget: usize,
        /// Search nodes the exact solver may visit.
        #[arg(long, default_value_t = ExactSolver::default().node_budget)]
        node_budget: u64,
    },
    /// Check a tiling against an instance.
    Check { instance: PathBuf, tiling: PathBuf },
    /// List tilings with the given projections as a JSON array.
    Enumerate {
        instance: PathBuf,
        #[arg(long, default_value_t = 100)]
        limit: usize,
        #[arg(long, default_value_t = ExactSolver::default().cell_budget)]
        cell_budget: usize,
    },
    /// Start counts, cuts and the two necessary conditions of a rectangle instance.
    Separate { instance: PathBuf },
    /// Decide and build a tiling with constant projections.
    Uniform {
        #[arg(long, value_enum, default_value_t = ShapeArg::Torus)]
        shape: ShapeArg,
        a: usize,
        b: usize,
        h: usize,
        v: usize,
        m: usize,
        n: usize,
        #[arg(long, value_enum, default_value_t = TilingOutput::Json)]
        format: TilingOutput,
    },
    /// Turn a three-color instance into a domino instance.
    Reduce {
        three_color: PathBuf,
        /// Gadget file; the bundled gadget when absent.
        #[arg(long)]
        gadget: Option<PathBuf>,
    },
    /// Print, search for, or verify a gadget.
    Gadget {
        /// Search a block of the given size and print the gadget file.
        #[arg(long, conflicts_with = "verify")]
        find: bool,
        /// Re-derive and check every property of a gadget file.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 7)]
        width: usize,
        #[arg(long, default_value_t = 7)]
        height: usize,
        /// Gadget file to verify; the bundled gadget when absent.
        file: Option<PathBuf>,
    },
    /// Draw a tiling file.
    Render {
        tiling: PathBuf,
        #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
        format: RenderFormat,
    },
    /// Time the h = 1 greedy on square instances.
    Bench {
        #[arg(long, default_value_t = 2000)]
        max_a: usize,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget(_) => EXIT_BUDGET,
            Error::Infeasible(_) | Error::SearchExhausted { .. } => EXIT_UNSOLVABLE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(from_json::<InstanceFile>(&read(path)?)?.to_instance()?)
}

fn load_tiling(path: &Path) -> Result<Tiling, Failure> {
    Ok(from_json::<TilingFile>(&read(path)?)?.to_tiling()?)
}

fn print_tiling(tiling: &Tiling, format: TilingOutput) {
    match format {
        TilingOutput::Json => println!("{}", to_json(&TilingFile::from_tiling(tiling))),
        TilingOutput::Ascii => print!("{}", render_ascii(tiling)),
    }
}

fn uniform_params(instance: &Instance) -> Option<UniformParams> {
    let g = instance.geometry();
    let p = &instance.projections;
    let all_same = |xs: &[usize]| xs.iter().all(|&x| x == xs[0]);
    (instance.region.is_full() && all_same(&p.m) && all_same(&p.n))
        .then(|| UniformParams::new(g.a, g.b, instance.spec.h, instance.spec.v, p.m[0], p.n[0]))
}

/// Dedicated solvers first, then the exact search. `Ok(None)` is a proof of
/// unsolvability.
fn dispatch(instance: &Instance, exact: ExactSolver) -> Result<Option<Tiling>, Error> {
    let g = instance.geometry();
    let (h, v) = (instance.spec.h, instance.spec.v);
    let p = &instance.projections;
    if let Some(params) = uniform_params(instance) {
        let (feasible, tile): (_, fn(UniformParams) -> tomo_core::error::Result<Tiling>) = match g.shape {
            Shape::Torus => (feasible_uniform_torus(params)?, tile_uniform_torus),
            Shape::Rectangle => (feasible_uniform_rectangle(params)?, tile_uniform_rectangle),
        };
        if !feasible {
            return Ok(None);
        }
        if let Ok(t) = tile(params) {
            return Ok(Some(t));
        }
    }
    if g.shape == Shape::Rectangle {
        let greedy = if h == 1 && instance.region.is_histogram() {
            Some(tile_histogram_h1(&instance.region, &p.m, &p.n, v))
        } else if instance.region.is_full() && is_block_uniform(&p.m, h) {
            Some(tile_block_uniform(g.a, g.b, h, v, &p.m, &p.n))
        } else {
            None
        };
        match greedy {
            Some(Err(Error::Promise { .. })) => return Ok(None),
            Some(result) => return result,
            None => {}
        }
    }
    exact.solve(instance)
}

fn solve(path: &Path, format: TilingOutput, exact: ExactSolver) -> CliResult {
    let instance = load_instance(path)?;
    match dispatch(&instance, exact) {
        Ok(Some(t)) => {
            print_tiling(&t, format);
            Ok(ExitCode::SUCCESS)
        }
        Ok(None) => {
            println!("UNSOLVABLE");
            Ok(ExitCode::from(EXIT_UNSOLVABLE))
        }
        Err(Error::Budget(reason)) => {
            println!("UNKNOWN (budget)");
            eprintln!("{reason}");
            Ok(ExitCode::from(EXIT_BUDGET))
        }
        Err(e) => Err(e.into()),
    }
}

fn check_files(instance: &Path, tiling: &Path) -> CliResult {
    let report = check(&load_instance(instance)?, &load_tiling(tiling)?);
    print!("{report}");
    Ok(if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_UNSOLVABLE)
    })
}

fn enumerate(path: &Path, limit: usize, cell_budget: usize) -> CliResult {
    let instance = load_instance(path)?;
    let all = ExactSolver::with_cell_budget(cell_budget).enumerate(&instance, limit)?;
    let files: Vec<TilingFile> = all.iter().map(TilingFile::from_tiling).collect();
    println!("{}", to_json(&files));
    eprintln!("{} tiling(s)", files.len());
    Ok(if all.is_empty() {
        ExitCode::from(EXIT_UNSOLVABLE)
    } else {
        ExitCode::SUCCESS
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn separate(path: &Path) -> CliResult {
    let instance = load_instance(path)?;
    let g = instance.geometry();
    if g.shape != Shape::Rectangle {
        return Err(Error::InvalidInput {
            field: "shape".into(),
            reason: "cut analysis needs a rectangle".into(),
        }
        .into());
    }
    if !instance.region.is_full() {
        return Err(Error::InvalidInput {
            field: "cells".into(),
            reason: "cut analysis needs the full rectangle".into(),
        }
        .into());
    }
    let (h, v) = (instance.spec.h, instance.spec.v);
    let p = &instance.projections;
    let report = analyze_cuts(g.a, g.b, h, v, &p.m, &p.n)?;
    println!("c: {:?}", report.c);
    println!("d: {:?}", report.d);
    if let Some(reason) = &report.infeasible {
        println!("infeasible: {reason:?}");
    } else {
        println!("column cuts: {:?}", report.column_cuts);
        println!("row cuts: {:?}", report.row_cuts);
        for blk in &report.blocks {
            println!(
                "block columns {}..{} rows {}..{} ({}x{})",
                blk.cols.0,
                blk.cols.1,
                blk.rows.0,
                blk.rows.1,
                blk.width(),
                blk.height()
            );
        }
    }
    let c1 = check_condition1(g.a, g.b, h, v, &p.m, &p.n)?.holds();
    let c2 = check_condition2(&report, h, v);
    println!("condition1: {}, condition2: {}", pass(c1), pass(c2));
    Ok(ExitCode::SUCCESS)
}

fn uniform(shape: ShapeArg, params: UniformParams, format: TilingOutput) -> CliResult {
    let (feasible, tiling) = match shape {
        ShapeArg::Torus => {
            let feasible = feasible_uniform_torus(params)?;
            if feasible && params.m > 0 && params.n > 0 {
                let d = decompose(params)?;
                eprintln!("p = {}, q = {}, a' = {}, b' = {}", d.p, d.q, d.a_prime, d.b_prime);
            }
            (feasible, feasible.then(|| tile_uniform_torus(params)).transpose())
        }
        ShapeArg::Rectangle => {
            let feasible = feasible_uniform_rectangle(params)?;
            (feasible, feasible.then(|| tile_uniform_rectangle(params)).transpose())
        }
    };
    match tiling? {
        Some(t) => {
            print_tiling(&t, format);
            Ok(ExitCode::SUCCESS)
        }
        None => {
            debug_assert!(!feasible);
            println!("UNSOLVABLE");
            Ok(ExitCode::from(EXIT_UNSOLVABLE))
        }
    }
}

fn load_gadget(path: Option<&Path>) -> Result<tomo_core::hardness::Gadget, Failure> {
    Ok(match path {
        Some(p) => from_json::<GadgetFile>(&read(p)?)?.to_gadget()?,
        None => frozen_gadget()?,
    })
}

fn reduce_file(path: &Path, gadget: Option<&Path>) -> CliResult {
    let three = from_json::<ThreeColorFile>(&read(path)?)?.to_instance()?;
    let g = load_gadget(gadget)?;
    println!("{}", to_json(&InstanceFile::from_instance(&reduce(&three, &g)?)));
    Ok(ExitCode::SUCCESS)
}

fn gadget(find: bool, verify: bool, width: usize, height: usize, file: Option<&Path>) -> CliResult {
    if find {
        println!("{}", to_json(&GadgetFile::from_gadget(&find_gadget(width, height)?)));
        return Ok(ExitCode::SUCCESS);
    }
    let g = load_gadget(file)?;
    if !verify {
        println!("{}", to_json(&GadgetFile::from_gadget(&g)));
        return Ok(ExitCode::SUCCESS);
    }
    let report = verify_gadget(&g)?;
    print!("{report}");
    Ok(if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_UNSOLVABLE)
    })
}

fn render(path: &Path, format: RenderFormat) -> CliResult {
    let tiling = load_tiling(path)?;
    match format {
        RenderFormat::Ascii => print!("{}", render_ascii(&tiling)),
        RenderFormat::Svg => print!("{}", render_svg(&tiling)),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_bench(max_a: usize, repeats: usize) -> CliResult {
    let mut sizes: Vec<usize> = bench::DEFAULT_SIZES.iter().copied().filter(|&a| a <= max_a).collect();
    if sizes.is_empty() {
        sizes.push(max_a.max(1));
    }
    if repeats == 0 {
        return Err(Error::InvalidInput {
            field: "repeats".into(),
            reason: "must be at least 1".into(),
        }
        .into());
    }
    print!("{}", bench::format_table(&bench::run(&sizes, repeats)?));
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Solve {
            instance,
            format,
            cell_budget,
            node_budget,
        } => solve(
            &instance,
            format,
            ExactSolver {
                cell_budget,
                node_budget,
                ..ExactSolver::default()
            },
        ),
        Command::Check { instance, tiling } => check_files(&instance, &tiling),
        Command::Enumerate {
            instance,
            limit,
            cell_budget,
        } => enumerate(&instance, limit, cell_budget),
        Command::Separate { instance } => separate(&instance),
        Command::Uniform {
            shape,
            a,
            b,
            h,
            v,
            m,
            n,
            format,
        } => uniform(shape, UniformParams::new(a, b, h, v, m, n), format),
        Command::Reduce { three_color, gadget } => reduce_file(&three_color, gadget.as_deref()),
        Command::Gadget {
            find,
            verify,
            width,
            height,
            file,
        } => gadget(find, verify, width, height, file.as_deref()),
        Command::Render { tiling, format } => render(&tiling, format),
        Command::Bench { max_a, repeats } => run_bench(max_a, repeats),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
