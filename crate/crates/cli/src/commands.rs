use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, ValueEnum};
use eqv_core::burnside::table_of_marks;
use eqv_core::gset::{coset_action_of_class, diagonal_power, orbit_decompose};
use eqv_core::lattice::SubgroupLattice;
use eqv_core::mlp::{build_regular_net, train, Checkpoint, Optimizer, Schedule, Target, TrainConfig};
use eqv_core::sharing::{check_equivariance, make_pattern, Matrix};
use eqv_core::{Caps, GSetExpr, GroupAction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::input::{load_group, parse_action, print_json, read_json, write_json, BadInput};
use crate::table::{render_curve, render_marks};
use crate::GroupArg;

const PRETTY_MAX_CLASSES: usize = 12;

pub fn group(arg: &GroupArg, caps: &Caps, as_json: bool) -> Result<ExitCode> {
    let loaded = load_group(arg, caps)?;
    let g = &loaded.group;
    let action = GroupAction::natural(g.clone());
    let props = action.properties();
    let orbits = action.orbits();
    if as_json {
        print_json(&json!({
            "name": g.name(),
            "order": g.order(),
            "degree": g.degree(),
            "generators": g.generators().len(),
            "orbits": orbits,
            "transitive": props.transitive,
            "faithful": props.faithful,
            "regular": props.regular,
        }))?;
        return Ok(ExitCode::SUCCESS);
    }
    let flag = |b: bool, s: &str| if b { s.to_string() } else { format!("not {s}") };
    if let Some(name) = g.name() {
        println!("group {name}");
    }
    println!(
        "order {}, {}, {}, {}",
        g.order(),
        flag(props.transitive, "transitive"),
        flag(props.faithful, "faithful"),
        flag(props.regular, "regular")
    );
    println!("degree {}", g.degree());
    println!("generators {}", g.generators().len());
    for p in g.generators() {
        println!("  {p}");
    }
    println!("{} orbits", orbits.len());
    for o in &orbits {
        let pts: Vec<String> = o.iter().map(|p| p.to_string()).collect();
        println!("  {{{}}}", pts.join(", "));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn marks(arg: &GroupArg, caps: &Caps, out: Option<&Path>) -> Result<ExitCode> {
    let loaded = load_group(arg, caps)?;
    let lattice = SubgroupLattice::build(&loaded.group, caps)?;
    let tom = table_of_marks(lattice);
    match out {
        Some(path) => {
            write_json(path, &tom.to_json())?;
            if tom.len() <= PRETTY_MAX_CLASSES {
                print!("{}", render_marks(&tom));
            } else {
                eprintln!("{} classes; table written to {} only", tom.len(), path.display());
            }
        }
        None => print_json(&tom.to_json())?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn decompose(
    arg: &GroupArg,
    caps: &Caps,
    class_key: &str,
    power: usize,
    explicit: bool,
    regular_order: bool,
) -> Result<ExitCode> {
    let loaded = load_group(arg, caps)?;
    let lattice = SubgroupLattice::build(&loaded.group, caps)?;
    let k = lattice
        .find_class(class_key)
        .ok_or_else(|| BadInput(format!("no subgroup class {class_key:?}; classes are {:?}", lattice.labels())))?;
    let tom = table_of_marks(lattice);
    let lattice = tom.lattice();
    let expr = tom.power(&GSetExpr::indicator(tom.len(), k), power)?;
    let mut report = json!({
        "class": lattice.label(k),
        "stabilizer_order": lattice.class(k).sub_order,
        "power": power,
        "decomposition": expr.labeled(lattice),
        "orbits": expr.orbit_count() as i64,
        "regular_orbit": expr.has_regular_orbit(),
    });
    if explicit {
        let base = coset_action_of_class(lattice, k)?;
        let product = diagonal_power(&base, power, caps)?;
        let found = orbit_decompose(&product.action, lattice)?;
        if found != expr {
            bail!("explicit decomposition {} disagrees with marks {}", found.labeled(lattice), expr.labeled(lattice));
        }
        report["explicit"] = json!({ "points": product.action.point_count(), "agrees": true });
    }
    if regular_order {
        report["regular_order"] = serde_json::to_value(tom.regular_orbit_order(k)?)?;
    }
    print_json(&report)?;
    Ok(ExitCode::SUCCESS)
}

pub fn pattern(
    arg: &GroupArg,
    caps: &Caps,
    input: &str,
    output: &str,
    out: Option<&Path>,
    instantiate: Option<&Path>,
    seed: u64,
) -> Result<ExitCode> {
    let loaded = load_group(arg, caps)?;
    let a_in = parse_action(input, &loaded.group, caps)?;
    let a_out = parse_action(output, &loaded.group, caps)?;
    let p = make_pattern(&a_out, &a_in)?;
    match out {
        Some(path) => write_json(path, &p)?,
        None => print_json(&p)?,
    }
    if let Some(path) = instantiate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..p.num_orbits).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..p.num_bias_orbits).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (m, bias) = p.instantiate(&w, &b)?;
        write_json(path, &MatrixFile::Full { matrix: m.to_rows(), bias: Some(bias) })?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Full {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bias: Option<Vec<f64>>,
    },
    Bare(Vec<Vec<f64>>),
}

pub fn verify(path: &Path, arg: &GroupArg, caps: &Caps, input: &str, output: &str, tol: f64) -> Result<ExitCode> {
    let file: MatrixFile = read_json(path)?;
    let loaded = load_group(arg, caps)?;
    let a_in = parse_action(input, &loaded.group, caps)?;
    let a_out = parse_action(output, &loaded.group, caps)?;
    let (rows, bias) = match file {
        MatrixFile::Full { matrix, bias } => (matrix, bias),
        MatrixFile::Bare(m) => (m, None),
    };
    let bias = bias.unwrap_or_else(|| vec![0.0; rows.len()]);
    let matrix = Matrix::from_rows(&rows).map_err(|e| BadInput(e.to_string()))?;
    let report = check_equivariance(&matrix, &bias, &a_out, &a_in, tol)?;
    if report.passed {
        println!("PASS max deviation {:.3e}", report.max_deviation);
        return Ok(ExitCode::SUCCESS);
    }
    let worst = report.worst_generator.ok_or_else(|| anyhow!("failed check without a generator"))?;
    println!(
        "FAIL worst generator {worst} {} max deviation {:.3e}",
        loaded.group.generators()[worst],
        report.max_deviation
    );
    Ok(ExitCode::FAILURE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetName {
    /// x_i^2 + x_{i+1}, output on the same points
    ShiftSquare,
    /// sum of x_i^2, single output point
    SumOfSquares,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    group: GroupArg,
    #[arg(long, value_enum, default_value = "shift-square")]
    target: TargetName,
    /// Hidden channels, each a copy of the regular action
    #[arg(long, default_value_t = 64)]
    channels: usize,
    #[arg(long, default_value_t = 600)]
    epochs: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    #[arg(long, default_value_t = 1024)]
    train_samples: usize,
    #[arg(long, default_value_t = 1024)]
    test_samples: usize,
    /// Inputs are sampled from [-bound, bound] in every coordinate
    #[arg(long, default_value_t = 3.0)]
    bound: f64,
    /// Print every n-th epoch of the loss curve
    #[arg(long, default_value_t = 50)]
    every: usize,
    /// Write the report JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Save the trained network
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct FitConfig<'a> {
    group: &'a str,
    target: &'a str,
    channels: usize,
    #[serde(flatten)]
    train: &'a TrainConfig,
}

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    config: FitConfig<'a>,
    final_mse: f64,
    heldout_mse: f64,
    curve: &'a [f64],
}

pub fn fit(args: &FitArgs, caps: &Caps) -> Result<ExitCode> {
    let loaded = load_group(&args.group, caps)?;
    let input = GroupAction::natural(loaded.group.clone());
    let (target, output) = match args.target {
        TargetName::ShiftSquare => (Target::ShiftSquare, input.clone()),
        TargetName::SumOfSquares => (Target::SumOfSquares, GroupAction::trivial(loaded.group.clone(), 1)),
    };
    let mut net = build_regular_net(&input, &output, args.channels)?;
    net.init_uniform(args.seed);
    let optimizer = if args.momentum > 0.0 { Optimizer::Momentum { beta: args.momentum } } else { Optimizer::Sgd };
    let cfg = TrainConfig {
        seed: args.seed,
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        batch_size: args.batch_size,
        train_samples: args.train_samples,
        test_samples: args.test_samples,
        bounds: vec![(-args.bound, args.bound)],
        optimizer,
        schedule: Schedule::Cosine,
    };
    let report = train(&mut net, &target, &cfg)?;
    let table = render_curve(&report.loss_curve, args.every);
    let summary = format!("final mse {:.6e}, held-out mse {:.6e}", report.final_mse, report.heldout_mse);
    let full = FitReport {
        config: FitConfig { group: &loaded.reference, target: target.name(), channels: args.channels, train: &cfg },
        final_mse: report.final_mse,
        heldout_mse: report.heldout_mse,
        curve: &report.loss_curve,
    };
    match &args.out {
        Some(path) => {
            print!("{table}");
            println!("{summary}");
            write_json(path, &full)?;
        }
        None => {
            eprint!("{table}");
            eprintln!("{summary}");
            print_json(&full)?;
        }
    }
    if let Some(path) = &args.checkpoint {
        write_json(path, &Checkpoint::from_net(&net, loaded.reference.clone())?)?;
    }
    Ok(ExitCode::SUCCESS)
}
