//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when an analysis fails or a verification check
//! does not hold, 2 for usage, configuration and parse errors.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builtin::{default_eps, mc_const_group, mc_const_spec, mc_eps_group, mc_eps_representatives, mc_eps_spec};
use crate::disintegration::HierarchyOptions;
use crate::error::{Error, Result};
use crate::model::BayesNet;
use crate::partition::DEFAULT_PARTITION_CAP;
use crate::pattern::Pattern;
use crate::rational::parse_rational;
use crate::system::{load_system, System};

#[derive(Debug, Parser)]
#[command(name = "locint", version, about = "Exact local integration, ι-entities, actions and perceptions of discrete Bayesian networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// Two constant binary cells over three steps.
    McConst,
    /// Two binary cells that jump to any other joint state with probability ε.
    McEps,
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, Args)]
pub struct Common {
    /// System file (TOML).
    #[arg(conflicts_with = "builtin")]
    pub system: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// ε for mc-eps as `p/q`, strictly between 0 and 1/3 (default 1/100).
    #[arg(long)]
    pub eps: Option<String>,
    /// 1-based index into the default trajectory list, or a full trajectory literal.
    #[arg(long)]
    pub trajectory: Option<String>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Largest node set whose partitions are enumerated.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_partitions: Option<u64>,
    /// Largest joint state space that is enumerated.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_states: Option<u64>,
    /// JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write one file per report into this directory instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Disintegration hierarchy of each selected trajectory.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Also emit a DOT Hasse diagram per level.
        #[arg(long)]
        dot: bool,
    },
    /// ι-entities of each selected trajectory and of the whole system.
    Entities {
        #[command(flatten)]
        common: Common,
    },
    /// Co-action pairs (value and extent actions) of the entities in each selected trajectory.
    Actions {
        #[command(flatten)]
        common: Common,
        /// Only this time step.
        #[arg(long)]
        time: Option<u32>,
    },
    /// Branch-morphs and perception partitions.
    Perceptions {
        #[command(flatten)]
        common: Common,
        /// Anchor entity (pattern literal). Without it every entity is scanned.
        #[arg(long)]
        anchor: Option<String>,
        /// Time step of the perception (default 0 with an anchor, every step when scanning).
        #[arg(long)]
        time: Option<u32>,
        /// Mutually exclusive proxy set: patterns separated by `;`, repeatable.
        /// Its first pattern is the anchor unless `--anchor` is given.
        #[arg(long)]
        zeta: Vec<String>,
        /// Number of future slices that define a branch.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
    },
    /// DOT Hasse diagrams of disintegration levels.
    Hasse {
        #[command(flatten)]
        common: Common,
        /// 1-based level index (default: all levels).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        level: Option<u64>,
        /// Use the refinement-free hierarchy.
        #[arg(long)]
        refinement_free: bool,
    },
    /// Runtime checks of the disintegration, symmetry and perception-action loop theorems.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Only this named group of the system file.
        #[arg(long)]
        group: Option<String>,
        /// Number of random perception-action loops.
        #[arg(long, default_value_t = 20)]
        pa_loops: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Checks the theorem against an unfiltered hierarchy, which must fail.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Number of SLI evaluations the analyses need.
    Workload {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Analyze { common, .. }
            | Command::Entities { common }
            | Command::Actions { common, .. }
            | Command::Perceptions { common, .. }
            | Command::Hasse { common, .. }
            | Command::Verify { common, .. }
            | Command::Workload { common } => common,
        }
    }
}

/// A system ready for analysis.
pub(crate) struct Loaded {
    pub label: String,
    pub system: System,
    /// Trajectories analyzed when `--trajectory` is absent.
    pub defaults: Vec<Pattern>,
    pub opts: HierarchyOptions,
}

impl Loaded {
    pub fn net(&self) -> &BayesNet {
        &self.system.net
    }

    /// `(label, trajectory)` pairs selected by `--trajectory`.
    pub fn select(&self, arg: Option<&str>) -> Result<Vec<(String, Pattern)>> {
        let Some(arg) = arg else {
            return Ok(self.defaults.iter().enumerate().map(|(i, p)| ((i + 1).to_string(), p.clone())).collect());
        };
        if arg.contains('=') {
            let p = self.net().parse_pattern(arg)?;
            self.net().trajectory_states(&p).map_err(|e| Error::Config(format!("--trajectory: {e}")))?;
            let label = self.defaults.iter().position(|d| d == &p).map_or("custom".to_string(), |i| (i + 1).to_string());
            return Ok(vec![(label, p)]);
        }
        let k: usize = arg.parse().map_err(|_| Error::Config(format!("--trajectory `{arg}` is neither an index nor a pattern")))?;
        if k == 0 || k > self.defaults.len() {
            return Err(Error::Config(format!("--trajectory must lie in 1..={}", self.defaults.len())));
        }
        Ok(vec![(k.to_string(), self.defaults[k - 1].clone())])
    }
}

fn load(common: &Common) -> Result<Loaded> {
    if common.eps.is_some() && common.builtin != Some(Builtin::McEps) {
        return Err(Error::Config("--eps only applies to --builtin mc-eps".into()));
    }
    let (label, mut system, representatives) = match (&common.builtin, &common.system) {
        (Some(Builtin::McConst), _) => {
            let mut s = System::from_markov(mc_const_spec())?;
            s.groups.push(("mc-const".into(), mc_const_group()));
            ("mc-const".to_string(), s, None)
        }
        (Some(Builtin::McEps), _) => {
            let eps = match &common.eps {
                Some(e) => parse_rational(e)?,
                None => default_eps(),
            };
            let mut s = System::from_markov(mc_eps_spec(&eps)?)?;
            s.groups.push(("mc-eps".into(), mc_eps_group()));
            ("mc-eps".to_string(), s, Some(mc_eps_representatives().to_vec()))
        }
        (None, Some(path)) => {
            let s = load_system(path)?;
            (s.net.name().to_string(), s, None)
        }
        (None, None) => return Err(Error::Config("give a system file or --builtin".into())),
    };
    if let Some(cap) = common.cap_states {
        system.net = system.net.with_state_cap(cap as u128);
    }
    let defaults = match representatives {
        Some(r) => r,
        None => system.net.support()?.states.iter().map(|x| system.net.trajectory_pattern(x)).collect(),
    };
    let opts = HierarchyOptions {
        partition_cap: common.cap_partitions.map_or(DEFAULT_PARTITION_CAP, |c| c as usize),
    };
    Ok(Loaded { label, system, defaults, opts })
}

/// Where reports go: stdout, or one file each in `--out`.
pub(crate) struct Output<'a> {
    dir: Option<PathBuf>,
    json: bool,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn write(&mut self, text: &str) -> Result<()> {
        self.out.write_all(text.as_bytes()).map_err(|e| Error::Config(format!("cannot write output: {e}")))
    }

    /// Emits named reports, each with a JSON and a text form.
    pub fn emit<R: Serialize>(&mut self, reports: &[(String, R, String)]) -> Result<()> {
        match self.dir.clone() {
            Some(dir) => {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
                for (name, report, text) in reports {
                    let (ext, body) = if self.json { ("json", to_json(report)?) } else { ("txt", text.clone()) };
                    let path = dir.join(format!("{name}.{ext}"));
                    std::fs::write(&path, body).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
                    self.write(&format!("wrote {}\n", path.display()))?;
                }
                Ok(())
            }
            None if self.json => {
                let all: Vec<&R> = reports.iter().map(|(_, r, _)| r).collect();
                let body = if all.len() == 1 { to_json(all[0])? } else { to_json(&all)? };
                self.write(&body)
            }
            None => {
                let texts: Vec<&str> = reports.iter().map(|(_, _, t)| t.as_str()).collect();
                self.write(&texts.join("\n"))
            }
        }
    }

    /// Emits a raw file such as a DOT diagram.
    pub fn emit_raw(&mut self, name: &str, body: &str) -> Result<()> {
        match self.dir.clone() {
            Some(dir) => {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
                let path = dir.join(name);
                std::fs::write(&path, body).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
                self.write(&format!("wrote {}\n", path.display()))
            }
            None => self.write(body),
        }
    }
}

fn to_json<R: Serialize + ?Sized>(r: &R) -> Result<String> {
    let mut s = serde_json::to_string_pretty(r).map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> Result<bool> {
    let common = cli.command.common();
    let loaded = load(common)?;
    let mut output = Output { dir: common.out.clone(), json: common.json, out };
    let traj = common.trajectory.as_deref();
    match &cli.command {
        Command::Analyze { dot, .. } => commands::analyze(&loaded, traj, *dot, &mut output),
        Command::Entities { .. } => commands::entities(&loaded, traj, &mut output),
        Command::Actions { time, .. } => commands::actions(&loaded, traj, *time, &mut output),
        Command::Perceptions { anchor, time, zeta, steps, .. } => {
            commands::perceptions(&loaded, anchor.as_deref(), *time, zeta, *steps, &mut output)
        }
        Command::Hasse { level, refinement_free, .. } => {
            commands::hasse(&loaded, traj, level.map(|l| l as usize), *refinement_free, &mut output)
        }
        Command::Verify { group, pa_loops, seed, inject_fault, .. } => {
            commands::verify(&loaded, group.as_deref(), *pa_loops, *seed, *inject_fault, &mut output)
        }
        Command::Workload { .. } => commands::workload(&loaded, &mut output),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.command.common().threads.unwrap_or(0) as usize)
        .build();
    // Reports are buffered so workers never touch the caller's writer.
    let mut buf = Vec::new();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(&cli, &mut buf)),
        Err(e) => Err(Error::Config(format!("cannot start worker threads: {e}"))),
    };
    if let Err(e) = out.write_all(&buf) {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return 1;
    }
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::NotMutuallyExclusive(..) = e {
                let _ = writeln!(err, "hint: pass a mutually exclusive proxy set with --zeta");
            }
            if e.is_config() {
                2
            } else {
                1
            }
        }
    }
}
