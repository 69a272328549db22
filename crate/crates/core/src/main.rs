use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use motionforge::kinematics::STANDARD_GRAVITY;
use motionforge::llm::PromptMode;
use motionforge::pipeline::{self, Context, PipelineError, Report, RunConfig, Stage, CONFIG_ENV};
use motionforge::synthesis::{AttentionMode, BackendKind};

#[derive(Parser)]
#[command(name = "motionforge", version, about = "Physics-driven condition rendering and consistent video synthesis")]
struct Cli {
    /// TOML configuration file (also MOTIONFORGE_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print what would happen without writing files or contacting services.
    #[arg(long, global = true)]
    dry_run: bool,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Default)]
struct SynthArgs {
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    guidance: Option<f64>,
    #[arg(long, value_parser = ["toy", "external"])]
    backend: Option<String>,
    #[arg(long, value_parser = ["self-only", "cross-frame", "first-frame"])]
    attention: Option<String>,
}

impl SynthArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.synthesis;
        if let Some(v) = self.steps {
            s.steps = v;
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.alpha {
            s.alpha = Some(v);
        }
        if let Some(v) = self.guidance {
            s.guidance_scale = v;
        }
        if let Some(v) = &self.backend {
            s.backend = if v == "external" { BackendKind::External } else { BackendKind::Toy };
        }
        if let Some(v) = &self.attention {
            s.attention = match v.as_str() {
                "self-only" => AttentionMode::SelfOnly,
                "first-frame" => AttentionMode::FirstFrame,
                _ => AttentionMode::CrossFrame,
            };
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a .scene file into a Blender script.
    Compile {
        scene: PathBuf,
        /// Write the script here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Ask the language model for a scene (or script) from a description.
    Prompt {
        text: String,
        #[arg(long, value_parser = ["dsl", "script"])]
        mode: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render edge and depth conditions from a script or .scene file.
    Render {
        script: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Ignore the configured render cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Sample frames from a condition directory.
    Synthesize {
        conditions: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Score a directory of frame_%04d.png files.
    Eval {
        frames: PathBuf,
        /// Grayscale PNG; nonzero pixels are scored.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Description or .scene file to frames and metrics.
    Run {
        input: String,
        #[arg(long, value_parser = ["dsl", "script"])]
        mode: Option<String>,
        /// Use pre-rendered conditions instead of running Blender.
        #[arg(long)]
        conditions: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Launch velocity for a throw, or fall time without --distance.
    Solve {
        #[arg(long)]
        start: f64,
        #[arg(long, default_value_t = 0.0)]
        target: f64,
        #[arg(long)]
        distance: Option<f64>,
        #[arg(long, default_value_t = STANDARD_GRAVITY)]
        gravity: f64,
    },
}

fn mode(v: &Option<String>, cfg: &mut RunConfig) {
    match v.as_deref() {
        Some("script") => cfg.mode = PromptMode::Script,
        Some("dsl") => cfg.mode = PromptMode::Dsl,
        _ => {}
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, PipelineError> {
    let path = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    cfg.apply_env(|k| std::env::var(k).ok())?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<Report, PipelineError> {
    let mut cfg = load_config(&cli)?;
    match &cli.command {
        Command::Prompt { mode: m, .. } | Command::Run { mode: m, .. } => mode(m, &mut cfg),
        Command::Render { no_cache: true, .. } => cfg.paths.cache_root = None,
        _ => {}
    }
    match &cli.command {
        Command::Synthesize { synth, .. } | Command::Run { synth, .. } => synth.apply(&mut cfg),
        _ => {}
    }
    let ctx = Context::new(cfg, cli.dry_run);
    match &cli.command {
        Command::Compile { scene, out } => {
            let (report, script) = ctx.compile(scene, out.as_deref())?;
            if out.is_none() && !cli.dry_run {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(script.body.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| PipelineError::new(Stage::Output, pipeline::ErrorKind::Internal, e.to_string()))?;
            }
            Ok(report)
        }
        Command::Prompt { text, out, .. } => ctx.prompt(text, out.as_deref()),
        Command::Render { script, out, .. } => ctx.render(script, out.as_deref()),
        Command::Synthesize { conditions, out, .. } => ctx.synthesize(conditions, out.as_deref()),
        Command::Eval { frames, mask } => ctx.eval(frames, mask.as_deref()),
        Command::Run { input, conditions, out, .. } => ctx.run(input, conditions.as_deref(), out.as_deref()),
        Command::Solve { start, target, distance, gravity } => {
            let mut report = Report::default();
            let s = pipeline::solve(*start, *target, *distance, *gravity)?;
            report.lines.push(serde_json::to_string(&s).expect("solution serializes"));
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let is_compile_stdout = matches!(&cli.command, Command::Compile { out: None, .. });
    match execute(cli) {
        Ok(report) => {
            for line in &report.lines {
                // Keep stdout clean when it carries the script.
                if is_compile_stdout {
                    eprintln!("{line}");
                } else {
                    println!("{line}");
                }
            }
            if let Some(path) = report.record {
                eprintln!("record {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
