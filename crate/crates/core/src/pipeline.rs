//! Stage wiring behind the `motionforge` command: configuration, the
//! individual commands and the reproducibility record each one writes.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assets::AssetCatalog;
use crate::codegen::{emit_script, lint_script, CodegenError, FunctionManifest, ScriptText, LIBRARY_VERSION};
use crate::frames::GrayFrame;
use crate::kinematics::{fall_time, horizontal_speed, projectile_velocity, BallisticQuery, KinematicsError};
use crate::llm::{
    build_prompt, extract_code, EndpointConfig, ExtractError, LlmClient, LlmError, PromptMode, PromptTemplate,
    WorldInfo, KEY_ENV,
};
use crate::metrics::{evaluate_dir, MetricReport, MetricsError, PixelMask};
use crate::render::{CacheStatus, ConditionSequence, ContentCache, RenderError, RenderProfile, Renderer};
use crate::scene::{canonical_digest, parse_scene, SceneError, SceneSpec};
use crate::synthesis::{
    backend_for, condition_digest, sample_video, write_output, BackendError, SynthesisConfig, SynthesisError,
};

pub const CONFIG_ENV: &str = "MOTIONFORGE_CONFIG";

/// Filesystem locations the pipeline touches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub blender: PathBuf,
    /// Directory holding the asset files named in the catalog.
    pub asset_root: Option<PathBuf>,
    /// Directory containing the `motionforge_blender` Python package.
    pub library_dir: Option<PathBuf>,
    /// Render cache; `None` disables caching.
    pub cache_root: Option<PathBuf>,
    /// Default parent for command outputs.
    pub run_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            blender: "blender".into(),
            asset_root: None,
            library_dir: None,
            cache_root: None,
            run_dir: "runs".into(),
        }
    }
}

/// Everything a run depends on except the LLM credential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub mode: PromptMode,
    pub render_timeout_secs: Option<u64>,
    pub llm: EndpointConfig,
    pub synthesis: SynthesisConfig,
    pub render: RenderProfile,
}

impl RunConfig {
    /// Parse TOML text; unknown keys are rejected with their path.
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::validation(Stage::Config, e.to_string().trim_end()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::validation(Stage::Config, format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| PipelineError { message: format!("{}: {}", path.display(), e.message), ..e })
    }

    /// Apply `MOTIONFORGE_*` overrides through `lookup` (normally `std::env::var`).
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), PipelineError> {
        let path = |k: &str| lookup(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        if let Some(p) = path("MOTIONFORGE_BLENDER") {
            self.paths.blender = p;
        }
        if let Some(p) = path("MOTIONFORGE_ASSET_ROOT") {
            self.paths.asset_root = Some(p);
        }
        if let Some(p) = path("MOTIONFORGE_LIBRARY_DIR") {
            self.paths.library_dir = Some(p);
        }
        if let Some(p) = path("MOTIONFORGE_CACHE_ROOT") {
            self.paths.cache_root = Some(p);
        }
        if let Some(p) = path("MOTIONFORGE_RUN_DIR") {
            self.paths.run_dir = p;
        }
        if let Some(url) = lookup("MOTIONFORGE_LLM_URL").filter(|v| !v.is_empty()) {
            self.llm.base_url = url;
        }
        if let Some(model) = lookup("MOTIONFORGE_LLM_MODEL").filter(|v| !v.is_empty()) {
            self.llm.model = model;
        }
        if let Some(url) = lookup("MOTIONFORGE_BACKEND_URL").filter(|v| !v.is_empty()) {
            self.synthesis.external_url = Some(url);
        }
        Ok(())
    }

    pub fn render_timeout(&self) -> Duration {
        self.render_timeout_secs.map_or(crate::render::DEFAULT_TIMEOUT, Duration::from_secs)
    }

    fn renderer(&self) -> Renderer {
        let mut r = Renderer::new(&self.paths.blender).timeout(self.render_timeout()).profile(self.render.clone());
        if let Some(root) = &self.paths.asset_root {
            r = r.asset_root(root);
        }
        if let Some(lib) = &self.paths.library_dir {
            r = r.library_dir(lib);
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Parse,
    Codegen,
    Lint,
    Prompt,
    Llm,
    Extract,
    Render,
    Synthesize,
    Eval,
    Solve,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        f.write_str(s.as_str().expect("string stage"))
    }
}

/// Error category; decides the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    ExternalTool,
    Network,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::ExternalTool => 3,
            ErrorKind::Network => 4,
            ErrorKind::Internal => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub kind: ErrorKind,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, kind: ErrorKind, message: impl Into<String>) -> Self {
        Self { stage, kind, message: message.into() }
    }

    pub fn validation(stage: Stage, message: impl Into<String>) -> Self {
        Self::new(stage, ErrorKind::Validation, message)
    }

    fn internal(stage: Stage, message: impl Into<String>) -> Self {
        Self::new(stage, ErrorKind::Internal, message)
    }

    pub fn exit_code(&self) -> u8 {
        self.kind.exit_code()
    }
}

impl From<SceneError> for PipelineError {
    fn from(e: SceneError) -> Self {
        Self::validation(Stage::Parse, e.to_string())
    }
}

impl From<CodegenError> for PipelineError {
    fn from(e: CodegenError) -> Self {
        Self::validation(Stage::Codegen, e.to_string())
    }
}

impl From<LlmError> for PipelineError {
    fn from(e: LlmError) -> Self {
        let kind = match e {
            LlmError::EmptyPrompt | LlmError::Placeholder(_) | LlmError::MissingCredential => ErrorKind::Validation,
            LlmError::Auth(_) | LlmError::Http { .. } | LlmError::Exhausted { .. } | LlmError::Malformed(_) => {
                ErrorKind::Network
            }
        };
        let stage = if kind == ErrorKind::Validation { Stage::Prompt } else { Stage::Llm };
        Self::new(stage, kind, e.to_string())
    }
}

impl From<ExtractError> for PipelineError {
    fn from(e: ExtractError) -> Self {
        Self::validation(Stage::Extract, e.to_string())
    }
}

impl From<RenderError> for PipelineError {
    fn from(e: RenderError) -> Self {
        let kind = match e {
            RenderError::LintRejected(_) | RenderError::Invalid(_) => ErrorKind::Validation,
            RenderError::Io(_) => ErrorKind::Internal,
            _ => ErrorKind::ExternalTool,
        };
        Self::new(Stage::Render, kind, e.to_string())
    }
}

impl From<SynthesisError> for PipelineError {
    fn from(e: SynthesisError) -> Self {
        let kind = match &e {
            SynthesisError::Config(_) => ErrorKind::Validation,
            SynthesisError::Backend { source: BackendError::Transport(_), .. } => ErrorKind::Network,
            SynthesisError::Backend { .. } => ErrorKind::ExternalTool,
            SynthesisError::NonFinite { .. } | SynthesisError::Frame(_) | SynthesisError::Io(_) => ErrorKind::Internal,
        };
        Self::new(Stage::Synthesize, kind, e.to_string())
    }
}

impl From<MetricsError> for PipelineError {
    fn from(e: MetricsError) -> Self {
        let kind = match e {
            MetricsError::Io(_) => ErrorKind::Internal,
            MetricsError::External(_) => ErrorKind::ExternalTool,
            _ => ErrorKind::Validation,
        };
        Self::new(Stage::Eval, kind, e.to_string())
    }
}

impl From<KinematicsError> for PipelineError {
    fn from(e: KinematicsError) -> Self {
        Self::validation(Stage::Solve, e.to_string())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What a command did, written as `<command>.record.json` next to its
/// outputs. Holds digests, seeds and versions; never the credential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    pub tool_version: String,
    pub library_version: String,
    pub config: RunConfig,
    pub digests: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub blender_version: Option<String>,
    pub render_cache: Option<String>,
    pub llm_attempts: Option<usize>,
    pub metrics: Option<MetricReport>,
}

impl Record {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            library_version: LIBRARY_VERSION.into(),
            config: cfg.clone(),
            digests: BTreeMap::new(),
            seed: None,
            alpha: None,
            blender_version: None,
            render_cache: None,
            llm_attempts: None,
            metrics: None,
        }
    }

    fn digest(&mut self, name: &str, value: impl Into<String>) {
        self.digests.insert(name.into(), value.into());
    }

    pub fn file_name(command: &str) -> String {
        format!("{command}.record.json")
    }

    /// Write into `dir`. Any occurrence of the credential is masked even
    /// though no field should carry it.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, PipelineError> {
        let mut text = serde_json::to_string_pretty(self).expect("record serializes") + "\n";
        if let Ok(key) = std::env::var(KEY_ENV) {
            if !key.is_empty() {
                text = text.replace(&key, "[REDACTED]");
            }
        }
        let path = dir.join(Self::file_name(&self.command));
        write_file(&path, text.as_bytes())?;
        Ok(path)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError::internal(Stage::Output, format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

fn read_input(stage: Stage, path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::validation(stage, format!("{}: {e}", path.display())))
}

/// Outcome of a command: printable summary lines and the record path.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub record: Option<PathBuf>,
}

impl Report {
    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }
}

/// A parsed scene compiled to a linted script.
pub struct Compiled {
    pub spec: SceneSpec,
    pub digest: String,
    pub script: ScriptText,
}

pub fn compile_source(source: &str) -> Result<Compiled, PipelineError> {
    let spec = parse_scene(source)?;
    let digest = canonical_digest(&spec);
    let manifest = FunctionManifest::builtin();
    let script = emit_script(&spec, &manifest, &AssetCatalog::builtin())?;
    let report = lint_script(&script, &manifest);
    if !report.passed() {
        return Err(PipelineError::internal(Stage::Lint, format!("compiled script failed lint: {report}")));
    }
    Ok(Compiled { spec, digest, script })
}

fn lint_gate(script: &ScriptText) -> Result<(), PipelineError> {
    let report = lint_script(script, &FunctionManifest::builtin());
    if report.passed() {
        Ok(())
    } else {
        Err(PipelineError::validation(Stage::Lint, report.to_string()))
    }
}

/// Settings shared by every command.
pub struct Context {
    pub config: RunConfig,
    pub dry_run: bool,
}

/// Result of the prompt stage: either a scene (dsl mode) or a script.
pub enum Generated {
    Scene { text: String, compiled: Compiled },
    Script(ScriptText),
}

impl Context {
    pub fn new(config: RunConfig, dry_run: bool) -> Self {
        Self { config, dry_run }
    }

    fn out_dir(&self, given: Option<&Path>, command: &str) -> PathBuf {
        given.map_or_else(|| self.config.paths.run_dir.join(command), Path::to_path_buf)
    }

    /// Parse, validate, emit and lint a `.scene` file. Writes the script to
    /// `out` when given, otherwise only returns it.
    pub fn compile(&self, scene: &Path, out: Option<&Path>) -> Result<(Report, ScriptText), PipelineError> {
        let mut report = Report::default();
        if self.dry_run {
            report.say(format!("would compile {}", scene.display()));
            if let Some(out) = out {
                report.say(format!("would write {} and {}", out.display(), Record::file_name("compile")));
            }
            return Ok((report, ScriptText::llm(String::new())));
        }
        let source = read_input(Stage::Parse, scene)?;
        let c = compile_source(&source)?;
        report.say(format!("scene digest {}", c.digest));
        if let Some(out) = out {
            write_file(out, c.script.body.as_bytes())?;
            let mut record = Record::new("compile", &self.config);
            record.digest("scene_source", sha256_hex(source.as_bytes()));
            record.digest("scene", &c.digest);
            record.digest("script", sha256_hex(c.script.body.as_bytes()));
            let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            report.record = Some(record.write(dir)?);
            report.say(format!("wrote {}", out.display()));
        }
        Ok((report, c.script))
    }

    fn client(&self, dir: &Path) -> Result<LlmClient, PipelineError> {
        Ok(LlmClient::from_env(self.config.llm.clone())?.log_to(dir.join("llm")))
    }

    /// Ask the model for a scene or a script and gate the answer.
    fn generate(&self, user: &str, dir: &Path, record: &mut Record) -> Result<Generated, PipelineError> {
        let mode = self.config.mode;
        let template =
            PromptTemplate::new(mode, &FunctionManifest::builtin(), &AssetCatalog::builtin(), &WorldInfo::default());
        let prompt = build_prompt(user, &template)?;
        let client = self.client(dir)?;
        let completion = client.request_completion(&prompt)?;
        record.llm_attempts = Some(completion.attempts.len());
        record.digest("prompt", sha256_hex(prompt.as_bytes()));
        record.digest("completion", sha256_hex(completion.text.as_bytes()));
        let extracted = extract_code(&completion.text)?;
        match mode {
            PromptMode::Dsl => {
                let compiled = compile_source(&extracted.body)?;
                write_file(&dir.join("scene.scene"), extracted.body.as_bytes())?;
                write_file(&dir.join("scene.py"), compiled.script.body.as_bytes())?;
                record.digest("scene", &compiled.digest);
                record.digest("script", sha256_hex(compiled.script.body.as_bytes()));
                Ok(Generated::Scene { text: extracted.body, compiled })
            }
            PromptMode::Script => {
                lint_gate(&extracted)?;
                write_file(&dir.join("scene.py"), extracted.body.as_bytes())?;
                record.digest("script", sha256_hex(extracted.body.as_bytes()));
                Ok(Generated::Script(extracted))
            }
        }
    }

    pub fn prompt(&self, user: &str, out: Option<&Path>) -> Result<Report, PipelineError> {
        let dir = self.out_dir(out, "prompt");
        let mut report = Report::default();
        if self.dry_run {
            report.say(format!(
                "would request a {} from {} ({}) and write it to {}",
                match self.config.mode {
                    PromptMode::Dsl => "scene",
                    PromptMode::Script => "script",
                },
                self.config.llm.base_url,
                self.config.llm.model,
                dir.display()
            ));
            return Ok(report);
        }
        let mut record = Record::new("prompt", &self.config);
        let generated = self.generate(user, &dir, &mut record)?;
        match generated {
            Generated::Scene { compiled, .. } => report.say(format!("scene digest {}", compiled.digest)),
            Generated::Script(_) => report.say("script passed lint"),
        }
        report.say(format!("wrote {}", dir.display()));
        report.record = Some(record.write(&dir)?);
        Ok(report)
    }

    /// Load a script, or compile a `.scene` into one.
    fn load_script(&self, input: &Path) -> Result<ScriptText, PipelineError> {
        if input.extension().is_some_and(|e| e == "scene") {
            Ok(compile_source(&read_input(Stage::Parse, input)?)?.script)
        } else {
            Ok(ScriptText::llm(read_input(Stage::Lint, input)?))
        }
    }

    fn render_script(
        &self,
        script: &ScriptText,
        dir: &Path,
        record: &mut Record,
    ) -> Result<ConditionSequence, PipelineError> {
        lint_gate(script)?;
        let renderer = self.config.renderer();
        let cache = self.config.paths.cache_root.as_ref().map(ContentCache::new);
        let (seq, status) = renderer.render_cached(script, &FunctionManifest::builtin(), dir, cache.as_ref())?;
        record.render_cache = Some(
            match status {
                CacheStatus::Hit => "hit",
                CacheStatus::Miss => "miss",
                CacheStatus::Disabled => "disabled",
            }
            .into(),
        );
        if let Ok((_, manifest)) = ConditionSequence::load_dir(dir) {
            record.blender_version = Some(manifest.blender_version);
        }
        record.digest("conditions", condition_digest(&seq));
        Ok(seq)
    }

    pub fn render(&self, input: &Path, out: Option<&Path>) -> Result<Report, PipelineError> {
        let dir = self.out_dir(out, "render");
        let mut report = Report::default();
        if self.dry_run {
            report.say(format!("would lint {} and render it with {}", input.display(), self.config.paths.blender.display()));
            report.say(format!("condition frames would go to {}", dir.display()));
            return Ok(report);
        }
        let script = self.load_script(input)?;
        let mut record = Record::new("render", &self.config);
        record.digest("script", sha256_hex(script.body.as_bytes()));
        if let Some(d) = &script.spec_digest {
            record.digest("scene", d);
        }
        let seq = self.render_script(&script, &dir, &mut record)?;
        report.say(format!(
            "{} condition frames at {}x{} in {} (cache {})",
            seq.frame_count(),
            seq.resolution().0,
            seq.resolution().1,
            dir.display(),
            record.render_cache.as_deref().unwrap_or("disabled")
        ));
        report.record = Some(record.write(&dir)?);
        Ok(report)
    }

    fn load_conditions(&self, dir: &Path) -> Result<ConditionSequence, PipelineError> {
        let (seq, _) = ConditionSequence::load_dir(dir)
            .map_err(|e| PipelineError::validation(Stage::Synthesize, format!("{}: {e}", dir.display())))?;
        Ok(seq)
    }

    fn synthesize_seq(
        &self,
        seq: &ConditionSequence,
        cfg: &SynthesisConfig,
        dir: &Path,
        record: &mut Record,
    ) -> Result<Vec<GrayFrame>, PipelineError> {
        let backend = backend_for(cfg, Duration::from_secs(600));
        let stack = sample_video(seq, cfg, backend.as_ref())?;
        let run = write_output(dir, &stack, seq, cfg, backend.as_ref())?;
        record.seed = Some(cfg.seed);
        record.alpha = Some(run.alpha);
        record.digest("conditions", &run.condition_digest);
        record.digest("noise", &run.noise_digest);
        record.digest("frames", sha256_hex(run.frame_digests.concat().as_bytes()));
        Ok(stack.frames)
    }

    pub fn synthesize(&self, conditions: &Path, out: Option<&Path>) -> Result<Report, PipelineError> {
        let dir = self.out_dir(out, "synthesize");
        let cfg = &self.config.synthesis;
        cfg.validate().map_err(|e| PipelineError::validation(Stage::Config, e))?;
        let mut report = Report::default();
        if self.dry_run {
            report.say(format!(
                "would sample {} with {} steps, seed {}, alpha {}, guidance {} ({:?} backend) into {}",
                conditions.display(),
                cfg.steps,
                cfg.seed,
                cfg.resolved_alpha(),
                cfg.guidance_scale,
                cfg.backend,
                dir.display()
            ));
            return Ok(report);
        }
        let seq = self.load_conditions(conditions)?;
        let mut record = Record::new("synthesize", &self.config);
        let frames = self.synthesize_seq(&seq, cfg, &dir, &mut record)?;
        report.say(format!("{} frames in {}", frames.len(), dir.display()));
        report.record = Some(record.write(&dir)?);
        Ok(report)
    }

    pub fn eval(&self, frames: &Path, mask: Option<&Path>) -> Result<Report, PipelineError> {
        let mut report = Report::default();
        if self.dry_run {
            report.say(format!("would score {} and write metrics.json there", frames.display()));
            return Ok(report);
        }
        let mask = mask
            .map(|p| GrayFrame::load(p).map(|f| PixelMask::from_frame(&f)))
            .transpose()
            .map_err(|e| PipelineError::validation(Stage::Eval, format!("mask: {e}")))?;
        let metrics = evaluate_dir(frames, mask.as_ref())?;
        report.say(summary(&metrics));
        let mut record = Record::new("eval", &self.config);
        record.metrics = Some(metrics);
        report.record = Some(record.write(frames)?);
        Ok(report)
    }

    /// Full chain: text or scene file to frames and metrics. With
    /// `conditions`, the render stage is replaced by that directory.
    pub fn run(&self, input: &str, conditions: Option<&Path>, out: Option<&Path>) -> Result<Report, PipelineError> {
        let dir = self.out_dir(out, "run");
        let scene_file = Path::new(input);
        let from_file = scene_file.extension().is_some_and(|e| e == "scene") && scene_file.is_file();
        let mut cfg = self.config.synthesis.clone();
        cfg.validate().map_err(|e| PipelineError::validation(Stage::Config, e))?;
        let mut report = Report::default();
        if self.dry_run {
            if from_file {
                report.say(format!("would compile {}", scene_file.display()));
            } else {
                report.say(format!("would ask {} for a {} scene", self.config.llm.base_url, self.config.mode.as_str()));
            }
            match conditions {
                Some(c) => report.say(format!("would use conditions from {}", c.display())),
                None => report.say(format!("would render with {}", self.config.paths.blender.display())),
            }
            report.say(format!("would sample {} steps (seed {}) and score into {}", cfg.steps, cfg.seed, dir.display()));
            return Ok(report);
        }

        let mut record = Record::new("run", &self.config);
        let script = if from_file {
            let source = read_input(Stage::Parse, scene_file)?;
            let c = compile_source(&source)?;
            write_file(&dir.join("scene.py"), c.script.body.as_bytes())?;
            record.digest("scene", &c.digest);
            record.digest("script", sha256_hex(c.script.body.as_bytes()));
            Generated::Scene { text: source, compiled: c }
        } else {
            self.generate(input, &dir, &mut record)?
        };
        let script = match script {
            Generated::Scene { compiled, .. } => {
                report.say(format!("scene digest {}", compiled.digest));
                if self.config.synthesis.alpha.is_none() {
                    cfg.material = compiled.spec.material();
                }
                compiled.script
            }
            Generated::Script(s) => s,
        };

        let seq = match conditions {
            Some(c) => {
                info!("skipping render; conditions from {}", c.display());
                let seq = self.load_conditions(c)?;
                record.digest("conditions", condition_digest(&seq));
                seq
            }
            None => self.render_script(&script, &dir.join("conditions"), &mut record)?,
        };
        if let Some(d) = &script.spec_digest {
            if seq.source_digest().is_some_and(|s| s != d) {
                warn!("condition frames were rendered from a different scene");
            }
        }

        let frames_dir = dir.join("frames");
        self.synthesize_seq(&seq, &cfg, &frames_dir, &mut record)?;
        let metrics = evaluate_dir(&frames_dir, None)?;
        report.say(format!("{} frames in {}", metrics.frame_count, frames_dir.display()));
        report.say(summary(&metrics));
        record.metrics = Some(metrics);
        report.record = Some(record.write(&dir)?);
        Ok(report)
    }
}

fn summary(m: &MetricReport) -> String {
    match m.smoothness_proxy {
        Some(s) => format!("flicker {:.6} smoothness {:.6}", m.flicker, s),
        None => format!("flicker {:.6}", m.flicker),
    }
}

/// Launch parameters for a throw, or the fall time from a height.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub fall_time: f64,
    pub horizontal_speed: Option<f64>,
    pub velocity: Option<[f64; 3]>,
}

pub fn solve(start: f64, target: f64, distance: Option<f64>, g: f64) -> Result<Solution, PipelineError> {
    let t = fall_time(start - target, g)?;
    match distance {
        Some(d) => {
            let q = BallisticQuery::new(start, target, d).with_gravity(g);
            Ok(Solution { fall_time: t, horizontal_speed: Some(horizontal_speed(&q)?), velocity: Some(projectile_velocity(&q)?) })
        }
        None => Ok(Solution { fall_time: t, horizontal_speed: None, velocity: None }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_unknown_keys() {
        let cfg = RunConfig::from_toml("mode = \"script\"\n[synthesis]\nsteps = 12\n[paths]\nblender = \"/opt/b\"\n").unwrap();
        assert_eq!(cfg.mode, PromptMode::Script);
        assert_eq!(cfg.synthesis.steps, 12);
        assert_eq!(cfg.paths.blender, PathBuf::from("/opt/b"));
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
        let err = RunConfig::from_toml("[llm]\napi_key = \"x\"\n").unwrap_err();
        assert_eq!(err.kind, ErrorKind::Validation);
        assert!(err.message.contains("api_key"), "{err}");
    }

    #[test]
    fn env_overrides() {
        let mut cfg = RunConfig::default();
        let env: BTreeMap<&str, &str> =
            [("MOTIONFORGE_BLENDER", "/x/blender"), ("MOTIONFORGE_LLM_URL", "http://h:1"), ("MOTIONFORGE_RUN_DIR", "")]
                .into();
        cfg.apply_env(|k| env.get(k).map(|v| v.to_string())).unwrap();
        assert_eq!(cfg.paths.blender, PathBuf::from("/x/blender"));
        assert_eq!(cfg.llm.base_url, "http://h:1");
        assert_eq!(cfg.paths.run_dir, PathBuf::from("runs"));
    }

    #[test]
    fn error_prefix_and_codes() {
        let e = PipelineError::from(RenderError::BlenderNotFound("/no/blender".into()));
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().starts_with("render: "));
        assert_eq!(PipelineError::from(LlmError::Auth(401)).exit_code(), 4);
        assert_eq!(PipelineError::from(LlmError::MissingCredential).exit_code(), 2);
        assert_eq!(PipelineError::from(SynthesisError::NonFinite { step: 3 }).exit_code(), 5);
    }

    #[test]
    fn solve_worked_example() {
        let s = solve(4.0, 1.8521, Some(13.665), 9.81).unwrap();
        assert!((s.horizontal_speed.unwrap() - 20.650).abs() < 1e-3);
        assert!(solve(1.0, 2.0, None, 9.81).is_err());
    }
}
