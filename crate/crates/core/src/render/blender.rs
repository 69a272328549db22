use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use log::{info, warn};

use super::cache::{CacheKey, ContentCache};
use super::sequence::{ConditionSequence, RenderProfile};
use super::RenderError;
use crate::codegen::{lint_script, FunctionManifest, ScriptText};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30 * 60);
pub const PINNED_VERSION: &str = "3.6";
const SCRIPT_FILE: &str = "scene.py";
const LOG_FILE: &str = "blender.log";

/// Proxy variables pointed at a closed port so the embedded Python cannot
/// reach the network.
const DEAD_PROXY: &str = "http://127.0.0.1:9";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

/// Runs headless Blender on linted scripts. One render at a time.
#[derive(Debug, Clone)]
pub struct Renderer {
    blender: PathBuf,
    timeout: Duration,
    profile: RenderProfile,
    asset_root: Option<PathBuf>,
    library_dir: Option<PathBuf>,
    env: Vec<(String, String)>,
}

impl Renderer {
    pub fn new(blender: impl Into<PathBuf>) -> Self {
        Self {
            blender: blender.into(),
            timeout: DEFAULT_TIMEOUT,
            profile: RenderProfile::default(),
            asset_root: None,
            library_dir: None,
            env: Vec::new(),
        }
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn profile(mut self, profile: RenderProfile) -> Self {
        self.profile = profile;
        self
    }

    /// Directory the script's `asset_root()` resolves to.
    pub fn asset_root(mut self, dir: impl Into<PathBuf>) -> Self {
        self.asset_root = Some(dir.into());
        self
    }

    /// Directory holding the `motionforge_blender` package, put on PYTHONPATH.
    pub fn library_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.library_dir = Some(dir.into());
        self
    }

    pub fn env(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.env.push((key.into(), value.into()));
        self
    }

    pub fn blender_path(&self) -> &Path {
        &self.blender
    }

    fn spawn_error(&self, e: std::io::Error) -> RenderError {
        if e.kind() == std::io::ErrorKind::NotFound {
            RenderError::BlenderNotFound(self.blender.clone())
        } else {
            RenderError::Io(format!("cannot start {}: {e}", self.blender.display()))
        }
    }

    /// First line of `blender --version`, e.g. `Blender 3.6.5`.
    pub fn version(&self) -> Result<String, RenderError> {
        let out = Command::new(&self.blender)
            .arg("--version")
            .stdin(Stdio::null())
            .output()
            .map_err(|e| self.spawn_error(e))?;
        if !out.status.success() {
            return Err(RenderError::Exit { code: out.status.code(), log_tail: tail(&String::from_utf8_lossy(&out.stderr)) });
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let line = text.lines().find(|l| l.starts_with("Blender")).unwrap_or("").trim().to_string();
        if line.is_empty() {
            return Err(RenderError::Manifest(format!("{} --version printed no version", self.blender.display())));
        }
        if !line.starts_with(&format!("Blender {PINNED_VERSION}")) {
            warn!("{line} is not the pinned Blender {PINNED_VERSION}; results may differ");
        }
        Ok(line)
    }

    /// Lint, run Blender and ingest the frames it writes into `out_dir`.
    pub fn render(
        &self,
        script: &ScriptText,
        manifest: &FunctionManifest,
        out_dir: &Path,
    ) -> Result<ConditionSequence, RenderError> {
        let report = lint_script(script, manifest);
        if !report.passed() {
            return Err(RenderError::LintRejected(report.to_string()));
        }
        let io = |e: std::io::Error| RenderError::Io(format!("{}: {e}", out_dir.display()));
        fs::create_dir_all(out_dir).map_err(io)?;
        let out_dir = out_dir.canonicalize().map_err(io)?;
        let script_path = out_dir.join(SCRIPT_FILE);
        fs::write(&script_path, &script.body).map_err(io)?;
        let profile_path = out_dir.join("profile.json");
        fs::write(&profile_path, serde_json::to_string_pretty(&self.profile).expect("profile serializes")).map_err(io)?;
        let log_path = out_dir.join(LOG_FILE);
        let log = File::create(&log_path).map_err(io)?;

        let mut cmd = Command::new(&self.blender);
        cmd.arg("--background")
            .arg("--factory-startup")
            .args(["--python-exit-code", "1"])
            .arg("--python")
            .arg(&script_path)
            .arg("--")
            .arg("--out")
            .arg(&out_dir)
            .arg("--profile")
            .arg(&profile_path)
            .stdin(Stdio::null())
            .stdout(log.try_clone().map_err(io)?)
            .stderr(log);
        for var in ["http_proxy", "https_proxy", "HTTP_PROXY", "HTTPS_PROXY", "ALL_PROXY", "all_proxy"] {
            cmd.env(var, DEAD_PROXY);
        }
        cmd.env_remove("no_proxy").env_remove("NO_PROXY");
        if let Some(root) = &self.asset_root {
            cmd.env("MOTIONFORGE_ASSET_ROOT", root);
        }
        if let Some(lib) = &self.library_dir {
            cmd.env("PYTHONPATH", lib);
        }
        for (k, v) in &self.env {
            cmd.env(k, v);
        }

        info!("rendering {} with {}", script_path.display(), self.blender.display());
        let mut child = cmd.spawn().map_err(|e| self.spawn_error(e))?;
        let started = Instant::now();
        let status = loop {
            if let Some(status) = child.try_wait().map_err(io)? {
                break status;
            }
            if started.elapsed() >= self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                return Err(RenderError::Timeout(self.timeout));
            }
            thread::sleep(Duration::from_millis(20));
        };
        if !status.success() {
            let log = fs::read_to_string(&log_path).unwrap_or_default();
            return Err(RenderError::Exit { code: status.code(), log_tail: tail(&log) });
        }
        let (seq, _) = ConditionSequence::load_dir(&out_dir)?;
        Ok(seq.with_source_digest(script.spec_digest.clone()))
    }

    /// Like [`Renderer::render`], but consult `cache` first and fill it on a miss.
    pub fn render_cached(
        &self,
        script: &ScriptText,
        manifest: &FunctionManifest,
        out_dir: &Path,
        cache: Option<&ContentCache>,
    ) -> Result<(ConditionSequence, CacheStatus), RenderError> {
        let Some(cache) = cache else {
            return Ok((self.render(script, manifest, out_dir)?, CacheStatus::Disabled));
        };
        let version = self.version()?;
        let key = CacheKey::for_script(script, &version);
        if let Some(seq) = cache.get(&key) {
            info!("render cache hit {key}");
            let seq = seq.with_source_digest(script.spec_digest.clone());
            seq.write_dir(out_dir, &seq.manifest(self.profile.clone(), &version))?;
            return Ok((seq, CacheStatus::Hit));
        }
        let seq = self.render(script, manifest, out_dir)?;
        cache.put(&key, &seq, &seq.manifest(self.profile.clone(), &version))?;
        Ok((seq, CacheStatus::Miss))
    }
}

fn tail(text: &str) -> String {
    let lines: Vec<&str> = text.lines().collect();
    lines[lines.len().saturating_sub(20)..].join("\n")
}
