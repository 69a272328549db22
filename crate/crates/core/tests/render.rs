#![cfg(unix)]

use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use motionforge::codegen::{FunctionManifest, ScriptText};
use motionforge::frames::GrayFrame;
use motionforge::render::{
    CacheKey, CacheStatus, ConditionSequence, ContentCache, RenderError, RenderProfile, Renderer,
};

const FAKE: &str = r#"#!/bin/sh
if [ "$1" = "--version" ]; then
  echo "Blender 3.6.5"
  echo "build hash: fake"
  exit 0
fi
out=""
prev=""
for a in "$@"; do
  if [ "$prev" = "--out" ]; then out="$a"; fi
  prev="$a"
done
echo "$@" > "$out/argv.txt"
echo "${https_proxy:-none}" > "$out/proxy.txt"
if [ -n "$FAKE_SLEEP" ]; then sleep "$FAKE_SLEEP"; fi
if [ -n "$FAKE_EXIT" ]; then echo "Error: python traceback" >&2; exit "$FAKE_EXIT"; fi
cp "$FAKE_FIXTURE"/*.png "$FAKE_FIXTURE"/manifest.json "$out"/
if [ -n "$FAKE_DROP" ]; then rm "$out/$FAKE_DROP"; fi
exit 0
"#;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/drop8")
}

fn fake_blender(dir: &Path) -> PathBuf {
    let path = dir.join("blender");
    fs::write(&path, FAKE).unwrap();
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
    // A concurrently forked child may briefly hold the write handle
    // (ETXTBSY); wait until the file is executable.
    for _ in 0..100 {
        match std::process::Command::new(&path).arg("--version").output() {
            Err(e) if e.raw_os_error() == Some(26) => std::thread::sleep(Duration::from_millis(10)),
            _ => break,
        }
    }
    path
}

fn script() -> ScriptText {
    let src = fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/basketball.py")).unwrap();
    ScriptText { body: src, origin: motionforge::codegen::Origin::Compiled, spec_digest: Some("d".repeat(64)) }
}

fn renderer(tmp: &Path) -> Renderer {
    Renderer::new(fake_blender(tmp)).env("FAKE_FIXTURE", fixture().to_str().unwrap())
}

#[test]
fn renders_fixture_sequence() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let seq = renderer(tmp.path()).render(&script(), &FunctionManifest::builtin(), &out).unwrap();
    assert_eq!(seq.frame_count(), 8);
    assert_eq!(seq.resolution(), (128, 96));
    assert_eq!(seq.source_digest(), Some("d".repeat(64).as_str()));
    let argv = fs::read_to_string(out.join("argv.txt")).unwrap();
    assert!(argv.starts_with("--background --factory-startup"), "{argv}");
    assert!(argv.contains("--python") && argv.contains("-- --out"));
    assert_eq!(fs::read_to_string(out.join("proxy.txt")).unwrap().trim(), "http://127.0.0.1:9");
    assert_eq!(fs::read_to_string(out.join("scene.py")).unwrap(), script().body);
}

#[test]
fn missing_frame_is_count_mismatch() {
    let tmp = tempfile::tempdir().unwrap();
    let err = renderer(tmp.path())
        .env("FAKE_DROP", "edge_0008.png")
        .render(&script(), &FunctionManifest::builtin(), &tmp.path().join("out"))
        .unwrap_err();
    assert!(matches!(err, RenderError::FrameCountMismatch { expected: 8, found: 7, .. }), "{err}");
    assert!(err.to_string().contains("frame count mismatch"));
}

#[test]
fn resolution_mismatch_detected() {
    let tmp = tempfile::tempdir().unwrap();
    let fix = tmp.path().join("fix");
    fs::create_dir(&fix).unwrap();
    for e in fs::read_dir(fixture()).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), fix.join(e.file_name())).unwrap();
    }
    GrayFrame::filled(64, 48, 0).save(&fix.join("depth_0003.png")).unwrap();
    let err = Renderer::new(fake_blender(tmp.path()))
        .env("FAKE_FIXTURE", fix.to_str().unwrap())
        .render(&script(), &FunctionManifest::builtin(), &tmp.path().join("out"))
        .unwrap_err();
    match err {
        RenderError::ResolutionMismatch { frame, found, .. } => {
            assert_eq!(frame, "depth_0003.png");
            assert_eq!(found, (64, 48));
        }
        other => panic!("{other}"),
    }
}

#[test]
fn timeout_kills_blender() {
    let tmp = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let err = renderer(tmp.path())
        .env("FAKE_SLEEP", "20")
        .timeout(Duration::from_millis(300))
        .render(&script(), &FunctionManifest::builtin(), &tmp.path().join("out"))
        .unwrap_err();
    assert!(matches!(err, RenderError::Timeout(_)), "{err}");
    assert!(started.elapsed() < Duration::from_secs(10));
}

#[test]
fn nonzero_exit_reports_log() {
    let tmp = tempfile::tempdir().unwrap();
    let err = renderer(tmp.path())
        .env("FAKE_EXIT", "1")
        .render(&script(), &FunctionManifest::builtin(), &tmp.path().join("out"))
        .unwrap_err();
    match err {
        RenderError::Exit { code, log_tail } => {
            assert_eq!(code, Some(1));
            assert!(log_tail.contains("python traceback"));
        }
        other => panic!("{other}"),
    }
}

#[test]
fn missing_binary_named() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("no-such-blender");
    let err = Renderer::new(&missing).render(&script(), &FunctionManifest::builtin(), tmp.path()).unwrap_err();
    assert!(err.to_string().contains("no-such-blender"), "{err}");
    assert!(matches!(Renderer::new(&missing).version(), Err(RenderError::BlenderNotFound(_))));
}

#[test]
fn unlinted_script_never_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let bad = ScriptText::llm("import subprocess\nsubprocess.run(['sh'])\n");
    let err = renderer(tmp.path()).render(&bad, &FunctionManifest::builtin(), &out).unwrap_err();
    assert!(matches!(err, RenderError::LintRejected(_)));
    assert!(!out.join("argv.txt").exists());
}

#[test]
fn version_line() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(renderer(tmp.path()).version().unwrap(), "Blender 3.6.5");
}

#[test]
fn cache_round_trip_and_tamper() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = ContentCache::new(tmp.path().join("cache"));
    let (seq, manifest) = ConditionSequence::load_dir(&fixture()).unwrap();
    let key = CacheKey::new(&"a".repeat(64), "Blender 3.6.5");
    assert!(cache.get(&key).is_none());
    cache.put(&key, &seq, &manifest).unwrap();
    assert_eq!(cache.get(&key).unwrap(), seq);
    assert!(cache.get(&CacheKey::new(&"b".repeat(64), "Blender 3.6.5")).is_none());

    GrayFrame::filled(128, 96, 7).save(&cache.entry_dir(&key).join("edge_0004.png")).unwrap();
    assert!(cache.get(&key).is_none());
}

#[test]
fn cache_key_covers_all_inputs() {
    let base = CacheKey::new("x", "Blender 3.6.5");
    assert_ne!(base, CacheKey::new("y", "Blender 3.6.5"));
    assert_ne!(base, CacheKey::new("x", "Blender 3.6.2"));
    assert_eq!(base.as_str().len(), 64);
}

#[test]
fn render_cached_hits_second_time() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = ContentCache::new(tmp.path().join("cache"));
    let r = renderer(tmp.path()).profile(RenderProfile::default());
    let manifest = FunctionManifest::builtin();
    let (a, s1) = r.render_cached(&script(), &manifest, &tmp.path().join("o1"), Some(&cache)).unwrap();
    // Second render must not call blender's render path: make it fail if it does.
    let r2 = r.clone().env("FAKE_EXIT", "3");
    let (b, s2) = r2.render_cached(&script(), &manifest, &tmp.path().join("o2"), Some(&cache)).unwrap();
    assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
    assert_eq!(a, b);
    assert!(tmp.path().join("o2/edge_0008.png").exists());
}
