//! Acceptance checks, one PASS/FAIL line each. Runs without Blender and
//! without network access beyond a loopback mock.

mod common;

use std::fs;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::oracle::{self, rows};
use common::{chat_reply, MockServer};
use motionforge::assets::AssetCatalog;
use motionforge::codegen::{emit_script, lint_script, FunctionManifest, ScriptText};
use motionforge::frames::{load_sequence, GrayFrame};
use motionforge::kinematics::{horizontal_speed, projectile_velocity, BallisticQuery};
use motionforge::metrics::{motion_smoothness_proxy, temporal_flickering};
use motionforge::scene::parse_scene;
use motionforge::synthesis::attention::cross_frame_keys;
use motionforge::synthesis::{
    combine_control_residuals, cross_frame_attention, self_attention, shared_noise_batch, AttentionConfig,
    FrameFeature, LatentShape, Matrix, ProjectionSet, ResidualStack,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ATTENTION_TOL: f64 = 1e-12;
const DUPLICATION_TOL: f64 = 1e-10;
const LINEARITY_TOL: f64 = 1e-12;
const SPEED: f64 = 20.650;
const SPEED_TOL: f64 = 1e-3;
const LANDING_TOL_M: f64 = 0.01;
const MIN_FLICKER: f64 = 0.95;
const NOISE_SEED: u64 = 20240917;
const NOISE_SHAPE: LatentShape = LatentShape { height: 12, width: 16, channels: 4 };
const CHILD_ENV: &str = "MOTIONFORGE_ACCEPTANCE_NOISE_CHILD";

type Check = Result<String, String>;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.random_range(-1.5..1.5))
}

fn within(what: &str, start: Instant, budget: Duration) -> Result<(), String> {
    match start.elapsed() {
        t if t <= budget => Ok(()),
        t => Err(format!("{what} took {t:?}, budget {budget:?}")),
    }
}

fn attention_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (n1, ni, c, d) =
            (rng.random_range(1..=8), rng.random_range(1..=8), rng.random_range(1..=16), rng.random_range(1..=16));
        let alpha = rng.random_range(0.0..=1.0);
        let (f1, fi) = (random(&mut rng, n1, c), random(&mut rng, ni, c));
        let p = ProjectionSet::new(random(&mut rng, c, d), random(&mut rng, c, d), random(&mut rng, c, d)).unwrap();
        let cfg = AttentionConfig::new(d, alpha).unwrap();
        let (wq, wk, wv) = (rows(&p.w_q), rows(&p.w_k), rows(&p.w_v));
        let a = FrameFeature::new(f1.clone()).unwrap();
        let b = FrameFeature::new(fi.clone()).unwrap();
        let sa = self_attention(&a, &p, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max(oracle::max_abs_diff(sa.tokens(), &oracle::self_attention(&rows(&f1), &wq, &wk, &wv, d)));
        let cfa = cross_frame_attention(&a, &b, &p, &cfg).map_err(|e| e.to_string())?;
        let want = oracle::cross_frame(&rows(&f1), &rows(&fi), &wq, &wk, &wv, d, alpha);
        worst = worst.max(oracle::max_abs_diff(cfa.tokens(), &want));
    }
    within("1000 instances", start, Duration::from_secs(10))?;
    if worst <= ATTENTION_TOL {
        Ok(format!("1000 instances, max abs error {worst:.2e}"))
    } else {
        Err(format!("max abs error {worst:.2e} > {ATTENTION_TOL:.0e}"))
    }
}

fn cfa_duplication() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (n, c, d) = (rng.random_range(1..=8), rng.random_range(1..=16), rng.random_range(1..=16));
        let f = FrameFeature::new(random(&mut rng, n, c)).unwrap();
        let p = ProjectionSet::new(random(&mut rng, c, d), random(&mut rng, c, d), random(&mut rng, c, d)).unwrap();
        let cfg = AttentionConfig::new(d, 1.0).unwrap();
        let sa = self_attention(&f, &p, &cfg).map_err(|e| e.to_string())?;
        let cfa = cross_frame_attention(&f, &f, &p, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((cfa.tokens() - sa.tokens()).amax());
    }
    if worst <= DUPLICATION_TOL {
        Ok(format!("100 instances, max norm {worst:.2e}"))
    } else {
        Err(format!("max norm {worst:.2e} > {DUPLICATION_TOL:.0e}"))
    }
}

fn alpha_linearity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (n1, ni, c, d) =
            (rng.random_range(1..=8), rng.random_range(1..=8), rng.random_range(1..=16), rng.random_range(1..=16));
        let alpha = rng.random_range(0.0..=1.0);
        let (f1, fi) = (random(&mut rng, n1, c), random(&mut rng, ni, c));
        let w_k = random(&mut rng, c, d);
        let pre = cross_frame_keys(&FrameFeature::new(f1).unwrap(), &FrameFeature::new(fi.clone()).unwrap(), &w_k, alpha);
        let post = (&fi * &w_k) * alpha;
        worst = worst.max((pre.rows(n1, ni) - post).amax());
    }
    if worst <= LINEARITY_TOL {
        Ok(format!("100 instances, max abs difference {worst:.2e}"))
    } else {
        Err(format!("max abs difference {worst:.2e} > {LINEARITY_TOL:.0e}"))
    }
}

fn noise_digest() -> String {
    shared_noise_batch(NOISE_SEED, 6, NOISE_SHAPE).digest()
}

fn shared_noise() -> Check {
    let batch = shared_noise_batch(NOISE_SEED, 6, NOISE_SHAPE);
    if let Some(i) = (1..6).find(|&i| batch.frame_bytes(i) != batch.frame_bytes(0)) {
        return Err(format!("frame {i} differs from frame 0"));
    }
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let mut children = Vec::new();
    for _ in 0..2 {
        let out = Command::new(&exe).env(CHILD_ENV, "1").output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("child process failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        children.push(String::from_utf8_lossy(&out.stdout).trim().to_string());
    }
    let own = batch.digest();
    if children.iter().all(|c| *c == own) {
        Ok(format!("6 frames byte-identical, digest {} in 3 processes", &own[..16]))
    } else {
        Err(format!("digests differ across processes: {own} vs {children:?}"))
    }
}

fn residuals() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let shapes: Vec<(usize, usize)> =
            (0..rng.random_range(1..5)).map(|_| (rng.random_range(1..9), rng.random_range(1..9))).collect();
        let a = ResidualStack::new(shapes.iter().map(|&(r, c)| random(&mut rng, r, c)).collect());
        let b = ResidualStack::new(shapes.iter().map(|&(r, c)| random(&mut rng, r, c)).collect());
        let sum = combine_control_residuals(&a, &b).map_err(|e| e.to_string())?;
        for (l, &(r, c)) in shapes.iter().enumerate() {
            for i in 0..r {
                for j in 0..c {
                    if sum.levels[l][(i, j)] != a.levels[l][(i, j)] + b.levels[l][(i, j)] {
                        return Err(format!("case {case}, level {l} ({i}, {j}) differs from the loop sum"));
                    }
                }
            }
        }
        if combine_control_residuals(&a, &a.zeros_like()).map_err(|e| e.to_string())? != a {
            return Err(format!("case {case}: adding zeros changed the stack"));
        }
    }
    Ok("200 random stacks equal the loop sum; zero stack is an exact identity".into())
}

fn kinematics() -> Check {
    let start = Instant::now();
    let q = BallisticQuery::new(4.0, 1.8521, 13.665).with_gravity(9.81);
    let speed = horizontal_speed(&q).map_err(|e| e.to_string())?;
    if (speed - SPEED).abs() > SPEED_TOL {
        return Err(format!("horizontal speed {speed:.6} m/s, expected {SPEED} +- {SPEED_TOL}"));
    }
    let v = projectile_velocity(&q).map_err(|e| e.to_string())?;
    // Semi-implicit Euler until the body descends through the target height.
    let dt = 1e-6;
    let (mut pos, mut vel) = ([0.0, 0.0, 4.0], v);
    while pos[2] > 1.8521 {
        vel[2] -= 9.81 * dt;
        for k in 0..3 {
            pos[k] += vel[k] * dt;
        }
    }
    let miss = ((pos[0].powi(2) + pos[1].powi(2)).sqrt() - 13.665).abs();
    within("kinematics", start, Duration::from_secs(5))?;
    if miss <= LANDING_TOL_M {
        Ok(format!("speed {speed:.4} m/s, simulated landing off by {:.2} mm", miss * 1e3))
    } else {
        Err(format!("simulated landing misses by {miss:.4} m"))
    }
}

fn metric_exactness() -> Check {
    let flat = |v: u8| GrayFrame::filled(10, 7, v);
    let cases = [
        ("flicker identical", temporal_flickering(&[flat(90), flat(90), flat(90)], None), 1.0),
        ("flicker alternating", temporal_flickering(&[flat(0), flat(255), flat(0), flat(255)], None), 0.0),
        ("flicker step 51", temporal_flickering(&[flat(30), flat(81)], None), 0.8),
        ("smoothness static", motion_smoothness_proxy(&[flat(5), flat(5), flat(5), flat(5)]), 1.0),
        (
            "smoothness ramp",
            motion_smoothness_proxy(&(0..7).map(|i| flat(12 + 33 * i)).collect::<Vec<_>>()),
            1.0,
        ),
    ];
    for (name, got, want) in cases {
        let got = got.map_err(|e| format!("{name}: {e}"))?;
        if got != want {
            return Err(format!("{name}: {got} != {want}"));
        }
    }
    Ok("5 cases exact".into())
}

fn codegen_goldens() -> Check {
    let manifest = FunctionManifest::builtin();
    for name in ["basketball", "flag_wind", "water_pour"] {
        let source = fs::read_to_string(root().join(format!("examples/scenes/{name}.scene"))).map_err(|e| e.to_string())?;
        let spec = parse_scene(&source).map_err(|e| format!("{name}: {e}"))?;
        let script = emit_script(&spec, &manifest, &AssetCatalog::builtin()).map_err(|e| format!("{name}: {e}"))?;
        let golden = fs::read_to_string(root().join(format!("tests/golden/{name}.py"))).map_err(|e| e.to_string())?;
        if script.body != golden {
            return Err(format!("{name} differs from its golden"));
        }
        let report = lint_script(&script, &manifest);
        if !report.passed() {
            return Err(format!("{name} fails lint: {report}"));
        }
    }
    for name in ["process_spawn", "foreign_import", "path_escape"] {
        let body = fs::read_to_string(root().join(format!("tests/adversarial/{name}.py"))).map_err(|e| e.to_string())?;
        if lint_script(&ScriptText::llm(body), &manifest).passed() {
            return Err(format!("adversarial {name} passed lint"));
        }
    }
    Ok("3 goldens byte-identical and lint clean; 3 adversarial scripts rejected".into())
}

fn end_to_end() -> Check {
    let start = Instant::now();
    let scene = fs::read_to_string(root().join("examples/scenes/basketball.scene")).map_err(|e| e.to_string())?;
    let server = MockServer::scripted(vec![(200, chat_reply(&format!("```\n{scene}```")))]);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_motionforge"))
        .current_dir(dir.path())
        .env_remove("MOTIONFORGE_CONFIG")
        .env("MOTIONFORGE_LLM_KEY", "sk-acceptance-only")
        .env("MOTIONFORGE_LLM_URL", &server.base_url)
        .env("MOTIONFORGE_BLENDER", "/nonexistent/blender")
        .args(["run", "A basketball free falls in the air", "--mode", "dsl", "--steps", "10", "-o", "out", "--conditions"])
        .arg(root().join("tests/fixtures/drop8"))
        .output()
        .map_err(|e| e.to_string())?;
    let requests = server.join().len();
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr).trim()));
    }
    if requests != 1 {
        return Err(format!("{requests} LLM requests"));
    }
    let frames = load_sequence(&dir.path().join("out/frames"), "frame").map_err(|e| e.to_string())?;
    if frames.len() != 8 {
        return Err(format!("{} frames produced", frames.len()));
    }
    let flicker = temporal_flickering(&frames, None).map_err(|e| e.to_string())?;
    within("end-to-end run", start, Duration::from_secs(60))?;
    if flicker >= MIN_FLICKER {
        Ok(format!("8 frames, flicker {flicker:.6} in {:.1?}", start.elapsed()))
    } else {
        Err(format!("flicker {flicker:.6} < {MIN_FLICKER}"))
    }
}

fn main() -> ExitCode {
    if std::env::var_os(CHILD_ENV).is_some() {
        println!("{}", noise_digest());
        return ExitCode::SUCCESS;
    }
    // Ignore libtest flags such as --nocapture or a name filter.
    let checks: [(&str, fn() -> Check); 9] = [
        ("attention oracle equivalence", attention_oracle),
        ("cross-frame duplication identity", cfa_duplication),
        ("alpha linearity of key scaling", alpha_linearity),
        ("shared noise across frames and processes", shared_noise),
        ("control residual combination", residuals),
        ("thrown basketball kinematics", kinematics),
        ("metric exactness", metric_exactness),
        ("codegen goldens and lint", codegen_goldens),
        ("end-to-end toy run", end_to_end),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
