//! Sample a video from a condition directory with the toy backend and score it.
//!
//! cargo run --release --example synthesize -- tests/fixtures/drop8 out/frames [STEPS] [ALPHA]

use std::path::PathBuf;

use motionforge::metrics::MetricReport;
use motionforge::render::ConditionSequence;
use motionforge::synthesis::{sample_video, write_output, SynthesisConfig, ToyDenoiser};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let conditions = PathBuf::from(args.next().unwrap_or_else(|| "tests/fixtures/drop8".into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "frames".into()));
    let steps = args.next().map_or(Ok(10), |s| s.parse())?;
    let alpha = args.next().map(|s| s.parse()).transpose()?;

    let (seq, _) = ConditionSequence::load_dir(&conditions)?;
    let cfg = SynthesisConfig { steps, alpha, ..Default::default() };
    let backend = ToyDenoiser::new(cfg.latent_channels);
    let stack = sample_video(&seq, &cfg, &backend)?;
    let record = write_output(&out, &stack, &seq, &cfg, &backend)?;
    let report = MetricReport::compute(&stack.frames, None)?;
    println!("{} frames, alpha {}, noise {}", record.frame_count, record.alpha, &record.noise_digest[..12]);
    println!("flicker {:.6}  smoothness {:.6}", report.flicker, report.smoothness_proxy.unwrap_or(f64::NAN));
    Ok(())
}
