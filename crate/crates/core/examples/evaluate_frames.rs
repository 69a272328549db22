//! Score a frame directory and write metrics.json next to the frames.
//!
//! cargo run --example evaluate_frames -- out/frames

use std::path::PathBuf;

use motionforge::metrics::evaluate_dir;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "frames".into()));
    let report = evaluate_dir(&dir, None)?;
    println!("{} frames, flicker {:.6}", report.frame_count, report.flicker);
    if let Some(s) = report.smoothness_proxy {
        println!("smoothness proxy {s:.6}");
    }
    for (i, f) in report.per_frame_flicker.iter().enumerate() {
        println!("  {}->{}  {f:.6}", i + 1, i + 2);
    }
    Ok(())
}
