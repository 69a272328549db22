//! Write an edge/depth condition sequence for a falling sphere without
//! Blender: orthographic view along +y, analytic free fall.
//!
//! cargo run --example synthetic_conditions -- OUT_DIR [FRAMES] [WIDTH] [HEIGHT]

use std::path::PathBuf;

use motionforge::frames::GrayFrame;
use motionforge::kinematics::STANDARD_GRAVITY;
use motionforge::render::{ConditionSequence, RenderProfile};

const PX_PER_M: f64 = 20.0;
const RADIUS_M: f64 = 0.3;
const START_Z: f64 = 4.0;
const FPS: f64 = 24.0;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "conditions".into()));
    let frames: usize = args.next().map_or(Ok(8), |s| s.parse())?;
    let width: u32 = args.next().map_or(Ok(128), |s| s.parse())?;
    let height: u32 = args.next().map_or(Ok(96), |s| s.parse())?;

    let ground_row = height as f64 - 4.0;
    let r = RADIUS_M * PX_PER_M;
    let (mut edge, mut depth) = (Vec::new(), Vec::new());
    for i in 0..frames {
        let t = i as f64 / FPS;
        let z = (START_Z - 0.5 * STANDARD_GRAVITY * t * t).max(RADIUS_M);
        let (cx, cy) = (width as f64 / 2.0, ground_row - z * PX_PER_M);
        edge.push(GrayFrame::from_fn(width, height, |x, y| {
            let d = ((x as f64 + 0.5 - cx).powi(2) + (y as f64 + 0.5 - cy).powi(2)).sqrt();
            if (d - r).abs() < 0.75 || (y as f64 + 0.5 - ground_row).abs() < 0.5 {
                255
            } else {
                0
            }
        }));
        depth.push(GrayFrame::from_fn(width, height, |x, y| {
            let d2 = (x as f64 + 0.5 - cx).powi(2) + (y as f64 + 0.5 - cy).powi(2);
            if d2 < r * r {
                (200.0 + 55.0 * (1.0 - d2 / (r * r)).sqrt()).round() as u8
            } else if y as f64 + 0.5 > ground_row {
                60
            } else {
                0
            }
        }));
    }
    let seq = ConditionSequence::new(edge, depth, None)?;
    seq.write_dir(&out, &seq.manifest(RenderProfile::default(), "synthetic"))?;
    println!("wrote {} frames at {}x{} to {}", frames, width, height, out.display());
    Ok(())
}
