//! Launch velocity for a horizontal throw, checked by stepping the motion.
//!
//! cargo run --example solve_kinematics -- 4 1.8521 13.665

use motionforge::kinematics::{fall_time, projectile_velocity, BallisticQuery, STANDARD_GRAVITY};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (start, target, distance) = match args[..] {
        [s, t, d] => (s, t, d),
        _ => (4.0, 1.8521, 13.665),
    };
    let q = BallisticQuery::new(start, target, distance);
    let v = projectile_velocity(&q)?;
    let t = fall_time(start - target, STANDARD_GRAVITY)?;
    println!("fall time {t:.4} s, launch velocity ({:.4}, {:.4}, {:.4}) m/s", v[0], v[1], v[2]);

    let dt = 1e-5;
    let (mut y, mut z, mut vz) = (0.0, start, v[2]);
    while z > target {
        vz -= STANDARD_GRAVITY * dt;
        y += v[1] * dt;
        z += vz * dt;
    }
    println!("stepped landing at {y:.4} m (target {distance} m)");
    Ok(())
}
