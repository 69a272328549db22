//! Compare self, cross-frame and first-frame attention on random features,
//! and show how alpha moves cross-frame output between the two.

use motionforge::synthesis::{
    cross_frame_attention, first_frame_attention, self_attention, AttentionConfig, FrameFeature, Matrix,
    ProjectionSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut m = |r, c| Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
    let (n, c, d) = (6, 8, 8);
    let f1 = FrameFeature::new(m(n, c))?;
    let fi = FrameFeature::new(m(n, c))?;
    let p = ProjectionSet::new(m(c, d), m(c, d), m(c, d))?;

    let sa = self_attention(&fi, &p, &AttentionConfig::new(d, 1.0)?)?;
    let ffa = first_frame_attention(&f1, &fi, &p, &AttentionConfig::new(d, 1.0)?)?;
    println!("alpha  |cfa - sa|  |cfa - ffa|");
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let cfa = cross_frame_attention(&f1, &fi, &p, &AttentionConfig::new(d, alpha)?)?;
        println!(
            "{alpha:<5}  {:<10.6}  {:.6}",
            (cfa.tokens() - sa.tokens()).amax(),
            (cfa.tokens() - ffa.tokens()).amax()
        );
    }
    Ok(())
}
