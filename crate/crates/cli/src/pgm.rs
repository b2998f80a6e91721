//! Binary greymap rendering of a bifurcation diagram.

use logistic_core::BifurcationData;

/// Sample count at which a pixel saturates to black.
pub const COUNT_CAP: u32 = 4;

/// Renders `data` as a binary PGM (`P5`, maxval 255).
///
/// One column per parameter, `height` rows binning `x` from 1 (top) to 0
/// (bottom), each bin closed at its lower edge. Each pixel is `255 - round(255 min(1, count / COUNT_CAP))`;
/// escaped columns stay white.
pub fn render_bifurcation_pgm(data: &BifurcationData, height: usize) -> Vec<u8> {
    assert!(height >= 2, "height must be at least 2");
    let width = data.len();
    let mut counts = vec![0u32; width * height];
    for (col, (samples, &escaped)) in data.samples.iter().zip(&data.escaped).enumerate() {
        if escaped {
            continue;
        }
        for &x in samples {
            if !(0.0..=1.0).contains(&x) {
                continue;
            }
            // bin k from the bottom covers [k/h, (k+1)/h); x = 1 joins the top bin
            let bin = ((x * height as f64) as usize).min(height - 1);
            let row = height - 1 - bin;
            counts[row * width + col] += 1;
        }
    }
    let header = format!("P5\n{width} {height}\n255\n");
    let mut out = Vec::with_capacity(header.len() + counts.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(counts.iter().map(|&c| shade(c)));
    out
}

fn shade(count: u32) -> u8 {
    let density = (count as f64 / COUNT_CAP as f64).min(1.0);
    255 - (255.0 * density).round() as u8
}
