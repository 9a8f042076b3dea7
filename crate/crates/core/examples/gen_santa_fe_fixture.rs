//! Regenerates `data/santa_fe.txt`, the bundled laser-intensity fixture.
//!
//! The series is the squared field amplitude of a Lorenz-type flow — the
//! standard model for a far-infrared laser in its chaotic regime — sampled at
//! a rate that gives pulse trains of roughly seven to eight samples between
//! intensity collapses, quantized to 8-bit detector counts and written one
//! integer per line. The integration uses only rational arithmetic plus
//! fourth-order Runge-Kutta, so the output is bit-identical across platforms.

use std::fs;
use std::path::Path;

const SIGMA: f64 = 10.0;
const RHO: f64 = 28.0;
const DT: f64 = 0.002;
/// Settle onto the attractor before recording.
const WARMUP_STEPS: usize = 15_000;
/// Integrator steps per emitted sample (0.08 time units).
const SAMPLE_EVERY: usize = 40;
const POINTS: usize = 1000;
const FULL_SCALE: f64 = 255.0;

fn deriv(s: [f64; 3]) -> [f64; 3] {
    let beta = 8.0 / 3.0;
    [
        SIGMA * (s[1] - s[0]),
        s[0] * (RHO - s[2]) - s[1],
        s[0] * s[1] - beta * s[2],
    ]
}

fn rk4_step(s: [f64; 3]) -> [f64; 3] {
    let k1 = deriv(s);
    let k2 = deriv(advance(s, k1, DT / 2.0));
    let k3 = deriv(advance(s, k2, DT / 2.0));
    let k4 = deriv(advance(s, k3, DT));
    let mut out = s;
    for i in 0..3 {
        out[i] += DT / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn advance(s: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]]
}

fn main() {
    let mut state = [1.0, 1.0, 20.0];
    for _ in 0..WARMUP_STEPS {
        state = rk4_step(state);
    }

    let mut intensity = Vec::with_capacity(POINTS);
    for _ in 0..POINTS {
        intensity.push(state[0] * state[0]);
        for _ in 0..SAMPLE_EVERY {
            state = rk4_step(state);
        }
    }

    let max = intensity.iter().cloned().fold(f64::MIN, f64::max);
    let mut text = String::with_capacity(POINTS * 4);
    for v in &intensity {
        let q = (FULL_SCALE * v / max).round() as u64;
        text.push_str(&q.to_string());
        text.push('\n');
    }

    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/santa_fe.txt");
    fs::write(&out, text).expect("write fixture");
    println!("wrote {} samples to {}", POINTS, out.display());
}
