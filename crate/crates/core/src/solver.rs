//! Bounded univariate maximizers.
//!
//! All solvers take a fallible objective and break ties toward the smaller
//! argument, so repeated runs on the same inputs pick the same point.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Inverse golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Local maxima of the coarse grid that get a golden-section refinement.
const MAX_REFINED_PEAKS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub x: f64,
    pub value: f64,
}

impl Optimum {
    fn consider(&mut self, x: f64, value: f64) {
        if value > self.value || (value == self.value && x < self.x) {
            self.x = x;
            self.value = value;
        }
    }

    fn empty() -> Self {
        Optimum {
            x: f64::INFINITY,
            value: f64::NEG_INFINITY,
        }
    }
}

/// Golden-section search for a maximum on `[lo, hi]`. Returns the best
/// point evaluated, which for a unimodal objective converges to the
/// maximizer at rate `0.618` per iteration.
pub fn golden_section_max<E, F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    iterations: usize,
) -> Result<Optimum, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut best = Optimum::empty();
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    best.consider(c, fc);
    best.consider(d, fd);
    for _ in 0..iterations {
        if b - a <= f64::EPSILON * b.abs().max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            best.consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            best.consider(d, fd);
        }
    }
    Ok(best)
}

/// Evaluates a uniform grid of `points` over `[lo, hi]` (both ends
/// included), then golden-section refines the bracket around each of the
/// best few local maxima of the grid.
pub fn grid_refine_max<E, F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    points: usize,
    iterations: usize,
) -> Result<Optimum, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let points = points.max(2);
    let mut best = Optimum::empty();
    if !(hi > lo) {
        let v = f(lo)?;
        best.consider(lo, v);
        return Ok(best);
    }
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect();
    let mut values = Vec::with_capacity(points);
    for &x in &xs {
        let v = f(x)?;
        best.consider(x, v);
        values.push(v);
    }

    let mut peaks: Vec<usize> = (0..points)
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == points || values[i] >= values[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks.truncate(MAX_REFINED_PEAKS);

    for i in peaks {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(points - 1)];
        let local = golden_section_max(f, a, b, iterations)?;
        best.consider(local.x, local.value);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmParams {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub seed: u64,
}

impl SwarmParams {
    pub fn new(particles: usize, iterations: usize, seed: u64) -> Self {
        // constriction-factor coefficients
        SwarmParams {
            particles,
            iterations,
            inertia: 0.729_8,
            cognitive: 1.496_18,
            social: 1.496_18,
            seed,
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Particle swarm maximization on `[lo, hi]`. The first two particles start
/// on the bounds; the rest are drawn uniformly from a seeded ChaCha stream.
pub fn particle_swarm_max<E, F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    params: &SwarmParams,
) -> Result<Optimum, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut best = Optimum::empty();
    if !(hi > lo) {
        let v = f(lo)?;
        best.consider(lo, v);
        return Ok(best);
    }
    let n = params.particles.max(2);
    let span = hi - lo;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pos: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => lo,
            1 => hi,
            _ => lo + span * unit(&mut rng),
        })
        .collect();
    let mut vel: Vec<f64> = (0..n)
        .map(|_| 0.1 * span * (2.0 * unit(&mut rng) - 1.0))
        .collect();
    let mut personal = pos.clone();
    let mut personal_val = Vec::with_capacity(n);
    for &x in &pos {
        let v = f(x)?;
        best.consider(x, v);
        personal_val.push(v);
    }

    for _ in 0..params.iterations {
        for i in 0..n {
            let (r1, r2) = (unit(&mut rng), unit(&mut rng));
            vel[i] = params.inertia * vel[i]
                + params.cognitive * r1 * (personal[i] - pos[i])
                + params.social * r2 * (best.x - pos[i]);
            let next = pos[i] + vel[i];
            if next <= lo || next >= hi {
                vel[i] = 0.0;
            }
            pos[i] = next.clamp(lo, hi);
            let v = f(pos[i])?;
            if v > personal_val[i] {
                personal_val[i] = v;
                personal[i] = pos[i];
            }
            best.consider(pos[i], v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::convert::Infallible;

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<f64, Infallible> {
        move |x| Ok(f(x))
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let mut f = ok(|x| -(x - 0.3) * (x - 0.3));
        let o = golden_section_max(&mut f, -1.0, 2.0, 80).unwrap();
        assert!((o.x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn grid_refine_hits_boundary_for_monotone() {
        let mut f = ok(|x| x.ln_1p());
        let o = grid_refine_max(&mut f, 0.0, 7.5, 16, 40).unwrap();
        assert_eq!(o.x, 7.5);
    }

    #[test]
    fn grid_refine_picks_global_of_two_peaks() {
        // peaks at 1 (height 1) and 4 (height 1.2)
        let mut f = ok(|x| {
            (-(x - 1.0) * (x - 1.0) * 20.0).exp() + 1.2 * (-(x - 4.0) * (x - 4.0) * 20.0).exp()
        });
        let o = grid_refine_max(&mut f, 0.0, 5.0, 64, 64).unwrap();
        assert!((o.x - 4.0).abs() < 1e-6);
        // validation grid never beats the refined optimum
        for i in 0..=10_000 {
            let x = 5.0 * i as f64 / 10_000.0;
            assert!(f(x).unwrap() <= o.value + 1e-12);
        }
    }

    #[test]
    fn ties_prefer_smaller_argument() {
        let mut f = ok(|_| 1.0);
        let o = grid_refine_max(&mut f, 0.0, 1.0, 8, 8).unwrap();
        assert_eq!(o.x, 0.0);
    }

    #[test]
    fn swarm_is_seeded_and_accurate() {
        let mut f = ok(|x| -(x - 2.2).powi(2));
        let p = SwarmParams::new(16, 100, 7);
        let a = particle_swarm_max(&mut f, 0.0, 10.0, &p).unwrap();
        let b = particle_swarm_max(&mut f, 0.0, 10.0, &p).unwrap();
        assert_eq!(a, b);
        assert!((a.x - 2.2).abs() < 1e-4);
    }

    #[test]
    fn errors_propagate() {
        let mut f = |x: f64| if x > 0.5 { Err("boom") } else { Ok(x) };
        assert_eq!(grid_refine_max(&mut f, 0.0, 1.0, 4, 4), Err("boom"));
    }

    #[test]
    fn degenerate_interval() {
        let mut f = ok(|x| x);
        let o = grid_refine_max(&mut f, 3.0, 3.0, 10, 10).unwrap();
        assert_eq!((o.x, o.value), (3.0, 3.0));
    }
}
