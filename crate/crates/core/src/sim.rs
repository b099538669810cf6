//! Fixed-step RK4 simulation of a [`SystemModel`] driven by an attack waveform.
//!
//! Energies are time-averaged, `‖y‖² = (1/T)∫₀ᵀ |y(t)|² dt`, and integrated
//! with composite Simpson's rule on the step grid.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_HORIZON: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub amplitude: f64,
    /// Angular frequency in rad/s.
    pub frequency: f64,
    pub phase: f64,
}

/// Attack signal `ζ(t)`; per-channel vectors must match the model's attack
/// dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Waveform {
    Zero,
    Constant { level: Vec<f64> },
    /// `level · min(t / rise_time, 1)`.
    Ramp { level: Vec<f64>, rise_time: f64 },
    /// Sum of sinusoids on each channel.
    Tones { channels: Vec<Vec<Tone>> },
    /// Zero-order hold of `samples[k]` on `[k·dt, (k+1)·dt)`, zero afterwards.
    Held { dt: f64, samples: Vec<Vec<f64>> },
}

impl Waveform {
    fn channels(&self) -> Option<usize> {
        match self {
            Waveform::Zero => None,
            Waveform::Constant { level } | Waveform::Ramp { level, .. } => Some(level.len()),
            Waveform::Tones { channels } => Some(channels.len()),
            Waveform::Held { samples, .. } => samples.first().map(Vec::len),
        }
    }

    pub fn sample(&self, t: f64, out: &mut [f64]) {
        match self {
            Waveform::Zero => out.fill(0.0),
            Waveform::Constant { level } => out.copy_from_slice(level),
            Waveform::Ramp { level, rise_time } => {
                let s = if *rise_time > 0.0 {
                    (t / rise_time).min(1.0)
                } else {
                    1.0
                };
                out.iter_mut().zip(level).for_each(|(o, l)| *o = s * l);
            }
            Waveform::Tones { channels } => {
                for (o, tones) in out.iter_mut().zip(channels) {
                    *o = tones
                        .iter()
                        .map(|tn| tn.amplitude * (tn.frequency * t + tn.phase).sin())
                        .sum();
                }
            }
            Waveform::Held { dt, samples } => {
                let k = (t / dt).floor();
                match samples.get(k as usize).filter(|_| k >= 0.0) {
                    Some(row) => out.copy_from_slice(row),
                    None => out.fill(0.0),
                }
            }
        }
    }

    /// The same waveform multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Waveform {
        let mul = |v: &Vec<f64>| v.iter().map(|x| c * x).collect::<Vec<_>>();
        match self {
            Waveform::Zero => Waveform::Zero,
            Waveform::Constant { level } => Waveform::Constant { level: mul(level) },
            Waveform::Ramp { level, rise_time } => Waveform::Ramp {
                level: mul(level),
                rise_time: *rise_time,
            },
            Waveform::Tones { channels } => Waveform::Tones {
                channels: channels
                    .iter()
                    .map(|tones| {
                        tones
                            .iter()
                            .map(|tn| Tone {
                                amplitude: c * tn.amplitude,
                                ..*tn
                            })
                            .collect()
                    })
                    .collect(),
            },
            Waveform::Held { dt, samples } => Waveform::Held {
                dt: *dt,
                samples: samples.iter().map(mul).collect(),
            },
        }
    }

    /// A random probe attack over `[0, horizon]`: a slow ramp, a few tones
    /// biased towards low frequencies (where the consensus and swing models
    /// amplify most), or a piecewise-constant signal, in equal proportion.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, channels: usize, horizon: f64) -> Waveform {
        match rng.gen_range(0..3) {
            0 => Waveform::Ramp {
                level: (0..channels).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                rise_time: rng.gen_range(0.05..1.0) * horizon,
            },
            1 => Waveform::Tones {
                channels: (0..channels)
                    .map(|_| {
                        (0..rng.gen_range(1..4))
                            .map(|_| Tone {
                                amplitude: rng.gen_range(0.1..1.0),
                                // log-uniform on [0.01, 10] rad/s
                                frequency: 10f64.powf(rng.gen_range(-2.0..1.0)),
                                phase: rng.gen_range(0.0..std::f64::consts::TAU),
                            })
                            .collect()
                    })
                    .collect(),
            },
            _ => {
                let pieces = rng.gen_range(2..12);
                Waveform::Held {
                    dt: horizon / pieces as f64,
                    samples: (0..pieces)
                        .map(|_| (0..channels).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .collect(),
                }
            }
        }
    }
}

/// Sampled outputs and their time-averaged energies.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Column `k` holds the performance outputs at `times[k]`.
    pub perf: DMatrix<f64>,
    pub monitors: DMatrix<f64>,
    /// Time-averaged `Σ_i ‖y_i‖²`.
    pub perf_energy: f64,
    /// Time-averaged `‖y_m‖²` per monitor row.
    pub monitor_energy: Vec<f64>,
    /// Time-averaged `‖ζ‖²`.
    pub attack_energy: f64,
}

/// Composite Simpson weights for `count` equally spaced samples (odd count).
fn simpson_weight(k: usize, count: usize) -> f64 {
    if k == 0 || k == count - 1 {
        1.0
    } else if k % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

pub fn simulate(
    model: &SystemModel,
    signal: &Waveform,
    horizon: f64,
    step: f64,
) -> Result<Trajectory> {
    model.check_dimensions()?;
    if !(step > 0.0) || !(horizon >= step) {
        return Err(Error::InvalidParameter(format!(
            "need step > 0 and horizon >= step, got step {step}, horizon {horizon}"
        )));
    }
    let na = model.attack_dim();
    if let Some(c) = signal.channels() {
        if c != na {
            return Err(Error::DimensionMismatch(format!(
                "waveform has {c} channels, model has {na} attack inputs"
            )));
        }
    }

    // Even number of intervals so Simpson's rule covers the whole horizon.
    let mut steps = (horizon / step).ceil() as usize;
    steps += steps % 2;
    let h = horizon / steps as f64;
    let count = steps + 1;

    let a = &model.a_mat;
    let b = &model.b_cols;
    let s = model.state_dim;
    let mut x = DVector::zeros(s);
    let mut zeta = vec![0.0; na];
    let mut k1 = DVector::zeros(s);
    let mut k2 = DVector::zeros(s);
    let mut k3 = DVector::zeros(s);
    let mut k4 = DVector::zeros(s);
    let mut tmp = DVector::zeros(s);

    let deriv = |t: f64, x: &DVector<f64>, out: &mut DVector<f64>, zeta: &mut [f64]| {
        signal.sample(t, zeta);
        out.gemv(1.0, a, x, 0.0);
        for (c, z) in zeta.iter().enumerate() {
            if *z != 0.0 {
                out.axpy(*z, &b.column(c), 1.0);
            }
        }
    };

    let mut perf = DMatrix::zeros(model.perf_rows.nrows(), count);
    let mut monitors = DMatrix::zeros(model.monitor_rows.nrows(), count);
    let mut times = Vec::with_capacity(count);
    let mut perf_energy = 0.0;
    let mut monitor_energy = vec![0.0; model.monitor_rows.nrows()];
    let mut attack_energy = 0.0;

    for k in 0..count {
        let t = k as f64 * h;
        if k > 0 {
            let t0 = t - h;
            deriv(t0, &x, &mut k1, &mut zeta);
            tmp.copy_from(&x);
            tmp.axpy(h / 2.0, &k1, 1.0);
            deriv(t0 + h / 2.0, &tmp, &mut k2, &mut zeta);
            tmp.copy_from(&x);
            tmp.axpy(h / 2.0, &k2, 1.0);
            deriv(t0 + h / 2.0, &tmp, &mut k3, &mut zeta);
            tmp.copy_from(&x);
            tmp.axpy(h, &k3, 1.0);
            deriv(t, &tmp, &mut k4, &mut zeta);
            x.axpy(h / 6.0, &k1, 1.0);
            x.axpy(h / 3.0, &k2, 1.0);
            x.axpy(h / 3.0, &k3, 1.0);
            x.axpy(h / 6.0, &k4, 1.0);
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::Diverged { time: t });
            }
        }
        let w = simpson_weight(k, count) * h / 3.0 / horizon;
        let y = &model.perf_rows * &x;
        let ym = &model.monitor_rows * &x;
        perf_energy += w * y.norm_squared();
        for (e, v) in monitor_energy.iter_mut().zip(ym.iter()) {
            *e += w * v * v;
        }
        signal.sample(t, &mut zeta);
        attack_energy += w * zeta.iter().map(|z| z * z).sum::<f64>();
        perf.set_column(k, &y);
        monitors.set_column(k, &ym);
        times.push(t);
    }

    Ok(Trajectory {
        times,
        perf,
        monitors,
        perf_energy,
        monitor_energy,
        attack_energy,
    })
}
