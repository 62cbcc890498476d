//! Reconstruction of curves from driving records.

use super::slit::{Chart, SlitStep};
use crate::conformal::C64;
use crate::error::{Result, SleError};

use crate::samplers::{DrivingRecord, Scheme};
use std::io::Write;

/// Traced points of one curve, including its boundary base point at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    pub curve: usize,
    pub times: Vec<f64>,
    pub points: Vec<C64>,
}

/// The discrete chain behind a record, as one chart of tagged steps.
#[derive(Debug, Clone)]
pub struct JointChart {
    pub chart: Chart,
    pub curve_of_step: Vec<usize>,
    /// Record time at the end of each step.
    pub time_of_step: Vec<f64>,
}

/// Rebuilds the frozen-driving chain of a record.
///
/// Single-curve records use one step per interval at the right-end driving
/// value. Multiradial records place the p segments of an interval one after
/// another, at angles chosen so that after the whole interval each tip sits
/// exactly at the recorded driving value. When two drivers are closer than the
/// width of a segment image no such angle exists and the recorded value is used.
pub fn joint_chart(record: &DrivingRecord) -> Result<JointChart> {
    let p = record.n_curves();
    let dt = record.dt;
    let mut out = JointChart {
        chart: Chart::new(),
        curve_of_step: Vec::new(),
        time_of_step: Vec::new(),
    };
    for k in 0..record.steps {
        let t = record.time(k + 1);
        if record.scheme == Scheme::MultiradialCommon {
            let mut xs = vec![0.0; p];
            for j in (0..p).rev() {
                let mut x = record.driver(k + 1, j);
                for l in (j + 1..p).rev() {
                    // Drivers closer than the segment image width: keep the recorded angle.
                    if let Ok(y) = SlitStep::new(xs[l], dt).covering_inverse(x) {
                        x = y;
                    }
                }
                xs[j] = x;
            }
            for (j, &x) in xs.iter().enumerate() {
                out.chart.push(SlitStep::new(x, dt));
                out.curve_of_step.push(j);
                out.time_of_step.push(t);
            }
        } else {
            out.chart.push(SlitStep::new(record.xi[k + 1], dt));
            out.curve_of_step.push(0);
            out.time_of_step.push(t);
        }
    }
    Ok(out)
}

/// Tip positions of every curve at every `stride`-th step (and the last step).
pub fn trace_curves(record: &DrivingRecord, stride: usize) -> Result<Vec<CurveTrace>> {
    let stride = stride.max(1);
    let jc = joint_chart(record)?;
    let p = record.n_curves();
    let mut traces: Vec<CurveTrace> = (0..p)
        .map(|j| CurveTrace {
            curve: j,
            times: vec![0.0],
            points: vec![C64::from_polar(1.0, record.thetas[j])],
        })
        .collect();
    let n_steps = jc.chart.len() / p.max(1);
    for k in 0..n_steps {
        if (k + 1) % stride != 0 && k + 1 != n_steps {
            continue;
        }
        for (j, tr) in traces.iter_mut().enumerate() {
            let idx = k * p + j;
            tr.times.push(jc.time_of_step[idx]);
            tr.points.push(jc.chart.tip_after(idx));
        }
    }
    Ok(traces)
}

/// Writes traces as CSV rows `curve_index,time,re,im`.
pub fn write_traces_csv<W: Write>(traces: &[CurveTrace], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| SleError::Numeric(format!("csv: {e}"));
    w.write_record(["curve_index", "time", "re", "im"]).map_err(io)?;
    for tr in traces {
        for (t, z) in tr.times.iter().zip(&tr.points) {
            w.write_record(&[tr.curve.to_string(), t.to_string(), z.re.to_string(), z.im.to_string()])
                .map_err(io)?;
        }
    }
    w.flush().map_err(|e| SleError::Numeric(format!("csv flush: {e}")))?;
    Ok(())
}

/// Own capacities t_j(t) on a common-time grid, from the tip derivatives
/// h_{t,j}'(ξ^j) sampled on that grid: dt_j/dt = 1/h'².
pub fn common_to_multi_time(tip_derivs: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(tip_derivs.len());
    let mut acc = 0.0;
    for (k, d) in tip_derivs.iter().enumerate() {
        if k > 0 {
            let prev = tip_derivs[k - 1];
            acc += 0.5 * dt * (1.0 / (prev * prev) + 1.0 / (d * d));
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_derivative_gives_identity_clock() {
        let t = common_to_multi_time(&[1.0; 5], 0.1);
        assert!((t[4] - 0.4).abs() < 1e-15);
        let t = common_to_multi_time(&[0.5; 3], 0.1);
        assert!((t[2] - 0.8).abs() < 1e-15);
    }
}
