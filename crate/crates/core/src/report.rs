//! Deterministic CSV output.
//!
//! Floats are written in the shortest form that parses back to the same
//! double, with a dot decimal separator regardless of locale.

use crate::environment::{BetaCurve, EnvironmentKernelSequence};
use crate::filtering::FilterTrajectory;
use crate::model::{Observation, SimulatedPath};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_obs(obs: Observation) -> String {
    match obs {
        Observation::Symbol(u) => u.to_string(),
        Observation::Real(v) => fmt_f64(v),
    }
}

/// `n,x,y`.
pub fn simulation_csv(path: &SimulatedPath) -> String {
    let mut out = String::from("n,x,y\n");
    for (n, (x, y)) in path.states.iter().zip(path.observations.values()).enumerate() {
        out.push_str(&format!("{n},{x},{}\n", fmt_obs(*y)));
    }
    out
}

/// `n,Pi_0,..,Pi_{d-1},log_Z`.
pub fn trajectory_csv(traj: &FilterTrajectory) -> String {
    let d = traj.prior().dim();
    let mut out = String::from("n");
    for x in 0..d {
        out.push_str(&format!(",Pi_{x}"));
    }
    out.push_str(",log_Z\n");
    for (n, (state, c)) in traj.states().iter().zip(traj.log_normalizers()).enumerate() {
        out.push_str(&n.to_string());
        for w in state.weights() {
            out.push(',');
            out.push_str(&fmt_f64(*w));
        }
        out.push_str(&format!(",{}\n", fmt_f64(*c)));
    }
    out
}

/// `n,beta`.
pub fn beta_csv(curve: &BetaCurve) -> String {
    series_csv("beta", curve.values.iter().enumerate().map(|(i, v)| (i + 1, *v)))
}

/// `n,<column>` for arbitrary `(n, value)` pairs.
pub fn series_csv(column: &str, values: impl IntoIterator<Item = (usize, f64)>) -> String {
    let mut out = format!("n,{column}\n");
    for (n, v) in values {
        out.push_str(&format!("{n},{}\n", fmt_f64(v)));
    }
    out
}

/// `n,from,to,prob` for every reachable row of every kernel.
pub fn kernel_dump_csv(seq: &EnvironmentKernelSequence) -> String {
    let mut out = String::from("n,from,to,prob\n");
    for n in 1..=seq.horizon() {
        let k = seq.kernel(n);
        for x in 0..k.dim() {
            if !k.is_reachable(x) {
                continue;
            }
            for (to, p) in k.row(x).iter().enumerate() {
                out.push_str(&format!("{n},{x},{to},{}\n", fmt_f64(*p)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtering::filter_run;
    use crate::fixtures;
    use crate::model::{simulate, ObservationPath};

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0, 1e-300, 0.9192546583850931, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(0.5), "0.5");
    }

    #[test]
    fn simulation_shape() {
        let m1 = fixtures::m1();
        let path = simulate(&m1, &m1.stationary, 100, 1).unwrap();
        let csv = simulation_csv(&path);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,x,y");
        assert_eq!(lines.len(), 101);
    }

    #[test]
    fn trajectory_shape() {
        let m1 = fixtures::m1();
        let traj = filter_run(&m1, &m1.stationary, &ObservationPath::symbols(&[0, 0])).unwrap();
        let csv = trajectory_csv(&traj);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,Pi_0,Pi_1,log_Z");
        assert_eq!(lines[1], "0,0.8,0.2,-0.6931471805599453");
    }
}
