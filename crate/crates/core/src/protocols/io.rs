//! CSV/JSON serialization of protocols.
//!
//! Values are written with 17 significant digits, which round-trips every
//! f64 exactly, so a protocol read back reproduces its nodes bit for bit.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Tolerances;
use crate::protocol::{grid_time, FrequencyProtocol};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolHeader {
    pub builder: String,
    pub arguments: BTreeMap<String, f64>,
    pub tolerances: Tolerances,
    pub samples: usize,
    pub duration: f64,
}

pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes (t, omega, omega_dot, mu) rows. Grid protocols emit their nodes;
/// closed forms are sampled at `samples` uniform points.
pub fn write_protocol_csv<W: Write>(
    protocol: &FrequencyProtocol,
    samples: usize,
    out: W,
) -> Result<usize> {
    let (ts, ws, wds) = protocol.samples(samples);
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["t", "omega", "omega_dot", "mu"])?;
    for i in 0..ts.len() {
        let mu = wds[i] / (ws[i] * ws[i]);
        wtr.write_record([fmt17(ts[i]), fmt17(ws[i]), fmt17(wds[i]), fmt17(mu)])?;
    }
    wtr.flush()?;
    Ok(ts.len())
}

/// Reads a table written by [`write_protocol_csv`] as a grid protocol.
pub fn read_protocol_csv<R: Read>(input: R) -> Result<FrequencyProtocol> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let expect = ["t", "omega", "omega_dot", "mu"];
    if headers.len() != 4 || headers.iter().zip(expect).any(|(a, b)| a != b) {
        return Err(Error::Config(format!(
            "protocol table must have columns t,omega,omega_dot,mu (found {headers:?})"
        )));
    }
    let mut ts = Vec::new();
    let mut ws = Vec::new();
    let mut wds = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("row {}: column {}: {e}", row + 1, expect[k])))
        };
        ts.push(parse(0)?);
        ws.push(parse(1)?);
        wds.push(parse(2)?);
    }
    if ts.len() < 2 {
        return Err(Error::Config(
            "protocol table needs at least two rows".into(),
        ));
    }
    let n = ts.len();
    let duration = ts[n - 1];
    for (i, &t) in ts.iter().enumerate() {
        let expected = grid_time(duration, i, n);
        if (t - expected).abs() > 1e-12 * duration {
            return Err(Error::Config(format!(
                "protocol table is not on a uniform grid (row {}: t = {t}, expected {expected})",
                i + 1
            )));
        }
    }
    FrequencyProtocol::from_grid(duration, ws, wds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{build_constant_mu_protocol, build_sta_protocol};

    #[test]
    fn round_trip_is_bit_exact() {
        let (p, _) = build_sta_protocol(5.0, 10.0, 5.0).unwrap();
        let mut first = Vec::new();
        write_protocol_csv(&p, 2001, &mut first).unwrap();
        let back = read_protocol_csv(first.as_slice()).unwrap();
        let mut second = Vec::new();
        write_protocol_csv(&back, 0, &mut second).unwrap();
        assert_eq!(first, second);

        let (_, w0, wd0) = p.samples(2001);
        let (_, w1, wd1) = back.samples(0);
        assert!(w0.iter().zip(&w1).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(wd0
            .iter()
            .zip(&wd1)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn read_back_grid_interpolates_the_original() {
        let p = build_constant_mu_protocol(9.6875, 7.75, -0.02).unwrap();
        let mut buf = Vec::new();
        write_protocol_csv(&p, 2001, &mut buf).unwrap();
        let g = read_protocol_csv(buf.as_slice()).unwrap();
        for k in 0..=333 {
            let t = p.duration() * k as f64 / 333.0;
            assert!((g.omega(t) - p.omega(t)).abs() < 1e-10);
        }
        assert!(g.check_consistency(1e-6).is_ok());
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(read_protocol_csv("t,omega\n0,1\n".as_bytes()).is_err());
        assert!(read_protocol_csv("t,omega,omega_dot,mu\n0,5,0,0\n".as_bytes()).is_err());
        assert!(read_protocol_csv(
            "t,omega,omega_dot,mu\n0,5,0,0\n0.3,5,0,0\n1,5,0,0\n".as_bytes()
        )
        .is_err());
        assert!(read_protocol_csv("t,omega,omega_dot,mu\n0,5,0,0\n1,x,0,0\n".as_bytes()).is_err());
    }
}
