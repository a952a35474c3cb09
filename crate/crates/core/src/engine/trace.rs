// SPDX-License-Identifier: Apache-2.0

//! Counterexample traces: replay against a netlist and TSV/VCD rendering.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::netlist::{Netlist, NetlistError, NodeRef, Simulator};

/// Input values per cycle, columns in `inputs` order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub inputs: Vec<String>,
    pub steps: Vec<Vec<bool>>,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace has no value for input `{0}`")]
    MissingInput(String),
    #[error("trace names input `{0}`, which the model does not have")]
    UnknownInput(String),
    #[error("trace line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("trace is empty")]
    Empty,
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Clone, Debug)]
pub struct Replay {
    /// Node values of every cycle.
    pub values: Vec<Vec<bool>>,
    /// First cycle at which a constraint was violated, if any.
    pub constraint_violation: Option<usize>,
    /// Bads asserted in the last cycle.
    pub bads_fired: Vec<String>,
}

impl Replay {
    pub fn value(&self, cycle: usize, r: NodeRef) -> bool {
        self.values[cycle][r.index()] ^ r.is_negated()
    }

    /// Valid counterexample: constraints held throughout and a bad fired at the end.
    pub fn is_counterexample(&self) -> bool {
        self.constraint_violation.is_none() && !self.bads_fired.is_empty()
    }
}

impl Trace {
    /// Index of the last cycle.
    pub fn depth(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn replay(&self, netlist: &Netlist) -> Result<Replay, TraceError> {
        if self.steps.is_empty() {
            return Err(TraceError::Empty);
        }
        let col: HashMap<&str, usize> = self.inputs.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        for name in &self.inputs {
            if netlist.input(name).is_none() {
                return Err(TraceError::UnknownInput(name.clone()));
            }
        }
        let order: Vec<usize> = netlist
            .inputs()
            .iter()
            .map(|&i| {
                let name = netlist.input_name(i).unwrap_or_default();
                col.get(name).copied().ok_or_else(|| TraceError::MissingInput(name.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let mut sim = Simulator::new(netlist)?;
        let mut values = Vec::with_capacity(self.steps.len());
        let mut violation = None;
        for (t, step) in self.steps.iter().enumerate() {
            let ins: Vec<bool> = order.iter().map(|&c| step[c]).collect();
            sim.step(&ins);
            if violation.is_none() && netlist.constraints().iter().any(|&c| !sim.value(c)) {
                violation = Some(t);
            }
            values.push(sim.values().to_vec());
        }
        let bads_fired =
            netlist.bads().iter().filter(|(_, b)| sim.value(*b)).map(|(n, _)| n.clone()).collect();
        Ok(Replay { values, constraint_violation: violation, bads_fired })
    }
}

/// Bus values per cycle (MSB-first bits packed into integers).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Waveform {
    pub signals: Vec<(String, usize)>,
    pub values: Vec<Vec<u128>>,
}

pub fn waveform(replay: &Replay, signals: &BTreeMap<String, Vec<NodeRef>>) -> Waveform {
    let signals: Vec<(&String, &Vec<NodeRef>)> = signals.iter().filter(|(_, v)| !v.is_empty()).collect();
    let sigs: Vec<(String, usize)> = signals.iter().map(|(k, v)| ((*k).clone(), v.len())).collect();
    let values = (0..replay.values.len())
        .map(|t| {
            signals
                .iter()
                .map(|(_, bits)| bits)
                .map(|bits| bits.iter().fold(0u128, |acc, &b| acc << 1 | replay.value(t, b) as u128))
                .collect()
        })
        .collect();
    Waveform { signals: sigs, values }
}

pub const TSV_MAGIC: &str = "# lichk trace v1";

/// Tab-separated trace: a header line with `key=value` fields, a column
/// line (`in:` columns are replayable inputs, `sig:` columns are observed
/// signals), then one row per cycle.
pub fn to_tsv(header: &[(String, String)], trace: &Trace, wave: &Waveform) -> String {
    let mut s = String::from(TSV_MAGIC);
    for (k, v) in header {
        s.push_str(&format!(" {k}={v}"));
    }
    s.push('\n');
    let mut cols = vec!["cycle".to_string()];
    cols.extend(trace.inputs.iter().map(|n| format!("in:{n}")));
    cols.extend(wave.signals.iter().map(|(n, _)| format!("sig:{n}")));
    s.push_str(&cols.join("\t"));
    s.push('\n');
    for (t, step) in trace.steps.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(step.iter().map(|&b| (b as u8).to_string()));
        if let Some(vals) = wave.values.get(t) {
            row.extend(vals.iter().map(|v| v.to_string()));
        }
        s.push_str(&row.join("\t"));
        s.push('\n');
    }
    s
}

/// Parses a TSV trace back into its header fields and input columns.
pub fn parse_tsv(text: &str) -> Result<(BTreeMap<String, String>, Trace), TraceError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let syntax = |line: usize, msg: &str| TraceError::Syntax { line: line + 1, msg: msg.to_string() };
    let (ln, first) = lines.next().ok_or(TraceError::Empty)?;
    let rest = first.strip_prefix(TSV_MAGIC).ok_or_else(|| syntax(ln, "not a lichk trace"))?;
    let mut header = BTreeMap::new();
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| syntax(ln, "header field without `=`"))?;
        header.insert(k.to_string(), v.to_string());
    }
    let mut lines = lines.filter(|(_, l)| !l.starts_with('#'));
    let (ln, cols) = lines.next().ok_or_else(|| syntax(ln, "missing column line"))?;
    let cols: Vec<&str> = cols.split('\t').collect();
    if cols.first() != Some(&"cycle") {
        return Err(syntax(ln, "first column must be `cycle`"));
    }
    let input_cols: Vec<(usize, String)> =
        cols.iter().enumerate().filter_map(|(i, c)| c.strip_prefix("in:").map(|n| (i, n.to_string()))).collect();
    let mut trace = Trace { inputs: input_cols.iter().map(|(_, n)| n.clone()).collect(), steps: Vec::new() };
    for (ln, row) in lines {
        let f: Vec<&str> = row.split('\t').collect();
        if f.len() != cols.len() {
            return Err(syntax(ln, "row has the wrong number of columns"));
        }
        if f[0].parse::<usize>().ok() != Some(trace.steps.len()) {
            return Err(syntax(ln, "cycle numbers must count up from 0"));
        }
        let step = input_cols
            .iter()
            .map(|&(i, _)| match f[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(syntax(ln, "input values must be 0 or 1")),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        trace.steps.push(step);
    }
    if trace.steps.is_empty() {
        return Err(TraceError::Empty);
    }
    Ok((header, trace))
}

fn vcd_id(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'!' + (i % 94) as u8) as char);
        i /= 94;
        if i == 0 {
            break s;
        }
        i -= 1;
    }
}

pub fn to_vcd(trace: &Trace, wave: &Waveform) -> String {
    let mut s = String::from("$date lichk $end\n$timescale 1 ns $end\n$scope module top $end\n");
    let mut vars: Vec<(String, usize)> = trace.inputs.iter().map(|n| (n.clone(), 1)).collect();
    vars.extend(wave.signals.iter().cloned());
    for (i, (name, w)) in vars.iter().enumerate() {
        let name = name.replace(' ', "_");
        s.push_str(&format!("$var wire {w} {} {name} $end\n", vcd_id(i)));
    }
    s.push_str("$upscope $end\n$enddefinitions $end\n");
    for (t, step) in trace.steps.iter().enumerate() {
        s.push_str(&format!("#{t}\n"));
        let wave_vals = wave.values.get(t).map(|v| v.as_slice()).unwrap_or(&[]);
        let vals = step.iter().map(|&b| b as u128).chain(wave_vals.iter().copied());
        for (i, (v, (_, w))) in vals.zip(&vars).enumerate() {
            if *w == 1 {
                s.push_str(&format!("{v}{}\n", vcd_id(i)));
            } else {
                s.push_str(&format!("b{v:b} {}\n", vcd_id(i)));
            }
        }
    }
    s.push_str(&format!("#{}\n", trace.steps.len()));
    s
}
