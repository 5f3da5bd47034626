//! Line-oriented netlist text format.
//!
//! ```text
//! adderlab-netlist 1
//! width 1
//! nets 5
//! input a 0
//! input b 1
//! input cin 2
//! output sum 3
//! output cout 4
//! label g0.cout 4
//! gate 0 FA 0 1 2 -> 3 4
//! ```
//!
//! Records may appear in any order after the header except that gate ids
//! must be consecutive from 0. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{GateInstance, NetId, Netlist, Port};

const MAGIC: &str = "adderlab-netlist";
const VERSION: &str = "1";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

pub fn write_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    let nets = |nets: &[NetId]| {
        nets.iter()
            .map(|n| n.0.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let line = |out: &mut String, head: String, rest: String| {
        if rest.is_empty() {
            writeln!(out, "{head}").unwrap();
        } else {
            writeln!(out, "{head} {rest}").unwrap();
        }
    };
    writeln!(out, "{MAGIC} {VERSION}").unwrap();
    writeln!(out, "width {}", netlist.width).unwrap();
    writeln!(out, "nets {}", netlist.net_count).unwrap();
    for p in &netlist.inputs {
        line(&mut out, format!("input {}", p.name), nets(&p.nets));
    }
    for p in &netlist.outputs {
        line(&mut out, format!("output {}", p.name), nets(&p.nets));
    }
    for &(net, value) in &netlist.constants {
        writeln!(out, "const {} {}", net.0, u8::from(value)).unwrap();
    }
    for (name, net) in &netlist.labels {
        writeln!(out, "label {name} {}", net.0).unwrap();
    }
    for (id, g) in netlist.gates.iter().enumerate() {
        writeln!(
            out,
            "gate {id} {} {} -> {}",
            g.cell,
            nets(&g.inputs),
            nets(&g.outputs)
        )
        .unwrap();
    }
    out
}

pub fn parse_netlist(text: &str) -> Result<Netlist, FormatError> {
    let mut netlist = Netlist::default();
    let mut saw_header = false;
    let mut saw_width = false;
    let mut saw_nets = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| FormatError {
            line: line_no,
            message,
        };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().unwrap();
        if !saw_header {
            if keyword != MAGIC || tokens.next() != Some(VERSION) {
                return Err(err(format!("expected header `{MAGIC} {VERSION}`")));
            }
            saw_header = true;
            continue;
        }
        let rest: Vec<&str> = tokens.collect();
        match keyword {
            "width" => {
                netlist.width = single_number(&rest).map_err(err)?;
                saw_width = true;
            }
            "nets" => {
                netlist.net_count = single_number(&rest).map_err(err)?;
                saw_nets = true;
            }
            "input" | "output" => {
                let (name, bits) = rest
                    .split_first()
                    .ok_or_else(|| err(format!("{keyword} record needs a port name")))?;
                let port = Port {
                    name: name.to_string(),
                    nets: net_list(bits).map_err(err)?,
                };
                if keyword == "input" {
                    netlist.inputs.push(port);
                } else {
                    netlist.outputs.push(port);
                }
            }
            "const" => {
                let [net, value] = rest[..] else {
                    return Err(err("const record is `const <net> <0|1>`".into()));
                };
                let value = match value {
                    "0" => false,
                    "1" => true,
                    other => return Err(err(format!("invalid constant `{other}`"))),
                };
                netlist
                    .constants
                    .push((parse_net(net).map_err(err)?, value));
            }
            "label" => {
                let [name, net] = rest[..] else {
                    return Err(err("label record is `label <name> <net>`".into()));
                };
                netlist
                    .labels
                    .push((name.to_string(), parse_net(net).map_err(err)?));
            }
            "gate" => {
                if rest.len() < 2 {
                    return Err(err(
                        "gate record is `gate <id> <cell> <in...> -> <out...>`".into()
                    ));
                }
                let id: usize = rest[0]
                    .parse()
                    .map_err(|_| err(format!("invalid gate id `{}`", rest[0])))?;
                if id != netlist.gates.len() {
                    return Err(err(format!(
                        "gate id {id} out of sequence (expected {})",
                        netlist.gates.len()
                    )));
                }
                let arrow = rest
                    .iter()
                    .position(|&t| t == "->")
                    .ok_or_else(|| err("gate record is missing `->`".into()))?;
                if arrow < 2 {
                    return Err(err("gate record is missing a cell name".into()));
                }
                netlist.gates.push(GateInstance {
                    cell: rest[1].to_string(),
                    inputs: net_list(&rest[2..arrow]).map_err(err)?,
                    outputs: net_list(&rest[arrow + 1..]).map_err(err)?,
                });
            }
            other => return Err(err(format!("unknown record `{other}`"))),
        }
    }

    let end = text.lines().count().max(1);
    if !saw_header {
        return Err(FormatError {
            line: end,
            message: "empty netlist file".into(),
        });
    }
    if !saw_width || !saw_nets {
        return Err(FormatError {
            line: end,
            message: "missing `width` or `nets` record".into(),
        });
    }
    Ok(netlist)
}

fn single_number(rest: &[&str]) -> Result<usize, String> {
    match rest {
        [n] => n.parse().map_err(|_| format!("invalid number `{n}`")),
        _ => Err("expected exactly one number".into()),
    }
}

fn parse_net(token: &str) -> Result<NetId, String> {
    token
        .parse::<u32>()
        .map(NetId)
        .map_err(|_| format!("invalid net id `{token}`"))
}

fn net_list(tokens: &[&str]) -> Result<Vec<NetId>, String> {
    tokens.iter().map(|t| parse_net(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::NetlistBuilder;

    #[test]
    fn small_round_trip() {
        let (mut b, a, bb, cin) = NetlistBuilder::adder(1);
        let one = b.constant(true);
        let t = b.gate1("AND2", &[one, cin]);
        let out = b.gate("FA", &[a[0], bb[0], t], 2);
        b.label("carry", out[1]);
        let nl = b.finish_adder(vec![out[0]], out[1]);
        let text = write_netlist(&nl);
        assert_eq!(parse_netlist(&text).unwrap(), nl);
        assert!(text.starts_with("adderlab-netlist 1\n"));
        assert!(text.contains("gate 1 FA 0 1 4 -> 5 6\n"), "{text}");
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_netlist("").unwrap_err().message, "empty netlist file");
        let e =
            parse_netlist("adderlab-netlist 1\nwidth 1\nnets 2\ngate 1 INV 0 -> 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_netlist("adderlab-netlist 1\nwidth 1\nnets 2\nwire 0 1\n").unwrap_err();
        assert!(e.message.contains("unknown record"));
        let e = parse_netlist("adderlab-netlist 1\nwidth x\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_netlist("netlist 2\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\nadderlab-netlist 1\n\nwidth 1\nnets 2 # two nets\ninput x 0\noutput y 1\ngate 0 INV 0 -> 1\n";
        let nl = parse_netlist(text).unwrap();
        assert_eq!(nl.gates.len(), 1);
        assert_eq!(nl.net_count, 2);
    }
}
