use super::{GateInstance, NetId, Netlist, Port};

/// Incremental netlist construction with dense, construction-ordered ids.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    netlist: Netlist,
    const0: Option<NetId>,
    const1: Option<NetId>,
}

impl NetlistBuilder {
    pub fn new(width: usize) -> Self {
        NetlistBuilder {
            netlist: Netlist {
                width,
                ..Netlist::default()
            },
            const0: None,
            const1: None,
        }
    }

    /// Starts an adder netlist, returning the `a`, `b` and `cin` port nets.
    pub fn adder(width: usize) -> (Self, Vec<NetId>, Vec<NetId>, NetId) {
        let mut b = NetlistBuilder::new(width);
        let a = b.add_input_port("a", width);
        let bb = b.add_input_port("b", width);
        let cin = b.add_input_port("cin", 1)[0];
        (b, a, bb, cin)
    }

    pub fn new_net(&mut self) -> NetId {
        let id = NetId(self.netlist.net_count as u32);
        self.netlist.net_count += 1;
        id
    }

    pub fn add_input_port(&mut self, name: &str, bits: usize) -> Vec<NetId> {
        let nets: Vec<NetId> = (0..bits).map(|_| self.new_net()).collect();
        self.netlist.inputs.push(Port {
            name: name.to_string(),
            nets: nets.clone(),
        });
        nets
    }

    pub fn add_output_port(&mut self, name: &str, nets: Vec<NetId>) {
        self.netlist.outputs.push(Port {
            name: name.to_string(),
            nets,
        });
    }

    /// Shared constant tie net for `value`.
    pub fn constant(&mut self, value: bool) -> NetId {
        let cached = if value { self.const1 } else { self.const0 };
        if let Some(net) = cached {
            return net;
        }
        let net = self.new_net();
        self.netlist.constants.push((net, value));
        if value {
            self.const1 = Some(net);
        } else {
            self.const0 = Some(net);
        }
        net
    }

    /// Instantiates `cell` with fresh output nets.
    pub fn gate(&mut self, cell: &str, inputs: &[NetId], n_outputs: usize) -> Vec<NetId> {
        let outputs: Vec<NetId> = (0..n_outputs).map(|_| self.new_net()).collect();
        self.netlist.gates.push(GateInstance {
            cell: cell.to_string(),
            inputs: inputs.to_vec(),
            outputs: outputs.clone(),
        });
        outputs
    }

    pub fn gate1(&mut self, cell: &str, inputs: &[NetId]) -> NetId {
        self.gate(cell, inputs, 1)[0]
    }

    pub fn label(&mut self, name: impl Into<String>, net: NetId) {
        self.netlist.labels.push((name.into(), net));
    }

    pub fn gate_count(&self) -> usize {
        self.netlist.gates.len()
    }

    pub fn finish(self) -> Netlist {
        self.netlist
    }

    /// Finishes an adder netlist with `sum` and `cout` output ports.
    pub fn finish_adder(mut self, sum: Vec<NetId>, cout: NetId) -> Netlist {
        self.add_output_port("sum", sum);
        self.add_output_port("cout", vec![cout]);
        self.netlist
    }
}
