use std::collections::VecDeque;

use super::{BridgeError, Message};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Software to hardware.
    In,
    /// Hardware to software.
    Out,
}

/// One message port with its software-side FIFO.
///
/// For an in-port the software proxy is the transmitter: `transmit_ready`
/// is high while the FIFO holds a message and the hardware supplies
/// `receive_ready`. For an out-port the hardware transmits and the software
/// FIFO is always ready to receive.
#[derive(Debug, Clone)]
pub struct PortEndpoint {
    name: String,
    direction: Direction,
    width: usize,
    fifo: VecDeque<Message>,
    transmit_ready: bool,
    receive_ready: bool,
    sent_count: u64,
    delivered_count: u64,
    high_water: usize,
    warned: bool,
    last_edge: Option<u64>,
}

impl PortEndpoint {
    pub fn new(name: impl Into<String>, direction: Direction, width: usize) -> Result<Self, BridgeError> {
        if width == 0 {
            return Err(BridgeError::ZeroWidth);
        }
        Ok(PortEndpoint {
            name: name.into(),
            direction,
            width,
            fifo: VecDeque::new(),
            transmit_ready: false,
            receive_ready: direction == Direction::Out,
            sent_count: 0,
            delivered_count: 0,
            high_water: 1024,
            warned: false,
            last_edge: None,
        })
    }

    pub fn with_high_water(mut self, depth: usize) -> Self {
        self.high_water = depth;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.fifo.len()
    }

    pub fn transmit_ready(&self) -> bool {
        self.transmit_ready
    }

    pub fn receive_ready(&self) -> bool {
        self.receive_ready
    }

    /// Messages accepted from the transmitting side.
    pub fn sent_count(&self) -> u64 {
        self.sent_count
    }

    /// Completed handshakes.
    pub fn delivered_count(&self) -> u64 {
        self.delivered_count
    }

    /// Software side of an in-port: queue a message for delivery.
    pub fn proxy_send(&mut self, msg: Message) -> Result<(), BridgeError> {
        self.expect(Direction::In)?;
        self.check_width(&msg)?;
        self.fifo.push_back(msg);
        self.sent_count += 1;
        self.transmit_ready = true;
        self.watch_depth();
        Ok(())
    }

    /// Software side of an out-port: take the oldest delivered message.
    pub fn proxy_receive(&mut self) -> Option<Message> {
        if self.direction != Direction::Out {
            return None;
        }
        self.fifo.pop_front()
    }

    /// Hardware side of an in-port at uclock edge `uclock`. Delivers the
    /// head of the FIFO iff the FIFO is non-empty and `hw_ready` is high.
    pub fn hw_receive_step(&mut self, uclock: u64, hw_ready: bool) -> Result<Option<Message>, BridgeError> {
        self.expect(Direction::In)?;
        self.mark_edge(uclock)?;
        self.receive_ready = hw_ready;
        if !(self.transmit_ready && self.receive_ready) {
            return Ok(None);
        }
        let msg = self.fifo.pop_front();
        debug_assert!(msg.is_some(), "transmit_ready tracks FIFO occupancy");
        self.transmit_ready = !self.fifo.is_empty();
        self.delivered_count += 1;
        Ok(msg)
    }

    /// Hardware side of an out-port at uclock edge `uclock`. `offer` is the
    /// message the transactor presents (its transmit-ready); returns whether
    /// it was taken.
    pub fn hw_send_step(&mut self, uclock: u64, offer: Option<&Message>) -> Result<bool, BridgeError> {
        self.expect(Direction::Out)?;
        self.mark_edge(uclock)?;
        self.transmit_ready = offer.is_some();
        let Some(msg) = offer else {
            return Ok(false);
        };
        self.check_width(msg)?;
        if !self.receive_ready {
            return Ok(false);
        }
        self.fifo.push_back(msg.clone());
        self.sent_count += 1;
        self.delivered_count += 1;
        self.watch_depth();
        Ok(true)
    }

    fn expect(&self, direction: Direction) -> Result<(), BridgeError> {
        if self.direction != direction {
            return Err(BridgeError::Direction {
                port: self.name.clone(),
            });
        }
        Ok(())
    }

    fn check_width(&self, msg: &Message) -> Result<(), BridgeError> {
        if msg.width() != self.width {
            return Err(BridgeError::Width {
                port: self.name.clone(),
                expected: self.width,
                got: msg.width(),
            });
        }
        Ok(())
    }

    fn mark_edge(&mut self, uclock: u64) -> Result<(), BridgeError> {
        if self.last_edge == Some(uclock) {
            return Err(BridgeError::DoubleStep {
                port: self.name.clone(),
                uclock,
            });
        }
        self.last_edge = Some(uclock);
        Ok(())
    }

    fn watch_depth(&mut self) {
        if !self.warned && self.fifo.len() > self.high_water {
            self.warned = true;
            log::warn!(
                "port `{}` FIFO depth {} exceeds high-water mark {}",
                self.name,
                self.fifo.len(),
                self.high_water
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn byte(v: u64) -> Message {
        Message::from_u64(8, v).unwrap()
    }

    #[test]
    fn send_raises_transmit_ready() {
        let mut p = PortEndpoint::new("in", Direction::In, 8).unwrap();
        p.proxy_send(byte(1)).unwrap();
        assert_eq!(p.depth(), 1);
        assert!(p.transmit_ready());
    }

    #[test]
    fn no_delivery_without_both_ready() {
        let mut p = PortEndpoint::new("in", Direction::In, 8).unwrap();
        assert_eq!(p.hw_receive_step(0, true).unwrap(), None);
        p.proxy_send(byte(7)).unwrap();
        assert_eq!(p.hw_receive_step(1, false).unwrap(), None);
        assert_eq!(p.depth(), 1);
        assert_eq!(p.hw_receive_step(2, true).unwrap(), Some(byte(7)));
        assert!(!p.transmit_ready());
    }

    #[test]
    fn alternating_ready_delivers_on_odd_edges() {
        let mut p = PortEndpoint::new("in", Direction::In, 8).unwrap();
        p.proxy_send(byte(1)).unwrap();
        p.proxy_send(byte(2)).unwrap();
        let mut hits = Vec::new();
        for (u, ready) in [(0, false), (1, true), (2, false), (3, true), (4, false), (5, true)] {
            if let Some(m) = p.hw_receive_step(u, ready).unwrap() {
                hits.push((u, m.to_u64().unwrap()));
            }
        }
        assert_eq!(hits, vec![(1, 1), (3, 2)]);
    }

    #[test]
    fn double_step_is_caught() {
        let mut p = PortEndpoint::new("in", Direction::In, 8).unwrap();
        p.hw_receive_step(4, true).unwrap();
        assert_eq!(
            p.hw_receive_step(4, true),
            Err(BridgeError::DoubleStep {
                port: "in".into(),
                uclock: 4
            })
        );
    }

    #[test]
    fn width_and_direction_checks() {
        let mut p = PortEndpoint::new("in", Direction::In, 8).unwrap();
        assert!(matches!(p.proxy_send(Message::zeros(9).unwrap()), Err(BridgeError::Width { .. })));
        assert!(matches!(p.hw_send_step(0, None), Err(BridgeError::Direction { .. })));
        let mut o = PortEndpoint::new("out", Direction::Out, 4).unwrap();
        assert!(matches!(o.proxy_send(Message::zeros(4).unwrap()), Err(BridgeError::Direction { .. })));
    }

    #[test]
    fn out_port_captures_offers() {
        let mut o = PortEndpoint::new("out", Direction::Out, 8).unwrap();
        assert!(!o.hw_send_step(0, None).unwrap());
        assert!(o.hw_send_step(1, Some(&byte(9))).unwrap());
        assert_eq!(o.delivered_count(), 1);
        assert_eq!(o.proxy_receive(), Some(byte(9)));
        assert_eq!(o.proxy_receive(), None);
    }
}
