use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};

/// Party index, zero-based; displayed one-based as `agency-1`, `agency-2`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgencyId(pub usize);

impl fmt::Display for AgencyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agency-{}", self.0 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub round: u32,
    pub sender: AgencyId,
    pub receiver: AgencyId,
    pub kind: &'static str,
    pub payload: Vec<u8>,
}

/// Ordered in-process channel between agencies. Every message is logged;
/// the dump only records sizes, payloads stay in memory for audits.
#[derive(Debug, Default)]
pub struct Bus {
    log: Vec<Message>,
    inbox: Vec<VecDeque<usize>>,
    round: u32,
}

impl Bus {
    pub fn new(parties: usize) -> Self {
        Self {
            log: Vec::new(),
            inbox: vec![VecDeque::new(); parties],
            round: 0,
        }
    }

    pub fn parties(&self) -> usize {
        self.inbox.len()
    }

    /// Start the next protocol round.
    pub fn next_round(&mut self) -> u32 {
        self.round += 1;
        self.round
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn send(&mut self, sender: AgencyId, receiver: AgencyId, kind: &'static str, payload: Vec<u8>) {
        self.inbox[receiver.0].push_back(self.log.len());
        self.log.push(Message {
            round: self.round,
            sender,
            receiver,
            kind,
            payload,
        });
    }

    /// Next undelivered message for `receiver`, which must be of `kind`.
    pub fn recv(&mut self, receiver: AgencyId, kind: &'static str) -> Result<&[u8], super::MpcError> {
        let idx = self.inbox[receiver.0]
            .pop_front()
            .ok_or_else(|| super::MpcError::Protocol(format!("{receiver} expected {kind}, inbox empty")))?;
        let msg = &self.log[idx];
        if msg.kind != kind {
            return Err(super::MpcError::Protocol(format!(
                "{receiver} expected {kind}, got {} from {}",
                msg.kind, msg.sender
            )));
        }
        Ok(&msg.payload)
    }

    pub fn messages(&self) -> &[Message] {
        &self.log
    }

    /// Messages `party` sent or received.
    pub fn view_of(&self, party: AgencyId) -> impl Iterator<Item = &Message> + '_ {
        self.log.iter().filter(move |m| m.sender == party || m.receiver == party)
    }

    pub fn total_bytes(&self) -> usize {
        self.log.iter().map(|m| m.payload.len()).sum()
    }

    /// `round,sender,receiver,message-type,byte-length` per message.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for m in &self.log {
            writeln!(out, "{},{},{},{},{}", m.round, m.sender, m.receiver, m.kind, m.payload.len())?;
        }
        Ok(())
    }
}

pub(crate) fn encode_u64s(values: &[u64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub(crate) fn decode_u64s(bytes: &[u8]) -> Vec<u64> {
    bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect()
}

/// Length-prefixed big-endian integers.
pub(crate) fn encode_bigs(values: &[num_bigint::BigUint]) -> Vec<u8> {
    let mut out = Vec::new();
    for v in values {
        let b = v.to_bytes_be();
        out.extend_from_slice(&(b.len() as u32).to_le_bytes());
        out.extend_from_slice(&b);
    }
    out
}

pub(crate) fn decode_bigs(mut bytes: &[u8]) -> Vec<num_bigint::BigUint> {
    let mut out = Vec::new();
    while bytes.len() >= 4 {
        let len = u32::from_le_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
        out.push(num_bigint::BigUint::from_bytes_be(&bytes[4..4 + len]));
        bytes = &bytes[4 + len..];
    }
    out
}
