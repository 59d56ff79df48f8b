//! Blocklace persistence: one JSON block per line, in receipt order.
//!
//! Loading replays the lines through [`Blocklace::accept`], so a snapshot is
//! only as good as its blocks: anything tampered with fails signature
//! verification on the way back in.

use std::io::{BufRead, Write};

use crate::block::Block;
use crate::error::LaceError;
use crate::lace::{AcceptStatus, Blocklace, LaceConfig};

/// Write every accepted block as a line of JSON, receipt order.
pub fn write_snapshot<W: Write>(lace: &Blocklace, mut out: W) -> Result<(), LaceError> {
    for block in lace.receipt_order() {
        let line = serde_json::to_string(block)
            .map_err(|e| LaceError::Malformed(format!("encode: {e}")))?;
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| LaceError::Malformed(format!("write: {e}")))?;
    }
    Ok(())
}

/// Rebuild a blocklace by re-accepting each line under `config`.
///
/// Fails on unparsable lines and on blocks the acceptance rules refuse;
/// out-of-order lines are fine because acceptance buffers them.
pub fn load_snapshot<R: BufRead>(config: LaceConfig, input: R) -> Result<Blocklace, LaceError> {
    let mut lace = Blocklace::new(config)?;
    for (no, line) in input.lines().enumerate() {
        let line = line.map_err(|e| LaceError::Malformed(format!("read: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let block: Block = serde_json::from_str(&line)
            .map_err(|e| LaceError::Malformed(format!("line {}: {e}", no + 1)))?;
        let hash = block.hash;
        let out = lace.accept(block);
        match out.status {
            AcceptStatus::Accepted | AcceptStatus::Pending | AcceptStatus::Duplicate => {}
            other => {
                return Err(LaceError::Malformed(format!(
                    "line {}: block {} not accepted: {:?}",
                    no + 1,
                    hash,
                    other
                )));
            }
        }
    }
    if lace.pending_len() > 0 {
        return Err(LaceError::Malformed(format!(
            "{} blocks still waiting for missing predecessors",
            lace.pending_len()
        )));
    }
    Ok(lace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::Crypto;
    use crate::types::{AgentId, Payment, Pointer};

    #[test]
    fn round_trip_preserves_every_block_and_flag() {
        let config = LaceConfig::uniform(4, 1, Crypto::Sha256, 10);
        let mut lace = Blocklace::new(config.clone()).unwrap();
        let g0 = Block::initial(Crypto::Sha256, AgentId(0), 10).unwrap();
        let g1 = Block::initial(Crypto::Sha256, AgentId(1), 10).unwrap();
        lace.accept(g0.clone());
        lace.accept(g1.clone());
        let p = Block::new(
            Crypto::Sha256,
            AgentId(0),
            vec![
                Pointer::spend(g0.hash, AgentId(0)),
                Pointer::observe(g1.hash, AgentId(1)),
            ],
            vec![Payment::new(AgentId(1), 4), Payment::new(AgentId(0), 6)],
        )
        .unwrap();
        lace.accept(p.clone());

        let mut buf = Vec::new();
        write_snapshot(&lace, &mut buf).unwrap();
        let restored = load_snapshot(config, buf.as_slice()).unwrap();

        assert_eq!(restored.len(), lace.len());
        for block in lace.receipt_order() {
            assert!(restored.contains(&block.hash));
        }
        assert_eq!(restored.roots(), lace.roots());
        assert_eq!(
            restored.observes(&p.hash, &g1.hash).unwrap(),
            lace.observes(&p.hash, &g1.hash).unwrap()
        );
    }

    #[test]
    fn tampered_lines_are_refused() {
        let config = LaceConfig::uniform(4, 1, Crypto::Sha256, 10);
        let mut lace = Blocklace::new(config.clone()).unwrap();
        let g0 = Block::initial(Crypto::Sha256, AgentId(0), 10).unwrap();
        lace.accept(g0);
        let mut buf = Vec::new();
        write_snapshot(&lace, &mut buf).unwrap();
        let tampered = String::from_utf8(buf).unwrap().replace("\"amount\":10", "\"amount\":12");
        assert!(load_snapshot(config, tampered.as_bytes()).is_err());
    }
}
