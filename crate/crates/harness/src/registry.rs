use std::collections::BTreeMap;

use crate::transcript::{PartyId, Stage};
use crate::HarnessError;

/// Append-only public bulletin board.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    entries: BTreeMap<(Stage, PartyId, String), Vec<u8>>,
}

impl Registry {
    pub fn publish(&mut self, stage: Stage, party: PartyId, label: &str, value: Vec<u8>) -> Result<(), HarnessError> {
        let key = (stage, party, label.to_string());
        if self.entries.contains_key(&key) {
            return Err(HarnessError::Republish { party, label: label.into() });
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn get(&self, stage: Stage, party: PartyId, label: &str) -> Option<&[u8]> {
        self.entries.get(&(stage, party, label.to_string())).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Stage, PartyId, String), &Vec<u8>)> {
        self.entries.iter()
    }
}
