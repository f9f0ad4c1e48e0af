use std::collections::BTreeSet;

use super::{Formula, Var};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Forall => Quant::Exists,
            Quant::Exists => Quant::Forall,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub quant: Quant,
    pub vars: Vec<Var>,
}

/// Free variables plus quantifier blocks B_1..B_k, outermost first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BlockStructure {
    pub free_vars: BTreeSet<Var>,
    pub blocks: Vec<Block>,
}

impl BlockStructure {
    /// Extracts the blocks of a prenex formula together with its matrix.
    pub fn of_prenex(f: &Formula) -> Result<(BlockStructure, &Formula)> {
        let mut blocks: Vec<Block> = Vec::new();
        let mut cur = f;
        loop {
            let (q, vs, body) = match cur {
                Formula::Exists(vs, b) => (Quant::Exists, vs, b),
                Formula::Forall(vs, b) => (Quant::Forall, vs, b),
                _ => break,
            };
            match blocks.last_mut() {
                Some(b) if b.quant == q => b.vars.extend(vs.iter().cloned()),
                _ => blocks.push(Block { quant: q, vars: vs.clone() }),
            }
            cur = body;
        }
        if cur.has_quantifier() {
            return Err(Error::NotPrenex);
        }
        let bound: BTreeSet<Var> = blocks.iter().flat_map(|b| b.vars.iter().cloned()).collect();
        let free_vars = f.free_vars().into_iter().filter(|v| !bound.contains(v)).collect();
        Ok((BlockStructure { free_vars, blocks }, cur))
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// 0 for free variables, i for variables of block B_i.
    pub fn level_of(&self, v: &Var) -> Option<usize> {
        if self.free_vars.contains(v) {
            return Some(0);
        }
        self.blocks.iter().position(|b| b.vars.contains(v)).map(|i| i + 1)
    }

    /// Variables of blocks i..=k (1-based).
    pub fn vars_from_level(&self, i: usize) -> BTreeSet<Var> {
        self.blocks.iter().skip(i.saturating_sub(1)).flat_map(|b| b.vars.iter().cloned()).collect()
    }

    /// Free variables first, then block variables in block order.
    pub fn order(&self) -> Vec<Var> {
        self.free_vars
            .iter()
            .cloned()
            .chain(self.blocks.iter().flat_map(|b| b.vars.iter().cloned()))
            .collect()
    }

    /// Quantifier of the block holding `v`; `None` for free variables.
    pub fn quant_of(&self, v: &Var) -> Option<Quant> {
        self.blocks.iter().find(|b| b.vars.contains(v)).map(|b| b.quant)
    }
}

pub fn block_structure_of(f: &Formula) -> Result<BlockStructure> {
    BlockStructure::of_prenex(f).map(|(b, _)| b)
}
