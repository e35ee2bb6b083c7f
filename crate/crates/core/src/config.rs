//! The algorithmic search space: container, traversal, layout, Newton-3 and
//! cell size factor.
//!
//! Configurations print as `<container>-<traversal>-<N3L|NoN3L>-<AoS|SoA>[-CSF<f>]`,
//! e.g. `LC-C08-N3L-SoA-CSF1` or `VL-List_Iter-NoN3L-AoS`. Verlet-list
//! configurations omit the cell size factor, which is fixed to 1.

use crate::error::{Error, Result};
use crate::particles::Layout;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContainerKind {
    LinkedCells,
    VerletLists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraversalKind {
    ListIter,
    C01,
    C08,
    C18,
    Sliced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellSizeFactor {
    Half,
    One,
}

impl CellSizeFactor {
    pub fn value(self) -> f64 {
        match self {
            CellSizeFactor::Half => 0.5,
            CellSizeFactor::One => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub container: ContainerKind,
    pub traversal: TraversalKind,
    pub layout: Layout,
    pub newton3: bool,
    pub csf: CellSizeFactor,
}

impl Configuration {
    pub fn linked_cells(traversal: TraversalKind, layout: Layout, newton3: bool, csf: CellSizeFactor) -> Self {
        Configuration { container: ContainerKind::LinkedCells, traversal, layout, newton3, csf }
    }

    pub fn verlet_lists(layout: Layout) -> Self {
        Configuration {
            container: ContainerKind::VerletLists,
            traversal: TraversalKind::ListIter,
            layout,
            newton3: false,
            csf: CellSizeFactor::One,
        }
    }

    /// Checks the container/traversal/Newton-3 compatibility rules.
    pub fn validate(&self) -> Result<()> {
        use TraversalKind::*;
        let fail = |why: &str| Err(Error::UnsupportedConfiguration(format!("{self}: {why}")));
        match (self.container, self.traversal) {
            (ContainerKind::VerletLists, ListIter) => {
                if self.csf != CellSizeFactor::One {
                    return fail("Verlet lists use a cell size factor of 1");
                }
            }
            (ContainerKind::VerletLists, _) => return fail("Verlet lists only support List_Iter"),
            (ContainerKind::LinkedCells, ListIter) => return fail("List_Iter requires Verlet lists"),
            (ContainerKind::LinkedCells, _) => {}
        }
        if self.newton3 && matches!(self.traversal, ListIter | C01) {
            return fail("traversal does not support Newton-3");
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

impl fmt::Display for ContainerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContainerKind::LinkedCells => "LC",
            ContainerKind::VerletLists => "VL",
        })
    }
}

impl fmt::Display for TraversalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraversalKind::ListIter => "List_Iter",
            TraversalKind::C01 => "C01",
            TraversalKind::C08 => "C08",
            TraversalKind::C18 => "C18",
            TraversalKind::Sliced => "SLI",
        })
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{}-{}-{}",
            self.container,
            self.traversal,
            if self.newton3 { "N3L" } else { "NoN3L" },
            self.layout
        )?;
        if self.container == ContainerKind::LinkedCells {
            match self.csf {
                CellSizeFactor::Half => f.write_str("-CSF0.5")?,
                CellSizeFactor::One => f.write_str("-CSF1")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::ParseConfiguration(s.to_string());
        let parts: Vec<&str> = s.trim().split('-').collect();
        if parts.len() != 4 && parts.len() != 5 {
            return Err(err());
        }
        let container = match parts[0] {
            "LC" => ContainerKind::LinkedCells,
            "VL" => ContainerKind::VerletLists,
            _ => return Err(err()),
        };
        let traversal = match parts[1] {
            "List_Iter" => TraversalKind::ListIter,
            "C01" => TraversalKind::C01,
            "C08" => TraversalKind::C08,
            "C18" => TraversalKind::C18,
            "SLI" => TraversalKind::Sliced,
            _ => return Err(err()),
        };
        let newton3 = match parts[2] {
            "N3L" => true,
            "NoN3L" => false,
            _ => return Err(err()),
        };
        let layout = match parts[3] {
            "AoS" => Layout::Aos,
            "SoA" => Layout::Soa,
            _ => return Err(err()),
        };
        let csf = match parts.get(4) {
            None if container == ContainerKind::VerletLists => CellSizeFactor::One,
            None => return Err(err()),
            Some(&"CSF1") | Some(&"CSF1.0") => CellSizeFactor::One,
            Some(&"CSF0.5") => CellSizeFactor::Half,
            Some(_) => return Err(err()),
        };
        let config = Configuration { container, traversal, layout, newton3, csf };
        config.validate()?;
        Ok(config)
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every valid configuration, in a fixed order: linked cells by traversal,
/// Newton-3, layout and cell size factor, followed by Verlet lists.
pub fn enumerate_configurations() -> Vec<Configuration> {
    use TraversalKind::*;
    let mut out = Vec::new();
    for traversal in [C01, C08, C18, Sliced] {
        for newton3 in [false, true] {
            for layout in [Layout::Aos, Layout::Soa] {
                for csf in [CellSizeFactor::Half, CellSizeFactor::One] {
                    let c = Configuration::linked_cells(traversal, layout, newton3, csf);
                    if c.is_valid() {
                        out.push(c);
                    }
                }
            }
        }
    }
    for layout in [Layout::Aos, Layout::Soa] {
        out.push(Configuration::verlet_lists(layout));
    }
    out
}

/// Position of `config` in `space`, if present.
pub fn index_of(space: &[Configuration], config: &Configuration) -> Option<usize> {
    space.iter().position(|c| c == config)
}
