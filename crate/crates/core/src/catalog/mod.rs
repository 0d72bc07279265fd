//! Machine calibration data: the file catalog, synthetic generation, and
//! property selection with replayable snippets.

mod generate;
mod machine;
mod select;

pub use generate::{generate_machine, GenerateError, Topology, SYNTHETIC_CALIBRATION_TIME};
pub use machine::{
    load_catalog, parse_machine, write_machine, Catalog, CatalogError, FileReport, GateProperties,
    MachineProperties, MachineStatus, QubitProperties, MACHINE_FILE_SUFFIX,
};
pub use select::{
    emit_property_snippet, select_properties, GateField, PathError, PropertyPath, PropertySelection,
    QubitField, SelectionEntry, StatusField,
};
