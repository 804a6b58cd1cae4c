//! CSV assembly: '.' decimal separator, 17 significant digits, LF line
//! endings, one header row, comment lines prefixed '#'. Output is built in
//! memory and written in one piece so repeated runs are byte-identical.

use std::path::Path;

use crate::run::Failure;

/// A float with enough digits to survive a parse round-trip.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    text: String,
}

impl Table {
    pub fn new() -> Table {
        Table { text: String::new() }
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn header(&mut self, columns: &str) {
        self.text.push_str(columns);
        self.text.push('\n');
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    /// Writes to the path, or stdout when none is given.
    pub fn write(self, out: Option<&Path>) -> Result<(), Failure> {
        match out {
            Some(path) => std::fs::write(path, self.text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{}", self.text);
                Ok(())
            }
        }
    }
}
