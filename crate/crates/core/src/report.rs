//! Schema-versioned JSON output with fixed float formatting.
//!
//! Every float is printed with 17 significant digits (`{:.16e}`), which round-trips
//! exactly and does not depend on the shortest-representation algorithm.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::Result;

pub const SCHEMA: &str = "shrinker-spectra/1";

struct FixedFloats<'a>(PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Serializes `body` under `{"schema": .., "command": ..}`.
pub fn to_json_string<T: Serialize>(command: &str, body: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(&mut buf, command, body)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, command: &str, body: &T) -> Result<()> {
    let envelope = Envelope {
        schema: SCHEMA,
        command,
        body,
    };
    let mut ser = Serializer::with_formatter(&mut w, FixedFloats(PrettyFormatter::with_indent(b"  ")));
    envelope.serialize(&mut ser)?;
    writeln!(w)?;
    Ok(())
}
