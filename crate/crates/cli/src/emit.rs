//! Deterministic JSON and CSV emission.
//!
//! Floats are always printed with 17 significant digits (`{:.16e}`), object
//! keys keep insertion order, and nothing varies between runs, so identical
//! jobs produce byte-identical artifacts.

use cfclosure_core::sphere::SpherePoint;
use cfclosure_core::C64;

#[derive(Clone, Debug)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn complex(z: C64) -> Json {
        Json::Arr(vec![Json::Num(z.re), Json::Num(z.im)])
    }

    pub fn sphere(p: SpherePoint) -> Json {
        match p {
            SpherePoint::Finite(z) => Json::complex(z),
            SpherePoint::Infinity => Json::Str("inf".into()),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Num(x) => out.push_str(&format_float(*x)),
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            out.push_str(&format!("\\u{:04x}", c as u32));
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.write(out, indent);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                let pad = "  ".repeat(indent + 1);
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push_str(",\n");
                    }
                    out.push_str(&pad);
                    out.push('"');
                    out.push_str(key);
                    out.push_str("\": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

/// 17 significant digits; non-finite values become JSON strings.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".into();
    }
    if x.is_infinite() {
        return if x > 0.0 {
            "\"inf\"".into()
        } else {
            "\"-inf\"".into()
        };
    }
    format!("{x:.16e}")
}

/// CSV cell for one real number: '.' decimal, 17 significant digits,
/// infinities as `inf`.
pub fn csv_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

/// Two CSV cells for a sphere point (`inf,inf` at infinity).
pub fn csv_point(p: SpherePoint) -> String {
    match p {
        SpherePoint::Finite(z) => format!("{},{}", csv_float(z.re), csv_float(z.im)),
        SpherePoint::Infinity => "inf,inf".into(),
    }
}
