//! Length-prefixed binary framing.
//!
//! ```text
//! u32 BE  length of everything after this field
//! u8      version (1)
//! u8      value tag (0 double, 1 text, 2 binary)
//! f64 BE  timestamp
//! u8      key length,    key bytes (UTF-8, non-empty)
//! u16 BE  source length, source bytes (UTF-8)
//! u32 BE  value length,  value bytes
//! ```

use std::io::Read;

pub const VERSION: u8 = 1;
pub const MAX_FRAME: usize = 64 * 1024;
const HEADER: usize = 4 + 1 + 1 + 8;

#[derive(Debug, Clone, PartialEq)]
pub enum WireValue {
    Double(f64),
    Text(String),
    Binary(Vec<u8>),
}

impl WireValue {
    fn tag(&self) -> u8 {
        match self {
            WireValue::Double(_) => 0,
            WireValue::Text(_) => 1,
            WireValue::Binary(_) => 2,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            WireValue::Double(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            WireValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WireMessage {
    pub timestamp: f64,
    pub key: String,
    pub value: WireValue,
    pub source: String,
}

impl WireMessage {
    pub fn double(timestamp: f64, key: &str, v: f64, source: &str) -> Self {
        WireMessage {
            timestamp,
            key: key.to_string(),
            value: WireValue::Double(v),
            source: source.to_string(),
        }
    }

    pub fn text(timestamp: f64, key: &str, v: &str, source: &str) -> Self {
        WireMessage {
            timestamp,
            key: key.to_string(),
            value: WireValue::Text(v.to_string()),
            source: source.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("empty key")]
    EmptyKey,
    #[error("key longer than 255 bytes")]
    KeyTooLong,
    #[error("source longer than 65535 bytes")]
    SourceTooLong,
    #[error("frame of {0} bytes exceeds limit")]
    TooLarge(usize),
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("unknown value tag {0}")]
    Tag(u8),
    #[error("truncated frame, need {0} more bytes")]
    Truncated(usize),
    #[error("malformed frame: {0}")]
    Malformed(&'static str),
}

pub fn encode(m: &WireMessage) -> Result<Vec<u8>, WireError> {
    if m.key.is_empty() {
        return Err(WireError::EmptyKey);
    }
    if m.key.len() > u8::MAX as usize {
        return Err(WireError::KeyTooLong);
    }
    if m.source.len() > u16::MAX as usize {
        return Err(WireError::SourceTooLong);
    }
    let payload: std::borrow::Cow<[u8]> = match &m.value {
        WireValue::Double(v) => v.to_be_bytes().to_vec().into(),
        WireValue::Text(s) => s.as_bytes().into(),
        WireValue::Binary(b) => b.as_slice().into(),
    };
    let total = HEADER + 1 + m.key.len() + 2 + m.source.len() + 4 + payload.len();
    if total > MAX_FRAME {
        return Err(WireError::TooLarge(total));
    }
    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&((total - 4) as u32).to_be_bytes());
    out.push(VERSION);
    out.push(m.value.tag());
    out.extend_from_slice(&m.timestamp.to_be_bytes());
    out.push(m.key.len() as u8);
    out.extend_from_slice(m.key.as_bytes());
    out.extend_from_slice(&(m.source.len() as u16).to_be_bytes());
    out.extend_from_slice(m.source.as_bytes());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        let end = self.pos.checked_add(n).ok_or(WireError::Malformed("length overflow"))?;
        let s = self.buf.get(self.pos..end).ok_or(WireError::Malformed("field overruns frame"))?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }
}

fn utf8(b: &[u8]) -> Result<String, WireError> {
    String::from_utf8(b.to_vec()).map_err(|_| WireError::Malformed("invalid UTF-8"))
}

/// Decodes one frame from the front of `buf`, returning it and the bytes consumed.
/// A short buffer yields [`WireError::Truncated`] so callers can read more.
pub fn decode(buf: &[u8]) -> Result<(WireMessage, usize), WireError> {
    if buf.len() < 4 {
        return Err(WireError::Truncated(4 - buf.len()));
    }
    let len = u32::from_be_bytes([buf[0], buf[1], buf[2], buf[3]]) as usize;
    let total = len.saturating_add(4);
    if total > MAX_FRAME {
        return Err(WireError::TooLarge(total));
    }
    if buf.len() < total {
        return Err(WireError::Truncated(total - buf.len()));
    }
    let mut c = Cursor {
        buf: &buf[..total],
        pos: 4,
    };
    let version = c.u8()?;
    if version != VERSION {
        return Err(WireError::Version(version));
    }
    let tag = c.u8()?;
    if tag > 2 {
        return Err(WireError::Tag(tag));
    }
    let ts = f64::from_be_bytes(c.take(8)?.try_into().expect("8 bytes"));
    let klen = c.u8()? as usize;
    if klen == 0 {
        return Err(WireError::EmptyKey);
    }
    let key = utf8(c.take(klen)?)?;
    let slen = u16::from_be_bytes(c.take(2)?.try_into().expect("2 bytes")) as usize;
    let source = utf8(c.take(slen)?)?;
    let vlen = u32::from_be_bytes(c.take(4)?.try_into().expect("4 bytes")) as usize;
    let raw = c.take(vlen)?;
    if c.pos != total {
        return Err(WireError::Malformed("trailing bytes in frame"));
    }
    let value = match tag {
        0 => WireValue::Double(f64::from_be_bytes(
            raw.try_into().map_err(|_| WireError::Malformed("double payload not 8 bytes"))?,
        )),
        1 => WireValue::Text(utf8(raw)?),
        _ => WireValue::Binary(raw.to_vec()),
    };
    Ok((
        WireMessage {
            timestamp: ts,
            key,
            value,
            source,
        },
        total,
    ))
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// Blocking read of exactly one frame.
pub fn read_frame<R: Read>(r: &mut R) -> Result<WireMessage, ReadError> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let n = u32::from_be_bytes(len) as usize;
    if n.saturating_add(4) > MAX_FRAME {
        return Err(WireError::TooLarge(n.saturating_add(4)).into());
    }
    let mut buf = vec![0u8; n + 4];
    buf[..4].copy_from_slice(&len);
    r.read_exact(&mut buf[4..])?;
    Ok(decode(&buf)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nav_x_round_trip() {
        let m = WireMessage::double(0.0, "NAV_X", 0.0, "");
        let b = encode(&m).unwrap();
        assert_eq!(decode(&b).unwrap(), (m, b.len()));
    }

    #[test]
    fn frame_layout_is_fixed() {
        let m = WireMessage::double(1.0, "K", 2.0, "s");
        let b = encode(&m).unwrap();
        let mut want = vec![0, 0, 0, 27, 1, 0];
        want.extend_from_slice(&1f64.to_be_bytes());
        want.extend_from_slice(&[1, b'K', 0, 1, b's', 0, 0, 0, 8]);
        want.extend_from_slice(&2f64.to_be_bytes());
        assert_eq!(b, want);
    }

    #[test]
    fn empty_key_rejected() {
        assert_eq!(encode(&WireMessage::double(0.0, "", 1.0, "")), Err(WireError::EmptyKey));
    }

    #[test]
    fn oversize_rejected() {
        let m = WireMessage {
            timestamp: 0.0,
            key: "BLOB".into(),
            value: WireValue::Binary(vec![0; MAX_FRAME]),
            source: String::new(),
        };
        assert!(matches!(encode(&m), Err(WireError::TooLarge(_))));
    }

    #[test]
    fn every_prefix_is_truncated() {
        let b = encode(&WireMessage::text(3.5, "NAV_STATUS", "OK", "nav")).unwrap();
        for i in 0..b.len() {
            assert!(matches!(decode(&b[..i]), Err(WireError::Truncated(_))));
        }
    }

    #[test]
    fn bad_version_and_tag() {
        let mut b = encode(&WireMessage::double(0.0, "A", 1.0, "")).unwrap();
        b[4] = 2;
        assert_eq!(decode(&b).unwrap_err(), WireError::Version(2));
        b[4] = 1;
        b[5] = 7;
        assert_eq!(decode(&b).unwrap_err(), WireError::Tag(7));
    }
}
