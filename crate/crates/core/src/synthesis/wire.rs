//! Binary body format used by the external denoiser backend.
//!
//! ```text
//! magic      4 bytes  "MFWT"
//! version    u16      1
//! meta_len   u32      length of the JSON metadata that follows
//! meta       utf-8 JSON object
//! count      u16      number of tensors
//! per tensor:
//!   name_len u16, name utf-8
//!   ndim     u8, dims u32 x ndim
//!   data     f32 x product(dims)
//! ```
//!
//! Every integer and float is little-endian; tensors are row-major.

use serde_json::Value;

pub const MAGIC: &[u8; 4] = b"MFWT";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub dims: Vec<u32>,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn new(name: &str, dims: Vec<u32>, data: Vec<f32>) -> Self {
        debug_assert_eq!(dims.iter().map(|&d| d as usize).product::<usize>(), data.len());
        Self { name: name.to_string(), dims, data }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub meta: Value,
    pub tensors: Vec<Tensor>,
}

impl Message {
    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }
}

pub fn encode(msg: &Message) -> Vec<u8> {
    let meta = serde_json::to_vec(&msg.meta).expect("metadata serializes");
    let mut out = Vec::with_capacity(16 + meta.len() + msg.tensors.iter().map(|t| 4 * t.data.len() + 32).sum::<usize>());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(&meta);
    out.extend_from_slice(&(msg.tensors.len() as u16).to_le_bytes());
    for t in &msg.tensors {
        out.extend_from_slice(&(t.name.len() as u16).to_le_bytes());
        out.extend_from_slice(t.name.as_bytes());
        out.push(t.dims.len() as u8);
        for d in &t.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for v in &t.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| {
            format!("truncated body: need {n} bytes at offset {}, have {}", self.pos, self.buf.len() - self.pos)
        })?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, String> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, String> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

pub fn decode(buf: &[u8]) -> Result<Message, String> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err("bad magic".into());
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let meta_len = r.u32()? as usize;
    let meta: Value = serde_json::from_slice(r.take(meta_len)?).map_err(|e| format!("metadata: {e}"))?;
    let count = r.u16()?;
    let mut tensors = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let name_len = r.u16()? as usize;
        let name = String::from_utf8(r.take(name_len)?.to_vec()).map_err(|_| "tensor name is not utf-8".to_string())?;
        let ndim = r.u8()?;
        let dims = (0..ndim).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
        let len = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d as usize)).ok_or("tensor too large")?;
        let bytes = r.take(len.checked_mul(4).ok_or("tensor too large")?)?;
        let data = bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
        tensors.push(Tensor { name, dims, data });
    }
    if r.pos != buf.len() {
        return Err(format!("{} trailing bytes", buf.len() - r.pos));
    }
    Ok(Message { meta, tensors })
}
