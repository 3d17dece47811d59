//! WAV decoding and z-score normalization.

use serde::{Deserialize, Serialize};

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_IEEE_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Smallest well-formed RIFF/WAVE file: RIFF header, `fmt ` chunk, `data` header.
const MIN_WAV_LEN: usize = 44;

/// Standard deviations at or below this are treated as zero.
pub const MIN_STD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("malformed WAV: {0}")]
    MalformedWav(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("audio has {0} frame(s), need at least 2")]
    EmptyAudio(usize),
    #[error("signal is constant (std {0:e}); z-normalization undefined")]
    DegenerateSignal(f64),
    #[error("sample {0} is not finite")]
    NonFiniteSample(usize),
    #[error("sample rate must be positive")]
    InvalidSampleRate,
}

/// A uniformly sampled mono waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate_hz: u32,
    source_id: String,
}

impl Signal {
    /// Builds a signal, checking length ≥ 2, rate > 0 and finiteness.
    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: u32,
        source_id: impl Into<String>,
    ) -> Result<Self, SignalError> {
        if sample_rate_hz == 0 {
            return Err(SignalError::InvalidSampleRate);
        }
        if samples.len() < 2 {
            return Err(SignalError::EmptyAudio(samples.len()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(SignalError::NonFiniteSample(i));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

struct Format {
    code: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn u16_at(b: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([b[off], b[off + 1]])
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes([b[off], b[off + 1], b[off + 2], b[off + 3]])
}

fn parse_fmt(chunk: &[u8]) -> Result<Format, SignalError> {
    if chunk.len() < 16 {
        return Err(SignalError::MalformedWav(format!(
            "fmt chunk is {} bytes, need 16",
            chunk.len()
        )));
    }
    let mut code = u16_at(chunk, 0);
    if code == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the sub-format GUID,
        // whose first two bytes carry the real format code.
        if chunk.len() < 26 {
            return Err(SignalError::MalformedWav(
                "truncated WAVE_FORMAT_EXTENSIBLE fmt chunk".into(),
            ));
        }
        code = u16_at(chunk, 24);
    }
    Ok(Format {
        code,
        channels: u16_at(chunk, 2),
        sample_rate: u32_at(chunk, 4),
        bits_per_sample: u16_at(chunk, 14),
    })
}

/// Decodes a RIFF/WAVE file (PCM 16-bit or IEEE float 32-bit, mono or
/// stereo) into a mono signal.
///
/// 16-bit samples are scaled by 1/32768; stereo frames are averaged. A
/// `data` chunk whose declared size runs past the end of the input is
/// clamped to the whole frames actually present. The returned signal has an
/// empty `source_id`.
pub fn decode_wav(bytes: &[u8]) -> Result<Signal, SignalError> {
    if bytes.len() < MIN_WAV_LEN {
        return Err(SignalError::MalformedWav(format!(
            "{} bytes is shorter than the {MIN_WAV_LEN}-byte minimum header",
            bytes.len()
        )));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(SignalError::MalformedWav("missing RIFF/WAVE magic".into()));
    }

    let mut format: Option<Format> = None;
    let mut data: Option<&[u8]> = None;
    let mut off = 12;
    while off + 8 <= bytes.len() {
        let id = &bytes[off..off + 4];
        let size = u32_at(bytes, off + 4) as usize;
        let body_start = off + 8;
        let body_end = body_start.saturating_add(size).min(bytes.len());
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => format = Some(parse_fmt(body)?),
            b"data" => {
                data = Some(body);
                break;
            }
            _ => {}
        }
        // chunks are word aligned
        off = body_start.saturating_add(size).saturating_add(size & 1);
    }

    let format = format.ok_or_else(|| SignalError::MalformedWav("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| SignalError::MalformedWav("no data chunk".into()))?;

    if format.sample_rate == 0 {
        return Err(SignalError::MalformedWav("sample rate is zero".into()));
    }
    if !(1..=2).contains(&format.channels) {
        return Err(SignalError::UnsupportedEncoding(format!(
            "{} channels (only mono and stereo are supported)",
            format.channels
        )));
    }
    let bytes_per_sample = match (format.code, format.bits_per_sample) {
        (FORMAT_PCM, 16) => 2,
        (FORMAT_IEEE_FLOAT, 32) => 4,
        (FORMAT_PCM, bits) | (FORMAT_IEEE_FLOAT, bits) => {
            return Err(SignalError::UnsupportedEncoding(format!(
                "{bits}-bit samples with format code {:#06x}",
                format.code
            )))
        }
        (code, _) => {
            return Err(SignalError::UnsupportedEncoding(format!(
                "compression code {code:#06x}"
            )))
        }
    };

    let channels = format.channels as usize;
    let frame_len = bytes_per_sample * channels;
    let n_frames = data.len() / frame_len;
    if n_frames < 2 {
        return Err(SignalError::EmptyAudio(n_frames));
    }

    let read = |pos: usize| -> f64 {
        if bytes_per_sample == 2 {
            f64::from(i16::from_le_bytes([data[pos], data[pos + 1]])) / 32768.0
        } else {
            f64::from(f32::from_le_bytes([
                data[pos],
                data[pos + 1],
                data[pos + 2],
                data[pos + 3],
            ]))
        }
    };

    let samples: Vec<f64> = (0..n_frames)
        .map(|f| {
            let base = f * frame_len;
            if channels == 1 {
                read(base)
            } else {
                0.5 * (read(base) + read(base + bytes_per_sample))
            }
        })
        .collect();

    Signal::new(samples, format.sample_rate, "")
}

/// Encodes samples in [-1, 1] as a mono 16-bit PCM WAV file.
///
/// Each sample is scaled by 32768, rounded, and clamped to the i16 range,
/// so `decode_wav` returns exactly `round(x·32768)/32768`.
pub fn encode_wav_pcm16(samples: &[f64], sample_rate_hz: u32) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(MIN_WAV_LEN + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        let v = (s * 32768.0)
            .round()
            .clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Mean and sample (n−1) standard deviation.
pub(crate) fn mean_and_sample_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Rescales a signal to zero mean and unit sample standard deviation.
pub fn z_normalize(signal: &Signal) -> Result<Signal, SignalError> {
    let (mean, std) = mean_and_sample_std(&signal.samples);
    if std.is_nan() || std <= MIN_STD {
        return Err(SignalError::DegenerateSignal(std));
    }
    let mut out: Vec<f64> = signal.samples.iter().map(|v| (v - mean) / std).collect();
    // Second centering pass removes the rounding residue of the first mean.
    let residue = out.iter().sum::<f64>() / out.len() as f64;
    out.iter_mut().for_each(|v| *v -= residue);
    Ok(Signal {
        samples: out,
        sample_rate_hz: signal.sample_rate_hz,
        source_id: signal.source_id.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wav_bytes(code: u16, channels: u16, bits: u16, rate: u32, data: &[u8]) -> Vec<u8> {
        let block = channels * bits / 8;
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&((36 + data.len()) as u32).to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&code.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * block as u32).to_le_bytes());
        out.extend_from_slice(&block.to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(data.len() as u32).to_le_bytes());
        out.extend_from_slice(data);
        out
    }

    fn pcm16(values: &[i16]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn decodes_pcm16_mono() {
        let bytes = wav_bytes(1, 1, 16, 8000, &pcm16(&[0, 16384, -16384, 0]));
        let s = decode_wav(&bytes).unwrap();
        assert_eq!(s.samples(), &[0.0, 0.5, -0.5, 0.0]);
        assert_eq!(s.sample_rate_hz(), 8000);
    }

    #[test]
    fn stereo_is_averaged() {
        let data: Vec<u8> = [1.0f32, 0.0, 0.25, 0.75]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let s = decode_wav(&wav_bytes(3, 2, 32, 44100, &data)).unwrap();
        assert_eq!(s.samples(), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_short_and_bad_magic() {
        assert!(matches!(
            decode_wav(&[0u8; 10]),
            Err(SignalError::MalformedWav(_))
        ));
        let mut bytes = wav_bytes(1, 1, 16, 8000, &pcm16(&[1, 2, 3]));
        bytes[0] = b'X';
        assert!(matches!(
            decode_wav(&bytes),
            Err(SignalError::MalformedWav(_))
        ));
    }

    #[test]
    fn rejects_compressed_and_odd_layouts() {
        let alaw = wav_bytes(6, 1, 8, 8000, &[1, 2, 3, 4]);
        assert!(matches!(
            decode_wav(&alaw),
            Err(SignalError::UnsupportedEncoding(_))
        ));
        let pcm24 = wav_bytes(1, 1, 24, 8000, &[0; 12]);
        assert!(matches!(
            decode_wav(&pcm24),
            Err(SignalError::UnsupportedEncoding(_))
        ));
        let quad = wav_bytes(1, 4, 16, 8000, &[0; 16]);
        assert!(matches!(
            decode_wav(&quad),
            Err(SignalError::UnsupportedEncoding(_))
        ));
    }

    #[test]
    fn one_frame_is_empty_audio() {
        let bytes = wav_bytes(1, 1, 16, 8000, &pcm16(&[7]));
        assert_eq!(decode_wav(&bytes), Err(SignalError::EmptyAudio(1)));
    }

    #[test]
    fn skips_unknown_chunks_before_data() {
        let mut bytes = wav_bytes(1, 1, 16, 16000, &pcm16(&[100, -100]));
        // splice a LIST chunk (odd length, so padded) between fmt and data
        let list = [b'L', b'I', b'S', b'T', 3, 0, 0, 0, b'a', b'b', b'c', 0];
        bytes.splice(36..36, list.iter().copied());
        let s = decode_wav(&bytes).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn extensible_pcm_is_accepted() {
        let mut fmt = Vec::new();
        fmt.extend_from_slice(&FORMAT_EXTENSIBLE.to_le_bytes());
        fmt.extend_from_slice(&1u16.to_le_bytes());
        fmt.extend_from_slice(&8000u32.to_le_bytes());
        fmt.extend_from_slice(&16000u32.to_le_bytes());
        fmt.extend_from_slice(&2u16.to_le_bytes());
        fmt.extend_from_slice(&16u16.to_le_bytes());
        fmt.extend_from_slice(&22u16.to_le_bytes());
        fmt.extend_from_slice(&16u16.to_le_bytes());
        fmt.extend_from_slice(&4u32.to_le_bytes());
        fmt.extend_from_slice(&[
            1, 0, 0, 0, 0, 0, 0x10, 0, 0x80, 0, 0, 0xAA, 0, 0x38, 0x9B, 0x71,
        ]);
        let data = pcm16(&[16384, 0, -16384]);
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&((4 + 8 + fmt.len() + 8 + data.len()) as u32).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&(fmt.len() as u32).to_le_bytes());
        bytes.extend_from_slice(&fmt);
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&(data.len() as u32).to_le_bytes());
        bytes.extend_from_slice(&data);
        assert_eq!(decode_wav(&bytes).unwrap().samples(), &[0.5, 0.0, -0.5]);
    }

    #[test]
    fn z_normalize_examples() {
        let s = Signal::new(vec![1.0, 2.0, 3.0], 1, "a").unwrap();
        assert_eq!(z_normalize(&s).unwrap().samples(), &[-1.0, 0.0, 1.0]);

        let s = Signal::new(vec![0.0, 2.0], 1, "b").unwrap();
        let z = z_normalize(&s).unwrap();
        assert!((z.samples()[0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((z.samples()[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);

        let s = Signal::new(vec![5.0, 5.0, 5.0], 1, "c").unwrap();
        assert!(matches!(
            z_normalize(&s),
            Err(SignalError::DegenerateSignal(_))
        ));
    }

    #[test]
    fn signal_rejects_nan_and_zero_rate() {
        assert_eq!(
            Signal::new(vec![0.0, f64::NAN], 10, ""),
            Err(SignalError::NonFiniteSample(1))
        );
        assert_eq!(
            Signal::new(vec![0.0, 1.0], 0, ""),
            Err(SignalError::InvalidSampleRate)
        );
    }

    fn nonconstant() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3f64..1e3, 2..512)
            .prop_filter("non-constant", |v| mean_and_sample_std(v).1 > 1e-6)
    }

    proptest! {
        #[test]
        fn z_normalize_moments(v in nonconstant()) {
            let z = z_normalize(&Signal::new(v, 100, "").unwrap()).unwrap();
            let (mean, std) = mean_and_sample_std(z.samples());
            prop_assert!(mean.abs() < 1e-12);
            prop_assert!((std - 1.0).abs() < 1e-9);
        }

        #[test]
        fn z_normalize_idempotent(v in nonconstant()) {
            let once = z_normalize(&Signal::new(v, 100, "").unwrap()).unwrap();
            let twice = z_normalize(&once).unwrap();
            for (a, b) in once.samples().iter().zip(twice.samples()) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }

        #[test]
        fn pcm16_round_trip(values in prop::collection::vec(any::<i16>(), 2..256), rate in 1u32..192_000) {
            let samples: Vec<f64> = values.iter().map(|&v| f64::from(v) / 32768.0).collect();
            let decoded = decode_wav(&encode_wav_pcm16(&samples, rate)).unwrap();
            prop_assert_eq!(decoded.samples(), &samples[..]);
            prop_assert_eq!(decoded.sample_rate_hz(), rate);
        }
    }
}
