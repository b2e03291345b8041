//! Single-track MIDI export, one quarter note per tune note.

use std::path::Path;

use midly::num::{u15, u24, u28, u4, u7};
use midly::{Format, Header, MetaMessage, MidiMessage, Smf, Timing, TrackEvent, TrackEventKind};

use crate::error::{Error, Result};
use crate::model::Tune;

pub const TICKS_PER_QUARTER: u16 = 480;
pub const VELOCITY: u8 = 80;
pub const DEFAULT_BASE_NOTE: i32 = 60;
/// Microseconds per quarter note at 120 BPM.
const TEMPO: u32 = 500_000;

/// MIDI key numbers for `t`. Pitch-class input (every note below 12) is
/// shifted by `base_note`; anything else is taken as absolute.
pub fn midi_keys(t: &Tune, base_note: i32) -> Result<Vec<u8>> {
    let max = t.notes().iter().copied().max().unwrap_or(0);
    let offset = if max < 12 { i64::from(base_note) } else { 0 };
    t.notes()
        .iter()
        .enumerate()
        .map(|(index, &n)| {
            let value = i64::from(n) + offset;
            u8::try_from(value)
                .ok()
                .filter(|k| *k < 128)
                .ok_or(Error::NoteOutOfRange { index, value })
        })
        .collect()
}

pub fn midi_bytes(t: &Tune, base_note: i32) -> Result<Vec<u8>> {
    let keys = midi_keys(t, base_note)?;
    let channel = u4::new(0);
    let midi = |delta: u32, message| TrackEvent {
        delta: u28::new(delta),
        kind: TrackEventKind::Midi { channel, message },
    };
    let mut track = vec![
        TrackEvent {
            delta: u28::new(0),
            kind: TrackEventKind::Meta(MetaMessage::Tempo(u24::new(TEMPO))),
        },
        midi(
            0,
            MidiMessage::ProgramChange {
                program: u7::new(0),
            },
        ),
    ];
    for key in keys {
        let key = u7::new(key);
        track.push(midi(
            0,
            MidiMessage::NoteOn {
                key,
                vel: u7::new(VELOCITY),
            },
        ));
        track.push(midi(
            u32::from(TICKS_PER_QUARTER),
            MidiMessage::NoteOff {
                key,
                vel: u7::new(0),
            },
        ));
    }
    track.push(TrackEvent {
        delta: u28::new(0),
        kind: TrackEventKind::Meta(MetaMessage::EndOfTrack),
    });

    let mut smf = Smf::new(Header::new(
        Format::SingleTrack,
        Timing::Metrical(u15::new(TICKS_PER_QUARTER)),
    ));
    smf.tracks.push(track);
    let mut out = Vec::new();
    smf.write_std(&mut out)
        .expect("writing to a Vec cannot fail");
    Ok(out)
}

pub fn export_midi(t: &Tune, path: &Path, base_note: i32) -> Result<()> {
    let bytes = midi_bytes(t, base_note)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
