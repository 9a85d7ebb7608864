from .accel import (
    ACCEL_FRAME_LENGTHS,
    ACCEL_SEGMENTS,
    AccelFeatureConfig,
    extract_accel_features,
    power_spectrum,
)
from .audio import (
    AUDIO_FRAME_LENGTHS,
    AUDIO_SEGMENTS,
    MFCC_COUNTS,
    AudioFeatureConfig,
    deltas,
    extract_audio_features,
    hz_to_mel,
    mel_filterbank,
    mfcc_frame,
    zcr,
)
from .extractors import AccelFeatures, AudioFeatures, make_extractor
from .framing import crest_factor, frame_positions, frame_skip, frames, kurtosis, moving_average, rms
from .matrix import FeatureMatrix, read_matrix, write_matrix

__all__ = [
    "ACCEL_FRAME_LENGTHS", "ACCEL_SEGMENTS", "AUDIO_FRAME_LENGTHS", "AUDIO_SEGMENTS",
    "MFCC_COUNTS", "AccelFeatureConfig", "AccelFeatures", "AudioFeatureConfig",
    "AudioFeatures", "FeatureMatrix", "crest_factor", "deltas", "extract_accel_features",
    "extract_audio_features", "frame_positions", "frame_skip", "frames", "hz_to_mel", "kurtosis",
    "make_extractor", "mel_filterbank", "mfcc_frame", "moving_average", "power_spectrum",
    "read_matrix", "rms", "write_matrix", "zcr",
]
