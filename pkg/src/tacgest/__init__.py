"""Real-time hand-gesture recognition for a 9x9 textile pressure sensor."""

from .augment import augment_dataset, augment_recording, bounding_box, shift
from .core import (GESTURE_NAMES, GRID_N, NUM_CLASSES, TAXELS, Frame,
                   GestureClass, Recording, SensorCoord, coord_to_index,
                   index_to_coord, label_of_id)
from .datafiles import load_dataset, load_model, save_dataset, save_model
from .errors import DataFormatError, DomainError, OscParseError
from .evaluate import (ConfusionMatrix, SplitSpec, StreamReport, build_stream,
                       loso_cv, stratified_split, stream_evaluate)
from .features import (motion_history_image, spatio_temporal_features,
                       touch_pattern_features)
from .osc import (DEFAULT_UDP_PORT, FRAME_ADDRESS, encode_osc_bundle,
                  encode_osc_frame, parse_osc_packet)
from .pipeline import (METHOD_NAMES, fit_method, load_trained, save_trained,
                       train_method)
from .preprocess import PreprocessConfig, pad_to_length, preprocess
from .segment import Segment, Segmenter, SegmenterConfig
from .serve import GestureService, ServeConfig
from .synth import SynthSpec, VirtualParticipant, make_participant, synth_dataset

__version__ = "1.0.0"

__all__ = [
    "GESTURE_NAMES", "GRID_N", "NUM_CLASSES", "TAXELS",
    "Frame", "GestureClass", "Recording", "SensorCoord",
    "coord_to_index", "index_to_coord", "label_of_id",
    "DataFormatError", "DomainError", "OscParseError",
    "DEFAULT_UDP_PORT", "FRAME_ADDRESS",
    "encode_osc_frame", "encode_osc_bundle", "parse_osc_packet",
    "PreprocessConfig", "preprocess", "pad_to_length",
    "augment_recording", "augment_dataset", "bounding_box", "shift",
    "motion_history_image", "spatio_temporal_features", "touch_pattern_features",
    "SynthSpec", "VirtualParticipant", "make_participant", "synth_dataset",
    "SplitSpec", "ConfusionMatrix", "StreamReport",
    "stratified_split", "loso_cv", "build_stream", "stream_evaluate",
    "Segment", "Segmenter", "SegmenterConfig",
    "METHOD_NAMES", "fit_method", "train_method", "save_trained", "load_trained",
    "GestureService", "ServeConfig",
    "save_dataset", "load_dataset", "save_model", "load_model",
    "__version__",
]
