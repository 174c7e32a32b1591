"""Aircraft detection from paired fuselage / wing line-segment heatmaps.

The package covers everything downstream of a heatmap-predicting network:
ground-truth conversion and rendering, the focal-style loss, heatmap decoding
(adhesion cutting, segment fitting, pairing), the three output forms, and
VOC-style evaluation.
"""
from ._kernels import BACKEND
from .annotations import (Keypoints5, SceneAnnotation, gt_pentagon, kp_to_segments, parse_file,
                          parse_scene, rbox_to_segments, serialize_file, serialize_scene)
from .config import RunConfig, load_config
from .cutline import CutlineConfig, CutPolicy, apply_cuts, detect_adhesions
from .decoder import BinaryMask, PixelRegion, binarize, connected_components, extract_points, fit_segment
from .evaluation import APStyle, EvalReport, Form, match_and_score
from .geometry import hbb_from_pair, pentagon_from_pair, polygon_iou, rbb_from_pair
from .grouping import AircraftDetection, GroupingConfig, match_head, pair_predicate, pair_segments
from .heatmap import (Channel, Heatmap, LossWeights, SimulationConfig, focal_loss, focal_loss_grad,
                      render_gt, simulate_prediction, total_loss)
from .pipeline import Detection, run_pipeline
from .shapes import HorizontalBox, LineSegment, PentagonMask, RotatedBox

__version__ = "0.1.0"
