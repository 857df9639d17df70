"""Frame feature extraction: CNN penultimate activations plus color histogram.

Each keyframe becomes a single float32 vector, the 4096-dimensional
penultimate fully-connected activation of a VGG-19 backbone concatenated
with an L1-normalized HSV color histogram.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import cv2
import numpy as np
import torch

from .config import ExtractError, ExtractorConfig
from .shots import hsv_histogram, middle_frames

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)
_INPUT_SIZE = 224


@lru_cache(maxsize=1)
def load_backbone(model_id: str) -> tuple[torch.nn.Module, str]:
    """The eval-mode VGG-19 backbone and a tag naming its weights.

    Pretrained ImageNet weights are used when they can be fetched; otherwise
    a seeded random initialization keeps the extraction deterministic and the
    tag records which one produced the corpus.
    """
    if model_id != "vgg19":
        raise ExtractError(f"unknown CNN model {model_id!r}")
    from torchvision.models import VGG19_Weights, vgg19

    try:
        model = vgg19(weights=VGG19_Weights.IMAGENET1K_V1)
        weights_tag = "imagenet"
    except Exception:
        warnings.warn(
            "pretrained VGG-19 weights unavailable; falling back to a seeded "
            "random initialization",
            stacklevel=2,
        )
        torch.manual_seed(0)
        model = vgg19(weights=None)
        weights_tag = "random-init"
    model.eval()
    for parameter in model.parameters():
        parameter.requires_grad_(False)
    return model, weights_tag


def preprocess(frame_bgr: np.ndarray) -> torch.Tensor:
    """BGR uint8 frame to a normalized (1, 3, 224, 224) float tensor."""
    rgb = cv2.cvtColor(frame_bgr, cv2.COLOR_BGR2RGB)
    resized = cv2.resize(rgb, (_INPUT_SIZE, _INPUT_SIZE), interpolation=cv2.INTER_LINEAR)
    scaled = resized.astype(np.float32) / 255.0
    normalized = (scaled - np.array(_IMAGENET_MEAN, dtype=np.float32)) / np.array(
        _IMAGENET_STD, dtype=np.float32
    )
    tensor = torch.from_numpy(normalized).permute(2, 0, 1).unsqueeze(0)
    return tensor


def cnn_feature(frame_bgr: np.ndarray, model: torch.nn.Module) -> np.ndarray:
    """The 4096-dimensional penultimate fully-connected activation."""
    tensor = preprocess(frame_bgr)
    with torch.no_grad():
        activations = model.features(tensor)
        pooled = model.avgpool(activations).flatten(1)
        # Stop before the final classifier layer: classifier[:5] covers
        # fc6 -> relu -> dropout -> fc7 -> relu.
        penultimate = model.classifier[:5](pooled)
    return penultimate.squeeze(0).numpy().astype(np.float32)


def frame_feature(
    frame_bgr: np.ndarray, model: torch.nn.Module, config: ExtractorConfig
) -> np.ndarray:
    """CNN activation concatenated with the HSV histogram, float32."""
    cnn = cnn_feature(frame_bgr, model)
    hist = hsv_histogram(frame_bgr, config.hsv_bins).astype(np.float32)
    return np.concatenate([cnn, hist])


def extract_frame_features(
    video_path, shots: list[tuple[int, int]], config: ExtractorConfig
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Features for each shot's middle frame: (num_shots, 4096 + hsv) float32.

    Also returns the keyframe images themselves so callers can export
    thumbnails without decoding the video twice.
    """
    model, _ = load_backbone(config.cnn_model_id)
    keyframes = middle_frames(video_path, shots)
    rows = np.stack([frame_feature(frame, model, config) for frame in keyframes])
    return rows, keyframes
