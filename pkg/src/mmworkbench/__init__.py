"""Interactive workbench for probing multimodal sentiment robustness.

Inject word-aligned noise into a clip's video, audio, or transcript, apply
signal- and feature-level defenses, and compare features and fused sentiment
predictions across the original, noised, and defended variants.
"""

__version__ = "0.1.0"
