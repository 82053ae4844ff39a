"""Suicide-risk assessment for long psychological support hotline transcripts.

Transcripts are segmented, summarized into a memory stream, scored 0-16 by
a chat model with zero-shot or few-shot prompting, optionally fused with the
hotline's 12-element manual scale, and evaluated with bootstrap intervals.
"""

__version__ = "0.1.0"
