"""Authoring toolkit for timed audio-description scripts."""

__version__ = "0.1.0"
