"""Word-sense disambiguation with specification marks, maximum-entropy
classifiers and their combinations."""

__version__ = "0.1.0"
