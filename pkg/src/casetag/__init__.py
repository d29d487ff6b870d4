"""casetag: truecasing as a pretraining signal for case-robust NER tagging."""

__version__ = "0.1.0"
