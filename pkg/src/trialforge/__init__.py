"""trialforge: harmonize clinical trial registries into one relational corpus,
extract evidence, and generate reasoning benchmarks from it."""

__version__ = "0.1.0"
